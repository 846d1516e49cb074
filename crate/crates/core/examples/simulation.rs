//! A seeded Monte-Carlo sweep configured from TOML, written as CSV.

use polarmetric::sim::{write_report, SimConfig, Simulation};

const CONFIG: &str = r#"
[code]
kind = "pac"
length = 64
dimension = 32
profile = "mc"

[channel]
kind = "awgn"
points = [1.0, 2.0, 3.0]

[decoder]
mode = "pfscl"
list = 8
mt = -10.0

[run]
trials = 2000
min_errors = 100
seed = 1
"#;

pub fn run_example() -> polarmetric::Result<()> {
    let config = SimConfig::from_toml(CONFIG)?;
    println!("decoder {}", config.decoder.label());
    let report = Simulation::new(config)?.run_sweep()?;
    write_report(&report, std::io::stdout().lock())
        .map_err(|e| polarmetric::Error::Config(e.to_string()))?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> polarmetric::Result<()> {
    run_example()
}
