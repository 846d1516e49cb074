//! Runs one built-in reproduction recipe into a directory:
//! `cargo run --release --example recipes -- table3 results 2000`.

use std::path::PathBuf;

use polarmetric::sim::{recipe, RunConfig, RECIPE_NAMES};

pub fn run_example() -> polarmetric::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "fig2".into());
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("polarmetric"));
    let trials = args.next().and_then(|t| t.parse().ok()).unwrap_or(1000);
    println!("available: {}", RECIPE_NAMES.join(" "));
    let recipe = recipe(&name)?;
    println!("{}: {}", recipe.name, recipe.description);
    let run = RunConfig { trials, min_errors: 100, ..RunConfig::default() };
    for path in recipe.run(&run, &out)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> polarmetric::Result<()> {
    run_example()
}
