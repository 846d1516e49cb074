//! Command-line front end of the simulation harness.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use polarmetric::decode::{Arithmetic, Mode};
use polarmetric::sim::{
    emit_csv, parse_points, recipe, write_report, SimConfig, Simulation, RECIPE_NAMES,
};
use polarmetric::Result;

/// Monte-Carlo simulation of polar and PAC list decoders. Flags override the
/// values of the configuration file.
#[derive(Debug, Parser)]
#[command(version)]
struct Args {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Code, e.g. `pac(128,64)` or `polar(64,32)`.
    #[arg(long)]
    code: Option<String>,
    /// Rate profile: `rm`, `ga`, `mc` or a profile file.
    #[arg(long)]
    profile: Option<String>,
    /// Connection polynomial, e.g. `x^10+x^9+x^7+x^3+1` or `default`.
    #[arg(long)]
    poly: Option<String>,
    /// Construction point of the `ga` profile, in dB.
    #[arg(long)]
    design_ebn0: Option<f64>,
    /// Channel: `awgn`, `bsc` or `bec`.
    #[arg(long)]
    channel: Option<String>,
    /// Channel points: `1,2,3` or `0:0.5:3.5` (dB for AWGN, probabilities otherwise).
    #[arg(long)]
    ebn0: Option<String>,
    /// Decoder: `sc`, `scl`, `fscl`, `pfscl` or `vpscl`.
    #[arg(long)]
    mode: Option<Mode>,
    /// List size.
    #[arg(long)]
    list: Option<usize>,
    /// Constant branch threshold of `pfscl`.
    #[arg(long, allow_hyphen_values = true)]
    mt: Option<f64>,
    /// Pruning probability of `vpscl`.
    #[arg(long)]
    pth: Option<f64>,
    /// Use min-sum updates instead of exact ones.
    #[arg(long)]
    min_sum: bool,
    /// Maximum trials per point.
    #[arg(long)]
    trials: Option<u64>,
    /// Stop a point after this many frame errors (0 disables).
    #[arg(long)]
    min_errors: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 uses every core).
    #[arg(long)]
    workers: Option<usize>,
    /// Output CSV file, or directory for recipes.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Built-in recipe to run.
    #[arg(long)]
    recipe: Option<String>,
    /// List the built-in recipes and exit.
    #[arg(long)]
    list_recipes: bool,
}

fn apply(args: &Args, cfg: &mut SimConfig) -> Result<()> {
    if let Some(c) = &args.code {
        cfg.code.set_code(c)?;
    }
    if let Some(p) = &args.profile {
        cfg.code.profile = p.clone();
    }
    if let Some(p) = &args.poly {
        cfg.code.poly = p.clone();
    }
    if let Some(d) = args.design_ebn0 {
        cfg.code.design_ebn0 = d;
    }
    if let Some(c) = &args.channel {
        cfg.channel.kind = c.parse()?;
    }
    if let Some(p) = &args.ebn0 {
        cfg.channel.points = parse_points(p)?;
    }
    if let Some(m) = args.mode {
        cfg.decoder.mode = m;
    }
    if let Some(l) = args.list {
        cfg.decoder.list = l;
    }
    if let Some(m) = args.mt {
        cfg.decoder.mt = m;
    }
    if let Some(p) = args.pth {
        cfg.decoder.pth = p;
    }
    if args.min_sum {
        cfg.decoder.arithmetic = Arithmetic::MinSum;
    }
    if let Some(t) = args.trials {
        cfg.run.trials = t;
    }
    if let Some(e) = args.min_errors {
        cfg.run.min_errors = e;
    }
    if let Some(s) = args.seed {
        cfg.run.seed = s;
    }
    if let Some(w) = args.workers {
        cfg.run.workers = w;
    }
    Ok(())
}

fn run(args: Args) -> Result<()> {
    if args.list_recipes {
        for name in RECIPE_NAMES {
            println!("{name:8} {}", recipe(name)?.description);
        }
        return Ok(());
    }
    let mut cfg = match &args.config {
        Some(path) => SimConfig::load(path)?,
        None => SimConfig::default(),
    };
    apply(&args, &mut cfg)?;
    if let Some(name) = &args.recipe {
        let out = args.out.clone().unwrap_or_else(|| PathBuf::from("results"));
        for path in recipe(name)?.run(&cfg.run, &out)? {
            println!("wrote {}", path.display());
        }
        return Ok(());
    }
    let report = Simulation::new(cfg)?.run_sweep()?;
    match &args.out {
        Some(path) => emit_csv(&report, path)?,
        None => write_report(&report, std::io::stdout().lock())
            .map_err(|e| polarmetric::Error::Config(format!("writing report: {e}")))?,
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
