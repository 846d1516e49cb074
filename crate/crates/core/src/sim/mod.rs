//! Seeded Monte-Carlo simulation harness: configuration, trial-parallel
//! runs with counter-based random streams, CSV reports and the built-in
//! reproduction recipes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub mod config;
pub mod recipes;
pub mod report;
pub mod runner;

pub use config::{
    mc_profile_64_32, parse_points, ChannelConfig, ChannelKind, CodeConfig, CodeKind,
    DecoderSettings, RunConfig, SimConfig,
};
pub use recipes::{awgn_tree, recipe, Recipe, RecipeKind, RECIPE_ALPHABET, RECIPE_NAMES};
pub use report::{emit_csv, parse_csv, write_report, REPORT_HEADER};
pub use runner::{ReportRow, SimReport, Simulation};

/// SplitMix64 finalizer.
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent generator for one trial, determined by the seed, the SNR
/// index and the trial index alone.
pub fn trial_rng(seed: u64, snr_index: u64, trial: u64) -> ChaCha8Rng {
    let key = splitmix(seed ^ splitmix(snr_index.wrapping_mul(0x1000_0000_01b3) ^ splitmix(trial)));
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(snr_index);
    rng
}

/// Formats `x` with six significant digits in the style of C's `%g`.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.5e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
