//! Built-in reproduction recipes: each pins the code, decoders and channel
//! grid of one figure or table and writes its data as CSV.

use std::path::{Path, PathBuf};

use crate::channel::{j_approx, k_approx, k_func, metric_variance_awgn, AwgnChannel, Channel};
use crate::decode::{Arithmetic, Mode};
use crate::error::{Error, Result};
use crate::metric::{
    cumulative_metric_profile, expected_metric_tree, sample_metric_profile, write_profile_csv,
    SampleOptions,
};
use crate::polarize::{bec_stats, bit_channel_stats, quantize_awgn, BitChannelStats, StatsTree};

use super::config::{parse_points, ChannelConfig, ChannelKind, CodeConfig, CodeKind, DecoderSettings, RunConfig, SimConfig};
use super::report::emit_csv;
use super::runner::Simulation;
use super::fmt_sig;

/// Output alphabet size of the constructions behind the tree, profile and
/// bit-channel recipes.
pub const RECIPE_ALPHABET: usize = 512;

/// What a recipe computes.
#[derive(Debug, Clone, PartialEq)]
pub enum RecipeKind {
    /// `K(t)` against its closed-form approximation over an `Eb/N0` grid.
    KApprox,
    /// Metric variance: exact, approximated and from a quantized channel.
    VarianceApprox,
    /// Sorted capacities and variances of all bit channels.
    BitChannels { channel: ChannelKind, point: f64, n: usize },
    /// Expected metric tree of the fast decoding tree.
    Tree { code: CodeConfig, ebn0: f64 },
    /// Expected against sampled cumulative metric of single-path fast
    /// decoding.
    Profile { code: CodeConfig, ebn0: f64 },
    /// Error-rate and counter sweeps, one CSV per decoder.
    Sweep { code: CodeConfig, points: Vec<f64>, series: Vec<DecoderSettings> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recipe {
    pub name: &'static str,
    pub description: &'static str,
    pub kind: RecipeKind,
}

/// Names accepted by [`recipe`].
pub const RECIPE_NAMES: [&str; 20] = [
    "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11", "fig12",
    "fig13", "fig14", "fig15", "fig16", "fig17", "table1", "table2", "table3", "table4",
];

fn code(kind: CodeKind, length: usize, dimension: usize, profile: &str) -> CodeConfig {
    CodeConfig {
        kind,
        length,
        dimension,
        profile: profile.into(),
        ..CodeConfig::default()
    }
}

fn pfscl(list: usize, mt: f64) -> DecoderSettings {
    DecoderSettings { mode: Mode::Pfscl, list, mt, ..DecoderSettings::default() }
}

fn vpscl(list: usize, pth: f64, threshold_ebn0: f64) -> DecoderSettings {
    DecoderSettings { mode: Mode::Vpscl, list, pth, threshold_ebn0, ..DecoderSettings::default() }
}

fn scl(list: usize) -> DecoderSettings {
    DecoderSettings { mode: Mode::Scl, list, ..DecoderSettings::default() }
}

fn grid(text: &str) -> Vec<f64> {
    parse_points(text).expect("static grid")
}

/// Looks up a built-in recipe.
pub fn recipe(name: &str) -> Result<Recipe> {
    let pac = CodeKind::Pac;
    let rm128_64 = code(pac, 128, 64, "rm");
    let ga1024 = code(pac, 1024, 512, "ga");
    let mc64 = code(pac, 64, 32, "mc");
    let rm128_99 = code(pac, 128, 99, "rm");
    let (name, description, kind) = match name {
        "fig2" => ("fig2", "K(t) and its approximation", RecipeKind::KApprox),
        "fig3" => ("fig3", "metric variance and its approximations", RecipeKind::VarianceApprox),
        "fig4" => (
            "fig4",
            "sorted bit-channel capacities and variances, N=1024, AWGN at 2.5 dB",
            RecipeKind::BitChannels { channel: ChannelKind::Awgn, point: 2.5, n: 10 },
        ),
        "fig5" => (
            "fig5",
            "sorted bit-channel capacities and variances, N=1024, BEC(0.3)",
            RecipeKind::BitChannels { channel: ChannelKind::Bec, point: 0.3, n: 10 },
        ),
        "fig6" => (
            "fig6",
            "expected metric tree of PAC(64,32), MC profile, 2.5 dB",
            RecipeKind::Tree { code: mc64, ebn0: 2.5 },
        ),
        "fig7" | "fig8" => (
            if name == "fig7" { "fig7" } else { "fig8" },
            "cumulative metric profile and sample variance, PAC(64,32), MC profile, 2.5 dB",
            RecipeKind::Profile { code: mc64, ebn0: 2.5 },
        ),
        "fig9" => (
            "fig9",
            "cumulative metric profile, PAC(1024,512), GA profile, 2.5 dB",
            RecipeKind::Profile { code: ga1024, ebn0: 2.5 },
        ),
        "fig10" => (
            "fig10",
            "cumulative metric profile, PAC(128,64), GA profile, 2.5 dB",
            RecipeKind::Profile { code: code(pac, 128, 64, "ga"), ebn0: 2.5 },
        ),
        "fig11" => (
            "fig11",
            "cumulative metric profile, PAC(128,64), RM profile, 2.5 dB",
            RecipeKind::Profile { code: rm128_64, ebn0: 2.5 },
        ),
        "fig12" => (
            "fig12",
            "FER of PAC(128,64) RM: SCL, PFSCL and VPSCL at L=8 and 32",
            RecipeKind::Sweep {
                code: rm128_64,
                points: grid("0:0.5:3.5"),
                series: vec![
                    scl(8),
                    scl(32),
                    pfscl(8, -10.0),
                    pfscl(32, -10.0),
                    vpscl(8, 1e-6, 2.5),
                    vpscl(32, 1e-6, 2.5),
                ],
            },
        ),
        "table1" => (
            "table1",
            "sorting operations of PAC(128,64) RM",
            RecipeKind::Sweep {
                code: rm128_64,
                points: grid("0:0.5:3.5"),
                series: vec![
                    pfscl(32, -10.0),
                    pfscl(8, -10.0),
                    vpscl(32, 1e-6, 2.5),
                    vpscl(8, 1e-6, 2.5),
                ],
            },
        ),
        "fig13" | "table2" => (
            if name == "fig13" { "fig13" } else { "table2" },
            "FER and sorting operations of PAC(1024,512) GA at L=4",
            RecipeKind::Sweep {
                code: ga1024,
                points: grid("0:0.5:3"),
                series: {
                    let mut s = vec![pfscl(4, -10.0), vpscl(4, 1e-6, 2.5), vpscl(4, 1e-4, 2.5)];
                    if name == "fig13" {
                        s.insert(0, scl(4));
                    }
                    s
                },
            },
        ),
        "fig14" | "table3" => (
            if name == "fig14" { "fig14" } else { "table3" },
            "FER and sorting operations of PAC(64,32) MC",
            RecipeKind::Sweep {
                code: mc64,
                points: grid("0:0.5:4"),
                series: {
                    let mut s = vec![
                        pfscl(32, -10.0),
                        pfscl(8, -10.0),
                        vpscl(32, 1e-6, 2.5),
                        vpscl(8, 1e-6, 2.5),
                    ];
                    if name == "fig14" {
                        s.splice(0..0, [scl(8), scl(32)]);
                    }
                    s
                },
            },
        ),
        "fig15" | "table4" => (
            if name == "fig15" { "fig15" } else { "table4" },
            "FER and sorting operations of PAC(128,99) RM",
            RecipeKind::Sweep {
                code: rm128_99,
                points: grid("0:0.5:4.5"),
                series: {
                    let mut s = vec![
                        pfscl(32, -15.0),
                        pfscl(8, -15.0),
                        vpscl(32, 1e-6, 3.5),
                        vpscl(8, 1e-6, 3.5),
                    ];
                    if name == "fig15" {
                        s.splice(0..0, [scl(8), scl(32)]);
                    }
                    s
                },
            },
        ),
        "fig16" | "fig17" => (
            if name == "fig16" { "fig16" } else { "fig17" },
            "VPSCL of PAC(128,64) RM at L=8 for several pruning probabilities",
            RecipeKind::Sweep {
                code: rm128_64,
                points: grid("0:0.5:3.5"),
                series: vec![
                    scl(8),
                    vpscl(8, 1e-2, 2.5),
                    vpscl(8, 1e-4, 2.5),
                    vpscl(8, 1e-6, 2.5),
                ],
            },
        ),
        other => {
            return Err(Error::Config(format!(
                "unknown recipe `{other}`; available: {}",
                RECIPE_NAMES.join(", ")
            )))
        }
    };
    Ok(Recipe { name, description, kind })
}

impl Recipe {
    /// Simulation configurations of a sweep recipe, labelled by decoder.
    pub fn sweep_configs(&self, run: &RunConfig) -> Vec<(String, SimConfig)> {
        match &self.kind {
            RecipeKind::Sweep { code, points, series } => series
                .iter()
                .map(|d| {
                    let config = SimConfig {
                        code: code.clone(),
                        channel: ChannelConfig { kind: ChannelKind::Awgn, points: points.clone() },
                        decoder: d.clone(),
                        run: run.clone(),
                    };
                    (d.label(), config)
                })
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Runs the recipe and writes its CSV files into `out_dir`.
    pub fn run(&self, run: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
        let file = |suffix: &str| out_dir.join(format!("{}{suffix}.csv", self.name));
        match &self.kind {
            RecipeKind::KApprox => {
                let path = file("");
                write_rows(&path, &["ebn0_db", "t", "k", "k_approx"], approx_grid(|t| {
                    vec![k_func(t), k_approx(t)]
                }))?;
                Ok(vec![path])
            }
            RecipeKind::VarianceApprox => {
                let path = file("");
                let rows = approx_grid(|t| {
                    let (ja, ka) = (j_approx(t), k_approx(t));
                    let approx = (1.0 - (ja - 1.0).powi(2) - ka).max(0.0);
                    let quantized = AwgnChannel::new(2.0 / t)
                        .and_then(|ch| quantize_awgn(&ch, RECIPE_ALPHABET))
                        .map(|w| w.variance())
                        .unwrap_or(f64::NAN);
                    vec![metric_variance_awgn(t), approx, quantized]
                });
                write_rows(&path, &["ebn0_db", "t", "variance", "variance_approx", "variance_quantized"], rows)?;
                Ok(vec![path])
            }
            RecipeKind::BitChannels { channel, point, n } => {
                let stats = match channel {
                    ChannelKind::Bec => bec_stats(*point, *n),
                    _ => {
                        let ch = AwgnChannel::from_ebn0(*point, 0.5)?;
                        bit_channel_stats(&quantize_awgn(&ch, RECIPE_ALPHABET)?, *n, RECIPE_ALPHABET)?
                    }
                };
                let path = file("");
                write_sorted_stats(&stats, &path)?;
                Ok(vec![path])
            }
            RecipeKind::Tree { code, ebn0 } => {
                let spec = code.build()?;
                let stats = awgn_tree(*ebn0, spec.rate(), spec.n())?;
                let path = file("");
                expected_metric_tree(&spec, &stats)?.write_csv(&path)?;
                Ok(vec![path])
            }
            RecipeKind::Profile { code, ebn0 } => {
                let spec = code.build()?;
                let stats = awgn_tree(*ebn0, spec.rate(), spec.n())?;
                let expected = cumulative_metric_profile(&expected_metric_tree(&spec, &stats)?);
                let channel = Channel::Awgn(AwgnChannel::from_ebn0(*ebn0, spec.rate())?);
                let options = SampleOptions {
                    trials: run.trials,
                    seed: run.seed,
                    mode: Mode::Fscl,
                    arithmetic: Arithmetic::Exact,
                };
                let sample = sample_metric_profile(&spec, &channel, &options)?;
                let path = file("");
                write_profile_csv(&expected, &sample, &path)?;
                Ok(vec![path])
            }
            RecipeKind::Sweep { .. } => {
                let mut written = Vec::new();
                for (label, config) in self.sweep_configs(run) {
                    let report = Simulation::new(config)?.run_sweep()?;
                    let path = file(&format!("_{label}"));
                    emit_csv(&report, &path)?;
                    written.push(path);
                }
                Ok(written)
            }
        }
    }
}

/// Statistics tree of the quantized AWGN channel at `ebn0` dB.
pub fn awgn_tree(ebn0: f64, rate: f64, n: usize) -> Result<StatsTree> {
    let ch = AwgnChannel::from_ebn0(ebn0, rate)?;
    StatsTree::from_channel(&quantize_awgn(&ch, RECIPE_ALPHABET)?, n, RECIPE_ALPHABET)
}

fn approx_grid(f: impl Fn(f64) -> Vec<f64>) -> Vec<Vec<f64>> {
    grid("-2:0.5:12")
        .into_iter()
        .map(|db| {
            let t = AwgnChannel::from_ebn0(db, 0.5).expect("valid grid").t();
            let mut row = vec![db, t];
            row.extend(f(t));
            row
        })
        .collect()
}

fn write_rows(path: &Path, header: &[&str], rows: Vec<Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    w.write_record(header).map_err(|e| Error::csv(path, e))?;
    for row in rows {
        w.write_record(row.iter().map(|&x| fmt_sig(x))).map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes `rank,index,capacity,variance` with channels sorted by capacity.
fn write_sorted_stats(stats: &[BitChannelStats], path: &Path) -> Result<()> {
    let mut sorted = stats.to_vec();
    sorted.sort_by(|a, b| a.capacity.total_cmp(&b.capacity).then(a.index.cmp(&b.index)));
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    w.write_record(["rank", "index", "capacity", "variance"]).map_err(|e| Error::csv(path, e))?;
    for (rank, s) in sorted.iter().enumerate() {
        w.write_record([
            (rank + 1).to_string(),
            s.index.to_string(),
            fmt_sig(s.capacity),
            fmt_sig(s.variance),
        ])
        .map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
