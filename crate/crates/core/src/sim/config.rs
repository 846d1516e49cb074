//! Simulation configuration and its TOML file format.
//!
//! ```toml
//! [code]
//! kind = "pac"          # or "polar"
//! length = 128
//! dimension = 64
//! profile = "rm"        # "rm", "ga", "mc" (the bundled (64, 32) profile) or a file path
//! poly = "default"      # connection polynomial, ignored for polar codes
//! design_ebn0 = 2.5     # construction point of the "ga" profile
//!
//! [channel]
//! kind = "awgn"         # "awgn" (points in Eb/N0 dB), "bsc" or "bec" (probabilities)
//! points = [1.0, 2.0, 3.0]
//!
//! [decoder]
//! mode = "pfscl"
//! list = 32
//! mt = -10.0
//! pth = 1e-6
//! threshold_ebn0 = 2.5  # channel used for the varentropy margins
//! arithmetic = "exact"
//!
//! [run]
//! trials = 100000
//! min_errors = 200
//! seed = 1
//! workers = 0           # 0 picks the number of cores
//! ```

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{AwgnChannel, BecChannel, BscChannel, Channel};
use crate::codes::{ga_profile, rm_profile, CodeSpec, Polynomial, RateProfile};
use crate::decode::{Arithmetic, DecoderConfig, Mode};
use crate::error::{Error, Result};
use crate::metric::{vpscl_thresholds, PruneThresholds};
use crate::polarize::{bit_channel_stats, quantize_awgn};

/// Output alphabet size of the construction used for varentropy margins.
pub const THRESHOLD_ALPHABET: usize = 256;

const MC_64_32: &str = include_str!("../../fixtures/pac64_32_mc.txt");

/// The bundled Monte-Carlo rate profile of the length-64, dimension-32 code.
pub fn mc_profile_64_32() -> RateProfile {
    RateProfile::parse(MC_64_32).expect("bundled profile is valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeKind {
    Polar,
    Pac,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Awgn,
    Bsc,
    Bec,
}

impl FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "awgn" => Ok(ChannelKind::Awgn),
            "bsc" => Ok(ChannelKind::Bsc),
            "bec" => Ok(ChannelKind::Bec),
            _ => Err(Error::Config(format!("unknown channel `{s}`"))),
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChannelKind::Awgn => "awgn",
            ChannelKind::Bsc => "bsc",
            ChannelKind::Bec => "bec",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CodeConfig {
    pub kind: CodeKind,
    pub length: usize,
    pub dimension: usize,
    pub profile: String,
    pub poly: String,
    pub design_ebn0: f64,
}

impl Default for CodeConfig {
    fn default() -> Self {
        Self {
            kind: CodeKind::Pac,
            length: 128,
            dimension: 64,
            profile: "rm".into(),
            poly: "default".into(),
            design_ebn0: 2.5,
        }
    }
}

impl CodeConfig {
    /// Parses `pac(128,64)`, `polar(64,32)` or a bare `128,64`.
    pub fn set_code(&mut self, text: &str) -> Result<()> {
        let bad = || Error::Config(format!("cannot parse code `{text}`, expected e.g. pac(128,64)"));
        let t = text.trim().to_ascii_lowercase();
        let (kind, rest) = if let Some(r) = t.strip_prefix("pac") {
            (Some(CodeKind::Pac), r)
        } else if let Some(r) = t.strip_prefix("polar") {
            (Some(CodeKind::Polar), r)
        } else {
            (None, t.as_str())
        };
        let rest = rest.trim().trim_start_matches('(').trim_end_matches(')');
        let (n, k) = rest.split_once(',').ok_or_else(bad)?;
        self.length = n.trim().parse().map_err(|_| bad())?;
        self.dimension = k.trim().parse().map_err(|_| bad())?;
        if let Some(kind) = kind {
            self.kind = kind;
        }
        Ok(())
    }

    pub fn build(&self) -> Result<CodeSpec> {
        let len = self.length;
        if !len.is_power_of_two() || len < 2 {
            return Err(Error::NotPowerOfTwo(len));
        }
        let n = len.trailing_zeros() as usize;
        let k = self.dimension;
        let profile = match self.profile.as_str() {
            "rm" => rm_profile(n, k)?,
            "ga" => {
                let rate = k as f64 / len as f64;
                ga_profile(n, k, &AwgnChannel::from_ebn0(self.design_ebn0, rate)?)?
            }
            "mc" => {
                let p = mc_profile_64_32();
                if (p.len(), p.k()) != (len, k) {
                    return Err(Error::Config(format!(
                        "the bundled profile is for (64,32), not ({len},{k})"
                    )));
                }
                p
            }
            path => RateProfile::load(Path::new(path))?,
        };
        if profile.len() != len || profile.k() != k {
            return Err(Error::Config(format!(
                "profile describes a ({},{}) code, configuration asks for ({len},{k})",
                profile.len(),
                profile.k()
            )));
        }
        let poly = match self.kind {
            CodeKind::Polar => Polynomial::identity(),
            CodeKind::Pac => self.poly.parse()?,
        };
        Ok(CodeSpec::new(profile, poly))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelConfig {
    pub kind: ChannelKind,
    pub points: Vec<f64>,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self { kind: ChannelKind::Awgn, points: vec![2.0] }
    }
}

impl ChannelConfig {
    /// The channel at `point` for a code of rate `rate`.
    pub fn channel(&self, point: f64, rate: f64) -> Result<Channel> {
        Ok(match self.kind {
            ChannelKind::Awgn => Channel::Awgn(AwgnChannel::from_ebn0(point, rate)?),
            ChannelKind::Bsc => Channel::Bsc(BscChannel::new(point)?),
            ChannelKind::Bec => Channel::Bec(BecChannel::new(point)?),
        })
    }
}

/// Parses a comma-separated list of values and `start:step:stop` ranges.
pub fn parse_points(text: &str) -> Result<Vec<f64>> {
    let bad = |s: &str| Error::Config(format!("cannot parse point list entry `{s}`"));
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let fields: Vec<&str> = part.split(':').collect();
        match fields.as_slice() {
            [v] => out.push(v.parse().map_err(|_| bad(part))?),
            [a, s, b] => {
                let (a, s, b): (f64, f64, f64) = (
                    a.parse().map_err(|_| bad(part))?,
                    s.parse().map_err(|_| bad(part))?,
                    b.parse().map_err(|_| bad(part))?,
                );
                if s.is_nan() || s <= 0.0 || b < a {
                    return Err(bad(part));
                }
                let steps = ((b - a) / s + 1e-9).floor() as usize;
                out.extend((0..=steps).map(|i| a + i as f64 * s));
            }
            _ => return Err(bad(part)),
        }
    }
    if out.is_empty() {
        return Err(Error::Config("point list is empty".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecoderSettings {
    pub mode: Mode,
    pub list: usize,
    pub mt: f64,
    pub pth: f64,
    pub threshold_ebn0: f64,
    pub arithmetic: Arithmetic,
}

impl Default for DecoderSettings {
    fn default() -> Self {
        Self {
            mode: Mode::Scl,
            list: 8,
            mt: -10.0,
            pth: 1e-6,
            threshold_ebn0: 2.5,
            arithmetic: Arithmetic::Exact,
        }
    }
}

impl DecoderSettings {
    /// Short label such as `pfscl_L32_mt-10`.
    pub fn label(&self) -> String {
        match self.mode {
            Mode::Sc => "sc".into(),
            Mode::Pfscl => format!("pfscl_L{}_mt{}", self.list, self.mt),
            Mode::Vpscl => format!("vpscl_L{}_pth{:e}", self.list, self.pth),
            m => format!("{m}_L{}", self.list),
        }
    }

    /// Varentropy margins from the quantized construction at
    /// `threshold_ebn0`.
    pub fn thresholds(&self, spec: &CodeSpec) -> Result<PruneThresholds> {
        let ch = AwgnChannel::from_ebn0(self.threshold_ebn0, spec.rate())?;
        let w = quantize_awgn(&ch, THRESHOLD_ALPHABET)?;
        let stats = bit_channel_stats(&w, spec.n(), THRESHOLD_ALPHABET)?;
        vpscl_thresholds(&stats, self.pth)
    }

    pub fn build(&self, spec: &CodeSpec) -> Result<DecoderConfig> {
        let mut config = DecoderConfig::new(self.mode, self.list)
            .with_prune_threshold(self.mt)
            .with_arithmetic(self.arithmetic);
        if self.mode == Mode::Vpscl {
            config = config.with_thresholds(self.thresholds(spec)?);
        }
        config.validate(spec.len())?;
        Ok(config)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub trials: u64,
    pub min_errors: u64,
    pub seed: u64,
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { trials: 100_000, min_errors: 200, seed: 1, workers: 0 }
    }
}

/// Complete description of one simulation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub code: CodeConfig,
    pub channel: ChannelConfig,
    pub decoder: DecoderSettings,
    pub run: RunConfig,
}

impl SimConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.run.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.channel.points.is_empty() {
            return Err(Error::Config("no channel points given".into()));
        }
        Ok(())
    }
}
