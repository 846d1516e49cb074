//! Binary-input channel models, base-2 LLRs and the Gaussian mean/variance
//! functions of the per-symbol metric on the BI-AWGN channel.
//!
//! All LLRs in this crate are base 2: `L = log2(p(y|0) / p(y|1))`, with BPSK
//! mapping bit 0 to +1 and bit 1 to -1.

use std::f64::consts::LN_2;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Base-2 log-likelihood ratio `log2(p(y|0) / p(y|1))`.
///
/// Infinite for unambiguous BEC outputs, exactly zero for an erasure.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
pub struct Llr(pub f64);

impl Llr {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Binary-input AWGN channel with per-dimension noise standard deviation `sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AwgnChannel {
    sigma: f64,
}

impl AwgnChannel {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "noise standard deviation must be positive and finite, got {sigma}"
            )));
        }
        Ok(Self { sigma })
    }

    /// Channel at the given `Eb/N0` (dB) for a code of rate `rate`, with unit
    /// BPSK symbol energy: `sigma^2 = 1 / (2 rate 10^(ebn0/10))`.
    pub fn from_ebn0(ebn0_db: f64, rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "code rate must lie in (0, 1], got {rate}"
            )));
        }
        Self::new(sigma_from_ebn0(ebn0_db, rate))
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `t = 2 / sigma`, the standard deviation of the natural-log LLR.
    pub fn t(&self) -> f64 {
        2.0 / self.sigma
    }
}

/// `sigma = sqrt(1 / (2 rate 10^(ebn0/10)))`.
pub fn sigma_from_ebn0(ebn0_db: f64, rate: f64) -> f64 {
    (1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0))).sqrt()
}

/// Binary erasure channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BecChannel {
    epsilon: f64,
}

impl BecChannel {
    pub fn new(epsilon: f64) -> Result<Self> {
        check_probability("erasure probability", epsilon)?;
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// Binary symmetric channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BscChannel {
    delta: f64,
}

impl BscChannel {
    pub fn new(delta: f64) -> Result<Self> {
        check_probability("crossover probability", delta)?;
        Ok(Self { delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Magnitude of the base-2 LLR of every output, `log2((1 - delta) / delta)`.
    pub fn llr_magnitude(&self) -> f64 {
        ((1.0 - self.delta) / self.delta).log2()
    }
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must lie in [0, 1], got {p}"
        )))
    }
}

/// Base-2 LLR of an AWGN output: `(2 y / sigma^2) / ln 2`.
pub fn awgn_llr(y: f64, ch: &AwgnChannel) -> Result<Llr> {
    if !y.is_finite() {
        return Err(Error::InvalidSample(y));
    }
    Ok(Llr(2.0 * y / (ch.sigma * ch.sigma) / LN_2))
}

/// Any of the supported channels, as used by the simulation harness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Channel {
    Awgn(AwgnChannel),
    Bec(BecChannel),
    Bsc(BscChannel),
}

impl Channel {
    /// Transmits `codeword` and writes the base-2 channel LLRs into `out`.
    pub fn transmit<R: Rng + ?Sized>(&self, codeword: &[u8], rng: &mut R, out: &mut [f64]) {
        debug_assert_eq!(codeword.len(), out.len());
        match self {
            Channel::Awgn(ch) => {
                let scale = 2.0 / (ch.sigma * ch.sigma) / LN_2;
                for (o, &c) in out.iter_mut().zip(codeword) {
                    let x = if c == 0 { 1.0 } else { -1.0 };
                    let noise: f64 = rng.sample(StandardNormal);
                    *o = (x + ch.sigma * noise) * scale;
                }
            }
            Channel::Bec(ch) => {
                for (o, &c) in out.iter_mut().zip(codeword) {
                    *o = if rng.random::<f64>() < ch.epsilon {
                        0.0
                    } else if c == 0 {
                        f64::INFINITY
                    } else {
                        f64::NEG_INFINITY
                    };
                }
            }
            Channel::Bsc(ch) => {
                let mag = ch.llr_magnitude();
                for (o, &c) in out.iter_mut().zip(codeword) {
                    let flipped = rng.random::<f64>() < ch.delta;
                    let bit = c ^ u8::from(flipped);
                    *o = if bit == 0 { mag } else { -mag };
                }
            }
        }
    }

    /// Mutual information and metric variance of one channel use.
    pub fn iv(&self) -> (f64, f64) {
        match self {
            Channel::Awgn(ch) => {
                let t = ch.t();
                (j_func(t), metric_variance_awgn(t))
            }
            Channel::Bec(ch) => channel_iv(&MemorylessChannel::Bec(*ch)),
            Channel::Bsc(ch) => channel_iv(&MemorylessChannel::Bsc(*ch)),
        }
    }
}

/// Channels whose mutual information and metric variance have closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MemorylessChannel {
    Bec(BecChannel),
    Bsc(BscChannel),
}

/// `(I, V)` of a BEC or BSC: mutual information under uniform input and the
/// variance of the per-symbol metric.
pub fn channel_iv(ch: &MemorylessChannel) -> (f64, f64) {
    match ch {
        MemorylessChannel::Bec(c) => {
            let e = c.epsilon;
            (1.0 - e, e * (1.0 - e))
        }
        MemorylessChannel::Bsc(c) => {
            let d = c.delta;
            if d == 0.0 || d == 1.0 {
                return (1.0, 0.0);
            }
            let l = ((1.0 - d) / d).log2();
            (1.0 - binary_entropy(d), d * (1.0 - d) * l * l)
        }
    }
}

/// Binary entropy function in bits.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// `log2(1 + e^(-u))`, evaluated without overflow for any finite `u`.
fn log2_one_plus_exp_neg(u: f64) -> f64 {
    if u >= 0.0 {
        (-u).exp().ln_1p() / LN_2
    } else {
        (-u + u.exp().ln_1p()) / LN_2
    }
}

const QUAD_HALF_WIDTH: f64 = 10.0;
const QUAD_INTERVALS: usize = 4000;

/// `E[g(U)]` for `U ~ N(t^2/2, t^2)` by composite Simpson quadrature over
/// +-10 standard deviations.
fn gaussian_expectation(t: f64, g: impl Fn(f64) -> f64) -> f64 {
    let mean = 0.5 * t * t;
    let h = 2.0 * QUAD_HALF_WIDTH / QUAD_INTERVALS as f64;
    let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    let mut acc = 0.0;
    for k in 0..=QUAD_INTERVALS {
        let z = -QUAD_HALF_WIDTH + k as f64 * h;
        let w = if k == 0 || k == QUAD_INTERVALS {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * g(mean + t * z) * norm * (-0.5 * z * z).exp();
    }
    acc * h / 3.0
}

/// Symmetric capacity of the BI-AWGN channel whose natural-log LLR has
/// standard deviation `t`: `1 - E[log2(1 + e^(-U))]`, `U ~ N(t^2/2, t^2)`.
pub fn j_func(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    (1.0 - gaussian_expectation(t, log2_one_plus_exp_neg)).clamp(0.0, 1.0)
}

/// Second-moment counterpart of [`j_func`]: `1 - E[log2^2(1 + e^(-U))]`.
///
/// As `t -> 0` the LLR collapses to 0 and `log2(1 + 1) = 1`, so the continuous
/// extension gives `k_func(0) = 0`.
pub fn k_func(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let second = gaussian_expectation(t, |u| {
        let v = log2_one_plus_exp_neg(u);
        v * v
    });
    (1.0 - second).min(1.0)
}

/// Closed-form approximation `[1 - 2^(-0.3073 t^(2*0.8935))]^1.1064` of [`j_func`].
pub fn j_approx(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    (1.0 - 2f64.powf(-0.3073 * t.powf(2.0 * 0.8935))).powf(1.1064)
}

/// Closed-form approximation `[1 - 2^(-0.96483 t^(2*0.61746))]^10.232` of [`k_func`].
pub fn k_approx(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    (1.0 - 2f64.powf(-0.96483 * t.powf(2.0 * 0.61746))).powf(10.232)
}

/// Variance of the per-symbol metric on BI-AWGN: `1 - (J - 1)^2 - K`,
/// clamped at 0.
pub fn metric_variance_awgn(t: f64) -> f64 {
    let j = j_func(t);
    let k = k_func(t);
    (1.0 - (j - 1.0) * (j - 1.0) - k).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Independent midpoint-rule integration over the natural-log LLR density,
    /// on a wider window than the library routine.
    fn oracle_moments(t: f64) -> (f64, f64) {
        let mean = 0.5 * t * t;
        let lo = mean - 14.0 * t;
        let hi = mean + 14.0 * t;
        let steps = 200_000;
        let h = (hi - lo) / steps as f64;
        let (mut m1, mut m2) = (0.0, 0.0);
        for k in 0..steps {
            let u = lo + (k as f64 + 0.5) * h;
            let dens = (-(u - mean).powi(2) / (2.0 * t * t)).exp()
                / (t * (2.0 * std::f64::consts::PI).sqrt());
            let v = (1.0 + (-u).exp()).log2();
            m1 += v * dens * h;
            m2 += v * v * dens * h;
        }
        (1.0 - m1, 1.0 - m2)
    }

    #[test]
    fn awgn_llr_examples() {
        let ch = AwgnChannel::new(1.0).unwrap();
        assert_eq!(awgn_llr(0.0, &ch).unwrap().value(), 0.0);
        assert_abs_diff_eq!(awgn_llr(1.0, &ch).unwrap().value(), 2.0 / LN_2, epsilon = 1e-12);
        assert_abs_diff_eq!(awgn_llr(1.0, &ch).unwrap().value(), 2.8854, epsilon = 1e-4);
        let ch = AwgnChannel::new(0.75).unwrap();
        assert_abs_diff_eq!(awgn_llr(-0.5, &ch).unwrap().value(), -2.5648, epsilon = 1e-4);
        assert!(matches!(awgn_llr(f64::NAN, &ch), Err(Error::InvalidSample(_))));
        assert!(matches!(awgn_llr(f64::INFINITY, &ch), Err(Error::InvalidSample(_))));
    }

    #[test]
    fn ebn0_conversion() {
        let ch = AwgnChannel::from_ebn0(2.5, 0.5).unwrap();
        assert_abs_diff_eq!(ch.sigma(), 0.7499, epsilon = 1e-3);
        assert_abs_diff_eq!(ch.t(), 2.0 / ch.sigma(), epsilon = 0.0);
        assert!(AwgnChannel::new(0.0).is_err());
        assert!(AwgnChannel::from_ebn0(1.0, 0.0).is_err());
    }

    #[test]
    fn j_examples() {
        assert_eq!(j_func(0.0), 0.0);
        // Reference values from an independent adaptive quadrature.
        assert_abs_diff_eq!(j_func(2.6667), 0.681658, epsilon = 1e-5);
        assert_abs_diff_eq!(j_func(2.0 / 0.6309089), 0.7944, epsilon = 1e-5);
        assert_abs_diff_eq!(j_func(50.0), 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(k_func(50.0), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn quadrature_matches_independent_oracle() {
        for &t in &[1e-3, 0.3, 1.0, 2.6667, 4.0, 8.0, 15.0] {
            let (j, k) = oracle_moments(t);
            assert_abs_diff_eq!(j_func(t), j, epsilon = 1e-6);
            assert_abs_diff_eq!(k_func(t), k, epsilon = 1e-6);
        }
    }

    #[test]
    fn k_small_t_limit() {
        let (_, k) = oracle_moments(1e-3);
        assert_abs_diff_eq!(k_func(1e-3), k, epsilon = 1e-6);
        assert!(k_func(1e-3) < 1e-3);
    }

    #[test]
    fn approximations_close_on_grid() {
        assert_eq!(j_approx(0.0), 0.0);
        assert_eq!(k_approx(0.0), 0.0);
        assert_abs_diff_eq!(j_approx(200.0), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(k_approx(200.0), 1.0, epsilon = 1e-12);
        for i in 0..100 {
            let t = 0.05 + i as f64 * 0.2;
            assert!((j_approx(t) - j_func(t)).abs() <= 0.01, "J at t={t}");
        }
        // The closed form stays non-negative, while K itself dips below zero
        // at low SNR; agreement holds from 1 dB upwards.
        for i in 0..=110 {
            let ebn0 = 1.0 + i as f64 * 0.1;
            let t = AwgnChannel::from_ebn0(ebn0, 0.5).unwrap().t();
            assert!((k_approx(t) - k_func(t)).abs() <= 0.01, "K at {ebn0} dB");
        }
        let t = AwgnChannel::from_ebn0(-2.0, 0.5).unwrap().t();
        assert_abs_diff_eq!(k_func(t), -0.030507, epsilon = 1e-5);
    }

    #[test]
    fn j_monotone_and_bounded() {
        let mut prev = 0.0;
        for i in 0..100 {
            let t = i as f64 * 0.25;
            let j = j_func(t);
            assert!((0.0..=1.0).contains(&j));
            assert!(j >= prev - 1e-12);
            prev = j;
        }
    }

    #[test]
    fn variance_examples() {
        let t = |db: f64| AwgnChannel::from_ebn0(db, 0.5).unwrap().t();
        assert!(metric_variance_awgn(t(2.5)) > 0.5);
        assert!(metric_variance_awgn(t(10.0)) < 0.05);
        assert_abs_diff_eq!(metric_variance_awgn(60.0), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn closed_form_iv() {
        let iv = |e| channel_iv(&MemorylessChannel::Bec(BecChannel::new(e).unwrap()));
        let (i, v) = iv(0.3);
        assert_abs_diff_eq!(i, 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(v, 0.21, epsilon = 1e-15);
        assert_eq!(iv(0.5), (0.5, 0.25));
        for k in 0..=100 {
            assert!(iv(k as f64 / 100.0).1 <= 0.25);
        }
        let bsc = channel_iv(&MemorylessChannel::Bsc(BscChannel::new(0.0).unwrap()));
        assert_eq!(bsc, (1.0, 0.0));
        let (i, v) = channel_iv(&MemorylessChannel::Bsc(BscChannel::new(0.11).unwrap()));
        assert_abs_diff_eq!(i, 1.0 - binary_entropy(0.11), epsilon = 1e-15);
        let l = (0.89f64 / 0.11).log2();
        assert_abs_diff_eq!(v, 0.11 * 0.89 * l * l, epsilon = 1e-15);
        assert!(BecChannel::new(1.5).is_err());
        assert!(BscChannel::new(-0.1).is_err());
    }

    #[test]
    fn transmit_all_zero_llr_statistics() {
        let ch = AwgnChannel::new(0.75).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cw = vec![0u8; 20_000];
        let mut out = vec![0.0; cw.len()];
        Channel::Awgn(ch).transmit(&cw, &mut rng, &mut out);
        let mean = out.iter().sum::<f64>() / out.len() as f64;
        let expected = 2.0 / (0.75 * 0.75) / LN_2;
        assert!((mean - expected).abs() < 0.05 * expected);

        let mut out = vec![0.0; 8];
        Channel::Bec(BecChannel::new(0.0).unwrap()).transmit(&[0, 1, 0, 1, 1, 0, 0, 1], &mut rng, &mut out);
        assert_eq!(out[0], f64::INFINITY);
        assert_eq!(out[1], f64::NEG_INFINITY);
        Channel::Bec(BecChannel::new(1.0).unwrap()).transmit(&[0; 8], &mut rng, &mut out);
        assert!(out.iter().all(|&l| l == 0.0));
    }
}
