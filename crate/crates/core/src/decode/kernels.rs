//! LLR update rules of successive-cancellation decoding, in base 2.

/// Magnitude cap applied to channel LLRs so that hard (infinite) inputs stay
/// finite through the updates.
pub const LLR_CLAMP: f64 = 1e4;

#[inline]
fn log2_one_plus_pow2_neg(x: f64) -> f64 {
    (-x).exp2().ln_1p() * std::f64::consts::LOG2_E
}

/// Exact check-node update `2 atanh(tanh(a/2) tanh(b/2))` for base-2 LLRs.
#[inline]
pub fn check_exact(a: f64, b: f64) -> f64 {
    let m = a.abs().min(b.abs());
    let s = if (a < 0.0) != (b < 0.0) { -m } else { m };
    s + log2_one_plus_pow2_neg((a + b).abs()) - log2_one_plus_pow2_neg((a - b).abs())
}

/// Min-sum check-node update.
#[inline]
pub fn check_min_sum(a: f64, b: f64) -> f64 {
    let m = a.abs().min(b.abs());
    if (a < 0.0) != (b < 0.0) {
        -m
    } else {
        m
    }
}

/// Variable-node update given the partial-sum bit of the left branch.
#[inline]
pub fn variable(a: f64, b: f64, left_bit: u8) -> f64 {
    if left_bit == 0 {
        b + a
    } else {
        b - a
    }
}

/// Hard decision: bit 1 exactly when the LLR is negative.
#[inline]
pub fn hard_decision(llr: f64) -> u8 {
    u8::from(llr < 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Check-node rule through probabilities: P(a xor b = 0).
    fn check_oracle(a: f64, b: f64) -> f64 {
        let p = |l: f64| 1.0 / (1.0 + 2f64.powf(-l));
        let (pa, pb) = (p(a), p(b));
        let p0 = pa * pb + (1.0 - pa) * (1.0 - pb);
        (p0 / (1.0 - p0)).log2()
    }

    #[test]
    fn check_node_examples() {
        assert_eq!(check_exact(0.0, 5.0), 0.0);
        assert_eq!(check_min_sum(-3.0, 2.0), -2.0);
        assert_abs_diff_eq!(check_exact(LLR_CLAMP, -7.5), -7.5, epsilon = 1e-9);
        assert_abs_diff_eq!(check_exact(2.0, 3.0), check_oracle(2.0, 3.0), epsilon = 1e-12);
        assert_eq!(variable(1.5, 2.0, 0), 3.5);
        assert_eq!(variable(1.5, 2.0, 1), 0.5);
        assert_eq!(hard_decision(0.0), 0);
        assert_eq!(hard_decision(-0.1), 1);
    }

    proptest! {
        #[test]
        fn exact_check_matches_probability_form(a in -20.0f64..20.0, b in -20.0f64..20.0) {
            prop_assert!((check_exact(a, b) - check_oracle(a, b)).abs() < 1e-9);
            prop_assert!(check_exact(a, b).abs() <= a.abs().min(b.abs()) + 1e-12);
        }
    }
}
