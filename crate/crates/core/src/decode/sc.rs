//! A direct recursive successive-cancellation decoder, kept independent of
//! the list engine so the two can be checked against each other.

use crate::codes::CodeSpec;
use crate::error::{Error, Result};

use super::kernels::{check_exact, hard_decision, variable, LLR_CLAMP};

struct State<'a> {
    info: &'a [bool],
    taps: &'a [u8],
    v: Vec<u8>,
    pos: usize,
}

impl State<'_> {
    fn feedback(&self) -> u8 {
        (1..self.taps.len())
            .filter(|&k| k <= self.pos)
            .fold(0, |acc, k| acc ^ (self.taps[k] & self.v[self.pos - k]))
    }

    /// Decodes the bits under `llrs` and returns their re-encoded codeword.
    fn descend(&mut self, llrs: &[f64]) -> Vec<u8> {
        if llrs.len() == 1 {
            let conv = self.feedback();
            let u = if self.info[self.pos] { hard_decision(llrs[0]) } else { conv };
            self.v.push(u ^ conv);
            self.pos += 1;
            return vec![u];
        }
        let half = llrs.len() / 2;
        let (a, b) = llrs.split_at(half);
        let left_llrs: Vec<f64> = a.iter().zip(b).map(|(&x, &y)| check_exact(x, y)).collect();
        let left = self.descend(&left_llrs);
        let right_llrs: Vec<f64> =
            a.iter().zip(b).zip(&left).map(|((&x, &y), &s)| variable(x, y, s)).collect();
        let right = self.descend(&right_llrs);
        left.iter().zip(&right).map(|(l, r)| l ^ r).chain(right.iter().copied()).collect()
    }
}

/// Plain recursive SC decoding with exact LLR updates, returning the data
/// bits.
pub fn sc_decode_reference(spec: &CodeSpec, llrs: &[f64]) -> Result<Vec<u8>> {
    if llrs.len() != spec.len() {
        return Err(Error::LengthMismatch { expected: spec.len(), actual: llrs.len() });
    }
    let mut state = State {
        info: spec.profile().info_mask(),
        taps: spec.poly().coeffs(),
        v: Vec::with_capacity(spec.len()),
        pos: 0,
    };
    let clamped: Vec<f64> = llrs.iter().map(|l| l.clamp(-LLR_CLAMP, LLR_CLAMP)).collect();
    state.descend(&clamped);
    spec.extract(&state.v)
}
