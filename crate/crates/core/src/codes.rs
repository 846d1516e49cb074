//! Polar transform, convolutional pre-transform, rate profiles and encoding
//! of polar and PAC codes.
//!
//! Indices are 0-based in the API and 1-based in profile files.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::AwgnChannel;
use crate::error::{Error, Result};
use crate::polarize::ga_construct;

/// In-place `x = u F^{(x)n}` with `F = [[1, 0], [1, 1]]`.
pub fn polar_transform_in_place(bits: &mut [u8]) {
    let n = bits.len();
    let mut half = 1;
    while half < n {
        for block in bits.chunks_mut(2 * half) {
            let (left, right) = block.split_at_mut(half);
            for (l, r) in left.iter_mut().zip(right.iter()) {
                *l ^= *r;
            }
        }
        half *= 2;
    }
}

/// `x = u F^{(x)n}`; the length must be a power of two.
pub fn polar_transform(u: &[u8]) -> Result<Vec<u8>> {
    if !u.len().is_power_of_two() {
        return Err(Error::NotPowerOfTwo(u.len()));
    }
    let mut x = u.to_vec();
    polar_transform_in_place(&mut x);
    Ok(x)
}

/// Connection polynomial `p_0 + p_1 D + ... + p_m D^m` of the convolutional
/// pre-transform, with `p_0 = p_m = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<u8>,
}

impl Polynomial {
    /// Builds a polynomial from coefficients `p_0..p_m`.
    pub fn new(coeffs: Vec<u8>) -> Result<Self> {
        if coeffs.is_empty() || coeffs[0] != 1 || *coeffs.last().unwrap() != 1 {
            return Err(Error::InvalidParameter(
                "connection polynomial needs unit constant and leading coefficients".into(),
            ));
        }
        if coeffs.iter().any(|&c| c > 1) {
            return Err(Error::InvalidParameter("polynomial coefficients must be bits".into()));
        }
        Ok(Self { coeffs })
    }

    /// The identity pre-transform, which turns a PAC code into a polar code.
    pub fn identity() -> Self {
        Self { coeffs: vec![1] }
    }

    /// `x^10 + x^9 + x^7 + x^3 + 1`.
    pub fn default_pac() -> Self {
        Self::from_mask(0b110_1000_1001)
    }

    /// Polynomial whose bit `k` of `mask` holds `p_k`.
    pub fn from_mask(mask: u64) -> Self {
        assert!(mask & 1 == 1, "constant coefficient must be 1");
        let degree = 63 - mask.leading_zeros() as usize;
        let coeffs = (0..=degree).map(|k| ((mask >> k) & 1) as u8).collect();
        Self { coeffs }
    }

    /// Coefficients `p_0..p_m`.
    pub fn coeffs(&self) -> &[u8] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_identity(&self) -> bool {
        self.coeffs.len() == 1
    }

    /// Bit mask with `p_k` at bit `k`.
    pub fn mask(&self) -> u64 {
        self.coeffs
            .iter()
            .enumerate()
            .fold(0, |acc, (k, &c)| acc | (u64::from(c) << k))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = (0..self.coeffs.len())
            .rev()
            .filter(|&k| self.coeffs[k] == 1)
            .map(|k| match k {
                0 => "1".to_string(),
                1 => "x".to_string(),
                _ => format!("x^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join("+"))
    }
}

impl FromStr for Polynomial {
    type Err = Error;

    /// Accepts `x^10+x^9+x^7+x^3+1`, a binary coefficient string written from
    /// the highest degree down (`11010001001`, optional `0b` prefix), or
    /// `default`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("default") || s.eq_ignore_ascii_case("pac") {
            return Ok(Self::default_pac());
        }
        let bad = || Error::InvalidParameter(format!("cannot parse polynomial `{s}`"));
        let digits = s.strip_prefix("0b").unwrap_or(s);
        if !digits.is_empty() && digits.chars().all(|c| c == '0' || c == '1') {
            let coeffs = digits.bytes().rev().map(|b| b - b'0').collect();
            return Self::new(coeffs);
        }
        let mut mask = 0u64;
        for term in s.split('+') {
            let term = term.trim();
            let k = match term {
                "1" => 0,
                "x" | "D" => 1,
                _ => term
                    .strip_prefix("x^")
                    .or_else(|| term.strip_prefix("D^"))
                    .and_then(|e| e.parse::<u32>().ok())
                    .filter(|&e| e < 64)
                    .ok_or_else(bad)?,
            };
            mask |= 1 << k;
        }
        if mask & 1 == 0 {
            return Err(bad());
        }
        Ok(Self::from_mask(mask))
    }
}

/// `u_j = sum_k p_k v_{j-k}` over GF(2).
pub fn toeplitz_encode(v: &[u8], poly: &Polynomial) -> Vec<u8> {
    let p = poly.coeffs();
    (0..v.len())
        .map(|j| {
            p.iter()
                .enumerate()
                .take(j + 1)
                .fold(0, |acc, (k, &c)| acc ^ (c & v[j - k]))
        })
        .collect()
}

/// Inverse of [`toeplitz_encode`] by back-substitution.
pub fn toeplitz_invert(u: &[u8], poly: &Polynomial) -> Vec<u8> {
    let p = poly.coeffs();
    let mut v = vec![0u8; u.len()];
    for j in 0..u.len() {
        let mut bit = u[j];
        for k in 1..p.len().min(j + 1) {
            bit ^= p[k] & v[j - k];
        }
        v[j] = bit;
    }
    v
}

/// Set of information positions of a length-`2^n` code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RateProfile {
    len: usize,
    info: Vec<usize>,
    mask: Vec<bool>,
}

impl RateProfile {
    /// Builds a profile from 0-based information positions.
    pub fn new(len: usize, mut info: Vec<usize>) -> Result<Self> {
        if !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        info.sort_unstable();
        let mut mask = vec![false; len];
        for &i in &info {
            if i >= len {
                return Err(Error::Profile(format!("index {} out of range 1..={len}", i + 1)));
            }
            if mask[i] {
                return Err(Error::Profile(format!("duplicate index {}", i + 1)));
            }
            mask[i] = true;
        }
        if info.is_empty() {
            return Err(Error::Profile("profile must contain at least one index".into()));
        }
        Ok(Self { len, info, mask })
    }

    /// Block length `N`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.info.is_empty()
    }

    /// Number of information bits `K`.
    pub fn k(&self) -> usize {
        self.info.len()
    }

    /// Sorted 0-based information positions.
    pub fn info_positions(&self) -> &[usize] {
        &self.info
    }

    /// `mask[i]` is true when position `i` carries data.
    pub fn info_mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn is_info(&self, i: usize) -> bool {
        self.mask[i]
    }

    /// Parses the text format: a line `N K`, then `K` ascending 1-based indices.
    pub fn parse(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let mut next_number = |what: &str| -> Result<usize> {
            let tok = tokens
                .next()
                .ok_or_else(|| Error::Profile(format!("missing {what}")))?;
            tok.parse()
                .map_err(|_| Error::Profile(format!("invalid {what} `{tok}`")))
        };
        let len = next_number("block length")?;
        let k = next_number("dimension")?;
        if k == 0 || k > len {
            return Err(Error::Profile(format!("dimension {k} incompatible with length {len}")));
        }
        let mut info = Vec::with_capacity(k);
        let mut last = 0;
        for _ in 0..k {
            let idx = next_number("index")?;
            if idx == 0 || idx > len {
                return Err(Error::Profile(format!("index {idx} out of range 1..={len}")));
            }
            if idx == last {
                return Err(Error::Profile(format!("duplicate index {idx}")));
            }
            if idx < last {
                return Err(Error::Profile(format!("indices not ascending at {idx}")));
            }
            last = idx;
            info.push(idx - 1);
        }
        if tokens.next().is_some() {
            return Err(Error::Profile(format!("more than {k} indices")));
        }
        Self::new(len, info)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.len, self.k());
        for &i in &self.info {
            s.push_str(&format!("{}\n", i + 1));
        }
        s
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

/// Weight of row `i` (0-based) of `F^{(x)n}`.
pub fn row_weight(i: usize) -> usize {
    1 << i.count_ones()
}

/// Reed-Muller style profile: the `k` rows of largest weight, preferring
/// higher indices within a weight class.
pub fn rm_profile(n: usize, k: usize) -> Result<RateProfile> {
    let len = 1usize << n;
    check_dimension(len, k)?;
    let mut idx: Vec<usize> = (0..len).collect();
    idx.sort_by(|&a, &b| row_weight(b).cmp(&row_weight(a)).then(b.cmp(&a)));
    idx.truncate(k);
    RateProfile::new(len, idx)
}

/// The `k` most reliable positions under the Gaussian approximation at the
/// construction channel `ch`.
pub fn ga_profile(n: usize, k: usize, ch: &AwgnChannel) -> Result<RateProfile> {
    let len = 1usize << n;
    check_dimension(len, k)?;
    let mut order = ga_construct(ch, n).reliability_order();
    order.truncate(k);
    RateProfile::new(len, order)
}

fn check_dimension(len: usize, k: usize) -> Result<()> {
    if k == 0 || k > len {
        return Err(Error::InvalidParameter(format!(
            "dimension {k} must lie in 1..={len}"
        )));
    }
    Ok(())
}

/// A polar or PAC code: rate profile plus connection polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeSpec {
    profile: RateProfile,
    poly: Polynomial,
}

/// All intermediate words of one encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoded {
    /// Carrier `v`: data at information positions, zero elsewhere.
    pub carrier: Vec<u8>,
    /// Pre-transformed word `u = v T`.
    pub precoded: Vec<u8>,
    /// Codeword `x = u F`.
    pub codeword: Vec<u8>,
}

impl CodeSpec {
    pub fn new(profile: RateProfile, poly: Polynomial) -> Self {
        Self { profile, poly }
    }

    pub fn polar(profile: RateProfile) -> Self {
        Self::new(profile, Polynomial::identity())
    }

    pub fn pac(profile: RateProfile) -> Self {
        Self::new(profile, Polynomial::default_pac())
    }

    pub fn n(&self) -> usize {
        self.profile.len().trailing_zeros() as usize
    }

    /// Block length `N`.
    pub fn len(&self) -> usize {
        self.profile.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of data bits `K`.
    pub fn k(&self) -> usize {
        self.profile.k()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.len() as f64
    }

    pub fn profile(&self) -> &RateProfile {
        &self.profile
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn is_pac(&self) -> bool {
        !self.poly.is_identity()
    }

    /// Places `data` on the information positions of a zero carrier.
    pub fn insert(&self, data: &[u8]) -> Result<Vec<u8>> {
        if data.len() != self.k() {
            return Err(Error::LengthMismatch { expected: self.k(), actual: data.len() });
        }
        let mut v = vec![0u8; self.len()];
        for (&pos, &bit) in self.profile.info_positions().iter().zip(data) {
            v[pos] = bit;
        }
        Ok(v)
    }

    /// Reads the data bits off a carrier.
    pub fn extract(&self, carrier: &[u8]) -> Result<Vec<u8>> {
        if carrier.len() != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), actual: carrier.len() });
        }
        Ok(self.profile.info_positions().iter().map(|&p| carrier[p]).collect())
    }

    pub fn encode_full(&self, data: &[u8]) -> Result<Encoded> {
        let carrier = self.insert(data)?;
        let precoded = toeplitz_encode(&carrier, &self.poly);
        let mut codeword = precoded.clone();
        polar_transform_in_place(&mut codeword);
        Ok(Encoded { carrier, precoded, codeword })
    }

    /// Codeword `x = (v T) F` of `data`.
    pub fn encode(&self, data: &[u8]) -> Result<Vec<u8>> {
        Ok(self.encode_full(data)?.codeword)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Dense `F^{(x)n}` by explicit Kronecker products.
    fn dense_kernel(len: usize) -> Vec<Vec<u8>> {
        let mut g = vec![vec![1u8]];
        while g.len() < len {
            let m = g.len();
            let mut next = vec![vec![0u8; 2 * m]; 2 * m];
            for r in 0..m {
                for c in 0..m {
                    next[r][c] = g[r][c];
                    next[r + m][c] = g[r][c];
                    next[r + m][c + m] = g[r][c];
                }
            }
            g = next;
        }
        g
    }

    /// Dense upper-triangular Toeplitz matrix with first row `p_0..p_m`.
    fn dense_toeplitz(len: usize, poly: &Polynomial) -> Vec<Vec<u8>> {
        let p = poly.coeffs();
        let mut t = vec![vec![0u8; len]; len];
        for (r, row) in t.iter_mut().enumerate() {
            for (k, &c) in p.iter().enumerate() {
                if r + k < len {
                    row[r + k] = c;
                }
            }
        }
        t
    }

    fn vec_mat(v: &[u8], m: &[Vec<u8>]) -> Vec<u8> {
        let mut out = vec![0u8; m[0].len()];
        for (r, &bit) in v.iter().enumerate() {
            if bit == 1 {
                for (o, &e) in out.iter_mut().zip(&m[r]) {
                    *o ^= e;
                }
            }
        }
        out
    }

    #[test]
    fn polar_transform_examples() {
        assert_eq!(polar_transform(&[0; 8]).unwrap(), vec![0; 8]);
        let u = [0, 1, 0, 1];
        assert_eq!(polar_transform(&u).unwrap(), vec_mat(&u, &dense_kernel(4)));
        assert_eq!(polar_transform(&u).unwrap(), vec![0, 0, 1, 1]);
        assert!(matches!(polar_transform(&[0; 6]), Err(Error::NotPowerOfTwo(6))));
    }

    #[test]
    fn polynomial_forms() {
        let p = Polynomial::default_pac();
        assert_eq!(p.coeffs(), &[1, 0, 0, 1, 0, 0, 0, 1, 0, 1, 1]);
        assert_eq!(p.mask(), 0b11010001001);
        assert_eq!(p.to_string(), "x^10+x^9+x^7+x^3+1");
        assert_eq!("x^10+x^9+x^7+x^3+1".parse::<Polynomial>().unwrap(), p);
        assert_eq!("11010001001".parse::<Polynomial>().unwrap(), p);
        assert_eq!("1".parse::<Polynomial>().unwrap(), Polynomial::identity());
        assert!("x^3+x".parse::<Polynomial>().is_err());
        assert!(Polynomial::new(vec![1, 1, 0]).is_err());
    }

    #[test]
    fn toeplitz_matches_dense_matrix() {
        let p = Polynomial::default_pac();
        let t = dense_toeplitz(64, &p);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let v: Vec<u8> = (0..64).map(|_| rng.random_range(0..2)).collect();
            let u = toeplitz_encode(&v, &p);
            assert_eq!(u, vec_mat(&v, &t));
            assert_eq!(u[0], v[0]);
            assert_eq!(toeplitz_invert(&u, &p), v);
        }
        let v = vec![1, 0, 1, 1];
        assert_eq!(toeplitz_encode(&v, &Polynomial::identity()), v);
    }

    #[test]
    fn small_pac_code_matches_dense_generator() {
        let poly: Polynomial = "x^3+x+1".parse().unwrap();
        let spec = CodeSpec::new(rm_profile(3, 4).unwrap(), poly.clone());
        let g: Vec<Vec<u8>> = {
            let t = dense_toeplitz(8, &poly);
            let f = dense_kernel(8);
            t.iter().map(|row| vec_mat(row, &f)).collect()
        };
        for d in 0..16u8 {
            let data: Vec<u8> = (0..4).map(|b| (d >> b) & 1).collect();
            let v = spec.insert(&data).unwrap();
            assert_eq!(spec.encode(&data).unwrap(), vec_mat(&v, &g));
        }
    }

    #[test]
    fn rm_profiles() {
        let p = rm_profile(3, 4).unwrap();
        assert_eq!(p.info_positions(), &[3, 5, 6, 7]);
        assert_eq!(rm_profile(3, 8).unwrap().k(), 8);
        let p = rm_profile(7, 64).unwrap();
        assert!(p.info_positions().iter().all(|&i| i.count_ones() >= 4));
        let p = rm_profile(7, 99).unwrap();
        assert!(p.info_positions().iter().all(|&i| i.count_ones() >= 3));
        assert!(rm_profile(3, 0).is_err());
    }

    #[test]
    fn ga_profile_is_deterministic() {
        let ch = AwgnChannel::from_ebn0(2.5, 0.5).unwrap();
        let a = ga_profile(10, 512, &ch).unwrap();
        assert_eq!(a, ga_profile(10, 512, &ch).unwrap());
        assert_eq!(a.k(), 512);
        assert!(a.is_info(1023));
        assert!(!a.is_info(0));
        assert_eq!(ga_profile(4, 16, &ch).unwrap().k(), 16);
    }

    #[test]
    fn profile_text_format() {
        let p = rm_profile(4, 5).unwrap();
        assert_eq!(RateProfile::parse(&p.to_text()).unwrap(), p);
        assert!(matches!(RateProfile::parse("8 2\n3\n3\n"), Err(Error::Profile(_))));
        assert!(matches!(RateProfile::parse("8 2\n3\n9\n"), Err(Error::Profile(_))));
        assert!(matches!(RateProfile::parse("8 2\n3\n"), Err(Error::Profile(_))));
        assert!(matches!(RateProfile::parse("8 x\n"), Err(Error::Profile(_))));
        assert!(matches!(RateProfile::parse("6 1\n3\n"), Err(Error::NotPowerOfTwo(6))));
    }

    #[test]
    fn insert_extract_and_lengths() {
        let spec = CodeSpec::pac(rm_profile(6, 32).unwrap());
        assert_eq!(spec.encode(&[0; 32]).unwrap(), vec![0; 64]);
        assert!(matches!(spec.insert(&[0; 31]), Err(Error::LengthMismatch { .. })));
        assert!(matches!(spec.extract(&[0; 8]), Err(Error::LengthMismatch { .. })));
    }

    proptest! {
        #[test]
        fn polar_transform_involution(bits in prop::collection::vec(0u8..2, 64)) {
            let x = polar_transform(&bits).unwrap();
            prop_assert_eq!(polar_transform(&x).unwrap(), bits);
        }

        #[test]
        fn encoding_linear_and_invertible(a in prop::collection::vec(0u8..2, 32), b in prop::collection::vec(0u8..2, 32)) {
            let spec = CodeSpec::pac(rm_profile(6, 32).unwrap());
            let sum: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
            let xa = spec.encode(&a).unwrap();
            let xb = spec.encode(&b).unwrap();
            let xs: Vec<u8> = xa.iter().zip(&xb).map(|(x, y)| x ^ y).collect();
            prop_assert_eq!(spec.encode(&sum).unwrap(), xs);
            let enc = spec.encode_full(&a).unwrap();
            prop_assert_eq!(spec.extract(&enc.carrier).unwrap(), a);
            for (i, &bit) in enc.carrier.iter().enumerate() {
                if !spec.profile().is_info(i) {
                    prop_assert_eq!(bit, 0);
                }
            }
        }
    }
}
