//! Sparse affine hashes `h(x) = A x + b` over GF(2).
//!
//! Rows of `A` are packed into `u64` words, variable `j` living in bit
//! `j % 64` of word `j / 64`. Row dot products are word-wise AND followed by
//! popcount parity.
//!
//! Sampling uses [`ChaCha8Rng`] seeded with `seed_from_u64(seed)`. The stream
//! is consumed row-major over `A` (one `f64` uniform per entry, entry set iff
//! `u < f`) followed by one `bool` per entry of `b`.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::comb::LogNum;
use crate::error::{Error, Result};

/// Largest `m n + m` accepted by [`exact_survival_probability`].
pub const EXACT_ENUMERATION_LIMIT: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HashParams {
    pub n: usize,
    pub m: usize,
    pub f: f64,
    pub seed: u64,
}

impl HashParams {
    pub fn new(n: usize, m: usize, f: f64, seed: u64) -> Result<Self> {
        let p = HashParams { n, m, f, seed };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=0.5).contains(&self.f) {
            return Err(Error::param(format!(
                "density f = {} outside [0, 1/2]",
                self.f
            )));
        }
        if self.n == 0 || self.m == 0 {
            return Err(Error::param("hash needs n >= 1 and m >= 1"));
        }
        if self.m > self.n {
            return Err(Error::param(format!(
                "m = {} exceeds n = {}",
                self.m, self.n
            )));
        }
        Ok(())
    }
}

fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

/// A point of `{0,1}^n`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    n: usize,
    words: Vec<u64>,
}

impl Assignment {
    pub fn zeros(n: usize) -> Self {
        Assignment {
            n,
            words: vec![0; words_for(n)],
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut a = Self::zeros(bits.len());
        for (j, &b) in bits.iter().enumerate() {
            a.set(j, b);
        }
        a
    }

    /// Low `n` bits of `value`, variable `j` taken from bit `j`.
    pub fn from_u64(n: usize, value: u64) -> Self {
        assert!(n <= 64);
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        Assignment {
            n,
            words: if n == 0 { vec![] } else { vec![value & mask] },
        }
    }

    /// Parses a `0`/`1` string; character `j` is variable `j`.
    pub fn parse_bits(s: &str) -> Option<Self> {
        let bits: Option<Vec<bool>> = s
            .chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect();
        bits.map(|b| Self::from_bits(&b))
    }

    pub fn width(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, j: usize) -> bool {
        (self.words[j / 64] >> (j % 64)) & 1 == 1
    }

    pub fn set(&mut self, j: usize, value: bool) {
        let w = &mut self.words[j / 64];
        if value {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.n).map(|j| self.get(j))
    }

    pub fn to_bit_string(&self) -> String {
        self.bits().map(|b| if b { '1' } else { '0' }).collect()
    }
}

impl fmt::Debug for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Assignment({})", self.to_bit_string())
    }
}

#[inline]
fn dot_parity(row: &[u64], x: &[u64]) -> bool {
    row.iter()
        .zip(x)
        .map(|(a, b)| (a & b).count_ones())
        .sum::<u32>()
        & 1
        == 1
}

/// One sampled hash `h_{A,b}`.
#[derive(Clone, PartialEq)]
pub struct ParityHash {
    n: usize,
    m: usize,
    f: Option<f64>,
    seed: u64,
    row_words: usize,
    a: Vec<u64>,
    b: Vec<bool>,
}

impl ParityHash {
    /// The hash with no constraints; every point lands in the zero cell.
    pub fn trivial(n: usize) -> Self {
        ParityHash {
            n,
            m: 0,
            f: None,
            seed: 0,
            row_words: words_for(n),
            a: vec![],
            b: vec![],
        }
    }

    /// Builds a hash from explicit rows; row `i` lists the coefficients of constraint `i`.
    pub fn from_rows(rows: &[Vec<bool>], b: &[bool]) -> Result<Self> {
        if rows.len() != b.len() {
            return Err(Error::Dimension {
                expected: rows.len(),
                actual: b.len(),
            });
        }
        let n = rows.first().map_or(0, |r| r.len());
        let row_words = words_for(n);
        let mut a = vec![0u64; rows.len() * row_words];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    actual: row.len(),
                });
            }
            for (j, &bit) in row.iter().enumerate() {
                if bit {
                    a[i * row_words + j / 64] |= 1 << (j % 64);
                }
            }
        }
        Ok(ParityHash {
            n,
            m: rows.len(),
            f: None,
            seed: 0,
            row_words,
            a,
            b: b.to_vec(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Density the hash was sampled with; `None` for hand-built hashes.
    pub fn density(&self) -> Option<f64> {
        self.f
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.a[i * self.row_words..(i + 1) * self.row_words]
    }

    pub fn coeff(&self, i: usize, j: usize) -> bool {
        (self.row(i)[j / 64] >> (j % 64)) & 1 == 1
    }

    pub fn rhs(&self, i: usize) -> bool {
        self.b[i]
    }

    /// Variables (0-based) with a nonzero coefficient in row `i`.
    pub fn support(&self, i: usize) -> Vec<usize> {
        let row = self.row(i);
        let mut out = Vec::new();
        for (w, &word) in row.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let t = bits.trailing_zeros() as usize;
                out.push(w * 64 + t);
                bits &= bits - 1;
            }
        }
        out
    }

    /// Number of nonzero entries of `A`.
    pub fn weight(&self) -> usize {
        self.a.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn apply(&self, x: &Assignment) -> Result<Vec<bool>> {
        self.check_width(x)?;
        Ok((0..self.m)
            .map(|i| dot_parity(self.row(i), x.words()) ^ self.b[i])
            .collect())
    }

    /// `h(x) = 0`, stopping at the first violated row.
    pub fn maps_to_zero(&self, x: &Assignment) -> Result<bool> {
        self.check_width(x)?;
        Ok(self.maps_words_to_zero(x.words()))
    }

    pub(crate) fn maps_words_to_zero(&self, words: &[u64]) -> bool {
        (0..self.m).all(|i| dot_parity(self.row(i), words) == self.b[i])
    }

    fn check_width(&self, x: &Assignment) -> Result<()> {
        if x.width() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                actual: x.width(),
            });
        }
        Ok(())
    }
}

impl fmt::Debug for ParityHash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "ParityHash(n={}, m={}, f={:?}, seed={})",
            self.n, self.m, self.f, self.seed
        )?;
        for i in 0..self.m {
            let row: String = (0..self.n)
                .map(|j| if self.coeff(i, j) { '1' } else { '0' })
                .collect();
            writeln!(f, "  {row} | {}", self.b[i] as u8)?;
        }
        Ok(())
    }
}

/// Draws `h` from `H^f_{m x n}`; a pure function of `params`.
pub fn sample_hash(params: &HashParams) -> Result<ParityHash> {
    params.validate()?;
    let HashParams { n, m, f, seed } = *params;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let row_words = words_for(n);
    let mut a = vec![0u64; m * row_words];
    for i in 0..m {
        for j in 0..n {
            let u: f64 = rng.gen();
            if u < f {
                a[i * row_words + j / 64] |= 1 << (j % 64);
            }
        }
    }
    let b = (0..m).map(|_| rng.gen::<bool>()).collect();
    Ok(ParityHash {
        n,
        m,
        f: Some(f),
        seed,
        row_words,
        a,
        b,
    })
}

pub fn apply_hash(h: &ParityHash, x: &Assignment) -> Result<Vec<bool>> {
    h.apply(x)
}

/// `|S ∩ h^{-1}(0)|`.
pub fn count_survivors(h: &ParityHash, s: &[Assignment]) -> Result<usize> {
    let mut count = 0;
    for x in s {
        if h.maps_to_zero(x)? {
            count += 1;
        }
    }
    Ok(count)
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `index` under master seed `master`: `master ^ mix64(index)`.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    master ^ mix64(index)
}

/// Independent master seed for one named stream (e.g. one value of `m`).
pub fn stream_seed(master: u64, stream: u64) -> u64 {
    mix64(master ^ mix64(stream.wrapping_add(0x5EED)))
}

/// A density `f = num / 2^log2_den` with a short numerator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicDensity {
    pub num: u64,
    pub log2_den: u32,
}

impl DyadicDensity {
    /// Accepts `f` in `[0, 1/2]` whose reduced numerator has at most 20 bits.
    pub fn from_f64(f: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&f) {
            return Err(Error::param(format!("density f = {f} outside [0, 1/2]")));
        }
        if f == 0.0 {
            return Ok(DyadicDensity {
                num: 0,
                log2_den: 0,
            });
        }
        let mut d = 0u32;
        let mut scaled = f;
        while scaled.fract() != 0.0 {
            scaled *= 2.0;
            d += 1;
            if d > 1074 {
                break;
            }
        }
        if scaled >= (1u64 << 20) as f64 {
            return Err(Error::param(format!(
                "density {f} needs more than 20 significand bits for exact weights"
            )));
        }
        Ok(DyadicDensity {
            num: scaled as u64,
            log2_den: d,
        })
    }
}

/// Exact `Pr[S(h) >= 1]` as the rational `numerator / 2^log2_denominator`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactSurvival {
    pub numerator: BigUint,
    pub log2_denominator: u64,
}

impl ExactSurvival {
    pub fn to_lognum(&self) -> LogNum {
        LogNum::from_biguint(&self.numerator) / LogNum::pow2(self.log2_denominator as f64)
    }

    /// Exact test of `2^m Pr[S(h) >= 1] <= bound`.
    pub fn scaled_at_most(&self, m: usize, bound: u64) -> bool {
        let lhs = &self.numerator << m;
        let rhs = BigUint::from(bound) << self.log2_denominator;
        lhs <= rhs
    }
}

/// Exact survival probability by enumerating every matrix `A`.
///
/// `b` is uniform and independent of `A`, so `Pr[S(h) >= 1 | A] = |A S| / 2^m`
/// where `A S` is the image of `S`; matrices are grouped by weight, which
/// makes the per-matrix weight `f^k (1-f)^{mn-k}`.
pub fn exact_survival(s: &[Assignment], m: usize, f: f64) -> Result<ExactSurvival> {
    let dy = DyadicDensity::from_f64(f)?;
    let n = match s.first() {
        Some(x) => x.width(),
        None => {
            return Ok(ExactSurvival {
                numerator: BigUint::zero(),
                log2_denominator: 0,
            })
        }
    };
    if let Some(bad) = s.iter().find(|x| x.width() != n) {
        return Err(Error::Dimension {
            expected: n,
            actual: bad.width(),
        });
    }
    if m * n + m > EXACT_ENUMERATION_LIMIT {
        return Err(Error::Capacity(format!(
            "exact enumeration needs mn + m <= {EXACT_ENUMERATION_LIMIT}, got {}",
            m * n + m
        )));
    }
    let cells = m * n;
    // n <= 23 here, so points fit in one word
    let points: Vec<u64> = s
        .iter()
        .map(|x| x.words().first().copied().unwrap_or(0))
        .collect();
    let mut image_by_weight = vec![0u64; cells + 1];
    let mut seen = vec![0u32; 1 << m];
    let row_mask = (1u64 << n) - 1;
    for (stamp, code) in (0u64..(1u64 << cells)).enumerate() {
        let stamp = stamp as u32 + 1;
        let mut image = 0u64;
        for &x in &points {
            let mut y = 0usize;
            for i in 0..m {
                let row = (code >> (i * n)) & row_mask;
                y |= (((row & x).count_ones() & 1) as usize) << i;
            }
            if seen[y] != stamp {
                seen[y] = stamp;
                image += 1;
            }
        }
        image_by_weight[code.count_ones() as usize] += image;
    }
    // sum_k f^k (1-f)^(cells-k) I_k / 2^m with f = p/2^d
    let p = BigUint::from(dy.num);
    let q = (BigUint::from(1u8) << dy.log2_den) - &p;
    let mut numerator = BigUint::zero();
    for (k, &ik) in image_by_weight.iter().enumerate() {
        if ik == 0 {
            continue;
        }
        numerator += p.pow(k as u32) * q.pow((cells - k) as u32) * ik;
    }
    Ok(ExactSurvival {
        numerator,
        log2_denominator: dy.log2_den as u64 * cells as u64 + m as u64,
    })
}

/// Floating view of [`exact_survival`].
pub fn exact_survival_probability(s: &[Assignment], m: usize, f: f64) -> Result<LogNum> {
    Ok(exact_survival(s, m, f)?.to_lognum())
}

/// `Pr[S(h) >= 1]` as an `f64`, for tests and diagnostics.
pub fn exact_survival_f64(s: &[Assignment], m: usize, f: f64) -> Result<f64> {
    let e = exact_survival(s, m, f)?;
    Ok(e.numerator.to_f64().unwrap_or(f64::INFINITY) / 2f64.powi(e.log2_denominator as i32))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(n: usize) -> Vec<Assignment> {
        (0..1u64 << n).map(|v| Assignment::from_u64(n, v)).collect()
    }

    #[test]
    fn zero_density_gives_zero_matrix() {
        let h = sample_hash(&HashParams::new(40, 7, 0.0, 99).unwrap()).unwrap();
        assert_eq!(h.weight(), 0);
    }

    #[test]
    fn half_density_fill_rate() {
        let h = sample_hash(&HashParams::new(1000, 1000, 0.5, 7).unwrap()).unwrap();
        let frac = h.weight() as f64 / 1e6;
        assert!((frac - 0.5).abs() < 0.01, "{frac}");
    }

    #[test]
    fn sampling_is_deterministic() {
        let p = HashParams::new(130, 9, 0.2, 12345).unwrap();
        assert_eq!(sample_hash(&p).unwrap(), sample_hash(&p).unwrap());
        let q = HashParams { seed: 12346, ..p };
        assert_ne!(sample_hash(&p).unwrap(), sample_hash(&q).unwrap());
    }

    #[test]
    fn invalid_params() {
        assert!(HashParams::new(10, 2, 0.51, 0).is_err());
        assert!(HashParams::new(10, 2, -0.1, 0).is_err());
        assert!(HashParams::new(0, 1, 0.1, 0).is_err());
        assert!(HashParams::new(10, 0, 0.1, 0).is_err());
        assert!(HashParams::new(3, 4, 0.1, 0).is_err());
    }

    #[test]
    fn apply_examples() {
        let zero =
            ParityHash::from_rows(&[vec![false; 5], vec![false; 5]], &[false, false]).unwrap();
        let x = Assignment::parse_bits("10110").unwrap();
        assert_eq!(zero.apply(&x).unwrap(), vec![false, false]);

        let ident: Vec<Vec<bool>> = (0..4).map(|i| (0..4).map(|j| i == j).collect()).collect();
        let h = ParityHash::from_rows(&ident, &[false; 4]).unwrap();
        let x = Assignment::parse_bits("1101").unwrap();
        assert_eq!(h.apply(&x).unwrap(), vec![true, true, false, true]);

        let h = ParityHash::from_rows(&[vec![true, true, false]], &[true]).unwrap();
        assert_eq!(
            h.apply(&Assignment::parse_bits("101").unwrap()).unwrap(),
            vec![false]
        );
        assert!(h.apply(&Assignment::parse_bits("10").unwrap()).is_err());
    }

    #[test]
    fn survivors_examples() {
        let s = cube(3);
        let zero = ParityHash::from_rows(&[vec![false; 3]], &[false]).unwrap();
        assert_eq!(count_survivors(&zero, &s).unwrap(), 8);
        let shifted = ParityHash::from_rows(&[vec![false; 3]], &[true]).unwrap();
        assert_eq!(count_survivors(&shifted, &s).unwrap(), 0);
        for code in 1..8u64 {
            for b in [false, true] {
                let row: Vec<bool> = (0..3).map(|j| (code >> j) & 1 == 1).collect();
                let h = ParityHash::from_rows(&[row], &[b]).unwrap();
                assert_eq!(count_survivors(&h, &s).unwrap(), 4);
            }
        }
    }

    #[test]
    fn support_lists_set_bits() {
        let mut row = vec![false; 130];
        for j in [0, 63, 64, 129] {
            row[j] = true;
        }
        let h = ParityHash::from_rows(&[row], &[false]).unwrap();
        assert_eq!(h.support(0), vec![0, 63, 64, 129]);
    }

    #[test]
    fn exact_survival_examples() {
        assert!(exact_survival_probability(&[], 3, 0.25).unwrap().is_zero());
        let origin = vec![Assignment::zeros(4)];
        for m in 1..=4 {
            for f in [0.0, 0.125, 0.5] {
                let p = exact_survival_probability(&origin, m, f).unwrap();
                assert!((p.log2() + m as f64).abs() < 1e-12);
            }
        }
        // two points at distance 2 under pairwise-independent hashing: 1/2 + 1/2 - 1/4
        let s = vec![
            Assignment::parse_bits("01").unwrap(),
            Assignment::parse_bits("10").unwrap(),
        ];
        let p = exact_survival_f64(&s, 1, 0.5).unwrap();
        assert!((p - 0.75).abs() < 1e-15);
    }

    #[test]
    fn exact_survival_rejects_large_or_inexact() {
        let s = vec![Assignment::zeros(6)];
        assert!(matches!(
            exact_survival(&s, 4, 0.5),
            Err(Error::Capacity(_))
        ));
        assert!(exact_survival(&s, 1, 0.1).is_err());
        assert!(DyadicDensity::from_f64(0.375).is_ok());
    }
}
