//! Exact combinatorics of increasing paths and partitions.
//!
//! An increasing path is an integer-valued nondecreasing function on an
//! integer interval — the trajectory of a geometric random walk bridge once
//! endpoints are pinned. This module provides validation, exact path
//! counting with big integers, the interlacing predicates used to couple
//! neighbouring curves, and an exactly uniform bridge sampler.
//!
//! Path heights are unbounded: no cap is imposed anywhere, values are plain
//! `i64`.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;

use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Extended integers
// ---------------------------------------------------------------------------

/// An integer extended with `-∞` and `+∞`, used for boundary data.
///
/// Infinite boundaries are a dedicated value, never a sentinel integer, so
/// comparisons against ordinary path values are total and unambiguous.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtInt {
    NegInf,
    Finite(i64),
    PosInf,
}

impl ExtInt {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtInt::Finite(_))
    }

    /// The finite value, if any.
    pub fn finite(self) -> Option<i64> {
        match self {
            ExtInt::Finite(v) => Some(v),
            _ => None,
        }
    }
}

impl From<i64> for ExtInt {
    fn from(v: i64) -> Self {
        ExtInt::Finite(v)
    }
}

impl std::fmt::Display for ExtInt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtInt::NegInf => write!(f, "-inf"),
            ExtInt::Finite(v) => write!(f, "{v}"),
            ExtInt::PosInf => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for ExtInt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "+inf" => Ok(ExtInt::PosInf),
            "-inf" => Ok(ExtInt::NegInf),
            other => other
                .parse::<i64>()
                .map(ExtInt::Finite)
                .map_err(|e| Error::Parse(format!("bad extended integer {other:?}: {e}"))),
        }
    }
}

// ---------------------------------------------------------------------------
// Partitions and signatures
// ---------------------------------------------------------------------------

/// A partition: a weakly decreasing sequence of nonnegative integers with
/// finitely many nonzero parts. Trailing zeros are normalized away, so two
/// partitions with the same nonzero parts compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Partition {
    parts: Vec<u64>,
}

impl Partition {
    pub fn new(parts: impl Into<Vec<u64>>) -> Result<Self> {
        let mut parts = parts.into();
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter(format!(
                "partition parts must be weakly decreasing, got {parts:?}"
            )));
        }
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Ok(Self { parts })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// The nonzero parts.
    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    /// The `i`-th part, 1-based; zero beyond the support.
    pub fn part(&self, i: usize) -> u64 {
        assert!(i >= 1, "parts are 1-based");
        self.parts.get(i - 1).copied().unwrap_or(0)
    }

    /// Number of nonzero parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// The weight `|λ|`, i.e. the sum of the parts.
    pub fn weight(&self) -> u64 {
        self.parts.iter().sum()
    }
}

/// Returns true iff `λ₁ ≥ μ₁ ≥ λ₂ ≥ μ₂ ≥ ⋯` over the joint support.
pub fn interlaces(lam: &Partition, mu: &Partition) -> bool {
    let n = lam.len().max(mu.len());
    for i in 1..=n {
        if lam.part(i) < mu.part(i) || mu.part(i) < lam.part(i + 1) {
            return false;
        }
    }
    true
}

/// A signature: a weakly decreasing integer vector of length `k ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    entries: Vec<i64>,
}

impl Signature {
    pub fn new(entries: impl Into<Vec<i64>>) -> Result<Self> {
        let entries = entries.into();
        if entries.is_empty() {
            return Err(Error::InvalidParameter(
                "signature must have length at least 1".into(),
            ));
        }
        if entries.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter(format!(
                "signature entries must be weakly decreasing, got {entries:?}"
            )));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The `i`-th entry, 1-based.
    pub fn entry(&self, i: usize) -> i64 {
        self.entries[i - 1]
    }
}

// ---------------------------------------------------------------------------
// Increasing paths
// ---------------------------------------------------------------------------

/// An integer-valued nondecreasing function on `⟦t0, t1⟧`, stored by its
/// absolute values (increments are derived where needed).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IncreasingPath {
    t0: i64,
    values: Vec<i64>,
}

impl IncreasingPath {
    pub fn new(t0: i64, values: impl Into<Vec<i64>>) -> Result<Self> {
        let values = values.into();
        if values.is_empty() {
            return Err(Error::InvalidParameter("path must cover at least one time".into()));
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter(format!(
                "path values must be nondecreasing, got {values:?}"
            )));
        }
        Ok(Self { t0, values })
    }

    pub fn t0(&self) -> i64 {
        self.t0
    }

    pub fn t1(&self) -> i64 {
        self.t0 + self.values.len() as i64 - 1
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// Value at integer time `t ∈ ⟦t0, t1⟧`.
    pub fn value(&self, t: i64) -> i64 {
        assert!(
            t >= self.t0 && t <= self.t1(),
            "time {t} outside ⟦{}, {}⟧",
            self.t0,
            self.t1()
        );
        self.values[(t - self.t0) as usize]
    }

    /// Linear interpolation at real time `t`, clamped to the domain ends.
    pub fn interp(&self, t: f64) -> f64 {
        let lo = self.t0 as f64;
        let hi = self.t1() as f64;
        let t = t.clamp(lo, hi);
        let s = t - lo;
        let i = (s.floor() as usize).min(self.values.len() - 1);
        let frac = s - i as f64;
        if frac == 0.0 || i + 1 == self.values.len() {
            self.values[i] as f64
        } else {
            self.values[i] as f64 * (1.0 - frac) + self.values[i + 1] as f64 * frac
        }
    }
}

// ---------------------------------------------------------------------------
// Boundary data
// ---------------------------------------------------------------------------

/// A boundary function on `⟦t0, t1⟧` with extended-integer values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Boundary {
    t0: i64,
    values: Vec<ExtInt>,
}

impl Boundary {
    pub fn from_values(t0: i64, values: Vec<ExtInt>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("boundary must cover at least one time".into()));
        }
        Ok(Self { t0, values })
    }

    /// Constant boundary at a finite level.
    pub fn level(t0: i64, t1: i64, level: i64) -> Self {
        Self {
            t0,
            values: vec![ExtInt::Finite(level); (t1 - t0 + 1) as usize],
        }
    }

    /// The `f ≡ +∞` upper boundary.
    pub fn plus_infinity(t0: i64, t1: i64) -> Self {
        Self {
            t0,
            values: vec![ExtInt::PosInf; (t1 - t0 + 1) as usize],
        }
    }

    /// The `g ≡ -∞` lower boundary.
    pub fn minus_infinity(t0: i64, t1: i64) -> Self {
        Self {
            t0,
            values: vec![ExtInt::NegInf; (t1 - t0 + 1) as usize],
        }
    }

    pub fn t0(&self) -> i64 {
        self.t0
    }

    pub fn t1(&self) -> i64 {
        self.t0 + self.values.len() as i64 - 1
    }

    pub fn value(&self, t: i64) -> ExtInt {
        assert!(
            t >= self.t0 && t <= self.t1(),
            "time {t} outside ⟦{}, {}⟧",
            self.t0,
            self.t1()
        );
        self.values[(t - self.t0) as usize]
    }

    /// True iff the boundary is `+∞` at every time.
    pub fn is_plus_infinity(&self) -> bool {
        self.values.iter().all(|v| *v == ExtInt::PosInf)
    }

    /// True iff the boundary is `-∞` at every time.
    pub fn is_minus_infinity(&self) -> bool {
        self.values.iter().all(|v| *v == ExtInt::NegInf)
    }
}

/// Entrance/exit data plus upper and lower boundaries for an interlacing
/// configuration space on `⟦t0, t1⟧`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryData {
    pub t0: i64,
    pub t1: i64,
    pub x: Signature,
    pub y: Signature,
    pub f: Boundary,
    pub g: Boundary,
}

impl BoundaryData {
    pub fn new(t0: i64, t1: i64, x: Signature, y: Signature, f: Boundary, g: Boundary) -> Result<Self> {
        if t0 >= t1 {
            return Err(Error::InvalidParameter(format!("need t0 < t1, got {t0} ≥ {t1}")));
        }
        if x.len() != y.len() {
            return Err(Error::InvalidParameter(format!(
                "entrance and exit data must have equal length ({} vs {})",
                x.len(),
                y.len()
            )));
        }
        for i in 1..=x.len() {
            if x.entry(i) > y.entry(i) {
                return Err(Error::Infeasible(format!(
                    "x_{i} = {} > y_{i} = {} leaves no increasing path",
                    x.entry(i),
                    y.entry(i)
                )));
            }
        }
        for b in [&f, &g] {
            if b.t0() != t0 || b.t1() != t1 {
                return Err(Error::MismatchedIntervals(format!(
                    "boundary spans ⟦{}, {}⟧, expected ⟦{t0}, {t1}⟧",
                    b.t0(),
                    b.t1()
                )));
            }
        }
        if f.values.iter().any(|v| *v == ExtInt::NegInf) {
            return Err(Error::InvalidParameter("upper boundary may not take -∞".into()));
        }
        if g.values.iter().any(|v| *v == ExtInt::PosInf) {
            return Err(Error::InvalidParameter("lower boundary may not take +∞".into()));
        }
        Ok(Self { t0, t1, x, y, f, g })
    }

    /// Convenience constructor with `f ≡ +∞`, `g ≡ -∞`.
    pub fn free(t0: i64, t1: i64, x: Signature, y: Signature) -> Result<Self> {
        let f = Boundary::plus_infinity(t0, t1);
        let g = Boundary::minus_infinity(t0, t1);
        Self::new(t0, t1, x, y, f, g)
    }

    /// Number of curves.
    pub fn k(&self) -> usize {
        self.x.len()
    }

    /// Number of lattice times in `⟦t0, t1⟧`.
    pub fn horizon(&self) -> usize {
        (self.t1 - self.t0 + 1) as usize
    }
}

/// Checks the shifted interlacing event for a stack of paths against the
/// boundaries: `B_i(r-1) ≥ B_{i+1}(r)` for all `r ∈ ⟦t0+1, t1⟧` and
/// `i ∈ ⟦0, k⟧`, with `B_0 = f` and `B_{k+1} = g`.
pub fn ensemble_interlaces(paths: &[IncreasingPath], f: &Boundary, g: &Boundary) -> Result<bool> {
    let (t0, t1) = (f.t0(), f.t1());
    if g.t0() != t0 || g.t1() != t1 {
        return Err(Error::MismatchedIntervals("f and g cover different intervals".into()));
    }
    for p in paths {
        if p.t0() != t0 || p.t1() != t1 {
            return Err(Error::MismatchedIntervals(format!(
                "path on ⟦{}, {}⟧ does not match boundary ⟦{t0}, {t1}⟧",
                p.t0(),
                p.t1()
            )));
        }
    }
    let k = paths.len();
    let at = |i: usize, t: i64| -> ExtInt {
        if i == 0 {
            f.value(t)
        } else if i == k + 1 {
            g.value(t)
        } else {
            ExtInt::Finite(paths[i - 1].value(t))
        }
    };
    for r in (t0 + 1)..=t1 {
        for i in 0..=k {
            if at(i, r - 1) < at(i + 1, r) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Counting and exact sampling
// ---------------------------------------------------------------------------

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 1..=k {
        acc *= n - k + i;
        acc /= i;
    }
    acc
}

fn binomial_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc.checked_mul((n - k + i) as u128)?;
        acc /= i as u128;
    }
    Some(acc)
}

/// Number of increasing paths from `(t0, z0)` to `(t1, z1)`: the number of
/// weak compositions of `z1 - z0` into `t1 - t0` parts, exactly.
pub fn count_paths(t0: i64, t1: i64, z0: i64, z1: i64) -> BigUint {
    assert!(t0 < t1, "need t0 < t1");
    if z1 < z0 {
        return BigUint::zero();
    }
    let steps = (t1 - t0) as u64;
    let rise = (z1 - z0) as u64;
    binomial(rise + steps - 1, rise)
}

/// All increasing paths from `(t0, z0)` to `(t1, z1)`; the brute-force
/// counterpart of [`count_paths`] and the enumeration oracle behind the
/// uniformity tests.
pub fn enumerate_paths(t0: i64, t1: i64, z0: i64, z1: i64) -> Vec<IncreasingPath> {
    assert!(t0 < t1, "need t0 < t1");
    let mut out = Vec::new();
    if z1 < z0 {
        return out;
    }
    let mut prefix = vec![z0];
    fn rec(prefix: &mut Vec<i64>, t0: i64, t1: i64, z1: i64, out: &mut Vec<IncreasingPath>) {
        let cur = *prefix.last().unwrap();
        let t = t0 + prefix.len() as i64 - 1;
        if t == t1 {
            if cur == z1 {
                out.push(IncreasingPath::new(t0, prefix.clone()).unwrap());
            }
            return;
        }
        for v in cur..=z1 {
            prefix.push(v);
            rec(prefix, t0, t1, z1, out);
            prefix.pop();
        }
    }
    rec(&mut prefix, t0, t1, z1, &mut out);
    out
}

// Increments that still fit the one-variate-per-step draw: the total path
// count and every intermediate product must stay inside u128.
const U128_COUNT_GUARD: u128 = 1 << 90;

fn draw_increment_u128(rise: u64, steps_left: u64, total: u128, rng: &mut impl Rng) -> u64 {
    debug_assert!(steps_left >= 2);
    let mut u = rng.random_range(0..total);
    // weight(w) = #paths completing after increment w; walk the cumulative
    // sum until the variate falls inside the current cell.
    let mut weight = binomial_u128(rise + steps_left - 2, rise).unwrap();
    let mut w = 0u64;
    loop {
        if u < weight || w == rise {
            return w;
        }
        u -= weight;
        let stars = (rise - w) as u128;
        weight = weight * stars / (stars + steps_left as u128 - 2);
        w += 1;
    }
}

fn draw_increment_slots(rise: u64, steps_left: u64, rng: &mut impl Rng) -> u64 {
    debug_assert!(steps_left >= 2);
    let bars = steps_left - 1;
    let mut w = 0u64;
    while w < rise {
        // Exact Bernoulli(bars / (stars + bars)) without floats.
        if rng.random_range(0..(rise - w + bars)) < bars {
            break;
        }
        w += 1;
    }
    w
}

/// Draws a path exactly uniformly from `Ω(t0, t1, z0, z1)`.
///
/// Each step samples the conditional increment law
/// `P(next = v) = count_paths(t+1, t1, v, z1) / count_paths(t, t1, v0, z1)`
/// with exact integer arithmetic. When the path count fits in `u128` the
/// draw is a single uniform variate compared against cumulative weights;
/// beyond that the same law is realized as a cascade of exact integer
/// Bernoulli draws, so no precision is lost at any size.
pub fn sample_bridge_exact(
    t0: i64,
    t1: i64,
    z0: i64,
    z1: i64,
    rng: &mut impl Rng,
) -> Result<IncreasingPath> {
    if t0 >= t1 {
        return Err(Error::InvalidParameter(format!("need t0 < t1, got {t0} ≥ {t1}")));
    }
    if z1 < z0 {
        return Err(Error::Infeasible(format!("no increasing path from {z0} down to {z1}")));
    }
    let steps = (t1 - t0) as u64;
    let mut values = Vec::with_capacity(steps as usize + 1);
    values.push(z0);
    let mut cur = z0;
    for step in 0..steps {
        let left = steps - step;
        if left == 1 {
            values.push(z1);
            break;
        }
        let rise = (z1 - cur) as u64;
        let w = match binomial_u128(rise + left - 1, rise) {
            Some(total) if total < U128_COUNT_GUARD && rise + left < (1 << 30) => {
                draw_increment_u128(rise, left, total, rng)
            }
            _ => draw_increment_slots(rise, left, rng),
        };
        cur += w as i64;
        values.push(cur);
    }
    IncreasingPath::new(t0, values)
}

// ---------------------------------------------------------------------------
// Line-oriented text form
// ---------------------------------------------------------------------------

/// Serializes a path as `t0 v0 v1 … vn`.
pub fn path_to_line(path: &IncreasingPath) -> String {
    let mut s = path.t0().to_string();
    for v in path.values() {
        s.push(' ');
        s.push_str(&v.to_string());
    }
    s
}

/// Parses the `t0 v0 v1 … vn` form.
pub fn path_from_line(line: &str) -> Result<IncreasingPath> {
    let mut nums = line.split_whitespace().map(|tok| {
        tok.parse::<i64>()
            .map_err(|e| Error::Parse(format!("bad path token {tok:?}: {e}")))
    });
    let t0 = nums.next().ok_or_else(|| Error::Parse("empty path line".into()))??;
    let values = nums.collect::<Result<Vec<_>>>()?;
    IncreasingPath::new(t0, values)
}

/// Serializes a partition as `p1 p2 … pk` (empty partition → empty line).
pub fn partition_to_line(p: &Partition) -> String {
    p.parts()
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parses the `p1 p2 … pk` form.
pub fn partition_from_line(line: &str) -> Result<Partition> {
    let parts = line
        .split_whitespace()
        .map(|tok| {
            tok.parse::<u64>()
                .map_err(|e| Error::Parse(format!("bad partition token {tok:?}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Partition::new(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_stream;
    use crate::stats::chi_square_gof;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;
    use std::collections::HashMap;

    fn part(parts: &[u64]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn interlaces_definition_checks() {
        assert!(interlaces(&part(&[3, 1]), &part(&[2, 1])));
        assert!(!interlaces(&part(&[2, 2]), &part(&[3])));
        assert!(interlaces(&part(&[]), &part(&[])));
    }

    #[test]
    fn trailing_zeros_do_not_matter() {
        assert_eq!(part(&[2, 1, 0, 0]), part(&[2, 1]));
        assert_eq!(part(&[2, 1, 0]).len(), 2);
    }

    #[test]
    fn count_paths_examples() {
        assert_eq!(count_paths(0, 3, 0, 0), BigUint::from(1u32));
        // Six weak compositions of 2 into 3 parts, matching the enumeration.
        assert_eq!(count_paths(0, 3, 0, 2), BigUint::from(6u32));
        assert_eq!(enumerate_paths(0, 3, 0, 2).len(), 6);
        assert_eq!(count_paths(0, 2, 5, 4), BigUint::zero());
    }

    #[test]
    fn count_paths_matches_enumeration_exhaustively() {
        for span in 1..=6i64 {
            for rise in 0..=6i64 {
                let n = enumerate_paths(0, span, 0, rise).len();
                assert_eq!(
                    count_paths(0, span, 0, rise),
                    BigUint::from(n),
                    "span {span} rise {rise}"
                );
            }
        }
    }

    #[test]
    fn count_paths_is_translation_invariant_and_large() {
        assert_eq!(count_paths(3, 6, 10, 12), count_paths(0, 3, 0, 2));
        // Far beyond u128: 2^256-scale counts must stay exact.
        let big = count_paths(0, 200, 0, 200);
        assert!(big > BigUint::from(u128::MAX));
    }

    #[test]
    fn single_step_bridge_is_forced() {
        let mut rng = derive_stream(1, 0);
        let p = sample_bridge_exact(0, 1, 0, 5, &mut rng).unwrap();
        assert_eq!(p.values(), &[0, 5]);
    }

    #[test]
    fn bridge_rejects_decreasing_endpoints() {
        let mut rng = derive_stream(1, 0);
        assert!(sample_bridge_exact(0, 4, 3, 1, &mut rng).is_err());
    }

    #[test]
    fn bridge_hits_endpoints_and_stays_monotone() {
        let mut rng = derive_stream(2, 0);
        for _ in 0..200 {
            let p = sample_bridge_exact(-3, 9, -2, 17, &mut rng).unwrap();
            assert_eq!(p.value(-3), -2);
            assert_eq!(p.value(9), 17);
            assert!(p.values().windows(2).all(|w| w[1] >= w[0]));
        }
    }

    #[test]
    fn bridge_first_step_law_is_one_third_each() {
        // Ω(0,2,0,2) has three paths; the first step is uniform on {0,1,2}.
        let mut rng = derive_stream(3, 0);
        let n = 100_000usize;
        let mut counts = [0u64; 3];
        for _ in 0..n {
            let p = sample_bridge_exact(0, 2, 0, 2, &mut rng).unwrap();
            counts[p.value(1) as usize] += 1;
        }
        let expected = vec![n as f64 / 3.0; 3];
        let gof = chi_square_gof(&counts, &expected).unwrap();
        assert!(gof.p_value > 0.001, "chi-square p = {}", gof.p_value);
    }

    #[test]
    fn bridge_uniform_on_small_state_spaces() {
        // Every enumerable Ω with at most 50 paths in this sweep passes a
        // chi-square uniformity test at 1e5 samples.
        let mut rng = derive_stream(4, 0);
        for (span, rise) in [(2i64, 2i64), (4, 3), (3, 3), (5, 2)] {
            let paths = enumerate_paths(0, span, 0, rise);
            assert!(paths.len() <= 50);
            let index: HashMap<_, _> = paths.iter().cloned().zip(0usize..).collect();
            let mut counts = vec![0u64; paths.len()];
            let n = 100_000usize;
            for _ in 0..n {
                let p = sample_bridge_exact(0, span, 0, rise, &mut rng).unwrap();
                counts[index[&p]] += 1;
            }
            let expected = vec![n as f64 / paths.len() as f64; paths.len()];
            let gof = chi_square_gof(&counts, &expected).unwrap();
            assert!(
                gof.p_value > 0.001,
                "span {span} rise {rise}: chi-square p = {}",
                gof.p_value
            );
        }
    }

    #[test]
    fn large_bridge_midpoint_moments_match_the_count_law() {
        // The slot-cascade regime (counts beyond u128) must agree with the
        // exact marginal: mean z/2 and variance z·(1/4)·(n+z)/(n+1) at the
        // midpoint of Ω(0,n,0,z).
        let (n, z) = (400i64, 400i64);
        assert!(binomial_u128(799, 400).is_none());
        let mut rng = derive_stream(5, 0);
        let samples = 20_000;
        let (mut sum, mut sumsq) = (0f64, 0f64);
        for _ in 0..samples {
            let p = sample_bridge_exact(0, n, 0, z, &mut rng).unwrap();
            let v = p.value(n / 2) as f64;
            sum += v;
            sumsq += v * v;
        }
        let mean = sum / samples as f64;
        let var = sumsq / samples as f64 - mean * mean;
        let exact_var = z as f64 * 0.25 * (n + z) as f64 / (n + 1) as f64;
        assert!((mean - z as f64 / 2.0).abs() < 3.0 * (exact_var / samples as f64).sqrt());
        assert!((var / exact_var - 1.0).abs() < 0.05, "var {var} vs {exact_var}");
    }

    #[test]
    fn ensemble_interlacing_examples() {
        // The three stacked curves used throughout as a worked picture.
        let l1 = IncreasingPath::new(0, vec![1, 4, 5, 5, 5, 5, 6, 6, 6]).unwrap();
        let l2 = IncreasingPath::new(0, vec![1, 1, 1, 3, 3, 3, 3, 4, 4]).unwrap();
        let l3 = IncreasingPath::new(0, vec![0, 0, 1, 1, 3, 3, 3, 3, 3]).unwrap();
        let f = Boundary::plus_infinity(0, 8);
        let g = Boundary::minus_infinity(0, 8);
        assert!(ensemble_interlaces(&[l1, l2, l3], &f, &g).unwrap());

        let flat = IncreasingPath::new(0, vec![0, 0]).unwrap();
        let f = Boundary::plus_infinity(0, 1);
        let g = Boundary::minus_infinity(0, 1);
        assert!(ensemble_interlaces(&[flat.clone(), flat], &f, &g).unwrap());

        let q1 = IncreasingPath::new(0, vec![0, 0]).unwrap();
        let q2 = IncreasingPath::new(0, vec![0, 1]).unwrap();
        assert!(!ensemble_interlaces(&[q1, q2], &f, &g).unwrap());
    }

    #[test]
    fn ensemble_interlacing_rejects_mismatched_intervals() {
        let a = IncreasingPath::new(0, vec![0, 1]).unwrap();
        let b = IncreasingPath::new(0, vec![0, 1, 2]).unwrap();
        let f = Boundary::plus_infinity(0, 1);
        let g = Boundary::minus_infinity(0, 1);
        assert!(matches!(
            ensemble_interlaces(&[a, b], &f, &g),
            Err(Error::MismatchedIntervals(_))
        ));
    }

    #[test]
    fn finite_boundaries_participate_in_the_event() {
        let q = IncreasingPath::new(0, vec![1, 2]).unwrap();
        let g = Boundary::minus_infinity(0, 1);
        // f(0) = 1 < Q(1) = 2 violates the shifted constraint.
        assert!(!ensemble_interlaces(&[q.clone()], &Boundary::level(0, 1, 1), &g).unwrap());
        assert!(ensemble_interlaces(&[q], &Boundary::level(0, 1, 2), &g).unwrap());
    }

    #[test]
    fn text_round_trip() {
        let p = IncreasingPath::new(-2, vec![0, 0, 3, 5]).unwrap();
        assert_eq!(path_to_line(&p), "-2 0 0 3 5");
        assert_eq!(path_from_line(&path_to_line(&p)).unwrap(), p);

        let lam = part(&[4, 2, 1]);
        assert_eq!(partition_to_line(&lam), "4 2 1");
        assert_eq!(partition_from_line("4 2 1").unwrap(), lam);
        assert_eq!(partition_from_line("").unwrap(), Partition::empty());
    }

    #[test]
    fn count_fits_u128_guard_is_conservative() {
        let exact = count_paths(0, 40, 0, 40);
        let via_u128 = binomial_u128(79, 40).unwrap();
        assert_eq!(exact.to_u128().unwrap(), via_u128);
    }

    proptest! {
        #[test]
        fn interlaces_agrees_with_pairwise_expansion(
            a in proptest::collection::vec(0u64..9, 0..8),
            b in proptest::collection::vec(0u64..9, 0..8),
        ) {
            let mut a = a; a.sort_unstable_by(|x, y| y.cmp(x));
            let mut b = b; b.sort_unstable_by(|x, y| y.cmp(x));
            let lam = part(&a);
            let mu = part(&b);
            let n = lam.len().max(mu.len()) + 1;
            let expanded = (1..=n).all(|i| lam.part(i) >= mu.part(i))
                && (1..=n).all(|i| mu.part(i) >= lam.part(i + 1));
            prop_assert_eq!(interlaces(&lam, &mu), expanded);
        }

        #[test]
        fn sampled_bridges_are_valid_members(span in 1i64..8, rise in 0i64..8, seed in 0u64..32) {
            let mut rng = derive_stream(seed, 99);
            let p = sample_bridge_exact(0, span, 0, rise, &mut rng).unwrap();
            prop_assert_eq!(p.value(0), 0);
            prop_assert_eq!(p.value(span), rise);
        }
    }
}
