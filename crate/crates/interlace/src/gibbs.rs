//! The interlacing configuration space, its maximal element, single-site
//! Glauber dynamics with uniform invariant law, monotone coupled chains,
//! and exact small-instance oracles (brute-force enumeration and rational
//! transition matrices).
//!
//! Site selection draws one uniform index over the full `k × horizon`
//! rectangle including the boundary columns; updates landing on a boundary
//! column leave the state unchanged, which keeps the kernel doubly
//! stochastic.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_rational::Rational64;
use num_traits::{One, Zero};
use rand::Rng;

use crate::lattice::{
    ensemble_interlaces, Boundary, BoundaryData, ExtInt, IncreasingPath, Signature,
};
use crate::rng::Stream;
use crate::{Error, Result};

/// Default burn-in, in sweeps. No mixing bound is available, so this is
/// tuned to pass the uniformity gates with margin; CLI-configurable.
pub const DEFAULT_BURNIN: u64 = 200;
/// Default thinning, in sweeps.
pub const DEFAULT_THIN: u64 = 5;
/// Default cap for exhaustive state enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 1_000_000;

// ---------------------------------------------------------------------------
// Configurations
// ---------------------------------------------------------------------------

/// A member of the interlacing configuration space: `k` stacked increasing
/// paths with prescribed endpoints, interlacing with each other and the
/// boundaries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterlacingConfig {
    boundary: BoundaryData,
    grid: Vec<Vec<i64>>,
}

impl InterlacingConfig {
    /// Wraps a `k × horizon` grid, validating every invariant.
    pub fn from_grid(boundary: BoundaryData, grid: Vec<Vec<i64>>) -> Result<Self> {
        let cfg = Self { boundary, grid };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn boundary(&self) -> &BoundaryData {
        &self.boundary
    }

    /// Row-major values: `grid()[i][s]` is curve `i+1` at time `t0 + s`.
    pub fn grid(&self) -> &[Vec<i64>] {
        &self.grid
    }

    pub fn k(&self) -> usize {
        self.grid.len()
    }

    fn col(&self, t: i64) -> usize {
        (t - self.boundary.t0) as usize
    }

    /// Value of curve `row` (0-based) at absolute time `t`.
    pub fn value(&self, row: usize, t: i64) -> i64 {
        self.grid[row][self.col(t)]
    }

    /// Value extended by the boundaries: row `-1` reads `f`, row `k`
    /// reads `g`.
    fn ext_value(&self, row: i64, t: i64) -> ExtInt {
        if row < 0 {
            self.boundary.f.value(t)
        } else if row >= self.k() as i64 {
            self.boundary.g.value(t)
        } else {
            ExtInt::Finite(self.value(row as usize, t))
        }
    }

    /// Curve `row` as an owned path.
    pub fn curve(&self, row: usize) -> IncreasingPath {
        IncreasingPath::new(self.boundary.t0, self.grid[row].clone()).expect("rows stay monotone")
    }

    /// All curves, top to bottom.
    pub fn curves(&self) -> Vec<IncreasingPath> {
        (0..self.k()).map(|i| self.curve(i)).collect()
    }

    /// Checks endpoints, row monotonicity, and the interlacing event.
    pub fn validate(&self) -> Result<()> {
        let bd = &self.boundary;
        if self.grid.len() != bd.k() {
            return Err(Error::InvalidParameter(format!(
                "grid has {} rows for k = {}",
                self.grid.len(),
                bd.k()
            )));
        }
        let horizon = bd.horizon();
        let mut paths = Vec::with_capacity(self.grid.len());
        for (i, row) in self.grid.iter().enumerate() {
            if row.len() != horizon {
                return Err(Error::InvalidParameter(format!(
                    "row {i} has {} columns, expected {horizon}",
                    row.len()
                )));
            }
            if row[0] != bd.x.entry(i + 1) || row[horizon - 1] != bd.y.entry(i + 1) {
                return Err(Error::InvalidParameter(format!(
                    "row {i} endpoints ({}, {}) do not match boundary data ({}, {})",
                    row[0],
                    row[horizon - 1],
                    bd.x.entry(i + 1),
                    bd.y.entry(i + 1)
                )));
            }
            paths.push(IncreasingPath::new(bd.t0, row.clone())?);
        }
        if !ensemble_interlaces(&paths, &bd.f, &bd.g)? {
            return Err(Error::InvalidParameter("grid violates the interlacing event".into()));
        }
        Ok(())
    }
}

/// Builds the maximal element `Q_i(t0 + s) = min(x_{i-s}, y_i)` (with
/// `x_m = +∞` for `m ≤ 0`), which dominates every member pointwise. The
/// upper boundary must be `+∞` for the formula to apply.
pub fn maximal_element(boundary: &BoundaryData) -> Result<InterlacingConfig> {
    if !boundary.f.is_plus_infinity() {
        return Err(Error::InvalidParameter(
            "the maximal element is defined for f ≡ +∞".into(),
        ));
    }
    let k = boundary.k();
    let horizon = boundary.horizon();
    let mut grid = vec![vec![0i64; horizon]; k];
    for i in 0..k {
        let y_i = boundary.y.entry(i + 1);
        for s in 0..horizon {
            let idx = (i + 1) as i64 - s as i64;
            grid[i][s] = if idx <= 0 {
                y_i
            } else {
                boundary.x.entry(idx as usize).min(y_i)
            };
        }
    }
    InterlacingConfig::from_grid(boundary.clone(), grid)
        .map_err(|_| Error::Infeasible("empty-or-infeasible state space".into()))
}

// ---------------------------------------------------------------------------
// Glauber dynamics
// ---------------------------------------------------------------------------

/// The admissible interval `[C, D]` for resampling site `(row, t)`:
/// `C = max(Q_{row+1}(t+1), Q_row(t-1))`,
/// `D = min(Q_{row-1}(t-1), Q_row(t+1))`, with the boundary rows standing
/// in above and below. `t` must be strictly interior.
pub fn glauber_bounds(config: &InterlacingConfig, row: usize, t: i64) -> Result<(i64, i64)> {
    let bd = config.boundary();
    if t <= bd.t0 || t >= bd.t1 {
        return Err(Error::InvalidParameter(format!(
            "site time {t} is not interior to ⟦{}, {}⟧",
            bd.t0, bd.t1
        )));
    }
    let r = row as i64;
    let c = config
        .ext_value(r + 1, t + 1)
        .max(ExtInt::Finite(config.value(row, t - 1)));
    let d = config
        .ext_value(r - 1, t - 1)
        .min(ExtInt::Finite(config.value(row, t + 1)));
    let (c, d) = (c.finite().expect("lower bound is finite"), d.finite().expect("upper bound is finite"));
    debug_assert!(c <= d, "valid configs keep C ≤ D");
    Ok((c, d))
}

/// The heat-bath draw `C + ⌊u·(D - C + 1)⌋` for `u ∈ (0, 1)`.
pub fn glauber_draw(c: i64, d: i64, u: f64) -> i64 {
    let span = (d - c + 1) as f64;
    c + ((u * span).floor() as i64).min(d - c)
}

/// One Markov chain over an interlacing configuration space, carrying its
/// own seeded stream.
#[derive(Debug, Clone)]
pub struct ChainState {
    pub config: InterlacingConfig,
    pub step_count: u64,
    rng: Stream,
}

impl ChainState {
    /// Starts at the maximal element, the guaranteed-valid initial state.
    pub fn new(boundary: &BoundaryData, rng: Stream) -> Result<Self> {
        Ok(Self { config: maximal_element(boundary)?, step_count: 0, rng })
    }

    /// Applies one Glauber update at `site` using the uniform variate `u`.
    /// Sites on the time boundary leave the configuration unchanged.
    pub fn glauber_step(&mut self, site: (usize, i64), u: f64) {
        let (row, t) = site;
        let bd = self.config.boundary();
        if t > bd.t0 && t < bd.t1 {
            let (c, d) = glauber_bounds(&self.config, row, t).expect("interior site");
            let v = glauber_draw(c, d, u);
            let col = self.config.col(t);
            self.config.grid[row][col] = v;
            debug_assert!((c..=d).contains(&v));
        }
        self.step_count += 1;
    }

    /// One update at a uniformly random site of the full rectangle.
    pub fn step_random(&mut self) {
        let bd = self.config.boundary();
        let (t0, t1, k) = (bd.t0, bd.t1, self.config.k());
        let row = self.rng.random_range(0..k);
        let t = self.rng.random_range(t0..=t1);
        let u: f64 = self.rng.random();
        self.glauber_step((row, t), u);
    }

    /// One sweep: `k · horizon` random site updates.
    pub fn sweep(&mut self) {
        let updates = self.config.k() * self.config.boundary().horizon();
        for _ in 0..updates {
            self.step_random();
        }
    }
}

/// Sweep schedule for [`run_chain`].
#[derive(Debug, Clone, Copy)]
pub struct ChainSchedule {
    pub sweeps: u64,
    pub burnin: u64,
    pub thin: u64,
}

impl ChainSchedule {
    pub fn new(sweeps: u64) -> Self {
        Self { sweeps, burnin: DEFAULT_BURNIN, thin: DEFAULT_THIN }
    }
}

/// Runs Glauber dynamics from the maximal element and emits every
/// `thin`-th sweep after the burn-in (sweep 0 is the initial state, so
/// `sweeps = 0` with `burnin = 0` emits exactly the maximal element).
pub fn run_chain(
    boundary: &BoundaryData,
    schedule: ChainSchedule,
    rng: Stream,
) -> Result<Vec<InterlacingConfig>> {
    if schedule.thin == 0 {
        return Err(Error::InvalidParameter("thinning interval must be ≥ 1".into()));
    }
    let mut chain = ChainState::new(boundary, rng)?;
    let mut out = Vec::new();
    for sweep_idx in 0..=schedule.sweeps {
        if sweep_idx >= schedule.burnin && (sweep_idx - schedule.burnin) % schedule.thin == 0 {
            out.push(chain.config.clone());
        }
        if sweep_idx < schedule.sweeps {
            chain.sweep();
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Monotone coupling
// ---------------------------------------------------------------------------

/// Two chains driven by one shared stream of `(row, time, u)` triples;
/// ordered boundary data keeps the configurations pointwise ordered
/// forever.
#[derive(Debug, Clone)]
pub struct CoupledChainState {
    pub top: ChainState,
    pub bottom: ChainState,
    shared: Stream,
}

impl CoupledChainState {
    /// Requires `f ≡ +∞` on both chains and ordered boundary data
    /// (`x^t ≥ x^b`, `y^t ≥ y^b`, `g^t ≥ g^b` pointwise).
    pub fn new(top: &BoundaryData, bottom: &BoundaryData, shared: Stream) -> Result<Self> {
        if top.t0 != bottom.t0 || top.t1 != bottom.t1 || top.k() != bottom.k() {
            return Err(Error::MismatchedIntervals(
                "coupled chains need one shape of boundary data".into(),
            ));
        }
        if !top.f.is_plus_infinity() || !bottom.f.is_plus_infinity() {
            return Err(Error::InvalidParameter(
                "the monotone coupling requires f ≡ +∞ on both chains".into(),
            ));
        }
        let ordered_sides = (1..=top.k()).all(|i| {
            top.x.entry(i) >= bottom.x.entry(i) && top.y.entry(i) >= bottom.y.entry(i)
        });
        let ordered_floor = (top.t0..=top.t1).all(|t| top.g.value(t) >= bottom.g.value(t));
        if !ordered_sides || !ordered_floor {
            return Err(Error::InvalidParameter(
                "boundary data is not an admissible ordered pair".into(),
            ));
        }
        // Per-chain streams are never consulted while coupled; all
        // randomness flows through the shared stream.
        let top_chain = ChainState::new(top, crate::rng::derive_stream(0, 0))?;
        let bottom_chain = ChainState::new(bottom, crate::rng::derive_stream(0, 1))?;
        let coupled = Self { top: top_chain, bottom: bottom_chain, shared };
        debug_assert!(coupled.is_ordered());
        Ok(coupled)
    }

    /// Pointwise `top ≥ bottom` over the whole grid.
    pub fn is_ordered(&self) -> bool {
        self.top
            .config
            .grid()
            .iter()
            .zip(self.bottom.config.grid())
            .all(|(t, b)| t.iter().zip(b).all(|(tv, bv)| tv >= bv))
    }

    /// Applies the same `(row, time, u)` triple to both chains.
    pub fn coupled_step(&mut self) {
        let bd = self.top.config.boundary();
        let (t0, t1, k) = (bd.t0, bd.t1, self.top.config.k());
        let row = self.shared.random_range(0..k);
        let t = self.shared.random_range(t0..=t1);
        let u: f64 = self.shared.random();
        self.top.glauber_step((row, t), u);
        self.bottom.glauber_step((row, t), u);
        debug_assert!(
            t == t0 || t == t1 || self.top.config.value(row, t) >= self.bottom.config.value(row, t)
        );
    }
}

// ---------------------------------------------------------------------------
// Exact oracles
// ---------------------------------------------------------------------------

/// Exhaustive, duplicate-free enumeration of the configuration space by
/// depth-first column assignment. Refuses (never truncates) once more than
/// `cap` states are found.
pub fn enumerate_states(boundary: &BoundaryData, cap: usize) -> Result<Vec<InterlacingConfig>> {
    let bd = boundary;
    let k = bd.k();
    let horizon = bd.horizon();
    // Constraints render the space empty regardless of interior choices.
    let static_ok = {
        let f_end = bd.f.value(bd.t1 - 1) >= ExtInt::Finite(bd.y.entry(1));
        let g_start = ExtInt::Finite(bd.x.entry(k)) >= bd.g.value(bd.t0 + 1);
        f_end && g_start
    };
    if !static_ok {
        return Ok(Vec::new());
    }

    let mut grid: Vec<Vec<i64>> = (0..k)
        .map(|i| {
            let mut row = vec![0i64; horizon];
            row[0] = bd.x.entry(i + 1);
            row[horizon - 1] = bd.y.entry(i + 1);
            row
        })
        .collect();
    let mut out = Vec::new();

    // Recursion over sites in column-major order; column `s` covers times
    // t0+1 … t1-1, rows top to bottom.
    fn rec(
        bd: &BoundaryData,
        grid: &mut Vec<Vec<i64>>,
        s: usize,
        row: usize,
        cap: usize,
        out: &mut Vec<InterlacingConfig>,
    ) -> Result<()> {
        let k = bd.k();
        let horizon = bd.horizon();
        if s == horizon - 1 {
            // Interior fully assigned: check constraints into the exit
            // column and the lower boundary at t1.
            let last = horizon - 2;
            for i in 0..k.saturating_sub(1) {
                if grid[i][last] < bd.y.entry(i + 2) {
                    return Ok(());
                }
            }
            if ExtInt::Finite(grid[k - 1][last]) < bd.g.value(bd.t1) {
                return Ok(());
            }
            if out.len() >= cap {
                return Err(Error::EnumerationCapExceeded { cap });
            }
            out.push(
                InterlacingConfig::from_grid(bd.clone(), grid.clone())
                    .expect("DFS constraints make every emitted grid valid"),
            );
            return Ok(());
        }
        if row == 0 && s > 1 {
            // Lower-boundary constraint tying the completed previous
            // column to g at this time.
            if ExtInt::Finite(grid[k - 1][s - 1]) < bd.g.value(bd.t0 + s as i64) {
                return Ok(());
            }
        }
        let lower = grid[row][s - 1];
        let above = if row == 0 {
            bd.f.value(bd.t0 + s as i64 - 1)
        } else {
            ExtInt::Finite(grid[row - 1][s - 1])
        };
        let upper = match above {
            ExtInt::PosInf => bd.y.entry(row + 1),
            ExtInt::Finite(v) => v.min(bd.y.entry(row + 1)),
            ExtInt::NegInf => return Ok(()),
        };
        for v in lower..=upper {
            grid[row][s] = v;
            let (ns, nr) = if row + 1 == k { (s + 1, 0) } else { (s, row + 1) };
            rec(bd, grid, ns, nr, cap, out)?;
        }
        Ok(())
    }

    if horizon == 2 {
        // No interior columns; the single candidate is the endpoint grid.
        if let Ok(cfg) = InterlacingConfig::from_grid(bd.clone(), grid) {
            out.push(cfg);
        }
        return Ok(out);
    }
    rec(bd, &mut grid, 1, 0, cap, &mut out)?;
    Ok(out)
}

/// The one-update Glauber kernel over an enumerated state space, with
/// exact rational entries.
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    states: Vec<InterlacingConfig>,
    rows: Vec<BTreeMap<usize, Rational64>>,
}

impl TransitionMatrix {
    pub fn n(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[InterlacingConfig] {
        &self.states
    }

    pub fn entry(&self, i: usize, j: usize) -> Rational64 {
        self.rows[i].get(&j).copied().unwrap_or_else(Rational64::zero)
    }

    /// Every row sums to exactly one.
    pub fn rows_are_stochastic(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.values().copied().sum::<Rational64>() == Rational64::one())
    }

    /// `P(i → j) = P(j → i)` entrywise, exactly.
    pub fn is_symmetric(&self) -> bool {
        self.rows.iter().enumerate().all(|(i, row)| {
            row.iter().all(|(&j, &v)| self.entry(j, i) == v)
        })
    }

    /// The uniform vector is exactly invariant (column sums are one).
    pub fn uniform_is_stationary(&self) -> bool {
        let mut col_sums = vec![Rational64::zero(); self.n()];
        for row in &self.rows {
            for (&j, &v) in row {
                col_sums[j] += v;
            }
        }
        col_sums.into_iter().all(|s| s == Rational64::one())
    }

    /// Positive holding probability at every state (aperiodicity).
    pub fn diagonal_is_positive(&self) -> bool {
        (0..self.n()).all(|i| self.entry(i, i) > Rational64::zero())
    }

    /// The graph of positive transitions is connected.
    pub fn is_irreducible(&self) -> bool {
        if self.n() == 0 {
            return false;
        }
        let mut seen = vec![false; self.n()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = queue.pop_front() {
            for (&j, _) in &self.rows[i] {
                if !seen[j] {
                    seen[j] = true;
                    count += 1;
                    queue.push_back(j);
                }
            }
        }
        count == self.n()
    }
}

/// Builds the exact one-update kernel: a site is chosen uniformly over all
/// `k · horizon` sites (boundary columns idle), then the value is resampled
/// uniformly over its admissible interval.
pub fn transition_matrix(boundary: &BoundaryData, cap: usize) -> Result<TransitionMatrix> {
    let states = enumerate_states(boundary, cap)?;
    if states.is_empty() {
        return Err(Error::Infeasible("empty-or-infeasible state space".into()));
    }
    let index: HashMap<Vec<Vec<i64>>, usize> = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.grid().to_vec(), i))
        .collect();
    let k = boundary.k();
    let horizon = boundary.horizon() as i64;
    let sites = k as i64 * horizon;
    let site_weight = Rational64::new(1, sites);
    let mut rows = vec![BTreeMap::<usize, Rational64>::new(); states.len()];
    for (i, state) in states.iter().enumerate() {
        let add = |row: &mut BTreeMap<usize, Rational64>, j: usize, w: Rational64| {
            *row.entry(j).or_insert_with(Rational64::zero) += w;
        };
        let mut scratch = state.grid().to_vec();
        for r in 0..k {
            for t in boundary.t0..=boundary.t1 {
                if t == boundary.t0 || t == boundary.t1 {
                    add(&mut rows[i], i, site_weight);
                    continue;
                }
                let (c, d) = glauber_bounds(state, r, t)?;
                let w = site_weight / Rational64::from_integer(d - c + 1);
                let col = (t - boundary.t0) as usize;
                let old = scratch[r][col];
                for v in c..=d {
                    scratch[r][col] = v;
                    let j = *index.get(&scratch).expect("single-site moves stay in the space");
                    add(&mut rows[i], j, w);
                }
                scratch[r][col] = old;
            }
        }
    }
    Ok(TransitionMatrix { states, rows })
}

// ---------------------------------------------------------------------------
// Randomized instances for coupling experiments
// ---------------------------------------------------------------------------

/// Draws feasible boundary data with `f ≡ +∞`: signatures in a small value
/// range and, optionally, a finite constant lower boundary below the
/// bottom entrance value (which never obstructs feasibility).
pub fn random_feasible_boundary(
    k: usize,
    t0: i64,
    t1: i64,
    finite_g: bool,
    rng: &mut impl Rng,
) -> BoundaryData {
    loop {
        let mut xs: Vec<i64> = (0..k).map(|_| rng.random_range(-4..=4)).collect();
        xs.sort_unstable_by(|a, b| b.cmp(a));
        let mut ys = Vec::with_capacity(k);
        let mut prev = i64::MAX;
        for (i, &x) in xs.iter().enumerate() {
            let cand = x + rng.random_range(0..=5);
            let y = cand.min(prev);
            debug_assert!(y >= x, "y_{i} fell below x_{i}");
            ys.push(y);
            prev = y;
        }
        let x = Signature::new(xs.clone()).expect("sorted");
        let y = Signature::new(ys).expect("monotone by construction");
        let g = if finite_g {
            Boundary::level(t0, t1, xs[k - 1] - rng.random_range(0..=2))
        } else {
            Boundary::minus_infinity(t0, t1)
        };
        let f = Boundary::plus_infinity(t0, t1);
        if let Ok(bd) = BoundaryData::new(t0, t1, x, y, f, g) {
            if maximal_element(&bd).is_ok() {
                return bd;
            }
        }
    }
}

/// Produces an admissible ordered boundary pair `(top, bottom)` by taking
/// pointwise max/min of two independent feasible configurations; both
/// sides come with a feasibility witness by construction.
pub fn random_ordered_boundary_pair(
    k: usize,
    t0: i64,
    t1: i64,
    finite_g: bool,
    rng: &mut impl Rng,
) -> (BoundaryData, BoundaryData) {
    loop {
        let b1 = random_feasible_boundary(k, t0, t1, finite_g, rng);
        let b2 = random_feasible_boundary(k, t0, t1, finite_g, rng);
        let c1 = maximal_element(&b1).expect("feasible by construction");
        let c2 = maximal_element(&b2).expect("feasible by construction");
        let combine = |pick: fn(i64, i64) -> i64, pick_g: fn(ExtInt, ExtInt) -> ExtInt| {
            let grid: Vec<Vec<i64>> = c1
                .grid()
                .iter()
                .zip(c2.grid())
                .map(|(r1, r2)| r1.iter().zip(r2).map(|(&a, &b)| pick(a, b)).collect())
                .collect();
            let x = Signature::new(grid.iter().map(|r| r[0]).collect::<Vec<_>>()).unwrap();
            let y = Signature::new(grid.iter().map(|r| *r.last().unwrap()).collect::<Vec<_>>())
                .unwrap();
            let g_vals: Vec<ExtInt> =
                (t0..=t1).map(|t| pick_g(b1.g.value(t), b2.g.value(t))).collect();
            let g = Boundary::from_values(t0, g_vals).unwrap();
            let f = Boundary::plus_infinity(t0, t1);
            let bd = BoundaryData::new(t0, t1, x, y, f, g).unwrap();
            InterlacingConfig::from_grid(bd.clone(), grid).map(|_| bd)
        };
        let top = combine(i64::max, ExtInt::max);
        let bottom = combine(i64::min, ExtInt::min);
        if let (Ok(top), Ok(bottom)) = (top, bottom) {
            return (top, bottom);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_stream;
    use proptest::prelude::*;
    use std::collections::HashMap;

    fn sig(v: &[i64]) -> Signature {
        Signature::new(v.to_vec()).unwrap()
    }

    fn free_boundary(t0: i64, t1: i64, x: &[i64], y: &[i64]) -> BoundaryData {
        BoundaryData::free(t0, t1, sig(x), sig(y)).unwrap()
    }

    #[test]
    fn maximal_element_examples() {
        let bd = free_boundary(0, 2, &[3, 1], &[5, 4]);
        let m = maximal_element(&bd).unwrap();
        assert_eq!(m.grid()[0], vec![3, 5, 5]);
        assert_eq!(m.grid()[1], vec![1, 3, 4]);

        let bd = free_boundary(0, 5, &[0], &[0]);
        let m = maximal_element(&bd).unwrap();
        assert_eq!(m.grid()[0], vec![0; 6]);

        let bd = free_boundary(0, 3, &[0], &[7]);
        let m = maximal_element(&bd).unwrap();
        assert_eq!(m.grid()[0], vec![0, 7, 7, 7]);
    }

    #[test]
    fn maximal_element_reports_infeasible_spaces() {
        let bd = BoundaryData::new(
            0,
            2,
            sig(&[0]),
            sig(&[0]),
            Boundary::plus_infinity(0, 2),
            Boundary::level(0, 2, 5),
        )
        .unwrap();
        assert!(matches!(maximal_element(&bd), Err(Error::Infeasible(_))));
    }

    #[test]
    fn maximal_element_dominates_every_state() {
        let bd = free_boundary(0, 3, &[2, 0], &[4, 2]);
        let m = maximal_element(&bd).unwrap();
        for state in enumerate_states(&bd, 10_000).unwrap() {
            for (mr, sr) in m.grid().iter().zip(state.grid()) {
                for (a, b) in mr.iter().zip(sr) {
                    assert!(a >= b);
                }
            }
        }
    }

    #[test]
    fn glauber_bounds_examples() {
        let bd = free_boundary(0, 2, &[0], &[2]);
        let cfg = InterlacingConfig::from_grid(bd, vec![vec![0, 1, 2]]).unwrap();
        assert_eq!(glauber_bounds(&cfg, 0, 1).unwrap(), (0, 2));
        assert!(glauber_bounds(&cfg, 0, 0).is_err());
        assert!(glauber_bounds(&cfg, 0, 2).is_err());

        // Two stacked curves with the site pinned by its neighbours.
        let bd = free_boundary(0, 2, &[1, 1], &[5, 1]);
        let cfg = InterlacingConfig::from_grid(bd, vec![vec![1, 4, 5], vec![1, 1, 1]]).unwrap();
        assert_eq!(glauber_bounds(&cfg, 1, 1).unwrap(), (1, 1));
    }

    #[test]
    fn glauber_draw_floor_rule() {
        assert_eq!(glauber_draw(0, 2, 0.5), 1);
        assert_eq!(glauber_draw(0, 2, 0.999_999), 2);
        assert_eq!(glauber_draw(0, 2, 1e-9), 0);
        // The monotone-coupling witness: nested intervals, one variate.
        assert_eq!(glauber_draw(0, 2, 0.6), 1);
        assert_eq!(glauber_draw(1, 3, 0.6), 2);
    }

    #[test]
    fn pinned_sites_are_no_ops_and_boundary_sites_idle() {
        let bd = free_boundary(0, 2, &[1, 1], &[5, 1]);
        let cfg = InterlacingConfig::from_grid(bd.clone(), vec![vec![1, 4, 5], vec![1, 1, 1]])
            .unwrap();
        let mut chain = ChainState { config: cfg.clone(), step_count: 0, rng: derive_stream(0, 0) };
        chain.glauber_step((1, 1), 0.73);
        assert_eq!(chain.config.grid(), cfg.grid());
        chain.glauber_step((0, 0), 0.73);
        chain.glauber_step((0, 2), 0.73);
        assert_eq!(chain.config.grid(), cfg.grid());
        assert_eq!(chain.step_count, 3);
    }

    #[test]
    fn chain_states_stay_valid() {
        let bd = free_boundary(0, 4, &[3, 1], &[6, 3]);
        let mut chain = ChainState::new(&bd, derive_stream(31, 0)).unwrap();
        for _ in 0..2000 {
            chain.step_random();
        }
        chain.config.validate().unwrap();
    }

    #[test]
    fn run_chain_with_no_sweeps_emits_the_maximal_element() {
        let bd = free_boundary(0, 3, &[2, 0], &[4, 2]);
        let out = run_chain(
            &bd,
            ChainSchedule { sweeps: 0, burnin: 0, thin: 1 },
            derive_stream(32, 0),
        )
        .unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].grid(), maximal_element(&bd).unwrap().grid());
    }

    #[test]
    fn two_state_chain_reaches_the_uniform_law() {
        let bd = free_boundary(0, 2, &[0], &[1]);
        let states = enumerate_states(&bd, 100).unwrap();
        assert_eq!(states.len(), 2);
        let samples = run_chain(
            &bd,
            ChainSchedule { sweeps: 50_000, burnin: 200, thin: 5 },
            derive_stream(33, 0),
        )
        .unwrap();
        let hits = samples
            .iter()
            .filter(|c| c.grid() == states[0].grid())
            .count() as f64;
        let tv = (hits / samples.len() as f64 - 0.5).abs();
        assert!(tv < 0.02, "TV to uniform = {tv}");
    }

    #[test]
    fn enumeration_examples_and_cap() {
        let two = enumerate_states(&free_boundary(0, 2, &[0], &[1]), 100).unwrap();
        assert_eq!(two.len(), 2);
        let one = enumerate_states(&free_boundary(0, 2, &[0], &[0]), 100).unwrap();
        assert_eq!(one.len(), 1);
        let six = enumerate_states(&free_boundary(0, 3, &[0], &[2]), 100).unwrap();
        assert_eq!(six.len(), 6);
        assert!(matches!(
            enumerate_states(&free_boundary(0, 3, &[0], &[2]), 3),
            Err(Error::EnumerationCapExceeded { cap: 3 })
        ));
    }

    #[test]
    fn enumeration_respects_finite_boundaries() {
        let bd = BoundaryData::new(
            0,
            3,
            sig(&[1]),
            sig(&[3]),
            Boundary::plus_infinity(0, 3),
            Boundary::level(0, 3, 1),
        )
        .unwrap();
        let states = enumerate_states(&bd, 100).unwrap();
        // Paths 1→3 over three steps whose values stay ≥ 1 at the times
        // the shifted constraint reads: all of Ω(0,3,1,3) qualifies here.
        assert_eq!(states.len(), crate::lattice::enumerate_paths(0, 3, 1, 3).len());
        for s in &states {
            s.validate().unwrap();
        }
    }

    #[test]
    fn transition_matrix_one_state() {
        let m = transition_matrix(&free_boundary(0, 2, &[0], &[0]), 100).unwrap();
        assert_eq!(m.n(), 1);
        assert_eq!(m.entry(0, 0), Rational64::one());
    }

    #[test]
    fn transition_matrix_two_states_off_diagonal_is_one_sixth() {
        let m = transition_matrix(&free_boundary(0, 2, &[0], &[1]), 100).unwrap();
        assert_eq!(m.n(), 2);
        assert_eq!(m.entry(0, 1), Rational64::new(1, 6));
        assert_eq!(m.entry(1, 0), Rational64::new(1, 6));
        assert_eq!(m.entry(0, 0), Rational64::new(5, 6));
        assert!(m.rows_are_stochastic());
        assert!(m.is_symmetric());
        assert!(m.uniform_is_stationary());
        assert!(m.diagonal_is_positive());
        assert!(m.is_irreducible());
    }

    #[test]
    fn kernel_properties_hold_with_finite_lower_boundary() {
        let bd = BoundaryData::new(
            0,
            3,
            sig(&[3, 1]),
            sig(&[6, 3]),
            Boundary::plus_infinity(0, 3),
            Boundary::level(0, 3, 0),
        )
        .unwrap();
        let m = transition_matrix(&bd, 2000).unwrap();
        assert!(m.n() > 1);
        assert!(m.rows_are_stochastic());
        assert!(m.is_symmetric());
        assert!(m.uniform_is_stationary());
        assert!(m.diagonal_is_positive());
        assert!(m.is_irreducible());
    }

    #[test]
    fn identical_coupled_chains_stay_identical() {
        let bd = free_boundary(0, 4, &[3, 1], &[6, 3]);
        let mut coupled = CoupledChainState::new(&bd, &bd, derive_stream(34, 0)).unwrap();
        for _ in 0..1000 {
            coupled.coupled_step();
            assert_eq!(coupled.top.config.grid(), coupled.bottom.config.grid());
        }
    }

    #[test]
    fn shifted_boundary_keeps_strict_or_equal_order() {
        let bottom = free_boundary(0, 4, &[3, 1], &[6, 3]);
        let top = free_boundary(0, 4, &[4, 2], &[7, 4]);
        let mut coupled = CoupledChainState::new(&top, &bottom, derive_stream(35, 0)).unwrap();
        for step in 0..20_000 {
            coupled.coupled_step();
            if step % 500 == 0 {
                assert!(coupled.is_ordered());
            }
        }
        assert!(coupled.is_ordered());
    }

    #[test]
    fn coupling_rejects_finite_upper_boundary_and_unordered_pairs() {
        let mut bd = free_boundary(0, 2, &[1], &[2]);
        bd.f = Boundary::level(0, 2, 10);
        let free = free_boundary(0, 2, &[1], &[2]);
        assert!(CoupledChainState::new(&bd, &free, derive_stream(0, 0)).is_err());

        let lo = free_boundary(0, 2, &[0], &[1]);
        let hi = free_boundary(0, 2, &[1], &[2]);
        assert!(CoupledChainState::new(&lo, &hi, derive_stream(0, 0)).is_err());
        assert!(CoupledChainState::new(&hi, &lo, derive_stream(0, 0)).is_ok());
    }

    #[test]
    fn random_pairs_are_admissible_and_ordered() {
        let mut rng = derive_stream(36, 0);
        for trial in 0..40 {
            let k = 1 + (trial % 3);
            let (top, bottom) = random_ordered_boundary_pair(k, 0, 4, trial % 2 == 0, &mut rng);
            let mut coupled =
                CoupledChainState::new(&top, &bottom, derive_stream(37, trial as u64)).unwrap();
            for _ in 0..200 {
                coupled.coupled_step();
            }
            assert!(coupled.is_ordered());
            coupled.top.config.validate().unwrap();
            coupled.bottom.config.validate().unwrap();
        }
    }

    #[test]
    fn small_chain_empirical_law_matches_enumeration() {
        // Uniformity on a bigger instance than the two-state one.
        let bd = free_boundary(0, 3, &[1, 0], &[2, 1]);
        let states = enumerate_states(&bd, 10_000).unwrap();
        let samples = run_chain(
            &bd,
            ChainSchedule { sweeps: 60_000, burnin: 200, thin: 5 },
            derive_stream(38, 0),
        )
        .unwrap();
        let mut index: HashMap<&[Vec<i64>], usize> = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            index.insert(s.grid(), i);
        }
        let mut counts = vec![0u64; states.len()];
        for s in &samples {
            counts[index[s.grid()]] += 1;
        }
        let uniform = 1.0 / states.len() as f64;
        let tv: f64 = 0.5
            * counts
                .iter()
                .map(|&c| (c as f64 / samples.len() as f64 - uniform).abs())
                .sum::<f64>();
        assert!(tv < 0.02, "TV = {tv} over {} states", states.len());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn glauber_draw_is_monotone_in_nested_intervals(
            a in -5i64..5, span_b in 0i64..6, lift in 0i64..6, span_d in 0i64..6, u in 0f64..1.0
        ) {
            // b ≥ a, c ≥ a, d ≥ b, d ≥ c as in the coupling argument.
            let b = a + span_b;
            let c = a + lift;
            let d = b.max(c) + span_d;
            prop_assert!(glauber_draw(c, d, u) >= glauber_draw(a, b, u));
        }
    }
}
