//! Diffusive scaling transforms and empirical estimators for the
//! measurable events the theory quantifies, plus the statistical distances
//! (KS, chi-square, total variation) used by the oracles.
//!
//! The theory guarantees existence of constants (separation gaps, maximum
//! bounds, moduli) without numeric values, so the estimators here never
//! assert specific constants: they estimate event probabilities with
//! binomial standard errors and leave thresholds to their callers.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::brownian::ContinuousCurve;
use crate::lattice::{Boundary, ExtInt, IncreasingPath};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Diffusive scaling
// ---------------------------------------------------------------------------

/// Parameters of the diffusive scaling map: drift `p`, its derived noise
/// scale `σ = √(p(1+p))`, the horizon scale `d_N`, and the vertical
/// recentering `C_N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaleParams {
    pub p: f64,
    pub sigma: f64,
    pub d_n: f64,
    pub c_n: f64,
}

impl ScaleParams {
    pub fn new(p: f64, d_n: f64, c_n: f64) -> Result<Self> {
        if !(p > 0.0) {
            return Err(Error::InvalidParameter(format!("need p > 0, got {p}")));
        }
        if !(d_n > 0.0) {
            return Err(Error::InvalidParameter(format!("need d_N > 0, got {d_n}")));
        }
        Ok(Self { p, sigma: (p * (1.0 + p)).sqrt(), d_n, c_n })
    }

    /// Scales one raw value observed at absolute lattice time `s`.
    pub fn scale_value(&self, raw: f64, s: f64) -> f64 {
        (raw - self.p * s - self.c_n) / (self.sigma * self.d_n.sqrt())
    }

    /// Inverse of [`Self::scale_value`].
    pub fn unscale_value(&self, scaled: f64, s: f64) -> f64 {
        scaled * self.sigma * self.d_n.sqrt() + self.p * s + self.c_n
    }
}

/// A line ensemble after diffusive scaling: continuous curves in the time
/// variable `t = s / d_N`.
#[derive(Debug, Clone)]
pub struct ScaledEnsemble {
    pub curves: Vec<ContinuousCurve>,
    pub params: ScaleParams,
}

/// Applies the diffusive scaling map
/// `𝓛_i(t) = σ⁻¹ d_N^{-1/2} (L_i(t·d_N) - p·t·d_N - C_N)` to a stack of
/// discrete paths sharing one time interval, with linear interpolation
/// between lattice times.
pub fn diffusive_scale(paths: &[IncreasingPath], params: ScaleParams) -> Result<ScaledEnsemble> {
    if paths.is_empty() {
        return Err(Error::EmptySamples("diffusive_scale"));
    }
    let (t0, t1) = (paths[0].t0(), paths[0].t1());
    if paths.iter().any(|p| p.t0() != t0 || p.t1() != t1) {
        return Err(Error::MismatchedIntervals("scaled curves must share one domain".into()));
    }
    let mesh: Vec<f64> = (t0..=t1).map(|s| s as f64 / params.d_n).collect();
    let curves = paths
        .iter()
        .map(|p| {
            let values = (t0..=t1)
                .map(|s| params.scale_value(p.value(s) as f64, s as f64))
                .collect();
            ContinuousCurve::new(mesh.clone(), values)
        })
        .collect::<Result<_>>()?;
    Ok(ScaledEnsemble { curves, params })
}

// ---------------------------------------------------------------------------
// Distances and goodness of fit
// ---------------------------------------------------------------------------

/// Kolmogorov–Smirnov distance between the empirical CDF of `samples` and a
/// reference CDF.
pub fn ks_distance(samples: &[f64], reference_cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySamples("ks_distance"));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("NaN in KS samples"));
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = reference_cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok(d)
}

/// KS distance against a normal reference with the given mean and
/// standard deviation.
pub fn ks_distance_normal(samples: &[f64], mean: f64, sd: f64) -> Result<f64> {
    if !(sd > 0.0) {
        return Err(Error::InvalidParameter(format!("need sd > 0, got {sd}")));
    }
    let normal = statrs::distribution::Normal::new(mean, sd)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    ks_distance(samples, |x| normal.cdf(x))
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_distance_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySamples("ks_distance_two_sample"));
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|u, v| u.partial_cmp(v).expect("NaN in KS samples"));
    ys.sort_by(|u, v| u.partial_cmp(v).expect("NaN in KS samples"));
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < xs.len() && j < ys.len() {
        let t = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= t {
            i += 1;
        }
        while j < ys.len() && ys[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Total variation distance between two probability vectors over the same
/// support: `½ Σ |p_i - q_i|`.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len(), "TV needs a shared support");
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// A chi-square goodness-of-fit verdict.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GofTest {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Pearson chi-square test of observed counts against expected counts.
pub fn chi_square_gof(observed: &[u64], expected: &[f64]) -> Result<GofTest> {
    if observed.len() != expected.len() || observed.is_empty() {
        return Err(Error::InvalidParameter(
            "observed and expected must be nonempty and of equal length".into(),
        ));
    }
    if expected.iter().any(|&e| e <= 0.0) {
        return Err(Error::InvalidParameter("expected counts must be positive".into()));
    }
    let statistic: f64 = observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum();
    let df = observed.len() - 1;
    let dist = ChiSquared::new(df as f64)
        .map_err(|e| Error::InvalidParameter(format!("chi-square df: {e}")))?;
    Ok(GofTest { statistic, df, p_value: 1.0 - dist.cdf(statistic) })
}

// ---------------------------------------------------------------------------
// Event estimators
// ---------------------------------------------------------------------------

/// An empirical event-probability estimate with its binomial standard
/// error and an echo of the configuration that produced it.
#[derive(Debug, Clone, Serialize)]
pub struct StatReport {
    pub name: String,
    pub estimate: f64,
    pub n: usize,
    pub std_error: f64,
    pub config: String,
}

impl StatReport {
    /// Builds a report for an event observed `hits` times in `n` trials.
    pub fn event(name: impl Into<String>, hits: usize, n: usize, config: impl Into<String>) -> Self {
        let p = hits as f64 / n as f64;
        Self {
            name: name.into(),
            estimate: p,
            n,
            std_error: (p * (1.0 - p) / n as f64).sqrt(),
            config: config.into(),
        }
    }
}

/// Empirical probability that a scaled one-point value lies in
/// `[a - δ, a + δ]` — the bulk-concentration event.
pub fn concentration_probability(samples: &[f64], a: f64, delta: f64) -> Result<StatReport> {
    if samples.is_empty() {
        return Err(Error::EmptySamples("concentration_probability"));
    }
    let hits = samples.iter().filter(|&&v| (v - a).abs() <= delta).count();
    Ok(StatReport::event(
        "concentration",
        hits,
        samples.len(),
        format!("a={a} delta={delta}"),
    ))
}

/// Empirical probability that the bottom curve at time `⌊t0·n⌋` clears the
/// recentered lower boundary by `δ_sep·√n` over the whole window
/// `ℤ ∩ [t0·n - Δ·n, t0·n + Δ·n]` — the separation event.
///
/// `bottom_paths` are observations of the `k`-th (bottom) curve; their
/// shared domain `⟦0, n⟧` determines `n`.
pub fn separation_probability(
    bottom_paths: &[IncreasingPath],
    g: &Boundary,
    t0_frac: f64,
    delta_sep: f64,
    window_frac: f64,
    p: f64,
) -> Result<StatReport> {
    if bottom_paths.is_empty() {
        return Err(Error::EmptySamples("separation_probability"));
    }
    let path0 = &bottom_paths[0];
    let n = (path0.t1() - path0.t0()) as f64;
    let base = path0.t0();
    let center = base + (t0_frac * n).floor() as i64;
    let lo = base + ((t0_frac - window_frac) * n).ceil() as i64;
    let hi = base + ((t0_frac + window_frac) * n).floor() as i64;
    if lo < path0.t0() || hi > path0.t1() || lo < g.t0() || hi > g.t1() {
        return Err(Error::WindowOutsideHorizon(format!(
            "window ⟦{lo}, {hi}⟧ vs horizon ⟦{}, {}⟧",
            path0.t0(),
            path0.t1()
        )));
    }
    let slack = delta_sep * n.sqrt();
    let mut hits = 0usize;
    for path in bottom_paths {
        if path.t0() != path0.t0() || path.t1() != path0.t1() {
            return Err(Error::MismatchedIntervals("separation samples must share one horizon".into()));
        }
        let lhs = path.value(center) as f64 - p * center as f64;
        let ok = (lo..=hi).all(|s| match g.value(s) {
            ExtInt::NegInf => true,
            ExtInt::Finite(gv) => lhs >= gv as f64 - p * s as f64 + slack,
            ExtInt::PosInf => false,
        });
        if ok {
            hits += 1;
        }
    }
    Ok(StatReport::event(
        "separation",
        hits,
        bottom_paths.len(),
        format!("t0={t0_frac} delta_sep={delta_sep} window={window_frac} p={p}"),
    ))
}

/// Empirical tail probabilities of the recentered running maximum of the
/// top curve: `P(max_{t ∈ [a,b]} (L(t·d_N) - p·t·d_N) ≥ √d_N · M)` for each
/// threshold `M`. The maximum of the piecewise-linear recentered path is
/// attained at lattice times or the window ends, so it is computed exactly.
pub fn max_statistic(
    top_paths: &[IncreasingPath],
    a: f64,
    b: f64,
    p: f64,
    d_n: f64,
    thresholds: &[f64],
) -> Result<Vec<StatReport>> {
    if top_paths.is_empty() {
        return Err(Error::EmptySamples("max_statistic"));
    }
    if !(a < b) {
        return Err(Error::InvalidParameter(format!("need a < b, got {a} ≥ {b}")));
    }
    let (lo, hi) = (a * d_n, b * d_n);
    let mut maxima = Vec::with_capacity(top_paths.len());
    for path in top_paths {
        if lo < path.t0() as f64 || hi > path.t1() as f64 {
            return Err(Error::WindowOutsideHorizon(format!(
                "[{lo}, {hi}] vs path ⟦{}, {}⟧",
                path.t0(),
                path.t1()
            )));
        }
        let mut m = (path.interp(lo) - p * lo).max(path.interp(hi) - p * hi);
        let mut s = lo.ceil() as i64;
        while (s as f64) <= hi {
            m = m.max(path.value(s) as f64 - p * s as f64);
            s += 1;
        }
        maxima.push(m);
    }
    let scale = d_n.sqrt();
    Ok(thresholds
        .iter()
        .map(|&t| {
            let hits = maxima.iter().filter(|&&m| m >= scale * t).count();
            StatReport::event(
                "max-tail",
                hits,
                maxima.len(),
                format!("a={a} b={b} p={p} d_n={d_n} M={t}"),
            )
        })
        .collect())
}

/// Empirical probability that the modulus of continuity exceeds `ε` at
/// scale `δ`, over a family of scaled curves.
pub fn modulus_tail(curves: &[ContinuousCurve], delta: f64, epsilon: f64) -> Result<StatReport> {
    if curves.is_empty() {
        return Err(Error::EmptySamples("modulus_tail"));
    }
    let hits = curves
        .iter()
        .filter(|c| crate::brownian::modulus_of_continuity(c, delta) > epsilon)
        .count();
    Ok(StatReport::event(
        "modulus-tail",
        hits,
        curves.len(),
        format!("delta={delta} epsilon={epsilon}"),
    ))
}

/// Per-scale dispersion summary used as the one-point tightness diagnostic.
#[derive(Debug, Clone, Serialize)]
pub struct TightnessRow {
    pub label: f64,
    pub n: usize,
    pub iqr: f64,
    pub q05: f64,
    pub q95: f64,
}

/// Interquartile ranges and tail quantiles of one-point samples across a
/// family of scales, plus the ratio of the largest to smallest IQR.
#[derive(Debug, Clone, Serialize)]
pub struct TightnessReport {
    pub rows: Vec<TightnessRow>,
    pub iqr_ratio: f64,
}

/// Linear-interpolation quantile of a sorted slice.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let q = q.clamp(0.0, 1.0);
    let idx = q * (sorted.len() - 1) as f64;
    let lo = idx.floor() as usize;
    let hi = idx.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] * (hi as f64 - idx) + sorted[hi] * (idx - lo as f64)
    }
}

/// Builds the tightness diagnostic from `(label, samples)` groups — one
/// group per scale parameter.
pub fn tightness_report(groups: &[(f64, Vec<f64>)]) -> Result<TightnessReport> {
    if groups.len() < 2 {
        return Err(Error::InvalidParameter(
            "tightness diagnostic needs at least two scales".into(),
        ));
    }
    let mut rows = Vec::with_capacity(groups.len());
    for (label, samples) in groups {
        if samples.is_empty() {
            return Err(Error::EmptySamples("tightness_report"));
        }
        let mut xs = samples.clone();
        xs.sort_by(|a, b| a.partial_cmp(b).expect("NaN in tightness samples"));
        rows.push(TightnessRow {
            label: *label,
            n: xs.len(),
            iqr: quantile(&xs, 0.75) - quantile(&xs, 0.25),
            q05: quantile(&xs, 0.05),
            q95: quantile(&xs, 0.95),
        });
    }
    let max = rows.iter().map(|r| r.iqr).fold(f64::NEG_INFINITY, f64::max);
    let min = rows.iter().map(|r| r.iqr).fold(f64::INFINITY, f64::min);
    Ok(TightnessReport { rows, iqr_ratio: max / min })
}
