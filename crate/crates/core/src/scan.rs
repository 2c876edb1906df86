//! One-parameter bifurcation scans: integrate past a transient at each grid
//! value, sample one component over a window and summarize the attractor.

use std::fmt;

use rayon::prelude::*;

use crate::dde::{integrate, HistoryFunction, Trajectory};
use crate::error::{Error, Result};
use crate::model::{Component, ModelParams, ParamId, State};

/// Relative tolerance for merging extrema into one cluster.
pub const CLUSTER_TOLERANCE: f64 = 1e-4;
/// Relative spread below which samples count as a steady state.
pub const STEADY_TOLERANCE: f64 = 1e-6;
/// Cluster count from which an attractor is reported as dense.
pub const DENSE_CLUSTERS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sampler {
    /// Local extrema of the dense output.
    Extrema,
    /// Values at `t_transient + k·period`.
    Strobe { period: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub vary: ParamId,
    pub lo: f64,
    pub hi: f64,
    pub n_points: usize,
    pub t_transient: f64,
    pub t_sample: f64,
    pub observable: Component,
    pub sampler: Sampler,
    /// Constant initial function.
    pub history: State,
    /// Integration step; the model default when `None`.
    pub step: Option<f64>,
    /// Worker threads; 0 lets rayon decide.
    pub threads: usize,
}

impl ScanConfig {
    pub fn new(vary: ParamId, lo: f64, hi: f64, n_points: usize, history: State) -> Self {
        ScanConfig {
            vary,
            lo,
            hi,
            n_points,
            t_transient: 300.0,
            t_sample: 200.0,
            observable: Component::S,
            sampler: Sampler::Extrema,
            history,
            step: None,
            threads: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return bad(format!(
                "scan range must satisfy lo < hi, got [{}, {}]",
                self.lo, self.hi
            ));
        }
        if self.n_points < 2 {
            return bad(format!(
                "n_points must be at least 2, got {}",
                self.n_points
            ));
        }
        if !(self.t_transient > 0.0 && self.t_transient.is_finite()) {
            return bad(format!(
                "transient horizon must be positive, got {}",
                self.t_transient
            ));
        }
        if !(self.t_sample > 0.0 && self.t_sample.is_finite()) {
            return bad(format!(
                "sampling horizon must be positive, got {}",
                self.t_sample
            ));
        }
        if let Sampler::Strobe { period } = self.sampler {
            if !(period > 0.0 && period.is_finite()) {
                return bad(format!("strobe period must be positive, got {period}"));
            }
        }
        if !self.history.is_finite() {
            return bad(format!("history must be finite, got {:?}", self.history));
        }
        Ok(())
    }

    /// Grid values `lo + i·(hi − lo)/(n − 1)`, ending exactly at `hi`.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.n_points;
        let dx = (self.hi - self.lo) / (n - 1) as f64;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.hi
                } else {
                    self.lo + i as f64 * dx
                }
            })
            .collect()
    }

    fn window(&self) -> (f64, f64) {
        (self.t_transient, self.t_transient + self.t_sample)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttractorKind {
    Steady,
    /// A cycle with this many distinct extremum values.
    Periodic(usize),
    /// At least [`DENSE_CLUSTERS`] distinct values.
    Dense(usize),
}

impl fmt::Display for AttractorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttractorKind::Steady => f.write_str("steady"),
            AttractorKind::Periodic(k) => write!(f, "periodic({k})"),
            AttractorKind::Dense(k) => write!(f, "dense({k})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointSummary {
    pub samples: Vec<f64>,
    pub kind: AttractorKind,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanPoint {
    pub value: f64,
    pub outcome: std::result::Result<PointSummary, Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub vary: ParamId,
    pub observable: Component,
    pub points: Vec<ScanPoint>,
}

impl ScanResult {
    pub fn failures(&self) -> usize {
        self.points.iter().filter(|p| p.outcome.is_err()).count()
    }

    /// Range of the observable over all successful points.
    pub fn range(&self) -> Option<(f64, f64)> {
        self.points
            .iter()
            .filter_map(|p| p.outcome.as_ref().ok())
            .map(|s| (s.min, s.max))
            .reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)))
    }
}

/// Local extrema of component `k` strictly inside `window`, as `(t, value)`.
///
/// On each mesh interval the Hermite interpolant's derivative is a quadratic
/// in the local coordinate; its sign-changing roots are the extrema. Intervals
/// whose derivative sits at rounding level are skipped.
pub fn extrema<const N: usize>(
    traj: &Trajectory<N>,
    k: usize,
    window: (f64, f64),
) -> Vec<(f64, f64)> {
    let (ta, tb) = window;
    let times = traj.times();
    let states = traj.states();
    let derivs = traj.derivatives();
    let mut out = Vec::new();
    let first = times.partition_point(|&t| t <= ta).saturating_sub(1);
    for i in first..times.len().saturating_sub(1) {
        let (t0, t1) = (times[i], times[i + 1]);
        if t0 >= tb {
            break;
        }
        let h = t1 - t0;
        let (x0, x1) = (states[i][k], states[i + 1][k]);
        let (f0, f1) = (derivs[i][k], derivs[i + 1][k]);
        let floor = 1e-10 * 0.5 * (x0.abs() + x1.abs());
        let slope = (x1 - x0) / h;
        if f0.abs().max(f1.abs()).max(slope.abs()) <= floor {
            continue;
        }
        // derivative = A θ² + B θ + C on θ ∈ [0, 1]
        let delta = (x0 - x1) / h;
        let qa = 6.0 * delta + 3.0 * f0 + 3.0 * f1;
        let qb = -6.0 * delta - 4.0 * f0 - 2.0 * f1;
        let qc = f0;
        for theta in quadratic_roots(qa, qb, qc) {
            if theta > 0.0 && theta <= 1.0 {
                let t = t0 + theta * h;
                if t > ta && t < tb {
                    let value = traj.eval(t).map(|x| x[k]).unwrap_or(f64::NAN);
                    out.push((t, value));
                }
            }
        }
    }
    out
}

/// Real roots of `a x² + b x + c` where the sign changes, in increasing order.
fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return Vec::new();
    }
    if a.abs() <= 1e-12 * scale {
        return if b != 0.0 { vec![-c / b] } else { Vec::new() };
    }
    let disc = b * b - 4.0 * a * c;
    if disc <= 0.0 {
        return Vec::new();
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let mut roots = vec![q / a, if q != 0.0 { c / q } else { 0.0 }];
    roots.sort_by(f64::total_cmp);
    roots
}

/// Number of clusters among `values` with relative tolerance `tol`.
pub fn cluster_count(values: &[f64], tol: f64) -> usize {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut count = 0;
    let mut anchor = f64::NAN;
    for v in sorted {
        if count == 0 || v - anchor > tol * anchor.abs().max(v.abs()).max(1e-300) {
            count += 1;
            anchor = v;
        }
    }
    count
}

/// Classifies samples, collapsing a steady state to `terminal`.
pub fn classify(samples: &[f64], terminal: f64) -> (AttractorKind, Vec<f64>) {
    if samples.is_empty() {
        return (AttractorKind::Steady, vec![terminal]);
    }
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let scale = lo.abs().max(hi.abs()).max(1e-12);
    if hi - lo <= STEADY_TOLERANCE * scale {
        return (AttractorKind::Steady, vec![terminal]);
    }
    let k = cluster_count(samples, CLUSTER_TOLERANCE);
    let kind = if k >= DENSE_CLUSTERS {
        AttractorKind::Dense(k)
    } else {
        AttractorKind::Periodic(k)
    };
    (kind, samples.to_vec())
}

fn scan_point(
    p: &ModelParams,
    cfg: &ScanConfig,
    value: f64,
) -> std::result::Result<PointSummary, Error> {
    let p = p.with(cfg.vary, value)?;
    let (ta, tb) = cfg.window();
    let traj = integrate(&p, HistoryFunction::from(cfg.history), tb, cfg.step)?.into_result()?;
    let k = cfg.observable.index();
    let terminal = traj.last_state()[k];
    let raw: Vec<f64> = match cfg.sampler {
        Sampler::Extrema => extrema(&traj, k, (ta, tb))
            .into_iter()
            .map(|(_, v)| v)
            .collect(),
        Sampler::Strobe { period } => {
            let n = ((tb - ta) / period * (1.0 + 1e-12)).floor() as usize;
            let grid: Vec<f64> = (1..=n).map(|j| ta + j as f64 * period).collect();
            traj.sample(&grid)?.into_iter().map(|x| x[k]).collect()
        }
    };
    if let Some(bad) = raw.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite sample {bad}")));
    }
    let (kind, samples) = classify(&raw, terminal);
    let (min, max) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    Ok(PointSummary {
        samples,
        kind,
        min,
        max,
    })
}

/// Runs the scan. Grid points are independent and are evaluated in parallel;
/// the result is in grid order regardless of scheduling.
pub fn scan(p: &ModelParams, cfg: &ScanConfig) -> Result<ScanResult> {
    cfg.validate()?;
    let (plo, phi) = cfg.vary.plausible_range();
    if cfg.lo < plo || cfg.hi > phi {
        log::warn!(
            "scan range [{}, {}] for {} leaves the plausible range [{plo}, {phi}]",
            cfg.lo,
            cfg.hi,
            cfg.vary
        );
    }
    let grid = cfg.grid();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let points = pool.install(|| {
        grid.par_iter()
            .map(|&value| {
                let outcome = scan_point(p, cfg, value);
                if let Err(e) = &outcome {
                    log::warn!("{} = {value}: {e}", cfg.vary);
                }
                ScanPoint { value, outcome }
            })
            .collect()
    });
    Ok(ScanResult {
        vary: cfg.vary,
        observable: cfg.observable,
        points,
    })
}
