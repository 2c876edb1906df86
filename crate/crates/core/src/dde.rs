//! Fixed-step RK4 for systems with one constant delay, by the method of steps.
//!
//! The step is aligned so that `τ` is an integer multiple of it. Every lagged
//! argument then falls on a mesh point or a mesh midpoint, where a cubic
//! Hermite interpolant of the computed solution keeps fourth-order accuracy.

use crate::error::{Error, Result};
use crate::model::{omega_box, vector_field, ModelParams, State};

/// A right-hand side `x'(t) = f(t, x(t), x(t − τ))`.
pub trait DelaySystem<const N: usize> {
    fn delay(&self) -> f64;
    fn eval(&self, t: f64, current: [f64; N], lagged: [f64; N]) -> [f64; N];
}

impl DelaySystem<3> for ModelParams {
    fn delay(&self) -> f64 {
        self.tau
    }

    fn eval(&self, _t: f64, current: [f64; 3], lagged: [f64; 3]) -> [f64; 3] {
        vector_field(current.into(), lagged.into(), self).to_array()
    }
}

/// Initial function on `[t₀ − τ, t₀]`.
pub enum HistoryFunction<const N: usize> {
    Constant([f64; N]),
    Function(Box<dyn Fn(f64) -> [f64; N] + Send + Sync>),
}

impl<const N: usize> HistoryFunction<N> {
    pub fn eval(&self, t: f64) -> [f64; N] {
        match self {
            HistoryFunction::Constant(x) => *x,
            HistoryFunction::Function(f) => f(t),
        }
    }
}

impl<const N: usize> std::fmt::Debug for HistoryFunction<N> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HistoryFunction::Constant(x) => f.debug_tuple("Constant").field(x).finish(),
            HistoryFunction::Function(_) => f.write_str("Function(..)"),
        }
    }
}

impl From<State> for HistoryFunction<3> {
    fn from(x: State) -> Self {
        HistoryFunction::Constant(x.to_array())
    }
}

/// Mesh values and derivatives of a computed solution, with cubic Hermite
/// dense output between mesh points and the history before `t₀`.
#[derive(Debug)]
pub struct Trajectory<const N: usize> {
    history: HistoryFunction<N>,
    times: Vec<f64>,
    states: Vec<[f64; N]>,
    derivatives: Vec<[f64; N]>,
}

impl<const N: usize> Trajectory<N> {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[[f64; N]] {
        &self.states
    }

    pub fn derivatives(&self) -> &[[f64; N]] {
        &self.derivatives
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        *self
            .times
            .last()
            .expect("trajectory has at least one point")
    }

    pub fn last_state(&self) -> [f64; N] {
        *self
            .states
            .last()
            .expect("trajectory has at least one point")
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Solution value at `t`, from the history when `t < t₀`.
    pub fn eval(&self, t: f64) -> Result<[f64; N]> {
        if t < self.start() {
            return Ok(self.history.eval(t));
        }
        if t > self.end() || t.is_nan() {
            return Err(Error::OutOfSpan {
                time: t,
                start: self.start(),
                end: self.end(),
            });
        }
        Ok(self.interpolate(t))
    }

    /// Values at each time of `grid`.
    pub fn sample(&self, grid: &[f64]) -> Result<Vec<[f64; N]>> {
        grid.iter().map(|&t| self.eval(t)).collect()
    }

    /// Hermite interpolation inside the computed span.
    fn interpolate(&self, t: f64) -> [f64; N] {
        let i = self.segment_index(t);
        if i + 1 == self.times.len() {
            return self.states[i];
        }
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let h = t1 - t0;
        let th = (t - t0) / h;
        let th2 = th * th;
        let th3 = th2 * th;
        let h00 = 2.0 * th3 - 3.0 * th2 + 1.0;
        let h10 = th3 - 2.0 * th2 + th;
        let h01 = -2.0 * th3 + 3.0 * th2;
        let h11 = th3 - th2;
        let (x0, x1) = (&self.states[i], &self.states[i + 1]);
        let (f0, f1) = (&self.derivatives[i], &self.derivatives[i + 1]);
        std::array::from_fn(|k| h00 * x0[k] + h10 * h * f0[k] + h01 * x1[k] + h11 * h * f1[k])
    }

    /// Index `i` with `times[i] ≤ t < times[i+1]`, or the last index.
    fn segment_index(&self, t: f64) -> usize {
        self.times
            .partition_point(|&s| s <= t)
            .saturating_sub(1)
            .min(self.times.len() - 1)
    }

    fn lagged(&self, t: f64) -> [f64; N] {
        if t < self.start() {
            self.history.eval(t)
        } else {
            self.interpolate(t.min(self.end()))
        }
    }
}

impl Trajectory<3> {
    pub fn state_at(&self, t: f64) -> Result<State> {
        self.eval(t).map(State::from)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Requested step, see [`aligned_step`].
    pub step: f64,
    /// Integration stops when the state norm exceeds this or turns non-finite.
    pub blowup_norm: f64,
}

impl SolverOptions {
    pub fn with_step(step: f64) -> Self {
        SolverOptions {
            step,
            blowup_norm: 1e12,
        }
    }
}

/// Outcome of an integration: the computed trajectory and, if the solution
/// diverged, the time it was detected.
#[derive(Debug)]
pub struct Integration<const N: usize> {
    pub trajectory: Trajectory<N>,
    pub blow_up: Option<f64>,
}

impl<const N: usize> Integration<N> {
    /// The trajectory, or [`Error::BlowUp`] if integration stopped early.
    pub fn into_result(self) -> Result<Trajectory<N>> {
        match self.blow_up {
            Some(time) => Err(Error::BlowUp { time }),
            None => Ok(self.trajectory),
        }
    }
}

/// Step actually used for a requested step and delay: `τ/⌈τ/h⌉`, so the
/// mesh hits every lag. A step longer than a positive delay is rejected.
pub fn aligned_step(step: f64, tau: f64) -> Result<f64> {
    let valid = step > 0.0 && step.is_finite() && tau >= 0.0 && tau.is_finite();
    if !valid || (tau > 0.0 && step > tau * (1.0 + 1e-12)) {
        return Err(Error::InvalidStep { step, tau });
    }
    if tau == 0.0 {
        return Ok(step);
    }
    let n = (tau / step * (1.0 - 1e-12)).ceil().max(1.0);
    Ok(tau / n)
}

fn norm<const N: usize>(x: &[f64; N]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn axpy<const N: usize>(x: &[f64; N], a: f64, k: &[f64; N]) -> [f64; N] {
    std::array::from_fn(|i| x[i] + a * k[i])
}

/// Integrates `sys` from `t0` to `t_end` with initial function `history`.
pub fn solve<const N: usize, S: DelaySystem<N> + ?Sized>(
    sys: &S,
    history: HistoryFunction<N>,
    t0: f64,
    t_end: f64,
    options: SolverOptions,
) -> Result<Integration<N>> {
    let tau = sys.delay();
    let h = aligned_step(options.step, tau)?;
    if !(t0.is_finite() && t_end.is_finite() && t_end >= t0) {
        return Err(Error::InvalidInput(format!(
            "integration span must be finite and ordered, got [{t0}, {t_end}]"
        )));
    }

    let x0 = history.eval(t0);
    let lag0 = if tau == 0.0 {
        x0
    } else {
        history.eval(t0 - tau)
    };
    let span = t_end - t0;
    let full_steps = (span / h * (1.0 + 1e-12)).floor() as usize;
    let capacity = full_steps + 2;
    let mut traj = Trajectory {
        history,
        times: Vec::with_capacity(capacity),
        states: Vec::with_capacity(capacity),
        derivatives: Vec::with_capacity(capacity),
    };
    traj.times.push(t0);
    traj.states.push(x0);
    traj.derivatives.push(sys.eval(t0, x0, lag0));
    if !x0.iter().all(|v| v.is_finite()) || norm(&x0) > options.blowup_norm {
        return Ok(Integration {
            trajectory: traj,
            blow_up: Some(t0),
        });
    }

    // mesh t₀ + k·h, snapped to t_end when within rounding, plus one short
    // final step if t_end is not on the mesh
    let mut targets: Vec<f64> = (1..=full_steps).map(|k| t0 + k as f64 * h).collect();
    if let Some(last) = targets.last_mut() {
        if (t_end - *last).abs() <= 1e-9 * h {
            *last = t_end;
        }
    }
    if span > 0.0 && targets.last().is_none_or(|&t| t < t_end) {
        targets.push(t_end);
    }

    let stage = |traj: &Trajectory<N>, ts: f64, xs: [f64; N]| {
        let lag = if tau == 0.0 {
            xs
        } else {
            traj.lagged(ts - tau)
        };
        sys.eval(ts, xs, lag)
    };
    for t_next in targets {
        let t = traj.end();
        let hs = t_next - t;
        let x = traj.last_state();
        let k1 = *traj.derivatives.last().expect("non-empty");
        let x2 = axpy(&x, 0.5 * hs, &k1);
        let k2 = stage(&traj, t + 0.5 * hs, x2);
        let x3 = axpy(&x, 0.5 * hs, &k2);
        let k3 = stage(&traj, t + 0.5 * hs, x3);
        let x4 = axpy(&x, hs, &k3);
        let k4 = stage(&traj, t_next, x4);
        let x_next: [f64; N] =
            std::array::from_fn(|i| x[i] + hs / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));

        if !x_next.iter().all(|v| v.is_finite()) || norm(&x_next) > options.blowup_norm {
            log::debug!("integration diverged at t = {t_next}");
            return Ok(Integration {
                trajectory: traj,
                blow_up: Some(t_next),
            });
        }
        // hs ≤ τ, so the lag of the new point is already covered
        let f_next = stage(&traj, t_next, x_next);
        traj.times.push(t_next);
        traj.states.push(x_next);
        traj.derivatives.push(f_next);
    }
    Ok(Integration {
        trajectory: traj,
        blow_up: None,
    })
}

/// Default step for the model: `min(τ/40, 0.01, 1/L)` aligned to `τ`, where
/// `L = 2·max ξ·(w_max + g_max + s_max) + a + r + b + c` bounds the Jacobian.
pub fn default_step(p: &ModelParams) -> f64 {
    let bx = omega_box(p);
    let xi = p.xi1.max(p.xi2).max(p.xi3);
    let l = 2.0 * xi * bx.max_total() + p.a + p.r + p.b + p.c;
    let mut h = 0.01_f64.min(1.0 / l);
    if p.tau > 0.0 {
        h = h.min(p.tau / 40.0);
        h = p.tau / (p.tau / h).ceil();
    }
    h
}

/// Integrates the model on `[0, t_end]` with the default step unless `step`
/// is given.
pub fn integrate(
    p: &ModelParams,
    history: HistoryFunction<3>,
    t_end: f64,
    step: Option<f64>,
) -> Result<Integration<3>> {
    let step = step.unwrap_or_else(|| default_step(p));
    solve(p, history, 0.0, t_end, SolverOptions::with_step(step))
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Decay;

    impl DelaySystem<1> for Decay {
        fn delay(&self) -> f64 {
            1.0
        }
        fn eval(&self, _t: f64, _x: [f64; 1], lagged: [f64; 1]) -> [f64; 1] {
            [-lagged[0]]
        }
    }

    struct Ode;

    impl DelaySystem<1> for Ode {
        fn delay(&self) -> f64 {
            0.0
        }
        fn eval(&self, _t: f64, x: [f64; 1], _lagged: [f64; 1]) -> [f64; 1] {
            [-x[0]]
        }
    }

    #[test]
    fn step_alignment() {
        assert_eq!(aligned_step(0.3, 1.0).unwrap(), 0.25);
        assert_eq!(aligned_step(0.25, 1.0).unwrap(), 0.25);
        assert_eq!(aligned_step(1.0, 1.0).unwrap(), 1.0);
        assert!(matches!(
            aligned_step(2.0, 1.0),
            Err(Error::InvalidStep { .. })
        ));
        assert_eq!(aligned_step(0.3, 0.0).unwrap(), 0.3);
        assert!(aligned_step(0.0, 1.0).is_err());
        assert!(aligned_step(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn first_interval_is_exact() {
        // on [0, 1] the solution is 1 − t, which RK4 reproduces exactly
        let sol = solve(
            &Decay,
            HistoryFunction::Constant([1.0]),
            0.0,
            1.0,
            SolverOptions::with_step(0.1),
        )
        .unwrap()
        .into_result()
        .unwrap();
        assert!((sol.end() - 1.0).abs() < 1e-15);
        for (t, x) in sol.times().iter().zip(sol.states()) {
            assert!((x[0] - (1.0 - t)).abs() < 1e-14);
        }
    }

    #[test]
    fn ode_limit_matches_exponential() {
        let sol = solve(
            &Ode,
            HistoryFunction::Constant([1.0]),
            0.0,
            2.0,
            SolverOptions::with_step(0.01),
        )
        .unwrap()
        .into_result()
        .unwrap();
        assert!((sol.last_state()[0] - (-2.0f64).exp()).abs() < 1e-10);
        let mid = sol.eval(1.005).unwrap()[0];
        assert!((mid - (-1.005f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn final_step_lands_on_end() {
        let sol = solve(
            &Ode,
            HistoryFunction::Constant([1.0]),
            0.0,
            1.05,
            SolverOptions::with_step(0.1),
        )
        .unwrap()
        .trajectory;
        assert_eq!(sol.end(), 1.05);
        assert_eq!(sol.len(), 12);
    }

    #[test]
    fn history_before_start_and_out_of_span() {
        let hist = HistoryFunction::Function(Box::new(|t: f64| [1.0 + t]));
        let sol = solve(&Decay, hist, 0.0, 1.0, SolverOptions::with_step(0.1))
            .unwrap()
            .trajectory;
        assert_eq!(sol.eval(-0.5).unwrap(), [0.5]);
        assert!(matches!(sol.eval(1.5), Err(Error::OutOfSpan { .. })));
    }

    struct Explode;

    impl DelaySystem<1> for Explode {
        fn delay(&self) -> f64 {
            0.0
        }
        fn eval(&self, _t: f64, x: [f64; 1], _lagged: [f64; 1]) -> [f64; 1] {
            [x[0] * x[0]]
        }
    }

    #[test]
    fn blow_up_keeps_partial_trajectory() {
        // x' = x² with x(0) = 1 diverges at t = 1
        let out = solve(
            &Explode,
            HistoryFunction::Constant([1.0]),
            0.0,
            2.0,
            SolverOptions::with_step(1e-3),
        )
        .unwrap();
        let time = out.blow_up.expect("diverges");
        assert!(time > 0.9 && time < 1.1, "{time}");
        assert!(out.trajectory.end() < time);
        assert!(matches!(out.into_result(), Err(Error::BlowUp { .. })));
    }

    #[test]
    fn default_step_is_aligned_and_capped() {
        let p = ModelParams::new(18.0, 35.0, 0.19, 0.99, 0.02, 1.5, 0.1, 0.7).unwrap();
        let h = default_step(&p);
        assert!(h <= 0.01);
        let n = 0.7 / h;
        assert!((n - n.round()).abs() < 1e-9);
    }
}
