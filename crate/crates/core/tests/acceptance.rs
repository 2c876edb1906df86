//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use sitdde_core::dde::{solve, DelaySystem, HistoryFunction, SolverOptions};
use sitdde_core::equilibria::{boundary_equilibrium, find_equilibria};
use sitdde_core::linearization::{expansion_coefficients, jacobians};
use sitdde_core::model::in_omega;
use sitdde_core::spectral::{
    characteristic, residual_tolerance, CrossingDirection, TRIG_TOLERANCE,
};
use sitdde_core::{
    analyze, integrate, linearize, omega_box, scan, AttractorKind, Component, ModelParams, ParamId,
    ScanConfig, State,
};

use common::*;

/// Outcome of one criterion: pass/fail and a one-line detail.
type Check = (bool, String);

fn reference_equilibrium() -> Check {
    let start = Instant::now();
    let summary = find_equilibria(&reference_params(0.0)).unwrap();
    let elapsed = start.elapsed();
    let [eq] = summary.positive.as_slice() else {
        return (
            false,
            format!(
                "expected one positive equilibrium, got {}",
                summary.positive.len()
            ),
        );
    };
    let n = eq.total.unwrap();
    let x = eq.location;
    let expected = [898.943, 0.0259267, 0.00263897];
    // 4 significant digits: relative difference below 5e-4
    let digits_ok = x
        .to_array()
        .iter()
        .zip(expected)
        .all(|(v, e)| ((v - e) / e).abs() < 5e-4);
    let ok = (n - 898.972).abs() <= 1e-3 && digits_ok && elapsed < Duration::from_secs(1);
    (
        ok,
        format!(
            "N = {n:.6}, E* = ({:.6}, {:.7}, {:.8}), {elapsed:.2?}",
            x.w, x.g, x.s
        ),
    )
}

fn boundary_formula() -> Check {
    let mut rng = rng(11);
    let mut present = 0;
    let mut absent = 0;
    for i in 0..100 {
        let xi3 = uniform(&mut rng, ParamId::Xi3.plausible_range());
        // alternate between r above and below ξ₃
        let r = if i % 2 == 0 {
            xi3 * uniform(&mut rng, (1.0 + 1e-6, 8.0))
        } else {
            xi3 * uniform(&mut rng, (0.05, 1.0))
        };
        let p = ModelParams::new(18.0, 35.0, 0.19, r, 0.02, 1.5, xi3, 0.0).unwrap();
        match boundary_equilibrium(&p) {
            Some(e) if r > xi3 => {
                if e.location != State::new(0.0, 0.0, (r - xi3) / xi3) {
                    return (
                        false,
                        format!("r = {r}, xi3 = {xi3}: s0 = {}", e.location.s),
                    );
                }
                present += 1;
            }
            None if r <= xi3 => absent += 1,
            other => return (false, format!("r = {r}, xi3 = {xi3}: got {other:?}")),
        }
    }
    (
        true,
        format!("{present} present with exact s0, {absent} absent"),
    )
}

fn linearization_oracle() -> Check {
    let p = reference_params(0.0);
    let eq = find_equilibria(&p).unwrap().positive[0].location;
    let cs = expansion_coefficients(eq, &p).unwrap();
    let jp = jacobians(&cs);
    let (cur, lag) = fd_jacobians(eq, &p, 1e-5);
    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            for (coef, fd) in [(jp.j0[(i, j)], cur[i][j]), (jp.j1[(i, j)], lag[i][j])] {
                let err = if coef == 0.0 && fd == 0.0 {
                    0.0
                } else {
                    (coef - fd).abs() / coef.abs().max(fd.abs())
                };
                worst = worst.max(err);
            }
        }
    }
    let finite = (1..=12).all(|i| cs.a(i).is_finite() && cs.c(i).is_finite())
        && (1..=8).all(|i| cs.b(i).is_finite());
    let scale = eq.norm().max(1.0);
    let constant = cs.a(1).abs().max(cs.b(8).abs()).max(cs.c(1).abs()) / scale;
    let ok = worst <= 1e-5 && finite && constant <= 1e-9;
    (
        ok,
        format!("max relative slot error {worst:.2e}, constants {constant:.2e} scaled"),
    )
}

fn determinant_identity() -> Check {
    let corpus = random_with_positive_equilibrium(21, 10);
    let mut rng = rng(22);
    let mut worst = 0.0f64;
    for (p, eq) in &corpus {
        let lin = linearize(*eq, p).unwrap();
        let d = lin.deltas;
        let (j0, j1) = (lin.jacobians.j0, lin.jacobians.j1);
        for _ in 0..20 {
            let lambda = Complex64::new(
                uniform(&mut rng, (-1.0, 1.0)),
                uniform(&mut rng, (-3.0, 3.0)),
            );
            let tau = uniform(&mut rng, (0.0, 7.0));
            let e = (-lambda * tau).exp();
            let m: [[Complex64; 3]; 3] = std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    let diag = if i == j {
                        lambda
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                    diag - j0[(i, j)] - j1[(i, j)] * e
                })
            });
            let det = det3(m);
            let poly = characteristic(lambda, tau, &d);
            let l = lambda.norm();
            let en = e.norm();
            let scale = l.powi(3)
                + d.d3.abs() * l * l
                + d.d2.abs() * l
                + d.d1.abs()
                + (d.d4.abs() * l + d.d5.abs()) * en
                + (d.d6.abs() * l + d.d7.abs()) * en * en;
            worst = worst.max((det - poly).norm() / scale);
        }
    }
    (
        worst <= 1e-9,
        format!("200 samples, max relative difference {worst:.2e}"),
    )
}

fn crossing_certification() -> Check {
    let corpus = random_with_positive_equilibrium(31, 300);
    let mut crossings = 0;
    let mut directions = [0usize; 2];
    let mut failures = Vec::new();
    for (p, eq) in &corpus {
        let report = analyze(&linearize(*eq, p).unwrap().deltas, 3);
        let d = report.deltas;
        for c in &report.crossings {
            crossings += 1;
            let tau0 = c.first_delay().unwrap();
            let res_ok = c.residual <= residual_tolerance(c.omega);
            let trig = (c.delays.cos.powi(2) + c.delays.sin.powi(2) - 1.0).abs();
            let tracked = tracked_real_parts(c.omega, tau0, 1e-3, &d);
            let dir_ok = match (tracked, c.transversality.direction) {
                (Some((before, after)), CrossingDirection::Destabilizing) => {
                    before < 0.0 && after > 0.0
                }
                (Some((before, after)), CrossingDirection::Stabilizing) => {
                    before > 0.0 && after < 0.0
                }
                (None, _) => false,
            };
            match c.transversality.direction {
                CrossingDirection::Destabilizing => directions[0] += 1,
                CrossingDirection::Stabilizing => directions[1] += 1,
            }
            if !(res_ok && trig <= TRIG_TOLERANCE && dir_ok) {
                failures.push(format!(
                    "omega = {}, tau0 = {tau0}: residual {:.2e}, trig {trig:.2e}, tracked {tracked:?}",
                    c.omega, c.residual
                ));
            }
        }
        if !report.failures.is_empty() {
            failures.push(format!("uncertified roots: {:?}", report.failures));
        }
    }
    let ok = crossings > 0 && failures.is_empty();
    let mut detail = format!(
        "{} parameter sets, {crossings} crossings (+1: {}, -1: {})",
        corpus.len(),
        directions[0],
        directions[1]
    );
    if let Some(f) = failures.first() {
        detail += &format!("; first failure: {f}");
    }
    (ok, detail)
}

struct UnitDelay;

impl DelaySystem<1> for UnitDelay {
    fn delay(&self) -> f64 {
        1.0
    }
    fn eval(&self, _t: f64, _x: [f64; 1], lagged: [f64; 1]) -> [f64; 1] {
        [-lagged[0]]
    }
}

fn max_error_unit_delay(t_end: f64, n: u32) -> f64 {
    let h = 1.0 / n as f64;
    let traj = solve(
        &UnitDelay,
        HistoryFunction::Constant([1.0]),
        0.0,
        t_end,
        SolverOptions::with_step(h),
    )
    .unwrap()
    .into_result()
    .unwrap();
    traj.times()
        .iter()
        .zip(traj.states())
        .map(|(&t, x)| (x[0] - unit_delay_exact(t)).abs())
        .fold(0.0, f64::max)
}

fn ratios(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| w[0] / w[1]).collect()
}

fn show(r: &[f64]) -> String {
    r.iter()
        .map(|v| format!("{v:.2}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn dde_convergence() -> Check {
    const STEPS: [u32; 6] = [10, 20, 40, 80, 160, 320];
    let start = Instant::now();
    let errors: Vec<f64> = STEPS
        .iter()
        .map(|&n| {
            let traj = solve(
                &UnitDelay,
                HistoryFunction::Constant([1.0]),
                0.0,
                2.0,
                SolverOptions::with_step(1.0 / n as f64),
            )
            .unwrap()
            .into_result()
            .unwrap();
            (traj.eval(2.0).unwrap()[0] - unit_delay_exact(2.0)).abs()
        })
        .collect();
    let elapsed = start.elapsed();
    let at_two = ratios(&errors);
    let ok = at_two.iter().all(|r| (12.0..=20.0).contains(r)) && elapsed < Duration::from_secs(1);
    // context only: past t = 4 the solution pieces exceed cubic degree
    let later: Vec<f64> = STEPS
        .iter()
        .map(|&n| max_error_unit_delay(6.0, n))
        .collect();
    (
        ok,
        format!(
            "t=2 errors {:.1e}..{:.1e}, ratios [{}], {elapsed:.2?}; on [0, 6] ratios [{}]",
            errors.iter().cloned().fold(f64::INFINITY, f64::min),
            errors.iter().cloned().fold(0.0, f64::max),
            show(&at_two),
            show(&ratios(&later))
        ),
    )
}

fn fixed_point_preservation() -> Check {
    let eq = find_equilibria(&reference_params(0.0)).unwrap().positive[0].location;
    let mut worst = 0.0f64;
    for tau in [0.1, 0.5, 1.0] {
        let p = reference_params(tau);
        let traj = integrate(&p, eq.into(), 50.0, None)
            .unwrap()
            .into_result()
            .unwrap();
        for x in traj.states() {
            worst = worst.max((State::from(*x) - eq).norm() / eq.norm());
        }
    }
    (worst <= 1e-6, format!("max relative drift {worst:.2e}"))
}

fn oscillating_params() -> ModelParams {
    ModelParams::new(5.0, 18.0, 0.05, 1.0, 0.5, 0.2, 0.3, 0.0).unwrap()
}

fn delay_scan_regimes() -> Check {
    let start = Instant::now();
    let history = State::new(0.8, 0.7, 0.6);
    let mut cfg = ScanConfig::new(ParamId::Tau, 0.0, 1.0, 100, history);
    cfg.observable = Component::S;
    let sweep = scan(&oscillating_params(), &cfg).unwrap();
    cfg.lo = 0.15;
    cfg.hi = 0.9;
    cfg.n_points = 2;
    let ends = scan(&oscillating_params(), &cfg).unwrap();
    let elapsed = start.elapsed();

    let kind = |i: usize| ends.points[i].outcome.as_ref().map(|s| s.kind).ok();
    let steady_015 = kind(0) == Some(AttractorKind::Steady);
    let dense_09 = matches!(kind(1), Some(AttractorKind::Dense(k)) if k >= 16);
    let first = sweep
        .points
        .iter()
        .find(|pt| !matches!(pt.outcome, Ok(ref s) if s.kind == AttractorKind::Steady))
        .map(|pt| pt.value);
    let onset_ok = first.is_some_and(|t| (0.25..=0.45).contains(&t));
    let range = sweep.range().unwrap_or((f64::NAN, f64::NAN));
    let ok = steady_015 && dense_09 && onset_ok && elapsed < Duration::from_secs(300);
    (
        ok,
        format!(
            "tau=0.15 {:?}, tau=0.9 {:?}, first non-steady tau {first:?}, s range [{:.3e}, {:.3e}], {elapsed:.1?}",
            kind(0),
            kind(1),
            range.0,
            range.1
        ),
    )
}

fn fertility_band() -> Check {
    let p = ModelParams::new(5.0, 18.0, 2.88, 1.0, 1.5, 1.2, 2.3, 0.7).unwrap();
    let mut cfg = ScanConfig::new(ParamId::C, 2.88, 2.90, 21, State::new(0.7, 0.8, 0.6));
    cfg.observable = Component::S;
    let result = scan(&p, &cfg).unwrap();
    let Some((lo, hi)) = result.range() else {
        return (false, "every grid point failed".into());
    };
    let ok = result.failures() == 0 && lo >= 0.17 && hi <= 0.18 && hi - lo <= 0.002;
    (
        ok,
        format!(
            "tau = 0.7, s samples in [{lo:.6}, {hi:.6}], width {:.2e}",
            hi - lo
        ),
    )
}

fn omega_invariance() -> Check {
    let mut rng = rng(41);
    let mut min_component = f64::INFINITY;
    let mut outside = 0;
    let mut worst_ratio = 0.0f64;
    for _ in 0..50 {
        let p = random_params(&mut rng);
        let bx = omega_box(&p);
        let history = State::new(
            uniform(&mut rng, (0.0, bx.w_max)),
            uniform(&mut rng, (0.0, bx.g_max)),
            uniform(&mut rng, (0.0, bx.s_max)),
        );
        let traj = integrate(&p, history.into(), 100.0, None)
            .unwrap()
            .into_result()
            .unwrap();
        let inflated = bx.inflated(1e-6);
        let mut left = false;
        for x in traj.states() {
            let x = State::from(*x);
            min_component = min_component.min(x.w.min(x.g).min(x.s));
            left |= !in_omega(x, &inflated);
            worst_ratio = worst_ratio
                .max(x.w / bx.w_max)
                .max(x.g / bx.g_max)
                .max(x.s / bx.s_max);
        }
        outside += usize::from(left);
    }
    let ok = min_component >= -1e-9 && outside == 0;
    (
        ok,
        format!("min component {min_component:.2e}, {outside}/50 leave the box, max state/bound {worst_ratio:.3}"),
    )
}

type Criterion = (&'static str, fn() -> Check);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("reference equilibrium", reference_equilibrium),
        ("boundary equilibrium formula", boundary_formula),
        (
            "linearization against finite differences",
            linearization_oracle,
        ),
        ("determinant identity", determinant_identity),
        ("crossing certification", crossing_certification),
        ("DDE solver convergence", dde_convergence),
        ("fixed-point preservation", fixed_point_preservation),
        ("delay scan regimes", delay_scan_regimes),
        ("residual fertility band", fertility_band),
        ("invariant box witness", omega_invariance),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let (ok, detail) = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (false, format!("panicked: {msg}"))
        });
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        failed += usize::from(!ok);
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
