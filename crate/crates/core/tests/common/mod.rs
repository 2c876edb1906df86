//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use sitdde_core::equilibria::positive_equilibria;
use sitdde_core::linearization::DeltaSet;
use sitdde_core::model::rhs;
use sitdde_core::{ModelParams, ParamId, State};

pub fn reference_params(tau: f64) -> ModelParams {
    ModelParams::new(18.0, 35.0, 0.19, 0.99, 0.02, 1.5, 0.1, tau).unwrap()
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut StdRng, (lo, hi): (f64, f64)) -> f64 {
    rng.random_range(lo..=hi)
}

/// Parameters drawn uniformly from the plausible ranges.
pub fn random_params(rng: &mut StdRng) -> ModelParams {
    let mut v = [0.0; 8];
    for (slot, id) in v.iter_mut().zip(ParamId::ALL) {
        *slot = uniform(rng, id.plausible_range());
    }
    ModelParams::new(v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]).unwrap()
}

/// Random parameter sets that have at least one positive equilibrium, with
/// the first such equilibrium.
pub fn random_with_positive_equilibrium(seed: u64, count: usize) -> Vec<(ModelParams, State)> {
    let mut rng = rng(seed);
    let mut out = Vec::new();
    for _ in 0..200_000 {
        if out.len() == count {
            break;
        }
        let p = random_params(&mut rng);
        if let Ok(eqs) = positive_equilibria(&p) {
            if let Some(e) = eqs.first() {
                out.push((p, e.location));
            }
        }
    }
    assert_eq!(out.len(), count, "corpus generator ran dry");
    out
}

/// `(λ³+δ₃λ²+δ₂λ+δ₁)e^{λτ} + δ₄λ+δ₅ + (δ₆λ+δ₇)e^{−λτ}` and its λ-derivative.
pub fn scaled_char(lambda: Complex64, tau: f64, d: &DeltaSet) -> (Complex64, Complex64) {
    let ep = (lambda * tau).exp();
    let em = (-lambda * tau).exp();
    let cubic = lambda * lambda * lambda + d.d3 * lambda * lambda + d.d2 * lambda + d.d1;
    let dcubic = 3.0 * lambda * lambda + 2.0 * d.d3 * lambda + d.d2;
    let lin = d.d6 * lambda + d.d7;
    let f = cubic * ep + d.d4 * lambda + d.d5 + lin * em;
    let df = dcubic * ep + tau * cubic * ep + d.d4 + (d.d6 - tau * lin) * em;
    (f, df)
}

/// Newton iteration for a characteristic root near `guess` at delay `tau`.
pub fn newton_root(guess: Complex64, tau: f64, d: &DeltaSet) -> Option<Complex64> {
    let mut z = guess;
    for _ in 0..100 {
        let (f, df) = scaled_char(z, tau, d);
        if df.norm() == 0.0 {
            return None;
        }
        let step = f / df;
        z -= step;
        if step.norm() <= 1e-14 * z.norm().max(1.0) {
            return Some(z);
        }
    }
    let (f, _) = scaled_char(z, tau, d);
    (f.norm() <= 1e-8 * (1.0 + z.norm().powi(3))).then_some(z)
}

/// Real parts of the root tracked from `iω` at `τ₀ − δτ` and `τ₀ + δτ`.
pub fn tracked_real_parts(omega: f64, tau0: f64, dtau: f64, d: &DeltaSet) -> Option<(f64, f64)> {
    let start = Complex64::new(0.0, omega);
    let before = newton_root(start, tau0 - dtau, d)?;
    let after = newton_root(start, tau0 + dtau, d)?;
    // the tracked roots must stay on the branch through iω
    let close = |z: Complex64| (z - start).norm() <= 1e-2 * omega.max(1.0);
    (close(before) && close(after)).then_some((before.re, after.re))
}

pub fn det3(m: [[Complex64; 3]; 3]) -> Complex64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Central finite-difference Jacobians of the delayed right-hand side at `x`
/// with respect to the current and the delayed argument.
pub fn fd_jacobians(x: State, p: &ModelParams, h: f64) -> ([[f64; 3]; 3], [[f64; 3]; 3]) {
    let base = x.to_array();
    let mut cur = [[0.0; 3]; 3];
    let mut lag = [[0.0; 3]; 3];
    for col in 0..3 {
        let mut plus = base;
        let mut minus = base;
        plus[col] += h;
        minus[col] -= h;
        let cp = rhs(plus.into(), x, p).unwrap().to_array();
        let cm = rhs(minus.into(), x, p).unwrap().to_array();
        let lp = rhs(x, plus.into(), p).unwrap().to_array();
        let lm = rhs(x, minus.into(), p).unwrap().to_array();
        for row in 0..3 {
            cur[row][col] = (cp[row] - cm[row]) / (2.0 * h);
            lag[row][col] = (lp[row] - lm[row]) / (2.0 * h);
        }
    }
    (cur, lag)
}

/// Exact solution of `x'(t) = −x(t − 1)` with history `x ≡ 1` on `[−1, 0]`:
/// `x(t) = Σ_{k=0}^{⌊t⌋+1} (−1)ᵏ (t − k + 1)ᵏ / k!`.
pub fn unit_delay_exact(t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    let n = t.floor() as i32 + 1;
    let mut sum = 0.0;
    let mut fact = 1.0;
    for k in 0..=n {
        if k > 0 {
            fact *= k as f64;
        }
        let base = t - k as f64 + 1.0;
        if base > 0.0 {
            sum += (-1f64).powi(k) * base.powi(k) / fact;
        }
    }
    sum
}
