//! Real-coefficient polynomial roots through companion-matrix eigenvalues.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Evaluates `Σ coeffs[i] xⁱ` (ascending order) by Horner's rule.
pub fn eval_ascending(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Rounding-error scale `Σ |coeffs[i]| |x|ⁱ` of a Horner evaluation.
pub fn eval_magnitude(coeffs: &[f64], x: f64) -> f64 {
    coeffs
        .iter()
        .rev()
        .fold(0.0, |acc, &c| acc * x.abs() + c.abs())
}

fn derivative_ascending(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| i as f64 * c)
        .collect()
}

/// All complex roots of the monic polynomial `xⁿ + Σ lower[i] xⁱ`.
///
/// The variable is rescaled by `σ = max |lower[n−k]|^{1/k}` before building the
/// companion matrix so its entries stay of order one.
pub fn monic_roots(lower: &[f64]) -> Vec<Complex64> {
    let n = lower.len();
    if n == 0 {
        return Vec::new();
    }
    let sigma = (1..=n)
        .map(|k| lower[n - k].abs().powf(1.0 / k as f64))
        .fold(0.0, f64::max);
    let sigma = if sigma > 0.0 && sigma.is_finite() {
        sigma
    } else {
        1.0
    };

    let mut companion = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        companion[(i, i - 1)] = 1.0;
    }
    for (i, &c) in lower.iter().enumerate() {
        // coefficient of uⁱ after x = σu, divided by σⁿ
        companion[(i, n - 1)] = -c / sigma.powi((n - i) as i32);
    }
    companion
        .complex_eigenvalues()
        .iter()
        .map(|z| z * sigma)
        .collect()
}

/// Newton-polishes a real root estimate of the ascending-order polynomial.
pub fn polish(coeffs: &[f64], mut x: f64) -> f64 {
    let deriv = derivative_ascending(coeffs);
    let mut best = (eval_ascending(coeffs, x).abs(), x);
    for _ in 0..50 {
        let f = eval_ascending(coeffs, x);
        let df = eval_ascending(&deriv, x);
        if f == 0.0 || df == 0.0 || !df.is_finite() {
            break;
        }
        let next = x - f / df;
        if !next.is_finite() {
            break;
        }
        let fx = eval_ascending(coeffs, next).abs();
        if fx < best.0 {
            best = (fx, next);
        }
        if (next - x).abs() <= 4.0 * f64::EPSILON * next.abs() {
            break;
        }
        x = next;
    }
    best.1
}

/// Positive real roots of the monic polynomial `xⁿ + Σ lower[i] xⁱ`, polished
/// and sorted ascending. Eigenvalues with `|Im| ≤ 1e-8 (1 + |z|)` count as real.
/// A polished root is kept when `|F| ≤ tol`, or when `|F|` is within the
/// rounding scale of the evaluation itself.
pub fn positive_real_roots(lower: &[f64], tol: f64) -> Vec<f64> {
    let mut coeffs = lower.to_vec();
    coeffs.push(1.0);
    let mut roots: Vec<f64> = monic_roots(lower)
        .into_iter()
        .filter(|z| z.im.abs() <= 1e-8 * (1.0 + z.norm()) && z.re > 0.0)
        .map(|z| polish(&coeffs, z.re))
        .filter(|&x| x > 0.0)
        .filter(|&x| {
            let f = eval_ascending(&coeffs, x).abs();
            f <= tol || f <= 64.0 * f64::EPSILON * eval_magnitude(&coeffs, x)
        })
        .collect();
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    roots
}
