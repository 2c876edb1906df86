//! Local classification of the predator-free equilibrium `E⁰ = (0, 0, s₀)`.

use std::fmt;

use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::equilibria::boundary_equilibrium;
use crate::error::{Error, Result};
use crate::model::{undelayed_jacobian, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryClass {
    Sink,
    /// One eigenvalue with positive real part.
    Saddle1,
    /// Two eigenvalues with positive real part.
    Saddle2,
    Source,
}

impl BoundaryClass {
    pub fn from_unstable_count(n: usize) -> Self {
        match n {
            0 => BoundaryClass::Sink,
            1 => BoundaryClass::Saddle1,
            2 => BoundaryClass::Saddle2,
            _ => BoundaryClass::Source,
        }
    }
}

impl fmt::Display for BoundaryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundaryClass::Sink => "sink",
            BoundaryClass::Saddle1 => "saddle (index 1)",
            BoundaryClass::Saddle2 => "saddle (index 2)",
            BoundaryClass::Source => "source",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySpectrum {
    pub s0: f64,
    /// Closed-form eigenvalues `λ₁, λ₂, λ₃`.
    pub closed_form: [f64; 3],
    /// `0 < r < (7ξ₃ − √17|ξ₃|)/8` together with the ξ₁ bound.
    pub source_condition: bool,
    /// `ξ₃ < r < (7ξ₃ + √17|ξ₃|)/8` together with the ξ₁ bound.
    pub sink_condition: bool,
    /// Eigenvalues of the finite-difference Jacobian at `E⁰`.
    pub numeric: [Complex64; 3],
    /// Classification from the numeric eigenvalues.
    pub class: BoundaryClass,
    /// Classification from the closed-form eigenvalues.
    pub closed_form_class: BoundaryClass,
}

impl BoundarySpectrum {
    pub fn agrees(&self) -> bool {
        self.class == self.closed_form_class
    }
}

pub fn closed_form_eigenvalues(p: &ModelParams) -> [f64; 3] {
    let (r, x1, x2, x3) = (p.r(), p.xi1(), p.xi2(), p.xi3());
    let d = r - x3;
    let l1 = x2 * (x3 - r) / x3;
    let l2 = d * d * (2.0 * x3 * x3 + 4.0 * r * r - 7.0 * x3 * r) / x3.powi(3);
    let l3 = -d
        * (x1 * x3.powi(3) + r.powi(4) - 4.0 * x3 * r.powi(3) + 6.0 * x3 * x3 * r * r
            - 4.0 * x3.powi(3) * r)
        / x3.powi(4);
    [l1, l2, l3]
}

fn xi1_bound(p: &ModelParams) -> bool {
    let (r, x3) = (p.r(), p.xi3());
    p.xi1()
        > (4.0 * x3 * r.powi(3) - 6.0 * x3 * x3 * r * r - r.powi(4) + 4.0 * x3.powi(3) * r)
            / x3.powi(3)
}

pub fn boundary_spectrum(p: &ModelParams) -> Result<BoundarySpectrum> {
    let e0 = boundary_equilibrium(p)
        .ok_or(Error::NoBoundaryEquilibrium)?
        .location;
    let closed_form = closed_form_eigenvalues(p);
    let (r, x3) = (p.r(), p.xi3());
    let root17 = 17f64.sqrt() * x3.abs() / 8.0;
    let source_condition = 0.0 < r && r < 7.0 * x3 / 8.0 - root17 && xi1_bound(p);
    let sink_condition = x3 < r && r < 7.0 * x3 / 8.0 + root17 && xi1_bound(p);

    let h = 1e-6 * e0.s.abs().max(1.0);
    let jac = Matrix3::from(undelayed_jacobian(e0, p, h)).transpose();
    let eig = jac.complex_eigenvalues();
    let numeric = [eig[0], eig[1], eig[2]];
    let class = BoundaryClass::from_unstable_count(numeric.iter().filter(|z| z.re > 0.0).count());
    let closed_form_class =
        BoundaryClass::from_unstable_count(closed_form.iter().filter(|&&l| l > 0.0).count());
    Ok(BoundarySpectrum {
        s0: e0.s,
        closed_form,
        source_condition,
        sink_condition,
        numeric,
        class,
        closed_form_class,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(r: f64, xi3: f64) -> ModelParams {
        ModelParams::new(18.0, 35.0, 0.19, r, 0.02, 1.5, xi3, 0.0).unwrap()
    }

    #[test]
    fn absent_without_boundary_equilibrium() {
        let p = params(0.05, 0.1);
        assert_eq!(
            boundary_spectrum(&p).unwrap_err(),
            Error::NoBoundaryEquilibrium
        );
    }

    #[test]
    fn first_eigenvalue_arithmetic() {
        let p = params(0.99, 0.1);
        assert!((closed_form_eigenvalues(&p)[0] + 13.35).abs() < 1e-12);
        let p = params(0.101, 0.1);
        assert!(closed_form_eigenvalues(&p)[0] < 0.0);
    }

    #[test]
    fn spectrum_is_reported() {
        let p = ModelParams::new(0.6, 3.0, 0.19, 2.0, 0.04, 0.1, 0.6, 0.0).unwrap();
        let bs = boundary_spectrum(&p).unwrap();
        assert!((bs.s0 - 7.0 / 3.0).abs() < 1e-12);
        assert!(bs.closed_form.iter().all(|l| l.is_finite()));
        assert!(bs.numeric.iter().all(|z| z.re.is_finite()));
        // the g-direction decays: λ = −ξ₂ s₀ appears numerically
        let lam_g = -p.xi2() * bs.s0;
        assert!(bs.numeric.iter().any(|z| (z.re - lam_g).abs() < 1e-5));
    }
}
