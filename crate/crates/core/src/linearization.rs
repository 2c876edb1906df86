//! Expansion coefficients at an equilibrium, the Jacobian pair of the
//! linearised delayed system, and the coefficients of its characteristic
//! quasi-polynomial
//!
//! ```text
//! p(λ) = λ³ + δ₃λ² + δ₂λ + δ₁ + (δ₄λ + δ₅)e^{−λτ} + (δ₆λ + δ₇)e^{−2λτ}.
//! ```

use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::model::{ModelParams, State};

/// Taylor-expansion coefficients of the shifted system around `(A₁, A₂, A₃)`.
///
/// Only `a₂ a₃ a₄ b₄ b₆ b₇ c₂ c₃ c₄ c₈` enter the linear analysis; `a₁`, `b₈`
/// and `c₁` are the vector field itself and vanish at a true equilibrium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientSet {
    a: [f64; 12],
    b: [f64; 8],
    c: [f64; 12],
}

impl CoefficientSet {
    /// `aᵢ`, 1-based.
    pub fn a(&self, i: usize) -> f64 {
        self.a[i - 1]
    }
    /// `bᵢ`, 1-based.
    pub fn b(&self, i: usize) -> f64 {
        self.b[i - 1]
    }
    /// `cᵢ`, 1-based.
    pub fn c(&self, i: usize) -> f64 {
        self.c[i - 1]
    }

    /// Builds a set directly from the ten linear coefficients; every other
    /// entry is zero. Handy for constructing test spectra.
    #[allow(clippy::too_many_arguments)]
    pub fn from_linear(
        a2: f64,
        a3: f64,
        a4: f64,
        b4: f64,
        b6: f64,
        b7: f64,
        c2: f64,
        c3: f64,
        c4: f64,
        c8: f64,
    ) -> Self {
        let mut cs = CoefficientSet {
            a: [0.0; 12],
            b: [0.0; 8],
            c: [0.0; 12],
        };
        cs.a[1] = a2;
        cs.a[2] = a3;
        cs.a[3] = a4;
        cs.b[3] = b4;
        cs.b[5] = b6;
        cs.b[6] = b7;
        cs.c[1] = c2;
        cs.c[2] = c3;
        cs.c[3] = c4;
        cs.c[7] = c8;
        cs
    }

    pub fn is_finite(&self) -> bool {
        self.a
            .iter()
            .chain(&self.b)
            .chain(&self.c)
            .all(|v| v.is_finite())
    }
}

pub fn expansion_coefficients(eq: State, p: &ModelParams) -> Result<CoefficientSet> {
    if !eq.is_finite() || eq.w < 0.0 || eq.g < 0.0 || eq.s < 0.0 {
        return Err(Error::InvalidInput(format!(
            "expansion point must be finite and non-negative, got {eq:?}"
        )));
    }
    let (x1, x2, x3) = (eq.w, eq.g, eq.s);
    let ModelParams {
        a,
        b,
        c,
        r,
        xi1,
        xi2,
        xi3,
        ..
    } = *p;

    let d = 1.0 + x1 + x2 + x3;
    let d2 = d * d;
    let d3 = d2 * d;
    let d4 = d3 * d;
    let d5 = d4 * d;
    let e = 1.0 + x1;
    let e2 = e * e;
    let e3 = e2 * e;
    let e4 = e3 * e;
    let e5 = e4 * e;

    // Recurring numerators.
    let aw2 = a * x1 * x1;
    let swr = x3 * x1 * r;
    let aws = a * x1 * x3;
    let s2r = x3 * x3 * r;

    let mut k = [0.0; 12];
    k[0] = aw2 / d + swr / d - x1 * x1 * xi1 - x2 * x1 * xi1 - x3 * x1 * xi1;
    k[1] =
        -aw2 / d2 + 2.0 * a * x1 / d - swr / d2 + x3 * r / d - 2.0 * x1 * xi1 - x2 * xi1 - x3 * xi1;
    k[2] = -aw2 / d2 - swr / d2 - x1 * xi1;
    k[3] = -aw2 / d2 + x1 * r / d - swr / d2 - x1 * xi1;
    k[4] = aw2 / d3 - 2.0 * a * x1 / d2 + a / d + swr / d3 - x3 * r / d2 - xi1;
    k[5] = -aw2 / d4 + 2.0 * a * x1 / d3 - a / d2 - swr / d4 + x3 * r / d3;
    k[6] = aw2 / d5 - 2.0 * a * x1 / d4 + a / d3 + swr / d5 - x3 * r / d4;
    k[7] = aw2 / d3 + swr / d3;
    k[8] = -aw2 / d4 - swr / d4;
    k[9] = aw2 / d5 + swr / d5;
    k[10] = aw2 / d3 - x1 * r / d2 + swr / d3;
    k[11] = -aw2 / d4 + x1 * r / d3 - swr / d4;

    let mut m = [0.0; 8];
    m[0] = x1 * b / e5 - b / e4;
    m[1] = b / e3 - x1 * b / e4;
    m[2] = x1 * b / e3 - b / e2;
    m[3] = b / e - x1 * b / e2 - x2 * xi2;
    m[4] = -xi2;
    m[5] = -x2 * xi2;
    m[6] = -x1 * xi2 - 2.0 * x2 * xi2 - x3 * xi2;
    m[7] = x1 * b / e - x2 * x2 * xi2 - x1 * x2 * xi2 - x3 * x2 * xi2;

    let mut n = [0.0; 12];
    n[0] = aws / d + s2r / d + x1 * c / e - x3 * x3 * xi3 - x1 * x3 * xi3 - x2 * x3 * xi3;
    n[1] = -aws / d2 - s2r / d2 - x3 * xi3;
    n[2] =
        -aws / d2 + a * x1 / d - s2r / d2 + 2.0 * x3 * r / d - 2.0 * x3 * xi3 - x1 * xi3 - x2 * xi3;
    n[3] = a * x3 / d - aws / d2 - x3 * xi3 - s2r / d2;
    n[4] = -a * x3 / d2 + aws / d3 + s2r / d3;
    n[5] = a * x3 / d3 - aws / d4 - s2r / d4;
    n[6] = -a * x3 / d4 + aws / d5 + s2r / d5;
    n[7] = c / e - x1 * c / e2;
    n[8] = x1 * c / e3 - c / e2;
    n[9] = c / e3 - x1 * c / e4;
    n[10] = x1 * c / e5 - c / e4;
    n[11] = aws / d3 + s2r / d3;

    let cs = CoefficientSet { a: k, b: m, c: n };
    if !cs.is_finite() {
        return Err(Error::InvalidInput(format!(
            "non-finite coefficients at {eq:?}"
        )));
    }
    Ok(cs)
}

/// Current-slot and delayed-slot Jacobians of the linearised system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianPair {
    pub j0: Matrix3<f64>,
    pub j1: Matrix3<f64>,
}

pub fn jacobians(cs: &CoefficientSet) -> JacobianPair {
    #[rustfmt::skip]
    let j0 = Matrix3::new(
        cs.a(2), cs.a(3), 0.0,
        cs.b(4), cs.b(7), cs.b(6),
        cs.c(8), cs.c(2), cs.c(3),
    );
    let mut j1 = Matrix3::zeros();
    j1[(0, 2)] = cs.a(4);
    j1[(2, 0)] = cs.c(4);
    JacobianPair { j0, j1 }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DeltaSet {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub d4: f64,
    pub d5: f64,
    pub d6: f64,
    pub d7: f64,
}

impl DeltaSet {
    pub fn to_array(&self) -> [f64; 7] {
        [
            self.d1, self.d2, self.d3, self.d4, self.d5, self.d6, self.d7,
        ]
    }

    pub fn from_array(d: [f64; 7]) -> Self {
        DeltaSet {
            d1: d[0],
            d2: d[1],
            d3: d[2],
            d4: d[3],
            d5: d[4],
            d6: d[5],
            d7: d[6],
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.to_array().iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub fn delta_coefficients(cs: &CoefficientSet) -> DeltaSet {
    let (a2, a3, a4) = (cs.a(2), cs.a(3), cs.a(4));
    let (b4, b6, b7) = (cs.b(4), cs.b(6), cs.b(7));
    let (c2, c3, c4, c8) = (cs.c(2), cs.c(3), cs.c(4), cs.c(8));
    DeltaSet {
        d1: a2 * b6 * c2 + a3 * b4 * c3 - a2 * b7 * c3 - a3 * b6 * c8,
        d2: -a3 * b4 + a2 * b7 + a2 * c3 - b6 * c2 + b7 * c3,
        d3: -a2 - b7 - c3,
        d4: -a4 * c8,
        d5: -a4 * b4 * c2 - a3 * b6 * c4 + a4 * b7 * c8,
        d6: -a4 * c4,
        d7: a4 * b7 * c4,
    }
}

/// Coefficients, Jacobians and δ's at one equilibrium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Linearization {
    pub coefficients: CoefficientSet,
    pub jacobians: JacobianPair,
    pub deltas: DeltaSet,
}

pub fn linearize(eq: State, p: &ModelParams) -> Result<Linearization> {
    let coefficients = expansion_coefficients(eq, p)?;
    Ok(Linearization {
        coefficients,
        jacobians: jacobians(&coefficients),
        deltas: delta_coefficients(&coefficients),
    })
}
