//! Delay-independent and delay-dependent stability of an equilibrium from the
//! δ-coefficients of its characteristic quasi-polynomial.
//!
//! Purely imaginary roots `λ = iω` are found from the modulus condition: with
//! `m = ω²` they are the positive roots of
//!
//! ```text
//! F(m) = m⁶ + γ₁m⁵ + γ₂m⁴ + γ₃m³ + γ₄m² + γ₅m + γ₆,
//! ```
//!
//! and each root gives a family of critical delays `τⱼ = (θ + 2πj)/ω`.

pub mod boundary;
pub mod poly;

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linearization::DeltaSet;

pub use boundary::{boundary_spectrum, BoundaryClass, BoundarySpectrum};

/// Acceptance threshold for the quasi-polynomial residual at a crossing.
pub fn residual_tolerance(omega: f64) -> f64 {
    1e-8 * (1.0 + omega.powi(3))
}

/// Tolerance on `cos² + sin² − 1` at a crossing frequency.
pub const TRIG_TOLERANCE: f64 = 1e-6;

/// Routh–Hurwitz test for the cubic `λ³ + δ₃λ² + (δ₂+δ₄+δ₆)λ + (δ₁+δ₅+δ₇)`,
/// the characteristic polynomial at zero delay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouthHurwitz {
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
    pub stable: bool,
}

impl RouthHurwitz {
    /// `c₂c₁ − c₀`, which must be positive for stability.
    pub fn product_margin(&self) -> f64 {
        self.c2 * self.c1 - self.c0
    }
}

pub fn routh_hurwitz(d: &DeltaSet) -> RouthHurwitz {
    let c2 = d.d3;
    let c1 = d.d2 + d.d4 + d.d6;
    let c0 = d.d1 + d.d5 + d.d7;
    RouthHurwitz {
        c2,
        c1,
        c0,
        stable: c2 > 0.0 && c0 > 0.0 && c2 * c1 > c0,
    }
}

/// Number of zero-delay roots with positive real part.
pub fn rhp_roots_at_zero_delay(d: &DeltaSet) -> usize {
    let rh = routh_hurwitz(d);
    poly::monic_roots(&[rh.c0, rh.c1, rh.c2])
        .iter()
        .filter(|z| z.re > 0.0)
        .count()
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GammaSet {
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub g4: f64,
    pub g5: f64,
    pub g6: f64,
}

impl GammaSet {
    pub fn to_array(&self) -> [f64; 6] {
        [self.g1, self.g2, self.g3, self.g4, self.g5, self.g6]
    }

    /// Ascending coefficients `[γ₆, γ₅, …, γ₁, 1]`.
    pub fn ascending(&self) -> [f64; 7] {
        [self.g6, self.g5, self.g4, self.g3, self.g2, self.g1, 1.0]
    }

    pub fn max_abs(&self) -> f64 {
        self.to_array().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn eval(&self, m: f64) -> f64 {
        poly::eval_ascending(&self.ascending(), m)
    }
}

/// Coefficients of `F(m) = den² − num_c² − num_s²`, where `den`, `num_c` and
/// `num_s` are the denominator and numerators of `cos ωτ` and `sin ωτ`.
pub fn gamma_coefficients(d: &DeltaSet) -> GammaSet {
    let DeltaSet {
        d1,
        d2,
        d3,
        d4,
        d5,
        d6,
        d7,
    } = *d;
    let sq = |x: f64| x * x;

    let g1 = 2.0 * sq(d3) - 4.0 * d2;
    let g2 = sq(sq(d3)) - 4.0 * d2 * sq(d3) - 4.0 * d1 * d3 + 6.0 * sq(d2) - sq(d4) - 2.0 * sq(d6);
    let g3 = 2.0 * sq(d1) + 8.0 * d1 * d2 * d3 - 4.0 * d1 * d3 * sq(d3) - 4.0 * d2 * sq(d2)
        + 2.0 * sq(d2) * sq(d3)
        + 2.0 * d2 * sq(d4)
        + 4.0 * d2 * sq(d6)
        - sq(d3) * sq(d4)
        - 2.0 * sq(d3) * sq(d6)
        - 2.0 * sq(d4) * d6
        - sq(d5)
        - 2.0 * sq(d7);
    let g4 = -4.0 * sq(d1) * d2 + 6.0 * sq(d1) * sq(d3) - 4.0 * d1 * sq(d2) * d3
        + 2.0 * d1 * d3 * sq(d4)
        + 4.0 * d1 * d3 * sq(d6)
        + sq(sq(d2))
        - sq(d2) * sq(d4)
        - 2.0 * sq(d2) * sq(d6)
        + 2.0 * d2 * sq(d4) * d6
        + 2.0 * d2 * sq(d5)
        + 4.0 * d2 * sq(d7)
        - sq(d3) * sq(d5)
        - 2.0 * sq(d3) * sq(d7)
        + 2.0 * d3 * sq(d4) * d7
        - 4.0 * d3 * d4 * d5 * d6
        - sq(d4) * sq(d6)
        - 4.0 * d4 * d5 * d7
        + 2.0 * sq(d5) * d6
        + sq(sq(d6));
    let g5 =
        -4.0 * sq(d1) * d1 * d3 + 2.0 * sq(d1) * sq(d2) - sq(d1) * sq(d4) - 2.0 * sq(d1) * sq(d6)
            + 2.0 * d1 * d3 * sq(d5)
            + 4.0 * d1 * d3 * sq(d7)
            - 2.0 * d1 * sq(d4) * d7
            + 4.0 * d1 * d4 * d5 * d6
            - sq(d2) * sq(d5)
            - 2.0 * sq(d2) * sq(d7)
            + 4.0 * d2 * d4 * d5 * d7
            - 2.0 * d2 * sq(d5) * d6
            - 2.0 * d3 * sq(d5) * d7
            - sq(d4) * sq(d7)
            - sq(d5) * sq(d6)
            + 2.0 * sq(d6) * sq(d7);
    let g6 = sq(d1 - d7) * (d1 + d5 + d7) * (d1 - d5 + d7);

    GammaSet {
        g1,
        g2,
        g3,
        g4,
        g5,
        g6,
    }
}

/// Which branch of the crossing-existence lemmas a parameter set falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LemmaBranch {
    /// `γ₆ < 0`: at least one positive root of `F`.
    RootGuaranteed,
    /// `γ₆ > 0` and both inequalities of H3 hold: a positive root is possible.
    RootPossible,
    /// `γ₆ > 0` and H3 fails: no positive root is guaranteed.
    NoRootGuaranteed,
    /// `γ₆ = 0`.
    Degenerate,
}

impl fmt::Display for LemmaBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LemmaBranch::RootGuaranteed => "gamma6 < 0: positive root guaranteed",
            LemmaBranch::RootPossible => "gamma6 > 0 and H3 holds: positive root possible",
            LemmaBranch::NoRootGuaranteed => "gamma6 > 0 and H3 fails: no positive root guaranteed",
            LemmaBranch::Degenerate => "gamma6 = 0: degenerate",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaReport {
    pub gamma6: f64,
    /// `δ₅² < 2δ₇²`
    pub h3_first: bool,
    /// `δ₁⁴ + δ₇⁴ + δ₅²δ₇² < 2δ₅²δ₇δ₁`
    pub h3_second: bool,
    pub branch: LemmaBranch,
}

pub fn lemma_conditions(g: &GammaSet, d: &DeltaSet) -> LemmaReport {
    let h3_first = d.d5 * d.d5 < 2.0 * d.d7 * d.d7;
    let h3_second =
        d.d1.powi(4) + d.d7.powi(4) + d.d5 * d.d5 * d.d7 * d.d7 < 2.0 * d.d5 * d.d5 * d.d7 * d.d1;
    let branch = if g.g6 < 0.0 {
        LemmaBranch::RootGuaranteed
    } else if g.g6 == 0.0 {
        LemmaBranch::Degenerate
    } else if h3_first && h3_second {
        LemmaBranch::RootPossible
    } else {
        LemmaBranch::NoRootGuaranteed
    };
    LemmaReport {
        gamma6: g.g6,
        h3_first,
        h3_second,
        branch,
    }
}

/// Positive roots of `F`, polished to `|F(m)| ≤ 1e-10 · max(1, |γ|∞)` or to
/// the rounding level of the evaluation, sorted ascending.
pub fn crossing_frequencies_squared(g: &GammaSet) -> Vec<f64> {
    let asc = g.ascending();
    let tol = 1e-10 * g.max_abs().max(1.0);
    poly::positive_real_roots(&asc[..6], tol)
}

/// Evaluates the characteristic quasi-polynomial
/// `λ³ + δ₃λ² + δ₂λ + δ₁ + (δ₄λ + δ₅)e^{−λτ} + (δ₆λ + δ₇)e^{−2λτ}`.
pub fn characteristic(lambda: Complex64, tau: f64, d: &DeltaSet) -> Complex64 {
    let e = (-lambda * tau).exp();
    lambda * lambda * lambda
        + d.d3 * lambda * lambda
        + d.d2 * lambda
        + d.d1
        + (d.d4 * lambda + d.d5) * e
        + (d.d6 * lambda + d.d7) * e * e
}

/// `|(λ³+δ₁+δ₂λ+δ₃λ²)e^{λτ} + (δ₄λ+δ₅) + (δ₆λ+δ₇)e^{−λτ}|`, the
/// characteristic function multiplied through by `e^{λτ}`.
pub fn quasipoly_residual(lambda: Complex64, tau: f64, d: &DeltaSet) -> f64 {
    let ep = (lambda * tau).exp();
    let em = (-lambda * tau).exp();
    let cubic = lambda * lambda * lambda + d.d3 * lambda * lambda + d.d2 * lambda + d.d1;
    (cubic * ep + (d.d4 * lambda + d.d5) + (d.d6 * lambda + d.d7) * em).norm()
}

/// Critical delays belonging to one crossing frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalDelays {
    pub omega: f64,
    pub cos: f64,
    pub sin: f64,
    /// `atan2(sin, cos)` in `[0, 2π)`.
    pub theta: f64,
    /// Validated `τⱼ` in increasing order.
    pub delays: Vec<f64>,
    /// `τⱼ` whose residual exceeded [`residual_tolerance`].
    pub rejected: Vec<f64>,
}

/// The angle `θ = atan2(S, C)` in `[0, 2π)` and the delays
/// `(θ + 2πj)/ω` for `j = 0..=j_max`.
pub fn delay_sequence(cos: f64, sin: f64, omega: f64, j_max: usize) -> (f64, Vec<f64>) {
    let theta = sin.atan2(cos).rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative angles
    let theta = if theta >= TAU { 0.0 } else { theta };
    let delays = (0..=j_max)
        .map(|j| (theta + TAU * j as f64) / omega)
        .collect();
    (theta, delays)
}

/// Solves for `cos ωτ` and `sin ωτ` at `λ = iω` and lists `τⱼ` for
/// `j = 0..=j_max`.
pub fn critical_delays(omega: f64, d: &DeltaSet, j_max: usize) -> Result<CriticalDelays> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "crossing frequency must be positive, got {omega}"
        )));
    }
    let DeltaSet {
        d1,
        d2,
        d3,
        d4,
        d5,
        d6,
        d7,
    } = *d;
    let w = omega;
    let m = w * w;

    let t1 = w * (m - d2);
    let t2 = d1 - d3 * m;
    let den = t1 * t1 + t2 * t2 - d6 * d6 * m - d7 * d7;
    let scale = t1 * t1 + t2 * t2 + d6 * d6 * m + d7 * d7;
    if den == 0.0 || den.abs() <= 1e-14 * scale {
        return Err(Error::SingularDenominator { omega });
    }

    let num_c = d4 * m * (m - d2 + d6) + d5 * (d3 * m - d1 + d7);
    let num_s = w * (d3 * d4 * m + d5 * (d2 + d6 - m) - d1 * d4 - d4 * d7);
    let cos = num_c / den;
    let sin = num_s / den;
    let norm = cos * cos + sin * sin;
    if (norm - 1.0).abs() > TRIG_TOLERANCE {
        return Err(Error::InconsistentCrossing { omega, norm });
    }

    let (theta, candidates) = delay_sequence(cos, sin, omega, j_max);
    let tol = residual_tolerance(omega);
    let lambda = Complex64::new(0.0, omega);
    let mut delays = Vec::new();
    let mut rejected = Vec::new();
    for tau in candidates {
        if quasipoly_residual(lambda, tau, d) <= tol {
            delays.push(tau);
        } else {
            rejected.push(tau);
        }
    }
    Ok(CriticalDelays {
        omega,
        cos,
        sin,
        theta,
        delays,
        rejected,
    })
}

/// Direction in which a root pair crosses the imaginary axis as `τ` increases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossingDirection {
    /// Leftward to rightward: a pair enters the right half-plane.
    Destabilizing,
    /// A pair leaves the right half-plane.
    Stabilizing,
}

impl CrossingDirection {
    pub fn sign(self) -> i32 {
        match self {
            CrossingDirection::Destabilizing => 1,
            CrossingDirection::Stabilizing => -1,
        }
    }
}

impl fmt::Display for CrossingDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CrossingDirection::Destabilizing => "+1",
            CrossingDirection::Stabilizing => "-1",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transversality {
    pub rho: [f64; 4],
    /// `ρ₁ρ₃ + ρ₂ρ₄`; its sign is the sign of `Re dλ/dτ`.
    pub value: f64,
    pub direction: CrossingDirection,
}

/// Sign of `Re (dλ/dτ)` at `λ = iω`, `τ`, from the inverse derivative
/// `(dλ/dτ)⁻¹ = (ρ₃ + iρ₄)/(ρ₁ + iρ₂) − τ/λ`.
pub fn transversality(omega: f64, tau: f64, d: &DeltaSet) -> Result<Transversality> {
    let DeltaSet {
        d2,
        d3,
        d4,
        d5,
        d6,
        d7,
        ..
    } = *d;
    let w = omega;
    let m = w * w;
    let (s, c) = (w * tau).sin_cos();
    let rho1 = -d4 * m - 2.0 * d6 * m * c + 2.0 * d7 * w * s;
    let rho2 = d5 * w + 2.0 * d6 * m * s + 2.0 * d7 * w * c;
    let rho3 = (d2 + d6 - 3.0 * m) * c - 2.0 * d3 * w * s + d4;
    let rho4 = (d2 - d6 - 3.0 * m) * s + 2.0 * d3 * w * c;
    let value = rho1 * rho3 + rho2 * rho4;
    if rho1 * rho1 + rho2 * rho2 == 0.0 || value == 0.0 || !value.is_finite() {
        return Err(Error::DegenerateCrossing { omega });
    }
    let direction = if value > 0.0 {
        CrossingDirection::Destabilizing
    } else {
        CrossingDirection::Stabilizing
    };
    Ok(Transversality {
        rho: [rho1, rho2, rho3, rho4],
        value,
        direction,
    })
}

/// A certified imaginary-axis crossing.
#[derive(Debug, Clone, PartialEq)]
pub struct Crossing {
    pub omega: f64,
    pub delays: CriticalDelays,
    pub transversality: Transversality,
    /// Quasi-polynomial residual at the first validated delay.
    pub residual: f64,
}

impl Crossing {
    pub fn first_delay(&self) -> Option<f64> {
        self.delays.delays.first().copied()
    }
}

/// A positive root of `F` that could not be turned into a crossing.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossingFailure {
    pub omega: f64,
    pub error: Error,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StabilityVerdict {
    UnstableAtZeroDelay {
        rhp_roots: usize,
    },
    AbsolutelyStable,
    /// Stable on `[0, τ₀)`, marginal at `τ₀` where a pair crosses at `±iω₀`.
    StableBelow {
        tau0: f64,
        omega0: f64,
    },
}

impl fmt::Display for StabilityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StabilityVerdict::UnstableAtZeroDelay { rhp_roots } => {
                write!(f, "unstable at zero delay ({rhp_roots} roots with Re > 0)")
            }
            StabilityVerdict::AbsolutelyStable => f.write_str("no crossing: absolutely stable"),
            StabilityVerdict::StableBelow { tau0, .. } => {
                write!(f, "stable on [0, {tau0}), marginal at {tau0}")
            }
        }
    }
}

/// Stability at one particular delay, from root counting along `τ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DelayRegime {
    Stable,
    Unstable {
        rhp_roots: usize,
    },
    /// `τ` coincides with a critical delay.
    Marginal,
    /// `τ` lies beyond the enumerated delays, or the count went negative.
    Undetermined,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    pub deltas: DeltaSet,
    pub routh_hurwitz: RouthHurwitz,
    pub rhp_at_zero: usize,
    pub gammas: GammaSet,
    pub lemma: LemmaReport,
    /// Positive roots of `F`.
    pub frequencies_squared: Vec<f64>,
    pub crossings: Vec<Crossing>,
    pub failures: Vec<CrossingFailure>,
    pub verdict: StabilityVerdict,
}

impl SpectralReport {
    /// Smallest validated critical delay and its frequency.
    pub fn tau0(&self) -> Option<(f64, f64)> {
        self.crossings
            .iter()
            .filter_map(|c| c.first_delay().map(|t| (t, c.omega)))
            .min_by(|a, b| a.0.total_cmp(&b.0))
    }

    /// Counts right-half-plane roots at `tau` by adding `2·sign` for every
    /// validated crossing delay below it.
    pub fn regime_at(&self, tau: f64) -> DelayRegime {
        // Each frequency recurs with period 2π/ω, so the enumeration only
        // covers delays up to its last listed entry.
        let horizon = self
            .crossings
            .iter()
            .map(|c| {
                let d = &c.delays;
                d.delays
                    .iter()
                    .chain(&d.rejected)
                    .fold(0.0, |m: f64, &t| m.max(t))
            })
            .fold(f64::INFINITY, f64::min);
        if tau > horizon || !self.failures.is_empty() {
            return DelayRegime::Undetermined;
        }
        let mut count = self.rhp_at_zero as i64;
        for c in &self.crossings {
            for &t in &c.delays.delays {
                if (t - tau).abs() <= 1e-12 * t.max(1.0) {
                    return DelayRegime::Marginal;
                }
                if t < tau {
                    count += 2 * c.transversality.direction.sign() as i64;
                }
            }
        }
        match count {
            0 => DelayRegime::Stable,
            n if n > 0 => DelayRegime::Unstable {
                rhp_roots: n as usize,
            },
            _ => DelayRegime::Undetermined,
        }
    }
}

/// Full delay-dependent analysis with critical delays enumerated up to `j_max`.
pub fn analyze(d: &DeltaSet, j_max: usize) -> SpectralReport {
    let rh = routh_hurwitz(d);
    let rhp_at_zero = rhp_roots_at_zero_delay(d);
    let gammas = gamma_coefficients(d);
    let lemma = lemma_conditions(&gammas, d);
    let frequencies_squared = crossing_frequencies_squared(&gammas);

    let mut crossings = Vec::new();
    let mut failures = Vec::new();
    for &m in &frequencies_squared {
        let omega = m.sqrt();
        let certified = critical_delays(omega, d, j_max).and_then(|delays| {
            let tau = delays
                .delays
                .first()
                .copied()
                .ok_or(Error::InconsistentCrossing { omega, norm: 1.0 })?;
            let transversality = transversality(omega, tau, d)?;
            let residual = quasipoly_residual(Complex64::new(0.0, omega), tau, d);
            Ok(Crossing {
                omega,
                delays,
                transversality,
                residual,
            })
        });
        match certified {
            Ok(c) => crossings.push(c),
            Err(error) => {
                log::debug!("crossing at omega = {omega} rejected: {error}");
                failures.push(CrossingFailure { omega, error });
            }
        }
    }

    let mut report = SpectralReport {
        deltas: *d,
        routh_hurwitz: rh,
        rhp_at_zero,
        gammas,
        lemma,
        frequencies_squared,
        crossings,
        failures,
        verdict: StabilityVerdict::AbsolutelyStable,
    };
    report.verdict = if !rh.stable {
        StabilityVerdict::UnstableAtZeroDelay {
            rhp_roots: rhp_at_zero,
        }
    } else {
        match report.tau0() {
            Some((tau0, omega0)) => StabilityVerdict::StableBelow { tau0, omega0 },
            None => StabilityVerdict::AbsolutelyStable,
        }
    };
    report
}
