//! Trivial, boundary and positive equilibria of the undelayed system.
//!
//! Positive equilibria are parameterised by the total population
//! `N = w + g + s`: for a given `N` the closed forms below give `(w, g, s)`, and
//! `N` must satisfy `H(N) = N − (w + g + s) = 0`. Roots of `H` are bracketed on a
//! uniform grid over `(ε, N_max]` and refined by bisection.

use log::debug;

use crate::error::{Error, Result};
use crate::model::{omega_box, rhs_undelayed, ModelParams, State};

/// Residual tolerance, scaled by `max(1, ‖x‖)`.
pub const RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquilibriumKind {
    Trivial,
    Boundary,
    Positive,
}

/// A named existence condition and whether it holds.
#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub name: &'static str,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumReport {
    pub kind: EquilibriumKind,
    pub location: State,
    /// Total population; only set for positive equilibria.
    pub total: Option<f64>,
    pub conditions: Vec<Condition>,
    /// `‖rhs(x, x)‖`.
    pub residual: f64,
}

impl EquilibriumReport {
    fn new(kind: EquilibriumKind, location: State, total: Option<f64>, p: &ModelParams) -> Self {
        EquilibriumReport {
            kind,
            location,
            total,
            conditions: conditions(p),
            residual: rhs_undelayed(location, p).norm(),
        }
    }

    pub fn residual_ok(&self) -> bool {
        self.residual <= RESIDUAL_TOL * self.location.norm().max(1.0)
    }
}

pub const H1: &str = "H1: xi3 > xi1";
pub const BOUNDARY_EXISTS: &str = "r > xi3";

fn conditions(p: &ModelParams) -> Vec<Condition> {
    vec![
        Condition {
            name: H1,
            satisfied: p.xi3 > p.xi1,
        },
        Condition {
            name: BOUNDARY_EXISTS,
            satisfied: p.r > p.xi3,
        },
    ]
}

pub fn trivial_equilibrium(p: &ModelParams) -> EquilibriumReport {
    EquilibriumReport::new(EquilibriumKind::Trivial, State::ZERO, None, p)
}

/// `E⁰ = (0, 0, (r − ξ₃)/ξ₃)`, present only when `r > ξ₃`.
pub fn boundary_equilibrium(p: &ModelParams) -> Option<EquilibriumReport> {
    if p.r > p.xi3 {
        let s0 = (p.r - p.xi3) / p.xi3;
        Some(EquilibriumReport::new(
            EquilibriumKind::Boundary,
            State::new(0.0, 0.0, s0),
            None,
            p,
        ))
    } else {
        None
    }
}

fn check_nondegenerate(p: &ModelParams) -> Result<()> {
    if p.xi1 == p.xi3 {
        return Err(Error::DegenerateParameters(
            "xi1 = xi3 makes the positive-equilibrium formulas singular".into(),
        ));
    }
    if p.c == 0.0 {
        return Err(Error::DegenerateParameters(
            "c = 0 makes the positive-equilibrium formula for g singular".into(),
        ));
    }
    Ok(())
}

/// Discriminant of the positive-equilibrium formulas at total population `n`.
/// Non-negative for valid parameters up to rounding.
pub fn alpha(n: f64, p: &ModelParams) -> f64 {
    let ModelParams {
        a, c, r, xi1, xi3, ..
    } = *p;
    let lead = (xi3 - xi1) * n * (a + xi1 * n * (n + 1.0)) + c * r;
    lead * lead + 4.0 * c * xi1 * (xi1 - xi3) * (n + 1.0) * n * n * r
}

/// `(w, g, s)` as functions of the total population `n`.
pub fn state_for_total(n: f64, p: &ModelParams) -> Result<State> {
    check_nondegenerate(p)?;
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::InvalidInput(format!(
            "total population must be > 0, got {n}"
        )));
    }
    let al = alpha(n, p);
    if al < 0.0 {
        return Err(Error::ComplexBranch { n, alpha: al });
    }
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
    let root = al.sqrt();
    let dx = xi1 - xi3;
    let growth = a + xi1 * n * (n + 1.0);

    let w = (dx * n * (xi1 * n * (n + 1.0) - a) + c * r - root) / (2.0 * a * dx * n);
    let g = (b * (c * r - dx * n * growth) - b * root) / (2.0 * c * xi2 * n * r);
    let s = (dx * n * growth - c * r + root) / (2.0 * dx * n * r);
    Ok(State::new(w, g, s))
}

/// `H(N) = N − (w + g + s)`.
pub fn h_of_n(n: f64, p: &ModelParams) -> Result<f64> {
    Ok(n - state_for_total(n, p)?.total())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositiveSearch {
    /// Number of grid points over `(ε, N_max]`.
    pub grid_points: usize,
    /// Lower scan bound as a fraction of `N_max`.
    pub lower_fraction: f64,
    /// Refined roots must satisfy `|H| ≤ tol · N_max`.
    pub h_tolerance: f64,
}

impl Default for PositiveSearch {
    fn default() -> Self {
        PositiveSearch {
            grid_points: 10_000,
            lower_fraction: 1e-6,
            h_tolerance: 1e-10,
        }
    }
}

pub fn positive_equilibria(p: &ModelParams) -> Result<Vec<EquilibriumReport>> {
    positive_equilibria_with(p, &PositiveSearch::default())
}

pub fn positive_equilibria_with(
    p: &ModelParams,
    search: &PositiveSearch,
) -> Result<Vec<EquilibriumReport>> {
    check_nondegenerate(p)?;
    if search.grid_points < 2 {
        return Err(Error::InvalidInput("grid needs at least 2 points".into()));
    }
    let n_max = omega_box(p).max_total();
    let lo = search.lower_fraction * n_max;
    let step = (n_max - lo) / (search.grid_points - 1) as f64;
    let tol = search.h_tolerance * n_max;

    let grid: Vec<(f64, Option<f64>)> = (0..search.grid_points)
        .map(|i| {
            let n = if i + 1 == search.grid_points {
                n_max
            } else {
                lo + i as f64 * step
            };
            (n, h_of_n(n, p).ok())
        })
        .collect();
    let excluded = grid.iter().filter(|(_, h)| h.is_none()).count();
    if excluded > 0 {
        debug!("{excluded} grid points excluded from the equilibrium scan (alpha < 0)");
    }

    let mut roots = Vec::new();
    for (i, &(n, h)) in grid.iter().enumerate() {
        if h == Some(0.0) {
            roots.push(n);
            continue;
        }
        let Some(&(n_next, h_next)) = grid.get(i + 1) else {
            break;
        };
        if let (Some(h0), Some(h1)) = (h, h_next) {
            if h0 * h1 < 0.0 {
                if let Some(root) = bisect(n, h0, n_next, tol, p) {
                    roots.push(root);
                }
            }
        }
    }

    let mut reports = Vec::new();
    for n in roots {
        let Ok(x) = state_for_total(n, p) else {
            continue;
        };
        if !(x.w > 0.0 && x.g > 0.0 && x.s > 0.0) {
            debug!("root N = {n} rejected: non-positive component {x:?}");
            continue;
        }
        let report = EquilibriumReport::new(EquilibriumKind::Positive, x, Some(n), p);
        if report.residual_ok() {
            reports.push(report);
        } else {
            debug!("root N = {n} rejected: residual {}", report.residual);
        }
    }
    Ok(reports)
}

/// Bisects to full floating-point resolution, then checks `|H| ≤ tol`.
fn bisect(mut lo: f64, mut h_lo: f64, mut hi: f64, tol: f64, p: &ModelParams) -> Option<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let h_mid = h_of_n(mid, p).ok()?;
        if h_mid == 0.0 {
            return Some(mid);
        }
        if h_lo * h_mid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            h_lo = h_mid;
        }
    }
    let root = if h_lo.abs() <= h_of_n(hi, p).ok()?.abs() {
        lo
    } else {
        hi
    };
    let h = h_of_n(root, p).ok()?;
    if h.abs() <= tol {
        Some(root)
    } else {
        debug!(
            "bracket at N = {root} did not reach |H| <= {tol} (|H| = {})",
            h.abs()
        );
        None
    }
}

/// All equilibria of the undelayed system together with the existence flags.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumSummary {
    pub trivial: EquilibriumReport,
    pub boundary: Option<EquilibriumReport>,
    pub positive: Vec<EquilibriumReport>,
    pub conditions: Vec<Condition>,
}

pub fn find_equilibria(p: &ModelParams) -> Result<EquilibriumSummary> {
    Ok(EquilibriumSummary {
        trivial: trivial_equilibrium(p),
        boundary: boundary_equilibrium(p),
        positive: positive_equilibria(p)?,
        conditions: conditions(p),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> ModelParams {
        ModelParams::new(18.0, 35.0, 0.19, 0.99, 0.02, 1.5, 0.1, 0.0).unwrap()
    }

    #[test]
    fn boundary_closed_form() {
        let s0 = boundary_equilibrium(&example()).unwrap().location.s;
        assert!((s0 - 8.9).abs() < 1e-14);

        let scanned = ModelParams::new(5.0, 18.0, 0.05, 1.0, 0.5, 0.2, 0.3, 0.0).unwrap();
        let e0 = boundary_equilibrium(&scanned).unwrap();
        assert!((e0.location.s - 7.0 / 3.0).abs() < 1e-14);
        assert!(e0.residual_ok());

        let edge = example().with(crate::ParamId::R, 0.1).unwrap();
        assert!(boundary_equilibrium(&edge).is_none());
    }

    #[test]
    fn h_near_reported_root() {
        assert!(h_of_n(898.972, &example()).unwrap().abs() <= 1e-2);
    }

    #[test]
    fn h_at_one() {
        // Evaluated independently with 30-digit arithmetic.
        let h = h_of_n(1.0, &example()).unwrap();
        assert!((h - 0.947_592_533_924_229_8).abs() < 1e-9, "{h}");
    }

    #[test]
    fn degenerate_parameters() {
        let p = example().with(crate::ParamId::Xi3, 0.02).unwrap();
        assert!(matches!(
            h_of_n(10.0, &p),
            Err(Error::DegenerateParameters(_))
        ));
        assert!(matches!(
            positive_equilibria(&p),
            Err(Error::DegenerateParameters(_))
        ));
        let p = example().with(crate::ParamId::C, 0.0).unwrap();
        assert!(matches!(
            positive_equilibria(&p),
            Err(Error::DegenerateParameters(_))
        ));
    }

    proptest::proptest! {
        // (δX + cr)² ≥ 4·cr·δX ≥ 4cξ₁δ(N+1)N²r with δ = ξ₃ − ξ₁ and X = aN + ξ₁N²(N+1).
        #[test]
        fn alpha_nonnegative(
            a in 0.1f64..20.0, c in 0.0f64..25.0, r in 0.1f64..20.0,
            xi1 in 0.02f64..3.5, xi3 in 0.02f64..3.5, n in 1e-6f64..1e3,
        ) {
            let p = ModelParams::new(a, 1.0, c, r, xi1, 1.0, xi3, 0.0).unwrap();
            let al = alpha(n, &p);
            let lead = (xi3 - xi1) * n * (a + xi1 * n * (n + 1.0)) + c * r;
            proptest::prop_assert!(al >= -1e-12 * lead * lead);
        }
    }

    #[test]
    fn example_equilibrium() {
        let reports = positive_equilibria(&example()).unwrap();
        assert_eq!(reports.len(), 1);
        let e = &reports[0];
        assert!((e.total.unwrap() - 898.972).abs() <= 1e-3);
        let x = e.location;
        assert!((x.total() - e.total.unwrap()).abs() <= 1e-8 * x.total());
        assert!(e.residual_ok());
        assert!(e.conditions.iter().any(|c| c.name == H1 && c.satisfied));
    }

    #[test]
    fn h1_violation_flagged() {
        let p = ModelParams::new(5.0, 18.0, 0.05, 1.0, 0.5, 0.2, 0.3, 0.0).unwrap();
        let summary = find_equilibria(&p).unwrap();
        assert!(summary
            .conditions
            .iter()
            .any(|c| c.name == H1 && !c.satisfied));
    }

    #[test]
    fn high_fertility_reports_pass_residual() {
        let p = ModelParams::new(5.0, 18.0, 2.89, 1.0, 1.5, 1.2, 2.3, 0.0).unwrap();
        for e in positive_equilibria(&p).unwrap() {
            assert!(e.residual_ok());
            assert!(e.location.w > 0.0 && e.location.g > 0.0 && e.location.s > 0.0);
        }
    }
}
