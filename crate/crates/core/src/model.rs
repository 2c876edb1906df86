//! Parameters, state and the delayed vector field of the three-population
//! wild / sterile / non-sterile mosquito model.
//!
//! ```text
//! w' = ((a w + r s_τ) / (1 + w + g + s_τ) − ξ₁ (w + g + s_τ)) w
//! g' = b w / (1 + w) − ξ₂ (w + g + s) g
//! s' = c w / (1 + w) + ((r s + a w_τ) / (1 + w_τ + g + s) − ξ₃ (w_τ + g + s)) s
//! ```
//!
//! where `x_τ = x(t − τ)`. The g-equation uses the undelayed `s(t)` in its
//! death term while the w-equation uses `s(t − τ)`; both are kept as written.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Biological parameters plus the delay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub(crate) a: f64,
    pub(crate) b: f64,
    pub(crate) c: f64,
    pub(crate) r: f64,
    pub(crate) xi1: f64,
    pub(crate) xi2: f64,
    pub(crate) xi3: f64,
    pub(crate) tau: f64,
}

/// Identifies one entry of [`ModelParams`]; used by scans and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamId {
    A,
    B,
    C,
    R,
    Xi1,
    Xi2,
    Xi3,
    Tau,
}

impl ParamId {
    pub const ALL: [ParamId; 8] = [
        ParamId::A,
        ParamId::B,
        ParamId::C,
        ParamId::R,
        ParamId::Xi1,
        ParamId::Xi2,
        ParamId::Xi3,
        ParamId::Tau,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ParamId::A => "a",
            ParamId::B => "b",
            ParamId::C => "c",
            ParamId::R => "r",
            ParamId::Xi1 => "xi1",
            ParamId::Xi2 => "xi2",
            ParamId::Xi3 => "xi3",
            ParamId::Tau => "tau",
        }
    }

    /// Biologically plausible range used for sampling and range warnings.
    pub fn plausible_range(self) -> (f64, f64) {
        match self {
            ParamId::A => (1.0, 20.0),
            ParamId::B => (5.0, 25.0),
            ParamId::C => (0.01, 25.0),
            ParamId::R => (1.0, 20.0),
            ParamId::Xi1 => (0.02, 3.5),
            ParamId::Xi2 => (1.5, 2.5),
            ParamId::Xi3 => (0.1, 2.5),
            ParamId::Tau => (0.1, 7.0),
        }
    }
}

impl fmt::Display for ParamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ParamId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ParamId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown parameter `{s}`")))
    }
}

impl ModelParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a: f64,
        b: f64,
        c: f64,
        r: f64,
        xi1: f64,
        xi2: f64,
        xi3: f64,
        tau: f64,
    ) -> Result<Self> {
        let p = ModelParams {
            a,
            b,
            c,
            r,
            xi1,
            xi2,
            xi3,
            tau,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        for id in ParamId::ALL {
            let value = self.get(id);
            let ok = match id {
                ParamId::C | ParamId::Tau => value.is_finite() && value >= 0.0,
                _ => value.is_finite() && value > 0.0,
            };
            if !ok {
                return Err(Error::InvalidParameter {
                    name: id.name(),
                    value,
                });
            }
        }
        Ok(())
    }

    pub fn get(&self, id: ParamId) -> f64 {
        match id {
            ParamId::A => self.a,
            ParamId::B => self.b,
            ParamId::C => self.c,
            ParamId::R => self.r,
            ParamId::Xi1 => self.xi1,
            ParamId::Xi2 => self.xi2,
            ParamId::Xi3 => self.xi3,
            ParamId::Tau => self.tau,
        }
    }

    /// Copy with one parameter replaced; the result is re-validated.
    pub fn with(&self, id: ParamId, value: f64) -> Result<Self> {
        let mut p = *self;
        match id {
            ParamId::A => p.a = value,
            ParamId::B => p.b = value,
            ParamId::C => p.c = value,
            ParamId::R => p.r = value,
            ParamId::Xi1 => p.xi1 = value,
            ParamId::Xi2 => p.xi2 = value,
            ParamId::Xi3 => p.xi3 = value,
            ParamId::Tau => p.tau = value,
        }
        p.validate()?;
        Ok(p)
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn xi1(&self) -> f64 {
        self.xi1
    }
    pub fn xi2(&self) -> f64 {
        self.xi2
    }
    pub fn xi3(&self) -> f64 {
        self.xi3
    }
    pub fn tau(&self) -> f64 {
        self.tau
    }
}

/// Population triple. Derivatives reuse the same type with unrestricted sign.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State {
    pub w: f64,
    pub g: f64,
    pub s: f64,
}

/// One of the three populations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    W,
    G,
    S,
}

impl Component {
    pub fn index(self) -> usize {
        match self {
            Component::W => 0,
            Component::G => 1,
            Component::S => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Component::W => "w",
            Component::G => "g",
            Component::S => "s",
        }
    }
}

impl FromStr for Component {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "w" => Ok(Component::W),
            "g" => Ok(Component::G),
            "s" => Ok(Component::S),
            other => Err(Error::InvalidInput(format!("unknown component `{other}`"))),
        }
    }
}

impl State {
    pub const ZERO: State = State {
        w: 0.0,
        g: 0.0,
        s: 0.0,
    };

    pub fn new(w: f64, g: f64, s: f64) -> Self {
        State { w, g, s }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.w, self.g, self.s]
    }

    pub fn component(&self, c: Component) -> f64 {
        self.to_array()[c.index()]
    }

    pub fn total(&self) -> f64 {
        self.w + self.g + self.s
    }

    pub fn norm(&self) -> f64 {
        (self.w * self.w + self.g * self.g + self.s * self.s).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.w.is_finite() && self.g.is_finite() && self.s.is_finite()
    }
}

impl From<[f64; 3]> for State {
    fn from(x: [f64; 3]) -> Self {
        State::new(x[0], x[1], x[2])
    }
}

impl From<State> for [f64; 3] {
    fn from(x: State) -> Self {
        x.to_array()
    }
}

impl Add for State {
    type Output = State;
    fn add(self, o: State) -> State {
        State::new(self.w + o.w, self.g + o.g, self.s + o.s)
    }
}

impl Sub for State {
    type Output = State;
    fn sub(self, o: State) -> State {
        State::new(self.w - o.w, self.g - o.g, self.s - o.s)
    }
}

impl Mul<State> for f64 {
    type Output = State;
    fn mul(self, x: State) -> State {
        State::new(self * x.w, self * x.g, self * x.s)
    }
}

/// Evaluates the delayed vector field. `delayed` supplies `s(t − τ)` for the
/// w-equation and `w(t − τ)` for the s-equation.
pub fn rhs(current: State, delayed: State, p: &ModelParams) -> Result<State> {
    if !current.is_finite() || !delayed.is_finite() {
        return Err(Error::InvalidInput(format!(
            "non-finite state: current = {current:?}, delayed = {delayed:?}"
        )));
    }
    Ok(vector_field(current, delayed, p))
}

#[inline]
pub(crate) fn vector_field(x: State, d: State, p: &ModelParams) -> State {
    let State { w, g, s } = x;
    let (w_lag, s_lag) = (d.w, d.s);

    let total_w = w + g + s_lag;
    let dw = ((p.a * w + p.r * s_lag) / (1.0 + total_w) - p.xi1 * total_w) * w;

    let dg = p.b * w / (1.0 + w) - p.xi2 * (w + g + s) * g;

    let total_s = w_lag + g + s;
    let ds =
        p.c * w / (1.0 + w) + ((p.r * s + p.a * w_lag) / (1.0 + total_s) - p.xi3 * total_s) * s;

    State::new(dw, dg, ds)
}

/// The undelayed system: `rhs` with `delayed = current`.
pub fn rhs_undelayed(x: State, p: &ModelParams) -> State {
    vector_field(x, x, p)
}

/// Central finite-difference Jacobian of the undelayed system.
pub(crate) fn undelayed_jacobian(x: State, p: &ModelParams, h: f64) -> [[f64; 3]; 3] {
    let base = x.to_array();
    let mut jac = [[0.0; 3]; 3];
    for col in 0..3 {
        let mut plus = base;
        let mut minus = base;
        plus[col] += h;
        minus[col] -= h;
        let fp = rhs_undelayed(plus.into(), p).to_array();
        let fm = rhs_undelayed(minus.into(), p).to_array();
        for row in 0..3 {
            jac[row][col] = (fp[row] - fm[row]) / (2.0 * h);
        }
    }
    jac
}

/// Box bounding the long-run populations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaBox {
    pub w_max: f64,
    pub g_max: f64,
    pub s_max: f64,
}

impl OmegaBox {
    pub fn max_total(&self) -> f64 {
        self.w_max + self.g_max + self.s_max
    }

    /// The box scaled by `1 + rel` in every direction.
    pub fn inflated(&self, rel: f64) -> OmegaBox {
        OmegaBox {
            w_max: self.w_max * (1.0 + rel),
            g_max: self.g_max * (1.0 + rel),
            s_max: self.s_max * (1.0 + rel),
        }
    }
}

pub fn omega_box(p: &ModelParams) -> OmegaBox {
    OmegaBox {
        w_max: p.a / p.xi1,
        g_max: (p.b / p.xi2).sqrt(),
        s_max: (p.r + (p.r * p.r + 4.0 * p.xi3 * p.c).sqrt()) / (2.0 * p.xi3),
    }
}

pub fn in_omega(x: State, bx: &OmegaBox) -> bool {
    (0.0..=bx.w_max).contains(&x.w)
        && (0.0..=bx.g_max).contains(&x.g)
        && (0.0..=bx.s_max).contains(&x.s)
}
