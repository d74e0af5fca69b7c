//! Variable exponents `p: (0, ∞) → [1, ∞)`.
//!
//! Built-in families are closed-form, and their endpoint values `p(0)` and
//! `p_∞` are computed analytically at construction. Log-Hölder constants are
//! estimated as suprema over grid nodes, which only ever bound the true
//! constants from below.

use std::f64::consts::E;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::descriptor::{self, serde_via_str};
use crate::error::{Error, Result};
use crate::grid::{GridSpec, LogGrid};

/// Lower clamp applied by the perturbed family.
pub const PERTURBED_FLOOR: f64 = 1.0 + 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    Constant,
    LogInterp,
    LogPerturbed,
}

impl FamilyKind {
    pub fn arity(self) -> usize {
        match self {
            FamilyKind::Constant => 1,
            FamilyKind::LogInterp => 2,
            FamilyKind::LogPerturbed => 4,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            FamilyKind::Constant => "const",
            FamilyKind::LogInterp => "loginterp",
            FamilyKind::LogPerturbed => "logpert",
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "const" | "constant" => Ok(FamilyKind::Constant),
            "loginterp" => Ok(FamilyKind::LogInterp),
            "logpert" => Ok(FamilyKind::LogPerturbed),
            _ => Err(Error::parse(s, "expected `const`, `loginterp` or `logpert`")),
        }
    }
}

serde_via_str!(FamilyKind);

type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Family {
    Constant(f64),
    /// `p_inf + (p0 - p_inf) / ln(e + t)`
    LogInterp { p0: f64, pinf: f64 },
    /// log-interpolation base plus `A sin(ln(e + t) + phase) / ln(e + t)`
    LogPerturbed {
        p0: f64,
        pinf: f64,
        amplitude: f64,
        phase: f64,
    },
    Custom { name: String, eval: Evaluator },
}

/// An exponent function together with its limits at the origin and at
/// infinity. Immutable once built; cheap to clone.
#[derive(Clone)]
pub struct ExponentFunction {
    family: Family,
    p_zero: f64,
    p_infinity: f64,
}

fn log_interp(p0: f64, pinf: f64, t: f64) -> f64 {
    pinf + (p0 - pinf) / (E + t).ln()
}

impl ExponentFunction {
    pub fn constant(c: f64) -> Result<Self> {
        Self::make(FamilyKind::Constant, &[c])
    }

    pub fn log_interp(p0: f64, pinf: f64) -> Result<Self> {
        Self::make(FamilyKind::LogInterp, &[p0, pinf])
    }

    pub fn log_perturbed(p0: f64, pinf: f64, amplitude: f64, phase: f64) -> Result<Self> {
        Self::make(FamilyKind::LogPerturbed, &[p0, pinf, amplitude, phase])
    }

    /// Builds a built-in family from its kind and parameter list.
    pub fn make(kind: FamilyKind, params: &[f64]) -> Result<Self> {
        if params.len() != kind.arity() {
            return Err(Error::InvalidFamily(format!(
                "{} takes {} parameter(s), got {}",
                kind.tag(),
                kind.arity(),
                params.len()
            )));
        }
        if let Some(bad) = params.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidFamily(format!("non-finite parameter {bad}")));
        }
        let below_one = |what: &str, v: f64| {
            Error::InvalidFamily(format!("{} has {what} = {v} < 1", kind.tag()))
        };
        let p = match kind {
            FamilyKind::Constant => {
                let c = params[0];
                if c < 1.0 {
                    return Err(below_one("value", c));
                }
                ExponentFunction {
                    family: Family::Constant(c),
                    p_zero: c,
                    p_infinity: c,
                }
            }
            FamilyKind::LogInterp | FamilyKind::LogPerturbed => {
                let (p0, pinf) = (params[0], params[1]);
                // The interpolation stays between its endpoints, so these two
                // checks cover every t > 0.
                if p0 < 1.0 {
                    return Err(below_one("p(0)", p0));
                }
                if pinf < 1.0 {
                    return Err(below_one("p_inf", pinf));
                }
                if kind == FamilyKind::LogInterp {
                    ExponentFunction {
                        family: Family::LogInterp { p0, pinf },
                        p_zero: p0,
                        p_infinity: pinf,
                    }
                } else {
                    let (amplitude, phase) = (params[2], params[3]);
                    // ln(e + t) -> 1 as t -> 0 and the perturbation vanishes at infinity.
                    ExponentFunction {
                        family: Family::LogPerturbed {
                            p0,
                            pinf,
                            amplitude,
                            phase,
                        },
                        p_zero: (p0 + amplitude * (1.0 + phase).sin()).max(PERTURBED_FLOOR),
                        p_infinity: pinf.max(PERTURBED_FLOOR),
                    }
                }
            }
        };
        Ok(p)
    }

    /// Wraps a user-supplied evaluator. The endpoint values are taken as
    /// given; the evaluator is checked to stay `>= 1` on the default grid.
    pub fn custom(
        name: impl Into<String>,
        p_zero: f64,
        p_infinity: f64,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(p_zero >= 1.0 && p_infinity >= 1.0 && p_zero.is_finite() && p_infinity.is_finite()) {
            return Err(Error::InvalidFamily(format!(
                "endpoint values ({p_zero}, {p_infinity}) must be finite and >= 1"
            )));
        }
        let p = ExponentFunction {
            family: Family::Custom {
                name: name.into(),
                eval: Arc::new(eval),
            },
            p_zero,
            p_infinity,
        };
        p.sample(&GridSpec::default().build()?)?;
        Ok(p)
    }

    pub fn kind(&self) -> Option<FamilyKind> {
        match self.family {
            Family::Constant(_) => Some(FamilyKind::Constant),
            Family::LogInterp { .. } => Some(FamilyKind::LogInterp),
            Family::LogPerturbed { .. } => Some(FamilyKind::LogPerturbed),
            Family::Custom { .. } => None,
        }
    }

    pub fn p_zero(&self) -> f64 {
        self.p_zero
    }

    pub fn p_infinity(&self) -> f64 {
        self.p_infinity
    }

    /// True when the exponent is identically constant.
    pub fn is_constant(&self) -> bool {
        match self.family {
            Family::Constant(_) => true,
            Family::LogInterp { p0, pinf } => p0 == pinf,
            Family::LogPerturbed { p0, pinf, amplitude, .. } => p0 == pinf && amplitude == 0.0,
            Family::Custom { .. } => false,
        }
    }

    fn raw(&self, t: f64) -> f64 {
        match &self.family {
            Family::Constant(c) => *c,
            Family::LogInterp { p0, pinf } => log_interp(*p0, *pinf, t),
            Family::LogPerturbed {
                p0,
                pinf,
                amplitude,
                phase,
            } => {
                let l = (E + t).ln();
                (log_interp(*p0, *pinf, t) + amplitude * (l + phase).sin() / l).max(PERTURBED_FLOOR)
            }
            Family::Custom { eval, .. } => eval(t),
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidPoint(t));
        }
        let value = self.raw(t);
        if !(value >= 1.0 && value.is_finite()) {
            return Err(Error::ExponentBelowOne { t, value });
        }
        Ok(value)
    }

    /// Exponent values at every node of `grid`.
    pub fn sample(&self, grid: &LogGrid) -> Result<Vec<f64>> {
        grid.nodes().iter().map(|&t| self.eval(t)).collect()
    }

    /// `(p⁻, p⁺)` over the grid nodes.
    pub fn grid_range(&self, grid: &LogGrid) -> Result<(f64, f64)> {
        let values = self.sample(grid)?;
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok((lo, hi))
    }

    /// `max_t |p(t) - p(0)| ln(e + 1/t)` over the grid.
    pub fn log_holder_origin_constant(&self, grid: &LogGrid) -> Result<f64> {
        let p0 = self.p_zero;
        sup_over_nodes(grid, |t| Ok((self.eval(t)? - p0).abs() * (E + 1.0 / t).ln()))
    }

    /// `max_t |p(t) - p_∞| ln(e + t)` over the grid.
    pub fn log_holder_infinity_constant(&self, grid: &LogGrid) -> Result<f64> {
        let pinf = self.p_infinity;
        sup_over_nodes(grid, |t| Ok((self.eval(t)? - pinf).abs() * (E + t).ln()))
    }

    /// Origin constant of `1/p`, the quantity that sets `γ` in the
    /// Jensen-type estimate.
    pub fn reciprocal_origin_constant(&self, grid: &LogGrid) -> Result<f64> {
        let r0 = 1.0 / self.p_zero;
        sup_over_nodes(grid, |t| Ok((1.0 / self.eval(t)? - r0).abs() * (E + 1.0 / t).ln()))
    }

    /// Decay constant of `1/p` at infinity.
    pub fn reciprocal_infinity_constant(&self, grid: &LogGrid) -> Result<f64> {
        let rinf = 1.0 / self.p_infinity;
        sup_over_nodes(grid, |t| Ok((1.0 / self.eval(t)? - rinf).abs() * (E + t).ln()))
    }
}

fn sup_over_nodes(grid: &LogGrid, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    grid.nodes()
        .iter()
        .try_fold(0.0f64, |acc, &t| Ok(acc.max(f(t)?)))
}

impl fmt::Debug for ExponentFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExponentFunction")
            .field("family", &self.to_string())
            .field("p_zero", &self.p_zero)
            .field("p_infinity", &self.p_infinity)
            .finish()
    }
}

/// Equality of descriptors and endpoint values. Custom evaluators are
/// compared by name only.
impl PartialEq for ExponentFunction {
    fn eq(&self, other: &Self) -> bool {
        self.p_zero == other.p_zero && self.p_infinity == other.p_infinity && self.to_string() == other.to_string()
    }
}

impl fmt::Display for ExponentFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            Family::Constant(c) => write!(f, "const({c})"),
            Family::LogInterp { p0, pinf } => write!(f, "loginterp({p0},{pinf})"),
            Family::LogPerturbed {
                p0,
                pinf,
                amplitude,
                phase,
            } => write!(f, "logpert({p0},{pinf},{amplitude},{phase})"),
            Family::Custom { name, .. } => write!(f, "custom({name})"),
        }
    }
}

impl FromStr for ExponentFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = descriptor::split_call(s)?;
        let kind = match name {
            "const" | "constant" => FamilyKind::Constant,
            "loginterp" => FamilyKind::LogInterp,
            "logpert" => FamilyKind::LogPerturbed,
            other => {
                return Err(Error::parse(
                    s,
                    format!("unknown exponent family `{other}` (const, loginterp, logpert)"),
                ))
            }
        };
        descriptor::expect_arity(s, &args, kind.arity())?;
        let params = args
            .iter()
            .map(|a| descriptor::real(s, a))
            .collect::<Result<Vec<_>>>()?;
        ExponentFunction::make(kind, &params).map_err(|e| Error::parse(s, e.to_string()))
    }
}

serde_via_str!(ExponentFunction);
