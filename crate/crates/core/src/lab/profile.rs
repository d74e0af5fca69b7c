//! Named test inputs: the ε families fed to the Hardy operators and the
//! monotone sources used directly in place of their outputs.

use std::fmt;
use std::str::FromStr;

use crate::descriptor::{expect_arity, integer, real, serde_via_str, split_call};
use crate::error::{Error, Result};
use crate::grid::{LogGrid, SampledFunction};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Profile {
    Zero,
    Const(f64),
    /// `min(τ^α, τ^{-β})`
    PowerPeak { alpha: f64, beta: f64 },
    /// `τ^α`, unbounded at one end; for closed-form checks
    Power(f64),
    /// `χ_{[2^j, 2^k]}` with value 1/2 at the two jump nodes
    Indicator { j: i32, k: i32 },
    /// `(1 + sin ln τ) · min(τ, 1/τ)^γ`
    LogOsc(f64),
    /// 1 on `(0, 1]`, then `r^k` on `(2^{k-1}, 2^k]`; non-increasing
    StairsDown(f64),
    /// Mirror image of `StairsDown` under `τ ↦ 1/τ`; non-decreasing
    StairsUp(f64),
    /// `min(1, τ^{-r})`
    Decay(f64),
    /// `min(1, τ^r)`
    Rise(f64),
}

impl Profile {
    fn validate(self) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match self {
            Profile::Const(c) if c < 0.0 => bad(format!("const({c}) is negative")),
            Profile::PowerPeak { alpha, beta } if alpha <= 0.0 || beta <= 0.0 => {
                bad(format!("powerpeak({alpha},{beta}) needs positive exponents"))
            }
            Profile::Indicator { j, k } if j >= k => bad(format!("indicator({j},{k}) is empty")),
            Profile::LogOsc(g) if g <= 0.0 => bad(format!("logosc({g}) needs a positive decay")),
            Profile::StairsDown(r) | Profile::StairsUp(r) if !(r > 0.0 && r <= 1.0) => {
                bad(format!("staircase ratio {r} must lie in (0, 1]"))
            }
            Profile::Decay(r) | Profile::Rise(r) if r <= 0.0 => bad(format!("rate {r} must be positive")),
            _ => Ok(self),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Profile::Zero => 0.0,
            Profile::Const(c) => c,
            Profile::PowerPeak { alpha, beta } => t.powf(alpha).min(t.powf(-beta)),
            Profile::Power(alpha) => t.powf(alpha),
            Profile::Indicator { j, k } => {
                let (lo, hi) = (2f64.powi(j), 2f64.powi(k));
                if t == lo || t == hi {
                    0.5
                } else if t > lo && t < hi {
                    1.0
                } else {
                    0.0
                }
            }
            Profile::LogOsc(g) => (1.0 + t.ln().sin()) * t.min(1.0 / t).powf(g),
            Profile::StairsDown(r) => {
                if t <= 1.0 {
                    1.0
                } else {
                    r.powf(t.log2().ceil())
                }
            }
            Profile::StairsUp(r) => Profile::StairsDown(r).eval(1.0 / t),
            Profile::Decay(r) => t.powf(-r).min(1.0),
            Profile::Rise(r) => t.powf(r).min(1.0),
        }
    }

    pub fn sample(&self, grid: &LogGrid) -> Result<SampledFunction> {
        SampledFunction::from_fn(grid, |t| self.eval(t))
    }

    /// Direction of monotonicity, if the profile has one by construction.
    pub fn monotonicity(&self) -> Option<Monotone> {
        match self {
            Profile::Zero | Profile::Const(_) => Some(Monotone::Constant),
            Profile::StairsDown(_) | Profile::Decay(_) => Some(Monotone::NonIncreasing),
            Profile::StairsUp(_) | Profile::Rise(_) => Some(Monotone::NonDecreasing),
            Profile::Power(a) if *a >= 0.0 => Some(Monotone::NonDecreasing),
            Profile::Power(_) => Some(Monotone::NonIncreasing),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Monotone {
    Constant,
    NonIncreasing,
    NonDecreasing,
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Zero => write!(f, "zero"),
            Profile::Const(c) => write!(f, "const({c})"),
            Profile::PowerPeak { alpha, beta } => write!(f, "powerpeak({alpha},{beta})"),
            Profile::Power(a) => write!(f, "power({a})"),
            Profile::Indicator { j, k } => write!(f, "indicator({j},{k})"),
            Profile::LogOsc(g) => write!(f, "logosc({g})"),
            Profile::StairsDown(r) => write!(f, "stairsdown({r})"),
            Profile::StairsUp(r) => write!(f, "stairsup({r})"),
            Profile::Decay(r) => write!(f, "decay({r})"),
            Profile::Rise(r) => write!(f, "rise({r})"),
        }
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = split_call(s)?;
        let arity = match name {
            "zero" => 0,
            "const" | "power" | "logosc" | "stairsdown" | "stairsup" | "decay" | "rise" => 1,
            "powerpeak" | "indicator" => 2,
            other => return Err(Error::parse(s, format!("unknown profile `{other}`"))),
        };
        expect_arity(s, &args, arity)?;
        let x = |i: usize| real(s, args[i]);
        let profile = match name {
            "zero" => Profile::Zero,
            "const" => Profile::Const(x(0)?),
            "power" => Profile::Power(x(0)?),
            "logosc" => Profile::LogOsc(x(0)?),
            "stairsdown" => Profile::StairsDown(x(0)?),
            "stairsup" => Profile::StairsUp(x(0)?),
            "decay" => Profile::Decay(x(0)?),
            "rise" => Profile::Rise(x(0)?),
            "powerpeak" => Profile::PowerPeak { alpha: x(0)?, beta: x(1)? },
            _ => Profile::Indicator {
                j: integer(s, args[0])?,
                k: integer(s, args[1])?,
            },
        };
        profile.validate().map_err(|e| Error::parse(s, e.to_string()))
    }
}

serde_via_str!(Profile);

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn descriptors_round_trip() {
        for text in [
            "zero",
            "const(1.5)",
            "powerpeak(0.5,0.5)",
            "power(-0.25)",
            "indicator(-2,3)",
            "logosc(0.5)",
            "stairsdown(0.5)",
            "stairsup(0.25)",
            "decay(1)",
            "rise(2)",
        ] {
            let p: Profile = text.parse().unwrap();
            assert_eq!(p.to_string(), text);
        }
        for bad in ["indicator(1,1)", "powerpeak(0,1)", "stairsup(2)", "bump(1)", "const(1,2)", "indicator(0.5,2)"] {
            assert!(bad.parse::<Profile>().is_err(), "{bad}");
        }
    }

    #[test]
    fn indicator_integral_is_exact() {
        let g = LogGrid::build(-10, 10, 8).unwrap();
        let f = Profile::Indicator { j: -2, k: 3 }.sample(&g).unwrap();
        assert!((g.integrate(&f).unwrap() - 5.0 * LN_2).abs() < 1e-13);
    }

    #[test]
    fn monotone_profiles_are_monotone_on_grid() {
        let g = LogGrid::build(-12, 12, 8).unwrap();
        for p in [
            Profile::StairsDown(0.5),
            Profile::StairsUp(0.5),
            Profile::Decay(1.0),
            Profile::Rise(0.5),
        ] {
            let v = p.sample(&g).unwrap();
            let v = v.values();
            let ok = match p.monotonicity().unwrap() {
                Monotone::NonIncreasing => v.windows(2).all(|w| w[1] <= w[0]),
                Monotone::NonDecreasing => v.windows(2).all(|w| w[1] >= w[0]),
                Monotone::Constant => unreachable!(),
            };
            assert!(ok, "{p}");
        }
    }

    #[test]
    fn staircase_values() {
        let p = Profile::StairsDown(0.5);
        assert_eq!(p.eval(0.25), 1.0);
        assert_eq!(p.eval(2.0), 0.5);
        assert_eq!(p.eval(3.0), 0.25);
        assert_eq!(Profile::StairsUp(0.5).eval(0.375), 0.25);
    }
}
