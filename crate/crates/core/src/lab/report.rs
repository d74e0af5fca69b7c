use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::descriptor::serde_via_str;
use crate::error::{Error, Result};
use crate::exponent::ExponentFunction;
use crate::grid::GridSpec;
use crate::lab::profile::Profile;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Which {
    Eta,
    Lambda,
    /// Both operators at once; used by the one-sided sum bound.
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    /// Norms over `(0, ∞)`; two-term right side split at 1.
    #[default]
    Full,
    /// Norms over `(0, 1]`; single-term right side.
    Unit,
}

impl fmt::Display for Which {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Which::Eta => "eta",
            Which::Lambda => "lambda",
            Which::Both => "both",
        })
    }
}

impl FromStr for Which {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "eta" => Ok(Which::Eta),
            "lambda" => Ok(Which::Lambda),
            "both" => Ok(Which::Both),
            _ => Err(Error::parse(s, "expected `eta`, `lambda` or `both`")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Full => "full",
            Mode::Unit => "unit",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "full" => Ok(Mode::Full),
            "unit" => Ok(Mode::Unit),
            _ => Err(Error::parse(s, "expected `full` or `unit`")),
        }
    }
}

serde_via_str!(Which);
serde_via_str!(Mode);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flag {
    /// One side vanished; ratios are undefined.
    Degenerate,
    /// A ratio moved by more than the stability threshold when the node
    /// density doubled.
    RefinementUnstable,
    /// A ratio moved by more than the stability threshold when the grid
    /// was extended by five octaves at either end.
    TailUnstable,
}

impl Flag {
    fn tag(self) -> &'static str {
        match self {
            Flag::Degenerate => "degenerate",
            Flag::RefinementUnstable => "refinement_unstable",
            Flag::TailUnstable => "tail_unstable",
        }
    }
}

/// A set of flags, written as `a;b` (empty when none are raised).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Flags(Vec<Flag>);

impl Flags {
    pub fn insert(&mut self, flag: Flag) {
        if let Err(pos) = self.0.binary_search(&flag) {
            self.0.insert(pos, flag);
        }
    }

    pub fn contains(&self, flag: Flag) -> bool {
        self.0.contains(&flag)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Flag> + '_ {
        self.0.iter().copied()
    }
}

impl fmt::Display for Flags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tags: Vec<_> = self.0.iter().map(|g| g.tag()).collect();
        f.write_str(&tags.join(";"))
    }
}

impl FromStr for Flags {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut flags = Flags::default();
        for tag in s.split(';').map(str::trim).filter(|t| !t.is_empty()) {
            let flag = [Flag::Degenerate, Flag::RefinementUnstable, Flag::TailUnstable]
                .into_iter()
                .find(|f| f.tag() == tag)
                .ok_or_else(|| Error::parse(s, format!("unknown flag `{tag}`")))?;
            flags.insert(flag);
        }
        Ok(flags)
    }
}

serde_via_str!(Flags);

/// One instance of an equivalence: operator, exponent, weight, input and
/// grid.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub id: String,
    pub exponent: ExponentFunction,
    pub s: f64,
    pub eps: Profile,
    pub which: Which,
    pub mode: Mode,
    pub grid: GridSpec,
}

impl Scenario {
    /// Scenario with an id derived from its parameters.
    pub fn new(exponent: ExponentFunction, s: f64, eps: Profile, which: Which, mode: Mode, grid: GridSpec) -> Self {
        let id = format!("{which}:{mode}:{exponent}:s={s}:{eps}");
        Scenario {
            id,
            exponent,
            s,
            eps,
            which,
            mode,
            grid,
        }
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }
}

/// Column order of the CSV export.
pub const CSV_COLUMNS: [&str; 15] = [
    "scenario_id",
    "family",
    "s",
    "which",
    "mode",
    "grid",
    "lhs",
    "rhs",
    "ratio_fwd",
    "ratio_bwd",
    "refinement_delta",
    "tail_delta",
    "clog_origin",
    "clog_infinity",
    "flags",
];

/// Both sides of one equivalence, their ratios and the grid-stability
/// diagnostics. Field order matches [`CSV_COLUMNS`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub scenario_id: String,
    pub family: String,
    pub s: f64,
    pub which: Which,
    pub mode: Mode,
    pub grid: GridSpec,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio_fwd: Option<f64>,
    pub ratio_bwd: Option<f64>,
    pub refinement_delta: f64,
    pub tail_delta: f64,
    pub clog_origin: f64,
    pub clog_infinity: f64,
    pub flags: Flags,
}

impl EquivalenceReport {
    /// `max(ratio_fwd, ratio_bwd)`, or `None` for degenerate reports.
    pub fn worst_ratio(&self) -> Option<f64> {
        match (self.ratio_fwd, self.ratio_bwd) {
            (Some(f), Some(b)) => Some(f.max(b)),
            (Some(f), None) => Some(f),
            (None, Some(b)) => Some(b),
            (None, None) => None,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.flags.contains(Flag::Degenerate)
    }

    pub fn is_stable(&self) -> bool {
        !self.flags.contains(Flag::RefinementUnstable) && !self.flags.contains(Flag::TailUnstable)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_round_trip() {
        let mut flags = Flags::default();
        assert_eq!(flags.to_string(), "");
        flags.insert(Flag::TailUnstable);
        flags.insert(Flag::Degenerate);
        flags.insert(Flag::TailUnstable);
        assert_eq!(flags.to_string(), "degenerate;tail_unstable");
        assert_eq!(flags.to_string().parse::<Flags>().unwrap(), flags);
        assert_eq!("".parse::<Flags>().unwrap(), Flags::default());
        assert!("bogus".parse::<Flags>().is_err());
    }

    #[test]
    fn enums_parse() {
        assert_eq!("lambda".parse::<Which>().unwrap(), Which::Lambda);
        assert_eq!("unit".parse::<Mode>().unwrap(), Mode::Unit);
        assert!("sideways".parse::<Mode>().is_err());
    }
}
