//! Seeded random search for the parameter tuples with the largest
//! two-sided ratio.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{ExponentFunction, FamilyKind};
use crate::grid::GridSpec;
use crate::lab::equivalence::equivalence_report;
use crate::lab::profile::Profile;
use crate::lab::report::{EquivalenceReport, Mode, Scenario, Which};
use crate::lab::suites::{rng, suite_inputs};

/// Perturbation amplitudes are drawn from `[0, AMPLITUDE_ENVELOPE)` and
/// rejected outside the configured range, so a wider range accepts a
/// superset of the same draws.
pub const AMPLITUDE_ENVELOPE: f64 = 2.0;
pub const DEFAULT_BUDGET: usize = 500;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub families: Vec<FamilyKind>,
    pub p_range: (f64, f64),
    pub amplitude_range: (f64, f64),
    pub s_range: (f64, f64),
    pub inputs: Vec<Profile>,
    pub operators: Vec<Which>,
    pub mode: Mode,
    pub grid: GridSpec,
    pub top_k: usize,
}

impl SearchSpace {
    pub fn new(mode: Mode) -> Self {
        SearchSpace {
            families: vec![FamilyKind::LogInterp, FamilyKind::LogPerturbed],
            p_range: (1.2, 4.0),
            amplitude_range: (0.0, 0.5),
            s_range: (0.5, 2.0),
            inputs: suite_inputs(mode),
            operators: vec![Which::Eta, Which::Lambda],
            mode,
            grid: GridSpec::default(),
            top_k: 10,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(format!("search space: {msg}")));
        let ordered = |(a, b): (f64, f64)| a.is_finite() && b.is_finite() && a <= b;
        if self.families.is_empty() || self.inputs.is_empty() || self.operators.is_empty() {
            return bad("families, inputs and operators must be non-empty");
        }
        if self.operators.contains(&Which::Both) {
            return bad("operators must be eta or lambda");
        }
        if !ordered(self.p_range) || self.p_range.0 < 1.0 {
            return bad("p_range must be an ordered range within [1, inf)");
        }
        if !ordered(self.amplitude_range) || self.amplitude_range.0 < 0.0 || self.amplitude_range.1 > AMPLITUDE_ENVELOPE {
            return bad("amplitude_range must lie within [0, 2]");
        }
        if !ordered(self.s_range) || self.s_range.0 <= 0.0 {
            return bad("s_range must be an ordered positive range");
        }
        if self.top_k == 0 {
            return bad("top_k must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchEntry {
    pub draw: usize,
    pub worst_ratio: f64,
    pub report: EquivalenceReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub seed: u64,
    pub budget: usize,
    pub evaluated: usize,
    pub out_of_range: usize,
    pub degenerate: usize,
    pub failed: usize,
    /// Top entries, sorted by descending `worst_ratio`.
    pub entries: Vec<SearchEntry>,
}

enum Draw {
    OutOfRange,
    Scenario(Scenario),
}

fn draw(space: &SearchSpace, seed: u64, index: usize) -> Result<Draw> {
    let mut rng = rng(seed, index as u64);
    // fixed consumption order, independent of the configured ranges
    let u_family: f64 = rng.gen();
    let u_p0: f64 = rng.gen();
    let u_pinf: f64 = rng.gen();
    let amplitude = rng.gen::<f64>() * AMPLITUDE_ENVELOPE;
    let phase = rng.gen::<f64>() * std::f64::consts::TAU;
    let u_s: f64 = rng.gen();
    let u_input: f64 = rng.gen();
    let u_which: f64 = rng.gen();

    let pick = |u: f64, n: usize| ((u * n as f64) as usize).min(n - 1);
    let lerp = |(a, b): (f64, f64), u: f64| a + (b - a) * u;
    let kind = space.families[pick(u_family, space.families.len())];
    let (p0, pinf) = (lerp(space.p_range, u_p0), lerp(space.p_range, u_pinf));
    let exponent = match kind {
        FamilyKind::Constant => ExponentFunction::constant(p0)?,
        FamilyKind::LogInterp => ExponentFunction::log_interp(p0, pinf)?,
        FamilyKind::LogPerturbed => {
            let (lo, hi) = space.amplitude_range;
            if amplitude < lo || amplitude > hi {
                return Ok(Draw::OutOfRange);
            }
            ExponentFunction::log_perturbed(p0, pinf, amplitude, phase)?
        }
    };
    let s = lerp(space.s_range, u_s);
    let eps = space.inputs[pick(u_input, space.inputs.len())];
    let which = space.operators[pick(u_which, space.operators.len())];
    let sc = Scenario::new(exponent, s, eps, which, space.mode, space.grid);
    let id = format!("search-{index:06}:{}", sc.id);
    Ok(Draw::Scenario(sc.with_id(id)))
}

/// Evaluates `budget` seeded draws and keeps the `top_k` largest
/// `max(ratio_fwd, ratio_bwd)`. Draws outside the amplitude range,
/// degenerate reports and solver failures are skipped and counted.
pub fn adversarial_search(space: &SearchSpace, budget: usize, seed: u64) -> Result<SearchResult> {
    if budget == 0 {
        return Err(Error::InvalidParameter("search budget must be at least 1".into()));
    }
    space.validate()?;
    let outcomes: Vec<Result<Option<Option<SearchEntry>>>> = (0..budget)
        .into_par_iter()
        .map(|index| match draw(space, seed, index)? {
            Draw::OutOfRange => Ok(None),
            Draw::Scenario(sc) => Ok(Some(equivalence_report(&sc).ok().map(|report| SearchEntry {
                draw: index,
                worst_ratio: report.worst_ratio().unwrap_or(f64::NAN),
                report,
            }))),
        })
        .collect();

    let mut result = SearchResult {
        seed,
        budget,
        evaluated: 0,
        out_of_range: 0,
        degenerate: 0,
        failed: 0,
        entries: Vec::new(),
    };
    for outcome in outcomes {
        match outcome? {
            None => result.out_of_range += 1,
            Some(None) => result.failed += 1,
            Some(Some(entry)) if entry.report.is_degenerate() => result.degenerate += 1,
            Some(Some(entry)) => {
                result.evaluated += 1;
                result.entries.push(entry);
            }
        }
    }
    result
        .entries
        .sort_by(|a, b| b.worst_ratio.total_cmp(&a.worst_ratio).then(a.draw.cmp(&b.draw)));
    result.entries.truncate(space.top_k);
    Ok(result)
}
