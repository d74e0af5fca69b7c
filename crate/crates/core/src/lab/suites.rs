//! Fixed scenario suites and seeded randomized suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::exponent::{ExponentFunction, FamilyKind};
use crate::grid::{GridSpec, LogGrid, SampledFunction};
use crate::hardy::{discrete_hardy_check, DiscreteHardyParams, Lemma22Spec, Lemma22Variant, ROUNDOFF};
use crate::lab::profile::Profile;
use crate::lab::report::{EquivalenceReport, Mode, Scenario, Which};
use crate::lebesgue::{luxemburg_norm, modular, unit_ball_check};

/// Independent RNG for case `stream` under `seed`.
pub(crate) fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn exponent(text: &str) -> ExponentFunction {
    text.parse().expect("built-in exponent descriptor")
}

/// Variable exponents of the standard suites, followed by two constant
/// controls.
pub fn suite_exponents() -> Vec<ExponentFunction> {
    [
        "loginterp(3,2)",
        "loginterp(2,3)",
        "loginterp(1.2,4)",
        "loginterp(4,1.2)",
        "loginterp(1.5,2.5)",
        "logpert(3,2,0.3,0.2)",
        "logpert(2,3,0.5,-1)",
        "logpert(1.5,3.5,0.25,1)",
        "logpert(2.5,1.5,0.4,2)",
        "const(2)",
        "const(3)",
    ]
    .into_iter()
    .map(exponent)
    .collect()
}

pub const SUITE_WEIGHTS: [f64; 3] = [0.5, 1.0, 2.0];

/// Inputs for each mode: a two-sided power peak, a single-octave and a
/// multi-octave indicator, and a log-oscillation.
pub fn suite_inputs(mode: Mode) -> Vec<Profile> {
    let (single, multi) = match mode {
        Mode::Full => (Profile::Indicator { j: 0, k: 1 }, Profile::Indicator { j: -2, k: 3 }),
        Mode::Unit => (Profile::Indicator { j: -1, k: 0 }, Profile::Indicator { j: -4, k: -1 }),
    };
    vec![Profile::PowerPeak { alpha: 0.5, beta: 0.5 }, single, multi, Profile::LogOsc(0.5)]
}

/// Every combination of suite exponent, weight, input and operator.
pub fn standard_suite(mode: Mode, grid: GridSpec) -> Vec<Scenario> {
    let prefix = match mode {
        Mode::Full => "std",
        Mode::Unit => "unit",
    };
    let mut out = Vec::new();
    for p in suite_exponents() {
        for s in SUITE_WEIGHTS {
            for eps in suite_inputs(mode) {
                for which in [Which::Eta, Which::Lambda] {
                    let sc = Scenario::new(p.clone(), s, eps, which, mode, grid);
                    let id = format!("{prefix}-{:03}:{}", out.len(), sc.id);
                    out.push(sc.with_id(id));
                }
            }
        }
    }
    out
}

/// Runs `op` over `scenarios` in parallel, keeping input order.
pub fn run_all(
    scenarios: &[Scenario],
    op: impl Fn(&Scenario) -> Result<EquivalenceReport> + Sync + Send,
) -> Result<Vec<EquivalenceReport>> {
    scenarios.par_iter().map(op).collect()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub scenarios: usize,
    pub degenerate: usize,
    pub unstable: usize,
    pub worst_ratio: f64,
    pub worst_id: String,
    pub max_refinement_delta: f64,
    pub max_tail_delta: f64,
}

pub fn summarize(reports: &[EquivalenceReport]) -> SuiteSummary {
    let mut s = SuiteSummary {
        scenarios: reports.len(),
        ..SuiteSummary::default()
    };
    for r in reports {
        if r.is_degenerate() {
            s.degenerate += 1;
            continue;
        }
        if !r.is_stable() {
            s.unstable += 1;
        }
        if let Some(w) = r.worst_ratio() {
            if w > s.worst_ratio {
                s.worst_ratio = w;
                s.worst_id = r.scenario_id.clone();
            }
        }
        s.max_refinement_delta = s.max_refinement_delta.max(r.refinement_delta);
        s.max_tail_delta = s.max_tail_delta.max(r.tail_delta);
    }
    s
}

/// Endpoint-matched pairs `(p, q)`: `q` perturbs `p` with a phase chosen
/// so that `sin(1 + phase) = 0`, which leaves `q(0) = p(0)`.
pub fn matched_pairs() -> Vec<(ExponentFunction, ExponentFunction)> {
    let bases = [(3.0, 2.0), (2.0, 3.0), (1.5, 3.5), (3.5, 1.5), (2.5, 2.5)];
    let perturbations = [
        (0.1, -1.0),
        (0.3, -1.0),
        (0.5, -1.0),
        (0.3, std::f64::consts::PI - 1.0),
    ];
    let mut out = Vec::new();
    for (p0, pinf) in bases {
        let p = ExponentFunction::log_interp(p0, pinf).expect("valid base");
        for (amplitude, phase) in perturbations {
            let q = ExponentFunction::log_perturbed(p0, pinf, amplitude, phase).expect("valid perturbation");
            out.push((p.clone(), q));
        }
    }
    out
}

pub const LEMMA21_A: [f64; 2] = [0.3, 0.7];
pub const LEMMA21_SIGMA: [f64; 3] = [0.0, 1.0, 2.0];
pub const LEMMA21_P: [f64; 4] = [0.5, 1.0, 2.0, f64::INFINITY];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma21Violation {
    pub draw: usize,
    pub k_min: i64,
    pub eps: Vec<f64>,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma21Case {
    pub a: f64,
    pub sigma: f64,
    pub p: f64,
    pub draws: usize,
    pub max_ratio: f64,
    pub violations: Vec<Lemma21Violation>,
}

fn random_sequence(rng: &mut ChaCha8Rng) -> (i64, Vec<f64>) {
    let len = rng.gen_range(1..=64usize);
    let k_min = rng.gen_range(-32..=0i64);
    let sparse = rng.gen_bool(0.25);
    let eps = (0..len)
        .map(|_| {
            let v = rng.gen_range(-4.0f64..4.0).exp();
            if sparse && rng.gen_bool(0.8) {
                v * 1e-9
            } else {
                v
            }
        })
        .collect();
    (k_min, eps)
}

/// `draws` random positive sequences for every `(a, σ, p)` in the grid of
/// parameters; each case has its own stream.
pub fn lemma21_suite(seed: u64, draws: usize) -> Result<Vec<Lemma21Case>> {
    let mut cases = Vec::new();
    for a in LEMMA21_A {
        for sigma in LEMMA21_SIGMA {
            for p in LEMMA21_P {
                cases.push((a, sigma, p));
            }
        }
    }
    cases
        .par_iter()
        .enumerate()
        .map(|(i, &(a, sigma, p))| {
            let mut rng = rng(seed, i as u64);
            let mut case = Lemma21Case {
                a,
                sigma,
                p,
                draws,
                max_ratio: 0.0,
                violations: Vec::new(),
            };
            for draw in 0..draws {
                let (k_min, eps) = random_sequence(&mut rng);
                let params = DiscreteHardyParams::new(a, sigma, p, k_min, k_min + eps.len() as i64 - 1)?;
                let check = discrete_hardy_check(&params, &eps)?;
                case.max_ratio = case.max_ratio.max(check.ratio);
                if check.ratio > 1.0 + ROUNDOFF {
                    case.violations.push(Lemma21Violation {
                        draw,
                        k_min,
                        eps,
                        ratio: check.ratio,
                    });
                }
            }
            Ok(case)
        })
        .collect()
}

/// Ratio for a unit spike at the centre of `[-half, half]`, `σ = 0`,
/// `p = 1`, where the Young bound is attained in the limit.
pub fn lemma21_spike_ratio(a: f64, half: i64) -> Result<f64> {
    let params = DiscreteHardyParams::new(a, 0.0, 1.0, -half, half)?;
    let mut eps = vec![0.0; params.window_len()];
    eps[half as usize] = 1.0;
    Ok(discrete_hardy_check(&params, &eps)?.ratio)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma22Draw {
    pub draw: usize,
    pub exponent: String,
    pub a: f64,
    pub b: f64,
    pub m: f64,
    pub gamma: f64,
    pub input: String,
    pub min_margin: f64,
    pub min_margin_ungrouped: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma22Summary {
    pub variant: Lemma22Variant,
    pub draws: usize,
    pub min_margin: f64,
    pub min_margin_ungrouped: f64,
    pub worst: Option<Lemma22Draw>,
}

fn random_exponent(rng: &mut ChaCha8Rng, kinds: &[FamilyKind]) -> Result<ExponentFunction> {
    let kind = kinds[rng.gen_range(0..kinds.len())];
    let p0 = rng.gen_range(1.2..4.0);
    let pinf = rng.gen_range(1.2..4.0);
    let amplitude = rng.gen_range(0.0..0.5);
    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
    match kind {
        FamilyKind::Constant => ExponentFunction::constant(p0),
        FamilyKind::LogInterp => ExponentFunction::log_interp(p0, pinf),
        FamilyKind::LogPerturbed => ExponentFunction::log_perturbed(p0, pinf, amplitude, phase),
    }
}

const ALL_KINDS: [FamilyKind; 3] = [FamilyKind::Constant, FamilyKind::LogInterp, FamilyKind::LogPerturbed];

/// A random input bounded by 1 on the grid, with a short description.
fn random_bounded_input(rng: &mut ChaCha8Rng, grid: &LogGrid, a: f64, b: f64) -> Result<(SampledFunction, String)> {
    Ok(match rng.gen_range(0..4) {
        0 => {
            let c = rng.gen_range(1e-3..=1.0);
            (SampledFunction::from_fn(grid, |_| c)?, format!("const({c})"))
        }
        1 => {
            let values = (0..grid.len()).map(|_| rng.gen_range(0.0..=1.0)).collect();
            (SampledFunction::new(grid, values)?, "uniform_noise".to_string())
        }
        2 => {
            let profile = Profile::PowerPeak {
                alpha: rng.gen_range(0.1..3.0),
                beta: rng.gen_range(0.1..3.0),
            };
            (profile.sample(grid)?, profile.to_string())
        }
        _ => {
            let (lo, hi) = (a.ln(), b.ln());
            let x = rng.gen_range(lo..hi);
            let y = rng.gen_range(x..=hi);
            let (x, y) = (x.exp(), y.exp());
            let f = SampledFunction::from_fn(grid, |t| if t >= x && t <= y { 1.0 } else { 0.0 })?;
            (f, format!("box({x},{y})"))
        }
    })
}

/// `draws` random `(exponent, Q, m, f)` cases for one variant, with
/// `w ≡ 1` and `sup |f| ≤ 1`.
pub fn lemma22_suite(seed: u64, draws: usize, variant: Lemma22Variant, grid: &LogGrid) -> Result<Lemma22Summary> {
    let stream = Lemma22Variant::ALL.iter().position(|v| *v == variant).unwrap_or(0) as u64;
    let results: Vec<Lemma22Draw> = (0..draws)
        .into_par_iter()
        .map(|draw| {
            let mut rng = rng(seed, (stream << 32) | draw as u64);
            let p = random_exponent(&mut rng, &ALL_KINDS)?;
            let a = 2f64.powf(rng.gen_range(-12.0..8.0));
            let b = a * 2f64.powf(rng.gen_range(0.25..4.0));
            let m = rng.gen_range(0.1..4.0);
            let spec = Lemma22Spec::new(&p, grid, a, b, m, variant, None)?;
            let (f, input) = random_bounded_input(&mut rng, grid, spec.a, spec.b)?;
            let report = crate::hardy::lemma22_check(&p, &spec, grid, &f, None)?;
            Ok(Lemma22Draw {
                draw,
                exponent: p.to_string(),
                a: spec.a,
                b: spec.b,
                m,
                gamma: spec.gamma,
                input,
                min_margin: report.min_margin,
                min_margin_ungrouped: report.min_margin_ungrouped,
            })
        })
        .collect::<Result<_>>()?;
    let worst = results
        .iter()
        .min_by(|x, y| x.min_margin.total_cmp(&y.min_margin))
        .cloned();
    Ok(Lemma22Summary {
        variant,
        draws,
        min_margin: worst.as_ref().map_or(f64::INFINITY, |w| w.min_margin),
        min_margin_ungrouped: results
            .iter()
            .map(|r| r.min_margin_ungrouped)
            .fold(f64::INFINITY, f64::min),
        worst,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnitBallCase {
    pub exponent: String,
    pub input: String,
    pub scale: f64,
    pub norm: f64,
    pub modular: f64,
    pub agree: bool,
}

/// `count` random `(exponent, input, scale)` draws; a quarter of the
/// scales are set within 0.1% of the unit sphere.
pub fn unit_ball_suite(seed: u64, count: usize, tol: f64, grid: &LogGrid) -> Result<Vec<UnitBallCase>> {
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng(seed, i as u64);
            let p = random_exponent(&mut rng, &ALL_KINDS)?;
            let profile = match rng.gen_range(0..3) {
                0 => Profile::PowerPeak {
                    alpha: rng.gen_range(0.2..2.0),
                    beta: rng.gen_range(0.2..2.0),
                },
                1 => Profile::LogOsc(rng.gen_range(0.2..1.5)),
                _ => {
                    let j = rng.gen_range(-20..15);
                    Profile::Indicator {
                        j,
                        k: j + rng.gen_range(1..6),
                    }
                }
            };
            let base = profile.sample(grid)?;
            let near_sphere = rng.gen_bool(0.25);
            let jitter = rng.gen_range(-1e-3..1e-3);
            let wide = 10f64.powf(rng.gen_range(-2.0..2.0));
            let scale = if near_sphere {
                (1.0 + jitter) / luxemburg_norm(&p, grid, &base, 1e-12)?.norm
            } else {
                wide
            };
            let f = base.scaled(scale)?;
            let norm = luxemburg_norm(&p, grid, &f, tol)?.norm;
            Ok(UnitBallCase {
                exponent: p.to_string(),
                input: profile.to_string(),
                scale,
                norm,
                modular: modular(&p, grid, &f)?,
                agree: unit_ball_check(&p, grid, &f, tol)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_suite_shape() {
        let full = standard_suite(Mode::Full, GridSpec::default());
        assert_eq!(full.len(), 11 * 3 * 4 * 2);
        let variable = full.iter().filter(|s| !s.exponent.is_constant()).count();
        assert!(variable >= 50);
        let mut ids: Vec<_> = full.iter().map(|s| s.id.clone()).collect();
        let sorted = ids.clone();
        ids.sort();
        assert_eq!(ids, sorted);
        for p in suite_exponents() {
            assert!((1.2..=4.0).contains(&p.p_zero()) && (1.2..=4.0).contains(&p.p_infinity()), "{p}");
        }
    }

    #[test]
    fn matched_pairs_share_endpoints() {
        let pairs = matched_pairs();
        assert_eq!(pairs.len(), 20);
        for (p, q) in pairs {
            assert!((p.p_zero() - q.p_zero()).abs() <= 1e-12, "{p} {q}");
            assert_eq!(p.p_infinity(), q.p_infinity());
        }
    }

    #[test]
    fn lemma21_suite_is_deterministic_and_bounded() {
        let a = lemma21_suite(3, 50).unwrap();
        let b = lemma21_suite(3, 50).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 24);
        assert!(a.iter().all(|c| c.violations.is_empty() && c.max_ratio <= 1.0 + ROUNDOFF));
        assert_ne!(a, lemma21_suite(4, 50).unwrap());
    }

    #[test]
    fn lemma22_small_suite() {
        let g = GridSpec::default().build().unwrap();
        for v in Lemma22Variant::ALL {
            let s = lemma22_suite(11, 20, v, &g).unwrap();
            assert_eq!(s.draws, 20);
            assert!(s.min_margin >= -1e-10, "{s:?}");
        }
    }

    #[test]
    fn unit_ball_small_suite() {
        let g = GridSpec::default().build().unwrap();
        let cases = unit_ball_suite(5, 20, 1e-6, &g).unwrap();
        assert!(cases.iter().all(|c| c.agree), "{cases:?}");
    }
}
