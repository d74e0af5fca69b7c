//! Both sides of the norm equivalences, measured on a base grid and
//! re-measured on a refined grid and on grids extended at either end.

use crate::error::{Error, Result};
use crate::exponent::ExponentFunction;
use crate::grid::{GridSpec, LogGrid, NodeRange, SampledFunction};
use crate::hardy::{eta, eta_unit, lambda, HardyParams};
use crate::lab::profile::Monotone;
use crate::lab::report::{EquivalenceReport, Flag, Flags, Mode, Scenario, Which};
use crate::lebesgue::{fixed_norm_on, luxemburg_norm_on, DEFAULT_TOLERANCE};

/// Relative drift above which a ratio is flagged as grid-unstable.
pub const STABILITY_THRESHOLD: f64 = 0.05;
/// Octaves added at each end for the tail diagnostic.
pub const TAIL_EXTENSION: i32 = 5;
/// Octaves excluded next to the truncated end of an operator integral.
pub const TRUNCATION_OCTAVES: i32 = 10;

/// Applies the operator selected by `which` in `mode`.
pub fn apply_operator(
    which: Which,
    mode: Mode,
    s: f64,
    grid: &LogGrid,
    eps: &SampledFunction,
) -> Result<SampledFunction> {
    let params = HardyParams::new(s)?;
    match (which, mode) {
        (Which::Eta, Mode::Full) => eta(params, grid, eps),
        (Which::Eta, Mode::Unit) => eta_unit(params, grid, eps),
        (Which::Lambda, _) => lambda(params, grid, eps),
        (Which::Both, _) => Err(Error::InvalidParameter("select one operator".into())),
    }
}

fn octave(grid: &LogGrid, v: i32) -> Result<usize> {
    grid.octave_index(v).ok_or_else(|| {
        Error::InvalidParameter(format!(
            "{} is too narrow: needs at least {TRUNCATION_OCTAVES} octaves on each side of 1",
            grid.spec()
        ))
    })
}

/// Nodes on which the output of `which` is measured: the whole domain of
/// `mode`, minus [`TRUNCATION_OCTAVES`] next to the end where the
/// operator integral is cut off. `None` for `which` measures a supplied
/// function on the whole domain.
pub fn norm_band(grid: &LogGrid, which: Option<Which>, mode: Mode) -> Result<NodeRange> {
    let spec = grid.spec();
    let unit = grid.unit_index()?;
    let lo = match which {
        Some(Which::Lambda) => octave(grid, spec.v_min + TRUNCATION_OCTAVES)?,
        _ => 0,
    };
    let hi = match (which, mode) {
        (_, Mode::Unit) => unit,
        (Some(Which::Eta), Mode::Full) => octave(grid, spec.v_max - TRUNCATION_OCTAVES)?,
        _ => grid.len() - 1,
    };
    if lo >= unit || (mode == Mode::Full && hi <= unit) {
        octave(grid, i32::MAX)?;
    }
    Ok(NodeRange::new(lo, hi))
}

/// `(∫_band∩(0,1] f^{p(0)})^{1/p(0)} + (∫_band∩[1,∞) f^{p_∞})^{1/p_∞}`,
/// the second term only in full mode.
pub fn split_norm(p: &ExponentFunction, grid: &LogGrid, f: &SampledFunction, band: NodeRange, mode: Mode) -> Result<f64> {
    let unit = grid.unit_index()?;
    let low = fixed_norm_on(p.p_zero(), grid, f, NodeRange::new(band.start, unit))?;
    Ok(match mode {
        Mode::Unit => low,
        Mode::Full => low + fixed_norm_on(p.p_infinity(), grid, f, NodeRange::new(unit, band.end))?,
    })
}

fn variable_norm(p: &ExponentFunction, grid: &LogGrid, f: &SampledFunction, band: NodeRange) -> Result<f64> {
    Ok(luxemburg_norm_on(p, grid, f, band, DEFAULT_TOLERANCE)?.norm)
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (num > 0.0 && den > 0.0 && num.is_finite() && den.is_finite()).then(|| num / den)
}

fn drift(base: f64, other: Option<f64>) -> f64 {
    match other {
        Some(o) => (o - base).abs() / base,
        None => 1.0,
    }
}

struct Header<'a> {
    id: String,
    family: String,
    s: f64,
    which: Which,
    mode: Mode,
    grid: GridSpec,
    exponent: &'a ExponentFunction,
    one_sided: bool,
}

/// Measures `(lhs, rhs)` on the base grid, the refined grid and both tail
/// extensions, and fills in ratios, drifts and flags.
fn assemble(header: Header<'_>, measure: impl Fn(&LogGrid) -> Result<(f64, f64)>) -> Result<EquivalenceReport> {
    let base_grid = header.grid.build()?;
    let (lhs, rhs) = measure(&base_grid)?;
    let ratios = |l: f64, r: f64| {
        let fwd = ratio(l, r);
        let bwd = if header.one_sided { None } else { ratio(r, l) };
        (fwd, bwd)
    };
    let (ratio_fwd, ratio_bwd) = ratios(lhs, rhs);
    let mut flags = Flags::default();
    let (mut refinement_delta, mut tail_delta) = (0.0, 0.0);

    if let Some(fwd) = ratio_fwd {
        let delta_on = |spec: GridSpec| -> Result<f64> {
            let (l, r) = measure(&spec.build()?)?;
            let (f, b) = ratios(l, r);
            let mut d = drift(fwd, f);
            if let Some(bwd) = ratio_bwd {
                d = d.max(drift(bwd, b));
            }
            Ok(d)
        };
        refinement_delta = delta_on(header.grid.refined())?;
        tail_delta = delta_on(header.grid.extended(0, TAIL_EXTENSION))?
            .max(delta_on(header.grid.extended(TAIL_EXTENSION, 0))?);
        if refinement_delta >= STABILITY_THRESHOLD {
            flags.insert(Flag::RefinementUnstable);
        }
        if tail_delta >= STABILITY_THRESHOLD {
            flags.insert(Flag::TailUnstable);
        }
    } else {
        flags.insert(Flag::Degenerate);
    }

    Ok(EquivalenceReport {
        scenario_id: header.id,
        family: header.family,
        s: header.s,
        which: header.which,
        mode: header.mode,
        grid: header.grid,
        lhs,
        rhs,
        ratio_fwd,
        ratio_bwd,
        refinement_delta,
        tail_delta,
        clog_origin: header.exponent.log_holder_origin_constant(&base_grid)?,
        clog_infinity: header.exponent.log_holder_infinity_constant(&base_grid)?,
        flags,
    })
}

fn header<'a>(sc: &'a Scenario, id: String, family: String, which: Which, one_sided: bool) -> Header<'a> {
    Header {
        id,
        family,
        s: sc.s,
        which,
        mode: sc.mode,
        grid: sc.grid,
        exponent: &sc.exponent,
        one_sided,
    }
}

/// Variable-exponent norm of `η` (or `λ`) against the split fixed-exponent
/// norms with `p(0)` below 1 and `p_∞` above.
pub fn equivalence_report(sc: &Scenario) -> Result<EquivalenceReport> {
    if sc.which == Which::Both {
        return Err(Error::InvalidParameter("equivalence reports take one operator".into()));
    }
    let h = header(sc, sc.id.clone(), sc.exponent.to_string(), sc.which, false);
    assemble(h, |grid| {
        let out = apply_operator(sc.which, sc.mode, sc.s, grid, &sc.eps.sample(grid)?)?;
        let band = norm_band(grid, Some(sc.which), sc.mode)?;
        Ok((
            variable_norm(&sc.exponent, grid, &out, band)?,
            split_norm(&sc.exponent, grid, &out, band, sc.mode)?,
        ))
    })
}

/// `‖η‖ + ‖λ‖` against the split norm of `ε` itself. One-sided, so only
/// `ratio_fwd` is reported.
pub fn moreover_check(sc: &Scenario) -> Result<EquivalenceReport> {
    let h = header(sc, format!("moreover:{}", sc.id), sc.exponent.to_string(), Which::Both, true);
    assemble(h, |grid| {
        let eps = sc.eps.sample(grid)?;
        let mut lhs = 0.0;
        for which in [Which::Eta, Which::Lambda] {
            let out = apply_operator(which, sc.mode, sc.s, grid, &eps)?;
            lhs += variable_norm(&sc.exponent, grid, &out, norm_band(grid, Some(which), sc.mode)?)?;
        }
        let domain = norm_band(grid, None, sc.mode)?;
        Ok((lhs, split_norm(&sc.exponent, grid, &eps, domain, sc.mode)?))
    })
}

fn check_monotone(f: &SampledFunction, grid: &LogGrid, band: NodeRange, direction: Monotone) -> Result<()> {
    let v = f.values();
    for i in band.start + 1..=band.end {
        let ok = match direction {
            Monotone::NonIncreasing => v[i] <= v[i - 1],
            Monotone::NonDecreasing => v[i] >= v[i - 1],
            Monotone::Constant => v[i] == v[i - 1],
        };
        if !ok {
            return Err(Error::NotMonotone { index: i, t: grid.nodes()[i] });
        }
    }
    Ok(())
}

/// The equivalence with `sc.eps` itself standing in for `η` (which must
/// then be non-increasing) or `λ` (non-decreasing). No operator is applied.
pub fn monotone_variant_report(sc: &Scenario) -> Result<EquivalenceReport> {
    let direction = match sc.which {
        Which::Eta => Monotone::NonIncreasing,
        Which::Lambda => Monotone::NonDecreasing,
        Which::Both => return Err(Error::InvalidParameter("select one operator".into())),
    };
    let h = header(sc, format!("monotone:{}", sc.id), sc.exponent.to_string(), sc.which, false);
    assemble(h, |grid| {
        let f = sc.eps.sample(grid)?;
        let band = norm_band(grid, None, sc.mode)?;
        check_monotone(&f, grid, band, direction)?;
        Ok((
            variable_norm(&sc.exponent, grid, &f, band)?,
            split_norm(&sc.exponent, grid, &f, band, sc.mode)?,
        ))
    })
}

/// Endpoint values must agree to this absolute tolerance.
pub const ENDPOINT_TOLERANCE: f64 = 1e-12;

/// Norm of the operator output under `sc.exponent` against its norm under
/// `q`, for exponents sharing `p(0)` (and `p_∞` in full mode).
pub fn cross_exponent_check(sc: &Scenario, q: &ExponentFunction) -> Result<EquivalenceReport> {
    let p = &sc.exponent;
    if (p.p_zero() - q.p_zero()).abs() > ENDPOINT_TOLERANCE {
        return Err(Error::EndpointMismatch(format!("p(0) = {} but q(0) = {}", p.p_zero(), q.p_zero())));
    }
    if sc.mode == Mode::Full && (p.p_infinity() - q.p_infinity()).abs() > ENDPOINT_TOLERANCE {
        return Err(Error::EndpointMismatch(format!(
            "p_inf = {} but q_inf = {}",
            p.p_infinity(),
            q.p_infinity()
        )));
    }
    if sc.which == Which::Both {
        return Err(Error::InvalidParameter("select one operator".into()));
    }
    let h = header(sc, format!("cross:{}:{q}", sc.id), format!("{p}~{q}"), sc.which, false);
    assemble(h, |grid| {
        let out = apply_operator(sc.which, sc.mode, sc.s, grid, &sc.eps.sample(grid)?)?;
        let band = norm_band(grid, Some(sc.which), sc.mode)?;
        Ok((variable_norm(p, grid, &out, band)?, variable_norm(q, grid, &out, band)?))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::profile::Profile;

    fn scenario(p: ExponentFunction, s: f64, eps: Profile, which: Which, mode: Mode) -> Scenario {
        Scenario::new(p, s, eps, which, mode, GridSpec::default())
    }

    fn konst(q: f64) -> ExponentFunction {
        ExponentFunction::constant(q).unwrap()
    }

    #[test]
    fn bands() {
        let g = GridSpec::default().build().unwrap();
        let unit = g.unit_index().unwrap();
        let eta_full = norm_band(&g, Some(Which::Eta), Mode::Full).unwrap();
        assert_eq!((eta_full.start, g.nodes()[eta_full.end]), (0, 2f64.powi(20)));
        let lam_unit = norm_band(&g, Some(Which::Lambda), Mode::Unit).unwrap();
        assert_eq!((g.nodes()[lam_unit.start], lam_unit.end), (2f64.powi(-20), unit));
        let narrow = LogGrid::build(-8, 8, 4).unwrap();
        assert!(norm_band(&narrow, Some(Which::Eta), Mode::Full).is_err());
        assert!(norm_band(&narrow, None, Mode::Full).is_ok());
    }

    #[test]
    fn unit_mode_constant_exponent_is_exact() {
        for which in [Which::Eta, Which::Lambda] {
            let sc = scenario(konst(2.5), 1.0, Profile::PowerPeak { alpha: 0.5, beta: 0.5 }, which, Mode::Unit);
            let r = equivalence_report(&sc).unwrap();
            let fwd = r.ratio_fwd.unwrap();
            assert!((fwd - 1.0).abs() < 1e-6, "{which}: {fwd}");
            assert!((fwd * r.ratio_bwd.unwrap() - 1.0).abs() < 1e-12);
            assert!(r.flags.is_empty());
        }
    }

    #[test]
    fn full_mode_constant_exponent_matches_split_identity() {
        // ‖f‖_q = (A^q + B^q)^{1/q} while the right side is A + B
        let q = 2.0;
        let sc = scenario(konst(q), 1.0, Profile::Indicator { j: 0, k: 1 }, Which::Eta, Mode::Full);
        let r = equivalence_report(&sc).unwrap();
        let g = sc.grid.build().unwrap();
        let out = apply_operator(Which::Eta, Mode::Full, 1.0, &g, &sc.eps.sample(&g).unwrap()).unwrap();
        let band = norm_band(&g, Some(Which::Eta), Mode::Full).unwrap();
        let unit = g.unit_index().unwrap();
        let a = fixed_norm_on(q, &g, &out, NodeRange::new(band.start, unit)).unwrap();
        let b = fixed_norm_on(q, &g, &out, NodeRange::new(unit, band.end)).unwrap();
        let want = (a + b) / (a.powf(q) + b.powf(q)).powf(1.0 / q);
        let bwd = r.ratio_bwd.unwrap();
        assert!((bwd - want).abs() < 1e-6, "{bwd} vs {want}");
        assert!(bwd > 1.0 && bwd <= 2f64.powf(1.0 - 1.0 / q));
    }

    #[test]
    fn loginterp_report_is_finite_and_stable() {
        let sc = scenario(
            ExponentFunction::log_interp(3.0, 2.0).unwrap(),
            1.0,
            Profile::PowerPeak { alpha: 0.5, beta: 0.5 },
            Which::Eta,
            Mode::Full,
        );
        let r = equivalence_report(&sc).unwrap();
        assert!(r.ratio_fwd.unwrap().is_finite());
        assert!(r.refinement_delta < 0.05 && r.tail_delta < 0.05, "{r:?}");
        assert!(r.flags.is_empty());
        assert!(r.clog_infinity > 0.0);
    }

    #[test]
    fn zero_input_is_degenerate() {
        let sc = scenario(konst(2.0), 1.0, Profile::Zero, Which::Lambda, Mode::Full);
        let r = equivalence_report(&sc).unwrap();
        assert!(r.is_degenerate());
        assert_eq!((r.ratio_fwd, r.ratio_bwd), (None, None));
        let m = moreover_check(&sc).unwrap();
        assert!(m.is_degenerate());
        assert_eq!((m.lhs, m.rhs), (0.0, 0.0));
    }

    #[test]
    fn moreover_on_octave_indicator() {
        // For q = 1: ∫η = ∫λ = ∫ε/s, so the ratio is 2/s up to quadrature
        // error at the jumps.
        let s = 2.0;
        let sc = scenario(konst(1.0), s, Profile::Indicator { j: 0, k: 1 }, Which::Both, Mode::Full);
        let r = moreover_check(&sc).unwrap();
        assert!(r.ratio_bwd.is_none());
        assert!((r.ratio_fwd.unwrap() - 2.0 / s).abs() < 5e-3, "{r:?}");
        assert!(r.refinement_delta < 5e-3);
    }

    #[test]
    fn monotone_sources() {
        let p = ExponentFunction::log_interp(3.0, 2.0).unwrap();
        let down = scenario(p.clone(), 1.0, Profile::Decay(1.0), Which::Eta, Mode::Full);
        assert!(monotone_variant_report(&down).unwrap().ratio_fwd.is_some());
        let up = scenario(p.clone(), 1.0, Profile::Rise(1.0), Which::Lambda, Mode::Unit);
        assert!(monotone_variant_report(&up).unwrap().ratio_fwd.is_some());
        let wrong = scenario(p, 1.0, Profile::Rise(1.0), Which::Eta, Mode::Full);
        assert!(matches!(monotone_variant_report(&wrong), Err(Error::NotMonotone { .. })));
        for which in [Which::Eta, Which::Lambda] {
            let flat = scenario(konst(2.0), 1.0, Profile::Const(0.5), which, Mode::Unit);
            let r = monotone_variant_report(&flat).unwrap();
            assert!((r.ratio_fwd.unwrap() - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn cross_exponent_pairs() {
        let p = ExponentFunction::log_interp(3.0, 2.0).unwrap();
        let sc = scenario(p.clone(), 1.0, Profile::PowerPeak { alpha: 0.5, beta: 0.5 }, Which::Lambda, Mode::Full);
        let same = cross_exponent_check(&sc, &p).unwrap();
        assert_eq!(same.ratio_fwd, Some(1.0));
        let q = ExponentFunction::log_perturbed(3.0, 2.0, 0.3, -1.0).unwrap();
        let r = cross_exponent_check(&sc, &q).unwrap();
        assert!(r.ratio_fwd.unwrap().is_finite() && r.refinement_delta < 0.05);
        let off = ExponentFunction::log_perturbed(3.0, 2.0, 0.3, 0.0).unwrap();
        assert!(matches!(cross_exponent_check(&sc, &off), Err(Error::EndpointMismatch(_))));
        let other_inf = ExponentFunction::log_interp(3.0, 2.5).unwrap();
        assert!(cross_exponent_check(&sc, &other_inf).is_err());
        let unit = Scenario { mode: Mode::Unit, ..sc };
        assert!(cross_exponent_check(&unit, &other_inf).is_ok());
    }
}
