//! Modular, Luxemburg norm and mixed sequence norm on `L^{p(·)}((0,∞), dt/t)`.
//!
//! The norm `‖f‖ = inf{λ > 0 : ϱ(f/λ) ≤ 1}` is found by bracketing and
//! bisecting the strictly decreasing map `λ ↦ ϱ(f/λ)`. Bisection runs on
//! `ln λ`, so a bracket spanning many decades closes as fast as a narrow one.

use crate::error::{Error, Result};
use crate::exponent::ExponentFunction;
use crate::grid::{LogGrid, NodeRange, SampledFunction};

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const MAX_ITERATIONS: usize = 200;
/// Modular values above this are treated as `+∞`.
pub const SATURATION: f64 = 1e300;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LuxemburgResult {
    pub norm: f64,
    pub modular_at_norm: f64,
    pub iterations: usize,
    pub bracket: (f64, f64),
    pub tolerance: f64,
}

impl LuxemburgResult {
    fn zero(tolerance: f64) -> Self {
        LuxemburgResult {
            norm: 0.0,
            modular_at_norm: 0.0,
            iterations: 0,
            bracket: (0.0, 0.0),
            tolerance,
        }
    }
}

fn saturate(v: f64) -> f64 {
    if v > SATURATION || v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

fn check_tolerance(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidTolerance(tol));
    }
    Ok(())
}

/// Sum `Σ w_i (f_i / λ)^{p_i}` over a node range, saturated.
fn scaled_modular(grid: &LogGrid, exps: &[f64], values: &[f64], range: NodeRange, lambda: f64) -> f64 {
    let inv = 1.0 / lambda;
    saturate(grid.trapezoid_with(range, |i| {
        let v = values[i];
        if v == 0.0 {
            0.0
        } else {
            (v * inv).powf(exps[i])
        }
    }))
}

/// True if every nonzero sample of `values` carries zero quadrature weight.
fn negligible(grid: &LogGrid, values: &[f64], range: NodeRange) -> bool {
    grid.trapezoid_with(range, |i| if values[i] > 0.0 { 1.0 } else { 0.0 }) == 0.0
}

/// Finds `λ` with `|rho(λ) - 1| <= tol` for a continuous, strictly
/// decreasing `rho` that tends to `∞` at `0+` and to `0` at `∞`.
pub(crate) fn solve_unit_level(rho: impl Fn(f64) -> f64, lambda0: f64, tol: f64) -> Result<LuxemburgResult> {
    check_tolerance(tol)?;
    let mut iterations = 1;
    let r0 = rho(lambda0);
    let done = |norm: f64, modular: f64, iterations: usize, lo: f64, hi: f64| LuxemburgResult {
        norm,
        modular_at_norm: modular,
        iterations,
        bracket: (lo, hi),
        tolerance: tol,
    };
    if (r0 - 1.0).abs() <= tol {
        return Ok(done(lambda0, r0, iterations, lambda0, lambda0));
    }

    // Expand with squaring factors until rho straddles 1.
    let (mut lo, mut hi) = (lambda0, lambda0);
    let mut factor = 2.0f64;
    if r0 > 1.0 {
        loop {
            lo = hi;
            hi *= factor;
            if !hi.is_finite() {
                return Err(Error::Saturated);
            }
            iterations += 1;
            let r = rho(hi);
            if (r - 1.0).abs() <= tol {
                return Ok(done(hi, r, iterations, lo, hi));
            }
            if r < 1.0 {
                break;
            }
            if iterations >= MAX_ITERATIONS {
                return Err(if r.is_infinite() {
                    Error::Saturated
                } else {
                    Error::NoConvergence { iterations, residual: r - 1.0 }
                });
            }
            factor = (factor * factor).min(1e100);
        }
    } else {
        loop {
            hi = lo;
            lo /= factor;
            if lo == 0.0 {
                return Err(Error::NoConvergence {
                    iterations,
                    residual: r0 - 1.0,
                });
            }
            iterations += 1;
            let r = rho(lo);
            if (r - 1.0).abs() <= tol {
                return Ok(done(lo, r, iterations, lo, hi));
            }
            if r > 1.0 {
                break;
            }
            if iterations >= MAX_ITERATIONS {
                return Err(Error::NoConvergence { iterations, residual: r - 1.0 });
            }
            factor = (factor * factor).min(1e100);
        }
    }

    loop {
        let mid = lo.sqrt() * hi.sqrt();
        if !(mid > lo && mid < hi) || iterations >= MAX_ITERATIONS {
            let r = rho(mid.clamp(lo, hi));
            return Err(Error::NoConvergence {
                iterations,
                residual: r - 1.0,
            });
        }
        iterations += 1;
        let r = rho(mid);
        if (r - 1.0).abs() <= tol {
            return Ok(done(mid, r, iterations, lo, hi));
        }
        if r > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// `ϱ_{p(·)}(f) = ∫ |f(t)|^{p(t)} dt/t` over the whole grid. Saturated
/// values are reported as `+∞`.
pub fn modular(p: &ExponentFunction, grid: &LogGrid, f: &SampledFunction) -> Result<f64> {
    modular_on(p, grid, f, grid.full_range())
}

pub fn modular_on(p: &ExponentFunction, grid: &LogGrid, f: &SampledFunction, range: NodeRange) -> Result<f64> {
    grid.check(f)?;
    let exps = p.sample(grid)?;
    Ok(scaled_modular(grid, &exps, f.values(), range, 1.0))
}

pub fn luxemburg_norm(p: &ExponentFunction, grid: &LogGrid, f: &SampledFunction, tol: f64) -> Result<LuxemburgResult> {
    luxemburg_norm_on(p, grid, f, grid.full_range(), tol)
}

/// Luxemburg norm of `f` restricted to the nodes of `range`.
pub fn luxemburg_norm_on(
    p: &ExponentFunction,
    grid: &LogGrid,
    f: &SampledFunction,
    range: NodeRange,
    tol: f64,
) -> Result<LuxemburgResult> {
    grid.check(f)?;
    let exps = p.sample(grid)?;
    luxemburg_with_exponents(grid, &exps, f.values(), range, tol)
}

pub(crate) fn luxemburg_with_exponents(
    grid: &LogGrid,
    exps: &[f64],
    values: &[f64],
    range: NodeRange,
    tol: f64,
) -> Result<LuxemburgResult> {
    check_tolerance(tol)?;
    if negligible(grid, values, range) {
        return Ok(LuxemburgResult::zero(tol));
    }
    // Start from the fixed-exponent norm at p⁺.
    let p_plus = range.indices().map(|i| exps[i]).fold(1.0, f64::max);
    let estimate = grid
        .trapezoid_with(range, |i| values[i].powf(p_plus))
        .powf(1.0 / p_plus);
    let lambda0 = if estimate > 0.0 && estimate.is_finite() {
        estimate
    } else {
        range.indices().map(|i| values[i]).fold(0.0, f64::max)
    };
    solve_unit_level(|l| scaled_modular(grid, exps, values, range, l), lambda0, tol)
}

/// `(∫_a^b f^q dt/t)^{1/q}` with `a`, `b` grid nodes.
pub fn fixed_norm(q: f64, grid: &LogGrid, f: &SampledFunction, a: f64, b: f64) -> Result<f64> {
    let range = grid.range_between(a, b)?;
    fixed_norm_on(q, grid, f, range)
}

pub fn fixed_norm_on(q: f64, grid: &LogGrid, f: &SampledFunction, range: NodeRange) -> Result<f64> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::InvalidParameter(format!("fixed exponent {q} must be >= 1")));
    }
    grid.check(f)?;
    let values = f.values();
    Ok(grid.trapezoid_with(range, |i| values[i].powf(q)).powf(1.0 / q))
}

/// Whether norm and modular fall on the same side of 1, within `tol`.
pub fn unit_ball_check(p: &ExponentFunction, grid: &LogGrid, f: &SampledFunction, tol: f64) -> Result<bool> {
    let norm = luxemburg_norm(p, grid, f, tol)?.norm;
    let m = modular(p, grid, f)?;
    Ok((norm <= 1.0 + tol && m <= 1.0 + tol) || (norm >= 1.0 - tol && m >= 1.0 - tol))
}

/// One term `f_v` of a sequence of functions, supported on `range`.
#[derive(Clone, Debug)]
pub struct Block {
    pub index: i32,
    pub range: NodeRange,
    pub function: SampledFunction,
}

#[derive(Clone, Debug)]
pub struct MixedNormInput {
    pub outer: ExponentFunction,
    pub inner: ExponentFunction,
    pub blocks: Vec<Block>,
}

#[derive(Clone, Debug)]
pub struct MixedNormResult {
    pub norm: f64,
    pub solver: LuxemburgResult,
    /// Set when `p(t)/q(t) < 1` somewhere on a nonzero block.
    pub sub_unit_inner_exponent: bool,
    pub zero_blocks: usize,
}

/// Splits `f` into its dyadic pieces `f·χ_{[2^v, 2^{v+1}]}`.
pub fn dyadic_blocks(grid: &LogGrid, f: &SampledFunction) -> Result<Vec<Block>> {
    grid.check(f)?;
    let spec = grid.spec();
    (spec.v_min..spec.v_max)
        .map(|v| {
            let range = NodeRange::new(
                grid.octave_index(v).expect("octave on grid"),
                grid.octave_index(v + 1).expect("octave on grid"),
            );
            Ok(Block {
                index: v,
                range,
                function: f.restricted(range),
            })
        })
        .collect()
}

/// Norm of `(f_v)_v` in `ℓ^{q(·)}(L^{p(·)})` through the modular
/// `Σ_v ‖ |f_v/μ|^{q(·)} ‖_{p(·)/q(·)}`.
///
/// Zero blocks contribute nothing at any scale and are skipped. Inner
/// exponents below 1 are handled by the same monotone solver and flagged.
pub fn mixed_norm(input: &MixedNormInput, grid: &LogGrid, tol: f64) -> Result<MixedNormResult> {
    check_tolerance(tol)?;
    let q = input.outer.sample(grid)?;
    let p = input.inner.sample(grid)?;
    let ratio: Vec<f64> = p.iter().zip(&q).map(|(a, b)| a / b).collect();
    let inner_tol = (tol * 1e-3).max(1e-13);

    let mut active = Vec::new();
    let mut zero_blocks = 0;
    let mut sub_unit = false;
    let mut scale = 0.0f64;
    for block in &input.blocks {
        grid.check(&block.function)?;
        if block.range.end >= grid.len() {
            return Err(Error::InvalidParameter(format!("block {} exceeds the grid", block.index)));
        }
        let values = block.function.values();
        if negligible(grid, values, block.range) {
            zero_blocks += 1;
            continue;
        }
        sub_unit |= block.range.indices().any(|i| values[i] > 0.0 && ratio[i] < 1.0);
        scale = block.range.indices().map(|i| values[i]).fold(scale, f64::max);
        active.push(block);
    }
    if active.is_empty() {
        return Ok(MixedNormResult {
            norm: 0.0,
            solver: LuxemburgResult::zero(tol),
            sub_unit_inner_exponent: false,
            zero_blocks,
        });
    }

    let rho = |mu: f64| -> f64 {
        let mut sum = 0.0;
        for block in &active {
            let range = block.range;
            let values = block.function.values();
            let powered: Vec<f64> = (0..grid.len())
                .map(|i| {
                    if range.contains(i) && values[i] > 0.0 {
                        (values[i] / mu).powf(q[i])
                    } else {
                        0.0
                    }
                })
                .collect();
            if powered.iter().any(|v| v.is_infinite()) {
                return f64::INFINITY;
            }
            match luxemburg_with_exponents(grid, &ratio, &powered, range, inner_tol) {
                Ok(r) => sum += r.norm,
                Err(Error::Saturated) => return f64::INFINITY,
                Err(_) => {
                    // surfaced after the outer solve
                    return f64::NAN;
                }
            }
        }
        saturate(sum)
    };
    let solver = solve_unit_level(
        |mu| {
            let r = rho(mu);
            if r.is_nan() {
                f64::INFINITY
            } else {
                r
            }
        },
        scale,
        tol,
    )?;
    Ok(MixedNormResult {
        norm: solver.norm,
        solver,
        sub_unit_inner_exponent: sub_unit,
        zero_blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn grid(v_min: i32, v_max: i32, npo: u32) -> LogGrid {
        LogGrid::build(v_min, v_max, npo).unwrap()
    }

    fn konst(q: f64) -> ExponentFunction {
        ExponentFunction::constant(q).unwrap()
    }

    #[test]
    fn zero_function() {
        let g = grid(-5, 5, 4);
        let f = SampledFunction::zeros(&g);
        let p = ExponentFunction::log_interp(3.0, 2.0).unwrap();
        assert_eq!(modular(&p, &g, &f).unwrap(), 0.0);
        let r = luxemburg_norm(&p, &g, &f, 1e-8).unwrap();
        assert_eq!(r.norm, 0.0);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn modular_of_linear_ramp() {
        // ∫_0^1 t^2 dt/t = 1/2
        let g = grid(-30, 0, 64);
        let f = SampledFunction::from_fn(&g, |t| t).unwrap();
        let m = modular(&konst(2.0), &g, &f).unwrap();
        assert!((m - 0.5).abs() < 1e-3, "{m}");
    }

    #[test]
    fn modular_is_homogeneous_for_constant_exponent() {
        let g = grid(-6, 6, 8);
        let f = SampledFunction::from_fn(&g, |t| t.min(1.0 / t).sqrt()).unwrap();
        let p = konst(2.5);
        let m1 = modular(&p, &g, &f).unwrap();
        let m3 = modular(&p, &g, &f.scaled(3.0).unwrap()).unwrap();
        assert!((m3 / m1 - 3f64.powf(2.5)).abs() < 1e-12);
    }

    #[test]
    fn octave_indicator_norm() {
        // modular(χ/λ) = ln2/λ² so the norm is √(ln 2)
        let g = grid(-4, 4, 8);
        let f = SampledFunction::from_fn(&g, |t| if (1.0..=2.0).contains(&t) { 1.0 } else { 0.0 }).unwrap();
        let range = g.range_between(1.0, 2.0).unwrap();
        let r = luxemburg_norm_on(&konst(2.0), &g, &f, range, 1e-10).unwrap();
        assert!((r.norm - LN_2.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn constant_exponent_matches_fixed_norm() {
        let g = grid(-30, 30, 8);
        let f = SampledFunction::from_fn(&g, |t| t.min(1.0 / t).powf(0.3)).unwrap();
        for q in [1.0, 1.5, 2.0, 3.0, 7.0] {
            let lux = luxemburg_norm(&konst(q), &g, &f, 1e-8).unwrap().norm;
            let fixed = fixed_norm(q, &g, &f, g.bottom(), g.top()).unwrap();
            assert!((lux - fixed).abs() <= 1e-6 * fixed, "q={q}: {lux} vs {fixed}");
        }
    }

    #[test]
    fn solver_contract() {
        let g = grid(-30, 30, 8);
        let f = SampledFunction::from_fn(&g, |t| 40.0 * t.min(1.0 / t).powf(0.7)).unwrap();
        let p = ExponentFunction::log_perturbed(3.5, 1.3, 0.4, 0.2).unwrap();
        let r = luxemburg_norm(&p, &g, &f, 1e-9).unwrap();
        assert!((r.modular_at_norm - 1.0).abs() <= 1e-9);
        assert!(r.bracket.0 <= r.norm && r.norm <= r.bracket.1);
        let direct = modular(&p, &g, &f.scaled(1.0 / r.norm).unwrap()).unwrap();
        assert!((direct - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn extreme_scales_converge() {
        let g = grid(-10, 10, 4);
        let p = ExponentFunction::log_interp(4.0, 1.2).unwrap();
        for c in [1e-120, 1e-30, 1e30, 1e120] {
            let f = SampledFunction::from_fn(&g, |t| c * t.min(1.0 / t)).unwrap();
            let r = luxemburg_norm(&p, &g, &f, 1e-8).unwrap();
            assert!((r.modular_at_norm - 1.0).abs() <= 1e-8, "c={c}");
        }
    }

    #[test]
    fn fixed_norm_closed_forms() {
        let g = grid(-30, 10, 16);
        // ∫_0^1 t^{αq} dt/t = 1/(αq)
        let alpha = 0.75;
        let f = SampledFunction::from_fn(&g, |t| t.powf(alpha)).unwrap();
        for q in [1.0, 2.0, 3.0] {
            let got = fixed_norm(q, &g, &f, g.bottom(), 1.0).unwrap();
            let want = (1.0 / (alpha * q)).powf(1.0 / q);
            assert!((got - want).abs() / want < 2e-3, "q={q}: {got} vs {want}");
        }
        let one = SampledFunction::from_fn(&g, |_| 1.0).unwrap();
        let got = fixed_norm(2.0, &g, &one, 1.0, g.top()).unwrap();
        assert!((got - (10.0 * LN_2).sqrt()).abs() < 1e-12);
        let plain = g.integrate_between(&f, g.bottom(), 1.0).unwrap();
        assert_eq!(fixed_norm(1.0, &g, &f, g.bottom(), 1.0).unwrap(), plain);
        assert!(fixed_norm(2.0, &g, &f, 1.0, 4096.0).is_err());
        assert!(fixed_norm(0.5, &g, &f, 1.0, 2.0).is_err());
    }

    #[test]
    fn unit_ball_examples() {
        let g = grid(-10, 10, 8);
        let p = konst(2.0);
        assert!(unit_ball_check(&p, &g, &SampledFunction::zeros(&g), 1e-8).unwrap());
        let f = SampledFunction::from_fn(&g, |t| t.min(1.0 / t)).unwrap();
        let m = modular(&p, &g, &f).unwrap();
        let calibrated = f.scaled(1.0 / m.sqrt()).unwrap();
        let r = luxemburg_norm(&p, &g, &calibrated, 1e-8).unwrap();
        assert!((r.norm - 1.0).abs() < 1e-8);
        assert!(unit_ball_check(&p, &g, &calibrated, 1e-8).unwrap());
    }

    #[test]
    fn rejects_bad_tolerance() {
        let g = grid(-2, 2, 2);
        let f = SampledFunction::from_fn(&g, |_| 1.0).unwrap();
        assert!(matches!(luxemburg_norm(&konst(2.0), &g, &f, 0.0), Err(Error::InvalidTolerance(_))));
        assert!(matches!(luxemburg_norm(&konst(2.0), &g, &f, f64::NAN), Err(Error::InvalidTolerance(_))));
    }

    #[test]
    fn mixed_single_block_reduces_to_fixed_norm() {
        let g = grid(-6, 6, 8);
        let f = SampledFunction::from_fn(&g, |t| t.min(1.0 / t).sqrt()).unwrap();
        let block = Block {
            index: 0,
            range: g.full_range(),
            function: f.clone(),
        };
        for q in [1.0, 2.0, 3.5] {
            let input = MixedNormInput {
                outer: konst(q),
                inner: konst(q),
                blocks: vec![block.clone()],
            };
            let got = mixed_norm(&input, &g, 1e-9).unwrap();
            let want = fixed_norm(q, &g, &f, g.bottom(), g.top()).unwrap();
            assert!((got.norm - want).abs() <= 1e-7 * want, "q={q}");
            assert!(!got.sub_unit_inner_exponent);
        }
    }

    #[test]
    fn mixed_dyadic_blocks_match_luxemburg_norm() {
        let g = grid(-12, 12, 8);
        let p = ExponentFunction::log_interp(3.0, 1.5).unwrap();
        let f = SampledFunction::from_fn(&g, |t| 2.0 * t.min(1.0 / t).powf(0.4)).unwrap();
        let blocks = dyadic_blocks(&g, &f).unwrap();
        let input = MixedNormInput {
            outer: p.clone(),
            inner: p.clone(),
            blocks,
        };
        let mixed = mixed_norm(&input, &g, 1e-9).unwrap();
        let lux = luxemburg_norm(&p, &g, &f, 1e-9).unwrap().norm;
        assert!((mixed.norm / lux - 1.0).abs() < 1e-6, "{} vs {lux}", mixed.norm);
    }

    #[test]
    fn mixed_all_zero_and_sub_unit_flag() {
        let g = grid(-4, 4, 4);
        let zero = SampledFunction::zeros(&g);
        let blocks = dyadic_blocks(&g, &zero).unwrap();
        let input = MixedNormInput {
            outer: konst(2.0),
            inner: konst(2.0),
            blocks,
        };
        let r = mixed_norm(&input, &g, 1e-8).unwrap();
        assert_eq!(r.norm, 0.0);
        assert_eq!(r.zero_blocks, 8);

        let f = SampledFunction::from_fn(&g, |t| t.min(1.0 / t)).unwrap();
        let input = MixedNormInput {
            outer: konst(3.0),
            inner: konst(1.5),
            blocks: dyadic_blocks(&g, &f).unwrap(),
        };
        let r = mixed_norm(&input, &g, 1e-8).unwrap();
        assert!(r.sub_unit_inner_exponent);
        assert!(r.norm > 0.0 && r.norm.is_finite());
    }
}
