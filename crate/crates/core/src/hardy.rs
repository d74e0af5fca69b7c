//! Power-weighted Hardy averages on the log grid, the discrete convolution
//! bound behind them, and the pointwise Jensen-type estimate for variable
//! exponents.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::ExponentFunction;
use crate::grid::{LogGrid, NodeRange, SampledFunction};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardyParams {
    s: f64,
}

impl HardyParams {
    pub fn new(s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidParameter(format!("weight exponent s = {s} must be positive")));
        }
        Ok(HardyParams { s })
    }

    pub fn s(&self) -> f64 {
        self.s
    }
}

/// Cumulative trapezoid sums of `g` from each node up to node `end`.
fn tail_sums(grid: &LogGrid, g: &[f64], end: usize) -> Vec<f64> {
    let h2 = 0.5 * grid.step();
    let mut out = vec![0.0; grid.len()];
    let mut acc = 0.0;
    for i in (0..end).rev() {
        acc += h2 * (g[i] + g[i + 1]);
        out[i] = acc;
    }
    out
}

/// Cumulative trapezoid sums of `g` from node 0 up to each node.
fn head_sums(grid: &LogGrid, g: &[f64]) -> Vec<f64> {
    let h2 = 0.5 * grid.step();
    let mut out = vec![0.0; grid.len()];
    let mut acc = 0.0;
    for i in 1..grid.len() {
        acc += h2 * (g[i - 1] + g[i]);
        out[i] = acc;
    }
    out
}

fn weighted(grid: &LogGrid, eps: &SampledFunction, power: f64) -> Vec<f64> {
    grid.nodes()
        .iter()
        .zip(eps.values())
        .map(|(t, e)| if *e == 0.0 { 0.0 } else { t.powf(power) * e })
        .collect()
}

/// `η_t = t^s ∫_t^∞ τ^{-s} ε_τ dτ/τ`, the upper limit cut at the grid top.
pub fn eta(params: HardyParams, grid: &LogGrid, eps: &SampledFunction) -> Result<SampledFunction> {
    grid.check(eps)?;
    let inner = tail_sums(grid, &weighted(grid, eps, -params.s), grid.len() - 1);
    finish(grid, &inner, params.s)
}

/// `λ_t = t^{-s} ∫_0^t τ^s ε_τ dτ/τ`, the lower limit cut at the grid bottom.
pub fn lambda(params: HardyParams, grid: &LogGrid, eps: &SampledFunction) -> Result<SampledFunction> {
    grid.check(eps)?;
    let inner = head_sums(grid, &weighted(grid, eps, params.s));
    finish(grid, &inner, -params.s)
}

/// `η_t = t^s ∫_t^1 τ^{-s} ε_τ dτ/τ` for `t ≤ 1`, zero above 1.
pub fn eta_unit(params: HardyParams, grid: &LogGrid, eps: &SampledFunction) -> Result<SampledFunction> {
    grid.check(eps)?;
    let unit = grid.unit_index()?;
    let inner = tail_sums(grid, &weighted(grid, eps, -params.s), unit);
    finish(grid, &inner, params.s)
}

fn finish(grid: &LogGrid, inner: &[f64], power: f64) -> Result<SampledFunction> {
    let values = grid
        .nodes()
        .iter()
        .zip(inner)
        .map(|(t, v)| if *v == 0.0 { 0.0 } else { t.powf(power) * v })
        .collect();
    SampledFunction::new(grid, values)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteHardyParams {
    pub a: f64,
    pub sigma: f64,
    /// `f64::INFINITY` selects the sup norm.
    pub p: f64,
    pub k_min: i64,
    pub k_max: i64,
}

impl DiscreteHardyParams {
    pub fn new(a: f64, sigma: f64, p: f64, k_min: i64, k_max: i64) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::InvalidParameter(format!("a = {a} must lie in (0, 1)")));
        }
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma = {sigma} must be >= 0")));
        }
        if p.is_nan() || p <= 0.0 {
            return Err(Error::InvalidParameter(format!("p = {p} must lie in (0, inf]")));
        }
        if k_min > k_max {
            return Err(Error::EmptyWindow);
        }
        Ok(DiscreteHardyParams { a, sigma, p, k_min, k_max })
    }

    pub fn window_len(&self) -> usize {
        (self.k_max - self.k_min + 1) as usize
    }

    /// `|m|^σ a^{|m|}` with `0^0 = 1`.
    pub fn kernel(&self, m: u64) -> f64 {
        if m == 0 {
            return if self.sigma == 0.0 { 1.0 } else { 0.0 };
        }
        (m as f64).powf(self.sigma) * self.a.powf(m as f64)
    }

    /// Young constant `Σ_m |m|^σ a^{|m|}` for `p ≥ 1`, and the p-triangle
    /// constant `(Σ_m |m|^{σp} a^{|m|p})^{1/p}` below 1.
    pub fn explicit_constant(&self) -> f64 {
        let r = self.p.min(1.0);
        let (a, sigma) = (self.a.powf(r), self.sigma * r);
        let zero = if sigma == 0.0 { 1.0 } else { 0.0 };
        // terms increase until m ≈ σ/ln(1/a), then decay geometrically
        let peak = sigma / -a.ln();
        let mut sum = 0.0;
        let mut m = 1u64;
        loop {
            let term = (m as f64).powf(sigma) * a.powf(m as f64);
            sum += term;
            if (m as f64) > peak && term <= 1e-18 * sum {
                break;
            }
            m += 1;
        }
        (zero + 2.0 * sum).powf(1.0 / r)
    }
}

fn lp_norm(values: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        values.iter().fold(0.0, |m, v| m.max(*v))
    } else {
        values.iter().map(|v| v.powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// `δ_k = Σ_j |k−j|^σ a^{|k−j|} ε_j` over the window; outside terms are 0.
pub fn discrete_hardy_transform(params: &DiscreteHardyParams, eps: &[f64]) -> Result<Vec<f64>> {
    let n = params.window_len();
    if eps.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: eps.len() });
    }
    let kernel: Vec<f64> = (0..n as u64).map(|m| params.kernel(m)).collect();
    Ok((0..n)
        .map(|k| (0..n).map(|j| kernel[k.abs_diff(j)] * eps[j]).sum())
        .collect())
}

/// Slack for comparing an attained bound against 1 in floating point.
pub const ROUNDOFF: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteHardyCheck {
    pub lhs: f64,
    pub rhs_bound: f64,
    pub ratio: f64,
}

pub fn discrete_hardy_check(params: &DiscreteHardyParams, eps: &[f64]) -> Result<DiscreteHardyCheck> {
    if let Some(index) = eps.iter().position(|e| !e.is_finite()) {
        return Err(Error::NonFiniteSample { index });
    }
    if let Some(index) = eps.iter().position(|e| *e < 0.0) {
        return Err(Error::NegativeSample { index, value: eps[index] });
    }
    let delta = discrete_hardy_transform(params, eps)?;
    let lhs = lp_norm(&delta, params.p);
    let rhs_bound = params.explicit_constant() * lp_norm(eps, params.p);
    let ratio = if rhs_bound > 0.0 { lhs / rhs_bound } else { 0.0 };
    Ok(DiscreteHardyCheck { lhs, rhs_bound, ratio })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lemma22Variant {
    /// `p(y,0) = p(y)`, `g = (e+1/x)^{-m} + (e+1/y)^{-m}`, `ω = min(b^m, 1)`.
    OriginPy,
    /// `p(y,0) = p(0)`, `g = (e+1/x)^{-m} χ{p(x) < p(0)}`, `ω = min(b^m, 1)`.
    OriginP0,
    /// `p(y,0) = p_∞`, `g = (e+x)^{-m} χ{p(x) < p_∞}`, `ω = 1`.
    Infinity,
}

impl Lemma22Variant {
    pub const ALL: [Lemma22Variant; 3] = [Lemma22Variant::OriginPy, Lemma22Variant::OriginP0, Lemma22Variant::Infinity];

    pub fn name(self) -> &'static str {
        match self {
            Lemma22Variant::OriginPy => "origin_py",
            Lemma22Variant::OriginP0 => "origin_p0",
            Lemma22Variant::Infinity => "infinity",
        }
    }
}

/// Floor on the log-Hölder constant entering `γ`, keeping `γ < 1` for
/// constant exponents.
pub const MIN_CLOG: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct Lemma22Spec {
    pub a: f64,
    pub b: f64,
    pub m: f64,
    pub variant: Lemma22Variant,
    /// `None` means `w ≡ 1`.
    pub weight: Option<SampledFunction>,
    pub c_log: f64,
    pub gamma: f64,
}

impl Lemma22Spec {
    /// Snaps `a`, `b` to grid nodes and sets `γ = e^{-4 m c_log}`, with
    /// `c_log` the empirical constant of `1/p` at the origin for the origin
    /// variants and the decay constant of `p` for the infinity variant.
    pub fn new(
        p: &ExponentFunction,
        grid: &LogGrid,
        a: f64,
        b: f64,
        m: f64,
        variant: Lemma22Variant,
        weight: Option<SampledFunction>,
    ) -> Result<Self> {
        if !(a > 0.0 && b > a && b.is_finite()) {
            return Err(Error::InvalidParameter(format!("interval ({a}, {b}) must satisfy 0 < a < b < inf")));
        }
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidParameter(format!("m = {m} must be positive")));
        }
        let a = grid.nodes()[grid.nearest_node(a)?];
        let b = grid.nodes()[grid.nearest_node(b)?];
        if b <= a {
            return Err(Error::InvalidParameter(format!("interval ({a}, {b}) collapses on {}", grid.spec())));
        }
        if let Some(w) = &weight {
            grid.check(w)?;
        }
        let c_log = match variant {
            Lemma22Variant::OriginPy | Lemma22Variant::OriginP0 => p.reciprocal_origin_constant(grid)?,
            Lemma22Variant::Infinity => p.log_holder_infinity_constant(grid)?,
        }
        .max(MIN_CLOG);
        let gamma = (-4.0 * m * c_log).exp();
        Ok(Lemma22Spec { a, b, m, variant, weight, c_log, gamma })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma22Node {
    pub x: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    /// Margin with `ω` applied only to the `x`-dependent part of `g`.
    pub margin_ungrouped: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma22Report {
    pub variant: Lemma22Variant,
    pub gamma: f64,
    pub c_log: f64,
    pub m: f64,
    pub weight_mass: f64,
    pub nodes: Vec<Lemma22Node>,
    pub min_margin: f64,
    pub min_margin_ungrouped: f64,
}

/// Evaluates both sides of the pointwise estimate at every grid node `x`
/// in `[a, b]` (or at `x_nodes`, which must lie there).
///
/// Integrals are against `w(y) dy`, realized on the grid as
/// `w(τ) τ dτ/τ`.
pub fn lemma22_check(
    p: &ExponentFunction,
    spec: &Lemma22Spec,
    grid: &LogGrid,
    f: &SampledFunction,
    x_nodes: Option<&[f64]>,
) -> Result<Lemma22Report> {
    grid.check(f)?;
    let range = grid.range_between(spec.a, spec.b)?;
    let nodes = grid.nodes();
    let exps = p.sample(grid)?;
    let w = |i: usize| spec.weight.as_ref().map_or(1.0, |w| w.values()[i]);
    let fv = f.values();

    let weight_mass = grid.trapezoid_with(range, |i| w(i) * nodes[i]);
    if !(weight_mass > 0.0 && weight_mass.is_finite()) {
        return Err(Error::InvalidParameter(format!("weight mass w(Q) = {weight_mass}")));
    }
    let avg = |h: &dyn Fn(usize) -> f64| grid.trapezoid_with(range, |i| h(i) * w(i) * nodes[i]) / weight_mass;

    let sup = range.indices().fold(0.0f64, |s, i| s.max(fv[i]));
    let weighted_modular = grid.trapezoid_with(range, |i| fv[i].powf(exps[i]) * w(i) * nodes[i]);
    if sup > 1.0 && weighted_modular > 1.0 {
        return Err(Error::NormalizationViolated { sup, modular: weighted_modular });
    }

    let p_minus = exps.iter().copied().fold(f64::INFINITY, f64::min);
    let (p0, pinf) = (p.p_zero(), p.p_infinity());
    let m = spec.m;
    let omega = match spec.variant {
        Lemma22Variant::OriginPy | Lemma22Variant::OriginP0 => spec.b.powf(m).min(1.0),
        Lemma22Variant::Infinity => 1.0,
    };
    let mean_f = avg(&|i| fv[i]);
    let jensen_avg = match spec.variant {
        Lemma22Variant::OriginPy => avg(&|i| fv[i].powf(exps[i])),
        Lemma22Variant::OriginP0 => avg(&|i| fv[i].powf(p0)),
        Lemma22Variant::Infinity => avg(&|i| fv[i].powf(pinf)),
    };
    let y_part = match spec.variant {
        Lemma22Variant::OriginPy => avg(&|i| (E + 1.0 / nodes[i]).powf(-m)),
        _ => 0.0,
    };

    let xs: Vec<usize> = match x_nodes {
        None => range.indices().collect(),
        Some(xs) => xs
            .iter()
            .map(|&x| {
                let i = grid.node_index(x)?;
                if range.contains(i) {
                    Ok(i)
                } else {
                    Err(Error::InvalidParameter(format!("x = {x} lies outside Q")))
                }
            })
            .collect::<Result<_>>()?,
    };

    let mut out = Vec::with_capacity(xs.len());
    for i in xs {
        let x = nodes[i];
        let px = exps[i];
        let lhs = (spec.gamma * mean_f).powf(px);
        let first = weight_mass.powf(1.0 - px / p_minus).max(1.0) * jensen_avg;
        // g(x,·) averaged over Q against w; the x part is constant in y
        let x_part = match spec.variant {
            Lemma22Variant::OriginPy => (E + 1.0 / x).powf(-m),
            Lemma22Variant::OriginP0 if px < p0 => (E + 1.0 / x).powf(-m),
            Lemma22Variant::Infinity if px < pinf => (E + x).powf(-m),
            _ => 0.0,
        };
        let rhs = first + omega * (x_part + y_part);
        let rhs_ungrouped = first + omega * x_part + y_part;
        out.push(Lemma22Node {
            x,
            lhs,
            rhs,
            margin: rhs - lhs,
            margin_ungrouped: rhs_ungrouped - lhs,
        });
    }
    let min_margin = out.iter().map(|n| n.margin).fold(f64::INFINITY, f64::min);
    let min_margin_ungrouped = out.iter().map(|n| n.margin_ungrouped).fold(f64::INFINITY, f64::min);
    Ok(Lemma22Report {
        variant: spec.variant,
        gamma: spec.gamma,
        c_log: spec.c_log,
        m,
        weight_mass,
        nodes: out,
        min_margin,
        min_margin_ungrouped,
    })
}

/// Node range of `[a, b]` clipped to the grid, for callers that only
/// need an approximate band.
pub fn band(grid: &LogGrid, a: f64, b: f64) -> Result<NodeRange> {
    let lo = grid.nearest_node(a.max(grid.bottom()))?;
    let hi = grid.nearest_node(b.min(grid.top()))?;
    if lo > hi {
        return Err(Error::ReversedInterval { a, b });
    }
    Ok(NodeRange::new(lo, hi))
}
