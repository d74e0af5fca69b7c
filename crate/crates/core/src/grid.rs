//! Logarithmic discretization of the half-line `(0, ∞)`.
//!
//! Nodes form a geometric progression `2^{v_min + k/npo}`, so every dyadic
//! block `[2^v, 2^{v+1}]` is split into `npo` panels of equal length
//! `h = ln 2 / npo` in the variable `u = ln t`. In that variable the Haar
//! measure `dt/t` is plain Lebesgue measure `du`, and all integrals use the
//! composite trapezoid rule on these panels.
//!
//! Octave boundaries are exact powers of two, and doubling `npo` or widening
//! the octave range yields a grid whose node set is a bit-exact superset of
//! the original one.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use crate::descriptor::{self, serde_via_str};
use crate::error::{Error, Result};

pub const DEFAULT_V_MIN: i32 = -30;
pub const DEFAULT_V_MAX: i32 = 30;
pub const DEFAULT_NODES_PER_OCTAVE: u32 = 8;

/// Relative tolerance used when matching a real number against grid nodes.
const NODE_MATCH_RTOL: f64 = 1e-12;

/// Identity of a grid: octave range and subdivision count.
///
/// Text form is `grid(v_min,v_max,npo)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GridSpec {
    pub v_min: i32,
    pub v_max: i32,
    pub nodes_per_octave: u32,
}

impl GridSpec {
    pub fn new(v_min: i32, v_max: i32, nodes_per_octave: u32) -> Result<Self> {
        if v_min >= v_max {
            return Err(Error::ReversedGrid { v_min, v_max });
        }
        if nodes_per_octave == 0 {
            return Err(Error::ZeroSubdivisions);
        }
        Ok(GridSpec {
            v_min,
            v_max,
            nodes_per_octave,
        })
    }

    pub fn build(self) -> Result<LogGrid> {
        LogGrid::build(self.v_min, self.v_max, self.nodes_per_octave)
    }

    pub fn refined(self) -> Self {
        GridSpec {
            nodes_per_octave: self.nodes_per_octave * 2,
            ..self
        }
    }

    pub fn extended(self, below: i32, above: i32) -> Self {
        GridSpec {
            v_min: self.v_min - below,
            v_max: self.v_max + above,
            ..self
        }
    }

    pub fn node_count(self) -> usize {
        (self.v_max - self.v_min) as usize * self.nodes_per_octave as usize + 1
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            v_min: DEFAULT_V_MIN,
            v_max: DEFAULT_V_MAX,
            nodes_per_octave: DEFAULT_NODES_PER_OCTAVE,
        }
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "grid({},{},{})", self.v_min, self.v_max, self.nodes_per_octave)
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = descriptor::split_call(s)?;
        if name != "grid" {
            return Err(Error::parse(s, "expected `grid(v_min,v_max,npo)`"));
        }
        descriptor::expect_arity(s, &args, 3)?;
        GridSpec::new(
            descriptor::integer(s, args[0])?,
            descriptor::integer(s, args[1])?,
            descriptor::integer(s, args[2])?,
        )
    }
}

serde_via_str!(GridSpec);

/// Inclusive range of node indices `[start, end]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NodeRange {
    pub start: usize,
    pub end: usize,
}

impl NodeRange {
    pub fn new(start: usize, end: usize) -> Self {
        assert!(start <= end, "node range reversed: {start} > {end}");
        NodeRange { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, i: usize) -> bool {
        self.start <= i && i <= self.end
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<usize> {
        self.start..=self.end
    }
}

#[derive(Clone, Debug)]
pub struct LogGrid {
    spec: GridSpec,
    nodes: Vec<f64>,
    log_weights: Vec<f64>,
    step: f64,
}

impl LogGrid {
    /// Builds the grid on `[2^v_min, 2^v_max]` with `npo` panels per octave.
    pub fn build(v_min: i32, v_max: i32, nodes_per_octave: u32) -> Result<Self> {
        let spec = GridSpec::new(v_min, v_max, nodes_per_octave)?;
        let npo = nodes_per_octave as usize;
        // 2^{r/npo} for r in 0..npo; the exact powers of two carry the octave.
        let fractions: Vec<f64> = (0..npo)
            .map(|r| (r as f64 / nodes_per_octave as f64).exp2())
            .collect();
        let n = spec.node_count();
        let mut nodes = Vec::with_capacity(n);
        for v in v_min..v_max {
            let base = 2f64.powi(v);
            nodes.extend(fractions.iter().map(|fr| base * fr));
        }
        nodes.push(2f64.powi(v_max));

        let step = LN_2 / nodes_per_octave as f64;
        let mut log_weights = vec![step; n];
        log_weights[0] = 0.5 * step;
        log_weights[n - 1] = 0.5 * step;

        Ok(LogGrid {
            spec,
            nodes,
            log_weights,
            step,
        })
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    /// Panel length in `u = ln t`.
    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn bottom(&self) -> f64 {
        self.nodes[0]
    }

    pub fn top(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn full_range(&self) -> NodeRange {
        NodeRange::new(0, self.len() - 1)
    }

    /// Index of the node `2^v`, if the octave lies on the grid.
    pub fn octave_index(&self, v: i32) -> Option<usize> {
        if v < self.spec.v_min || v > self.spec.v_max {
            return None;
        }
        Some((v - self.spec.v_min) as usize * self.spec.nodes_per_octave as usize)
    }

    pub fn unit_index(&self) -> Result<usize> {
        self.octave_index(0).ok_or(Error::MissingUnitNode(self.spec))
    }

    /// Nearest node to `t` in `ln t`, clamped to the grid ends. This is the
    /// snapping helper callers use before `integrate_between`.
    pub fn nearest_node(&self, t: f64) -> Result<usize> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidPoint(t));
        }
        let k = ((t.log2() - self.spec.v_min as f64) * self.spec.nodes_per_octave as f64).round();
        Ok(k.clamp(0.0, (self.len() - 1) as f64) as usize)
    }

    /// Index of the node equal to `t` (relative tolerance 1e-12).
    pub fn node_index(&self, t: f64) -> Result<usize> {
        let i = self.nearest_node(t)?;
        if ((self.nodes[i] - t) / t).abs() <= NODE_MATCH_RTOL {
            Ok(i)
        } else {
            Err(Error::NotAGridNode(t))
        }
    }

    pub fn range_between(&self, a: f64, b: f64) -> Result<NodeRange> {
        if a > b {
            return Err(Error::ReversedInterval { a, b });
        }
        Ok(NodeRange::new(self.node_index(a)?, self.node_index(b)?))
    }

    /// Trapezoid sum of `values` over the panels of `range`.
    ///
    /// Callers guarantee `values.len() == self.len()`.
    pub(crate) fn trapezoid(&self, range: NodeRange, values: &[f64]) -> f64 {
        self.trapezoid_with(range, |i| values[i])
    }

    /// Trapezoid sum of `value(i)` over the panels of `range`.
    pub(crate) fn trapezoid_with(&self, range: NodeRange, mut value: impl FnMut(usize) -> f64) -> f64 {
        if range.start == range.end {
            return 0.0;
        }
        let mut interior = 0.0;
        for i in range.start + 1..range.end {
            interior += value(i);
        }
        self.step * (interior + 0.5 * (value(range.start) + value(range.end)))
    }

    /// `∫ f dt/t` over the whole grid.
    pub fn integrate(&self, f: &SampledFunction) -> Result<f64> {
        self.check(f)?;
        Ok(self.trapezoid(self.full_range(), &f.values))
    }

    /// `∫_a^b f dt/t`; `a` and `b` must be grid nodes.
    pub fn integrate_between(&self, f: &SampledFunction, a: f64, b: f64) -> Result<f64> {
        self.check(f)?;
        let range = self.range_between(a, b)?;
        Ok(self.trapezoid(range, &f.values))
    }

    pub fn integrate_range(&self, f: &SampledFunction, range: NodeRange) -> Result<f64> {
        self.check(f)?;
        if range.end >= self.len() {
            return Err(Error::InvalidParameter(format!(
                "node range {}..={} exceeds grid of {} nodes",
                range.start,
                range.end,
                self.len()
            )));
        }
        Ok(self.trapezoid(range, &f.values))
    }

    pub(crate) fn check(&self, f: &SampledFunction) -> Result<()> {
        if f.grid != self.spec {
            return Err(Error::GridMismatch {
                expected: self.spec,
                found: f.grid,
            });
        }
        Ok(())
    }
}

/// Nonnegative, finite samples on the nodes of one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    grid: GridSpec,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(grid: &LogGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        for (index, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteSample { index });
            }
            if v < 0.0 {
                return Err(Error::NegativeSample { index, value: v });
            }
        }
        Ok(SampledFunction {
            grid: grid.spec(),
            values,
        })
    }

    pub fn from_fn(grid: &LogGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.nodes().iter().map(|&t| f(t)).collect())
    }

    pub fn zeros(grid: &LogGrid) -> Self {
        SampledFunction {
            grid: grid.spec(),
            values: vec![0.0; grid.len()],
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale factor {c}")));
        }
        Ok(SampledFunction {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
        })
    }

    /// Pointwise power `f^q`.
    pub fn powf(&self, q: f64) -> Self {
        SampledFunction {
            grid: self.grid,
            values: self.values.iter().map(|v| v.powf(q)).collect(),
        }
    }

    /// Copy that keeps the samples inside `range` and zeroes the rest.
    pub fn restricted(&self, range: NodeRange) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| if range.contains(i) { v } else { 0.0 })
            .collect();
        SampledFunction {
            grid: self.grid,
            values,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_octave_grid() {
        let g = LogGrid::build(0, 1, 1).unwrap();
        assert_eq!(g.nodes(), &[1.0, 2.0]);
        assert!((g.log_weights().iter().sum::<f64>() - LN_2).abs() < 1e-15);
    }

    #[test]
    fn node_count_and_span() {
        let g = LogGrid::build(-20, 20, 16).unwrap();
        assert_eq!(g.len(), 641);
        assert_eq!(g.bottom(), 2f64.powi(-20));
        assert_eq!(g.top(), 2f64.powi(20));
    }

    #[test]
    fn weights_sum_to_log_length() {
        let g = LogGrid::build(-10, 10, 8).unwrap();
        let sum: f64 = g.log_weights().iter().sum();
        assert!((sum - 20.0 * LN_2).abs() < 1e-12);
    }

    #[test]
    fn constant_ratio_between_nodes() {
        let g = LogGrid::build(-3, 4, 5).unwrap();
        let r = 0.2f64.exp2();
        for w in g.nodes().windows(2) {
            assert!(w[1] > w[0]);
            assert!((w[1] / w[0] - r).abs() < 1e-14);
        }
    }

    #[test]
    fn octave_nodes_are_exact_powers_of_two() {
        let g = LogGrid::build(-7, 5, 6).unwrap();
        for v in -7..=5 {
            assert_eq!(g.nodes()[g.octave_index(v).unwrap()], 2f64.powi(v));
        }
        assert_eq!(g.unit_index().unwrap(), 42);
    }

    #[test]
    fn refined_grid_contains_original_nodes_bitwise() {
        let g = LogGrid::build(-4, 4, 3).unwrap();
        let r = LogGrid::build(-4, 4, 6).unwrap();
        for (k, &t) in g.nodes().iter().enumerate() {
            assert_eq!(r.nodes()[2 * k], t);
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(matches!(LogGrid::build(2, 2, 4), Err(Error::ReversedGrid { .. })));
        assert!(matches!(LogGrid::build(3, 1, 4), Err(Error::ReversedGrid { .. })));
        assert!(matches!(LogGrid::build(0, 1, 0), Err(Error::ZeroSubdivisions)));
    }

    #[test]
    fn integrates_constant_exactly() {
        let g = LogGrid::build(0, 1, 64).unwrap();
        let one = SampledFunction::from_fn(&g, |_| 1.0).unwrap();
        assert!((g.integrate(&one).unwrap() - LN_2).abs() < 1e-12);
    }

    #[test]
    fn integrates_identity_to_second_order() {
        // ∫_1^2 t dt/t = 1
        let g = LogGrid::build(0, 1, 256).unwrap();
        let f = SampledFunction::from_fn(&g, |t| t).unwrap();
        assert!((g.integrate(&f).unwrap() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn indicator_over_panels() {
        let g = LogGrid::build(0, 2, 4).unwrap();
        // Nonzero on nodes 0..=4, i.e. the first four panels.
        let f = SampledFunction::from_fn(&g, |t| if t <= 2.0 { 1.0 } else { 0.0 }).unwrap();
        let expected = 4.0 * g.step() + 0.5 * g.step();
        assert!((g.integrate(&f).unwrap() - expected).abs() < 1e-15);
        assert!((g.integrate_between(&f, 1.0, 2.0).unwrap() - LN_2).abs() < 1e-15);
    }

    #[test]
    fn between_is_additive_and_empty_on_points() {
        let g = LogGrid::build(-5, 5, 8).unwrap();
        let f = SampledFunction::from_fn(&g, |t| (t.ln()).sin().abs() + t.sqrt()).unwrap();
        assert_eq!(g.integrate_between(&f, 2.0, 2.0).unwrap(), 0.0);
        let full = g.integrate(&f).unwrap();
        for c in [0.25, 1.0, 2f64.powf(0.375), 16.0] {
            let left = g.integrate_between(&f, g.bottom(), c).unwrap();
            let right = g.integrate_between(&f, c, g.top()).unwrap();
            assert!(((left + right) - full).abs() <= 1e-14 * full);
        }
        let one = SampledFunction::from_fn(&g, |_| 1.0).unwrap();
        assert!((g.integrate_between(&one, 1.0, 2.0).unwrap() - LN_2).abs() < 1e-12);
    }

    #[test]
    fn between_rejects_bad_bounds() {
        let g = LogGrid::build(-2, 2, 4).unwrap();
        let f = SampledFunction::zeros(&g);
        assert!(matches!(g.integrate_between(&f, 2.0, 1.0), Err(Error::ReversedInterval { .. })));
        assert!(matches!(g.integrate_between(&f, 1.0, 1.1), Err(Error::NotAGridNode(_))));
        assert!(matches!(g.integrate_between(&f, 1.0, 8.0), Err(Error::NotAGridNode(_))));
        assert!(matches!(g.integrate_between(&f, -1.0, 1.0), Err(Error::InvalidPoint(_))));
    }

    #[test]
    fn rejects_foreign_or_invalid_samples() {
        let g = LogGrid::build(-2, 2, 4).unwrap();
        let h = LogGrid::build(-2, 2, 8).unwrap();
        let f = SampledFunction::zeros(&h);
        assert!(matches!(g.integrate(&f), Err(Error::GridMismatch { .. })));
        assert!(matches!(
            SampledFunction::new(&g, vec![f64::NAN; g.len()]),
            Err(Error::NonFiniteSample { index: 0 })
        ));
        assert!(matches!(
            SampledFunction::new(&g, vec![1.0; 3]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn nearest_node_snaps() {
        let g = LogGrid::build(-2, 2, 4).unwrap();
        assert_eq!(g.nearest_node(1.01).unwrap(), g.unit_index().unwrap());
        assert_eq!(g.nearest_node(1e-9).unwrap(), 0);
        assert_eq!(g.nearest_node(1e9).unwrap(), g.len() - 1);
    }

    #[test]
    fn spec_text_roundtrip() {
        let s: GridSpec = "grid(-30,30,8)".parse().unwrap();
        assert_eq!(s, GridSpec::default());
        assert_eq!(s.to_string(), "grid(-30,30,8)");
        assert!("grid(1,0,8)".parse::<GridSpec>().is_err());
        assert!("grod(0,1,8)".parse::<GridSpec>().is_err());
    }
}
