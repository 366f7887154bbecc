//! Uniform tensor grids over a truncation box, the Ω mask, and the pair set
//! that discretizes Q = ℝ²ᴺ minus (exterior × exterior).

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::par;

/// Predefined shapes for Ω. All shapes are open sets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum OmegaShape {
    Interval { lo: f64, hi: f64 },
    Rectangle { lo: [f64; 2], hi: [f64; 2] },
    Disk { center: [f64; 2], radius: f64 },
}

impl OmegaShape {
    pub fn dim(&self) -> usize {
        match self {
            OmegaShape::Interval { .. } => 1,
            _ => 2,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match *self {
            OmegaShape::Interval { lo, hi } => lo < x[0] && x[0] < hi,
            OmegaShape::Rectangle { lo, hi } => lo[0] < x[0] && x[0] < hi[0] && lo[1] < x[1] && x[1] < hi[1],
            OmegaShape::Disk { center, radius } => {
                let (dx, dy) = (x[0] - center[0], x[1] - center[1]);
                dx * dx + dy * dy < radius * radius
            }
        }
    }

    /// Distance from an interior point to ∂Ω (0 outside).
    pub fn depth(&self, x: &[f64]) -> f64 {
        if !self.contains(x) {
            return 0.0;
        }
        match *self {
            OmegaShape::Interval { lo, hi } => (x[0] - lo).min(hi - x[0]),
            OmegaShape::Rectangle { lo, hi } => (x[0] - lo[0]).min(hi[0] - x[0]).min(x[1] - lo[1]).min(hi[1] - x[1]),
            OmegaShape::Disk { center, radius } => {
                radius - ((x[0] - center[0]).powi(2) + (x[1] - center[1]).powi(2)).sqrt()
            }
        }
    }

    /// Axis-aligned bounding box `(lo, hi)`.
    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        match *self {
            OmegaShape::Interval { lo, hi } => (vec![lo], vec![hi]),
            OmegaShape::Rectangle { lo, hi } => (lo.to_vec(), hi.to_vec()),
            OmegaShape::Disk { center, radius } => (
                vec![center[0] - radius, center[1] - radius],
                vec![center[0] + radius, center[1] + radius],
            ),
        }
    }

    pub fn diameter(&self) -> f64 {
        match *self {
            OmegaShape::Interval { lo, hi } => hi - lo,
            OmegaShape::Rectangle { lo, hi } => ((hi[0] - lo[0]).powi(2) + (hi[1] - lo[1]).powi(2)).sqrt(),
            OmegaShape::Disk { radius, .. } => 2.0 * radius,
        }
    }
}

/// Uniform midpoint grid on the box `[lo, hi]` with Ω-membership per node.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDomain {
    dim: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
    h: f64,
    counts: Vec<usize>,
    shape: OmegaShape,
    coords: Vec<f64>,
    weights: Vec<f64>,
    in_omega: Vec<bool>,
    omega_nodes: Vec<usize>,
}

/// Builds the uniform tensor grid with cell width `h` over `[lo, hi]`.
///
/// The box length along every axis must be an integer multiple of `h`; nodes
/// sit at cell centers with weight `h^dim`.
pub fn build_grid(dim: usize, lo: &[f64], hi: &[f64], h: f64, shape: OmegaShape) -> Result<GridDomain> {
    if !(dim == 1 || dim == 2) {
        return Err(Error::InvalidGrid(format!("dimension {dim} not supported")));
    }
    if shape.dim() != dim || lo.len() != dim || hi.len() != dim {
        return Err(Error::InvalidGrid("box/shape dimension mismatch".into()));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidGrid(format!("spacing h = {h} must be positive")));
    }
    let mut counts = Vec::with_capacity(dim);
    for a in 0..dim {
        let len = hi[a] - lo[a];
        if !(len > 0.0) {
            return Err(Error::InvalidGrid(format!("box axis {a} has non-positive length")));
        }
        let cells = (len / h).round();
        if cells < 1.0 || ((len / h) - cells).abs() > 1e-9 * cells.max(1.0) {
            return Err(Error::InvalidGrid(format!(
                "box length {len} on axis {a} is not a multiple of h = {h}"
            )));
        }
        counts.push(cells as usize);
    }
    let n: usize = counts.iter().product();
    let mut coords = Vec::with_capacity(n * dim);
    let mut in_omega = Vec::with_capacity(n);
    let mut on_rim = Vec::with_capacity(n);
    for idx in 0..n {
        let mut rem = idx;
        let mut rim = false;
        let start = coords.len();
        for a in 0..dim {
            let k = rem % counts[a];
            rem /= counts[a];
            rim |= k == 0 || k + 1 == counts[a];
            coords.push(lo[a] + (k as f64 + 0.5) * h);
        }
        in_omega.push(shape.contains(&coords[start..start + dim]));
        on_rim.push(rim);
    }
    let omega_nodes: Vec<usize> = (0..n).filter(|&i| in_omega[i]).collect();
    if omega_nodes.is_empty() {
        return Err(Error::InvalidGrid("Ω contains no grid node".into()));
    }
    if let Some(i) = omega_nodes.iter().find(|&&i| on_rim[i]) {
        return Err(Error::InvalidGrid(format!(
            "Ω touches the box boundary at node {i}; the exterior collar must surround Ω"
        )));
    }
    Ok(GridDomain {
        dim,
        lo: lo.to_vec(),
        hi: hi.to_vec(),
        h,
        counts,
        shape,
        coords,
        weights: vec![h.powi(dim as i32); n],
        in_omega,
        omega_nodes,
    })
}

impl GridDomain {
    /// Grid over the bounding box of Ω widened by `collar` on every side,
    /// rounded outward to a whole number of cells.
    pub fn around(shape: OmegaShape, h: f64, collar: f64) -> Result<Self> {
        if !(collar > 0.0) {
            return Err(Error::InvalidGrid(format!("collar width {collar} must be positive")));
        }
        let (olo, ohi) = shape.bounds();
        let mut lo = Vec::new();
        let mut hi = Vec::new();
        for a in 0..shape.dim() {
            let len = ohi[a] - olo[a] + 2.0 * collar;
            let cells = (len / h - 1e-9).ceil().max(1.0);
            let extra = cells * h - len;
            lo.push(olo[a] - collar - 0.5 * extra);
            hi.push(lo[a] + cells * h);
        }
        build_grid(shape.dim(), &lo, &hi, h, shape)
    }

    /// Same box and Ω, spacing halved.
    pub fn refine(&self) -> Result<Self> {
        build_grid(self.dim, &self.lo, &self.hi, 0.5 * self.h, self.shape)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn shape(&self) -> &OmegaShape {
        &self.shape
    }

    pub fn box_bounds(&self) -> (&[f64], &[f64]) {
        (&self.lo, &self.hi)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn in_omega(&self, i: usize) -> bool {
        self.in_omega[i]
    }

    pub fn omega_mask(&self) -> &[bool] {
        &self.in_omega
    }

    /// Indices of Ω nodes in ascending order.
    pub fn omega_nodes(&self) -> &[usize] {
        &self.omega_nodes
    }

    pub fn n_exterior(&self) -> usize {
        self.len() - self.omega_nodes.len()
    }

    /// Quadrature measure of Ω.
    pub fn omega_measure(&self) -> f64 {
        self.omega_nodes.iter().map(|&i| self.weights[i]).sum()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.node(i), self.node(j));
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
    }

    /// Cheap structural identity used to reject mixing objects from different grids.
    pub fn same_grid(&self, other: &GridDomain) -> bool {
        std::ptr::eq(self, other)
            || (self.len() == other.len() && self.h == other.h && self.lo == other.lo && self.shape == other.shape)
    }

    /// CSV dump: `node,x[,y],weight,in_omega`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(if self.dim == 1 {
            "node,x,weight,in_omega\n"
        } else {
            "node,x,y,weight,in_omega\n"
        });
        for i in 0..self.len() {
            let _ = write!(out, "{i}");
            for c in self.node(i) {
                let _ = write!(out, ",{c:.16e}");
            }
            let _ = writeln!(out, ",{:.16e},{}", self.weights[i], self.in_omega[i]);
        }
        out
    }
}

/// Ordered off-diagonal node pairs with at least one endpoint in Ω.
///
/// Pairs are sorted lexicographically, so the pairs with first index `i`
/// occupy the contiguous range `row(i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSet {
    pairs: Vec<(usize, usize)>,
    weights: Vec<f64>,
    row_start: Vec<usize>,
}

fn collect_pairs(g: &GridDomain, keep: impl Fn(usize, usize) -> bool) -> PairSet {
    let n = g.len();
    let mut pairs = Vec::new();
    let mut weights = Vec::new();
    let mut row_start = Vec::with_capacity(n + 1);
    for i in 0..n {
        row_start.push(pairs.len());
        for j in 0..n {
            if i != j && keep(i, j) {
                pairs.push((i, j));
                weights.push(g.weight(i) * g.weight(j));
            }
        }
    }
    row_start.push(pairs.len());
    PairSet {
        pairs,
        weights,
        row_start,
    }
}

/// Enumerates the discrete Q: all ordered pairs `(i, j)`, `i ≠ j`, except
/// those with both nodes outside Ω.
pub fn build_pairset(g: &GridDomain) -> PairSet {
    collect_pairs(g, |i, j| g.in_omega(i) || g.in_omega(j))
}

/// Pairs with both endpoints in Ω (the Ω×Ω part of Q).
pub fn build_omega_pairset(g: &GridDomain) -> PairSet {
    collect_pairs(g, |i, j| g.in_omega(i) && g.in_omega(j))
}

impl PairSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pair(&self, k: usize) -> (usize, usize) {
        self.pairs[k]
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn weight(&self, k: usize) -> f64 {
        self.weights[k]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Index range of the pairs whose first node is `i`.
    pub fn row(&self, i: usize) -> std::ops::Range<usize> {
        self.row_start[i]..self.row_start[i + 1]
    }

    /// Position of `(i, j)`, if present.
    pub fn find(&self, i: usize, j: usize) -> Option<usize> {
        let r = self.row(i);
        self.pairs[r.clone()]
            .binary_search_by_key(&j, |&(_, b)| b)
            .ok()
            .map(|off| r.start + off)
    }
}

/// `∫_Ω v` by midpoint quadrature. `values` has one entry per grid node.
pub fn integrate(g: &GridDomain, values: &[f64]) -> Result<f64> {
    if values.len() != g.len() {
        return Err(Error::LengthMismatch {
            expected: g.len(),
            got: values.len(),
        });
    }
    let nodes = g.omega_nodes();
    Ok(par::sum_indexed(nodes.len(), |k| {
        let i = nodes[k];
        g.weight(i) * values[i]
    }))
}

/// `∫_Q F` with one value per stored pair.
pub fn integrate_pairs(ps: &PairSet, pair_values: &[f64]) -> Result<f64> {
    if pair_values.len() != ps.len() {
        return Err(Error::LengthMismatch {
            expected: ps.len(),
            got: pair_values.len(),
        });
    }
    Ok(par::sum_indexed(ps.len(), |k| ps.weight(k) * pair_values[k]))
}
