//! Grid functions, variable-exponent Lebesgue modulars and Luxemburg norms.

use std::sync::Arc;

use serde::Serialize;

use crate::domain::GridDomain;
use crate::error::{Error, Result};
use crate::exponent::{conjugate, ScalarExponent};
use crate::par;

/// Lower end of the Luxemburg bisection bracket.
pub const BISECTION_FLOOR: f64 = 1e-14;
pub const BISECTION_MAX_ITER: usize = 200;
pub const BISECTION_TOL: f64 = 1e-12;

/// Nodal values on a grid. `in_x0` records whether the function vanishes at
/// every exterior node.
#[derive(Debug, Clone)]
pub struct GridFunction {
    grid: Arc<GridDomain>,
    values: Vec<f64>,
    in_x0: bool,
}

impl GridFunction {
    pub fn new(grid: Arc<GridDomain>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let in_x0 = (0..grid.len()).all(|i| grid.in_omega(i) || values[i] == 0.0);
        Ok(Self { grid, values, in_x0 })
    }

    /// Like [`GridFunction::new`] but rejects functions that do not vanish outside Ω.
    pub fn x0(grid: Arc<GridDomain>, values: Vec<f64>) -> Result<Self> {
        let f = Self::new(grid, values)?;
        f.require_x0()?;
        Ok(f)
    }

    pub fn zero(grid: Arc<GridDomain>) -> Self {
        let n = grid.len();
        Self {
            grid,
            values: vec![0.0; n],
            in_x0: true,
        }
    }

    /// Samples `f` at Ω nodes and sets exterior nodes to zero.
    pub fn x0_from_fn(grid: Arc<GridDomain>, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = (0..grid.len())
            .map(|i| if grid.in_omega(i) { f(grid.node(i)) } else { 0.0 })
            .collect();
        Self::x0(grid, values)
    }

    /// Builds an X₀ function from values at the Ω nodes (in `omega_nodes` order).
    pub fn from_omega_values(grid: Arc<GridDomain>, omega_values: &[f64]) -> Result<Self> {
        let nodes = grid.omega_nodes();
        if omega_values.len() != nodes.len() {
            return Err(Error::LengthMismatch {
                expected: nodes.len(),
                got: omega_values.len(),
            });
        }
        let mut values = vec![0.0; grid.len()];
        for (k, &i) in nodes.iter().enumerate() {
            values[i] = omega_values[k];
        }
        Self::x0(grid, values)
    }

    pub fn require_x0(&self) -> Result<()> {
        if self.in_x0 {
            return Ok(());
        }
        let node = (0..self.grid.len())
            .find(|&i| !self.grid.in_omega(i) && self.values[i] != 0.0)
            .unwrap_or(0);
        Err(Error::NotInX0 {
            node,
            value: self.values[node],
        })
    }

    pub fn grid(&self) -> &Arc<GridDomain> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn in_x0(&self) -> bool {
        self.in_x0
    }

    /// Values at the Ω nodes, in `omega_nodes` order.
    pub fn omega_values(&self) -> Vec<f64> {
        self.grid.omega_nodes().iter().map(|&i| self.values[i]).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| a * v).collect(),
            in_x0: self.in_x0,
        }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &GridFunction, b: f64) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
            in_x0: self.in_x0 && other.in_x0,
        })
    }

    pub fn add(&self, other: &GridFunction) -> Result<Self> {
        self.combine(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &GridFunction) -> Result<Self> {
        self.combine(1.0, other, -1.0)
    }

    pub fn max_distance(&self, other: &GridFunction) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    pub(crate) fn check_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.grid.same_grid(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// CSV: `node,x[,y],value`.
    pub fn to_csv(&self) -> String {
        use std::fmt::Write as _;
        let g = &self.grid;
        let mut out = String::from(if g.dim() == 1 {
            "node,x,value\n"
        } else {
            "node,x,y,value\n"
        });
        for i in 0..g.len() {
            let _ = write!(out, "{i}");
            for c in g.node(i) {
                let _ = write!(out, ",{c:.16e}");
            }
            let _ = writeln!(out, ",{:.16e}", self.values[i]);
        }
        out
    }
}

/// Finds `inf{λ > 0 : modular_at(λ) ≤ 1}` by bisection, where `modular_at(λ)`
/// is the modular of `u/λ` and must be continuous and non-increasing in λ.
///
/// Returns the norm and the number of bisection steps.
pub fn luxemburg_bisect<F>(modular_at: F, upper_hint: f64) -> Result<(f64, usize)>
where
    F: Fn(f64) -> f64,
{
    let mut lo = BISECTION_FLOOR;
    let mut shrink = 0;
    while modular_at(lo) <= 1.0 {
        lo *= 1e-4;
        shrink += 1;
        if shrink > 60 || lo == 0.0 {
            // modular stays below 1 for every positive λ: the function is zero
            return Ok((0.0, 0));
        }
    }
    let mut hi = upper_hint.max(2.0 * lo);
    let mut grow = 0;
    while modular_at(hi) > 1.0 {
        hi *= 2.0;
        grow += 1;
        if grow > 2000 || !hi.is_finite() {
            return Err(Error::BisectionFailed {
                iterations: grow,
                width: f64::INFINITY,
            });
        }
    }
    let mut iterations = 0;
    while iterations < BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if modular_at(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    if hi - lo > BISECTION_TOL * hi.max(1.0) {
        return Err(Error::BisectionFailed {
            iterations,
            width: hi - lo,
        });
    }
    Ok((hi, iterations))
}

/// `Σ_k w_k |v_k|^{e_k}` in blocked order.
pub fn weighted_power_sum(values: &[f64], weights: &[f64], exponents: &[f64]) -> f64 {
    par::sum_indexed(values.len(), |k| {
        let v = values[k];
        if v == 0.0 {
            0.0
        } else {
            weights[k] * v.abs().powf(exponents[k])
        }
    })
}

/// Luxemburg norm of the weighted sample `(values, weights, exponents)`.
pub fn weighted_luxemburg(values: &[f64], weights: &[f64], exponents: &[f64]) -> Result<f64> {
    if values.iter().all(|&v| v == 0.0) {
        return Ok(0.0);
    }
    let e_min = exponents.iter().copied().fold(f64::INFINITY, f64::min);
    let vmax = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let measure: f64 = weights.iter().sum();
    let hint = 2.0 * (vmax * measure.powf(1.0 / e_min)).max(1.0);
    luxemburg_bisect(
        |lambda| {
            par::sum_indexed(values.len(), |k| {
                let v = values[k];
                if v == 0.0 {
                    0.0
                } else {
                    weights[k] * (v.abs() / lambda).powf(exponents[k])
                }
            })
        },
        hint,
    )
    .map(|(n, _)| n)
}

struct OmegaSample {
    values: Vec<f64>,
    weights: Vec<f64>,
    exponents: Vec<f64>,
}

fn omega_sample(u: &GridFunction, q: &ScalarExponent) -> OmegaSample {
    let g = u.grid();
    let nodes = g.omega_nodes();
    OmegaSample {
        values: nodes.iter().map(|&i| u.values()[i]).collect(),
        weights: nodes.iter().map(|&i| g.weight(i)).collect(),
        exponents: nodes.iter().map(|&i| q.eval(g.node(i))).collect(),
    }
}

/// ρ_q(u) = ∫_Ω |u|^{q(x)}.
pub fn modular_lebesgue(u: &GridFunction, q: &ScalarExponent) -> f64 {
    let s = omega_sample(u, q);
    weighted_power_sum(&s.values, &s.weights, &s.exponents)
}

/// ‖u‖_{L^{q(x)}(Ω)}.
pub fn luxemburg_norm(u: &GridFunction, q: &ScalarExponent) -> Result<f64> {
    let s = omega_sample(u, q);
    weighted_luxemburg(&s.values, &s.weights, &s.exponents)
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct HolderPair {
    pub lhs: f64,
    pub rhs: f64,
}

impl HolderPair {
    pub fn holds(&self, slack: f64) -> bool {
        self.lhs <= self.rhs * (1.0 + slack) + slack
    }
}

/// `(|∫_Ω uv|, 2‖u‖_{L^q}‖v‖_{L^q̂})`.
pub fn holder_pairing(u: &GridFunction, v: &GridFunction, q: &ScalarExponent) -> Result<HolderPair> {
    u.check_same_grid(v)?;
    let g = u.grid();
    let nodes = g.omega_nodes();
    let lhs = par::sum_indexed(nodes.len(), |k| {
        let i = nodes[k];
        g.weight(i) * u.values()[i] * v.values()[i]
    })
    .abs();
    let qhat = conjugate(q);
    let rhs = 2.0 * luxemburg_norm(u, q)? * luxemburg_norm(v, &qhat)?;
    Ok(HolderPair { lhs, rhs })
}

/// Outcome of a modular/norm relation check.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RelationReport {
    pub norm: f64,
    pub modular: f64,
    pub exponent_minus: f64,
    pub exponent_plus: f64,
    pub violations: Vec<String>,
}

impl RelationReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the unit correspondence and the power sandwich between a modular
/// and its Luxemburg norm. `tol` is relative.
pub fn modular_norm_relations(norm: f64, modular: f64, e_minus: f64, e_plus: f64, tol: f64) -> RelationReport {
    let mut violations = Vec::new();
    if (norm - 1.0).abs() <= tol {
        if (modular - 1.0).abs() > 2.0 * e_plus * tol {
            violations.push(format!("norm = 1 but modular = {modular}"));
        }
    } else if norm < 1.0 {
        if modular >= 1.0 {
            violations.push(format!("norm {norm} < 1 but modular {modular} >= 1"));
        }
        let (lo, hi) = (norm.powf(e_plus), norm.powf(e_minus));
        if modular < lo * (1.0 - tol) || modular > hi * (1.0 + tol) {
            violations.push(format!("norm < 1: modular {modular} outside [{lo}, {hi}]"));
        }
    } else {
        if modular <= 1.0 {
            violations.push(format!("norm {norm} > 1 but modular {modular} <= 1"));
        }
        let (lo, hi) = (norm.powf(e_minus), norm.powf(e_plus));
        if modular < lo * (1.0 - tol) || modular > hi * (1.0 + tol) {
            violations.push(format!("norm > 1: modular {modular} outside [{lo}, {hi}]"));
        }
    }
    RelationReport {
        norm,
        modular,
        exponent_minus: e_minus,
        exponent_plus: e_plus,
        violations,
    }
}

/// Unit correspondence and power bounds between ρ_q and ‖·‖_{L^q}.
pub fn check_modular_norm_relations(u: &GridFunction, q: &ScalarExponent) -> Result<RelationReport> {
    if u.omega_values().iter().all(|&v| v == 0.0) {
        return Err(Error::Precondition("u must be nonzero on Ω".into()));
    }
    let norm = luxemburg_norm(u, q)?;
    Ok(modular_norm_relations(
        norm,
        modular_lebesgue(u, q),
        q.q_minus(),
        q.q_plus(),
        1e-9,
    ))
}
