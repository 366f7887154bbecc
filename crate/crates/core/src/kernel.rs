//! Interaction kernels K(x,y) and their admissibility checks: symmetry, the
//! lower bound `K ≥ k₀|x−y|^{−(N+sp)}`, and integrability of `m·K` with
//! `m = min{1, |x−y|^p}`.

use serde::Serialize;

use crate::domain::{build_pairset, GridDomain};
use crate::error::{Error, Result};
use crate::exponent::{pair_vars, ExponentField};
use crate::expr::Expr;
use crate::par;

pub const KERNEL_SYMMETRY_TOL: f64 = 1e-12;
pub const LOWER_BOUND_SLACK: f64 = 1e-9;
pub const INTEGRABILITY_DRIFT: f64 = 0.10;

/// Variables of the multiplier `a(z)`: first coordinate, both coordinates, and `|z|`.
pub const MULTIPLIER_VARS: [&str; 4] = ["z", "z1", "z2", "zn"];
/// Variables of custom kernels.
pub const CUSTOM_VARS: [&str; 10] = ["x", "y", "x1", "x2", "y1", "y2", "dist", "p", "s", "N"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelKind {
    Singular,
    Multiplied,
    Custom,
}

#[derive(Debug, Clone, PartialEq)]
enum KernelLaw {
    Singular { scale: f64 },
    Multiplied { a: Expr },
    Custom { expr: Expr },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    law: KernelLaw,
    k0: f64,
    p: ExponentField,
    dim: usize,
}

fn multiplier_vars(z: &[f64]) -> [f64; 4] {
    let zn = z.iter().map(|a| a * a).sum::<f64>().sqrt();
    [z[0], z[0], z.get(1).copied().unwrap_or(0.0), zn]
}

fn distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

impl Kernel {
    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        self.eval_with(x, y, self.p.eval(x, y))
    }

    /// Evaluates with a precomputed `p(x,y)`.
    pub fn eval_with(&self, x: &[f64], y: &[f64], p_xy: f64) -> f64 {
        let n = self.dim as f64;
        let s = self.p.s();
        match &self.law {
            KernelLaw::Singular { scale } => scale * distance(x, y).powf(-(n + s * p_xy)),
            KernelLaw::Multiplied { a } => {
                let z: Vec<f64> = x.iter().zip(y).map(|(u, v)| u - v).collect();
                distance(x, y).powf(-(n + s * p_xy)) * a.eval(&multiplier_vars(&z))
            }
            KernelLaw::Custom { expr } => {
                let pv = pair_vars(x, y);
                let mut vars = [0.0; 10];
                vars[..7].copy_from_slice(&pv);
                vars[7] = p_xy;
                vars[8] = s;
                vars[9] = n;
                expr.eval(&vars)
            }
        }
    }

    /// Declared lower-bound constant k₀.
    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn kind(&self) -> KernelKind {
        match self.law {
            KernelLaw::Singular { .. } => KernelKind::Singular,
            KernelLaw::Multiplied { .. } => KernelKind::Multiplied,
            KernelLaw::Custom { .. } => KernelKind::Custom,
        }
    }

    pub fn exponent(&self) -> &ExponentField {
        &self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// `|x−y|^{−(N+s p(x,y))}` with k₀ = 1.
pub fn singular_kernel(p: &ExponentField, dim: usize) -> Kernel {
    Kernel {
        law: KernelLaw::Singular { scale: 1.0 },
        k0: 1.0,
        p: p.clone(),
        dim,
    }
}

/// `c·|x−y|^{−(N+s p(x,y))}` with a declared k₀.
pub fn scaled_singular_kernel(p: &ExponentField, dim: usize, c: f64, k0: f64) -> Result<Kernel> {
    if !(c > 0.0 && c.is_finite()) || !(k0 > 0.0) {
        return Err(Error::InvalidKernel(format!("scale {c} and k0 {k0} must be positive")));
    }
    Ok(Kernel {
        law: KernelLaw::Singular { scale: c },
        k0,
        p: p.clone(),
        dim,
    })
}

/// `|x−y|^{−(N+s p(x,y))}·a(x−y)` for a bounded even multiplier `a ≥ 1`.
///
/// The multiplier is checked on every node difference of `grid`.
pub fn multiplied_kernel(p: &ExponentField, dim: usize, a_src: &str, grid: &GridDomain) -> Result<Kernel> {
    let a = Expr::parse(a_src, &MULTIPLIER_VARS)?;
    let n = grid.len();
    for i in 0..n {
        for j in 0..n {
            if i == j || !(grid.in_omega(i) || grid.in_omega(j)) {
                continue;
            }
            let z: Vec<f64> = grid.node(i).iter().zip(grid.node(j)).map(|(u, v)| u - v).collect();
            let neg: Vec<f64> = z.iter().map(|v| -v).collect();
            let (az, an) = (a.eval(&multiplier_vars(&z)), a.eval(&multiplier_vars(&neg)));
            if !az.is_finite() {
                return Err(Error::InvalidKernel(format!("a is unbounded at z = {z:?}")));
            }
            if az < 1.0 {
                return Err(Error::InvalidKernel(format!("a(z) = {az} < 1 at z = {z:?}")));
            }
            if (az - an).abs() > KERNEL_SYMMETRY_TOL * az.abs().max(1.0) {
                return Err(Error::InvalidKernel(format!("a is not even at z = {z:?}")));
            }
        }
    }
    Ok(Kernel {
        law: KernelLaw::Multiplied { a },
        k0: 1.0,
        p: p.clone(),
        dim,
    })
}

/// A user-supplied closed form with a declared k₀. No admissibility is
/// assumed; run [`validate_kernel`].
pub fn custom_kernel(p: &ExponentField, dim: usize, src: &str, k0: f64) -> Result<Kernel> {
    if !(k0 > 0.0) {
        return Err(Error::InvalidKernel(format!("k0 = {k0} must be positive")));
    }
    Ok(Kernel {
        law: KernelLaw::Custom {
            expr: Expr::parse(src, &CUSTOM_VARS)?,
        },
        k0,
        p: p.clone(),
        dim,
    })
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CheckEntry {
    pub pass: bool,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct IntegrabilityEntry {
    pub pass: bool,
    pub coarse: f64,
    pub fine: f64,
    pub relative_change: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct KernelReport {
    pub kind: KernelKind,
    pub declared_k0: f64,
    /// Maximum relative asymmetry over pairs.
    pub symmetry: CheckEntry,
    /// Minimum of `K·|x−y|^{N+sp}` over pairs (the best k₀ the samples allow).
    pub lower_bound: CheckEntry,
    pub integrability: IntegrabilityEntry,
    pub pass: bool,
}

fn truncated_mass(k: &Kernel, p: &ExponentField, g: &GridDomain) -> f64 {
    let ps = build_pairset(g);
    par::sum_indexed(ps.len(), |idx| {
        let (i, j) = ps.pair(idx);
        let (x, y) = (g.node(i), g.node(j));
        let pxy = p.eval(x, y);
        let m = distance(x, y).powf(pxy).min(1.0);
        ps.weight(idx) * m * k.eval(x, y)
    })
}

/// Runs the three admissibility checks on the pair set of `g`, and the
/// integrability drift against one refinement of `g`.
pub fn validate_kernel(k: &Kernel, p: &ExponentField, g: &GridDomain) -> Result<KernelReport> {
    let ps = build_pairset(g);
    let n = k.dim as f64;
    let s = p.s();
    let asym = par::max_indexed(ps.len(), |idx| {
        let (i, j) = ps.pair(idx);
        let (a, b) = (k.eval(g.node(i), g.node(j)), k.eval(g.node(j), g.node(i)));
        let scale = a.abs().max(b.abs());
        if scale == 0.0 {
            0.0
        } else if !(a.is_finite() && b.is_finite()) {
            f64::INFINITY
        } else {
            (a - b).abs() / scale
        }
    })
    .max(0.0);
    let min_ratio = par::min_indexed(ps.len(), |idx| {
        let (i, j) = ps.pair(idx);
        let (x, y) = (g.node(i), g.node(j));
        let r = k.eval(x, y) * distance(x, y).powf(n + s * p.eval(x, y));
        if r.is_nan() {
            f64::NEG_INFINITY
        } else {
            r
        }
    });
    let coarse = truncated_mass(k, p, g);
    let fine = truncated_mass(k, p, &g.refine()?);
    let change = (fine - coarse).abs() / fine.abs().max(f64::MIN_POSITIVE);
    let symmetry = CheckEntry {
        pass: asym < KERNEL_SYMMETRY_TOL,
        value: asym,
    };
    let lower_bound = CheckEntry {
        pass: min_ratio >= k.k0 * (1.0 - LOWER_BOUND_SLACK),
        value: min_ratio,
    };
    let integrability = IntegrabilityEntry {
        pass: coarse.is_finite() && fine.is_finite() && change <= INTEGRABILITY_DRIFT,
        coarse,
        fine,
        relative_change: change,
    };
    Ok(KernelReport {
        kind: k.kind(),
        declared_k0: k.k0,
        pass: symmetry.pass && lower_bound.pass && integrability.pass,
        symmetry,
        lower_bound,
        integrability,
    })
}
