//! Gagliardo-type modulars and seminorms for W^{K,p(x,y)}, the full norm,
//! and the comparison and embedding inequalities between the spaces.

use std::sync::Arc;

use serde::Serialize;

use crate::domain::{build_omega_pairset, build_pairset, GridDomain, PairSet};
use crate::error::{Error, Result};
use crate::exponent::{critical_exponent, trace, ExponentField, ScalarExponent};
use crate::kernel::{singular_kernel, Kernel, KERNEL_SYMMETRY_TOL, LOWER_BOUND_SLACK};
use crate::lebesgue::{luxemburg_bisect, luxemburg_norm, modular_norm_relations, GridFunction, RelationReport};
use crate::par;

/// Pair table for one `(grid, pair set, kernel, exponent)` combination:
/// per-pair quadrature weight, `p(x_i,x_j)` and `K(x_i,x_j)`, evaluated once.
#[derive(Debug, Clone)]
pub struct Interaction {
    grid: Arc<GridDomain>,
    pairs: PairSet,
    kernel: Kernel,
    exponent: ExponentField,
    p: Vec<f64>,
    k: Vec<f64>,
    reverse: Vec<usize>,
}

impl Interaction {
    /// Interaction over the discrete Q.
    pub fn new(grid: Arc<GridDomain>, kernel: &Kernel, exponent: &ExponentField) -> Self {
        let pairs = build_pairset(&grid);
        Self::with_pairs(grid, pairs, kernel, exponent)
    }

    /// Interaction over Ω×Ω only.
    pub fn omega_only(grid: Arc<GridDomain>, kernel: &Kernel, exponent: &ExponentField) -> Self {
        let pairs = build_omega_pairset(&grid);
        Self::with_pairs(grid, pairs, kernel, exponent)
    }

    pub fn with_pairs(grid: Arc<GridDomain>, pairs: PairSet, kernel: &Kernel, exponent: &ExponentField) -> Self {
        let evals = par::map_indexed(pairs.len(), |idx| {
            let (i, j) = pairs.pair(idx);
            let (x, y) = (grid.node(i), grid.node(j));
            let p = exponent.eval(x, y);
            (p, kernel.eval_with(x, y, p))
        });
        let (p, k) = evals.into_iter().unzip();
        let reverse = par::map_indexed(pairs.len(), |idx| {
            let (i, j) = pairs.pair(idx);
            pairs.find(j, i).expect("pair sets are closed under swapping")
        });
        Self {
            grid,
            pairs,
            kernel: kernel.clone(),
            exponent: exponent.clone(),
            p,
            k,
            reverse,
        }
    }

    pub fn grid(&self) -> &Arc<GridDomain> {
        &self.grid
    }

    pub fn pairs(&self) -> &PairSet {
        &self.pairs
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn exponent(&self) -> &ExponentField {
        &self.exponent
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn p_at(&self, idx: usize) -> f64 {
        self.p[idx]
    }

    pub fn k_at(&self, idx: usize) -> f64 {
        self.k[idx]
    }

    /// Index of the swapped pair `(j, i)`.
    pub fn reverse_of(&self, idx: usize) -> usize {
        self.reverse[idx]
    }

    /// `w_i w_j K_ij` for pair `idx`.
    pub fn mass_at(&self, idx: usize) -> f64 {
        self.pairs.weight(idx) * self.k[idx]
    }

    pub(crate) fn check(&self, u: &GridFunction) -> Result<()> {
        if !self.grid.same_grid(u.grid()) {
            return Err(Error::GridMismatch);
        }
        u.require_x0()
    }

    /// Σ over pairs of `w w K |u_i − u_j|^p / scale^p`.
    fn scaled_modular(&self, values: &[f64], scale: f64) -> f64 {
        par::sum_indexed(self.len(), |idx| {
            let (i, j) = self.pairs.pair(idx);
            let d = values[i] - values[j];
            if d == 0.0 {
                0.0
            } else {
                self.mass_at(idx) * (d.abs() / scale).powf(self.p[idx])
            }
        })
    }
}

/// ρ°(u) = ∫_Q |u(x) − u(y)|^{p(x,y)} K(x,y).
pub fn gagliardo_modular(u: &GridFunction, ia: &Interaction) -> Result<f64> {
    ia.check(u)?;
    Ok(ia.scaled_modular(u.values(), 1.0))
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct SeminormResult {
    pub seminorm: f64,
    /// ρ°(u/[u]); equals 1 up to bisection accuracy when the seminorm is positive.
    pub modular_at_unit: f64,
    pub iterations: usize,
}

/// [u]_{K,p} = inf{λ > 0 : ρ°(u/λ) ≤ 1}.
pub fn gagliardo_seminorm(u: &GridFunction, ia: &Interaction) -> Result<SeminormResult> {
    ia.check(u)?;
    let values = u.values();
    if ia.scaled_modular(values, 1.0) == 0.0 {
        return Ok(SeminormResult {
            seminorm: 0.0,
            modular_at_unit: 0.0,
            iterations: 0,
        });
    }
    let p_minus = ia.exponent.p_minus();
    let mass: f64 = par::sum_indexed(ia.len(), |idx| ia.mass_at(idx));
    let hint = 2.0 * (2.0 * u.max_abs() * mass.powf(1.0 / p_minus)).max(1.0);
    let (seminorm, iterations) = luxemburg_bisect(|lambda| ia.scaled_modular(values, lambda), hint)?;
    Ok(SeminormResult {
        seminorm,
        modular_at_unit: ia.scaled_modular(values, seminorm),
        iterations,
    })
}

/// ‖u‖_{K,p} = ‖u‖_{L^{p̄}(Ω)} + [u]_{K,p}.
pub fn full_norm(u: &GridFunction, ia: &Interaction) -> Result<f64> {
    let semi = gagliardo_seminorm(u, ia)?.seminorm;
    Ok(luxemburg_norm(u, &trace(&ia.exponent))? + semi)
}

/// Power sandwich between ρ° and [·]_{K,p} with the exponent bounds p⁻, p⁺.
pub fn check_modular_seminorm_relations(u: &GridFunction, ia: &Interaction) -> Result<RelationReport> {
    let semi = gagliardo_seminorm(u, ia)?;
    if semi.seminorm == 0.0 {
        return Err(Error::Precondition("u must have positive seminorm".into()));
    }
    let modular = gagliardo_modular(u, ia)?;
    let p = &ia.exponent;
    Ok(modular_norm_relations(
        semi.seminorm,
        modular,
        p.p_minus(),
        p.p_plus(),
        1e-9,
    ))
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct TriangleReport {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// ρ°(u + v) ≤ 2^{p⁺−1}(ρ°(u) + ρ°(v)), with relative slack 1e-12.
pub fn check_modular_triangle(u: &GridFunction, v: &GridFunction, ia: &Interaction) -> Result<TriangleReport> {
    let lhs = gagliardo_modular(&u.add(v)?, ia)?;
    let rhs = 2f64.powf(ia.exponent.p_plus() - 1.0) * (gagliardo_modular(u, ia)? + gagliardo_modular(v, ia)?);
    Ok(TriangleReport {
        lhs,
        rhs,
        pass: lhs <= rhs * (1.0 + 1e-12),
    })
}

/// k̃₀ = max{k₀^{−1/p⁻}, k₀^{−1/p⁺}}.
pub fn ktilde(k0: f64, p_minus: f64, p_plus: f64) -> f64 {
    k0.powf(-1.0 / p_minus).max(k0.powf(-1.0 / p_plus))
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct SpaceComparison {
    /// W^{s,p} seminorm over Ω×Ω with the singular kernel.
    pub seminorm_s: f64,
    /// K-seminorm over Q.
    pub seminorm_k: f64,
    pub ktilde: f64,
    pub holds: bool,
}

/// Compares `[u]_{s,p}` (over Ω×Ω) against `k̃₀·[u]_{K,p}` (over Q).
///
/// Rejects kernels that fail symmetry or the declared lower bound on the pairs of `ia`.
pub fn compare_spaces(u: &GridFunction, ia: &Interaction) -> Result<SpaceComparison> {
    ia.check(u)?;
    let g = &ia.grid;
    let p = &ia.exponent;
    let n = ia.kernel.dim() as f64;
    let k0 = ia.kernel.k0();
    for idx in 0..ia.len() {
        let (i, j) = ia.pairs.pair(idx);
        let kij = ia.k[idx];
        let ratio = kij * g.distance(i, j).powf(n + p.s() * ia.p[idx]);
        if !(ratio >= k0 * (1.0 - LOWER_BOUND_SLACK)) {
            return Err(Error::InvalidKernel(format!(
                "lower bound fails at pair ({i},{j}): ratio {ratio} < k0 {k0}"
            )));
        }
        let kji = ia.kernel.eval_with(g.node(j), g.node(i), ia.p[idx]);
        if (kij - kji).abs() > KERNEL_SYMMETRY_TOL * kij.abs().max(kji.abs()) {
            return Err(Error::InvalidKernel(format!(
                "kernel is not symmetric at pair ({i},{j})"
            )));
        }
    }
    let singular = singular_kernel(p, ia.kernel.dim());
    let inner = Interaction::omega_only(g.clone(), &singular, p);
    let seminorm_s = gagliardo_seminorm(u, &inner)?.seminorm;
    let seminorm_k = gagliardo_seminorm(u, ia)?.seminorm;
    let kt = ktilde(k0, p.p_minus(), p.p_plus());
    Ok(SpaceComparison {
        seminorm_s,
        seminorm_k,
        ktilde: kt,
        holds: seminorm_s <= kt * seminorm_k * (1.0 + 1e-12),
    })
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum EmbeddingRatio {
    ZeroInput,
    Ratio { lebesgue: f64, sobolev: f64, ratio: f64 },
}

impl EmbeddingRatio {
    pub fn ratio(&self) -> Option<f64> {
        match self {
            EmbeddingRatio::ZeroInput => None,
            EmbeddingRatio::Ratio { ratio, .. } => Some(*ratio),
        }
    }
}

/// ‖u‖_{L^{r(x)}(Ω)} / ‖u‖_{K,p}; requires `r < p*_s` at every Ω node.
pub fn embedding_ratio(u: &GridFunction, r: &ScalarExponent, ia: &Interaction) -> Result<EmbeddingRatio> {
    ia.check(u)?;
    let g = &ia.grid;
    let star = critical_exponent(&ia.exponent, g.dim())?;
    for &i in g.omega_nodes() {
        let x = g.node(i);
        if !(r.eval(x) < star.eval(x)) {
            return Err(Error::Precondition(format!(
                "r(x) = {} is not below p*_s(x) = {} at node {i}",
                r.eval(x),
                star.eval(x)
            )));
        }
    }
    if u.is_zero() {
        return Ok(EmbeddingRatio::ZeroInput);
    }
    let lebesgue = luxemburg_norm(u, r)?;
    let sobolev = full_norm(u, ia)?;
    Ok(EmbeddingRatio::Ratio {
        lebesgue,
        sobolev,
        ratio: lebesgue / sobolev,
    })
}
