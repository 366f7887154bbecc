//! Matrix-free weak form of the nonlocal p(x,·)-operator, its energy and
//! nodal gradient, and numerical probes of the operator's structural properties.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lebesgue::{weighted_luxemburg, GridFunction};
use crate::par;
use crate::sobolev::{gagliardo_modular, gagliardo_seminorm, Interaction};

/// |t|^{p−2} t, with value 0 at t = 0.
#[inline]
pub fn flux(t: f64, p: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t.abs().powf(p - 2.0) * t
    }
}

/// Per-node coefficients of a functional on X₀, paired as Σ_Ω w f v.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualVector {
    coeffs: Vec<f64>,
}

impl DualVector {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn zero(len: usize) -> Self {
        Self { coeffs: vec![0.0; len] }
    }

    pub fn from_fn(grid: &crate::domain::GridDomain, f: impl Fn(&[f64]) -> f64) -> Self {
        Self {
            coeffs: (0..grid.len()).map(|i| f(grid.node(i))).collect(),
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// ⟨f, v⟩ = Σ_Ω w f v.
    pub fn pair(&self, v: &GridFunction) -> Result<f64> {
        let g = v.grid();
        if self.coeffs.len() != g.len() {
            return Err(Error::LengthMismatch {
                expected: g.len(),
                got: self.coeffs.len(),
            });
        }
        let nodes = g.omega_nodes();
        let vals = v.values();
        Ok(par::sum_indexed(nodes.len(), |k| {
            let i = nodes[k];
            g.weight(i) * self.coeffs[i] * vals[i]
        }))
    }

    /// Max-norm over Ω nodes.
    pub fn max_norm(&self, grid: &crate::domain::GridDomain) -> f64 {
        grid.omega_nodes().iter().fold(0.0, |m, &i| m.max(self.coeffs[i].abs()))
    }
}

/// ⟨Lu, φ⟩ = Σ w_i w_j |u_i−u_j|^{p−2}(u_i−u_j)(φ_i−φ_j) K_ij.
pub fn apply_weak(ia: &Interaction, u: &GridFunction, phi: &GridFunction) -> Result<f64> {
    ia.check(u)?;
    ia.check(phi)?;
    let (uv, pv) = (u.values(), phi.values());
    Ok(par::sum_indexed(ia.len(), |idx| {
        let (i, j) = ia.pairs().pair(idx);
        let dphi = pv[i] - pv[j];
        if dphi == 0.0 {
            0.0
        } else {
            ia.mass_at(idx) * flux(uv[i] - uv[j], ia.p_at(idx)) * dphi
        }
    }))
}

fn pair_flux(ia: &Interaction, values: &[f64], idx: usize) -> f64 {
    let (i, j) = ia.pairs().pair(idx);
    ia.mass_at(idx) * flux(values[i] - values[j], ia.p_at(idx))
}

/// ⟨Lu, e_k⟩ for every node; zero at exterior nodes.
///
/// Row k collects the pairs (k, j) with weight +1 and their swaps (j, k) with weight −1,
/// so each node's sum has a fixed order regardless of threading.
pub fn weak_row(ia: &Interaction, u: &GridFunction) -> Result<Vec<f64>> {
    ia.check(u)?;
    Ok(weak_row_values(ia, u.values()))
}

pub(crate) fn weak_row_values(ia: &Interaction, values: &[f64]) -> Vec<f64> {
    let g = ia.grid();
    par::map_indexed(g.len(), |k| {
        if !g.in_omega(k) {
            return 0.0;
        }
        ia.pairs()
            .row(k)
            .map(|idx| pair_flux(ia, values, idx) - pair_flux(ia, values, ia.reverse_of(idx)))
            .sum()
    })
}

/// σ(u) = Σ w_i w_j |u_i−u_j|^{p}/p · K_ij.
pub fn sigma(ia: &Interaction, u: &GridFunction) -> Result<f64> {
    ia.check(u)?;
    Ok(sigma_values(ia, u.values()))
}

pub(crate) fn sigma_values(ia: &Interaction, values: &[f64]) -> f64 {
    par::sum_indexed(ia.len(), |idx| {
        let (i, j) = ia.pairs().pair(idx);
        let d = values[i] - values[j];
        if d == 0.0 {
            0.0
        } else {
            let p = ia.p_at(idx);
            ia.mass_at(idx) * d.abs().powf(p) / p
        }
    })
}

/// Dirichlet energy I(u) = σ(u) − ⟨f, u⟩.
pub fn energy(ia: &Interaction, u: &GridFunction, f: &DualVector) -> Result<f64> {
    Ok(sigma(ia, u)? - f.pair(u)?)
}

/// Nodal gradient of I: coefficient_k · w_k = ⟨Lu, e_k⟩ − ⟨f, e_k⟩ on Ω, zero outside.
pub fn gradient(ia: &Interaction, u: &GridFunction, f: &DualVector) -> Result<DualVector> {
    let row = weak_row(ia, u)?;
    let g = ia.grid();
    if f.len() != g.len() {
        return Err(Error::LengthMismatch {
            expected: g.len(),
            got: f.len(),
        });
    }
    Ok(DualVector::new(
        (0..g.len())
            .map(|k| {
                if g.in_omega(k) {
                    row[k] / g.weight(k) - f.coeffs()[k]
                } else {
                    0.0
                }
            })
            .collect(),
    ))
}

/// Hessian of σ with respect to the Ω-node values, in `omega_nodes` order.
///
/// `|d|^{p−2}` is evaluated at `max(|d|, min_diff)` so that p < 2 stays finite.
pub fn hessian_sigma(ia: &Interaction, values: &[f64], min_diff: f64) -> DMatrix<f64> {
    let g = ia.grid();
    let mut slot = vec![usize::MAX; g.len()];
    for (k, &i) in g.omega_nodes().iter().enumerate() {
        slot[i] = k;
    }
    let n = g.omega_nodes().len();
    let mut h = DMatrix::zeros(n, n);
    for idx in 0..ia.len() {
        let (i, j) = ia.pairs().pair(idx);
        let p = ia.p_at(idx);
        let d = (values[i] - values[j]).abs().max(min_diff);
        let c = ia.mass_at(idx) * (p - 1.0) * d.powf(p - 2.0);
        let (si, sj) = (slot[i], slot[j]);
        if si != usize::MAX {
            h[(si, si)] += c;
        }
        if sj != usize::MAX {
            h[(sj, sj)] += c;
        }
        if si != usize::MAX && sj != usize::MAX {
            h[(si, sj)] -= c;
            h[(sj, si)] -= c;
        }
    }
    h
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct MonotonicityProbe {
    /// ⟨Lu − Lv, u − v⟩.
    pub value: f64,
    /// Set when u = v, in which case `value` is exactly 0.
    pub equal_inputs: bool,
}

impl MonotonicityProbe {
    pub fn pass(&self) -> bool {
        !self.equal_inputs && self.value > 0.0
    }
}

pub fn monotonicity_probe(ia: &Interaction, u: &GridFunction, v: &GridFunction) -> Result<MonotonicityProbe> {
    let diff = u.sub(v)?;
    if diff.is_zero() {
        ia.check(u)?;
        return Ok(MonotonicityProbe {
            value: 0.0,
            equal_inputs: true,
        });
    }
    let value = apply_weak(ia, u, &diff)? - apply_weak(ia, v, &diff)?;
    Ok(MonotonicityProbe {
        value,
        equal_inputs: false,
    })
}

pub const COERCIVITY_SCALINGS: [f64; 4] = [1.0, 2.0, 4.0, 8.0];

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CoercivityReport {
    pub seminorm: f64,
    /// ⟨Lu, u⟩.
    pub pairing: f64,
    /// [u]^{p⁻} when [u] > 1, [u]^{p⁺} when [u] < 1, and 1 at [u] = 1.
    pub lower_bound: f64,
    pub bound_holds: bool,
    pub scalings: Vec<f64>,
    /// ⟨L(tu), tu⟩ / [tu] for each scaling t.
    pub ratios: Vec<f64>,
    pub ratios_increasing: bool,
}

impl CoercivityReport {
    pub fn pass(&self) -> bool {
        self.bound_holds && self.ratios_increasing
    }
}

pub fn coercivity_probe(ia: &Interaction, u: &GridFunction) -> Result<CoercivityReport> {
    let semi = gagliardo_seminorm(u, ia)?.seminorm;
    if semi == 0.0 {
        return Err(Error::Precondition("coercivity probe needs a nonzero u".into()));
    }
    let pairing = apply_weak(ia, u, u)?;
    let p = ia.exponent();
    let lower_bound = if semi > 1.0 {
        semi.powf(p.p_minus())
    } else {
        semi.powf(p.p_plus())
    };
    let bound_holds = pairing >= lower_bound * (1.0 - 1e-9);
    let mut ratios = Vec::with_capacity(COERCIVITY_SCALINGS.len());
    for &t in &COERCIVITY_SCALINGS {
        let tu = u.scaled(t);
        ratios.push(gagliardo_modular(&tu, ia)? / gagliardo_seminorm(&tu, ia)?.seminorm);
    }
    let ratios_increasing = ratios.windows(2).all(|w| w[1] > w[0]);
    Ok(CoercivityReport {
        seminorm: semi,
        pairing,
        lower_bound,
        bound_holds,
        scalings: COERCIVITY_SCALINGS.to_vec(),
        ratios,
        ratios_increasing,
    })
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct BoundednessReport {
    /// |⟨Lu, φ⟩|.
    pub lhs: f64,
    /// ‖|u(x)−u(y)|^{p−1} K^{1/p̂}‖ in L^{p̂} over pairs.
    pub psi_norm: f64,
    /// ‖|φ(x)−φ(y)| K^{1/p}‖ in L^{p} over pairs.
    pub phi_norm: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// Checks |⟨Lu, φ⟩| ≤ 2‖Ψ‖_{p̂}‖Φ‖_{p} with pair measure w_i w_j.
pub fn boundedness_probe(ia: &Interaction, u: &GridFunction, phi: &GridFunction) -> Result<BoundednessReport> {
    let lhs = apply_weak(ia, u, phi)?.abs();
    let (uv, pv) = (u.values(), phi.values());
    let n = ia.len();
    let p: Vec<f64> = (0..n).map(|idx| ia.p_at(idx)).collect();
    let p_hat: Vec<f64> = p.iter().map(|&q| q / (q - 1.0)).collect();
    let weights = ia.pairs().weights();
    let psi = par::map_indexed(n, |idx| {
        let (i, j) = ia.pairs().pair(idx);
        (uv[i] - uv[j]).abs().powf(p[idx] - 1.0) * ia.k_at(idx).powf(1.0 / p_hat[idx])
    });
    let phi_vals = par::map_indexed(n, |idx| {
        let (i, j) = ia.pairs().pair(idx);
        (pv[i] - pv[j]).abs() * ia.k_at(idx).powf(1.0 / p[idx])
    });
    let psi_norm = weighted_luxemburg(&psi, weights, &p_hat)?;
    let phi_norm = weighted_luxemburg(&phi_vals, weights, &p)?;
    let rhs = 2.0 * psi_norm * phi_norm;
    Ok(BoundednessReport {
        lhs,
        psi_norm,
        phi_norm,
        rhs,
        pass: lhs <= rhs * (1.0 + 1e-9),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{GridDomain, OmegaShape};
    use crate::exponent::{ExponentField, PairLaw};
    use crate::kernel::singular_kernel;
    use std::sync::Arc;

    fn setup(law: PairLaw) -> (Arc<GridDomain>, Interaction) {
        let g = Arc::new(GridDomain::around(OmegaShape::Interval { lo: -1.0, hi: 1.0 }, 0.125, 1.0).unwrap());
        let p = ExponentField::new(law, 0.3, &g).unwrap();
        let ia = Interaction::new(g.clone(), &singular_kernel(&p, 1), &p);
        (g, ia)
    }

    fn hump(g: &Arc<GridDomain>, shift: f64) -> GridFunction {
        GridFunction::x0_from_fn(g.clone(), |x| (1.0 - x[0] * x[0]).powi(2) * (1.0 + shift * x[0])).unwrap()
    }

    #[test]
    fn flux_at_zero() {
        assert_eq!(flux(0.0, 1.5), 0.0);
        assert_eq!(flux(-2.0, 3.0), -4.0);
    }

    #[test]
    fn pairing_with_self_is_modular() {
        let (g, ia) = setup(PairLaw::sin_sum(2.0, 0.5));
        let u = hump(&g, 0.3);
        let a = apply_weak(&ia, &u, &u).unwrap();
        let m = gagliardo_modular(&u, &ia).unwrap();
        assert!((a - m).abs() <= 1e-12 * m);
    }

    #[test]
    fn row_matches_basis_pairing() {
        let (g, ia) = setup(PairLaw::sin_sum(2.0, 0.5));
        let u = hump(&g, 0.3);
        let row = weak_row(&ia, &u).unwrap();
        for &k in g.omega_nodes() {
            let mut e = vec![0.0; g.len()];
            e[k] = 1.0;
            let e = GridFunction::x0(g.clone(), e).unwrap();
            let direct = apply_weak(&ia, &u, &e).unwrap();
            assert!((row[k] - direct).abs() <= 1e-12 * (1.0 + direct.abs()));
        }
    }

    #[test]
    fn zero_state_has_zero_gradient() {
        let (g, ia) = setup(PairLaw::Constant(2.0));
        let z = GridFunction::zero(g.clone());
        let f = DualVector::zero(g.len());
        assert_eq!(energy(&ia, &z, &f).unwrap(), 0.0);
        assert_eq!(gradient(&ia, &z, &f).unwrap().max_norm(&g), 0.0);
    }

    #[test]
    fn hessian_is_symmetric_and_matches_linear_row() {
        let (g, ia) = setup(PairLaw::Constant(2.0));
        let u = hump(&g, 0.3);
        let h = hessian_sigma(&ia, u.values(), 0.0);
        assert!((&h - h.transpose()).amax() == 0.0);
        let row = weak_row(&ia, &u).unwrap();
        let om: Vec<f64> = u.omega_values();
        let hv = &h * nalgebra::DVector::from_vec(om);
        for (k, &i) in g.omega_nodes().iter().enumerate() {
            assert!((hv[k] - row[i]).abs() < 1e-12 * (1.0 + row[i].abs()));
        }
    }

    #[test]
    fn monotone_and_coercive() {
        let (g, ia) = setup(PairLaw::sin_sum(2.0, 1.0));
        let (u, v) = (hump(&g, 0.3), hump(&g, -0.5));
        assert!(monotonicity_probe(&ia, &u, &v).unwrap().pass());
        let same = monotonicity_probe(&ia, &u, &u).unwrap();
        assert!(same.equal_inputs && same.value == 0.0);
        assert!(coercivity_probe(&ia, &u).unwrap().pass());
        assert!(boundedness_probe(&ia, &u, &v).unwrap().pass);
    }
}
