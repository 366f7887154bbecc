//! The invariant suite run across modules for one configured interaction.

use serde::Serialize;

use crate::error::Result;
use crate::exponent::{conjugate, trace};
use crate::kernel::validate_kernel;
use crate::lebesgue::{check_modular_norm_relations, holder_pairing, luxemburg_norm, modular_lebesgue};
use crate::operator::{
    apply_weak, boundedness_probe, coercivity_probe, energy, gradient, monotonicity_probe, DualVector,
};
use crate::random::{random_bumps, random_scalar_exponent, rng};
use crate::sobolev::{
    check_modular_seminorm_relations, check_modular_triangle, compare_spaces, gagliardo_modular, gagliardo_seminorm,
    Interaction,
};
use crate::solver::{solve_dirichlet, DirichletOptions};

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct PropertyEntry {
    pub name: String,
    pub cases: usize,
    pub violations: usize,
    /// Largest observed violation measure (0 when every case holds with margin).
    pub worst: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct PropertiesReport {
    pub seed: u64,
    pub cases: usize,
    pub entries: Vec<PropertyEntry>,
    pub pass: bool,
}

struct Tally {
    name: &'static str,
    cases: usize,
    violations: usize,
    worst: f64,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            cases: 0,
            violations: 0,
            worst: 0.0,
        }
    }

    /// Records one case whose violation measure is `excess` (≤ 0 means it holds).
    fn record(&mut self, excess: f64) {
        self.cases += 1;
        if !(excess <= 0.0) {
            self.violations += 1;
            self.worst = self.worst.max(if excess.is_nan() { f64::INFINITY } else { excess });
        }
    }

    fn flag(&mut self, ok: bool) {
        self.record(if ok { 0.0 } else { 1.0 });
    }

    fn finish(self) -> PropertyEntry {
        PropertyEntry {
            name: self.name.to_string(),
            cases: self.cases,
            violations: self.violations,
            worst: self.worst,
            pass: self.cases > 0 && self.violations == 0,
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Runs every invariant with `cases` seeded random inputs each.
pub fn run_properties(ia: &Interaction, seed: u64, cases: usize) -> Result<PropertiesReport> {
    let g = ia.grid();
    let p = ia.exponent();
    let mut r = rng(seed);
    let mut entries = Vec::new();

    let kernel_report = validate_kernel(ia.kernel(), p, g)?;
    let mut t = Tally::new("kernel_admissible");
    t.flag(kernel_report.pass);
    entries.push(t.finish());

    let pbar = trace(p);
    let mut t = Tally::new("trace_within_bounds");
    for &i in g.omega_nodes() {
        let v = pbar.eval(g.node(i));
        t.record((p.p_minus() - v).max(v - p.p_plus()));
    }
    entries.push(t.finish());

    let mut lux = Tally::new("luxemburg_unit_modular");
    let mut rel_leb = Tally::new("lebesgue_modular_norm_relations");
    let mut holder = Tally::new("holder_inequality");
    let mut conj = Tally::new("conjugate_involution");
    for _ in 0..cases {
        let u = random_bumps(g, &mut r)?.scaled(r_scale(&mut r));
        let v = random_bumps(g, &mut r)?;
        let q = random_scalar_exponent(&mut r, 1.2, 4.0, g)?;
        let norm = luxemburg_norm(&u, &q)?;
        lux.record((modular_lebesgue(&u.scaled(1.0 / norm), &q) - 1.0).abs() - 1e-9);
        rel_leb.flag(check_modular_norm_relations(&u, &q)?.pass());
        let hp = holder_pairing(&u, &v, &q)?;
        holder.record(hp.lhs - hp.rhs * (1.0 + 1e-12));
        let back = conjugate(&conjugate(&q));
        for &i in g.omega_nodes() {
            let x = g.node(i);
            conj.record((back.eval(x) - q.eval(x)).abs() - 1e-12);
        }
    }
    entries.extend([lux.finish(), rel_leb.finish(), holder.finish(), conj.finish()]);

    let mut unit = Tally::new("seminorm_unit_modular");
    let mut rel_sob = Tally::new("gagliardo_modular_seminorm_relations");
    let mut homog = Tally::new("seminorm_homogeneity");
    let mut tri = Tally::new("modular_triangle");
    let mut swap = Tally::new("pair_swap_symmetry");
    let mut cmp = Tally::new("space_comparison");
    let mut norm_order = Tally::new("full_norm_dominates_seminorm");
    for _ in 0..cases {
        let u = random_bumps(g, &mut r)?.scaled(r_scale(&mut r));
        let v = random_bumps(g, &mut r)?;
        let semi = gagliardo_seminorm(&u, ia)?;
        unit.record((semi.modular_at_unit - 1.0).abs() - 1e-9);
        rel_sob.flag(check_modular_seminorm_relations(&u, ia)?.pass());
        let scaled = gagliardo_seminorm(&u.scaled(-2.5), ia)?.seminorm;
        homog.record(rel(scaled, 2.5 * semi.seminorm) - 1e-10);
        tri.flag(check_modular_triangle(&u, &v, ia)?.pass);
        let forward = gagliardo_modular(&u, ia)?;
        let vals = u.values();
        let swapped: f64 = (0..ia.len())
            .map(|idx| {
                let rev = ia.reverse_of(idx);
                let (i, j) = ia.pairs().pair(rev);
                let d = vals[i] - vals[j];
                if d == 0.0 {
                    0.0
                } else {
                    ia.mass_at(rev) * d.abs().powf(ia.p_at(rev))
                }
            })
            .sum();
        swap.record(rel(forward, swapped) - 1e-12);
        cmp.flag(compare_spaces(&u, ia)?.holds);
        let full = crate::sobolev::full_norm(&u, ia)?;
        norm_order.record(semi.seminorm - full);
    }
    entries.extend([
        unit.finish(),
        rel_sob.finish(),
        homog.finish(),
        tri.finish(),
        swap.finish(),
        cmp.finish(),
        norm_order.finish(),
    ]);

    let mut identity = Tally::new("weak_pairing_equals_modular");
    let mut mono = Tally::new("strict_monotonicity");
    let mut coer = Tally::new("coercivity");
    let mut bounded = Tally::new("operator_boundedness");
    let mut fd = Tally::new("energy_gradient_finite_difference");
    let zero_load = DualVector::zero(g.len());
    for _ in 0..cases {
        let u = random_bumps(g, &mut r)?.scaled(r_scale(&mut r));
        let v = random_bumps(g, &mut r)?;
        let m = gagliardo_modular(&u, ia)?;
        identity.record(rel(apply_weak(ia, &u, &u)?, m) - 1e-12);
        mono.flag(monotonicity_probe(ia, &u, &v)?.pass());
        coer.flag(coercivity_probe(ia, &u)?.pass());
        bounded.flag(boundedness_probe(ia, &u, &v)?.pass);
        let step = 1e-6 * (1.0 + u.max_abs());
        let plus = energy(ia, &u.combine(1.0, &v, step)?, &zero_load)?;
        let minus = energy(ia, &u.combine(1.0, &v, -step)?, &zero_load)?;
        let fd_value = (plus - minus) / (2.0 * step);
        fd.record(rel(fd_value, apply_weak(ia, &u, &v)?) - 1e-5);
    }
    entries.extend([
        identity.finish(),
        mono.finish(),
        coer.finish(),
        bounded.finish(),
        fd.finish(),
    ]);

    let load = DualVector::from_fn(g, |x| 1.0 + 0.5 * x[0]);
    let opts = DirichletOptions {
        seed,
        ..DirichletOptions::default()
    };
    let sol = solve_dirichlet(ia, &load, &opts)?;
    let mut unique = Tally::new("dirichlet_multistart_agreement");
    unique.record(sol.agreement - 10.0 * opts.tol);
    let mut stat = Tally::new("dirichlet_stationarity");
    stat.record(gradient(ia, &sol.solution, &load)?.max_norm(g) - opts.tol);
    let mut descent = Tally::new("dirichlet_energy_descent");
    for s in &sol.starts {
        descent.flag(s.energy_increases == 0);
    }
    entries.extend([unique.finish(), stat.finish(), descent.finish()]);

    let pass = entries.iter().all(|e| e.pass);
    Ok(PropertiesReport {
        seed,
        cases,
        entries,
        pass,
    })
}

/// Amplitude factor in [1e-2, 1e2].
fn r_scale<R: rand::Rng>(r: &mut R) -> f64 {
    10f64.powf(r.random_range(-2.0..2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{GridDomain, OmegaShape};
    use crate::exponent::{ExponentField, PairLaw};
    use crate::kernel::singular_kernel;
    use std::sync::Arc;

    #[test]
    fn suite_passes_on_default_setup() {
        let g = Arc::new(GridDomain::around(OmegaShape::Interval { lo: -1.0, hi: 1.0 }, 0.125, 1.0).unwrap());
        let p = ExponentField::new(PairLaw::sin_sum(2.0, 0.5), 0.3, &g).unwrap();
        let ia = Interaction::new(g, &singular_kernel(&p, 1), &p);
        let report = run_properties(&ia, 42, 5).unwrap();
        for e in &report.entries {
            assert!(e.pass, "{e:?}");
        }
    }
}
