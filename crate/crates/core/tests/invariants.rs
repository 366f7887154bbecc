//! Property-based checks of the structural invariants.

mod common;

use std::sync::{Arc, OnceLock};

use proptest::prelude::*;

use common::*;
use nlsob::exponent::{conjugate, critical_exponent, trace};
use nlsob::kernel::{multiplied_kernel, singular_kernel};
use nlsob::lebesgue::{luxemburg_norm, modular_lebesgue};
use nlsob::operator::{apply_weak, energy, monotonicity_probe};
use nlsob::random::{random_bumps, random_pair_law, random_scalar_exponent, rng};
use nlsob::sobolev::{check_modular_triangle, gagliardo_modular, gagliardo_seminorm};
use nlsob::{DualVector, ExponentField, GridDomain, GridFunction, Interaction, PairLaw};

struct Fixture {
    grid: Arc<GridDomain>,
    ia: Interaction,
    multiplied: Interaction,
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let grid = interval_grid(64);
        let p = ExponentField::new(PairLaw::sin_sum(1.8, 0.9), 0.3, &grid).unwrap();
        let ia = Interaction::new(grid.clone(), &singular_kernel(&p, 1), &p);
        let k1 = multiplied_kernel(&p, 1, "2 + cos(z)", &grid).unwrap();
        let multiplied = Interaction::new(grid.clone(), &k1, &p);
        Fixture { grid, ia, multiplied }
    })
}

fn function(seed: u64, log_scale: f64) -> GridFunction {
    let f = fixture();
    random_bumps(&f.grid, &mut rng(seed))
        .unwrap()
        .scaled(10f64.powf(log_scale))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parallel_and_sequential_sums_agree(seed in any::<u64>(), log_scale in -2.0..2.0f64) {
        let f = fixture();
        let u = function(seed, log_scale);
        nlsob::par::set_parallel(false);
        let seq = gagliardo_modular(&u, &f.ia).unwrap();
        nlsob::par::set_parallel(true);
        let par = gagliardo_modular(&u, &f.ia).unwrap();
        prop_assert_eq!(seq.to_bits(), par.to_bits());
    }

    #[test]
    fn swapped_pairs_carry_identical_terms(seed in any::<u64>(), log_scale in -2.0..2.0f64) {
        let f = fixture();
        let u = function(seed, log_scale);
        let vals = u.values();
        let term = |idx: usize| {
            let (i, j) = f.ia.pairs().pair(idx);
            f.ia.mass_at(idx) * (vals[i] - vals[j]).abs().powf(f.ia.p_at(idx))
        };
        for idx in 0..f.ia.len() {
            prop_assert_eq!(term(idx).to_bits(), term(f.ia.reverse_of(idx)).to_bits());
        }
        let reversed = neumaier((0..f.ia.len()).rev().map(term));
        prop_assert!(rel(reversed, gagliardo_modular(&u, &f.ia).unwrap()) < 1e-13);
    }

    #[test]
    fn modular_is_monotone_in_the_kernel(seed in any::<u64>(), log_scale in -2.0..2.0f64) {
        let f = fixture();
        let u = function(seed, log_scale);
        prop_assert!(gagliardo_modular(&u, &f.multiplied).unwrap() >= gagliardo_modular(&u, &f.ia).unwrap());
    }

    #[test]
    fn seminorm_is_a_norm(a in any::<u64>(), b in any::<u64>(), scale in -5.0..5.0f64) {
        let f = fixture();
        let (u, v) = (function(a, 0.0), function(b, 0.5));
        let su = gagliardo_seminorm(&u, &f.ia).unwrap();
        prop_assert!((su.modular_at_unit - 1.0).abs() <= 1e-9);
        let scaled = gagliardo_seminorm(&u.scaled(scale), &f.ia).unwrap().seminorm;
        prop_assert!((scaled - scale.abs() * su.seminorm).abs() <= 1e-10 * su.seminorm.max(1.0) * scale.abs().max(1.0));
        let sv = gagliardo_seminorm(&v, &f.ia).unwrap().seminorm;
        let sum = gagliardo_seminorm(&u.add(&v).unwrap(), &f.ia).unwrap().seminorm;
        prop_assert!(sum <= (su.seminorm + sv) * (1.0 + 1e-12));
        prop_assert!(check_modular_triangle(&u, &v, &f.ia).unwrap().pass);
    }

    #[test]
    fn weak_form_is_linear_in_the_test_function(
        a in any::<u64>(), b in any::<u64>(), c in any::<u64>(), x in -3.0..3.0f64, y in -3.0..3.0f64,
    ) {
        let f = fixture();
        let (u, p1, p2) = (function(a, 0.0), function(b, 0.0), function(c, 0.0));
        let combo = p1.combine(x, &p2, y).unwrap();
        let lhs = apply_weak(&f.ia, &u, &combo).unwrap();
        let (l1, l2) = (apply_weak(&f.ia, &u, &p1).unwrap(), apply_weak(&f.ia, &u, &p2).unwrap());
        let scale = (x * l1).abs() + (y * l2).abs() + 1e-300;
        prop_assert!((lhs - (x * l1 + y * l2)).abs() <= 1e-12 * scale);
        prop_assert!(rel(apply_weak(&f.ia, &u, &u).unwrap(), gagliardo_modular(&u, &f.ia).unwrap()) <= 1e-12);
    }

    #[test]
    fn operator_is_strictly_monotone(a in any::<u64>(), b in any::<u64>(), la in -1.0..1.0f64, lb in -1.0..1.0f64) {
        let f = fixture();
        let (u, v) = (function(a, la), function(b, lb));
        prop_assume!(u.max_distance(&v).unwrap() > 0.0);
        prop_assert!(monotonicity_probe(&f.ia, &u, &v).unwrap().value > 0.0);
    }

    #[test]
    fn dirichlet_energy_is_convex(a in any::<u64>(), b in any::<u64>()) {
        let f = fixture();
        let (u, v) = (function(a, 0.0), function(b, 0.0));
        let load = DualVector::from_fn(&f.grid, |x| x[0].cos());
        let mid = u.combine(0.5, &v, 0.5).unwrap();
        let e = |w: &GridFunction| energy(&f.ia, w, &load).unwrap();
        prop_assert!(e(&mid) <= 0.5 * (e(&u) + e(&v)) + 1e-12 * (e(&u).abs() + e(&v).abs()));
    }

    #[test]
    fn luxemburg_norm_invariants(a in any::<u64>(), b in any::<u64>(), e in any::<u64>(), log_scale in -2.0..2.0f64) {
        let f = fixture();
        let q = random_scalar_exponent(&mut rng(e), 1.2, 4.0, &f.grid).unwrap();
        let (u, v) = (function(a, log_scale), function(b, 0.0));
        let nu = luxemburg_norm(&u, &q).unwrap();
        prop_assert!((modular_lebesgue(&u.scaled(1.0 / nu), &q) - 1.0).abs() <= 1e-10);
        let nv = luxemburg_norm(&v, &q).unwrap();
        prop_assert!(luxemburg_norm(&u.add(&v).unwrap(), &q).unwrap() <= (nu + nv) * (1.0 + 1e-12));
        let back = conjugate(&conjugate(&q));
        for &i in f.grid.omega_nodes() {
            let x = f.grid.node(i);
            prop_assert!((back.eval(x) - q.eval(x)).abs() <= 1e-12);
        }
    }

    #[test]
    fn critical_exponent_grows_with_the_trace(seed in any::<u64>(), lift in 0.0..0.3f64) {
        let f = fixture();
        let mut r = rng(seed);
        let law = random_pair_law(&mut r, 1.3, 2.5);
        let base = ExponentField::new(law.clone(), 0.3, &f.grid).unwrap();
        let raised = match law {
            PairLaw::SinSum { base, amp, freq, phase } => PairLaw::SinSum { base: base + lift, amp, freq, phase },
            other => other,
        };
        let raised = ExponentField::new(raised, 0.3, &f.grid).unwrap();
        let (lo, hi) = (critical_exponent(&base, 1).unwrap(), critical_exponent(&raised, 1).unwrap());
        let pbar = trace(&base);
        for &i in f.grid.omega_nodes() {
            let x = f.grid.node(i);
            prop_assert!(hi.eval(x) >= lo.eval(x));
            prop_assert!(lo.eval(x) > pbar.eval(x));
        }
    }
}
