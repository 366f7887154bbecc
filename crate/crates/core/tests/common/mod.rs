//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::io::Write;
use std::sync::Arc;

use nlsob::{GridDomain, GridFunction, OmegaShape};

/// Compensated (Neumaier) summation.
pub fn neumaier<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Ω = (−1, 1) inside the box [−2, 2] with `n` box nodes.
pub fn interval_grid(n: usize) -> Arc<GridDomain> {
    Arc::new(GridDomain::around(OmegaShape::Interval { lo: -1.0, hi: 1.0 }, 4.0 / n as f64, 1.0).unwrap())
}

pub fn singular(x: &[f64], y: &[f64], p: f64, s: f64) -> f64 {
    let n = x.len() as f64;
    let d = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    d.powf(-(n + s * p))
}

pub type KernelFn<'a> = &'a dyn Fn(&[f64], &[f64], f64) -> f64;

/// Σ over ordered pairs i ≠ j (not both exterior, or both in Ω when `omega_only`)
/// of w_i w_j |u_i − u_j|^{p} K / λ^{p}.
pub fn pair_modular(
    g: &GridDomain,
    values: &[f64],
    lambda: f64,
    omega_only: bool,
    p: &dyn Fn(&[f64], &[f64]) -> f64,
    k: KernelFn<'_>,
) -> f64 {
    let n = g.len();
    let mut terms = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let keep = if omega_only {
                g.in_omega(i) && g.in_omega(j)
            } else {
                g.in_omega(i) || g.in_omega(j)
            };
            if !keep {
                continue;
            }
            let (x, y) = (g.node(i), g.node(j));
            let pij = p(x, y);
            let d = (values[i] - values[j]).abs() / lambda;
            terms.push(g.weight(i) * g.weight(j) * d.powf(pij) * k(x, y, pij));
        }
    }
    neumaier(terms)
}

/// Σ_Ω w |u/λ|^{q}.
pub fn lebesgue_modular(g: &GridDomain, values: &[f64], lambda: f64, q: &dyn Fn(&[f64]) -> f64) -> f64 {
    neumaier(
        g.omega_nodes()
            .iter()
            .map(|&i| g.weight(i) * (values[i].abs() / lambda).powf(q(g.node(i)))),
    )
}

/// λ with modular(λ) = 1 for a modular decreasing in λ, by bisection in log space.
pub fn luxemburg(modular: impl Fn(f64) -> f64) -> f64 {
    let (mut lo, mut hi) = (1.0f64, 1.0f64);
    while modular(hi) > 1.0 {
        hi *= 2.0;
    }
    while modular(lo) <= 1.0 && lo > 1e-300 {
        lo *= 0.5;
    }
    for _ in 0..400 {
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        if modular(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

pub fn bump_function(g: &Arc<GridDomain>, seed: u64) -> GridFunction {
    let mut r = nlsob::random::rng(seed);
    nlsob::random::random_bumps(g, &mut r).unwrap()
}

/// Writes a criterion line to stderr, bypassing the test harness's output capture.
pub fn report_line(label: &str, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "[acceptance] {status} {label}: {detail}");
}
