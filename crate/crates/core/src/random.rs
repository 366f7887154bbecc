//! Seeded random test data: smooth bump sums supported in Ω and random exponent laws.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::GridDomain;
use crate::error::Result;
use crate::exponent::{PairLaw, ScalarExponent};
use crate::lebesgue::GridFunction;

pub const MAX_BUMPS: usize = 5;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// exp(1 − 1/(1 − ρ²)) for ρ < 1, else 0; peak value 1 at ρ = 0.
pub fn bump(rho: f64) -> f64 {
    if rho >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - rho * rho)).exp()
    }
}

/// Sum of 1 to 5 smooth bumps with amplitudes in [−1, 1], each supported inside Ω.
pub fn random_bumps<R: Rng>(grid: &Arc<GridDomain>, rng: &mut R) -> Result<GridFunction> {
    let shape = *grid.shape();
    let nodes = grid.omega_nodes();
    let count = rng.random_range(1..=MAX_BUMPS);
    let mut bumps = Vec::with_capacity(count);
    for _ in 0..count {
        let centre = grid.node(nodes[rng.random_range(0..nodes.len())]).to_vec();
        let depth = shape.depth(&centre);
        let radius = depth * rng.random_range(0.3..1.0);
        let amp = rng.random_range(-1.0..1.0);
        bumps.push((centre, radius, amp));
    }
    let mut u = GridFunction::x0_from_fn(grid.clone(), |x| {
        bumps
            .iter()
            .map(|(c, r, a)| {
                let d2: f64 = x.iter().zip(c).map(|(xi, ci)| (xi - ci) * (xi - ci)).sum();
                a * bump(d2.sqrt() / r)
            })
            .sum()
    })?;
    if u.is_zero() {
        // No bump reached a node: use one centred bump instead.
        let c = grid.node(nodes[nodes.len() / 2]).to_vec();
        let r = shape.depth(&c);
        u = GridFunction::x0_from_fn(grid.clone(), |x| {
            let d2: f64 = x.iter().zip(&c).map(|(xi, ci)| (xi - ci) * (xi - ci)).sum();
            bump(d2.sqrt() / r)
        })?;
    }
    Ok(u)
}

/// Symmetric pair law `base + amp·|sin(freq(Σx + Σy) + phase)|` with `base ∈ [lo, hi − amp]`.
pub fn random_pair_law<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> PairLaw {
    let amp = rng.random_range(0.0..(hi - lo));
    let base = rng.random_range(lo..=(hi - amp));
    PairLaw::SinSum {
        base,
        amp,
        freq: rng.random_range(0.5..3.0),
        phase: rng.random_range(0.0..std::f64::consts::PI),
    }
}

/// Point exponent `base + amp·|sin(freq·Σx + phase)|` with values in `[lo, hi]`.
pub fn random_scalar_exponent<R: Rng>(rng: &mut R, lo: f64, hi: f64, grid: &GridDomain) -> Result<ScalarExponent> {
    let amp = rng.random_range(0.0..(hi - lo));
    let base = rng.random_range(lo..=(hi - amp));
    let freq = rng.random_range(0.5..3.0);
    let phase = rng.random_range(0.0..std::f64::consts::PI);
    ScalarExponent::sampled(
        format!("{base} + {amp}*abs(sin({freq}*x + {phase}))"),
        move |x: &[f64]| base + amp * (freq * x.iter().sum::<f64>() + phase).sin().abs(),
        grid,
    )
}
