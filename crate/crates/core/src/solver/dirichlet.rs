use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{ARMIJO, ITERATION_CAP, MAX_HALVINGS, SHRINK};
use crate::error::{Error, Result};
use crate::lebesgue::GridFunction;
use crate::operator::{hessian_sigma, sigma_values, weak_row_values, DualVector};
use crate::random::{random_bumps, rng};
use crate::sobolev::Interaction;

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct DirichletOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub starts: usize,
    pub seed: u64,
}

impl Default for DirichletOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: ITERATION_CAP,
            starts: 3,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct StartSummary {
    pub residual: f64,
    pub iterations: usize,
    pub energy: f64,
    /// Accepted steps that raised the energy beyond rounding.
    pub energy_increases: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    #[serde(skip)]
    pub solution: GridFunction,
    pub residual: f64,
    pub iterations: usize,
    pub energy: f64,
    /// Max pairwise max-norm distance between the solutions from distinct starts.
    pub agreement: f64,
    pub starts: Vec<StartSummary>,
}

struct Dirichlet<'a> {
    ia: &'a Interaction,
    f: &'a DualVector,
    nodes: &'a [usize],
}

impl Dirichlet<'_> {
    fn embed(&self, x: &DVector<f64>) -> Vec<f64> {
        let mut v = vec![0.0; self.ia.grid().len()];
        for (k, &i) in self.nodes.iter().enumerate() {
            v[i] = x[k];
        }
        v
    }

    fn energy(&self, full: &[f64]) -> f64 {
        let g = self.ia.grid();
        let load: f64 = self
            .nodes
            .iter()
            .map(|&i| g.weight(i) * self.f.coeffs()[i] * full[i])
            .sum();
        sigma_values(self.ia, full) - load
    }

    /// Gradient with respect to the Ω values.
    fn gradient(&self, full: &[f64]) -> DVector<f64> {
        let g = self.ia.grid();
        let row = weak_row_values(self.ia, full);
        DVector::from_iterator(
            self.nodes.len(),
            self.nodes.iter().map(|&i| row[i] - g.weight(i) * self.f.coeffs()[i]),
        )
    }

    fn residual(&self, grad: &DVector<f64>) -> f64 {
        let g = self.ia.grid();
        self.nodes
            .iter()
            .enumerate()
            .fold(0.0, |m, (k, &i)| m.max((grad[k] / g.weight(i)).abs()))
    }
}

fn regularised_newton(h: &DMatrix<f64>, grad: &DVector<f64>) -> Option<DVector<f64>> {
    let scale = h.diagonal().amax().max(f64::MIN_POSITIVE);
    let mut shift = 0.0;
    for _ in 0..20 {
        let mut m = h.clone();
        for k in 0..m.nrows() {
            m[(k, k)] += shift;
        }
        if let Some(chol) = m.cholesky() {
            let d = -chol.solve(grad);
            if d.iter().all(|v| v.is_finite()) {
                return Some(d);
            }
        }
        shift = if shift == 0.0 { 1e-12 * scale } else { shift * 10.0 };
    }
    None
}

fn run_start(
    problem: &Dirichlet,
    start: DVector<f64>,
    opts: &DirichletOptions,
) -> Result<(DVector<f64>, StartSummary)> {
    let g = problem.ia.grid();
    let mut x = start;
    let mut full = problem.embed(&x);
    let mut e = problem.energy(&full);
    let mut grad = problem.gradient(&full);
    let mut residual = problem.residual(&grad);
    let mut energy_increases = 0;
    let mut iterations = 0;
    let weights = DVector::from_iterator(problem.nodes.len(), problem.nodes.iter().map(|&i| g.weight(i)));
    while residual > opts.tol {
        if iterations >= opts.max_iter {
            return Err(Error::IterationCap {
                cap: opts.max_iter,
                residual,
            });
        }
        iterations += 1;
        let h = hessian_sigma(problem.ia, &full, 1e-12);
        let newton = regularised_newton(&h, &grad);
        let steepest = -grad.component_div(&weights);
        let mut accepted = None;
        for dir in newton.iter().chain(std::iter::once(&steepest)) {
            let slope = grad.dot(dir);
            if !(slope < 0.0) {
                continue;
            }
            let mut step = 1.0;
            for _ in 0..=MAX_HALVINGS {
                let trial = &x + dir * step;
                let trial_full = problem.embed(&trial);
                let trial_e = problem.energy(&trial_full);
                if trial_e <= e + ARMIJO * step * slope {
                    accepted = Some((trial, trial_full, trial_e));
                    break;
                }
                // Energy decrease below rounding: accept on a smaller gradient instead.
                if (e - trial_e).abs() <= 1e-13 * (1.0 + e.abs()) {
                    let trial_grad = problem.gradient(&trial_full);
                    if problem.residual(&trial_grad) < residual {
                        accepted = Some((trial, trial_full, trial_e));
                        break;
                    }
                }
                step *= SHRINK;
            }
            if accepted.is_some() {
                break;
            }
        }
        let Some((nx, nfull, ne)) = accepted else {
            return Err(Error::LineSearchFailed {
                halvings: MAX_HALVINGS,
                residual,
            });
        };
        if ne > e + 1e-13 * (1.0 + e.abs()) {
            energy_increases += 1;
        }
        x = nx;
        full = nfull;
        e = ne;
        grad = problem.gradient(&full);
        residual = problem.residual(&grad);
    }
    Ok((
        x,
        StartSummary {
            residual,
            iterations,
            energy: e,
            energy_increases,
        },
    ))
}

/// Minimises I(u) = σ(u) − ⟨f, u⟩ over X₀ from `opts.starts` seeded starts.
pub fn solve_dirichlet(ia: &Interaction, f: &DualVector, opts: &DirichletOptions) -> Result<SolveReport> {
    let g = ia.grid();
    if f.len() != g.len() {
        return Err(Error::LengthMismatch {
            expected: g.len(),
            got: f.len(),
        });
    }
    if let Some(i) = f.coeffs().iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    if opts.starts == 0 {
        return Err(Error::Precondition("at least one start is required".into()));
    }
    let nodes = g.omega_nodes();
    if g.omega_nodes().iter().all(|&i| f.coeffs()[i] == 0.0) {
        let zero = GridFunction::zero(g.clone());
        let summary = StartSummary {
            residual: 0.0,
            iterations: 0,
            energy: 0.0,
            energy_increases: 0,
        };
        return Ok(SolveReport {
            solution: zero,
            residual: 0.0,
            iterations: 0,
            energy: 0.0,
            agreement: 0.0,
            starts: vec![summary; opts.starts],
        });
    }
    let problem = Dirichlet { ia, f, nodes };
    let mut r = rng(opts.seed);
    let mut solutions = Vec::with_capacity(opts.starts);
    let mut starts = Vec::with_capacity(opts.starts);
    for _ in 0..opts.starts {
        let init = random_bumps(g, &mut r)?;
        let x0 = DVector::from_iterator(nodes.len(), nodes.iter().map(|&i| init.values()[i]));
        let (x, summary) = run_start(&problem, x0, opts)?;
        solutions.push(x);
        starts.push(summary);
    }
    let mut agreement: f64 = 0.0;
    for a in 0..solutions.len() {
        for b in a + 1..solutions.len() {
            agreement = agreement.max((&solutions[a] - &solutions[b]).amax());
        }
    }
    let best = (0..starts.len())
        .min_by(|&a, &b| starts[a].residual.total_cmp(&starts[b].residual))
        .expect("at least one start");
    let solution = GridFunction::x0(g.clone(), problem.embed(&solutions[best]))?;
    Ok(SolveReport {
        solution,
        residual: starts[best].residual,
        iterations: starts.iter().map(|s| s.iterations).sum(),
        energy: starts[best].energy,
        agreement,
        starts,
    })
}
