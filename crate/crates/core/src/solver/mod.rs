//! Variational solvers: the convex Dirichlet problem and the Kirchhoff-type
//! problem through its mountain-pass geometry.

mod dirichlet;
mod kirchhoff;

pub use dirichlet::{solve_dirichlet, DirichletOptions, SolveReport, StartSummary};
pub use kirchhoff::{
    kirchhoff_directional, kirchhoff_energy, kirchhoff_gradient, mountain_pass_geometry, ps_boundedness_probe,
    solve_kirchhoff, validate_kirchhoff, Geometry, HypothesisCheck, KirchhoffData, KirchhoffOptions, KirchhoffProblem,
    KirchhoffReport, KirchhoffValidation, Nonlinearity, PsProbe,
};

pub const ARMIJO: f64 = 1e-4;
pub const SHRINK: f64 = 0.5;
pub const MAX_HALVINGS: usize = 60;
pub const ITERATION_CAP: usize = 100_000;
