//! TOML run configuration and its translation into library objects.

use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use nlsob::exponent::ScalarExponent;
use nlsob::expr::Expr;
use nlsob::kernel::{custom_kernel, multiplied_kernel, scaled_singular_kernel, singular_kernel};
use nlsob::solver::{KirchhoffData, Nonlinearity};
use nlsob::{DualVector, ExponentField, GridDomain, GridFunction, Kernel, OmegaShape, PairLaw};

use crate::failure::Failure;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub grid: GridSpec,
    pub exponent: ExponentSpec,
    #[serde(default)]
    pub kernel: KernelSpec,
    pub function: Option<FunctionSpec>,
    #[serde(default)]
    pub lebesgue: LebesgueSpec,
    #[serde(default)]
    pub embedding: EmbeddingSpec,
    #[serde(default)]
    pub problem: ProblemSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub samples: SampleSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GridSpec {
    Interval {
        lo: f64,
        hi: f64,
        h: f64,
        collar: Option<f64>,
    },
    Rectangle {
        lo: [f64; 2],
        hi: [f64; 2],
        h: f64,
        collar: Option<f64>,
    },
    Disk {
        center: [f64; 2],
        radius: f64,
        h: f64,
        collar: Option<f64>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ExponentSpec {
    Constant {
        value: f64,
        s: f64,
    },
    SinSum {
        base: f64,
        amp: f64,
        #[serde(default = "one")]
        freq: f64,
        #[serde(default)]
        phase: f64,
        s: f64,
    },
    DistanceAffine {
        base: f64,
        slope: f64,
        min: f64,
        max: f64,
        s: f64,
    },
    Expr {
        expr: String,
        s: f64,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum KernelSpec {
    #[default]
    Singular,
    Scaled {
        scale: f64,
        k0: f64,
    },
    Multiplied {
        a: String,
    },
    Custom {
        expr: String,
        k0: f64,
    },
}

/// A number or a whitelisted expression.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Formula {
    Number(f64),
    Expr(String),
}

impl Formula {
    fn source(&self) -> String {
        match self {
            Formula::Number(v) => format!("{v}"),
            Formula::Expr(s) => s.clone(),
        }
    }

    pub fn scalar_exponent(&self, grid: &GridDomain) -> Result<ScalarExponent, Failure> {
        Ok(match self {
            Formula::Number(v) => ScalarExponent::constant(*v)?,
            Formula::Expr(s) => ScalarExponent::parse(s, grid)?,
        })
    }

    pub fn point_fn(&self) -> Result<impl Fn(&[f64]) -> f64, Failure> {
        let expr = Expr::parse(&self.source(), &nlsob::exponent::POINT_VARS)?;
        Ok(move |x: &[f64]| {
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            expr.eval(&[x[0], x[0], x.get(1).copied().unwrap_or(0.0), r])
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub expr: Formula,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LebesgueSpec {
    /// Defaults to the trace p̄ of the pair exponent.
    pub q: Option<Formula>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingSpec {
    pub r: Formula,
}

impl Default for EmbeddingSpec {
    fn default() -> Self {
        Self {
            r: Formula::Number(2.5),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProblemSpec {
    #[default]
    None,
    Dirichlet {
        f: Formula,
        #[serde(default = "three")]
        starts: usize,
    },
    Kirchhoff(KirchhoffSpec),
}

fn three() -> usize {
    3
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KirchhoffSpec {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    #[serde(default)]
    pub mu: f64,
    /// f(x, t) = |t|^{γ(x)−2} t; omit for f ≡ 0.
    pub gamma: Option<Formula>,
    /// Defaults to γ.
    pub beta: Option<Formula>,
    /// Defaults to γ⁻.
    pub theta: Option<f64>,
    #[serde(default = "one")]
    pub c1: f64,
    #[serde(default = "one")]
    pub threshold: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "dirichlet_tol")]
    pub dirichlet: f64,
    #[serde(default = "kirchhoff_tol")]
    pub kirchhoff: f64,
}

fn dirichlet_tol() -> f64 {
    1e-8
}

fn kirchhoff_tol() -> f64 {
    1e-6
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            dirichlet: dirichlet_tol(),
            kirchhoff: kirchhoff_tol(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSpec {
    /// Random functions per randomized check.
    #[serde(default = "default_cases")]
    pub cases: usize,
    /// Functions in `embedding-scan`.
    #[serde(default = "default_embedding")]
    pub embedding: usize,
}

fn default_cases() -> usize {
    20
}

fn default_embedding() -> usize {
    100
}

impl Default for SampleSpec {
    fn default() -> Self {
        Self {
            cases: default_cases(),
            embedding: default_embedding(),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<String>,
}

pub const DEFAULT_SEED: u64 = 42;

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, Failure> {
        toml::from_str(text).map_err(|e| Failure::config(format!("config does not parse: {e}")))
    }

    pub fn build_grid(&self) -> Result<Arc<GridDomain>, Failure> {
        let (shape, h, collar) = match self.grid {
            GridSpec::Interval { lo, hi, h, collar } => (OmegaShape::Interval { lo, hi }, h, collar),
            GridSpec::Rectangle { lo, hi, h, collar } => (OmegaShape::Rectangle { lo, hi }, h, collar),
            GridSpec::Disk {
                center,
                radius,
                h,
                collar,
            } => (OmegaShape::Disk { center, radius }, h, collar),
        };
        let collar = collar.unwrap_or_else(|| shape.diameter());
        Ok(Arc::new(GridDomain::around(shape, h, collar)?))
    }

    pub fn build_exponent(&self, grid: &GridDomain) -> Result<ExponentField, Failure> {
        let (law, s) = match &self.exponent {
            ExponentSpec::Constant { value, s } => (PairLaw::Constant(*value), *s),
            ExponentSpec::SinSum {
                base,
                amp,
                freq,
                phase,
                s,
            } => (
                PairLaw::SinSum {
                    base: *base,
                    amp: *amp,
                    freq: *freq,
                    phase: *phase,
                },
                *s,
            ),
            ExponentSpec::DistanceAffine {
                base,
                slope,
                min,
                max,
                s,
            } => (
                PairLaw::DistanceAffine {
                    base: *base,
                    slope: *slope,
                    min: *min,
                    max: *max,
                },
                *s,
            ),
            ExponentSpec::Expr { expr, s } => (PairLaw::parse(expr)?, *s),
        };
        Ok(ExponentField::new(law, s, grid)?)
    }

    pub fn build_kernel(&self, p: &ExponentField, grid: &GridDomain) -> Result<Kernel, Failure> {
        let dim = grid.dim();
        Ok(match &self.kernel {
            KernelSpec::Singular => singular_kernel(p, dim),
            KernelSpec::Scaled { scale, k0 } => scaled_singular_kernel(p, dim, *scale, *k0)?,
            KernelSpec::Multiplied { a } => multiplied_kernel(p, dim, a, grid)?,
            KernelSpec::Custom { expr, k0 } => custom_kernel(p, dim, expr, *k0)?,
        })
    }

    pub fn function(&self, grid: &Arc<GridDomain>) -> Result<Option<GridFunction>, Failure> {
        match &self.function {
            None => Ok(None),
            Some(section) => Ok(Some(GridFunction::x0_from_fn(grid.clone(), section.expr.point_fn()?)?)),
        }
    }

    pub fn dirichlet_load(&self, grid: &GridDomain) -> Result<(DualVector, usize), Failure> {
        match &self.problem {
            ProblemSpec::Dirichlet { f, starts } => Ok((DualVector::from_fn(grid, f.point_fn()?), *starts)),
            _ => Err(Failure::config("`solve` needs [problem] kind = \"dirichlet\"")),
        }
    }

    pub fn kirchhoff_data(&self, grid: &GridDomain) -> Result<KirchhoffData, Failure> {
        let ProblemSpec::Kirchhoff(section) = &self.problem else {
            return Err(Failure::config(
                "`solve-kirchhoff` needs [problem] kind = \"kirchhoff\"",
            ));
        };
        let gamma = section.gamma.as_ref().map(|g| g.scalar_exponent(grid)).transpose()?;
        let beta = match (&section.beta, &gamma) {
            (Some(b), _) => b.scalar_exponent(grid)?,
            (None, Some(g)) => g.clone(),
            (None, None) => return Err(Failure::config("kirchhoff problem without gamma needs beta")),
        };
        let theta = section
            .theta
            .or(gamma.as_ref().map(|g| g.q_minus()))
            .unwrap_or(beta.q_minus());
        Ok(KirchhoffData {
            a: section.a,
            b: section.b,
            alpha: section.alpha,
            mu: section.mu,
            alpha_minus: section.alpha,
            alpha_plus: section.alpha,
            nonlinearity: match gamma {
                Some(gamma) => Nonlinearity::Power { gamma },
                None => Nonlinearity::Zero,
            },
            beta,
            c1: section.c1,
            theta,
            threshold: section.threshold,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }
}

/// Default configuration: 1D, 64 nodes, seed 42.
pub const DEFAULT_CONFIG: &str = r#"seed = 42

[grid]
shape = "interval"
lo = -1.0
hi = 1.0
h = 0.0625
collar = 1.0

[exponent]
kind = "sin-sum"
base = 2.0
amp = 0.5
s = 0.3

[kernel]
kind = "singular"

[problem]
kind = "kirchhoff"
a = 1.0
b = 1.0
alpha = 1.1
gamma = 4.0
"#;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_builds_the_reference_setup() {
        let cfg = RunConfig::parse(DEFAULT_CONFIG).unwrap();
        let g = cfg.build_grid().unwrap();
        assert_eq!(g.len(), 64);
        assert_eq!(g.omega_nodes().len(), 32);
        let p = cfg.build_exponent(&g).unwrap();
        assert!(p.p_minus() >= 2.0 && p.p_plus() <= 2.5);
        assert_eq!(cfg.seed(), 42);
        assert!(matches!(cfg.problem, ProblemSpec::Kirchhoff(_)));
    }

    #[test]
    fn formulas_accept_numbers_and_expressions() {
        let cfg = RunConfig::parse(&format!("{DEFAULT_CONFIG}\n[lebesgue]\nq = 3\n")).unwrap();
        assert!(matches!(cfg.lebesgue.q, Some(Formula::Number(v)) if v == 3.0));
        let cfg = RunConfig::parse(&format!("{DEFAULT_CONFIG}\n[lebesgue]\nq = \"2 + abs(x)\"\n")).unwrap();
        let g = cfg.build_grid().unwrap();
        let q = cfg.lebesgue.q.unwrap().scalar_exponent(&g).unwrap();
        assert_eq!(q.eval(&[-0.5]), 2.5);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::parse(&format!("{DEFAULT_CONFIG}\nbogus = 1\n")).is_err());
    }

    #[test]
    fn collar_defaults_to_diameter() {
        let text = DEFAULT_CONFIG.replace("collar = 1.0\n", "");
        let g = RunConfig::parse(&text).unwrap().build_grid().unwrap();
        assert_eq!(g.box_bounds().0, &[-3.0]);
    }
}
