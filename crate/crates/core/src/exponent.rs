//! Variable exponents: the two-point field p(x,y), scalar exponents q(x),
//! the trace p̄, conjugates and the fractional critical exponent.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::domain::GridDomain;
use crate::error::{Error, Result};
use crate::expr::Expr;

/// Slack used on the strict inequality `1 < p⁻`.
pub const STRICT_SLACK: f64 = 1e-9;
/// Maximum tolerated `|p(x,y) - p(y,x)|`.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Variable names available to pair expressions, in evaluation order.
pub const PAIR_VARS: [&str; 7] = ["x", "y", "x1", "x2", "y1", "y2", "dist"];

/// Closed-form catalog for p(x,y).
#[derive(Debug, Clone, PartialEq)]
pub enum PairLaw {
    Constant(f64),
    /// `base + amp·|sin(freq·(Σx + Σy) + phase)|`.
    SinSum {
        base: f64,
        amp: f64,
        freq: f64,
        phase: f64,
    },
    /// `clamp(base + slope·|x − y|, min, max)`.
    DistanceAffine {
        base: f64,
        slope: f64,
        min: f64,
        max: f64,
    },
    Expr(Expr),
}

pub(crate) fn pair_vars(x: &[f64], y: &[f64]) -> [f64; 7] {
    let dist = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    [
        x[0],
        y[0],
        x[0],
        x.get(1).copied().unwrap_or(0.0),
        y[0],
        y.get(1).copied().unwrap_or(0.0),
        dist,
    ]
}

impl PairLaw {
    pub fn sin_sum(base: f64, amp: f64) -> Self {
        PairLaw::SinSum {
            base,
            amp,
            freq: 1.0,
            phase: 0.0,
        }
    }

    pub fn parse(src: &str) -> Result<Self> {
        Ok(PairLaw::Expr(Expr::parse(src, &PAIR_VARS)?))
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            PairLaw::Constant(p) => *p,
            PairLaw::SinSum { base, amp, freq, phase } => {
                let sum: f64 = x.iter().sum::<f64>() + y.iter().sum::<f64>();
                base + amp * (freq * sum + phase).sin().abs()
            }
            PairLaw::DistanceAffine { base, slope, min, max } => {
                let d = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                (base + slope * d).clamp(*min, *max)
            }
            PairLaw::Expr(e) => e.eval(&pair_vars(x, y)),
        }
    }
}

/// Symmetric two-point exponent with sampled bounds `p⁻ ≤ p ≤ p⁺` and the
/// fractional order `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentField {
    law: PairLaw,
    s: f64,
    dim: usize,
    p_minus: f64,
    p_plus: f64,
    trace_minus: f64,
    trace_plus: f64,
    max_asymmetry: f64,
}

impl ExponentField {
    /// Samples `law` on every grid pair with at least one endpoint in Ω
    /// (diagonal included) and validates bounds and symmetry.
    pub fn new(law: PairLaw, s: f64, grid: &GridDomain) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::InvalidExponent(format!("s = {s} must lie in (0,1)")));
        }
        let n = grid.len();
        let (mut lo, mut hi, mut asym) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
        let (mut tlo, mut thi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..n {
            for j in i..n {
                if !(grid.in_omega(i) || grid.in_omega(j)) {
                    continue;
                }
                let (x, y) = (grid.node(i), grid.node(j));
                let a = law.eval(x, y);
                if !a.is_finite() {
                    return Err(Error::InvalidExponent(format!("p is not finite at nodes ({i},{j})")));
                }
                if i == j {
                    tlo = tlo.min(a);
                    thi = thi.max(a);
                } else {
                    let b = law.eval(y, x);
                    asym = asym.max((a - b).abs());
                    lo = lo.min(b);
                    hi = hi.max(b);
                }
                lo = lo.min(a);
                hi = hi.max(a);
            }
        }
        if !(lo > 1.0 + STRICT_SLACK) {
            return Err(Error::InvalidExponent(format!("p⁻ = {lo} must exceed 1")));
        }
        if asym > SYMMETRY_TOL {
            return Err(Error::InvalidExponent(format!(
                "p is not symmetric (max violation {asym:e})"
            )));
        }
        Ok(Self {
            law,
            s,
            dim: grid.dim(),
            p_minus: lo,
            p_plus: hi,
            trace_minus: tlo,
            trace_plus: thi,
            max_asymmetry: asym,
        })
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        self.law.eval(x, y)
    }

    pub fn law(&self) -> &PairLaw {
        &self.law
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn p_minus(&self) -> f64 {
        self.p_minus
    }

    pub fn p_plus(&self) -> f64 {
        self.p_plus
    }

    pub fn report(&self) -> ExponentReport {
        let product = self.s * self.p_plus;
        ExponentReport {
            p_minus: self.p_minus,
            p_plus: self.p_plus,
            s: self.s,
            max_asymmetry: self.max_asymmetry,
            s_p_plus: product,
            subcritical: product < self.dim as f64,
            pass: self.max_asymmetry <= SYMMETRY_TOL && self.p_minus > 1.0 + STRICT_SLACK && product < self.dim as f64,
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ExponentReport {
    pub p_minus: f64,
    pub p_plus: f64,
    pub s: f64,
    pub max_asymmetry: f64,
    pub s_p_plus: f64,
    pub subcritical: bool,
    pub pass: bool,
}

type PointFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A one-point exponent q(x) with bounds `q⁻ ≤ q ≤ q⁺` over Ω.
#[derive(Clone)]
pub struct ScalarExponent {
    law: PointFn,
    q_minus: f64,
    q_plus: f64,
    label: String,
}

impl fmt::Debug for ScalarExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarExponent")
            .field("label", &self.label)
            .field("q_minus", &self.q_minus)
            .field("q_plus", &self.q_plus)
            .finish()
    }
}

/// Variable names for point expressions.
pub const POINT_VARS: [&str; 4] = ["x", "x1", "x2", "r"];

pub(crate) fn point_vars(x: &[f64]) -> [f64; 4] {
    let r = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    [x[0], x[0], x.get(1).copied().unwrap_or(0.0), r]
}

impl ScalarExponent {
    pub fn constant(q: f64) -> Result<Self> {
        if !(q > 1.0 + STRICT_SLACK && q.is_finite()) {
            return Err(Error::InvalidExponent(format!("constant exponent {q} must exceed 1")));
        }
        Ok(Self {
            law: Arc::new(move |_| q),
            q_minus: q,
            q_plus: q,
            label: format!("{q}"),
        })
    }

    /// Wraps an arbitrary map and samples its bounds on the Ω nodes of `grid`.
    pub fn sampled<F>(label: impl Into<String>, law: F, grid: &GridDomain) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &i in grid.omega_nodes() {
            let q = law(grid.node(i));
            if !q.is_finite() {
                return Err(Error::InvalidExponent(format!("q not finite at node {i}")));
            }
            lo = lo.min(q);
            hi = hi.max(q);
        }
        if !(lo > 1.0 + STRICT_SLACK) {
            return Err(Error::InvalidExponent(format!("q⁻ = {lo} must exceed 1")));
        }
        Ok(Self {
            law: Arc::new(law),
            q_minus: lo,
            q_plus: hi,
            label: label.into(),
        })
    }

    pub fn parse(src: &str, grid: &GridDomain) -> Result<Self> {
        let e = Expr::parse(src, &POINT_VARS)?;
        Self::sampled(src, move |x| e.eval(&point_vars(x)), grid)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.law)(x)
    }

    /// One value per grid node (exterior nodes included).
    pub fn values_on(&self, grid: &GridDomain) -> Vec<f64> {
        (0..grid.len()).map(|i| self.eval(grid.node(i))).collect()
    }

    pub fn q_minus(&self) -> f64 {
        self.q_minus
    }

    pub fn q_plus(&self) -> f64 {
        self.q_plus
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// p̄(x) = p(x,x).
pub fn trace(p: &ExponentField) -> ScalarExponent {
    let law = p.law.clone();
    ScalarExponent {
        law: Arc::new(move |x| law.eval(x, x)),
        q_minus: p.trace_minus,
        q_plus: p.trace_plus,
        label: "trace".into(),
    }
}

/// q̂ with 1/q + 1/q̂ = 1.
pub fn conjugate(q: &ScalarExponent) -> ScalarExponent {
    let inner = q.law.clone();
    let conj = |t: f64| t / (t - 1.0);
    ScalarExponent {
        law: Arc::new(move |x| {
            let t = inner(x);
            t / (t - 1.0)
        }),
        q_minus: conj(q.q_plus),
        q_plus: conj(q.q_minus),
        label: format!("conj({})", q.label),
    }
}

/// p*_s(x) = N p̄(x) / (N − s p̄(x)); requires `s·p⁺ < N`.
pub fn critical_exponent(p: &ExponentField, dim: usize) -> Result<ScalarExponent> {
    let n = dim as f64;
    let product = p.s * p.p_plus;
    if product >= n {
        return Err(Error::Supercritical { product, dim });
    }
    let s = p.s;
    let star = move |t: f64| n * t / (n - s * t);
    let law = p.law.clone();
    Ok(ScalarExponent {
        law: Arc::new(move |x| {
            let t = law.eval(x, x);
            n * t / (n - s * t)
        }),
        q_minus: star(p.trace_minus),
        q_plus: star(p.trace_plus),
        label: "critical".into(),
    })
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct TranslationReport {
    pub samples: usize,
    pub max_violation: f64,
    pub pass: bool,
}

/// Checks `p(x − z, y − z) = p(x, y)` on the given `(x, y, z)` triples.
pub fn validate_translation_invariance(
    p: &ExponentField,
    samples: &[(Vec<f64>, Vec<f64>, Vec<f64>)],
) -> TranslationReport {
    let mut worst = 0.0f64;
    for (x, y, z) in samples {
        let xs: Vec<f64> = x.iter().zip(z).map(|(a, b)| a - b).collect();
        let ys: Vec<f64> = y.iter().zip(z).map(|(a, b)| a - b).collect();
        let v = (p.eval(&xs, &ys) - p.eval(x, y)).abs();
        worst = if v.is_nan() { f64::INFINITY } else { worst.max(v) };
    }
    TranslationReport {
        samples: samples.len(),
        max_violation: worst,
        pass: worst < 1e-12,
    }
}

/// All `(x_i, x_j, x_k)` triples over grid nodes taken with the given stride.
pub fn grid_triples(grid: &GridDomain, stride: usize) -> Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let idx: Vec<usize> = (0..grid.len()).step_by(stride.max(1)).collect();
    let mut out = Vec::new();
    for &i in &idx {
        for &j in &idx {
            for &k in &idx {
                out.push((grid.node(i).to_vec(), grid.node(j).to_vec(), grid.node(k).to_vec()));
            }
        }
    }
    out
}
