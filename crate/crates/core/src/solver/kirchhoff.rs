use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{ARMIJO, MAX_HALVINGS, SHRINK};
use crate::error::{Error, Result};
use crate::exponent::{critical_exponent, trace, ScalarExponent};
use crate::lebesgue::GridFunction;
use crate::operator::{hessian_sigma, sigma_values, weak_row_values};
use crate::random::{random_bumps, rng};
use crate::sobolev::{full_norm, gagliardo_seminorm, Interaction};

/// Nonlinearity f(x, t) with primitive F(x, t).
#[derive(Debug, Clone)]
pub enum Nonlinearity {
    /// f = |t|^{γ(x)−2} t.
    Power {
        gamma: ScalarExponent,
    },
    Zero,
}

/// Data of the Kirchhoff problem with M(t) = a + b t^{α−1}.
#[derive(Debug, Clone)]
pub struct KirchhoffData {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub mu: f64,
    pub alpha_minus: f64,
    pub alpha_plus: f64,
    pub nonlinearity: Nonlinearity,
    /// Growth exponent in |f| ≤ c₁(1 + |t|^{β−1}).
    pub beta: ScalarExponent,
    pub c1: f64,
    pub theta: f64,
    /// Threshold A above which the superlinearity condition is sampled.
    pub threshold: f64,
}

impl KirchhoffData {
    /// The power example: M(t) = a + b t^{α−1}, f = |t|^{γ−2}t, β = γ, θ = γ⁻, c₁ = 1.
    pub fn power_example(a: f64, b: f64, alpha: f64, gamma: ScalarExponent) -> Self {
        Self {
            a,
            b,
            alpha,
            mu: 0.0,
            alpha_minus: alpha,
            alpha_plus: alpha,
            theta: gamma.q_minus(),
            beta: gamma.clone(),
            nonlinearity: Nonlinearity::Power { gamma },
            c1: 1.0,
            threshold: 1.0,
        }
    }

    pub fn m(&self, t: f64) -> f64 {
        self.a + self.b * t.powf(self.alpha - 1.0)
    }

    /// M̂(t) = ∫₀ᵗ M.
    pub fn m_hat(&self, t: f64) -> f64 {
        self.a * t + self.b / self.alpha * t.powf(self.alpha)
    }

    pub fn m_prime(&self, t: f64) -> f64 {
        if t == 0.0 {
            0.0
        } else {
            self.b * (self.alpha - 1.0) * t.powf(self.alpha - 2.0)
        }
    }

    pub fn f(&self, x: &[f64], t: f64) -> f64 {
        match &self.nonlinearity {
            Nonlinearity::Power { gamma } => crate::operator::flux(t, gamma.eval(x)),
            Nonlinearity::Zero => 0.0,
        }
    }

    pub fn primitive(&self, x: &[f64], t: f64) -> f64 {
        match &self.nonlinearity {
            Nonlinearity::Power { gamma } => {
                let g = gamma.eval(x);
                t.abs().powf(g) / g
            }
            Nonlinearity::Zero => 0.0,
        }
    }

    /// ((1+μ)/(1−μ))·α⁺(p⁺)^{α⁺}/(p⁻)^{α⁻−1}.
    pub fn theta_bound(&self, p_minus: f64, p_plus: f64) -> f64 {
        (1.0 + self.mu) / (1.0 - self.mu) * self.alpha_plus * p_plus.powf(self.alpha_plus)
            / p_minus.powf(self.alpha_minus - 1.0)
    }
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct HypothesisCheck {
    pub pass: bool,
    /// Worst sampled value of the checked quantity.
    pub value: f64,
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct KirchhoffValidation {
    /// (1−μ)t^{α−1} ≤ M(t) ≤ (1+μ)t^{α−1}; value is the worst relative excess.
    pub m1: HypothesisCheck,
    /// |f| ≤ c₁(1 + |t|^{β−1}); value is max |f|/(1 + |t|^{β−1}).
    pub f0: HypothesisCheck,
    /// f/|t|^{p⁺−1} → 0 as t → 0; value is the ratio at the smallest sample.
    pub f1: HypothesisCheck,
    /// 0 < θF ≤ f t for |t| > A; value is min (f t − θF)/|f t|.
    pub ar: HypothesisCheck,
    pub theta_bound: f64,
    pub theta_ok: bool,
    /// β⁻/α⁺.
    pub beta_ratio: f64,
    pub beta_ok: bool,
    /// max over Ω of γ/p*_s and β/p*_s; must stay below 1.
    pub critical_ratio: f64,
    pub subcritical: bool,
    pub pass: bool,
}

/// Samples every structural hypothesis of the data.
pub fn validate_kirchhoff(data: &KirchhoffData, ia: &Interaction) -> Result<KirchhoffValidation> {
    let g = ia.grid();
    let p = ia.exponent();
    let (p_minus, p_plus) = (p.p_minus(), p.p_plus());
    if !(data.a >= 0.0 && data.b > 0.0 && data.alpha > 1.0) {
        return Err(Error::Precondition("M needs a ≥ 0, b > 0, α > 1".into()));
    }
    if !(0.0..1.0).contains(&data.mu) {
        return Err(Error::Precondition(format!("μ = {} must lie in [0, 1)", data.mu)));
    }
    if !(data.alpha_minus > 1.0 && data.alpha_plus >= data.alpha_minus) {
        return Err(Error::Precondition("need 1 < α⁻ ≤ α⁺".into()));
    }
    if !(data.threshold > 0.0) {
        return Err(Error::Precondition("A must be positive".into()));
    }

    let mut m1_excess: f64 = 0.0;
    for k in -40..=40 {
        let t = 2f64.powf(k as f64 / 2.0);
        let base = t.powf(data.alpha - 1.0);
        let m = data.m(t);
        let excess = ((1.0 - data.mu) * base - m).max(m - (1.0 + data.mu) * base) / base;
        m1_excess = m1_excess.max(excess);
    }
    let m1 = HypothesisCheck {
        pass: m1_excess <= 1e-12,
        value: m1_excess,
    };

    let nodes = g.omega_nodes();
    let mut f0_ratio: f64 = 0.0;
    let mut f1_last: f64 = 0.0;
    let mut f1_tail_decreasing = true;
    let mut ar_margin = f64::INFINITY;
    for &i in nodes {
        let x = g.node(i);
        let beta = data.beta.eval(x);
        for k in -40..=40 {
            for sign in [-1.0, 1.0] {
                let t = sign * 2f64.powf(k as f64 / 2.0);
                f0_ratio = f0_ratio.max(data.f(x, t).abs() / (1.0 + t.abs().powf(beta - 1.0)));
            }
        }
        let mut prev = f64::INFINITY;
        for k in 1..=40 {
            let t = 2f64.powi(-k);
            let ratio = data.f(x, t).abs() / t.powf(p_plus - 1.0);
            if k > 20 && ratio > prev {
                f1_tail_decreasing = false;
            }
            prev = ratio;
        }
        f1_last = f1_last.max(prev);
        for k in 1..=80 {
            for sign in [-1.0, 1.0] {
                let t = sign * data.threshold * 2f64.powf(k as f64 / 4.0);
                let ft = data.f(x, t) * t;
                let big_f = data.primitive(x, t);
                let margin = if big_f > 0.0 && ft > 0.0 {
                    (ft - data.theta * big_f) / ft
                } else {
                    f64::NEG_INFINITY
                };
                ar_margin = ar_margin.min(margin);
            }
        }
    }
    let f0 = HypothesisCheck {
        pass: f0_ratio <= data.c1,
        value: f0_ratio,
    };
    let f1 = HypothesisCheck {
        pass: f1_tail_decreasing && f1_last < 1e-6,
        value: f1_last,
    };
    let ar = HypothesisCheck {
        pass: ar_margin >= -1e-12,
        value: ar_margin,
    };

    let theta_bound = data.theta_bound(p_minus, p_plus);
    let theta_ok = data.theta > theta_bound;
    let beta_ratio = data.beta.q_minus() / data.alpha_plus;
    let beta_ok = beta_ratio > p_plus;
    let star = critical_exponent(p, g.dim())?;
    let mut critical_ratio: f64 = 0.0;
    for &i in nodes {
        let x = g.node(i);
        let mut r = data.beta.eval(x) / star.eval(x);
        if let Nonlinearity::Power { gamma } = &data.nonlinearity {
            r = r.max(gamma.eval(x) / star.eval(x));
        }
        critical_ratio = critical_ratio.max(r);
    }
    let subcritical = critical_ratio < 1.0;
    Ok(KirchhoffValidation {
        m1,
        f0,
        f1,
        ar,
        theta_bound,
        theta_ok,
        beta_ratio,
        beta_ok,
        critical_ratio,
        subcritical,
        pass: m1.pass && f0.pass && f1.pass && ar.pass && theta_ok && beta_ok && subcritical,
    })
}

/// Kirchhoff functional J on a fixed interaction, with per-node exponents cached.
pub struct KirchhoffProblem<'a> {
    ia: &'a Interaction,
    data: &'a KirchhoffData,
    pbar: Vec<f64>,
}

impl<'a> KirchhoffProblem<'a> {
    pub fn new(data: &'a KirchhoffData, ia: &'a Interaction) -> Self {
        let pbar = trace(ia.exponent()).values_on(ia.grid());
        Self { ia, data, pbar }
    }

    pub fn interaction(&self) -> &Interaction {
        self.ia
    }

    /// J(u) = M̂(σ(u)) + Σ_Ω w|u|^{p̄}/p̄ − Σ_Ω w F(u).
    pub fn energy(&self, u: &[f64]) -> f64 {
        let g = self.ia.grid();
        let local: f64 = g
            .omega_nodes()
            .iter()
            .map(|&i| {
                let v = u[i];
                g.weight(i) * (v.abs().powf(self.pbar[i]) / self.pbar[i] - self.data.primitive(g.node(i), v))
            })
            .sum();
        self.data.m_hat(sigma_values(self.ia, u)) + local
    }

    /// Gradient of J with respect to the Ω values, in `omega_nodes` order.
    pub fn gradient(&self, u: &[f64]) -> DVector<f64> {
        let g = self.ia.grid();
        let m = self.data.m(sigma_values(self.ia, u));
        let row = weak_row_values(self.ia, u);
        DVector::from_iterator(
            g.omega_nodes().len(),
            g.omega_nodes().iter().map(|&i| {
                let v = u[i];
                m * row[i] + g.weight(i) * (crate::operator::flux(v, self.pbar[i]) - self.data.f(g.node(i), v))
            }),
        )
    }

    /// Max over Ω of |∂J/∂u_k| / w_k.
    pub fn residual(&self, grad: &DVector<f64>) -> f64 {
        let g = self.ia.grid();
        g.omega_nodes()
            .iter()
            .enumerate()
            .fold(0.0, |m, (k, &i)| m.max((grad[k] / g.weight(i)).abs()))
    }

    /// ⟨J'(u), φ⟩ in the weak form: M(σ)⟨Lu,φ⟩ + ∫|u|^{p̄−2}uφ − ∫f(u)φ.
    pub fn directional(&self, u: &[f64], phi: &[f64]) -> f64 {
        let g = self.ia.grid();
        self.gradient(u)
            .iter()
            .zip(g.omega_nodes())
            .map(|(gk, &i)| gk * phi[i])
            .sum()
    }

    pub fn hessian(&self, u: &[f64]) -> DMatrix<f64> {
        let g = self.ia.grid();
        let s = sigma_values(self.ia, u);
        let row = weak_row_values(self.ia, u);
        let nodes = g.omega_nodes();
        let ds = DVector::from_iterator(nodes.len(), nodes.iter().map(|&i| row[i]));
        let mut h = hessian_sigma(self.ia, u, 1e-12) * self.data.m(s) + &ds * ds.transpose() * self.data.m_prime(s);
        for (k, &i) in nodes.iter().enumerate() {
            let v = u[i].abs().max(1e-12);
            let pb = self.pbar[i];
            let local = match &self.data.nonlinearity {
                Nonlinearity::Power { gamma } => {
                    let gm = gamma.eval(g.node(i));
                    (pb - 1.0) * v.powf(pb - 2.0) - (gm - 1.0) * v.powf(gm - 2.0)
                }
                Nonlinearity::Zero => (pb - 1.0) * v.powf(pb - 2.0),
            };
            h[(k, k)] += g.weight(i) * local;
        }
        h
    }

    fn embed(&self, x: &DVector<f64>) -> Vec<f64> {
        let g = self.ia.grid();
        let mut v = vec![0.0; g.len()];
        for (k, &i) in g.omega_nodes().iter().enumerate() {
            v[i] = x[k];
        }
        v
    }

    fn restrict(&self, full: &[f64]) -> DVector<f64> {
        let nodes = self.ia.grid().omega_nodes();
        DVector::from_iterator(nodes.len(), nodes.iter().map(|&i| full[i]))
    }

    /// argmax_{t > 0} J(t v) and the maximum, for `v ≠ 0`; `None` if J(t v) never turns down.
    fn fibre_max(&self, v: &[f64]) -> Option<(f64, f64)> {
        let j = |t: f64| self.energy(&v.iter().map(|x| x * t).collect::<Vec<_>>());
        let ts: Vec<f64> = (-160..=160).map(|k| 2f64.powf(k as f64 / 8.0)).collect();
        let vals: Vec<f64> = ts.iter().map(|&t| j(t)).collect();
        let best = (0..ts.len()).max_by(|&a, &b| vals[a].total_cmp(&vals[b]))?;
        if best == 0 || best == ts.len() - 1 {
            return None;
        }
        Some(golden_max(&j, ts[best - 1], ts[best + 1]))
    }

    /// As [`Self::fibre_max`], walking outward from `guess` before falling back to a full scan.
    fn fibre_max_near(&self, v: &[f64], guess: f64) -> Option<(f64, f64)> {
        let j = |t: f64| self.energy(&v.iter().map(|x| x * t).collect::<Vec<_>>());
        let ratio = 2f64.powf(1.0 / 8.0);
        let (mut lo, mut mid, mut hi) = (guess / ratio, guess, guess * ratio);
        let (mut jlo, mut jmid, mut jhi) = (j(lo), j(mid), j(hi));
        for _ in 0..64 {
            if jmid >= jlo && jmid >= jhi {
                return Some(golden_max(&j, lo, hi));
            }
            if jhi > jmid {
                (lo, mid, jlo, jmid) = (mid, hi, jmid, jhi);
                hi = mid * ratio;
                jhi = j(hi);
            } else {
                (hi, mid, jhi, jmid) = (mid, lo, jmid, jlo);
                lo = mid / ratio;
                jlo = j(lo);
            }
        }
        self.fibre_max(v)
    }
}

/// Golden-section maximisation of a unimodal `f` on `[lo, hi]`.
fn golden_max(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - phi * (hi - lo);
    let mut d = lo + phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > 1e-13 * hi {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + phi * (hi - lo);
            fd = f(d);
        }
    }
    let t = 0.5 * (lo + hi);
    (t, f(t))
}

pub fn kirchhoff_energy(u: &GridFunction, data: &KirchhoffData, ia: &Interaction) -> Result<f64> {
    ia.check(u)?;
    Ok(KirchhoffProblem::new(data, ia).energy(u.values()))
}

/// Nodal residual of J: per Ω node, ∂J/∂u_k divided by the node weight; zero outside Ω.
pub fn kirchhoff_gradient(u: &GridFunction, data: &KirchhoffData, ia: &Interaction) -> Result<Vec<f64>> {
    ia.check(u)?;
    let g = ia.grid();
    let grad = KirchhoffProblem::new(data, ia).gradient(u.values());
    let mut out = vec![0.0; g.len()];
    for (k, &i) in g.omega_nodes().iter().enumerate() {
        out[i] = grad[k] / g.weight(i);
    }
    Ok(out)
}

/// ⟨J'(u), φ⟩.
pub fn kirchhoff_directional(
    u: &GridFunction,
    phi: &GridFunction,
    data: &KirchhoffData,
    ia: &Interaction,
) -> Result<f64> {
    ia.check(u)?;
    ia.check(phi)?;
    Ok(KirchhoffProblem::new(data, ia).directional(u.values(), phi.values()))
}

#[derive(Debug, Clone, Serialize)]
pub struct Geometry {
    /// Sphere radius in the X₀ norm (the K-seminorm).
    pub radius: f64,
    /// min of J over the sampled sphere; positive.
    pub level: f64,
    /// J(t_neg v) < 0 with ‖t_neg v‖ = t_neg > radius.
    pub t_neg: f64,
    pub energy_at_t_neg: f64,
    /// max of J along the segment [0, t_neg v].
    pub mountain_pass_estimate: f64,
    pub directions: usize,
    #[serde(skip)]
    pub direction: GridFunction,
}

pub const SPHERE_DIRECTIONS: usize = 64;
pub const RADIUS_STEPS: i32 = 30;
const MAX_DOUBLINGS: usize = 200;
const SEGMENT_SAMPLES: usize = 256;

/// Finds R, a > 0 with J ≥ a on the sampled sphere ‖u‖ = R, and t_neg with J(t_neg v) < 0.
pub fn mountain_pass_geometry(data: &KirchhoffData, ia: &Interaction, seed: u64) -> Result<Geometry> {
    let g = ia.grid();
    let problem = KirchhoffProblem::new(data, ia);
    let mut r = rng(seed);
    let mut directions = Vec::with_capacity(SPHERE_DIRECTIONS);
    for _ in 0..SPHERE_DIRECTIONS {
        let u = random_bumps(g, &mut r)?;
        let norm = gagliardo_seminorm(&u, ia)?.seminorm;
        directions.push(u.scaled(1.0 / norm));
    }
    let mut found = None;
    for k in 1..=RADIUS_STEPS {
        let radius = 2f64.powi(-k);
        let level = directions
            .iter()
            .map(|v| problem.energy(v.scaled(radius).values()))
            .fold(f64::INFINITY, f64::min);
        if level > 0.0 {
            found = Some((radius, level));
            break;
        }
    }
    let (radius, level) =
        found.ok_or_else(|| Error::GeometryNotFound("J is not positive on any sampled sphere".into()))?;
    let v = directions.swap_remove(0);
    let mut t = radius;
    let mut t_neg = None;
    for _ in 0..MAX_DOUBLINGS {
        t *= 2.0;
        let e = problem.energy(v.scaled(t).values());
        if !e.is_finite() {
            break;
        }
        if e < 0.0 {
            t_neg = Some((t, e));
            break;
        }
    }
    let (t_neg, energy_at_t_neg) =
        t_neg.ok_or_else(|| Error::GeometryNotFound("J(t v) stays nonnegative along the ray".into()))?;
    let mountain_pass_estimate = (0..=SEGMENT_SAMPLES)
        .map(|k| problem.energy(v.scaled(t_neg * k as f64 / SEGMENT_SAMPLES as f64).values()))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(Geometry {
        radius,
        level,
        t_neg,
        energy_at_t_neg,
        mountain_pass_estimate,
        directions: SPHERE_DIRECTIONS,
        direction: v,
    })
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct KirchhoffOptions {
    pub tol: f64,
    /// Fibre-descent iterations before polishing with Newton.
    pub max_descent: usize,
    pub max_newton: usize,
    /// Residual at which fibre descent hands over to Newton.
    pub handover: f64,
}

impl Default for KirchhoffOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_descent: 20_000,
            max_newton: 200,
            handover: 1e-2,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct KirchhoffReport {
    #[serde(skip)]
    pub solution: GridFunction,
    #[serde(skip)]
    pub iterate_norms: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub descent_iterations: usize,
    pub newton_iterations: usize,
    pub energy: f64,
    pub seminorm: f64,
    pub full_norm: f64,
    pub geometry: Geometry,
    /// ‖u‖ > R and J(u) ≥ a > 0 = J(0).
    pub nontrivial: bool,
    pub negative_energy: bool,
    /// J(u) ≤ J(t_neg v).
    pub below_start: bool,
    pub max_iterate_norm: f64,
}

/// Nontrivial critical point of J.
///
/// Descends the fibre maximum Ψ(v) = max_t J(t v) starting from the geometry direction,
/// using ∇Ψ(v) = t*∇J(t* v), then polishes t* v with Newton on J' = 0.
pub fn solve_kirchhoff(
    data: &KirchhoffData,
    ia: &Interaction,
    geometry: &Geometry,
    opts: &KirchhoffOptions,
) -> Result<KirchhoffReport> {
    let g = ia.grid();
    let problem = KirchhoffProblem::new(data, ia);
    let weights = DVector::from_iterator(g.omega_nodes().len(), g.omega_nodes().iter().map(|&i| g.weight(i)));
    let mut iterate_norms = Vec::new();
    let mut seminorm_of = |full: &[f64]| -> Result<f64> {
        let u = GridFunction::x0(g.clone(), full.to_vec())?;
        let n = gagliardo_seminorm(&u, ia)?.seminorm;
        iterate_norms.push(n);
        Ok(n)
    };

    let fibre_fail = || Error::GeometryNotFound("J(t v) has no interior maximum along a descent direction".into());
    let mut v = problem.restrict(geometry.direction.values());
    v /= v.amax();
    let (mut t, mut psi) = problem.fibre_max(&problem.embed(&v)).ok_or_else(fibre_fail)?;
    let mut step = 1.0;
    let mut descent_iterations = 0;
    let mut grad = problem.gradient(&problem.embed(&(&v * t)));
    let mut residual = problem.residual(&grad);
    seminorm_of(&problem.embed(&(&v * t)))?;
    while residual > opts.handover.max(opts.tol) && descent_iterations < opts.max_descent {
        descent_iterations += 1;
        let dpsi = &grad * t;
        let dir = -dpsi.component_div(&weights);
        let slope = dpsi.dot(&dir);
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let mut trial = &v + &dir * step;
            let scale = trial.amax();
            if scale > 0.0 {
                trial /= scale;
                if let Some((tt, pt)) = problem.fibre_max_near(&problem.embed(&trial), t) {
                    if pt <= psi + ARMIJO * step * slope {
                        accepted = Some((trial, tt, pt));
                        break;
                    }
                }
            }
            step *= SHRINK;
        }
        let Some((nv, nt, np)) = accepted else {
            break;
        };
        v = nv;
        t = nt;
        psi = np;
        step = (step * 2.0).min(1e6);
        let full = problem.embed(&(&v * t));
        grad = problem.gradient(&full);
        residual = problem.residual(&grad);
        seminorm_of(&full)?;
    }

    let mut x = &v * t;
    let mut newton_iterations = 0;
    while residual > opts.tol {
        if newton_iterations >= opts.max_newton {
            return Err(Error::IterationCap {
                cap: opts.max_newton,
                residual,
            });
        }
        newton_iterations += 1;
        let full = problem.embed(&x);
        let h = problem.hessian(&full);
        let d = h
            .lu()
            .solve(&(-&grad))
            .filter(|d| d.iter().all(|v| v.is_finite()))
            .ok_or(Error::LineSearchFailed { halvings: 0, residual })?;
        let merit = residual * residual;
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial = &x + &d * alpha;
            let tg = problem.gradient(&problem.embed(&trial));
            let tr = problem.residual(&tg);
            if tr * tr <= (1.0 - ARMIJO * alpha) * merit {
                accepted = Some((trial, tg, tr));
                break;
            }
            alpha *= SHRINK;
        }
        let Some((nx, ng, nr)) = accepted else {
            return Err(Error::LineSearchFailed {
                halvings: MAX_HALVINGS,
                residual,
            });
        };
        x = nx;
        grad = ng;
        residual = nr;
        seminorm_of(&problem.embed(&x))?;
    }

    let full = problem.embed(&x);
    let solution = GridFunction::x0(g.clone(), full.clone())?;
    let energy = problem.energy(&full);
    let seminorm = gagliardo_seminorm(&solution, ia)?.seminorm;
    let fnorm = full_norm(&solution, ia)?;
    if !(seminorm > geometry.radius && fnorm > geometry.radius) {
        return Err(Error::Suspect(format!(
            "critical point has norm {seminorm} not above the sphere radius {}",
            geometry.radius
        )));
    }
    let max_iterate_norm = iterate_norms.iter().cloned().fold(0.0, f64::max);
    Ok(KirchhoffReport {
        solution,
        iterate_norms,
        residual,
        iterations: descent_iterations + newton_iterations,
        descent_iterations,
        newton_iterations,
        energy,
        seminorm,
        full_norm: fnorm,
        geometry: geometry.clone(),
        nontrivial: energy >= geometry.level,
        negative_energy: energy < 0.0,
        below_start: energy <= geometry.energy_at_t_neg,
        max_iterate_norm,
    })
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct PsProbe {
    pub max_norm: f64,
    pub threshold: f64,
    pub bounded: bool,
    /// θ exceeds its lower bound and the sampled superlinearity condition holds.
    pub ar_holds: bool,
    /// Set when the norms exceed the threshold.
    pub flagged: bool,
}

/// Boundedness of an iterate sequence in the X₀ norm against `threshold`.
pub fn ps_boundedness_probe(
    data: &KirchhoffData,
    ia: &Interaction,
    iterates: &[GridFunction],
    threshold: f64,
) -> Result<PsProbe> {
    let v = validate_kirchhoff(data, ia)?;
    let mut max_norm: f64 = 0.0;
    for u in iterates {
        max_norm = max_norm.max(gagliardo_seminorm(u, ia)?.seminorm);
    }
    let bounded = max_norm <= threshold;
    Ok(PsProbe {
        max_norm,
        threshold,
        bounded,
        ar_holds: v.theta_ok && v.ar.pass,
        flagged: !bounded,
    })
}
