//! Numerical certification of the evolution law of the Levi-Civita connection
//! along a metric flow `∂_t g = R(g)`:
//!
//! ```text
//! ∂_t Γ^k_ij + P^k_l Γ^l_ij − Γ̃^k_ij = 0
//! ```
//!
//! where `Γ̃` and `P = g⁻¹ S` belong to the pseudoconnection induced by
//! `S = R(g_t)`. `∂_t Γ` is always taken by central differences in `t`.

mod axioms;
mod suite;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chart::{
    directional_derivative, lie_bracket, metric_inverse, MetricJet, Point, Sym2Jet, Tensor3, VectorField, VectorJet,
};
use crate::connections::{
    apply_connection, apply_pseudoconnection, covariant_derivative_sym2, levi_civita_coeffs, pseudoconnection_coeffs,
    ConnectionCoeffs,
};
use crate::error::{GeometryError, Result};
use crate::flows::{flow_rhs, FlowMap, MetricFamily};

pub use axioms::{axiom_suite, levi_civita_reduction, AxiomTriple, AXIOMS};
pub use suite::{
    run_suite, write_csv, CriterionResult, SuiteConfig, SuiteOutcome, SuiteSummary, CONVERGENCE_DTS, DEFAULT_DT,
};

/// Residuals below this are treated as rounding noise by [`convergence_study`].
pub const RESIDUAL_FLOOR: f64 = 1e-11;

/// Safety factor on the rounding estimate of [`TheoremAReport::noise_floor`].
pub const ROUNDING_FACTOR: f64 = 16.0;

/// One residual evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub family: String,
    pub check: String,
    pub time: f64,
    pub point: Vec<f64>,
    /// Componentwise max absolute residual.
    pub residual_max: f64,
    /// `residual_max` over the largest term magnitude.
    pub residual_rel: f64,
    /// Time step of the central difference, if one was taken.
    pub dt_used: Option<f64>,
    pub method: String,
}

impl ResidualReport {
    fn new(family: &str, check: &str, t: f64, p: &Point, residual: f64, scale: f64) -> Self {
        ResidualReport {
            family: family.to_string(),
            check: check.to_string(),
            time: t,
            point: p.coords().to_vec(),
            residual_max: residual,
            residual_rel: relative(residual, scale),
            dt_used: None,
            method: String::new(),
        }
    }

    fn with_dt(mut self, dt: f64) -> Self {
        self.dt_used = Some(dt);
        self
    }

    fn with_method(mut self, method: &str) -> Self {
        self.method = method.to_string();
        self
    }
}

pub(crate) fn relative(residual: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        residual / scale
    } else {
        residual
    }
}

/// Spectral condition number of a symmetric positive-definite matrix.
pub fn condition_number(g: &DMatrix<f64>) -> f64 {
    let eig = g.clone().symmetric_eigenvalues();
    let (lo, hi) = eig.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &e| (lo.min(e.abs()), hi.max(e.abs())));
    if lo > 0.0 {
        hi / lo
    } else {
        f64::INFINITY
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn check_dt(dt: f64) -> Result<()> {
    if dt > 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(GeometryError::InvalidArgument(format!("time step must be positive, got {dt}")))
    }
}

/// Levi-Civita coefficients at `t − dt` and `t + dt`.
fn neighbours(family: &MetricFamily, t: f64, p: &Point, dt: f64) -> Result<(ConnectionCoeffs, ConnectionCoeffs)> {
    check_dt(dt)?;
    let before = levi_civita_coeffs(&family.query_with_order(t - dt, p, 1)?.metric)?;
    let after = levi_civita_coeffs(&family.query_with_order(t + dt, p, 1)?.metric)?;
    Ok((before, after))
}

/// The three coefficient tensors of the evolution law at one `(t, p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoremATerms {
    /// Central difference of `Γ`.
    pub dt_gamma: Tensor3,
    /// `P^k_l Γ^l_ij`.
    pub p_gamma: Tensor3,
    /// `Γ̃^k_ij`.
    pub tilde_gamma: Tensor3,
}

impl TheoremATerms {
    pub fn residual(&self) -> Tensor3 {
        self.dt_gamma.combine(1.0, &self.p_gamma, 1.0).combine(1.0, &self.tilde_gamma, -1.0)
    }

    pub fn scale(&self) -> f64 {
        self.dt_gamma.max_abs().max(self.p_gamma.max_abs()).max(self.tilde_gamma.max_abs())
    }
}

/// Coefficient-level residual with its vector-field counterpart.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoremAReport {
    pub report: ResidualReport,
    /// Gap between `(∂_t∇)_X Y + P ∇_X Y − Q_X Y` and the coefficient residual
    /// contracted with `X, Y`.
    pub vector_form: ResidualReport,
    pub terms: TheoremATerms,
    /// Estimated floating-point noise of `report.residual_max`:
    /// `ROUNDING_FACTOR · ε · (cond(g) · |terms| + |Γ(t ± dt)| / dt)`.
    pub noise_floor: f64,
}

/// Seeded probe fields for vector-field forms of the identities.
pub fn probe_fields(dim: usize, seed: u64, count: usize) -> Vec<VectorField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| VectorField::random_trig(dim, &mut rng)).collect()
}

/// Seed of the default probe fields used by [`theorem_a_residual`].
pub const PROBE_SEED: u64 = 0x5eed;

/// Residual of `∂_t Γ + P Γ − Γ̃` at `(t, p)`.
pub fn theorem_a_residual(family: &MetricFamily, map: FlowMap, t: f64, p: &Point, dt: f64) -> Result<TheoremAReport> {
    let probes = probe_fields(family.dim(), PROBE_SEED, 2);
    theorem_a_residual_with_fields(family, map, t, p, dt, &probes[0], &probes[1])
}

pub fn theorem_a_residual_with_fields(
    family: &MetricFamily,
    map: FlowMap,
    t: f64,
    p: &Point,
    dt: f64,
    x: &VectorField,
    y: &VectorField,
) -> Result<TheoremAReport> {
    let (before, after) = neighbours(family, t, p, dt)?;
    let sample = family.query(t, p)?;
    let s = flow_rhs(map, &sample.metric)?;
    let q = pseudoconnection_coeffs(&sample.metric, &s)?;
    let gamma = levi_civita_coeffs(&sample.metric)?;
    let terms = TheoremATerms {
        dt_gamma: after.gamma.combine(0.5 / dt, &before.gamma, -0.5 / dt),
        p_gamma: gamma.gamma.apply_first(&q.principal),
        tilde_gamma: q.coeffs.clone(),
    };
    let residual = terms.residual();
    let report = ResidualReport::new(family.id(), "theorem_a", t, p, residual.max_abs(), terms.scale())
        .with_dt(dt)
        .with_method("central-difference");

    let (xj, yj) = (x.eval(p)?, y.eval(p)?);
    let nabla_after = apply_connection(&after, &xj, &yj)?;
    let nabla_before = apply_connection(&before, &xj, &yj)?;
    let nabla = apply_connection(&gamma, &xj, &yj)?;
    let q_xy = apply_pseudoconnection(&q, &xj, &yj)?;
    let p_nabla = &q.principal * nalgebra::DVector::from_column_slice(&nabla);
    let contracted = residual.contract(&xj.values(), &yj.values());
    let n = family.dim();
    let mut gap: f64 = 0.0;
    for k in 0..n {
        let lhs = (nabla_after[k] - nabla_before[k]) / (2.0 * dt) + p_nabla[k] - q_xy[k];
        gap = gap.max((lhs - contracted[k]).abs());
    }
    let scale = (max_abs(&nabla_after).max(max_abs(&nabla_before)) / (2.0 * dt))
        .max(max_abs(p_nabla.as_slice()))
        .max(max_abs(&q_xy));
    let vector_form = ResidualReport::new(family.id(), "vector_form", t, p, gap, scale)
        .with_dt(dt)
        .with_method("dY-cancellation");
    let noise_floor = ROUNDING_FACTOR
        * f64::EPSILON
        * (condition_number(&sample.metric.g()) * terms.scale()
            + after.gamma.max_abs().max(before.gamma.max_abs()) / dt);
    Ok(TheoremAReport { report, vector_form, terms, noise_floor })
}

/// `½ g^{kl} ((∇_i h)_jl + (∇_j h)_il − (∇_l h)_ij)`.
pub fn variation_tensor(m: &MetricJet, h: &Sym2Jet) -> Result<Tensor3> {
    let gamma = levi_civita_coeffs(m)?;
    let dh = covariant_derivative_sym2(&gamma, h)?;
    let n = m.dim();
    let lowered = Tensor3::from_fn(n, |l, i, j| 0.5 * (dh[(i, j, l)] + dh[(j, i, l)] - dh[(l, i, j)]));
    Ok(lowered.apply_first(&metric_inverse(m)?))
}

/// Differenced and algebraic halves of the first-variation check.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationReport {
    /// `max |∂_t Γ − V|` with `V` the variation tensor of `h = R(g_t)`.
    pub differenced: ResidualReport,
    /// `max |Γ̃ − P Γ − V|`, no time differencing.
    pub algebraic: ResidualReport,
}

/// Compares `∂_t Γ` and the pseudoconnection side `Γ̃ − P Γ` against the
/// standard first-variation formula for `h = R(g_t)`.
pub fn variation_formula_residual(
    family: &MetricFamily,
    map: FlowMap,
    t: f64,
    p: &Point,
    dt: f64,
) -> Result<VariationReport> {
    let (before, after) = neighbours(family, t, p, dt)?;
    let sample = family.query(t, p)?;
    let h = flow_rhs(map, &sample.metric)?;
    let v = variation_tensor(&sample.metric, &h)?;
    let dt_gamma = after.gamma.combine(0.5 / dt, &before.gamma, -0.5 / dt);
    let differenced = ResidualReport::new(
        family.id(),
        "variation_differenced",
        t,
        p,
        dt_gamma.max_abs_diff(&v),
        dt_gamma.max_abs().max(v.max_abs()),
    )
    .with_dt(dt)
    .with_method("central-difference");
    let algebraic = variation_algebraic(family.id(), t, p, &sample.metric, &h)?;
    Ok(VariationReport { differenced, algebraic })
}

/// `Γ̃ − P Γ` against the variation tensor of the same `h`.
pub fn variation_algebraic(label: &str, t: f64, p: &Point, m: &MetricJet, h: &Sym2Jet) -> Result<ResidualReport> {
    let q = pseudoconnection_coeffs(m, h)?;
    let gamma = levi_civita_coeffs(m)?;
    let p_gamma = gamma.gamma.apply_first(&q.principal);
    let lhs = q.coeffs.combine(1.0, &p_gamma, -1.0);
    let v = variation_tensor(m, h)?;
    let scale = q.coeffs.max_abs().max(p_gamma.max_abs()).max(v.max_abs());
    Ok(ResidualReport::new(label, "variation_algebraic", t, p, lhs.max_abs_diff(&v), scale).with_method("jet-algebra"))
}

/// `|2 g(∂_t∇(X, Y), Z) − rhs|` where `rhs` is the differentiated Koszul
/// formula with `S = R(g_t)`:
///
/// ```text
/// −2S(∇_X Y, Z) + X S(Y,Z) + Y S(X,Z) − Z S(X,Y) + S([X,Y],Z) − S([X,Z],Y) − S([Y,Z],X)
/// ```
#[allow(clippy::too_many_arguments)]
pub fn eq2_residual(
    family: &MetricFamily,
    map: FlowMap,
    t: f64,
    p: &Point,
    dt: f64,
    x: &VectorField,
    y: &VectorField,
    z: &VectorField,
) -> Result<f64> {
    let (before, after) = neighbours(family, t, p, dt)?;
    let sample = family.query(t, p)?;
    let s = flow_rhs(map, &sample.metric)?;
    let gamma = levi_civita_coeffs(&sample.metric)?;
    let (xj, yj, zj) = (x.eval(p)?, y.eval(p)?, z.eval(p)?);

    let nabla_after = apply_connection(&after, &xj, &yj)?;
    let nabla_before = apply_connection(&before, &xj, &yj)?;
    let d_nabla: Vec<f64> = nabla_after.iter().zip(&nabla_before).map(|(a, b)| (a - b) / (2.0 * dt)).collect();
    let lhs = 2.0 * sample.metric.inner(&d_nabla, &zj.values());

    let sv = s.values();
    let s_of = |a: &[f64], b: &[f64]| bilinear(&sv, a, b);
    let deriv = |v: &VectorJet, a: &VectorJet, b: &VectorJet| -> Result<f64> {
        directional_derivative(v, &s.contract(a, b)?)
    };
    let nabla = apply_connection(&gamma, &xj, &yj)?;
    let rhs = -2.0 * s_of(&nabla, &zj.values()) + deriv(&xj, &yj, &zj)? + deriv(&yj, &xj, &zj)?
        - deriv(&zj, &xj, &yj)?
        + s_of(&lie_bracket(&xj, &yj)?, &zj.values())
        - s_of(&lie_bracket(&xj, &zj)?, &yj.values())
        - s_of(&lie_bracket(&yj, &zj)?, &xj.values());
    Ok((lhs - rhs).abs())
}

fn bilinear(s: &DMatrix<f64>, a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| s[(i, j)] * a[i] * b[j]).sum()
}

/// Outcome of a time-step refinement study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "order", rename_all = "snake_case")]
pub enum Convergence {
    /// Least-squares slope of `log residual` against `log dt`.
    Order(f64),
    /// Every residual sits at or below the rounding floor.
    ExactWithinPrecision,
    /// Fewer than two residuals above the floor.
    Undetermined,
}

impl std::fmt::Display for Convergence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Convergence::Order(o) => write!(f, "order {o:.3}"),
            Convergence::ExactWithinPrecision => write!(f, "exact within precision"),
            Convergence::Undetermined => write!(f, "undetermined"),
        }
    }
}

/// Result of [`convergence_study`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    pub dts: Vec<f64>,
    /// Largest residual at each step.
    pub residuals: Vec<f64>,
    /// Whether some residual at that step rose above its noise floor.
    pub above_floor: Vec<bool>,
    pub outcome: Convergence,
}

/// `residual(dt)` returns `(residual, noise_floor)` samples for one step.
/// A sample counts only if it exceeds both its own noise floor and `floor`;
/// the fit uses the largest counted residual per step.
pub fn convergence_study<F>(mut residual: F, dts: &[f64], floor: f64) -> Result<ConvergenceStudy>
where
    F: FnMut(f64) -> Result<Vec<(f64, f64)>>,
{
    if dts.len() < 2 {
        return Err(GeometryError::InvalidArgument("convergence study needs at least two steps".into()));
    }
    let mut residuals = Vec::with_capacity(dts.len());
    let mut above_floor = Vec::with_capacity(dts.len());
    let mut fit = Vec::new();
    for &dt in dts {
        let samples = residual(dt)?;
        residuals.push(samples.iter().fold(0.0f64, |m, s| m.max(s.0)));
        let counted = samples.iter().filter(|(r, f)| *r > floor.max(*f)).fold(0.0f64, |m, s| m.max(s.0));
        above_floor.push(counted > 0.0);
        if counted > 0.0 {
            fit.push((dt.ln(), counted.ln()));
        }
    }
    let outcome = match fit.len() {
        0 => Convergence::ExactWithinPrecision,
        1 => Convergence::Undetermined,
        _ => Convergence::Order(slope(&fit)),
    };
    Ok(ConvergenceStudy { dts: dts.to_vec(), residuals, above_floor, outcome })
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests;
