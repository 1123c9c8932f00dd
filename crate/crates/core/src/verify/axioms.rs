//! Pointwise checks of the pseudoconnection axioms on random fields.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{max_abs, ResidualReport};
use crate::chart::{directional_derivative, lie_bracket, Chart, MetricJet, Point, ScalarField, Sym2Jet, VectorField};
use crate::connections::{apply_pseudoconnection, levi_civita_coeffs, pseudoconnection_coeffs, Pseudoconnection};
use crate::error::Result;

/// Random fields `X`, `Y` and function `f` used together in one check.
#[derive(Debug, Clone)]
pub struct AxiomTriple {
    pub x: VectorField,
    pub y: VectorField,
    pub f: ScalarField,
}

impl AxiomTriple {
    pub fn random(dim: usize, count: usize, seed: u64) -> Vec<AxiomTriple> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| AxiomTriple {
                x: VectorField::random_trig(dim, &mut rng),
                y: VectorField::random_trig(dim, &mut rng),
                f: ScalarField::random_trig(dim, &mut rng),
            })
            .collect()
    }
}

fn diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn times(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (m * DVector::from_column_slice(v)).as_slice().to_vec()
}

/// `(residual, scale)` of each axiom for one triple at one point.
fn axiom_gaps(q: &Pseudoconnection, m: &MetricJet, s: &Sym2Jet, p: &Point, tr: &AxiomTriple) -> Result<[(f64, f64); 4]> {
    let (x, y, f) = (tr.x.eval(p)?, tr.y.eval(p)?, tr.f.eval(p)?);
    let fx = tr.x.scaled_by(&tr.f).eval(p)?;
    let fy = tr.y.scaled_by(&tr.f).eval(p)?;
    let q_xy = apply_pseudoconnection(q, &x, &y)?;
    let q_yx = apply_pseudoconnection(q, &y, &x)?;

    let a: Vec<f64> = apply_pseudoconnection(q, &fx, &y)?;
    let b: Vec<f64> = q_xy.iter().map(|v| f.value * v).collect();
    let tensorial = (diff(&a, &b), max_abs(&a).max(max_abs(&b)));

    let xf = directional_derivative(&x, &f)?;
    let py = times(&q.principal, &y.values());
    let a = apply_pseudoconnection(q, &x, &fy)?;
    let b: Vec<f64> = py.iter().zip(&q_xy).map(|(py, qxy)| xf * py + f.value * qxy).collect();
    let scale = max_abs(&a).max(max_abs(&py) * xf.abs()).max(max_abs(&q_xy) * f.value.abs());
    let leibniz = (diff(&a, &b), scale);

    let a: Vec<f64> = q_xy.iter().zip(&q_yx).map(|(u, v)| u - v).collect();
    let b = times(&q.principal, &lie_bracket(&x, &y)?);
    let symmetry = (diff(&a, &b), max_abs(&q_xy).max(max_abs(&q_yx)).max(max_abs(&b)));

    let s_xy = s.contract(&x, &y)?.value;
    let g_pxy = m.inner(&times(&q.principal, &x.values()), &y.values());
    let identity = ((s_xy - g_pxy).abs(), s_xy.abs().max(g_pxy.abs()));

    Ok([tensorial, leibniz, symmetry, identity])
}

/// Names of the four checks, in report order.
pub const AXIOMS: [&str; 4] = ["tensoriality", "leibniz", "symmetry", "principal_identity"];

/// Tensoriality `Q_{fX} Y = f Q_X Y`, Leibniz `Q_X(fY) = X(f) P Y + f Q_X Y`,
/// symmetry `Q_X Y − Q_Y X = P [X, Y]` and `S(X, Y) = g(P X, Y)` for the
/// pseudoconnection induced by `source(p) = (g, S)`.
///
/// One row per axiom per sample point, holding the worst of `triples`
/// seeded random field triples.
pub fn axiom_suite<F>(label: &str, time: f64, source: F, chart: &Chart, seed: u64, triples: usize) -> Result<Vec<ResidualReport>>
where
    F: Fn(&Point) -> Result<(MetricJet, Sym2Jet)>,
{
    let fields = AxiomTriple::random(chart.dim(), triples, seed);
    let mut rows = Vec::new();
    for p in chart.sample_points(seed) {
        let (m, s) = source(&p)?;
        let q = pseudoconnection_coeffs(&m, &s)?;
        let mut worst = [(0.0f64, 0.0f64); 4];
        for tr in &fields {
            for (w, (res, scale)) in worst.iter_mut().zip(axiom_gaps(&q, &m, &s, &p, tr)?) {
                w.0 = w.0.max(res);
                w.1 = w.1.max(super::relative(res, scale));
            }
        }
        for (name, (res, rel)) in AXIOMS.iter().zip(worst) {
            let mut row = ResidualReport::new(label, name, time, &p, res, 0.0).with_method("random-fields");
            row.residual_rel = rel;
            rows.push(row);
        }
    }
    Ok(rows)
}

/// `S = g` must give back the Levi-Civita coefficients with `P = I`.
pub fn levi_civita_reduction(label: &str, time: f64, p: &Point, m: &MetricJet) -> Result<ResidualReport> {
    let q = pseudoconnection_coeffs(m, &Sym2Jet::from_metric(m))?;
    let gamma = levi_civita_coeffs(m)?;
    let n = m.dim();
    let p_gap = (&q.principal - DMatrix::<f64>::identity(n, n)).abs().max();
    let gap = q.coeffs.max_abs_diff(&gamma.gamma).max(p_gap);
    let scale = gamma.gamma.max_abs().max(1.0);
    Ok(ResidualReport::new(label, "levi_civita_reduction", time, p, gap, scale).with_method("jet-algebra"))
}
