//! Riemann, Ricci and scalar curvature from metric jets, and first partials of
//! the Ricci tensor.
//!
//! Convention: `R^l_ijk = ∂_i Γ^l_jk − ∂_j Γ^l_ik + Γ^l_im Γ^m_jk − Γ^l_jm Γ^m_ik`
//! and `Ric_jk = R^i_ijk`; with it the unit round sphere has `Ric = (n−1) g`.

use std::ops::Index;

use nalgebra::DMatrix;

use crate::chart::{metric_inverse, MetricField, MetricJet, Point, Sym2Jet, Tensor3};
use crate::connections::christoffel_jets;
use crate::error::{GeometryError, Result};
use crate::jet::Jet;

/// Dense `n⁴` array indexed `(l, i, j, k)` for `R^l_ijk`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Index<(usize, usize, usize, usize)> for Tensor4 {
    type Output = f64;
    fn index(&self, (l, i, j, k): (usize, usize, usize, usize)) -> &f64 {
        let n = self.n;
        &self.data[((l * n + i) * n + j) * n + k]
    }
}

/// Curvature quantities at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureAtPoint {
    pub riemann: Tensor4,
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
}

fn require_order(m: &MetricJet, needed: usize) -> Result<()> {
    if m.order() < needed {
        Err(GeometryError::InsufficientOrder { needed, available: m.order() })
    } else {
        Ok(())
    }
}

/// Riemann tensor as jets of order `m.order() − 2`.
fn riemann_jets(m: &MetricJet) -> Result<Vec<Jet>> {
    require_order(m, 2)?;
    let n = m.dim();
    let gamma = christoffel_jets(m)?;
    let out_order = m.order() - 2;
    let g = |k: usize, i: usize, j: usize| &gamma[(k * n + i) * n + j];
    let low: Vec<Jet> = gamma.iter().map(|j| j.truncate(out_order)).collect();
    let gl = |k: usize, i: usize, j: usize| &low[(k * n + i) * n + j];

    let mut out = Vec::with_capacity(n.pow(4));
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut r = g(l, j, k).partial(i) - g(l, i, k).partial(j);
                    for mm in 0..n {
                        r += gl(l, i, mm) * gl(mm, j, k);
                        r -= gl(l, j, mm) * gl(mm, i, k);
                    }
                    out.push(r);
                }
            }
        }
    }
    Ok(out)
}

fn ricci_from_riemann(n: usize, riemann: &[Jet]) -> Vec<Jet> {
    let r = |l: usize, i: usize, j: usize, k: usize| &riemann[((l * n + i) * n + j) * n + k];
    let mut out = Vec::with_capacity(n * n);
    for j in 0..n {
        for k in 0..n {
            let mut acc = r(0, 0, j, k).clone();
            for i in 1..n {
                acc += r(i, i, j, k);
            }
            out.push(acc);
        }
    }
    out
}

/// `R^l_ijk` at the point; needs an order-2 jet.
pub fn riemann_tensor(m: &MetricJet) -> Result<Tensor4> {
    let jets = riemann_jets(&m.truncate(2))?;
    Ok(Tensor4 { n: m.dim(), data: jets.iter().map(Jet::value).collect() })
}

/// `Ric_jk = R^i_ijk`; needs an order-2 jet.
pub fn ricci_tensor(m: &MetricJet) -> Result<DMatrix<f64>> {
    let n = m.dim();
    let ric = ricci_from_riemann(n, &riemann_jets(&m.truncate(2))?);
    Ok(DMatrix::from_fn(n, n, |j, k| ric[j * n + k].value()))
}

/// `g^{jk} Ric_jk`.
pub fn scalar_curvature(m: &MetricJet) -> Result<f64> {
    let ginv = metric_inverse(m)?;
    Ok(ginv.component_mul(&ricci_tensor(m)?).sum())
}

pub fn curvature_at(m: &MetricJet) -> Result<CurvatureAtPoint> {
    let riemann = riemann_tensor(m)?;
    let ricci = ricci_tensor(m)?;
    let scalar = metric_inverse(m)?.component_mul(&ricci).sum();
    Ok(CurvatureAtPoint { riemann, ricci, scalar })
}

/// Ricci tensor with its exact first partials; needs an order-3 jet.
pub fn ricci_jet(m: &MetricJet) -> Result<Sym2Jet> {
    require_order(m, 3)?;
    let n = m.dim();
    let ric = ricci_from_riemann(n, &riemann_jets(&m.truncate(3))?);
    // the raw contraction is symmetric up to rounding; average to enforce it
    let sym = (0..n * n)
        .map(|jk| {
            let (j, k) = (jk / n, jk % n);
            (&ric[j * n + k] + &ric[k * n + j]) * 0.5
        })
        .collect();
    Sym2Jet::from_components(n, sym)
}

/// Whether `ricci_first_partials` may fall back to finite differences when
/// the metric cannot supply third derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fallback {
    #[default]
    Disabled,
    Enabled,
}

/// How a set of Ricci partials was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PartialsMethod {
    Exact,
    /// Central differences with step `h`, one Richardson level.
    FiniteDifference { h: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RicciPartials {
    /// `∂_k Ric_ij` stored at `(k, i, j)`.
    pub partials: Tensor3,
    pub method: PartialsMethod,
}

/// Step used by the finite-difference fallback.
pub const FALLBACK_STEP: f64 = 1e-3;

/// `∂_k Ric_ij` at `p`. Exact when the metric supplies order-3 jets; otherwise
/// central differences of the Ricci tensor with Richardson extrapolation, if
/// `fallback` allows it.
pub fn ricci_first_partials(metric: &MetricField, p: &Point, fallback: Fallback) -> Result<RicciPartials> {
    let m = metric.jet(p)?;
    let n = m.dim();
    if m.order() >= 3 {
        let ric = ricci_jet(&m)?;
        return Ok(RicciPartials {
            partials: Tensor3::from_fn(n, |k, i, j| ric.d1(k, i, j)),
            method: PartialsMethod::Exact,
        });
    }
    if fallback == Fallback::Disabled {
        return Err(GeometryError::InsufficientOrder { needed: 3, available: m.order() });
    }
    let h = FALLBACK_STEP;
    let ric_at = |q: &Point| -> Result<DMatrix<f64>> { ricci_tensor(&metric.jet_with_order(q, 2)?) };
    let central = |k: usize, step: f64| -> Result<DMatrix<f64>> {
        Ok((ric_at(&p.shifted(k, step))? - ric_at(&p.shifted(k, -step))?) / (2.0 * step))
    };
    let mut partials = Tensor3::zeros(n);
    for k in 0..n {
        let coarse = central(k, h)?;
        let fine = central(k, h / 2.0)?;
        let extrapolated = (fine * 4.0 - coarse) / 3.0;
        for i in 0..n {
            for j in 0..n {
                partials[(k, i, j)] = extrapolated[(i, j)];
            }
        }
    }
    Ok(RicciPartials { partials, method: PartialsMethod::FiniteDifference { h } })
}
