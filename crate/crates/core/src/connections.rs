//! Levi-Civita connections, symmetric pseudoconnections generated by a
//! symmetric 2-tensor, and their action on vector fields.
//!
//! Both coefficient sets come from the same Koszul-shaped formula evaluated on
//! coordinate fields (whose brackets vanish):
//!
//! ```text
//! Γ^k_ij = ½ g^{kl} (∂_i T_jl + ∂_j T_il − ∂_l T_ij)
//! ```
//!
//! with `T = g` for the Levi-Civita connection and `T = S` for the
//! pseudoconnection `Q` induced by `S`, whose principal homomorphism is
//! `P = g⁻¹ S`.

use nalgebra::DMatrix;

use crate::chart::{inverse_jets, metric_inverse, MetricJet, Sym2Jet, Tensor3, VectorJet};
use crate::error::{check_dim, GeometryError, Result};
use crate::jet::Jet;

/// Christoffel symbols `Γ^k_ij` of a symmetric connection at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionCoeffs {
    pub gamma: Tensor3,
}

impl ConnectionCoeffs {
    pub fn dim(&self) -> usize {
        self.gamma.dim()
    }

    /// `Γ^k_ij`.
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.gamma[(k, i, j)]
    }
}

/// A symmetric pseudoconnection at a point: coefficients `Γ̃^k_ij` together
/// with the principal homomorphism `P^k_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pseudoconnection {
    pub coeffs: Tensor3,
    pub principal: DMatrix<f64>,
}

impl Pseudoconnection {
    pub fn dim(&self) -> usize {
        self.coeffs.dim()
    }

    /// A connection is the pseudoconnection with identity principal part.
    pub fn from_connection(c: &ConnectionCoeffs) -> Self {
        let n = c.dim();
        Pseudoconnection { coeffs: c.gamma.clone(), principal: DMatrix::identity(n, n) }
    }
}

fn koszul_coeffs(ginv: &DMatrix<f64>, n: usize, d: impl Fn(usize, usize, usize) -> f64) -> Tensor3 {
    // d(k, i, j) = ∂_k T_ij
    let mut lowered = Tensor3::zeros(n); // (l, i, j) -> ½(∂_i T_jl + ∂_j T_il − ∂_l T_ij)
    for l in 0..n {
        for i in 0..n {
            for j in i..n {
                let v = 0.5 * (d(i, j, l) + d(j, i, l) - d(l, i, j));
                lowered[(l, i, j)] = v;
                lowered[(l, j, i)] = v;
            }
        }
    }
    lowered.apply_first(ginv)
}

/// Levi-Civita coefficients from the Koszul formula.
pub fn levi_civita_coeffs(m: &MetricJet) -> Result<ConnectionCoeffs> {
    if m.order() < 1 {
        return Err(GeometryError::InsufficientOrder { needed: 1, available: m.order() });
    }
    let ginv = metric_inverse(m)?;
    Ok(ConnectionCoeffs { gamma: koszul_coeffs(&ginv, m.dim(), |k, i, j| m.d1(k, i, j)) })
}

/// The pseudoconnection induced by the symmetric tensor `s` through the
/// Koszul-shaped formula, with principal part `P = g⁻¹ s`.
pub fn pseudoconnection_coeffs(m: &MetricJet, s: &Sym2Jet) -> Result<Pseudoconnection> {
    check_dim(m.dim(), s.dim())?;
    let ginv = metric_inverse(m)?;
    let coeffs = koszul_coeffs(&ginv, m.dim(), |k, i, j| s.d1(k, i, j));
    let principal = &ginv * s.values();
    Ok(Pseudoconnection { coeffs, principal })
}

/// `(∇_X Y)^k = X^i ∂_i Y^k + Γ^k_ij X^i Y^j`.
pub fn apply_connection(c: &ConnectionCoeffs, x: &VectorJet, y: &VectorJet) -> Result<Vec<f64>> {
    apply_pseudoconnection(&Pseudoconnection::from_connection(c), x, y)
}

/// `X(Y)^j = X^i ∂_i Y^j`, the plain directional derivative of `Y`.
pub fn derivative_along(x: &VectorJet, y: &VectorJet) -> Result<Vec<f64>> {
    check_dim(x.dim(), y.dim())?;
    let n = x.dim();
    Ok((0..n).map(|j| (0..n).map(|i| x.value(i) * y.partial(i, j)).sum()).collect())
}

/// `(Q_X Y)^k = P^k_j X^i ∂_i Y^j + Γ̃^k_ij X^i Y^j`.
pub fn apply_pseudoconnection(q: &Pseudoconnection, x: &VectorJet, y: &VectorJet) -> Result<Vec<f64>> {
    check_dim(q.dim(), x.dim())?;
    check_dim(q.dim(), y.dim())?;
    let dy = derivative_along(x, y)?;
    let transport = &q.principal * nalgebra::DVector::from_vec(dy);
    let quad = q.coeffs.contract(&x.values(), &y.values());
    Ok(transport.iter().zip(quad).map(|(a, b)| a + b).collect())
}

/// `(∇_i S)_jl = ∂_i S_jl − Γ^m_ij S_ml − Γ^m_il S_jm`, stored at `(i, j, l)`.
pub fn covariant_derivative_sym2(c: &ConnectionCoeffs, s: &Sym2Jet) -> Result<Tensor3> {
    check_dim(c.dim(), s.dim())?;
    let n = c.dim();
    Ok(Tensor3::from_fn(n, |i, j, l| {
        let mut v = s.d1(i, j, l);
        for m in 0..n {
            v -= c.get(m, i, j) * s.value(m, l) + c.get(m, i, l) * s.value(j, m);
        }
        v
    }))
}

/// Christoffel symbols as jets one order below the metric jet, stored
/// row-major at `(k * n + i) * n + j`.
pub(crate) fn christoffel_jets(m: &MetricJet) -> Result<Vec<Jet>> {
    let order = m.order();
    if order < 1 {
        return Err(GeometryError::InsufficientOrder { needed: 1, available: order });
    }
    let n = m.dim();
    let comps = m.components();
    let lowered_order: Vec<Jet> = comps.iter().map(|c| c.truncate(order - 1)).collect();
    let ginv = inverse_jets(n, &lowered_order)?;
    // dg[(k * n + i) * n + j] = ∂_k g_ij
    let mut dg = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for ij in 0..n * n {
            dg.push(comps[ij].partial(k));
        }
    }
    let d = |k: usize, i: usize, j: usize| &dg[(k * n + i) * n + j];
    let mut lowered = Vec::with_capacity(n * n * n);
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                lowered.push((d(i, j, l) + d(j, i, l) - d(l, i, j)) * 0.5);
            }
        }
    }
    let mut gamma = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut acc = &ginv[k * n] * &lowered[i * n + j];
                for l in 1..n {
                    acc += &ginv[k * n + l] * &lowered[(l * n + i) * n + j];
                }
                gamma.push(acc);
            }
        }
    }
    Ok(gamma)
}
