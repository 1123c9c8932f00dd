use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;

use super::{MetricJet, ScalarJet, VectorJet};
use crate::error::{check_dim, GeometryError, Result};
use crate::jet::Jet;

/// Pivot tolerance of the symmetric factorization, relative to the largest
/// diagonal entry.
pub const PIVOT_TOLERANCE: f64 = 1e-12;

/// Dense `n × n × n` array. For connection coefficients the index order is
/// `(k, i, j)` for `Γ^k_ij`, with `i` the differentiation direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(n: usize) -> Self {
        Tensor3 { n, data: vec![0.0; n * n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut t = Tensor3::zeros(n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    t[(a, b, c)] = f(a, b, c);
                }
            }
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, s: f64) -> Tensor3 {
        Tensor3 { n: self.n, data: self.data.iter().map(|v| s * v).collect() }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Tensor3, b: f64) -> Tensor3 {
        assert_eq!(self.n, other.n, "tensor dimension mismatch");
        Tensor3 { n: self.n, data: self.data.iter().zip(&other.data).map(|(x, y)| a * x + b * y).collect() }
    }

    /// Largest componentwise difference.
    pub fn max_abs_diff(&self, other: &Tensor3) -> f64 {
        self.combine(1.0, other, -1.0).max_abs()
    }

    /// `P^k_l T^l_ij`: a matrix acting on the first index.
    pub fn apply_first(&self, p: &DMatrix<f64>) -> Tensor3 {
        let n = self.n;
        Tensor3::from_fn(n, |k, i, j| (0..n).map(|l| p[(k, l)] * self[(l, i, j)]).sum())
    }

    /// `T^k_ij X^i Y^j`.
    pub fn contract(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|k| {
                let mut acc = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        acc += self[(k, i, j)] * x[i] * y[j];
                    }
                }
                acc
            })
            .collect()
    }
}

impl Index<(usize, usize, usize)> for Tensor3 {
    type Output = f64;
    fn index(&self, (a, b, c): (usize, usize, usize)) -> &f64 {
        &self.data[(a * self.n + b) * self.n + c]
    }
}

impl IndexMut<(usize, usize, usize)> for Tensor3 {
    fn index_mut(&mut self, (a, b, c): (usize, usize, usize)) -> &mut f64 {
        &mut self.data[(a * self.n + b) * self.n + c]
    }
}

/// Cholesky factor `L` with `g = L Lᵀ`, certifying positive definiteness.
pub fn symmetric_factor(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = g.nrows();
    check_dim(n, g.ncols())?;
    let max_diag = (0..n).map(|i| g[(i, i)].abs()).fold(0.0, f64::max);
    let tolerance = PIVOT_TOLERANCE * max_diag;
    let mut l = DMatrix::zeros(n, n);
    for j in 0..n {
        let pivot = g[(j, j)] - (0..j).map(|k| l[(j, k)] * l[(j, k)]).sum::<f64>();
        if !(pivot > tolerance) {
            return Err(GeometryError::DegenerateMetric { index: j, pivot, tolerance });
        }
        let d = pivot.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let s = g[(i, j)] - (0..j).map(|k| l[(i, k)] * l[(j, k)]).sum::<f64>();
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

/// Inverse of a symmetric positive-definite matrix via its Cholesky factor.
pub fn invert_spd(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let l = symmetric_factor(g)?;
    let n = g.nrows();
    // L⁻¹ by forward substitution, then g⁻¹ = L⁻ᵀ L⁻¹
    let mut linv = DMatrix::zeros(n, n);
    for c in 0..n {
        for r in c..n {
            let rhs = if r == c { 1.0 } else { 0.0 };
            let s: f64 = (c..r).map(|k| l[(r, k)] * linv[(k, c)]).sum();
            linv[(r, c)] = (rhs - s) / l[(r, r)];
        }
    }
    let inv = linv.transpose() * &linv;
    Ok((&inv + inv.transpose()) * 0.5)
}

/// `g^{kl}` at the point.
pub fn metric_inverse(m: &MetricJet) -> Result<DMatrix<f64>> {
    invert_spd(&m.g())
}

/// `P^k_j = g^{kl} S_lj`.
pub fn raise_index(m: &MetricJet, s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_dim(m.dim(), s.nrows())?;
    check_dim(m.dim(), s.ncols())?;
    Ok(metric_inverse(m)? * s)
}

/// `S_lj = g_lk P^k_j`.
pub fn lower_index(m: &MetricJet, p: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_dim(m.dim(), p.nrows())?;
    check_dim(m.dim(), p.ncols())?;
    Ok(m.g() * p)
}

/// `[X, Y]^k = X^i ∂_i Y^k − Y^i ∂_i X^k`.
pub fn lie_bracket(x: &VectorJet, y: &VectorJet) -> Result<Vec<f64>> {
    check_dim(x.dim(), y.dim())?;
    let n = x.dim();
    Ok((0..n)
        .map(|k| {
            let xy: f64 = (0..n).map(|i| x.value(i) * y.partial(i, k)).sum();
            let yx: f64 = (0..n).map(|i| y.value(i) * x.partial(i, k)).sum();
            xy - yx
        })
        .collect())
}

/// `X(f) = X^i ∂_i f`.
pub fn directional_derivative(x: &VectorJet, f: &ScalarJet) -> Result<f64> {
    check_dim(x.dim(), f.grad.len())?;
    Ok((0..x.dim()).map(|i| x.value(i) * f.grad[i]).sum())
}

fn jet_matmul(n: usize, a: &[Jet], b: &[Jet]) -> Vec<Jet> {
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = &a[i * n] * &b[j];
            for l in 1..n {
                acc += &a[i * n + l] * &b[l * n + j];
            }
            out.push(acc);
        }
    }
    out
}

fn const_matmul(n: usize, a: &DMatrix<f64>, b: &[Jet]) -> Vec<Jet> {
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = &b[j] * a[(i, 0)];
            for l in 1..n {
                acc += &b[l * n + j] * a[(i, l)];
            }
            out.push(acc);
        }
    }
    out
}

/// Inverse of a matrix of jets, exact in truncated Taylor arithmetic.
///
/// With `G = G₀ + E` (`E` carrying only derivative parts) and `A = G₀⁻¹`,
/// `G⁻¹ = Σ_{m=0}^{r} (−A E)^m A`, which terminates because `E` is nilpotent
/// to jet order `r`.
pub fn inverse_jets(n: usize, comps: &[Jet]) -> Result<Vec<Jet>> {
    check_dim(n * n, comps.len())?;
    let order = comps.iter().map(Jet::order).min().unwrap_or(0);
    let g0 = DMatrix::from_fn(n, n, |i, j| comps[i * n + j].value());
    let a = invert_spd(&g0)?;
    let nvars = comps[0].nvars();
    let a_jets: Vec<Jet> = (0..n * n).map(|ij| Jet::constant(nvars, order, a[(ij / n, ij % n)])).collect();
    let e: Vec<Jet> = comps.iter().map(|c| c.truncate(order) - c.value()).collect();
    let mut term = a_jets.clone();
    let mut inv = a_jets;
    for _ in 0..order {
        let et = jet_matmul(n, &e, &term);
        term = const_matmul(n, &a, &et).into_iter().map(|j| -j).collect();
        for (acc, t) in inv.iter_mut().zip(&term) {
            *acc += t;
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{Point, ScalarField, VectorField};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn diag_metric(entries: &[f64]) -> MetricJet {
        let n = entries.len();
        let comps = (0..n * n)
            .map(|ij| Jet::constant(n, 1, if ij / n == ij % n { entries[ij / n] } else { 0.0 }))
            .collect();
        MetricJet::from_components(n, comps).unwrap()
    }

    #[test]
    fn inverse_examples() {
        let id = metric_inverse(&diag_metric(&[1.0, 1.0])).unwrap();
        assert_eq!(id, DMatrix::identity(2, 2));

        let s = (PI / 2.0).sin();
        let inv = metric_inverse(&diag_metric(&[1.0, s * s])).unwrap();
        assert_relative_eq!(inv, DMatrix::identity(2, 2), epsilon = 1e-15);

        // direct 2×2 inversion oracle: diag(1, 1/4)^{-1} = diag(1, 4)
        let s = (PI / 6.0).sin();
        let inv = metric_inverse(&diag_metric(&[1.0, s * s])).unwrap();
        let oracle = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0 / (s * s)]);
        assert_relative_eq!(inv, oracle, max_relative = 1e-12);
        assert_relative_eq!(inv[(1, 1)], 4.0, max_relative = 1e-12);
    }

    #[test]
    fn degenerate_metric_is_rejected() {
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(matches!(invert_spd(&g), Err(GeometryError::DegenerateMetric { index: 1, .. })));
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -2.0]);
        assert!(invert_spd(&g).is_err());
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1e-13]);
        assert!(invert_spd(&g).is_err());
    }

    #[test]
    fn raise_index_examples() {
        let m = diag_metric(&[1.0, 4.0]);
        assert_relative_eq!(raise_index(&m, &m.g()).unwrap(), DMatrix::identity(2, 2));
        assert_eq!(raise_index(&m, &DMatrix::zeros(2, 2)).unwrap(), DMatrix::zeros(2, 2));
        let s = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 2.0]);
        let p = raise_index(&m, &s).unwrap();
        assert_relative_eq!(p, DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.5]), epsilon = 1e-15);
    }

    #[test]
    fn bracket_examples() {
        let p = Point::new(vec![0.3, -1.2]);
        let d1 = VectorField::coordinate(2, 0).eval(&p).unwrap();
        let d2 = VectorField::coordinate(2, 1).eval(&p).unwrap();
        assert_eq!(lie_bracket(&d1, &d2).unwrap(), vec![0.0, 0.0]);

        let x1_d2 = VectorField::new(2, |x: &[Jet]| vec![x[0].lift(0.0), x[0].clone()]).eval(&p).unwrap();
        assert_eq!(lie_bracket(&d1, &x1_d2).unwrap(), vec![0.0, 1.0]);
    }

    #[test]
    fn bracket_matches_flow_commutator() {
        // X = (x², −x¹), Y = (x¹, x²) at (1, 2). Finite-difference oracle:
        // [X,Y] = (DY)X − (DX)Y with Jacobians from central differences.
        let x = VectorField::new(2, |v: &[Jet]| vec![v[1].clone(), -&v[0]]);
        let y = VectorField::new(2, |v: &[Jet]| vec![v[0].clone(), v[1].clone()]);
        let p = Point::new(vec![1.0, 2.0]);
        let exact = lie_bracket(&x.eval(&p).unwrap(), &y.eval(&p).unwrap()).unwrap();

        let h = 1e-4;
        let jac = |f: &VectorField| {
            let mut j = [[0.0; 2]; 2];
            for i in 0..2 {
                let a = f.values(&p.shifted(i, h)).unwrap();
                let b = f.values(&p.shifted(i, -h)).unwrap();
                for k in 0..2 {
                    j[k][i] = (a[k] - b[k]) / (2.0 * h);
                }
            }
            j
        };
        let (jx, jy) = (jac(&x), jac(&y));
        let (xv, yv) = (x.values(&p).unwrap(), y.values(&p).unwrap());
        for k in 0..2 {
            let fd: f64 = (0..2).map(|i| jy[k][i] * xv[i] - jx[k][i] * yv[i]).sum();
            assert_relative_eq!(exact[k], fd, epsilon = 1e-7);
        }
        // linear fields: [X, Y] = 0 here since Y is the Euler field and X is linear
        assert_relative_eq!(exact[0], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn directional_derivative_examples() {
        let p = Point::new(vec![1.0, 1.0]);
        let d1 = VectorField::coordinate(2, 0).eval(&p).unwrap();
        let x1 = ScalarField::coordinate(2, 0).eval(&p).unwrap();
        assert_eq!(directional_derivative(&d1, &x1).unwrap(), 1.0);

        let c = ScalarField::constant(2, 3.5).eval(&p).unwrap();
        let any = VectorField::constant(vec![0.3, -7.0]).eval(&p).unwrap();
        assert_eq!(directional_derivative(&any, &c).unwrap(), 0.0);

        // X = (1, 2), f = (x¹)² x²: X(f) = 2 x¹ x² + 2 (x¹)² = 4 at (1, 1)
        let f = ScalarField::new(2, |x: &[Jet]| &(&x[0] * &x[0]) * &x[1]).eval(&p).unwrap();
        let x = VectorField::constant(vec![1.0, 2.0]).eval(&p).unwrap();
        assert_relative_eq!(directional_derivative(&x, &f).unwrap(), 4.0, epsilon = 1e-15);
    }

    #[test]
    fn jet_inverse_matches_differentiated_inverse() {
        // g = [[1 + x², x y], [x y, 2 + y²]]
        let v = Jet::seed(&[0.3, -0.7], 3);
        let one = v[0].lift(1.0);
        let comps = vec![
            &one + &(&v[0] * &v[0]),
            &v[0] * &v[1],
            &v[0] * &v[1],
            &(&one * 2.0) + &(&v[1] * &v[1]),
        ];
        let inv = inverse_jets(2, &comps).unwrap();
        // closed-form inverse via adjugate in jet arithmetic
        let det = &(&comps[0] * &comps[3]) - &(&comps[1] * &comps[2]);
        let adj = [comps[3].clone(), -&comps[1], -&comps[2], comps[0].clone()];
        for (a, b) in inv.iter().zip(adj.iter().map(|c| c / &det)) {
            assert_relative_eq!(a.value(), b.value(), epsilon = 1e-14);
            for i in 0..2 {
                assert_relative_eq!(a.d1(i), b.d1(i), epsilon = 1e-13);
                for j in 0..2 {
                    assert_relative_eq!(a.d2(i, j), b.d2(i, j), epsilon = 1e-12);
                    for k in 0..2 {
                        assert_relative_eq!(a.d3(i, j, k), b.d3(i, j, k), epsilon = 1e-11);
                    }
                }
            }
        }
    }

    fn spd_from(entries: [f64; 6]) -> DMatrix<f64> {
        let b = DMatrix::from_row_slice(3, 2, &entries);
        &b * b.transpose() + DMatrix::identity(3, 3) * 0.5
    }

    proptest! {
        #[test]
        fn inverse_round_trip(e in prop::array::uniform6(-2.0f64..2.0)) {
            let g = spd_from(e);
            let inv = invert_spd(&g).unwrap();
            let err = (&inv * &g - DMatrix::identity(3, 3)).amax();
            prop_assert!(err <= 1e-12 * g.amax().max(1.0) * inv.amax().max(1.0));
        }

        #[test]
        fn raise_then_lower_returns_input(e in prop::array::uniform6(-2.0f64..2.0), s in prop::array::uniform9(-3.0f64..3.0)) {
            let g = spd_from(e);
            let comps = (0..9).map(|ij| Jet::constant(3, 1, g[(ij / 3, ij % 3)])).collect();
            let m = MetricJet::from_components(3, comps).unwrap();
            let s = DMatrix::from_row_slice(3, 3, &s);
            let s = (&s + s.transpose()) * 0.5;
            let back = lower_index(&m, &raise_index(&m, &s).unwrap()).unwrap();
            let err = (&back - &s).amax();
            prop_assert!(err <= 1e-12 * s.amax().max(1.0) * g.amax().max(1.0) * invert_spd(&g).unwrap().amax().max(1.0));
        }

        #[test]
        fn bracket_is_antisymmetric(seed in 0u64..1000, x in -2.0f64..2.0, y in -2.0f64..2.0) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let p = Point::new(vec![x, y]);
            let a = VectorField::random_trig(2, &mut rng).eval(&p).unwrap();
            let b = VectorField::random_trig(2, &mut rng).eval(&p).unwrap();
            let ab = lie_bracket(&a, &b).unwrap();
            let ba = lie_bracket(&b, &a).unwrap();
            for k in 0..2 {
                prop_assert_eq!(ab[k] + ba[k], 0.0);
            }
        }
    }
}
