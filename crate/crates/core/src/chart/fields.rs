use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;

use super::Point;
use crate::error::{check_dim, GeometryError, Result};
use crate::jet::{Jet, MAX_ORDER};

/// Relative tolerance used when checking that tensor values are symmetric.
const SYMMETRY_TOLERANCE: f64 = 1e-10;

fn check_symmetric(n: usize, comps: &[Jet]) -> Result<()> {
    let scale = comps.iter().map(|c| c.value().abs()).fold(1.0, f64::max);
    for i in 0..n {
        for j in (i + 1)..n {
            let gap = (comps[i * n + j].value() - comps[j * n + i].value()).abs();
            if gap > SYMMETRY_TOLERANCE * scale {
                return Err(GeometryError::Asymmetric { i, j, gap });
            }
        }
    }
    Ok(())
}

fn check_shape(n: usize, comps: &[Jet]) -> Result<()> {
    check_dim(n * n, comps.len())?;
    for c in comps {
        check_dim(n, c.nvars())?;
    }
    Ok(())
}

/// Value and gradient of a scalar function at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarJet {
    pub value: f64,
    pub grad: Vec<f64>,
}

impl From<&Jet> for ScalarJet {
    fn from(jet: &Jet) -> Self {
        ScalarJet { value: jet.value(), grad: jet.gradient().to_vec() }
    }
}

/// Components `X^k` of a vector field at a point with their first partials.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorJet {
    comps: Vec<Jet>,
}

impl VectorJet {
    pub fn new(comps: Vec<Jet>) -> Result<Self> {
        let n = comps.len();
        for c in &comps {
            check_dim(n, c.nvars())?;
            if c.order() < 1 {
                return Err(GeometryError::InsufficientOrder { needed: 1, available: c.order() });
            }
        }
        Ok(VectorJet { comps })
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn value(&self, k: usize) -> f64 {
        self.comps[k].value()
    }

    pub fn values(&self) -> Vec<f64> {
        self.comps.iter().map(Jet::value).collect()
    }

    /// `∂_i X^k`.
    pub fn partial(&self, i: usize, k: usize) -> f64 {
        self.comps[k].d1(i)
    }

    pub fn components(&self) -> &[Jet] {
        &self.comps
    }
}

/// Symmetric 2-tensor components `S_ij` at a point with first partials
/// `∂_k S_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sym2Jet {
    n: usize,
    comps: Vec<Jet>,
}

impl Sym2Jet {
    /// Row-major `n × n` components, each of order at least 1.
    pub fn from_components(n: usize, comps: Vec<Jet>) -> Result<Self> {
        check_shape(n, &comps)?;
        if let Some(low) = comps.iter().map(Jet::order).min().filter(|&o| o < 1) {
            return Err(GeometryError::InsufficientOrder { needed: 1, available: low });
        }
        check_symmetric(n, &comps)?;
        let comps = comps.into_iter().map(|c| c.truncate(1)).collect();
        Ok(Sym2Jet { n, comps })
    }

    /// Builds from plain arrays: `values` row-major, `d1[(i * n + j) * n + k] = ∂_k S_ij`.
    pub fn from_arrays(values: &DMatrix<f64>, d1: &[f64]) -> Result<Self> {
        let n = values.nrows();
        check_dim(n, values.ncols())?;
        check_dim(n * n * n, d1.len())?;
        let comps = (0..n * n)
            .map(|ij| {
                Jet::from_parts(values[(ij / n, ij % n)], d1[ij * n..(ij + 1) * n].to_vec(), None, None)
            })
            .collect();
        Sym2Jet::from_components(n, comps)
    }

    pub fn zero(n: usize) -> Self {
        Sym2Jet { n, comps: vec![Jet::constant(n, 1, 0.0); n * n] }
    }

    /// The metric itself viewed as a symmetric tensor.
    pub fn from_metric(m: &MetricJet) -> Self {
        Sym2Jet { n: m.dim(), comps: m.components().iter().map(|c| c.truncate(1)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.comps[i * self.n + j].value()
    }

    pub fn values(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.value(i, j))
    }

    /// `∂_k S_ij`.
    pub fn d1(&self, k: usize, i: usize, j: usize) -> f64 {
        self.comps[i * self.n + j].d1(k)
    }

    pub fn component(&self, i: usize, j: usize) -> &Jet {
        &self.comps[i * self.n + j]
    }

    pub fn scaled(&self, s: f64) -> Sym2Jet {
        Sym2Jet { n: self.n, comps: self.comps.iter().map(|c| c * s).collect() }
    }

    /// `S(X, Y)` as a scalar jet (value and gradient) given vector jets.
    pub fn contract(&self, x: &VectorJet, y: &VectorJet) -> Result<ScalarJet> {
        check_dim(self.n, x.dim())?;
        check_dim(self.n, y.dim())?;
        let n = self.n;
        let mut acc = Jet::constant(n, 1, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += &(&(&self.comps[i * n + j] * &x.comps[i]) * &y.comps[j]);
            }
        }
        Ok(ScalarJet::from(&acc))
    }
}

/// Metric components with exact partial derivatives up to `order()` (at most 3).
#[derive(Debug, Clone, PartialEq)]
pub struct MetricJet {
    n: usize,
    comps: Vec<Jet>,
}

impl MetricJet {
    /// Row-major `n × n` components. Values must be symmetric; positive
    /// definiteness is checked where the inverse is needed.
    pub fn from_components(n: usize, comps: Vec<Jet>) -> Result<Self> {
        check_shape(n, &comps)?;
        check_symmetric(n, &comps)?;
        let order = comps.iter().map(Jet::order).min().unwrap_or(0);
        let comps = comps.into_iter().map(|c| c.truncate(order)).collect();
        Ok(MetricJet { n, comps })
    }

    /// Builds from plain arrays in component-major layout:
    /// `d1[(i*n + j)*n + k] = ∂_k g_ij`, `d2[((i*n + j)*n + k)*n + l] = ∂_k ∂_l g_ij`,
    /// and `d3` likewise with one more trailing index.
    pub fn from_arrays(g: &DMatrix<f64>, d1: &[f64], d2: Option<&[f64]>, d3: Option<&[f64]>) -> Result<Self> {
        let n = g.nrows();
        check_dim(n, g.ncols())?;
        check_dim(n.pow(3), d1.len())?;
        if let Some(d2) = d2 {
            check_dim(n.pow(4), d2.len())?;
        }
        if let Some(d3) = d3 {
            if d2.is_none() {
                return Err(GeometryError::InvalidArgument("third derivatives without second".into()));
            }
            check_dim(n.pow(5), d3.len())?;
        }
        let comps = (0..n * n)
            .map(|ij| {
                Jet::from_parts(
                    g[(ij / n, ij % n)],
                    d1[ij * n..(ij + 1) * n].to_vec(),
                    d2.map(|d| d[ij * n * n..(ij + 1) * n * n].to_vec()),
                    d3.map(|d| d[ij * n.pow(3)..(ij + 1) * n.pow(3)].to_vec()),
                )
            })
            .collect();
        MetricJet::from_components(n, comps)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Highest derivative order carried.
    pub fn order(&self) -> usize {
        self.comps.iter().map(Jet::order).min().unwrap_or(0)
    }

    pub fn g(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.comps[i * self.n + j].value())
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.comps[i * self.n + j].value()
    }

    /// `∂_k g_ij`.
    pub fn d1(&self, k: usize, i: usize, j: usize) -> f64 {
        self.comps[i * self.n + j].d1(k)
    }

    /// `∂_k ∂_l g_ij`.
    pub fn d2(&self, k: usize, l: usize, i: usize, j: usize) -> f64 {
        self.comps[i * self.n + j].d2(k, l)
    }

    /// `∂_k ∂_l ∂_m g_ij`.
    pub fn d3(&self, k: usize, l: usize, m: usize, i: usize, j: usize) -> f64 {
        self.comps[i * self.n + j].d3(k, l, m)
    }

    pub fn component(&self, i: usize, j: usize) -> &Jet {
        &self.comps[i * self.n + j]
    }

    pub fn components(&self) -> &[Jet] {
        &self.comps
    }

    pub fn truncate(&self, order: usize) -> MetricJet {
        MetricJet { n: self.n, comps: self.comps.iter().map(|c| c.truncate(order)).collect() }
    }

    pub fn scaled(&self, c: f64) -> MetricJet {
        MetricJet { n: self.n, comps: self.comps.iter().map(|j| j * c).collect() }
    }

    /// `g(X, Y)` for plain vectors.
    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += self.value(i, j) * x[i] * y[j];
            }
        }
        acc
    }
}

type JetMap = dyn Fn(&[Jet]) -> Vec<Jet> + Send + Sync;
type JetScalarMap = dyn Fn(&[Jet]) -> Jet + Send + Sync;
type SuppliedMetric = dyn Fn(&Point) -> Result<MetricJet> + Send + Sync;

/// A smooth scalar function on the chart, written in jet arithmetic.
#[derive(Clone)]
pub struct ScalarField {
    dim: usize,
    f: Arc<JetScalarMap>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField").field("dim", &self.dim).finish_non_exhaustive()
    }
}

impl ScalarField {
    pub fn new<F>(dim: usize, f: F) -> Self
    where
        F: Fn(&[Jet]) -> Jet + Send + Sync + 'static,
    {
        ScalarField { dim, f: Arc::new(f) }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        ScalarField::new(dim, move |x: &[Jet]| x[0].lift(c))
    }

    pub fn coordinate(dim: usize, i: usize) -> Self {
        ScalarField::new(dim, move |x: &[Jet]| x[i].clone())
    }

    pub fn random_trig<R: Rng>(dim: usize, rng: &mut R) -> Self {
        let poly = TrigPolynomial::random(dim, rng);
        ScalarField::new(dim, move |x: &[Jet]| poly.eval(x))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval_jets(&self, x: &[Jet]) -> Jet {
        (self.f)(x)
    }

    pub fn eval(&self, p: &Point) -> Result<ScalarJet> {
        check_dim(self.dim, p.dim())?;
        Ok(ScalarJet::from(&self.eval_jets(&Jet::seed(p.coords(), 1))))
    }
}

/// A smooth vector field `X = X^k ∂_k` on the chart.
#[derive(Clone)]
pub struct VectorField {
    dim: usize,
    f: Arc<JetMap>,
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VectorField").field("dim", &self.dim).finish_non_exhaustive()
    }
}

impl VectorField {
    pub fn new<F>(dim: usize, f: F) -> Self
    where
        F: Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static,
    {
        VectorField { dim, f: Arc::new(f) }
    }

    /// The coordinate field `∂_i`.
    pub fn coordinate(dim: usize, i: usize) -> Self {
        VectorField::new(dim, move |x: &[Jet]| {
            (0..dim).map(|k| x[0].lift(if k == i { 1.0 } else { 0.0 })).collect()
        })
    }

    pub fn constant(values: Vec<f64>) -> Self {
        let dim = values.len();
        VectorField::new(dim, move |x: &[Jet]| values.iter().map(|&v| x[0].lift(v)).collect())
    }

    /// Each component an independent random trigonometric polynomial.
    pub fn random_trig<R: Rng>(dim: usize, rng: &mut R) -> Self {
        let polys: Vec<TrigPolynomial> = (0..dim).map(|_| TrigPolynomial::random(dim, rng)).collect();
        VectorField::new(dim, move |x: &[Jet]| polys.iter().map(|p| p.eval(x)).collect())
    }

    /// The field `f·X`.
    pub fn scaled_by(&self, f: &ScalarField) -> VectorField {
        let (this, f) = (self.clone(), f.clone());
        VectorField::new(self.dim, move |x: &[Jet]| {
            let s = f.eval_jets(x);
            this.eval_jets(x).iter().map(|c| &s * c).collect()
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval_jets(&self, x: &[Jet]) -> Vec<Jet> {
        (self.f)(x)
    }

    pub fn eval(&self, p: &Point) -> Result<VectorJet> {
        check_dim(self.dim, p.dim())?;
        VectorJet::new(self.eval_jets(&Jet::seed(p.coords(), 1)))
    }

    /// Plain component values.
    pub fn values(&self, p: &Point) -> Result<Vec<f64>> {
        check_dim(self.dim, p.dim())?;
        Ok(self.eval_jets(&Jet::seed(p.coords(), 0)).iter().map(Jet::value).collect())
    }
}

/// A symmetric 2-tensor field `S_ij`, written in jet arithmetic.
#[derive(Clone)]
pub struct Sym2Field {
    dim: usize,
    f: Arc<JetMap>,
}

impl fmt::Debug for Sym2Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Sym2Field").field("dim", &self.dim).finish_non_exhaustive()
    }
}

impl Sym2Field {
    /// `f` returns the `dim × dim` components in row-major order.
    pub fn new<F>(dim: usize, f: F) -> Self
    where
        F: Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static,
    {
        Sym2Field { dim, f: Arc::new(f) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval_jets(&self, x: &[Jet]) -> Vec<Jet> {
        (self.f)(x)
    }

    pub fn eval(&self, p: &Point) -> Result<Sym2Jet> {
        check_dim(self.dim, p.dim())?;
        Sym2Jet::from_components(self.dim, self.eval_jets(&Jet::seed(p.coords(), 1)))
    }
}

#[derive(Clone)]
enum MetricSource {
    Analytic(Arc<JetMap>),
    Supplied(Arc<SuppliedMetric>),
}

/// A Riemannian metric on a chart.
///
/// Analytic metrics are written in jet arithmetic and deliver exact jets up to
/// third order. Supplied metrics return a [`MetricJet`] of whatever order the
/// caller can provide.
#[derive(Clone)]
pub struct MetricField {
    dim: usize,
    source: MetricSource,
}

impl fmt::Debug for MetricField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.source {
            MetricSource::Analytic(_) => "analytic",
            MetricSource::Supplied(_) => "supplied",
        };
        f.debug_struct("MetricField").field("dim", &self.dim).field("source", &kind).finish()
    }
}

impl MetricField {
    pub fn analytic<F>(dim: usize, f: F) -> Self
    where
        F: Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static,
    {
        MetricField { dim, source: MetricSource::Analytic(Arc::new(f)) }
    }

    pub fn supplied<F>(dim: usize, f: F) -> Self
    where
        F: Fn(&Point) -> Result<MetricJet> + Send + Sync + 'static,
    {
        MetricField { dim, source: MetricSource::Supplied(Arc::new(f)) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Jet of the highest available order (3 for analytic metrics).
    pub fn jet(&self, p: &Point) -> Result<MetricJet> {
        self.jet_with_order(p, MAX_ORDER)
    }

    /// Jet truncated to at most `order`.
    pub fn jet_with_order(&self, p: &Point, order: usize) -> Result<MetricJet> {
        check_dim(self.dim, p.dim())?;
        match &self.source {
            MetricSource::Analytic(f) => {
                MetricJet::from_components(self.dim, f(&Jet::seed(p.coords(), order.min(MAX_ORDER))))
            }
            MetricSource::Supplied(f) => Ok(f(p)?.truncate(order)),
        }
    }

    /// Raw components in jet arithmetic; `None` for supplied metrics.
    pub fn eval_jets(&self, x: &[Jet]) -> Option<Vec<Jet>> {
        match &self.source {
            MetricSource::Analytic(f) => Some(f(x)),
            MetricSource::Supplied(_) => None,
        }
    }

    /// The metric viewed as a symmetric tensor field, when analytic.
    pub fn as_sym2(&self) -> Option<Sym2Field> {
        match &self.source {
            MetricSource::Analytic(f) => {
                let f = Arc::clone(f);
                Some(Sym2Field { dim: self.dim, f })
            }
            MetricSource::Supplied(_) => None,
        }
    }
}

/// `c + Σ (a cos(w·x) + b sin(w·x))` with integer frequency vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    pub constant: f64,
    pub terms: Vec<(Vec<i32>, f64, f64)>,
}

impl TrigPolynomial {
    pub const TERMS: usize = 6;
    pub const MAX_DEGREE: i32 = 3;

    /// Seeded coefficients in `[-1, 1]`; frequencies with total degree 1..=3.
    pub fn random<R: Rng>(dim: usize, rng: &mut R) -> Self {
        let constant = rng.gen_range(-1.0..=1.0);
        let terms = (0..Self::TERMS)
            .map(|_| {
                let freq = loop {
                    let w: Vec<i32> =
                        (0..dim).map(|_| rng.gen_range(-Self::MAX_DEGREE..=Self::MAX_DEGREE)).collect();
                    let deg: i32 = w.iter().map(|v| v.abs()).sum();
                    if (1..=Self::MAX_DEGREE).contains(&deg) {
                        break w;
                    }
                };
                (freq, rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
            })
            .collect();
        TrigPolynomial { constant, terms }
    }

    pub fn eval(&self, x: &[Jet]) -> Jet {
        let mut acc = x[0].lift(self.constant);
        for (w, a, b) in &self.terms {
            let mut phase = x[0].lift(0.0);
            for (xi, &wi) in x.iter().zip(w) {
                if wi != 0 {
                    phase += xi * f64::from(wi);
                }
            }
            acc += phase.cos() * *a + phase.sin() * *b;
        }
        acc
    }
}
