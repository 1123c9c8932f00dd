//! Built-in metrics and their charts.

use std::f64::consts::PI;
use std::fmt;

use crate::chart::{Chart, MetricField, Sym2Field};
use crate::error::{GeometryError, Result};
use crate::jet::Jet;

fn diagonal(n: usize, like: &Jet, diag: Vec<Jet>) -> Vec<Jet> {
    let mut comps = vec![like.lift(0.0); n * n];
    for (i, d) in diag.into_iter().enumerate() {
        comps[i * n + i] = d;
    }
    comps
}

/// Unit round sphere `S^n` in hyperspherical coordinates `(ψ_1, …, ψ_{n−1}, φ)`:
/// `g = dψ_1² + sin²ψ_1 dψ_2² + … + (Π sin²ψ_i) dφ²`.
pub fn sphere_metric(n: usize) -> MetricField {
    MetricField::analytic(n, move |x: &[Jet]| {
        let mut diag = Vec::with_capacity(n);
        let mut factor = x[0].lift(1.0);
        for i in 0..n {
            diag.push(factor.clone());
            if i + 1 < n {
                factor = &factor * &x[i].sin().powi(2);
            }
        }
        diagonal(n, &x[0], diag)
    })
}

/// Hyperbolic space `H^n` in the upper half-space model: `g = δ / (x_n)²`.
pub fn hyperbolic_metric(n: usize) -> MetricField {
    MetricField::analytic(n, move |x: &[Jet]| {
        let w = x[n - 1].powi(-2);
        diagonal(n, &x[0], vec![w; n])
    })
}

/// The flat metric `δ`.
pub fn flat_metric(n: usize) -> MetricField {
    MetricField::analytic(n, move |x: &[Jet]| diagonal(n, &x[0], vec![x[0].lift(1.0); n]))
}

/// Conformally flat metric `e^{2u} δ`.
pub fn conformal_metric<F>(n: usize, u: F) -> MetricField
where
    F: Fn(&[Jet]) -> Jet + Send + Sync + 'static,
{
    MetricField::analytic(n, move |x: &[Jet]| {
        let w = (u(x) * 2.0).exp();
        diagonal(n, &x[0], vec![w; n])
    })
}

/// Block metric placed on coordinates `offset..offset + block.dim()` of a
/// `total`-dimensional chart, zero elsewhere.
pub fn embed_block(block: &MetricField, offset: usize, total: usize) -> Result<Sym2Field> {
    let d = block.dim();
    if offset + d > total {
        return Err(GeometryError::InvalidArgument(format!(
            "block of dimension {d} at offset {offset} does not fit in dimension {total}"
        )));
    }
    let block = block
        .as_sym2()
        .ok_or_else(|| GeometryError::InvalidArgument("only analytic blocks can be embedded".into()))?;
    Ok(Sym2Field::new(total, move |x: &[Jet]| {
        let local = block.eval_jets(&x[offset..offset + d]);
        let mut comps = vec![x[0].lift(0.0); total * total];
        for i in 0..d {
            for j in 0..d {
                comps[(offset + i) * total + offset + j] = local[i * d + j].clone();
            }
        }
        comps
    }))
}

/// Block-diagonal product metric.
pub fn product_metric(blocks: &[MetricField]) -> Result<MetricField> {
    let total: usize = blocks.iter().map(MetricField::dim).sum();
    let mut embedded = Vec::with_capacity(blocks.len());
    let mut offset = 0;
    for b in blocks {
        embedded.push(embed_block(b, offset, total)?);
        offset += b.dim();
    }
    Ok(MetricField::analytic(total, move |x: &[Jet]| {
        let mut acc = vec![x[0].lift(0.0); total * total];
        for e in &embedded {
            for (a, c) in acc.iter_mut().zip(e.eval_jets(x)) {
                *a += c;
            }
        }
        acc
    }))
}

/// Einstein manifolds with a closed-form chart: `Ric = κ g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EinsteinBase {
    Sphere(usize),
    Hyperbolic(usize),
    FlatTorus(usize),
}

impl EinsteinBase {
    pub fn dim(&self) -> usize {
        match *self {
            EinsteinBase::Sphere(n) | EinsteinBase::Hyperbolic(n) | EinsteinBase::FlatTorus(n) => n,
        }
    }

    /// Einstein constant of the unit-normalized metric.
    pub fn kappa(&self) -> f64 {
        match *self {
            EinsteinBase::Sphere(n) => (n - 1) as f64,
            EinsteinBase::Hyperbolic(n) => -((n - 1) as f64),
            EinsteinBase::FlatTorus(_) => 0.0,
        }
    }

    pub fn metric(&self) -> MetricField {
        match *self {
            EinsteinBase::Sphere(n) => sphere_metric(n),
            EinsteinBase::Hyperbolic(n) => hyperbolic_metric(n),
            EinsteinBase::FlatTorus(n) => flat_metric(n),
        }
    }

    /// Chart with its sample box. The hyperbolic box keeps the height
    /// coordinate in `(0.5, 2)`.
    pub fn chart(&self) -> Chart {
        let chart = match *self {
            EinsteinBase::Sphere(n) => {
                let mut bounds = vec![(0.0, PI); n - 1];
                bounds.push((0.0, 2.0 * PI));
                Chart::open_box(self.to_string(), bounds)
            }
            EinsteinBase::Hyperbolic(n) => {
                let mut bounds = vec![(-1.0, 1.0); n - 1];
                bounds.push((0.5, 2.0));
                Chart::new(self.to_string(), bounds, move |x: &[f64]| x.len() == n && x[n - 1] > 0.0)
            }
            EinsteinBase::FlatTorus(n) => Chart::open_box(self.to_string(), vec![(0.0, 1.0); n]),
        };
        chart.expect("built-in charts are non-empty")
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            EinsteinBase::Sphere(n) | EinsteinBase::Hyperbolic(n) => n >= 2,
            EinsteinBase::FlatTorus(n) => n >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(GeometryError::InvalidArgument(format!("{self} needs a larger dimension")))
        }
    }
}

impl fmt::Display for EinsteinBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EinsteinBase::Sphere(n) => write!(f, "sphere{n}"),
            EinsteinBase::Hyperbolic(n) => write!(f, "hyperbolic{n}"),
            EinsteinBase::FlatTorus(n) => write!(f, "flat-torus{n}"),
        }
    }
}
