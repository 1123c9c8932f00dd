//! Coordinate charts, points, fields with exact derivative jets, and the small
//! amount of index algebra everything else is built on.

mod algebra;
mod fields;

pub use algebra::{
    directional_derivative, inverse_jets, invert_spd, lie_bracket, lower_index, metric_inverse,
    raise_index, symmetric_factor, Tensor3, PIVOT_TOLERANCE,
};
pub use fields::{
    MetricField, MetricJet, ScalarField, ScalarJet, Sym2Field, Sym2Jet, TrigPolynomial,
    VectorField, VectorJet,
};

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, GeometryError, Result};

/// A point given by its chart coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Copy of the point with coordinate `axis` shifted by `delta`.
    pub fn shifted(&self, axis: usize, delta: f64) -> Point {
        let mut coords = self.coords.clone();
        coords[axis] += delta;
        Point { coords }
    }
}

impl From<Vec<f64>> for Point {
    fn from(coords: Vec<f64>) -> Self {
        Point::new(coords)
    }
}

impl From<&[f64]> for Point {
    fn from(coords: &[f64]) -> Self {
        Point::new(coords.to_vec())
    }
}

/// Deterministic sampling of interior points: a lattice over the sample box
/// shrunk by `margin` on every side, followed by `random_count` seeded
/// uniform points from the same shrunk box.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePolicy {
    pub margin: f64,
    pub lattice: Vec<usize>,
    pub random_count: usize,
}

impl SamplePolicy {
    pub const DEFAULT_MARGIN: f64 = 0.1;
    pub const DEFAULT_RANDOM: usize = 8;

    /// Twelve lattice points plus eight random ones, for dimensions 1..=4.
    pub fn standard(dim: usize) -> Self {
        let lattice = match dim {
            1 => vec![12],
            2 => vec![3, 4],
            3 => vec![2, 2, 3],
            4 => vec![2, 2, 3, 1],
            n => {
                let mut v = vec![1; n];
                v[0] = 3;
                v[1] = 4;
                v
            }
        };
        SamplePolicy { margin: Self::DEFAULT_MARGIN, lattice, random_count: Self::DEFAULT_RANDOM }
    }
}

type DomainFn = dyn Fn(&[f64]) -> bool + Send + Sync;

/// A coordinate chart of dimension `dim`.
///
/// `sample_box` is the coordinate box sample points are drawn from; it need
/// not coincide with the (possibly unbounded) domain, but the shrunk box must
/// lie inside it.
#[derive(Clone)]
pub struct Chart {
    name: String,
    dim: usize,
    sample_box: Vec<(f64, f64)>,
    domain: Arc<DomainFn>,
    policy: SamplePolicy,
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Chart")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("sample_box", &self.sample_box)
            .field("policy", &self.policy)
            .finish()
    }
}

impl Chart {
    pub fn new<F>(name: impl Into<String>, sample_box: Vec<(f64, f64)>, domain: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> bool + Send + Sync + 'static,
    {
        let dim = sample_box.len();
        if dim == 0 {
            return Err(GeometryError::InvalidArgument("chart dimension must be at least 1".into()));
        }
        if sample_box.iter().any(|(lo, hi)| !(lo < hi)) {
            return Err(GeometryError::InvalidArgument("empty sample box".into()));
        }
        Ok(Chart {
            name: name.into(),
            dim,
            sample_box,
            domain: Arc::new(domain),
            policy: SamplePolicy::standard(dim),
        })
    }

    /// Chart whose domain is exactly the open sample box.
    pub fn open_box(name: impl Into<String>, sample_box: Vec<(f64, f64)>) -> Result<Self> {
        let bounds = sample_box.clone();
        Chart::new(name, sample_box, move |x: &[f64]| {
            x.len() == bounds.len() && x.iter().zip(&bounds).all(|(v, (lo, hi))| v > lo && v < hi)
        })
    }

    /// Cartesian product of charts; coordinates are concatenated.
    pub fn product(name: impl Into<String>, parts: &[Chart]) -> Result<Self> {
        let sample_box: Vec<_> = parts.iter().flat_map(|c| c.sample_box.iter().copied()).collect();
        let pieces: Vec<(usize, Arc<DomainFn>)> =
            parts.iter().map(|c| (c.dim, Arc::clone(&c.domain))).collect();
        Chart::new(name, sample_box, move |x: &[f64]| {
            let mut offset = 0;
            for (d, dom) in &pieces {
                if offset + d > x.len() || !dom(&x[offset..offset + d]) {
                    return false;
                }
                offset += d;
            }
            offset == x.len()
        })
    }

    pub fn with_policy(mut self, policy: SamplePolicy) -> Result<Self> {
        check_dim(self.dim, policy.lattice.len())?;
        self.policy = policy;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sample_box(&self) -> &[(f64, f64)] {
        &self.sample_box
    }

    pub fn policy(&self) -> &SamplePolicy {
        &self.policy
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.dim && (self.domain)(p.coords())
    }

    pub fn check(&self, p: &Point) -> Result<()> {
        check_dim(self.dim, p.dim())?;
        if self.contains(p) {
            Ok(())
        } else {
            Err(GeometryError::OutsideDomain { point: p.coords().to_vec() })
        }
    }

    fn shrunk_box(&self) -> Vec<(f64, f64)> {
        let eps = self.policy.margin;
        self.sample_box.iter().map(|&(lo, hi)| (lo + eps, hi - eps)).collect()
    }

    /// Lattice points followed by seeded random interior points. Points that
    /// fail the domain predicate are dropped.
    pub fn sample_points(&self, seed: u64) -> Vec<Point> {
        let bounds = self.shrunk_box();
        let mut points = Vec::new();

        let axes: Vec<Vec<f64>> = bounds
            .iter()
            .zip(&self.policy.lattice)
            .map(|(&(lo, hi), &m)| match m {
                0 => Vec::new(),
                1 => vec![0.5 * (lo + hi)],
                m => (0..m).map(|i| lo + (hi - lo) * i as f64 / (m - 1) as f64).collect(),
            })
            .collect();
        let total: usize = axes.iter().map(Vec::len).product();
        for mut idx in 0..total {
            let mut coords = vec![0.0; self.dim];
            for axis in (0..self.dim).rev() {
                let len = axes[axis].len();
                coords[axis] = axes[axis][idx % len];
                idx /= len;
            }
            points.push(Point::new(coords));
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..self.policy.random_count {
            let coords = bounds.iter().map(|&(lo, hi)| rng.gen_range(lo..hi)).collect();
            points.push(Point::new(coords));
        }

        points.retain(|p| self.contains(p));
        points
    }
}
