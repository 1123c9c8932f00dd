//! Conformal metrics `g = e^{2u}(dx² + dy²)` on the unit torus, with `u`
//! sampled on a periodic `N × N` lattice.
//!
//! In two dimensions `Ric = K g` with `K = −e^{−2u} Δu`, so `∂_t g = λ Ric`
//! reduces to `∂_t u = −(λ/2) e^{−2u} Δu` and `∂_t g = λ g` to `∂_t u = λ/2`.

use std::f64::consts::PI;

use super::ode::OdeSystem;
use super::FlowMap;
use crate::error::{GeometryError, Result};
use crate::jet::Jet;

/// Smallest lattice accepted per axis.
pub const MIN_GRID: usize = 16;

pub(crate) fn check_grid(n: usize, len: usize) -> Result<()> {
    if n < MIN_GRID {
        return Err(GeometryError::GridTooSmall { n, min: MIN_GRID });
    }
    if len != n * n {
        return Err(GeometryError::DimensionMismatch { expected: n * n, found: len });
    }
    Ok(())
}

/// Second-order five-point Laplacian with periodic wrap on the unit torus.
/// `u[i * n + j]` is the value at `(i / n, j / n)`.
pub fn discrete_laplacian(u: &[f64], n: usize) -> Vec<f64> {
    let inv_h2 = (n * n) as f64;
    let at = |i: usize, j: usize| u[(i % n) * n + (j % n)];
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let sum = at(i + 1, j) + at(i + n - 1, j) + at(i, j + 1) + at(i, j + n - 1);
            out.push((sum - 4.0 * at(i, j)) * inv_h2);
        }
    }
    out
}

/// Pointwise `∂_t u` of the conformal-factor reduction of `∂_t g = R(g)`.
pub fn conformal_torus_rhs(u: &[f64], n: usize, map: FlowMap) -> Result<Vec<f64>> {
    check_grid(n, u.len())?;
    Ok(match map {
        FlowMap::Zero => vec![0.0; n * n],
        FlowMap::ScalarMultiple(lambda) => vec![0.5 * lambda; n * n],
        FlowMap::Ricci | FlowMap::MinusTwoRicci => {
            let lambda = map.ricci_factor();
            discrete_laplacian(u, n)
                .iter()
                .zip(u)
                .map(|(lap, ui)| -0.5 * lambda * (-2.0 * ui).exp() * lap)
                .collect()
        }
    })
}

/// The semi-discrete conformal flow as an ODE system.
#[derive(Debug, Clone, Copy)]
pub struct ConformalGridSystem {
    pub n: usize,
    pub map: FlowMap,
}

impl OdeSystem for ConformalGridSystem {
    fn rhs(&self, _t: f64, y: &[f64]) -> Vec<f64> {
        conformal_torus_rhs(y, self.n, self.map).expect("grid validated at construction")
    }

    fn check_state(&self, y: &[f64]) -> std::result::Result<(), String> {
        match y.iter().position(|v| !v.is_finite()) {
            None => Ok(()),
            Some(i) => Err(format!("conformal factor not finite at lattice site {i}")),
        }
    }
}

/// Trigonometric interpolant of periodic lattice data on the unit torus.
#[derive(Debug, Clone)]
pub struct TrigInterpolant {
    /// `(k, l, re, im)` with Nyquist weights folded in.
    modes: Vec<(i64, i64, f64, f64)>,
}

impl TrigInterpolant {
    pub fn new(u: &[f64], n: usize) -> Result<Self> {
        check_grid(n, u.len())?;
        let half = (n / 2) as i64;
        let nf = n as f64;
        let freqs: Vec<i64> = (-half..=half).collect();
        // transform along j for every row, then along i
        let mut rows = vec![(0.0, 0.0); n * freqs.len()];
        for i in 0..n {
            for (li, &l) in freqs.iter().enumerate() {
                let (mut re, mut im) = (0.0, 0.0);
                for j in 0..n {
                    let phase = -2.0 * PI * (l * j as i64) as f64 / nf;
                    re += u[i * n + j] * phase.cos();
                    im += u[i * n + j] * phase.sin();
                }
                rows[i * freqs.len() + li] = (re, im);
            }
        }
        let weight = |k: i64| if n % 2 == 0 && k.abs() == half { 0.5 } else { 1.0 };
        let mut modes = Vec::with_capacity(freqs.len() * freqs.len());
        for &k in &freqs {
            for (li, &l) in freqs.iter().enumerate() {
                let (mut re, mut im) = (0.0, 0.0);
                for i in 0..n {
                    let phase = -2.0 * PI * (k * i as i64) as f64 / nf;
                    let (c, s) = (phase.cos(), phase.sin());
                    let (a, b) = rows[i * freqs.len() + li];
                    re += a * c - b * s;
                    im += a * s + b * c;
                }
                let w = weight(k) * weight(l) / (nf * nf);
                modes.push((k, l, re * w, im * w));
            }
        }
        Ok(TrigInterpolant { modes })
    }

    /// Interpolated value as a jet in `(x, y)`.
    pub fn eval(&self, x: &[Jet]) -> Jet {
        let mut acc = x[0].lift(0.0);
        for &(k, l, re, im) in &self.modes {
            if re == 0.0 && im == 0.0 {
                continue;
            }
            let phase = (&x[0] * (k as f64) + &x[1] * (l as f64)) * (2.0 * PI);
            acc += phase.cos() * re - phase.sin() * im;
        }
        acc
    }
}

/// Area `∫ e^{2u}` by the lattice quadrature.
pub fn discrete_area(u: &[f64], n: usize) -> f64 {
    u.iter().map(|v| (2.0 * v).exp()).sum::<f64>() / (n * n) as f64
}

/// Amplitude of the `sin(2π m x)` mode (`x` = first lattice index).
pub fn sine_mode_amplitude(u: &[f64], n: usize, m: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..n {
        let s = (2.0 * PI * (m * i) as f64 / n as f64).sin();
        for j in 0..n {
            acc += u[i * n + j] * s;
        }
    }
    2.0 * acc / (n * n) as f64
}

/// Lattice samples of `f(x, y)`.
pub fn sample_lattice(n: usize, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let mut u = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            u.push(f(i as f64 / n as f64, j as f64 / n as f64));
        }
    }
    u
}
