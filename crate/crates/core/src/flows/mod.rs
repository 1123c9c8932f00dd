//! Metric flows `∂_t g = R(g)`.
//!
//! Three family kinds are provided: closed-form scalings of fixed tensor
//! blocks, block-diagonal products of Einstein metrics whose coefficients are
//! integrated with RK4, and conformal metrics on the flat torus evolved on a
//! periodic lattice.

pub mod grid;
pub mod ode;

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use crate::builtin::{embed_block, EinsteinBase};
use crate::chart::{Chart, MetricJet, Point, Sym2Field, Sym2Jet};
use crate::curvature::ricci_jet;
use crate::error::{check_dim, GeometryError, Result};
use crate::jet::{Jet, MAX_ORDER};

pub use grid::{conformal_torus_rhs, discrete_laplacian, ConformalGridSystem, TrigInterpolant, MIN_GRID};
pub use ode::{integrate, rk4_step, FlowTrajectory, IntegrationHalt, OdeSystem, StepMeta};

/// The map `R` from metrics to symmetric 2-tensors driving the flow.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum FlowMap {
    /// `R(g) = Ric(g)`.
    #[default]
    Ricci,
    /// `R(g) = −2 Ric(g)`.
    MinusTwoRicci,
    /// `R(g) = λ g`.
    ScalarMultiple(f64),
    Zero,
}

impl FlowMap {
    /// Coefficient of `Ric` in `R`.
    pub fn ricci_factor(&self) -> f64 {
        match self {
            FlowMap::Ricci => 1.0,
            FlowMap::MinusTwoRicci => -2.0,
            FlowMap::ScalarMultiple(_) | FlowMap::Zero => 0.0,
        }
    }

    /// `a'` for the coefficient `a` of an Einstein block with constant `kappa`.
    pub fn block_rate(&self, kappa: f64, a: f64) -> f64 {
        match self {
            FlowMap::ScalarMultiple(lambda) => lambda * a,
            _ => self.ricci_factor() * kappa,
        }
    }
}

impl fmt::Display for FlowMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowMap::Ricci => write!(f, "ricci"),
            FlowMap::MinusTwoRicci => write!(f, "minus2ricci"),
            FlowMap::ScalarMultiple(l) => write!(f, "scale:{l}"),
            FlowMap::Zero => write!(f, "zero"),
        }
    }
}

impl FromStr for FlowMap {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ricci" => Ok(FlowMap::Ricci),
            "minus2ricci" | "minus_two_ricci" => Ok(FlowMap::MinusTwoRicci),
            "zero" => Ok(FlowMap::Zero),
            other => match other.strip_prefix("scale:") {
                Some(l) => l
                    .trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|l| l.is_finite())
                    .map(FlowMap::ScalarMultiple)
                    .ok_or_else(|| GeometryError::InvalidArgument(format!("bad scale factor in `{other}`"))),
                None => Err(GeometryError::InvalidArgument(format!(
                    "unknown flow map `{other}` (expected ricci, minus2ricci, scale:<λ> or zero)"
                ))),
            },
        }
    }
}

/// `R(g)` with first partials.
pub fn flow_rhs(map: FlowMap, m: &MetricJet) -> Result<Sym2Jet> {
    match map {
        FlowMap::Ricci => ricci_jet(m),
        FlowMap::MinusTwoRicci => Ok(ricci_jet(m)?.scaled(-2.0)),
        FlowMap::ScalarMultiple(lambda) => {
            if m.order() < 1 {
                return Err(GeometryError::InsufficientOrder { needed: 1, available: m.order() });
            }
            Ok(Sym2Jet::from_metric(m).scaled(lambda))
        }
        FlowMap::Zero => Ok(Sym2Jet::zero(m.dim())),
    }
}

/// Time dependence `c(t)` of one block of a closed-form family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScaleLaw {
    /// `c0 + rate · t`
    Affine { c0: f64, rate: f64 },
    /// `c0 · e^{rate · t}`
    Exponential { c0: f64, rate: f64 },
}

impl ScaleLaw {
    /// Law of `g_t = c(t) g_0` for an Einstein metric with `Ric(g_0) = κ g_0`.
    pub fn for_einstein(kappa: f64, map: FlowMap) -> ScaleLaw {
        match map {
            FlowMap::ScalarMultiple(lambda) => ScaleLaw::Exponential { c0: 1.0, rate: lambda },
            _ => ScaleLaw::Affine { c0: 1.0, rate: map.ricci_factor() * kappa },
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match *self {
            ScaleLaw::Affine { c0, rate } => c0 + rate * t,
            ScaleLaw::Exponential { c0, rate } => c0 * (rate * t).exp(),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            ScaleLaw::Affine { rate, .. } => rate,
            ScaleLaw::Exponential { c0, rate } => c0 * rate * (rate * t).exp(),
        }
    }

    /// Open interval on which `c(t) > 0`.
    pub fn positive_interval(&self) -> (f64, f64) {
        match *self {
            ScaleLaw::Affine { c0, rate } if rate > 0.0 => (-c0 / rate, f64::INFINITY),
            ScaleLaw::Affine { c0, rate } if rate < 0.0 => (f64::NEG_INFINITY, -c0 / rate),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }
}

/// Times on which a family is defined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    /// Whether `lo` itself belongs to the interval (the start of an
    /// integrated trajectory does, a collapse time does not).
    pub closed_lo: bool,
}

impl Interval {
    pub fn contains(&self, t: f64) -> bool {
        t.is_finite() && t < self.hi && (t > self.lo || (self.closed_lo && t == self.lo))
    }

    pub fn check(&self, t: f64) -> Result<()> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(GeometryError::OutsideInterval { t, lo: self.lo, hi: self.hi })
        }
    }
}

/// Metric and its time derivative at `(t, p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilySample {
    pub metric: MetricJet,
    /// `∂_t g` with first spatial partials.
    pub dt_metric: Sym2Jet,
}

fn assemble(n: usize, x: &[Jet], blocks: &[Sym2Field], coeffs: &[f64]) -> Vec<Jet> {
    let mut acc = vec![x[0].lift(0.0); n * n];
    for (block, &c) in blocks.iter().zip(coeffs) {
        if c == 0.0 {
            continue;
        }
        for (a, b) in acc.iter_mut().zip(block.eval_jets(x)) {
            *a += b * c;
        }
    }
    acc
}

fn sample_from_blocks(
    n: usize,
    p: &Point,
    order: usize,
    blocks: &[Sym2Field],
    coeffs: &[f64],
    rates: &[f64],
) -> Result<FamilySample> {
    check_dim(n, p.dim())?;
    let x = Jet::seed(p.coords(), order.clamp(1, MAX_ORDER));
    let metric = MetricJet::from_components(n, assemble(n, &x, blocks, coeffs))?;
    let x1: Vec<Jet> = x.iter().map(|j| j.truncate(1)).collect();
    let dt_metric = Sym2Jet::from_components(n, assemble(n, &x1, blocks, rates))?;
    Ok(FamilySample { metric: metric.truncate(order), dt_metric })
}

/// `g_t = Σ_b c_b(t) G_b` with explicit laws.
#[derive(Debug, Clone)]
pub struct ClosedFormFamily {
    pub id: String,
    pub chart: Chart,
    pub map: FlowMap,
    blocks: Vec<Sym2Field>,
    laws: Vec<ScaleLaw>,
}

impl ClosedFormFamily {
    pub fn new(id: impl Into<String>, chart: Chart, map: FlowMap, blocks: Vec<(Sym2Field, ScaleLaw)>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(GeometryError::InvalidArgument("a family needs at least one block".into()));
        }
        for (b, _) in &blocks {
            check_dim(chart.dim(), b.dim())?;
        }
        let (blocks, laws) = blocks.into_iter().unzip();
        Ok(ClosedFormFamily { id: id.into(), chart, map, blocks, laws })
    }

    pub fn laws(&self) -> &[ScaleLaw] {
        &self.laws
    }

    pub fn interval(&self) -> Interval {
        let (lo, hi) = self
            .laws
            .iter()
            .map(ScaleLaw::positive_interval)
            .fold((f64::NEG_INFINITY, f64::INFINITY), |(a, b), (c, d)| (a.max(c), b.min(d)));
        Interval { lo, hi, closed_lo: false }
    }

    pub fn coefficients(&self, t: f64) -> Result<Vec<f64>> {
        self.interval().check(t)?;
        Ok(self.laws.iter().map(|l| l.value(t)).collect())
    }

    pub fn query_with_order(&self, t: f64, p: &Point, order: usize) -> Result<FamilySample> {
        let coeffs = self.coefficients(t)?;
        let rates: Vec<f64> = self.laws.iter().map(|l| l.derivative(t)).collect();
        sample_from_blocks(self.chart.dim(), p, order, &self.blocks, &coeffs, &rates)
    }
}

/// Exact solution `g_t = c(t) g_0` on an Einstein base.
pub fn exact_einstein_family(base: EinsteinBase, map: FlowMap) -> Result<MetricFamily> {
    base.validate()?;
    let block = base.metric().as_sym2().expect("built-in metrics are analytic");
    let law = ScaleLaw::for_einstein(base.kappa(), map);
    Ok(MetricFamily::ClosedForm(ClosedFormFamily::new(base.to_string(), base.chart(), map, vec![(block, law)])?))
}

/// `g_t = (1 + 2t) g_0` on the unit 2-sphere, labelled as a solution of
/// `∂_t g = Ric`, which it is not.
pub fn wrong_sphere_family() -> MetricFamily {
    let base = EinsteinBase::Sphere(2);
    let block = base.metric().as_sym2().expect("analytic");
    let law = ScaleLaw::Affine { c0: 1.0, rate: 2.0 };
    MetricFamily::ClosedForm(
        ClosedFormFamily::new("wrong-sphere2", base.chart(), FlowMap::Ricci, vec![(block, law)]).expect("valid"),
    )
}

/// `g_t = dθ² + (1 + t) sin²θ dφ²`, labelled as a solution of `∂_t g = Ric`.
/// Every `g_t` has `Ric = g_t`, but only the `dφ²` part moves.
pub fn warped_sphere_family() -> MetricFamily {
    let base = EinsteinBase::Sphere(2);
    let radial = Sym2Field::new(2, |x: &[Jet]| {
        let (one, zero) = (x[0].lift(1.0), x[0].lift(0.0));
        vec![one, zero.clone(), zero.clone(), zero]
    });
    let angular = Sym2Field::new(2, |x: &[Jet]| {
        let zero = x[0].lift(0.0);
        vec![zero.clone(), zero.clone(), zero, x[0].sin().powi(2)]
    });
    let blocks = vec![
        (radial, ScaleLaw::Affine { c0: 1.0, rate: 0.0 }),
        (angular, ScaleLaw::Affine { c0: 1.0, rate: 1.0 }),
    ];
    MetricFamily::ClosedForm(
        ClosedFormFamily::new("warped-sphere2", base.chart(), FlowMap::Ricci, blocks).expect("valid"),
    )
}

/// Reduced coefficient system of a block-diagonal Einstein product.
#[derive(Debug, Clone)]
pub struct AnsatzSystem {
    pub kappas: Vec<f64>,
    pub map: FlowMap,
}

impl OdeSystem for AnsatzSystem {
    fn rhs(&self, _t: f64, y: &[f64]) -> Vec<f64> {
        y.iter().zip(&self.kappas).map(|(&a, &k)| self.map.block_rate(k, a)).collect()
    }

    fn check_state(&self, y: &[f64]) -> std::result::Result<(), String> {
        let max = y.iter().cloned().fold(0.0, f64::max);
        for (b, &a) in y.iter().enumerate() {
            if !a.is_finite() || a <= 0.0 || a <= 1e-12 * max {
                return Err(format!("block coefficient a_{b} = {a:e} is no longer positive"));
            }
        }
        Ok(())
    }
}

/// Default RK4 step for ansatz queries.
pub const ANSATZ_STEP: f64 = 1e-2;

/// `g_t = Σ_b a_b(t) g_b` on a product of Einstein manifolds.
#[derive(Debug, Clone)]
pub struct AnsatzFamily {
    pub id: String,
    pub chart: Chart,
    pub bases: Vec<EinsteinBase>,
    pub initial: Vec<f64>,
    pub step: f64,
    pub system: AnsatzSystem,
    blocks: Vec<Sym2Field>,
}

/// Block-diagonal Einstein product evolved through its coefficient ODE.
pub fn ansatz_ode_family(blocks: &[(EinsteinBase, f64)], map: FlowMap) -> Result<MetricFamily> {
    if blocks.is_empty() {
        return Err(GeometryError::InvalidArgument("ansatz needs at least one block".into()));
    }
    let total: usize = blocks.iter().map(|(b, _)| b.dim()).sum();
    let mut embedded = Vec::with_capacity(blocks.len());
    let mut charts = Vec::with_capacity(blocks.len());
    let mut offset = 0;
    for (base, a0) in blocks {
        base.validate()?;
        if !(*a0 > 0.0) {
            return Err(GeometryError::InvalidArgument(format!("initial coefficient must be positive, got {a0}")));
        }
        embedded.push(embed_block(&base.metric(), offset, total)?);
        charts.push(base.chart());
        offset += base.dim();
    }
    let id = blocks.iter().map(|(b, _)| b.to_string()).collect::<Vec<_>>().join("x");
    let chart = if charts.len() == 1 { charts.pop().expect("one chart") } else { Chart::product(id.clone(), &charts)? };
    let system = AnsatzSystem { kappas: blocks.iter().map(|(b, _)| b.kappa()).collect(), map };
    Ok(MetricFamily::AnsatzOde(AnsatzFamily {
        id,
        chart,
        bases: blocks.iter().map(|(b, _)| *b).collect(),
        initial: blocks.iter().map(|(_, a)| *a).collect(),
        step: ANSATZ_STEP,
        system,
        blocks: embedded,
    }))
}

impl AnsatzFamily {
    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    /// Closed-form collapse time of the coefficient system.
    pub fn interval(&self) -> Interval {
        let hi = match self.system.map {
            FlowMap::Ricci | FlowMap::MinusTwoRicci => self
                .initial
                .iter()
                .zip(&self.system.kappas)
                .map(|(&a, &k)| self.system.map.block_rate(k, a))
                .zip(&self.initial)
                .filter(|(r, _)| *r < 0.0)
                .map(|(r, a)| -a / r)
                .fold(f64::INFINITY, f64::min),
            _ => f64::INFINITY,
        };
        Interval { lo: 0.0, hi, closed_lo: true }
    }

    /// Integrated coefficients `a_b(t)`.
    pub fn coefficients(&self, t: f64) -> Result<Vec<f64>> {
        self.interval().check(t)?;
        let traj = integrate(&self.system, 0.0, &self.initial, t, self.step)?;
        Ok(traj.last().1.to_vec())
    }

    pub fn query_with_order(&self, t: f64, p: &Point, order: usize) -> Result<FamilySample> {
        let a = self.coefficients(t)?;
        let rates = self.system.rhs(t, &a);
        sample_from_blocks(self.chart.dim(), p, order, &self.blocks, &a, &rates)
    }
}

/// Lattice, interpolant of `u` and interpolant of `∂_t u` at one time.
#[derive(Debug)]
struct GridSnapshot {
    t: f64,
    u: Vec<f64>,
    u_interp: TrigInterpolant,
    rate_interp: TrigInterpolant,
}

/// `g_t = e^{2u(t)} (dx² + dy²)` on the unit torus, `u` evolved on an `N × N`
/// lattice by RK4; off-lattice values use the trigonometric interpolant.
#[derive(Debug, Clone)]
pub struct ConformalGridFamily {
    pub id: String,
    pub n: usize,
    pub map: FlowMap,
    pub u0: Vec<f64>,
    pub step: f64,
    chart: Chart,
    cache: Arc<Mutex<Vec<Arc<GridSnapshot>>>>,
}

impl ConformalGridFamily {
    /// Default step `0.2 / N²` keeps RK4 inside its stability region for the
    /// stiffest lattice mode.
    pub fn new(n: usize, u0: Vec<f64>, map: FlowMap) -> Result<Self> {
        grid::check_grid(n, u0.len())?;
        let chart = EinsteinBase::FlatTorus(2).chart();
        Ok(ConformalGridFamily {
            id: "conformal-torus".into(),
            n,
            map,
            u0,
            step: 0.2 / (n * n) as f64,
            chart,
            cache: Arc::new(Mutex::new(Vec::new())),
        })
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self.cache = Arc::new(Mutex::new(Vec::new()));
        self
    }

    pub fn system(&self) -> ConformalGridSystem {
        ConformalGridSystem { n: self.n, map: self.map }
    }

    pub fn interval(&self) -> Interval {
        Interval { lo: 0.0, hi: f64::INFINITY, closed_lo: true }
    }

    /// Lattice values of `u(t)`.
    pub fn lattice(&self, t: f64) -> Result<Vec<f64>> {
        Ok(self.snapshot(t)?.u.clone())
    }

    fn snapshot(&self, t: f64) -> Result<Arc<GridSnapshot>> {
        self.interval().check(t)?;
        let mut cache = self.cache.lock().expect("grid cache poisoned");
        if let Some(s) = cache.iter().find(|s| s.t.to_bits() == t.to_bits()) {
            return Ok(Arc::clone(s));
        }
        let traj = integrate(&self.system(), 0.0, &self.u0, t, self.step)?;
        let u = traj.last().1.to_vec();
        let rate = conformal_torus_rhs(&u, self.n, self.map)?;
        let snap = Arc::new(GridSnapshot {
            t,
            u_interp: TrigInterpolant::new(&u, self.n)?,
            rate_interp: TrigInterpolant::new(&rate, self.n)?,
            u,
        });
        if cache.len() >= 64 {
            cache.remove(0);
        }
        cache.push(Arc::clone(&snap));
        Ok(snap)
    }

    pub fn query_with_order(&self, t: f64, p: &Point, order: usize) -> Result<FamilySample> {
        check_dim(2, p.dim())?;
        let snap = self.snapshot(t)?;
        let x = Jet::seed(p.coords(), order.clamp(1, MAX_ORDER));
        let w = (snap.u_interp.eval(&x) * 2.0).exp();
        let zero = w.lift(0.0);
        let metric = MetricJet::from_components(2, vec![w.clone(), zero.clone(), zero, w.clone()])?;
        let dw = (w.truncate(1) * snap.rate_interp.eval(&x).truncate(1)) * 2.0;
        let z1 = dw.lift(0.0);
        let dt_metric = Sym2Jet::from_components(2, vec![dw.clone(), z1.clone(), z1, dw])?;
        Ok(FamilySample { metric: metric.truncate(order), dt_metric })
    }
}

/// A one-parameter family of metrics on a chart.
#[derive(Debug, Clone)]
pub enum MetricFamily {
    ClosedForm(ClosedFormFamily),
    AnsatzOde(AnsatzFamily),
    ConformalGrid(ConformalGridFamily),
}

impl MetricFamily {
    pub fn id(&self) -> &str {
        match self {
            MetricFamily::ClosedForm(f) => &f.id,
            MetricFamily::AnsatzOde(f) => &f.id,
            MetricFamily::ConformalGrid(f) => &f.id,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            MetricFamily::ClosedForm(_) => "closed_form",
            MetricFamily::AnsatzOde(_) => "ansatz_ode",
            MetricFamily::ConformalGrid(_) => "conformal_grid",
        }
    }

    pub fn chart(&self) -> &Chart {
        match self {
            MetricFamily::ClosedForm(f) => &f.chart,
            MetricFamily::AnsatzOde(f) => &f.chart,
            MetricFamily::ConformalGrid(f) => &f.chart,
        }
    }

    pub fn dim(&self) -> usize {
        self.chart().dim()
    }

    /// The flow map this family is declared to solve.
    pub fn map(&self) -> FlowMap {
        match self {
            MetricFamily::ClosedForm(f) => f.map,
            MetricFamily::AnsatzOde(f) => f.system.map,
            MetricFamily::ConformalGrid(f) => f.map,
        }
    }

    pub fn interval(&self) -> Interval {
        match self {
            MetricFamily::ClosedForm(f) => f.interval(),
            MetricFamily::AnsatzOde(f) => f.interval(),
            MetricFamily::ConformalGrid(f) => f.interval(),
        }
    }

    /// Metric jet of order 3 and `∂_t g`.
    pub fn query(&self, t: f64, p: &Point) -> Result<FamilySample> {
        self.query_with_order(t, p, MAX_ORDER)
    }

    pub fn query_with_order(&self, t: f64, p: &Point, order: usize) -> Result<FamilySample> {
        self.chart().check(p)?;
        match self {
            MetricFamily::ClosedForm(f) => f.query_with_order(t, p, order),
            MetricFamily::AnsatzOde(f) => f.query_with_order(t, p, order),
            MetricFamily::ConformalGrid(f) => f.query_with_order(t, p, order),
        }
    }

    /// Reduced state on `[0, horizon]` with steps no longer than `step`:
    /// block coefficients, or the lattice for grid families.
    pub fn trajectory(&self, horizon: f64, step: f64) -> std::result::Result<FlowTrajectory, IntegrationHalt> {
        match self {
            MetricFamily::ClosedForm(f) => closed_form_trajectory(f, horizon, step),
            MetricFamily::AnsatzOde(f) => integrate(&f.system, 0.0, &f.initial, horizon, step),
            MetricFamily::ConformalGrid(f) => integrate(&f.system(), 0.0, &f.u0, horizon, step),
        }
    }

    /// Column names for [`MetricFamily::state_summary`].
    pub fn state_labels(&self) -> Vec<String> {
        match self {
            MetricFamily::ClosedForm(f) => (0..f.laws.len()).map(|b| format!("c{b}")).collect(),
            MetricFamily::AnsatzOde(f) => (0..f.initial.len()).map(|b| format!("a{b}")).collect(),
            MetricFamily::ConformalGrid(_) => {
                ["u_min", "u_max", "u_mean", "area", "mode1"].iter().map(|s| s.to_string()).collect()
            }
        }
    }

    /// Compact row describing a trajectory state.
    pub fn state_summary(&self, state: &[f64]) -> Vec<f64> {
        match self {
            MetricFamily::ConformalGrid(f) => {
                let min = state.iter().cloned().fold(f64::INFINITY, f64::min);
                let max = state.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let mean = state.iter().sum::<f64>() / state.len() as f64;
                vec![min, max, mean, grid::discrete_area(state, f.n), grid::sine_mode_amplitude(state, f.n, 1)]
            }
            _ => state.to_vec(),
        }
    }
}

fn closed_form_trajectory(
    f: &ClosedFormFamily,
    horizon: f64,
    step: f64,
) -> std::result::Result<FlowTrajectory, IntegrationHalt> {
    let mut traj = FlowTrajectory { times: vec![], states: vec![], step_meta: StepMeta { order: 0, step } };
    let halt = |traj, error| IntegrationHalt { partial: traj, error };
    if !(step > 0.0) || !(horizon >= 0.0) {
        let msg = format!("need step > 0 and horizon >= 0, got {step}, {horizon}");
        return Err(halt(traj, GeometryError::InvalidArgument(msg)));
    }
    let interval = f.interval();
    let steps = (horizon / step - 1e-9).ceil().max(0.0) as usize;
    for s in 0..=steps {
        let t = if s == steps { horizon } else { s as f64 * horizon / steps as f64 };
        if !interval.contains(t) {
            let detail = "scale factor reached zero".to_string();
            return Err(halt(traj, GeometryError::Degeneration { time: interval.hi, detail }));
        }
        traj.times.push(t);
        traj.states.push(f.laws.iter().map(|l| l.value(t)).collect());
    }
    Ok(traj)
}

/// Times at which the verification suite samples a family: fixed fractions
/// of `min(t_max, 1)` where `t_max` is the end of the validity interval.
pub fn sample_times(interval: &Interval) -> Vec<f64> {
    let span = interval.hi.min(1.0);
    let start = interval.lo.max(0.0);
    [0.05, 0.2, 0.4, 0.6, 0.8].iter().map(|f| start + f * (span - start)).collect()
}
