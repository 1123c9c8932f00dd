use crate::error::{GeometryError, Result};

/// A reduced system `y' = f(t, y)` whose states parametrize metrics.
pub trait OdeSystem {
    fn rhs(&self, t: f64, y: &[f64]) -> Vec<f64>;

    /// `Err` with a diagnostic when the state no longer defines a Riemannian
    /// metric.
    fn check_state(&self, y: &[f64]) -> std::result::Result<(), String>;
}

/// Step metadata recorded with a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepMeta {
    pub order: u32,
    pub step: f64,
}

/// Sequence of states at strictly increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub step_meta: StepMeta,
}

impl FlowTrajectory {
    pub fn last(&self) -> (f64, &[f64]) {
        let i = self.times.len() - 1;
        (self.times[i], &self.states[i])
    }
}

/// Integration stopped early because the metric degenerated. Carries the
/// trajectory up to the last valid state.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationHalt {
    pub partial: FlowTrajectory,
    pub error: GeometryError,
}

impl From<IntegrationHalt> for GeometryError {
    fn from(halt: IntegrationHalt) -> Self {
        halt.error
    }
}

fn axpy(y: &[f64], a: f64, k: &[f64]) -> Vec<f64> {
    y.iter().zip(k).map(|(yi, ki)| yi + a * ki).collect()
}

fn rk4_raw<S: OdeSystem + ?Sized>(system: &S, t: f64, y: &[f64], h: f64) -> Vec<f64> {
    let k1 = system.rhs(t, y);
    let k2 = system.rhs(t + 0.5 * h, &axpy(y, 0.5 * h, &k1));
    let k3 = system.rhs(t + 0.5 * h, &axpy(y, 0.5 * h, &k2));
    let k4 = system.rhs(t + h, &axpy(y, h, &k3));
    (0..y.len())
        .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// One classical fourth-order Runge-Kutta step; the new state is re-checked.
pub fn rk4_step<S: OdeSystem + ?Sized>(system: &S, t: f64, y: &[f64], h: f64) -> Result<Vec<f64>> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(GeometryError::InvalidArgument(format!("step size must be positive, got {h}")));
    }
    let next = rk4_raw(system, t, y, h);
    system
        .check_state(&next)
        .map_err(|detail| GeometryError::Degeneration { time: t + h, detail })?;
    Ok(next)
}

/// Locates the degeneration time inside a failed step by bisection on the
/// step length.
fn locate_degeneration<S: OdeSystem + ?Sized>(system: &S, t: f64, y: &[f64], h: f64) -> f64 {
    let (mut good, mut bad) = (0.0, h);
    for _ in 0..100 {
        let mid = 0.5 * (good + bad);
        if mid <= good || mid >= bad {
            break;
        }
        if system.check_state(&rk4_raw(system, t, y, mid)).is_ok() {
            good = mid;
        } else {
            bad = mid;
        }
    }
    t + bad
}

/// Integrates from `t0` to `t_end` with steps no longer than `max_step`; the
/// last step is shortened so the trajectory lands exactly on `t_end`.
pub fn integrate<S: OdeSystem + ?Sized>(
    system: &S,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    max_step: f64,
) -> std::result::Result<FlowTrajectory, IntegrationHalt> {
    let meta = StepMeta { order: 4, step: max_step };
    let mut traj = FlowTrajectory { times: vec![t0], states: vec![y0.to_vec()], step_meta: meta };
    let halt = |traj: FlowTrajectory, error| IntegrationHalt { partial: traj, error };
    if !(max_step > 0.0) || !(t_end >= t0) {
        let msg = format!("need max_step > 0 and t_end >= t0, got {max_step}, [{t0}, {t_end}]");
        return Err(halt(traj, GeometryError::InvalidArgument(msg)));
    }
    if let Err(detail) = system.check_state(y0) {
        return Err(halt(traj, GeometryError::Degeneration { time: t0, detail }));
    }
    let steps = ((t_end - t0) / max_step - 1e-9).ceil().max(0.0) as usize;
    let h = if steps > 0 { (t_end - t0) / steps as f64 } else { 0.0 };
    for s in 0..steps {
        let t = t0 + s as f64 * h;
        let y = traj.states.last().expect("non-empty trajectory").clone();
        match rk4_step(system, t, &y, h) {
            Ok(next) => {
                traj.times.push(if s + 1 == steps { t_end } else { t0 + (s + 1) as f64 * h });
                traj.states.push(next);
            }
            Err(GeometryError::Degeneration { detail, .. }) => {
                let time = locate_degeneration(system, t, &y, h);
                return Err(halt(traj, GeometryError::Degeneration { time, detail }));
            }
            Err(e) => return Err(halt(traj, e)),
        }
    }
    Ok(traj)
}
