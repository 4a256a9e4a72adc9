//! Transition matrices, Floquet data, and trajectories. Piecewise-constant
//! schedules are propagated with exact segment exponentials; everything else
//! goes through a fixed-step RK4 integrator that splits at the schedule's
//! kink times.

use crate::error::{require, require_positive, Error, Result};
use crate::mat2::{Mat2, Vec2};
use crate::schedules::{kink_times_between, PiecewiseConstantSchedule, Schedule};

/// Hard cap on the RK4 step size.
pub const MAX_RK4_STEP: f64 = 1e-2;

/// Fixed-step integrator configuration.
#[derive(Debug, Clone, Copy)]
pub struct IntegratorSettings {
    pub step: f64,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        Self { step: 1e-3 }
    }
}

/// Sampled solution of x'(t) = A(t) x(t).
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec2>,
    pub norms: Vec<f64>,
    /// Polar angle of each state: in [0, pi/2] while the state stays in the
    /// closed positive quadrant, the general atan2 angle otherwise.
    pub angles: Vec<f64>,
}

impl Trajectory {
    fn push(&mut self, t: f64, x: Vec2) {
        self.times.push(t);
        self.states.push(x);
        self.norms.push(x.norm());
        self.angles.push(x.angle());
    }
}

/// One-period transition matrix and its multipliers.
#[derive(Debug, Clone)]
pub struct FloquetData {
    pub poincare: Mat2,
    pub mu1: f64,
    pub mu2: f64,
    /// ln(mu1) / period: the exponential growth rate per unit time.
    pub principal_exponent: f64,
}

/// Exact transition matrix X(t1; t0) of a piecewise-constant schedule: the
/// ordered product of segment exponentials. A reversed interval is handled
/// through the inverse.
pub fn transition_piecewise(
    s: &PiecewiseConstantSchedule,
    t0: f64,
    t1: f64,
) -> Result<Mat2> {
    require(
        t0.is_finite() && t1.is_finite(),
        "t0",
        "interval endpoints must be finite",
    )?;
    if t0 == t1 {
        return Ok(Mat2::identity());
    }
    if t0 > t1 {
        return transition_piecewise(s, t1, t0)?.inverse();
    }
    let sched = Schedule::Piecewise(s.clone());
    let mut x = Mat2::identity();
    for (a, b) in smooth_spans(&sched, t0, t1) {
        // The midpoint sits strictly inside one segment, so it names the
        // matrix in force on the whole span.
        let m = s.evaluate((a + b) / 2.0);
        x = m.expm(b - a) * x;
    }
    Ok(x)
}

/// One-period transition matrix of the canonical schedule in closed form:
/// the product of the two phase exponentials, written out entrywise.
pub fn poincare_closed_form(c: f64) -> Result<Mat2> {
    require_positive(c, "c")?;
    let ch = 0.5f64.cosh();
    let sh = 0.5f64.sinh();
    let scale = (-2.0f64).exp();
    let off = (2.0 * c + 1.0 / (2.0 * c)) * ch * sh;
    Ok(Mat2::new(
        scale * (ch * ch + sh * sh / (4.0 * c * c)),
        scale * off,
        scale * off,
        scale * (ch * ch + 4.0 * c * c * sh * sh),
    ))
}

/// Floquet multipliers of a periodic schedule. Piecewise schedules use the
/// exact product; smoothed schedules are integrated with RK4 at
/// `settings.step`.
pub fn floquet(s: &Schedule, settings: &IntegratorSettings) -> Result<FloquetData> {
    let period = s.period().ok_or(Error::InvalidParameter {
        field: "schedule",
        reason: "Floquet analysis requires a periodic schedule".to_string(),
    })?;
    let p = match s {
        Schedule::Piecewise(ps) => transition_piecewise(ps, 0.0, period)?,
        _ => integrate_transition(s, 0.0, period, settings.step)?,
    };
    let sp = p.spectral()?;
    Ok(FloquetData {
        poincare: p,
        mu1: sp.lambda1,
        mu2: sp.lambda2,
        principal_exponent: sp.lambda1.ln() / period,
    })
}

/// RK4 approximation of the transition matrix X(t1; t0) for an arbitrary
/// schedule. The march is split at every kink time, and the final step of
/// each smooth span is shortened to land exactly on the span's end.
pub fn integrate_transition(s: &Schedule, t0: f64, t1: f64, step: f64) -> Result<Mat2> {
    validate_step(step)?;
    require(
        t0.is_finite() && t1.is_finite() && t0 <= t1,
        "t1",
        "integration interval must be finite with t0 <= t1",
    )?;
    let mut x = Mat2::identity();
    for (a, b) in smooth_spans(s, t0, t1) {
        x = rk4_span_matrix(s, x, a, b, step);
    }
    Ok(x)
}

/// Samples of the solution through `x0` on the grid t0, t0 + dt, ... For a
/// piecewise-constant schedule each hop is an exact segment-exponential
/// product; otherwise the state advances by RK4 with an internal step of
/// min(dt, 1e-3).
pub fn trajectory(
    s: &Schedule,
    x0: Vec2,
    t0: f64,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    require(x0.is_finite(), "x0", "initial state must be finite")?;
    require(
        dt.is_finite() && dt > 0.0,
        "dt",
        format!("sampling interval must be positive, got {dt}"),
    )?;
    require(
        t_end.is_finite() && t0.is_finite() && t_end > t0,
        "t_end",
        "horizon must lie strictly after the start time",
    )?;
    // Small slack so that an intended integer sample count survives rounding.
    let n = ((t_end - t0) / dt + 1e-9).floor() as usize;
    let mut tr = Trajectory {
        times: Vec::with_capacity(n + 1),
        states: Vec::with_capacity(n + 1),
        norms: Vec::with_capacity(n + 1),
        angles: Vec::with_capacity(n + 1),
    };
    let mut x = x0;
    tr.push(t0, x);
    let substep = dt.min(1e-3);
    for i in 1..=n {
        let (a, b) = (t0 + (i - 1) as f64 * dt, t0 + i as f64 * dt);
        x = match s {
            Schedule::Piecewise(ps) => transition_piecewise(ps, a, b)? * x,
            _ => propagate_state_rk4(s, x, a, b, substep),
        };
        tr.push(b, x);
    }
    Ok(tr)
}

/// Exponential growth-rate estimate ln(||x(T)|| / ||x(t0)||) / (T - t0).
/// The trajectory must span at least 50 time units and stay away from zero.
pub fn lyapunov_estimate(tr: &Trajectory) -> Result<f64> {
    require(
        tr.times.len() >= 2,
        "trajectory",
        "needs at least two samples",
    )?;
    let span = tr.times[tr.times.len() - 1] - tr.times[0];
    require(
        span >= 50.0,
        "trajectory",
        format!("horizon must cover at least 50 time units, got {span}"),
    )?;
    for (&t, &n) in tr.times.iter().zip(&tr.norms) {
        if n == 0.0 {
            return Err(Error::DegenerateTrajectory { t });
        }
    }
    Ok((tr.norms[tr.norms.len() - 1].ln() - tr.norms[0].ln()) / span)
}

/// Distance at time `t_end` between the direction of the solution through
/// `x0` and the direction of the reference solution started on the dominant
/// eigenvector of the one-period matrix anchored at `t0`.
pub fn direction_gap(s: &Schedule, x0: Vec2, t0: f64, t_end: f64) -> Result<f64> {
    require(
        x0.is_finite() && x0.is_nonnegative() && x0.norm() > 0.0,
        "x0",
        "initial state must be nonzero with nonnegative entries",
    )?;
    require(
        t_end.is_finite() && t0.is_finite() && t_end > t0,
        "t_end",
        "horizon must lie strictly after the start time",
    )?;
    let period = s.period().ok_or(Error::InvalidParameter {
        field: "schedule",
        reason: "direction gap requires a periodic schedule".to_string(),
    })?;
    let step = IntegratorSettings::default().step;
    let p = match s {
        Schedule::Piecewise(ps) => transition_piecewise(ps, t0, t0 + period)?,
        _ => integrate_transition(s, t0, t0 + period, step)?,
    };
    let w0 = p.spectral()?.u;
    let (xt, wt) = match s {
        Schedule::Piecewise(ps) => {
            let x = transition_piecewise(ps, t0, t_end)?;
            (x * x0, x * w0)
        }
        _ => (
            propagate_state_rk4(s, x0, t0, t_end, step),
            propagate_state_rk4(s, w0, t0, t_end, step),
        ),
    };
    let xd = xt.normalized().ok_or(Error::DegenerateTrajectory { t: t_end })?;
    let wd = wt.normalized().ok_or(Error::DegenerateTrajectory { t: t_end })?;
    Ok((xd - wd).norm())
}

pub(crate) fn validate_step(step: f64) -> Result<()> {
    require(
        step.is_finite() && step > 0.0,
        "step",
        format!("integration step must be positive, got {step}"),
    )?;
    if step > MAX_RK4_STEP {
        return Err(Error::StepTooLarge {
            step,
            max: MAX_RK4_STEP,
        });
    }
    Ok(())
}

/// Consecutive smoothness spans [a, b] covering [t0, t1].
fn smooth_spans(s: &Schedule, t0: f64, t1: f64) -> Vec<(f64, f64)> {
    let mut nodes = vec![t0];
    nodes.extend(kink_times_between(s, t0, t1));
    nodes.push(t1);
    nodes.windows(2).map(|w| (w[0], w[1])).collect()
}

/// RK4 march of X' = A(t) X across one smooth span. The coefficient value at
/// the span's right end is taken from the left so a jump there cannot leak in.
fn rk4_span_matrix(s: &Schedule, mut x: Mat2, a: f64, b: f64, step: f64) -> Mat2 {
    let eval = |t: f64| if t >= b { s.evaluate_left(b) } else { s.evaluate(t) };
    let n = ((b - a) / step).ceil().max(1.0) as u64;
    let mut t = a;
    for i in 0..n {
        let end = if i + 1 == n {
            b
        } else {
            (a + (i + 1) as f64 * step).min(b)
        };
        let h = end - t;
        if h <= 0.0 {
            t = end;
            continue;
        }
        let k1 = eval(t) * x;
        let k2 = eval(t + h / 2.0) * (x + k1 * (h / 2.0));
        let k3 = eval(t + h / 2.0) * (x + k2 * (h / 2.0));
        let k4 = eval(end) * (x + k3 * h);
        x = x + (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0);
        t = end;
    }
    x
}

/// Vector counterpart of `rk4_span_matrix`, split at kink times.
pub(crate) fn propagate_state_rk4(s: &Schedule, mut y: Vec2, t0: f64, t1: f64, step: f64) -> Vec2 {
    for (a, b) in smooth_spans(s, t0, t1) {
        let eval = |t: f64| if t >= b { s.evaluate_left(b) } else { s.evaluate(t) };
        let n = ((b - a) / step).ceil().max(1.0) as u64;
        let mut t = a;
        for i in 0..n {
            let end = if i + 1 == n {
                b
            } else {
                (a + (i + 1) as f64 * step).min(b)
            };
            let h = end - t;
            if h <= 0.0 {
                t = end;
                continue;
            }
            let k1 = eval(t) * y;
            let k2 = eval(t + h / 2.0) * (y + k1 * (h / 2.0));
            let k3 = eval(t + h / 2.0) * (y + k2 * (h / 2.0));
            let k4 = eval(end) * (y + k3 * h);
            y = y + (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0);
            t = end;
        }
    }
    y
}
