use alloc::vec::Vec;

use super::field::effective_field_into;
use super::{AnisotropyVector, DipoleCouplingTable, MaterialParams, SpinState};
use crate::error::{Error, Result};
use crate::vec3::Vec3;

/// How [`relax`] decides that a moment has settled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Convergence {
    /// Normalized torque `|m × Ĥ|` below the tolerance. Antiparallel
    /// alignment counts as settled.
    #[default]
    Torque,
    /// Angle between `m` and `H` below the tolerance, in radians. Only
    /// parallel alignment counts as settled.
    Alignment,
}

impl Convergence {
    pub fn label(self) -> &'static str {
        match self {
            Convergence::Torque => "torque",
            Convergence::Alignment => "alignment",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "torque" => Some(Convergence::Torque),
            "alignment" => Some(Convergence::Alignment),
            _ => None,
        }
    }
}

/// Step size and stopping rule for [`relax`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorParams {
    /// Fixed RK4 step, seconds.
    pub dt: f64,
    /// Relaxation stops once every `|m_i × Ĥ_i|` is below this.
    pub torque_tol: f64,
    /// Upper bound on simulated time per relaxation, seconds.
    pub max_stage_time: f64,
    /// Magnets whose field magnitude is below this (A/m) count as relaxed.
    pub field_floor: f64,
    pub convergence: Convergence,
}

impl Default for IntegratorParams {
    fn default() -> Self {
        Self {
            dt: 1e-12,
            torque_tol: 1e-4,
            max_stage_time: 20e-9,
            field_floor: 1e-3,
            convergence: Convergence::Torque,
        }
    }
}

impl IntegratorParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("dt", self.dt), ("torque_tol", self.torque_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::NonPositive { name, value: v });
            }
        }
        if !(self.max_stage_time >= self.dt) {
            return Err(Error::InvalidParameter(
                "max_stage_time must be at least dt",
            ));
        }
        if !(self.field_floor >= 0.0) {
            return Err(Error::InvalidParameter("field_floor must be non-negative"));
        }
        Ok(())
    }

    /// Residual measured by the configured convergence rule.
    pub fn residual(&self, m: &[Vec3], h: &[Vec3]) -> f64 {
        match self.convergence {
            Convergence::Torque => max_torque(m, h, self.field_floor),
            Convergence::Alignment => max_misalignment(m, h, self.field_floor),
        }
    }

    /// Number of steps that fit in `max_stage_time`.
    pub fn max_steps(&self) -> usize {
        libm::ceil(self.max_stage_time / self.dt - 1e-9) as usize
    }
}

#[inline]
fn rhs_one(m: Vec3, h: Vec3, gamma_ll: f64, alpha: f64) -> Vec3 {
    let mxh = m.cross(h);
    let mxmxh = m.cross(mxh);
    (mxh + mxmxh * alpha) * (-gamma_ll)
}

/// `dm_i/dt = −γ_LL m_i × H_i − α γ_LL m_i × (m_i × H_i)` for unit `m_i`.
pub fn llg_rhs(state: &SpinState, fields: &[Vec3], params: &MaterialParams) -> Vec<Vec3> {
    let (g, a) = (params.gamma_ll(), params.alpha);
    state
        .as_slice()
        .iter()
        .zip(fields)
        .map(|(m, h)| rhs_one(*m, *h, g, a))
        .collect()
}

/// Scratch buffers for [`rk4_step_with`], sized to the number of magnets.
#[derive(Debug, Clone)]
pub struct Rk4Workspace {
    h: Vec<Vec3>,
    k: [Vec<Vec3>; 4],
    stage: Vec<Vec3>,
}

impl Rk4Workspace {
    pub fn new(n_mag: usize) -> Self {
        let z = alloc::vec![Vec3::ZERO; n_mag];
        Self {
            h: z.clone(),
            k: [z.clone(), z.clone(), z.clone(), z.clone()],
            stage: z,
        }
    }

    /// Field at the start of the last step taken.
    pub fn field(&self) -> &[Vec3] {
        &self.h
    }
}

/// One classical RK4 step of the LLG equation with a caller-supplied field
/// model, followed by renormalization of every moment.
///
/// `field(m, out)` must write the effective field for moments `m` into `out`.
pub fn rk4_step_with<F>(
    m: &mut [Vec3],
    dt: f64,
    params: &MaterialParams,
    ws: &mut Rk4Workspace,
    mut field: F,
) where
    F: FnMut(&[Vec3], &mut [Vec3]),
{
    field(m, &mut ws.h);
    advance(m, dt, params, ws, &mut field);
}

/// RK4 step assuming `ws.h` already holds the field at `m`.
fn advance<F>(
    m: &mut [Vec3],
    dt: f64,
    params: &MaterialParams,
    ws: &mut Rk4Workspace,
    field: &mut F,
) where
    F: FnMut(&[Vec3], &mut [Vec3]),
{
    let (g, a) = (params.gamma_ll(), params.alpha);
    let Rk4Workspace { h, k, stage } = ws;
    let [k1, k2, k3, k4] = k;
    let mut substage =
        |weight: f64, from: &[Vec3], into: &mut [Vec3], stage: &mut [Vec3], h: &mut [Vec3]| {
            for ((s, m0), kp) in stage.iter_mut().zip(m.iter()).zip(from) {
                *s = *m0 + *kp * (weight * dt);
            }
            field(stage, h);
            for ((out, s), hi) in into.iter_mut().zip(stage.iter()).zip(h.iter()) {
                *out = rhs_one(*s, *hi, g, a);
            }
        };
    for ((out, mi), hi) in k1.iter_mut().zip(m.iter()).zip(h.iter()) {
        *out = rhs_one(*mi, *hi, g, a);
    }
    substage(0.5, k1, k2, stage, h);
    substage(0.5, k2, k3, stage, h);
    substage(1.0, k3, k4, stage, h);
    let w = dt / 6.0;
    for (i, mi) in m.iter_mut().enumerate() {
        let inc = k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i];
        *mi = (*mi + inc * w).normalized();
    }
}

/// Advances every moment by one RK4 step of length `dt` with the effective
/// field recomputed at each substage.
pub fn rk4_step(
    state: &SpinState,
    ku: &AnisotropyVector,
    table: &DipoleCouplingTable,
    params: &MaterialParams,
    dt: f64,
) -> SpinState {
    let mut next = state.clone();
    let mut ws = Rk4Workspace::new(state.len());
    rk4_step_with(next.as_mut_slice(), dt, params, &mut ws, |m, out| {
        effective_field_into(m, ku.values(), table, params, out)
    });
    next
}

/// Largest normalized torque `|m_i × H_i| / |H_i|` over magnets whose field
/// is at least `field_floor`.
pub fn max_torque(m: &[Vec3], h: &[Vec3], field_floor: f64) -> f64 {
    m.iter()
        .zip(h)
        .filter_map(|(mi, hi)| {
            let hn = hi.norm();
            (hn >= field_floor && hn > 0.0).then(|| mi.cross(*hi).norm() / hn)
        })
        .fold(0.0, f64::max)
}

/// Largest angle between a moment and its effective field, over magnets whose
/// field is at least `field_floor`. Antiparallel alignment gives π.
pub fn max_misalignment(m: &[Vec3], h: &[Vec3], field_floor: f64) -> f64 {
    m.iter()
        .zip(h)
        .filter_map(|(mi, hi)| {
            let hn = hi.norm();
            (hn >= field_floor && hn > 0.0).then(|| mi.angle_to(*hi))
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelaxOutcome {
    pub state: SpinState,
    /// Whether the tolerance was met before the time limit.
    pub converged: bool,
    /// Simulated time spent, seconds.
    pub elapsed: f64,
    pub steps: usize,
}

/// Integrates with static anisotropy until the convergence residual drops
/// below `torque_tol` or `max_stage_time` has elapsed.
pub fn relax(
    state: &SpinState,
    ku: &AnisotropyVector,
    table: &DipoleCouplingTable,
    params: &MaterialParams,
    ip: &IntegratorParams,
) -> RelaxOutcome {
    relax_observed(state, ku, table, params, ip, |_| {})
}

/// [`relax`] with `observer` called on the moments after every step.
pub fn relax_observed<O>(
    state: &SpinState,
    ku: &AnisotropyVector,
    table: &DipoleCouplingTable,
    params: &MaterialParams,
    ip: &IntegratorParams,
    mut observer: O,
) -> RelaxOutcome
where
    O: FnMut(&[Vec3]),
{
    let mut m = state.clone();
    let mut ws = Rk4Workspace::new(m.len());
    let mut field =
        |x: &[Vec3], out: &mut [Vec3]| effective_field_into(x, ku.values(), table, params, out);
    let max_steps = ip.max_steps();
    let mut steps = 0;
    let converged = loop {
        field(m.as_slice(), &mut ws.h);
        if ip.residual(m.as_slice(), &ws.h) < ip.torque_tol {
            break true;
        }
        if steps >= max_steps {
            break false;
        }
        advance(m.as_mut_slice(), ip.dt, params, &mut ws, &mut field);
        steps += 1;
        observer(m.as_slice());
    };
    RelaxOutcome {
        state: m,
        converged,
        elapsed: steps as f64 * ip.dt,
        steps,
    }
}
