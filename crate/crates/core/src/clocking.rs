//! Per-step update protocol: inject the input bit, then walk the array
//! through seven anisotropy stages, relaxing after each change.
//!
//! The readout snapshot is the state at the end of stage 3.

use alloc::vec::Vec;
use core::fmt;

use crate::dynamics::{
    relax, AnisotropyVector, DipoleCouplingTable, IntegratorParams, MaterialParams, SpinState,
};
use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, Group};
use crate::vec3::Vec3;

pub const STAGES_PER_STEP: usize = 7;

/// Stage after which the readout snapshot is taken (1-based).
pub const SNAPSHOT_STAGE: usize = 3;

/// Set of clocking groups, stored as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct GroupSet(u8);

impl GroupSet {
    pub const EMPTY: GroupSet = GroupSet(0);

    pub fn of(groups: &[Group]) -> Self {
        groups.iter().fold(Self::EMPTY, |s, g| s.with(*g))
    }

    pub fn with(self, g: Group) -> Self {
        GroupSet(self.0 | (1 << g.index()))
    }

    pub fn contains(self, g: Group) -> bool {
        self.0 & (1 << g.index()) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Group> {
        Group::ALL.into_iter().filter(move |g| self.contains(*g))
    }

    /// Groups in exactly one of the two sets.
    pub fn symmetric_difference(self, other: GroupSet) -> GroupSet {
        GroupSet(self.0 ^ other.0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }
}

impl fmt::Display for GroupSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, g) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{g}")?;
        }
        f.write_str("}")
    }
}

/// For each of the seven stages, the groups whose anisotropy is switched
/// off. Every other group sits at `Ku0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageSchedule {
    off: [GroupSet; STAGES_PER_STEP],
}

impl StageSchedule {
    /// Stage 1 must leave every group switched on.
    pub fn new(off: [GroupSet; STAGES_PER_STEP]) -> Result<Self> {
        if !off[0].is_empty() {
            return Err(Error::InvalidParameter(
                "stage 1 must keep every group at Ku0",
            ));
        }
        Ok(Self { off })
    }

    /// `{}`, `{II,III}`, `{III}`, `{I,III}`, `{I}`, `{I,II}`, `{II}`.
    ///
    /// Stage 2 frees the two buffer groups so they pick up the data held by
    /// group I, stage 3 latches group II, and stage 4 frees group I for a
    /// shift of one row. Stages 5 to 7 continue the same one-group-at-a-time
    /// cadence until every group is switched on again.
    pub fn default_schedule() -> Self {
        use Group::*;
        Self {
            off: [
                GroupSet::EMPTY,
                GroupSet::of(&[II, III]),
                GroupSet::of(&[III]),
                GroupSet::of(&[I, III]),
                GroupSet::of(&[I]),
                GroupSet::of(&[I, II]),
                GroupSet::of(&[II]),
            ],
        }
    }

    /// Off-set of 1-based stage `p`.
    pub fn off_set(&self, p: usize) -> Result<GroupSet> {
        if (1..=STAGES_PER_STEP).contains(&p) {
            Ok(self.off[p - 1])
        } else {
            Err(Error::StageOutOfRange(p))
        }
    }

    pub fn stages(&self) -> &[GroupSet; STAGES_PER_STEP] {
        &self.off
    }
}

impl Default for StageSchedule {
    fn default() -> Self {
        Self::default_schedule()
    }
}

/// Anisotropy of every magnet during 1-based stage `p`.
pub fn ku_vector_for_stage(
    schedule: &StageSchedule,
    geom: &ArrayGeometry,
    p: usize,
    ku0: f64,
) -> Result<AnisotropyVector> {
    let off = schedule.off_set(p)?;
    let on: Vec<bool> = geom.groups().iter().map(|g| !off.contains(*g)).collect();
    Ok(AnisotropyVector::from_switches(&on, ku0))
}

/// Sets the input magnet to `+ẑ` for bit 0 or `−ẑ` for bit 1.
pub fn inject_input(state: &SpinState, geom: &ArrayGeometry, bit: u8) -> Result<SpinState> {
    let dir = match bit {
        0 => Vec3::Z,
        1 => -Vec3::Z,
        b => return Err(Error::InvalidBit(b)),
    };
    if state.len() != geom.n_mag() {
        return Err(Error::DimensionMismatch {
            what: "spin state",
            expected: geom.n_mag(),
            found: state.len(),
        });
    }
    let mut next = state.clone();
    next.as_mut_slice()[geom.input_index()] = dir;
    Ok(next)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    /// State after stage 7.
    pub final_state: SpinState,
    /// State after stage 3.
    pub snapshot: SpinState,
    /// Whether each stage's relaxation met the torque tolerance.
    pub converged: [bool; STAGES_PER_STEP],
    /// Simulated time spent in each stage, seconds.
    pub stage_time: [f64; STAGES_PER_STEP],
}

impl StepResult {
    pub fn non_converged_stages(&self) -> usize {
        self.converged.iter().filter(|c| !**c).count()
    }
}

/// Everything needed to drive the array: layout, coupling, material,
/// integrator settings and the clock schedule.
#[derive(Debug, Clone)]
pub struct Reservoir {
    geom: ArrayGeometry,
    table: DipoleCouplingTable,
    params: MaterialParams,
    integrator: IntegratorParams,
    schedule: StageSchedule,
    stage_ku: Vec<AnisotropyVector>,
}

impl Reservoir {
    pub fn new(
        geom: ArrayGeometry,
        params: MaterialParams,
        integrator: IntegratorParams,
        schedule: StageSchedule,
    ) -> Result<Self> {
        params.validate()?;
        integrator.validate()?;
        let table = DipoleCouplingTable::build(&geom)?;
        let stage_ku = (1..=STAGES_PER_STEP)
            .map(|p| ku_vector_for_stage(&schedule, &geom, p, params.ku0))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            geom,
            table,
            params,
            integrator,
            schedule,
            stage_ku,
        })
    }

    pub fn geometry(&self) -> &ArrayGeometry {
        &self.geom
    }

    pub fn table(&self) -> &DipoleCouplingTable {
        &self.table
    }

    pub fn params(&self) -> &MaterialParams {
        &self.params
    }

    pub fn integrator(&self) -> &IntegratorParams {
        &self.integrator
    }

    pub fn schedule(&self) -> &StageSchedule {
        &self.schedule
    }

    /// Anisotropy vector of 1-based stage `p`.
    pub fn stage_ku(&self, p: usize) -> Result<&AnisotropyVector> {
        self.schedule.off_set(p)?;
        Ok(&self.stage_ku[p - 1])
    }

    /// Injects `bit`, then relaxes through all seven stages.
    pub fn run_step(&self, state: &SpinState, bit: u8) -> Result<StepResult> {
        let mut current = inject_input(state, &self.geom, bit)?;
        let mut snapshot = None;
        let mut converged = [false; STAGES_PER_STEP];
        let mut stage_time = [0.0; STAGES_PER_STEP];
        for (p, ku) in self.stage_ku.iter().enumerate() {
            let out = relax(&current, ku, &self.table, &self.params, &self.integrator);
            converged[p] = out.converged;
            stage_time[p] = out.elapsed;
            current = out.state;
            if p + 1 == SNAPSHOT_STAGE {
                snapshot = Some(current.clone());
            }
        }
        Ok(StepResult {
            final_state: current,
            snapshot: snapshot.expect("schedule has at least three stages"),
            converged,
            stage_time,
        })
    }

    /// Runs one step per bit, threading the state from step to step.
    pub fn run_sequence(&self, initial: &SpinState, bits: &[u8]) -> Result<Vec<StepResult>> {
        if bits.is_empty() {
            return Err(Error::Empty("input bits"));
        }
        let mut out: Vec<StepResult> = Vec::with_capacity(bits.len());
        for &bit in bits {
            let state = out.last().map_or(initial, |r| &r.final_state);
            let step = self.run_step(state, bit)?;
            out.push(step);
        }
        Ok(out)
    }
}
