//! Flat `section.key = value` experiment configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Every key has a
//! default, so an empty file describes the reference experiment.

use std::fmt::Write as _;
use std::ops::RangeInclusive;
use std::path::Path;
use std::str::FromStr;

use nanomag_core::clocking::{GroupSet, StageSchedule, STAGES_PER_STEP};
use nanomag_core::dynamics::{Convergence, IntegratorParams, MaterialParams, MU0};
use nanomag_core::geometry::{ArrayGeometry, Group};
use nanomag_core::task::{BoolFn, TaskSpec};

use crate::error::{HarnessError, Result};

/// Starting magnetization of every sequence, before warmup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialState {
    /// Every magnet along `+ẑ`.
    PlusZ,
    /// Independent uniform directions drawn from a sub-seed of `run.seed`.
    Random,
}

impl InitialState {
    pub fn label(self) -> &'static str {
        match self {
            InitialState::PlusZ => "plus_z",
            InitialState::Random => "random",
        }
    }
}

impl FromStr for InitialState {
    type Err = ();
    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        match s {
            "plus_z" => Ok(InitialState::PlusZ),
            "random" => Ok(InitialState::Random),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometryConfig {
    pub rows: usize,
    pub cols: usize,
    pub radius: f64,
    pub thickness: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaterialConfig {
    pub ms: f64,
    pub gamma: f64,
    pub alpha: f64,
    /// `None` means `0.1 μ0 Ms²`.
    pub ku0: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub n_train: usize,
    pub n_test: usize,
    pub n_test_sets: usize,
    pub warmup: usize,
    pub functions: Vec<BoolFn>,
    pub delays: RangeInclusive<usize>,
    pub round_digits: u32,
    pub round_train: bool,
    pub round_test: bool,
    pub ridge: f64,
    pub initial_state: InitialState,
    pub output_dir: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub geometry: GeometryConfig,
    pub material: MaterialConfig,
    pub integrator: IntegratorParams,
    pub schedule: StageSchedule,
    pub run: RunConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            geometry: GeometryConfig {
                rows: 10,
                cols: 2,
                radius: 20e-9,
                thickness: 1e-9,
                gap: 20e-9,
            },
            material: MaterialConfig {
                ms: 1.3e6,
                gamma: 2.211e5,
                alpha: 0.5,
                ku0: None,
            },
            integrator: IntegratorParams::default(),
            schedule: StageSchedule::default_schedule(),
            run: RunConfig {
                seed: 1,
                n_train: 100,
                n_test: 1000,
                n_test_sets: 4,
                warmup: 10,
                functions: BoolFn::ALL.to_vec(),
                delays: 0..=4,
                round_digits: 3,
                round_train: false,
                round_test: true,
                ridge: nanomag_core::readout::DEFAULT_RIDGE,
                initial_state: InitialState::PlusZ,
                output_dir: "results".into(),
            },
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| HarnessError::BadValue {
        key: key.into(),
        value: value.into(),
    })
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(HarnessError::BadValue {
            key: key.into(),
            value: value.into(),
        }),
    }
}

/// `a..b` or `a..=b` (both inclusive) or a single integer.
pub fn parse_delay_range(s: &str) -> Option<RangeInclusive<usize>> {
    let s = s.trim();
    let (lo, hi) = match s.split_once("..") {
        Some((lo, hi)) => (lo, hi.trim_start_matches('=')),
        None => (s, s),
    };
    let (lo, hi) = (lo.trim().parse().ok()?, hi.trim().parse().ok()?);
    (lo <= hi).then_some(lo..=hi)
}

fn parse_groups(key: &str, value: &str) -> Result<GroupSet> {
    let bad = || HarnessError::BadValue {
        key: key.into(),
        value: value.into(),
    };
    if value.is_empty() || value == "-" || value == "none" {
        return Ok(GroupSet::EMPTY);
    }
    value
        .trim_matches(|c| c == '{' || c == '}')
        .split(',')
        .try_fold(GroupSet::EMPTY, |set, g| {
            Ok(set.with(Group::parse(g.trim()).ok_or_else(bad)?))
        })
}

fn fmt_groups(set: GroupSet) -> String {
    if set.is_empty() {
        "-".into()
    } else {
        set.iter().map(|g| g.label()).collect::<Vec<_>>().join(",")
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut stages = *cfg.schedule.stages();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or(HarnessError::Syntax { line: n + 1 })?;
            let (key, value) = (key.trim(), value.trim());
            if let Some(p) = key.strip_prefix("schedule.stage") {
                let p: usize = p
                    .parse()
                    .map_err(|_| HarnessError::UnknownKey(key.into()))?;
                if !(1..=STAGES_PER_STEP).contains(&p) {
                    return Err(HarnessError::UnknownKey(key.into()));
                }
                stages[p - 1] = parse_groups(key, value)?;
                continue;
            }
            cfg.set(key, value)?;
        }
        cfg.schedule = StageSchedule::new(stages)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let (g, m, i, r) = (
            &mut self.geometry,
            &mut self.material,
            &mut self.integrator,
            &mut self.run,
        );
        match key {
            "geometry.rows" => g.rows = parse_value(key, value)?,
            "geometry.cols" => g.cols = parse_value(key, value)?,
            "geometry.radius" => g.radius = parse_value(key, value)?,
            "geometry.thickness" => g.thickness = parse_value(key, value)?,
            "geometry.gap" => g.gap = parse_value(key, value)?,
            "material.ms" => m.ms = parse_value(key, value)?,
            "material.gamma" => m.gamma = parse_value(key, value)?,
            "material.alpha" => m.alpha = parse_value(key, value)?,
            "material.ku0" => m.ku0 = Some(parse_value(key, value)?),
            "integrator.dt" => i.dt = parse_value(key, value)?,
            "integrator.torque_tol" => i.torque_tol = parse_value(key, value)?,
            "integrator.max_stage_time" => i.max_stage_time = parse_value(key, value)?,
            "integrator.field_floor" => i.field_floor = parse_value(key, value)?,
            "integrator.convergence" => {
                i.convergence = Convergence::parse(value).ok_or_else(|| HarnessError::BadValue {
                    key: key.into(),
                    value: value.into(),
                })?
            }
            "run.seed" => r.seed = parse_value(key, value)?,
            "run.n_train" => r.n_train = parse_value(key, value)?,
            "run.n_test" => r.n_test = parse_value(key, value)?,
            "run.n_test_sets" => r.n_test_sets = parse_value(key, value)?,
            "run.warmup" => r.warmup = parse_value(key, value)?,
            "run.functions" => {
                r.functions = value
                    .split(',')
                    .map(|f| {
                        BoolFn::parse(f.trim()).ok_or_else(|| HarnessError::BadValue {
                            key: key.into(),
                            value: value.into(),
                        })
                    })
                    .collect::<Result<_>>()?
            }
            "run.delays" => {
                r.delays = parse_delay_range(value).ok_or_else(|| HarnessError::BadValue {
                    key: key.into(),
                    value: value.into(),
                })?
            }
            "run.round_digits" => r.round_digits = parse_value(key, value)?,
            "run.round_train" => r.round_train = parse_bool(key, value)?,
            "run.round_test" => r.round_test = parse_bool(key, value)?,
            "run.ridge" => r.ridge = parse_value(key, value)?,
            "run.initial_state" => r.initial_state = parse_value(key, value)?,
            "run.output_dir" => r.output_dir = value.into(),
            _ => return Err(HarnessError::UnknownKey(key.into())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let r = &self.run;
        for (name, v) in [
            ("run.n_train", r.n_train),
            ("run.n_test", r.n_test),
            ("run.n_test_sets", r.n_test_sets),
            ("run.round_digits", r.round_digits as usize),
        ] {
            if v == 0 {
                return Err(HarnessError::Invalid(format!("{name} must be positive")));
            }
        }
        if r.functions.is_empty() {
            return Err(HarnessError::Invalid("run.functions is empty".into()));
        }
        if !(r.ridge >= 0.0) {
            return Err(HarnessError::Invalid(
                "run.ridge must be non-negative".into(),
            ));
        }
        self.build_geometry()?;
        self.material_params()?.validate()?;
        self.integrator.validate()?;
        Ok(())
    }

    pub fn build_geometry(&self) -> Result<ArrayGeometry> {
        let g = &self.geometry;
        Ok(ArrayGeometry::grid(
            g.rows,
            g.cols,
            g.radius,
            g.thickness,
            g.gap,
        )?)
    }

    pub fn ku0(&self) -> f64 {
        let ms = self.material.ms;
        self.material.ku0.unwrap_or(0.1 * MU0 * ms * ms)
    }

    pub fn material_params(&self) -> Result<MaterialParams> {
        let geom = self.build_geometry()?;
        Ok(MaterialParams {
            ms: self.material.ms,
            gamma: self.material.gamma,
            alpha: self.material.alpha,
            ku0: self.ku0(),
            volume: geom.volume(),
        })
    }

    pub fn tasks(&self) -> Vec<TaskSpec> {
        self.run
            .functions
            .iter()
            .flat_map(|&f| self.run.delays.clone().map(move |n| TaskSpec::new(f, n)))
            .collect()
    }

    /// The effective configuration with every key spelled out; parsing it
    /// back yields an equal config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let (g, m, i, r) = (&self.geometry, &self.material, &self.integrator, &self.run);
        let mut kv = |k: &str, v: &dyn std::fmt::Display| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("geometry.rows", &g.rows);
        kv("geometry.cols", &g.cols);
        kv("geometry.radius", &g.radius);
        kv("geometry.thickness", &g.thickness);
        kv("geometry.gap", &g.gap);
        kv("material.ms", &m.ms);
        kv("material.gamma", &m.gamma);
        kv("material.alpha", &m.alpha);
        kv("material.ku0", &self.ku0());
        kv("integrator.dt", &i.dt);
        kv("integrator.torque_tol", &i.torque_tol);
        kv("integrator.max_stage_time", &i.max_stage_time);
        kv("integrator.field_floor", &i.field_floor);
        kv("integrator.convergence", &i.convergence.label());
        for (p, set) in self.schedule.stages().iter().enumerate() {
            kv(&format!("schedule.stage{}", p + 1), &fmt_groups(*set));
        }
        kv("run.seed", &r.seed);
        kv("run.n_train", &r.n_train);
        kv("run.n_test", &r.n_test);
        kv("run.n_test_sets", &r.n_test_sets);
        kv("run.warmup", &r.warmup);
        let functions: Vec<&str> = r.functions.iter().map(|f| f.label()).collect();
        kv("run.functions", &functions.join(","));
        kv(
            "run.delays",
            &format!("{}..={}", r.delays.start(), r.delays.end()),
        );
        kv("run.round_digits", &r.round_digits);
        kv("run.round_train", &r.round_train);
        kv("run.round_test", &r.round_test);
        kv("run.ridge", &r.ridge);
        kv("run.initial_state", &r.initial_state.label());
        kv("run.output_dir", &r.output_dir);
        s
    }
}
