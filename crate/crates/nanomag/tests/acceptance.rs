//! Acceptance checks for the reference experiment.
//!
//! Prints one PASS/FAIL line per criterion, then the overall verdict: the
//! build is accepted when criteria 1 and 2 pass, or when the fallback
//! (criterion 3) holds. Exit status is nonzero when the verdict fails.
//!
//! Run with `cargo test -p nanomag --release --test acceptance`.

use std::fs;
use std::process::{Command, ExitCode};
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use nanomag::experiment::{build_reservoir, run_experiment};
use nanomag::report::schedule_table;
use nanomag::{ExperimentConfig, ResultRow};
use nanomag_core::clocking::{ku_vector_for_stage, StageSchedule, STAGES_PER_STEP};
use nanomag_core::dynamics::{
    effective_field, energy_of, relax_observed, rk4_step_with, DipoleCouplingTable,
    IntegratorParams, MaterialParams, Rk4Workspace, SpinState, MU0,
};
use nanomag_core::geometry::ArrayGeometry;
use nanomag_core::readout::{train_readout, ErrorMode, FeatureVector, DEFAULT_RIDGE};
use nanomag_core::task::{generate_bits, BoolFn};
use nanomag_core::vec3::Vec3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const THRESHOLDED_MAX: f64 = 0.02;
const DELAY4_EXPECTED: [(BoolFn, f64); 3] = [
    (BoolFn::And, 0.253),
    (BoolFn::Or, 0.249),
    (BoolFn::Xor, 0.502),
];
const DELAY4_TOL: f64 = 0.05;
const DELAY4_STD_MAX: f64 = 0.03;
const FALLBACK_MAX: f64 = 0.05;
const ORDER_MIN: f64 = 3.9;
const ENERGY_RISE_TOL: f64 = 1e-12;
const FD_STEP: f64 = 1e-6;
const FD_TOL: f64 = 1e-4;
const ORACLE_TOL: f64 = 1e-6;
const ECHO_ANGLE: f64 = 1e-3;
const ECHO_STEPS: usize = 10;
const ECHO_BITS: usize = 50;

struct Check {
    id: usize,
    pass: bool,
}

fn report(id: usize, name: &str, pass: bool, detail: String) -> Check {
    println!(
        "[{}] {id}. {name}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    Check { id, pass }
}

fn find(rows: &[ResultRow], f: BoolFn, n: usize, mode: ErrorMode) -> &ResultRow {
    rows.iter()
        .find(|r| r.task.function == f && r.task.delay == n && r.mode == mode)
        .expect("task present in results")
}

fn reference() -> (ArrayGeometry, DipoleCouplingTable, MaterialParams) {
    let g = ArrayGeometry::grid(10, 2, 20e-9, 1e-9, 20e-9).unwrap();
    let t = DipoleCouplingTable::build(&g).unwrap();
    let p = MaterialParams::reference(g.volume());
    (g, t, p)
}

fn delay_reproduction(rows: &[ResultRow]) -> Vec<Check> {
    let mut worst = (0.0f64, String::new());
    for f in BoolFn::ALL {
        for n in 0..=3 {
            let e = find(rows, f, n, ErrorMode::Thresholded).error_mean;
            if e >= worst.0 {
                worst = (e, format!("{f} n={n}"));
            }
        }
    }
    let c1 = report(
        1,
        "thresholded error <= 0.02 at n = 0..3",
        worst.0 <= THRESHOLDED_MAX,
        format!("worst {:.4} ({})", worst.0, worst.1),
    );
    let mut pass = true;
    let mut parts = Vec::new();
    for (f, expected) in DELAY4_EXPECTED {
        let r = find(rows, f, 4, ErrorMode::Raw);
        pass &= (r.error_mean - expected).abs() <= DELAY4_TOL && r.error_std <= DELAY4_STD_MAX;
        parts.push(format!(
            "{f} {:.4}±{:.4} (want {expected}±{DELAY4_TOL})",
            r.error_mean, r.error_std
        ));
    }
    let c2 = report(2, "raw error at n = 4", pass, parts.join(", "));
    vec![c1, c2]
}

fn integrator_order() -> Check {
    let start = Instant::now();
    let p = MaterialParams::reference(1e-24);
    let h = 2.6e5;
    let (theta0, phi0, t_end): (f64, f64, f64) = (1.2, 0.4, 100e-12);
    let g = p.gamma_ll();
    let dts = [2e-12, 1e-12, 0.5e-12, 0.25e-12];
    let errors: Vec<f64> = dts
        .iter()
        .map(|&dt| {
            let mut m = [Vec3::from_spherical(theta0, phi0)];
            let mut ws = Rk4Workspace::new(1);
            let steps = (t_end / dt).round() as usize;
            for _ in 0..steps {
                rk4_step_with(&mut m, dt, &p, &mut ws, |_, out| {
                    out[0] = Vec3::new(0.0, 0.0, h)
                });
            }
            let t = steps as f64 * dt;
            let theta = 2.0 * ((theta0 / 2.0).tan() * (-p.alpha * g * h * t).exp()).atan();
            (m[0] - Vec3::from_spherical(theta, phi0 + g * h * t)).norm()
        })
        .collect();
    let xs: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 4.0, ys.iter().sum::<f64>() / 4.0);
    let order = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>();
    let secs = start.elapsed().as_secs_f64();
    report(
        4,
        "RK4 order vs closed-form single spin",
        order >= ORDER_MIN && secs < 1.0,
        format!("order {order:.3} (min {ORDER_MIN}), {secs:.3} s"),
    )
}

fn energy_checks() -> Check {
    let (geom, t, p) = reference();
    let schedule = StageSchedule::default_schedule();
    let ip = IntegratorParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst_rise = f64::NEG_INFINITY;
    let mut worst_fd = 0.0f64;
    let scale = MU0 * p.ms * p.volume;
    for trial in 0..100 {
        let ku = ku_vector_for_stage(&schedule, &geom, 1 + trial % STAGES_PER_STEP, p.ku0).unwrap();
        let state = SpinState::random(geom.n_mag(), &mut rng);
        let h = effective_field(&state, &ku, &t, &p);
        for i in 0..geom.n_mag() {
            let mut grad = Vec3::ZERO;
            for axis in [Vec3::X, Vec3::Y, Vec3::Z] {
                let mut plus = state.as_slice().to_vec();
                let mut minus = plus.clone();
                plus[i] = plus[i] + axis * FD_STEP;
                minus[i] = minus[i] - axis * FD_STEP;
                let d = (energy_of(&plus, ku.values(), &t, &p)
                    - energy_of(&minus, ku.values(), &t, &p))
                    / (2.0 * FD_STEP);
                grad = grad + axis * d;
            }
            worst_fd = worst_fd.max((grad * (-1.0 / scale) - h[i]).norm() / h[i].norm());
        }
        let mut prev = energy_of(state.as_slice(), ku.values(), &t, &p);
        relax_observed(&state, &ku, &t, &p, &ip, |m| {
            let e = energy_of(m, ku.values(), &t, &p);
            worst_rise = worst_rise.max((e - prev) / prev.abs());
            prev = e;
        });
    }
    report(
        5,
        "energy descent and field = -grad E",
        worst_rise <= ENERGY_RISE_TOL && worst_fd <= FD_TOL,
        format!("max relative rise {worst_rise:.2e} (tol {ENERGY_RISE_TOL:e}), max field error {worst_fd:.2e} (tol {FD_TOL:e})"),
    )
}

fn readout_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n_feat = rng.gen_range(1..=7);
        let n_rows = rng.gen_range(n_feat + 1..=32);
        let rows: Vec<FeatureVector> = (0..n_rows)
            .map(|_| FeatureVector::from_features((0..n_feat).map(|_| rng.gen::<f64>()).collect()))
            .collect();
        let targets: Vec<f64> = (0..n_rows).map(|_| rng.gen_range(0..2) as f64).collect();
        let refs: Vec<&FeatureVector> = rows.iter().collect();
        let w = train_readout(&refs, &targets, DEFAULT_RIDGE).unwrap();
        let x = DMatrix::from_fn(n_rows, n_feat + 1, |r, c| rows[r].values()[c]);
        let oracle = x.pseudo_inverse(1e-12).unwrap() * DVector::from_column_slice(&targets);
        let diff = (DVector::from_column_slice(&w.weights) - &oracle).norm();
        worst = worst.max(diff / oracle.norm());
    }
    report(
        6,
        "ridge readout vs pseudoinverse oracle",
        worst <= ORACLE_TOL,
        format!("max relative weight error {worst:.2e} over 50 instances (tol {ORACLE_TOL:e})"),
    )
}

fn echo_state(cfg: &ExperimentConfig) -> Check {
    let reservoir = build_reservoir(cfg).unwrap();
    let n = reservoir.geometry().n_mag();
    let a = SpinState::random(n, &mut ChaCha8Rng::seed_from_u64(101));
    let b = SpinState::random(n, &mut ChaCha8Rng::seed_from_u64(202));
    let bits = generate_bits(ECHO_BITS, 303).unwrap();
    let ra = reservoir.run_sequence(&a, &bits).unwrap();
    let rb = reservoir.run_sequence(&b, &bits).unwrap();
    let dist: Vec<f64> = ra
        .iter()
        .zip(&rb)
        .map(|(x, y)| x.snapshot.max_angle_to(&y.snapshot))
        .collect();
    // first step from which the distance stays below the threshold
    let settled = (0..dist.len()).find(|&k| dist[k..].iter().all(|&d| d < ECHO_ANGLE));
    let at = |k: usize| dist.get(k - 1).copied().unwrap_or(f64::NAN);
    report(
        7,
        "echo state: snapshots of two random starts merge",
        settled.is_some_and(|k| k < ECHO_STEPS),
        format!(
            "distance after step 1 {:.3e}, step 10 {:.3e}, step 50 {:.3e} rad; settled {}",
            at(1),
            at(ECHO_STEPS),
            at(ECHO_BITS),
            settled.map_or("never".to_string(), |k| format!("at step {}", k + 1))
        ),
    )
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("reference.conf");
    fs::write(&conf, "").unwrap();
    let mut files = Vec::new();
    for (k, threads) in ["1", "1", "4"].iter().enumerate() {
        let out = dir.path().join(format!("run{k}"));
        let status = Command::new(env!("CARGO_BIN_EXE_nanomag"))
            .args([
                "run",
                conf.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
            ])
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .unwrap()
            .status;
        files.push(
            status
                .success()
                .then(|| fs::read(out.join("results.csv")).unwrap()),
        );
    }
    let pass = files[0].is_some() && files.iter().all(|f| f == &files[0]);
    report(
        8,
        "byte-identical results across runs and thread counts",
        pass,
        format!("{} runs compared (threads 1, 1, 4)", files.len()),
    )
}

fn main() -> ExitCode {
    let cfg = ExperimentConfig::default();
    let out = run_experiment(&cfg).expect("reference experiment");
    let mut checks = delay_reproduction(&out.results);
    checks.push(integrator_order());
    checks.push(energy_checks());
    checks.push(readout_oracle());
    checks.push(echo_state(&cfg));
    checks.push(determinism());

    let ok = |id: usize| checks.iter().any(|c| c.id == id && c.pass);
    let early = [BoolFn::And, BoolFn::Or, BoolFn::Xor]
        .into_iter()
        .flat_map(|f| (0..=1).map(move |n| (f, n)))
        .map(|(f, n)| find(&out.results, f, n, ErrorMode::Thresholded).error_mean)
        .fold(0.0f64, f64::max);
    let properties = (4..=8).all(ok);
    let fallback = properties && early <= FALLBACK_MAX;
    let c3 = report(
        3,
        "fallback: criteria 4-8 pass and n = 0,1 thresholded error <= 0.05",
        fallback,
        format!(
            "properties {}, worst n<=1 error {early:.4}",
            if properties { "pass" } else { "fail" }
        ),
    );
    if !(ok(1) && ok(2)) {
        println!("schedule audit:");
        for line in schedule_table(&cfg).unwrap().lines() {
            println!("    {line}");
        }
    }
    let accepted = (ok(1) && ok(2)) || c3.pass;
    println!(
        "verdict: {} (non-converged stages in reference run: {})",
        if accepted { "ACCEPTED" } else { "NOT ACCEPTED" },
        out.nonconverged
    );
    if accepted {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
