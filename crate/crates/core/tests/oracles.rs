//! Numerical checks against independently coded reference solutions.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use nanomag_core::clocking::ku_vector_for_stage;
use nanomag_core::clocking::{StageSchedule, STAGES_PER_STEP};
use nanomag_core::dynamics::{
    effective_field, energy_of, relax_observed, rk4_step_with, AnisotropyVector,
    DipoleCouplingTable, IntegratorParams, MaterialParams, Rk4Workspace, SpinState, MU0,
};
use nanomag_core::geometry::ArrayGeometry;
use nanomag_core::readout::{train_readout, FeatureVector, DEFAULT_RIDGE};
use nanomag_core::vec3::Vec3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn reference() -> (ArrayGeometry, DipoleCouplingTable, MaterialParams) {
    let g = ArrayGeometry::grid(10, 2, 20e-9, 1e-9, 20e-9).unwrap();
    let t = DipoleCouplingTable::build(&g).unwrap();
    let p = MaterialParams::reference(g.volume());
    (g, t, p)
}

/// Damped precession of one moment about a constant field `h ẑ`:
/// the azimuth advances at `γ_LL h` and `tan(θ/2)` decays at `α γ_LL h`.
fn closed_form(theta0: f64, phi0: f64, h: f64, p: &MaterialParams, t: f64) -> Vec3 {
    let g = p.gamma_ll();
    let theta = 2.0 * ((theta0 / 2.0).tan() * (-p.alpha * g * h * t).exp()).atan();
    Vec3::from_spherical(theta, phi0 + g * h * t)
}

fn single_spin_error(dt: f64, t_end: f64) -> f64 {
    let p = MaterialParams::reference(1e-24);
    let h = 2.6e5;
    let (theta0, phi0) = (1.2, 0.4);
    let mut m = [Vec3::from_spherical(theta0, phi0)];
    let mut ws = Rk4Workspace::new(1);
    let steps = (t_end / dt).round() as usize;
    for _ in 0..steps {
        rk4_step_with(&mut m, dt, &p, &mut ws, |_, out| {
            out[0] = Vec3::new(0.0, 0.0, h)
        });
    }
    (m[0] - closed_form(theta0, phi0, h, &p, steps as f64 * dt)).norm()
}

#[test]
fn rk4_converges_at_fourth_order() {
    let start = Instant::now();
    let dts = [2e-12, 1e-12, 0.5e-12, 0.25e-12];
    let errors: Vec<f64> = dts
        .iter()
        .map(|&dt| single_spin_error(dt, 100e-12))
        .collect();
    // least-squares slope of log error against log dt
    let xs: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 4.0, ys.iter().sum::<f64>() / 4.0);
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let order = num / den;
    assert!(order >= 3.9, "order {order}, errors {errors:?}");
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn energy_never_increases_during_relaxation() {
    let (g, t, p) = reference();
    let schedule = StageSchedule::default_schedule();
    let ip = IntegratorParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..100 {
        let stage = 1 + trial % STAGES_PER_STEP;
        let ku = ku_vector_for_stage(&schedule, &g, stage, p.ku0).unwrap();
        let state = SpinState::random(g.n_mag(), &mut rng);
        let mut prev = energy_of(state.as_slice(), ku.values(), &t, &p);
        let mut worst = f64::NEG_INFINITY;
        relax_observed(&state, &ku, &t, &p, &ip, |m| {
            let e = energy_of(m, ku.values(), &t, &p);
            worst = worst.max((e - prev) / prev.abs());
            prev = e;
        });
        assert!(worst <= 1e-12, "trial {trial}: relative rise {worst}");
    }
}

#[test]
fn field_is_negative_energy_gradient() {
    let (g, t, p) = reference();
    let schedule = StageSchedule::default_schedule();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let step = 1e-6;
    let scale = MU0 * p.ms * p.volume;
    for trial in 0..20 {
        let ku = ku_vector_for_stage(&schedule, &g, 1 + trial % STAGES_PER_STEP, p.ku0).unwrap();
        let state = SpinState::random(g.n_mag(), &mut rng);
        let h = effective_field(&state, &ku, &t, &p);
        for i in 0..g.n_mag() {
            let mut grad = [0.0; 3];
            for (axis, gk) in grad.iter_mut().enumerate() {
                let mut plus = state.as_slice().to_vec();
                let mut minus = plus.clone();
                let e = [Vec3::X, Vec3::Y, Vec3::Z][axis] * step;
                plus[i] += e;
                minus[i] = minus[i] - e;
                *gk = (energy_of(&plus, ku.values(), &t, &p)
                    - energy_of(&minus, ku.values(), &t, &p))
                    / (2.0 * step);
            }
            let fd = Vec3::new(grad[0], grad[1], grad[2]) * (-1.0 / scale);
            let rel = (fd - h[i]).norm() / h[i].norm();
            assert!(
                rel < 1e-4,
                "trial {trial}, magnet {i}: relative error {rel}"
            );
        }
    }
}

#[test]
fn static_anisotropy_off_means_zero_anisotropy_energy() {
    let (g, t, p) = reference();
    let s = SpinState::uniform(g.n_mag(), Vec3::X);
    let free = AnisotropyVector::uniform(g.n_mag(), 0.0);
    let on = AnisotropyVector::uniform(g.n_mag(), p.ku0);
    // in-plane moments see no anisotropy energy either way
    assert_eq!(
        energy_of(s.as_slice(), free.values(), &t, &p),
        energy_of(s.as_slice(), on.values(), &t, &p)
    );
}

fn pinv_solution(rows: &[FeatureVector], targets: &[f64]) -> DVector<f64> {
    let d = rows[0].len();
    let x = DMatrix::from_fn(rows.len(), d, |r, c| rows[r].values()[c]);
    let f = DVector::from_column_slice(targets);
    x.pseudo_inverse(1e-12).unwrap() * f
}

#[test]
fn ridge_readout_matches_pseudoinverse() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..50 {
        let n_feat = rng.gen_range(1..=7);
        let n_rows = rng.gen_range(n_feat + 1..=32);
        let rows: Vec<FeatureVector> = (0..n_rows)
            .map(|_| FeatureVector::from_features((0..n_feat).map(|_| rng.gen::<f64>()).collect()))
            .collect();
        let targets: Vec<f64> = (0..n_rows).map(|_| rng.gen_range(0..2) as f64).collect();
        let refs: Vec<&FeatureVector> = rows.iter().collect();
        let w = train_readout(&refs, &targets, DEFAULT_RIDGE).unwrap();
        let oracle = pinv_solution(&rows, &targets);
        let diff: f64 = w
            .weights
            .iter()
            .zip(oracle.iter())
            .map(|(a, b)| (a - b).powi(2))
            .sum();
        let rel = diff.sqrt() / oracle.norm();
        assert!(
            rel < 1e-6,
            "trial {trial} ({n_rows}x{}): relative error {rel}",
            n_feat + 1
        );
    }
}
