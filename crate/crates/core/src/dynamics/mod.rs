//! Macrospin dynamics of the dipole-coupled array.
//!
//! Each magnet is a single moment of fixed magnitude `Ms * V`. The effective
//! field is a switchable perpendicular uniaxial anisotropy plus the point
//! dipole field of every other magnet, and the moments follow the
//! Landau-Lifshitz-Gilbert equation integrated with fixed-step RK4.

mod coupling;
mod field;
mod integrate;

pub use coupling::{dipole_tensor, DipoleCouplingTable};
pub use field::{effective_field, effective_field_into, energy_of, total_energy};
pub use integrate::{
    llg_rhs, max_misalignment, max_torque, relax, relax_observed, rk4_step, rk4_step_with,
    Convergence, IntegratorParams, RelaxOutcome, Rk4Workspace,
};

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::vec3::Vec3;

/// Vacuum permeability in T·m/A.
pub const MU0: f64 = 4.0e-7 * PI;

/// Material constants shared by every magnet in the array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    /// Saturation magnetization, A/m.
    pub ms: f64,
    /// Gyromagnetic ratio in Gilbert form, m/(A·s).
    pub gamma: f64,
    /// Gilbert damping.
    pub alpha: f64,
    /// Anisotropy energy density with no bias applied, J/m³.
    pub ku0: f64,
    /// Volume of one magnet, m³.
    pub volume: f64,
}

impl MaterialParams {
    /// Reference material: `Ms = 1.3e6 A/m`, `γ = 2.211e5 m/(A·s)`,
    /// `α = 0.5` and `Ku0 = 0.1 μ0 Ms²`.
    pub fn reference(volume: f64) -> Self {
        let ms = 1.3e6;
        Self {
            ms,
            gamma: 2.211e5,
            alpha: 0.5,
            ku0: 0.1 * MU0 * ms * ms,
            volume,
        }
    }

    /// Landau-Lifshitz form of the gyromagnetic ratio, `γ / (1 + α²)`.
    pub fn gamma_ll(&self) -> f64 {
        self.gamma / (1.0 + self.alpha * self.alpha)
    }

    /// Anisotropy field magnitude `2 Ku0 / (μ0 Ms)` of a fully switched-on magnet.
    pub fn anisotropy_field(&self) -> f64 {
        2.0 * self.ku0 / (MU0 * self.ms)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("ms", self.ms),
            ("gamma", self.gamma),
            ("alpha", self.alpha),
            ("volume", self.volume),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::NonPositive { name, value: v });
            }
        }
        if !(self.ku0 >= 0.0 && self.ku0.is_finite()) {
            return Err(Error::InvalidParameter(
                "ku0 must be finite and non-negative",
            ));
        }
        Ok(())
    }
}

/// Unit magnetization direction of every magnet.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinState(Vec<Vec3>);

impl SpinState {
    /// Every magnet pointing along `dir` (normalized).
    pub fn uniform(n_mag: usize, dir: Vec3) -> Self {
        SpinState(alloc::vec![dir.normalized(); n_mag])
    }

    /// Normalizes each vector; rejects zero or non-finite vectors.
    pub fn from_vectors(m: Vec<Vec3>) -> Result<Self> {
        let mut m = m;
        for v in m.iter_mut() {
            let n = v.norm();
            if !(n > 0.0 && n.is_finite()) {
                return Err(Error::InvalidParameter(
                    "magnetization vectors must be non-zero",
                ));
            }
            *v = *v * (1.0 / n);
        }
        Ok(SpinState(m))
    }

    /// Directions drawn uniformly from the unit sphere.
    pub fn random<R: rand::Rng + ?Sized>(n_mag: usize, rng: &mut R) -> Self {
        SpinState(
            (0..n_mag)
                .map(|_| {
                    let cos_theta: f64 = rng.gen_range(-1.0..=1.0);
                    let phi: f64 = rng.gen_range(0.0..2.0 * PI);
                    Vec3::from_spherical(libm::acos(cos_theta), phi)
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Vec3] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [Vec3] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<Vec3> {
        self.0
    }

    pub fn renormalize(&mut self) {
        for v in self.0.iter_mut() {
            *v = v.normalized();
        }
    }

    /// Largest angle in radians between corresponding moments of two states.
    pub fn max_angle_to(&self, other: &SpinState) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.angle_to(*b))
            .fold(0.0, f64::max)
    }
}

impl core::ops::Index<usize> for SpinState {
    type Output = Vec3;
    fn index(&self, i: usize) -> &Vec3 {
        &self.0[i]
    }
}

/// Per-magnet anisotropy energy density; each entry is either 0 or `Ku0`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnisotropyVector(Vec<f64>);

impl AnisotropyVector {
    pub fn uniform(n_mag: usize, ku0: f64) -> Self {
        AnisotropyVector(alloc::vec![ku0; n_mag])
    }

    /// `Ku0` where `on[i]` is set, 0 elsewhere.
    pub fn from_switches(on: &[bool], ku0: f64) -> Self {
        AnisotropyVector(on.iter().map(|&s| if s { ku0 } else { 0.0 }).collect())
    }

    /// Accepts raw values provided every entry is exactly 0 or `ku0`.
    pub fn from_values(values: Vec<f64>, ku0: f64) -> Result<Self> {
        if values.iter().all(|&k| k == 0.0 || k == ku0) {
            Ok(AnisotropyVector(values))
        } else {
            Err(Error::InvalidParameter(
                "anisotropy entries must be 0 or Ku0",
            ))
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_on(&self, i: usize) -> bool {
        self.0[i] != 0.0
    }
}
