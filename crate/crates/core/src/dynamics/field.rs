use alloc::vec::Vec;

use super::{AnisotropyVector, DipoleCouplingTable, MaterialParams, SpinState, MU0};
use crate::vec3::Vec3;

/// Effective field on every magnet in A/m.
///
/// `H_i = (2 Ku_i / (μ0 Ms)) m_z,i ẑ + Ms V Σ_{j≠i} w_ji · m_j`. The dipole
/// sum carries the source volume so that each magnet acts as a point moment
/// `Ms V`.
pub fn effective_field(
    state: &SpinState,
    ku: &AnisotropyVector,
    table: &DipoleCouplingTable,
    params: &MaterialParams,
) -> Vec<Vec3> {
    let mut out = alloc::vec![Vec3::ZERO; state.len()];
    effective_field_into(state.as_slice(), ku.values(), table, params, &mut out);
    out
}

/// Allocation-free form of [`effective_field`].
pub fn effective_field_into(
    m: &[Vec3],
    ku: &[f64],
    table: &DipoleCouplingTable,
    params: &MaterialParams,
    out: &mut [Vec3],
) {
    debug_assert_eq!(m.len(), table.n_mag());
    debug_assert_eq!(ku.len(), m.len());
    let n = m.len();
    const STACK: usize = 32;
    if n <= STACK {
        let mut buf = [[0.0; STACK]; 6];
        let [mx, my, mz, hx, hy, hz] = &mut buf;
        fill(m, ku, table, params, out, [mx, my, mz, hx, hy, hz]);
    } else {
        let mut buf = alloc::vec![alloc::vec![0.0; n]; 6];
        let [mx, my, mz, hx, hy, hz] = &mut buf[..] else {
            unreachable!()
        };
        fill(m, ku, table, params, out, [mx, my, mz, hx, hy, hz]);
    }
}

fn fill(
    m: &[Vec3],
    ku: &[f64],
    table: &DipoleCouplingTable,
    params: &MaterialParams,
    out: &mut [Vec3],
    [mx, my, mz, hx, hy, hz]: [&mut [f64]; 6],
) {
    let dip_scale = params.ms * params.volume;
    let ani_scale = 2.0 / (MU0 * params.ms);
    for (k, v) in m.iter().enumerate() {
        mx[k] = v.x;
        my[k] = v.y;
        mz[k] = v.z;
    }
    table.dipole_sums(mx, my, mz, hx, hy, hz);
    for (i, h) in out.iter_mut().enumerate() {
        *h = Vec3::new(
            hx[i] * dip_scale,
            hy[i] * dip_scale,
            hz[i] * dip_scale + ani_scale * ku[i] * m[i].z,
        );
    }
}

/// Total energy in joules,
/// `E = −Σ_i Ku_i V m_z,i² − (μ0 Ms² V² / 2) Σ_{i≠j} m_i · w_ji · m_j`.
///
/// Its negative gradient with respect to `m_i`, divided by `μ0 Ms V`, is the
/// effective field.
pub fn total_energy(
    state: &SpinState,
    ku: &AnisotropyVector,
    table: &DipoleCouplingTable,
    params: &MaterialParams,
) -> f64 {
    energy_of(state.as_slice(), ku.values(), table, params)
}

/// [`total_energy`] for arbitrary (not necessarily unit) moment vectors.
pub fn energy_of(
    m: &[Vec3],
    ku: &[f64],
    table: &DipoleCouplingTable,
    params: &MaterialParams,
) -> f64 {
    let v = params.volume;
    let anisotropy: f64 = m.iter().zip(ku).map(|(mi, k)| -k * v * mi.z * mi.z).sum();
    let mut pair = 0.0;
    for (i, mi) in m.iter().enumerate() {
        for (j, mj) in m.iter().enumerate() {
            if i != j {
                pair += mi.dot(table.block(j, i).apply(*mj));
            }
        }
    }
    anisotropy - 0.5 * MU0 * params.ms * params.ms * v * v * pair
}
