use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;
use crate::vec3::{SymTensor, Vec3};

/// Point-dipole kernel `(3 r⊗r − |r|² I) / (4π |r|⁵)` in 1/m³.
pub fn dipole_tensor(r: Vec3) -> Result<SymTensor> {
    let r2 = r.norm_sq();
    if !(r2 > 0.0) || !r2.is_finite() {
        return Err(Error::ZeroSeparation);
    }
    let r5 = r2 * r2 * libm::sqrt(r2);
    let c = 1.0 / (4.0 * PI * r5);
    Ok(SymTensor {
        xx: c * (3.0 * r.x * r.x - r2),
        yy: c * (3.0 * r.y * r.y - r2),
        zz: c * (3.0 * r.z * r.z - r2),
        xy: c * 3.0 * r.x * r.y,
        xz: c * 3.0 * r.x * r.z,
        yz: c * 3.0 * r.y * r.z,
    })
}

/// Dipole kernels for every ordered pair of magnets; diagonal blocks are zero.
///
/// Components are stored as six dense `n × n` planes indexed
/// `[target * n + source]` so the field sum runs over contiguous memory.
#[derive(Debug, Clone, PartialEq)]
pub struct DipoleCouplingTable {
    n_mag: usize,
    planes: [Vec<f64>; 6],
    /// All centers share one z, so the xz and yz planes vanish.
    planar: bool,
}

impl DipoleCouplingTable {
    pub fn build(geom: &ArrayGeometry) -> Result<Self> {
        let n = geom.n_mag();
        let mut planes: [Vec<f64>; 6] = core::array::from_fn(|_| alloc::vec![0.0; n * n]);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let t = dipole_tensor(geom.displacement(j, i)?)?;
                    let k = i * n + j;
                    for (plane, v) in planes.iter_mut().zip([t.xx, t.yy, t.zz, t.xy, t.xz, t.yz]) {
                        plane[k] = v;
                    }
                }
            }
        }
        let planar = planes[4].iter().chain(&planes[5]).all(|&v| v == 0.0);
        Ok(Self {
            n_mag: n,
            planes,
            planar,
        })
    }

    pub fn n_mag(&self) -> usize {
        self.n_mag
    }

    /// Kernel mapping the moment of magnet `j` to the field at magnet `i`.
    pub fn block(&self, j: usize, i: usize) -> SymTensor {
        let k = i * self.n_mag + j;
        let [xx, yy, zz, xy, xz, yz] = &self.planes;
        SymTensor {
            xx: xx[k],
            yy: yy[k],
            zz: zz[k],
            xy: xy[k],
            xz: xz[k],
            yz: yz[k],
        }
    }

    /// Accumulates `Σ_j w_ji · m_j` into `hx, hy, hz` (one entry per
    /// target `i`), with the moments given as separate component slices.
    pub(crate) fn dipole_sums(
        &self,
        mx: &[f64],
        my: &[f64],
        mz: &[f64],
        hx: &mut [f64],
        hy: &mut [f64],
        hz: &mut [f64],
    ) {
        let n = self.n_mag;
        let [xx, yy, zz, xy, xz, yz] = &self.planes;
        let (hx, hy, hz) = (&mut hx[..n], &mut hy[..n], &mut hz[..n]);
        // the table is symmetric under index swap, so row j lists the
        // kernels from source j to every target
        if self.planar {
            for j in 0..n {
                let r = j * n..(j + 1) * n;
                let (xx, yy, zz, xy) = (&xx[r.clone()], &yy[r.clone()], &zz[r.clone()], &xy[r]);
                let (sx, sy, sz) = (mx[j], my[j], mz[j]);
                for i in 0..n {
                    hx[i] += xx[i] * sx + xy[i] * sy;
                    hy[i] += xy[i] * sx + yy[i] * sy;
                    hz[i] += zz[i] * sz;
                }
            }
            return;
        }
        for j in 0..n {
            let r = j * n..(j + 1) * n;
            let (xx, yy, zz) = (&xx[r.clone()], &yy[r.clone()], &zz[r.clone()]);
            let (xy, xz, yz) = (&xy[r.clone()], &xz[r.clone()], &yz[r]);
            let (sx, sy, sz) = (mx[j], my[j], mz[j]);
            for i in 0..n {
                hx[i] += xx[i] * sx + xy[i] * sy + xz[i] * sz;
                hy[i] += xy[i] * sx + yy[i] * sy + yz[i] * sz;
                hz[i] += xz[i] * sx + yz[i] * sy + zz[i] * sz;
            }
        }
    }
}
