//! Linear readout: feature extraction from snapshots, measurement rounding,
//! ridge-regularized least-squares training and scoring.

use alloc::vec::Vec;

use crate::dynamics::SpinState;
use crate::error::{Error, Result};

/// Default ridge term added to the normal equations.
pub const DEFAULT_RIDGE: f64 = 1e-8;

/// `(m_x,1 + 1)/2, ..., (m_x,N + 1)/2, 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    /// Appends the constant bias element to `features`.
    pub fn from_features(mut features: Vec<f64>) -> Self {
        features.push(1.0);
        FeatureVector(features)
    }

    /// All entries including the trailing bias.
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Entries without the trailing bias.
    pub fn features(&self) -> &[f64] {
        &self.0[..self.0.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Rounds every feature (not the bias) to `digits` significant figures.
    pub fn rounded(&self, digits: u32) -> FeatureVector {
        let mut v: Vec<f64> = self
            .features()
            .iter()
            .map(|&x| round_sig_figs(x, digits))
            .collect();
        v.push(1.0);
        FeatureVector(v)
    }

    pub fn dot(&self, w: &[f64]) -> f64 {
        self.0.iter().zip(w).map(|(a, b)| a * b).sum()
    }
}

pub fn extract_features(snapshot: &SpinState) -> FeatureVector {
    FeatureVector::from_features(
        snapshot
            .as_slice()
            .iter()
            .map(|m| 0.5 * m.x + 0.5)
            .collect(),
    )
}

/// Rounds `x` to `digits` significant decimal digits. Zero stays zero.
pub fn round_sig_figs(x: f64, digits: u32) -> f64 {
    if x == 0.0 || !x.is_finite() || digits == 0 {
        return x;
    }
    let exponent = libm::floor(libm::log10(libm::fabs(x))) as i32;
    let shift = digits as i32 - 1 - exponent;
    // scale by an exact power of ten and divide back so the result is the
    // double nearest the decimal value
    if shift >= 0 {
        let p = pow10(shift);
        libm::round(x * p) / p
    } else {
        let p = pow10(-shift);
        libm::round(x / p) * p
    }
}

fn pow10(n: i32) -> f64 {
    libm::pow(10.0, n as f64)
}

/// Feature rows with the input bit that drove each step.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReservoirTrace {
    rows: Vec<FeatureVector>,
    bits: Vec<u8>,
}

impl ReservoirTrace {
    pub fn new(rows: Vec<FeatureVector>, bits: Vec<u8>) -> Result<Self> {
        if rows.len() != bits.len() {
            return Err(Error::DimensionMismatch {
                what: "trace bits",
                expected: rows.len(),
                found: bits.len(),
            });
        }
        if let Some(first) = rows.first() {
            let n = first.len();
            if let Some(bad) = rows.iter().find(|r| r.len() != n) {
                return Err(Error::DimensionMismatch {
                    what: "feature row",
                    expected: n,
                    found: bad.len(),
                });
            }
        }
        Ok(Self { rows, bits })
    }

    pub fn rows(&self) -> &[FeatureVector] {
        &self.rows
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Copy with every feature rounded to `digits` significant figures.
    pub fn rounded(&self, digits: u32) -> ReservoirTrace {
        ReservoirTrace {
            rows: self.rows.iter().map(|r| r.rounded(digits)).collect(),
            bits: self.bits.clone(),
        }
    }
}

/// Trained output vector, bias last.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutWeights {
    pub weights: Vec<f64>,
}

impl ReadoutWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().all(|w| w.is_finite()) {
            Ok(Self { weights })
        } else {
            Err(Error::InvalidParameter("readout weights must be finite"))
        }
    }
}

/// Minimizes `Σ_k (f_k − x_k·w)² + ridge |w|²` over the given rows.
pub fn train_readout(
    rows: &[&FeatureVector],
    targets: &[f64],
    ridge: f64,
) -> Result<ReadoutWeights> {
    if rows.is_empty() {
        return Err(Error::Empty("training rows"));
    }
    if rows.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            what: "training targets",
            expected: rows.len(),
            found: targets.len(),
        });
    }
    if !(ridge >= 0.0) {
        return Err(Error::InvalidParameter("ridge must be non-negative"));
    }
    let d = rows[0].len();
    if let Some(bad) = rows.iter().find(|r| r.len() != d) {
        return Err(Error::DimensionMismatch {
            what: "feature row",
            expected: d,
            found: bad.len(),
        });
    }
    // normal equations (XᵀX + λI) w = Xᵀf, lower triangle only
    let mut a = alloc::vec![0.0; d * d];
    let mut b = alloc::vec![0.0; d];
    for (row, &f) in rows.iter().zip(targets) {
        let x = row.values();
        for r in 0..d {
            b[r] += x[r] * f;
            for c in 0..=r {
                a[r * d + c] += x[r] * x[c];
            }
        }
    }
    for r in 0..d {
        a[r * d + r] += ridge;
    }
    let w = solve_spd(&mut a, &mut b, d)?;
    ReadoutWeights::new(w)
}

/// Cholesky solve of a symmetric positive (semi)definite system given by its
/// lower triangle. Pivots that collapse to round-off are treated as zero
/// directions so rank-deficient systems still yield a finite solution.
fn solve_spd(a: &mut [f64], b: &mut [f64], d: usize) -> Result<Vec<f64>> {
    let scale = (0..d).map(|i| a[i * d + i]).fold(0.0, f64::max);
    let tiny = scale * 1e-15;
    let mut dead = alloc::vec![false; d];
    for j in 0..d {
        let mut diag = a[j * d + j];
        for k in 0..j {
            diag -= a[j * d + k] * a[j * d + k];
        }
        if !(diag > tiny) {
            dead[j] = true;
            a[j * d + j] = 1.0;
            for i in j + 1..d {
                a[i * d + j] = 0.0;
            }
            continue;
        }
        let l = libm::sqrt(diag);
        a[j * d + j] = l;
        for i in j + 1..d {
            let mut s = a[i * d + j];
            for k in 0..j {
                s -= a[i * d + k] * a[j * d + k];
            }
            a[i * d + j] = s / l;
        }
    }
    // L y = b
    for i in 0..d {
        if dead[i] {
            b[i] = 0.0;
            continue;
        }
        let mut s = b[i];
        for k in 0..i {
            s -= a[i * d + k] * b[k];
        }
        b[i] = s / a[i * d + i];
    }
    // Lᵀ w = y
    for i in (0..d).rev() {
        if dead[i] {
            b[i] = 0.0;
            continue;
        }
        let mut s = b[i];
        for k in i + 1..d {
            s -= a[k * d + i] * b[k];
        }
        b[i] = s / a[i * d + i];
    }
    if b.iter().all(|v| v.is_finite()) {
        Ok(b.to_vec())
    } else {
        Err(Error::InvalidParameter("readout system is not solvable"))
    }
}

/// `o_k = x_k · w` for every row.
pub fn evaluate(rows: &[&FeatureVector], w: &ReadoutWeights) -> Result<Vec<f64>> {
    rows.iter()
        .map(|r| {
            if r.len() == w.weights.len() {
                Ok(r.dot(&w.weights))
            } else {
                Err(Error::DimensionMismatch {
                    what: "readout weights",
                    expected: r.len(),
                    found: w.weights.len(),
                })
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorMode {
    /// Mean absolute difference between output and target.
    Raw,
    /// Outputs mapped to 1 at or above 0.5 and to 0 below, then as `Raw`.
    Thresholded,
}

impl ErrorMode {
    pub fn label(self) -> &'static str {
        match self {
            ErrorMode::Raw => "raw",
            ErrorMode::Thresholded => "thresholded",
        }
    }
}

/// `(1/N) Σ |f_k − o_k|`, optionally thresholding `o_k` first.
pub fn error_rate(outputs: &[f64], targets: &[f64], mode: ErrorMode) -> Result<f64> {
    if outputs.is_empty() {
        return Err(Error::Empty("outputs"));
    }
    if outputs.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            what: "targets",
            expected: outputs.len(),
            found: targets.len(),
        });
    }
    let total: f64 = outputs
        .iter()
        .zip(targets)
        .map(|(&o, &f)| {
            let o = match mode {
                ErrorMode::Raw => o,
                ErrorMode::Thresholded => {
                    if o >= 0.5 {
                        1.0
                    } else {
                        0.0
                    }
                }
            };
            libm::fabs(f - o)
        })
        .sum();
    Ok(total / outputs.len() as f64)
}
