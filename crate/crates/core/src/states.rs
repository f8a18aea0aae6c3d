//! Thermal-state parameters, particle-basis spectra and covariance data.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::logmath::ln_one_minus_exp_neg;

/// Inverse temperature `s` of one mode, `0 < s <= inf`.
///
/// `s = inf` is the vacuum mode and is stored as an explicit tag, never as a
/// large float.
#[derive(Clone, Copy, PartialEq)]
pub struct InverseTemperature(Option<f64>);

impl InverseTemperature {
    /// Accepts any positive value; `f64::INFINITY` yields the vacuum mode.
    pub fn new(value: f64) -> Result<Self> {
        if value == f64::INFINITY {
            Ok(Self(None))
        } else if value.is_finite() && value > 0.0 {
            Ok(Self(Some(value)))
        } else {
            Err(Error::InvalidTemperature(value))
        }
    }

    pub fn vacuum() -> Self {
        Self(None)
    }

    pub fn is_vacuum(self) -> bool {
        self.0.is_none()
    }

    /// The finite value, or `None` for the vacuum mode.
    pub fn finite(self) -> Option<f64> {
        self.0
    }

    /// The value as a float, `f64::INFINITY` for the vacuum mode.
    pub fn value(self) -> f64 {
        self.0.unwrap_or(f64::INFINITY)
    }

    /// `self * alpha`; the vacuum mode is a fixed point.
    pub fn scaled(self, alpha: f64) -> Result<Self> {
        check_positive("alpha", alpha)?;
        match self.0 {
            None => Ok(self),
            Some(s) => Self::new(s * alpha),
        }
    }
}

impl fmt::Debug for InverseTemperature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some(s) => write!(f, "{s}"),
            None => f.write_str("inf"),
        }
    }
}

/// Inverse temperatures of an `n`-mode thermal state, `n >= 1`.
#[derive(Clone, PartialEq, Debug)]
pub struct ModeVector(Vec<InverseTemperature>);

impl ModeVector {
    pub fn new(temps: Vec<InverseTemperature>) -> Result<Self> {
        if temps.is_empty() {
            return Err(Error::NoModes);
        }
        Ok(Self(temps))
    }

    /// Builds from raw floats, `f64::INFINITY` marking vacuum modes.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        let temps = values
            .iter()
            .map(|&v| InverseTemperature::new(v))
            .collect::<Result<Vec<_>>>()?;
        Self::new(temps)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn temps(&self) -> &[InverseTemperature] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = InverseTemperature> + '_ {
        self.0.iter().copied()
    }

    /// True when every mode has finite inverse temperature.
    pub fn is_faithful(&self) -> bool {
        self.0.iter().all(|t| !t.is_vacuum())
    }

    /// Indices of the vacuum modes.
    pub fn vacuum_modes(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, t)| t.is_vacuum())
            .map(|(j, _)| j)
            .collect()
    }

    pub(crate) fn check_len(&self, other: usize) -> Result<()> {
        if self.len() != other {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                found: other,
            });
        }
        Ok(())
    }
}

/// Particle-number occupation `k = (k_1, ..., k_n)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct OccupationIndex(pub Vec<u64>);

impl OccupationIndex {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    /// All `k` with `max_j k_j <= k_max`, ordered by total occupation and then
    /// lexicographically.
    pub fn enumerate_box(n: usize, k_max: u64) -> Vec<OccupationIndex> {
        let side = k_max + 1;
        let count = side.pow(n as u32) as usize;
        let mut out = Vec::with_capacity(count);
        let mut k = vec![0u64; n];
        for _ in 0..count {
            out.push(OccupationIndex(k.clone()));
            for kj in k.iter_mut().rev() {
                *kj += 1;
                if *kj < side {
                    break;
                }
                *kj = 0;
            }
        }
        out.sort_by(|a, b| a.total().cmp(&b.total()).then_with(|| a.0.cmp(&b.0)));
        out
    }
}

/// Thermal state `W(u) γ(s) W(u)†` with per-mode displacement `u`.
#[derive(Clone, PartialEq, Debug)]
pub struct DisplacedThermalSpec {
    temps: ModeVector,
    displacement: Vec<Complex64>,
}

impl DisplacedThermalSpec {
    pub fn new(temps: ModeVector, displacement: Vec<Complex64>) -> Result<Self> {
        temps.check_len(displacement.len())?;
        Ok(Self {
            temps,
            displacement,
        })
    }

    /// Undisplaced thermal state.
    pub fn thermal(temps: ModeVector) -> Self {
        let n = temps.len();
        Self {
            temps,
            displacement: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn temps(&self) -> &ModeVector {
        &self.temps
    }

    pub fn displacement(&self) -> &[Complex64] {
        &self.displacement
    }

    pub fn modes(&self) -> usize {
        self.temps.len()
    }

    pub fn is_undisplaced(&self) -> bool {
        self.displacement
            .iter()
            .all(|u| *u == Complex64::new(0.0, 0.0))
    }

    /// Same state with every displacement shifted by `shift`.
    pub fn shifted(&self, shift: &[Complex64]) -> Result<Self> {
        self.temps.check_len(shift.len())?;
        Ok(Self {
            temps: self.temps.clone(),
            displacement: self
                .displacement
                .iter()
                .zip(shift)
                .map(|(u, d)| u + d)
                .collect(),
        })
    }
}

/// Diagonal of a thermal covariance matrix, one `½ coth(s_j/2)` per mode
/// (each entry stands for a 2×2 identity block).
#[derive(Clone, PartialEq, Debug)]
pub struct CovarianceDiagonal(pub Vec<f64>);

impl CovarianceDiagonal {
    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    /// Strict elementwise `self > other`, i.e. `self - other` positive definite.
    pub fn strictly_greater(&self, other: &CovarianceDiagonal) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a > b)
    }
}

/// `F_s`: indices of the modes with finite inverse temperature.
pub fn support_set(s: &ModeVector) -> Vec<usize> {
    s.iter()
        .enumerate()
        .filter(|(_, t)| !t.is_vacuum())
        .map(|(j, _)| j)
        .collect()
}

/// Particle-basis eigenvalue `λ(k, s)` of the thermal state `γ(s)`.
///
/// Linear domain; use [`eigenvalue_log`] once `k·s` can exceed a few hundred.
pub fn eigenvalue(k: &OccupationIndex, s: &ModeVector) -> Result<f64> {
    Ok(eigenvalue_log(k, s)?.exp())
}

/// `ln λ(k, s)`, `-inf` when `k` excites a vacuum mode.
pub fn eigenvalue_log(k: &OccupationIndex, s: &ModeVector) -> Result<f64> {
    s.check_len(k.len())?;
    let mut acc = 0.0;
    for (&kj, t) in k.0.iter().zip(s.iter()) {
        acc += mode_eigenvalue_log(kj, t);
    }
    Ok(acc)
}

/// Single-mode `ln[(1 - e^{-s}) e^{-k s}]`, or `ln δ_{k0}` for the vacuum.
pub(crate) fn mode_eigenvalue_log(k: u64, t: InverseTemperature) -> f64 {
    match t.finite() {
        Some(s) => ln_one_minus_exp_neg(s) - k as f64 * s,
        None if k == 0 => 0.0,
        None => f64::NEG_INFINITY,
    }
}

/// Covariance diagonal of `γ(s)^α / tr γ(s)^α`, entries `½ coth(α s_j / 2)`.
pub fn covariance(s: &ModeVector, alpha: f64) -> Result<CovarianceDiagonal> {
    check_positive("alpha", alpha)?;
    Ok(CovarianceDiagonal(
        s.iter()
            .map(|t| match t.finite() {
                Some(sj) => 0.5 / (0.5 * alpha * sj).tanh(),
                None => 0.5,
            })
            .collect(),
    ))
}

/// `α s`, the inverse temperatures of the normalized power `γ(s)^α / tr γ(s)^α`.
pub fn power_reparam(s: &ModeVector, alpha: f64) -> Result<ModeVector> {
    check_positive("alpha", alpha)?;
    ModeVector::new(s.iter().map(|t| t.scaled(alpha)).collect::<Result<_>>()?)
}

pub(crate) fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be a positive finite number, got {v}"),
        })
    }
}
