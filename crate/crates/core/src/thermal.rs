//! Petz-Rényi relative entropy between undisplaced thermal states.
//!
//! Both states are diagonal in the particle basis, so the trace functional
//! `Σ_k λ(k,r)^α λ(k,s)^{1-α}` factorizes over modes into geometric series.
//! Finiteness is decided from the threshold `α*`, never from numeric blowup.

use std::fmt;

use crate::error::{Error, Result};
use crate::logmath::ln_one_minus_exp_neg;
use crate::states::{covariance, CovarianceDiagonal, InverseTemperature, ModeVector};

/// Rényi order `α ∈ (0,1) ∪ (1,∞)`.
#[derive(Clone, Copy, PartialEq, PartialOrd, Debug)]
pub struct RenyiOrder(f64);

impl RenyiOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 && alpha != 1.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidOrder(alpha))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn above_one(self) -> bool {
        self.0 > 1.0
    }
}

/// Why a relative entropy is infinite.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum WitnessKind {
    /// `supp ρ ⊄ supp σ` with `α > 1`.
    Support,
    /// `α ≥ s_j / (s_j - r_j)` for some mode.
    Threshold,
    /// Diagonal subseries of the displaced double series does not converge.
    DiagonalSubseries,
}

impl fmt::Display for WitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WitnessKind::Support => "support",
            WitnessKind::Threshold => "threshold",
            WitnessKind::DiagonalSubseries => "diagonal-subseries",
        })
    }
}

/// A divergence certificate: the offending mode and the violated inequality.
#[derive(Clone, PartialEq, Debug)]
pub struct DivergenceWitness {
    pub mode: Option<usize>,
    pub kind: WitnessKind,
    pub detail: String,
    /// Threshold `α*` when `kind` is [`WitnessKind::Threshold`].
    pub alpha_star: Option<f64>,
    /// Per-mode exponent `α r + (1-α) s` when `kind` is [`WitnessKind::DiagonalSubseries`].
    pub exponent: Option<f64>,
    /// Occupation numbers whose diagonal terms are bounded below by one.
    pub samples: Vec<u64>,
}

/// `D_α` value: finite, or `+inf` together with the reason.
#[derive(Clone, PartialEq, Debug)]
pub struct ExtendedEntropy {
    value: f64,
    witness: Option<DivergenceWitness>,
}

impl ExtendedEntropy {
    pub fn finite(value: f64) -> Self {
        debug_assert!(value.is_finite());
        Self {
            value,
            witness: None,
        }
    }

    pub fn infinite(witness: DivergenceWitness) -> Self {
        Self {
            value: f64::INFINITY,
            witness: Some(witness),
        }
    }

    /// The entropy in nats; `f64::INFINITY` exactly when a witness is present.
    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn is_finite(&self) -> bool {
        self.witness.is_none()
    }

    pub fn witness(&self) -> Option<&DivergenceWitness> {
        self.witness.as_ref()
    }
}

/// `α*` and the modes attaining it. Mode indices are 0-based.
#[derive(Clone, PartialEq, Debug)]
pub struct ThresholdResult {
    pub alpha_star: f64,
    pub argmin_modes: Vec<usize>,
    /// `(j, s_j / (s_j - r_j))` for every `j ∈ F_{r<s}`.
    pub ratios: Vec<(usize, f64)>,
}

impl ThresholdResult {
    pub fn is_unbounded(&self) -> bool {
        self.alpha_star == f64::INFINITY
    }

    /// Strict: `α = α*` is already divergent.
    pub fn admits(&self, alpha: f64) -> bool {
        alpha < self.alpha_star
    }
}

fn check_pair(r: &ModeVector, s: &ModeVector) -> Result<()> {
    if r.len() != s.len() {
        return Err(Error::LengthMismatch {
            expected: r.len(),
            found: s.len(),
        });
    }
    Ok(())
}

/// Modes where `σ` is vacuum but `ρ` is not.
pub(crate) fn support_violations(r: &ModeVector, s: &ModeVector) -> Vec<usize> {
    r.iter()
        .zip(s.iter())
        .enumerate()
        .filter(|(_, (rj, sj))| !rj.is_vacuum() && sj.is_vacuum())
        .map(|(j, _)| j)
        .collect()
}

/// `supp γ(r) ⊆ supp γ(s)`, i.e. `F_r ⊆ F_s`.
pub fn support_contained(r: &ModeVector, s: &ModeVector) -> Result<bool> {
    check_pair(r, s)?;
    Ok(support_violations(r, s).is_empty())
}

/// Finiteness threshold `α* = min_{j ∈ F_{r<s}} s_j / (s_j - r_j)`, `inf` for an empty set.
pub fn alpha_threshold(r: &ModeVector, s: &ModeVector) -> Result<ThresholdResult> {
    check_pair(r, s)?;
    let bad = support_violations(r, s);
    if !bad.is_empty() {
        return Err(Error::SupportViolation { modes: bad });
    }
    let ratios: Vec<(usize, f64)> = r
        .iter()
        .zip(s.iter())
        .enumerate()
        .filter_map(|(j, (rj, sj))| match (rj.finite(), sj.finite()) {
            (Some(rv), Some(sv)) if rv < sv => Some((j, sv / (sv - rv))),
            _ => None,
        })
        .collect();
    let alpha_star = ratios.iter().map(|&(_, q)| q).fold(f64::INFINITY, f64::min);
    let argmin_modes = ratios
        .iter()
        .filter(|&&(_, q)| q == alpha_star)
        .map(|&(j, _)| j)
        .collect();
    Ok(ThresholdResult {
        alpha_star,
        argmin_modes,
        ratios,
    })
}

pub(crate) fn threshold_witness(
    th: &ThresholdResult,
    r: &ModeVector,
    s: &ModeVector,
    alpha: f64,
) -> DivergenceWitness {
    let mode = th.argmin_modes.first().copied();
    let detail = match mode {
        Some(j) => {
            let (rj, sj) = (r.temps()[j].value(), s.temps()[j].value());
            format!(
                "alpha = {alpha} >= s/(s-r) = {sj}/({sj}-{rj}) = {} on mode {}",
                th.alpha_star,
                j + 1
            )
        }
        None => format!("alpha = {alpha} >= alpha* = {}", th.alpha_star),
    };
    DivergenceWitness {
        mode,
        kind: WitnessKind::Threshold,
        detail,
        alpha_star: Some(th.alpha_star),
        exponent: None,
        samples: Vec::new(),
    }
}

pub(crate) fn support_witness(modes: &[usize], alpha: f64) -> DivergenceWitness {
    DivergenceWitness {
        mode: modes.first().copied(),
        kind: WitnessKind::Support,
        detail: format!(
            "alpha = {alpha} > 1 and sigma is vacuum on modes {:?} where rho is not",
            modes.iter().map(|j| j + 1).collect::<Vec<_>>()
        ),
        alpha_star: None,
        exponent: None,
        samples: Vec::new(),
    }
}

/// Per-mode `ln Σ_k λ(k,r)^α λ(k,s)^{1-α}` in closed form, or `None` when the
/// geometric series diverges (or a vacuum-support term is infinite).
pub(crate) fn mode_log_trace(
    r: InverseTemperature,
    s: InverseTemperature,
    alpha: f64,
) -> Option<f64> {
    match (r.finite(), s.finite()) {
        (Some(rv), Some(sv)) => {
            let exponent = alpha * rv + (1.0 - alpha) * sv;
            if exponent <= 0.0 {
                return None;
            }
            Some(
                alpha * ln_one_minus_exp_neg(rv) + (1.0 - alpha) * ln_one_minus_exp_neg(sv)
                    - ln_one_minus_exp_neg(exponent),
            )
        }
        // k = 0 only; the vacuum eigenvalue is 1
        (None, Some(sv)) => Some((1.0 - alpha) * ln_one_minus_exp_neg(sv)),
        // k > 0 terms are λ^α · 0^{1-α}: zero for α < 1, infinite for α > 1
        (Some(rv), None) => (alpha < 1.0).then(|| alpha * ln_one_minus_exp_neg(rv)),
        // only the 1·1 term
        (None, None) => Some(0.0),
    }
}

/// `ln tr(γ(r)^α γ(s)^{1-α})`, or `None` when infinite.
pub fn thermal_log_trace(r: &ModeVector, s: &ModeVector, alpha: RenyiOrder) -> Result<Option<f64>> {
    check_pair(r, s)?;
    let a = alpha.get();
    let mut acc = 0.0;
    for (rj, sj) in r.iter().zip(s.iter()) {
        match mode_log_trace(rj, sj, a) {
            Some(v) => acc += v,
            None => return Ok(None),
        }
    }
    Ok(Some(acc))
}

/// `D_α(γ(r) || γ(s))`.
///
/// For `α > 1` the support condition and then `α < α*` are checked first; a
/// failure is reported as `+inf` with a witness. For `α < 1` the value is
/// always finite and vacuum-support mismatches simply drop the `0^{1-α}` terms.
pub fn d_alpha_thermal(
    r: &ModeVector,
    s: &ModeVector,
    alpha: RenyiOrder,
) -> Result<ExtendedEntropy> {
    check_pair(r, s)?;
    let a = alpha.get();
    if alpha.above_one() {
        let bad = support_violations(r, s);
        if !bad.is_empty() {
            return Ok(ExtendedEntropy::infinite(support_witness(&bad, a)));
        }
        let th = alpha_threshold(r, s)?;
        if !th.admits(a) {
            return Ok(ExtendedEntropy::infinite(threshold_witness(&th, r, s, a)));
        }
    }
    let log_trace =
        thermal_log_trace(r, s, alpha)?.expect("finite by the support and threshold checks");
    Ok(ExtendedEntropy::finite(log_trace / (a - 1.0)))
}

/// Covariance criterion `V_{σ(α-1)} > V_{ρ(α)}` for faithful thermal states, `α > 1`.
///
/// Evaluated in the reduced form `(s_j - r_j) α < s_j` for every mode; the
/// `coth` entries themselves saturate to `1/2` in floating point for large arguments.
pub fn covariance_criterion(r: &ModeVector, s: &ModeVector, alpha: f64) -> Result<bool> {
    check_pair(r, s)?;
    check_faithful(r, s)?;
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::InvalidOrder(alpha));
    }
    Ok(r.iter().zip(s.iter()).all(|(rj, sj)| {
        let (rv, sv) = (rj.value(), sj.value());
        (sv - rv) * alpha < sv
    }))
}

/// The two covariance diagonals compared by [`covariance_criterion`]:
/// `(V_{σ(α-1)}, V_{ρ(α)})`.
pub fn criterion_covariances(
    r: &ModeVector,
    s: &ModeVector,
    alpha: f64,
) -> Result<(CovarianceDiagonal, CovarianceDiagonal)> {
    check_pair(r, s)?;
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::InvalidOrder(alpha));
    }
    Ok((covariance(s, alpha - 1.0)?, covariance(r, alpha)?))
}

pub(crate) fn check_faithful(r: &ModeVector, s: &ModeVector) -> Result<()> {
    let mut modes = r.vacuum_modes();
    modes.extend(s.vacuum_modes());
    modes.sort_unstable();
    modes.dedup();
    if modes.is_empty() {
        Ok(())
    } else {
        Err(Error::NotFaithful { modes })
    }
}
