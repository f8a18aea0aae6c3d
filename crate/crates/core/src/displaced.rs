//! Petz-Rényi relative entropy between displaced thermal states.
//!
//! With `u = u₁ - u₂` the trace functional is
//! `Σ_{k,ℓ} λ(k,r)^α λ(ℓ,s)^{1-α} |⟨ℓ|W(u)|k⟩|²`, and both the eigenvalues and
//! `W(u) = ⊗_j W(u_j)` factorize over modes, so the n-mode double series is a
//! product of single-mode double series. Finiteness for `α > 1` comes from the
//! threshold; the series is only evaluated where it is known to converge.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::logmath::{ln_factorial, ln_one_minus_exp_neg, LogSum};
use crate::states::{DisplacedThermalSpec, InverseTemperature};
use crate::thermal::{
    alpha_threshold, check_faithful, covariance_criterion, threshold_witness, DivergenceWitness,
    ExtendedEntropy, RenyiOrder, ThresholdResult, WitnessKind,
};
use crate::weyl::{fejer_default_constant, fejer_scan, WeylMagnitudes};

/// Truncated double-series result. `tail_bound` is relative to `exp(log_sum)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesEstimate {
    pub log_sum: f64,
    pub tail_bound: f64,
    pub terms_used: u64,
    pub converged: bool,
}

/// Stopping rule for the double series: relative tail `tol`, at most `cap`
/// terms per single-mode double series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesOptions {
    pub tol: f64,
    pub cap: u64,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            cap: 1_000_000,
        }
    }
}

impl SeriesOptions {
    fn check(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "tol",
                reason: format!("must be positive, got {}", self.tol),
            });
        }
        if self.cap == 0 {
            return Err(Error::InvalidParameter {
                name: "cap",
                reason: "must be at least 1".into(),
            });
        }
        Ok(())
    }
}

/// Entropy plus the series diagnostics; `series` is `None` when divergence was
/// decided analytically.
#[derive(Clone, Debug, PartialEq)]
pub struct DisplacedEntropy {
    pub entropy: ExtendedEntropy,
    pub series: Option<SeriesEstimate>,
}

/// Analytic finiteness verdict with the threshold it was read from.
#[derive(Clone, Debug, PartialEq)]
pub struct FinitenessPrediction {
    pub finite: bool,
    /// `None` for `α < 1` when the support condition fails.
    pub threshold: Option<ThresholdResult>,
}

fn check_modes(rho: &DisplacedThermalSpec, sigma: &DisplacedThermalSpec) -> Result<()> {
    if rho.modes() != sigma.modes() {
        return Err(Error::LengthMismatch {
            expected: rho.modes(),
            found: sigma.modes(),
        });
    }
    Ok(())
}

/// `u₁ - u₂`.
pub fn relative_displacement(
    rho: &DisplacedThermalSpec,
    sigma: &DisplacedThermalSpec,
) -> Result<Vec<Complex64>> {
    check_modes(rho, sigma)?;
    Ok(rho
        .displacement()
        .iter()
        .zip(sigma.displacement())
        .map(|(a, b)| a - b)
        .collect())
}

/// `α < α*`, independent of the displacements. Always finite for `α < 1`.
pub fn predict_finiteness(
    rho: &DisplacedThermalSpec,
    sigma: &DisplacedThermalSpec,
    alpha: RenyiOrder,
) -> Result<FinitenessPrediction> {
    check_modes(rho, sigma)?;
    let (r, s) = (rho.temps(), sigma.temps());
    if !alpha.above_one() {
        return Ok(FinitenessPrediction {
            finite: true,
            threshold: alpha_threshold(r, s).ok(),
        });
    }
    check_faithful(r, s)?;
    let th = alpha_threshold(r, s)?;
    Ok(FinitenessPrediction {
        finite: th.admits(alpha.get()),
        threshold: Some(th),
    })
}

/// Covariance criterion for the displaced pair. Displacements leave
/// covariances unchanged, so this is the thermal criterion on `(r, s)`.
pub fn covariance_equivalence(
    rho: &DisplacedThermalSpec,
    sigma: &DisplacedThermalSpec,
    alpha: f64,
) -> Result<bool> {
    check_modes(rho, sigma)?;
    covariance_criterion(rho.temps(), sigma.temps(), alpha)
}

/// `D_α(ρ || σ)` from the factorized double series.
///
/// For `α > 1` the states must be faithful and `α ≥ α*` returns `+inf` with a
/// threshold witness without touching the series.
pub fn d_alpha_displaced(
    rho: &DisplacedThermalSpec,
    sigma: &DisplacedThermalSpec,
    alpha: RenyiOrder,
    opts: SeriesOptions,
) -> Result<DisplacedEntropy> {
    check_modes(rho, sigma)?;
    opts.check()?;
    let (r, s) = (rho.temps(), sigma.temps());
    let a = alpha.get();
    if alpha.above_one() {
        check_faithful(r, s)?;
        let th = alpha_threshold(r, s)?;
        if !th.admits(a) {
            return Ok(DisplacedEntropy {
                entropy: ExtendedEntropy::infinite(threshold_witness(&th, r, s, a)),
                series: None,
            });
        }
    }
    let u = relative_displacement(rho, sigma)?;
    // a relative error τ in the trace moves D_α by about τ / |α - 1|
    let mode_tol = opts.tol * (a - 1.0).abs().min(1.0) / (2.0 * u.len() as f64);
    let mut log_sum = 0.0;
    let mut ln_tail = 0.0;
    let mut terms_used = 0u64;
    let mut converged = true;
    for ((rj, sj), uj) in r.iter().zip(s.iter()).zip(&u) {
        let est = mode_series(rj, sj, uj.norm(), a, mode_tol, opts.cap);
        log_sum += est.log_sum;
        ln_tail += est.tail_bound.ln_1p();
        terms_used += est.terms_used;
        converged &= est.converged;
    }
    // ∏(1 + τ_j) - 1
    let tail_bound = ln_tail.exp_m1();
    let series = SeriesEstimate {
        log_sum,
        tail_bound,
        terms_used,
        converged: converged && tail_bound <= opts.tol,
    };
    Ok(DisplacedEntropy {
        entropy: ExtendedEntropy::finite(log_sum / (a - 1.0)),
        series: Some(series),
    })
}

/// Box `0 ≤ k ≤ K`, `0 ≤ ℓ ≤ L` of one single-mode double series.
struct ModeBox {
    abs_u: f64,
    alpha: f64,
    /// `ln λ(0, ·)` and the decay rate `s` of `λ(k, ·) = λ(0, ·) e^{-ks}`; `None` for vacuum.
    r: Option<(f64, f64)>,
    s: Option<(f64, f64)>,
}

impl ModeBox {
    fn new(r: InverseTemperature, s: InverseTemperature, abs_u: f64, alpha: f64) -> Self {
        let split = |t: InverseTemperature| t.finite().map(|v| (ln_one_minus_exp_neg(v), v));
        Self {
            abs_u,
            alpha,
            r: split(r),
            s: split(s),
        }
    }

    /// `α ln λ(0,r) + (1-α) ln λ(0,s)`.
    fn ln_prefactor(&self) -> f64 {
        self.alpha * self.r.map_or(0.0, |p| p.0) + (1.0 - self.alpha) * self.s.map_or(0.0, |p| p.0)
    }

    /// `ln Σ_{k≤K, ℓ≤L} λ(k,r)^α λ(ℓ,s)^{1-α} |⟨ℓ|W|k⟩|²`, summed by antidiagonal blocks `k + ℓ = d`.
    fn partial_ln(&self, k_max: u64, l_max: u64) -> f64 {
        let w = WeylMagnitudes::new(self.abs_u, k_max, l_max);
        let rate_r = self.r.map_or(0.0, |p| p.1);
        let rate_s = self.s.map_or(0.0, |p| p.1);
        let mut total = LogSum::new();
        for d in 0..=(k_max + l_max) {
            let mut block = LogSum::new();
            let k_lo = d.saturating_sub(l_max);
            for k in k_lo..=d.min(k_max) {
                let l = d - k;
                let t = -self.alpha * rate_r * k as f64 - (1.0 - self.alpha) * rate_s * l as f64
                    + 2.0 * w.ln_abs(l, k);
                block.add(t);
            }
            total.add(block.ln());
        }
        self.ln_prefactor() + total.ln()
    }

    /// `ln` of a bound on `Σ_{k>K} Σ_ℓ` (the neglected columns).
    fn ln_k_tail(&self, k_max: u64) -> f64 {
        let Some((_, r)) = self.r else {
            return f64::NEG_INFINITY;
        };
        let a = self.alpha;
        let x = self.abs_u * self.abs_u;
        if a < 1.0 {
            // Σ_ℓ |⟨ℓ|W|k⟩|² = 1 and λ(ℓ,s)^{1-α} ≤ λ(0,s)^{1-α}
            let rate = a * r;
            return self.ln_prefactor() - rate * (k_max + 1) as f64 - ln_one_minus_exp_neg(rate);
        }
        let s = self.s.expect("faithful for alpha > 1").1;
        // Σ_ℓ t^ℓ |⟨ℓ|W|k⟩|² = t^k e^{(t-1)x} L_k(-(t-1)² x / t) with t = e^{(α-1)s},
        // and L_k(-y) ≤ I_0(2√(ky)) ≤ e^{2√(ky)}
        let kappa = a * r + (1.0 - a) * s;
        let tm1 = ((a - 1.0) * s).exp_m1();
        let y = tm1 * tm1 / (tm1 + 1.0) * x;
        // g(k) = -κk + 2√(ky) is concave; past its maximum the sum is dominated geometrically
        let k1 = (k_max + 1) as f64;
        let slope = -kappa + (y / k1).sqrt();
        if slope >= 0.0 {
            return f64::INFINITY;
        }
        let g = -kappa * k1 + 2.0 * (k1 * y).sqrt();
        self.ln_prefactor() + tm1 * x + g - ln_one_minus_exp_neg(-slope)
    }

    /// `ln` of a bound on `Σ_{k≤K} Σ_{ℓ>L}` (the neglected rows inside the kept columns).
    fn ln_l_tail(&self, k_max: u64, l_max: u64) -> f64 {
        let Some((_, s)) = self.s else {
            return f64::NEG_INFINITY;
        };
        let a = self.alpha;
        if a < 1.0 {
            // Σ_k |⟨ℓ|W|k⟩|² = 1 and λ(k,r)^α ≤ λ(0,r)^α
            let rate = (1.0 - a) * s;
            return self.ln_prefactor() - rate * (l_max + 1) as f64 - ln_one_minus_exp_neg(rate);
        }
        debug_assert!(l_max >= k_max);
        let x = self.abs_u * self.abs_u;
        if x == 0.0 {
            return f64::NEG_INFINITY;
        }
        let r = self.r.expect("faithful for alpha > 1").1;
        let ln_t = (a - 1.0) * s;
        let ln_x = x.ln();
        // |⟨ℓ|W|k⟩|² ≤ C(ℓ,k) x^{ℓ-k} / (ℓ-k)! from |L_n^{(m)}(x)| ≤ C(n+m,n) e^{x/2};
        // the term ratio t x (ℓ+1) / (ℓ+1-k)² decreases in ℓ ≥ k
        let l1 = l_max + 1;
        let mut acc = LogSum::new();
        for k in 0..=k_max {
            let m = l1 - k;
            let ln_term = l1 as f64 * ln_t + ln_factorial(l1) - ln_factorial(k) - ln_factorial(m)
                + m as f64 * ln_x
                - ln_factorial(m);
            let ratio = ln_t + ln_x + ((l1 + 1) as f64).ln() - 2.0 * ((m + 1) as f64).ln();
            if ratio >= 0.0 {
                return f64::INFINITY;
            }
            acc.add(-a * r * k as f64 + ln_term - (-(ratio.exp_m1())).ln());
        }
        self.ln_prefactor() + acc.ln()
    }

    fn k_bounded(&self) -> bool {
        self.r.is_some()
    }

    fn l_bounded(&self) -> bool {
        self.s.is_some()
    }
}

fn mode_series(
    r: InverseTemperature,
    s: InverseTemperature,
    abs_u: f64,
    alpha: f64,
    tol: f64,
    cap: u64,
) -> SeriesEstimate {
    let m = ModeBox::new(r, s, abs_u, alpha);
    let x = abs_u * abs_u;
    let start = 8 + (2.0 * x).ceil() as u64;
    let mut k_max = if m.k_bounded() { start } else { 0 };
    let mut l_max = if m.l_bounded() { start.max(k_max) } else { 0 };
    let mut best: Option<SeriesEstimate> = None;
    loop {
        if alpha > 1.0 {
            l_max = l_max.max(k_max);
        }
        let terms = (k_max + 1) * (l_max + 1);
        if terms > cap {
            break;
        }
        let ln_p = m.partial_ln(k_max, l_max);
        let ln_k = m.ln_k_tail(k_max);
        let ln_l = m.ln_l_tail(k_max, l_max);
        let rel_k = (ln_k - ln_p).exp();
        let rel_l = (ln_l - ln_p).exp();
        let est = SeriesEstimate {
            log_sum: ln_p,
            tail_bound: rel_k + rel_l,
            terms_used: terms,
            converged: rel_k + rel_l <= tol,
        };
        let done = est.converged;
        best = Some(est);
        if done {
            break;
        }
        if rel_k > 0.5 * tol {
            k_max = grow(k_max);
        }
        if rel_l > 0.5 * tol {
            l_max = grow(l_max);
        }
    }
    best.unwrap_or_else(|| {
        // the starting box already exceeds the cap: fall back to the largest square that fits
        let side = ((cap as f64).sqrt() as u64).max(1) - 1;
        let k = if m.k_bounded() { side } else { 0 };
        let l = if m.l_bounded() { side } else { 0 };
        let ln_p = m.partial_ln(k, l);
        let tail = (m.ln_k_tail(k) - ln_p).exp() + (m.ln_l_tail(k, l) - ln_p).exp();
        SeriesEstimate {
            log_sum: ln_p,
            tail_bound: tail,
            terms_used: (k + 1) * (l + 1),
            converged: tail <= tol,
        }
    })
}

fn grow(n: u64) -> u64 {
    n + n / 2 + 1
}

/// Sample size kept in a diagonal witness.
const WITNESS_SAMPLES: usize = 16;
/// Largest scan range tried when collecting witness samples.
const WITNESS_SCAN_LIMIT: u64 = 1 << 22;

/// If some mode has `α r_i + (1-α) s_i ≤ 0`, the diagonal subseries
/// `Σ_k e^{-k(α r_i + (1-α) s_i)} |⟨k|W(u_i)|k⟩|²` diverges.
///
/// The witness samples occupation numbers `k` from the Fejér scan where the
/// lower bound `e^{-κk} C² k^{-3/4}` on the diagonal term is at least one
/// (for `κ = 0`, the first scan hits, whose bounds `C² k^{-3/4}` are not summable).
pub fn diagonal_divergence_witness(
    rho: &DisplacedThermalSpec,
    sigma: &DisplacedThermalSpec,
    alpha: f64,
) -> Result<Option<DivergenceWitness>> {
    check_modes(rho, sigma)?;
    let (r, s) = (rho.temps(), sigma.temps());
    check_faithful(r, s)?;
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::InvalidOrder(alpha));
    }
    let u = relative_displacement(rho, sigma)?;
    let hit = r
        .iter()
        .zip(s.iter())
        .map(|(ri, si)| alpha * ri.value() + (1.0 - alpha) * si.value())
        .enumerate()
        .find(|&(_, kappa)| kappa <= 0.0);
    let Some((mode, kappa)) = hit else {
        return Ok(None);
    };
    let samples = witness_samples(kappa, u[mode])?;
    let (ri, si) = (r.temps()[mode].value(), s.temps()[mode].value());
    Ok(Some(DivergenceWitness {
        mode: Some(mode),
        kind: WitnessKind::DiagonalSubseries,
        detail: format!(
            "alpha*r + (1-alpha)*s = {alpha}*{ri} + {}*{si} = {kappa} <= 0 on mode {}",
            1.0 - alpha,
            mode + 1
        ),
        alpha_star: Some(si / (si - ri)),
        exponent: Some(kappa),
        samples,
    }))
}

fn witness_samples(kappa: f64, u: Complex64) -> Result<Vec<u64>> {
    if u.norm() == 0.0 {
        // |⟨k|W(0)|k⟩|² = 1
        return Ok((1..=WITNESS_SAMPLES as u64).collect());
    }
    let c = fejer_default_constant(u);
    let ln_c2 = 2.0 * c.ln();
    let mut j_max = 4096;
    loop {
        let scan = fejer_scan(u, j_max, c)?;
        let picked: Vec<u64> = if kappa == 0.0 {
            scan.indices.iter().copied().take(WITNESS_SAMPLES).collect()
        } else {
            scan.indices
                .iter()
                .copied()
                .filter(|&k| -kappa * k as f64 + ln_c2 - 0.75 * (k as f64).ln() >= 0.0)
                .take(WITNESS_SAMPLES)
                .collect()
        };
        if picked.len() == WITNESS_SAMPLES || j_max >= WITNESS_SCAN_LIMIT {
            return Ok(picked);
        }
        j_max *= 4;
    }
}
