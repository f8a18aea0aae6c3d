//! Laguerre polynomials and single-mode Weyl (displacement) operator matrix
//! elements in the particle basis, plus the sine-interval and Fejér-bound scans
//! behind the diagonal lower bound `|⟨j|W(u)|j⟩| ≥ C j^{-3/8}`.
//!
//! Convention: `W(u) = exp(u a† - ū a)`, so `W(u)|0⟩` is the coherent state
//! with amplitudes `e^{-|u|²/2} u^k / √k!`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::logmath::ln_factorial;

/// `L_j(x)` by the upward three-term recurrence.
pub fn laguerre(j: u64, x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::InvalidParameter {
            name: "x",
            reason: format!("Laguerre argument must be >= 0, got {x}"),
        });
    }
    let mut prev = 1.0;
    if j == 0 {
        return Ok(prev);
    }
    let mut cur = 1.0 - x;
    for n in 1..j {
        let nf = n as f64;
        let next = ((2.0 * nf + 1.0 - x) * cur - nf * prev) / (nf + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// A real number stored as `mant * e^{scale}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scaled {
    pub mant: f64,
    pub scale: f64,
}

impl Scaled {
    const ZERO: Scaled = Scaled {
        mant: 0.0,
        scale: 0.0,
    };

    pub fn value(self) -> f64 {
        if self.mant == 0.0 {
            0.0
        } else {
            self.mant.signum() * (self.mant.abs().ln() + self.scale).exp()
        }
    }

    /// `ln |value|`, `-inf` for zero.
    pub fn ln_abs(self) -> f64 {
        if self.mant == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.mant.abs().ln() + self.scale
        }
    }
}

const RESCALE_HI: f64 = 1e150;
const RESCALE_LO: f64 = 1e-150;

/// Real band amplitudes `h_n = √(n!/(n+m)!) |u|^m e^{-x/2} L_n^{(m)}(x)`, `n = 0..=n_max`,
/// where `x = |u|²`.
///
/// `⟨n+m|W(u)|n⟩ = (u/|u|)^m h_n` and `⟨n|W(u)|n+m⟩ = (-ū/|u|)^m h_n`.
/// The recurrence runs on the normalized amplitudes with a separate exponent
/// register, so neither `L_n^{(m)}` nor the factorials are ever formed.
pub fn band_amplitudes(m: u64, n_max: u64, abs_u: f64) -> Vec<Scaled> {
    let len = n_max as usize + 1;
    let x = abs_u * abs_u;
    if abs_u == 0.0 {
        let v = if m == 0 {
            Scaled {
                mant: 1.0,
                scale: 0.0,
            }
        } else {
            Scaled::ZERO
        };
        return vec![v; len];
    }
    let mf = m as f64;
    let mut scale = mf * abs_u.ln() - 0.5 * x - 0.5 * ln_factorial(m);
    let mut out = Vec::with_capacity(len);
    let mut prev = 1.0;
    out.push(Scaled { mant: prev, scale });
    if n_max == 0 {
        return out;
    }
    let mut cur = (1.0 + mf - x) / (mf + 1.0).sqrt();
    out.push(Scaled { mant: cur, scale });
    for n in 1..n_max {
        let nf = n as f64;
        let next = ((2.0 * nf + 1.0 + mf - x) * cur - (nf * (nf + mf)).sqrt() * prev)
            / ((nf + 1.0) * (nf + mf + 1.0)).sqrt();
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_HI {
            prev /= RESCALE_HI;
            cur /= RESCALE_HI;
            scale += RESCALE_HI.ln();
        } else if cur.abs() < RESCALE_LO && prev.abs() < RESCALE_LO && (cur != 0.0 || prev != 0.0) {
            prev /= RESCALE_LO;
            cur /= RESCALE_LO;
            scale += RESCALE_LO.ln();
        }
        out.push(Scaled { mant: cur, scale });
    }
    out
}

/// `⟨j|W(u)|j⟩ = e^{-|u|²/2} L_j(|u|²)`, real for every `u`.
pub fn weyl_diag(j: u64, u: Complex64) -> f64 {
    band_amplitudes(0, j, u.norm())[j as usize].value()
}

/// `⟨j|W(u)|j⟩` for `j = 0..=j_max` in one recurrence pass.
pub fn weyl_diag_all(j_max: u64, u: Complex64) -> Vec<f64> {
    band_amplitudes(0, j_max, u.norm())
        .into_iter()
        .map(Scaled::value)
        .collect()
}

/// `⟨ℓ|W(u)|k⟩` from the associated-Laguerre closed form.
pub fn weyl_element(row: u64, col: u64, u: Complex64) -> Complex64 {
    let abs_u = u.norm();
    let (m, n) = if row >= col {
        (row - col, col)
    } else {
        (col - row, row)
    };
    let h = band_amplitudes(m, n, abs_u)[n as usize].value();
    if m == 0 {
        return Complex64::new(h, 0.0);
    }
    if abs_u == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let unit = if row >= col {
        u / abs_u
    } else {
        -u.conj() / abs_u
    };
    unit.powu(m as u32) * h
}

/// `ln |⟨ℓ|W(u)|k⟩|` for `0 ≤ k ≤ k_max`, `0 ≤ ℓ ≤ l_max`.
#[derive(Clone, Debug)]
pub struct WeylMagnitudes {
    k_max: u64,
    l_max: u64,
    ln_abs: Vec<f64>,
}

impl WeylMagnitudes {
    pub fn new(abs_u: f64, k_max: u64, l_max: u64) -> Self {
        let rows = l_max as usize + 1;
        let mut ln_abs = vec![f64::NEG_INFINITY; (k_max as usize + 1) * rows];
        // bands below the diagonal: ℓ = k + m
        for m in 0..=l_max {
            let n_max = k_max.min(l_max - m);
            for (n, h) in band_amplitudes(m, n_max, abs_u).into_iter().enumerate() {
                ln_abs[n * rows + n + m as usize] = h.ln_abs();
            }
        }
        // above the diagonal: k = ℓ + m
        for m in 1..=k_max {
            let n_max = l_max.min(k_max - m);
            for (n, h) in band_amplitudes(m, n_max, abs_u).into_iter().enumerate() {
                ln_abs[(n + m as usize) * rows + n] = h.ln_abs();
            }
        }
        Self {
            k_max,
            l_max,
            ln_abs,
        }
    }

    pub fn k_max(&self) -> u64 {
        self.k_max
    }

    pub fn l_max(&self) -> u64 {
        self.l_max
    }

    /// `ln |⟨row|W(u)|col⟩|`.
    pub fn ln_abs(&self, row: u64, col: u64) -> f64 {
        self.ln_abs[col as usize * (self.l_max as usize + 1) + row as usize]
    }
}

/// An integer `j` inside `I_m = [lo, hi]`, where `|sin(2√j|u| + π/4)| ≥ 1/√2`.
#[derive(Clone, Debug, PartialEq)]
pub struct SineIntervalWitness {
    pub m: u64,
    pub lo: f64,
    pub hi: f64,
    pub j: u64,
    pub sine: f64,
}

/// `|sin(2√j|u| + π/4)|`.
pub fn fejer_phase_sine(j: u64, abs_u: f64) -> f64 {
    (2.0 * (j as f64).sqrt() * abs_u + FRAC_PI_4).sin().abs()
}

/// One witness per interval `I_m`, `m = 1..=m_max`, of length greater than one.
///
/// `I_m = [(mπ/2|u|)², (mπ/2|u|)² + mπ²/4|u|² + π²/16|u|²]` is where
/// `2√j|u| + π/4` falls in `[mπ + π/4, mπ + 3π/4]`. The smallest integer of the
/// interval whose computed sine clears `1/√2` is chosen; intervals where
/// rounding at both ends leaves no such integer are skipped.
pub fn sine_interval_indices(u: Complex64, m_max: u64) -> Result<Vec<SineIntervalWitness>> {
    let abs_u = u.norm();
    if abs_u == 0.0 {
        return Err(Error::ZeroDisplacement);
    }
    if m_max == 0 {
        return Err(Error::InvalidParameter {
            name: "m_max",
            reason: "must be at least 1".into(),
        });
    }
    let x = abs_u * abs_u;
    let mut out: Vec<SineIntervalWitness> = Vec::new();
    for m in 1..=m_max {
        let mf = m as f64;
        let lo = (mf * PI / (2.0 * abs_u)).powi(2);
        let hi = lo + mf * PI * PI / (4.0 * x) + PI * PI / (16.0 * x);
        if hi - lo <= 1.0 {
            continue;
        }
        let first = (lo.ceil() as u64).max(1);
        let last = hi.floor() as u64;
        let found = (first..=last)
            .map(|j| (j, fejer_phase_sine(j, abs_u)))
            .find(|&(_, sine)| sine >= FRAC_1_SQRT_2);
        if let Some((j, sine)) = found {
            debug_assert!(out.last().is_none_or(|w| w.j < j));
            out.push(SineIntervalWitness { m, lo, hi, j, sine });
        }
    }
    Ok(out)
}

/// Default scan constant: half the amplitude of the leading Fejér term of
/// `⟨j|W(u)|j⟩` at the sine floor, `1 / (2√(2π|u|))`.
pub fn fejer_default_constant(u: Complex64) -> f64 {
    0.5 / (2.0 * PI * u.norm()).sqrt()
}

/// Leading Fejér term of `L_j(x)`: `e^{x/2} x^{-1/4} π^{-1/2} j^{-1/4} sin(2√(jx) + π/4)`.
pub fn fejer_main_term(j: u64, x: f64) -> f64 {
    let jf = j as f64;
    (0.5 * x).exp() * x.powf(-0.25) / PI.sqrt()
        * jf.powf(-0.25)
        * (2.0 * (jf * x).sqrt() + FRAC_PI_4).sin()
}

/// Indices `1 ≤ j ≤ j_max` with `|⟨j|W(u)|j⟩| ≥ C j^{-3/8}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FejerScan {
    pub constant: f64,
    pub j_max: u64,
    pub indices: Vec<u64>,
}

impl FejerScan {
    pub fn count(&self) -> usize {
        self.indices.len()
    }
}

pub fn fejer_scan(u: Complex64, j_max: u64, constant: f64) -> Result<FejerScan> {
    if u.norm() == 0.0 {
        return Err(Error::ZeroDisplacement);
    }
    if !(constant > 0.0 && constant.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "C",
            reason: format!("must be positive, got {constant}"),
        });
    }
    if j_max == 0 {
        return Err(Error::InvalidParameter {
            name: "j_max",
            reason: "must be at least 1".into(),
        });
    }
    let diag = weyl_diag_all(j_max, u);
    let indices = (1..=j_max)
        .filter(|&j| diag[j as usize].abs() >= constant * (j as f64).powf(-0.375))
        .collect();
    Ok(FejerScan {
        constant,
        j_max,
        indices,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn laguerre_low_degrees() {
        assert_eq!(laguerre(0, 3.7).unwrap(), 1.0);
        assert_eq!(laguerre(1, 2.0).unwrap(), -1.0);
        // L_2(x) = 1 - 2x + x²/2
        assert!((laguerre(2, 1.5).unwrap() - (1.0 - 3.0 + 1.125)).abs() < 1e-15);
        assert!(laguerre(3, -0.1).is_err());
        assert!(laguerre(3, f64::NAN).is_err());
    }

    #[test]
    fn weyl_diag_basics() {
        assert_eq!(weyl_diag(0, c(0.0, 0.0)), 1.0);
        for u in [c(0.3, 0.0), c(1.0, 1.0), c(0.0, -2.5)] {
            assert!((weyl_diag(0, u) - (-0.5 * u.norm_sqr()).exp()).abs() < 1e-15);
        }
        let u = c(1.0, 1.0);
        let expect = (-1.0f64).exp() * laguerre(3, 2.0).unwrap();
        assert!((weyl_diag(3, u) - expect).abs() < 1e-14);
    }

    #[test]
    fn weyl_element_first_offdiagonals() {
        let u = c(0.7, -0.4);
        let g = (-0.5 * u.norm_sqr()).exp();
        assert!((weyl_element(1, 0, u) - u * g).norm() < 1e-15);
        assert!((weyl_element(0, 1, u) + u.conj() * g).norm() < 1e-15);
    }

    #[test]
    fn coherent_column() {
        let u = c(1.2, 0.5);
        let g = (-0.5 * u.norm_sqr()).exp();
        let mut fact = 1.0f64;
        for k in 0..30u64 {
            if k > 0 {
                fact *= k as f64;
            }
            let expect = u.powu(k as u32) * g / fact.sqrt();
            assert!((weyl_element(k, 0, u) - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn diagonal_consistency() {
        let u = c(-0.8, 1.1);
        for j in 0..=50 {
            let e = weyl_element(j, j, u);
            assert!((e.re - weyl_diag(j, u)).abs() < 1e-12);
            assert_eq!(e.im, 0.0);
        }
    }

    #[test]
    fn zero_displacement_is_identity() {
        let z = c(0.0, 0.0);
        assert_eq!(weyl_element(3, 3, z), c(1.0, 0.0));
        assert_eq!(weyl_element(4, 3, z), c(0.0, 0.0));
        let t = WeylMagnitudes::new(0.0, 5, 7);
        assert_eq!(t.ln_abs(2, 2), 0.0);
        assert_eq!(t.ln_abs(3, 2), f64::NEG_INFINITY);
    }

    #[test]
    fn unitarity_of_columns() {
        let n = 64u64;
        for u in [c(0.5, 0.0), c(1.0, 1.0), c(0.0, 2.0), c(-1.3, 0.9)] {
            for k in 0..=16 {
                let norm: f64 = (0..=n).map(|l| weyl_element(l, k, u).norm_sqr()).sum();
                assert!(norm <= 1.0 + 1e-12, "u={u} k={k} norm={norm}");
                assert!(1.0 - norm < 1e-6, "u={u} k={k} norm={norm}");
            }
        }
    }

    #[test]
    fn magnitude_table_matches_elements() {
        let u = c(0.9, -0.3);
        let t = WeylMagnitudes::new(u.norm(), 12, 20);
        for k in 0..=12 {
            for l in 0..=20 {
                let e = weyl_element(l, k, u).norm();
                let lt = t.ln_abs(l, k).exp();
                assert!(
                    (e - lt).abs() <= 1e-13 * e.max(1e-300) + 1e-300,
                    "({l},{k})"
                );
            }
        }
    }

    #[test]
    fn large_index_elements_stay_bounded() {
        // h_0 underflows for m = 400 at small |u|; the exponent register carries it
        let u = c(3.0, 0.0);
        let d = weyl_diag(20_000, u);
        assert!(d.is_finite() && d.abs() <= 1.0);
        let t = WeylMagnitudes::new(0.5, 4, 600);
        let v = t.ln_abs(600, 0);
        let expect = 600.0 * 0.5f64.ln() - 0.125 - 0.5 * ln_factorial(600);
        assert!((v - expect).abs() < 1e-9 * expect.abs());
    }

    #[test]
    fn sine_interval_unit_displacement() {
        let w = sine_interval_indices(c(1.0, 0.0), 1).unwrap();
        assert_eq!(w.len(), 1);
        assert!((w[0].lo - PI * PI / 4.0).abs() < 1e-12);
        assert!((w[0].hi - (PI * PI / 4.0 + PI * PI / 4.0 + PI * PI / 16.0)).abs() < 1e-12);
        assert!([3, 4, 5].contains(&w[0].j));
        assert!(w[0].sine >= FRAC_1_SQRT_2);
    }

    #[test]
    fn sine_interval_half_displacement() {
        let w = sine_interval_indices(c(0.5, 0.0), 10).unwrap();
        assert!(w.len() >= 10);
        assert!(w.windows(2).all(|p| p[0].j < p[1].j));
        assert!(w
            .iter()
            .all(|x| fejer_phase_sine(x.j, 0.5) >= FRAC_1_SQRT_2));
        assert!(w.iter().all(|x| x.lo <= x.j as f64 && x.j as f64 <= x.hi));
    }

    #[test]
    fn sine_interval_errors() {
        assert_eq!(
            sine_interval_indices(c(0.0, 0.0), 3),
            Err(Error::ZeroDisplacement)
        );
        assert!(sine_interval_indices(c(1.0, 0.0), 0).is_err());
    }

    #[test]
    fn fejer_scan_unit_displacement() {
        let u = c(1.0, 0.0);
        let scan = fejer_scan(u, 1000, fejer_default_constant(u)).unwrap();
        assert!(scan.count() >= 100, "count {}", scan.count());
    }

    #[test]
    fn fejer_scan_errors() {
        let u = c(1.0, 0.0);
        assert!(fejer_scan(u, 100, 0.0).is_err());
        assert!(fejer_scan(u, 100, -1.0).is_err());
        assert!(fejer_scan(u, 0, 0.1).is_err());
        assert_eq!(
            fejer_scan(c(0.0, 0.0), 10, 0.1),
            Err(Error::ZeroDisplacement)
        );
    }

    #[test]
    fn fejer_scan_grows() {
        let u = c(1.0, 0.0);
        let cst = fejer_default_constant(u);
        for j_max in [1_000u64, 10_000] {
            let a = fejer_scan(u, j_max, cst).unwrap().count();
            let b = fejer_scan(u, 2 * j_max, cst).unwrap().count();
            assert!(b > a);
        }
    }

    proptest! {
        #[test]
        fn fejer_scan_monotone_in_constant(re in -2.0f64..2.0, im in -2.0f64..2.0, c1 in 0.01f64..0.5, f in 0.1f64..1.0) {
            let u = c(re, im);
            prop_assume!(u.norm() > 0.05);
            let big = fejer_scan(u, 400, c1).unwrap();
            let small = fejer_scan(u, 400, c1 * f).unwrap();
            prop_assert!(big.indices.iter().all(|j| small.indices.contains(j)));
        }

        #[test]
        fn adjoint_symmetry(re in -2.0f64..2.0, im in -2.0f64..2.0, l in 0u64..40, k in 0u64..40) {
            let u = c(re, im);
            let a = weyl_element(l, k, u);
            let b = weyl_element(k, l, -u).conj();
            prop_assert!((a - b).norm() < 1e-12);
        }

        #[test]
        fn laguerre_recurrence_holds(j in 1u64..60, x in 0.0f64..20.0) {
            let a = laguerre(j - 1, x).unwrap();
            let b = laguerre(j, x).unwrap();
            let cc = laguerre(j + 1, x).unwrap();
            let jf = j as f64;
            let resid = (jf + 1.0) * cc - (2.0 * jf + 1.0 - x) * b + jf * a;
            let scale = ((jf + 1.0) * cc).abs() + ((2.0 * jf + 1.0 - x) * b).abs() + (jf * a).abs();
            prop_assert!(resid.abs() <= 1e-10 * scale);
        }
    }
}
