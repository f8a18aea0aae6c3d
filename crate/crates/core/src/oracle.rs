//! Dense truncated Fock-space validator.
//!
//! Each mode is cut to `|0⟩..|N-1⟩`; multi-mode operators are Kronecker
//! products in colexicographic order, index `k₁ + N k₂` (first mode fastest).
//! This path shares no code with the Laguerre closed forms.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::states::{DisplacedThermalSpec, InverseTemperature};
use crate::thermal::RenyiOrder;

/// Largest total dimension `N^n` accepted by [`oracle_trace`].
pub const DIMENSION_LIMIT: usize = 4096;
/// Most modes accepted by [`oracle_trace`].
pub const MAX_ORACLE_MODES: usize = 2;
/// Eigenvalue floor applied before negative powers.
pub const CLAMP_FLOOR: f64 = 1e-300;

/// Dense operator on the truncated space of one or more modes.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedOperator {
    /// Per-mode truncation `N`.
    pub dim: usize,
    pub data: DMatrix<Complex64>,
}

impl TruncatedOperator {
    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    /// `self ⊗ other` with `self` on the fastest index.
    pub fn tensor(&self, other: &TruncatedOperator) -> TruncatedOperator {
        debug_assert_eq!(self.dim, other.dim);
        TruncatedOperator {
            dim: self.dim,
            data: other.data.kronecker(&self.data),
        }
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "N",
            reason: format!("truncation must be at least 2, got {n}"),
        });
    }
    Ok(())
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `a = Σ √j |j-1⟩⟨j|`.
pub fn annihilation_matrix(n: usize) -> Result<TruncatedOperator> {
    check_dim(n)?;
    let mut data = DMatrix::from_element(n, n, zero());
    for j in 1..n {
        data[(j - 1, j)] = Complex64::new((j as f64).sqrt(), 0.0);
    }
    Ok(TruncatedOperator { dim: n, data })
}

/// `(1 - e^{-s}) Σ_{k<N} e^{-ks} |k⟩⟨k|`, or `|0⟩⟨0|` for the vacuum.
pub fn thermal_matrix(s: InverseTemperature, n: usize) -> Result<TruncatedOperator> {
    check_dim(n)?;
    let diag = thermal_diagonal(s, n);
    Ok(TruncatedOperator {
        dim: n,
        data: DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            diag.into_iter().map(|v| Complex64::new(v, 0.0)),
        )),
    })
}

fn thermal_diagonal(s: InverseTemperature, n: usize) -> Vec<f64> {
    match s.finite() {
        Some(v) => {
            let g = -(-v).exp_m1();
            (0..n).map(|k| g * (-v * k as f64).exp()).collect()
        }
        None => (0..n).map(|k| if k == 0 { 1.0 } else { 0.0 }).collect(),
    }
}

/// `u a† - ū a` on the truncated space.
fn generator(u: Complex64, n: usize) -> Result<DMatrix<Complex64>> {
    let a = annihilation_matrix(n)?.data;
    Ok(a.adjoint() * u - a * u.conj())
}

/// `exp(u a† - ū a)` through the eigendecomposition of the Hermitian
/// `H = -i (u a† - ū a)`, so `W = V e^{iΛ} V†` is unitary to rounding.
pub fn displacement_matrix(u: Complex64, n: usize) -> Result<TruncatedOperator> {
    let h = generator(u, n)? * Complex64::new(0.0, -1.0);
    let eig = h.symmetric_eigen();
    let v = eig.eigenvectors;
    let phases = eig.eigenvalues.map(|l| Complex64::new(0.0, l).exp());
    let mut scaled = v.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    Ok(TruncatedOperator {
        dim: n,
        data: scaled * v.adjoint(),
    })
}

/// `exp(u a† - ū a)` by summing the Taylor series column by column.
///
/// Every entry is a sum over lattice paths of the tridiagonal generator, so the
/// rounding error of an entry scales with that entry's own path sum. Far
/// off-diagonal entries keep their relative accuracy down to the underflow
/// threshold, which the eigendecomposition route cannot offer.
pub fn displacement_matrix_series(u: Complex64, n: usize) -> Result<TruncatedOperator> {
    let g = generator(u, n)?;
    let mut out = DMatrix::from_element(n, n, zero());
    let max_terms = 10 * n + 200;
    for k in 0..n {
        let mut term = nalgebra::DVector::from_element(n, zero());
        term[k] = Complex64::new(1.0, 0.0);
        let mut acc = term.clone();
        for step in 1..=max_terms {
            term = &g * &term / Complex64::new(step as f64, 0.0);
            acc += &term;
            let settled = term
                .iter()
                .zip(acc.iter())
                .all(|(t, a)| t.norm() <= 1e-18 * a.norm() || *t == zero());
            if settled && step > n {
                break;
            }
        }
        out.set_column(k, &acc);
    }
    Ok(TruncatedOperator { dim: n, data: out })
}

/// `M^p` for Hermitian positive semidefinite `M` via eigendecomposition.
///
/// Eigenvalues below [`CLAMP_FLOOR`] are raised to it when `p < 0` and set to
/// zero when `p > 0`; the number of such eigenvalues is returned.
pub fn hermitian_power(m: &DMatrix<Complex64>, p: f64) -> (DMatrix<Complex64>, usize) {
    let eig = m.clone().symmetric_eigen();
    let mut clamped = 0;
    let powered: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&l| {
            if l < CLAMP_FLOOR {
                clamped += 1;
                if p < 0.0 {
                    CLAMP_FLOOR.powf(p)
                } else {
                    0.0
                }
            } else {
                l.powf(p)
            }
        })
        .collect();
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= Complex64::new(powered[j], 0.0);
    }
    (scaled * v.adjoint(), clamped)
}

/// `tr(ρ^α σ^{1-α})` on the truncated space.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleTrace {
    pub trace: f64,
    /// Diagonal entries of `σ` raised to the floor before the `1-α` power.
    pub clamped: usize,
    pub total_dim: usize,
}

impl OracleTrace {
    /// `(α-1)^{-1} ln tr`.
    pub fn d_alpha(&self, alpha: RenyiOrder) -> f64 {
        self.trace.ln() / (alpha.get() - 1.0)
    }
}

fn total_dim(modes: usize, n: usize) -> Result<usize> {
    if modes > MAX_ORACLE_MODES {
        return Err(Error::InvalidParameter {
            name: "modes",
            reason: format!("oracle supports at most {MAX_ORACLE_MODES} modes, got {modes}"),
        });
    }
    let dim = (0..modes).try_fold(1usize, |acc, _| acc.checked_mul(n));
    match dim {
        Some(d) if d <= DIMENSION_LIMIT => Ok(d),
        _ => Err(Error::DimensionGuard {
            dim: dim.unwrap_or(usize::MAX),
            limit: DIMENSION_LIMIT,
        }),
    }
}

/// `tr(ρ^α σ^{1-α})` with `ρ`, `σ` built as `W(u) γ W(u)†` at truncation `N`.
///
/// Both states are first conjugated by `W(u₂)†`, which leaves the trace
/// unchanged: `σ` becomes the diagonal `γ(s)` and `ρ` becomes
/// `W(u) γ(r) W(u)†` with `u = u₁ - u₂`. Then
/// - `α < 1`: `ρ^α` by Hermitian eigendecomposition of the dense matrix;
/// - `α > 1`: `ρ^α = W γ(r)^α W†`, whose diagonal is a sum of positive terms,
///   against the growing weights `λ(ℓ,s)^{1-α}`.
///
/// Zero eigenvalues of `σ` follow `0^{1-α} = ∞` and `0 · ∞ = 0`.
pub fn oracle_trace(
    rho: &DisplacedThermalSpec,
    sigma: &DisplacedThermalSpec,
    alpha: RenyiOrder,
    n: usize,
) -> Result<OracleTrace> {
    if rho.modes() != sigma.modes() {
        return Err(Error::LengthMismatch {
            expected: rho.modes(),
            found: sigma.modes(),
        });
    }
    check_dim(n)?;
    let dim = total_dim(rho.modes(), n)?;
    let a = alpha.get();
    let u: Vec<Complex64> = rho
        .displacement()
        .iter()
        .zip(sigma.displacement())
        .map(|(x, y)| x - y)
        .collect();

    let w = u
        .iter()
        .map(|&uj| displacement_matrix_series(uj, n))
        .reduce(|acc, next| Ok(acc?.tensor(&next?)))
        .expect("at least one mode")?;
    let gamma_r = kron_diagonal(rho.temps().temps(), n);
    let gamma_s = kron_diagonal(sigma.temps().temps(), n);

    let rho_alpha_diag: Vec<f64> = if a < 1.0 {
        let mut scaled = w.data.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= Complex64::new(gamma_r[j], 0.0);
        }
        let rho_mat = scaled * w.data.adjoint();
        let (p, _) = hermitian_power(&rho_mat, a);
        p.diagonal().iter().map(|z| z.re).collect()
    } else {
        let weights: Vec<f64> = gamma_r.iter().map(|g| g.powf(a)).collect();
        (0..dim)
            .map(|l| {
                (0..dim)
                    .map(|k| weights[k] * w.data[(l, k)].norm_sqr())
                    .sum()
            })
            .collect()
    };

    let mut clamped = 0;
    let mut trace = 0.0;
    for (&rd, &sd) in rho_alpha_diag.iter().zip(&gamma_s) {
        let factor = if sd > 0.0 && sd < CLAMP_FLOOR && a > 1.0 {
            clamped += 1;
            CLAMP_FLOOR.powf(1.0 - a)
        } else if sd == 0.0 {
            if a < 1.0 || rd == 0.0 {
                continue;
            }
            f64::INFINITY
        } else {
            sd.powf(1.0 - a)
        };
        trace += rd * factor;
    }
    Ok(OracleTrace {
        trace,
        clamped,
        total_dim: dim,
    })
}

/// Diagonal of `γ(s₁) ⊗ γ(s₂) ⊗ …` in colexicographic order.
fn kron_diagonal(temps: &[InverseTemperature], n: usize) -> Vec<f64> {
    temps.iter().fold(vec![1.0], |acc, &t| {
        let d = thermal_diagonal(t, n);
        let mut out = Vec::with_capacity(acc.len() * n);
        for dj in &d {
            out.extend(acc.iter().map(|a| a * dj));
        }
        out
    })
}
