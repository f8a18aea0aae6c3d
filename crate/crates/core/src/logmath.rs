//! Log-domain helpers shared by the closed forms and the series evaluators.

use std::f64::consts::LN_2;

/// `ln(1 - e^{-x})` for `x > 0`.
///
/// Below `ln 2` the subtraction `1 - e^{-x}` cancels, so the `expm1` form is used there.
pub fn ln_one_minus_exp_neg(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x == f64::INFINITY {
        0.0
    } else if x < LN_2 {
        (-(-x).exp_m1()).ln()
    } else {
        (-(-x).exp()).ln_1p()
    }
}

/// `ln(e^a + e^b)` without overflow.
pub fn ln_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Streaming sum of `e^{t_i}` kept as `e^{max} * (sum + comp)`.
///
/// Terms are aligned to the running maximum exponent and accumulated with
/// Neumaier compensation, so the result depends only on the order of `add` calls.
#[derive(Debug, Clone, Copy)]
pub struct LogSum {
    max: f64,
    sum: f64,
    comp: f64,
}

impl Default for LogSum {
    fn default() -> Self {
        Self::new()
    }
}

impl LogSum {
    pub fn new() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            sum: 0.0,
            comp: 0.0,
        }
    }

    pub fn add(&mut self, log_term: f64) {
        if log_term == f64::NEG_INFINITY {
            return;
        }
        if log_term > self.max {
            let scale = (self.max - log_term).exp();
            self.sum *= scale;
            self.comp *= scale;
            self.max = log_term;
        }
        let v = (log_term - self.max).exp();
        let s = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - s) + v;
        } else {
            self.comp += (v - s) + self.sum;
        }
        self.sum = s;
    }

    /// Natural log of the accumulated sum; `-inf` when nothing was added.
    pub fn ln(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + (self.sum + self.comp).ln()
        }
    }
}

impl FromIterator<f64> for LogSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = LogSum::new();
        for t in iter {
            acc.add(t);
        }
        acc
    }
}

/// `ln Γ(n + 1)` for integer `n`, exact summation below 256 and Stirling above.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n < 256 {
        return (2..=n).map(|k| (k as f64).ln()).sum();
    }
    let x = n as f64 + 1.0;
    // Stirling series for ln Γ(x), error well below 1e-16 relative at x >= 256
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    (x - 0.5) * x.ln() - x
        + 0.5 * (2.0 * std::f64::consts::PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
}
