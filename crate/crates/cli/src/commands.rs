use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use thermal_renyi::oracle::{oracle_trace, DIMENSION_LIMIT};
use thermal_renyi::{
    alpha_threshold, d_alpha_displaced, d_alpha_thermal, fejer_default_constant, fejer_scan,
    sine_interval_indices, thermal_log_trace, Complex64, DisplacedThermalSpec, DivergenceWitness,
    Error, ExtendedEntropy, ModeVector, RenyiOrder, SeriesEstimate, SeriesOptions,
};

use crate::input::load_state;
use crate::output::{fmt_f64, num};
use crate::{CliError, Outcome};

#[derive(Parser, Debug)]
#[command(
    name = "thermal-renyi",
    version,
    about = "Petz-Rényi relative entropies of displaced thermal states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Finiteness threshold alpha* and the per-mode ratios s/(s-r).
    Threshold { rho: PathBuf, sigma: PathBuf },
    /// D_alpha(rho || sigma) at one order.
    Entropy {
        rho: PathBuf,
        sigma: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 1_000_000)]
        cap: u64,
    },
    /// D_alpha over an evenly spaced grid of orders.
    Sweep {
        rho: PathBuf,
        sigma: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        alpha_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        alpha_max: f64,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = SweepFormat::Csv)]
        out: SweepFormat,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 1_000_000)]
        cap: u64,
    },
    /// Compare the closed form and the series against the dense Fock-space oracle.
    Validate {
        #[arg(long, value_enum, default_value_t = ValidateCase::Default)]
        case: ValidateCase,
        /// Per-mode truncation of the oracle.
        #[arg(long, default_value_t = 96)]
        dim: usize,
        /// State files for `--case file`.
        #[arg(long, required_if_eq("case", "file"))]
        rho: Option<PathBuf>,
        #[arg(long, required_if_eq("case", "file"))]
        sigma: Option<PathBuf>,
        /// Orders for `--case file`; repeat the flag for several.
        #[arg(long = "alpha", default_values_t = [0.5])]
        alphas: Vec<f64>,
        /// Relative tolerance for `--case file`.
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
    },
    /// Sine-interval witnesses and the Fejér lower-bound scan of <j|W(u)|j>.
    WeylScan {
        #[arg(long, allow_negative_numbers = true)]
        u_re: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
        u_im: f64,
        #[arg(long, default_value_t = 1000)]
        j_max: u64,
        /// Scan constant C; defaults to 1/(2 sqrt(2 pi |u|)).
        #[arg(long)]
        c: Option<f64>,
        #[arg(long, default_value_t = 20)]
        m_max: u64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepFormat {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValidateCase {
    Default,
    File,
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Threshold { rho, sigma } => cmd_threshold(&load_state(rho)?, &load_state(sigma)?),
        Command::Entropy {
            rho,
            sigma,
            alpha,
            tol,
            cap,
        } => cmd_entropy(
            &load_state(rho)?,
            &load_state(sigma)?,
            *alpha,
            SeriesOptions {
                tol: *tol,
                cap: *cap,
            },
        ),
        Command::Sweep {
            rho,
            sigma,
            alpha_min,
            alpha_max,
            steps,
            out,
            tol,
            cap,
        } => cmd_sweep(
            &load_state(rho)?,
            &load_state(sigma)?,
            &SweepGrid {
                alpha_min: *alpha_min,
                alpha_max: *alpha_max,
                steps: *steps,
            },
            *out,
            SeriesOptions {
                tol: *tol,
                cap: *cap,
            },
        ),
        Command::Validate {
            case,
            dim,
            rho,
            sigma,
            alphas,
            tolerance,
        } => match case {
            ValidateCase::Default => cmd_validate_default(*dim),
            ValidateCase::File => {
                let rho = load_state(rho.as_ref().expect("required by clap"))?;
                let sigma = load_state(sigma.as_ref().expect("required by clap"))?;
                cmd_validate_file(&rho, &sigma, alphas, *tolerance, *dim)
            }
        },
        Command::WeylScan {
            u_re,
            u_im,
            j_max,
            c,
            m_max,
        } => cmd_weyl_scan(Complex64::new(*u_re, *u_im), *j_max, *c, *m_max),
    }
}

fn document(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn modes_1based(modes: &[usize]) -> Value {
    Value::from(modes.iter().map(|j| j + 1).collect::<Vec<_>>())
}

pub fn cmd_threshold(
    rho: &DisplacedThermalSpec,
    sigma: &DisplacedThermalSpec,
) -> Result<Outcome, CliError> {
    match alpha_threshold(rho.temps(), sigma.temps()) {
        Ok(th) => {
            let ratios: Vec<Value> = th
                .ratios
                .iter()
                .map(|&(j, q)| json!({ "mode": j + 1, "ratio": num(q) }))
                .collect();
            let doc = json!({
                "alpha_star": num(th.alpha_star),
                "argmin_modes": modes_1based(&th.argmin_modes),
                "ratios": ratios,
            });
            Ok(Outcome {
                stdout: document(&doc),
                notices: vec![format!("alpha* = {}", fmt_f64(th.alpha_star))],
                exit_code: 0,
            })
        }
        Err(Error::SupportViolation { modes }) => {
            let warning = format!(
                "support condition violated on modes {:?}: D_alpha is infinite for every alpha > 1",
                modes.iter().map(|j| j + 1).collect::<Vec<_>>()
            );
            let doc = json!({
                "alpha_star": Value::Null,
                "argmin_modes": [],
                "ratios": [],
                "support_violation": modes_1based(&modes),
                "warning": warning,
            });
            Ok(Outcome {
                stdout: document(&doc),
                notices: vec![format!("warning: {warning}")],
                exit_code: 0,
            })
        }
        Err(e) => Err(e.into()),
    }
}

/// One evaluated order.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub alpha: f64,
    pub entropy: ExtendedEntropy,
    pub series: Option<SeriesEstimate>,
    pub method: &'static str,
}

/// Thermal closed form when neither state is displaced, the factorized series otherwise.
pub fn evaluate(
    rho: &DisplacedThermalSpec,
    sigma: &DisplacedThermalSpec,
    alpha: f64,
    opts: SeriesOptions,
) -> Result<Evaluation, CliError> {
    let order = RenyiOrder::new(alpha)?;
    if rho.is_undisplaced() && sigma.is_undisplaced() {
        let entropy = d_alpha_thermal(rho.temps(), sigma.temps(), order)?;
        return Ok(Evaluation {
            alpha,
            entropy,
            series: None,
            method: "thermal-closed-form",
        });
    }
    let out = d_alpha_displaced(rho, sigma, order, opts).map_err(|e| match e {
        Error::NotFaithful { modes } => CliError::Usage(format!(
            "displaced states with alpha > 1 must be faithful; vacuum modes {:?}",
            modes.iter().map(|j| j + 1).collect::<Vec<_>>()
        )),
        other => other.into(),
    })?;
    Ok(Evaluation {
        alpha,
        entropy: out.entropy,
        series: out.series,
        method: "displaced-series",
    })
}

fn witness_json(w: &DivergenceWitness) -> Value {
    let mut m = Map::new();
    m.insert("kind".into(), Value::from(w.kind.to_string()));
    m.insert(
        "mode".into(),
        w.mode.map_or(Value::Null, |j| Value::from(j + 1)),
    );
    m.insert("alpha_star".into(), w.alpha_star.map_or(Value::Null, num));
    m.insert("detail".into(), Value::from(w.detail.clone()));
    Value::Object(m)
}

fn series_json(s: &SeriesEstimate) -> Value {
    json!({
        "log_sum": num(s.log_sum),
        "tail_bound": num(s.tail_bound),
        "terms_used": s.terms_used,
        "converged": s.converged,
    })
}

impl Evaluation {
    fn to_json(&self) -> Value {
        json!({
            "alpha": num(self.alpha),
            "finite": self.entropy.is_finite(),
            "value": num(self.entropy.value()),
            "method": self.method,
            "witness": self.entropy.witness().map_or(Value::Null, witness_json),
            "series": self.series.as_ref().map_or(Value::Null, series_json),
        })
    }

    fn tail_bound(&self) -> f64 {
        self.series.as_ref().map_or(0.0, |s| s.tail_bound)
    }

    fn terms(&self) -> u64 {
        self.series.as_ref().map_or(0, |s| s.terms_used)
    }
}

pub fn cmd_entropy(
    rho: &DisplacedThermalSpec,
    sigma: &DisplacedThermalSpec,
    alpha: f64,
    opts: SeriesOptions,
) -> Result<Outcome, CliError> {
    let ev = evaluate(rho, sigma, alpha, opts)?;
    let mut notices = vec![format!(
        "D_alpha = {} ({})",
        fmt_f64(ev.entropy.value()),
        ev.method
    )];
    if let Some(s) = &ev.series {
        if !s.converged {
            notices.push(format!(
                "warning: series stopped at the term cap with relative tail bound {}",
                fmt_f64(s.tail_bound)
            ));
        }
    }
    Ok(Outcome {
        stdout: document(&ev.to_json()),
        notices,
        exit_code: 0,
    })
}

/// `steps` evenly spaced orders from `alpha_min` to `alpha_max`; one step gives `alpha_min` alone.
#[derive(Clone, Copy, Debug)]
pub struct SweepGrid {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub steps: usize,
}

impl SweepGrid {
    fn points(&self) -> Result<Vec<f64>, CliError> {
        let ok = self.alpha_min.is_finite()
            && self.alpha_max.is_finite()
            && self.alpha_min > 0.0
            && self.alpha_min < self.alpha_max;
        if !ok {
            return Err(CliError::Usage(format!(
                "sweep range must satisfy 0 < alpha-min < alpha-max, got [{}, {}]",
                self.alpha_min, self.alpha_max
            )));
        }
        if self.steps == 0 {
            return Err(CliError::Usage("steps must be at least 1".into()));
        }
        if self.steps == 1 {
            return Ok(vec![self.alpha_min]);
        }
        let span = self.alpha_max - self.alpha_min;
        let last = (self.steps - 1) as f64;
        Ok((0..self.steps)
            .map(|i| self.alpha_min + span * i as f64 / last)
            .collect())
    }
}

/// Grid evaluations in grid order, `α = 1` points dropped.
pub fn sweep_rows(
    rho: &DisplacedThermalSpec,
    sigma: &DisplacedThermalSpec,
    grid: &SweepGrid,
    opts: SeriesOptions,
) -> Result<(Vec<Evaluation>, Vec<String>), CliError> {
    let points = grid.points()?;
    let notices = points
        .iter()
        .filter(|&&a| a == 1.0)
        .map(|_| "notice: skipping grid point alpha = 1".to_string())
        .collect();
    let rows = points
        .par_iter()
        .filter(|&&a| a != 1.0)
        .map(|&a| evaluate(rho, sigma, a, opts))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((rows, notices))
}

pub const SWEEP_HEADER: [&str; 5] = ["alpha", "finite", "d_alpha", "tail_bound", "terms"];

pub fn cmd_sweep(
    rho: &DisplacedThermalSpec,
    sigma: &DisplacedThermalSpec,
    grid: &SweepGrid,
    format: SweepFormat,
    opts: SeriesOptions,
) -> Result<Outcome, CliError> {
    let (rows, notices) = sweep_rows(rho, sigma, grid, opts)?;
    let stdout = match format {
        SweepFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| CliError::Usage(e.to_string());
            w.write_record(SWEEP_HEADER).map_err(io)?;
            for r in &rows {
                w.write_record([
                    fmt_f64(r.alpha),
                    r.entropy.is_finite().to_string(),
                    fmt_f64(r.entropy.value()),
                    fmt_f64(r.tail_bound()),
                    r.terms().to_string(),
                ])
                .map_err(io)?;
            }
            String::from_utf8(w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?)
                .expect("csv output is UTF-8")
        }
        SweepFormat::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "alpha": num(r.alpha),
                        "finite": r.entropy.is_finite(),
                        "d_alpha": num(r.entropy.value()),
                        "tail_bound": num(r.tail_bound()),
                        "terms": r.terms(),
                    })
                })
                .collect();
            document(&json!({ "rows": rows }))
        }
    };
    Ok(Outcome {
        stdout,
        notices,
        exit_code: 0,
    })
}

/// One oracle comparison.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub alpha: f64,
    pub reference: f64,
    pub oracle: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn deviation(&self) -> f64 {
        ((self.reference - self.oracle) / self.reference).abs()
    }

    pub fn passed(&self) -> bool {
        self.deviation() <= self.tolerance
    }

    fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "alpha": num(self.alpha),
            "reference": num(self.reference),
            "oracle": num(self.oracle),
            "relative_deviation": num(self.deviation()),
            "tolerance": num(self.tolerance),
            "pass": self.passed(),
        })
    }
}

fn check_guard(modes: usize, dim: usize) -> Result<(), CliError> {
    if dim < 2 {
        return Err(CliError::Usage(format!(
            "--dim must be at least 2, got {dim}"
        )));
    }
    let total = (0..modes).try_fold(1usize, |acc, _| acc.checked_mul(dim));
    match total {
        Some(t) if t <= DIMENSION_LIMIT => Ok(()),
        _ => Err(Error::DimensionGuard {
            dim: total.unwrap_or(usize::MAX),
            limit: DIMENSION_LIMIT,
        }
        .into()),
    }
}

fn single_mode(temp: f64, u: f64) -> DisplacedThermalSpec {
    DisplacedThermalSpec::new(
        ModeVector::from_values(&[temp]).expect("valid temperature"),
        vec![Complex64::new(u, 0.0)],
    )
    .expect("matching lengths")
}

pub const THERMAL_ALPHAS: [f64; 4] = [0.3, 0.5, 0.9, 1.5];
pub const DISPLACED_ALPHAS: [f64; 3] = [0.3, 0.7, 1.5];
pub const THERMAL_TOLERANCE: f64 = 1e-10;
pub const DISPLACED_TOLERANCE: f64 = 1e-6;

/// Closed form vs oracle and series vs oracle for `r = 1`, `s = 2`
/// (undisplaced, then `u₁ = 1`), plus the closed form vs the series at zero displacement.
pub fn default_checks(dim: usize) -> Result<Vec<Check>, CliError> {
    check_guard(1, dim)?;
    let sigma = single_mode(2.0, 0.0);
    let rho = single_mode(1.0, 0.0);
    let rho_disp = single_mode(1.0, 1.0);
    let mut checks = Vec::new();
    for a in THERMAL_ALPHAS {
        let order = RenyiOrder::new(a)?;
        let closed = thermal_log_trace(rho.temps(), sigma.temps(), order)?
            .expect("finite below the threshold")
            .exp();
        let oracle = oracle_trace(&rho, &sigma, order, dim)?;
        checks.push(Check {
            name: "thermal-closed-form-vs-oracle",
            alpha: a,
            reference: closed,
            oracle: oracle.trace,
            tolerance: THERMAL_TOLERANCE,
        });
        let series = d_alpha_displaced(&rho, &sigma, order, SeriesOptions::default())?;
        checks.push(Check {
            name: "thermal-closed-form-vs-series",
            alpha: a,
            reference: closed,
            oracle: series.series.expect("finite").log_sum.exp(),
            tolerance: THERMAL_TOLERANCE,
        });
    }
    for a in DISPLACED_ALPHAS {
        let order = RenyiOrder::new(a)?;
        let series = d_alpha_displaced(&rho_disp, &sigma, order, SeriesOptions::default())?;
        let oracle = oracle_trace(&rho_disp, &sigma, order, dim)?;
        checks.push(Check {
            name: "displaced-series-vs-oracle",
            alpha: a,
            reference: series.series.expect("finite").log_sum.exp(),
            oracle: oracle.trace,
            tolerance: DISPLACED_TOLERANCE,
        });
    }
    Ok(checks)
}

fn report(checks: &[Check], dim: usize) -> Outcome {
    let pass = checks.iter().all(Check::passed);
    let max_dev = checks.iter().map(Check::deviation).fold(0.0, f64::max);
    let doc = json!({
        "dim": dim,
        "checks": checks.iter().map(Check::to_json).collect::<Vec<_>>(),
        "max_relative_deviation": num(max_dev),
        "pass": pass,
    });
    let mut notices: Vec<String> = checks
        .iter()
        .filter(|c| !c.passed())
        .map(|c| {
            format!(
                "FAIL {} alpha={}: deviation {} > {}",
                c.name,
                c.alpha,
                fmt_f64(c.deviation()),
                fmt_f64(c.tolerance)
            )
        })
        .collect();
    notices.push(format!(
        "{} of {} checks passed, max relative deviation {}",
        checks.iter().filter(|c| c.passed()).count(),
        checks.len(),
        fmt_f64(max_dev)
    ));
    Outcome {
        stdout: document(&doc),
        notices,
        exit_code: if pass { 0 } else { 1 },
    }
}

pub fn cmd_validate_default(dim: usize) -> Result<Outcome, CliError> {
    Ok(report(&default_checks(dim)?, dim))
}

/// Series (or closed form) vs oracle for user-supplied states at the finite orders among `alphas`.
pub fn cmd_validate_file(
    rho: &DisplacedThermalSpec,
    sigma: &DisplacedThermalSpec,
    alphas: &[f64],
    tolerance: f64,
    dim: usize,
) -> Result<Outcome, CliError> {
    if rho.modes() != sigma.modes() {
        return Err(Error::LengthMismatch {
            expected: rho.modes(),
            found: sigma.modes(),
        }
        .into());
    }
    check_guard(rho.modes(), dim)?;
    let mut checks = Vec::new();
    let mut skipped = Vec::new();
    for &a in alphas {
        let ev = evaluate(rho, sigma, a, SeriesOptions::default())?;
        if !ev.entropy.is_finite() {
            skipped.push(format!(
                "notice: alpha = {a} is beyond the threshold; skipped"
            ));
            continue;
        }
        let order = RenyiOrder::new(a)?;
        let oracle = oracle_trace(rho, sigma, order, dim)?;
        // compare traces: exp((α-1) D_α)
        checks.push(Check {
            name: ev.method,
            alpha: a,
            reference: ((a - 1.0) * ev.entropy.value()).exp(),
            oracle: oracle.trace,
            tolerance,
        });
    }
    let mut out = report(&checks, dim);
    skipped.append(&mut out.notices);
    out.notices = skipped;
    Ok(out)
}

pub fn cmd_weyl_scan(
    u: Complex64,
    j_max: u64,
    c: Option<f64>,
    m_max: u64,
) -> Result<Outcome, CliError> {
    if u.norm() == 0.0 {
        return Err(CliError::Usage("displacement u must be nonzero".into()));
    }
    let constant = c.unwrap_or_else(|| fejer_default_constant(u));
    let scan = fejer_scan(u, j_max, constant)?;
    let witnesses = sine_interval_indices(u, m_max)?;
    let floor = std::f64::consts::FRAC_1_SQRT_2;
    let all_clear = witnesses.iter().all(|w| w.sine >= floor);
    let listed: Vec<Value> = witnesses
        .iter()
        .map(|w| {
            json!({
                "m": w.m,
                "lo": num(w.lo),
                "hi": num(w.hi),
                "j": w.j,
                "sine": num(w.sine),
                "clears_floor": w.sine >= floor,
            })
        })
        .collect();
    let half = fejer_scan(u, (j_max / 2).max(1), constant)?.count();
    let doc = json!({
        "u": [num(u.re), num(u.im)],
        "constant": num(constant),
        "j_max": j_max,
        "count": scan.count(),
        "count_half_range": half,
        "indices": scan.indices,
        "sine_floor": num(floor),
        "witnesses": listed,
        "all_witnesses_clear_floor": all_clear,
    });
    Ok(Outcome {
        stdout: document(&doc),
        notices: vec![format!(
            "{} of {} indices satisfy |<j|W(u)|j>| >= C j^(-3/8); {} sine-interval witnesses",
            scan.count(),
            j_max,
            witnesses.len()
        )],
        exit_code: if all_clear { 0 } else { 1 },
    })
}
