//! State-spec documents.
//!
//! ```json
//! { "temps": [1.0, "inf"], "displacement": [[0.5, -1.0], [0.0, 0.0]] }
//! ```
//! `"inf"` marks a vacuum mode; a missing `displacement` means zero.

use std::fs;
use std::path::Path;

use serde::Deserialize;
use serde_json::Value;
use thermal_renyi::{Complex64, DisplacedThermalSpec, InverseTemperature, ModeVector};

use crate::CliError;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StateSpecFile {
    // untagged enums lose numbers under arbitrary-precision JSON, so entries are resolved by hand
    temps: Vec<Value>,
    #[serde(default)]
    displacement: Option<Vec<[f64; 2]>>,
}

fn resolve_temp(entry: &Value) -> Result<InverseTemperature, String> {
    match entry {
        Value::Number(n) => {
            let v = n
                .as_f64()
                .ok_or_else(|| format!("{n} is not representable"))?;
            InverseTemperature::new(v).map_err(|e| e.to_string())
        }
        Value::String(s) if s == "inf" => Ok(InverseTemperature::vacuum()),
        other => Err(format!(
            "expected a positive number or \"inf\", got {other}"
        )),
    }
}

pub fn parse_state(text: &str) -> Result<DisplacedThermalSpec, String> {
    let file: StateSpecFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let temps = file
        .temps
        .iter()
        .enumerate()
        .map(|(j, t)| resolve_temp(t).map_err(|e| format!("temps[{j}]: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    let temps = ModeVector::new(temps).map_err(|e| e.to_string())?;
    match file.displacement {
        None => Ok(DisplacedThermalSpec::thermal(temps)),
        Some(d) => {
            let u = d.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
            DisplacedThermalSpec::new(temps, u).map_err(|e| e.to_string())
        }
    }
}

pub fn load_state(path: &Path) -> Result<DisplacedThermalSpec, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_state(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}
