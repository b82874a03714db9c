//! Time-series monitor rows shared by the slab solvers' CSV output.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::IncError;

/// One output-time row of run diagnostics. Energy-ladder columns are filled
/// by solvers that compute the ladder; the reference solver reports zeros
/// there (its diagnostics are the constraint and conservation columns).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MonitorRow {
    pub t: f64,
    #[serde(rename = "E4")]
    pub e4: f64,
    #[serde(rename = "E5")]
    pub e5: f64,
    #[serde(rename = "E6")]
    pub e6: f64,
    #[serde(rename = "E7")]
    pub e7: f64,
    #[serde(rename = "E8")]
    pub e8: f64,
    #[serde(rename = "divB_L2")]
    pub div_b_l2: f64,
    #[serde(rename = "divU_L2")]
    pub div_u_l2: f64,
    pub wall_trace_max: f64,
    pub energy_drift: f64,
}

/// Write monitor rows as CSV with a fixed header column order.
pub fn write_monitor_csv(path: &Path, rows: &[MonitorRow]) -> Result<(), IncError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| IncError::Io {
        path: path.display().to_string(),
        detail: e.to_string(),
    })?;
    for row in rows {
        w.serialize(row).map_err(|e| IncError::Io {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
    }
    w.flush().map_err(|e| IncError::Io {
        path: path.display().to_string(),
        detail: e.to_string(),
    })?;
    Ok(())
}

/// Read monitor rows back from CSV.
pub fn read_monitor_csv(path: &Path) -> Result<Vec<MonitorRow>, IncError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| IncError::Io {
        path: path.display().to_string(),
        detail: e.to_string(),
    })?;
    let mut rows = Vec::new();
    for rec in r.deserialize() {
        let row: MonitorRow = rec.map_err(|e| IncError::Io {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
        rows.push(row);
    }
    Ok(rows)
}
