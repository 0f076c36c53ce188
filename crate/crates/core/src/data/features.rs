use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Radius of the 1.2 mm feed wire, in cm.
const WIRE_RADIUS_CM: f64 = 0.06;

/// Directed energy deposition variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProcessKind {
    /// Blown powder: feed in g/min, scanning speed in mm/min, no electrical power.
    BlownPowder,
    /// Hot wire: feed in m/min, travel speed in mm/s, electrical pre-heat power.
    HotWire,
}

/// Raw process parameters of one deposition setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcessFeatureRow {
    pub kind: ProcessKind,
    /// Powder feed rate (g/min) or wire feed rate (m/min).
    pub feed_rate: f64,
    /// Scanning speed (mm/min) or travel speed (mm/s).
    pub speed: f64,
    /// Laser power, W.
    pub laser_power: f64,
    /// Electrical power, W; zero for blown powder.
    pub electrical_power: f64,
    /// Material density, g/cm³.
    pub density: f64,
}

/// Process features shared by both deposition variants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommonFeatures {
    /// Material feed rate, mm³/s.
    pub mfr: f64,
    /// Travel speed, mm/s.
    pub ts: f64,
    /// Energy density, J/mm³.
    pub ed: f64,
}

pub fn derive_common_features(row: &ProcessFeatureRow) -> Result<CommonFeatures> {
    let positive = [row.feed_rate, row.speed, row.laser_power, row.density];
    if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::InvalidProcessRow(format!("{row:?}")));
    }
    if !(row.electrical_power.is_finite() && row.electrical_power >= 0.0) {
        return Err(Error::InvalidProcessRow(format!("{row:?}")));
    }

    let (mfr, ts, heat) = match row.kind {
        ProcessKind::BlownPowder => (row.feed_rate / row.density * 1000.0 / 60.0, row.speed / 60.0, row.laser_power),
        ProcessKind::HotWire => (
            row.feed_rate * 100.0 * PI * WIRE_RADIUS_CM * WIRE_RADIUS_CM * 1000.0 / 60.0,
            row.speed,
            row.laser_power + row.electrical_power,
        ),
    };
    if mfr == 0.0 {
        return Err(Error::DivisionByZero("material feed rate"));
    }
    Ok(CommonFeatures { mfr, ts, ed: heat / mfr })
}
