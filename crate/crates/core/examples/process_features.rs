//! Mapping two deposition processes onto shared features: material feed
//! rate (mm³/s), travel speed (mm/s) and energy density (J/mm³).
//!
//! ```text
//! cargo run --example process_features
//! ```

use srcsel::data::{derive_common_features, ProcessFeatureRow, ProcessKind};

fn main() -> srcsel::Result<()> {
    let rows = [
        // Blown powder: g/min, mm/min, W; stainless steel at 7.98 g/cm³.
        ProcessFeatureRow { kind: ProcessKind::BlownPowder, feed_rate: 15.0, speed: 600.0, laser_power: 1000.0, electrical_power: 0.0, density: 7.98 },
        // Hot wire: m/min, mm/s, laser W, wire heating W; duplex steel at 7.8 g/cm³.
        ProcessFeatureRow { kind: ProcessKind::HotWire, feed_rate: 1.5, speed: 8.0, laser_power: 3000.0, electrical_power: 600.0, density: 7.8 },
    ];
    println!("{:<12} {:>10} {:>8} {:>10}", "process", "MFR", "TS", "ED");
    for row in &rows {
        let f = derive_common_features(row)?;
        println!("{:<12} {:>10.3} {:>8.3} {:>10.3}", format!("{:?}", row.kind), f.mfr, f.ts, f.ed);
    }
    let bad = ProcessFeatureRow { speed: 0.0, ..rows[0] };
    println!("\nzero speed is rejected: {}", derive_common_features(&bad).unwrap_err());
    Ok(())
}
