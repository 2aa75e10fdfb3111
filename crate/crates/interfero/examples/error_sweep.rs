//! A reduced Monte Carlo error-decay sweep (fewer runs than the committed
//! configs, so it finishes in seconds): median scaled error vs number of
//! measurements at SNR ∞ / 15 dB / 25 dB, with common random numbers
//! across the grid. Writes the CSV and SVG artifacts to ./out.

use interfero::experiments::{emit_outputs, monte_carlo_sweep, ScenarioConfig};
use std::path::Path;

fn main() -> interfero::Result<()> {
    let cfg: ScenarioConfig = serde_json::from_str(
        r#"{
            "scenario": "modal-ideal",
            "solver": "dantzig",
            "n": 64,
            "s": 4,
            "m_sweep": [5, 10, 20, 30, 40, 50, 60],
            "snr_db": [null, 15, 25],
            "runs": 20,
            "seed": 1,
            "lambda": 2.0,
            "nonneg": true
        }"#,
    )
    .map_err(|e| interfero::Error::Config(e.to_string()))?;

    let (table, artifacts) = monte_carlo_sweep(&cfg)?;
    for &snr in &[None, Some(15.0), Some(25.0)] {
        let label = snr.map_or("∞ dB".into(), |v: f64| format!("{v} dB"));
        let meds: Vec<String> = [5, 10, 20, 30, 40, 50, 60]
            .iter()
            .filter_map(|&m| table.median_error(m, snr))
            .map(|e| format!("{e:.2e}"))
            .collect();
        println!("SNR {label:>6}: median error {}", meds.join(" "));
    }
    let written = emit_outputs(&table, &artifacts, &cfg, Path::new("out"), true)?;
    for path in written {
        println!("wrote {path}");
    }
    Ok(())
}
