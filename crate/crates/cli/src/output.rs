//! CSV time series and plain-text run summaries.

use std::fmt::Write as _;
use std::io::Write;

use geoslam_core::metrics::ErrorRecord;
use geoslam_core::{RunSummary, Scenario};

/// Floats are written with 17 significant digits so they round-trip exactly.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_header(landmarks: usize) -> Vec<String> {
    let mut header: Vec<String> = ["t", "V", "att_err_rad", "pos_err_m"].map(String::from).into();
    header.extend((1..=landmarks).map(|i| format!("map_err_{i}")));
    header.extend((1..=landmarks).map(|i| format!("rel_map_err_{i}")));
    header.push("att_source_ok".into());
    header
}

pub fn csv_row(record: &ErrorRecord) -> Vec<String> {
    let mut row = vec![
        format_float(record.time),
        format_float(record.lyapunov),
        format_float(record.attitude_error_angle),
        format_float(record.position_error),
    ];
    row.extend(record.map_error.iter().copied().map(format_float));
    row.extend(record.relative_map_error.iter().copied().map(format_float));
    row.push(if record.attitude_source_ok { "1" } else { "0" }.into());
    row
}

pub fn write_csv<W: Write>(out: W, landmarks: usize, records: &[ErrorRecord]) -> csv::Result<()> {
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    writer.write_record(csv_header(landmarks))?;
    for record in records {
        writer.write_record(csv_row(record))?;
    }
    writer.flush()?;
    Ok(())
}

/// Where a run came from, echoed into its summary.
#[derive(Debug, Clone)]
pub struct Provenance {
    pub scenario_path: String,
    pub scenario_sha256: String,
    pub seed: u64,
    /// Parameter overrides applied on top of the file, e.g. from a sweep.
    pub overrides: Vec<(String, f64)>,
}

pub fn summary_text(scenario: &Scenario, summary: &RunSummary, provenance: &Provenance) -> String {
    let mut s = String::new();
    let f = format_float;
    let _ = writeln!(s, "scenario: {}", scenario.name);
    let _ = writeln!(s, "scenario_file: {}", provenance.scenario_path);
    let _ = writeln!(s, "scenario_sha256: {}", provenance.scenario_sha256);
    let _ = writeln!(s, "seed: {}", provenance.seed);
    for (path, value) in &provenance.overrides {
        let _ = writeln!(s, "override: {path} = {}", f(*value));
    }
    let _ = writeln!(s, "tool_version: geoslam {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(s, "steps: {}", summary.steps);
    let _ = writeln!(s, "dt: {}", f(scenario.dt));
    let _ = writeln!(s, "degenerate_frames: {}", summary.degenerate_frames);
    let _ = writeln!(s);
    let (a, b) = (&summary.initial, &summary.last);
    let _ = writeln!(s, "{:<16} {:>24} {:>24} {:>24}", "metric", "initial", "final", "factor");
    let mut line = |name: &str, x: f64, y: f64, factor: f64| {
        let _ = writeln!(s, "{name:<16} {:>24} {:>24} {:>24}", f(x), f(y), f(factor));
    };
    line("V", a.lyapunov, b.lyapunov, summary.lyapunov_factor());
    line("att_err_rad", a.attitude_error_angle, b.attitude_error_angle, summary.attitude_factor());
    line("pos_err_m", a.position_error, b.position_error, summary.position_factor());
    for i in 0..a.map_error.len() {
        let (x, y) = (a.map_error[i], b.map_error[i]);
        line(&format!("map_err_{}", i + 1), x, y, geoslam_core::engine::convergence_factor(x, y));
    }
    for i in 0..a.relative_map_error.len() {
        let (x, y) = (a.relative_map_error[i], b.relative_map_error[i]);
        line(&format!("rel_map_err_{}", i + 1), x, y, geoslam_core::engine::convergence_factor(x, y));
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "worst map factor: {}", f(summary.map_factor()));
    let _ = writeln!(s, "worst relative map factor: {}", f(summary.relative_map_factor()));
    s
}
