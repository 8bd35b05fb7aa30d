//! Bit-exact CSV export of run records.
//!
//! The column set and order are a stable contract:
//! `t,f_hz,speed_pu,p_turbine_kw,p_gen_kw,p_load_kw,p_dump_kw,dump_cmd,wind_mps`.
//! Values are printed with 9 significant digits, decimal point, no
//! thousands separators, LF line endings, UTF-8. Identical records produce
//! byte-identical files.

use crate::CliError;
use std::io::Write;
use std::path::Path;
use wecsim_core::sim::RunRecord;

/// The exact header line (without trailing newline).
pub const CSV_HEADER: &str =
    "t,f_hz,speed_pu,p_turbine_kw,p_gen_kw,p_load_kw,p_dump_kw,dump_cmd,wind_mps";

/// Formats a value with 9 significant digits in plain decimal notation.
/// Zero prints as `0`; magnitudes at or above 10⁹ keep their integer digits.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (8 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Renders a record as a CSV document (header plus one row per sample).
pub fn csv_string(record: &RunRecord) -> String {
    let mut out = String::with_capacity(64 * (record.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for i in 0..record.len() {
        out.push_str(&format_sig9(record.t[i]));
        out.push(',');
        out.push_str(&format_sig9(record.f_hz[i]));
        out.push(',');
        out.push_str(&format_sig9(record.speed_pu[i]));
        out.push(',');
        out.push_str(&format_sig9(record.p_turbine_kw[i]));
        out.push(',');
        out.push_str(&format_sig9(record.p_gen_kw[i]));
        out.push(',');
        out.push_str(&format_sig9(record.p_load_kw[i]));
        out.push(',');
        out.push_str(&format_sig9(record.p_dump_kw[i]));
        out.push(',');
        out.push_str(&record.dump_cmd[i].to_string());
        out.push(',');
        out.push_str(&format_sig9(record.wind_mps[i]));
        out.push('\n');
    }
    out
}

/// Writes the record to `path` as CSV.
///
/// # Errors
///
/// [`CliError::Io`] carrying the path.
pub fn export_csv(record: &RunRecord, path: &Path) -> Result<(), CliError> {
    write_text(path, &csv_string(record))
}

/// Writes `text` to `path`, mapping failures to [`CliError::Io`].
pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    let io_err = |source: std::io::Error| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut file = std::fs::File::create(path).map_err(io_err)?;
    file.write_all(text.as_bytes()).map_err(io_err)?;
    file.flush().map_err(io_err)
}

/// The sidecar path for a CSV export: `<out>.config`.
pub fn sidecar_path(out: &Path) -> std::path::PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".config");
    out.with_file_name(name)
}
