use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

use super::metrics::MisalignmentCurve;

pub const CSV_HEADER: &str = "iteration,algorithm,realization,misalignment_db";

/// Renders curves in long format, rows ordered by algorithm label, then
/// realization (indices ascending, the ensemble mean last), then iteration.
pub fn render_csv(curves: &[MisalignmentCurve]) -> Result<String> {
    if curves.is_empty() {
        return Err(Error::InvalidParameter("no curves to export".into()));
    }
    let mut ordered: Vec<&MisalignmentCurve> = curves.iter().collect();
    ordered.sort_by(|a, b| {
        a.algorithm
            .cmp(&b.algorithm)
            .then(a.realization.cmp(&b.realization))
    });
    let mut out = String::with_capacity(64 * curves.iter().map(|c| c.len()).sum::<usize>());
    out.push_str(CSV_HEADER);
    out.push('\n');
    for c in ordered {
        if c.algorithm.contains([',', '"', '\n']) {
            return Err(Error::InvalidParameter(format!(
                "algorithm label {:?} cannot be written unquoted",
                c.algorithm
            )));
        }
        for (k, v) in c.values_db.iter().enumerate() {
            let _ = writeln!(out, "{k},{},{},{v:.15e}", c.algorithm, c.realization);
        }
    }
    Ok(out)
}

/// Writes [`render_csv`] output to `path`. Nothing is created on error.
pub fn export_csv(curves: &[MisalignmentCurve], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = render_csv(curves)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
