//! Deterministic CSV/JSON writers. Identical inputs produce byte-identical
//! files: no timestamps, struct-ordered JSON fields, BTreeMap keys.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use super::{ExperimentSummary, PresetOutput};
use crate::sorters::TimeSeriesRecord;

pub const CSV_HEADER: &str = "t,I,round,S,B,good_swaps,flags";

pub fn series_csv_string(rows: &[TimeSeriesRecord]) -> String {
    let mut out = String::with_capacity(rows.len() * 24 + CSV_HEADER.len() + 1);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let _ = write!(out, "{},{},{},", row.t, row.inversions, row.round);
        if let Some(s) = row.s_remaining {
            let _ = write!(out, "{s}");
        }
        out.push(',');
        if let Some(b) = row.bad_inversions {
            let _ = write!(out, "{b}");
        }
        let _ = writeln!(out, ",{},{}", row.good_swaps, row.flags);
    }
    out
}

pub fn summary_json_string(summary: &ExperimentSummary) -> String {
    let mut json = serde_json::to_string_pretty(summary).expect("summary serializes");
    json.push('\n');
    json
}

/// Write every series and the summary under `out_dir`. Returns the paths
/// written (summary last).
pub fn write_outputs(out_dir: &Path, output: &PresetOutput) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    for (stem, rows) in &output.series {
        let path = out_dir.join(format!("{stem}.csv"));
        fs::write(&path, series_csv_string(rows))?;
        written.push(path);
    }
    let summary_path = out_dir.join("summary.json");
    fs::write(&summary_path, summary_json_string(&output.summary))?;
    written.push(summary_path);
    Ok(written)
}
