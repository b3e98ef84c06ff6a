//! Per-slot tracking results and their summary statistics.

use std::fmt::Write as _;

/// One slot of a tracking run. Estimator columns are `None` when the
/// method was not selected (or, for the tracker, before its warm-up ends);
/// `truth` is `None` when the input carries no ground truth.
#[derive(Clone, Copy, Debug)]
pub struct RunRow {
    /// Slot index.
    pub slot: i64,
    /// Ground-truth level, meters.
    pub truth: Option<f64>,
    /// Trellis tracker level, meters.
    pub tracker_level: Option<f64>,
    /// Per-slot peak-pick level, meters.
    pub peak_level: Option<f64>,
    /// Envelope-smoothed level, meters.
    pub smoothed_level: Option<f64>,
    /// Spectrum-plus-tracker update time, microseconds.
    pub latency_us: f64,
}

/// Medians over the run: absolute level error per estimator (over rows
/// where both truth and the estimate exist) and update latency.
#[derive(Clone, Copy, Debug, Default)]
pub struct RunSummary {
    /// Median absolute tracker error, meters.
    pub tracker_median_error: Option<f64>,
    /// Median absolute peak-pick error, meters.
    pub peak_median_error: Option<f64>,
    /// Median absolute smoothed error, meters.
    pub smoothed_median_error: Option<f64>,
    /// Median per-update latency, microseconds.
    pub median_latency_us: f64,
}

/// A tracking run: all rows plus the derived summary.
#[derive(Clone, Debug)]
pub struct RunReport {
    /// Per-slot results in slot order.
    pub rows: Vec<RunRow>,
    /// Medians over the rows.
    pub summary: RunSummary,
}

/// Median of a sample; the even case averages the two middle values.
/// `None` on an empty sample.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        Some(sorted[mid])
    } else {
        Some((sorted[mid - 1] + sorted[mid]) / 2.0)
    }
}

fn median_error(rows: &[RunRow], pick: impl Fn(&RunRow) -> Option<f64>) -> Option<f64> {
    let errors: Vec<f64> = rows
        .iter()
        .filter_map(|row| Some((pick(row)? - row.truth?).abs()))
        .collect();
    median(&errors)
}

impl RunReport {
    /// Builds the report, computing the summary from the rows.
    pub fn from_rows(rows: Vec<RunRow>) -> RunReport {
        let latencies: Vec<f64> = rows.iter().map(|r| r.latency_us).collect();
        let summary = RunSummary {
            tracker_median_error: median_error(&rows, |r| r.tracker_level),
            peak_median_error: median_error(&rows, |r| r.peak_level),
            smoothed_median_error: median_error(&rows, |r| r.smoothed_level),
            median_latency_us: median(&latencies).unwrap_or(0.0),
        };
        RunReport { rows, summary }
    }

    /// Per-slot CSV with a header row; absent values are empty cells.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("slot,truth_m,tracker_m,peak_m,smoothed_m,latency_us\n");
        let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                row.slot,
                cell(row.truth),
                cell(row.tracker_level),
                cell(row.peak_level),
                cell(row.smoothed_level),
                row.latency_us
            );
        }
        out
    }

    /// One-line summary: slot count, the medians that exist, and latency.
    pub fn summary_line(&self) -> String {
        let mut line = format!("summary: slots={}", self.rows.len());
        let mut put = |name: &str, v: Option<f64>| {
            if let Some(v) = v {
                let _ = write!(line, " {name}={v:.6}");
            }
        };
        put("tracker_median_err_m", self.summary.tracker_median_error);
        put("peak_median_err_m", self.summary.peak_median_error);
        put("smoothed_median_err_m", self.summary.smoothed_median_error);
        let _ = write!(line, " median_latency_us={:.1}", self.summary.median_latency_us);
        line
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(slot: i64, truth: Option<f64>, tracker: Option<f64>, latency: f64) -> RunRow {
        RunRow {
            slot,
            truth,
            tracker_level: tracker,
            peak_level: None,
            smoothed_level: None,
            latency_us: latency,
        }
    }

    #[test]
    fn median_handles_odd_even_and_empty() {
        assert_eq!(median(&[]), None);
        assert_eq!(median(&[3.0]), Some(3.0));
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
    }

    #[test]
    fn summary_uses_only_rows_with_truth_and_estimate() {
        let rows = vec![
            row(0, Some(0.10), Some(0.11), 100.0),
            row(1, Some(0.10), None, 150.0),
            row(2, None, Some(0.50), 200.0),
            row(3, Some(0.10), Some(0.13), 250.0),
        ];
        let report = RunReport::from_rows(rows);
        // Errors 0.01 and 0.03; the unmatched rows contribute nothing.
        assert!((report.summary.tracker_median_error.unwrap() - 0.02).abs() < 1e-12);
        assert_eq!(report.summary.peak_median_error, None);
        assert!((report.summary.median_latency_us - 175.0).abs() < 1e-9);
    }

    #[test]
    fn csv_has_header_and_empty_cells() {
        let report = RunReport::from_rows(vec![
            row(0, Some(0.05), Some(0.051), 120.5),
            row(1, None, None, 130.0),
        ]);
        let csv = report.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "slot,truth_m,tracker_m,peak_m,smoothed_m,latency_us");
        assert_eq!(lines[1], "0,0.05,0.051,,,120.5");
        assert_eq!(lines[2], "1,,,,,130");
    }

    #[test]
    fn summary_line_omits_absent_methods() {
        let report = RunReport::from_rows(vec![row(0, None, None, 100.0)]);
        let line = report.summary_line();
        assert!(line.starts_with("summary: slots=1"));
        assert!(!line.contains("tracker_median_err_m"));
        assert!(line.contains("median_latency_us=100.0"));

        let with_truth = RunReport::from_rows(vec![row(0, Some(0.1), Some(0.1), 50.0)]);
        assert!(with_truth.summary_line().contains("tracker_median_err_m=0.000000"));
    }
}
