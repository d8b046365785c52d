use std::fmt::{self, Write as _};
use std::time::Duration;

/// Outcome of a verification run.
#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Verified,
    Failed(String),
}

impl Verdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, Verdict::Verified)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Verified => f.write_str("verified"),
            Verdict::Failed(why) => write!(f, "failed ({why})"),
        }
    }
}

/// One checked item: a section angle, a sampled section or a sampled
/// rotation.
#[derive(Clone, Debug, PartialEq)]
pub struct CaseRow {
    pub key: f64,
    pub strategy: String,
    pub margin: f64,
    /// Margin of an independent search, when one was run.
    pub blind_margin: Option<f64>,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaseReport {
    pub title: String,
    /// Column name for `CaseRow::key`.
    pub key_name: String,
    pub params: Vec<(String, String)>,
    pub rows: Vec<CaseRow>,
    /// Extra findings, one line each.
    pub notes: Vec<String>,
    pub verdict: Verdict,
    pub min_margin: f64,
    pub runtime: Duration,
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl CaseReport {
    /// CSV with a one-line header. Run time is left out so identical
    /// inputs give byte-identical files.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{},strategy,margin,blind_margin,ok\n", self.key_name);
        for row in &self.rows {
            let blind = row.blind_margin.map(fmt_f64).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                fmt_f64(row.key),
                row.strategy,
                fmt_f64(row.margin),
                blind,
                row.ok
            );
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.title);
        for (k, v) in &self.params {
            let _ = writeln!(out, "  {k} = {v}");
        }
        let failures = self.rows.iter().filter(|r| !r.ok).count();
        let _ = writeln!(out, "  rows checked = {}", self.rows.len());
        let _ = writeln!(out, "  rows failing = {failures}");
        let _ = writeln!(out, "  min margin = {}", fmt_f64(self.min_margin));
        for note in &self.notes {
            let _ = writeln!(out, "  {note}");
        }
        let _ = writeln!(out, "  runtime = {:.3} s", self.runtime.as_secs_f64());
        let _ = writeln!(out, "verdict: {}", self.verdict);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_header_and_full_precision() {
        let report = CaseReport {
            title: "t".into(),
            key_name: "theta".into(),
            params: vec![],
            rows: vec![CaseRow {
                key: 0.1,
                strategy: "identity".into(),
                margin: 1.0 / 3.0,
                blind_margin: None,
                ok: true,
            }],
            notes: vec![],
            verdict: Verdict::Verified,
            min_margin: 1.0 / 3.0,
            runtime: Duration::from_millis(5),
        };
        let csv = report.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("theta,strategy,margin,blind_margin,ok"));
        let row = lines.next().unwrap();
        assert_eq!(
            row,
            "1.0000000000000001e-1,identity,3.3333333333333331e-1,,true"
        );
        let back: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert_eq!(back, 1.0 / 3.0);
        assert!(report.to_text().contains("verdict: verified"));
    }
}
