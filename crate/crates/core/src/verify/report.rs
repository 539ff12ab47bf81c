//! Speedup reports: JSON lines for machines, a Markdown table for people.

use super::{Measurement, OffloadPattern};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("report has no baseline measurement")]
pub struct MissingBaseline;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub pattern: OffloadPattern,
    pub samples: Vec<f64>,
    pub stat: f64,
    /// Baseline stat divided by this pattern's stat.
    pub ratio: f64,
}

pub fn speedup_report(measurements: &[Measurement]) -> Result<Vec<ReportRow>, MissingBaseline> {
    let base = measurements
        .iter()
        .find(|m| m.pattern.is_baseline())
        .ok_or(MissingBaseline)?
        .stat;
    Ok(measurements
        .iter()
        .map(|m| ReportRow {
            pattern: m.pattern.clone(),
            samples: m.samples.clone(),
            stat: m.stat,
            ratio: base / m.stat,
        })
        .collect())
}

/// One JSON object per row, newline-terminated.
pub fn to_json_lines(rows: &[ReportRow]) -> String {
    let mut out = String::new();
    for r in rows {
        out.push_str(&serde_json::to_string(r).expect("row serializes"));
        out.push('\n');
    }
    out
}

/// `x` rounded to `digits` significant digits, without trailing zeros.
pub fn format_sig(x: f64, digits: u32) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = digits as i32 - 1 - exp;
    let s = if decimals >= 0 {
        format!("{:.*}", decimals as usize, x)
    } else {
        let scale = 10f64.powi(-decimals);
        format!("{:.0}", (x / scale).round() * scale)
    };
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Markdown table with one row per measurement. `labels` maps block ids to
/// descriptions for the "offloaded" column.
pub fn to_markdown(
    rows: &[ReportRow],
    best: &OffloadPattern,
    labels: &BTreeMap<usize, String>,
) -> String {
    let mut out = String::from("# Offload pattern measurements\n\n");
    out.push_str("| Pattern | Offloaded blocks | Median time [s] | Speedup vs all-CPU |\n");
    out.push_str("|---|---|---:|---:|\n");
    for r in rows {
        let blocks = if r.pattern.is_baseline() {
            "(none, all-CPU)".to_string()
        } else {
            r.pattern
                .selected()
                .iter()
                .map(|id| {
                    labels
                        .get(id)
                        .map_or_else(|| format!("#{id}"), |l| format!("#{id} {l}"))
                })
                .collect::<Vec<_>>()
                .join("; ")
        };
        let marker = if &r.pattern == best {
            " **(selected)**"
        } else {
            ""
        };
        let _ = writeln!(
            out,
            "| {}{marker} | {blocks} | {} | {} |",
            r.pattern,
            format_sig(r.stat, 4),
            format_sig(r.ratio, 4)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(ids: &[usize], t: f64) -> Measurement {
        Measurement::new(
            OffloadPattern::from_ids(ids.iter().copied()),
            vec![t],
            "simulated",
        )
    }

    #[test]
    fn ratios_against_baseline() {
        for (base, expect) in [(730.0, "730"), (130000.0, "130000"), (5.4, "5.4")] {
            let rows = speedup_report(&[m(&[], base), m(&[0], 1.0)]).unwrap();
            assert_eq!(rows[0].ratio, 1.0);
            assert_eq!(rows[1].ratio, base);
            assert_eq!(format_sig(rows[1].ratio, 4), expect);
        }
    }

    #[test]
    fn missing_baseline() {
        assert_eq!(speedup_report(&[m(&[0], 1.0)]), Err(MissingBaseline));
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(1.0, 4), "1");
        assert_eq!(format_sig(0.0013698630136986301, 4), "0.00137");
        assert_eq!(format_sig(123456.0, 4), "123500");
        assert_eq!(format_sig(4.56789, 4), "4.568");
        assert_eq!(format_sig(999.96, 4), "1000");
    }

    #[test]
    fn json_lines_shape() {
        let rows = speedup_report(&[m(&[], 2.0), m(&[1, 3], 1.0)]).unwrap();
        let text = to_json_lines(&rows);
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(
            lines[0],
            r#"{"pattern":"base","samples":[2.0],"stat":2.0,"ratio":1.0}"#
        );
        assert_eq!(
            lines[1],
            r#"{"pattern":"1-3","samples":[1.0],"stat":1.0,"ratio":2.0}"#
        );
    }

    #[test]
    fn markdown_marks_selection() {
        let rows = speedup_report(&[m(&[], 730.0), m(&[0], 1.0)]).unwrap();
        let md = to_markdown(
            &rows,
            &OffloadPattern::from_ids([0]),
            &[(0, "fft() call in main".to_string())].into(),
        );
        assert!(
            md.contains("| 0 **(selected)** | #0 fft() call in main | 1 | 730 |"),
            "{md}"
        );
    }
}
