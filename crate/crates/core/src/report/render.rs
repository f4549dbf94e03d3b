use std::fmt::Write as _;
use std::str::FromStr;

use super::{AnalysisReport, ReportError, VerdictRecord};
use crate::adapt::Outcome;
use crate::javafront::ReceiverForm;

/// Chains longer than this render their first steps followed by `...`.
pub const CHAIN_LIMIT: usize = 6;

const TOP_ROWS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
    Table,
}

impl FromStr for Format {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Format, ReportError> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            "table" => Ok(Format::Table),
            other => Err(ReportError::UnknownFormat(other.to_string())),
        }
    }
}

pub fn render(report: &AnalysisReport, format: Format) -> String {
    match format {
        Format::Json => render_json(report),
        Format::Text => render_text(report),
        Format::Table => render_table(report),
    }
}

fn render_json(report: &AnalysisReport) -> String {
    // Going through Value sorts every object's keys.
    let value = serde_json::to_value(report).expect("report serializes");
    let mut out = serde_json::to_string_pretty(&value).expect("value serializes");
    out.push('\n');
    out
}

/// `part` as a percentage of `whole` with one decimal, rounded half up.
pub fn format_percent(part: usize, whole: usize) -> String {
    if whole == 0 {
        return "0.0 %".to_string();
    }
    let tenths = (part as u128 * 2000 + whole as u128) / (2 * whole as u128);
    format!("{}.{} %", tenths / 10, tenths % 10)
}

/// Receiver provenance followed by the accessed member, e.g.
/// `line: LineConnection → .start(): Connector → .owner()`.
pub fn render_chain(v: &VerdictRecord) -> String {
    // Display names of methods carry their parameter list; fields do not.
    let suffix = if v.member.ends_with(')') { "()" } else { "" };
    let mut parts: Vec<String> =
        v.chain.iter().take(CHAIN_LIMIT).enumerate().map(|(i, step)| step.render(i == 0)).collect();
    if v.chain.len() > CHAIN_LIMIT {
        parts.push("...".to_string());
    }
    let last = if parts.is_empty() && v.receiver_form == ReceiverForm::TypeName {
        format!("{}.{}{suffix}", v.receiver_type.simple_name(), v.member_name)
    } else {
        format!(".{}{suffix}", v.member_name)
    };
    parts.push(last);
    parts.join(" → ")
}

fn outcome_label(o: &Outcome) -> String {
    match o {
        Outcome::Silenced { layer, rule, .. } => format!("silenced at layer {layer} by {rule}"),
        Outcome::Remaining { status, hint, .. } => match hint {
            Some(h) => format!("{} (hint: {h})", status.as_str()),
            None => status.as_str().to_string(),
        },
    }
}

fn render_text(report: &AnalysisReport) -> String {
    let t = &report.totals;
    let mut out = String::new();
    let _ = writeln!(out, "demeterlint {} digest {}", report.tool_version, &report.digest[..report.digest.len().min(16)]);
    let _ = writeln!(
        out,
        "accesses: {}  potential violations: {} ({})  remaining: {}",
        t.accesses,
        t.potential_violations,
        format_percent(t.potential_violations, t.accesses),
        t.remaining
    );
    let mut left = t.potential_violations;
    for (info, count) in report.layers.iter().zip(&t.silenced_per_layer) {
        left -= count.count;
        let _ = writeln!(
            out,
            "  layer {} {}: silenced {} ({}), {} left",
            info.layer,
            info.name,
            count.count,
            format_percent(count.count, t.potential_violations),
            left
        );
    }
    for (status, n) in &t.remaining_by_status {
        let _ = writeln!(out, "  remaining {status}: {n}");
    }
    if !report.rows.is_empty() {
        let _ = writeln!(out, "\ntop executables:");
        out.push_str(&table_grid(report, TOP_ROWS));
    }
    let remaining: Vec<&VerdictRecord> =
        report.verdicts.iter().filter(|v| matches!(v.outcome, Outcome::Remaining { .. })).collect();
    if !remaining.is_empty() {
        let _ = writeln!(out, "\nremaining violations:");
        for v in remaining {
            let _ = writeln!(out, "  {} {} {} [{}]", v.span, v.site, v.member, outcome_label(&v.outcome));
            let _ = writeln!(out, "      {}", render_chain(v));
        }
    }
    out
}

fn render_table(report: &AnalysisReport) -> String {
    table_grid(report, usize::MAX)
}

fn table_grid(report: &AnalysisReport, limit: usize) -> String {
    let mut header = vec!["PV".to_string()];
    header.extend(report.layers.iter().map(|l| format!("L{}", l.layer)));
    header.push("TP".to_string());
    let rows: Vec<(String, Vec<String>)> = report
        .rows
        .iter()
        .take(limit)
        .map(|r| {
            let mut cells = vec![r.pv.to_string()];
            cells.extend(r.after_layer.iter().map(|n| if *n == 0 { "-".to_string() } else { n.to_string() }));
            cells.push(if r.tp_candidates == 0 { "-".to_string() } else { r.tp_candidates.to_string() });
            (r.executable.clone(), cells)
        })
        .collect();
    let label_w = rows.iter().map(|(l, _)| l.chars().count()).max().unwrap_or(0).max("executable".len());
    let widths: Vec<usize> = (0..header.len())
        .map(|i| rows.iter().map(|(_, c)| c[i].len()).chain(std::iter::once(header[i].len())).max().unwrap_or(1))
        .collect();
    let mut out = String::new();
    let line = |label: &str, cells: &[String]| -> String {
        let mut s = format!("{label:<label_w$}");
        for (c, w) in cells.iter().zip(&widths) {
            let _ = write!(s, "  {c:>w$}");
        }
        s.push('\n');
        s
    };
    out.push_str(&line("executable", &header));
    for (label, cells) in &rows {
        out.push_str(&line(label, cells));
    }
    out
}
