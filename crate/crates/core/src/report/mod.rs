//! Report assembly, conservation checks and rendering.

mod render;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::adapt::{attribute_waterfall, LayeredConfig, Outcome, Verdict};
use crate::codemodel::TypeRef;
use crate::javafront::{AccessKind, Executable, ProvStep, ReceiverForm, SourceSpan};

pub use render::{format_percent, render, render_chain, Format, CHAIN_LIMIT};

pub const REPORT_SCHEMA: &str = "demeterlint-report/1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("conservation failure: {0}")]
    Conservation(String),
    #[error("unknown format `{0}`")]
    UnknownFormat(String),
    #[error("malformed report: {0}")]
    Malformed(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerInfo {
    pub layer: u32,
    pub name: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerCount {
    pub layer: u32,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Totals {
    pub accesses: usize,
    pub potential_violations: usize,
    pub silenced_per_layer: Vec<LayerCount>,
    pub remaining: usize,
    pub remaining_by_status: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutableRow {
    pub executable: String,
    pub pv: usize,
    /// Violations left after each configured layer, in layer order.
    pub after_layer: Vec<usize>,
    pub tp_candidates: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WaterfallEntry {
    pub rule: String,
    pub layer: u32,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub site: String,
    pub executable: String,
    pub access_kind: AccessKind,
    pub member: String,
    pub member_name: String,
    pub receiver_form: ReceiverForm,
    pub receiver_type: TypeRef,
    pub span: SourceSpan,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub outcome: Outcome,
    pub chain: Vec<ProvStep>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema: String,
    pub tool_version: String,
    pub digest: String,
    pub layers: Vec<LayerInfo>,
    pub totals: Totals,
    pub rows: Vec<ExecutableRow>,
    pub waterfall: Vec<WaterfallEntry>,
    pub verdicts: Vec<VerdictRecord>,
}

impl AnalysisReport {
    pub fn from_json(text: &str) -> Result<AnalysisReport, ReportError> {
        let report: AnalysisReport = serde_json::from_str(text).map_err(|e| ReportError::Malformed(e.to_string()))?;
        if report.schema != REPORT_SCHEMA {
            return Err(ReportError::Malformed(format!("unexpected schema `{}`", report.schema)));
        }
        Ok(report)
    }

    /// Candidate true positives among the remaining violations.
    pub fn tp_candidates(&self) -> usize {
        self.totals.remaining_by_status.get("candidate-true-positive").copied().unwrap_or(0)
    }
}

/// Content hash over labelled inputs. Order of `parts` matters.
pub fn input_digest<'a>(parts: impl IntoIterator<Item = (&'a str, &'a str, &'a str)>) -> String {
    let mut h = Sha256::new();
    for (kind, name, text) in parts {
        for piece in [kind, name, text] {
            h.update((piece.len() as u64).to_le_bytes());
            h.update(piece.as_bytes());
        }
    }
    hex::encode(h.finalize())
}

pub fn build_report(
    executables: &[Executable],
    verdicts: &[Verdict],
    config: &LayeredConfig,
    digest: &str,
) -> Result<AnalysisReport, ReportError> {
    let waterfall = attribute_waterfall(verdicts, config);
    let accesses = executables.iter().map(|e| e.body_accesses.len()).sum();
    let silenced: usize = waterfall.layers.iter().map(|l| l.silenced).sum();
    if silenced + waterfall.remaining != verdicts.len() {
        return Err(ReportError::Conservation(format!(
            "{silenced} silenced + {} remaining != {} potential violations",
            waterfall.remaining,
            verdicts.len()
        )));
    }
    let rule_sum: usize = waterfall.rules.iter().map(|r| r.silenced).sum();
    if rule_sum != silenced {
        return Err(ReportError::Conservation(format!("per-rule counts sum to {rule_sum}, per-layer to {silenced}")));
    }
    if verdicts.len() > accesses {
        return Err(ReportError::Conservation(format!("{} violations exceed {accesses} accesses", verdicts.len())));
    }

    let positions: BTreeMap<u32, usize> = config.layers.iter().enumerate().map(|(i, l)| (l.index, i)).collect();
    let mut per_exec: BTreeMap<&str, (usize, Vec<usize>, usize)> = BTreeMap::new();
    for v in verdicts {
        let entry = per_exec.entry(v.violation.executable.as_str()).or_insert_with(|| (0, vec![0; config.layers.len()], 0));
        entry.0 += 1;
        match &v.outcome {
            Outcome::Silenced { layer, .. } => {
                let Some(&pos) = positions.get(layer) else {
                    return Err(ReportError::Conservation(format!("verdict names unconfigured layer {layer}")));
                };
                entry.1[pos] += 1;
            }
            Outcome::Remaining { status, .. } => {
                if *status == crate::adapt::RemainingStatus::CandidateTruePositive {
                    entry.2 += 1;
                }
            }
        }
    }
    let mut rows: Vec<ExecutableRow> = per_exec
        .into_iter()
        .map(|(id, (pv, silenced_at, tp))| {
            let mut left = pv;
            let after_layer = silenced_at
                .iter()
                .map(|s| {
                    left -= s;
                    left
                })
                .collect();
            ExecutableRow { executable: id.to_string(), pv, after_layer, tp_candidates: tp }
        })
        .collect();
    for row in &rows {
        let mut prev = row.pv;
        for &n in row.after_layer.iter().chain(std::iter::once(&row.tp_candidates)) {
            if n > prev {
                return Err(ReportError::Conservation(format!("row {} is not descending", row.executable)));
            }
            prev = n;
        }
    }
    rows.sort_by(|a, b| b.pv.cmp(&a.pv).then_with(|| a.executable.cmp(&b.executable)));

    let verdict_records = verdicts
        .iter()
        .map(|v| {
            let site = &v.violation.site;
            VerdictRecord {
                site: site.site_id.clone(),
                executable: v.violation.executable.clone(),
                access_kind: site.access_kind,
                member: site.member.display_name(),
                member_name: site.member.name.clone(),
                receiver_form: site.receiver.form,
                receiver_type: v.violation.receiver_type.clone(),
                span: site.source_span.clone(),
                note: v.violation.note.clone(),
                outcome: v.outcome.clone(),
                chain: site.receiver.provenance_chain.clone(),
            }
        })
        .collect();

    Ok(AnalysisReport {
        schema: REPORT_SCHEMA.to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        digest: digest.to_string(),
        layers: config.layers.iter().map(|l| LayerInfo { layer: l.index, name: l.name.clone() }).collect(),
        totals: Totals {
            accesses,
            potential_violations: verdicts.len(),
            silenced_per_layer: waterfall.layers.iter().map(|l| LayerCount { layer: l.layer, count: l.silenced }).collect(),
            remaining: waterfall.remaining,
            remaining_by_status: waterfall.remaining_by_status.clone(),
        },
        rows,
        waterfall: waterfall
            .rules
            .iter()
            .map(|r| WaterfallEntry { rule: r.rule.clone(), layer: r.layer, count: r.silenced })
            .collect(),
        verdicts: verdict_records,
    })
}
