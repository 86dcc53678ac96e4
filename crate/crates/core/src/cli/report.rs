//! Markdown audit report and its JSON companion. The markdown is a pure
//! function of the companion, so the companion alone reproduces it.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fairness::{AuditReport, FairnessVerdict};
use crate::global::GlobalExplanation;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditDocument {
    pub tool: String,
    pub version: String,
    pub data: String,
    pub data_sha256: String,
    pub target: String,
    pub sensitive: Vec<String>,
    pub seed: u64,
    pub config: String,
    pub audits: Vec<AuditReport>,
}

pub fn to_json(doc: &AuditDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("report serializes");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<AuditDocument> {
    serde_json::from_str(text).map_err(|e| Error::Data(format!("bad report JSON: {e}")))
}

fn verdict_text(v: &FairnessVerdict) -> String {
    if v.fair {
        format!("fair (no sensitive feature in top {} above noise)", v.k)
    } else {
        let list: Vec<String> = v
            .offenders
            .iter()
            .map(|o| format!("{} (rank {}, {:+.6})", o.feature, o.rank, o.mean_signed))
            .collect();
        format!("unfair: {}", list.join(", "))
    }
}

fn cell(g: Option<&GlobalExplanation>, row: usize) -> (String, String, String) {
    match g.and_then(|g| g.ranked.get(row)) {
        Some(c) => (c.feature.clone(), format!("{:+.6}", c.mean_signed), format!("{:.6}", c.mean_abs)),
        None => (String::new(), String::new(), String::new()),
    }
}

pub fn render_markdown(doc: &AuditDocument) -> String {
    let mut out = String::new();
    let w = &mut out;
    writeln!(w, "# Fairness audit\n").unwrap();
    writeln!(w, "- data: `{}` (sha256 `{}`)", doc.data, doc.data_sha256).unwrap();
    writeln!(w, "- target: `{}`", doc.target).unwrap();
    writeln!(w, "- sensitive: {}", doc.sensitive.iter().map(|s| format!("`{s}`")).collect::<Vec<_>>().join(", ")).unwrap();
    writeln!(w, "- seed: {}", doc.seed).unwrap();
    writeln!(w, "- {} {}\n", doc.tool, doc.version).unwrap();

    writeln!(w, "## Accuracy\n").unwrap();
    writeln!(w, "| Algorithm | Model | Accuracy |").unwrap();
    writeln!(w, "|---|---|---|").unwrap();
    for a in &doc.audits {
        let name = a.spec.algorithm().short_name();
        writeln!(w, "| {name} | Global | {:.4} |", a.original_accuracy).unwrap();
        match &a.ensemble {
            Some(e) => writeln!(w, "| {name} | Lime_out | {:.4} |", e.accuracy).unwrap(),
            None => writeln!(w, "| {name} | Lime_out | no action (fair) |").unwrap(),
        }
    }
    writeln!(w).unwrap();

    for a in &doc.audits {
        let name = a.spec.algorithm().short_name();
        writeln!(w, "## {name}\n").unwrap();
        writeln!(w, "- train/test rows: {}/{}", a.train_rows, a.test_rows).unwrap();
        writeln!(w, "- classifier seed: {}", a.spec.seed).unwrap();
        writeln!(w, "- original: {}", verdict_text(&a.original_verdict)).unwrap();
        match &a.ensemble {
            Some(e) => {
                let masks: Vec<String> = e
                    .member_masks
                    .iter()
                    .map(|m| format!("{{{}}}", m.dropped().iter().cloned().collect::<Vec<_>>().join(", ")))
                    .collect();
                writeln!(w, "- ensemble members drop: {}", masks.join(" ")).unwrap();
                writeln!(w, "- ensemble: {}", verdict_text(&e.verdict)).unwrap();
            }
            None => writeln!(w, "- ensemble: not built").unwrap(),
        }
        writeln!(w).unwrap();
        let ens = a.ensemble.as_ref().map(|e| &e.global);
        writeln!(
            w,
            "| Features | Contributions | Mean abs | Features (Lime_out) | Contributions (Lime_out) | Mean abs (Lime_out) |"
        )
        .unwrap();
        writeln!(w, "|---|---|---|---|---|---|").unwrap();
        let rows = a.settings.top_k.min(a.original_global.ranked.len());
        for r in 0..rows {
            let (f1, c1, a1) = cell(Some(&a.original_global), r);
            let (f2, c2, a2) = cell(ens, r);
            writeln!(w, "| {f1} | {c1} | {a1} | {f2} | {c2} | {a2} |").unwrap();
        }
        writeln!(w).unwrap();
    }

    writeln!(w, "## Configuration\n").unwrap();
    writeln!(w, "```text\n{}\n```", doc.config.trim_end()).unwrap();
    out
}
