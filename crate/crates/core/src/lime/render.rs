use std::fmt::Write as _;

use crate::error::Result;
use crate::lime::explain::Explanation;

const BAR_HALF_WIDTH: usize = 30;
/// Contributions below this magnitude never fill the bar; keeps numerically
/// zero coefficients from being stretched to full width.
const BAR_SCALE_FLOOR: f64 = 0.01;

pub fn to_json(e: &Explanation) -> Result<String> {
    Ok(serde_json::to_string_pretty(e).expect("explanation serializes"))
}

pub fn from_json(text: &str) -> Result<Explanation> {
    serde_json::from_str(text).map_err(|e| crate::Error::Data(format!("bad explanation JSON: {e}")))
}

fn header(e: &Explanation) -> String {
    format!(
        "explained class: {} (p = {:.4})\nintercept: {:+.6}  local R2: {:.4}\n",
        e.class_label, e.model_output, e.intercept, e.local_r2
    )
}

pub fn to_text_table(e: &Explanation) -> String {
    let mut out = header(e);
    let name_w = e.contributions.iter().map(|c| c.feature.len()).max().unwrap_or(7).max(7);
    let val_w = e.contributions.iter().map(|c| e.instance_text[c.index].len()).max().unwrap_or(5).max(5);
    writeln!(out, "{:>4}  {:<name_w$}  {:>val_w$}  {:>12}", "rank", "feature", "value", "weight").unwrap();
    for (r, c) in e.contributions.iter().enumerate() {
        writeln!(
            out,
            "{:>4}  {:<name_w$}  {:>val_w$}  {:>+12.6}",
            r + 1,
            c.feature,
            e.instance_text[c.index],
            c.weight
        )
        .unwrap();
    }
    out
}

/// Horizontal bars around a center axis: right of `|` supports the explained
/// class, left of it opposes it.
pub fn to_bar_chart(e: &Explanation) -> String {
    let mut out = header(e);
    writeln!(out, "left: against {0}   right: toward {0}", e.class_label).unwrap();
    let name_w = e.contributions.iter().map(|c| c.feature.len()).max().unwrap_or(0);
    for (c, len) in e.contributions.iter().zip(bar_lengths(e)) {
        let bar = "#".repeat(len.unsigned_abs() as usize);
        let (left, right) = if len < 0 {
            (format!("{bar:>BAR_HALF_WIDTH$}"), String::new())
        } else {
            (" ".repeat(BAR_HALF_WIDTH), bar)
        };
        writeln!(
            out,
            "{:<name_w$} {left}|{right:<BAR_HALF_WIDTH$} {:+.4}",
            c.feature, c.weight
        )
        .unwrap();
    }
    out
}

/// Bar lengths as drawn, signed by direction. Exposed for checks on the chart.
pub fn bar_lengths(e: &Explanation) -> Vec<i64> {
    let scale = e
        .contributions
        .iter()
        .fold(BAR_SCALE_FLOOR, |m, c| m.max(c.weight.abs()));
    e.contributions
        .iter()
        .map(|c| {
            let len = (((c.weight.abs() / scale) * BAR_HALF_WIDTH as f64).round() as i64).min(BAR_HALF_WIDTH as i64);
            if c.weight < 0.0 {
                -len
            } else {
                len
            }
        })
        .collect()
}
