//! Text, structured and LaTeX renderings of a [`VerificationReport`].

use serde_json::{json, Value};

use crate::dsl::{render_form, Format};

use super::{AuditLine, Verdict, VerificationReport};

fn audit_json(line: &AuditLine) -> Value {
    let mut v = json!({
        "label": line.label,
        "claimed": line.claimed,
        "computed": line.computed,
        "verdict": line.verdict.label(),
    });
    if let Verdict::SignMismatch { terms } = &line.verdict {
        v["flipped"] = json!(terms);
    }
    v
}

/// The structured document. Everything except `wall_time` is a pure
/// function of the identity, `n` and the inputs.
pub fn to_json(report: &VerificationReport, seed: Option<u64>) -> Value {
    json!({
        "identity": report.identity.key(),
        "n": report.n,
        "convention": report.convention.to_string(),
        "status": report.status.to_string(),
        "result": render_form(&report.difference, Format::Text),
        "line_audit": report.line_audit.iter().map(audit_json).collect::<Vec<_>>(),
        "seed": seed,
        "wall_time": report.wall_time.as_secs_f64(),
        "exploratory": report.exploratory,
        "profiles_tried": report.profiles_tried.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "latex": { "lhs": render_form(&report.lhs, Format::Latex), "rhs": render_form(&report.rhs, Format::Latex) },
    })
}

pub fn to_text(report: &VerificationReport) -> String {
    let mut out = format!(
        "identity: {} (n = {})\nstatus: {}{}\nconvention: {}\ndifference: {}\n",
        report.identity,
        report.n,
        report.status,
        if report.exploratory {
            " (exploratory)"
        } else {
            ""
        },
        report.convention,
        render_form(&report.difference, Format::Text),
    );
    out.push_str("audit:\n");
    for line in &report.line_audit {
        out.push_str(&format!(
            "  [{}] {}: {}\n",
            line.verdict.label(),
            line.label,
            line.claimed
        ));
        if !line.verdict.is_match() {
            out.push_str(&format!("      engine: {}\n", line.computed));
        }
    }
    out.push_str(&format!(
        "wall_time: {:.3}s\n",
        report.wall_time.as_secs_f64()
    ));
    out
}

pub fn to_latex(report: &VerificationReport) -> String {
    format!(
        "% {} (n = {}): {}\n\\begin{{align*}}\n\\text{{lhs}} &= {} \\\\\n\\text{{rhs}} &= {} \\\\\n\\text{{lhs}} - \\text{{rhs}} &= {}\n\\end{{align*}}\n",
        report.identity,
        report.n,
        report.status,
        render_form(&report.lhs, Format::Latex),
        render_form(&report.rhs, Format::Latex),
        render_form(&report.difference, Format::Latex),
    )
}

pub fn render(report: &VerificationReport, format: Format, seed: Option<u64>) -> String {
    match format {
        Format::Text => to_text(report),
        Format::Structured => serde_json::to_string_pretty(&to_json(report, seed)).expect("json"),
        Format::Latex => to_latex(report),
    }
}
