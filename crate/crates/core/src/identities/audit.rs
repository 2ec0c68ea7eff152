use serde::Serialize;

use crate::exterior::Form;

/// How a claimed line compares with the engine's recomputation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Verdict {
    Match,
    /// The line holds once the named summands change sign.
    SignMismatch {
        terms: Vec<String>,
    },
    Mismatch,
}

impl Verdict {
    pub fn is_match(&self) -> bool {
        matches!(self, Verdict::Match)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Match => "match",
            Verdict::SignMismatch { .. } => "sign-mismatch",
            Verdict::Mismatch => "mismatch",
        }
    }
}

/// One line of a derivation: the claimed equality, the equality the engine
/// actually finds, and the verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditLine {
    pub label: String,
    pub claimed: String,
    pub computed: String,
    pub verdict: Verdict,
}

fn flip(name: &str) -> String {
    match name.strip_prefix('-') {
        Some(rest) => rest.to_string(),
        None => format!("-{name}"),
    }
}

fn join(lhs: &str, names: &[String]) -> String {
    let mut out = format!("{lhs} = ");
    if names.is_empty() {
        out.push('0');
        return out;
    }
    for (i, name) in names.iter().enumerate() {
        match (i, name.strip_prefix('-')) {
            (0, _) => out.push_str(name),
            (_, Some(rest)) => {
                out.push_str(" - ");
                out.push_str(rest);
            }
            (_, None) => {
                out.push_str(" + ");
                out.push_str(name);
            }
        }
    }
    out
}

/// Compares `lhs` with the sum of the named summands. When the literal sum
/// fails, the smallest set of sign flips that repairs it is reported.
pub fn audit(label: &str, lhs_name: &str, lhs: &Form, summands: &[(&str, Form)]) -> AuditLine {
    let names: Vec<String> = summands.iter().map(|(name, _)| name.to_string()).collect();
    let claimed = join(lhs_name, &names);
    let mut residual = lhs.clone();
    for (_, form) in summands {
        residual = &residual - form;
    }
    if residual.is_zero() {
        return AuditLine {
            label: label.into(),
            computed: claimed.clone(),
            claimed,
            verdict: Verdict::Match,
        };
    }

    let k = summands.len();
    let mut masks: Vec<u32> = (1..(1u32 << k)).collect();
    masks.sort_by_key(|m| m.count_ones());
    for mask in masks {
        let mut trial = residual.clone();
        for (i, (_, form)) in summands.iter().enumerate() {
            if mask & (1 << i) != 0 {
                trial = &trial + &(form + form);
            }
        }
        if trial.is_zero() {
            let flipped: Vec<String> = (0..k)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| names[i].clone())
                .collect();
            let repaired: Vec<String> = names
                .iter()
                .enumerate()
                .map(|(i, name)| {
                    if mask & (1 << i) != 0 {
                        flip(name)
                    } else {
                        name.clone()
                    }
                })
                .collect();
            return AuditLine {
                label: label.into(),
                claimed,
                computed: join(lhs_name, &repaired),
                verdict: Verdict::SignMismatch { terms: flipped },
            };
        }
    }

    let rhs = join("", &names);
    let computed = format!(
        "{lhs_name} - ({}) != 0, residual of {} term(s)",
        rhs.trim_start_matches(" = "),
        residual.len()
    );
    AuditLine {
        label: label.into(),
        claimed,
        computed,
        verdict: Verdict::Mismatch,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ScalarExpr;

    fn c(name: &str, idx: &[usize]) -> Form {
        Form::term(1, ScalarExpr::symbol(name), idx)
    }

    #[test]
    fn exact_line_matches() {
        let lhs = &c("a", &[1]) + &c("b", &[2]);
        let line = audit(
            "sum",
            "x",
            &lhs,
            &[("a dx", c("a", &[1])), ("b dy", c("b", &[2]))],
        );
        assert_eq!(line.verdict, Verdict::Match);
        assert_eq!(line.claimed, "x = a dx + b dy");
    }

    #[test]
    fn single_flip_is_named() {
        let lhs = &c("a", &[1]) - &c("b", &[2]);
        let line = audit(
            "sum",
            "x",
            &lhs,
            &[("a dx", c("a", &[1])), ("b dy", c("b", &[2]))],
        );
        assert_eq!(
            line.verdict,
            Verdict::SignMismatch {
                terms: vec!["b dy".into()]
            }
        );
        assert_eq!(line.computed, "x = a dx - b dy");
    }

    #[test]
    fn unrepairable_line_is_a_mismatch() {
        let lhs = c("a", &[1]);
        let line = audit("sum", "x", &lhs, &[("b dy", c("b", &[2]))]);
        assert_eq!(line.verdict, Verdict::Mismatch);
    }
}
