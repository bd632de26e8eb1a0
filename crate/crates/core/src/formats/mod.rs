//! Text formats: DIMACS CNF, DIMACS WCNF (soft clauses only) and a native
//! truth-table format.
//!
//! Native format:
//!
//! ```text
//! c optional comment
//! csp <n>
//! t <weight> <arity> <v1> ... <va> <table>
//! ```
//!
//! `<table>` is a `0`/`1` string of length `2^arity`; character `t` (leftmost
//! is `t = 0`) is the truth value on the row where `vj` takes bit `j` of `t`.

mod csp;
mod dimacs;

use std::fmt;
use std::str::FromStr;

pub use csp::parse_csp;
pub use dimacs::{parse_cnf, parse_wcnf};

use crate::error::{Error, Result};
use crate::instance::CspInstance;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SourceKind {
    Cnf,
    Wcnf,
    Csp,
}

impl fmt::Display for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SourceKind::Cnf => "cnf",
            SourceKind::Wcnf => "wcnf",
            SourceKind::Csp => "csp",
        })
    }
}

impl FromStr for SourceKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "cnf" => Ok(SourceKind::Cnf),
            "wcnf" => Ok(SourceKind::Wcnf),
            "csp" => Ok(SourceKind::Csp),
            other => Err(format!(
                "unknown format {other:?} (expected cnf, wcnf or csp)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostics {
    /// `(1-based line, message)`.
    pub warnings: Vec<(usize, String)>,
    pub source_kind: SourceKind,
}

impl ParseDiagnostics {
    fn new(source_kind: SourceKind) -> Self {
        ParseDiagnostics {
            warnings: Vec::new(),
            source_kind,
        }
    }

    fn warn(&mut self, line: usize, message: impl Into<String>) {
        self.warnings.push((line, message.into()));
    }
}

/// Format named by the first non-comment line.
pub fn detect(text: &str) -> Option<SourceKind> {
    let line = text
        .lines()
        .map(str::trim)
        .find(|l| (!l.is_empty() && !l.starts_with('c')) || l.starts_with("csp"))?;
    let mut tokens = line.split_whitespace();
    match (tokens.next(), tokens.next()) {
        (Some("p"), Some("cnf")) => Some(SourceKind::Cnf),
        (Some("p"), Some("wcnf")) => Some(SourceKind::Wcnf),
        (Some("csp"), _) => Some(SourceKind::Csp),
        _ => None,
    }
}

/// Parses `text` as `kind`, or as the detected format when `kind` is `None`.
pub fn parse<W: Scalar>(
    text: &str,
    kind: Option<SourceKind>,
) -> Result<(CspInstance<W>, ParseDiagnostics)> {
    let kind = match kind.or_else(|| detect(text)) {
        Some(kind) => kind,
        None => {
            return Err(Error::format(
                1,
                "cannot detect format: expected `p cnf`, `p wcnf` or `csp` header",
            ))
        }
    };
    match kind {
        SourceKind::Cnf => parse_cnf(text),
        SourceKind::Wcnf => parse_wcnf(text),
        SourceKind::Csp => parse_csp(text),
    }
}

pub fn serialize<W: Scalar>(inst: &CspInstance<W>, kind: SourceKind) -> Result<String> {
    use std::fmt::Write;

    let mut out = String::new();
    let clause_lits = |what: &str| -> Result<Vec<Vec<i64>>> {
        if !inst.is_clausal() {
            return Err(Error::Unsupported(format!(
                "{what} output needs a clause-built instance"
            )));
        }
        Ok(inst
            .constraints()
            .iter()
            .map(|c| c.clause_literals().expect("clausal constraint"))
            .collect())
    };
    let write_lits = |out: &mut String, lits: &[i64]| {
        for l in lits {
            write!(out, "{l} ").unwrap();
        }
        out.push_str("0\n");
    };
    match kind {
        SourceKind::Cnf => {
            let clauses = clause_lits("cnf")?;
            if inst.constraints().iter().any(|c| c.weight() != W::one()) {
                return Err(Error::Unsupported("cnf output needs unit weights".into()));
            }
            writeln!(out, "p cnf {} {}", inst.num_vars(), clauses.len()).unwrap();
            for lits in &clauses {
                write_lits(&mut out, lits);
            }
        }
        SourceKind::Wcnf => {
            let clauses = clause_lits("wcnf")?;
            writeln!(out, "p wcnf {} {}", inst.num_vars(), clauses.len()).unwrap();
            for (c, lits) in inst.constraints().iter().zip(&clauses) {
                write!(out, "{} ", c.weight()).unwrap();
                write_lits(&mut out, lits);
            }
        }
        SourceKind::Csp => {
            writeln!(out, "csp {}", inst.num_vars()).unwrap();
            for c in inst.constraints() {
                write!(out, "t {} {}", c.weight(), c.arity()).unwrap();
                for v in c.variables() {
                    write!(out, " {v}").unwrap();
                }
                writeln!(out, " {}", c.truth_table()).unwrap();
            }
        }
    }
    Ok(out)
}

/// Lines with their 1-based numbers, `\r` stripped and trimmed.
pub(crate) fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.split('\n')
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r').trim()))
}

pub(crate) fn parse_weight<W: Scalar>(token: &str, line: usize) -> Result<W> {
    let w: W = token
        .parse()
        .map_err(|_| Error::format(line, format!("invalid weight {token:?}")))?;
    if !w.is_finite() {
        return Err(Error::format(
            line,
            format!("weight {token:?} is not finite"),
        ));
    }
    if w <= W::zero() {
        return Err(Error::format(
            line,
            format!("weight {token} must be positive"),
        ));
    }
    Ok(w)
}

pub(crate) fn parse_count(token: Option<&str>, what: &str, line: usize) -> Result<usize> {
    let token = token.ok_or_else(|| Error::format(line, format!("missing {what}")))?;
    token
        .parse()
        .map_err(|_| Error::format(line, format!("invalid {what} {token:?}")))
}

/// Re-tags a construction error with the offending line.
pub(crate) fn at_line(line: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Domain(msg) => Error::format(line, msg),
        Error::IndexOutOfRange { index, num_vars } => Error::format(
            line,
            format!("variable {index} out of range 1..={num_vars}"),
        ),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{random_csp, random_weighted_cnf};
    use proptest::prelude::*;

    #[test]
    fn detection() {
        assert_eq!(detect("c hi\np cnf 1 1\n1 0\n"), Some(SourceKind::Cnf));
        assert_eq!(detect("p wcnf 1 1\n1 1 0\n"), Some(SourceKind::Wcnf));
        assert_eq!(detect("c x\ncsp 1\nt 1 1 1 01\n"), Some(SourceKind::Csp));
        assert_eq!(detect("hello"), None);
        assert!(matches!(
            parse::<f64>("hello", None),
            Err(Error::Format { line: 1, .. })
        ));
    }

    #[test]
    fn unit_weights_as_wcnf() {
        let (inst, _) = parse_cnf::<f64>("p cnf 2 2\n1 -2 0\n2 0\n").unwrap();
        let text = serialize(&inst, SourceKind::Wcnf).unwrap();
        assert_eq!(text, "p wcnf 2 2\n1 1 -2 0\n1 2 0\n");
    }

    #[test]
    fn cnf_output_requirements() {
        let (xor, _) = parse_csp::<f64>("csp 2\nt 1 2 1 2 0110\n").unwrap();
        assert!(matches!(
            serialize(&xor, SourceKind::Cnf),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            serialize(&xor, SourceKind::Wcnf),
            Err(Error::Unsupported(_))
        ));
        let (weighted, _) = parse_wcnf::<f64>("p wcnf 2 1\n2.5 1 0\n").unwrap();
        assert!(matches!(
            serialize(&weighted, SourceKind::Cnf),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn xor_round_trip_keeps_table() {
        let text = "csp 2\nt 1 2 1 2 0110\n";
        let (inst, _) = parse_csp::<f64>(text).unwrap();
        assert_eq!(serialize(&inst, SourceKind::Csp).unwrap(), text);
    }

    proptest! {
        #[test]
        fn cnf_round_trip(n in 1usize..30, m in 1usize..40, len in 1usize..6, seed in any::<u64>()) {
            let inst: CspInstance<f64> = random_weighted_cnf(n, m, len, false, seed);
            let text = serialize(&inst, SourceKind::Cnf).unwrap();
            let (back, diag) = parse_cnf::<f64>(&text).unwrap();
            prop_assert_eq!(&back, &inst);
            prop_assert!(diag.warnings.is_empty());
            prop_assert_eq!(serialize(&back, SourceKind::Cnf).unwrap(), text);
        }

        #[test]
        fn wcnf_round_trip(n in 1usize..30, m in 1usize..40, len in 1usize..6, seed in any::<u64>()) {
            let inst: CspInstance<f64> = random_weighted_cnf(n, m, len, true, seed);
            let text = serialize(&inst, SourceKind::Wcnf).unwrap();
            let (back, _) = parse_wcnf::<f64>(&text).unwrap();
            prop_assert_eq!(back, inst);
        }

        #[test]
        fn csp_round_trip(n in 1usize..12, m in 1usize..20, arity in 1usize..7, seed in any::<u64>()) {
            let inst: CspInstance<f64> = random_csp(n, m, arity, seed);
            let text = serialize(&inst, SourceKind::Csp).unwrap();
            let (back, _) = parse_csp::<f64>(&text).unwrap();
            prop_assert_eq!(back, inst);
        }
    }
}
