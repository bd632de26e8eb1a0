use super::{at_line, numbered_lines, parse_count, parse_weight, ParseDiagnostics, SourceKind};
use crate::error::{Error, Result};
use crate::instance::{Constraint, CspInstance};
use crate::scalar::Scalar;

struct Header<W> {
    line: usize,
    num_vars: usize,
    num_clauses: usize,
    top: Option<W>,
}

/// DIMACS CNF; every clause gets unit weight.
pub fn parse_cnf<W: Scalar>(text: &str) -> Result<(CspInstance<W>, ParseDiagnostics)> {
    parse_dimacs(text, SourceKind::Cnf)
}

/// DIMACS WCNF with soft clauses only. A clause whose weight equals `top` is
/// hard and rejected.
pub fn parse_wcnf<W: Scalar>(text: &str) -> Result<(CspInstance<W>, ParseDiagnostics)> {
    parse_dimacs(text, SourceKind::Wcnf)
}

fn parse_header<W: Scalar>(line: &str, lineno: usize, kind: SourceKind) -> Result<Header<W>> {
    let mut tokens = line.split_whitespace();
    tokens.next(); // "p"
    let expected = kind.to_string();
    match tokens.next() {
        Some(t) if t == expected => {}
        other => {
            return Err(Error::format(
                lineno,
                format!("expected `p {expected}` header, found format {other:?}"),
            ))
        }
    }
    let num_vars = parse_count(tokens.next(), "variable count", lineno)?;
    let num_clauses = parse_count(tokens.next(), "clause count", lineno)?;
    let top = match (kind, tokens.next()) {
        (SourceKind::Wcnf, Some(t)) => Some(parse_weight::<W>(t, lineno)?),
        (_, None) => None,
        (_, Some(t)) => {
            return Err(Error::format(
                lineno,
                format!("unexpected header token {t:?}"),
            ))
        }
    };
    if let Some(t) = tokens.next() {
        return Err(Error::format(
            lineno,
            format!("unexpected header token {t:?}"),
        ));
    }
    if num_vars == 0 {
        return Err(Error::format(lineno, "variable count must be positive"));
    }
    Ok(Header {
        line: lineno,
        num_vars,
        num_clauses,
        top,
    })
}

struct Pending<W> {
    line: usize,
    weight: Option<W>,
    literals: Vec<i64>,
}

fn parse_dimacs<W: Scalar>(
    text: &str,
    kind: SourceKind,
) -> Result<(CspInstance<W>, ParseDiagnostics)> {
    let weighted = kind == SourceKind::Wcnf;
    let mut diag = ParseDiagnostics::new(kind);
    let mut header: Option<Header<W>> = None;
    let mut constraints = Vec::new();
    let mut pending: Option<Pending<W>> = None;
    let mut last_line = 1;

    'lines: for (lineno, line) in numbered_lines(text) {
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        last_line = lineno;
        if line.starts_with('%') {
            diag.warn(lineno, "legacy `%` trailer; ignoring the rest of the file");
            break 'lines;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(Error::format(lineno, "duplicate header"));
            }
            header = Some(parse_header(line, lineno, kind)?);
            continue;
        }
        let Some(h) = header.as_ref() else {
            return Err(Error::format(
                lineno,
                format!("clause data before `p {kind}` header"),
            ));
        };

        for token in line.split_whitespace() {
            let p = pending.get_or_insert_with(|| Pending {
                line: lineno,
                weight: None,
                literals: Vec::new(),
            });
            if weighted && p.weight.is_none() {
                if p.literals.is_empty() && token == "0" && constraints.len() == h.num_clauses {
                    pending = None;
                    diag.warn(lineno, "stray `0` after the last clause");
                    continue;
                }
                let w = parse_weight::<W>(token, lineno)?;
                match h.top {
                    Some(top) if w == top => {
                        return Err(Error::Unsupported(format!(
                            "line {lineno}: hard clause (weight equals top); hard constraints out of scope"
                        )))
                    }
                    Some(top) if w > top => {
                        return Err(Error::format(lineno, format!("weight {token} exceeds top {top}")))
                    }
                    _ => {}
                }
                p.weight = Some(w);
                continue;
            }
            let lit: i64 = token
                .parse()
                .map_err(|_| Error::format(lineno, format!("invalid literal {token:?}")))?;
            if lit != 0 {
                if lit.unsigned_abs() as usize > h.num_vars {
                    return Err(Error::format(
                        lineno,
                        format!("literal {lit} out of range for {} variables", h.num_vars),
                    ));
                }
                p.literals.push(lit);
                continue;
            }
            let done = pending.take().expect("pending clause");
            if done.literals.is_empty() {
                if !weighted && constraints.len() == h.num_clauses {
                    diag.warn(lineno, "stray `0` after the last clause");
                    continue;
                }
                return Err(Error::format(lineno, "empty clause"));
            }
            if constraints.len() == h.num_clauses {
                return Err(Error::format(
                    lineno,
                    format!("more clauses than the {} declared", h.num_clauses),
                ));
            }
            let weight = done.weight.unwrap_or_else(W::one);
            constraints
                .push(Constraint::clause(&done.literals, weight).map_err(at_line(done.line))?);
        }
    }

    let Some(h) = header else {
        return Err(Error::format(
            last_line,
            format!("missing `p {kind}` header"),
        ));
    };
    if let Some(p) = pending {
        if p.weight.is_some() || !p.literals.is_empty() {
            return Err(Error::format(p.line, "clause not terminated by 0"));
        }
    }
    if constraints.len() != h.num_clauses {
        return Err(Error::format(
            last_line,
            format!(
                "header declares {} clauses, found {}",
                h.num_clauses,
                constraints.len()
            ),
        ));
    }
    let inst = CspInstance::build(h.num_vars, constraints, true).map_err(at_line(h.line))?;
    Ok((inst, diag))
}
