use super::{at_line, numbered_lines, parse_count, parse_weight, ParseDiagnostics, SourceKind};
use crate::error::{Error, Result};
use crate::instance::{Constraint, CspInstance, TruthTable, MAX_ARITY};
use crate::scalar::Scalar;

/// Native truth-table format (see the module docs).
pub fn parse_csp<W: Scalar>(text: &str) -> Result<(CspInstance<W>, ParseDiagnostics)> {
    let diag = ParseDiagnostics::new(SourceKind::Csp);
    let mut header: Option<(usize, usize)> = None;
    let mut constraints = Vec::new();
    let mut last_line = 1;

    for (lineno, line) in numbered_lines(text) {
        let mut tokens = line.split_whitespace();
        let Some(first) = tokens.next() else {
            continue;
        };
        last_line = lineno;
        match first {
            "csp" => {
                if header.is_some() {
                    return Err(Error::format(lineno, "duplicate header"));
                }
                let n = parse_count(tokens.next(), "variable count", lineno)?;
                if n == 0 {
                    return Err(Error::format(lineno, "variable count must be positive"));
                }
                if let Some(t) = tokens.next() {
                    return Err(Error::format(
                        lineno,
                        format!("unexpected header token {t:?}"),
                    ));
                }
                header = Some((lineno, n));
            }
            "c" => {}
            _ if first.starts_with('c') => {}
            "t" => {
                if header.is_none() {
                    return Err(Error::format(lineno, "constraint before `csp` header"));
                }
                let weight_tok = tokens
                    .next()
                    .ok_or_else(|| Error::format(lineno, "missing weight"))?;
                let weight: W = parse_weight(weight_tok, lineno)?;
                let arity = parse_count(tokens.next(), "arity", lineno)?;
                if arity == 0 || arity > MAX_ARITY {
                    return Err(Error::format(
                        lineno,
                        format!("arity {arity} outside 1..={MAX_ARITY}"),
                    ));
                }
                let vars = (0..arity)
                    .map(|_| parse_count(tokens.next(), "variable", lineno))
                    .collect::<Result<Vec<_>>>()?;
                let table_tok = tokens
                    .next()
                    .ok_or_else(|| Error::format(lineno, "missing truth table"))?;
                if table_tok.len() != 1 << arity {
                    return Err(Error::format(
                        lineno,
                        format!(
                            "truth table has {} characters, arity {arity} needs {}",
                            table_tok.len(),
                            1usize << arity
                        ),
                    ));
                }
                let table: TruthTable = table_tok
                    .parse()
                    .map_err(|e: String| Error::format(lineno, e))?;
                if let Some(t) = tokens.next() {
                    return Err(Error::format(lineno, format!("unexpected token {t:?}")));
                }
                constraints.push(Constraint::new(weight, &vars, table).map_err(at_line(lineno))?);
                // Range is checked per line so the error points here.
                let (_, n) = header.unwrap();
                if let Some(&v) = vars.iter().find(|&&v| v > n) {
                    return Err(Error::format(
                        lineno,
                        format!("variable {v} out of range 1..={n}"),
                    ));
                }
            }
            other => {
                return Err(Error::format(
                    lineno,
                    format!("unexpected line start {other:?}"),
                ));
            }
        }
    }

    let Some((header_line, n)) = header else {
        return Err(Error::format(last_line, "missing `csp` header"));
    };
    let inst = CspInstance::new(n, constraints).map_err(at_line(header_line))?;
    Ok((inst, diag))
}
