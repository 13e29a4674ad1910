//! Line-oriented reaction DSL parser.
//!
//! ```text
//! # comments run to end of line
//! reaction:  <complex> "->" <complex> "@" <symbol>
//! complex:   "0" | term ("+" term)*        term: [count] species
//! domain:    <symbol> "=" <number>
//!          | <symbol> "in" ("["|"(") <number> "," <number> ("]"|")")
//!          | <symbol> ">" "0"
//! ```
//!
//! Species order is order of first appearance. Every rate symbol must be
//! declared exactly once, may label exactly one reaction, and reactant
//! complexes are at most bimolecular.

use super::{ParameterDomain, Reaction, ReactionNetwork};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
#[error("line {line}, column {col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, PartialEq)]
pub enum ParseErrorKind {
    #[error("expected {0}")]
    Expected(String),
    #[error("unexpected trailing input")]
    Trailing,
    #[error("invalid number `{0}`")]
    BadNumber(String),
    #[error("reactant complex `{0}` is trimolecular or higher (at most bimolecular allowed)")]
    Trimolecular(String),
    #[error("reaction changes nothing (zero stoichiometric vector)")]
    NoOpReaction,
    #[error("rate symbol `{0}` labels more than one reaction")]
    DuplicateRateSymbol(String),
    #[error("parameter `{0}` is declared more than once")]
    DuplicateDomain(String),
    #[error("rate symbol `{0}` has no domain declaration")]
    UndeclaredParameter(String),
    #[error("parameter `{0}` is declared but labels no reaction")]
    UnusedParameter(String),
    #[error("fixed rate must be positive, got {0}")]
    NonPositiveFixed(f64),
    #[error("interval must satisfy 0 <= lo <= hi < inf, got [{0}, {1}]")]
    BadInterval(f64, f64),
    #[error("stoichiometric count must be a positive integer")]
    BadCount,
}

struct Cursor<'a> {
    src: &'a str,
    line: usize,
    pos: usize, // byte offset within the line
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str, line: usize) -> Self {
        Cursor { src, line, pos: 0 }
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError { line: self.line, col: self.pos + 1, kind }
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(|c: char| c == ' ' || c == '\t') {
            self.pos += 1;
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.err(ParseErrorKind::Expected(format!("`{tok}`"))))
        }
    }

    fn ident(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let rest = self.rest();
        let mut end = 0;
        for (i, c) in rest.char_indices() {
            let ok = if i == 0 { c.is_ascii_alphabetic() || c == '_' } else { c.is_ascii_alphanumeric() || c == '_' };
            if ok {
                end = i + c.len_utf8();
            } else {
                break;
            }
        }
        if end == 0 {
            None
        } else {
            self.pos += end;
            Some(&rest[..end])
        }
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        self.skip_ws();
        let rest = self.rest();
        let end = rest
            .char_indices()
            .take_while(|&(_, c)| c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || c == '+' || c == '-')
            .map(|(i, c)| i + c.len_utf8())
            .last()
            .unwrap_or(0);
        let text = &rest[..end];
        let v: f64 = text.parse().map_err(|_| self.err(ParseErrorKind::BadNumber(text.to_string())))?;
        if !v.is_finite() {
            return Err(self.err(ParseErrorKind::BadNumber(text.to_string())));
        }
        self.pos += end;
        Ok(v)
    }

    fn integer(&mut self) -> Option<u32> {
        self.skip_ws();
        let rest = self.rest();
        let end = rest.char_indices().take_while(|&(_, c)| c.is_ascii_digit()).map(|(i, _)| i + 1).last()?;
        let v: u32 = rest[..end].parse().ok()?;
        self.pos += end;
        Some(v)
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.rest().is_empty()
    }
}

/// One side of a reaction as (species name, count) pairs; empty for `0`.
fn parse_complex<'a>(cur: &mut Cursor<'a>) -> Result<Vec<(&'a str, u32)>, ParseError> {
    cur.skip_ws();
    // A bare `0` is the empty complex; `0` followed by an identifier is a count.
    if cur.rest().starts_with('0') {
        let mut probe = Cursor { src: cur.src, line: cur.line, pos: cur.pos + 1 };
        probe.skip_ws();
        let next = probe.rest().chars().next();
        if !matches!(next, Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            cur.pos += 1;
            return Ok(Vec::new());
        }
    }
    let mut terms = Vec::new();
    loop {
        cur.skip_ws();
        let count = match cur.rest().chars().next() {
            Some(c) if c.is_ascii_digit() => {
                let n = cur.integer().ok_or_else(|| cur.err(ParseErrorKind::BadCount))?;
                if n == 0 {
                    return Err(cur.err(ParseErrorKind::BadCount));
                }
                n
            }
            _ => 1,
        };
        let name = cur.ident().ok_or_else(|| cur.err(ParseErrorKind::Expected("species name".into())))?;
        terms.push((name, count));
        if !cur.eat("+") {
            break;
        }
    }
    Ok(terms)
}

/// Parse DSL source into a validated [`ReactionNetwork`].
pub fn parse_network(text: &str) -> Result<ReactionNetwork, ParseError> {
    let mut species: Vec<String> = Vec::new();
    let mut species_idx: BTreeMap<String, usize> = BTreeMap::new();
    let mut reactions: Vec<Reaction> = Vec::new();
    let mut rate_lines: BTreeMap<String, usize> = BTreeMap::new();
    let mut domains: BTreeMap<String, ParameterDomain> = BTreeMap::new();
    let mut domain_lines: BTreeMap<String, usize> = BTreeMap::new();

    let intern = |name: &str, species: &mut Vec<String>, idx: &mut BTreeMap<String, usize>| -> usize {
        if let Some(&i) = idx.get(name) {
            return i;
        }
        species.push(name.to_string());
        idx.insert(name.to_string(), species.len() - 1);
        species.len() - 1
    };

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let mut cur = Cursor::new(body, line_no);

        if body.contains("->") {
            let lhs = parse_complex(&mut cur)?;
            cur.expect("->")?;
            let rhs = parse_complex(&mut cur)?;
            cur.expect("@")?;
            let sym = cur.ident().ok_or_else(|| cur.err(ParseErrorKind::Expected("rate symbol".into())))?.to_string();
            if !cur.at_end() {
                return Err(cur.err(ParseErrorKind::Trailing));
            }

            let order: u32 = lhs.iter().map(|(_, c)| c).sum();
            if order > 2 {
                let text: Vec<String> = lhs.iter().map(|(n, c)| format!("{c} {n}")).collect();
                return Err(ParseError { line: line_no, col: 1, kind: ParseErrorKind::Trimolecular(text.join(" + ")) });
            }
            if let Some(prev) = rate_lines.get(&sym) {
                let _ = prev;
                return Err(ParseError { line: line_no, col: 1, kind: ParseErrorKind::DuplicateRateSymbol(sym) });
            }
            rate_lines.insert(sym.clone(), line_no);

            let mut collect = |side: &[(&str, u32)]| -> Vec<(usize, u32)> {
                let mut acc: BTreeMap<usize, u32> = BTreeMap::new();
                for &(name, c) in side {
                    let i = intern(name, &mut species, &mut species_idx);
                    *acc.entry(i).or_insert(0) += c;
                }
                acc.into_iter().collect()
            };
            let reactants = collect(&lhs);
            let products = collect(&rhs);
            let r = Reaction { reactants, products, rate: sym };
            if r.stoichiometry(species.len()).iter().all(|&z| z == 0) {
                return Err(ParseError { line: line_no, col: 1, kind: ParseErrorKind::NoOpReaction });
            }
            reactions.push(r);
        } else {
            let sym = cur.ident().ok_or_else(|| cur.err(ParseErrorKind::Expected("parameter symbol".into())))?.to_string();
            cur.skip_ws();
            let dom = if cur.eat("=") {
                let v = cur.number()?;
                if v <= 0.0 {
                    return Err(ParseError { line: line_no, col: 1, kind: ParseErrorKind::NonPositiveFixed(v) });
                }
                ParameterDomain::Fixed(v)
            } else if cur.rest().starts_with("in") {
                cur.expect("in")?;
                cur.skip_ws();
                let lo_closed = if cur.eat("[") {
                    true
                } else if cur.eat("(") {
                    false
                } else {
                    return Err(cur.err(ParseErrorKind::Expected("`[` or `(`".into())));
                };
                let lo = cur.number()?;
                cur.expect(",")?;
                let hi = cur.number()?;
                let hi_closed = if cur.eat("]") {
                    true
                } else if cur.eat(")") {
                    false
                } else {
                    return Err(cur.err(ParseErrorKind::Expected("`]` or `)`".into())));
                };
                if !(0.0 <= lo && lo <= hi) {
                    return Err(ParseError { line: line_no, col: 1, kind: ParseErrorKind::BadInterval(lo, hi) });
                }
                ParameterDomain::Interval { lo, hi, lo_closed, hi_closed }
            } else if cur.eat(">") {
                let v = cur.number()?;
                if v != 0.0 {
                    return Err(cur.err(ParseErrorKind::Expected("`0` after `>`".into())));
                }
                ParameterDomain::PositiveUnbounded
            } else {
                return Err(cur.err(ParseErrorKind::Expected("`=`, `in`, or `> 0`".into())));
            };
            if !cur.at_end() {
                return Err(cur.err(ParseErrorKind::Trailing));
            }
            if domains.contains_key(&sym) {
                return Err(ParseError { line: line_no, col: 1, kind: ParseErrorKind::DuplicateDomain(sym) });
            }
            domain_lines.insert(sym.clone(), line_no);
            domains.insert(sym, dom);
        }
    }

    for (sym, line) in &rate_lines {
        if !domains.contains_key(sym) {
            return Err(ParseError { line: *line, col: 1, kind: ParseErrorKind::UndeclaredParameter(sym.clone()) });
        }
    }
    for (sym, line) in &domain_lines {
        if !rate_lines.contains_key(sym) {
            return Err(ParseError { line: *line, col: 1, kind: ParseErrorKind::UnusedParameter(sym.clone()) });
        }
    }

    Ok(ReactionNetwork { species, reactions, parameter_domains: domains })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_birth_death() {
        let net = parse_network("0 -> X1 @ kb\nX1 -> 0 @ kd\nkb = 2.0\nkd = 1.0").unwrap();
        assert_eq!(net.species, vec!["X1"]);
        assert_eq!(net.reactions.len(), 2);
        assert!(matches!(net.parameter_domains["kb"], ParameterDomain::Fixed(v) if v == 2.0));
        assert!(matches!(net.parameter_domains["kd"], ParameterDomain::Fixed(v) if v == 1.0));
    }

    #[test]
    fn trimolecular_rejected() {
        let err = parse_network("X1 + X2 + X3 -> 0 @ k\nk = 1.0").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Trimolecular(_)));
        assert_eq!(err.line, 1);
    }

    #[test]
    fn bimolecular_double_count_allowed() {
        let net = parse_network("2X1 -> 0 @ k\nk = 1.0").unwrap();
        assert_eq!(net.reactions[0].reactants, vec![(0, 2)]);
    }

    #[test]
    fn noop_rejected() {
        let err = parse_network("X1 -> X1 @ k\nk = 1.0").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::NoOpReaction));
    }

    #[test]
    fn duplicate_rate_symbol_rejected() {
        let err = parse_network("X1 -> 0 @ k\n0 -> X1 @ k\nk = 1.0").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::DuplicateRateSymbol(_)));
    }

    #[test]
    fn undeclared_parameter_rejected() {
        let err = parse_network("X1 -> 0 @ k").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::UndeclaredParameter(_)));
    }

    #[test]
    fn domains_parse() {
        let net = parse_network("X1 -> 0 @ a\nX1 -> X1 + X2 @ b\nX2 -> 0 @ c\na in [1, 2]\nb in (0, 1]\nc > 0").unwrap();
        assert_eq!(
            net.parameter_domains["a"],
            ParameterDomain::Interval { lo: 1.0, hi: 2.0, lo_closed: true, hi_closed: true }
        );
        assert_eq!(
            net.parameter_domains["b"],
            ParameterDomain::Interval { lo: 0.0, hi: 1.0, lo_closed: false, hi_closed: true }
        );
        assert_eq!(net.parameter_domains["c"], ParameterDomain::PositiveUnbounded);
    }

    #[test]
    fn syntax_error_carries_position() {
        let err = parse_network("X1 -> @ k\nk = 1.0").unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.col > 1);
    }

    #[test]
    fn comments_and_blanks_ignored() {
        let net = parse_network("# a comment\n\n0 -> X1 @ kb # trailing\nX1 -> 0 @ kd\nkb = 1.0\nkd = 1.0").unwrap();
        assert_eq!(net.reactions.len(), 2);
    }
}
