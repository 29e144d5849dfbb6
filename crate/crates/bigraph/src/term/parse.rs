//! Recursive-descent parser for terms and rules.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::{RuleSource, Term};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RuleParseError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error("reactum hole ${hole} has no eta entry")]
    UnmappedReactumHole { hole: usize },
    #[error("eta sends ${from} to ${to}, which is not a redex hole")]
    EtaTargetNotRedexHole { from: usize, to: usize },
    #[error("eta entry for ${hole}, which is not a reactum hole")]
    EtaSourceNotReactumHole { hole: usize },
    #[error("duplicate eta entry for ${hole}")]
    DuplicateEtaEntry { hole: usize },
    #[error("omitted eta requires equal hole sets, but ${hole} occurs on only one side")]
    ImplicitEtaMismatch { hole: usize },
}

/// Parses a single term.
pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(src);
    let t = p.par()?;
    p.skip_ws();
    p.expect_eof()?;
    Ok(t)
}

/// Parses `name: TERM -> TERM` with an optional `[eta i->j, ...]` clause.
/// An omitted clause means the identity instantiation, which is only
/// meaningful when both sides use the same holes.
pub fn parse_rule(src: &str) -> Result<RuleSource, RuleParseError> {
    let mut p = Parser::new(src);
    p.skip_ws();
    let name = p.ident()?;
    p.skip_ws();
    p.expect(':')?;
    let redex = p.par()?;
    p.skip_ws();
    p.expect_str("->")?;
    p.seen_holes.clear();
    let reactum = p.par()?;
    p.skip_ws();
    let explicit = if p.eat('[') {
        p.skip_ws();
        let kw = p.ident()?;
        if kw != "eta" {
            return Err(p.error(format!("expected `eta`, found `{kw}`")).into());
        }
        let mut map = BTreeMap::new();
        p.skip_ws();
        if !p.eat(']') {
            loop {
                p.skip_ws();
                p.eat('$');
                let from = p.number()?;
                p.skip_ws();
                p.expect_str("->")?;
                p.skip_ws();
                p.eat('$');
                let to = p.number()?;
                if map.insert(from, to).is_some() {
                    return Err(RuleParseError::DuplicateEtaEntry { hole: from });
                }
                p.skip_ws();
                if p.eat(']') {
                    break;
                }
                p.expect(',')?;
            }
        }
        p.skip_ws();
        Some(map)
    } else {
        None
    };
    p.expect_eof()?;

    let redex_holes: BTreeSet<usize> = redex.holes().into_iter().collect();
    let reactum_holes: BTreeSet<usize> = reactum.holes().into_iter().collect();
    let eta = match explicit {
        Some(map) => {
            for (from, to) in &map {
                if !reactum_holes.contains(from) {
                    return Err(RuleParseError::EtaSourceNotReactumHole { hole: *from });
                }
                if !redex_holes.contains(to) {
                    return Err(RuleParseError::EtaTargetNotRedexHole { from: *from, to: *to });
                }
            }
            if let Some(h) = reactum_holes.iter().find(|h| !map.contains_key(h)) {
                return Err(RuleParseError::UnmappedReactumHole { hole: *h });
            }
            map
        }
        None => {
            if let Some(h) = redex_holes.symmetric_difference(&reactum_holes).next() {
                return Err(RuleParseError::ImplicitEtaMismatch { hole: *h });
            }
            reactum_holes.iter().map(|h| (*h, *h)).collect()
        }
    };

    Ok(RuleSource { name, redex, reactum, eta })
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
    seen_holes: BTreeSet<usize>,
}

impl Parser {
    fn new(src: &str) -> Self {
        Parser { chars: src.chars().collect(), pos: 0, line: 1, col: 1, seen_holes: BTreeSet::new() }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`{}", self.found())))
        }
    }

    fn expect_str(&mut self, s: &str) -> Result<(), ParseError> {
        for c in s.chars() {
            if !self.eat(c) {
                return Err(self.error(format!("expected `{s}`{}", self.found())));
            }
        }
        Ok(())
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        self.skip_ws();
        if self.peek().is_some() {
            Err(self.error(format!("unexpected trailing input{}", self.found())))
        } else {
            Ok(())
        }
    }

    fn found(&self) -> String {
        match self.peek() {
            Some(c) => format!(", found `{c}`"),
            None => ", found end of input".into(),
        }
    }

    fn error(&self, message: String) -> ParseError {
        ParseError { line: self.line, col: self.col, message }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(c) if c.is_alphabetic() || c == '_' => {}
            _ => return Err(self.error(format!("expected identifier{}", self.found()))),
        }
        let mut s = String::new();
        while matches!(self.peek(), Some(c) if c.is_alphanumeric() || c == '_') {
            s.push(self.bump().unwrap());
        }
        Ok(s)
    }

    fn number(&mut self) -> Result<usize, ParseError> {
        if !matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            return Err(self.error(format!("expected hole index{}", self.found())));
        }
        let mut n = 0usize;
        while let Some(c) = self.peek() {
            match c.to_digit(10) {
                Some(d) => {
                    n = n * 10 + d as usize;
                    self.bump();
                }
                None => break,
            }
        }
        Ok(n)
    }

    fn par(&mut self) -> Result<Term, ParseError> {
        let mut t = self.seq()?;
        loop {
            self.skip_ws();
            if self.eat('|') {
                let rhs = self.seq()?;
                t = Term::Par(Box::new(t), Box::new(rhs));
            } else {
                return Ok(t);
            }
        }
    }

    fn seq(&mut self) -> Result<Term, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.bump();
                let t = self.par()?;
                self.skip_ws();
                self.expect(')')?;
                Ok(t)
            }
            Some('$') => {
                self.bump();
                let i = self.number()?;
                if !self.seen_holes.insert(i) {
                    return Err(self.error(format!("duplicate hole ${i}")));
                }
                Ok(Term::Hole(i))
            }
            _ => {
                let name = self.ident()?;
                if name == "nil" {
                    return Ok(Term::Nil);
                }
                let mut ports = Vec::new();
                if self.eat('(') {
                    self.skip_ws();
                    if !self.eat(')') {
                        loop {
                            self.skip_ws();
                            ports.push(self.ident()?);
                            self.skip_ws();
                            if self.eat(')') {
                                break;
                            }
                            self.expect(',')?;
                        }
                    }
                }
                let body = if self.eat('.') { self.seq()? } else { Term::Nil };
                Ok(Term::Prefix { control: name, ports, body: Box::new(body) })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prefix(control: &str, ports: &[&str], body: Term) -> Term {
        Term::Prefix {
            control: control.into(),
            ports: ports.iter().map(|s| s.to_string()).collect(),
            body: Box::new(body),
        }
    }

    #[test]
    fn prefix_binds_tighter_than_par() {
        let t = parse_term("Z.U | F").unwrap();
        assert_eq!(
            t,
            Term::Par(
                Box::new(prefix("Z", &[], prefix("U", &[], Term::Nil))),
                Box::new(prefix("F", &[], Term::Nil)),
            )
        );
    }

    #[test]
    fn parenthesised_body_and_holes() {
        let t = parse_term("Z.(U | $0)").unwrap();
        assert_eq!(
            t,
            prefix("Z", &[], Term::Par(Box::new(prefix("U", &[], Term::Nil)), Box::new(Term::Hole(0))))
        );
    }

    #[test]
    fn ports_parse_in_order() {
        let t = parse_term("send(a).recv(b)").unwrap();
        assert_eq!(t, prefix("send", &["a"], prefix("recv", &["b"], Term::Nil)));
    }

    #[test]
    fn duplicate_hole_is_rejected_with_position() {
        let err = parse_term("Z.($0 | $0)").unwrap_err();
        assert_eq!((err.line, err.col), (1, 11));
        assert!(err.message.contains("duplicate hole"));
    }

    #[test]
    fn error_carries_line_and_column() {
        let err = parse_term("Z.(U |\n  | F)").unwrap_err();
        assert_eq!(err.line, 2);
    }

    #[test]
    fn rule_with_implicit_eta() {
        let r = parse_rule("M1: Z.(F | $0) | Z.$1 -> Z.$0 | Z.(F | $1)").unwrap();
        assert_eq!(r.name, "M1");
        assert_eq!(r.eta, BTreeMap::from([(0, 0), (1, 1)]));
    }

    #[test]
    fn rule_with_explicit_eta_and_discard() {
        let r = parse_rule("drop: Z.($0 | $1) -> Z.$0 [eta $0 -> $1]").unwrap();
        assert_eq!(r.eta, BTreeMap::from([(0, 1)]));
    }

    #[test]
    fn implicit_eta_requires_equal_hole_sets() {
        let err = parse_rule("bad: Z.($0 | $1) -> Z.$0").unwrap_err();
        assert_eq!(err, RuleParseError::ImplicitEtaMismatch { hole: 1 });
    }

    #[test]
    fn eta_target_must_be_a_redex_hole() {
        let err = parse_rule("bad: Z.$0 -> Z.$0 [eta $0 -> $3]").unwrap_err();
        assert_eq!(err, RuleParseError::EtaTargetNotRedexHole { from: 0, to: 3 });
    }

    #[test]
    fn unmapped_reactum_hole_is_rejected() {
        let err = parse_rule("bad: Z.($0 | $1) -> Z.($0 | $1) [eta $0 -> $0]").unwrap_err();
        assert_eq!(err, RuleParseError::UnmappedReactumHole { hole: 1 });
    }
}
