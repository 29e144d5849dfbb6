//! A term language for one-region bigraphs.
//!
//! ```text
//! p ::= K(x1,...,xn).p  |  p | p  |  $i  |  nil
//! ```
//!
//! Prefixing binds tighter than parallel composition, arity-0 controls omit
//! the parentheses, and a trailing `.nil` may be dropped. Terms denote
//! bigraphs with a single region, no inner names, and no closed edges; ports
//! written with the same name share one outer name. Reaction rules pair a
//! redex and reactum term with an instantiation map from reactum holes back
//! to redex holes.

mod elaborate;
mod parse;
mod print;

pub use elaborate::{elaborate, ElabError};
pub use parse::{parse_rule, parse_term, ParseError, RuleParseError};
pub use print::{canonical_key, print_term, render, PrintError};

use std::collections::BTreeMap;

/// Abstract syntax of the term language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Nil,
    Hole(usize),
    Prefix { control: String, ports: Vec<String>, body: Box<Term> },
    Par(Box<Term>, Box<Term>),
}

impl Term {
    /// Hole indices occurring in the term, in order of first occurrence.
    pub fn holes(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_holes(&mut out);
        out
    }

    fn collect_holes(&self, out: &mut Vec<usize>) {
        match self {
            Term::Nil => {}
            Term::Hole(i) => out.push(*i),
            Term::Prefix { body, .. } => body.collect_holes(out),
            Term::Par(l, r) => {
                l.collect_holes(out);
                r.collect_holes(out);
            }
        }
    }
}

/// A parsed reaction rule, prior to elaboration against a signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSource {
    pub name: String,
    pub redex: Term,
    pub reactum: Term,
    /// Maps each reactum hole to the redex hole whose parameter it receives.
    pub eta: BTreeMap<usize, usize>,
}
