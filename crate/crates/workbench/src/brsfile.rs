//! Loader for BRS definition files.
//!
//! A definition file is a sequence of named blocks:
//!
//! ```text
//! signature  { control Z arity 0 active; control S arity 0 active; }
//! rules      { M1: Z.(F | $0) | Z.$1 -> Z.$0 | Z.(F | $1); }
//! agents     { uf: Z.(U | F); }
//! admissible { notified: U | F | N; }
//! functor    { hide S; }
//! ```
//!
//! Blocks may appear in any order, each at most once. `#` starts a comment
//! running to end of line. All terms elaborate against the declared
//! signature; errors carry file, line, and column.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use bigraph::engine::Brs;
use bigraph::refine::AdmissibilityPattern;
use bigraph::term::{elaborate, parse_rule, parse_term, ParseError, RuleParseError};
use bigraph::{Activity, Control, Signature};
use thiserror::Error;

/// A fully elaborated definition file.
#[derive(Debug)]
pub struct BrsFile {
    pub brs: Brs,
    /// Hide list from the functor block; empty when the block is absent.
    pub hidden: BTreeSet<String>,
    /// Named admissibility patterns in declaration order.
    pub admissible: Vec<(String, AdmissibilityPattern)>,
}

impl BrsFile {
    pub fn admissible_pattern(&self, name: &str) -> Option<&AdmissibilityPattern> {
        self.admissible.iter().find(|(n, _)| n == name).map(|(_, p)| p)
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}:{col}: {message}")]
    Syntax {
        path: PathBuf,
        line: usize,
        col: usize,
        message: String,
    },
    /// Well-formed text that elaborates to nothing, such as a rule with an
    /// unbalanced instantiation map or a term over an undeclared control.
    #[error("{path}:{line}:{col}: {message}")]
    Invalid {
        path: PathBuf,
        line: usize,
        col: usize,
        message: String,
    },
}

pub fn load(path: &Path) -> Result<BrsFile, LoadError> {
    let text = fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_file(path, &text)
}

pub fn parse_file(path: &Path, text: &str) -> Result<BrsFile, LoadError> {
    Parser::new(path, text).file()
}

/// A raw statement body remembered for a second elaboration pass, anchored
/// at its source position so sub-parser errors can be remapped.
struct Snippet {
    line: usize,
    col: usize,
    text: String,
}

struct Parser<'p> {
    path: &'p Path,
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
}

impl<'p> Parser<'p> {
    fn new(path: &'p Path, text: &str) -> Self {
        // Blanking comments keeps every surviving character at its original
        // line and column, so snippet positions stay exact.
        let mut chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            if chars[i] == '#' {
                while i < chars.len() && chars[i] != '\n' {
                    chars[i] = ' ';
                    i += 1;
                }
            } else {
                i += 1;
            }
        }
        Parser {
            path,
            chars,
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn file(mut self) -> Result<BrsFile, LoadError> {
        let mut controls: Vec<(Control, usize, usize)> = Vec::new();
        let mut rules: Vec<Snippet> = Vec::new();
        let mut agents: Vec<(String, Snippet)> = Vec::new();
        let mut admissible: Vec<(String, Snippet)> = Vec::new();
        let mut hidden: Vec<(String, usize, usize)> = Vec::new();
        let mut seen: BTreeSet<String> = BTreeSet::new();

        loop {
            self.skip_ws();
            if self.at_eof() {
                break;
            }
            let (bline, bcol) = (self.line, self.col);
            let block = self.ident("block name")?;
            if !seen.insert(block.clone()) {
                return Err(self.err_at(bline, bcol, format!("duplicate `{block}` block")));
            }
            self.expect('{')?;
            match block.as_str() {
                "signature" => self.signature_block(&mut controls)?,
                "rules" => self.snippet_block(&mut rules)?,
                "agents" => self.named_block(&mut agents)?,
                "admissible" => self.named_block(&mut admissible)?,
                "functor" => self.functor_block(&mut hidden)?,
                _ => {
                    return Err(self.err_at(
                        bline,
                        bcol,
                        format!(
                            "unknown block `{block}` (expected signature, rules, agents, \
                             admissible, or functor)"
                        ),
                    ));
                }
            }
            self.expect('}')?;
        }

        self.build(controls, rules, agents, admissible, hidden)
    }

    fn build(
        &self,
        controls: Vec<(Control, usize, usize)>,
        rules: Vec<Snippet>,
        agents: Vec<(String, Snippet)>,
        admissible: Vec<(String, Snippet)>,
        hidden: Vec<(String, usize, usize)>,
    ) -> Result<BrsFile, LoadError> {
        let mut by_name: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
        for (c, line, col) in &controls {
            if by_name.insert(&c.name, (*line, *col)).is_some() {
                return Err(self.err_at(*line, *col, format!("duplicate control `{}`", c.name)));
            }
        }
        let sig = Signature::new(controls.iter().map(|(c, _, _)| c.clone()))
            .expect("duplicates were just rejected");

        let mut hide_set = BTreeSet::new();
        for (name, line, col) in hidden {
            let Some(c) = sig.get(&name) else {
                return Err(self.err_at(
                    line,
                    col,
                    format!("hidden control `{name}` is not in the signature"),
                ));
            };
            if c.arity != 0 {
                return Err(self.err_at(
                    line,
                    col,
                    format!("hidden control `{name}` has arity {}, want 0", c.arity),
                ));
            }
            if !hide_set.insert(name.clone()) {
                return Err(self.err_at(line, col, format!("duplicate hide of `{name}`")));
            }
        }

        let mut brs = Brs::new(sig);
        for snip in &rules {
            let rs = parse_rule(&snip.text).map_err(|e| self.rule_err(snip, e))?;
            brs.add_rule_source(&rs)
                .map_err(|e| self.err_at(snip.line, snip.col, e.to_string()))?;
        }
        for (name, snip) in &agents {
            let t = parse_term(&snip.text).map_err(|e| self.term_err(snip, e))?;
            brs.add_seed_source(name, &t)
                .map_err(|e| self.err_at(snip.line, snip.col, e.to_string()))?;
        }

        let mut patterns = Vec::new();
        for (name, snip) in &admissible {
            if patterns.iter().any(|(n, _)| n == name) {
                return Err(self.err_at(
                    snip.line,
                    snip.col,
                    format!("duplicate admissible pattern `{name}`"),
                ));
            }
            let t = parse_term(&snip.text).map_err(|e| self.term_err(snip, e))?;
            let b = elaborate(&t, brs.signature()).map_err(|e| {
                self.err_at(snip.line, snip.col, format!("pattern `{name}`: {e}"))
            })?;
            let p = AdmissibilityPattern::new(b, brs.signature()).map_err(|e| {
                self.err_at(snip.line, snip.col, format!("pattern `{name}`: {e}"))
            })?;
            patterns.push((name.clone(), p));
        }

        Ok(BrsFile {
            brs,
            hidden: hide_set,
            admissible: patterns,
        })
    }

    fn signature_block(
        &mut self,
        out: &mut Vec<(Control, usize, usize)>,
    ) -> Result<(), LoadError> {
        loop {
            self.skip_ws();
            if self.peek() == Some('}') || self.at_eof() {
                return Ok(());
            }
            let (line, col) = (self.line, self.col);
            let kw = self.ident("`control`")?;
            if kw != "control" {
                return Err(self.err_at(line, col, format!("expected `control`, found `{kw}`")));
            }
            let name = self.ident("control name")?;
            let kw = self.ident("`arity`")?;
            if kw != "arity" {
                return Err(self.syntax(format!("expected `arity`, found `{kw}`")));
            }
            let arity = self.number()?;
            let act = self.ident("`active` or `passive`")?;
            let activity = match act.as_str() {
                "active" => Activity::Active,
                "passive" => Activity::Passive,
                other => {
                    return Err(
                        self.syntax(format!("expected `active` or `passive`, found `{other}`"))
                    )
                }
            };
            self.expect(';')?;
            out.push((Control::new(name, arity, activity), line, col));
        }
    }

    /// Statements of the form `TEXT ;` captured verbatim.
    fn snippet_block(&mut self, out: &mut Vec<Snippet>) -> Result<(), LoadError> {
        loop {
            self.skip_ws();
            if self.peek() == Some('}') || self.at_eof() {
                return Ok(());
            }
            out.push(self.snippet()?);
        }
    }

    /// Statements of the form `name : TEXT ;`.
    fn named_block(&mut self, out: &mut Vec<(String, Snippet)>) -> Result<(), LoadError> {
        loop {
            self.skip_ws();
            if self.peek() == Some('}') || self.at_eof() {
                return Ok(());
            }
            let name = self.ident("name")?;
            self.expect(':')?;
            self.skip_ws();
            out.push((name, self.snippet()?));
        }
    }

    fn functor_block(&mut self, out: &mut Vec<(String, usize, usize)>) -> Result<(), LoadError> {
        loop {
            self.skip_ws();
            if self.peek() == Some('}') || self.at_eof() {
                return Ok(());
            }
            let (line, col) = (self.line, self.col);
            let kw = self.ident("`hide`")?;
            if kw != "hide" {
                return Err(self.err_at(line, col, format!("expected `hide`, found `{kw}`")));
            }
            let (nline, ncol) = {
                self.skip_ws();
                (self.line, self.col)
            };
            let name = self.ident("control name")?;
            self.expect(';')?;
            out.push((name, nline, ncol));
        }
    }

    /// Raw text up to the next `;`, which is consumed.
    fn snippet(&mut self) -> Result<Snippet, LoadError> {
        self.skip_ws();
        let (line, col) = (self.line, self.col);
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c == ';' {
                let text: String = self.chars[start..self.pos].iter().collect();
                self.bump();
                return Ok(Snippet { line, col, text });
            }
            if c == '}' {
                break;
            }
            self.bump();
        }
        Err(self.err_at(line, col, "statement is missing its `;`".to_string()))
    }

    fn term_err(&self, snip: &Snippet, e: ParseError) -> LoadError {
        let (line, col) = remap(snip, e.line, e.col);
        LoadError::Syntax {
            path: self.path.to_path_buf(),
            line,
            col,
            message: e.message,
        }
    }

    fn rule_err(&self, snip: &Snippet, e: RuleParseError) -> LoadError {
        match e {
            RuleParseError::Syntax(e) => self.term_err(snip, e),
            other => self.err_at(snip.line, snip.col, other.to_string()),
        }
    }

    fn err_at(&self, line: usize, col: usize, message: String) -> LoadError {
        LoadError::Invalid {
            path: self.path.to_path_buf(),
            line,
            col,
            message,
        }
    }

    fn syntax(&self, message: String) -> LoadError {
        LoadError::Syntax {
            path: self.path.to_path_buf(),
            line: self.line,
            col: self.col,
            message,
        }
    }

    fn at_eof(&self) -> bool {
        self.pos >= self.chars.len()
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
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn expect(&mut self, want: char) -> Result<(), LoadError> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c == want => {
                self.bump();
                Ok(())
            }
            Some(c) => Err(self.syntax(format!("expected `{want}`, found `{c}`"))),
            None => Err(self.syntax(format!("expected `{want}`, found end of file"))),
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, LoadError> {
        self.skip_ws();
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || c == '_' {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        if s.is_empty() || s.starts_with(|c: char| c.is_ascii_digit()) {
            let found = match self.peek() {
                Some(c) => format!("`{c}`"),
                None => "end of file".to_string(),
            };
            return Err(self.syntax(format!("expected {what}, found {found}")));
        }
        Ok(s)
    }

    fn number(&mut self) -> Result<usize, LoadError> {
        self.skip_ws();
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s.parse()
            .map_err(|_| self.syntax("expected a number".to_string()))
    }
}

/// Positions from a sub-parser are relative to its snippet; line 1 of the
/// snippet sits mid-line in the file.
fn remap(snip: &Snippet, line: usize, col: usize) -> (usize, usize) {
    if line == 1 {
        (snip.line, snip.col + col - 1)
    } else {
        (snip.line + line - 1, col)
    }
}
