//! Ground reaction: rules, matching, and bounded trace exploration.
//!
//! A reaction rule rewrites an occurrence of its redex inside a ground agent
//! to its reactum, carrying the parameters swallowed by the redex holes
//! across via an instantiation map. A step `a → a'` exists when the agent
//! decomposes as `context ∘ (redex ⊗ id_Z) ∘ params` with an active context;
//! the engine finds all such decompositions, applies rules, and explores the
//! reachable states to a bounded depth.

mod explore;
mod matching;

pub use explore::{ExploreError, StateSpace, Trace};
pub use matching::{contains, Match};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{Bigraph, Violation};
use crate::ops::OpError;
use crate::signature::Signature;
use crate::term::{elaborate, ElabError, RuleSource};

#[derive(Debug, Error)]
pub enum RuleError {
    #[error("redex region {0} is idle (contains no node)")]
    IdleRedexRegion(usize),
    #[error("redex outer name `{0}` is idle")]
    IdleRedexName(String),
    #[error("redex has closed edges, which matching does not support")]
    RedexEdges,
    #[error("redex and reactum have different widths ({redex} vs {reactum})")]
    WidthMismatch { redex: usize, reactum: usize },
    #[error("reactum outer name `{0}` does not occur in the redex")]
    ReactumNameNotInRedex(String),
    #[error("redex and reactum must not have inner names")]
    InnerNames,
    #[error("instantiation misses reactum hole {0}")]
    EtaIncomplete(usize),
    #[error("instantiation sends reactum hole {from} to {to}, outside the redex width {width}")]
    EtaOutOfRange { from: usize, to: usize, width: usize },
}

/// A reaction rule `redex → reactum` with equal outer faces. `eta[j]` names
/// the redex hole whose parameter fills reactum hole `j`.
#[derive(Debug, Clone)]
pub struct ReactionRule {
    name: String,
    redex: Bigraph,
    reactum: Bigraph,
    eta: Vec<usize>,
}

impl ReactionRule {
    /// Builds a rule, padding the reactum's outer face with idle names so the
    /// two faces agree (a reactum may use fewer names than its redex).
    pub fn new(
        name: impl Into<String>,
        redex: Bigraph,
        reactum: Bigraph,
        eta: &BTreeMap<usize, usize>,
    ) -> Result<Self, RuleError> {
        if !redex.inner().names.is_empty() || !reactum.inner().names.is_empty() {
            return Err(RuleError::InnerNames);
        }
        if redex.edge_count() > 0 {
            return Err(RuleError::RedexEdges);
        }
        if redex.outer().width != reactum.outer().width {
            return Err(RuleError::WidthMismatch {
                redex: redex.outer().width,
                reactum: reactum.outer().width,
            });
        }
        for r in 0..redex.outer().width {
            let has_node = redex
                .nodes()
                .any(|v| matches!(redex.parent(v), crate::graph::Parent::Region(s) if s == r));
            if !has_node {
                return Err(RuleError::IdleRedexRegion(r));
            }
        }
        for name in &redex.outer().names {
            let linked = redex
                .nodes()
                .any(|v| redex.ports(v).iter().any(|l| *l == crate::graph::Link::Outer(name.clone())));
            if !linked {
                return Err(RuleError::IdleRedexName(name.clone()));
            }
        }
        if let Some(n) = reactum.outer().names.difference(&redex.outer().names).next() {
            return Err(RuleError::ReactumNameNotInRedex(n.clone()));
        }
        let pad: Vec<String> =
            redex.outer().names.difference(&reactum.outer().names).cloned().collect();
        let reactum = reactum.widen_outer(pad);

        let mut eta_vec = Vec::with_capacity(reactum.inner().width);
        for j in 0..reactum.inner().width {
            let &to = eta.get(&j).ok_or(RuleError::EtaIncomplete(j))?;
            if to >= redex.inner().width {
                return Err(RuleError::EtaOutOfRange { from: j, to, width: redex.inner().width });
            }
            eta_vec.push(to);
        }

        Ok(ReactionRule { name: name.into(), redex, reactum, eta: eta_vec })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn redex(&self) -> &Bigraph {
        &self.redex
    }

    pub fn reactum(&self) -> &Bigraph {
        &self.reactum
    }

    pub fn eta(&self) -> &[usize] {
        &self.eta
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("stale match: the decomposition no longer recomposes to the agent")]
    StaleMatch,
    #[error("instantiation copies or discards parameter {hole}, which links names {names:?}")]
    NamedParamNotPreserved { hole: usize, names: Vec<String> },
    #[error(transparent)]
    Op(#[from] OpError),
}

#[derive(Debug, Error)]
pub enum BrsError {
    #[error("rule `{name}`: {source}")]
    Rule {
        name: String,
        #[source]
        source: RuleError,
    },
    #[error("rule `{name}`: {source}")]
    RuleTerm {
        name: String,
        #[source]
        source: ElabError,
    },
    #[error("agent `{name}`: {source}")]
    AgentTerm {
        name: String,
        #[source]
        source: ElabError,
    },
    #[error("agent `{name}` is not ground (it has holes or inner names)")]
    AgentNotGround { name: String },
    #[error("{what} is not well-formed over the signature: {first}")]
    Invalid { what: String, first: Violation },
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
}

/// A bigraphical reactive system: a signature, reaction rules, and named
/// ground seed agents.
#[derive(Debug, Clone, Default)]
pub struct Brs {
    signature: Signature,
    rules: Vec<ReactionRule>,
    seeds: Vec<(String, Bigraph)>,
}

impl Brs {
    pub fn new(signature: Signature) -> Self {
        Brs { signature, rules: Vec::new(), seeds: Vec::new() }
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn rules(&self) -> &[ReactionRule] {
        &self.rules
    }

    pub fn rule(&self, name: &str) -> Option<&ReactionRule> {
        self.rules.iter().find(|r| r.name == name)
    }

    pub fn seeds(&self) -> &[(String, Bigraph)] {
        &self.seeds
    }

    pub fn seed(&self, name: &str) -> Option<&Bigraph> {
        self.seeds.iter().find(|(n, _)| n == name).map(|(_, b)| b)
    }

    pub fn add_rule(&mut self, rule: ReactionRule) -> Result<(), BrsError> {
        if self.rules.iter().any(|r| r.name == rule.name) {
            return Err(BrsError::DuplicateName(rule.name));
        }
        for (what, b) in [("redex", &rule.redex), ("reactum", &rule.reactum)] {
            if let Some(first) = b.validate(&self.signature).into_iter().next() {
                return Err(BrsError::Invalid {
                    what: format!("{what} of rule `{}`", rule.name),
                    first,
                });
            }
        }
        self.rules.push(rule);
        Ok(())
    }

    /// Elaborates and installs a parsed rule.
    pub fn add_rule_source(&mut self, src: &RuleSource) -> Result<(), BrsError> {
        let redex = elaborate(&src.redex, &self.signature)
            .map_err(|e| BrsError::RuleTerm { name: src.name.clone(), source: e })?;
        let reactum = elaborate(&src.reactum, &self.signature)
            .map_err(|e| BrsError::RuleTerm { name: src.name.clone(), source: e })?;
        let rule = ReactionRule::new(src.name.clone(), redex, reactum, &src.eta)
            .map_err(|e| BrsError::Rule { name: src.name.clone(), source: e })?;
        self.add_rule(rule)
    }

    pub fn add_seed(&mut self, name: impl Into<String>, agent: Bigraph) -> Result<(), BrsError> {
        let name = name.into();
        if self.seeds.iter().any(|(n, _)| *n == name) {
            return Err(BrsError::DuplicateName(name));
        }
        if !agent.is_ground() {
            return Err(BrsError::AgentNotGround { name });
        }
        if let Some(first) = agent.validate(&self.signature).into_iter().next() {
            return Err(BrsError::Invalid { what: format!("agent `{name}`"), first });
        }
        self.seeds.push((name, agent));
        Ok(())
    }

    /// Elaborates and installs a named ground agent.
    pub fn add_seed_source(
        &mut self,
        name: impl Into<String>,
        term: &crate::term::Term,
    ) -> Result<(), BrsError> {
        let name = name.into();
        let agent = elaborate(term, &self.signature)
            .map_err(|e| BrsError::AgentTerm { name: name.clone(), source: e })?;
        self.add_seed(name, agent)
    }
}
