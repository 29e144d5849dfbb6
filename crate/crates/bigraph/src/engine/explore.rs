//! Successor computation and bounded state-space exploration.
//!
//! Exploration is breadth-first from a seed agent, merging states that are
//! iso to one already seen. Term-expressible states are keyed by their
//! canonical printed form so the common case is a map lookup; states with
//! closed edges fall back to pairwise iso checks. Growth beyond the caller's
//! state cap is a hard error, never silent truncation.

use std::collections::BTreeMap;

use crate::graph::Bigraph;
use crate::term::{canonical_key, render};

use super::{Brs, EngineError};

#[derive(Debug, thiserror::Error)]
pub enum ExploreError {
    /// More distinct states were reachable than the configured cap.
    #[error("state cap of {max_states} exceeded during exploration")]
    StateCapExceeded { max_states: usize },
    /// A claimed trace has an adjacent pair no rule accounts for.
    #[error("no reaction rewrites agent {position} into agent {}", position + 1)]
    BrokenStep { position: usize },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

impl Brs {
    /// One-step results of `agent` under every rule, deduplicated up to iso
    /// and canonically ordered.
    pub fn successors(&self, agent: &Bigraph) -> Result<Vec<Bigraph>, EngineError> {
        let mut out: Vec<Bigraph> = Vec::new();
        for (_, b) in self.successor_steps(agent)? {
            if !out.iter().any(|seen| seen.iso(&b)) {
                out.push(b);
            }
        }
        out.sort_by_key(render);
        Ok(out)
    }

    /// Labelled one-step results, deduplicated up to iso per rule.
    pub(crate) fn successor_steps(
        &self,
        agent: &Bigraph,
    ) -> Result<Vec<(String, Bigraph)>, EngineError> {
        let mut out: Vec<(String, Bigraph)> = Vec::new();
        for rule in self.rules() {
            let mut per_rule: Vec<Bigraph> = Vec::new();
            for m in rule.matches(agent) {
                let b = rule.apply(agent, &m)?;
                if !per_rule.iter().any(|seen| seen.iso(&b)) {
                    per_rule.push(b);
                }
            }
            out.extend(per_rule.into_iter().map(|b| (rule.name().to_string(), b)));
        }
        Ok(out)
    }
}

/// A finite run of the system: agents where each adjacent pair is related by
/// one reaction.
#[derive(Debug, Clone)]
pub struct Trace {
    agents: Vec<Bigraph>,
}

impl Trace {
    /// Builds a trace after re-verifying every step against the rules of
    /// `brs`. The empty sequence is a valid trace.
    pub fn new(brs: &Brs, agents: Vec<Bigraph>) -> Result<Trace, ExploreError> {
        for (i, pair) in agents.windows(2).enumerate() {
            let mut witnessed = false;
            for rule in brs.rules() {
                for m in rule.matches(&pair[0]) {
                    // A match that cannot be applied (eta duplicates a named
                    // parameter) witnesses nothing; keep looking.
                    if let Ok(b) = rule.apply(&pair[0], &m) {
                        if b.iso(&pair[1]) {
                            witnessed = true;
                            break;
                        }
                    }
                }
                if witnessed {
                    break;
                }
            }
            if !witnessed {
                return Err(ExploreError::BrokenStep { position: i });
            }
        }
        Ok(Trace { agents })
    }

    /// Steps come straight out of an explored state space, already verified.
    pub(crate) fn from_walk(agents: Vec<Bigraph>) -> Trace {
        Trace { agents }
    }

    pub fn agents(&self) -> &[Bigraph] {
        &self.agents
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn last(&self) -> Option<&Bigraph> {
        self.agents.last()
    }
}

/// States reachable from a seed within a step bound, quotiented by iso.
/// State 0 is the seed; edges carry the rule that witnessed them.
#[derive(Debug, Clone)]
pub struct StateSpace {
    states: Vec<Bigraph>,
    dist: Vec<usize>,
    edges: Vec<(usize, String, usize)>,
    depth: usize,
}

impl StateSpace {
    pub fn explore(
        brs: &Brs,
        seed: &Bigraph,
        depth: usize,
        max_states: usize,
    ) -> Result<StateSpace, ExploreError> {
        let mut space = StateSpace {
            states: Vec::new(),
            dist: Vec::new(),
            edges: Vec::new(),
            depth,
        };
        let mut keyed: BTreeMap<String, usize> = BTreeMap::new();
        let mut keyless: Vec<usize> = Vec::new();

        let intern = |space: &mut StateSpace,
                          keyed: &mut BTreeMap<String, usize>,
                          keyless: &mut Vec<usize>,
                          b: Bigraph,
                          d: usize|
         -> Result<usize, ExploreError> {
            let key = canonical_key(&b);
            if let Some(k) = &key {
                if let Some(&i) = keyed.get(k) {
                    return Ok(i);
                }
            } else if let Some(&i) = keyless.iter().find(|&&i| space.states[i].iso(&b)) {
                return Ok(i);
            }
            if space.states.len() >= max_states {
                return Err(ExploreError::StateCapExceeded { max_states });
            }
            let i = space.states.len();
            space.states.push(b);
            space.dist.push(d);
            match key {
                Some(k) => {
                    keyed.insert(k, i);
                }
                None => keyless.push(i),
            }
            Ok(i)
        };

        intern(&mut space, &mut keyed, &mut keyless, seed.clone(), 0)?;
        let mut cursor = 0;
        while cursor < space.states.len() {
            let d = space.dist[cursor];
            if d < depth {
                let agent = space.states[cursor].clone();
                for (rule, b) in brs.successor_steps(&agent)? {
                    let j = intern(&mut space, &mut keyed, &mut keyless, b, d + 1)?;
                    space.edges.push((cursor, rule, j));
                }
            }
            cursor += 1;
        }
        space.edges.sort();
        space.edges.dedup();
        Ok(space)
    }

    pub fn states(&self) -> &[Bigraph] {
        &self.states
    }

    pub fn seed(&self) -> &Bigraph {
        &self.states[0]
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Fewest reaction steps from the seed to state `i`.
    pub fn distance(&self, i: usize) -> usize {
        self.dist[i]
    }

    /// Edges as (source, rule name, target) over state indices.
    pub fn edges(&self) -> &[(usize, String, usize)] {
        &self.edges
    }

    /// Every walk from the seed of at most `depth` edges, as a trace. The
    /// result is prefix closed and contains the singleton seed trace.
    pub fn traces(&self) -> Vec<Trace> {
        let mut next: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (s, _, t) in &self.edges {
            let outs = next.entry(*s).or_default();
            if !outs.contains(t) {
                outs.push(*t);
            }
        }
        let mut out = Vec::new();
        let mut walk = vec![0usize];
        self.grow(&next, &mut walk, &mut out);
        out
    }

    fn grow(&self, next: &BTreeMap<usize, Vec<usize>>, walk: &mut Vec<usize>, out: &mut Vec<Trace>) {
        out.push(Trace::from_walk(
            walk.iter().map(|&i| self.states[i].clone()).collect(),
        ));
        if walk.len() > self.depth {
            return;
        }
        if let Some(outs) = next.get(walk.last().unwrap()) {
            for &t in outs {
                walk.push(t);
                self.grow(next, walk, out);
                walk.pop();
            }
        }
    }
}
