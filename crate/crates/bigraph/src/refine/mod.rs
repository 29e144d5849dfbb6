//! Vertical refinement between reactive systems via abstraction.
//!
//! A hiding functor erases the nodes of chosen port-free controls, adopting
//! their children upward; everything else (interfaces, links, edges) passes
//! through untouched. A concrete system safely refines an abstract one when
//! every concrete trace, mapped pointwise through the functor, is a trace
//! the abstract system can take; it refines it lively when every abstract
//! continuation to an admissible trace can be mirrored concretely. Both
//! checks here are bounded: verdicts are relative to the given seeds, trace
//! depth, and extension depth.

mod check;

pub use check::{
    check_live, check_rule_preservation, check_safe, check_safe_and_live, Bounds, LiveWitness,
    PreservationEntry, PreservationReport, RefinementReport, SafeWitness, Verdict,
};

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::engine::{contains, Trace};
use crate::graph::{Bigraph, NodeId, Parent, Violation};
use crate::signature::Signature;

#[derive(Debug, Error)]
pub enum RefineError {
    #[error("cannot hide `{0}`: not a control of the source signature")]
    UnknownHiddenControl(String),
    #[error("cannot hide `{control}`: arity {arity} > 0 would leave dangling ports")]
    HiddenControlHasPorts { control: String, arity: usize },
    #[error("functors do not compose: first target differs from second source")]
    ComposeMismatch,
    #[error("bigraph is not well-formed over the source signature: {0}")]
    OutsideSource(Violation),
    #[error("admissibility pattern is not well-formed over the signature: {0}")]
    BadPattern(Violation),
    #[error("concrete system's signature differs from the functor's source")]
    SourceMismatch,
    #[error("abstract system's signature differs from the functor's target")]
    TargetMismatch,
    #[error(transparent)]
    Engine(#[from] crate::engine::EngineError),
}

/// Erases every node carrying a hidden control. Only port-free controls may
/// be hidden, so no link is ever left dangling; children of an erased node
/// are adopted by its nearest surviving ancestor. Interfaces are untouched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HidingFunctor {
    source: Signature,
    hidden: BTreeSet<String>,
}

impl HidingFunctor {
    pub fn new(
        source: Signature,
        hidden: impl IntoIterator<Item = String>,
    ) -> Result<Self, RefineError> {
        let hidden: BTreeSet<String> = hidden.into_iter().collect();
        for h in &hidden {
            match source.get(h) {
                None => return Err(RefineError::UnknownHiddenControl(h.clone())),
                Some(c) if c.arity > 0 => {
                    return Err(RefineError::HiddenControlHasPorts {
                        control: h.clone(),
                        arity: c.arity,
                    })
                }
                Some(_) => {}
            }
        }
        Ok(HidingFunctor { source, hidden })
    }

    /// The identity abstraction: nothing hidden.
    pub fn identity(source: Signature) -> Self {
        HidingFunctor { source, hidden: BTreeSet::new() }
    }

    pub fn source(&self) -> &Signature {
        &self.source
    }

    pub fn hidden(&self) -> &BTreeSet<String> {
        &self.hidden
    }

    pub fn target(&self) -> Signature {
        self.source.without(&self.hidden)
    }

    /// Composition: first hide with `self`, then with `next`. The result is
    /// the single functor hiding the union.
    pub fn then(&self, next: &HidingFunctor) -> Result<HidingFunctor, RefineError> {
        if next.source != self.target() {
            return Err(RefineError::ComposeMismatch);
        }
        Ok(HidingFunctor {
            source: self.source.clone(),
            hidden: self.hidden.union(&next.hidden).cloned().collect(),
        })
    }

    /// Applies the functor to one bigraph over the source signature.
    pub fn hide(&self, b: &Bigraph) -> Result<Bigraph, RefineError> {
        if let Some(first) = b.validate(&self.source).into_iter().next() {
            return Err(RefineError::OutsideSource(first));
        }
        let keep: Vec<NodeId> =
            b.nodes().filter(|v| !self.hidden.contains(&b.control(*v).name)).collect();
        let local: BTreeMap<NodeId, usize> =
            keep.iter().enumerate().map(|(i, v)| (*v, i)).collect();

        // Climb past erased nodes to the nearest survivor or the region.
        let resolve = |mut p: Parent| -> Parent {
            while let Parent::Node(v) = p {
                if local.contains_key(&v) {
                    break;
                }
                p = b.parent(v);
            }
            match p {
                Parent::Node(v) => Parent::Node(NodeId(local[&v])),
                region => region,
            }
        };

        Ok(Bigraph::from_parts(
            b.inner().clone(),
            b.outer().clone(),
            keep.iter().map(|v| b.control(*v).clone()).collect(),
            keep.iter().map(|v| resolve(b.parent(*v))).collect(),
            (0..b.inner().width).map(|h| resolve(b.hole_parent(h))).collect(),
            b.edge_count(),
            keep.iter().map(|v| b.ports(*v).to_vec()).collect(),
            b.inner_links().map(|(n, l)| (n.clone(), l.clone())).collect(),
        ))
    }

    /// The functor applied pointwise to a trace. The result is a bare
    /// sequence of agents; whether it is a trace of the abstract system is
    /// precisely what the safe check decides.
    pub fn map_trace(&self, t: &Trace) -> Result<Vec<Bigraph>, RefineError> {
        t.agents().iter().map(|a| self.hide(a)).collect()
    }
}

/// Designates which traces count as successful: those whose final agent
/// contains the pattern (pure containment; the surrounding context need not
/// be active, since this is observation rather than reaction).
#[derive(Debug, Clone)]
pub struct AdmissibilityPattern {
    pattern: Bigraph,
}

impl AdmissibilityPattern {
    pub fn new(pattern: Bigraph, sig: &Signature) -> Result<Self, RefineError> {
        if let Some(first) = pattern.validate(sig).into_iter().next() {
            return Err(RefineError::BadPattern(first));
        }
        Ok(AdmissibilityPattern { pattern })
    }

    pub fn pattern(&self) -> &Bigraph {
        &self.pattern
    }

    /// The empty trace has no final agent and is never admissible.
    pub fn is_admissible(&self, t: &Trace) -> bool {
        t.last().is_some_and(|a| self.admits_agent(a))
    }

    pub(crate) fn admits_agent(&self, a: &Bigraph) -> bool {
        contains(a, &self.pattern)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Trace;
    use crate::signature::{Activity, Control};
    use crate::term::{elaborate, parse_term};

    fn sig() -> Signature {
        Signature::new([
            Control::new("Z", 0, Activity::Active),
            Control::new("U", 0, Activity::Active),
            Control::new("F", 0, Activity::Active),
            Control::new("N", 0, Activity::Active),
            Control::new("S", 0, Activity::Active),
        ])
        .unwrap()
    }

    fn big(src: &str) -> Bigraph {
        elaborate(&parse_term(src).unwrap(), &sig()).unwrap()
    }

    fn hide_s() -> HidingFunctor {
        HidingFunctor::new(sig(), ["S".to_string()]).unwrap()
    }

    #[test]
    fn hiding_is_the_identity_on_agents_without_the_control() {
        let a = big("Z.(U | F)");
        assert!(hide_s().hide(&a).unwrap().iso(&a));
    }

    #[test]
    fn hidden_leaves_disappear() {
        let a = big("Z.(U | F.S)");
        assert!(hide_s().hide(&a).unwrap().iso(&big("Z.(U | F)")));
    }

    #[test]
    fn children_of_hidden_nodes_move_to_the_nearest_survivor() {
        let f = HidingFunctor::new(sig(), ["F".to_string()]).unwrap();
        assert!(f.hide(&big("Z.(F.N)")).unwrap().iso(&big("Z.N")));
        // Holes are adopted the same way as nodes.
        assert!(f.hide(&big("Z.(F.(N | $0))")).unwrap().iso(&big("Z.(N | $0)")));
    }

    #[test]
    fn interfaces_pass_through_unchanged() {
        let csig = Signature::new([
            Control::new("send", 1, Activity::Passive),
            Control::new("S", 0, Activity::Active),
        ])
        .unwrap();
        let f = HidingFunctor::new(csig.clone(), ["S".to_string()]).unwrap();
        let a = elaborate(&parse_term("send(a).S").unwrap(), &csig).unwrap();
        let h = f.hide(&a).unwrap();
        assert_eq!(h.outer(), a.outer());
        assert!(h.iso(&elaborate(&parse_term("send(a)").unwrap(), &csig).unwrap()));
    }

    #[test]
    fn only_known_port_free_controls_can_be_hidden() {
        assert!(matches!(
            HidingFunctor::new(sig(), ["Q".to_string()]),
            Err(RefineError::UnknownHiddenControl(n)) if n == "Q"
        ));
        let csig = Signature::new([Control::new("send", 1, Activity::Passive)]).unwrap();
        assert!(matches!(
            HidingFunctor::new(csig, ["send".to_string()]),
            Err(RefineError::HiddenControlHasPorts { arity: 1, .. })
        ));
    }

    #[test]
    fn agents_outside_the_source_signature_are_rejected() {
        let small = Signature::new([Control::new("Z", 0, Activity::Active)]).unwrap();
        let f = HidingFunctor::identity(small);
        assert!(matches!(f.hide(&big("U")), Err(RefineError::OutsideSource(_))));
    }

    #[test]
    fn composition_hides_the_union() {
        let f = hide_s();
        let g = HidingFunctor::new(f.target(), ["F".to_string()]).unwrap();
        let fg = f.then(&g).unwrap();
        let a = big("Z.(U | F.S)");
        assert!(fg.hide(&a).unwrap().iso(&g.hide(&f.hide(&a).unwrap()).unwrap()));
        assert!(fg.hide(&a).unwrap().iso(&big("Z.U")));

        let wrong = HidingFunctor::new(sig(), ["F".to_string()]).unwrap();
        assert!(matches!(f.then(&wrong), Err(RefineError::ComposeMismatch)));
    }

    #[test]
    fn mapping_traces_is_pointwise() {
        let f = hide_s();
        let t = Trace::from_walk(vec![big("Z.(U | F.S)")]);
        let images = f.map_trace(&t).unwrap();
        assert_eq!(images.len(), 1);
        assert!(images[0].iso(&big("Z.(U | F)")));

        assert!(f.map_trace(&Trace::from_walk(Vec::new())).unwrap().is_empty());

        let id = HidingFunctor::identity(sig());
        let t = Trace::from_walk(vec![big("Z.(U | F)"), big("Z.(U | F | N)")]);
        let images = id.map_trace(&t).unwrap();
        assert!(images.iter().zip(t.agents()).all(|(x, y)| x.iso(y)));
    }

    #[test]
    fn admissibility_looks_only_at_the_final_agent() {
        let adm = AdmissibilityPattern::new(big("U | F | N"), &sig()).unwrap();
        assert!(adm.is_admissible(&Trace::from_walk(vec![big("Z.(U | F)"), big("Z.(U | F | N)")])));
        assert!(!adm.is_admissible(&Trace::from_walk(vec![big("Z.(U | F | N)"), big("Z.(U | F)")])));
        assert!(!adm.is_admissible(&Trace::from_walk(vec![big("Z.(U | F)")])));
        assert!(!adm.is_admissible(&Trace::from_walk(Vec::new())));
    }

    #[test]
    fn patterns_must_fit_the_signature() {
        let small = Signature::new([Control::new("Z", 0, Activity::Active)]).unwrap();
        assert!(matches!(
            AdmissibilityPattern::new(big("U | F | N"), &small),
            Err(RefineError::BadPattern(_))
        ));
    }
}
