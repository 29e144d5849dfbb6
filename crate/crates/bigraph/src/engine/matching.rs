//! Occurrences of a redex in a ground agent.
//!
//! A match witnesses a decomposition `agent ≃ context ∘ (redex ⊗ id_Z) ∘ d`:
//! the redex's nodes embed injectively into the agent, region by region under
//! a common parent (the locus), redex holes swallow the remaining children as
//! ground parameters, and redex names bind injectively to agent links. Names
//! used by the parameters are routed past the redex through the identity on
//! `Z`. The search backtracks over node images and then enumerates hole
//! assignments; every candidate that would need one name shared between two
//! parameters is discarded, since the tensor `d_0 ⊗ d_1 ⊗ …` cannot express
//! it.
//!
//! The same embedding engine answers containment queries (is there any
//! occurrence, active context or not), which admissibility checking uses.

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{Bigraph, Child, EdgeId, Link, NodeId, Parent};
use crate::interface::Interface;

use super::{EngineError, ReactionRule};

/// One occurrence of a redex: the surrounding context, one ground parameter
/// per redex hole, and the names `Z` threaded past the redex.
#[derive(Debug, Clone)]
pub struct Match {
    context: Bigraph,
    params: Vec<Bigraph>,
    z_names: BTreeSet<String>,
}

impl Match {
    pub fn context(&self) -> &Bigraph {
        &self.context
    }

    /// Parameters in redex hole order.
    pub fn params(&self) -> &[Bigraph] {
        &self.params
    }

    pub fn z_names(&self) -> &BTreeSet<String> {
        &self.z_names
    }

    /// Rebuilds `context ∘ (redex ⊗ id_Z) ∘ (d_0 ⊗ … ⊗ d_{k-1})`. For a
    /// genuine match this is iso to the agent it was found in.
    pub fn recompose(&self, redex: &Bigraph) -> Result<Bigraph, crate::ops::OpError> {
        let id_z = Bigraph::identity(&Interface {
            width: 0,
            names: self.z_names.clone(),
        });
        let d = Bigraph::tensor_all(&self.params)?;
        self.context.compose(&redex.tensor(&id_z)?.compose(&d)?)
    }

    fn same_decomposition(&self, other: &Match) -> bool {
        self.z_names == other.z_names
            && self.params.len() == other.params.len()
            && self.context.iso(&other.context)
            && self.params.iter().zip(&other.params).all(|(a, b)| a.iso(b))
    }
}

impl ReactionRule {
    /// All occurrences of this rule's redex in a ground agent, deduplicated
    /// up to iso of the induced decomposition.
    pub fn matches(&self, agent: &Bigraph) -> Vec<Match> {
        let mut found = embeddings(agent, self.redex(), &EmbedOptions::matching());
        let mut kept: Vec<Match> = Vec::new();
        for m in found.drain(..) {
            if !kept.iter().any(|k| k.same_decomposition(&m)) {
                kept.push(m);
            }
        }
        kept
    }

    /// Rewrites the matched occurrence: the reactum replaces the redex and
    /// each reactum hole receives a fresh copy of the parameter its
    /// instantiation entry names. Duplicating or discarding a parameter that
    /// links names is rejected; splicing one name into two copies has no
    /// unambiguous meaning here.
    pub fn apply(&self, agent: &Bigraph, m: &Match) -> Result<Bigraph, EngineError> {
        let recomposed = m.recompose(self.redex())?;
        if !recomposed.iso(agent) {
            return Err(EngineError::StaleMatch);
        }
        for (hole, param) in m.params().iter().enumerate() {
            let uses = self.eta().iter().filter(|&&i| i == hole).count();
            if uses != 1 && !param.outer().names.is_empty() {
                return Err(EngineError::NamedParamNotPreserved {
                    hole,
                    names: param.outer().names.iter().cloned().collect(),
                });
            }
        }
        let id_z = Bigraph::identity(&Interface { width: 0, names: m.z_names().clone() });
        let picked: Vec<&Bigraph> = self.eta().iter().map(|&i| &m.params()[i]).collect();
        let d = Bigraph::tensor_all(picked.iter().copied())?;
        let result = m.context().compose(&self.reactum().tensor(&id_z)?.compose(&d)?)?;
        Ok(result)
    }
}

/// Does the pattern occur anywhere in the agent? Pure observation: the
/// context above the occurrence does not have to be active.
pub fn contains(agent: &Bigraph, pattern: &Bigraph) -> bool {
    !embeddings(agent, pattern, &EmbedOptions::containment()).is_empty()
}

pub(crate) struct EmbedOptions {
    require_active: bool,
    limit: Option<usize>,
}

impl EmbedOptions {
    pub(crate) fn matching() -> Self {
        EmbedOptions { require_active: true, limit: None }
    }

    pub(crate) fn containment() -> Self {
        EmbedOptions { require_active: false, limit: Some(1) }
    }
}

/// All decompositions of `agent` around `pattern`. The pattern must be
/// edge-free with no inner or idle outer names; rule construction and term
/// elaboration both guarantee this.
pub(crate) fn embeddings(agent: &Bigraph, pattern: &Bigraph, opts: &EmbedOptions) -> Vec<Match> {
    assert!(agent.is_ground(), "matching requires a ground agent");
    debug_assert_eq!(pattern.edge_count(), 0);
    debug_assert!(pattern.inner().names.is_empty());

    let plan = build_plan(pattern);
    let mut search = Search {
        agent,
        pattern,
        opts,
        plan,
        node_map: vec![None; pattern.node_count()],
        image: vec![false; agent.node_count()],
        locus: vec![None; pattern.outer().width],
        name_bind: BTreeMap::new(),
        bound_links: BTreeSet::new(),
        found: Vec::new(),
    };
    search.step(0);
    search.found
}

enum PlanItem {
    /// Choose the agent place receiving this pattern region.
    ChooseLocus(usize),
    /// Choose the image of this pattern node among the children of its
    /// already-placed parent.
    Bind { v: NodeId, parent: PatParent },
}

#[derive(Clone, Copy)]
enum PatParent {
    Locus(usize),
    Under(NodeId),
}

/// Where each agent node ends up in the decomposition.
#[derive(Clone, Copy, PartialEq)]
enum Slot {
    Free,
    Image,
    Absorbed(usize),
}

fn build_plan(pattern: &Bigraph) -> Vec<PlanItem> {
    let mut plan = Vec::new();
    for r in 0..pattern.outer().width {
        plan.push(PlanItem::ChooseLocus(r));
        // Depth-first from the region's roots, parents before children.
        let mut stack: Vec<(NodeId, PatParent)> = pattern
            .children(Parent::Region(r))
            .into_iter()
            .filter_map(|c| match c {
                Child::Node(v) => Some((v, PatParent::Locus(r))),
                Child::Hole(_) => None,
            })
            .rev()
            .collect();
        while let Some((v, parent)) = stack.pop() {
            plan.push(PlanItem::Bind { v, parent });
            for c in pattern.children(Parent::Node(v)).into_iter().rev() {
                if let Child::Node(u) = c {
                    stack.push((u, PatParent::Under(v)));
                }
            }
        }
    }
    plan
}

struct Search<'a> {
    agent: &'a Bigraph,
    pattern: &'a Bigraph,
    opts: &'a EmbedOptions,
    plan: Vec<PlanItem>,
    node_map: Vec<Option<NodeId>>,
    image: Vec<bool>,
    locus: Vec<Option<Parent>>,
    name_bind: BTreeMap<String, Link>,
    bound_links: BTreeSet<Link>,
    found: Vec<Match>,
}

impl Search<'_> {
    fn done(&self) -> bool {
        self.opts.limit.is_some_and(|n| self.found.len() >= n)
    }

    fn step(&mut self, i: usize) {
        if self.done() {
            return;
        }
        if i == self.plan.len() {
            self.assign_holes();
            return;
        }
        match self.plan[i] {
            PlanItem::ChooseLocus(r) => {
                let places = (0..self.agent.outer().width)
                    .map(Parent::Region)
                    .chain(self.agent.nodes().map(Parent::Node));
                for place in places {
                    if let Parent::Node(w) = place {
                        if self.image[w.0] {
                            continue;
                        }
                    }
                    if self.opts.require_active && !self.active_up_from(place) {
                        continue;
                    }
                    self.locus[r] = Some(place);
                    self.step(i + 1);
                    self.locus[r] = None;
                    if self.done() {
                        return;
                    }
                }
            }
            PlanItem::Bind { v, parent } => {
                let at = match parent {
                    PatParent::Locus(r) => self.locus[r].unwrap(),
                    PatParent::Under(u) => Parent::Node(self.node_map[u.0].unwrap()),
                };
                for c in self.agent.children(at) {
                    let Child::Node(w) = c else { continue };
                    if self.image[w.0] || self.agent.control(w) != self.pattern.control(v) {
                        continue;
                    }
                    let Some(bound) = self.bind_names(v, w) else { continue };
                    self.image[w.0] = true;
                    self.node_map[v.0] = Some(w);
                    self.step(i + 1);
                    self.node_map[v.0] = None;
                    self.image[w.0] = false;
                    self.undo_binds(&bound);
                    if self.done() {
                        return;
                    }
                }
            }
        }
    }

    /// Every node on the chain from `place` up to its region must be active
    /// for a reaction to happen below it.
    fn active_up_from(&self, place: Parent) -> bool {
        self.agent.ancestors(place).iter().all(|v| self.agent.control(*v).is_active())
    }

    /// Unifies the pattern's port names with the agent's links at `w`.
    /// Returns the names newly bound (for rollback), or `None` on clash.
    fn bind_names(&mut self, v: NodeId, w: NodeId) -> Option<Vec<String>> {
        let mut fresh = Vec::new();
        for (pl, al) in self.pattern.ports(v).iter().zip(self.agent.ports(w)) {
            let Link::Outer(x) = pl else { unreachable!("patterns are edge-free") };
            match self.name_bind.get(x).cloned() {
                Some(existing) if existing == *al => {}
                Some(_) => {
                    self.undo_binds(&fresh);
                    return None;
                }
                None => {
                    if self.bound_links.contains(al) {
                        // Another pattern name already owns this link.
                        self.undo_binds(&fresh);
                        return None;
                    }
                    self.name_bind.insert(x.clone(), al.clone());
                    self.bound_links.insert(al.clone());
                    fresh.push(x.clone());
                }
            }
        }
        Some(fresh)
    }

    fn undo_binds(&mut self, names: &[String]) {
        for x in names {
            let l = self.name_bind.remove(x).unwrap();
            self.bound_links.remove(&l);
        }
    }

    /// With all node images fixed, distribute the unconsumed agent children
    /// over the pattern's holes (or, at region level, leave them to the
    /// context) and carve out a match per assignment.
    fn assign_holes(&mut self) {
        for l in &self.locus {
            if let Some(Parent::Node(w)) = l {
                if self.image[w.0] {
                    return; // a later bind climbed onto the locus
                }
            }
        }

        // Each slot is one leftover agent subtree with its possible homes.
        let mut slots: Vec<(NodeId, Vec<Option<usize>>)> = Vec::new();

        for v in self.pattern.nodes() {
            let w = self.node_map[v.0].unwrap();
            let holes: Vec<usize> = self
                .pattern
                .children(Parent::Node(v))
                .into_iter()
                .filter_map(|c| match c {
                    Child::Hole(h) => Some(h),
                    Child::Node(_) => None,
                })
                .collect();
            for c in self.agent.children(Parent::Node(w)) {
                let Child::Node(u) = c else { continue };
                if self.image[u.0] {
                    continue;
                }
                if holes.is_empty() {
                    return; // no hole to swallow the extra child: not a match
                }
                let options = self.absorb_options(u, &holes, false);
                if options.is_empty() {
                    return;
                }
                slots.push((u, options));
            }
        }

        // Region-level leftovers may also stay in the context, so group the
        // regions sharing one locus and offer their holes together.
        let mut by_locus: BTreeMap<Parent, Vec<usize>> = BTreeMap::new();
        for (r, l) in self.locus.iter().enumerate() {
            by_locus.entry(l.unwrap()).or_default().push(r);
        }
        for (place, regions) in by_locus {
            let holes: Vec<usize> = regions
                .iter()
                .flat_map(|&r| self.pattern.children(Parent::Region(r)))
                .filter_map(|c| match c {
                    Child::Hole(h) => Some(h),
                    Child::Node(_) => None,
                })
                .collect();
            for c in self.agent.children(place) {
                let Child::Node(u) = c else { continue };
                if self.image[u.0] {
                    continue;
                }
                let options = self.absorb_options(u, &holes, true);
                if options.is_empty() {
                    return;
                }
                slots.push((u, options));
            }
        }

        self.enumerate_assignments(&slots, 0, &mut BTreeMap::new());
    }

    /// Homes for one leftover subtree: `Some(h)` to be swallowed by hole `h`,
    /// `None` to remain in the context (region level only). A subtree that
    /// contains a locus cannot be swallowed; the context still owns it.
    fn absorb_options(&self, root: NodeId, holes: &[usize], context_ok: bool) -> Vec<Option<usize>> {
        let mut options = Vec::new();
        if context_ok {
            options.push(None);
        }
        if !holes.is_empty() {
            let subtree = self.agent.subtree(root);
            let clean = !subtree
                .iter()
                .any(|u| self.locus.contains(&Some(Parent::Node(*u))));
            if clean {
                options.extend(holes.iter().map(|&h| Some(h)));
            }
        }
        options
    }

    fn enumerate_assignments(
        &mut self,
        slots: &[(NodeId, Vec<Option<usize>>)],
        i: usize,
        absorb: &mut BTreeMap<NodeId, usize>,
    ) {
        if self.done() {
            return;
        }
        if i == slots.len() {
            if let Some(m) = self.carve(absorb) {
                self.found.push(m);
            }
            return;
        }
        let (root, ref options) = slots[i];
        for opt in options {
            match opt {
                Some(h) => {
                    absorb.insert(root, *h);
                    self.enumerate_assignments(slots, i + 1, absorb);
                    absorb.remove(&root);
                }
                None => self.enumerate_assignments(slots, i + 1, absorb),
            }
        }
    }

    /// Builds the context, parameters, and `Z` for one complete assignment.
    /// Returns `None` when two parameters would have to share a link.
    fn carve(&self, absorb: &BTreeMap<NodeId, usize>) -> Option<Match> {
        let holes = self.pattern.inner().width;
        let n = self.agent.node_count();

        let mut slot = vec![Slot::Free; n];
        for w in self.node_map.iter().flatten() {
            slot[w.0] = Slot::Image;
        }
        for (&root, &h) in absorb {
            for u in self.agent.subtree(root) {
                debug_assert!(slot[u.0] == Slot::Free);
                slot[u.0] = Slot::Absorbed(h);
            }
        }

        // Classify every agent link by who touches it.
        let mut touched_params: BTreeMap<Link, BTreeSet<usize>> = BTreeMap::new();
        let mut touched_outside: BTreeSet<Link> = BTreeSet::new();
        for w in self.agent.nodes() {
            for l in self.agent.ports(w) {
                match slot[w.0] {
                    Slot::Absorbed(h) => {
                        touched_params.entry(l.clone()).or_default().insert(h);
                    }
                    _ => {
                        touched_outside.insert(l.clone());
                    }
                }
            }
        }
        if touched_params.values().any(|hs| hs.len() > 1) {
            return None; // one link cannot feed two parameters
        }

        // An edge all of whose points lie in one parameter belongs to it;
        // every other edge belongs to the context.
        let mut edge_home: Vec<Option<usize>> = vec![None; self.agent.edge_count()];
        for (l, hs) in &touched_params {
            if let Link::Edge(e) = l {
                if !touched_outside.contains(l) {
                    edge_home[e.0] = Some(*hs.iter().next().unwrap());
                }
            }
        }

        // Name the crossings: one Z name per link that leaves a parameter.
        let redex_names = &self.pattern.outer().names;
        let mut z_of: BTreeMap<Link, String> = BTreeMap::new();
        let mut z_names: BTreeSet<String> = BTreeSet::new();
        let mut counter = 0;
        for l in touched_params.keys() {
            if let Link::Edge(e) = l {
                if edge_home[e.0].is_some() {
                    continue;
                }
            }
            let z = match l {
                Link::Outer(y) if !redex_names.contains(y) && !z_names.contains(y) => y.clone(),
                _ => loop {
                    let cand = format!("z{counter}");
                    counter += 1;
                    if !redex_names.contains(&cand) && !z_names.contains(&cand) {
                        break cand;
                    }
                },
            };
            z_names.insert(z.clone());
            z_of.insert(l.clone(), z);
        }

        let params: Vec<Bigraph> =
            (0..holes).map(|h| self.carve_param(h, &slot, &edge_home, &z_of)).collect();
        let context = self.carve_context(&slot, &edge_home, &z_of, &z_names)?;

        Some(Match { context, params, z_names })
    }

    fn carve_param(
        &self,
        h: usize,
        slot: &[Slot],
        edge_home: &[Option<usize>],
        z_of: &BTreeMap<Link, String>,
    ) -> Bigraph {
        let members: Vec<NodeId> = self
            .agent
            .nodes()
            .filter(|w| matches!(slot[w.0], Slot::Absorbed(g) if g == h))
            .collect();
        let local: BTreeMap<NodeId, usize> =
            members.iter().enumerate().map(|(i, w)| (*w, i)).collect();
        let own_edges: Vec<EdgeId> = (0..self.agent.edge_count())
            .map(EdgeId)
            .filter(|e| edge_home[e.0] == Some(h))
            .collect();
        let local_edge: BTreeMap<EdgeId, usize> =
            own_edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();

        let mut controls = Vec::new();
        let mut node_parent = Vec::new();
        let mut port_link = Vec::new();
        let mut names: BTreeSet<String> = BTreeSet::new();
        for w in &members {
            controls.push(self.agent.control(*w).clone());
            node_parent.push(match self.agent.parent(*w) {
                Parent::Node(p) if local.contains_key(&p) => Parent::Node(NodeId(local[&p])),
                _ => Parent::Region(0),
            });
            let mut links = Vec::new();
            for l in self.agent.ports(*w) {
                if let Link::Edge(e) = l {
                    if let Some(&le) = local_edge.get(e) {
                        links.push(Link::Edge(EdgeId(le)));
                        continue;
                    }
                }
                let z = z_of[l].clone();
                names.insert(z.clone());
                links.push(Link::Outer(z));
            }
            port_link.push(links);
        }

        Bigraph::from_parts(
            Interface::ground(),
            Interface { width: 1, names },
            controls,
            node_parent,
            Vec::new(),
            own_edges.len(),
            port_link,
            BTreeMap::new(),
        )
    }

    fn carve_context(
        &self,
        slot: &[Slot],
        edge_home: &[Option<usize>],
        z_of: &BTreeMap<Link, String>,
        z_names: &BTreeSet<String>,
    ) -> Option<Bigraph> {
        let members: Vec<NodeId> =
            self.agent.nodes().filter(|w| slot[w.0] == Slot::Free).collect();
        let local: BTreeMap<NodeId, usize> =
            members.iter().enumerate().map(|(i, w)| (*w, i)).collect();
        let own_edges: Vec<EdgeId> = (0..self.agent.edge_count())
            .map(EdgeId)
            .filter(|e| edge_home[e.0].is_none())
            .collect();
        let local_edge: BTreeMap<EdgeId, usize> =
            own_edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();

        let lift = |l: &Link| match l {
            Link::Outer(y) => Link::Outer(y.clone()),
            Link::Edge(e) => Link::Edge(EdgeId(local_edge[e])),
        };

        let mut controls = Vec::new();
        let mut node_parent = Vec::new();
        let mut port_link = Vec::new();
        for w in &members {
            controls.push(self.agent.control(*w).clone());
            node_parent.push(match self.agent.parent(*w) {
                Parent::Node(p) => Parent::Node(NodeId(*local.get(&p)?)),
                Parent::Region(r) => Parent::Region(r),
            });
            port_link.push(self.agent.ports(*w).iter().map(lift).collect());
        }

        let hole_parent: Vec<Parent> = self
            .locus
            .iter()
            .map(|l| match l.unwrap() {
                Parent::Region(r) => Some(Parent::Region(r)),
                Parent::Node(w) => local.get(&w).map(|&i| Parent::Node(NodeId(i))),
            })
            .collect::<Option<_>>()?;

        let mut inner_names: BTreeSet<String> = self.pattern.outer().names.clone();
        inner_names.extend(z_names.iter().cloned());
        let mut inner_link: BTreeMap<String, Link> = BTreeMap::new();
        for x in &self.pattern.outer().names {
            // An idle pattern name never got bound; treat as no occurrence.
            inner_link.insert(x.clone(), lift(self.name_bind.get(x)?));
        }
        for (l, z) in z_of {
            inner_link.insert(z.clone(), lift(l));
        }

        Some(Bigraph::from_parts(
            Interface { width: self.pattern.outer().width, names: inner_names },
            self.agent.outer().clone(),
            controls,
            node_parent,
            hole_parent,
            own_edges.len(),
            port_link,
            inner_link,
        ))
    }
}
