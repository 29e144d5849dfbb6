//! The concrete bigraph structure: a place forest and a link hypergraph
//! sharing one node set.
//!
//! A bigraph `⟨k, X⟩ → ⟨m, Y⟩` has nodes carrying controls, closed edges,
//! a parent map sending nodes and holes to nodes or regions, and a link map
//! sending ports and inner names to edges or outer names. Node and edge
//! identifiers are dense per-value indices with no meaning across values;
//! every constructor renumbers, and all observable equality is [`Bigraph::iso`].

use std::collections::BTreeMap;
use std::fmt;

use crate::interface::Interface;
use crate::signature::{Control, Signature};

/// Index of a node within one bigraph value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

/// Index of a closed edge within one bigraph value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

/// Target of the parent map: a node or a region of the outer face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parent {
    Node(NodeId),
    Region(usize),
}

/// Member of the parent map's domain: a node or a hole of the inner face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Child {
    Node(NodeId),
    Hole(usize),
}

/// Target of the link map: a closed edge or a name of the outer face.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Link {
    Edge(EdgeId),
    Outer(String),
}

/// A structural problem found by [`Bigraph::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Node carries a control absent from (or disagreeing with) the signature.
    UnknownControl { node: NodeId, control: Control },
    /// Node has fewer or more link entries than its control has ports.
    DanglingPort { node: NodeId, expected: usize, found: usize },
    /// Node is its own ancestor.
    ParentCycle { node: NodeId },
    /// Parent entry points at a node index that does not exist.
    BadParentNode { of: Child, target: NodeId },
    /// Parent entry points at a region outside the outer width.
    BadParentRegion { of: Child, region: usize },
    /// Link entry points at an edge index that does not exist.
    BadLinkEdge { point: String, edge: EdgeId },
    /// Link entry points at a name outside the outer face.
    BadLinkName { point: String, name: String },
    /// Inner face and inner link map disagree about a name.
    InnerNameMismatch { name: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownControl { node, control } => {
                write!(f, "node v{} carries control `{}` not in the signature", node.0, control.name)
            }
            Violation::DanglingPort { node, expected, found } => {
                write!(f, "node v{} has {found} linked ports but its control has arity {expected}", node.0)
            }
            Violation::ParentCycle { node } => write!(f, "node v{} lies on a parent cycle", node.0),
            Violation::BadParentNode { of, target } => {
                write!(f, "{} has nonexistent parent node v{}", describe_child(of), target.0)
            }
            Violation::BadParentRegion { of, region } => {
                write!(f, "{} has parent region {region} outside the outer width", describe_child(of))
            }
            Violation::BadLinkEdge { point, edge } => {
                write!(f, "{point} links to nonexistent edge e{}", edge.0)
            }
            Violation::BadLinkName { point, name } => {
                write!(f, "{point} links to `{name}` which is not an outer name")
            }
            Violation::InnerNameMismatch { name } => {
                write!(f, "inner name `{name}` present in exactly one of the inner face and the link map")
            }
        }
    }
}

fn describe_child(c: &Child) -> String {
    match c {
        Child::Node(v) => format!("node v{}", v.0),
        Child::Hole(i) => format!("hole {i}"),
    }
}

/// A concrete bigraph `inner → outer`.
#[derive(Debug, Clone)]
pub struct Bigraph {
    pub(crate) inner: Interface,
    pub(crate) outer: Interface,
    pub(crate) controls: Vec<Control>,
    pub(crate) node_parent: Vec<Parent>,
    pub(crate) hole_parent: Vec<Parent>,
    pub(crate) edge_count: usize,
    pub(crate) port_link: Vec<Vec<Link>>,
    pub(crate) inner_link: BTreeMap<String, Link>,
}

impl Bigraph {
    /// Assembles a bigraph from raw parts without checking anything.
    /// Callers that cannot guarantee well-formedness should follow up with
    /// [`Bigraph::validate`].
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        inner: Interface,
        outer: Interface,
        controls: Vec<Control>,
        node_parent: Vec<Parent>,
        hole_parent: Vec<Parent>,
        edge_count: usize,
        port_link: Vec<Vec<Link>>,
        inner_link: BTreeMap<String, Link>,
    ) -> Self {
        debug_assert_eq!(controls.len(), node_parent.len());
        debug_assert_eq!(controls.len(), port_link.len());
        debug_assert_eq!(hole_parent.len(), inner.width);
        Bigraph { inner, outer, controls, node_parent, hole_parent, edge_count, port_link, inner_link }
    }

    /// The identity bigraph on an interface: hole `i` sits alone under
    /// region `i` and each name passes straight through.
    pub fn identity(face: &Interface) -> Self {
        Bigraph {
            inner: face.clone(),
            outer: face.clone(),
            controls: Vec::new(),
            node_parent: Vec::new(),
            hole_parent: (0..face.width).map(Parent::Region).collect(),
            edge_count: 0,
            port_link: Vec::new(),
            inner_link: face.names.iter().map(|n| (n.clone(), Link::Outer(n.clone()))).collect(),
        }
    }

    /// The empty bigraph `⟨0,{}⟩ → ⟨0,{}⟩`, the unit of tensor.
    pub fn empty() -> Self {
        Bigraph::identity(&Interface::ground())
    }

    pub fn inner(&self) -> &Interface {
        &self.inner
    }

    pub fn outer(&self) -> &Interface {
        &self.outer
    }

    pub fn is_ground(&self) -> bool {
        self.inner.is_ground()
    }

    pub fn node_count(&self) -> usize {
        self.controls.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.controls.len()).map(NodeId)
    }

    pub fn control(&self, v: NodeId) -> &Control {
        &self.controls[v.0]
    }

    pub fn parent(&self, v: NodeId) -> Parent {
        self.node_parent[v.0]
    }

    pub fn hole_parent(&self, hole: usize) -> Parent {
        self.hole_parent[hole]
    }

    pub fn link_of_port(&self, v: NodeId, port: usize) -> &Link {
        &self.port_link[v.0][port]
    }

    pub fn ports(&self, v: NodeId) -> &[Link] {
        &self.port_link[v.0]
    }

    pub fn link_of_inner(&self, name: &str) -> Option<&Link> {
        self.inner_link.get(name)
    }

    pub fn inner_links(&self) -> impl Iterator<Item = (&String, &Link)> {
        self.inner_link.iter()
    }

    /// Children of a place, nodes and holes together, in index order.
    pub fn children(&self, p: Parent) -> Vec<Child> {
        let mut out = Vec::new();
        for (i, np) in self.node_parent.iter().enumerate() {
            if *np == p {
                out.push(Child::Node(NodeId(i)));
            }
        }
        for (i, hp) in self.hole_parent.iter().enumerate() {
            if *hp == p {
                out.push(Child::Hole(i));
            }
        }
        out
    }

    /// Nodes of the subtree rooted at `v`, including `v`, in preorder.
    pub fn subtree(&self, v: NodeId) -> Vec<NodeId> {
        let mut out = vec![v];
        let mut i = 0;
        while i < out.len() {
            let cur = out[i];
            for (j, np) in self.node_parent.iter().enumerate() {
                if *np == Parent::Node(cur) {
                    out.push(NodeId(j));
                }
            }
            i += 1;
        }
        out
    }

    /// Walks the parent chain from `start` up to its region, yielding the
    /// nodes passed through (including `start` itself if it is a node).
    pub fn ancestors(&self, start: Parent) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut cur = start;
        while let Parent::Node(v) = cur {
            if out.contains(&v) {
                break; // cycle guard; validate reports it
            }
            out.push(v);
            cur = self.node_parent[v.0];
        }
        out
    }

    /// Number of points (ports and inner names) on each edge.
    pub fn edge_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.edge_count];
        for links in &self.port_link {
            for l in links {
                if let Link::Edge(e) = l {
                    if e.0 < deg.len() {
                        deg[e.0] += 1;
                    }
                }
            }
        }
        for l in self.inner_link.values() {
            if let Link::Edge(e) = l {
                if e.0 < deg.len() {
                    deg[e.0] += 1;
                }
            }
        }
        deg
    }

    /// Returns the same bigraph with extra idle names added to the outer face.
    pub fn widen_outer(&self, extra: impl IntoIterator<Item = String>) -> Bigraph {
        let mut out = self.clone();
        out.outer.names.extend(extra);
        out
    }

    /// Checks every structural invariant against a signature, returning all
    /// violations found (empty means well-formed).
    pub fn validate(&self, sig: &Signature) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.controls.len();

        for (i, c) in self.controls.iter().enumerate() {
            match sig.get(&c.name) {
                Some(known) if known == c => {}
                _ => out.push(Violation::UnknownControl { node: NodeId(i), control: c.clone() }),
            }
            let found = self.port_link.get(i).map_or(0, Vec::len);
            if found != c.arity {
                out.push(Violation::DanglingPort { node: NodeId(i), expected: c.arity, found });
            }
        }

        let check_parent = |of: Child, p: &Parent, out: &mut Vec<Violation>| match p {
            Parent::Node(t) if t.0 >= n => out.push(Violation::BadParentNode { of, target: *t }),
            Parent::Region(r) if *r >= self.outer.width => {
                out.push(Violation::BadParentRegion { of, region: *r })
            }
            _ => {}
        };
        for (i, p) in self.node_parent.iter().enumerate() {
            check_parent(Child::Node(NodeId(i)), p, &mut out);
        }
        for (i, p) in self.hole_parent.iter().enumerate() {
            check_parent(Child::Hole(i), p, &mut out);
        }

        // Cycle check: walk up from each node; more than n steps means a loop.
        for i in 0..n {
            let mut cur = Parent::Node(NodeId(i));
            let mut steps = 0;
            loop {
                match cur {
                    Parent::Region(_) => break,
                    Parent::Node(v) => {
                        if v.0 >= n {
                            break; // reported above
                        }
                        steps += 1;
                        if steps > n {
                            out.push(Violation::ParentCycle { node: NodeId(i) });
                            break;
                        }
                        cur = self.node_parent[v.0];
                    }
                }
            }
        }

        let check_link = |point: String, l: &Link, out: &mut Vec<Violation>| match l {
            Link::Edge(e) if e.0 >= self.edge_count => {
                out.push(Violation::BadLinkEdge { point, edge: *e })
            }
            Link::Outer(y) if !self.outer.names.contains(y) => {
                out.push(Violation::BadLinkName { point, name: y.clone() })
            }
            _ => {}
        };
        for (i, links) in self.port_link.iter().enumerate() {
            for (p, l) in links.iter().enumerate() {
                check_link(format!("port {p} of node v{i}"), l, &mut out);
            }
        }
        for (x, l) in &self.inner_link {
            check_link(format!("inner name `{x}`"), l, &mut out);
            if !self.inner.names.contains(x) {
                out.push(Violation::InnerNameMismatch { name: x.clone() });
            }
        }
        for x in &self.inner.names {
            if !self.inner_link.contains_key(x) {
                out.push(Violation::InnerNameMismatch { name: x.clone() });
            }
        }

        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::Activity;

    fn sig() -> Signature {
        Signature::new([
            Control::new("A", 0, Activity::Active),
            Control::new("B", 1, Activity::Active),
        ])
        .unwrap()
    }

    #[test]
    fn identity_is_well_formed() {
        let face = Interface::new(2, ["x"]);
        let id = Bigraph::identity(&face);
        assert!(id.validate(&sig()).is_empty());
        assert_eq!(id.inner(), id.outer());
        assert_eq!(id.hole_parent(0), Parent::Region(0));
        assert_eq!(id.hole_parent(1), Parent::Region(1));
    }

    #[test]
    fn dangling_port_is_reported() {
        // Arity-1 node with no link entry for its port.
        let b = Bigraph::from_parts(
            Interface::ground(),
            Interface::new(1, Vec::<String>::new()),
            vec![Control::new("B", 1, Activity::Active)],
            vec![Parent::Region(0)],
            vec![],
            0,
            vec![vec![]],
            BTreeMap::new(),
        );
        let vs = b.validate(&sig());
        assert!(vs.contains(&Violation::DanglingPort { node: NodeId(0), expected: 1, found: 0 }));
    }

    #[test]
    fn parent_cycle_is_reported() {
        let b = Bigraph::from_parts(
            Interface::ground(),
            Interface::new(1, Vec::<String>::new()),
            vec![Control::new("A", 0, Activity::Active), Control::new("A", 0, Activity::Active)],
            vec![Parent::Node(NodeId(1)), Parent::Node(NodeId(0))],
            vec![],
            0,
            vec![vec![], vec![]],
            BTreeMap::new(),
        );
        let vs = b.validate(&sig());
        assert!(vs.iter().any(|v| matches!(v, Violation::ParentCycle { .. })));
    }

    #[test]
    fn unknown_control_and_bad_link_are_reported() {
        let b = Bigraph::from_parts(
            Interface::ground(),
            Interface::new(1, Vec::<String>::new()),
            vec![Control::new("C", 1, Activity::Active)],
            vec![Parent::Region(0)],
            vec![],
            0,
            vec![vec![Link::Outer("y".into())]],
            BTreeMap::new(),
        );
        let vs = b.validate(&sig());
        assert!(vs.iter().any(|v| matches!(v, Violation::UnknownControl { .. })));
        assert!(vs.iter().any(|v| matches!(v, Violation::BadLinkName { .. })));
    }
}
