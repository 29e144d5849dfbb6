//! Composition and tensor product.
//!
//! `a.compose(&b)` grafts the regions of `b` into the holes of `a` and
//! splices links where `b`'s outer names meet `a`'s inner names. It is
//! defined exactly when `a`'s inner face equals `b`'s outer face.
//! `a.tensor(&b)` lays the two side by side, shifting `b`'s regions and
//! holes past `a`'s; it is defined when the name sets are disjoint on both
//! faces. Results are freshly numbered, so the inputs' node and edge
//! identities never leak.

use thiserror::Error;

use crate::graph::{Bigraph, EdgeId, Link, NodeId, Parent};
use crate::interface::Interface;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OpError {
    #[error("composition undefined: inner face {inner} does not match outer face {outer}")]
    FaceMismatch { inner: Interface, outer: Interface },
    #[error("tensor undefined: shared {face} name `{name}`")]
    SharedName { face: &'static str, name: String },
}

impl Bigraph {
    /// `self ∘ other`: plugs `other` into `self`.
    pub fn compose(&self, other: &Bigraph) -> Result<Bigraph, OpError> {
        if self.inner != other.outer {
            return Err(OpError::FaceMismatch {
                inner: self.inner.clone(),
                outer: other.outer.clone(),
            });
        }
        let na = self.node_count();
        let ea = self.edge_count;

        // A parent inside `other` that points at region r lands wherever
        // `self` puts hole r.
        let lift_parent_b = |p: &Parent| match p {
            Parent::Node(v) => Parent::Node(NodeId(na + v.0)),
            Parent::Region(r) => self.hole_parent[*r],
        };
        // A point of `other` that reaches outer name x continues along
        // `self`'s inner link for x.
        let lift_link_b = |l: &Link| match l {
            Link::Edge(e) => Link::Edge(EdgeId(ea + e.0)),
            Link::Outer(x) => self.inner_link[x].clone(),
        };

        let mut controls = self.controls.clone();
        controls.extend(other.controls.iter().cloned());

        let mut node_parent = self.node_parent.clone();
        node_parent.extend(other.node_parent.iter().map(lift_parent_b));

        let hole_parent = other.hole_parent.iter().map(lift_parent_b).collect();

        let mut port_link = self.port_link.clone();
        port_link.extend(
            other.port_link.iter().map(|links| links.iter().map(lift_link_b).collect()),
        );

        let inner_link =
            other.inner_link.iter().map(|(x, l)| (x.clone(), lift_link_b(l))).collect();

        Ok(Bigraph::from_parts(
            other.inner.clone(),
            self.outer.clone(),
            controls,
            node_parent,
            hole_parent,
            self.edge_count + other.edge_count,
            port_link,
            inner_link,
        ))
    }

    /// `self ⊗ other`: disjoint juxtaposition.
    pub fn tensor(&self, other: &Bigraph) -> Result<Bigraph, OpError> {
        for (face, a, b) in [
            ("inner", &self.inner, &other.inner),
            ("outer", &self.outer, &other.outer),
        ] {
            if let Some(name) = a.shared_names(b).next() {
                return Err(OpError::SharedName { face, name: name.clone() });
            }
        }
        let na = self.node_count();
        let ea = self.edge_count;
        let ma = self.outer.width;

        let shift_parent = |p: &Parent| match p {
            Parent::Node(v) => Parent::Node(NodeId(na + v.0)),
            Parent::Region(r) => Parent::Region(ma + r),
        };
        let shift_link = |l: &Link| match l {
            Link::Edge(e) => Link::Edge(EdgeId(ea + e.0)),
            Link::Outer(y) => Link::Outer(y.clone()),
        };

        let mut controls = self.controls.clone();
        controls.extend(other.controls.iter().cloned());

        let mut node_parent = self.node_parent.clone();
        node_parent.extend(other.node_parent.iter().map(shift_parent));

        let mut hole_parent = self.hole_parent.clone();
        hole_parent.extend(other.hole_parent.iter().map(shift_parent));

        let mut port_link = self.port_link.clone();
        port_link.extend(
            other.port_link.iter().map(|links| links.iter().map(shift_link).collect()),
        );

        let mut inner_link = self.inner_link.clone();
        inner_link.extend(other.inner_link.iter().map(|(x, l)| (x.clone(), shift_link(l))));

        let inner = Interface {
            width: self.inner.width + other.inner.width,
            names: self.inner.names.union(&other.inner.names).cloned().collect(),
        };
        let outer = Interface {
            width: self.outer.width + other.outer.width,
            names: self.outer.names.union(&other.outer.names).cloned().collect(),
        };

        Ok(Bigraph::from_parts(
            inner,
            outer,
            controls,
            node_parent,
            hole_parent,
            self.edge_count + other.edge_count,
            port_link,
            inner_link,
        ))
    }

    /// Tensor of a sequence, folding from the empty bigraph.
    pub fn tensor_all<'a>(parts: impl IntoIterator<Item = &'a Bigraph>) -> Result<Bigraph, OpError> {
        let mut acc = Bigraph::empty();
        for p in parts {
            acc = acc.tensor(p)?;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_requires_matching_faces() {
        let a = Bigraph::identity(&Interface::new(1, ["x"]));
        let b = Bigraph::identity(&Interface::new(1, ["y"]));
        assert!(matches!(a.compose(&b), Err(OpError::FaceMismatch { .. })));
        assert!(a.compose(&a).is_ok());
    }

    #[test]
    fn tensor_rejects_shared_names() {
        let a = Bigraph::identity(&Interface::new(0, ["x"]));
        let err = a.tensor(&a).unwrap_err();
        assert_eq!(err, OpError::SharedName { face: "inner", name: "x".into() });
    }

    #[test]
    fn tensor_adds_widths_and_unions_names() {
        let a = Bigraph::identity(&Interface::new(1, ["x"]));
        let b = Bigraph::identity(&Interface::new(2, ["y"]));
        let t = a.tensor(&b).unwrap();
        assert_eq!(*t.outer(), Interface::new(3, ["x", "y"]));
        // b's holes are shifted past a's single hole and region.
        assert_eq!(t.hole_parent(0), Parent::Region(0));
        assert_eq!(t.hole_parent(1), Parent::Region(1));
        assert_eq!(t.hole_parent(2), Parent::Region(2));
    }
}
