//! Term elaboration: from syntax to a one-region bigraph.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{Bigraph, Link, Parent};
use crate::interface::Interface;
use crate::signature::Signature;

use super::Term;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ElabError {
    #[error("unknown control `{0}`")]
    UnknownControl(String),
    #[error("control `{control}` has arity {expected} but {found} ports were given")]
    ArityMismatch { control: String, expected: usize, found: usize },
    #[error("duplicate hole ${0}")]
    DuplicateHole(usize),
    #[error("holes must be numbered 0..{width}, found ${hole}")]
    HoleIndexOutOfRange { hole: usize, width: usize },
}

/// Builds the bigraph a term denotes: one region, no inner names, no closed
/// edges, and one outer name per distinct port name. The inner width is the
/// number of holes, which must be numbered contiguously from zero.
pub fn elaborate(t: &Term, sig: &Signature) -> Result<Bigraph, ElabError> {
    let mut e = Elab::default();
    e.walk(t, Parent::Region(0), sig)?;

    let width = e.hole_parent.len();
    for &hole in e.hole_parent.keys() {
        if hole >= width {
            return Err(ElabError::HoleIndexOutOfRange { hole, width });
        }
    }

    let outer_names: Vec<String> = e
        .port_link
        .iter()
        .flatten()
        .filter_map(|l| match l {
            Link::Outer(y) => Some(y.clone()),
            Link::Edge(_) => None,
        })
        .collect();

    Ok(Bigraph::from_parts(
        Interface::new(width, Vec::<String>::new()),
        Interface::new(1, outer_names),
        e.controls,
        e.node_parent,
        (0..width).map(|h| e.hole_parent[&h]).collect(),
        0,
        e.port_link,
        BTreeMap::new(),
    ))
}

#[derive(Default)]
struct Elab {
    controls: Vec<crate::signature::Control>,
    node_parent: Vec<Parent>,
    port_link: Vec<Vec<Link>>,
    hole_parent: BTreeMap<usize, Parent>,
}

impl Elab {
    fn walk(&mut self, t: &Term, parent: Parent, sig: &Signature) -> Result<(), ElabError> {
        match t {
            Term::Nil => Ok(()),
            Term::Hole(i) => {
                if self.hole_parent.insert(*i, parent).is_some() {
                    return Err(ElabError::DuplicateHole(*i));
                }
                Ok(())
            }
            Term::Par(l, r) => {
                self.walk(l, parent, sig)?;
                self.walk(r, parent, sig)
            }
            Term::Prefix { control, ports, body } => {
                let c = sig
                    .get(control)
                    .ok_or_else(|| ElabError::UnknownControl(control.clone()))?;
                if c.arity != ports.len() {
                    return Err(ElabError::ArityMismatch {
                        control: control.clone(),
                        expected: c.arity,
                        found: ports.len(),
                    });
                }
                let v = self.controls.len();
                self.controls.push(c.clone());
                self.node_parent.push(parent);
                self.port_link.push(ports.iter().map(|n| Link::Outer(n.clone())).collect());
                self.walk(body, Parent::Node(crate::graph::NodeId(v)), sig)
            }
        }
    }
}
