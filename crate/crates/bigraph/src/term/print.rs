//! Canonical printing.
//!
//! `print_term` inverts elaboration on bigraphs the term language can
//! express: one region, no inner names, no closed edges. Children are
//! emitted in a sorted canonical order, so iso inputs print identically and
//! the printed form doubles as a state key. Outer names carried by no port
//! have no syntax; they are dropped, so parse∘print restores a bigraph only
//! up to idle names.

use thiserror::Error;

use crate::graph::{Bigraph, Child, Link, Parent};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PrintError {
    #[error("not term-expressible: {0} regions where terms have exactly one")]
    MultiRegion(usize),
    #[error("not term-expressible: inner name `{0}`")]
    InnerName(String),
    #[error("not term-expressible: closed edge e{0}")]
    ClosedEdge(usize),
}

/// Prints a term-expressible bigraph in canonical form.
pub fn print_term(b: &Bigraph) -> Result<String, PrintError> {
    if b.outer().width != 1 {
        return Err(PrintError::MultiRegion(b.outer().width));
    }
    if let Some(x) = b.inner().names.iter().next() {
        return Err(PrintError::InnerName(x.clone()));
    }
    if b.edge_count() > 0 {
        return Err(PrintError::ClosedEdge(0));
    }
    Ok(region_str(b, 0))
}

/// Canonical state key for edge-free bigraphs: the interface followed by
/// every region body and inner link. Distinct up to iso on that fragment;
/// `None` when closed edges make the cheap form unsound.
pub fn canonical_key(b: &Bigraph) -> Option<String> {
    if b.edge_count() > 0 {
        return None;
    }
    let bodies: Vec<String> = (0..b.outer().width).map(|r| region_str(b, r)).collect();
    let links: Vec<String> = b
        .inner_links()
        .map(|(x, l)| match l {
            Link::Outer(y) => format!("{x}>{y}"),
            Link::Edge(_) => unreachable!("no edges here"),
        })
        .collect();
    Some(format!("{}->{} :: {} :: {}", b.inner(), b.outer(), bodies.join(" || "), links.join(",")))
}

/// Total rendering for diagnostics: interface, each region in canonical
/// order, and the link map with closed edges shown as `!e<n>`. Unlike
/// [`print_term`] this never fails and hides nothing, but edge numbering
/// follows internal identity, so it is only stable for a given value.
pub fn render(b: &Bigraph) -> String {
    let bodies: Vec<String> = (0..b.outer().width).map(|r| region_str(b, r)).collect();
    let mut s = format!("{} -> {} :: {}", b.inner(), b.outer(), bodies.join(" || "));
    let links: Vec<String> = b
        .inner_links()
        .map(|(x, l)| format!("{x} -> {}", link_str(l)))
        .collect();
    if !links.is_empty() {
        s.push_str(" :: ");
        s.push_str(&links.join(", "));
    }
    s
}

fn link_str(l: &Link) -> String {
    match l {
        Link::Outer(y) => y.clone(),
        Link::Edge(e) => format!("!e{}", e.0),
    }
}

fn region_str(b: &Bigraph, r: usize) -> String {
    let kids = children_strs(b, Parent::Region(r));
    if kids.is_empty() {
        "nil".into()
    } else {
        kids.join(" | ")
    }
}

fn children_strs(b: &Bigraph, p: Parent) -> Vec<String> {
    let mut kids: Vec<String> = b
        .children(p)
        .into_iter()
        .map(|c| match c {
            Child::Hole(i) => format!("${i}"),
            Child::Node(v) => {
                let ctrl = b.control(v);
                let mut head = ctrl.name.clone();
                if ctrl.arity > 0 {
                    let ports: Vec<String> = b.ports(v).iter().map(link_str).collect();
                    head.push_str(&format!("({})", ports.join(",")));
                }
                let inner = children_strs(b, Parent::Node(v));
                match inner.len() {
                    0 => head,
                    1 => format!("{head}.{}", inner[0]),
                    _ => format!("{head}.({})", inner.join(" | ")),
                }
            }
        })
        .collect();
    kids.sort();
    kids
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interface::Interface;
    use crate::signature::{Activity, Control, Signature};
    use crate::term::{elaborate, parse_term};

    fn sig() -> Signature {
        Signature::new([
            Control::new("Z", 0, Activity::Active),
            Control::new("U", 0, Activity::Active),
            Control::new("F", 0, Activity::Active),
            Control::new("send", 1, Activity::Passive),
        ])
        .unwrap()
    }

    fn roundtrip(src: &str) -> String {
        print_term(&elaborate(&parse_term(src).unwrap(), &sig()).unwrap()).unwrap()
    }

    #[test]
    fn children_are_sorted() {
        assert_eq!(roundtrip("Z.(U | F)"), "Z.(F | U)");
        assert_eq!(roundtrip("Z.(F | U)"), "Z.(F | U)");
    }

    #[test]
    fn single_child_chains_without_parens() {
        assert_eq!(roundtrip("Z.(U.(F))"), "Z.U.F");
        assert_eq!(roundtrip("nil"), "nil");
        assert_eq!(roundtrip("Z.($1 | $0)"), "Z.($0 | $1)");
    }

    #[test]
    fn ports_are_printed_in_port_order() {
        assert_eq!(roundtrip("send(a).send(b)"), "send(a).send(b)");
    }

    #[test]
    fn multi_region_is_an_obstruction() {
        let two = Bigraph::identity(&Interface::new(2, Vec::<String>::new()));
        assert_eq!(print_term(&two).unwrap_err(), PrintError::MultiRegion(2));
    }

    #[test]
    fn inner_names_are_an_obstruction() {
        let id = Bigraph::identity(&Interface::new(1, ["x"]));
        assert_eq!(print_term(&id).unwrap_err(), PrintError::InnerName("x".into()));
        // The total rendering still shows the whole structure.
        assert_eq!(render(&id), "<1, {x}> -> <1, {x}> :: $0 :: x -> x");
    }

    #[test]
    fn keys_distinguish_idle_names() {
        let a = elaborate(&parse_term("Z").unwrap(), &sig()).unwrap();
        let b = a.widen_outer(["spare".into()]);
        assert_ne!(canonical_key(&a), canonical_key(&b));
    }
}
