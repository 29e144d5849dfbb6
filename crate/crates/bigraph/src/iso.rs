//! Equality up to support translation.
//!
//! Two bigraphs are iso when their interfaces agree and there are bijections
//! on nodes and edges preserving controls, the parent map (with regions and
//! holes fixed pointwise), and the link map (with names fixed pointwise).
//! Children are unordered, so the check is a backtracking search; a
//! structural code per node (control, port targets by class, sorted child
//! codes) prunes almost all of it at the sizes this crate handles.

use crate::graph::{Bigraph, Child, EdgeId, Link, NodeId, Parent};

impl Bigraph {
    /// Equality up to support translation.
    pub fn iso(&self, other: &Bigraph) -> bool {
        if self.inner != other.inner || self.outer != other.outer {
            return false;
        }
        if self.node_count() != other.node_count() || self.edge_count != other.edge_count {
            return false;
        }

        let code_a = place_codes(self);
        let code_b = place_codes(other);
        let mut sa: Vec<&String> = code_a.iter().collect();
        let mut sb: Vec<&String> = code_b.iter().collect();
        sa.sort();
        sb.sort();
        if sa != sb {
            return false;
        }

        let mut search = Search {
            a: self,
            b: other,
            code_a: &code_a,
            code_b: &code_b,
            order: bfs_order(self),
            node_map: vec![None; self.node_count()],
            node_used: vec![false; other.node_count()],
            edge_map: vec![None; self.edge_count()],
            edge_used: vec![false; other.edge_count()],
            trail: Vec::new(),
        };

        // Inner names are fixed pointwise, so their links constrain the edge
        // bijection before any node is placed.
        for (x, la) in self.inner_links() {
            let lb = other.link_of_inner(x).expect("equal inner faces");
            if !search.match_links(la, lb) {
                return false;
            }
        }

        search.assign(0)
    }
}

struct Search<'a> {
    a: &'a Bigraph,
    b: &'a Bigraph,
    code_a: &'a [String],
    code_b: &'a [String],
    order: Vec<NodeId>,
    node_map: Vec<Option<NodeId>>,
    node_used: Vec<bool>,
    edge_map: Vec<Option<EdgeId>>,
    edge_used: Vec<bool>,
    trail: Vec<EdgeId>,
}

impl Search<'_> {
    fn assign(&mut self, k: usize) -> bool {
        if k == self.order.len() {
            return self.holes_agree();
        }
        let v = self.order[k];
        let want_parent = match self.a.parent(v) {
            Parent::Region(r) => Parent::Region(r),
            Parent::Node(u) => Parent::Node(self.node_map[u.0].expect("parents precede children")),
        };
        for w in self.b.nodes() {
            if self.node_used[w.0]
                || self.code_b[w.0] != self.code_a[v.0]
                || self.b.parent(w) != want_parent
            {
                continue;
            }
            let mark = self.trail.len();
            if self.bind_ports(v, w) {
                self.node_map[v.0] = Some(w);
                self.node_used[w.0] = true;
                if self.assign(k + 1) {
                    return true;
                }
                self.node_map[v.0] = None;
                self.node_used[w.0] = false;
            }
            self.rollback(mark);
        }
        false
    }

    fn bind_ports(&mut self, v: NodeId, w: NodeId) -> bool {
        let arity = self.a.control(v).arity;
        for i in 0..arity {
            let la = self.a.link_of_port(v, i).clone();
            let lb = self.b.link_of_port(w, i).clone();
            if !self.match_links(&la, &lb) {
                return false;
            }
        }
        true
    }

    fn match_links(&mut self, la: &Link, lb: &Link) -> bool {
        match (la, lb) {
            (Link::Outer(y1), Link::Outer(y2)) => y1 == y2,
            (Link::Edge(e), Link::Edge(f)) => match self.edge_map[e.0] {
                Some(g) => g == *f,
                None => {
                    if self.edge_used[f.0] {
                        false
                    } else {
                        self.edge_map[e.0] = Some(*f);
                        self.edge_used[f.0] = true;
                        self.trail.push(*e);
                        true
                    }
                }
            },
            _ => false,
        }
    }

    fn rollback(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let e = self.trail.pop().unwrap();
            if let Some(f) = self.edge_map[e.0].take() {
                self.edge_used[f.0] = false;
            }
        }
    }

    fn holes_agree(&self) -> bool {
        (0..self.a.inner().width).all(|h| {
            let pa = match self.a.hole_parent(h) {
                Parent::Region(r) => Parent::Region(r),
                Parent::Node(u) => Parent::Node(self.node_map[u.0].unwrap()),
            };
            pa == self.b.hole_parent(h)
        })
    }
}

/// Structural code per node: control, per-port target class, sorted child
/// codes, hole children by index. Equal codes are necessary for two nodes to
/// correspond under any iso.
pub(crate) fn place_codes(b: &Bigraph) -> Vec<String> {
    let degrees = b.edge_degrees();
    let mut codes: Vec<Option<String>> = vec![None; b.node_count()];
    for v in b.nodes() {
        code_of(b, v, &degrees, &mut codes);
    }
    codes.into_iter().map(Option::unwrap).collect()
}

fn code_of(b: &Bigraph, v: NodeId, degrees: &[usize], codes: &mut Vec<Option<String>>) -> String {
    if let Some(c) = &codes[v.0] {
        return c.clone();
    }
    let c = b.control(v);
    let mut parts: Vec<String> = Vec::new();
    for l in b.ports(v) {
        parts.push(match l {
            Link::Outer(y) => format!("o:{y}"),
            Link::Edge(e) => format!("e:{}", degrees[e.0]),
        });
    }
    let mut kids: Vec<String> = b
        .children(Parent::Node(v))
        .into_iter()
        .map(|c| match c {
            Child::Node(u) => code_of(b, u, degrees, codes),
            Child::Hole(i) => format!("${i}"),
        })
        .collect();
    kids.sort();
    let code = format!("{}:{}[{}]({})", c.name, c.activity, parts.join(","), kids.join(","));
    codes[v.0] = Some(code.clone());
    code
}

fn bfs_order(b: &Bigraph) -> Vec<NodeId> {
    let mut order = Vec::with_capacity(b.node_count());
    let mut queue: Vec<Parent> = (0..b.outer().width).map(Parent::Region).collect();
    let mut qi = 0;
    while qi < queue.len() {
        let p = queue[qi];
        qi += 1;
        for c in b.children(p) {
            if let Child::Node(v) = c {
                order.push(v);
                queue.push(Parent::Node(v));
            }
        }
    }
    order
}
