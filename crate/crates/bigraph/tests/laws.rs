//! Algebraic laws of the operations and the term language, checked over
//! generated terms rather than hand-picked examples.
//!
//! Contexts generated here have exactly one hole and no names, so every
//! composite below is interface-correct by construction; the properties
//! then assert the results are equal up to iso and pass validation.

use bigraph::term::{canonical_key, elaborate, parse_term, print_term, Term};
use bigraph::{Activity, Bigraph, Control, Interface, Signature};
use proptest::prelude::*;

fn sig() -> Signature {
    Signature::new([
        Control::new("Z", 0, Activity::Active),
        Control::new("U", 0, Activity::Active),
        Control::new("F", 0, Activity::Active),
        Control::new("P", 0, Activity::Passive),
        Control::new("send", 1, Activity::Passive),
        Control::new("recv", 1, Activity::Passive),
    ])
    .unwrap()
}

fn elab(t: &Term) -> Bigraph {
    elaborate(t, &sig()).unwrap()
}

fn prefix(control: &str, ports: Vec<String>, body: Term) -> Term {
    Term::Prefix { control: control.to_string(), ports, body: Box::new(body) }
}

fn par(l: Term, r: Term) -> Term {
    Term::Par(Box::new(l), Box::new(r))
}

/// Swaps every parallel pair, recursively. The result is the same bigraph.
fn mirrored(t: &Term) -> Term {
    match t {
        Term::Nil => Term::Nil,
        Term::Hole(i) => Term::Hole(*i),
        Term::Prefix { control, ports, body } => Term::Prefix {
            control: control.clone(),
            ports: ports.clone(),
            body: Box::new(mirrored(body)),
        },
        Term::Par(l, r) => par(mirrored(r), mirrored(l)),
    }
}

// ------------------------------------------------------------- strategies

fn arb_head() -> impl Strategy<Value = (String, Vec<String>)> {
    prop_oneof![
        prop::sample::select(vec!["Z", "U", "F", "P"]).prop_map(|c| (c.to_string(), vec![])),
        (
            prop::sample::select(vec!["send", "recv"]),
            prop::sample::select(vec!["a", "b", "c"]),
        )
            .prop_map(|(c, n)| (c.to_string(), vec![n.to_string()])),
    ]
}

/// Ground terms over the full signature, ports included.
fn arb_agent() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        Just(Term::Nil),
        arb_head().prop_map(|(c, ports)| prefix(&c, ports, Term::Nil)),
    ];
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            (arb_head(), inner.clone()).prop_map(|((c, ports), body)| prefix(&c, ports, body)),
            (inner.clone(), inner).prop_map(|(l, r)| par(l, r)),
        ]
    })
}

/// Ground terms with no ports at all; their faces are `<1, {}>` over
/// `<0, {}>`, which is what composition chains and tensor products need.
fn arb_closed() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        Just(Term::Nil),
        prop::sample::select(vec!["Z", "U", "F", "P"]).prop_map(|c| prefix(c, vec![], Term::Nil)),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (prop::sample::select(vec!["Z", "U", "F", "P"]), inner.clone())
                .prop_map(|(c, body)| prefix(c, vec![], body)),
            (inner.clone(), inner).prop_map(|(l, r)| par(l, r)),
        ]
    })
}

/// One-hole, no-name contexts: a hole wrapped in up to two nested layers,
/// each layer adding a closed sibling. Face `<1, {}>` over `<1, {}>`.
fn arb_context() -> impl Strategy<Value = Term> {
    prop::collection::vec((prop::sample::select(vec!["Z", "U", "F", "P"]), arb_closed()), 0..3)
        .prop_map(|wraps| {
            let mut t = Term::Hole(0);
            for (c, side) in wraps {
                t = prefix(c, vec![], par(t, side));
            }
            t
        })
}

// ------------------------------------------------------------- properties

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn prop_elaboration_validates(t in arb_agent()) {
        let b = elab(&t);
        prop_assert!(b.validate(&sig()).is_empty());
        prop_assert_eq!(b.outer().width, 1);
        prop_assert_eq!(b.inner().width, 0);
    }

    #[test]
    fn prop_print_parse_roundtrip(t in arb_agent()) {
        let b = elab(&t);
        let printed = print_term(&b).unwrap();
        let back = elab(&parse_term(&printed).unwrap());
        prop_assert!(back.iso(&b), "reparse of `{}` lost structure", printed);
    }

    #[test]
    fn prop_canonical_key_agrees_with_iso(t in arb_agent(), u in arb_agent()) {
        let a = elab(&t);
        let b = elab(&u);
        prop_assert!(canonical_key(&a).is_some());
        let same_key = canonical_key(&a) == canonical_key(&b);
        prop_assert_eq!(same_key, a.iso(&b));
    }

    #[test]
    fn prop_sibling_order_immaterial(t in arb_agent()) {
        let b = elab(&t);
        let m = elab(&mirrored(&t));
        prop_assert!(b.iso(&m));
        prop_assert_eq!(canonical_key(&b), canonical_key(&m));
    }

    #[test]
    fn prop_compose_associative(c1 in arb_context(), c2 in arb_context(), g in arb_closed()) {
        let (c1, c2, g) = (elab(&c1), elab(&c2), elab(&g));
        let left = c1.compose(&c2).unwrap().compose(&g).unwrap();
        let right = c1.compose(&c2.compose(&g).unwrap()).unwrap();
        prop_assert!(left.iso(&right));
        prop_assert!(left.validate(&sig()).is_empty());
    }

    #[test]
    fn prop_identity_neutral(g in arb_closed(), c in arb_context()) {
        let g = elab(&g);
        let c = elab(&c);
        prop_assert!(Bigraph::identity(g.outer()).compose(&g).unwrap().iso(&g));
        prop_assert!(c.compose(&Bigraph::identity(c.inner())).unwrap().iso(&c));
    }

    #[test]
    fn prop_tensor_interchange(
        c1 in arb_context(),
        c2 in arb_context(),
        g1 in arb_closed(),
        g2 in arb_closed(),
    ) {
        let (c1, c2, g1, g2) = (elab(&c1), elab(&c2), elab(&g1), elab(&g2));
        let joint = c1.tensor(&c2).unwrap().compose(&g1.tensor(&g2).unwrap()).unwrap();
        let split = c1.compose(&g1).unwrap().tensor(&c2.compose(&g2).unwrap()).unwrap();
        prop_assert!(joint.iso(&split));
        prop_assert!(joint.validate(&sig()).is_empty());
    }

    #[test]
    fn prop_tensor_associative(g1 in arb_closed(), g2 in arb_closed(), g3 in arb_closed()) {
        let (g1, g2, g3) = (elab(&g1), elab(&g2), elab(&g3));
        let left = g1.tensor(&g2).unwrap().tensor(&g3).unwrap();
        let right = g1.tensor(&g2.tensor(&g3).unwrap()).unwrap();
        prop_assert!(left.iso(&right));
    }

    #[test]
    fn prop_tensor_unit(g in arb_agent()) {
        let unit = Bigraph::identity(&Interface::ground());
        let g = elab(&g);
        prop_assert!(g.tensor(&unit).unwrap().iso(&g));
        prop_assert!(unit.tensor(&g).unwrap().iso(&g));
    }
}
