//! Properties of ground reaction and bounded exploration, checked from
//! generated seeds over the zone-movement rules.

use std::collections::BTreeSet;

use bigraph::engine::{Brs, StateSpace, Trace};
use bigraph::term::{canonical_key, elaborate, parse_rule, render, Term};
use bigraph::{Activity, Bigraph, Control, Signature};
use proptest::prelude::*;

const DEPTH: usize = 2;
const MAX_STATES: usize = 4096;

fn sig() -> Signature {
    Signature::new([
        Control::new("Z", 0, Activity::Active),
        Control::new("U", 0, Activity::Active),
        Control::new("F", 0, Activity::Active),
        Control::new("N", 0, Activity::Active),
    ])
    .unwrap()
}

fn brs() -> Brs {
    let mut brs = Brs::new(sig());
    for src in [
        "M1: Z.(F | $0) | Z.$1 -> Z.$0 | Z.(F | $1)",
        "M2: Z.(Z.(F | $0) | $1) -> Z.(Z.$0 | F | $1)",
        "M3: Z.(Z.$0 | F | $1) -> Z.(Z.(F | $0) | $1)",
        "R1: Z.(U | F | $0) -> Z.(U | F | N | $0)",
    ] {
        brs.add_rule_source(&parse_rule(src).unwrap()).unwrap();
    }
    brs
}

fn prefix(control: &str, body: Term) -> Term {
    Term::Prefix { control: control.to_string(), ports: vec![], body: Box::new(body) }
}

/// Small zone-shaped seeds: atoms in parallel, nested under Z only, so
/// the movement rules have material to work on without blowing up the
/// state count at the bounds above.
fn arb_seed() -> impl Strategy<Value = Term> {
    let leaf = prop::sample::select(vec!["Z", "U", "F"]).prop_map(|c| prefix(c, Term::Nil));
    leaf.prop_recursive(3, 8, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|b| prefix("Z", b)),
            (inner.clone(), inner).prop_map(|(l, r)| Term::Par(Box::new(l), Box::new(r))),
        ]
    })
}

fn seed_of(t: &Term) -> Bigraph {
    elaborate(t, &sig()).unwrap()
}

fn space_of(seed: &Bigraph) -> StateSpace {
    StateSpace::explore(&brs(), seed, DEPTH, MAX_STATES).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prop_successors_stay_ground_and_valid(t in arb_seed()) {
        let brs = brs();
        let agent = seed_of(&t);
        for succ in brs.successors(&agent).unwrap() {
            prop_assert!(succ.validate(brs.signature()).is_empty());
            prop_assert_eq!(succ.outer(), agent.outer());
            prop_assert_eq!(succ.inner().width, 0);
        }
    }

    #[test]
    fn prop_successors_deterministic(t in arb_seed()) {
        let brs = brs();
        let agent = seed_of(&t);
        let once: Vec<String> = brs.successors(&agent).unwrap().iter().map(render).collect();
        let again: Vec<String> = brs.successors(&agent).unwrap().iter().map(render).collect();
        prop_assert_eq!(once, again);
    }

    #[test]
    fn prop_explore_dedups_states(t in arb_seed()) {
        let space = space_of(&seed_of(&t));
        let mut keys = BTreeSet::new();
        for s in space.states() {
            let k = canonical_key(s).unwrap();
            prop_assert!(keys.insert(k), "state space holds two copies of one agent");
        }
    }

    #[test]
    fn prop_explore_edges_respect_depth(t in arb_seed()) {
        let space = space_of(&seed_of(&t));
        prop_assert_eq!(space.distance(0), 0);
        for &(src, _, dst) in space.edges() {
            prop_assert!(src < space.states().len());
            prop_assert!(dst < space.states().len());
            prop_assert!(space.distance(src) < DEPTH);
            prop_assert!(space.distance(dst) <= space.distance(src) + 1);
        }
    }

    #[test]
    fn prop_deeper_exploration_is_monotone(t in arb_seed()) {
        let seed = seed_of(&t);
        let brs = brs();
        let shallow = StateSpace::explore(&brs, &seed, 1, MAX_STATES).unwrap();
        let deep = StateSpace::explore(&brs, &seed, 2, MAX_STATES).unwrap();
        let deep_keys: BTreeSet<String> =
            deep.states().iter().map(|s| canonical_key(s).unwrap()).collect();
        for s in shallow.states() {
            prop_assert!(deep_keys.contains(&canonical_key(s).unwrap()));
        }
    }

    #[test]
    fn prop_traces_verify_and_are_prefix_closed(t in arb_seed()) {
        let brs = brs();
        let space = space_of(&seed_of(&t));
        let traces = space.traces();
        let rendered: BTreeSet<Vec<String>> = traces
            .iter()
            .map(|tr| tr.agents().iter().map(render).collect())
            .collect();
        for tr in &traces {
            prop_assert!(!tr.is_empty());
            prop_assert!(tr.len() <= DEPTH + 1);
            prop_assert!(tr.agents()[0].iso(space.seed()));
            prop_assert!(Trace::new(&brs, tr.agents().to_vec()).is_ok());
            for cut in 1..tr.len() {
                let head: Vec<String> = tr.agents()[..cut].iter().map(render).collect();
                prop_assert!(rendered.contains(&head), "missing prefix of length {}", cut);
            }
        }
    }
}
