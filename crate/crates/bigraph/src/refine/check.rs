//! Bounded refinement checks and their reports.
//!
//! All verdicts are relative to the stated bounds: the seeds explored, the
//! concrete trace depth, the abstract extension depth (for liveness), and
//! the state cap. Hitting the cap marks the bounds as exceeded rather than
//! silently shrinking the search.

use std::collections::VecDeque;
use std::fmt;

use crate::engine::{Brs, ExploreError, StateSpace};
use crate::graph::{Bigraph, Parent};

use super::{AdmissibilityPattern, HidingFunctor, RefineError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    HoldsUpToBound,
    Refuted,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::HoldsUpToBound => "holds-up-to-bound",
            Verdict::Refuted => "refuted",
        })
    }
}

/// What a verdict is relative to. `exceeded` records that some seed's
/// exploration hit the state cap, so the verdict covers only what was seen.
#[derive(Debug, Clone)]
pub struct Bounds {
    pub seeds: Vec<String>,
    pub depth: usize,
    pub ext_depth: Option<usize>,
    pub max_states: usize,
    pub exceeded: bool,
}

/// A concrete step whose image no abstract reaction accounts for. The trace
/// ends with the offending step; `images` is its pointwise image.
#[derive(Debug, Clone)]
pub struct SafeWitness {
    pub seed: String,
    pub rule: String,
    pub trace: Vec<Bigraph>,
    pub images: Vec<Bigraph>,
}

/// A reachable concrete state (end of `trace`) whose image admits the
/// abstract extension `extension`, which no concrete run can mirror.
#[derive(Debug, Clone)]
pub struct LiveWitness {
    pub seed: String,
    pub trace: Vec<Bigraph>,
    pub extension: Vec<Bigraph>,
}

#[derive(Debug, Clone)]
pub struct RefinementReport {
    pub verdict: Verdict,
    pub bounds: Bounds,
    pub safe_witness: Option<SafeWitness>,
    pub live_witness: Option<LiveWitness>,
}

/// One concrete rule's fate under the functor: the name of the abstract rule
/// realizing its image, or why none does.
#[derive(Debug, Clone)]
pub struct PreservationEntry {
    pub rule: String,
    pub outcome: Result<String, String>,
}

#[derive(Debug, Clone)]
pub struct PreservationReport {
    pub entries: Vec<PreservationEntry>,
}

impl PreservationReport {
    pub fn preserved(&self) -> bool {
        self.entries.iter().all(|e| e.outcome.is_ok())
    }
}

fn check_signatures(
    f: &HidingFunctor,
    concrete: &Brs,
    abstract_brs: &Brs,
) -> Result<(), RefineError> {
    if concrete.signature() != f.source() {
        return Err(RefineError::SourceMismatch);
    }
    if *abstract_brs.signature() != f.target() {
        return Err(RefineError::TargetMismatch);
    }
    Ok(())
}

/// The sufficient condition for safety: every concrete rule's image under
/// the functor is (up to iso, with the same instantiation) a rule of the
/// abstract system, and hiding cannot disturb activity because hidden
/// controls occur only as leaves. Failures are entries, not errors, so a
/// non-preserving functor can be reported rule by rule.
pub fn check_rule_preservation(
    f: &HidingFunctor,
    concrete: &Brs,
    abstract_brs: &Brs,
) -> Result<PreservationReport, RefineError> {
    if concrete.signature() != f.source() {
        return Err(RefineError::SourceMismatch);
    }
    let mut entries = Vec::new();
    'rules: for rule in concrete.rules() {
        for (side, b) in [("redex", rule.redex()), ("reactum", rule.reactum())] {
            for v in b.nodes() {
                if f.hidden().contains(&b.control(v).name)
                    && !b.children(Parent::Node(v)).is_empty()
                {
                    entries.push(PreservationEntry {
                        rule: rule.name().to_string(),
                        outcome: Err(format!(
                            "hidden control `{}` is not a leaf in the {side}",
                            b.control(v).name
                        )),
                    });
                    continue 'rules;
                }
            }
        }
        let redex = f.hide(rule.redex())?;
        let reactum = f.hide(rule.reactum())?;
        let image = abstract_brs.rules().iter().find(|ar| {
            redex.iso(ar.redex()) && reactum.iso(ar.reactum()) && rule.eta() == ar.eta()
        });
        entries.push(PreservationEntry {
            rule: rule.name().to_string(),
            outcome: match image {
                Some(ar) => Ok(ar.name().to_string()),
                None => Err("no abstract rule realizes the image".to_string()),
            },
        });
    }
    Ok(PreservationReport { entries })
}

/// Does every concrete trace from the seeds map to an abstract trace? Each
/// explored step's image pair must be realized by an abstract reaction;
/// `allow_stutter` weakens this to let iso image pairs pass unrealized.
pub fn check_safe(
    f: &HidingFunctor,
    concrete: &Brs,
    abstract_brs: &Brs,
    seeds: &[(String, Bigraph)],
    depth: usize,
    max_states: usize,
    allow_stutter: bool,
) -> Result<RefinementReport, RefineError> {
    check_signatures(f, concrete, abstract_brs)?;
    let mut bounds = Bounds {
        seeds: seeds.iter().map(|(n, _)| n.clone()).collect(),
        depth,
        ext_depth: None,
        max_states,
        exceeded: false,
    };
    let mut safe_witness = None;
    'seeds: for (name, seed) in seeds {
        let Some(space) = explore(concrete, seed, depth, max_states, &mut bounds)? else {
            continue;
        };
        let images: Vec<Bigraph> =
            space.states().iter().map(|s| f.hide(s)).collect::<Result<_, _>>()?;
        let mut realized_from: Vec<Option<Vec<Bigraph>>> = vec![None; images.len()];
        for (src, rule, dst) in space.edges() {
            let (x, y) = (&images[*src], &images[*dst]);
            if allow_stutter && x.iso(y) {
                continue;
            }
            if realized_from[*src].is_none() {
                realized_from[*src] = Some(abstract_brs.successors(x)?);
            }
            if realized_from[*src].as_ref().unwrap().iter().any(|b| b.iso(y)) {
                continue;
            }
            let mut trace = path_agents(&space, *src);
            trace.push(space.states()[*dst].clone());
            let images = trace.iter().map(|a| f.hide(a)).collect::<Result<_, _>>()?;
            safe_witness =
                Some(SafeWitness { seed: name.clone(), rule: rule.clone(), trace, images });
            break 'seeds;
        }
    }
    Ok(RefinementReport {
        verdict: verdict_of(safe_witness.is_some()),
        bounds,
        safe_witness,
        live_witness: None,
    })
}

/// Can every abstract continuation to admissibility be mirrored concretely?
/// For each reachable concrete state, every abstract extension of its image
/// (up to `ext_depth` steps) ending admissible must have a concrete
/// extension with pointwise iso images.
#[allow(clippy::too_many_arguments)]
pub fn check_live(
    f: &HidingFunctor,
    concrete: &Brs,
    abstract_brs: &Brs,
    adm: &AdmissibilityPattern,
    seeds: &[(String, Bigraph)],
    depth: usize,
    ext_depth: usize,
    max_states: usize,
) -> Result<RefinementReport, RefineError> {
    check_signatures(f, concrete, abstract_brs)?;
    let mut bounds = Bounds {
        seeds: seeds.iter().map(|(n, _)| n.clone()).collect(),
        depth,
        ext_depth: Some(ext_depth),
        max_states,
        exceeded: false,
    };
    let mut live_witness = None;
    'seeds: for (name, seed) in seeds {
        let Some(space) = explore(concrete, seed, depth, max_states, &mut bounds)? else {
            continue;
        };
        for (i, c) in space.states().iter().enumerate() {
            let image = f.hide(c)?;
            let frontier = std::slice::from_ref(c);
            let mut prefix = Vec::new();
            if let Some(extension) = unmatched_extension(
                f,
                concrete,
                abstract_brs,
                adm,
                &image,
                frontier,
                ext_depth,
                &mut prefix,
            )? {
                live_witness = Some(LiveWitness {
                    seed: name.clone(),
                    trace: path_agents(&space, i),
                    extension,
                });
                break 'seeds;
            }
        }
    }
    Ok(RefinementReport {
        verdict: verdict_of(live_witness.is_some()),
        bounds,
        safe_witness: None,
        live_witness,
    })
}

/// Both checks over the same bounds, merged into one report. A refutation on
/// either side refutes the conjunction.
#[allow(clippy::too_many_arguments)]
pub fn check_safe_and_live(
    f: &HidingFunctor,
    concrete: &Brs,
    abstract_brs: &Brs,
    adm: &AdmissibilityPattern,
    seeds: &[(String, Bigraph)],
    depth: usize,
    ext_depth: usize,
    max_states: usize,
    allow_stutter: bool,
) -> Result<RefinementReport, RefineError> {
    let safe =
        check_safe(f, concrete, abstract_brs, seeds, depth, max_states, allow_stutter)?;
    let live = check_live(
        f,
        concrete,
        abstract_brs,
        adm,
        seeds,
        depth,
        ext_depth,
        max_states,
    )?;
    Ok(RefinementReport {
        verdict: verdict_of(safe.safe_witness.is_some() || live.live_witness.is_some()),
        bounds: Bounds {
            seeds: safe.bounds.seeds,
            depth,
            ext_depth: Some(ext_depth),
            max_states,
            exceeded: safe.bounds.exceeded || live.bounds.exceeded,
        },
        safe_witness: safe.safe_witness,
        live_witness: live.live_witness,
    })
}

fn verdict_of(refuted: bool) -> Verdict {
    if refuted {
        Verdict::Refuted
    } else {
        Verdict::HoldsUpToBound
    }
}

fn explore(
    brs: &Brs,
    seed: &Bigraph,
    depth: usize,
    max_states: usize,
    bounds: &mut Bounds,
) -> Result<Option<StateSpace>, RefineError> {
    match StateSpace::explore(brs, seed, depth, max_states) {
        Ok(space) => Ok(Some(space)),
        Err(ExploreError::StateCapExceeded { .. }) => {
            bounds.exceeded = true;
            Ok(None)
        }
        Err(ExploreError::Engine(e)) => Err(e.into()),
        Err(e @ ExploreError::BrokenStep { .. }) => {
            unreachable!("exploration constructs no unchecked traces: {e}")
        }
    }
}

/// Depth-first over abstract walks from `a_cur`, carrying every concrete
/// agent whose image history matches the walk so far. Returns the first
/// walk that ends admissible while the concrete frontier is empty.
#[allow(clippy::too_many_arguments)]
fn unmatched_extension(
    f: &HidingFunctor,
    concrete: &Brs,
    abstract_brs: &Brs,
    adm: &AdmissibilityPattern,
    a_cur: &Bigraph,
    frontier: &[Bigraph],
    remaining: usize,
    prefix: &mut Vec<Bigraph>,
) -> Result<Option<Vec<Bigraph>>, RefineError> {
    if remaining == 0 {
        return Ok(None);
    }
    for b in abstract_brs.successors(a_cur)? {
        let mut next_frontier: Vec<Bigraph> = Vec::new();
        for c in frontier {
            for c2 in concrete.successors(c)? {
                if f.hide(&c2)?.iso(&b) && !next_frontier.iter().any(|seen| seen.iso(&c2)) {
                    next_frontier.push(c2);
                }
            }
        }
        prefix.push(b.clone());
        if next_frontier.is_empty() && adm.admits_agent(&b) {
            return Ok(Some(prefix.clone()));
        }
        let found = unmatched_extension(
            f,
            concrete,
            abstract_brs,
            adm,
            &b,
            &next_frontier,
            remaining - 1,
            prefix,
        )?;
        if found.is_some() {
            return Ok(found);
        }
        prefix.pop();
    }
    Ok(None)
}

/// Agents along a shortest edge path from the seed to `target`.
fn path_agents(space: &StateSpace, target: usize) -> Vec<Bigraph> {
    let n = space.states().len();
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        if u == target {
            break;
        }
        for (s, _, t) in space.edges() {
            if *s == u && !seen[*t] {
                seen[*t] = true;
                parent[*t] = Some(u);
                queue.push_back(*t);
            }
        }
    }
    let mut path = vec![target];
    while let Some(p) = parent[*path.last().unwrap()] {
        path.push(p);
    }
    path.reverse();
    path.into_iter().map(|i| space.states()[i].clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::{Activity, Control, Signature};
    use crate::term::{elaborate, parse_rule, parse_term};

    fn zone_sig(with_marker: bool) -> Signature {
        let mut controls = vec![
            Control::new("Z", 0, Activity::Active),
            Control::new("U", 0, Activity::Active),
            Control::new("F", 0, Activity::Active),
            Control::new("N", 0, Activity::Active),
        ];
        if with_marker {
            controls.push(Control::new("S", 0, Activity::Active));
        }
        Signature::new(controls).unwrap()
    }

    const MOVES: [&str; 3] = [
        "M1: Z.(F | $0) | Z.$1 -> Z.$0 | Z.(F | $1)",
        "M2: Z.(Z.(F | $0) | $1) -> Z.(Z.$0 | F | $1)",
        "M3: Z.(Z.$0 | F | $1) -> Z.(Z.(F | $0) | $1)",
    ];

    fn brs_of(sig: Signature, rules: &[&str]) -> Brs {
        let mut brs = Brs::new(sig);
        for src in rules {
            brs.add_rule_source(&parse_rule(src).unwrap()).unwrap();
        }
        brs
    }

    fn notify() -> Brs {
        let mut rules = MOVES.to_vec();
        rules.push("R1: Z.(U | F | $0) -> Z.(U | F | N | $0)");
        brs_of(zone_sig(false), &rules)
    }

    fn selective() -> Brs {
        let mut rules = MOVES.to_vec();
        rules.push("R2: Z.(U | F.S | $0) -> Z.(U | F.S | N | $0)");
        brs_of(zone_sig(true), &rules)
    }

    fn big(sig: &Signature, src: &str) -> Bigraph {
        elaborate(&parse_term(src).unwrap(), sig).unwrap()
    }

    fn hide_s() -> HidingFunctor {
        HidingFunctor::new(zone_sig(true), ["S".to_string()]).unwrap()
    }

    fn seeds(brs: &Brs, srcs: &[&str]) -> Vec<(String, Bigraph)> {
        srcs.iter()
            .enumerate()
            .map(|(i, s)| (format!("s{i}"), big(brs.signature(), s)))
            .collect()
    }

    #[test]
    fn marker_system_rules_map_onto_plain_system_rules() {
        let report = check_rule_preservation(&hide_s(), &selective(), &notify()).unwrap();
        assert!(report.preserved());
        let images: Vec<(&str, &str)> = report
            .entries
            .iter()
            .map(|e| (e.rule.as_str(), e.outcome.as_deref().unwrap()))
            .collect();
        assert_eq!(
            images,
            [("M1", "M1"), ("M2", "M2"), ("M3", "M3"), ("R2", "R1")]
        );
    }

    #[test]
    fn identity_functor_preserves_any_system() {
        let brs = notify();
        let f = HidingFunctor::identity(zone_sig(false));
        let report = check_rule_preservation(&f, &brs, &brs).unwrap();
        assert!(report.preserved());
        for e in &report.entries {
            assert_eq!(e.outcome.as_deref().unwrap(), e.rule);
        }
    }

    #[test]
    fn hiding_a_load_bearing_control_breaks_preservation() {
        let f = HidingFunctor::new(zone_sig(true), ["F".to_string()]).unwrap();
        let report = check_rule_preservation(&f, &selective(), &notify()).unwrap();
        assert!(!report.preserved());
        let m1 = report.entries.iter().find(|e| e.rule == "M1").unwrap();
        assert!(m1.outcome.is_err());
    }

    #[test]
    fn hidden_controls_with_children_in_rules_are_flagged() {
        let sig = Signature::new([
            Control::new("A", 0, Activity::Active),
            Control::new("H", 0, Activity::Active),
        ])
        .unwrap();
        let concrete = brs_of(sig.clone(), &["r: A.(H.A | $0) -> A.$0"]);
        let f = HidingFunctor::new(sig, ["H".to_string()]).unwrap();
        let target = brs_of(f.target(), &[]);
        let report = check_rule_preservation(&f, &concrete, &target).unwrap();
        assert!(report.entries[0]
            .outcome
            .as_ref()
            .unwrap_err()
            .contains("not a leaf"));
    }

    #[test]
    fn every_system_safely_refines_itself_under_identity() {
        let brs = notify();
        let f = HidingFunctor::identity(zone_sig(false));
        let seeds = seeds(&brs, &["Z.(U | F)"]);
        let report = check_safe(&f, &brs, &brs, &seeds, 3, 128, false).unwrap();
        assert_eq!(report.verdict, Verdict::HoldsUpToBound);
        assert!(!report.bounds.exceeded);
        assert!(report.safe_witness.is_none());
    }

    #[test]
    fn marker_system_safely_refines_plain_system() {
        let concrete = selective();
        let seeds = seeds(&concrete, &["Z.(U | F.S)", "Z.(U | F) | Z.nil"]);
        let report =
            check_safe(&hide_s(), &concrete, &notify(), &seeds, 3, 256, false).unwrap();
        assert_eq!(report.verdict, Verdict::HoldsUpToBound);
    }

    #[test]
    fn a_concrete_rule_with_no_abstract_image_refutes_safety() {
        let mut concrete = selective();
        concrete
            .add_rule_source(&parse_rule("X: Z.$0 -> Z.(N | $0)").unwrap())
            .unwrap();
        let seeds = seeds(&concrete, &["Z.nil"]);
        let report =
            check_safe(&hide_s(), &concrete, &notify(), &seeds, 1, 64, false).unwrap();
        assert_eq!(report.verdict, Verdict::Refuted);
        let w = report.safe_witness.unwrap();
        assert_eq!(w.rule, "X");
        assert_eq!(w.trace.len(), 2);
        assert!(w.images[1].iso(&big(&zone_sig(false), "Z.N")));
    }

    #[test]
    fn image_stuttering_refutes_unless_allowed() {
        let sig = zone_sig(true);
        let concrete = brs_of(sig.clone(), &["skip: Z.(S | $0) -> Z.$0"]);
        let f = hide_s();
        let abstract_brs = brs_of(f.target(), &[]);
        let seeds = seeds(&concrete, &["Z.(S | U)"]);

        let strict =
            check_safe(&f, &concrete, &abstract_brs, &seeds, 1, 64, false).unwrap();
        assert_eq!(strict.verdict, Verdict::Refuted);
        assert_eq!(strict.safe_witness.unwrap().rule, "skip");

        let lax = check_safe(&f, &concrete, &abstract_brs, &seeds, 1, 64, true).unwrap();
        assert_eq!(lax.verdict, Verdict::HoldsUpToBound);
    }

    #[test]
    fn hitting_the_state_cap_marks_the_bounds_exceeded() {
        let brs = notify();
        let f = HidingFunctor::identity(zone_sig(false));
        let seeds = seeds(&brs, &["Z.(U | F)"]);
        let report = check_safe(&f, &brs, &brs, &seeds, 6, 3, false).unwrap();
        assert_eq!(report.verdict, Verdict::HoldsUpToBound);
        assert!(report.bounds.exceeded);
    }

    #[test]
    fn unnotified_zone_refutes_liveness() {
        let concrete = selective();
        let abstract_brs = notify();
        let adm =
            AdmissibilityPattern::new(big(abstract_brs.signature(), "U | F | N"), abstract_brs.signature())
                .unwrap();
        let seeds = seeds(&concrete, &["Z.(U | F)"]);
        let report = check_live(
            &hide_s(),
            &concrete,
            &abstract_brs,
            &adm,
            &seeds,
            0,
            1,
            64,
        )
        .unwrap();
        assert_eq!(report.verdict, Verdict::Refuted);
        let w = report.live_witness.unwrap();
        assert_eq!(w.trace.len(), 1);
        assert_eq!(w.extension.len(), 1);
        assert!(w.extension[0].iso(&big(abstract_brs.signature(), "Z.(U | F | N)")));
    }

    #[test]
    fn marked_zone_mirrors_the_notification() {
        let concrete = selective();
        let abstract_brs = notify();
        let adm =
            AdmissibilityPattern::new(big(abstract_brs.signature(), "U | F | N"), abstract_brs.signature())
                .unwrap();
        let seeds = seeds(&concrete, &["Z.(U | F.S)"]);
        let report = check_live(
            &hide_s(),
            &concrete,
            &abstract_brs,
            &adm,
            &seeds,
            0,
            1,
            64,
        )
        .unwrap();
        assert_eq!(report.verdict, Verdict::HoldsUpToBound);
    }

    #[test]
    fn unsatisfiable_admissibility_holds_vacuously() {
        let concrete = selective();
        let abstract_brs = notify();
        let adm = AdmissibilityPattern::new(
            big(abstract_brs.signature(), "U.U"),
            abstract_brs.signature(),
        )
        .unwrap();
        let seeds = seeds(&concrete, &["Z.(U | F)"]);
        let report = check_live(
            &hide_s(),
            &concrete,
            &abstract_brs,
            &adm,
            &seeds,
            2,
            2,
            64,
        )
        .unwrap();
        assert_eq!(report.verdict, Verdict::HoldsUpToBound);
    }

    #[test]
    fn combined_check_reports_safe_holding_and_live_refuted() {
        let concrete = selective();
        let abstract_brs = notify();
        let adm =
            AdmissibilityPattern::new(big(abstract_brs.signature(), "U | F | N"), abstract_brs.signature())
                .unwrap();
        let seeds = seeds(&concrete, &["Z.(U | F)"]);
        let report = check_safe_and_live(
            &hide_s(),
            &concrete,
            &abstract_brs,
            &adm,
            &seeds,
            2,
            1,
            128,
            false,
        )
        .unwrap();
        assert_eq!(report.verdict, Verdict::Refuted);
        assert!(report.safe_witness.is_none());
        assert!(report.live_witness.is_some());
        assert_eq!(report.bounds.ext_depth, Some(1));
    }

    #[test]
    fn signature_mismatches_are_hard_errors() {
        let err = check_safe(
            &hide_s(),
            &notify(),
            &notify(),
            &[],
            1,
            16,
            false,
        )
        .unwrap_err();
        assert!(matches!(err, RefineError::SourceMismatch));

        let err = check_safe(
            &hide_s(),
            &selective(),
            &selective(),
            &[],
            1,
            16,
            false,
        )
        .unwrap_err();
        assert!(matches!(err, RefineError::TargetMismatch));
    }
}
