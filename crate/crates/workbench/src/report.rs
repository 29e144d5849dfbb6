//! Report rendering for the refinement checks.
//!
//! Every check produces two renderings from the same data: a short human
//! summary for stdout and a structured document of `field: value` lines for
//! `--report`. The document is deterministic, so identical inputs give
//! byte-identical files.

use std::collections::BTreeSet;

use bigraph::refine::{PreservationReport, RefinementReport};
use bigraph::term::{print_term, render};
use bigraph::Bigraph;

/// What the check was asked to do, for the report header.
pub struct Meta<'a> {
    pub command: &'a str,
    pub abstract_path: &'a str,
    pub concrete_path: &'a str,
    pub hidden: &'a BTreeSet<String>,
    pub admissible: Option<&'a str>,
}

/// Canonical term when one exists, full rendering otherwise.
pub fn agent_text(b: &Bigraph) -> String {
    print_term(b).unwrap_or_else(|_| render(b))
}

fn functor_text(hidden: &BTreeSet<String>) -> String {
    if hidden.is_empty() {
        "identity".to_string()
    } else {
        let names: Vec<&str> = hidden.iter().map(String::as_str).collect();
        format!("hide {}", names.join(" "))
    }
}

fn header(meta: &Meta) -> String {
    let mut s = String::new();
    s.push_str("format: 1\n");
    s.push_str(&format!("report: {}\n", meta.command));
    s.push_str(&format!("abstract: {}\n", meta.abstract_path));
    s.push_str(&format!("concrete: {}\n", meta.concrete_path));
    s.push_str(&format!("functor: {}\n", functor_text(meta.hidden)));
    if let Some(adm) = meta.admissible {
        s.push_str(&format!("admissible: {adm}\n"));
    }
    s
}

fn agent_lines(out: &mut String, agents: &[Bigraph], from: usize) {
    for (i, a) in agents.iter().enumerate() {
        out.push_str(&format!("  {}: {}\n", from + i, agent_text(a)));
    }
}

pub fn refinement_doc(meta: &Meta, r: &RefinementReport) -> String {
    let mut s = header(meta);
    if r.bounds.seeds.is_empty() {
        s.push_str("seeds: (none)\n");
    } else {
        s.push_str(&format!("seeds: {}\n", r.bounds.seeds.join(" ")));
    }
    s.push_str(&format!("depth: {}\n", r.bounds.depth));
    if let Some(d) = r.bounds.ext_depth {
        s.push_str(&format!("ext-depth: {d}\n"));
    }
    s.push_str(&format!("max-states: {}\n", r.bounds.max_states));
    s.push_str(&format!(
        "bound-exceeded: {}\n",
        if r.bounds.exceeded { "yes" } else { "no" }
    ));
    s.push_str(&format!("verdict: {}\n", r.verdict));
    if let Some(w) = &r.safe_witness {
        s.push_str(&format!("safe-witness-seed: {}\n", w.seed));
        s.push_str(&format!("safe-witness-rule: {}\n", w.rule));
        s.push_str("safe-witness-trace:\n");
        agent_lines(&mut s, &w.trace, 0);
        s.push_str("safe-witness-image:\n");
        agent_lines(&mut s, &w.images, 0);
    }
    if let Some(w) = &r.live_witness {
        s.push_str(&format!("live-witness-seed: {}\n", w.seed));
        s.push_str("live-witness-trace:\n");
        agent_lines(&mut s, &w.trace, 0);
        s.push_str("live-witness-extension:\n");
        agent_lines(&mut s, &w.extension, w.trace.len());
    }
    s
}

pub fn refinement_human(meta: &Meta, r: &RefinementReport) -> String {
    let mut s = String::new();
    let what = match meta.command {
        "check-safe" => "safe refinement",
        "check-live" => "live refinement",
        _ => "safe and live refinement",
    };
    s.push_str(&format!(
        "{what} ({} of {} via {}): {}\n",
        meta.concrete_path,
        meta.abstract_path,
        functor_text(meta.hidden),
        r.verdict
    ));
    s.push_str(&format!(
        "bounds: depth {}{}, max {} states{}\n",
        r.bounds.depth,
        match r.bounds.ext_depth {
            Some(d) => format!(", extension depth {d}"),
            None => String::new(),
        },
        r.bounds.max_states,
        if r.bounds.exceeded {
            " (exceeded; only the explored portion is covered)"
        } else {
            ""
        }
    ));
    if let Some(w) = &r.safe_witness {
        s.push_str(&format!(
            "concrete trace from seed `{}` whose image no abstract rule realizes (last step via `{}`):\n",
            w.seed, w.rule
        ));
        agent_lines(&mut s, &w.trace, 0);
        s.push_str("its image under the functor:\n");
        agent_lines(&mut s, &w.images, 0);
    }
    if let Some(w) = &r.live_witness {
        s.push_str(&format!(
            "concrete trace from seed `{}`:\n",
            w.seed
        ));
        agent_lines(&mut s, &w.trace, 0);
        s.push_str("admissible abstract extension with no concrete counterpart:\n");
        agent_lines(&mut s, &w.extension, w.trace.len());
    }
    s
}

fn image_lines(out: &mut String, r: &PreservationReport) {
    for e in &r.entries {
        match &e.outcome {
            Ok(image) => out.push_str(&format!("  {} -> {}\n", e.rule, image)),
            Err(why) => out.push_str(&format!("  {} -> ! {}\n", e.rule, why)),
        }
    }
}

pub fn preservation_doc(meta: &Meta, r: &PreservationReport) -> String {
    let mut s = header(meta);
    s.push_str(&format!(
        "verdict: {}\n",
        if r.preserved() { "holds" } else { "refuted" }
    ));
    s.push_str("rule-images:\n");
    image_lines(&mut s, r);
    s
}

pub fn preservation_human(meta: &Meta, r: &PreservationReport) -> String {
    let mut s = format!(
        "rule preservation ({} into {} via {}): {}\n",
        meta.concrete_path,
        meta.abstract_path,
        functor_text(meta.hidden),
        if r.preserved() { "holds" } else { "refuted" }
    );
    image_lines(&mut s, r);
    s
}
