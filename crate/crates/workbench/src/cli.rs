//! Argument shapes and command bodies.
//!
//! Every command returns an `Outcome` carrying the text for stdout and the
//! process exit code: 0 for a check that holds up to its bound, 1 for a
//! refutation, 3 when a state bound was exceeded without refutation. Errors
//! (I/O, syntax, elaboration, bad flags) exit 2 via `CmdError`.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use bigraph::engine::{ExploreError, StateSpace};
use bigraph::refine::{
    check_live, check_rule_preservation, check_safe, check_safe_and_live, AdmissibilityPattern,
    HidingFunctor, PreservationReport, RefinementReport, Verdict,
};
use bigraph::Bigraph;
use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::brsfile::{self, BrsFile, LoadError};
use crate::report::{self, agent_text, Meta};

#[derive(Parser)]
#[command(
    name = "bigraph-workbench",
    version,
    about = "Define bigraphical reactive systems, run them, and check vertical refinements"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Load a definition file and summarize what it declares
    Parse {
        file: PathBuf,
    },
    /// Print an agent's canonical term and interface
    Show {
        file: PathBuf,
        agent: String,
    },
    /// List the agents reachable from a seed, level by level
    React {
        file: PathBuf,
        agent: String,
        /// Number of reaction steps to explore
        #[arg(long, default_value_t = 1)]
        steps: usize,
        #[arg(long, default_value_t = 1024)]
        max_states: usize,
    },
    /// Enumerate every trace from a seed up to a depth
    Traces {
        file: PathBuf,
        agent: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 1024)]
        max_states: usize,
    },
    /// Check that concrete traces map onto abstract traces
    CheckSafe {
        #[command(flatten)]
        pair: Pair,
        #[command(flatten)]
        bounds: BoundArgs,
        /// Accept unrealized steps whose images are iso
        #[arg(long)]
        allow_stutter: bool,
        #[command(flatten)]
        out: ReportArg,
    },
    /// Check that every concrete rule's image is an abstract rule
    CheckFunctor {
        #[command(flatten)]
        pair: Pair,
        #[command(flatten)]
        out: ReportArg,
    },
    /// Check that abstract routes to admissibility have concrete matches
    CheckLive {
        #[command(flatten)]
        pair: Pair,
        /// Admissibility pattern, named in the abstract file
        #[arg(long)]
        admissible: String,
        #[command(flatten)]
        bounds: BoundArgs,
        /// Extension depth for abstract continuations
        #[arg(long, default_value_t = 1)]
        ext_depth: usize,
        #[command(flatten)]
        out: ReportArg,
    },
    /// Run the safe and live checks together
    Check {
        #[command(flatten)]
        pair: Pair,
        /// Admissibility pattern, named in the abstract file
        #[arg(long)]
        admissible: String,
        #[command(flatten)]
        bounds: BoundArgs,
        /// Extension depth for abstract continuations
        #[arg(long, default_value_t = 1)]
        ext_depth: usize,
        /// Accept unrealized steps whose images are iso
        #[arg(long)]
        allow_stutter: bool,
        #[command(flatten)]
        out: ReportArg,
    },
}

#[derive(Args)]
pub struct Pair {
    /// Abstract definition file
    #[arg(value_name = "ABSTRACT")]
    pub abstract_file: PathBuf,
    /// Concrete definition file
    #[arg(value_name = "CONCRETE")]
    pub concrete_file: PathBuf,
    /// Controls to hide; overrides the concrete file's functor block
    #[arg(long, value_delimiter = ',')]
    pub hide: Vec<String>,
}

#[derive(Args)]
pub struct BoundArgs {
    /// Seed agents, named in the concrete file (default: all of them)
    #[arg(long)]
    pub seed: Vec<String>,
    /// Exploration depth in reaction steps
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
    #[arg(long, default_value_t = 1024)]
    pub max_states: usize,
}

#[derive(Args)]
pub struct ReportArg {
    /// Also write the structured report document here
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
}

pub struct Outcome {
    pub text: String,
    pub code: u8,
}

impl Outcome {
    fn ok(text: String) -> Outcome {
        Outcome { text, code: 0 }
    }
}

#[derive(Debug, Error)]
pub enum CmdError {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Report {
        path: PathBuf,
        source: std::io::Error,
    },
}

pub fn run(cmd: &Command) -> Result<Outcome, CmdError> {
    match cmd {
        Command::Parse { file } => cmd_parse(file),
        Command::Show { file, agent } => cmd_show(file, agent),
        Command::React {
            file,
            agent,
            steps,
            max_states,
        } => cmd_react(file, agent, *steps, *max_states),
        Command::Traces {
            file,
            agent,
            depth,
            max_states,
        } => cmd_traces(file, agent, *depth, *max_states),
        Command::CheckSafe {
            pair,
            bounds,
            allow_stutter,
            out,
        } => {
            let ctx = Ctx::new(pair, &bounds.seed)?;
            let r = check_safe(
                &ctx.functor,
                &ctx.conc.brs,
                &ctx.abs.brs,
                &ctx.seeds,
                bounds.depth,
                bounds.max_states,
                *allow_stutter,
            )
            .map_err(|e| CmdError::Usage(e.to_string()))?;
            ctx.refinement_outcome("check-safe", None, &r, out)
        }
        Command::CheckFunctor { pair, out } => {
            let ctx = Ctx::new(pair, &[])?;
            let r = check_rule_preservation(&ctx.functor, &ctx.conc.brs, &ctx.abs.brs)
                .map_err(|e| CmdError::Usage(e.to_string()))?;
            ctx.preservation_outcome(&r, out)
        }
        Command::CheckLive {
            pair,
            admissible,
            bounds,
            ext_depth,
            out,
        } => {
            let ctx = Ctx::new(pair, &bounds.seed)?;
            let adm = ctx.admissible(admissible)?;
            let r = check_live(
                &ctx.functor,
                &ctx.conc.brs,
                &ctx.abs.brs,
                adm,
                &ctx.seeds,
                bounds.depth,
                *ext_depth,
                bounds.max_states,
            )
            .map_err(|e| CmdError::Usage(e.to_string()))?;
            ctx.refinement_outcome("check-live", Some(admissible), &r, out)
        }
        Command::Check {
            pair,
            admissible,
            bounds,
            ext_depth,
            allow_stutter,
            out,
        } => {
            let ctx = Ctx::new(pair, &bounds.seed)?;
            let adm = ctx.admissible(admissible)?;
            let r = check_safe_and_live(
                &ctx.functor,
                &ctx.conc.brs,
                &ctx.abs.brs,
                adm,
                &ctx.seeds,
                bounds.depth,
                *ext_depth,
                bounds.max_states,
                *allow_stutter,
            )
            .map_err(|e| CmdError::Usage(e.to_string()))?;
            ctx.refinement_outcome("check", Some(admissible), &r, out)
        }
    }
}

/// Everything a refinement check needs: both files, the effective functor,
/// and the resolved seed list.
struct Ctx {
    abs: BrsFile,
    conc: BrsFile,
    abs_path: String,
    conc_path: String,
    functor: HidingFunctor,
    seeds: Vec<(String, Bigraph)>,
}

impl Ctx {
    fn new(pair: &Pair, seed_names: &[String]) -> Result<Ctx, CmdError> {
        let abs = brsfile::load(&pair.abstract_file)?;
        let conc = brsfile::load(&pair.concrete_file)?;
        let functor = resolve_functor(&pair.hide, &conc)?;
        let seeds = resolve_seeds(&conc, seed_names)?;
        Ok(Ctx {
            abs,
            conc,
            abs_path: pair.abstract_file.display().to_string(),
            conc_path: pair.concrete_file.display().to_string(),
            functor,
            seeds,
        })
    }

    fn meta<'a>(&'a self, command: &'a str, admissible: Option<&'a str>) -> Meta<'a> {
        Meta {
            command,
            abstract_path: &self.abs_path,
            concrete_path: &self.conc_path,
            hidden: self.functor.hidden(),
            admissible,
        }
    }

    fn admissible(&self, name: &str) -> Result<&AdmissibilityPattern, CmdError> {
        self.abs.admissible_pattern(name).ok_or_else(|| {
            CmdError::Usage(format!(
                "no admissible pattern named `{name}` in {}",
                self.abs_path
            ))
        })
    }

    fn refinement_outcome(
        &self,
        command: &str,
        admissible: Option<&str>,
        r: &RefinementReport,
        out: &ReportArg,
    ) -> Result<Outcome, CmdError> {
        let meta = self.meta(command, admissible);
        write_report(out, || report::refinement_doc(&meta, r))?;
        let code = match r.verdict {
            Verdict::Refuted => 1,
            Verdict::HoldsUpToBound if r.bounds.exceeded => 3,
            Verdict::HoldsUpToBound => 0,
        };
        Ok(Outcome {
            text: report::refinement_human(&meta, r),
            code,
        })
    }

    fn preservation_outcome(
        &self,
        r: &PreservationReport,
        out: &ReportArg,
    ) -> Result<Outcome, CmdError> {
        let meta = self.meta("check-functor", None);
        write_report(out, || report::preservation_doc(&meta, r))?;
        Ok(Outcome {
            text: report::preservation_human(&meta, r),
            code: if r.preserved() { 0 } else { 1 },
        })
    }
}

/// The effective hide list: the CLI's when given, the concrete file's
/// functor block otherwise. A CLI list that contradicts a present block is
/// an error rather than a silent override.
fn resolve_functor(cli_hide: &[String], conc: &BrsFile) -> Result<HidingFunctor, CmdError> {
    let cli: BTreeSet<String> = cli_hide.iter().cloned().collect();
    let hidden = if cli_hide.is_empty() {
        conc.hidden.clone()
    } else if !conc.hidden.is_empty() && conc.hidden != cli {
        return Err(CmdError::Usage(format!(
            "--hide gives {{{}}} but the concrete file's functor block hides {{{}}}",
            join(&cli),
            join(&conc.hidden)
        )));
    } else {
        cli
    };
    HidingFunctor::new(conc.brs.signature().clone(), hidden)
        .map_err(|e| CmdError::Usage(e.to_string()))
}

fn resolve_seeds(
    conc: &BrsFile,
    names: &[String],
) -> Result<Vec<(String, Bigraph)>, CmdError> {
    if names.is_empty() {
        return Ok(conc.brs.seeds().to_vec());
    }
    names
        .iter()
        .map(|n| {
            conc.brs
                .seed(n)
                .map(|b| (n.clone(), b.clone()))
                .ok_or_else(|| CmdError::Usage(format!("no agent named `{n}` in the concrete file")))
        })
        .collect()
}

fn join(names: &BTreeSet<String>) -> String {
    names.iter().map(String::as_str).collect::<Vec<_>>().join(", ")
}

fn write_report(out: &ReportArg, doc: impl FnOnce() -> String) -> Result<(), CmdError> {
    if let Some(path) = &out.report {
        fs::write(path, doc()).map_err(|source| CmdError::Report {
            path: path.clone(),
            source,
        })?;
    }
    Ok(())
}

fn cmd_parse(file: &Path) -> Result<Outcome, CmdError> {
    let f = brsfile::load(file)?;
    let mut text = String::new();
    let controls: Vec<String> = f
        .brs
        .signature()
        .controls()
        .map(|c| format!("{}/{} {}", c.name, c.arity, c.activity))
        .collect();
    text.push_str(&format!("controls: {}\n", list_or_none(&controls, ", ")));
    let rules: Vec<String> = f.brs.rules().iter().map(|r| r.name().to_string()).collect();
    text.push_str(&format!("rules: {}\n", list_or_none(&rules, " ")));
    let agents: Vec<String> = f.brs.seeds().iter().map(|(n, _)| n.clone()).collect();
    text.push_str(&format!("agents: {}\n", list_or_none(&agents, " ")));
    let adm: Vec<String> = f.admissible.iter().map(|(n, _)| n.clone()).collect();
    text.push_str(&format!("admissible: {}\n", list_or_none(&adm, " ")));
    let hides: Vec<String> = f.hidden.iter().cloned().collect();
    text.push_str(&format!(
        "functor: {}\n",
        if hides.is_empty() {
            "identity".to_string()
        } else {
            format!("hide {}", hides.join(" "))
        }
    ));
    Ok(Outcome::ok(text))
}

fn list_or_none(items: &[String], sep: &str) -> String {
    if items.is_empty() {
        "(none)".to_string()
    } else {
        items.join(sep)
    }
}

fn cmd_show(file: &Path, agent: &str) -> Result<Outcome, CmdError> {
    let f = brsfile::load(file)?;
    let b = lookup(&f, agent)?;
    Ok(Outcome::ok(format!(
        "agent: {agent}\nterm: {}\ninterface: {} -> {}\n",
        agent_text(b),
        b.inner(),
        b.outer()
    )))
}

fn cmd_react(file: &Path, agent: &str, steps: usize, max_states: usize) -> Result<Outcome, CmdError> {
    let f = brsfile::load(file)?;
    let b = lookup(&f, agent)?;
    let space = match StateSpace::explore(&f.brs, b, steps, max_states) {
        Ok(space) => space,
        Err(e) => return explore_failure(e),
    };
    let mut text = String::new();
    for level in 0..=steps {
        let mut terms: Vec<String> = (0..space.states().len())
            .filter(|&i| space.distance(i) == level)
            .map(|i| agent_text(&space.states()[i]))
            .collect();
        if terms.is_empty() {
            break;
        }
        terms.sort();
        for t in terms {
            text.push_str(&format!("step {level}: {t}\n"));
        }
    }
    Ok(Outcome::ok(text))
}

fn cmd_traces(file: &Path, agent: &str, depth: usize, max_states: usize) -> Result<Outcome, CmdError> {
    let f = brsfile::load(file)?;
    let b = lookup(&f, agent)?;
    let space = match StateSpace::explore(&f.brs, b, depth, max_states) {
        Ok(space) => space,
        Err(e) => return explore_failure(e),
    };
    let mut text = String::new();
    for (i, t) in space.traces().iter().enumerate() {
        let line: Vec<String> = t.agents().iter().map(agent_text).collect();
        text.push_str(&format!("{i}: {}\n", line.join(" -> ")));
    }
    Ok(Outcome::ok(text))
}

fn explore_failure(e: ExploreError) -> Result<Outcome, CmdError> {
    match e {
        ExploreError::StateCapExceeded { max_states } => Ok(Outcome {
            text: format!("state bound exceeded ({max_states} states); raise --max-states\n"),
            code: 3,
        }),
        other => Err(CmdError::Usage(other.to_string())),
    }
}

fn lookup<'f>(f: &'f BrsFile, agent: &str) -> Result<&'f Bigraph, CmdError> {
    f.brs
        .seed(agent)
        .ok_or_else(|| CmdError::Usage(format!("no agent named `{agent}` in the file")))
}
