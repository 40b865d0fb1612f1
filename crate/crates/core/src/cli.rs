// Copyright 2026 The probsess Contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! The `pmps` command line.
//!
//! Human-readable output goes to stdout. With `--format records` every
//! result is one JSON object per line, with a `"kind"` field naming the
//! record type. Exit codes: 0 success, 1 a check or query failed, 2 the
//! input could not be read or parsed.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use crate::ast::{Participant, Process};
use crate::kernel::Rational;
use crate::query::{event_probability, monte_carlo, most_probable, parse_predicate, Classifier, McOptions, QueryKind};
use crate::semantics::{build_graph, enabled_steps, to_dot};
use crate::syntax::{parse_source, print_global, print_local, print_process, SourceFile};
use crate::types::{project, simplify_global, well_formed, GlobalType};
use crate::typing::{
    check_equiv_preservation, check_error_freedom, check_subject_reduction, check_substitution_weakening, gamma_of,
    open_state, typecheck, Report,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "pmps", version, about = "Probabilistic multiparty session toolchain")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Records,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check every global type and type-check every system.
    Check { file: PathBuf },
    /// Project a global type onto one participant.
    Project {
        file: PathBuf,
        /// Participant number or role name.
        #[arg(long)]
        role: String,
        /// Global type name; defaults to the first shared name's type.
        #[arg(long)]
        global: Option<String>,
    },
    /// Print the normal form of a global type.
    Simplify {
        file: PathBuf,
        #[arg(long)]
        global: Option<String>,
    },
    /// List the enabled steps of a process.
    Step(Target),
    /// Explore the reduction graph.
    Graph {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        depth: Depth,
        /// Write the graph in DOT format to this file.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Exact probability of a trace predicate, or the likeliest class.
    Prob {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        depth: Depth,
        #[arg(long, required_unless_present = "class", conflicts_with = "class")]
        query: Option<String>,
        /// A class of a partition, as NAME=QUERY; repeat for each class.
        #[arg(long)]
        class: Vec<String>,
    },
    /// Monte Carlo estimate of a trace predicate.
    Mc {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        query: String,
        #[arg(long, default_value_t = 10_000)]
        runs: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1_000)]
        max_steps: usize,
    },
    /// Run the metatheory harnesses on the reachable states.
    Meta {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        depth: Depth,
    },
}

#[derive(Debug, Args)]
pub struct Target {
    pub file: PathBuf,
    /// System or process name; defaults to the first system.
    #[arg(long)]
    pub process: Option<String>,
}

#[derive(Debug, Args)]
pub struct Depth {
    /// Exploration depth.
    #[arg(long, env = "PMPS_DEPTH", default_value_t = 20)]
    pub depth: usize,
}

/// An error that ends the invocation with an exit code.
struct Exit(i32, String);

impl Exit {
    fn input(msg: impl Into<String>) -> Exit {
        Exit(EXIT_INPUT, msg.into())
    }

    fn failure(msg: impl Into<String>) -> Exit {
        Exit(EXIT_FAILURE, msg.into())
    }
}

struct Out<'a> {
    format: Format,
    w: &'a mut dyn Write,
}

impl Out<'_> {
    fn emit(&mut self, human: impl AsRef<str>, record: Json) {
        let _ = match self.format {
            Format::Human => writeln!(self.w, "{}", human.as_ref()),
            Format::Records if record.is_null() => Ok(()),
            Format::Records => writeln!(self.w, "{}", record),
        };
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(stderr, "{}", e.render()) } else { write!(stdout, "{}", e.render()) };
            return code;
        }
    };
    let mut out = Out { format: cli.format, w: stdout };
    match execute(&cli.command, &mut out) {
        Ok(code) => code,
        Err(Exit(code, msg)) => {
            let _ = writeln!(stderr, "pmps: {}", msg);
            code
        }
    }
}

fn load(file: &PathBuf) -> Result<SourceFile, Exit> {
    let text = std::fs::read_to_string(file).map_err(|e| Exit::input(format!("{}: {}", file.display(), e)))?;
    parse_source(&text).map_err(|e| Exit::input(format!("{}:{}", file.display(), e)))
}

fn select_global<'a>(src: &'a SourceFile, name: Option<&str>) -> Result<(String, &'a GlobalType), Exit> {
    if let Some(n) = name {
        return src.global(n).map(|g| (n.to_string(), g)).ok_or_else(|| Exit::input(format!("no global type {}", n)));
    }
    if let Some((a, g)) = src.env.first() {
        let named = src.globals.iter().find(|(_, h)| h == g).map(|(n, _)| n.clone());
        return Ok((named.unwrap_or_else(|| a.clone()), g));
    }
    src.globals.last().map(|(n, g)| (n.clone(), g)).ok_or_else(|| Exit::input("the file declares no global type"))
}

fn select_process<'a>(src: &'a SourceFile, t: &Target) -> Result<(String, &'a Process), Exit> {
    src.system(t.process.as_deref()).map(|(n, p)| (n.to_string(), p)).map_err(Exit::input)
}

fn parse_role(src: &SourceFile, s: &str) -> Result<Participant, Exit> {
    if let Ok(n) = s.parse::<u32>() {
        return Ok(Participant(n));
    }
    src.roles.lookup(s).ok_or_else(|| Exit::input(format!("unknown role {}", s)))
}

fn rational_json(r: &Rational) -> Json {
    json!({ "exact": r.to_fraction_string(), "decimal": r.to_approx_string() })
}

fn execute(cmd: &Command, out: &mut Out) -> Result<i32, Exit> {
    match cmd {
        Command::Check { file } => check(&load(file)?, out),
        Command::Project { file, role, global } => {
            let src = load(file)?;
            let (name, g) = select_global(&src, global.as_deref())?;
            let q = parse_role(&src, role)?;
            match project(g, q) {
                Ok(t) => {
                    let text = print_local(&t, Some(&src.roles));
                    out.emit(&text, json!({ "kind": "projection", "global": name, "role": q.0, "type": text }));
                    Ok(EXIT_OK)
                }
                Err(u) => Err(Exit::failure(u.to_string())),
            }
        }
        Command::Simplify { file, global } => {
            let src = load(file)?;
            let (name, g) = select_global(&src, global.as_deref())?;
            let text = print_global(&simplify_global(g), Some(&src.roles));
            out.emit(&text, json!({ "kind": "simplified", "global": name, "type": text }));
            Ok(EXIT_OK)
        }
        Command::Step(t) => {
            let src = load(&t.file)?;
            let (_, p) = select_process(&src, t)?;
            let steps = enabled_steps(p);
            if steps.is_empty() {
                out.emit("no enabled steps", json!({ "kind": "stuck" }));
            }
            for s in &steps {
                let target = print_process(&s.target);
                out.emit(
                    format!("[{}] {} p={}: {}", s.label.family, s.label.rules_text(), s.label.probability, target),
                    json!({
                        "kind": "step",
                        "family": s.label.family,
                        "rules": s.label.rules.iter().map(|r| r.name()).collect::<Vec<_>>(),
                        "probability": rational_json(&s.label.probability),
                        "target": target,
                    }),
                );
            }
            Ok(EXIT_OK)
        }
        Command::Graph { target, depth, dot } => {
            let src = load(&target.file)?;
            let (name, p) = select_process(&src, target)?;
            let g = build_graph(p, depth.depth);
            if let Some(path) = dot {
                std::fs::write(path, to_dot(&g)).map_err(|e| Exit::failure(format!("{}: {}", path.display(), e)))?;
            }
            let truncated = g.nodes.iter().filter(|n| n.truncated).count();
            let errors = g.nodes.iter().filter(|n| n.is_error()).count();
            let terminal = g.nodes.iter().filter(|n| g.is_terminal(n.id)).count();
            out.emit(
                format!(
                    "{}: {} states, {} edges, {} final, {} truncated, {} error, {}",
                    name,
                    g.nodes.len(),
                    g.edges.len(),
                    terminal,
                    truncated,
                    errors,
                    if g.has_cycle() { "cyclic" } else { "acyclic" }
                ),
                json!({
                    "kind": "graph", "process": name, "states": g.nodes.len(), "edges": g.edges.len(),
                    "final": terminal, "truncated": truncated, "errors": errors, "cyclic": g.has_cycle(),
                }),
            );
            Ok(EXIT_OK)
        }
        Command::Prob { target, depth, query, class } => {
            let src = load(&target.file)?;
            let (_, p) = select_process(&src, target)?;
            let g = build_graph(p, depth.depth);
            if let Some(q) = query {
                let pred = parse_predicate(q).map_err(|e| Exit::input(format!("query: {}", e)))?;
                let r = event_probability(&g, &pred).map_err(|e| Exit::failure(e.to_string()))?;
                let record = match &r.kind {
                    QueryKind::Exact(x) => {
                        json!({ "kind": "probability", "query": q, "probability": rational_json(x) })
                    }
                    QueryKind::Range(lo, hi) => json!({
                        "kind": "probability", "query": q, "min": rational_json(lo), "max": rational_json(hi),
                    }),
                };
                out.emit(r.to_string(), record);
                if r.truncated_nodes > 0 && out.format == Format::Human {
                    out.emit(
                        format!("note: {} state(s) cut off at depth {}", r.truncated_nodes, depth.depth),
                        Json::Null,
                    );
                }
                return Ok(EXIT_OK);
            }
            let mut classes = Vec::new();
            for c in class {
                let (name, q) =
                    c.split_once('=').ok_or_else(|| Exit::input(format!("class {} is not NAME=QUERY", c)))?;
                let pred = parse_predicate(q).map_err(|e| Exit::input(format!("class {}: {}", name, e)))?;
                classes.push((name.trim().to_string(), pred));
            }
            let m = most_probable(&g, &Classifier::new(classes)).map_err(|e| Exit::failure(e.to_string()))?;
            for (name, pr) in &m.table {
                out.emit(
                    format!("{}: {}", name, pr.to_report_string()),
                    json!({ "kind": "class", "class": name, "probability": rational_json(pr) }),
                );
            }
            out.emit(
                format!(
                    "most probable: {} with {}{}",
                    m.winners.join(" | "),
                    m.probability.to_report_string(),
                    if m.is_tie() { " (tie)" } else { "" }
                ),
                json!({ "kind": "most_probable", "winners": m.winners, "probability": rational_json(&m.probability) }),
            );
            Ok(EXIT_OK)
        }
        Command::Mc { target, query, runs, seed, max_steps } => {
            let src = load(&target.file)?;
            let (_, p) = select_process(&src, target)?;
            let pred = parse_predicate(query).map_err(|e| Exit::input(format!("query: {}", e)))?;
            let r = monte_carlo(p, &pred, McOptions { runs: *runs, seed: *seed, max_steps: *max_steps });
            out.emit(
                format!(
                    "{:.4} ± {:.4} ({} runs, {} hits, {} divergent, {} errors, seed {})",
                    r.estimate, r.stderr, r.completed, r.hits, r.divergent, r.errors, seed
                ),
                json!({
                    "kind": "estimate", "query": query, "estimate": r.estimate, "stderr": r.stderr,
                    "runs": r.completed, "hits": r.hits, "divergent": r.divergent, "errors": r.errors, "seed": seed,
                }),
            );
            Ok(EXIT_OK)
        }
        Command::Meta { target, depth } => {
            let src = load(&target.file)?;
            let (name, p) = select_process(&src, target)?;
            let gamma = gamma_of(&src.env);
            if let Err(e) = typecheck(&gamma, p) {
                return Err(Exit::failure(format!("{} is not well typed: {}", name, e)));
            }
            let graph = build_graph(p, depth.depth);
            let states: Vec<_> =
                graph.nodes.iter().filter(|n| !n.is_error()).map(|n| open_state(&gamma, &n.process)).collect();
            let mut equiv = check_equiv_preservation(&gamma, p);
            for (g, q) in &states {
                equiv.merge(check_equiv_preservation(g, q));
            }
            let reports: Vec<Report> = vec![
                check_subject_reduction(&gamma, p, depth.depth),
                check_error_freedom(p, depth.depth),
                equiv,
                check_substitution_weakening(&states),
            ];
            let mut code = EXIT_OK;
            for r in &reports {
                if !r.passed() {
                    code = EXIT_FAILURE;
                }
                out.emit(
                    r.to_string(),
                    json!({
                        "kind": "meta", "harness": r.harness, "checked": r.checked, "passed": r.passed(),
                        "failures": r.failures.iter().map(|c| json!({ "process": c.subject, "detail": c.detail })).collect::<Vec<_>>(),
                    }),
                );
            }
            Ok(code)
        }
    }
}

fn check(src: &SourceFile, out: &mut Out) -> Result<i32, Exit> {
    let mut code = EXIT_OK;
    for (name, g) in &src.globals {
        match well_formed(g) {
            Ok(()) => {
                out.emit(format!("global {}: well formed", name), json!({ "kind": "global", "name": name, "ok": true }))
            }
            Err(issues) => {
                code = EXIT_FAILURE;
                let msgs: Vec<String> = issues.iter().map(|i| i.to_string()).collect();
                out.emit(
                    format!("global {}: ill formed\n  {}", name, msgs.join("\n  ")),
                    json!({ "kind": "global", "name": name, "ok": false, "issues": msgs }),
                );
            }
        }
    }
    let gamma = gamma_of(&src.env);
    for (name, p) in &src.systems {
        match typecheck(&gamma, p) {
            Ok(t) if t.delta.is_end_only() => {
                out.emit(
                    format!("system {}: well typed", name),
                    json!({ "kind": "system", "name": name, "ok": true, "warnings": t.warnings }),
                );
                for w in &t.warnings {
                    out.emit(format!("  warning: {}", w), Json::Null);
                }
            }
            Ok(t) => {
                code = EXIT_FAILURE;
                out.emit(
                    format!("system {}: open session channels remain: {}", name, t.delta),
                    json!({ "kind": "system", "name": name, "ok": false, "error": format!("open session channels: {}", t.delta) }),
                );
            }
            Err(e) => {
                code = EXIT_FAILURE;
                out.emit(
                    format!("system {}: {}", name, e),
                    json!({ "kind": "system", "name": name, "ok": false, "error": e.to_string() }),
                );
            }
        }
    }
    if src.systems.is_empty() {
        out.emit("no systems declared", json!({ "kind": "note", "text": "no systems declared" }));
    }
    Ok(code)
}
