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

//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::time::{Duration, Instant};

use probsess::ast::{Participant, Process};
use probsess::kernel::Rational;
use probsess::query::{
    event_probability, monte_carlo, most_probable, parse_predicate, Classifier, McOptions, TracePredicate,
};
use probsess::semantics::{build_graph, enabled_steps, struct_equiv, ReductionGraph, Rule, StepLabel};
use probsess::syntax::{parse_local, parse_source, SourceFile};
use probsess::types::project;
use probsess::typing::{
    check_equiv_preservation, check_error_freedom, check_subject_reduction, gamma_of, open_state, perturb,
    random_system, typecheck, types_equiv, GenConfig, Generated, SortEnv, TypeErrorKind,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const QUERY: &str = "sent(as, \"The Art of War\") | sent(as, 0195014766) & chose(ab, quote/3)";
const SYSTEMS: usize = 500;
const PERTURBED: usize = 100;
const GRAPH_DEPTH: usize = 12;

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { ok: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { ok: false, detail: detail.into() }
}

fn check(cond: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok: cond, detail: detail.into() }
}

fn text(name: &str) -> String {
    std::fs::read_to_string(format!("{}/protocols/{}", env!("CARGO_MANIFEST_DIR"), name)).unwrap()
}

fn load(name: &str) -> SourceFile {
    parse_source(&text(name)).unwrap()
}

fn within(limit: Duration, start: Instant) -> Result<Duration, Outcome> {
    let t = start.elapsed();
    if t > limit {
        Err(fail(format!("took {:?}, limit {:?}", t, limit)))
    } else {
        Ok(t)
    }
}

fn typability() -> Outcome {
    let base = load("twobuyers.pmps");
    let mut times = Vec::new();
    for f in ["twobuyers.pmps", "twobuyers_variant.pmps"] {
        let start = Instant::now();
        let src = load(f);
        let (_, p) = src.system(None).unwrap();
        // Both against the global types declared in the original file.
        match typecheck(&gamma_of(&base.env), p) {
            Ok(t) if t.delta.is_end_only() => {}
            Ok(t) => return fail(format!("{} leaves {}", f, t.delta)),
            Err(e) => return fail(format!("{}: {}", f, e)),
        }
        match within(Duration::from_secs(1), start) {
            Ok(t) => times.push(t),
            Err(o) => return o,
        }
    }
    pass(format!("both systems typed against Books ({:?}, {:?})", times[0], times[1]))
}

fn two_buyers_graph() -> ReductionGraph {
    let src = load("twobuyers.pmps");
    build_graph(src.system(None).unwrap().1, 20)
}

fn exact_query() -> Outcome {
    let start = Instant::now();
    let g = two_buyers_graph();
    let r = match event_probability(&g, &parse_predicate(QUERY).unwrap()) {
        Ok(r) => r,
        Err(e) => return fail(e.to_string()),
    };
    if let Err(o) = within(Duration::from_secs(1), start) {
        return o;
    }
    check(r.exact() == Some(&Rational::new(7, 50)), format!("{} in {:?}", r, start.elapsed()))
}

fn likeliest_class() -> Outcome {
    let start = Instant::now();
    let g = two_buyers_graph();
    let pred = |s: &str| parse_predicate(s).unwrap();
    let books = Classifier::new(vec![
        ("War and Peace".into(), pred("sent(as, \"War and Peace\")")),
        ("The Art of War".into(), pred("sent(as, \"The Art of War\") | sent(as, 0195014766)")),
    ]);
    let shares = Classifier::new(
        ["quote/2", "quote/3", "quote/4"].iter().map(|q| (q.to_string(), pred(&format!("chose(ab, {})", q)))).collect(),
    );
    let m = match most_probable(&g, &books.product(&shares)) {
        Ok(m) => m,
        Err(e) => return fail(e.to_string()),
    };
    if let Err(o) = within(Duration::from_secs(1), start) {
        return o;
    }
    let ok =
        m.probability == Rational::new(7, 25) && m.winners == ["The Art of War, quote/2", "The Art of War, quote/4"];
    check(ok, format!("{} shared by {}", m.probability.to_report_string(), m.winners.join(" and ")))
}

fn projection() -> Outcome {
    let src = load("twobuyers.pmps");
    let t = match project(src.global("Books").unwrap(), Participant(1)) {
        Ok(t) => t,
        Err(u) => return fail(u.to_string()),
    };
    let expected = parse_local(
        "[0.7,0.9]: as!<string>. as?(int). 1: ab!<int>. end + [0.15,0.25]: as!<nat>. as?(int). 1: ab!<int>. end",
    )
    .unwrap();
    check(types_equiv(&t, &expected), format!("{}", t))
}

fn reduction() -> Outcome {
    let extra = r#"
system Running = AliceBody | SellerBody | BobBody;
proc Alice3 = as?(quote: int);
    (0.4: ab!<quote / 2>; 0 + 0.2: ab!<quote / 3>; 0 + 0.4: ab!<quote / 4>; 0);
proc Seller2 = 1: as!<int(120)>; 1: bs!<int(120)>; Deliver;
system AfterIsbn = Alice3 | Seller2 | BobBody;
"#;
    let src = parse_source(&(text("twobuyers.pmps") + extra)).unwrap();
    let running = src.system(Some("Running")).unwrap().1;
    let expected = src.system(Some("AfterIsbn")).unwrap().1;
    match enabled_steps(running).iter().find(|s| struct_equiv(&s.target, expected)) {
        Some(s) => check(
            s.label.probability == Rational::new(1, 5) && s.label.rules == [Rule::Com, Rule::Par1],
            format!("step {} with probability {}", s.label.rules_text(), s.label.probability.to_fraction_string()),
        ),
        None => fail("no step reaches the state after the ISBN exchange"),
    }
}

struct Corpus {
    systems: Vec<(SortEnv, Generated)>,
    time: Duration,
}

fn corpus() -> Corpus {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2026);
    let cfg = GenConfig::default();
    let systems = (0..SYSTEMS)
        .map(|_| {
            let g = random_system(&mut rng, cfg);
            (gamma_of(&[(g.shared.clone(), g.global.clone())]), g)
        })
        .collect();
    Corpus { systems, time: start.elapsed() }
}

fn subject_reduction(c: &Corpus) -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for (gamma, g) in &c.systems {
        if let Err(e) = typecheck(gamma, &g.system) {
            return fail(format!("generated system is not typable: {}\n{}", e, g.global));
        }
        let r = check_subject_reduction(gamma, &g.system, GRAPH_DEPTH);
        if !r.passed() {
            return fail(format!("{}\nglobal type: {}", r, g.global));
        }
        checked += r.checked;
    }
    if let Err(o) = within(Duration::from_secs(300), start) {
        return o;
    }
    pass(format!("{} systems, {} steps, 0 counterexamples in {:?}", c.systems.len(), checked, start.elapsed() + c.time))
}

fn error_freedom(c: &Corpus) -> Outcome {
    let mut steps = 0;
    for (_, g) in &c.systems {
        let r = check_error_freedom(&g.system, GRAPH_DEPTH);
        if !r.passed() {
            return fail(r.to_string());
        }
        steps += r.checked;
    }
    let mut perturbed = 0;
    for (gamma, g) in &c.systems {
        if perturbed == PERTURBED {
            break;
        }
        let Some(bad) = perturb(&g.system) else { continue };
        perturbed += 1;
        match typecheck(gamma, &bad) {
            Err(e) if e.kind == TypeErrorKind::ProbabilitySum => {}
            Err(e) => return fail(format!("perturbed system rejected for the wrong reason: {}", e)),
            Ok(_) => return fail("a perturbed system type-checks"),
        }
        let graph = build_graph(&bad, GRAPH_DEPTH);
        if !graph.edges.iter().any(|e| e.label.is_error()) {
            return fail("a perturbed system has no error step");
        }
    }
    if perturbed < PERTURBED {
        return fail(format!("only {} systems could be perturbed", perturbed));
    }
    pass(format!(
        "{} systems, {} steps without error; {} perturbed systems rejected, each with an error step",
        c.systems.len(),
        steps,
        perturbed
    ))
}

fn equiv_preservation(c: &Corpus) -> Outcome {
    let mut terms = 0;
    let mut rewrites = 0;
    for (gamma, g) in &c.systems {
        // The system and its states after the session is opened.
        let graph = build_graph(&g.system, 1);
        let mut subjects = vec![(gamma.clone(), g.system.clone())];
        subjects.extend(graph.nodes.iter().skip(1).filter(|n| !n.is_error()).map(|n| open_state(gamma, &n.process)));
        for (gm, p) in &subjects {
            let r = check_equiv_preservation(gm, p);
            if !r.passed() {
                return fail(r.to_string());
            }
            terms += 1;
            rewrites += r.checked;
        }
    }
    check(
        terms >= SYSTEMS,
        format!("{} well-typed terms, {} single-rule rewrites, identical environments", terms, rewrites),
    )
}

/// Path-enumeration oracle: unfolds the graph into a tree and, at each
/// node, lets the scheduler pick the family that is best for `maximize`.
fn oracle(g: &ReductionGraph, pred: &TracePredicate, maximize: bool) -> Rational {
    fn go(g: &ReductionGraph, n: usize, path: &mut Vec<StepLabel>, pred: &TracePredicate, maximize: bool) -> Rational {
        let fams = g.families(n);
        if fams.is_empty() {
            return if pred.eval_path(path.iter()) { Rational::one() } else { Rational::zero() };
        }
        let mut best: Option<Rational> = None;
        for fam in fams {
            let mut sum = Rational::zero();
            for e in fam {
                path.push(e.label.clone());
                sum = &sum + &(&e.label.probability * &go(g, e.to, path, pred, maximize));
                path.pop();
            }
            best = Some(match best {
                None => sum,
                Some(b) if (sum > b) == maximize => sum,
                Some(b) => b,
            });
        }
        best.expect("non-empty")
    }
    go(g, g.root, &mut Vec::new(), pred, maximize)
}

fn path_count(g: &ReductionGraph, n: usize, memo: &mut Vec<Option<u128>>) -> u128 {
    if let Some(c) = memo[n] {
        return c;
    }
    let out: Vec<usize> = g.out_edges(n).map(|e| e.to).collect();
    let c = if out.is_empty() { 1 } else { out.into_iter().map(|m| path_count(g, m, memo)).sum() };
    memo[n] = Some(c);
    c
}

fn random_atom(rng: &mut ChaCha8Rng, labels: &[&StepLabel]) -> TracePredicate {
    let l = labels[rng.gen_range(0..labels.len())];
    let a = &l.actions[rng.gen_range(0..l.actions.len())];
    let text = match rng.gen_range(0..4) {
        0 if !a.values.is_empty() => {
            let vs: Vec<String> = a.values.iter().map(|v| v.to_string()).collect();
            format!("sent({}, {})", a.chan, vs.join(", "))
        }
        1 if a.rule == Rule::Label => format!("label({}, {})", a.chan, a.text),
        2 => format!("rule({})", l.rules[rng.gen_range(0..l.rules.len())].name()),
        _ => match a.sender {
            Some(p) => format!("role({})", p.0),
            None => "true".to_string(),
        },
    };
    parse_predicate(&text).unwrap_or_else(|e| panic!("{}: {}", text, e))
}

fn random_predicate(rng: &mut ChaCha8Rng, labels: &[&StepLabel], depth: u32) -> TracePredicate {
    if depth == 0 || rng.gen_bool(0.3) {
        return random_atom(rng, labels);
    }
    match rng.gen_range(0..3) {
        0 => TracePredicate::not(random_predicate(rng, labels, depth - 1)),
        1 => TracePredicate::and(random_predicate(rng, labels, depth - 1), random_predicate(rng, labels, depth - 1)),
        _ => TracePredicate::or(random_predicate(rng, labels, depth - 1), random_predicate(rng, labels, depth - 1)),
    }
}

fn oracle_equivalence(c: &Corpus) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut single, mut racing) = (0, 0);
    let mut ranges = 0;
    let mut max_paths = 0;
    // Single sessions are deterministic; two systems sharing one name race
    // for acceptors, which leaves choices to the scheduler.
    let singles = c.systems.iter().map(|(_, g)| g.system.clone());
    let races = c.systems.chunks(2).map(|w| Process::par(w[0].1.system.clone(), w[1].1.system.clone()));
    for (is_race, p) in singles.map(|p| (false, p)).chain(races.map(|p| (true, p))) {
        if (!is_race && single == 50) || (is_race && racing == 50) {
            continue;
        }
        let graph = build_graph(&p, GRAPH_DEPTH);
        if graph.nodes.iter().any(|n| n.truncated || n.is_error()) || graph.has_cycle() {
            continue;
        }
        let paths = path_count(&graph, graph.root, &mut vec![None; graph.nodes.len()]);
        let labels: Vec<&StepLabel> = graph.edges.iter().map(|e| &e.label).filter(|l| !l.actions.is_empty()).collect();
        if paths > 10_000 || labels.is_empty() {
            continue;
        }
        if is_race {
            racing += 1;
        } else {
            single += 1;
        }
        max_paths = max_paths.max(paths);
        for _ in 0..3 {
            let pred = random_predicate(&mut rng, &labels, 3);
            let r = match event_probability(&graph, &pred) {
                Ok(r) => r,
                Err(e) => return fail(e.to_string()),
            };
            let (lo, hi) = (oracle(&graph, &pred, false), oracle(&graph, &pred, true));
            if r.lo() != &lo || r.hi() != &hi {
                return fail(format!("{}: dynamic programming gives {}, paths give [{}, {}]", pred, r, lo, hi));
            }
            if lo != hi {
                ranges += 1;
            }
        }
    }
    check(
        single + racing == 100 && ranges > 0,
        format!(
            "{} single-session and {} racing graphs (at most {} paths), 3 predicates each, {} scheduler ranges, all equal",
            single, racing, max_paths, ranges
        ),
    )
}

fn monte_carlo_sanity() -> Outcome {
    let src = load("twobuyers.pmps");
    let p: &Process = src.system(None).unwrap().1;
    let pred = parse_predicate(QUERY).unwrap();
    let one = monte_carlo(p, &pred, McOptions { runs: 10_000, seed: 0, max_steps: 1_000 });
    if (one.estimate - 0.14).abs() > 0.02 {
        return fail(format!("estimate {:.4} with seed 0", one.estimate));
    }
    let mut inside = 0;
    for seed in 1..=100 {
        let r = monte_carlo(p, &pred, McOptions { runs: 10_000, seed, max_steps: 1_000 });
        if (r.estimate - 0.14).abs() <= 5.0 * r.stderr {
            inside += 1;
        }
    }
    check(
        inside >= 99,
        format!("seed 0 gives {:.4} ± {:.4}; {}/100 seeds within 5 standard errors", one.estimate, one.stderr, inside),
    )
}

fn main() {
    let c = corpus();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("golden protocol typability", Box::new(typability)),
        ("exact query 7/50", Box::new(exact_query)),
        ("most probable class 7/25 with tie", Box::new(likeliest_class)),
        ("projection golden", Box::new(projection)),
        ("reduction golden", Box::new(reduction)),
        ("subject reduction at scale", Box::new(|| subject_reduction(&c))),
        ("error freedom", Box::new(|| error_freedom(&c))),
        ("structural equivalence preservation", Box::new(|| equiv_preservation(&c))),
        ("oracle equivalence", Box::new(|| oracle_equivalence(&c))),
        ("Monte Carlo sanity", Box::new(monte_carlo_sanity)),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        if !o.ok {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {} ({:.1?}) - {}",
            i + 1,
            if o.ok { "PASS" } else { "FAIL" },
            name,
            start.elapsed(),
            o.detail
        );
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
