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

use proptest::prelude::*;

use probsess::kernel::{interval_add, interval_contains, point, ProbInterval, Rational};
use probsess::query::{event_probability, monte_carlo, parse_predicate, McOptions, QueryKind, TracePredicate};
use probsess::semantics::{build_graph, canonicalize, struct_equiv, ReductionGraph, StepLabel};
use probsess::syntax::{parse_global, parse_process, print_global, print_process};
use probsess::types::{project, well_formed};
use probsess::typing::{
    envs_equiv, equiv_rewrites, gamma_of, perturb, random_system, typecheck, GenConfig, Generated, TypeErrorKind,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// ------------------------------------------------------------ process text

const CHANS: [&str; 3] = ["c", "d", "s"];

fn chan() -> impl Strategy<Value = &'static str> {
    prop::sample::select(&CHANS[..])
}

fn value() -> impl Strategy<Value = String> {
    prop_oneof![
        (0u32..100).prop_map(|n| n.to_string()),
        any::<bool>().prop_map(|b| b.to_string()),
        prop::sample::select(vec!["\"a\"", "\"War and Peace\""]).prop_map(str::to_string),
        (-50i32..50).prop_map(|n| format!("int({})", n)),
    ]
}

const DISTRIBUTIONS: [&[&str]; 3] = [&["1"], &["0.25", "0.75"], &["0.2", "0.3", "0.5"]];

fn process_text() -> impl Strategy<Value = String> {
    let leaf = Just("0".to_string());
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (chan(), prop::collection::vec((value(), inner.clone()), 1..=3)).prop_map(|(c, bs)| {
                let ps = DISTRIBUTIONS[bs.len() - 1];
                bs.iter()
                    .zip(ps)
                    .map(|((v, p), q)| format!("{}: {}!<{}>; ({})", q, c, v, p))
                    .collect::<Vec<_>>()
                    .join(" + ")
            }),
            (chan(), inner.clone(), inner.clone())
                .prop_map(|(c, p, q)| format!("{c}?(x: nat); ({p}) + {c}?(y: bool, z: string); ({q})")),
            (chan(), inner.clone(), inner.clone())
                .prop_map(|(c, p, q)| format!("0.25: {c} <+ left; ({p}) + 0.75: {c} <+ right; ({q})")),
            (chan(), inner.clone(), inner.clone()).prop_map(|(c, p, q)| format!("{c} >> {{ left: {p}, right: {q} }}")),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| format!("if 1 + 2 >= 3 then {p} else {q}")),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| format!("({p} | {q})")),
            (chan(), inner.clone()).prop_map(|(c, p)| format!("new {c} in ({p})")),
            (chan(), inner.clone()).prop_map(|(c, p)| format!("mu X. 1: {c}!<1>; ({p} | X)")),
            (chan(), inner.clone()).prop_map(|(c, p)| format!("{c}!!(t); ({p})")),
            (chan(), inner.clone()).prop_map(|(c, p)| format!("{c}??(t); ({p})")),
            inner.clone().prop_map(|p| format!("request a[2](s, t). ({p})")),
            inner.prop_map(|p| format!("accept a[2](s, t). ({p})")),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn printing_round_trips(text in process_text()) {
        let p = parse_process(&text).unwrap();
        let printed = print_process(&p);
        prop_assert_eq!(parse_process(&printed).unwrap(), p, "{}", printed);
    }

    #[test]
    fn canonicalization_is_idempotent(text in process_text()) {
        let c = canonicalize(&parse_process(&text).unwrap());
        prop_assert_eq!(canonicalize(&c), c);
    }

    #[test]
    fn congruence_rewrites_are_structurally_equivalent(text in process_text()) {
        let p = parse_process(&text).unwrap();
        for q in equiv_rewrites(&p) {
            prop_assert!(struct_equiv(&p, &q), "{}\n{}", print_process(&p), print_process(&q));
        }
    }
}

// ---------------------------------------------------------------- kernel

fn rational() -> impl Strategy<Value = Rational> {
    (-40i64..40, 1i64..40).prop_map(|(n, d)| Rational::new(n, d))
}

fn probability() -> impl Strategy<Value = Rational> {
    (0i64..=24).prop_map(|n| Rational::new(n, 24))
}

fn interval() -> impl Strategy<Value = ProbInterval> {
    (probability(), probability(), any::<bool>(), any::<bool>()).prop_map(|(a, b, lc, hc)| {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if lo == hi {
            point(lo).unwrap()
        } else {
            ProbInterval::new(lo, hi, lc, hc).unwrap()
        }
    })
}

proptest! {
    #[test]
    fn rationals_are_in_lowest_terms(n in -1000i64..1000, d in prop::sample::select(vec![-12i64, -7, -1, 1, 3, 8, 60])) {
        let r = Rational::new(n, d);
        prop_assert!(r.denom() > &0.into());
        let g = num::integer::gcd(r.numer().clone(), r.denom().clone());
        prop_assert!(g == 1.into() || r.is_zero());
        prop_assert_eq!(r.to_f64(), n as f64 / d as f64);
    }

    #[test]
    fn arithmetic_is_exact(a in rational(), b in rational(), c in rational()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &b, &b + &a);
    }

    #[test]
    fn fraction_strings_parse_back(a in rational()) {
        prop_assert_eq!(a.to_fraction_string().parse::<Rational>().unwrap(), a.clone());
        if let Some(d) = a.to_decimal_string() {
            prop_assert_eq!(d.parse::<Rational>().unwrap(), a);
        }
    }

    #[test]
    fn interval_sums_contain_sums_of_members(a in interval(), b in interval(), x in probability(), y in probability()) {
        let s = interval_add(&a, &b);
        prop_assert!(s.lo() <= s.hi());
        if interval_contains(&x, &a) && interval_contains(&y, &b) {
            prop_assert!(interval_contains(&(&x + &y).min(Rational::one()), &s));
        }
        if s.is_point() {
            prop_assert!(s.lo_closed() && s.hi_closed());
        }
    }
}

// ----------------------------------------------------- generated systems

fn small() -> GenConfig {
    GenConfig { max_nodes: 20, ..GenConfig::default() }
}

fn generated(seed: u64) -> Generated {
    random_system(&mut ChaCha8Rng::seed_from_u64(seed), small())
}

fn labels(g: &ReductionGraph) -> Vec<&StepLabel> {
    g.edges.iter().map(|e| &e.label).filter(|l| !l.actions.is_empty()).collect()
}

/// A random predicate over atoms that some step of `g` satisfies.
fn predicate(g: &ReductionGraph, rng: &mut ChaCha8Rng, depth: u32) -> TracePredicate {
    let ls = labels(g);
    if depth == 0 || rng.gen_bool(0.4) {
        let l = ls[rng.gen_range(0..ls.len())];
        let a = &l.actions[rng.gen_range(0..l.actions.len())];
        let text = if !a.values.is_empty() && rng.gen_bool(0.6) {
            let vs: Vec<String> = a.values.iter().map(|v| v.to_string()).collect();
            format!("sent({}, {})", a.chan, vs.join(", "))
        } else if let Some(p) = a.sender {
            format!("role({})", p.0)
        } else {
            format!("rule({})", l.rules[0].name())
        };
        return parse_predicate(&text).unwrap();
    }
    let (a, b) = (predicate(g, rng, depth - 1), predicate(g, rng, depth - 1));
    match rng.gen_range(0..3) {
        0 => TracePredicate::not(a),
        1 => TracePredicate::and(a, b),
        _ => TracePredicate::or(a, b),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_global_types_are_well_formed_and_print_back(seed in any::<u64>()) {
        let g = generated(seed);
        prop_assert!(well_formed(&g.global).is_ok());
        for q in g.global.pid() {
            prop_assert!(project(&g.global, q).is_ok());
        }
        let back = parse_global(&print_global(&g.global, None)).unwrap();
        prop_assert!(back.alpha_eq(&g.global));
    }

    #[test]
    fn generated_systems_are_well_typed_and_complete(seed in any::<u64>()) {
        let g = generated(seed);
        let gamma = gamma_of(&[(g.shared.clone(), g.global.clone())]);
        let t = typecheck(&gamma, &g.system).unwrap();
        prop_assert!(t.delta.is_end_only());
        let graph = build_graph(&g.system, 12);
        for n in &graph.nodes {
            prop_assert!(!n.is_error());
            for m in graph.family_mass(n.id) {
                prop_assert!(m.is_one());
            }
        }
    }

    #[test]
    fn typing_is_invariant_under_canonicalization(seed in any::<u64>()) {
        let g = generated(seed);
        let gamma = gamma_of(&[(g.shared.clone(), g.global.clone())]);
        let a = typecheck(&gamma, &g.system).unwrap();
        let b = typecheck(&gamma, &canonicalize(&g.system)).unwrap();
        prop_assert!(envs_equiv(&a.delta, &b.delta));
    }

    #[test]
    fn perturbed_systems_are_rejected_and_fail_at_run_time(seed in any::<u64>()) {
        let g = generated(seed);
        if let Some(bad) = perturb(&g.system) {
            let gamma = gamma_of(&[(g.shared.clone(), g.global.clone())]);
            prop_assert_eq!(typecheck(&gamma, &bad).unwrap_err().kind, TypeErrorKind::ProbabilitySum);
            prop_assert!(build_graph(&bad, 12).edges.iter().any(|e| e.label.is_error()));
        }
    }

    #[test]
    fn complement_and_monotonicity(seed in any::<u64>(), pseed in any::<u64>()) {
        let g = generated(seed);
        let graph = build_graph(&g.system, 12);
        prop_assume!(!labels(&graph).is_empty() && !graph.has_cycle());
        let mut rng = ChaCha8Rng::seed_from_u64(pseed);
        let (a, b) = (predicate(&graph, &mut rng, 2), predicate(&graph, &mut rng, 2));
        let p = |f: &TracePredicate| event_probability(&graph, f).unwrap();
        let (pa, na) = (p(&a), p(&TracePredicate::not(a.clone())));
        prop_assert_eq!(pa.lo() + na.hi(), Rational::one());
        prop_assert_eq!(pa.hi() + na.lo(), Rational::one());
        let (and, or) = (p(&TracePredicate::and(a.clone(), b.clone())), p(&TracePredicate::or(a, b)));
        prop_assert!(and.lo() <= pa.lo() && pa.lo() <= or.lo());
        prop_assert!(and.hi() <= pa.hi() && pa.hi() <= or.hi());
        let deterministic = graph.nodes.iter().all(|n| !graph.is_nondeterministic(n.id));
        prop_assert_eq!(matches!(pa.kind, QueryKind::Exact(_)), deterministic);
        prop_assert_eq!(pa.nondeterministic_nodes == 0, deterministic);
    }

    #[test]
    fn predicates_print_back(seed in any::<u64>(), pseed in any::<u64>()) {
        let graph = build_graph(&generated(seed).system, 12);
        prop_assume!(!labels(&graph).is_empty());
        let f = predicate(&graph, &mut ChaCha8Rng::seed_from_u64(pseed), 3);
        prop_assert_eq!(parse_predicate(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn sampling_is_reproducible(seed in any::<u64>(), mc_seed in any::<u64>()) {
        let g = generated(seed);
        let opts = McOptions { runs: 200, seed: mc_seed, max_steps: 100 };
        let a = monte_carlo(&g.system, &TracePredicate::True, opts);
        prop_assert_eq!(&a, &monte_carlo(&g.system, &TracePredicate::True, opts));
        prop_assert_eq!(a.estimate, 1.0);
        prop_assert_eq!(a.errors, 0);
    }
}
