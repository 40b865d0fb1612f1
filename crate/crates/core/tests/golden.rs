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

use probsess::ast::Participant;
use probsess::kernel::Rational;
use probsess::query::{event_probability, most_probable, parse_predicate, Classifier};
use probsess::semantics::{build_graph, enabled_steps, struct_equiv, Rule};
use probsess::syntax::{parse_local, parse_source, SourceFile};
use probsess::types::{project, simplify_global};
use probsess::typing::{
    check_equiv_preservation, check_error_freedom, check_subject_reduction, gamma_of, open_state, type_reduce,
    typecheck, types_equiv, SessionEnv, TypeError, TypeErrorKind, Typing,
};

fn load(name: &str) -> SourceFile {
    let path = format!("{}/protocols/{}", env!("CARGO_MANIFEST_DIR"), name);
    parse_source(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn protocols_parse() {
    for f in ["twobuyers.pmps", "twobuyers_variant.pmps"] {
        let src = load(f);
        assert!(src.system(None).is_ok());
        assert!(src.global("Books").is_some());
    }
}

#[test]
fn two_buyers_graph_is_finite() {
    let src = load("twobuyers.pmps");
    let (_, p) = src.system(Some("TwoBuyers")).unwrap();
    let g = build_graph(p, 40);
    assert!(!g.has_cycle());
    assert!(g.nodes.iter().all(|n| !n.truncated && !n.is_error()));
    for n in &g.nodes {
        for m in g.family_mass(n.id) {
            assert!(m.is_one(), "{:?}", m);
        }
    }
}

const ART_OF_WAR_QUOTE_3: &str = "sent(as, \"The Art of War\") | sent(as, 0195014766) & chose(ab, quote/3)";

#[test]
fn art_of_war_with_a_third_is_seven_fiftieths() {
    let src = load("twobuyers.pmps");
    let (_, p) = src.system(None).unwrap();
    let g = build_graph(p, 20);
    let r = event_probability(&g, &parse_predicate(ART_OF_WAR_QUOTE_3).unwrap()).unwrap();
    assert_eq!(r.exact(), Some(&Rational::new(7, 50)));
}

#[test]
fn most_probable_choice_is_a_tie() {
    let src = load("twobuyers.pmps");
    let (_, p) = src.system(None).unwrap();
    let g = build_graph(p, 20);
    let pred = |s: &str| parse_predicate(s).unwrap();
    let books = Classifier::new(vec![
        ("War and Peace".into(), pred("sent(as, \"War and Peace\")")),
        ("The Art of War".into(), pred("sent(as, \"The Art of War\") | sent(as, 0195014766)")),
    ]);
    let shares = Classifier::new(
        ["quote/2", "quote/3", "quote/4"].iter().map(|q| (q.to_string(), pred(&format!("chose(ab, {})", q)))).collect(),
    );
    let m = most_probable(&g, &books.product(&shares)).unwrap();
    assert_eq!(m.probability, Rational::new(7, 25));
    assert_eq!(m.winners, vec!["The Art of War, quote/2", "The Art of War, quote/4"]);
}

fn typecheck_system(file: &str) -> Result<Typing, TypeError> {
    let src = load(file);
    let (_, p) = src.system(None).unwrap();
    typecheck(&gamma_of(&src.env), p)
}

#[test]
fn two_buyers_is_well_typed() {
    let t = typecheck_system("twobuyers.pmps").unwrap();
    assert!(t.delta.is_empty(), "{}", t.delta);
}

#[test]
fn variant_is_well_typed_against_the_same_global_type() {
    let t = typecheck_system("twobuyers_variant.pmps").unwrap();
    assert!(t.delta.is_empty(), "{}", t.delta);
}

fn load_with(name: &str, extra: &str) -> SourceFile {
    let path = format!("{}/protocols/{}", env!("CARGO_MANIFEST_DIR"), name);
    let text = std::fs::read_to_string(path).unwrap() + extra;
    parse_source(&text).unwrap()
}

const AFTER_ISBN: &str = r#"
system Running = AliceBody | SellerBody | BobBody;
proc Alice3 = as?(quote: int);
    (0.4: ab!<quote / 2>; 0 + 0.2: ab!<quote / 3>; 0 + 0.4: ab!<quote / 4>; 0);
proc Seller2 = 1: as!<int(120)>; 1: bs!<int(120)>; Deliver;
system AfterIsbn = Alice3 | Seller2 | BobBody;
"#;

#[test]
fn isbn_step_has_probability_one_fifth() {
    let src = load_with("twobuyers.pmps", AFTER_ISBN);
    let (_, running) = src.system(Some("Running")).unwrap();
    let (_, expected) = src.system(Some("AfterIsbn")).unwrap();
    let steps = enabled_steps(running);
    let hit =
        steps.iter().find(|s| struct_equiv(&s.target, expected)).expect("a step to the state after the ISBN exchange");
    assert_eq!(hit.label.probability, Rational::new(1, 5));
    assert_eq!(hit.label.rules, vec![Rule::Com, Rule::Par1]);
}

#[test]
fn projection_onto_the_first_buyer() {
    let src = load("twobuyers.pmps");
    let t = project(src.global("Books").unwrap(), Participant(1)).unwrap();
    let expected = parse_local(
        "[0.7,0.9]: as!<string>. as?(int). 1: ab!<int>. end + [0.15,0.25]: as!<nat>. as?(int). 1: ab!<int>. end",
    )
    .unwrap();
    assert!(types_equiv(&t, &expected), "{}", t);
}

#[test]
fn simplifying_before_projecting_gives_equivalent_local_types() {
    for f in ["twobuyers.pmps", "twobuyers_variant.pmps"] {
        let src = load(f);
        for name in ["Deal", "Books"] {
            let g = src.global(name).unwrap();
            let s = simplify_global(g);
            for q in g.pid() {
                let (a, b) = (project(g, q).unwrap(), project(&s, q).unwrap());
                assert!(types_equiv(&a, &b), "{} {} onto {}: {} vs {}", f, name, q, a, b);
            }
        }
    }
}

#[test]
fn skewed_alice_is_rejected_for_its_sum() {
    // 0.3 + 0.5 + 0.3 over the three books.
    let src = load("twobuyers.pmps");
    let text = std::fs::read_to_string(format!("{}/protocols/twobuyers.pmps", env!("CARGO_MANIFEST_DIR")))
        .unwrap()
        .replace("+ 0.2: as!<0195014766>", "+ 0.3: as!<0195014766>");
    let bad = parse_source(&text).unwrap();
    let (_, p) = bad.system(None).unwrap();
    let err = typecheck(&gamma_of(&src.env), p).unwrap_err();
    assert_eq!(err.kind, TypeErrorKind::ProbabilitySum);
}

#[test]
fn projected_environment_reduces_at_the_declared_intervals() {
    let src = load("twobuyers.pmps");
    let books = src.global("Books").unwrap();
    let s: Vec<String> = vec!["ab".into(), "as".into(), "bs".into()];
    let mut delta = SessionEnv::new();
    for q in books.pid() {
        delta.insert(s.clone(), q, project(books, q).unwrap());
    }
    let mut intervals: Vec<String> = type_reduce(&delta).iter().map(|t| t.interval.to_string()).collect();
    intervals.sort();
    assert_eq!(intervals, vec!["[0.15,0.25]", "[0.7,0.9]"]);
}

#[test]
fn linked_environment_reduces_at_the_chosen_probabilities() {
    let src = load("twobuyers.pmps");
    let (_, p) = src.system(None).unwrap();
    let g = build_graph(p, 1);
    let linked = g.out_edges(g.root).next().unwrap().to;
    let (gamma, open) = open_state(&gamma_of(&src.env), &g.nodes[linked].process);
    let delta = typecheck(&gamma, &open).unwrap().delta;
    let mut intervals: Vec<String> = type_reduce(&delta).iter().map(|t| t.interval.to_string()).collect();
    intervals.sort();
    assert_eq!(intervals, vec!["0.2", "0.3", "0.5"]);
}

#[test]
fn running_protocol_satisfies_the_metatheory() {
    let src = load("twobuyers.pmps");
    let (_, p) = src.system(None).unwrap();
    let gamma = gamma_of(&src.env);
    for r in [check_subject_reduction(&gamma, p, 20), check_error_freedom(p, 20), check_equiv_preservation(&gamma, p)] {
        assert!(r.passed(), "{}", r);
        assert!(r.checked > 0);
    }
}
