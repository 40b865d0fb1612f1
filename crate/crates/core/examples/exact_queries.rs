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

//! Exact probabilities of trace properties of the two-buyer protocol, and
//! the likeliest outcome over books and contributions.

use probsess::query::{event_probability, most_probable, parse_predicate, Classifier};
use probsess::semantics::build_graph;
use probsess::syntax::parse_source;

fn main() {
    let text = std::fs::read_to_string(format!("{}/protocols/twobuyers.pmps", env!("CARGO_MANIFEST_DIR"))).unwrap();
    let src = parse_source(&text).unwrap();
    let (_, p) = src.system(None).unwrap();
    let g = build_graph(p, 20);

    for q in [
        "sent(as, \"The Art of War\") | sent(as, 0195014766) & chose(ab, quote/3)",
        "label(bs, quit)",
        "label(bs, ok1) | label(bs, ok2)",
        "sent(as, \"War and Peace\") & !label(bs, quit)",
    ] {
        let r = event_probability(&g, &parse_predicate(q).unwrap()).unwrap();
        println!("P[{}] = {}", q, r);
    }

    let pred = |s: &str| parse_predicate(s).unwrap();
    let books = Classifier::new(vec![
        ("War and Peace".into(), pred("sent(as, \"War and Peace\")")),
        ("The Art of War".into(), pred("sent(as, \"The Art of War\") | sent(as, 0195014766)")),
    ]);
    let shares = Classifier::new(
        ["quote/2", "quote/3", "quote/4"].iter().map(|q| (q.to_string(), pred(&format!("chose(ab, {})", q)))).collect(),
    );
    let m = most_probable(&g, &books.product(&shares)).unwrap();
    for (name, pr) in &m.table {
        println!("{:<28} {}", name, pr.to_report_string());
    }
    println!("most probable: {} with {}", m.winners.join(" and "), m.probability.to_report_string());
}
