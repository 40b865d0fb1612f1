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

//! Projects the two-buyer global type onto each participant, and shows the
//! diagnostic for a global type that has no projection.

use probsess::syntax::{parse_global, parse_source, print_local};
use probsess::types::{project, well_formed};

fn main() {
    let text = std::fs::read_to_string(format!("{}/protocols/twobuyers.pmps", env!("CARGO_MANIFEST_DIR"))).unwrap();
    let src = parse_source(&text).unwrap();
    let books = src.global("Books").unwrap();
    for q in books.pid() {
        let t = project(books, q).expect("projectable");
        println!("{}:\n    {}\n", src.roles.show(q), print_local(&t, Some(&src.roles)));
    }

    // Participant 3 cannot tell which branch 1 chose, yet must act
    // differently in each.
    let bad = parse_global(
        "1 ->[0.5,0.5] 2 : c<nat>. 3 ->1 4 : d<nat>. end + 1 ->[0.5,0.5] 2 : c<int>. 4 ->1 3 : d<nat>. end",
    )
    .unwrap();
    match well_formed(&bad) {
        Ok(()) => println!("unexpectedly well formed"),
        Err(issues) => {
            for i in issues {
                println!("ill formed: {}", i);
            }
        }
    }
}
