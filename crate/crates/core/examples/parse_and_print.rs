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

//! Parses a protocol file and prints every declaration back in concrete
//! syntax. Printing and parsing round-trip.

use probsess::syntax::{parse_process, parse_source, print_global, print_process};

fn main() {
    let path =
        std::env::args().nth(1).unwrap_or_else(|| format!("{}/protocols/twobuyers.pmps", env!("CARGO_MANIFEST_DIR")));
    let src = parse_source(&std::fs::read_to_string(&path).expect("readable file")).unwrap_or_else(|e| {
        eprintln!("{}:{}", path, e);
        std::process::exit(2);
    });
    for (name, g) in &src.globals {
        println!("global {} =\n    {};\n", name, print_global(g, Some(&src.roles)));
    }
    for (name, p) in &src.procs {
        let text = print_process(p);
        assert_eq!(&parse_process(&text).expect("printed text parses"), p);
        println!("proc {} =\n    {};\n", name, text);
    }
    for (name, p) in &src.systems {
        println!("system {} =\n    {};\n", name, print_process(p));
    }
}
