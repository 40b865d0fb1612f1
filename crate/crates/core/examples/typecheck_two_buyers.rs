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

//! Type-checks both buyer variants against the same global type, then shows
//! how an Alice whose probabilities do not add up to one is rejected.

use probsess::syntax::parse_source;
use probsess::typing::{gamma_of, typecheck};

fn load(name: &str) -> String {
    std::fs::read_to_string(format!("{}/protocols/{}", env!("CARGO_MANIFEST_DIR"), name)).unwrap()
}

fn main() {
    let base = parse_source(&load("twobuyers.pmps")).unwrap();
    let gamma = gamma_of(&base.env);
    for file in ["twobuyers.pmps", "twobuyers_variant.pmps"] {
        let src = parse_source(&load(file)).unwrap();
        let (name, p) = src.system(None).unwrap();
        match typecheck(&gamma, p) {
            Ok(t) => println!("{} in {}: well typed, remaining environment {}", name, file, t.delta),
            Err(e) => println!("{} in {}: {}", name, file, e),
        }
    }

    let skewed = load("twobuyers.pmps").replace("+ 0.2: as!<0195014766>", "+ 0.3: as!<0195014766>");
    let src = parse_source(&skewed).unwrap();
    let (_, p) = src.system(None).unwrap();
    match typecheck(&gamma, p) {
        Ok(_) => println!("skewed Alice: unexpectedly well typed"),
        Err(e) => println!("skewed Alice: {}", e),
    }
}
