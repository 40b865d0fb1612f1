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

//! Probability queries over reduction graphs.

pub mod exact;
pub mod monte_carlo;
pub mod predicate;

pub use exact::{event_probability, most_probable, Classifier, MostProbable, QueryError, QueryKind, QueryResult};
pub use monte_carlo::{monte_carlo, McOptions, McResult};
pub use predicate::{parse_predicate, Atom, TracePredicate};
