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

//! Reduction semantics: structural congruence, one-step reduction and
//! finite reduction graphs.

pub mod canon;
pub mod dot;
pub mod graph;
pub mod step;

pub use canon::{alpha_key, canonicalize, compose, decompose, key_of_canonical, struct_equiv};
pub use dot::to_dot;
pub use graph::{build_graph, Edge, Node, NodeId, ReductionGraph};
pub use step::{enabled_steps, is_stuck, ActionInfo, Rule, Step, StepLabel};
