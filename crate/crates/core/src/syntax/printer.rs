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

use crate::ast::{Chan, Participant, Process};
use crate::types::{GlobalType, LocalType, RoleNames};

/// Syntactic context of a term, loosest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Level {
    /// Continuation of a prefix: one prefix or an atom.
    Unit,
    /// Operand of `|` (or `,`): sums allowed.
    Sum,
    /// Anything.
    Top,
}

fn wrap(s: String, needed: bool) -> String {
    if needed {
        format!("({})", s)
    } else {
        s
    }
}

fn chan(c: &Chan) -> String {
    c.to_string()
}

pub fn print_process(p: &Process) -> String {
    proc(p, Level::Top)
}

fn proc(p: &Process, lvl: Level) -> String {
    match p {
        Process::Inact => "0".to_string(),
        Process::Error => "error".to_string(),
        Process::Var(x) => x.clone(),
        Process::Par(l, r) => wrap(format!("{} | {}", proc(l, Level::Top), proc(r, Level::Sum)), lvl < Level::Top),
        Process::Send { chan: c, branches } => {
            let parts: Vec<String> = branches
                .iter()
                .map(|b| {
                    let payload = b.exprs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", ");
                    format!("{}: {}!<{}>; {}", b.prob, chan(c), payload, proc(&b.cont, Level::Unit))
                })
                .collect();
            sum(parts, lvl)
        }
        Process::Recv { chan: c, branches } => {
            let parts: Vec<String> = branches
                .iter()
                .map(|b| {
                    let binders = b.binders.iter().map(|(x, s)| format!("{}: {}", x, s)).collect::<Vec<_>>().join(", ");
                    format!("{}?({}); {}", chan(c), binders, proc(&b.cont, Level::Unit))
                })
                .collect();
            sum(parts, lvl)
        }
        Process::Select { chan: c, branches } => {
            let parts: Vec<String> = branches
                .iter()
                .map(|b| format!("{}: {} <+ {}; {}", b.prob, chan(c), b.label, proc(&b.cont, Level::Unit)))
                .collect();
            sum(parts, lvl)
        }
        Process::Branch { chan: c, arms } => {
            let arms: Vec<String> =
                arms.iter().map(|a| format!("{}: {}", a.label, proc(&a.cont, Level::Top))).collect();
            format!("{} >> {{ {} }}", chan(c), arms.join(", "))
        }
        Process::Deleg { chan: c, payload, cont } => format!(
            "{}!!({}); {}",
            chan(c),
            payload.iter().map(chan).collect::<Vec<_>>().join(", "),
            proc(cont, Level::Unit)
        ),
        Process::SessRecv { chan: c, bound, cont } => {
            format!("{}??({}); {}", chan(c), bound.join(", "), proc(cont, Level::Unit))
        }
        Process::Request { shared, parties, chans, body } => wrap(
            format!("request {}[{}]({}). {}", shared, parties, chans.join(", "), proc(body, Level::Sum)),
            lvl == Level::Unit,
        ),
        Process::Accept { shared, role, chans, body } => wrap(
            format!("accept {}[{}]({}). {}", shared, role, chans.join(", "), proc(body, Level::Sum)),
            lvl == Level::Unit,
        ),
        Process::Hide { names, body } => {
            let binder = if names.len() == 1 { names[0].clone() } else { format!("({})", names.join(", ")) };
            wrap(format!("new {} in {}", binder, proc(body, Level::Sum)), lvl == Level::Unit)
        }
        Process::Rec { var, body } => wrap(format!("mu {}. {}", var, proc(body, Level::Sum)), lvl == Level::Unit),
        Process::If { cond, then_branch, else_branch } => wrap(
            format!("if {} then {} else {}", cond, proc(then_branch, Level::Sum), proc(else_branch, Level::Sum)),
            lvl == Level::Unit,
        ),
    }
}

fn sum(parts: Vec<String>, lvl: Level) -> String {
    let many = parts.len() > 1;
    wrap(parts.join(" + "), many && lvl == Level::Unit)
}

fn role(r: Participant, names: Option<&RoleNames>) -> String {
    match names {
        Some(n) => n.show(r),
        None => r.to_string(),
    }
}

pub fn print_global(g: &GlobalType, names: Option<&RoleNames>) -> String {
    global(g, Level::Top, names)
}

fn global(g: &GlobalType, lvl: Level, names: Option<&RoleNames>) -> String {
    match g {
        GlobalType::End => "end".to_string(),
        GlobalType::Var(t) => t.clone(),
        GlobalType::Par(l, r) => {
            wrap(format!("{} , {}", global(l, Level::Top, names), global(r, Level::Sum, names)), lvl < Level::Top)
        }
        GlobalType::Rec(t, body) => wrap(format!("mu {}. {}", t, global(body, Level::Sum, names)), lvl == Level::Unit),
        GlobalType::Values { from, to, chan, branches } => {
            let parts: Vec<String> = branches
                .iter()
                .map(|b| {
                    let sorts = b.sorts.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", ");
                    format!(
                        "{} ->{} {} : {}<{}>. {}",
                        role(*from, names),
                        b.interval,
                        role(*to, names),
                        chan,
                        sorts,
                        global(&b.cont, Level::Unit, names)
                    )
                })
                .collect();
            sum(parts, lvl)
        }
        GlobalType::Labels { from, to, chan, branches } => {
            let parts: Vec<String> = branches
                .iter()
                .map(|b| {
                    format!(
                        "{} ->{} {} : {} {{ {} : {} }}",
                        role(*from, names),
                        b.interval,
                        role(*to, names),
                        chan,
                        b.label,
                        global(&b.cont, Level::Top, names)
                    )
                })
                .collect();
            sum(parts, lvl)
        }
        GlobalType::Deleg { from, to, chan, carried, role: r, cont } => format!(
            "{} ->1 {} : {}<{} @ {}>. {}",
            role(*from, names),
            role(*to, names),
            chan,
            local(carried, Level::Sum, names),
            role(*r, names),
            global(cont, Level::Unit, names)
        ),
    }
}

pub fn print_local(t: &LocalType, names: Option<&RoleNames>) -> String {
    local(t, Level::Sum, names)
}

fn local(t: &LocalType, lvl: Level, names: Option<&RoleNames>) -> String {
    match t {
        LocalType::End => "end".to_string(),
        LocalType::Hole => "_".to_string(),
        LocalType::Var(x) => x.clone(),
        LocalType::Rec(x, body) => wrap(format!("mu {}. {}", x, local(body, Level::Sum, names)), lvl == Level::Unit),
        LocalType::Send { chan, branches } => {
            let parts: Vec<String> = branches
                .iter()
                .map(|b| {
                    let sorts = b.sorts.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", ");
                    format!("{}: {}!<{}>. {}", b.interval, chan.name, sorts, local(&b.cont, Level::Unit, names))
                })
                .collect();
            sum(parts, lvl)
        }
        LocalType::Recv { chan, branches } => {
            let parts: Vec<String> = branches
                .iter()
                .map(|b| {
                    let sorts = b.sorts.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", ");
                    format!("{}?({}). {}", chan.name, sorts, local(&b.cont, Level::Unit, names))
                })
                .collect();
            sum(parts, lvl)
        }
        LocalType::Deleg { chan, carried, role: r, cont } => format!(
            "{}!<{} @ {}>. {}",
            chan.name,
            local(carried, Level::Sum, names),
            role(*r, names),
            local(cont, Level::Unit, names)
        ),
        LocalType::SessRecv { chan, carried, role: r, cont } => format!(
            "{}?({} @ {}). {}",
            chan.name,
            local(carried, Level::Sum, names),
            role(*r, names),
            local(cont, Level::Unit, names)
        ),
        LocalType::Select { chan, branches } => {
            let parts: Vec<String> = branches
                .iter()
                .map(|b| format!("{} : {} : {}", b.interval, b.label, local(&b.cont, Level::Sum, names)))
                .collect();
            format!("{} (+) {{ {} }}", chan.name, parts.join(", "))
        }
        LocalType::Branch { chan, arms } => {
            let parts: Vec<String> =
                arms.iter().map(|b| format!("{} : {}", b.label, local(&b.cont, Level::Sum, names))).collect();
            format!("{} & {{ {} }}", chan.name, parts.join(", "))
        }
    }
}
