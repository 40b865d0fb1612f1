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

//! Canonical forms for structural equivalence.
//!
//! A canonical process is a chain of hidings around a flat parallel
//! composition of components, none of which is `0`, a parallel composition
//! or a hiding. Inside prefixes the same normalisation applies recursively.

use std::collections::{BTreeMap, BTreeSet};

use crate::ast::{
    free_names, map_children, subst_chans, Chan, FreshNames, Name, Process, RecvBranch, SelectBranch, SendBranch,
};
use crate::syntax::print_process;

/// Normal form deciding structural equivalence on this calculus.
pub fn canonicalize(p: &Process) -> Process {
    let mut fresh = FreshNames::for_process(p);
    let (hides, comps) = flatten(p, &mut fresh);
    compose(hides, comps)
}

/// Alpha-invariant key of the canonical form of `p`.
pub fn alpha_key(p: &Process) -> String {
    key_of_canonical(&canonicalize(p))
}

pub fn struct_equiv(p: &Process, q: &Process) -> bool {
    alpha_key(p) == alpha_key(q)
}

/// Splits a canonical process into its hidden vectors and components.
pub fn decompose(p: &Process) -> (Vec<Vec<Name>>, Vec<Process>) {
    let mut hides = Vec::new();
    let mut cur = p;
    while let Process::Hide { names, body } = cur {
        hides.push(names.clone());
        cur = body;
    }
    let mut comps = Vec::new();
    collect_par(cur, &mut comps);
    (hides, comps)
}

fn collect_par(p: &Process, out: &mut Vec<Process>) {
    match p {
        Process::Par(l, r) => {
            collect_par(l, out);
            collect_par(r, out);
        }
        Process::Inact => {}
        other => out.push(other.clone()),
    }
}

/// Rebuilds `(ν h1)…(ν hk)(C1 | … | Cn)` with sorted components and hidings.
pub fn compose(mut hides: Vec<Vec<Name>>, mut comps: Vec<Process>) -> Process {
    let mut keyed: Vec<(String, Process)> = comps.drain(..).map(|c| (print_process(&c), c)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    let body = keyed.into_iter().map(|(_, c)| c).reduce(Process::par).unwrap_or(Process::Inact);
    hides.sort();
    hides.into_iter().rev().fold(body, |acc, names| Process::hide(names, acc))
}

fn names_of(hides: &[Vec<Name>]) -> BTreeSet<Name> {
    hides.iter().flatten().cloned().collect()
}

fn comps_free_names(comps: &[Process]) -> BTreeSet<Name> {
    comps.iter().flat_map(free_names).collect()
}

/// Renames the hidden vectors of `hides` selected by `clash` to fresh names
/// throughout `comps`.
fn rename_vectors(
    hides: &mut [Vec<Name>],
    comps: &mut [Process],
    fresh: &mut FreshNames,
    clash: impl Fn(&Name) -> bool,
) {
    let mut map: BTreeMap<Name, Chan> = BTreeMap::new();
    for v in hides.iter_mut() {
        if v.iter().any(&clash) {
            for n in v.iter_mut() {
                let m = fresh.fresh(n);
                map.insert(n.clone(), Chan::named(m.clone()));
                *n = m;
            }
        }
    }
    if !map.is_empty() {
        for c in comps.iter_mut() {
            *c = subst_chans(c, &map, fresh);
        }
    }
}

fn flatten(p: &Process, fresh: &mut FreshNames) -> (Vec<Vec<Name>>, Vec<Process>) {
    match p {
        Process::Inact => (vec![], vec![]),
        Process::Par(l, r) => {
            let (mut hl, mut cl) = flatten(l, fresh);
            let (mut hr, mut cr) = flatten(r, fresh);
            let left_names: BTreeSet<Name> = names_of(&hl).union(&comps_free_names(&cl)).cloned().collect();
            rename_vectors(&mut hr, &mut cr, fresh, |n| left_names.contains(n));
            let right_names: BTreeSet<Name> = comps_free_names(&cr);
            rename_vectors(&mut hl, &mut cl, fresh, |n| right_names.contains(n));
            hl.extend(hr);
            cl.extend(cr);
            (hl, cl)
        }
        Process::Hide { names, body } => {
            let (mut h, mut c) = flatten(body, fresh);
            let outer: BTreeSet<&Name> = names.iter().collect();
            rename_vectors(&mut h, &mut c, fresh, |n| outer.contains(n));
            let inner = names_of(&h);
            let used = comps_free_names(&c);
            if names.iter().any(|n| used.contains(n) && !inner.contains(n)) {
                h.insert(0, names.clone());
            }
            (h, c)
        }
        other => match canon_component(other, fresh) {
            Some(c) => (vec![], vec![c]),
            None => (vec![], vec![]),
        },
    }
}

fn canon_nested(p: &Process, fresh: &mut FreshNames) -> Process {
    let (h, c) = flatten(p, fresh);
    compose(h, c)
}

/// Normalises a single component; `None` when it is equivalent to `0`.
fn canon_component(p: &Process, fresh: &mut FreshNames) -> Option<Process> {
    let mapped = map_children(p, &mut |c| canon_nested(c, fresh));
    Some(match mapped {
        Process::Rec { body, .. } if body.is_inact() => return None,
        Process::Send { chan, mut branches } => {
            branches.sort_by_cached_key(send_key);
            Process::Send { chan, branches }
        }
        Process::Recv { chan, mut branches } => {
            branches.sort_by_cached_key(recv_key);
            Process::Recv { chan, branches }
        }
        Process::Select { chan, mut branches } => {
            branches.sort_by_cached_key(select_key);
            Process::Select { chan, branches }
        }
        Process::Branch { chan, mut arms } => {
            arms.sort_by(|a, b| a.label.cmp(&b.label));
            Process::Branch { chan, arms }
        }
        other => other,
    })
}

fn send_key(b: &SendBranch) -> String {
    format!("{}|{}|{}", b.prob, b.text, print_process(&b.cont))
}

fn recv_key(b: &RecvBranch) -> String {
    let sorts: Vec<String> = b.binders.iter().map(|(_, s)| s.to_string()).collect();
    format!("{}|{}", sorts.join(","), print_process(&b.cont))
}

fn select_key(b: &SelectBranch) -> String {
    format!("{}|{}|{}", b.label, b.prob, print_process(&b.cont))
}

// ---------------------------------------------------------------- alpha keys

/// Binding environment for keys: namespace, source name, printed label.
#[derive(Default)]
struct Env {
    stack: Vec<(char, String, String)>,
    depth: usize,
}

impl Env {
    fn push(&mut self, ns: char, name: &str) {
        self.depth += 1;
        let label = format!("%{}", self.depth);
        self.stack.push((ns, name.to_string(), label));
    }

    fn push_label(&mut self, ns: char, name: &str, label: String) {
        self.stack.push((ns, name.to_string(), label));
    }

    fn pop(&mut self, n: usize) {
        for _ in 0..n {
            let (_, _, label) = self.stack.pop().expect("balanced environment");
            if label.starts_with('%') && label[1..].parse::<usize>().is_ok() {
                self.depth -= 1;
            }
        }
    }

    fn get(&self, ns: char, name: &str) -> String {
        self.stack
            .iter()
            .rev()
            .find(|(k, n, _)| *k == ns && n == name)
            .map(|(_, _, l)| l.clone())
            .unwrap_or_else(|| name.to_string())
    }
}

/// Alpha-invariant key of a canonical process.
pub fn key_of_canonical(p: &Process) -> String {
    key(p, &mut Env::default())
}

fn chan_key(c: &Chan, env: &Env) -> String {
    match c.role {
        Some(r) => format!("{}@{}", env.get('n', &c.name), r),
        None => env.get('n', &c.name),
    }
}

fn key(p: &Process, env: &mut Env) -> String {
    match p {
        Process::Inact => "0".into(),
        Process::Error => "error".into(),
        Process::Var(x) => env.get('X', x),
        Process::Par(..) | Process::Hide { .. } => {
            let (h, c) = decompose(p);
            key_flat(&h, &c, env)
        }
        Process::Send { chan, branches } => {
            let c = chan_key(chan, env);
            let mut parts: Vec<String> = branches
                .iter()
                .map(|b| {
                    let mut es = String::new();
                    for (i, e) in b.exprs.iter().enumerate() {
                        if i > 0 {
                            es.push(',');
                        }
                        e.fmt_with(&mut es, &|x| env.get('v', x));
                    }
                    format!("{}:{}!<{}>;{}", b.prob, c, es, key(&b.cont, env))
                })
                .collect();
            parts.sort();
            format!("({})", parts.join("+"))
        }
        Process::Recv { chan, branches } => {
            let c = chan_key(chan, env);
            let mut parts: Vec<String> = branches
                .iter()
                .map(|b| {
                    for (x, _) in &b.binders {
                        env.push('v', x);
                    }
                    let sorts: Vec<String> = b.binders.iter().map(|(_, s)| s.to_string()).collect();
                    let k = format!("{}?({});{}", c, sorts.join(","), key(&b.cont, env));
                    env.pop(b.binders.len());
                    k
                })
                .collect();
            parts.sort();
            format!("({})", parts.join("+"))
        }
        Process::Select { chan, branches } => {
            let c = chan_key(chan, env);
            let mut parts: Vec<String> =
                branches.iter().map(|b| format!("{}:{}<+{};{}", b.prob, c, b.label, key(&b.cont, env))).collect();
            parts.sort();
            format!("({})", parts.join("+"))
        }
        Process::Branch { chan, arms } => {
            let c = chan_key(chan, env);
            let mut parts: Vec<String> = arms.iter().map(|a| format!("{}:{}", a.label, key(&a.cont, env))).collect();
            parts.sort();
            format!("{}>>{{{}}}", c, parts.join(","))
        }
        Process::Deleg { chan, payload, cont } => {
            let ps: Vec<String> = payload.iter().map(|c| chan_key(c, env)).collect();
            format!("{}!!({});{}", chan_key(chan, env), ps.join(","), key(cont, env))
        }
        Process::SessRecv { chan, bound, cont } => {
            let c = chan_key(chan, env);
            for n in bound {
                env.push('n', n);
            }
            let k = format!("{}??({});{}", c, bound.len(), key(cont, env));
            env.pop(bound.len());
            k
        }
        Process::Request { shared, parties, chans, body } => {
            let a = env.get('n', shared);
            for n in chans {
                env.push('n', n);
            }
            let k = format!("req {}[{}]({}).{}", a, parties, chans.len(), key(body, env));
            env.pop(chans.len());
            k
        }
        Process::Accept { shared, role, chans, body } => {
            let a = env.get('n', shared);
            for n in chans {
                env.push('n', n);
            }
            let k = format!("acc {}[{}]({}).{}", a, role, chans.len(), key(body, env));
            env.pop(chans.len());
            k
        }
        Process::If { cond, then_branch, else_branch } => {
            let mut c = String::new();
            cond.fmt_with(&mut c, &|x| env.get('v', x));
            format!("if {} then {} else {}", c, key(then_branch, env), key(else_branch, env))
        }
        Process::Rec { var, body } => {
            env.push('X', var);
            let k = format!("mu.{}", key(body, env));
            env.pop(1);
            k
        }
    }
}

/// Key of `(ν h1)…(ν hk)(C1 | … | Cn)`: components are ordered by their key
/// with hidden names blurred, hidden vectors by the components using them,
/// and the smallest resulting key over tied orders is taken.
fn key_flat(hides: &[Vec<Name>], comps: &[Process], env: &mut Env) -> String {
    if hides.is_empty() {
        let mut ks: Vec<String> = comps.iter().map(|c| key(c, env)).collect();
        ks.sort();
        return format!("[{}]", ks.join("|"));
    }
    let all: Vec<&Name> = hides.iter().flatten().collect();
    for n in &all {
        env.push_label('n', n, "%h".into());
    }
    let blurred: Vec<String> = comps.iter().map(|c| key(c, env)).collect();
    env.pop(all.len());

    let mut order: Vec<usize> = (0..comps.len()).collect();
    order.sort_by(|a, b| blurred[*a].cmp(&blurred[*b]));
    let uses: Vec<BTreeSet<Name>> = comps.iter().map(free_names).collect();

    // Candidate orders: permutations inside groups of equal blurred keys,
    // bounded.
    let mut candidates = vec![order.clone()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && blurred[order[end]] == blurred[order[start]] {
            end += 1;
        }
        if end - start > 1 {
            let mut next = Vec::new();
            for cand in &candidates {
                for perm in permutations(&cand[start..end]) {
                    let mut c = cand.clone();
                    c[start..end].copy_from_slice(&perm);
                    next.push(c);
                    if next.len() > 256 {
                        break;
                    }
                }
            }
            candidates = next;
        }
        start = end;
    }

    let mut best: Option<String> = None;
    for cand in candidates {
        // Vectors ordered by the positions of the components that use them.
        let mut vs: Vec<(Vec<Vec<usize>>, usize)> = hides
            .iter()
            .enumerate()
            .map(|(vi, v)| {
                let sig = v
                    .iter()
                    .map(|n| {
                        cand.iter().enumerate().filter(|(_, ci)| uses[**ci].contains(n)).map(|(pos, _)| pos).collect()
                    })
                    .collect();
                (sig, vi)
            })
            .collect();
        vs.sort();
        let mut pushed = 0;
        for (rank, (_, vi)) in vs.iter().enumerate() {
            for (j, n) in hides[*vi].iter().enumerate() {
                env.push_label('n', n, format!("%h{}.{}", rank, j));
                pushed += 1;
            }
        }
        let shapes: Vec<String> = vs.iter().map(|(_, vi)| hides[*vi].len().to_string()).collect();
        let ks: Vec<String> = cand.iter().map(|ci| key(&comps[*ci], env)).collect();
        env.pop(pushed);
        let k = format!("nu[{}][{}]", shapes.join(","), ks.join("|"));
        if best.as_ref().is_none_or(|b| k < *b) {
            best = Some(k);
        }
    }
    best.unwrap_or_default()
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
            if out.len() > 256 {
                return out;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_process;

    fn p(s: &str) -> Process {
        parse_process(s).unwrap()
    }

    #[test]
    fn par_with_inaction() {
        assert_eq!(canonicalize(&p("1: c!<1>; 0 | 0")), canonicalize(&p("1: c!<1>; 0")));
    }

    #[test]
    fn associativity_and_commutativity() {
        let a = "1: a!<1>; 0";
        let b = "b?(x: nat); 0";
        let c = "1: c!<true>; 0";
        let l = p(&format!("({} | {}) | {}", a, b, c));
        let r = p(&format!("{} | ({} | {})", a, b, c));
        assert_eq!(canonicalize(&l), canonicalize(&r));
        assert!(struct_equiv(&p(&format!("{} | {}", a, b)), &p(&format!("{} | {}", b, a))));
    }

    #[test]
    fn recursion_over_inaction() {
        assert_eq!(canonicalize(&p("mu X. 0")), Process::Inact);
    }

    #[test]
    fn hiding_swaps_and_extrudes() {
        let l = p("new n in new m in (1: n!<1>; 0 | m?(x: nat); 0)");
        let r = p("new m in new n in (1: n!<1>; 0 | m?(x: nat); 0)");
        assert!(struct_equiv(&l, &r));
        let ext = p("new n in (1: n!<1>; 0 | c?(x: nat); 0)");
        let inner = p("(new n in 1: n!<1>; 0) | c?(x: nat); 0");
        assert!(struct_equiv(&ext, &inner));
        assert!(struct_equiv(&p("new n in 0"), &Process::Inact));
    }

    #[test]
    fn extrusion_renames_to_avoid_capture() {
        // The free `n` on the right must not be captured.
        let q = p("(new n in 1: n!<1>; 0) | n?(x: nat); 0");
        let c = canonicalize(&q);
        assert!(free_names(&c).contains("n"), "{}", print_process(&c));
        assert!(!struct_equiv(&q, &p("new n in (1: n!<1>; 0 | n?(x: nat); 0)")));
    }

    #[test]
    fn alpha_renaming_is_invisible() {
        assert!(struct_equiv(&p("c?(x: nat); 1: d!<x>; 0"), &p("c?(y: nat); 1: d!<y>; 0")));
        assert!(struct_equiv(&p("new n in 1: n!<1>; 0"), &p("new k in 1: k!<1>; 0")));
        assert!(!struct_equiv(&p("c?(x: nat); 1: d!<x>; 0"), &p("c?(y: nat); 1: d!<z>; 0")));
    }

    #[test]
    fn sums_commute() {
        assert!(struct_equiv(&p("0.3: c!<1>; 0 + 0.7: c!<2>; 0"), &p("0.7: c!<2>; 0 + 0.3: c!<1>; 0")));
    }

    #[test]
    fn not_idempotent_par() {
        let a = p("1: c!<1>; 0");
        assert!(!struct_equiv(&a, &Process::par(a.clone(), a.clone())));
    }

    #[test]
    fn canonicalization_is_idempotent() {
        let q = p("new n in (1: n!<1>; 0 | (c?(x: nat); 0 | 0)) | mu X. 0");
        let c = canonicalize(&q);
        assert_eq!(canonicalize(&c), c);
    }
}
