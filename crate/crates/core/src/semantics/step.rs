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

//! One-step probabilistic reduction.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::canon::{canonicalize, compose, decompose};
use crate::ast::{
    base_name, eval_expr, subst_chans, subst_values, unfold, Chan, FreshNames, Name, Participant, Process, Sort, Value,
};
use crate::kernel::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    Link,
    Com,
    Deleg,
    Label,
    IfT,
    IfF,
    Call,
    Scope,
    Par1,
    Par2,
    Struct,
    ECom,
    ELabel,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Link => "Link",
            Rule::Com => "Com",
            Rule::Deleg => "Deleg",
            Rule::Label => "Label",
            Rule::IfT => "IfT",
            Rule::IfF => "IfF",
            Rule::Call => "Call",
            Rule::Scope => "Scope",
            Rule::Par1 => "Par1",
            Rule::Par2 => "Par2",
            Rule::Struct => "Struct",
            Rule::ECom => "ECom",
            Rule::ELabel => "ELabel",
        }
    }

    pub fn parse(s: &str) -> Option<Rule> {
        [
            Rule::Link,
            Rule::Com,
            Rule::Deleg,
            Rule::Label,
            Rule::IfT,
            Rule::IfF,
            Rule::Call,
            Rule::Scope,
            Rule::Par1,
            Rule::Par2,
            Rule::Struct,
            Rule::ECom,
            Rule::ELabel,
        ]
        .into_iter()
        .find(|r| r.name().eq_ignore_ascii_case(s))
    }

    pub fn is_error(self) -> bool {
        matches!(self, Rule::ECom | Rule::ELabel)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What one redex did.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionInfo {
    pub rule: Rule,
    /// Source-level channel (or shared) name.
    pub chan: Name,
    /// Runtime channel name.
    pub runtime_chan: Name,
    pub sender: Option<Participant>,
    pub receiver: Option<Participant>,
    /// Index of the chosen send or select branch.
    pub branch: usize,
    /// Printed payload of the chosen send branch, or the selected label.
    pub text: String,
    pub values: Vec<Value>,
    pub sorts: Vec<Sort>,
    /// Probability of this redex's choice alone.
    pub probability: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepLabel {
    /// Derivation rules, the redex rules first.
    pub rules: Vec<Rule>,
    pub probability: Rational,
    pub actions: Vec<ActionInfo>,
    /// Edges of one node with the same family form one distribution.
    pub family: usize,
}

impl StepLabel {
    pub fn is_error(&self) -> bool {
        self.rules.iter().any(|r| r.is_error())
    }

    pub fn rules_text(&self) -> String {
        self.rules.iter().map(|r| r.name()).collect::<Vec<_>>().join("+")
    }
}

#[derive(Debug, Clone)]
pub struct Step {
    pub label: StepLabel,
    pub target: Process,
}

/// A redex over a set of components, with its possible outcomes.
#[derive(Debug, Clone)]
struct Redex {
    comps: Vec<usize>,
    outcomes: Vec<Outcome>,
    /// Probabilities of a matched sum do not add up to one.
    faulty: Option<Rule>,
}

#[derive(Debug, Clone)]
struct Outcome {
    prob: Rational,
    action: ActionInfo,
    /// Replacement for the redex components.
    result: Vec<Process>,
}

fn action(rule: Rule, chan: &Chan) -> ActionInfo {
    ActionInfo {
        rule,
        chan: base_name(&chan.name).to_string(),
        runtime_chan: chan.name.clone(),
        sender: None,
        receiver: None,
        branch: 0,
        text: String::new(),
        values: vec![],
        sorts: vec![],
        probability: Rational::one(),
    }
}

fn single_redex(i: usize, p: &Process) -> Option<Redex> {
    match p {
        Process::If { cond, then_branch, else_branch } => {
            let b = match eval_expr(cond, &BTreeMap::new()) {
                Ok(Value::Bool(b)) => b,
                _ => return None,
            };
            let rule = if b { Rule::IfT } else { Rule::IfF };
            let mut a = action(rule, &Chan::named(""));
            a.text = cond.to_string();
            let next = if b { then_branch } else { else_branch };
            Some(Redex {
                comps: vec![i],
                outcomes: vec![Outcome { prob: Rational::one(), action: a, result: vec![(**next).clone()] }],
                faulty: None,
            })
        }
        Process::Rec { var, body } => {
            let mut a = action(Rule::Call, &Chan::named(""));
            a.text = var.clone();
            Some(Redex {
                comps: vec![i],
                outcomes: vec![Outcome { prob: Rational::one(), action: a, result: vec![unfold(var, body)] }],
                faulty: None,
            })
        }
        _ => None,
    }
}

fn sum_is_one<'a>(ps: impl Iterator<Item = &'a Rational>) -> bool {
    ps.cloned().sum::<Rational>().is_one()
}

fn pair_redex(i: usize, p: &Process, j: usize, q: &Process, fresh: &mut FreshNames) -> Option<Redex> {
    match (p, q) {
        (Process::Send { chan, branches }, Process::Recv { chan: rc, branches: rbs }) if chan.name == rc.name => {
            let mut outcomes = Vec::new();
            for (k, b) in branches.iter().enumerate() {
                let values: Result<Vec<Value>, _> = b.exprs.iter().map(|e| eval_expr(e, &BTreeMap::new())).collect();
                let Ok(values) = values else { continue };
                let sorts: Vec<Sort> = values.iter().map(Value::sort).collect();
                let Some(rb) = rbs.iter().find(|rb| rb.sorts() == sorts) else { continue };
                let map: BTreeMap<String, Value> =
                    rb.binders.iter().map(|(x, _)| x.clone()).zip(values.iter().cloned()).collect();
                let mut a = action(Rule::Com, chan);
                a.sender = chan.role;
                a.receiver = rc.role;
                a.branch = k;
                a.text = b.text.clone();
                a.values = values;
                a.sorts = sorts;
                a.probability = b.prob.clone();
                outcomes.push(Outcome {
                    prob: b.prob.clone(),
                    action: a,
                    result: vec![b.cont.clone(), subst_values(&rb.cont, &map)],
                });
            }
            if outcomes.is_empty() {
                return None;
            }
            let faulty = (!sum_is_one(branches.iter().map(|b| &b.prob))).then_some(Rule::ECom);
            Some(Redex { comps: vec![i, j], outcomes, faulty })
        }
        (Process::Select { chan, branches }, Process::Branch { chan: bc, arms }) if chan.name == bc.name => {
            let mut outcomes = Vec::new();
            for (k, b) in branches.iter().enumerate() {
                let Some(arm) = arms.iter().find(|a| a.label == b.label) else { continue };
                let mut a = action(Rule::Label, chan);
                a.sender = chan.role;
                a.receiver = bc.role;
                a.branch = k;
                a.text = b.label.clone();
                a.probability = b.prob.clone();
                outcomes.push(Outcome {
                    prob: b.prob.clone(),
                    action: a,
                    result: vec![b.cont.clone(), arm.cont.clone()],
                });
            }
            if outcomes.is_empty() {
                return None;
            }
            let faulty = (!sum_is_one(branches.iter().map(|b| &b.prob))).then_some(Rule::ELabel);
            Some(Redex { comps: vec![i, j], outcomes, faulty })
        }
        (Process::Deleg { chan, payload, cont }, Process::SessRecv { chan: rc, bound, cont: rcont })
            if chan.name == rc.name && payload.len() == bound.len() =>
        {
            let map: BTreeMap<Name, Chan> = bound.iter().cloned().zip(payload.iter().cloned()).collect();
            let mut a = action(Rule::Deleg, chan);
            a.sender = chan.role;
            a.receiver = rc.role;
            a.text = payload.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ");
            Some(Redex {
                comps: vec![i, j],
                outcomes: vec![Outcome {
                    prob: Rational::one(),
                    action: a,
                    result: vec![(**cont).clone(), subst_chans(rcont, &map, fresh)],
                }],
                faulty: None,
            })
        }
        _ => None,
    }
}

/// All ways of completing a session request with one acceptor per role.
fn link_redexes(comps: &[Process], fresh: &mut FreshNames) -> Vec<Redex> {
    let mut out = Vec::new();
    for (i, p) in comps.iter().enumerate() {
        let Process::Request { shared, parties, chans, body } = p else { continue };
        let arity = chans.len();
        let mut per_role: Vec<Vec<usize>> = Vec::new();
        for q in 2..=*parties {
            let cands: Vec<usize> = comps
                .iter()
                .enumerate()
                .filter(|(_, c)| {
                    matches!(c, Process::Accept { shared: s, role, chans: cs, .. }
                        if s == shared && role.0 == q && cs.len() == arity)
                })
                .map(|(k, _)| k)
                .collect();
            per_role.push(cands);
        }
        if per_role.iter().any(Vec::is_empty) {
            continue;
        }
        for choice in cartesian(&per_role) {
            let names: Vec<Name> = chans.iter().map(|c| fresh.fresh(c)).collect();
            let mut parts = Vec::new();
            let bind = |binders: &[Name], role: u32, body: &Process, fresh: &mut FreshNames| {
                let map: BTreeMap<Name, Chan> = binders
                    .iter()
                    .cloned()
                    .zip(names.iter().map(|n| Chan::with_role(n.clone(), Participant(role))))
                    .collect();
                subst_chans(body, &map, fresh)
            };
            parts.push(bind(chans, 1, body, fresh));
            for &k in &choice {
                if let Process::Accept { role, chans: cs, body: b, .. } = &comps[k] {
                    parts.push(bind(cs, role.0, b, fresh));
                }
            }
            let mut a = action(Rule::Link, &Chan::named(shared.clone()));
            a.text = names.join(", ");
            let mut involved = vec![i];
            involved.extend(choice.iter().copied());
            out.push(Redex {
                comps: involved,
                outcomes: vec![Outcome {
                    prob: Rational::one(),
                    action: a,
                    result: vec![Process::hide(names.clone(), Process::par_all(parts))],
                }],
                faulty: None,
            });
        }
    }
    out
}

fn cartesian(lists: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut acc: Vec<Vec<usize>> = vec![vec![]];
    for l in lists {
        let mut next = Vec::new();
        for prefix in &acc {
            for &x in l {
                if !prefix.contains(&x) {
                    let mut v = prefix.clone();
                    v.push(x);
                    next.push(v);
                }
            }
        }
        acc = next;
    }
    acc
}

/// Maximal sets of pairwise disjoint redexes.
fn maximal_sets(redexes: &[Redex]) -> Vec<Vec<usize>> {
    let n = redexes.len();
    let conflict = |a: usize, b: usize| redexes[a].comps.iter().any(|c| redexes[b].comps.contains(c));
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    fn go(
        k: usize,
        n: usize,
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        conflict: &dyn Fn(usize, usize) -> bool,
    ) {
        if k == n {
            let maximal = (0..n).all(|r| chosen.contains(&r) || chosen.iter().any(|&c| conflict(c, r)));
            if maximal && !chosen.is_empty() {
                out.push(chosen.clone());
            }
            return;
        }
        if chosen.iter().all(|&c| !conflict(c, k)) {
            chosen.push(k);
            go(k + 1, n, chosen, out, conflict);
            chosen.pop();
        }
        go(k + 1, n, chosen, out, conflict);
    }
    go(0, n, &mut chosen, &mut out, &conflict);
    out
}

/// All one-step reducts of `p`, error steps included. Targets are
/// canonical.
pub fn enabled_steps(p: &Process) -> Vec<Step> {
    let canon = canonicalize(p);
    if matches!(canon, Process::Error) {
        return vec![];
    }
    let (hides, comps) = decompose(&canon);
    let mut fresh = FreshNames::for_process(&canon);

    let mut redexes: Vec<Redex> = Vec::new();
    for (i, c) in comps.iter().enumerate() {
        redexes.extend(single_redex(i, c));
    }
    for i in 0..comps.len() {
        for j in 0..comps.len() {
            if i != j {
                redexes.extend(pair_redex(i, &comps[i], j, &comps[j], &mut fresh));
            }
        }
    }
    redexes.extend(link_redexes(&comps, &mut fresh));

    let scoped = !hides.is_empty();
    let mut steps = Vec::new();
    let mut family = 0;
    for set in maximal_sets(&redexes) {
        let mut combos: Vec<(Rational, Vec<ActionInfo>, BTreeMap<usize, Vec<Process>>)> =
            vec![(Rational::one(), vec![], BTreeMap::new())];
        for &r in &set {
            let rx = &redexes[r];
            let mut next = Vec::new();
            for (prob, acts, repl) in &combos {
                for o in &rx.outcomes {
                    let mut acts = acts.clone();
                    acts.push(o.action.clone());
                    let mut repl = repl.clone();
                    repl.insert(rx.comps[0], o.result.clone());
                    for c in &rx.comps[1..] {
                        repl.insert(*c, vec![]);
                    }
                    next.push((prob * &o.prob, acts, repl));
                }
            }
            combos = next;
        }
        let used: BTreeSet<usize> = set.iter().flat_map(|&r| redexes[r].comps.iter().copied()).collect();
        let idle = comps.len() > used.len();
        for (prob, actions, repl) in combos {
            let mut new_comps = Vec::new();
            for (k, c) in comps.iter().enumerate() {
                match repl.get(&k) {
                    Some(rs) => new_comps.extend(rs.iter().cloned()),
                    None => new_comps.push(c.clone()),
                }
            }
            let mut rules: Vec<Rule> = actions.iter().map(|a| a.rule).collect();
            if set.len() > 1 {
                rules.push(Rule::Par2);
            } else if idle {
                rules.push(Rule::Par1);
            }
            if scoped {
                rules.push(Rule::Scope);
            }
            let target = canonicalize(&compose(hides.clone(), new_comps));
            steps.push(Step { label: StepLabel { rules, probability: prob, actions, family }, target });
        }
        family += 1;
    }
    for rx in &redexes {
        if let Some(rule) = rx.faulty {
            let mut a = rx.outcomes[0].action.clone();
            a.rule = rule;
            a.probability = Rational::one();
            steps.push(Step {
                label: StepLabel { rules: vec![rule], probability: Rational::one(), actions: vec![a], family },
                target: Process::Error,
            });
            family += 1;
        }
    }
    steps
}

/// No reduction, error steps included, is enabled.
pub fn is_stuck(p: &Process) -> bool {
    enabled_steps(p).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::canon::struct_equiv;
    use crate::syntax::parse_process;

    fn p(s: &str) -> Process {
        parse_process(s).unwrap()
    }

    #[test]
    fn inaction_is_stuck() {
        assert!(enabled_steps(&Process::Inact).is_empty());
        assert!(is_stuck(&p("c?(x: nat); 0")));
    }

    #[test]
    fn communication_substitutes() {
        let steps = enabled_steps(&p("0.25: c!<1>; 0 + 0.75: c!<true>; 0 | c?(x: nat); 1: d!<x>; 0 + c?(b: bool); 0"));
        assert_eq!(steps.len(), 2);
        let s = steps.iter().find(|s| s.label.probability == Rational::new(1, 4)).unwrap();
        assert!(struct_equiv(&s.target, &p("1: d!<1>; 0")));
        assert_eq!(s.label.rules, vec![Rule::Com]);
    }

    #[test]
    fn par1_keeps_idle_components() {
        let steps = enabled_steps(&p("1: c!<1>; 0 | c?(x: nat); 0 | e?(y: nat); 0"));
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].label.rules, vec![Rule::Com, Rule::Par1]);
        assert!(struct_equiv(&steps[0].target, &p("e?(y: nat); 0")));
    }

    #[test]
    fn par2_fires_independent_redexes_together() {
        let steps = enabled_steps(&p(
            "0.5: c!<1>; 0 + 0.5: c!<2>; 0 | c?(x: nat); 0 | 0.2: d <+ l; 0 + 0.8: d <+ r; 0 | d >> { l: 0, r: 0 }",
        ));
        assert_eq!(steps.len(), 4);
        assert!(steps.iter().all(|s| s.label.rules.contains(&Rule::Par2)));
        let total: Rational = steps.iter().map(|s| s.label.probability.clone()).sum();
        assert!(total.is_one());
    }

    #[test]
    fn faulty_sum_errors() {
        let steps = enabled_steps(&p("0.5: c!<1>; 0 + 0.4: c!<2>; 0 | c?(x: nat); 0"));
        assert!(steps.iter().any(|s| s.label.rules == vec![Rule::ECom] && s.target == Process::Error));
    }

    #[test]
    fn link_opens_a_session() {
        let steps =
            enabled_steps(&p("request a[3](s). 1: s!<1>; 0 | accept a[2](t). t?(x: nat); 0 | accept a[3](u). 0"));
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].label.rules, vec![Rule::Link]);
        let next = enabled_steps(&steps[0].target);
        assert_eq!(next.len(), 1);
        assert_eq!(next[0].label.rules, vec![Rule::Com, Rule::Scope]);
        assert_eq!(next[0].label.actions[0].sender, Some(Participant(1)));
        assert_eq!(next[0].label.actions[0].receiver, Some(Participant(2)));
    }

    #[test]
    fn conditionals_and_recursion() {
        let s = enabled_steps(&p("if 1 < 2 then 1: c!<1>; 0 else 0"));
        assert_eq!(s[0].label.rules, vec![Rule::IfT]);
        let s = enabled_steps(&p("mu X. 1: c!<1>; X"));
        assert_eq!(s[0].label.rules, vec![Rule::Call]);
    }

    #[test]
    fn delegation_moves_channels() {
        let steps = enabled_steps(&p("k!!(s); 0 | k??(t); 1: t!<1>; 0"));
        assert_eq!(steps.len(), 1);
        assert!(struct_equiv(&steps[0].target, &p("1: s!<1>; 0")));
    }
}
