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

//! Syntax-directed typing: Γ ⊢ P ▷ Δ with Δ synthesized bottom-up.

use super::conform::{conforms, envs_equiv};
use super::env::{SessionEnv, SortEnv, TypeError, TypeErrorKind, Vector};
use crate::ast::{base_name, expr_sort, Chan, Expr, Participant, Process, Sort};
use crate::kernel::{point, Rational};
use crate::syntax::print_local;
use crate::types::{project, ChanRef, LBranchArm, LRecvBranch, LSelectBranch, LSendBranch, LocalType};

/// Outcome of a successful check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Typing {
    pub delta: SessionEnv,
    /// Receive or branch alternatives that the protocol never exercises.
    pub warnings: Vec<String>,
}

/// Synthesizes the session environment of `p`.
pub fn typecheck(gamma: &SortEnv, p: &Process) -> Result<Typing, TypeError> {
    let mut c = Checker { path: vec![], warnings: vec![] };
    let delta = c.synth(gamma, p)?;
    Ok(Typing { delta, warnings: c.warnings })
}

struct Checker {
    path: Vec<String>,
    warnings: Vec<String>,
}

/// A resolved channel occurrence.
struct Use {
    vector: Vector,
    idx: usize,
    role: Participant,
    name: String,
}

impl Use {
    fn chan_ref(&self) -> ChanRef {
        ChanRef::new(self.idx, base_name(&self.name))
    }
}

impl Checker {
    fn err(
        &self,
        kind: TypeErrorKind,
        rule: &'static str,
        expected: impl Into<String>,
        actual: impl Into<String>,
    ) -> TypeError {
        let location = if self.path.is_empty() { "top level".to_string() } else { self.path.join(" / ") };
        TypeError { kind, rule, location, expected: expected.into(), actual: actual.into() }
    }

    fn within<T>(&mut self, step: String, f: impl FnOnce(&mut Checker) -> T) -> T {
        self.path.push(step);
        let r = f(self);
        self.path.pop();
        r
    }

    fn resolve(&self, gamma: &SortEnv, c: &Chan, rule: &'static str) -> Result<Use, TypeError> {
        let Some((vector, idx, default)) = gamma.chans.get(&c.name) else {
            return Err(self.err(TypeErrorKind::Unbound, rule, "a session channel in scope", format!("`{}`", c.name)));
        };
        let role = c.role.or(*default).ok_or_else(|| {
            self.err(TypeErrorKind::Unbound, rule, "a channel with a known role", format!("`{}`", c.name))
        })?;
        Ok(Use { vector: vector.clone(), idx: *idx, role, name: c.name.clone() })
    }

    fn sorts(&self, gamma: &SortEnv, es: &[Expr], rule: &'static str) -> Result<Vec<Sort>, TypeError> {
        es.iter()
            .map(|e| {
                expr_sort(e, &gamma.vars).map_err(|m| {
                    self.err(TypeErrorKind::SortMismatch, rule, "a well-sorted expression", format!("{}: {}", e, m))
                })
            })
            .collect()
    }

    fn check_sum(&self, probs: impl Iterator<Item = Rational>, rule: &'static str) -> Result<(), TypeError> {
        let total: Rational = probs.sum();
        if total.is_one() {
            Ok(())
        } else {
            Err(self.err(TypeErrorKind::ProbabilitySum, rule, "probabilities adding up to 1", total.to_report_string()))
        }
    }

    /// Splits each branch environment into the subject's continuation type
    /// and the rest, which must agree across branches.
    fn split_branches(
        &self,
        envs: Vec<SessionEnv>,
        u: &Use,
        rule: &'static str,
    ) -> Result<(Vec<LocalType>, SessionEnv), TypeError> {
        let mut conts = Vec::new();
        let mut rest: Option<SessionEnv> = None;
        for mut d in envs {
            conts.push(d.take(&u.vector, u.role));
            match &rest {
                None => rest = Some(d),
                Some(r) if envs_equiv(r, &d) => {}
                Some(r) => {
                    return Err(self.err(
                        TypeErrorKind::Disagreement,
                        rule,
                        format!("every branch with {}", r),
                        d.to_string(),
                    ))
                }
            }
        }
        Ok((conts, rest.unwrap_or_default()))
    }

    fn add(&self, mut rest: SessionEnv, u: &Use, t: LocalType, rule: &'static str) -> Result<SessionEnv, TypeError> {
        if rest.get(&u.vector, u.role).is_some() {
            return Err(self.err(
                TypeErrorKind::NonDisjoint,
                rule,
                "a single owner per role",
                format!("{} used twice", u.name),
            ));
        }
        rest.insert(u.vector.clone(), u.role, t);
        Ok(rest)
    }

    fn synth(&mut self, gamma: &SortEnv, p: &Process) -> Result<SessionEnv, TypeError> {
        match p {
            Process::Inact => Ok(SessionEnv::new()),
            Process::Error => Err(self.err(TypeErrorKind::Untypeable, "TEnd", "a process", "error")),
            Process::Send { chan, branches } => {
                let u = self.resolve(gamma, chan, "TSend")?;
                self.check_sum(branches.iter().map(|b| b.prob.clone()), "TSend")?;
                let mut envs = Vec::new();
                let mut sorts = Vec::new();
                for b in branches {
                    sorts.push(self.sorts(gamma, &b.exprs, "TSend")?);
                    envs.push(self.within(format!("{}!<{}>", chan, b.text), |c| c.synth(gamma, &b.cont))?);
                }
                let (conts, rest) = self.split_branches(envs, &u, "TSend")?;
                let lbs = branches
                    .iter()
                    .zip(sorts)
                    .zip(conts)
                    .map(|((b, sorts), cont)| LSendBranch {
                        interval: point(b.prob.clone()).expect("probability"),
                        sorts,
                        cont,
                    })
                    .collect();
                self.add(rest, &u, LocalType::Send { chan: u.chan_ref(), branches: lbs }, "TSend")
            }
            Process::Recv { chan, branches } => {
                let u = self.resolve(gamma, chan, "TReceive")?;
                let mut envs = Vec::new();
                for b in branches {
                    let mut g = gamma.clone();
                    for (x, s) in &b.binders {
                        g.vars.insert(x.clone(), *s);
                    }
                    let names: Vec<_> = b.binders.iter().map(|(x, _)| x.as_str()).collect();
                    envs.push(self.within(format!("{}?({})", chan, names.join(", ")), |c| c.synth(&g, &b.cont))?);
                }
                let (conts, rest) = self.split_branches(envs, &u, "TReceive")?;
                let lbs = branches.iter().zip(conts).map(|(b, cont)| LRecvBranch { sorts: b.sorts(), cont }).collect();
                self.add(rest, &u, LocalType::Recv { chan: u.chan_ref(), branches: lbs }, "TReceive")
            }
            Process::Select { chan, branches } => {
                let u = self.resolve(gamma, chan, "TSelect")?;
                self.check_sum(branches.iter().map(|b| b.prob.clone()), "TSelect")?;
                let mut envs = Vec::new();
                for b in branches {
                    envs.push(self.within(format!("{} <+ {}", chan, b.label), |c| c.synth(gamma, &b.cont))?);
                }
                let (conts, rest) = self.split_branches(envs, &u, "TSelect")?;
                let lbs = branches
                    .iter()
                    .zip(conts)
                    .map(|(b, cont)| LSelectBranch {
                        interval: point(b.prob.clone()).expect("probability"),
                        label: b.label.clone(),
                        cont,
                    })
                    .collect();
                self.add(rest, &u, LocalType::Select { chan: u.chan_ref(), branches: lbs }, "TSelect")
            }
            Process::Branch { chan, arms } => {
                let u = self.resolve(gamma, chan, "TBranch")?;
                let mut envs = Vec::new();
                for a in arms {
                    envs.push(self.within(format!("{} >> {}", chan, a.label), |c| c.synth(gamma, &a.cont))?);
                }
                let (conts, rest) = self.split_branches(envs, &u, "TBranch")?;
                let las = arms.iter().zip(conts).map(|(a, cont)| LBranchArm { label: a.label.clone(), cont }).collect();
                self.add(rest, &u, LocalType::Branch { chan: u.chan_ref(), arms: las }, "TBranch")
            }
            Process::Deleg { chan, payload, cont } => {
                let u = self.resolve(gamma, chan, "TSDeleg")?;
                let mut d = self.within(format!("{}!!(..)", chan), |c| c.synth(gamma, cont))?;
                let t = d.take(&u.vector, u.role);
                // The delegated vector, whole and in order, with one role.
                let first = payload.first().ok_or_else(|| {
                    self.err(TypeErrorKind::Arity, "TSDeleg", "at least one delegated channel", "none")
                })?;
                let pu = self.resolve(gamma, first, "TSDeleg")?;
                let names: Vec<&str> = payload.iter().map(|c| c.name.as_str()).collect();
                if names != pu.vector.iter().map(String::as_str).collect::<Vec<_>>()
                    || payload.iter().any(|c| c.role.is_some_and(|r| r != pu.role))
                {
                    return Err(self.err(
                        TypeErrorKind::Arity,
                        "TSDeleg",
                        format!("the whole vector {}", pu.vector.join(", ")),
                        names.join(", "),
                    ));
                }
                if d.get(&pu.vector, pu.role).is_some() {
                    return Err(self.err(
                        TypeErrorKind::NonDisjoint,
                        "TSDeleg",
                        "a delegated session no longer used",
                        names.join(", "),
                    ));
                }
                d.insert(pu.vector.clone(), pu.role, LocalType::Hole);
                let ty = LocalType::Deleg {
                    chan: u.chan_ref(),
                    carried: Box::new(LocalType::Hole),
                    role: pu.role,
                    cont: Box::new(t),
                };
                self.add(d, &u, ty, "TSDeleg")
            }
            Process::SessRecv { chan, bound, cont } => {
                let u = self.resolve(gamma, chan, "TSReceive")?;
                let mut g = gamma.clone();
                // The role in the received session is chosen by the sender.
                let unknown = Participant(0);
                g.bind_vector(bound, Some(unknown));
                let mut d = self.within(format!("{}??({})", chan, bound.join(", ")), |c| c.synth(&g, cont))?;
                let t = d.take(&u.vector, u.role);
                let mut carried = d.take_vector(bound);
                let role = carried.keys().next().copied().unwrap_or(unknown);
                let carried_t = carried.remove(&role).unwrap_or(LocalType::End);
                if !carried.is_empty() {
                    return Err(self.err(
                        TypeErrorKind::NonDisjoint,
                        "TSReceive",
                        "one role in a received session",
                        bound.join(", "),
                    ));
                }
                let ty =
                    LocalType::SessRecv { chan: u.chan_ref(), carried: Box::new(carried_t), role, cont: Box::new(t) };
                self.add(d, &u, ty, "TSReceive")
            }
            Process::If { cond, then_branch, else_branch } => {
                match expr_sort(cond, &gamma.vars) {
                    Ok(Sort::Bool) => {}
                    Ok(s) => return Err(self.err(TypeErrorKind::SortMismatch, "TIf", "bool", s.to_string())),
                    Err(m) => return Err(self.err(TypeErrorKind::SortMismatch, "TIf", "bool", m.to_string())),
                }
                let t = self.within(format!("if {} then", cond), |c| c.synth(gamma, then_branch))?;
                let e = self.within(format!("if {} else", cond), |c| c.synth(gamma, else_branch))?;
                if !envs_equiv(&t, &e) {
                    return Err(self.err(TypeErrorKind::Disagreement, "TIf", t.to_string(), e.to_string()));
                }
                Ok(t)
            }
            Process::Par(l, r) => {
                let dl = self.synth(gamma, l)?;
                let dr = self.synth(gamma, r)?;
                dl.join(dr).map_err(|(v, q)| {
                    self.err(
                        TypeErrorKind::NonDisjoint,
                        "TConc",
                        "disjoint session environments",
                        format!("{}@{} on both sides", v.join(","), q),
                    )
                })
            }
            Process::Hide { names, body } => self.hide(gamma, names, body),
            Process::Request { shared, parties, chans, body } => {
                self.session(gamma, shared, Participant(1), Some(*parties), chans, body, "TMCast")
            }
            Process::Accept { shared, role, chans, body } => {
                self.session(gamma, shared, *role, None, chans, body, "TMAccept")
            }
            Process::Rec { var, body } => {
                // First pass finds the channels the body uses, the second
                // types recursive calls as using exactly those.
                let mut g = gamma.clone();
                g.recs.insert(var.clone(), vec![]);
                let d1 = self.synth(&g, body)?;
                let keys: Vec<(Vector, Participant)> = d1.0.keys().cloned().collect();
                g.recs.insert(var.clone(), keys.clone());
                let mut d2 = self.synth(&g, body)?;
                let mut out = SessionEnv::new();
                for (v, q) in keys {
                    let t = d2.take(&v, q);
                    out.insert(v, q, LocalType::Rec(var.clone(), Box::new(t)));
                }
                out.join(d2).map_err(|(v, q)| {
                    self.err(
                        TypeErrorKind::Disagreement,
                        "TRec",
                        "a fixed set of channels",
                        format!("{}@{}", v.join(","), q),
                    )
                })
            }
            Process::Var(x) => match gamma.recs.get(x) {
                Some(keys) => Ok(SessionEnv(keys.iter().map(|k| (k.clone(), LocalType::Var(x.clone()))).collect())),
                None => Err(self.err(TypeErrorKind::Unbound, "TVar", "a bound process variable", x.clone())),
            },
        }
    }

    fn hide(&mut self, gamma: &SortEnv, names: &[String], body: &Process) -> Result<SessionEnv, TypeError> {
        let session = names.iter().any(|n| uses_as_channel(body, n));
        if !session {
            // (TNRes): hidden shared names keep their declared global type.
            for n in names {
                if gamma.global(n).is_none() && uses_as_shared(body, n) {
                    return Err(self.err(
                        TypeErrorKind::Unbound,
                        "TNRes",
                        "a declared global type",
                        format!("`{}`", n),
                    ));
                }
            }
            return self.synth(gamma, body);
        }
        let mut g = gamma.clone();
        g.bind_vector(names, None);
        let mut d = self.synth(&g, body)?;
        // (TCRes): the whole family is discharged.
        d.take_vector(names);
        Ok(d)
    }

    #[allow(clippy::too_many_arguments)]
    fn session(
        &mut self,
        gamma: &SortEnv,
        shared: &str,
        role: Participant,
        parties: Option<u32>,
        chans: &[String],
        body: &Process,
        rule: &'static str,
    ) -> Result<SessionEnv, TypeError> {
        let g = gamma
            .global(shared)
            .ok_or_else(|| {
                self.err(TypeErrorKind::Unbound, rule, "a global type for the shared name", format!("`{}`", shared))
            })?
            .clone();
        let pid = g.pid();
        if let Some(n) = parties {
            let want: std::collections::BTreeSet<Participant> = (1..=n).map(Participant).collect();
            if pid != want {
                return Err(self.err(
                    TypeErrorKind::Arity,
                    rule,
                    format!("participants 1..{}", n),
                    format!("{:?}", pid.iter().map(|p| p.0).collect::<Vec<_>>()),
                ));
            }
        } else if role.0 == 1 || !pid.contains(&role) {
            return Err(self.err(
                TypeErrorKind::Arity,
                rule,
                "an accepting participant of the global type",
                role.to_string(),
            ));
        }
        if chans.len() != g.sid() {
            return Err(self.err(TypeErrorKind::Arity, rule, format!("{} channels", g.sid()), chans.len().to_string()));
        }
        let expected = project(&g, role)
            .map_err(|u| self.err(TypeErrorKind::ProjectionMismatch, rule, "a defined projection", u.to_string()))?;
        let mut gm = gamma.clone();
        gm.bind_vector(chans, Some(role));
        let step = format!("{} {}[{}]", if parties.is_some() { "request" } else { "accept" }, shared, role);
        let mut d = self.within(step, |c| c.synth(&gm, body))?;
        let actual = d.take(chans, role);
        let others = d.take_vector(chans);
        if let Some(q) = others.keys().next() {
            return Err(self.err(
                TypeErrorKind::NonDisjoint,
                rule,
                format!("only role {}", role),
                format!("role {} used", q),
            ));
        }
        match conforms(&actual, &expected) {
            Ok(w) => self.warnings.extend(w),
            Err(m) => {
                let mut path = self.path.clone();
                path.push(format!("{} {}[{}]", if parties.is_some() { "request" } else { "accept" }, shared, role));
                path.extend(m.path);
                return Err(TypeError {
                    kind: m.kind,
                    rule,
                    location: path.join(" / "),
                    expected: m.expected,
                    actual: format!("{} (type {})", m.actual, print_local(&actual, None)),
                });
            }
        }
        Ok(d)
    }
}

pub(crate) fn uses_as_channel(p: &Process, n: &str) -> bool {
    let here = match p {
        Process::Request { chans, .. } | Process::Accept { chans, .. } if chans.iter().any(|c| c == n) => return false,
        Process::SessRecv { bound, .. } if bound.iter().any(|c| c == n) => return false,
        Process::Hide { names, .. } if names.iter().any(|c| c == n) => return false,
        Process::Send { chan, .. }
        | Process::Recv { chan, .. }
        | Process::Select { chan, .. }
        | Process::Branch { chan, .. }
        | Process::SessRecv { chan, .. } => chan.name == n,
        Process::Deleg { chan, payload, .. } => chan.name == n || payload.iter().any(|c| c.name == n),
        _ => false,
    };
    here || p.children().into_iter().any(|c| uses_as_channel(c, n))
}

fn uses_as_shared(p: &Process, n: &str) -> bool {
    let here = matches!(p, Process::Request { shared, .. } | Process::Accept { shared, .. } if shared == n);
    here || p.children().into_iter().any(|c| uses_as_shared(c, n))
}

/// Γ for a source file: its `env` declarations.
pub fn gamma_of(shared: &[(String, crate::types::GlobalType)]) -> SortEnv {
    SortEnv::with_shared(shared.iter().cloned())
}

/// Types the components of a canonical process with its hidden session
/// vectors opened, so that Δ shows the running sessions.
pub fn typecheck_open(gamma: &SortEnv, p: &Process) -> Result<Typing, TypeError> {
    let canon = crate::semantics::canonicalize(p);
    let (hides, comps) = crate::semantics::decompose(&canon);
    let mut g = gamma.clone();
    let mut keep = Vec::new();
    for h in hides {
        let body = Process::par_all(comps.clone());
        if h.iter().any(|n| uses_as_channel(&body, n)) {
            g.bind_vector(&h, None);
        } else {
            keep.push(h);
        }
    }
    let open = crate::semantics::compose(keep, comps);
    typecheck(&g, &open)
}
