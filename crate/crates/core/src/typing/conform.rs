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

//! Conformance of synthesized local types to expected ones, and
//! equivalence of local types up to recursion unfolding.

use std::borrow::Cow;
use std::collections::HashSet;

use super::env::{SessionEnv, TypeErrorKind};
use crate::kernel::{interval_add, interval_contains, ProbInterval, Rational};
use crate::syntax::print_local;
use crate::types::{unfold_local, LocalType};

/// Why a synthesized type does not conform.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub kind: TypeErrorKind,
    /// Prefixes of the expected type leading to the mismatch.
    pub path: Vec<String>,
    pub expected: String,
    pub actual: String,
}

/// Unfolds top-level recursion. Guardedness bounds the loop; an unguarded
/// type is returned as is after a few rounds.
pub(crate) fn head(t: &LocalType) -> Cow<'_, LocalType> {
    if !matches!(t, LocalType::Rec(..)) {
        return Cow::Borrowed(t);
    }
    let mut t = t.clone();
    for _ in 0..64 {
        match t {
            LocalType::Rec(..) => t = unfold_local(&t),
            _ => return Cow::Owned(t),
        }
    }
    Cow::Owned(t)
}

fn is_rec(t: &LocalType) -> bool {
    matches!(t, LocalType::Rec(..))
}

fn sorts_text(s: &[crate::ast::Sort]) -> String {
    format!("<{}>", s.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", "))
}

struct Ctx {
    visited: HashSet<(String, String)>,
    path: Vec<String>,
    warnings: Vec<String>,
}

impl Ctx {
    fn fail(&self, kind: TypeErrorKind, expected: impl Into<String>, actual: impl Into<String>) -> Mismatch {
        Mismatch { kind, path: self.path.clone(), expected: expected.into(), actual: actual.into() }
    }

    fn within<T>(&mut self, step: String, f: impl FnOnce(&mut Ctx) -> T) -> T {
        self.path.push(step);
        let r = f(self);
        self.path.pop();
        r
    }

    fn conform(&mut self, actual: &LocalType, expected: &LocalType) -> Result<(), Mismatch> {
        if matches!(actual, LocalType::Hole) || matches!(expected, LocalType::Hole) {
            return Ok(());
        }
        let (a, e) = (head(actual), head(expected));
        // Every cycle passes through a recursion, so only unfoldings are
        // recorded.
        if (is_rec(actual) || is_rec(expected)) && !self.visited.insert((print_local(&a, None), print_local(&e, None)))
        {
            return Ok(());
        }
        let show = |t: &LocalType| print_local(t, None);
        match (a.as_ref(), e.as_ref()) {
            (LocalType::End, LocalType::End) => Ok(()),
            (LocalType::Send { chan: ca, branches: ba }, LocalType::Send { chan: ce, branches: be }) if ca == ce => {
                for b in ba {
                    if !be.iter().any(|x| x.sorts == b.sorts) {
                        return Err(self.fail(
                            TypeErrorKind::BranchMismatch,
                            format!("one of {}", be.iter().map(|x| sorts_text(&x.sorts)).collect::<Vec<_>>().join(" ")),
                            format!("a send of {} on {}", sorts_text(&b.sorts), ca.name),
                        ));
                    }
                }
                for x in be {
                    let group: Vec<_> = ba.iter().filter(|b| b.sorts == x.sorts).collect();
                    let step = format!("{}!{}", ce.name, sorts_text(&x.sorts));
                    let total = group.iter().map(|b| b.interval.clone()).reduce(|s, i| interval_add(&s, &i));
                    let ok = match &total {
                        None => interval_contains(&Rational::zero(), &x.interval),
                        Some(t) => contained(t, &x.interval),
                    };
                    if !ok {
                        let got = total.map_or("0".to_string(), |t| t.to_string());
                        return Err(self.within(step, |c| {
                            c.fail(TypeErrorKind::IntervalMembership, format!("probability in {}", x.interval), got)
                        }));
                    }
                    for b in group {
                        self.within(step.clone(), |c| c.conform(&b.cont, &x.cont))?;
                    }
                }
                Ok(())
            }
            (LocalType::Select { chan: ca, branches: ba }, LocalType::Select { chan: ce, branches: be })
                if ca == ce =>
            {
                for b in ba {
                    if !be.iter().any(|x| x.label == b.label) {
                        return Err(self.fail(
                            TypeErrorKind::BranchMismatch,
                            format!("one of {}", be.iter().map(|x| x.label.clone()).collect::<Vec<_>>().join(", ")),
                            format!("selection of {} on {}", b.label, ca.name),
                        ));
                    }
                }
                for x in be {
                    let group: Vec<_> = ba.iter().filter(|b| b.label == x.label).collect();
                    let step = format!("{}<+{}", ce.name, x.label);
                    let total = group.iter().map(|b| b.interval.clone()).reduce(|s, i| interval_add(&s, &i));
                    let ok = match &total {
                        None => interval_contains(&Rational::zero(), &x.interval),
                        Some(t) => contained(t, &x.interval),
                    };
                    if !ok {
                        let got = total.map_or("0".to_string(), |t| t.to_string());
                        return Err(self.within(step, |c| {
                            c.fail(TypeErrorKind::IntervalMembership, format!("probability in {}", x.interval), got)
                        }));
                    }
                    for b in group {
                        self.within(step.clone(), |c| c.conform(&b.cont, &x.cont))?;
                    }
                }
                Ok(())
            }
            (LocalType::Recv { chan: ca, branches: ba }, LocalType::Recv { chan: ce, branches: be }) if ca == ce => {
                for x in be {
                    let step = format!("{}?{}", ce.name, sorts_text(&x.sorts));
                    match ba.iter().find(|b| b.sorts == x.sorts) {
                        Some(b) => self.within(step, |c| c.conform(&b.cont, &x.cont))?,
                        None => {
                            return Err(self.fail(
                                TypeErrorKind::BranchMismatch,
                                format!("a receive of {} on {}", sorts_text(&x.sorts), ce.name),
                                show(&a),
                            ))
                        }
                    }
                }
                for b in ba.iter().filter(|b| !be.iter().any(|x| x.sorts == b.sorts)) {
                    self.warnings.push(format!(
                        "{}: receive branch {} on {} can never be taken",
                        self.path.join(" / "),
                        sorts_text(&b.sorts),
                        ca.name
                    ));
                }
                Ok(())
            }
            (LocalType::Branch { chan: ca, arms: aa }, LocalType::Branch { chan: ce, arms: ae }) if ca == ce => {
                for x in ae {
                    let step = format!("{}&{}", ce.name, x.label);
                    match aa.iter().find(|b| b.label == x.label) {
                        Some(b) => self.within(step, |c| c.conform(&b.cont, &x.cont))?,
                        None => {
                            return Err(self.fail(
                                TypeErrorKind::BranchMismatch,
                                format!("a branch for label {} on {}", x.label, ce.name),
                                show(&a),
                            ))
                        }
                    }
                }
                for b in aa.iter().filter(|b| !ae.iter().any(|x| x.label == b.label)) {
                    self.warnings.push(format!(
                        "{}: branch {} on {} can never be taken",
                        self.path.join(" / "),
                        b.label,
                        ca.name
                    ));
                }
                Ok(())
            }
            (
                LocalType::Deleg { chan: ca, carried: ta, role: ra, cont: ka },
                LocalType::Deleg { chan: ce, carried: te, role: re, cont: ke },
            )
            | (
                LocalType::SessRecv { chan: ca, carried: ta, role: ra, cont: ka },
                LocalType::SessRecv { chan: ce, carried: te, role: re, cont: ke },
            ) if ca == ce => {
                // Role 0 marks a received session whose role is fixed by the sender.
                if ra != re && ra.0 != 0 {
                    return Err(self.fail(
                        TypeErrorKind::ProjectionMismatch,
                        format!("role {}", re),
                        format!("role {}", ra),
                    ));
                }
                let step = format!("{} session", ce.name);
                self.within(step.clone(), |c| c.conform(ta, te))?;
                self.within(step, |c| c.conform(ka, ke))
            }
            _ => Err(self.fail(TypeErrorKind::ProjectionMismatch, show(&e), show(&a))),
        }
    }
}

/// `inner` lies within `outer`.
fn contained(inner: &ProbInterval, outer: &ProbInterval) -> bool {
    let lo_ok = if inner.lo_closed() {
        interval_contains(inner.lo(), outer)
    } else {
        inner.lo() > outer.lo() || (inner.lo() == outer.lo() && inner.lo() < outer.hi())
    };
    let hi_ok = if inner.hi_closed() {
        interval_contains(inner.hi(), outer)
    } else {
        inner.hi() < outer.hi() || (inner.hi() == outer.hi() && inner.hi() > outer.lo())
    };
    lo_ok && hi_ok
}

/// Checks that `actual` implements `expected`: send and select
/// probabilities, summed per sort tuple or label, lie in the expected
/// intervals; receives and branches offer at least the expected
/// alternatives. Returns warnings about alternatives that cannot occur.
pub fn conforms(actual: &LocalType, expected: &LocalType) -> Result<Vec<String>, Mismatch> {
    let mut ctx = Ctx { visited: HashSet::new(), path: vec![], warnings: vec![] };
    ctx.conform(actual, expected)?;
    Ok(ctx.warnings)
}

/// Equality up to unfolding of recursion and reordering of branches.
pub fn types_equiv(a: &LocalType, b: &LocalType) -> bool {
    fn go(a: &LocalType, b: &LocalType, seen: &mut HashSet<(String, String)>) -> bool {
        let recursive = is_rec(a) || is_rec(b);
        let (a, b) = (head(a), head(b));
        if !recursive {
            return step(&a, &b, seen);
        }
        // Assumptions hold only along the current path, so that a failed
        // trial match leaves nothing behind.
        let pair = (print_local(&a, None), print_local(&b, None));
        if !seen.insert(pair.clone()) {
            return true;
        }
        let r = step(&a, &b, seen);
        seen.remove(&pair);
        r
    }
    fn step(a: &LocalType, b: &LocalType, seen: &mut HashSet<(String, String)>) -> bool {
        // Each branch on the left has a counterpart on the right and the
        // counts agree.
        fn matched<T>(xs: &[T], ys: &[T], mut eq: impl FnMut(&T, &T) -> bool) -> bool {
            let mut used = vec![false; ys.len()];
            xs.len() == ys.len()
                && xs.iter().all(|x| match (0..ys.len()).find(|&j| !used[j] && eq(x, &ys[j])) {
                    Some(j) => {
                        used[j] = true;
                        true
                    }
                    None => false,
                })
        }
        match (a, b) {
            (LocalType::End, LocalType::End) | (LocalType::Hole, LocalType::Hole) => true,
            (LocalType::Var(x), LocalType::Var(y)) => x == y,
            (LocalType::Send { chan: c, branches: x }, LocalType::Send { chan: d, branches: y }) => {
                c == d
                    && matched(x, y, |p, q| {
                        p.sorts == q.sorts && p.interval == q.interval && go(&p.cont, &q.cont, seen)
                    })
            }
            (LocalType::Select { chan: c, branches: x }, LocalType::Select { chan: d, branches: y }) => {
                c == d
                    && matched(x, y, |p, q| {
                        p.label == q.label && p.interval == q.interval && go(&p.cont, &q.cont, seen)
                    })
            }
            (LocalType::Recv { chan: c, branches: x }, LocalType::Recv { chan: d, branches: y }) => {
                c == d && matched(x, y, |p, q| p.sorts == q.sorts && go(&p.cont, &q.cont, seen))
            }
            (LocalType::Branch { chan: c, arms: x }, LocalType::Branch { chan: d, arms: y }) => {
                c == d && matched(x, y, |p, q| p.label == q.label && go(&p.cont, &q.cont, seen))
            }
            (
                LocalType::Deleg { chan: c, carried: t, role: r, cont: k },
                LocalType::Deleg { chan: d, carried: u, role: s, cont: l },
            )
            | (
                LocalType::SessRecv { chan: c, carried: t, role: r, cont: k },
                LocalType::SessRecv { chan: d, carried: u, role: s, cont: l },
            ) => c == d && r == s && go(t, u, seen) && go(k, l, seen),
            _ => false,
        }
    }
    go(a, b, &mut HashSet::new())
}

/// Entry-wise equivalence, ignoring `end` entries.
pub fn envs_equiv(a: &SessionEnv, b: &SessionEnv) -> bool {
    let (a, b) = (a.without_ends(), b.without_ends());
    a.0.len() == b.0.len() && a.0.iter().all(|(k, t)| b.0.get(k).is_some_and(|u| types_equiv(t, u)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_local;

    fn t(s: &str) -> LocalType {
        parse_local(s).unwrap()
    }

    #[test]
    fn probabilities_add_up_per_sort() {
        let expected = t("[0.7,0.9]: c!<string>. end + [0.15,0.25]: c!<nat>. end");
        assert!(conforms(&t("0.3: c!<string>. end + 0.5: c!<string>. end + 0.2: c!<nat>. end"), &expected).is_ok());
        let err = conforms(&t("0.5: c!<string>. end + 0.5: c!<nat>. end"), &expected).unwrap_err();
        assert_eq!(err.kind, TypeErrorKind::IntervalMembership);
        let err = conforms(&t("1: c!<bool>. end"), &expected).unwrap_err();
        assert_eq!(err.kind, TypeErrorKind::BranchMismatch);
    }

    #[test]
    fn receives_may_offer_more() {
        let w = conforms(&t("c?(nat). end + c?(bool). end"), &t("c?(nat). end")).unwrap();
        assert_eq!(w.len(), 1);
        assert!(conforms(&t("c?(nat). end"), &t("c?(nat). end + c?(bool). end")).is_err());
    }

    #[test]
    fn reordering_branches_with_the_same_sort() {
        let x = "(0.5: d!<bool>. end + 0.5: d!<nat>. end)";
        let y = "(1: d!<nat>. end)";
        let a = t(&format!("0.5: c!<nat>. {x} + 0.5: c!<nat>. {y}"));
        let b = t(&format!("0.5: c!<nat>. {y} + 0.5: c!<nat>. {x}"));
        assert!(types_equiv(&a, &b));
        let a = t(&format!("0.25: c!<nat>. {x} + 0.25: c!<nat>. {y} + 0.25: c!<bool>. {x} + 0.25: c!<bool>. {y}"));
        let b = t(&format!("0.25: c!<bool>. {y} + 0.25: c!<bool>. {x} + 0.25: c!<nat>. {y} + 0.25: c!<nat>. {x}"));
        assert!(types_equiv(&a, &b));
        let c = t(&format!("0.25: c!<bool>. {x} + 0.25: c!<bool>. {x} + 0.25: c!<nat>. {y} + 0.25: c!<nat>. {x}"));
        assert!(!types_equiv(&a, &c));
    }

    #[test]
    fn recursion_is_compared_up_to_unfolding() {
        let a = t("mu x. 1: c!<nat>. x");
        let b = t("1: c!<nat>. mu y. 1: c!<nat>. y");
        assert!(types_equiv(&a, &b));
        assert!(conforms(&a, &b).is_ok());
        assert!(!types_equiv(&a, &t("1: c!<nat>. end")));
    }
}
