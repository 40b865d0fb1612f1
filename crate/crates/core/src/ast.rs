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

//! Abstract syntax of processes, expressions, values and sorts, together
//! with the binding-aware utilities (free names, substitution, evaluation).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::kernel::Rational;

/// Shared names, session channels and hidden names all live in one namespace.
pub type Name = String;

/// A participant role. Roles are positive integers; `1` is the requester.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Participant(pub u32);

impl fmt::Display for Participant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A channel occurrence. Channels created by session initiation carry the
/// role of the participant that owns this endpoint.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Chan {
    pub name: Name,
    pub role: Option<Participant>,
}

impl Chan {
    pub fn named(name: impl Into<Name>) -> Chan {
        Chan { name: name.into(), role: None }
    }

    pub fn with_role(name: impl Into<Name>, role: Participant) -> Chan {
        Chan { name: name.into(), role: Some(role) }
    }

    /// Source-level name: the part before any `#n` freshness suffix.
    pub fn base(&self) -> &str {
        base_name(&self.name)
    }
}

impl fmt::Display for Chan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.role {
            Some(r) => write!(f, "{}@{}", self.name, r),
            None => f.write_str(&self.name),
        }
    }
}

pub fn base_name(name: &str) -> &str {
    name.split('#').next().unwrap_or(name)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    Bool,
    Nat,
    Int,
    Str,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sort::Bool => "bool",
            Sort::Nat => "nat",
            Sort::Int => "int",
            Sort::Str => "string",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Bool(bool),
    Nat(u64),
    Int(i64),
    Str(String),
}

impl Value {
    pub fn sort(&self) -> Sort {
        match self {
            Value::Bool(_) => Sort::Bool,
            Value::Nat(_) => Sort::Nat,
            Value::Int(_) => Sort::Int,
            Value::Str(_) => Sort::Str,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{}", b),
            Value::Nat(n) => write!(f, "{}", n),
            Value::Int(i) => write!(f, "int({})", i),
            Value::Str(s) => write!(f, "\"{}\"", escape(s)),
        }
    }
}

pub(crate) fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UnOp {
    Not,
    Neg,
    /// `int(e)`: view a natural as an integer.
    ToInt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Or => "or",
            BinOp::And => "and",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 3,
            BinOp::Add | BinOp::Sub => 4,
            BinOp::Mul | BinOp::Div => 5,
        }
    }

    pub fn is_comparison(self) -> bool {
        self.precedence() == 3
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Val(Value),
    Var(String),
    Un(UnOp, Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(x: impl Into<String>) -> Expr {
        Expr::Var(x.into())
    }

    pub fn bin(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Bin(op, Box::new(l), Box::new(r))
    }

    pub fn free_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Val(_) => {}
            Expr::Var(x) => {
                out.insert(x.clone());
            }
            Expr::Un(_, e) => e.free_vars(out),
            Expr::Bin(_, l, r) => {
                l.free_vars(out);
                r.free_vars(out);
            }
        }
    }

    pub fn subst(&self, map: &BTreeMap<String, Value>) -> Expr {
        match self {
            Expr::Val(_) => self.clone(),
            Expr::Var(x) => match map.get(x) {
                Some(v) => Expr::Val(v.clone()),
                None => self.clone(),
            },
            Expr::Un(op, e) => Expr::Un(*op, Box::new(e.subst(map))),
            Expr::Bin(op, l, r) => Expr::Bin(*op, Box::new(l.subst(map)), Box::new(r.subst(map))),
        }
    }

    /// Printing with value variables renamed through `rename`.
    pub(crate) fn fmt_with(&self, out: &mut String, rename: &dyn Fn(&str) -> String) {
        self.fmt_prec(out, 0, rename)
    }

    fn fmt_prec(&self, out: &mut String, ctx: u8, rename: &dyn Fn(&str) -> String) {
        match self {
            Expr::Val(v) => out.push_str(&v.to_string()),
            Expr::Var(x) => out.push_str(&rename(x)),
            Expr::Un(UnOp::Not, e) => {
                out.push_str("not ");
                e.fmt_prec(out, 6, rename);
            }
            Expr::Un(UnOp::Neg, e) => {
                out.push('-');
                e.fmt_prec(out, 6, rename);
            }
            Expr::Un(UnOp::ToInt, e) => {
                out.push_str("int(");
                e.fmt_prec(out, 0, rename);
                out.push(')');
            }
            Expr::Bin(op, l, r) => {
                let p = op.precedence();
                // Comparisons are always parenthesised so that `>` never
                // clashes with the closing bracket of a send payload.
                let paren = p <= ctx || op.is_comparison();
                if paren {
                    out.push('(');
                }
                l.fmt_prec(out, p - 1, rename);
                out.push(' ');
                out.push_str(op.symbol());
                out.push(' ');
                r.fmt_prec(out, p, rename);
                if paren {
                    out.push(')');
                }
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.fmt_with(&mut s, &|x| x.to_string());
        f.write_str(&s)
    }
}

/// Printed form of a payload, used to identify which branch was chosen.
pub fn exprs_text(exprs: &[Expr]) -> String {
    exprs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("operator `{op}` does not apply to {operands}")]
    Mismatch { op: String, operands: String },
    #[error("division by zero")]
    DivByZero,
    #[error("arithmetic overflow or negative natural in `{0}`")]
    Overflow(String),
}

fn mismatch(op: &str, vals: &[&Value]) -> EvalError {
    EvalError::Mismatch {
        op: op.to_string(),
        operands: vals.iter().map(|v| v.sort().to_string()).collect::<Vec<_>>().join(" and "),
    }
}

fn as_int(v: &Value) -> Option<i64> {
    match v {
        Value::Nat(n) => i64::try_from(*n).ok(),
        Value::Int(i) => Some(*i),
        _ => None,
    }
}

/// Big-step evaluation. Natural division truncates; mixing `nat` and `int`
/// operands yields an `int`.
pub fn eval_expr(e: &Expr, env: &BTreeMap<String, Value>) -> Result<Value, EvalError> {
    match e {
        Expr::Val(v) => Ok(v.clone()),
        Expr::Var(x) => env.get(x).cloned().ok_or_else(|| EvalError::Unbound(x.clone())),
        Expr::Un(op, inner) => {
            let v = eval_expr(inner, env)?;
            match (op, &v) {
                (UnOp::Not, Value::Bool(b)) => Ok(Value::Bool(!b)),
                (UnOp::Neg, Value::Nat(_) | Value::Int(_)) => as_int(&v)
                    .and_then(i64::checked_neg)
                    .map(Value::Int)
                    .ok_or_else(|| EvalError::Overflow(e.to_string())),
                (UnOp::ToInt, Value::Nat(_) | Value::Int(_)) => {
                    as_int(&v).map(Value::Int).ok_or_else(|| EvalError::Overflow(e.to_string()))
                }
                (UnOp::Not, _) => Err(mismatch("not", &[&v])),
                (UnOp::Neg, _) => Err(mismatch("-", &[&v])),
                (UnOp::ToInt, _) => Err(mismatch("int", &[&v])),
            }
        }
        Expr::Bin(op, l, r) => {
            let a = eval_expr(l, env)?;
            let b = eval_expr(r, env)?;
            eval_bin(*op, &a, &b).map_err(|err| match err {
                EvalError::Overflow(_) => EvalError::Overflow(e.to_string()),
                other => other,
            })
        }
    }
}

fn eval_bin(op: BinOp, a: &Value, b: &Value) -> Result<Value, EvalError> {
    use BinOp::*;
    let ovf = || EvalError::Overflow(String::new());
    match op {
        And | Or => match (a, b) {
            (Value::Bool(x), Value::Bool(y)) => Ok(Value::Bool(if op == And { *x && *y } else { *x || *y })),
            _ => Err(mismatch(op.symbol(), &[a, b])),
        },
        Eq | Ne => {
            let same = match (a, b) {
                (Value::Nat(_) | Value::Int(_), Value::Nat(_) | Value::Int(_)) => as_int(a) == as_int(b),
                (Value::Bool(x), Value::Bool(y)) => x == y,
                (Value::Str(x), Value::Str(y)) => x == y,
                _ => return Err(mismatch(op.symbol(), &[a, b])),
            };
            Ok(Value::Bool(if op == Eq { same } else { !same }))
        }
        Lt | Le | Gt | Ge => {
            let ord = match (a, b) {
                (Value::Nat(x), Value::Nat(y)) => x.cmp(y),
                (Value::Nat(_) | Value::Int(_), Value::Nat(_) | Value::Int(_)) => {
                    as_int(a).ok_or_else(ovf)?.cmp(&as_int(b).ok_or_else(ovf)?)
                }
                (Value::Str(x), Value::Str(y)) => x.cmp(y),
                _ => return Err(mismatch(op.symbol(), &[a, b])),
            };
            let res = match op {
                Lt => ord.is_lt(),
                Le => ord.is_le(),
                Gt => ord.is_gt(),
                _ => ord.is_ge(),
            };
            Ok(Value::Bool(res))
        }
        Add | Sub | Mul | Div => match (a, b) {
            (Value::Nat(x), Value::Nat(y)) => {
                let r = match op {
                    Add => x.checked_add(*y),
                    Sub => x.checked_sub(*y),
                    Mul => x.checked_mul(*y),
                    _ => {
                        if *y == 0 {
                            return Err(EvalError::DivByZero);
                        }
                        Some(x / y)
                    }
                };
                r.map(Value::Nat).ok_or_else(ovf)
            }
            (Value::Nat(_) | Value::Int(_), Value::Nat(_) | Value::Int(_)) => {
                let x = as_int(a).ok_or_else(ovf)?;
                let y = as_int(b).ok_or_else(ovf)?;
                let r = match op {
                    Add => x.checked_add(y),
                    Sub => x.checked_sub(y),
                    Mul => x.checked_mul(y),
                    _ => {
                        if y == 0 {
                            return Err(EvalError::DivByZero);
                        }
                        x.checked_div(y)
                    }
                };
                r.map(Value::Int).ok_or_else(ovf)
            }
            _ => Err(mismatch(op.symbol(), &[a, b])),
        },
    }
}

/// Static sort of an expression under a variable environment.
pub fn expr_sort(e: &Expr, env: &BTreeMap<String, Sort>) -> Result<Sort, EvalError> {
    let num = |s: Sort| matches!(s, Sort::Nat | Sort::Int);
    let fake = |s: Sort| match s {
        Sort::Bool => Value::Bool(true),
        Sort::Nat => Value::Nat(0),
        Sort::Int => Value::Int(0),
        Sort::Str => Value::Str(String::new()),
    };
    match e {
        Expr::Val(v) => Ok(v.sort()),
        Expr::Var(x) => env.get(x).copied().ok_or_else(|| EvalError::Unbound(x.clone())),
        Expr::Un(op, inner) => {
            let s = expr_sort(inner, env)?;
            match op {
                UnOp::Not if s == Sort::Bool => Ok(Sort::Bool),
                UnOp::Neg | UnOp::ToInt if num(s) => Ok(Sort::Int),
                UnOp::Not => Err(mismatch("not", &[&fake(s)])),
                UnOp::Neg => Err(mismatch("-", &[&fake(s)])),
                UnOp::ToInt => Err(mismatch("int", &[&fake(s)])),
            }
        }
        Expr::Bin(op, l, r) => {
            let a = expr_sort(l, env)?;
            let b = expr_sort(r, env)?;
            let bad = || mismatch(op.symbol(), &[&fake(a), &fake(b)]);
            match op {
                BinOp::And | BinOp::Or if a == Sort::Bool && b == Sort::Bool => Ok(Sort::Bool),
                BinOp::Eq | BinOp::Ne if a == b || (num(a) && num(b)) => Ok(Sort::Bool),
                BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge
                    if (num(a) && num(b)) || (a == Sort::Str && b == Sort::Str) =>
                {
                    Ok(Sort::Bool)
                }
                BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div if num(a) && num(b) => {
                    Ok(if a == Sort::Nat && b == Sort::Nat { Sort::Nat } else { Sort::Int })
                }
                _ => Err(bad()),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SendBranch {
    pub prob: Rational,
    pub exprs: Vec<Expr>,
    /// Printed payload as written, kept through substitution.
    pub text: String,
    pub cont: Process,
}

impl SendBranch {
    pub fn new(prob: Rational, exprs: Vec<Expr>, cont: Process) -> SendBranch {
        let text = exprs_text(&exprs);
        SendBranch { prob, exprs, text, cont }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RecvBranch {
    pub binders: Vec<(String, Sort)>,
    pub cont: Process,
}

impl RecvBranch {
    pub fn sorts(&self) -> Vec<Sort> {
        self.binders.iter().map(|(_, s)| *s).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SelectBranch {
    pub prob: Rational,
    pub label: String,
    pub cont: Process,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BranchArm {
    pub label: String,
    pub cont: Process,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Process {
    /// `request a[n](s1,..,sk). P`
    Request {
        shared: Name,
        parties: u32,
        chans: Vec<Name>,
        body: Box<Process>,
    },
    /// `accept a[q](s1,..,sk). P`
    Accept {
        shared: Name,
        role: Participant,
        chans: Vec<Name>,
        body: Box<Process>,
    },
    Send {
        chan: Chan,
        branches: Vec<SendBranch>,
    },
    Recv {
        chan: Chan,
        branches: Vec<RecvBranch>,
    },
    Deleg {
        chan: Chan,
        payload: Vec<Chan>,
        cont: Box<Process>,
    },
    SessRecv {
        chan: Chan,
        bound: Vec<Name>,
        cont: Box<Process>,
    },
    Select {
        chan: Chan,
        branches: Vec<SelectBranch>,
    },
    Branch {
        chan: Chan,
        arms: Vec<BranchArm>,
    },
    If {
        cond: Expr,
        then_branch: Box<Process>,
        else_branch: Box<Process>,
    },
    Par(Box<Process>, Box<Process>),
    Inact,
    /// Hides a vector of names; session initiation hides the whole channel
    /// vector at once, a shared name is a one-element vector.
    Hide {
        names: Vec<Name>,
        body: Box<Process>,
    },
    Rec {
        var: String,
        body: Box<Process>,
    },
    Var(String),
    /// Reached through a probability-sum violation.
    Error,
}

impl Process {
    pub fn par(l: Process, r: Process) -> Process {
        Process::Par(Box::new(l), Box::new(r))
    }

    /// Right-nested parallel composition; `0` for an empty list.
    pub fn par_all(mut items: Vec<Process>) -> Process {
        match items.len() {
            0 => Process::Inact,
            1 => items.pop().unwrap(),
            _ => {
                let last = items.pop().unwrap();
                items.into_iter().rev().fold(last, |acc, p| Process::par(p, acc))
            }
        }
    }

    pub fn hide(names: Vec<Name>, body: Process) -> Process {
        Process::Hide { names, body: Box::new(body) }
    }

    pub fn is_inact(&self) -> bool {
        matches!(self, Process::Inact)
    }

    /// Immediate sub-processes, in syntactic order.
    pub fn children(&self) -> Vec<&Process> {
        match self {
            Process::Request { body, .. } | Process::Accept { body, .. } => vec![body],
            Process::Send { branches, .. } => branches.iter().map(|b| &b.cont).collect(),
            Process::Recv { branches, .. } => branches.iter().map(|b| &b.cont).collect(),
            Process::Deleg { cont, .. } | Process::SessRecv { cont, .. } => vec![cont],
            Process::Select { branches, .. } => branches.iter().map(|b| &b.cont).collect(),
            Process::Branch { arms, .. } => arms.iter().map(|b| &b.cont).collect(),
            Process::If { then_branch, else_branch, .. } => vec![then_branch, else_branch],
            Process::Par(l, r) => vec![l, r],
            Process::Hide { body, .. } | Process::Rec { body, .. } => vec![body],
            Process::Inact | Process::Var(_) | Process::Error => vec![],
        }
    }

    /// Channel this process communicates on next, if it is a prefix.
    pub fn subject(&self) -> Option<&Chan> {
        match self {
            Process::Send { chan, .. }
            | Process::Recv { chan, .. }
            | Process::Deleg { chan, .. }
            | Process::SessRecv { chan, .. }
            | Process::Select { chan, .. }
            | Process::Branch { chan, .. } => Some(chan),
            _ => None,
        }
    }
}

/// Free identifiers (channels, shared names, hidden names).
pub fn free_names(p: &Process) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    collect_free_names(p, &mut out);
    out
}

fn collect_free_names(p: &Process, out: &mut BTreeSet<Name>) {
    let bound = |names: &[Name], body: &Process, out: &mut BTreeSet<Name>| {
        let mut inner = BTreeSet::new();
        collect_free_names(body, &mut inner);
        for n in names {
            inner.remove(n);
        }
        out.extend(inner);
    };
    match p {
        Process::Request { shared, chans, body, .. } | Process::Accept { shared, chans, body, .. } => {
            out.insert(shared.clone());
            bound(chans, body, out);
        }
        Process::SessRecv { chan, bound: names, cont } => {
            out.insert(chan.name.clone());
            bound(names, cont, out);
        }
        Process::Deleg { chan, payload, cont } => {
            out.insert(chan.name.clone());
            out.extend(payload.iter().map(|c| c.name.clone()));
            collect_free_names(cont, out);
        }
        Process::Hide { names, body } => bound(names, body, out),
        _ => {
            if let Some(c) = p.subject() {
                out.insert(c.name.clone());
            }
            for c in p.children() {
                collect_free_names(c, out);
            }
        }
    }
}

/// Free process variables.
pub fn free_vars(p: &Process) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_free_vars(p, &mut out);
    out
}

fn collect_free_vars(p: &Process, out: &mut BTreeSet<String>) {
    match p {
        Process::Var(x) => {
            out.insert(x.clone());
        }
        Process::Rec { var, body } => {
            let mut inner = BTreeSet::new();
            collect_free_vars(body, &mut inner);
            inner.remove(var);
            out.extend(inner);
        }
        _ => {
            for c in p.children() {
                collect_free_vars(c, out);
            }
        }
    }
}

/// Free value variables.
pub fn free_value_vars(p: &Process) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_free_value_vars(p, &mut out);
    out
}

fn collect_free_value_vars(p: &Process, out: &mut BTreeSet<String>) {
    match p {
        Process::Send { branches, .. } => {
            for b in branches {
                b.exprs.iter().for_each(|e| e.free_vars(out));
                collect_free_value_vars(&b.cont, out);
            }
        }
        Process::Recv { branches, .. } => {
            for b in branches {
                let mut inner = BTreeSet::new();
                collect_free_value_vars(&b.cont, &mut inner);
                for (x, _) in &b.binders {
                    inner.remove(x);
                }
                out.extend(inner);
            }
        }
        Process::If { cond, then_branch, else_branch } => {
            cond.free_vars(out);
            collect_free_value_vars(then_branch, out);
            collect_free_value_vars(else_branch, out);
        }
        _ => {
            for c in p.children() {
                collect_free_value_vars(c, out);
            }
        }
    }
}

/// Every name occurring anywhere in `p`, bound or free.
pub fn all_names(p: &Process) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    collect_all_names(p, &mut out);
    out
}

fn collect_all_names(p: &Process, out: &mut BTreeSet<Name>) {
    match p {
        Process::Request { shared, chans, .. } | Process::Accept { shared, chans, .. } => {
            out.insert(shared.clone());
            out.extend(chans.iter().cloned());
        }
        Process::SessRecv { bound, .. } => out.extend(bound.iter().cloned()),
        Process::Deleg { payload, .. } => out.extend(payload.iter().map(|c| c.name.clone())),
        Process::Hide { names, .. } => out.extend(names.iter().cloned()),
        _ => {}
    }
    if let Some(c) = p.subject() {
        out.insert(c.name.clone());
    }
    for c in p.children() {
        collect_all_names(c, out);
    }
}

/// Largest `#n` suffix among the names of `p`; fresh names use larger ones.
pub fn max_fresh_index(p: &Process) -> u64 {
    all_names(p).iter().filter_map(|n| n.split_once('#').and_then(|(_, k)| k.parse::<u64>().ok())).max().unwrap_or(0)
}

/// Generator of names of the form `base#n` that are fresh for a term.
#[derive(Debug, Clone)]
pub struct FreshNames {
    next: u64,
}

impl FreshNames {
    pub fn for_process(p: &Process) -> FreshNames {
        FreshNames { next: max_fresh_index(p) + 1 }
    }

    pub fn starting_at(next: u64) -> FreshNames {
        FreshNames { next }
    }

    pub fn fresh(&mut self, base: &str) -> Name {
        let n = format!("{}#{}", base_name(base), self.next);
        self.next += 1;
        n
    }
}

/// Substitutes closed values for free value variables. Binders of the same
/// variable shadow the mapping.
pub fn subst_values(p: &Process, map: &BTreeMap<String, Value>) -> Process {
    if map.is_empty() {
        return p.clone();
    }
    match p {
        Process::Send { chan, branches } => Process::Send {
            chan: chan.clone(),
            branches: branches
                .iter()
                .map(|b| SendBranch {
                    prob: b.prob.clone(),
                    exprs: b.exprs.iter().map(|e| e.subst(map)).collect(),
                    text: b.text.clone(),
                    cont: subst_values(&b.cont, map),
                })
                .collect(),
        },
        Process::Recv { chan, branches } => Process::Recv {
            chan: chan.clone(),
            branches: branches
                .iter()
                .map(|b| {
                    let mut inner = map.clone();
                    for (x, _) in &b.binders {
                        inner.remove(x);
                    }
                    RecvBranch { binders: b.binders.clone(), cont: subst_values(&b.cont, &inner) }
                })
                .collect(),
        },
        Process::If { cond, then_branch, else_branch } => Process::If {
            cond: cond.subst(map),
            then_branch: Box::new(subst_values(then_branch, map)),
            else_branch: Box::new(subst_values(else_branch, map)),
        },
        _ => map_children(p, &mut |c| subst_values(c, map)),
    }
}

/// Rebuilds `p` with every immediate child transformed by `f`.
pub fn map_children(p: &Process, f: &mut dyn FnMut(&Process) -> Process) -> Process {
    match p {
        Process::Request { shared, parties, chans, body } => Process::Request {
            shared: shared.clone(),
            parties: *parties,
            chans: chans.clone(),
            body: Box::new(f(body)),
        },
        Process::Accept { shared, role, chans, body } => {
            Process::Accept { shared: shared.clone(), role: *role, chans: chans.clone(), body: Box::new(f(body)) }
        }
        Process::Send { chan, branches } => Process::Send {
            chan: chan.clone(),
            branches: branches.iter().map(|b| SendBranch { cont: f(&b.cont), ..b.clone() }).collect(),
        },
        Process::Recv { chan, branches } => Process::Recv {
            chan: chan.clone(),
            branches: branches.iter().map(|b| RecvBranch { binders: b.binders.clone(), cont: f(&b.cont) }).collect(),
        },
        Process::Deleg { chan, payload, cont } => {
            Process::Deleg { chan: chan.clone(), payload: payload.clone(), cont: Box::new(f(cont)) }
        }
        Process::SessRecv { chan, bound, cont } => {
            Process::SessRecv { chan: chan.clone(), bound: bound.clone(), cont: Box::new(f(cont)) }
        }
        Process::Select { chan, branches } => Process::Select {
            chan: chan.clone(),
            branches: branches
                .iter()
                .map(|b| SelectBranch { prob: b.prob.clone(), label: b.label.clone(), cont: f(&b.cont) })
                .collect(),
        },
        Process::Branch { chan, arms } => Process::Branch {
            chan: chan.clone(),
            arms: arms.iter().map(|a| BranchArm { label: a.label.clone(), cont: f(&a.cont) }).collect(),
        },
        Process::If { cond, then_branch, else_branch } => Process::If {
            cond: cond.clone(),
            then_branch: Box::new(f(then_branch)),
            else_branch: Box::new(f(else_branch)),
        },
        Process::Par(l, r) => Process::Par(Box::new(f(l)), Box::new(f(r))),
        Process::Hide { names, body } => Process::Hide { names: names.clone(), body: Box::new(f(body)) },
        Process::Rec { var, body } => Process::Rec { var: var.clone(), body: Box::new(f(body)) },
        Process::Inact | Process::Var(_) | Process::Error => p.clone(),
    }
}

/// Capture-avoiding substitution of channels for free names.
///
/// Binders that clash with a name in the range of the mapping are renamed
/// with `fresh`.
pub fn subst_chans(p: &Process, map: &BTreeMap<Name, Chan>, fresh: &mut FreshNames) -> Process {
    if map.is_empty() {
        return p.clone();
    }
    let range: BTreeSet<&str> = map.values().map(|c| c.name.as_str()).collect();
    subst_chans_inner(p, map, &range, fresh)
}

fn rename_chan(c: &Chan, map: &BTreeMap<Name, Chan>) -> Chan {
    match map.get(&c.name) {
        // A runtime role already on the occurrence wins over the mapping's.
        Some(target) => Chan { name: target.name.clone(), role: c.role.or(target.role) },
        None => c.clone(),
    }
}

/// Enters a binder: drops shadowed entries and renames binders that would
/// capture a name from the mapping's range.
fn enter_binders(
    binders: &[Name],
    body: &Process,
    map: &BTreeMap<Name, Chan>,
    range: &BTreeSet<&str>,
    fresh: &mut FreshNames,
) -> (Vec<Name>, Process, BTreeMap<Name, Chan>) {
    let mut inner = map.clone();
    for b in binders {
        inner.remove(b);
    }
    let body_free = free_names(body);
    let live = inner.keys().any(|k| body_free.contains(k));
    let mut new_binders = binders.to_vec();
    let mut body = body.clone();
    if live {
        let mut renaming = BTreeMap::new();
        for b in new_binders.iter_mut() {
            if range.contains(b.as_str()) {
                let n = fresh.fresh(b);
                renaming.insert(b.clone(), Chan::named(n.clone()));
                *b = n;
            }
        }
        if !renaming.is_empty() {
            body = subst_chans(&body, &renaming, fresh);
        }
    }
    (new_binders, body, inner)
}

fn subst_chans_inner(
    p: &Process,
    map: &BTreeMap<Name, Chan>,
    range: &BTreeSet<&str>,
    fresh: &mut FreshNames,
) -> Process {
    let rename_name = |n: &Name| map.get(n).map(|c| c.name.clone()).unwrap_or_else(|| n.clone());
    match p {
        Process::Request { shared, parties, chans, body } => {
            let (chans, body, inner) = enter_binders(chans, body, map, range, fresh);
            Process::Request {
                shared: rename_name(shared),
                parties: *parties,
                chans,
                body: Box::new(subst_chans_inner(&body, &inner, range, fresh)),
            }
        }
        Process::Accept { shared, role, chans, body } => {
            let (chans, body, inner) = enter_binders(chans, body, map, range, fresh);
            Process::Accept {
                shared: rename_name(shared),
                role: *role,
                chans,
                body: Box::new(subst_chans_inner(&body, &inner, range, fresh)),
            }
        }
        Process::SessRecv { chan, bound, cont } => {
            let (bound, cont, inner) = enter_binders(bound, cont, map, range, fresh);
            Process::SessRecv {
                chan: rename_chan(chan, map),
                bound,
                cont: Box::new(subst_chans_inner(&cont, &inner, range, fresh)),
            }
        }
        Process::Hide { names, body } => {
            let (names, body, inner) = enter_binders(names, body, map, range, fresh);
            Process::Hide { names, body: Box::new(subst_chans_inner(&body, &inner, range, fresh)) }
        }
        Process::Deleg { chan, payload, cont } => Process::Deleg {
            chan: rename_chan(chan, map),
            payload: payload.iter().map(|c| rename_chan(c, map)).collect(),
            cont: Box::new(subst_chans_inner(cont, map, range, fresh)),
        },
        _ => {
            let rebuilt = map_children(p, &mut |c| subst_chans_inner(c, map, range, fresh));
            with_subject(rebuilt, |c| rename_chan(c, map))
        }
    }
}

fn with_subject(p: Process, f: impl Fn(&Chan) -> Chan) -> Process {
    match p {
        Process::Send { chan, branches } => Process::Send { chan: f(&chan), branches },
        Process::Recv { chan, branches } => Process::Recv { chan: f(&chan), branches },
        Process::Select { chan, branches } => Process::Select { chan: f(&chan), branches },
        Process::Branch { chan, arms } => Process::Branch { chan: f(&chan), arms },
        other => other,
    }
}

/// Capture-avoiding substitution of `q` for the process variable `x`.
pub fn subst_process(p: &Process, x: &str, q: &Process) -> Process {
    let q_names = free_names(q);
    let q_vars = free_vars(q);
    let mut fresh = FreshNames::starting_at(max_fresh_index(p).max(max_fresh_index(q)) + 1);
    subst_proc_inner(p, x, q, &q_names, &q_vars, &mut fresh)
}

fn subst_proc_inner(
    p: &Process,
    x: &str,
    q: &Process,
    q_names: &BTreeSet<Name>,
    q_vars: &BTreeSet<String>,
    fresh: &mut FreshNames,
) -> Process {
    if !free_vars(p).contains(x) {
        return p.clone();
    }
    // Renames name binders that would capture free names of `q`.
    let protect = |binders: &[Name], body: &Process, fresh: &mut FreshNames| -> (Vec<Name>, Process) {
        let mut renaming = BTreeMap::new();
        let mut out = binders.to_vec();
        for b in out.iter_mut() {
            if q_names.contains(b) {
                let n = fresh.fresh(b);
                renaming.insert(b.clone(), Chan::named(n.clone()));
                *b = n;
            }
        }
        let body = if renaming.is_empty() { body.clone() } else { subst_chans(body, &renaming, fresh) };
        (out, body)
    };
    match p {
        Process::Var(y) if y == x => q.clone(),
        Process::Rec { var, .. } if var == x => p.clone(),
        Process::Rec { var, body } if q_vars.contains(var) => {
            let mut y = format!("{}'", var);
            while q_vars.contains(&y) || free_vars(body).contains(&y) {
                y.push('\'');
            }
            let body = subst_process(body, var, &Process::Var(y.clone()));
            Process::Rec { var: y, body: Box::new(subst_proc_inner(&body, x, q, q_names, q_vars, fresh)) }
        }
        Process::Request { shared, parties, chans, body } => {
            let (chans, body) = protect(chans, body, fresh);
            Process::Request {
                shared: shared.clone(),
                parties: *parties,
                chans,
                body: Box::new(subst_proc_inner(&body, x, q, q_names, q_vars, fresh)),
            }
        }
        Process::Accept { shared, role, chans, body } => {
            let (chans, body) = protect(chans, body, fresh);
            Process::Accept {
                shared: shared.clone(),
                role: *role,
                chans,
                body: Box::new(subst_proc_inner(&body, x, q, q_names, q_vars, fresh)),
            }
        }
        Process::SessRecv { chan, bound, cont } => {
            let (bound, cont) = protect(bound, cont, fresh);
            Process::SessRecv {
                chan: chan.clone(),
                bound,
                cont: Box::new(subst_proc_inner(&cont, x, q, q_names, q_vars, fresh)),
            }
        }
        Process::Hide { names, body } => {
            let (names, body) = protect(names, body, fresh);
            Process::Hide { names, body: Box::new(subst_proc_inner(&body, x, q, q_names, q_vars, fresh)) }
        }
        _ => map_children(p, &mut |c| subst_proc_inner(c, x, q, q_names, q_vars, fresh)),
    }
}

/// One unfolding of `mu X. P`.
pub fn unfold(var: &str, body: &Process) -> Process {
    let whole = Process::Rec { var: var.to_string(), body: Box::new(body.clone()) };
    subst_process(body, var, &whole)
}

/// Checks the branch-distinctness side conditions on every sum in `p` and
/// the guardedness of recursion variables. Returns a description of the
/// first violation.
pub fn check_side_conditions(p: &Process) -> Result<(), String> {
    match p {
        Process::Recv { branches, .. } => {
            for (i, a) in branches.iter().enumerate() {
                for b in &branches[i + 1..] {
                    if a.sorts() == b.sorts() {
                        return Err(format!(
                            "receive branches {} and {} share the sort tuple ({})",
                            i + 1,
                            i + 2,
                            a.sorts().iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", ")
                        ));
                    }
                }
            }
        }
        Process::Select { branches, .. } => {
            let labels: Vec<&str> = branches.iter().map(|b| b.label.as_str()).collect();
            duplicate_label(&labels)?;
        }
        Process::Branch { arms, .. } => {
            let labels: Vec<&str> = arms.iter().map(|b| b.label.as_str()).collect();
            duplicate_label(&labels)?;
        }
        Process::Rec { var, body } if !guarded(var, body) => {
            return Err(format!("recursion variable {} is not guarded by a prefix", var));
        }
        _ => {}
    }
    for c in p.children() {
        check_side_conditions(c)?;
    }
    Ok(())
}

fn duplicate_label(labels: &[&str]) -> Result<(), String> {
    let mut seen = BTreeSet::new();
    for l in labels {
        if !seen.insert(*l) {
            return Err(format!("label `{}` appears in more than one branch", l));
        }
    }
    Ok(())
}

/// Whether every free occurrence of `var` in `p` sits under a communication
/// or session prefix.
pub fn guarded(var: &str, p: &Process) -> bool {
    match p {
        Process::Var(y) => y != var,
        Process::Rec { var: y, body } => y == var || guarded(var, body),
        Process::Par(l, r) => guarded(var, l) && guarded(var, r),
        Process::If { then_branch, else_branch, .. } => guarded(var, then_branch) && guarded(var, else_branch),
        Process::Hide { body, .. } => guarded(var, body),
        _ => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn send1(chan: &str, e: Expr, cont: Process) -> Process {
        Process::Send { chan: Chan::named(chan), branches: vec![SendBranch::new(Rational::one(), vec![e], cont)] }
    }

    fn recv1(chan: &str, x: &str, s: Sort, cont: Process) -> Process {
        Process::Recv { chan: Chan::named(chan), branches: vec![RecvBranch { binders: vec![(x.into(), s)], cont }] }
    }

    #[test]
    fn inaction_has_no_free_names() {
        assert!(free_names(&Process::Inact).is_empty());
    }

    #[test]
    fn hiding_binds() {
        let p = Process::hide(
            vec!["n".into()],
            send1("n", Expr::Val(Value::Nat(1)), send1("m", Expr::Val(Value::Nat(2)), Process::Inact)),
        );
        let fns = free_names(&p);
        assert!(!fns.contains("n"));
        assert!(fns.contains("m"));
    }

    #[test]
    fn recursion_binds_its_variable() {
        let p = Process::Rec {
            var: "X".into(),
            body: Box::new(send1("c", Expr::Val(Value::Nat(1)), Process::Var("X".into()))),
        };
        assert!(free_vars(&p).is_empty());
        assert_eq!(free_vars(&Process::Var("Y".into())), ["Y".to_string()].into());
    }

    #[test]
    fn value_substitution_respects_shadowing() {
        let inner = send1("c", Expr::var("x"), Process::Inact);
        let p = send1("c", Expr::var("x"), recv1("c", "x", Sort::Nat, inner.clone()));
        let map: BTreeMap<_, _> = [("x".to_string(), Value::Nat(7))].into();
        let q = subst_values(&p, &map);
        match &q {
            Process::Send { branches, .. } => {
                assert_eq!(branches[0].exprs[0], Expr::Val(Value::Nat(7)));
                assert_eq!(branches[0].text, "x");
                match &branches[0].cont {
                    Process::Recv { branches, .. } => assert_eq!(branches[0].cont, inner),
                    other => panic!("unexpected {:?}", other),
                }
            }
            other => panic!("unexpected {:?}", other),
        }
        assert_eq!(subst_values(&p, &BTreeMap::new()), p);
        let untouched = send1("c", Expr::var("y"), Process::Inact);
        assert_eq!(subst_values(&untouched, &map), untouched);
    }

    #[test]
    fn disjoint_substitutions_commute() {
        let p = send1("c", Expr::bin(BinOp::Add, Expr::var("x"), Expr::var("y")), Process::Inact);
        let mx: BTreeMap<_, _> = [("x".to_string(), Value::Nat(1))].into();
        let my: BTreeMap<_, _> = [("y".to_string(), Value::Nat(2))].into();
        assert_eq!(subst_values(&subst_values(&p, &mx), &my), subst_values(&subst_values(&p, &my), &mx));
    }

    #[test]
    fn unfolding_recursion() {
        assert_eq!(unfold("X", &Process::Inact), Process::Inact);
        let body = send1("c", Expr::Val(Value::Nat(1)), Process::Var("X".into()));
        let rec = Process::Rec { var: "X".into(), body: Box::new(body.clone()) };
        assert_eq!(unfold("X", &body), send1("c", Expr::Val(Value::Nat(1)), rec));
        let plain = send1("c", Expr::Val(Value::Nat(1)), Process::Inact);
        assert_eq!(subst_process(&plain, "X", &Process::Inact), plain);
    }

    #[test]
    fn process_substitution_avoids_name_capture() {
        // mu X. new c in (c!<1>; X) unfolded with a free `c` in the substituted term.
        let q = send1("c", Expr::Val(Value::Nat(9)), Process::Inact);
        let p = Process::hide(vec!["c".into()], send1("c", Expr::Val(Value::Nat(1)), Process::Var("X".into())));
        let r = subst_process(&p, "X", &q);
        assert!(free_names(&r).contains("c"), "substituted `c` must stay free: {:?}", r);
    }

    #[test]
    fn channel_substitution_renames_clashing_binders() {
        // new b in (a!<1>; b!<2>) with a := b must not capture.
        let p = Process::hide(
            vec!["b".into()],
            send1("a", Expr::Val(Value::Nat(1)), send1("b", Expr::Val(Value::Nat(2)), Process::Inact)),
        );
        let map: BTreeMap<_, _> = [("a".to_string(), Chan::named("b"))].into();
        let mut fresh = FreshNames::for_process(&p);
        let q = subst_chans(&p, &map, &mut fresh);
        assert_eq!(free_names(&q), ["b".to_string()].into());
    }

    #[test]
    fn evaluates_expressions() {
        let env: BTreeMap<_, _> = [("quote".to_string(), Value::Nat(100))].into();
        let e = Expr::bin(BinOp::Div, Expr::var("quote"), Expr::Val(Value::Nat(2)));
        assert_eq!(eval_expr(&e, &env), Ok(Value::Nat(50)));
        let e3 = Expr::bin(BinOp::Div, Expr::var("quote"), Expr::Val(Value::Nat(3)));
        assert_eq!(eval_expr(&e3, &env), Ok(Value::Nat(33)));
        let neg = Expr::bin(BinOp::Div, Expr::Val(Value::Int(-7)), Expr::Val(Value::Nat(2)));
        assert_eq!(eval_expr(&neg, &env), Ok(Value::Int(-3)));
        let b = Expr::bin(BinOp::And, Expr::Val(Value::Bool(true)), Expr::Val(Value::Bool(false)));
        assert_eq!(eval_expr(&b, &env), Ok(Value::Bool(false)));
        let bad = Expr::Un(UnOp::Not, Box::new(Expr::Val(Value::Nat(3))));
        assert!(matches!(eval_expr(&bad, &env), Err(EvalError::Mismatch { .. })));
        let div0 = Expr::bin(BinOp::Div, Expr::var("quote"), Expr::Val(Value::Nat(0)));
        assert_eq!(eval_expr(&div0, &env), Err(EvalError::DivByZero));
        assert!(matches!(eval_expr(&Expr::var("zz"), &env), Err(EvalError::Unbound(_))));
    }

    #[test]
    fn sorts_of_expressions() {
        let env: BTreeMap<_, _> = [("q".to_string(), Sort::Int)].into();
        let e = Expr::bin(BinOp::Div, Expr::var("q"), Expr::Val(Value::Nat(2)));
        assert_eq!(expr_sort(&e, &env), Ok(Sort::Int));
        let c = Expr::bin(BinOp::Ge, Expr::var("q"), Expr::Val(Value::Nat(2)));
        assert_eq!(expr_sort(&c, &env), Ok(Sort::Bool));
        assert!(expr_sort(&Expr::Un(UnOp::Not, Box::new(Expr::var("q"))), &env).is_err());
    }

    #[test]
    fn detects_side_condition_violations() {
        let dup = Process::Recv {
            chan: Chan::named("c"),
            branches: vec![
                RecvBranch { binders: vec![("x".into(), Sort::Nat)], cont: Process::Inact },
                RecvBranch { binders: vec![("y".into(), Sort::Nat)], cont: Process::Inact },
            ],
        };
        assert!(check_side_conditions(&dup).is_err());
        let unguarded = Process::Rec { var: "X".into(), body: Box::new(Process::Var("X".into())) };
        assert!(check_side_conditions(&unguarded).is_err());
    }
}
