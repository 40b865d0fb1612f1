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

use std::collections::{BTreeMap, BTreeSet};

use super::lexer::{lex, Tok, Token};
use super::ParseError;
use crate::ast::{
    BinOp, BranchArm, Chan, Expr, Name, Participant, Process, RecvBranch, SelectBranch, SendBranch, Sort, UnOp, Value,
};
use crate::kernel::{point, ProbInterval, Rational};
use crate::types::local::{ChanRef, LBranchArm, LRecvBranch, LSelectBranch, LSendBranch};
use crate::types::{GLabelBranch, GValueBranch, GlobalType, LocalType, RoleNames};

/// Names visible while parsing: roles, and earlier declarations that are
/// inlined on reference.
#[derive(Debug, Clone, Default)]
pub struct Scope {
    pub roles: RoleNames,
    pub globals: BTreeMap<String, GlobalType>,
    pub procs: BTreeMap<String, Process>,
}

pub struct Parser<'s> {
    toks: Vec<Token>,
    pos: usize,
    scope: &'s Scope,
}

type PResult<T> = Result<T, ParseError>;

fn is_sort_kw(s: &str) -> bool {
    matches!(s, "bool" | "nat" | "int" | "string" | "date")
}

const KEYWORDS: &[&str] = &[
    "request", "accept", "new", "in", "mu", "if", "then", "else", "error", "end", "true", "false", "and", "or", "not",
];

impl<'s> Parser<'s> {
    pub fn new(src: &str, scope: &'s Scope) -> PResult<Parser<'s>> {
        Ok(Parser { toks: lex(src)?, pos: 0, scope })
    }

    pub fn from_tokens(toks: Vec<Token>, scope: &'s Scope) -> Parser<'s> {
        Parser { toks, pos: 0, scope }
    }

    pub fn skip_to(&mut self, pos: usize) {
        self.pos = pos.min(self.toks.len() - 1);
    }

    pub fn offset(&self) -> usize {
        self.pos
    }

    pub fn position(&self) -> (usize, usize) {
        self.here()
    }

    /// Any identifier, keywords included.
    pub fn ident_or_kw(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => self.err(format!("expected a declaration, found {}", describe(&other))),
        }
    }

    pub fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, t: &Tok) -> PResult<()> {
        if self.eat(t) {
            Ok(())
        } else {
            self.err(format!("expected {}, found {}", describe(t), describe(self.peek())))
        }
    }

    pub fn positive(&mut self) -> PResult<u32> {
        let (l, c) = self.here();
        let n = self.number()?;
        n.parse::<u32>()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| ParseError::new(l, c, format!("expected a positive integer, found `{}`", n)))
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        let (l, c) = self.here();
        Err(ParseError::new(l, c, msg))
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.err(format!("expected `{}`, found {}", s, describe(self.peek())))
        }
    }

    fn expect_kw(&mut self, s: &str) -> PResult<()> {
        if self.is_kw(s) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected `{}`, found {}", s, describe(self.peek())))
        }
    }

    pub fn expect_eof(&mut self) -> PResult<()> {
        if matches!(self.peek(), Tok::Eof) {
            Ok(())
        } else {
            self.err(format!("unexpected {}", describe(self.peek())))
        }
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    pub fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            other => self.err(format!("expected an identifier, found {}", describe(&other))),
        }
    }

    fn number(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Num(s) => {
                self.bump();
                Ok(s)
            }
            other => self.err(format!("expected a number, found {}", describe(&other))),
        }
    }

    /// `0.3` or `3/10`.
    fn rational(&mut self) -> PResult<Rational> {
        let (l, c) = self.here();
        let mut text = self.number()?;
        if self.is_sym("/") && matches!(self.peek_at(1), Tok::Num(_)) {
            self.bump();
            text = format!("{}/{}", text, self.number()?);
        }
        text.parse().map_err(|e| ParseError::new(l, c, format!("{}", e)))
    }

    fn probability(&mut self) -> PResult<Rational> {
        let (l, c) = self.here();
        let p = self.rational()?;
        if !p.is_probability() {
            return Err(ParseError::new(l, c, format!("probability {} is outside [0,1]", p)));
        }
        Ok(p)
    }

    /// `[a,b]`, `(a,b]`, `[a,b)`, `(a,b)` or a bare point.
    pub fn interval(&mut self) -> PResult<ProbInterval> {
        let (l, c) = self.here();
        let wrap =
            |r: Result<ProbInterval, crate::kernel::KernelError>| r.map_err(|e| ParseError::new(l, c, e.to_string()));
        if matches!(self.peek(), Tok::Num(_)) {
            return wrap(point(self.rational()?));
        }
        let lo_closed = if self.eat_sym("[") {
            true
        } else if self.eat_sym("(") {
            false
        } else {
            return self.err(format!("expected a probability interval, found {}", describe(self.peek())));
        };
        let lo = self.rational()?;
        self.expect_sym(",")?;
        let hi = self.rational()?;
        let hi_closed = if self.eat_sym("]") {
            true
        } else if self.eat_sym(")") {
            false
        } else {
            return self.err("expected `]` or `)` closing the interval");
        };
        wrap(ProbInterval::new(lo, hi, lo_closed, hi_closed))
    }

    pub fn participant(&mut self) -> PResult<Participant> {
        let (l, c) = self.here();
        match self.peek().clone() {
            Tok::Num(s) => {
                self.bump();
                match s.parse::<u32>() {
                    Ok(n) if n > 0 => Ok(Participant(n)),
                    _ => Err(ParseError::new(l, c, format!("participant `{}` must be a positive integer", s))),
                }
            }
            Tok::Ident(s) => match self.scope.roles.lookup(&s) {
                Some(r) => {
                    self.bump();
                    Ok(r)
                }
                None => self.err(format!("unknown role `{}`", s)),
            },
            other => self.err(format!("expected a participant, found {}", describe(&other))),
        }
    }

    fn sort(&mut self) -> PResult<Sort> {
        match self.peek().clone() {
            Tok::Ident(s) if is_sort_kw(&s) => {
                self.bump();
                Ok(match s.as_str() {
                    "bool" => Sort::Bool,
                    "nat" => Sort::Nat,
                    "int" => Sort::Int,
                    _ => Sort::Str,
                })
            }
            other => self.err(format!("expected a sort, found {}", describe(&other))),
        }
    }

    /// Comma-separated list up to (and consuming) `close`.
    fn list<T>(&mut self, close: &str, mut item: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        let mut out = Vec::new();
        if self.eat_sym(close) {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.eat_sym(close) {
                return Ok(out);
            }
            self.expect_sym(",")?;
        }
    }

    fn chan(&mut self) -> PResult<Chan> {
        let name = self.ident()?;
        let role = if self.eat_sym("@") { Some(self.participant()?) } else { None };
        Ok(Chan { name, role })
    }

    fn sep(&mut self) -> PResult<()> {
        if self.eat_sym(";") || self.eat_sym(".") {
            Ok(())
        } else {
            self.err(format!("expected `;` or `.`, found {}", describe(self.peek())))
        }
    }

    // ---------------------------------------------------------------- expressions

    pub fn expr(&mut self, no_gt: bool) -> PResult<Expr> {
        self.expr_bin(1, no_gt)
    }

    fn binop(&self, no_gt: bool) -> Option<BinOp> {
        Some(match self.peek() {
            Tok::Ident(s) if s == "or" => BinOp::Or,
            Tok::Ident(s) if s == "and" => BinOp::And,
            Tok::Sym("==") => BinOp::Eq,
            Tok::Sym("!=") => BinOp::Ne,
            Tok::Sym("<") => BinOp::Lt,
            Tok::Sym("<=") => BinOp::Le,
            Tok::Sym(">") if !no_gt => BinOp::Gt,
            Tok::Sym(">=") if !no_gt => BinOp::Ge,
            Tok::Sym("+") => BinOp::Add,
            Tok::Sym("-") => BinOp::Sub,
            Tok::Sym("*") => BinOp::Mul,
            Tok::Sym("/") => BinOp::Div,
            _ => return None,
        })
    }

    fn expr_bin(&mut self, min: u8, no_gt: bool) -> PResult<Expr> {
        let mut lhs = self.expr_unary()?;
        while let Some(op) = self.binop(no_gt) {
            let p = op.precedence();
            if p < min {
                break;
            }
            self.bump();
            let rhs = self.expr_bin(p + 1, no_gt)?;
            if op.is_comparison() {
                if let Some(op2) = self.binop(no_gt) {
                    if op2.is_comparison() {
                        return self.err("comparisons do not chain; add parentheses");
                    }
                }
            }
            lhs = Expr::bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn expr_unary(&mut self) -> PResult<Expr> {
        if self.is_kw("not") {
            self.bump();
            return Ok(Expr::Un(UnOp::Not, Box::new(self.expr_unary()?)));
        }
        if self.eat_sym("-") {
            return Ok(Expr::Un(UnOp::Neg, Box::new(self.expr_unary()?)));
        }
        self.expr_atom()
    }

    fn expr_atom(&mut self) -> PResult<Expr> {
        let (l, c) = self.here();
        match self.peek().clone() {
            Tok::Num(s) => {
                self.bump();
                if s.contains('.') {
                    return Err(ParseError::new(l, c, format!("`{}`: only natural number literals are supported", s)));
                }
                s.parse::<u64>()
                    .map(|n| Expr::Val(Value::Nat(n)))
                    .map_err(|_| ParseError::new(l, c, format!("literal `{}` is too large", s)))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(Expr::Val(Value::Str(s)))
            }
            Tok::Ident(s) if s == "true" || s == "false" => {
                self.bump();
                Ok(Expr::Val(Value::Bool(s == "true")))
            }
            Tok::Ident(s) if s == "int" && matches!(self.peek_at(1), Tok::Sym("(")) => {
                self.bump();
                self.bump();
                let inner = self.expr(false)?;
                self.expect_sym(")")?;
                Ok(fold_int_literal(inner))
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr(false)?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Ident(_) => Ok(Expr::Var(self.ident()?)),
            other => self.err(format!("expected an expression, found {}", describe(&other))),
        }
    }

    // ---------------------------------------------------------------- processes

    /// `P | Q | ...`, left-associated.
    pub fn process(&mut self) -> PResult<Process> {
        let mut p = self.proc_sum()?;
        while self.eat_sym("|") {
            let q = self.proc_sum()?;
            p = Process::par(p, q);
        }
        Ok(p)
    }

    fn proc_sum(&mut self) -> PResult<Process> {
        let first_pos = self.here();
        let first = self.proc_unit()?;
        if !self.is_sym("+") {
            if let Process::Branch { arms, .. } = &first {
                check_dup_labels(arms.iter().map(|a| (a.label.as_str(), first_pos)).collect())?;
            }
            return Ok(first);
        }
        let mut positions = vec![first_pos];
        let mut acc = first;
        while self.eat_sym("+") {
            let pos = self.here();
            let next = self.proc_unit()?;
            acc = match (acc, next) {
                (Process::Send { chan, mut branches }, Process::Send { chan: c2, branches: b2 }) if chan == c2 => {
                    positions.extend(b2.iter().map(|_| pos));
                    branches.extend(b2);
                    Process::Send { chan, branches }
                }
                (Process::Recv { chan, mut branches }, Process::Recv { chan: c2, branches: b2 }) if chan == c2 => {
                    positions.extend(b2.iter().map(|_| pos));
                    branches.extend(b2);
                    Process::Recv { chan, branches }
                }
                (Process::Select { chan, mut branches }, Process::Select { chan: c2, branches: b2 }) if chan == c2 => {
                    positions.extend(b2.iter().map(|_| pos));
                    branches.extend(b2);
                    Process::Select { chan, branches }
                }
                (a, _) => {
                    return Err(ParseError::new(
                        pos.0,
                        pos.1,
                        format!(
                            "a sum must consist of {} on the same channel; this branch does not match",
                            sum_kind(&a).unwrap_or("sends, receives or selections")
                        ),
                    ));
                }
            };
        }
        match &acc {
            Process::Recv { branches, .. } => {
                for i in 0..branches.len() {
                    for j in i + 1..branches.len() {
                        if branches[i].sorts() == branches[j].sorts() {
                            let (l1, c1) = positions[i];
                            let (l2, c2) = positions[j];
                            return Err(ParseError::new(
                                l2,
                                c2,
                                format!(
                                    "receive branches at {}:{} and {}:{} expect the same sorts ({})",
                                    l1,
                                    c1,
                                    l2,
                                    c2,
                                    branches[i].sorts().iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", ")
                                ),
                            ));
                        }
                    }
                }
            }
            Process::Select { branches, .. } => {
                check_dup_labels(branches.iter().zip(&positions).map(|(b, p)| (b.label.as_str(), *p)).collect())?;
            }
            _ => {}
        }
        Ok(acc)
    }

    /// A single prefix, binder form or atom.
    fn proc_unit(&mut self) -> PResult<Process> {
        let (l, c) = self.here();
        match self.peek().clone() {
            Tok::Num(s) => {
                let is_prob = matches!(self.peek_at(1), Tok::Sym(":"))
                    || (matches!(self.peek_at(1), Tok::Sym("/")) && matches!(self.peek_at(3), Tok::Sym(":")));
                if !is_prob {
                    if s == "0" {
                        self.bump();
                        return Ok(Process::Inact);
                    }
                    return self.err(format!("expected a process, found number `{}`", s));
                }
                let prob = self.probability()?;
                self.expect_sym(":")?;
                let chan = self.chan()?;
                if self.eat_sym("!") {
                    self.expect_sym("<")?;
                    let exprs = self.list(">", |p| p.expr(true))?;
                    self.sep()?;
                    let cont = self.proc_unit()?;
                    Ok(Process::Send { chan, branches: vec![SendBranch::new(prob, exprs, cont)] })
                } else if self.eat_sym("<+") {
                    let label = self.ident()?;
                    self.sep()?;
                    let cont = self.proc_unit()?;
                    Ok(Process::Select { chan, branches: vec![SelectBranch { prob, label, cont }] })
                } else {
                    self.err("expected `!<` or `<+` after a probability and channel")
                }
            }
            Tok::Sym("(") => {
                self.bump();
                let p = self.process()?;
                self.expect_sym(")")?;
                Ok(p)
            }
            Tok::Ident(k) => match k.as_str() {
                "request" => {
                    self.bump();
                    let shared = self.ident()?;
                    self.expect_sym("[")?;
                    let n = self.number()?;
                    let parties = n
                        .parse::<u32>()
                        .ok()
                        .filter(|n| *n >= 2)
                        .ok_or_else(|| ParseError::new(l, c, "a session needs at least two participants"))?;
                    self.expect_sym("]")?;
                    self.expect_sym("(")?;
                    let chans = self.list(")", |p| p.ident())?;
                    distinct_binders(&chans, l, c)?;
                    self.sep()?;
                    let body = self.proc_sum()?;
                    Ok(Process::Request { shared, parties, chans, body: Box::new(body) })
                }
                "accept" => {
                    self.bump();
                    let shared = self.ident()?;
                    self.expect_sym("[")?;
                    let role = self.participant()?;
                    self.expect_sym("]")?;
                    self.expect_sym("(")?;
                    let chans = self.list(")", |p| p.ident())?;
                    distinct_binders(&chans, l, c)?;
                    self.sep()?;
                    let body = self.proc_sum()?;
                    Ok(Process::Accept { shared, role, chans, body: Box::new(body) })
                }
                "new" => {
                    self.bump();
                    let names = if self.eat_sym("(") { self.list(")", |p| p.ident())? } else { vec![self.ident()?] };
                    if names.is_empty() {
                        return Err(ParseError::new(l, c, "`new` needs at least one name"));
                    }
                    distinct_binders(&names, l, c)?;
                    self.expect_kw("in")?;
                    let body = self.proc_sum()?;
                    Ok(Process::hide(names, body))
                }
                "mu" => {
                    self.bump();
                    let var = self.ident()?;
                    self.sep()?;
                    let body = self.proc_sum()?;
                    Ok(Process::Rec { var, body: Box::new(body) })
                }
                "if" => {
                    self.bump();
                    let cond = self.expr(false)?;
                    self.expect_kw("then")?;
                    let t = self.proc_sum()?;
                    self.expect_kw("else")?;
                    let e = self.proc_sum()?;
                    Ok(Process::If { cond, then_branch: Box::new(t), else_branch: Box::new(e) })
                }
                "error" => {
                    self.bump();
                    Ok(Process::Error)
                }
                _ => self.proc_channel_prefix(),
            },
            other => self.err(format!("expected a process, found {}", describe(&other))),
        }
    }

    /// Prefixes starting with a channel, process references and variables.
    fn proc_channel_prefix(&mut self) -> PResult<Process> {
        let (l, c) = self.here();
        let is_prefix = match self.peek_at(1) {
            Tok::Sym("?") | Tok::Sym("!!") | Tok::Sym("??") | Tok::Sym(">>") | Tok::Sym("@") => true,
            Tok::Sym("!") => matches!(self.peek_at(2), Tok::Sym("<")),
            _ => false,
        };
        if !is_prefix {
            let name = self.ident()?;
            if let Some(p) = self.scope.procs.get(&name) {
                return Ok(p.clone());
            }
            return Ok(Process::Var(name));
        }
        let chan = self.chan()?;
        if self.eat_sym("?") {
            self.expect_sym("(")?;
            let binders = self.list(")", |p| {
                let x = p.ident()?;
                p.expect_sym(":")?;
                Ok((x, p.sort()?))
            })?;
            let names: Vec<Name> = binders.iter().map(|(x, _)| x.clone()).collect();
            distinct_binders(&names, l, c)?;
            self.sep()?;
            let cont = self.proc_unit()?;
            Ok(Process::Recv { chan, branches: vec![RecvBranch { binders, cont }] })
        } else if self.eat_sym("!!") {
            self.expect_sym("(")?;
            let payload = self.list(")", |p| p.chan())?;
            self.sep()?;
            let cont = self.proc_unit()?;
            Ok(Process::Deleg { chan, payload, cont: Box::new(cont) })
        } else if self.eat_sym("??") {
            self.expect_sym("(")?;
            let bound = self.list(")", |p| p.ident())?;
            distinct_binders(&bound, l, c)?;
            self.sep()?;
            let cont = self.proc_unit()?;
            Ok(Process::SessRecv { chan, bound, cont: Box::new(cont) })
        } else if self.eat_sym(">>") {
            self.expect_sym("{")?;
            let arms = self.list("}", |p| {
                let label = p.ident()?;
                p.expect_sym(":")?;
                Ok(BranchArm { label, cont: p.process()? })
            })?;
            Ok(Process::Branch { chan, arms })
        } else if self.is_sym("!") {
            self.err("a value send needs a probability, as in `1: c!<e>; P`")
        } else {
            self.err(format!("expected a communication prefix after channel `{}`", chan))
        }
    }

    // ---------------------------------------------------------------- global types

    pub fn global(&mut self) -> PResult<GlobalType> {
        let mut g = self.global_sum()?;
        while self.eat_sym(",") {
            let h = self.global_sum()?;
            g = GlobalType::Par(Box::new(g), Box::new(h));
        }
        Ok(g)
    }

    fn global_sum(&mut self) -> PResult<GlobalType> {
        let mut acc = self.global_unit()?;
        while self.is_sym("+") {
            self.bump();
            let pos = self.here();
            let next = self.global_unit()?;
            acc = match (acc, next) {
                (
                    GlobalType::Values { from, to, chan, mut branches },
                    GlobalType::Values { from: f2, to: t2, chan: c2, branches: b2 },
                ) if from == f2 && to == t2 && chan == c2 => {
                    branches.extend(b2);
                    GlobalType::Values { from, to, chan, branches }
                }
                (
                    GlobalType::Labels { from, to, chan, mut branches },
                    GlobalType::Labels { from: f2, to: t2, chan: c2, branches: b2 },
                ) if from == f2 && to == t2 && chan == c2 => {
                    branches.extend(b2);
                    GlobalType::Labels { from, to, chan, branches }
                }
                _ => {
                    return Err(ParseError::new(
                        pos.0,
                        pos.1,
                        "branches of a sum must share sender, receiver, channel and kind",
                    ))
                }
            };
        }
        Ok(acc)
    }

    fn global_unit(&mut self) -> PResult<GlobalType> {
        let (l, c) = self.here();
        match self.peek().clone() {
            Tok::Sym("(") => {
                self.bump();
                let g = self.global()?;
                self.expect_sym(")")?;
                Ok(g)
            }
            Tok::Ident(k) if k == "end" => {
                self.bump();
                Ok(GlobalType::End)
            }
            Tok::Ident(k) if k == "mu" => {
                self.bump();
                let t = self.ident()?;
                self.sep()?;
                let body = self.global_sum()?;
                Ok(GlobalType::Rec(t, Box::new(body)))
            }
            Tok::Ident(_) if !matches!(self.peek_at(1), Tok::Sym("->")) => {
                let name = self.ident()?;
                Ok(match self.scope.globals.get(&name) {
                    Some(g) => g.clone(),
                    None => GlobalType::Var(name),
                })
            }
            Tok::Ident(_) | Tok::Num(_) => {
                let from = self.participant()?;
                self.expect_sym("->")?;
                let interval = self.interval()?;
                let to = self.participant()?;
                if from == to {
                    return Err(ParseError::new(l, c, format!("participant {} interacts with itself", from)));
                }
                self.expect_sym(":")?;
                let chan = self.ident()?;
                if self.eat_sym("{") {
                    let label = self.ident()?;
                    if !self.eat_sym(":") {
                        self.expect_sym(".")?;
                    }
                    let cont = self.global()?;
                    self.expect_sym("}")?;
                    return Ok(GlobalType::Labels {
                        from,
                        to,
                        chan,
                        branches: vec![GLabelBranch { interval, label, cont }],
                    });
                }
                self.expect_sym("<")?;
                if self.sort_list_ahead() {
                    let sorts = self.list(">", |p| p.sort())?;
                    self.sep()?;
                    let cont = self.global_unit()?;
                    return Ok(GlobalType::Values {
                        from,
                        to,
                        chan,
                        branches: vec![GValueBranch { interval, sorts, cont }],
                    });
                }
                if !interval.is_point() || !interval.lo().is_one() {
                    return Err(ParseError::new(l, c, "delegation happens with probability 1"));
                }
                let carried = self.local_indexed()?;
                self.expect_sym("@")?;
                let role = self.participant()?;
                self.expect_sym(">")?;
                self.sep()?;
                let cont = self.global_unit()?;
                Ok(GlobalType::Deleg { from, to, chan, carried: Box::new(carried), role, cont: Box::new(cont) })
            }
            other => self.err(format!("expected a global type, found {}", describe(&other))),
        }
    }

    /// Whether the tokens ahead form a (possibly empty) sort list closed by
    /// `>` or `)`.
    fn sort_list_ahead(&self) -> bool {
        match self.peek() {
            Tok::Sym(">") | Tok::Sym(")") => true,
            Tok::Ident(s) if is_sort_kw(s) => matches!(self.peek_at(1), Tok::Sym(",") | Tok::Sym(">") | Tok::Sym(")")),
            _ => false,
        }
    }

    // ---------------------------------------------------------------- local types

    /// A local type whose channels are indexed in lexicographic order.
    pub fn local_indexed(&mut self) -> PResult<LocalType> {
        let t = self.local()?;
        Ok(index_channels(&t))
    }

    fn local(&mut self) -> PResult<LocalType> {
        let mut acc = self.local_unit()?;
        while self.is_sym("+") {
            self.bump();
            let pos = self.here();
            let next = self.local_unit()?;
            acc = match (acc, next) {
                (LocalType::Send { chan, mut branches }, LocalType::Send { chan: c2, branches: b2 })
                    if chan.name == c2.name =>
                {
                    branches.extend(b2);
                    LocalType::Send { chan, branches }
                }
                (LocalType::Recv { chan, mut branches }, LocalType::Recv { chan: c2, branches: b2 })
                    if chan.name == c2.name =>
                {
                    branches.extend(b2);
                    LocalType::Recv { chan, branches }
                }
                _ => {
                    return Err(ParseError::new(
                        pos.0,
                        pos.1,
                        "a type sum must consist of sends or receives on one channel",
                    ));
                }
            };
        }
        Ok(acc)
    }

    fn local_unit(&mut self) -> PResult<LocalType> {
        let unindexed = |name: String| ChanRef::new(usize::MAX, name);
        match self.peek().clone() {
            // `(0.5, …` opens an interval, `(0.5: …` a group.
            Tok::Sym("(") if !(matches!(self.peek_at(1), Tok::Num(_)) && matches!(self.peek_at(2), Tok::Sym(","))) => {
                self.bump();
                let t = self.local()?;
                self.expect_sym(")")?;
                Ok(t)
            }
            Tok::Sym("_") => {
                self.bump();
                Ok(LocalType::Hole)
            }
            Tok::Sym("[") | Tok::Sym("(") | Tok::Num(_) => {
                let interval = self.interval()?;
                self.expect_sym(":")?;
                let chan = self.ident()?;
                self.expect_sym("!")?;
                self.expect_sym("<")?;
                let sorts = self.list(">", |p| p.sort())?;
                self.sep()?;
                let cont = self.local_unit()?;
                Ok(LocalType::Send { chan: unindexed(chan), branches: vec![LSendBranch { interval, sorts, cont }] })
            }
            Tok::Ident(k) if k == "end" => {
                self.bump();
                Ok(LocalType::End)
            }
            Tok::Ident(k) if k == "mu" => {
                self.bump();
                let t = self.ident()?;
                self.sep()?;
                let body = self.local()?;
                Ok(LocalType::Rec(t, Box::new(body)))
            }
            Tok::Ident(_) => {
                let name = self.ident()?;
                if self.eat_sym("!") {
                    self.expect_sym("<")?;
                    if self.sort_list_ahead() {
                        let sorts = self.list(">", |p| p.sort())?;
                        self.sep()?;
                        let cont = self.local_unit()?;
                        let interval = point(Rational::one()).expect("1 is a probability");
                        return Ok(LocalType::Send {
                            chan: unindexed(name),
                            branches: vec![LSendBranch { interval, sorts, cont }],
                        });
                    }
                    let carried = self.local_indexed()?;
                    self.expect_sym("@")?;
                    let role = self.participant()?;
                    self.expect_sym(">")?;
                    self.sep()?;
                    let cont = self.local_unit()?;
                    Ok(LocalType::Deleg {
                        chan: unindexed(name),
                        carried: Box::new(carried),
                        role,
                        cont: Box::new(cont),
                    })
                } else if self.eat_sym("?") {
                    self.expect_sym("(")?;
                    if self.sort_list_ahead() {
                        let sorts = self.list(")", |p| p.sort())?;
                        self.sep()?;
                        let cont = self.local_unit()?;
                        return Ok(LocalType::Recv {
                            chan: unindexed(name),
                            branches: vec![LRecvBranch { sorts, cont }],
                        });
                    }
                    let carried = self.local_indexed()?;
                    self.expect_sym("@")?;
                    let role = self.participant()?;
                    self.expect_sym(")")?;
                    self.sep()?;
                    let cont = self.local_unit()?;
                    Ok(LocalType::SessRecv {
                        chan: unindexed(name),
                        carried: Box::new(carried),
                        role,
                        cont: Box::new(cont),
                    })
                } else if self.eat_sym("(+)") {
                    let pos = self.here();
                    self.expect_sym("{")?;
                    let branches = self.list("}", |p| {
                        let interval = p.interval()?;
                        p.expect_sym(":")?;
                        let label = p.ident()?;
                        p.expect_sym(":")?;
                        Ok(LSelectBranch { interval, label, cont: p.local()? })
                    })?;
                    check_dup_labels(branches.iter().map(|b| (b.label.as_str(), pos)).collect())?;
                    Ok(LocalType::Select { chan: unindexed(name), branches })
                } else if self.eat_sym("&") {
                    let pos = self.here();
                    self.expect_sym("{")?;
                    let arms = self.list("}", |p| {
                        let label = p.ident()?;
                        p.expect_sym(":")?;
                        Ok(LBranchArm { label, cont: p.local()? })
                    })?;
                    check_dup_labels(arms.iter().map(|b| (b.label.as_str(), pos)).collect())?;
                    Ok(LocalType::Branch { chan: unindexed(name), arms })
                } else {
                    Ok(LocalType::Var(name))
                }
            }
            other => self.err(format!("expected a local type, found {}", describe(&other))),
        }
    }
}

fn fold_int_literal(e: Expr) -> Expr {
    match &e {
        Expr::Val(Value::Nat(n)) => match i64::try_from(*n) {
            Ok(i) => Expr::Val(Value::Int(i)),
            Err(_) => Expr::Un(UnOp::ToInt, Box::new(e)),
        },
        Expr::Un(UnOp::Neg, inner) => match inner.as_ref() {
            Expr::Val(Value::Nat(n)) if *n <= i64::MAX as u64 => Expr::Val(Value::Int(-(*n as i64))),
            _ => Expr::Un(UnOp::ToInt, Box::new(e)),
        },
        _ => Expr::Un(UnOp::ToInt, Box::new(e)),
    }
}

fn sum_kind(p: &Process) -> Option<&'static str> {
    match p {
        Process::Send { .. } => Some("value sends"),
        Process::Recv { .. } => Some("value receives"),
        Process::Select { .. } => Some("selections"),
        _ => None,
    }
}

fn check_dup_labels(labels: Vec<(&str, (usize, usize))>) -> PResult<()> {
    let mut seen: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for (label, pos) in labels {
        if let Some(first) = seen.get(label) {
            return Err(ParseError::new(
                pos.0,
                pos.1,
                format!("duplicate label `{}` (branches at {}:{} and {}:{})", label, first.0, first.1, pos.0, pos.1),
            ));
        }
        seen.insert(label, pos);
    }
    Ok(())
}

fn distinct_binders(names: &[Name], l: usize, c: usize) -> PResult<()> {
    let mut seen = BTreeSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(ParseError::new(l, c, format!("`{}` is bound twice", n)));
        }
    }
    Ok(())
}

/// Assigns channel indices by lexicographic order of the names used.
pub fn index_channels(t: &LocalType) -> LocalType {
    let names: BTreeSet<Name> = t.channels().into_iter().map(|(_, n)| n).collect();
    let order: BTreeMap<Name, usize> = names.into_iter().enumerate().map(|(i, n)| (n, i)).collect();
    reindex(t, &order)
}

fn reindex(t: &LocalType, order: &BTreeMap<Name, usize>) -> LocalType {
    let mut out = t.map_children(&mut |c| reindex(c, order));
    let fix = |c: &mut ChanRef| {
        if let Some(i) = order.get(&c.name) {
            c.idx = *i;
        }
    };
    match &mut out {
        LocalType::Send { chan, .. }
        | LocalType::Recv { chan, .. }
        | LocalType::Deleg { chan, .. }
        | LocalType::SessRecv { chan, .. }
        | LocalType::Select { chan, .. }
        | LocalType::Branch { chan, .. } => fix(chan),
        _ => {}
    }
    out
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{}`", s),
        Tok::Num(s) => format!("number `{}`", s),
        Tok::Str(s) => format!("string \"{}\"", s),
        Tok::Sym(s) => format!("`{}`", s),
        Tok::Eof => "end of input".to_string(),
    }
}

fn whole<T>(src: &str, scope: &Scope, f: impl FnOnce(&mut Parser) -> PResult<T>) -> PResult<T> {
    let mut p = Parser::new(src, scope)?;
    let v = f(&mut p)?;
    p.expect_eof()?;
    Ok(v)
}

pub fn parse_process(src: &str) -> PResult<Process> {
    whole(src, &Scope::default(), |p| p.process())
}

pub fn parse_process_in(src: &str, scope: &Scope) -> PResult<Process> {
    whole(src, scope, |p| p.process())
}

pub fn parse_global(src: &str) -> PResult<GlobalType> {
    whole(src, &Scope::default(), |p| p.global())
}

pub fn parse_global_in(src: &str, scope: &Scope) -> PResult<GlobalType> {
    whole(src, scope, |p| p.global())
}

pub fn parse_local(src: &str) -> PResult<LocalType> {
    whole(src, &Scope::default(), |p| p.local_indexed())
}

pub fn parse_local_in(src: &str, scope: &Scope) -> PResult<LocalType> {
    whole(src, scope, |p| p.local_indexed())
}

pub fn parse_expr(src: &str) -> PResult<Expr> {
    whole(src, &Scope::default(), |p| p.expr(false))
}
