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

//! Trace predicates over the actions of a reduction path.
//!
//! ```text
//! pred  ::= unary (('&' | '|') unary)*        left to right, no precedence
//! unary ::= '!' unary | '(' pred ')' | atom
//! atom  ::= true | false
//!         | sent(c, e, ...)     a communication on c carried these values
//!         | chose(c, e, ...)    a send branch on c with this payload text
//!         | label(c, l)         label l was selected on c
//!         | sort(c, S, ...)     a communication on c carried these sorts
//!         | role(q)             participant q took part in an interaction
//!         | rule(R)             a step used rule R
//! ```

use std::collections::BTreeMap;
use std::fmt;

use crate::ast::{eval_expr, exprs_text, Expr, Participant, Sort, Value};
use crate::semantics::{Rule, StepLabel};
use crate::syntax::lexer::{lex, Tok};
use crate::syntax::parser::{Parser, Scope};
use crate::syntax::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom {
    Sent { chan: String, values: Vec<Value> },
    Chose { chan: String, text: String },
    Label { chan: String, label: String },
    Sorts { chan: String, sorts: Vec<Sort> },
    Role(Participant),
    Rule(Rule),
}

impl Atom {
    /// The atom holds for a single step.
    pub fn matches<'a>(&'a self, l: &'a StepLabel) -> bool {
        let com = |chan: &'a str| l.actions.iter().filter(move |a| a.rule == Rule::Com && a.chan == chan);
        match self {
            Atom::Sent { chan, values } => com(chan).any(|a| &a.values == values),
            Atom::Chose { chan, text } => com(chan).any(|a| &a.text == text),
            Atom::Sorts { chan, sorts } => com(chan).any(|a| &a.sorts == sorts),
            Atom::Label { chan, label } => {
                l.actions.iter().any(|a| a.rule == Rule::Label && &a.chan == chan && &a.text == label)
            }
            Atom::Role(q) => l.actions.iter().any(|a| a.sender == Some(*q) || a.receiver == Some(*q)),
            Atom::Rule(r) => l.rules.contains(r),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |xs: Vec<String>| xs.join(", ");
        match self {
            Atom::Sent { chan, values } => {
                write!(f, "sent({}, {})", chan, list(values.iter().map(|v| v.to_string()).collect()))
            }
            Atom::Chose { chan, text } => write!(f, "chose({}, {})", chan, text),
            Atom::Label { chan, label } => write!(f, "label({}, {})", chan, label),
            Atom::Sorts { chan, sorts } => {
                write!(f, "sort({}, {})", chan, list(sorts.iter().map(|s| s.to_string()).collect()))
            }
            Atom::Role(q) => write!(f, "role({})", q),
            Atom::Rule(r) => write!(f, "rule({})", r),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TracePredicate {
    True,
    False,
    /// Some step along the path satisfies the atom.
    Atom(Atom),
    Not(Box<TracePredicate>),
    And(Box<TracePredicate>, Box<TracePredicate>),
    Or(Box<TracePredicate>, Box<TracePredicate>),
}

impl TracePredicate {
    pub fn not(p: TracePredicate) -> TracePredicate {
        TracePredicate::Not(Box::new(p))
    }

    pub fn and(p: TracePredicate, q: TracePredicate) -> TracePredicate {
        TracePredicate::And(Box::new(p), Box::new(q))
    }

    pub fn or(p: TracePredicate, q: TracePredicate) -> TracePredicate {
        TracePredicate::Or(Box::new(p), Box::new(q))
    }

    /// Distinct atoms in order of first occurrence.
    pub fn atoms(&self) -> Vec<Atom> {
        fn go(p: &TracePredicate, out: &mut Vec<Atom>) {
            match p {
                TracePredicate::Atom(a) if !out.contains(a) => out.push(a.clone()),
                TracePredicate::Not(q) => go(q, out),
                TracePredicate::And(a, b) | TracePredicate::Or(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                _ => {}
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    /// Evaluates given which atoms (indexed as in `atoms`) held somewhere.
    pub fn eval_with(&self, atoms: &[Atom], seen: &[bool]) -> bool {
        match self {
            TracePredicate::True => true,
            TracePredicate::False => false,
            TracePredicate::Atom(a) => atoms.iter().position(|b| b == a).is_some_and(|i| seen[i]),
            TracePredicate::Not(p) => !p.eval_with(atoms, seen),
            TracePredicate::And(a, b) => a.eval_with(atoms, seen) && b.eval_with(atoms, seen),
            TracePredicate::Or(a, b) => a.eval_with(atoms, seen) || b.eval_with(atoms, seen),
        }
    }

    /// Evaluates on a finite path.
    pub fn eval_path<'a>(&self, path: impl IntoIterator<Item = &'a StepLabel>) -> bool {
        let atoms = self.atoms();
        let mut seen = vec![false; atoms.len()];
        for l in path {
            for (i, a) in atoms.iter().enumerate() {
                seen[i] |= a.matches(l);
            }
        }
        self.eval_with(&atoms, &seen)
    }
}

impl fmt::Display for TracePredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TracePredicate::True => f.write_str("true"),
            TracePredicate::False => f.write_str("false"),
            TracePredicate::Atom(a) => write!(f, "{}", a),
            TracePredicate::Not(p) => match **p {
                TracePredicate::And(..) | TracePredicate::Or(..) => write!(f, "!({})", p),
                _ => write!(f, "!{}", p),
            },
            TracePredicate::And(a, b) => write!(f, "{} & {}", a, Operand(b)),
            TracePredicate::Or(a, b) => write!(f, "{} | {}", a, Operand(b)),
        }
    }
}

/// Right operands of a binary connective need parentheses when binary.
struct Operand<'a>(&'a TracePredicate);

impl fmt::Display for Operand<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            TracePredicate::And(..) | TracePredicate::Or(..) => write!(f, "({})", self.0),
            p => write!(f, "{}", p),
        }
    }
}

pub fn parse_predicate(src: &str) -> Result<TracePredicate, ParseError> {
    let scope = Scope::default();
    let mut p = Parser::from_tokens(lex(src)?, &scope);
    let pred = binary(&mut p)?;
    p.expect_eof()?;
    Ok(pred)
}

fn binary(p: &mut Parser) -> Result<TracePredicate, ParseError> {
    let mut acc = unary(p)?;
    loop {
        if p.eat(&Tok::Sym("&")) {
            acc = TracePredicate::and(acc, unary(p)?);
        } else if p.eat(&Tok::Sym("|")) {
            acc = TracePredicate::or(acc, unary(p)?);
        } else {
            return Ok(acc);
        }
    }
}

fn unary(p: &mut Parser) -> Result<TracePredicate, ParseError> {
    if p.eat(&Tok::Sym("!")) {
        return Ok(TracePredicate::not(unary(p)?));
    }
    // The lexer reads `!!` as one symbol.
    if p.eat(&Tok::Sym("!!")) {
        return Ok(TracePredicate::not(TracePredicate::not(unary(p)?)));
    }
    if p.eat(&Tok::Sym("(")) {
        let inner = binary(p)?;
        p.expect(&Tok::Sym(")"))?;
        return Ok(inner);
    }
    let (l, c) = p.position();
    let name = p.ident_or_kw()?;
    let err = |m: String| ParseError::new(l, c, m);
    match name.as_str() {
        "true" => return Ok(TracePredicate::True),
        "false" => return Ok(TracePredicate::False),
        _ => {}
    }
    p.expect(&Tok::Sym("("))?;
    let atom = match name.as_str() {
        "sent" | "chose" => {
            let chan = p.ident()?;
            let exprs = rest_exprs(p)?;
            if name == "chose" {
                Atom::Chose { chan, text: exprs_text(&exprs) }
            } else {
                let values = exprs
                    .iter()
                    .map(|e| eval_expr(e, &BTreeMap::new()))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| err(format!("`sent` needs closed values: {}", e)))?;
                Atom::Sent { chan, values }
            }
        }
        "label" => {
            let chan = p.ident()?;
            p.expect(&Tok::Sym(","))?;
            Atom::Label { chan, label: p.ident()? }
        }
        "sort" => {
            let chan = p.ident()?;
            let mut sorts = Vec::new();
            while p.eat(&Tok::Sym(",")) {
                let s = p.ident_or_kw()?;
                sorts.push(parse_sort(&s).ok_or_else(|| err(format!("unknown sort `{}`", s)))?);
            }
            Atom::Sorts { chan, sorts }
        }
        "role" => Atom::Role(p.participant()?),
        "rule" => {
            let r = p.ident()?;
            Atom::Rule(Rule::parse(&r).ok_or_else(|| err(format!("unknown rule `{}`", r)))?)
        }
        other => return Err(err(format!("unknown query atom `{}`", other))),
    };
    p.expect(&Tok::Sym(")"))?;
    Ok(TracePredicate::Atom(atom))
}

fn rest_exprs(p: &mut Parser) -> Result<Vec<Expr>, ParseError> {
    let mut out = Vec::new();
    while p.eat(&Tok::Sym(",")) {
        out.push(p.expr(false)?);
    }
    Ok(out)
}

fn parse_sort(s: &str) -> Option<Sort> {
    match s {
        "bool" => Some(Sort::Bool),
        "nat" => Some(Sort::Nat),
        "int" => Some(Sort::Int),
        "string" | "date" => Some(Sort::Str),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn connectives_associate_left_without_precedence() {
        let p = parse_predicate("sent(as, \"x\") | sent(as, 1) & chose(ab, quote/3)").unwrap();
        assert!(matches!(p, TracePredicate::And(ref l, _) if matches!(**l, TracePredicate::Or(..))));
        let q = parse_predicate(&p.to_string()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn atoms_normalise_their_arguments() {
        let p = parse_predicate("chose(ab, quote/3) & sent(as, 0195014766) & !rule(ECom)").unwrap();
        let atoms = p.atoms();
        assert_eq!(
            atoms[0],
            Atom::Chose { chan: "ab".into(), text: crate::syntax::parse_expr("quote / 3").unwrap().to_string() }
        );
        assert_eq!(atoms[1], Atom::Sent { chan: "as".into(), values: vec![Value::Nat(195014766)] });
        assert_eq!(atoms[2], Atom::Rule(Rule::ECom));
    }

    #[test]
    fn rejects_unknown_atoms() {
        assert!(parse_predicate("sends(as, 1)").is_err());
        assert!(parse_predicate("sent(as, x)").is_err());
        assert!(parse_predicate("sort(as, float)").is_err());
    }

    #[test]
    fn evaluates_on_empty_paths() {
        let p = parse_predicate("!label(c, ok) & true").unwrap();
        assert!(p.eval_path(std::iter::empty()));
    }
}
