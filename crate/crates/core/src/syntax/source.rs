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

use super::lexer::{lex, Tok};
use super::parser::{Parser, Scope};
use super::ParseError;
use crate::ast::{Name, Participant, Process};
use crate::types::{GlobalType, RoleNames};

/// A parsed `.pmps` file.
///
/// ```text
/// roles Alice = 1, Seller = 2;
/// global G = Alice ->1 Seller : c<nat>. end;
/// env a : G;
/// proc A = request a[2](c). 1: c!<3>; 0;
/// system S = A | accept a[2](c). c?(x: nat); 0;
/// ```
#[derive(Debug, Clone, Default)]
pub struct SourceFile {
    pub roles: RoleNames,
    pub globals: Vec<(String, GlobalType)>,
    /// Shared name, and the global type it is declared with.
    pub env: Vec<(Name, GlobalType)>,
    pub procs: Vec<(String, Process)>,
    pub systems: Vec<(String, Process)>,
}

impl SourceFile {
    pub fn global(&self, name: &str) -> Option<&GlobalType> {
        self.globals.iter().find(|(n, _)| n == name).map(|(_, g)| g)
    }

    /// A process or system by name.
    pub fn process(&self, name: &str) -> Option<&Process> {
        self.systems.iter().chain(&self.procs).find(|(n, _)| n == name).map(|(_, p)| p)
    }

    pub fn shared_types(&self) -> BTreeMap<Name, GlobalType> {
        self.env.iter().cloned().collect()
    }

    /// The only system, or the named one.
    /// The named system or process, or the first declared system.
    pub fn system(&self, name: Option<&str>) -> Result<(&str, &Process), String> {
        match name {
            Some(n) => self
                .systems
                .iter()
                .chain(&self.procs)
                .find(|(m, _)| m == n)
                .map(|(m, p)| (m.as_str(), p))
                .ok_or_else(|| format!("no process or system named `{}`", n)),
            None => self
                .systems
                .first()
                .map(|(n, p)| (n.as_str(), p))
                .ok_or_else(|| "the file declares no system".to_string()),
        }
    }
}

pub fn parse_source(src: &str) -> Result<SourceFile, ParseError> {
    let mut file = SourceFile::default();
    let mut scope = Scope::default();
    let mut declared: BTreeSet<String> = BTreeSet::new();
    let mut shared: BTreeSet<String> = BTreeSet::new();
    let toks = lex(src)?;
    let mut pos = 0usize;
    // One parser per declaration, so that each sees the scope built so far.
    loop {
        let mut p = Parser::from_tokens(toks.clone(), &scope);
        p.skip_to(pos);
        if p.at_eof() {
            break;
        }
        let (line, col) = p.position();
        let kw = p.ident_or_kw()?;
        match kw.as_str() {
            "roles" => {
                let mut roles = scope.roles.clone();
                loop {
                    let (l, c) = p.position();
                    let name = p.ident()?;
                    p.expect(&Tok::Sym("="))?;
                    let n = p.positive()?;
                    if roles.lookup(&name).is_some() || roles.name(Participant(n)).is_some() {
                        return Err(ParseError::new(l, c, format!("role `{}` or number {} declared twice", name, n)));
                    }
                    roles.insert(Participant(n), name);
                    if !p.eat(&Tok::Sym(",")) {
                        break;
                    }
                }
                p.expect(&Tok::Sym(";"))?;
                pos = p.offset();
                scope.roles = roles.clone();
                file.roles = roles;
            }
            "global" | "proc" | "system" => {
                let (l, c) = p.position();
                let name = p.ident()?;
                if !declared.insert(name.clone()) {
                    return Err(ParseError::new(l, c, format!("`{}` is declared twice", name)));
                }
                p.expect(&Tok::Sym("="))?;
                if kw == "global" {
                    let g = p.global()?;
                    p.expect(&Tok::Sym(";"))?;
                    pos = p.offset();
                    scope.globals.insert(name.clone(), g.clone());
                    file.globals.push((name, g));
                } else {
                    let proc = p.process()?;
                    if let Err(msg) = crate::ast::check_side_conditions(&proc) {
                        return Err(ParseError::new(l, c, format!("in `{}`: {}", name, msg)));
                    }
                    p.expect(&Tok::Sym(";"))?;
                    pos = p.offset();
                    scope.procs.insert(name.clone(), proc.clone());
                    if kw == "proc" {
                        file.procs.push((name, proc));
                    } else {
                        file.systems.push((name, proc));
                    }
                }
            }
            "env" => {
                let (l, c) = p.position();
                let name = p.ident()?;
                if !shared.insert(name.clone()) {
                    return Err(ParseError::new(l, c, format!("shared name `{}` is declared twice", name)));
                }
                p.expect(&Tok::Sym(":"))?;
                let g = p.global()?;
                p.expect(&Tok::Sym(";"))?;
                pos = p.offset();
                file.env.push((name, g));
            }
            other => {
                return Err(ParseError::new(
                    line,
                    col,
                    format!("expected `roles`, `global`, `env`, `proc` or `system`, found `{}`", other),
                ))
            }
        }
    }
    Ok(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_declarations() {
        let f = parse_source(
            "roles A = 1, B = 2;\n\
             global G = A ->1 B : c<nat>. end;\n\
             env a : G;\n\
             proc P = request a[2](c). 1: c!<3>; 0;\n\
             system S = P | accept a[B](c). c?(x: nat); 0;\n",
        )
        .unwrap();
        assert_eq!(f.roles.lookup("B"), Some(Participant(2)));
        assert_eq!(f.globals.len(), 1);
        assert_eq!(f.env[0].0, "a");
        assert!(matches!(f.system(None).unwrap().1, Process::Par(..)));
    }

    #[test]
    fn rejects_duplicates_and_unknown_keywords() {
        let e = parse_source("proc P = 0;\nproc P = 0;").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_source("\n  thing X = 0;").unwrap_err();
        assert_eq!((e.line, e.col), (2, 3));
    }

    #[test]
    fn side_conditions_are_checked() {
        let e = parse_source("proc P = mu X. X;").unwrap_err();
        assert!(e.msg.contains("guarded"), "{}", e.msg);
    }
}
