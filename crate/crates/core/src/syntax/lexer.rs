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

use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// Digits with an optional fractional part, kept verbatim.
    Num(String),
    Str(String),
    Sym(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

// Longest first.
const SYMBOLS: &[&str] = &[
    "(+)", "->", "<+", ">>", "!!", "??", "==", "!=", "<=", ">=", ";", ".", ",", ":", "(", ")", "[", "]", "{", "}", "<",
    ">", "!", "?", "|", "+", "&", "-", "*", "/", "=", "@", "_",
];

pub fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize, chars: &[char]| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1, &chars);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1, &chars);
            }
            continue;
        }
        let (tl, tc) = (line, col);
        if c.is_ascii_alphabetic() || c == '_' && chars.get(i + 1).is_some_and(|d| d.is_ascii_alphanumeric()) {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_' || chars[j] == '\'') {
                j += 1;
            }
            // Runtime freshness suffix `name#n`.
            if j + 1 < chars.len() && chars[j] == '#' && chars[j + 1].is_ascii_digit() {
                j += 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
            }
            let s: String = chars[i..j].iter().collect();
            let n = j - i;
            advance(&mut i, &mut line, &mut col, n, &chars);
            out.push(Token { tok: Tok::Ident(s), line: tl, col: tc });
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            if j + 1 < chars.len() && chars[j] == '.' && chars[j + 1].is_ascii_digit() {
                j += 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
            }
            let s: String = chars[i..j].iter().collect();
            let n = j - i;
            advance(&mut i, &mut line, &mut col, n, &chars);
            out.push(Token { tok: Tok::Num(s), line: tl, col: tc });
            continue;
        }
        if c == '"' {
            let mut s = String::new();
            let mut j = i + 1;
            loop {
                match chars.get(j) {
                    None | Some('\n') => {
                        return Err(ParseError::new(tl, tc, "unterminated string literal"));
                    }
                    Some('"') => break,
                    Some('\\') => {
                        let e = match chars.get(j + 1) {
                            Some('n') => '\n',
                            Some('t') => '\t',
                            Some('"') => '"',
                            Some('\\') => '\\',
                            _ => return Err(ParseError::new(tl, tc + (j - i), "unknown escape sequence")),
                        };
                        s.push(e);
                        j += 2;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        j += 1;
                    }
                }
            }
            let n = j + 1 - i;
            advance(&mut i, &mut line, &mut col, n, &chars);
            out.push(Token { tok: Tok::Str(s), line: tl, col: tc });
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(sym) => {
                advance(&mut i, &mut line, &mut col, sym.chars().count(), &chars);
                out.push(Token { tok: Tok::Sym(sym), line: tl, col: tc });
            }
            None => return Err(ParseError::new(tl, tc, format!("unexpected character `{}`", c))),
        }
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn lexes_a_send() {
        assert_eq!(
            toks("0.3: as!<\"War\">; 0 // done"),
            vec![
                Tok::Num("0.3".into()),
                Tok::Sym(":"),
                Tok::Ident("as".into()),
                Tok::Sym("!"),
                Tok::Sym("<"),
                Tok::Str("War".into()),
                Tok::Sym(">"),
                Tok::Sym(";"),
                Tok::Num("0".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn lexes_runtime_channels_and_arrows() {
        assert_eq!(
            toks("as#12@2 ->[0.1,1] (+)"),
            vec![
                Tok::Ident("as#12".into()),
                Tok::Sym("@"),
                Tok::Num("2".into()),
                Tok::Sym("->"),
                Tok::Sym("["),
                Tok::Num("0.1".into()),
                Tok::Sym(","),
                Tok::Num("1".into()),
                Tok::Sym("]"),
                Tok::Sym("(+)"),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn reports_positions() {
        let err = lex("a\n  $").unwrap_err();
        assert_eq!((err.line, err.col), (2, 3));
        let err = lex("\"abc").unwrap_err();
        assert_eq!((err.line, err.col), (1, 1));
    }
}
