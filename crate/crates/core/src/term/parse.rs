//! Concrete syntax for `.act` files:
//!
//! ```text
//! file   ::= ctx <n> . <proc>
//! proc   ::= <sum> | <sum> '|' <sum>
//! sum    ::= 0 | ( <proc> ) | <branch> (+ <branch>)*
//! branch ::= snd(<a>,<b>).<cont> | rcv(<a>).<cont> | tick.<cont>
//! cont   ::= 0 | ( <proc> ) | <branch>
//! ```
//!
//! `+` binds looser than `.`, so a prefix guards a single branch unless its
//! continuation is parenthesized.

use std::fmt;

use thiserror::Error;

use super::{Chan, Prefix, Process};

/// A parsed file: the declared context and the process.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub gamma: u32,
    pub process: Process,
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ctx {}. {}", self.gamma, self.process)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Lexical,
    Syntax,
    Type,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u32),
    Dot,
    Comma,
    Plus,
    Bar,
    LParen,
    RParen,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Bar => f.write_str("`|`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1, 1);
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        let single = match c {
            '.' => Some(Tok::Dot),
            ',' => Some(Tok::Comma),
            '+' => Some(Tok::Plus),
            '|' => Some(Tok::Bar),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            chars.next();
            column += 1;
            out.push(Token {
                tok,
                line: l,
                column: col,
            });
        } else if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
        } else if c.is_whitespace() {
            chars.next();
            column += 1;
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                s.push(d);
                chars.next();
                column += 1;
            }
            let n = s.parse::<u32>().map_err(|_| ParseError {
                kind: ParseErrorKind::Lexical,
                line: l,
                column: col,
                message: format!("number `{s}` is too large"),
            })?;
            out.push(Token {
                tok: Tok::Num(n),
                line: l,
                column: col,
            });
        } else if c.is_ascii_alphabetic() {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_alphanumeric() || **d == '_') {
                s.push(d);
                chars.next();
                column += 1;
            }
            out.push(Token {
                tok: Tok::Ident(s),
                line: l,
                column: col,
            });
        } else {
            return Err(ParseError {
                kind: ParseErrorKind::Lexical,
                line: l,
                column: col,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    check: bool,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, t: &Token, message: String) -> ParseError {
        ParseError {
            kind: ParseErrorKind::Syntax,
            line: t.line,
            column: t.column,
            message,
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Token, ParseError> {
        let t = self.bump();
        if t.tok == tok {
            Ok(t)
        } else {
            Err(self.error_at(&t, format!("expected {tok}, found {}", t.tok)))
        }
    }

    fn number(&mut self) -> Result<(u32, Token), ParseError> {
        let t = self.bump();
        match t.tok {
            Tok::Num(n) => Ok((n, t)),
            _ => Err(self.error_at(&t, format!("expected a number, found {}", t.tok))),
        }
    }

    fn channel(&mut self, gamma: u32) -> Result<Chan, ParseError> {
        let (n, t) = self.number()?;
        if self.check && (n == 0 || n > gamma) {
            return Err(ParseError {
                kind: ParseErrorKind::Type,
                line: t.line,
                column: t.column,
                message: format!("channel {n} out of range in context of size {gamma}"),
            });
        }
        Ok(Chan(n))
    }

    fn file(&mut self) -> Result<Program, ParseError> {
        let t = self.bump();
        if t.tok != Tok::Ident("ctx".into()) {
            return Err(self.error_at(&t, format!("expected `ctx`, found {}", t.tok)));
        }
        let (gamma, _) = self.number()?;
        self.expect(Tok::Dot)?;
        let process = self.proc(gamma)?;
        let t = self.bump();
        if t.tok != Tok::Eof {
            return Err(self.error_at(&t, format!("expected end of input, found {}", t.tok)));
        }
        Ok(Program { gamma, process })
    }

    /// True when the process starting at the cursor is a parallel
    /// composition, i.e. a `|` occurs before the enclosing `)` or the end.
    fn at_par(&self) -> bool {
        let mut depth = 0usize;
        for t in &self.tokens[self.pos..] {
            match t.tok {
                Tok::LParen => depth += 1,
                Tok::RParen if depth == 0 => return false,
                Tok::RParen => depth -= 1,
                Tok::Bar if depth == 0 => return true,
                Tok::Eof => return false,
                _ => {}
            }
        }
        false
    }

    fn proc(&mut self, gamma: u32) -> Result<Process, ParseError> {
        if !self.at_par() {
            return self.sum(gamma);
        }
        let left = self.sum(gamma + 1)?;
        self.expect(Tok::Bar)?;
        let right = self.sum(gamma + 1)?;
        if self.peek().tok == Tok::Bar {
            let t = self.peek().clone();
            return Err(self.error_at(
                &t,
                "ambiguous parallel composition; parenthesize nested `|`".into(),
            ));
        }
        Ok(Process::par(left, right))
    }

    fn sum(&mut self, gamma: u32) -> Result<Process, ParseError> {
        match self.peek().tok {
            Tok::Num(0) => {
                self.bump();
                Ok(Process::nil())
            }
            Tok::LParen => self.group(gamma),
            _ => {
                let mut branches = vec![self.branch(gamma)?];
                while self.peek().tok == Tok::Plus {
                    self.bump();
                    branches.push(self.branch(gamma)?);
                }
                Ok(Process::Sum(branches))
            }
        }
    }

    fn group(&mut self, gamma: u32) -> Result<Process, ParseError> {
        self.expect(Tok::LParen)?;
        let p = self.proc(gamma)?;
        self.expect(Tok::RParen)?;
        Ok(p)
    }

    fn cont(&mut self, gamma: u32) -> Result<Process, ParseError> {
        match self.peek().tok {
            Tok::Num(0) => {
                self.bump();
                Ok(Process::nil())
            }
            Tok::LParen => self.group(gamma),
            _ => {
                let (a, p) = self.branch(gamma)?;
                Ok(Process::prefixed(a, p))
            }
        }
    }

    fn branch(&mut self, gamma: u32) -> Result<(Prefix, Process), ParseError> {
        let t = self.bump();
        let prefix = match &t.tok {
            Tok::Ident(s) if s == "snd" => {
                self.expect(Tok::LParen)?;
                let subject = self.channel(gamma)?;
                self.expect(Tok::Comma)?;
                let object = self.channel(gamma)?;
                self.expect(Tok::RParen)?;
                Prefix::Out { subject, object }
            }
            Tok::Ident(s) if s == "rcv" => {
                self.expect(Tok::LParen)?;
                let subject = self.channel(gamma)?;
                self.expect(Tok::RParen)?;
                Prefix::In { subject }
            }
            Tok::Ident(s) if s == "tick" => Prefix::Tick,
            other => {
                return Err(self.error_at(
                    &t,
                    format!("expected `0`, `(`, `snd`, `rcv` or `tick`, found {other}"),
                ))
            }
        };
        self.expect(Tok::Dot)?;
        let cont = self.cont(prefix.extend(gamma))?;
        Ok((prefix, cont))
    }
}

/// Parses a `.act` text without checking channel indices against the context.
pub fn parse(text: &str) -> Result<Program, ParseError> {
    run(text, false)
}

/// Parses and typechecks, reporting out-of-range channels with their location.
pub fn parse_checked(text: &str) -> Result<Program, ParseError> {
    run(text, true)
}

fn run(text: &str, check: bool) -> Result<Program, ParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        check,
    };
    parser.file()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::typecheck;

    fn prog(text: &str) -> Program {
        parse_checked(text).unwrap_or_else(|e| panic!("{text}: {e}"))
    }

    #[test]
    fn parses_fork_sync_tick() {
        let p = prog("ctx 1. snd(2,2).0 | rcv(2).tick.0");
        assert_eq!(p.gamma, 1);
        assert_eq!(
            p.process,
            Process::par(
                Process::prefixed(Prefix::out(2, 2), Process::nil()),
                Process::prefixed(
                    Prefix::input(2),
                    Process::prefixed(Prefix::Tick, Process::nil())
                ),
            )
        );
    }

    #[test]
    fn parses_nil() {
        let p = prog("ctx 0. 0");
        assert_eq!(p.gamma, 0);
        assert_eq!(p.process, Process::nil());
    }

    #[test]
    fn parenthesized_sum_continuation() {
        let p = prog("ctx 1. rcv(1).(snd(2,2).0 + tick.0)");
        assert_eq!(
            p.process,
            Process::prefixed(
                Prefix::input(1),
                Process::sum(vec![
                    (Prefix::out(2, 2), Process::nil()),
                    (Prefix::Tick, Process::nil()),
                ])
            )
        );
    }

    #[test]
    fn plus_binds_looser_than_dot() {
        let p = prog("ctx 1. rcv(1).tick.0 + tick.0");
        assert_eq!(
            p.process,
            Process::sum(vec![
                (
                    Prefix::input(1),
                    Process::prefixed(Prefix::Tick, Process::nil())
                ),
                (Prefix::Tick, Process::nil()),
            ])
        );
    }

    #[test]
    fn whitespace_is_insignificant() {
        let a = prog("ctx 1.\n  rcv( 1 ) .\ttick . 0");
        let b = prog("ctx 1.rcv(1).tick.0");
        assert_eq!(a, b);
    }

    #[test]
    fn nested_par_in_parens() {
        let p = prog("ctx 0. ((0 | 0) | tick.0)");
        assert_eq!(
            p.process,
            Process::par(
                Process::par(Process::nil(), Process::nil()),
                Process::prefixed(Prefix::Tick, Process::nil())
            )
        );
        assert!(typecheck(&p.process, 0).is_ok());
    }

    #[test]
    fn par_context_applies_inside_groups() {
        // channel 3 is only valid in the inner fork, at Γ = 3
        assert!(parse_checked("ctx 1. (0 | (snd(3,1).0 | 0))").is_ok());
        assert!(parse_checked("ctx 1. (snd(3,1).0 | 0)").is_err());
    }

    #[test]
    fn unparenthesized_triple_par_is_rejected() {
        let e = parse("ctx 0. 0 | 0 | 0").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Syntax);
        assert_eq!((e.line, e.column), (1, 14));
    }

    #[test]
    fn syntax_errors_carry_location() {
        let e = parse("ctx 1.\n rcv(1) tick.0").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Syntax);
        assert_eq!((e.line, e.column), (2, 9));
        let e = parse("").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Syntax);
        let e = parse("ctx 1. rcv(1).0 $").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Lexical);
        assert_eq!((e.line, e.column), (1, 17));
    }

    #[test]
    fn type_errors_carry_location() {
        let e = parse_checked("ctx 1.\nsnd(2,1).0").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Type);
        assert_eq!((e.line, e.column), (2, 5));
        // The unchecked parser accepts it.
        assert!(parse("ctx 1. snd(2,1).0").is_ok());
    }

    #[test]
    fn pretty_reparses() {
        for text in [
            "ctx 1. snd(2,2).0 | rcv(2).tick.0",
            "ctx 1. rcv(1).(snd(2,2).0 + tick.0) + tick.0",
            "ctx 2. rcv(1).(0 | (tick.0 | snd(4,3).0))",
            "ctx 0. (0 | 0)",
        ] {
            let p = prog(text);
            let again = prog(&p.to_string());
            assert_eq!(p, again, "{text}");
        }
    }
}
