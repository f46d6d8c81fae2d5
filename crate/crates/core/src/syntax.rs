//! Concrete syntax.
//!
//! ```text
//! term ::= atom+                       application, left-associative
//! atom ::= var | "\" var "." term | "<" term "," term ">"
//!        | "p1" atom | "p2" atom | "(" term ")"
//! var  ::= [a-zA-Z][a-zA-Z0-9_']*      excluding p1, p2
//! ```
//!
//! `λ` is accepted as a synonym for `\`.

use thiserror::Error;

use crate::term::{binder_name, is_keyword, Node, Side, Term, VarName};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at {line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Lambda,
    Dot,
    Lt,
    Gt,
    Comma,
    LParen,
    RParen,
    P1,
    P2,
    Ident(String),
    Eof,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            chars: src.char_indices().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn tokens(mut self) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
        let mut out = Vec::new();
        loop {
            while matches!(self.chars.peek(), Some((_, c)) if c.is_whitespace()) {
                self.bump();
            }
            let (line, column) = (self.line, self.column);
            let Some(&(_, c)) = self.chars.peek() else {
                out.push((Tok::Eof, line, column));
                return Ok(out);
            };
            let tok = match c {
                '\\' | 'λ' => {
                    self.bump();
                    Tok::Lambda
                }
                '.' => {
                    self.bump();
                    Tok::Dot
                }
                '<' => {
                    self.bump();
                    Tok::Lt
                }
                '>' => {
                    self.bump();
                    Tok::Gt
                }
                ',' => {
                    self.bump();
                    Tok::Comma
                }
                '(' => {
                    self.bump();
                    Tok::LParen
                }
                ')' => {
                    self.bump();
                    Tok::RParen
                }
                c if c.is_ascii_alphabetic() => {
                    let mut s = String::new();
                    while let Some(&(_, c)) = self.chars.peek() {
                        if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                            s.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    match s.as_str() {
                        "p1" => Tok::P1,
                        "p2" => Tok::P2,
                        _ => Tok::Ident(s),
                    }
                }
                other => {
                    return Err(ParseError {
                        line,
                        column,
                        message: format!("unexpected character {other:?}"),
                    })
                }
            };
            out.push((tok, line, column));
        }
    }
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    /// Names of enclosing binders, innermost last.
    env: Vec<VarName>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let (_, line, column) = &self.toks[self.pos];
        ParseError {
            line: *line,
            column: *column,
            message: message.into(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {what}, found {}", describe(self.peek()))))
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Ident(_) | Tok::Lambda | Tok::Lt | Tok::LParen | Tok::P1 | Tok::P2
        )
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        if !self.starts_atom() {
            return Err(self.error(format!("expected a term, found {}", describe(self.peek()))));
        }
        let mut t = self.atom()?;
        while self.starts_atom() {
            let a = self.atom()?;
            t = Term::app(t, a);
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.pos += 1;
                let name = VarName::new(name);
                match self.env.iter().rev().position(|n| *n == name) {
                    Some(i) => Ok(Term::bound(i as u32)),
                    None => Ok(Term::var(name)),
                }
            }
            Tok::Lambda => {
                self.pos += 1;
                let name = match self.peek().clone() {
                    Tok::Ident(n) => n,
                    other => {
                        return Err(self.error(format!(
                            "expected a variable after lambda, found {}",
                            describe(&other)
                        )))
                    }
                };
                self.pos += 1;
                self.expect(Tok::Dot, "'.'")?;
                let name = VarName::new(name);
                self.env.push(name.clone());
                let body = self.term();
                self.env.pop();
                Ok(Term::abs_raw(name, body?))
            }
            Tok::Lt => {
                self.pos += 1;
                let l = self.term()?;
                self.expect(Tok::Comma, "','")?;
                let r = self.term()?;
                self.expect(Tok::Gt, "'>'")?;
                Ok(Term::pair(l, r))
            }
            Tok::LParen => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(t)
            }
            Tok::P1 | Tok::P2 => {
                let side = if *self.peek() == Tok::P1 { Side::Fst } else { Side::Snd };
                self.pos += 1;
                if !self.starts_atom() {
                    return Err(self.error("expected an operand after projection"));
                }
                Ok(Term::proj(side, self.atom()?))
            }
            other => Err(self.error(format!("expected a term, found {}", describe(&other)))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Lambda => "'\\'".into(),
        Tok::Dot => "'.'".into(),
        Tok::Lt => "'<'".into(),
        Tok::Gt => "'>'".into(),
        Tok::Comma => "','".into(),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::P1 => "'p1'".into(),
        Tok::P2 => "'p2'".into(),
        Tok::Ident(s) => format!("identifier {s:?}"),
        Tok::Eof => "end of input".into(),
    }
}

/// Parse a closed-over-names term.
pub fn parse(text: &str) -> Result<Term, ParseError> {
    parse_in_context(text, &[])
}

/// Parse with `ctx` (outermost first) as the names of enclosing binders:
/// occurrences of those names become references to them.
pub(crate) fn parse_in_context(text: &str, ctx: &[VarName]) -> Result<Term, ParseError> {
    let toks = Lexer::new(text).tokens()?;
    let mut p = Parser {
        toks,
        pos: 0,
        env: ctx.to_vec(),
    };
    let t = p.term()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error(format!("unexpected {}", describe(p.peek()))));
    }
    Ok(t)
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Level {
    Term,
    App,
    Atom,
}

/// Print with binder names chosen to avoid capture.
pub fn print(m: &Term) -> String {
    print_in_context(m, &[])
}

/// Print a term whose dangling indices refer to binders named `ctx`
/// (outermost first).
pub(crate) fn print_in_context(m: &Term, ctx: &[VarName]) -> String {
    let mut out = String::new();
    let mut env = ctx.to_vec();
    write_term(m, &mut env, Level::Term, &mut out);
    out
}

fn write_term(t: &Term, env: &mut Vec<VarName>, level: Level, out: &mut String) {
    match t.node() {
        Node::Free(n) => out.push_str(n.as_str()),
        Node::Bound(i) => {
            let i = *i as usize;
            match env.len().checked_sub(i + 1) {
                Some(k) => out.push_str(env[k].as_str()),
                None => out.push_str(&format!("^{}", i - env.len())),
            }
        }
        Node::Abs(hint, body) => {
            let paren = level > Level::Term;
            if paren {
                out.push('(');
            }
            let name = binder_name(hint, body, env);
            out.push('\\');
            out.push_str(name.as_str());
            out.push_str(". ");
            env.push(name);
            write_term(body, env, Level::Term, out);
            env.pop();
            if paren {
                out.push(')');
            }
        }
        Node::App(f, a) => {
            let paren = level > Level::App;
            if paren {
                out.push('(');
            }
            write_term(f, env, Level::App, out);
            out.push(' ');
            // Projections are atoms, but read better parenthesized as arguments.
            let arg_level = if matches!(a.node(), Node::Proj(..)) {
                Level::Term
            } else {
                Level::Atom
            };
            if arg_level == Level::Term {
                out.push('(');
                write_term(a, env, Level::Term, out);
                out.push(')');
            } else {
                write_term(a, env, Level::Atom, out);
            }
            if paren {
                out.push(')');
            }
        }
        Node::Pair(l, r) => {
            out.push('<');
            write_term(l, env, Level::Term, out);
            out.push_str(", ");
            write_term(r, env, Level::Term, out);
            out.push('>');
        }
        Node::Proj(side, a) => {
            out.push_str(match side {
                Side::Fst => "p1 ",
                Side::Snd => "p2 ",
            });
            write_term(a, env, Level::Atom, out);
        }
    }
}

/// Whether a name is usable as a variable in the concrete syntax.
pub fn is_valid_var(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic())
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        && !is_keyword(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_examples() {
        assert_eq!(parse("\\x. x").unwrap(), Term::lam("x", Term::var("x")));
        assert_eq!(
            parse("p1 <a, b>").unwrap(),
            Term::fst(Term::pair(Term::var("a"), Term::var("b")))
        );
        let t = parse("(\\x. x) y z").unwrap();
        assert_eq!(
            t,
            Term::apps(
                Term::lam("x", Term::var("x")),
                [Term::var("y"), Term::var("z")]
            )
        );
        assert_eq!(parse(&print(&t)).unwrap(), t);
    }

    #[test]
    fn lambda_body_extends_right() {
        assert_eq!(parse("\\x. x y").unwrap(), Term::lam("x", Term::app(Term::var("x"), Term::var("y"))));
        assert_eq!(
            parse("f \\x. x y").unwrap(),
            Term::app(Term::var("f"), parse("\\x. x y").unwrap())
        );
    }

    #[test]
    fn projection_binds_an_atom() {
        let t = parse("p1 x y").unwrap();
        assert_eq!(t, Term::app(Term::fst(Term::var("x")), Term::var("y")));
        assert_eq!(print(&t), "p1 x y");
        let u = parse("f (p2 x)").unwrap();
        assert_eq!(print(&u), "f (p2 x)");
        assert_eq!(parse("f p2 x").unwrap(), u);
    }

    #[test]
    fn printing_shapes() {
        for s in [
            "\\x. x",
            "(\\x. x) y",
            "<\\x. x, p1 y>",
            "p1 (\\x. x)",
            "p2 (f x)",
            "f (g x) <a, b>",
            "\\f. \\a. f a",
            "p1 p2 x",
        ] {
            let t = parse(s).unwrap();
            assert_eq!(print(&t), s);
        }
    }

    #[test]
    fn errors_carry_location() {
        let e = parse("\\x x").unwrap_err();
        assert_eq!((e.line, e.column), (1, 4));
        let e = parse("<a, b").unwrap_err();
        assert_eq!((e.line, e.column), (1, 6));
        let e = parse("a\n  )").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        assert!(parse("").is_err());
        assert!(parse("p1").is_err());
        assert!(parse("a # b").is_err());
    }

    #[test]
    fn capture_is_avoided_when_printing() {
        let t = crate::term::substitute(&parse("\\y. x y").unwrap(), &"x".into(), &parse("y").unwrap());
        assert_eq!(print(&t), "\\x0. y x0");
        assert_eq!(parse(&print(&t)).unwrap(), t);
    }

    #[test]
    fn var_validity() {
        assert!(is_valid_var("x'"));
        assert!(is_valid_var("ab_1"));
        assert!(!is_valid_var("p1"));
        assert!(!is_valid_var("1a"));
    }
}
