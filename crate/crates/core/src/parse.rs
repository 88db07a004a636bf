//! Concrete syntax for terms.
//!
//! ```text
//! term  := ident | ident '(' term (',' term)* ')'
//! ident := [A-Za-z0-9_'+*]+
//! ```
//!
//! Whitespace between tokens is ignored.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::term::{Signature, Symbol, Term, Variable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("`{name}` expects {expected} arguments, got {found}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("variable `{0}` cannot take arguments")]
    VariableApplied(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at byte {offset}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

impl ParseError {
    pub(crate) fn syntax(msg: impl Into<String>, offset: usize) -> ParseError {
        ParseError {
            kind: ParseErrorKind::Syntax(msg.into()),
            offset,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Tok<'a> {
    Ident(&'a str),
    LParen,
    RParen,
    Comma,
    Arrow,
}

impl Tok<'_> {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Arrow => "`->`".into(),
        }
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '\'' | '+' | '*')
}

pub(crate) struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    comments: bool,
    peeked: Option<(usize, Tok<'a>)>,
}

impl<'a> Lexer<'a> {
    /// With `comments`, `;` starts a comment running to the end of the line.
    pub(crate) fn new(src: &'a str, comments: bool) -> Lexer<'a> {
        Lexer {
            src,
            pos: 0,
            comments,
            peeked: None,
        }
    }

    fn skip_trivia(&mut self) {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() {
            let c = bytes[self.pos];
            if c.is_ascii_whitespace() {
                self.pos += 1;
            } else if self.comments && c == b';' {
                while self.pos < bytes.len() && bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn lex(&mut self) -> Result<Option<(usize, Tok<'a>)>, ParseError> {
        self.skip_trivia();
        let start = self.pos;
        let rest = &self.src[start..];
        let Some(c) = rest.chars().next() else {
            return Ok(None);
        };
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '-' if rest.starts_with("->") => {
                self.pos += 2;
                return Ok(Some((start, Tok::Arrow)));
            }
            c if is_ident_char(c) => {
                let len = rest.find(|c| !is_ident_char(c)).unwrap_or(rest.len());
                self.pos += len;
                return Ok(Some((start, Tok::Ident(&rest[..len]))));
            }
            other => {
                return Err(ParseError::syntax(format!("unexpected character `{other}`"), start))
            }
        };
        self.pos += 1;
        Ok(Some((start, tok)))
    }

    pub(crate) fn peek(&mut self) -> Result<Option<(usize, Tok<'a>)>, ParseError> {
        if self.peeked.is_none() {
            self.peeked = self.lex()?;
        }
        Ok(self.peeked)
    }

    pub(crate) fn next_tok(&mut self) -> Result<Option<(usize, Tok<'a>)>, ParseError> {
        match self.peeked.take() {
            Some(t) => Ok(Some(t)),
            None => self.lex(),
        }
    }

    /// Byte offset of the next token, or the end of input.
    pub(crate) fn offset(&mut self) -> usize {
        match self.peek() {
            Ok(Some((o, _))) => o,
            _ => self.src.len(),
        }
    }

    pub(crate) fn expect(&mut self, want: Tok<'_>) -> Result<usize, ParseError> {
        match self.next_tok()? {
            Some((o, t)) if t == want => Ok(o),
            Some((o, t)) => Err(ParseError::syntax(
                format!("expected {}, found {}", want.describe(), t.describe()),
                o,
            )),
            None => Err(ParseError::syntax(
                format!("expected {}, found end of input", want.describe()),
                self.src.len(),
            )),
        }
    }

    pub(crate) fn ident(&mut self) -> Result<(usize, &'a str), ParseError> {
        match self.next_tok()? {
            Some((o, Tok::Ident(s))) => Ok((o, s)),
            Some((o, t)) => Err(ParseError::syntax(
                format!("expected identifier, found {}", t.describe()),
                o,
            )),
            None => Err(ParseError::syntax(
                "expected identifier, found end of input",
                self.src.len(),
            )),
        }
    }
}

/// A term before identifiers are resolved to symbols or variables.
#[derive(Debug, Clone)]
pub(crate) struct RawTerm<'a> {
    pub name: &'a str,
    pub offset: usize,
    pub args: Vec<RawTerm<'a>>,
}

pub(crate) fn raw_term<'a>(lx: &mut Lexer<'a>) -> Result<RawTerm<'a>, ParseError> {
    let (offset, name) = lx.ident()?;
    let mut args = Vec::new();
    if let Some((_, Tok::LParen)) = lx.peek()? {
        lx.next_tok()?;
        loop {
            args.push(raw_term(lx)?);
            match lx.next_tok()? {
                Some((_, Tok::Comma)) => continue,
                Some((_, Tok::RParen)) => break,
                Some((o, t)) => {
                    return Err(ParseError::syntax(
                        format!("expected `,` or `)`, found {}", t.describe()),
                        o,
                    ))
                }
                None => {
                    return Err(ParseError::syntax(
                        "unclosed `(`",
                        lx.offset(),
                    ))
                }
            }
        }
    }
    Ok(RawTerm { name, offset, args })
}

/// Resolves identifiers: declared variables first, then signature symbols.
pub(crate) fn resolve(
    raw: &RawTerm<'_>,
    signature: &Signature,
    variables: &BTreeSet<Variable>,
) -> Result<Term, ParseError> {
    let var = Variable::new(raw.name);
    if variables.contains(&var) {
        if !raw.args.is_empty() {
            return Err(ParseError {
                kind: ParseErrorKind::VariableApplied(raw.name.to_string()),
                offset: raw.offset,
            });
        }
        return Ok(Term::var(var));
    }
    let Some(sym) = signature.get(raw.name) else {
        return Err(ParseError {
            kind: ParseErrorKind::UnknownIdentifier(raw.name.to_string()),
            offset: raw.offset,
        });
    };
    if sym.arity() != raw.args.len() {
        return Err(ParseError {
            kind: ParseErrorKind::ArityMismatch {
                name: raw.name.to_string(),
                expected: sym.arity(),
                found: raw.args.len(),
            },
            offset: raw.offset,
        });
    }
    let args = raw
        .args
        .iter()
        .map(|a| resolve(a, signature, variables))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Term::app(Symbol::clone(sym), args))
}

/// Parses `text` as a single term over `signature` and `variables`.
pub fn parse_term(
    text: &str,
    signature: &Signature,
    variables: &BTreeSet<Variable>,
) -> Result<Term, ParseError> {
    let mut lx = Lexer::new(text, false);
    let raw = raw_term(&mut lx)?;
    if let Some((o, t)) = lx.next_tok()? {
        return Err(ParseError::syntax(
            format!("trailing input starting with {}", t.describe()),
            o,
        ));
    }
    resolve(&raw, signature, variables)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unary_sig() -> Signature {
        [
            Symbol::new("pl", 2),
            Symbol::new("z", 0),
            Symbol::new("s", 1),
            Symbol::new("s'", 1),
            Symbol::new("+'", 2),
        ]
        .into_iter()
        .collect()
    }

    fn vars(names: &[&str]) -> BTreeSet<Variable> {
        names.iter().map(|n| Variable::new(*n)).collect()
    }

    #[test]
    fn parses_nested_application() {
        let t = parse_term("pl(z,s(z))", &unary_sig(), &vars(&[])).unwrap();
        let z = Term::constant(Symbol::new("z", 0));
        let sz = Term::app(Symbol::new("s", 1), vec![z.clone()]);
        assert_eq!(t, Term::app(Symbol::new("pl", 2), vec![z, sz]));
    }

    #[test]
    fn parses_variable() {
        let t = parse_term("x", &unary_sig(), &vars(&["x"])).unwrap();
        assert_eq!(t, Term::var(Variable::new("x")));
    }

    #[test]
    fn whitespace_and_operator_names() {
        let t = parse_term(" +' ( s'( z ) , x ) ", &unary_sig(), &vars(&["x"])).unwrap();
        assert_eq!(t.to_string(), "+'(s'(z),x)");
    }

    #[test]
    fn arity_mismatch_reported_with_offset() {
        let e = parse_term("s(x,y)", &unary_sig(), &vars(&["x", "y"])).unwrap_err();
        assert_eq!(e.offset, 0);
        assert!(matches!(e.kind, ParseErrorKind::ArityMismatch { expected: 1, found: 2, .. }));
    }

    #[test]
    fn unknown_identifier() {
        let e = parse_term("pl(z,q)", &unary_sig(), &vars(&[])).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownIdentifier("q".into()));
        assert_eq!(e.offset, 5);
    }

    #[test]
    fn syntax_errors() {
        let sig = unary_sig();
        let v = vars(&[]);
        assert_eq!(parse_term("pl(z,", &sig, &v).unwrap_err().offset, 5);
        assert_eq!(parse_term("s(z))", &sig, &v).unwrap_err().offset, 4);
        assert!(parse_term("", &sig, &v).is_err());
        assert!(parse_term("s()", &sig, &v).is_err());
        assert_eq!(parse_term("s(z;)", &sig, &v).unwrap_err().offset, 3);
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![
            Just(Term::constant(Symbol::new("z", 0))),
            Just(Term::var(Variable::new("x"))),
            Just(Term::var(Variable::new("y"))),
        ];
        leaf.prop_recursive(5, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|t| Term::app(Symbol::new("s'", 1), vec![t])),
                (inner.clone(), inner).prop_map(|(a, b)| Term::app(Symbol::new("+'", 2), vec![a, b])),
            ]
        })
    }

    proptest! {
        #[test]
        fn format_then_parse_round_trips(t in arb_term()) {
            let back = parse_term(&t.to_string(), &unary_sig(), &vars(&["x", "y"])).unwrap();
            prop_assert_eq!(back, t);
        }
    }
}
