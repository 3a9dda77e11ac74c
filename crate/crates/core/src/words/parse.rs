//! Parser for the word grammar.
//!
//! ```text
//! expr     := term (('*')? term)*
//! term     := atom ('^' exponent)*
//! exponent := integer | atom           (integer -> power, atom -> conjugation)
//! atom     := name | '1' | '(' expr ')' | '[' expr (',' expr)* ']'
//! ```
//!
//! `^` is applied left to right, so `a^t^2` parses as `(a^t)^2`. Brackets
//! are left-normed commutators. Whitespace separates tokens; products may
//! be written by juxtaposition (`a t`) or with `*`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::words::{left_normed_commutator, Alphabet, Word};

/// Upper bound on the letter count of any intermediate word built by the
/// parser.
const MAX_WORD_LETTERS: usize = 1_000_000;

/// Parses `text` as a word over `alphabet`, returning the freely reduced
/// result. Errors carry the byte position of the offending token.
pub fn parse_word(text: &str, alphabet: &Arc<Alphabet>) -> Result<Word> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        alphabet,
    };
    let word = parser.expr()?;
    match parser.peek() {
        None => Ok(word),
        Some(tok) => Err(Error::Parse {
            pos: tok.pos,
            msg: format!("unexpected `{}`", tok.kind.describe()),
        }),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Name(String),
    Number(i64),
    Star,
    Caret,
    Minus,
    Plus,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
}

impl TokenKind {
    fn describe(&self) -> String {
        match self {
            TokenKind::Name(n) => n.clone(),
            TokenKind::Number(n) => n.to_string(),
            TokenKind::Star => "*".into(),
            TokenKind::Caret => "^".into(),
            TokenKind::Minus => "-".into(),
            TokenKind::Plus => "+".into(),
            TokenKind::LParen => "(".into(),
            TokenKind::RParen => ")".into(),
            TokenKind::LBracket => "[".into(),
            TokenKind::RBracket => "]".into(),
            TokenKind::Comma => ",".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    pos: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let pos = i;
        match b {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
            }
            b'*' => {
                tokens.push(Token {
                    kind: TokenKind::Star,
                    pos,
                });
                i += 1;
            }
            b'^' => {
                tokens.push(Token {
                    kind: TokenKind::Caret,
                    pos,
                });
                i += 1;
            }
            b'-' => {
                tokens.push(Token {
                    kind: TokenKind::Minus,
                    pos,
                });
                i += 1;
            }
            b'+' => {
                tokens.push(Token {
                    kind: TokenKind::Plus,
                    pos,
                });
                i += 1;
            }
            b'(' => {
                tokens.push(Token {
                    kind: TokenKind::LParen,
                    pos,
                });
                i += 1;
            }
            b')' => {
                tokens.push(Token {
                    kind: TokenKind::RParen,
                    pos,
                });
                i += 1;
            }
            b'[' => {
                tokens.push(Token {
                    kind: TokenKind::LBracket,
                    pos,
                });
                i += 1;
            }
            b']' => {
                tokens.push(Token {
                    kind: TokenKind::RBracket,
                    pos,
                });
                i += 1;
            }
            b',' => {
                tokens.push(Token {
                    kind: TokenKind::Comma,
                    pos,
                });
                i += 1;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let digits = &text[start..i];
                let value: i64 = digits.parse().map_err(|_| Error::Parse {
                    pos,
                    msg: format!("number `{digits}` out of range"),
                })?;
                tokens.push(Token {
                    kind: TokenKind::Number(value),
                    pos,
                });
            }
            b'A'..=b'Z' | b'a'..=b'z' | b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                tokens.push(Token {
                    kind: TokenKind::Name(text[start..i].to_string()),
                    pos,
                });
            }
            _ => {
                return Err(Error::Parse {
                    pos,
                    msg: format!(
                        "unexpected character `{}`",
                        text[pos..].chars().next().unwrap()
                    ),
                });
            }
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    alphabet: &'a Arc<Alphabet>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn advance(&mut self) -> Option<Token> {
        let tok = self.tokens.get(self.pos).cloned();
        if tok.is_some() {
            self.pos += 1;
        }
        tok
    }

    fn expect(&mut self, kind: &TokenKind) -> Result<()> {
        match self.advance() {
            Some(tok) if tok.kind == *kind => Ok(()),
            Some(tok) => Err(Error::Parse {
                pos: tok.pos,
                msg: format!(
                    "expected `{}`, found `{}`",
                    kind.describe(),
                    tok.kind.describe()
                ),
            }),
            None => Err(Error::Parse {
                pos: self.end_pos(),
                msg: format!("expected `{}`, found end of input", kind.describe()),
            }),
        }
    }

    fn end_pos(&self) -> usize {
        self.tokens.last().map_or(0, |t| t.pos + 1)
    }

    fn starts_atom(kind: &TokenKind) -> bool {
        matches!(
            kind,
            TokenKind::Name(_) | TokenKind::Number(1) | TokenKind::LParen | TokenKind::LBracket
        )
    }

    fn expr(&mut self) -> Result<Word> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(tok) if tok.kind == TokenKind::Star => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = checked_multiply(&acc, &rhs)?;
                }
                Some(tok) if Self::starts_atom(&tok.kind) => {
                    let rhs = self.term()?;
                    acc = checked_multiply(&acc, &rhs)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Word> {
        let mut base = self.atom()?;
        while matches!(self.peek(), Some(tok) if tok.kind == TokenKind::Caret) {
            self.pos += 1;
            base = self.apply_exponent(base)?;
        }
        Ok(base)
    }

    fn apply_exponent(&mut self, base: Word) -> Result<Word> {
        match self.peek().cloned() {
            Some(tok) => match tok.kind {
                TokenKind::Minus | TokenKind::Plus => {
                    let negative = tok.kind == TokenKind::Minus;
                    self.pos += 1;
                    let n = self.integer_literal()?;
                    self.checked_pow(&base, if negative { -n } else { n }, tok.pos)
                }
                TokenKind::Number(n) => {
                    self.pos += 1;
                    self.checked_pow(&base, n, tok.pos)
                }
                TokenKind::Name(_) | TokenKind::LParen | TokenKind::LBracket => {
                    let by = self.atom()?;
                    base.conjugate(&by)
                }
                _ => Err(Error::Parse {
                    pos: tok.pos,
                    msg: format!("expected exponent, found `{}`", tok.kind.describe()),
                }),
            },
            None => Err(Error::Parse {
                pos: self.end_pos(),
                msg: "expected exponent, found end of input".into(),
            }),
        }
    }

    fn integer_literal(&mut self) -> Result<i64> {
        match self.advance() {
            Some(Token {
                kind: TokenKind::Number(n),
                ..
            }) => Ok(n),
            Some(tok) => Err(Error::Parse {
                pos: tok.pos,
                msg: format!("expected number, found `{}`", tok.kind.describe()),
            }),
            None => Err(Error::Parse {
                pos: self.end_pos(),
                msg: "expected number, found end of input".into(),
            }),
        }
    }

    fn checked_pow(&self, base: &Word, n: i64, pos: usize) -> Result<Word> {
        let size = base.len().saturating_mul(n.unsigned_abs() as usize);
        if size > MAX_WORD_LETTERS {
            return Err(Error::Parse {
                pos,
                msg: format!("exponent {n} makes the word too large"),
            });
        }
        Ok(base.pow(n))
    }

    fn atom(&mut self) -> Result<Word> {
        match self.advance() {
            Some(tok) => match tok.kind {
                TokenKind::Name(name) => match self.alphabet.index_of(&name) {
                    Some(index) => Word::generator(self.alphabet, index),
                    None => Err(Error::UnknownGenerator { name, pos: tok.pos }),
                },
                TokenKind::Number(1) => Ok(Word::identity(self.alphabet)),
                TokenKind::LParen => {
                    let inner = self.expr()?;
                    self.expect(&TokenKind::RParen)?;
                    Ok(inner)
                }
                TokenKind::LBracket => {
                    let mut parts = vec![self.expr()?];
                    while matches!(self.peek(), Some(t) if t.kind == TokenKind::Comma) {
                        self.pos += 1;
                        parts.push(self.expr()?);
                    }
                    self.expect(&TokenKind::RBracket)?;
                    left_normed_commutator(&parts)
                }
                other => Err(Error::Parse {
                    pos: tok.pos,
                    msg: format!("expected a word, found `{}`", other.describe()),
                }),
            },
            None => Err(Error::Parse {
                pos: self.end_pos(),
                msg: "expected a word, found end of input".into(),
            }),
        }
    }
}

fn checked_multiply(a: &Word, b: &Word) -> Result<Word> {
    if a.len() + b.len() > MAX_WORD_LETTERS {
        return Err(Error::Budget("word length limit during parse".into()));
    }
    a.multiply(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_gen() -> Arc<Alphabet> {
        Alphabet::new(["a", "t"]).unwrap()
    }

    fn parse(text: &str) -> Word {
        parse_word(text, &two_gen()).unwrap()
    }

    #[test]
    fn commutator_convention() {
        // [a,t] = a^-1 t^-1 a t
        let w = parse("[a,t]");
        assert_eq!(w.to_string(), "a^-1*t^-1*a*t");
    }

    #[test]
    fn cancellation() {
        assert!(parse("a*a^-1").is_identity());
        assert!(parse("a a^-1").is_identity());
        assert_eq!(parse("(a t)(t^-1 a)").to_string(), "a^2");
    }

    #[test]
    fn left_normed_brackets() {
        let alphabet = two_gen();
        let a = Word::generator(&alphabet, 0).unwrap();
        let t = Word::generator(&alphabet, 1).unwrap();
        let expect = a.commutator(&t).unwrap().commutator(&t).unwrap();
        assert_eq!(parse("[a,t,t]"), expect);
        assert_eq!(parse("[[a,t],t]"), expect);
        assert_eq!(parse("[a,t,t]").len(), 10);
    }

    #[test]
    fn conjugation_exponent() {
        // a^t = t^-1 a t
        assert_eq!(parse("a^t").to_string(), "t^-1*a*t");
        assert_eq!(parse("a^(t*a)"), parse("(t*a)^-1 * a * (t*a)"));
        assert_eq!(parse("a^[a,t]"), parse("[a,t]^-1 a [a,t]"));
    }

    #[test]
    fn integer_exponents() {
        assert_eq!(parse("a^3").to_string(), "a^3");
        assert_eq!(parse("a^-2").to_string(), "a^-2");
        assert_eq!(parse("a^0"), Word::identity(&two_gen()));
        assert_eq!(parse("(a t)^2").to_string(), "a*t*a*t");
        // ^ applies left to right
        assert_eq!(parse("a^t^2"), parse("(a^t)^2"));
    }

    #[test]
    fn identity_literal() {
        assert!(parse("1").is_identity());
        assert_eq!(parse("a*1*t"), parse("a t"));
    }

    #[test]
    fn error_positions() {
        let alphabet = two_gen();
        match parse_word("a*%", &alphabet) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse_word("a*b", &alphabet) {
            Err(Error::UnknownGenerator { name, pos }) => {
                assert_eq!(name, "b");
                assert_eq!(pos, 2);
            }
            other => panic!("expected unknown generator, got {other:?}"),
        }
        match parse_word("(a", &alphabet) {
            Err(Error::Parse { .. }) => {}
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse_word("a^", &alphabet) {
            Err(Error::Parse { .. }) => {}
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn huge_exponent_rejected() {
        let alphabet = two_gen();
        assert!(matches!(
            parse_word("(a t)^999999999", &alphabet),
            Err(Error::Parse { .. })
        ));
    }
}
