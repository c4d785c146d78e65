//! Tokenizer for the chain DSL.
//!
//! Maximal munch on identifiers and numbers; `#` starts a comment running to
//! end of line; numbers must start with a nonzero digit.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::parser::ParseError;
use crate::token::{Pos, Span, Token, TokenKind};

struct Scanner<'a> {
    rest: &'a str,
    pos: Pos,
}

impl<'a> Scanner<'a> {
    fn peek(&self) -> Option<char> {
        self.rest.chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.rest.chars().next()?;
        self.rest = &self.rest[c.len_utf8()..];
        if c == '\n' {
            self.pos.line += 1;
            self.pos.col = 1;
        } else {
            self.pos.col += 1;
        }
        Some(c)
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

fn keyword(text: &str) -> Option<TokenKind> {
    match text {
        "service" => Some(TokenKind::Service),
        "best-binding" => Some(TokenKind::BestBinding),
        "all-bindings" => Some(TokenKind::AllBindings),
        "split" => Some(TokenKind::Split),
        "pass" => Some(TokenKind::Pass),
        _ => None,
    }
}

pub fn tokenize(source: &str) -> Result<Vec<Token>, ParseError> {
    let mut sc = Scanner {
        rest: source,
        pos: Pos { line: 1, col: 1 },
    };
    let mut tokens = Vec::new();
    loop {
        match sc.peek() {
            None => break,
            Some(c) if c.is_whitespace() => {
                sc.bump();
            }
            Some('#') => {
                while let Some(c) = sc.peek() {
                    if c == '\n' {
                        break;
                    }
                    sc.bump();
                }
            }
            Some(c) if is_ident_start(c) => {
                let start = sc.pos;
                let mut text = String::new();
                while let Some(c) = sc.peek() {
                    if !is_ident_continue(c) {
                        break;
                    }
                    text.push(c);
                    sc.bump();
                }
                let kind = keyword(&text).unwrap_or(TokenKind::Ident);
                tokens.push(Token {
                    kind,
                    text,
                    span: Span { start, end: sc.pos },
                });
            }
            Some(c) if c.is_ascii_digit() => {
                let start = sc.pos;
                let mut text = String::new();
                while let Some(c) = sc.peek() {
                    if !c.is_ascii_digit() {
                        break;
                    }
                    text.push(c);
                    sc.bump();
                }
                if text.starts_with('0') {
                    return Err(ParseError::new(
                        format_leading_zero(&text),
                        Span { start, end: sc.pos },
                    ));
                }
                tokens.push(Token {
                    kind: TokenKind::Number,
                    text,
                    span: Span { start, end: sc.pos },
                });
            }
            Some(c) => {
                let start = sc.pos;
                let kind = match c {
                    '{' => Some(TokenKind::LBrace),
                    '}' => Some(TokenKind::RBrace),
                    '(' => Some(TokenKind::LParen),
                    ')' => Some(TokenKind::RParen),
                    ',' => Some(TokenKind::Comma),
                    ';' => Some(TokenKind::Semicolon),
                    '.' => Some(TokenKind::Dot),
                    _ => None,
                };
                sc.bump();
                let span = Span { start, end: sc.pos };
                match kind {
                    Some(kind) => tokens.push(Token {
                        kind,
                        text: c.to_string(),
                        span,
                    }),
                    None => {
                        return Err(ParseError::new(
                            alloc::format!("unexpected character {c:?}"),
                            span,
                        ))
                    }
                }
            }
        }
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        text: String::new(),
        span: Span {
            start: sc.pos,
            end: sc.pos,
        },
    });
    Ok(tokens)
}

fn format_leading_zero(text: &str) -> String {
    alloc::format!("number {text:?} has a leading zero; counts start at a nonzero digit")
}
