//! Tokenizer for the field-definition grammar.

use crate::expr::ExprError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Number,
    Identifier,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

/// A lexical token with its source slice and byte offset.
#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub offset: usize,
}

/// Splits `text` into tokens. Whitespace separates tokens and is dropped;
/// any character outside the token alphabet is a lex error at its byte
/// offset. Numbers are unsigned decimals with optional fraction and
/// exponent (`12`, `3.5`, `2e-3`); signs are separate tokens.
pub fn tokenize(text: &str) -> Result<Vec<Token>, ExprError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let c = bytes[pos];
        if c.is_ascii_whitespace() {
            pos += 1;
            continue;
        }
        let single = match c {
            b'+' => Some(TokenKind::Plus),
            b'-' => Some(TokenKind::Minus),
            b'*' => Some(TokenKind::Star),
            b'^' => Some(TokenKind::Caret),
            b'(' => Some(TokenKind::LParen),
            b')' => Some(TokenKind::RParen),
            _ => None,
        };
        if let Some(kind) = single {
            tokens.push(Token {
                kind,
                text: (c as char).to_string(),
                offset: pos,
            });
            pos += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'.' {
                pos += 1;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
            }
            // Exponent only when followed by a well-formed tail, so `2e`
            // lexes as number `2` then identifier `e`.
            if pos < bytes.len() && (bytes[pos] == b'e' || bytes[pos] == b'E') {
                let mut look = pos + 1;
                if look < bytes.len() && (bytes[look] == b'+' || bytes[look] == b'-') {
                    look += 1;
                }
                if look < bytes.len() && bytes[look].is_ascii_digit() {
                    look += 1;
                    while look < bytes.len() && bytes[look].is_ascii_digit() {
                        look += 1;
                    }
                    pos = look;
                }
            }
            tokens.push(Token {
                kind: TokenKind::Number,
                text: text[start..pos].to_string(),
                offset: start,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = pos;
            while pos < bytes.len()
                && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_')
            {
                pos += 1;
            }
            tokens.push(Token {
                kind: TokenKind::Identifier,
                text: text[start..pos].to_string(),
                offset: start,
            });
            continue;
        }
        return Err(ExprError::Lex { offset: pos });
    }
    Ok(tokens)
}
