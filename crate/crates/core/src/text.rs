//! Line tokenizer shared by the DRA and Mealy readers.

use crate::error::ParseError;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Token<'a> {
    pub text: &'a str,
    pub column: usize,
}

#[derive(Debug)]
pub(crate) struct Line<'a> {
    pub number: usize,
    pub tokens: Vec<Token<'a>>,
}

impl<'a> Line<'a> {
    pub fn error(&self, column: usize, message: impl Into<String>) -> ParseError {
        ParseError::Syntax { line: self.number, column, message: message.into() }
    }

    pub fn end_column(&self) -> usize {
        self.tokens.last().map_or(1, |t| t.column + t.text.len())
    }

    pub fn token(&self, k: usize, what: &str) -> Result<Token<'a>, ParseError> {
        self.tokens.get(k).copied().ok_or_else(|| self.error(self.end_column(), format!("expected {what}")))
    }

    pub fn expect(&self, k: usize, text: &str) -> Result<(), ParseError> {
        let t = self.token(k, &format!("`{text}`"))?;
        if t.text == text {
            Ok(())
        } else {
            Err(self.error(t.column, format!("expected `{text}`, found `{}`", t.text)))
        }
    }

    pub fn expect_len(&self, n: usize) -> Result<(), ParseError> {
        match self.tokens.get(n) {
            None => Ok(()),
            Some(t) => Err(self.error(t.column, format!("unexpected `{}`", t.text))),
        }
    }
}

/// Splits text into non-empty lines of tokens. `#` starts a comment;
/// braces are tokens of their own.
pub(crate) fn tokenize(text: &str) -> Vec<Line<'_>> {
    let mut lines = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut start: Option<usize> = None;
        for (pos, ch) in body.char_indices() {
            if ch.is_whitespace() || ch == '{' || ch == '}' {
                if let Some(s) = start.take() {
                    tokens.push(Token { text: &body[s..pos], column: s + 1 });
                }
                if !ch.is_whitespace() {
                    tokens.push(Token { text: &body[pos..pos + 1], column: pos + 1 });
                }
            } else if start.is_none() {
                start = Some(pos);
            }
        }
        if let Some(s) = start {
            tokens.push(Token { text: &body[s..], column: s + 1 });
        }
        if !tokens.is_empty() {
            lines.push(Line { number: n + 1, tokens });
        }
    }
    lines
}

pub(crate) fn is_identifier(s: &str) -> bool {
    !s.is_empty()
        && s != "*"
        && s != "->"
        && s.chars().all(|c| c.is_alphanumeric() || matches!(c, '_' | '.' | '-' | '\'' | '[' | ']' | '(' | ')' | ','))
}
