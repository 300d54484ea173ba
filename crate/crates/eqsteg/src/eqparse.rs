//! Equation tokenizing/rendering and the cover-text envelope.
//!
//! An [`Equation`] is a strict alternation of numbers and operators ending in
//! a single `=`. The [`StegoEnvelope`] wraps an equation in the fixed
//! `Math Quiz (N Pts) Answer: ` cover text whose points count doubles as the
//! key map selector.

use std::fmt;

use crate::error::{Error, TokenizeErrorKind};
use crate::keymap::{Operator, KEYMAP_ID_MAX, KEYMAP_ID_MIN};

/// Hard SMS budget for the whole stego text.
pub const SMS_MAX_CHARS: usize = 140;

const ENVELOPE_HEAD: &str = "Math Quiz (";
const ENVELOPE_TAIL: &str = " Pts) Answer: ";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquationToken {
    Number(u32),
    Operator(Operator),
}

impl fmt::Display for EquationToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EquationToken::Number(value) => write!(f, "{value}"),
            EquationToken::Operator(op) => write!(f, "{op}"),
        }
    }
}

/// A validated equation: `n` numbers alternating with `n` operators, the last
/// of which is always `=`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    tokens: Vec<EquationToken>,
}

impl Equation {
    /// Validates the alternation and terminal-equals invariants; the error
    /// index refers to a token, not a character.
    pub fn from_tokens(tokens: Vec<EquationToken>) -> Result<Equation, Error> {
        if tokens.is_empty() {
            return Err(seq_err(0, TokenizeErrorKind::Empty));
        }
        let last = tokens.len() - 1;
        for (index, token) in tokens.iter().enumerate() {
            match (index % 2 == 0, token) {
                (true, EquationToken::Number(_)) => {}
                (true, EquationToken::Operator(_)) => {
                    return Err(seq_err(index, TokenizeErrorKind::ExpectedNumber));
                }
                (false, EquationToken::Number(_)) => {
                    return Err(seq_err(index, TokenizeErrorKind::ExpectedOperator));
                }
                (false, EquationToken::Operator(op)) => {
                    if *op == Operator::Eq && index != last {
                        return Err(seq_err(index, TokenizeErrorKind::EqualsBeforeEnd));
                    }
                }
            }
        }
        if tokens[last] != EquationToken::Operator(Operator::Eq) {
            return Err(seq_err(tokens.len(), TokenizeErrorKind::MissingEquals));
        }
        Ok(Equation { tokens })
    }

    pub fn tokens(&self) -> &[EquationToken] {
        &self.tokens
    }

    /// Number of (number, operator) pairs, i.e. the embedded message length.
    pub fn term_count(&self) -> usize {
        self.tokens.len() / 2
    }

    /// Each number together with the operator immediately following it.
    pub fn pairs(&self) -> impl Iterator<Item = (u32, Operator)> + '_ {
        self.tokens.chunks_exact(2).map(|pair| match pair {
            [EquationToken::Number(value), EquationToken::Operator(op)] => (*value, *op),
            _ => unreachable!("equation invariants hold by construction"),
        })
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for token in &self.tokens {
            write!(f, "{token}")?;
        }
        Ok(())
    }
}

/// Number of decimal digits in `value` (1 for 0).
pub fn digit_count(value: u32) -> usize {
    let mut digits = 1;
    let mut rest = value / 10;
    while rest > 0 {
        digits += 1;
        rest /= 10;
    }
    digits
}

/// Tokenizes equation text such as `63%51-220^201=`.
///
/// Rejects whitespace, leading zeros, characters outside `[0-9^+-*/%=]`,
/// adjacent operators, a missing terminal `=`, and any `=` before the end.
/// Never panics, whatever the input.
pub fn tokenize_equation(text: &str) -> Result<Equation, Error> {
    let chars: Vec<char> = text.chars().collect();
    if chars.is_empty() {
        return Err(tok_err(0, TokenizeErrorKind::Empty));
    }

    let mut tokens = Vec::new();
    let mut pos = 0;
    loop {
        // number
        let start = pos;
        let first = chars[pos];
        if !first.is_ascii_digit() {
            let kind = if Operator::from_symbol(first).is_some() {
                TokenizeErrorKind::ExpectedNumber
            } else {
                TokenizeErrorKind::InvalidCharacter(first)
            };
            return Err(tok_err(pos, kind));
        }
        let mut value: u32 = 0;
        while pos < chars.len() && chars[pos].is_ascii_digit() {
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(chars[pos] as u32 - '0' as u32))
                .ok_or(tok_err(start, TokenizeErrorKind::NumberTooLarge))?;
            pos += 1;
        }
        if first == '0' && pos - start > 1 {
            return Err(tok_err(start, TokenizeErrorKind::LeadingZero));
        }
        tokens.push(EquationToken::Number(value));

        // operator
        let Some(&symbol) = chars.get(pos) else {
            return Err(tok_err(pos, TokenizeErrorKind::MissingEquals));
        };
        let Some(op) = Operator::from_symbol(symbol) else {
            return Err(tok_err(pos, TokenizeErrorKind::InvalidCharacter(symbol)));
        };
        tokens.push(EquationToken::Operator(op));
        pos += 1;

        if op == Operator::Eq {
            if pos != chars.len() {
                return Err(tok_err(pos - 1, TokenizeErrorKind::EqualsBeforeEnd));
            }
            return Ok(Equation { tokens });
        }
        if pos == chars.len() {
            return Err(tok_err(pos, TokenizeErrorKind::MissingEquals));
        }
    }
}

/// Inverse of [`tokenize_equation`]: concatenates token texts with no
/// whitespace.
pub fn render_equation(eq: &Equation) -> String {
    eq.to_string()
}

/// Stego text: the fixed cover template around the equation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StegoEnvelope {
    pub keymap_id: u8,
    pub equation_text: String,
    pub full_text: String,
}

/// The cover prefix for a given id, e.g. `Math Quiz (2 Pts) Answer: `
/// (26 characters for single-digit ids).
pub fn envelope_prefix(keymap_id: u8) -> String {
    format!("{ENVELOPE_HEAD}{keymap_id}{ENVELOPE_TAIL}")
}

/// Wraps equation text in the cover template.
///
/// The equation may be empty (a bare cover text carrying no message);
/// otherwise it must tokenize. Total length above [`SMS_MAX_CHARS`] is a
/// [`Error::CapacityExceeded`].
pub fn render_envelope(keymap_id: u8, equation_text: &str) -> Result<StegoEnvelope, Error> {
    if !(KEYMAP_ID_MIN..=KEYMAP_ID_MAX).contains(&keymap_id) {
        return Err(Error::IdOutOfRange {
            id: keymap_id as u32,
        });
    }
    let full_text = format!("{}{}", envelope_prefix(keymap_id), equation_text);
    let length = full_text.chars().count();
    if length > SMS_MAX_CHARS {
        return Err(Error::CapacityExceeded { length });
    }
    if !equation_text.is_empty() {
        tokenize_equation(equation_text)?;
    }
    Ok(StegoEnvelope {
        keymap_id,
        equation_text: equation_text.to_string(),
        full_text,
    })
}

/// Recovers the key map id and equation text from stego text; exact inverse
/// of [`render_envelope`] on its outputs. Never panics, whatever the input.
pub fn parse_envelope(text: &str) -> Result<StegoEnvelope, Error> {
    let rest = text
        .strip_prefix(ENVELOPE_HEAD)
        .ok_or(Error::MalformedStego {
            detail: "expected \"Math Quiz (\" prefix",
        })?;
    let digits_len = rest.chars().take_while(|c| c.is_ascii_digit()).count();
    let points = &rest[..digits_len];
    if points.is_empty() || (points.starts_with('0') && points.len() > 1) {
        return Err(Error::MalformedPoints);
    }
    let id: u32 = points.parse().map_err(|_| Error::MalformedPoints)?;
    if !(KEYMAP_ID_MIN as u32..=KEYMAP_ID_MAX as u32).contains(&id) {
        return Err(Error::IdOutOfRange { id });
    }
    let equation_text =
        rest[digits_len..]
            .strip_prefix(ENVELOPE_TAIL)
            .ok_or(Error::MalformedStego {
                detail: "expected \" Pts) Answer: \" after the points count",
            })?;
    if !equation_text.is_empty() {
        tokenize_equation(equation_text)?;
    }
    Ok(StegoEnvelope {
        keymap_id: id as u8,
        equation_text: equation_text.to_string(),
        full_text: text.to_string(),
    })
}

fn tok_err(position: usize, kind: TokenizeErrorKind) -> Error {
    Error::Tokenize { position, kind }
}

fn seq_err(index: usize, kind: TokenizeErrorKind) -> Error {
    Error::Sequence { index, kind }
}
