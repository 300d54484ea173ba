use crate::keymap::{Operator, Violation};

/// Errors returned by every fallible operation in this crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("key map id {id} out of range (1-99)")]
    IdOutOfRange { id: u32 },

    #[error("invalid key map: {}", join_violations(violations))]
    InvalidKeyMap { violations: Vec<Violation> },

    #[error("keymap parse error at line {line}: {kind}")]
    KeymapParse {
        line: usize,
        kind: KeymapParseErrorKind,
    },

    /// Equation text rejected by the tokenizer; `position` is a character index.
    #[error("invalid equation at position {position}: {kind}")]
    Tokenize {
        position: usize,
        kind: TokenizeErrorKind,
    },

    /// A token or operator sequence violates the equation shape; `index` is an
    /// element index, not a character position.
    #[error("invalid sequence at index {index}: {kind}")]
    Sequence {
        index: usize,
        kind: TokenizeErrorKind,
    },

    #[error("malformed stego text: {detail}")]
    MalformedStego { detail: &'static str },

    #[error("malformed points field in stego text")]
    MalformedPoints,

    #[error("capacity exceeded: stego text needs {length} characters (limit 140)")]
    CapacityExceeded { length: usize },

    #[error("unsupported character {character:?} at position {position}")]
    UnsupportedCharacter { position: usize, character: char },

    #[error("value {value} out of range at position {position}")]
    ValueOutOfRange { position: usize, value: i64 },

    #[error("length mismatch: {values} values vs {operators} operators")]
    LengthMismatch { values: usize, operators: usize },

    #[error("all operator weights are zero")]
    AllWeightsZero,

    #[error("operator '{operator}' missing from key map")]
    MissingOperator { operator: Operator },

    #[error("unknown key map id {id}")]
    UnknownKeyMap { id: u8 },

    #[error("key map id {id} already registered")]
    DuplicateKeyMap { id: u8 },

    #[error("embedded number exceeds the representable range")]
    NumberOverflow,
}

fn join_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// Why a piece of equation text (or a token sequence) was rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum TokenizeErrorKind {
    #[error("empty input")]
    Empty,
    #[error("invalid character {0:?}")]
    InvalidCharacter(char),
    #[error("leading zero in number")]
    LeadingZero,
    #[error("number too large")]
    NumberTooLarge,
    #[error("expected a number")]
    ExpectedNumber,
    #[error("expected an operator")]
    ExpectedOperator,
    #[error("missing terminal '='")]
    MissingEquals,
    #[error("'=' before end")]
    EqualsBeforeEnd,
}

/// Why a keymap document failed to parse.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KeymapParseErrorKind {
    #[error("unsupported version (expected \"eqsteg-keymap v1\")")]
    UnsupportedVersion,
    #[error("malformed line (expected `{expected}`)")]
    MalformedLine { expected: &'static str },
    #[error("unknown section {found:?}")]
    UnknownSection { found: String },
    #[error("duplicate symbol {symbol:?}")]
    DuplicateSymbol { symbol: char },
    #[error("duplicate value {value}")]
    DuplicateValue { value: u32 },
    #[error("expected operator '{expected}', found '{found}'")]
    OperatorOutOfOrder { expected: Operator, found: Operator },
    #[error("invalid codepoint {codepoint}")]
    InvalidCodepoint { codepoint: u32 },
    #[error("unexpected end of document")]
    UnexpectedEnd,
    #[error("unexpected content after opmap section")]
    TrailingContent,
    #[error("missing trailing newline")]
    MissingTrailingNewline,
}
