//! Hide short text messages inside the arithmetic equations of a
//! "math quiz" SMS.
//!
//! Each message character maps to a small code value, random operators are
//! slotted between the values, and every value absorbs the offset of the
//! operator that follows it. The resulting equation rides inside a fixed
//! cover text whose points count selects the key map:
//!
//! ```
//! use eqsteg::{decode, default_keymap_set, encode, KeyMapRegistry};
//!
//! let set = default_keymap_set(2).unwrap();
//! let stego = encode("Attack now", &set, 7, None).unwrap();
//! assert!(stego.full_text.starts_with("Math Quiz (2 Pts) Answer: "));
//! assert!(stego.full_text.len() <= 140);
//!
//! let mut registry = KeyMapRegistry::new();
//! registry.register(set).unwrap();
//! assert_eq!(decode(&stego.full_text, &registry).unwrap(), "Attack now");
//! ```
//!
//! All types are immutable after construction and all operations are pure
//! functions, so everything here is safe to share across threads.

pub mod analysis;
pub mod codec;
pub mod eqparse;
mod error;
pub mod keymap;

pub use codec::{decode, encode, OperatorSequence, OperatorWeights};
pub use eqparse::{Equation, EquationToken, StegoEnvelope, SMS_MAX_CHARS};
pub use error::{Error, KeymapParseErrorKind, TokenizeErrorKind};
pub use keymap::{
    default_keymap_set, generate_keymap_set, parse_keymap_set, serialize_keymap_set,
    validate_keymap_set, CharMap, KeyMapRegistry, KeyMapSet, Operator, OperatorKeyMap,
};
