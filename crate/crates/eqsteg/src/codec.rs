//! The steganographic transform itself.
//!
//! Sender path: message symbols map to code values, random operators are
//! interleaved, and each value absorbs the offset of the operator that
//! follows it, ending in `=`. Receiver path: subtract each following
//! operator's offset and invert the charmap. Both directions are exact.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eqparse::{self, Equation, EquationToken, StegoEnvelope};
use crate::error::{Error, TokenizeErrorKind};
use crate::keymap::{CharMap, KeyMapRegistry, KeyMapSet, Operator, OperatorKeyMap};

/// Maps each message character to its charmap code value.
pub fn map_message(message: &str, charmap: &CharMap) -> Result<Vec<u32>, Error> {
    message
        .chars()
        .enumerate()
        .map(|(position, character)| {
            charmap
                .value_of(character)
                .ok_or(Error::UnsupportedCharacter {
                    position,
                    character,
                })
        })
        .collect()
}

/// Inverts [`map_message`]; each value must be in the charmap's image.
pub fn unmap_values(values: &[u32], charmap: &CharMap) -> Result<String, Error> {
    values
        .iter()
        .enumerate()
        .map(|(position, &value)| {
            charmap.symbol_for(value).ok_or(Error::ValueOutOfRange {
                position,
                value: value as i64,
            })
        })
        .collect()
}

/// Relative selection weights for the six non-equals operators.
///
/// A weight of zero removes the operator from the draw entirely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorWeights {
    weights: [u32; 6],
}

impl OperatorWeights {
    /// Every non-equals operator equally likely.
    pub fn uniform() -> OperatorWeights {
        OperatorWeights { weights: [1; 6] }
    }

    /// Weight per operator from a function over [`Operator::NON_EQUALS`].
    pub fn from_fn(weight: impl Fn(Operator) -> u32) -> OperatorWeights {
        let mut weights = [0; 6];
        for (slot, op) in weights.iter_mut().zip(Operator::NON_EQUALS) {
            *slot = weight(op);
        }
        OperatorWeights { weights }
    }

    /// All weight on a single operator.
    pub fn only(operator: Operator) -> OperatorWeights {
        OperatorWeights::from_fn(|op| u32::from(op == operator))
    }

    /// Current weight for an operator; `=` always reports zero.
    pub fn weight(&self, operator: Operator) -> u32 {
        operator
            .non_equals_index()
            .map(|i| self.weights[i])
            .unwrap_or(0)
    }

    fn total(&self) -> u64 {
        self.weights.iter().map(|&w| w as u64).sum()
    }
}

impl Default for OperatorWeights {
    fn default() -> OperatorWeights {
        OperatorWeights::uniform()
    }
}

/// A validated operator sequence: non-empty, `=` exactly once and last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorSequence {
    ops: Vec<Operator>,
}

impl OperatorSequence {
    pub fn new(ops: Vec<Operator>) -> Result<OperatorSequence, Error> {
        if ops.is_empty() {
            return Err(Error::Sequence {
                index: 0,
                kind: TokenizeErrorKind::Empty,
            });
        }
        let last = ops.len() - 1;
        for (index, op) in ops.iter().enumerate() {
            if *op == Operator::Eq && index != last {
                return Err(Error::Sequence {
                    index,
                    kind: TokenizeErrorKind::EqualsBeforeEnd,
                });
            }
        }
        if ops[last] != Operator::Eq {
            return Err(Error::Sequence {
                index: ops.len(),
                kind: TokenizeErrorKind::MissingEquals,
            });
        }
        Ok(OperatorSequence { ops })
    }

    pub fn ops(&self) -> &[Operator] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

/// Draws `count` operators deterministically from `seed`: the last is always
/// `=`, the rest come from the weighted non-equals pool.
pub fn choose_operators(
    count: usize,
    seed: u64,
    weights: Option<&OperatorWeights>,
) -> Result<OperatorSequence, Error> {
    if count == 0 {
        return Err(Error::Sequence {
            index: 0,
            kind: TokenizeErrorKind::Empty,
        });
    }
    let uniform = OperatorWeights::uniform();
    let weights = weights.unwrap_or(&uniform);

    let mut ops = Vec::with_capacity(count);
    if count > 1 {
        let total = weights.total();
        if total == 0 {
            return Err(Error::AllWeightsZero);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..count - 1 {
            let mut draw = rng.gen_range(0..total);
            let mut chosen = None;
            for op in Operator::NON_EQUALS {
                let w = weights.weight(op) as u64;
                if draw < w {
                    chosen = Some(op);
                    break;
                }
                draw -= w;
            }
            ops.push(chosen.expect("draw < total weight"));
        }
    }
    ops.push(Operator::Eq);
    OperatorSequence::new(ops)
}

/// Builds the stego equation: each value plus the offset of the operator
/// that follows it, operators interleaved, terminated by `=`.
pub fn embed(
    values: &[u32],
    operators: &OperatorSequence,
    opmap: &OperatorKeyMap,
) -> Result<Equation, Error> {
    if values.len() != operators.len() {
        return Err(Error::LengthMismatch {
            values: values.len(),
            operators: operators.len(),
        });
    }
    let mut tokens = Vec::with_capacity(values.len() * 2);
    for (&value, &op) in values.iter().zip(operators.ops()) {
        let offset = opmap
            .offset(op)
            .ok_or(Error::MissingOperator { operator: op })?;
        let number = value.checked_add(offset).ok_or(Error::NumberOverflow)?;
        tokens.push(EquationToken::Number(number));
        tokens.push(EquationToken::Operator(op));
    }
    Equation::from_tokens(tokens)
}

/// Inverts [`embed`]: subtracts each following operator's offset. A result
/// below 1 means the wrong key map (or corrupted text).
pub fn extract(eq: &Equation, opmap: &OperatorKeyMap) -> Result<Vec<u32>, Error> {
    eq.pairs()
        .enumerate()
        .map(|(position, (number, op))| {
            let offset = opmap
                .offset(op)
                .ok_or(Error::MissingOperator { operator: op })?;
            let value = number as i64 - offset as i64;
            if value < 1 {
                return Err(Error::ValueOutOfRange { position, value });
            }
            Ok(value as u32)
        })
        .collect()
}

/// Full sender path: message -> values -> equation -> enveloped stego text.
///
/// An empty message produces the bare cover text.
pub fn encode(
    message: &str,
    set: &KeyMapSet,
    seed: u64,
    weights: Option<&OperatorWeights>,
) -> Result<StegoEnvelope, Error> {
    let values = map_message(message, &set.charmap)?;
    if values.is_empty() {
        return eqparse::render_envelope(set.id, "");
    }
    let operators = choose_operators(values.len(), seed, weights)?;
    let equation = embed(&values, &operators, &set.opmap)?;
    eqparse::render_envelope(set.id, &equation.to_string())
}

/// Full receiver path: stego text -> envelope -> equation -> values ->
/// message, using the registry entry named by the envelope's points count.
pub fn decode(text: &str, registry: &KeyMapRegistry) -> Result<String, Error> {
    let envelope = eqparse::parse_envelope(text)?;
    let set = registry.get(envelope.keymap_id)?;
    if envelope.equation_text.is_empty() {
        return Ok(String::new());
    }
    let equation = eqparse::tokenize_equation(&envelope.equation_text)?;
    let values = extract(&equation, &set.opmap)?;
    unmap_values(&values, &set.charmap)
}
