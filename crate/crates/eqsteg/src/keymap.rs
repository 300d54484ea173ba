//! Mapping tables and operator key maps shared between sender and receiver.
//!
//! A [`KeyMapSet`] bundles a [`CharMap`] (symbol -> code value) with an
//! [`OperatorKeyMap`] (operator -> additive offset) under a small numeric id
//! that fits in the cover text's points hint. Sets can be generated, checked,
//! and exchanged as plain-text keymap files.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, KeymapParseErrorKind};

/// Smallest permitted key map id.
pub const KEYMAP_ID_MIN: u8 = 1;
/// Largest permitted key map id (keeps the points hint at two characters).
pub const KEYMAP_ID_MAX: u8 = 99;
/// Largest permitted charmap code value.
pub const CHARMAP_VALUE_MAX: u32 = 999;
/// Largest permitted operator offset (keeps embedded numbers at four digits).
pub const OFFSET_MAX: u32 = 999;

const KEYMAP_FILE_HEADER: &str = "eqsteg-keymap v1";

/// The seven equation operators, in the fixed serialization order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Operator {
    Pow,
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Eq,
}

impl Operator {
    /// All operators in the canonical `^ + - * / % =` order.
    pub const ALL: [Operator; 7] = [
        Operator::Pow,
        Operator::Add,
        Operator::Sub,
        Operator::Mul,
        Operator::Div,
        Operator::Mod,
        Operator::Eq,
    ];

    /// The six operators eligible for random selection; `=` is reserved for
    /// the terminal position.
    pub const NON_EQUALS: [Operator; 6] = [
        Operator::Pow,
        Operator::Add,
        Operator::Sub,
        Operator::Mul,
        Operator::Div,
        Operator::Mod,
    ];

    pub fn symbol(self) -> char {
        match self {
            Operator::Pow => '^',
            Operator::Add => '+',
            Operator::Sub => '-',
            Operator::Mul => '*',
            Operator::Div => '/',
            Operator::Mod => '%',
            Operator::Eq => '=',
        }
    }

    pub fn from_symbol(c: char) -> Option<Operator> {
        match c {
            '^' => Some(Operator::Pow),
            '+' => Some(Operator::Add),
            '-' => Some(Operator::Sub),
            '*' => Some(Operator::Mul),
            '/' => Some(Operator::Div),
            '%' => Some(Operator::Mod),
            '=' => Some(Operator::Eq),
            _ => None,
        }
    }

    /// Position within [`Operator::NON_EQUALS`], `None` for `=`.
    pub(crate) fn non_equals_index(self) -> Option<usize> {
        Operator::NON_EQUALS.iter().position(|&op| op == self)
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_char(self.symbol())
    }
}

/// Bijection between message symbols and positive integer code values.
///
/// Entries are an ordered list so that serialization round trips exactly.
/// Construction does not validate; run [`validate_keymap_set`] to check the
/// bijection and value-range invariants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharMap {
    entries: Vec<(char, u32)>,
}

impl CharMap {
    pub fn new(entries: Vec<(char, u32)>) -> CharMap {
        CharMap { entries }
    }

    pub fn entries(&self) -> &[(char, u32)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Code value for a symbol, if mapped.
    pub fn value_of(&self, symbol: char) -> Option<u32> {
        self.entries
            .iter()
            .find(|(s, _)| *s == symbol)
            .map(|&(_, v)| v)
    }

    /// Symbol for a code value, if the value is in the map's image.
    pub fn symbol_for(&self, value: u32) -> Option<char> {
        self.entries
            .iter()
            .find(|(_, v)| *v == value)
            .map(|&(s, _)| s)
    }
}

impl Default for CharMap {
    /// The 63-symbol table: `A`-`Z` -> 1-26, `a`-`z` -> 27-52,
    /// `1`-`9` -> 53-61, `0` -> 62, space -> 63.
    fn default() -> CharMap {
        let mut entries = Vec::with_capacity(63);
        for (i, c) in ('A'..='Z').enumerate() {
            entries.push((c, i as u32 + 1));
        }
        for (i, c) in ('a'..='z').enumerate() {
            entries.push((c, i as u32 + 27));
        }
        for (i, c) in ('1'..='9').enumerate() {
            entries.push((c, i as u32 + 53));
        }
        entries.push(('0', 62));
        entries.push((' ', 63));
        CharMap { entries }
    }
}

/// Additive offset per operator, applied to the value in front of the
/// operator when embedding and subtracted again when extracting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorKeyMap {
    entries: Vec<(Operator, u32)>,
}

impl OperatorKeyMap {
    pub fn new(entries: Vec<(Operator, u32)>) -> OperatorKeyMap {
        OperatorKeyMap { entries }
    }

    pub fn entries(&self) -> &[(Operator, u32)] {
        &self.entries
    }

    /// Embedding offset for an operator; the extraction offset is its
    /// negation.
    pub fn offset(&self, operator: Operator) -> Option<u32> {
        self.entries
            .iter()
            .find(|(op, _)| *op == operator)
            .map(|&(_, off)| off)
    }
}

impl Default for OperatorKeyMap {
    fn default() -> OperatorKeyMap {
        OperatorKeyMap {
            entries: vec![
                (Operator::Pow, 174),
                (Operator::Add, 32),
                (Operator::Sub, 5),
                (Operator::Mul, 78),
                (Operator::Div, 100),
                (Operator::Mod, 62),
                (Operator::Eq, 81),
            ],
        }
    }
}

/// A charmap and operator key map bundled under one selectable id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyMapSet {
    pub id: u8,
    pub charmap: CharMap,
    pub opmap: OperatorKeyMap,
}

/// Key map sets indexed by id; decoding looks the sender's choice up here.
#[derive(Debug, Clone, Default)]
pub struct KeyMapRegistry {
    sets: BTreeMap<u8, KeyMapSet>,
}

impl KeyMapRegistry {
    pub fn new() -> KeyMapRegistry {
        KeyMapRegistry::default()
    }

    /// Registry preloaded with the default tables under every id 1-99.
    pub fn with_defaults() -> KeyMapRegistry {
        let mut registry = KeyMapRegistry::new();
        for id in KEYMAP_ID_MIN..=KEYMAP_ID_MAX {
            let set = default_keymap_set(id).expect("id in range");
            registry.sets.insert(id, set);
        }
        registry
    }

    /// Ids must be unique; registering a taken id is an error.
    pub fn register(&mut self, set: KeyMapSet) -> Result<(), Error> {
        if !(KEYMAP_ID_MIN..=KEYMAP_ID_MAX).contains(&set.id) {
            return Err(Error::IdOutOfRange { id: set.id as u32 });
        }
        if self.sets.contains_key(&set.id) {
            return Err(Error::DuplicateKeyMap { id: set.id });
        }
        self.sets.insert(set.id, set);
        Ok(())
    }

    pub fn get(&self, id: u8) -> Result<&KeyMapSet, Error> {
        self.sets.get(&id).ok_or(Error::UnknownKeyMap { id })
    }

    pub fn contains(&self, id: u8) -> bool {
        self.sets.contains_key(&id)
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

/// A single invariant violation found by [`validate_keymap_set`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateSymbol { symbol: char },
    DuplicateValue { value: u32 },
    ValueOutOfRange { symbol: char, value: u32 },
    OffsetOutOfRange { operator: Operator, offset: u32 },
    MissingOperator { operator: Operator },
    DuplicateOperator { operator: Operator },
    IdOutOfRange { id: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateSymbol { symbol } => write!(f, "duplicate symbol {symbol:?}"),
            Violation::DuplicateValue { value } => write!(f, "duplicate value {value}"),
            Violation::ValueOutOfRange { symbol, value } => {
                write!(
                    f,
                    "value {value} for symbol {symbol:?} out of range (1-{CHARMAP_VALUE_MAX})"
                )
            }
            Violation::OffsetOutOfRange { operator, offset } => {
                write!(
                    f,
                    "offset {offset} for operator '{operator}' out of range (0-{OFFSET_MAX})"
                )
            }
            Violation::MissingOperator { operator } => write!(f, "missing operator {operator}"),
            Violation::DuplicateOperator { operator } => write!(f, "duplicate operator {operator}"),
            Violation::IdOutOfRange { id } => {
                write!(f, "id {id} out of range ({KEYMAP_ID_MIN}-{KEYMAP_ID_MAX})")
            }
        }
    }
}

/// The example tables from the reference mapping, under the given id.
pub fn default_keymap_set(id: u8) -> Result<KeyMapSet, Error> {
    check_id(id as u32)?;
    Ok(KeyMapSet {
        id,
        charmap: CharMap::default(),
        opmap: OperatorKeyMap::default(),
    })
}

/// Checks every invariant and returns the full list of violations; an empty
/// list means the set is valid.
pub fn validate_keymap_set(set: &KeyMapSet) -> Vec<Violation> {
    let mut violations = Vec::new();

    if !(KEYMAP_ID_MIN..=KEYMAP_ID_MAX).contains(&set.id) {
        violations.push(Violation::IdOutOfRange { id: set.id as u32 });
    }

    let entries = set.charmap.entries();
    for (i, &(symbol, value)) in entries.iter().enumerate() {
        if entries[..i].iter().any(|&(s, _)| s == symbol) {
            violations.push(Violation::DuplicateSymbol { symbol });
        }
        if entries[..i].iter().any(|&(_, v)| v == value) {
            violations.push(Violation::DuplicateValue { value });
        }
        if value == 0 || value > CHARMAP_VALUE_MAX {
            violations.push(Violation::ValueOutOfRange { symbol, value });
        }
    }

    let ops = set.opmap.entries();
    for operator in Operator::ALL {
        let count = ops.iter().filter(|(op, _)| *op == operator).count();
        if count == 0 {
            violations.push(Violation::MissingOperator { operator });
        }
        for _ in 1..count {
            violations.push(Violation::DuplicateOperator { operator });
        }
    }
    for &(operator, offset) in ops {
        if offset > OFFSET_MAX {
            violations.push(Violation::OffsetOutOfRange { operator, offset });
        }
    }

    violations
}

/// Deterministically generates a fresh valid set from `(id, seed)`.
///
/// The 63 default symbols get distinct random values in 1-99 and the seven
/// operators get distinct random offsets in 1-199, so embedded numbers stay
/// at three digits or fewer.
pub fn generate_keymap_set(id: u8, seed: u64) -> Result<KeyMapSet, Error> {
    check_id(id as u32)?;
    let mut rng = ChaCha8Rng::seed_from_u64((id as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ seed);

    let symbols: Vec<char> = CharMap::default()
        .entries()
        .iter()
        .map(|&(s, _)| s)
        .collect();
    let values = sample_distinct(&mut rng, 1, 99, symbols.len());
    let charmap = CharMap::new(symbols.into_iter().zip(values).collect());

    let offsets = sample_distinct(&mut rng, 1, 199, Operator::ALL.len());
    let opmap = OperatorKeyMap::new(Operator::ALL.into_iter().zip(offsets).collect());

    Ok(KeyMapSet { id, charmap, opmap })
}

/// `count` distinct values drawn from `low..=high` by partial Fisher-Yates.
fn sample_distinct(rng: &mut ChaCha8Rng, low: u32, high: u32, count: usize) -> Vec<u32> {
    let mut pool: Vec<u32> = (low..=high).collect();
    assert!(count <= pool.len());
    for i in 0..count {
        let j = rng.gen_range(i..pool.len());
        pool.swap(i, j);
    }
    pool.truncate(count);
    pool
}

/// Renders a valid set as a keymap document (see the file format notes on
/// [`parse_keymap_set`]). Fails with the violation list if the set is invalid.
pub fn serialize_keymap_set(set: &KeyMapSet) -> Result<String, Error> {
    let violations = validate_keymap_set(set);
    if !violations.is_empty() {
        return Err(Error::InvalidKeyMap { violations });
    }

    let mut doc = String::new();
    doc.push_str(KEYMAP_FILE_HEADER);
    doc.push('\n');
    let _ = writeln!(doc, "id {}", set.id);
    let _ = writeln!(doc, "charmap {}", set.charmap.len());
    for &(symbol, value) in set.charmap.entries() {
        let _ = writeln!(doc, "{} {}", symbol as u32, value);
    }
    let _ = writeln!(doc, "opmap 7");
    for operator in Operator::ALL {
        let offset = set
            .opmap
            .offset(operator)
            .ok_or(Error::MissingOperator { operator })?;
        let _ = writeln!(doc, "{} {}", operator.symbol(), offset);
    }
    Ok(doc)
}

/// Parses a keymap document produced by [`serialize_keymap_set`].
///
/// Format (UTF-8, LF endings, trailing newline required):
///
/// ```text
/// eqsteg-keymap v1
/// id <integer>
/// charmap <count>
/// <symbol-codepoint-decimal> <value>   (count lines)
/// opmap 7
/// <operator-char> <offset>            (7 lines, in ^ + - * / % = order)
/// ```
pub fn parse_keymap_set(doc: &str) -> Result<KeyMapSet, Error> {
    let total_lines = doc.lines().count();
    if !doc.ends_with('\n') {
        return Err(parse_err(
            total_lines.max(1),
            KeymapParseErrorKind::MissingTrailingNewline,
        ));
    }

    let mut lines = doc.lines().enumerate().map(|(i, line)| (i + 1, line));

    let (line_no, header) = next_line(&mut lines, total_lines)?;
    if header != KEYMAP_FILE_HEADER {
        return Err(parse_err(line_no, KeymapParseErrorKind::UnsupportedVersion));
    }

    let (line_no, id_line) = next_line(&mut lines, total_lines)?;
    let id_field = id_line
        .strip_prefix("id ")
        .ok_or_else(|| malformed(line_no, "id <integer>"))?;
    let id: u32 = id_field
        .parse()
        .map_err(|_| malformed(line_no, "id <integer>"))?;
    check_id(id)?;

    let (_, count) = expect_section(&mut lines, total_lines, "charmap", "charmap <count>")?;
    let mut entries: Vec<(char, u32)> = Vec::with_capacity(count.min(256));
    for _ in 0..count {
        let (line_no, entry) = next_line(&mut lines, total_lines)?;
        let (codepoint_field, value_field) = entry
            .split_once(' ')
            .ok_or_else(|| malformed(line_no, "<codepoint> <value>"))?;
        let codepoint: u32 = codepoint_field
            .parse()
            .map_err(|_| malformed(line_no, "<codepoint> <value>"))?;
        let value: u32 = value_field
            .parse()
            .map_err(|_| malformed(line_no, "<codepoint> <value>"))?;
        let symbol = char::from_u32(codepoint).ok_or(parse_err(
            line_no,
            KeymapParseErrorKind::InvalidCodepoint { codepoint },
        ))?;
        if entries.iter().any(|&(s, _)| s == symbol) {
            return Err(parse_err(
                line_no,
                KeymapParseErrorKind::DuplicateSymbol { symbol },
            ));
        }
        if entries.iter().any(|&(_, v)| v == value) {
            return Err(parse_err(
                line_no,
                KeymapParseErrorKind::DuplicateValue { value },
            ));
        }
        entries.push((symbol, value));
    }

    let (line_no, op_count) = expect_section(&mut lines, total_lines, "opmap", "opmap 7")?;
    if op_count != 7 {
        return Err(malformed(line_no, "opmap 7"));
    }
    let mut op_entries: Vec<(Operator, u32)> = Vec::with_capacity(7);
    for expected in Operator::ALL {
        let (line_no, entry) = next_line(&mut lines, total_lines)?;
        let (op_field, offset_field) = entry
            .split_once(' ')
            .ok_or_else(|| malformed(line_no, "<operator> <offset>"))?;
        let mut op_chars = op_field.chars();
        let found = op_chars
            .next()
            .filter(|_| op_chars.next().is_none())
            .and_then(Operator::from_symbol)
            .ok_or_else(|| malformed(line_no, "<operator> <offset>"))?;
        if found != expected {
            return Err(parse_err(
                line_no,
                KeymapParseErrorKind::OperatorOutOfOrder { expected, found },
            ));
        }
        let offset: u32 = offset_field
            .parse()
            .map_err(|_| malformed(line_no, "<operator> <offset>"))?;
        op_entries.push((found, offset));
    }

    if let Some((line_no, _)) = lines.next() {
        return Err(parse_err(line_no, KeymapParseErrorKind::TrailingContent));
    }

    let set = KeyMapSet {
        id: id as u8,
        charmap: CharMap::new(entries),
        opmap: OperatorKeyMap::new(op_entries),
    };
    let violations = validate_keymap_set(&set);
    if !violations.is_empty() {
        return Err(Error::InvalidKeyMap { violations });
    }
    Ok(set)
}

fn check_id(id: u32) -> Result<(), Error> {
    if (KEYMAP_ID_MIN as u32..=KEYMAP_ID_MAX as u32).contains(&id) {
        Ok(())
    } else {
        Err(Error::IdOutOfRange { id })
    }
}

fn parse_err(line: usize, kind: KeymapParseErrorKind) -> Error {
    Error::KeymapParse { line, kind }
}

fn malformed(line: usize, expected: &'static str) -> Error {
    parse_err(line, KeymapParseErrorKind::MalformedLine { expected })
}

fn next_line<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    total_lines: usize,
) -> Result<(usize, &'a str), Error> {
    lines.next().ok_or(parse_err(
        total_lines + 1,
        KeymapParseErrorKind::UnexpectedEnd,
    ))
}

fn expect_section<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    total_lines: usize,
    section: &str,
    expected: &'static str,
) -> Result<(usize, usize), Error> {
    let (line_no, line) = next_line(lines, total_lines)?;
    let (name, count_field) = line
        .split_once(' ')
        .ok_or_else(|| malformed(line_no, expected))?;
    if name != section {
        return Err(parse_err(
            line_no,
            KeymapParseErrorKind::UnknownSection {
                found: name.to_string(),
            },
        ));
    }
    let count: usize = count_field
        .parse()
        .map_err(|_| malformed(line_no, expected))?;
    Ok((line_no, count))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_set_matches_reference_tables() {
        let set = default_keymap_set(2).unwrap();
        assert_eq!(set.id, 2);
        assert_eq!(set.charmap.value_of('A'), Some(1));
        assert_eq!(set.charmap.value_of('N'), Some(14));
        assert_eq!(set.charmap.value_of('Z'), Some(26));
        assert_eq!(set.charmap.value_of('a'), Some(27));
        assert_eq!(set.charmap.value_of('n'), Some(40));
        assert_eq!(set.charmap.value_of('z'), Some(52));
        assert_eq!(set.charmap.value_of('1'), Some(53));
        assert_eq!(set.charmap.value_of('9'), Some(61));
        assert_eq!(set.charmap.value_of('0'), Some(62));
        assert_eq!(set.charmap.value_of(' '), Some(63));
        assert_eq!(set.charmap.len(), 63);

        assert_eq!(set.opmap.offset(Operator::Pow), Some(174));
        assert_eq!(set.opmap.offset(Operator::Add), Some(32));
        assert_eq!(set.opmap.offset(Operator::Sub), Some(5));
        assert_eq!(set.opmap.offset(Operator::Mul), Some(78));
        assert_eq!(set.opmap.offset(Operator::Div), Some(100));
        assert_eq!(set.opmap.offset(Operator::Mod), Some(62));
        assert_eq!(set.opmap.offset(Operator::Eq), Some(81));
    }

    #[test]
    fn default_set_rejects_out_of_range_ids() {
        assert_eq!(
            default_keymap_set(0).unwrap_err(),
            Error::IdOutOfRange { id: 0 }
        );
        assert_eq!(
            default_keymap_set(100).unwrap_err(),
            Error::IdOutOfRange { id: 100 }
        );
    }

    #[test]
    fn every_default_set_validates() {
        for id in KEYMAP_ID_MIN..=KEYMAP_ID_MAX {
            let set = default_keymap_set(id).unwrap();
            assert!(validate_keymap_set(&set).is_empty(), "id {id}");
        }
    }

    #[test]
    fn validate_reports_duplicate_value() {
        let mut set = default_keymap_set(2).unwrap();
        set.charmap = CharMap::new(vec![('A', 1), ('B', 1)]);
        let violations = validate_keymap_set(&set);
        assert!(violations.contains(&Violation::DuplicateValue { value: 1 }));
    }

    #[test]
    fn validate_reports_duplicate_symbol() {
        let mut set = default_keymap_set(2).unwrap();
        set.charmap = CharMap::new(vec![('A', 1), ('A', 2)]);
        let violations = validate_keymap_set(&set);
        assert!(violations.contains(&Violation::DuplicateSymbol { symbol: 'A' }));
    }

    #[test]
    fn validate_reports_missing_operator() {
        let mut set = default_keymap_set(2).unwrap();
        let entries: Vec<(Operator, u32)> = set
            .opmap
            .entries()
            .iter()
            .copied()
            .filter(|(op, _)| *op != Operator::Div)
            .collect();
        set.opmap = OperatorKeyMap::new(entries);
        let violations = validate_keymap_set(&set);
        assert_eq!(
            violations,
            vec![Violation::MissingOperator {
                operator: Operator::Div
            }]
        );
        assert_eq!(violations[0].to_string(), "missing operator /");
    }

    #[test]
    fn validate_reports_out_of_range_values() {
        let mut set = default_keymap_set(2).unwrap();
        set.charmap = CharMap::new(vec![('A', 0), ('B', 1000)]);
        let violations = validate_keymap_set(&set);
        assert!(violations.contains(&Violation::ValueOutOfRange {
            symbol: 'A',
            value: 0
        }));
        assert!(violations.contains(&Violation::ValueOutOfRange {
            symbol: 'B',
            value: 1000
        }));
    }

    #[test]
    fn generate_is_deterministic() {
        let a = generate_keymap_set(3, 42).unwrap();
        let b = generate_keymap_set(3, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn generate_varies_with_seed_and_validates() {
        let a = generate_keymap_set(3, 42).unwrap();
        let b = generate_keymap_set(3, 43).unwrap();
        assert_ne!(a.charmap, b.charmap);
        assert!(validate_keymap_set(&a).is_empty());
        assert!(validate_keymap_set(&b).is_empty());
    }

    #[test]
    fn generate_rejects_out_of_range_id() {
        assert_eq!(
            generate_keymap_set(100, 1).unwrap_err(),
            Error::IdOutOfRange { id: 100 }
        );
    }

    #[test]
    fn generate_stays_in_value_ranges() {
        let set = generate_keymap_set(7, 123).unwrap();
        assert_eq!(set.charmap.len(), 63);
        for &(_, value) in set.charmap.entries() {
            assert!((1..=99).contains(&value));
        }
        for &(_, offset) in set.opmap.entries() {
            assert!((1..=199).contains(&offset));
        }
    }

    #[test]
    fn serialize_default_set_header() {
        let set = default_keymap_set(2).unwrap();
        let doc = serialize_keymap_set(&set).unwrap();
        assert!(doc.starts_with("eqsteg-keymap v1\nid 2\ncharmap 63\n65 1\n"));
        assert!(doc.ends_with("opmap 7\n^ 174\n+ 32\n- 5\n* 78\n/ 100\n% 62\n= 81\n"));
    }

    #[test]
    fn serialize_parse_round_trip() {
        for (id, seed) in [(2u8, 0u64), (3, 42), (99, 7)] {
            let set = if seed == 0 {
                default_keymap_set(id).unwrap()
            } else {
                generate_keymap_set(id, seed).unwrap()
            };
            let doc = serialize_keymap_set(&set).unwrap();
            let parsed = parse_keymap_set(&doc).unwrap();
            assert_eq!(parsed, set);
        }
    }

    #[test]
    fn parse_rejects_duplicate_symbol_with_line_number() {
        let set = default_keymap_set(2).unwrap();
        let doc = serialize_keymap_set(&set).unwrap();
        // duplicate the first charmap entry ("65 1" on line 4) as line 5,
        // bumping the count so line accounting stays aligned
        let doc = doc.replace("charmap 63\n65 1\n", "charmap 64\n65 1\n65 1\n");
        let err = parse_keymap_set(&doc).unwrap_err();
        assert_eq!(
            err,
            Error::KeymapParse {
                line: 5,
                kind: KeymapParseErrorKind::DuplicateSymbol { symbol: 'A' }
            }
        );
    }

    #[test]
    fn parse_rejects_unknown_version() {
        let err = parse_keymap_set("eqsteg-keymap v2\n").unwrap_err();
        assert_eq!(
            err,
            Error::KeymapParse {
                line: 1,
                kind: KeymapParseErrorKind::UnsupportedVersion
            }
        );
    }

    #[test]
    fn parse_requires_trailing_newline() {
        let set = default_keymap_set(2).unwrap();
        let mut doc = serialize_keymap_set(&set).unwrap();
        doc.pop();
        let err = parse_keymap_set(&doc).unwrap_err();
        assert!(matches!(
            err,
            Error::KeymapParse {
                kind: KeymapParseErrorKind::MissingTrailingNewline,
                ..
            }
        ));
    }

    #[test]
    fn parse_rejects_trailing_content() {
        let set = default_keymap_set(2).unwrap();
        let doc = serialize_keymap_set(&set).unwrap() + "extra\n";
        let err = parse_keymap_set(&doc).unwrap_err();
        assert_eq!(
            err,
            Error::KeymapParse {
                line: 75,
                kind: KeymapParseErrorKind::TrailingContent
            }
        );
    }

    #[test]
    fn parse_rejects_out_of_order_operators() {
        let set = default_keymap_set(2).unwrap();
        let doc = serialize_keymap_set(&set)
            .unwrap()
            .replace("^ 174\n+ 32\n", "+ 32\n^ 174\n");
        let err = parse_keymap_set(&doc).unwrap_err();
        assert_eq!(
            err,
            Error::KeymapParse {
                line: 68,
                kind: KeymapParseErrorKind::OperatorOutOfOrder {
                    expected: Operator::Pow,
                    found: Operator::Add
                }
            }
        );
    }

    #[test]
    fn parse_rejects_unknown_section() {
        let err = parse_keymap_set("eqsteg-keymap v1\nid 2\nsymbols 63\n").unwrap_err();
        assert_eq!(
            err,
            Error::KeymapParse {
                line: 3,
                kind: KeymapParseErrorKind::UnknownSection {
                    found: "symbols".to_string()
                }
            }
        );
    }

    #[test]
    fn parse_rejects_out_of_range_id() {
        let err = parse_keymap_set("eqsteg-keymap v1\nid 100\ncharmap 0\nopmap 7\n").unwrap_err();
        assert_eq!(err, Error::IdOutOfRange { id: 100 });
    }

    #[test]
    fn registry_lookup_and_duplicates() {
        let mut registry = KeyMapRegistry::new();
        registry.register(default_keymap_set(2).unwrap()).unwrap();
        assert!(registry.get(2).is_ok());
        assert_eq!(registry.get(9).unwrap_err(), Error::UnknownKeyMap { id: 9 });
        assert_eq!(
            registry
                .register(default_keymap_set(2).unwrap())
                .unwrap_err(),
            Error::DuplicateKeyMap { id: 2 }
        );
    }

    #[test]
    fn registry_with_defaults_covers_all_ids() {
        let registry = KeyMapRegistry::with_defaults();
        assert_eq!(registry.len(), 99);
        assert!(registry.get(1).is_ok());
        assert!(registry.get(99).is_ok());
    }
}
