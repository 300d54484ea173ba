//! Capacity accounting and plausibility linting.
//!
//! Capacity follows the length law: every embedded value contributes its
//! digit count plus one operator character, on top of the cover prefix.
//! Linting flags equations a human reader would find suspicious, such as
//! enormous exponents or a single operator dominating the text.

use std::fmt;

use crate::codec;
use crate::eqparse::{digit_count, envelope_prefix, Equation, EquationToken, SMS_MAX_CHARS};
use crate::error::Error;
use crate::keymap::{KeyMapSet, Operator};

/// How much of the SMS budget a message needs, bounded over all possible
/// operator choices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapacityReport {
    pub message_length: usize,
    pub prefix_length: usize,
    /// Total stego length under the cheapest operator choices.
    pub min_total: usize,
    /// Total stego length under the costliest operator choices.
    pub max_total: usize,
    /// Exact total for a concrete seed, when one was supplied.
    pub actual_total: Option<usize>,
    /// Percentage of the 140-character budget, round half up, based on
    /// `actual_total` when present and `min_total` otherwise.
    pub percent_used: u32,
}

/// Percentage of the SMS budget used by `total` characters, round half up.
pub fn percent_of_sms(total: usize) -> u32 {
    ((200 * total + SMS_MAX_CHARS) / (2 * SMS_MAX_CHARS)) as u32
}

/// Computes the capacity envelope for a message under a key map set.
///
/// With a seed, also reports the exact stego length that [`codec::encode`]
/// would produce for that seed (even when it exceeds the SMS budget).
pub fn capacity_report(
    message: &str,
    set: &KeyMapSet,
    seed: Option<u64>,
) -> Result<CapacityReport, Error> {
    let values = codec::map_message(message, &set.charmap)?;
    let prefix_length = envelope_prefix(set.id).len();

    let mut min_total = prefix_length;
    let mut max_total = prefix_length;
    for (index, &value) in values.iter().enumerate() {
        let (cheapest, costliest) = if index == values.len() - 1 {
            let cost = operator_cost(value, Operator::Eq, set)?;
            (cost, cost)
        } else {
            non_equals_cost_bounds(value, set)?
        };
        min_total += cheapest;
        max_total += costliest;
    }

    let actual_total = match seed {
        Some(seed) if !values.is_empty() => {
            let operators = codec::choose_operators(values.len(), seed, None)?;
            let equation = codec::embed(&values, &operators, &set.opmap)?;
            Some(prefix_length + equation.to_string().len())
        }
        Some(_) => Some(prefix_length),
        None => None,
    };

    Ok(CapacityReport {
        message_length: values.len(),
        prefix_length,
        min_total,
        max_total,
        actual_total,
        percent_used: percent_of_sms(actual_total.unwrap_or(min_total)),
    })
}

/// Characters one embedded value costs under one operator: digits plus the
/// operator itself.
fn operator_cost(value: u32, operator: Operator, set: &KeyMapSet) -> Result<usize, Error> {
    let offset = set
        .opmap
        .offset(operator)
        .ok_or(Error::MissingOperator { operator })?;
    let number = value.checked_add(offset).ok_or(Error::NumberOverflow)?;
    Ok(digit_count(number) + 1)
}

fn non_equals_cost_bounds(value: u32, set: &KeyMapSet) -> Result<(usize, usize), Error> {
    let mut cheapest = usize::MAX;
    let mut costliest = 0;
    for operator in Operator::NON_EQUALS {
        let cost = operator_cost(value, operator, set)?;
        cheapest = cheapest.min(cost);
        costliest = costliest.max(cost);
    }
    Ok((cheapest, costliest))
}

/// Longest message guaranteed (pessimistic) or merely possible (optimistic)
/// to fit the SMS budget, over the set's value and offset distributions.
pub fn max_message_length(set: &KeyMapSet, pessimistic: bool) -> usize {
    let prefix = envelope_prefix(set.id).len();
    let values: Vec<u32> = set.charmap.entries().iter().map(|&(_, v)| v).collect();
    let Some(eq_offset) = set.opmap.offset(Operator::Eq) else {
        return 0;
    };
    if values.is_empty() {
        return 0;
    }

    let last_costs = values
        .iter()
        .map(|&v| digit_count(v.saturating_add(eq_offset)) + 1);
    let last = if pessimistic {
        last_costs.max().unwrap()
    } else {
        last_costs.min().unwrap()
    };
    if prefix + last > SMS_MAX_CHARS {
        return 0;
    }

    let mut mid_costs = Vec::new();
    for operator in Operator::NON_EQUALS {
        if let Some(offset) = set.opmap.offset(operator) {
            for &v in &values {
                mid_costs.push(digit_count(v.saturating_add(offset)) + 1);
            }
        }
    }
    let Some(mid) = (if pessimistic {
        mid_costs.iter().max()
    } else {
        mid_costs.iter().min()
    }) else {
        // no non-equals operators: only a single-character message can exist
        return 1;
    };

    1 + (SMS_MAX_CHARS - prefix - last) / mid
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Warn,
    Info,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warn => "warn",
            Severity::Info => "info",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LintRule {
    /// An exponent operand large enough to make the "answer" astronomical.
    LargeExponent,
    /// One operator makes up most of the equation.
    OperatorDominance,
}

impl LintRule {
    pub fn code(self) -> &'static str {
        match self {
            LintRule::LargeExponent => "large-exponent",
            LintRule::OperatorDominance => "operator-dominance",
        }
    }
}

impl fmt::Display for LintRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LintFinding {
    pub severity: Severity,
    pub token_index: usize,
    pub rule: LintRule,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LintConfig {
    /// Warn when a `^` right operand exceeds this.
    pub exponent_threshold: u32,
    /// Report when one non-equals operator exceeds this share (percent).
    pub dominance_threshold: u32,
    /// Dominance needs at least this many non-equals operators to fire.
    pub dominance_min_operators: usize,
}

impl Default for LintConfig {
    fn default() -> LintConfig {
        LintConfig {
            exponent_threshold: 9,
            dominance_threshold: 60,
            dominance_min_operators: 5,
        }
    }
}

/// Read-only plausibility check; findings come back ordered by token index.
pub fn lint_equation(eq: &Equation, config: &LintConfig) -> Vec<LintFinding> {
    let mut findings = Vec::new();
    let tokens = eq.tokens();

    for (index, token) in tokens.iter().enumerate() {
        if *token != EquationToken::Operator(Operator::Pow) {
            continue;
        }
        if let Some(EquationToken::Number(operand)) = tokens.get(index + 1) {
            if *operand > config.exponent_threshold {
                findings.push(LintFinding {
                    severity: Severity::Warn,
                    token_index: index + 1,
                    rule: LintRule::LargeExponent,
                    note: format!(
                        "exponent operand {operand} exceeds {}",
                        config.exponent_threshold
                    ),
                });
            }
        }
    }

    let non_equals: Vec<(usize, Operator)> = tokens
        .iter()
        .enumerate()
        .filter_map(|(index, token)| match token {
            EquationToken::Operator(op) if *op != Operator::Eq => Some((index, *op)),
            _ => None,
        })
        .collect();
    if non_equals.len() >= config.dominance_min_operators {
        for operator in Operator::NON_EQUALS {
            let count = non_equals.iter().filter(|(_, op)| *op == operator).count();
            if count * 100 > config.dominance_threshold as usize * non_equals.len() {
                let percent = count * 100 / non_equals.len();
                let first_index = non_equals
                    .iter()
                    .find(|(_, op)| *op == operator)
                    .map(|&(index, _)| index)
                    .unwrap_or(0);
                findings.push(LintFinding {
                    severity: Severity::Info,
                    token_index: first_index,
                    rule: LintRule::OperatorDominance,
                    note: format!(
                        "operator '{operator}' is {percent}% of operators (threshold {}%)",
                        config.dominance_threshold
                    ),
                });
            }
        }
    }

    findings.sort_by_key(|finding| finding.token_index);
    findings
}
