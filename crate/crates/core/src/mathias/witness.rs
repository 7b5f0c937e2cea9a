//! Constructive witness that the unit ball of a letter-norm pseudometric
//! meets the indexed word cloud D_n.
//!
//! Given a strictly decreasing schema A_0 = ω ⊋ A_1 ⊋ … with infinite
//! differences, enumerate x_{k,i} as the i-th element of A_k ∖ A_{k+1}
//! (increasing order, so runs are reproducible). The cloud D_n consists of
//! the words {x_{n,m}, x_{i_1,j_1}, …, x_{i_n,j_n}} with index pattern
//! n < i_1 < … < i_n < j_1 < … < j_n < m. When the letter norm r tends to 0
//! along the filter, greedy choices with r(x_{i_k,j_k}) < 1/(2n) and
//! r(x_{n,m}) < 1/2 produce a word of total letter norm below 1, i.e. a
//! point of D_n inside the unit ball U(d).

use super::MathiasError;
use crate::gf2::GroupWord;
use crate::omega::{RepSet, SetFamily};
use crate::rational::{serde_frac, Rat};
use num::{One, Zero};
use serde::{Deserialize, Serialize};

/// A finitely described letter norm on ω.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LetterNormRule {
    /// r(x) = scale / x for x ≥ 1; undefined at 0.
    Reciprocal {
        #[serde(with = "serde_frac")]
        scale: Rat,
    },
    /// r(x) = value for every x.
    Constant {
        #[serde(with = "serde_frac")]
        value: Rat,
    },
}

impl LetterNormRule {
    pub fn value(&self, x: u64) -> Option<Rat> {
        match self {
            LetterNormRule::Reciprocal { scale } => {
                if x == 0 {
                    None
                } else {
                    Some(scale / Rat::from_integer(x.into()))
                }
            }
            LetterNormRule::Constant { value } => Some(value.clone()),
        }
    }
}

/// One letter of a witness word: the atom x_{row,col}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UdLetter {
    pub row: u64,
    pub col: u64,
    pub atom: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UdWitness {
    pub word: GroupWord,
    /// The anchor letter x_{n,m} followed by the column letters
    /// x_{i_1,j_1}, …, x_{i_n,j_n}.
    pub letters: Vec<UdLetter>,
    #[serde(with = "serde_frac")]
    pub total: Rat,
}

fn row_difference(schema: &SetFamily, k: u64) -> Result<RepSet, MathiasError> {
    let diff = schema.at(k)?.difference(&schema.at(k + 1)?)?;
    if diff.is_finite() {
        return Err(MathiasError::WitnessInvalid(format!(
            "difference of schema rows {k} and {} is finite",
            k + 1
        )));
    }
    Ok(diff)
}

fn cell_atom(schema: &SetFamily, row: u64, col: u64) -> Result<u64, MathiasError> {
    row_difference(schema, row)?
        .nth_member(col)
        .ok_or_else(|| MathiasError::WitnessInvalid(format!("row {row} has no column {col}")))
}

/// Independent checker for a claimed witness: re-derives every atom from
/// the schema, re-checks the index pattern of D_n, and re-sums the letter
/// norms exactly.
pub fn verify_ud_witness(
    schema: &SetFamily,
    rule: &LetterNormRule,
    n: u64,
    witness: &UdWitness,
) -> Result<(), MathiasError> {
    let bad = |msg: String| Err(MathiasError::WitnessInvalid(msg));
    if witness.letters.len() as u64 != n + 1 {
        return bad(format!(
            "expected {} letters, found {}",
            n + 1,
            witness.letters.len()
        ));
    }
    let anchor = &witness.letters[0];
    if anchor.row != n {
        return bad(format!("anchor row {} is not n = {n}", anchor.row));
    }
    for letter in &witness.letters {
        let expected = cell_atom(schema, letter.row, letter.col)?;
        if expected != letter.atom {
            return bad(format!(
                "letter x_{{{},{}}} should be {expected}, found {}",
                letter.row, letter.col, letter.atom
            ));
        }
    }
    // index pattern n < i_1 < … < i_n < j_1 < … < j_n < m
    let rows: Vec<u64> = witness.letters[1..].iter().map(|l| l.row).collect();
    let cols: Vec<u64> = witness.letters[1..].iter().map(|l| l.col).collect();
    let mut pattern: Vec<u64> = vec![n];
    pattern.extend(&rows);
    pattern.extend(&cols);
    pattern.push(anchor.col);
    if !pattern.windows(2).all(|w| w[0] < w[1]) {
        return bad(format!("index pattern violated: {pattern:?}"));
    }
    // the word is the set of the letters
    let expected_word = GroupWord::from_atoms(witness.letters.iter().map(|l| l.atom));
    if expected_word != witness.word {
        return bad("word does not match its letters".into());
    }
    if expected_word.len() != witness.letters.len() {
        return bad("letters collide; cells must be distinct".into());
    }
    // exact unit-ball membership
    let mut total = Rat::zero();
    for letter in &witness.letters {
        total += rule
            .value(letter.atom)
            .ok_or_else(|| MathiasError::WitnessInvalid(format!(
                "letter norm undefined at {}",
                letter.atom
            )))?;
    }
    if total != witness.total {
        return bad("recorded total differs from the recomputed sum".into());
    }
    if total >= Rat::one() {
        return bad(format!("total letter norm {total} is not below 1"));
    }
    Ok(())
}

/// Runs the greedy selection of the witness construction and re-verifies
/// the result independently before returning it.
pub fn witness_in_ud(
    schema: &SetFamily,
    rule: &LetterNormRule,
    n: u64,
    budget: u64,
) -> Result<UdWitness, MathiasError> {
    let exhausted = |context: &str| MathiasError::Budget {
        budget,
        context: context.to_string(),
    };

    let finish = |letters: Vec<UdLetter>| -> Result<UdWitness, MathiasError> {
        let mut total = Rat::zero();
        for l in &letters {
            total += rule.value(l.atom).ok_or_else(|| {
                MathiasError::WitnessInvalid(format!("letter norm undefined at {}", l.atom))
            })?;
        }
        let witness = UdWitness {
            word: GroupWord::from_atoms(letters.iter().map(|l| l.atom)),
            letters,
            total,
        };
        verify_ud_witness(schema, rule, n, &witness)?;
        Ok(witness)
    };

    // degenerate word: a single anchor letter below norm 1
    if n == 0 {
        for m in 0..=budget {
            let atom = cell_atom(schema, 0, m)?;
            if rule.value(atom).is_some_and(|r| r < Rat::one()) {
                return finish(vec![UdLetter { row: 0, col: m, atom }]);
            }
        }
        return Err(exhausted("no anchor with letter norm below 1"));
    }

    let column_cap = Rat::new(1.into(), (2 * n).into());
    let anchor_cap = Rat::new(1.into(), 2.into());

    // rows i_1 < … < i_n above n whose small-norm columns do not run out
    let rows: Vec<u64> = (n + 1..=2 * n).collect();

    // columns j_1 < … < j_n above i_n with r(x_{i_k, j_k}) < 1/(2n)
    let mut cols: Vec<u64> = Vec::with_capacity(n as usize);
    let mut next_col = rows[rows.len() - 1] + 1;
    for &row in &rows {
        let mut j = next_col;
        loop {
            if j > budget {
                return Err(exhausted("column search: letter norms stay too large"));
            }
            let atom = cell_atom(schema, row, j)?;
            if rule.value(atom).is_some_and(|r| r < column_cap) {
                cols.push(j);
                next_col = j + 1;
                break;
            }
            j += 1;
        }
    }

    // anchor column m > j_n with r(x_{n,m}) < 1/2
    let mut m = cols[cols.len() - 1] + 1;
    let anchor = loop {
        if m > budget {
            return Err(exhausted("anchor search: letter norms stay too large"));
        }
        let atom = cell_atom(schema, n, m)?;
        if rule.value(atom).is_some_and(|r| r < anchor_cap) {
            break UdLetter { row: n, col: m, atom };
        }
        m += 1;
    };

    let mut letters = vec![anchor];
    for (k, &row) in rows.iter().enumerate() {
        letters.push(UdLetter {
            row,
            col: cols[k],
            atom: cell_atom(schema, row, cols[k])?,
        });
    }
    finish(letters)
}
