//! Words: finite strings of signed commutator occurrences, the operand of
//! the collection engine.

use std::fmt;

use crate::commutator::FormalCommutator;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// One signed commutator in a word.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Occurrence {
    pub commutator: FormalCommutator,
    pub sign: Sign,
}

impl Occurrence {
    pub fn new(commutator: FormalCommutator, sign: Sign) -> Self {
        Occurrence { commutator, sign }
    }

    pub fn positive(commutator: FormalCommutator) -> Self {
        Occurrence::new(commutator, Sign::Plus)
    }

    pub fn inverse(&self) -> Occurrence {
        Occurrence::new(self.commutator.clone(), self.sign.flip())
    }
}

impl fmt::Display for Occurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Plus => write!(f, "{}", self.commutator),
            Sign::Minus => write!(f, "{}^-1", self.commutator),
        }
    }
}

/// A word over `rank` generators in a step-`step` setting. Occurrences whose
/// commutator weight exceeds the step interpret as the identity and are
/// dropped at construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Word {
    pub rank: usize,
    pub step: usize,
    occurrences: Vec<Occurrence>,
}

impl Word {
    pub fn new(rank: usize, step: usize, occurrences: Vec<Occurrence>) -> Result<Self> {
        Self::new_weighted(rank, step, &vec![1; rank], occurrences)
    }

    /// Construction over an alphabet with intrinsic letter weights; the
    /// step cap applies to the intrinsic weight.
    pub fn new_weighted(
        rank: usize,
        step: usize,
        letter_weights: &[usize],
        occurrences: Vec<Occurrence>,
    ) -> Result<Self> {
        if rank == 0 || step == 0 {
            return Err(Error::InvalidParameter(
                "rank and step must be at least 1".into(),
            ));
        }
        if letter_weights.len() != rank {
            return Err(Error::InvalidParameter(
                "letter weights must match the rank".into(),
            ));
        }
        let mut kept = Vec::with_capacity(occurrences.len());
        for occ in occurrences {
            let ml = occ.commutator.max_letter();
            if ml > rank {
                return Err(Error::MalformedCommutator(format!(
                    "letter x{ml} exceeds rank {rank}"
                )));
            }
            if occ.commutator.weighted_weight(letter_weights) <= step {
                kept.push(occ);
            }
        }
        Ok(Word {
            rank,
            step,
            occurrences: kept,
        })
    }

    /// The empty word (identity).
    pub fn empty(rank: usize, step: usize) -> Result<Self> {
        Word::new(rank, step, Vec::new())
    }

    /// A word made of generator letters: `(index, sign)` pairs.
    pub fn from_letters(rank: usize, step: usize, letters: &[(usize, Sign)]) -> Result<Self> {
        let occs = letters
            .iter()
            .map(|&(i, s)| Occurrence::new(FormalCommutator::letter(i), s))
            .collect();
        Word::new(rank, step, occs)
    }

    pub fn occurrences(&self) -> &[Occurrence] {
        &self.occurrences
    }

    pub fn len(&self) -> usize {
        self.occurrences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occurrences.is_empty()
    }

    /// The formal inverse: reversed order, flipped signs.
    pub fn inverse(&self) -> Word {
        Word {
            rank: self.rank,
            step: self.step,
            occurrences: self.occurrences.iter().rev().map(|o| o.inverse()).collect(),
        }
    }

    /// Net exponent of each generator letter: positive minus negative copies.
    pub fn letter_exponents(&self) -> Vec<i64> {
        let mut out = vec![0i64; self.rank];
        for occ in &self.occurrences {
            if let FormalCommutator::Letter(i) = occ.commutator {
                out[i - 1] += occ.sign.as_i64();
            }
        }
        out
    }

    /// Combined copies of each generator letter and its inverse.
    pub fn letter_budgets(&self) -> Vec<usize> {
        let mut out = vec![0usize; self.rank];
        for occ in &self.occurrences {
            if let FormalCommutator::Letter(i) = occ.commutator {
                out[i - 1] += 1;
            }
        }
        out
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.occurrences.is_empty() {
            return write!(f, "");
        }
        let parts: Vec<String> = self.occurrences.iter().map(|o| o.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drops_overweight_occurrences() {
        let c = FormalCommutator::bracket(
            FormalCommutator::bracket(FormalCommutator::letter(2), FormalCommutator::letter(1)),
            FormalCommutator::letter(1),
        );
        let w = Word::new(2, 2, vec![Occurrence::positive(c)]).unwrap();
        assert!(w.is_empty());
    }

    #[test]
    fn rejects_out_of_rank_letters() {
        assert!(Word::from_letters(2, 2, &[(3, Sign::Plus)]).is_err());
    }

    #[test]
    fn inverse_reverses_and_flips() {
        let w = Word::from_letters(2, 2, &[(1, Sign::Plus), (2, Sign::Minus)]).unwrap();
        let inv = w.inverse();
        assert_eq!(inv.to_string(), "x2 x1^-1");
    }

    #[test]
    fn letter_tallies() {
        let w = Word::from_letters(
            2,
            3,
            &[(1, Sign::Plus), (1, Sign::Minus), (2, Sign::Plus), (1, Sign::Plus)],
        )
        .unwrap();
        assert_eq!(w.letter_exponents(), vec![1, 1]);
        assert_eq!(w.letter_budgets(), vec![3, 1]);
    }
}
