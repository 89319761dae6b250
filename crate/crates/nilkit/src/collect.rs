//! The collecting process: four transformation types, full traces, collected
//! normal forms and per-commutator copy counts.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use crate::commutator::{BasicCommutatorTable, FormalCommutator};
use crate::error::{Error, Result};
use crate::word::{Occurrence, Sign, Word};

/// One application of the collecting operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    /// Transformation type 1-4.
    pub kind: u8,
    /// Index of the moved copy of `beta` in the word before the step.
    pub position: usize,
    pub alpha: FormalCommutator,
    pub beta: FormalCommutator,
    /// New copies inserted by the transformation, in insertion order.
    pub created: Vec<Occurrence>,
}

/// The transformation log of a full collection run.
#[derive(Clone, Debug, Default)]
pub struct TransformTrace {
    pub steps: Vec<TraceStep>,
    /// False when trace recording was disabled; `steps` is then empty.
    pub recorded: bool,
}

/// A word together with the outcome of one collecting step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    /// The word is already in collected form.
    Done,
    Applied { word: Word, step: TraceStep },
}

/// Collected normal form: exponents over the basic commutator table, plus any
/// net exponents that landed on non-basic commutators (possible only when the
/// input word itself contained non-basic commutators).
#[derive(Clone, Debug)]
pub struct CollectedForm {
    pub table: BasicCommutatorTable,
    pub exponents: Vec<i64>,
    pub extras: Vec<(FormalCommutator, i64)>,
}

impl CollectedForm {
    /// Rebuild a word `c1^l1 c2^l2 ...` with all commutator powers in order.
    pub fn to_word(&self, rank: usize, step: usize) -> Result<Word> {
        let mut terms: Vec<(FormalCommutator, i64)> = Vec::new();
        for (i, &e) in self.exponents.iter().enumerate() {
            if e != 0 {
                terms.push((self.table.entries()[i].clone(), e));
            }
        }
        terms.extend(self.extras.iter().cloned());
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut occs = Vec::new();
        for (c, e) in terms {
            let sign = if e > 0 { Sign::Plus } else { Sign::Minus };
            for _ in 0..e.unsigned_abs() {
                occs.push(Occurrence::new(c.clone(), sign));
            }
        }
        Word::new_weighted(rank, step, self.table.letter_weights(), occs)
    }

    /// Nonzero exponents in order, basic entries first by position then
    /// extras; used by the CLI report.
    pub fn nonzero(&self) -> Vec<(FormalCommutator, i64)> {
        let mut out = Vec::new();
        for (i, &e) in self.exponents.iter().enumerate() {
            if e != 0 {
                out.push((self.table.entries()[i].clone(), e));
            }
        }
        out.extend(self.extras.iter().cloned());
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }
}

/// Configuration for a collection run: the alphabet, the step cap, a budget
/// guard and optional trace recording.
#[derive(Clone, Debug)]
pub struct Collector {
    rank: usize,
    step: usize,
    letter_weights: Vec<usize>,
    max_steps: usize,
    keep_trace: bool,
}

impl Collector {
    pub fn new(rank: usize, step: usize) -> Result<Self> {
        if rank == 0 || step == 0 {
            return Err(Error::InvalidParameter(
                "rank and step must be at least 1".into(),
            ));
        }
        Ok(Collector {
            rank,
            step,
            letter_weights: vec![1; rank],
            max_steps: 1_000_000,
            keep_trace: true,
        })
    }

    /// Alphabet whose letters carry intrinsic weights; truncation during
    /// transformations of types 3 and 4 is by intrinsic weight.
    pub fn with_letter_weights(mut self, weights: Vec<usize>) -> Result<Self> {
        if weights.len() != self.rank || weights.iter().any(|&w| w == 0) {
            return Err(Error::InvalidParameter(
                "letter weights must be positive and match the rank".into(),
            ));
        }
        self.letter_weights = weights;
        Ok(self)
    }

    pub fn max_steps(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps;
        self
    }

    pub fn keep_trace(mut self, keep: bool) -> Self {
        self.keep_trace = keep;
        self
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn step_cap(&self) -> usize {
        self.step
    }

    pub fn letter_weights(&self) -> &[usize] {
        &self.letter_weights
    }

    /// Apply exactly one transformation, or report that the word is
    /// collected.
    pub fn step(&self, word: &Word) -> Result<StepOutcome> {
        let mut interner = Interner::new();
        let ids: Vec<(u32, Sign)> = word
            .occurrences()
            .iter()
            .map(|o| (interner.intern(&o.commutator, &self.letter_weights), o.sign))
            .collect();
        let Some((j, alpha_id, beta_id)) = locate_fast(&interner, &ids) else {
            return Ok(StepOutcome::Done);
        };
        let alpha_sign = ids[j - 1].1;
        let beta_sign = ids[j].1;
        let iterated =
            interner.iterated_brackets(alpha_id, beta_id, self.step, &self.letter_weights);
        let (kind, replacement, created) =
            transformation(beta_id, beta_sign, alpha_id, alpha_sign, &iterated);
        let mut occs: Vec<Occurrence> = Vec::with_capacity(ids.len() + replacement.len());
        for &(id, sign) in ids[..j - 1]
            .iter()
            .chain(replacement.iter())
            .chain(ids[j + 1..].iter())
        {
            occs.push(Occurrence::new(interner.tree(id).clone(), sign));
        }
        let out = Word::new_weighted(word.rank, word.step, &self.letter_weights, occs)?;
        Ok(StepOutcome::Applied {
            word: out,
            step: TraceStep {
                kind,
                position: j,
                alpha: interner.tree(alpha_id).clone(),
                beta: interner.tree(beta_id).clone(),
                created: created
                    .into_iter()
                    .map(|(id, sign)| Occurrence::new(interner.tree(id).clone(), sign))
                    .collect(),
            },
        })
    }

    /// Iterate the collecting operator to its fixed point.
    pub fn collect(&self, word: &Word) -> Result<(CollectedForm, TransformTrace)> {
        let (collected_word, trace) = self.collect_word(word)?;
        let form = self.extract_form(&collected_word)?;
        Ok((form, trace))
    }

    /// Like `collect` but returning the fixed-point word itself. Runs on an
    /// interned representation; the trace is identical to iterating `step`.
    pub fn collect_word(&self, word: &Word) -> Result<(Word, TransformTrace)> {
        if word.rank != self.rank {
            return Err(Error::InvalidInput(format!(
                "word rank {} does not match collector rank {}",
                word.rank, self.rank
            )));
        }
        let clean =
            Word::new_weighted(self.rank, self.step, &self.letter_weights, word.occurrences().to_vec())?;
        let mut interner = Interner::new();
        let mut current: Vec<(u32, Sign)> = clean
            .occurrences()
            .iter()
            .map(|o| (interner.intern(&o.commutator, &self.letter_weights), o.sign))
            .collect();
        let mut trace = TransformTrace {
            steps: Vec::new(),
            recorded: self.keep_trace,
        };
        let mut budget = self.max_steps;
        while let Some((j, alpha_id, beta_id)) = locate_fast(&interner, &current) {
            if budget == 0 {
                return Err(Error::ResourceLimit(format!(
                    "collection exceeded {} steps",
                    self.max_steps
                )));
            }
            budget -= 1;
            let alpha_sign = current[j - 1].1;
            let beta_sign = current[j].1;
            let iterated = interner.iterated_brackets(alpha_id, beta_id, self.step, &self.letter_weights);
            let (kind, replacement, created) =
                transformation(beta_id, beta_sign, alpha_id, alpha_sign, &iterated);
            current.splice(j - 1..=j, replacement);
            if self.keep_trace {
                trace.steps.push(TraceStep {
                    kind,
                    position: j,
                    alpha: interner.tree(alpha_id).clone(),
                    beta: interner.tree(beta_id).clone(),
                    created: created
                        .into_iter()
                        .map(|(id, sign)| Occurrence::new(interner.tree(id).clone(), sign))
                        .collect(),
                });
            }
        }
        let occs: Vec<Occurrence> = current
            .into_iter()
            .map(|(id, sign)| Occurrence::new(interner.tree(id).clone(), sign))
            .collect();
        let out = Word::new_weighted(self.rank, self.step, &self.letter_weights, occs)?;
        Ok((out, trace))
    }

    fn extract_form(&self, word: &Word) -> Result<CollectedForm> {
        let table = BasicCommutatorTable::enumerate_weighted(
            self.rank,
            self.step,
            self.letter_weights.clone(),
        )?;
        let mut exponents = vec![0i64; table.len()];
        let mut extras: BTreeMap<FormalCommutator, i64> = BTreeMap::new();
        for occ in word.occurrences() {
            match table.position(&occ.commutator) {
                Some(i) => exponents[i] += occ.sign.as_i64(),
                None => {
                    *extras.entry(occ.commutator.clone()).or_insert(0) += occ.sign.as_i64();
                }
            }
        }
        extras.retain(|_, e| *e != 0);
        Ok(CollectedForm {
            table,
            exponents,
            extras: extras.into_iter().collect(),
        })
    }

    /// Replay a trace from an initial word, verifying each recorded step, and
    /// return the terminal word.
    pub fn replay(&self, initial: &Word, trace: &TransformTrace) -> Result<Word> {
        if !trace.recorded {
            return Err(Error::Inconsistency(
                "trace was not recorded; rerun with keep_trace".into(),
            ));
        }
        let mut current = Word::new_weighted(
            self.rank,
            self.step,
            &self.letter_weights,
            initial.occurrences().to_vec(),
        )?;
        for (n, recorded) in trace.steps.iter().enumerate() {
            match self.step(&current)? {
                StepOutcome::Done => {
                    return Err(Error::Inconsistency(format!(
                        "trace has {} steps but the word collects in {n}",
                        trace.steps.len()
                    )));
                }
                StepOutcome::Applied { word, step } => {
                    if &step != recorded {
                        return Err(Error::Inconsistency(format!(
                            "trace step {n} does not match the word: expected type {} at {}, \
                             recorded type {} at {}",
                            step.kind, step.position, recorded.kind, recorded.position
                        )));
                    }
                    current = word;
                }
            }
        }
        match self.step(&current)? {
            StepOutcome::Done => Ok(current),
            StepOutcome::Applied { .. } => Err(Error::Inconsistency(
                "trace ended before the word was collected".into(),
            )),
        }
    }

    /// Combined copies of each commutator and its inverse present at
    /// termination, computed by replaying the trace.
    pub fn copy_counts(
        &self,
        initial: &Word,
        trace: &TransformTrace,
    ) -> Result<BTreeMap<FormalCommutator, usize>> {
        let terminal = self.replay(initial, trace)?;
        let mut counts = BTreeMap::new();
        for occ in terminal.occurrences() {
            *counts.entry(occ.commutator.clone()).or_insert(0) += 1;
        }
        Ok(counts)
    }
}

/// Interning table for the working alphabet of a collection run: commutators
/// become dense ids with memoized pairwise order, weights and brackets, so
/// the rewrite loop touches no trees.
struct Interner {
    trees: Vec<FormalCommutator>,
    ids: HashMap<FormalCommutator, u32>,
    cmp: Vec<Vec<Ordering>>,
    weights: Vec<usize>,
    brackets: HashMap<(u32, u32), u32>,
}

impl Interner {
    fn new() -> Self {
        Interner {
            trees: Vec::new(),
            ids: HashMap::new(),
            cmp: Vec::new(),
            weights: Vec::new(),
            brackets: HashMap::new(),
        }
    }

    fn intern(&mut self, t: &FormalCommutator, letter_weights: &[usize]) -> u32 {
        if let Some(&id) = self.ids.get(t) {
            return id;
        }
        let id = self.trees.len() as u32;
        let mut row = Vec::with_capacity(self.trees.len() + 1);
        for (i, other) in self.trees.iter().enumerate() {
            let o = t.cmp(other);
            row.push(o);
            self.cmp[i].push(o.reverse());
        }
        row.push(Ordering::Equal);
        self.cmp.push(row);
        self.weights.push(t.weighted_weight(letter_weights));
        self.ids.insert(t.clone(), id);
        self.trees.push(t.clone());
        id
    }

    fn tree(&self, id: u32) -> &FormalCommutator {
        &self.trees[id as usize]
    }

    fn cmp(&self, a: u32, b: u32) -> Ordering {
        self.cmp[a as usize][b as usize]
    }

    fn weight(&self, id: u32) -> usize {
        self.weights[id as usize]
    }

    fn bracket(&mut self, a: u32, b: u32, letter_weights: &[usize]) -> u32 {
        if let Some(&id) = self.brackets.get(&(a, b)) {
            return id;
        }
        let t = FormalCommutator::bracket(self.tree(a).clone(), self.tree(b).clone());
        let id = self.intern(&t, letter_weights);
        self.brackets.insert((a, b), id);
        id
    }

    /// `[alpha, beta], [[alpha, beta], beta], ...` while the intrinsic weight
    /// fits the step cap.
    fn iterated_brackets(
        &mut self,
        alpha: u32,
        beta: u32,
        step: usize,
        letter_weights: &[usize],
    ) -> Vec<u32> {
        let mut out = Vec::new();
        let mut cur = alpha;
        loop {
            let next = self.bracket(cur, beta, letter_weights);
            if self.weight(next) > step {
                return out;
            }
            out.push(next);
            cur = next;
        }
    }
}

/// Locate the copy to move: `(j, alpha, beta)` with `j` the index of the
/// leftmost copy of the earliest uncollected commutator `beta` and `alpha`
/// the commutator immediately to its left. `None` when collected.
fn locate_fast(it: &Interner, word: &[(u32, Sign)]) -> Option<(usize, u32, u32)> {
    let n = word.len();
    if n <= 1 {
        return None;
    }
    let mut sorted_len = 1;
    while sorted_len < n && it.cmp(word[sorted_len - 1].0, word[sorted_len].0) != Ordering::Greater
    {
        sorted_len += 1;
    }
    if sorted_len == n {
        return None;
    }
    let mut suffix_min = vec![0u32; n];
    let mut cur = word[n - 1].0;
    for i in (0..n).rev() {
        if it.cmp(word[i].0, cur) == Ordering::Less {
            cur = word[i].0;
        }
        suffix_min[i] = cur;
    }
    // collected part: longest sorted prefix dominated by its suffix
    let mut m = sorted_len;
    while m > 0 && it.cmp(word[m - 1].0, suffix_min[m]) == Ordering::Greater {
        m -= 1;
    }
    let beta = suffix_min[m];
    let j = (m..n)
        .find(|&i| word[i].0 == beta)
        .expect("suffix minimum must occur");
    debug_assert!(j >= 1);
    let alpha = word[j - 1].0;
    debug_assert_eq!(it.cmp(alpha, beta), Ordering::Greater);
    Some((j, alpha, beta))
}

/// The four rewrite rules. Returns the type, the occurrences replacing
/// positions `j-1, j`, and the created copies in insertion order.
#[allow(clippy::type_complexity)]
fn transformation(
    beta: u32,
    beta_sign: Sign,
    alpha: u32,
    alpha_sign: Sign,
    iterated: &[u32],
) -> (u8, Vec<(u32, Sign)>, Vec<(u32, Sign)>) {
    match (beta_sign, alpha_sign) {
        (Sign::Plus, Sign::Plus) => {
            // vu = uv[v,u]
            let created: Vec<(u32, Sign)> =
                iterated.first().map(|&c| (c, Sign::Plus)).into_iter().collect();
            let mut repl = vec![(beta, Sign::Plus), (alpha, Sign::Plus)];
            repl.extend(created.iter().copied());
            (1, repl, created)
        }
        (Sign::Plus, Sign::Minus) => {
            // v^-1 u = u [v,u]^-1 v^-1
            let created: Vec<(u32, Sign)> = iterated
                .first()
                .map(|&c| (c, Sign::Minus))
                .into_iter()
                .collect();
            let mut repl = vec![(beta, Sign::Plus)];
            repl.extend(created.iter().copied());
            repl.push((alpha, Sign::Minus));
            (2, repl, created)
        }
        (Sign::Minus, Sign::Plus) => {
            // vu^-1 = u^-1 v v2 v4 ... v5^-1 v3^-1 v1^-1
            let mut created = Vec::new();
            for (idx, &c) in iterated.iter().enumerate() {
                if (idx + 1) % 2 == 0 {
                    created.push((c, Sign::Plus));
                }
            }
            for (idx, &c) in iterated.iter().enumerate().rev() {
                if (idx + 1) % 2 == 1 {
                    created.push((c, Sign::Minus));
                }
            }
            let mut repl = vec![(beta, Sign::Minus), (alpha, Sign::Plus)];
            repl.extend(created.iter().copied());
            (3, repl, created)
        }
        (Sign::Minus, Sign::Minus) => {
            // v^-1 u^-1 = u^-1 v1 v3 v5 ... v4^-1 v2^-1 v^-1
            let mut created = Vec::new();
            for (idx, &c) in iterated.iter().enumerate() {
                if (idx + 1) % 2 == 1 {
                    created.push((c, Sign::Plus));
                }
            }
            for (idx, &c) in iterated.iter().enumerate().rev() {
                if (idx + 1) % 2 == 0 {
                    created.push((c, Sign::Minus));
                }
            }
            let mut repl = vec![(beta, Sign::Minus)];
            repl.extend(created.iter().copied());
            repl.push((alpha, Sign::Minus));
            (4, repl, created)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Sign;

    fn x(i: usize) -> FormalCommutator {
        FormalCommutator::letter(i)
    }

    fn br(a: FormalCommutator, b: FormalCommutator) -> FormalCommutator {
        FormalCommutator::bracket(a, b)
    }

    fn letters(rank: usize, step: usize, s: &[(usize, i8)]) -> Word {
        let occs: Vec<(usize, Sign)> = s
            .iter()
            .map(|&(i, sg)| (i, if sg > 0 { Sign::Plus } else { Sign::Minus }))
            .collect();
        Word::from_letters(rank, step, &occs).unwrap()
    }

    #[test]
    fn step_type_1() {
        let c = Collector::new(2, 2).unwrap();
        let w = letters(2, 2, &[(2, 1), (1, 1)]);
        match c.step(&w).unwrap() {
            StepOutcome::Applied { word, step } => {
                assert_eq!(word.to_string(), "x1 x2 [x2,x1]");
                assert_eq!(step.kind, 1);
            }
            StepOutcome::Done => panic!("expected a transformation"),
        }
    }

    #[test]
    fn step_done_on_collected_word() {
        let c = Collector::new(2, 2).unwrap();
        let w = letters(2, 2, &[(1, 1), (2, 1)]);
        assert_eq!(c.step(&w).unwrap(), StepOutcome::Done);
    }

    #[test]
    fn step_type_2() {
        let c = Collector::new(2, 2).unwrap();
        let w = letters(2, 2, &[(2, -1), (1, 1)]);
        match c.step(&w).unwrap() {
            StepOutcome::Applied { word, step } => {
                assert_eq!(word.to_string(), "x1 [x2,x1]^-1 x2^-1");
                assert_eq!(step.kind, 2);
            }
            StepOutcome::Done => panic!("expected a transformation"),
        }
    }

    #[test]
    fn step_types_3_and_4() {
        let c = Collector::new(2, 3).unwrap();
        let w = letters(2, 3, &[(2, 1), (1, -1)]);
        match c.step(&w).unwrap() {
            StepOutcome::Applied { word, step } => {
                assert_eq!(step.kind, 3);
                // x2 x1^-1 = x1^-1 x2 x2_2 ... x2_1^-1 with iterated brackets
                assert_eq!(
                    word.to_string(),
                    "x1^-1 x2 [[x2,x1],x1] [x2,x1]^-1"
                );
            }
            StepOutcome::Done => panic!("expected a transformation"),
        }
        let w = letters(2, 3, &[(2, -1), (1, -1)]);
        match c.step(&w).unwrap() {
            StepOutcome::Applied { word, step } => {
                assert_eq!(step.kind, 4);
                assert_eq!(
                    word.to_string(),
                    "x1^-1 [x2,x1] [[x2,x1],x1]^-1 x2^-1"
                );
            }
            StepOutcome::Done => panic!("expected a transformation"),
        }
    }

    #[test]
    fn collect_simple_swap_order_convention() {
        let c = Collector::new(2, 2).unwrap();
        let w = letters(2, 2, &[(2, 1), (1, 1)]);
        let (form, _) = c.collect(&w).unwrap();
        assert_eq!(form.exponents, vec![1, 1, 1]);
        assert!(form.extras.is_empty());
    }

    #[test]
    fn collect_free_reduction() {
        let c = Collector::new(2, 2).unwrap();
        let w = letters(2, 2, &[(1, 1), (1, -1)]);
        let (form, _) = c.collect(&w).unwrap();
        assert_eq!(form.exponents, vec![0, 0, 0]);
    }

    #[test]
    fn collect_inverse_swap_order_convention() {
        let c = Collector::new(2, 2).unwrap();
        let w = letters(2, 2, &[(2, -1), (1, 1)]);
        let (form, _) = c.collect(&w).unwrap();
        assert_eq!(form.exponents, vec![1, -1, -1]);
    }

    #[test]
    fn letter_exponents_survive_collection() {
        let c = Collector::new(2, 3).unwrap();
        let w = letters(2, 3, &[(2, 1), (2, 1), (1, -1), (2, -1), (1, 1)]);
        let before = w.letter_exponents();
        let (form, _) = c.collect(&w).unwrap();
        assert_eq!(&form.exponents[..2], before.as_slice());
    }

    #[test]
    fn copy_counts_on_swap() {
        let c = Collector::new(2, 2).unwrap();
        let w = letters(2, 2, &[(2, 1), (1, 1)]);
        let (_, trace) = c.collect(&w).unwrap();
        let counts = c.copy_counts(&w, &trace).unwrap();
        assert_eq!(counts.get(&br(x(2), x(1))), Some(&1));
        assert_eq!(counts.get(&x(1)), Some(&1));
        assert_eq!(counts.get(&x(2)), Some(&1));
    }

    #[test]
    fn copy_counts_trivial_when_collected() {
        let c = Collector::new(2, 2).unwrap();
        let w = letters(2, 2, &[(1, 1), (2, 1)]);
        let (_, trace) = c.collect(&w).unwrap();
        let counts = c.copy_counts(&w, &trace).unwrap();
        assert!(counts.keys().all(|c| c.weight() == 1));
    }

    #[test]
    fn copy_counts_respect_quantitative_bound() {
        // budgets L = (2, 2): the commutator [x2,x1] may end with at most
        // L^chi = 4 copies
        let c = Collector::new(2, 2).unwrap();
        let w = letters(2, 2, &[(2, 1), (2, 1), (1, 1), (1, 1)]);
        let (_, trace) = c.collect(&w).unwrap();
        let counts = c.copy_counts(&w, &trace).unwrap();
        assert!(*counts.get(&br(x(2), x(1))).unwrap_or(&0) <= 4);
    }

    #[test]
    fn copy_counts_reject_mismatched_trace() {
        let c = Collector::new(2, 2).unwrap();
        let w = letters(2, 2, &[(2, 1), (1, 1)]);
        let (_, trace) = c.collect(&w).unwrap();
        let other = letters(2, 2, &[(1, 1), (2, 1)]);
        assert!(matches!(
            c.copy_counts(&other, &trace),
            Err(Error::Inconsistency(_))
        ));
    }

    #[test]
    fn collect_accepts_non_basic_input_commutators() {
        // [x1,x2] is not basic; its net exponent is reported in extras
        let c = Collector::new(2, 2).unwrap();
        let w = Word::new(2, 2, vec![Occurrence::positive(br(x(1), x(2)))]).unwrap();
        let (form, _) = c.collect(&w).unwrap();
        assert_eq!(form.exponents, vec![0, 0, 0]);
        assert_eq!(form.extras, vec![(br(x(1), x(2)), 1)]);
    }

    #[test]
    fn collected_output_is_sorted_fixed_point() {
        let c = Collector::new(2, 3).unwrap();
        let w = letters(2, 3, &[(2, 1), (1, 1), (2, -1), (1, -1)]);
        let (word, _) = c.collect_word(&w).unwrap();
        assert_eq!(c.step(&word).unwrap(), StepOutcome::Done);
        let occ = word.occurrences();
        for i in 1..occ.len() {
            assert!(occ[i - 1].commutator <= occ[i].commutator);
        }
    }

    #[test]
    fn budget_guard_reports_resource_limit() {
        let c = Collector::new(2, 3).unwrap().max_steps(1);
        let w = letters(2, 3, &[(2, 1), (2, 1), (1, 1), (1, 1)]);
        assert!(matches!(
            c.collect(&w),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn termination_exhaustive_short_words() {
        // every word of length <= 7 over x1^{+-1}, x2^{+-1} collects
        for s in 2..=3usize {
            let c = Collector::new(2, s).unwrap().keep_trace(false);
            for len in 0..=7usize {
                let mut idx = vec![0usize; len];
                loop {
                    let word = letters(
                        2,
                        s,
                        &idx.iter()
                            .map(|&k| [(1i8, 1usize), (-1, 1), (1, 2), (-1, 2)][k])
                            .map(|(sg, i)| (i, sg))
                            .collect::<Vec<_>>(),
                    );
                    c.collect(&word).unwrap();
                    // odometer over 4 symbols
                    let mut pos = 0;
                    while pos < len {
                        idx[pos] += 1;
                        if idx[pos] < 4 {
                            break;
                        }
                        idx[pos] = 0;
                        pos += 1;
                    }
                    if pos == len {
                        break;
                    }
                }
            }
        }
    }

    #[test]
    #[ignore = "exhaustive run over all 4^12 words; invoke explicitly"]
    fn termination_exhaustive_length_twelve() {
        for s in 2..=3usize {
            let c = Collector::new(2, s)
                .unwrap()
                .keep_trace(false)
                .max_steps(10_000_000);
            let len = 12usize;
            let mut idx = vec![0usize; len];
            loop {
                let word = letters(
                    2,
                    s,
                    &idx.iter()
                        .map(|&k| [(1i8, 1usize), (-1, 1), (1, 2), (-1, 2)][k])
                        .map(|(sg, i)| (i, sg))
                        .collect::<Vec<_>>(),
                );
                c.collect(&word).unwrap();
                let mut pos = 0;
                while pos < len {
                    idx[pos] += 1;
                    if idx[pos] < 4 {
                        break;
                    }
                    idx[pos] = 0;
                    pos += 1;
                }
                if pos == len {
                    break;
                }
            }
        }
    }
}
