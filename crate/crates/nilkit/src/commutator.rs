//! Formal commutator trees, weight vectors, the total commutator order and
//! the enumeration of basic commutators.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};

/// A formal commutator over generator letters `x1, x2, ...`.
///
/// A value is either a generator leaf or a bracket of two subtrees. Equality
/// is tree equality: `[b, a]` and the formal inverse of `[a, b]` are distinct
/// objects (inversion is a sign on a word occurrence, never part of the tree).
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum FormalCommutator {
    /// Generator letter, 1-based.
    Letter(usize),
    Bracket(Box<FormalCommutator>, Box<FormalCommutator>),
}

impl FormalCommutator {
    pub fn letter(i: usize) -> Self {
        FormalCommutator::Letter(i)
    }

    pub fn bracket(left: FormalCommutator, right: FormalCommutator) -> Self {
        FormalCommutator::Bracket(Box::new(left), Box::new(right))
    }

    /// Total weight: the number of leaves.
    pub fn weight(&self) -> usize {
        match self {
            FormalCommutator::Letter(_) => 1,
            FormalCommutator::Bracket(l, r) => l.weight() + r.weight(),
        }
    }

    /// Weight of the tree when each letter `i` carries an intrinsic weight
    /// `letter_weights[i-1]` instead of 1.
    pub fn weighted_weight(&self, letter_weights: &[usize]) -> usize {
        match self {
            FormalCommutator::Letter(i) => letter_weights[*i - 1],
            FormalCommutator::Bracket(l, r) => {
                l.weighted_weight(letter_weights) + r.weighted_weight(letter_weights)
            }
        }
    }

    /// Largest letter index appearing in the tree.
    pub fn max_letter(&self) -> usize {
        match self {
            FormalCommutator::Letter(i) => *i,
            FormalCommutator::Bracket(l, r) => l.max_letter().max(r.max_letter()),
        }
    }

    /// All letter indices appearing in the tree, with multiplicity collapsed.
    pub fn letters(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_letters(&mut out);
        out
    }

    fn collect_letters(&self, out: &mut BTreeSet<usize>) {
        match self {
            FormalCommutator::Letter(i) => {
                out.insert(*i);
            }
            FormalCommutator::Bracket(l, r) => {
                l.collect_letters(out);
                r.collect_letters(out);
            }
        }
    }

    /// The set of components: leaves, every internal bracket, and the tree
    /// itself.
    pub fn components(&self) -> BTreeSet<FormalCommutator> {
        let mut out = BTreeSet::new();
        self.collect_components(&mut out);
        out
    }

    fn collect_components(&self, out: &mut BTreeSet<FormalCommutator>) {
        match self {
            FormalCommutator::Letter(_) => {
                out.insert(self.clone());
            }
            FormalCommutator::Bracket(l, r) => {
                l.collect_components(out);
                r.collect_components(out);
                out.insert(self.clone());
            }
        }
    }

    /// Replace letter `i` by `map[i-1]` throughout the tree.
    pub fn substitute(&self, map: &[FormalCommutator]) -> FormalCommutator {
        match self {
            FormalCommutator::Letter(i) => map[*i - 1].clone(),
            FormalCommutator::Bracket(l, r) => {
                FormalCommutator::bracket(l.substitute(map), r.substitute(map))
            }
        }
    }

    fn add_weight_counts(&self, counts: &mut [u32]) {
        match self {
            FormalCommutator::Letter(i) => counts[*i - 1] += 1,
            FormalCommutator::Bracket(l, r) => {
                l.add_weight_counts(counts);
                r.add_weight_counts(counts);
            }
        }
    }
}

impl fmt::Display for FormalCommutator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormalCommutator::Letter(i) => write!(f, "x{i}"),
            FormalCommutator::Bracket(l, r) => write!(f, "[{l},{r}]"),
        }
    }
}

impl fmt::Debug for FormalCommutator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Compare weight vectors without materialising them: descending
/// lexicographic on letter counts, so that `x1`-heavy commutators come first
/// and in particular `x1 < x2 < ... < xr` among the letters.
fn cmp_weight_counts(a: &FormalCommutator, b: &FormalCommutator) -> Ordering {
    let n = a.max_letter().max(b.max_letter());
    let mut ca = vec![0u32; n];
    let mut cb = vec![0u32; n];
    a.add_weight_counts(&mut ca);
    b.add_weight_counts(&mut cb);
    for i in 0..n {
        match ca[i].cmp(&cb[i]) {
            Ordering::Equal => {}
            other => return other.reverse(),
        }
    }
    Ordering::Equal
}

/// The canonical total order on formal commutators.
///
/// Lower total weight first; within one total weight, grouped by weight
/// vector; within one weight vector, recursively by (left, right) subtree.
/// This satisfies the three order constraints and is the order used
/// everywhere in the crate.
impl Ord for FormalCommutator {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight()
            .cmp(&other.weight())
            .then_with(|| cmp_weight_counts(self, other))
            .then_with(|| match (self, other) {
                (FormalCommutator::Letter(a), FormalCommutator::Letter(b)) => a.cmp(b),
                (FormalCommutator::Letter(_), FormalCommutator::Bracket(..)) => Ordering::Less,
                (FormalCommutator::Bracket(..), FormalCommutator::Letter(_)) => Ordering::Greater,
                (FormalCommutator::Bracket(l1, r1), FormalCommutator::Bracket(l2, r2)) => {
                    l1.cmp(l2).then_with(|| r1.cmp(r2))
                }
            })
    }
}

impl PartialOrd for FormalCommutator {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Per-generator occurrence counts of a formal commutator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightVector {
    counts: Vec<u32>,
}

impl WeightVector {
    /// Weight vector of `c` over `rank` generators.
    pub fn of(c: &FormalCommutator, rank: usize) -> Result<WeightVector> {
        if c.max_letter() > rank {
            return Err(Error::MalformedCommutator(format!(
                "letter x{} exceeds rank {rank}",
                c.max_letter()
            )));
        }
        let mut counts = vec![0u32; rank];
        c.add_weight_counts(&mut counts);
        Ok(WeightVector { counts })
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// Total weight, the l1 norm.
    pub fn total(&self) -> usize {
        self.counts.iter().map(|&c| c as usize).sum()
    }

    /// `L^chi = L1^c1 * ... * Lr^cr` for side lengths `L`.
    pub fn side_length_power(&self, lengths: &[i64]) -> i128 {
        self.counts
            .iter()
            .zip(lengths)
            .map(|(&c, &l)| (l as i128).pow(c))
            .product()
    }
}

/// The total order on commutators for a fixed rank and step; a thin,
/// validating wrapper around the canonical `Ord`.
#[derive(Clone, Debug)]
pub struct CommutatorOrder {
    pub rank: usize,
    pub step: usize,
}

impl CommutatorOrder {
    pub fn new(rank: usize, step: usize) -> Result<Self> {
        if rank == 0 || step == 0 {
            return Err(Error::InvalidParameter(
                "rank and step must be at least 1".into(),
            ));
        }
        Ok(CommutatorOrder { rank, step })
    }

    pub fn compare(&self, a: &FormalCommutator, b: &FormalCommutator) -> Result<Ordering> {
        for c in [a, b] {
            if c.max_letter() > self.rank {
                return Err(Error::MalformedCommutator(format!(
                    "letter x{} exceeds rank {}",
                    c.max_letter(),
                    self.rank
                )));
            }
        }
        Ok(a.cmp(b))
    }
}

/// The ordered list of basic commutators of weight at most `step` on `rank`
/// letters, together with their weight vectors.
#[derive(Clone, Debug)]
pub struct BasicCommutatorTable {
    pub rank: usize,
    pub step: usize,
    letter_weights: Vec<usize>,
    entries: Vec<FormalCommutator>,
    weights: Vec<WeightVector>,
    index: HashMap<FormalCommutator, usize>,
}

impl BasicCommutatorTable {
    /// Basic commutators by Hall's recursive rule: the letters, and every
    /// `[cj, ci]` with `cj > ci` where, if `cj = [ca, cb]`, also `ci >= cb`.
    pub fn enumerate(rank: usize, step: usize) -> Result<Self> {
        Self::enumerate_weighted(rank, step, vec![1; rank])
    }

    /// Same rule over an alphabet whose letter `i` carries intrinsic weight
    /// `letter_weights[i-1]`; entries are capped by intrinsic weight.
    pub fn enumerate_weighted(
        rank: usize,
        step: usize,
        letter_weights: Vec<usize>,
    ) -> Result<Self> {
        if rank == 0 || step == 0 {
            return Err(Error::InvalidParameter(
                "rank and step must be at least 1".into(),
            ));
        }
        if letter_weights.len() != rank || letter_weights.iter().any(|&w| w == 0) {
            return Err(Error::InvalidParameter(
                "letter weights must be positive and match the rank".into(),
            ));
        }
        let mut entries: Vec<FormalCommutator> = (1..=rank)
            .filter(|&i| letter_weights[i - 1] <= step)
            .map(FormalCommutator::letter)
            .collect();
        entries.sort();
        // formal weight (leaf count) is the induction variable; intrinsic
        // weight only filters
        let max_formal = step;
        for w in 2..=max_formal {
            let mut new_entries = Vec::new();
            for cj in &entries {
                for ci in &entries {
                    if cj.weight() + ci.weight() != w || cj <= ci {
                        continue;
                    }
                    if let FormalCommutator::Bracket(_, b) = cj {
                        if ci < b {
                            continue;
                        }
                    }
                    let cand = FormalCommutator::bracket(cj.clone(), ci.clone());
                    if cand.weighted_weight(&letter_weights) <= step {
                        new_entries.push(cand);
                    }
                }
            }
            new_entries.sort();
            entries.extend(new_entries);
        }
        entries.sort();
        let weights = entries
            .iter()
            .map(|c| WeightVector::of(c, rank))
            .collect::<Result<Vec<_>>>()?;
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();
        Ok(BasicCommutatorTable {
            rank,
            step,
            letter_weights,
            entries,
            weights,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[FormalCommutator] {
        &self.entries
    }

    pub fn weight_vector(&self, i: usize) -> &WeightVector {
        &self.weights[i]
    }

    pub fn position(&self, c: &FormalCommutator) -> Option<usize> {
        self.index.get(c).copied()
    }

    pub fn letter_weights(&self) -> &[usize] {
        &self.letter_weights
    }
}

/// A commutator form of weight `n`: a bracket shape whose leaves are the
/// argument slots `1..=n`, each exactly once. Applying the form substitutes
/// arguments into the slots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutatorForm {
    tree: FormalCommutator,
    weight: usize,
}

impl CommutatorForm {
    pub fn new(tree: FormalCommutator) -> Result<Self> {
        let weight = tree.weight();
        let mut seen = vec![false; weight];
        let mut ok = true;
        fn walk(t: &FormalCommutator, seen: &mut [bool], ok: &mut bool) {
            match t {
                FormalCommutator::Letter(i) => {
                    if *i == 0 || *i > seen.len() || seen[*i - 1] {
                        *ok = false;
                    } else {
                        seen[*i - 1] = true;
                    }
                }
                FormalCommutator::Bracket(l, r) => {
                    walk(l, seen, ok);
                    walk(r, seen, ok);
                }
            }
        }
        walk(&tree, &mut seen, &mut ok);
        if !ok || seen.iter().any(|&s| !s) {
            return Err(Error::InvalidParameter(
                "form slots must be a permutation of 1..=weight".into(),
            ));
        }
        Ok(CommutatorForm { tree, weight })
    }

    /// The identity form of weight 1.
    pub fn identity() -> Self {
        CommutatorForm {
            tree: FormalCommutator::letter(1),
            weight: 1,
        }
    }

    /// The left-nested simple form `[[..[1,2],3..],n]`.
    pub fn simple(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("form weight must be >= 1".into()));
        }
        let mut tree = FormalCommutator::letter(1);
        for i in 2..=n {
            tree = FormalCommutator::bracket(tree, FormalCommutator::letter(i));
        }
        CommutatorForm::new(tree)
    }

    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn tree(&self) -> &FormalCommutator {
        &self.tree
    }

    /// Substitute `args[i-1]` for slot `i`.
    pub fn apply(&self, args: &[FormalCommutator]) -> Result<FormalCommutator> {
        if args.len() != self.weight {
            return Err(Error::InvalidInput(format!(
                "form of weight {} applied to {} arguments",
                self.weight,
                args.len()
            )));
        }
        Ok(self.tree.substitute(args))
    }

    /// All commutator forms of exactly the given weight (every bracket shape
    /// combined with every slot assignment).
    pub fn enumerate(weight: usize) -> Result<Vec<CommutatorForm>> {
        if weight == 0 {
            return Err(Error::InvalidParameter("form weight must be >= 1".into()));
        }
        fn shapes(n: usize) -> Vec<FormalCommutator> {
            // shapes with slots labelled 1..=n in left-to-right leaf order
            if n == 1 {
                return vec![FormalCommutator::letter(1)];
            }
            let mut out = Vec::new();
            for k in 1..n {
                for l in shapes(k) {
                    for r in shapes(n - k) {
                        let shifted = r.substitute(
                            &(1..=n - k)
                                .map(|i| FormalCommutator::letter(i + k))
                                .collect::<Vec<_>>(),
                        );
                        out.push(FormalCommutator::bracket(l.clone(), shifted));
                    }
                }
            }
            out
        }
        fn permutations(n: usize) -> Vec<Vec<usize>> {
            if n == 1 {
                return vec![vec![1]];
            }
            let mut out = Vec::new();
            for p in permutations(n - 1) {
                for pos in 0..n {
                    let mut q = p.clone();
                    q.insert(pos, n);
                    out.push(q);
                }
            }
            out
        }
        let mut forms = Vec::new();
        for shape in shapes(weight) {
            for perm in permutations(weight) {
                let slots: Vec<FormalCommutator> =
                    perm.iter().map(|&i| FormalCommutator::letter(i)).collect();
                let tree = shape.substitute(&slots);
                forms.push(CommutatorForm::new(tree)?);
            }
        }
        forms.sort_by(|a, b| a.tree.cmp(&b.tree));
        forms.dedup();
        Ok(forms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> FormalCommutator {
        FormalCommutator::letter(i)
    }

    fn br(a: FormalCommutator, b: FormalCommutator) -> FormalCommutator {
        FormalCommutator::bracket(a, b)
    }

    /// Independent oracle: count leaves per letter directly.
    fn leaf_count_oracle(c: &FormalCommutator, rank: usize) -> Vec<u32> {
        fn leaves(c: &FormalCommutator, out: &mut Vec<usize>) {
            match c {
                FormalCommutator::Letter(i) => out.push(*i),
                FormalCommutator::Bracket(l, r) => {
                    leaves(l, out);
                    leaves(r, out);
                }
            }
        }
        let mut ls = Vec::new();
        leaves(c, &mut ls);
        let mut counts = vec![0u32; rank];
        for l in ls {
            counts[l - 1] += 1;
        }
        counts
    }

    #[test]
    fn weight_vector_base_case() {
        let w = WeightVector::of(&x(1), 2).unwrap();
        assert_eq!(w.counts(), &[1, 0]);
        assert_eq!(w.total(), 1);
    }

    #[test]
    fn weight_vector_sum_of_basis() {
        let w = WeightVector::of(&br(x(2), x(1)), 2).unwrap();
        assert_eq!(w.counts(), &[1, 1]);
        assert_eq!(w.total(), 2);
    }

    #[test]
    fn weight_vector_matches_leaf_count_oracle() {
        let c = br(br(x(2), x(1)), x(2));
        let w = WeightVector::of(&c, 2).unwrap();
        assert_eq!(w.counts(), leaf_count_oracle(&c, 2).as_slice());
        assert_eq!(w.counts(), &[1, 2]);
        assert_eq!(w.total(), 3);
    }

    #[test]
    fn weight_vector_rejects_out_of_range_letter() {
        assert!(matches!(
            WeightVector::of(&x(3), 2),
            Err(Error::MalformedCommutator(_))
        ));
    }

    #[test]
    fn order_letters_ascend() {
        let ord = CommutatorOrder::new(2, 2).unwrap();
        assert_eq!(ord.compare(&x(1), &x(2)).unwrap(), Ordering::Less);
    }

    #[test]
    fn order_weight_dominates() {
        let ord = CommutatorOrder::new(2, 2).unwrap();
        assert_eq!(
            ord.compare(&br(x(2), x(1)), &x(2)).unwrap(),
            Ordering::Greater
        );
    }

    #[test]
    fn order_reflexive_equality() {
        let c = br(br(x(2), x(1)), x(2));
        assert_eq!(c.cmp(&c), Ordering::Equal);
    }

    #[test]
    fn basic_table_r2_s2() {
        let t = BasicCommutatorTable::enumerate(2, 2).unwrap();
        assert_eq!(t.entries(), &[x(1), x(2), br(x(2), x(1))]);
    }

    #[test]
    fn basic_table_r1_s3() {
        let t = BasicCommutatorTable::enumerate(1, 3).unwrap();
        assert_eq!(t.entries(), &[x(1)]);
    }

    #[test]
    fn basic_table_r2_s3_has_five_entries() {
        let t = BasicCommutatorTable::enumerate(2, 3).unwrap();
        assert_eq!(t.len(), 5);
    }

    #[test]
    fn basic_table_rejects_zero_parameters() {
        assert!(BasicCommutatorTable::enumerate(0, 2).is_err());
        assert!(BasicCommutatorTable::enumerate(2, 0).is_err());
    }

    #[test]
    fn basic_table_sorted_and_leads_with_letters() {
        for r in 1..=3 {
            for s in 1..=4 {
                let t = BasicCommutatorTable::enumerate(r, s).unwrap();
                for i in 0..r.min(t.len()) {
                    assert_eq!(t.entries()[i], x(i + 1));
                }
                let mut sorted = t.entries().to_vec();
                sorted.sort();
                assert_eq!(sorted.as_slice(), t.entries());
                for i in 0..t.len() {
                    assert!(t.weight_vector(i).total() <= s);
                }
            }
        }
    }

    /// Witt's necklace-counting formula, computed independently.
    pub fn witt_count(rank: u64, weight: u64) -> u64 {
        fn moebius(mut n: u64) -> i64 {
            let mut result = 1i64;
            let mut p = 2;
            while p * p <= n {
                if n % p == 0 {
                    n /= p;
                    if n % p == 0 {
                        return 0;
                    }
                    result = -result;
                }
                p += 1;
            }
            if n > 1 {
                result = -result;
            }
            result
        }
        let mut sum = 0i64;
        for d in 1..=weight {
            if weight % d == 0 {
                sum += moebius(d) * (rank as i64).pow((weight / d) as u32);
            }
        }
        (sum / weight as i64) as u64
    }

    #[test]
    fn basic_counts_match_witt_formula() {
        for r in 1..=4u64 {
            for s in 1..=5u64 {
                let t = BasicCommutatorTable::enumerate(r as usize, s as usize).unwrap();
                let expected: u64 = (1..=s).map(|w| witt_count(r, w)).sum();
                assert_eq!(t.len() as u64, expected, "r={r} s={s}");
            }
        }
    }

    #[test]
    fn components_of_nested_bracket() {
        let c = br(x(1), br(x(2), x(3)));
        let comps = c.components();
        let expected: BTreeSet<_> = [x(1), x(2), x(3), br(x(2), x(3)), c.clone()]
            .into_iter()
            .collect();
        assert_eq!(comps, expected);
    }

    #[test]
    fn components_of_leaf_is_singleton() {
        assert_eq!(x(1).components(), [x(1)].into_iter().collect());
    }

    #[test]
    fn components_dedup_repeated_subtree() {
        let c = br(x(1), x(1));
        let expected: BTreeSet<_> = [x(1), c.clone()].into_iter().collect();
        assert_eq!(c.components(), expected);
    }

    #[test]
    fn forms_weight_one_is_identity() {
        let forms = CommutatorForm::enumerate(1).unwrap();
        assert_eq!(forms.len(), 1);
        assert_eq!(forms[0], CommutatorForm::identity());
    }

    #[test]
    fn forms_of_small_weight() {
        assert_eq!(CommutatorForm::enumerate(2).unwrap().len(), 2);
        assert_eq!(CommutatorForm::enumerate(3).unwrap().len(), 12);
    }

    #[test]
    fn form_apply_substitutes_slots() {
        let f = CommutatorForm::new(br(br(x(1), x(3)), x(2))).unwrap();
        let applied = f.apply(&[x(4), x(5), x(6)]).unwrap();
        assert_eq!(applied, br(br(x(4), x(6)), x(5)));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_tree(rank: usize, depth: u32) -> impl Strategy<Value = FormalCommutator> {
            let leaf = (1..=rank).prop_map(FormalCommutator::letter);
            leaf.prop_recursive(depth, 16, 2, |inner| {
                (inner.clone(), inner)
                    .prop_map(|(a, b)| FormalCommutator::bracket(a, b))
            })
        }

        proptest! {
            #[test]
            fn weight_vector_total_is_weight(c in arb_tree(3, 3)) {
                let w = WeightVector::of(&c, 3).unwrap();
                prop_assert_eq!(w.total(), c.weight());
            }

            #[test]
            fn components_bounded_by_node_count(c in arb_tree(3, 3)) {
                prop_assert!(c.components().len() <= 2 * c.weight() - 1);
            }

            #[test]
            fn order_total_and_antisymmetric(a in arb_tree(2, 3), b in arb_tree(2, 3)) {
                match a.cmp(&b) {
                    Ordering::Equal => prop_assert_eq!(&a, &b),
                    Ordering::Less => prop_assert_eq!(b.cmp(&a), Ordering::Greater),
                    Ordering::Greater => prop_assert_eq!(b.cmp(&a), Ordering::Less),
                }
            }

            #[test]
            fn order_sorting_is_idempotent(mut cs in proptest::collection::vec(arb_tree(2, 3), 1..12)) {
                cs.sort();
                let once = cs.clone();
                cs.sort();
                prop_assert_eq!(once, cs);
            }
        }
    }
}
