//! Decompositions of commutators of products and powers, and the expression
//! of commutator powers as short products of generator-power ball elements.

use std::collections::BTreeMap;

use crate::collect::Collector;
use crate::commutator::{CommutatorForm, FormalCommutator, WeightVector};
use crate::error::{Error, Result};
use crate::word::{Occurrence, Sign, Word};

/// Factors of a decomposition, in product order. For power decompositions the
/// leading term carries the central exponent `l1 * ... * lr`.
#[derive(Clone, Debug)]
pub struct DecompositionResult {
    pub leading: Option<(FormalCommutator, i64)>,
    pub factors: Vec<(FormalCommutator, i64)>,
}

impl DecompositionResult {
    /// The full product as a word: leading power first, then the factors.
    pub fn to_word(&self, rank: usize, step: usize) -> Result<Word> {
        let mut occs = Vec::new();
        let mut push = |c: &FormalCommutator, e: i64| {
            let sign = if e >= 0 { Sign::Plus } else { Sign::Minus };
            for _ in 0..e.unsigned_abs() {
                occs.push(Occurrence::new(c.clone(), sign));
            }
        };
        if let Some((c, e)) = &self.leading {
            push(c, *e);
        }
        for (c, e) in &self.factors {
            push(c, *e);
        }
        Word::new(rank, step, occs)
    }
}

/// Decompose a bracket of two formal products into an ordered product of
/// commutators, dropping terms of weight above `step`. Uses the expansions
/// `[X, uv] = [X,v][X,u][[X,u],v]` and `[ab, Y] = [a,Y][[a,Y],b][b,Y]`.
fn bracket_decompose(
    left: &[FormalCommutator],
    right: &[FormalCommutator],
    step: usize,
) -> Vec<FormalCommutator> {
    if left.is_empty() || right.is_empty() {
        return Vec::new();
    }
    let min_left = left.iter().map(|c| c.weight()).min().unwrap();
    let min_right = right.iter().map(|c| c.weight()).min().unwrap();
    if min_left + min_right > step {
        return Vec::new();
    }
    if left.len() == 1 && right.len() == 1 {
        let c = FormalCommutator::bracket(left[0].clone(), right[0].clone());
        return if c.weight() <= step { vec![c] } else { vec![] };
    }
    if right.len() >= 2 {
        // [X, y1 v] = [X, v] [X, y1] [[X, y1], v]
        let head = &right[..1];
        let tail = &right[1..];
        let part1 = bracket_decompose(left, tail, step);
        let part2 = bracket_decompose(left, head, step);
        let part3 = bracket_decompose(&part2, tail, step);
        let mut out = part1;
        out.extend(part2);
        out.extend(part3);
        out
    } else {
        // [x1 b, Y] = [x1, Y] [[x1, Y], b] [b, Y]
        let head = &left[..1];
        let tail = &left[1..];
        let part1 = bracket_decompose(head, right, step);
        let part3 = bracket_decompose(&part1, tail, step);
        let part2 = bracket_decompose(tail, right, step);
        let mut out = part1;
        out.extend(part3);
        out.extend(part2);
        out
    }
}

fn decompose_form_over_lists(
    form_tree: &FormalCommutator,
    lists: &[Vec<FormalCommutator>],
    step: usize,
) -> Vec<FormalCommutator> {
    match form_tree {
        FormalCommutator::Letter(slot) => lists[*slot - 1].clone(),
        FormalCommutator::Bracket(l, r) => {
            let left = decompose_form_over_lists(l, lists, step);
            let right = decompose_form_over_lists(r, lists, step);
            bracket_decompose(&left, &right, step)
        }
    }
}

/// Decompose `form(prod(list_1), ..., prod(list_r))` into an ordered product
/// of commutators in the given letters. The letters of distinct slots must be
/// disjoint. Terms of weight above `step` are dropped.
pub fn decompose_product(
    form: &CommutatorForm,
    factor_lists: &[Vec<usize>],
    step: usize,
) -> Result<DecompositionResult> {
    if step == 0 {
        return Err(Error::InvalidParameter("step must be at least 1".into()));
    }
    if factor_lists.len() != form.weight() {
        return Err(Error::InvalidInput(format!(
            "form of weight {} needs {} factor lists",
            form.weight(),
            form.weight()
        )));
    }
    if factor_lists.iter().any(|l| l.is_empty()) {
        return Err(Error::InvalidInput("factor lists must be nonempty".into()));
    }
    let mut seen = std::collections::BTreeSet::new();
    for list in factor_lists {
        for &letter in list {
            if letter == 0 {
                return Err(Error::InvalidInput("letters are 1-based".into()));
            }
            if !seen.insert(letter) {
                return Err(Error::InvalidInput(format!(
                    "letter x{letter} appears in more than one slot"
                )));
            }
        }
    }
    let lists: Vec<Vec<FormalCommutator>> = factor_lists
        .iter()
        .map(|l| l.iter().map(|&i| FormalCommutator::letter(i)).collect())
        .collect();
    let factors = decompose_form_over_lists(form.tree(), &lists, step)
        .into_iter()
        .map(|c| (c, 1))
        .collect();
    Ok(DecompositionResult {
        leading: None,
        factors,
    })
}

/// Decompose `form(x1^l1, ..., xr^lr)` as the leading power
/// `form(x1,...,xr)^(l1...lr)` followed by corrections of weight above the
/// form weight, each with its exponent. The corrections arise by collecting
/// the product expansion over the alphabet of the distinct trees it contains.
pub fn decompose_power(
    form: &CommutatorForm,
    exponents: &[i64],
    step: usize,
) -> Result<DecompositionResult> {
    if step == 0 {
        return Err(Error::InvalidParameter("step must be at least 1".into()));
    }
    let r = form.weight();
    if exponents.len() != r {
        return Err(Error::InvalidInput(format!(
            "form of weight {r} needs {r} exponents"
        )));
    }
    if exponents.iter().any(|&l| l < 1) {
        return Err(Error::InvalidInput("exponents must be positive".into()));
    }
    let base_args: Vec<FormalCommutator> = (1..=r).map(FormalCommutator::letter).collect();
    let base_tree = form.apply(&base_args)?;
    let leading_exponent: i64 = exponents.iter().product();
    if base_tree.weight() > step {
        // the value is trivial at this step; report the leading term only
        return Ok(DecompositionResult {
            leading: Some((base_tree, leading_exponent)),
            factors: Vec::new(),
        });
    }
    // expand with slot i repeated l_i times; the trees collapse onto the
    // base letters directly
    let lists: Vec<Vec<FormalCommutator>> = (1..=r)
        .map(|i| vec![FormalCommutator::letter(i); exponents[i - 1] as usize])
        .collect();
    let expansion = decompose_form_over_lists(form.tree(), &lists, step);
    // alphabet of distinct trees; the base term comes first in commutator
    // order since every other tree has greater weight
    let mut letters: Vec<FormalCommutator> = expansion.clone();
    letters.sort();
    letters.dedup();
    debug_assert_eq!(letters.first(), Some(&base_tree));
    debug_assert!(letters.iter().skip(1).all(|t| t.weight() > r));
    let index: BTreeMap<&FormalCommutator, usize> =
        letters.iter().enumerate().map(|(i, t)| (t, i + 1)).collect();
    let weights: Vec<usize> = letters.iter().map(|t| t.weight()).collect();
    let occs: Vec<Occurrence> = expansion
        .iter()
        .map(|t| Occurrence::positive(FormalCommutator::letter(index[t])))
        .collect();
    let word = Word::new_weighted(letters.len(), step, &weights, occs)?;
    let collector = Collector::new(letters.len(), step)?
        .with_letter_weights(weights)?
        .keep_trace(false);
    let (collected, _) = collector.collect(&word)?;
    let mut leading = None;
    let mut factors = Vec::new();
    for (z_tree, e) in collected.nonzero() {
        let substituted = z_tree.substitute(&letters);
        if substituted == base_tree && leading.is_none() {
            if e != leading_exponent {
                return Err(Error::Inconsistency(format!(
                    "leading exponent {e} differs from expected {leading_exponent}"
                )));
            }
            leading = Some((substituted, e));
        } else {
            factors.push((substituted, e));
        }
    }
    if leading.is_none() {
        if !factors.is_empty() {
            return Err(Error::Inconsistency("missing leading term".into()));
        }
        leading = Some((base_tree, leading_exponent));
    }
    Ok(DecompositionResult { leading, factors })
}

/// The bound `l^chi` each correction exponent of `decompose_power` obeys,
/// with the weight vector taken over the base letters.
pub fn power_correction_bound(correction: &FormalCommutator, exponents: &[i64]) -> Result<i128> {
    let chi = WeightVector::of(correction, exponents.len())?;
    Ok(chi.side_length_power(exponents))
}

/// A product of generator-power ball elements `x_i^e` with `|e| <= L_i`,
/// together with a factor-count bound uniform over the power `m`.
#[derive(Clone, Debug)]
pub struct BallWord {
    pub factors: Vec<(usize, i64)>,
    pub bound: usize,
}

impl BallWord {
    pub fn to_word(&self, rank: usize, step: usize) -> Result<Word> {
        let mut occs = Vec::new();
        for &(letter, e) in &self.factors {
            let sign = if e >= 0 { Sign::Plus } else { Sign::Minus };
            for _ in 0..e.unsigned_abs() {
                occs.push(Occurrence::new(FormalCommutator::letter(letter), sign));
            }
        }
        Word::new(rank, step, occs)
    }
}

/// Split `m >= 0` with `m <= prod(caps)` into at most `2^(len-1)` exponent
/// vectors `e` with `1 <= e_i <= caps_i` whose products sum to `m`.
fn mixed_radix_terms(m: i64, caps: &[i64]) -> Vec<Vec<i64>> {
    debug_assert!(m >= 0);
    if m == 0 {
        return Vec::new();
    }
    if caps.len() == 1 {
        return vec![vec![m]];
    }
    let rest_product: i64 = caps[1..].iter().product();
    let q = m / rest_product;
    let rho = m % rest_product;
    let mut out = Vec::new();
    if q > 0 {
        let mut term = vec![q];
        term.extend_from_slice(&caps[1..]);
        out.push(term);
    }
    for mut sub in mixed_radix_terms(rho, &caps[1..]) {
        sub.insert(0, 1);
        out.push(sub);
    }
    out
}

/// Emit `tree(x^e)` as explicit ball factors, expanding `[u, v]` to
/// `u^-1 v^-1 u v`; leaf `k` of the reindexed tree reads exponent `exps[k-1]`.
fn expand_tree(tree: &FormalCommutator, exps: &[i64], invert: bool, out: &mut Vec<(usize, i64)>) {
    match tree {
        FormalCommutator::Letter(i) => {
            let e = exps[*i - 1];
            out.push((*i, if invert { -e } else { e }));
        }
        FormalCommutator::Bracket(l, r) => {
            if invert {
                // [u,v]^-1 = v^-1 u^-1 v u
                expand_tree(r, exps, true, out);
                expand_tree(l, exps, true, out);
                expand_tree(r, exps, false, out);
                expand_tree(l, exps, false, out);
            } else {
                expand_tree(l, exps, true, out);
                expand_tree(r, exps, true, out);
                expand_tree(l, exps, false, out);
                expand_tree(r, exps, false, out);
            }
        }
    }
}

fn ball_factor_count(tree: &FormalCommutator) -> usize {
    match tree {
        FormalCommutator::Letter(_) => 1,
        FormalCommutator::Bracket(l, r) => 2 * (ball_factor_count(l) + ball_factor_count(r)),
    }
}

fn collect_leaves(tree: &FormalCommutator, out: &mut Vec<usize>) {
    match tree {
        FormalCommutator::Letter(i) => out.push(*i),
        FormalCommutator::Bracket(l, r) => {
            collect_leaves(l, out);
            collect_leaves(r, out);
        }
    }
}

/// Relabel leaves as 1..n in left-to-right order, giving a form shape.
fn reindex_leaves(tree: &FormalCommutator) -> FormalCommutator {
    fn walk(t: &FormalCommutator, next: &mut usize) -> FormalCommutator {
        match t {
            FormalCommutator::Letter(_) => {
                let i = *next;
                *next += 1;
                FormalCommutator::letter(i)
            }
            FormalCommutator::Bracket(l, r) => {
                let left = walk(l, next);
                let right = walk(r, next);
                FormalCommutator::bracket(left, right)
            }
        }
    }
    let mut next = 1;
    walk(tree, &mut next)
}

fn power_word_rec(
    tree: &FormalCommutator,
    lens: &[i64],
    m: i64,
    step: usize,
    out: &mut Vec<(usize, i64)>,
) -> Result<()> {
    if m == 0 || tree.weight() > step {
        return Ok(());
    }
    if m < 0 {
        let mut inner = Vec::new();
        power_word_rec(tree, lens, -m, step, &mut inner)?;
        out.extend(inner.into_iter().rev().map(|(i, e)| (i, -e)));
        return Ok(());
    }
    if let FormalCommutator::Letter(i) = tree {
        // plain generator power, split into segments of length <= L_i
        let cap = lens[*i - 1];
        let mut rest = m;
        while rest > 0 {
            let take = rest.min(cap);
            out.push((*i, take));
            rest -= take;
        }
        return Ok(());
    }
    let mut leaf_letters = Vec::new();
    collect_leaves(tree, &mut leaf_letters);
    let caps: Vec<i64> = leaf_letters.iter().map(|&i| lens[i - 1]).collect();
    let max: i64 = caps.iter().product();
    if m > max {
        return Err(Error::InvalidInput(format!(
            "power {m} exceeds the side-length product {max}"
        )));
    }
    let shape = reindex_leaves(tree);
    let ambient: Vec<FormalCommutator> = leaf_letters
        .iter()
        .map(|&i| FormalCommutator::letter(i))
        .collect();
    for term in mixed_radix_terms(m, &caps) {
        // tree(x)^(prod e) = tree(x^e) * zeta_t^-m_t * ... * zeta_1^-m_1
        let mut raw = Vec::new();
        expand_tree(&shape, &term, false, &mut raw);
        for (k, e) in raw {
            out.push((leaf_letters[k - 1], e));
        }
        let form = CommutatorForm::new(shape.clone())?;
        let dec = decompose_power(&form, &term, step)?;
        for (z_tree, e) in dec.factors.iter().rev() {
            let corr = z_tree.substitute(&ambient);
            power_word_rec(&corr, lens, -e, step, out)?;
        }
    }
    Ok(())
}

fn bound_rec(tree: &FormalCommutator, lens: &[i64], step: usize) -> Result<usize> {
    if tree.weight() > step {
        return Ok(0);
    }
    if let FormalCommutator::Letter(_) = tree {
        return Ok(1);
    }
    let mut leaf_letters = Vec::new();
    collect_leaves(tree, &mut leaf_letters);
    let caps: Vec<i64> = leaf_letters.iter().map(|&i| lens[i - 1]).collect();
    let shape = reindex_leaves(tree);
    let form = CommutatorForm::new(shape)?;
    // the corrections at the full side lengths dominate those of any smaller
    // exponent vector
    let dec = decompose_power(&form, &caps, step)?;
    let ambient: Vec<FormalCommutator> = leaf_letters
        .iter()
        .map(|&i| FormalCommutator::letter(i))
        .collect();
    let mut per_term = ball_factor_count(tree);
    for (z_tree, _) in &dec.factors {
        per_term += bound_rec(&z_tree.substitute(&ambient), lens, step)?;
    }
    let terms = 1usize << (tree.weight() - 1).min(20);
    Ok(terms * per_term)
}

/// Express `form(x1,...,xr)^m`, for `|m| <= L1*...*Lr`, as a product of ball
/// elements `x_i^e` with `|e| <= L_i`, valid in every group of the given
/// step. The factor-count bound reported alongside depends only on the form,
/// the side lengths and the step, not on `m`.
pub fn power_in_ball(form: &CommutatorForm, lens: &[i64], m: i64, step: usize) -> Result<BallWord> {
    if step == 0 {
        return Err(Error::InvalidParameter("step must be at least 1".into()));
    }
    let r = form.weight();
    if lens.len() != r {
        return Err(Error::InvalidInput(format!(
            "form of weight {r} needs {r} side lengths"
        )));
    }
    if lens.iter().any(|&l| l < 1) {
        return Err(Error::InvalidInput("side lengths must be positive".into()));
    }
    let max: i64 = lens.iter().product();
    if m.abs() > max {
        return Err(Error::InvalidInput(format!(
            "power {m} out of range; |m| must be at most {max}"
        )));
    }
    let base_args: Vec<FormalCommutator> = (1..=r).map(FormalCommutator::letter).collect();
    let tree = form.apply(&base_args)?;
    let mut factors = Vec::new();
    power_word_rec(&tree, lens, m, step, &mut factors)?;
    factors.retain(|&(_, e)| e != 0);
    debug_assert!(factors.iter().all(|&(i, e)| e.abs() <= lens[i - 1]));
    let bound = bound_rec(&tree, lens, step)?.max(1);
    Ok(BallWord { factors, bound })
}
