//! Exact group backends: upper unitriangular matrix groups over the integers
//! or a modulus, finite cyclic groups, multiplication-table groups and
//! finite products of these. All arithmetic is exact; elements hash and
//! order canonically so sets of elements behave deterministically.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::commutator::FormalCommutator;
use crate::error::{Error, Result};
use crate::word::{Sign, Word};

/// A group element, shaped for whichever backend it belongs to.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elem {
    /// Row-major `dim x dim` upper unitriangular matrix.
    Matrix { dim: usize, entries: Vec<BigInt> },
    /// Residue in a finite cyclic group.
    Residue(u64),
    /// Index into a multiplication table.
    Index(usize),
    /// Component-wise element of a product group.
    Tuple(Vec<Elem>),
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::Matrix { dim, entries } => {
                write!(f, "mat{}[", dim)?;
                for (i, e) in entries.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{e}")?;
                }
                write!(f, "]")
            }
            Elem::Residue(r) => write!(f, "{r}"),
            Elem::Index(i) => write!(f, "#{i}"),
            Elem::Tuple(parts) => {
                write!(f, "(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{p:?}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A finite group given by its multiplication table.
#[derive(Debug)]
pub struct TableGroup {
    pub order: usize,
    /// Row-major: `table[a * order + b]` is the index of `a * b`.
    pub table: Vec<usize>,
    pub identity: usize,
    pub inverse: Vec<usize>,
}

impl TableGroup {
    /// Validates the table: closure, identity, inverses, and associativity
    /// (checked exhaustively for orders up to 64).
    pub fn new(order: usize, table: Vec<usize>) -> Result<Self> {
        if order == 0 || table.len() != order * order {
            return Err(Error::InvalidInput(format!(
                "table must hold {order}x{order} entries"
            )));
        }
        if table.iter().any(|&v| v >= order) {
            return Err(Error::InvalidInput("table entry out of range".into()));
        }
        let mul = |a: usize, b: usize| table[a * order + b];
        let identity = (0..order)
            .find(|&e| (0..order).all(|a| mul(e, a) == a && mul(a, e) == a))
            .ok_or_else(|| Error::InvalidInput("table has no identity".into()))?;
        let mut inverse = vec![usize::MAX; order];
        for a in 0..order {
            inverse[a] = (0..order)
                .find(|&b| mul(a, b) == identity && mul(b, a) == identity)
                .ok_or_else(|| Error::InvalidInput(format!("element {a} has no inverse")))?;
        }
        if order <= 64 {
            for a in 0..order {
                for b in 0..order {
                    for c in 0..order {
                        if mul(mul(a, b), c) != mul(a, mul(b, c)) {
                            return Err(Error::InvalidInput(format!(
                                "table is not associative at ({a},{b},{c})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(TableGroup {
            order,
            table,
            identity,
            inverse,
        })
    }
}

/// An exact group backend.
#[derive(Clone, Debug)]
pub enum Group {
    /// Upper unitriangular `dim x dim` matrices; over the integers when
    /// `modulus` is `None`, otherwise entries mod `m >= 2`.
    Unitriangular { dim: usize, modulus: Option<u64> },
    /// The cyclic group of order `modulus >= 1`.
    Cyclic { modulus: u64 },
    Table(Arc<TableGroup>),
    Product(Vec<Group>),
}

impl Group {
    pub fn unitriangular(dim: usize, modulus: Option<u64>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter(
                "unitriangular dimension must be at least 2".into(),
            ));
        }
        if let Some(m) = modulus {
            if m < 2 {
                return Err(Error::InvalidParameter("modulus must be at least 2".into()));
            }
        }
        Ok(Group::Unitriangular { dim, modulus })
    }

    pub fn cyclic(modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidParameter(
                "cyclic order must be at least 1".into(),
            ));
        }
        Ok(Group::Cyclic { modulus })
    }

    /// The integers, modelled as UT(2, Z).
    pub fn integers() -> Self {
        Group::Unitriangular {
            dim: 2,
            modulus: None,
        }
    }

    /// The integer Heisenberg group UT(3, Z).
    pub fn heisenberg() -> Self {
        Group::Unitriangular {
            dim: 3,
            modulus: None,
        }
    }

    pub fn product(factors: Vec<Group>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidParameter(
                "product needs at least one factor".into(),
            ));
        }
        Ok(Group::Product(factors))
    }

    pub fn identity(&self) -> Elem {
        match self {
            Group::Unitriangular { dim, .. } => Elem::Matrix {
                dim: *dim,
                entries: identity_entries(*dim),
            },
            Group::Cyclic { .. } => Elem::Residue(0),
            Group::Table(t) => Elem::Index(t.identity),
            Group::Product(fs) => Elem::Tuple(fs.iter().map(|f| f.identity()).collect()),
        }
    }

    fn reduce_matrix(&self, dim: usize, entries: &mut [BigInt]) {
        if let Group::Unitriangular {
            modulus: Some(m), ..
        } = self
        {
            let m = BigInt::from(*m);
            for e in entries.iter_mut().take(dim * dim) {
                *e = ((&*e % &m) + &m) % &m;
            }
        }
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        match (self, a, b) {
            (
                Group::Unitriangular { dim, .. },
                Elem::Matrix {
                    dim: da,
                    entries: ea,
                },
                Elem::Matrix {
                    dim: db,
                    entries: eb,
                },
            ) => {
                assert_eq!(*da, *dim, "matrix dimension mismatch");
                assert_eq!(*db, *dim, "matrix dimension mismatch");
                let n = *dim;
                let mut out = vec![BigInt::zero(); n * n];
                for i in 0..n {
                    // unitriangular: only k in i..=j contributes
                    for j in i..n {
                        let mut acc = BigInt::zero();
                        for k in i..=j {
                            acc += &ea[i * n + k] * &eb[k * n + j];
                        }
                        out[i * n + j] = acc;
                    }
                }
                self.reduce_matrix(n, &mut out);
                Elem::Matrix {
                    dim: n,
                    entries: out,
                }
            }
            (Group::Cyclic { modulus }, Elem::Residue(x), Elem::Residue(y)) => {
                Elem::Residue(((*x as u128 + *y as u128) % *modulus as u128) as u64)
            }
            (Group::Table(t), Elem::Index(x), Elem::Index(y)) => {
                Elem::Index(t.table[x * t.order + y])
            }
            (Group::Product(fs), Elem::Tuple(xs), Elem::Tuple(ys)) => Elem::Tuple(
                fs.iter()
                    .zip(xs.iter().zip(ys))
                    .map(|(f, (x, y))| f.mul(x, y))
                    .collect(),
            ),
            _ => panic!("element shape does not match backend"),
        }
    }

    pub fn inv(&self, a: &Elem) -> Elem {
        match (self, a) {
            (Group::Unitriangular { dim, .. }, Elem::Matrix { entries, .. }) => {
                // M = I + N with N strictly upper triangular; the inverse is
                // the alternating Neumann sum I - N + N^2 - ...
                let n = *dim;
                let mut nil = entries.clone();
                for i in 0..n {
                    nil[i * n + i] -= BigInt::one();
                }
                let mut out = identity_entries(n);
                let mut power = identity_entries(n);
                let mut negate = true;
                for _ in 1..n {
                    power = mat_mul(n, &power, &nil);
                    for (o, p) in out.iter_mut().zip(&power) {
                        if negate {
                            *o -= p;
                        } else {
                            *o += p;
                        }
                    }
                    negate = !negate;
                }
                self.reduce_matrix(n, &mut out);
                Elem::Matrix {
                    dim: n,
                    entries: out,
                }
            }
            (Group::Cyclic { modulus }, Elem::Residue(x)) => {
                Elem::Residue(if *x == 0 { 0 } else { *modulus - *x })
            }
            (Group::Table(t), Elem::Index(x)) => Elem::Index(t.inverse[*x]),
            (Group::Product(fs), Elem::Tuple(xs)) => {
                Elem::Tuple(fs.iter().zip(xs).map(|(f, x)| f.inv(x)).collect())
            }
            _ => panic!("element shape does not match backend"),
        }
    }

    pub fn pow(&self, a: &Elem, e: i64) -> Elem {
        if e == 0 {
            return self.identity();
        }
        let base = if e < 0 { self.inv(a) } else { a.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = self.identity();
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            sq = self.mul(&sq, &sq);
            k >>= 1;
        }
        acc
    }

    /// `[a, b] = a^-1 b^-1 a b`.
    pub fn commutator(&self, a: &Elem, b: &Elem) -> Elem {
        let mut out = self.inv(a);
        out = self.mul(&out, &self.inv(b));
        out = self.mul(&out, a);
        self.mul(&out, b)
    }

    /// Left-nested simple commutator `[g1, ..., gk]`.
    pub fn simple_commutator(&self, elems: &[Elem]) -> Result<Elem> {
        if elems.len() < 2 {
            return Err(Error::InvalidInput(
                "simple commutator needs at least two arguments".into(),
            ));
        }
        let mut acc = elems[0].clone();
        for g in &elems[1..] {
            acc = self.commutator(&acc, g);
        }
        Ok(acc)
    }

    pub fn conjugate(&self, g: &Elem, by: &Elem) -> Elem {
        self.mul(&self.mul(by, g), &self.inv(by))
    }

    /// Check that an element has the right shape and canonical reduction.
    pub fn validate_elem(&self, e: &Elem) -> Result<()> {
        match (self, e) {
            (Group::Unitriangular { dim, modulus }, Elem::Matrix { dim: d, entries }) => {
                if d != dim || entries.len() != dim * dim {
                    return Err(Error::InvalidInput("matrix dimension mismatch".into()));
                }
                for i in 0..*dim {
                    for j in 0..*dim {
                        let v = &entries[i * dim + j];
                        if i == j && !v.is_one() {
                            return Err(Error::InvalidInput("diagonal must be 1".into()));
                        }
                        if i > j && !v.is_zero() {
                            return Err(Error::InvalidInput(
                                "matrix must be upper triangular".into(),
                            ));
                        }
                        if i < j {
                            if let Some(m) = modulus {
                                if v.is_negative() || *v >= BigInt::from(*m) {
                                    return Err(Error::InvalidInput(format!(
                                        "entry {v} not reduced mod {m}"
                                    )));
                                }
                            }
                        }
                    }
                }
                Ok(())
            }
            (Group::Cyclic { modulus }, Elem::Residue(r)) => {
                if r >= modulus {
                    return Err(Error::InvalidInput(format!(
                        "residue {r} not below {modulus}"
                    )));
                }
                Ok(())
            }
            (Group::Table(t), Elem::Index(i)) => {
                if *i >= t.order {
                    return Err(Error::InvalidInput(format!("index {i} out of range")));
                }
                Ok(())
            }
            (Group::Product(fs), Elem::Tuple(xs)) => {
                if fs.len() != xs.len() {
                    return Err(Error::InvalidInput("tuple arity mismatch".into()));
                }
                for (f, x) in fs.iter().zip(xs) {
                    f.validate_elem(x)?;
                }
                Ok(())
            }
            _ => Err(Error::InvalidInput(
                "element shape does not match backend".into(),
            )),
        }
    }

    pub fn order(&self) -> Option<u128> {
        match self {
            Group::Unitriangular { dim, modulus } => modulus.map(|m| {
                let cells = (dim * (dim - 1) / 2) as u32;
                (m as u128).pow(cells)
            }),
            Group::Cyclic { modulus } => Some(*modulus as u128),
            Group::Table(t) => Some(t.order as u128),
            Group::Product(fs) => fs.iter().map(|f| f.order()).product(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.order().is_some()
    }

    /// Nilpotency step known from the structure, if any. Table groups report
    /// `None`; use `lower_central_series` to measure them.
    pub fn step_hint(&self) -> Option<usize> {
        match self {
            Group::Unitriangular { dim, .. } => Some(dim - 1),
            Group::Cyclic { .. } => Some(1),
            Group::Table(_) => None,
            Group::Product(fs) => fs
                .iter()
                .map(|f| f.step_hint())
                .collect::<Option<Vec<_>>>()
                .map(|v| v.into_iter().max().unwrap_or(1)),
        }
    }

    /// Nilpotency step: the structural hint, or measured via the lower
    /// central series for finite table-backed groups.
    pub fn step(&self) -> Result<usize> {
        if let Some(s) = self.step_hint() {
            return Ok(s);
        }
        let chain = self.lower_central_series()?;
        chain
            .step()
            .ok_or_else(|| Error::Precondition("group is not nilpotent".into()))
    }

    /// Structurally abelian backends; table groups are checked exhaustively.
    pub fn is_abelian(&self) -> bool {
        match self {
            Group::Unitriangular { dim, .. } => *dim == 2,
            Group::Cyclic { .. } => true,
            Group::Table(t) => {
                let mul = |a: usize, b: usize| t.table[a * t.order + b];
                (0..t.order).all(|a| (0..t.order).all(|b| mul(a, b) == mul(b, a)))
            }
            Group::Product(fs) => fs.iter().all(|f| f.is_abelian()),
        }
    }

    /// All elements of a finite backend, in canonical order.
    pub fn enumerate(&self) -> Option<Vec<Elem>> {
        match self {
            Group::Unitriangular { dim, modulus } => {
                let m = (*modulus)?;
                let n = *dim;
                let cells: Vec<(usize, usize)> = (0..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .collect();
                let mut out = Vec::new();
                let mut values = vec![0u64; cells.len()];
                loop {
                    let mut entries = identity_entries(n);
                    for (idx, &(i, j)) in cells.iter().enumerate() {
                        entries[i * n + j] = BigInt::from(values[idx]);
                    }
                    out.push(Elem::Matrix { dim: n, entries });
                    let mut pos = 0;
                    while pos < values.len() {
                        values[pos] += 1;
                        if values[pos] < m {
                            break;
                        }
                        values[pos] = 0;
                        pos += 1;
                    }
                    if values.is_empty() || pos == values.len() {
                        break;
                    }
                }
                out.sort();
                Some(out)
            }
            Group::Cyclic { modulus } => Some((0..*modulus).map(Elem::Residue).collect()),
            Group::Table(t) => Some((0..t.order).map(Elem::Index).collect()),
            Group::Product(fs) => {
                let parts: Option<Vec<Vec<Elem>>> = fs.iter().map(|f| f.enumerate()).collect();
                let parts = parts?;
                let mut out = vec![Vec::new()];
                for p in &parts {
                    let mut next = Vec::with_capacity(out.len() * p.len());
                    for prefix in &out {
                        for e in p {
                            let mut v = prefix.clone();
                            v.push(e.clone());
                            next.push(v);
                        }
                    }
                    out = next;
                }
                let mut out: Vec<Elem> = out.into_iter().map(Elem::Tuple).collect();
                out.sort();
                Some(out)
            }
        }
    }

    /// The canonical generating set: superdiagonal matrices for UT(n), the
    /// residue 1 for cyclic groups, every element for table groups, and the
    /// embedded factor generators for products.
    pub fn standard_generators(&self) -> Vec<Elem> {
        match self {
            Group::Unitriangular { dim, .. } => {
                let n = *dim;
                (0..n - 1)
                    .map(|i| {
                        let mut entries = identity_entries(n);
                        entries[i * n + i + 1] = BigInt::one();
                        Elem::Matrix { dim: n, entries }
                    })
                    .collect()
            }
            Group::Cyclic { modulus } => {
                if *modulus == 1 {
                    vec![]
                } else {
                    vec![Elem::Residue(1)]
                }
            }
            Group::Table(t) => (0..t.order).map(Elem::Index).collect(),
            Group::Product(fs) => {
                let mut out = Vec::new();
                for (k, f) in fs.iter().enumerate() {
                    for g in f.standard_generators() {
                        let tuple: Vec<Elem> = fs
                            .iter()
                            .enumerate()
                            .map(|(j, fj)| if j == k { g.clone() } else { fj.identity() })
                            .collect();
                        out.push(Elem::Tuple(tuple));
                    }
                }
                out
            }
        }
    }

    /// Evaluate a word under an assignment of group elements to generators;
    /// `[u,v]` interprets as `u^-1 v^-1 u v`.
    pub fn evaluate_word(&self, assignment: &[Elem], word: &Word) -> Result<Elem> {
        let mut acc = self.identity();
        for occ in word.occurrences() {
            let v = self.evaluate_commutator(assignment, &occ.commutator)?;
            let v = match occ.sign {
                Sign::Plus => v,
                Sign::Minus => self.inv(&v),
            };
            acc = self.mul(&acc, &v);
        }
        Ok(acc)
    }

    pub fn evaluate_commutator(&self, assignment: &[Elem], c: &FormalCommutator) -> Result<Elem> {
        match c {
            FormalCommutator::Letter(i) => assignment
                .get(*i - 1)
                .cloned()
                .ok_or(Error::MissingAssignment(*i)),
            FormalCommutator::Bracket(l, r) => {
                let a = self.evaluate_commutator(assignment, l)?;
                let b = self.evaluate_commutator(assignment, r)?;
                Ok(self.commutator(&a, &b))
            }
        }
    }

    // ---- set arithmetic -------------------------------------------------

    pub fn mul_sets(&self, a: &BTreeSet<Elem>, b: &BTreeSet<Elem>) -> BTreeSet<Elem> {
        let mut out = BTreeSet::new();
        for x in a {
            for y in b {
                out.insert(self.mul(x, y));
            }
        }
        out
    }

    pub fn inv_set(&self, a: &BTreeSet<Elem>) -> BTreeSet<Elem> {
        a.iter().map(|x| self.inv(x)).collect()
    }

    pub fn translate(&self, g: &Elem, a: &BTreeSet<Elem>) -> BTreeSet<Elem> {
        a.iter().map(|x| self.mul(g, x)).collect()
    }

    /// `a^n` as a set product, guarded by an element budget.
    pub fn power_set(&self, a: &BTreeSet<Elem>, n: usize, cap: usize) -> Result<BTreeSet<Elem>> {
        if n == 0 {
            return Ok([self.identity()].into_iter().collect());
        }
        let mut acc = a.clone();
        for _ in 1..n {
            acc = self.mul_sets(&acc, a);
            if acc.len() > cap {
                return Err(Error::ResourceLimit(format!(
                    "power set exceeded {cap} elements"
                )));
            }
        }
        Ok(acc)
    }

    /// Subgroup generated by a set, by closure under multiplication and
    /// inversion, guarded by an element budget.
    pub fn closure(&self, seed: &BTreeSet<Elem>, cap: usize) -> Result<BTreeSet<Elem>> {
        let mut gens: Vec<Elem> = seed.iter().cloned().collect();
        gens.extend(seed.iter().map(|g| self.inv(g)));
        let mut out: BTreeSet<Elem> = [self.identity()].into_iter().collect();
        let mut frontier: Vec<Elem> = out.iter().cloned().collect();
        while let Some(g) = frontier.pop() {
            for h in &gens {
                let v = self.mul(&g, h);
                if out.insert(v.clone()) {
                    if out.len() > cap {
                        return Err(Error::ResourceLimit(format!(
                            "closure exceeded {cap} elements"
                        )));
                    }
                    frontier.push(v);
                }
            }
        }
        Ok(out)
    }

    /// Exact image set `{[g1, ..., gs] : gi in Xi}`.
    pub fn commutator_set(&self, sets: &[&BTreeSet<Elem>]) -> Result<BTreeSet<Elem>> {
        if sets.len() < 2 {
            return Err(Error::InvalidInput(
                "commutator set needs at least two factors".into(),
            ));
        }
        if sets.iter().any(|s| s.is_empty()) {
            return Err(Error::InvalidInput(
                "commutator set factors must be nonempty".into(),
            ));
        }
        let mut acc: BTreeSet<Elem> = sets[0].clone();
        for s in &sets[1..] {
            let mut next = BTreeSet::new();
            for a in &acc {
                for b in s.iter() {
                    next.insert(self.commutator(a, b));
                }
            }
            acc = next;
        }
        Ok(acc)
    }

    /// Verify that a finite set of elements is a subgroup.
    pub fn is_subgroup(&self, h: &BTreeSet<Elem>) -> bool {
        if !h.contains(&self.identity()) {
            return false;
        }
        for a in h {
            if !h.contains(&self.inv(a)) {
                return false;
            }
            for b in h {
                if !h.contains(&self.mul(a, b)) {
                    return false;
                }
            }
        }
        true
    }

    /// Verify that a subgroup is normal: conjugation by every element of a
    /// finite backend; abelian infinite backends are immediate.
    pub fn is_normal_subgroup(&self, h: &BTreeSet<Elem>) -> Result<bool> {
        if !self.is_subgroup(h) {
            return Ok(false);
        }
        let conjugators = match self.enumerate() {
            Some(all) => all,
            None => {
                if self.is_abelian() {
                    return Ok(true);
                }
                return Err(Error::Unsupported(
                    "normality check needs a finite or abelian backend".into(),
                ));
            }
        };
        for g in &conjugators {
            for n in h {
                if !h.contains(&self.conjugate(n, g)) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    // ---- series and structure -------------------------------------------

    /// Lower central series of a finite backend, until stabilization.
    pub fn lower_central_series(&self) -> Result<SeriesChain> {
        let all = self.enumerate().ok_or_else(|| {
            Error::Unsupported("lower central series needs an enumerable backend".into())
        })?;
        let whole: BTreeSet<Elem> = all.into_iter().collect();
        let cap = whole.len() * 2 + 16;
        let mut terms = vec![whole.clone()];
        loop {
            let prev = terms.last().unwrap();
            let mut comms = BTreeSet::new();
            for a in prev {
                for b in &whole {
                    comms.insert(self.commutator(a, b));
                }
            }
            let next = self.closure(&comms, cap)?;
            if &next == prev {
                break;
            }
            let done = next.len() == 1;
            terms.push(next);
            if done {
                break;
            }
        }
        Ok(SeriesChain { terms })
    }

    /// Least `s` with `[X, ..., X]_{s+1} = {1}`, searched up to `cap`.
    pub fn nilpotency_step(&self, x: &BTreeSet<Elem>, cap: usize) -> Result<NilpotencyOutcome> {
        if x.is_empty() {
            return Err(Error::InvalidInput("generating set must be nonempty".into()));
        }
        let identity_only: BTreeSet<Elem> = [self.identity()].into_iter().collect();
        let mut level = x.clone();
        let mut seen: Vec<BTreeSet<Elem>> = vec![level.clone()];
        for s in 1..=cap {
            // level holds [X,...,X]_s; extend to s+1 entries
            let mut next = BTreeSet::new();
            for a in &level {
                for b in x {
                    next.insert(self.commutator(a, b));
                }
            }
            if next == identity_only {
                return Ok(NilpotencyOutcome::Step(s));
            }
            if seen.contains(&next) {
                // the iteration cycles without collapsing
                return Ok(NilpotencyOutcome::NotNilpotentUpToCap(cap));
            }
            seen.push(next.clone());
            level = next;
        }
        Ok(NilpotencyOutcome::NotNilpotentUpToCap(cap))
    }

    /// For a finite nilpotent backend, the set of elements of p-power order
    /// for each prime p dividing the order; verifies these are subgroups and
    /// that the group is their internal direct product.
    pub fn sylow_decomposition(&self) -> Result<Vec<(u64, BTreeSet<Elem>)>> {
        let all = self.enumerate().ok_or_else(|| {
            Error::Unsupported("sylow decomposition needs a finite backend".into())
        })?;
        let chain = self.lower_central_series()?;
        if chain.step().is_none() {
            return Err(Error::Precondition("group is not nilpotent".into()));
        }
        let order = all.len() as u64;
        let primes = prime_factors(order);
        let mut parts = Vec::new();
        for &p in &primes {
            let mut part = BTreeSet::new();
            for g in &all {
                if is_prime_power_order(self, g, p) {
                    part.insert(g.clone());
                }
            }
            if !self.is_subgroup(&part) {
                return Err(Error::Inconsistency(format!(
                    "{p}-torsion elements do not form a subgroup"
                )));
            }
            parts.push((p, part));
        }
        let product_size: u128 = parts.iter().map(|(_, s)| s.len() as u128).product();
        if product_size != all.len() as u128 {
            return Err(Error::Inconsistency(
                "orders of primary parts do not multiply to the group order".into(),
            ));
        }
        let mut product: BTreeSet<Elem> = [self.identity()].into_iter().collect();
        for (_, part) in &parts {
            product = self.mul_sets(&product, part);
        }
        if product.len() != all.len() {
            return Err(Error::Inconsistency(
                "primary parts do not span the group".into(),
            ));
        }
        Ok(parts)
    }

    /// Order of a single element, up to a cap.
    pub fn elem_order(&self, g: &Elem, cap: u64) -> Result<u64> {
        let id = self.identity();
        let mut acc = g.clone();
        for k in 1..=cap {
            if acc == id {
                return Ok(k);
            }
            acc = self.mul(&acc, g);
        }
        Err(Error::ResourceLimit(format!(
            "element order exceeds cap {cap}"
        )))
    }

    /// Rebuild a finite backend as an explicit table group. Returns the
    /// table-backed group and the element list mapping indices back.
    pub fn to_table(&self) -> Result<(Group, Vec<Elem>)> {
        let elems = self
            .enumerate()
            .ok_or_else(|| Error::Unsupported("table conversion needs a finite backend".into()))?;
        let index: BTreeMap<&Elem, usize> = elems.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let n = elems.len();
        let mut table = vec![0usize; n * n];
        for (i, a) in elems.iter().enumerate() {
            for (j, b) in elems.iter().enumerate() {
                table[i * n + j] = index[&self.mul(a, b)];
            }
        }
        let tg = TableGroup::new(n, table)?;
        Ok((Group::Table(Arc::new(tg)), elems))
    }
}

fn identity_entries(n: usize) -> Vec<BigInt> {
    let mut entries = vec![BigInt::zero(); n * n];
    for i in 0..n {
        entries[i * n + i] = BigInt::one();
    }
    entries
}

fn mat_mul(n: usize, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = BigInt::zero();
            for k in 0..n {
                acc += &a[i * n + k] * &b[k * n + j];
            }
            out[i * n + j] = acc;
        }
    }
    out
}

fn is_prime_power_order(g: &Group, e: &Elem, p: u64) -> bool {
    // e has p-power order iff iterating the p-th power map reaches 1
    let id = g.identity();
    let mut acc = e.clone();
    for _ in 0..64 {
        if acc == id {
            return true;
        }
        acc = g.pow(&acc, p as i64);
    }
    false
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Descending chain of the lower central series, as explicit element sets.
#[derive(Clone, Debug)]
pub struct SeriesChain {
    pub terms: Vec<BTreeSet<Elem>>,
}

impl SeriesChain {
    /// Largest `i` with the i-th term nontrivial, when the chain reaches the
    /// trivial subgroup; `None` when it stabilizes above it.
    pub fn step(&self) -> Option<usize> {
        if self.terms.last().map(|t| t.len()) != Some(1) {
            return None;
        }
        Some(self.terms.iter().filter(|t| t.len() > 1).count())
    }

    /// 1-based access, so `term(1)` is the whole group.
    pub fn term(&self, i: usize) -> Option<&BTreeSet<Elem>> {
        self.terms.get(i - 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NilpotencyOutcome {
    Step(usize),
    NotNilpotentUpToCap(usize),
}

/// A finite subset of a backend, with cached structural flags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subset {
    pub elements: BTreeSet<Elem>,
    pub symmetric: bool,
    pub contains_identity: bool,
}

impl Subset {
    pub fn new(group: &Group, elements: BTreeSet<Elem>) -> Self {
        let symmetric = elements.iter().all(|e| elements.contains(&group.inv(e)));
        let contains_identity = elements.contains(&group.identity());
        Subset {
            elements,
            symmetric,
            contains_identity,
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

#[cfg(test)]
pub(crate) fn symmetric_group_3() -> Group {
    // permutations of 3 points in lexicographic one-line notation
    let perms: Vec<[usize; 3]> = vec![
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let compose = |p: &[usize; 3], q: &[usize; 3]| [p[q[0]], p[q[1]], p[q[2]]];
    let mut table = vec![0usize; 36];
    for (i, p) in perms.iter().enumerate() {
        for (j, q) in perms.iter().enumerate() {
            let r = compose(p, q);
            table[i * 6 + j] = perms.iter().position(|s| *s == r).unwrap();
        }
    }
    Group::Table(Arc::new(TableGroup::new(6, table).unwrap()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heis() -> (Group, Elem, Elem) {
        let g = Group::heisenberg();
        let gens = g.standard_generators();
        (g.clone(), gens[0].clone(), gens[1].clone())
    }

    fn mat3(a: i64, b: i64, c: i64) -> Elem {
        // [[1,a,c],[0,1,b],[0,0,1]]
        Elem::Matrix {
            dim: 3,
            entries: vec![1, a, c, 0, 1, b, 0, 0, 1]
                .into_iter()
                .map(BigInt::from)
                .collect(),
        }
    }

    #[test]
    fn heisenberg_commutator_is_e13() {
        let (g, x, y) = heis();
        assert_eq!(g.commutator(&x, &y), mat3(0, 0, 1));
    }

    #[test]
    fn heisenberg_triple_commutator_vanishes() {
        let (g, x, y) = heis();
        let c = g.simple_commutator(&[x, y.clone(), y]).unwrap();
        assert_eq!(c, g.identity());
    }

    #[test]
    fn simple_commutator_rejects_short_input() {
        let (g, x, _) = heis();
        assert!(g.simple_commutator(&[x]).is_err());
    }

    #[test]
    fn commutator_with_identity_is_identity() {
        let (g, x, _) = heis();
        assert_eq!(g.commutator(&x, &g.identity()), g.identity());
    }

    #[test]
    fn matrix_inverse_is_exact() {
        let g = Group::unitriangular(4, None).unwrap();
        let gens = g.standard_generators();
        let mut m = g.identity();
        for ge in &gens {
            m = g.mul(&m, ge);
        }
        let m = g.pow(&m, 5);
        assert_eq!(g.mul(&m, &g.inv(&m)), g.identity());
        assert_eq!(g.mul(&g.inv(&m), &m), g.identity());
    }

    #[test]
    fn evaluate_word_heisenberg_bracket() {
        let (g, x, y) = heis();
        let w = crate::text::parse_word("[x1,x2]", 2, 2).unwrap();
        let v = g.evaluate_word(&[x, y], &w).unwrap();
        assert_eq!(v, mat3(0, 0, 1));
    }

    #[test]
    fn evaluate_empty_word_is_identity() {
        let (g, x, y) = heis();
        let w = Word::empty(2, 2).unwrap();
        assert_eq!(g.evaluate_word(&[x, y], &w).unwrap(), g.identity());
    }

    #[test]
    fn evaluate_cancelling_word_is_identity() {
        let (g, x, y) = heis();
        let w = crate::text::parse_word("x1 x1^-1", 2, 2).unwrap();
        assert_eq!(g.evaluate_word(&[x, y], &w).unwrap(), g.identity());
    }

    #[test]
    fn evaluate_rejects_missing_assignment() {
        let (g, x, _) = heis();
        let w = crate::text::parse_word("x2", 2, 2).unwrap();
        assert!(matches!(
            g.evaluate_word(&[x], &w),
            Err(Error::MissingAssignment(2))
        ));
    }

    #[test]
    fn commutator_set_heisenberg_mod_3() {
        let g = Group::unitriangular(3, Some(3)).unwrap();
        let gens = g.standard_generators();
        let (x, y) = (gens[0].clone(), gens[1].clone());
        let xs: BTreeSet<Elem> = [x.clone(), g.pow(&x, 2)].into_iter().collect();
        let ys: BTreeSet<Elem> = [y.clone()].into_iter().collect();
        let img = g.commutator_set(&[&xs, &ys]).unwrap();
        let e13 = g.commutator(&x, &y);
        let expected: BTreeSet<Elem> = [e13.clone(), g.mul(&e13, &e13)].into_iter().collect();
        assert_eq!(img, expected);
    }

    #[test]
    fn commutator_set_with_identity_factor() {
        let (g, x, y) = heis();
        let xs: BTreeSet<Elem> = [x, y].into_iter().collect();
        let ids: BTreeSet<Elem> = [g.identity()].into_iter().collect();
        let img = g.commutator_set(&[&xs, &ids]).unwrap();
        assert_eq!(img, ids);
    }

    #[test]
    fn commutator_set_of_whole_ut3_mod2() {
        let g = Group::unitriangular(3, Some(2)).unwrap();
        let all: BTreeSet<Elem> = g.enumerate().unwrap().into_iter().collect();
        let img = g.commutator_set(&[&all, &all]).unwrap();
        assert_eq!(img.len(), 2);
        assert!(img.contains(&g.identity()));
    }

    #[test]
    fn lcs_of_ut3_mod2() {
        let g = Group::unitriangular(3, Some(2)).unwrap();
        let chain = g.lower_central_series().unwrap();
        assert_eq!(chain.terms[0].len(), 8);
        assert_eq!(chain.terms[1].len(), 2);
        assert_eq!(chain.terms[2].len(), 1);
        assert_eq!(chain.step(), Some(2));
    }

    #[test]
    fn lcs_of_abelian_group_collapses_immediately() {
        let g = Group::cyclic(6).unwrap();
        let chain = g.lower_central_series().unwrap();
        assert_eq!(chain.terms[1].len(), 1);
        assert_eq!(chain.step(), Some(1));
    }

    #[test]
    fn lcs_of_ut4_mod2_has_step_3() {
        let g = Group::unitriangular(4, Some(2)).unwrap();
        let chain = g.lower_central_series().unwrap();
        assert_eq!(chain.step(), Some(3));
        // every term is conjugation-closed
        let all: Vec<Elem> = g.enumerate().unwrap();
        for term in &chain.terms {
            for t in term.iter() {
                for c in &all {
                    assert!(term.contains(&g.conjugate(t, c)));
                }
            }
        }
    }

    #[test]
    fn nilpotency_step_of_heisenberg_generators() {
        let g = Group::unitriangular(3, Some(3)).unwrap();
        let gens: BTreeSet<Elem> = g.standard_generators().into_iter().collect();
        assert_eq!(
            g.nilpotency_step(&gens, 10).unwrap(),
            NilpotencyOutcome::Step(2)
        );
    }

    #[test]
    fn nilpotency_step_single_generator() {
        let g = Group::cyclic(8).unwrap();
        let x: BTreeSet<Elem> = [Elem::Residue(1)].into_iter().collect();
        assert_eq!(
            g.nilpotency_step(&x, 10).unwrap(),
            NilpotencyOutcome::Step(1)
        );
    }

    #[test]
    fn nilpotency_cap_on_symmetric_group() {
        let g = symmetric_group_3();
        let all: BTreeSet<Elem> = g.enumerate().unwrap().into_iter().collect();
        assert_eq!(
            g.nilpotency_step(&all, 6).unwrap(),
            NilpotencyOutcome::NotNilpotentUpToCap(6)
        );
    }

    #[test]
    fn sylow_of_cyclic_6() {
        let g = Group::cyclic(6).unwrap();
        let parts = g.sylow_decomposition().unwrap();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].0, 2);
        assert_eq!(
            parts[0].1,
            [Elem::Residue(0), Elem::Residue(3)].into_iter().collect()
        );
        assert_eq!(parts[1].0, 3);
        assert_eq!(
            parts[1].1,
            [Elem::Residue(0), Elem::Residue(2), Elem::Residue(4)]
                .into_iter()
                .collect()
        );
    }

    #[test]
    fn sylow_of_z4_times_z3() {
        let g =
            Group::product(vec![Group::cyclic(4).unwrap(), Group::cyclic(3).unwrap()]).unwrap();
        let parts = g.sylow_decomposition().unwrap();
        assert_eq!(parts[0].0, 2);
        assert_eq!(parts[0].1.len(), 4);
        assert!(parts[0]
            .1
            .iter()
            .all(|e| matches!(e, Elem::Tuple(t) if t[1] == Elem::Residue(0))));
        assert_eq!(parts[1].0, 3);
        assert_eq!(parts[1].1.len(), 3);
    }

    #[test]
    fn sylow_of_ut3_mod2_times_z3() {
        let g = Group::product(vec![
            Group::unitriangular(3, Some(2)).unwrap(),
            Group::cyclic(3).unwrap(),
        ])
        .unwrap();
        let parts = g.sylow_decomposition().unwrap();
        assert_eq!(parts[0].0, 2);
        assert_eq!(parts[0].1.len(), 8);
        assert_eq!(parts[1].0, 3);
        assert_eq!(parts[1].1.len(), 3);
        // oracle: p-part = elements whose order is a power of p
        for (p, part) in &parts {
            for e in g.enumerate().unwrap() {
                let ord = g.elem_order(&e, 64).unwrap();
                let mut q = ord;
                while q % p == 0 {
                    q /= p;
                }
                assert_eq!(part.contains(&e), q == 1, "p={p} order={ord}");
            }
        }
    }

    #[test]
    fn sylow_rejects_non_nilpotent() {
        let g = symmetric_group_3();
        assert!(matches!(
            g.sylow_decomposition(),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn group_laws_on_finite_backends() {
        let backends = vec![
            Group::unitriangular(3, Some(2)).unwrap(),
            Group::cyclic(12).unwrap(),
            Group::product(vec![Group::cyclic(4).unwrap(), Group::cyclic(3).unwrap()]).unwrap(),
            symmetric_group_3(),
        ];
        for g in backends {
            let all = g.enumerate().unwrap();
            assert!(all.len() <= 64);
            for a in &all {
                assert_eq!(g.mul(a, &g.identity()), *a);
                assert_eq!(g.mul(&g.inv(a), a), g.identity());
                for b in &all {
                    for c in &all {
                        assert_eq!(g.mul(&g.mul(a, b), c), g.mul(a, &g.mul(b, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn enumeration_closed_under_ops() {
        let g = Group::unitriangular(3, Some(3)).unwrap();
        let all: BTreeSet<Elem> = g.enumerate().unwrap().into_iter().collect();
        assert_eq!(all.len(), 27);
        for a in &all {
            assert!(all.contains(&g.inv(a)));
            for b in &all {
                assert!(all.contains(&g.mul(a, b)));
            }
        }
    }

    #[test]
    fn table_group_validation_rejects_bad_tables() {
        assert!(TableGroup::new(2, vec![0, 1, 1, 1]).is_err());
        assert!(TableGroup::new(2, vec![0, 0, 0, 0]).is_err());
        assert!(TableGroup::new(2, vec![0, 1, 1, 0]).is_ok());
    }

    #[test]
    fn to_table_round_trips_structure() {
        let g = Group::unitriangular(3, Some(2)).unwrap();
        let (tg, elems) = g.to_table().unwrap();
        assert_eq!(elems.len(), 8);
        let chain = tg.lower_central_series().unwrap();
        assert_eq!(chain.step(), Some(2));
    }

    #[test]
    fn subset_flags() {
        let g = Group::cyclic(6).unwrap();
        let s = Subset::new(
            &g,
            [Elem::Residue(0), Elem::Residue(1), Elem::Residue(5)]
                .into_iter()
                .collect(),
        );
        assert!(s.symmetric);
        assert!(s.contains_identity);
        let t = Subset::new(&g, [Elem::Residue(1)].into_iter().collect());
        assert!(!t.symmetric);
        assert!(!t.contains_identity);
    }
}
