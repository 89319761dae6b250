//! Text formats shared by the CLI and the library: the word grammar, the
//! group-spec grammar, element and set-file encodings, and deterministic
//! key=value reports.
//!
//! Word grammar:
//! ```text
//! commutator := letter | "[" commutator "," commutator "]"
//! letter     := "x" integer
//! occurrence := commutator ["^-1"]
//! word       := occurrence { whitespace occurrence }
//! ```
//!
//! Group specs: `ut:N`, `ut:N:mod=M`, `cyclic:N`,
//! `product:<spec>,<spec>,...` (parenthesise nested products), and
//! `table:<file>` where the file holds N followed by N*N row-major indices.
//!
//! Set files: one element per line, `#` starts a comment. Matrix elements are
//! row-major integer lists, cyclic elements single integers, table elements
//! single indices, product elements the concatenation of their components.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;

use crate::commutator::FormalCommutator;
use crate::error::{Error, Result};
use crate::group::{Elem, Group, TableGroup};
use crate::word::{Occurrence, Sign, Word};

struct Cursor<'a> {
    text: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor {
            text,
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn col(&self) -> usize {
        self.pos + 1
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        Some(b)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ') | Some(b'\t')) {
            self.pos += 1;
        }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: 1,
            col: self.col(),
            message: message.into(),
        }
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        match self.peek() {
            Some(c) if c == b => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => Err(self.error(format!(
                "expected '{}', found '{}'",
                b as char, c as char
            ))),
            None => Err(self.error(format!("expected '{}', found end of input", b as char))),
        }
    }

    fn integer(&mut self) -> Result<usize> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        self.text[start..self.pos]
            .parse()
            .map_err(|_| self.error("integer out of range"))
    }
}

fn parse_commutator(c: &mut Cursor) -> Result<FormalCommutator> {
    match c.peek() {
        Some(b'x') => {
            c.bump();
            let i = c.integer()?;
            if i == 0 {
                return Err(c.error("generator indices start at 1"));
            }
            Ok(FormalCommutator::letter(i))
        }
        Some(b'[') => {
            c.bump();
            let left = parse_commutator(c)?;
            c.skip_ws();
            c.expect(b',')?;
            c.skip_ws();
            let right = parse_commutator(c)?;
            c.skip_ws();
            c.expect(b']')?;
            Ok(FormalCommutator::bracket(left, right))
        }
        Some(other) => Err(c.error(format!(
            "expected 'x' or '[', found '{}'",
            other as char
        ))),
        None => Err(c.error("expected a commutator, found end of input")),
    }
}

/// Parse a word in the shared grammar. Occurrences of weight above `step`
/// are dropped, as in `Word::new`.
pub fn parse_word(text: &str, rank: usize, step: usize) -> Result<Word> {
    let mut cursor = Cursor::new(text);
    let mut occs = Vec::new();
    loop {
        cursor.skip_ws();
        if cursor.peek().is_none() {
            break;
        }
        let commutator = parse_commutator(&mut cursor)?;
        let mut sign = Sign::Plus;
        if cursor.peek() == Some(b'^') {
            cursor.bump();
            cursor.expect(b'-')?;
            cursor.expect(b'1')?;
            sign = Sign::Minus;
        }
        if let Some(b) = cursor.peek() {
            if b != b' ' && b != b'\t' {
                return Err(cursor.error(format!("unexpected character '{}'", b as char)));
            }
        }
        occs.push(Occurrence::new(commutator, sign));
    }
    Word::new(rank, step, occs)
}

/// Render a word in the shared grammar; `parse_word(render(w))` round-trips.
pub fn render_word(word: &Word) -> String {
    word.to_string()
}

/// Parse a group spec. `table:` specs receive the file content through
/// `table_loader` keyed by the path.
pub fn parse_group_spec(spec: &str, table_loader: &dyn Fn(&str) -> Result<String>) -> Result<Group> {
    let spec = spec.trim();
    if let Some(rest) = spec.strip_prefix("ut:") {
        let mut parts = rest.split(':');
        let dim: usize = parts
            .next()
            .unwrap_or("")
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad dimension in '{spec}'")))?;
        let mut modulus = None;
        for p in parts {
            if let Some(m) = p.strip_prefix("mod=") {
                modulus = Some(
                    m.parse()
                        .map_err(|_| Error::InvalidInput(format!("bad modulus in '{spec}'")))?,
                );
            } else {
                return Err(Error::InvalidInput(format!("unknown option '{p}' in '{spec}'")));
            }
        }
        return Group::unitriangular(dim, modulus);
    }
    if let Some(rest) = spec.strip_prefix("cyclic:") {
        let n: u64 = rest
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad order in '{spec}'")))?;
        return Group::cyclic(n);
    }
    if let Some(rest) = spec.strip_prefix("product:") {
        let mut factors = Vec::new();
        let mut depth = 0usize;
        let mut start = 0usize;
        let bytes = rest.as_bytes();
        for (i, &b) in bytes.iter().enumerate() {
            match b {
                b'(' => depth += 1,
                b')' => {
                    depth = depth
                        .checked_sub(1)
                        .ok_or_else(|| Error::InvalidInput("unbalanced ')' in spec".into()))?;
                }
                b',' if depth == 0 => {
                    factors.push(&rest[start..i]);
                    start = i + 1;
                }
                _ => {}
            }
        }
        factors.push(&rest[start..]);
        let parsed: Result<Vec<Group>> = factors
            .into_iter()
            .map(|f| {
                let f = f.trim();
                let f = f
                    .strip_prefix('(')
                    .and_then(|x| x.strip_suffix(')'))
                    .unwrap_or(f);
                parse_group_spec(f, table_loader)
            })
            .collect();
        return Group::product(parsed?);
    }
    if let Some(path) = spec.strip_prefix("table:") {
        let content = table_loader(path)?;
        return parse_table_file(&content);
    }
    Err(Error::InvalidInput(format!("unknown group spec '{spec}'")))
}

/// Parse a group spec that does not reference table files.
pub fn parse_group_spec_simple(spec: &str) -> Result<Group> {
    parse_group_spec(spec, &|path| {
        Err(Error::InvalidInput(format!(
            "table file '{path}' not available in this context"
        )))
    })
}

/// A table file: N followed by N*N space-separated row-major indices.
pub fn parse_table_file(content: &str) -> Result<Group> {
    let mut nums = content
        .split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::InvalidInput(format!("bad table entry '{t}'")))
        })
        .collect::<Result<Vec<usize>>>()?
        .into_iter();
    let n = nums
        .next()
        .ok_or_else(|| Error::InvalidInput("empty table file".into()))?;
    let table: Vec<usize> = nums.collect();
    if table.len() != n * n {
        return Err(Error::InvalidInput(format!(
            "table file must hold {n}*{n} entries after the order"
        )));
    }
    Ok(Group::Table(std::sync::Arc::new(TableGroup::new(n, table)?)))
}

/// Render an element as a flat integer list understood by `parse_elem`.
pub fn render_elem(group: &Group, e: &Elem) -> String {
    let mut out = String::new();
    write_elem(group, e, &mut out);
    out
}

fn write_elem(group: &Group, e: &Elem, out: &mut String) {
    match (group, e) {
        (Group::Unitriangular { .. }, Elem::Matrix { entries, .. }) => {
            for (i, v) in entries.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{v}");
            }
        }
        (Group::Cyclic { .. }, Elem::Residue(r)) => {
            let _ = write!(out, "{r}");
        }
        (Group::Table(_), Elem::Index(i)) => {
            let _ = write!(out, "{i}");
        }
        (Group::Product(fs), Elem::Tuple(xs)) => {
            for (i, (f, x)) in fs.iter().zip(xs).enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                write_elem(f, x, out);
            }
        }
        _ => panic!("element shape does not match backend"),
    }
}

/// Parse one element from a flat integer token list, shaped by the group.
pub fn parse_elem(group: &Group, line: &str) -> Result<Elem> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    let (elem, used) = parse_elem_tokens(group, &tokens)?;
    if used != tokens.len() {
        return Err(Error::InvalidInput(format!(
            "trailing tokens after element: '{line}'"
        )));
    }
    group.validate_elem(&elem)?;
    Ok(elem)
}

fn parse_elem_tokens(group: &Group, tokens: &[&str]) -> Result<(Elem, usize)> {
    match group {
        Group::Unitriangular { dim, modulus } => {
            let need = dim * dim;
            if tokens.len() < need {
                return Err(Error::InvalidInput(format!(
                    "matrix element needs {need} integers"
                )));
            }
            let mut entries = Vec::with_capacity(need);
            for t in &tokens[..need] {
                let mut v = BigInt::from_str(t)
                    .map_err(|_| Error::InvalidInput(format!("bad integer '{t}'")))?;
                if let Some(m) = modulus {
                    let m = BigInt::from(*m);
                    v = ((v % &m) + &m) % &m;
                }
                entries.push(v);
            }
            Ok((
                Elem::Matrix {
                    dim: *dim,
                    entries,
                },
                need,
            ))
        }
        Group::Cyclic { modulus } => {
            let t = tokens
                .first()
                .ok_or_else(|| Error::InvalidInput("missing residue".into()))?;
            let v = i128::from_str(t)
                .map_err(|_| Error::InvalidInput(format!("bad integer '{t}'")))?;
            let m = *modulus as i128;
            Ok((Elem::Residue(((v % m + m) % m) as u64), 1))
        }
        Group::Table(_) => {
            let t = tokens
                .first()
                .ok_or_else(|| Error::InvalidInput("missing index".into()))?;
            let v = usize::from_str(t)
                .map_err(|_| Error::InvalidInput(format!("bad index '{t}'")))?;
            Ok((Elem::Index(v), 1))
        }
        Group::Product(fs) => {
            let mut used = 0;
            let mut parts = Vec::with_capacity(fs.len());
            for f in fs {
                let (e, n) = parse_elem_tokens(f, &tokens[used..])?;
                parts.push(e);
                used += n;
            }
            Ok((Elem::Tuple(parts), used))
        }
    }
}

/// Parse a set file: one element per line, `#` comments, blank lines ignored.
pub fn parse_set_file(group: &Group, content: &str) -> Result<BTreeSet<Elem>> {
    let mut out = BTreeSet::new();
    for (lineno, raw) in content.lines().enumerate() {
        let line = match raw.find('#') {
            Some(idx) => &raw[..idx],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let elem = parse_elem(group, line).map_err(|e| match e {
            Error::InvalidInput(m) => Error::Parse {
                line: lineno + 1,
                col: 1,
                message: m,
            },
            other => other,
        })?;
        out.insert(elem);
    }
    Ok(out)
}

/// Render a set, one element per line in canonical order.
pub fn render_set(group: &Group, set: &BTreeSet<Elem>) -> String {
    let mut out = String::new();
    for e in set {
        out.push_str(&render_elem(group, e));
        out.push('\n');
    }
    out
}

/// An ordered, byte-deterministic key=value report.
#[derive(Clone, Debug, Default)]
pub struct Report {
    lines: Vec<String>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn kv(&mut self, key: &str, value: impl std::fmt::Display) {
        self.lines.push(format!("{key}={value}"));
    }

    pub fn raw(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    pub fn extend(&mut self, other: Report) {
        self.lines.extend(other.lines);
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for l in &self.lines {
            out.push_str(l);
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_two_occurrences() {
        let w = parse_word("x1 x2^-1", 2, 2).unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!(render_word(&w), "x1 x2^-1");
    }

    #[test]
    fn parse_nested_commutator() {
        let w = parse_word("[x1,[x2,x3]]", 3, 3).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w.occurrences()[0].commutator.weight(), 3);
    }

    #[test]
    fn parse_reports_column_of_unbalanced_bracket() {
        let err = parse_word("[x1,x2", 2, 2).unwrap_err();
        match err {
            Error::Parse { col, .. } => assert_eq!(col, 7),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_normalizes_whitespace_only() {
        let w = parse_word("  x1   [x2, x1]^-1 ", 2, 2).unwrap();
        assert_eq!(render_word(&w), "x1 [x2,x1]^-1");
    }

    #[test]
    fn group_specs_parse() {
        assert!(matches!(
            parse_group_spec_simple("ut:3").unwrap(),
            Group::Unitriangular { dim: 3, modulus: None }
        ));
        assert!(matches!(
            parse_group_spec_simple("ut:4:mod=2").unwrap(),
            Group::Unitriangular {
                dim: 4,
                modulus: Some(2)
            }
        ));
        assert!(matches!(
            parse_group_spec_simple("cyclic:6").unwrap(),
            Group::Cyclic { modulus: 6 }
        ));
        let p = parse_group_spec_simple("product:ut:3:mod=2,cyclic:3").unwrap();
        match p {
            Group::Product(fs) => assert_eq!(fs.len(), 2),
            other => panic!("expected product, got {other:?}"),
        }
        let nested = parse_group_spec_simple("product:(product:cyclic:2,cyclic:2),cyclic:3");
        match nested.unwrap() {
            Group::Product(fs) => {
                assert_eq!(fs.len(), 2);
                assert!(matches!(fs[0], Group::Product(_)));
            }
            other => panic!("expected product, got {other:?}"),
        }
        assert!(parse_group_spec_simple("frobnicate:9").is_err());
    }

    #[test]
    fn element_round_trip() {
        let g = parse_group_spec_simple("product:ut:3:mod=3,cyclic:4").unwrap();
        let gens = g.standard_generators();
        let e = g.mul(&gens[0], &gens[2]);
        let text = render_elem(&g, &e);
        assert_eq!(parse_elem(&g, &text).unwrap(), e);
    }

    #[test]
    fn set_file_with_comments() {
        let g = Group::cyclic(6).unwrap();
        let set = parse_set_file(&g, "# header\n0\n3 # inline\n\n-1\n").unwrap();
        let expected: BTreeSet<Elem> = [Elem::Residue(0), Elem::Residue(3), Elem::Residue(5)]
            .into_iter()
            .collect();
        assert_eq!(set, expected);
    }

    #[test]
    fn table_file_round_trip() {
        let g = parse_table_file("2\n0 1\n1 0\n").unwrap();
        assert_eq!(g.order(), Some(2));
    }

    #[test]
    fn report_renders_in_order() {
        let mut r = Report::new();
        r.kv("alpha", 1);
        r.kv("beta", "two");
        assert_eq!(r.render(), "alpha=1\nbeta=two\n");
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn word_text_round_trips(seed in proptest::collection::vec((1usize..=3, any::<bool>()), 0..8)) {
                let occs: Vec<(usize, Sign)> = seed
                    .iter()
                    .map(|&(i, neg)| (i, if neg { Sign::Minus } else { Sign::Plus }))
                    .collect();
                let w = Word::from_letters(3, 3, &occs).unwrap();
                let text = render_word(&w);
                let reparsed = parse_word(&text, 3, 3).unwrap();
                prop_assert_eq!(w, reparsed);
            }
        }
    }
}
