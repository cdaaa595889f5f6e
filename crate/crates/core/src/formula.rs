//! Boolean formulas over atoms "position i carries symbol a", with depth
//! accounting, plus the divide-and-conquer formula library (fixed words,
//! increment relations, tail append, constant sums).
//!
//! Control positions may carry distinct alphabets; the uniform case is the
//! common one. `OrDisjoint` marks a union the builder guarantees to be
//! disjoint as raw sets, which the compiler turns into a plain concatenation
//! (the three-factor union rule with an empty intersection word).

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("position {0} out of range (space has {1} positions)")]
    PositionOutOfRange(usize, usize),
    #[error("symbol {0} out of range at position {1}")]
    SymbolOutOfRange(usize, usize),
    #[error("unknown symbol name {0:?} at position {1}")]
    UnknownSymbol(String, usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("blocks must have equal length")]
    BlockLength,
}

/// Alphabet of one control position; symbols are indexed, names are for the
/// text format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CtrlAlphabet {
    pub symbols: Vec<String>,
}

impl CtrlAlphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> CtrlAlphabet {
        CtrlAlphabet {
            symbols: symbols.into_iter().map(Into::into).collect(),
        }
    }

    pub fn binary() -> CtrlAlphabet {
        CtrlAlphabet::new(["0", "1"])
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == name)
    }
}

/// The control word space: one alphabet per position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControlSpace {
    pub alphabets: Vec<CtrlAlphabet>,
}

impl ControlSpace {
    pub fn uniform(n: usize, alphabet: CtrlAlphabet) -> ControlSpace {
        ControlSpace {
            alphabets: vec![alphabet; n],
        }
    }

    pub fn binary(n: usize) -> ControlSpace {
        ControlSpace::uniform(n, CtrlAlphabet::binary())
    }

    pub fn positions(&self) -> usize {
        self.alphabets.len()
    }

    pub fn size_at(&self, pos: usize) -> usize {
        self.alphabets[pos].len()
    }

    pub fn max_alphabet(&self) -> usize {
        self.alphabets.iter().map(|a| a.len()).max().unwrap_or(0)
    }

    /// Number of control words, saturating at `u64::MAX`.
    pub fn word_count(&self) -> u64 {
        self.alphabets
            .iter()
            .fold(1u64, |acc, a| acc.saturating_mul(a.len() as u64))
    }

    /// Iterates all control words in lexicographic order (last position
    /// fastest).
    pub fn words(&self) -> ControlWords<'_> {
        ControlWords {
            space: self,
            current: Some(vec![0; self.positions()]),
        }
    }

    pub fn contains(&self, word: &[usize]) -> bool {
        word.len() == self.positions() && word.iter().enumerate().all(|(i, &s)| s < self.size_at(i))
    }
}

pub struct ControlWords<'a> {
    space: &'a ControlSpace,
    current: Option<Vec<usize>>,
}

impl<'a> Iterator for ControlWords<'a> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.current.take()?;
        if cur.iter().any(|&_x| false) {
            return None;
        }
        let mut next = cur.clone();
        let mut pos = next.len();
        loop {
            if pos == 0 {
                self.current = None;
                break;
            }
            pos -= 1;
            if self.space.size_at(pos) == 0 {
                self.current = None;
                break;
            }
            next[pos] += 1;
            if next[pos] < self.space.size_at(pos) {
                self.current = Some(next);
                break;
            }
            next[pos] = 0;
        }
        if self.space.alphabets.iter().any(|a| a.is_empty()) {
            self.current = None;
            return None;
        }
        Some(cur)
    }
}

/// Boolean formula over position/symbol atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoolFormula {
    Atom { position: usize, symbol: usize },
    Not(Box<BoolFormula>),
    And(Box<BoolFormula>, Box<BoolFormula>),
    Or(Box<BoolFormula>, Box<BoolFormula>),
    /// Union of operands the *builder* guarantees disjoint over raw words.
    OrDisjoint(Box<BoolFormula>, Box<BoolFormula>),
}

impl BoolFormula {
    pub fn atom(position: usize, symbol: usize) -> BoolFormula {
        BoolFormula::Atom { position, symbol }
    }

    pub fn not(f: BoolFormula) -> BoolFormula {
        BoolFormula::Not(Box::new(f))
    }

    pub fn and(a: BoolFormula, b: BoolFormula) -> BoolFormula {
        BoolFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: BoolFormula, b: BoolFormula) -> BoolFormula {
        BoolFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn or_disjoint(a: BoolFormula, b: BoolFormula) -> BoolFormula {
        BoolFormula::OrDisjoint(Box::new(a), Box::new(b))
    }

    pub fn eval(&self, word: &[usize]) -> bool {
        match self {
            BoolFormula::Atom { position, symbol } => word[*position] == *symbol,
            BoolFormula::Not(f) => !f.eval(word),
            BoolFormula::And(a, b) => a.eval(word) && b.eval(word),
            BoolFormula::Or(a, b) | BoolFormula::OrDisjoint(a, b) => a.eval(word) || b.eval(word),
        }
    }

    /// Depth = longest leaf-to-root path in connectives; a bare atom has
    /// depth 0.
    pub fn depth(&self) -> usize {
        match self {
            BoolFormula::Atom { .. } => 0,
            BoolFormula::Not(f) => 1 + f.depth(),
            BoolFormula::And(a, b) | BoolFormula::Or(a, b) | BoolFormula::OrDisjoint(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    pub fn atom_count(&self) -> usize {
        match self {
            BoolFormula::Atom { .. } => 1,
            BoolFormula::Not(f) => f.atom_count(),
            BoolFormula::And(a, b) | BoolFormula::Or(a, b) | BoolFormula::OrDisjoint(a, b) => {
                a.atom_count() + b.atom_count()
            }
        }
    }

    pub fn validate(&self, space: &ControlSpace) -> Result<(), FormulaError> {
        match self {
            BoolFormula::Atom { position, symbol } => {
                if *position >= space.positions() {
                    return Err(FormulaError::PositionOutOfRange(*position, space.positions()));
                }
                if *symbol >= space.size_at(*position) {
                    return Err(FormulaError::SymbolOutOfRange(*symbol, *position));
                }
                Ok(())
            }
            BoolFormula::Not(f) => f.validate(space),
            BoolFormula::And(a, b) | BoolFormula::Or(a, b) | BoolFormula::OrDisjoint(a, b) => {
                a.validate(space)?;
                b.validate(space)
            }
        }
    }

    /// Checks the disjointness promise of every `OrDisjoint` node by brute
    /// enumeration; meant for tests on small spaces.
    pub fn check_disjointness(&self, space: &ControlSpace) -> bool {
        match self {
            BoolFormula::Atom { .. } => true,
            BoolFormula::Not(f) => f.check_disjointness(space),
            BoolFormula::And(a, b) | BoolFormula::Or(a, b) => {
                a.check_disjointness(space) && b.check_disjointness(space)
            }
            BoolFormula::OrDisjoint(a, b) => {
                a.check_disjointness(space)
                    && b.check_disjointness(space)
                    && space.words().all(|w| !(a.eval(&w) && b.eval(&w)))
            }
        }
    }

    pub fn to_sexpr(&self, space: &ControlSpace) -> String {
        let mut out = String::new();
        self.write_sexpr(space, &mut out);
        out
    }

    fn write_sexpr(&self, space: &ControlSpace, out: &mut String) {
        match self {
            BoolFormula::Atom { position, symbol } => {
                let name = &space.alphabets[*position].symbols[*symbol];
                out.push_str(&format!("(atom {position} {name})"));
            }
            BoolFormula::Not(f) => {
                out.push_str("(not ");
                f.write_sexpr(space, out);
                out.push(')');
            }
            BoolFormula::And(a, b) => {
                out.push_str("(and ");
                a.write_sexpr(space, out);
                out.push(' ');
                b.write_sexpr(space, out);
                out.push(')');
            }
            BoolFormula::Or(a, b) => {
                out.push_str("(or ");
                a.write_sexpr(space, out);
                out.push(' ');
                b.write_sexpr(space, out);
                out.push(')');
            }
            BoolFormula::OrDisjoint(a, b) => {
                out.push_str("(or* ");
                a.write_sexpr(space, out);
                out.push(' ');
                b.write_sexpr(space, out);
                out.push(')');
            }
        }
    }
}

impl fmt::Display for BoolFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoolFormula::Atom { position, symbol } => write!(f, "(atom {position} #{symbol})"),
            BoolFormula::Not(x) => write!(f, "(not {x})"),
            BoolFormula::And(a, b) => write!(f, "(and {a} {b})"),
            BoolFormula::Or(a, b) => write!(f, "(or {a} {b})"),
            BoolFormula::OrDisjoint(a, b) => write!(f, "(or* {a} {b})"),
        }
    }
}

/// Parses the s-expression formula format, resolving symbol names against
/// the space: `(and (atom 0 a) (not (atom 3 #)))`.
pub fn parse_sexpr(space: &ControlSpace, input: &str) -> Result<BoolFormula, FormulaError> {
    let tokens = tokenize(input)?;
    let mut pos = 0;
    let f = parse_node(space, &tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(FormulaError::Parse("trailing tokens".into()));
    }
    f.validate(space)?;
    Ok(f)
}

fn tokenize(input: &str) -> Result<Vec<String>, FormulaError> {
    let mut tokens = Vec::new();
    let mut cur = String::new();
    for ch in input.chars() {
        match ch {
            '(' | ')' => {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
                tokens.push(ch.to_string());
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    Ok(tokens)
}

fn parse_node(
    space: &ControlSpace,
    tokens: &[String],
    pos: &mut usize,
) -> Result<BoolFormula, FormulaError> {
    let expect = |pos: &mut usize, what: &str| -> Result<String, FormulaError> {
        let t = tokens
            .get(*pos)
            .ok_or_else(|| FormulaError::Parse(format!("expected {what}, got end of input")))?;
        *pos += 1;
        Ok(t.clone())
    };
    let open = expect(pos, "(")?;
    if open != "(" {
        return Err(FormulaError::Parse(format!("expected '(', got {open:?}")));
    }
    let head = expect(pos, "operator")?;
    let node = match head.as_str() {
        "atom" => {
            let p: usize = expect(pos, "position")?
                .parse()
                .map_err(|_| FormulaError::Parse("bad atom position".into()))?;
            let name = expect(pos, "symbol")?;
            if p >= space.positions() {
                return Err(FormulaError::PositionOutOfRange(p, space.positions()));
            }
            let s = space.alphabets[p]
                .index_of(&name)
                .ok_or_else(|| FormulaError::UnknownSymbol(name.clone(), p))?;
            BoolFormula::atom(p, s)
        }
        "not" => BoolFormula::not(parse_node(space, tokens, pos)?),
        "and" => {
            let a = parse_node(space, tokens, pos)?;
            let b = parse_node(space, tokens, pos)?;
            BoolFormula::and(a, b)
        }
        "or" => {
            let a = parse_node(space, tokens, pos)?;
            let b = parse_node(space, tokens, pos)?;
            BoolFormula::or(a, b)
        }
        "or*" => {
            let a = parse_node(space, tokens, pos)?;
            let b = parse_node(space, tokens, pos)?;
            BoolFormula::or_disjoint(a, b)
        }
        other => return Err(FormulaError::Parse(format!("unknown operator {other:?}"))),
    };
    let close = expect(pos, ")")?;
    if close != ")" {
        return Err(FormulaError::Parse(format!("expected ')', got {close:?}")));
    }
    Ok(node)
}

// ---------------------------------------------------------------------------
// Balanced combinators
// ---------------------------------------------------------------------------

fn balanced(mut items: Vec<BoolFormula>, join: fn(BoolFormula, BoolFormula) -> BoolFormula) -> BoolFormula {
    assert!(!items.is_empty(), "balanced combinator needs at least one operand");
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len().div_ceil(2));
        let mut it = items.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(join(a, b)),
                None => next.push(a),
            }
        }
        items = next;
    }
    items.pop().unwrap()
}

pub fn and_all(items: Vec<BoolFormula>) -> BoolFormula {
    balanced(items, BoolFormula::and)
}

pub fn or_all(items: Vec<BoolFormula>) -> BoolFormula {
    balanced(items, BoolFormula::or)
}

/// Balanced union of operands that are pairwise disjoint as raw sets.
pub fn or_disjoint_all(items: Vec<BoolFormula>) -> BoolFormula {
    balanced(items, BoolFormula::or_disjoint)
}

/// Unsatisfiable formula (the compiler maps it to the empty word through
/// the commutator rule).
pub fn contradiction() -> BoolFormula {
    BoolFormula::and(BoolFormula::atom(0, 0), BoolFormula::not(BoolFormula::atom(0, 0)))
}

/// "position carries one of `symbols`"; distinct symbols at one position are
/// disjoint.
pub fn position_in(position: usize, symbols: &[usize]) -> BoolFormula {
    if symbols.is_empty() {
        return contradiction();
    }
    or_disjoint_all(symbols.iter().map(|&s| BoolFormula::atom(position, s)).collect())
}

/// Satisfied exactly by the given word on the given positions.
pub fn fixed_word(positions: &[usize], word: &[usize]) -> BoolFormula {
    assert_eq!(positions.len(), word.len());
    assert!(!positions.is_empty());
    and_all(
        positions
            .iter()
            .zip(word)
            .map(|(&p, &s)| BoolFormula::atom(p, s))
            .collect(),
    )
}

/// Every listed position carries a symbol from `allowed`.
pub fn all_in_set(positions: &[usize], allowed: &[usize]) -> BoolFormula {
    assert!(!positions.is_empty());
    and_all(positions.iter().map(|&p| position_in(p, allowed)).collect())
}

/// Subsequences along `left` and `right` are equal, comparing symbols drawn
/// from `alphabet` (symbol indices).
pub fn eq_positions(left: &[usize], right: &[usize], alphabet: &[usize]) -> BoolFormula {
    assert_eq!(left.len(), right.len());
    assert!(!left.is_empty());
    and_all(
        left.iter()
            .zip(right)
            .map(|(&i, &j)| {
                or_disjoint_all(
                    alphabet
                        .iter()
                        .map(|&s| BoolFormula::and(BoolFormula::atom(i, s), BoolFormula::atom(j, s)))
                        .collect(),
                )
            })
            .collect(),
    )
}

/// Each position pair carries a symbol pair from `allowed`.
pub fn pairs_in(left: &[usize], right: &[usize], allowed: &[(usize, usize)]) -> BoolFormula {
    assert_eq!(left.len(), right.len());
    assert!(!left.is_empty());
    and_all(
        left.iter()
            .zip(right)
            .map(|(&i, &j)| {
                if allowed.is_empty() {
                    return contradiction();
                }
                or_disjoint_all(
                    allowed
                        .iter()
                        .map(|&(a, b)| {
                            BoolFormula::and(BoolFormula::atom(i, a), BoolFormula::atom(j, b))
                        })
                        .collect(),
                )
            })
            .collect(),
    )
}

/// `a ⟹ b` as the disjoint union `¬a ⊔ (a ∧ b)`.
pub fn implies(a: BoolFormula, b: BoolFormula) -> BoolFormula {
    BoolFormula::or_disjoint(BoolFormula::not(a.clone()), BoolFormula::and(a, b))
}

// ---------------------------------------------------------------------------
// Increment relations (block form)
// ---------------------------------------------------------------------------

/// Unary increment over symbol *sets*: the `u` block reads as
/// `zero^n one^(m-n)` and the `v` block as `zero^(n+1) one^(m-n-1)`.
/// Recursion: left halves all zero and right halves increment, or right
/// halves all one and left halves increment (the branches are disjoint).
pub fn unary_increment_blocks(
    u: &[usize],
    v: &[usize],
    zeros: &[usize],
    ones: &[usize],
) -> BoolFormula {
    assert_eq!(u.len(), v.len());
    let m = u.len();
    assert!(m >= 1);
    if m == 1 {
        return BoolFormula::and(position_in(u[0], ones), position_in(v[0], zeros));
    }
    let half = m.div_ceil(2);
    let (ul, ur) = u.split_at(half);
    let (vl, vr) = v.split_at(half);
    let branch_a = and_all(vec![
        all_in_set(ul, zeros),
        all_in_set(vl, zeros),
        unary_increment_blocks(ur, vr, zeros, ones),
    ]);
    let branch_b = and_all(vec![
        all_in_set(ur, ones),
        all_in_set(vr, ones),
        unary_increment_blocks(ul, vl, zeros, ones),
    ]);
    BoolFormula::or_disjoint(branch_a, branch_b)
}

/// Binary increment, least significant bit first, no wraparound:
/// `u = bin_m(n)`, `v = bin_m(n+1)` for `n + 1 < 2^m`. `zero`/`one` are the
/// symbol indices of the bits.
pub fn binary_increment_blocks(u: &[usize], v: &[usize], zero: usize, one: usize) -> BoolFormula {
    assert_eq!(u.len(), v.len());
    let m = u.len();
    assert!(m >= 1);
    if m == 1 {
        return BoolFormula::and(BoolFormula::atom(u[0], zero), BoolFormula::atom(v[0], one));
    }
    let half = m.div_ceil(2);
    let (ul, ur) = u.split_at(half);
    let (vl, vr) = v.split_at(half);
    // Low halves are the left split (LSB first).
    let no_carry = and_all(vec![
        binary_increment_blocks(ul, vl, zero, one),
        eq_positions(ur, vr, &[zero, one]),
    ]);
    let carry = and_all(vec![
        all_in_set(ul, &[one]),
        all_in_set(vl, &[zero]),
        binary_increment_blocks(ur, vr, zero, one),
    ]);
    BoolFormula::or_disjoint(no_carry, carry)
}

/// Tail-append relation over two blocks: `u = x pad^j`, `v = x a pad^(j-1)`
/// with `x` over `bits` and `j ≥ 1`.
pub fn tail_append_blocks(
    u: &[usize],
    v: &[usize],
    bits: &[usize],
    pad: usize,
    appended: usize,
) -> BoolFormula {
    assert_eq!(u.len(), v.len());
    assert!(!u.is_empty());
    let shape = unary_increment_blocks(u, v, bits, &[pad]);
    let mut allowed: Vec<(usize, usize)> = bits.iter().map(|&b| (b, b)).collect();
    allowed.push((pad, appended));
    if !bits.contains(&pad) {
        allowed.push((pad, pad));
    }
    BoolFormula::and(shape, pairs_in(u, v, &allowed))
}

/// Constant-sum relation: blocks `b_1 .. b_d` (each `m` bits, LSB first)
/// carry numbers summing to `target`.
pub fn sum_blocks(blocks: &[&[usize]], target: u64, zero: usize, one: usize) -> BoolFormula {
    assert!(!blocks.is_empty());
    let m = blocks[0].len();
    assert!(blocks.iter().all(|b| b.len() == m));
    if blocks.len() == 1 {
        let max = (1u64 << m) - 1;
        if target > max {
            return contradiction();
        }
        let word: Vec<usize> = (0..m)
            .map(|i| if (target >> i) & 1 == 1 { one } else { zero })
            .collect();
        return fixed_word(blocks[0], &word);
    }
    let half = blocks.len() / 2;
    let (left, right) = blocks.split_at(half);
    let max_of = |bs: &[&[usize]]| bs.len() as u64 * ((1u64 << m) - 1);
    let lo = target.saturating_sub(max_of(right));
    let hi = target.min(max_of(left));
    if lo > hi {
        return contradiction();
    }
    or_disjoint_all(
        (lo..=hi)
            .map(|l| {
                BoolFormula::and(
                    sum_blocks(left, l, zero, one),
                    sum_blocks(right, target - l, zero, one),
                )
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(space: &ControlSpace, f: &BoolFormula) -> Vec<Vec<usize>> {
        space.words().filter(|w| f.eval(w)).collect()
    }

    #[test]
    fn word_enumeration_order() {
        let space = ControlSpace::binary(2);
        let words: Vec<_> = space.words().collect();
        assert_eq!(words, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn sexpr_round_trip() {
        let space = ControlSpace::uniform(4, CtrlAlphabet::new(["a", "b", "#"]));
        let f = BoolFormula::and(
            BoolFormula::atom(0, 0),
            BoolFormula::not(BoolFormula::atom(3, 2)),
        );
        let s = f.to_sexpr(&space);
        assert_eq!(s, "(and (atom 0 a) (not (atom 3 #)))");
        assert_eq!(parse_sexpr(&space, &s).unwrap(), f);
    }

    #[test]
    fn fixed_word_satisfying_set() {
        let space = ControlSpace::binary(3);
        let f = fixed_word(&[0, 1, 2], &[1, 0, 1]);
        assert_eq!(brute(&space, &f), vec![vec![1, 0, 1]]);
        assert!(f.depth() <= 3usize.ilog2() as usize + 2);
    }

    #[test]
    fn unary_increment_exact_language() {
        // unary_m(n) = 0^n 1^(m-n); pairs n -> n+1 for n in [0, m).
        for m in [1usize, 2, 3, 4, 5] {
            let space = ControlSpace::binary(2 * m);
            let u: Vec<usize> = (0..m).collect();
            let v: Vec<usize> = (m..2 * m).collect();
            let f = unary_increment_blocks(&u, &v, &[0], &[1]);
            assert!(f.check_disjointness(&space), "m={m}");
            let mut want = Vec::new();
            for n in 0..m {
                let mut w = vec![0usize; 2 * m];
                for (i, item) in w.iter_mut().enumerate().take(m) {
                    *item = usize::from(i >= n);
                }
                for i in 0..m {
                    w[m + i] = usize::from(i >= n + 1);
                }
                want.push(w);
            }
            let mut got = brute(&space, &f);
            got.sort();
            want.sort();
            assert_eq!(got, want, "m={m}");
        }
    }

    #[test]
    fn binary_increment_exact_language() {
        for m in [1usize, 2, 3, 4] {
            let space = ControlSpace::binary(2 * m);
            let u: Vec<usize> = (0..m).collect();
            let v: Vec<usize> = (m..2 * m).collect();
            let f = binary_increment_blocks(&u, &v, 0, 1);
            assert!(f.check_disjointness(&space), "m={m}");
            let mut want = Vec::new();
            for n in 0..(1u64 << m) - 1 {
                let mut w = vec![0usize; 2 * m];
                for i in 0..m {
                    w[i] = ((n >> i) & 1) as usize;
                    w[m + i] = (((n + 1) >> i) & 1) as usize;
                }
                want.push(w);
            }
            let mut got = brute(&space, &f);
            got.sort();
            want.sort();
            assert_eq!(got, want, "m={m}");
        }
    }

    #[test]
    fn binary_increment_examples() {
        // m=2, LSB first: "10"+"01" is 1 -> 2 and satisfies; "11"+"00"
        // would be wraparound and must not satisfy.
        let f = binary_increment_blocks(&[0, 1], &[2, 3], 0, 1);
        assert!(f.eval(&[1, 0, 0, 1]));
        assert!(!f.eval(&[1, 1, 0, 0]));
    }

    #[test]
    fn tail_append_language() {
        // Alphabet {0,1,2}: u = x 2^j, v = x a 2^(j-1).
        let n = 3;
        let alpha = CtrlAlphabet::new(["0", "1", "2"]);
        let space = ControlSpace::uniform(2 * n, alpha);
        let u: Vec<usize> = (0..n).collect();
        let v: Vec<usize> = (n..2 * n).collect();
        for a in [0usize, 1] {
            let f = tail_append_blocks(&u, &v, &[0, 1], 2, a);
            assert!(f.check_disjointness(&space));
            let got = brute(&space, &f);
            for w in &got {
                let uw = &w[..n];
                let vw = &w[n..];
                let j = uw.iter().position(|&s| s == 2).unwrap();
                assert!(uw[..j].iter().all(|&s| s < 2));
                assert!(uw[j..].iter().all(|&s| s == 2));
                assert_eq!(&vw[..j], &uw[..j]);
                assert_eq!(vw[j], a);
                assert!(vw[j + 1..].iter().all(|&s| s == 2));
            }
            // Count: prefixes x of length < n over {0,1}: 2^0 + 2^1 + 2^2.
            assert_eq!(got.len(), 1 + 2 + 4);
        }
    }

    #[test]
    fn sum_blocks_examples() {
        // d=2, m=1, target 1: exactly "10" and "01".
        let space = ControlSpace::binary(2);
        let f = sum_blocks(&[&[0], &[1]], 1, 0, 1);
        assert_eq!(brute(&space, &f), vec![vec![0, 1], vec![1, 0]]);

        // target 0: all zeros only.
        let f0 = sum_blocks(&[&[0], &[1]], 0, 0, 1);
        assert_eq!(brute(&space, &f0), vec![vec![0, 0]]);

        // Unsatisfiable target.
        let fbig = sum_blocks(&[&[0], &[1]], 3, 0, 1);
        assert!(brute(&space, &fbig).is_empty());

        // d=3, m=2: exhaustive against the arithmetic definition.
        let space = ControlSpace::binary(6);
        let blocks: [&[usize]; 3] = [&[0, 1], &[2, 3], &[4, 5]];
        for target in 0..=9u64 {
            let f = sum_blocks(&blocks, target, 0, 1);
            assert!(f.check_disjointness(&space), "target={target}");
            for w in space.words() {
                let val = |b: &[usize]| b.iter().enumerate().map(|(i, &p)| (w[p] as u64) << i).sum::<u64>();
                let want = blocks.iter().map(|b| val(b)).sum::<u64>() == target;
                assert_eq!(f.eval(&w), want, "target={target} w={w:?}");
            }
        }
    }
}
