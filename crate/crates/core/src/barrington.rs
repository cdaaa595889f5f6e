//! Controlled permutations on `C × Actrl^n` and the compiler from Boolean
//! formulas to generator words.
//!
//! The generator `π_{a,i}` applies `π` to the `C`-component exactly when the
//! control word carries symbol `a` at position `i`; the control word is
//! never altered. Words are stored in composition order: the index-0 letter
//! is outermost, i.e. applied last.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{
    self, BoolFormula, ControlSpace, CtrlAlphabet, FormulaError,
};
use crate::machines::Ndtm;
use crate::perm::{parse_cycles, Perm, PermError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BarringtonError {
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error("control word length {0} does not match space ({1} positions)")]
    LengthMismatch(usize, usize),
    #[error("permuted set has {0} elements, compilation needs at least 5")]
    CTooSmall(usize),
    #[error("state space has {0} states, exceeding the budget {1}")]
    BudgetExceeded(u64, u64),
}

/// A point of `C × Actrl^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ControlledState {
    pub c: usize,
    pub word: Vec<usize>,
}

/// One generator `π_{a,i}` (optionally inverted).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CpGenerator {
    pub perm: Perm,
    pub symbol: usize,
    pub position: usize,
    pub inverted: bool,
}

impl CpGenerator {
    pub fn inverse(&self) -> CpGenerator {
        CpGenerator {
            perm: self.perm.clone(),
            symbol: self.symbol,
            position: self.position,
            inverted: !self.inverted,
        }
    }
}

/// Word over controlled-permutation generators, index 0 outermost.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PermWord {
    pub letters: Vec<CpGenerator>,
}

impl PermWord {
    pub fn identity() -> PermWord {
        PermWord { letters: Vec::new() }
    }

    pub fn single(g: CpGenerator) -> PermWord {
        PermWord { letters: vec![g] }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// `self ∘ rhs` (rhs applied first).
    pub fn compose(mut self, rhs: PermWord) -> PermWord {
        self.letters.extend(rhs.letters);
        self
    }

    /// Formal inverse: reversed letters with flipped flags.
    pub fn inverse(&self) -> PermWord {
        PermWord {
            letters: self.letters.iter().rev().map(CpGenerator::inverse).collect(),
        }
    }

    /// `[a, b] = a⁻¹ ∘ b⁻¹ ∘ a ∘ b`.
    pub fn commutator(a: &PermWord, b: &PermWord) -> PermWord {
        a.inverse()
            .compose(b.inverse())
            .compose(a.clone())
            .compose(b.clone())
    }

    /// `a ^ b = b⁻¹ ∘ a ∘ b`.
    pub fn conjugate(a: &PermWord, b: &PermWord) -> PermWord {
        b.inverse().compose(a.clone()).compose(b.clone())
    }

    pub fn to_json(&self, space: &ControlSpace) -> serde_json::Value {
        let letters: Vec<_> = self
            .letters
            .iter()
            .map(|g| {
                serde_json::json!({
                    "perm": g.perm.to_string(),
                    "symbol": space.alphabets[g.position].symbols[g.symbol],
                    "position": g.position,
                    "inverted": g.inverted,
                })
            })
            .collect();
        serde_json::Value::Array(letters)
    }

    pub fn from_json(
        c_size: usize,
        space: &ControlSpace,
        value: &serde_json::Value,
    ) -> Result<PermWord, BarringtonError> {
        #[derive(Deserialize, Serialize)]
        struct L {
            perm: String,
            symbol: String,
            position: usize,
            inverted: bool,
        }
        let raw: Vec<L> = serde_json::from_value(value.clone())
            .map_err(|e| BarringtonError::Formula(FormulaError::Parse(e.to_string())))?;
        let mut letters = Vec::with_capacity(raw.len());
        for l in raw {
            if l.position >= space.positions() {
                return Err(FormulaError::PositionOutOfRange(l.position, space.positions()).into());
            }
            let symbol = space.alphabets[l.position]
                .index_of(&l.symbol)
                .ok_or_else(|| FormulaError::UnknownSymbol(l.symbol.clone(), l.position))?;
            letters.push(CpGenerator {
                perm: parse_cycles(c_size, &l.perm)?,
                symbol,
                position: l.position,
                inverted: l.inverted,
            });
        }
        Ok(PermWord { letters })
    }
}

/// Applies one generator; the control word is never changed.
pub fn eval_generator(
    g: &CpGenerator,
    state: &ControlledState,
    space: &ControlSpace,
) -> Result<ControlledState, BarringtonError> {
    if state.word.len() != space.positions() {
        return Err(BarringtonError::LengthMismatch(state.word.len(), space.positions()));
    }
    let mut out = state.clone();
    if state.word[g.position] == g.symbol {
        out.c = if g.inverted {
            g.perm.inverse().apply(state.c)
        } else {
            g.perm.apply(state.c)
        };
    }
    Ok(out)
}

/// Applies a word, index-0 letter outermost (applied last).
pub fn eval_word(
    w: &PermWord,
    state: &ControlledState,
    space: &ControlSpace,
) -> Result<ControlledState, BarringtonError> {
    let mut cur = state.clone();
    for g in w.letters.iter().rev() {
        cur = eval_generator(g, &cur, space)?;
    }
    Ok(cur)
}

/// A word of length `|Actrl|` realizing `p` on every state: the composition
/// of `π_{a,0}` over all symbols `a` at position 0 (exactly one fires).
pub fn word_unconditional(p: &Perm, space: &ControlSpace) -> PermWord {
    let letters = (0..space.size_at(0))
        .map(|a| CpGenerator {
            perm: p.clone(),
            symbol: a,
            position: 0,
            inverted: false,
        })
        .collect();
    PermWord { letters }
}

/// The explicit table of `π|L` on `C × Actrl^n`, `L` the satisfying set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateTable {
    pub c_size: usize,
    /// `images[state_index(c, w)]`, states ordered with the control word
    /// enumerated lexicographically and `c` fastest.
    pub images: Vec<usize>,
}

impl StateTable {
    pub fn state_count(&self) -> usize {
        self.images.len()
    }
}

/// Brute-force oracle: evaluates the formula on every control word.
pub fn brute_oracle(
    p: &Perm,
    f: &BoolFormula,
    space: &ControlSpace,
    budget: u64,
) -> Result<StateTable, BarringtonError> {
    f.validate(space)?;
    let c_size = p.domain_size();
    let states = space.word_count().saturating_mul(c_size as u64);
    if states > budget {
        return Err(BarringtonError::BudgetExceeded(states, budget));
    }
    let mut images = Vec::with_capacity(states as usize);
    for (wi, w) in space.words().enumerate() {
        let hit = f.eval(&w);
        for c in 0..c_size {
            let c2 = if hit { p.apply(c) } else { c };
            images.push(wi * c_size + c2);
        }
    }
    Ok(StateTable { c_size, images })
}

/// Checks that a word agrees with a table on every state; returns the first
/// offending state on failure.
pub fn word_matches_table(
    w: &PermWord,
    table: &StateTable,
    space: &ControlSpace,
) -> Result<Option<ControlledState>, BarringtonError> {
    for (wi, word) in space.words().enumerate() {
        for c in 0..table.c_size {
            let st = ControlledState { c, word: word.clone() };
            let got = eval_word(w, &st, space)?;
            if got.word != st.word {
                return Ok(Some(st));
            }
            let want = table.images[wi * table.c_size + c];
            if got.c != want % table.c_size {
                return Ok(Some(st));
            }
        }
    }
    Ok(None)
}

/// Compiler from formulas to generator words. Ore decompositions are
/// memoized per permutation so identical subproblems stay identical.
pub struct Compiler {
    c_size: usize,
    ore_cache: HashMap<Perm, (Perm, Perm)>,
}

impl Compiler {
    pub fn new(c_size: usize) -> Compiler {
        Compiler { c_size, ore_cache: HashMap::new() }
    }

    fn ore(&mut self, p: &Perm) -> Result<(Perm, Perm), BarringtonError> {
        if let Some(hit) = self.ore_cache.get(p) {
            return Ok(hit.clone());
        }
        let pair = p.ore_decompose()?;
        self.ore_cache.insert(p.clone(), pair.clone());
        Ok(pair)
    }

    /// Compiles `p|f`: the word applies `p` to `c` exactly on control words
    /// satisfying `f`, and fixes every other state.
    ///
    /// Recursion rules: an atom is a single generator; `π|φ1 ∧ φ2` is the
    /// commutator `[s1(π)|φ1, s2(π)|φ2]`; `π|φ1 ∨ φ2` is
    /// `π|φ1 ∘ π|φ2 ∘ π⁻¹|φ1 ∧ φ2`; `π|¬φ` is `π ∘ π⁻¹|φ` with the
    /// unconditional `π` spelled out over position 0. A disjoint union drops
    /// the correction factor (its intersection word is empty).
    pub fn compile(
        &mut self,
        p: &Perm,
        f: &BoolFormula,
        space: &ControlSpace,
    ) -> Result<PermWord, BarringtonError> {
        if p.domain_size() != self.c_size {
            return Err(PermError::DomainMismatch(p.domain_size(), self.c_size).into());
        }
        if self.c_size < 5 {
            return Err(BarringtonError::CTooSmall(self.c_size));
        }
        if !p.is_even() {
            return Err(PermError::OddPermutation.into());
        }
        f.validate(space)?;
        self.compile_inner(p, f, space)
    }

    fn compile_inner(
        &mut self,
        p: &Perm,
        f: &BoolFormula,
        space: &ControlSpace,
    ) -> Result<PermWord, BarringtonError> {
        Ok(match f {
            BoolFormula::Atom { position, symbol } => PermWord::single(CpGenerator {
                perm: p.clone(),
                symbol: *symbol,
                position: *position,
                inverted: false,
            }),
            BoolFormula::And(a, b) => {
                let (s1, s2) = self.ore(p)?;
                let wa = self.compile_inner(&s1, a, space)?;
                let wb = self.compile_inner(&s2, b, space)?;
                PermWord::commutator(&wa, &wb)
            }
            BoolFormula::Or(a, b) => {
                let wx = self.compile_inner(p, a, space)?;
                let wy = self.compile_inner(p, b, space)?;
                let pinv = p.inverse();
                let (t1, t2) = self.ore(&pinv)?;
                let ca = self.compile_inner(&t1, a, space)?;
                let cb = self.compile_inner(&t2, b, space)?;
                wx.compose(wy).compose(PermWord::commutator(&ca, &cb))
            }
            BoolFormula::OrDisjoint(a, b) => {
                let wx = self.compile_inner(p, a, space)?;
                let wy = self.compile_inner(p, b, space)?;
                wx.compose(wy)
            }
            BoolFormula::Not(a) => {
                let uncond = word_unconditional(p, space);
                let wa = self.compile_inner(&p.inverse(), a, space)?;
                uncond.compose(wa)
            }
        })
    }
}

/// `(6 + max alphabet)^(depth + 1)`, the compiled-length envelope.
pub fn length_bound(space: &ControlSpace, depth: usize) -> u128 {
    (6 + space.max_alphabet() as u128).saturating_pow(depth as u32 + 1)
}

// ---------------------------------------------------------------------------
// The formula library as canonical operations
// ---------------------------------------------------------------------------

/// Satisfied exactly by the fixed word `u` over the given uniform alphabet.
pub fn formula_fixed_word(alphabet: CtrlAlphabet, u: &[usize]) -> (ControlSpace, BoolFormula) {
    let space = ControlSpace::uniform(u.len(), alphabet);
    let positions: Vec<usize> = (0..u.len()).collect();
    (space, formula::fixed_word(&positions, u))
}

/// `{unary_m(n) # unary_m(n+1) | n ∈ [0, m)}` over `{0, 1, #}`.
pub fn formula_unary_increment(m: usize) -> (ControlSpace, BoolFormula) {
    let space = ControlSpace::uniform(2 * m + 1, CtrlAlphabet::new(["0", "1", "#"]));
    let u: Vec<usize> = (0..m).collect();
    let v: Vec<usize> = (m + 1..2 * m + 1).collect();
    let f = BoolFormula::and(
        formula::unary_increment_blocks(&u, &v, &[0], &[1]),
        BoolFormula::atom(m, 2),
    );
    (space, f)
}

/// `{bin_m(n) bin_m(n+1) | n + 1 < 2^m}`, least significant bit first.
pub fn formula_binary_increment(m: usize) -> (ControlSpace, BoolFormula) {
    let space = ControlSpace::binary(2 * m);
    let u: Vec<usize> = (0..m).collect();
    let v: Vec<usize> = (m..2 * m).collect();
    (space, formula::binary_increment_blocks(&u, &v, 0, 1))
}

/// `{x 2^j # x a 2^(j-1)}` over `{0, 1, 2, #}`: the append-at-first-pad
/// relation.
pub fn formula_tail_append(a: usize, n: usize) -> (ControlSpace, BoolFormula) {
    assert!(a < 2);
    let space = ControlSpace::uniform(2 * n + 1, CtrlAlphabet::new(["0", "1", "2", "#"]));
    let u: Vec<usize> = (0..n).collect();
    let v: Vec<usize> = (n + 1..2 * n + 1).collect();
    let f = BoolFormula::and(
        formula::tail_append_blocks(&u, &v, &[0, 1], 2, a),
        BoolFormula::atom(n, 3),
    );
    (space, f)
}

/// Concatenations `bin_m(n_1) .. bin_m(n_d)` with `Σ n_i = target`.
pub fn formula_sum(d: usize, m: usize, target: u64) -> (ControlSpace, BoolFormula) {
    assert!(d >= 2);
    let space = ControlSpace::binary(d * m);
    let blocks: Vec<Vec<usize>> = (0..d).map(|i| (i * m..(i + 1) * m).collect()).collect();
    let refs: Vec<&[usize]> = blocks.iter().map(|b| b.as_slice()).collect();
    (space, formula::sum_blocks(&refs, target, 0, 1))
}

/// Configuration alphabet `Σ ∪ (Q × Σ) ∪ {#}` of a machine, with stable
/// symbol indices: plain symbols first, then head pairs, then `#`.
pub fn config_alphabet(m: &Ndtm) -> CtrlAlphabet {
    let mut symbols: Vec<String> = m.tape.clone();
    for q in 0..m.state_count() {
        for s in 0..m.tape_count() {
            symbols.push(format!("{}.{}", m.states[q], m.tape[s]));
        }
    }
    symbols.push("#".to_string());
    CtrlAlphabet::new(symbols)
}

pub fn conf_plain(_m: &Ndtm, s: usize) -> usize {
    s
}

pub fn conf_head(m: &Ndtm, q: usize, s: usize) -> usize {
    m.tape_count() + q * m.tape_count() + s
}

pub fn conf_hash(m: &Ndtm) -> usize {
    m.tape_count() + m.state_count() * m.tape_count()
}

/// Step relation over two ID blocks of equal length (no `#`): satisfied by
/// `(u, v)` exactly when `v` is one computation step of `m` from `u`.
pub fn step_relation_blocks(m: &Ndtm, u: &[usize], v: &[usize]) -> BoolFormula {
    assert_eq!(u.len(), v.len());
    let n = u.len();
    let plain: Vec<usize> = (0..m.tape_count()).map(|s| conf_plain(m, s)).collect();
    let mut delta = m.delta.clone();
    delta.sort_by_key(|t| (t.q, t.read, t.q2, t.write, t.dir));
    delta.dedup();
    let mut disjuncts = Vec::new();
    for t in &delta {
        for i in 0..n {
            let mut conj = vec![BoolFormula::atom(u[i], conf_head(m, t.q, t.read))];
            let mut pinned = vec![i];
            match t.dir {
                0 => {
                    conj.push(BoolFormula::atom(v[i], conf_head(m, t.q2, t.write)));
                }
                1 => {
                    if i + 1 >= n {
                        continue;
                    }
                    conj.push(BoolFormula::atom(v[i], conf_plain(m, t.write)));
                    let pairs: Vec<(usize, usize)> = (0..m.tape_count())
                        .map(|a| (conf_plain(m, a), conf_head(m, t.q2, a)))
                        .collect();
                    conj.push(formula::pairs_in(&[u[i + 1]], &[v[i + 1]], &pairs));
                    pinned.push(i + 1);
                }
                -1 => {
                    if i == 0 {
                        continue;
                    }
                    conj.push(BoolFormula::atom(v[i], conf_plain(m, t.write)));
                    let pairs: Vec<(usize, usize)> = (0..m.tape_count())
                        .map(|a| (conf_plain(m, a), conf_head(m, t.q2, a)))
                        .collect();
                    conj.push(formula::pairs_in(&[u[i - 1]], &[v[i - 1]], &pairs));
                    pinned.push(i - 1);
                }
                _ => continue,
            }
            let rest_u: Vec<usize> = (0..n).filter(|j| !pinned.contains(j)).map(|j| u[j]).collect();
            let rest_v: Vec<usize> = (0..n).filter(|j| !pinned.contains(j)).map(|j| v[j]).collect();
            if !rest_u.is_empty() {
                conj.push(formula::eq_positions(&rest_u, &rest_v, &plain));
            }
            disjuncts.push(formula::and_all(conj));
        }
    }
    if disjuncts.is_empty() {
        return formula::contradiction();
    }
    formula::or_disjoint_all(disjuncts)
}

/// The language `{u # v | (u, v) is a computation step}` over the
/// configuration alphabet, for IDs of length `(id_length - 1) / 2`.
pub fn formula_turing_step(m: &Ndtm, id_length: usize) -> (ControlSpace, BoolFormula) {
    assert!(id_length % 2 == 1 && id_length >= 3, "id_length must be 2n+1");
    let n = id_length / 2;
    let alpha = config_alphabet(m);
    let space = ControlSpace::uniform(id_length, alpha);
    let u: Vec<usize> = (0..n).collect();
    let v: Vec<usize> = (n + 1..2 * n + 1).collect();
    let step = step_relation_blocks(m, &u, &v);
    let non_hash: Vec<usize> = (0..conf_hash(m)).collect();
    let mut hashcheck = vec![BoolFormula::atom(n, conf_hash(m))];
    let others: Vec<usize> = (0..id_length).filter(|&p| p != n).collect();
    hashcheck.push(formula::all_in_set(&others, &non_hash));
    let f = BoolFormula::and(step, formula::and_all(hashcheck));
    (space, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::{steps, toy_step_machines, Id, IdSym};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn xy_space(n: usize) -> ControlSpace {
        ControlSpace::uniform(n, CtrlAlphabet::new(["x", "y"]))
    }

    #[test]
    fn generator_fires_only_on_its_symbol() {
        let space = xy_space(2);
        let g = CpGenerator {
            perm: Perm::transposition(2, 0, 1).unwrap(),
            symbol: 0,
            position: 0,
            inverted: false,
        };
        let hit = ControlledState { c: 0, word: vec![0, 1] };
        let miss = ControlledState { c: 0, word: vec![1, 0] };
        assert_eq!(eval_generator(&g, &hit, &space).unwrap().c, 1);
        assert_eq!(eval_generator(&g, &hit, &space).unwrap().word, vec![0, 1]);
        assert_eq!(eval_generator(&g, &miss, &space).unwrap(), miss);
        let id_gen = CpGenerator { perm: Perm::identity(2), ..g };
        assert_eq!(eval_generator(&id_gen, &hit, &space).unwrap(), hit);
    }

    #[test]
    fn word_then_formal_inverse_is_identity() {
        let space = xy_space(3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let perms = Perm::alternating(5);
        for _ in 0..50 {
            let letters: Vec<CpGenerator> = (0..6)
                .map(|_| CpGenerator {
                    perm: perms.choose(&mut rng).unwrap().clone(),
                    symbol: rng.gen_range(0..2),
                    position: rng.gen_range(0..3),
                    inverted: rng.gen_bool(0.5),
                })
                .collect();
            let w = PermWord { letters };
            let both = w.clone().compose(w.inverse());
            for word in space.words() {
                for c in 0..5 {
                    let st = ControlledState { c, word: word.clone() };
                    assert_eq!(eval_word(&both, &st, &space).unwrap(), st);
                }
            }
        }
    }

    #[test]
    fn two_generator_word_matches_hand_evaluation() {
        let space = xy_space(2);
        let p = Perm::three_cycle(5, 0, 1, 2).unwrap();
        let q = Perm::three_cycle(5, 2, 3, 4).unwrap();
        let w = PermWord {
            letters: vec![
                CpGenerator { perm: p.clone(), symbol: 0, position: 0, inverted: false },
                CpGenerator { perm: q.clone(), symbol: 1, position: 1, inverted: false },
            ],
        };
        // Index 0 outermost: q-letter applies first.
        let st = ControlledState { c: 2, word: vec![0, 1] };
        let step1 = eval_generator(&w.letters[1], &st, &space).unwrap();
        let want = eval_generator(&w.letters[0], &step1, &space).unwrap();
        assert_eq!(eval_word(&w, &st, &space).unwrap(), want);
        assert_eq!(want.c, p.apply(q.apply(2)));
    }

    #[test]
    fn unconditional_word_acts_everywhere() {
        for (n, alpha) in [(3usize, CtrlAlphabet::binary()), (1, CtrlAlphabet::new(["a", "b", "c"]))] {
            let space = ControlSpace::uniform(n, alpha.clone());
            let p = Perm::three_cycle(5, 0, 3, 4).unwrap();
            let w = word_unconditional(&p, &space);
            assert_eq!(w.len(), alpha.len());
            for word in space.words() {
                for c in 0..5 {
                    let st = ControlledState { c, word: word.clone() };
                    let got = eval_word(&w, &st, &space).unwrap();
                    assert_eq!(got.c, p.apply(c));
                    assert_eq!(got.word, st.word);
                }
            }
        }
    }

    fn assert_sound(p: &Perm, f: &BoolFormula, space: &ControlSpace) {
        let mut compiler = Compiler::new(p.domain_size());
        let w = compiler.compile(p, f, space).unwrap();
        let table = brute_oracle(p, f, space, 1 << 22).unwrap();
        assert_eq!(word_matches_table(&w, &table, space).unwrap(), None, "formula {f}");
        assert!(
            (w.len() as u128) <= length_bound(space, f.depth()),
            "length {} over bound for depth {}",
            w.len(),
            f.depth()
        );
    }

    #[test]
    fn compile_atom_is_single_generator() {
        let space = xy_space(3);
        let p = Perm::three_cycle(5, 0, 1, 2).unwrap();
        let f = BoolFormula::atom(1, 0);
        let w = Compiler::new(5).compile(&p, &f, &space).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w.letters[0].position, 1);
        assert_sound(&p, &f, &space);
    }

    #[test]
    fn compile_tautology_and_conjunction() {
        let space = xy_space(2);
        let p = Perm::three_cycle(5, 0, 1, 2).unwrap();
        let taut = BoolFormula::or(BoolFormula::atom(0, 0), BoolFormula::not(BoolFormula::atom(0, 0)));
        assert_sound(&p, &taut, &space);
        let conj = BoolFormula::and(BoolFormula::atom(0, 0), BoolFormula::atom(1, 1));
        // Exactly 1 of 4 control words is permuted.
        let table = brute_oracle(&p, &conj, &space, 1 << 20).unwrap();
        let moved = space
            .words()
            .enumerate()
            .filter(|(wi, _)| (0..5).any(|c| table.images[wi * 5 + c] != wi * 5 + c))
            .count();
        assert_eq!(moved, 1);
        assert_sound(&p, &conj, &space);
    }

    fn random_formula(rng: &mut ChaCha8Rng, space: &ControlSpace, depth: usize) -> BoolFormula {
        if depth == 0 {
            let p = rng.gen_range(0..space.positions());
            let s = rng.gen_range(0..space.size_at(p));
            return BoolFormula::atom(p, s);
        }
        match rng.gen_range(0..3) {
            0 => BoolFormula::and(
                random_formula(rng, space, depth - 1),
                random_formula(rng, space, depth - 1),
            ),
            1 => BoolFormula::or(
                random_formula(rng, space, depth - 1),
                random_formula(rng, space, depth - 1),
            ),
            _ => BoolFormula::not(random_formula(rng, space, depth - 1)),
        }
    }

    #[test]
    fn compile_sound_on_random_corpus() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = Perm::three_cycle(5, 0, 1, 2).unwrap();
        for n in 1..=3usize {
            let space = xy_space(n);
            for depth in 0..=2usize {
                for _ in 0..20 {
                    let f = random_formula(&mut rng, &space, depth);
                    assert_sound(&p, &f, &space);
                }
            }
        }
    }

    #[test]
    fn restriction_calculus_identities() {
        // [π1|X, π2|Y] = [π1, π2]|X ∩ Y and (π|X)⁻¹ = π⁻¹|X.
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let space = xy_space(3);
        let alt = Perm::alternating(5);
        for _ in 0..40 {
            let p1 = alt.choose(&mut rng).unwrap();
            let p2 = alt.choose(&mut rng).unwrap();
            let fx = random_formula(&mut rng, &space, 2);
            let fy = random_formula(&mut rng, &space, 2);
            let mut compiler = Compiler::new(5);
            let wx = compiler.compile(p1, &fx, &space).unwrap();
            let wy = compiler.compile(p2, &fy, &space).unwrap();
            let comm = PermWord::commutator(&wx, &wy);
            let inter = BoolFormula::and(fx.clone(), fy.clone());
            let table = brute_oracle(&p1.commutator(p2).unwrap(), &inter, &space, 1 << 20).unwrap();
            assert_eq!(word_matches_table(&comm, &table, &space).unwrap(), None);
            let inv_table = brute_oracle(&p1.inverse(), &fx, &space, 1 << 20).unwrap();
            assert_eq!(word_matches_table(&wx.inverse(), &inv_table, &space).unwrap(), None);
        }
    }

    #[test]
    fn library_formulas_compile_exactly() {
        let p = Perm::three_cycle(5, 0, 1, 2).unwrap();
        let (space, f) = formula_binary_increment(2);
        assert_sound(&p, &f, &space);
        let (space, f) = formula_unary_increment(2);
        assert_sound(&p, &f, &space);
        let (space, f) = formula_tail_append(1, 2);
        assert_sound(&p, &f, &space);
        let (space, f) = formula_sum(2, 2, 3);
        assert_sound(&p, &f, &space);
        let (space, f) = formula_fixed_word(CtrlAlphabet::new(["a", "b"]), &[0, 1, 1]);
        assert_sound(&p, &f, &space);
        assert!(f.depth() <= 2);
    }

    fn encode_pair(m: &Ndtm, u: &Id, v: &Id) -> Vec<usize> {
        let mut w = Vec::new();
        for cell in u.cells() {
            w.push(match *cell {
                IdSym::Sym(s) => conf_plain(m, s),
                IdSym::Head(q, s) => conf_head(m, q, s),
            });
        }
        w.push(conf_hash(m));
        for cell in v.cells() {
            w.push(match *cell {
                IdSym::Sym(s) => conf_plain(m, s),
                IdSym::Head(q, s) => conf_head(m, q, s),
            });
        }
        w
    }

    #[test]
    fn turing_step_formula_matches_step_relation() {
        for m in [toy_step_machines().0, toy_step_machines().1] {
            for n in [2usize, 3] {
                let (space, f) = formula_turing_step(&m, 2 * n + 1);
                assert!(f.check_disjointness(&space), "machine {} n={n}", m.name);
                let ids = Id::enumerate(&m, n);
                for u in &ids {
                    let succ = steps(&m, u);
                    for v in &ids {
                        let word = encode_pair(&m, u, v);
                        assert_eq!(
                            f.eval(&word),
                            succ.contains(v),
                            "machine {} u={u:?} v={v:?}",
                            m.name
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn turing_step_formula_rejects_malformed_words() {
        let (m, _) = toy_step_machines();
        let n = 2;
        let (space, f) = formula_turing_step(&m, 2 * n + 1);
        // Missing # at the center.
        let ids = Id::enumerate(&m, n);
        let u = &ids[0];
        let succ = steps(&m, u);
        if let Some(v) = succ.first() {
            let mut w = encode_pair(&m, u, v);
            w[n] = conf_plain(&m, 0);
            assert!(!f.eval(&w));
            // A pair differing off-head fails the equality subformula.
            let mut w2 = encode_pair(&m, u, v);
            let off = (0..n).find(|&j| {
                matches!(u.cells()[j], IdSym::Sym(_)) && matches!(v.cells()[j], IdSym::Sym(_))
            });
            if let Some(j) = off {
                w2[n + 1 + j] = (w2[n + 1 + j] + 1) % m.tape_count();
                assert!(!f.eval(&w2));
            }
        }
        let _ = space;
    }

    #[test]
    fn permword_json_round_trip() {
        let space = xy_space(2);
        let p = Perm::three_cycle(5, 0, 1, 2).unwrap();
        let f = BoolFormula::and(BoolFormula::atom(0, 0), BoolFormula::atom(1, 1));
        let w = Compiler::new(5).compile(&p, &f, &space).unwrap();
        let json = w.to_json(&space);
        let back = PermWord::from_json(5, &space, &json).unwrap();
        assert_eq!(back, w);
    }
}
