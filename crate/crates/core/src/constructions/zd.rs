//! Self-indexing geometric cones on `Z^D` (`D = d + 1`): each cell of the
//! extra direction carries one bit of each of `d` binary counters, a cone
//! is self-indexing when every cell of `v + T_n` decodes to its own offset,
//! and the catcher element applies a permutation exactly at roots of
//! self-indexing cones whose C-values vanish off the root.
//!
//! The element is assembled mechanically: the abstract ripple-catching word
//! is flattened, φ letters become the conditional-permutation gadget, and
//! γ/β letters are compiled from successfulness/rank formulas over the
//! index bits (read through partial-shift conjugated symbol permutations).

use std::collections::HashMap;
use std::rc::Rc;

use crate::barrington::{Compiler, PermWord};
use crate::ca::{build_phi_single, AutWord, Config, ProductAlphabet};
use crate::formula::{self, BoolFormula, ControlSpace, CtrlAlphabet};
use crate::groups::{Group, GroupElement};
use crate::perm::Perm;
use crate::ripple::{build_catcher, RippleGen};

use super::BuildError;

/// Decodes the `d` counters written on the bit track in the `k+1` cells
/// `v, v+e_D, .., v+k·e_D`; `None` when some component exceeds `2^k`.
pub fn index_at(
    config: &Config,
    alphabet: &ProductAlphabet,
    bits_track: usize,
    d: usize,
    k: u32,
    v: &[i64],
) -> Option<Vec<u64>> {
    let dd = v.len();
    let mut out = vec![0u64; d];
    for j in 0..=k as i64 {
        let mut cell = v.to_vec();
        cell[dd - 1] += j;
        let sym = config.get(&GroupElement::Zd(cell));
        let bits = alphabet.get_track(sym, bits_track);
        for (i, out_i) in out.iter_mut().enumerate() {
            *out_i |= (((bits >> i) & 1) as u64) << j;
        }
    }
    let bound = 1u64 << k;
    out.iter().all(|&x| x <= bound).then_some(out)
}

/// Is the cone `v + T_n` self-indexing: the root decodes to `0^d` and every
/// `u ∈ T_n` (nonnegative offsets with coordinate sum at most `n = 2^k`)
/// decodes to `u`.
pub fn is_self_indexing(
    config: &Config,
    alphabet: &ProductAlphabet,
    bits_track: usize,
    d: usize,
    k: u32,
    v: &[i64],
) -> bool {
    let n = 1u64 << k;
    let mut stack = vec![vec![0u64; d]];
    let mut seen = std::collections::HashSet::new();
    while let Some(u) = stack.pop() {
        if !seen.insert(u.clone()) {
            continue;
        }
        let mut cell = v.to_vec();
        for (i, &ui) in u.iter().enumerate() {
            cell[i] += ui as i64;
        }
        match index_at(config, alphabet, bits_track, d, k, &cell) {
            Some(idx) if idx == u => {}
            _ => return false,
        }
        if u.iter().sum::<u64>() < n {
            for i in 0..d {
                let mut next = u.clone();
                next[i] += 1;
                stack.push(next);
            }
        }
    }
    true
}

/// Alphabet for the `d = 1, D = 2` catcher: `C × {0,1}`.
pub fn zd_alphabet(c_count: usize) -> ProductAlphabet {
    ProductAlphabet::new(vec![c_count, 2])
}

/// Direct semantics of the cone catcher for `d = 1, D = 2`: applies `π` to
/// the C-track at `v` iff the cone `v + [0, n]·e_1` is self-indexing and
/// its C-values vanish except at the root.
pub fn zd_catcher_reference(
    config: &Config,
    alphabet: &ProductAlphabet,
    k: u32,
    perm: &Perm,
) -> Result<Config, BuildError> {
    let n = 1i64 << k;
    // Candidate roots: cells whose cone or index columns touch the support.
    let mut candidates: Vec<GroupElement> = Vec::new();
    for g in config.cells.keys() {
        if let GroupElement::Zd(v) = g {
            for dx in -n..=0 {
                for dy in -(k as i64)..=0 {
                    candidates.push(GroupElement::Zd(vec![v[0] + dx, v[1] + dy]));
                }
            }
        }
    }
    candidates.sort();
    candidates.dedup();
    // The all-default background never fires: a uniform bit pattern decodes
    // every component to 0 or to an out-of-range value, and a cone needs
    // index 1 at depth 1.
    let mut out = config.clone();
    for cand in candidates {
        let GroupElement::Zd(v) = &cand else { continue };
        let fires = is_self_indexing(config, alphabet, 1, 1, k, v)
            && (1..=n).all(|j| {
                let sym = config.get(&GroupElement::Zd(vec![v[0] + j, v[1]]));
                alphabet.get_track(sym, 0) == 0
            });
        if fires {
            let sym = config.get(&cand);
            let c = alphabet.get_track(sym, 0);
            out.set(cand.clone(), alphabet.set_track(sym, 0, perm.apply(c)));
        }
    }
    Ok(out)
}

/// Shared mapper from controlled-permutation words to automorphism words:
/// a generator testing "track value at relative cell `w` equals `b`" turns
/// into a symbol permutation conjugated by the partial shift by `w`.
pub struct CtrlLayout {
    /// Per control position: relative cell and track read.
    pub reads: Vec<(GroupElement, usize)>,
    pub space: ControlSpace,
}

pub fn map_permword(
    alphabet: &ProductAlphabet,
    c_track: usize,
    layout: &CtrlLayout,
    word: &PermWord,
    cache: &mut HashMap<(String, usize, usize), Rc<AutWord>>,
) -> Result<AutWord, BuildError> {
    let mut out = AutWord::identity();
    for letter in &word.letters {
        let key = (letter.perm.to_string(), letter.symbol, letter.position);
        let block = match cache.get(&key) {
            Some(b) => b.clone(),
            None => {
                let (cell, track) = layout.reads[letter.position].clone();
                let symbol = letter.symbol;
                let perm = letter.perm.clone();
                let rho = alphabet.perm_from_fn(|parts| {
                    let mut out = parts.to_vec();
                    if parts[track] == symbol {
                        out[c_track] = perm.apply(parts[c_track]);
                    }
                    out
                })?;
                let shift = AutWord::partial_shift(cell, track);
                let w = shift.inverse().compose(&AutWord::symbol_perm(rho)).compose(&shift);
                let rc = Rc::new(w);
                cache.insert(key, rc.clone());
                rc
            }
        };
        let w = if letter.inverted { block.inverse() } else { (*block).clone() };
        out = out.compose(&w);
    }
    Ok(out)
}

/// Builds the `d = 1, D = 2` cone catcher over PAut generators: the word
/// applies `π` (even, nontrivial, on `|C| ≥ 6` colors) exactly at roots of
/// self-indexing cones of depth `n = 2^k` with zero C-values off the root.
pub fn build_zd_catcher(c_count: usize, k: u32, perm: &Perm) -> Result<AutWord, BuildError> {
    if k > 3 {
        return Err(BuildError::Budget(format!("k = {k} above the desk-scale bound 3")));
    }
    let n = 1u32 << k;
    let alphabet = zd_alphabet(c_count);
    let group = Group::zd(2);
    let skeleton = build_catcher(c_count, n, perm)?;

    // Control layout: the bit cells of the own column and the next column.
    let bitalpha = CtrlAlphabet::binary();
    let mut reads = Vec::new();
    for col in 0..2i64 {
        for j in 0..=k as i64 {
            reads.push((GroupElement::Zd(vec![col, j]), 1));
        }
    }
    let layout = CtrlLayout {
        space: ControlSpace::uniform(reads.len(), bitalpha),
        reads,
    };
    let own: Vec<usize> = (0..=k as usize).collect();
    let next: Vec<usize> = (k as usize + 1..2 * (k as usize + 1)).collect();

    // valid(col): the decoded value is at most 2^k (top bit clear, or set
    // with all lower bits clear).
    let valid = |col: &[usize]| -> BoolFormula {
        let top = col[col.len() - 1];
        if col.len() == 1 {
            return formula::position_in(top, &[0, 1]);
        }
        let lower: Vec<usize> = col[..col.len() - 1].to_vec();
        BoolFormula::or_disjoint(
            BoolFormula::atom(top, 0),
            BoolFormula::and(BoolFormula::atom(top, 1), formula::all_in_set(&lower, &[0])),
        )
    };
    // successful: the next column holds this column's value plus one, both
    // defined.
    let successful = BoolFormula::and(
        formula::binary_increment_blocks(&own, &next, 0, 1),
        valid(&next),
    );
    let rank_formula = |rank: u32| -> BoolFormula {
        let word: Vec<usize> = (0..=k).map(|j| ((rank >> j) & 1) as usize).collect();
        formula::fixed_word(&own, &word)
    };

    let mut compiler = Compiler::new(c_count);
    let mut phi_cache: HashMap<(String, usize), Rc<AutWord>> = HashMap::new();
    let mut ctrl_cache: HashMap<(String, usize, usize), Rc<AutWord>> = HashMap::new();
    let mut compiled_cache: HashMap<(String, String), Rc<AutWord>> = HashMap::new();
    let e1 = GroupElement::Zd(vec![1, 0]);

    let mut out = AutWord::identity();
    for (gen, inverted) in skeleton.flatten() {
        let block: Rc<AutWord> = match &gen {
            RippleGen::Phi { perm, c } => {
                let key = (perm.to_string(), *c);
                match phi_cache.get(&key) {
                    Some(b) => b.clone(),
                    None => {
                        let w = build_phi_single(&group, &alphabet, 0, 1, perm, *c, &e1)?;
                        let rc = Rc::new(w);
                        phi_cache.insert(key, rc.clone());
                        rc
                    }
                }
            }
            RippleGen::Gamma { perm } => {
                let key = (perm.to_string(), "succ".to_string());
                match compiled_cache.get(&key) {
                    Some(b) => b.clone(),
                    None => {
                        let pw = compiler.compile(perm, &successful, &layout.space)?;
                        let w = map_permword(&alphabet, 0, &layout, &pw, &mut ctrl_cache)?;
                        let rc = Rc::new(w);
                        compiled_cache.insert(key, rc.clone());
                        rc
                    }
                }
            }
            RippleGen::Beta { perm, rank } => {
                let key = (perm.to_string(), format!("rank{rank}"));
                match compiled_cache.get(&key) {
                    Some(b) => b.clone(),
                    None => {
                        let pw = compiler.compile(perm, &rank_formula(*rank), &layout.space)?;
                        let w = map_permword(&alphabet, 0, &layout, &pw, &mut ctrl_cache)?;
                        let rc = Rc::new(w);
                        compiled_cache.insert(key, rc.clone());
                        rc
                    }
                }
            }
        };
        let w = if inverted { block.inverse() } else { (*block).clone() };
        out = out.compose(&w);
    }
    Ok(out)
}

/// Lays a self-indexing cone (d = 1) rooted at `v` into a configuration:
/// index bits along the columns and zero C-values off the root.
pub fn lay_cone(
    config: &mut Config,
    alphabet: &ProductAlphabet,
    k: u32,
    v: (i64, i64),
    root_c: usize,
) {
    let n = 1i64 << k;
    for j in 0..=n {
        for bit_cell in 0..=k as i64 {
            let cell = GroupElement::Zd(vec![v.0 + j, v.1 + bit_cell]);
            let bit = ((j >> bit_cell) & 1) as usize;
            let old = config.get(&cell);
            config.set(cell, alphabet.set_track(old, 1, bit));
        }
        let cell = GroupElement::Zd(vec![v.0 + j, v.1]);
        let old = config.get(&cell);
        let c = if j == 0 { root_c } else { 0 };
        config.set(cell, alphabet.set_track(old, 0, c));
    }
}
