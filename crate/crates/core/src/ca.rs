//! Automorphisms of full shifts over the group backends, generated by
//! partial shifts and symbol permutations, with three evaluators:
//!
//! * pattern evaluation with per-track dependency tracking (errors on
//!   insufficient support) for short words;
//! * whole-configuration evaluation for finite-support configurations
//!   (a default symbol plus finitely many exceptions), fast enough for
//!   compiled words with millions of letters;
//! * periodic-point evaluation on `Z^d`.
//!
//! Symbols of a product alphabet are packed into flat indices, track 0
//! least significant.

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use rand::Rng;
use thiserror::Error;

use crate::groups::{Backend, Group, GroupElement, GroupError};
use crate::perm::{Perm, PermError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CaError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("track index {0} out of range ({1} tracks)")]
    BadTrack(usize, usize),
    #[error("pattern does not cover required cell {0:?}")]
    InsufficientSupport(GroupElement),
    #[error("symbol {0} outside alphabet of size {1}")]
    BadSymbol(usize, usize),
    #[error("word too long for pattern evaluation ({0} letters)")]
    WordTooLong(u64),
    #[error("periodic point period {0} too small, need at least {1}")]
    PeriodTooSmall(i64, i64),
    #[error("gadget preconditions violated: {0}")]
    Gadget(String),
}

/// Explicit product alphabet `A1 × .. × Ak`; symbols are flat indices with
/// track 0 least significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductAlphabet {
    pub tracks: Vec<usize>,
}

impl ProductAlphabet {
    pub fn new(tracks: Vec<usize>) -> ProductAlphabet {
        assert!(!tracks.is_empty() && tracks.iter().all(|&t| t >= 1));
        ProductAlphabet { tracks }
    }

    pub fn flat_size(&self) -> usize {
        self.tracks.iter().product()
    }

    pub fn track_count(&self) -> usize {
        self.tracks.len()
    }

    fn stride(&self, track: usize) -> usize {
        self.tracks[..track].iter().product()
    }

    pub fn get_track(&self, flat: usize, track: usize) -> usize {
        (flat / self.stride(track)) % self.tracks[track]
    }

    pub fn set_track(&self, flat: usize, track: usize, value: usize) -> usize {
        let stride = self.stride(track) as isize;
        let old = self.get_track(flat, track) as isize;
        (flat as isize + (value as isize - old) * stride) as usize
    }

    pub fn pack(&self, parts: &[usize]) -> usize {
        debug_assert_eq!(parts.len(), self.tracks.len());
        let mut flat = 0;
        for (i, &p) in parts.iter().enumerate().rev() {
            flat = flat * self.tracks[i] + p;
        }
        flat
    }

    pub fn unpack(&self, flat: usize) -> Vec<usize> {
        (0..self.tracks.len()).map(|t| self.get_track(flat, t)).collect()
    }

    /// Builds a flat-alphabet permutation from a function on unpacked
    /// symbols (which must be a bijection).
    pub fn perm_from_fn(
        &self,
        f: impl Fn(&[usize]) -> Vec<usize>,
    ) -> Result<Perm, PermError> {
        let images = (0..self.flat_size())
            .map(|s| self.pack(&f(&self.unpack(s))))
            .collect();
        Perm::from_images(images)
    }
}

/// PAut generators: partial shifts (shift one track by a group element) and
/// symbol permutations (permute the flat symbol cellwise).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PautGen {
    PartialShift { g: GroupElement, track: usize },
    SymbolPerm { perm: Perm },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutLetter {
    pub gen: Rc<PautGen>,
    pub inverted: bool,
}

impl AutLetter {
    pub fn inverse(&self) -> AutLetter {
        AutLetter { gen: self.gen.clone(), inverted: !self.inverted }
    }
}

fn shift_norm(g: &GroupElement) -> u64 {
    match g {
        GroupElement::Zd(v) => v.iter().map(|x| x.unsigned_abs()).sum(),
        GroupElement::Free(w) | GroupElement::FreeMonoid(w) => w.len() as u64,
        GroupElement::Lamplighter(e) => {
            // Coarse upper bound; used only for period sizing.
            let span: u64 = e.lamps.keys().map(|p| 2 * p.unsigned_abs()).sum();
            e.shift.unsigned_abs() + span
        }
    }
}

#[derive(Clone, Debug)]
enum AutUnit {
    Letter(AutLetter),
    Block(Rc<AutWord>, bool),
}

/// A word over PAut generators in composition order (index 0 outermost,
/// applied last). Shared sub-words are stored by reference so that the
/// compiled constructions stay compact.
#[derive(Clone, Debug, Default)]
pub struct AutWord {
    units: Vec<AutUnit>,
    letters: u64,
    radius: u64,
}

impl AutWord {
    pub fn identity() -> AutWord {
        AutWord::default()
    }

    pub fn letter(gen: PautGen, inverted: bool) -> AutWord {
        let radius = match &gen {
            PautGen::PartialShift { g, .. } => shift_norm(g),
            PautGen::SymbolPerm { .. } => 0,
        };
        AutWord {
            units: vec![AutUnit::Letter(AutLetter { gen: Rc::new(gen), inverted })],
            letters: 1,
            radius,
        }
    }

    pub fn partial_shift(g: GroupElement, track: usize) -> AutWord {
        AutWord::letter(PautGen::PartialShift { g, track }, false)
    }

    pub fn symbol_perm(perm: Perm) -> AutWord {
        AutWord::letter(PautGen::SymbolPerm { perm }, false)
    }

    /// Number of generator letters (counting multiplicity through shared
    /// blocks) — the word norm over the PAut generating set.
    pub fn letter_count(&self) -> u64 {
        self.letters
    }

    /// Sum of shift norms over all letters: an upper bound for the radius
    /// of the composed local rule.
    pub fn radius(&self) -> u64 {
        self.radius
    }

    /// `self ∘ rhs` (rhs applied first).
    pub fn compose(&self, rhs: &AutWord) -> AutWord {
        let mut units = self.units.clone();
        units.extend(rhs.units.iter().cloned());
        AutWord {
            units,
            letters: self.letters + rhs.letters,
            radius: self.radius + rhs.radius,
        }
    }

    pub fn compose_all(words: &[AutWord]) -> AutWord {
        let mut acc = AutWord::identity();
        for w in words {
            acc = acc.compose(w);
        }
        acc
    }

    pub fn inverse(&self) -> AutWord {
        AutWord {
            units: vec![AutUnit::Block(Rc::new(self.clone()), true)],
            letters: self.letters,
            radius: self.radius,
        }
    }

    /// `a ^ b = b⁻¹ ∘ a ∘ b`.
    pub fn conjugate(a: &AutWord, b: &AutWord) -> AutWord {
        b.inverse().compose(a).compose(b)
    }

    /// `[a, b] = a⁻¹ ∘ b⁻¹ ∘ a ∘ b`.
    pub fn commutator(a: &AutWord, b: &AutWord) -> AutWord {
        a.inverse().compose(&b.inverse()).compose(a).compose(b)
    }

    /// Nested commutator `[w1, .., wk] = [w1, [w2, .., wk]]`.
    pub fn nested_commutator(words: &[AutWord]) -> AutWord {
        match words {
            [] => AutWord::identity(),
            [w] => w.clone(),
            [w, rest @ ..] => AutWord::commutator(w, &AutWord::nested_commutator(rest)),
        }
    }

    /// Flattens to primitive letters in composition order.
    pub fn flatten(&self) -> Vec<AutLetter> {
        let mut out = Vec::with_capacity(self.letters as usize);
        self.flatten_into(false, &mut out);
        out
    }

    fn flatten_into(&self, inverted: bool, out: &mut Vec<AutLetter>) {
        if inverted {
            for unit in self.units.iter().rev() {
                match unit {
                    AutUnit::Letter(l) => out.push(l.inverse()),
                    AutUnit::Block(w, inv) => w.flatten_into(!inv, out),
                }
            }
        } else {
            for unit in &self.units {
                match unit {
                    AutUnit::Letter(l) => out.push(l.clone()),
                    AutUnit::Block(w, inv) => w.flatten_into(*inv, out),
                }
            }
        }
    }
}

/// Finite pattern: explicit symbols on a finite support.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Pattern {
    pub cells: BTreeMap<GroupElement, usize>,
}

impl Pattern {
    pub fn to_json(&self, group: &Group) -> serde_json::Value {
        let cells: Vec<_> = self
            .cells
            .iter()
            .map(|(g, &s)| serde_json::json!({ "cell": group.format(g), "symbol": s }))
            .collect();
        serde_json::Value::Array(cells)
    }

    pub fn from_json(group: &Group, value: &serde_json::Value) -> Result<Pattern, CaError> {
        let arr = value
            .as_array()
            .ok_or_else(|| GroupError::Parse("expected array".into()))?;
        let mut cells = BTreeMap::new();
        for item in arr {
            let cell = item["cell"]
                .as_str()
                .ok_or_else(|| GroupError::Parse("missing cell".into()))?;
            let symbol = item["symbol"]
                .as_u64()
                .ok_or_else(|| GroupError::Parse("missing symbol".into()))? as usize;
            cells.insert(group.parse(cell)?, symbol);
        }
        Ok(Pattern { cells })
    }
}

/// Finite-support configuration: a default symbol plus finitely many
/// exceptions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub default: usize,
    pub cells: BTreeMap<GroupElement, usize>,
}

impl Config {
    pub fn uniform(default: usize) -> Config {
        Config { default, cells: BTreeMap::new() }
    }

    pub fn get(&self, g: &GroupElement) -> usize {
        self.cells.get(g).copied().unwrap_or(self.default)
    }

    pub fn set(&mut self, g: GroupElement, symbol: usize) {
        if symbol == self.default {
            self.cells.remove(&g);
        } else {
            self.cells.insert(g, symbol);
        }
    }
}

/// `Z^d` point with period vector `p`: values over the fundamental domain
/// `[0, p1) × .. × [0, pd)`, row-major with coordinate 0 fastest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicPoint {
    pub periods: Vec<i64>,
    pub values: Vec<usize>,
}

impl PeriodicPoint {
    pub fn new(periods: Vec<i64>, values: Vec<usize>) -> PeriodicPoint {
        assert_eq!(periods.iter().product::<i64>() as usize, values.len());
        PeriodicPoint { periods, values }
    }

    pub fn index(&self, coords: &[i64]) -> usize {
        let mut idx = 0usize;
        for (i, (&c, &p)) in coords.iter().zip(&self.periods).enumerate().rev() {
            let _ = i;
            idx = idx * p as usize + c.rem_euclid(p) as usize;
        }
        idx
    }

    pub fn get(&self, coords: &[i64]) -> usize {
        self.values[self.index(coords)]
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "periods": self.periods, "values": self.values })
    }
}

// ---------------------------------------------------------------------------
// Evaluation engine
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
enum Domain {
    Plain,
    ZdPeriodic(Vec<i64>),
}

struct Interner {
    group: Group,
    domain: Domain,
    ids: HashMap<GroupElement, u32>,
    elems: Vec<GroupElement>,
    trans: HashMap<GroupElement, Vec<u32>>,
}

const UNSET: u32 = u32::MAX;

impl Interner {
    fn new(group: Group, domain: Domain) -> Interner {
        Interner { group, domain, ids: HashMap::new(), elems: Vec::new(), trans: HashMap::new() }
    }

    fn canonical(&self, g: GroupElement) -> GroupElement {
        match (&self.domain, g) {
            (Domain::ZdPeriodic(p), GroupElement::Zd(v)) => GroupElement::Zd(
                v.iter().zip(p).map(|(&x, &period)| x.rem_euclid(period)).collect(),
            ),
            (_, g) => g,
        }
    }

    fn intern(&mut self, g: GroupElement) -> u32 {
        let g = self.canonical(g);
        if let Some(&id) = self.ids.get(&g) {
            return id;
        }
        let id = self.elems.len() as u32;
        self.elems.push(g.clone());
        self.ids.insert(g, id);
        id
    }

    fn translate(&mut self, id: u32, offset: &GroupElement) -> Result<u32, CaError> {
        let table = self.trans.entry(offset.clone()).or_default();
        if (id as usize) < table.len() && table[id as usize] != UNSET {
            return Ok(table[id as usize]);
        }
        let product = self.group.multiply(&self.elems[id as usize], offset)?;
        let target = self.intern(product);
        let table = self.trans.get_mut(offset).unwrap();
        if table.len() <= id as usize {
            table.resize(id as usize + 1, UNSET);
        }
        table[id as usize] = target;
        Ok(target)
    }
}

/// Evaluator for automorphism words over one group/alphabet pair.
pub struct Engine {
    pub group: Group,
    pub alphabet: ProductAlphabet,
    interner: Interner,
    inv_cache: HashMap<GroupElement, GroupElement>,
}

/// Dense working state for whole-configuration evaluation.
struct DenseState {
    values: Vec<u32>,
    epoch: Vec<u32>,
    cur: u32,
    default: u32,
    live: Vec<u32>,
}

impl DenseState {
    fn read(&self, id: u32) -> u32 {
        let i = id as usize;
        if i < self.epoch.len() && self.epoch[i] == self.cur {
            self.values[i]
        } else {
            self.default
        }
    }

    fn ensure(&mut self, id: u32) {
        if id as usize >= self.values.len() {
            self.values.resize(id as usize + 1, 0);
            self.epoch.resize(id as usize + 1, 0);
        }
    }

    fn write(&mut self, id: u32, value: u32) {
        self.ensure(id);
        self.values[id as usize] = value;
        self.epoch[id as usize] = self.cur;
        self.live.push(id);
    }
}

impl Engine {
    pub fn new(group: Group, alphabet: ProductAlphabet) -> Engine {
        let interner = Interner::new(group.clone(), Domain::Plain);
        Engine { group, alphabet, interner, inv_cache: HashMap::new() }
    }

    /// Engine whose cells are `Z^d` classes modulo the given periods.
    pub fn new_periodic(d: usize, periods: Vec<i64>, alphabet: ProductAlphabet) -> Engine {
        assert_eq!(periods.len(), d);
        let group = Group::zd(d);
        let interner = Interner::new(group.clone(), Domain::ZdPeriodic(periods));
        Engine { group, alphabet, interner, inv_cache: HashMap::new() }
    }

    fn inverse_of(&mut self, g: &GroupElement) -> Result<GroupElement, CaError> {
        if let Some(hit) = self.inv_cache.get(g) {
            return Ok(hit.clone());
        }
        let inv = self.group.inverse(g)?;
        self.inv_cache.insert(g.clone(), inv.clone());
        Ok(inv)
    }

    fn check_letter(&self, letter: &AutLetter) -> Result<(), CaError> {
        match letter.gen.as_ref() {
            PautGen::PartialShift { track, .. } => {
                if *track >= self.alphabet.track_count() {
                    return Err(CaError::BadTrack(*track, self.alphabet.track_count()));
                }
            }
            PautGen::SymbolPerm { perm } => {
                if perm.domain_size() != self.alphabet.flat_size() {
                    return Err(CaError::BadSymbol(perm.domain_size(), self.alphabet.flat_size()));
                }
            }
        }
        Ok(())
    }

    /// Applies a word to a finite-support configuration.
    pub fn apply(&mut self, word: &AutWord, config: &Config) -> Result<Config, CaError> {
        if config.default >= self.alphabet.flat_size() {
            return Err(CaError::BadSymbol(config.default, self.alphabet.flat_size()));
        }
        let mut state = DenseState {
            values: Vec::new(),
            epoch: Vec::new(),
            cur: 1,
            default: config.default as u32,
            live: Vec::new(),
        };
        for (g, &s) in &config.cells {
            if s >= self.alphabet.flat_size() {
                return Err(CaError::BadSymbol(s, self.alphabet.flat_size()));
            }
            let id = self.interner.intern(g.clone());
            state.ensure(id);
            state.write(id, s as u32);
        }
        self.apply_units(&word.units, false, &mut state)?;
        let mut out = Config::uniform(state.default as usize);
        for &id in &state.live {
            let v = state.read(id);
            if v != state.default {
                out.cells.insert(self.interner.elems[id as usize].clone(), v as usize);
            }
        }
        Ok(out)
    }

    fn apply_units(
        &mut self,
        units: &[AutUnit],
        inverted: bool,
        state: &mut DenseState,
    ) -> Result<(), CaError> {
        // Application order is the reverse of composition order.
        if inverted {
            for unit in units {
                self.apply_unit(unit, true, state)?;
            }
        } else {
            for unit in units.iter().rev() {
                self.apply_unit(unit, false, state)?;
            }
        }
        Ok(())
    }

    fn apply_unit(
        &mut self,
        unit: &AutUnit,
        inverted: bool,
        state: &mut DenseState,
    ) -> Result<(), CaError> {
        match unit {
            AutUnit::Block(w, inv) => self.apply_units(&w.units, inverted ^ inv, state),
            AutUnit::Letter(l) => {
                self.check_letter(l)?;
                let inv = l.inverted ^ inverted;
                match l.gen.as_ref() {
                    PautGen::SymbolPerm { perm } => {
                        let table: &Perm = perm;
                        let apply = |v: u32| -> u32 {
                            if inv {
                                table.inverse().apply(v as usize) as u32
                            } else {
                                table.apply(v as usize) as u32
                            }
                        };
                        // Inverting per cell would be quadratic; build the
                        // effective table once.
                        let eff: Vec<u32> = if inv {
                            let p = table.inverse();
                            (0..p.domain_size()).map(|i| p.apply(i) as u32).collect()
                        } else {
                            (0..table.domain_size()).map(|i| table.apply(i) as u32).collect()
                        };
                        let _ = apply;
                        state.default = eff[state.default as usize];
                        let live = std::mem::take(&mut state.live);
                        for id in live {
                            let v = state.read(id);
                            state.write(id, eff[v as usize]);
                        }
                        state.live.dedup();
                    }
                    PautGen::PartialShift { g, track } => {
                        let g_eff = if inv { self.inverse_of(g)? } else { g.clone() };
                        if matches!(&g_eff, GroupElement::Zd(v) if v.iter().all(|&x| x == 0))
                            || matches!(&g_eff, GroupElement::Free(w) | GroupElement::FreeMonoid(w) if w.is_empty())
                        {
                            return Ok(());
                        }
                        let g_inv = self.inverse_of(&g_eff)?;
                        let mut candidates: Vec<u32> = Vec::with_capacity(state.live.len() * 2);
                        let live = std::mem::take(&mut state.live);
                        for &id in &live {
                            candidates.push(id);
                            candidates.push(self.interner.translate(id, &g_inv)?);
                        }
                        candidates.sort_unstable();
                        candidates.dedup();
                        let stride = self.alphabet.stride(*track) as u32;
                        let size = self.alphabet.tracks[*track] as u32;
                        let mut scratch: Vec<(u32, u32)> = Vec::with_capacity(candidates.len());
                        for &id in &candidates {
                            let src = self.interner.translate(id, &g_eff)?;
                            let own = state.read(id);
                            let moved = state.read(src);
                            let own_t = (own / stride) % size;
                            let moved_t = (moved / stride) % size;
                            let combined =
                                own.wrapping_add(moved_t.wrapping_sub(own_t).wrapping_mul(stride));
                            scratch.push((id, combined));
                        }
                        state.cur += 1;
                        for (id, v) in scratch {
                            if v != state.default {
                                state.write(id, v);
                            }
                        }
                    }
                }
                Ok(())
            }
        }
    }

    // -- pattern evaluation -------------------------------------------------

    /// Per-track dependency set of a word at the given output cells.
    pub fn needed_support(
        &mut self,
        word: &AutWord,
        out_cells: &[GroupElement],
    ) -> Result<BTreeMap<GroupElement, u32>, CaError> {
        if word.letter_count() > 50_000 {
            return Err(CaError::WordTooLong(word.letter_count()));
        }
        let letters = word.flatten();
        let full: u32 = (1u32 << self.alphabet.track_count()) - 1;
        let mut needs: HashMap<GroupElement, u32> = out_cells.iter().map(|g| (g.clone(), full)).collect();
        for letter in &letters {
            self.check_letter(letter)?;
            match letter.gen.as_ref() {
                PautGen::SymbolPerm { .. } => {
                    for mask in needs.values_mut() {
                        if *mask != 0 {
                            *mask = full;
                        }
                    }
                }
                PautGen::PartialShift { g, track } => {
                    let g_eff = if letter.inverted { self.inverse_of(g)? } else { g.clone() };
                    let bit = 1u32 << *track;
                    let mut next: HashMap<GroupElement, u32> = HashMap::with_capacity(needs.len() * 2);
                    for (cell, mask) in needs {
                        if mask & bit != 0 {
                            let shifted = self.group.multiply(&cell, &g_eff)?;
                            *next.entry(shifted).or_insert(0) |= bit;
                        }
                        let rest = mask & !bit;
                        if rest != 0 {
                            *next.entry(cell).or_insert(0) |= rest;
                        }
                    }
                    needs = next;
                }
            }
        }
        Ok(needs.into_iter().collect())
    }

    /// Evaluates the composed map at `out` on a finite pattern, failing when
    /// the pattern does not cover a needed cell.
    pub fn eval_pattern_at(
        &mut self,
        word: &AutWord,
        pattern: &Pattern,
        out: &GroupElement,
    ) -> Result<usize, CaError> {
        if word.letter_count() > 50_000 {
            return Err(CaError::WordTooLong(word.letter_count()));
        }
        let letters = word.flatten();
        let cells: HashMap<u32, usize> = pattern
            .cells
            .iter()
            .map(|(g, &s)| (self.interner.intern(g.clone()), s))
            .collect();
        let out_id = self.interner.intern(out.clone());
        let mut memo: HashMap<u64, usize> = HashMap::new();
        let parts: Vec<usize> = (0..self.alphabet.track_count())
            .map(|t| self.value_track(&letters, 0, out_id, t, &cells, &mut memo))
            .collect::<Result<_, _>>()?;
        Ok(self.alphabet.pack(&parts))
    }

    /// Value of track `t` of stage `i` at the interned `cell`; stage `i` is
    /// the composition of letters `i..` applied to the pattern. The
    /// per-track recursion demands exactly the cells reported by
    /// `needed_support`.
    fn value_track(
        &mut self,
        letters: &[AutLetter],
        i: usize,
        cell: u32,
        t: usize,
        cells: &HashMap<u32, usize>,
        memo: &mut HashMap<u64, usize>,
    ) -> Result<usize, CaError> {
        let key = ((i as u64) << 40) | ((cell as u64) << 8) | t as u64;
        if let Some(&v) = memo.get(&key) {
            return Ok(v);
        }
        let v = if i == letters.len() {
            let full = *cells
                .get(&cell)
                .ok_or_else(|| CaError::InsufficientSupport(self.interner.elems[cell as usize].clone()))?;
            self.alphabet.get_track(full, t)
        } else {
            let letter = letters[i].clone();
            self.check_letter(&letter)?;
            match letter.gen.as_ref() {
                PautGen::SymbolPerm { perm } => {
                    let parts: Vec<usize> = (0..self.alphabet.track_count())
                        .map(|tt| self.value_track(letters, i + 1, cell, tt, cells, memo))
                        .collect::<Result<_, _>>()?;
                    let inner = self.alphabet.pack(&parts);
                    let image = if letter.inverted {
                        perm.inverse().apply(inner)
                    } else {
                        perm.apply(inner)
                    };
                    self.alphabet.get_track(image, t)
                }
                PautGen::PartialShift { g, track } => {
                    if *track == t {
                        let g_eff = if letter.inverted { self.inverse_of(g)? } else { g.clone() };
                        let shifted = self.interner.translate(cell, &g_eff)?;
                        self.value_track(letters, i + 1, shifted, t, cells, memo)?
                    } else {
                        self.value_track(letters, i + 1, cell, t, cells, memo)?
                    }
                }
            }
        };
        memo.insert(key, v);
        Ok(v)
    }
}

// ---------------------------------------------------------------------------
// Word problem oracle
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Trivial,
    Nontrivial(Pattern),
    Unknown,
}

/// Decides triviality of a word. Exhaustive over the dependency cells when
/// the pattern space fits in `budget`; otherwise tries the supplied seed
/// patterns and `samples` random patterns and returns `Unknown` on
/// exhaustion. Trivial/Nontrivial verdicts are always sound.
pub fn is_trivial(
    engine: &mut Engine,
    word: &AutWord,
    budget: u64,
    seeds: &[Pattern],
    samples: u64,
    rng: &mut impl Rng,
) -> Result<Verdict, CaError> {
    let id = engine.group.identity();
    let needs = engine.needed_support(word, std::slice::from_ref(&id))?;
    let mut cells: Vec<GroupElement> = needs.into_keys().collect();
    if !cells.contains(&id) {
        cells.push(id.clone());
        cells.sort();
    }
    let a = engine.alphabet.flat_size() as u64;
    let space: u64 = a.checked_pow(cells.len() as u32).unwrap_or(u64::MAX);
    if space <= budget {
        let mut assignment = vec![0usize; cells.len()];
        loop {
            let pattern = Pattern {
                cells: cells.iter().cloned().zip(assignment.iter().copied()).collect(),
            };
            let got = engine.eval_pattern_at(word, &pattern, &id)?;
            if got != pattern.cells[&id] {
                return Ok(Verdict::Nontrivial(pattern));
            }
            // Odometer.
            let mut pos = 0;
            loop {
                if pos == assignment.len() {
                    return Ok(Verdict::Trivial);
                }
                assignment[pos] += 1;
                if assignment[pos] < a as usize {
                    break;
                }
                assignment[pos] = 0;
                pos += 1;
            }
        }
    }
    for seed in seeds {
        let got = engine.eval_pattern_at(word, seed, &id);
        if let Ok(got) = got {
            if seed.cells.contains_key(&id) && got != seed.cells[&id] {
                return Ok(Verdict::Nontrivial(seed.clone()));
            }
        }
    }
    for _ in 0..samples {
        let pattern = Pattern {
            cells: cells
                .iter()
                .map(|c| (c.clone(), rng.gen_range(0..a as usize)))
                .collect(),
        };
        let got = engine.eval_pattern_at(word, &pattern, &id)?;
        if got != pattern.cells[&id] {
            return Ok(Verdict::Nontrivial(pattern));
        }
    }
    Ok(Verdict::Unknown)
}

/// Applies a word to a `Z^d` periodic point; the period must be at least
/// `2·radius + 1` in each direction.
pub fn act_on_periodic(
    d: usize,
    alphabet: &ProductAlphabet,
    word: &AutWord,
    point: &PeriodicPoint,
) -> Result<PeriodicPoint, CaError> {
    let need = 2 * word.radius() as i64 + 1;
    for &p in &point.periods {
        if p < need {
            return Err(CaError::PeriodTooSmall(p, need));
        }
    }
    let mut engine = Engine::new_periodic(d, point.periods.clone(), alphabet.clone());
    // Materialize the whole fundamental domain (default is irrelevant).
    let mut config = Config::uniform(0);
    let mut coords = vec![0i64; d];
    loop {
        config
            .cells
            .insert(GroupElement::Zd(coords.clone()), point.get(&coords));
        let mut pos = 0;
        loop {
            if pos == d {
                // Full sweep done: apply and read back.
                let out = engine.apply(word, &config)?;
                let mut values = vec![0usize; point.values.len()];
                let mut c = vec![0i64; d];
                'outer: loop {
                    values[point.index(&c)] = out.get(&GroupElement::Zd(c.clone()));
                    let mut p = 0;
                    loop {
                        if p == d {
                            break 'outer;
                        }
                        c[p] += 1;
                        if c[p] < point.periods[p] {
                            break;
                        }
                        c[p] = 0;
                        p += 1;
                    }
                }
                return Ok(PeriodicPoint::new(point.periods.clone(), values));
            }
            coords[pos] += 1;
            if coords[pos] < point.periods[pos] {
                break;
            }
            coords[pos] = 0;
            pos += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// PAut gadgets: conditional permutations controlled by a C-value at an offset
// ---------------------------------------------------------------------------

/// Direct reference semantics for the gadgets, used as oracles.
#[derive(Clone, Debug)]
pub enum ReferenceAut {
    /// Applies `perm` to the `c_track` of the symbol at `g` if the
    /// `c_track`-value at `g·s` equals `c` for every `s` in `sites`.
    Phi { perm: Perm, c: usize, sites: Vec<GroupElement>, c_track: usize },
}

impl ReferenceAut {
    pub fn phi_single(perm: Perm, c: usize, s: GroupElement, c_track: usize) -> ReferenceAut {
        ReferenceAut::Phi { perm, c, sites: vec![s], c_track }
    }

    /// Cells read relative to the evaluation cell.
    pub fn reads(&self) -> Vec<GroupElement> {
        match self {
            ReferenceAut::Phi { sites, .. } => sites.clone(),
        }
    }

    pub fn eval_at(
        &self,
        group: &Group,
        alphabet: &ProductAlphabet,
        read: &mut dyn FnMut(&GroupElement) -> Result<usize, CaError>,
        cell: &GroupElement,
    ) -> Result<usize, CaError> {
        match self {
            ReferenceAut::Phi { perm, c, sites, c_track } => {
                let own = read(cell)?;
                let mut fire = true;
                for s in sites {
                    let there = read(&group.multiply(cell, s)?)?;
                    if alphabet.get_track(there, *c_track) != *c {
                        fire = false;
                        break;
                    }
                }
                Ok(if fire {
                    let cv = alphabet.get_track(own, *c_track);
                    alphabet.set_track(own, *c_track, perm.apply(cv))
                } else {
                    own
                })
            }
        }
    }

    /// Applies the reference simultaneously to a whole finite-support
    /// configuration, including the action on the default symbol (a cell
    /// whose entire neighborhood is default may fire too).
    pub fn apply_config(
        &self,
        group: &Group,
        alphabet: &ProductAlphabet,
        config: &Config,
    ) -> Result<Config, CaError> {
        let mut touched: Vec<GroupElement> = config.cells.keys().cloned().collect();
        // Cells whose condition sites are in the support may fire too.
        for s in self.reads() {
            let s_inv = group.inverse(&s)?;
            for g in config.cells.keys() {
                touched.push(group.multiply(g, &s_inv)?);
            }
        }
        touched.sort();
        touched.dedup();
        let default_read = config.default;
        let mut read_default = |_: &GroupElement| -> Result<usize, CaError> { Ok(default_read) };
        let new_default =
            self.eval_at(group, alphabet, &mut read_default, &group.identity())?;
        let mut out = Config::uniform(new_default);
        for cell in touched {
            let mut read = |g: &GroupElement| -> Result<usize, CaError> { Ok(config.get(g)) };
            let v = self.eval_at(group, alphabet, &mut read, &cell)?;
            out.set(cell, v);
        }
        Ok(out)
    }
}

/// Builds `φ_{π, c, s}` over PAut generators: applies `π` to the C-track at
/// `g` if the C-value at `gs` is `c`. The phase track counts through its
/// values so that exactly one conjugate of the inner commutator fires.
pub fn build_phi_single(
    group: &Group,
    alphabet: &ProductAlphabet,
    c_track: usize,
    phase_track: usize,
    perm: &Perm,
    c: usize,
    s: &GroupElement,
) -> Result<AutWord, CaError> {
    let c_size = alphabet.tracks[c_track];
    let b_size = alphabet.tracks[phase_track];
    if c_track == phase_track || c_track >= alphabet.track_count() || phase_track >= alphabet.track_count() {
        return Err(CaError::Gadget("phase track must differ from the C track".into()));
    }
    if b_size < 2 {
        return Err(CaError::Gadget("phase track needs at least 2 symbols".into()));
    }
    if perm.domain_size() != c_size {
        return Err(CaError::Gadget("permutation does not act on the C track".into()));
    }
    if perm.moves(c) {
        return Err(CaError::Gadget("control value must avoid the permutation support".into()));
    }
    if !perm.is_even() {
        return Err(PermError::OddPermutation.into());
    }
    let _ = group;
    let pair = perm.decompose_avoiding(Some(c), 2)?;
    let (p0, p1) = (&pair[0], &pair[1]);

    // θ_b: apply π_b on the C track if the phase at gs is b.
    let theta_b = |pb: &Perm, b: usize| -> Result<AutWord, CaError> {
        let rho = alphabet.perm_from_fn(|parts| {
            let mut out = parts.to_vec();
            if parts[phase_track] == b {
                out[c_track] = pb.apply(parts[c_track]);
            }
            out
        })?;
        let shift = AutWord::partial_shift(s.clone(), phase_track);
        Ok(shift.inverse().compose(&AutWord::symbol_perm(rho)).compose(&shift))
    };
    // θ: swap phases 0 and 1 where the C value is c.
    let theta = AutWord::symbol_perm(alphabet.perm_from_fn(|parts| {
        let mut out = parts.to_vec();
        if parts[c_track] == c && parts[phase_track] < 2 {
            out[phase_track] = 1 - parts[phase_track];
        }
        out
    })?);
    // θ': full rotation of the phase track.
    let theta_rot = AutWord::symbol_perm(alphabet.perm_from_fn(|parts| {
        let mut out = parts.to_vec();
        out[phase_track] = (parts[phase_track] + 1) % b_size;
        out
    })?);

    let inner = AutWord::commutator(&theta_b(p0, 0)?, &AutWord::conjugate(&theta_b(p1, 1)?, &theta));
    let mut factors = Vec::with_capacity(b_size);
    let mut rot_power = AutWord::identity();
    for _ in 0..b_size {
        factors.push(AutWord::conjugate(&inner, &rot_power));
        rot_power = rot_power.compose(&theta_rot);
    }
    Ok(AutWord::compose_all(&factors))
}

/// Builds `φ_{π, c, S}` as the nested commutator of single-site gadgets,
/// with `π = [π_1, .., π_ℓ]` and every factor avoiding `c`.
pub fn build_phi_set(
    group: &Group,
    alphabet: &ProductAlphabet,
    c_track: usize,
    phase_track: usize,
    perm: &Perm,
    c: usize,
    sites: &[GroupElement],
) -> Result<AutWord, CaError> {
    if sites.is_empty() {
        return Err(CaError::Gadget("site set must be nonempty".into()));
    }
    if sites.len() == 1 {
        return build_phi_single(group, alphabet, c_track, phase_track, perm, c, &sites[0]);
    }
    if alphabet.tracks[c_track] < 6 {
        return Err(CaError::Gadget("C track needs at least 6 symbols for set gadgets".into()));
    }
    let parts = perm.decompose_avoiding(Some(c), sites.len())?;
    let words: Vec<AutWord> = parts
        .iter()
        .zip(sites)
        .map(|(p, s)| build_phi_single(group, alphabet, c_track, phase_track, p, c, s))
        .collect::<Result<_, _>>()?;
    Ok(AutWord::nested_commutator(&words))
}

/// Compares a word and a reference automorphism on one finite-support
/// configuration, exactly, over the whole group (defaults included).
/// Returns a witness cell on mismatch.
pub fn word_vs_reference_on_config(
    engine: &mut Engine,
    word: &AutWord,
    reference: &ReferenceAut,
    config: &Config,
) -> Result<Option<GroupElement>, CaError> {
    let got = engine.apply(word, config)?;
    let want = reference.apply_config(&engine.group, &engine.alphabet, config)?;
    if got.default != want.default {
        return Ok(Some(engine.group.identity()));
    }
    for cell in got.cells.keys().chain(want.cells.keys()) {
        if got.get(cell) != want.get(cell) {
            return Ok(Some(cell.clone()));
        }
    }
    Ok(None)
}
