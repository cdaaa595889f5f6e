//! The tree-acceptance reduction over a free monoid: configurations over
//! `C × {a,b,?} × (Σ ∪ Q×Σ)` on the rank-3 free group encode binary trees
//! of machine configurations along `{a,b}`-cosets, with per-node data read
//! on `c`-power cells. A node is valid when its address word has the
//! `x?^j` form, its machine word is a one-head configuration, the root
//! address carries the initial configuration and full addresses carry
//! accepting ones. Ripple catching over this graph yields a word that acts
//! nontrivially exactly when an accepting computation tree exists.

use std::collections::HashMap;
use std::rc::Rc;

use rand::Rng;

use crate::barrington::{conf_head, conf_plain, step_relation_blocks, Compiler};
use crate::ca::{build_phi_set, AutWord, Config, Engine, Pattern, ProductAlphabet, Verdict};
use crate::formula::{self, BoolFormula, ControlSpace, CtrlAlphabet};
use crate::groups::{FreeWord, Group, GroupElement};
use crate::machines::{steps, tree_accepts, Id, IdSym, Ndtm};
use crate::perm::Perm;
use crate::ripple::{build_catcher, RippleGen};

use super::zd::{map_permword, CtrlLayout};
use super::BuildError;

pub const TRACK_C: usize = 0;
pub const TRACK_B: usize = 1;
pub const TRACK_W: usize = 2;
pub const B_PAD: usize = 2; // the '?' symbol

/// Letters of the ambient free group: a, b carry the tree, c carries data.
fn letter(i: usize) -> GroupElement {
    GroupElement::Free(FreeWord::generator(i))
}

/// `t·c^i` as a free-group element for a path `t` over `{a, b}`.
fn path_cell(path: &[usize], i: usize) -> GroupElement {
    let mut w = FreeWord::identity();
    for &t in path {
        w = w.concat(&FreeWord::generator(t));
    }
    for _ in 0..i {
        w = w.concat(&FreeWord::generator(2));
    }
    GroupElement::Free(w)
}

/// Fixed context of one reduction instance.
pub struct Reduction {
    pub group: Group,
    pub alphabet: ProductAlphabet,
    pub t0: Ndtm,
    pub t1: Ndtm,
    pub input: Vec<usize>,
    pub n: usize,
    pub perm: Perm,
    pub c_count: usize,
}

impl Reduction {
    pub fn new(
        t0: &Ndtm,
        t1: &Ndtm,
        input: &[usize],
        c_count: usize,
        perm: &Perm,
    ) -> Result<Reduction, BuildError> {
        let n = input.len();
        if !t0.same_interface(t1) {
            return Err(BuildError::Invalid("machines must share their interface".into()));
        }
        if n == 0 || !n.is_power_of_two() || n > 4 {
            return Err(BuildError::Budget(format!("input length {n} outside the desk scale")));
        }
        if c_count < 6 || !perm.is_even() || perm.is_identity() {
            return Err(BuildError::Invalid("need an even nontrivial permutation on at least 6 colors".into()));
        }
        let w_count = t0.tape_count() * (1 + t0.state_count());
        let alphabet = ProductAlphabet::new(vec![c_count, 3, w_count]);
        Ok(Reduction {
            group: Group::free(3),
            alphabet,
            t0: t0.clone(),
            t1: t1.clone(),
            input: input.to_vec(),
            n,
            perm: perm.clone(),
            c_count,
        })
    }

    fn w_symbol(&self, sym: IdSym) -> usize {
        match sym {
            IdSym::Sym(s) => conf_plain(&self.t0, s),
            IdSym::Head(q, s) => conf_head(&self.t0, q, s),
        }
    }

    fn plain_syms(&self) -> Vec<usize> {
        (0..self.t0.tape_count()).collect()
    }

    fn head_syms(&self) -> Vec<usize> {
        let t = &self.t0;
        (0..t.state_count())
            .flat_map(|q| (0..t.tape_count()).map(move |s| conf_head(t, q, s)))
            .collect()
    }

    fn accepting_head_syms(&self) -> Vec<usize> {
        let t = &self.t0;
        (0..t.state_count())
            .filter(|&q| t.accept[q])
            .flat_map(|q| (0..t.tape_count()).map(move |s| conf_head(t, q, s)))
            .collect()
    }

    fn init_word(&self) -> Vec<usize> {
        Id::initial(&self.t0, &self.input)
            .cells()
            .iter()
            .map(|&c| self.w_symbol(c))
            .collect()
    }

    // -- formulas over the 6n-position control layout -----------------------

    /// Positions: for block in {ε, a, b}: B-track cells, then W-track cells.
    fn layout(&self) -> CtrlLayout {
        let b_alpha = CtrlAlphabet::new(["a", "b", "?"]);
        let w_alpha = CtrlAlphabet::new(
            (0..self.alphabet.tracks[TRACK_W])
                .map(|i| format!("w{i}"))
                .collect::<Vec<_>>(),
        );
        let mut reads = Vec::new();
        let mut alphabets = Vec::new();
        for block in [vec![], vec![0usize], vec![1usize]] {
            for i in 0..self.n {
                reads.push((path_cell(&block, i), TRACK_B));
                alphabets.push(b_alpha.clone());
            }
            for i in 0..self.n {
                reads.push((path_cell(&block, i), TRACK_W));
                alphabets.push(w_alpha.clone());
            }
        }
        CtrlLayout { reads, space: ControlSpace { alphabets } }
    }

    fn b_pos(&self, block: usize) -> Vec<usize> {
        (0..self.n).map(|i| block * 2 * self.n + i).collect()
    }

    fn w_pos(&self, block: usize) -> Vec<usize> {
        (0..self.n).map(|i| block * 2 * self.n + self.n + i).collect()
    }

    /// Address word is exactly `{a,b}^p ?^(n-p)`.
    fn shape_exact(&self, b_pos: &[usize], p: usize) -> BoolFormula {
        let mut parts = Vec::new();
        if p > 0 {
            parts.push(formula::all_in_set(&b_pos[..p], &[0, 1]));
        }
        if p < self.n {
            parts.push(formula::all_in_set(&b_pos[p..], &[B_PAD]));
        }
        formula::and_all(parts)
    }

    /// Exactly one head symbol whose head set is `heads`.
    fn one_head(&self, w_pos: &[usize], heads: &[usize]) -> BoolFormula {
        let plain = self.plain_syms();
        formula::or_disjoint_all(
            (0..self.n)
                .map(|h| {
                    let mut parts = vec![formula::position_in(w_pos[h], heads)];
                    let others: Vec<usize> = w_pos
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != h)
                        .map(|(_, &p)| p)
                        .collect();
                    if !others.is_empty() {
                        parts.push(formula::all_in_set(&others, &plain));
                    }
                    formula::and_all(parts)
                })
                .collect(),
        )
    }

    /// Full node validity of one block.
    fn node_formula(&self, block: usize) -> BoolFormula {
        let b = self.b_pos(block);
        let w = self.w_pos(block);
        let shape = formula::or_disjoint_all(
            (0..=self.n).map(|p| self.shape_exact(&b, p)).collect(),
        );
        let one_head = self.one_head(&w, &self.head_syms());
        let init_gate = formula::implies(
            formula::all_in_set(&b, &[B_PAD]),
            formula::fixed_word(&w, &self.init_word()),
        );
        let final_gate = formula::implies(
            formula::all_in_set(&b, &[0, 1]),
            self.one_head(&w, &self.accepting_head_syms()),
        );
        formula::and_all(vec![shape, one_head, init_gate, final_gate])
    }

    /// Node validity with address prefix exactly `rank`.
    fn rank_formula(&self, rank: usize) -> BoolFormula {
        let b = self.b_pos(0);
        let w = self.w_pos(0);
        let init_gate = formula::implies(
            formula::all_in_set(&b, &[B_PAD]),
            formula::fixed_word(&w, &self.init_word()),
        );
        let final_gate = formula::implies(
            formula::all_in_set(&b, &[0, 1]),
            self.one_head(&w, &self.accepting_head_syms()),
        );
        formula::and_all(vec![
            self.shape_exact(&b, rank),
            self.one_head(&w, &self.head_syms()),
            init_gate,
            final_gate,
        ])
    }

    /// The cell, its a-child and its b-child are all valid nodes, addresses
    /// append the edge letter, and machine words step by the edge machine.
    fn successful_formula(&self) -> BoolFormula {
        let mut parts = vec![self.node_formula(0), self.node_formula(1), self.node_formula(2)];
        for (block, appended, machine) in [(1usize, 0usize, &self.t0), (2, 1, &self.t1)] {
            parts.push(formula::tail_append_blocks(
                &self.b_pos(0),
                &self.b_pos(block),
                &[0, 1],
                B_PAD,
                appended,
            ));
            parts.push(step_relation_blocks(machine, &self.w_pos(0), &self.w_pos(block)));
        }
        formula::and_all(parts)
    }

    /// Builds the reduction word: the abstract catcher with φ letters
    /// realized by two-site conditional permutations and γ/β letters
    /// compiled from the successfulness/rank formulas.
    pub fn build_word(&self) -> Result<AutWord, BuildError> {
        let skeleton = build_catcher(self.c_count, self.n as u32, &self.perm)?;
        let layout = self.layout();
        let successful = self.successful_formula();
        let sites = vec![letter(0), letter(1)];
        let mut compiler = Compiler::new(self.c_count);
        let mut phi_cache: HashMap<(String, usize), Rc<AutWord>> = HashMap::new();
        let mut ctrl_cache: HashMap<(String, usize, usize), Rc<AutWord>> = HashMap::new();
        let mut word_cache: HashMap<(String, String), Rc<AutWord>> = HashMap::new();
        let mut out = AutWord::identity();
        for (gen, inverted) in skeleton.flatten() {
            let block: Rc<AutWord> = match &gen {
                RippleGen::Phi { perm, c } => {
                    let key = (perm.to_string(), *c);
                    match phi_cache.get(&key) {
                        Some(b) => b.clone(),
                        None => {
                            let w = build_phi_set(
                                &self.group,
                                &self.alphabet,
                                TRACK_C,
                                TRACK_B,
                                perm,
                                *c,
                                &sites,
                            )?;
                            let rc = Rc::new(w);
                            phi_cache.insert(key, rc.clone());
                            rc
                        }
                    }
                }
                RippleGen::Gamma { perm } => {
                    let key = (perm.to_string(), "succ".to_string());
                    match word_cache.get(&key) {
                        Some(b) => b.clone(),
                        None => {
                            let pw = compiler.compile(perm, &successful, &layout.space)?;
                            let w = map_permword(&self.alphabet, TRACK_C, &layout, &pw, &mut ctrl_cache)?;
                            let rc = Rc::new(w);
                            word_cache.insert(key, rc.clone());
                            rc
                        }
                    }
                }
                RippleGen::Beta { perm, rank } => {
                    let key = (perm.to_string(), format!("rank{rank}"));
                    match word_cache.get(&key) {
                        Some(b) => b.clone(),
                        None => {
                            let pw =
                                compiler.compile(perm, &self.rank_formula(*rank as usize), &layout.space)?;
                            let w = map_permword(&self.alphabet, TRACK_C, &layout, &pw, &mut ctrl_cache)?;
                            let rc = Rc::new(w);
                            word_cache.insert(key, rc.clone());
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

    // -- direct semantics ----------------------------------------------------

    /// Reads the node data at `g`: the address prefix and the machine word,
    /// or `None` when the cell is not a valid node.
    pub fn node_at(&self, config: &Config, g: &GroupElement) -> Option<(Vec<usize>, Id)> {
        let base = match g {
            GroupElement::Free(w) => w.clone(),
            _ => return None,
        };
        let mut address = Vec::new();
        let mut machine = Vec::new();
        for i in 0..self.n {
            let mut w = base.clone();
            for _ in 0..i {
                w = w.concat(&FreeWord::generator(2));
            }
            let sym = config.get(&GroupElement::Free(w));
            address.push(self.alphabet.get_track(sym, TRACK_B));
            machine.push(self.alphabet.get_track(sym, TRACK_W));
        }
        // Shape x?^j.
        let prefix_len = address.iter().position(|&s| s == B_PAD).unwrap_or(self.n);
        if address[..prefix_len].iter().any(|&s| s >= 2)
            || address[prefix_len..].iter().any(|&s| s != B_PAD)
        {
            return None;
        }
        // One-head machine word.
        let t = &self.t0;
        let cells: Vec<IdSym> = machine
            .iter()
            .map(|&s| {
                if s < t.tape_count() {
                    IdSym::Sym(s)
                } else {
                    let h = s - t.tape_count();
                    IdSym::Head(h / t.tape_count(), h % t.tape_count())
                }
            })
            .collect();
        let id = Id::new(cells).ok()?;
        if prefix_len == 0 && id != Id::initial(t, &self.input) {
            return None;
        }
        if prefix_len == self.n && !id.is_accepting(t) {
            return None;
        }
        Some((address[..prefix_len].to_vec(), id))
    }

    fn successful_at(&self, config: &Config, g: &GroupElement, path: &[usize]) -> bool {
        let Some((prefix, id)) = self.node_at(config, g) else { return false };
        for (t, machine) in [(0usize, &self.t0), (1, &self.t1)] {
            let child = self.group.multiply(g, &letter(t)).unwrap();
            let Some((cprefix, cid)) = self.node_at(config, &child) else { return false };
            let mut want = prefix.clone();
            want.push(t);
            if cprefix != want || !steps(machine, &id).contains(&cid) {
                return false;
            }
        }
        let _ = path;
        true
    }

    /// Direct cone semantics: applies the permutation at every cell that
    /// roots an encoded accepting computation tree.
    pub fn reference(&self, config: &Config) -> Result<Config, BuildError> {
        // Candidate roots: cells whose data window touches the support.
        let mut paths: Vec<Vec<usize>> = vec![vec![]];
        let mut layer: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..self.n {
            layer = layer
                .iter()
                .flat_map(|p| {
                    [0usize, 1].iter().map(move |&t| {
                        let mut q = p.clone();
                        q.push(t);
                        q
                    })
                })
                .collect();
            paths.extend(layer.iter().cloned());
        }
        let mut candidates = Vec::new();
        for g in config.cells.keys() {
            for p in &paths {
                for i in 0..self.n {
                    let read = path_cell(p, i);
                    let inv = self.group.inverse(&read).unwrap();
                    candidates.push(self.group.multiply(g, &inv).unwrap());
                }
            }
        }
        candidates.sort();
        candidates.dedup();
        let mut out = config.clone();
        let mut memo: HashMap<(GroupElement, usize), bool> = HashMap::new();
        for root in candidates {
            let Some((prefix, _)) = self.node_at(config, &root) else { continue };
            if !prefix.is_empty() {
                continue;
            }
            if !self.successful_at(config, &root, &[]) {
                continue;
            }
            let fires = [0usize, 1].iter().all(|&t| {
                let child = self.group.multiply(&root, &letter(t)).unwrap();
                self.active(config, &child, 1, &mut memo)
            });
            if fires {
                let sym = config.get(&root);
                let c = self.alphabet.get_track(sym, TRACK_C);
                out.set(root.clone(), self.alphabet.set_track(sym, TRACK_C, self.perm.apply(c)));
            }
        }
        Ok(out)
    }

    fn active(
        &self,
        config: &Config,
        v: &GroupElement,
        depth: usize,
        memo: &mut HashMap<(GroupElement, usize), bool>,
    ) -> bool {
        if let Some(&hit) = memo.get(&(v.clone(), depth)) {
            return hit;
        }
        let ok = (|| {
            let Some((prefix, _)) = self.node_at(config, v) else { return false };
            if prefix.len() != depth {
                return false;
            }
            if self.alphabet.get_track(config.get(v), TRACK_C) != 0 {
                return false;
            }
            if depth == self.n {
                return true;
            }
            self.successful_at(config, v, &prefix)
                && [0usize, 1].iter().all(|&t| {
                    let child = self.group.multiply(v, &letter(t)).unwrap();
                    self.active(config, &child, depth + 1, memo)
                })
        })();
        memo.insert((v.clone(), depth), ok);
        ok
    }

    // -- witnesses ----------------------------------------------------------

    /// Extracts one accepting computation tree, if any.
    pub fn accepting_tree(&self) -> Option<HashMap<Vec<usize>, Id>> {
        fn search(
            t0: &Ndtm,
            t1: &Ndtm,
            id: &Id,
            path: Vec<usize>,
            remaining: usize,
            out: &mut HashMap<Vec<usize>, Id>,
        ) -> bool {
            out.insert(path.clone(), id.clone());
            if remaining == 0 {
                return id.is_accepting(t0);
            }
            for (t, machine) in [(0usize, t0), (1, t1)] {
                let mut child_path = path.clone();
                child_path.push(t);
                let ok = steps(machine, id).into_iter().any(|child| {
                    search(t0, t1, &child, child_path.clone(), remaining - 1, out)
                });
                if !ok {
                    return false;
                }
            }
            true
        }
        // Depth-first with backtracking over nondeterministic steps.
        fn search_bt(
            t0: &Ndtm,
            t1: &Ndtm,
            id: &Id,
            remaining: usize,
        ) -> Option<HashMap<Vec<usize>, Id>> {
            if remaining == 0 {
                return id.is_accepting(t0).then(|| {
                    let mut m = HashMap::new();
                    m.insert(Vec::new(), id.clone());
                    m
                });
            }
            let mut options: Vec<HashMap<Vec<usize>, Id>> = Vec::new();
            for (t, machine) in [(0usize, t0), (1, t1)] {
                let sub = steps(machine, id)
                    .into_iter()
                    .find_map(|child| search_bt(t0, t1, &child, remaining - 1));
                match sub {
                    None => return None,
                    Some(m) => {
                        let mut prefixed = HashMap::new();
                        for (p, v) in m {
                            let mut q = vec![t];
                            q.extend(p);
                            prefixed.insert(q, v);
                        }
                        options.push(prefixed);
                    }
                }
            }
            let mut out = HashMap::new();
            out.insert(Vec::new(), id.clone());
            for m in options {
                out.extend(m);
            }
            Some(out)
        }
        let _ = search;
        search_bt(&self.t0, &self.t1, &Id::initial(&self.t0, &self.input), self.n)
    }

    /// Encodes a computation tree as a configuration, with the given
    /// C-value at the root and zeros on the other tree nodes.
    pub fn encode_tree(&self, tree: &HashMap<Vec<usize>, Id>, root_c: usize) -> Config {
        let mut config = Config::uniform(self.default_symbol());
        for (path, id) in tree {
            for i in 0..self.n {
                let cell = path_cell(path, i);
                let b = if i < path.len() { path[i] } else { B_PAD };
                let w = self.w_symbol(id.cells()[i]);
                let c = if i == 0 && path.is_empty() {
                    root_c
                } else if i == 0 {
                    0
                } else {
                    self.alphabet.get_track(config.get(&cell), TRACK_C)
                };
                config.set(cell, self.alphabet.pack(&[c, b, w]));
            }
        }
        config
    }

    /// Background symbol: C = 0, address `?`, machine blank. Not a valid
    /// node (no head), so the uniform background never fires.
    pub fn default_symbol(&self) -> usize {
        self.alphabet.pack(&[0, B_PAD, conf_plain(&self.t0, self.t0.blank)])
    }

    /// Decides triviality of the reduction word by structured search: the
    /// only possible witnesses are encoded accepting trees, which the
    /// acceptance search enumerates exhaustively; sampled configurations
    /// double-check word/reference agreement on the trivial side.
    pub fn is_trivial_structured(
        &self,
        engine: &mut Engine,
        word: &AutWord,
        samples: usize,
        rng: &mut impl Rng,
    ) -> Result<Verdict, BuildError> {
        if tree_accepts(&self.t0, &self.t1, &self.input)? {
            let tree = self
                .accepting_tree()
                .ok_or_else(|| BuildError::Invalid("acceptance without a tree".into()))?;
            let root_c = (0..self.c_count)
                .find(|&c| self.perm.moves(c))
                .expect("nontrivial permutation");
            let config = self.encode_tree(&tree, root_c);
            let moved = engine.apply(word, &config)?;
            let root = self.group.identity();
            if moved.get(&root) == config.get(&root) {
                return Err(BuildError::Invalid(
                    "witness configuration not moved by the word".into(),
                ));
            }
            let witness = Pattern { cells: config.cells.clone() };
            return Ok(Verdict::Nontrivial(witness));
        }
        // Rejecting input: check agreement and no-fire on sampled
        // configurations (random and near-tree).
        for _ in 0..samples {
            let config = self.random_probe(rng);
            let got = engine.apply(word, &config)?;
            let want = self.reference(&config)?;
            if got != want {
                return Err(BuildError::Invalid("word and reference disagree".into()));
            }
            if want != config {
                return Ok(Verdict::Nontrivial(Pattern { cells: config.cells.clone() }));
            }
        }
        Ok(Verdict::Trivial)
    }

    /// A random configuration biased toward near-trees: a partial tree
    /// encoding with random perturbations.
    pub fn random_probe(&self, rng: &mut impl Rng) -> Config {
        let mut config = Config::uniform(self.default_symbol());
        // Random partial tree of IDs.
        let mut frontier = vec![(Vec::<usize>::new(), Id::initial(&self.t0, &self.input))];
        let mut all = Vec::new();
        while let Some((path, id)) = frontier.pop() {
            all.push((path.clone(), id.clone()));
            if path.len() >= self.n {
                continue;
            }
            for (t, machine) in [(0usize, &self.t0), (1, &self.t1)] {
                let succ = steps(machine, &id);
                if succ.is_empty() {
                    continue;
                }
                let child = succ[rng.gen_range(0..succ.len())].clone();
                let mut q = path.clone();
                q.push(t);
                frontier.push((q, child));
            }
        }
        let tree: HashMap<Vec<usize>, Id> = all.into_iter().collect();
        let root_c = (0..self.c_count).find(|&c| self.perm.moves(c)).unwrap();
        config = self.encode_tree(&tree, root_c);
        // Perturbations.
        let cells: Vec<GroupElement> = config.cells.keys().cloned().collect();
        for _ in 0..rng.gen_range(0..4) {
            if cells.is_empty() {
                break;
            }
            let cell = cells[rng.gen_range(0..cells.len())].clone();
            let sym = rng.gen_range(0..self.alphabet.flat_size());
            config.set(cell, sym);
        }
        config
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::toy_tree_pair;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn reduction_for(input: &[usize]) -> Reduction {
        let (t0, t1) = toy_tree_pair();
        let pi = Perm::three_cycle(6, 3, 4, 5).unwrap();
        Reduction::new(&t0, &t1, input, 6, &pi).unwrap()
    }

    #[test]
    fn node_reading() {
        let r = reduction_for(&[0, 1]);
        let mut config = Config::uniform(r.default_symbol());
        // Lay the root node: address ?? and the initial configuration.
        let tree = HashMap::from([(vec![], Id::initial(&r.t0, &r.input))]);
        config = r.encode_tree(&tree, 3);
        let root = r.group.identity();
        let (prefix, id) = r.node_at(&config, &root).unwrap();
        assert!(prefix.is_empty());
        assert_eq!(id, Id::initial(&r.t0, &r.input));
        // Malformed address (pad before letters) is not a node.
        let cell0 = path_cell(&[], 0);
        let sym = config.get(&cell0);
        config.set(cell0, r.alphabet.set_track(sym, TRACK_B, 0));
        assert!(r.node_at(&config, &root).is_none());
    }

    #[test]
    fn accepting_tree_extraction_matches_tree_accepts() {
        let (t0, t1) = toy_tree_pair();
        for input in [[0, 0], [0, 1], [1, 0], [1, 1]] {
            let r = reduction_for(&input);
            let accepted = tree_accepts(&t0, &t1, &input).unwrap();
            assert_eq!(r.accepting_tree().is_some(), accepted, "input {input:?}");
            if let Some(tree) = r.accepting_tree() {
                // Root matches, leaves accept, edges are steps.
                assert_eq!(tree[&vec![]], Id::initial(&t0, &input));
                for (path, id) in &tree {
                    if path.len() == input.len() {
                        assert!(id.is_accepting(&t0));
                    } else {
                        for (t, m) in [(0usize, &t0), (1, &t1)] {
                            let mut q = path.clone();
                            q.push(t);
                            assert!(steps(m, id).contains(&tree[&q]));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn reference_fires_exactly_on_encoded_accepting_trees() {
        let r = reduction_for(&[0, 1]);
        let tree = r.accepting_tree().unwrap();
        let config = r.encode_tree(&tree, 3);
        let out = r.reference(&config).unwrap();
        let root = r.group.identity();
        assert_eq!(
            r.alphabet.get_track(out.get(&root), TRACK_C),
            r.perm.apply(3)
        );
        // Only the root changes.
        let mut diff = 0;
        for cell in out.cells.keys().chain(config.cells.keys()) {
            if out.get(cell) != config.get(cell) {
                diff += 1;
            }
        }
        assert_eq!(diff, 1);
        // A defect anywhere kills it.
        let mut bad = config.clone();
        let cell = path_cell(&[0], 1);
        let sym = bad.get(&cell);
        bad.set(cell, r.alphabet.set_track(sym, TRACK_B, 0));
        assert_eq!(r.reference(&bad).unwrap(), bad);
    }

    #[test]
    fn word_matches_reference_on_probes() {
        let r = reduction_for(&[0, 0]);
        let word = r.build_word().unwrap();
        let mut engine = Engine::new(r.group.clone(), r.alphabet.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..6 {
            let config = r.random_probe(&mut rng);
            let got = engine.apply(&word, &config).unwrap();
            let want = r.reference(&config).unwrap();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn soundness_on_length_two_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for input in [[0, 0], [1, 1]] {
            let r = reduction_for(&input);
            let word = r.build_word().unwrap();
            let mut engine = Engine::new(r.group.clone(), r.alphabet.clone());
            let verdict = r.is_trivial_structured(&mut engine, &word, 4, &mut rng).unwrap();
            let accepted = tree_accepts(&r.t0, &r.t1, &input).unwrap();
            match verdict {
                Verdict::Nontrivial(_) => assert!(accepted, "input {input:?}"),
                Verdict::Trivial => assert!(!accepted, "input {input:?}"),
                Verdict::Unknown => panic!("unexpected unknown"),
            }
        }
    }
}
