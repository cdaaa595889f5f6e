//! The ripple group on finite good S-labeled (C × B)-colored graphs: the
//! generators φ/γ/β, the combined elements ψ, and the ripple-catching
//! element together with its direct-semantics oracle.
//!
//! Graphs store at most one s-successor per node and label (the inverse
//! edges of a good graph are implicit and never used by the generators).
//! No generator ever changes the shape or the B-colors.

use std::collections::HashMap;
use std::rc::Rc;

use rand::Rng;
use thiserror::Error;

use crate::perm::{Perm, PermError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RippleError {
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("rank function violates the successor axiom for label {s}, pair ({b}, {b2})")]
    BadRank { s: usize, b: usize, b2: usize },
    #[error("graph color out of range at node {0}")]
    BadColor(usize),
    #[error("permuted color set needs at least {0} symbols")]
    CTooSmall(usize),
    #[error("control color {0} must avoid the permutation support")]
    ControlInSupport(usize),
    #[error("catcher needs a nontrivial even permutation and depth at least 1")]
    BadCatcher,
}

/// Successor relations `R_s ⊆ B × B` plus a rank function
/// `ρ : B → N ∪ {⊥}` with `ρ(b') = ρ(b) + 1` or `⊥` on related pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuccessorSystem {
    pub s_count: usize,
    pub b_count: usize,
    /// `related[s][b][b']`
    pub related: Vec<Vec<Vec<bool>>>,
    pub rank: Vec<Option<u32>>,
}

impl SuccessorSystem {
    pub fn new(
        s_count: usize,
        b_count: usize,
        pairs: &[(usize, usize, usize)],
        rank: Vec<Option<u32>>,
    ) -> Result<SuccessorSystem, RippleError> {
        assert_eq!(rank.len(), b_count);
        let mut related = vec![vec![vec![false; b_count]; b_count]; s_count];
        for &(s, b, b2) in pairs {
            related[s][b][b2] = true;
        }
        let sys = SuccessorSystem { s_count, b_count, related, rank };
        sys.validate()?;
        Ok(sys)
    }

    fn validate(&self) -> Result<(), RippleError> {
        for s in 0..self.s_count {
            for b in 0..self.b_count {
                for b2 in 0..self.b_count {
                    if !self.related[s][b][b2] {
                        continue;
                    }
                    let ok = match (self.rank[b], self.rank[b2]) {
                        (_, None) => true,
                        (Some(r), Some(r2)) => r2 == r + 1,
                        (None, Some(_)) => false,
                    };
                    if !ok {
                        return Err(RippleError::BadRank { s, b, b2 });
                    }
                }
            }
        }
        Ok(())
    }

    /// B-colors `0..=max_rank` with rank equal to the color and the
    /// increment relation on every label; a trailing `⊥` color related
    /// from everything when `with_bottom` is set.
    pub fn rank_increment(s_count: usize, max_rank: u32, with_bottom: bool) -> SuccessorSystem {
        let ranked = max_rank as usize + 1;
        let b_count = ranked + usize::from(with_bottom);
        let mut pairs = Vec::new();
        for s in 0..s_count {
            for b in 0..max_rank as usize {
                pairs.push((s, b, b + 1));
            }
            if with_bottom {
                for b in 0..b_count {
                    pairs.push((s, b, ranked));
                }
            }
        }
        let mut rank: Vec<Option<u32>> = (0..=max_rank).map(Some).collect();
        if with_bottom {
            rank.push(None);
        }
        SuccessorSystem::new(s_count, b_count, &pairs, rank).unwrap()
    }
}

/// Finite good S-labeled (C × B)-colored graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RippleGraph {
    pub colors_c: Vec<usize>,
    pub colors_b: Vec<usize>,
    /// `succ[node][s]`
    pub succ: Vec<Vec<Option<usize>>>,
}

impl RippleGraph {
    pub fn node_count(&self) -> usize {
        self.colors_c.len()
    }

    pub fn validate(&self, sys: &SuccessorSystem, c_count: usize) -> Result<(), RippleError> {
        for u in 0..self.node_count() {
            if self.colors_c[u] >= c_count
                || self.colors_b[u] >= sys.b_count
                || self.succ[u].len() != sys.s_count
                || self.succ[u].iter().flatten().any(|&v| v >= self.node_count())
            {
                return Err(RippleError::BadColor(u));
            }
        }
        Ok(())
    }

    pub fn to_json(&self, labels: &[&str]) -> serde_json::Value {
        let nodes: Vec<_> = (0..self.node_count())
            .map(|u| serde_json::json!({ "id": u, "c": self.colors_c[u], "b": self.colors_b[u] }))
            .collect();
        let mut edges = Vec::new();
        for u in 0..self.node_count() {
            for (s, v) in self.succ[u].iter().enumerate() {
                if let Some(v) = v {
                    edges.push(serde_json::json!({ "from": u, "to": v, "label": labels[s] }));
                }
            }
        }
        serde_json::json!({ "nodes": nodes, "edges": edges })
    }
}

/// `u` is successful: every s-successor exists and its B-color is an
/// s-successor of `u`'s B-color.
pub fn is_successful(graph: &RippleGraph, sys: &SuccessorSystem, u: usize) -> bool {
    (0..sys.s_count).all(|s| match graph.succ[u][s] {
        Some(v) => sys.related[s][graph.colors_b[u]][graph.colors_b[v]],
        None => false,
    })
}

/// Ripple group generators. Conditions read only the shape, the B-colors,
/// and (for φ) which nodes carry the control color; permutations act on the
/// C-component alone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RippleGen {
    /// Applies `perm` at `u` if every *existing* s-successor of `u` has
    /// C-color `c` (`c` outside the support of `perm`).
    Phi { perm: Perm, c: usize },
    /// Applies `perm` at successful nodes.
    Gamma { perm: Perm },
    /// Applies `perm` at nodes whose B-color has rank `rank`.
    Beta { perm: Perm, rank: u32 },
}

impl RippleGen {
    pub fn phi(perm: Perm, c: usize) -> Result<RippleGen, RippleError> {
        if !perm.is_even() {
            return Err(PermError::OddPermutation.into());
        }
        if perm.moves(c) {
            return Err(RippleError::ControlInSupport(c));
        }
        Ok(RippleGen::Phi { perm, c })
    }

    pub fn gamma(perm: Perm) -> Result<RippleGen, RippleError> {
        if !perm.is_even() {
            return Err(PermError::OddPermutation.into());
        }
        Ok(RippleGen::Gamma { perm })
    }

    pub fn beta(perm: Perm, rank: u32) -> Result<RippleGen, RippleError> {
        if !perm.is_even() {
            return Err(PermError::OddPermutation.into());
        }
        Ok(RippleGen::Beta { perm, rank })
    }

    pub fn perm(&self) -> &Perm {
        match self {
            RippleGen::Phi { perm, .. } | RippleGen::Gamma { perm } | RippleGen::Beta { perm, .. } => perm,
        }
    }

    fn fires_at(&self, graph: &RippleGraph, sys: &SuccessorSystem, u: usize) -> bool {
        match self {
            RippleGen::Phi { c, .. } => (0..sys.s_count).all(|s| match graph.succ[u][s] {
                Some(v) => graph.colors_c[v] == *c,
                None => true,
            }),
            RippleGen::Gamma { .. } => is_successful(graph, sys, u),
            RippleGen::Beta { rank, .. } => sys.rank[graph.colors_b[u]] == Some(*rank),
        }
    }
}

/// Word over ripple generators in composition order (index 0 outermost).
#[derive(Clone, Debug, Default)]
pub struct RippleElement {
    units: Vec<RippleUnit>,
    letters: u64,
}

#[derive(Clone, Debug)]
enum RippleUnit {
    Letter(Rc<RippleGen>, bool),
    Block(Rc<RippleElement>, bool),
}

impl RippleElement {
    pub fn identity() -> RippleElement {
        RippleElement::default()
    }

    pub fn letter(gen: RippleGen) -> RippleElement {
        RippleElement { units: vec![RippleUnit::Letter(Rc::new(gen), false)], letters: 1 }
    }

    pub fn letter_count(&self) -> u64 {
        self.letters
    }

    pub fn compose(&self, rhs: &RippleElement) -> RippleElement {
        let mut units = self.units.clone();
        units.extend(rhs.units.iter().cloned());
        RippleElement { units, letters: self.letters + rhs.letters }
    }

    pub fn compose_all(words: &[RippleElement]) -> RippleElement {
        let mut acc = RippleElement::identity();
        for w in words {
            acc = acc.compose(w);
        }
        acc
    }

    pub fn inverse(&self) -> RippleElement {
        RippleElement {
            units: vec![RippleUnit::Block(Rc::new(self.clone()), true)],
            letters: self.letters,
        }
    }

    pub fn conjugate(a: &RippleElement, b: &RippleElement) -> RippleElement {
        b.inverse().compose(a).compose(b)
    }

    pub fn commutator(a: &RippleElement, b: &RippleElement) -> RippleElement {
        a.inverse().compose(&b.inverse()).compose(a).compose(b)
    }

    pub fn nested_commutator(words: &[RippleElement]) -> RippleElement {
        match words {
            [] => RippleElement::identity(),
            [w] => w.clone(),
            [w, rest @ ..] => RippleElement::commutator(w, &RippleElement::nested_commutator(rest)),
        }
    }

    /// Applies the element to a graph (index-0 unit outermost).
    pub fn apply(&self, graph: &RippleGraph, sys: &SuccessorSystem) -> RippleGraph {
        let mut out = graph.clone();
        self.apply_units(false, &mut out, sys);
        out
    }

    /// Flattens to primitive letters in composition order.
    pub fn flatten(&self) -> Vec<(RippleGen, bool)> {
        let mut out = Vec::with_capacity(self.letters as usize);
        self.flatten_into(false, &mut out);
        out
    }

    fn flatten_into(&self, inverted: bool, out: &mut Vec<(RippleGen, bool)>) {
        if inverted {
            for unit in self.units.iter().rev() {
                match unit {
                    RippleUnit::Letter(g, inv) => out.push((g.as_ref().clone(), !inv)),
                    RippleUnit::Block(w, inv) => w.flatten_into(!inv, out),
                }
            }
        } else {
            for unit in &self.units {
                match unit {
                    RippleUnit::Letter(g, inv) => out.push((g.as_ref().clone(), *inv)),
                    RippleUnit::Block(w, inv) => w.flatten_into(*inv, out),
                }
            }
        }
    }

    fn apply_units(&self, inverted: bool, graph: &mut RippleGraph, sys: &SuccessorSystem) {
        if inverted {
            for unit in &self.units {
                unit.apply(true, graph, sys);
            }
        } else {
            for unit in self.units.iter().rev() {
                unit.apply(false, graph, sys);
            }
        }
    }
}

impl RippleUnit {
    fn apply(&self, inverted: bool, graph: &mut RippleGraph, sys: &SuccessorSystem) {
        match self {
            RippleUnit::Block(w, inv) => w.apply_units(inverted ^ inv, graph, sys),
            RippleUnit::Letter(gen, inv) => {
                apply_generator(gen, inverted ^ inv, graph, sys);
            }
        }
    }
}

/// Applies one generator simultaneously at every qualifying node.
pub fn apply_generator(
    gen: &RippleGen,
    inverted: bool,
    graph: &mut RippleGraph,
    sys: &SuccessorSystem,
) {
    let firing: Vec<usize> = (0..graph.node_count())
        .filter(|&u| gen.fires_at(graph, sys, u))
        .collect();
    let perm = if inverted { gen.perm().inverse() } else { gen.perm().clone() };
    for u in firing {
        graph.colors_c[u] = perm.apply(graph.colors_c[u]);
    }
}

// ---------------------------------------------------------------------------
// ψ and the rank-restricted γ
// ---------------------------------------------------------------------------

/// Direct semantics of `ψ_{π, ℓ, c}`: applies `π` at `u` iff `u` is
/// successful, every s-successor has C-color `c`, and `u`'s rank is `ℓ`.
pub fn psi_reference(
    graph: &RippleGraph,
    sys: &SuccessorSystem,
    perm: &Perm,
    rank: u32,
    c: usize,
) -> RippleGraph {
    let firing: Vec<usize> = (0..graph.node_count())
        .filter(|&u| {
            sys.rank[graph.colors_b[u]] == Some(rank)
                && is_successful(graph, sys, u)
                && (0..sys.s_count)
                    .all(|s| graph.succ[u][s].is_some_and(|v| graph.colors_c[v] == c))
        })
        .collect();
    let mut out = graph.clone();
    for u in firing {
        out.colors_c[u] = perm.apply(out.colors_c[u]);
    }
    out
}

/// Builds `ψ_{π, ℓ, c}` as a ripple word. When `c` avoids the support, it
/// is the nested commutator `[φ_{π1,c}, γ_{π2}, β_{π3,ℓ}]` with
/// `π = [π1, π2, π3]` and every factor avoiding `c`. Otherwise `π` is split
/// into 3-rotations, each conjugated by a rank-restricted rotation that
/// moves its support off `c`.
pub fn build_psi(
    c_count: usize,
    perm: &Perm,
    rank: u32,
    c: usize,
) -> Result<RippleElement, RippleError> {
    if c_count < 6 {
        return Err(RippleError::CTooSmall(6));
    }
    if perm.domain_size() != c_count {
        return Err(PermError::DomainMismatch(perm.domain_size(), c_count).into());
    }
    if !perm.is_even() {
        return Err(PermError::OddPermutation.into());
    }
    if perm.is_identity() {
        return Ok(RippleElement::identity());
    }
    if !perm.moves(c) {
        return psi_block_avoiding(perm, rank, c);
    }
    // c in the support: product of 3-rotations, each handled by conjugation.
    let mut factors = Vec::new();
    for tau in perm.product_of_3cycles()? {
        if !tau.moves(c) {
            factors.push(psi_block_avoiding(&tau, rank, c)?);
            continue;
        }
        // Pick d, e outside supp(τ) ∪ {c} and rotate the support off c.
        let support = tau.support();
        let mut free = (0..c_count).filter(|x| !support.contains(x) && *x != c);
        let d = free.next().ok_or(RippleError::CTooSmall(6))?;
        let e = free.next().ok_or(RippleError::CTooSmall(6))?;
        let rot = Perm::three_cycle(c_count, c, d, e)?;
        // τ ^ rot⁻¹ has support rot(supp τ), which avoids c.
        let tilde = tau.conjugate_by(&rot.inverse())?;
        debug_assert!(!tilde.moves(c));
        let inner = psi_block_avoiding(&tilde, rank, c)?;
        let conj = RippleElement::letter(RippleGen::beta(rot, rank)?);
        factors.push(RippleElement::conjugate(&inner, &conj));
    }
    Ok(RippleElement::compose_all(&factors))
}

fn psi_block_avoiding(perm: &Perm, rank: u32, c: usize) -> Result<RippleElement, RippleError> {
    let parts = perm.decompose_avoiding(Some(c), 3)?;
    let words = [
        RippleElement::letter(RippleGen::phi(parts[0].clone(), c)?),
        RippleElement::letter(RippleGen::gamma(parts[1].clone())?),
        RippleElement::letter(RippleGen::beta(parts[2].clone(), rank)?),
    ];
    Ok(RippleElement::nested_commutator(&words))
}

/// Rank-restricted γ: applies `π` at `u` iff `u` is successful and has rank
/// `ℓ`. Realized as `[γ_{π1}, β_{π2,ℓ}]` with `π = [π1, π2]`: both
/// conditions depend only on shape and B-colors, which nothing alters.
pub fn build_gamma_rank(
    c_count: usize,
    perm: &Perm,
    rank: u32,
) -> Result<RippleElement, RippleError> {
    if c_count < 6 {
        return Err(RippleError::CTooSmall(6));
    }
    if perm.is_identity() {
        return Ok(RippleElement::identity());
    }
    let (p1, p2) = perm.ore_decompose()?;
    Ok(RippleElement::commutator(
        &RippleElement::letter(RippleGen::gamma(p1)?),
        &RippleElement::letter(RippleGen::beta(p2, rank)?),
    ))
}

/// Direct semantics of the rank-restricted γ.
pub fn gamma_rank_reference(
    graph: &RippleGraph,
    sys: &SuccessorSystem,
    perm: &Perm,
    rank: u32,
) -> RippleGraph {
    let firing: Vec<usize> = (0..graph.node_count())
        .filter(|&u| sys.rank[graph.colors_b[u]] == Some(rank) && is_successful(graph, sys, u))
        .collect();
    let mut out = graph.clone();
    for u in firing {
        out.colors_c[u] = perm.apply(out.colors_c[u]);
    }
    out
}

// ---------------------------------------------------------------------------
// Ripple catching
// ---------------------------------------------------------------------------

/// The catcher: a word of length linear in `n` that applies `π` at exactly
/// the rank-0 roots of full valid depth-`n` cones of zeros.
///
/// Two ripples travel down the ranks: the fringe stage is the rank-`n`
/// generator `β` (rank only, no successfulness — the cone test does not
/// look below depth `n`), and each inner stage is a ψ. The two conjugated
/// rank-0 ψs commute to `[π2, π1] = π` exactly on doubly-active roots.
pub fn build_catcher(c_count: usize, n: u32, perm: &Perm) -> Result<RippleElement, RippleError> {
    if c_count < 6 {
        return Err(RippleError::CTooSmall(6));
    }
    if n < 1 || perm.is_identity() || !perm.is_even() {
        return Err(RippleError::BadCatcher);
    }
    let rip = Perm::three_cycle(c_count, 0, 1, 2)?;
    let rip_inv = rip.inverse();
    let ripple = |p: &Perm, value: usize| -> Result<RippleElement, RippleError> {
        let mut stages = Vec::new();
        for rank in 1..n {
            stages.push(build_psi(c_count, p, rank, value)?);
        }
        stages.push(RippleElement::letter(RippleGen::beta(p.clone(), n)?));
        Ok(RippleElement::compose_all(&stages))
    };
    let psi1 = ripple(&rip, 1)?;
    let psi2 = ripple(&rip_inv, 2)?;
    // [π2, π1] = π.
    let (pi2, pi1) = perm.ore_decompose()?;
    let a2 = RippleElement::conjugate(&build_psi(c_count, &pi2, 0, 2)?, &psi2);
    let a1 = RippleElement::conjugate(&build_psi(c_count, &pi1, 0, 1)?, &psi1);
    Ok(RippleElement::commutator(&a2, &a1))
}

/// Direct cone semantics of the catcher: `π` is applied at `u` iff `u` has
/// rank 0, is successful, and the full depth-`n` successor tree below it
/// exists with rank equal to depth everywhere, all nodes successful above
/// depth `n`, and C-color 0 at every node except the root.
pub fn oracle_catcher(
    graph: &RippleGraph,
    sys: &SuccessorSystem,
    n: u32,
    perm: &Perm,
) -> RippleGraph {
    let mut memo: HashMap<(usize, u32), bool> = HashMap::new();
    let firing: Vec<usize> = (0..graph.node_count())
        .filter(|&u| {
            sys.rank[graph.colors_b[u]] == Some(0)
                && is_successful(graph, sys, u)
                && (0..sys.s_count).all(|s| {
                    graph.succ[u][s]
                        .is_some_and(|v| cone_active(graph, sys, v, 1, n, &mut memo))
                })
        })
        .collect();
    let mut out = graph.clone();
    for u in firing {
        out.colors_c[u] = perm.apply(out.colors_c[u]);
    }
    out
}

fn cone_active(
    graph: &RippleGraph,
    sys: &SuccessorSystem,
    v: usize,
    depth: u32,
    n: u32,
    memo: &mut HashMap<(usize, u32), bool>,
) -> bool {
    if let Some(&hit) = memo.get(&(v, depth)) {
        return hit;
    }
    let mut ok = sys.rank[graph.colors_b[v]] == Some(depth) && graph.colors_c[v] == 0;
    if ok && depth < n {
        ok = is_successful(graph, sys, v)
            && (0..sys.s_count).all(|s| {
                graph.succ[v][s]
                    .is_some_and(|w| cone_active(graph, sys, w, depth + 1, n, memo))
            });
    }
    memo.insert((v, depth), ok);
    ok
}

// ---------------------------------------------------------------------------
// Graph enumeration and random generation
// ---------------------------------------------------------------------------

/// All label-injective successor structures on `n` nodes (each label is a
/// partial injection), the partial-action reading of good graphs.
pub fn injective_structures(n: usize, s_count: usize) -> Vec<Vec<Vec<Option<usize>>>> {
    fn injections(n: usize) -> Vec<Vec<Option<usize>>> {
        let mut out = Vec::new();
        let mut cur: Vec<Option<usize>> = Vec::with_capacity(n);
        fn rec(n: usize, used: &mut Vec<bool>, cur: &mut Vec<Option<usize>>, out: &mut Vec<Vec<Option<usize>>>) {
            if cur.len() == n {
                out.push(cur.clone());
                return;
            }
            cur.push(None);
            rec(n, used, cur, out);
            cur.pop();
            for v in 0..n {
                if !used[v] {
                    used[v] = true;
                    cur.push(Some(v));
                    rec(n, used, cur, out);
                    cur.pop();
                    used[v] = false;
                }
            }
        }
        let mut used = vec![false; n];
        rec(n, &mut used, &mut cur, &mut out);
        out
    }
    let per_label = injections(n);
    let mut out = Vec::new();
    let mut idx = vec![0usize; s_count];
    loop {
        let structure: Vec<Vec<Option<usize>>> = (0..n)
            .map(|u| (0..s_count).map(|s| per_label[idx[s]][u]).collect())
            .collect();
        out.push(structure);
        let mut pos = 0;
        loop {
            if pos == s_count {
                return out;
            }
            idx[pos] += 1;
            if idx[pos] < per_label.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Seed-deterministic random good graph (labels need not be injective).
pub fn random_graph(
    rng: &mut impl Rng,
    nodes: usize,
    sys: &SuccessorSystem,
    c_count: usize,
    edge_prob: f64,
) -> RippleGraph {
    let succ = (0..nodes)
        .map(|_| {
            (0..sys.s_count)
                .map(|_| {
                    if nodes > 0 && rng.gen_bool(edge_prob) {
                        Some(rng.gen_range(0..nodes))
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect();
    RippleGraph {
        colors_c: (0..nodes).map(|_| rng.gen_range(0..c_count)).collect(),
        colors_b: (0..nodes).map(|_| rng.gen_range(0..sys.b_count)).collect(),
        succ,
    }
}

/// The full depth-`n` cone: a complete `s_count`-ary tree with rank equal
/// to depth, C-color 0 off the root, and `root_c` at the root.
pub fn full_cone_graph(s_count: usize, n: u32, root_c: usize) -> RippleGraph {
    let mut colors_c = vec![root_c];
    let mut colors_b = vec![0usize];
    let mut succ: Vec<Vec<Option<usize>>> = vec![vec![None; s_count]];
    let mut frontier = vec![0usize];
    for depth in 1..=n {
        let mut next = Vec::new();
        for &u in &frontier {
            for s in 0..s_count {
                let v = colors_c.len();
                colors_c.push(0);
                colors_b.push(depth as usize);
                succ.push(vec![None; s_count]);
                succ[u][s] = Some(v);
                next.push(v);
            }
        }
        frontier = next;
    }
    RippleGraph { colors_c, colors_b, succ }
}

/// A random graph biased toward near-cones: a full cone with a few random
/// perturbations (color flips, edge deletions, redirections).
pub fn random_near_cone(
    rng: &mut impl Rng,
    s_count: usize,
    n: u32,
    c_count: usize,
    b_count: usize,
    tweaks: usize,
) -> RippleGraph {
    let mut g = full_cone_graph(s_count, n, rng.gen_range(0..c_count));
    for _ in 0..tweaks {
        let nodes = g.node_count();
        match rng.gen_range(0..4) {
            0 => {
                let u = rng.gen_range(0..nodes);
                g.colors_c[u] = rng.gen_range(0..c_count);
            }
            1 => {
                let u = rng.gen_range(0..nodes);
                g.colors_b[u] = rng.gen_range(0..b_count);
            }
            2 => {
                let u = rng.gen_range(0..nodes);
                let s = rng.gen_range(0..s_count);
                g.succ[u][s] = None;
            }
            _ => {
                let u = rng.gen_range(0..nodes);
                let s = rng.gen_range(0..s_count);
                g.succ[u][s] = Some(rng.gen_range(0..nodes));
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sys2() -> SuccessorSystem {
        SuccessorSystem::rank_increment(2, 2, true)
    }

    #[test]
    fn successor_system_validation() {
        // rank(b') must be rank(b) + 1 or ⊥.
        let bad = SuccessorSystem::new(1, 2, &[(0, 0, 0)], vec![Some(0), Some(1)]);
        assert!(matches!(bad, Err(RippleError::BadRank { .. })));
        let ok = SuccessorSystem::new(1, 2, &[(0, 0, 1)], vec![Some(0), Some(1)]);
        assert!(ok.is_ok());
    }

    #[test]
    fn successful_requires_all_successors() {
        let sys = sys2();
        let mut g = full_cone_graph(2, 1, 3);
        assert!(is_successful(&g, &sys, 0));
        // Leaves have no successors.
        assert!(!is_successful(&g, &sys, 1));
        // Wrong B-color on one child breaks it.
        g.colors_b[1] = 0;
        assert!(!is_successful(&g, &sys, 0));
        g.colors_b[1] = 3; // ⊥ color: still related under rank_increment-with-bottom
        assert!(is_successful(&g, &sys, 0));
    }

    #[test]
    fn generators_fire_per_definition() {
        let sys = sys2();
        let g = full_cone_graph(2, 2, 3);
        // β at an absent rank: unchanged.
        let beta9 = RippleGen::beta(Perm::three_cycle(6, 0, 1, 2).unwrap(), 9).unwrap();
        let mut h = g.clone();
        apply_generator(&beta9, false, &mut h, &sys);
        assert_eq!(h, g);
        // Identity π: unchanged.
        let gid = RippleGen::gamma(Perm::identity(6)).unwrap();
        let mut h = g.clone();
        apply_generator(&gid, false, &mut h, &sys);
        assert_eq!(h, g);
        // γ on the cone: exactly the non-fringe nodes are successful.
        let gam = RippleGen::gamma(Perm::three_cycle(6, 0, 1, 2).unwrap()).unwrap();
        let mut h = g.clone();
        apply_generator(&gam, false, &mut h, &sys);
        for u in 0..g.node_count() {
            let changed = h.colors_c[u] != g.colors_c[u];
            let successful = is_successful(&g, &sys, u);
            let moved = g.colors_c[u] < 3; // (0 1 2) moves exactly 0,1,2
            assert_eq!(changed, successful && moved, "node {u}");
        }
        // Shape and B never change.
        assert_eq!(h.colors_b, g.colors_b);
        assert_eq!(h.succ, g.succ);
    }

    #[test]
    fn generator_order_divides_perm_order() {
        let sys = sys2();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..30 {
            let g = random_graph(&mut rng, 6, &sys, 6, 0.7);
            let pi = Perm::three_cycle(6, 1, 4, 5).unwrap();
            let gen = RippleGen::gamma(pi).unwrap();
            let mut h = g.clone();
            for _ in 0..3 {
                apply_generator(&gen, false, &mut h, &sys);
            }
            assert_eq!(h, g);
        }
    }

    #[test]
    fn element_inverse_cancels() {
        let sys = sys2();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = build_psi(6, &Perm::three_cycle(6, 0, 1, 2).unwrap(), 1, 1).unwrap();
        for _ in 0..50 {
            let g = random_graph(&mut rng, 8, &sys, 6, 0.6);
            let back = psi.inverse().compose(&psi).apply(&g, &sys);
            assert_eq!(back, g);
        }
    }

    fn assert_psi_matches(
        sys: &SuccessorSystem,
        graph: &RippleGraph,
        perm: &Perm,
        rank: u32,
        c: usize,
    ) {
        let word = build_psi(6, perm, rank, c).unwrap();
        let got = word.apply(graph, sys);
        let want = psi_reference(graph, sys, perm, rank, c);
        assert_eq!(got, want, "psi({perm}, {rank}, {c}) on {graph:?}");
    }

    #[test]
    fn psi_matches_reference_on_cones_and_perturbations() {
        let sys = sys2();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pis = [
            Perm::three_cycle(6, 0, 1, 2).unwrap(),          // c in support for c=1
            Perm::three_cycle(6, 3, 4, 5).unwrap(),          // support away
            crate::perm::parse_cycles(6, "(0 1)(2 3)").unwrap(),
            crate::perm::parse_cycles(6, "(0 1 2 3 4)").unwrap(),
        ];
        for _ in 0..150 {
            let coin = rng.gen_bool(0.5);
            let tweaks = rng.gen_range(0..4);
            let nodes = rng.gen_range(1..9);
            let g = if coin {
                random_near_cone(&mut rng, 2, 2, 6, sys.b_count, tweaks)
            } else {
                random_graph(&mut rng, nodes, &sys, 6, 0.6)
            };
            for pi in &pis {
                for (rank, c) in [(0u32, 1usize), (1, 1), (1, 0), (2, 4)] {
                    assert_psi_matches(&sys, &g, pi, rank, c);
                }
            }
        }
    }

    #[test]
    fn psi_exhaustive_on_tiny_graphs() {
        // All injective structures on up to 3 nodes, all B-colorings over
        // ranks {0,1,2,⊥}, C-colorings from the control-indicator palette.
        let sys = sys2();
        let pi = Perm::three_cycle(6, 0, 1, 2).unwrap();
        let word = build_psi(6, &pi, 1, 1).unwrap();
        let mut cases = 0u64;
        for n in 0..=3usize {
            for structure in injective_structures(n, 2) {
                let mut b = vec![0usize; n];
                loop {
                    for chi in 0..(1u32 << n) {
                        for z in 0..6usize {
                            let colors_c: Vec<usize> = (0..n)
                                .map(|u| if chi >> u & 1 == 1 { 1 } else { z })
                                .collect();
                            let g = RippleGraph {
                                colors_c,
                                colors_b: b.clone(),
                                succ: structure.clone(),
                            };
                            assert_eq!(
                                word.apply(&g, &sys),
                                psi_reference(&g, &sys, &pi, 1, 1),
                                "graph {g:?}"
                            );
                            cases += 1;
                        }
                    }
                    // odometer over B-colorings
                    let mut pos = 0;
                    loop {
                        if pos == n {
                            break;
                        }
                        b[pos] += 1;
                        if b[pos] < sys.b_count {
                            break;
                        }
                        b[pos] = 0;
                        pos += 1;
                    }
                    if pos == n {
                        break;
                    }
                }
            }
        }
        assert!(cases > 1000, "swept {cases} cases");
    }

    #[test]
    fn gamma_rank_matches_reference() {
        let sys = sys2();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pi = crate::perm::parse_cycles(6, "(0 3)(1 4)").unwrap();
        for _ in 0..80 {
            let nodes = rng.gen_range(1..8);
            let g = random_graph(&mut rng, nodes, &sys, 6, 0.6);
            for rank in 0..3u32 {
                let word = build_gamma_rank(6, &pi, rank).unwrap();
                assert_eq!(word.apply(&g, &sys), gamma_rank_reference(&g, &sys, &pi, rank));
            }
        }
    }

    #[test]
    fn catcher_matches_oracle_on_cones() {
        let sys = sys2();
        let pi = Perm::three_cycle(6, 3, 4, 5).unwrap();
        let word = build_catcher(6, 2, &pi).unwrap();
        // A full 2-cone with zeros off the root: π at the root only.
        let g = full_cone_graph(2, 2, 3);
        let got = word.apply(&g, &sys);
        let want = oracle_catcher(&g, &sys, 2, &pi);
        assert_eq!(got, want);
        assert_eq!(got.colors_c[0], pi.apply(3));
        assert!(got.colors_c[1..].iter().all(|&c| c == 0));
        // One interior defect: no action.
        let mut bad = full_cone_graph(2, 2, 3);
        bad.colors_c[1] = 5;
        let got = word.apply(&bad, &sys);
        assert_eq!(got, oracle_catcher(&bad, &sys, 2, &pi));
        assert_eq!(got.colors_c, bad.colors_c);
        // Empty graph: identity.
        let empty = RippleGraph { colors_c: vec![], colors_b: vec![], succ: vec![] };
        assert_eq!(word.apply(&empty, &sys), empty);
    }

    #[test]
    fn catcher_matches_oracle_on_random_graphs() {
        let sys = sys2();
        let pi = Perm::three_cycle(6, 0, 1, 2).unwrap();
        let word = build_catcher(6, 2, &pi).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for i in 0..300 {
            let tweaks = rng.gen_range(0..5);
            let nodes = rng.gen_range(1..10);
            let g = if i % 2 == 0 {
                random_near_cone(&mut rng, 2, 2, 6, sys.b_count, tweaks)
            } else {
                random_graph(&mut rng, nodes, &sys, 6, 0.55)
            };
            assert_eq!(
                word.apply(&g, &sys),
                oracle_catcher(&g, &sys, 2, &pi),
                "graph {i}: {g:?}"
            );
        }
    }

    #[test]
    fn catcher_length_is_affine_in_n() {
        let pi = Perm::three_cycle(6, 0, 1, 2).unwrap();
        let lens: Vec<u64> = (1..=8u32)
            .map(|n| build_catcher(6, n, &pi).unwrap().letter_count())
            .collect();
        let a = lens[1] - lens[0];
        let b = lens[0] as i64 - a as i64;
        for (i, &len) in lens.iter().enumerate() {
            let n = i as u64 + 1;
            assert_eq!(len as i64, (a * n) as i64 + b, "n={n}");
        }
    }

    #[test]
    fn graph_json_shape() {
        let g = full_cone_graph(2, 1, 3);
        let json = g.to_json(&["a", "b"]);
        assert_eq!(json["nodes"].as_array().unwrap().len(), 3);
        assert_eq!(json["edges"].as_array().unwrap().len(), 2);
    }
}
