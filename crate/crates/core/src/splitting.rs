//! Recursive splitting schemes for balls: a set splits into two parts of
//! at most an `α` fraction each after removing a small cut, and no cell of
//! the remaining set touches both parts. Free-group balls split by single
//! geodesic vertices; the pentagon model of the hyperbolic plane splits by
//! dyadic ancestor chains.
//!
//! Separation is checked as: every element of `A \ C` whose closed
//! neighborhood meets both parts is a violation (the cut must contain all
//! cells that can see both sides).

use std::collections::HashSet;
use std::hash::Hash;

use thiserror::Error;

use crate::groups::{Group, GroupElement, GroupError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SplitError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("pentagon depth {0} above the supported budget {1}")]
    Budget(u64, u64),
}

/// One node of a splitting scheme: the set, its cut, and either two child
/// schemes or a leaf (empty set).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitTree<V> {
    pub set: Vec<V>,
    pub cut: Vec<V>,
    pub children: Option<Box<(SplitTree<V>, SplitTree<V>)>>,
}

impl<V> SplitTree<V> {
    pub fn leaf() -> SplitTree<V> {
        SplitTree { set: Vec::new(), cut: Vec::new(), children: None }
    }

    pub fn node_count(&self) -> usize {
        1 + self
            .children
            .as_ref()
            .map_or(0, |c| c.0.node_count() + c.1.node_count())
    }

    pub fn max_cut(&self) -> usize {
        let own = self.cut.len();
        self.children
            .as_ref()
            .map_or(own, |c| own.max(c.0.max_cut()).max(c.1.max_cut()))
    }
}

/// First violated clause, with a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplitViolation<V> {
    /// A nonempty set has no children.
    UnsplitLeaf { size: usize },
    /// Children plus cut do not partition the set.
    NotAPartition,
    CutTooLarge { size: usize, bound: usize },
    PartTooLarge { part: usize, whole: usize },
    /// An element of `A \ C` is adjacent (or equal) to both parts.
    PartsTouch { witness: V },
}

/// Checks every node of the scheme against the definition: `A = ∅`, or
/// `A \ C = A1 ⊔ A2` with `|C| ≤ cut_bound`, `|Ai| ≤ α|A|`
/// (α = `alpha_num / alpha_den`), no remaining cell sees both parts, and
/// both children are again splitting schemes.
pub fn verify_splitting_scheme<V, N>(
    tree: &SplitTree<V>,
    alpha_num: usize,
    alpha_den: usize,
    cut_bound: usize,
    neighbors: &N,
) -> Result<(), SplitViolation<V>>
where
    V: Clone + Eq + Hash,
    N: Fn(&V) -> Vec<V>,
{
    if tree.set.is_empty() {
        return Ok(());
    }
    let Some(children) = &tree.children else {
        return Err(SplitViolation::UnsplitLeaf { size: tree.set.len() });
    };
    let (a1, a2) = (&children.0.set, &children.1.set);
    if tree.cut.len() > cut_bound {
        return Err(SplitViolation::CutTooLarge { size: tree.cut.len(), bound: cut_bound });
    }
    let whole: HashSet<&V> = tree.set.iter().collect();
    let cut: HashSet<&V> = tree.cut.iter().collect();
    let s1: HashSet<&V> = a1.iter().collect();
    let s2: HashSet<&V> = a2.iter().collect();
    // Exact partition: disjoint, inside the set, covering A \ C.
    let disjoint = s1.is_disjoint(&s2)
        && cut.iter().all(|v| whole.contains(*v) && !s1.contains(*v) && !s2.contains(*v))
        && s1.iter().chain(&s2).all(|v| whole.contains(*v));
    if !disjoint || s1.len() + s2.len() + cut.len() != whole.len() {
        return Err(SplitViolation::NotAPartition);
    }
    for part in [a1, a2] {
        if part.len() * alpha_den > tree.set.len() * alpha_num {
            return Err(SplitViolation::PartTooLarge { part: part.len(), whole: tree.set.len() });
        }
    }
    // Closed neighborhoods (the generating set contains the identity).
    let closed = |set: &HashSet<&V>| -> HashSet<V> {
        let mut out: HashSet<V> = set.iter().map(|v| (*v).clone()).collect();
        for v in set {
            out.extend(neighbors(v));
        }
        out
    };
    let n1 = closed(&s1);
    let n2 = closed(&s2);
    for v in tree.set.iter() {
        if !cut.contains(v) && n1.contains(v) && n2.contains(v) {
            return Err(SplitViolation::PartsTouch { witness: v.clone() });
        }
    }
    verify_splitting_scheme(&children.0, alpha_num, alpha_den, cut_bound, neighbors)?;
    verify_splitting_scheme(&children.1, alpha_num, alpha_den, cut_bound, neighbors)
}

// ---------------------------------------------------------------------------
// Free groups: α = 2/3, singleton cuts
// ---------------------------------------------------------------------------

/// Splits the radius-`r` ball of the rank-2 free group: the root cut is the
/// identity and its four generator branches pair into two parts; a branch
/// rooted at `g` cuts `{g}` and splits its three sub-branches one against
/// two (stepping forward along the geodesic).
pub fn split_free(group: &Group, r: u64) -> Result<SplitTree<GroupElement>, SplitError> {
    let ball = group.ball(r, crate::groups::BALL_BUDGET_DEFAULT)?;
    let gens: Vec<(String, GroupElement)> = group.generators();
    // branch(s) = elements whose geodesic starts with generator s.
    let mut branches: Vec<Vec<GroupElement>> = vec![Vec::new(); gens.len()];
    let id = group.identity();
    for g in &ball {
        if *g == id {
            continue;
        }
        if let GroupElement::Free(w) = g {
            let first = w.letters()[0];
            let idx = gens
                .iter()
                .position(|(_, e)| matches!(e, GroupElement::Free(v) if v.letters() == [first]))
                .expect("generator for first letter");
            branches[idx].push(g.clone());
        }
    }
    // Pair a-branches against b-branches (letters 0 and 1).
    let pair = |xs: Vec<GroupElement>, ys: Vec<GroupElement>| -> SplitTree<GroupElement> {
        let mut set = xs.clone();
        set.extend(ys.iter().cloned());
        SplitTree {
            set,
            cut: Vec::new(),
            children: Some(Box::new((split_branch(group, xs), split_branch(group, ys)))),
        }
    };
    // Generator order: a, A, b, B.
    let a_side = pair(branches[0].clone(), branches[1].clone());
    let b_side = pair(branches[2].clone(), branches[3].clone());
    Ok(SplitTree {
        set: ball,
        cut: vec![id],
        children: Some(Box::new((a_side, b_side))),
    })
}

/// Splits a single branch rooted at its unique minimal-length element.
fn split_branch(group: &Group, branch: Vec<GroupElement>) -> SplitTree<GroupElement> {
    if branch.is_empty() {
        return SplitTree::leaf();
    }
    let root = branch
        .iter()
        .min_by_key(|g| match g {
            GroupElement::Free(w) => w.len(),
            _ => usize::MAX,
        })
        .unwrap()
        .clone();
    let rest: Vec<GroupElement> = branch.iter().filter(|g| **g != root).cloned().collect();
    if rest.is_empty() {
        return SplitTree {
            set: branch,
            cut: vec![root],
            children: Some(Box::new((SplitTree::leaf(), SplitTree::leaf()))),
        };
    }
    // Sub-branches keyed by the letter following the root.
    let root_len = match &root {
        GroupElement::Free(w) => w.len(),
        _ => unreachable!(),
    };
    let mut subs: Vec<(i16, Vec<GroupElement>)> = Vec::new();
    for g in &rest {
        if let GroupElement::Free(w) = g {
            let next = w.letters()[root_len];
            match subs.iter_mut().find(|(l, _)| *l == next) {
                Some((_, v)) => v.push(g.clone()),
                None => subs.push((next, vec![g.clone()])),
            }
        }
    }
    subs.sort_by_key(|(l, _)| *l);
    let first = subs.remove(0).1;
    let others: Vec<Vec<GroupElement>> = subs.into_iter().map(|(_, v)| v).collect();
    let right = match others.len() {
        0 => SplitTree::leaf(),
        1 => split_branch(group, others.into_iter().next().unwrap()),
        _ => {
            // Two or three far-apart sub-branches: split with an empty cut.
            let mut iter = others.into_iter();
            let x = iter.next().unwrap();
            let rest: Vec<GroupElement> = iter.flatten().collect();
            let mut set = x.clone();
            set.extend(rest.iter().cloned());
            let left = split_branch(group, x);
            let right = split_multi(group, rest, root_len);
            SplitTree { set, cut: Vec::new(), children: Some(Box::new((left, right))) }
        }
    };
    SplitTree {
        set: branch,
        cut: vec![root],
        children: Some(Box::new((split_branch(group, first), right))),
    }
}

/// Splits a union of sibling sub-branches (same depth) with empty cuts.
fn split_multi(group: &Group, set: Vec<GroupElement>, root_len: usize) -> SplitTree<GroupElement> {
    let mut subs: Vec<(i16, Vec<GroupElement>)> = Vec::new();
    for g in &set {
        if let GroupElement::Free(w) = g {
            let next = w.letters()[root_len];
            match subs.iter_mut().find(|(l, _)| *l == next) {
                Some((_, v)) => v.push(g.clone()),
                None => subs.push((next, vec![g.clone()])),
            }
        }
    }
    subs.sort_by_key(|(l, _)| *l);
    if subs.len() == 1 {
        return split_branch(group, subs.into_iter().next().unwrap().1);
    }
    let first = subs.remove(0).1;
    let rest: Vec<GroupElement> = subs.into_iter().flat_map(|(_, v)| v).collect();
    let left = split_branch(group, first);
    let right = split_multi(group, rest, root_len);
    SplitTree { set, cut: Vec::new(), children: Some(Box::new((left, right))) }
}

// ---------------------------------------------------------------------------
// Pentagon model: α = 3/4, cuts of size ≤ k+1
// ---------------------------------------------------------------------------

pub type PentagonVertex = (i64, i64);

/// `P_k = {(x, y) | y ∈ [0, k], x ∈ [0, 2^y - 1]}`.
pub fn pentagon_region(k: u32) -> Vec<PentagonVertex> {
    let mut out = Vec::new();
    for y in 0..=k as i64 {
        for x in 0..(1i64 << y) {
            out.push((x, y));
        }
    }
    out
}

/// Pentagon-model neighbors restricted to the region `P_k`: horizontal
/// edges `(x, y)-(x+1, y)` and the dyadic edges `(x, y)-(2x, y+1)`,
/// `(x, y)-(2x+1, y+1)`.
pub fn pentagon_neighbors(k: u32) -> impl Fn(&PentagonVertex) -> Vec<PentagonVertex> {
    move |&(x, y)| {
        let mut out = Vec::new();
        let inside = |(vx, vy): PentagonVertex| vy >= 0 && vy <= k as i64 && vx >= 0 && vx < (1i64 << vy);
        for cand in [
            (x - 1, y),
            (x + 1, y),
            (2 * x, y + 1),
            (2 * x + 1, y + 1),
            (x.div_euclid(2), y - 1),
        ] {
            if inside(cand) {
                out.push(cand);
            }
        }
        out
    }
}

/// Splits `P_k` by ancestor chains of dyadic midpoints: the cut for the
/// wedge `[lo, hi)` (bottom-row dyadic range) is the geodesic of vertices
/// `(mid >> (k - y), y)`, which separates the left and right sub-wedges.
pub fn split_pentagon(k: u32) -> Result<SplitTree<PentagonVertex>, SplitError> {
    if k > 24 {
        return Err(SplitError::Budget(k as u64, 24));
    }
    let set = pentagon_region(k);
    Ok(split_wedge(k, set, 0, 1 << k))
}

fn split_wedge(k: u32, set: Vec<PentagonVertex>, lo: i64, hi: i64) -> SplitTree<PentagonVertex> {
    if set.is_empty() {
        return SplitTree::leaf();
    }
    if hi - lo <= 1 {
        // A single ancestor chain: at most k+1 vertices, cut it away whole.
        return SplitTree {
            cut: set.clone(),
            set,
            children: Some(Box::new((SplitTree::leaf(), SplitTree::leaf()))),
        };
    }
    let mid = lo + (hi - lo) / 2;
    let chain: Vec<PentagonVertex> = (0..=k as i64)
        .map(|y| (mid >> (k as i64 - y), y))
        .filter(|v| set.contains(v))
        .collect();
    let left: Vec<PentagonVertex> = set
        .iter()
        .copied()
        .filter(|&(x, y)| x < (mid >> (k as i64 - y)))
        .collect();
    let right: Vec<PentagonVertex> = set
        .iter()
        .copied()
        .filter(|&(x, y)| x > (mid >> (k as i64 - y)))
        .collect();
    SplitTree {
        set,
        cut: chain,
        children: Some(Box::new((
            split_wedge(k, left, lo, mid),
            split_wedge(k, right, mid, hi),
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free_neighbors(group: &Group) -> impl Fn(&GroupElement) -> Vec<GroupElement> + '_ {
        move |g| {
            group
                .generators()
                .into_iter()
                .map(|(_, s)| group.multiply(g, &s).unwrap())
                .collect()
        }
    }

    #[test]
    fn free_split_validates_small_radii() {
        let f2 = Group::free(2);
        for r in 1..=4u64 {
            let tree = split_free(&f2, r).unwrap();
            assert_eq!(tree.set.len(), f2.ball(r, 1 << 20).unwrap().len());
            assert_eq!(tree.max_cut(), 1, "r={r}");
            verify_splitting_scheme(&tree, 2, 3, 1, &free_neighbors(&f2))
                .unwrap_or_else(|e| panic!("r={r}: {e:?}"));
        }
    }

    #[test]
    fn free_split_root_shape_at_radius_one() {
        let f2 = Group::free(2);
        let tree = split_free(&f2, 1).unwrap();
        assert_eq!(tree.cut, vec![f2.identity()]);
        let c = tree.children.as_ref().unwrap();
        assert_eq!(c.0.set.len(), 2);
        assert_eq!(c.1.set.len(), 2);
    }

    #[test]
    fn empty_set_is_a_valid_leaf() {
        let tree: SplitTree<GroupElement> = SplitTree::leaf();
        let f2 = Group::free(2);
        let nbrs = free_neighbors(&f2);
        assert!(verify_splitting_scheme(&tree, 2, 3, 1, &nbrs).is_ok());
    }

    #[test]
    fn touching_parts_are_rejected_with_witness() {
        let f2 = Group::free(2);
        let a = f2.parse("a").unwrap();
        let b = f2.parse("b").unwrap();
        let id = f2.identity();
        // 1 is adjacent to both a and b: {1} must be in the cut but is put
        // into a part instead.
        let tree = SplitTree {
            set: vec![id.clone(), a.clone(), b.clone()],
            cut: vec![],
            children: Some(Box::new((
                SplitTree {
                    set: vec![id.clone(), a.clone()],
                    cut: vec![id.clone(), a.clone()],
                    children: Some(Box::new((SplitTree::leaf(), SplitTree::leaf()))),
                },
                SplitTree {
                    set: vec![b.clone()],
                    cut: vec![b.clone()],
                    children: Some(Box::new((SplitTree::leaf(), SplitTree::leaf()))),
                },
            ))),
        };
        let nbrs = free_neighbors(&f2);
        match verify_splitting_scheme(&tree, 9, 10, 2, &nbrs) {
            Err(SplitViolation::PartsTouch { witness }) => assert_eq!(witness, id),
            other => panic!("expected PartsTouch, got {other:?}"),
        }
    }

    #[test]
    fn pentagon_region_sizes() {
        assert_eq!(pentagon_region(0), vec![(0, 0)]);
        assert_eq!(pentagon_region(1).len(), 3);
        assert_eq!(pentagon_region(3).len(), 15);
        for k in 0..=8u32 {
            assert_eq!(pentagon_region(k).len() as u64, (1u64 << (k + 1)) - 1);
        }
    }

    #[test]
    fn pentagon_split_validates() {
        for k in 0..=6u32 {
            let tree = split_pentagon(k).unwrap();
            assert!(tree.max_cut() <= k as usize + 1, "k={k}");
            verify_splitting_scheme(&tree, 3, 4, k as usize + 1, &pentagon_neighbors(k))
                .unwrap_or_else(|e| panic!("k={k}: {e:?}"));
        }
    }
}
