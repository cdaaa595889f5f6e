//! Finitely generated group backends with fixed generating sets, word
//! metric, and ball enumeration: `Z^d` (generators `±e_i`), free groups
//! (free letters and inverses), the free monoid inside a free group
//! (positive letters; balls are monoid balls), and lamplighter groups
//! `C ≀ Z` with `a = t`, `b = t·(lamp at origin)`.
//!
//! Semidirect orientation: in the product `(φ1, s1)(φ2, s2)` the second
//! lamp configuration is translated by `s1` so that `t` moves the lighter
//! right; the grid identities in `constructions` validate this choice.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const BALL_BUDGET_DEFAULT: u64 = 5_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("element does not belong to this backend")]
    BackendMismatch,
    #[error("enumeration budget exceeded ({0} elements, budget {1})")]
    BudgetExceeded(u64, u64),
    #[error("element parse error: {0}")]
    Parse(String),
    #[error("free-group rank above 26 is not supported by the text form")]
    RankTooLarge,
    #[error("elements are not connected within the search budget")]
    NotReachable,
}

/// Freely reduced word; letter `+i` is generator `i-1`, `-i` its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct FreeWord {
    letters: Vec<i16>,
}

impl FreeWord {
    pub fn identity() -> FreeWord {
        FreeWord::default()
    }

    pub fn generator(i: usize) -> FreeWord {
        FreeWord { letters: vec![i as i16 + 1] }
    }

    pub fn from_letters(letters: impl IntoIterator<Item = i16>) -> FreeWord {
        let mut out = FreeWord::identity();
        for l in letters {
            out.push(l);
        }
        out
    }

    fn push(&mut self, letter: i16) {
        debug_assert!(letter != 0);
        if self.letters.last() == Some(&-letter) {
            self.letters.pop();
        } else {
            self.letters.push(letter);
        }
    }

    pub fn letters(&self) -> &[i16] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_positive(&self) -> bool {
        self.letters.iter().all(|&l| l > 0)
    }

    pub fn concat(&self, rhs: &FreeWord) -> FreeWord {
        let mut out = self.clone();
        for &l in &rhs.letters {
            out.push(l);
        }
        out
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord {
            letters: self.letters.iter().rev().map(|&l| -l).collect(),
        }
    }

    pub fn pow(&self, e: i64) -> FreeWord {
        let base = if e >= 0 { self.clone() } else { self.inverse() };
        let mut out = FreeWord::identity();
        for _ in 0..e.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }
}

/// Lamplighter element `(lamp configuration, shift)`; lamp values live in
/// `Z_{m1} × .. × Z_{mj}` and only nonzero entries are stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct LampElement {
    pub shift: i64,
    pub lamps: BTreeMap<i64, Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupElement {
    Zd(Vec<i64>),
    Free(FreeWord),
    FreeMonoid(FreeWord),
    Lamplighter(LampElement),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Backend {
    Zd { d: usize },
    Free { rank: usize },
    FreeMonoidInFree { rank: usize },
    Lamplighter { moduli: Vec<u32> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Group {
    pub backend: Backend,
}

impl Group {
    pub fn new(backend: Backend) -> Group {
        Group { backend }
    }

    pub fn zd(d: usize) -> Group {
        Group::new(Backend::Zd { d })
    }

    pub fn free(rank: usize) -> Group {
        Group::new(Backend::Free { rank })
    }

    pub fn free_monoid(rank: usize) -> Group {
        Group::new(Backend::FreeMonoidInFree { rank })
    }

    pub fn lamplighter(moduli: Vec<u32>) -> Group {
        Group::new(Backend::Lamplighter { moduli })
    }

    pub fn identity(&self) -> GroupElement {
        match &self.backend {
            Backend::Zd { d } => GroupElement::Zd(vec![0; *d]),
            Backend::Free { .. } => GroupElement::Free(FreeWord::identity()),
            Backend::FreeMonoidInFree { .. } => GroupElement::FreeMonoid(FreeWord::identity()),
            Backend::Lamplighter { .. } => GroupElement::Lamplighter(LampElement::default()),
        }
    }

    fn check(&self, g: &GroupElement) -> Result<(), GroupError> {
        let ok = match (&self.backend, g) {
            (Backend::Zd { d }, GroupElement::Zd(v)) => v.len() == *d,
            (Backend::Free { rank }, GroupElement::Free(w))
            | (Backend::FreeMonoidInFree { rank }, GroupElement::FreeMonoid(w)) => {
                w.letters().iter().all(|&l| (l.unsigned_abs() as usize) <= *rank)
            }
            (Backend::Lamplighter { moduli }, GroupElement::Lamplighter(e)) => e
                .lamps
                .values()
                .all(|v| v.len() == moduli.len() && v.iter().zip(moduli).all(|(&x, &m)| x < m)),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(GroupError::BackendMismatch)
        }
    }

    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(g)?;
        self.check(h)?;
        Ok(match (&self.backend, g, h) {
            (Backend::Zd { .. }, GroupElement::Zd(a), GroupElement::Zd(b)) => {
                GroupElement::Zd(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            (Backend::Free { .. }, GroupElement::Free(a), GroupElement::Free(b)) => {
                GroupElement::Free(a.concat(b))
            }
            (
                Backend::FreeMonoidInFree { .. },
                GroupElement::FreeMonoid(a),
                GroupElement::FreeMonoid(b),
            ) => GroupElement::FreeMonoid(a.concat(b)),
            (
                Backend::Lamplighter { moduli },
                GroupElement::Lamplighter(a),
                GroupElement::Lamplighter(b),
            ) => {
                let mut lamps = a.lamps.clone();
                for (&pos, vals) in &b.lamps {
                    let target = lamps
                        .entry(pos + a.shift)
                        .or_insert_with(|| vec![0; moduli.len()]);
                    for (i, (&v, &m)) in vals.iter().zip(moduli).enumerate() {
                        target[i] = (target[i] + v) % m;
                    }
                }
                lamps.retain(|_, v| v.iter().any(|&x| x != 0));
                GroupElement::Lamplighter(LampElement { shift: a.shift + b.shift, lamps })
            }
            _ => unreachable!(),
        })
    }

    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(g)?;
        Ok(match (&self.backend, g) {
            (Backend::Zd { .. }, GroupElement::Zd(a)) => {
                GroupElement::Zd(a.iter().map(|x| -x).collect())
            }
            (Backend::Free { .. }, GroupElement::Free(a)) => GroupElement::Free(a.inverse()),
            (Backend::FreeMonoidInFree { .. }, GroupElement::FreeMonoid(a)) => {
                GroupElement::FreeMonoid(a.inverse())
            }
            (Backend::Lamplighter { moduli }, GroupElement::Lamplighter(a)) => {
                let mut lamps = BTreeMap::new();
                for (&pos, vals) in &a.lamps {
                    let neg: Vec<u32> =
                        vals.iter().zip(moduli).map(|(&v, &m)| (m - v) % m).collect();
                    if neg.iter().any(|&x| x != 0) {
                        lamps.insert(pos - a.shift, neg);
                    }
                }
                GroupElement::Lamplighter(LampElement { shift: -a.shift, lamps })
            }
            _ => unreachable!(),
        })
    }

    /// The fixed generating set with names. Symmetric for group backends;
    /// positive letters only for the monoid backend.
    pub fn generators(&self) -> Vec<(String, GroupElement)> {
        match &self.backend {
            Backend::Zd { d } => {
                let mut out = Vec::new();
                for i in 0..*d {
                    for sign in [1i64, -1] {
                        let mut v = vec![0; *d];
                        v[i] = sign;
                        let name = if sign > 0 {
                            format!("e{}", i + 1)
                        } else {
                            format!("E{}", i + 1)
                        };
                        out.push((name, GroupElement::Zd(v)));
                    }
                }
                out
            }
            Backend::Free { rank } => {
                let mut out = Vec::new();
                for i in 0..*rank {
                    let ch = (b'a' + i as u8) as char;
                    out.push((ch.to_string(), GroupElement::Free(FreeWord::generator(i))));
                    out.push((
                        ch.to_ascii_uppercase().to_string(),
                        GroupElement::Free(FreeWord::generator(i).inverse()),
                    ));
                }
                out
            }
            Backend::FreeMonoidInFree { rank } => (0..*rank)
                .map(|i| {
                    let ch = (b'a' + i as u8) as char;
                    (ch.to_string(), GroupElement::FreeMonoid(FreeWord::generator(i)))
                })
                .collect(),
            Backend::Lamplighter { moduli } => {
                let t = GroupElement::Lamplighter(LampElement { shift: 1, lamps: BTreeMap::new() });
                let mut out = vec![("a".to_string(), t.clone())];
                out.push(("A".to_string(), self.inverse(&t).unwrap()));
                let names = ["b", "c", "d"];
                for (track, name) in (0..moduli.len()).zip(names) {
                    let mut vals = vec![0u32; moduli.len()];
                    vals[track] = 1;
                    let lamp = GroupElement::Lamplighter(LampElement {
                        shift: 0,
                        lamps: BTreeMap::from([(0i64, vals)]),
                    });
                    let g = self.multiply(&t, &lamp).unwrap();
                    out.push((name.to_string(), g.clone()));
                    out.push((name.to_uppercase(), self.inverse(&g).unwrap()));
                }
                out
            }
        }
    }

    /// Exactly the elements at word distance at most `r` from the identity,
    /// BFS over the fixed generating set, sorted for determinism.
    pub fn ball(&self, r: u64, budget: u64) -> Result<Vec<GroupElement>, GroupError> {
        let gens: Vec<GroupElement> = self.generators().into_iter().map(|(_, g)| g).collect();
        let mut seen: HashSet<GroupElement> = HashSet::new();
        let mut queue = VecDeque::new();
        let id = self.identity();
        seen.insert(id.clone());
        queue.push_back((id, 0u64));
        while let Some((g, dist)) = queue.pop_front() {
            if dist == r {
                continue;
            }
            for s in &gens {
                let next = self.multiply(&g, s)?;
                if seen.insert(next.clone()) {
                    if seen.len() as u64 > budget {
                        return Err(GroupError::BudgetExceeded(seen.len() as u64, budget));
                    }
                    queue.push_back((next, dist + 1));
                }
            }
        }
        let mut out: Vec<GroupElement> = seen.into_iter().collect();
        out.sort();
        Ok(out)
    }

    /// Word metric via closed forms where available, BFS otherwise.
    pub fn distance(
        &self,
        g: &GroupElement,
        h: &GroupElement,
        budget: u64,
    ) -> Result<u64, GroupError> {
        self.check(g)?;
        self.check(h)?;
        match (&self.backend, g, h) {
            (Backend::Zd { .. }, GroupElement::Zd(a), GroupElement::Zd(b)) => {
                Ok(a.iter().zip(b).map(|(x, y)| x.abs_diff(*y)).sum())
            }
            (Backend::Free { .. }, GroupElement::Free(a), GroupElement::Free(b)) => {
                Ok(a.inverse().concat(b).len() as u64)
            }
            (
                Backend::FreeMonoidInFree { .. },
                GroupElement::FreeMonoid(a),
                GroupElement::FreeMonoid(b),
            ) => {
                // Ambient free-group metric; only balls are monoid-sided.
                Ok(a.inverse().concat(b).len() as u64)
            }
            _ => self.bfs_distance(g, h, budget),
        }
    }

    fn bfs_distance(
        &self,
        g: &GroupElement,
        h: &GroupElement,
        budget: u64,
    ) -> Result<u64, GroupError> {
        if g == h {
            return Ok(0);
        }
        let gens: Vec<GroupElement> = self.generators().into_iter().map(|(_, e)| e).collect();
        let mut seen: HashSet<GroupElement> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(g.clone());
        queue.push_back((g.clone(), 0u64));
        while let Some((cur, d)) = queue.pop_front() {
            for s in &gens {
                let next = self.multiply(&cur, s)?;
                if next == *h {
                    return Ok(d + 1);
                }
                if seen.insert(next.clone()) {
                    if seen.len() as u64 > budget {
                        return Err(GroupError::BudgetExceeded(seen.len() as u64, budget));
                    }
                    queue.push_back((next, d + 1));
                }
            }
        }
        Err(GroupError::NotReachable)
    }

    /// Word norm of `g` (distance to the identity).
    pub fn norm(&self, g: &GroupElement, budget: u64) -> Result<u64, GroupError> {
        self.distance(&self.identity(), g, budget)
    }

    // -- text forms ---------------------------------------------------------

    pub fn format(&self, g: &GroupElement) -> String {
        match g {
            GroupElement::Zd(v) => v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
            GroupElement::Free(w) | GroupElement::FreeMonoid(w) => {
                if w.is_empty() {
                    return "1".to_string();
                }
                let mut out = String::new();
                for &l in w.letters() {
                    let ch = (b'a' + (l.unsigned_abs() - 1) as u8) as char;
                    out.push(if l > 0 { ch } else { ch.to_ascii_uppercase() });
                }
                out
            }
            GroupElement::Lamplighter(e) => {
                let single =
                    matches!(&self.backend, Backend::Lamplighter { moduli } if moduli.len() == 1);
                let mut out = format!("t^{}|lamps@{{", e.shift);
                let mut first = true;
                for (pos, vals) in &e.lamps {
                    if !first {
                        out.push(',');
                    }
                    first = false;
                    if single && vals[0] == 1 {
                        let _ = write!(out, "{pos}");
                    } else {
                        let joined =
                            vals.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(".");
                        let _ = write!(out, "{pos}:{joined}");
                    }
                }
                out.push('}');
                out
            }
        }
    }

    pub fn parse(&self, s: &str) -> Result<GroupElement, GroupError> {
        let s = s.trim();
        let g = match &self.backend {
            Backend::Zd { d } => {
                let parts: Vec<i64> = s
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse()
                            .map_err(|_| GroupError::Parse(format!("bad integer {t:?}")))
                    })
                    .collect::<Result<_, _>>()?;
                if parts.len() != *d {
                    return Err(GroupError::Parse(format!("expected {d} coordinates")));
                }
                GroupElement::Zd(parts)
            }
            Backend::Free { rank } | Backend::FreeMonoidInFree { rank } => {
                if *rank > 26 {
                    return Err(GroupError::RankTooLarge);
                }
                let mut w = FreeWord::identity();
                if s != "1" {
                    for ch in s.chars() {
                        let lower = ch.to_ascii_lowercase();
                        if !lower.is_ascii_lowercase() {
                            return Err(GroupError::Parse(format!("bad letter {ch:?}")));
                        }
                        let idx = (lower as u8 - b'a') as usize;
                        if idx >= *rank {
                            return Err(GroupError::Parse(format!(
                                "letter {ch:?} outside rank {rank}"
                            )));
                        }
                        let letter = idx as i16 + 1;
                        w.push(if ch.is_ascii_uppercase() { -letter } else { letter });
                    }
                }
                if matches!(self.backend, Backend::FreeMonoidInFree { .. }) {
                    GroupElement::FreeMonoid(w)
                } else {
                    GroupElement::Free(w)
                }
            }
            Backend::Lamplighter { moduli } => {
                let (head, tail) = s
                    .split_once("|lamps@{")
                    .ok_or_else(|| GroupError::Parse("expected t^<n>|lamps@{..}".into()))?;
                let shift: i64 = head
                    .strip_prefix("t^")
                    .and_then(|x| x.parse().ok())
                    .ok_or_else(|| GroupError::Parse("bad shift".into()))?;
                let body = tail
                    .strip_suffix('}')
                    .ok_or_else(|| GroupError::Parse("missing closing brace".into()))?;
                let mut lamps = BTreeMap::new();
                for entry in body.split(',').filter(|e| !e.trim().is_empty()) {
                    let entry = entry.trim();
                    let (pos, vals) = match entry.split_once(':') {
                        Some((p, v)) => {
                            let vals: Vec<u32> = v
                                .split('.')
                                .map(|t| {
                                    t.parse().map_err(|_| {
                                        GroupError::Parse(format!("bad lamp value {t:?}"))
                                    })
                                })
                                .collect::<Result<_, _>>()?;
                            (p, vals)
                        }
                        None => {
                            let mut vals = vec![0u32; moduli.len()];
                            vals[0] = 1;
                            (entry, vals)
                        }
                    };
                    let pos: i64 = pos
                        .trim()
                        .parse()
                        .map_err(|_| GroupError::Parse(format!("bad lamp position {pos:?}")))?;
                    if vals.iter().any(|&v| v != 0) {
                        lamps.insert(pos, vals);
                    }
                }
                GroupElement::Lamplighter(LampElement { shift, lamps })
            }
        };
        self.check(&g)?;
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn group_laws_and_examples() {
        let z2 = Group::zd(2);
        let a = GroupElement::Zd(vec![1, 2]);
        let b = GroupElement::Zd(vec![3, -1]);
        assert_eq!(z2.multiply(&a, &b).unwrap(), GroupElement::Zd(vec![4, 1]));
        let inv = z2.inverse(&a).unwrap();
        assert_eq!(z2.multiply(&a, &inv).unwrap(), z2.identity());

        let f2 = Group::free(2);
        let g = f2.parse("abA").unwrap();
        assert_eq!(f2.format(&g), "abA");
        assert_eq!(f2.multiply(&g, &f2.inverse(&g).unwrap()).unwrap(), f2.identity());
        // Reduction at the seam.
        let h = f2
            .multiply(&f2.parse("ab").unwrap(), &f2.parse("Ba").unwrap())
            .unwrap();
        assert_eq!(f2.format(&h), "aa");
    }

    #[test]
    fn backend_mismatch_is_reported() {
        let z2 = Group::zd(2);
        let f2 = Group::free(2);
        let g = f2.identity();
        assert!(matches!(z2.multiply(&g, &g), Err(GroupError::BackendMismatch)));
        assert!(matches!(
            z2.multiply(&GroupElement::Zd(vec![0]), &z2.identity()),
            Err(GroupError::BackendMismatch)
        ));
    }

    #[test]
    fn lamplighter_wreath_law() {
        // a = t, b = t·(lamp at origin): expanding the wreath product law,
        // a·b and b·a place their lamp at positions one apart.
        let l = Group::lamplighter(vec![2]);
        let gens: BTreeMap<String, GroupElement> = l.generators().into_iter().collect();
        let a = &gens["a"];
        let b = &gens["b"];
        let ab = l.multiply(a, b).unwrap();
        let ba = l.multiply(b, a).unwrap();
        assert_ne!(ab, ba);
        if let (GroupElement::Lamplighter(x), GroupElement::Lamplighter(y)) = (&ab, &ba) {
            assert_eq!(x.shift, 2);
            assert_eq!(y.shift, 2);
            let px: Vec<i64> = x.lamps.keys().copied().collect();
            let py: Vec<i64> = y.lamps.keys().copied().collect();
            assert_eq!(px.len(), 1);
            assert_eq!(py.len(), 1);
            assert_eq!((px[0] - py[0]).abs(), 1);
        } else {
            panic!("not lamplighter elements");
        }
        assert_eq!(l.multiply(b, &l.inverse(b).unwrap()).unwrap(), l.identity());
    }

    #[test]
    fn ball_sizes_match_closed_forms() {
        let z2 = Group::zd(2);
        assert_eq!(z2.ball(0, 100).unwrap(), vec![z2.identity()]);
        // |B_r| in Z^2 is 2r^2 + 2r + 1.
        for r in 0..5u64 {
            let ball = z2.ball(r, 1 << 20).unwrap();
            assert_eq!(ball.len() as u64, 2 * r * r + 2 * r + 1, "r={r}");
        }
        let f2 = Group::free(2);
        for r in 0..=6u64 {
            let ball = f2.ball(r, 1 << 22).unwrap();
            // 1 + 4 * (3^r - 1) / 2 = 2 * 3^r - 1.
            let want = 2 * 3u64.pow(r as u32) - 1;
            assert_eq!(ball.len() as u64, want, "r={r}");
        }
        assert_eq!(f2.ball(2, 1 << 22).unwrap().len(), 17);
        // Monoid balls: sum of 3^i for i <= r.
        let m3 = Group::free_monoid(3);
        for r in 0..5u64 {
            let want: u64 = (0..=r).map(|i| 3u64.pow(i as u32)).sum();
            assert_eq!(m3.ball(r, 1 << 22).unwrap().len() as u64, want);
        }
    }

    #[test]
    fn ball_budget_is_enforced() {
        let f2 = Group::free(2);
        assert!(matches!(f2.ball(6, 100), Err(GroupError::BudgetExceeded(_, 100))));
    }

    #[test]
    fn balls_are_monotone_and_closed_under_generators() {
        let l = Group::lamplighter(vec![2]);
        let mut prev: HashSet<GroupElement> = HashSet::new();
        for r in 0..4u64 {
            let ball: HashSet<GroupElement> = l.ball(r, 1 << 20).unwrap().into_iter().collect();
            assert!(prev.is_subset(&ball));
            if r > 0 {
                for g in &prev {
                    for (_, s) in l.generators() {
                        assert!(ball.contains(&l.multiply(g, &s).unwrap()));
                    }
                }
            }
            prev = ball;
        }
    }

    #[test]
    fn zd_distance_is_l1_and_matches_bfs() {
        let z2 = Group::zd(2);
        let g = GroupElement::Zd(vec![2, -1]);
        let h = GroupElement::Zd(vec![-1, 1]);
        assert_eq!(z2.distance(&g, &h, 1 << 20).unwrap(), 5);
        assert_eq!(z2.distance(&g, &g, 1 << 20).unwrap(), 0);
        assert_eq!(
            z2.distance(&g, &h, 1 << 20).unwrap(),
            z2.distance(&h, &g, 1 << 20).unwrap()
        );
        assert_eq!(z2.bfs_distance(&g, &h, 1 << 20).unwrap(), 5);
    }

    #[test]
    fn text_forms_round_trip() {
        let z2 = Group::zd(2);
        for v in [vec![0, 0], vec![1, -2], vec![-5, 7]] {
            let g = GroupElement::Zd(v);
            assert_eq!(z2.parse(&z2.format(&g)).unwrap(), g);
        }
        let f2 = Group::free(2);
        for s in ["1", "a", "abA", "BBa"] {
            let g = f2.parse(s).unwrap();
            assert_eq!(f2.format(&g), s.to_string());
        }
        let l1 = Group::lamplighter(vec![2]);
        let e = l1.parse("t^3|lamps@{0,2}").unwrap();
        assert_eq!(l1.format(&e), "t^3|lamps@{0,2}");
        let l2 = Group::lamplighter(vec![2, 2]);
        let e2 = l2.parse("t^-1|lamps@{0:1.0,4:0.1}").unwrap();
        assert_eq!(l2.format(&e2), "t^-1|lamps@{0:1.0,4:0.1}");
    }

    proptest! {
        #[test]
        fn free_group_associativity(a in "[abAB]{0,8}", b in "[abAB]{0,8}", c in "[abAB]{0,8}") {
            let f2 = Group::free(2);
            let x = f2.parse(&a).unwrap_or_else(|_| f2.identity());
            let y = f2.parse(&b).unwrap_or_else(|_| f2.identity());
            let z = f2.parse(&c).unwrap_or_else(|_| f2.identity());
            let left = f2.multiply(&f2.multiply(&x, &y).unwrap(), &z).unwrap();
            let right = f2.multiply(&x, &f2.multiply(&y, &z).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn lamplighter_associativity(sa in -2i64..3, sb in -2i64..3, pa in -2i64..3, pb in -2i64..3) {
            let l = Group::lamplighter(vec![3]);
            let mk = |s: i64, p: i64| GroupElement::Lamplighter(LampElement {
                shift: s,
                lamps: BTreeMap::from([(p, vec![1u32])]),
            });
            let (x, y, z) = (mk(sa, pa), mk(sb, pb), mk(sa + sb, pa - pb));
            let left = l.multiply(&l.multiply(&x, &y).unwrap(), &z).unwrap();
            let right = l.multiply(&x, &l.multiply(&y, &z).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }
    }
}
