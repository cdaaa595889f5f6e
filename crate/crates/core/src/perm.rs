//! Finite permutations with the composition convention `(p ∘ q)(x) = p(q(x))`
//! (right factor applied first), commutators `[a, b] = a⁻¹ ∘ b⁻¹ ∘ a ∘ b`,
//! and the commutator decompositions used by the word compilers.
//!
//! Under this orientation `[(a b c), (c d e)] = (c b e)`, which is the anchor
//! identity the rest of the crate is calibrated against.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("domain mismatch: {0} vs {1}")]
    DomainMismatch(usize, usize),
    #[error("images do not form a bijection on [0, {0})")]
    NotABijection(usize),
    #[error("permutation is odd, operation requires an even permutation")]
    OddPermutation,
    #[error("domain size {0} too small, need at least {1}")]
    DomainTooSmall(usize, usize),
    #[error("decomposition search exhausted (parameters below cardinality thresholds)")]
    Infeasible,
    #[error("cycle notation parse error: {0}")]
    Parse(String),
    #[error("point {0} outside domain [0, {1})")]
    PointOutOfDomain(usize, usize),
}

/// A permutation of `[0, n)` stored by its image vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm {
            images: (0..n).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Perm, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(PermError::NotABijection(n));
            }
            seen[i] = true;
        }
        Ok(Perm { images })
    }

    /// Builds the permutation from disjoint cycles; `(x1 x2 .. xm)` maps
    /// `x1 → x2 → .. → xm → x1`.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Perm, PermError> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for window in 0..cycle.len() {
                let a = cycle[window];
                let b = cycle[(window + 1) % cycle.len()];
                if a >= n {
                    return Err(PermError::PointOutOfDomain(a, n));
                }
                if touched[a] {
                    return Err(PermError::Parse(format!("point {a} repeated across cycles")));
                }
                touched[a] = true;
                images[a] = b;
            }
        }
        Perm::from_images(images)
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Perm, PermError> {
        Perm::from_cycles(n, &[&[a, b]])
    }

    pub fn three_cycle(n: usize, a: usize, b: usize, c: usize) -> Result<Perm, PermError> {
        Perm::from_cycles(n, &[&[a, b, c]])
    }

    pub fn domain_size(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `(self ∘ q)(x) = self(q(x))`; `q` is applied first.
    pub fn compose(&self, q: &Perm) -> Result<Perm, PermError> {
        if self.domain_size() != q.domain_size() {
            return Err(PermError::DomainMismatch(self.domain_size(), q.domain_size()));
        }
        Ok(Perm {
            images: q.images.iter().map(|&x| self.images[x]).collect(),
        })
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j] = i;
        }
        Perm { images }
    }

    /// `[self, q] = self⁻¹ ∘ q⁻¹ ∘ self ∘ q`.
    pub fn commutator(&self, q: &Perm) -> Result<Perm, PermError> {
        self.inverse()
            .compose(&q.inverse())?
            .compose(self)?
            .compose(q)
    }

    /// Nested commutator `[p1, p2, .., pk] = [p1, [p2, .., pk]]`, folded
    /// right to left.
    pub fn nested_commutator(perms: &[Perm]) -> Result<Perm, PermError> {
        match perms {
            [] => Err(PermError::Parse("empty commutator".into())),
            [p] => Ok(p.clone()),
            [p, rest @ ..] => p.commutator(&Perm::nested_commutator(rest)?),
        }
    }

    /// Conjugation `self ^ b = b⁻¹ ∘ self ∘ b`.
    pub fn conjugate_by(&self, b: &Perm) -> Result<Perm, PermError> {
        b.inverse().compose(self)?.compose(b)
    }

    pub fn support(&self) -> Vec<usize> {
        self.images
            .iter()
            .enumerate()
            .filter(|&(i, &j)| i != j)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn moves(&self, x: usize) -> bool {
        self.images[x] != x
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.images[start] == start {
                seen[start] = true;
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.images[start];
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.images[x];
            }
            out.push(cycle);
        }
        out
    }

    pub fn is_even(&self) -> bool {
        self.cycles().iter().map(|c| c.len() - 1).sum::<usize>() % 2 == 0
    }

    /// Writes `self` as an ordered product of transpositions (index 0
    /// applied last, matching the composition convention).
    pub fn transpositions(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for cycle in self.cycles() {
            for w in cycle.windows(2) {
                out.push((w[0], w[1]));
            }
        }
        out
    }

    /// Writes an even permutation as an ordered product of 3-rotations
    /// (index 0 applied last). The identity yields the empty product.
    pub fn product_of_3cycles(&self) -> Result<Vec<Perm>, PermError> {
        if !self.is_even() {
            return Err(PermError::OddPermutation);
        }
        let n = self.domain_size();
        let ts = self.transpositions();
        debug_assert_eq!(ts.len() % 2, 0);
        let mut out = Vec::new();
        for pair in ts.chunks(2) {
            let (a, b) = pair[0];
            let (c, d) = pair[1];
            if (a, b) == (c, d) || (a, b) == (d, c) {
                continue;
            }
            let shared = a == c || a == d || b == c || b == d;
            if shared {
                let t1 = Perm::transposition(n, a, b)?;
                let t2 = Perm::transposition(n, c, d)?;
                out.push(t1.compose(&t2)?);
            } else {
                // (a b)(c d) = (a b c) ∘ (b c d)
                out.push(Perm::three_cycle(n, a, b, c)?);
                out.push(Perm::three_cycle(n, b, c, d)?);
            }
        }
        Ok(out)
    }

    /// Ordered product of a slice, index 0 applied last:
    /// `product([f0, f1, .., fk]) = f0 ∘ f1 ∘ .. ∘ fk`.
    pub fn product(n: usize, perms: &[Perm]) -> Result<Perm, PermError> {
        let mut acc = Perm::identity(n);
        for p in perms.iter().rev() {
            acc = p.compose(&acc)?;
        }
        Ok(acc)
    }

    /// All permutations of `[0, n)` in lexicographic image order.
    pub fn all(n: usize) -> Vec<Perm> {
        (0..n)
            .permutations(n)
            .map(|images| Perm { images })
            .collect()
    }

    /// All even permutations in lexicographic image order.
    pub fn alternating(n: usize) -> Vec<Perm> {
        Perm::all(n).into_iter().filter(|p| p.is_even()).collect()
    }

    /// Even permutations fixing every point of `fixed`, lexicographic order.
    pub fn alternating_fixing(n: usize, fixed: &[usize]) -> Vec<Perm> {
        Perm::alternating(n)
            .into_iter()
            .filter(|p| fixed.iter().all(|&x| !p.moves(x)))
            .collect()
    }

    /// Ore decomposition: returns `(p1, p2)` with `[p1, p2] = self`, both
    /// even. Deterministic: the randomized phase is seeded from the input
    /// and the fallback scans pairs in lexicographic image order.
    pub fn ore_decompose(&self) -> Result<(Perm, Perm), PermError> {
        let n = self.domain_size();
        if n < 5 {
            return Err(PermError::DomainTooSmall(n, 5));
        }
        if !self.is_even() {
            return Err(PermError::OddPermutation);
        }
        if self.is_identity() {
            return Ok((Perm::identity(n), Perm::identity(n)));
        }
        let alt = Perm::alternating(n);
        if n >= 7 {
            if let Some(hit) = self.commutator_pair_randomized(&alt, 200_000) {
                return Ok(hit);
            }
        }
        self.commutator_pair_in(&alt).ok_or(PermError::Infeasible)
    }

    /// Decomposes `self` into a nested commutator `[p1, .., pk]` of even
    /// permutations, none of which moves `avoid` (when given).
    pub fn decompose_avoiding(
        &self,
        avoid: Option<usize>,
        arity: usize,
    ) -> Result<Vec<Perm>, PermError> {
        let n = self.domain_size();
        if arity < 2 {
            return Err(PermError::Parse("arity must be at least 2".into()));
        }
        if !self.is_even() {
            return Err(PermError::OddPermutation);
        }
        if let Some(c) = avoid {
            if c >= n {
                return Err(PermError::PointOutOfDomain(c, n));
            }
            if self.moves(c) {
                return Err(PermError::Infeasible);
            }
        }
        if self.is_identity() {
            return Ok(vec![Perm::identity(n); arity]);
        }
        let pool = match avoid {
            Some(c) => Perm::alternating_fixing(n, &[c]),
            None => Perm::alternating(n),
        };
        self.decompose_in_pool(&pool, arity)
            .ok_or(PermError::Infeasible)
    }

    fn decompose_in_pool(&self, pool: &[Perm], arity: usize) -> Option<Vec<Perm>> {
        if arity == 2 {
            let (a, b) = self.commutator_pair_in(pool)?;
            return Some(vec![a, b]);
        }
        // self = [p1, rest] with rest decomposed recursively; first pair that
        // admits a deeper decomposition wins.
        for p1 in pool {
            for rest in pool {
                if p1.commutator(rest).unwrap() == *self {
                    if let Some(mut tail) = rest.decompose_in_pool(pool, arity - 1) {
                        let mut out = vec![p1.clone()];
                        out.append(&mut tail);
                        return Some(out);
                    }
                }
            }
        }
        None
    }

    fn commutator_pair_in(&self, pool: &[Perm]) -> Option<(Perm, Perm)> {
        for a in pool {
            for b in pool {
                if a.commutator(b).unwrap() == *self {
                    return Some((a.clone(), b.clone()));
                }
            }
        }
        None
    }

    fn commutator_pair_randomized(&self, pool: &[Perm], tries: usize) -> Option<(Perm, Perm)> {
        let mut seed = [0u8; 32];
        for (i, &x) in self.images.iter().enumerate().take(32) {
            seed[i] = x as u8;
        }
        let mut rng = ChaCha8Rng::from_seed(seed);
        for _ in 0..tries {
            let a = pool.choose(&mut rng)?;
            let b = pool.choose(&mut rng)?;
            if a.commutator(b).unwrap() == *self {
                return Some((a.clone(), b.clone()));
            }
        }
        None
    }
}

impl fmt::Display for Perm {
    /// Cycle notation, e.g. `(0 1 2)(3 4)`; identity prints `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for cycle in cycles {
            write!(f, "({})", cycle.iter().join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{}[{}]", self.domain_size(), self)
    }
}

/// Parses cycle notation over a known domain size.
pub fn parse_cycles(n: usize, s: &str) -> Result<Perm, PermError> {
    let s = s.trim();
    if s == "()" || s.is_empty() {
        return Ok(Perm::identity(n));
    }
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut rest = s;
    while !rest.is_empty() {
        let open = rest
            .find('(')
            .ok_or_else(|| PermError::Parse(format!("expected '(' in {rest:?}")))?;
        if !rest[..open].trim().is_empty() {
            return Err(PermError::Parse(format!("stray text {:?}", &rest[..open])));
        }
        let close = rest
            .find(')')
            .ok_or_else(|| PermError::Parse("unclosed cycle".into()))?;
        let inner = &rest[open + 1..close];
        let cycle: Vec<usize> = inner
            .split_whitespace()
            .map(|tok| {
                tok.parse::<usize>()
                    .map_err(|_| PermError::Parse(format!("bad point {tok:?}")))
            })
            .collect::<Result<_, _>>()?;
        if !cycle.is_empty() {
            cycles.push(cycle);
        }
        rest = rest[close + 1..].trim_start();
    }
    let refs: Vec<&[usize]> = cycles.iter().map(|c| c.as_slice()).collect();
    Perm::from_cycles(n, &refs)
}

impl FromStr for Perm {
    type Err = PermError;

    /// Parses `n:(cycles)` or bare cycle notation (domain = max point + 1).
    fn from_str(s: &str) -> Result<Perm, PermError> {
        if let Some((head, tail)) = s.split_once(':') {
            let n: usize = head
                .trim()
                .parse()
                .map_err(|_| PermError::Parse(format!("bad domain size {head:?}")))?;
            return parse_cycles(n, tail);
        }
        let max = s
            .split(|c: char| !c.is_ascii_digit())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<usize>().unwrap_or(0))
            .max();
        parse_cycles(max.map_or(0, |m| m + 1), s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c3(n: usize, a: usize, b: usize, c: usize) -> Perm {
        Perm::three_cycle(n, a, b, c).unwrap()
    }

    #[test]
    fn compose_identity_and_inverse() {
        let q = parse_cycles(5, "(0 1 2)(3 4)").unwrap();
        let id = Perm::identity(5);
        assert_eq!(id.compose(&q).unwrap(), q);
        assert_eq!(q.compose(&q.inverse()).unwrap(), id);
    }

    #[test]
    fn compose_applies_right_factor_first() {
        // p = (0 1), q = (1 2): (p ∘ q)(x) = p(q(x)).
        let p = Perm::transposition(3, 0, 1).unwrap();
        let q = Perm::transposition(3, 1, 2).unwrap();
        let pq = p.compose(&q).unwrap();
        // Hand table: 0 → q 0 → p 1; 1 → q 2 → p 2; 2 → q 1 → p 0.
        assert_eq!(pq, c3(3, 0, 1, 2));
    }

    #[test]
    fn compose_domain_mismatch() {
        let p = Perm::identity(4);
        let q = Perm::identity(5);
        assert!(matches!(p.compose(&q), Err(PermError::DomainMismatch(4, 5))));
    }

    #[test]
    fn commutator_trivial_cases() {
        let q = parse_cycles(6, "(0 2 4)").unwrap();
        let id = Perm::identity(6);
        assert_eq!(id.commutator(&q).unwrap(), id);
        assert_eq!(q.commutator(&q).unwrap(), id);
    }

    #[test]
    fn commutator_of_overlapping_3cycles() {
        // [(a b c), (c d e)] = (c b e) with a..e = 0..4. This is the anchor
        // identity for the orientation used throughout the crate.
        let p = c3(5, 0, 1, 2);
        let q = c3(5, 2, 3, 4);
        let want = c3(5, 2, 1, 4);
        assert_eq!(p.commutator(&q).unwrap(), want);
    }

    #[test]
    fn ore_identity() {
        let id = Perm::identity(5);
        let (a, b) = id.ore_decompose().unwrap();
        assert!(a.is_identity() && b.is_identity());
    }

    #[test]
    fn ore_exhaustive_on_alt5() {
        for p in Perm::alternating(5) {
            let (a, b) = p.ore_decompose().unwrap();
            assert!(a.is_even() && b.is_even());
            assert_eq!(a.commutator(&b).unwrap(), p, "ore failed for {p}");
        }
    }

    #[test]
    fn ore_sampled_on_alt6_and_alt7() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [6usize, 7] {
            let alt = Perm::alternating(n);
            for _ in 0..40 {
                let p = alt.choose(&mut rng).unwrap();
                let (a, b) = p.ore_decompose().unwrap();
                assert_eq!(a.commutator(&b).unwrap(), *p);
            }
        }
    }

    #[test]
    fn ore_rejects_odd_and_small() {
        let odd = Perm::transposition(5, 0, 1).unwrap();
        assert!(matches!(odd.ore_decompose(), Err(PermError::OddPermutation)));
        let small = c3(4, 0, 1, 2);
        assert!(matches!(small.ore_decompose(), Err(PermError::DomainTooSmall(4, 5))));
    }

    #[test]
    fn decompose_avoiding_identity() {
        let id = Perm::identity(6);
        let fs = id.decompose_avoiding(Some(3), 2).unwrap();
        assert!(fs.iter().all(|f| f.is_identity()));
    }

    #[test]
    fn decompose_avoiding_pair_and_triple() {
        let p = c3(6, 0, 1, 2);
        for arity in [2usize, 3] {
            let fs = p.decompose_avoiding(Some(5), arity).unwrap();
            assert_eq!(fs.len(), arity);
            for f in &fs {
                assert!(f.is_even());
                assert!(!f.moves(5));
            }
            assert_eq!(Perm::nested_commutator(&fs).unwrap(), p);
        }
    }

    #[test]
    fn decompose_avoiding_all_3cycles_on_6() {
        // Exhaustive over the 3-cycles avoiding the marked point.
        let n = 6;
        let avoid = 5;
        for a in 0..5 {
            for b in 0..5 {
                for c in 0..5 {
                    if a == b || b == c || a == c {
                        continue;
                    }
                    let p = c3(n, a, b, c);
                    let fs = p.decompose_avoiding(Some(avoid), 2).unwrap();
                    assert!(fs.iter().all(|f| !f.moves(avoid)));
                    assert_eq!(Perm::nested_commutator(&fs).unwrap(), p);
                }
            }
        }
    }

    #[test]
    fn decompose_avoiding_rejects_moved_point() {
        let p = c3(6, 0, 1, 5);
        assert!(matches!(p.decompose_avoiding(Some(5), 2), Err(PermError::Infeasible)));
    }

    #[test]
    fn three_cycle_products() {
        let id = Perm::identity(6);
        assert!(id.product_of_3cycles().unwrap().is_empty());

        let single = c3(6, 1, 3, 5);
        let fs = single.product_of_3cycles().unwrap();
        assert_eq!(fs.len(), 1);
        assert_eq!(fs[0], single);

        let double = parse_cycles(6, "(0 1)(2 3)").unwrap();
        let fs = double.product_of_3cycles().unwrap();
        assert_eq!(fs.len(), 2);
        assert_eq!(Perm::product(6, &fs).unwrap(), double);

        for p in Perm::alternating(6) {
            let fs = p.product_of_3cycles().unwrap();
            for f in &fs {
                assert_eq!(f.support().len(), 3);
            }
            assert_eq!(Perm::product(6, &fs).unwrap(), p);
        }
    }

    #[test]
    fn cycle_notation_round_trip() {
        for p in Perm::all(5) {
            let s = p.to_string();
            assert_eq!(parse_cycles(5, &s).unwrap(), p);
        }
        assert_eq!(Perm::identity(4).to_string(), "()");
        let p: Perm = "(0 1 2)(3 4 5)".parse().unwrap();
        assert_eq!(p.domain_size(), 6);
        assert_eq!(p.to_string(), "(0 1 2)(3 4 5)");
    }

    proptest! {
        #[test]
        fn parity_multiplicative(a in 0usize..5040, b in 0usize..5040) {
            let all = Perm::all(7);
            let p = &all[a % all.len()];
            let q = &all[b % all.len()];
            let pq = p.compose(q).unwrap();
            prop_assert_eq!(pq.is_even(), p.is_even() == q.is_even());
        }

        #[test]
        fn inverse_involutive(a in 0usize..720) {
            let all = Perm::all(6);
            let p = &all[a % all.len()];
            prop_assert_eq!(&p.inverse().inverse(), p);
            prop_assert!(p.compose(&p.inverse()).unwrap().is_identity());
        }
    }
}
