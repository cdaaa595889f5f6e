//! Depth-k S-ary word trees quotiented by sibling identifications, and the
//! thicket predicate (every leaf path passes at least n fully branching
//! nodes).

use super::BuildError;

/// Word tree over `S^{≤k}` after identifying, for each `u` in the
/// identification set, the subtrees below all children of `u` pointwise.
#[derive(Clone, Debug)]
pub struct Thicket {
    pub k: usize,
    pub s_count: usize,
    /// Class representative per word id.
    class: Vec<usize>,
    /// Start offset of each length layer in word-id space.
    offsets: Vec<usize>,
}

fn word_count(s: usize, k: usize) -> usize {
    (0..=k).map(|i| s.pow(i as u32)).sum()
}

impl Thicket {
    pub fn word_id(&self, word: &[usize]) -> usize {
        debug_assert!(word.len() <= self.k);
        let mut rank = 0usize;
        for &l in word {
            rank = rank * self.s_count + l;
        }
        self.offsets[word.len()] + rank
    }

    pub fn class_of(&self, word: &[usize]) -> usize {
        self.class[self.word_id(word)]
    }
}

/// Builds the quotient by the minimal equivalence closure of
/// `{u s v ~ u s' v}` for `u` in the identification set.
pub fn build_thicket(k: usize, s_count: usize, idents: &[Vec<usize>]) -> Result<Thicket, BuildError> {
    if s_count < 2 {
        return Err(BuildError::Invalid("need at least 2 labels".into()));
    }
    if k > 12 || word_count(s_count, k) > 2_000_000 {
        return Err(BuildError::Budget(format!("word tree of depth {k} over {s_count} labels")));
    }
    let total = word_count(s_count, k);
    let mut offsets = vec![0usize; k + 2];
    for i in 0..=k {
        offsets[i + 1] = offsets[i] + s_count.pow(i as u32);
    }
    let mut parent: Vec<usize> = (0..total).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    let mut th = Thicket { k, s_count, class: (0..total).collect(), offsets };
    for u in idents {
        if u.len() + 1 > k {
            continue;
        }
        if u.iter().any(|&l| l >= s_count) {
            return Err(BuildError::Invalid("identification word outside the label set".into()));
        }
        // Identify u s v ~ u s' v for all suffixes v.
        let mut suffixes: Vec<Vec<usize>> = vec![Vec::new()];
        let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..(k - u.len() - 1) {
            layer = layer
                .iter()
                .flat_map(|v| {
                    (0..s_count).map(move |s| {
                        let mut w = v.clone();
                        w.push(s);
                        w
                    })
                })
                .collect();
            suffixes.extend(layer.iter().cloned());
        }
        for v in &suffixes {
            let mut first: Option<usize> = None;
            for s in 0..s_count {
                let mut w = u.clone();
                w.push(s);
                w.extend(v.iter().copied());
                if w.len() > k {
                    continue;
                }
                let id = th.word_id(&w);
                match first {
                    None => first = Some(id),
                    Some(f) => {
                        let (ra, rb) = (find(&mut parent, f), find(&mut parent, id));
                        if ra != rb {
                            parent[rb] = ra;
                        }
                    }
                }
            }
        }
    }
    for x in 0..total {
        th.class[x] = find(&mut parent, x);
    }
    Ok(th)
}

/// Does every leaf word pass at least `n` prefixes whose children fall in
/// `s_count` distinct classes?
pub fn is_thicket(t: &Thicket, n: usize) -> bool {
    let mut leaf = vec![0usize; t.k];
    loop {
        let mut branching = 0usize;
        for p in 0..t.k {
            let prefix = &leaf[..p];
            let mut kids: Vec<usize> = (0..t.s_count)
                .map(|s| {
                    let mut w = prefix.to_vec();
                    w.push(s);
                    t.class_of(&w)
                })
                .collect();
            kids.sort_unstable();
            kids.dedup();
            if kids.len() == t.s_count {
                branching += 1;
            }
        }
        if branching < n {
            return false;
        }
        // next leaf
        let mut pos = 0;
        loop {
            if pos == t.k {
                return true;
            }
            leaf[pos] += 1;
            if leaf[pos] < t.s_count {
                break;
            }
            leaf[pos] = 0;
            pos += 1;
        }
    }
}
