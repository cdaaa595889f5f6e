//! Nondeterministic Turing machines over fixed-width instantaneous
//! descriptions, the two-machine tree acceptance problem, and the toy
//! machine fixtures used by the verification suites.
//!
//! IDs here have a fixed length: a head move that would leave the window
//! simply yields no step. This matches the formula-level step relation,
//! which compares two IDs of equal length.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MachineError {
    #[error("instantaneous description must contain exactly one head symbol")]
    BadId,
    #[error("state or symbol index out of range")]
    IndexOutOfRange,
    #[error("machines must share states, tape alphabet and initial state")]
    IncompatibleMachines,
    #[error("input length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("unknown name {0:?} in machine description")]
    UnknownName(String),
}

/// Transition `(q, read) -> (q2, write, dir)` with `dir` in `{-1, 0, 1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quint {
    pub q: usize,
    pub read: usize,
    pub q2: usize,
    pub write: usize,
    pub dir: i8,
}

/// Nondeterministic Turing machine `(Q, Σ, Δ, q_init, F, blank)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ndtm {
    pub name: String,
    pub states: Vec<String>,
    pub tape: Vec<String>,
    pub blank: usize,
    pub init: usize,
    pub accept: Vec<bool>,
    pub delta: Vec<Quint>,
}

impl Ndtm {
    pub fn validate(&self) -> Result<(), MachineError> {
        let q_n = self.states.len();
        let s_n = self.tape.len();
        if self.blank >= s_n || self.init >= q_n || self.accept.len() != q_n {
            return Err(MachineError::IndexOutOfRange);
        }
        for t in &self.delta {
            if t.q >= q_n || t.q2 >= q_n || t.read >= s_n || t.write >= s_n || t.dir.abs() > 1 {
                return Err(MachineError::IndexOutOfRange);
            }
        }
        Ok(())
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn tape_count(&self) -> usize {
        self.tape.len()
    }

    pub fn same_interface(&self, other: &Ndtm) -> bool {
        self.states == other.states
            && self.tape == other.tape
            && self.init == other.init
            && self.blank == other.blank
            && self.accept == other.accept
    }
}

/// One cell of an ID: a plain tape symbol or the head `(q, s)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IdSym {
    Sym(usize),
    Head(usize, usize),
}

/// Instantaneous description: a word over `Σ ∪ (Q × Σ)` with exactly one
/// head symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Id(Vec<IdSym>);

impl Id {
    pub fn new(cells: Vec<IdSym>) -> Result<Id, MachineError> {
        let heads = cells.iter().filter(|c| matches!(c, IdSym::Head(..))).count();
        if heads != 1 {
            return Err(MachineError::BadId);
        }
        Ok(Id(cells))
    }

    pub fn cells(&self) -> &[IdSym] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn head(&self) -> (usize, usize, usize) {
        for (i, c) in self.0.iter().enumerate() {
            if let IdSym::Head(q, s) = c {
                return (i, *q, *s);
            }
        }
        unreachable!("Id invariant: exactly one head")
    }

    /// `q_init w` with the head on the first input symbol.
    pub fn initial(machine: &Ndtm, input: &[usize]) -> Id {
        if input.is_empty() {
            return Id(vec![IdSym::Head(machine.init, machine.blank)]);
        }
        let mut cells = vec![IdSym::Head(machine.init, input[0])];
        cells.extend(input[1..].iter().map(|&s| IdSym::Sym(s)));
        Id(cells)
    }

    pub fn is_accepting(&self, machine: &Ndtm) -> bool {
        let (_, q, _) = self.head();
        machine.accept[q]
    }

    /// All valid IDs of the given length, in lexicographic order. Only
    /// sensible at desk scale.
    pub fn enumerate(machine: &Ndtm, len: usize) -> Vec<Id> {
        let s_n = machine.tape_count();
        let q_n = machine.state_count();
        let mut out = Vec::new();
        let mut stack: Vec<(Vec<IdSym>, bool)> = vec![(Vec::new(), false)];
        while let Some((cells, has_head)) = stack.pop() {
            if cells.len() == len {
                if has_head {
                    out.push(Id(cells));
                }
                continue;
            }
            // Push in reverse so that plain symbols come out first.
            if !has_head {
                for q in (0..q_n).rev() {
                    for s in (0..s_n).rev() {
                        let mut next = cells.clone();
                        next.push(IdSym::Head(q, s));
                        stack.push((next, true));
                    }
                }
            }
            for s in (0..s_n).rev() {
                let mut next = cells.clone();
                next.push(IdSym::Sym(s));
                stack.push((next, has_head));
            }
        }
        out.sort();
        out
    }
}

/// All IDs one computation step away, keeping the window length fixed.
/// Moves off either end of the window produce no step.
pub fn steps(machine: &Ndtm, id: &Id) -> Vec<Id> {
    let (i, q, s) = id.head();
    let mut out = Vec::new();
    for t in &machine.delta {
        if t.q != q || t.read != s {
            continue;
        }
        match t.dir {
            0 => {
                let mut cells = id.0.clone();
                cells[i] = IdSym::Head(t.q2, t.write);
                out.push(Id(cells));
            }
            1 => {
                if i + 1 < id.len() {
                    if let IdSym::Sym(a) = id.0[i + 1] {
                        let mut cells = id.0.clone();
                        cells[i] = IdSym::Sym(t.write);
                        cells[i + 1] = IdSym::Head(t.q2, a);
                        out.push(Id(cells));
                    }
                }
            }
            -1 => {
                if i > 0 {
                    if let IdSym::Sym(a) = id.0[i - 1] {
                        let mut cells = id.0.clone();
                        cells[i - 1] = IdSym::Head(t.q2, a);
                        cells[i] = IdSym::Sym(t.write);
                        out.push(Id(cells));
                    }
                }
            }
            _ => {}
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Does a full binary tree of configurations exist: root `q_init u`,
/// 0-edges step by `t0`, 1-edges by `t1`, and every depth-`n` leaf
/// accepting? `n = |u|` must be a power of two.
///
/// Computed by memoized search keyed on (ID, remaining depth): an ID roots
/// an accepting subtree of depth `d > 0` iff both machines admit a step
/// into an accepting subtree of depth `d - 1`.
pub fn tree_accepts(t0: &Ndtm, t1: &Ndtm, input: &[usize]) -> Result<bool, MachineError> {
    if !t0.same_interface(t1) {
        return Err(MachineError::IncompatibleMachines);
    }
    let n = input.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(MachineError::NotPowerOfTwo(n));
    }
    let root = Id::initial(t0, input);
    let mut memo: HashMap<(Id, usize), bool> = HashMap::new();
    Ok(subtree_accepts(t0, t1, &root, n, &mut memo))
}

fn subtree_accepts(
    t0: &Ndtm,
    t1: &Ndtm,
    id: &Id,
    remaining: usize,
    memo: &mut HashMap<(Id, usize), bool>,
) -> bool {
    if remaining == 0 {
        return id.is_accepting(t0);
    }
    if let Some(&v) = memo.get(&(id.clone(), remaining)) {
        return v;
    }
    let ok = [t0, t1].iter().all(|m| {
        steps(m, id)
            .iter()
            .any(|child| subtree_accepts(t0, t1, child, remaining - 1, memo))
    });
    memo.insert((id.clone(), remaining), ok);
    ok
}

// ---------------------------------------------------------------------------
// JSON machine specs
// ---------------------------------------------------------------------------

/// Serialization mirror: `{states, alphabet, blank, init, accept, delta}`
/// with names instead of indices.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MachineSpec {
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub blank: String,
    pub init: String,
    pub accept: Vec<String>,
    pub delta: Vec<(String, String, String, String, i8)>,
}

impl MachineSpec {
    pub fn to_machine(&self, name: &str) -> Result<Ndtm, MachineError> {
        let state = |n: &String| {
            self.states
                .iter()
                .position(|s| s == n)
                .ok_or_else(|| MachineError::UnknownName(n.clone()))
        };
        let sym = |n: &String| {
            self.alphabet
                .iter()
                .position(|s| s == n)
                .ok_or_else(|| MachineError::UnknownName(n.clone()))
        };
        let mut accept = vec![false; self.states.len()];
        for a in &self.accept {
            accept[state(a)?] = true;
        }
        let delta = self
            .delta
            .iter()
            .map(|(q, s, q2, s2, d)| {
                Ok(Quint {
                    q: state(q)?,
                    read: sym(s)?,
                    q2: state(q2)?,
                    write: sym(s2)?,
                    dir: *d,
                })
            })
            .collect::<Result<_, MachineError>>()?;
        let m = Ndtm {
            name: name.to_string(),
            states: self.states.clone(),
            tape: self.alphabet.clone(),
            blank: sym(&self.blank)?,
            init: state(&self.init)?,
            accept,
            delta,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn from_machine(m: &Ndtm) -> MachineSpec {
        MachineSpec {
            states: m.states.clone(),
            alphabet: m.tape.clone(),
            blank: m.tape[m.blank].clone(),
            init: m.states[m.init].clone(),
            accept: m
                .accept
                .iter()
                .enumerate()
                .filter(|&(_, &a)| a)
                .map(|(i, _)| m.states[i].clone())
                .collect(),
            delta: m
                .delta
                .iter()
                .map(|t| {
                    (
                        m.states[t.q].clone(),
                        m.tape[t.read].clone(),
                        m.states[t.q2].clone(),
                        m.tape[t.write].clone(),
                        t.dir,
                    )
                })
                .collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Fixtures
// ---------------------------------------------------------------------------

/// The fixed pair used by the tree-acceptance reduction. Both share
/// `Q = {q0, qa}`, `Σ = {0, 1}`, blank `0`, accepting `qa`. The pair is
/// designed so that the tree accepts exactly the inputs whose first symbol
/// is `0`: machine 1 can only leave `q0` when reading `0`.
pub fn toy_tree_pair() -> (Ndtm, Ndtm) {
    let states = vec!["q0".to_string(), "qa".to_string()];
    let tape = vec!["0".to_string(), "1".to_string()];
    let accept = vec![false, true];
    let wait = |delta: &mut Vec<Quint>| {
        for s in 0..2 {
            delta.push(Quint { q: 1, read: s, q2: 1, write: s, dir: 0 });
        }
    };
    let mut d0 = Vec::new();
    for s in 0..2 {
        d0.push(Quint { q: 0, read: s, q2: 1, write: s, dir: 0 });
    }
    d0.push(Quint { q: 0, read: 0, q2: 0, write: 0, dir: 1 });
    wait(&mut d0);
    let mut d1 = vec![Quint { q: 0, read: 0, q2: 1, write: 0, dir: 0 }];
    wait(&mut d1);
    let base = |name: &str, delta: Vec<Quint>| Ndtm {
        name: name.to_string(),
        states: states.clone(),
        tape: tape.clone(),
        blank: 0,
        init: 0,
        accept: accept.clone(),
        delta,
    };
    (base("tree0", d0), base("tree1", d1))
}

/// Two small machines exercising all three head movements, used by the
/// step-formula agreement checks.
pub fn toy_step_machines() -> (Ndtm, Ndtm) {
    let states = vec!["p".to_string(), "q".to_string(), "r".to_string()];
    let tape = vec!["0".to_string(), "1".to_string()];
    let m1 = Ndtm {
        name: "stepper1".to_string(),
        states: states.clone(),
        tape: tape.clone(),
        blank: 0,
        init: 0,
        accept: vec![false, false, true],
        delta: vec![
            Quint { q: 0, read: 0, q2: 1, write: 1, dir: 1 },
            Quint { q: 0, read: 1, q2: 1, write: 0, dir: -1 },
            Quint { q: 1, read: 0, q2: 0, write: 0, dir: 0 },
            Quint { q: 1, read: 1, q2: 2, write: 1, dir: 1 },
            Quint { q: 2, read: 0, q2: 2, write: 0, dir: -1 },
        ],
    };
    let m2 = Ndtm {
        name: "stepper2".to_string(),
        states,
        tape,
        blank: 0,
        init: 0,
        accept: vec![false, false, true],
        delta: vec![
            Quint { q: 0, read: 0, q2: 0, write: 1, dir: 0 },
            Quint { q: 0, read: 1, q2: 2, write: 0, dir: 1 },
            Quint { q: 0, read: 1, q2: 1, write: 1, dir: -1 },
            Quint { q: 1, read: 0, q2: 2, write: 1, dir: -1 },
            Quint { q: 2, read: 1, q2: 0, write: 0, dir: 1 },
        ],
    };
    (m1, m2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids_of(v: &[IdSym]) -> Id {
        Id::new(v.to_vec()).unwrap()
    }

    #[test]
    fn id_invariant() {
        assert!(Id::new(vec![IdSym::Sym(0), IdSym::Sym(1)]).is_err());
        assert!(Id::new(vec![IdSym::Head(0, 0), IdSym::Head(0, 1)]).is_err());
        assert!(Id::new(vec![IdSym::Sym(0), IdSym::Head(0, 1)]).is_ok());
    }

    #[test]
    fn steps_move_right_matches_definition() {
        // A quintuple with d = +1 on u(q,s)av yields us'(q',a)v.
        let (m1, _) = toy_step_machines();
        // (p,0) -> (q,1,+1)
        let id = ids_of(&[IdSym::Head(0, 0), IdSym::Sym(1), IdSym::Sym(0)]);
        let got = steps(&m1, &id);
        let want = ids_of(&[IdSym::Sym(1), IdSym::Head(1, 1), IdSym::Sym(0)]);
        assert!(got.contains(&want), "got {got:?}");
    }

    #[test]
    fn steps_move_left_matches_definition() {
        // (p,1) -> (q,0,-1) on ua(q,s)v yields u(q,a)s'v.
        let (m1, _) = toy_step_machines();
        let id = ids_of(&[IdSym::Sym(1), IdSym::Head(0, 1)]);
        let got = steps(&m1, &id);
        let want = ids_of(&[IdSym::Head(1, 1), IdSym::Sym(0)]);
        assert_eq!(got, vec![want]);
    }

    #[test]
    fn steps_edge_blocked() {
        let (m1, _) = toy_step_machines();
        // Head at right edge, only rule for (q=p, read 0) moves right.
        let id = ids_of(&[IdSym::Sym(1), IdSym::Head(0, 0)]);
        assert!(steps(&m1, &id).is_empty());
    }

    #[test]
    fn steps_no_rule_gives_empty() {
        let (_, m2) = toy_step_machines();
        // m2 has no rule for (r, 0).
        let id = ids_of(&[IdSym::Head(2, 0), IdSym::Sym(0)]);
        assert!(steps(&m2, &id).is_empty());
    }

    #[test]
    fn steps_deterministic_singleton_and_nondeterministic_pair() {
        let (m1, m2) = toy_step_machines();
        let stay = ids_of(&[IdSym::Head(1, 0), IdSym::Sym(0)]);
        assert_eq!(steps(&m1, &stay).len(), 1);
        // m2 branches on (p, 1).
        let branchy = ids_of(&[IdSym::Sym(0), IdSym::Head(0, 1), IdSym::Sym(0)]);
        assert_eq!(steps(&m2, &branchy).len(), 2);
    }

    /// Independent oracle: direct recursive enumeration with no memo.
    fn naive_tree(t0: &Ndtm, t1: &Ndtm, id: &Id, remaining: usize) -> bool {
        if remaining == 0 {
            return id.is_accepting(t0);
        }
        [t0, t1].iter().all(|m| {
            steps(m, id)
                .into_iter()
                .any(|c| naive_tree(t0, t1, &c, remaining - 1))
        })
    }

    #[test]
    fn tree_accepts_matches_naive_recursion() {
        let (t0, t1) = toy_tree_pair();
        for len in [1usize, 2, 4] {
            let mut inputs = vec![vec![0; len]];
            for i in 0..len {
                let mut v = vec![0; len];
                v[i] = 1;
                inputs.push(v);
            }
            inputs.push(vec![1; len]);
            for u in inputs {
                let got = tree_accepts(&t0, &t1, &u).unwrap();
                let naive = naive_tree(&t0, &t1, &Id::initial(&t0, &u), u.len());
                assert_eq!(got, naive, "input {u:?}");
                // For this pair, acceptance is "first symbol is 0".
                assert_eq!(got, u[0] == 0, "input {u:?}");
            }
        }
    }

    #[test]
    fn tree_accepts_trivial_machines() {
        // Accept-immediately-and-wait machines accept everything.
        let states = vec!["a".to_string()];
        let tape = vec!["0".to_string(), "1".to_string()];
        let m = Ndtm {
            name: "wait".into(),
            states,
            tape,
            blank: 0,
            init: 0,
            accept: vec![true],
            delta: vec![
                Quint { q: 0, read: 0, q2: 0, write: 0, dir: 0 },
                Quint { q: 0, read: 1, q2: 0, write: 1, dir: 0 },
            ],
        };
        assert!(tree_accepts(&m, &m, &[1, 0]).unwrap());
        // Empty accepting set rejects everything.
        let mut rej = m.clone();
        rej.accept = vec![false];
        assert!(!tree_accepts(&rej, &rej, &[1, 0]).unwrap());
    }

    #[test]
    fn tree_accepts_monotone_in_accepting_states() {
        let (t0, t1) = toy_tree_pair();
        // Making q0 accepting as well can only flip false -> true.
        let mut t0b = t0.clone();
        let mut t1b = t1.clone();
        t0b.accept = vec![true, true];
        t1b.accept = vec![true, true];
        for u in [[0, 0], [0, 1], [1, 0], [1, 1]] {
            let before = tree_accepts(&t0, &t1, &u).unwrap();
            let after = tree_accepts(&t0b, &t1b, &u).unwrap();
            assert!(!before || after);
        }
    }

    #[test]
    fn tree_accepts_rejects_bad_lengths_and_interfaces() {
        let (t0, t1) = toy_tree_pair();
        assert!(matches!(
            tree_accepts(&t0, &t1, &[0, 0, 0]),
            Err(MachineError::NotPowerOfTwo(3))
        ));
        let (m1, _) = toy_step_machines();
        assert!(matches!(
            tree_accepts(&t0, &m1, &[0, 0]),
            Err(MachineError::IncompatibleMachines)
        ));
    }

    #[test]
    fn machine_spec_round_trip() {
        let (m1, _) = toy_step_machines();
        let spec = MachineSpec::from_machine(&m1);
        let json = serde_json::to_string(&spec).unwrap();
        let back: MachineSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_machine("stepper1").unwrap(), m1);
    }
}
