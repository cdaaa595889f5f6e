//! Exact, desk-scale machinery for permutation groups acting on controlled
//! state spaces, labeled graphs, and full shifts over finitely generated
//! groups. Everything here is verified against brute-force oracles; there
//! are no asymptotic claims, only exact equalities on finite instances.

pub mod barrington;
pub mod ca;
pub mod constructions;
pub mod formula;
pub mod groups;
pub mod machines;
pub mod perm;
pub mod ripple;
pub mod splitting;
pub mod wang;
