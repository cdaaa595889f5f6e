//! Desk-scale gadget builders: self-indexing geometric cones on `Z^D`,
//! lamplighter grids, thickets, and the tree-acceptance reduction over a
//! free monoid.

pub mod grid;
pub mod reduction;
pub mod thicket;
pub mod zd;

use thiserror::Error;

use crate::barrington::BarringtonError;
use crate::ca::CaError;
use crate::groups::GroupError;
use crate::machines::MachineError;
use crate::perm::PermError;
use crate::ripple::RippleError;

#[derive(Debug, Error)]
pub enum BuildError {
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Ca(#[from] CaError),
    #[error(transparent)]
    Ripple(#[from] RippleError),
    #[error(transparent)]
    Barrington(#[from] BarringtonError),
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error("instance above the desk-scale budget: {0}")]
    Budget(String),
    #[error("{0}")]
    Invalid(String),
}
