//! Numerical laboratory for special flows over circle rotations and over
//! Aubry-Mather (Denjoy) Cantor sets.
//!
//! The crate is organised bottom-up:
//!
//! - [`arithmetic`]: continued fractions, exact orbit points of the rotation,
//!   general-position and integer-relation predicates.
//! - [`denjoy`]: Cantor circle systems with prescribed holes and the
//!   semi-conjugacy to the rotation.
//! - [`cocycle`]: jump sequences, the `σ_k e_k` decomposition, explicit
//!   coboundary solutions and Birkhoff-sum bounds.
//! - [`specialflow`]: suspension flows, Weyl-sum eigenvalue detection and
//!   Cesàro correlation decay.
//! - [`hamiltonian`]: the perturbed integrable Hamiltonian, its Poincaré
//!   map, minimizing periodic orbits and time-change ceilings.
//! - [`experiment`]: config-driven runner used by the `lab` binary.

pub mod arithmetic;
pub mod cocycle;
pub mod denjoy;
pub mod error;
pub mod experiment;
pub mod hamiltonian;
pub mod specialflow;

mod numerics;

pub use error::{Error, Result};
