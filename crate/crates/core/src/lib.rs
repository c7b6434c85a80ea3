//! Lattice extensions of Iwahori-Hecke algebras of finite Coxeter groups.
//!
//! [`coxeter`] models the groups, [`lattice`] builds lattices of reflection
//! subgroups, [`algebra`] implements the algebra on the basis `g_w e_L` with
//! exact [`laurent`] coefficients, [`moebius`] and [`trace`] cover the block
//! structure and the symmetrizing trace, and [`report`] drives the CLI.

pub mod algebra;
pub mod coxeter;
pub mod lattice;
pub mod laurent;
pub mod linalg;
pub mod moebius;
pub mod report;
pub mod trace;
