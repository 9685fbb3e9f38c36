//! Finite models of residuated lattices, A-algebras and girales.

pub mod algebra;
pub mod formula;
pub mod group;
pub mod limits;
pub mod construct;
pub mod amalgam;
pub mod semantics;
pub mod proofs;
pub mod corpus;
pub mod cli;
