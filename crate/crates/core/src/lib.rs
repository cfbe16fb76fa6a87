//! Clifford symmetries of Pauli-sum Hamiltonians: finding them through graph
//! automorphisms, shrinking their qubit cost, and splitting the Hamiltonian
//! into per-sector effective qudit Hamiltonians.

pub mod automorph;
pub mod bench;
pub mod circuit;
pub mod dense;
pub mod error;
pub mod exploit;
pub mod extract;
pub mod find;
pub mod gf2;
pub mod graph;
pub mod io;
pub mod models;
pub mod pauli;
pub mod poly;
pub mod qcost;
pub mod qudit;
pub mod sector;
pub mod symplectic;
pub mod synth;

pub use circuit::{apply_clifford, circuit_symplectic, CliffordCircuit, Gate};
pub use error::{Error, Result};
pub use gf2::{gf2_solve, BitMatrix, BitVec};
pub use pauli::{canonicalize, gram_matrix, symplectic_product, HamiltonianTableau, PauliTerm, PauliVector, C64};
pub use symplectic::{CliffordTableau, SymplecticMatrix};
pub use synth::{random_clifford, synthesize};
