//! Compile second-quantized fermionic Hamiltonians into Clifford+T
//! block-encoding circuits, check them against a brute-force fermionic
//! reference, and count their resources.
//!
//! The crate is layered bottom-up:
//!
//! * [`fock`]: ladder-operator algebra and reference matrices.
//! * [`circuit`]: gate IR, sparse simulation, lowering, cost accounting, QASM text.
//! * [`oracles`]: reusable sub-circuits (SWAP-UP, phase/sparsity oracles,
//!   SELECT-SWAP lookup, direct sampling, occupation detection, arithmetic).
//! * [`blockenc`]: full encoders per Hamiltonian class and their verification.
//! * [`qsvt`]: phase sequences applied to scalars and to encoders.
//! * [`resources`]: closed-form cost models and sweeps.
//! * [`cli`]: the `febe` command-line frontend.

pub mod blockenc;
pub mod circuit;
pub mod cli;
mod error;
pub mod fock;
pub mod oracles;
pub mod qsvt;
pub mod resources;

pub use error::{Error, Result};
