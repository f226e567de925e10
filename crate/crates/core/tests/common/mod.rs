#![allow(dead_code)]

use febe::circuit::{apply, bit, read_reg, word_with, Circuit, Qubit, SparseState, Word};
use num_complex::Complex64;

pub fn run(c: &Circuit, parts: &[(&[Qubit], u64)]) -> SparseState {
    apply(c, &SparseState::basis(c.qubit_count, word_with(parts))).unwrap()
}

/// Runs a permutation-like circuit on a basis input and returns the single
/// output word with its amplitude.
pub fn run_basis(c: &Circuit, parts: &[(&[Qubit], u64)]) -> (Word, Complex64) {
    let s = run(c, parts);
    let big: Vec<_> = s.amps.iter().filter(|(_, a)| a.norm() > 1e-9).collect();
    assert_eq!(big.len(), 1, "expected a basis output, got {} terms", big.len());
    (*big[0].0, *big[0].1)
}

pub fn reg(w: &Word, qs: &[Qubit]) -> u64 {
    read_reg(w, qs)
}

pub fn clean(w: &Word, qs: &[Qubit]) -> bool {
    qs.iter().all(|&q| !bit(w, q))
}

/// Checks `c` then `c^†` returns every listed input, which on a finite
/// circuit is equivalent to unitarity on those columns.
pub fn assert_inverts(c: &Circuit, inputs: &[Word]) {
    let both = Circuit::compose(c, &c.adjoint());
    for &w in inputs {
        let s0 = SparseState::basis(c.qubit_count, w);
        let s = apply(&both, &s0).unwrap();
        assert!(s.max_diff(&s0) < 1e-10, "U^†U != I on {w:?}");
        assert!((apply(c, &s0).unwrap().norm_sqr() - 1.0).abs() < 1e-12);
    }
}

pub fn popcount_states(n: usize, eta: usize) -> Vec<u64> {
    (0u64..1 << n).filter(|b| b.count_ones() as usize == eta).collect()
}
