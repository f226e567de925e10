use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::sim::{apply, bit, SparseState, Word};
use super::{Circuit, Qubit};
use crate::error::{Error, Result};

/// Largest qubit count (and projected system size) for dense extraction.
pub const DENSE_QUBIT_CAP: usize = 14;

fn spread(k: u64, qs: &[Qubit]) -> Word {
    let mut w = [0u64; 4];
    for (i, &q) in qs.iter().enumerate() {
        if (k >> i) & 1 == 1 {
            w[q >> 6] |= 1 << (q & 63);
        }
    }
    w
}

fn gather(w: &Word, qs: &[Qubit]) -> u64 {
    qs.iter().enumerate().fold(0, |acc, (i, &q)| acc | (bit(w, q) as u64) << i)
}

pub fn unitary(c: &Circuit) -> Result<DMatrix<Complex64>> {
    if c.qubit_count > DENSE_QUBIT_CAP {
        return Err(Error::SizeCap { what: "dense qubit count", got: c.qubit_count, cap: DENSE_QUBIT_CAP });
    }
    projected_block(c, &[])
}

/// Simulates one input column and keeps the amplitudes whose ancilla bits are all zero.
/// Returns `(row index over system qubits, amplitude)` pairs.
pub fn project_column(
    c: &Circuit,
    system: &[Qubit],
    anc: &[Qubit],
    col: u64,
) -> Result<Vec<(u64, Complex64)>> {
    let out = apply(c, &SparseState::basis(c.qubit_count, spread(col, system)))?;
    let mut v: Vec<(u64, Complex64)> = out
        .amps
        .iter()
        .filter(|(w, _)| anc.iter().all(|&q| !bit(w, q)))
        .map(|(w, a)| (gather(w, system), *a))
        .collect();
    v.sort_by_key(|e| e.0);
    Ok(v)
}

/// `(<0_anc| ⊗ I) U (|0_anc> ⊗ I)` with system qubits in ascending order.
pub fn projected_block(c: &Circuit, anc_mask: &[Qubit]) -> Result<DMatrix<Complex64>> {
    for &q in anc_mask {
        if q >= c.qubit_count {
            return Err(Error::QubitRange { qubit: q, count: c.qubit_count });
        }
    }
    let system: Vec<Qubit> = (0..c.qubit_count).filter(|q| !anc_mask.contains(q)).collect();
    if system.len() > DENSE_QUBIT_CAP {
        return Err(Error::SizeCap { what: "projected system size", got: system.len(), cap: DENSE_QUBIT_CAP });
    }
    c.validate()?;
    let dim = 1usize << system.len();
    let cols: Vec<Vec<(u64, Complex64)>> = (0..dim as u64)
        .into_par_iter()
        .map(|k| project_column(c, &system, anc_mask, k))
        .collect::<Result<_>>()?;
    let mut m = DMatrix::zeros(dim, dim);
    for (k, col) in cols.into_iter().enumerate() {
        for (r, a) in col {
            m[(r as usize, k)] = a;
        }
    }
    Ok(m)
}

/// Largest deviation of `U^† U` from the identity. Circuits within the dense
/// cap are checked on every basis column. Larger ones are checked on
/// `samples` seeded random basis columns, which is a necessary condition only.
pub fn unitarity_defect(c: &Circuit, samples: usize, seed: u64) -> Result<f64> {
    use rand::{Rng, SeedableRng};

    let inputs: Vec<Word> = if c.qubit_count <= DENSE_QUBIT_CAP {
        (0..1u64 << c.qubit_count).map(|k| [k, 0, 0, 0]).collect()
    } else {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..samples)
            .map(|_| {
                let mut w = [0u64; 4];
                for q in 0..c.qubit_count {
                    if rng.gen::<bool>() {
                        w[q >> 6] |= 1 << (q & 63);
                    }
                }
                w
            })
            .collect()
    };
    let round_trip = Circuit::compose(c, &c.adjoint());
    let devs: Vec<f64> = inputs
        .par_iter()
        .map(|&w| -> Result<f64> {
            let s0 = SparseState::basis(c.qubit_count, w);
            let s = apply(&round_trip, &s0)?;
            Ok(s.max_diff(&s0))
        })
        .collect::<Result<_>>()?;
    Ok(devs.into_iter().fold(0.0, f64::max))
}
