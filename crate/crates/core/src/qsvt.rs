//! Quantum signal processing on scalars and its lift to block encodings.
//!
//! Phases follow the `W_x` convention, in which the all-zero sequence of
//! degree `d` produces the Chebyshev polynomial `T_d`. Scalar evaluation uses
//! the reflection signal `U(t) = [[t, s], [s, -t]]` with the `(-i)^d`
//! prefactor and shifts the phases accordingly, so both descriptions give
//! the same `p(t)`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use nalgebra::{DMatrix, Matrix2, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::blockenc::{BlockEncoding, VerifyMode};
use crate::circuit::{project_column, Builder, Circuit, Control, Gate, Qubit, Role};
use crate::error::{invalid, Error, Result};
use crate::fock::{build_matrix_full, eta_basis};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSequence {
    pub phis: Vec<f64>,
}

impl PhaseSequence {
    pub fn new(phis: Vec<f64>) -> Result<Self> {
        if phis.is_empty() {
            return invalid("a phase sequence needs at least one angle");
        }
        if let Some(bad) = phis.iter().find(|p| !p.is_finite()) {
            return invalid(format!("phase {bad} is not finite"));
        }
        Ok(PhaseSequence { phis })
    }

    /// The zero sequence of degree `d`, whose polynomial is `T_d`.
    pub fn chebyshev(d: usize) -> Self {
        PhaseSequence { phis: vec![0.0; d + 1] }
    }

    pub fn degree(&self) -> usize {
        self.phis.len() - 1
    }

    /// Plain text, one radian value per line. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut phis = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let v: f64 = line.parse().map_err(|_| Error::Parse { line: k + 1, msg: format!("`{line}` is not a number") })?;
            phis.push(v);
        }
        PhaseSequence::new(phis)
    }

    pub fn to_text(&self) -> String {
        self.phis.iter().map(|p| format!("{p}\n")).collect()
    }

    /// Phases for the reflection signal that reproduce this sequence once
    /// the `(-i)^d` prefactor is applied.
    pub fn reflection_phases(&self) -> Vec<f64> {
        let d = self.degree();
        if d == 0 {
            return self.phis.clone();
        }
        // `W(t) = i e^{-i pi/4 Z} U(t) e^{-i pi/4 Z}`, so each signal step
        // contributes a factor `i`. Together with the `(-i)^d` prefactor
        // that leaves `(-1)^d`, which a half turn on the first phase absorbs.
        let parity = if d % 2 == 1 { PI } else { 0.0 };
        self.phis
            .iter()
            .enumerate()
            .map(|(j, &p)| match j {
                0 => p - FRAC_PI_4 + parity,
                j if j == d => p - FRAC_PI_4,
                _ => p - FRAC_PI_2,
            })
            .collect()
    }
}

fn ez(phi: f64) -> Matrix2<Complex64> {
    Matrix2::new(Complex64::from_polar(1.0, phi), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::from_polar(1.0, -phi))
}

/// `(-i)^d e^{i phi_0 Z} prod_j [U(t) e^{i phi_j Z}]` with the reflection
/// signal. The top-left entry is `p(t)`.
pub fn qsp_scalar(seq: &PhaseSequence, t: f64) -> Result<Matrix2<Complex64>> {
    if !(-1.0..=1.0).contains(&t) {
        return invalid(format!("signal {t} outside [-1, 1]"));
    }
    let s = (1.0 - t * t).max(0.0).sqrt();
    let r = |x: f64| Complex64::new(x, 0.0);
    let u = Matrix2::new(r(t), r(s), r(s), r(-t));
    let phis = seq.reflection_phases();
    let mut m = ez(phis[0]);
    for &phi in &phis[1..] {
        m = m * u * ez(phi);
    }
    let d = seq.degree() as i32;
    Ok(m * Complex64::new(0.0, -1.0).powi(d))
}

/// `p(t)`, the top-left entry of [`qsp_scalar`].
pub fn qsp_poly(seq: &PhaseSequence, t: f64) -> Result<Complex64> {
    Ok(qsp_scalar(seq, t)?[(0, 0)])
}

/// A block encoding of `Re p(H / alpha)`, where the real part takes the
/// complex conjugate of the coefficients of `p`.
#[derive(Clone, Debug)]
pub struct TransformedEncoding {
    pub circuit: Circuit,
    pub anc_mask: Vec<Qubit>,
    pub system_qubits: Vec<Qubit>,
    pub phases: PhaseSequence,
    /// Subnormalization of the input encoding.
    pub source_alpha: f64,
}

fn check_hermitian(be: &BlockEncoding) -> Result<()> {
    let m = build_matrix_full(&be.reference)?;
    let dev = m.entries.iter().fold(0.0f64, |acc, (&(r, c), &v)| acc.max((m.get(c, r) - v).abs()));
    if dev > 1e-12 {
        return Err(Error::NotHermitian(dev));
    }
    Ok(())
}

/// Interleaves the encoding and its inverse with projector-controlled
/// phase rotations.
///
/// Each rotation flips one extra qubit when every ancilla of the input is
/// zero, applies `Rz` to it and flips it back. That qubit starts and ends in
/// a Hadamard basis so that the two branches see opposite phases, which
/// averages `p` with its conjugate. A final `Rz(d pi)` on the same qubit
/// removes the `i^d` left over from the reflection form.
pub fn qsvt_apply(be: &BlockEncoding, seq: &PhaseSequence) -> Result<TransformedEncoding> {
    check_hermitian(be)?;
    let src = &be.circuit;
    let mut b = Builder::new();
    let sys = b.register("system", be.system_qubits.len(), Role::System);
    let mut map = vec![usize::MAX; src.qubit_count];
    for (i, &q) in be.system_qubits.iter().enumerate() {
        map[q] = sys[i];
    }
    for reg in &src.registers {
        if reg.qubits.iter().all(|q| map[*q] != usize::MAX) {
            continue;
        }
        let fresh = b.register(&reg.name, reg.qubits.len(), reg.role);
        for (&old, new) in reg.qubits.iter().zip(fresh) {
            map[old] = new;
        }
    }
    if map.contains(&usize::MAX) {
        return invalid("block encoding has qubits outside any register");
    }
    let anc: Vec<Qubit> = be.anc_mask.iter().map(|&q| map[q]).collect();
    let zero_test: Vec<Control> = anc.iter().map(|&q| (q, false)).collect();
    let sig = b.qubit("qsvt", Role::Validation);

    let phis = seq.reflection_phases();
    let d = seq.degree();
    let adjoint = src.adjoint();
    let rotate = |b: &mut Builder, phi: f64| {
        if phi == 0.0 {
            // e^{0} on both sides of the projector: the flips would cancel
            return;
        }
        b.mcx(&zero_test, sig);
        b.push(Gate::Rz(sig, 2.0 * phi));
        b.mcx(&zero_test, sig);
    };
    b.h(sig);
    rotate(&mut b, phis[d]);
    for k in 1..=d {
        let step = if k % 2 == 1 { src } else { &adjoint };
        b.append_mapped(step, &map);
        rotate(&mut b, phis[d - k]);
    }
    if d % 4 != 0 {
        b.push(Gate::Rz(sig, d as f64 * PI));
    }
    b.h(sig);

    let circuit = b.finish();
    let anc_mask = (0..circuit.qubit_count).filter(|q| !sys.contains(q)).collect();
    Ok(TransformedEncoding { circuit, anc_mask, system_qubits: sys, phases: seq.clone(), source_alpha: be.alpha })
}

/// `Re p(H / alpha)` on the columns selected by `mode`, by
/// eigendecomposition of the reference matrix.
pub fn reference_polynomial(be: &BlockEncoding, seq: &PhaseSequence, mode: VerifyMode) -> Result<(Vec<u64>, DMatrix<f64>)> {
    let full = build_matrix_full(&be.reference)?;
    let basis: Vec<u64> = match mode {
        VerifyMode::FullSpace => (0..full.dim as u64).collect(),
        VerifyMode::EtaSector(eta) => eta_basis(be.system_qubits.len(), eta),
    };
    let k = basis.len();
    let a = DMatrix::from_fn(k, k, |r, c| full.get(basis[r] as usize, basis[c] as usize) / be.alpha);
    let eig = SymmetricEigen::new(a);
    let mut vals = Vec::with_capacity(k);
    for &lam in eig.eigenvalues.iter() {
        vals.push(qsp_poly(seq, lam.clamp(-1.0, 1.0))?.re);
    }
    let v = &eig.eigenvectors;
    let p = v * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vals)) * v.transpose();
    Ok((basis, p))
}

/// Projected block of a transformed encoding on a basis subset, as a dense
/// matrix indexed like `basis`.
pub fn transformed_block(te: &TransformedEncoding, basis: &[u64]) -> Result<DMatrix<Complex64>> {
    use rayon::prelude::*;
    let cols: Vec<Vec<(u64, Complex64)>> = basis
        .par_iter()
        .map(|&c| project_column(&te.circuit, &te.system_qubits, &te.anc_mask, c))
        .collect::<Result<_>>()?;
    let mut m = DMatrix::zeros(basis.len(), basis.len());
    for (ci, col) in cols.iter().enumerate() {
        for &(row, amp) in col {
            if let Ok(ri) = basis.binary_search(&row) {
                m[(ri, ci)] = amp;
            }
        }
    }
    Ok(m)
}

/// Largest entry deviation between the transformed block and the
/// reference polynomial on `mode`.
pub fn qsvt_deviation(be: &BlockEncoding, te: &TransformedEncoding, mode: VerifyMode) -> Result<f64> {
    let (basis, want) = reference_polynomial(be, &te.phases, mode)?;
    let got = transformed_block(te, &basis)?;
    let mut dev = 0.0f64;
    for r in 0..basis.len() {
        for c in 0..basis.len() {
            dev = dev.max((got[(r, c)] - Complex64::new(want[(r, c)], 0.0)).norm());
        }
    }
    Ok(dev)
}
