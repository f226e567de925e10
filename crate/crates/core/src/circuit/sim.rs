use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rustc_hash::FxHashMap;

use super::{Circuit, Gate, Qubit};
use crate::error::{Error, Result};

/// Computational-basis word; qubit `q` lives at bit `q % 64` of limb `q / 64`.
pub type Word = [u64; 4];

pub const MAX_QUBITS: usize = 256;

#[inline]
pub fn bit(w: &Word, q: Qubit) -> bool {
    (w[q >> 6] >> (q & 63)) & 1 == 1
}

#[inline]
fn toggle(w: &mut Word, q: Qubit) {
    w[q >> 6] ^= 1 << (q & 63);
}

#[inline]
fn set(w: &mut Word, q: Qubit, v: bool) {
    if bit(w, q) != v {
        toggle(w, q);
    }
}

/// Reads a little-endian integer from the listed qubits.
pub fn read_reg(w: &Word, qs: &[Qubit]) -> u64 {
    qs.iter().enumerate().fold(0, |acc, (i, &q)| acc | (bit(w, q) as u64) << i)
}

pub fn write_reg(w: &mut Word, qs: &[Qubit], value: u64) {
    for (i, &q) in qs.iter().enumerate() {
        set(w, q, (value >> i) & 1 == 1);
    }
}

/// Builds a word from `(register, value)` pairs.
pub fn word_with(parts: &[(&[Qubit], u64)]) -> Word {
    let mut w = [0u64; 4];
    for (qs, v) in parts {
        write_reg(&mut w, qs, *v);
    }
    w
}

#[inline]
fn controls_fire(w: &Word, controls: &[(Qubit, bool)]) -> bool {
    controls.iter().all(|&(q, pol)| bit(w, q) == pol)
}

/// Sparse state vector: basis word to amplitude. Exact zeros are dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseState {
    pub qubits: usize,
    pub amps: FxHashMap<Word, Complex64>,
}

impl SparseState {
    pub fn basis(qubits: usize, w: Word) -> Self {
        let mut amps = FxHashMap::default();
        amps.insert(w, Complex64::new(1.0, 0.0));
        Self { qubits, amps }
    }

    pub fn zero(qubits: usize) -> Self {
        Self::basis(qubits, [0; 4])
    }

    pub fn get(&self, w: &Word) -> Complex64 {
        self.amps.get(w).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &SparseState) -> Complex64 {
        self.amps.iter().map(|(w, a)| a.conj() * other.get(w)).sum()
    }

    /// Largest absolute amplitude difference over the union of supports.
    pub fn max_diff(&self, other: &SparseState) -> f64 {
        let a = self.amps.iter().map(|(w, x)| (x - other.get(w)).norm());
        let b = other.amps.iter().map(|(w, x)| (x - self.get(w)).norm());
        a.chain(b).fold(0.0, f64::max)
    }

    pub fn apply_gate(&mut self, g: &Gate) {
        use Gate::*;
        let c = |re: f64, im: f64| Complex64::new(re, im);
        match g {
            H(q) => {
                let h = FRAC_1_SQRT_2;
                self.mix(*q, [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]]);
            }
            Y(q) => self.mix(*q, [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]]),
            Ry(q, th) => {
                let (s, co) = (th / 2.0).sin_cos();
                self.mix(*q, [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]);
            }
            Z(q) => self.phase(|w| bit(w, *q), c(-1.0, 0.0)),
            S(q) => self.phase(|w| bit(w, *q), c(0.0, 1.0)),
            Sdg(q) => self.phase(|w| bit(w, *q), c(0.0, -1.0)),
            T(q) => self.phase(|w| bit(w, *q), Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)),
            Tdg(q) => self.phase(|w| bit(w, *q), Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4)),
            Rz(q, th) => {
                let lo = Complex64::from_polar(1.0, -th / 2.0);
                let hi = Complex64::from_polar(1.0, th / 2.0);
                for (w, a) in self.amps.iter_mut() {
                    *a *= if bit(w, *q) { hi } else { lo };
                }
            }
            Cz(a, b) => self.phase(|w| bit(w, *a) && bit(w, *b), c(-1.0, 0.0)),
            X(q) => self.permute(|w| toggle(w, *q)),
            Cnot { c, t } => self.permute(|w| {
                if bit(w, *c) {
                    toggle(w, *t)
                }
            }),
            Swap(a, b) => self.permute(|w| swap_bits(w, *a, *b)),
            Toffoli { c0, c1, t, .. } => self.permute(|w| {
                if bit(w, *c0) && bit(w, *c1) {
                    toggle(w, *t)
                }
            }),
            Fredkin { c, a, b } => self.permute(|w| {
                if bit(w, *c) {
                    swap_bits(w, *a, *b)
                }
            }),
            Mcx { controls, t } => self.permute(|w| {
                if controls_fire(w, controls) {
                    toggle(w, *t)
                }
            }),
            Mcswap { controls, a, b } => self.permute(|w| {
                if controls_fire(w, controls) {
                    swap_bits(w, *a, *b)
                }
            }),
        }
    }

    fn phase(&mut self, hit: impl Fn(&Word) -> bool, z: Complex64) {
        for (w, a) in self.amps.iter_mut() {
            if hit(w) {
                *a *= z;
            }
        }
    }

    fn permute(&mut self, f: impl Fn(&mut Word)) {
        let old = std::mem::take(&mut self.amps);
        let mut new = FxHashMap::with_capacity_and_hasher(old.len(), Default::default());
        for (mut w, a) in old {
            f(&mut w);
            new.insert(w, a);
        }
        self.amps = new;
    }

    fn mix(&mut self, q: Qubit, m: [[Complex64; 2]; 2]) {
        let old = std::mem::take(&mut self.amps);
        let mut new: FxHashMap<Word, Complex64> =
            FxHashMap::with_capacity_and_hasher(old.len() * 2, Default::default());
        for (w, a) in old {
            let b = bit(&w, q) as usize;
            let mut w0 = w;
            set(&mut w0, q, false);
            let mut w1 = w;
            set(&mut w1, q, true);
            if m[0][b] != Complex64::default() {
                *new.entry(w0).or_default() += m[0][b] * a;
            }
            if m[1][b] != Complex64::default() {
                *new.entry(w1).or_default() += m[1][b] * a;
            }
        }
        new.retain(|_, a| *a != Complex64::default());
        self.amps = new;
    }
}

#[inline]
fn swap_bits(w: &mut Word, a: Qubit, b: Qubit) {
    if bit(w, a) != bit(w, b) {
        toggle(w, a);
        toggle(w, b);
    }
}

pub fn apply(c: &Circuit, s: &SparseState) -> Result<SparseState> {
    if s.qubits != c.qubit_count {
        return Err(Error::Invalid(format!(
            "state has {} qubits, circuit has {}",
            s.qubits, c.qubit_count
        )));
    }
    c.validate()?;
    let mut out = s.clone();
    for g in &c.gates {
        out.apply_gate(g);
    }
    Ok(out)
}
