//! Occupation detection, indirect diffusion and related bookkeeping for
//! fixed particle number.

use super::arith::{eq_const, increment, const_controls};
use crate::circuit::{Builder, Control, Qubit};

/// Bits needed to hold values `0..count`.
pub fn width_for(count: usize) -> usize {
    if count <= 1 {
        0
    } else {
        (usize::BITS - (count - 1).leading_zeros()) as usize
    }
}

/// `|i>|a>|j> -> |i>|a ^ add_i(j)>|j>` where `add_i(j)` is the position of
/// the i-th occupied mode. A running count of particles seen so far is
/// compared against `i`; the count ends at `eta` and is restored by constant X.
pub fn occ(b: &mut Builder, i: &[Qubit], addr: &[Qubit], sys: &[Qubit], eta: usize) {
    let w = i.len();
    let sum = b.scratches(w);
    for (k, &jk) in sys.iter().enumerate() {
        let flag = b.scratch();
        b.conjugate(
            |b| {
                for (&x, &y) in i.iter().zip(&sum) {
                    b.cnot(x, y);
                }
            },
            |b, _| {
                let cs: Vec<Control> =
                    sum.iter().map(|&q| (q, false)).chain([(jk, true)]).collect();
                b.mcx(&cs, flag);
                for (bit, &q) in addr.iter().enumerate() {
                    if (k >> bit) & 1 == 1 {
                        b.cnot(flag, q);
                    }
                }
                b.mcx(&cs, flag);
            },
        );
        b.release(flag);
        increment(b, &sum, &[(jk, true)], None);
    }
    for (bit, &q) in sum.iter().enumerate() {
        if (eta >> bit) & 1 == 1 {
            b.x(q);
        }
    }
    b.release_all(&sum);
}

/// `|q>|e_q> -> |q>|0>`: clears the one-hot copy of the address.
pub fn uocc(b: &mut Builder, addr: &[Qubit], onehot: &[Qubit]) {
    for (k, &x) in onehot.iter().enumerate() {
        b.mcx(&const_controls(addr, k as u64), x);
    }
}

/// Hadamards on the ordinal register followed by occupation detection.
pub fn idf(b: &mut Builder, i: &[Qubit], addr: &[Qubit], sys: &[Qubit], eta: usize) {
    for &q in i {
        b.h(q);
    }
    occ(b, i, addr, sys, eta);
}

/// `i ^= rank_j(q)`, the number of occupied modes below `q`.
pub fn rank(b: &mut Builder, q: &[Qubit], sys: &[Qubit], i: &[Qubit]) {
    if i.is_empty() {
        return;
    }
    let (cnt, before) = b.conjugate(
        |b| {
            let cnt = b.scratches(i.len());
            let before = b.scratch();
            b.x(before);
            for (k, &jk) in sys.iter().enumerate() {
                eq_const(b, q, k as u64, before);
                increment(b, &cnt, &[(before, true), (jk, true)], None);
            }
            (cnt, before)
        },
        |b, (cnt, _)| {
            for (&c, &t) in cnt.iter().zip(i) {
                b.cnot(c, t);
            }
        },
    );
    b.release(before);
    b.release_all(&cnt);
}

/// Bitwise `dst ^= src`; a plain copy when `dst` starts clean.
pub fn xor_copy(b: &mut Builder, src: &[Qubit], dst: &[Qubit]) {
    for (&s, &d) in src.iter().zip(dst) {
        b.cnot(s, d);
    }
}
