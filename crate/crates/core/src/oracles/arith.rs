//! Reversible comparison and ripple arithmetic. Registers are little-endian.

use crate::circuit::{Builder, Control, Qubit};

/// `t ^= MAJ(x, y, z)` for clean `t`, spending one AND.
fn maj(b: &mut Builder, x: Qubit, y: Qubit, z: Qubit, t: Qubit) {
    b.cnot(z, x);
    b.cnot(z, y);
    b.and(x, y, t);
    b.cnot(z, t);
    b.cnot(z, y);
    b.cnot(z, x);
}

fn unmaj(b: &mut Builder, x: Qubit, y: Qubit, z: Qubit, t: Qubit) {
    b.emit_adjoint(|b| maj(b, x, y, z, t));
}

/// `res ^= [a < c]` by a borrow ripple from the least-significant bit.
pub fn comp(b: &mut Builder, a: &[Qubit], c: &[Qubit], res: Qubit) {
    assert_eq!(a.len(), c.len(), "comparator widths differ");
    let w = a.len();
    if w == 0 {
        return;
    }
    let borrows = b.conjugate(
        |b| {
            let cs = b.scratches(w);
            for k in 0..w {
                b.x(a[k]);
                if k == 0 {
                    b.and(a[0], c[0], cs[0]);
                } else {
                    maj(b, a[k], c[k], cs[k - 1], cs[k]);
                }
                b.x(a[k]);
            }
            cs
        },
        |b, cs| b.cnot(cs[w - 1], res),
    );
    b.release_all(&borrows);
}

/// `t ^= [a == c]`.
pub fn eq(b: &mut Builder, a: &[Qubit], c: &[Qubit], t: Qubit) {
    assert_eq!(a.len(), c.len(), "equality widths differ");
    b.conjugate(
        |b| {
            for (&x, &y) in a.iter().zip(c) {
                b.cnot(x, y);
            }
        },
        |b, _| {
            let zero: Vec<Control> = c.iter().map(|&q| (q, false)).collect();
            b.mcx(&zero, t);
        },
    );
}

/// Controls that fire when `reg` holds the constant `k`.
pub fn const_controls(reg: &[Qubit], k: u64) -> Vec<Control> {
    reg.iter().enumerate().map(|(i, &q)| (q, (k >> i) & 1 == 1)).collect()
}

/// `t ^= [reg == k]`; a constant that does not fit never matches.
pub fn eq_const(b: &mut Builder, reg: &[Qubit], k: u64, t: Qubit) {
    if reg.len() < 64 && k >> reg.len() != 0 {
        return;
    }
    b.mcx(&const_controls(reg, k), t);
}

/// `t ^= [reg < k]`.
pub fn lt_const(b: &mut Builder, reg: &[Qubit], k: u64, t: Qubit) {
    if reg.len() < 64 && k >> reg.len() != 0 {
        b.x(t);
        return;
    }
    let konst = b.conjugate(
        |b| {
            let cs = b.scratches(reg.len());
            for (i, &q) in cs.iter().enumerate() {
                if (k >> i) & 1 == 1 {
                    b.x(q);
                }
            }
            cs
        },
        |b, cs| comp(b, reg, cs, t),
    );
    b.release_all(&konst);
}

/// `t += a` modulo `2^|t|`, or `t -= a` when `sign` is |1>. A shorter `a` is
/// zero-extended with clean scratch.
pub fn add(b: &mut Builder, a: &[Qubit], t: &[Qubit], sign: Option<Qubit>) {
    assert!(a.len() <= t.len(), "addend wider than target");
    let w = t.len();
    if w == 0 {
        return;
    }
    let pad = b.scratches(w - a.len());
    let a: Vec<Qubit> = a.iter().copied().chain(pad.iter().copied()).collect();
    if let Some(s) = sign {
        for &q in t {
            b.cnot(s, q);
        }
    }
    let cs = b.scratches(w - 1);
    // cs[k - 1] holds the carry into bit k
    for k in 0..w - 1 {
        if k == 0 {
            b.and(a[0], t[0], cs[0]);
        } else {
            maj(b, a[k], t[k], cs[k - 1], cs[k]);
        }
    }
    for k in (0..w).rev() {
        if k + 1 < w {
            if k == 0 {
                b.unand(a[0], t[0], cs[0]);
            } else {
                unmaj(b, a[k], t[k], cs[k - 1], cs[k]);
            }
        }
        b.cnot(a[k], t[k]);
        if k > 0 {
            b.cnot(cs[k - 1], t[k]);
        }
    }
    b.release_all(&cs);
    if let Some(s) = sign {
        for &q in t {
            b.cnot(s, q);
        }
    }
    b.release_all(&pad);
}

/// `t += 1` (or `-= 1` when `sign` is |1>) whenever `controls` fire.
pub fn increment(b: &mut Builder, t: &[Qubit], controls: &[Control], sign: Option<Qubit>) {
    if let Some(s) = sign {
        for &q in t {
            b.cnot(s, q);
        }
    }
    for i in (0..t.len()).rev() {
        let cs: Vec<Control> =
            controls.iter().copied().chain(t[..i].iter().map(|&q| (q, true))).collect();
        b.mcx(&cs, t[i]);
    }
    if let Some(s) = sign {
        for &q in t {
            b.cnot(s, q);
        }
    }
}
