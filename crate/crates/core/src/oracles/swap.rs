//! SWAP-UP routing, the prefix-parity ladder and the fermionic phase oracle.

use super::arith::{comp, eq};
use crate::circuit::{Builder, Gate, Qubit};

/// Views each system qubit as a one-bit word.
pub fn singles(sys: &[Qubit]) -> Vec<Vec<Qubit>> {
    sys.iter().map(|&q| vec![q]).collect()
}

/// Controlled-SWAP tree bringing word `p` to position 0. Level `k` pairs
/// word `i` with word `i + 2^k` for every `i` divisible by `2^(k+1)`.
pub fn swap_up(b: &mut Builder, p: &[Qubit], words: &[Vec<Qubit>]) {
    assert_eq!(words.len(), 1 << p.len(), "SWAP-UP needs 2^|p| words");
    for (k, &pk) in p.iter().enumerate() {
        let step = 1 << k;
        for i in (0..words.len()).step_by(2 * step) {
            for (&x, &y) in words[i].iter().zip(&words[i + step]) {
                b.fredkin(pk, x, y);
            }
        }
    }
}

/// Runs `inner` with word `p` routed to the leading slot, then routes it back.
pub fn with_swap_up(
    b: &mut Builder,
    p: &[Qubit],
    words: &[Vec<Qubit>],
    inner: impl FnOnce(&mut Builder, &[Qubit]),
) {
    let lead = words[0].clone();
    b.conjugate(|b| swap_up(b, p, words), |b, _| inner(b, &lead));
}

/// Bit `k` becomes the parity of bits `0..=k`.
pub fn ladder(b: &mut Builder, sys: &[Qubit]) {
    for k in 1..sys.len() {
        b.cnot(sys[k - 1], sys[k]);
    }
}

pub fn ladder_adjoint(b: &mut Builder, sys: &[Qubit]) {
    b.emit_adjoint(|b| ladder(b, sys));
}

/// `|p>|q>|j> -> (-1)^(parity of j strictly between p and q) |p>|q>|j>`,
/// including `p == q` (no phase).
///
/// Z at prefix positions p and q yields the parity of `j` over
/// `(min, max]`; the top bit is then removed with a Z on `j_max`, reached
/// by swapping the larger index into `p` under the comparator.
pub fn phase_oracle(b: &mut Builder, p: &[Qubit], q: &[Qubit], sys: &[Qubit]) {
    let words = singles(sys);
    b.conjugate(
        |b| ladder(b, sys),
        |b, _| {
            with_swap_up(b, p, &words, |b, lead| b.z(lead[0]));
            with_swap_up(b, q, &words, |b, lead| b.z(lead[0]));
        },
    );
    let flags = b.conjugate(
        |b| {
            let c = b.scratch();
            let e = b.scratch();
            comp(b, p, q, c);
            eq(b, p, q, e);
            for (&x, &y) in p.iter().zip(q) {
                b.fredkin(c, x, y);
            }
            (c, e)
        },
        |b, &(_, e)| {
            with_swap_up(b, p, &words, |b, lead| {
                b.x(e);
                b.push(Gate::Cz(e, lead[0]));
                b.x(e);
            });
        },
    );
    b.release(flags.1);
    b.release(flags.0);
}

/// `SW(p) X_lead SW(p)^†`: toggles bit `p` of the system word.
pub fn swx(b: &mut Builder, p: &[Qubit], sys: &[Qubit]) {
    with_swap_up(b, p, &singles(sys), |b, lead| b.x(lead[0]));
}
