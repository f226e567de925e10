//! Sparsity oracles: validation of the occupancy pattern, the conditional
//! bit flips, and their composition with the phase oracle.

use serde::{Deserialize, Serialize};

use super::arith::eq;
use super::swap::{phase_oracle, singles, with_swap_up};
use crate::circuit::{Builder, Control, Qubit};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OsVariant {
    /// `a†_p a_q`: valid when `j_p = 0` and `j_q = 1`.
    CreateAnnihilate,
    /// `a†_p a†_q`: valid when both are empty.
    CreateCreate,
    /// `a_p a_q`: valid when both are occupied.
    AnnihAnnih,
    /// `n_p`: valid when `j_p = 1`.
    Number,
}

fn read_bit(b: &mut Builder, idx: &[Qubit], words: &[Vec<Qubit>], into: Qubit) {
    with_swap_up(b, idx, words, |b, lead| b.cnot(lead[0], into));
}

fn flip_if_valid(b: &mut Builder, idx: &[Qubit], words: &[Vec<Qubit>], v: Qubit) {
    with_swap_up(b, idx, words, |b, lead| b.mcx(&[(v, false)], lead[0]));
}

/// Validation qubit `v` enters as |1> and is cleared on valid patterns; the
/// system bits are then toggled on the valid branch only. Two-index variants
/// assume `p != q`.
pub fn os(b: &mut Builder, variant: OsVariant, p: &[Qubit], q: &[Qubit], sys: &[Qubit], v: Qubit) {
    let words = singles(sys);
    let a1 = b.scratch();
    read_bit(b, p, &words, a1);
    if variant == OsVariant::Number {
        b.mcx(&[(a1, true)], v);
        read_bit(b, p, &words, a1);
        b.release(a1);
        return;
    }
    let a2 = b.scratch();
    read_bit(b, q, &words, a2);
    let (x, y) = match variant {
        OsVariant::CreateAnnihilate => (false, true),
        OsVariant::CreateCreate => (false, false),
        OsVariant::AnnihAnnih => (true, true),
        OsVariant::Number => unreachable!(),
    };
    b.mcx(&[(a1, x), (a2, y)], v);
    flip_if_valid(b, p, &words, v);
    flip_if_valid(b, q, &words, v);
    read_bit(b, p, &words, a1);
    read_bit(b, q, &words, a2);
    b.mcx(&[(v, false)], a1);
    b.mcx(&[(v, false)], a2);
    b.release(a2);
    b.release(a1);
}

/// `O_C` for a general one-body term `a†_p a_q`. The `p == q` branch takes
/// the number-operator path; otherwise phase and flips follow `a†_p a_q`.
pub fn oc_one_body(b: &mut Builder, p: &[Qubit], q: &[Qubit], sys: &[Qubit], v: Qubit) {
    let words = singles(sys);
    phase_oracle(b, p, q, sys);
    let e = b.scratch();
    eq(b, p, q, e);
    let a1 = b.scratch();
    let a2 = b.scratch();
    read_bit(b, p, &words, a1);
    read_bit(b, q, &words, a2);
    b.mcx(&[(a1, false), (a2, true)], v);
    b.mcx(&[(e, true), (a1, true)], v);
    flip_if_valid(b, p, &words, v);
    flip_if_valid(b, q, &words, v);
    read_bit(b, p, &words, a1);
    read_bit(b, q, &words, a2);
    let clear: [Control; 2] = [(v, false), (e, false)];
    b.mcx(&clear, a1);
    b.mcx(&clear, a2);
    b.release(a2);
    b.release(a1);
    eq(b, p, q, e);
    b.release(e);
}

/// `O_C` for `a†_p a†_q a_r a_s`: annihilate `r, s` against `v2`, then
/// create `p, q` against `v1`, each with its own phase oracle.
#[allow(clippy::too_many_arguments)]
pub fn oc_two_body(
    b: &mut Builder,
    p: &[Qubit],
    q: &[Qubit],
    r: &[Qubit],
    s: &[Qubit],
    sys: &[Qubit],
    v1: Qubit,
    v2: Qubit,
) {
    phase_oracle(b, r, s, sys);
    os(b, OsVariant::AnnihAnnih, r, s, sys, v2);
    phase_oracle(b, p, q, sys);
    os(b, OsVariant::CreateCreate, p, q, sys, v1);
}

/// Validation for `n_p n_q`: clears `v` iff both modes are occupied; no flips, no phase.
pub fn number_pair_check(b: &mut Builder, p: &[Qubit], q: &[Qubit], sys: &[Qubit], v: Qubit) {
    let words = singles(sys);
    let a1 = b.scratch();
    let a2 = b.scratch();
    read_bit(b, p, &words, a1);
    read_bit(b, q, &words, a2);
    b.mcx(&[(a1, true), (a2, true)], v);
    read_bit(b, p, &words, a1);
    read_bit(b, q, &words, a2);
    b.release(a2);
    b.release(a1);
}
