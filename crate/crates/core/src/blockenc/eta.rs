//! Fixed-particle-number encoders. The column index is diffused only over
//! occupied modes by counting particles, so the subnormalization scales
//! with `eta` instead of `n`.

use std::collections::BTreeMap;

use super::full::{pair_reference, pair_values};
use super::structured::{difference, ti_values};
use super::tables::{Ctx, QTable};
use super::{diffuse, log2_n, meta_for, spec_with, AmpRegs, BlockEncoding, Class};
use crate::circuit::{Builder, Qubit, Role};
use crate::error::Result;
use crate::fock::HamiltonianSpec;
use crate::oracles::arith::lt_const;
use crate::oracles::occ::{occ, rank, width_for};
use crate::oracles::sparsity::oc_one_body;

/// Ordinal register over `0..eta`, padded to a power of two. Branches with
/// an ordinal past `eta` are marked on `pad` and projected away.
pub(super) struct Ordinal {
    pub i: Vec<Qubit>,
    pub eta: usize,
    name: String,
}

impl Ordinal {
    pub fn new(b: &mut Builder, name: &str, eta: usize) -> Self {
        Ordinal { i: b.register(name, width_for(eta), Role::Index), eta, name: name.to_string() }
    }

    pub fn padded(&self) -> usize {
        1 << self.i.len()
    }

    /// Uniform superposition over `0..padded`, with the padding branches flagged.
    pub fn diffuse(&self, b: &mut Builder) {
        diffuse(b, &self.i);
        if self.eta < self.padded() {
            let pad = b.qubit(&format!("{}_padding", self.name), Role::Validation);
            lt_const(b, &self.i, self.eta as u64, pad);
            b.x(pad);
        }
    }

    /// `|i>|0>|j> -> |0>|add_i(j)>|j>`: the address of the i-th particle,
    /// with the ordinal cleared again by ranking that address.
    pub fn select_particle(&self, b: &mut Builder, addr: &[Qubit], sys: &[Qubit]) {
        occ(b, &self.i, addr, sys, self.eta);
        rank(b, addr, sys, &self.i);
    }

    /// Inverse pattern on the output side: rank `addr` in `sys`, clear
    /// `addr` by occupation detection, and undo the diffusion.
    pub fn release_particle(&self, b: &mut Builder, addr: &[Qubit], sys: &[Qubit]) {
        rank(b, addr, sys, &self.i);
        occ(b, &self.i, addr, sys, self.eta);
        diffuse(b, &self.i);
    }
}

pub(super) enum Keying<'a> {
    /// Lookup on `(p, q)` from the one-body coefficients.
    Pair,
    /// Lookup on `p - q` from a translation-invariant hopping map.
    Difference(&'a BTreeMap<i64, f64>),
}

/// One-body terms on the `eta` sector with `alpha = n * eta_pad`.
///
/// The annihilated mode `q` is drawn from the occupied modes and the created
/// mode `p` from all modes. After the sparsity oracle, `p` is occupied in the
/// output state, so the output side releases `p` through the ordinal and
/// undoes the diffusion on the register that held `q`.
pub(super) fn one_body(h: &HamiltonianSpec, eta: usize, keying: Keying, ctx: &mut Ctx) -> Result<BlockEncoding> {
    let n = h.n;
    let k = log2_n(n)?;
    let (qt, reference, class) = match keying {
        Keying::Pair => {
            let dense = h.one_body_dense();
            let mut values = vec![0.0; n * n];
            let mut uses = vec![0; n * n];
            for (&(p, q), &v) in &dense {
                values[p * n + q] = v;
                uses[p * n + q] = 1;
            }
            (ctx.table(&values, &uses)?, spec_with(n, dense, BTreeMap::new()), Class::EtaOneBody)
        }
        Keying::Difference(t) => {
            let (values, uses, reference) = ti_values(n, t);
            (ctx.table(&values, &uses)?, reference, Class::TiEta)
        }
    };
    let diff = class == Class::TiEta;

    let mut b = Builder::new();
    let sys = b.register("system", n, Role::System);
    let p = b.register("p", k, Role::Index);
    let q = b.register("q", k, Role::Index);
    let ord = Ordinal::new(&mut b, "i", eta);
    let v = b.qubit("validation", Role::Validation);
    let amp = AmpRegs::new(&mut b, ctx.opts.m_b);
    b.x(v);
    diffuse(&mut b, &p);
    ord.diffuse(&mut b);
    ord.select_particle(&mut b, &q, &sys);
    sample_pair(&mut b, &amp, &qt, &p, &q, diff);
    oc_one_body(&mut b, &p, &q, &sys, v);
    ord.release_particle(&mut b, &p, &sys);
    diffuse(&mut b, &q);

    let alpha_class = (n * ord.padded()) as f64;
    let meta = meta_for(class, n, Some(eta), None, ctx, &qt, alpha_class);
    Ok(BlockEncoding::assemble(b, sys, reference, meta, alpha_class * qt.scale, qt.eps))
}

/// Reads the coefficient of `a†_p a_q` either at address `p * n + q` or at
/// the two's-complement difference `p - q`.
pub(super) fn sample_pair(b: &mut Builder, amp: &AmpRegs, qt: &QTable, p: &[Qubit], q: &[Qubit], diff: bool) {
    if diff {
        let d = b.conjugate(|b| difference(b, p, q), |b, (d, _)| amp.sample(b, &qt.table, d));
        b.release(d.1);
        b.release_all(&d.0);
    } else {
        amp.sample(b, &qt.table, &[q, p].concat());
    }
}

/// `sum U_p n_p` on the sector with `alpha = eta_pad`: only the occupied
/// modes are diffused, so no validation is needed.
pub(super) fn number(n: usize, eta: usize, diag: &BTreeMap<usize, f64>, ctx: &mut Ctx) -> Result<BlockEncoding> {
    let k = log2_n(n)?;
    let mut values = vec![0.0; n];
    let mut uses = vec![0; n];
    for (&p, &u) in diag {
        values[p] = u;
        uses[p] = 1;
    }
    let qt = ctx.table(&values, &uses)?;

    let mut b = Builder::new();
    let sys = b.register("system", n, Role::System);
    let q = b.register("q", k, Role::Index);
    let ord = Ordinal::new(&mut b, "i", eta);
    let amp = AmpRegs::new(&mut b, ctx.opts.m_b);
    ord.diffuse(&mut b);
    occ(&mut b, &ord.i, &q, &sys, eta);
    amp.sample(&mut b, &qt.table, &q);
    occ(&mut b, &ord.i, &q, &sys, eta);
    diffuse(&mut b, &ord.i);

    let alpha_class = ord.padded() as f64;
    let meta = meta_for(Class::EtaNumber, n, Some(eta), None, ctx, &qt, alpha_class);
    let reference = spec_with(n, diag.iter().map(|(&p, &u)| ((p, p), u)).collect(), BTreeMap::new());
    Ok(BlockEncoding::assemble(b, sys, reference, meta, alpha_class * qt.scale, qt.eps))
}

/// `sum V_pq n_p n_q` on the sector with `alpha = eta_pad^2`: two
/// independent particle selections; the table is zero unless `p < q`.
pub(super) fn factorized(n: usize, eta: usize, pairs: &BTreeMap<(usize, usize), f64>, ctx: &mut Ctx) -> Result<BlockEncoding> {
    let k = log2_n(n)?;
    let (values, uses) = pair_values(n, pairs);
    let qt = ctx.table(&values, &uses)?;

    let mut b = Builder::new();
    let sys = b.register("system", n, Role::System);
    let p = b.register("p", k, Role::Index);
    let q = b.register("q", k, Role::Index);
    let o1 = Ordinal::new(&mut b, "i1", eta);
    let o2 = Ordinal::new(&mut b, "i2", eta);
    let amp = AmpRegs::new(&mut b, ctx.opts.m_b);
    o1.diffuse(&mut b);
    o2.diffuse(&mut b);
    occ(&mut b, &o1.i, &p, &sys, eta);
    occ(&mut b, &o2.i, &q, &sys, eta);
    amp.sample(&mut b, &qt.table, &[&q[..], &p[..]].concat());
    occ(&mut b, &o2.i, &q, &sys, eta);
    occ(&mut b, &o1.i, &p, &sys, eta);
    diffuse(&mut b, &o2.i);
    diffuse(&mut b, &o1.i);

    let alpha_class = (o1.padded() * o2.padded()) as f64;
    let meta = meta_for(Class::EtaFactorized, n, Some(eta), None, ctx, &qt, alpha_class);
    Ok(BlockEncoding::assemble(b, sys, pair_reference(n, pairs), meta, alpha_class * qt.scale, qt.eps))
}
