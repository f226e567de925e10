//! Full-space encoders: Hadamard diffusion over every index combination.

use std::collections::BTreeMap;

use super::tables::Ctx;
use super::{diffuse, log2_n, meta_for, spec_with, AmpRegs, BlockEncoding, Class};
use crate::circuit::{Builder, Qubit, Role};
use crate::error::Result;
use crate::fock::HamiltonianSpec;
use crate::oracles::sparsity::{number_pair_check, oc_one_body, os, OsVariant};

fn concat(parts: &[&[Qubit]]) -> Vec<Qubit> {
    parts.concat()
}

/// `sum h_pq a†_p a_q` with `alpha = n^2`. The lookup address is `p * n + q`.
pub(super) fn one_body(h: &HamiltonianSpec, ctx: &mut Ctx) -> Result<BlockEncoding> {
    let n = h.n;
    let k = log2_n(n)?;
    let dense = h.one_body_dense();
    let mut values = vec![0.0; n * n];
    let mut uses = vec![0; n * n];
    for (&(p, q), &v) in &dense {
        values[p * n + q] = v;
        uses[p * n + q] = 1;
    }
    let qt = ctx.table(&values, &uses)?;

    let mut b = Builder::new();
    let sys = b.register("system", n, Role::System);
    let p = b.register("p", k, Role::Index);
    let q = b.register("q", k, Role::Index);
    let v = b.qubit("validation", Role::Validation);
    let amp = AmpRegs::new(&mut b, ctx.opts.m_b);
    b.x(v);
    let pq = concat(&[&p, &q]);
    diffuse(&mut b, &pq);
    amp.sample(&mut b, &qt.table, &concat(&[&q, &p]));
    oc_one_body(&mut b, &p, &q, &sys, v);
    diffuse(&mut b, &pq);

    let alpha_class = (n * n) as f64;
    let meta = meta_for(Class::OneBody, n, None, None, ctx, &qt, alpha_class);
    let reference = spec_with(n, dense, BTreeMap::new());
    Ok(BlockEncoding::assemble(b, sys, reference, meta, alpha_class * qt.scale, qt.eps))
}

/// `sum U_p n_p` with a single index register and `alpha = n`.
pub(super) fn number(n: usize, diag: &BTreeMap<usize, f64>, ctx: &mut Ctx) -> Result<BlockEncoding> {
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
    let p = b.register("p", k, Role::Index);
    let v = b.qubit("validation", Role::Validation);
    let amp = AmpRegs::new(&mut b, ctx.opts.m_b);
    b.x(v);
    diffuse(&mut b, &p);
    amp.sample(&mut b, &qt.table, &p);
    os(&mut b, OsVariant::Number, &p, &p, &sys, v);
    diffuse(&mut b, &p);

    let alpha_class = n as f64;
    let meta = meta_for(Class::Number, n, None, None, ctx, &qt, alpha_class);
    let reference = spec_with(n, diag.iter().map(|(&p, &u)| ((p, p), u)).collect(), BTreeMap::new());
    Ok(BlockEncoding::assemble(b, sys, reference, meta, alpha_class * qt.scale, qt.eps))
}

/// `sum h_pqrs a†_p a†_q a_r a_s` with four index registers and `alpha = n^4`.
pub(super) fn two_body(h: &HamiltonianSpec, ctx: &mut Ctx) -> Result<BlockEncoding> {
    let n = h.n;
    let k = log2_n(n)?;
    let dense = h.two_body_dense();
    let size = n.pow(4);
    let mut values = vec![0.0; size];
    let mut uses = vec![0; size];
    for (&(p, q, r, s), &v) in &dense {
        let l = ((p * n + q) * n + r) * n + s;
        values[l] = v;
        uses[l] = 1;
    }
    let qt = ctx.table(&values, &uses)?;

    let mut b = Builder::new();
    let sys = b.register("system", n, Role::System);
    let p = b.register("p", k, Role::Index);
    let q = b.register("q", k, Role::Index);
    let r = b.register("r", k, Role::Index);
    let s = b.register("s", k, Role::Index);
    let v1 = b.qubit("validation_create", Role::Validation);
    let v2 = b.qubit("validation_annihilate", Role::Validation);
    let amp = AmpRegs::new(&mut b, ctx.opts.m_b);
    b.x(v1);
    b.x(v2);
    let all = concat(&[&p, &q, &r, &s]);
    diffuse(&mut b, &all);
    amp.sample(&mut b, &qt.table, &concat(&[&s, &r, &q, &p]));
    crate::oracles::sparsity::oc_two_body(&mut b, &p, &q, &r, &s, &sys, v1, v2);
    diffuse(&mut b, &all);

    let alpha_class = size as f64;
    let meta = meta_for(Class::TwoBody, n, None, None, ctx, &qt, alpha_class);
    let reference = spec_with(n, BTreeMap::new(), dense);
    Ok(BlockEncoding::assemble(b, sys, reference, meta, alpha_class * qt.scale, qt.eps))
}

/// Lookup values for `V_pq n_p n_q` over ordered pairs, nonzero only for `p < q`.
pub(super) fn pair_values(n: usize, pairs: &BTreeMap<(usize, usize), f64>) -> (Vec<f64>, Vec<usize>) {
    let mut values = vec![0.0; n * n];
    let mut uses = vec![0; n * n];
    for (&(p, q), &v) in pairs {
        let (a, c) = (p.min(q), p.max(q));
        values[a * n + c] += v;
        uses[a * n + c] = 1;
    }
    (values, uses)
}

pub(super) fn pair_reference(n: usize, pairs: &BTreeMap<(usize, usize), f64>) -> HamiltonianSpec {
    let two = pairs.iter().map(|(&(p, q), &v)| ((p.min(q), p.max(q), p.max(q), p.min(q)), v)).collect();
    spec_with(n, BTreeMap::new(), two)
}

/// `sum V_pq n_p n_q` with `alpha = n^2`: validation only, no flips or phases.
pub(super) fn factorized(n: usize, pairs: &BTreeMap<(usize, usize), f64>, ctx: &mut Ctx) -> Result<BlockEncoding> {
    let k = log2_n(n)?;
    let (values, uses) = pair_values(n, pairs);
    let qt = ctx.table(&values, &uses)?;

    let mut b = Builder::new();
    let sys = b.register("system", n, Role::System);
    let p = b.register("p", k, Role::Index);
    let q = b.register("q", k, Role::Index);
    let v = b.qubit("validation", Role::Validation);
    let amp = AmpRegs::new(&mut b, ctx.opts.m_b);
    b.x(v);
    let pq = concat(&[&p, &q]);
    diffuse(&mut b, &pq);
    amp.sample(&mut b, &qt.table, &concat(&[&q, &p]));
    number_pair_check(&mut b, &p, &q, &sys, v);
    diffuse(&mut b, &pq);

    let alpha_class = (n * n) as f64;
    let meta = meta_for(Class::Factorized, n, None, None, ctx, &qt, alpha_class);
    Ok(BlockEncoding::assemble(b, sys, pair_reference(n, pairs), meta, alpha_class * qt.scale, qt.eps))
}
