//! Encoders that exploit spatial structure: bounded hopping range and
//! translation invariance.

use std::collections::BTreeMap;

use super::eta::{one_body as eta_one_body, sample_pair, Keying, Ordinal};
use super::tables::Ctx;
use super::{diffuse, log2_n, meta_for, spec_with, AmpRegs, BlockEncoding, Boundary, Class};
use crate::circuit::{Builder, Qubit, Role};
use crate::error::{invalid, Result};
use crate::fock::HamiltonianSpec;
use crate::oracles::arith::{add, increment};
use crate::oracles::sparsity::oc_one_body;

/// `d = p - q` modulo `2n` in a fresh `(log n + 1)`-bit register. Also
/// returns the constant-one qubit that selects subtraction.
pub(super) fn difference(b: &mut Builder, p: &[Qubit], q: &[Qubit]) -> (Vec<Qubit>, Qubit) {
    let d = b.scratches(p.len() + 1);
    let one = b.scratch();
    b.x(one);
    for (&x, &y) in p.iter().zip(&d) {
        b.cnot(x, y);
    }
    add(b, q, &d, Some(one));
    (d, one)
}

/// Table over `d mod 2n` holding `T(d)`, the use count `n - |d|` of each
/// offset, and the expanded one-body reference.
pub(super) fn ti_values(n: usize, t: &BTreeMap<i64, f64>) -> (Vec<f64>, Vec<usize>, HamiltonianSpec) {
    let len = 2 * n;
    let mut values = vec![0.0; len];
    let mut uses = vec![0; len];
    let span = n as i64 - 1;
    for d in -span..=span {
        let l = d.rem_euclid(len as i64) as usize;
        values[l] = t.get(&d).copied().unwrap_or(0.0);
        uses[l] = n - d.unsigned_abs() as usize;
    }
    let mut one = BTreeMap::new();
    for p in 0..n as i64 {
        for q in 0..n as i64 {
            if let Some(&v) = t.get(&(p - q)) {
                if v != 0.0 {
                    one.insert((p as usize, q as usize), v);
                }
            }
        }
    }
    (values, uses, spec_with(n, one, BTreeMap::new()))
}

/// Translation-invariant hopping over the full space with `alpha = n^2`.
/// The table is keyed by `p - q`, so it has `2n - 1` live entries.
pub(super) fn ti(h: &HamiltonianSpec, ctx: &mut Ctx) -> Result<BlockEncoding> {
    let n = h.n;
    let k = log2_n(n)?;
    let (values, uses, reference) = ti_values(n, &h.ti.t);
    let qt = ctx.table(&values, &uses)?;

    let mut b = Builder::new();
    let sys = b.register("system", n, Role::System);
    let p = b.register("p", k, Role::Index);
    let q = b.register("q", k, Role::Index);
    let v = b.qubit("validation", Role::Validation);
    let amp = AmpRegs::new(&mut b, ctx.opts.m_b);
    b.x(v);
    let pq = [&p[..], &q[..]].concat();
    diffuse(&mut b, &pq);
    sample_pair(&mut b, &amp, &qt, &p, &q, true);
    oc_one_body(&mut b, &p, &q, &sys, v);
    diffuse(&mut b, &pq);

    let alpha_class = (n * n) as f64;
    let meta = meta_for(Class::Ti, n, None, None, ctx, &qt, alpha_class);
    Ok(BlockEncoding::assemble(b, sys, reference, meta, alpha_class * qt.scale, qt.eps))
}

pub(super) fn ti_eta(h: &HamiltonianSpec, eta: usize, ctx: &mut Ctx) -> Result<BlockEncoding> {
    eta_one_body(h, eta, Keying::Difference(&h.ti.t), ctx)
}

/// `dst ^= src`, then `dst += m` (or `-= m` when `s` is |1>), where the
/// register `mreg` holds `m - 1`.
fn shift(b: &mut Builder, src: &[Qubit], mreg: &[Qubit], s: Qubit, dst: &[Qubit]) {
    for (&x, &y) in src.iter().zip(dst) {
        b.cnot(x, y);
    }
    add(b, mreg, dst, Some(s));
    increment(b, dst, &[], Some(s));
}

/// Coefficient table over `(anchor, m - 1, sign)`. The partner of anchor
/// `a` is `a ± m` modulo `n`; `coeff(anchor, partner)` returns the term.
fn band_values(
    n: usize,
    m: usize,
    boundary: Boundary,
    coeff: impl Fn(usize, usize) -> Option<f64>,
) -> (Vec<f64>, Vec<usize>) {
    let len = 2 * n * m;
    let mut values = vec![0.0; len];
    let mut uses = vec![0; len];
    for a in 0..n {
        for dm in 1..=m {
            for (sbit, forward) in [(0, true), (1, false)] {
                let l = (a * m + dm - 1) * 2 + sbit;
                let wraps = if forward { a + dm >= n } else { a < dm };
                if wraps && boundary == Boundary::Open {
                    continue;
                }
                let partner = if forward { (a + dm) % n } else { (a + n - dm) % n };
                if let Some(v) = coeff(a, partner) {
                    values[l] = v;
                    uses[l] = 1;
                }
            }
        }
    }
    (values, uses)
}

fn check_band(n: usize, m: usize, boundary: Boundary, hop: &BTreeMap<(usize, usize), f64>) -> Result<()> {
    for &(p, q) in hop.keys() {
        let lin = p.abs_diff(q);
        let dist = match boundary {
            Boundary::Open => lin,
            Boundary::Torus => lin.min(n - lin),
        };
        if dist == 0 || dist > m {
            return invalid(format!("term ({p},{q}) lies outside the {} band of range {m}", boundary.tag()));
        }
    }
    Ok(())
}

struct BandRegs {
    mreg: Vec<Qubit>,
    s: Qubit,
}

impl BandRegs {
    fn new(b: &mut Builder, m: usize) -> Self {
        BandRegs { mreg: b.register("m", m.trailing_zeros() as usize, Role::Index), s: b.qubit("sign", Role::Index) }
    }

    fn diffuse(&self, b: &mut Builder) {
        diffuse(b, &self.mreg);
        b.h(self.s);
    }

    fn address(&self, anchor: &[Qubit]) -> Vec<Qubit> {
        [&[self.s][..], &self.mreg[..], anchor].concat()
    }
}

/// Hopping within range `M` with `alpha = 2 n M`. The created mode `p` is
/// diffused; the annihilated mode is computed as `q = p ± m`.
pub(super) fn nn(n: usize, m: usize, hop: &BTreeMap<(usize, usize), f64>, ctx: &mut Ctx) -> Result<BlockEncoding> {
    let k = log2_n(n)?;
    check_band(n, m, ctx.opts.boundary, hop)?;
    let (values, uses) = band_values(n, m, ctx.opts.boundary, |p, q| hop.get(&(p, q)).copied());
    let qt = ctx.table(&values, &uses)?;

    let mut b = Builder::new();
    let sys = b.register("system", n, Role::System);
    let p = b.register("p", k, Role::Index);
    let band = BandRegs::new(&mut b, m);
    let q = b.register("q", k, Role::Index);
    let v = b.qubit("validation", Role::Validation);
    let amp = AmpRegs::new(&mut b, ctx.opts.m_b);
    b.x(v);
    diffuse(&mut b, &p);
    band.diffuse(&mut b);
    b.conjugate(
        |b| shift(b, &p, &band.mreg, band.s, &q),
        |b, _| {
            amp.sample(b, &qt.table, &band.address(&p));
            oc_one_body(b, &p, &q, &sys, v);
        },
    );
    band.diffuse(&mut b);
    diffuse(&mut b, &p);

    let alpha_class = (2 * n * m) as f64;
    let meta = meta_for(Class::Nn, n, None, Some(m), ctx, &qt, alpha_class);
    let reference = spec_with(n, hop.clone(), BTreeMap::new());
    Ok(BlockEncoding::assemble(b, sys, reference, meta, alpha_class * qt.scale, qt.eps))
}

/// Hopping within range `M` on the `eta` sector with `alpha = 2 M eta_pad`.
/// The annihilated mode `q` is an occupied mode and `p = q ± m`; after the
/// sparsity oracle `q` is recomputed from `p` with the sign flipped.
pub(super) fn nn_eta(n: usize, m: usize, eta: usize, hop: &BTreeMap<(usize, usize), f64>, ctx: &mut Ctx) -> Result<BlockEncoding> {
    let k = log2_n(n)?;
    check_band(n, m, ctx.opts.boundary, hop)?;
    let (values, uses) = band_values(n, m, ctx.opts.boundary, |q, p| hop.get(&(p, q)).copied());
    let qt = ctx.table(&values, &uses)?;

    let mut b = Builder::new();
    let sys = b.register("system", n, Role::System);
    let q = b.register("q", k, Role::Index);
    let band = BandRegs::new(&mut b, m);
    let p = b.register("p", k, Role::Index);
    let ord = Ordinal::new(&mut b, "i", eta);
    let v = b.qubit("validation", Role::Validation);
    let amp = AmpRegs::new(&mut b, ctx.opts.m_b);
    b.x(v);
    ord.diffuse(&mut b);
    ord.select_particle(&mut b, &q, &sys);
    band.diffuse(&mut b);
    shift(&mut b, &q, &band.mreg, band.s, &p);
    amp.sample(&mut b, &qt.table, &band.address(&q));
    oc_one_body(&mut b, &p, &q, &sys, v);
    b.x(band.s);
    b.emit_adjoint(|b| shift(b, &p, &band.mreg, band.s, &q));
    b.x(band.s);
    ord.release_particle(&mut b, &p, &sys);
    band.diffuse(&mut b);

    let alpha_class = (2 * m * ord.padded()) as f64;
    let meta = meta_for(Class::NnEta, n, Some(eta), Some(m), ctx, &qt, alpha_class);
    let reference = spec_with(n, hop.clone(), BTreeMap::new());
    Ok(BlockEncoding::assemble(b, sys, reference, meta, alpha_class * qt.scale, qt.eps))
}
