//! Linear combination of block encodings over a shared system register.

use std::collections::BTreeMap;

use super::{spec_with, BlockEncoding, EncodingMeta};
use crate::circuit::{Builder, Control, Gate, Qubit, Role};
use crate::error::{invalid, Error, Result};
use crate::fock::HamiltonianSpec;
use crate::oracles::arith::const_controls;
use crate::oracles::width_for;

/// Loads `sqrt(probs[k])` onto `|k>` with a tree of (controlled) `Ry`
/// rotations, most significant bit first.
fn prepare(b: &mut Builder, bits: &[Qubit], probs: &[f64], controls: &mut Vec<Control>) {
    let Some((&top, rest)) = bits.split_last() else { return };
    let half = probs.len() / 2;
    let (lo, hi) = probs.split_at(half);
    let (p0, p1): (f64, f64) = (lo.iter().sum(), hi.iter().sum());
    if p1 > 0.0 {
        let theta = 2.0 * p1.sqrt().atan2(p0.sqrt());
        b.push_controlled(&Gate::Ry(top, theta), controls);
    }
    for (side, part, mass) in [(false, lo, p0), (true, hi, p1)] {
        if mass > 0.0 && !rest.is_empty() {
            controls.push((top, side));
            let norm: Vec<f64> = part.iter().map(|x| x / mass).collect();
            prepare(b, rest, &norm, controls);
            controls.pop();
        }
    }
}

fn uniform(probs: &[f64]) -> bool {
    probs.iter().all(|&p| (p - probs[0]).abs() < 1e-15)
}

fn merged_reference(parts: &[(f64, BlockEncoding)]) -> HamiltonianSpec {
    let n = parts[0].1.system_qubits.len();
    let mut one: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut two: BTreeMap<(usize, usize, usize, usize), f64> = BTreeMap::new();
    for (w, be) in parts {
        for (k, v) in be.reference.one_body_dense() {
            *one.entry(k).or_insert(0.0) += w * v;
        }
        for (k, v) in be.reference.two_body_dense() {
            *two.entry(k).or_insert(0.0) += w * v;
        }
    }
    one.retain(|_, v| *v != 0.0);
    two.retain(|_, v| *v != 0.0);
    spec_with(n, one, two)
}

/// Combines `(weight, encoding)` parts into one encoding of
/// `sum_k weight_k H_k` with `alpha = sum_k weight_k alpha_k`. A prepare
/// register selects part `k` with probability `weight_k alpha_k / alpha`;
/// each part runs controlled on its index with its own ancillas.
pub fn lcu_combine(parts: Vec<(f64, BlockEncoding)>) -> Result<BlockEncoding> {
    let Some((_, first)) = parts.first() else {
        return invalid("LCU needs at least one part");
    };
    let n = first.system_qubits.len();
    for (w, be) in &parts {
        if be.system_qubits.len() != n {
            return Err(Error::RegisterMismatch(format!(
                "system sizes differ: {} vs {}",
                n,
                be.system_qubits.len()
            )));
        }
        if !(w.is_finite() && *w > 0.0) {
            return invalid(format!("LCU weight {w} must be positive"));
        }
    }
    let total: f64 = parts.iter().map(|(w, be)| w * be.alpha).sum();
    if total.is_nan() || total <= 0.0 {
        return invalid("LCU parts have zero total subnormalization");
    }
    let width = width_for(parts.len()).max(1);
    let mut probs: Vec<f64> = parts.iter().map(|(w, be)| w * be.alpha / total).collect();
    probs.resize(1 << width, 0.0);

    let mut b = Builder::new();
    let sys = b.register("system", n, Role::System);
    let prep = b.register("prepare", width, Role::Index);
    let emit_prepare = |b: &mut Builder| {
        if uniform(&probs) {
            for &q in &prep {
                b.h(q);
            }
        } else {
            prepare(b, &prep, &probs, &mut Vec::new());
        }
    };
    emit_prepare(&mut b);
    for (k, (_, be)) in parts.iter().enumerate() {
        let mut map: Vec<Qubit> = vec![usize::MAX; be.circuit.qubit_count];
        for (i, &q) in be.system_qubits.iter().enumerate() {
            map[q] = sys[i];
        }
        for reg in &be.circuit.registers {
            if reg.role == Role::System && reg.qubits.iter().all(|q| be.system_qubits.contains(q)) {
                continue;
            }
            let fresh = b.register(&format!("part{k}.{}", reg.name), reg.qubits.len(), reg.role);
            for (&old, new) in reg.qubits.iter().zip(fresh) {
                map[old] = new;
            }
        }
        if map.contains(&usize::MAX) {
            return invalid(format!("part {k} has qubits outside any register"));
        }
        let ctrl = const_controls(&prep, k as u64);
        for g in &be.circuit.gates {
            b.push_controlled(&g.remap(&|q| map[q]), &ctrl);
        }
    }
    b.emit_adjoint(emit_prepare);

    let eps: f64 = parts.iter().map(|(w, be)| w * be.eps_budget).sum();
    let reference = merged_reference(&parts);
    let m0 = &first.meta;
    let meta = EncodingMeta {
        class: m0.class,
        n,
        eta: parts.iter().find_map(|(_, be)| be.meta.eta),
        l: m0.l,
        lambda: m0.lambda,
        m_b: m0.m_b,
        m: parts.iter().find_map(|(_, be)| be.meta.m),
        alpha_class: parts.iter().map(|(w, be)| w * be.meta.alpha_class).sum(),
        prescale: m0.prescale,
        used_entries: m0.used_entries,
        distinct_words: m0.distinct_words,
        boundary: m0.boundary,
        tables: parts.iter().flat_map(|(_, be)| be.meta.tables.clone()).collect(),
        parts: parts.iter().flat_map(|(w, be)| be.meta.parts.iter().map(move |&(c, a)| (c, w * a))).collect(),
    };
    Ok(BlockEncoding::assemble(b, sys, reference, meta, total, eps))
}
