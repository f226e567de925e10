//! Reusable sub-circuits. Each `emit` function appends into a shared
//! [`Builder`]; the `build_*` wrappers produce standalone [`OracleHandle`]s
//! with named registers for testing and export.

pub mod arith;
pub mod lookup;
pub mod occ;
pub mod sparsity;
pub mod swap;

use std::collections::BTreeMap;

pub use lookup::{prescale, quantize, FixedPointCode, LookupTable};
pub use occ::width_for;
pub use sparsity::OsVariant;

use crate::circuit::{Builder, Circuit, Qubit, Role};
use crate::error::{invalid, Result};

/// A built oracle with its register map. `declared_ancilla` must enter and
/// leave as |0> on every input in the oracle's contract domain.
#[derive(Clone, Debug)]
pub struct OracleHandle {
    pub circuit: Circuit,
    pub registers: BTreeMap<String, Vec<Qubit>>,
    pub declared_ancilla: Vec<Qubit>,
}

impl OracleHandle {
    fn from_builder(b: Builder, names: &[(&str, &[Qubit])]) -> Self {
        let circuit = b.finish();
        let declared_ancilla = circuit.qubits_with_role(Role::Scratch);
        let registers = names.iter().map(|(n, q)| (n.to_string(), q.to_vec())).collect();
        OracleHandle { circuit, registers, declared_ancilla }
    }

    /// Register by name; panics on an unknown name since names are fixed per builder.
    pub fn reg(&self, name: &str) -> &[Qubit] {
        self.registers.get(name).unwrap_or_else(|| panic!("no register `{name}`"))
    }
}

fn log2_exact(n: usize, what: &str) -> Result<usize> {
    if n == 0 || !n.is_power_of_two() {
        return invalid(format!("{what} = {n} must be a power of two"));
    }
    Ok(n.trailing_zeros() as usize)
}

pub fn build_swap_up(n: usize, m_b: usize) -> Result<OracleHandle> {
    let k = log2_exact(n, "n")?;
    let mut b = Builder::new();
    let p = b.register("p", k, Role::Index);
    let words: Vec<Vec<Qubit>> = (0..n).map(|i| b.register(&format!("w{i}"), m_b, Role::System)).collect();
    swap::swap_up(&mut b, &p, &words);
    let flat: Vec<Qubit> = words.concat();
    Ok(OracleHandle::from_builder(b, &[("p", &p), ("words", &flat)]))
}

pub fn build_ladder(n: usize) -> Result<OracleHandle> {
    if n < 2 {
        return invalid("ladder needs at least two modes");
    }
    let mut b = Builder::new();
    let sys = b.register("system", n, Role::System);
    swap::ladder(&mut b, &sys);
    Ok(OracleHandle::from_builder(b, &[("system", &sys)]))
}

fn pq_system(b: &mut Builder, n: usize) -> Result<(Vec<Qubit>, Vec<Qubit>, Vec<Qubit>)> {
    let k = log2_exact(n, "n")?;
    let p = b.register("p", k, Role::Index);
    let q = b.register("q", k, Role::Index);
    let sys = b.register("system", n, Role::System);
    Ok((p, q, sys))
}

pub fn build_phase_oracle(n: usize) -> Result<OracleHandle> {
    let mut b = Builder::new();
    let (p, q, sys) = pq_system(&mut b, n)?;
    swap::phase_oracle(&mut b, &p, &q, &sys);
    Ok(OracleHandle::from_builder(b, &[("p", &p), ("q", &q), ("system", &sys)]))
}

fn build_binary(width: usize, f: impl FnOnce(&mut Builder, &[Qubit], &[Qubit], Qubit)) -> Result<OracleHandle> {
    if width == 0 {
        return invalid("width must be at least 1");
    }
    let mut b = Builder::new();
    let p = b.register("p", width, Role::Index);
    let q = b.register("q", width, Role::Index);
    let r = b.qubit("result", Role::Validation);
    f(&mut b, &p, &q, r);
    Ok(OracleHandle::from_builder(b, &[("p", &p), ("q", &q), ("result", &[r])]))
}

/// `result ^= [p < q]`.
pub fn build_comp(width: usize) -> Result<OracleHandle> {
    build_binary(width, arith::comp)
}

/// `result ^= [p == q]`.
pub fn build_eq(width: usize) -> Result<OracleHandle> {
    build_binary(width, arith::eq)
}

/// `|a>|b> -> |a>|b ± a>`, subtracting when the optional sign qubit is |1>.
pub fn build_adder(width: usize, signed_ctrl: bool) -> Result<OracleHandle> {
    if width == 0 {
        return invalid("width must be at least 1");
    }
    let mut b = Builder::new();
    let a = b.register("a", width, Role::Index);
    let t = b.register("b", width, Role::Index);
    let sign = signed_ctrl.then(|| b.qubit("sign", Role::Index));
    arith::add(&mut b, &a, &t, sign);
    let s: Vec<Qubit> = sign.into_iter().collect();
    Ok(OracleHandle::from_builder(b, &[("a", &a), ("b", &t), ("sign", &s)]))
}

/// Validation enters as |1> (not prepared here).
pub fn build_os_one_body(n: usize, variant: OsVariant) -> Result<OracleHandle> {
    let mut b = Builder::new();
    let (p, q, sys) = pq_system(&mut b, n)?;
    let v = b.qubit("validation", Role::Validation);
    sparsity::os(&mut b, variant, &p, &q, &sys, v);
    Ok(OracleHandle::from_builder(b, &[("p", &p), ("q", &q), ("system", &sys), ("validation", &[v])]))
}

pub fn build_oc_one_body(n: usize) -> Result<OracleHandle> {
    let mut b = Builder::new();
    let (p, q, sys) = pq_system(&mut b, n)?;
    let v = b.qubit("validation", Role::Validation);
    sparsity::oc_one_body(&mut b, &p, &q, &sys, v);
    Ok(OracleHandle::from_builder(b, &[("p", &p), ("q", &q), ("system", &sys), ("validation", &[v])]))
}

pub fn build_oc_two_body(n: usize) -> Result<OracleHandle> {
    let mut b = Builder::new();
    let (p, q, sys) = pq_system(&mut b, n)?;
    let k = p.len();
    let r = b.register("r", k, Role::Index);
    let s = b.register("s", k, Role::Index);
    let v1 = b.qubit("v1", Role::Validation);
    let v2 = b.qubit("v2", Role::Validation);
    sparsity::oc_two_body(&mut b, &p, &q, &r, &s, &sys, v1, v2);
    Ok(OracleHandle::from_builder(
        b,
        &[("p", &p), ("q", &q), ("r", &r), ("s", &s), ("system", &sys), ("v1", &[v1]), ("v2", &[v2])],
    ))
}

pub fn build_select_swap(t: &LookupTable) -> Result<OracleHandle> {
    t.validate()?;
    let mut b = Builder::new();
    let addr = b.register("addr", t.address_bits(), Role::Index);
    let out = b.register("lookup", t.m_b, Role::Lookup);
    lookup::select_swap(&mut b, t, &addr, &out);
    Ok(OracleHandle::from_builder(b, &[("addr", &addr), ("lookup", &out)]))
}

pub fn build_direct_sampling(m_b: usize) -> Result<OracleHandle> {
    if m_b < 2 {
        return invalid("direct sampling needs m_b >= 2");
    }
    let mut b = Builder::new();
    let word = b.register("lookup", m_b, Role::Lookup);
    let samp = b.register("sampling", m_b - 1, Role::Sampling);
    let flag = b.qubit("flag", Role::Sampling);
    lookup::direct_sampling(&mut b, &word, &samp, flag);
    Ok(OracleHandle::from_builder(b, &[("lookup", &word), ("sampling", &samp), ("flag", &[flag])]))
}

fn check_eta(n: usize, eta: usize) -> Result<()> {
    if n == 0 || eta == 0 || eta > n {
        return invalid(format!("need 1 <= eta <= n, got eta={eta}, n={n}"));
    }
    Ok(())
}

/// `|i>|0>|j> -> |i>|add_i(j)>|j>` on states with `eta` particles. Any `n` is accepted.
pub fn build_occ(n: usize, eta: usize) -> Result<OracleHandle> {
    check_eta(n, eta)?;
    let mut b = Builder::new();
    let i = b.register("i", width_for(eta), Role::Index);
    let addr = b.register("addr", width_for(n), Role::Index);
    let sys = b.register("system", n, Role::System);
    occ::occ(&mut b, &i, &addr, &sys, eta);
    Ok(OracleHandle::from_builder(b, &[("i", &i), ("addr", &addr), ("system", &sys)]))
}

/// `|q>|e_q> -> |q>|0>` where `e_q` is the one-hot word with bit `q` set.
pub fn build_uocc(n: usize) -> Result<OracleHandle> {
    if n == 0 {
        return invalid("n must be positive");
    }
    let mut b = Builder::new();
    let addr = b.register("addr", width_for(n), Role::Index);
    let onehot = b.register("copy", n, Role::System);
    occ::uocc(&mut b, &addr, &onehot);
    Ok(OracleHandle::from_builder(b, &[("addr", &addr), ("copy", &onehot)]))
}

/// One or two independent (ordinal, address) pairs over the same system.
pub fn build_idf(n: usize, eta: usize, pairs: usize) -> Result<OracleHandle> {
    check_eta(n, eta)?;
    if !(1..=2).contains(&pairs) {
        return invalid("indirect diffusion supports one or two index pairs");
    }
    let mut b = Builder::new();
    let regs: Vec<(Vec<Qubit>, Vec<Qubit>)> = (0..pairs)
        .map(|k| {
            (
                b.register(&format!("i{}", k + 1), width_for(eta), Role::Index),
                b.register(&format!("addr{}", k + 1), width_for(n), Role::Index),
            )
        })
        .collect();
    let sys = b.register("system", n, Role::System);
    for (i, a) in &regs {
        occ::idf(&mut b, i, a, &sys, eta);
    }
    let mut names: Vec<(String, Vec<Qubit>)> = Vec::new();
    for (k, (i, a)) in regs.iter().enumerate() {
        names.push((format!("i{}", k + 1), i.clone()));
        names.push((format!("addr{}", k + 1), a.clone()));
    }
    names.push(("system".into(), sys));
    let refs: Vec<(&str, &[Qubit])> = names.iter().map(|(n, q)| (n.as_str(), q.as_slice())).collect();
    Ok(OracleHandle::from_builder(b, &refs))
}

/// `|q>|j>|i> -> |q>|j>|i ^ rank_j(q)>`.
pub fn build_rank(n: usize, eta: usize) -> Result<OracleHandle> {
    check_eta(n, eta)?;
    let mut b = Builder::new();
    let q = b.register("q", width_for(n), Role::Index);
    let sys = b.register("system", n, Role::System);
    let i = b.register("i", width_for(eta), Role::Index);
    occ::rank(&mut b, &q, &sys, &i);
    Ok(OracleHandle::from_builder(b, &[("q", &q), ("system", &sys), ("i", &i)]))
}

pub fn build_xor_copy(n: usize) -> Result<OracleHandle> {
    let mut b = Builder::new();
    let src = b.register("system", n, Role::System);
    let dst = b.register("copy", n, Role::System);
    occ::xor_copy(&mut b, &src, &dst);
    Ok(OracleHandle::from_builder(b, &[("system", &src), ("copy", &dst)]))
}

pub fn build_swx(n: usize) -> Result<OracleHandle> {
    let k = log2_exact(n, "n")?;
    let mut b = Builder::new();
    let p = b.register("p", k, Role::Index);
    let sys = b.register("system", n, Role::System);
    swap::swx(&mut b, &p, &sys);
    Ok(OracleHandle::from_builder(b, &[("p", &p), ("system", &sys)]))
}
