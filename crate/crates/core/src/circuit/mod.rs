//! Register-aware gate IR with Clifford+T lowering, sparse simulation and
//! resource accounting.

mod builder;
mod count;
mod dense;
mod lower;
mod qasm;
mod sim;

pub use builder::Builder;
pub use count::{count_resources, ResourceReport};
pub use dense::{project_column, projected_block, unitarity_defect, unitary, DENSE_QUBIT_CAP};
pub use lower::{lower, CostModel};
pub use qasm::{export_text, parse_text};
pub use sim::{apply, bit, read_reg, word_with, write_reg, SparseState, Word, MAX_QUBITS};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Qubit = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    System,
    Index,
    Lookup,
    Sampling,
    Validation,
    Scratch,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub qubits: Vec<Qubit>,
    pub role: Role,
}

/// How a Toffoli relates to its target. `Compute` promises a clean target
/// and `Uncompute` promises the target holds exactly the AND of the controls,
/// which lets the 4T gadget model charge them differently.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ToffoliKind {
    Plain,
    Compute,
    Uncompute,
}

/// A control qubit with its polarity; `true` fires on |1>.
pub type Control = (Qubit, bool);

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    H(Qubit),
    X(Qubit),
    Y(Qubit),
    Z(Qubit),
    S(Qubit),
    Sdg(Qubit),
    T(Qubit),
    Tdg(Qubit),
    /// `diag(e^{-iθ/2}, e^{iθ/2})`
    Rz(Qubit, f64),
    /// `exp(-iθY/2)`
    Ry(Qubit, f64),
    Cnot { c: Qubit, t: Qubit },
    Cz(Qubit, Qubit),
    Swap(Qubit, Qubit),
    Toffoli { c0: Qubit, c1: Qubit, t: Qubit, kind: ToffoliKind },
    Fredkin { c: Qubit, a: Qubit, b: Qubit },
    Mcx { controls: Vec<Control>, t: Qubit },
    Mcswap { controls: Vec<Control>, a: Qubit, b: Qubit },
}

impl Gate {
    pub fn qubits(&self) -> Vec<Qubit> {
        use Gate::*;
        match self {
            H(q) | X(q) | Y(q) | Z(q) | S(q) | Sdg(q) | T(q) | Tdg(q) | Rz(q, _) | Ry(q, _) => vec![*q],
            Cnot { c, t } => vec![*c, *t],
            Cz(a, b) | Swap(a, b) => vec![*a, *b],
            Toffoli { c0, c1, t, .. } => vec![*c0, *c1, *t],
            Fredkin { c, a, b } => vec![*c, *a, *b],
            Mcx { controls, t } => controls.iter().map(|c| c.0).chain([*t]).collect(),
            Mcswap { controls, a, b } => controls.iter().map(|c| c.0).chain([*a, *b]).collect(),
        }
    }

    pub fn adjoint(&self) -> Gate {
        use Gate::*;
        match self {
            S(q) => Sdg(*q),
            Sdg(q) => S(*q),
            T(q) => Tdg(*q),
            Tdg(q) => T(*q),
            Rz(q, a) => Rz(*q, -a),
            Ry(q, a) => Ry(*q, -a),
            Toffoli { c0, c1, t, kind } => Toffoli {
                c0: *c0,
                c1: *c1,
                t: *t,
                kind: match kind {
                    ToffoliKind::Plain => ToffoliKind::Plain,
                    ToffoliKind::Compute => ToffoliKind::Uncompute,
                    ToffoliKind::Uncompute => ToffoliKind::Compute,
                },
            },
            g => g.clone(),
        }
    }

    pub fn remap(&self, f: &impl Fn(Qubit) -> Qubit) -> Gate {
        use Gate::*;
        match self {
            H(q) => H(f(*q)),
            X(q) => X(f(*q)),
            Y(q) => Y(f(*q)),
            Z(q) => Z(f(*q)),
            S(q) => S(f(*q)),
            Sdg(q) => Sdg(f(*q)),
            T(q) => T(f(*q)),
            Tdg(q) => Tdg(f(*q)),
            Rz(q, a) => Rz(f(*q), *a),
            Ry(q, a) => Ry(f(*q), *a),
            Cnot { c, t } => Cnot { c: f(*c), t: f(*t) },
            Cz(a, b) => Cz(f(*a), f(*b)),
            Swap(a, b) => Swap(f(*a), f(*b)),
            Toffoli { c0, c1, t, kind } => Toffoli { c0: f(*c0), c1: f(*c1), t: f(*t), kind: *kind },
            Fredkin { c, a, b } => Fredkin { c: f(*c), a: f(*a), b: f(*b) },
            Mcx { controls, t } => {
                Mcx { controls: controls.iter().map(|&(q, p)| (f(q), p)).collect(), t: f(*t) }
            }
            Mcswap { controls, a, b } => Mcswap {
                controls: controls.iter().map(|&(q, p)| (f(q), p)).collect(),
                a: f(*a),
                b: f(*b),
            },
        }
    }

    pub fn is_t(&self) -> bool {
        matches!(self, Gate::T(_) | Gate::Tdg(_))
    }

    /// Number of controls for the multi-controlled kinds.
    pub fn arity(&self) -> usize {
        match self {
            Gate::Mcx { controls, .. } | Gate::Mcswap { controls, .. } => controls.len(),
            _ => self.qubits().len(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    pub qubit_count: usize,
    pub registers: Vec<Register>,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(qubit_count: usize) -> Self {
        Self { qubit_count, registers: Vec::new(), gates: Vec::new() }
    }

    pub fn register(&self, name: &str) -> Option<&Register> {
        self.registers.iter().find(|r| r.name == name)
    }

    pub fn qubits_with_role(&self, role: Role) -> Vec<Qubit> {
        let mut out: Vec<Qubit> =
            self.registers.iter().filter(|r| r.role == role).flat_map(|r| r.qubits.clone()).collect();
        out.sort_unstable();
        out
    }

    /// Checks operand ranges and that no gate names a qubit twice.
    pub fn validate(&self) -> Result<()> {
        if self.qubit_count > MAX_QUBITS {
            return Err(Error::SizeCap { what: "qubit count", got: self.qubit_count, cap: MAX_QUBITS });
        }
        for g in &self.gates {
            let qs = g.qubits();
            for (i, &q) in qs.iter().enumerate() {
                if q >= self.qubit_count {
                    return Err(Error::QubitRange { qubit: q, count: self.qubit_count });
                }
                if qs[..i].contains(&q) {
                    return Err(Error::Invalid(format!("gate {g:?} repeats qubit {q}")));
                }
            }
        }
        Ok(())
    }

    pub fn adjoint(&self) -> Circuit {
        Circuit {
            qubit_count: self.qubit_count,
            registers: self.registers.clone(),
            gates: self.gates.iter().rev().map(Gate::adjoint).collect(),
        }
    }

    /// `a` followed by `b` on a shared qubit space. Registers of `a` win on name clashes.
    pub fn compose(a: &Circuit, b: &Circuit) -> Circuit {
        let mut registers = a.registers.clone();
        for r in &b.registers {
            if !registers.iter().any(|x| x.name == r.name) {
                registers.push(r.clone());
            }
        }
        Circuit {
            qubit_count: a.qubit_count.max(b.qubit_count),
            registers,
            gates: a.gates.iter().chain(&b.gates).cloned().collect(),
        }
    }

    /// Side-by-side placement; `b`'s qubits are shifted past `a`'s.
    pub fn tensor(a: &Circuit, b: &Circuit) -> Circuit {
        let off = a.qubit_count;
        let shift = |q: Qubit| q + off;
        let mut registers = a.registers.clone();
        registers.extend(b.registers.iter().map(|r| Register {
            name: format!("{}'", r.name),
            qubits: r.qubits.iter().map(|q| q + off).collect(),
            role: r.role,
        }));
        let mut gates = a.gates.clone();
        gates.extend(b.gates.iter().map(|g| g.remap(&shift)));
        Circuit { qubit_count: a.qubit_count + b.qubit_count, registers, gates }
    }
}

#[cfg(test)]
mod tests;
