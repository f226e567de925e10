use serde::{Deserialize, Serialize};

use super::{Circuit, Control, Gate, Qubit, Register, Role, ToffoliKind};

/// How Toffoli-class gates are charged and decomposed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CostModel {
    /// Standard 7T, T-depth 3 Toffoli; no measurement.
    Deterministic7T,
    /// 4T compute-AND with a measurement-based uncompute charged 0 T.
    AndGadget4T,
}

impl CostModel {
    pub fn name(&self) -> &'static str {
        match self {
            CostModel::Deterministic7T => "Deterministic7T",
            CostModel::AndGadget4T => "AndGadget4T",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "deterministic7t" | "7t" => Some(CostModel::Deterministic7T),
            "andgadget4t" | "4t" | "and" => Some(CostModel::AndGadget4T),
            _ => None,
        }
    }

    /// Clean scratch qubits a single gate needs while being lowered.
    fn scratch_for(&self, g: &Gate) -> usize {
        let mcx = |k: usize| match self {
            CostModel::Deterministic7T => k.saturating_sub(2),
            CostModel::AndGadget4T => {
                if k >= 2 {
                    k - 1
                } else {
                    0
                }
            }
        };
        match g {
            Gate::Toffoli { kind: ToffoliKind::Plain, .. } | Gate::Fredkin { .. } => mcx(2),
            Gate::Mcx { controls, .. } => mcx(controls.len()),
            Gate::Mcswap { controls, .. } => mcx(controls.len() + 1),
            _ => 0,
        }
    }
}

/// Rewrites `c` into single- and two-qubit Clifford+T gates. Rotations pass
/// through untouched. Under [`CostModel::AndGadget4T`] the measured
/// uncompute stays as a `Toffoli { kind: Uncompute }` marker.
pub fn lower(c: &Circuit, model: CostModel) -> Circuit {
    let need = c.gates.iter().map(|g| model.scratch_for(g)).max().unwrap_or(0);
    let scratch: Vec<Qubit> = (c.qubit_count..c.qubit_count + need).collect();
    let mut registers = c.registers.clone();
    if need > 0 {
        registers.push(Register { name: "lowering".into(), qubits: scratch.clone(), role: Role::Scratch });
    }
    let mut out = Vec::with_capacity(c.gates.len() * 4);
    for g in &c.gates {
        lower_gate(g, model, &scratch, &mut out);
    }
    Circuit { qubit_count: c.qubit_count + need, registers, gates: out }
}

fn lower_gate(g: &Gate, model: CostModel, scratch: &[Qubit], out: &mut Vec<Gate>) {
    match g {
        Gate::Toffoli { c0, c1, t, kind } => match (model, kind) {
            (CostModel::Deterministic7T, _) => toffoli_7t(*c0, *c1, *t, out),
            (CostModel::AndGadget4T, ToffoliKind::Compute) => and_4t(*c0, *c1, *t, out),
            (CostModel::AndGadget4T, ToffoliKind::Uncompute) => out.push(g.clone()),
            (CostModel::AndGadget4T, ToffoliKind::Plain) => mcx_positive(&[*c0, *c1], *t, model, scratch, out),
        },
        Gate::Fredkin { c, a, b } => {
            out.push(Gate::Cnot { c: *b, t: *a });
            mcx_positive(&[*c, *a], *b, model, scratch, out);
            out.push(Gate::Cnot { c: *b, t: *a });
        }
        Gate::Mcx { controls, t } => with_polarity(controls, out, |pos, out| {
            mcx_positive(pos, *t, model, scratch, out)
        }),
        Gate::Mcswap { controls, a, b } => {
            out.push(Gate::Cnot { c: *b, t: *a });
            with_polarity(controls, out, |pos, out| {
                let mut cs = pos.to_vec();
                cs.push(*a);
                mcx_positive(&cs, *b, model, scratch, out)
            });
            out.push(Gate::Cnot { c: *b, t: *a });
        }
        g => out.push(g.clone()),
    }
}

fn with_polarity(controls: &[Control], out: &mut Vec<Gate>, f: impl FnOnce(&[Qubit], &mut Vec<Gate>)) {
    let neg: Vec<Qubit> = controls.iter().filter(|c| !c.1).map(|c| c.0).collect();
    let pos: Vec<Qubit> = controls.iter().map(|c| c.0).collect();
    out.extend(neg.iter().map(|&q| Gate::X(q)));
    f(&pos, out);
    out.extend(neg.iter().map(|&q| Gate::X(q)));
}

fn mcx_positive(cs: &[Qubit], t: Qubit, model: CostModel, scratch: &[Qubit], out: &mut Vec<Gate>) {
    match (cs.len(), model) {
        (0, _) => out.push(Gate::X(t)),
        (1, _) => out.push(Gate::Cnot { c: cs[0], t }),
        (2, CostModel::Deterministic7T) => toffoli_7t(cs[0], cs[1], t, out),
        (k, CostModel::Deterministic7T) => {
            let s = &scratch[..k - 2];
            let mut chain = Vec::new();
            toffoli_7t(cs[0], cs[1], s[0], &mut chain);
            for i in 1..k - 2 {
                toffoli_7t(s[i - 1], cs[i + 1], s[i], &mut chain);
            }
            out.extend(chain.iter().cloned());
            toffoli_7t(s[k - 3], cs[k - 1], t, out);
            out.extend(chain.iter().rev().map(Gate::adjoint));
        }
        (k, CostModel::AndGadget4T) => {
            let s = &scratch[..k - 1];
            let mut pairs = vec![(cs[0], cs[1], s[0])];
            for i in 1..k - 1 {
                pairs.push((s[i - 1], cs[i + 1], s[i]));
            }
            for &(a, b, x) in &pairs {
                and_4t(a, b, x, out);
            }
            out.push(Gate::Cnot { c: s[k - 2], t });
            for &(a, b, x) in pairs.iter().rev() {
                out.push(Gate::Toffoli { c0: a, c1: b, t: x, kind: ToffoliKind::Uncompute });
            }
        }
    }
}

/// T-depth 3 Toffoli from the phase polynomial
/// `4abc = a + b + c - (a^b) - (a^c) - (b^c) + (a^b^c)`.
fn toffoli_7t(a: Qubit, b: Qubit, c: Qubit, out: &mut Vec<Gate>) {
    use Gate::*;
    out.extend([
        H(c),
        T(a),
        T(b),
        T(c),
        Cnot { c: a, t: b },
        Cnot { c: a, t: c },
        Cnot { c: b, t: a },
        Cnot { c, t: a },
        // wires now hold (a^b^c, a^b, a^c)
        T(a),
        Tdg(b),
        Tdg(c),
        Cnot { c: b, t: c },
        Tdg(c),
        // (a^b^c, a^b, b^c) back to (a, b, c)
        Cnot { c, t: a },
        Cnot { c: a, t: b },
        Cnot { c: b, t: c },
        H(c),
    ]);
}

/// Clean-target AND with four T gates; the trailing S removes the
/// `(-i)^(ab)` left by the x-independent phase terms.
fn and_4t(a: Qubit, b: Qubit, t: Qubit, out: &mut Vec<Gate>) {
    use Gate::*;
    out.extend([
        H(t),
        T(t),
        Cnot { c: a, t },
        Cnot { c: b, t },
        Cnot { c: t, t: a },
        Cnot { c: t, t: b },
        Tdg(a),
        Tdg(b),
        T(t),
        Cnot { c: t, t: a },
        Cnot { c: t, t: b },
        H(t),
        S(t),
    ]);
}
