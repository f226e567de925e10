use serde::{Deserialize, Serialize};

use super::lower::{lower, CostModel};
use super::{Circuit, Gate, Role, ToffoliKind};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub t_count: u64,
    pub t_depth: u64,
    pub clifford_count: u64,
    pub toffoli_count: u64,
    pub qubit_count: u64,
    pub ancilla_high_water: u64,
    pub model: String,
}

/// Logical Toffoli equivalents of a gate before lowering.
fn toffolis(g: &Gate) -> u64 {
    let mcx = |k: usize| if k >= 2 { 2 * k as u64 - 3 } else { 0 };
    match g {
        Gate::Toffoli { .. } | Gate::Fredkin { .. } => 1,
        Gate::Mcx { controls, .. } => mcx(controls.len()),
        Gate::Mcswap { controls, .. } => mcx(controls.len() + 1),
        _ => 0,
    }
}

pub fn count_resources(c: &Circuit, model: CostModel) -> ResourceReport {
    let low = lower(c, model);
    let mut depth = vec![0u64; low.qubit_count];
    let (mut t, mut cliff) = (0u64, 0u64);
    for g in &low.gates {
        let qs = g.qubits();
        let mut d = qs.iter().map(|&q| depth[q]).max().unwrap_or(0);
        match g {
            Gate::T(_) | Gate::Tdg(_) => {
                t += 1;
                d += 1;
            }
            Gate::Rz(..) | Gate::Ry(..) => {}
            Gate::Toffoli { kind: ToffoliKind::Uncompute, .. } => {}
            _ => cliff += 1,
        }
        for q in qs {
            depth[q] = d;
        }
    }
    let scratch = low.qubits_with_role(Role::Scratch).len() as u64;
    ResourceReport {
        t_count: t,
        t_depth: depth.into_iter().max().unwrap_or(0),
        clifford_count: cliff,
        toffoli_count: c.gates.iter().map(toffolis).sum(),
        qubit_count: low.qubit_count as u64,
        ancilla_high_water: scratch,
        model: model.name().to_string(),
    }
}
