use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use super::*;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn max_dev(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn circuit(n: usize, gates: Vec<Gate>) -> Circuit {
    Circuit { qubit_count: n, registers: Vec::new(), gates }
}

/// Dense unitary of `lowered` restricted to the inputs whose extra scratch is
/// clean, compared against `reference` with scratch checked to return to 0.
fn lowered_matches(reference: &Circuit, lowered: &Circuit) -> f64 {
    let n = reference.qubit_count;
    let u = unitary(reference).unwrap();
    let extra: Vec<Qubit> = (n..lowered.qubit_count).collect();
    let mut worst = 0.0f64;
    for col in 0..1u64 << n {
        let mut w = [0u64; 4];
        w[0] = col;
        let out = apply(lowered, &SparseState::basis(lowered.qubit_count, w)).unwrap();
        let mut seen = 0.0;
        for (word, a) in &out.amps {
            if extra.iter().any(|&q| bit(word, q)) {
                worst = worst.max(a.norm());
                continue;
            }
            let row = word[0] as usize;
            worst = worst.max((a - u[(row, col as usize)]).norm());
            seen += a.norm_sqr();
        }
        worst = worst.max((seen - 1.0).abs());
    }
    worst
}

#[test]
fn hadamard_and_fredkin_examples() {
    let s = apply(&circuit(1, vec![Gate::H(0)]), &SparseState::zero(1)).unwrap();
    assert_eq!(s.len(), 2);
    assert!((s.get(&[0; 4]) - c(FRAC_1_SQRT_2)).norm() < 1e-15);
    assert!((s.get(&[1, 0, 0, 0]) - c(FRAC_1_SQRT_2)).norm() < 1e-15);

    // control qubit 0 set, pair (1,2) holds |01> meaning qubit 1 = 0, qubit 2 = 1
    let s = apply(
        &circuit(3, vec![Gate::Fredkin { c: 0, a: 1, b: 2 }]),
        &SparseState::basis(3, [0b101, 0, 0, 0]),
    )
    .unwrap();
    assert_eq!(s.get(&[0b011, 0, 0, 0]), c(1.0));
}

#[test]
fn hh_cancels_exactly() {
    let s = apply(&circuit(1, vec![Gate::H(0), Gate::H(0)]), &SparseState::zero(1)).unwrap();
    assert_eq!(s.len(), 1);
}

#[test]
fn unitary_examples() {
    let id = unitary(&circuit(2, vec![])).unwrap();
    assert_eq!(id, DMatrix::identity(4, 4));
    let x = unitary(&circuit(1, vec![Gate::X(0)])).unwrap();
    assert_eq!(x, DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]));
    assert!(unitary(&Circuit::new(15)).is_err());
}

#[test]
fn projected_block_hand_example() {
    // ancilla 0, system 1: H(anc) CZ H(anc) projects to (I + Z)/2.
    let circ = circuit(2, vec![Gate::H(0), Gate::Cz(0, 1), Gate::H(0)]);
    let b = projected_block(&circ, &[0]).unwrap();
    let want = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
    assert!(max_dev(&b, &want) < 1e-15);
    assert_eq!(projected_block(&circ, &[]).unwrap(), unitary(&circ).unwrap());
}

#[test]
fn toffoli_7t_matches_and_counts() {
    let t = circuit(3, vec![Gate::Toffoli { c0: 0, c1: 1, t: 2, kind: ToffoliKind::Plain }]);
    let low = lower(&t, CostModel::Deterministic7T);
    assert_eq!(low.qubit_count, 3);
    assert!(max_dev(&unitary(&low).unwrap(), &unitary(&t).unwrap()) < 1e-12);
    let r = count_resources(&t, CostModel::Deterministic7T);
    assert_eq!((r.t_count, r.t_depth, r.toffoli_count), (7, 3, 1));
    assert_eq!(r.clifford_count, 10);
}

#[test]
fn and_gadget_matches_on_clean_target() {
    let t = circuit(3, vec![Gate::Toffoli { c0: 0, c1: 1, t: 2, kind: ToffoliKind::Compute }]);
    let low = lower(&t, CostModel::AndGadget4T);
    for ab in 0..4u64 {
        let s = apply(&low, &SparseState::basis(3, [ab, 0, 0, 0])).unwrap();
        let want = ab | if ab == 3 { 4 } else { 0 };
        assert!((s.get(&[want, 0, 0, 0]) - c(1.0)).norm() < 1e-12, "ab={ab}");
    }
    assert_eq!(count_resources(&t, CostModel::AndGadget4T).t_count, 4);
    let pair = circuit(
        3,
        vec![
            Gate::Toffoli { c0: 0, c1: 1, t: 2, kind: ToffoliKind::Compute },
            Gate::Toffoli { c0: 0, c1: 1, t: 2, kind: ToffoliKind::Uncompute },
        ],
    );
    assert_eq!(count_resources(&pair, CostModel::AndGadget4T).t_count, 4);
    let plain = circuit(3, vec![Gate::Toffoli { c0: 0, c1: 1, t: 2, kind: ToffoliKind::Plain }]);
    assert!(lowered_matches(&plain, &lower(&plain, CostModel::AndGadget4T)) < 1e-12);
}

#[test]
fn mcx3_lowering() {
    let g = circuit(4, vec![Gate::Mcx { controls: vec![(0, true), (1, true), (2, true)], t: 3 }]);
    let low = lower(&g, CostModel::Deterministic7T);
    assert_eq!(low.qubit_count, 5);
    assert!(lowered_matches(&g, &low) < 1e-12);
    let r = count_resources(&g, CostModel::Deterministic7T);
    assert_eq!(r.toffoli_count, 3);
    assert_eq!(r.t_count, 21);
    assert_eq!(r.ancilla_high_water, 1);

    let low4 = lower(&g, CostModel::AndGadget4T);
    assert_eq!(low4.qubit_count, 6);
    assert!(lowered_matches(&g, &low4) < 1e-12);
    assert_eq!(count_resources(&g, CostModel::AndGadget4T).t_count, 8);

    let one = circuit(2, vec![Gate::Mcx { controls: vec![(0, true)], t: 1 }]);
    assert_eq!(count_resources(&one, CostModel::Deterministic7T).t_count, 0);
}

#[test]
fn mixed_polarity_and_swaps_lower_correctly() {
    let g = circuit(
        6,
        vec![
            Gate::Mcx { controls: vec![(0, false), (1, true), (2, false), (3, true)], t: 4 },
            Gate::Mcswap { controls: vec![(0, true), (5, false)], a: 2, b: 4 },
            Gate::Fredkin { c: 1, a: 3, b: 5 },
        ],
    );
    for m in [CostModel::Deterministic7T, CostModel::AndGadget4T] {
        assert!(lowered_matches(&g, &lower(&g, m)) < 1e-12, "{m:?}");
    }
}

#[test]
fn parallel_t_depth() {
    let g = circuit(3, vec![Gate::T(0), Gate::T(1), Gate::T(2)]);
    let r = count_resources(&g, CostModel::Deterministic7T);
    assert_eq!((r.t_count, r.t_depth), (3, 1));
}

#[test]
fn qasm_examples_and_round_trip() {
    let empty = export_text(&Circuit::new(0)).unwrap();
    assert_eq!(empty, "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let x = export_text(&circuit(1, vec![Gate::X(0)])).unwrap();
    assert!(x.ends_with("x q[0];\n"));
    let g = circuit(
        4,
        vec![
            Gate::H(0),
            Gate::Rz(1, 0.1 + 0.2),
            Gate::Ry(2, -1e-9),
            Gate::Toffoli { c0: 0, c1: 1, t: 3, kind: ToffoliKind::Compute },
            Gate::Toffoli { c0: 0, c1: 1, t: 3, kind: ToffoliKind::Uncompute },
            Gate::Fredkin { c: 3, a: 1, b: 2 },
            Gate::Cz(0, 2),
        ],
    );
    let back = parse_text(&export_text(&g).unwrap()).unwrap();
    assert_eq!(back.gates, g.gates);
    assert_eq!(back.qubit_count, 4);
    let mcx = circuit(3, vec![Gate::Mcx { controls: vec![(0, true), (1, false)], t: 2 }]);
    assert!(matches!(export_text(&mcx), Err(crate::Error::Unlowered(_))));
    assert!(parse_text("qreg q[1];\nfoo q[0];").is_err());
    assert!((parse_text("qreg q[1]; rz(-pi/4) q[0];").unwrap().gates[0] == Gate::Rz(0, -std::f64::consts::FRAC_PI_4)));
}

#[test]
fn controlled_push_matches_reference() {
    // Every single-qubit kind, controlled on qubits 0 (positive) and 1 (negative).
    let kinds = [
        Gate::H(2),
        Gate::X(2),
        Gate::Y(2),
        Gate::Z(2),
        Gate::S(2),
        Gate::Sdg(2),
        Gate::T(2),
        Gate::Tdg(2),
        Gate::Rz(2, 0.7),
        Gate::Ry(2, -1.3),
        Gate::Cz(2, 3),
        Gate::Swap(2, 3),
        Gate::Cnot { c: 3, t: 2 },
    ];
    for g in kinds {
        let mut b = Builder::new();
        b.register("q", 4, Role::System);
        b.push_controlled(&g, &[(0, true), (1, false)]);
        let built = b.finish();
        let base = unitary(&circuit(4, vec![g.clone()])).unwrap();
        let mut want = DMatrix::<Complex64>::identity(16, 16);
        for col in 0..16usize {
            if col & 1 == 1 && col & 2 == 0 {
                for row in 0..16 {
                    want[(row, col)] = base[(row, col)];
                }
            }
        }
        let n = built.qubit_count;
        let u = projected_block(&built, &(4..n).collect::<Vec<_>>()).unwrap();
        assert!(max_dev(&u, &want) < 1e-12, "{g:?}");
    }
}

#[test]
fn compose_tensor_adjoint() {
    let a = circuit(2, vec![Gate::T(0), Gate::Cnot { c: 0, t: 1 }]);
    assert_eq!(a.adjoint().adjoint(), a);
    let b = circuit(1, vec![Gate::S(0)]);
    assert_eq!(Circuit::tensor(&a, &b).qubit_count, 3);
    let ca = Circuit::compose(&a, &a.adjoint());
    assert!(max_dev(&unitary(&ca).unwrap(), &DMatrix::identity(4, 4)) < 1e-14);
}

fn arb_gate(n: usize) -> impl Strategy<Value = Gate> {
    let q = 0..n;
    prop_oneof![
        q.clone().prop_map(Gate::H),
        q.clone().prop_map(Gate::T),
        q.clone().prop_map(Gate::S),
        q.clone().prop_map(Gate::Y),
        (q.clone(), -3.0..3.0f64).prop_map(|(q, a)| Gate::Rz(q, a)),
        (q.clone(), -3.0..3.0f64).prop_map(|(q, a)| Gate::Ry(q, a)),
        proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 2).prop_shuffle().prop_map(|v| Gate::Cnot { c: v[0], t: v[1] }),
        proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 3)
            .prop_shuffle()
            .prop_map(|v| Gate::Toffoli { c0: v[0], c1: v[1], t: v[2], kind: ToffoliKind::Plain }),
        proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 4)
            .prop_shuffle()
            .prop_map(|v| Gate::Mcx { controls: vec![(v[0], true), (v[1], false), (v[2], true)], t: v[3] }),
        proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 3)
            .prop_shuffle()
            .prop_map(|v| Gate::Fredkin { c: v[0], a: v[1], b: v[2] }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn norm_is_preserved(gates in proptest::collection::vec(arb_gate(5), 0..40), start in 0u64..32) {
        let circ = circuit(5, gates);
        let s = apply(&circ, &SparseState::basis(5, [start, 0, 0, 0])).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn circuit_then_adjoint_is_identity(gates in proptest::collection::vec(arb_gate(5), 0..30), start in 0u64..32) {
        let circ = circuit(5, gates);
        let both = Circuit::compose(&circ, &circ.adjoint());
        let init = SparseState::basis(5, [start, 0, 0, 0]);
        let s = apply(&both, &init).unwrap();
        prop_assert!(s.max_diff(&init) < 1e-10);
    }

    #[test]
    fn lowering_preserves_unitary(gates in proptest::collection::vec(arb_gate(5), 0..12)) {
        let circ = circuit(5, gates);
        for m in [CostModel::Deterministic7T, CostModel::AndGadget4T] {
            prop_assert!(lowered_matches(&circ, &lower(&circ, m)) < 1e-10);
        }
    }

    #[test]
    fn counts_are_additive_and_rename_invariant(
        a in proptest::collection::vec(arb_gate(5), 0..15),
        b in proptest::collection::vec(arb_gate(5), 0..15),
    ) {
        let (ca, cb) = (circuit(5, a), circuit(5, b));
        for m in [CostModel::Deterministic7T, CostModel::AndGadget4T] {
            let ra = count_resources(&ca, m);
            let rb = count_resources(&cb, m);
            let rab = count_resources(&Circuit::compose(&ca, &cb), m);
            prop_assert_eq!(rab.t_count, ra.t_count + rb.t_count);
            prop_assert_eq!(rab.clifford_count, ra.clifford_count + rb.clifford_count);
            prop_assert_eq!(rab.toffoli_count, ra.toffoli_count + rb.toffoli_count);
            let renamed = Circuit { qubit_count: 5, registers: Vec::new(), gates: ca.gates.iter().map(|g| g.remap(&|q| 4 - q)).collect() };
            let rr = count_resources(&renamed, m);
            prop_assert_eq!((rr.t_count, rr.t_depth, rr.clifford_count), (ra.t_count, ra.t_depth, ra.clifford_count));
        }
    }

    #[test]
    fn qasm_round_trip(gates in proptest::collection::vec(arb_gate(5), 0..30)) {
        let circ = lower(&circuit(5, gates), CostModel::AndGadget4T);
        let back = parse_text(&export_text(&circ).unwrap()).unwrap();
        prop_assert_eq!(back.gates, circ.gates);
    }
}
