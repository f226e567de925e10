mod common;

use std::collections::BTreeMap;

use febe::blockenc::{encode, lcu_combine, verify, BlockEncoding, Boundary, Class, EncodeOptions, LambdaChoice, Manifest, VerifyMode};
use febe::circuit::{unitarity_defect, CostModel};
use febe::fock::{build_matrix_eta, gen_synthetic, HamiltonianSpec, Structure, SyntheticModel};
use febe::resources::sample_spec;
use febe::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-10;

fn opts(m_b: usize) -> EncodeOptions {
    EncodeOptions { m_b, ..EncodeOptions::default() }
}

fn eta_opts(m_b: usize, eta: usize) -> EncodeOptions {
    EncodeOptions { m_b, eta: Some(eta), ..EncodeOptions::default() }
}

fn checked(h: &HamiltonianSpec, class: Class, o: &EncodeOptions) -> BlockEncoding {
    let be = encode(h, class, o).unwrap();
    let r = verify(&be, be.default_mode()).unwrap();
    assert!(r.pass, "{} failed: dev {} budget {}", class.tag(), r.max_abs_dev, r.eps_bound);
    assert!(r.max_abs_dev <= r.eps_bound + TOL);
    be
}

#[test]
fn one_body_full_space_seeds() {
    for seed in 0..5 {
        let h = sample_spec(Class::OneBody, 4, None, None, seed).unwrap();
        let be = checked(&h, Class::OneBody, &opts(5));
        assert_eq!(be.alpha, 16.0);
        assert_eq!(be.eps_budget, 0.0);
    }
}

#[test]
fn number_full_space_seeds() {
    for seed in 0..5 {
        let h = sample_spec(Class::Number, 4, None, None, seed).unwrap();
        let be = checked(&h, Class::Number, &opts(5));
        assert_eq!(be.alpha, 4.0);
    }
}

#[test]
fn eta_one_body_halves_alpha() {
    for seed in 0..5 {
        let h = sample_spec(Class::OneBody, 4, None, None, 100 + seed).unwrap();
        let be = checked(&h, Class::EtaOneBody, &eta_opts(5, 2));
        assert_eq!(be.alpha, 8.0);
        let full = encode(&h, Class::OneBody, &opts(5)).unwrap();
        assert!(be.alpha < full.alpha);
    }
}

#[test]
fn eta_projection_matches_sector_matrix() {
    let h = sample_spec(Class::OneBody, 4, None, None, 7).unwrap();
    let be = encode(&h, Class::EtaOneBody, &eta_opts(5, 2)).unwrap();
    let sector = febe::fock::eta_basis(4, 2);
    let want = build_matrix_eta(&h, 2).unwrap();
    for (c, &col) in sector.iter().enumerate() {
        let got = febe::circuit::project_column(&be.circuit, &be.system_qubits, &be.anc_mask, col).unwrap();
        for (r, &row) in sector.iter().enumerate() {
            let amp = got.iter().find(|e| e.0 == row).map_or(0.0, |e| e.1.re);
            assert!((amp * be.alpha - want[(r, c)]).abs() < TOL);
        }
    }
}

#[test]
fn eta_number_and_factorized() {
    let mut h = HamiltonianSpec::empty(4);
    h.one_body.insert((1, 1), 0.5);
    h.one_body.insert((3, 3), -0.25);
    for eta in 1..=4 {
        let be = checked(&h, Class::EtaNumber, &eta_opts(5, eta));
        assert_eq!(be.alpha, eta.next_power_of_two() as f64);
    }
    let f = sample_spec(Class::Factorized, 4, None, None, 3).unwrap();
    for eta in 1..=4 {
        let be = checked(&f, Class::EtaFactorized, &eta_opts(5, eta));
        assert_eq!(be.alpha, (eta.next_power_of_two() * eta.next_power_of_two()) as f64);
    }
}

#[test]
fn eta_one_body_padded_sectors() {
    let h = sample_spec(Class::OneBody, 4, None, None, 11).unwrap();
    for eta in [1, 3, 4] {
        let be = checked(&h, Class::EtaOneBody, &eta_opts(5, eta));
        assert_eq!(be.alpha, (4 * eta.next_power_of_two()) as f64);
    }
}

#[test]
fn two_body_general_term() {
    let mut h = HamiltonianSpec::empty(4);
    h.two_body.insert((0, 2, 3, 1), 0.75);
    let be = checked(&h, Class::TwoBody, &opts(5));
    assert_eq!(be.alpha, 256.0);
}

#[test]
fn two_body_hermitian_pair() {
    let h = sample_spec(Class::TwoBody, 4, None, None, 5).unwrap();
    let be = checked(&h, Class::TwoBody, &opts(5));
    assert_eq!(be.alpha, 256.0);
}

#[test]
fn factorized_single_pair() {
    let mut h = HamiltonianSpec::empty(4);
    h.two_body.insert((1, 3, 3, 1), -0.5);
    let be = checked(&h, Class::Factorized, &opts(5));
    assert_eq!(be.alpha, 16.0);
}

#[test]
fn factorized_rejects_general_terms() {
    let mut h = HamiltonianSpec::empty(4);
    h.two_body.insert((0, 2, 3, 1), 0.75);
    assert!(encode(&h, Class::Factorized, &opts(5)).is_err());
}

#[test]
fn general_lcu() {
    let h = sample_spec(Class::General, 4, None, None, 9).unwrap();
    let be = checked(&h, Class::General, &opts(5));
    assert_eq!(be.alpha, 16.0 + 256.0);
    assert_eq!(be.meta.parts.len(), 2);
}

fn non_dyadic(seed: u64) -> HamiltonianSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = HamiltonianSpec::empty(4);
    for p in 0..4 {
        for q in p..4 {
            let v: f64 = rng.gen_range(-0.9..0.9);
            h.one_body.insert((p, q), v);
            h.one_body.insert((q, p), v);
        }
    }
    h
}

#[test]
fn quantization_within_budget_and_shrinks() {
    for seed in 0..5 {
        let h = non_dyadic(seed);
        let coarse = encode(&h, Class::OneBody, &opts(5)).unwrap();
        let fine = encode(&h, Class::OneBody, &opts(10)).unwrap();
        let rc = verify(&coarse, VerifyMode::FullSpace).unwrap();
        let rf = verify(&fine, VerifyMode::FullSpace).unwrap();
        assert!(rc.pass && rf.pass);
        assert!(rc.max_abs_dev > 0.0);
        assert!(rc.max_abs_dev >= 2.0 * rf.max_abs_dev, "seed {seed}: {} vs {}", rc.max_abs_dev, rf.max_abs_dev);
    }
}

#[test]
fn large_coefficients_are_prescaled() {
    let mut h = HamiltonianSpec::empty(2);
    h.one_body.insert((0, 1), 3.0);
    h.one_body.insert((1, 0), 3.0);
    let be = checked(&h, Class::OneBody, &opts(5));
    assert_eq!(be.meta.prescale, 4.0);
    assert_eq!(be.alpha, 16.0);
}

#[test]
fn nn_torus_range_one() {
    let mut h = HamiltonianSpec::empty(4);
    h.structure = Structure::NearestNeighbor(1);
    for (p, v) in [0.5, -0.25, 0.75, 0.125].into_iter().enumerate() {
        let q = (p + 1) % 4;
        h.one_body.insert((p, q), v);
        h.one_body.insert((q, p), v);
    }
    let o = EncodeOptions { m: Some(1), boundary: Boundary::Torus, ..opts(5) };
    let be = checked(&h, Class::Nn, &o);
    assert_eq!(be.alpha, 8.0);
}

#[test]
fn nn_open_drops_wrapped_terms() {
    let mut h = HamiltonianSpec::empty(4);
    for p in 0..3 {
        h.one_body.insert((p, p + 1), 0.5);
        h.one_body.insert((p + 1, p), 0.5);
    }
    let o = EncodeOptions { m: Some(1), boundary: Boundary::Open, ..opts(5) };
    checked(&h, Class::Nn, &o);
    h.one_body.insert((0, 3), 0.5);
    assert!(encode(&h, Class::Nn, &o).is_err());
}

#[test]
fn nn_with_diagonal_is_lcu() {
    let mut h = sample_spec(Class::Nn, 4, None, Some(1), 4).unwrap();
    h.one_body.insert((2, 2), 0.5);
    let o = EncodeOptions { m: Some(1), boundary: Boundary::Torus, ..opts(5) };
    let be = checked(&h, Class::Nn, &o);
    assert_eq!(be.alpha, 8.0 + 4.0);
}

#[test]
fn nn_eta_sector() {
    let h = sample_spec(Class::Nn, 4, None, Some(1), 2).unwrap();
    for eta in 1..=3 {
        let o = EncodeOptions { m: Some(1), boundary: Boundary::Torus, eta: Some(eta), ..opts(5) };
        let be = checked(&h, Class::NnEta, &o);
        assert_eq!(be.alpha, (2 * eta.next_power_of_two()) as f64);
    }
}

#[test]
fn nn_range_must_fit() {
    let h = sample_spec(Class::Nn, 4, None, Some(1), 2).unwrap();
    let o = EncodeOptions { m: Some(2), ..opts(5) };
    assert!(encode(&h, Class::Nn, &o).is_err());
}

fn distinct_ti() -> HamiltonianSpec {
    let mut h = HamiltonianSpec::empty(4);
    h.structure = Structure::TranslationInvariant;
    for (d, v) in [(-3, 0.0625), (-2, -0.125), (-1, 0.25), (0, 0.375), (1, -0.5), (2, 0.625), (3, -0.75)] {
        h.ti.t.insert(d, v);
    }
    h
}

#[test]
fn ti_table_has_seven_entries() {
    let be = checked(&distinct_ti(), Class::Ti, &opts(5));
    assert_eq!(be.meta.used_entries, 7);
    assert_eq!(be.meta.distinct_words, 7);
    assert_eq!(be.meta.l, 8);
    assert_eq!(be.alpha, 16.0);
}

#[test]
fn ti_eta_sector() {
    let be = checked(&distinct_ti(), Class::TiEta, &eta_opts(5, 2));
    assert_eq!(be.alpha, 8.0);
    assert_eq!(be.meta.used_entries, 7);
}

#[test]
fn hubbard_chain_is_lcu() {
    let h = gen_synthetic(SyntheticModel::ExtendedHubbard { t: 1.0, u: 0.5, v: 0.25 }, 4, 0).unwrap();
    let be = checked(&h, Class::Ti, &opts(6));
    assert_eq!(be.meta.parts.len(), 3);
    let be = checked(&h, Class::TiEta, &eta_opts(6, 2));
    assert_eq!(be.meta.parts.len(), 3);
}

#[test]
fn ti_rejects_explicit_terms() {
    let mut h = distinct_ti();
    h.one_body.insert((0, 0), 1.0);
    assert!(encode(&h, Class::Ti, &opts(5)).is_err());
}

#[test]
fn lcu_of_explicit_parts() {
    let a = encode(&sample_spec(Class::Number, 4, None, None, 1).unwrap(), Class::Number, &opts(5)).unwrap();
    let b = encode(&sample_spec(Class::Factorized, 4, None, None, 2).unwrap(), Class::Factorized, &opts(5)).unwrap();
    let c = encode(&sample_spec(Class::OneBody, 4, None, None, 3).unwrap(), Class::OneBody, &opts(5)).unwrap();
    let be = lcu_combine(vec![(1.0, a), (0.5, b), (2.0, c)]).unwrap();
    assert_eq!(be.alpha, 4.0 + 8.0 + 32.0);
    let r = verify(&be, VerifyMode::FullSpace).unwrap();
    assert!(r.max_abs_dev < TOL, "{}", r.max_abs_dev);
}

#[test]
fn lcu_rejects_mismatched_systems() {
    let a = encode(&sample_spec(Class::Number, 4, None, None, 1).unwrap(), Class::Number, &opts(5)).unwrap();
    let b = encode(&sample_spec(Class::Number, 2, None, None, 1).unwrap(), Class::Number, &opts(5)).unwrap();
    assert!(matches!(lcu_combine(vec![(1.0, a), (1.0, b)]), Err(Error::RegisterMismatch(_))));
}

#[test]
fn fixed_lambda_is_honored() {
    let h = sample_spec(Class::OneBody, 4, None, None, 0).unwrap();
    for lam in [1, 2, 4, 8, 16] {
        let o = EncodeOptions { lambda: LambdaChoice::Fixed(lam), ..opts(5) };
        let be = checked(&h, Class::OneBody, &o);
        assert_eq!(be.meta.lambda, lam);
    }
}

#[test]
fn verify_rejects_large_systems() {
    let h = sample_spec(Class::Number, 16, None, None, 0).unwrap();
    let be = encode(&h, Class::Number, &opts(5)).unwrap();
    assert!(matches!(verify(&be, VerifyMode::FullSpace), Err(Error::SizeCap { .. })));
}

#[test]
fn bad_inputs_are_rejected() {
    let h = sample_spec(Class::OneBody, 4, None, None, 0).unwrap();
    assert!(encode(&h, Class::OneBody, &opts(1)).is_err());
    assert!(encode(&h, Class::EtaOneBody, &opts(5)).is_err());
    assert!(encode(&h, Class::EtaOneBody, &eta_opts(5, 5)).is_err());
    assert!(encode(&sample_spec(Class::OneBody, 3, None, None, 0).unwrap(), Class::OneBody, &opts(5)).is_err());
    assert!(matches!(Class::parse("three-body"), Err(Error::UnknownClass(_))));
}

#[test]
fn every_class_is_unitary_at_smallest_size() {
    for class in Class::ALL {
        let (n, m) = match class {
            Class::Nn | Class::NnEta => (4, Some(1)),
            _ => (2, None),
        };
        let h = sample_spec(class, n, Some(1), m, 0).unwrap();
        let o = EncodeOptions { m, eta: Some(1), ..opts(3) };
        let be = encode(&h, class, &o).unwrap();
        let d = unitarity_defect(&be.circuit, 64, 1).unwrap();
        assert!(d < TOL, "{}: {d}", class.tag());
    }
}

#[test]
fn manifest_round_trip_and_tamper() {
    let h = sample_spec(Class::OneBody, 4, None, None, 2).unwrap();
    let be = encode(&h, Class::OneBody, &opts(5)).unwrap();
    let man = Manifest::new(&be, &h, CostModel::AndGadget4T).unwrap();
    let text = serde_json::to_string(&man).unwrap();
    let back: Manifest = serde_json::from_str(&text).unwrap();
    assert_eq!(back, man);
    assert!(back.reverify().unwrap().pass);

    let mut bad = back.clone();
    let used = (0..bad.table.words.len()).find(|&l| bad.table.words[l] != 0).unwrap();
    bad.table.words[used] ^= 1 << 1;
    assert!(!bad.reverify().unwrap().pass);
}

#[test]
fn manifests_are_deterministic() {
    let make = || {
        let h = gen_synthetic(SyntheticModel::Hubbard { t: 1.0, u: 0.5 }, 4, 17).unwrap();
        let be = encode(&h, Class::Ti, &opts(6)).unwrap();
        serde_json::to_string(&Manifest::new(&be, &h, CostModel::AndGadget4T).unwrap()).unwrap()
    };
    assert_eq!(make(), make());
}

#[test]
fn structure_tag_survives_manifest() {
    let mut h = sample_spec(Class::Nn, 4, None, Some(1), 0).unwrap();
    h.eta = Some(2);
    let o = EncodeOptions { m: Some(1), boundary: Boundary::Torus, ..opts(5) };
    let be = encode(&h, Class::NnEta, &o).unwrap();
    let man = Manifest::new(&be, &h, CostModel::Deterministic7T).unwrap();
    assert_eq!(man.eta, Some(2));
    assert!(man.reverify().unwrap().pass);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn random_dyadic_one_body_is_exact(vals in proptest::collection::vec(-15i32..=15, 16)) {
        let mut h = HamiltonianSpec::empty(4);
        for (i, &v) in vals.iter().enumerate() {
            if v != 0 {
                h.one_body.insert((i / 4, i % 4), v as f64 / 16.0);
            }
        }
        prop_assume!(!h.one_body.is_empty());
        let be = encode(&h, Class::OneBody, &opts(5)).unwrap();
        let r = verify(&be, VerifyMode::FullSpace).unwrap();
        prop_assert!(r.max_abs_dev < TOL);
    }

    #[test]
    fn random_number_pairs_on_sector(vals in proptest::collection::vec(-7i32..=7, 6), eta in 1usize..=4) {
        let mut pairs = BTreeMap::new();
        let mut k = 0;
        for p in 0..4 {
            for q in p + 1..4 {
                if vals[k] != 0 {
                    pairs.insert((p, q, q, p), vals[k] as f64 / 8.0);
                }
                k += 1;
            }
        }
        prop_assume!(!pairs.is_empty());
        let mut h = HamiltonianSpec::empty(4);
        h.two_body = pairs;
        let be = encode(&h, Class::EtaFactorized, &eta_opts(4, eta)).unwrap();
        let r = verify(&be, VerifyMode::EtaSector(eta)).unwrap();
        prop_assert!(r.max_abs_dev < TOL);
    }
}
