mod common;

use common::max_abs_diff;
use proptest::prelude::*;
use umt_core::circuit::{
    attach_observable, build_circuit, build_prop1, circuit_unitary, controlled_action, export_circuit, imaginary_mode,
    parse_circuit, Circuit, CircuitMeta, ExportFormat, Proposition,
};
use umt_core::oracle::shift_matrix;
use umt_core::qstate::{kron_all, CMatrix, Pauli, PauliString};
use umt_core::schedule::{max_ancillas, SchedulePolicy};

const PROPS: [Proposition; 2] = [Proposition::Sequential, Proposition::Parallel];
const POLICIES: [SchedulePolicy; 2] = [SchedulePolicy::Greedy, SchedulePolicy::LayerRestricted];

fn all_ones(c: &Circuit) -> usize {
    (1 << c.ancillas().len()) - 1
}

fn all_strings(n: usize) -> Vec<PauliString> {
    let letters = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    (0..4usize.pow(n as u32))
        .map(|mut k| {
            let mut ls = Vec::new();
            for _ in 0..n {
                ls.push(letters[k % 4]);
                k /= 4;
            }
            PauliString::new(ls)
        })
        .collect()
}

/// `P` on register `target` of `m`, identity elsewhere.
fn embedded(p: &PauliString, target: usize, m: usize) -> CMatrix {
    let id = CMatrix::identity(1 << p.n(), 1 << p.n());
    let pm = p.matrix();
    let factors: Vec<&CMatrix> = (1..=m).map(|r| if r == target { &pm } else { &id }).collect();
    kron_all(factors)
}

#[test]
fn controlled_block_is_the_cyclic_shift() {
    for m in 2..=4 {
        for n in 1..=2 {
            let s_mat = shift_matrix(m, n).unwrap();
            let identity = CMatrix::identity(s_mat.nrows(), s_mat.ncols());
            for s in 1..=max_ancillas(m) {
                for proposition in PROPS {
                    for policy in POLICIES {
                        let c = build_circuit(CircuitMeta { m, n, s, proposition, policy }).unwrap().without_prep();
                        let on = controlled_action(&c, all_ones(&c)).unwrap();
                        assert!(max_abs_diff(&on, &s_mat) < 1e-10, "m={m} n={n} s={s} {proposition:?} {policy}");
                        let off = controlled_action(&c, 0).unwrap();
                        assert!(max_abs_diff(&off, &identity) < 1e-10);
                    }
                }
            }
        }
    }
}

#[test]
fn controlled_block_with_observable_is_pauli_times_shift() {
    for m in 2..=4 {
        for n in 1..=2 {
            let s_mat = shift_matrix(m, n).unwrap();
            for s in 1..=max_ancillas(m) {
                for proposition in PROPS {
                    let base = build_circuit(CircuitMeta { m, n, s, proposition, policy: SchedulePolicy::Greedy }).unwrap();
                    for p in all_strings(n) {
                        for target in [1, m] {
                            let c = attach_observable(&base, &p, target).unwrap().without_prep();
                            let on = controlled_action(&c, all_ones(&c)).unwrap();
                            let expected = embedded(&p, target, m) * &s_mat;
                            assert!(max_abs_diff(&on, &expected) < 1e-10, "m={m} n={n} s={s} {proposition:?} {p} @{target}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn full_unitary_is_unitary() {
    let c = build_prop1(4, 1, 2, SchedulePolicy::Greedy).unwrap();
    let c = imaginary_mode(&attach_observable(&c, &"Y".parse().unwrap(), 2).unwrap());
    let u = circuit_unitary(&c).unwrap();
    let id = CMatrix::identity(u.nrows(), u.ncols());
    assert!(max_abs_diff(&(u.adjoint() * &u), &id) < 1e-12);
}

#[test]
fn wide_circuits_rejected_by_dense_unitary() {
    let c = build_prop1(12, 1, 1, SchedulePolicy::Greedy).unwrap();
    assert!(circuit_unitary(&c).is_err());
}

#[test]
fn sequential_five_copy_export_matches_golden() {
    let c = build_prop1(5, 2, 2, SchedulePolicy::Greedy).unwrap();
    let c = attach_observable(&c, &"ZI".parse().unwrap(), 1).unwrap();
    let text = export_circuit(&c, ExportFormat::Text);
    assert_eq!(text, include_str!("data/prop1_m5_n2_s2_zi.txt"));
    assert_eq!(parse_circuit(&text).unwrap(), c);
}

fn arb_circuit() -> impl Strategy<Value = Circuit> {
    (2usize..=7, 1usize..=3)
        .prop_flat_map(|(m, n)| {
            (
                Just(m),
                Just(n),
                1..=max_ancillas(m),
                prop::bool::ANY,
                prop::bool::ANY,
                prop::collection::vec(0usize..4, n),
                1..=m,
                prop::bool::ANY,
            )
        })
        .prop_map(|(m, n, s, parallel, layered, letters, target, phase)| {
            let proposition = if parallel { Proposition::Parallel } else { Proposition::Sequential };
            let policy = if layered { SchedulePolicy::LayerRestricted } else { SchedulePolicy::Greedy };
            let c = build_circuit(CircuitMeta { m, n, s, proposition, policy }).unwrap();
            let p = PauliString::new(letters.iter().map(|&k| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][k]).collect());
            let c = attach_observable(&c, &p, target).unwrap();
            if phase {
                imaginary_mode(&c)
            } else {
                c
            }
        })
}

proptest! {
    #[test]
    fn text_export_round_trips(c in arb_circuit()) {
        let text = export_circuit(&c, ExportFormat::Text);
        prop_assert_eq!(parse_circuit(&text).unwrap(), c);
    }
}
