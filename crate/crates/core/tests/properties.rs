use proptest::prelude::*;

use rectstack::css::{parse_alist, to_alist};
use rectstack::sim::{run, Branch, Circuit, Gate, GateKind, StateVector, TOL};
use rectstack::transversal::ccz_phase_sampled;
use rectstack::{build_cubic_stack, BitVec, CheckMatrix};

fn gate(kind: u8, a: usize, b: usize, c: usize) -> Gate {
    use GateKind::*;
    match kind % 10 {
        0 => Gate::new(H, &[a]),
        1 => Gate::new(X, &[a]),
        2 => Gate::new(Z, &[a]),
        3 => Gate::new(S, &[a]),
        4 => Gate::new(Sdg, &[a]),
        5 => Gate::new(T, &[a]),
        6 => Gate::new(Tdg, &[a]),
        7 if a != b => Gate::new(CX, &[a, b]),
        8 if a != b => Gate::new(CZ, &[a, b]),
        9 if a != b && b != c && a != c => Gate::new(CCZ, &[a, b, c]),
        _ => Gate::new(H, &[a]),
    }
}

proptest! {
    #[test]
    fn unitary_circuits_keep_the_norm(
        gates in proptest::collection::vec((any::<u8>(), 0usize..4, 0usize..4, 0usize..4), 0..40),
    ) {
        let circuit = Circuit {
            n_qubits: 4,
            gates: gates.into_iter().map(|(k, a, b, c)| gate(k, a, b, c)).collect(),
        };
        let p = StateVector::plus();
        let input = p.tensor(&p).unwrap().tensor(&p.tensor(&p).unwrap()).unwrap();
        let out = run(&circuit, &input, &Branch::Select(vec![])).unwrap();
        prop_assert!((out.state.norm() - 1.0).abs() < TOL);
    }

    #[test]
    fn alist_round_trips(
        rows in proptest::collection::vec(proptest::collection::vec(any::<bool>(), 9), 1..8),
    ) {
        let m = CheckMatrix::from_rows(
            9,
            rows.iter()
                .map(|r| BitVec::from_indices(9, r.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)))
                .collect(),
        )
        .unwrap();
        prop_assert_eq!(parse_alist(&to_alist(&m)).unwrap(), m);
    }
}

#[test]
fn sampled_tables_are_reproducible() {
    let s = build_cubic_stack(3).unwrap();
    let a = ccz_phase_sampled(&s, 500, 7).unwrap();
    let b = ccz_phase_sampled(&s, 500, 7).unwrap();
    assert_eq!(a, b);
    assert!(a.matches_ccz());
}

#[test]
fn stack_alists_round_trip() {
    let s = build_cubic_stack(3).unwrap();
    for code in &s.codes {
        for m in [&code.hx, &code.hz] {
            assert_eq!(&parse_alist(&to_alist(m)).unwrap(), m);
        }
    }
}
