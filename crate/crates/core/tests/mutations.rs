//! Deliberately broken inputs must be caught by the checks.

use rectstack::fixture::{match_fixture_d2, verify_permutation, FixtureD2};
use rectstack::gf2::CheckMatrix;
use rectstack::transversal::{ccz_phase_exhaustive, pairwise_overlap_check};
use rectstack::{build_cubic_stack, build_stack, BitVec, Color, CssCode, Error, LatticeDims};

#[test]
fn dropping_a_flattening_breaks_pair_overlaps() {
    let base = build_cubic_stack(2).unwrap();
    let mut caught = 0;
    for c in Color::ALL {
        let code = base.code(c);
        let Some(drop) = code.hz.rows.iter().position(|r| r.weight() == 2) else {
            continue;
        };
        let mut rows = code.hz.rows.clone();
        let removed = rows.remove(drop);
        let still_spanned = CheckMatrix::from_rows(code.n, rows.clone())
            .unwrap()
            .echelon()
            .contains(&removed);
        let mut s = base.clone();
        let hz = CheckMatrix::from_rows(code.n, rows).unwrap();
        *s.code_mut(c) = CssCode::new(code.label.clone(), code.hx.clone(), hz).unwrap();
        let broken = pairwise_overlap_check(&s).iter().any(|w| !w.member);
        assert_eq!(broken, !still_spanned, "SC_{c}");
        caught += broken as usize;
    }
    assert!(caught > 0);
}

#[test]
fn swapped_labels_fail_the_fixture() {
    let s = build_cubic_stack(2).unwrap();
    let fixture = FixtureD2::load().codes().unwrap();
    let mut perm = match_fixture_d2(&s).unwrap();
    assert!(verify_permutation(&s.codes, &fixture, &perm));
    perm.swap(0, 1);
    assert!(!verify_permutation(&s.codes, &fixture, &perm));
}

#[test]
fn trivial_logical_loses_the_ccz_phase() {
    let mut s = build_cubic_stack(2).unwrap();
    // Moving X_r within its coset leaves the table alone.
    let moved = s.x_bar(Color::R).xor(&s.code(Color::R).hx.rows[0]);
    s.canonical_x[0] = moved;
    assert!(ccz_phase_exhaustive(&s).unwrap().matches_ccz());
    s.canonical_x[0] = BitVec::zeros(s.n());
    let t = ccz_phase_exhaustive(&s).unwrap();
    assert_eq!(t.phase([1, 1, 1]), 1);
}

#[test]
fn bad_dimensions_are_rejected() {
    assert!(matches!(build_cubic_stack(1), Err(Error::InvalidDimension(_))));
    assert!(LatticeDims::new(2, 0, 2).is_err());
    let s = build_stack(LatticeDims::new(2, 3, 2).unwrap()).unwrap();
    assert!(match_fixture_d2(&s).is_err());
}
