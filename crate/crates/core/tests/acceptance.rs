//! Acceptance run: one line per criterion, each with a pinned time limit.
//!
//! Run with `cargo test -p rectstack-core --test acceptance`.

use std::time::{Duration, Instant};

use rectstack::concat::{
    concatenate, verify_832_gates, verify_code832, verify_colorcode_distance, verify_concatenation,
};
use rectstack::css::brute_distance_both;
use rectstack::fixture::{match_fixture_d2, verify_permutation, FixtureD2};
use rectstack::planar::{build_2d, Picture};
use rectstack::sim::{verify_ccz_injection, verify_teleported_h};
use rectstack::stack::verify_counts;
use rectstack::surgery::{merge_2d3d, merge_stacks, sheet_for_merge, simulate_merge_mapping, split_stack};
use rectstack::transversal::{
    ccz_phase_exhaustive, ccz_phase_sampled, color_pairs, corner_structure_check, cz_phase_check,
    pairwise_overlap_check,
};
use rectstack::{build_cubic_stack, Color, PauliType, Result, Side};

const SAMPLES: usize = 100_000;
const SEED: u64 = 2024;

type Outcome = Result<(bool, String)>;
type Criterion = (&'static str, u64, fn() -> Outcome);

fn fixture_equality() -> Outcome {
    let s = build_cubic_stack(2)?;
    let perm = match_fixture_d2(&s)?;
    let exact = verify_permutation(&s.codes, &FixtureD2::load().codes()?, &perm);
    Ok((exact, format!("permutation {perm:?}")))
}

fn counting() -> Outcome {
    let mut ok = true;
    let mut ns = Vec::new();
    for d in 2..=5 {
        let s = build_cubic_stack(d)?;
        ok &= verify_counts(&s).passed();
        ns.push(s.n());
    }
    Ok((ok, format!("n = {ns:?}")))
}

fn ccz_exhaustive() -> Outcome {
    let t = ccz_phase_exhaustive(&build_cubic_stack(2)?)?;
    let full = t.exhaustive && t.entries.iter().all(|e| e.checked == 1024);
    let phases: Vec<i8> = t.entries.iter().map(|e| e.phase).collect();
    Ok((full && t.matches_ccz(), format!("phases {phases:?}")))
}

fn ccz_structural() -> Outcome {
    let mut ok = true;
    let mut pairs = 0;
    for d in 2..=4 {
        let s = build_cubic_stack(d)?;
        let w = pairwise_overlap_check(&s);
        pairs += w.len();
        ok &= w.iter().all(|w| w.member) && corner_structure_check(&s).passed();
    }
    Ok((ok, format!("{pairs} generator pairs")))
}

fn ccz_sampled() -> Outcome {
    let t = ccz_phase_sampled(&build_cubic_stack(3)?, SAMPLES, SEED)?;
    let counted = t.entries.iter().all(|e| e.checked == SAMPLES as u64);
    Ok((
        counted && t.matches_ccz(),
        format!("{} samples, seed {SEED}", t.total_checked()),
    ))
}

fn cz() -> Outcome {
    let s = build_cubic_stack(2)?;
    let mut ok = true;
    for pair in color_pairs() {
        let t = cz_phase_check(&s, pair, Side::Low)?;
        ok &= t.exhaustive && t.matches_cz(pair);
    }
    Ok((ok, "all three pairs, exhaustive".into()))
}

fn surgery_3d() -> Outcome {
    let s = build_cubic_stack(3)?;
    let m = merge_stacks(&s, &s, Color::G)?;
    let g = &m.deltas[Color::G.index()];
    let k_one = Color::ALL.iter().all(|&c| m.merged.code(c).k() == 1);
    let split = split_stack(&m)?;
    let ok = m.new_qubits.len() == 12 && g.new_independent == 13 && k_one && m.report.passed() && split.report.passed();
    Ok((
        ok,
        format!(
            "{} new qubits, {} new generators",
            m.new_qubits.len(),
            g.new_independent
        ),
    ))
}

fn surgery_2d3d() -> Outcome {
    let s = build_cubic_stack(3)?;
    let sheet = sheet_for_merge(&s, Color::B)?;
    let m = merge_2d3d(&sheet, &s, Color::B)?;
    let grown: Vec<(usize, usize)> = m.modified_stack_x.iter().map(|&(_, a, b)| (a, b)).collect();
    let ok = m.ancillas.len() == 3 && m.new_z.len() == 4 && m.merged.k() == 1 && grown == [(3, 5)] && m.report.passed();
    Ok((
        ok,
        format!(
            "{} ancillas, {} new Z checks, stack X growth {grown:?}",
            m.ancillas.len(),
            m.new_z.len()
        ),
    ))
}

fn mapping() -> Outcome {
    let z = simulate_merge_mapping(2, PauliType::Z)?;
    let x = simulate_merge_mapping(2, PauliType::X)?;
    Ok((
        z.passed() && x.passed(),
        format!("{} checks", z.checks.len() + x.checks.len()),
    ))
}

fn concatenation() -> Outcome {
    let s = build_cubic_stack(2)?;
    let cc = concatenate(&s)?;
    let ok = verify_concatenation(&s, &cc).passed() && verify_colorcode_distance(&cc, 3)?.passed();
    Ok((
        ok,
        format!(
            "n = {}, generators = {}, k = {}",
            cc.code.n,
            cc.code.rank_x() + cc.code.rank_z(),
            cc.code.k()
        ),
    ))
}

fn circuits() -> Outcome {
    let reports = [verify_teleported_h()?, verify_832_gates()?, verify_ccz_injection()?];
    let checks: usize = reports.iter().map(|r| r.checks.len()).sum();
    Ok((reports.iter().all(|r| r.passed()), format!("{checks} checks")))
}

fn distances() -> Outcome {
    let s = build_cubic_stack(2)?;
    let mut ok = true;
    for c in Color::ALL {
        let code = s.code(c);
        ok &= (code.n, code.k(), brute_distance_both(code, 4)?) == (12, 1, Some(2));
    }
    for (picture, n) in [(Picture::Rotated, 9), (Picture::Kitaev, 13)] {
        let code = build_2d(3, picture)?;
        ok &= (code.n, code.k(), brute_distance_both(&code, 4)?) == (n, 1, Some(3));
    }
    ok &= verify_code832()?.passed();
    Ok((ok, "[[12,1,2]] x3, [[9,1,3]], [[13,1,3]], [[8,3,2]]".into()))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("fixture equality", 1, fixture_equality),
        ("counting formulas d=2..5", 30, counting),
        ("transversal CCZ exhaustive d=2", 5, ccz_exhaustive),
        ("transversal CCZ structure d=2..4", 60, ccz_structural),
        ("transversal CCZ sampled d=3", 60, ccz_sampled),
        ("transversal CZ d=2", 5, cz),
        ("3D-3D surgery d=3", 60, surgery_3d),
        ("2D-3D surgery d=3", 10, surgery_2d3d),
        ("merge state mapping", 5, mapping),
        ("concatenation d=2", 600, concatenation),
        ("circuit oracles", 10, circuits),
        ("brute-force distances", 60, distances),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(limit);
        let (pass, detail) = match outcome {
            Ok((ok, detail)) => (ok && in_time, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "{} {:>2} {name}: {detail} ({:.3} s, limit {limit} s)",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64(),
        );
    }
    println!("{} of 12 criteria passed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
