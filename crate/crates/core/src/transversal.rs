//! Phase bookkeeping for transversal CCZ and CZ on a stack.
//!
//! A logical basis state `|a b c>` of the three codes is a uniform
//! superposition over `t in G_a^r`, `u in G_b^g`, `v in G_c^b`, where
//! `G_a^c = a X_c + span(Hx of SC_c)`. Transversal CCZ multiplies each term
//! by `(-1)^{|t.u.v|}`, so the logical phase is well defined exactly when
//! that parity is constant over the whole product of cosets.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bits::BitVec;
use crate::color::Color;
use crate::css::{enumerate_group, CosetGroup};
use crate::error::{Error, Result};
use crate::report::Report;
use crate::stack::{Side, Stack};

/// Largest number of coset triples walked exhaustively per basis state.
pub const EXHAUSTIVE_LIMIT_LOG2: usize = 20;
pub const DEFAULT_SAMPLES: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PhaseEntry {
    /// Logical bits in r, g, b order.
    pub bits: [u8; 3],
    pub phase: i8,
    pub checked: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PhaseTable {
    pub entries: Vec<PhaseEntry>,
    pub exhaustive: bool,
    pub seed: Option<u64>,
}

impl PhaseTable {
    pub fn phase(&self, bits: [u8; 3]) -> i8 {
        self.entries.iter().find(|e| e.bits == bits).map(|e| e.phase).unwrap()
    }

    /// `-1` exactly on `|111>`.
    pub fn matches_ccz(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.phase == if e.bits == [1, 1, 1] { -1 } else { 1 })
    }

    /// `-1` exactly when both bits of the pair are set.
    pub fn matches_cz(&self, pair: (Color, Color)) -> bool {
        self.entries.iter().all(|e| {
            let both = e.bits[pair.0.index()] == 1 && e.bits[pair.1.index()] == 1;
            e.phase == if both { -1 } else { 1 }
        })
    }

    pub fn total_checked(&self) -> u64 {
        self.entries.iter().map(|e| e.checked).sum()
    }
}

pub fn basis_states() -> Vec<[u8; 3]> {
    (0..8u8).map(|i| [(i >> 2) & 1, (i >> 1) & 1, i & 1]).collect()
}

/// `bit * X_c + span(independent X generators of SC_c)`.
pub fn coset(stack: &Stack, c: Color, bit: u8) -> CosetGroup {
    let code = stack.code(c);
    let shift = (bit == 1).then(|| stack.x_bar(c).clone());
    CosetGroup::from_generators(code.n, &code.hx.rows, shift).expect("generators have code length")
}

fn x_rank_sum(stack: &Stack, colors: &[Color]) -> usize {
    colors.iter().map(|&c| stack.code(c).rank_x()).sum()
}

fn mixed(state: [u8; 3], what: &str) -> Error {
    Error::TheoremViolation(format!("mixed {what} parity within basis state {:?}", state))
}

fn phase_of(parity: bool) -> i8 {
    if parity {
        -1
    } else {
        1
    }
}

/// Walks every coset triple for each of the eight basis states.
pub fn ccz_phase_exhaustive(stack: &Stack) -> Result<PhaseTable> {
    let dim = x_rank_sum(stack, &Color::ALL);
    if dim > 24 {
        return Err(Error::Budget {
            what: "coset triples per basis state",
            needed: 2f64.powi(dim as i32),
            limit: 2f64.powi(24),
        });
    }
    let entries = basis_states()
        .into_par_iter()
        .map(|bits| -> Result<PhaseEntry> {
            let [gr, gg, gb] = [Color::R, Color::G, Color::B].map(|c| coset(stack, c, bits[c.index()]));
            let vs: Vec<BitVec> = enumerate_group(&gb)?.collect();
            let mut seen: Option<bool> = None;
            let mut checked = 0u64;
            for t in enumerate_group(&gr)? {
                for u in enumerate_group(&gg)? {
                    let tu = t.and(&u);
                    for v in &vs {
                        let p = tu.overlap(v) % 2 == 1;
                        checked += 1;
                        match seen {
                            None => seen = Some(p),
                            Some(s) if s != p => return Err(mixed(bits, "triple-overlap")),
                            _ => {}
                        }
                    }
                }
            }
            Ok(PhaseEntry {
                bits,
                phase: phase_of(seen.unwrap()),
                checked,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PhaseTable {
        entries,
        exhaustive: true,
        seed: None,
    })
}

fn state_seed(seed: u64, bits: [u8; 3]) -> u64 {
    seed ^ ((bits[0] as u64) << 2 | (bits[1] as u64) << 1 | bits[2] as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Draws `samples` uniform coset triples per basis state.
pub fn ccz_phase_sampled(stack: &Stack, samples: usize, seed: u64) -> Result<PhaseTable> {
    let entries = basis_states()
        .into_par_iter()
        .map(|bits| -> Result<PhaseEntry> {
            let [gr, gg, gb] = [Color::R, Color::G, Color::B].map(|c| coset(stack, c, bits[c.index()]));
            let mut rng = ChaCha8Rng::seed_from_u64(state_seed(seed, bits));
            let mut seen: Option<bool> = None;
            for _ in 0..samples {
                let (t, u, v) = (gr.sample(&mut rng), gg.sample(&mut rng), gb.sample(&mut rng));
                let p = t.triple_overlap(&u, &v) % 2 == 1;
                match seen {
                    None => seen = Some(p),
                    Some(s) if s != p => {
                        return Err(Error::TheoremViolation(format!(
                            "basis state {bits:?}: triple t={} u={} v={} breaks the parity",
                            t.to_hex(),
                            u.to_hex(),
                            v.to_hex()
                        )))
                    }
                    _ => {}
                }
            }
            Ok(PhaseEntry {
                bits,
                phase: phase_of(seen.unwrap_or(false)),
                checked: samples as u64,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PhaseTable {
        entries,
        exhaustive: false,
        seed: Some(seed),
    })
}

/// Exhaustive when small enough, sampled otherwise.
pub fn ccz_phase(stack: &Stack, samples: usize, seed: u64) -> Result<PhaseTable> {
    if x_rank_sum(stack, &Color::ALL) <= EXHAUSTIVE_LIMIT_LOG2 {
        ccz_phase_exhaustive(stack)
    } else {
        ccz_phase_sampled(stack, samples, seed)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OverlapWitness {
    pub colors: (Color, Color),
    pub rows: (usize, usize),
    pub overlap: BitVec,
    pub member: bool,
}

pub fn color_pairs() -> [(Color, Color); 3] {
    [(Color::R, Color::G), (Color::R, Color::B), (Color::G, Color::B)]
}

/// Every cross-colour pair of X generators overlaps on a Z stabilizer of the third code.
pub fn pairwise_overlap_check(stack: &Stack) -> Vec<OverlapWitness> {
    color_pairs()
        .into_par_iter()
        .flat_map_iter(|(a, b)| {
            let third = stack.code(Color::third(a, b)).hz.echelon();
            let (ra, rb) = (&stack.code(a).hx.rows, &stack.code(b).hx.rows);
            let mut out = Vec::with_capacity(ra.len() * rb.len());
            for (i, x) in ra.iter().enumerate() {
                for (j, y) in rb.iter().enumerate() {
                    let overlap = x.and(y);
                    let member = third.contains(&overlap);
                    out.push(OverlapWitness {
                        colors: (a, b),
                        rows: (i, j),
                        overlap,
                        member,
                    });
                }
            }
            out
        })
        .collect()
}

/// Pairwise canonical X overlaps are Z logicals of the third code; all three meet once.
pub fn corner_structure_check(stack: &Stack) -> Report {
    let mut r = Report::new("corner structure");
    let lat = &stack.lattice;
    for (a, b) in color_pairs() {
        let c = Color::third(a, b);
        let o = stack.x_bar(a).and(stack.x_bar(b));
        let code = stack.code(c);
        let axis = c.axis();
        let (lo, hi) = lat.dims.range(axis);
        let coords: Vec<_> = o.iter_ones().map(|i| lat.vertices[i]).collect();
        let spans = coords.iter().any(|v| v.get(axis) == lo) && coords.iter().any(|v| v.get(axis) == hi);
        let straight = coords.windows(2).all(|w| {
            Color::ALL
                .iter()
                .filter(|&&o| o != c)
                .all(|&o| w[0].get(o.axis()) == w[1].get(o.axis()))
        });
        r.check(
            format!("X_{a} & X_{b} is a straight {c}-boundary to {c}-boundary string"),
            spans && straight && o.weight() == lat.dims.along(axis),
            format!("weight {}", o.weight()),
        );
        r.check(
            format!("X_{a} & X_{b} commutes with SC_{c} X checks"),
            code.hx.syndrome(&o).is_zero(),
            "",
        );
        r.check(
            format!("X_{a} & X_{b} anticommutes with X_{c}"),
            o.dot(stack.x_bar(c)),
            "",
        );
        r.check(
            format!("X_{a} & X_{b} is not a SC_{c} Z stabilizer"),
            !code.hz.echelon().contains(&o),
            "",
        );
        if stack.x_side == [Side::Low; 3] {
            r.check(
                format!("X_{a} & X_{b} equals canonical Z_{c}"),
                &o == stack.z_bar(c),
                "",
            );
        }
    }
    let w = stack
        .x_bar(Color::R)
        .triple_overlap(stack.x_bar(Color::G), stack.x_bar(Color::B));
    r.expect_eq("X_r & X_g & X_b weight", w, 1);
    r
}

/// Transversal CZ between `pair` applied on one boundary of the third colour.
///
/// The boundary must be the one holding the third code's canonical X
/// logical; re-select it with [`Stack::with_canonical_x_side`] first.
pub fn cz_phase_check(stack: &Stack, pair: (Color, Color), boundary: Side) -> Result<PhaseTable> {
    cz_phase_check_with(stack, pair, boundary, DEFAULT_SAMPLES, 0)
}

pub fn cz_phase_check_with(
    stack: &Stack,
    pair: (Color, Color),
    boundary: Side,
    samples: usize,
    seed: u64,
) -> Result<PhaseTable> {
    let (a, b) = pair;
    if a == b {
        return Err(Error::Unsupported("CZ needs two distinct colours".into()));
    }
    let c = Color::third(a, b);
    if stack.x_side[c.index()] != boundary {
        return Err(Error::NonCanonicalBoundary(c));
    }
    let xc = stack.x_bar(c).clone();
    let exhaustive = x_rank_sum(stack, &[a, b]) <= EXHAUSTIVE_LIMIT_LOG2;
    let entries = basis_states()
        .into_par_iter()
        .map(|bits| -> Result<(PhaseEntry, bool)> {
            let ga = coset(stack, a, bits[a.index()]);
            let gb = coset(stack, b, bits[b.index()]);
            let mut seen: Option<bool> = None;
            let mut checked = 0u64;
            let mut record = |p: bool| -> Result<()> {
                checked += 1;
                match seen {
                    None => seen = Some(p),
                    Some(s) if s != p => return Err(mixed(bits, "CZ overlap")),
                    _ => {}
                }
                Ok(())
            };
            if exhaustive {
                let us: Vec<BitVec> = enumerate_group(&gb)?.collect();
                for t in enumerate_group(&ga)? {
                    let tx = t.and(&xc);
                    for u in &us {
                        record(tx.overlap(u) % 2 == 1)?;
                    }
                }
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(state_seed(seed, bits));
                for _ in 0..samples {
                    let (t, u) = (ga.sample(&mut rng), gb.sample(&mut rng));
                    record(t.triple_overlap(&u, &xc) % 2 == 1)?;
                }
            }
            Ok((
                PhaseEntry {
                    bits,
                    phase: phase_of(seen.unwrap_or(false)),
                    checked,
                },
                exhaustive,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let table = PhaseTable {
        entries: entries.into_iter().map(|e| e.0).collect(),
        exhaustive,
        seed: (!exhaustive).then_some(seed),
    };
    for bits in basis_states().into_iter().filter(|b| b[c.index()] == 0) {
        let mut flipped = bits;
        flipped[c.index()] = 1;
        if table.phase(bits) != table.phase(flipped) {
            return Err(Error::TheoremViolation(format!(
                "CZ phase depends on the {c} bit at {bits:?}"
            )));
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stack::build_cubic_stack;

    #[test]
    fn d2_exhaustive_table() {
        let s = build_cubic_stack(2).unwrap();
        let t = ccz_phase_exhaustive(&s).unwrap();
        assert!(t.matches_ccz());
        assert!(t.entries.iter().all(|e| e.checked == 1024));
        assert_eq!(t.phase([1, 1, 0]), 1);
        assert_eq!(t.phase([0, 0, 0]), 1);
    }

    #[test]
    fn d2_overlaps_and_corners() {
        let s = build_cubic_stack(2).unwrap();
        let w = pairwise_overlap_check(&s);
        assert_eq!(w.len(), 4 * 3 + 4 * 3 + 3 * 3);
        assert!(w.iter().all(|w| w.member));
        let rep = corner_structure_check(&s);
        assert!(rep.passed(), "{rep}");
        assert_eq!(s.x_bar(Color::R).and(s.x_bar(Color::G)).weight(), 2);
    }

    #[test]
    fn d2_cz() {
        let s = build_cubic_stack(2).unwrap();
        for pair in color_pairs() {
            let t = cz_phase_check(&s, pair, Side::Low).unwrap();
            assert!(t.exhaustive);
            assert!(t.matches_cz(pair), "{pair:?}: {t:?}");
        }
    }

    #[test]
    fn cz_rejects_other_boundary_until_reselected() {
        let s = build_cubic_stack(2).unwrap();
        let pair = (Color::R, Color::G);
        assert!(matches!(
            cz_phase_check(&s, pair, Side::High),
            Err(Error::NonCanonicalBoundary(Color::B))
        ));
        let s = s.with_canonical_x_side(Color::B, Side::High).unwrap();
        assert!(cz_phase_check(&s, pair, Side::High).unwrap().matches_cz(pair));
    }

    #[test]
    fn d3_sampled_small() {
        let s = build_cubic_stack(3).unwrap();
        let t = ccz_phase_sampled(&s, 2000, 11).unwrap();
        assert!(t.matches_ccz());
        assert_eq!(t.seed, Some(11));
    }
}
