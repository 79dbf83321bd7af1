//! The explicit distance-2 stack and a permutation search against it.

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::bits::BitVec;
use crate::color::Color;
use crate::css::{enumerate_group, CosetGroup, CssCode, PauliType};
use crate::error::{Error, Result};
use crate::gf2::{same_span, CheckMatrix, Echelon};
use crate::stack::{code_label, Stack};

const FIXTURE_JSON: &str = include_str!("../data/fixture_d2.json");

#[derive(Clone, Debug, Deserialize)]
pub struct FixtureCode {
    pub x: Vec<Vec<usize>>,
    pub z: Vec<Vec<usize>>,
    pub logical_x: Vec<usize>,
    pub logical_z: Vec<usize>,
}

/// Stabilizer generators with 1-based qubit labels.
#[derive(Clone, Debug, Deserialize)]
pub struct FixtureD2 {
    pub n: usize,
    pub codes: BTreeMap<Color, FixtureCode>,
}

fn zero_based(n: usize, labels: &[usize]) -> BitVec {
    BitVec::from_indices(n, labels.iter().map(|l| l - 1))
}

impl FixtureD2 {
    pub fn load() -> Self {
        serde_json::from_str(FIXTURE_JSON).expect("bundled fixture parses")
    }

    pub fn code(&self, c: Color) -> Result<CssCode> {
        let f = &self.codes[&c];
        let rows = |sets: &[Vec<usize>]| sets.iter().map(|s| zero_based(self.n, s)).collect();
        let code = CssCode::new(
            code_label(c),
            CheckMatrix::from_rows(self.n, rows(&f.x))?,
            CheckMatrix::from_rows(self.n, rows(&f.z))?,
        )?;
        code.with_logicals(
            vec![zero_based(self.n, &f.logical_x)],
            vec![zero_based(self.n, &f.logical_z)],
        )
    }

    pub fn codes(&self) -> Result<[CssCode; 3]> {
        Ok([self.code(Color::R)?, self.code(Color::G)?, self.code(Color::B)?])
    }
}

/// Per-group weights of span elements, used to prune the permutation search.
struct Profile {
    n: usize,
    single: Vec<Vec<Vec<u16>>>,
    pair: Vec<Vec<Vec<Vec<u16>>>>,
}

fn span_elements(n: usize, rows: &[BitVec]) -> Result<Vec<BitVec>> {
    let g = CosetGroup::new(n, Echelon::from_rows(n, rows).rows().to_vec(), None)?;
    Ok(enumerate_group(&g)?.collect())
}

impl Profile {
    fn new(codes: &[CssCode; 3]) -> Result<Self> {
        let n = codes[0].n;
        let mut single = vec![Vec::new(); n];
        let mut pair = vec![vec![Vec::new(); n]; n];
        for code in codes {
            for ty in [PauliType::X, PauliType::Z] {
                let elems = span_elements(n, &code.checks(ty).rows)?;
                let mut s = vec![Vec::new(); n];
                let mut p = vec![vec![Vec::new(); n]; n];
                for e in &elems {
                    let w = e.weight() as u16;
                    let sup = e.support();
                    for &a in &sup {
                        s[a].push(w);
                        for &b in &sup {
                            p[a][b].push(w);
                        }
                    }
                }
                for a in 0..n {
                    s[a].sort_unstable();
                    single[a].push(std::mem::take(&mut s[a]));
                    for b in 0..n {
                        p[a][b].sort_unstable();
                        pair[a][b].push(std::mem::take(&mut p[a][b]));
                    }
                }
            }
        }
        Ok(Self { n, single, pair })
    }
}

/// Checks that `source` relabelled by `perm` has exactly the stabilizer
/// groups of `target`, with logicals in the same cosets.
pub fn verify_permutation(source: &[CssCode; 3], target: &[CssCode; 3], perm: &[usize]) -> bool {
    source.iter().zip(target).all(|(s, t)| {
        let m = s.remap(perm, t.n);
        let spans = same_span(t.n, &m.hx.rows, &t.hx.rows) && same_span(t.n, &m.hz.rows, &t.hz.rows);
        let coset = |mine: &[BitVec], theirs: &[BitVec], stab: &CheckMatrix| {
            let e = stab.echelon();
            mine.len() == theirs.len() && mine.iter().zip(theirs).all(|(a, b)| e.contains(&a.xor(b)))
        };
        spans && coset(&m.logical_x, &t.logical_x, &t.hx) && coset(&m.logical_z, &t.logical_z, &t.hz)
    })
}

/// Finds `perm` with `perm[source qubit] = target qubit` identifying the two stacks.
pub fn match_codes(source: &[CssCode; 3], target: &[CssCode; 3]) -> Result<Vec<usize>> {
    let n = target[0].n;
    if source.iter().chain(target).any(|c| c.n != n) {
        return Err(Error::FixtureMismatch("qubit counts differ".into()));
    }
    let ps = Profile::new(source)?;
    let pt = Profile::new(target)?;
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];
    if search(0, &ps, &pt, &mut perm, &mut used, source, target) {
        Ok(perm)
    } else {
        Err(Error::FixtureMismatch(
            "no qubit relabelling identifies the generated stabilizer groups with the fixture".into(),
        ))
    }
}

fn search(
    q: usize,
    ps: &Profile,
    pt: &Profile,
    perm: &mut Vec<usize>,
    used: &mut Vec<bool>,
    source: &[CssCode; 3],
    target: &[CssCode; 3],
) -> bool {
    if q == ps.n {
        return verify_permutation(source, target, perm);
    }
    for t in 0..pt.n {
        if used[t] || ps.single[q] != pt.single[t] {
            continue;
        }
        if (0..q).any(|p| ps.pair[q][p] != pt.pair[t][perm[p]]) {
            continue;
        }
        perm[q] = t;
        used[t] = true;
        if search(q + 1, ps, pt, perm, used, source, target) {
            return true;
        }
        used[t] = false;
    }
    perm[q] = usize::MAX;
    false
}

/// Relabelling from generated vertex indices to 0-based fixture labels.
pub fn match_fixture_d2(stack: &Stack) -> Result<Vec<usize>> {
    if stack.d() != Some(2) {
        return Err(Error::DimensionMismatch(format!(
            "fixture matching needs a distance-2 stack, got {}",
            stack.dims()
        )));
    }
    match_codes(&stack.codes, &FixtureD2::load().codes()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stack::build_cubic_stack;

    #[test]
    fn fixture_counts() {
        let f = FixtureD2::load();
        let codes = f.codes().unwrap();
        for (code, (nx, nz)) in codes.iter().zip([(3, 8), (4, 7), (3, 8)]) {
            assert_eq!(code.hx.len(), nx);
            assert_eq!(code.hz.len(), nz);
            assert_eq!(code.k(), 1);
        }
    }

    #[test]
    fn fixture_matches_itself_by_identity() {
        let codes = FixtureD2::load().codes().unwrap();
        let perm = match_codes(&codes, &codes).unwrap();
        assert_eq!(perm, (0..12).collect::<Vec<_>>());
    }

    #[test]
    fn generated_stack_matches() {
        let s = build_cubic_stack(2).unwrap();
        let perm = match_fixture_d2(&s).unwrap();
        // Printed labels are counted from the top chequerboard layer down.
        assert_eq!(perm, vec![8, 10, 9, 11, 4, 5, 7, 6, 0, 2, 1, 3]);
    }

    #[test]
    fn deleted_generator_fails() {
        let s = build_cubic_stack(2).unwrap();
        let mut codes = FixtureD2::load().codes().unwrap();
        codes[1].hz.rows.remove(0);
        assert!(matches!(match_codes(&s.codes, &codes), Err(Error::FixtureMismatch(_))));
    }
}
