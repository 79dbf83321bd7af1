//! Row reduction over GF(2).
//!
//! Every routine pivots on the lowest set index, so reduced forms are
//! deterministic and independent of thread scheduling.

use serde::{Deserialize, Serialize};

use crate::bits::BitVec;
use crate::error::{Error, Result};

/// A list of equal-length rows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckMatrix {
    pub n: usize,
    pub rows: Vec<BitVec>,
}

impl CheckMatrix {
    pub fn new(n: usize) -> Self {
        Self { n, rows: Vec::new() }
    }

    pub fn from_rows(n: usize, rows: Vec<BitVec>) -> Result<Self> {
        for r in &rows {
            if r.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    found: r.len(),
                });
            }
        }
        Ok(Self { n, rows })
    }

    pub fn from_supports(n: usize, supports: &[Vec<usize>]) -> Self {
        Self {
            n,
            rows: supports
                .iter()
                .map(|s| BitVec::from_indices(n, s.iter().copied()))
                .collect(),
        }
    }

    pub fn push(&mut self, row: BitVec) {
        assert_eq!(row.len(), self.n, "row length mismatch");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rank(&self) -> usize {
        rank_gf2(self)
    }

    pub fn echelon(&self) -> Echelon {
        Echelon::from_rows(self.n, &self.rows)
    }

    /// Column `j` as a vector over the rows.
    pub fn column(&self, j: usize) -> BitVec {
        BitVec::from_indices(
            self.rows.len(),
            self.rows.iter().enumerate().filter(|(_, r)| r.get(j)).map(|(i, _)| i),
        )
    }

    pub fn columns(&self) -> Vec<BitVec> {
        let mut cols = vec![BitVec::zeros(self.rows.len()); self.n];
        for (i, r) in self.rows.iter().enumerate() {
            for j in r.iter_ones() {
                cols[j].set(i, true);
            }
        }
        cols
    }

    /// `H v`, one bit per row.
    pub fn syndrome(&self, v: &BitVec) -> BitVec {
        BitVec::from_indices(
            self.rows.len(),
            self.rows.iter().enumerate().filter(|(_, r)| r.dot(v)).map(|(i, _)| i),
        )
    }

    pub fn remap(&self, map: &[usize], n: usize) -> CheckMatrix {
        CheckMatrix {
            n,
            rows: self.rows.iter().map(|r| r.remap(map, n)).collect(),
        }
    }
}

/// Incrementally built row-echelon basis with optional combination tracking.
///
/// Each stored row has a pivot at its lowest set bit, and later rows are
/// zero on the pivots of earlier rows, so one pass in insertion order
/// fully reduces a vector.
#[derive(Clone, Debug)]
pub struct Echelon {
    n: usize,
    rows: Vec<BitVec>,
    pivots: Vec<usize>,
    combos: Option<Vec<BitVec>>,
    inputs: usize,
}

impl Echelon {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            rows: Vec::new(),
            pivots: Vec::new(),
            combos: None,
            inputs: 0,
        }
    }

    pub fn from_rows(n: usize, rows: &[BitVec]) -> Self {
        let mut e = Self::new(n);
        for r in rows {
            e.insert(r.clone());
        }
        e
    }

    /// Records, for every basis row, which inputs were summed to produce it.
    pub fn tracking(n: usize, rows: &[BitVec]) -> Self {
        let mut e = Self::new(n);
        e.combos = Some(Vec::new());
        e.inputs = rows.len();
        for (i, r) in rows.iter().enumerate() {
            let mut v = r.clone();
            let mut combo = BitVec::from_indices(rows.len(), [i]);
            e.reduce_tracked(&mut v, &mut combo);
            if let Some(p) = v.first_one() {
                e.rows.push(v);
                e.pivots.push(p);
                e.combos.as_mut().unwrap().push(combo);
            }
        }
        e
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn reduce_tracked(&self, v: &mut BitVec, combo: &mut BitVec) {
        let combos = self.combos.as_ref().unwrap();
        for ((row, &p), c) in self.rows.iter().zip(&self.pivots).zip(combos) {
            if v.get(p) {
                v.xor_assign(row);
                combo.xor_assign(c);
            }
        }
    }

    /// Residual of `v` after eliminating every pivot.
    pub fn reduce(&self, v: &BitVec) -> BitVec {
        let mut v = v.clone();
        self.reduce_in_place(&mut v);
        v
    }

    pub fn reduce_in_place(&self, v: &mut BitVec) {
        debug_assert_eq!(v.len(), self.n);
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v.get(p) {
                v.xor_assign(row);
            }
        }
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v` to the basis; returns whether it was independent.
    pub fn insert(&mut self, v: BitVec) -> bool {
        assert!(self.combos.is_none(), "insert on a tracking echelon");
        assert_eq!(v.len(), self.n, "row length mismatch");
        let mut v = v;
        self.reduce_in_place(&mut v);
        match v.first_one() {
            Some(p) => {
                self.rows.push(v);
                self.pivots.push(p);
                true
            }
            None => false,
        }
    }

    /// Input rows whose sum is `v`, if any. Only for tracking echelons.
    pub fn express(&self, v: &BitVec) -> Option<BitVec> {
        let mut v = v.clone();
        let mut combo = BitVec::zeros(self.inputs);
        self.reduce_tracked(&mut v, &mut combo);
        v.is_zero().then_some(combo)
    }

    /// Combinations of inputs summing to zero. Only for tracking echelons.
    pub fn dependencies(n: usize, rows: &[BitVec]) -> Vec<BitVec> {
        let mut e = Self::new(n);
        e.combos = Some(Vec::new());
        e.inputs = rows.len();
        let mut deps = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            let mut v = r.clone();
            let mut combo = BitVec::from_indices(rows.len(), [i]);
            e.reduce_tracked(&mut v, &mut combo);
            match v.first_one() {
                Some(p) => {
                    e.rows.push(v);
                    e.pivots.push(p);
                    e.combos.as_mut().unwrap().push(combo);
                }
                None => deps.push(combo),
            }
        }
        deps
    }
}

pub fn rank_gf2(m: &CheckMatrix) -> usize {
    Echelon::from_rows(m.n, &m.rows).rank()
}

pub fn rank_of(n: usize, rows: &[BitVec]) -> usize {
    Echelon::from_rows(n, rows).rank()
}

pub fn in_rowspan(v: &BitVec, m: &CheckMatrix) -> Result<bool> {
    if v.len() != m.n {
        return Err(Error::LengthMismatch {
            expected: m.n,
            found: v.len(),
        });
    }
    Ok(m.echelon().contains(v))
}

/// True iff the two row lists generate the same subspace.
pub fn same_span(n: usize, a: &[BitVec], b: &[BitVec]) -> bool {
    let ea = Echelon::from_rows(n, a);
    let eb = Echelon::from_rows(n, b);
    ea.rank() == eb.rank() && b.iter().all(|r| ea.contains(r))
}

/// Basis of `{x : r·x = 0 for every row r}`.
pub fn kernel(n: usize, rows: &[BitVec]) -> Vec<BitVec> {
    // Fully reduced row echelon form, then read off the free columns.
    let e = Echelon::from_rows(n, rows);
    let mut rref: Vec<BitVec> = e.rows().to_vec();
    let pivots = e.pivots().to_vec();
    for i in (0..rref.len()).rev() {
        for j in 0..rref.len() {
            if j != i && rref[j].get(pivots[i]) {
                let ri = rref[i].clone();
                rref[j].xor_assign(&ri);
            }
        }
    }
    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for f in (0..n).filter(|&c| !is_pivot[c]) {
        let mut v = BitVec::zeros(n);
        v.set(f, true);
        for (row, &p) in rref.iter().zip(&pivots) {
            if row.get(f) {
                v.set(p, true);
            }
        }
        basis.push(v);
    }
    basis
}

/// Basis of the subspace of `span(rows)` that vanishes on `forbidden`.
pub fn span_avoiding(n: usize, rows: &[BitVec], forbidden: &BitVec) -> Vec<BitVec> {
    let mut pivots: Vec<(usize, BitVec)> = Vec::new();
    let mut rest = Echelon::new(n);
    for r in rows {
        let mut v = r.clone();
        for (p, row) in &pivots {
            if v.get(*p) {
                v.xor_assign(row);
            }
        }
        match v.and(forbidden).first_one() {
            Some(p) => pivots.push((p, v)),
            None => {
                rest.insert(v);
            }
        }
    }
    rest.rows().to_vec()
}

/// Basis of the subspace of `span(rows)` orthogonal to every vector in `others`.
pub fn commutant(n: usize, rows: &[BitVec], others: &[BitVec]) -> Vec<BitVec> {
    let equations: Vec<BitVec> = others
        .iter()
        .map(|o| BitVec::from_indices(rows.len(), (0..rows.len()).filter(|&i| rows[i].dot(o))))
        .collect();
    let combos = kernel(rows.len(), &equations);
    let mut out = Echelon::new(n);
    for c in combos {
        let mut v = BitVec::zeros(n);
        for i in c.iter_ones() {
            v.xor_assign(&rows[i]);
        }
        out.insert(v);
    }
    out.rows().to_vec()
}

/// Subspace of `span(rows)` supported inside `allowed`.
pub fn span_restricted_to(n: usize, rows: &[BitVec], allowed: &BitVec) -> Vec<BitVec> {
    span_avoiding(n, rows, &allowed.not())
}

/// Solves `A x = b` where `equations[i]` is row `i` of `A` over `unknowns` variables.
pub fn solve_system(unknowns: usize, equations: &[BitVec], rhs: &BitVec) -> Option<BitVec> {
    assert_eq!(equations.len(), rhs.len());
    // Augment with the right-hand side as an extra trailing column.
    let aug: Vec<BitVec> = equations
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let mut v = BitVec::zeros(unknowns + 1);
            for j in e.iter_ones() {
                v.set(j, true);
            }
            if rhs.get(i) {
                v.set(unknowns, true);
            }
            v
        })
        .collect();
    let e = Echelon::from_rows(unknowns + 1, &aug);
    if e.pivots().contains(&unknowns) {
        return None;
    }
    // Back substitution with free variables set to zero.
    let mut x = BitVec::zeros(unknowns);
    for (row, &p) in e.rows().iter().zip(e.pivots()).rev() {
        let mut val = row.get(unknowns);
        for j in row.iter_ones() {
            if j != p && j < unknowns && x.get(j) {
                val = !val;
            }
        }
        x.set(p, val);
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bits(s: &str) -> BitVec {
        BitVec::from_bit_str(s).unwrap()
    }

    fn mat(rows: &[&str]) -> CheckMatrix {
        CheckMatrix::from_rows(rows[0].len(), rows.iter().map(|r| bits(r)).collect()).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_gf2(&mat(&["110", "011", "101"])), 2);
        assert_eq!(rank_gf2(&CheckMatrix::new(5)), 0);
        assert_eq!(rank_gf2(&mat(&["1000", "0100", "0010", "0001"])), 4);
    }

    #[test]
    fn rowspan_examples() {
        let m = mat(&["110", "011"]);
        assert!(in_rowspan(&bits("000"), &m).unwrap());
        assert!(!in_rowspan(&bits("111"), &m).unwrap());
        assert!(in_rowspan(&bits("101"), &m).unwrap());
        assert!(in_rowspan(&bits("10"), &m).is_err());
    }

    #[test]
    fn kernel_is_orthogonal_complement() {
        let m = mat(&["1100", "0110"]);
        let k = kernel(4, &m.rows);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(m.syndrome(v).is_zero());
        }
    }

    #[test]
    fn span_avoiding_drops_forbidden_support() {
        let rows = vec![bits("1100"), bits("0110"), bits("0011")];
        let sub = span_avoiding(4, &rows, &bits("0100"));
        // span is the even-weight code; avoiding column 1 leaves {1010,0011,1001,...}
        assert_eq!(sub.len(), 2);
        for v in &sub {
            assert!(!v.get(1));
            assert!(Echelon::from_rows(4, &rows).contains(v));
        }
    }

    #[test]
    fn solve_and_express() {
        let rows = vec![bits("110"), bits("011")];
        let e = Echelon::tracking(3, &rows);
        assert_eq!(e.express(&bits("101")).unwrap().to_bit_string(), "11");
        assert!(e.express(&bits("100")).is_none());
        let deps = Echelon::dependencies(3, &[bits("110"), bits("011"), bits("101")]);
        assert_eq!(deps.len(), 1);
        assert_eq!(deps[0].to_bit_string(), "111");

        let x = solve_system(3, &[bits("110"), bits("011")], &bits("10")).unwrap();
        assert!(bits("110").dot(&x));
        assert!(!bits("011").dot(&x));
        assert!(solve_system(2, &[bits("11"), bits("11")], &bits("10")).is_none());
    }

    proptest! {
        #[test]
        fn rank_invariant_under_row_ops(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(1..90);
            let m = rng.gen_range(0..40);
            let mut rows: Vec<BitVec> = (0..m)
                .map(|_| BitVec::from_indices(n, (0..n).filter(|_| rng.gen_bool(0.3))))
                .collect();
            let r0 = rank_of(n, &rows);
            if m >= 2 {
                let i = rng.gen_range(0..m);
                let j = rng.gen_range(0..m);
                if i != j {
                    let rj = rows[j].clone();
                    rows[i].xor_assign(&rj);
                }
                rows.swap(0, m - 1);
            }
            prop_assert_eq!(rank_of(n, &rows), r0);
            prop_assert_eq!(kernel(n, &rows).len(), n - r0);
        }
    }
}
