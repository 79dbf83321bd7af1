//! CSS codes, coset groups and brute-force distance.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::gf2::{kernel, CheckMatrix, Echelon};

/// Largest number of candidate supports `brute_distance` will test per weight.
pub const DISTANCE_BUDGET: f64 = 1e8;
/// Largest group `enumerate_group` will walk.
pub const GROUP_BUDGET_LOG2: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliType {
    X,
    Z,
}

impl PauliType {
    pub fn opposite(self) -> Self {
        match self {
            PauliType::X => PauliType::Z,
            PauliType::Z => PauliType::X,
        }
    }
}

impl fmt::Display for PauliType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PauliType::X => "X",
            PauliType::Z => "Z",
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CssCode {
    pub label: String,
    pub n: usize,
    pub hx: CheckMatrix,
    pub hz: CheckMatrix,
    pub logical_x: Vec<BitVec>,
    pub logical_z: Vec<BitVec>,
}

impl CssCode {
    /// Builds a code after checking that every X row commutes with every Z row.
    /// Logicals are left empty; see [`CssCode::with_extracted_logicals`].
    pub fn new(label: impl Into<String>, hx: CheckMatrix, hz: CheckMatrix) -> Result<Self> {
        let label = label.into();
        if hx.n != hz.n {
            return Err(Error::LengthMismatch {
                expected: hx.n,
                found: hz.n,
            });
        }
        let code = Self {
            label,
            n: hx.n,
            hx,
            hz,
            logical_x: Vec::new(),
            logical_z: Vec::new(),
        };
        code.check_commutation()?;
        Ok(code)
    }

    pub fn check_commutation(&self) -> Result<()> {
        for (i, x) in self.hx.rows.iter().enumerate() {
            for (j, z) in self.hz.rows.iter().enumerate() {
                if x.dot(z) {
                    return Err(Error::InconsistentCode {
                        label: self.label.clone(),
                        x_row: i,
                        z_row: j,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn rank_x(&self) -> usize {
        self.hx.rank()
    }

    pub fn rank_z(&self) -> usize {
        self.hz.rank()
    }

    pub fn k(&self) -> usize {
        self.n - self.rank_x() - self.rank_z()
    }

    pub fn checks(&self, ty: PauliType) -> &CheckMatrix {
        match ty {
            PauliType::X => &self.hx,
            PauliType::Z => &self.hz,
        }
    }

    pub fn logicals(&self, ty: PauliType) -> &[BitVec] {
        match ty {
            PauliType::X => &self.logical_x,
            PauliType::Z => &self.logical_z,
        }
    }

    /// Attaches logicals after checking they are valid and symplectically paired.
    pub fn with_logicals(mut self, lx: Vec<BitVec>, lz: Vec<BitVec>) -> Result<Self> {
        self.logical_x = lx;
        self.logical_z = lz;
        self.check_logicals()?;
        Ok(self)
    }

    pub fn with_extracted_logicals(mut self) -> Self {
        let (lx, lz) = extract_logicals(&self);
        self.logical_x = lx;
        self.logical_z = lz;
        self
    }

    pub fn check_logicals(&self) -> Result<()> {
        let k = self.k();
        if self.logical_x.len() != k || self.logical_z.len() != k {
            return Err(Error::Verification(format!(
                "{}: expected {k} logical pairs, found {} X and {} Z",
                self.label,
                self.logical_x.len(),
                self.logical_z.len()
            )));
        }
        for (ty, reps) in [(PauliType::X, &self.logical_x), (PauliType::Z, &self.logical_z)] {
            let opp = self.checks(ty.opposite());
            let own = self.checks(ty).echelon();
            for (i, l) in reps.iter().enumerate() {
                if !opp.syndrome(l).is_zero() {
                    return Err(Error::Verification(format!(
                        "{}: logical {ty}{i} does not commute with the {} checks",
                        self.label,
                        ty.opposite()
                    )));
                }
                if own.contains(l) {
                    return Err(Error::Verification(format!(
                        "{}: logical {ty}{i} is a stabilizer",
                        self.label
                    )));
                }
            }
        }
        for (i, x) in self.logical_x.iter().enumerate() {
            for (j, z) in self.logical_z.iter().enumerate() {
                if x.dot(z) != (i == j) {
                    return Err(Error::Verification(format!(
                        "{}: logical X{i} and Z{j} have the wrong commutation",
                        self.label
                    )));
                }
            }
        }
        Ok(())
    }

    /// Applies a qubit relabelling `map[old] = new` into `n` qubits.
    pub fn remap(&self, map: &[usize], n: usize) -> CssCode {
        CssCode {
            label: self.label.clone(),
            n,
            hx: self.hx.remap(map, n),
            hz: self.hz.remap(map, n),
            logical_x: self.logical_x.iter().map(|v| v.remap(map, n)).collect(),
            logical_z: self.logical_z.iter().map(|v| v.remap(map, n)).collect(),
        }
    }

    pub fn bundle(&self) -> CodeBundle {
        let hex = |rows: &[BitVec]| rows.iter().map(BitVec::to_hex).collect();
        CodeBundle {
            label: self.label.clone(),
            n: self.n,
            k: self.k(),
            rank_x: self.rank_x(),
            rank_z: self.rank_z(),
            hx: hex(&self.hx.rows),
            hz: hex(&self.hz.rows),
            logical_x: hex(&self.logical_x),
            logical_z: hex(&self.logical_z),
        }
    }
}

/// Serialisable summary of a code with rows as hex strings, bit 0 least significant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeBundle {
    pub label: String,
    pub n: usize,
    pub k: usize,
    pub rank_x: usize,
    pub rank_z: usize,
    pub hx: Vec<String>,
    pub hz: Vec<String>,
    pub logical_x: Vec<String>,
    pub logical_z: Vec<String>,
}

impl CodeBundle {
    pub fn into_code(self) -> Result<CssCode> {
        let n = self.n;
        let parse =
            |rows: Vec<String>| -> Result<Vec<BitVec>> { rows.iter().map(|h| BitVec::from_hex(n, h)).collect() };
        let code = CssCode::new(
            self.label,
            CheckMatrix::from_rows(n, parse(self.hx)?)?,
            CheckMatrix::from_rows(n, parse(self.hz)?)?,
        )?;
        code.with_logicals(parse(self.logical_x)?, parse(self.logical_z)?)
    }
}

pub fn code_k(code: &CssCode) -> Result<usize> {
    code.check_commutation()?;
    Ok(code.k())
}

/// Algebraic logical operators, paired so that `X_i · Z_j = δ_ij`.
pub fn extract_logicals(code: &CssCode) -> (Vec<BitVec>, Vec<BitVec>) {
    let reps = |ty: PauliType| {
        let mut e = code.checks(ty).echelon();
        kernel(code.n, &code.checks(ty.opposite()).rows)
            .into_iter()
            .filter(|v| e.insert(v.clone()))
            .collect::<Vec<_>>()
    };
    let mut xs = reps(PauliType::X);
    let mut zs = reps(PauliType::Z);
    let k = xs.len();
    debug_assert_eq!(k, zs.len());
    for i in 0..k {
        let j = (i..k)
            .find(|&j| xs[i].dot(&zs[j]))
            .expect("logical Gram matrix is invertible");
        zs.swap(i, j);
        for l in 0..k {
            if l != i && xs[i].dot(&zs[l]) {
                let zi = zs[i].clone();
                zs[l].xor_assign(&zi);
            }
        }
        for m in 0..k {
            if m != i && xs[m].dot(&zs[i]) {
                let xi = xs[i].clone();
                xs[m].xor_assign(&xi);
            }
        }
    }
    (xs, zs)
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Lexicographically first weight-`w` vector with zero syndrome that is not
/// in the span of `stabilizers`.
///
/// `columns[j]` is the syndrome of a single bit at position `j`.
pub fn scan_weight(columns: &[BitVec], stabilizers: &Echelon, w: usize) -> Option<Vec<usize>> {
    let n = columns.len();
    if w == 0 || w > n {
        return None;
    }
    let m = columns[0].len();
    (0..=n - w).into_par_iter().find_map_first(|first| {
        let mut idx = Vec::with_capacity(w);
        let mut syn = Vec::with_capacity(w);
        idx.push(first);
        syn.push(columns[first].clone());
        scan_rec(columns, stabilizers, w, m, &mut idx, &mut syn)
    })
}

fn scan_rec(
    columns: &[BitVec],
    stab: &Echelon,
    w: usize,
    m: usize,
    idx: &mut Vec<usize>,
    syn: &mut Vec<BitVec>,
) -> Option<Vec<usize>> {
    let n = columns.len();
    if idx.len() == w {
        if syn.last().unwrap().is_zero() {
            let v = BitVec::from_indices(n, idx.iter().copied());
            if !stab.contains(&v) {
                return Some(idx.clone());
            }
        }
        return None;
    }
    let start = idx.last().unwrap() + 1;
    let remaining = w - idx.len();
    for j in start..=n - remaining {
        let mut s = syn.last().unwrap().clone();
        s.xor_assign(&columns[j]);
        debug_assert_eq!(s.len(), m);
        idx.push(j);
        syn.push(s);
        let hit = scan_rec(columns, stab, w, m, idx, syn);
        idx.pop();
        syn.pop();
        if hit.is_some() {
            return hit;
        }
    }
    None
}

/// Lowest-weight logical of the given type up to `max_weight`, if any.
pub fn min_weight_logical(code: &CssCode, ty: PauliType, max_weight: usize) -> Result<Option<BitVec>> {
    let worst = (1..=max_weight.min(code.n))
        .map(|w| binomial(code.n, w))
        .fold(0.0, f64::max);
    if worst > DISTANCE_BUDGET {
        return Err(Error::Budget {
            what: "distance search supports",
            needed: worst,
            limit: DISTANCE_BUDGET,
        });
    }
    let columns = code.checks(ty.opposite()).columns();
    let stab = code.checks(ty).echelon();
    for w in 1..=max_weight.min(code.n) {
        if let Some(idx) = scan_weight(&columns, &stab, w) {
            return Ok(Some(BitVec::from_indices(code.n, idx)));
        }
    }
    Ok(None)
}

/// Minimum weight of a nontrivial logical of type `ty`, searched up to `max_weight`.
pub fn brute_distance(code: &CssCode, ty: PauliType, max_weight: usize) -> Result<Option<usize>> {
    Ok(min_weight_logical(code, ty, max_weight)?.map(|v| v.weight()))
}

/// Distance of the code: the smaller of the X and Z distances.
pub fn brute_distance_both(code: &CssCode, max_weight: usize) -> Result<Option<usize>> {
    let dx = brute_distance(code, PauliType::X, max_weight)?;
    let dz = brute_distance(code, PauliType::Z, max_weight)?;
    Ok(match (dx, dz) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    })
}

/// An affine span: `shift + span(basis)`.
#[derive(Clone, Debug)]
pub struct CosetGroup {
    pub n: usize,
    pub basis: Vec<BitVec>,
    pub shift: Option<BitVec>,
}

impl CosetGroup {
    pub fn new(n: usize, basis: Vec<BitVec>, shift: Option<BitVec>) -> Result<Self> {
        let mut e = Echelon::new(n);
        for b in &basis {
            if b.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    found: b.len(),
                });
            }
            if !e.insert(b.clone()) {
                return Err(Error::Verification("coset basis is not independent".into()));
            }
        }
        if let Some(s) = &shift {
            if s.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    found: s.len(),
                });
            }
        }
        Ok(Self { n, basis, shift })
    }

    /// Independent subset of `rows`, as produced by lowest-index elimination.
    pub fn from_generators(n: usize, rows: &[BitVec], shift: Option<BitVec>) -> Result<Self> {
        let mut e = Echelon::new(n);
        let basis = rows.iter().filter(|r| e.insert((*r).clone())).cloned().collect();
        Self::new(n, basis, shift)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn origin(&self) -> BitVec {
        self.shift.clone().unwrap_or_else(|| BitVec::zeros(self.n))
    }

    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> BitVec {
        let mut v = self.origin();
        for b in &self.basis {
            if rng.gen::<bool>() {
                v.xor_assign(b);
            }
        }
        v
    }
}

/// Walks a coset in Gray-code order, one XOR per element.
pub struct GroupIter<'a> {
    group: &'a CosetGroup,
    current: BitVec,
    step: u64,
    total: u64,
}

impl Iterator for GroupIter<'_> {
    type Item = BitVec;

    fn next(&mut self) -> Option<BitVec> {
        if self.step >= self.total {
            return None;
        }
        if self.step > 0 {
            let flip = self.step.trailing_zeros() as usize;
            self.current.xor_assign(&self.group.basis[flip]);
        }
        self.step += 1;
        Some(self.current.clone())
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.total - self.step) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for GroupIter<'_> {}

pub fn enumerate_group(g: &CosetGroup) -> Result<GroupIter<'_>> {
    if g.dim() > GROUP_BUDGET_LOG2 {
        return Err(Error::Budget {
            what: "group elements",
            needed: 2f64.powi(g.dim() as i32),
            limit: 2f64.powi(GROUP_BUDGET_LOG2 as i32),
        });
    }
    Ok(GroupIter {
        group: g,
        current: g.origin(),
        step: 0,
        total: 1u64 << g.dim(),
    })
}

/// Checks that the weight of a sum has the parity of the summed weights.
pub fn parity_lemma_check(vs: &[BitVec]) -> bool {
    let Some(first) = vs.first() else {
        return true;
    };
    let mut sum = BitVec::zeros(first.len());
    let mut parity = 0usize;
    for v in vs {
        sum.xor_assign(v);
        parity += v.weight();
    }
    sum.weight() % 2 == parity % 2
}

/// MacKay alist text for a check matrix; absent entries padded with zeros.
pub fn to_alist(m: &CheckMatrix) -> String {
    let cols: Vec<Vec<usize>> = m.columns().iter().map(|c| c.support()).collect();
    let rows: Vec<Vec<usize>> = m.rows.iter().map(|r| r.support()).collect();
    let max_col = cols.iter().map(Vec::len).max().unwrap_or(0);
    let max_row = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = String::new();
    let join = |v: &mut dyn Iterator<Item = usize>| v.map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    out += &format!("{} {}\n{} {}\n", m.n, rows.len(), max_col, max_row);
    out += &join(&mut cols.iter().map(Vec::len));
    out.push('\n');
    out += &join(&mut rows.iter().map(Vec::len));
    out.push('\n');
    for lists in [(&cols, max_col), (&rows, max_row)] {
        for l in lists.0 {
            let padded = l.iter().map(|x| x + 1).chain(std::iter::repeat(0)).take(lists.1);
            out += &join(&mut padded.into_iter());
            out.push('\n');
        }
    }
    out
}

pub fn parse_alist(text: &str) -> Result<CheckMatrix> {
    let mut nums = text.split_whitespace().map(|t| {
        t.parse::<usize>()
            .map_err(|e| Error::Parse(format!("alist token {t:?}: {e}")))
    });
    let mut next = || {
        nums.next()
            .unwrap_or_else(|| Err(Error::Parse("alist truncated".into())))
    };
    let n = next()?;
    let m = next()?;
    let max_col = next()?;
    let max_row = next()?;
    let col_w: Vec<usize> = (0..n).map(|_| next()).collect::<Result<_>>()?;
    let row_w: Vec<usize> = (0..m).map(|_| next()).collect::<Result<_>>()?;
    for _ in 0..n * max_col {
        next()?;
    }
    let mut rows = Vec::with_capacity(m);
    for &w in &row_w {
        let entries: Vec<usize> = (0..max_row).map(|_| next()).collect::<Result<_>>()?;
        let support: Vec<usize> = entries.into_iter().filter(|&e| e > 0).map(|e| e - 1).collect();
        if support.len() != w || support.iter().any(|&j| j >= n) {
            return Err(Error::Parse("alist row list disagrees with its header".into()));
        }
        rows.push(BitVec::from_indices(n, support));
    }
    let parsed = CheckMatrix { n, rows };
    let check_w: Vec<usize> = parsed.columns().iter().map(BitVec::weight).collect();
    if check_w != col_w {
        return Err(Error::Parse("alist column weights disagree with rows".into()));
    }
    Ok(parsed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rep_code3() -> CssCode {
        // Three-qubit bit-flip code: Z checks only.
        let hz = CheckMatrix::from_supports(3, &[vec![0, 1], vec![1, 2]]);
        CssCode::new("rep3", CheckMatrix::new(3), hz).unwrap()
    }

    #[test]
    fn repetition_code_parameters() {
        let c = rep_code3().with_extracted_logicals();
        assert_eq!(c.k(), 1);
        c.check_logicals().unwrap();
        assert_eq!(brute_distance(&c, PauliType::X, 3).unwrap(), Some(3));
        assert_eq!(brute_distance(&c, PauliType::Z, 3).unwrap(), Some(1));
    }

    #[test]
    fn inconsistent_code_rejected() {
        let hx = CheckMatrix::from_supports(2, &[vec![0]]);
        let hz = CheckMatrix::from_supports(2, &[vec![0, 1]]);
        assert!(matches!(
            CssCode::new("bad", hx, hz),
            Err(Error::InconsistentCode { .. })
        ));
    }

    #[test]
    fn group_enumeration() {
        let g = CosetGroup::new(3, vec![], None).unwrap();
        let all: Vec<_> = enumerate_group(&g).unwrap().collect();
        assert_eq!(all, vec![BitVec::zeros(3)]);

        let basis = vec![
            BitVec::from_bit_str("100").unwrap(),
            BitVec::from_bit_str("010").unwrap(),
        ];
        let g = CosetGroup::new(3, basis, None).unwrap();
        let mut all: Vec<String> = enumerate_group(&g).unwrap().map(|v| v.to_bit_string()).collect();
        all.sort();
        assert_eq!(all, vec!["000", "010", "100", "110"]);
    }

    #[test]
    fn group_budget_enforced() {
        let basis = (0..25).map(|i| BitVec::from_indices(25, [i])).collect();
        let g = CosetGroup::new(25, basis, None).unwrap();
        assert!(matches!(enumerate_group(&g), Err(Error::Budget { .. })));
    }

    #[test]
    fn distance_budget_enforced() {
        let c = CssCode::new("wide", CheckMatrix::new(400), CheckMatrix::new(400)).unwrap();
        assert!(matches!(brute_distance(&c, PauliType::X, 5), Err(Error::Budget { .. })));
    }

    #[test]
    fn parity_lemma_examples() {
        let b = |s: &str| BitVec::from_bit_str(s).unwrap();
        assert!(parity_lemma_check(&[b("110"), b("011")]));
        assert!(parity_lemma_check(&[b("1"), b("1")]));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let vs: Vec<BitVec> = (0..1000)
            .map(|_| BitVec::from_indices(64, (0..64).filter(|_| rng.gen_bool(0.5))))
            .collect();
        assert!(parity_lemma_check(&vs));
    }

    #[test]
    fn alist_round_trip() {
        let m = CheckMatrix::from_supports(5, &[vec![0, 1, 4], vec![2], vec![1, 3]]);
        let text = to_alist(&m);
        assert_eq!(parse_alist(&text).unwrap(), m);
        assert!(text.starts_with("5 3\n"));
    }

    #[test]
    fn bundle_round_trip() {
        let c = rep_code3().with_extracted_logicals();
        let json = serde_json::to_string(&c.bundle()).unwrap();
        let back: CodeBundle = serde_json::from_str(&json).unwrap();
        let c2 = back.into_code().unwrap();
        assert_eq!(c2.hz, c.hz);
        assert_eq!(c2.logical_x, c.logical_x);
    }
}
