//! Two-dimensional surface codes.
//!
//! Rotated layouts put qubits on a `rows x cols` grid, index `r * cols + c`.
//! Plaquette `(i, j)` covers rows `i..=i+1` and columns `j..=j+1`, for
//! `i in -1..rows` and `j in -1..cols`; it carries X iff `i + j + parity`
//! is even. Plaquettes hanging off the left or right edge survive only as X
//! checks, those off the top or bottom only as Z checks, and corners are
//! dropped. The Z logical runs down column 0 and the X logical along row 0.

use serde::{Deserialize, Serialize};

use crate::bits::BitVec;
use crate::css::{CssCode, PauliType};
use crate::error::{Error, Result};
use crate::gf2::CheckMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Picture {
    Rotated,
    Kitaev,
}

impl std::str::FromStr for Picture {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rotated" => Ok(Picture::Rotated),
            "kitaev" => Ok(Picture::Kitaev),
            other => Err(Error::Parse(format!("unknown picture {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Plaquette {
    pub i: i64,
    pub j: i64,
    pub ty: PauliType,
}

#[derive(Clone, Debug)]
pub struct RotatedLayout {
    pub rows: usize,
    pub cols: usize,
    pub parity: usize,
}

impl RotatedLayout {
    pub fn new(rows: usize, cols: usize, parity: usize) -> Self {
        Self {
            rows,
            cols,
            parity: parity % 2,
        }
    }

    pub fn n(&self) -> usize {
        self.rows * self.cols
    }

    pub fn qubit(&self, r: usize, c: usize) -> usize {
        r * self.cols + c
    }

    pub fn plaquette_type(&self, i: i64, j: i64) -> PauliType {
        if (i + j + self.parity as i64).rem_euclid(2) == 0 {
            PauliType::X
        } else {
            PauliType::Z
        }
    }

    /// Qubits under plaquette `(i, j)`.
    pub fn support(&self, i: i64, j: i64) -> Vec<usize> {
        let mut out = Vec::with_capacity(4);
        for r in [i, i + 1] {
            for c in [j, j + 1] {
                if (0..self.rows as i64).contains(&r) && (0..self.cols as i64).contains(&c) {
                    out.push(self.qubit(r as usize, c as usize));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Surviving plaquettes in row-major order.
    pub fn plaquettes(&self) -> Vec<Plaquette> {
        let (rows, cols) = (self.rows as i64, self.cols as i64);
        let mut out = Vec::new();
        for i in -1..rows {
            for j in -1..cols {
                let vertical_edge = i == -1 || i == rows - 1;
                let horizontal_edge = j == -1 || j == cols - 1;
                let ty = self.plaquette_type(i, j);
                let keep = match (vertical_edge, horizontal_edge) {
                    (false, false) => true,
                    (true, true) => false,
                    (true, false) => ty == PauliType::Z,
                    (false, true) => ty == PauliType::X,
                };
                if keep {
                    out.push(Plaquette { i, j, ty });
                }
            }
        }
        out
    }

    pub fn code(&self, label: impl Into<String>) -> Result<CssCode> {
        let n = self.n();
        let mut hx = CheckMatrix::new(n);
        let mut hz = CheckMatrix::new(n);
        for p in self.plaquettes() {
            let row = BitVec::from_indices(n, self.support(p.i, p.j));
            match p.ty {
                PauliType::X => hx.push(row),
                PauliType::Z => hz.push(row),
            }
        }
        let code = CssCode::new(label, hx, hz)?;
        let lx = BitVec::from_indices(n, (0..self.cols).map(|c| self.qubit(0, c)));
        let lz = BitVec::from_indices(n, (0..self.rows).map(|r| self.qubit(r, 0)));
        code.with_logicals(vec![lx], vec![lz])
    }
}

/// A square rotated patch with its checkerboard parity.
#[derive(Clone, Debug)]
pub struct Sheet {
    pub d: usize,
    pub parity: usize,
    pub code: CssCode,
}

impl Sheet {
    pub fn rotated(d: usize) -> Result<Self> {
        Self::rotated_with_parity(d, 0)
    }

    pub fn rotated_with_parity(d: usize, parity: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(format!(
                "2D distance must be at least 2, got {d}"
            )));
        }
        let layout = RotatedLayout::new(d, d, parity);
        Ok(Self {
            d,
            parity: parity % 2,
            code: layout.code(format!("rotated d={d}"))?,
        })
    }

    pub fn layout(&self) -> RotatedLayout {
        RotatedLayout::new(self.d, self.d, self.parity)
    }

    /// Row `r`, column `c` of the patch.
    pub fn qubit(&self, r: usize, c: usize) -> usize {
        r * self.d + c
    }
}

/// Kitaev picture: qubits on edges of a `d x (d-1)` / `(d-1) x d` grid.
///
/// Points `(a, b)` with `0 <= a, b <= 2d-2` and `a + b` even are qubits,
/// `(odd, even)` points are X checks and `(even, odd)` points are Z checks.
pub fn kitaev_code(d: usize) -> Result<CssCode> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!(
            "2D distance must be at least 2, got {d}"
        )));
    }
    let m = 2 * d as i64 - 2;
    let mut index = std::collections::HashMap::new();
    for a in 0..=m {
        for b in 0..=m {
            if (a + b) % 2 == 0 {
                let k = index.len();
                index.insert((a, b), k);
            }
        }
    }
    let n = index.len();
    let star = |a: i64, b: i64| {
        BitVec::from_indices(
            n,
            [(a - 1, b), (a + 1, b), (a, b - 1), (a, b + 1)]
                .into_iter()
                .filter_map(|p| index.get(&p).copied()),
        )
    };
    let mut hx = CheckMatrix::new(n);
    let mut hz = CheckMatrix::new(n);
    for a in 0..=m {
        for b in 0..=m {
            match (a % 2, b % 2) {
                (1, 0) => hx.push(star(a, b)),
                (0, 1) => hz.push(star(a, b)),
                _ => {}
            }
        }
    }
    // X logical along the a = 0 edge, Z logical along the b = 0 edge.
    let lx = BitVec::from_indices(n, (0..=m).step_by(2).map(|b| index[&(0, b)]));
    let lz = BitVec::from_indices(n, (0..=m).step_by(2).map(|a| index[&(a, 0)]));
    CssCode::new(format!("kitaev d={d}"), hx, hz)?.with_logicals(vec![lx], vec![lz])
}

pub fn build_2d(d: usize, picture: Picture) -> Result<CssCode> {
    match picture {
        Picture::Rotated => Ok(Sheet::rotated(d)?.code),
        Picture::Kitaev => kitaev_code(d),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::css::brute_distance;

    #[test]
    fn rotated_parameters() {
        for d in 2..=5 {
            let c = build_2d(d, Picture::Rotated).unwrap();
            assert_eq!((c.n, c.k()), (d * d, 1));
            assert_eq!(c.hx.len() + c.hz.len(), d * d - 1);
        }
        let c = build_2d(3, Picture::Rotated).unwrap();
        assert_eq!(brute_distance(&c, PauliType::X, 3).unwrap(), Some(3));
        assert_eq!(brute_distance(&c, PauliType::Z, 3).unwrap(), Some(3));
    }

    #[test]
    fn kitaev_parameters() {
        let c = build_2d(3, Picture::Kitaev).unwrap();
        assert_eq!((c.n, c.k()), (13, 1));
        assert_eq!(brute_distance(&c, PauliType::X, 3).unwrap(), Some(3));
        assert_eq!(brute_distance(&c, PauliType::Z, 3).unwrap(), Some(3));
        let c = build_2d(2, Picture::Kitaev).unwrap();
        assert_eq!((c.n, c.k()), (5, 1));
    }

    #[test]
    fn both_parities_are_codes() {
        for d in 2..=4 {
            for p in 0..2 {
                let s = Sheet::rotated_with_parity(d, p).unwrap();
                assert_eq!(s.code.k(), 1);
            }
        }
    }
}
