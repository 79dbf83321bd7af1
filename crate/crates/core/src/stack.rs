//! Three surface codes on one rectified lattice.

use serde::Serialize;

use crate::bits::BitVec;
use crate::color::{Axis, Color, ColorPair};
use crate::css::{CodeBundle, CssCode};
use crate::error::{Error, Result};
use crate::gf2::{CheckMatrix, Echelon};
use crate::lattice::{build_lattice, expected_vertex_count, Coord3, Lattice, LatticeDims};
use crate::report::Report;

/// Which of the two opposite boundaries of a colour.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Low,
    High,
}

#[derive(Clone, Debug)]
pub struct Stack {
    pub lattice: Lattice,
    /// Codes indexed by [`Color::index`].
    pub codes: [CssCode; 3],
    pub canonical_x: [BitVec; 3],
    pub canonical_z: [BitVec; 3],
    pub x_side: [Side; 3],
}

pub fn code_label(c: Color) -> String {
    format!("SC_{c}")
}

/// X and Z check matrices of `SC_c` read off the lattice.
pub fn code_matrices(lat: &Lattice, c: Color) -> (CheckMatrix, CheckMatrix) {
    let n = lat.n();
    let hx = CheckMatrix::from_supports(n, &lat.cells_of(c).map(|cell| cell.support.clone()).collect::<Vec<_>>());
    let hz = CheckMatrix::from_supports(n, &lat.z_faces(c).map(|f| f.support.clone()).collect::<Vec<_>>());
    (hx, hz)
}

fn plane_vector(lat: &Lattice, axis: Axis, value: i64) -> BitVec {
    BitVec::from_indices(lat.n(), lat.plane(axis, value))
}

/// The whole boundary plane of colour `c` on the given side.
pub fn boundary_membrane(lat: &Lattice, c: Color, side: Side) -> BitVec {
    let axis = c.axis();
    let (lo, hi) = lat.dims.range(axis);
    plane_vector(lat, axis, if side == Side::Low { lo } else { hi })
}

/// The line through the origin corner along the axis of colour `c`.
pub fn corner_string(lat: &Lattice, c: Color) -> BitVec {
    let axis = c.axis();
    let origin = Coord3::new(0, 0, 1);
    let (lo, hi) = lat.dims.range(axis);
    BitVec::from_indices(lat.n(), (lo..=hi).filter_map(|v| lat.index_of(origin.with(axis, v))))
}

pub fn build_stack(dims: LatticeDims) -> Result<Stack> {
    let lattice = build_lattice(dims)?;
    let n = lattice.n();
    let mut codes = Vec::with_capacity(3);
    let mut cx = Vec::with_capacity(3);
    let mut cz = Vec::with_capacity(3);
    for c in Color::ALL {
        let (hx, hz) = code_matrices(&lattice, c);
        let code = CssCode::new(code_label(c), hx, hz)?;
        let (rank_x, rank_z) = (code.rank_x(), code.rank_z());
        if rank_x + rank_z + 1 != n {
            return Err(Error::Construction {
                label: code.label.clone(),
                n,
                rank_x,
                rank_z,
                k: n as isize - rank_x as isize - rank_z as isize,
            });
        }
        let x = boundary_membrane(&lattice, c, Side::Low);
        let z = corner_string(&lattice, c);
        cx.push(x.clone());
        cz.push(z.clone());
        codes.push(code.with_logicals(vec![x], vec![z])?);
    }
    Ok(Stack {
        lattice,
        codes: codes.try_into().unwrap(),
        canonical_x: cx.try_into().unwrap(),
        canonical_z: cz.try_into().unwrap(),
        x_side: [Side::Low; 3],
    })
}

pub fn build_cubic_stack(d: usize) -> Result<Stack> {
    build_stack(LatticeDims::cubic(d)?)
}

impl Stack {
    pub fn n(&self) -> usize {
        self.lattice.n()
    }

    pub fn dims(&self) -> LatticeDims {
        self.lattice.dims
    }

    /// Distance of an isotropic stack.
    pub fn d(&self) -> Option<usize> {
        let dims = self.dims();
        dims.is_cubic().then_some(dims.dx)
    }

    pub fn code(&self, c: Color) -> &CssCode {
        &self.codes[c.index()]
    }

    pub fn code_mut(&mut self, c: Color) -> &mut CssCode {
        &mut self.codes[c.index()]
    }

    pub fn x_bar(&self, c: Color) -> &BitVec {
        &self.canonical_x[c.index()]
    }

    pub fn z_bar(&self, c: Color) -> &BitVec {
        &self.canonical_z[c.index()]
    }

    /// Moves the canonical X logical of `c` onto the chosen boundary.
    pub fn with_canonical_x_side(mut self, c: Color, side: Side) -> Result<Self> {
        let x = boundary_membrane(&self.lattice, c, side);
        let i = c.index();
        self.canonical_x[i] = x.clone();
        self.x_side[i] = side;
        let z = self.canonical_z[i].clone();
        let code = self.codes[i].clone();
        self.codes[i] = code.with_logicals(vec![x], vec![z])?;
        Ok(self)
    }

    pub fn export(&self) -> StackExport<'_> {
        StackExport {
            dims: self.dims(),
            n: self.n(),
            lattice: &self.lattice,
            codes: self.codes.iter().map(CssCode::bundle).collect(),
        }
    }
}

#[derive(Serialize)]
pub struct StackExport<'a> {
    pub dims: LatticeDims,
    pub n: usize,
    pub lattice: &'a Lattice,
    pub codes: Vec<CodeBundle>,
}

/// Independent (X, Z) generator counts expected for `SC_c` at distance `d`.
pub fn expected_ranks(c: Color, d: usize) -> (usize, usize) {
    match c {
        Color::G => (d * d * (d - 1), (d - 1) * (2 * d * d - d + 1)),
        Color::R | Color::B => ((d - 1) * (d * d + d) / 2, (d - 1) * (5 * d * d - 3 * d + 2) / 2),
    }
}

pub fn verify_counts(stack: &Stack) -> Report {
    let mut r = Report::new("counts");
    let Some(d) = stack.d() else {
        r.check("isotropic", false, format!("dims {} are not cubic", stack.dims()));
        return r;
    };
    let n = stack.n();
    r.expect_eq("vertices (3d^3-4d^2+2d)", n, expected_vertex_count(d));
    for c in Color::ALL {
        let code = stack.code(c);
        let (ex, ez) = expected_ranks(c, d);
        let (rx, rz) = (code.rank_x(), code.rank_z());
        r.expect_eq(format!("{} X generators", code.label), rx, ex);
        r.expect_eq(format!("{} Z generators", code.label), rz, ez);
        r.expect_eq(format!("{} total = n-1", code.label), rx + rz, n - 1);
    }
    r
}

/// Explains Z-row dependencies of every code by local cell identities.
///
/// For each cell whose colour belongs to the face pair of `SC_c`, the Z faces
/// of `SC_c` inside the cell are summed; vanishing sums are identities. The
/// report compares how many independent identities this yields with the
/// number of dependent Z rows.
pub fn redundancy_report(stack: &Stack) -> Report {
    let mut r = Report::new("redundancy");
    let lat = &stack.lattice;
    let n = lat.n();
    for c in Color::ALL {
        let pair = ColorPair::of_code(c);
        let faces: Vec<&crate::lattice::FaceRecord> = lat.z_faces(c).collect();
        let rows = faces.len();
        let deficit = rows - stack.code(c).rank_z();
        let mut identities = Echelon::new(rows);
        let mut families = 0;
        for cell in lat.cells.iter().filter(|cell| pair.contains(cell.color)) {
            let members: Vec<usize> = faces
                .iter()
                .enumerate()
                .filter(|(_, f)| f.support.iter().all(|v| cell.support.contains(v)))
                .map(|(i, _)| i)
                .collect();
            if members.len() < 2 {
                continue;
            }
            let mut sum = BitVec::zeros(n);
            for &i in &members {
                sum.xor_assign(&BitVec::from_indices(n, faces[i].support.iter().copied()));
            }
            if sum.is_zero() {
                families += 1;
                identities.insert(BitVec::from_indices(rows, members));
            }
        }
        let found = identities.rank();
        r.check(
            format!("SC_{c} Z redundancies from cell identities"),
            found == deficit,
            format!("{families} vanishing cell sums, {found} independent, {rows} rows with {deficit} dependent"),
        );
        let xrows = stack.code(c).hx.len();
        let xdef = xrows - stack.code(c).rank_x();
        r.check(
            format!("SC_{c} X generators independent"),
            xdef == 0,
            format!("{xrows} rows, {xdef} dependent"),
        );
    }
    r
}
