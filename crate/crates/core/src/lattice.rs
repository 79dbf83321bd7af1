//! Bounded rectified cubic lattice.
//!
//! Coordinates live on a doubled grid: vertices are the integer triples with
//! exactly one odd coordinate. Octahedra sit on all-even triples and
//! cuboctahedra on all-odd triples.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::color::{Axis, Color, ColorPair};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coord3 {
    pub x: i64,
    pub y: i64,
    pub z: i64,
}

impl Coord3 {
    pub const fn new(x: i64, y: i64, z: i64) -> Self {
        Self { x, y, z }
    }

    pub fn get(self, axis: Axis) -> i64 {
        match axis {
            Axis::X => self.x,
            Axis::Y => self.y,
            Axis::Z => self.z,
        }
    }

    pub fn with(mut self, axis: Axis, v: i64) -> Self {
        match axis {
            Axis::X => self.x = v,
            Axis::Y => self.y = v,
            Axis::Z => self.z = v,
        }
        self
    }

    fn odd_count(self) -> usize {
        [self.x, self.y, self.z].iter().filter(|v| v.rem_euclid(2) == 1).count()
    }

    pub fn is_vertex(self) -> bool {
        self.odd_count() == 1
    }

    /// Colour of the cell centred here, if this is a cell centre.
    pub fn cell_color(self) -> Option<Color> {
        match self.odd_count() {
            0 => Some(Color::G),
            3 if (self.x + self.y + self.z).rem_euclid(4) == 3 => Some(Color::R),
            3 => Some(Color::B),
            _ => None,
        }
    }

    /// Sort key giving the (z, y, x) lexicographic vertex order.
    fn zyx(self) -> (i64, i64, i64) {
        (self.z, self.y, self.x)
    }
}

impl std::ops::Add for Coord3 {
    type Output = Coord3;
    fn add(self, o: Coord3) -> Coord3 {
        Coord3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl fmt::Display for Coord3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.x, self.y, self.z)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeDims {
    pub dx: usize,
    pub dy: usize,
    pub dz: usize,
}

impl LatticeDims {
    pub fn new(dx: usize, dy: usize, dz: usize) -> Result<Self> {
        let dims = Self { dx, dy, dz };
        dims.validate()?;
        Ok(dims)
    }

    pub fn cubic(d: usize) -> Result<Self> {
        Self::new(d, d, d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dx < 2 || self.dy < 2 || self.dz < 2 {
            return Err(Error::InvalidDimension(format!(
                "every extent must be at least 2, got {}x{}x{}",
                self.dx, self.dy, self.dz
            )));
        }
        Ok(())
    }

    pub fn along(&self, axis: Axis) -> usize {
        match axis {
            Axis::X => self.dx,
            Axis::Y => self.dy,
            Axis::Z => self.dz,
        }
    }

    pub fn with(mut self, axis: Axis, v: usize) -> Self {
        match axis {
            Axis::X => self.dx = v,
            Axis::Y => self.dy = v,
            Axis::Z => self.dz = v,
        }
        self
    }

    pub fn is_cubic(&self) -> bool {
        self.dx == self.dy && self.dy == self.dz
    }

    /// Inclusive coordinate range along an axis.
    pub fn range(&self, axis: Axis) -> (i64, i64) {
        let d = self.along(axis) as i64;
        match axis {
            Axis::X | Axis::Y => (0, 2 * (d - 1)),
            Axis::Z => (1, 2 * d - 1),
        }
    }
}

impl fmt::Display for LatticeDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.dx, self.dy, self.dz)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellKind {
    Octahedron,
    Cuboctahedron,
    Clipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellRecord {
    pub center: Coord3,
    pub color: Color,
    pub kind: CellKind,
    /// Centre lies just outside the box: a flattened boundary cell.
    pub outside: bool,
    pub support: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaceKind {
    Triangle,
    Square,
    /// Square with one corner beyond a boundary.
    ClippedSquare,
    ClippedEdge,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceRecord {
    pub color_pair: ColorPair,
    pub kind: FaceKind,
    pub support: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryPlane {
    pub axis: Axis,
    pub value: i64,
    pub color: Color,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerKind {
    Chequerboard,
    Diamond,
}

#[derive(Clone, Debug, Serialize)]
pub struct Lattice {
    pub dims: LatticeDims,
    pub vertices: Vec<Coord3>,
    pub cells: Vec<CellRecord>,
    pub faces: Vec<FaceRecord>,
    pub boundaries: Vec<BoundaryPlane>,
    #[serde(skip)]
    index: HashMap<Coord3, usize>,
}

const AXES: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

fn unit(axis: Axis, s: i64) -> Coord3 {
    Coord3::new(0, 0, 0).with(axis, s)
}

impl Lattice {
    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn index_of(&self, c: Coord3) -> Option<usize> {
        self.index.get(&c).copied()
    }

    pub fn in_box(&self, c: Coord3) -> bool {
        AXES.iter().all(|&a| {
            let (lo, hi) = self.dims.range(a);
            (lo..=hi).contains(&c.get(a))
        })
    }

    /// Planes a point lies beyond, with the distance by which it overshoots.
    fn violations(&self, c: Coord3) -> Vec<(BoundaryPlane, i64)> {
        let mut out = Vec::new();
        for &a in &AXES {
            let (lo, hi) = self.dims.range(a);
            let v = c.get(a);
            let color = a.color();
            if v < lo {
                out.push((
                    BoundaryPlane {
                        axis: a,
                        value: lo,
                        color,
                    },
                    lo - v,
                ));
            } else if v > hi {
                out.push((
                    BoundaryPlane {
                        axis: a,
                        value: hi,
                        color,
                    },
                    v - hi,
                ));
            }
        }
        out
    }

    /// Vertex indices lying on a coordinate plane.
    pub fn plane(&self, axis: Axis, value: i64) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.vertices[i].get(axis) == value).collect()
    }

    pub fn cells_of(&self, color: Color) -> impl Iterator<Item = &CellRecord> {
        self.cells.iter().filter(move |c| c.color == color)
    }

    pub fn faces_of(&self, pair: ColorPair) -> impl Iterator<Item = &FaceRecord> {
        self.faces.iter().filter(move |f| f.color_pair == pair)
    }

    /// Faces carrying Z checks of the given colour's code.
    pub fn z_faces(&self, code: Color) -> impl Iterator<Item = &FaceRecord> {
        self.faces_of(ColorPair::of_code(code))
    }

    fn clip(&self, points: impl IntoIterator<Item = Coord3>) -> (Vec<usize>, Vec<Coord3>) {
        let mut kept = Vec::new();
        let mut lost = Vec::new();
        for p in points {
            match self.index_of(p) {
                Some(i) => kept.push(i),
                None => lost.push(p),
            }
        }
        kept.sort_unstable();
        (kept, lost)
    }
}

pub fn octahedron_offsets() -> Vec<Coord3> {
    AXES.iter().flat_map(|&a| [unit(a, -1), unit(a, 1)]).collect()
}

pub fn cuboctahedron_offsets() -> Vec<Coord3> {
    let mut out = Vec::with_capacity(12);
    for &zero in &AXES {
        let others: Vec<Axis> = AXES.iter().copied().filter(|&a| a != zero).collect();
        for s in [-1, 1] {
            for t in [-1, 1] {
                out.push(unit(others[0], s) + unit(others[1], t));
            }
        }
    }
    out
}

pub fn build_lattice(dims: LatticeDims) -> Result<Lattice> {
    dims.validate()?;
    let (x0, x1) = dims.range(Axis::X);
    let (y0, y1) = dims.range(Axis::Y);
    let (z0, z1) = dims.range(Axis::Z);

    let mut vertices = Vec::new();
    for z in z0..=z1 {
        for y in y0..=y1 {
            for x in x0..=x1 {
                let c = Coord3::new(x, y, z);
                if c.is_vertex() {
                    vertices.push(c);
                }
            }
        }
    }
    debug_assert!(vertices.windows(2).all(|w| w[0].zyx() < w[1].zyx()));
    let index = vertices.iter().enumerate().map(|(i, &c)| (c, i)).collect();

    let boundaries = AXES
        .iter()
        .flat_map(|&a| {
            let (lo, hi) = dims.range(a);
            [lo, hi].map(|value| BoundaryPlane {
                axis: a,
                value,
                color: a.color(),
            })
        })
        .collect();

    let mut lat = Lattice {
        dims,
        vertices,
        cells: Vec::new(),
        faces: Vec::new(),
        boundaries,
        index,
    };
    lat.cells = enumerate_cells(&lat);
    lat.faces = enumerate_faces(&lat);
    Ok(lat)
}

/// Candidate centres within two grid steps of the box.
fn halo(dims: &LatticeDims) -> impl Iterator<Item = Coord3> {
    let (x0, x1) = dims.range(Axis::X);
    let (y0, y1) = dims.range(Axis::Y);
    let (z0, z1) = dims.range(Axis::Z);
    (z0 - 2..=z1 + 2)
        .flat_map(move |z| (y0 - 2..=y1 + 2).flat_map(move |y| (x0 - 2..=x1 + 2).map(move |x| Coord3::new(x, y, z))))
}

fn enumerate_cells(lat: &Lattice) -> Vec<CellRecord> {
    let mut cells = Vec::new();
    for center in halo(&lat.dims) {
        let Some(color) = center.cell_color() else {
            continue;
        };
        let viol = lat.violations(center);
        let outside = match viol.as_slice() {
            [] => false,
            [(plane, 1)] if plane.color != color => true,
            _ => continue,
        };
        let (full, offsets) = if color == Color::G {
            (CellKind::Octahedron, octahedron_offsets())
        } else {
            (CellKind::Cuboctahedron, cuboctahedron_offsets())
        };
        let (support, lost) = lat.clip(offsets.iter().map(|&o| center + o));
        if support.is_empty() {
            continue;
        }
        cells.push(CellRecord {
            center,
            color,
            kind: if lost.is_empty() { full } else { CellKind::Clipped },
            outside,
            support,
        });
    }
    cells
}

fn enumerate_faces(lat: &Lattice) -> Vec<FaceRecord> {
    let mut faces = Vec::new();
    let mut seen = HashSet::new();
    for center in halo(&lat.dims) {
        let odd: Vec<Axis> = AXES
            .iter()
            .copied()
            .filter(|&a| center.get(a).rem_euclid(2) == 1)
            .collect();
        let mut candidates: Vec<(ColorPair, Vec<Coord3>)> = Vec::new();
        match odd.len() {
            0 => {
                // Octahedron: one triangle per octant, shared with the cuboctahedron there.
                for sx in [-1, 1] {
                    for sy in [-1, 1] {
                        for sz in [-1, 1] {
                            let cubo = center + Coord3::new(sx, sy, sz);
                            let pair = ColorPair::new(Color::G, cubo.cell_color().unwrap());
                            let pts = vec![
                                center + unit(Axis::X, sx),
                                center + unit(Axis::Y, sy),
                                center + unit(Axis::Z, sz),
                            ];
                            candidates.push((pair, pts));
                        }
                    }
                }
            }
            2 => {
                let pts = odd
                    .iter()
                    .flat_map(|&a| [center + unit(a, -1), center + unit(a, 1)])
                    .collect();
                candidates.push((ColorPair::Rb, pts));
            }
            _ => {}
        }
        for (pair, pts) in candidates {
            let full = pts.len();
            let (support, lost) = lat.clip(pts);
            if support.len() < 2 {
                continue;
            }
            let code = pair.complement();
            let allowed = lost
                .iter()
                .all(|&p| lat.violations(p).iter().all(|(plane, _)| plane.color == code));
            if !allowed {
                continue;
            }
            let kind = match (support.len(), full) {
                (3, 3) => FaceKind::Triangle,
                (4, 4) => FaceKind::Square,
                (3, 4) => FaceKind::ClippedSquare,
                _ => FaceKind::ClippedEdge,
            };
            if seen.insert((pair, support.clone())) {
                faces.push(FaceRecord {
                    color_pair: pair,
                    kind,
                    support,
                });
            }
        }
    }
    faces
}

/// Vertex counts per z-layer, bottom to top.
pub fn layer_census(lat: &Lattice) -> Vec<(LayerKind, usize)> {
    let (z0, z1) = lat.dims.range(Axis::Z);
    (z0..=z1)
        .map(|z| {
            let kind = if z.rem_euclid(2) == 1 {
                LayerKind::Chequerboard
            } else {
                LayerKind::Diamond
            };
            (kind, lat.plane(Axis::Z, z).len())
        })
        .collect()
}

/// Cells per colour whose centre lies in the closed box.
pub fn cell_census(lat: &Lattice) -> BTreeMap<Color, usize> {
    let mut out: BTreeMap<Color, usize> = Color::ALL.iter().map(|&c| (c, 0)).collect();
    for c in lat.cells.iter().filter(|c| !c.outside) {
        *out.get_mut(&c.color).unwrap() += 1;
    }
    out
}

pub fn expected_vertex_count(d: usize) -> usize {
    3 * d * d * d - 4 * d * d + 2 * d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(d: usize) -> Lattice {
        build_lattice(LatticeDims::cubic(d).unwrap()).unwrap()
    }

    #[test]
    fn vertex_counts() {
        assert_eq!(cube(2).n(), 12);
        assert_eq!(cube(3).n(), 51);
        assert_eq!(cube(4).n(), 136);
        for d in 2..=6 {
            assert_eq!(cube(d).n(), expected_vertex_count(d));
        }
    }

    #[test]
    fn rejects_small_dims() {
        assert!(matches!(LatticeDims::new(1, 2, 2), Err(Error::InvalidDimension(_))));
        assert!(build_lattice(LatticeDims { dx: 2, dy: 0, dz: 2 }).is_err());
    }

    #[test]
    fn layers() {
        let census = layer_census(&cube(3));
        assert_eq!(census.len(), 5);
        for (i, (kind, count)) in census.iter().enumerate() {
            if i % 2 == 0 {
                assert_eq!((*kind, *count), (LayerKind::Chequerboard, 9));
            } else {
                assert_eq!((*kind, *count), (LayerKind::Diamond, 12));
            }
        }
        let counts: Vec<usize> = layer_census(&cube(2)).iter().map(|l| l.1).collect();
        assert_eq!(counts, vec![4, 4, 4]);
    }

    #[test]
    fn cells() {
        for d in 2..=6 {
            let census = cell_census(&cube(d));
            assert_eq!(census[&Color::G], d * d * (d - 1));
            assert_eq!(census[&Color::R] + census[&Color::B], d * (d - 1) * (d - 1));
        }
    }

    #[test]
    fn vertices_have_one_odd_coordinate() {
        let lat = cube(3);
        for (i, v) in lat.vertices.iter().enumerate() {
            assert!(v.is_vertex());
            assert_eq!(lat.index_of(*v), Some(i));
        }
        let box_points = (0..=4).flat_map(|x| (0..=4).flat_map(move |y| (1..=5).map(move |z| Coord3::new(x, y, z))));
        assert_eq!(box_points.filter(|c| c.is_vertex()).count(), lat.n());
    }

    #[test]
    fn boundary_colours() {
        let lat = cube(3);
        assert_eq!(lat.boundaries.len(), 6);
        for pair in lat.boundaries.chunks(2) {
            assert_eq!(pair[0].color, pair[1].color);
        }
        let colors: HashSet<Color> = lat.boundaries.iter().map(|b| b.color).collect();
        assert_eq!(colors.len(), 3);
    }

    fn is_interior(lat: &Lattice, c: Coord3) -> bool {
        AXES.iter().all(|&a| {
            let (lo, hi) = lat.dims.range(a);
            c.get(a) > lo + 1 && c.get(a) < hi - 1
        })
    }

    #[test]
    fn interior_vertex_incidence() {
        let lat = cube(5);
        let mut checked = 0;
        for (i, &v) in lat.vertices.iter().enumerate() {
            if !is_interior(&lat, v) {
                continue;
            }
            let full = |kind| {
                lat.cells
                    .iter()
                    .filter(|c| c.kind == kind && c.support.contains(&i))
                    .count()
            };
            assert_eq!(full(CellKind::Octahedron), 2, "at {v}");
            assert_eq!(full(CellKind::Cuboctahedron), 4, "at {v}");
            checked += 1;
        }
        assert!(checked > 0);
    }

    #[test]
    fn interior_faces_sit_between_cells() {
        let lat = cube(4);
        let contains = |cell: &CellRecord, f: &FaceRecord| f.support.iter().all(|v| cell.support.contains(v));
        for f in lat
            .faces
            .iter()
            .filter(|f| matches!(f.kind, FaceKind::Triangle | FaceKind::Square))
        {
            let owners: Vec<&CellRecord> = lat
                .cells
                .iter()
                .filter(|c| c.kind != CellKind::Clipped && contains(c, f))
                .collect();
            if f.kind == FaceKind::Triangle {
                let oct = owners.iter().filter(|c| c.kind == CellKind::Octahedron).count();
                let cub = owners.iter().filter(|c| c.kind == CellKind::Cuboctahedron).count();
                assert!(oct <= 1 && cub <= 1);
            } else {
                assert!(owners.len() <= 2);
                if owners.len() == 2 {
                    assert_ne!(owners[0].color, owners[1].color);
                }
            }
            for o in &owners {
                assert!(f.color_pair.contains(o.color));
            }
        }
    }

    #[test]
    fn interior_cell_pairs_share_exactly_one_face() {
        let lat = cube(4);
        let full: Vec<&CellRecord> = lat.cells.iter().filter(|c| c.kind != CellKind::Clipped).collect();
        let face_set: HashMap<(ColorPair, Vec<usize>), usize> = lat
            .faces
            .iter()
            .map(|f| ((f.color_pair, f.support.clone()), 1))
            .collect();
        let mut pairs = 0;
        for (i, a) in full.iter().enumerate() {
            for b in &full[i + 1..] {
                if a.color == b.color {
                    continue;
                }
                let shared: Vec<usize> = a.support.iter().copied().filter(|v| b.support.contains(v)).collect();
                if shared.len() < 2 {
                    continue;
                }
                let key = (ColorPair::new(a.color, b.color), shared);
                assert!(
                    face_set.contains_key(&key),
                    "{} and {} share no face",
                    a.center,
                    b.center
                );
                pairs += 1;
            }
        }
        assert!(pairs > 0);
    }

    #[test]
    fn face_kinds_match_weights() {
        let lat = cube(3);
        for f in &lat.faces {
            match f.kind {
                FaceKind::Triangle => {
                    assert_eq!(f.support.len(), 3);
                    assert_ne!(f.color_pair, ColorPair::Rb);
                }
                FaceKind::Square => {
                    assert_eq!(f.support.len(), 4);
                    assert_eq!(f.color_pair, ColorPair::Rb);
                }
                FaceKind::ClippedSquare => assert_eq!(f.support.len(), 3),
                FaceKind::ClippedEdge => assert_eq!(f.support.len(), 2),
            }
        }
        let mut keys: Vec<_> = lat.faces.iter().map(|f| (f.color_pair, f.support.clone())).collect();
        let before = keys.len();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), before);
    }
}
