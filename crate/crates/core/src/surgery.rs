//! Lattice surgery between stacks, and between a sheet and a stack.
//!
//! Merged lattices are built by the ordinary generator with the extent along
//! the merge axis doubled. Stack `a` keeps its coordinates, the junction is
//! the vertex layer just past its high face, and stack `b` sits beyond it.
//! For odd `d` the translation alone would swap the two cuboctahedron colours,
//! so `b` is also mirrored along a transverse in-plane axis.

use std::collections::HashSet;

use num_complex::Complex64;
use serde::Serialize;

use crate::bits::BitVec;
use crate::color::{Axis, Color};
use crate::css::{CssCode, PauliType};
use crate::error::{Error, Result};
use crate::gf2::{commutant, same_span, span_avoiding, span_restricted_to, CheckMatrix, Echelon};
use crate::lattice::{Coord3, LatticeDims};
use crate::planar::{RotatedLayout, Sheet};
use crate::report::Report;
use crate::sim::{mask_of, StateVector, MAX_QUBITS, TOL, ZERO_PROB};
use crate::stack::{build_cubic_stack, build_stack, Stack};

/// Qubit budget of the statevector merge simulation.
pub const MAPPING_QUBIT_LIMIT: usize = 14;

/// How one code changed under a merge. Row indices refer to the merged checks.
#[derive(Clone, Debug, Serialize)]
pub struct CodeDelta {
    pub label: String,
    pub merge_type: PauliType,
    pub new_x: Vec<usize>,
    pub new_z: Vec<usize>,
    pub modified_x: Vec<usize>,
    pub modified_z: Vec<usize>,
    /// Original rows with no unchanged or extended image.
    pub dropped: usize,
    /// Merged rank minus the ranks of the two parents.
    pub new_independent: isize,
    /// Rows of the merge type whose product is measured.
    pub designated: Vec<usize>,
    pub measured_product: BitVec,
    pub k: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct MergeReport {
    pub d: usize,
    pub axis: Color,
    pub merged_dims: LatticeDims,
    pub embed_a: Vec<usize>,
    pub embed_b: Vec<usize>,
    pub new_qubits: Vec<usize>,
    pub deltas: Vec<CodeDelta>,
    pub report: Report,
    #[serde(skip)]
    pub merged: Stack,
}

/// In-plane axis mirrored when embedding the second stack at odd `d`.
fn mirror_axis(axis: Axis) -> Axis {
    if axis == Axis::X {
        Axis::Y
    } else {
        Axis::X
    }
}

/// Position of a vertex of stack `b` inside the merged lattice.
pub fn embed_b_coord(p: Coord3, d: usize, axis: Axis) -> Coord3 {
    let d = d as i64;
    let mut q = p;
    if d % 2 == 1 {
        let t = mirror_axis(axis);
        q = q.with(t, 2 * (d - 1) - q.get(t));
    }
    q.with(axis, q.get(axis) + 2 * d)
}

fn lift(v: &BitVec, map: &[usize], n: usize) -> BitVec {
    v.remap(map, n)
}

struct Classified {
    new: Vec<usize>,
    modified: Vec<usize>,
    dropped: usize,
}

/// Sorts merged rows into unchanged, extended and new relative to the parents.
fn classify(merged: &[BitVec], old_a: &[BitVec], old_b: &[BitVec], junction: &BitVec) -> Classified {
    let olds: HashSet<&BitVec> = old_a.iter().chain(old_b).collect();
    let mut used: HashSet<BitVec> = HashSet::new();
    let mut new = Vec::new();
    let mut modified = Vec::new();
    let outside = junction.not();
    let side_a = old_a.iter().fold(BitVec::zeros(junction.len()), |mut acc, r| {
        acc.or_assign(r);
        acc
    });
    for (i, row) in merged.iter().enumerate() {
        if olds.contains(row) {
            used.insert(row.clone());
            continue;
        }
        let core = row.and(&outside);
        let part_a = core.and(&side_a);
        let part_b = core.xor(&part_a);
        let extends = !core.is_zero()
            && row.overlap(junction) > 0
            && [&part_a, &part_b].iter().all(|p| p.is_zero() || olds.contains(*p));
        if extends {
            for p in [part_a, part_b] {
                if !p.is_zero() {
                    used.insert(p);
                }
            }
            modified.push(i);
        } else {
            new.push(i);
        }
    }
    let dropped = old_a.iter().chain(old_b).filter(|r| !used.contains(*r)).count();
    Classified { new, modified, dropped }
}

/// Merges two equal cubic stacks across their boundaries of colour `axis`.
///
/// The code of colour `axis` undergoes an X-type merge, the other two a
/// Z-type merge.
pub fn merge_stacks(a: &Stack, b: &Stack, axis: Color) -> Result<MergeReport> {
    let (Some(d), Some(db)) = (a.d(), b.d()) else {
        return Err(Error::DimensionMismatch("surgery needs cubic stacks".into()));
    };
    if d != db {
        return Err(Error::DimensionMismatch(format!("stacks have distances {d} and {db}")));
    }
    let ax = axis.axis();
    let merged_dims = a.dims().with(ax, 2 * d);
    let merged = build_stack(merged_dims)?;
    let lat = &merged.lattice;
    let n = lat.n();
    let place = |p: Coord3| {
        lat.index_of(p)
            .ok_or_else(|| Error::Embedding(format!("vertex {p} has no image in the merged lattice")))
    };
    let embed_a: Vec<usize> = a.lattice.vertices.iter().map(|&p| place(p)).collect::<Result<_>>()?;
    let embed_b: Vec<usize> = b
        .lattice
        .vertices
        .iter()
        .map(|&p| place(embed_b_coord(p, d, ax)))
        .collect::<Result<_>>()?;
    let mut hit = vec![false; n];
    for &i in embed_a.iter().chain(&embed_b) {
        if std::mem::replace(&mut hit[i], true) {
            return Err(Error::Embedding(format!(
                "merged vertex {i} is the image of two vertices"
            )));
        }
    }
    let new_qubits: Vec<usize> = (0..n).filter(|&i| !hit[i]).collect();
    let junction = BitVec::from_indices(n, new_qubits.iter().copied());
    let seam = a.dims().range(ax).1 + 1;

    let mut report = Report::new(format!("merge d={d} across {axis} boundaries"));
    let expected_new = if ax == Axis::Z { 2 * d * (d - 1) } else { d * (d - 1) };
    report.expect_eq("new qubits", new_qubits.len(), expected_new);
    report.check(
        "new qubits form the junction layer",
        new_qubits.iter().all(|&i| lat.vertices[i].get(ax) == seam),
        format!("plane {}={seam}", ["x", "y", "z"][ax.index()]),
    );

    let mut deltas = Vec::new();
    for c in Color::ALL {
        let ty = if c == axis { PauliType::X } else { PauliType::Z };
        let (ca, cb, cm) = (a.code(c), b.code(c), merged.code(c));
        let lift_rows = |rows: &[BitVec], map: &[usize]| rows.iter().map(|r| lift(r, map, n)).collect::<Vec<_>>();
        let (ax_a, ax_b) = (lift_rows(&ca.hx.rows, &embed_a), lift_rows(&cb.hx.rows, &embed_b));
        let (az_a, az_b) = (lift_rows(&ca.hz.rows, &embed_a), lift_rows(&cb.hz.rows, &embed_b));
        let cx = classify(&cm.hx.rows, &ax_a, &ax_b, &junction);
        let cz = classify(&cm.hz.rows, &az_a, &az_b, &junction);
        let new_independent =
            (cm.rank_x() + cm.rank_z()) as isize - (ca.rank_x() + ca.rank_z() + cb.rank_x() + cb.rank_z()) as isize;
        let label = cm.label.clone();

        let (old_rows, merged_rows, new_rows, la, lb) = match ty {
            PauliType::X => (
                [ax_a.clone(), ax_b.clone()].concat(),
                &cm.hx.rows,
                &cx.new,
                lift(a.x_bar(c), &embed_a, n),
                lift(b.x_bar(c), &embed_b, n),
            ),
            PauliType::Z => (
                [az_a.clone(), az_b.clone()].concat(),
                &cm.hz.rows,
                &cz.new,
                lift(a.z_bar(c), &embed_a, n),
                lift(b.z_bar(c), &embed_b, n),
            ),
        };
        let target = la.xor(&lb);
        let old_span = Echelon::from_rows(n, &old_rows);
        let designated: Vec<usize> = match ty {
            PauliType::X => new_rows.clone(),
            PauliType::Z => {
                let pool: Vec<BitVec> = new_rows
                    .iter()
                    .map(|&i| merged_rows[i].clone())
                    .chain(old_rows.clone())
                    .collect();
                let combo = Echelon::tracking(n, &pool).express(&target);
                combo
                    .map(|cmb| {
                        cmb.iter_ones()
                            .filter(|&j| j < new_rows.len())
                            .map(|j| new_rows[j])
                            .collect()
                    })
                    .unwrap_or_default()
            }
        };
        let product = designated.iter().fold(BitVec::zeros(n), |mut acc, &i| {
            acc.xor_assign(&merged_rows[i]);
            acc
        });
        report.expect_eq(format!("{label} merged k"), cm.k(), 1);
        report.check(
            format!("{label} {ty}-type product of new rows is the joint logical"),
            !designated.is_empty() && old_span.contains(&product.xor(&target)),
            format!("{} designated rows, weight {}", designated.len(), product.weight()),
        );
        report.check(
            format!("{label} joint logical needs the new rows"),
            !old_span.contains(&target),
            "not generated by the parent stabilizers",
        );
        let opposite = match ty {
            PauliType::X => &cm.hz.rows,
            PauliType::Z => &cm.hx.rows,
        };
        let single = match ty {
            PauliType::X => lift(a.z_bar(c), &embed_a, n),
            PauliType::Z => lift(a.x_bar(c), &embed_a, n),
        };
        report.check(
            format!("{label} measured product commutes with the merged code"),
            opposite.iter().all(|r| !r.dot(&product)) && product.dot(&single),
            "and anticommutes with the first stack's conjugate logical",
        );
        report.check(
            format!("{label} parent rows survive or extend into the junction"),
            cx.dropped + cz.dropped == 0,
            format!(
                "{} new X, {} new Z, {} extended X, {} extended Z, {} dropped",
                cx.new.len(),
                cz.new.len(),
                cx.modified.len(),
                cz.modified.len(),
                cx.dropped + cz.dropped
            ),
        );
        deltas.push(CodeDelta {
            label,
            merge_type: ty,
            new_x: cx.new,
            new_z: cz.new,
            modified_x: cx.modified,
            modified_z: cz.modified,
            dropped: cx.dropped + cz.dropped,
            new_independent,
            designated,
            measured_product: product,
            k: cm.k(),
        });
    }
    let expected_gens = expected_new as isize + 1;
    for delta in &deltas {
        report.expect_eq(
            format!("{} new independent generators", delta.label),
            delta.new_independent,
            expected_gens,
        );
    }
    Ok(MergeReport {
        d,
        axis,
        merged_dims,
        embed_a,
        embed_b,
        new_qubits,
        deltas,
        report,
        merged,
    })
}

#[derive(Clone, Debug)]
pub struct SplitResult {
    pub a: Stack,
    pub b: Stack,
    pub removed: Vec<usize>,
    pub report: Report,
}

/// Measures out the junction layer and checks that each side recovers its
/// parent code.
///
/// The X-type code is measured in Z on the junction, the Z-type codes in X.
/// Checks cut by the junction survive only as products across it, so the
/// parent rows missing from the post-split group are measured again; they
/// must lie on the faces beside the cut and commute with what was kept.
/// Together the two then give the parents plus one generator: the joint
/// logical fixed by the merge.
pub fn split_stack(m: &MergeReport) -> Result<SplitResult> {
    let a = build_cubic_stack(m.d)?;
    let b = build_cubic_stack(m.d)?;
    let n = m.merged.n();
    let junction = BitVec::from_indices(n, m.new_qubits.iter().copied());
    let outside = junction.not();
    let side_a = BitVec::from_indices(n, m.embed_a.iter().copied());
    let side_b = BitVec::from_indices(n, m.embed_b.iter().copied());
    if side_a.overlap(&side_b) > 0 || side_a.xor(&side_b).xor(&outside).weight() > 0 {
        return Err(Error::Embedding(
            "embeddings do not partition the non-junction qubits".into(),
        ));
    }
    let ax = m.axis.axis();
    let seam = a.dims().range(ax).1 + 1;
    let beside = BitVec::from_indices(
        n,
        (0..n).filter(|&i| (m.merged.lattice.vertices[i].get(ax) - seam).abs() == 1),
    );
    let mut report = Report::new(format!("split d={} across {} boundaries", m.d, m.axis));
    for c in Color::ALL {
        let cm = m.merged.code(c);
        let measured_in_z = c == m.axis;
        let trimmed = |rows: &[BitVec]| {
            rows.iter()
                .map(|r| r.and(&outside))
                .filter(|r| !r.is_zero())
                .collect::<Vec<_>>()
        };
        let (xs, zs) = if measured_in_z {
            (span_avoiding(n, &cm.hx.rows, &junction), trimmed(&cm.hz.rows))
        } else {
            (trimmed(&cm.hx.rows), span_avoiding(n, &cm.hz.rows, &junction))
        };
        let lift_all = |rows: &[BitVec], map: &[usize]| rows.iter().map(|r| lift(r, map, n)).collect::<Vec<_>>();
        let (ex, ez) = (Echelon::from_rows(n, &xs), Echelon::from_rows(n, &zs));
        let mut inside = true;
        let (mut parent_x, mut parent_z) = (Vec::new(), Vec::new());
        for (stack, map, side) in [(&a, &m.embed_a, &side_a), (&b, &m.embed_b, &side_b)] {
            let (px, pz) = (
                lift_all(&stack.code(c).hx.rows, map),
                lift_all(&stack.code(c).hz.rows, map),
            );
            let (epx, epz) = (Echelon::from_rows(n, &px), Echelon::from_rows(n, &pz));
            inside &= span_restricted_to(n, &xs, side).iter().all(|r| epx.contains(r))
                && span_restricted_to(n, &zs, side).iter().all(|r| epz.contains(r));
            parent_x.extend(px);
            parent_z.extend(pz);
        }
        report.check(
            format!("{} post-split halves lie inside the parents", cm.label),
            inside,
            "restricted to each side",
        );
        let broken_x: Vec<BitVec> = parent_x.iter().filter(|r| !ex.contains(r)).cloned().collect();
        let broken_z: Vec<BitVec> = parent_z.iter().filter(|r| !ez.contains(r)).cloned().collect();
        report.check(
            format!("{} broken checks sit beside the cut", cm.label),
            broken_x.iter().chain(&broken_z).all(|r| r.is_subset_of(&beside)),
            format!("{} parent rows re-measured", broken_x.len() + broken_z.len()),
        );
        // Re-measuring the broken checks keeps only what commutes with them.
        let mut after_x = commutant(n, &xs, &broken_z);
        after_x.extend(broken_x);
        let mut after_z = commutant(n, &zs, &after_x);
        after_z.extend(broken_z);
        let joint = if measured_in_z {
            lift(a.x_bar(c), &m.embed_a, n).xor(&lift(b.x_bar(c), &m.embed_b, n))
        } else {
            lift(a.z_bar(c), &m.embed_a, n).xor(&lift(b.z_bar(c), &m.embed_b, n))
        };
        let joint_held = if measured_in_z {
            ex.contains(&joint)
        } else {
            ez.contains(&joint)
        };
        if measured_in_z {
            parent_x.push(joint);
        } else {
            parent_z.push(joint);
        }
        report.check(
            format!("{} round trip restores the parents", cm.label),
            joint_held && same_span(n, &after_x, &parent_x) && same_span(n, &after_z, &parent_z),
            "parent groups plus the joint logical",
        );
    }
    Ok(SplitResult {
        a,
        b,
        removed: m.new_qubits.clone(),
        report,
    })
}

/// Layout of a sheet beside a stack's bottom layer.
#[derive(Clone, Debug, Serialize)]
pub struct SheetJunction {
    pub color: Color,
    /// Combined d x (2d+1) layout parity; the sheet's own parity follows.
    pub parity: usize,
    pub sheet_parity: usize,
    /// Stack qubits on the seam column, by row.
    pub seam: Vec<usize>,
}

fn sheet_axes(color: Color) -> Result<(Axis, Axis)> {
    match color {
        Color::B => Ok((Axis::X, Axis::Y)),
        Color::R => Ok((Axis::Y, Axis::X)),
        Color::G => Err(Error::Unsupported(
            "the g code's Z logical is perpendicular to the bottom layer; sheet merges need r or b".into(),
        )),
    }
}

fn seam_flattening(stack: &Stack, color: Color, join: Axis, line: Axis, i: usize) -> Option<BitVec> {
    let d = stack.d()? as i64;
    let centre = Coord3::new(0, 0, 1).with(join, 2 * d - 1).with(line, 2 * i as i64 + 1);
    let cell = stack.lattice.cells_of(color).find(|c| c.center == centre)?;
    Some(BitVec::from_indices(stack.n(), cell.support.iter().copied()))
}

/// Finds the combined layout parity that lines seam X plaquettes up with the
/// stack's flattened cells.
pub fn sheet_junction(stack: &Stack, color: Color) -> Result<SheetJunction> {
    let (join, line) = sheet_axes(color)?;
    let d = stack
        .d()
        .ok_or_else(|| Error::DimensionMismatch("sheet merges need a cubic stack".into()))?;
    let seam: Vec<usize> = (0..d)
        .map(|i| {
            let p = Coord3::new(0, 0, 1)
                .with(join, 2 * d as i64 - 2)
                .with(line, 2 * i as i64);
            stack.lattice.index_of(p).expect("seam vertex exists")
        })
        .collect();
    for parity in 0..2 {
        let layout = RotatedLayout::new(d, 2 * d + 1, parity);
        let fits = layout
            .plaquettes()
            .iter()
            .filter(|p| p.j == d as i64 - 1 && p.ty == PauliType::X)
            .all(|p| seam_flattening(stack, color, join, line, p.i as usize).is_some());
        if fits {
            return Ok(SheetJunction {
                color,
                parity,
                sheet_parity: (parity + d + 1) % 2,
                seam,
            });
        }
    }
    Err(Error::Embedding(format!(
        "no seam parity fits the {color} code's flattened cells"
    )))
}

/// A sheet whose checkerboard matches the junction with `stack`.
pub fn sheet_for_merge(stack: &Stack, color: Color) -> Result<Sheet> {
    let j = sheet_junction(stack, color)?;
    Sheet::rotated_with_parity(stack.d().unwrap_or(0), j.sheet_parity)
}

#[derive(Clone, Debug, Serialize)]
pub struct SheetMergeReport {
    pub junction: SheetJunction,
    pub n: usize,
    /// Merged qubits are ordered stack, ancillas, sheet.
    pub ancillas: Vec<usize>,
    pub new_z: Vec<usize>,
    /// `(merged X row, old weight, new weight)` for stack checks.
    pub modified_stack_x: Vec<(usize, usize, usize)>,
    pub modified_sheet_x: Vec<(usize, usize, usize)>,
    pub measured_product: BitVec,
    pub report: Report,
    #[serde(skip)]
    pub merged: CssCode,
}

/// Z-type merge of a rotated sheet with the given code of a stack.
pub fn merge_2d3d(sheet: &Sheet, stack: &Stack, color: Color) -> Result<SheetMergeReport> {
    let junction = sheet_junction(stack, color)?;
    let (join, line) = sheet_axes(color)?;
    let d = stack.d().unwrap_or(0);
    if sheet.d != d {
        return Err(Error::DimensionMismatch(format!(
            "sheet distance {} but stack distance {d}",
            sheet.d
        )));
    }
    if sheet.parity != junction.sheet_parity {
        return Err(Error::Embedding(format!(
            "sheet parity {} does not match the junction parity {}",
            sheet.parity, junction.sheet_parity
        )));
    }
    let n3 = stack.n();
    let n = n3 + d + d * d;
    let anc = |r: usize| n3 + r;
    let sq = |r: usize, c: usize| n3 + d + sheet.qubit(r, c);
    let code3 = stack.code(color);
    let layout = RotatedLayout::new(d, 2 * d + 1, junction.parity);
    let place = |r: usize, c: usize| {
        if c + 1 == d {
            junction.seam[r]
        } else if c == d {
            anc(r)
        } else {
            sq(r, c - d - 1)
        }
    };
    let widen = |v: &BitVec, offset: usize| BitVec::from_indices(n, v.iter_ones().map(|q| q + offset));
    let mut hx: Vec<BitVec> = code3.hx.rows.iter().map(|r| widen(r, 0)).collect();
    let sheet_x0 = hx.len();
    hx.extend(sheet.code.hx.rows.iter().map(|r| widen(r, n3 + d)));
    let mut hz: Vec<BitVec> = code3.hz.rows.iter().map(|r| widen(r, 0)).collect();
    hz.extend(sheet.code.hz.rows.iter().map(|r| widen(r, n3 + d)));
    let mut new_z = Vec::new();
    let mut modified_stack_x = Vec::new();
    let mut modified_sheet_x = Vec::new();
    for p in layout.plaquettes() {
        let (i, j) = (p.i, p.j as usize);
        if p.j < d as i64 - 1 || j > d {
            continue;
        }
        let cells: Vec<(usize, usize)> = layout
            .support(p.i, p.j)
            .iter()
            .map(|&q| (q / layout.cols, q % layout.cols))
            .collect();
        let support = BitVec::from_indices(n, cells.iter().map(|&(r, c)| place(r, c)));
        match p.ty {
            PauliType::Z => {
                new_z.push(hz.len());
                hz.push(support);
            }
            PauliType::X => {
                let ancillas = BitVec::from_indices(n, cells.iter().filter(|&&(_, c)| c == d).map(|&(r, _)| anc(r)));
                let old = support.and(&ancillas.not());
                let (found, list) = if j + 1 == d {
                    let cell = seam_flattening(stack, color, join, line, i as usize)
                        .ok_or_else(|| Error::Embedding(format!("no flattened cell beside seam row {i}")))?;
                    (
                        hx[..sheet_x0].iter().position(|r| *r == widen(&cell, 0)),
                        &mut modified_stack_x,
                    )
                } else {
                    (
                        hx[sheet_x0..].iter().position(|r| *r == old).map(|k| k + sheet_x0),
                        &mut modified_sheet_x,
                    )
                };
                let row =
                    found.ok_or_else(|| Error::Embedding(format!("no boundary X check under plaquette ({i}, {j})")))?;
                let before = hx[row].weight();
                hx[row].or_assign(&ancillas);
                list.push((row, before, hx[row].weight()));
            }
        }
    }
    let merged = CssCode::new(
        format!("{} + rotated sheet", code3.label),
        CheckMatrix::from_rows(n, hx)?,
        CheckMatrix::from_rows(n, hz)?,
    )?;
    let z3 = widen(stack.z_bar(color), 0);
    let z2 = widen(&sheet.code.logical_z[0], n3 + d);
    let seam_line = BitVec::from_indices(n, junction.seam.iter().copied());
    let product = new_z.iter().fold(BitVec::zeros(n), |mut acc, &i| {
        acc.xor_assign(&merged.hz.rows[i]);
        acc
    });
    let x_bar = widen(stack.x_bar(color), 0)
        .xor(&BitVec::from_indices(n, [anc(0)]))
        .xor(&widen(&sheet.code.logical_x[0], n3 + d));
    let merged = merged.with_logicals(vec![x_bar], vec![z3.clone()])?;

    let mut report = Report::new(format!("sheet merge d={d} with {}", code3.label));
    report.expect_eq("new Z generators", new_z.len(), d + 1);
    report.check(
        "new Z product is Z̄_2D ⊗ Z̄_3D",
        product == seam_line.xor(&z2),
        format!("weight {}, seam-column representative", product.weight()),
    );
    report.check(
        "canonical Z̄_2D ⊗ Z̄_3D is measured",
        merged.hz.echelon().contains(&z3.xor(&z2)),
        "in the merged Z span",
    );
    let old_span = Echelon::from_rows(
        n,
        &merged
            .hz
            .rows
            .iter()
            .enumerate()
            .filter(|(i, _)| !new_z.contains(i))
            .map(|(_, r)| r.clone())
            .collect::<Vec<_>>(),
    );
    report.check(
        "new Z rows are needed",
        !old_span.contains(&product),
        "product not in the parent span",
    );
    report.expect_eq("merged k", merged.k(), 1);
    report.check(
        "merged X logical mixes a membrane and a string",
        merged.check_logicals().is_ok(),
        format!("weight {}", merged.logical_x[0].weight()),
    );
    report.check(
        "stack X checks grow from weight 3 to 5",
        modified_stack_x.iter().all(|&(_, a, b)| (a, b) == (3, 5)),
        format!(
            "{:?}",
            modified_stack_x.iter().map(|&(_, a, b)| (a, b)).collect::<Vec<_>>()
        ),
    );
    report.check(
        "sheet X checks grow from weight 2 to 4",
        modified_sheet_x.iter().all(|&(_, a, b)| (a, b) == (2, 4)),
        format!("{} modified", modified_sheet_x.len()),
    );
    report.expect_eq(
        "modified X checks",
        modified_stack_x.len() + modified_sheet_x.len(),
        d - 1,
    );
    Ok(SheetMergeReport {
        junction,
        n,
        ancillas: (0..d).map(anc).collect(),
        new_z,
        modified_stack_x,
        modified_sheet_x,
        measured_product: product,
        report,
        merged,
    })
}

/// Two rotated patches side by side with a junction between them.
struct PatchPair {
    layout: RotatedLayout,
    a: CssCode,
    b: CssCode,
    merged: CssCode,
    junction: Vec<usize>,
}

fn patch_pair(d: usize, ty: PauliType) -> Result<PatchPair> {
    let (rows, cols) = match ty {
        PauliType::Z => (d, 2 * d + 1),
        PauliType::X => (2 * d + 1, d),
    };
    let layout = RotatedLayout::new(rows, cols, 0);
    let n = layout.n();
    if n > MAPPING_QUBIT_LIMIT {
        return Err(Error::QubitBudget {
            needed: n,
            limit: MAPPING_QUBIT_LIMIT,
        });
    }
    let patch = |offset: usize| -> Result<CssCode> {
        let sub = RotatedLayout::new(d, d, offset % 2);
        let map: Vec<usize> = (0..d * d)
            .map(|q| {
                let (r, c) = (q / d, q % d);
                match ty {
                    PauliType::Z => layout.qubit(r, c + offset),
                    PauliType::X => layout.qubit(r + offset, c),
                }
            })
            .collect();
        Ok(sub.code("patch")?.remap(&map, n))
    };
    let junction = (0..d)
        .map(|t| match ty {
            PauliType::Z => layout.qubit(t, d),
            PauliType::X => layout.qubit(d, t),
        })
        .collect();
    Ok(PatchPair {
        a: patch(0)?,
        b: patch(d + 1)?,
        merged: layout.code("merged patches")?,
        layout,
        junction,
    })
}

fn logical_state(code: &CssCode, amps: [Complex64; 2]) -> Result<StateVector> {
    let mut s = StateVector::zero(code.n)?;
    for row in &code.hx.rows {
        s.project_pauli(mask_of(row), 0, 0)?;
    }
    let mut one = s.clone();
    one.apply_x_mask(mask_of(&code.logical_x[0]));
    StateVector::from_amplitudes(
        s.amplitudes()
            .iter()
            .zip(one.amplitudes())
            .map(|(z, o)| amps[0] * z + amps[1] * o)
            .collect(),
    )
}

/// `|psi>` of one patch and `|phi>` of the other on a fresh register.
fn pair_state(pair: &PatchPair, psi: [Complex64; 2], phi: [Complex64; 2], ty: PauliType) -> Result<StateVector> {
    let n = pair.layout.n();
    let a = logical_state(&pair.a, psi)?;
    let b = logical_state(&pair.b, [Complex64::new(1.0, 0.0), Complex64::default()])?;
    // Product of the two encoded states: the patches act on disjoint qubits,
    // so combine the amplitudes index by index.
    let mut amps = vec![Complex64::default(); 1 << n];
    let (ma, mb) = (support_mask(&pair.a), support_mask(&pair.b));
    for (i, x) in a.amplitudes().iter().enumerate() {
        if i & !ma != 0 || x.norm() < ZERO_PROB {
            continue;
        }
        for (j, y) in b.amplitudes().iter().enumerate() {
            if j & !mb == 0 && y.norm() >= ZERO_PROB {
                amps[i | j] += x * y;
            }
        }
    }
    let mut s = StateVector::from_amplitudes(amps)?;
    let lb = mask_of(&pair.b.logical_x[0]);
    let mut flipped = s.clone();
    flipped.apply_x_mask(lb);
    s = StateVector::from_amplitudes(
        s.amplitudes()
            .iter()
            .zip(flipped.amplitudes())
            .map(|(z, o)| phi[0] * z + phi[1] * o)
            .collect(),
    )?;
    for &q in &pair.junction {
        if ty == PauliType::Z {
            s.h(q);
        }
    }
    Ok(s)
}

fn support_mask(code: &CssCode) -> usize {
    code.hx
        .rows
        .iter()
        .chain(&code.hz.rows)
        .fold(0usize, |m, r| m | mask_of(r) as usize)
}

/// Bloch vector of the logical qubit defined by `lx`, `lz`.
fn bloch(s: &StateVector, lx: &BitVec, lz: &BitVec) -> [f64; 3] {
    let (x, z) = (mask_of(lx), mask_of(lz));
    let y = Complex64::new(0.0, 1.0) * s.expect_xz(x, z);
    [s.expect_x(x), y.re, s.expect_z(z)]
}

fn bloch_of(amps: [Complex64; 2]) -> [f64; 3] {
    let q = StateVector::qubit(amps[0], amps[1]).expect("nonzero");
    let one = BitVec::from_indices(1, [0]);
    bloch(&q, &one, &one)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-9
}

/// Statevector check of merge and split on two small rotated patches.
///
/// A Z-type merge measures the new Z plaquettes on a `|+>` junction. With
/// `|phi> = a|+> + b|->` on the second patch and `m` the parity of the
/// outcomes whose product is `Z̄ ⊗ Z̄`, the merged state is
/// `(a + (-1)^m b Z̄) M|psi>`, where `M|psi>` is the merge of `|psi>` with
/// `|+>`. The X-type case swaps the roles of X and Z. The split measures
/// the junction back out and must leave `a|00> + b|11>` (or its X-basis
/// analogue) up to a Pauli frame.
pub fn simulate_merge_mapping(d: usize, ty: PauliType) -> Result<Report> {
    let pair = patch_pair(d, ty)?;
    let n = pair.layout.n();
    if n > MAX_QUBITS {
        return Err(Error::QubitBudget {
            needed: n,
            limit: MAX_QUBITS,
        });
    }
    let junction = BitVec::from_indices(n, pair.junction.iter().copied());
    let (merged_rows, old_rows, lz_a, lx_m) = match ty {
        PauliType::Z => (
            &pair.merged.hz.rows,
            [pair.a.hz.rows.clone(), pair.b.hz.rows.clone()].concat(),
            pair.a.logical_z[0].clone(),
            pair.merged.logical_x[0].clone(),
        ),
        PauliType::X => (
            &pair.merged.hx.rows,
            [pair.a.hx.rows.clone(), pair.b.hx.rows.clone()].concat(),
            pair.a.logical_x[0].clone(),
            pair.merged.logical_z[0].clone(),
        ),
    };
    let new_rows: Vec<usize> = (0..merged_rows.len())
        .filter(|&i| merged_rows[i].overlap(&junction) > 0)
        .collect();
    // Rows whose product, up to parent stabilizers, is the joint logical.
    let joint = match ty {
        PauliType::Z => pair.a.logical_z[0].xor(&pair.b.logical_z[0]),
        PauliType::X => pair.a.logical_x[0].xor(&pair.b.logical_x[0]),
    };
    let pool: Vec<BitVec> = new_rows
        .iter()
        .map(|&i| merged_rows[i].clone())
        .chain(old_rows.clone())
        .collect();
    let combo = Echelon::tracking(n, &pool)
        .express(&joint)
        .ok_or_else(|| Error::Verification("joint logical is not generated by the merged checks".into()))?;
    let designated: Vec<usize> = combo.iter_ones().filter(|&j| j < new_rows.len()).collect();
    // The logical kept by the merge (Z̄ of patch a for Z-type) and the
    // merged conjugate logical that spans both patches.
    let keep = lz_a;
    let across = lx_m;
    let (keep_x, keep_z) = match ty {
        PauliType::Z => (0u64, mask_of(&keep)),
        PauliType::X => (mask_of(&keep), 0u64),
    };
    let measure = |s: &mut StateVector, row: &BitVec, outcome: u8| -> Result<f64> {
        match ty {
            PauliType::Z => s.project_pauli(0, mask_of(row), outcome),
            PauliType::X => s.project_pauli(mask_of(row), 0, outcome),
        }
    };
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let inputs: Vec<(&str, [Complex64; 2])> = vec![
        ("|0>", [c(1.0, 0.0), c(0.0, 0.0)]),
        ("|1>", [c(0.0, 0.0), c(1.0, 0.0)]),
        ("|+>", [c(h, 0.0), c(h, 0.0)]),
        ("|+i>", [c(h, 0.0), c(0.0, h)]),
        ("generic", [c(0.6, 0.0), c(0.0, 0.8) * Complex64::from_polar(1.0, 0.7)]),
    ];
    // phi in the basis where the merge acts: |+>,|-> for Z-type, |0>,|1> for X-type.
    let phis: Vec<(&str, [Complex64; 2])> = vec![
        ("first", [c(1.0, 0.0), c(0.0, 0.0)]),
        ("generic", [c(0.8, 0.0), c(0.0, -0.6)]),
    ];
    let to_computational = |ab: [Complex64; 2]| match ty {
        PauliType::Z => [(ab[0] + ab[1]) * h, (ab[0] - ab[1]) * h],
        PauliType::X => ab,
    };
    let label = match ty {
        PauliType::Z => "Z-type",
        PauliType::X => "X-type",
    };
    let mut report = Report::new(format!("{label} merge mapping on two [[{},1,{d}]] patches", d * d));
    for (pname, psi) in &inputs {
        for (fname, phi) in &phis {
            let start = pair_state(&pair, *psi, to_computational(*phi), ty)?;
            let base = pair_state(&pair, *psi, to_computational([c(1.0, 0.0), c(0.0, 0.0)]), ty)?;
            let mut total = 0.0;
            let mut mapping_ok = true;
            let mut logical_ok = true;
            let mut split_ok = true;
            for pattern in 0..1u32 << new_rows.len() {
                let mut s = start.clone();
                let mut prob = 1.0;
                let mut feasible = true;
                for (k, &row) in new_rows.iter().enumerate() {
                    match measure(&mut s, &merged_rows[row], (pattern >> k & 1) as u8) {
                        Ok(p) => prob *= p,
                        Err(Error::ZeroProbability(_)) => {
                            feasible = false;
                            break;
                        }
                        Err(e) => return Err(e),
                    }
                }
                if !feasible {
                    continue;
                }
                total += prob;
                // Same outcomes on the reference input; possible whenever the branch is.
                let mut r = base.clone();
                let reference: Result<()> = new_rows
                    .iter()
                    .enumerate()
                    .try_for_each(|(k, &row)| measure(&mut r, &merged_rows[row], (pattern >> k & 1) as u8).map(|_| ()));
                if reference.is_err() {
                    mapping_ok = false;
                    continue;
                }
                let m = designated.iter().fold(0u32, |acc, &k| acc ^ (pattern >> k & 1));
                let sign = if m == 1 { -1.0 } else { 1.0 };
                let mut flipped = r.clone();
                flipped.apply_x_mask(keep_x);
                flipped.apply_z_mask(keep_z);
                let want = StateVector::from_amplitudes(
                    r.amplitudes()
                        .iter()
                        .zip(flipped.amplitudes())
                        .map(|(u, v)| phi[0] * u + phi[1] * sign * v)
                        .collect(),
                )?;
                mapping_ok &= s.approx_eq_up_to_phase(&want, TOL);
                // The reference branch carries psi itself, up to a frame on the
                // two components conjugate to the kept logical.
                let (lx, lz) = match ty {
                    PauliType::Z => (&across, &keep),
                    PauliType::X => (&keep, &across),
                };
                let got = bloch(&r, lx, lz);
                let want_b = bloch_of(*psi);
                let kept = if ty == PauliType::Z { 2 } else { 0 };
                let others: Vec<usize> = (0..3).filter(|&i| i != kept).collect();
                let frame = others.iter().all(|&i| close(got[i], want_b[i]))
                    || others.iter().all(|&i| close(got[i], -want_b[i]));
                logical_ok &= close(got[kept], want_b[kept]) && frame;
                split_ok &= check_split(&pair, &s, ty, lx, lz)?;
            }
            report.check(
                format!("psi={pname}, phi={fname}: merge mapping on every branch"),
                mapping_ok && (total - 1.0).abs() < TOL,
                format!("total probability {total:.12}"),
            );
            report.check(
                format!("psi={pname}, phi={fname}: merged logical carries psi"),
                logical_ok,
                "up to a Pauli frame",
            );
            report.check(
                format!("psi={pname}, phi={fname}: split copies the logical"),
                split_ok,
                "every junction outcome",
            );
        }
    }
    Ok(report)
}

/// Measures the junction out of a merged state and checks the two patches
/// hold `a|00> + b|11>` (Z-type) or `a|++> + b|-->` (X-type) relative to the
/// merged logical `a|0> + b|1>`, up to a Pauli frame.
fn check_split(pair: &PatchPair, merged: &StateVector, ty: PauliType, lx: &BitVec, lz: &BitVec) -> Result<bool> {
    let before = bloch(merged, lx, lz);
    let d = pair.junction.len();
    let (ax, az, bx, bz) = (
        &pair.a.logical_x[0],
        &pair.a.logical_z[0],
        &pair.b.logical_x[0],
        &pair.b.logical_z[0],
    );
    let mut total = 0.0;
    let mut ok = true;
    for pattern in 0..1u32 << d {
        let mut s = merged.clone();
        let mut prob = 1.0;
        let mut feasible = true;
        for (k, &q) in pair.junction.iter().enumerate() {
            let m = 1u64 << q;
            let outcome = (pattern >> k & 1) as u8;
            let res = match ty {
                PauliType::Z => s.project_pauli(m, 0, outcome),
                PauliType::X => s.project_pauli(0, m, outcome),
            };
            match res {
                Ok(p) => prob *= p,
                Err(Error::ZeroProbability(_)) => {
                    feasible = false;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if !feasible {
            continue;
        }
        total += prob;
        let i = Complex64::new(0.0, 1.0);
        let (x, y, z, zz) = match ty {
            PauliType::Z => (
                s.expect_x(mask_of(&ax.xor(bx))),
                (i * s.expect_xz(mask_of(&ax.xor(bx)), mask_of(az))).re,
                s.expect_z(mask_of(az)),
                s.expect_z(mask_of(&az.xor(bz))),
            ),
            PauliType::X => (
                s.expect_x(mask_of(ax)),
                (i * s.expect_xz(mask_of(ax), mask_of(&az.xor(bz)))).re,
                s.expect_z(mask_of(&az.xor(bz))),
                s.expect_x(mask_of(&ax.xor(bx))),
            ),
        };
        let got = [x, y, z];
        let kept = if ty == PauliType::Z { 2 } else { 0 };
        let others: Vec<usize> = (0..3).filter(|&k| k != kept).collect();
        let frame =
            others.iter().all(|&k| close(got[k], before[k])) || others.iter().all(|&k| close(got[k], -before[k]));
        ok &= close(zz.abs(), 1.0) && close(got[kept], before[kept]) && frame;
    }
    Ok(ok && (total - 1.0).abs() < TOL)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d2_merge_all_axes() {
        let s = build_cubic_stack(2).unwrap();
        for axis in Color::ALL {
            let m = merge_stacks(&s, &s, axis).unwrap();
            assert!(m.report.passed(), "{}", m.report);
            let split = split_stack(&m).unwrap();
            assert!(split.report.passed(), "{}", split.report);
        }
    }

    #[test]
    fn d3_d4_round_trips() {
        for d in [3, 4] {
            let s = build_cubic_stack(d).unwrap();
            for axis in Color::ALL {
                let m = merge_stacks(&s, &s, axis).unwrap();
                assert!(m.report.passed(), "{}", m.report);
                let split = split_stack(&m).unwrap();
                assert!(split.report.passed(), "{}", split.report);
            }
        }
    }

    #[test]
    fn d2_r_junction_plane() {
        let s = build_cubic_stack(2).unwrap();
        let m = merge_stacks(&s, &s, Color::R).unwrap();
        assert!(m.new_qubits.iter().all(|&i| m.merged.lattice.vertices[i].x == 3));
    }

    #[test]
    fn d3_g_merge_counts() {
        let s = build_cubic_stack(3).unwrap();
        let m = merge_stacks(&s, &s, Color::G).unwrap();
        assert!(m.report.passed(), "{}", m.report);
        assert_eq!(m.new_qubits.len(), 12);
        let g = &m.deltas[Color::G.index()];
        assert_eq!(g.new_independent, 13);
        assert_eq!(m.merged.n(), 2 * 51 + 12);
    }

    #[test]
    fn sheet_merge_d3() {
        let s = build_cubic_stack(3).unwrap();
        let sheet = sheet_for_merge(&s, Color::B).unwrap();
        let m = merge_2d3d(&sheet, &s, Color::B).unwrap();
        assert!(m.report.passed(), "{}", m.report);
        assert_eq!(m.ancillas.len(), 3);
        assert_eq!(m.new_z.len(), 4);
        assert_eq!(
            m.modified_stack_x.iter().map(|&(_, a, b)| (a, b)).collect::<Vec<_>>(),
            vec![(3, 5)]
        );
    }

    #[test]
    fn sheet_merge_other_cases() {
        for d in 2..=4 {
            let s = build_cubic_stack(d).unwrap();
            for c in [Color::R, Color::B] {
                let sheet = sheet_for_merge(&s, c).unwrap();
                let m = merge_2d3d(&sheet, &s, c).unwrap();
                assert!(m.report.passed(), "d={d} {c}: {}", m.report);
            }
            assert!(matches!(sheet_junction(&s, Color::G), Err(Error::Unsupported(_))));
        }
    }

    #[test]
    fn mapping_both_types() {
        for ty in [PauliType::Z, PauliType::X] {
            let r = simulate_merge_mapping(2, ty).unwrap();
            assert!(r.passed(), "{r}");
        }
        assert!(matches!(
            simulate_merge_mapping(3, PauliType::Z),
            Err(Error::QubitBudget { .. })
        ));
    }
}
