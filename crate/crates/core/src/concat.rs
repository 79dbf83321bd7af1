//! The [[8,3,2]] cube code and concatenation of a stack into one code.
//!
//! Block qubit `4*a0 + 2*a1 + a2` sits on cube corner `(a0, a1, a2)`. Logical
//! qubit `i` of the cube belongs to the code whose colour has index `i`:
//! its X logical is the face `a_i = 0` and its Z logical the edge along axis
//! `i` through the origin corner.

use serde::Serialize;

use crate::bits::BitVec;
use crate::color::Color;
use crate::css::{brute_distance, min_weight_logical, CssCode, PauliType};
use crate::error::{Error, Result};
use crate::gf2::CheckMatrix;
use crate::report::Report;
use crate::sim::{self, mask_of, Circuit, StateVector, TOL};
use crate::stack::Stack;

pub const BLOCK: usize = 8;

const ENCODER_JSON: &str = include_str!("../data/circuits/encoder_832.json");

/// Encoder wire carrying each cube qubit.
pub const ENCODER_WIRE: [usize; 8] = [2, 3, 6, 7, 0, 1, 4, 5];
/// Encoder input wire of each logical qubit, in r, g, b order.
pub const ENCODER_INPUT: [usize; 3] = [7, 1, 4];

fn corner(q: usize) -> [usize; 3] {
    [q >> 2 & 1, q >> 1 & 1, q & 1]
}

#[derive(Clone, Debug)]
pub struct Code832 {
    pub code: CssCode,
    /// Corner parity per qubit; T goes on parity 0 and T† on parity 1.
    pub vertex_parity: [u8; 8],
}

pub fn code832() -> Code832 {
    let face = |axis: usize, v: usize| BitVec::from_indices(BLOCK, (0..BLOCK).filter(|&q| corner(q)[axis] == v));
    let edge = |axis: usize| {
        BitVec::from_indices(
            BLOCK,
            (0..BLOCK).filter(|&q| (0..3).all(|j| j == axis || corner(q)[j] == 0)),
        )
    };
    let hx = CheckMatrix::from_rows(BLOCK, vec![BitVec::from_indices(BLOCK, 0..BLOCK)]).unwrap();
    let hz = CheckMatrix::from_rows(BLOCK, vec![face(0, 0), face(1, 0), face(2, 0), face(0, 1)]).unwrap();
    let code = CssCode::new("[[8,3,2]]", hx, hz)
        .and_then(|c| c.with_logicals((0..3).map(|i| face(i, 0)).collect(), (0..3).map(edge).collect()))
        .expect("cube code is consistent");
    let mut vertex_parity = [0u8; 8];
    for (q, p) in vertex_parity.iter_mut().enumerate() {
        *p = (corner(q).iter().sum::<usize>() % 2) as u8;
    }
    Code832 { code, vertex_parity }
}

impl Code832 {
    pub fn logical_x(&self, c: Color) -> &BitVec {
        &self.code.logical_x[c.index()]
    }

    pub fn logical_z(&self, c: Color) -> &BitVec {
        &self.code.logical_z[c.index()]
    }
}

/// The codeword `X̄^bits |0̄>` of `code`, as a statevector.
pub fn encode_basis(code: &CssCode, bits: &[u8]) -> Result<StateVector> {
    let mut s = StateVector::zero(code.n)?;
    for row in &code.hx.rows {
        s.project_pauli(mask_of(row), 0, 0)?;
    }
    for (b, lx) in bits.iter().zip(&code.logical_x) {
        if *b == 1 {
            s.apply_x_mask(mask_of(lx));
        }
    }
    Ok(s)
}

pub fn encoder_circuit() -> Circuit {
    Circuit::from_json(ENCODER_JSON).expect("bundled circuit is valid")
}

/// Permutes a state so wire `ENCODER_WIRE[q]` becomes qubit `q`.
fn wires_to_code(state: &StateVector) -> Result<StateVector> {
    let n = state.n();
    let amps = (0..1usize << n)
        .map(|i| {
            let w = (0..n).fold(0, |acc, q| acc | ((i >> q & 1) << ENCODER_WIRE[q]));
            state.amplitudes()[w]
        })
        .collect();
    StateVector::from_amplitudes(amps)
}

fn t_pattern(state: &mut StateVector, parity: &[u8; 8]) {
    for (q, &p) in parity.iter().enumerate() {
        if p == 0 {
            state.t(q);
        } else {
            state.tdg(q);
        }
    }
}

pub fn verify_832_gates() -> Result<Report> {
    let cube = code832();
    let code = &cube.code;
    let mut r = Report::new("[[8,3,2]] gates");
    let enc = encoder_circuit();
    for x in 0..8usize {
        let bits = [(x >> 2 & 1) as u8, (x >> 1 & 1) as u8, (x & 1) as u8];
        let mut input = StateVector::zero(BLOCK)?;
        for (i, &b) in bits.iter().enumerate() {
            if b == 1 {
                input.x(ENCODER_INPUT[i]);
            }
        }
        let out = sim::run(&enc, &input, &sim::Branch::Select(Vec::new()))?;
        let got = wires_to_code(&out.state)?;
        let stabilized = code
            .hx
            .rows
            .iter()
            .all(|s| (got.expect_x(mask_of(s)) - 1.0).abs() < TOL)
            && code
                .hz
                .rows
                .iter()
                .all(|s| (got.expect_z(mask_of(s)) - 1.0).abs() < TOL);
        let values = code
            .logical_z
            .iter()
            .zip(bits)
            .all(|(z, b)| (got.expect_z(mask_of(z)) - if b == 0 { 1.0 } else { -1.0 }).abs() < TOL);
        r.check(
            format!("encoder on |{}{}{}>", bits[0], bits[1], bits[2]),
            stabilized && values && got.approx_eq_up_to_phase(&encode_basis(code, &bits)?, TOL),
            "stabilized, logical Z values match",
        );
    }
    // Each encoded basis state must pick up exactly the CCZ sign.
    let mut phases = Vec::new();
    let mut ok = true;
    for x in 0..8usize {
        let bits = [(x >> 2 & 1) as u8, (x >> 1 & 1) as u8, (x & 1) as u8];
        let ket = encode_basis(code, &bits)?;
        let mut after = ket.clone();
        t_pattern(&mut after, &cube.vertex_parity);
        let overlap = ket.inner(&after);
        let want = if x == 7 { -1.0 } else { 1.0 };
        ok &= (overlap.re - want).abs() < TOL && overlap.im.abs() < TOL;
        phases.push(format!("{x:03b}:{:+.0}", overlap.re));
    }
    r.check("T/T† pattern is logical CCZ on basis states", ok, phases.join(" "));
    let mut amps = vec![num_complex::Complex64::default(); 1 << BLOCK];
    let mut ref_amps = amps.clone();
    for x in 0..8usize {
        let bits = [(x >> 2 & 1) as u8, (x >> 1 & 1) as u8, (x & 1) as u8];
        let ket = encode_basis(code, &bits)?;
        let sign = if x == 7 { -1.0 } else { 1.0 };
        for (i, a) in ket.amplitudes().iter().enumerate() {
            amps[i] += a;
            ref_amps[i] += a * sign;
        }
    }
    let mut plus = StateVector::from_amplitudes(amps)?;
    let reference = StateVector::from_amplitudes(ref_amps)?;
    t_pattern(&mut plus, &cube.vertex_parity);
    r.check(
        "T/T† pattern on encoded |+++>",
        plus.approx_eq_up_to_phase(&reference, TOL),
        "equals encoded CCZ|+++>",
    );
    Ok(r)
}

pub fn verify_code832() -> Result<Report> {
    let cube = code832();
    let code = &cube.code;
    let mut r = Report::new("[[8,3,2]] code");
    r.expect_eq("k", code.k(), 3);
    r.expect_eq("rank Hz", code.rank_z(), 4);
    r.expect_eq("X distance", brute_distance(code, PauliType::X, 4)?, Some(4));
    r.expect_eq("Z distance", brute_distance(code, PauliType::Z, 4)?, Some(2));
    r.check(
        "logical pairing",
        code.check_logicals().is_ok(),
        "X̄_i Z̄_j anticommute iff i = j",
    );
    Ok(r)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConcatCode {
    #[serde(skip)]
    pub code: CssCode,
    /// Block `v` occupies qubits `8v..8v+8`.
    pub block_map: Vec<[usize; 8]>,
    /// Inherited canonical logicals per colour.
    #[serde(skip)]
    pub inherited: [(BitVec, BitVec); 3],
}

fn substitute(v: &BitVec, inner: &BitVec, n_out: usize) -> BitVec {
    BitVec::from_indices(
        n_out,
        v.iter_ones()
            .flat_map(|q| inner.iter_ones().map(move |j| BLOCK * q + j)),
    )
}

/// Encodes the three qubits at each vertex into one cube block.
pub fn concatenate(stack: &Stack) -> Result<ConcatCode> {
    let cube = code832();
    let n = stack.n();
    let n_out = BLOCK * n;
    let mut hx = CheckMatrix::new(n_out);
    let mut hz = CheckMatrix::new(n_out);
    for c in Color::ALL {
        let code = stack.code(c);
        for row in &code.hx.rows {
            hx.push(substitute(row, cube.logical_x(c), n_out));
        }
        for row in &code.hz.rows {
            hz.push(substitute(row, cube.logical_z(c), n_out));
        }
    }
    for v in 0..n {
        let place = |b: &BitVec| BitVec::from_indices(n_out, b.iter_ones().map(|j| BLOCK * v + j));
        for row in &cube.code.hx.rows {
            hx.push(place(row));
        }
        for row in &cube.code.hz.rows {
            hz.push(place(row));
        }
    }
    let code = CssCode::new(format!("concatenated {}", stack.dims()), hx, hz)
        .map_err(|e| Error::Mapping(format!("substituted rows do not commute: {e}")))?;
    let inherited: [(BitVec, BitVec); 3] = Color::ALL.map(|c| {
        (
            substitute(stack.x_bar(c), cube.logical_x(c), n_out),
            substitute(stack.z_bar(c), cube.logical_z(c), n_out),
        )
    });
    let code = code.with_logicals(
        inherited.iter().map(|(x, _)| x.clone()).collect(),
        inherited.iter().map(|(_, z)| z.clone()).collect(),
    )?;
    let block_map = (0..n).map(|v| std::array::from_fn(|j| BLOCK * v + j)).collect();
    Ok(ConcatCode {
        code,
        block_map,
        inherited,
    })
}

pub fn verify_concatenation(stack: &Stack, cc: &ConcatCode) -> Report {
    let n = stack.n();
    let code = &cc.code;
    let mut r = Report::new("concatenation");
    r.expect_eq("qubits", code.n, BLOCK * n);
    r.expect_eq(
        "independent generators (8n-3)",
        code.rank_x() + code.rank_z(),
        BLOCK * n - 3,
    );
    r.expect_eq("k", code.k(), 3);
    let weights_ok = Color::ALL.iter().all(|&c| {
        let base = stack.code(c);
        let offset: usize = Color::ALL.iter().take(c.index()).map(|&o| stack.code(o).hx.len()).sum();
        base.hx
            .rows
            .iter()
            .enumerate()
            .all(|(i, row)| code.hx.rows[offset + i].weight() == 4 * row.weight())
    });
    r.check("mapped X checks cover whole faces", weights_ok, "weight = 4 x original");
    r.check(
        "inherited logicals",
        code.check_logicals().is_ok(),
        format!(
            "Z weights {:?}",
            cc.inherited.iter().map(|(_, z)| z.weight()).collect::<Vec<_>>()
        ),
    );
    r
}

/// Certifies that no logical of weight at most `max_weight` exists and the
/// inherited Z logicals are valid, which pins the distance when they weigh
/// `max_weight + 1`.
pub fn verify_colorcode_distance(cc: &ConcatCode, max_weight: usize) -> Result<Report> {
    let mut r = Report::new("colour code distance");
    for ty in [PauliType::X, PauliType::Z] {
        let found = min_weight_logical(&cc.code, ty, max_weight)?;
        r.check(
            format!("no {ty:?} logical of weight <= {max_weight}"),
            found.is_none(),
            match &found {
                Some(v) => format!("found weight {} at {:?}", v.weight(), v.support()),
                None => "exhaustive scan empty".to_string(),
            },
        );
    }
    let zw: Vec<usize> = cc.inherited.iter().map(|(_, z)| z.weight()).collect();
    r.check(
        "inherited Z logicals have weight 4",
        cc.code.check_logicals().is_ok() && zw.iter().all(|&w| w == 4),
        format!("weights {zw:?}"),
    );
    Ok(r)
}

/// Copy of `cc` with the five cube stabilizers of block `v` removed.
pub fn delete_block(cc: &ConcatCode, v: usize) -> Result<ConcatCode> {
    let block = BitVec::from_indices(cc.code.n, cc.block_map[v]);
    let keep = |m: &CheckMatrix| {
        CheckMatrix::from_rows(
            m.n,
            m.rows.iter().filter(|row| !row.is_subset_of(&block)).cloned().collect(),
        )
    };
    let code = CssCode::new(cc.code.label.clone(), keep(&cc.code.hx)?, keep(&cc.code.hz)?)?;
    Ok(ConcatCode {
        code,
        block_map: cc.block_map.clone(),
        inherited: cc.inherited.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stack::build_cubic_stack;

    #[test]
    fn cube_code() {
        let r = verify_code832().unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn gates() {
        let r = verify_832_gates().unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn d2_concatenation() {
        let s = build_cubic_stack(2).unwrap();
        let cc = concatenate(&s).unwrap();
        let r = verify_concatenation(&s, &cc);
        assert!(r.passed(), "{r}");
        assert_eq!(cc.code.n, 96);
        assert!(cc.inherited.iter().all(|(_, z)| z.weight() == 4));
    }

    #[test]
    fn deleting_a_block_changes_k() {
        let s = build_cubic_stack(2).unwrap();
        let cc = concatenate(&s).unwrap();
        let broken = delete_block(&cc, 5).unwrap();
        assert_ne!(broken.code.k(), 3);
    }

    #[test]
    fn d2_distance_four() {
        let cc = concatenate(&build_cubic_stack(2).unwrap()).unwrap();
        let r = verify_colorcode_distance(&cc, 3).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn d3_keeps_three_qubits() {
        let s = build_cubic_stack(3).unwrap();
        let cc = concatenate(&s).unwrap();
        assert!(verify_concatenation(&s, &cc).passed());
    }
}
