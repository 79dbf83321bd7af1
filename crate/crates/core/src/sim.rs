//! Dense statevector simulation for small circuits.
//!
//! Qubit `q` is bit `q` of the amplitude index. Circuits are gate lists with
//! optional classical control by the parity of earlier measurement results.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::report::Report;

pub const MAX_QUBITS: usize = 16;
pub const TOL: f64 = 1e-10;
/// Outcomes with smaller probability are treated as impossible.
pub const ZERO_PROB: f64 = 1e-12;

type C = Complex64;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C>,
}

pub fn mask_of(v: &BitVec) -> u64 {
    assert!(v.len() <= 64);
    v.iter_ones().fold(0, |m, i| m | 1 << i)
}

impl StateVector {
    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::QubitBudget {
                needed: n,
                limit: MAX_QUBITS,
            });
        }
        let mut amps = vec![C::default(); 1 << n];
        amps[index] = c(1.0, 0.0);
        Ok(Self { n, amps })
    }

    pub fn from_amplitudes(amps: Vec<C>) -> Result<Self> {
        let len = amps.len();
        if !len.is_power_of_two() {
            return Err(Error::LengthMismatch {
                expected: len.next_power_of_two(),
                found: len,
            });
        }
        let n = len.trailing_zeros() as usize;
        if n > MAX_QUBITS {
            return Err(Error::QubitBudget {
                needed: n,
                limit: MAX_QUBITS,
            });
        }
        let mut s = Self { n, amps };
        s.normalize()?;
        Ok(s)
    }

    /// Single-qubit state `a|0> + b|1>`.
    pub fn qubit(a: C, b: C) -> Result<Self> {
        Self::from_amplitudes(vec![a, b])
    }

    pub fn plus() -> Self {
        Self::qubit(c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)).unwrap()
    }

    pub fn minus() -> Self {
        Self::qubit(c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)).unwrap()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) -> Result<f64> {
        let norm = self.norm();
        if norm * norm < ZERO_PROB {
            return Err(Error::ZeroProbability(norm * norm));
        }
        for a in &mut self.amps {
            *a /= norm;
        }
        Ok(norm)
    }

    /// `self` on the low qubits, `other` on the high ones.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let n = self.n + other.n;
        if n > MAX_QUBITS {
            return Err(Error::QubitBudget {
                needed: n,
                limit: MAX_QUBITS,
            });
        }
        let mut amps = Vec::with_capacity(1 << n);
        for b in &other.amps {
            for a in &self.amps {
                amps.push(a * b);
            }
        }
        Ok(Self { n, amps })
    }

    pub fn inner(&self, other: &Self) -> C {
        assert_eq!(self.n, other.n);
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// Equality up to a global phase, within `tol` per amplitude.
    pub fn approx_eq_up_to_phase(&self, other: &Self, tol: f64) -> bool {
        if self.n != other.n {
            return false;
        }
        let Some(k) = self.amps.iter().position(|a| a.norm() > tol) else {
            return other.amps.iter().all(|a| a.norm() <= tol);
        };
        if other.amps[k].norm() <= tol {
            return false;
        }
        let phase = other.amps[k] / self.amps[k];
        let phase = phase / phase.norm();
        self.amps
            .iter()
            .zip(&other.amps)
            .all(|(a, b)| (a * phase - b).norm() <= tol)
    }

    /// Exact equality within `tol` per amplitude, global phase included.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.n == other.n && self.amps.iter().zip(&other.amps).all(|(a, b)| (a - b).norm() <= tol)
    }

    pub fn apply_1q(&mut self, q: usize, m: [[C; 2]; 2]) {
        let bit = 1 << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn phase_where(&mut self, mask: usize, phase: C) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *a *= phase;
            }
        }
    }

    pub fn h(&mut self, q: usize) {
        let h = c(FRAC_1_SQRT_2, 0.0);
        self.apply_1q(q, [[h, h], [h, -h]]);
    }

    pub fn x(&mut self, q: usize) {
        let bit = 1 << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                self.amps.swap(i, i | bit);
            }
        }
    }

    pub fn z(&mut self, q: usize) {
        self.phase_where(1 << q, c(-1.0, 0.0));
    }

    pub fn s(&mut self, q: usize) {
        self.phase_where(1 << q, c(0.0, 1.0));
    }

    pub fn sdg(&mut self, q: usize) {
        self.phase_where(1 << q, c(0.0, -1.0));
    }

    pub fn t(&mut self, q: usize) {
        self.phase_where(1 << q, C::from_polar(1.0, std::f64::consts::FRAC_PI_4));
    }

    pub fn tdg(&mut self, q: usize) {
        self.phase_where(1 << q, C::from_polar(1.0, -std::f64::consts::FRAC_PI_4));
    }

    pub fn cx(&mut self, control: usize, target: usize) {
        let (cb, tb) = (1 << control, 1 << target);
        for i in 0..self.amps.len() {
            if i & cb != 0 && i & tb == 0 {
                self.amps.swap(i, i | tb);
            }
        }
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        self.phase_where(1 << a | 1 << b, c(-1.0, 0.0));
    }

    pub fn ccz(&mut self, a: usize, b: usize, t: usize) {
        self.phase_where(1 << a | 1 << b | 1 << t, c(-1.0, 0.0));
    }

    /// Applies `X^xmask`.
    pub fn apply_x_mask(&mut self, xmask: u64) {
        let x = xmask as usize;
        if x == 0 {
            return;
        }
        let old = self.amps.clone();
        for (i, a) in old.into_iter().enumerate() {
            self.amps[i ^ x] = a;
        }
    }

    /// Applies `Z^zmask`.
    pub fn apply_z_mask(&mut self, zmask: u64) {
        let z = zmask as usize;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i & z).count_ones() % 2 == 1 {
                *a = -*a;
            }
        }
    }

    pub fn expect_z(&self, zmask: u64) -> f64 {
        let z = zmask as usize;
        self.amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                if (i & z).count_ones() % 2 == 1 {
                    -a.norm_sqr()
                } else {
                    a.norm_sqr()
                }
            })
            .sum()
    }

    pub fn expect_x(&self, xmask: u64) -> f64 {
        let mut flipped = self.clone();
        flipped.apply_x_mask(xmask);
        self.inner(&flipped).re
    }

    /// `<psi| X^xmask Z^zmask |psi>`.
    pub fn expect_xz(&self, xmask: u64, zmask: u64) -> C {
        let mut p = self.clone();
        p.apply_z_mask(zmask);
        p.apply_x_mask(xmask);
        self.inner(&p)
    }

    /// Projects onto the `(-1)^outcome` eigenspace of `X^xmask` (or `Z^zmask`)
    /// and renormalises; returns the outcome probability.
    pub fn project_pauli(&mut self, xmask: u64, zmask: u64, outcome: u8) -> Result<f64> {
        assert!(xmask == 0 || zmask == 0, "only pure X or pure Z products are supported");
        let mut p = self.clone();
        if xmask != 0 {
            p.apply_x_mask(xmask);
        } else {
            p.apply_z_mask(zmask);
        }
        let sign = if outcome == 0 { 1.0 } else { -1.0 };
        for (a, b) in self.amps.iter_mut().zip(&p.amps) {
            *a = (*a + sign * b) * 0.5;
        }
        let prob = self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>();
        if prob < ZERO_PROB {
            return Err(Error::ZeroProbability(prob));
        }
        let norm = prob.sqrt();
        for a in &mut self.amps {
            *a /= norm;
        }
        Ok(prob)
    }

    pub fn outcome_probability(&self, xmask: u64, zmask: u64, outcome: u8) -> f64 {
        let e = if xmask != 0 {
            self.expect_x(xmask)
        } else {
            self.expect_z(zmask)
        };
        if outcome == 0 {
            (1.0 + e) / 2.0
        } else {
            (1.0 - e) / 2.0
        }
    }

    /// State of `keep` when the full state is a product across the split.
    ///
    /// The result is normalised with an arbitrary global phase; qubit `keep[i]`
    /// becomes qubit `i`.
    pub fn factor_out(&self, keep: &[usize], tol: f64) -> Result<StateVector> {
        let rest: Vec<usize> = (0..self.n).filter(|q| !keep.contains(q)).collect();
        let (nk, nr) = (keep.len(), rest.len());
        let compose = |k: usize, r: usize| {
            let mut i = 0usize;
            for (b, &q) in keep.iter().enumerate() {
                if k >> b & 1 == 1 {
                    i |= 1 << q;
                }
            }
            for (b, &q) in rest.iter().enumerate() {
                if r >> b & 1 == 1 {
                    i |= 1 << q;
                }
            }
            i
        };
        let col = |r: usize| -> Vec<C> { (0..1 << nk).map(|k| self.amps[compose(k, r)]).collect() };
        let best = (0..1usize << nr)
            .max_by(|&a, &b| {
                let na: f64 = col(a).iter().map(|x| x.norm_sqr()).sum();
                let nb: f64 = col(b).iter().map(|x| x.norm_sqr()).sum();
                na.partial_cmp(&nb).unwrap()
            })
            .unwrap();
        let phi = StateVector::from_amplitudes(col(best))?;
        for r in 0..1usize << nr {
            let v = col(r);
            let coef: C = phi.amps.iter().zip(&v).map(|(p, x)| p.conj() * x).sum();
            if phi.amps.iter().zip(&v).any(|(p, x)| (p * coef - x).norm() > tol) {
                return Err(Error::Verification(format!(
                    "qubits {keep:?} are entangled with the rest of the register"
                )));
            }
        }
        Ok(phi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GateKind {
    H,
    X,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    CX,
    CZ,
    CCZ,
    MeasureX,
    MeasureZ,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::CX | GateKind::CZ => 2,
            GateKind::CCZ => 3,
            _ => 1,
        }
    }

    pub fn is_measurement(self) -> bool {
        matches!(self, GateKind::MeasureX | GateKind::MeasureZ)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    /// Applied only when the parity of these measurement results is odd.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<Vec<usize>>,
}

impl Gate {
    pub fn new(kind: GateKind, targets: &[usize]) -> Self {
        Self {
            kind,
            targets: targets.to_vec(),
            condition: None,
        }
    }

    pub fn when(mut self, measurements: &[usize]) -> Self {
        self.condition = Some(measurements.to_vec());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
}

/// How measurements are resolved during [`run`].
#[derive(Clone, Debug)]
pub enum Branch {
    /// Forces the listed outcomes in measurement order.
    Select(Vec<u8>),
    /// Samples outcomes from a seeded generator.
    Sample(u64),
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub state: StateVector,
    pub outcomes: Vec<u8>,
    /// Probability of the recorded outcome sequence.
    pub probability: f64,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Circuit = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> &mut Self {
        self.gates.push(gate);
        self
    }

    pub fn measurement_count(&self) -> usize {
        self.gates.iter().filter(|g| g.kind.is_measurement()).count()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits > MAX_QUBITS {
            return Err(Error::QubitBudget {
                needed: self.n_qubits,
                limit: MAX_QUBITS,
            });
        }
        let mut measured = 0;
        for (i, g) in self.gates.iter().enumerate() {
            if g.targets.len() != g.kind.arity() || g.targets.iter().any(|&t| t >= self.n_qubits) {
                return Err(Error::Parse(format!(
                    "gate {i} ({:?}) has bad targets {:?}",
                    g.kind, g.targets
                )));
            }
            let mut t = g.targets.clone();
            t.sort_unstable();
            t.dedup();
            if t.len() != g.targets.len() {
                return Err(Error::Parse(format!("gate {i} repeats a target")));
            }
            if let Some(cond) = &g.condition {
                if cond.iter().any(|&m| m >= measured) {
                    return Err(Error::Parse(format!("gate {i} is conditioned on a later measurement")));
                }
            }
            if g.kind.is_measurement() {
                measured += 1;
            }
        }
        Ok(())
    }

    /// Appends `other` with its qubit `q` placed on `map[q]`.
    pub fn append_mapped(&mut self, other: &Circuit, map: &[usize]) {
        let offset = self.measurement_count();
        for g in &other.gates {
            self.gates.push(Gate {
                kind: g.kind,
                targets: g.targets.iter().map(|&t| map[t]).collect(),
                condition: g.condition.as_ref().map(|c| c.iter().map(|m| m + offset).collect()),
            });
        }
    }
}

fn apply_unitary(state: &mut StateVector, g: &Gate) {
    let t = &g.targets;
    match g.kind {
        GateKind::H => state.h(t[0]),
        GateKind::X => state.x(t[0]),
        GateKind::Z => state.z(t[0]),
        GateKind::S => state.s(t[0]),
        GateKind::Sdg => state.sdg(t[0]),
        GateKind::T => state.t(t[0]),
        GateKind::Tdg => state.tdg(t[0]),
        GateKind::CX => state.cx(t[0], t[1]),
        GateKind::CZ => state.cz(t[0], t[1]),
        GateKind::CCZ => state.ccz(t[0], t[1], t[2]),
        GateKind::MeasureX | GateKind::MeasureZ => unreachable!(),
    }
}

fn measurement_masks(g: &Gate) -> (u64, u64) {
    let m = 1u64 << g.targets[0];
    if g.kind == GateKind::MeasureX {
        (m, 0)
    } else {
        (0, m)
    }
}

fn condition_holds(g: &Gate, outcomes: &[u8]) -> bool {
    g.condition
        .as_ref()
        .is_none_or(|c| c.iter().fold(0, |acc, &m| acc ^ outcomes[m]) == 1)
}

pub fn run(circuit: &Circuit, input: &StateVector, branch: &Branch) -> Result<RunOutcome> {
    circuit.validate()?;
    if input.n != circuit.n_qubits {
        return Err(Error::LengthMismatch {
            expected: circuit.n_qubits,
            found: input.n,
        });
    }
    let mut state = input.clone();
    let mut outcomes = Vec::new();
    let mut probability = 1.0;
    let mut rng = match branch {
        Branch::Sample(seed) => Some(ChaCha8Rng::seed_from_u64(*seed)),
        Branch::Select(_) => None,
    };
    for g in &circuit.gates {
        if !condition_holds(g, &outcomes) {
            continue;
        }
        if g.kind.is_measurement() {
            let (xm, zm) = measurement_masks(g);
            let outcome = match (&branch, rng.as_mut()) {
                (Branch::Select(sel), _) => *sel.get(outcomes.len()).ok_or_else(|| {
                    Error::Parse(format!(
                        "branch selector has no entry for measurement {}",
                        outcomes.len()
                    ))
                })?,
                (_, Some(rng)) => {
                    let p0 = state.outcome_probability(xm, zm, 0);
                    u8::from(rng.gen::<f64>() >= p0)
                }
                _ => unreachable!(),
            };
            probability *= state.project_pauli(xm, zm, outcome)?;
            outcomes.push(outcome);
        } else {
            apply_unitary(&mut state, g);
        }
    }
    Ok(RunOutcome {
        state,
        outcomes,
        probability,
    })
}

/// Every measurement branch with nonzero probability.
pub fn run_all_branches(circuit: &Circuit, input: &StateVector) -> Result<Vec<RunOutcome>> {
    let m = circuit.measurement_count();
    let mut out = Vec::new();
    for sel in 0..1u32 << m {
        let outcomes: Vec<u8> = (0..m).map(|i| (sel >> i & 1) as u8).collect();
        match run(circuit, input, &Branch::Select(outcomes)) {
            Ok(r) => out.push(r),
            Err(Error::ZeroProbability(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

const TELEPORTED_H_JSON: &str = include_str!("../data/circuits/teleported_h.json");
const CCZ_INJECTION_JSON: &str = include_str!("../data/circuits/ccz_injection.json");

pub fn teleported_h_circuit() -> Circuit {
    Circuit::from_json(TELEPORTED_H_JSON).expect("bundled circuit is valid")
}

pub fn ccz_injection_circuit() -> Circuit {
    Circuit::from_json(CCZ_INJECTION_JSON).expect("bundled circuit is valid")
}

/// Chained teleported H gates over three qubits, passing the state along `path`.
///
/// Each hop uses a fresh `|+>` on its destination; a measured qubit is
/// returned to `|+>` by a Z conditioned on its result before it is reused.
pub fn teleport_chain(path: &[usize]) -> Circuit {
    let base = teleported_h_circuit();
    let mut circ = Circuit::new(3);
    let mut last_measure: [Option<usize>; 3] = [None; 3];
    let mut fresh = [true; 3];
    fresh[path[0]] = false;
    for hop in path.windows(2) {
        let (src, dst) = (hop[0], hop[1]);
        if !fresh[dst] {
            let m = last_measure[dst].expect("reused qubit was measured");
            // Measured qubits sit in |+> or |->; undo the latter, then cancel the H
            // in the hop so the destination starts from |+>.
            circ.push(Gate::new(GateKind::Z, &[dst]).when(&[m]));
            circ.push(Gate::new(GateKind::H, &[dst]));
        }
        last_measure[src] = Some(circ.measurement_count());
        circ.append_mapped(&base, &[src, dst]);
        fresh[dst] = false;
    }
    circ
}

fn single_qubit_inputs() -> Vec<(String, StateVector)> {
    let s = FRAC_1_SQRT_2;
    vec![
        ("|0>".into(), StateVector::qubit(c(1.0, 0.0), c(0.0, 0.0)).unwrap()),
        ("|1>".into(), StateVector::qubit(c(0.0, 0.0), c(1.0, 0.0)).unwrap()),
        ("|+>".into(), StateVector::plus()),
        ("|->".into(), StateVector::minus()),
        ("|+i>".into(), StateVector::qubit(c(s, 0.0), c(0.0, s)).unwrap()),
        (
            "generic".into(),
            StateVector::qubit(c(0.6, 0.0), c(0.0, 0.8) * C::from_polar(1.0, 0.3)).unwrap(),
        ),
    ]
}

fn hadamard_of(psi: &StateVector) -> StateVector {
    let mut h = psi.clone();
    h.h(0);
    h
}

fn check_branches(r: &mut Report, name: &str, runs: &[RunOutcome], mut ok: impl FnMut(&RunOutcome) -> bool) {
    let total: f64 = runs.iter().map(|o| o.probability).sum();
    let all = runs.iter().all(&mut ok);
    r.check(
        name,
        all && (total - 1.0).abs() < TOL,
        format!("{} branches, total probability {total:.12}", runs.len()),
    );
}

pub fn verify_teleported_h() -> Result<Report> {
    let mut r = Report::new("teleported H");
    let base = teleported_h_circuit();
    for (label, psi) in single_qubit_inputs() {
        let input = psi.tensor(&StateVector::zero(1)?)?;
        let runs = run_all_branches(&base, &input)?;
        let want = hadamard_of(&psi);
        check_branches(&mut r, &format!("H on {label}"), &runs, |o| {
            o.state
                .factor_out(&[1], TOL)
                .is_ok_and(|out| out.approx_eq_up_to_phase(&want, TOL))
        });
    }
    // Two hops transfer the state, three hops apply H to it on the original qubit.
    for (path, apply_h, name) in [
        (vec![0, 1, 2], false, "r->g->b transfer"),
        (vec![0, 1, 2, 0], true, "r->g->b->r applies H"),
    ] {
        let circ = teleport_chain(&path);
        let dst = *path.last().unwrap();
        for (label, psi) in single_qubit_inputs() {
            let input = psi.tensor(&StateVector::zero(2)?)?;
            let runs = run_all_branches(&circ, &input)?;
            let want = if apply_h { hadamard_of(&psi) } else { psi.clone() };
            check_branches(&mut r, &format!("{name} on {label}"), &runs, |o| {
                o.state
                    .factor_out(&[dst], TOL)
                    .is_ok_and(|out| out.approx_eq_up_to_phase(&want, TOL))
            });
        }
    }
    Ok(r)
}

fn ccz_reference(input: &StateVector) -> StateVector {
    let mut s = input.clone();
    s.ccz(0, 1, 2);
    s
}

pub fn verify_ccz_injection() -> Result<Report> {
    let mut r = Report::new("CCZ injection");
    let circ = ccz_injection_circuit();
    let mut inputs: Vec<(String, StateVector)> = (0..8)
        .map(|x| Ok((format!("|{:03b}>", x), StateVector::basis(3, x)?)))
        .collect::<Result<_>>()?;
    let mut ghz = vec![C::default(); 8];
    ghz[0] = c(FRAC_1_SQRT_2, 0.0);
    ghz[7] = c(FRAC_1_SQRT_2, 0.0);
    inputs.push(("(|000>+|111>)/sqrt2".into(), StateVector::from_amplitudes(ghz)?));
    let generic: Vec<C> = (0..8)
        .map(|k| C::from_polar(1.0 + k as f64 / 7.0, 0.4 * k as f64))
        .collect();
    inputs.push(("generic".into(), StateVector::from_amplitudes(generic)?));
    for (label, psi) in inputs {
        // Data enters on wires 3..6; the CCZ resource is made on wires 0..3.
        let input = StateVector::zero(3)?.tensor(&psi)?;
        let runs = run_all_branches(&circ, &input)?;
        let want = ccz_reference(&psi);
        check_branches(&mut r, &format!("CCZ on {label}"), &runs, |o| {
            o.state
                .factor_out(&[0, 1, 2], TOL)
                .is_ok_and(|out| out.approx_eq_up_to_phase(&want, TOL))
        });
    }
    let mut id = Report::new("");
    for x in 0..4 {
        let basis = StateVector::basis(2, x)?;
        let mut lhs = basis.clone();
        lhs.h(1);
        lhs.cx(0, 1);
        lhs.h(1);
        let mut rhs = basis;
        rhs.cz(0, 1);
        id.check(format!("H_t CX H_t = CZ on |{x:02b}>"), lhs.approx_eq(&rhs, TOL), "");
    }
    r.check("H_t CX H_t = CZ", id.passed(), "all computational basis inputs");
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_is_involution() {
        let mut s = StateVector::zero(1).unwrap();
        s.h(0);
        s.h(0);
        assert!(s.approx_eq(&StateVector::zero(1).unwrap(), TOL));
    }

    #[test]
    fn ccz_on_111() {
        let mut s = StateVector::basis(3, 7).unwrap();
        s.ccz(0, 1, 2);
        assert!((s.amplitudes()[7] + c(1.0, 0.0)).norm() < TOL);
    }

    #[test]
    fn measure_plus() {
        let mut circ = Circuit::new(1);
        circ.push(Gate::new(GateKind::MeasureZ, &[0]));
        let out = run(&circ, &StateVector::plus(), &Branch::Select(vec![0])).unwrap();
        assert!((out.probability - 0.5).abs() < TOL);
        assert!(out.state.approx_eq(&StateVector::zero(1).unwrap(), TOL));
        let zero = StateVector::zero(1).unwrap();
        assert!(matches!(
            run(&circ, &zero, &Branch::Select(vec![1])),
            Err(Error::ZeroProbability(_))
        ));
        let sampled = run(&circ, &StateVector::plus(), &Branch::Sample(3)).unwrap();
        assert_eq!(sampled.outcomes.len(), 1);
    }

    #[test]
    fn qubit_budget() {
        assert!(matches!(StateVector::zero(17), Err(Error::QubitBudget { .. })));
    }

    #[test]
    fn norm_preserved() {
        let mut s = StateVector::zero(4).unwrap();
        for q in 0..4 {
            s.h(q);
            s.t(q);
        }
        s.cx(0, 3);
        s.ccz(1, 2, 3);
        s.sdg(2);
        assert!((s.norm() - 1.0).abs() < TOL);
    }

    #[test]
    fn teleported_h_examples() {
        let input = StateVector::zero(2).unwrap();
        for o in run_all_branches(&teleported_h_circuit(), &input).unwrap() {
            let out = o.state.factor_out(&[1], TOL).unwrap();
            assert!(out.approx_eq_up_to_phase(&StateVector::plus(), TOL));
        }
    }

    #[test]
    fn oracles_pass() {
        let r = verify_teleported_h().unwrap();
        assert!(r.passed(), "{r}");
        let r = verify_ccz_injection().unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn circuit_validation() {
        let mut circ = Circuit::new(2);
        circ.push(Gate::new(GateKind::X, &[1]).when(&[0]));
        assert!(circ.validate().is_err());
        let mut circ = Circuit::new(2);
        circ.push(Gate::new(GateKind::CZ, &[1, 1]));
        assert!(circ.validate().is_err());
    }

    #[test]
    fn circuit_json_round_trip() {
        let circ = ccz_injection_circuit();
        let back = Circuit::from_json(&serde_json::to_string(&circ).unwrap()).unwrap();
        assert_eq!(back, circ);
    }
}
