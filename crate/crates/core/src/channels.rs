//! Elementary channels of the per-round Markov model.
//!
//! Every channel is written as a weighted sum of `K ρ K†` terms with sparse
//! Kraus-like operators, so a round costs O(dim²) instead of dense products.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::bell::{BellLabel, FlipKind};
use crate::error::{probability, Error, Result};
use crate::state::{joint_index, JointState, Level2p, DIM, DIM_2P};

type Mat = DMatrix<Complex64>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Sparse operator on the joint space, stored as `(row, col, value)` entries.
#[derive(Debug, Clone, Default)]
pub struct SparseOp {
    entries: Vec<(usize, usize, Complex64)>,
}

impl SparseOp {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries.push((row, col, value));
    }

    pub fn entries(&self) -> &[(usize, usize, Complex64)] {
        &self.entries
    }

    /// Diagonal projector onto the basis states selected by `keep`.
    pub fn projector(keep: impl Fn(usize) -> bool) -> Self {
        let mut op = Self::new();
        for i in (0..DIM).filter(|&i| keep(i)) {
            op.push(i, i, c(1.0));
        }
        op
    }

    /// Acts on the 2[p] factor only: `1₁₃ ⊗ Σ value |to><from|`.
    pub fn on_2p(map: &[(Level2p, Level2p, Complex64)]) -> Self {
        let mut op = Self::new();
        for b in BellLabel::ALL {
            for &(from, to, v) in map {
                op.push(joint_index(b, to), joint_index(b, from), v);
            }
        }
        op
    }

    /// Acts on the pair-13 factor only.
    pub fn on_pair13(map: &[(BellLabel, BellLabel, f64)]) -> Self {
        let mut op = Self::new();
        for &(from, to, v) in map {
            for j in 0..DIM_2P {
                op.push(DIM_2P * to.index() + j, DIM_2P * from.index() + j, c(v));
            }
        }
        op
    }

    /// Accumulates `scale · K ρ K†` into `out`.
    pub fn sandwich_into(&self, rho: &Mat, scale: f64, out: &mut Mat) {
        for &(r1, c1, v1) in &self.entries {
            let v1 = v1 * scale;
            for &(r2, c2, v2) in &self.entries {
                out[(r1, r2)] += v1 * rho[(c1, c2)] * v2.conj();
            }
        }
    }

    /// Applies the operator to a state vector.
    pub fn apply_vec(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![c(0.0); psi.len()];
        for &(r, col, v) in &self.entries {
            out[r] += v * psi[col];
        }
        out
    }

    pub fn to_dense(&self) -> Mat {
        let mut m = Mat::zeros(DIM, DIM);
        for &(r, col, v) in &self.entries {
            m[(r, col)] += v;
        }
        m
    }
}

/// Remote or local spin targeted by dephasing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Nv1,
    Nv2,
    Nv3,
}

impl Spin {
    pub const ALL: [Spin; 3] = [Spin::Nv1, Spin::Nv2, Spin::Nv3];
}

/// `(1 ⊗ X)` on a Bell pair: φ+ ↔ ψ+, φ− ↔ ψ−.
fn second_factor_x(label: BellLabel) -> (BellLabel, f64) {
    (label.letter_toggled(), 1.0)
}

/// `(X ⊗ 1)` on a Bell pair; same table as a polarisation flip.
fn first_factor_x(label: BellLabel) -> (BellLabel, f64) {
    FlipKind::Polarisation.bell_map(label)
}

pub(crate) fn projector_2p(level: Level2p) -> SparseOp {
    SparseOp::on_2p(&[(level, level, c(1.0))])
}

pub(crate) fn complement_2p(levels: &[Level2p]) -> SparseOp {
    let keep: Vec<Level2p> = Level2p::ALL
        .into_iter()
        .filter(|l| !levels.contains(l))
        .collect();
    SparseOp::on_2p(&keep.iter().map(|&l| (l, l, c(1.0))).collect::<Vec<_>>())
}

/// Transfer of one photon-present Bell level into an excited level.
pub(crate) fn transfer_op(from: BellLabel, to: Level2p) -> SparseOp {
    SparseOp::on_2p(&[(Level2p::Bell(from), to, c(1.0))])
}

/// Kraus operators `<b|_photon` mapping the photon-present block onto the
/// spin-only levels, one per photon basis state `b`.
pub(crate) fn photon_trace_ops() -> [SparseOp; 2] {
    let mut ops = [SparseOp::new(), SparseOp::new()];
    for (b, op) in ops.iter_mut().enumerate() {
        let mut map = Vec::new();
        for label in BellLabel::ALL {
            let amps = label.amplitudes();
            for s in 0..2 {
                // photon is the first factor of pair 2p
                let a = amps[2 * b + s];
                if a != 0.0 {
                    map.push((Level2p::Bell(label), Level2p::spin(s), c(a)));
                }
            }
        }
        *op = SparseOp::on_2p(&map);
    }
    ops
}

/// Kraus operators taking A2 to spin 2 as if the photon were re-emitted into
/// ψ−₂ₚ and then lost.
pub(crate) fn a2_decay_ops() -> [SparseOp; 2] {
    let amps = BellLabel::PsiMinus.amplitudes();
    let mut ops = [SparseOp::new(), SparseOp::new()];
    for (b, op) in ops.iter_mut().enumerate() {
        let map: Vec<_> = (0..2)
            .filter(|&s| amps[2 * b + s] != 0.0)
            .map(|s| (Level2p::A2, Level2p::spin(s), c(amps[2 * b + s])))
            .collect();
        *op = SparseOp::on_2p(&map);
    }
    ops
}

/// Unitary exchanging `|+1> ↔ |-1>` on one spin.
pub(crate) fn spin_flip_op(spin: Spin) -> SparseOp {
    match spin {
        Spin::Nv1 => SparseOp::on_pair13(&BellLabel::ALL.map(|b| {
            let (to, s) = first_factor_x(b);
            (b, to, s)
        })),
        Spin::Nv3 => SparseOp::on_pair13(&BellLabel::ALL.map(|b| {
            let (to, s) = second_factor_x(b);
            (b, to, s)
        })),
        Spin::Nv2 => {
            let mut map: Vec<_> = BellLabel::ALL
                .iter()
                .map(|&b| {
                    let (to, s) = second_factor_x(b);
                    (Level2p::Bell(b), Level2p::Bell(to), c(s))
                })
                .collect();
            map.push((Level2p::A2, Level2p::A2, c(1.0)));
            map.push((Level2p::A1, Level2p::A1, c(1.0)));
            map.push((Level2p::SpinUp, Level2p::SpinDown, c(1.0)));
            map.push((Level2p::SpinDown, Level2p::SpinUp, c(1.0)));
            SparseOp::on_2p(&map)
        }
    }
}

/// Photon flip as a unitary on the joint space; identity outside the
/// photon-present block.
pub fn flip_op(kind: FlipKind) -> SparseOp {
    let mut map: Vec<_> = BellLabel::ALL
        .iter()
        .map(|&b| {
            let (to, s) = kind.bell_map(b);
            (Level2p::Bell(b), Level2p::Bell(to), c(s))
        })
        .collect();
    for l in [Level2p::A2, Level2p::A1, Level2p::SpinUp, Level2p::SpinDown] {
        map.push((l, l, c(1.0)));
    }
    SparseOp::on_2p(&map)
}

fn finish(m: Mat, weight: f64) -> Result<JointState> {
    JointState::from_unnormalized(m, weight)
        .ok_or_else(|| Error::Invariant("channel produced a vanishing state".into()))
}

/// Incoherent transfer of `from` into `to` with probability `p`: the branch
/// in which the transition is attempted is projected, the other is untouched.
fn incoherent_transfer(rho: &Mat, from: BellLabel, to: Level2p, p: f64) -> Mat {
    if p == 0.0 {
        return rho.clone();
    }
    let mut out = rho * c(1.0 - p);
    transfer_op(from, to).sandwich_into(rho, p, &mut out);
    complement_2p(&[Level2p::Bell(from)]).sandwich_into(rho, p, &mut out);
    out
}

/// Step 1: absorption. ψ−₂ₚ goes to A2 with probability `p_abs`, ψ+₂ₚ goes to
/// A1 with probability `p_abs · r_a1`.
pub fn absorption_channel(state: &JointState, p_abs: f64, r_a1: f64) -> Result<JointState> {
    let p_abs = probability("p_abs", p_abs)?;
    let r_a1 = probability("r_a1", r_a1)?;
    let rho = incoherent_transfer(state.density(), BellLabel::PsiMinus, Level2p::A2, p_abs);
    let rho = incoherent_transfer(&rho, BellLabel::PsiPlus, Level2p::A1, p_abs * r_a1);
    finish(rho, state.weight())
}

/// Result of the heralding measurement on one branch.
#[derive(Debug, Clone)]
pub struct QndOutcome {
    /// Click probability conditioned on the input branch.
    pub p_click: f64,
    /// Part of `p_click` that comes from dark counts outside A2.
    pub p_false_click: f64,
    pub click: Option<JointState>,
    pub no_click: Option<JointState>,
}

/// Step 2: projective A2 measurement read out with efficiency `p_qnd` and
/// dark-count probability `p_dark` on the complement:
/// `p_click = p_qnd·P(A2) + p_dark·(1 − P(A2))`.
pub fn qnd_povm(state: &JointState, p_qnd: f64, p_dark: f64) -> Result<QndOutcome> {
    let p_qnd = probability("p_qnd", p_qnd)?;
    let p_dark = probability("p_dark", p_dark)?;
    let rho = state.density();
    let mut on = Mat::zeros(DIM, DIM);
    projector_2p(Level2p::A2).sandwich_into(rho, 1.0, &mut on);
    let mut off = Mat::zeros(DIM, DIM);
    complement_2p(&[Level2p::A2]).sandwich_into(rho, 1.0, &mut off);

    let p_a2 = on.trace().re.clamp(0.0, 1.0);
    let true_click = p_qnd * p_a2;
    let false_click = p_dark * (1.0 - p_a2);
    let p_click = true_click + false_click;

    let click = if p_click > 0.0 {
        JointState::from_unnormalized(&on * c(p_qnd) + &off * c(p_dark), state.weight())
    } else {
        None
    };
    let no_click = if p_click < 1.0 {
        JointState::from_unnormalized(
            &on * c(1.0 - p_qnd) + &off * c(1.0 - p_dark),
            state.weight(),
        )
    } else {
        None
    };
    Ok(QndOutcome {
        p_click,
        p_false_click: false_click,
        click,
        no_click,
    })
}

/// Step 3: with probability `p_loss` the photon is lost and the
/// photon-present block is replaced by its partial trace over the photon.
pub fn photon_loss_channel(state: &JointState, p_loss: f64) -> Result<JointState> {
    let p_loss = probability("p_loss", p_loss)?;
    if p_loss == 0.0 {
        return Ok(state.clone());
    }
    let rho = state.density();
    let mut out = rho * c(1.0 - p_loss);
    for k in photon_trace_ops() {
        k.sandwich_into(rho, p_loss, &mut out);
    }
    let photon_levels = BellLabel::ALL.map(Level2p::Bell);
    complement_2p(&photon_levels).sandwich_into(rho, p_loss, &mut out);
    finish(out, state.weight())
}

/// Step 4: dephasing in the `(|+1> ± |-1>)/√2` basis of each target spin;
/// coherences in that basis shrink by `eta`.
pub fn dephasing_channel(state: &JointState, eta: f64, targets: &[Spin]) -> Result<JointState> {
    let eta = probability("eta", eta)?;
    let mut rho = state.density().clone();
    if eta < 1.0 {
        for &spin in targets {
            let mut out = &rho * c((1.0 + eta) / 2.0);
            spin_flip_op(spin).sandwich_into(&rho, (1.0 - eta) / 2.0, &mut out);
            rho = out;
        }
    }
    finish(rho, state.weight())
}

/// Step 5: unitary flip of the photon.
pub fn flip_channel(state: &JointState, kind: FlipKind) -> JointState {
    if kind == FlipKind::None {
        return state.clone();
    }
    let mut out = Mat::zeros(DIM, DIM);
    flip_op(kind).sandwich_into(state.density(), 1.0, &mut out);
    JointState::from_unnormalized(out, state.weight()).expect("unitary keeps the trace")
}

/// Optional relaxation of an unheralded A2 population: the photon is
/// re-emitted and lost, leaving spin 2 on `|±1>`.
pub fn a2_relaxation_channel(state: &JointState) -> Result<JointState> {
    let rho = state.density();
    let mut out = Mat::zeros(DIM, DIM);
    for k in a2_decay_ops() {
        k.sandwich_into(rho, 1.0, &mut out);
    }
    complement_2p(&[Level2p::A2]).sandwich_into(rho, 1.0, &mut out);
    finish(out, state.weight())
}
