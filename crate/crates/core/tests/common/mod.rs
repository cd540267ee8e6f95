//! Dense reference implementation built from Kronecker products in the
//! computational basis. Shares no code with the library beyond its public
//! parameter types.
#![allow(dead_code)]

use nalgebra::{DMatrix, Matrix2, Matrix4};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use heralded_swap::{Approach, BellLabel, FlipKind, FlipObservable, JointState, ProtocolParams};

pub type Mat = DMatrix<Complex64>;

pub fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Rows: φ+, φ−, ψ+, ψ− over |00>, |01>, |10>, |11>.
pub fn bell_rows() -> Matrix4<f64> {
    Matrix4::new(
        H, 0.0, 0.0, H, //
        H, 0.0, 0.0, -H, //
        0.0, H, H, 0.0, //
        0.0, H, -H, 0.0,
    )
}

pub fn pauli_x() -> Matrix2<f64> {
    Matrix2::new(0.0, 1.0, 1.0, 0.0)
}

pub fn pauli_z() -> Matrix2<f64> {
    Matrix2::new(1.0, 0.0, 0.0, -1.0)
}

pub fn kron2(a: &Matrix2<f64>, b: &Matrix2<f64>) -> Matrix4<f64> {
    a.kronecker(b)
}

/// Two-qubit operator expressed in the Bell basis.
pub fn in_bell_basis(op: &Matrix4<f64>) -> Matrix4<f64> {
    let b = bell_rows();
    b * op * b.transpose()
}

fn dense(m: &DMatrix<f64>) -> Mat {
    m.map(c)
}

/// 8x8 operator on pair 2p: `bell` on the photon block, `rest` on
/// (A2, A1, +1, −1).
pub fn block_2p(bell: &Matrix4<f64>, rest: &Matrix4<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(8, 8);
    m.view_mut((0, 0), (4, 4)).copy_from(bell);
    m.view_mut((4, 4), (4, 4)).copy_from(rest);
    m
}

pub fn on_2p(op8: &DMatrix<f64>) -> Mat {
    dense(&DMatrix::<f64>::identity(4, 4).kronecker(op8))
}

pub fn on_13(op4: &Matrix4<f64>) -> Mat {
    let m = DMatrix::from_iterator(4, 4, op4.iter().copied());
    dense(&m.kronecker(&DMatrix::<f64>::identity(8, 8)))
}

pub fn unit_2p(row: usize, col: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(8, 8);
    m[(row, col)] = 1.0;
    m
}

pub fn identity() -> Mat {
    Mat::identity(32, 32)
}

pub fn sandwich(k: &Mat, rho: &Mat) -> Mat {
    k * rho * k.adjoint()
}

pub const PSI_PLUS: usize = 2;
pub const PSI_MINUS: usize = 3;
pub const A2: usize = 4;
pub const A1: usize = 5;
pub const UP: usize = 6;

pub fn absorption(rho: &Mat, p_abs: f64, r_a1: f64) -> Mat {
    let mut out = rho.clone();
    for (from, to, p) in [(PSI_MINUS, A2, p_abs), (PSI_PLUS, A1, p_abs * r_a1)] {
        let t = on_2p(&unit_2p(to, from));
        let q = identity() - on_2p(&unit_2p(from, from));
        out = &out * c(1.0 - p) + (sandwich(&t, &out) + sandwich(&q, &out)) * c(p);
    }
    out
}

/// `(click, no_click)` unnormalised.
pub fn qnd(rho: &Mat, p_qnd: f64, p_dark: f64) -> (Mat, Mat) {
    let p = on_2p(&unit_2p(A2, A2));
    let q = identity() - &p;
    let on = sandwich(&p, rho);
    let off = sandwich(&q, rho);
    (
        &on * c(p_qnd) + &off * c(p_dark),
        &on * c(1.0 - p_qnd) + &off * c(1.0 - p_dark),
    )
}

pub fn loss_kraus() -> Vec<Mat> {
    let b = bell_rows();
    let mut ks = Vec::new();
    for photon in 0..2 {
        let mut k = DMatrix::zeros(8, 8);
        for j in 0..4 {
            for s in 0..2 {
                k[(UP + s, j)] = b[(j, 2 * photon + s)];
            }
        }
        ks.push(on_2p(&k));
    }
    let mut r = DMatrix::zeros(8, 8);
    for i in 4..8 {
        r[(i, i)] = 1.0;
    }
    ks.push(on_2p(&r));
    ks
}

pub fn loss(rho: &Mat, p_loss: f64) -> Mat {
    let mut out = rho * c(1.0 - p_loss);
    for k in loss_kraus() {
        out += sandwich(&k, rho) * c(p_loss);
    }
    out
}

pub fn spin_flips() -> [Mat; 3] {
    let i2 = Matrix2::identity();
    let x = pauli_x();
    let nv1 = on_13(&in_bell_basis(&kron2(&x, &i2)));
    let nv3 = on_13(&in_bell_basis(&kron2(&i2, &x)));
    let mut rest = Matrix4::identity();
    rest.fixed_view_mut::<2, 2>(2, 2).copy_from(&x);
    let nv2 = on_2p(&block_2p(&in_bell_basis(&kron2(&i2, &x)), &rest));
    [nv1, nv2, nv3]
}

pub fn dephase(rho: &Mat, eta: f64) -> Mat {
    let mut out = rho.clone();
    for u in spin_flips() {
        out = &out * c((1.0 + eta) / 2.0) + sandwich(&u, &out) * c((1.0 - eta) / 2.0);
    }
    out
}

pub fn flip_unitary(kind: FlipKind) -> Mat {
    let i2 = Matrix2::identity();
    let z = on_2p(&block_2p(
        &in_bell_basis(&kron2(&pauli_z(), &i2)),
        &Matrix4::identity(),
    ));
    let x = on_2p(&block_2p(
        &in_bell_basis(&kron2(&pauli_x(), &i2)),
        &Matrix4::identity(),
    ));
    match kind {
        FlipKind::None => identity(),
        FlipKind::Phase => z,
        FlipKind::Polarisation => x,
        FlipKind::Both => z * x,
    }
}

pub fn relax(rho: &Mat) -> Mat {
    let b = bell_rows();
    let mut out = Mat::zeros(32, 32);
    for photon in 0..2 {
        let mut k = DMatrix::zeros(8, 8);
        for s in 0..2 {
            k[(UP + s, A2)] = b[(PSI_MINUS, 2 * photon + s)];
        }
        out += sandwich(&on_2p(&k), rho);
    }
    let q = identity() - on_2p(&unit_2p(A2, A2));
    out + sandwich(&q, rho)
}

pub fn initial_ket() -> Vec<Complex64> {
    let mut v = vec![c(0.0); 32];
    // (pair13, pair2p) couples of the initial superposition
    for (a, b) in [(0, 2), (1, 3), (2, 0), (3, 1)] {
        v[8 * a + b] = c(0.5);
    }
    v
}

pub fn initial_rho() -> Mat {
    let v = nalgebra::DVector::from_vec(initial_ket());
    &v * v.adjoint()
}

/// Unnormalised pair-13 reduction.
pub fn reduce13(rho: &Mat) -> Matrix4<Complex64> {
    Matrix4::from_fn(|a, b| (0..8).map(|j| rho[(8 * a + j, 8 * b + j)]).sum())
}

/// Pair-13 label carried by ψ−₂ₚ after the given flips, read off the
/// flipped ideal state.
pub fn absorbing_partner(flips: &[FlipKind]) -> usize {
    let mut v = nalgebra::DVector::from_vec(initial_ket());
    for &f in flips {
        v = flip_unitary(f) * v;
    }
    (0..4)
        .max_by(|&a, &b| {
            v[8 * a + PSI_MINUS]
                .norm()
                .total_cmp(&v[8 * b + PSI_MINUS].norm())
        })
        .unwrap()
}

#[derive(Debug, Clone)]
pub struct OracleRun {
    pub cumulative: Vec<f64>,
    pub total: f64,
    /// (weight, fidelity) summed per target.
    pub per_target: [(f64, f64); 4],
    pub residual: f64,
    pub false_negative: f64,
    pub false_positive: f64,
}

impl OracleRun {
    pub fn fidelity(&self, t: usize) -> Option<f64> {
        let (w, wf) = self.per_target[t];
        (w > 0.0).then(|| wf / w)
    }
}

/// Full protocol on unnormalised dense matrices.
pub fn run(params: &ProtocolParams, schedule: &[FlipKind]) -> OracleRun {
    let eta = (-(params.tau_cycle / params.t2).powi(2)).exp();
    let mut rho = initial_rho();
    let mut out = OracleRun {
        cumulative: Vec::new(),
        total: 0.0,
        per_target: [(0.0, 0.0); 4],
        residual: 0.0,
        false_negative: 0.0,
        false_positive: 0.0,
    };
    let a2 = on_2p(&unit_2p(A2, A2));
    let mut history = Vec::new();
    for &flip in schedule {
        let absorbed = absorption(&rho, params.p_abs, params.r_a1);
        let (click, no_click) = qnd(&absorbed, params.p_qnd, params.p_dark);
        let w = click.trace().re;
        out.false_positive += w - (&a2 * &click).trace().re;
        if w > 0.0 {
            let t = absorbing_partner(&history);
            let f = reduce13(&click)[(t, t)].re;
            out.per_target[t].0 += w;
            out.per_target[t].1 += f;
        }
        out.total += w;
        out.cumulative.push(out.total);
        rho = no_click;
        if params.a2_relaxation {
            out.false_negative += (&a2 * &rho).trace().re;
            rho = relax(&rho);
        }
        rho = dephase(&loss(&rho, params.p_loss), eta);
        rho = sandwich(&flip_unitary(flip), &rho);
        history.push(flip);
    }
    out.residual = rho.trace().re;
    if !params.a2_relaxation {
        out.false_negative += (&a2 * &rho).trace().re;
    }
    if params.approach == Approach::A {
        let (classes, targets) = match params.flip_observable {
            FlipObservable::XX => ([[0, 2], [1, 3]], [2, 3]),
            FlipObservable::ZZ => ([[0, 1], [2, 3]], [2, 0]),
        };
        for (class, t) in classes.iter().zip(targets) {
            let mut p = DMatrix::zeros(8, 8);
            for &j in class {
                p[(j, j)] = 1.0;
            }
            let block = sandwich(&on_2p(&p), &rho) * c(params.detector_eff);
            let w = block.trace().re;
            if w > 0.0 {
                out.per_target[t].0 += w;
                out.per_target[t].1 += reduce13(&block)[(t, t)].re;
                out.total += w;
            }
        }
    }
    out
}

pub fn label_index(b: BellLabel) -> usize {
    BellLabel::ALL.iter().position(|&x| x == b).unwrap()
}

/// Random mixed state of rank `rank` (Ginibre ensemble).
pub fn random_density(rng: &mut ChaCha8Rng, rank: usize) -> Mat {
    let g = Mat::from_fn(32, rank, |_, _| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    let m = &g * g.adjoint();
    let tr = m.trace();
    m / tr
}

pub fn random_state(rng: &mut ChaCha8Rng) -> JointState {
    let rank = rng.gen_range(1..=32);
    let weight = rng.gen_range(0.05..=1.0);
    JointState::from_unnormalized(random_density(rng, rank), weight).unwrap()
}

pub fn max_diff(a: &Mat, b: &Mat) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Noisy but otherwise arbitrary parameters with a valid round layout.
pub fn random_params(rng: &mut ChaCha8Rng) -> ProtocolParams {
    let approach = if rng.gen::<bool>() {
        Approach::A
    } else {
        Approach::B
    };
    let eta: f64 = rng.gen_range(0.9..0.99);
    let t2 = 100e-6;
    let base = ProtocolParams {
        approach,
        p_abs: rng.gen_range(0.2..0.9),
        r_a1: rng.gen_range(0.0..0.05),
        p_qnd: rng.gen_range(0.8..1.0),
        p_dark: rng.gen_range(1e-3..1e-2),
        p_loss: rng.gen_range(0.01..0.1),
        tau_cycle: t2 * (-eta.ln()).sqrt(),
        t2,
        detector_eff: rng.gen_range(0.7..=1.0),
        a2_relaxation: rng.gen_bool(0.3),
        ..ProtocolParams::experimental_defaults(approach)
    };
    let rounds = match approach {
        Approach::A => 2 * rng.gen_range(1..=6),
        Approach::B => 4 * rng.gen_range(1..=3),
    };
    base.with_rounds(rounds)
}
