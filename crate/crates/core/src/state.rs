//! The 32-dimensional effective joint state.
//!
//! Basis index = `8 * pair13 + level2p`, with pair-13 Bell labels in
//! [`BellLabel::ALL`] order and the eight subsystem-2[p] levels in
//! [`Level2p::ALL`] order: the four photon-present Bell states of pair 2p,
//! then `A2`, `A1`, `|+1>`, `|-1>` of spin 2 with the photon gone.

use nalgebra::{DMatrix, Matrix4, SymmetricEigen};
use num_complex::Complex64;

use crate::bell::BellLabel;
use crate::error::{Error, Result};

pub const DIM_PAIR13: usize = 4;
pub const DIM_2P: usize = 8;
pub const DIM: usize = DIM_PAIR13 * DIM_2P;

/// Level of subsystem 2[p].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level2p {
    /// Photon present, pair 2p in the given Bell state.
    Bell(BellLabel),
    A2,
    A1,
    SpinUp,
    SpinDown,
}

impl Level2p {
    pub const ALL: [Level2p; DIM_2P] = [
        Level2p::Bell(BellLabel::PhiPlus),
        Level2p::Bell(BellLabel::PhiMinus),
        Level2p::Bell(BellLabel::PsiPlus),
        Level2p::Bell(BellLabel::PsiMinus),
        Level2p::A2,
        Level2p::A1,
        Level2p::SpinUp,
        Level2p::SpinDown,
    ];

    pub fn index(self) -> usize {
        match self {
            Level2p::Bell(b) => b.index(),
            Level2p::A2 => 4,
            Level2p::A1 => 5,
            Level2p::SpinUp => 6,
            Level2p::SpinDown => 7,
        }
    }

    pub fn is_photon_present(self) -> bool {
        matches!(self, Level2p::Bell(_))
    }

    /// Spin-only level for computational bit `s` of spin 2.
    pub fn spin(s: usize) -> Self {
        if s == 0 {
            Level2p::SpinUp
        } else {
            Level2p::SpinDown
        }
    }
}

pub fn joint_index(pair13: BellLabel, level: Level2p) -> usize {
    DIM_2P * pair13.index() + level.index()
}

/// Tolerances used when validating a state.
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;

/// Density operator with unit trace plus the probability of the branch it
/// describes.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    rho: DMatrix<Complex64>,
    weight: f64,
}

impl JointState {
    /// Builds a state from an unnormalised positive operator; the trace is
    /// folded into the weight. Returns `None` for a vanishing operator.
    pub fn from_unnormalized(m: DMatrix<Complex64>, weight: f64) -> Option<Self> {
        assert_eq!(m.shape(), (DIM, DIM), "joint state must be {DIM}x{DIM}");
        let tr = m.trace().re;
        if tr.is_nan() || tr <= 0.0 || weight <= 0.0 {
            return None;
        }
        Some(Self {
            rho: m / Complex64::new(tr, 0.0),
            weight: weight * tr,
        })
    }

    /// Pure state from amplitudes (normalised internally).
    pub fn from_amplitudes(amps: &[Complex64]) -> Option<Self> {
        assert_eq!(amps.len(), DIM);
        let v = nalgebra::DVector::from_column_slice(amps);
        Self::from_unnormalized(&v * v.adjoint(), 1.0)
    }

    pub fn density(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }

    /// `weight · rho`.
    pub fn unnormalized(&self) -> DMatrix<Complex64> {
        &self.rho * Complex64::new(self.weight, 0.0)
    }

    pub fn element(&self, row: usize, col: usize) -> Complex64 {
        self.rho[(row, col)]
    }

    /// Normalised population of one 2[p] level, summed over pair 13.
    pub fn population(&self, level: Level2p) -> f64 {
        BellLabel::ALL
            .iter()
            .map(|&b| {
                let i = joint_index(b, level);
                self.rho[(i, i)].re
            })
            .sum()
    }

    pub fn photon_present_population(&self) -> f64 {
        BellLabel::ALL
            .iter()
            .map(|&b| self.population(Level2p::Bell(b)))
            .sum()
    }

    /// Partial trace over subsystem 2[p]; normalised.
    pub fn reduced_pair13(&self) -> Matrix4<Complex64> {
        reduce_pair13(&self.rho)
    }

    pub fn purity(&self) -> f64 {
        (&self.rho * &self.rho).trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_part_min_eigenvalue(&self.rho)
    }

    pub fn max_hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..DIM {
            for j in i..DIM {
                worst = worst.max((self.rho[(i, j)] - self.rho[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Checks Hermiticity, positivity and unit trace.
    pub fn validate(&self) -> Result<()> {
        let h = self.max_hermitian_defect();
        if h > HERMITIAN_TOL {
            return Err(Error::Invariant(format!(
                "state not Hermitian (defect {h:e})"
            )));
        }
        let tr = self.rho.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::Invariant(format!("trace {tr} differs from 1")));
        }
        let ev = self.min_eigenvalue();
        if ev < -PSD_TOL {
            return Err(Error::Invariant(format!("negative eigenvalue {ev:e}")));
        }
        if !(0.0..=1.0 + TRACE_TOL).contains(&self.weight) {
            return Err(Error::Invariant(format!(
                "branch weight {} out of range",
                self.weight
            )));
        }
        Ok(())
    }
}

pub(crate) fn reduce_pair13(m: &DMatrix<Complex64>) -> Matrix4<Complex64> {
    let mut out = Matrix4::zeros();
    for a in 0..DIM_PAIR13 {
        for b in 0..DIM_PAIR13 {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..DIM_2P {
                acc += m[(DIM_2P * a + j, DIM_2P * b + j)];
            }
            out[(a, b)] = acc;
        }
    }
    let tr = out.trace().re;
    if tr > 0.0 {
        out /= Complex64::new(tr, 0.0);
    }
    out
}

fn hermitian_part_min_eigenvalue(m: &DMatrix<Complex64>) -> f64 {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    SymmetricEigen::new(h).eigenvalues.min()
}

/// `<target|rho_13|target>` of a normalised pair-13 density matrix.
pub fn bell_fidelity(rho13: &Matrix4<Complex64>, target: BellLabel) -> f64 {
    let i = target.index();
    rho13[(i, i)].re
}

/// The pure initial state: each pair-13 Bell state paired with one pair-2p
/// Bell state, all with amplitude 1/2.
pub fn make_initial_state() -> JointState {
    let mut amps = vec![Complex64::new(0.0, 0.0); DIM];
    for b in BellLabel::ALL {
        let partner = crate::bell::initial_partner(b);
        amps[joint_index(b, Level2p::Bell(partner))] = Complex64::new(0.5, 0.0);
    }
    JointState::from_amplitudes(&amps).expect("initial state is normalisable")
}

/// Fidelity of the pair-13 reduced state to a Bell state, or `None` for an
/// empty branch.
pub fn pair13_fidelity(state: &JointState, target: BellLabel) -> Option<f64> {
    if state.weight() <= 0.0 {
        return None;
    }
    Some(bell_fidelity(&state.reduced_pair13(), target))
}
