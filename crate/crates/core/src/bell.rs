//! Bell-state labels, photon flips and the bookkeeping that ties them together.
//!
//! Both two-qubit factors of the joint space are written in the Bell basis.
//! A pair is ordered `(first, second)` with computational basis
//! `|00>, |01>, |10>, |11>`:
//!
//! * pair 13: first = remote spin 1, second = remote spin 3
//! * pair 2p: first = photon, second = absorbing spin 2
//!
//! For the spins `|0> = |+1>` and `|1> = |-1>`. For the photon a polarisation
//! flip is `X` and a phase flip is `Z` on the first factor of pair 2p.

use std::fmt;
use std::ops::{Index, IndexMut};

use std::f64::consts::FRAC_1_SQRT_2;

/// One of the four maximally entangled two-qubit states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BellLabel {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellLabel {
    /// Canonical ordering used for every Bell-basis block.
    pub const ALL: [BellLabel; 4] = [
        BellLabel::PhiPlus,
        BellLabel::PhiMinus,
        BellLabel::PsiPlus,
        BellLabel::PsiMinus,
    ];

    pub fn index(self) -> usize {
        match self {
            BellLabel::PhiPlus => 0,
            BellLabel::PhiMinus => 1,
            BellLabel::PsiPlus => 2,
            BellLabel::PsiMinus => 3,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    /// Amplitudes over `|00>, |01>, |10>, |11>`.
    pub fn amplitudes(self) -> [f64; 4] {
        let h = FRAC_1_SQRT_2;
        match self {
            BellLabel::PhiPlus => [h, 0.0, 0.0, h],
            BellLabel::PhiMinus => [h, 0.0, 0.0, -h],
            BellLabel::PsiPlus => [0.0, h, h, 0.0],
            BellLabel::PsiMinus => [0.0, h, -h, 0.0],
        }
    }

    /// Pauli frame `(x, z)` with `|self> ∝ (X^x Z^z ⊗ 1)|φ+>`.
    pub fn pauli_bits(self) -> (bool, bool) {
        match self {
            BellLabel::PhiPlus => (false, false),
            BellLabel::PhiMinus => (false, true),
            BellLabel::PsiPlus => (true, false),
            BellLabel::PsiMinus => (true, true),
        }
    }

    pub fn from_pauli_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => BellLabel::PhiPlus,
            (false, true) => BellLabel::PhiMinus,
            (true, false) => BellLabel::PsiPlus,
            (true, true) => BellLabel::PsiMinus,
        }
    }

    /// φ+ ↔ φ−, ψ+ ↔ ψ−.
    pub fn sign_toggled(self) -> Self {
        let (x, z) = self.pauli_bits();
        Self::from_pauli_bits(x, !z)
    }

    /// φ± ↔ ψ± at fixed sign.
    pub fn letter_toggled(self) -> Self {
        let (x, z) = self.pauli_bits();
        Self::from_pauli_bits(!x, z)
    }

    /// Even parity in the computational basis (the φ states).
    pub fn is_phi(self) -> bool {
        !self.pauli_bits().0
    }

    pub fn name(self) -> &'static str {
        match self {
            BellLabel::PhiPlus => "phi+",
            BellLabel::PhiMinus => "phi-",
            BellLabel::PsiPlus => "psi+",
            BellLabel::PsiMinus => "psi-",
        }
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A value for each of the four Bell labels.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PerTarget<T>(pub [T; 4]);

impl<T> PerTarget<T> {
    pub fn iter(&self) -> impl Iterator<Item = (BellLabel, &T)> {
        BellLabel::ALL.into_iter().zip(self.0.iter())
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> PerTarget<U> {
        let mut f = f;
        PerTarget([f(&self.0[0]), f(&self.0[1]), f(&self.0[2]), f(&self.0[3])])
    }
}

impl<T> Index<BellLabel> for PerTarget<T> {
    type Output = T;
    fn index(&self, label: BellLabel) -> &T {
        &self.0[label.index()]
    }
}

impl<T> IndexMut<BellLabel> for PerTarget<T> {
    fn index_mut(&mut self, label: BellLabel) -> &mut T {
        &mut self.0[label.index()]
    }
}

/// Operation applied to the recycled photon at the end of a round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FlipKind {
    None,
    Phase,
    Polarisation,
    /// Phase composed with polarisation (`Z·X` on the photon).
    Both,
}

impl FlipKind {
    pub fn from_flags(phase: bool, polarisation: bool) -> Self {
        match (phase, polarisation) {
            (false, false) => FlipKind::None,
            (true, false) => FlipKind::Phase,
            (false, true) => FlipKind::Polarisation,
            (true, true) => FlipKind::Both,
        }
    }

    pub fn flips_phase(self) -> bool {
        matches!(self, FlipKind::Phase | FlipKind::Both)
    }

    pub fn flips_polarisation(self) -> bool {
        matches!(self, FlipKind::Polarisation | FlipKind::Both)
    }

    /// Signed image of each pair-2p Bell vector under the photon operation:
    /// `U|label> = sign · |image>`.
    pub fn bell_map(self, label: BellLabel) -> (BellLabel, f64) {
        use BellLabel::*;
        match self {
            FlipKind::None => (label, 1.0),
            FlipKind::Phase => (label.sign_toggled(), 1.0),
            FlipKind::Polarisation => match label {
                PhiPlus => (PsiPlus, 1.0),
                PsiPlus => (PhiPlus, 1.0),
                PhiMinus => (PsiMinus, -1.0),
                PsiMinus => (PhiMinus, -1.0),
            },
            FlipKind::Both => {
                let (mid, s1) = FlipKind::Polarisation.bell_map(label);
                let (out, s2) = FlipKind::Phase.bell_map(mid);
                (out, s1 * s2)
            }
        }
    }
}

/// Running count of phase and polarisation flips applied to the photon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct FlipCount {
    pub phase: u32,
    pub polarisation: u32,
}

impl FlipCount {
    pub fn new(phase: u32, polarisation: u32) -> Self {
        Self {
            phase,
            polarisation,
        }
    }

    pub fn apply(&mut self, kind: FlipKind) {
        if kind.flips_phase() {
            self.phase += 1;
        }
        if kind.flips_polarisation() {
            self.polarisation += 1;
        }
    }

    /// Label image of a pair-2p Bell state after all flips so far (signs dropped).
    pub fn carry(self, label: BellLabel) -> BellLabel {
        let mut out = label;
        if self.polarisation % 2 == 1 {
            out = FlipKind::Polarisation.bell_map(out).0;
        }
        if self.phase % 2 == 1 {
            out = FlipKind::Phase.bell_map(out).0;
        }
        out
    }
}

/// Pair-2p partner of each pair-13 label in the initial state.
pub fn initial_partner(pair13: BellLabel) -> BellLabel {
    use BellLabel::*;
    match pair13 {
        PhiPlus => PsiPlus,
        PhiMinus => PsiMinus,
        PsiPlus => PhiPlus,
        PsiMinus => PhiMinus,
    }
}

/// Pair-13 Bell state announced by an absorption after the given flips.
///
/// Only ψ−₂ₚ reaches A2, and it starts out paired with φ−₁₃. An odd number of
/// phase flips toggles the sign, an odd number of polarisation flips toggles
/// φ ↔ ψ.
pub fn epoch_target(flips: FlipCount) -> BellLabel {
    let mut t = BellLabel::PhiMinus;
    if flips.phase % 2 == 1 {
        t = t.sign_toggled();
    }
    if flips.polarisation % 2 == 1 {
        t = t.letter_toggled();
    }
    t
}
