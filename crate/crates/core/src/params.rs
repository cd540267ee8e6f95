use crate::analytics::estimators::{db_to_probability, dephasing_factor};
use crate::error::{probability, Error, Result};

/// Flip-scheduling strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Approach {
    /// One kind of flip every round, followed by a parity measurement of the
    /// surviving photon and spin 2.
    A,
    /// Periodic phase and polarisation flips so that all four Bell states can
    /// be heralded.
    B,
}

impl Approach {
    pub fn name(self) -> &'static str {
        match self {
            Approach::A => "A",
            Approach::B => "B",
        }
    }
}

impl std::str::FromStr for Approach {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "A" | "a" => Ok(Approach::A),
            "B" | "b" => Ok(Approach::B),
            other => Err(format!("unknown approach '{other}' (expected A or B)")),
        }
    }
}

/// Basis of approach A's final measurement; also selects the flip applied
/// every round (XX pairs with phase flips, ZZ with polarisation flips).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FlipObservable {
    XX,
    ZZ,
}

impl std::str::FromStr for FlipObservable {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "XX" | "xx" => Ok(FlipObservable::XX),
            "ZZ" | "zz" => Ok(FlipObservable::ZZ),
            other => Err(format!(
                "unknown flip observable '{other}' (expected XX or ZZ)"
            )),
        }
    }
}

/// Everything that defines one protocol run.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolParams {
    pub approach: Approach,
    /// Absorption probability per pass.
    pub p_abs: f64,
    /// Relative strength of the off-resonant A1 transition.
    pub r_a1: f64,
    pub p_qnd: f64,
    pub p_dark: f64,
    /// Photon loss per recycling cycle.
    pub p_loss: f64,
    /// Cycle duration in seconds.
    pub tau_cycle: f64,
    /// Spin coherence time in seconds.
    pub t2: f64,
    pub rounds: usize,
    /// Phase-flip period (approach B).
    pub l_z: usize,
    /// Polarisation-flip period (approach B).
    pub l_x: usize,
    /// Photon detection efficiency of approach A's final measurement.
    pub detector_eff: f64,
    pub flip_observable: FlipObservable,
    /// Let an undetected A2 population decay back to spin 2 each round
    /// instead of keeping it for the next readout.
    pub a2_relaxation: bool,
}

impl ProtocolParams {
    /// Experimental parameter set at 50% absorption with the round counts of
    /// the matching single-relay configuration (A: L = 10; B: L = 16).
    pub fn experimental_defaults(approach: Approach) -> Self {
        let base = Self {
            approach,
            p_abs: 0.5,
            r_a1: 1e-4,
            p_qnd: 0.99,
            p_dark: 2e-4,
            p_loss: db_to_probability(0.3).expect("0.3 dB is valid"),
            tau_cycle: 200e-9,
            t2: 100e-6,
            rounds: 0,
            l_z: 1,
            l_x: 1,
            detector_eff: 1.0,
            flip_observable: FlipObservable::XX,
            a2_relaxation: false,
        };
        match approach {
            Approach::A => base.with_rounds(10),
            Approach::B => base.with_rounds(16),
        }
    }

    /// Lossless, noiseless parameters with perfect absorption.
    pub fn ideal(approach: Approach) -> Self {
        let base = Self {
            p_abs: 1.0,
            r_a1: 0.0,
            p_qnd: 1.0,
            p_dark: 0.0,
            p_loss: 0.0,
            tau_cycle: 0.0,
            ..Self::experimental_defaults(approach)
        };
        match approach {
            Approach::A => base.with_rounds(2),
            Approach::B => base.with_rounds(4),
        }
    }

    /// Sets `L`; for approach B also the implied periods `l_z = L/4`,
    /// `l_x = L/2`.
    pub fn with_rounds(mut self, rounds: usize) -> Self {
        self.rounds = rounds;
        if self.approach == Approach::B {
            self.l_z = rounds / 4;
            self.l_x = rounds / 2;
        }
        self
    }

    pub fn with_p_abs(mut self, p_abs: f64) -> Self {
        self.p_abs = p_abs;
        self
    }

    pub fn with_p_loss(mut self, p_loss: f64) -> Self {
        self.p_loss = p_loss;
        self
    }

    /// Per-cycle coherence factor `exp(-(τ/T2)²)`.
    pub fn eta(&self) -> Result<f64> {
        dephasing_factor(self.tau_cycle, self.t2)
    }

    /// Checks the per-cycle parameters only.
    pub fn validate_channels(&self) -> Result<()> {
        probability("p_abs", self.p_abs)?;
        probability("r_a1", self.r_a1)?;
        probability("p_qnd", self.p_qnd)?;
        probability("p_dark", self.p_dark)?;
        probability("p_loss", self.p_loss)?;
        probability("detector_eff", self.detector_eff)?;
        self.eta()?;
        Ok(())
    }

    /// Full validation including the round-count constraints of the approach.
    pub fn validate(&self) -> Result<()> {
        self.validate_channels()?;
        if self.rounds == 0 {
            return Err(Error::InvalidParameter {
                name: "rounds",
                reason: "at least one round is required".into(),
            });
        }
        match self.approach {
            Approach::A if !self.rounds.is_multiple_of(2) => Err(Error::InvalidParameter {
                name: "rounds",
                reason: format!(
                    "approach A needs an even number of rounds, got {}",
                    self.rounds
                ),
            }),
            Approach::B if self.l_z == 0 || self.l_x == 0 => Err(Error::InvalidParameter {
                name: "l_z",
                reason: "flip periods must be positive".into(),
            }),
            Approach::B if self.rounds != 2 * self.l_x || self.rounds != 4 * self.l_z => {
                Err(Error::InvalidParameter {
                    name: "rounds",
                    reason: format!(
                        "approach B needs L = 2*l_x = 4*l_z, got L={}, l_x={}, l_z={}",
                        self.rounds, self.l_x, self.l_z
                    ),
                })
            }
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        for a in [Approach::A, Approach::B] {
            ProtocolParams::experimental_defaults(a).validate().unwrap();
            ProtocolParams::ideal(a).validate().unwrap();
        }
        let b = ProtocolParams::experimental_defaults(Approach::B);
        assert_eq!((b.rounds, b.l_z, b.l_x), (16, 4, 8));
        assert!((1.0 - b.eta().unwrap() - 4e-6).abs() < 1e-10);
        assert_eq!(ProtocolParams::ideal(Approach::B).eta().unwrap(), 1.0);
    }

    #[test]
    fn round_constraints() {
        let a = ProtocolParams::experimental_defaults(Approach::A).with_rounds(7);
        assert!(matches!(
            a.validate(),
            Err(Error::InvalidParameter { name: "rounds", .. })
        ));
        let mut b = ProtocolParams::experimental_defaults(Approach::B);
        b.l_x = 4;
        assert!(b.validate().is_err());
        assert!(ProtocolParams::experimental_defaults(Approach::B)
            .with_rounds(0)
            .validate()
            .is_err());
        assert!(ProtocolParams::experimental_defaults(Approach::B)
            .with_rounds(6)
            .validate()
            .is_err());
    }

    #[test]
    fn bad_probability_is_named() {
        let p = ProtocolParams::experimental_defaults(Approach::B).with_p_abs(1.5);
        assert_eq!(
            p.validate(),
            Err(Error::InvalidProbability {
                name: "p_abs",
                value: 1.5
            })
        );
    }

    #[test]
    fn parse_enums() {
        assert_eq!("B".parse::<Approach>(), Ok(Approach::B));
        assert!("C".parse::<Approach>().is_err());
        assert_eq!("ZZ".parse::<FlipObservable>(), Ok(FlipObservable::ZZ));
    }
}
