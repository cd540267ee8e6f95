//! Exhaustive search for the best round count.

use rayon::prelude::*;

use crate::engine::{run_protocol, ProtocolResult};
use crate::error::{Error, Result};
use crate::params::{Approach, ProtocolParams};

/// What "best" means when choosing `L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Objective {
    /// Highest total success among candidates whose worst per-target
    /// fidelity reaches the threshold.
    MaxSuccessAtMinFidelity(f64),
    /// Highest `total_success + fidelity_weight · min_fidelity`; a target
    /// that is never heralded counts with fidelity 0.
    Weighted { fidelity_weight: f64 },
}

impl Objective {
    /// Fidelity floor used when nothing else is configured.
    pub fn default_for(approach: Approach) -> Self {
        match approach {
            Approach::A => Objective::MaxSuccessAtMinFidelity(0.96),
            Approach::B => Objective::MaxSuccessAtMinFidelity(0.99),
        }
    }

    fn score(&self, result: &ProtocolResult) -> Option<f64> {
        match *self {
            Objective::MaxSuccessAtMinFidelity(threshold) => {
                let f = result.min_fidelity()?;
                (f >= threshold).then_some(result.total_success)
            }
            Objective::Weighted { fidelity_weight } => {
                Some(result.total_success + fidelity_weight * result.min_fidelity().unwrap_or(0.0))
            }
        }
    }
}

/// Default candidate round counts: even `L` up to 64 for approach A,
/// multiples of 4 up to 64 for approach B.
pub fn default_candidates(approach: Approach) -> Vec<usize> {
    match approach {
        Approach::A => (2..=64).step_by(2).collect(),
        Approach::B => (4..=64).step_by(4).collect(),
    }
}

#[derive(Debug, Clone)]
pub struct OptimalRounds {
    pub rounds: usize,
    pub l_z: usize,
    pub l_x: usize,
    pub score: f64,
    pub result: ProtocolResult,
}

impl OptimalRounds {
    pub fn params(&self, base: &ProtocolParams) -> ProtocolParams {
        base.clone().with_rounds(self.rounds)
    }
}

pub fn optimize_rounds(params: &ProtocolParams, objective: Objective) -> Result<OptimalRounds> {
    optimize_rounds_over(params, objective, &default_candidates(params.approach))
}

/// Evaluates every candidate `L` (in parallel) and keeps the best score;
/// ties go to the smaller `L`.
pub fn optimize_rounds_over(
    params: &ProtocolParams,
    objective: Objective,
    candidates: &[usize],
) -> Result<OptimalRounds> {
    if let Objective::MaxSuccessAtMinFidelity(t) = objective {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidParameter {
                name: "min_fidelity",
                reason: format!("threshold {t} is not in [0, 1]"),
            });
        }
    }
    params.validate_channels()?;
    let mut sorted = candidates.to_vec();
    sorted.sort_unstable();
    sorted.dedup();

    let evaluated: Vec<Result<(ProtocolParams, ProtocolResult)>> = sorted
        .par_iter()
        .map(|&l| {
            let p = params.clone().with_rounds(l);
            run_protocol(&p).map(|r| (p, r))
        })
        .collect();

    let mut best: Option<OptimalRounds> = None;
    for item in evaluated {
        let (p, result) = item?;
        let Some(score) = objective.score(&result) else {
            continue;
        };
        if best.as_ref().is_none_or(|b| score > b.score) {
            best = Some(OptimalRounds {
                rounds: p.rounds,
                l_z: p.l_z,
                l_x: p.l_x,
                score,
                result,
            });
        }
    }
    best.ok_or_else(|| {
        Error::Infeasible(format!(
            "{objective:?} over L in {:?}..={:?}",
            sorted.first(),
            sorted.last()
        ))
    })
}
