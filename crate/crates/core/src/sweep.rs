//! Two-dimensional scans over absorption and loss probability.

use rayon::prelude::*;

use crate::analytics::optimize::{optimize_rounds, Objective};
use crate::bell::PerTarget;
use crate::engine::run_protocol;
use crate::error::{probability, Error, Result};
use crate::params::{Approach, ProtocolParams};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub p_abs: f64,
    pub p_loss: f64,
    /// Round count used; `None` when optimisation found no feasible `L`.
    pub rounds: Option<usize>,
    /// `NaN` for an infeasible cell.
    pub total_success: f64,
    pub fidelity_per_target: PerTarget<Option<f64>>,
}

impl SweepCell {
    pub fn is_feasible(&self) -> bool {
        self.rounds.is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub approach: Approach,
    pub p_abs_axis: Vec<f64>,
    pub p_loss_axis: Vec<f64>,
    /// Row-major in `p_abs`: cell `(i, j)` sits at `i * p_loss_axis.len() + j`.
    pub cells: Vec<SweepCell>,
}

impl SweepGrid {
    pub fn cell(&self, i_abs: usize, j_loss: usize) -> &SweepCell {
        &self.cells[i_abs * self.p_loss_axis.len() + j_loss]
    }

    /// Cells along the absorption axis at one loss value.
    pub fn p_abs_section(&self, j_loss: usize) -> Vec<&SweepCell> {
        (0..self.p_abs_axis.len())
            .map(|i| self.cell(i, j_loss))
            .collect()
    }

    /// Indices `i` along the absorption axis where the optimal round count
    /// changes between cell `i` and `i + 1`; the success curve kinks there.
    pub fn kinks_along_p_abs(&self, j_loss: usize) -> Vec<usize> {
        let section = self.p_abs_section(j_loss);
        section
            .windows(2)
            .enumerate()
            .filter(|(_, w)| {
                w[0].rounds.is_some() && w[1].rounds.is_some() && w[0].rounds != w[1].rounds
            })
            .map(|(i, _)| i)
            .collect()
    }
}

/// Evenly spaced axis with `count` points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count)
            .map(|k| start + (stop - start) * k as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// Default axes: absorption 1%..99%, loss 1%..10%.
pub fn default_axes() -> (Vec<f64>, Vec<f64>) {
    (linspace(0.01, 0.99, 99), linspace(0.01, 0.10, 10))
}

fn check_axis(name: &'static str, axis: &[f64]) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::InvalidParameter {
            name,
            reason: "axis is empty".into(),
        });
    }
    for &v in axis {
        probability(name, v)?;
    }
    if axis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter {
            name,
            reason: "axis must be strictly increasing".into(),
        });
    }
    Ok(())
}

/// Runs every grid cell in parallel. With `optimize` set, each cell picks
/// its own `L`; otherwise `base`'s round configuration is used throughout.
pub fn sweep(
    p_abs_axis: &[f64],
    p_loss_axis: &[f64],
    base: &ProtocolParams,
    optimize: Option<Objective>,
) -> Result<SweepGrid> {
    check_axis("p_abs_axis", p_abs_axis)?;
    check_axis("p_loss_axis", p_loss_axis)?;
    if optimize.is_none() {
        base.validate()?;
    }
    let points: Vec<(f64, f64)> = p_abs_axis
        .iter()
        .flat_map(|&a| p_loss_axis.iter().map(move |&l| (a, l)))
        .collect();
    let cells = points
        .par_iter()
        .map(|&(p_abs, p_loss)| {
            let params = base.clone().with_p_abs(p_abs).with_p_loss(p_loss);
            let outcome = match optimize {
                Some(objective) => match optimize_rounds(&params, objective) {
                    Ok(best) => Some((best.rounds, best.result)),
                    Err(Error::Infeasible(_)) => None,
                    Err(e) => return Err(e),
                },
                None => Some((params.rounds, run_protocol(&params)?)),
            };
            Ok(match outcome {
                Some((rounds, r)) => SweepCell {
                    p_abs,
                    p_loss,
                    rounds: Some(rounds),
                    total_success: r.total_success,
                    fidelity_per_target: r.fidelity_per_target,
                },
                None => SweepCell {
                    p_abs,
                    p_loss,
                    rounds: None,
                    total_success: f64::NAN,
                    fidelity_per_target: PerTarget([None; 4]),
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepGrid {
        approach: base.approach,
        p_abs_axis: p_abs_axis.to_vec(),
        p_loss_axis: p_loss_axis.to_vec(),
        cells,
    })
}
