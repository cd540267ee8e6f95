//! The L-round recycling loop and its bookkeeping.

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;

use crate::bell::{epoch_target, initial_partner, BellLabel, FlipCount, FlipKind, PerTarget};
use crate::channels::{
    a2_relaxation_channel, absorption_channel, dephasing_channel, flip_channel,
    photon_loss_channel, projector_2p, qnd_povm, Spin,
};
use crate::error::{Error, Result};
use crate::params::{Approach, FlipObservable, ProtocolParams};
use crate::schedule::build_schedule;
use crate::state::{
    bell_fidelity, make_initial_state, reduce_pair13, JointState, Level2p, DIM, HERMITIAN_TOL,
    PSD_TOL, TRACE_TOL,
};

/// Tolerance on total probability conservation over a run.
pub const CONSERVATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HeraldType {
    QndClick,
    FinalParity(Parity),
}

/// One heralded branch of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct HeraldRecord {
    /// 1-based round; final parity records carry `L`.
    pub round: usize,
    pub flips_applied: FlipCount,
    pub herald_type: HeraldType,
    /// Absolute probability of this branch.
    pub weight: f64,
    /// Normalised pair-13 state conditioned on the herald.
    pub conditional_13: Matrix4<Complex64>,
    /// Bell state the herald announces.
    pub target: BellLabel,
}

impl HeraldRecord {
    pub fn fidelity(&self) -> f64 {
        bell_fidelity(&self.conditional_13, self.target)
    }

    /// Diagonal of the conditional pair-13 state in the Bell basis.
    pub fn bell_populations(&self) -> [f64; 4] {
        std::array::from_fn(|i| self.conditional_13[(i, i)].re)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolResult {
    /// Cumulative probability of a QND click after each round.
    pub cumulative_success: Vec<f64>,
    /// QND clicks plus, for approach A, the final parity heralds.
    pub total_success: f64,
    /// Weight-averaged conditional fidelity over the heralds announcing each
    /// target; `None` if that target is never announced.
    pub fidelity_per_target: PerTarget<Option<f64>>,
    /// Same average taken over the QND heralds up to each round.
    pub round_fidelity: Vec<PerTarget<Option<f64>>>,
    /// Weight-averaged fidelity over all heralds.
    pub pooled_fidelity: Option<f64>,
    pub herald_log: Vec<HeraldRecord>,
    /// Weight of the branch that never clicked, before any final measurement.
    pub residual_weight: f64,
    /// Weight of branches that absorbed into A2 but never produced a click.
    pub false_negative_weight: f64,
    /// Weight of clicks that came from dark counts outside A2.
    pub false_positive_weight: f64,
}

impl ProtocolResult {
    pub fn failure_weight(&self) -> f64 {
        1.0 - self.total_success
    }

    /// Smallest per-target fidelity; `None` unless every target is announced.
    pub fn min_fidelity(&self) -> Option<f64> {
        self.fidelity_per_target
            .iter()
            .map(|(_, f)| *f)
            .try_fold(f64::INFINITY, |acc, f| f.map(|f| acc.min(f)))
    }
}

/// Weight-averaged fidelity of each target over `records`.
pub fn average_fidelities<'a>(
    records: impl IntoIterator<Item = &'a HeraldRecord>,
) -> PerTarget<Option<f64>> {
    let mut num = PerTarget([0.0; 4]);
    let mut den = PerTarget([0.0; 4]);
    for r in records {
        num[r.target] += r.weight * r.fidelity();
        den[r.target] += r.weight;
    }
    PerTarget(std::array::from_fn(|i| {
        let t = BellLabel::ALL[i];
        (den[t] > 0.0).then(|| num[t] / den[t])
    }))
}

fn pooled(records: &[HeraldRecord]) -> Option<f64> {
    let w: f64 = records.iter().map(|r| r.weight).sum();
    (w > 0.0).then(|| records.iter().map(|r| r.weight * r.fidelity()).sum::<f64>() / w)
}

/// Runs the protocol with the schedule implied by `params`.
pub fn run_protocol(params: &ProtocolParams) -> Result<ProtocolResult> {
    let schedule = build_schedule(params)?;
    run_with_schedule(params, &schedule)
}

/// Runs the protocol with an explicit flip schedule; `params.rounds` and the
/// flip periods are ignored in favour of `schedule.len()`.
pub fn run_with_schedule(params: &ProtocolParams, schedule: &[FlipKind]) -> Result<ProtocolResult> {
    params.validate_channels()?;
    if schedule.is_empty() {
        return Err(Error::InvalidParameter {
            name: "rounds",
            reason: "at least one round is required".into(),
        });
    }
    let eta = params.eta()?;
    let mut state = make_initial_state();
    let mut flips = FlipCount::default();
    let mut log = Vec::new();
    let mut cumulative = Vec::with_capacity(schedule.len());
    let mut round_fidelity = Vec::with_capacity(schedule.len());
    let mut success = 0.0;
    let mut false_negative = 0.0;
    let mut false_positive = 0.0;

    for (i, &flip) in schedule.iter().enumerate() {
        let round = i + 1;
        let absorbed = absorption_channel(&state, params.p_abs, params.r_a1)?;
        let qnd = qnd_povm(&absorbed, params.p_qnd, params.p_dark)?;
        false_positive += absorbed.weight() * qnd.p_false_click;
        if let Some(click) = qnd.click {
            success += click.weight();
            log.push(HeraldRecord {
                round,
                flips_applied: flips,
                herald_type: HeraldType::QndClick,
                weight: click.weight(),
                conditional_13: click.reduced_pair13(),
                target: epoch_target(flips),
            });
        }
        cumulative.push(success);
        round_fidelity.push(average_fidelities(&log));

        let Some(mut survivor) = qnd.no_click else {
            // everything heralded; later rounds change nothing
            cumulative.resize(schedule.len(), success);
            round_fidelity.resize(schedule.len(), average_fidelities(&log));
            return finish(
                params,
                cumulative,
                round_fidelity,
                log,
                None,
                flips,
                false_negative,
                false_positive,
            );
        };
        if params.a2_relaxation {
            false_negative += survivor.weight() * survivor.population(Level2p::A2);
            survivor = a2_relaxation_channel(&survivor)?;
        }
        survivor = photon_loss_channel(&survivor, params.p_loss)?;
        survivor = dephasing_channel(&survivor, eta, &Spin::ALL)?;
        survivor = flip_channel(&survivor, flip);
        flips.apply(flip);
        check_round(&survivor, success, &log)?;
        state = survivor;
    }
    if !params.a2_relaxation {
        false_negative += state.weight() * state.population(Level2p::A2);
    }
    finish(
        params,
        cumulative,
        round_fidelity,
        log,
        Some(state),
        flips,
        false_negative,
        false_positive,
    )
}

#[allow(clippy::too_many_arguments)]
fn finish(
    params: &ProtocolParams,
    cumulative_success: Vec<f64>,
    round_fidelity: Vec<PerTarget<Option<f64>>>,
    mut log: Vec<HeraldRecord>,
    survivor: Option<JointState>,
    flips: FlipCount,
    false_negative_weight: f64,
    false_positive_weight: f64,
) -> Result<ProtocolResult> {
    let residual_weight = survivor.as_ref().map_or(0.0, JointState::weight);
    if let Some(s) = &survivor {
        s.validate()?;
    }
    let qnd_success = *cumulative_success.last().expect("at least one round");
    let mut total_success = qnd_success;
    if params.approach == Approach::A {
        if let Some(s) = &survivor {
            let records = final_parity_measurement_at(s, params, flips, cumulative_success.len())?;
            total_success += records.iter().map(|r| r.weight).sum::<f64>();
            log.extend(records);
        }
    }
    for r in &log {
        check_conditional(r)?;
    }
    let conservation = qnd_success + residual_weight - 1.0;
    if conservation.abs() > CONSERVATION_TOL {
        return Err(Error::Invariant(format!(
            "herald and residual weights miss unity by {conservation:e}"
        )));
    }
    Ok(ProtocolResult {
        cumulative_success,
        total_success,
        fidelity_per_target: average_fidelities(&log),
        round_fidelity,
        pooled_fidelity: pooled(&log),
        herald_log: log,
        residual_weight,
        false_negative_weight,
        false_positive_weight,
    })
}

/// Cheap per-round checks; the full eigenvalue check runs on the final state.
fn check_round(state: &JointState, success: f64, log: &[HeraldRecord]) -> Result<()> {
    let tr = state.density().trace();
    if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
        return Err(Error::Invariant(format!("trace drifted to {tr}")));
    }
    let h = state.max_hermitian_defect();
    if h > HERMITIAN_TOL {
        return Err(Error::Invariant(format!("Hermiticity defect {h:e}")));
    }
    let heralded: f64 = log.iter().map(|r| r.weight).sum();
    if (heralded - success).abs() > CONSERVATION_TOL
        || (success + state.weight() - 1.0).abs() > CONSERVATION_TOL
    {
        return Err(Error::Invariant("branch weights not conserved".into()));
    }
    Ok(())
}

fn check_conditional(r: &HeraldRecord) -> Result<()> {
    let m = &r.conditional_13;
    let tr = m.trace().re;
    let herm = (m - m.adjoint()).camax();
    let min_ev = nalgebra::SymmetricEigen::new((m + m.adjoint()) * Complex64::new(0.5, 0.0))
        .eigenvalues
        .min();
    if (tr - 1.0).abs() > TRACE_TOL || herm > HERMITIAN_TOL || min_ev < -PSD_TOL {
        return Err(Error::Invariant(format!(
            "conditional state of round {} herald is not a density matrix",
            r.round
        )));
    }
    Ok(())
}

/// Photon-present pair-2p labels of each parity class.
pub(crate) fn parity_class(observable: FlipObservable, parity: Parity) -> [BellLabel; 2] {
    use BellLabel::*;
    match (observable, parity) {
        (FlipObservable::XX, Parity::Even) => [PhiPlus, PsiPlus],
        (FlipObservable::XX, Parity::Odd) => [PhiMinus, PsiMinus],
        (FlipObservable::ZZ, Parity::Even) => [PhiPlus, PhiMinus],
        (FlipObservable::ZZ, Parity::Odd) => [PsiPlus, PsiMinus],
    }
}

/// Approach A's closing measurement of photon and spin 2 in the product
/// basis of `params.flip_observable`, on the branch that never clicked.
///
/// Outcomes of equal parity are pooled. Branches without the photon, or with
/// spin 2 in A2/A1, produce no record. The photon is detected with
/// probability `detector_eff`.
pub fn final_parity_measurement(
    state: &JointState,
    params: &ProtocolParams,
    flips: FlipCount,
) -> Result<Vec<HeraldRecord>> {
    final_parity_measurement_at(state, params, flips, params.rounds)
}

fn final_parity_measurement_at(
    state: &JointState,
    params: &ProtocolParams,
    flips: FlipCount,
    round: usize,
) -> Result<Vec<HeraldRecord>> {
    if params.approach != Approach::A {
        return Err(Error::NotApproachA);
    }
    crate::error::probability("detector_eff", params.detector_eff)?;
    let mut records = Vec::new();
    if params.detector_eff == 0.0 {
        return Ok(records);
    }
    for parity in [Parity::Even, Parity::Odd] {
        let class = parity_class(params.flip_observable, parity);
        let mut block = DMatrix::<Complex64>::zeros(DIM, DIM);
        for label in class {
            projector_2p(Level2p::Bell(label)).sandwich_into(state.density(), 1.0, &mut block);
        }
        let p = block.trace().re;
        if p <= 0.0 {
            continue;
        }
        let target = parity_target(params.flip_observable, flips, &class).ok_or_else(|| {
            Error::Invariant(format!("no residual Bell state matches {parity:?} parity"))
        })?;
        records.push(HeraldRecord {
            round,
            flips_applied: flips,
            herald_type: HeraldType::FinalParity(parity),
            weight: state.weight() * params.detector_eff * p,
            conditional_13: reduce_pair13(&block),
            target,
        });
    }
    Ok(records)
}

/// Pair-13 state announced by a parity outcome: among the labels whose
/// photon partner is never steered into ψ− by the per-round flips, the one
/// whose current partner lies in the measured class.
pub(crate) fn parity_target(
    observable: FlipObservable,
    flips: FlipCount,
    class: &[BellLabel; 2],
) -> Option<BellLabel> {
    // Phase flips only ever map ψ± ↔ ψ∓ and φ± ↔ φ∓, so the φ-partnered pair
    // labels (ψ±₁₃) survive; polarisation flips keep {φ+, ψ+}₂ₚ closed.
    let residual: [BellLabel; 2] = match observable {
        FlipObservable::XX => [BellLabel::PsiPlus, BellLabel::PsiMinus],
        FlipObservable::ZZ => [BellLabel::PhiPlus, BellLabel::PsiPlus],
    };
    let mut hits = residual
        .into_iter()
        .filter(|&b| class.contains(&flips.carry(initial_partner(b))));
    let first = hits.next()?;
    hits.next().is_none().then_some(first)
}
