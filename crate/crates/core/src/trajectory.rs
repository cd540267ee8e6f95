//! Monte-Carlo unravelling of the protocol into pure-state trajectories.
//!
//! Every channel of a round is sampled as one of its Kraus branches, so the
//! average over trajectories reproduces the exact density-matrix engine.
//! Trajectory `i` draws from its own ChaCha stream, which makes results
//! independent of thread scheduling.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bell::{epoch_target, initial_partner, BellLabel, FlipCount, FlipKind, PerTarget};
use crate::channels::{
    a2_decay_ops, complement_2p, flip_op, photon_trace_ops, projector_2p, spin_flip_op,
    transfer_op, SparseOp, Spin,
};
use crate::engine::{parity_class, parity_target, Parity};
use crate::error::{Error, Result};
use crate::params::{Approach, ProtocolParams};
use crate::schedule::build_schedule;
use crate::state::{joint_index, Level2p, DIM, DIM_2P};

type Ket = Vec<Complex64>;

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
    pub samples: usize,
}

impl Estimate {
    fn bernoulli(hits: usize, n: usize) -> Self {
        let p = hits as f64 / n as f64;
        Self {
            mean: p,
            std_err: (p * (1.0 - p) / n as f64).sqrt(),
            samples: n,
        }
    }

    fn from_moments(sum: f64, sum_sq: f64, n: usize) -> Self {
        let mean = sum / n as f64;
        let std_err = if n > 1 {
            let var = ((sum_sq - n as f64 * mean * mean) / (n as f64 - 1.0)).max(0.0);
            (var / n as f64).sqrt()
        } else {
            f64::INFINITY
        };
        Self {
            mean,
            std_err,
            samples: n,
        }
    }

    /// Whether `value` lies within `k` standard errors of the mean.
    pub fn agrees_with(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.std_err + 1e-12
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryResult {
    pub trajectories: usize,
    pub total_success: Estimate,
    /// Fraction of trajectories with a QND click by each round.
    pub cumulative_success: Vec<Estimate>,
    pub fidelity_per_target: PerTarget<Option<Estimate>>,
}

struct Herald {
    /// 0-based round of the click; `L` for a final parity herald.
    round: usize,
    target: BellLabel,
    fidelity: f64,
}

struct Operators {
    to_a2: SparseOp,
    keep_a2: SparseOp,
    to_a1: SparseOp,
    keep_a1: SparseOp,
    on_a2: SparseOp,
    off_a2: SparseOp,
    photon_trace: [SparseOp; 2],
    photon_gone: SparseOp,
    a2_decay: [SparseOp; 2],
    spin_flips: [SparseOp; 3],
}

impl Operators {
    fn new() -> Self {
        let photon = BellLabel::ALL.map(Level2p::Bell);
        Self {
            to_a2: transfer_op(BellLabel::PsiMinus, Level2p::A2),
            keep_a2: complement_2p(&[Level2p::Bell(BellLabel::PsiMinus)]),
            to_a1: transfer_op(BellLabel::PsiPlus, Level2p::A1),
            keep_a1: complement_2p(&[Level2p::Bell(BellLabel::PsiPlus)]),
            on_a2: projector_2p(Level2p::A2),
            off_a2: complement_2p(&[Level2p::A2]),
            photon_trace: photon_trace_ops(),
            photon_gone: complement_2p(&photon),
            a2_decay: a2_decay_ops(),
            spin_flips: Spin::ALL.map(spin_flip_op),
        }
    }
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum()
}

fn scaled(v: Ket, s: f64) -> Ket {
    v.into_iter().map(|x| x * s).collect()
}

/// Picks one unnormalised branch with probability equal to its squared norm
/// and returns its index and the normalised state.
fn choose(rng: &mut ChaCha8Rng, branches: Vec<Ket>) -> (usize, Ket) {
    let norms: Vec<f64> = branches.iter().map(|b| norm_sqr(b)).collect();
    let total: f64 = norms.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    let mut pick = norms
        .iter()
        .rposition(|&n| n > 0.0)
        .expect("some branch is populated");
    for (i, &n) in norms.iter().enumerate() {
        if n > 0.0 && u < n {
            pick = i;
            break;
        }
        u -= n;
    }
    let n = norms[pick].sqrt();
    let chosen = branches.into_iter().nth(pick).expect("index in range");
    (pick, chosen.into_iter().map(|x| x / n).collect())
}

/// `I` with weight `1 - p`, and each op with weight `p`.
fn mixture(rng: &mut ChaCha8Rng, psi: Ket, p: f64, ops: &[&SparseOp]) -> Ket {
    if p == 0.0 {
        return psi;
    }
    let mut branches: Vec<Ket> = ops
        .iter()
        .map(|op| scaled(op.apply_vec(&psi), p.sqrt()))
        .collect();
    branches.push(scaled(psi, (1.0 - p).sqrt()));
    choose(rng, branches).1
}

fn pair13_fidelity(psi: &[Complex64], target: BellLabel) -> f64 {
    let base = DIM_2P * target.index();
    norm_sqr(&psi[base..base + DIM_2P])
}

fn initial_ket() -> Ket {
    let mut psi = vec![Complex64::new(0.0, 0.0); DIM];
    for b in BellLabel::ALL {
        psi[joint_index(b, Level2p::Bell(initial_partner(b)))] = Complex64::new(0.5, 0.0);
    }
    psi
}

fn run_one(
    params: &ProtocolParams,
    schedule: &[FlipKind],
    eta: f64,
    ops: &Operators,
    rng: &mut ChaCha8Rng,
) -> Option<Herald> {
    let mut psi = initial_ket();
    let mut flips = FlipCount::default();
    for (round, &flip) in schedule.iter().enumerate() {
        psi = mixture(rng, psi, params.p_abs, &[&ops.to_a2, &ops.keep_a2]);
        psi = mixture(
            rng,
            psi,
            params.p_abs * params.r_a1,
            &[&ops.to_a1, &ops.keep_a1],
        );

        let on = ops.on_a2.apply_vec(&psi);
        let off = ops.off_a2.apply_vec(&psi);
        let (pick, next) = choose(
            rng,
            vec![
                scaled(on.clone(), params.p_qnd.sqrt()),
                scaled(off.clone(), params.p_dark.sqrt()),
                scaled(on, (1.0 - params.p_qnd).sqrt()),
                scaled(off, (1.0 - params.p_dark).sqrt()),
            ],
        );
        psi = next;
        if pick < 2 {
            let target = epoch_target(flips);
            return Some(Herald {
                round,
                target,
                fidelity: pair13_fidelity(&psi, target),
            });
        }

        if params.a2_relaxation {
            let mut branches: Vec<Ket> = ops.a2_decay.iter().map(|k| k.apply_vec(&psi)).collect();
            branches.push(ops.off_a2.apply_vec(&psi));
            psi = choose(rng, branches).1;
        }
        let [k0, k1] = &ops.photon_trace;
        psi = mixture(rng, psi, params.p_loss, &[k0, k1, &ops.photon_gone]);
        for u in &ops.spin_flips {
            psi = mixture(rng, psi, (1.0 - eta) / 2.0, &[u]);
        }
        if flip != FlipKind::None {
            psi = flip_op(flip).apply_vec(&psi);
        }
        flips.apply(flip);
    }

    if params.approach != Approach::A {
        return None;
    }
    let mut branches = Vec::with_capacity(3);
    let mut classes = Vec::with_capacity(2);
    for parity in [Parity::Even, Parity::Odd] {
        let class = parity_class(params.flip_observable, parity);
        let mut v = vec![Complex64::new(0.0, 0.0); DIM];
        for label in class {
            for (i, x) in projector_2p(Level2p::Bell(label))
                .apply_vec(&psi)
                .into_iter()
                .enumerate()
            {
                v[i] += x;
            }
        }
        branches.push(v);
        classes.push(class);
    }
    let measured: Ket = branches
        .iter()
        .fold(vec![Complex64::new(0.0, 0.0); DIM], |acc, b| {
            acc.iter().zip(b).map(|(a, x)| a + x).collect()
        });
    branches.push(psi.iter().zip(&measured).map(|(a, m)| a - m).collect());
    let (pick, psi) = choose(rng, branches);
    if pick == 2 || rng.gen::<f64>() >= params.detector_eff {
        return None;
    }
    let target = parity_target(params.flip_observable, flips, &classes[pick])?;
    Some(Herald {
        round: schedule.len(),
        target,
        fidelity: pair13_fidelity(&psi, target),
    })
}

/// Samples `n_traj` trajectories with the schedule implied by `params`.
pub fn run_trajectories(
    params: &ProtocolParams,
    n_traj: usize,
    seed: u64,
) -> Result<TrajectoryResult> {
    let schedule = build_schedule(params)?;
    run_trajectories_with_schedule(params, &schedule, n_traj, seed)
}

pub fn run_trajectories_with_schedule(
    params: &ProtocolParams,
    schedule: &[FlipKind],
    n_traj: usize,
    seed: u64,
) -> Result<TrajectoryResult> {
    params.validate_channels()?;
    if n_traj == 0 {
        return Err(Error::InvalidParameter {
            name: "trajectories",
            reason: "at least one trajectory is required".into(),
        });
    }
    let eta = params.eta()?;
    let ops = Operators::new();
    let outcomes: Vec<Option<Herald>> = (0..n_traj)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            run_one(params, schedule, eta, &ops, &mut rng)
        })
        .collect();

    let rounds = schedule.len();
    let mut clicks_by_round = vec![0usize; rounds + 1];
    let mut sums = PerTarget([(0.0f64, 0.0f64, 0usize); 4]);
    for h in outcomes.iter().flatten() {
        clicks_by_round[h.round] += 1;
        let s = &mut sums[h.target];
        s.0 += h.fidelity;
        s.1 += h.fidelity * h.fidelity;
        s.2 += 1;
    }
    let mut running = 0;
    let cumulative_success = clicks_by_round[..rounds]
        .iter()
        .map(|&c| {
            running += c;
            Estimate::bernoulli(running, n_traj)
        })
        .collect();
    let heralded = running + clicks_by_round[rounds];
    Ok(TrajectoryResult {
        trajectories: n_traj,
        total_success: Estimate::bernoulli(heralded, n_traj),
        cumulative_success,
        fidelity_per_target: sums
            .map(|&(s, sq, n)| (n > 0).then(|| Estimate::from_moments(s, sq, n))),
    })
}
