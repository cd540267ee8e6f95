//! One function per subcommand; each returns the finished CSV text so that
//! nothing is written unless the whole computation succeeded.

use heralded_swap::analytics::{optimize_rounds, BoundInputs};
use heralded_swap::relay::chain_profile;
use heralded_swap::sweep::sweep;
use heralded_swap::trajectory::run_trajectories;
use heralded_swap::{run_protocol, Approach, BellLabel, PerTarget, ProtocolParams};

use crate::config::{self, Config, ParamsRequest};
use crate::error::{CliError, CliResult};
use crate::format::{g6, opt, Table};

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub approach: Option<Approach>,
    pub seed: Option<u64>,
    pub trajectories: Option<usize>,
}

const FIDELITY_COLUMNS: [&str; 4] = ["F_phi+", "F_phi-", "F_psi+", "F_psi-"];

fn fidelity_cells(f: &PerTarget<Option<f64>>) -> Vec<String> {
    BellLabel::ALL.iter().map(|&b| opt(f[b])).collect()
}

fn header(prefix: &[&'static str], suffix: &[&'static str]) -> Vec<&'static str> {
    prefix
        .iter()
        .chain(&FIDELITY_COLUMNS)
        .chain(suffix)
        .copied()
        .collect()
}

/// Parameters for a single protocol configuration. With `optimize = true`
/// the round count comes from the optimiser instead of the config.
fn resolved_params(config: &Config, ov: &Overrides) -> CliResult<ProtocolParams> {
    let optimize = config.flag("optimize", false)?;
    let params = config::protocol_params(
        config,
        ParamsRequest {
            approach_override: ov.approach,
            need_p_abs: true,
            need_rounds: !optimize,
        },
    )?;
    if !optimize {
        return Ok(params);
    }
    let objective = config::objective(config, params.approach)?;
    Ok(optimize_rounds(&params, objective)?.params(&params))
}

pub fn run(config: &Config, ov: &Overrides) -> CliResult<String> {
    let params = resolved_params(config, ov)?;
    let trajectories = match ov.trajectories {
        Some(n) => Some(n),
        None => config.get::<usize>("trajectories")?,
    };
    if trajectories == Some(0) {
        return Err(CliError::config("key 'trajectories': must be positive"));
    }
    let seed = match ov.seed {
        Some(s) => s,
        None => config.get("seed")?.unwrap_or(0),
    };

    let result = run_protocol(&params)?;
    let mc = trajectories
        .map(|n| run_trajectories(&params, n, seed))
        .transpose()?;

    let mut table = Table::new(&header(
        &["round", "cumulative_success"],
        &["mc_cumulative_success", "mc_std_err"],
    ));
    for (k, success) in result.cumulative_success.iter().enumerate() {
        let mut cells = vec![(k + 1).to_string(), g6(*success)];
        let fidelities = result
            .round_fidelity
            .get(k)
            .cloned()
            .unwrap_or(PerTarget([None; 4]));
        cells.extend(fidelity_cells(&fidelities));
        let est = mc.as_ref().and_then(|m| m.cumulative_success.get(k));
        cells.push(g6(est.map_or(f64::NAN, |e| e.mean)));
        cells.push(g6(est.map_or(f64::NAN, |e| e.std_err)));
        table.row(cells);
    }
    let mut cells = vec!["total".to_string(), g6(result.total_success)];
    cells.extend(fidelity_cells(&result.fidelity_per_target));
    cells.push(g6(mc.as_ref().map_or(f64::NAN, |m| m.total_success.mean)));
    cells.push(g6(mc
        .as_ref()
        .map_or(f64::NAN, |m| m.total_success.std_err)));
    table.row(cells);
    Ok(table.into_string())
}

pub fn bounds(config: &Config, _ov: &Overrides) -> CliResult<String> {
    let rows = config::bound_rows(config)?;
    let p_qnd = config.get("p_qnd")?.unwrap_or(0.99);
    let p_dark = config.get("p_dark")?.unwrap_or(2e-4);
    let evaluated = rows
        .iter()
        .map(|&(p_abs, rounds)| {
            BoundInputs {
                p_abs,
                p_qnd,
                p_dark,
                rounds,
            }
            .evaluate()
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut table = Table::new(&["p_abs", "L", "P_fn_over_q_qnd", "P_fp_over_p_dark"]);
    for (&(p_abs, rounds), b) in rows.iter().zip(&evaluated) {
        table.row(vec![
            g6(p_abs),
            rounds.to_string(),
            g6(b.false_negative_over_q_qnd),
            g6(b.false_positive_over_p_dark),
        ]);
    }
    Ok(table.into_string())
}

pub fn sweep_grid(config: &Config, ov: &Overrides) -> CliResult<String> {
    let optimize = config.flag("optimize", true)?;
    let base = config::protocol_params(
        config,
        ParamsRequest {
            approach_override: ov.approach,
            need_p_abs: false,
            need_rounds: !optimize,
        },
    )?;
    let (abs_axis, loss_axis) = config::axes(config)?;
    let objective = optimize
        .then(|| config::objective(config, base.approach))
        .transpose()?;
    let grid = sweep(&abs_axis, &loss_axis, &base, objective)?;

    let mut table = Table::new(&header(
        &["p_abs", "p_loss", "approach", "L_used", "total_success"],
        &[],
    ));
    for cell in &grid.cells {
        let mut cells = vec![
            g6(cell.p_abs),
            g6(cell.p_loss),
            grid.approach.name().to_string(),
            cell.rounds.map_or("nan".to_string(), |l| l.to_string()),
            g6(cell.total_success),
        ];
        cells.extend(fidelity_cells(&cell.fidelity_per_target));
        table.row(cells);
    }
    Ok(table.into_string())
}

pub fn chain(config: &Config, ov: &Overrides) -> CliResult<String> {
    let hops: usize = config.require("hops")?;
    if hops == 0 {
        return Err(CliError::config("key 'hops': at least one hop is required"));
    }
    let params = resolved_params(config, ov)?;
    let profile = chain_profile(&params, hops)?;

    let mut table = Table::new(&["hops", "chain_success", "chain_fidelity"]);
    for c in &profile {
        table.row(vec![
            c.hops.to_string(),
            g6(c.chain_success),
            g6(c.chain_fidelity),
        ]);
    }
    Ok(table.into_string())
}

pub fn optimize(config: &Config, ov: &Overrides) -> CliResult<String> {
    let params = config::protocol_params(
        config,
        ParamsRequest {
            approach_override: ov.approach,
            need_p_abs: true,
            need_rounds: false,
        },
    )?;
    let objective = config::objective(config, params.approach)?;
    let best = optimize_rounds(&params, objective)?;

    let mut table = Table::new(&header(
        &[
            "approach",
            "L",
            "l_z",
            "l_x",
            "total_success",
            "min_fidelity",
        ],
        &[],
    ));
    let period = |v: usize| match params.approach {
        Approach::A => "nan".to_string(),
        Approach::B => v.to_string(),
    };
    let mut cells = vec![
        params.approach.name().to_string(),
        best.rounds.to_string(),
        period(best.l_z),
        period(best.l_x),
        g6(best.result.total_success),
        opt(best.result.min_fidelity()),
    ];
    cells.extend(fidelity_cells(&best.result.fidelity_per_target));
    table.row(cells);
    Ok(table.into_string())
}
