//! Flat `key = value` configuration files.
//!
//! Blank lines and `#` comments are ignored. Unknown and repeated keys are
//! rejected so that a typo can never silently fall back to a default.

use std::collections::BTreeMap;
use std::str::FromStr;

use heralded_swap::analytics::{db_to_probability, Objective};
use heralded_swap::sweep::{default_axes, linspace};
use heralded_swap::{Approach, FlipObservable, ProtocolParams};

use crate::error::{CliError, CliResult};

pub const KEYS: &[&str] = &[
    "approach",
    "p_abs",
    "r_a1",
    "p_qnd",
    "p_dark",
    "p_loss",
    "loss_db",
    "tau_ns",
    "t2_us",
    "rounds",
    "l_z",
    "l_x",
    "detector_eff",
    "flip_observable",
    "a2_relaxation",
    "bounds",
    "p_abs_axis",
    "p_loss_axis",
    "optimize",
    "objective",
    "min_fidelity",
    "fidelity_weight",
    "hops",
    "seed",
    "trajectories",
];

#[derive(Debug, Clone, Default)]
pub struct Config {
    values: BTreeMap<String, (String, usize)>,
}

impl Config {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::config(format!("line {line_no}: expected 'key = value'"))
            })?;
            let key = key.trim();
            let value = value.trim();
            if !KEYS.contains(&key) {
                return Err(CliError::config(format!(
                    "line {line_no}: unknown key '{key}'"
                )));
            }
            if value.is_empty() {
                return Err(CliError::config(format!(
                    "line {line_no}: key '{key}' has no value"
                )));
            }
            if let Some((_, first)) = values.get(key) {
                return Err(CliError::config(format!(
                    "line {line_no}: key '{key}' already set on line {first}"
                )));
            }
            values.insert(key.to_string(), (value.to_string(), line_no));
        }
        Ok(Self { values })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|(v, _)| v.as_str())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| CliError::config(format!("key '{key}': cannot parse '{v}': {e}")))
            })
            .transpose()
    }

    pub fn require<T: FromStr>(&self, key: &str) -> CliResult<T>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)?
            .ok_or_else(|| CliError::config(format!("missing required key '{key}'")))
    }

    pub fn flag(&self, key: &str, default: bool) -> CliResult<bool> {
        match self.raw(key) {
            None => Ok(default),
            Some("true" | "yes" | "1") => Ok(true),
            Some("false" | "no" | "0") => Ok(false),
            Some(v) => Err(CliError::config(format!(
                "key '{key}': expected true or false, got '{v}'"
            ))),
        }
    }
}

/// What to take from the config when building protocol parameters.
#[derive(Debug, Clone, Copy)]
pub struct ParamsRequest {
    pub approach_override: Option<Approach>,
    pub need_p_abs: bool,
    pub need_rounds: bool,
}

pub fn approach(config: &Config, override_: Option<Approach>) -> CliResult<Approach> {
    match override_ {
        Some(a) => Ok(a),
        None => config.require("approach"),
    }
}

/// Protocol parameters from the config on top of the experimental defaults.
pub fn protocol_params(config: &Config, req: ParamsRequest) -> CliResult<ProtocolParams> {
    let approach = approach(config, req.approach_override)?;
    let mut p = ProtocolParams::experimental_defaults(approach);
    if req.need_p_abs {
        p.p_abs = config.require("p_abs")?;
    } else if let Some(v) = config.get("p_abs")? {
        p.p_abs = v;
    }
    for (key, slot) in [
        ("r_a1", &mut p.r_a1),
        ("p_qnd", &mut p.p_qnd),
        ("p_dark", &mut p.p_dark),
        ("detector_eff", &mut p.detector_eff),
    ] {
        if let Some(v) = config.get(key)? {
            *slot = v;
        }
    }
    match (config.get::<f64>("p_loss")?, config.get::<f64>("loss_db")?) {
        (Some(_), Some(_)) => {
            return Err(CliError::config(
                "keys 'p_loss' and 'loss_db' are mutually exclusive",
            ))
        }
        (Some(v), None) => p.p_loss = v,
        (None, Some(db)) => {
            p.p_loss = db_to_probability(db)
                .map_err(|e| CliError::config(format!("key 'loss_db': {e}")))?
        }
        (None, None) => {}
    }
    if let Some(ns) = config.get::<f64>("tau_ns")? {
        p.tau_cycle = ns * 1e-9;
    }
    if let Some(us) = config.get::<f64>("t2_us")? {
        p.t2 = us * 1e-6;
    }
    if let Some(obs) = config.get::<FlipObservable>("flip_observable")? {
        p.flip_observable = obs;
    }
    p.a2_relaxation = config.flag("a2_relaxation", false)?;

    let rounds = if req.need_rounds {
        Some(config.require::<usize>("rounds")?)
    } else {
        config.get::<usize>("rounds")?
    };
    if let Some(l) = rounds {
        p = p.with_rounds(l);
    }
    if let Some(l_z) = config.get("l_z")? {
        p.l_z = l_z;
    }
    if let Some(l_x) = config.get("l_x")? {
        p.l_x = l_x;
    }
    p.validate_channels()?;
    if rounds.is_some() {
        p.validate()?;
    }
    Ok(p)
}

pub fn objective(config: &Config, approach: Approach) -> CliResult<Objective> {
    let kind = config.raw("objective").unwrap_or("min_fidelity");
    match kind {
        "min_fidelity" => {
            if config.contains("fidelity_weight") {
                return Err(CliError::config(
                    "key 'fidelity_weight' needs objective = weighted",
                ));
            }
            Ok(match config.get::<f64>("min_fidelity")? {
                Some(t) => Objective::MaxSuccessAtMinFidelity(t),
                None => Objective::default_for(approach),
            })
        }
        "weighted" => {
            if config.contains("min_fidelity") {
                return Err(CliError::config(
                    "key 'min_fidelity' needs objective = min_fidelity",
                ));
            }
            Ok(Objective::Weighted {
                fidelity_weight: config.get("fidelity_weight")?.unwrap_or(1.0),
            })
        }
        other => Err(CliError::config(format!(
            "key 'objective': unknown objective '{other}' (expected min_fidelity or weighted)"
        ))),
    }
}

/// Axis as `start:stop:count` or a comma-separated list.
pub fn parse_axis(key: &str, text: &str) -> CliResult<Vec<f64>> {
    let bad = |msg: String| CliError::config(format!("key '{key}': {msg}"));
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').map(str::trim).collect();
        let [start, stop, count] = parts[..] else {
            return Err(bad(format!("expected start:stop:count, got '{text}'")));
        };
        let start: f64 = start
            .parse()
            .map_err(|_| bad(format!("bad start '{start}'")))?;
        let stop: f64 = stop
            .parse()
            .map_err(|_| bad(format!("bad stop '{stop}'")))?;
        let count: usize = count
            .parse()
            .map_err(|_| bad(format!("bad count '{count}'")))?;
        if count == 0 {
            return Err(bad("count must be positive".into()));
        }
        Ok(linspace(start, stop, count))
    } else {
        text.split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| bad(format!("bad value '{}'", v.trim())))
            })
            .collect()
    }
}

pub fn axes(config: &Config) -> CliResult<(Vec<f64>, Vec<f64>)> {
    let (default_abs, default_loss) = default_axes();
    let abs = match config.raw("p_abs_axis") {
        Some(t) => parse_axis("p_abs_axis", t)?,
        None => default_abs,
    };
    let loss = match config.raw("p_loss_axis") {
        Some(t) => parse_axis("p_loss_axis", t)?,
        None => default_loss,
    };
    Ok((abs, loss))
}

/// `p_abs:L` pairs, comma separated.
pub fn bound_rows(config: &Config) -> CliResult<Vec<(f64, u32)>> {
    let text = config.require::<String>("bounds")?;
    text.split(',')
        .map(|pair| {
            let pair = pair.trim();
            let bad = || CliError::config(format!("key 'bounds': expected p_abs:L, got '{pair}'"));
            let (p, l) = pair.split_once(':').ok_or_else(bad)?;
            Ok((
                p.trim().parse().map_err(|_| bad())?,
                l.trim().parse().map_err(|_| bad())?,
            ))
        })
        .collect()
}
