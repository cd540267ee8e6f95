//! Closed-form upper bounds on false-negative and false-positive heralds.
//!
//! Both are geometric sums over the rounds in which the photon is still
//! travelling:
//!
//! * missed absorption: `p_abs·q_qnd · Σ_{l<L} (q_abs·p_qnd)^l`
//! * dark-count click:  `p_dark·q_abs · Σ_{l<L} (q_abs·q_dark)^l`
//!
//! The normalised forms (divided by `q_qnd` and `p_dark`) are computed
//! directly so they stay defined when the prefactor vanishes.

use crate::error::{probability, Error, Result};

/// `Σ_{l=0}^{n-1} r^l` for `r` in `[0, 1]`.
pub fn geometric_sum(ratio: f64, terms: u32) -> f64 {
    if terms == 0 {
        return 0.0;
    }
    if ratio == 1.0 {
        return f64::from(terms);
    }
    if ratio == 0.0 {
        return 1.0;
    }
    // (1 - r^n) / (1 - r) without cancellation near r = 1
    -(f64::from(terms) * ratio.ln()).exp_m1() / (1.0 - ratio)
}

fn rounds(value: u32) -> Result<u32> {
    if value == 0 {
        Err(Error::InvalidParameter {
            name: "rounds",
            reason: "at least one round is required".into(),
        })
    } else {
        Ok(value)
    }
}

/// False-negative bound divided by `q_qnd = 1 - p_qnd`.
pub fn normalized_false_negative_bound(p_abs: f64, p_qnd: f64, rounds_l: u32) -> Result<f64> {
    let p_abs = probability("p_abs", p_abs)?;
    let p_qnd = probability("p_qnd", p_qnd)?;
    let l = rounds(rounds_l)?;
    Ok(p_abs * geometric_sum((1.0 - p_abs) * p_qnd, l))
}

pub fn false_negative_bound(p_abs: f64, p_qnd: f64, rounds_l: u32) -> Result<f64> {
    Ok((1.0 - p_qnd) * normalized_false_negative_bound(p_abs, p_qnd, rounds_l)?)
}

/// False-positive bound divided by `p_dark`.
pub fn normalized_false_positive_bound(p_abs: f64, p_dark: f64, rounds_l: u32) -> Result<f64> {
    let p_abs = probability("p_abs", p_abs)?;
    let p_dark = probability("p_dark", p_dark)?;
    let l = rounds(rounds_l)?;
    let q_abs = 1.0 - p_abs;
    Ok(q_abs * geometric_sum(q_abs * (1.0 - p_dark), l))
}

pub fn false_positive_bound(p_abs: f64, p_dark: f64, rounds_l: u32) -> Result<f64> {
    Ok(p_dark * normalized_false_positive_bound(p_abs, p_dark, rounds_l)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    pub p_abs: f64,
    pub p_qnd: f64,
    pub p_dark: f64,
    pub rounds: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub false_negative: f64,
    pub false_positive: f64,
    pub false_negative_over_q_qnd: f64,
    pub false_positive_over_p_dark: f64,
}

impl BoundInputs {
    pub fn evaluate(&self) -> Result<Bounds> {
        let fn_norm = normalized_false_negative_bound(self.p_abs, self.p_qnd, self.rounds)?;
        let fp_norm = normalized_false_positive_bound(self.p_abs, self.p_dark, self.rounds)?;
        Ok(Bounds {
            false_negative: (1.0 - self.p_qnd) * fn_norm,
            false_positive: self.p_dark * fp_norm,
            false_negative_over_q_qnd: fn_norm,
            false_positive_over_p_dark: fp_norm,
        })
    }
}
