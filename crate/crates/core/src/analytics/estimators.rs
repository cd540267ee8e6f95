//! Physical parameter estimators.

use std::f64::consts::PI;

use crate::error::{probability, Error, Result};

fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be positive and finite, got {value}"),
        })
    }
}

/// Off-resonant suppression `1 / (1 + (Δν/δν)²)`.
pub fn lorentzian_suppression(detuning: f64, linewidth: f64) -> Result<f64> {
    let linewidth = positive("linewidth", linewidth)?;
    if !detuning.is_finite() {
        return Err(Error::InvalidParameter {
            name: "detuning",
            reason: format!("must be finite, got {detuning}"),
        });
    }
    let x = detuning / linewidth;
    Ok(1.0 / (1.0 + x * x))
}

/// Lifetime-limited linewidth `1 / (π·lifetime)` in Hz.
pub fn spectral_width(lifetime: f64) -> Result<f64> {
    Ok(1.0 / (PI * positive("lifetime", lifetime)?))
}

/// Per-cycle coherence factor `exp(-(τ/T2)²)`.
pub fn dephasing_factor(tau: f64, t2: f64) -> Result<f64> {
    let t2 = positive("t2", t2)?;
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "tau",
            reason: format!("must be non-negative, got {tau}"),
        });
    }
    let x = tau / t2;
    Ok((-x * x).exp())
}

/// Loss probability of an attenuation in dB: `1 - 10^(-dB/10)`.
pub fn db_to_probability(loss_db: f64) -> Result<f64> {
    if !(loss_db.is_finite() && loss_db >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "loss_db",
            reason: format!("must be a non-negative number of dB, got {loss_db}"),
        });
    }
    // -expm1 keeps precision for small attenuations
    Ok(-(-loss_db * std::f64::consts::LN_10 / 10.0).exp_m1())
}

/// Inverse of [`db_to_probability`]; a probability of 1 is infinite loss.
pub fn probability_to_db(p_loss: f64) -> Result<f64> {
    let p = probability("p_loss", p_loss)?;
    Ok(-10.0 * (-p).ln_1p() / std::f64::consts::LN_10)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn lorentzian() {
        assert_eq!(lorentzian_suppression(0.0, 1e6).unwrap(), 1.0);
        assert_eq!(lorentzian_suppression(30e6, 30e6).unwrap(), 0.5);
        let s = lorentzian_suppression(3e9, 30e6).unwrap();
        assert_relative_eq!(s, 1.0 / (1.0 + 1e4), max_relative = 1e-14);
        assert!(lorentzian_suppression(1.0, 0.0).is_err());
        assert!(lorentzian_suppression(1.0, -3.0).is_err());
    }

    #[test]
    fn width() {
        assert_relative_eq!(
            spectral_width(10e-9).unwrap(),
            31.830988618379067e6,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            spectral_width(20e-9).unwrap(),
            15.915494309189533e6,
            max_relative = 1e-14
        );
        assert_relative_eq!(spectral_width(1.0).unwrap(), 1.0 / PI);
        assert!(spectral_width(0.0).is_err());
    }

    #[test]
    fn dephasing() {
        let eta = dephasing_factor(200e-9, 100e-6).unwrap();
        assert!((1.0 - eta - 4e-6).abs() < 1e-10);
        assert_eq!(dephasing_factor(0.0, 1.0).unwrap(), 1.0);
        assert_relative_eq!(dephasing_factor(2.0, 2.0).unwrap(), (-1.0f64).exp());
        assert!(dephasing_factor(1.0, 0.0).is_err());
        assert!(dephasing_factor(-1.0, 1.0).is_err());
    }

    #[test]
    fn decibels() {
        assert!((db_to_probability(0.3).unwrap() - 0.0668).abs() < 1e-4);
        assert_eq!(db_to_probability(0.0).unwrap(), 0.0);
        assert_relative_eq!(db_to_probability(10.0).unwrap(), 0.9, max_relative = 1e-15);
        assert!(db_to_probability(-1.0).is_err());
        assert_relative_eq!(probability_to_db(0.9).unwrap(), 10.0, max_relative = 1e-14);
        assert!(probability_to_db(1.0).unwrap().is_infinite());
    }
}
