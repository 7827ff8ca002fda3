//! Power-amplifier efficiency map and the consumed-power solver.
//!
//! The PA model ties radiated to consumed power through
//! P/P_cons = eps (P/P_max)^theta, i.e. P = (eps P_cons / P_max^theta)^(1/(1-theta)).
//! Power is noise-normalized throughout the crate; dB conversions happen at
//! the CLI boundary only.

use crate::{Error, Result};

/// Power-amplifier efficiency triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaConfig {
    /// Maximum efficiency, reached at P = p_max. In (0, 1].
    pub epsilon: f64,
    /// Class parameter theta in [0, 1); theta = 1 makes the map singular.
    pub theta: f64,
    /// Maximum output power (linear, noise-normalized).
    pub p_max: f64,
}

impl PaConfig {
    /// Ideal PA: every consumed watt is radiated.
    pub fn ideal() -> Self {
        PaConfig {
            epsilon: 1.0,
            theta: 0.0,
            p_max: f64::INFINITY,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::domain("PA epsilon must be in (0, 1]"));
        }
        if !(self.theta >= 0.0 && self.theta < 1.0) {
            return Err(Error::domain("PA theta must be in [0, 1)"));
        }
        if !(self.p_max > 0.0) {
            return Err(Error::domain("PA p_max must be positive"));
        }
        Ok(())
    }
}

/// Radiated output power for a given consumed power.
///
/// The P <= p_max constraint is deliberately not clamped here; the
/// optimization layer checks it explicitly and reports infeasibility.
pub fn output_power(pa: &PaConfig, p_cons: f64) -> f64 {
    debug_assert!(p_cons >= 0.0);
    if p_cons == 0.0 {
        return 0.0;
    }
    if pa.theta == 0.0 {
        return pa.epsilon * p_cons;
    }
    (pa.epsilon * p_cons / pa.p_max.powf(pa.theta)).powf(1.0 / (1.0 - pa.theta))
}

/// Solve for the consumed power at which `error_of(p_cons)` equals `beta`.
///
/// `error_of` must be strictly decreasing in its argument (more power,
/// fewer errors); the solver bisects on log10(p_cons) inside the default
/// bracket [1e-6, 1e6], widening by one decade per side before giving up.
/// The caller is responsible for the P <= p_max feasibility check via
/// [`output_power`].
pub fn solve_p_cons_for_beta<F: Fn(f64) -> Result<f64>>(error_of: F, beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::domain("beta must be in (0, 1)"));
    }
    let mut lo = -6.0_f64; // log10 p_cons
    let mut hi = 6.0_f64;
    // Error decreases in power, so error(lo) > beta > error(hi) is needed.
    let mut e_lo = error_of(10f64.powf(lo))?;
    let mut e_hi = error_of(10f64.powf(hi))?;
    if e_lo < beta {
        lo -= 10.0;
        e_lo = error_of(10f64.powf(lo))?;
    }
    if e_hi > beta {
        hi += 10.0;
        e_hi = error_of(10f64.powf(hi))?;
    }
    if !(e_lo >= beta && e_hi <= beta) {
        return Err(Error::NonBracketed {
            lo: 10f64.powf(lo),
            hi: 10f64.powf(hi),
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let e_mid = error_of(10f64.powf(mid))?;
        if (e_mid - beta).abs() < 1e-6 * beta {
            return Ok(10f64.powf(mid));
        }
        if e_mid > beta {
            lo = mid;
        } else {
            hi = mid;
        }
        // 1e-9 dB bracket: dB = 10 log10, so 1e-10 in log10 units.
        if hi - lo < 1e-10 {
            break;
        }
    }
    Ok(10f64.powf(0.5 * (lo + hi)))
}
