//! Per-round decoding-error probability of finite-blocklength codes,
//! conditioned on the channel gain, plus the long-codeword limit.
//!
//! With incremental redundancy, K information nats sit in a parent codeword
//! of M sub-codewords of L channel uses each; after n combined rounds the
//! equivalent rate is K/(nL) and the normal approximation gives the
//! conditional error probability as a Gaussian Q of the capacity gap over
//! the dispersion.

use crate::specfun::q_function;
use crate::{Error, Result};

/// Code parameters shared by every round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodeSpec {
    /// K: information nats per parent codeword.
    pub info_nats: f64,
    /// L: channel uses per transmission round.
    pub sub_len: u32,
    /// Include the log(nL)/(2nL) third-order term in the rate expression.
    pub third_order: bool,
}

impl CodeSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.info_nats > 0.0) {
            return Err(Error::domain("info_nats must be positive"));
        }
        if self.sub_len < 1 {
            return Err(Error::domain("sub_len must be at least 1"));
        }
        Ok(())
    }

    /// Equivalent data rate after `n` combined rounds, K/(nL) npcu.
    pub fn rate_after(&self, n: u32) -> f64 {
        self.info_nats / (n as f64 * self.sub_len as f64)
    }
}

/// Probability that decoding fails after combining `n` rounds, given the
/// sum channel gain `g` and radiated power `p`.
///
/// At g = 0 the dispersion vanishes while the rate stays positive; the
/// continuous extension (error probability 1) applies.
pub fn round_error_prob(g: f64, n: u32, code: &CodeSpec, p: f64) -> f64 {
    debug_assert!(g >= 0.0 && n >= 1 && p > 0.0);
    if g == 0.0 {
        return 1.0;
    }
    let nl = n as f64 * code.sub_len as f64;
    let gp = g * p;
    let mut gap = (1.0 + gp).ln() - code.info_nats / nl;
    if code.third_order {
        gap += nl.ln() / (2.0 * nl);
    }
    // 1 - (1+gp)^-2 written as gp(2+gp)/(1+gp)^2 to stay exact near 0.
    let dispersion = (gp * (2.0 + gp)).sqrt() / (1.0 + gp);
    q_function(nl.sqrt() * gap / dispersion)
}

/// Long-codeword limit: is the message decodable after `n` rounds?
///
/// True iff g > (e^(K/(nL)) - 1)/p; the boundary point itself counts as not
/// decodable (a measure-zero convention).
pub fn asymptotic_decodable(g: f64, n: u32, code: &CodeSpec, p: f64) -> bool {
    g > asymptotic_threshold(n, code, p)
}

/// Gain threshold of the step-function error model after `n` rounds.
pub fn asymptotic_threshold(n: u32, code: &CodeSpec, p: f64) -> f64 {
    (code.rate_after(n).exp() - 1.0) / p
}
