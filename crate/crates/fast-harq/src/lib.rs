//! Analytical engine and Monte Carlo link simulator for fast HARQ over
//! finite-blocklength codes on quasi-static fading channels.
//!
//! The fast HARQ protocol quantizes the sum channel gain seen across the
//! receive antennas into regions; the region index decides in which round
//! the receiver starts decoding and sending feedback, which removes most of
//! the decoding and ACK/NACK delay at low-to-moderate SNR. This crate
//! evaluates the protocol's error probability, expected packet delay,
//! throughput and constrained delay in closed form and by quadrature,
//! validates everything against a packet-level simulator, and optimizes the
//! quantization boundaries.
//!
//! Modules follow the pipeline:
//!
//! * [`specfun`] / [`quad`] / [`rng`] — numeric kernels (special functions,
//!   adaptive Gauss-Kronrod quadrature, counter-based random streams).
//! * [`channel`] — Rayleigh/Rician fading laws, sum-gain distribution,
//!   Gaussian/Gamma moment approximations, sampling, pilot-based estimation.
//! * [`power`] — PA efficiency map and the consumed-power solver for an
//!   error-probability target.
//! * [`fbl`] — per-round decoding-error probability of finite-blocklength
//!   codes and its long-codeword limit.
//! * [`analysis`] — all closed-form and quadrature link metrics.
//! * [`optimize`] — exhaustive and queen-style boundary optimization.
//! * [`montecarlo`] — packet-level event simulator used as the independent
//!   oracle for the analysis.
//! * [`cli`] — config-file driven front end (`analyze`, `simulate`,
//!   `optimize`, `figure`).
//!
//! See the crate `examples/` directory for one runnable example per major
//! capability.
//!
//! ```
//! use fast_harq::analysis::{self, Boundaries, DecodeDelay, HarqConfig};
//! use fast_harq::channel::{FadingModel, SumGainDistribution};
//! use fast_harq::fbl::CodeSpec;
//! use fast_harq::power::PaConfig;
//! use fast_harq::LinkSpec;
//!
//! // Two-round HARQ over a 12-antenna Rician channel, 500 nats in
//! // sub-codewords of 1000 channel uses, decoding delay half a codeword.
//! let dist = SumGainDistribution::new(
//!     FadingModel::Rician { k: 0.01, omega: 1.0 }, 12).unwrap();
//! let link = LinkSpec::new(dist, PaConfig::ideal(), HarqConfig {
//!     m_max: 2,
//!     code: CodeSpec { info_nats: 500.0, sub_len: 1000, third_order: false },
//!     feedback_delay: 40.0,
//!     decode_delay: DecodeDelay::Linear { coeff: 0.5 },
//! }).unwrap();
//!
//! // Decode from round 1 below the median gain, wait for round 2 above it.
//! let bounds = Boundaries::uniform_quantile(&link.dist, 2);
//! let metrics = analysis::link_metrics(&link, &bounds, 1.0).unwrap();
//! assert!(metrics.error_prob < 1e-9);
//! assert!((metrics.expected_delay - 2270.0).abs() < 1e-6);
//! ```

// Validation deliberately uses negated comparisons (`!(x > 0.0)`) so NaN
// inputs fail closed.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod channel;
pub mod cli;
pub mod fbl;
pub mod montecarlo;
pub mod optimize;
pub mod power;
pub mod quad;
pub mod rng;
pub mod specfun;

pub use analysis::{Boundaries, HarqConfig, LinkMetrics, LinkSpec};
pub use channel::{FadingModel, SumGainDistribution};
pub use fbl::CodeSpec;
pub use power::PaConfig;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A value left the representable f64 range.
    Overflow { what: &'static str },
    /// An iteration hit its cap before meeting the tolerance; carries the
    /// partial estimate for diagnostics.
    NonConvergence { what: &'static str, partial: f64 },
    /// Adaptive quadrature could not reach the requested tolerance.
    Quadrature { detail: String },
    /// A root bracket does not straddle the target.
    NonBracketed { lo: f64, hi: f64 },
    /// The error-probability target cannot be met under the PA power limit.
    Infeasible { required_output: f64, p_max: f64 },
    /// Success probability too small to condition on.
    DegenerateSuccess,
    /// The operation does not support the given configuration.
    Unsupported(String),
    /// Invalid input or configuration value.
    Domain(String),
}

impl Error {
    pub(crate) fn overflow(what: &'static str) -> Self {
        Error::Overflow { what }
    }
    pub(crate) fn non_convergence(what: &'static str, partial: f64) -> Self {
        Error::NonConvergence { what, partial }
    }
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }
}

impl std::fmt::Display for Error {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Error::Overflow { what } => write!(f, "overflow in {what}"),
            Error::NonConvergence { what, partial } => {
                write!(f, "{what} did not converge (partial estimate {partial})")
            }
            Error::Quadrature { detail } => write!(f, "quadrature failure: {detail}"),
            Error::NonBracketed { lo, hi } => {
                write!(f, "target not bracketed on [{lo}, {hi}]")
            }
            Error::Infeasible {
                required_output,
                p_max,
            } => write!(
                f,
                "infeasible: required output power {required_output} exceeds limit {p_max}"
            ),
            Error::DegenerateSuccess => {
                write!(f, "success probability too small to condition on")
            }
            Error::Unsupported(msg) => write!(f, "unsupported configuration: {msg}"),
            Error::Domain(msg) => write!(f, "invalid input: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
