//! Closed-form and quadrature link metrics for fast and standard HARQ.
//!
//! The protocol quantizes the sum gain into M regions S^m = [q^m, q^(m-1));
//! a gain in region m means the receiver stays silent through rounds
//! 1..m-1, then decodes and feeds back from round m on. Every metric here
//! reduces to region probabilities and the joint probabilities
//! theta_n^m = integral over S^m of f_G(x) Q_n(x) dx, where Q_n is the
//! per-round error probability after n combined rounds.
//!
//! Joint round events use the monotone-decoding convention: one latent
//! uniform per packet, decodable at round n iff it clears Q_n. That makes
//! the first-success decompositions exact and is the coupling under which
//! the packet simulator and these formulas agree in expectation.
//!
//! Delay accounting: a packet that starts decoding in round m and stops in
//! round i spends i sub-codeword transmissions, one decoding delay for each
//! attempted round m..i, and one feedback delay per decoding round except
//! after the final round M.

use crate::channel::{
    clt_params, sample_joint_gain_estimate, FadingModel, GaussianApprox, PilotModel,
    SumGainDistribution,
};
use crate::fbl::{asymptotic_threshold, round_error_prob, CodeSpec};
use crate::montecarlo::SimEstimate;
use crate::power::{output_power, PaConfig};
use crate::quad::integrate_with_breakpoints;
use crate::rng::Stream;
use crate::specfun::{q_function, regularized_gamma_p, regularized_gamma_q};
use crate::{Error, Result};
use rayon::prelude::*;

/// Default absolute tolerance per metric integral.
pub const QUAD_TOL: f64 = 1e-10;
const QUAD_PANELS: usize = 4000;

/// Decoding-delay profile mapping codeword length to delay, both in
/// channel uses. Nondecreasing with zero delay at zero length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecodeDelay {
    /// delay(len) = coeff * len, the profile used throughout the paper's
    /// numerical studies.
    Linear { coeff: f64 },
}

impl DecodeDelay {
    pub fn eval(&self, len: f64) -> f64 {
        match *self {
            DecodeDelay::Linear { coeff } => coeff * len,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DecodeDelay::Linear { coeff } => {
                if !(coeff >= 0.0) {
                    return Err(Error::domain("decode delay coefficient must be >= 0"));
                }
            }
        }
        Ok(())
    }
}

/// HARQ protocol parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarqConfig {
    /// Maximum number of transmissions M.
    pub m_max: u32,
    pub code: CodeSpec,
    /// Feedback delay D per ACK/NACK, in channel uses.
    pub feedback_delay: f64,
    pub decode_delay: DecodeDelay,
}

impl HarqConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m_max < 1 {
            return Err(Error::domain("m_max must be at least 1"));
        }
        if !(self.feedback_delay >= 0.0) {
            return Err(Error::domain("feedback delay must be >= 0"));
        }
        self.code.validate()?;
        self.decode_delay.validate()
    }

    pub fn sub_len(&self) -> f64 {
        self.code.sub_len as f64
    }

    /// Decoding delay of a combined codeword of `rounds` sub-codewords.
    pub fn decode_delay_at(&self, rounds: u32) -> f64 {
        self.decode_delay.eval(rounds as f64 * self.sub_len())
    }
}

/// Total packet time in channel uses when the first decoding round is
/// `first` and transmission stops at round `stop`: transmissions, one
/// decoding delay per attempted round, and feedback after each decoding
/// round except the last protocol round.
pub fn packet_delay(cfg: &HarqConfig, first: u32, stop: u32) -> f64 {
    debug_assert!(first >= 1 && first <= stop && stop <= cfg.m_max);
    let decode: f64 = (first..=stop).map(|j| cfg.decode_delay_at(j)).sum();
    let feedbacks = if stop < cfg.m_max {
        stop - first + 1
    } else {
        cfg.m_max - first
    };
    stop as f64 * cfg.sub_len() + decode + feedbacks as f64 * cfg.feedback_delay
}

/// Quantization thresholds q^0 = inf >= q^1 >= ... >= q^(M-1) >= q^M = 0
/// partitioning the sum-gain axis; only the M-1 interior thresholds are
/// stored. All-zero interior thresholds reduce fast HARQ to standard HARQ.
#[derive(Debug, Clone, PartialEq)]
pub struct Boundaries {
    interior: Vec<f64>,
}

impl Boundaries {
    pub fn new(interior: Vec<f64>) -> Result<Self> {
        for w in interior.windows(2) {
            if !(w[1] <= w[0]) {
                return Err(Error::domain("boundaries must be nonincreasing"));
            }
        }
        if interior.iter().any(|q| !(*q >= 0.0) || !q.is_finite()) {
            return Err(Error::domain("boundaries must be finite and nonnegative"));
        }
        Ok(Boundaries { interior })
    }

    /// Standard HARQ: decode from round 1 (all interior thresholds zero).
    pub fn standard(m_max: u32) -> Self {
        Boundaries {
            interior: vec![0.0; (m_max - 1) as usize],
        }
    }

    /// Boundaries at CDF levels 1 - m/M, giving every region probability 1/M.
    pub fn uniform_quantile(dist: &SumGainDistribution, m_max: u32) -> Self {
        let levels: Vec<f64> = (1..m_max)
            .map(|m| 1.0 - m as f64 / m_max as f64)
            .collect();
        Self::from_quantiles(dist, &levels).expect("uniform levels are ordered")
    }

    /// Map nonincreasing CDF levels u^1 >= ... >= u^(M-1) to gain
    /// thresholds via the inverse CDF.
    pub fn from_quantiles(dist: &SumGainDistribution, levels: &[f64]) -> Result<Self> {
        let interior = levels.iter().map(|&u| dist.quantile(u)).collect();
        Self::new(interior)
    }

    pub fn m_max(&self) -> u32 {
        self.interior.len() as u32 + 1
    }

    pub fn interior(&self) -> &[f64] {
        &self.interior
    }

    /// Upper edge q^(m-1) of region S^m (infinite for m = 1).
    pub fn upper(&self, m: u32) -> f64 {
        debug_assert!(m >= 1 && m <= self.m_max());
        if m == 1 {
            f64::INFINITY
        } else {
            self.interior[(m - 2) as usize]
        }
    }

    /// Lower edge q^m of region S^m (zero for m = M).
    pub fn lower(&self, m: u32) -> f64 {
        debug_assert!(m >= 1 && m <= self.m_max());
        if m == self.m_max() {
            0.0
        } else {
            self.interior[(m - 1) as usize]
        }
    }

    /// Region index m with q^m <= g < q^(m-1).
    pub fn region_of(&self, g: f64) -> u32 {
        1 + self.interior.iter().filter(|&&q| q > g).count() as u32
    }
}

/// Everything the metrics need except the boundaries and the consumed
/// power: fading distribution, PA model, protocol parameters.
#[derive(Debug, Clone)]
pub struct LinkSpec {
    pub dist: SumGainDistribution,
    pub pa: PaConfig,
    pub harq: HarqConfig,
}

impl LinkSpec {
    pub fn new(dist: SumGainDistribution, pa: PaConfig, harq: HarqConfig) -> Result<Self> {
        pa.validate()?;
        harq.validate()?;
        Ok(LinkSpec { dist, pa, harq })
    }

    /// Radiated power for a consumed power under this link's PA.
    pub fn radiated(&self, p_cons: f64) -> f64 {
        output_power(&self.pa, p_cons)
    }
}

/// The evaluated metric tuple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkMetrics {
    pub error_prob: f64,
    /// Expected packet time in channel uses.
    pub expected_delay: f64,
    /// K (1 - error) / delay, nats per channel use.
    pub throughput: f64,
    /// Mean delay conditioned on successful decoding; None when the
    /// success probability is degenerate.
    pub constrained_delay: Option<f64>,
}

/// Linearized ramp replacing the per-round Q curve: value 1 below
/// `ramp_start`, 0 above `ramp_end`, anchored at 1/2 at `alpha` where the
/// slope is -`mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearizationConstants {
    pub alpha: f64,
    pub mu: f64,
    pub ramp_start: f64,
    pub ramp_end: f64,
}

impl LinearizationConstants {
    /// The ramp U_n(x).
    pub fn ramp(&self, x: f64) -> f64 {
        if x <= self.ramp_start {
            1.0
        } else if x >= self.ramp_end {
            0.0
        } else {
            0.5 - self.mu * (x - self.alpha)
        }
    }
}

/// Linearization point and slope of the round-n error curve:
/// alpha = (e^(K/(nL)) - 1)/P, mu = P sqrt(nL / (2 pi (e^(2K/(nL)) - 1))).
pub fn linearization_constants(n: u32, code: &CodeSpec, p: f64) -> LinearizationConstants {
    let r = code.rate_after(n);
    let nl = n as f64 * code.sub_len as f64;
    let alpha = (r.exp() - 1.0) / p;
    let mu = p * (nl / (2.0 * std::f64::consts::PI * ((2.0 * r).exp() - 1.0))).sqrt();
    LinearizationConstants {
        alpha,
        mu,
        ramp_start: alpha - 0.5 / mu,
        ramp_end: alpha + 0.5 / mu,
    }
}

/// Quadrature split points around the round-n error transition. The true Q
/// curve rolls off over a few 1/mu around alpha, wider than the linearized
/// ramp, and a panel that straddles the whole transition can alias to zero.
pub(crate) fn q_transition_breakpoints(n: u32, code: &CodeSpec, p: f64) -> [f64; 5] {
    let lin = linearization_constants(n, code, p);
    let w = 1.0 / lin.mu;
    [
        lin.alpha - 4.0 * w,
        lin.ramp_start,
        lin.alpha,
        lin.ramp_end,
        lin.alpha + 4.0 * w,
    ]
}

/// Which per-round error model the metric engine evaluates.
#[derive(Debug, Clone, Copy, PartialEq)]
enum ErrorModel {
    FiniteBlocklength,
    /// Long-codeword limit: Q becomes a step at (e^(K/(nL)) - 1)/P.
    Asymptotic,
}

/// Internal evaluator binding a link, boundaries, power and error model.
struct Engine<'a> {
    link: &'a LinkSpec,
    bounds: &'a Boundaries,
    /// Radiated power.
    p: f64,
    model: ErrorModel,
    quad_tol: f64,
}

impl<'a> Engine<'a> {
    fn new(link: &'a LinkSpec, bounds: &'a Boundaries, p_cons: f64, model: ErrorModel) -> Self {
        Engine {
            link,
            bounds,
            p: link.radiated(p_cons),
            model,
            quad_tol: QUAD_TOL,
        }
    }

    fn m_max(&self) -> u32 {
        self.link.harq.m_max
    }

    fn cdf_capped(&self, x: f64) -> f64 {
        if x.is_infinite() {
            1.0
        } else {
            self.link.dist.cdf(x)
        }
    }

    fn region_prob(&self, m: u32) -> f64 {
        self.cdf_capped(self.bounds.upper(m)) - self.cdf_capped(self.bounds.lower(m))
    }

    /// integral over [lo, hi] of f_G(x) Q_n(x) dx; n = 0 means Q_0 = 1.
    fn theta_interval(&self, lo: f64, hi: f64, n: u32) -> Result<f64> {
        let cutoff = self.link.dist.upper_cutoff();
        let hi = hi.min(cutoff);
        let lo = lo.min(hi);
        if lo >= hi {
            return Ok(0.0);
        }
        if n == 0 {
            return Ok(self.cdf_capped(hi) - self.cdf_capped(lo));
        }
        match self.model {
            ErrorModel::FiniteBlocklength => {
                let code = &self.link.harq.code;
                let p = self.p;
                let f = |x: f64| self.link.dist.pdf(x) * round_error_prob(x, n, code, p);
                let v = integrate_with_breakpoints(
                    &f,
                    lo,
                    hi,
                    &q_transition_breakpoints(n, code, p),
                    self.quad_tol,
                    QUAD_PANELS,
                )?;
                // A probability up to floating-point noise.
                Ok(v.clamp(0.0, 1.0))
            }
            ErrorModel::Asymptotic => {
                let t = asymptotic_threshold(n, &self.link.harq.code, self.p);
                Ok(self.cdf_capped(hi.min(t)) - self.cdf_capped(lo.min(t)))
            }
        }
    }

    /// theta_n^m: joint probability of region m and no decode through
    /// round n (upper-bound-as-equality convention).
    fn theta(&self, m: u32, n: u32) -> Result<f64> {
        self.theta_interval(self.bounds.lower(m), self.bounds.upper(m), n)
    }

    fn error_prob(&self) -> Result<f64> {
        self.theta_interval(0.0, f64::INFINITY, self.m_max())
    }

    /// Expected packet delay: region terms, per-round continuation terms
    /// weighted by theta, and the feedback terms.
    fn expected_delay(&self) -> Result<f64> {
        assemble_delay(
            &self.link.harq,
            |m| self.region_prob(m),
            |m, n| self.theta(m, n),
        )
    }

    /// Mean delay conditioned on successful decoding, via the first-success
    /// decomposition of the monotone coupling.
    fn constrained_delay(&self) -> Result<f64> {
        let cfg = &self.link.harq;
        let m_max = self.m_max();
        let success = 1.0 - self.error_prob()?;
        if success < 1e-12 {
            return Err(Error::DegenerateSuccess);
        }
        let mut acc = 0.0;
        for m in 1..=m_max {
            // First success exactly at round i >= m within region m.
            let mut prev = self.region_prob(m); // corresponds to Q_(m-1) := 1 gate
            for i in m..=m_max {
                let th = self.theta(m, i)?;
                let w = prev - th;
                debug_assert!(
                    w >= -1e-9,
                    "first-success weight must be nonnegative (m={m}, i={i}: {w})"
                );
                acc += w.max(0.0) * packet_delay(cfg, m, i);
                prev = th;
            }
        }
        Ok(acc / success)
    }

    /// (probability of any unnecessary round, expected wasted energy per
    /// sub-codeword length).
    fn unnecessary_tx(&self) -> Result<(f64, f64)> {
        let m_max = self.m_max();
        let mut prob = 0.0;
        let mut energy_per_pcons = 0.0;
        for m in 2..=m_max {
            // Decodable strictly before the scheduled first decode at m.
            let th = self.theta(m, m - 1)?;
            prob += self.region_prob(m) - th;
            // First decodable round i < m wastes (m - i) rounds.
            let mut prev = self.region_prob(m); // Q_0 = 1
            for i in 1..m {
                let thi = self.theta(m, i)?;
                let w = prev - thi;
                debug_assert!(w >= -1e-9, "wasted-round weight (m={m}, i={i}: {w})");
                energy_per_pcons += (m - i) as f64 * w.max(0.0);
                prev = thi;
            }
        }
        Ok((prob.max(0.0), energy_per_pcons))
    }
}

/// Probability that the gain falls in region S^m.
pub fn region_prob(dist: &SumGainDistribution, bounds: &Boundaries, m: u32) -> f64 {
    let hi = bounds.upper(m);
    let hi_cdf = if hi.is_infinite() { 1.0 } else { dist.cdf(hi) };
    hi_cdf - dist.cdf(bounds.lower(m))
}

/// Joint probability theta_i^m that the gain is in region m and the message
/// is not decoded through round i.
pub fn theta_im(
    link: &LinkSpec,
    bounds: &Boundaries,
    p_cons: f64,
    i: u32,
    m: u32,
) -> Result<f64> {
    Engine::new(link, bounds, p_cons, ErrorModel::FiniteBlocklength).theta(m, i)
}

/// Packet error probability after all M rounds. Independent of the
/// quantization boundaries by construction.
pub fn error_prob(link: &LinkSpec, p_cons: f64) -> Result<f64> {
    let bounds = Boundaries::standard(link.harq.m_max);
    Engine::new(link, &bounds, p_cons, ErrorModel::FiniteBlocklength).error_prob()
}

/// Error probability assembled region by region (telescoping route). Used
/// to demonstrate boundary independence; tighter quadrature than default.
pub fn error_prob_partitioned(link: &LinkSpec, bounds: &Boundaries, p_cons: f64) -> Result<f64> {
    let mut engine = Engine::new(link, bounds, p_cons, ErrorModel::FiniteBlocklength);
    engine.quad_tol = 1e-13;
    let mut total = 0.0;
    for m in 1..=link.harq.m_max {
        total += engine.theta(m, link.harq.m_max)?;
    }
    Ok(total)
}

/// Expected packet transmission delay in channel uses.
pub fn expected_delay(link: &LinkSpec, bounds: &Boundaries, p_cons: f64) -> Result<f64> {
    Engine::new(link, bounds, p_cons, ErrorModel::FiniteBlocklength).expected_delay()
}

/// End-to-end throughput K (1 - error) / delay in npcu.
pub fn throughput(info_nats: f64, error_prob: f64, expected_delay: f64) -> f64 {
    debug_assert!(expected_delay > 0.0);
    info_nats * (1.0 - error_prob) / expected_delay
}

/// Mean delay over successfully decoded packets.
pub fn constrained_delay(link: &LinkSpec, bounds: &Boundaries, p_cons: f64) -> Result<f64> {
    Engine::new(link, bounds, p_cons, ErrorModel::FiniteBlocklength).constrained_delay()
}

/// Probability of unnecessary transmissions (message decodable before the
/// scheduled first decoding round) and the matching expected wasted energy
/// normalized by the sub-codeword length.
pub fn unnecessary_tx_stats(
    link: &LinkSpec,
    bounds: &Boundaries,
    p_cons: f64,
) -> Result<(f64, f64)> {
    let (prob, wasted_rounds) =
        Engine::new(link, bounds, p_cons, ErrorModel::FiniteBlocklength).unnecessary_tx()?;
    Ok((prob, wasted_rounds * p_cons))
}

/// The reference integral: integral over [a, b] of f_G(x) Q_n(x) dx.
pub fn y_integral(link: &LinkSpec, a: f64, b: f64, n: u32, p_cons: f64) -> Result<f64> {
    let bounds = Boundaries::standard(link.harq.m_max);
    Engine::new(link, &bounds, p_cons, ErrorModel::FiniteBlocklength).theta_interval(a, b, n)
}

/// All metrics at once (finite-blocklength model).
pub fn link_metrics(link: &LinkSpec, bounds: &Boundaries, p_cons: f64) -> Result<LinkMetrics> {
    let engine = Engine::new(link, bounds, p_cons, ErrorModel::FiniteBlocklength);
    assemble_metrics(link, &engine)
}

/// All metrics in the long-codeword limit, where the per-round error curve
/// becomes a step at (e^(K/(nL)) - 1)/P and the error probability reduces
/// to F_G at the round-M threshold.
pub fn asymptotic_metrics(
    link: &LinkSpec,
    bounds: &Boundaries,
    p_cons: f64,
) -> Result<LinkMetrics> {
    let engine = Engine::new(link, bounds, p_cons, ErrorModel::Asymptotic);
    assemble_metrics(link, &engine)
}

fn assemble_metrics(link: &LinkSpec, engine: &Engine) -> Result<LinkMetrics> {
    let error = engine.error_prob()?;
    let delay = engine.expected_delay()?;
    let constrained = match engine.constrained_delay() {
        Ok(v) => Some(v),
        Err(Error::DegenerateSuccess) => None,
        Err(e) => return Err(e),
    };
    Ok(LinkMetrics {
        error_prob: error,
        expected_delay: delay,
        throughput: throughput(link.harq.code.info_nats, error, delay),
        constrained_delay: constrained,
    })
}

/// Gaussian-approximation error probability in the long-codeword limit:
/// Q((N_r zeta - (e^(R/M) - 1)/P) / sqrt(N_r nu^2)).
pub fn asymptotic_error_clt(link: &LinkSpec, p_cons: f64) -> f64 {
    let gauss = clt_params(link.dist.model(), link.dist.n_r());
    let t = asymptotic_threshold(link.harq.m_max, &link.harq.code, link.radiated(p_cons));
    q_function((gauss.mean - t) / gauss.variance.sqrt())
}

/// Closed form of the linearized-ramp integral against the Gaussian
/// sum-gain approximation (the Rician route).
pub fn y_linearized_gaussian(gauss: &GaussianApprox, a: f64, b: f64, lin: &LinearizationConstants) -> f64 {
    debug_assert!(a <= b);
    let mean = gauss.mean;
    let sd = gauss.variance.sqrt();
    let cdf = |x: f64| q_function((mean - x) / sd);
    let lo1 = a.min(lin.ramp_start);
    let hi1 = b.min(lin.ramp_start);
    let lo2 = a.max(lin.ramp_start).min(lin.ramp_end);
    let hi2 = b.min(lin.ramp_end).max(lin.ramp_start);
    let plateau = cdf(hi1) - cdf(lo1);
    let ramp_mass = (0.5 + lin.alpha * lin.mu - lin.mu * mean) * (cdf(hi2) - cdf(lo2));
    let ramp_tilt = lin.mu * gauss.variance * (gauss.pdf(hi2) - gauss.pdf(lo2));
    plateau + ramp_mass + ramp_tilt
}

/// Closed form of the linearized-ramp integral against the exact Rayleigh
/// sum-gain density (Gamma with shape N_r, scale omega).
///
/// The first-moment piece is
/// integral over [A, B] of x f_G(x) dx = N_r omega (Q(N_r+1, A/omega) - Q(N_r+1, B/omega))
/// with Q the regularized upper gamma; it enters with a minus sign from the
/// falling ramp.
pub fn y_linearized_rayleigh(
    model: FadingModel,
    n_r: u32,
    a: f64,
    b: f64,
    lin: &LinearizationConstants,
) -> Result<f64> {
    debug_assert!(a <= b);
    let omega = match model {
        FadingModel::Rayleigh { omega } => omega,
        FadingModel::Rician { .. } => {
            return Err(Error::unsupported("y_linearized_rayleigh applies to Rayleigh fading"))
        }
    };
    let n = n_r as f64;
    let cdf = |x: f64| {
        if x <= 0.0 {
            0.0
        } else {
            regularized_gamma_p(n, x / omega)
        }
    };
    let lo1 = a.min(lin.ramp_start);
    let hi1 = b.min(lin.ramp_start);
    let lo2 = a.max(lin.ramp_start).min(lin.ramp_end);
    let hi2 = b.min(lin.ramp_end).max(lin.ramp_start);
    let plateau = cdf(hi1) - cdf(lo1);
    let ramp_mass = (0.5 + lin.alpha * lin.mu) * (cdf(hi2) - cdf(lo2));
    let first_moment = n * omega
        * (regularized_gamma_q(n + 1.0, lo2.max(0.0) / omega)
            - regularized_gamma_q(n + 1.0, hi2.max(0.0) / omega));
    Ok(plateau + ramp_mass - lin.mu * first_moment)
}

/// Shared expected-delay assembly from region probabilities and the
/// theta(m, n) joint probabilities.
fn assemble_delay<R, T>(cfg: &HarqConfig, region_prob: R, theta: T) -> Result<f64>
where
    R: Fn(u32) -> f64,
    T: Fn(u32, u32) -> Result<f64>,
{
    let m_max = cfg.m_max;
    let l = cfg.sub_len();
    let d = cfg.feedback_delay;
    let mut tau = 0.0;
    for m in 1..=m_max {
        let pr = region_prob(m);
        tau += pr * (m as f64 * l + cfg.decode_delay_at(m));
        if m < m_max {
            tau += d * pr;
            for i in (m + 1)..=m_max {
                let th = theta(m, i - 1)?;
                tau += (l + cfg.decode_delay_at(i)) * th;
                if i < m_max {
                    tau += d * th;
                }
            }
        }
    }
    Ok(tau)
}

/// Expected delay with every probability replaced by its Gaussian
/// (CLT + linearization) closed form: regions from the Gaussian CDF, joint
/// probabilities from the Gaussian-linearized ramp integral.
pub fn expected_delay_linearized_gaussian(link: &LinkSpec, bounds: &Boundaries, p_cons: f64) -> Result<f64> {
    let gauss = clt_params(link.dist.model(), link.dist.n_r());
    let p = link.radiated(p_cons);
    assemble_delay(
        &link.harq,
        |m| gauss.cdf(bounds.upper(m)) - gauss.cdf(bounds.lower(m)),
        |m, n| {
            let lin = linearization_constants(n, &link.harq.code, p);
            Ok(y_linearized_gaussian(&gauss, bounds.lower(m), bounds.upper(m), &lin))
        },
    )
}

/// Expected delay for Rayleigh fading with the exact sum CDF for regions
/// and the linearized-ramp closed form for the joint probabilities.
pub fn expected_delay_linearized_rayleigh(link: &LinkSpec, bounds: &Boundaries, p_cons: f64) -> Result<f64> {
    let model = link.dist.model();
    if !matches!(model, FadingModel::Rayleigh { .. }) {
        return Err(Error::unsupported(
            "expected_delay_linearized_rayleigh applies to Rayleigh fading",
        ));
    }
    let n_r = link.dist.n_r();
    let p = link.radiated(p_cons);
    assemble_delay(
        &link.harq,
        |m| region_prob(&link.dist, bounds, m),
        |m, n| {
            let lin = linearization_constants(n, &link.harq.code, p);
            y_linearized_rayleigh(model, n_r, bounds.lower(m), bounds.upper(m), &lin)
        },
    )
}

/// Relative expected-delay gain (tau_std - tau_fast) / tau_std.
pub fn relative_gain(tau_std: f64, tau_fast: f64) -> f64 {
    debug_assert!(tau_std > 0.0);
    (tau_std - tau_fast) / tau_std
}

/// Low-SNR limit of the relative gain with a linear decoding profile:
/// c (M - 1) / (2 + c (M + 1)).
pub fn low_snr_gain_limit(m_max: u32, c: f64) -> f64 {
    debug_assert!(m_max >= 1 && c >= 0.0);
    let m = m_max as f64;
    c * (m - 1.0) / (2.0 + c * (m + 1.0))
}

/// Expected delay under imperfect CSIR: the receiver picks its first
/// decoding round from the pilot-based gain estimate while decodability
/// follows the true gain. Monte Carlo over the joint (G, G-estimate) law
/// with the per-round error curves integrated out analytically.
///
/// SISO Rayleigh only, matching the pilot estimation model.
pub fn expected_delay_imperfect_csir(
    link: &LinkSpec,
    pilot: PilotModel,
    bounds: &Boundaries,
    p_cons: f64,
    n_samples: u64,
    seed: u64,
) -> Result<SimEstimate> {
    if link.dist.n_r() != 1 {
        return Err(Error::unsupported("imperfect CSIR analysis is SISO only"));
    }
    if !matches!(link.dist.model(), FadingModel::Rayleigh { .. }) {
        return Err(Error::unsupported(
            "imperfect CSIR analysis needs Rayleigh fading",
        ));
    }
    if n_samples == 0 {
        return Err(Error::domain("n_samples must be positive"));
    }
    pilot.validate()?;
    let cfg = &link.harq;
    let p = link.radiated(p_cons);
    let model = link.dist.model();
    let m_max = cfg.m_max;
    let l = cfg.sub_len();
    let d = cfg.feedback_delay;

    let chunk = 1u64 << 14;
    let n_chunks = n_samples.div_ceil(chunk);
    let sums: Vec<(f64, f64)> = (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let lo = ci * chunk;
            let hi = (lo + chunk).min(n_samples);
            let mut s = 0.0;
            let mut s2 = 0.0;
            for idx in lo..hi {
                let mut stream = Stream::new(seed, idx);
                let (g, g_est) = sample_joint_gain_estimate(model, pilot, &mut stream)
                    .expect("validated above");
                let n = bounds.region_of(g_est);
                let tau = if n == m_max {
                    m_max as f64 * l + cfg.decode_delay_at(m_max)
                } else {
                    let mut t = n as f64 * l + cfg.decode_delay_at(n) + d;
                    for i in (n + 1)..=m_max {
                        let q_prev = round_error_prob(g, i - 1, &cfg.code, p);
                        t += (l + cfg.decode_delay_at(i)) * q_prev;
                        if i < m_max {
                            t += d * q_prev;
                        }
                    }
                    t
                };
                s += tau;
                s2 += tau * tau;
            }
            (s, s2)
        })
        .collect();
    let (sum, sum2) = sums
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let n = n_samples as f64;
    let mean = sum / n;
    let var = ((sum2 - n * mean * mean) / (n - 1.0).max(1.0)).max(0.0);
    Ok(SimEstimate {
        mean,
        std_error: (var / n).sqrt(),
        n_samples,
    })
}
