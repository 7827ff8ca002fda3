//! Fading laws for the per-antenna gains and the sum gain G.
//!
//! Covers the exact sum-gain pdf/cdf for Rayleigh (Gamma form) and Rician
//! (Bessel form, evaluated in log space with scaled Bessel kernels so large
//! antenna counts never overflow), the Gaussian and Gamma moment-matched
//! approximations, inverse-CDF quantiles, Monte Carlo sampling from
//! caller-owned streams, and the pilot-based joint (gain, estimate) model
//! used for imperfect CSIR.
//!
//! Distributions are immutable after construction; the Rician CDF is backed
//! by a prefix table of Gauss-Kronrod panels built once in the constructor.

use crate::quad::integrate;
use crate::rng::Stream;
use crate::specfun::{
    bessel_i_scaled, kummer_1f1, ln_gamma, q_function, regularized_gamma_p, Accuracy,
};
use crate::{Error, Result};

/// Per-antenna fading law with its long-term parameters.
///
/// `Rician { k: 0, omega }` and `Rayleigh { omega }` describe the same
/// channel; all operations are continuous across that limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FadingModel {
    Rayleigh { omega: f64 },
    Rician { k: f64, omega: f64 },
}

impl FadingModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            FadingModel::Rayleigh { omega } => {
                if !(omega > 0.0) {
                    return Err(Error::domain("Rayleigh omega must be positive"));
                }
            }
            FadingModel::Rician { k, omega } => {
                if !(omega > 0.0) {
                    return Err(Error::domain("Rician omega must be positive"));
                }
                if !(k >= 0.0) {
                    return Err(Error::domain("Rician k must be nonnegative"));
                }
            }
        }
        Ok(())
    }

    pub fn omega(&self) -> f64 {
        match *self {
            FadingModel::Rayleigh { omega } => omega,
            FadingModel::Rician { omega, .. } => omega,
        }
    }

    /// Draw one per-antenna power gain.
    pub fn sample_gain(&self, stream: &mut Stream) -> f64 {
        match *self {
            FadingModel::Rayleigh { omega } => -omega * stream.uniform_open().ln(),
            FadingModel::Rician { k, omega } => {
                let mu = (k * omega / (k + 1.0)).sqrt();
                let s = (0.5 * omega / (k + 1.0)).sqrt();
                let (z1, z2) = stream.normal_pair();
                let re = mu + s * z1;
                let im = s * z2;
                re * re + im * im
            }
        }
    }
}

/// Gaussian approximation of the sum gain: mean N_r * zeta, variance
/// N_r * nu^2, with the per-antenna moments from the fading law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianApprox {
    pub mean: f64,
    pub variance: f64,
}

impl GaussianApprox {
    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_infinite() {
            return if x > 0.0 { 1.0 } else { 0.0 };
        }
        q_function((self.mean - x) / self.variance.sqrt())
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let d = x - self.mean;
        (-0.5 * d * d / self.variance).exp()
            / (2.0 * std::f64::consts::PI * self.variance).sqrt()
    }
}

/// Gamma approximation of the sum gain, rate/shape parameterization.
/// Exact for Rayleigh fading (rate 1/omega, shape N_r).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaApprox {
    /// Rate s0 (inverse gain).
    pub rate: f64,
    /// Shape s1 (dimensionless).
    pub shape: f64,
}

impl GammaApprox {
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else if x.is_infinite() {
            1.0
        } else {
            regularized_gamma_p(self.shape, self.rate * x)
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        (self.shape * self.rate.ln() + (self.shape - 1.0) * x.ln() - self.rate * x
            - ln_gamma(self.shape))
        .exp()
    }
}

/// Per-antenna moments of the fading law: zeta = E[g], nu2 = Var[g].
///
/// For Rician these come from the moment integral
/// S(n) = e^-k (omega/(k+1))^n Gamma(1+n) 1F1(n+1; 1; k), validated against
/// direct quadrature of the moment integrand (the e^-k factor is required
/// for the integral to come out right; it makes zeta = omega exactly).
pub fn antenna_moments(model: FadingModel) -> (f64, f64) {
    match model {
        FadingModel::Rayleigh { omega } => (omega, omega * omega),
        FadingModel::Rician { k, omega } => {
            let s = |n: f64| -> f64 {
                (-k + n * (omega / (k + 1.0)).ln() + ln_gamma(1.0 + n)).exp()
                    * kummer_1f1(n + 1.0, 1.0, k, Accuracy::default())
                        .expect("1F1(n+1;1;k) converges for k >= 0")
            };
            let zeta = s(1.0);
            let nu2 = s(2.0) - zeta * zeta;
            (zeta, nu2)
        }
    }
}

/// Central-limit Gaussian approximation of the sum gain.
pub fn clt_params(model: FadingModel, n_r: u32) -> GaussianApprox {
    let (zeta, nu2) = antenna_moments(model);
    GaussianApprox {
        mean: n_r as f64 * zeta,
        variance: n_r as f64 * nu2,
    }
}

/// Gamma approximation of the sum gain by moment matching: rate zeta/nu^2,
/// shape N_r zeta^2/nu^2. Reduces to the exact (1/omega, N_r) pair for
/// Rayleigh fading.
pub fn gamma_params(model: FadingModel, n_r: u32) -> GammaApprox {
    match model {
        FadingModel::Rayleigh { omega } => GammaApprox {
            rate: 1.0 / omega,
            shape: n_r as f64,
        },
        FadingModel::Rician { .. } => {
            let (zeta, nu2) = antenna_moments(model);
            GammaApprox {
                rate: zeta / nu2,
                shape: n_r as f64 * zeta * zeta / nu2,
            }
        }
    }
}

/// Prefix-sum table of Gauss-Kronrod panels over [0, x_hi], used for the
/// Rician sum-gain CDF (which has no closed form).
#[derive(Debug, Clone)]
struct CdfTable {
    /// Panel edges, ascending, edges[0] = 0.
    edges: Vec<f64>,
    /// prefix[i] = integral of the pdf over [0, edges[i]].
    prefix: Vec<f64>,
}

/// Distribution of the sum channel gain G over `n_r` receive antennas.
#[derive(Debug, Clone)]
pub struct SumGainDistribution {
    model: FadingModel,
    n_r: u32,
    upper_cutoff: f64,
    table: Option<CdfTable>,
}

impl SumGainDistribution {
    pub fn new(model: FadingModel, n_r: u32) -> Result<Self> {
        model.validate()?;
        if n_r == 0 || n_r > 4096 {
            return Err(Error::domain("antenna count must be in 1..=4096"));
        }
        let upper_cutoff = upper_cutoff(model, n_r);
        let mut dist = SumGainDistribution {
            model,
            n_r,
            upper_cutoff,
            table: None,
        };
        if matches!(model, FadingModel::Rician { .. }) {
            dist.table = Some(dist.build_table());
        }
        Ok(dist)
    }

    pub fn model(&self) -> FadingModel {
        self.model
    }

    pub fn n_r(&self) -> u32 {
        self.n_r
    }

    /// Gain beyond which the upper tail carries less than ~1e-15 mass;
    /// every improper integral over the gain axis is truncated here.
    pub fn upper_cutoff(&self) -> f64 {
        self.upper_cutoff
    }

    /// Exact sum-gain density f_G(x).
    pub fn pdf(&self, x: f64) -> f64 {
        debug_assert!(x >= 0.0, "gain must be nonnegative");
        let n = self.n_r as f64;
        match self.model {
            FadingModel::Rayleigh { omega } => {
                // Gamma(N_r, omega) density.
                if x == 0.0 {
                    return if self.n_r == 1 { 1.0 / omega } else { 0.0 };
                }
                ((n - 1.0) * (x / omega).ln() - x / omega - ln_gamma(n) - omega.ln()).exp()
            }
            FadingModel::Rician { k, omega } => {
                let a = (k + 1.0) / omega;
                let nu = self.n_r - 1;
                if x == 0.0 {
                    return if self.n_r == 1 { a * (-k).exp() } else { 0.0 };
                }
                // f = a e^{-k N_r} (a x)^nu e^{-a x} Itilde_nu(kappa x), where
                // Itilde_nu(y) = y^{-nu/2} I_nu(2 sqrt(y)) is entire in y.
                let kappa = k * (k + 1.0) * n / omega;
                let mut log_f = a.ln() - k * n - a * x + log_itilde(nu, kappa * x);
                if nu > 0 {
                    log_f += nu as f64 * (a * x).ln();
                }
                log_f.exp()
            }
        }
    }

    /// CDF of the sum gain. Closed form (regularized incomplete gamma) for
    /// Rayleigh; cached-panel quadrature of the pdf for Rician.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match self.model {
            FadingModel::Rayleigh { omega } => regularized_gamma_p(self.n_r as f64, x / omega),
            FadingModel::Rician { .. } => {
                let table = self.table.as_ref().expect("Rician table built on construction");
                if x >= self.upper_cutoff {
                    return 1.0;
                }
                let idx = match table
                    .edges
                    .binary_search_by(|e| e.partial_cmp(&x).unwrap())
                {
                    Ok(i) => return table.prefix[i].min(1.0),
                    Err(i) => i - 1,
                };
                let partial =
                    integrate(&|t| self.pdf(t), table.edges[idx], x, 1e-13, 64).unwrap_or(0.0);
                (table.prefix[idx] + partial).min(1.0)
            }
        }
    }

    /// Inverse CDF by bisection (no closed form for Rician sums).
    pub fn quantile(&self, u: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&u));
        if u <= 0.0 {
            return 0.0;
        }
        let mut lo = 0.0;
        let mut hi = self.upper_cutoff;
        if u >= self.cdf(hi) {
            return hi;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < u {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-10 * hi.max(1.0) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Draw one sum gain: n_r independent per-antenna gains added up.
    pub fn sample(&self, stream: &mut Stream) -> f64 {
        (0..self.n_r).map(|_| self.model.sample_gain(stream)).sum()
    }

    fn build_table(&self) -> CdfTable {
        // Uniform seed panels, split until each panel's GK error is tiny.
        let mut stack: Vec<(f64, f64)> = Vec::new();
        let n0 = 256;
        for i in (0..n0).rev() {
            let a = self.upper_cutoff * i as f64 / n0 as f64;
            let b = self.upper_cutoff * (i + 1) as f64 / n0 as f64;
            stack.push((a, b));
        }
        let mut panels: Vec<(f64, f64, f64)> = Vec::new();
        while let Some((a, b)) = stack.pop() {
            let value = integrate(&|t| self.pdf(t), a, b, f64::INFINITY, 1).unwrap();
            let refined = integrate(&|t| self.pdf(t), a, b, 1e-15, 32).unwrap_or(value);
            if (refined - value).abs() > 1e-14 && b - a > 1e-9 * self.upper_cutoff {
                let mid = 0.5 * (a + b);
                stack.push((mid, b));
                stack.push((a, mid));
            } else {
                panels.push((a, b, refined));
            }
        }
        panels.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
        let mut edges = Vec::with_capacity(panels.len() + 1);
        let mut prefix = Vec::with_capacity(panels.len() + 1);
        edges.push(0.0);
        prefix.push(0.0);
        let mut acc = 0.0;
        for (_, b, v) in panels {
            acc += v;
            edges.push(b);
            prefix.push(acc);
        }
        CdfTable { edges, prefix }
    }
}

/// log of Itilde_nu(y) = sum_j y^j / (j! (nu+j)!) = y^(-nu/2) I_nu(2 sqrt(y)).
fn log_itilde(nu: u32, y: f64) -> f64 {
    debug_assert!(y >= 0.0);
    if y == 0.0 {
        return -ln_gamma(nu as f64 + 1.0);
    }
    let z = 2.0 * y.sqrt();
    if z < (nu as f64).max(25.0) {
        // Reduced series with t_0 = 1 keeps every term representable.
        let mut term = 1.0_f64;
        let mut sum = 1.0_f64;
        for j in 0..20_000u32 {
            let jf = j as f64;
            term *= y / ((jf + 1.0) * (nu as f64 + jf + 1.0));
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
        }
        sum.ln() - ln_gamma(nu as f64 + 1.0)
    } else {
        let scaled = bessel_i_scaled(nu, z, Accuracy::default())
            .expect("scaled Bessel is total on x >= 0");
        -(nu as f64) * 0.5 * y.ln() + z + scaled.ln()
    }
}

/// Truncation point with upper-tail mass below ~1e-15, from a Chernoff
/// bound at t = 1/(2 sigma_h^2), floored at mean + 12 sd.
fn upper_cutoff(model: FadingModel, n_r: u32) -> f64 {
    let n = n_r as f64;
    let (zeta, nu2) = antenna_moments(model);
    let moment_floor = n * zeta + 12.0 * (n * nu2).sqrt();
    let chernoff = match model {
        FadingModel::Rayleigh { omega } => 2.0 * omega * (n * std::f64::consts::LN_2 + 36.0),
        FadingModel::Rician { k, omega } => {
            let sigma2 = omega / (k + 1.0);
            2.0 * sigma2 * (n * (std::f64::consts::LN_2 + k) + 36.0)
        }
    };
    chernoff.max(moment_floor)
}

/// Pilot-based channel estimation setup for the imperfect-CSIR study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PilotModel {
    /// Number of pilot symbols.
    pub n_p: u32,
    /// Pilot power (linear, noise-normalized).
    pub p_pilot: f64,
}

impl PilotModel {
    pub fn validate(&self) -> Result<()> {
        if self.n_p < 1 {
            return Err(Error::domain("pilot count must be at least 1"));
        }
        if !(self.p_pilot > 0.0) {
            return Err(Error::domain("pilot power must be positive"));
        }
        Ok(())
    }
}

/// Draw a (true gain, estimated gain) pair under pilot-based MMSE channel
/// estimation. SISO Rayleigh only: h ~ CN(0, omega); the receiver observes
/// n_p unit-period pilot symbols at power p_pilot and forms the linear MMSE
/// estimate, whose error variance is omega / (1 + n_p p_pilot omega).
pub fn sample_joint_gain_estimate(
    model: FadingModel,
    pilot: PilotModel,
    stream: &mut Stream,
) -> Result<(f64, f64)> {
    let omega = match model {
        FadingModel::Rayleigh { omega } => omega,
        FadingModel::Rician { .. } => {
            return Err(Error::unsupported(
                "joint gain/estimate sampling supports Rayleigh fading only",
            ))
        }
    };
    pilot.validate()?;
    let (z1, z2) = stream.normal_pair();
    let (w1, w2) = stream.normal_pair();
    let sh = (0.5 * omega).sqrt();
    let h = (sh * z1, sh * z2);
    // Averaged pilot observation: y = sqrt(p) h + noise, noise ~ CN(0, 1/n_p).
    let sn = (0.5 / pilot.n_p as f64).sqrt();
    let sp = pilot.p_pilot.sqrt();
    let y = (sp * h.0 + sn * w1, sp * h.1 + sn * w2);
    let c = sp * omega / (pilot.p_pilot * omega + 1.0 / pilot.n_p as f64);
    let h_est = (c * y.0, c * y.1);
    Ok((h.0 * h.0 + h.1 * h.1, h_est.0 * h_est.0 + h_est.1 * h_est.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate_with_breakpoints;

    fn rician(k: f64, omega: f64, n_r: u32) -> SumGainDistribution {
        SumGainDistribution::new(FadingModel::Rician { k, omega }, n_r).unwrap()
    }

    fn rayleigh(omega: f64, n_r: u32) -> SumGainDistribution {
        SumGainDistribution::new(FadingModel::Rayleigh { omega }, n_r).unwrap()
    }

    #[test]
    fn rayleigh_siso_pdf_at_origin() {
        assert_eq!(rayleigh(1.0, 1).pdf(0.0), 1.0);
        assert_eq!(rayleigh(2.0, 1).pdf(0.0), 0.5);
        assert_eq!(rayleigh(1.0, 3).pdf(0.0), 0.0);
    }

    #[test]
    fn rician_small_k_matches_rayleigh_pdf() {
        for n_r in [1u32, 4, 12] {
            let ri = rician(1e-9, 1.0, n_r);
            let ra = rayleigh(1.0, n_r);
            for i in 1..40 {
                let x = 0.5 * i as f64;
                let (p, q) = (ri.pdf(x), ra.pdf(x));
                if q > 1e-280 {
                    assert!(
                        ((p - q) / q).abs() < 1e-6,
                        "n_r={n_r} x={x}: rician {p} vs rayleigh {q}"
                    );
                }
            }
        }
    }

    #[test]
    fn pdf_integrates_to_one() {
        for (model, n_r) in [
            (FadingModel::Rician { k: 0.01, omega: 1.0 }, 12u32),
            (FadingModel::Rician { k: 0.01, omega: 1.0 }, 1),
            (FadingModel::Rician { k: 0.01, omega: 1.0 }, 2),
            (FadingModel::Rician { k: 0.01, omega: 1.0 }, 8),
            (FadingModel::Rician { k: 0.01, omega: 1.0 }, 32),
            (FadingModel::Rician { k: 0.5, omega: 2.0 }, 8),
            (FadingModel::Rayleigh { omega: 1.0 }, 1),
            (FadingModel::Rayleigh { omega: 0.7 }, 2),
            (FadingModel::Rayleigh { omega: 1.0 }, 8),
            (FadingModel::Rayleigh { omega: 3.0 }, 32),
        ] {
            let d = SumGainDistribution::new(model, n_r).unwrap();
            let total =
                integrate(&|x| d.pdf(x), 0.0, d.upper_cutoff(), 1e-11, 4000).unwrap();
            assert!(
                (total - 1.0).abs() < 1e-8,
                "{model:?} n_r={n_r}: integral {total}"
            );
        }
    }

    #[test]
    fn rayleigh_cdf_closed_form() {
        let d = rayleigh(1.0, 1);
        assert!((d.cdf(1.0) - (1.0 - (-1.0f64).exp())).abs() < 1e-13);
        assert_eq!(d.cdf(0.0), 0.0);
    }

    #[test]
    fn rayleigh_cdf_matches_printed_finite_sum() {
        // F(x) = 1 - e^{-x/omega} sum_{i=1}^{N_r} x^{i-1} / (omega^{i-1} (i-1)!).
        let finite_sum = |omega: f64, n_r: u32, x: f64| {
            let mut term = 1.0;
            let mut sum = 1.0;
            for i in 1..n_r {
                term *= x / omega / i as f64;
                sum += term;
            }
            1.0 - (-x / omega).exp() * sum
        };
        for (omega, n_r) in [(1.0, 1u32), (1.0, 3), (2.0, 5), (0.5, 12)] {
            let d = rayleigh(omega, n_r);
            for i in 1..30 {
                let x = 0.4 * i as f64;
                let got = d.cdf(x);
                let want = finite_sum(omega, n_r, x);
                assert!(
                    (got - want).abs() < 1e-12,
                    "omega={omega} n_r={n_r} x={x}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn cdf_zero_at_origin_and_nondecreasing() {
        for d in [rician(0.01, 1.0, 12), rician(0.5, 1.0, 3), rayleigh(1.0, 4)] {
            assert_eq!(d.cdf(0.0), 0.0);
            let mut prev = 0.0;
            for i in 0..100 {
                let x = d.upper_cutoff() * i as f64 / 100.0;
                let c = d.cdf(x);
                assert!(c >= prev - 1e-12);
                assert!((0.0..=1.0).contains(&c));
                prev = c;
            }
        }
    }

    #[test]
    fn rician_quantile_round_trip() {
        let d = rician(0.01, 1.0, 12);
        let x = d.quantile(0.5);
        assert!((d.cdf(x) - 0.5).abs() < 1e-8);
        for &u in &[0.01, 0.2, 0.9, 0.999] {
            assert!((d.cdf(d.quantile(u)) - u).abs() < 1e-8, "u={u}");
        }
    }

    #[test]
    fn rician_cdf_against_direct_quadrature() {
        let d = rician(0.3, 1.5, 5);
        for &x in &[0.5, 2.0, 7.0, 12.0] {
            let direct = integrate(&|t| d.pdf(t), 0.0, x, 1e-12, 2000).unwrap();
            assert!(
                (d.cdf(x) - direct).abs() < 1e-9,
                "x={x}: {} vs {direct}",
                d.cdf(x)
            );
        }
    }

    #[test]
    fn moments_match_quadrature_oracle() {
        // The hypergeometric moment expression carries an e^-k factor; with it the
        // per-antenna mean is omega exactly. Validate against direct moment
        // integrals of the per-antenna pdf.
        for &(k, omega) in &[(0.01, 1.0), (0.5, 1.0), (2.0, 0.8)] {
            let model = FadingModel::Rician { k, omega };
            let d = SumGainDistribution::new(model, 1).unwrap();
            let hi = d.upper_cutoff();
            let m1 = integrate(&|x| x * d.pdf(x), 0.0, hi, 1e-11, 4000).unwrap();
            let m2 = integrate(&|x| x * x * d.pdf(x), 0.0, hi, 1e-11, 4000).unwrap();
            let (zeta, nu2) = antenna_moments(model);
            assert!((zeta - m1).abs() < 1e-8, "k={k}: zeta {zeta} vs {m1}");
            assert!(
                (nu2 - (m2 - m1 * m1)).abs() < 1e-7,
                "k={k}: nu2 {nu2} vs {}",
                m2 - m1 * m1
            );
            // Closed forms implied by the corrected S(n).
            assert!((zeta - omega).abs() < 1e-12);
            let nu2_closed = omega * omega * (1.0 + 2.0 * k) / (1.0 + k).powi(2);
            assert!((nu2 - nu2_closed).abs() < 1e-12);
        }
    }

    #[test]
    fn clt_params_trivial_and_derived() {
        let g = clt_params(FadingModel::Rician { k: 0.0, omega: 1.0 }, 1);
        assert!((g.mean - 1.0).abs() < 1e-12);
        assert!((g.variance - 1.0).abs() < 1e-12);
        let g = clt_params(FadingModel::Rician { k: 0.5, omega: 1.0 }, 1);
        assert!((g.mean - 1.0).abs() < 1e-12);
        assert!((g.variance - 8.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_params_rayleigh_exact() {
        let g = gamma_params(FadingModel::Rayleigh { omega: 2.0 }, 3);
        assert_eq!(g.rate, 0.5);
        assert_eq!(g.shape, 3.0);
        // Rician k = 0 must coincide with the Rayleigh branch.
        let g0 = gamma_params(FadingModel::Rician { k: 0.0, omega: 2.0 }, 3);
        assert!((g0.rate - 0.5).abs() < 1e-12);
        assert!((g0.shape - 3.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_approx_is_exact_for_rayleigh() {
        let d = rayleigh(1.3, 6);
        let g = gamma_params(d.model(), 6);
        for i in 1..40 {
            let x = 0.5 * i as f64;
            let (a, b) = (g.cdf(x), d.cdf(x));
            assert!((a - b).abs() < 1e-12 * b.max(1e-3), "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn gamma_approx_ks_distance_small() {
        // Moment-matched shape N_r zeta^2/nu^2 vs the empirical CDF of 1e6
        // draws; this is the Monte Carlo arbiter between the two printed
        // shape-parameter candidates.
        let model = FadingModel::Rician { k: 0.5, omega: 1.0 };
        let d = SumGainDistribution::new(model, 8).unwrap();
        let g = gamma_params(model, 8);
        let n = 1_000_000usize;
        let mut samples: Vec<f64> = Vec::with_capacity(n);
        let mut stream = Stream::new(2024, 0);
        for _ in 0..n {
            samples.push(d.sample(&mut stream));
        }
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut ks = 0.0f64;
        for (i, &x) in samples.iter().enumerate().step_by(97) {
            let emp = (i + 1) as f64 / n as f64;
            ks = ks.max((g.cdf(x) - emp).abs());
        }
        assert!(ks < 0.01, "KS distance {ks}");
        // The paper's printed shape N_r^2 zeta / nu^2 fits far worse.
        let (zeta, nu2) = antenna_moments(model);
        let printed = GammaApprox {
            rate: zeta / nu2,
            shape: 64.0 * zeta / nu2,
        };
        let mut ks_printed = 0.0f64;
        for (i, &x) in samples.iter().enumerate().step_by(97) {
            let emp = (i + 1) as f64 / n as f64;
            ks_printed = ks_printed.max((printed.cdf(x) - emp).abs());
        }
        assert!(ks_printed > 10.0 * ks, "moment matching must win: {ks_printed} vs {ks}");
    }

    #[test]
    fn clt_quality_improves_with_antennas() {
        let model = FadingModel::Rician { k: 0.01, omega: 1.0 };
        let mut prev = f64::INFINITY;
        for n_r in [4u32, 16, 64, 256] {
            let d = SumGainDistribution::new(model, n_r).unwrap();
            let g = clt_params(model, n_r);
            let mut sup = 0.0f64;
            for i in 0..=400 {
                let x = d.upper_cutoff() * i as f64 / 400.0;
                sup = sup.max((g.cdf(x) - d.cdf(x)).abs());
            }
            assert!(sup <= prev + 1e-12, "n_r={n_r}: sup {sup} > prev {prev}");
            prev = sup;
        }
    }

    #[test]
    fn sampling_mean_and_determinism() {
        let d = rayleigh(1.0, 4);
        let n = 1_000_000;
        let mut stream = Stream::new(77, 0);
        let mean: f64 = (0..n).map(|_| d.sample(&mut stream)).sum::<f64>() / n as f64;
        assert!((mean - 4.0).abs() < 0.01, "mean {mean}");

        let mut s1 = Stream::new(5, 9);
        let mut s2 = Stream::new(5, 9);
        for _ in 0..100 {
            assert_eq!(d.sample(&mut s1), d.sample(&mut s2));
        }
    }

    #[test]
    fn empirical_cdf_matches_quadrature_cdf() {
        let d = rician(0.01, 1.0, 12);
        let n = 1_000_000usize;
        let mut samples: Vec<f64> = Vec::with_capacity(n);
        let mut stream = Stream::new(31337, 0);
        for _ in 0..n {
            samples.push(d.sample(&mut stream));
        }
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut ks = 0.0f64;
        for (i, &x) in samples.iter().enumerate().step_by(53) {
            let emp = (i + 1) as f64 / n as f64;
            ks = ks.max((d.cdf(x) - emp).abs());
        }
        assert!(ks < 0.002, "KS distance {ks}");
    }

    #[test]
    fn rician_to_rayleigh_continuity_everywhere() {
        let ri = rician(1e-9, 1.0, 8);
        let ra = rayleigh(1.0, 8);
        for i in 1..=20 {
            let x = i as f64;
            let (a, b) = (ri.cdf(x), ra.cdf(x));
            if b > 1e-12 {
                assert!(((a - b) / b).abs() < 1e-6, "x={x}");
            }
        }
        let (zeta, nu2) = antenna_moments(FadingModel::Rician { k: 1e-9, omega: 1.0 });
        assert!((zeta - 1.0).abs() < 1e-6);
        assert!((nu2 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn joint_estimate_mmse_mean() {
        let pilot = PilotModel { n_p: 1, p_pilot: 1.0 };
        let model = FadingModel::Rayleigh { omega: 1.0 };
        let n = 1_000_000;
        let mut stream = Stream::new(888, 0);
        let mut sum_est = 0.0;
        for _ in 0..n {
            let (_, g_est) = sample_joint_gain_estimate(model, pilot, &mut stream).unwrap();
            sum_est += g_est;
        }
        // E[G_est] = omega * n_p p omega / (1 + n_p p omega) = 1/2 here.
        assert!((sum_est / n as f64 - 0.5).abs() < 0.01);
    }

    #[test]
    fn joint_estimate_perfect_csir_limit() {
        let pilot = PilotModel { n_p: 1_000_000, p_pilot: 1.0 };
        let model = FadingModel::Rayleigh { omega: 1.0 };
        let n = 20_000;
        let mut stream = Stream::new(4242, 0);
        let (mut sg, mut se, mut sge, mut sg2, mut se2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for _ in 0..n {
            let (g, e) = sample_joint_gain_estimate(model, pilot, &mut stream).unwrap();
            sg += g;
            se += e;
            sge += g * e;
            sg2 += g * g;
            se2 += e * e;
        }
        let nf = n as f64;
        let cov = sge / nf - sg / nf * (se / nf);
        let vg = sg2 / nf - (sg / nf).powi(2);
        let ve = se2 / nf - (se / nf).powi(2);
        let corr = cov / (vg * ve).sqrt();
        assert!(corr > 0.999, "corr {corr}");
    }

    #[test]
    fn joint_estimate_rejects_unsupported() {
        let pilot = PilotModel { n_p: 4, p_pilot: 1.0 };
        let mut stream = Stream::new(1, 0);
        assert!(sample_joint_gain_estimate(
            FadingModel::Rician { k: 0.5, omega: 1.0 },
            pilot,
            &mut stream
        )
        .is_err());
    }

    #[test]
    fn joint_estimate_deterministic() {
        let pilot = PilotModel { n_p: 4, p_pilot: 1.0 };
        let model = FadingModel::Rayleigh { omega: 1.0 };
        let mut s1 = Stream::new(10, 2);
        let mut s2 = Stream::new(10, 2);
        for _ in 0..50 {
            assert_eq!(
                sample_joint_gain_estimate(model, pilot, &mut s1).unwrap(),
                sample_joint_gain_estimate(model, pilot, &mut s2).unwrap()
            );
        }
    }

    #[test]
    fn breakpoint_quadrature_smoke() {
        // Exercises the shared quadrature path the analysis module relies on.
        let d = rician(0.01, 1.0, 3);
        let v = integrate_with_breakpoints(&|x| d.pdf(x), 0.0, 6.0, &[1.0, 2.5], 1e-12, 2000)
            .unwrap();
        assert!((v - d.cdf(6.0)).abs() < 1e-9);
    }
}
