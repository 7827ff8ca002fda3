//! Quantization-boundary optimization.
//!
//! The error probability does not depend on the boundaries, so the
//! error-constrained delay minimization decouples: first solve for the
//! consumed power meeting the error target, then minimize the expected
//! delay over the boundaries at that power. Boundaries are parameterized
//! by CDF quantile levels u^1 >= ... >= u^(M-1), which makes the ordering
//! constraint a sort and concentrates search points where the gain
//! distribution has mass. The all-zero (standard HARQ) tuple is always in
//! the search set, so the optimizer can never do worse than standard HARQ.
//!
//! Maximizing throughput at fixed power is the same search: with the error
//! probability fixed, K (1 - error) / delay is maximal exactly where the
//! delay is minimal.

use crate::analysis::{expected_delay, link_metrics, Boundaries, LinkSpec};
use crate::fbl::round_error_prob;
use crate::power::{output_power, solve_p_cons_for_beta};
use crate::quad::integrate_with_breakpoints;
use crate::rng::Stream;
use crate::{Error, Result};
use rayon::prelude::*;

/// What the boundary search minimizes or maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// Minimize expected delay (channel uses).
    Delay,
    /// Maximize throughput (npcu). Same argmin as Delay at fixed power.
    Throughput,
}

/// Search configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeSpec {
    pub objective: Objective,
    /// Quantile levels per boundary in the exhaustive grid.
    pub grid_points: u32,
    pub queen_population: u32,
    pub queen_iterations: u32,
    /// Standard deviation of the quantile perturbation around the queen.
    pub queen_mutation_scale: f64,
    pub seed: u64,
}

impl Default for OptimizeSpec {
    fn default() -> Self {
        OptimizeSpec {
            objective: Objective::Delay,
            grid_points: 33,
            queen_population: 20,
            queen_iterations: 200,
            queen_mutation_scale: 0.05,
            seed: 0,
        }
    }
}

impl OptimizeSpec {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points < 2 {
            return Err(Error::domain("grid_points must be at least 2"));
        }
        if self.queen_population < 4 {
            return Err(Error::domain("queen_population must be at least 4"));
        }
        if !(self.queen_mutation_scale > 0.0 && self.queen_mutation_scale < 1.0) {
            return Err(Error::domain("queen_mutation_scale must be in (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exhaustive,
    Queen,
}

/// Optimization outcome. `objective_value` is a fresh evaluation of the
/// analysis metric at the returned boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimResult {
    pub boundaries: Boundaries,
    pub objective_value: f64,
    pub method: Method,
    pub evaluations: u64,
}

/// Exhaustive search over ordered quantile tuples on a uniform level grid
/// (levels j/(g-1), including 0 = standard and 1 = everything silent until
/// the last round). Ties break toward smaller boundaries.
pub fn exhaustive_search(link: &LinkSpec, p_cons: f64, opt: &OptimizeSpec) -> Result<OptimResult> {
    opt.validate()?;
    let m_max = link.harq.m_max;
    if m_max == 1 {
        return finish(link, p_cons, Boundaries::standard(1), Method::Exhaustive, 1, opt);
    }
    let n_bounds = (m_max - 1) as usize;
    let cache = GridCache::build(link, p_cons, opt.grid_points)?;

    let mut idx = vec![0usize; n_bounds];
    let mut best_idx = idx.clone();
    let mut best = cache.delay_at(link, &idx);
    let mut evaluations = 1u64;
    while advance(&mut idx, opt.grid_points as usize) {
        let value = cache.delay_at(link, &idx);
        evaluations += 1;
        if value < best {
            best = value;
            best_idx.copy_from_slice(&idx);
        }
    }
    let interior: Vec<f64> = best_idx.iter().map(|&j| cache.gains[j]).collect();
    finish(
        link,
        p_cons,
        Boundaries::new(interior)?,
        Method::Exhaustive,
        evaluations,
        opt,
    )
}

/// Next nonincreasing index tuple in lexicographic order; false when done.
fn advance(idx: &mut [usize], grid: usize) -> bool {
    for k in (0..idx.len()).rev() {
        let cap = if k == 0 { grid - 1 } else { idx[k - 1] };
        if idx[k] < cap {
            idx[k] += 1;
            idx[k + 1..].fill(0);
            return true;
        }
    }
    false
}

/// Per-level prefix integrals so each tuple evaluation is pure arithmetic.
struct GridCache {
    gains: Vec<f64>,
    cdfs: Vec<f64>,
    /// ycum[n-1][j] = integral of f_G Q_n over [0, gains[j]].
    ycum: Vec<Vec<f64>>,
    /// ytot[n-1] = the same over the whole gain range.
    ytot: Vec<f64>,
}

impl GridCache {
    fn build(link: &LinkSpec, p_cons: f64, grid_points: u32) -> Result<Self> {
        let g = grid_points as usize;
        let m_max = link.harq.m_max;
        let p = link.radiated(p_cons);
        let levels: Vec<f64> = (0..g).map(|j| j as f64 / (g - 1) as f64).collect();
        let gains: Vec<f64> = levels.iter().map(|&u| link.dist.quantile(u)).collect();
        let cdfs: Vec<f64> = gains.iter().map(|&x| link.dist.cdf(x)).collect();
        let cutoff = link.dist.upper_cutoff();
        let mut ycum = Vec::with_capacity((m_max - 1) as usize);
        let mut ytot = Vec::with_capacity((m_max - 1) as usize);
        for n in 1..m_max {
            let f = |x: f64| link.dist.pdf(x) * round_error_prob(x, n, &link.harq.code, p);
            let cuts = crate::analysis::q_transition_breakpoints(n, &link.harq.code, p);
            let mut prefix = vec![0.0f64; g];
            for j in 1..g {
                let seg =
                    integrate_with_breakpoints(&f, gains[j - 1], gains[j], &cuts, 1e-11, 2000)?;
                prefix[j] = prefix[j - 1] + seg;
            }
            let tail = if gains[g - 1] < cutoff {
                integrate_with_breakpoints(&f, gains[g - 1], cutoff, &cuts, 1e-11, 2000)?
            } else {
                0.0
            };
            ytot.push(prefix[g - 1] + tail);
            ycum.push(prefix);
        }
        Ok(GridCache {
            gains,
            cdfs,
            ycum,
            ytot,
        })
    }

    /// Expected delay for the boundary levels `idx` (region-m upper edge at
    /// idx[m-2], lower edge at idx[m-1]).
    fn delay_at(&self, link: &LinkSpec, idx: &[usize]) -> f64 {
        let cfg = &link.harq;
        let m_max = cfg.m_max;
        let l = cfg.sub_len();
        let d = cfg.feedback_delay;
        let up_f = |m: u32| {
            if m == 1 {
                1.0
            } else {
                self.cdfs[idx[(m - 2) as usize]]
            }
        };
        let lo_f = |m: u32| {
            if m == m_max {
                0.0
            } else {
                self.cdfs[idx[(m - 1) as usize]]
            }
        };
        let theta = |m: u32, n: u32| {
            let hi = if m == 1 {
                self.ytot[(n - 1) as usize]
            } else {
                self.ycum[(n - 1) as usize][idx[(m - 2) as usize]]
            };
            let lo = if m == m_max {
                0.0
            } else {
                self.ycum[(n - 1) as usize][idx[(m - 1) as usize]]
            };
            hi - lo
        };
        let mut tau = 0.0;
        for m in 1..=m_max {
            let pr = up_f(m) - lo_f(m);
            tau += pr * (m as f64 * l + cfg.decode_delay_at(m));
            if m < m_max {
                tau += d * pr;
                for i in (m + 1)..=m_max {
                    let th = theta(m, i - 1);
                    tau += (l + cfg.decode_delay_at(i)) * th;
                    if i < m_max {
                        tau += d * th;
                    }
                }
            }
        }
        tau
    }
}

/// Population-based iterative search: keep the best tuple (the queen),
/// perturb its quantiles, refresh a quarter of the population at random
/// each generation to escape local minima. Deterministic for a given seed.
pub fn queen_search(link: &LinkSpec, p_cons: f64, opt: &OptimizeSpec) -> Result<OptimResult> {
    opt.validate()?;
    let m_max = link.harq.m_max;
    if m_max == 1 {
        return finish(link, p_cons, Boundaries::standard(1), Method::Queen, 1, opt);
    }
    let n_bounds = (m_max - 1) as usize;
    let pop = opt.queen_population as usize;
    let mut rng = Stream::new(opt.seed, 0x5eed);

    let evaluate = |levels: &[f64]| -> Result<f64> {
        let b = Boundaries::from_quantiles(&link.dist, levels)?;
        expected_delay(link, &b, p_cons)
    };

    // Standard HARQ is seeded into the initial population by construction.
    let mut population: Vec<Vec<f64>> = vec![vec![0.0; n_bounds]];
    for _ in 1..pop {
        population.push(random_tuple(&mut rng, n_bounds));
    }
    let mut evaluations = 0u64;
    let mut queen: Vec<f64> = population[0].clone();
    let mut queen_value = f64::INFINITY;
    for _ in 0..=opt.queen_iterations {
        let scored: Vec<(f64, &Vec<f64>)> = population
            .par_iter()
            .map(|cand| (evaluate(cand).unwrap_or(f64::INFINITY), cand))
            .collect();
        evaluations += population.len() as u64;
        for (value, cand) in &scored {
            if *value < queen_value {
                queen_value = *value;
                queen = (*cand).clone();
            }
        }
        // Next generation: queen + mutations + random refresh (25%).
        let refresh = pop / 4;
        let mut next = Vec::with_capacity(pop);
        next.push(queen.clone());
        while next.len() < pop - refresh {
            let mut cand = queen.clone();
            for v in cand.iter_mut() {
                let (z, _) = rng.normal_pair();
                *v = (*v + opt.queen_mutation_scale * z).clamp(0.0, 1.0);
            }
            cand.sort_by(|a, b| b.partial_cmp(a).unwrap());
            next.push(cand);
        }
        while next.len() < pop {
            next.push(random_tuple(&mut rng, n_bounds));
        }
        population = next;
    }
    let b = Boundaries::from_quantiles(&link.dist, &queen)?;
    finish(link, p_cons, b, Method::Queen, evaluations, opt)
}

fn random_tuple(rng: &mut Stream, n: usize) -> Vec<f64> {
    let mut t: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
    t.sort_by(|a, b| b.partial_cmp(a).unwrap());
    t
}

fn finish(
    link: &LinkSpec,
    p_cons: f64,
    boundaries: Boundaries,
    method: Method,
    evaluations: u64,
    opt: &OptimizeSpec,
) -> Result<OptimResult> {
    let objective_value = match opt.objective {
        Objective::Delay => expected_delay(link, &boundaries, p_cons)?,
        Objective::Throughput => link_metrics(link, &boundaries, p_cons)?.throughput,
    };
    Ok(OptimResult {
        boundaries,
        objective_value,
        method,
        evaluations,
    })
}

/// Two-stage error-limited delay minimization: find the consumed power
/// meeting the error target (boundary-independent), check the PA output
/// limit, then optimize the boundaries at that power.
pub fn solve_constrained(
    link: &LinkSpec,
    beta: f64,
    opt: &OptimizeSpec,
) -> Result<(f64, OptimResult)> {
    let p_cons = solve_p_cons_for_beta(|p| crate::analysis::error_prob(link, p), beta)?;
    let radiated = output_power(&link.pa, p_cons);
    if radiated > link.pa.p_max {
        return Err(Error::Infeasible {
            required_output: radiated,
            p_max: link.pa.p_max,
        });
    }
    let result = if link.harq.m_max <= 5 {
        exhaustive_search(link, p_cons, opt)?
    } else {
        queen_search(link, p_cons, opt)?
    };
    Ok((p_cons, result))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{relative_gain, low_snr_gain_limit, DecodeDelay, HarqConfig};
    use crate::channel::{FadingModel, SumGainDistribution};
    use crate::fbl::CodeSpec;
    use crate::power::PaConfig;

    fn link(model: FadingModel, n_r: u32, m_max: u32, k: f64, l: u32, d: f64, c: f64) -> LinkSpec {
        let dist = SumGainDistribution::new(model, n_r).unwrap();
        LinkSpec::new(
            dist,
            PaConfig::ideal(),
            HarqConfig {
                m_max,
                code: CodeSpec {
                    info_nats: k,
                    sub_len: l,
                    third_order: false,
                },
                feedback_delay: d,
                decode_delay: DecodeDelay::Linear { coeff: c },
            },
        )
        .unwrap()
    }

    fn rician3(m_max: u32) -> LinkSpec {
        link(
            FadingModel::Rician { k: 0.01, omega: 1.0 },
            3,
            m_max,
            1000.0,
            1000,
            40.0,
            3.0,
        )
    }

    fn db(x: f64) -> f64 {
        10f64.powf(x / 10.0)
    }

    #[test]
    fn single_round_nothing_to_optimize() {
        let link = rician3(1);
        let opt = OptimizeSpec::default();
        let r = exhaustive_search(&link, 1.0, &opt).unwrap();
        assert!(r.boundaries.interior().is_empty());
        assert!((r.objective_value - (1000.0 + 3000.0)).abs() < 1e-9);
    }

    #[test]
    fn exhaustive_never_worse_than_standard() {
        let link = rician3(2);
        let opt = OptimizeSpec {
            grid_points: 64,
            ..OptimizeSpec::default()
        };
        for snr_db in [-20.0, -6.0, 0.0, 6.0] {
            let p = db(snr_db);
            let r = exhaustive_search(&link, p, &opt).unwrap();
            let std = expected_delay(&link, &Boundaries::standard(2), p).unwrap();
            assert!(
                r.objective_value <= std + 1e-6,
                "snr {snr_db}: {} vs standard {std}",
                r.objective_value
            );
        }
    }

    #[test]
    fn low_snr_gain_matches_limit() {
        let link = rician3(3);
        let p = db(-30.0);
        let opt = OptimizeSpec {
            grid_points: 33,
            ..OptimizeSpec::default()
        };
        let r = exhaustive_search(&link, p, &opt).unwrap();
        let std = expected_delay(&link, &Boundaries::standard(3), p).unwrap();
        let gain = relative_gain(std, r.objective_value);
        let want = low_snr_gain_limit(3, 3.0);
        assert!(
            (gain - want).abs() < 0.01,
            "gain {gain} vs limit {want}"
        );
    }

    #[test]
    fn low_snr_gain_holds_for_gentler_decoding_profile() {
        // Same limit check at c = 0.5, both fading models.
        let p = db(-30.0);
        let opt = OptimizeSpec {
            grid_points: 17,
            ..OptimizeSpec::default()
        };
        for model in [
            FadingModel::Rician { k: 0.01, omega: 1.0 },
            FadingModel::Rayleigh { omega: 1.0 },
        ] {
            for m in [2u32, 4] {
                let link = link(model, 3, m, 1000.0, 1000, 40.0, 0.5);
                let r = exhaustive_search(&link, p, &opt).unwrap();
                let std = expected_delay(&link, &Boundaries::standard(m), p).unwrap();
                let gain = relative_gain(std, r.objective_value);
                let want = low_snr_gain_limit(m, 0.5);
                assert!(
                    (gain - want).abs() < 0.01,
                    "{model:?} M={m}: gain {gain} vs {want}"
                );
            }
        }
    }

    #[test]
    fn exhaustive_is_grid_optimal() {
        let link = rician3(2);
        let p = db(-4.0);
        let opt = OptimizeSpec {
            grid_points: 17,
            ..OptimizeSpec::default()
        };
        let r = exhaustive_search(&link, p, &opt).unwrap();
        assert_eq!(r.evaluations, 17);
        let mut rng = Stream::new(3, 0);
        for _ in 0..1000 {
            let j = (rng.next_u64() % 17) as f64 / 16.0;
            let b = Boundaries::from_quantiles(&link.dist, &[j]).unwrap();
            let v = expected_delay(&link, &b, p).unwrap();
            assert!(v >= r.objective_value - 1e-6, "level {j}: {v}");
        }
    }

    #[test]
    fn queen_matches_exhaustive_and_is_deterministic() {
        let link = rician3(2);
        let p = db(-8.0);
        let opt = OptimizeSpec {
            grid_points: 64,
            queen_iterations: 60,
            ..OptimizeSpec::default()
        };
        let ex = exhaustive_search(&link, p, &opt).unwrap();
        let q1 = queen_search(&link, p, &opt).unwrap();
        let q2 = queen_search(&link, p, &opt).unwrap();
        assert_eq!(q1, q2);
        let std = expected_delay(&link, &Boundaries::standard(2), p).unwrap();
        assert!(q1.objective_value <= std + 1e-6);
        let rel = (q1.objective_value - ex.objective_value).abs() / ex.objective_value;
        assert!(rel < 0.005, "queen {} vs exhaustive {}", q1.objective_value, ex.objective_value);
    }

    #[test]
    fn constrained_power_round_trip() {
        let link = link(
            FadingModel::Rician { k: 0.01, omega: 1.0 },
            3,
            2,
            500.0,
            1000,
            40.0,
            0.5,
        );
        let p_ref = 0.4;
        let beta = crate::analysis::error_prob(&link, p_ref).unwrap();
        let opt = OptimizeSpec {
            grid_points: 17,
            ..OptimizeSpec::default()
        };
        let (p_cons, result) = solve_constrained(&link, beta, &opt).unwrap();
        assert!((p_cons - p_ref).abs() < 1e-4 * p_ref, "p_cons {p_cons}");
        assert_eq!(result.method, Method::Exhaustive);
    }

    #[test]
    fn delay_and_throughput_objectives_agree_on_argmin() {
        let link = rician3(2);
        let p = db(-6.0);
        let base = OptimizeSpec {
            grid_points: 33,
            ..OptimizeSpec::default()
        };
        let by_delay = exhaustive_search(&link, p, &base).unwrap();
        let by_thr = exhaustive_search(
            &link,
            p,
            &OptimizeSpec {
                objective: Objective::Throughput,
                ..base
            },
        )
        .unwrap();
        assert_eq!(by_delay.boundaries, by_thr.boundaries);
    }

    #[test]
    fn infeasible_beta_is_reported() {
        let mut link = link(
            FadingModel::Rician { k: 0.01, omega: 1.0 },
            3,
            2,
            500.0,
            1000,
            40.0,
            0.5,
        );
        link.pa = PaConfig {
            epsilon: 1.0,
            theta: 0.0,
            p_max: 1e-4,
        };
        let opt = OptimizeSpec::default();
        match solve_constrained(&link, 1e-9, &opt) {
            Err(Error::Infeasible { .. }) => {}
            other => panic!("expected Infeasible, got {other:?}"),
        }
    }
}
