//! Canned parameter bundles reproducing the numerical studies: each
//! `figN` writes the data table(s) behind that figure family. Boundaries
//! follow the study setup: uniform quantization for the tightness studies
//! (fig4-fig8), delay-optimized elsewhere, explicit for fig16.

use super::approx_error;
use super::table::{Cell, Table};
use crate::analysis::{
    self, asymptotic_error_clt, asymptotic_metrics, Boundaries, DecodeDelay, HarqConfig, LinkSpec,
};
use crate::channel::{FadingModel, PilotModel, SumGainDistribution};
use crate::fbl::CodeSpec;
use crate::montecarlo;
use crate::optimize::{exhaustive_search, OptimizeSpec};
use crate::power::PaConfig;
use crate::{Error, Result};

const RICIAN: FadingModel = FadingModel::Rician { k: 0.01, omega: 1.0 };
const RAYLEIGH: FadingModel = FadingModel::Rayleigh { omega: 1.0 };

/// The non-ideal PA used in the hardware-effect studies.
fn lossy_pa() -> PaConfig {
    PaConfig {
        epsilon: 0.75,
        theta: 0.5,
        p_max: 10f64.powf(4.8),
    }
}

fn harq(m_max: u32, k: f64, l: u32, d: f64, c: f64) -> HarqConfig {
    HarqConfig {
        m_max,
        code: CodeSpec {
            info_nats: k,
            sub_len: l,
            third_order: false,
        },
        feedback_delay: d,
        decode_delay: DecodeDelay::Linear { coeff: c },
    }
}

fn link(model: FadingModel, n_r: u32, pa: PaConfig, cfg: HarqConfig) -> Result<LinkSpec> {
    LinkSpec::new(SumGainDistribution::new(model, n_r)?, pa, cfg)
}

fn db(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

fn snr_range(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let mut v = Vec::new();
    let mut x = lo;
    while x <= hi + 1e-9 {
        v.push(x);
        x += step;
    }
    v
}

fn opt_spec(grid: u32) -> OptimizeSpec {
    OptimizeSpec {
        grid_points: grid,
        ..OptimizeSpec::default()
    }
}

pub fn figure_names() -> &'static [&'static str] {
    &[
        "fig3", "fig4a", "fig4b", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11",
        "fig12", "fig13", "fig14", "fig15", "fig16",
    ]
}

/// Build the table bundle for a named figure.
pub fn cmd_figure(name: &str) -> Result<Vec<Table>> {
    match name {
        "fig3" => fig3(),
        "fig4a" => fig4(RICIAN, "fig4a"),
        "fig4b" => fig4(RAYLEIGH, "fig4b"),
        "fig5" => fig5(),
        "fig6" => fig6(),
        "fig7" => fig7(),
        "fig8" => fig8(),
        "fig9" => fig9(),
        "fig10" => fig10(),
        "fig11" => fig11(),
        "fig12" => fig12(),
        "fig13" => fig13(),
        "fig14" => fig14(),
        "fig15" => fig15(),
        "fig16" => fig16(),
        other => Err(Error::domain(format!(
            "unknown figure \"{other}\"; available: {:?}",
            figure_names()
        ))),
    }
}

/// Error-probability approximation tightness. Rician, ideal PA, L=1000,
/// K=500, N_r=50, M=1,2, with and without the third-order rate term.
fn fig3() -> Result<Vec<Table>> {
    let mut t = Table::new(
        "fig3_error_tightness",
        &[
            "m_max",
            "snr_db",
            "error_exact",
            "error_exact_third_order",
            "error_clt",
            "error_gamma",
            "error_linearized",
        ],
    );
    for m in [1u32, 2] {
        let base = link(RICIAN, 50, PaConfig::ideal(), harq(m, 500.0, 1000, 40.0, 0.5))?;
        let mut third = base.clone();
        third.harq.code.third_order = true;
        for snr in snr_range(-26.0, -12.0, 1.0) {
            let p_cons = db(snr);
            t.push_row(vec![
                Cell::from(m as u64),
                Cell::from(snr),
                Cell::from(analysis::error_prob(&base, p_cons)?),
                Cell::from(analysis::error_prob(&third, p_cons)?),
                Cell::from(approx_error(&base, p_cons, "clt")?),
                Cell::from(approx_error(&base, p_cons, "gamma")?),
                Cell::from(approx_error(&base, p_cons, "linearized")?),
            ]);
        }
    }
    Ok(vec![t])
}

/// Expected delay vs maximum transmissions, uniform quantization,
/// L=1000, K=500, N_r=12, D=40, SNR 0 dB, c=0.5.
fn fig4(model: FadingModel, name: &str) -> Result<Vec<Table>> {
    let rayleigh = matches!(model, FadingModel::Rayleigh { .. });
    let mut t = Table::new(
        name,
        &[
            "m_max",
            "delay_exact_cu",
            "delay_linearized_gaussian_cu",
            "delay_linearized_rayleigh_cu",
        ],
    );
    for m in 1..=6u32 {
        let link = link(model, 12, PaConfig::ideal(), harq(m, 500.0, 1000, 40.0, 0.5))?;
        let b = Boundaries::uniform_quantile(&link.dist, m);
        let p_cons = 1.0;
        t.push_row(vec![
            Cell::from(m as u64),
            Cell::from(analysis::expected_delay(&link, &b, p_cons)?),
            Cell::from(analysis::expected_delay_linearized_gaussian(&link, &b, p_cons)?),
            if rayleigh {
                Cell::from(analysis::expected_delay_linearized_rayleigh(&link, &b, p_cons)?)
            } else {
                Cell::Empty
            },
        ]);
    }
    Ok(vec![t])
}

/// Expected delay vs antenna count, Rayleigh, L=500/1000, K=500, D=40,
/// SNR 4 dB, M=3, c=0.5, uniform quantization.
fn fig5() -> Result<Vec<Table>> {
    let mut t = Table::new(
        "fig5_delay_vs_antennas",
        &[
            "sub_len_cu",
            "n_r",
            "delay_exact_cu",
            "delay_linearized_gaussian_cu",
            "delay_linearized_rayleigh_cu",
        ],
    );
    for l in [500u32, 1000] {
        for n_r in 1..=16u32 {
            let link = link(RAYLEIGH, n_r, PaConfig::ideal(), harq(3, 500.0, l, 40.0, 0.5))?;
            let b = Boundaries::uniform_quantile(&link.dist, 3);
            let p_cons = db(4.0);
            t.push_row(vec![
                Cell::from(l as u64),
                Cell::from(n_r as u64),
                Cell::from(analysis::expected_delay(&link, &b, p_cons)?),
                Cell::from(analysis::expected_delay_linearized_gaussian(&link, &b, p_cons)?),
                Cell::from(analysis::expected_delay_linearized_rayleigh(&link, &b, p_cons)?),
            ]);
        }
    }
    Ok(vec![t])
}

/// Long-codeword error probability vs SNR with the non-ideal PA,
/// R = 1 npcu, N_r = 40, M = 1, 2, plus the Gaussian approximation.
fn fig6() -> Result<Vec<Table>> {
    let mut t = Table::new(
        "fig6_asymptotic_error",
        &["m_max", "snr_db", "error_asymptotic", "error_clt_gaussian"],
    );
    // The quadratic consumed-to-radiated map of the lossy PA shifts the
    // interesting consumed-SNR region far above the ideal-PA one.
    for m in [1u32, 2] {
        let link = link(RICIAN, 40, lossy_pa(), harq(m, 1000.0, 1000, 40.0, 0.5))?;
        let b = Boundaries::uniform_quantile(&link.dist, m);
        for snr in snr_range(10.0, 26.0, 1.0) {
            let p_cons = db(snr);
            t.push_row(vec![
                Cell::from(m as u64),
                Cell::from(snr),
                Cell::from(asymptotic_metrics(&link, &b, p_cons)?.error_prob),
                Cell::from(asymptotic_error_clt(&link, p_cons)),
            ]);
        }
    }
    Ok(vec![t])
}

/// Long-codeword throughput vs code rate, N_r = 10, M = 2, SNR 2 dB, D = 0.
fn fig7() -> Result<Vec<Table>> {
    let mut t = Table::new(
        "fig7_throughput_vs_rate",
        &["rate_npcu", "throughput_npcu", "error_prob"],
    );
    let l = 1000u32;
    let mut r = 0.25;
    while r <= 4.0 + 1e-9 {
        let link = link(RICIAN, 10, PaConfig::ideal(), harq(2, r * l as f64, l, 0.0, 0.0))?;
        let b = Boundaries::uniform_quantile(&link.dist, 2);
        let m = asymptotic_metrics(&link, &b, db(2.0))?;
        t.push_row(vec![
            Cell::from(r),
            Cell::from(m.throughput),
            Cell::from(m.error_prob),
        ]);
        r += 0.25;
    }
    Ok(vec![t])
}

/// Throughput vs codeword length at R = 1 npcu, M = 2, D = 40, c = 0,
/// total SNR 5 dB over N_r = 10 antennas, with the long-codeword reference.
fn fig8() -> Result<Vec<Table>> {
    let mut t = Table::new(
        "fig8_throughput_vs_length",
        &["sub_len_cu", "throughput_npcu", "throughput_asymptotic_npcu"],
    );
    let p_cons = db(5.0) / 10.0;
    for l in [100u32, 200, 400, 800, 1600, 3200, 6400, 12800] {
        let link = link(RICIAN, 10, PaConfig::ideal(), harq(2, l as f64, l, 40.0, 0.0))?;
        let b = Boundaries::uniform_quantile(&link.dist, 2);
        let exact = analysis::link_metrics(&link, &b, p_cons)?;
        let asym = asymptotic_metrics(&link, &b, p_cons)?;
        t.push_row(vec![
            Cell::from(l as u64),
            Cell::from(exact.throughput),
            Cell::from(asym.throughput),
        ]);
    }
    Ok(vec![t])
}

/// Throughput-delay tradeoff over the codeword length, K = 500 and 1000
/// nats, N_r = 6, M = 2, c = 3, D = 40, SNR 0 dB, optimized boundaries.
fn fig9() -> Result<Vec<Table>> {
    let mut t = Table::new(
        "fig9_throughput_delay_tradeoff",
        &["info_nats", "sub_len_cu", "expected_delay_cu", "throughput_npcu"],
    );
    for k in [500.0, 1000.0] {
        for l in [125u32, 250, 500, 1000, 2000, 4000, 8000] {
            let link = link(RICIAN, 6, PaConfig::ideal(), harq(2, k, l, 40.0, 3.0))?;
            let r = exhaustive_search(&link, 1.0, &opt_spec(17))?;
            let m = analysis::link_metrics(&link, &r.boundaries, 1.0)?;
            t.push_row(vec![
                Cell::from(k),
                Cell::from(l as u64),
                Cell::from(m.expected_delay),
                Cell::from(m.throughput),
            ]);
        }
    }
    Ok(vec![t])
}

/// Optimal boundaries vs total SNR; Rician, non-ideal PA, L=1000, K=1000,
/// D=40, M=3, c=0.5, N_r=5. The thresholds fall to zero as SNR grows.
fn fig10() -> Result<Vec<Table>> {
    let mut t = Table::new(
        "fig10_optimal_boundaries",
        &["total_snr_db", "snr_db", "q1", "q2", "delay_cu"],
    );
    let link = link(RICIAN, 5, lossy_pa(), harq(3, 1000.0, 1000, 40.0, 0.5))?;
    for total_snr in snr_range(14.0, 46.0, 2.0) {
        let snr = total_snr - 10.0 * 5f64.log10();
        let p_cons = db(snr);
        let r = exhaustive_search(&link, p_cons, &opt_spec(33))?;
        t.push_row(vec![
            Cell::from(total_snr),
            Cell::from(snr),
            Cell::from(r.boundaries.interior()[0]),
            Cell::from(r.boundaries.interior()[1]),
            Cell::from(r.objective_value),
        ]);
    }
    Ok(vec![t])
}

/// PA-efficiency effect on error probability and throughput; K=250, L=500,
/// D=0, N_r=3, c=0.5, M=1,2, ideal vs non-ideal PA.
fn fig11() -> Result<Vec<Table>> {
    let mut t = Table::new(
        "fig11_pa_effect",
        &["m_max", "pa", "snr_db", "error_prob", "throughput_npcu"],
    );
    for m in [1u32, 2] {
        for (pa_name, pa) in [("ideal", PaConfig::ideal()), ("lossy", lossy_pa())] {
            let link = link(RICIAN, 3, pa, harq(m, 250.0, 500, 0.0, 0.5))?;
            // One shared axis; the lossy PA needs the upper half of it.
            for snr in snr_range(-10.0, 34.0, 2.0) {
                let p_cons = db(snr);
                let b = if m == 1 {
                    Boundaries::standard(1)
                } else {
                    exhaustive_search(&link, p_cons, &opt_spec(17))?.boundaries
                };
                let metrics = analysis::link_metrics(&link, &b, p_cons)?;
                t.push_row(vec![
                    Cell::from(m as u64),
                    Cell::from(pa_name),
                    Cell::from(snr),
                    Cell::from(metrics.error_prob),
                    Cell::from(metrics.throughput),
                ]);
            }
        }
    }
    Ok(vec![t])
}

/// Fast vs standard HARQ expected delay; Rician, ideal PA, L=1000, K=1000,
/// M=2,3, c=3, D=40, N_r=3.
fn fig12() -> Result<Vec<Table>> {
    let mut t = Table::new(
        "fig12_delay_fast_vs_standard",
        &["m_max", "snr_db", "delay_fast_cu", "delay_standard_cu", "relative_gain"],
    );
    for m in [2u32, 3] {
        let link = link(RICIAN, 3, PaConfig::ideal(), harq(m, 1000.0, 1000, 40.0, 3.0))?;
        for snr in snr_range(-30.0, 10.0, 2.0) {
            let p_cons = db(snr);
            let fast = exhaustive_search(&link, p_cons, &opt_spec(33))?.objective_value;
            let std = analysis::expected_delay(&link, &Boundaries::standard(m), p_cons)?;
            t.push_row(vec![
                Cell::from(m as u64),
                Cell::from(snr),
                Cell::from(fast),
                Cell::from(std),
                Cell::from(analysis::relative_gain(std, fast)),
            ]);
        }
    }
    Ok(vec![t])
}

/// Fast vs standard HARQ throughput; M=3, N_r=3 and 6, same link as fig12.
fn fig13() -> Result<Vec<Table>> {
    let mut t = Table::new(
        "fig13_throughput_fast_vs_standard",
        &["n_r", "snr_db", "throughput_fast_npcu", "throughput_standard_npcu"],
    );
    for n_r in [3u32, 6] {
        let link = link(RICIAN, n_r, PaConfig::ideal(), harq(3, 1000.0, 1000, 40.0, 3.0))?;
        for snr in snr_range(-30.0, 10.0, 2.0) {
            let p_cons = db(snr);
            let fast = exhaustive_search(&link, p_cons, &opt_spec(33))?;
            let fast_thr = analysis::link_metrics(&link, &fast.boundaries, p_cons)?.throughput;
            let std_thr =
                analysis::link_metrics(&link, &Boundaries::standard(3), p_cons)?.throughput;
            t.push_row(vec![
                Cell::from(n_r as u64),
                Cell::from(snr),
                Cell::from(fast_thr),
                Cell::from(std_thr),
            ]);
        }
    }
    Ok(vec![t])
}

/// Probability and normalized energy of unnecessary transmissions at
/// delay-optimized boundaries; M=2, c=0.5, L=1000, K=500, D=40, N_r=3,4.
fn fig14() -> Result<Vec<Table>> {
    let mut t = Table::new(
        "fig14_unnecessary_tx",
        &["n_r", "snr_db", "unnecessary_prob", "unnecessary_energy"],
    );
    for n_r in [3u32, 4] {
        let link = link(RICIAN, n_r, PaConfig::ideal(), harq(2, 500.0, 1000, 40.0, 0.5))?;
        for snr in snr_range(-10.0, 10.0, 1.0) {
            let p_cons = db(snr);
            let b = exhaustive_search(&link, p_cons, &opt_spec(33))?.boundaries;
            let (prob, energy) = analysis::unnecessary_tx_stats(&link, &b, p_cons)?;
            t.push_row(vec![
                Cell::from(n_r as u64),
                Cell::from(snr),
                Cell::from(prob),
                Cell::from(energy),
            ]);
        }
    }
    Ok(vec![t])
}

/// Expected vs success-constrained delay; Rician, ideal PA, c=3, M=2,
/// L=1000, K=1000, N_r=3, D=40, optimized boundaries.
fn fig15() -> Result<Vec<Table>> {
    let mut t = Table::new(
        "fig15_constrained_delay",
        &["snr_db", "expected_delay_cu", "constrained_delay_cu"],
    );
    let link = link(RICIAN, 3, PaConfig::ideal(), harq(2, 1000.0, 1000, 40.0, 3.0))?;
    for snr in snr_range(-20.0, 20.0, 2.0) {
        let p_cons = db(snr);
        let b = exhaustive_search(&link, p_cons, &opt_spec(33))?.boundaries;
        let m = analysis::link_metrics(&link, &b, p_cons)?;
        t.push_row(vec![
            Cell::from(snr),
            Cell::from(m.expected_delay),
            Cell::from(m.constrained_delay),
        ]);
    }
    Ok(vec![t])
}

/// Expected delay vs pilot count under imperfect CSIR; SISO Rayleigh,
/// L=1000, K=500, M=2, c=1, q1=0.25, unit pilot power, SNR 2 dB.
fn fig16() -> Result<Vec<Table>> {
    let mut t = Table::new(
        "fig16_imperfect_csir",
        &[
            "n_p",
            "csir_delay_cu",
            "csir_delay_se_cu",
            "event_mc_delay_cu",
            "event_mc_delay_se_cu",
            "perfect_csir_delay_cu",
        ],
    );
    let link = link(RAYLEIGH, 1, PaConfig::ideal(), harq(2, 500.0, 1000, 40.0, 1.0))?;
    let b = Boundaries::new(vec![0.25])?;
    let p_cons = db(2.0);
    let perfect = analysis::expected_delay(&link, &b, p_cons)?;
    for n_p in [1u32, 2, 4, 8, 16, 32, 64, 128, 256, 1024] {
        let pilot = PilotModel { n_p, p_pilot: 1.0 };
        let est =
            analysis::expected_delay_imperfect_csir(&link, pilot, &b, p_cons, 400_000, 2024)?;
        let event =
            montecarlo::estimate_delay_imperfect_csir(&link, pilot, &b, p_cons, 400_000, 4048)?;
        t.push_row(vec![
            Cell::from(n_p as u64),
            Cell::from(est.mean),
            Cell::from(est.std_error),
            Cell::from(event.mean),
            Cell::from(event.std_error),
            Cell::from(perfect),
        ]);
    }
    Ok(vec![t])
}
