//! Quantization-boundary optimization: exhaustive quantile-grid search
//! cross-checked by the queen-style iterative heuristic, and the collapse
//! of the optimal thresholds to zero (standard HARQ) as SNR grows.
//!
//! Run: cargo run --release --example optimize_boundaries

use fast_harq::analysis::DecodeDelay;
use fast_harq::channel::{FadingModel, SumGainDistribution};
use fast_harq::fbl::CodeSpec;
use fast_harq::optimize::{exhaustive_search, queen_search, solve_constrained, OptimizeSpec};
use fast_harq::power::PaConfig;
use fast_harq::{HarqConfig, LinkSpec};

fn main() {
    let link = LinkSpec::new(
        SumGainDistribution::new(FadingModel::Rician { k: 0.01, omega: 1.0 }, 5).unwrap(),
        PaConfig {
            epsilon: 0.75,
            theta: 0.5,
            p_max: 10f64.powf(4.8),
        },
        HarqConfig {
            m_max: 3,
            code: CodeSpec {
                info_nats: 1000.0,
                sub_len: 1000,
                third_order: false,
            },
            feedback_delay: 40.0,
            decode_delay: DecodeDelay::Linear { coeff: 0.5 },
        },
    )
    .unwrap();

    let opt = OptimizeSpec {
        grid_points: 33,
        queen_iterations: 120,
        seed: 7,
        ..OptimizeSpec::default()
    };

    println!("snr_db,q1_exhaustive,q2_exhaustive,delay_exhaustive_cu,delay_queen_cu,queen_evals");
    for snr_db in [-4.0, 0.0, 4.0, 8.0, 12.0, 16.0, 20.0] {
        let p_cons = 10f64.powf(snr_db / 10.0);
        let ex = exhaustive_search(&link, p_cons, &opt).unwrap();
        let qu = queen_search(&link, p_cons, &opt).unwrap();
        println!(
            "{snr_db},{},{},{},{},{}",
            ex.boundaries.interior()[0],
            ex.boundaries.interior()[1],
            ex.objective_value,
            qu.objective_value,
            qu.evaluations,
        );
    }

    // Error-constrained mode: find the consumed power for a 1% target,
    // then optimize the boundaries at that power.
    match solve_constrained(&link, 0.01, &opt) {
        Ok((p_cons, result)) => eprintln!(
            "beta = 1e-2: p_cons {:.4} ({:.2} dB), boundaries {:?}, delay {:.1} cu",
            p_cons,
            10.0 * p_cons.log10(),
            result.boundaries.interior(),
            result.objective_value,
        ),
        Err(e) => eprintln!("beta = 1e-2: {e}"),
    }
}
