//! Packet-level Monte Carlo against the closed-form metrics: error
//! probability, expected delay, success-constrained delay and the
//! unnecessary-transmission statistics, all within sampling error.
//!
//! Run: cargo run --release --example monte_carlo_validation

use fast_harq::analysis::{self, Boundaries, DecodeDelay};
use fast_harq::channel::{FadingModel, SumGainDistribution};
use fast_harq::fbl::CodeSpec;
use fast_harq::montecarlo::estimate_metrics;
use fast_harq::power::PaConfig;
use fast_harq::{HarqConfig, LinkSpec};

fn main() {
    let link = LinkSpec::new(
        SumGainDistribution::new(FadingModel::Rician { k: 0.01, omega: 1.0 }, 3).unwrap(),
        PaConfig::ideal(),
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
    let bounds = Boundaries::uniform_quantile(&link.dist, 3);
    let p_cons = 10f64.powf(-0.2);
    let packets = 1_000_000;

    let sim = estimate_metrics(&link, &bounds, p_cons, packets, 42).unwrap();
    let exact = analysis::link_metrics(&link, &bounds, p_cons).unwrap();
    let (u_prob, u_energy) = analysis::unnecessary_tx_stats(&link, &bounds, p_cons).unwrap();

    println!("metric,analysis,simulation,std_error,sigmas");
    let rows = [
        ("error_prob", exact.error_prob, sim.error.mean, sim.error.std_error),
        (
            "expected_delay_cu",
            exact.expected_delay,
            sim.delay.mean,
            sim.delay.std_error,
        ),
        (
            "constrained_delay_cu",
            exact.constrained_delay.unwrap(),
            sim.constrained_delay.unwrap().mean,
            sim.constrained_delay.unwrap().std_error,
        ),
        (
            "unnecessary_prob",
            u_prob,
            sim.unnecessary_prob.mean,
            sim.unnecessary_prob.std_error,
        ),
        (
            "unnecessary_energy",
            u_energy,
            sim.unnecessary_energy.mean,
            sim.unnecessary_energy.std_error,
        ),
    ];
    for (name, exact, mean, se) in rows {
        let sigmas = if se > 0.0 { (mean - exact).abs() / se } else { 0.0 };
        println!("{name},{exact},{mean},{se},{sigmas:.2}");
    }
    println!(
        "throughput_npcu,{},{},,",
        exact.throughput, sim.throughput
    );
}
