//! Expected delay and throughput of fast HARQ against standard HARQ over
//! SNR, with the low-SNR relative gain converging to c(M-1)/(2+c(M+1)).
//!
//! Run: cargo run --release --example delay_and_throughput

use fast_harq::analysis::{self, low_snr_gain_limit, relative_gain, Boundaries, DecodeDelay};
use fast_harq::channel::{FadingModel, SumGainDistribution};
use fast_harq::fbl::CodeSpec;
use fast_harq::optimize::{exhaustive_search, OptimizeSpec};
use fast_harq::power::PaConfig;
use fast_harq::{HarqConfig, LinkSpec};

fn main() {
    let m_max = 3;
    let c = 3.0;
    let link = LinkSpec::new(
        SumGainDistribution::new(FadingModel::Rician { k: 0.01, omega: 1.0 }, 3).unwrap(),
        PaConfig::ideal(),
        HarqConfig {
            m_max,
            code: CodeSpec {
                info_nats: 1000.0,
                sub_len: 1000,
                third_order: false,
            },
            feedback_delay: 40.0,
            decode_delay: DecodeDelay::Linear { coeff: c },
        },
    )
    .unwrap();

    let opt = OptimizeSpec {
        grid_points: 33,
        ..OptimizeSpec::default()
    };
    println!("snr_db,delay_fast_cu,delay_standard_cu,relative_gain,throughput_fast_npcu,throughput_standard_npcu");
    for i in 0..=10 {
        let snr_db = -30.0 + 4.0 * i as f64;
        let p_cons = 10f64.powf(snr_db / 10.0);
        let best = exhaustive_search(&link, p_cons, &opt).unwrap();
        let standard = Boundaries::standard(m_max);
        let fast = analysis::link_metrics(&link, &best.boundaries, p_cons).unwrap();
        let std = analysis::link_metrics(&link, &standard, p_cons).unwrap();
        println!(
            "{snr_db},{},{},{},{},{}",
            fast.expected_delay,
            std.expected_delay,
            relative_gain(std.expected_delay, fast.expected_delay),
            fast.throughput,
            std.throughput,
        );
    }
    eprintln!(
        "low-SNR limit from the linear decoding profile: {:.1}%",
        100.0 * low_snr_gain_limit(m_max, c)
    );
}
