//! Long-codeword behavior: the finite-blocklength error probability
//! approaching the step-function limit as L grows, and the closed-form
//! Rayleigh outage sanity check.
//!
//! Run: cargo run --release --example asymptotic_limits

use fast_harq::analysis::{self, Boundaries, DecodeDelay};
use fast_harq::channel::{FadingModel, SumGainDistribution};
use fast_harq::fbl::CodeSpec;
use fast_harq::power::PaConfig;
use fast_harq::{HarqConfig, LinkSpec};

fn main() {
    // R = 1 npcu at every length; total SNR 5 dB over 10 antennas.
    let p_cons = 10f64.powf(0.5) / 10.0;
    println!("sub_len_cu,error_finite,error_asymptotic,throughput_finite_npcu,throughput_asymptotic_npcu");
    for l in [100u32, 400, 1600, 6400, 25_600, 102_400] {
        let link = LinkSpec::new(
            SumGainDistribution::new(FadingModel::Rician { k: 0.01, omega: 1.0 }, 10).unwrap(),
            PaConfig::ideal(),
            HarqConfig {
                m_max: 2,
                code: CodeSpec {
                    info_nats: l as f64,
                    sub_len: l,
                    third_order: false,
                },
                feedback_delay: 40.0,
                decode_delay: DecodeDelay::Linear { coeff: 0.0 },
            },
        )
        .unwrap();
        let bounds = Boundaries::uniform_quantile(&link.dist, 2);
        let finite = analysis::link_metrics(&link, &bounds, p_cons).unwrap();
        let asym = analysis::asymptotic_metrics(&link, &bounds, p_cons).unwrap();
        println!(
            "{l},{},{},{},{}",
            finite.error_prob, asym.error_prob, finite.throughput, asym.throughput
        );
    }

    // Rayleigh SISO, single shot, P = e - 1 at R = 1: outage 1 - 1/e.
    let link = LinkSpec::new(
        SumGainDistribution::new(FadingModel::Rayleigh { omega: 1.0 }, 1).unwrap(),
        PaConfig::ideal(),
        HarqConfig {
            m_max: 1,
            code: CodeSpec {
                info_nats: 1000.0,
                sub_len: 1000,
                third_order: false,
            },
            feedback_delay: 0.0,
            decode_delay: DecodeDelay::Linear { coeff: 0.0 },
        },
    )
    .unwrap();
    let outage = analysis::asymptotic_metrics(
        &link,
        &Boundaries::standard(1),
        std::f64::consts::E - 1.0,
    )
    .unwrap()
    .error_prob;
    eprintln!("rayleigh siso outage at P = e-1: {outage} (1 - 1/e = {})", 1.0 - (-1.0f64).exp());
}
