//! Sensitivity to channel-estimation accuracy: expected delay versus the
//! pilot count when the receiver schedules its first decoding round from a
//! pilot-based MMSE gain estimate instead of the true gain.
//!
//! Run: cargo run --release --example imperfect_csir

use fast_harq::analysis::{self, Boundaries, DecodeDelay};
use fast_harq::channel::{FadingModel, PilotModel, SumGainDistribution};
use fast_harq::fbl::CodeSpec;
use fast_harq::montecarlo;
use fast_harq::power::PaConfig;
use fast_harq::{HarqConfig, LinkSpec};

fn main() {
    let link = LinkSpec::new(
        SumGainDistribution::new(FadingModel::Rayleigh { omega: 1.0 }, 1).unwrap(),
        PaConfig::ideal(),
        HarqConfig {
            m_max: 2,
            code: CodeSpec {
                info_nats: 500.0,
                sub_len: 1000,
                third_order: false,
            },
            feedback_delay: 40.0,
            decode_delay: DecodeDelay::Linear { coeff: 1.0 },
        },
    )
    .unwrap();
    let bounds = Boundaries::new(vec![0.25]).unwrap();
    let p_cons = 10f64.powf(0.2);
    let samples = 500_000;

    let perfect = analysis::expected_delay(&link, &bounds, p_cons).unwrap();
    println!("n_p,delay_cu,std_error_cu,event_level_mc_cu,perfect_csir_cu");
    for n_p in [1u32, 2, 4, 8, 16, 64, 256, 1024] {
        let pilot = PilotModel { n_p, p_pilot: 1.0 };
        let est =
            analysis::expected_delay_imperfect_csir(&link, pilot, &bounds, p_cons, samples, 3)
                .unwrap();
        let event = montecarlo::estimate_delay_imperfect_csir(
            &link, pilot, &bounds, p_cons, samples, 4,
        )
        .unwrap();
        println!(
            "{n_p},{:.3},{:.3},{:.3},{perfect:.3}",
            est.mean, est.std_error, event.mean
        );
    }
}
