//! Packet error probability across SNR, with the tightness of the
//! Gaussian (CLT), Gamma and linearized closed-form approximations.
//!
//! Run: cargo run --release --example error_probability

use fast_harq::analysis::{self, linearization_constants, y_linearized_gaussian, Boundaries};
use fast_harq::channel::{clt_params, gamma_params, FadingModel, SumGainDistribution};
use fast_harq::fbl::{round_error_prob, CodeSpec};
use fast_harq::power::PaConfig;
use fast_harq::quad::integrate;
use fast_harq::{HarqConfig, LinkSpec};

fn main() {
    let model = FadingModel::Rician { k: 0.01, omega: 1.0 };
    let n_r = 50;
    let harq = HarqConfig {
        m_max: 2,
        code: CodeSpec {
            info_nats: 500.0,
            sub_len: 1000,
            third_order: false,
        },
        feedback_delay: 40.0,
        decode_delay: fast_harq::analysis::DecodeDelay::Linear { coeff: 0.5 },
    };
    let link = LinkSpec::new(
        SumGainDistribution::new(model, n_r).unwrap(),
        PaConfig::ideal(),
        harq,
    )
    .unwrap();

    let gauss = clt_params(model, n_r);
    let gamma = gamma_params(model, n_r);

    println!("snr_db,error_exact,error_third_order,error_clt,error_gamma,error_linearized");
    for i in 0..=14 {
        let snr_db = -26.0 + i as f64;
        let p_cons = 10f64.powf(snr_db / 10.0);
        let p = link.radiated(p_cons);

        let exact = analysis::error_prob(&link, p_cons).unwrap();

        let mut third = link.clone();
        third.harq.code.third_order = true;
        let exact3 = analysis::error_prob(&third, p_cons).unwrap();

        // Same per-round error curve integrated against the two moment
        // approximations of the sum gain.
        let code = &link.harq.code;
        let q2 = |x: f64| round_error_prob(x, 2, code, p);
        let hi = link.dist.upper_cutoff() + 10.0 * gauss.variance.sqrt();
        let clt = integrate(&|x| gauss.pdf(x) * if x <= 0.0 { 1.0 } else { q2(x) },
            gauss.mean - 10.0 * gauss.variance.sqrt(), hi, 1e-10, 4000)
        .unwrap();
        let gam = integrate(&|x| gamma.pdf(x) * q2(x), 0.0, hi, 1e-10, 4000).unwrap();

        let lin = linearization_constants(2, code, p);
        let lem3 = y_linearized_gaussian(&gauss, gauss.mean - 12.0 * gauss.variance.sqrt(), f64::INFINITY, &lin);

        println!("{snr_db},{exact},{exact3},{clt},{gam},{lem3}");
    }

    // The error probability never depends on the quantization boundaries.
    let p_cons = 10f64.powf(-1.9);
    let direct = analysis::error_prob(&link, p_cons).unwrap();
    let partitioned = analysis::error_prob_partitioned(
        &link,
        &Boundaries::uniform_quantile(&link.dist, 2),
        p_cons,
    )
    .unwrap();
    eprintln!("boundary independence: direct {direct:.12e} vs partitioned {partitioned:.12e}");
}
