//! PA efficiency map and the consumed-power solver: the SNR needed for an
//! error target under ideal and lossy amplifiers, and the HARQ power gain
//! of allowing a second transmission round.
//!
//! Run: cargo run --release --example power_solver

use fast_harq::analysis::{self, Boundaries, DecodeDelay};
use fast_harq::channel::{FadingModel, SumGainDistribution};
use fast_harq::fbl::CodeSpec;
use fast_harq::power::{output_power, solve_p_cons_for_beta, PaConfig};
use fast_harq::{HarqConfig, LinkSpec};

fn link(m_max: u32, pa: PaConfig) -> LinkSpec {
    LinkSpec::new(
        SumGainDistribution::new(FadingModel::Rician { k: 0.01, omega: 1.0 }, 40).unwrap(),
        pa,
        HarqConfig {
            m_max,
            code: CodeSpec {
                info_nats: 1000.0,
                sub_len: 1000,
                third_order: false,
            },
            feedback_delay: 40.0,
            decode_delay: DecodeDelay::Linear { coeff: 0.5 },
        },
    )
    .unwrap()
}

fn main() {
    let lossy = PaConfig {
        epsilon: 0.75,
        theta: 0.5,
        p_max: 10f64.powf(4.8),
    };
    println!("pa,m_max,beta,p_cons,snr_db,radiated_power");
    for (pa_name, pa) in [("ideal", PaConfig::ideal()), ("lossy", lossy)] {
        for m in [1u32, 2] {
            let link = link(m, pa);
            let bounds = Boundaries::standard(m);
            for beta in [1e-2, 1e-3] {
                match solve_p_cons_for_beta(
                    |p| {
                        Ok(analysis::asymptotic_metrics(&link, &bounds, p)
                            .unwrap()
                            .error_prob)
                    },
                    beta,
                ) {
                    Ok(p_cons) => {
                        let radiated = output_power(&pa, p_cons);
                        let feasible = radiated <= pa.p_max;
                        println!(
                            "{pa_name},{m},{beta},{p_cons},{:.3},{radiated}{}",
                            10.0 * p_cons.log10(),
                            if feasible { "" } else { " (infeasible)" },
                        );
                    }
                    Err(e) => println!("{pa_name},{m},{beta},,,{e}"),
                }
            }
        }
    }

    // The headline HARQ benefit: one retransmission round buys about 4 dB
    // at a 1e-3 error target with an ideal PA.
    let snr_for = |m: u32| {
        let link = link(m, PaConfig::ideal());
        let bounds = Boundaries::standard(m);
        let p = solve_p_cons_for_beta(
            |p| {
                Ok(analysis::asymptotic_metrics(&link, &bounds, p)
                    .unwrap()
                    .error_prob)
            },
            1e-3,
        )
        .unwrap();
        10.0 * p.log10()
    };
    eprintln!(
        "HARQ power-efficiency gain at beta = 1e-3: {:.2} dB",
        snr_for(1) - snr_for(2)
    );
}
