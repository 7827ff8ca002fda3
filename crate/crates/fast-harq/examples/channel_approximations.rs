//! Sum-gain distribution machinery: exact Rician/Rayleigh pdf and cdf,
//! the Gaussian and Gamma moment approximations, and how their CDF errors
//! shrink with the antenna count.
//!
//! Run: cargo run --release --example channel_approximations

use fast_harq::channel::{
    antenna_moments, clt_params, gamma_params, FadingModel, SumGainDistribution,
};
use fast_harq::rng::Stream;

fn main() {
    let model = FadingModel::Rician { k: 0.01, omega: 1.0 };

    let (zeta, nu2) = antenna_moments(model);
    eprintln!("per-antenna moments: mean {zeta:.6}, variance {nu2:.6}");

    println!("n_r,sup_cdf_error_gaussian,sup_cdf_error_gamma,ks_empirical_vs_exact");
    for n_r in [4u32, 16, 64, 256] {
        let d = SumGainDistribution::new(model, n_r).unwrap();
        let gauss = clt_params(model, n_r);
        let gamma = gamma_params(model, n_r);

        let mut sup_g = 0.0f64;
        let mut sup_b = 0.0f64;
        for i in 0..=400 {
            let x = d.upper_cutoff() * i as f64 / 400.0;
            let exact = d.cdf(x);
            sup_g = sup_g.max((gauss.cdf(x) - exact).abs());
            sup_b = sup_b.max((gamma.cdf(x) - exact).abs());
        }

        // Empirical KS distance of the sampler against the quadrature CDF.
        let n = 200_000;
        let mut stream = Stream::new(8, n_r as u64);
        let mut samples: Vec<f64> = (0..n).map(|_| d.sample(&mut stream)).collect();
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut ks = 0.0f64;
        for (i, &x) in samples.iter().enumerate().step_by(37) {
            ks = ks.max((d.cdf(x) - (i + 1) as f64 / n as f64).abs());
        }

        println!("{n_r},{sup_g:.3e},{sup_b:.3e},{ks:.3e}");
    }
}
