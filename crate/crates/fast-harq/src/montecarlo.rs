//! Packet-level event simulator for fast/standard HARQ.
//!
//! Each packet draws one sum gain and one latent uniform; the message is
//! decodable at round n iff the uniform clears the per-round error curve
//! Q_n(G). This monotone coupling is exactly the convention under which the
//! analysis module's first-success decompositions hold, so simulator means
//! are unbiased estimates of the analytical metrics.
//!
//! Packets are embarrassingly parallel: packet i draws from the
//! counter-based stream (seed, i), and chunk partials are reduced in index
//! order, so results do not depend on thread scheduling.

use crate::analysis::{packet_delay, Boundaries, LinkSpec};
use crate::channel::{sample_joint_gain_estimate, PilotModel};
use crate::fbl::round_error_prob;
use crate::rng::Stream;
use crate::{Error, Result};
use rayon::prelude::*;

/// Outcome of one simulated packet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketTrace {
    /// Drawn sum gain.
    pub gain: f64,
    /// Quantization region m: decoding starts at round m.
    pub region: u32,
    /// Round at which transmission stopped (success or round M).
    pub stop_round: u32,
    pub decoded: bool,
    /// Total packet time in channel uses.
    pub delay: f64,
    /// ACK/NACK signals sent.
    pub feedback_count: u32,
    /// Rounds the message was already decodable before the scheduled first
    /// decode (region minus first decodable round, when positive).
    pub wasted_rounds: u32,
}

/// Mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: u64,
}

/// Aggregated simulation output of [`estimate_metrics`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimMetrics {
    /// Packet error probability.
    pub error: SimEstimate,
    /// Expected delay, channel uses.
    pub delay: SimEstimate,
    /// K * success fraction / mean delay (point estimate).
    pub throughput: f64,
    /// Mean delay over decoded packets; None if nothing decoded.
    pub constrained_delay: Option<SimEstimate>,
    /// Fraction of packets with at least one unnecessary round.
    pub unnecessary_prob: SimEstimate,
    /// Mean wasted energy normalized by sub-codeword length,
    /// i.e. wasted_rounds * p_cons.
    pub unnecessary_energy: SimEstimate,
}

/// Simulate one packet against the given boundaries and consumed power.
pub fn simulate_packet(
    link: &LinkSpec,
    bounds: &Boundaries,
    p_cons: f64,
    stream: &mut Stream,
) -> PacketTrace {
    let cfg = &link.harq;
    let m_max = cfg.m_max;
    let p = link.radiated(p_cons);
    let gain = link.dist.sample(stream);
    let region = bounds.region_of(gain);
    let u = stream.uniform();

    // Monotone coupling: decodable at round n iff u >= Q_n(gain). Q_n is
    // nonincreasing in n, so the first clearing round is well defined.
    let mut first_decodable: Option<u32> = None;
    for n in 1..=m_max {
        if u >= round_error_prob(gain, n, &cfg.code, p) {
            first_decodable = Some(n);
            break;
        }
    }
    let (stop_round, decoded) = match first_decodable {
        Some(n) => (n.max(region), true),
        None => (m_max, false),
    };
    let feedback_count = if stop_round < m_max {
        stop_round - region + 1
    } else {
        m_max - region
    };
    let wasted_rounds = match first_decodable {
        Some(n) if n < region => region - n,
        _ => 0,
    };
    PacketTrace {
        gain,
        region,
        stop_round,
        decoded,
        delay: packet_delay(cfg, region, stop_round),
        feedback_count,
        wasted_rounds,
    }
}

#[derive(Default, Clone, Copy)]
struct Partial {
    n: u64,
    decoded: u64,
    delay: f64,
    delay2: f64,
    delay_dec: f64,
    delay_dec2: f64,
    wasted_any: u64,
    wasted: f64,
    wasted2: f64,
}

impl Partial {
    fn absorb(&mut self, t: &PacketTrace) {
        self.n += 1;
        self.delay += t.delay;
        self.delay2 += t.delay * t.delay;
        if t.decoded {
            self.decoded += 1;
            self.delay_dec += t.delay;
            self.delay_dec2 += t.delay * t.delay;
        }
        if t.wasted_rounds > 0 {
            self.wasted_any += 1;
        }
        let w = t.wasted_rounds as f64;
        self.wasted += w;
        self.wasted2 += w * w;
    }

    fn merge(mut self, o: Partial) -> Partial {
        self.n += o.n;
        self.decoded += o.decoded;
        self.delay += o.delay;
        self.delay2 += o.delay2;
        self.delay_dec += o.delay_dec;
        self.delay_dec2 += o.delay_dec2;
        self.wasted_any += o.wasted_any;
        self.wasted += o.wasted;
        self.wasted2 += o.wasted2;
        self
    }
}

fn mean_estimate(sum: f64, sum2: f64, n: u64) -> SimEstimate {
    let nf = n as f64;
    let mean = sum / nf;
    let var = if n > 1 {
        ((sum2 - nf * mean * mean) / (nf - 1.0)).max(0.0)
    } else {
        0.0
    };
    SimEstimate {
        mean,
        std_error: (var / nf).sqrt(),
        n_samples: n,
    }
}

fn fraction_estimate(count: u64, n: u64) -> SimEstimate {
    let p = count as f64 / n as f64;
    SimEstimate {
        mean: p,
        std_error: (p * (1.0 - p) / n as f64).sqrt(),
        n_samples: n,
    }
}

/// Simulate `n_packets` packets and aggregate every metric. Packet i uses
/// stream (seed, i); the result is reproducible for a given seed no matter
/// how the work is scheduled.
pub fn estimate_metrics(
    link: &LinkSpec,
    bounds: &Boundaries,
    p_cons: f64,
    n_packets: u64,
    seed: u64,
) -> Result<SimMetrics> {
    if n_packets == 0 {
        return Err(Error::domain("n_packets must be at least 1"));
    }
    let chunk = 1u64 << 14;
    let n_chunks = n_packets.div_ceil(chunk);
    let partials: Vec<Partial> = (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let lo = ci * chunk;
            let hi = (lo + chunk).min(n_packets);
            let mut acc = Partial::default();
            for idx in lo..hi {
                let mut stream = Stream::new(seed, idx);
                let trace = simulate_packet(link, bounds, p_cons, &mut stream);
                acc.absorb(&trace);
            }
            acc
        })
        .collect();
    let total = partials.into_iter().fold(Partial::default(), Partial::merge);

    let delay = mean_estimate(total.delay, total.delay2, total.n);
    let success = total.decoded as f64 / total.n as f64;
    let constrained_delay = if total.decoded > 0 {
        Some(mean_estimate(total.delay_dec, total.delay_dec2, total.decoded))
    } else {
        None
    };
    let wasted = mean_estimate(total.wasted, total.wasted2, total.n);
    Ok(SimMetrics {
        error: fraction_estimate(total.n - total.decoded, total.n),
        delay,
        throughput: link.harq.code.info_nats * success / delay.mean,
        constrained_delay,
        unnecessary_prob: fraction_estimate(total.wasted_any, total.n),
        unnecessary_energy: SimEstimate {
            mean: wasted.mean * p_cons,
            std_error: wasted.std_error * p_cons,
            n_samples: wasted.n_samples,
        },
    })
}

/// Event-level simulation under imperfect CSIR: the first decoding round
/// comes from the pilot-based gain estimate, decodability from the true
/// gain. SISO Rayleigh only, like the pilot model itself. Returns the mean
/// packet delay with its standard error.
pub fn estimate_delay_imperfect_csir(
    link: &LinkSpec,
    pilot: PilotModel,
    bounds: &Boundaries,
    p_cons: f64,
    n_packets: u64,
    seed: u64,
) -> Result<SimEstimate> {
    if n_packets == 0 {
        return Err(Error::domain("n_packets must be at least 1"));
    }
    let cfg = &link.harq;
    let m_max = cfg.m_max;
    let p = link.radiated(p_cons);
    let model = link.dist.model();
    if link.dist.n_r() != 1 {
        return Err(Error::unsupported("imperfect-CSIR simulation is SISO only"));
    }
    let chunk = 1u64 << 14;
    let n_chunks = n_packets.div_ceil(chunk);
    let sums: Result<Vec<(f64, f64)>> = (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let lo = ci * chunk;
            let hi = (lo + chunk).min(n_packets);
            let mut s = 0.0;
            let mut s2 = 0.0;
            for idx in lo..hi {
                let mut stream = Stream::new(seed, idx);
                let (g, g_est) = sample_joint_gain_estimate(model, pilot, &mut stream)?;
                let region = bounds.region_of(g_est);
                let u = stream.uniform();
                let mut stop = m_max;
                for n in region..=m_max {
                    if u >= round_error_prob(g, n, &cfg.code, p) {
                        stop = n;
                        break;
                    }
                }
                let tau = packet_delay(cfg, region, stop);
                s += tau;
                s2 += tau * tau;
            }
            Ok((s, s2))
        })
        .collect();
    let sums = sums?;
    let (sum, sum2) = sums
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    Ok(mean_estimate(sum, sum2, n_packets))
}
