//! Run configuration: one structured TOML file per run, validated eagerly,
//! with a single sweep axis. Flag overrides are applied by the command
//! layer before validation.

use crate::analysis::{Boundaries, DecodeDelay, HarqConfig, LinkSpec};
use crate::channel::{FadingModel, PilotModel, SumGainDistribution};
use crate::fbl::CodeSpec;
use crate::optimize::{Objective, OptimizeSpec};
use crate::power::PaConfig;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub fading: FadingSection,
    pub link: LinkSection,
    #[serde(default)]
    pub pa: PaSection,
    pub harq: HarqSection,
    #[serde(default)]
    pub boundaries: BoundariesSection,
    pub sweep: SweepSection,
    #[serde(default)]
    pub mc: McSection,
    #[serde(default)]
    pub optimize: OptimizeSection,
    #[serde(default)]
    pub pilot: PilotSection,
    /// Base seed for every Monte Carlo column.
    #[serde(default)]
    pub seed: u64,
    /// Fixed SNR (dB over unit noise) used when the sweep axis is not snr_db.
    #[serde(default)]
    pub snr_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FadingSection {
    /// "rayleigh" or "rician".
    pub model: String,
    /// Rician factor; ignored for Rayleigh.
    #[serde(default)]
    pub k: f64,
    #[serde(default = "one")]
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSection {
    /// Receive antenna count.
    pub n_r: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PaSection {
    pub epsilon: f64,
    pub theta: f64,
    /// Maximum output power in dB over unit noise; omit for unlimited.
    pub p_max_db: Option<f64>,
}

impl Default for PaSection {
    fn default() -> Self {
        PaSection {
            epsilon: 1.0,
            theta: 0.0,
            p_max_db: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarqSection {
    pub m_max: u32,
    /// Sub-codeword length L in channel uses.
    pub sub_len: u32,
    /// Information nats per parent codeword K.
    pub info_nats: f64,
    /// Feedback delay D in channel uses.
    #[serde(default)]
    pub feedback_delay: f64,
    /// Linear decoding-delay coefficient c.
    #[serde(default)]
    pub decode_coeff: f64,
    #[serde(default)]
    pub third_order: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundariesSection {
    /// "standard" | "uniform" | "optimized" | "explicit".
    pub mode: String,
    /// Interior thresholds for explicit mode, nonincreasing.
    pub values: Vec<f64>,
}

impl Default for BoundariesSection {
    fn default() -> Self {
        BoundariesSection {
            mode: "standard".into(),
            values: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// "snr_db" | "sub_len" | "n_r" | "n_p".
    pub axis: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McSection {
    pub packets: u64,
}

impl Default for McSection {
    fn default() -> Self {
        McSection { packets: 100_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizeSection {
    /// "delay" | "throughput".
    pub objective: String,
    /// "exhaustive" | "queen".
    pub method: String,
    pub grid_points: u32,
    pub queen_population: u32,
    pub queen_iterations: u32,
    pub queen_mutation_scale: f64,
    /// Error-probability target; sets the consumed power when present.
    pub beta: Option<f64>,
}

impl Default for OptimizeSection {
    fn default() -> Self {
        OptimizeSection {
            objective: "delay".into(),
            method: "exhaustive".into(),
            grid_points: 33,
            queen_population: 20,
            queen_iterations: 200,
            queen_mutation_scale: 0.05,
            beta: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PilotSection {
    pub n_p: u32,
    pub p_pilot: f64,
}

impl Default for PilotSection {
    fn default() -> Self {
        PilotSection {
            n_p: 1,
            p_pilot: 1.0,
        }
    }
}

fn one() -> f64 {
    1.0
}

/// Sweep axis after validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    SnrDb,
    SubLen,
    NR,
    NP,
}

impl SweepAxis {
    pub fn column_name(self) -> &'static str {
        match self {
            SweepAxis::SnrDb => "snr_db",
            SweepAxis::SubLen => "sub_len_cu",
            SweepAxis::NR => "n_r",
            SweepAxis::NP => "n_p",
        }
    }
}

/// One resolved sweep point: the link to evaluate and its consumed power.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub axis_value: f64,
    pub snr_db: f64,
    pub p_cons: f64,
    pub link: LinkSpec,
    pub n_p: u32,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| Error::domain(format!("config parse: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn fading_model(&self) -> Result<FadingModel> {
        match self.fading.model.as_str() {
            "rayleigh" => Ok(FadingModel::Rayleigh {
                omega: self.fading.omega,
            }),
            "rician" => Ok(FadingModel::Rician {
                k: self.fading.k,
                omega: self.fading.omega,
            }),
            other => Err(Error::domain(format!(
                "fading.model must be \"rayleigh\" or \"rician\", got \"{other}\""
            ))),
        }
    }

    pub fn sweep_axis(&self) -> Result<SweepAxis> {
        match self.sweep.axis.as_str() {
            "snr_db" => Ok(SweepAxis::SnrDb),
            "sub_len" => Ok(SweepAxis::SubLen),
            "n_r" => Ok(SweepAxis::NR),
            "n_p" => Ok(SweepAxis::NP),
            other => Err(Error::domain(format!(
                "sweep.axis must be one of snr_db | sub_len | n_r | n_p, got \"{other}\""
            ))),
        }
    }

    pub fn pa_config(&self) -> PaConfig {
        PaConfig {
            epsilon: self.pa.epsilon,
            theta: self.pa.theta,
            p_max: self
                .pa
                .p_max_db
                .map(|db| 10f64.powf(db / 10.0))
                .unwrap_or(f64::INFINITY),
        }
    }

    pub fn objective(&self) -> Result<Objective> {
        match self.optimize.objective.as_str() {
            "delay" => Ok(Objective::Delay),
            "throughput" => Ok(Objective::Throughput),
            other => Err(Error::domain(format!(
                "optimize.objective must be \"delay\" or \"throughput\", got \"{other}\""
            ))),
        }
    }

    pub fn optimize_spec(&self) -> Result<OptimizeSpec> {
        let spec = OptimizeSpec {
            objective: self.objective()?,
            grid_points: self.optimize.grid_points,
            queen_population: self.optimize.queen_population,
            queen_iterations: self.optimize.queen_iterations,
            queen_mutation_scale: self.optimize.queen_mutation_scale,
            seed: self.seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn pilot_model(&self) -> PilotModel {
        PilotModel {
            n_p: self.pilot.n_p,
            p_pilot: self.pilot.p_pilot,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.fading_model()?.validate()?;
        let axis = self.sweep_axis()?;
        if self.sweep.values.is_empty() {
            return Err(Error::domain("sweep.values must not be empty"));
        }
        match axis {
            SweepAxis::SubLen | SweepAxis::NR | SweepAxis::NP => {
                for &v in &self.sweep.values {
                    if !(v >= 1.0) || v.fract() != 0.0 {
                        return Err(Error::domain(format!(
                            "sweep values for {} must be positive integers, got {v}",
                            axis.column_name()
                        )));
                    }
                }
            }
            SweepAxis::SnrDb => {}
        }
        if self.link.n_r == 0 {
            return Err(Error::domain("link.n_r must be at least 1"));
        }
        self.pa_config().validate()?;
        self.base_harq().validate()?;
        match self.boundaries.mode.as_str() {
            "standard" | "uniform" | "optimized" => {}
            "explicit" => {
                if self.boundaries.values.len() != (self.harq.m_max - 1) as usize {
                    return Err(Error::domain(format!(
                        "explicit boundaries need exactly {} values",
                        self.harq.m_max - 1
                    )));
                }
                Boundaries::new(self.boundaries.values.clone())?;
            }
            other => {
                return Err(Error::domain(format!(
                    "boundaries.mode must be standard | uniform | optimized | explicit, got \"{other}\""
                )))
            }
        }
        self.objective()?;
        match self.optimize.method.as_str() {
            "exhaustive" | "queen" => {}
            other => {
                return Err(Error::domain(format!(
                    "optimize.method must be \"exhaustive\" or \"queen\", got \"{other}\""
                )))
            }
        }
        self.optimize_spec()?;
        if let Some(beta) = self.optimize.beta {
            if !(beta > 0.0 && beta < 1.0) {
                return Err(Error::domain("optimize.beta must be in (0, 1)"));
            }
            if axis == SweepAxis::SnrDb {
                return Err(Error::domain(
                    "an snr_db sweep conflicts with optimize.beta, which determines the power",
                ));
            }
        }
        if axis == SweepAxis::NP {
            self.pilot_model().validate()?;
        }
        Ok(())
    }

    fn base_harq(&self) -> HarqConfig {
        HarqConfig {
            m_max: self.harq.m_max,
            code: CodeSpec {
                info_nats: self.harq.info_nats,
                sub_len: self.harq.sub_len,
                third_order: self.harq.third_order,
            },
            feedback_delay: self.harq.feedback_delay,
            decode_delay: DecodeDelay::Linear {
                coeff: self.harq.decode_coeff,
            },
        }
    }

    /// Resolve the sweep into concrete links. The fading distribution is
    /// shared across points unless the antenna count sweeps.
    pub fn sweep_points(&self) -> Result<Vec<SweepPoint>> {
        let axis = self.sweep_axis()?;
        let model = self.fading_model()?;
        let pa = self.pa_config();
        let base_harq = self.base_harq();
        let shared_dist = match axis {
            SweepAxis::NR => None,
            _ => Some(SumGainDistribution::new(model, self.link.n_r)?),
        };
        self.sweep
            .values
            .iter()
            .map(|&v| {
                let mut harq = base_harq;
                let mut n_r = self.link.n_r;
                let mut snr_db = self.snr_db;
                let mut n_p = self.pilot.n_p;
                match axis {
                    SweepAxis::SnrDb => snr_db = v,
                    SweepAxis::SubLen => harq.code.sub_len = v as u32,
                    SweepAxis::NR => n_r = v as u32,
                    SweepAxis::NP => n_p = v as u32,
                }
                let dist = match &shared_dist {
                    Some(d) => d.clone(),
                    None => SumGainDistribution::new(model, n_r)?,
                };
                Ok(SweepPoint {
                    axis_value: v,
                    snr_db,
                    p_cons: 10f64.powf(snr_db / 10.0),
                    link: LinkSpec::new(dist, pa, harq)?,
                    n_p,
                })
            })
            .collect()
    }

    /// Stable hash of the run configuration with the seed zeroed, so reruns
    /// with a different seed are recognizably the same experiment.
    pub fn config_hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.seed = 0;
        let text = canonical.to_toml();
        let mut h: u64 = 0xcbf29ce484222325;
        for byte in text.as_bytes() {
            h ^= *byte as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        format!("{h:016x}")
    }
}
