//! The TOML experiment schema. Unknown keys are rejected everywhere.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use vrjp_core::environment::{KernelChoice, SampleConfig};

use crate::error::{LabError, LabResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    /// One independent task per seed; results are merged in seed order.
    pub seeds: Vec<u64>,
    /// CSV destination; the JSON mirror goes next to it.
    #[serde(default)]
    pub output: Option<PathBuf>,
    pub model: ModelSpec,
    #[serde(default)]
    pub sampler: SamplerSpec,
    pub experiment: ExperimentSpec,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    /// Long-range weights `W̄ · log-envelope(|i-j|_∞)` on `[0, 2^N)^d`.
    Euclidean { d: usize, levels: Vec<u32>, wbar: f64, alpha: f64 },
    /// Nearest-neighbour weights `W̄` on boxes of the given sides around
    /// `(center, …, center)`, optionally plus `scale · r^{-exponent}`.
    Highdim {
        d: usize,
        sides: Vec<i64>,
        wbar: f64,
        #[serde(default)]
        center: Option<i64>,
        #[serde(default)]
        long_range: Option<PowerLaw>,
    },
    /// The minimal hierarchical model on `2^N` leaves.
    Hierarchical { levels: Vec<usize>, wbar_h: f64, alpha: f64 },
    /// A graph file in the `vertices` / `edge` / `pin` line format, relative
    /// to the working directory.
    Graph { path: PathBuf },
    /// Random connected wired graphs.
    Random {
        count: usize,
        max_vertices: usize,
        weight_range: [f64; 2],
        #[serde(default = "default_extra_edges")]
        extra_edge_probability: f64,
        #[serde(default)]
        graph_seed: u64,
    },
}

fn default_extra_edges() -> f64 {
    0.4
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PowerLaw {
    pub scale: f64,
    pub exponent: f64,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum KernelName {
    #[default]
    Componentwise,
    Preconditioned,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SamplerSpec {
    pub sweeps: usize,
    pub burn_in: usize,
    pub thinning: usize,
    pub step_scale: f64,
    pub kernel: KernelName,
}

impl Default for SamplerSpec {
    fn default() -> Self {
        let base = SampleConfig::default();
        SamplerSpec {
            sweeps: 20_000,
            burn_in: base.burn_in,
            thinning: base.thinning,
            step_scale: base.step_scale,
            kernel: KernelName::Componentwise,
        }
    }
}

impl SamplerSpec {
    pub fn to_core(self) -> SampleConfig {
        SampleConfig {
            sweeps: self.sweeps,
            burn_in: self.burn_in,
            thinning: self.thinning,
            step_scale: self.step_scale,
            tilt: None,
            kernel: match self.kernel {
                KernelName::Componentwise => KernelChoice::Componentwise,
                KernelName::Preconditioned => KernelChoice::Preconditioned,
            },
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExperimentSpec {
    /// `E[e^{σ m u_i}]` against the model's constant.
    MomentBounds {
        m: Vec<f64>,
        #[serde(default = "both_signs")]
        sigma: Vec<f64>,
        /// Defaults to every vertex.
        #[serde(default)]
        vertices: Option<Vec<usize>>,
        /// Overrides the model constant; required for graph models.
        #[serde(default)]
        bound: Option<f64>,
    },
    /// Mean of `Π B_e^{m} det(I - M𝒢)` with a uniform exponent per run.
    WardScan { m: Vec<f64> },
    /// `K_x`, nested-box resistances and annealed visits to the start.
    TransienceBound {
        walks_per_seed: usize,
        #[serde(default = "holder_order")]
        moment_order: f64,
        /// Draws of the tilted environment for the empirical `K_x`; 0 skips it.
        #[serde(default)]
        kx_draws: usize,
    },
    /// Skeleton path laws of the VRJP and the annealed walk, and a quenched
    /// visit identity.
    VrjpEquivalence {
        samples_per_seed: usize,
        #[serde(default = "default_jumps")]
        jumps: usize,
        #[serde(default)]
        start: usize,
        #[serde(default = "default_tv")]
        tv_threshold: f64,
    },
    /// Annuli flow energy against its closed-form bound.
    FlowEnergy,
    /// `E_{W⁺}[e^{σ m u_i}] ≤ E_{W⁻}[e^{σ m u_i}]` on dominated pairs.
    Monotonicity {
        m: Vec<f64>,
        #[serde(default = "negative_sign")]
        sigma: Vec<f64>,
        /// `W⁻ = scale · W⁺`; the Euclidean model uses its hierarchical partner.
        #[serde(default = "default_scale")]
        scale: f64,
        #[serde(default)]
        vertices: Option<Vec<usize>>,
    },
}

fn both_signs() -> Vec<f64> {
    vec![-1.0, 1.0]
}

fn negative_sign() -> Vec<f64> {
    vec![-1.0]
}

fn holder_order() -> f64 {
    vrjp_core::transience::HOLDER_ORDER
}

fn default_jumps() -> usize {
    3
}

fn default_tv() -> f64 {
    0.02
}

fn default_scale() -> f64 {
    0.5
}

impl ExperimentSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ExperimentSpec::MomentBounds { .. } => "moment_bounds",
            ExperimentSpec::WardScan { .. } => "ward_scan",
            ExperimentSpec::TransienceBound { .. } => "transience_bound",
            ExperimentSpec::VrjpEquivalence { .. } => "vrjp_equivalence",
            ExperimentSpec::FlowEnergy => "flow_energy",
            ExperimentSpec::Monotonicity { .. } => "monotonicity",
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> LabResult<Self> {
        let config: ExperimentConfig = toml::from_str(text)?;
        config.check()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> LabResult<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Checks that do not need the model to be built.
    fn check(&self) -> LabResult<()> {
        let bad = |msg: String| Err(LabError::Config(msg));
        if self.version != SCHEMA_VERSION {
            return bad(format!("version {} is not supported (expected {SCHEMA_VERSION})", self.version));
        }
        if self.seeds.is_empty() {
            return bad("`seeds` must list at least one seed".into());
        }
        let s = &self.sampler;
        if s.thinning == 0 || s.sweeps == 0 || !(s.step_scale > 0.0) {
            return bad("sampler needs sweeps ≥ 1, thinning ≥ 1 and step_scale > 0".into());
        }
        match &self.experiment {
            ExperimentSpec::MomentBounds { m, sigma, .. } | ExperimentSpec::Monotonicity { m, sigma, .. } => {
                if m.is_empty() || m.iter().any(|&x| !(x >= 1.0)) {
                    return bad("moment orders `m` must be ≥ 1".into());
                }
                if sigma.is_empty() || sigma.iter().any(|x| x.abs() != 1.0) {
                    return bad("`sigma` entries must be ±1".into());
                }
            }
            ExperimentSpec::WardScan { m } => {
                if m.is_empty() || m.iter().any(|&x| !(x >= 0.0)) {
                    return bad("ward_scan `m` entries must be ≥ 0".into());
                }
            }
            ExperimentSpec::TransienceBound {
                walks_per_seed,
                moment_order,
                ..
            } => {
                if *walks_per_seed == 0 || !(*moment_order >= 1.0) {
                    return bad("transience_bound needs walks_per_seed ≥ 1 and moment_order ≥ 1".into());
                }
            }
            ExperimentSpec::VrjpEquivalence {
                samples_per_seed,
                jumps,
                tv_threshold,
                ..
            } => {
                if *samples_per_seed == 0 || *jumps == 0 || !(*tv_threshold > 0.0) {
                    return bad("vrjp_equivalence needs samples_per_seed, jumps and tv_threshold positive".into());
                }
            }
            ExperimentSpec::FlowEnergy => {}
        }
        if let ExperimentSpec::Monotonicity { scale, .. } = &self.experiment {
            if !(*scale > 0.0 && *scale <= 1.0) {
                return bad(format!("monotonicity scale {scale} must lie in (0, 1]"));
            }
        }
        Ok(())
    }
}
