use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::ensembles::{driving_left_neighbour, driving_zero, LocalFunction};
use crate::observables::Thresholds;
use crate::she::Scheme;
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// 𝔡 ≡ 0.
    Zero,
    /// 𝔡[η] = η₋₁.
    LeftNeighbour,
}

/// A named driving function or an explicit lookup table on {−r..r}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(untagged)]
pub enum DrivingSpec {
    Preset(Preset),
    Table { radius: usize, table: Vec<f64> },
}

impl Default for DrivingSpec {
    fn default() -> Self {
        DrivingSpec::Preset(Preset::LeftNeighbour)
    }
}

impl std::fmt::Display for DrivingSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DrivingSpec::Preset(Preset::Zero) => f.write_str("zero"),
            DrivingSpec::Preset(Preset::LeftNeighbour) => f.write_str("left-neighbour"),
            DrivingSpec::Table { radius, .. } => write!(f, "table-r{radius}"),
        }
    }
}

impl DrivingSpec {
    pub fn build(&self) -> Result<LocalFunction> {
        match self {
            DrivingSpec::Preset(Preset::Zero) => Ok(driving_zero()),
            DrivingSpec::Preset(Preset::LeftNeighbour) => Ok(driving_left_neighbour()),
            DrivingSpec::Table { radius, table } => LocalFunction::driving(*radius, table.clone()),
        }
    }
}

fn zero() -> DrivingSpec {
    DrivingSpec::Preset(Preset::Zero)
}

fn d_n128() -> usize {
    128
}
fn d_n256() -> usize {
    256
}
fn d_one() -> f64 {
    1.0
}
fn d_true() -> bool {
    true
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ConstantsParams {
    #[serde(default = "d_n128")]
    pub n: usize,
    #[serde(default = "zero")]
    pub driving: DrivingSpec,
    /// Apply the flatness adjustment before computing the constants.
    #[serde(default)]
    pub flatten: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "kebab-case")]
pub enum InitialKind {
    Flat,
    Uniform,
}

fn d_flat() -> InitialKind {
    InitialKind::Flat
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SimulateParams {
    #[serde(default = "d_n128")]
    pub n: usize,
    #[serde(default)]
    pub driving: DrivingSpec,
    #[serde(default = "d_one")]
    pub alpha: f64,
    #[serde(default = "d_one")]
    pub horizon: f64,
    /// Times at which heights are written; the horizon is always included.
    #[serde(default)]
    pub record_times: Vec<f64>,
    #[serde(default = "d_flat")]
    pub initial: InitialKind,
    /// Also write one binary trajectory file per replica.
    #[serde(default)]
    pub write_trajectories: bool,
    /// Replicas whose full height profiles go to the CSV; the summary uses all replicas.
    #[serde(default = "d_profile_replicas")]
    pub profile_replicas: usize,
}

fn d_profile_replicas() -> usize {
    8
}

fn d_duality_ns() -> Vec<usize> {
    vec![16, 64]
}
fn d_duality_drivings() -> Vec<DrivingSpec> {
    vec![zero(), DrivingSpec::default()]
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct DualityParams {
    #[serde(default = "d_duality_ns")]
    pub ns: Vec<usize>,
    #[serde(default = "d_duality_drivings")]
    pub drivings: Vec<DrivingSpec>,
    /// Relative tolerance used for the pass flag.
    #[serde(default = "d_duality_tol")]
    pub tolerance: f64,
}

fn d_duality_tol() -> f64 {
    1e-9
}

fn d_block() -> usize {
    2
}
fn d_oracle_ring() -> usize {
    7
}
fn d_oracle_n() -> usize {
    64
}
fn d_oracle_replicas() -> usize {
    10_000
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct KvParams {
    #[serde(default = "d_n256")]
    pub n: usize,
    /// Defaults to N^{−4/3}.
    #[serde(default)]
    pub tau: Option<f64>,
    /// Size of 𝕃 (odd); defaults to the odd integer nearest N^{1/3+0.1}.
    #[serde(default)]
    pub ring: Option<usize>,
    #[serde(default = "d_block")]
    pub block_len: usize,
    #[serde(default)]
    pub driving: DrivingSpec,
    #[serde(default = "d_oracle_ring")]
    pub oracle_ring: usize,
    #[serde(default = "d_oracle_n")]
    pub oracle_n: usize,
    #[serde(default = "d_oracle_replicas")]
    pub oracle_replicas: usize,
}

fn d_i2() -> usize {
    4
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Kv2Params {
    #[serde(default = "d_n256")]
    pub n: usize,
    #[serde(default)]
    pub tau: Option<f64>,
    #[serde(default)]
    pub ring: Option<usize>,
    /// |𝕀₁|, support of the fluctuating factor.
    #[serde(default = "d_block")]
    pub i1_len: usize,
    /// |𝕀₂|, support of the bounded factor.
    #[serde(default = "d_i2")]
    pub i2_len: usize,
    #[serde(default)]
    pub driving: DrivingSpec,
}

fn d_blocks() -> usize {
    64
}
fn d_azuma_block() -> usize {
    3
}
fn d_ks() -> Vec<f64> {
    vec![1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0]
}
fn d_exact_ring() -> usize {
    9
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct AzumaParams {
    #[serde(default = "d_blocks")]
    pub blocks: usize,
    #[serde(default = "d_azuma_block")]
    pub block_len: usize,
    #[serde(default = "d_ks")]
    pub ks: Vec<f64>,
    /// Ring used for the exact conditional-expectation check.
    #[serde(default = "d_exact_ring")]
    pub exact_ring: usize,
}

fn d_rings() -> Vec<usize> {
    vec![5, 7, 9]
}
fn d_n32() -> usize {
    32
}
fn d_instances() -> usize {
    1000
}
fn d_entropy_ns() -> Vec<usize> {
    vec![32, 64]
}
fn d_densities() -> usize {
    5
}
fn d_resolvent_rings() -> Vec<usize> {
    vec![5, 7]
}
fn d_resolvent_ns() -> Vec<usize> {
    vec![32, 256]
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ExactSuiteParams {
    #[serde(default = "d_rings")]
    pub rings: Vec<usize>,
    #[serde(default = "d_n32")]
    pub n: usize,
    #[serde(default)]
    pub driving: DrivingSpec,
    /// Random instances of the entropy inequality.
    #[serde(default = "d_instances")]
    pub instances: usize,
    #[serde(default = "d_entropy_ns")]
    pub entropy_ns: Vec<usize>,
    /// Random initial densities per N in the entropy-production sweep.
    #[serde(default = "d_densities")]
    pub densities: usize,
    #[serde(default = "d_resolvent_rings")]
    pub resolvent_rings: Vec<usize>,
    #[serde(default = "d_resolvent_ns")]
    pub resolvent_ns: Vec<usize>,
    /// Random right-hand sides per (ring, N, λ).
    #[serde(default = "d_densities")]
    pub functions: usize,
}

fn d_kernel_ns() -> Vec<usize> {
    vec![16, 64, 256]
}
fn d_half() -> f64 {
    0.5
}
fn d_mc_n() -> usize {
    64
}
fn d_mc_t() -> f64 {
    0.01
}
fn d_points() -> usize {
    9
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct HeatKernelParams {
    #[serde(default = "d_kernel_ns")]
    pub ns: Vec<usize>,
    #[serde(default = "d_half")]
    pub dbar: f64,
    /// Ring size for the dense matrix exponential comparison.
    #[serde(default = "d_expm_n")]
    pub expm_n: usize,
    #[serde(default = "d_points")]
    pub grid_points: usize,
    #[serde(default = "d_mc_n")]
    pub mc_n: usize,
    #[serde(default = "d_mc_t")]
    pub mc_t: f64,
}

fn d_expm_n() -> usize {
    16
}

fn d_bg_ns() -> Vec<usize> {
    vec![32, 64, 128]
}
fn d_frames() -> usize {
    64
}
fn d_grid_replicas() -> usize {
    2
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct BgDecayParams {
    #[serde(default = "d_bg_ns")]
    pub ns: Vec<usize>,
    #[serde(default)]
    pub driving: DrivingSpec,
    #[serde(default = "d_one")]
    pub horizon: f64,
    /// Recorded frames per unit time; the Duhamel integral is evaluated on this grid.
    #[serde(default = "d_frames")]
    pub frames_per_unit: usize,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default = "d_true")]
    pub clip: bool,
    /// Replicas (per N) written to the Υ grid CSV.
    #[serde(default = "d_grid_replicas")]
    pub grid_replicas: usize,
}

fn d_half_width() -> usize {
    3
}
fn d_eps() -> f64 {
    0.1
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct CouplingParams {
    #[serde(default = "d_n256")]
    pub n: usize,
    /// ℓ, with |𝕃| = 2ℓ+1.
    #[serde(default = "d_half_width")]
    pub half_width: usize,
    #[serde(default = "d_eps")]
    pub epsilon: f64,
    #[serde(default)]
    pub tau: Option<f64>,
    #[serde(default)]
    pub driving: DrivingSpec,
    /// Stop each replica when the first discrepancy enters 𝕃.
    #[serde(default = "d_true")]
    pub stop_on_entry: bool,
}

fn d_times() -> Vec<f64> {
    vec![0.25, 0.5, 1.0]
}
fn d_lags() -> Vec<usize> {
    vec![1, 2, 4, 8]
}
fn d_dt() -> f64 {
    1e-4
}
fn d_factor() -> usize {
    2
}
fn d_semi() -> Scheme {
    Scheme::SemiImplicit
}
fn d_substeps() -> usize {
    16
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct KpzCompareParams {
    #[serde(default = "d_bg_ns")]
    pub ns: Vec<usize>,
    /// SHE grid points per particle site.
    #[serde(default = "d_factor")]
    pub grid_factor: usize,
    #[serde(default = "d_dt")]
    pub dt: f64,
    #[serde(default = "d_semi")]
    pub scheme: Scheme,
    #[serde(default = "d_times")]
    pub times: Vec<f64>,
    /// Covariance lags in particle lattice units.
    #[serde(default = "d_lags")]
    pub lags: Vec<usize>,
    #[serde(default = "zero")]
    pub driving: DrivingSpec,
    #[serde(default = "d_flat")]
    pub initial: InitialKind,
    /// Recorded intervals per unit time, used by the martingale diagnostic.
    #[serde(default = "d_substeps")]
    pub frames_per_unit: usize,
}

fn d_reg_frames() -> usize {
    512
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct RegularityParams {
    #[serde(default = "d_n128")]
    pub n: usize,
    #[serde(default)]
    pub driving: DrivingSpec,
    #[serde(default = "d_one")]
    pub horizon: f64,
    /// The time modulus compares frames at most 1/N apart, so this should exceed N.
    #[serde(default = "d_reg_frames")]
    pub frames_per_unit: usize,
    #[serde(default)]
    pub thresholds: Thresholds,
}

macro_rules! serde_default {
    ($($t:ty),*) => {$(
        impl Default for $t {
            fn default() -> Self {
                serde_json::from_value(serde_json::Value::Object(Default::default())).expect("every field has a default")
            }
        }
    )*};
}

serde_default!(
    ConstantsParams,
    SimulateParams,
    DualityParams,
    KvParams,
    Kv2Params,
    AzumaParams,
    ExactSuiteParams,
    HeatKernelParams,
    BgDecayParams,
    CouplingParams,
    KpzCompareParams,
    RegularityParams
);
