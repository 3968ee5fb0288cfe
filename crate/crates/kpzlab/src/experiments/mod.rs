//! JSON-configured experiments with deterministic seeding and CSV/JSON output.
//!
//! A run is split into [`prepare`], which parses and validates everything and touches no
//! files, and [`Plan::execute`], which computes and writes. Each kind also exposes a typed
//! entry point returning its outcome, for use from Rust.

mod analytic;
mod exact;
mod output;
mod params;
mod particle;
mod pool;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub use analytic::{constants, duality, heatkernel_verify, ConstantsOutcome, DualityCase, DualityOutcome, HeatKernelOutcome, KernelCase};
pub use exact::{
    azuma, exact_suite, kv, kv2, AzumaOutcome, EntropyCase, ExactSuiteOutcome, Kv2Outcome, KvOracleCheck, KvOutcome,
};
pub use output::{read_csv, read_json, Meta, Outcome, Table};
pub use params::*;
pub use particle::{
    bg_decay, coupling, kpz_compare, regularity, simulate, BgDecayOutcome, BgLevel, CouplingOutcome, KpzLevel,
    KpzOutcome, RegularityOutcome, SimulateOutcome, TimeSummary,
};
pub use pool::Pool;

use crate::{Error, Result};

/// Environment variable consulted for the thread count when neither the flag nor the spec sets it.
pub const THREADS_ENV: &str = "KPZLAB_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Constants,
    Simulate,
    Duality,
    Kv,
    Kv2,
    Azuma,
    ExactSuite,
    HeatkernelVerify,
    BgDecay,
    Coupling,
    KpzCompare,
    Regularity,
}

impl Kind {
    pub const ALL: [Kind; 12] = [
        Kind::Constants,
        Kind::Simulate,
        Kind::Duality,
        Kind::Kv,
        Kind::Kv2,
        Kind::Azuma,
        Kind::ExactSuite,
        Kind::HeatkernelVerify,
        Kind::BgDecay,
        Kind::Coupling,
        Kind::KpzCompare,
        Kind::Regularity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Constants => "constants",
            Kind::Simulate => "simulate",
            Kind::Duality => "duality",
            Kind::Kv => "kv",
            Kind::Kv2 => "kv2",
            Kind::Azuma => "azuma",
            Kind::ExactSuite => "exact-suite",
            Kind::HeatkernelVerify => "heatkernel-verify",
            Kind::BgDecay => "bg-decay",
            Kind::Coupling => "coupling",
            Kind::KpzCompare => "kpz-compare",
            Kind::Regularity => "regularity",
        }
    }

    /// Replica count used when the spec does not give one.
    pub fn default_replicas(self) -> usize {
        match self {
            Kind::Constants | Kind::Duality | Kind::ExactSuite => 1,
            Kind::Simulate => 2000,
            Kind::Kv | Kind::Kv2 | Kind::Coupling => 10_000,
            Kind::Azuma => 20_000,
            Kind::HeatkernelVerify => 100_000,
            Kind::BgDecay => 500,
            Kind::KpzCompare => 4000,
            Kind::Regularity => 200,
        }
    }

    /// JSON schema of the `parameters` object.
    pub fn parameter_schema(self) -> Value {
        let schema = match self {
            Kind::Constants => schemars::schema_for!(ConstantsParams),
            Kind::Simulate => schemars::schema_for!(SimulateParams),
            Kind::Duality => schemars::schema_for!(DualityParams),
            Kind::Kv => schemars::schema_for!(KvParams),
            Kind::Kv2 => schemars::schema_for!(Kv2Params),
            Kind::Azuma => schemars::schema_for!(AzumaParams),
            Kind::ExactSuite => schemars::schema_for!(ExactSuiteParams),
            Kind::HeatkernelVerify => schemars::schema_for!(HeatKernelParams),
            Kind::BgDecay => schemars::schema_for!(BgDecayParams),
            Kind::Coupling => schemars::schema_for!(CouplingParams),
            Kind::KpzCompare => schemars::schema_for!(KpzCompareParams),
            Kind::Regularity => schemars::schema_for!(RegularityParams),
        };
        serde_json::to_value(schema).expect("schemas serialize")
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Validation(format!("unknown experiment kind `{s}`")))
    }
}

fn empty_object() -> Value {
    Value::Object(Default::default())
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub kind: Kind,
    /// Kind-specific object; see [`Kind::parameter_schema`].
    #[serde(default = "empty_object")]
    pub parameters: Value,
    #[serde(default)]
    pub replicas: Option<usize>,
    #[serde(default)]
    pub master_seed: u64,
    /// Output directory.
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub threads: Option<usize>,
}

impl ExperimentSpec {
    pub fn new(kind: Kind) -> Self {
        ExperimentSpec { kind, parameters: empty_object(), replicas: None, master_seed: 0, output_path: None, threads: None }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Validation(format!("experiment spec: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Validation(format!("cannot read spec {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    /// SHA-256 of the spec with `threads` removed, over serde_json's sorted-key encoding.
    pub fn hash(&self) -> String {
        let mut value = serde_json::to_value(self).expect("spec serializes");
        if let Value::Object(map) = &mut value {
            map.remove("threads");
        }
        let digest = Sha256::digest(value.to_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Values given on the command line, which take precedence over the spec.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out_dir: Option<PathBuf>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug)]
pub enum Params {
    Constants(ConstantsParams),
    Simulate(SimulateParams),
    Duality(DualityParams),
    Kv(KvParams),
    Kv2(Kv2Params),
    Azuma(AzumaParams),
    ExactSuite(ExactSuiteParams),
    HeatkernelVerify(HeatKernelParams),
    BgDecay(BgDecayParams),
    Coupling(CouplingParams),
    KpzCompare(KpzCompareParams),
    Regularity(RegularityParams),
}

fn parse<T: serde::de::DeserializeOwned>(kind: Kind, v: &Value) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| Error::Validation(format!("{kind} parameters: {e}")))
}

impl Params {
    pub fn parse(kind: Kind, v: &Value) -> Result<Self> {
        if !v.is_object() {
            return Err(Error::Validation(format!("{kind} parameters must be a JSON object")));
        }
        Ok(match kind {
            Kind::Constants => Params::Constants(parse(kind, v)?),
            Kind::Simulate => Params::Simulate(parse(kind, v)?),
            Kind::Duality => Params::Duality(parse(kind, v)?),
            Kind::Kv => Params::Kv(parse(kind, v)?),
            Kind::Kv2 => Params::Kv2(parse(kind, v)?),
            Kind::Azuma => Params::Azuma(parse(kind, v)?),
            Kind::ExactSuite => Params::ExactSuite(parse(kind, v)?),
            Kind::HeatkernelVerify => Params::HeatkernelVerify(parse(kind, v)?),
            Kind::BgDecay => Params::BgDecay(parse(kind, v)?),
            Kind::Coupling => Params::Coupling(parse(kind, v)?),
            Kind::KpzCompare => Params::KpzCompare(parse(kind, v)?),
            Kind::Regularity => Params::Regularity(parse(kind, v)?),
        })
    }
}

/// Replica count, master seed and worker pool shared by the typed entry points.
#[derive(Clone, Debug)]
pub struct Context {
    pub replicas: usize,
    pub seed: u64,
    pub pool: Pool,
}

impl Context {
    pub fn new(replicas: usize, seed: u64, threads: usize) -> Self {
        Context { replicas, seed, pool: Pool::new(threads) }
    }

    /// Independent master seed for a named sub-experiment.
    pub fn sub_seed(&self, tag: &str) -> u64 {
        sub_seed(self.seed, tag)
    }
}

pub fn sub_seed(master: u64, tag: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(tag.as_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("eight bytes"))
}

/// A validated run, ready to execute.
#[derive(Clone, Debug)]
pub struct Plan {
    pub kind: Kind,
    pub params: Params,
    pub context: Context,
    pub out_dir: PathBuf,
    pub meta: Meta,
}

/// Thread count from the override, then the spec, then `KPZLAB_THREADS`, then 1.
pub fn resolve_threads(flag: Option<usize>, spec: Option<usize>) -> Result<usize> {
    let threads = match flag.or(spec) {
        Some(t) => t,
        None => match std::env::var(THREADS_ENV) {
            Ok(s) => s.trim().parse().map_err(|_| Error::Validation(format!("{THREADS_ENV}={s} is not a count")))?,
            Err(_) => 1,
        },
    };
    if threads == 0 {
        return Err(Error::Validation("thread count must be positive".into()));
    }
    Ok(threads)
}

pub fn prepare(spec: &ExperimentSpec, overrides: &Overrides) -> Result<Plan> {
    let params = Params::parse(spec.kind, &spec.parameters)?;
    let replicas = spec.replicas.unwrap_or_else(|| spec.kind.default_replicas());
    if replicas == 0 {
        return Err(Error::Validation("replicas must be positive".into()));
    }
    let threads = resolve_threads(overrides.threads, spec.threads)?;
    let seed = overrides.seed.unwrap_or(spec.master_seed);
    let out_dir = overrides.out_dir.clone().or_else(|| spec.output_path.clone()).unwrap_or_else(|| PathBuf::from("results"));
    let meta = Meta {
        kind: spec.kind,
        spec_sha256: spec.hash(),
        master_seed: seed,
        replicas,
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    Ok(Plan { kind: spec.kind, params, context: Context::new(replicas, seed, threads), out_dir, meta })
}

impl Plan {
    /// Runs the experiment and writes its files, returning their paths.
    ///
    /// A kind whose checks fail still writes its results and then reports a numeric abort.
    pub fn execute(&self) -> Result<Vec<PathBuf>> {
        let ctx = &self.context;
        match &self.params {
            Params::Constants(p) => self.emit(&constants(p)?),
            Params::Simulate(p) => self.emit(&simulate(p, ctx)?),
            Params::Duality(p) => self.emit(&duality(p)?),
            Params::Kv(p) => self.emit(&kv(p, ctx)?),
            Params::Kv2(p) => self.emit(&kv2(p, ctx)?),
            Params::Azuma(p) => self.emit(&azuma(p, ctx)?),
            Params::ExactSuite(p) => {
                let outcome = exact_suite(p, ctx)?;
                let files = self.emit(&outcome)?;
                if !outcome.passed {
                    return Err(Error::Numeric(format!(
                        "exact suite checks failed; results in {}",
                        self.out_dir.display()
                    )));
                }
                Ok(files)
            }
            Params::HeatkernelVerify(p) => self.emit(&heatkernel_verify(p, ctx)?),
            Params::BgDecay(p) => self.emit(&bg_decay(p, ctx)?),
            Params::Coupling(p) => self.emit(&coupling(p, ctx)?),
            Params::KpzCompare(p) => self.emit(&kpz_compare(p, ctx)?),
            Params::Regularity(p) => self.emit(&regularity(p, ctx)?),
        }
    }

    fn emit<O: Outcome>(&self, outcome: &O) -> Result<Vec<PathBuf>> {
        output::write_outcome(&self.out_dir, &self.meta, outcome)
    }
}

/// Validates and runs a spec.
pub fn run(spec: &ExperimentSpec, overrides: &Overrides) -> Result<Vec<PathBuf>> {
    prepare(spec, overrides)?.execute()
}
