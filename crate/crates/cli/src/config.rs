//! Scenario configuration documents.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use loqc_core::certify::Setting;
use loqc_core::combinatorics::ModeOccupation;
use loqc_core::distinguishability::{obb_model, time_delay_gram, GiVector, InternalModel};
use loqc_core::networks::{cyclic_network, hom_network};
use loqc_core::studies::{
    gram3, CountsOptions, FidelityDemoParams, PartitionStudyParams, PerturbationParams, WitnessCompareParams,
};
use loqc_core::unitaries::{fourier_unitary, haar_random, Unitary};
use serde::{Deserialize, Serialize};

/// One JSON document per run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScenarioConfig {
    #[serde(flatten)]
    pub scenario: Scenario,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "scenario", rename_all = "kebab-case")]
pub enum Scenario {
    WitnessCompare(WitnessCompareParams),
    PerturbStudy(PerturbationParams),
    PartitionStudy(PartitionStudyParams),
    FidelityDemo(FidelityDemoParams),
    CountsCertify(CountsCertifyParams),
    Simulate(SimulateParams),
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::WitnessCompare(_) => "witness-compare",
            Scenario::PerturbStudy(_) => "perturb-study",
            Scenario::PartitionStudy(_) => "partition-study",
            Scenario::FidelityDemo(_) => "fidelity-demo",
            Scenario::CountsCertify(_) => "counts-certify",
            Scenario::Simulate(_) => "simulate",
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct CountsCertifyParams {
    pub rev: Option<PathBuf>,
    pub witness: Option<PathBuf>,
    /// Target interferometer, see [`parse_unitary`].
    pub target: Option<String>,
    pub accept_above: Option<f64>,
    #[serde(flatten)]
    pub options: CountsOptions,
}

/// Internal-state shorthands.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    Ideal { n: usize },
    Distinguishable { n: usize },
    Obb { n: usize, epsilon: f64 },
    TimeDelay { delays: Vec<f64> },
    Overlaps { x12: f64, x13: f64, x23: f64 },
    Explicit { model: InternalModel<f64> },
}

impl ModelSpec {
    pub fn build(&self) -> anyhow::Result<InternalModel<f64>> {
        Ok(match self {
            ModelSpec::Ideal { n } => InternalModel::ideal(*n)?,
            ModelSpec::Distinguishable { n } => InternalModel::DirectGi(GiVector::distinguishable(*n)?),
            ModelSpec::Obb { n, epsilon } => InternalModel::PartitionMixture(obb_model(*n, *epsilon)?),
            ModelSpec::TimeDelay { delays } => InternalModel::PureProduct(time_delay_gram(delays)?),
            ModelSpec::Overlaps { x12, x13, x23 } => InternalModel::PureProduct(gram3([*x12, *x13, *x23])?),
            ModelSpec::Explicit { model } => model.clone(),
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulateParams {
    pub modes: usize,
    pub unitary: String,
    /// Input occupation; the first `n` modes when absent.
    pub input: Option<Vec<usize>>,
    pub model: ModelSpec,
    pub shots: u64,
    pub seed: u64,
    /// Setting label written into the exported count file.
    pub setting: Option<Setting>,
    pub certification: Option<SimulatedCertification>,
}

impl Default for SimulateParams {
    fn default() -> Self {
        Self {
            modes: 3,
            unitary: "fourier".into(),
            input: None,
            model: ModelSpec::Obb { n: 3, epsilon: 0.1 },
            shots: 0,
            seed: 1,
            setting: None,
            certification: None,
        }
    }
}

/// Closed-loop certification run on top of `simulate`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulatedCertification {
    pub target: String,
    pub device_perturbation: f64,
    pub device_seed: u64,
    pub epsilon: f64,
    pub epsilon_split: f64,
    pub accept_above: Option<f64>,
}

impl Default for SimulatedCertification {
    fn default() -> Self {
        Self {
            target: "haar:100".into(),
            device_perturbation: 0.0,
            device_seed: 1,
            epsilon: 0.1,
            epsilon_split: 0.5,
            accept_above: None,
        }
    }
}

/// `fourier`, `identity`, `haar:<seed>`, `cyclic:<alpha>`, `hom`, `file:<path>`,
/// or a bare path to a unitary JSON file.
pub fn parse_unitary(spec: &str, n: usize, m: usize) -> anyhow::Result<Unitary<f64>> {
    let (head, arg) = match spec.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (spec, None),
    };
    let u = match (head, arg) {
        ("fourier", None) => fourier_unitary(m)?,
        ("identity", None) => Unitary::identity(m),
        ("haar", Some(seed)) => haar_random(m, seed.parse().with_context(|| format!("haar seed {seed:?}"))?)?,
        ("cyclic", Some(alpha)) => {
            cyclic_network(n, alpha.parse().with_context(|| format!("cyclic phase {alpha:?}"))?)?.unitary().clone()
        }
        ("hom", None) => hom_network(n)?.unitary().clone(),
        ("file", Some(path)) => read_unitary(Path::new(path))?,
        _ if Path::new(spec).is_file() => read_unitary(Path::new(spec))?,
        _ => bail!("unknown unitary spec {spec:?}"),
    };
    if u.dim() != m {
        bail!("unitary {spec:?} has {} modes, expected {m}", u.dim());
    }
    Ok(u)
}

fn read_unitary(path: &Path) -> anyhow::Result<Unitary<f64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing unitary {}", path.display()))
}

impl SimulateParams {
    pub fn input(&self, n: usize) -> anyhow::Result<ModeOccupation> {
        Ok(match &self.input {
            Some(v) => ModeOccupation::new(v.clone()),
            None => ModeOccupation::first_modes(n, self.modes)?,
        })
    }
}

pub fn load(path: &Path) -> anyhow::Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}
