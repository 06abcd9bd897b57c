//! Scenario computations shared by the command-line runner and the tests.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certify::{
    certify_with_witness, reference_fidelity, reference_pattern, reversal_distribution, ActualMap, Certificate,
    Estimate, IngestedCounts, Setting, Theorem,
};
use crate::combinatorics::{ModeOccupation, SetPartition};
use crate::distinguishability::{
    obb_model, time_delay_gram, GramMatrix, InternalModel, PartitionMixture, PartitionStatus,
};
use crate::engine::{output_distribution, sample_distribution, Counts, ExperimentSpec};
use crate::error::{Error, Result};
use crate::lattice::conventional_order_3;
use crate::networks::{cyclic_network, hom_network, CyclicNetwork, HomNetwork};
use crate::search::find_umax;
use crate::unitaries::{fourier_unitary, haar_random, perturb, Unitary};
use crate::witnesses::{
    cyclic_witness, fourier_witness, hom_witness, twomode_witness, Frequencies, Method, WitnessReport,
};

/// Tolerance for matching a recorded interferometer program.
pub const PROGRAM_TOL: f64 = 1e-9;

/// Knobs shared by all witness evaluations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WitnessOptions {
    pub alpha: f64,
    pub lambda: Option<f64>,
    pub hom_threshold: Option<f64>,
    pub twomode_cmax: Option<f64>,
    pub twomode_modes: (usize, usize),
    pub umax_seed: u64,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        Self {
            alpha: 0.0,
            lambda: None,
            hom_threshold: None,
            twomode_cmax: None,
            twomode_modes: (0, 1),
            umax_seed: 7,
        }
    }
}

/// Sampling settings; `None` in [`WitnessBench::evaluate`] means exact distributions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sampling {
    pub shots: u64,
    pub seed: u64,
    pub epsilon: f64,
}

/// The four witness interferometers for a fixed photon number.
#[derive(Clone, Debug)]
pub struct WitnessBench {
    n: usize,
    options: WitnessOptions,
    fourier: Unitary<f64>,
    cyclic: CyclicNetwork<f64>,
    hom: HomNetwork<f64>,
    twomode: Option<Unitary<f64>>,
}

impl WitnessBench {
    /// Builds every network; the two-mode interferometer only where a search is set up.
    pub fn new(n: usize, options: WitnessOptions) -> Result<Self> {
        let twomode = match find_umax(n, options.umax_seed) {
            Ok(u) => Some(u),
            Err(Error::Unsupported(_)) => None,
            Err(e) => return Err(e),
        };
        Ok(Self {
            n,
            fourier: fourier_unitary(n)?,
            cyclic: cyclic_network(n, options.alpha)?,
            hom: hom_network(n)?,
            twomode,
            options,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn options(&self) -> &WitnessOptions {
        &self.options
    }

    pub fn methods(&self) -> Vec<Method> {
        Method::ALL
            .into_iter()
            .filter(|&m| m != Method::Twomode || self.twomode.is_some())
            .collect()
    }

    pub fn unitary(&self, method: Method) -> Result<&Unitary<f64>> {
        Ok(match method {
            Method::Fourier => &self.fourier,
            Method::Cyclic => self.cyclic.unitary(),
            Method::Hom => self.hom.unitary(),
            Method::Twomode => self
                .twomode
                .as_ref()
                .ok_or_else(|| Error::Unsupported(format!("no two-mode interferometer for n = {}", self.n)))?,
        })
    }

    pub fn input(&self, method: Method) -> Result<ModeOccupation> {
        match method {
            Method::Fourier => ModeOccupation::first_modes(self.n, self.n),
            Method::Cyclic => Ok(self.cyclic.input()),
            Method::Hom => Ok(self.hom.input()),
            Method::Twomode => ModeOccupation::first_modes(self.n, self.unitary(method)?.dim()),
        }
    }

    /// Output frequencies of `internal` through the network, or through
    /// `device` standing in for it.
    pub fn frequencies(
        &self,
        method: Method,
        internal: &InternalModel<f64>,
        device: Option<&Unitary<f64>>,
        sampling: Option<Sampling>,
    ) -> Result<Frequencies> {
        let u = device.unwrap_or(self.unitary(method)?);
        let spec = ExperimentSpec::new(u.clone(), self.input(method)?, internal.clone())?;
        let dist = output_distribution(&spec)?;
        match sampling {
            None => Ok(Frequencies::from_distribution(&dist)),
            Some(s) => {
                let counts = sample_distribution(&dist, s.shots, s.seed);
                Frequencies::from_counts(self.n, u.dim(), &counts)
            }
        }
    }

    pub fn witness(&self, method: Method, freqs: &Frequencies) -> Result<WitnessReport> {
        let o = &self.options;
        match method {
            Method::Fourier => fourier_witness(freqs, o.lambda),
            Method::Cyclic => cyclic_witness(freqs, o.alpha),
            Method::Hom => hom_witness(freqs, o.hom_threshold),
            Method::Twomode => twomode_witness(freqs, o.twomode_modes, o.twomode_cmax),
        }
    }

    /// Witness report, finite-size corrected when sampled.
    pub fn evaluate(
        &self,
        method: Method,
        internal: &InternalModel<f64>,
        device: Option<&Unitary<f64>>,
        sampling: Option<Sampling>,
    ) -> Result<WitnessReport> {
        let r = self.witness(method, &self.frequencies(method, internal, device, sampling)?)?;
        match sampling {
            Some(s) => r.corrected(s.shots, s.epsilon),
            None => Ok(r),
        }
    }
}


/// Independent sub-seed for `(base, path…)` via SplitMix64 finalization.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    let mix = |mut z: u64| {
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    };
    path.iter().fold(mix(base), |acc, &k| mix(acc ^ k.wrapping_add(0x9e37_79b9_7f4a_7c15)))
}

fn status_name(s: PartitionStatus) -> &'static str {
    match s {
        PartitionStatus::Positive => "positive",
        PartitionStatus::Negative => "negative",
        PartitionStatus::None => "none",
    }
}

fn sampling(shots: u64, seed: u64, epsilon: f64) -> Option<Sampling> {
    (shots > 0).then_some(Sampling { shots, seed, epsilon })
}

// ---------------------------------------------------------------- witness comparison

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WitnessCompareParams {
    /// Base overlaps `(x₁₂, x₁₃, x₂₃)`; grid point `s` uses `x^s`.
    pub base_overlaps: [f64; 3],
    pub exponents: Vec<f64>,
    pub shots: u64,
    pub epsilon: f64,
    pub seed: u64,
    pub witness: WitnessOptions,
}

impl Default for WitnessCompareParams {
    fn default() -> Self {
        Self {
            base_overlaps: [0.98, 0.94, 0.91],
            exponents: (0..20).map(f64::from).collect(),
            shots: 0,
            epsilon: 0.1,
            seed: 1,
            witness: WitnessOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessCompareRow {
    pub point: usize,
    pub exponent: f64,
    pub x12: f64,
    pub x13: f64,
    pub x23: f64,
    pub cyclic_overlap: f64,
    pub true_c: f64,
    pub partition: String,
    pub fourier_raw: f64,
    pub fourier_corrected: Option<f64>,
    pub cyclic_raw: f64,
    pub cyclic_corrected: Option<f64>,
    pub hom_raw: f64,
    pub hom_corrected: Option<f64>,
    pub twomode_raw: f64,
    pub twomode_corrected: Option<f64>,
    pub shots: u64,
    pub epsilon: f64,
    pub seed: u64,
    pub model: String,
}

/// Real three-photon Gram matrix from `(x₁₂, x₁₃, x₂₃)`.
pub fn gram3(x: [f64; 3]) -> Result<GramMatrix<f64>> {
    GramMatrix::from_real_overlaps(3, &[(0, 1, x[0]), (0, 2, x[1]), (1, 2, x[2])])
}

pub fn run_witness_compare(bench: &WitnessBench, params: &WitnessCompareParams) -> Result<Vec<WitnessCompareRow>> {
    if bench.n() != 3 || bench.methods().len() != 4 {
        return Err(Error::Unsupported("the witness comparison runs at n = 3".into()));
    }
    if params.exponents.is_empty() {
        return Err(Error::Argument("empty exponent grid".into()));
    }
    params
        .exponents
        .par_iter()
        .enumerate()
        .map(|(point, &s)| {
            let x = params.base_overlaps.map(|b| b.powf(s));
            let model = InternalModel::PureProduct(gram3(x)?);
            let mut out = [(0.0, None); 4];
            for (k, m) in Method::ALL.into_iter().enumerate() {
                let seed = derive_seed(params.seed, &[point as u64, k as u64]);
                let r = bench.evaluate(m, &model, None, sampling(params.shots, seed, params.epsilon))?;
                out[k] = (r.c_raw, r.c_corrected);
            }
            Ok(WitnessCompareRow {
                point,
                exponent: s,
                x12: x[0],
                x13: x[1],
                x23: x[2],
                cyclic_overlap: x[0] * x[1] * x[2],
                true_c: model.true_coefficient()?,
                partition: status_name(model.partition_status()).into(),
                fourier_raw: out[0].0,
                fourier_corrected: out[0].1,
                cyclic_raw: out[1].0,
                cyclic_corrected: out[1].1,
                hom_raw: out[2].0,
                hom_corrected: out[2].1,
                twomode_raw: out[3].0,
                twomode_corrected: out[3].1,
                shots: params.shots,
                epsilon: params.epsilon,
                seed: params.seed,
                model: format!(
                    "gram x12={} x13={} x23={} exponent={s}",
                    params.base_overlaps[0], params.base_overlaps[1], params.base_overlaps[2]
                ),
            })
        })
        .collect()
}

// ---------------------------------------------------------------- perturbation study

/// `c·(1,2,3) + (1−c)·(1)(2,3)`: two photons identical, the third orthogonal
/// to both, mixed with a small fully indistinguishable part.
pub fn pair_dominated_state(c: f64) -> Result<InternalModel<f64>> {
    let pair = SetPartition::new(3, vec![vec![0], vec![1, 2]])?;
    Ok(InternalModel::PartitionMixture(PartitionMixture::new(
        3,
        &[(SetPartition::full(3), c), (pair, 1.0 - c)],
    )?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PerturbationParams {
    pub state: InternalModel<f64>,
    pub perturbations: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub witness: WitnessOptions,
}

impl Default for PerturbationParams {
    fn default() -> Self {
        Self {
            state: pair_dominated_state(0.05).expect("valid weights"),
            perturbations: vec![0.0, 0.05, 0.1],
            trials: 500,
            seed: 1,
            tolerance: 1e-6,
            witness: WitnessOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationRow {
    pub method: Method,
    pub perturbation: f64,
    pub trial: usize,
    pub device_seed: u64,
    pub c_raw: f64,
    pub true_c: f64,
    pub overshoot: bool,
    pub seed: u64,
    pub model: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OvershootSummary {
    pub method: Method,
    pub perturbation: f64,
    pub trials: usize,
    pub overshoots: usize,
    pub rate: f64,
    pub max_excess: f64,
}

pub fn run_perturbation_study(
    bench: &WitnessBench,
    params: &PerturbationParams,
) -> Result<(Vec<PerturbationRow>, Vec<OvershootSummary>)> {
    if params.perturbations.is_empty() || params.trials == 0 {
        return Err(Error::Argument("empty perturbation grid".into()));
    }
    let true_c = params.state.true_coefficient()?;
    let model = serde_json::to_string(&params.state)?;
    let mut jobs = Vec::new();
    for (k, m) in bench.methods().into_iter().enumerate() {
        for (e, &eps) in params.perturbations.iter().enumerate() {
            for t in 0..params.trials {
                jobs.push((k, m, e, eps, t));
            }
        }
    }
    let rows: Vec<PerturbationRow> = jobs
        .par_iter()
        .map(|&(_, m, e, eps, t)| {
            // the same device seeds for every witness keeps the comparison paired
            let device_seed = derive_seed(params.seed, &[e as u64, t as u64]);
            let u = perturb(bench.unitary(m)?, eps, device_seed)?;
            let r = bench.evaluate(m, &params.state, Some(&u), None)?;
            Ok(PerturbationRow {
                method: m,
                perturbation: eps,
                trial: t,
                device_seed,
                c_raw: r.c_raw,
                true_c,
                overshoot: r.c_raw > true_c + params.tolerance,
                seed: params.seed,
                model: model.clone(),
            })
        })
        .collect::<Result<_>>()?;
    let mut summary = Vec::new();
    for m in bench.methods() {
        for &eps in &params.perturbations {
            let sel: Vec<&PerturbationRow> =
                rows.iter().filter(|r| r.method == m && r.perturbation == eps).collect();
            let overshoots = sel.iter().filter(|r| r.overshoot).count();
            summary.push(OvershootSummary {
                method: m,
                perturbation: eps,
                trials: sel.len(),
                overshoots,
                rate: overshoots as f64 / sel.len() as f64,
                max_excess: sel.iter().map(|r| r.c_raw - r.true_c).fold(f64::NEG_INFINITY, f64::max),
            });
        }
    }
    Ok((rows, summary))
}

// ---------------------------------------------------------------- partition study

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PartitionStudyParams {
    pub taus: Vec<f64>,
    pub witness: WitnessOptions,
}

impl Default for PartitionStudyParams {
    fn default() -> Self {
        Self {
            taus: (0..=20).map(|k| k as f64 * 0.1).collect(),
            witness: WitnessOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionRow {
    pub tau: f64,
    /// Weights in the order `(1,2)(3), (1,3)(2), (2,3)(1), (1,2,3), (1)(2)(3)`.
    pub w_12_3: f64,
    pub w_13_2: f64,
    pub w_23_1: f64,
    pub w_123: f64,
    pub w_1_2_3: f64,
    pub negative: bool,
    pub true_c: f64,
    pub fourier_raw: f64,
    pub cyclic_raw: f64,
    pub hom_raw: f64,
    pub hom_upper: f64,
    pub twomode_raw: f64,
    pub hom_overshoot: bool,
    pub model: String,
}

/// Delays `(0, τ, −τ)` on three photons.
pub fn time_delay_state(tau: f64) -> Result<InternalModel<f64>> {
    Ok(InternalModel::PureProduct(time_delay_gram(&[0.0, tau, -tau])?))
}

pub fn run_partition_study(bench: &WitnessBench, params: &PartitionStudyParams) -> Result<Vec<PartitionRow>> {
    if bench.n() != 3 || bench.methods().len() != 4 {
        return Err(Error::Unsupported("the partition study runs at n = 3".into()));
    }
    if params.taus.is_empty() {
        return Err(Error::Argument("empty delay grid".into()));
    }
    let order = conventional_order_3();
    params
        .taus
        .par_iter()
        .map(|&tau| {
            let model = time_delay_state(tau)?;
            let p = model.partition_representation()?;
            let w: Vec<f64> = order.iter().map(|q| p.weight(q)).collect::<Result<_>>()?;
            let true_c = model.true_coefficient()?;
            let raw = |m| bench.evaluate(m, &model, None, None);
            let hom = raw(Method::Hom)?;
            Ok(PartitionRow {
                tau,
                w_12_3: w[0],
                w_13_2: w[1],
                w_23_1: w[2],
                w_123: w[3],
                w_1_2_3: w[4],
                negative: p.has_negative(1e-12),
                true_c,
                fourier_raw: raw(Method::Fourier)?.c_raw,
                cyclic_raw: raw(Method::Cyclic)?.c_raw,
                hom_raw: hom.c_raw,
                hom_upper: hom.stat("upper_bound").unwrap_or(f64::NAN),
                twomode_raw: raw(Method::Twomode)?.c_raw,
                hom_overshoot: hom.c_raw > true_c,
                model: format!("time delays (0, {tau}, -{tau})"),
            })
        })
        .collect()
}

// ---------------------------------------------------------------- fidelity demo

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FidelityDemoParams {
    pub photons: usize,
    pub modes: usize,
    pub targets: usize,
    pub target_seed: u64,
    pub source_epsilons: Vec<f64>,
    /// Strength of the device error `U_target · exp(η log H)`; 0 for a perfect device.
    pub device_perturbation: f64,
    pub shots: u64,
    pub epsilon: f64,
    pub repetitions: usize,
    pub seed: u64,
    pub epsilon_split: f64,
}

impl Default for FidelityDemoParams {
    fn default() -> Self {
        Self {
            photons: 3,
            modes: 4,
            targets: 12,
            target_seed: 100,
            source_epsilons: vec![0.0, 0.05, 0.1, 0.2],
            device_perturbation: 0.05,
            shots: 100_000,
            epsilon: 0.1,
            repetitions: 1,
            seed: 1,
            epsilon_split: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityRow {
    pub target: usize,
    pub target_seed: u64,
    pub device_seed: u64,
    pub source_epsilon: f64,
    pub repetition: usize,
    pub p1: f64,
    pub c_fourier: f64,
    pub delta1: f64,
    pub xi: f64,
    pub threshold: f64,
    pub reference_fidelity: f64,
    pub sound: bool,
    pub shots: u64,
    pub epsilon: f64,
    pub seed: u64,
    pub model: String,
}

/// One simulated certification run: reversal counts, source-side Fourier
/// counts and the resulting certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulatedRun {
    pub rev_counts: Option<Counts>,
    pub witness_counts: Option<Counts>,
    pub certificate: Certificate,
}

/// Thm. 3 certification of a simulated source and device; exact when `shots = 0`.
#[allow(clippy::too_many_arguments)]
pub fn simulate_certification(
    target: &Unitary<f64>,
    actual: &ActualMap,
    source: &InternalModel<f64>,
    shots: u64,
    seed: u64,
    epsilon: f64,
    split: f64,
) -> Result<SimulatedRun> {
    let n = source.n();
    let fourier = fourier_unitary::<f64>(n)?;
    let rev_dist = reversal_distribution(target, actual, source)?;
    let wit_spec = ExperimentSpec::new(fourier, ModeOccupation::first_modes(n, n)?, source.clone())?;
    let wit_dist = output_distribution(&wit_spec)?;
    let one = reference_pattern(n, target.dim())?;
    if shots == 0 {
        let w = fourier_witness(&Frequencies::from_distribution(&wit_dist), None)?;
        let cert = certify_with_witness(Theorem::Source, Estimate::exact(rev_dist.probability(&one)), &w, epsilon, split)?;
        return Ok(SimulatedRun {
            rev_counts: None,
            witness_counts: None,
            certificate: cert,
        });
    }
    let rev_counts = sample_distribution(&rev_dist, shots, derive_seed(seed, &[0]));
    let witness_counts = sample_distribution(&wit_dist, shots, derive_seed(seed, &[1]));
    let certificate = certify_counts(target, &rev_counts, n, &witness_counts, &fourier_unitary(n)?, Setting::Fourier, &CountsOptions {
        epsilon,
        epsilon_split: split,
        witness: WitnessOptions::default(),
    })?;
    Ok(SimulatedRun {
        rev_counts: Some(rev_counts),
        witness_counts: Some(witness_counts),
        certificate,
    })
}

pub fn run_fidelity_demo(params: &FidelityDemoParams) -> Result<(Vec<FidelityRow>, Vec<Certificate>)> {
    let (n, m) = (params.photons, params.modes);
    if params.targets == 0 || params.source_epsilons.is_empty() || params.repetitions == 0 {
        return Err(Error::Argument("empty fidelity-demo grid".into()));
    }
    let mut jobs = Vec::new();
    for t in 0..params.targets {
        for (e, &eps) in params.source_epsilons.iter().enumerate() {
            for r in 0..params.repetitions {
                jobs.push((t, e, eps, r));
            }
        }
    }
    let results: Vec<(FidelityRow, Certificate)> = jobs
        .par_iter()
        .map(|&(t, e, eps, r)| {
            let target_seed = params.target_seed + t as u64;
            let target = haar_random::<f64>(m, target_seed)?;
            let device_seed = derive_seed(params.seed, &[t as u64]);
            let actual = ActualMap::Unitary(perturb(&target, params.device_perturbation, device_seed)?);
            let source = InternalModel::PartitionMixture(obb_model(n, eps)?);
            let run_seed = derive_seed(params.seed, &[t as u64, e as u64, r as u64]);
            let run = simulate_certification(
                &target,
                &actual,
                &source,
                params.shots,
                run_seed,
                params.epsilon,
                params.epsilon_split,
            )?;
            let reference = reference_fidelity(&target, &actual, &source)?;
            let c = &run.certificate;
            let row = FidelityRow {
                target: t,
                target_seed,
                device_seed,
                source_epsilon: eps,
                repetition: r,
                p1: c.p1.value,
                c_fourier: c.second.value,
                delta1: c.delta1,
                xi: c.delta2,
                threshold: c.threshold,
                reference_fidelity: reference,
                sound: c.threshold <= reference,
                shots: params.shots,
                epsilon: params.epsilon,
                seed: params.seed,
                model: format!("obb n={n} eps={eps} device_perturbation={}", params.device_perturbation),
            };
            Ok((row, run.certificate))
        })
        .collect::<Result<_>>()?;
    Ok(results.into_iter().unzip())
}

// ---------------------------------------------------------------- certification from counts

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CountsOptions {
    pub epsilon: f64,
    pub epsilon_split: f64,
    pub witness: WitnessOptions,
}

impl Default for CountsOptions {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            epsilon_split: 0.5,
            witness: WitnessOptions::default(),
        }
    }
}

fn same_program(a: &Unitary<f64>, b: &Unitary<f64>) -> bool {
    a.dim() == b.dim() && a.distance(b) <= PROGRAM_TOL
}

/// Which theorem a witness program supports, and the frequencies the
/// witness should see.
fn witness_topology(
    target: &Unitary<f64>,
    n: usize,
    counts: &Counts,
    program: &Unitary<f64>,
    setting: Setting,
    options: &WitnessOptions,
) -> Result<(Theorem, Frequencies)> {
    let mismatch = |what: &str| {
        Error::Consistency(format!("{setting:?} counts were not taken under {what}"))
    };
    let direct = |expected: &Unitary<f64>, what: &str| -> Result<(Theorem, Frequencies)> {
        if !same_program(program, expected) {
            return Err(mismatch(what));
        }
        Ok((Theorem::Source, Frequencies::from_counts(n, program.dim(), counts)?))
    };
    match setting {
        Setting::Rev => Err(Error::Consistency("a reversal table cannot serve as the witness setting".into())),
        Setting::Fourier => {
            let f = fourier_unitary::<f64>(n)?;
            if same_program(program, &f) {
                return Ok((Theorem::Source, Frequencies::from_counts(n, n, counts)?));
            }
            let m = target.dim();
            let after = target.adjoint().then(&f.direct_sum(&Unitary::identity(m - n)))?;
            if !same_program(program, &after) {
                return Err(mismatch("the Fourier transform, alone or after the target reversal"));
            }
            // keep events confined to the first n modes
            let mut inner = Counts::new();
            for (s, &k) in counts {
                if s.photons() == n && s.counts()[n..].iter().all(|&c| c == 0) {
                    inner.insert(ModeOccupation::new(s.counts()[..n].to_vec()), k);
                }
            }
            Ok((Theorem::Witness, Frequencies::from_counts(n, n, &inner)?))
        }
        Setting::Cyclic => direct(cyclic_network::<f64>(n, options.alpha)?.unitary(), "the cyclic network"),
        Setting::Hom => direct(hom_network::<f64>(n)?.unitary(), "the HOM network"),
        Setting::Twomode => {
            if program.dim() != n + 1 {
                return Err(mismatch("an (n+1)-mode correlator interferometer"));
            }
            Ok((Theorem::Source, Frequencies::from_counts(n, program.dim(), counts)?))
        }
    }
}

/// Certificate from a reversal table (taken under `U_target†`) and one witness table.
pub fn certify_counts(
    target: &Unitary<f64>,
    rev_counts: &Counts,
    n: usize,
    witness_counts: &Counts,
    witness_program: &Unitary<f64>,
    setting: Setting,
    options: &CountsOptions,
) -> Result<Certificate> {
    let m = target.dim();
    let rev = Frequencies::from_counts(n, m, rev_counts)?;
    let p1 = Estimate::sampled(rev.get(&reference_pattern(n, m)?), rev.shots().expect("from counts"));
    let (theorem, freqs) = witness_topology(target, n, witness_counts, witness_program, setting, &options.witness)?;
    let bench_free = |f: &Frequencies| match setting {
        Setting::Fourier => fourier_witness(f, options.witness.lambda),
        Setting::Cyclic => cyclic_witness(f, options.witness.alpha),
        Setting::Hom => hom_witness(f, options.witness.hom_threshold),
        Setting::Twomode => twomode_witness(f, options.witness.twomode_modes, options.witness.twomode_cmax),
        Setting::Rev => unreachable!("rejected by witness_topology"),
    };
    let w = bench_free(&freqs)?;
    let mut cert = certify_with_witness(theorem, p1, &w, options.epsilon, options.epsilon_split)?;
    if setting == Setting::Twomode {
        cert.assumptions.push("two-mode counts accepted from any interferometer".into());
    }
    Ok(cert)
}

/// [`certify_counts`] on ingested files, checking that they fit together.
pub fn certify_ingested(
    target: &Unitary<f64>,
    rev: &IngestedCounts,
    witness: &IngestedCounts,
    options: &CountsOptions,
) -> Result<Certificate> {
    if rev.setting != Setting::Rev {
        return Err(Error::Consistency(format!("expected a rev table, got {:?}", rev.setting)));
    }
    if rev.m != target.dim() || !same_program(&rev.unitary, &target.adjoint()) {
        return Err(Error::Consistency("rev counts were not taken under the target reversal".into()));
    }
    if rev.n != witness.n {
        return Err(Error::Consistency(format!(
            "photon numbers differ between settings: {} vs {}",
            rev.n, witness.n
        )));
    }
    certify_counts(target, &rev.counts, rev.n, &witness.counts, &witness.unitary, witness.setting, options)
}
