//! Indistinguishability witnesses: output statistics in, lower bounds on the
//! full-block weight `c_n` out, with Hoeffding finite-size corrections.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::combinatorics::ModeOccupation;
use crate::engine::{Counts, OutputDistribution};
use crate::error::{Error, Result};
use crate::networks::{cyclic_class, hom_is_bunched, hom_threshold, FringeSign};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Fourier,
    Cyclic,
    Hom,
    Twomode,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Fourier, Method::Cyclic, Method::Hom, Method::Twomode];

    pub fn name(self) -> &'static str {
        match self {
            Method::Fourier => "fourier",
            Method::Cyclic => "cyclic",
            Method::Hom => "hom",
            Method::Twomode => "twomode",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Argument(format!("unknown witness method '{s}'")))
    }
}

/// What the input state has to satisfy for the bound to hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateRequirement {
    None,
    PartitionRepresentation,
    PositivePartition,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SemiDeviceIndependence {
    Proven,
    NumericalEvidence,
    No,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssumptionFlags {
    pub requires: StateRequirement,
    pub semi_device_independent: SemiDeviceIndependence,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyEntry {
    pub pattern: ModeOccupation,
    pub frequency: f64,
}

/// Pattern frequencies post-selected on `n` photons, either exact
/// probabilities or normalized counts.
#[derive(Clone, Debug, PartialEq)]
pub struct Frequencies {
    n: usize,
    m: usize,
    shots: Option<u64>,
    table: BTreeMap<ModeOccupation, f64>,
}

impl Frequencies {
    pub fn from_distribution(dist: &OutputDistribution<f64>) -> Self {
        Self {
            n: dist.photons(),
            m: dist.modes(),
            shots: None,
            table: dist.entries().iter().cloned().collect(),
        }
    }

    /// Normalizes the `n`-photon events of `counts`; other events are ignored.
    pub fn from_counts(n: usize, m: usize, counts: &Counts) -> Result<Self> {
        let mut table = BTreeMap::new();
        let mut total = 0u64;
        for (s, &k) in counts {
            if s.modes() != m {
                return Err(Error::Dimension(format!("pattern {s} has {} modes, expected {m}", s.modes())));
            }
            if s.photons() == n && k > 0 {
                total += k;
                table.insert(s.clone(), k);
            }
        }
        if total == 0 {
            return Err(Error::EmptyData { n });
        }
        Ok(Self {
            n,
            m,
            shots: Some(total),
            table: table.into_iter().map(|(s, k)| (s, k as f64 / total as f64)).collect(),
        })
    }

    pub fn photons(&self) -> usize {
        self.n
    }

    pub fn modes(&self) -> usize {
        self.m
    }

    /// Number of retained events, `None` for exact probabilities.
    pub fn shots(&self) -> Option<u64> {
        self.shots
    }

    pub fn get(&self, s: &ModeOccupation) -> f64 {
        self.table.get(s).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ModeOccupation, f64)> {
        self.table.iter().map(|(s, &f)| (s, f))
    }

    pub fn table(&self) -> Vec<FrequencyEntry> {
        self.iter()
            .map(|(s, f)| FrequencyEntry {
                pattern: s.clone(),
                frequency: f,
            })
            .collect()
    }

    /// `⟨n_i⟩`
    pub fn mean(&self, i: usize) -> f64 {
        self.iter().map(|(s, f)| s.counts()[i] as f64 * f).sum()
    }

    /// `⟨n_i n_j⟩`
    pub fn second_moment(&self, i: usize, j: usize) -> f64 {
        self.iter().map(|(s, f)| (s.counts()[i] * s.counts()[j]) as f64 * f).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub method: Method,
    pub n: usize,
    /// Raw estimate `c_n*`.
    pub c_raw: f64,
    /// Finite-size corrected bound, present when shots and `ε` are known.
    pub c_corrected: Option<f64>,
    pub shots: Option<u64>,
    pub epsilon: Option<f64>,
    pub kappa: f64,
    /// Intermediate quantities the estimate was built from.
    pub statistics: BTreeMap<String, f64>,
    pub flags: AssumptionFlags,
    pub frequencies: Vec<FrequencyEntry>,
}

impl WitnessReport {
    /// A non-positive estimate certifies nothing.
    pub fn is_trivial(&self) -> bool {
        self.c_corrected.unwrap_or(self.c_raw) <= 0.0
    }

    pub fn stat(&self, key: &str) -> Option<f64> {
        self.statistics.get(key).copied()
    }

    /// Fills in the corrected bound for `shots` samples at failure probability `epsilon`.
    pub fn corrected(mut self, shots: u64, epsilon: f64) -> Result<Self> {
        let c = match self.method {
            Method::Twomode => {
                let d = hoeffding_delta(shots, epsilon)?;
                let stat = |k: &str| self.statistics[k];
                twomode_lower(self.n, stat("n1"), stat("n2"), stat("n1n2"), stat("c_max"), d)
            }
            _ => finite_size_correction(self.c_raw, self.method, self.n, shots, epsilon)?,
        };
        if self.method == Method::Twomode {
            let d = hoeffding_delta(shots, epsilon)?;
            if d > 0.0 {
                self.kappa = (self.c_raw - c) / d;
            }
        }
        self.c_corrected = Some(c);
        self.shots = Some(shots);
        self.epsilon = Some(epsilon);
        Ok(self)
    }
}

/// Hoeffding deviation `√(ln(1/ε)/(2N))`.
pub fn hoeffding_delta(shots: u64, epsilon: f64) -> Result<f64> {
    if shots == 0 {
        return Err(Error::Argument("the sample size must be at least 1".into()));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Argument(format!("failure probability {epsilon} outside (0, 1]")));
    }
    Ok(((1.0 / epsilon).ln() / (2.0 * shots as f64)).sqrt())
}

/// Scalar statistical prefactor for `method` at `n` photons. The two-mode
/// witness is corrected at the moment level instead; its entry here is the
/// floor reached at vanishing mode means, exceeded by every real report.
pub fn kappa(method: Method, n: usize) -> f64 {
    let nf = n as f64;
    match method {
        Method::Fourier => nf / (nf - 1.0),
        Method::Cyclic => 2f64.powi(n as i32),
        Method::Hom => 2.0 * nf - 2.0,
        Method::Twomode => twomode_effective_kappa(n, 0.0, 0.0),
    }
}

/// `c_raw − κ δ(N, ε)`; for the two-mode witness use [`twomode_lower`] or
/// [`WitnessReport::corrected`], which need the moments.
pub fn finite_size_correction(c_raw: f64, method: Method, n: usize, shots: u64, epsilon: f64) -> Result<f64> {
    if method == Method::Twomode {
        return Err(Error::Argument(
            "the two-mode correction acts on the moments; use WitnessReport::corrected".into(),
        ));
    }
    Ok(c_raw - kappa(method, n) * hoeffding_delta(shots, epsilon)?)
}

/// Zero-transmission law for an `n`-mode Fourier interferometer.
pub fn ztl_valid(s: &ModeOccupation) -> Result<bool> {
    let n = s.photons();
    if s.modes() != n {
        return Err(Error::Argument(format!(
            "suppression law needs as many modes as photons, got {} modes for {n} photons",
            s.modes()
        )));
    }
    Ok(mode_weight(s).is_multiple_of(n))
}

fn mode_weight(s: &ModeOccupation) -> usize {
    s.counts().iter().enumerate().map(|(i, &c)| i * c).sum()
}

/// The only mode `j` in which adding a photon to `t` gives a valid pattern.
pub fn unique_completion_mode(t: &ModeOccupation) -> usize {
    let n = t.modes();
    (n - mode_weight(t) % n) % n
}

/// All ZTL-forbidden patterns of `n` photons in `n` modes.
pub fn forbidden_set(n: usize) -> Result<Vec<ModeOccupation>> {
    let mut out = Vec::new();
    for s in crate::combinatorics::enumerate_patterns(n, n)? {
        if !ztl_valid(&s)? {
            out.push(s);
        }
    }
    Ok(out)
}

fn report(
    method: Method,
    freqs: &Frequencies,
    c_raw: f64,
    kappa: f64,
    statistics: BTreeMap<String, f64>,
    flags: AssumptionFlags,
) -> WitnessReport {
    WitnessReport {
        method,
        n: freqs.photons(),
        c_raw,
        c_corrected: None,
        shots: freqs.shots(),
        epsilon: None,
        kappa,
        statistics,
        flags,
        frequencies: freqs.table(),
    }
}

fn stats<const K: usize>(pairs: [(&str, f64); K]) -> BTreeMap<String, f64> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// `c_n ≥ 1 − p_f/λ`, default `λ = (n−1)/n`.
pub fn fourier_witness(freqs: &Frequencies, lambda: Option<f64>) -> Result<WitnessReport> {
    let n = freqs.photons();
    if n < 2 {
        return Err(Error::Argument("the Fourier witness needs at least two photons".into()));
    }
    let lambda = lambda.unwrap_or((n as f64 - 1.0) / n as f64);
    if !(lambda > 0.0) {
        return Err(Error::Argument(format!("lambda must be positive, got {lambda}")));
    }
    let mut p_f = 0.0;
    for (s, f) in freqs.iter() {
        if !ztl_valid(s)? {
            p_f += f;
        }
    }
    let flags = AssumptionFlags {
        requires: StateRequirement::None,
        semi_device_independent: SemiDeviceIndependence::NumericalEvidence,
        notes: vec![
            "lambda = (n-1)/n is proven when at least one photon is orthogonal to all others and conjectured otherwise"
                .into(),
            "bounds the full-block weight of the twirled state".into(),
        ],
    };
    Ok(report(
        Method::Fourier,
        freqs,
        1.0 - p_f / lambda,
        1.0 / lambda,
        stats([("p_forbidden", p_f), ("lambda", lambda)]),
        flags,
    ))
}

/// `c* = (P₊ − P₋)/((P₊ + P₋) cos α)` over the eligible patterns of the cyclic network.
pub fn cyclic_witness(freqs: &Frequencies, alpha: f64) -> Result<WitnessReport> {
    let n = freqs.photons();
    if freqs.modes() != 2 * n {
        return Err(Error::Dimension(format!(
            "cyclic witness expects {} modes, got {}",
            2 * n,
            freqs.modes()
        )));
    }
    let cos = alpha.cos();
    if cos.abs() < 1e-12 {
        return Err(Error::UnusablePhase(alpha));
    }
    let (mut plus, mut minus) = (0.0, 0.0);
    for (s, f) in freqs.iter() {
        match cyclic_class(n, s) {
            Some(FringeSign::Plus) => plus += f,
            Some(FringeSign::Minus) => minus += f,
            None => {}
        }
    }
    let c_raw = if plus + minus > 0.0 {
        (plus - minus) / ((plus + minus) * cos)
    } else {
        0.0
    };
    let flags = AssumptionFlags {
        requires: StateRequirement::PartitionRepresentation,
        semi_device_independent: SemiDeviceIndependence::No,
        notes: vec!["pairs that are not cyclic neighbours do not enter the fringe".into()],
    };
    Ok(report(
        Method::Cyclic,
        freqs,
        c_raw,
        kappa(Method::Cyclic, n),
        stats([("p_plus", plus), ("p_minus", minus), ("alpha", alpha)]),
        flags,
    ))
}

/// `(p_b − p*)/(1 − p*) ≤ c_n ≤ 2p_b − 1`; `threshold` defaults to [`hom_threshold`].
pub fn hom_witness(freqs: &Frequencies, threshold: Option<f64>) -> Result<WitnessReport> {
    let n = freqs.photons();
    if n < 2 || freqs.modes() != 2 * (n - 1) {
        return Err(Error::Dimension(format!(
            "HOM witness expects {} modes for {n} photons, got {}",
            2 * n.max(1) - 2,
            freqs.modes()
        )));
    }
    let p_star = threshold.unwrap_or_else(|| hom_threshold(n));
    if !(0.0..1.0).contains(&p_star) {
        return Err(Error::Argument(format!("bunching threshold {p_star} outside [0, 1)")));
    }
    let p_b: f64 = freqs.iter().filter(|(s, _)| hom_is_bunched(n, s)).map(|(_, f)| f).sum();
    let flags = AssumptionFlags {
        requires: StateRequirement::PositivePartition,
        semi_device_independent: SemiDeviceIndependence::NumericalEvidence,
        notes: vec![],
    };
    Ok(report(
        Method::Hom,
        freqs,
        (p_b - p_star) / (1.0 - p_star),
        1.0 / (1.0 - p_star),
        stats([("p_bunched", p_b), ("threshold", p_star), ("upper_bound", 2.0 * p_b - 1.0)]),
        flags,
    ))
}

/// Maximal two-mode correlator for ideal photons, `1/4 − 1/(2n)`.
pub fn twomode_quantum_max(n: usize) -> f64 {
    0.25 - 0.5 / n as f64
}

/// Largest correlator reachable without `n`-photon interference; only `n = 3`
/// is pinned (value 0).
pub fn twomode_classical_max(n: usize) -> Option<f64> {
    (n == 3).then_some(0.0)
}

/// Moment-level finite-size bound: each moment is shifted by `δ` times its range.
pub fn twomode_lower(n: usize, n1: f64, n2: f64, n1n2: f64, c_max: f64, delta: f64) -> f64 {
    let nf = n as f64;
    let pair_range = ((n / 2) * n.div_ceil(2)) as f64;
    let c = n1n2 - pair_range * delta - (n1 + nf * delta) * (n2 + nf * delta);
    (c - c_max) / (twomode_quantum_max(n) - c_max)
}

/// `∂(c_raw − c_corrected)/∂δ` at `δ = 0`.
fn twomode_effective_kappa(n: usize, n1: f64, n2: f64) -> f64 {
    let nf = n as f64;
    let pair_range = ((n / 2) * n.div_ceil(2)) as f64;
    let c_max = twomode_classical_max(n).unwrap_or(0.0);
    (pair_range + nf * (n1 + n2)) / (twomode_quantum_max(n) - c_max)
}

/// `(C_{ij} − C_max)/(C_q − C_max)` from the empirical moments of modes `i`, `j`.
pub fn twomode_witness(freqs: &Frequencies, modes: (usize, usize), c_max: Option<f64>) -> Result<WitnessReport> {
    let n = freqs.photons();
    let (i, j) = modes;
    if i == j || i >= freqs.modes() || j >= freqs.modes() {
        return Err(Error::Argument(format!("invalid correlator modes ({i}, {j})")));
    }
    if n < 3 {
        return Err(Error::Unsupported("the two-mode witness needs at least three photons".into()));
    }
    let c_max = match c_max.or_else(|| twomode_classical_max(n)) {
        Some(c) => c,
        None => {
            return Err(Error::Unsupported(format!(
                "no classical correlator maximum is known for n = {n}; supply one explicitly"
            )))
        }
    };
    let (n1, n2, n1n2) = (freqs.mean(i), freqs.mean(j), freqs.second_moment(i, j));
    let corr = n1n2 - n1 * n2;
    let c_q = twomode_quantum_max(n);
    let flags = AssumptionFlags {
        requires: StateRequirement::PositivePartition,
        semi_device_independent: SemiDeviceIndependence::Proven,
        notes: vec!["whether the correlator itself needs a positive partition representation is open".into()],
    };
    Ok(report(
        Method::Twomode,
        freqs,
        (corr - c_max) / (c_q - c_max),
        twomode_effective_kappa(n, n1, n2),
        stats([
            ("correlator", corr),
            ("n1", n1),
            ("n2", n2),
            ("n1n2", n1n2),
            ("c_max", c_max),
            ("c_quantum", c_q),
        ]),
        flags,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distinguishability::{obb_model, GiVector, InternalModel};
    use crate::engine::{output_distribution, sample_counts, ExperimentSpec};
    use crate::networks::{cyclic_network, hom_network};
    use crate::unitaries::fourier_unitary;
    use approx::assert_abs_diff_eq;

    fn occ(v: &[usize]) -> ModeOccupation {
        ModeOccupation::new(v.to_vec())
    }

    #[test]
    fn ztl_examples() {
        assert!(ztl_valid(&occ(&[1, 1, 1])).unwrap());
        assert!(ztl_valid(&occ(&[3, 0, 0])).unwrap());
        assert!(!ztl_valid(&occ(&[2, 1, 0])).unwrap());
        assert!(ztl_valid(&occ(&[1, 1, 0, 0])).is_err());
        assert_eq!(unique_completion_mode(&occ(&[1, 1, 0])), 2);
        assert_eq!(unique_completion_mode(&occ(&[0, 0, 2])), 2);
        assert_eq!(unique_completion_mode(&occ(&[1, 0])), 0);
    }

    #[test]
    fn completion_gives_valid_pattern() {
        for n in 2..=5 {
            for t in crate::combinatorics::enumerate_patterns(n - 1, n).unwrap() {
                let j = unique_completion_mode(&t);
                let mut c = t.counts().to_vec();
                c[j] += 1;
                assert!(ztl_valid(&occ(&c)).unwrap());
                for k in (0..n).filter(|&k| k != j) {
                    let mut c = t.counts().to_vec();
                    c[k] += 1;
                    assert!(!ztl_valid(&occ(&c)).unwrap());
                }
            }
        }
    }

    #[test]
    fn delta_and_kappa() {
        assert_abs_diff_eq!(hoeffding_delta(5000, 0.1).unwrap(), 0.015174, epsilon = 1e-6);
        assert_eq!(hoeffding_delta(10, 1.0).unwrap(), 0.0);
        assert!(hoeffding_delta(10, 0.0).is_err());
        assert!(hoeffding_delta(0, 0.1).is_err());
        assert_eq!(kappa(Method::Fourier, 3), 1.5);
        assert_eq!(kappa(Method::Cyclic, 3), 8.0);
        assert_eq!(kappa(Method::Hom, 3), 4.0);
        assert_abs_diff_eq!(kappa(Method::Twomode, 3), 24.0, epsilon = 1e-12);
        assert!(finite_size_correction(1.0, Method::Twomode, 3, 10, 0.1).is_err());
    }

    #[test]
    fn fourier_on_obb() {
        let u = fourier_unitary::<f64>(3).unwrap();
        for eps in [0.0, 0.3, 1.0] {
            let spec = ExperimentSpec::new(
                u.clone(),
                occ(&[1, 1, 1]),
                InternalModel::PartitionMixture(obb_model(3, eps).unwrap()),
            )
            .unwrap();
            let r = fourier_witness(&Frequencies::from_distribution(&output_distribution(&spec).unwrap()), None)
                .unwrap();
            assert_abs_diff_eq!(r.c_raw, (1.0 - eps).powi(3), epsilon = 1e-12);
        }
        let f = Frequencies::from_distribution(&OutputDistribution::from_entries(3, 3, vec![(occ(&[2, 1, 0]), 1.0)]));
        assert!(fourier_witness(&f, Some(0.0)).is_err());
        assert_abs_diff_eq!(fourier_witness(&f, None).unwrap().c_raw, -0.5, epsilon = 1e-15);
    }

    #[test]
    fn cyclic_extremes() {
        let net = cyclic_network::<f64>(3, 0.0).unwrap();
        for (model, expect) in [
            (InternalModel::ideal(3).unwrap(), 1.0),
            (InternalModel::DirectGi(GiVector::distinguishable(3).unwrap()), 0.0),
        ] {
            let spec = ExperimentSpec::new(net.unitary().clone(), net.input(), model).unwrap();
            let f = Frequencies::from_distribution(&output_distribution(&spec).unwrap());
            assert_abs_diff_eq!(cyclic_witness(&f, 0.0).unwrap().c_raw, expect, epsilon = 1e-12);
        }
        let f = Frequencies::from_distribution(&OutputDistribution::from_entries(3, 6, vec![]));
        assert!(matches!(
            cyclic_witness(&f, std::f64::consts::FRAC_PI_2),
            Err(Error::UnusablePhase(_))
        ));
    }

    #[test]
    fn hom_extremes() {
        let net = hom_network::<f64>(3).unwrap();
        for (model, expect) in [
            (InternalModel::ideal(3).unwrap(), 1.0),
            (InternalModel::DirectGi(GiVector::distinguishable(3).unwrap()), -1.0),
        ] {
            let spec = ExperimentSpec::new(net.unitary().clone(), net.input(), model).unwrap();
            let r = hom_witness(&Frequencies::from_distribution(&output_distribution(&spec).unwrap()), None).unwrap();
            assert_abs_diff_eq!(r.c_raw, expect, epsilon = 1e-12);
            assert_eq!(r.kappa, 4.0);
        }
    }

    #[test]
    fn twomode_values() {
        let f = Frequencies::from_distribution(&OutputDistribution::from_entries(
            3,
            4,
            vec![(occ(&[1, 1, 1, 0]), 0.5), (occ(&[0, 0, 3, 0]), 0.5)],
        ));
        // ⟨n1⟩ = ⟨n2⟩ = 1/2, ⟨n1 n2⟩ = 1/2, C = 1/4
        let r = twomode_witness(&f, (0, 1), None).unwrap();
        assert_abs_diff_eq!(r.stat("correlator").unwrap(), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(r.c_raw, 3.0, epsilon = 1e-12);
        assert!(r.kappa > 24.0);
        let f4 = Frequencies::from_distribution(&OutputDistribution::from_entries(4, 4, vec![]));
        assert!(matches!(twomode_witness(&f4, (0, 1), None), Err(Error::Unsupported(_))));
        assert!(twomode_witness(&f4, (0, 1), Some(0.05)).is_ok());
    }

    #[test]
    fn twomode_moment_correction_matches_closed_form() {
        let (n1, n2, n1n2, d) = (0.4, 0.5, 0.3, 0.01);
        let expect = 12.0 * (n1n2 - 2.0 * d - (n1 + 3.0 * d) * (n2 + 3.0 * d));
        assert_abs_diff_eq!(twomode_lower(3, n1, n2, n1n2, 0.0, d), expect, epsilon = 1e-14);
    }

    #[test]
    fn counts_and_correction() {
        let u = fourier_unitary::<f64>(3).unwrap();
        let spec = ExperimentSpec::new(
            u,
            occ(&[1, 1, 1]),
            InternalModel::PartitionMixture(obb_model(3, 0.1).unwrap()),
        )
        .unwrap();
        let mut counts = sample_counts(&spec, 5000, 3).unwrap();
        let f = Frequencies::from_counts(3, 3, &counts).unwrap();
        assert_eq!(f.shots(), Some(5000));
        let r = fourier_witness(&f, None).unwrap().corrected(5000, 0.1).unwrap();
        let c = r.c_corrected.unwrap();
        assert_abs_diff_eq!(r.c_raw - c, 1.5 * hoeffding_delta(5000, 0.1).unwrap(), epsilon = 1e-14);
        counts.insert(occ(&[1, 1, 0]), 7);
        assert_eq!(Frequencies::from_counts(3, 3, &counts).unwrap().shots(), Some(5000));
        assert!(matches!(
            Frequencies::from_counts(3, 3, &Counts::from([(occ(&[1, 0, 0]), 4)])),
            Err(Error::EmptyData { .. })
        ));
    }

    #[test]
    fn report_json_round_trip() {
        let f = Frequencies::from_distribution(&OutputDistribution::from_entries(3, 3, vec![(occ(&[1, 1, 1]), 1.0)]));
        let r = fourier_witness(&f, None).unwrap().corrected(1000, 0.05).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        assert!(text.contains("\"method\":\"fourier\""));
        assert_eq!(serde_json::from_str::<WitnessReport>(&text).unwrap(), r);
    }
}
