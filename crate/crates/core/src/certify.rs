//! Photon reversibility and the three LOQC fidelity thresholds.

use serde::{Deserialize, Serialize};

use crate::combinatorics::ModeOccupation;
use crate::distinguishability::{symmetric_weight, InternalModel, PartitionStatus};
use crate::engine::{output_distribution, ExperimentSpec, OutputDistribution};
use crate::error::{Error, Result};
use crate::unitaries::Unitary;
use crate::witnesses::{hoeffding_delta, Method, WitnessReport};

pub use crate::counts::{export_counts, ingest_counts, CountEvent, CountFile, IngestedCounts, Setting};

/// The interferometer that was actually applied: one unitary, or a convex
/// mixture of unitaries acting on external modes only.
#[derive(Clone, Debug)]
pub enum ActualMap {
    Unitary(Unitary<f64>),
    Mixture(Vec<(f64, Unitary<f64>)>),
}

impl ActualMap {
    fn components(&self) -> Vec<(f64, &Unitary<f64>)> {
        match self {
            ActualMap::Unitary(u) => vec![(1.0, u)],
            ActualMap::Mixture(parts) => parts.iter().map(|(w, u)| (*w, u)).collect(),
        }
    }

    fn validate(&self, m: usize) -> Result<()> {
        let parts = self.components();
        if parts.is_empty() {
            return Err(Error::Argument("empty interferometer mixture".into()));
        }
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if parts.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::Argument(format!("mixture weights must be nonnegative and sum to 1, got {total}")));
        }
        for (_, u) in parts {
            if u.dim() != m {
                return Err(Error::Dimension(format!("interferometer has {} modes, target has {m}", u.dim())));
            }
        }
        Ok(())
    }
}

/// `1_{n,m}`: one photon in each of the first `n` modes.
pub fn reference_pattern(n: usize, m: usize) -> Result<ModeOccupation> {
    ModeOccupation::first_modes(n, m)
}

/// Output statistics after the actual map followed by `U_target†`.
pub fn reversal_distribution(
    target: &Unitary<f64>,
    actual: &ActualMap,
    internal: &InternalModel<f64>,
) -> Result<OutputDistribution<f64>> {
    let m = target.dim();
    actual.validate(m)?;
    let n = internal.n();
    let input = reference_pattern(n, m)?;
    let back = target.adjoint();
    let mut mixed: Option<Vec<(ModeOccupation, f64)>> = None;
    for (w, u) in actual.components() {
        let spec = ExperimentSpec::new(u.then(&back)?, input.clone(), internal.clone())?;
        let d = output_distribution(&spec)?;
        match mixed.as_mut() {
            None => mixed = Some(d.entries().iter().map(|(s, p)| (s.clone(), w * p)).collect()),
            Some(acc) => {
                for (slot, (_, p)) in acc.iter_mut().zip(d.entries()) {
                    slot.1 += w * p;
                }
            }
        }
    }
    Ok(OutputDistribution::from_entries(n, m, mixed.expect("nonempty mixture")))
}

/// `p₁ = tr(ρ̃ P_{1_{n,m}})` with `ρ̃` the source state sent through the actual
/// map and then through `U_target†`.
pub fn reversibility(target: &Unitary<f64>, actual: &ActualMap, internal: &InternalModel<f64>) -> Result<f64> {
    let m = target.dim();
    actual.validate(m)?;
    let n = internal.n();
    let s = reference_pattern(n, m)?;
    let back = target.adjoint();
    let mut p = 0.0;
    for (w, u) in actual.components() {
        let spec = ExperimentSpec::new(u.then(&back)?, s.clone(), internal.clone())?;
        p += w * crate::engine::output_probability(&spec, &s)?;
    }
    Ok(p)
}

/// Simulation ground truth `p₁ · tr(ρ_s Π_sym)`; refuses sources without a
/// positive partition representation.
pub fn reference_fidelity(target: &Unitary<f64>, actual: &ActualMap, internal: &InternalModel<f64>) -> Result<f64> {
    match internal.partition_status() {
        PartitionStatus::Positive => {}
        PartitionStatus::Negative => {
            return Err(Error::Assumption(
                "source partition representation has negative weights".into(),
            ))
        }
        PartitionStatus::None => {
            return Err(Error::Assumption("source has no partition representation".into()))
        }
    }
    Ok(reversibility(target, actual, internal)? * symmetric_weight(&internal.gi_vector()?)?)
}

/// `T = p̄₁ + p̄₂ − 1 − δ₁ − δ₂`
pub fn fidelity_thm1(p1: f64, p2: f64, delta1: f64, delta2: f64) -> f64 {
    p1 + p2 - 1.0 - delta1 - delta2
}

/// `T = p̄₁ + c̄* − 1 − δ₁ − ξ`
pub fn fidelity_thm2(p1: f64, c: f64, delta1: f64, xi: f64) -> f64 {
    p1 + c - 1.0 - delta1 - xi
}

/// `T = (p̄₁ − δ₁)(c̄* − ξ)`
pub fn fidelity_thm3(p1: f64, c: f64, delta1: f64, xi: f64) -> f64 {
    (p1 - delta1) * (c - xi)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub k1: u64,
    pub k2: u64,
    pub total: u64,
}

/// Smallest sample counts with `k ≥ ln(2/ε)/2 · (1/δ₁² + κ²/ξ²)`; use `κ = 1`
/// and `ξ = δ₂` for the first theorem.
pub fn plan_samples(epsilon: f64, delta1: f64, xi: f64, kappa: f64) -> Result<SamplePlan> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Argument(format!("failure probability {epsilon} outside (0, 1)")));
    }
    if !(delta1 > 0.0 && xi > 0.0 && kappa > 0.0) {
        return Err(Error::Argument("deviations and prefactor must be positive".into()));
    }
    let half = (2.0 / epsilon).ln() / 2.0;
    let a = half / (delta1 * delta1);
    let b = half * kappa * kappa / (xi * xi);
    Ok(SamplePlan {
        k1: a.ceil() as u64,
        k2: b.ceil() as u64,
        total: (a + b).ceil() as u64,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Theorem {
    Symmetric,
    Witness,
    Source,
}

impl Theorem {
    pub fn number(self) -> u8 {
        match self {
            Theorem::Symmetric => 1,
            Theorem::Witness => 2,
            Theorem::Source => 3,
        }
    }
}

impl From<Theorem> for u8 {
    fn from(t: Theorem) -> u8 {
        t.number()
    }
}

impl TryFrom<u8> for Theorem {
    type Error = String;

    fn try_from(k: u8) -> std::result::Result<Self, String> {
        match k {
            1 => Ok(Theorem::Symmetric),
            2 => Ok(Theorem::Witness),
            3 => Ok(Theorem::Source),
            _ => Err(format!("unknown theorem {k}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
}

/// An observed value and how many retained events it came from; `None`
/// means an exact probability with no sampling error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub shots: Option<u64>,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, shots: None }
    }

    pub fn sampled(value: f64, shots: u64) -> Self {
        Self {
            value,
            shots: Some(shots),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub theorem: Theorem,
    pub threshold: f64,
    pub p1: Estimate,
    /// `p̄₂` for the first theorem, the witness estimate `c̄*` otherwise.
    pub second: Estimate,
    pub witness: Option<Method>,
    pub delta1: f64,
    /// `δ₂` for the first theorem, `ξ` otherwise.
    pub delta2: f64,
    pub epsilon: f64,
    /// Share of `ε` spent on the reversibility term.
    pub epsilon_split: f64,
    pub accept_above: Option<f64>,
    pub verdict: Option<Verdict>,
    pub assumptions: Vec<String>,
}

impl Certificate {
    /// Attaches the accept/reject decision against a user threshold.
    pub fn judged(mut self, accept_above: f64) -> Self {
        self.accept_above = Some(accept_above);
        self.verdict = Some(if self.threshold >= accept_above {
            Verdict::Accept
        } else {
            Verdict::Reject
        });
        self
    }

    /// 0 on accept, 2 on reject; no verdict counts as accept.
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Some(Verdict::Reject) => 2,
            _ => 0,
        }
    }

    /// Recomputes `T` from the stored terms.
    pub fn recomputed_threshold(&self) -> f64 {
        let (p, q) = (self.p1.value, self.second.value);
        match self.theorem {
            Theorem::Symmetric => fidelity_thm1(p, q, self.delta1, self.delta2),
            Theorem::Witness => fidelity_thm2(p, q, self.delta1, self.delta2),
            Theorem::Source => fidelity_thm3(p, q, self.delta1, self.delta2),
        }
    }
}

fn check_budget(epsilon: f64, split: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Argument(format!("failure probability {epsilon} outside (0, 1)")));
    }
    if !(split > 0.0 && split < 1.0) {
        return Err(Error::Argument(format!("failure-probability split {split} outside (0, 1)")));
    }
    Ok(())
}

fn deviation(e: &Estimate, epsilon: f64) -> Result<f64> {
    match e.shots {
        Some(k) => hoeffding_delta(k, epsilon),
        None => Ok(0.0),
    }
}

/// First theorem with a simulated symmetric-projector estimate `p̄₂`; there is
/// no LOQC circuit measuring `p₂` for general inputs.
pub fn certify_thm1(p1: Estimate, p2: Estimate, epsilon: f64, split: f64) -> Result<Certificate> {
    check_budget(epsilon, split)?;
    let delta1 = deviation(&p1, epsilon * split)?;
    let delta2 = deviation(&p2, epsilon * (1.0 - split))?;
    Ok(Certificate {
        theorem: Theorem::Symmetric,
        threshold: fidelity_thm1(p1.value, p2.value, delta1, delta2),
        p1,
        second: p2,
        witness: None,
        delta1,
        delta2,
        epsilon,
        epsilon_split: split,
        accept_above: None,
        verdict: None,
        assumptions: vec!["p2 is a simulation-only estimate of the symmetric projector".into()],
    })
}

/// Second or third theorem from a reversibility estimate and a witness report.
pub fn certify_with_witness(
    theorem: Theorem,
    p1: Estimate,
    witness: &WitnessReport,
    epsilon: f64,
    split: f64,
) -> Result<Certificate> {
    check_budget(epsilon, split)?;
    let delta1 = deviation(&p1, epsilon * split)?;
    let xi = match witness.shots {
        Some(k) => {
            let r = witness.clone().corrected(k, epsilon * (1.0 - split))?;
            r.c_raw - r.c_corrected.expect("set by corrected")
        }
        None => 0.0,
    };
    let c = witness.c_raw;
    let mut assumptions = vec![format!(
        "witness state requirement: {}",
        serde_json::to_value(witness.flags.requires)?.as_str().unwrap_or("unknown")
    )];
    assumptions.extend(witness.flags.notes.iter().cloned());
    let threshold = match theorem {
        Theorem::Symmetric => {
            return Err(Error::Argument("the first theorem takes a symmetric-projector estimate".into()))
        }
        Theorem::Witness => {
            assumptions.push(
                "single-occupation projection of the reversed state has a positive partition representation".into(),
            );
            if witness.method == Method::Fourier {
                assumptions.push("for general states the bound applies to the twirled state".into());
            }
            fidelity_thm2(p1.value, c, delta1, xi)
        }
        Theorem::Source => {
            assumptions.push("source state has a partition representation".into());
            assumptions.push("interferometer is a mixture of passive unitaries preserving internal states".into());
            fidelity_thm3(p1.value, c, delta1, xi)
        }
    };
    Ok(Certificate {
        theorem,
        threshold,
        p1,
        second: Estimate {
            value: c,
            shots: witness.shots,
        },
        witness: Some(witness.method),
        delta1,
        delta2: xi,
        epsilon,
        epsilon_split: split,
        accept_above: None,
        verdict: None,
        assumptions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distinguishability::{obb_model, GiVector, GramMatrix};
    use crate::oracle::oracle_probability;
    use crate::unitaries::{haar_random, perturb};
    use crate::witnesses::{fourier_witness, Frequencies};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn perfect_reversal() {
        let u = haar_random::<f64>(4, 1).unwrap();
        let actual = ActualMap::Unitary(u.clone());
        let g = GramMatrix::<f64>::from_real_overlaps(3, &[(0, 1, 0.3), (0, 2, 0.5), (1, 2, 0.8)]).unwrap();
        for model in [
            InternalModel::PureProduct(GramMatrix::uniform(3, 1.0).unwrap()),
            InternalModel::PureProduct(g),
            InternalModel::PartitionMixture(obb_model(3, 0.4).unwrap()),
        ] {
            assert_abs_diff_eq!(reversibility(&u, &actual, &model).unwrap(), 1.0, epsilon = 1e-12);
            let spec = ExperimentSpec::new(
                u.then(&u.adjoint()).unwrap(),
                reference_pattern(3, 4).unwrap(),
                model.clone(),
            )
            .unwrap();
            assert_abs_diff_eq!(
                oracle_probability(&spec, &reference_pattern(3, 4).unwrap()).unwrap(),
                1.0,
                epsilon = 1e-12
            );
        }
        let bent = ActualMap::Unitary(perturb(&u, 0.2, 5).unwrap());
        assert!(reversibility(&u, &bent, &InternalModel::ideal(3).unwrap()).unwrap() < 1.0);
        let mixed = ActualMap::Mixture(vec![(0.5, u.clone()), (0.5, perturb(&u, 0.2, 5).unwrap())]);
        let ideal = InternalModel::ideal(3).unwrap();
        let expect = 0.5 + 0.5 * reversibility(&u, &bent, &ideal).unwrap();
        assert_abs_diff_eq!(reversibility(&u, &mixed, &ideal).unwrap(), expect, epsilon = 1e-14);
        let dist = reversal_distribution(&u, &mixed, &ideal).unwrap();
        assert_abs_diff_eq!(dist.probability(&reference_pattern(3, 4).unwrap()), expect, epsilon = 1e-14);
        assert!(reversibility(&u, &ActualMap::Unitary(haar_random(3, 1).unwrap()), &ideal).is_err());
    }

    #[test]
    fn threshold_arithmetic() {
        assert_abs_diff_eq!(fidelity_thm1(0.95, 0.9, 0.01, 0.01), 0.83, epsilon = 1e-12);
        assert_abs_diff_eq!(fidelity_thm1(1.0, 1.0 / 6.0, 0.0, 0.0), 1.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(fidelity_thm2(0.9, 0.8, 0.025, 0.025), 0.65, epsilon = 1e-12);
        assert_abs_diff_eq!(fidelity_thm3(0.9, 0.8, 0.02, 0.02), 0.6864, epsilon = 1e-12);
        assert_eq!(fidelity_thm3(1.0, 1.0, 0.0, 0.0), 1.0);
    }

    #[test]
    fn sample_plans() {
        assert_eq!(plan_samples(0.1, 0.01, 0.01, 1.0).unwrap().total, 29958);
        let half = plan_samples(0.1, 0.005, 0.005, 1.0).unwrap().total;
        assert!((half as i64 - 4 * 29958).abs() <= 4);
        assert_eq!(plan_samples(0.1, 0.01, 0.015, 1.5).unwrap().total, 29958);
        assert!(plan_samples(1.0, 0.01, 0.01, 1.0).is_err());
        let p = plan_samples(0.1, 0.02, 0.03, 1.0).unwrap();
        assert!(hoeffding_delta(p.k1, 0.05).unwrap() <= 0.02);
        assert!(hoeffding_delta(p.k2, 0.05).unwrap() <= 0.03);
    }

    #[test]
    fn reference_values() {
        let u = haar_random::<f64>(4, 2).unwrap();
        let actual = ActualMap::Unitary(u.clone());
        assert_abs_diff_eq!(
            reference_fidelity(&u, &actual, &InternalModel::ideal(3).unwrap()).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        let dist = InternalModel::DirectGi(GiVector::distinguishable(3).unwrap());
        assert_abs_diff_eq!(reference_fidelity(&u, &actual, &dist).unwrap(), 1.0 / 6.0, epsilon = 1e-12);
        let obb = obb_model::<f64>(3, 0.1).unwrap();
        let expect = symmetric_weight(&obb.gi_vector().unwrap()).unwrap();
        let r = reference_fidelity(&u, &actual, &InternalModel::PartitionMixture(obb)).unwrap();
        assert_abs_diff_eq!(r, expect, epsilon = 1e-12);
        let tau = InternalModel::PureProduct(crate::distinguishability::time_delay_gram(&[0.0, 1.0, -1.0]).unwrap());
        assert!(matches!(reference_fidelity(&u, &actual, &tau), Err(Error::Assumption(_))));
    }

    #[test]
    fn certificate_from_witness() {
        let f = Frequencies::from_counts(
            3,
            3,
            &crate::engine::Counts::from([
                (ModeOccupation::new(vec![1, 1, 1]), 900),
                (ModeOccupation::new(vec![2, 1, 0]), 100),
            ]),
        )
        .unwrap();
        let w = fourier_witness(&f, None).unwrap();
        let cert = certify_with_witness(Theorem::Source, Estimate::sampled(0.95, 2000), &w, 0.1, 0.5).unwrap();
        assert_abs_diff_eq!(cert.delta1, hoeffding_delta(2000, 0.05).unwrap(), epsilon = 1e-15);
        assert_abs_diff_eq!(cert.delta2, 1.5 * hoeffding_delta(1000, 0.05).unwrap(), epsilon = 1e-15);
        assert_eq!(cert.threshold, cert.recomputed_threshold());
        assert_eq!(cert.clone().judged(0.0).exit_code(), 0);
        assert_eq!(cert.clone().judged(0.99).exit_code(), 2);
        let text = serde_json::to_string(&cert).unwrap();
        assert!(text.contains("\"theorem\":3"));
        assert_eq!(serde_json::from_str::<Certificate>(&text).unwrap(), cert);
        assert!(certify_with_witness(Theorem::Symmetric, Estimate::exact(1.0), &w, 0.1, 0.5).is_err());
        assert!(certify_thm1(Estimate::exact(1.0), Estimate::exact(1.0), 0.1, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn thresholds_are_monotone(p in 0.0..1.0f64, c in 0.0..1.0f64, d in 0.0..0.2f64, x in 0.0..0.2f64, h in 0.0..0.1f64) {
            prop_assume!(p >= d && c >= x);
            for t in [fidelity_thm1, fidelity_thm2, fidelity_thm3] {
                let base = t(p, c, d, x);
                prop_assert!(t((p + h).min(1.0), c, d, x) >= base - 1e-15);
                prop_assert!(t(p, (c + h).min(1.0), d, x) >= base - 1e-15);
                prop_assert!(t(p, c, d + h, x) <= base + 1e-15);
                prop_assert!(t(p, c, d, x + h) <= base + 1e-15);
            }
        }

        #[test]
        fn product_form_is_tighter(p in 0.0..1.0f64, c in 0.0..1.0f64, d in 0.0..0.1f64, x in 0.0..0.1f64) {
            prop_assert!(fidelity_thm3(p, c, d, x) >= fidelity_thm2(p, c, d, x) - 1e-15);
        }
    }
}
