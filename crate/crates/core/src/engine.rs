//! Output statistics of partially distinguishable photons.
//!
//! `P(s) = (1/(μ(n)μ(s))) Σ_σ ⟨J_σ⟩ perm(M ∘ M*_σ)` with `M` the transition
//! matrix for the input and output assignments.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::combinatorics::{enumerate_patterns, multiplicity_factor, ModeAssignment, ModeOccupation, Permutation};
use crate::distinguishability::{GiVector, InternalModel};
use crate::error::{capacity, Error, Result};
use crate::group::SymmetricGroup;
use crate::permanent::{permuted_product, ryser};
use crate::scalar::{czero, Real, C};
use crate::unitaries::{submatrix, Unitary};

pub const MAX_DENSE_PHOTONS: usize = 6;
pub const MAX_DENSE_MODES: usize = 12;
pub const NEGATIVE_FAIL: f64 = 1e-6;
/// Shots drawn per independent random stream.
pub const SHOT_BATCH: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec<T: Real> {
    pub unitary: Unitary<T>,
    pub input: ModeOccupation,
    pub internal: InternalModel<T>,
}

impl<T: Real> ExperimentSpec<T> {
    pub fn new(unitary: Unitary<T>, input: ModeOccupation, internal: InternalModel<T>) -> Result<Self> {
        if input.modes() != unitary.dim() {
            return Err(Error::Dimension(format!(
                "input pattern over {} modes for a {}-mode unitary",
                input.modes(),
                unitary.dim()
            )));
        }
        if internal.n() != input.photons() {
            return Err(Error::Dimension(format!(
                "internal model for {} photons with {} input photons",
                internal.n(),
                input.photons()
            )));
        }
        Ok(Self {
            unitary,
            input,
            internal,
        })
    }

    pub fn n(&self) -> usize {
        self.input.photons()
    }

    pub fn m(&self) -> usize {
        self.unitary.dim()
    }
}

/// A spec with its GI vector evaluated once.
#[derive(Clone, Debug)]
pub struct PreparedSpec<'a, T: Real> {
    spec: &'a ExperimentSpec<T>,
    d_in: ModeAssignment,
    mu_in: T,
    terms: Vec<(&'static Permutation, C<T>)>,
}

impl<'a, T: Real> PreparedSpec<'a, T> {
    pub fn new(spec: &'a ExperimentSpec<T>) -> Result<Self> {
        let gi = spec.internal.gi_vector()?;
        Self::with_gi(spec, &gi)
    }

    /// Use an explicit GI vector in place of the spec's internal model.
    pub fn with_gi(spec: &'a ExperimentSpec<T>, gi: &GiVector<T>) -> Result<Self> {
        let n = spec.n();
        if gi.n() != n {
            return Err(Error::Dimension(format!("GI vector for {} photons, spec has {n}", gi.n())));
        }
        let g = SymmetricGroup::get(n)?;
        let terms = g
            .elements()
            .iter()
            .zip(gi.values())
            .filter(|(_, v)| v.re != T::zero() || v.im != T::zero())
            .map(|(p, v)| (p, *v))
            .collect();
        Ok(Self {
            spec,
            d_in: spec.input.to_assignment(),
            mu_in: T::lit(multiplicity_factor(&spec.input) as f64),
            terms,
        })
    }

    /// Unclipped complex value of the expansion.
    pub fn raw_probability(&self, s: &ModeOccupation) -> Result<C<T>> {
        if s.modes() != self.spec.m() || s.photons() != self.spec.n() {
            return Err(Error::Dimension(format!(
                "pattern {s} does not hold {} photons in {} modes",
                self.spec.n(),
                self.spec.m()
            )));
        }
        let m = submatrix(&self.spec.unitary, &self.d_in, &s.to_assignment())?;
        let mut acc = czero::<T>();
        for (sigma, v) in &self.terms {
            acc += *v * ryser(&permuted_product(&m, sigma));
        }
        let norm = self.mu_in * T::lit(multiplicity_factor(s) as f64);
        Ok(acc / C::new(norm, T::zero()))
    }

    /// Probability clipped to `[0, 1]`; fails on a negative value beyond `1e−6`.
    pub fn probability(&self, s: &ModeOccupation) -> Result<T> {
        let z = self.raw_probability(s)?;
        if z.im.abs() > T::tolerance(NEGATIVE_FAIL) {
            return Err(Error::Consistency(format!("probability of {s} has imaginary part {}", z.im)));
        }
        clip(z.re, s)
    }
}

fn clip<T: Real>(p: T, s: &ModeOccupation) -> Result<T> {
    if p < -T::tolerance(NEGATIVE_FAIL) {
        return Err(Error::Consistency(format!("probability of {s} is {p}")));
    }
    Ok(p.max(T::zero()).min(T::one()))
}

pub fn output_probability<T: Real>(spec: &ExperimentSpec<T>, s: &ModeOccupation) -> Result<T> {
    PreparedSpec::new(spec)?.probability(s)
}

/// Probabilities over every output pattern, in enumeration order.
#[derive(Clone, Debug, PartialEq)]
pub struct OutputDistribution<T: Real> {
    n: usize,
    m: usize,
    entries: Vec<(ModeOccupation, T)>,
    index: HashMap<ModeOccupation, usize>,
    residue: f64,
}

impl<T: Real> OutputDistribution<T> {
    pub fn from_entries(n: usize, m: usize, entries: Vec<(ModeOccupation, T)>) -> Self {
        let total = entries.iter().fold(T::zero(), |a, (_, p)| a + *p);
        let index = entries.iter().enumerate().map(|(i, (s, _))| (s.clone(), i)).collect();
        Self {
            n,
            m,
            entries,
            index,
            residue: (total - T::one()).to_f64(),
        }
    }

    pub fn photons(&self) -> usize {
        self.n
    }

    pub fn modes(&self) -> usize {
        self.m
    }

    pub fn entries(&self) -> &[(ModeOccupation, T)] {
        &self.entries
    }

    pub fn probability(&self, s: &ModeOccupation) -> T {
        self.index.get(s).map_or(T::zero(), |&i| self.entries[i].1)
    }

    /// `Σ p − 1`
    pub fn normalization_residue(&self) -> f64 {
        self.residue
    }

    pub fn to_f64(&self) -> OutputDistribution<f64> {
        OutputDistribution::from_entries(
            self.n,
            self.m,
            self.entries.iter().map(|(s, p)| (s.clone(), p.to_f64())).collect(),
        )
    }
}

pub fn output_distribution<T: Real>(spec: &ExperimentSpec<T>) -> Result<OutputDistribution<T>> {
    let gi = spec.internal.gi_vector()?;
    distribution_with_gi(spec, &gi)
}

/// Distribution of the spec's unitary and input with an explicit GI vector.
pub fn distribution_with_gi<T: Real>(spec: &ExperimentSpec<T>, gi: &GiVector<T>) -> Result<OutputDistribution<T>> {
    let (n, m) = (spec.n(), spec.m());
    capacity("photon number for a dense distribution", n, MAX_DENSE_PHOTONS)?;
    capacity("mode number for a dense distribution", m, MAX_DENSE_MODES)?;
    let prepared = PreparedSpec::with_gi(spec, gi)?;
    let patterns = enumerate_patterns(n, m)?;
    let probs: Vec<T> = patterns
        .par_iter()
        .map(|s| prepared.probability(s))
        .collect::<Result<_>>()?;
    let dist = OutputDistribution::from_entries(n, m, patterns.into_iter().zip(probs).collect());
    if dist.residue.abs() > T::tolerance(1e-8).to_f64() {
        return Err(Error::Consistency(format!(
            "distribution sums to 1 {:+e}",
            dist.residue
        )));
    }
    Ok(dist)
}

/// Detected patterns with their counts.
pub type Counts = BTreeMap<ModeOccupation, u64>;

/// Multinomial draw by inverse CDF over the enumeration order. Batch `b`
/// of [`SHOT_BATCH`] shots uses ChaCha stream `b`, so results do not depend on
/// the thread schedule.
pub fn sample_distribution<T: Real>(dist: &OutputDistribution<T>, shots: u64, seed: u64) -> Counts {
    let mut cdf = Vec::with_capacity(dist.entries.len());
    let mut acc = 0.0f64;
    for (_, p) in &dist.entries {
        acc += p.to_f64();
        cdf.push(acc);
    }
    let total = acc;
    let last_nonzero = dist.entries.iter().rposition(|(_, p)| p.to_f64() > 0.0);
    let batches = shots.div_ceil(SHOT_BATCH);
    let per_batch: Vec<Vec<u64>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let k = SHOT_BATCH.min(shots - b * SHOT_BATCH);
            let mut hist = vec![0u64; cdf.len()];
            for _ in 0..k {
                let u: f64 = rng.random::<f64>() * total;
                let i = cdf.partition_point(|&c| c <= u).min(last_nonzero.unwrap_or(0));
                hist[i] += 1;
            }
            hist
        })
        .collect();
    let mut counts = Counts::new();
    if last_nonzero.is_none() {
        return counts;
    }
    for (i, (s, _)) in dist.entries.iter().enumerate() {
        let c: u64 = per_batch.iter().map(|h| h[i]).sum();
        if c > 0 {
            counts.insert(s.clone(), c);
        }
    }
    counts
}

pub fn sample_counts<T: Real>(spec: &ExperimentSpec<T>, shots: u64, seed: u64) -> Result<Counts> {
    if shots == 0 {
        return Ok(Counts::new());
    }
    Ok(sample_distribution(&output_distribution(spec)?, shots, seed))
}

/// Render a distribution as `pattern,probability` CSV with 17 significant digits.
pub fn distribution_csv<T: Real>(dist: &OutputDistribution<T>) -> String {
    let mut out = String::from("pattern,probability\n");
    for (s, p) in &dist.entries {
        out.push_str(&format!("{},{:.16e}\n", s.to_pipe_string(), p.to_f64()));
    }
    out
}

/// Parse the CSV produced by [`distribution_csv`].
pub fn parse_distribution_csv(text: &str) -> Result<OutputDistribution<f64>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == "pattern,probability" => {}
        other => return Err(Error::Malformed(format!("unexpected header {other:?}"))),
    }
    let mut entries = Vec::new();
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let (pat, p) = line
            .split_once(',')
            .ok_or_else(|| Error::Malformed(format!("bad line {line:?}")))?;
        let s = ModeOccupation::parse_pipe(pat)?;
        let p: f64 = p
            .trim()
            .parse()
            .map_err(|_| Error::Malformed(format!("bad probability in {line:?}")))?;
        entries.push((s, p));
    }
    let (n, m) = entries
        .first()
        .map(|(s, _)| (s.photons(), s.modes()))
        .ok_or_else(|| Error::Malformed("empty distribution".into()))?;
    Ok(OutputDistribution::from_entries(n, m, entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distinguishability::{obb_model, twirl, GramMatrix};
    use crate::unitaries::{fourier_unitary, haar_random};
    use approx::assert_abs_diff_eq;

    fn hom_spec(x: f64) -> ExperimentSpec<f64> {
        ExperimentSpec::<f64>::new(
            fourier_unitary(2).unwrap(),
            ModeOccupation::new(vec![1, 1]),
            InternalModel::PureProduct(GramMatrix::uniform(2, x).unwrap()),
        )
        .unwrap()
    }

    #[test]
    fn hom_dip() {
        for &x in &[0.0, 0.3, 0.8, 1.0] {
            let p = output_probability(&hom_spec(x), &ModeOccupation::new(vec![1, 1])).unwrap();
            assert_abs_diff_eq!(p, (1.0 - x * x) / 2.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn ideal_reduces_to_permanent() {
        let u = haar_random::<f64>(4, 3).unwrap();
        let input = ModeOccupation::new(vec![1, 1, 1, 0]);
        let spec = ExperimentSpec::<f64>::new(u.clone(), input.clone(), InternalModel::ideal(3).unwrap()).unwrap();
        for s in enumerate_patterns(3, 4).unwrap() {
            let m = submatrix(&u, &input.to_assignment(), &s.to_assignment()).unwrap();
            let direct = ryser(&m).norm_sqr() / multiplicity_factor(&s) as f64;
            assert_abs_diff_eq!(output_probability(&spec, &s).unwrap(), direct, epsilon = 1e-14);
        }
    }

    #[test]
    fn zero_transmission_pattern() {
        let spec = ExperimentSpec::<f64>::new(
            fourier_unitary(3).unwrap(),
            ModeOccupation::new(vec![1, 1, 1]),
            InternalModel::ideal(3).unwrap(),
        )
        .unwrap();
        assert!(output_probability(&spec, &ModeOccupation::new(vec![2, 1, 0])).unwrap() < 1e-15);
    }

    #[test]
    fn single_photon_and_normalization() {
        let u = haar_random::<f64>(5, 8).unwrap();
        let spec = ExperimentSpec::<f64>::new(u.clone(), ModeOccupation::new(vec![0, 0, 1, 0, 0]), InternalModel::ideal(1).unwrap()).unwrap();
        let d = output_distribution(&spec).unwrap();
        for j in 0..5 {
            let mut s = vec![0; 5];
            s[j] = 1;
            assert_abs_diff_eq!(d.probability(&ModeOccupation::new(s)), u.entry(2, j).norm_sqr(), epsilon = 1e-15);
        }
        let spec = ExperimentSpec::<f64>::new(
            haar_random(6, 1).unwrap(),
            ModeOccupation::new(vec![1, 0, 1, 1, 0, 1]),
            InternalModel::PartitionMixture(obb_model(4, 0.3).unwrap()),
        )
        .unwrap();
        assert!(output_distribution(&spec).unwrap().normalization_residue().abs() < 1e-12);
    }

    #[test]
    fn twirled_gi_changes_nothing_for_class_functions() {
        let spec = ExperimentSpec::<f64>::new(
            haar_random(4, 2).unwrap(),
            ModeOccupation::new(vec![1, 1, 1, 0]),
            InternalModel::PartitionMixture(obb_model(3, 0.2).unwrap()),
        )
        .unwrap();
        let gi = spec.internal.gi_vector().unwrap();
        assert_eq!(twirl(&gi), gi);
    }

    #[test]
    fn sampling() {
        let spec = hom_spec(1.0);
        assert!(sample_counts(&spec, 0, 1).unwrap().is_empty());
        let counts = sample_counts(&spec, 1_000_000, 5).unwrap();
        assert_eq!(counts.values().sum::<u64>(), 1_000_000);
        assert!(!counts.contains_key(&ModeOccupation::new(vec![1, 1])));
        assert_eq!(counts, sample_counts(&spec, 1_000_000, 5).unwrap());
    }

    #[test]
    fn sampled_frequencies_converge() {
        let spec = ExperimentSpec::<f64>::new(
            haar_random(4, 12).unwrap(),
            ModeOccupation::new(vec![1, 1, 1, 0]),
            InternalModel::PureProduct(GramMatrix::uniform(3, 0.7).unwrap()),
        )
        .unwrap();
        let d = output_distribution(&spec).unwrap();
        let shots = 100_000u64;
        let counts = sample_distribution(&d, shots, 77);
        for (s, p) in d.entries() {
            let f = *counts.get(s).unwrap_or(&0) as f64 / shots as f64;
            let sd = (p * (1.0 - p) / shots as f64).sqrt();
            assert!((f - p).abs() <= 4.0 * sd + 1e-12, "{s}: {f} vs {p}");
        }
    }

    #[test]
    fn csv_round_trip() {
        let spec = hom_spec(0.6);
        let d = output_distribution(&spec).unwrap();
        let text = distribution_csv(&d);
        assert!(text.starts_with("pattern,probability\n2|0,"));
        let back = parse_distribution_csv(&text).unwrap();
        for ((s, p), (s2, p2)) in d.entries().iter().zip(back.entries()) {
            assert_eq!(s, s2);
            assert_eq!(*p, *p2);
        }
    }

    #[test]
    fn single_precision_engine() {
        let spec = ExperimentSpec::<f32>::new(
            fourier_unitary(2).unwrap(),
            ModeOccupation::new(vec![1, 1]),
            InternalModel::PureProduct(GramMatrix::uniform(2, 0.5).unwrap()),
        )
        .unwrap();
        let p = output_probability(&spec, &ModeOccupation::new(vec![1, 1])).unwrap();
        assert!((p - 0.375).abs() < 1e-5);
    }
}
