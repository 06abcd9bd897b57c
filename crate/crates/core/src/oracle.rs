//! Brute-force amplitude calculation used to cross-check the engine.
//!
//! Works directly with creation operators on (external mode, internal level)
//! pairs, with no permanents and no GI vectors. Single-occupation inputs only.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;

use crate::combinatorics::{factorial, ModeOccupation};
use crate::distinguishability::{GramMatrix, InternalModel, PartitionMixture};
use crate::engine::ExperimentSpec;
use crate::error::{Error, Result};
use crate::unitaries::Unitary;

pub const MAX_ORACLE_PHOTONS: usize = 4;

/// Internal amplitudes `a[j][r]` with `⟨φ_i|φ_j⟩ = Σ_r conj(a[i][r]) a[j][r]`,
/// from the eigendecomposition `G = Q D Q†`.
fn internal_amplitudes(g: &GramMatrix<f64>) -> Vec<Vec<Complex64>> {
    let n = g.n();
    let eig = nalgebra::linalg::SymmetricEigen::new(g.matrix().clone());
    let keep: Vec<usize> = (0..n).filter(|&r| eig.eigenvalues[r] > 1e-14).collect();
    (0..n)
        .map(|j| {
            keep.iter()
                .map(|&r| eig.eigenvectors[(j, r)].conj() * eig.eigenvalues[r].sqrt())
                .collect()
        })
        .collect()
}

/// Fock-space evolution of photons `j` with input modes `modes[j]` and
/// internal amplitudes `amps[j]`; returns external-pattern probabilities.
fn evolve(u: &Unitary<f64>, modes: &[usize], amps: &[Vec<Complex64>]) -> HashMap<Vec<usize>, f64> {
    let m = u.dim();
    let n = modes.len();
    // coefficient of each normally ordered monomial, keyed by sorted (mode, level) list
    let mut coeffs: BTreeMap<Vec<(usize, usize)>, Complex64> = BTreeMap::new();
    let choices: Vec<Vec<(usize, usize, Complex64)>> = (0..n)
        .map(|j| {
            let mut v = Vec::new();
            for k in 0..m {
                for (r, a) in amps[j].iter().enumerate() {
                    let amp = u.entry(modes[j], k) * a;
                    if amp.norm_sqr() > 0.0 {
                        v.push((k, r, amp));
                    }
                }
            }
            v
        })
        .collect();
    let mut stack: Vec<(usize, Complex64, Vec<(usize, usize)>)> = vec![(0, Complex64::new(1.0, 0.0), Vec::new())];
    while let Some((j, amp, ops)) = stack.pop() {
        if j == n {
            let mut key = ops;
            key.sort_unstable();
            *coeffs.entry(key).or_insert(Complex64::new(0.0, 0.0)) += amp;
            continue;
        }
        for &(k, r, a) in &choices[j] {
            let mut next = ops.clone();
            next.push((k, r));
            stack.push((j + 1, amp * a, next));
        }
    }
    let mut probs: HashMap<Vec<usize>, f64> = HashMap::new();
    for (key, cf) in coeffs {
        // (b†)^N |0> = √(N!) |N>
        let mut mult = 1u64;
        let mut run = 1usize;
        for w in key.windows(2) {
            if w[0] == w[1] {
                run += 1;
            } else {
                mult *= factorial(run);
                run = 1;
            }
        }
        mult *= factorial(run);
        let mut pattern = vec![0usize; m];
        for &(k, _) in &key {
            pattern[k] += 1;
        }
        *probs.entry(pattern).or_insert(0.0) += mult as f64 * cf.norm_sqr();
    }
    probs
}

fn convolve(a: &HashMap<Vec<usize>, f64>, b: &HashMap<Vec<usize>, f64>) -> HashMap<Vec<usize>, f64> {
    let mut out = HashMap::new();
    for (pa, wa) in a {
        for (pb, wb) in b {
            let s: Vec<usize> = pa.iter().zip(pb).map(|(x, y)| x + y).collect();
            *out.entry(s).or_insert(0.0) += wa * wb;
        }
    }
    out
}

fn mixture_distribution(u: &Unitary<f64>, modes: &[usize], p: &PartitionMixture<f64>) -> HashMap<Vec<usize>, f64> {
    let m = u.dim();
    let mut total: HashMap<Vec<usize>, f64> = HashMap::new();
    for (part, w) in p.entries() {
        let mut dist: HashMap<Vec<usize>, f64> = HashMap::from([(vec![0; m], 1.0)]);
        for block in part.blocks() {
            let block_modes: Vec<usize> = block.iter().map(|&j| modes[j]).collect();
            let ones = vec![vec![Complex64::new(1.0, 0.0)]; block.len()];
            dist = convolve(&dist, &evolve(u, &block_modes, &ones));
        }
        for (s, q) in dist {
            *total.entry(s).or_insert(0.0) += w * q;
        }
    }
    total
}

/// Full output distribution by brute force.
pub fn oracle_distribution(spec: &ExperimentSpec<f64>) -> Result<BTreeMap<ModeOccupation, f64>> {
    let n = spec.n();
    if n > MAX_ORACLE_PHOTONS {
        return Err(Error::Capacity {
            what: "oracle photon number",
            value: n,
            max: MAX_ORACLE_PHOTONS,
        });
    }
    if spec.input.counts().iter().any(|&c| c > 1) {
        return Err(Error::Argument("oracle handles one photon per input mode only".into()));
    }
    let modes = spec.input.to_assignment().modes().to_vec();
    let probs = match &spec.internal {
        InternalModel::PureProduct(g) => evolve(&spec.unitary, &modes, &internal_amplitudes(g)),
        InternalModel::PartitionMixture(p) => mixture_distribution(&spec.unitary, &modes, p),
        InternalModel::DirectGi(_) => {
            return Err(Error::Argument("oracle needs a Gram matrix or a partition mixture".into()))
        }
    };
    Ok(probs.into_iter().map(|(s, p)| (ModeOccupation::new(s), p)).collect())
}

pub fn oracle_probability(spec: &ExperimentSpec<f64>, s: &ModeOccupation) -> Result<f64> {
    Ok(*oracle_distribution(spec)?.get(s).unwrap_or(&0.0))
}
