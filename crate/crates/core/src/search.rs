//! Numerical search for the interferometer maximizing the two-mode correlator.

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::neldermead::NelderMead;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::combinatorics::ModeOccupation;
use crate::distinguishability::InternalModel;
use crate::engine::{output_distribution, ExperimentSpec};
use crate::error::{Error, Result};
use crate::unitaries::Unitary;
use crate::witnesses::{twomode_quantum_max, Frequencies};

pub const UMAX_TOL: f64 = 1e-3;
const MAX_STARTS: usize = 24;
const MAX_ITERS: u64 = 4000;

/// Photon count, mode count, correlated pair.
fn layout(n: usize) -> Result<(usize, usize, (usize, usize))> {
    if n != 3 {
        return Err(Error::Unsupported(format!("correlator maximization is only set up for n = 3, got {n}")));
    }
    Ok((n, n + 1, (0, 1)))
}

/// `exp(iH)` for the Hermitian `H` packed as `m` diagonal entries followed
/// by real and imaginary parts of the strict upper triangle.
fn unitary_from_params(m: usize, p: &[f64]) -> Result<Unitary<f64>> {
    let mut h = DMatrix::<Complex64>::zeros(m, m);
    for i in 0..m {
        h[(i, i)] = Complex64::new(p[i], 0.0);
    }
    let mut k = m;
    for i in 0..m {
        for j in i + 1..m {
            let z = Complex64::new(p[k], p[k + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            k += 2;
        }
    }
    let eig = nalgebra::linalg::SymmetricEigen::new(h);
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::from_polar(1.0, l)));
    Unitary::new(&eig.eigenvectors * phases * eig.eigenvectors.adjoint())
}

/// `C_{ij}` of the output statistics for `internal` entering the first `n` modes.
pub fn correlator(u: &Unitary<f64>, internal: InternalModel<f64>, modes: (usize, usize)) -> Result<f64> {
    let n = internal.n();
    let spec = ExperimentSpec::new(u.clone(), ModeOccupation::first_modes(n, u.dim())?, internal)?;
    let f = Frequencies::from_distribution(&output_distribution(&spec)?);
    Ok(f.second_moment(modes.0, modes.1) - f.mean(modes.0) * f.mean(modes.1))
}

struct NegCorrelator {
    n: usize,
    m: usize,
    modes: (usize, usize),
}

impl CostFunction for NegCorrelator {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        let u = unitary_from_params(self.m, p)?;
        Ok(-correlator(&u, InternalModel::ideal(self.n)?, self.modes)?)
    }
}

fn simplex(start: &[f64], scale: f64) -> Vec<Vec<f64>> {
    let mut out = vec![start.to_vec()];
    for k in 0..start.len() {
        let mut v = start.to_vec();
        v[k] += scale;
        out.push(v);
    }
    out
}

fn local_search(problem: NegCorrelator, start: Vec<f64>) -> Result<(Vec<f64>, f64)> {
    let solver = NelderMead::new(simplex(&start, 0.4))
        .with_sd_tolerance(1e-13)
        .map_err(|e| Error::Argument(e.to_string()))?;
    let res = Executor::new(problem, solver)
        .configure(|s| s.max_iters(MAX_ITERS))
        .run()
        .map_err(|e| Error::Argument(format!("optimizer failed: {e}")))?;
    let state = res.state();
    let best = state.get_best_param().cloned().unwrap_or(start);
    Ok((best, -state.get_best_cost()))
}

/// Multi-start Nelder–Mead over `U = exp(iH)` maximizing the ideal-photon
/// correlator; `n` photons in the first `n` of `n+1` modes, pair `(0, 1)`.
pub fn find_umax(n: usize, seed: u64) -> Result<Unitary<f64>> {
    let (n, m, modes) = layout(n)?;
    let target = twomode_quantum_max(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for _ in 0..MAX_STARTS {
        let start: Vec<f64> = (0..m * m).map(|_| rng.random_range(-1.5..1.5)).collect();
        let (p, c) = local_search(NegCorrelator { n, m, modes }, start)?;
        // restart from the optimum to escape a collapsed simplex
        let (p, c) = match local_search(NegCorrelator { n, m, modes }, p.clone())? {
            (q, d) if d > c => (q, d),
            _ => (p, c),
        };
        if best.as_ref().is_none_or(|(_, b)| c > *b) {
            best = Some((p, c));
        }
        if target - best.as_ref().map_or(f64::NEG_INFINITY, |b| b.1) < UMAX_TOL / 10.0 {
            break;
        }
    }
    let (p, c) = best.expect("at least one start");
    if (target - c).abs() > UMAX_TOL {
        return Err(Error::Search { best: c, target });
    }
    unitary_from_params(m, &p)
}
