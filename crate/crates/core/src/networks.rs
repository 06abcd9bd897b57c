//! Interferometers used by the cyclic and superposed-HOM witnesses.
//!
//! Both constructions check themselves against ideal-photon statistics and
//! refuse to return a network that fails the check.

use crate::combinatorics::{enumerate_patterns, ModeOccupation};
use crate::distinguishability::InternalModel;
use crate::engine::{ExperimentSpec, PreparedSpec};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::unitaries::{beamsplitter, fourier_unitary, phase_shift, Unitary};

pub const VALIDATION_TOL: f64 = 1e-9;

/// Sign of the `cos α` term in an eligible pattern's fringe.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FringeSign {
    Plus,
    Minus,
}

/// `2n`-mode network: beamsplitters on `(0,1),(2,3),…`, a phase on mode 0,
/// then beamsplitters on `(1,2),(3,4),…,(2n−1,0)`. Photons enter the even
/// (0-based) modes.
#[derive(Clone, Debug)]
pub struct CyclicNetwork<T: Real> {
    n: usize,
    alpha: f64,
    phase_offset: f64,
    unitary: Unitary<T>,
}

impl<T: Real> CyclicNetwork<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Extra phase found necessary to match the fringe sign convention.
    pub fn phase_offset(&self) -> f64 {
        self.phase_offset
    }

    pub fn unitary(&self) -> &Unitary<T> {
        &self.unitary
    }

    pub fn input(&self) -> ModeOccupation {
        cyclic_input(self.n)
    }

    /// `Some(sign)` for patterns with exactly one photon in each second-layer pair.
    pub fn classify(&self, s: &ModeOccupation) -> Option<FringeSign> {
        cyclic_class(self.n, s)
    }

    /// Ideal fringe value of an eligible pattern at indistinguishable coefficient `c`.
    pub fn fringe(&self, sign: FringeSign, c: f64) -> f64 {
        cyclic_fringe(self.n, self.alpha, sign, c)
    }
}

pub fn cyclic_input(n: usize) -> ModeOccupation {
    ModeOccupation::new((0..2 * n).map(|k| usize::from(k % 2 == 0)).collect())
}

pub fn cyclic_class(n: usize, s: &ModeOccupation) -> Option<FringeSign> {
    let c = s.counts();
    if c.len() != 2 * n || s.photons() != n {
        return None;
    }
    for k in 0..n {
        let (a, b) = (2 * k + 1, (2 * k + 2) % (2 * n));
        if c[a] + c[b] != 1 {
            return None;
        }
    }
    let q = (0..2 * n).filter(|k| k % 2 == 1 && c[*k] == 1).count();
    Some(if (n + q).is_multiple_of(2) { FringeSign::Plus } else { FringeSign::Minus })
}

/// `2^{−(2n−1)} (1 ± c cos α)`
pub fn cyclic_fringe(n: usize, alpha: f64, sign: FringeSign, c: f64) -> f64 {
    let s = match sign {
        FringeSign::Plus => 1.0,
        FringeSign::Minus => -1.0,
    };
    (1.0 + s * c * alpha.cos()) / 2f64.powi(2 * n as i32 - 1)
}

/// All `2^n` eligible patterns with their fringe signs.
pub fn cyclic_eligible(n: usize) -> Vec<(ModeOccupation, FringeSign)> {
    (0u32..(1 << n))
        .map(|mask| {
            let mut c = vec![0usize; 2 * n];
            for k in 0..n {
                let (a, b) = (2 * k + 1, (2 * k + 2) % (2 * n));
                c[if mask & (1 << k) == 0 { a } else { b }] = 1;
            }
            let s = ModeOccupation::new(c);
            let sign = cyclic_class(n, &s).expect("eligible by construction");
            (s, sign)
        })
        .collect()
}

fn cyclic_unitary<T: Real>(n: usize, phase: f64) -> Result<Unitary<T>> {
    let m = 2 * n;
    let mut first = nalgebra::DMatrix::<crate::scalar::C<T>>::identity(m, m);
    for k in 0..n {
        first *= beamsplitter::<T>(m, 2 * k, 2 * k + 1);
    }
    let mut second = nalgebra::DMatrix::<crate::scalar::C<T>>::identity(m, m);
    for k in 0..n {
        second *= beamsplitter::<T>(m, 2 * k + 1, (2 * k + 2) % m);
    }
    Unitary::new(first * phase_shift::<T>(m, 0, T::lit(phase)) * second)
}

fn cyclic_deviation<T: Real>(n: usize, alpha: f64, u: &Unitary<T>) -> Result<f64> {
    let spec = ExperimentSpec::new(u.clone(), cyclic_input(n), InternalModel::ideal(n)?)?;
    let prepared = PreparedSpec::new(&spec)?;
    let mut dev = 0.0f64;
    for (s, sign) in cyclic_eligible(n) {
        let p = prepared.probability(&s)?.to_f64();
        dev = dev.max((p - cyclic_fringe(n, alpha, sign, 1.0)).abs());
    }
    Ok(dev)
}

pub fn cyclic_network<T: Real>(n: usize, alpha: f64) -> Result<CyclicNetwork<T>> {
    if n < 2 {
        return Err(Error::Argument("the cyclic network needs at least two photons".into()));
    }
    let tol = T::tolerance(VALIDATION_TOL).to_f64();
    let mut best = f64::INFINITY;
    for k in 0..4 {
        let offset = k as f64 * std::f64::consts::FRAC_PI_2;
        // fix the sign convention at full contrast, then check the requested phase
        let dev0 = cyclic_deviation(n, 0.0, &cyclic_unitary::<T>(n, offset)?)?;
        best = best.min(dev0);
        if dev0 > tol {
            continue;
        }
        let unitary = cyclic_unitary::<T>(n, alpha + offset)?;
        let dev = cyclic_deviation(n, alpha, &unitary)?;
        if dev > tol {
            return Err(Error::Construction {
                what: format!("cyclic network n={n} at alpha={alpha}"),
                deviation: dev,
            });
        }
        return Ok(CyclicNetwork {
            n,
            alpha,
            phase_offset: offset,
            unitary,
        });
    }
    Err(Error::Construction {
        what: format!("cyclic network n={n}"),
        deviation: best,
    })
}

/// `2(n−1)`-mode network: photon 1 enters mode 0 and is spread by an
/// `(n−1)`-mode Fourier transform over modes `0..n−1`; photon `k ≥ 2` enters
/// mode `n−3+k`; a balanced beamsplitter then joins modes `j` and `n−1+j`.
#[derive(Clone, Debug)]
pub struct HomNetwork<T: Real> {
    n: usize,
    unitary: Unitary<T>,
}

impl<T: Real> HomNetwork<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn unitary(&self) -> &Unitary<T> {
        &self.unitary
    }

    pub fn input(&self) -> ModeOccupation {
        hom_input(self.n)
    }

    /// True unless some beamsplitter pair holds exactly one photon on each output.
    pub fn is_bunched(&self, s: &ModeOccupation) -> bool {
        hom_is_bunched(self.n, s)
    }
}

pub fn hom_input(n: usize) -> ModeOccupation {
    let m = 2 * (n - 1);
    ModeOccupation::new((0..m).map(|k| usize::from(k == 0 || k >= n - 1)).collect())
}

pub fn hom_is_bunched(n: usize, s: &ModeOccupation) -> bool {
    let c = s.counts();
    !(0..n - 1).any(|j| c[j] == 1 && c[n - 1 + j] == 1)
}

/// Largest bunching probability of a state with vanishing full-block weight:
/// `(2n−3)/(2n−2)`, reached by one photon orthogonal to the other `n−1`.
pub fn hom_threshold(n: usize) -> f64 {
    (2.0 * n as f64 - 3.0) / (2.0 * n as f64 - 2.0)
}

/// The closed form `2^{n−3}/2^{n−2}`, which equals `1/2` for every `n`.
pub fn hom_threshold_closed_form(n: usize) -> f64 {
    2f64.powi(n as i32 - 3) / 2f64.powi(n as i32 - 2)
}

pub fn hom_network<T: Real>(n: usize) -> Result<HomNetwork<T>> {
    if n < 2 {
        return Err(Error::Argument("the HOM network needs at least two photons".into()));
    }
    let k = n - 1;
    let m = 2 * k;
    let split = fourier_unitary::<T>(k)?.direct_sum(&Unitary::identity(k));
    let mut join = nalgebra::DMatrix::<crate::scalar::C<T>>::identity(m, m);
    for j in 0..k {
        join *= beamsplitter::<T>(m, j, k + j);
    }
    let unitary = split.then(&Unitary::new(join)?)?;
    let spec = ExperimentSpec::new(unitary.clone(), hom_input(n), InternalModel::ideal(n)?)?;
    let prepared = PreparedSpec::new(&spec)?;
    let mut unbunched = 0.0f64;
    for s in enumerate_patterns(n, m)? {
        if !hom_is_bunched(n, &s) {
            unbunched += prepared.probability(&s)?.to_f64();
        }
    }
    if unbunched > T::tolerance(VALIDATION_TOL).to_f64() {
        return Err(Error::Construction {
            what: format!("HOM network n={n}"),
            deviation: unbunched,
        });
    }
    Ok(HomNetwork { n, unitary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distinguishability::GiVector;
    use crate::engine::output_distribution;
    use approx::assert_abs_diff_eq;

    fn eligible_totals(n: usize, alpha: f64, model: InternalModel<f64>) -> (f64, f64) {
        let net = cyclic_network::<f64>(n, alpha).unwrap();
        let spec = ExperimentSpec::new(net.unitary().clone(), net.input(), model).unwrap();
        let d = output_distribution(&spec).unwrap();
        let (mut plus, mut minus) = (0.0, 0.0);
        for (s, p) in d.entries() {
            match net.classify(s) {
                Some(FringeSign::Plus) => plus += p,
                Some(FringeSign::Minus) => minus += p,
                None => {}
            }
        }
        (plus, minus)
    }

    #[test]
    fn cyclic_validates_for_small_n() {
        for n in 2..=5 {
            for &alpha in &[0.0, 0.4, std::f64::consts::FRAC_PI_2, 2.5] {
                assert!(cyclic_network::<f64>(n, alpha).is_ok(), "n={n} alpha={alpha}");
            }
        }
        assert!(cyclic_network::<f64>(1, 0.0).is_err());
    }

    #[test]
    fn cyclic_fringe_examples() {
        let (plus, minus) = eligible_totals(3, 0.0, InternalModel::ideal(3).unwrap());
        assert_abs_diff_eq!(plus, 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(minus, 0.0, epsilon = 1e-12);
        let (plus, minus) = eligible_totals(3, std::f64::consts::FRAC_PI_2, InternalModel::ideal(3).unwrap());
        assert_abs_diff_eq!(plus, 0.125, epsilon = 1e-12);
        assert_abs_diff_eq!(minus, 0.125, epsilon = 1e-12);
        for n in 2..=4 {
            let model = InternalModel::DirectGi(GiVector::distinguishable(n).unwrap());
            let (plus, minus) = eligible_totals(n, 0.0, model);
            assert_abs_diff_eq!(plus + minus, 1.0 / 2f64.powi(n as i32 - 1), epsilon = 1e-12);
            assert_abs_diff_eq!(plus, minus, epsilon = 1e-12);
        }
    }

    #[test]
    fn hom_validates_for_small_n() {
        for n in 2..=5 {
            let net = hom_network::<f64>(n).unwrap();
            assert_eq!(net.unitary().dim(), 2 * (n - 1));
            assert_eq!(net.input().photons(), n);
        }
        assert!(hom_network::<f64>(1).is_err());
    }

    #[test]
    fn hom_two_photons() {
        let net = hom_network::<f64>(2).unwrap();
        for (model, expect) in [
            (InternalModel::ideal(2).unwrap(), 1.0),
            (InternalModel::DirectGi(GiVector::distinguishable(2).unwrap()), 0.5),
        ] {
            let spec = ExperimentSpec::new(net.unitary().clone(), net.input(), model).unwrap();
            let d = output_distribution(&spec).unwrap();
            let pb: f64 = d.entries().iter().filter(|(s, _)| net.is_bunched(s)).map(|(_, p)| p).sum();
            assert_abs_diff_eq!(pb, expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn thresholds() {
        assert_eq!(hom_threshold(2), 0.5);
        assert_eq!(hom_threshold(3), 0.75);
        for n in 2..=8 {
            assert_eq!(hom_threshold_closed_form(n), 0.5);
        }
    }
}
