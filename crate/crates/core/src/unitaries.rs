//! Interferometer matrices.
//!
//! A unitary acts on creation operators as `a†_i -> Σ_k U[i][k] a†_k`, so
//! `U[i][k]` is the amplitude for a photon entering mode `i` to leave in mode `k`
//! and a network built from stages `A` then `B` is the product `A·B`.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::combinatorics::ModeAssignment;
use crate::error::{Error, Result};
use crate::scalar::{abs2, c, cis, cone, czero, Real, C};

pub const UNITARITY_TOL: f64 = 1e-10;
pub const DETERMINANT_TOL: f64 = 1e-8;

/// `n×n` matrix `M[i][j] = U[d_in(i)][d_out(j)]`.
pub type TransitionMatrix<T> = DMatrix<C<T>>;

#[derive(Clone, Debug, PartialEq)]
pub struct Unitary<T: Real> {
    matrix: DMatrix<C<T>>,
}

impl<T: Real> Unitary<T> {
    /// Checks unitarity and the determinant modulus.
    pub fn new(matrix: DMatrix<C<T>>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::Dimension(format!(
                "unitary must be square and nonempty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let dev = unitarity_deviation(&matrix);
        if !(dev <= T::tolerance(UNITARITY_TOL).to_f64()) {
            return Err(Error::NotUnitary(dev));
        }
        let det = matrix.clone().determinant();
        let ddev = (det.re.hypot(det.im) - T::one()).abs().to_f64();
        if !(ddev <= T::tolerance(DETERMINANT_TOL).to_f64()) {
            return Err(Error::NotUnitary(ddev));
        }
        Ok(Self { matrix })
    }

    pub fn identity(m: usize) -> Self {
        Self {
            matrix: DMatrix::identity(m, m),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C<T>> {
        &self.matrix
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> C<T> {
        self.matrix[(i, j)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    /// The network applying `self` first and `next` afterwards.
    pub fn then(&self, next: &Self) -> Result<Self> {
        if self.dim() != next.dim() {
            return Err(Error::Dimension(format!(
                "cannot chain {}-mode and {}-mode networks",
                self.dim(),
                next.dim()
            )));
        }
        Ok(Self {
            matrix: &self.matrix * &next.matrix,
        })
    }

    /// Block-diagonal `self ⊕ other`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (a, b) = (self.dim(), other.dim());
        let mut m = DMatrix::zeros(a + b, a + b);
        m.view_mut((0, 0), (a, a)).copy_from(&self.matrix);
        m.view_mut((a, a), (b, b)).copy_from(&other.matrix);
        Self { matrix: m }
    }

    /// Max-norm distance between two unitaries of equal dimension.
    pub fn distance(&self, other: &Self) -> f64 {
        (&self.matrix - &other.matrix)
            .iter()
            .map(|z| z.re.hypot(z.im).to_f64())
            .fold(0.0, f64::max)
    }

    pub fn unitarity_deviation(&self) -> f64 {
        unitarity_deviation(&self.matrix)
    }

    pub fn to_f64(&self) -> Unitary<f64> {
        Unitary {
            matrix: self.matrix.map(|z| c(z.re.to_f64(), z.im.to_f64())),
        }
    }

    pub fn from_f64(u: &Unitary<f64>) -> Result<Self> {
        Self::new(u.matrix.map(|z| c(T::lit(z.re), T::lit(z.im))))
    }
}

fn unitarity_deviation<T: Real>(m: &DMatrix<C<T>>) -> f64 {
    let p = m.adjoint() * m;
    let n = m.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { cone() } else { czero() };
            let d = p[(i, j)] - target;
            dev = dev.max(d.re.hypot(d.im).to_f64());
        }
    }
    dev
}

/// `U[j][k] = ω^{jk}/√n` with `ω = e^{2πi/n}`.
pub fn fourier_unitary<T: Real>(n: usize) -> Result<Unitary<T>> {
    if n == 0 {
        return Err(Error::Argument("Fourier dimension must be at least 1".into()));
    }
    let scale = T::one() / T::lit(n as f64).sqrt();
    let two_pi = T::two_pi();
    let m = DMatrix::from_fn(n, n, |j, k| {
        let e = (j * k) % n;
        cis(two_pi * T::lit(e as f64) / T::lit(n as f64)) * scale
    });
    Unitary::new(m)
}

/// Haar-random unitary: QR of a complex Gaussian matrix with the phases of
/// `R`'s diagonal moved into `Q`.
pub fn haar_random<T: Real>(m: usize, seed: u64) -> Result<Unitary<T>> {
    if m == 0 {
        return Err(Error::Argument("dimension must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g: DMatrix<C<f64>> = DMatrix::from_fn(m, m, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        c(re, im)
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..m {
        let d = r[(k, k)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..m {
            q[(i, k)] *= ph;
        }
    }
    Unitary::new(q.map(|z| c(T::lit(z.re), T::lit(z.im))))
}

/// `U · exp(ε log H)` for a Haar-random `H` drawn from `seed`.
pub fn perturb<T: Real>(u: &Unitary<T>, eps: f64, seed: u64) -> Result<Unitary<T>> {
    if !(eps >= 0.0) {
        return Err(Error::Argument(format!("perturbation strength {eps} must be nonnegative")));
    }
    if eps == 0.0 {
        return Ok(u.clone());
    }
    let h = haar_random::<T>(u.dim(), seed)?;
    let step = unitary_power(&h, T::lit(eps));
    Unitary::new(&u.matrix * step)
}

/// `exp(t log H)` on the principal branch (eigenphases in `(−π, π]`).
pub fn unitary_power<T: Real>(h: &Unitary<T>, t: T) -> DMatrix<C<T>> {
    let (q, tri) = nalgebra::linalg::Schur::new(h.matrix.clone()).unpack();
    let m = h.dim();
    let mut d = DMatrix::zeros(m, m);
    for k in 0..m {
        let z = tri[(k, k)];
        let mut theta = z.im.atan2(z.re);
        if theta <= -T::pi() {
            theta = T::pi();
        }
        d[(k, k)] = cis(theta * t);
    }
    &q * d * q.adjoint()
}

/// Balanced beamsplitter `(1/√2)[[1, i], [i, 1]]` between modes `a` and `b` of `m`.
pub fn beamsplitter<T: Real>(m: usize, a: usize, b: usize) -> DMatrix<C<T>> {
    let mut u = DMatrix::identity(m, m);
    let s = T::one() / T::lit(2.0).sqrt();
    u[(a, a)] = c(s, T::zero());
    u[(b, b)] = c(s, T::zero());
    u[(a, b)] = c(T::zero(), s);
    u[(b, a)] = c(T::zero(), s);
    u
}

/// Phase `e^{iα}` on mode `a` of `m`.
pub fn phase_shift<T: Real>(m: usize, a: usize, alpha: T) -> DMatrix<C<T>> {
    let mut u = DMatrix::identity(m, m);
    u[(a, a)] = cis(alpha);
    u
}

/// `M[i][j] = U[d_in(i)][d_out(j)]`.
pub fn submatrix<T: Real>(
    u: &Unitary<T>,
    d_in: &ModeAssignment,
    d_out: &ModeAssignment,
) -> Result<TransitionMatrix<T>> {
    if d_in.len() != d_out.len() {
        return Err(Error::Dimension(format!(
            "{} input photons but {} output photons",
            d_in.len(),
            d_out.len()
        )));
    }
    let m = u.dim();
    for &k in d_in.modes().iter().chain(d_out.modes()) {
        if k >= m {
            return Err(Error::IndexOutOfRange { index: k, dim: m });
        }
    }
    let n = d_in.len();
    Ok(DMatrix::from_fn(n, n, |i, j| u.entry(d_in.modes()[i], d_out.modes()[j])))
}

/// Single-photon transmission probabilities `|U[i][k]|²`.
pub fn transmission<T: Real>(u: &Unitary<T>, i: usize, k: usize) -> T {
    abs2(u.entry(i, k))
}

#[derive(Serialize, Deserialize)]
struct UnitaryJson {
    dimension: usize,
    entries: Vec<[f64; 2]>,
}

impl<T: Real> Serialize for Unitary<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let m = self.dim();
        let mut entries = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                let z = self.matrix[(i, j)];
                entries.push([z.re.to_f64(), z.im.to_f64()]);
            }
        }
        UnitaryJson { dimension: m, entries }.serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for Unitary<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = UnitaryJson::deserialize(d)?;
        let m = j.dimension;
        if j.entries.len() != m * m {
            return Err(serde::de::Error::custom(format!(
                "dimension {m} needs {} entries, found {}",
                m * m,
                j.entries.len()
            )));
        }
        let mat = DMatrix::from_fn(m, m, |i, k| {
            let [re, im] = j.entries[i * m + k];
            c(T::lit(re), T::lit(im))
        });
        Unitary::new(mat).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fourier_small() {
        let f1 = fourier_unitary::<f64>(1).unwrap();
        assert_abs_diff_eq!(f1.entry(0, 0).re, 1.0, epsilon = 1e-15);
        let f2 = fourier_unitary::<f64>(2).unwrap();
        let s = 1.0 / 2f64.sqrt();
        for (i, j, v) in [(0, 0, s), (0, 1, s), (1, 0, s), (1, 1, -s)] {
            assert_abs_diff_eq!(f2.entry(i, j).re, v, epsilon = 1e-15);
            assert_abs_diff_eq!(f2.entry(i, j).im, 0.0, epsilon = 1e-15);
        }
        let f3 = fourier_unitary::<f64>(3).unwrap();
        for i in 0..3 {
            let row: f64 = (0..3).map(|k| f3.entry(i, k).norm_sqr()).sum();
            assert_abs_diff_eq!(row, 1.0, epsilon = 1e-14);
        }
        for n in 1..=12 {
            assert!(fourier_unitary::<f64>(n).unwrap().unitarity_deviation() <= 1e-10);
            assert!(fourier_unitary::<f32>(n).is_ok());
        }
    }

    #[test]
    fn haar_deterministic_and_unitary() {
        let a = haar_random::<f64>(5, 42).unwrap();
        let b = haar_random::<f64>(5, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.unitarity_deviation() <= 1e-10);
        assert_ne!(a, haar_random::<f64>(5, 43).unwrap());
    }

    #[test]
    fn haar_first_moment() {
        // E|U00|² = 1/m, Var = (m-1)/(m²(m+1))
        let m = 8;
        let draws = 1000;
        let xs: Vec<f64> = (0..draws)
            .map(|s| haar_random::<f64>(m, 1000 + s).unwrap().entry(0, 0).norm_sqr())
            .collect();
        let mean = xs.iter().sum::<f64>() / draws as f64;
        let sd = (((m - 1) as f64) / ((m * m * (m + 1)) as f64)).sqrt();
        let se = sd / (draws as f64).sqrt();
        assert!((mean - 1.0 / m as f64).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn perturbation_behaviour() {
        let u = fourier_unitary::<f64>(4).unwrap();
        assert_eq!(perturb(&u, 0.0, 9).unwrap(), u);
        let d: Vec<f64> = [0.2, 0.1, 0.05]
            .iter()
            .map(|&e| perturb(&u, e, 9).unwrap().distance(&u))
            .collect();
        assert!(d[0] > d[1] && d[1] > d[2] && d[2] > 0.0);
        for &e in &[0.05, 0.2, 1.0] {
            assert!(perturb(&u, e, 9).unwrap().unitarity_deviation() <= 1e-10);
        }
        assert_ne!(perturb(&u, 0.1, 1).unwrap(), perturb(&u, 0.1, 2).unwrap());
        // the full step recovers U·H
        let h = haar_random::<f64>(4, 9).unwrap();
        assert!(perturb(&u, 1.0, 9).unwrap().distance(&u.then(&h).unwrap()) < 1e-10);
    }

    #[test]
    fn transition_matrices() {
        let id = Unitary::<f64>::identity(3);
        let d = ModeAssignment::new(vec![0, 1, 2]);
        let m = submatrix(&id, &d, &d).unwrap();
        assert_eq!(m, DMatrix::identity(3, 3));
        let f2 = fourier_unitary::<f64>(2).unwrap();
        let m = submatrix(&f2, &ModeAssignment::new(vec![0, 1]), &ModeAssignment::new(vec![0, 0])).unwrap();
        let s = 1.0 / 2f64.sqrt();
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(m[(i, j)].re, s, epsilon = 1e-15);
            }
        }
        assert!(submatrix(&f2, &ModeAssignment::new(vec![0, 2]), &ModeAssignment::new(vec![0, 1])).is_err());
    }

    #[test]
    fn rejects_non_unitary() {
        let m = DMatrix::from_element(2, 2, c(1.0, 0.0));
        assert!(matches!(Unitary::<f64>::new(m), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn json_round_trip_is_exact() {
        let u = haar_random::<f64>(4, 5).unwrap();
        let s = serde_json::to_string(&u).unwrap();
        let back: Unitary<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, u);
    }
}
