//! Internal-state models of partial distinguishability.
//!
//! Every model reduces to a GI vector: the expectation values `⟨J_σ⟩` of the
//! photon-permutation operators, stored densely over `S_n` in lexicographic
//! order of the permutations.

use nalgebra::DMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::combinatorics::{factorial, Permutation, SetPartition};
use crate::error::{Error, Result};
use crate::group::SymmetricGroup;
use crate::lattice::PartitionLattice;
use crate::scalar::{abs2, c, cone, conj, czero, Real, C};

pub const GI_TOL: f64 = 1e-10;
pub const ORBIT_TOL: f64 = 1e-9;
pub const WEIGHT_SUM_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;

/// Generalized indistinguishabilities `⟨J_σ⟩` for all `σ ∈ S_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct GiVector<T: Real> {
    n: usize,
    values: Vec<C<T>>,
}

impl<T: Real> GiVector<T> {
    /// Values in lexicographic permutation order. Checks `⟨J_id⟩ = 1`,
    /// `⟨J_{σ⁻¹}⟩ = conj⟨J_σ⟩` and `|⟨J_σ⟩| ≤ 1`.
    pub fn new(n: usize, values: Vec<C<T>>) -> Result<Self> {
        let g = SymmetricGroup::get(n)?;
        if values.len() != g.order() {
            return Err(Error::Dimension(format!(
                "GI vector for {n} photons needs {} values, got {}",
                g.order(),
                values.len()
            )));
        }
        let tol = T::tolerance(GI_TOL);
        if abs2(values[0] - cone()) > tol * tol {
            return Err(Error::Argument(format!("identity value must be 1, got {}", values[0])));
        }
        for r in 0..values.len() {
            let d = values[r] - conj(values[g.inverse_index(r)]);
            if abs2(d) > tol * tol {
                return Err(Error::Argument(format!(
                    "value at {} is not the conjugate of its inverse",
                    g.elements()[r]
                )));
            }
            if abs2(values[r]).sqrt() > T::one() + tol {
                return Err(Error::Argument(format!(
                    "value at {} exceeds 1 in modulus",
                    g.elements()[r]
                )));
            }
        }
        Ok(Self { n, values })
    }

    /// All photons identical.
    pub fn ideal(n: usize) -> Result<Self> {
        let g = SymmetricGroup::get(n)?;
        Ok(Self {
            n,
            values: vec![cone(); g.order()],
        })
    }

    /// All photons mutually orthogonal.
    pub fn distinguishable(n: usize) -> Result<Self> {
        let g = SymmetricGroup::get(n)?;
        let mut values = vec![czero(); g.order()];
        values[0] = cone();
        Ok(Self { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[C<T>] {
        &self.values
    }

    pub fn get(&self, sigma: &Permutation) -> C<T> {
        self.values[sigma.rank()]
    }

    pub fn to_f64(&self) -> GiVector<f64> {
        GiVector {
            n: self.n,
            values: self.values.iter().map(|z| c(z.re.to_f64(), z.im.to_f64())).collect(),
        }
    }

    /// Largest spread of values among permutations sharing an induced partition.
    pub fn orbit_spread(&self) -> f64 {
        let g = SymmetricGroup::get(self.n).expect("validated n");
        let mut first: Vec<Option<C<T>>> = vec![None; PartitionLattice::get(self.n).unwrap().len()];
        let mut spread = 0.0f64;
        for (r, v) in self.values.iter().enumerate() {
            let slot = &mut first[g.partition_of(r)];
            match slot {
                Some(f) => spread = spread.max(abs2(*v - *f).sqrt().to_f64()),
                None => *slot = Some(*v),
            }
        }
        spread
    }
}

/// Hermitian, unit-diagonal, positive-semidefinite overlap matrix `G[i][j] = ⟨φ_i|φ_j⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix<T: Real> {
    matrix: DMatrix<C<T>>,
}

impl<T: Real> GramMatrix<T> {
    /// Accepts eigenvalues down to `−1e−10`, projecting onto the PSD cone
    /// (eigenvalue clipping, then rescaling to unit diagonal).
    pub fn new(matrix: DMatrix<C<T>>) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n || n == 0 {
            return Err(Error::Dimension(format!("Gram matrix must be square, got {}x{}", n, matrix.ncols())));
        }
        let tol = T::tolerance(GI_TOL);
        for i in 0..n {
            if abs2(matrix[(i, i)] - cone()).sqrt() > tol {
                return Err(Error::InvalidGram(format!("diagonal entry {i} is {}", matrix[(i, i)])));
            }
            for j in 0..i {
                if abs2(matrix[(i, j)] - conj(matrix[(j, i)])).sqrt() > tol {
                    return Err(Error::InvalidGram(format!("not Hermitian at ({i},{j})")));
                }
            }
        }
        let eig = nalgebra::linalg::SymmetricEigen::new(matrix.clone());
        let min = eig.eigenvalues.iter().copied().reduce(|a, b| a.min(b)).unwrap();
        if min < -T::tolerance(PSD_TOL) {
            return Err(Error::InvalidGram(format!("minimum eigenvalue {min} below tolerance")));
        }
        if min >= T::zero() {
            return Ok(Self { matrix });
        }
        let clipped = eig.eigenvalues.map(|x| c(x.max(T::zero()), T::zero()));
        let v = &eig.eigenvectors;
        let mut g = v * DMatrix::from_diagonal(&clipped) * v.adjoint();
        let d: Vec<T> = (0..n).map(|i| g[(i, i)].re.sqrt()).collect();
        for i in 0..n {
            for j in 0..n {
                g[(i, j)] /= c(d[i] * d[j], T::zero());
            }
            g[(i, i)] = cone();
        }
        Ok(Self { matrix: g })
    }

    /// From internal state vectors (normalized here); `G[i][j] = ⟨φ_i|φ_j⟩`.
    pub fn from_vectors(vectors: &[Vec<C<T>>]) -> Result<Self> {
        let n = vectors.len();
        let normed: Vec<Vec<C<T>>> = vectors
            .iter()
            .map(|v| {
                let norm = v.iter().map(|z| abs2(*z)).fold(T::zero(), |a, b| a + b).sqrt();
                if norm > T::zero() {
                    Ok(v.iter().map(|z| *z / c(norm, T::zero())).collect())
                } else {
                    Err(Error::InvalidGram("zero internal state vector".into()))
                }
            })
            .collect::<Result<_>>()?;
        let mut m = DMatrix::from_fn(n, n, |i, j| {
            normed[i]
                .iter()
                .zip(&normed[j])
                .fold(czero(), |acc, (a, b)| acc + conj(*a) * *b)
        });
        for i in 0..n {
            m[(i, i)] = cone();
        }
        Self::new(m)
    }

    /// Real symmetric overlaps; `pairs` lists `(i, j, x_ij)` and the rest are 0.
    pub fn from_real_overlaps(n: usize, pairs: &[(usize, usize, f64)]) -> Result<Self> {
        let mut m = DMatrix::identity(n, n);
        for &(i, j, x) in pairs {
            if i >= n || j >= n {
                return Err(Error::IndexOutOfRange { index: i.max(j), dim: n });
            }
            m[(i, j)] = c(T::lit(x), T::zero());
            m[(j, i)] = c(T::lit(x), T::zero());
        }
        Self::new(m)
    }

    /// Every pair overlapping by `x`.
    pub fn uniform(n: usize, x: f64) -> Result<Self> {
        let mut m = DMatrix::from_element(n, n, c(T::lit(x), T::zero()));
        for i in 0..n {
            m[(i, i)] = cone();
        }
        Self::new(m)
    }

    /// Overlaps `x_ij = √V_ij` from pairwise HOM visibilities, taken real and nonnegative.
    pub fn from_visibilities(n: usize, pairs: &[(usize, usize, f64)]) -> Result<Self> {
        let mut ov = Vec::with_capacity(pairs.len());
        for &(i, j, v) in pairs {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Argument(format!("visibility {v} outside [0, 1]")));
            }
            ov.push((i, j, v.sqrt()));
        }
        Self::from_real_overlaps(n, &ov)
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C<T>> {
        &self.matrix
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C<T> {
        self.matrix[(i, j)]
    }

    pub fn min_eigenvalue(&self) -> T {
        let eig = nalgebra::linalg::SymmetricEigen::new(self.matrix.clone());
        eig.eigenvalues.iter().copied().reduce(|a, b| a.min(b)).unwrap()
    }

    /// Relabel photons: photon `k` of the result is photon `perm(k)` of `self`.
    pub fn relabeled(&self, perm: &Permutation) -> Result<Self> {
        let n = self.n();
        if perm.len() != n {
            return Err(Error::Dimension("relabeling permutation size".into()));
        }
        Ok(Self {
            matrix: DMatrix::from_fn(n, n, |i, j| self.matrix[(perm.apply(i), perm.apply(j))]),
        })
    }

    pub fn gi_vector(&self) -> Result<GiVector<T>> {
        let g = SymmetricGroup::get(self.n())?;
        let values = g.elements().iter().map(|s| gi_from_gram(self, s)).collect();
        Ok(GiVector { n: self.n(), values })
    }
}

/// `∏_j G[j][σ(j)]`
pub fn gi_from_gram<T: Real>(g: &GramMatrix<T>, sigma: &Permutation) -> C<T> {
    (0..sigma.len()).fold(cone(), |acc, j| acc * g.get(j, sigma.apply(j)))
}

/// Gaussian wavepackets of unit width displaced by the given delays:
/// `G[i][j] = exp(−(τ_i − τ_j)²/4)`, so a pair's HOM visibility is `exp(−Δτ²/2)`.
pub fn time_delay_gram<T: Real>(delays: &[f64]) -> Result<GramMatrix<T>> {
    let n = delays.len();
    let m = DMatrix::from_fn(n, n, |i, j| {
        let d = delays[i] - delays[j];
        c(T::lit((-d * d / 4.0).exp()), T::zero())
    });
    GramMatrix::new(m)
}

/// Quasi-probability weights over set partitions of the photons.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionMixture<T: Real> {
    n: usize,
    // dense over the lattice order
    weights: Vec<T>,
}

impl<T: Real> PartitionMixture<T> {
    /// Duplicate partitions accumulate. Weights must sum to one; negative weights are allowed.
    pub fn new(n: usize, entries: &[(SetPartition, T)]) -> Result<Self> {
        let lat = PartitionLattice::get(n)?;
        let mut weights = vec![T::zero(); lat.len()];
        for (p, w) in entries {
            weights[lat.index_of(p)?] += *w;
        }
        Self::from_dense(n, weights)
    }

    fn from_dense(n: usize, weights: Vec<T>) -> Result<Self> {
        let total = weights.iter().fold(T::zero(), |a, b| a + *b);
        if (total - T::one()).abs() > T::tolerance(WEIGHT_SUM_TOL) {
            return Err(Error::Argument(format!("partition weights sum to {total}, not 1")));
        }
        Ok(Self { n, weights })
    }

    /// All weight on a single partition.
    pub fn pure(p: SetPartition) -> Result<Self> {
        let n = p.ground_size();
        Self::new(n, &[(p, T::one())])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self, p: &SetPartition) -> Result<T> {
        Ok(self.weights[PartitionLattice::get(self.n)?.index_of(p)?])
    }

    /// Weights in lattice order, including zeros.
    pub fn dense(&self) -> &[T] {
        &self.weights
    }

    /// Nonzero entries.
    pub fn entries(&self) -> Vec<(SetPartition, T)> {
        let lat = PartitionLattice::get(self.n).expect("validated n");
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w != T::zero())
            .map(|(i, w)| (lat.partitions()[i].clone(), *w))
            .collect()
    }

    /// True when some weight is below `−tol`.
    pub fn has_negative(&self, tol: f64) -> bool {
        self.weights.iter().any(|w| w.to_f64() < -tol)
    }

    pub fn indistinguishable_coefficient(&self) -> T {
        indistinguishable_coefficient(self)
    }

    pub fn gi_vector(&self) -> Result<GiVector<T>> {
        let g = SymmetricGroup::get(self.n)?;
        let lat = PartitionLattice::get(self.n)?;
        let by_partition: Vec<T> = (0..lat.len())
            .map(|i| lat.coarser(i).iter().fold(T::zero(), |a, &j| a + self.weights[j]))
            .collect();
        let values = (0..g.order())
            .map(|r| c(by_partition[g.partition_of(r)], T::zero()))
            .collect();
        Ok(GiVector { n: self.n, values })
    }

    /// Convex (or affine) combination `Σ a_k · mixture_k`.
    pub fn combine(parts: &[(T, &PartitionMixture<T>)]) -> Result<Self> {
        let n = parts
            .first()
            .map(|(_, p)| p.n)
            .ok_or_else(|| Error::Argument("empty combination".into()))?;
        let mut w = vec![T::zero(); parts[0].1.weights.len()];
        for (a, p) in parts {
            if p.n != n {
                return Err(Error::Dimension("mixtures over different photon numbers".into()));
            }
            for (x, y) in w.iter_mut().zip(&p.weights) {
                *x += *a * *y;
            }
        }
        Self::from_dense(n, w)
    }
}

/// `Σ_{Λ ⪰ σ} p_Λ`
pub fn gi_from_partition<T: Real>(p: &PartitionMixture<T>, sigma: &Permutation) -> Result<T> {
    let lat = PartitionLattice::get(p.n)?;
    let i = lat.index_of(&crate::combinatorics::induced_partition(sigma))?;
    Ok(lat.coarser(i).iter().fold(T::zero(), |a, &j| a + p.weights[j]))
}

/// Möbius inversion of lattice sums into partition weights. Fails when the
/// GI vector is not constant on permutations with equal induced partition.
pub fn partition_weights_from_gi<T: Real>(gi: &GiVector<T>) -> Result<PartitionMixture<T>> {
    let spread = gi.orbit_spread();
    if spread > T::tolerance(ORBIT_TOL).to_f64() {
        return Err(Error::Representation(format!(
            "GI values differ by {spread:e} between permutations with the same orbits"
        )));
    }
    let n = gi.n;
    let g = SymmetricGroup::get(n)?;
    let lat = PartitionLattice::get(n)?;
    let mut m = vec![T::zero(); lat.len()];
    let mut seen = vec![false; lat.len()];
    for r in 0..g.order() {
        let i = g.partition_of(r);
        if !seen[i] {
            seen[i] = true;
            m[i] = gi.values[r].re;
        }
    }
    let mu = lat.mobius();
    let weights: Vec<T> = (0..lat.len())
        .map(|i| {
            mu.row(i).iter().fold(T::zero(), |a, (j, q)| {
                a + T::lit(*q.numer() as f64 / *q.denom() as f64) * m[*j]
            })
        })
        .collect();
    PartitionMixture::from_dense(n, weights)
}

/// Conjugation average `(1/n!) Σ_τ gi(τ⁻¹στ)`, evaluated as a conjugacy-class mean.
pub fn twirl<T: Real>(gi: &GiVector<T>) -> GiVector<T> {
    let g = SymmetricGroup::get(gi.n).expect("validated n");
    let mut values = vec![czero(); g.order()];
    for (_, members) in g.classes() {
        let sum = members.iter().fold(czero::<T>(), |a, &r| a + gi.values[r]);
        let mean = sum / c(T::lit(members.len() as f64), T::zero());
        for &r in members {
            values[r] = mean;
        }
    }
    GiVector { n: gi.n, values }
}

/// `tr(Π_sym ρ) = (1/n!) Σ_σ ⟨J_σ⟩`
pub fn symmetric_weight<T: Real>(gi: &GiVector<T>) -> Result<T> {
    let sum = gi.values.iter().fold(czero::<T>(), |a, b| a + *b);
    let nf = T::lit(factorial(gi.n) as f64);
    let (re, im) = (sum.re / nf, sum.im / nf);
    if im.abs() > T::tolerance(GI_TOL) {
        return Err(Error::Consistency(format!("symmetric weight has imaginary part {im}")));
    }
    Ok(re)
}

/// Each photon independently orthogonal to everything with probability `ε`.
pub fn obb_model<T: Real>(n: usize, eps: f64) -> Result<PartitionMixture<T>> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Argument(format!("bad-bit probability {eps} outside [0, 1]")));
    }
    let lat = PartitionLattice::get(n)?;
    let mut weights = vec![T::zero(); lat.len()];
    for bad in 0u32..(1 << n) {
        let k = bad.count_ones() as i32;
        let w = eps.powi(k) * (1.0 - eps).powi(n as i32 - k);
        if w == 0.0 {
            continue;
        }
        // good photons share label n, bad ones keep their own
        let labels: Vec<usize> = (0..n).map(|i| if bad & (1 << i) != 0 { i } else { n }).collect();
        weights[lat.index_of_labels(&labels)] += T::lit(w);
    }
    PartitionMixture::from_dense(n, weights)
}

/// Weight of the single full block.
pub fn indistinguishable_coefficient<T: Real>(p: &PartitionMixture<T>) -> T {
    let lat = PartitionLattice::get(p.n).expect("validated n");
    p.weights[lat.full_index()]
}

/// How a model relates to partition states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionStatus {
    /// A partition representation with nonnegative weights exists.
    Positive,
    /// Only a quasi-mixture with some negative weight exists.
    Negative,
    /// No partition representation.
    None,
}

#[derive(Clone, Debug, PartialEq)]
pub enum InternalModel<T: Real> {
    PureProduct(GramMatrix<T>),
    PartitionMixture(PartitionMixture<T>),
    DirectGi(GiVector<T>),
}

impl<T: Real> InternalModel<T> {
    pub fn n(&self) -> usize {
        match self {
            Self::PureProduct(g) => g.n(),
            Self::PartitionMixture(p) => p.n(),
            Self::DirectGi(v) => v.n(),
        }
    }

    pub fn ideal(n: usize) -> Result<Self> {
        Ok(Self::DirectGi(GiVector::ideal(n)?))
    }

    pub fn gi_vector(&self) -> Result<GiVector<T>> {
        match self {
            Self::PureProduct(g) => g.gi_vector(),
            Self::PartitionMixture(p) => p.gi_vector(),
            Self::DirectGi(v) => Ok(v.clone()),
        }
    }

    pub fn partition_representation(&self) -> Result<PartitionMixture<T>> {
        match self {
            Self::PartitionMixture(p) => Ok(p.clone()),
            _ => partition_weights_from_gi(&self.gi_vector()?),
        }
    }

    pub fn partition_status(&self) -> PartitionStatus {
        match self.partition_representation() {
            Ok(p) if p.has_negative(T::tolerance(ORBIT_TOL).to_f64()) => PartitionStatus::Negative,
            Ok(_) => PartitionStatus::Positive,
            Err(_) => PartitionStatus::None,
        }
    }

    /// Full-block weight of the twirled state; equals the partition weight
    /// itself whenever a partition representation exists.
    pub fn true_coefficient(&self) -> Result<T> {
        if let Self::PartitionMixture(p) = self {
            return Ok(p.indistinguishable_coefficient());
        }
        Ok(partition_weights_from_gi(&twirl(&self.gi_vector()?))?.indistinguishable_coefficient())
    }
}

#[derive(Serialize, Deserialize)]
struct PartitionEntryJson {
    blocks: Vec<Vec<usize>>,
    weight: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum InternalModelJson {
    PureProduct {
        gram: Vec<Vec<[f64; 2]>>,
    },
    PartitionMixture {
        n: usize,
        partitions: Vec<PartitionEntryJson>,
    },
    DirectGi {
        n: usize,
        values: Vec<[f64; 2]>,
    },
}

impl<T: Real> Serialize for InternalModel<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let j = match self {
            Self::PureProduct(g) => {
                let n = g.n();
                InternalModelJson::PureProduct {
                    gram: (0..n)
                        .map(|i| (0..n).map(|k| [g.get(i, k).re.to_f64(), g.get(i, k).im.to_f64()]).collect())
                        .collect(),
                }
            }
            Self::PartitionMixture(p) => InternalModelJson::PartitionMixture {
                n: p.n(),
                partitions: p
                    .entries()
                    .into_iter()
                    .map(|(part, w)| PartitionEntryJson {
                        blocks: part.blocks().iter().map(|b| b.iter().map(|x| x + 1).collect()).collect(),
                        weight: w.to_f64(),
                    })
                    .collect(),
            },
            Self::DirectGi(v) => InternalModelJson::DirectGi {
                n: v.n(),
                values: v.values().iter().map(|z| [z.re.to_f64(), z.im.to_f64()]).collect(),
            },
        };
        j.serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for InternalModel<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = InternalModelJson::deserialize(d)?;
        let r: Result<Self> = match j {
            InternalModelJson::PureProduct { gram } => {
                let n = gram.len();
                if gram.iter().any(|row| row.len() != n) {
                    return Err(D::Error::custom("Gram matrix rows must all have length n"));
                }
                GramMatrix::new(DMatrix::from_fn(n, n, |i, k| {
                    c(T::lit(gram[i][k][0]), T::lit(gram[i][k][1]))
                }))
                .map(Self::PureProduct)
            }
            InternalModelJson::PartitionMixture { n, partitions } => partitions
                .into_iter()
                .map(|e| {
                    let blocks = e
                        .blocks
                        .iter()
                        .map(|b| {
                            b.iter()
                                .map(|&x| {
                                    x.checked_sub(1)
                                        .ok_or_else(|| Error::Malformed("photon labels are 1-based".into()))
                                })
                                .collect::<Result<Vec<_>>>()
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Ok((SetPartition::new(n, blocks)?, T::lit(e.weight)))
                })
                .collect::<Result<Vec<_>>>()
                .and_then(|entries| PartitionMixture::new(n, &entries))
                .map(Self::PartitionMixture),
            InternalModelJson::DirectGi { n, values } => {
                GiVector::new(n, values.iter().map(|v| c(T::lit(v[0]), T::lit(v[1]))).collect()).map(Self::DirectGi)
            }
        };
        r.map_err(D::Error::custom)
    }
}
