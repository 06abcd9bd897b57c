//! The coarseness lattice of set partitions and its exact Möbius inversion.
//!
//! Partitions are indexed in the canonical order of [`enumerate_partitions`].
//! `R[i][j] = 1` iff partition `j` is coarser than or equal to partition `i`;
//! `mu` is its exact inverse, so that weights `p` and lattice sums `M = R p`
//! convert via `p = mu M`.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::combinatorics::{enumerate_partitions, SetPartition, MAX_PHOTONS};
use crate::error::{capacity, Error, Result};

pub type Rational = Ratio<i64>;

/// Sparse square matrix stored by rows as `(column, value)` pairs with ascending columns.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<V> {
    dim: usize,
    rows: Vec<Vec<(usize, V)>>,
}

impl<V: Clone + Zero> SparseMatrix<V> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[(usize, V)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> V {
        match self.rows[i].binary_search_by_key(&j, |(c, _)| *c) {
            Ok(k) => self.rows[i][k].1.clone(),
            Err(_) => V::zero(),
        }
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<V>> {
        let mut d = vec![vec![V::zero(); self.dim]; self.dim];
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row {
                d[i][*j] = v.clone();
            }
        }
        d
    }

    /// Re-index rows and columns: entry `(a, b)` of the result is entry `(order[a], order[b])`.
    pub fn reindexed(&self, order: &[usize]) -> Vec<Vec<V>> {
        order
            .iter()
            .map(|&i| order.iter().map(|&j| self.get(i, j)).collect())
            .collect()
    }
}

/// Partition lattice on `n` points with precomputed order relations and Möbius function.
#[derive(Debug)]
pub struct PartitionLattice {
    n: usize,
    partitions: Vec<SetPartition>,
    index: HashMap<Vec<usize>, usize>,
    // up[i]: partitions coarser than or equal to i, ascending index
    up: Vec<Vec<usize>>,
    mobius: SparseMatrix<Rational>,
}

static LATTICES: [OnceLock<PartitionLattice>; MAX_PHOTONS + 1] = [const { OnceLock::new() }; MAX_PHOTONS + 1];

impl PartitionLattice {
    /// Shared lattice for `n` photons, built on first use.
    pub fn get(n: usize) -> Result<&'static PartitionLattice> {
        capacity("photon number", n, MAX_PHOTONS)?;
        if n == 0 {
            return Err(Error::Argument("photon number must be at least 1".into()));
        }
        Ok(LATTICES[n].get_or_init(|| Self::build(n)))
    }

    fn build(n: usize) -> Self {
        let partitions = enumerate_partitions(n).expect("n within capacity");
        let index: HashMap<Vec<usize>, usize> = partitions
            .iter()
            .enumerate()
            .map(|(i, p)| (p.labels(), i))
            .collect();

        // Coarsenings of a partition with b blocks are the partitions of its blocks.
        let block_parts: Vec<Vec<SetPartition>> = (0..=n)
            .map(|b| if b == 0 { vec![] } else { enumerate_partitions(b).unwrap() })
            .collect();
        let up: Vec<Vec<usize>> = partitions
            .iter()
            .map(|p| {
                let own = p.labels();
                let mut ups: Vec<usize> = block_parts[p.num_blocks()]
                    .iter()
                    .map(|merge| {
                        let ml = merge.labels();
                        let merged: Vec<usize> = own.iter().map(|&b| ml[b]).collect();
                        index[&SetPartition::from_labels(&merged).labels()]
                    })
                    .collect();
                ups.sort_unstable();
                ups
            })
            .collect();

        let mobius = Self::invert(&partitions, &up);
        Self {
            n,
            partitions,
            index,
            up,
            mobius,
        }
    }

    /// Exact inverse of the unit-triangular coarsening matrix by forward
    /// elimination along a linear extension (finer partitions first).
    fn invert(partitions: &[SetPartition], up: &[Vec<usize>]) -> SparseMatrix<Rational> {
        let dim = partitions.len();
        let mut down: Vec<Vec<usize>> = vec![Vec::new(); dim];
        for (i, ups) in up.iter().enumerate() {
            for &j in ups {
                if j != i {
                    down[j].push(i);
                }
            }
        }
        let mut scratch = vec![Rational::zero(); dim];
        let mut rows = Vec::with_capacity(dim);
        for i in 0..dim {
            // Row i of mu satisfies sum_{k finer-or-equal j} mu[i][k] = delta_ij.
            let mut order = up[i].clone();
            order.sort_by_key(|&j| std::cmp::Reverse(partitions[j].num_blocks()));
            let mut row = Vec::with_capacity(order.len());
            for &j in &order {
                let mut acc = if j == i { Rational::one() } else { Rational::zero() };
                for &k in &down[j] {
                    acc -= scratch[k];
                }
                scratch[j] = acc;
            }
            for &j in &order {
                if !scratch[j].is_zero() {
                    row.push((j, scratch[j]));
                }
                scratch[j] = Rational::zero();
            }
            row.sort_unstable_by_key(|(j, _)| *j);
            rows.push(row);
        }
        SparseMatrix { dim, rows }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.partitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.is_empty()
    }

    pub fn partitions(&self) -> &[SetPartition] {
        &self.partitions
    }

    pub fn index_of(&self, p: &SetPartition) -> Result<usize> {
        if p.ground_size() != self.n {
            return Err(Error::Argument(format!(
                "partition of {} points in a lattice on {}",
                p.ground_size(),
                self.n
            )));
        }
        Ok(self.index[&p.labels()])
    }

    pub(crate) fn index_of_labels(&self, labels: &[usize]) -> usize {
        self.index[&SetPartition::from_labels(labels).labels()]
    }

    pub fn full_index(&self) -> usize {
        self.index[&vec![0; self.n]]
    }

    /// Indices of partitions coarser than or equal to partition `i`.
    pub fn coarser(&self, i: usize) -> &[usize] {
        &self.up[i]
    }

    pub fn coarsening(&self) -> SparseMatrix<u8> {
        SparseMatrix {
            dim: self.len(),
            rows: self.up.iter().map(|u| u.iter().map(|&j| (j, 1u8)).collect()).collect(),
        }
    }

    pub fn mobius(&self) -> &SparseMatrix<Rational> {
        &self.mobius
    }
}

/// `R[i][j] = 1` iff partition `j` is coarser than or equal to partition `i`.
pub fn coarsening_matrix(n: usize) -> Result<SparseMatrix<u8>> {
    Ok(PartitionLattice::get(n)?.coarsening())
}

/// Exact inverse of [`coarsening_matrix`].
pub fn mobius_matrix(n: usize) -> Result<SparseMatrix<Rational>> {
    Ok(PartitionLattice::get(n)?.mobius().clone())
}

/// The conventional listing of the five partitions of three photons:
/// `(12)(3), (13)(2), (23)(1), (123), (1)(2)(3)`.
pub fn conventional_order_3() -> Vec<SetPartition> {
    let p = |b: Vec<Vec<usize>>| SetPartition::new(3, b).unwrap();
    vec![
        p(vec![vec![0, 1], vec![2]]),
        p(vec![vec![0, 2], vec![1]]),
        p(vec![vec![1, 2], vec![0]]),
        p(vec![vec![0, 1, 2]]),
        p(vec![vec![0], vec![1], vec![2]]),
    ]
}

/// Canonical indices of [`conventional_order_3`].
pub fn conventional_reindex_3() -> Vec<usize> {
    let lat = PartitionLattice::get(3).unwrap();
    conventional_order_3().iter().map(|p| lat.index_of(p).unwrap()).collect()
}

/// Dense exact inverse by Gauss–Jordan elimination; `None` if singular.
pub fn exact_inverse(a: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a.to_vec();
    let mut inv: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        inv.swap(col, piv);
        let p = m[col][col];
        for j in 0..n {
            m[col][j] /= p;
            inv[col][j] /= p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col];
                for j in 0..n {
                    let (mc, ic) = (m[col][j], inv[col][j]);
                    m[r][j] -= f * mc;
                    inv[r][j] -= f * ic;
                }
            }
        }
    }
    Some(inv)
}
