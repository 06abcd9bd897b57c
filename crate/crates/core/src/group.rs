//! Cached tables over `S_n`: elements in lexicographic order, inverses,
//! conjugacy classes and induced partitions.

use std::sync::OnceLock;

use crate::combinatorics::{cycle_type, enumerate_permutations, induced_partition, CycleType, Permutation, MAX_PHOTONS};
use crate::error::{capacity, Error, Result};
use crate::lattice::PartitionLattice;

#[derive(Debug)]
pub struct SymmetricGroup {
    n: usize,
    elements: Vec<Permutation>,
    inverse: Vec<usize>,
    class_of: Vec<usize>,
    classes: Vec<(CycleType, Vec<usize>)>,
    partition_of: Vec<usize>,
}

static GROUPS: [OnceLock<SymmetricGroup>; MAX_PHOTONS + 1] = [const { OnceLock::new() }; MAX_PHOTONS + 1];

impl SymmetricGroup {
    pub fn get(n: usize) -> Result<&'static SymmetricGroup> {
        capacity("photon number", n, MAX_PHOTONS)?;
        if n == 0 {
            return Err(Error::Argument("photon number must be at least 1".into()));
        }
        let lattice = PartitionLattice::get(n)?;
        Ok(GROUPS[n].get_or_init(|| Self::build(n, lattice)))
    }

    fn build(n: usize, lattice: &PartitionLattice) -> Self {
        let elements = enumerate_permutations(n).expect("n within capacity");
        let inverse = elements.iter().map(|p| p.inverse().rank()).collect();
        let mut classes: Vec<(CycleType, Vec<usize>)> = Vec::new();
        let mut class_of = Vec::with_capacity(elements.len());
        for (r, p) in elements.iter().enumerate() {
            let ct = cycle_type(p);
            match classes.iter().position(|(t, _)| *t == ct) {
                Some(k) => {
                    classes[k].1.push(r);
                    class_of.push(k);
                }
                None => {
                    class_of.push(classes.len());
                    classes.push((ct, vec![r]));
                }
            }
        }
        let partition_of = elements
            .iter()
            .map(|p| lattice.index_of(&induced_partition(p)).expect("same ground set"))
            .collect();
        Self {
            n,
            elements,
            inverse,
            class_of,
            classes,
            partition_of,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn inverse_index(&self, r: usize) -> usize {
        self.inverse[r]
    }

    pub fn class_of(&self, r: usize) -> usize {
        self.class_of[r]
    }

    /// Conjugacy classes as (cycle type, member ranks).
    pub fn classes(&self) -> &[(CycleType, Vec<usize>)] {
        &self.classes
    }

    /// Lattice index of the partition induced by element `r`.
    pub fn partition_of(&self, r: usize) -> usize {
        self.partition_of[r]
    }
}
