//! Permutations, set partitions, cycle types and Fock-pattern enumeration.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{capacity, Error, Result};

/// Largest photon number handled by any enumeration.
pub const MAX_PHOTONS: usize = 8;
/// Largest number of external modes handled by any enumeration.
pub const MAX_MODES: usize = 16;

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u64 = 1;
    for i in 0..k {
        r = r * (n - i) as u64 / (i + 1) as u64;
    }
    r
}

/// Bell numbers via the Bell triangle.
pub fn bell_number(n: usize) -> u64 {
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = vec![*row.last().unwrap()];
        for &x in &row {
            let last = *next.last().unwrap();
            next.push(last + x);
        }
        row = next;
    }
    row[0]
}

/// Number of integer partitions of `n`.
pub fn partition_count(n: usize) -> u64 {
    let mut p = vec![0u64; n + 1];
    p[0] = 1;
    for k in 1..=n {
        for i in k..=n {
            p[i] += p[i - k];
        }
    }
    p[n]
}

/// A bijection on `{0..n-1}`, stored as its image sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    map: Vec<usize>,
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Permutation::new(v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.map
    }
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &x in &map {
            if x >= n || seen[x] {
                return Err(Error::Argument(format!("{map:?} is not a permutation")));
            }
            seen[x] = true;
        }
        Ok(Self { map })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            map: (0..n).collect(),
        }
    }

    /// Swap of `a` and `b` on `n` points.
    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Self> {
        if a >= n || b >= n {
            return Err(Error::IndexOutOfRange {
                index: a.max(b),
                dim: n,
            });
        }
        let mut map: Vec<usize> = (0..n).collect();
        map.swap(a, b);
        Ok(Self { map })
    }

    /// The cycle `elems[0] -> elems[1] -> ... -> elems[0]`, fixing everything else.
    pub fn cycle(n: usize, elems: &[usize]) -> Result<Self> {
        let mut map: Vec<usize> = (0..n).collect();
        for (k, &e) in elems.iter().enumerate() {
            if e >= n {
                return Err(Error::IndexOutOfRange { index: e, dim: n });
            }
            map[e] = elems[(k + 1) % elems.len()];
        }
        Self::new(map)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (i, &x) in self.map.iter().enumerate() {
            inv[x] = i;
        }
        Self { map: inv }
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::Dimension(format!(
                "cannot compose permutations on {} and {} points",
                self.len(),
                other.len()
            )));
        }
        Ok(Self {
            map: other.map.iter().map(|&j| self.map[j]).collect(),
        })
    }

    /// Position in the lexicographic order of `S_n` (Lehmer code).
    pub fn rank(&self) -> usize {
        let n = self.map.len();
        let mut r = 0usize;
        for i in 0..n {
            let smaller = self.map[i + 1..].iter().filter(|&&x| x < self.map[i]).count();
            r += smaller * factorial(n - 1 - i) as usize;
        }
        r
    }

    pub fn from_rank(n: usize, mut rank: usize) -> Result<Self> {
        capacity("photon number", n, MAX_PHOTONS)?;
        if rank >= factorial(n) as usize {
            return Err(Error::IndexOutOfRange {
                index: rank,
                dim: factorial(n) as usize,
            });
        }
        let mut pool: Vec<usize> = (0..n).collect();
        let mut map = Vec::with_capacity(n);
        for i in 0..n {
            let f = factorial(n - 1 - i) as usize;
            map.push(pool.remove(rank / f));
            rank %= f;
        }
        Ok(Self { map })
    }

    /// Disjoint cycles, each starting at its smallest element, ordered by that element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.map.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cyc = vec![start];
            seen[start] = true;
            let mut j = self.map[start];
            while j != start {
                seen[j] = true;
                cyc.push(j);
                j = self.map[j];
            }
            out.push(cyc);
        }
        out
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation with 1-based labels, e.g. `(1,2)(3)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for cyc in self.cycles() {
            let labels: Vec<String> = cyc.iter().map(|i| (i + 1).to_string()).collect();
            write!(f, "({})", labels.join(","))?;
        }
        Ok(())
    }
}

/// All of `S_n` in lexicographic order of the image sequence.
pub fn enumerate_permutations(n: usize) -> Result<Vec<Permutation>> {
    if n == 0 {
        return Err(Error::Argument("photon number must be at least 1".into()));
    }
    capacity("photon number", n, MAX_PHOTONS)?;
    let total = factorial(n) as usize;
    let mut out = Vec::with_capacity(total);
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(Permutation { map: cur.clone() });
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    debug_assert_eq!(out.len(), total);
    Ok(out)
}

/// A set partition of `{0..n-1}` in canonical form: each block sorted, blocks
/// ordered by their smallest element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .filter(|b| !b.is_empty())
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        for b in &blocks {
            for &x in b {
                if x >= n {
                    return Err(Error::IndexOutOfRange { index: x, dim: n });
                }
                if seen[x] {
                    return Err(Error::Argument(format!("element {x} appears in two blocks")));
                }
                seen[x] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::Argument(format!("element {missing} is not covered")));
        }
        blocks.sort_by_key(|b| b[0]);
        Ok(Self { n, blocks })
    }

    /// Build from a block label per element (any labels; equal labels share a block).
    pub fn from_labels(labels: &[usize]) -> Self {
        let n = labels.len();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut map: Vec<(usize, usize)> = Vec::new();
        for (i, &l) in labels.iter().enumerate() {
            match map.iter().find(|(k, _)| *k == l) {
                Some(&(_, b)) => blocks[b].push(i),
                None => {
                    map.push((l, blocks.len()));
                    blocks.push(vec![i]);
                }
            }
        }
        Self { n, blocks }
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            n,
            blocks: (0..n).map(|i| vec![i]).collect(),
        }
    }

    pub fn full(n: usize) -> Self {
        Self {
            n,
            blocks: vec![(0..n).collect()],
        }
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_full(&self) -> bool {
        self.blocks.len() == 1
    }

    /// Canonical block index of each element (a restricted growth string).
    pub fn labels(&self) -> Vec<usize> {
        let mut l = vec![0; self.n];
        for (b, block) in self.blocks.iter().enumerate() {
            for &x in block {
                l[x] = b;
            }
        }
        l
    }

    /// A permutation whose orbits are exactly these blocks.
    pub fn representative(&self) -> Permutation {
        let mut map: Vec<usize> = (0..self.n).collect();
        for b in &self.blocks {
            for (k, &e) in b.iter().enumerate() {
                map[e] = b[(k + 1) % b.len()];
            }
        }
        Permutation { map }
    }

    pub fn cycle_type(&self) -> CycleType {
        CycleType::new(self.blocks.iter().map(Vec::len).collect())
    }
}

impl fmt::Display for SetPartition {
    /// Cycle-style notation with 1-based labels, e.g. `(1,2)(3)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.blocks {
            let labels: Vec<String> = b.iter().map(|i| (i + 1).to_string()).collect();
            write!(f, "({})", labels.join(","))?;
        }
        Ok(())
    }
}

/// Multiset of cycle lengths, stored nonincreasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CycleType(Vec<usize>);

impl CycleType {
    pub fn new(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self(parts)
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

pub fn induced_partition(sigma: &Permutation) -> SetPartition {
    let mut blocks = sigma.cycles();
    for b in &mut blocks {
        b.sort_unstable();
    }
    SetPartition {
        n: sigma.len(),
        blocks,
    }
}

pub fn cycle_type(sigma: &Permutation) -> CycleType {
    CycleType::new(sigma.cycles().iter().map(Vec::len).collect())
}

/// True iff `lambda` is coarser than or equal to `pi`: every block of `pi`
/// sits inside one block of `lambda`.
pub fn is_coarser(lambda: &SetPartition, pi: &SetPartition) -> Result<bool> {
    if lambda.n != pi.n {
        return Err(Error::Argument(format!(
            "partitions over ground sets of size {} and {}",
            lambda.n, pi.n
        )));
    }
    Ok(coarser_labels(&lambda.labels(), pi))
}

pub(crate) fn coarser_labels(lambda_labels: &[usize], pi: &SetPartition) -> bool {
    pi.blocks.iter().all(|b| {
        let l = lambda_labels[b[0]];
        b.iter().all(|&x| lambda_labels[x] == l)
    })
}

/// All set partitions of `{0..n-1}`, canonical and sorted lexicographically by block list.
pub fn enumerate_partitions(n: usize) -> Result<Vec<SetPartition>> {
    capacity("photon number", n, MAX_PHOTONS)?;
    let mut out = Vec::with_capacity(bell_number(n) as usize);
    let mut rgs = vec![0usize; n];
    fn rec(i: usize, max: usize, rgs: &mut Vec<usize>, out: &mut Vec<SetPartition>) {
        if i == rgs.len() {
            out.push(SetPartition::from_labels(rgs));
            return;
        }
        for l in 0..=max + 1 {
            rgs[i] = l;
            rec(i + 1, max.max(l), rgs, out);
        }
    }
    if n == 0 {
        out.push(SetPartition {
            n: 0,
            blocks: vec![],
        });
    } else {
        rec(1, 0, &mut rgs, &mut out);
    }
    out.sort();
    Ok(out)
}

/// Photon count per external mode.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ModeOccupation(Vec<usize>);

impl ModeOccupation {
    pub fn new(counts: Vec<usize>) -> Self {
        Self(counts)
    }

    /// One photon in each of the first `n` of `m` modes.
    pub fn first_modes(n: usize, m: usize) -> Result<Self> {
        if n > m {
            return Err(Error::Argument(format!("{n} photons do not fit singly into {m} modes")));
        }
        Ok(Self((0..m).map(|i| usize::from(i < n)).collect()))
    }

    pub fn from_modes(m: usize, occupied: &[usize]) -> Result<Self> {
        let mut counts = vec![0; m];
        for &k in occupied {
            if k >= m {
                return Err(Error::IndexOutOfRange { index: k, dim: m });
            }
            counts[k] += 1;
        }
        Ok(Self(counts))
    }

    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn photons(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn to_assignment(&self) -> ModeAssignment {
        let mut d = Vec::with_capacity(self.photons());
        for (k, &c) in self.0.iter().enumerate() {
            d.extend(std::iter::repeat_n(k, c));
        }
        ModeAssignment(d)
    }

    pub fn from_assignment(m: usize, d: &ModeAssignment) -> Result<Self> {
        Self::from_modes(m, &d.0)
    }

    /// Pipe-separated counts, e.g. `1|1|0`.
    pub fn to_pipe_string(&self) -> String {
        self.0.iter().map(usize::to_string).collect::<Vec<_>>().join("|")
    }

    pub fn parse_pipe(s: &str) -> Result<Self> {
        s.split('|')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Malformed(format!("bad pattern entry {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

impl fmt::Display for ModeOccupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_pipe_string())
    }
}

/// Mode index of each photon, nondecreasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ModeAssignment(Vec<usize>);

impl ModeAssignment {
    /// Canonicalizes by sorting.
    pub fn new(mut modes: Vec<usize>) -> Self {
        modes.sort_unstable();
        Self(modes)
    }

    pub fn modes(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// All occupations of `m` modes by `n` photons, in descending lexicographic
/// order (all photons in the first mode comes first).
pub fn enumerate_patterns(n: usize, m: usize) -> Result<Vec<ModeOccupation>> {
    capacity("photon number", n, MAX_PHOTONS)?;
    capacity("mode number", m, MAX_MODES)?;
    if m == 0 {
        return Err(Error::Argument("mode number must be at least 1".into()));
    }
    let mut out = Vec::with_capacity(binomial(n + m - 1, m - 1) as usize);
    let mut cur = vec![0usize; m];
    fn rec(k: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<ModeOccupation>) {
        if k + 1 == cur.len() {
            cur[k] = left;
            out.push(ModeOccupation(cur.clone()));
            return;
        }
        for c in (0..=left).rev() {
            cur[k] = c;
            rec(k + 1, left - c, cur, out);
        }
    }
    rec(0, n, &mut cur, &mut out);
    Ok(out)
}

/// `∏ n_i!`
pub fn multiplicity_factor(occ: &ModeOccupation) -> u64 {
    occ.0.iter().map(|&c| factorial(c)).product()
}
