//! Partitions of a finite ground set `0..n` and the refinement lattice.
//!
//! A partition is stored as a restricted growth string: `labels[x]` is the
//! index of the block containing `x`, blocks numbered in order of their
//! least element. This makes the representation canonical, so derived
//! `Eq`/`Hash` coincide with equality of partitions.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A subset of a ground set with at most 64 points.
#[derive(Copy, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset(pub u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn full(ground: usize) -> Subset {
        debug_assert!(ground <= 64);
        if ground == 64 {
            Subset(u64::MAX)
        } else {
            Subset((1u64 << ground) - 1)
        }
    }

    pub fn singleton(x: usize) -> Subset {
        Subset(1u64 << x)
    }

    pub fn from_iter<I: IntoIterator<Item = usize>>(items: I) -> Subset {
        Subset(items.into_iter().fold(0u64, |m, x| m | (1u64 << x)))
    }

    pub fn contains(self, x: usize) -> bool {
        x < 64 && self.0 >> x & 1 == 1
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn complement(self, ground: usize) -> Subset {
        Subset(!self.0 & Subset::full(ground).0)
    }

    pub fn is_subset(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let x = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(x)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for Subset {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_vec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Subset {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let items = Vec::<usize>::deserialize(d)?;
        if let Some(&x) = items.iter().find(|&&x| x >= 64) {
            return Err(serde::de::Error::custom(format!(
                "subset element {x} exceeds the 64-point limit"
            )));
        }
        Ok(Subset::from_iter(items))
    }
}

pub(crate) struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let grand = self.parent[self.parent[x] as usize];
            self.parent[x] = grand;
            x = grand as usize;
        }
        x
    }

    /// Returns true when the two classes were distinct.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        // keep the smaller index as root so labels stay stable
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo as u32;
        true
    }

    pub(crate) fn into_partition(mut self) -> SetPartition {
        let n = self.parent.len();
        let roots: Vec<usize> = (0..n).map(|x| self.find(x)).collect();
        SetPartition::from_labels(&roots)
    }
}

/// A partition of `0..ground` in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    labels: Vec<u32>,
    blocks: u32,
}

impl SetPartition {
    /// Normalizes arbitrary block labels into canonical form.
    pub fn from_labels<T: Eq + Hash>(labels: &[T]) -> SetPartition {
        let mut seen: HashMap<&T, u32> = HashMap::with_capacity(labels.len());
        let mut out = Vec::with_capacity(labels.len());
        for l in labels {
            let next = seen.len() as u32;
            out.push(*seen.entry(l).or_insert(next));
        }
        SetPartition {
            blocks: seen.len() as u32,
            labels: out,
        }
    }

    pub fn from_blocks(ground: usize, blocks: &[Vec<usize>]) -> Result<SetPartition> {
        let mut labels = vec![usize::MAX; ground];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &x in block {
                if x >= ground {
                    return Err(Error::InvalidPartition(format!(
                        "element {x} outside ground set of size {ground}"
                    )));
                }
                if labels[x] != usize::MAX {
                    return Err(Error::InvalidPartition(format!("element {x} repeated")));
                }
                labels[x] = b;
            }
        }
        if let Some(x) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::InvalidPartition(format!("element {x} not covered")));
        }
        Ok(SetPartition::from_labels(&labels))
    }

    /// Partition into singletons, the bottom of the refinement order.
    pub fn discrete(ground: usize) -> SetPartition {
        SetPartition {
            labels: (0..ground as u32).collect(),
            blocks: ground as u32,
        }
    }

    /// The one-block partition `{ground}`, the top of the refinement order.
    pub fn indiscrete(ground: usize) -> SetPartition {
        SetPartition {
            labels: vec![0; ground],
            blocks: u32::from(ground > 0),
        }
    }

    /// The partition of the domain of `f` into nonempty fibers.
    pub fn kernel<T: Eq + Hash>(f: &[T]) -> Result<SetPartition> {
        if f.is_empty() {
            return Err(Error::EmptyGround);
        }
        Ok(SetPartition::from_labels(f))
    }

    /// `{f⁻¹(R) | R ∈ p}` with empty preimages dropped.
    pub fn preimage(f: &[usize], p: &SetPartition) -> Result<SetPartition> {
        let mut labels = Vec::with_capacity(f.len());
        for &y in f {
            if y >= p.ground() {
                return Err(Error::GroundMismatch {
                    left: y + 1,
                    right: p.ground(),
                });
            }
            labels.push(p.labels[y]);
        }
        Ok(SetPartition::from_labels(&labels))
    }

    pub fn ground(&self) -> usize {
        self.labels.len()
    }

    pub fn block_count(&self) -> usize {
        self.blocks as usize
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> usize {
        self.labels[x] as usize
    }

    pub fn same_block(&self, x: usize, y: usize) -> bool {
        self.labels[x] == self.labels[y]
    }

    pub fn is_discrete(&self) -> bool {
        self.block_count() == self.ground()
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.block_count()];
        for (x, &l) in self.labels.iter().enumerate() {
            out[l as usize].push(x);
        }
        out
    }

    pub fn block_masks(&self) -> Result<Vec<Subset>> {
        if self.ground() > 64 {
            return Err(Error::GroundTooLarge(self.ground()));
        }
        let mut out = vec![Subset::EMPTY; self.block_count()];
        for (x, &l) in self.labels.iter().enumerate() {
            out[l as usize].0 |= 1u64 << x;
        }
        Ok(out)
    }

    fn check_ground(&self, other: &SetPartition) -> Result<()> {
        if self.ground() != other.ground() {
            return Err(Error::GroundMismatch {
                left: self.ground(),
                right: other.ground(),
            });
        }
        Ok(())
    }

    /// True iff every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &SetPartition) -> Result<bool> {
        self.check_ground(other)?;
        let mut image = vec![u32::MAX; self.block_count()];
        for (x, &l) in self.labels.iter().enumerate() {
            let slot = &mut image[l as usize];
            if *slot == u32::MAX {
                *slot = other.labels[x];
            } else if *slot != other.labels[x] {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn meet(&self, other: &SetPartition) -> Result<SetPartition> {
        self.check_ground(other)?;
        let pairs: Vec<(u32, u32)> = self
            .labels
            .iter()
            .zip(&other.labels)
            .map(|(&a, &b)| (a, b))
            .collect();
        Ok(SetPartition::from_labels(&pairs))
    }

    pub fn join(&self, other: &SetPartition) -> Result<SetPartition> {
        self.check_ground(other)?;
        let mut uf = UnionFind::new(self.ground());
        for p in [self, other] {
            let mut first = vec![usize::MAX; p.block_count()];
            for (x, &l) in p.labels.iter().enumerate() {
                let f = &mut first[l as usize];
                if *f == usize::MAX {
                    *f = x;
                } else {
                    uf.union(*f, x);
                }
            }
        }
        Ok(uf.into_partition())
    }

    /// All partitions of `0..n` in restricted-growth-string order.
    pub fn all(n: usize) -> Vec<SetPartition> {
        let mut out = Vec::new();
        if n == 0 {
            out.push(SetPartition::discrete(0));
            return out;
        }
        let mut rgs = vec![0u32; n];
        let mut maxes = vec![0u32; n];
        loop {
            out.push(SetPartition {
                labels: rgs.clone(),
                blocks: maxes[n - 1] + 1,
            });
            // find the rightmost position that can be incremented
            let mut i = n - 1;
            loop {
                if i == 0 {
                    return out;
                }
                if rgs[i] <= maxes[i - 1] {
                    break;
                }
                i -= 1;
            }
            rgs[i] += 1;
            maxes[i] = maxes[i - 1].max(rgs[i]);
            for j in i + 1..n {
                rgs[j] = 0;
                maxes[j] = maxes[i];
            }
        }
    }

    /// Every partition that `self` refines, i.e. the principal filter of `self`.
    pub fn coarsenings(&self) -> Vec<SetPartition> {
        SetPartition::all(self.block_count())
            .into_iter()
            .map(|q| {
                let lifted: Vec<u32> = self.labels.iter().map(|&l| q.labels[l as usize]).collect();
                SetPartition::from_labels(&lifted)
            })
            .collect()
    }
}

impl fmt::Debug for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.blocks())
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks()
            .iter()
            .map(|b| b.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(""))
            .collect();
        write!(f, "{}", parts.join("|"))
    }
}

impl Serialize for SetPartition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.blocks().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SetPartition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let blocks = Vec::<Vec<usize>>::deserialize(d)?;
        let ground = blocks.iter().map(Vec::len).sum();
        SetPartition::from_blocks(ground, &blocks).map_err(serde::de::Error::custom)
    }
}

/// Hasse diagram of the refinement lattice on `0..n` in DOT format.
pub fn refinement_lattice_dot(n: usize) -> String {
    let all = SetPartition::all(n);
    let mut out = String::from("digraph refinement {\n  rankdir=BT;\n");
    for (i, p) in all.iter().enumerate() {
        out.push_str(&format!("  p{i} [label=\"{p}\"];\n"));
    }
    for (i, p) in all.iter().enumerate() {
        for (j, q) in all.iter().enumerate() {
            // q covers p exactly when it merges two blocks of p
            if q.block_count() + 1 == p.block_count() && p.refines(q).unwrap_or(false) {
                out.push_str(&format!("  p{i} -> p{j};\n"));
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(blocks: &[&[usize]]) -> SetPartition {
        let blocks: Vec<Vec<usize>> = blocks.iter().map(|b| b.to_vec()).collect();
        let ground = blocks.iter().map(Vec::len).sum();
        SetPartition::from_blocks(ground, &blocks).unwrap()
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(SetPartition::kernel(&['a', 'a', 'b']).unwrap(), p(&[&[0, 1], &[2]]));
        assert_eq!(SetPartition::kernel(&['a', 'a', 'a']).unwrap(), p(&[&[0, 1, 2]]));
        assert_eq!(SetPartition::kernel::<u8>(&[]), Err(Error::EmptyGround));
    }

    #[test]
    fn canonical_form_is_unique() {
        let a = p(&[&[2], &[1, 0]]);
        let b = p(&[&[0, 1], &[2]]);
        assert_eq!(a, b);
        assert_eq!(a.blocks(), vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn refines_examples() {
        let q = p(&[&[0, 1], &[2]]);
        assert!(SetPartition::discrete(3).refines(&q).unwrap());
        assert!(q.refines(&q).unwrap());
        assert!(!q.refines(&SetPartition::discrete(3)).unwrap());
        assert!(matches!(
            q.refines(&SetPartition::discrete(4)),
            Err(Error::GroundMismatch { .. })
        ));
    }

    #[test]
    fn meet_and_join_examples() {
        let a = p(&[&[0, 1], &[2, 3]]);
        let b = p(&[&[0, 2], &[1, 3]]);
        assert_eq!(a.meet(&b).unwrap(), SetPartition::discrete(4));
        assert_eq!(a.meet(&a).unwrap(), a);
        assert_eq!(a.meet(&SetPartition::indiscrete(4)).unwrap(), a);

        let c = p(&[&[1, 2], &[0], &[3]]);
        assert_eq!(a.join(&c).unwrap(), SetPartition::indiscrete(4));
        assert_eq!(a.join(&a).unwrap(), a);
        assert_eq!(a.join(&SetPartition::discrete(4)).unwrap(), a);
    }

    #[test]
    fn preimage_examples() {
        let q = p(&[&[0], &[1]]);
        assert_eq!(SetPartition::preimage(&[0, 1], &q).unwrap(), q);
        assert_eq!(
            SetPartition::preimage(&[0, 0, 1], &q).unwrap(),
            p(&[&[0, 1], &[2]])
        );
    }

    #[test]
    fn bell_numbers() {
        let counts: Vec<usize> = (0..=6).map(|n| SetPartition::all(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 15, 52, 203]);
    }

    #[test]
    fn coarsenings_are_principal_filter() {
        let q = p(&[&[0, 1], &[2], &[3]]);
        let ups = q.coarsenings();
        let expected: Vec<_> = SetPartition::all(4)
            .into_iter()
            .filter(|r| q.refines(r).unwrap())
            .collect();
        assert_eq!(ups.len(), expected.len());
        for r in &expected {
            assert!(ups.contains(r));
        }
    }

    #[test]
    fn json_shape() {
        let q = p(&[&[0, 1], &[2]]);
        assert_eq!(serde_json::to_string(&q).unwrap(), "[[0,1],[2]]");
        let back: SetPartition = serde_json::from_str("[[2],[0,1]]").unwrap();
        assert_eq!(back, q);
        assert!(serde_json::from_str::<SetPartition>("[[0,0],[1]]").is_err());
    }

    #[test]
    fn dot_has_covers() {
        let dot = refinement_lattice_dot(3);
        assert_eq!(dot.matches("->").count(), 6);
    }
}
