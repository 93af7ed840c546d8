//! Filters on partition lattices, the Boolean algebra of their blocks, and
//! filters on that Boolean algebra.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{SetPartition, Subset};

/// A filter on `Π(ground)` given by a finite list of generators.
///
/// On a finite lattice every filter is principal, so membership only needs
/// the meet of the generators, which is computed once at construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartitionFilter {
    ground: usize,
    generators: Vec<SetPartition>,
    bottom: SetPartition,
}

#[derive(Serialize, Deserialize)]
struct FilterRepr {
    ground: usize,
    generators: Vec<SetPartition>,
}

impl Serialize for PartitionFilter {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FilterRepr {
            ground: self.ground,
            generators: self.generators.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PartitionFilter {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = FilterRepr::deserialize(d)?;
        PartitionFilter::generate(repr.ground, repr.generators).map_err(serde::de::Error::custom)
    }
}

impl PartitionFilter {
    /// The filter generated by `base`. An empty base generates `{ {ground} }`.
    pub fn generate(ground: usize, base: Vec<SetPartition>) -> Result<PartitionFilter> {
        if ground == 0 {
            return Err(Error::EmptyGround);
        }
        let mut bottom = SetPartition::indiscrete(ground);
        for p in &base {
            bottom = bottom.meet(p)?;
        }
        Ok(PartitionFilter {
            ground,
            generators: base,
            bottom,
        })
    }

    pub fn principal(p: SetPartition) -> Result<PartitionFilter> {
        PartitionFilter::generate(p.ground(), vec![p])
    }

    /// All of `Π(ground)`.
    pub fn full(ground: usize) -> Result<PartitionFilter> {
        PartitionFilter::principal(SetPartition::discrete(ground))
    }

    /// Every filter on `Π(ground)`, one per partition (its least element).
    pub fn all(ground: usize) -> Result<Vec<PartitionFilter>> {
        SetPartition::all(ground)
            .into_iter()
            .map(PartitionFilter::principal)
            .collect()
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    pub fn generators(&self) -> &[SetPartition] {
        &self.generators
    }

    /// The meet of all generators: the least member of the filter.
    pub fn bottom(&self) -> &SetPartition {
        &self.bottom
    }

    pub fn contains(&self, p: &SetPartition) -> Result<bool> {
        self.bottom.refines(p)
    }

    /// Every member, listed explicitly.
    pub fn members(&self) -> Vec<SetPartition> {
        self.bottom.coarsenings()
    }
}

/// The Boolean algebra `{∅} ∪ ⋃F` of blocks of members of a partition filter,
/// stored as an explicit sorted family of subsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockBooleanAlgebra {
    ground: usize,
    atoms: Vec<Subset>,
    elements: Vec<Subset>,
}

impl BlockBooleanAlgebra {
    /// The blocks of members of `f` are exactly the unions of blocks of its
    /// least member: merging any chosen blocks of the bottom gives a
    /// coarsening with that union as a block.
    pub fn of_filter(f: &PartitionFilter) -> Result<BlockBooleanAlgebra> {
        let ground = f.ground();
        if ground > 64 {
            return Err(Error::GroundTooLarge(ground));
        }
        let blocks = f.bottom().block_masks()?;
        if blocks.len() > 12 {
            return Err(Error::CapExceeded {
                what: "block algebra atoms",
                needed: blocks.len() as u128,
                cap: 12,
            });
        }
        let mut elements: Vec<Subset> = (0..1u64 << blocks.len())
            .map(|m| {
                blocks
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| m >> k & 1 == 1)
                    .fold(Subset::EMPTY, |acc, (_, &b)| acc.union(b))
            })
            .collect();
        elements.sort_unstable();
        let ba = BlockBooleanAlgebra::from_elements(ground, elements)?;
        ba.verify_closed()?;
        Ok(ba)
    }

    /// The full power set of `0..ground`.
    pub fn power_set(ground: usize) -> Result<BlockBooleanAlgebra> {
        if ground > 20 {
            return Err(Error::CapExceeded {
                what: "explicit power set",
                needed: 1u128 << ground,
                cap: 1 << 20,
            });
        }
        let elements = (0..1u64 << ground).map(Subset).collect();
        BlockBooleanAlgebra::from_elements(ground, elements)
    }

    fn from_elements(ground: usize, elements: Vec<Subset>) -> Result<BlockBooleanAlgebra> {
        let atoms = elements
            .iter()
            .copied()
            .filter(|a| !a.is_empty())
            .filter(|a| {
                elements
                    .iter()
                    .all(|b| b.is_empty() || b == a || !b.is_subset(*a))
            })
            .collect();
        Ok(BlockBooleanAlgebra {
            ground,
            atoms,
            elements,
        })
    }

    fn verify_closed(&self) -> Result<()> {
        let top = Subset::full(self.ground);
        let has = |s: Subset| self.elements.binary_search(&s).is_ok();
        if !has(Subset::EMPTY) || !has(top) {
            return Err(Error::InvalidFilter("block algebra misses ∅ or I".into()));
        }
        for &a in &self.elements {
            if !has(a.complement(self.ground)) {
                return Err(Error::InvalidFilter(format!("complement of {a:?} missing")));
            }
            for &b in &self.elements {
                if !has(a.union(b)) || !has(a.intersection(b)) {
                    return Err(Error::InvalidFilter(format!(
                        "{a:?} and {b:?} not closed under ∪/∩"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    pub fn elements(&self) -> &[Subset] {
        &self.elements
    }

    pub fn atoms(&self) -> &[Subset] {
        &self.atoms
    }

    pub fn top(&self) -> Subset {
        Subset::full(self.ground)
    }

    pub fn contains(&self, s: Subset) -> bool {
        self.elements.binary_search(&s).is_ok()
    }

    pub fn is_atom(&self, s: Subset) -> bool {
        self.atoms.contains(&s)
    }

    /// All filters, including the improper one, in element order of their
    /// least member.
    pub fn filters(&self) -> Vec<BAFilter> {
        self.elements
            .iter()
            .map(|&g| BAFilter::principal_unchecked(self, g))
            .collect()
    }

    /// Hasse diagram of the algebra ordered by inclusion, in DOT format.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph blocks {\n  rankdir=BT;\n");
        for (i, e) in self.elements.iter().enumerate() {
            let label: Vec<String> = e.iter().map(|x| x.to_string()).collect();
            out.push_str(&format!("  b{i} [label=\"{{{}}}\"];\n", label.join(",")));
        }
        for (i, a) in self.elements.iter().enumerate() {
            for (j, b) in self.elements.iter().enumerate() {
                if a != b
                    && a.is_subset(*b)
                    && self.atoms.iter().any(|&t| a.union(t) == *b && !t.is_subset(*a))
                {
                    out.push_str(&format!("  b{i} -> b{j};\n"));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

impl Serialize for BlockBooleanAlgebra {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.elements.serialize(s)
    }
}

/// A filter on a finite block Boolean algebra.
///
/// Every such filter is principal; it is stored by its least member, so
/// `R ∈ Z` iff `R ⊇ generator`. The improper filter (generator `∅`) is a
/// legal value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BAFilter {
    ground: usize,
    generator: Subset,
    proper: bool,
    ultra: bool,
}

impl BAFilter {
    pub fn principal(ba: &BlockBooleanAlgebra, generator: Subset) -> Result<BAFilter> {
        if !ba.contains(generator) {
            return Err(Error::InvalidFilter(format!(
                "{generator:?} is not an element of the block algebra"
            )));
        }
        Ok(BAFilter::principal_unchecked(ba, generator))
    }

    fn principal_unchecked(ba: &BlockBooleanAlgebra, generator: Subset) -> BAFilter {
        BAFilter {
            ground: ba.ground,
            generator,
            proper: !generator.is_empty(),
            ultra: ba.is_atom(generator),
        }
    }

    /// Principal filter on the full power set of `0..ground`, without
    /// materializing the power set.
    pub fn principal_in_power_set(ground: usize, generator: Subset) -> BAFilter {
        BAFilter {
            ground,
            generator,
            proper: !generator.is_empty(),
            ultra: generator.len() == 1,
        }
    }

    /// Validates an explicit member list against the filter axioms.
    pub fn from_members(ba: &BlockBooleanAlgebra, members: &[Subset]) -> Result<BAFilter> {
        let set: BTreeSet<Subset> = members.iter().copied().collect();
        for &m in &set {
            if !ba.contains(m) {
                return Err(Error::InvalidFilter(format!("{m:?} not in block algebra")));
            }
        }
        if !set.contains(&ba.top()) {
            return Err(Error::InvalidFilter("filter must contain the ground set".into()));
        }
        let generator = set
            .iter()
            .fold(ba.top(), |acc, &m| acc.intersection(m));
        if !set.contains(&generator) {
            return Err(Error::InvalidFilter("not closed under intersection".into()));
        }
        // with its meet present, the family is a filter iff it is the full up-set
        let upset = ba
            .elements()
            .iter()
            .filter(|e| generator.is_subset(**e))
            .count();
        if upset != set.len() {
            return Err(Error::InvalidFilter("not upward closed".into()));
        }
        Ok(BAFilter::principal_unchecked(ba, generator))
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    pub fn generator(&self) -> Subset {
        self.generator
    }

    pub fn is_proper(&self) -> bool {
        self.proper
    }

    pub fn is_ultra(&self) -> bool {
        self.ultra
    }

    pub fn contains(&self, r: Subset) -> bool {
        self.generator.is_subset(r)
    }

    pub fn members(&self, ba: &BlockBooleanAlgebra) -> Vec<Subset> {
        ba.elements()
            .iter()
            .copied()
            .filter(|&e| self.contains(e))
            .collect()
    }
}
