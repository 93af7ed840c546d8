//! Congruences of finite algebras: compatibility, principal congruences, the
//! full congruence lattice, permutability and the simple / subdirectly
//! irreducible / directly indecomposable classification.

use std::collections::{HashSet, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{direct_product, Algebra, Element, CARRIER_CAP};
use crate::error::{Error, Result};
use crate::homomorphism::check_homomorphism;
use crate::partition::{SetPartition, UnionFind};
use crate::table::TableSet;

/// The basic translations `x ↦ t(x, z)`, `x ↦ t(z, x)` and `x ↦ u(x)` of an
/// algebra, deduplicated. A partition is compatible with every table in the
/// set iff it is invariant under all of these maps.
#[derive(Clone, Debug)]
pub struct Translations {
    size: usize,
    maps: Vec<Vec<u32>>,
}

impl Translations {
    pub fn new(alg: &Algebra, tables: &TableSet) -> Result<Translations> {
        if tables.base() != alg.base() {
            return Err(Error::BaseMismatch {
                left: alg.base(),
                right: tables.base(),
            });
        }
        let n = alg.len();
        if n > CARRIER_CAP {
            return Err(Error::CapExceeded {
                what: "congruence enumeration carrier",
                needed: n as u128,
                cap: CARRIER_CAP as u128,
            });
        }
        // an exhaustive binary set is closed under swapping arguments
        let both_sides = !tables.is_exhaustive();
        let per_table: Vec<Vec<Vec<u32>>> = tables
            .binary()
            .par_iter()
            .map(|t| {
                let e = t.entries();
                let mut out = Vec::with_capacity(if both_sides { 2 * n } else { n });
                for z in 0..n {
                    let right: Option<Vec<u32>> =
                        (0..n).map(|x| alg.apply2(e, x, z).map(|v| v as u32)).collect();
                    out.push(right);
                    if both_sides {
                        let left: Option<Vec<u32>> =
                            (0..n).map(|x| alg.apply2(e, z, x).map(|v| v as u32)).collect();
                        out.push(left);
                    }
                }
                out.into_iter().collect::<Option<Vec<_>>>()
            })
            .collect::<Option<Vec<_>>>()
            .ok_or(Error::ClosureViolation)?;
        let mut seen: HashSet<Vec<u32>> = HashSet::new();
        let identity: Vec<u32> = (0..n as u32).collect();
        for t in tables.unary() {
            let m: Vec<u32> = (0..n)
                .map(|x| alg.apply1(t.entries(), x).map(|v| v as u32))
                .collect::<Option<_>>()
                .ok_or(Error::ClosureViolation)?;
            seen.insert(m);
        }
        for group in per_table {
            seen.extend(group);
        }
        seen.remove(&identity);
        let mut maps: Vec<Vec<u32>> = seen.into_iter().collect();
        maps.sort_unstable();
        Ok(Translations { size: n, maps })
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// True iff `p` is invariant under every translation.
    pub fn compatible(&self, p: &SetPartition) -> bool {
        if p.ground() != self.size {
            return false;
        }
        // one representative pair per merged element suffices
        let mut first = vec![usize::MAX; p.block_count()];
        let mut pairs = Vec::new();
        for x in 0..self.size {
            let f = &mut first[p.label(x)];
            if *f == usize::MAX {
                *f = x;
            } else {
                pairs.push((*f, x));
            }
        }
        self.maps.iter().all(|m| {
            pairs
                .iter()
                .all(|&(a, b)| p.same_block(m[a] as usize, m[b] as usize))
        })
    }

    /// The least invariant equivalence containing the given pairs.
    pub fn closure(&self, pairs: &[(Element, Element)]) -> SetPartition {
        let mut uf = UnionFind::new(self.size);
        let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
        for &(a, b) in pairs {
            if uf.union(a, b) {
                queue.push_back((a, b));
            }
        }
        // the equivalence is generated by the queued pairs, so checking their
        // images under each translation is enough for invariance
        while let Some((a, b)) = queue.pop_front() {
            for m in &self.maps {
                let (c, d) = (m[a] as usize, m[b] as usize);
                if uf.union(c, d) {
                    queue.push_back((c, d));
                }
            }
        }
        uf.into_partition()
    }
}

/// A congruence, stored as a partition of the parent carrier.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Congruence {
    partition: SetPartition,
}

impl Congruence {
    /// Validates compatibility against the translations of the parent.
    pub fn new(partition: SetPartition, translations: &Translations) -> Result<Congruence> {
        if !translations.compatible(&partition) {
            return Err(Error::Incompatible);
        }
        Ok(Congruence { partition })
    }

    pub(crate) fn trusted(partition: SetPartition) -> Congruence {
        Congruence { partition }
    }

    pub fn diagonal(n: usize) -> Congruence {
        Congruence {
            partition: SetPartition::discrete(n),
        }
    }

    pub fn full(n: usize) -> Congruence {
        Congruence {
            partition: SetPartition::indiscrete(n),
        }
    }

    pub fn partition(&self) -> &SetPartition {
        &self.partition
    }

    pub fn related(&self, x: Element, y: Element) -> bool {
        self.partition.same_block(x, y)
    }

    pub fn is_diagonal(&self) -> bool {
        self.partition.is_discrete()
    }

    pub fn is_full(&self) -> bool {
        self.partition.block_count() <= 1
    }

    pub fn leq(&self, other: &Congruence) -> bool {
        self.partition.refines(&other.partition).unwrap_or(false)
    }

    pub fn meet(&self, other: &Congruence) -> Result<Congruence> {
        Ok(Congruence {
            partition: self.partition.meet(&other.partition)?,
        })
    }

    pub fn join(&self, other: &Congruence) -> Result<Congruence> {
        Ok(Congruence {
            partition: self.partition.join(&other.partition)?,
        })
    }
}

/// The kernel `{(x, y) | h(x) = h(y)}` of a map on the carrier.
pub fn kernel(map: &[Element]) -> Congruence {
    Congruence {
        partition: SetPartition::from_labels(map),
    }
}

/// The quotient algebra; classes are represented by their least member.
pub fn quotient_algebra(alg: &Algebra, theta: &Congruence) -> Result<Algebra> {
    if theta.partition.ground() != alg.len() {
        return Err(Error::GroundMismatch {
            left: theta.partition.ground(),
            right: alg.len(),
        });
    }
    Ok(alg
        .quotient_by(&theta.partition)
        .with_label(format!("{}/θ", alg.label())))
}

/// Every congruence, as joins of principal congruences, ordered finest
/// first (by class count, then canonical labels).
pub fn congruence_lattice(alg: &Algebra, tables: &TableSet) -> Result<Vec<Congruence>> {
    let tr = Translations::new(alg, tables)?;
    congruence_lattice_with(alg, &tr)
}

pub fn congruence_lattice_with(alg: &Algebra, tr: &Translations) -> Result<Vec<Congruence>> {
    let n = alg.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|x| (x + 1..n).map(move |y| (x, y)))
        .collect();
    let mut principal: Vec<SetPartition> =
        pairs.par_iter().map(|&(x, y)| tr.closure(&[(x, y)])).collect();
    principal.sort();
    principal.dedup();

    let mut all: HashSet<SetPartition> = HashSet::new();
    all.insert(SetPartition::discrete(n));
    let mut frontier: Vec<SetPartition> = vec![SetPartition::discrete(n)];
    while let Some(c) = frontier.pop() {
        for p in &principal {
            let j = c.join(p)?;
            if all.insert(j.clone()) {
                frontier.push(j);
            }
        }
    }
    let mut out: Vec<SetPartition> = all.into_iter().collect();
    out.sort_by(|a, b| {
        b.block_count()
            .cmp(&a.block_count())
            .then_with(|| a.cmp(b))
    });
    Ok(out.into_iter().map(Congruence::trusted).collect())
}

/// `θ₁ ∘ θ₂ = θ₂ ∘ θ₁` as relations.
pub fn permute(t1: &Congruence, t2: &Congruence) -> bool {
    let n = t1.partition.ground();
    let (k1, k2) = (t1.partition.block_count(), t2.partition.block_count());
    // (x, z) ∈ θ₁∘θ₂ iff some y meets both the θ₁-class of x and the θ₂-class of z
    let mut meets = vec![false; k1 * k2];
    for y in 0..n {
        meets[t1.partition.label(y) * k2 + t2.partition.label(y)] = true;
    }
    (0..n).all(|x| {
        (0..n).all(|z| {
            let a = meets[t1.partition.label(x) * k2 + t2.partition.label(z)];
            let b = meets[t1.partition.label(z) * k2 + t2.partition.label(x)];
            a == b
        })
    })
}

pub fn congruences_permute(lattice: &[Congruence]) -> bool {
    lattice
        .iter()
        .enumerate()
        .all(|(i, a)| lattice[i + 1..].iter().all(|b| permute(a, b)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub simple: bool,
    pub subdirectly_irreducible: bool,
    pub directly_indecomposable: bool,
    pub congruence_count: usize,
    /// Indices into the lattice of a complementary permuting pair, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factor_pair: Option<(usize, usize)>,
}

/// Classifies from a precomputed congruence lattice. One-element algebras
/// get all three flags false.
pub fn classify_lattice(lattice: &[Congruence]) -> Result<Classification> {
    let n = lattice.first().map_or(0, |c| c.partition.ground());
    if n <= 1 {
        return Ok(Classification {
            simple: false,
            subdirectly_irreducible: false,
            directly_indecomposable: false,
            congruence_count: lattice.len(),
            factor_pair: None,
        });
    }
    let nontrivial: Vec<usize> = (0..lattice.len())
        .filter(|&i| !lattice[i].is_diagonal())
        .collect();
    let atoms = nontrivial
        .iter()
        .filter(|&&i| {
            !nontrivial
                .iter()
                .any(|&j| j != i && lattice[j].leq(&lattice[i]))
        })
        .count();
    let mut factor_pair = None;
    'outer: for &i in &nontrivial {
        if lattice[i].is_full() {
            continue;
        }
        for &j in &nontrivial {
            if j <= i || lattice[j].is_full() {
                continue;
            }
            let (a, b) = (&lattice[i], &lattice[j]);
            if a.meet(b)?.is_diagonal() && a.join(b)?.is_full() && permute(a, b) {
                factor_pair = Some((i, j));
                break 'outer;
            }
        }
    }
    Ok(Classification {
        simple: lattice.len() == 2,
        subdirectly_irreducible: atoms == 1,
        directly_indecomposable: factor_pair.is_none(),
        congruence_count: lattice.len(),
        factor_pair,
    })
}

pub fn classify(alg: &Algebra, tables: &TableSet) -> Result<Classification> {
    classify_lattice(&congruence_lattice(alg, tables)?)
}

/// For complementary permuting congruences, the map `x ↦ ([x]θ₁, [x]θ₂)`
/// into the product of the quotients, verified to be an isomorphism.
pub fn factor_isomorphism(
    alg: &Algebra,
    t1: &Congruence,
    t2: &Congruence,
    tables: &TableSet,
) -> Result<(Algebra, Vec<Element>)> {
    let q1 = quotient_algebra(alg, t1)?;
    let q2 = quotient_algebra(alg, t2)?;
    let prod = direct_product(&q1, &q2)?;
    let map: Vec<Element> = alg
        .elements()
        .map(|x| t1.partition.label(x) * q2.len() + t2.partition.label(x))
        .collect();
    let mut hit = vec![false; prod.len()];
    for &y in &map {
        hit[y] = true;
    }
    if map.len() != prod.len() || hit.iter().any(|h| !h) {
        return Err(Error::NotHomomorphism("factor map is not bijective".into()));
    }
    check_homomorphism(alg, &prod, &map, tables)?;
    Ok((prod, map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Provenance;

    #[test]
    fn omega_is_simple() {
        let tables = TableSet::standard(3).unwrap();
        let o = Algebra::omega(3).unwrap();
        let lat = congruence_lattice(&o, &tables).unwrap();
        assert_eq!(lat.len(), 2);
        let c = classify_lattice(&lat).unwrap();
        assert!(c.simple && c.subdirectly_irreducible && c.directly_indecomposable);
    }

    #[test]
    fn trivial_algebra() {
        let tables = TableSet::standard(1).unwrap();
        let one = Algebra::omega(1).unwrap();
        let lat = congruence_lattice(&one, &tables).unwrap();
        assert_eq!(lat.len(), 1);
        let c = classify_lattice(&lat).unwrap();
        assert!(!c.simple && !c.subdirectly_irreducible && !c.directly_indecomposable);
    }

    #[test]
    fn square_decomposes() {
        let tables = TableSet::standard(3).unwrap();
        let o = Algebra::omega(3).unwrap();
        let sq = direct_product(&o, &o).unwrap();
        let lat = congruence_lattice(&sq, &tables).unwrap();
        assert_eq!(lat.len(), 4);
        assert!(congruences_permute(&lat));
        let c = classify_lattice(&lat).unwrap();
        assert!(!c.simple && !c.subdirectly_irreducible && !c.directly_indecomposable);
        let (i, j) = c.factor_pair.unwrap();
        let (prod, _) = factor_isomorphism(&sq, &lat[i], &lat[j], &tables).unwrap();
        assert_eq!(prod.len(), 9);
    }

    #[test]
    fn incompatible_partition_rejected() {
        let tables = TableSet::standard(2).unwrap();
        let sq = Algebra::full_power(2, 2, Provenance::ClonePower).unwrap();
        let tr = Translations::new(&sq, &tables).unwrap();
        // "agree on coordinate 0" is a congruence; gluing only (0,0) and (0,1) is not
        let p = SetPartition::from_labels(&[0, 0, 1, 1]);
        assert!(Congruence::new(p, &tr).is_ok());
        let bad = SetPartition::from_labels(&[0, 0, 1, 2]);
        assert_eq!(Congruence::new(bad, &tr), Err(Error::Incompatible));
    }

    #[test]
    fn permute_detects_non_permuting_relations() {
        // on {0,1,2}: θ₁ = {01|2}, θ₂ = {0|12}; θ₁∘θ₂ relates 0 to 2 but not 2 to 0
        let a = Congruence::trusted(SetPartition::from_labels(&[0, 0, 1]));
        let b = Congruence::trusted(SetPartition::from_labels(&[0, 1, 1]));
        assert!(!permute(&a, &b));
        assert!(permute(&a, &a));
    }
}
