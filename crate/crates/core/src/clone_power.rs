//! Clone powers `Ω(A)^F`, the subalgebra ↔ filter and congruence ↔ block
//! filter correspondences, and limit reduced powers `Ω(A)^F / Z`.

use std::collections::HashMap;

use crate::algebra::{Algebra, Element, Provenance, CARRIER_CAP};
use crate::congruence::Congruence;
use crate::error::{Error, Result};
use crate::filter::{BAFilter, BlockBooleanAlgebra, PartitionFilter};
use crate::partition::{SetPartition, Subset};
use crate::table::{checked_pow, decode_row, TableSet};

/// Above this many table applications the closure check is replaced by the
/// kernel check, which implies closure.
const CLOSURE_CHECK_BUDGET: u128 = 50_000_000;

/// `Ω(A)^F = { f : I → A | Π(f) ∈ F }` with pointwise operations.
#[derive(Clone, Debug)]
pub struct ClonePowerAlgebra {
    filter: PartitionFilter,
    blocks: BlockBooleanAlgebra,
    algebra: Algebra,
}

impl ClonePowerAlgebra {
    /// Enumerates the functions constant on the blocks of the least member of
    /// `filter` and verifies the result.
    pub fn build(base: usize, filter: PartitionFilter, tables: &TableSet) -> Result<ClonePowerAlgebra> {
        ClonePowerAlgebra::build_as(base, filter, tables, Provenance::ClonePower)
    }

    pub(crate) fn build_as(
        base: usize,
        filter: PartitionFilter,
        tables: &TableSet,
        provenance: Provenance,
    ) -> Result<ClonePowerAlgebra> {
        if tables.base() != base {
            return Err(Error::BaseMismatch {
                left: base,
                right: tables.base(),
            });
        }
        let index = filter.ground();
        let bottom = filter.bottom().clone();
        let k = bottom.block_count();
        let cap = if provenance == Provenance::Free {
            crate::algebra::FREE_CAP
        } else {
            CARRIER_CAP
        };
        let count = checked_pow(base, k).filter(|&c| c <= cap).ok_or(Error::CapExceeded {
            what: "clone power carrier",
            needed: (base as u128).saturating_pow(k as u32),
            cap: cap as u128,
        })?;
        let mut g = vec![0u8; k];
        let vectors: Vec<Vec<u8>> = (0..count)
            .map(|c| {
                decode_row(c, base, &mut g);
                (0..index).map(|i| g[bottom.label(i)]).collect()
            })
            .collect();
        let algebra = Algebra::from_members(base, index, provenance, vectors)?
            .with_label(format!("Ω({base})^F[{bottom}]"));
        let blocks = BlockBooleanAlgebra::of_filter(&filter)?;
        let cp = ClonePowerAlgebra {
            filter,
            blocks,
            algebra,
        };
        cp.verify(tables)?;
        Ok(cp)
    }

    fn verify(&self, tables: &TableSet) -> Result<()> {
        for e in self.algebra.elements() {
            if !self.filter.contains(&self.kernel_of(e))? {
                return Err(Error::ClosureViolation);
            }
        }
        let n = self.algebra.len() as u128;
        if n * n * tables.len() as u128 <= CLOSURE_CHECK_BUDGET {
            self.algebra.check_closed(tables)?;
        }
        Ok(())
    }

    pub fn base(&self) -> usize {
        self.algebra.base()
    }

    pub fn index(&self) -> usize {
        self.filter.ground()
    }

    pub fn filter(&self) -> &PartitionFilter {
        &self.filter
    }

    pub fn block_algebra(&self) -> &BlockBooleanAlgebra {
        &self.blocks
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    /// `Π(f)` of a carrier element.
    pub fn kernel_of(&self, e: Element) -> SetPartition {
        SetPartition::from_labels(self.algebra.rep(e))
    }
}

fn check_index_bound(base: usize, index: usize) -> Result<()> {
    if base < index {
        return Err(Error::Precondition(format!(
            "|A| = {base} is smaller than |I| = {index}"
        )));
    }
    Ok(())
}

/// The filter generated by the kernels of the members of `b`, checked to
/// reproduce `b` exactly as `{ f | Π(f) ∈ F }`.
pub fn subalgebra_to_filter(base: usize, index: usize, b: &[Vec<u8>]) -> Result<PartitionFilter> {
    check_index_bound(base, index)?;
    if b.iter().any(|v| v.len() != index || v.iter().any(|&x| x as usize >= base)) {
        return Err(Error::Descriptor("member vector does not match base and index".into()));
    }
    let mut kernels: Vec<SetPartition> = b
        .iter()
        .map(|v| SetPartition::from_labels(v))
        .collect();
    kernels.sort();
    kernels.dedup();
    let filter = PartitionFilter::generate(index, kernels)?;

    let space = checked_pow(base, index).filter(|&s| s <= CARRIER_CAP).ok_or(Error::CapExceeded {
        what: "round-trip enumeration",
        needed: (base as u128).saturating_pow(index as u32),
        cap: CARRIER_CAP as u128,
    })?;
    let mut have: Vec<&[u8]> = b.iter().map(Vec::as_slice).collect();
    have.sort_unstable();
    have.dedup();
    let mut f = vec![0u8; index];
    let mut expected = Vec::new();
    for c in 0..space {
        decode_row(c, base, &mut f);
        if filter.contains(&SetPartition::from_labels(&f))? {
            expected.push(f.clone());
        }
    }
    if expected.len() != have.len() || expected.iter().zip(&have).any(|(x, y)| x.as_slice() != *y) {
        return Err(Error::RoundTrip(format!(
            "filter at {} describes {} functions, the set has {}",
            filter.bottom(),
            expected.len(),
            have.len()
        )));
    }
    Ok(filter)
}

/// Decides `g ∈ ⟨S⟩` by building the witness the kernel criterion promises:
/// the members of `S` are folded into one function `h` with
/// `Π(h) = ⋀ Π(f)` using pairing tables injective on the realized value
/// pairs, and then `g = u ∘ h` for a unary table `u` iff `Π(h) ⪯ Π(g)`.
pub fn membership_by_filter(
    base: usize,
    index: usize,
    s: &[Vec<u8>],
    g: &[u8],
    tables: &TableSet,
) -> Result<bool> {
    check_index_bound(base, index)?;
    if tables.base() != base {
        return Err(Error::BaseMismatch {
            left: base,
            right: tables.base(),
        });
    }
    if g.len() != index || s.iter().any(|f| f.len() != index) {
        return Err(Error::Descriptor("vector length does not match the index".into()));
    }
    let mut h = vec![0u8; index];
    for f in s {
        let mut pairs: Vec<(u8, u8)> = h.iter().copied().zip(f.iter().copied()).collect();
        pairs.sort_unstable();
        pairs.dedup();
        if pairs.len() > base {
            return Err(Error::Precondition(format!(
                "{} realized pairs cannot be paired injectively into {base} values",
                pairs.len()
            )));
        }
        let pairing = tables
            .binary()
            .iter()
            .find(|t| {
                let mut outs: Vec<u8> = pairs.iter().map(|&(x, y)| t.eval(&[x, y])).collect();
                outs.sort_unstable();
                outs.dedup();
                outs.len() == pairs.len()
            })
            .ok_or_else(|| Error::Precondition("no pairing table in the generating set".into()))?;
        h = h.iter().zip(f).map(|(&x, &y)| pairing.eval(&[x, y])).collect();
    }
    let kh = SetPartition::from_labels(&h);
    let kg = SetPartition::from_labels(g);
    if !kh.refines(&kg)? {
        return Ok(false);
    }
    let found = tables
        .unary()
        .iter()
        .any(|u| h.iter().zip(g).all(|(&x, &y)| u.eval(&[x]) == y));
    if !found {
        return Err(Error::Precondition("no unary table realizes the factorization".into()));
    }
    Ok(true)
}

fn restriction_key(v: &[u8], r: Subset) -> Vec<u8> {
    r.iter().map(|i| v[i]).collect()
}

fn check_scope(cp: &ClonePowerAlgebra) -> Result<()> {
    // on the full lattice every function is present and no pairing is needed
    if cp.filter.bottom().is_discrete() {
        return Ok(());
    }
    check_index_bound(cp.base(), cp.index())
}

/// `Z = { R | f|_R = g|_R ⇒ (f, g) ∈ θ }`, evaluated directly over the
/// carrier and validated as a filter on the block algebra.
pub fn congruence_to_zfilter(cp: &ClonePowerAlgebra, theta: &Congruence) -> Result<BAFilter> {
    check_scope(cp)?;
    let alg = &cp.algebra;
    if theta.partition().ground() != alg.len() {
        return Err(Error::GroundMismatch {
            left: theta.partition().ground(),
            right: alg.len(),
        });
    }
    let mut members = Vec::new();
    for &r in cp.blocks.elements() {
        let mut class_by_key: HashMap<Vec<u8>, usize> = HashMap::new();
        let forced = alg.elements().all(|x| {
            let c = theta.partition().label(x);
            *class_by_key.entry(restriction_key(alg.rep(x), r)).or_insert(c) == c
        });
        if forced {
            members.push(r);
        }
    }
    BAFilter::from_members(&cp.blocks, &members)
}

/// `θ_Z`: `f ~ g` iff `{ i | f(i) = g(i) } ∈ Z`, i.e. iff `f` and `g` agree on
/// the least member of `Z`.
pub fn zfilter_to_congruence(cp: &ClonePowerAlgebra, z: &BAFilter) -> Result<Congruence> {
    check_z(cp, z)?;
    let alg = &cp.algebra;
    let keys: Vec<Vec<u8>> = alg
        .elements()
        .map(|x| restriction_key(alg.rep(x), z.generator()))
        .collect();
    Ok(Congruence::trusted(SetPartition::from_labels(&keys)))
}

fn check_z(cp: &ClonePowerAlgebra, z: &BAFilter) -> Result<()> {
    if z.ground() != cp.index() || !cp.blocks.contains(z.generator()) {
        return Err(Error::InvalidFilter(
            "Z is not a filter on the block algebra of this clone power".into(),
        ));
    }
    Ok(())
}

/// `Ω(A)^F / Z`.
#[derive(Clone, Debug)]
pub struct LimitReducedPower {
    power: ClonePowerAlgebra,
    z: BAFilter,
    algebra: Algebra,
}

impl LimitReducedPower {
    pub fn power(&self) -> &ClonePowerAlgebra {
        &self.power
    }

    pub fn z(&self) -> &BAFilter {
        &self.z
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn is_ultra(&self) -> bool {
        self.z.is_ultra()
    }

    /// The quotient map on carriers.
    pub fn projection(&self) -> Vec<Element> {
        let alg = self.power.algebra();
        alg.elements()
            .map(|x| self.algebra.element_of(alg.rep(x)).expect("same members"))
            .collect()
    }
}

pub fn limit_reduced_power(cp: &ClonePowerAlgebra, z: &BAFilter) -> Result<LimitReducedPower> {
    let theta = zfilter_to_congruence(cp, z)?;
    let algebra = crate::congruence::quotient_algebra(cp.algebra(), &theta)?.with_label(format!(
        "{}/Z[{:?}]",
        cp.algebra().label(),
        z.generator()
    ));
    Ok(LimitReducedPower {
        power: cp.clone(),
        z: *z,
        algebra,
    })
}

/// `Ω(A)^I / W` for a filter `W` of subsets of `I`, realized over the full
/// partition lattice whose block algebra is the power set.
pub fn reduced_power_set_filter(
    base: usize,
    index: usize,
    w: &[Subset],
    tables: &TableSet,
) -> Result<LimitReducedPower> {
    let cp = ClonePowerAlgebra::build(base, PartitionFilter::full(index)?, tables)?;
    let z = BAFilter::from_members(cp.block_algebra(), w)?;
    limit_reduced_power(&cp, &z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::generate_subalgebra;
    use crate::congruence::congruence_lattice;

    fn p(blocks: &[&[usize]]) -> SetPartition {
        let blocks: Vec<Vec<usize>> = blocks.iter().map(|b| b.to_vec()).collect();
        let ground = blocks.iter().map(Vec::len).sum();
        SetPartition::from_blocks(ground, &blocks).unwrap()
    }

    fn s(items: &[usize]) -> Subset {
        Subset::from_iter(items.iter().copied())
    }

    #[test]
    fn build_examples() {
        let t3 = TableSet::standard(3).unwrap();
        let top = ClonePowerAlgebra::build(3, PartitionFilter::principal(SetPartition::indiscrete(3)).unwrap(), &t3).unwrap();
        assert_eq!(top.algebra().len(), 3);
        let all = ClonePowerAlgebra::build(3, PartitionFilter::full(3).unwrap(), &t3).unwrap();
        assert_eq!(all.algebra().len(), 27);
        let mid = ClonePowerAlgebra::build(3, PartitionFilter::principal(p(&[&[0, 1], &[2]])).unwrap(), &t3).unwrap();
        assert_eq!(mid.algebra().len(), 9);
    }

    #[test]
    fn subalgebra_filter_examples() {
        let t3 = TableSet::standard(3).unwrap();
        let consts: Vec<Vec<u8>> = (0..3).map(|a| vec![a; 3]).collect();
        let f = subalgebra_to_filter(3, 3, &consts).unwrap();
        assert_eq!(f.bottom(), &SetPartition::indiscrete(3));

        let cube = Algebra::full_power(3, 3, Provenance::ClonePower).unwrap();
        let seed = cube.element_of(&[0, 0, 1]).unwrap();
        let b: Vec<Vec<u8>> = generate_subalgebra(&cube, &[seed], &t3)
            .unwrap()
            .into_iter()
            .map(|e| cube.rep(e).to_vec())
            .collect();
        assert_eq!(b.len(), 9);
        let f = subalgebra_to_filter(3, 3, &b).unwrap();
        assert_eq!(f.bottom(), &p(&[&[0, 1], &[2]]));

        let everything: Vec<Vec<u8>> = cube.elements().map(|e| cube.rep(e).to_vec()).collect();
        assert!(subalgebra_to_filter(3, 3, &everything).unwrap().bottom().is_discrete());

        assert!(matches!(subalgebra_to_filter(2, 3, &[]), Err(Error::Precondition(_))));
        // not closed: the constants and one extra function
        let mut bad = consts.clone();
        bad.push(vec![0, 0, 1]);
        assert!(matches!(subalgebra_to_filter(3, 3, &bad), Err(Error::RoundTrip(_))));
    }

    #[test]
    fn membership_examples() {
        let t3 = TableSet::standard(3).unwrap();
        let s = vec![vec![0u8, 0, 1]];
        assert!(membership_by_filter(3, 3, &s, &[2, 2, 2], &t3).unwrap());
        assert!(membership_by_filter(3, 3, &s, &[1, 1, 0], &t3).unwrap());
        assert!(!membership_by_filter(3, 3, &s, &[0, 1, 2], &t3).unwrap());
        assert!(membership_by_filter(2, 3, &s, &[0, 0, 0], &TableSet::standard(2).unwrap()).is_err());
    }

    #[test]
    fn zfilter_examples() {
        let t3 = TableSet::standard(3).unwrap();
        let all = ClonePowerAlgebra::build(3, PartitionFilter::full(3).unwrap(), &t3).unwrap();
        let diag = Congruence::diagonal(27);
        let z = congruence_to_zfilter(&all, &diag).unwrap();
        assert_eq!(z.generator(), s(&[0, 1, 2]));
        let z = congruence_to_zfilter(&all, &Congruence::full(27)).unwrap();
        assert!(!z.is_proper());

        let mid = ClonePowerAlgebra::build(3, PartitionFilter::principal(p(&[&[0, 1], &[2]])).unwrap(), &t3).unwrap();
        let alg = mid.algebra();
        let keys: Vec<u8> = alg.elements().map(|x| alg.rep(x)[0]).collect();
        let agree01 = Congruence::trusted(SetPartition::from_labels(&keys));
        let z = congruence_to_zfilter(&mid, &agree01).unwrap();
        assert_eq!(z.members(mid.block_algebra()), vec![s(&[0, 1]), s(&[0, 1, 2])]);
        assert!(z.is_ultra());
    }

    #[test]
    fn zfilter_round_trip_small() {
        let t3 = TableSet::standard(3).unwrap();
        let mid = ClonePowerAlgebra::build(3, PartitionFilter::principal(p(&[&[0, 1], &[2]])).unwrap(), &t3).unwrap();
        let lat = congruence_lattice(mid.algebra(), &t3).unwrap();
        assert_eq!(lat.len(), 4);
        for theta in &lat {
            let z = congruence_to_zfilter(&mid, theta).unwrap();
            assert_eq!(&zfilter_to_congruence(&mid, &z).unwrap(), theta);
        }
    }

    #[test]
    fn reduced_power_examples() {
        let t3 = TableSet::standard(3).unwrap();
        let top = reduced_power_set_filter(3, 3, &[s(&[0, 1, 2])], &t3).unwrap();
        assert_eq!(top.algebra().len(), 27);
        let ultra = reduced_power_set_filter(3, 3, &[s(&[1]), s(&[0, 1]), s(&[1, 2]), s(&[0, 1, 2])], &t3).unwrap();
        assert!(ultra.is_ultra());
        assert_eq!(ultra.algebra().len(), 3);
        let improper: Vec<Subset> = (0..8).map(Subset).collect();
        let one = reduced_power_set_filter(3, 3, &improper, &t3).unwrap();
        assert_eq!(one.algebra().len(), 1);
        assert!(reduced_power_set_filter(3, 3, &[s(&[0])], &t3).is_err());
    }

    #[test]
    fn ultra_quotient_evaluates_at_atom() {
        let t3 = TableSet::standard(3).unwrap();
        let mid = ClonePowerAlgebra::build(3, PartitionFilter::principal(p(&[&[0, 1], &[2]])).unwrap(), &t3).unwrap();
        let z = BAFilter::principal(mid.block_algebra(), s(&[0, 1])).unwrap();
        let lrp = limit_reduced_power(&mid, &z).unwrap();
        assert_eq!(lrp.algebra().len(), 3);
        let omega = Algebra::omega(3).unwrap();
        let eval: Vec<Element> = lrp.algebra().elements().map(|c| lrp.algebra().rep(c)[0] as usize).collect();
        assert!(crate::homomorphism::is_isomorphism(lrp.algebra(), &omega, &eval, &t3).unwrap());
    }
}
