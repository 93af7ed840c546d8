//! The free algebra `F(A, I) = Ω(A)^{𝒫(A,I)}`, the homomorphisms `φ_α` it
//! induces, and the quotients `F(A, I) / Z_α ≅ ⟨α″(I)⟩`.
//!
//! An element of `F(A, I)` is a map `A^I → A`, stored as a function table
//! of arity `|I|`: point codes of `A^I` are table rows, coordinate 0 most
//! significant. `φ_α(ℓ)` is then `ℓ̂` applied to `α(0), …, α(|I|−1)`.

use serde::Serialize;

use crate::algebra::{generate_subalgebra, Algebra, Element, Provenance, CARRIER_CAP, FREE_CAP};
use crate::clone_power::ClonePowerAlgebra;
use crate::error::{Error, Result};
use crate::filter::{BAFilter, PartitionFilter};
use crate::homomorphism::{check_homomorphism, Homomorphism};
use crate::partition::{SetPartition, Subset};
use crate::table::{checked_pow, decode_row, FunctionTable, TableSet};

/// Largest `|A^I|` handled; subsets of points are bit masks.
pub const MAX_POINTS: usize = 64;

/// `F(A, I)` described by its base and number of generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FreeAlgebra {
    base: usize,
    gens: usize,
}

impl FreeAlgebra {
    pub fn new(base: usize, gens: usize) -> Result<FreeAlgebra> {
        if base == 0 {
            return Err(Error::EmptyGround);
        }
        match checked_pow(base, gens) {
            Some(p) if p <= MAX_POINTS => Ok(FreeAlgebra { base, gens }),
            _ => Err(Error::GroundTooLarge(
                checked_pow(base, gens).unwrap_or(usize::MAX),
            )),
        }
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn gens(&self) -> usize {
        self.gens
    }

    /// `|A^I|`.
    pub fn points(&self) -> usize {
        self.base.pow(self.gens as u32)
    }

    /// `π_i : A^I → A`.
    pub fn projection(&self, i: usize) -> FunctionTable {
        FunctionTable::projection(self.base, self.gens, i)
    }

    /// `𝒫_i = Π(π_i)`, the partition of `A^I` by the `i`-th coordinate.
    pub fn coordinate_partition(&self, i: usize) -> SetPartition {
        SetPartition::from_labels(self.projection(i).entries())
    }

    /// `𝒫(A, I)`, generated by the coordinate partitions.
    pub fn filter(&self) -> Result<PartitionFilter> {
        PartitionFilter::generate(
            self.points(),
            (0..self.gens).map(|i| self.coordinate_partition(i)).collect(),
        )
    }

    /// The carrier as an explicit algebra, for `|A|^{|A|^{|I|}}` up to
    /// [`FREE_CAP`]. Element `e` is the table `rep(e)`.
    pub fn materialize(&self, tables: &TableSet) -> Result<ClonePowerAlgebra> {
        ClonePowerAlgebra::build_as(self.base, self.filter()?, tables, Provenance::Free)
    }

    pub fn table_of(&self, free: &Algebra, e: Element) -> FunctionTable {
        FunctionTable::new(self.base, self.gens, free.rep(e).to_vec()).expect("free members are tables")
    }
}

fn check_assignment(target: &Algebra, alpha: &[Element]) -> Result<()> {
    if let Some(&x) = alpha.iter().find(|&&x| x >= target.len()) {
        return Err(Error::NotInCarrier(x));
    }
    Ok(())
}

/// `φ_α(ℓ) = ℓ̂^ℒ(α(0), …, α(n−1))`.
pub fn phi_alpha(target: &Algebra, alpha: &[Element], l: &FunctionTable) -> Result<Element> {
    target.apply(l, alpha)
}

/// `φ_α` on a materialized free algebra, verified to be a homomorphism
/// sending `π_i` to `α(i)`.
pub fn phi_alpha_hom(
    free: &FreeAlgebra,
    materialized: &Algebra,
    target: &Algebra,
    alpha: &[Element],
    tables: &TableSet,
) -> Result<Homomorphism> {
    if alpha.len() != free.gens {
        return Err(Error::ArityMismatch {
            name: "assignment".into(),
            expected: free.gens,
            found: alpha.len(),
        });
    }
    check_assignment(target, alpha)?;
    let map = materialized
        .elements()
        .map(|e| phi_alpha(target, alpha, &free.table_of(materialized, e)))
        .collect::<Result<Vec<_>>>()?;
    for (i, &a) in alpha.iter().enumerate() {
        let pi = materialized
            .element_of(free.projection(i).entries())
            .ok_or(Error::ClosureViolation)?;
        if map[pi] != a {
            return Err(Error::NotHomomorphism(format!("π_{i} is not sent to α({i})")));
        }
    }
    Homomorphism::verified(materialized, target, map, tables)
}

/// `F(A, I) / Z_α` together with `ι_α`, verified on construction.
///
/// `Z_α` is principal on the power set of `A^I`, generated by the support
/// `S_α`; the quotient is `Ω(A)^{S_α}` with `[ℓ] ↦ ℓ|_{S_α}`, and the
/// canonical representative of a class is its extension by zero.
#[derive(Clone, Debug)]
pub struct FreeQuotient {
    free: FreeAlgebra,
    alpha: Vec<Element>,
    support: Vec<usize>,
    z: BAFilter,
    algebra: Algebra,
    iota: Vec<Element>,
}

impl FreeQuotient {
    /// Computes `S_α` by probing: a point `p` lies in `S_α` iff the table
    /// that is 1 at `p` and 0 elsewhere is separated from the constant 0
    /// by `φ_α`. The result is then checked: `ι_α` is well defined on every
    /// `ℓ` (exhaustively, through the columns `φ_α` actually reads),
    /// injective, a homomorphism, and onto `⟨α″(I)⟩`.
    pub fn new(target: &Algebra, alpha: &[Element], tables: &TableSet) -> Result<FreeQuotient> {
        target.check_representation_independent(tables)?;
        let q = FreeQuotient::compute(target, alpha)?;
        q.verify(target, tables)?;
        Ok(q)
    }

    /// The construction without the verification pass.
    pub(crate) fn compute(target: &Algebra, alpha: &[Element]) -> Result<FreeQuotient> {
        let base = target.base();
        let free = FreeAlgebra::new(base, alpha.len())?;
        check_assignment(target, alpha)?;
        let points = free.points();

        let zero = FunctionTable::from_fn(base, free.gens, |_| 0);
        let at_zero = phi_alpha(target, alpha, &zero)?;
        let mut support = Vec::new();
        if base > 1 {
            for p in 0..points {
                let mut delta = vec![0u8; points];
                delta[p] = 1;
                let d = FunctionTable::new(base, free.gens, delta)?;
                if phi_alpha(target, alpha, &d)? != at_zero {
                    support.push(p);
                }
            }
        }
        let width = support.len();
        if checked_pow(base, width).is_none_or(|c| c > CARRIER_CAP) {
            return Err(Error::CapExceeded {
                what: "free quotient carrier",
                needed: (base as u128).saturating_pow(width as u32),
                cap: CARRIER_CAP as u128,
            });
        }
        let algebra = Algebra::full_power(base, width, Provenance::Quotient)?
            .with_label(format!("F({base},{})/Z_α", free.gens));
        let z = BAFilter::principal_in_power_set(points, Subset::from_iter(support.iter().copied()));
        let mut q = FreeQuotient {
            free,
            alpha: alpha.to_vec(),
            support,
            z,
            algebra,
            iota: Vec::new(),
        };
        q.iota = q
            .algebra
            .elements()
            .map(|c| phi_alpha(target, alpha, &q.canonical_rep(c)))
            .collect::<Result<_>>()?;
        Ok(q)
    }

    fn verify(&self, target: &Algebra, tables: &TableSet) -> Result<()> {
        let base = self.free.base;
        // φ_α reads ℓ only at the columns of the representatives of α
        let mut columns: Vec<usize> = (0..target.width())
            .map(|k| {
                self.alpha
                    .iter()
                    .fold(0usize, |acc, &a| acc * base + target.rep(a)[k] as usize)
            })
            .collect();
        columns.sort_unstable();
        columns.dedup();
        let count = checked_pow(base, columns.len()).filter(|&c| c <= FREE_CAP).ok_or(Error::CapExceeded {
            what: "well-definedness sweep",
            needed: (base as u128).saturating_pow(columns.len() as u32),
            cap: FREE_CAP as u128,
        })?;
        let mut vals = vec![0u8; columns.len()];
        for c in 0..count {
            decode_row(c, base, &mut vals);
            let mut entries = vec![0u8; self.free.points()];
            for (&p, &v) in columns.iter().zip(&vals) {
                entries[p] = v;
            }
            let l = FunctionTable::new(base, self.free.gens, entries)?;
            if phi_alpha(target, &self.alpha, &l)? != self.iota[self.class_of(&l)] {
                return Err(Error::RepresentationDependence(format!(
                    "ι_α is not constant on the class of {:?}",
                    l.entries()
                )));
            }
        }
        let h = Homomorphism::trusted(self.iota.clone());
        if !h.is_injective() {
            return Err(Error::NotHomomorphism("ι_α is not injective".into()));
        }
        let mut image = self.iota.clone();
        image.sort_unstable();
        if image != generate_subalgebra(target, &self.alpha, tables)? {
            return Err(Error::NotHomomorphism("ι_α is not onto ⟨α″(I)⟩".into()));
        }
        check_homomorphism(&self.algebra, target, &self.iota, tables)
    }

    pub fn free(&self) -> &FreeAlgebra {
        &self.free
    }

    pub fn alpha(&self) -> &[Element] {
        &self.alpha
    }

    /// `S_α`, ascending point codes of `A^I`.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn z(&self) -> &BAFilter {
        &self.z
    }

    pub fn is_ultra(&self) -> bool {
        self.z.is_ultra()
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn len(&self) -> usize {
        self.algebra.len()
    }

    pub fn is_empty(&self) -> bool {
        self.algebra.is_empty()
    }

    /// `[ℓ]`.
    pub fn class_of(&self, l: &FunctionTable) -> Element {
        let key: Vec<u8> = self.support.iter().map(|&p| l.entries()[p]).collect();
        self.algebra.element_of(&key).expect("every restriction is a member")
    }

    /// The lexicographically least member of a class: its values on
    /// `S_α`, zero elsewhere.
    pub fn canonical_rep(&self, c: Element) -> FunctionTable {
        let mut entries = vec![0u8; self.free.points()];
        for (&p, &v) in self.support.iter().zip(self.algebra.rep(c)) {
            entries[p] = v;
        }
        FunctionTable::new(self.free.base, self.free.gens, entries).expect("valid table")
    }

    /// `ι_α([ℓ]) = φ_α(ℓ)`.
    pub fn iota(&self, c: Element) -> Element {
        self.iota[c]
    }

    pub fn iota_map(&self) -> &[Element] {
        &self.iota
    }

    /// `ι_α⁻¹` on `⟨α″(I)⟩`.
    pub fn iota_inverse(&self, x: Element) -> Option<Element> {
        self.iota.iter().position(|&y| y == x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::direct_product;
    use crate::clone_power::congruence_to_zfilter;
    use crate::congruence::kernel;

    #[test]
    fn free_examples() {
        let t2 = TableSet::standard(2).unwrap();
        let f = FreeAlgebra::new(2, 1).unwrap();
        let cp = f.materialize(&t2).unwrap();
        assert_eq!(cp.algebra().len(), 4);
        assert_eq!(f.filter().unwrap().bottom(), &SetPartition::discrete(2));
        let f2 = FreeAlgebra::new(2, 2).unwrap();
        for i in 0..2 {
            assert_eq!(SetPartition::from_labels(f2.projection(i).entries()), f2.coordinate_partition(i));
        }
        let cp2 = f2.materialize(&t2).unwrap();
        let pis: Vec<Element> = (0..2)
            .map(|i| cp2.algebra().element_of(f2.projection(i).entries()).unwrap())
            .collect();
        assert_eq!(generate_subalgebra(cp2.algebra(), &pis, &t2).unwrap().len(), 16);
    }

    #[test]
    fn phi_on_free_itself_is_identity() {
        let t2 = TableSet::standard(2).unwrap();
        let f = FreeAlgebra::new(2, 2).unwrap();
        let cp = f.materialize(&t2).unwrap();
        let alg = cp.algebra();
        let pis: Vec<Element> = (0..2).map(|i| alg.element_of(f.projection(i).entries()).unwrap()).collect();
        let h = phi_alpha_hom(&f, alg, alg, &pis, &t2).unwrap();
        assert!(h.map().iter().enumerate().all(|(x, &y)| x == y));
        let q = FreeQuotient::new(alg, &pis, &t2).unwrap();
        assert_eq!(q.support(), &[0, 1, 2, 3]);
        assert_eq!(q.len(), 16);
    }

    #[test]
    fn constant_assignment_into_omega() {
        let t3 = TableSet::standard(3).unwrap();
        let o = Algebra::omega(3).unwrap();
        let q = FreeQuotient::new(&o, &[2, 2], &t3).unwrap();
        // the constant-2 point of A^2 has code 2·3 + 2
        assert_eq!(q.support(), &[8]);
        assert!(q.is_ultra());
        assert_eq!(q.len(), 3);
        let l = FunctionTable::from_fn(3, 2, |a| (a[0] + a[1]) % 3);
        assert_eq!(phi_alpha(&o, &[2, 2], &l).unwrap(), 1);
    }

    #[test]
    fn generating_pair_into_square_is_not_ultra() {
        let t2 = TableSet::standard(2).unwrap();
        let o = Algebra::omega(2).unwrap();
        let sq = direct_product(&o, &o).unwrap();
        let x = sq.element_of(&[0, 1]).unwrap();
        let q = FreeQuotient::new(&sq, &[x], &t2).unwrap();
        assert!(q.z().is_proper() && !q.is_ultra());
        assert_eq!(q.len(), 4);
    }

    #[test]
    fn probes_agree_with_kernel_filter() {
        let t2 = TableSet::standard(2).unwrap();
        let f = FreeAlgebra::new(2, 2).unwrap();
        let cp = f.materialize(&t2).unwrap();
        let o = Algebra::omega(2).unwrap();
        let sq = direct_product(&o, &o).unwrap();
        for a in sq.elements() {
            for b in sq.elements() {
                let h = phi_alpha_hom(&f, cp.algebra(), &sq, &[a, b], &t2).unwrap();
                let z = congruence_to_zfilter(&cp, &kernel(h.map())).unwrap();
                let q = FreeQuotient::new(&sq, &[a, b], &t2).unwrap();
                assert_eq!(z.generator(), q.z().generator());
            }
        }
    }
}
