//! Partition uniformities, uniformly continuous maps, maps between finite
//! powers `A^I → A^J`, and the maps they induce on free algebras and on
//! tuples of algebra elements.

use rand::Rng;
use serde::Serialize;

use crate::algebra::{Algebra, Element};
use crate::error::{Error, Result};
use crate::filter::PartitionFilter;
use crate::free::FreeAlgebra;
use crate::homomorphism::Homomorphism;
use crate::partition::SetPartition;
use crate::table::{checked_pow, decode_row, FunctionTable, TableSet};

/// A finite set with a filter of uniform partitions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UniformSpace {
    points: usize,
    filter: PartitionFilter,
}

impl UniformSpace {
    pub fn new(filter: PartitionFilter) -> UniformSpace {
        UniformSpace {
            points: filter.ground(),
            filter,
        }
    }

    /// `A^I` with `𝒫(A, I)`.
    pub fn power(base: usize, index: usize) -> Result<UniformSpace> {
        Ok(UniformSpace::new(FreeAlgebra::new(base, index)?.filter()?))
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn filter(&self) -> &PartitionFilter {
        &self.filter
    }
}

/// Filterbase criterion: `[f]₋₁(P)` is uniform for every generator `P` of
/// the target filter.
pub fn is_uniformly_continuous(
    map: &[usize],
    source: &PartitionFilter,
    target: &PartitionFilter,
) -> Result<bool> {
    if map.len() != source.ground() {
        return Err(Error::GroundMismatch {
            left: map.len(),
            right: source.ground(),
        });
    }
    for p in target.generators() {
        if !source.contains(&SetPartition::preimage(map, p)?)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A uniformly continuous map between uniform spaces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UniformMap {
    source: UniformSpace,
    target: UniformSpace,
    map: Vec<usize>,
}

impl UniformMap {
    pub fn new(source: UniformSpace, target: UniformSpace, map: Vec<usize>) -> Result<UniformMap> {
        if let Some(&y) = map.iter().find(|&&y| y >= target.points) {
            return Err(Error::NotInCarrier(y));
        }
        if !is_uniformly_continuous(&map, &source.filter, &target.filter)? {
            return Err(Error::NotUniformlyContinuous(
                "a uniform partition of the target pulls back to a non-uniform one".into(),
            ));
        }
        Ok(UniformMap { source, target, map })
    }

    pub fn source(&self) -> &UniformSpace {
        &self.source
    }

    pub fn target(&self) -> &UniformSpace {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    /// `next ∘ self`, revalidated.
    pub fn then(&self, next: &UniformMap) -> Result<UniformMap> {
        if self.target != next.source {
            return Err(Error::GroundMismatch {
                left: self.target.points,
                right: next.source.points,
            });
        }
        let map = self.map.iter().map(|&x| next.map[x]).collect();
        UniformMap::new(self.source.clone(), next.target.clone(), map)
    }
}

/// A map `f : A^I → A^J`, stored as the point code of each image.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PowerMap {
    base: usize,
    from: usize,
    to: usize,
    images: Vec<usize>,
}

impl PowerMap {
    pub fn new(base: usize, from: usize, to: usize, images: Vec<usize>) -> Result<PowerMap> {
        let src = FreeAlgebra::new(base, from)?.points();
        let tgt = FreeAlgebra::new(base, to)?.points();
        if images.len() != src {
            return Err(Error::GroundMismatch {
                left: images.len(),
                right: src,
            });
        }
        if let Some(&y) = images.iter().find(|&&y| y >= tgt) {
            return Err(Error::NotInCarrier(y));
        }
        Ok(PowerMap {
            base,
            from,
            to,
            images,
        })
    }

    /// `x ↦ (t_0(x), …, t_{J−1}(x))`.
    pub fn from_coordinates(base: usize, from: usize, coords: &[FunctionTable]) -> Result<PowerMap> {
        if coords.iter().any(|t| t.arity() != from || t.base() != base) {
            return Err(Error::InvalidTable("coordinate tables disagree with the source".into()));
        }
        let points = FreeAlgebra::new(base, from)?.points();
        let images = (0..points)
            .map(|p| coords.iter().fold(0usize, |acc, t| acc * base + t.entries()[p] as usize))
            .collect();
        PowerMap::new(base, from, coords.len(), images)
    }

    pub fn identity(base: usize, n: usize) -> Result<PowerMap> {
        let points = FreeAlgebra::new(base, n)?.points();
        PowerMap::new(base, n, n, (0..points).collect())
    }

    /// `x ↦ (x_{c_0}, …, x_{c_{J−1}})`.
    pub fn selection(base: usize, from: usize, coords: &[usize]) -> Result<PowerMap> {
        if let Some(&c) = coords.iter().find(|&&c| c >= from) {
            return Err(Error::NotInCarrier(c));
        }
        let tables: Vec<FunctionTable> = coords
            .iter()
            .map(|&c| FunctionTable::projection(base, from, c))
            .collect();
        PowerMap::from_coordinates(base, from, &tables)
    }

    /// A uniformly random map.
    pub fn random<R: Rng>(base: usize, from: usize, to: usize, rng: &mut R) -> Result<PowerMap> {
        let src = FreeAlgebra::new(base, from)?.points();
        let tgt = FreeAlgebra::new(base, to)?.points();
        PowerMap::new(base, from, to, (0..src).map(|_| rng.gen_range(0..tgt)).collect())
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn from(&self) -> usize {
        self.from
    }

    pub fn to(&self) -> usize {
        self.to
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `π_j ∘ f` as a table of arity `|I|`.
    pub fn coordinate(&self, j: usize) -> FunctionTable {
        let mut digits = vec![0u8; self.to];
        let entries = self
            .images
            .iter()
            .map(|&y| {
                decode_row(y, self.base, &mut digits);
                digits[j]
            })
            .collect();
        FunctionTable::new(self.base, self.from, entries).expect("valid coordinate table")
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &PowerMap) -> Result<PowerMap> {
        if g.base != self.base || g.from != self.to {
            return Err(Error::ArityMismatch {
                name: "composition".into(),
                expected: self.to,
                found: g.from,
            });
        }
        let images = self.images.iter().map(|&y| g.images[y]).collect();
        PowerMap::new(self.base, self.from, g.to, images)
    }

    /// `f*(ℓ) = ℓ ∘ f` for `ℓ ∈ F(A, J)`.
    pub fn pullback(&self, l: &FunctionTable) -> Result<FunctionTable> {
        if l.arity() != self.to || l.base() != self.base {
            return Err(Error::ArityMismatch {
                name: "pullback".into(),
                expected: self.to,
                found: l.arity(),
            });
        }
        let entries = self.images.iter().map(|&y| l.entries()[y]).collect();
        FunctionTable::new(self.base, self.from, entries)
    }

    /// `f` as a map of uniform spaces `(A^I, 𝒫(A,I)) → (A^J, 𝒫(A,J))`.
    pub fn as_uniform_map(&self) -> Result<UniformMap> {
        UniformMap::new(
            UniformSpace::power(self.base, self.from)?,
            UniformSpace::power(self.base, self.to)?,
            self.images.clone(),
        )
    }

    /// The preimage `f₋₁(R)` of a set of points of `A^J`.
    pub fn preimage_points(&self, r: &[usize]) -> Vec<usize> {
        (0..self.images.len())
            .filter(|&p| r.contains(&self.images[p]))
            .collect()
    }

    /// `f̄^ℒ(α)_j = (π_j ∘ f)^ℒ(α)`. Each coordinate is also recomputed from
    /// the table restricted to its essential variables; a disagreement
    /// means `ℒ` is not an algebra of the variety.
    pub fn induced(&self, target: &Algebra, alpha: &[Element]) -> Result<Vec<Element>> {
        if alpha.len() != self.from || target.base() != self.base {
            return Err(Error::ArityMismatch {
                name: "induced map".into(),
                expected: self.from,
                found: alpha.len(),
            });
        }
        (0..self.to)
            .map(|j| {
                let t = self.coordinate(j);
                let full = target.apply(&t, alpha)?;
                let vars = t.essential_variables();
                let args: Vec<Element> = vars.iter().map(|&v| alpha[v]).collect();
                let short = target.apply(&t.restrict(&vars), &args)?;
                if full != short {
                    return Err(Error::RepresentationDependence(format!(
                        "coordinate {j} depends on inessential arguments"
                    )));
                }
                Ok(full)
            })
            .collect()
    }
}

/// `f* : F(A, J) → F(A, I)` on materialized free algebras, verified to be a
/// homomorphism.
pub fn pullback_hom(
    f: &PowerMap,
    source_free: &Algebra,
    target_free: &Algebra,
    tables: &TableSet,
) -> Result<Homomorphism> {
    let map = source_free
        .elements()
        .map(|e| {
            let l = FunctionTable::new(f.base, f.to, source_free.rep(e).to_vec())?;
            let pulled = f.pullback(&l)?;
            target_free
                .element_of(pulled.entries())
                .ok_or(Error::NotUniformlyContinuous("f*(g) escapes F(A, I)".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Homomorphism::verified(source_free, target_free, map, tables)
}

/// Every tuple in `alg^n`, in lexicographic order, when there are at most
/// `cap` of them.
pub fn all_tuples(alg: &Algebra, n: usize, cap: usize) -> Result<Vec<Vec<Element>>> {
    let count = checked_pow(alg.len(), n).filter(|&c| c <= cap).ok_or(Error::CapExceeded {
        what: "tuple enumeration",
        needed: (alg.len() as u128).saturating_pow(n as u32),
        cap: cap as u128,
    })?;
    let mut out = Vec::with_capacity(count);
    for c in 0..count {
        let mut r = c;
        let mut t = vec![0usize; n];
        for slot in t.iter_mut().rev() {
            *slot = r % alg.len();
            r /= alg.len();
        }
        out.push(t);
    }
    Ok(out)
}
