//! Homomorphisms between finite algebras over a declared table set.

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{generate_with_derivations, Algebra, Derivation, Element};
use crate::error::{Error, Result};
use crate::table::TableSet;

/// A map between carriers that has been checked against a table set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Homomorphism {
    map: Vec<Element>,
}

impl Homomorphism {
    pub fn verified(src: &Algebra, tgt: &Algebra, map: Vec<Element>, tables: &TableSet) -> Result<Homomorphism> {
        check_homomorphism(src, tgt, &map, tables)?;
        Ok(Homomorphism { map })
    }

    pub(crate) fn trusted(map: Vec<Element>) -> Homomorphism {
        Homomorphism { map }
    }

    pub fn map(&self) -> &[Element] {
        &self.map
    }

    pub fn apply(&self, x: Element) -> Element {
        self.map[x]
    }

    pub fn into_map(self) -> Vec<Element> {
        self.map
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.map.iter().all(|y| seen.insert(*y))
    }

    pub fn is_bijective_onto(&self, target_len: usize) -> bool {
        self.map.len() == target_len && self.is_injective()
    }
}

/// Checks constants and every unary and binary table of the set.
pub fn check_homomorphism(src: &Algebra, tgt: &Algebra, map: &[Element], tables: &TableSet) -> Result<()> {
    if src.base() != tgt.base() || tables.base() != src.base() {
        return Err(Error::BaseMismatch {
            left: src.base(),
            right: tgt.base(),
        });
    }
    if map.len() != src.len() {
        return Err(Error::NotHomomorphism(format!(
            "map has {} entries for a carrier of {}",
            map.len(),
            src.len()
        )));
    }
    if let Some(&y) = map.iter().find(|&&y| y >= tgt.len()) {
        return Err(Error::NotInCarrier(y));
    }
    for a in 0..src.base() as u8 {
        if map[src.constant(a)?] != tgt.constant(a)? {
            return Err(Error::NotHomomorphism(format!("constant {a} not preserved")));
        }
    }
    for (ti, t) in tables.unary().iter().enumerate() {
        for x in src.elements() {
            let lhs = src.apply1(t.entries(), x).ok_or(Error::ClosureViolation)?;
            let rhs = tgt.apply1(t.entries(), map[x]).ok_or(Error::ClosureViolation)?;
            if map[lhs] != rhs {
                return Err(Error::NotHomomorphism(format!("unary table #{ti} at {x}")));
            }
        }
    }
    let n = src.len();
    tables
        .binary()
        .par_iter()
        .enumerate()
        .try_for_each(|(ti, t)| {
            let e = t.entries();
            for x in 0..n {
                for y in 0..n {
                    let lhs = src.apply2(e, x, y).ok_or(Error::ClosureViolation)?;
                    let rhs = tgt.apply2(e, map[x], map[y]).ok_or(Error::ClosureViolation)?;
                    if map[lhs] != rhs {
                        return Err(Error::NotHomomorphism(format!(
                            "binary table #{ti} at ({x}, {y})"
                        )));
                    }
                }
            }
            Ok(())
        })
}

/// `e: Ω(A) → L`, `a ↦ â^L`, checked to be a homomorphism. Since every
/// element of `Ω(A)` is a constant it is the only candidate.
pub fn canonical_embedding(alg: &Algebra, tables: &TableSet) -> Result<Homomorphism> {
    let omega = Algebra::omega(alg.base())?;
    let map = alg.constants();
    Homomorphism::verified(&omega, alg, map, tables)
}

pub fn is_isomorphism(src: &Algebra, tgt: &Algebra, map: &[Element], tables: &TableSet) -> Result<bool> {
    let h = Homomorphism::trusted(map.to_vec());
    if !h.is_bijective_onto(tgt.len()) {
        return Ok(false);
    }
    match check_homomorphism(src, tgt, map, tables) {
        Ok(()) => Ok(true),
        Err(Error::NotHomomorphism(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

/// A small generating set, grown greedily from the least element not yet
/// generated.
pub fn greedy_generators(alg: &Algebra, tables: &TableSet) -> Result<Vec<Element>> {
    let mut gens = Vec::new();
    let mut have = crate::algebra::generate_subalgebra(alg, &gens, tables)?;
    while have.len() < alg.len() {
        let next = alg
            .elements()
            .find(|e| have.binary_search(e).is_err())
            .expect("some element is missing");
        gens.push(next);
        have = crate::algebra::generate_subalgebra(alg, &gens, tables)?;
    }
    Ok(gens)
}

fn replay(
    derivs: &[(Element, Derivation)],
    images: &[Element],
    src_len: usize,
    tgt: &Algebra,
    tables: &TableSet,
) -> Option<Vec<Element>> {
    let mut map = vec![usize::MAX; src_len];
    for &(e, d) in derivs {
        let y = match d {
            Derivation::Seed(i) => images[i],
            Derivation::Constant(a) => tgt.constant(a).ok()?,
            Derivation::Unary { table, arg } => tgt.apply1(tables.unary()[table].entries(), map[arg])?,
            Derivation::Binary { table, left, right } => {
                tgt.apply2(tables.binary()[table].entries(), map[left], map[right])?
            }
        };
        map[e] = y;
    }
    Some(map)
}

/// Searches for an isomorphism by choosing images of a generating set and
/// replaying how the rest of the source is generated.
pub fn find_isomorphism(src: &Algebra, tgt: &Algebra, tables: &TableSet) -> Result<Option<Homomorphism>> {
    if src.len() != tgt.len() || src.base() != tgt.base() {
        return Ok(None);
    }
    let gens = greedy_generators(src, tables)?;
    let derivs = generate_with_derivations(src, &gens, tables)?;
    let n = tgt.len();
    let k = gens.len();
    let total = (n as u128).pow(k as u32);
    if total > 1_000_000 {
        return Err(Error::CapExceeded {
            what: "isomorphism candidates",
            needed: total,
            cap: 1_000_000,
        });
    }
    let mut images = vec![0usize; k];
    for mut c in 0..total as usize {
        for slot in images.iter_mut().rev() {
            *slot = c % n;
            c /= n;
        }
        let Some(map) = replay(&derivs, &images, src.len(), tgt, tables) else {
            continue;
        };
        let h = Homomorphism::trusted(map);
        if h.is_bijective_onto(n) && is_isomorphism(src, tgt, h.map(), tables)? {
            return Ok(Some(h));
        }
    }
    Ok(None)
}

/// Every homomorphism `src → tgt`, found by backtracking over all maps with
/// each constraint checked as soon as its elements are assigned. Meant as a
/// brute-force oracle for small algebras.
pub fn enumerate_homomorphisms(src: &Algebra, tgt: &Algebra, tables: &TableSet) -> Result<Vec<Vec<Element>>> {
    let n = src.len();
    let work = (tables.len() as u128) * (n as u128) * (n as u128);
    if work > 2_000_000 {
        return Err(Error::CapExceeded {
            what: "homomorphism enumeration constraints",
            needed: work,
            cap: 2_000_000,
        });
    }
    // constraints[v]: (kind, table, x, y, z) whose largest element is v
    enum C {
        Const(Element),
        Unary(usize, Element, Element),
        Binary(usize, Element, Element, Element),
    }
    let mut constraints: Vec<Vec<C>> = (0..n).map(|_| Vec::new()).collect();
    for a in 0..src.base() as u8 {
        let c = src.constant(a)?;
        constraints[c].push(C::Const(tgt.constant(a)?));
    }
    for (ti, t) in tables.unary().iter().enumerate() {
        for x in 0..n {
            let z = src.apply1(t.entries(), x).ok_or(Error::ClosureViolation)?;
            constraints[x.max(z)].push(C::Unary(ti, x, z));
        }
    }
    for (ti, t) in tables.binary().iter().enumerate() {
        for x in 0..n {
            for y in 0..n {
                let z = src.apply2(t.entries(), x, y).ok_or(Error::ClosureViolation)?;
                constraints[x.max(y).max(z)].push(C::Binary(ti, x, y, z));
            }
        }
    }
    let m = tgt.len();
    let mut out = Vec::new();
    let mut map = vec![0usize; n];
    let mut choice = vec![0usize; n + 1];
    let mut depth = 0usize;
    // iterative backtracking over positions 0..n
    loop {
        if depth == n {
            out.push(map.clone());
            if n == 0 {
                break;
            }
            depth -= 1;
            choice[depth] += 1;
            continue;
        }
        if choice[depth] >= m {
            choice[depth] = 0;
            if depth == 0 {
                break;
            }
            depth -= 1;
            choice[depth] += 1;
            continue;
        }
        map[depth] = choice[depth];
        let ok = constraints[depth].iter().all(|c| match *c {
            C::Const(img) => map[depth] == img,
            C::Unary(ti, x, z) => tgt.apply1(tables.unary()[ti].entries(), map[x]) == Some(map[z]),
            C::Binary(ti, x, y, z) => {
                tgt.apply2(tables.binary()[ti].entries(), map[x], map[y]) == Some(map[z])
            }
        });
        if ok {
            depth += 1;
            choice[depth] = 0;
        } else {
            choice[depth] += 1;
        }
    }
    Ok(out)
}
