//! Finite algebras in the variety generated by the full clone on `A`.
//!
//! Every algebra built here is a quotient of a pointwise-closed set of
//! vectors in `A^width`: fundamental operations act coordinatewise on
//! representatives and the result is read back through the class map.
//! Powers, clone powers, products, subalgebras and quotients of any of these
//! all share this one representation; `provenance` records how a value was
//! built.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::partition::SetPartition;
use crate::table::{checked_pow, FunctionTable, TableSet};

/// Carrier cap for constructions and congruence enumeration.
pub const CARRIER_CAP: usize = 4096;
/// Member cap for materialized free algebras (`3^9`).
pub const FREE_CAP: usize = 19683;

const DENSE_LIMIT: u64 = 1 << 22;

/// Index of a carrier element. Elements are numbered in lexicographic order
/// of their canonical representatives.
pub type Element = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Omega,
    ClonePower,
    Quotient,
    Product,
    Free,
    Subalgebra,
    Colimit,
}

#[derive(Clone)]
enum CodeIndex {
    Dense(Vec<u32>),
    Sparse(HashMap<u64, u32>),
}

impl CodeIndex {
    fn build(codes: &[u64], space: u64) -> CodeIndex {
        if space <= DENSE_LIMIT {
            let mut dense = vec![u32::MAX; space as usize];
            for (m, &c) in codes.iter().enumerate() {
                dense[c as usize] = m as u32;
            }
            CodeIndex::Dense(dense)
        } else {
            CodeIndex::Sparse(
                codes
                    .iter()
                    .enumerate()
                    .map(|(m, &c)| (c, m as u32))
                    .collect(),
            )
        }
    }

    #[inline]
    fn get(&self, code: u64) -> Option<usize> {
        match self {
            CodeIndex::Dense(v) => match v.get(code as usize) {
                Some(&m) if m != u32::MAX => Some(m as usize),
                _ => None,
            },
            CodeIndex::Sparse(h) => h.get(&code).map(|&m| m as usize),
        }
    }
}

#[derive(Clone)]
pub struct Algebra {
    base: usize,
    width: usize,
    provenance: Provenance,
    label: String,
    /// flat member vectors, sorted lexicographically
    members: Vec<u8>,
    codes: Vec<u64>,
    index: CodeIndex,
    class_of: Vec<u32>,
    reps: Vec<u32>,
}

impl fmt::Debug for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Algebra")
            .field("label", &self.label)
            .field("base", &self.base)
            .field("width", &self.width)
            .field("provenance", &self.provenance)
            .field("carrier", &self.len())
            .finish()
    }
}

fn encode(v: &[u8], base: usize) -> u64 {
    v.iter().fold(0u64, |acc, &x| acc * base as u64 + x as u64)
}

impl Algebra {
    /// Builds an algebra on the given vectors with the identity congruence.
    /// Fails if a constant vector is missing.
    pub fn from_members(
        base: usize,
        width: usize,
        provenance: Provenance,
        vectors: Vec<Vec<u8>>,
    ) -> Result<Algebra> {
        let cap = if provenance == Provenance::Free {
            FREE_CAP
        } else {
            CARRIER_CAP
        };
        Algebra::from_members_capped(base, width, provenance, vectors, cap)
    }

    fn from_members_capped(
        base: usize,
        width: usize,
        provenance: Provenance,
        mut vectors: Vec<Vec<u8>>,
        cap: usize,
    ) -> Result<Algebra> {
        if base == 0 || base > 255 {
            return Err(Error::UnsupportedBase(base));
        }
        let space = checked_pow(base, width)
            .filter(|&s| (s as u128) < u64::MAX as u128)
            .ok_or(Error::CapExceeded {
                what: "vector width",
                needed: (base as u128).saturating_pow(width as u32),
                cap: u64::MAX as u128,
            })? as u64;
        for v in &vectors {
            if v.len() != width || v.iter().any(|&x| x as usize >= base) {
                return Err(Error::Descriptor(format!("bad member vector {v:?}")));
            }
        }
        vectors.sort_unstable();
        vectors.dedup();
        if vectors.len() > cap {
            return Err(Error::CapExceeded {
                what: "carrier",
                needed: vectors.len() as u128,
                cap: cap as u128,
            });
        }
        let codes: Vec<u64> = vectors.iter().map(|v| encode(v, base)).collect();
        let members: Vec<u8> = vectors.concat();
        let n = codes.len();
        let alg = Algebra {
            base,
            width,
            provenance,
            label: String::new(),
            index: CodeIndex::build(&codes, space),
            codes,
            members,
            class_of: (0..n as u32).collect(),
            reps: (0..n as u32).collect(),
        };
        for a in 0..base {
            alg.constant(a as u8)?;
        }
        Ok(alg)
    }

    /// `Ω(A)`: the base set with every table as a fundamental operation.
    pub fn omega(base: usize) -> Result<Algebra> {
        let vectors = (0..base as u8).map(|a| vec![a]).collect();
        Ok(Algebra::from_members(base, 1, Provenance::Omega, vectors)?.with_label(format!("Ω({base})")))
    }

    /// The full power `Ω(A)^width`.
    pub fn full_power(base: usize, width: usize, provenance: Provenance) -> Result<Algebra> {
        let cap = if provenance == Provenance::Free {
            FREE_CAP
        } else {
            CARRIER_CAP
        };
        let count = checked_pow(base, width).filter(|&c| c <= cap).ok_or(Error::CapExceeded {
            what: "carrier",
            needed: (base as u128).saturating_pow(width as u32),
            cap: cap as u128,
        })?;
        let mut v = vec![0u8; width];
        let vectors = (0..count)
            .map(|c| {
                crate::table::decode_row(c, base, &mut v);
                v.clone()
            })
            .collect();
        Algebra::from_members_capped(base, width, provenance, vectors, cap)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Algebra {
        self.label = label.into();
        self
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Algebra {
        self.provenance = provenance;
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Carrier size.
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.len() == 1
    }

    pub fn elements(&self) -> std::ops::Range<Element> {
        0..self.len()
    }

    pub fn member_count(&self) -> usize {
        self.codes.len()
    }

    pub fn member(&self, m: usize) -> &[u8] {
        &self.members[m * self.width..(m + 1) * self.width]
    }

    pub fn class_of_member(&self, m: usize) -> Element {
        self.class_of[m] as usize
    }

    /// Canonical (lexicographically least) representative vector.
    pub fn rep(&self, e: Element) -> &[u8] {
        self.member(self.reps[e] as usize)
    }

    /// The class of a vector, if it is a member.
    pub fn element_of(&self, v: &[u8]) -> Option<Element> {
        if v.len() != self.width {
            return None;
        }
        self.index
            .get(encode(v, self.base))
            .map(|m| self.class_of[m] as usize)
    }

    /// `â` in this algebra.
    pub fn constant(&self, a: u8) -> Result<Element> {
        let v = vec![a; self.width];
        self.element_of(&v).ok_or(Error::MissingConstant(a as usize))
    }

    pub fn constants(&self) -> Vec<Element> {
        (0..self.base as u8)
            .map(|a| self.constant(a).expect("constants are checked at construction"))
            .collect()
    }

    fn check_table(&self, t: &FunctionTable, args: &[Element]) -> Result<()> {
        if t.base() != self.base {
            return Err(Error::BaseMismatch {
                left: self.base,
                right: t.base(),
            });
        }
        if t.arity() != args.len() {
            return Err(Error::ArityMismatch {
                name: "table".into(),
                expected: t.arity(),
                found: args.len(),
            });
        }
        if let Some(&x) = args.iter().find(|&&x| x >= self.len()) {
            return Err(Error::NotInCarrier(x));
        }
        Ok(())
    }

    /// `t̂` applied to carrier elements: coordinatewise on representatives.
    pub fn apply(&self, t: &FunctionTable, args: &[Element]) -> Result<Element> {
        self.check_table(t, args)?;
        let base = self.base as u64;
        let entries = t.entries();
        let mut code = 0u64;
        for k in 0..self.width {
            let row = args.iter().fold(0usize, |acc, &x| {
                acc * self.base + self.rep(x)[k] as usize
            });
            code = code * base + entries[row] as u64;
        }
        self.index
            .get(code)
            .map(|m| self.class_of[m] as usize)
            .ok_or(Error::ClosureViolation)
    }

    /// Unchecked binary application on raw entries; `None` on closure
    /// violation.
    #[inline]
    pub(crate) fn apply2(&self, entries: &[u8], x: Element, y: Element) -> Option<Element> {
        let (rx, ry) = (self.rep(x), self.rep(y));
        let base = self.base;
        let mut code = 0u64;
        for k in 0..self.width {
            code = code * base as u64 + entries[rx[k] as usize * base + ry[k] as usize] as u64;
        }
        self.index.get(code).map(|m| self.class_of[m] as usize)
    }

    #[inline]
    pub(crate) fn apply1(&self, entries: &[u8], x: Element) -> Option<Element> {
        let rx = self.rep(x);
        let mut code = 0u64;
        for &v in rx {
            code = code * self.base as u64 + entries[v as usize] as u64;
        }
        self.index.get(code).map(|m| self.class_of[m] as usize)
    }

    /// Rebuilds the class structure from arbitrary member labels, numbering
    /// classes by their least member.
    fn relabel(&self, member_labels: &[u32], provenance: Provenance) -> Algebra {
        let part = SetPartition::from_labels(member_labels);
        let class_of: Vec<u32> = part.labels().to_vec();
        let mut reps = vec![u32::MAX; part.block_count()];
        for (m, &c) in class_of.iter().enumerate() {
            if reps[c as usize] == u32::MAX {
                reps[c as usize] = m as u32;
            }
        }
        Algebra {
            base: self.base,
            width: self.width,
            provenance,
            label: String::new(),
            members: self.members.clone(),
            codes: self.codes.clone(),
            index: self.index.clone(),
            class_of,
            reps,
        }
    }

    /// Quotient by a partition of the carrier. Compatibility is the caller's
    /// responsibility; see [`crate::congruence::Congruence`].
    pub(crate) fn quotient_by(&self, classes: &SetPartition) -> Algebra {
        let labels: Vec<u32> = self
            .class_of
            .iter()
            .map(|&c| classes.label(c as usize) as u32)
            .collect();
        self.relabel(&labels, Provenance::Quotient)
    }

    /// The subalgebra on the given elements, with the map from new element
    /// indices to old ones.
    pub fn subalgebra(&self, elements: &[Element]) -> Result<(Algebra, Vec<Element>)> {
        let mut keep = vec![false; self.len()];
        for &e in elements {
            if e >= self.len() {
                return Err(Error::NotInCarrier(e));
            }
            keep[e] = true;
        }
        let ms: Vec<usize> = (0..self.member_count())
            .filter(|&m| keep[self.class_of[m] as usize])
            .collect();
        let vectors: Vec<Vec<u8>> = ms.iter().map(|&m| self.member(m).to_vec()).collect();
        let labels: Vec<u32> = ms.iter().map(|&m| self.class_of[m]).collect();
        let space = checked_pow(self.base, self.width).unwrap_or(usize::MAX) as u64;
        let codes: Vec<u64> = ms.iter().map(|&m| self.codes[m]).collect();
        let part = SetPartition::from_labels(&labels);
        let mut reps = vec![u32::MAX; part.block_count()];
        let mut back = vec![0; part.block_count()];
        for (i, &c) in part.labels().iter().enumerate() {
            if reps[c as usize] == u32::MAX {
                reps[c as usize] = i as u32;
                back[c as usize] = labels[i] as usize;
            }
        }
        let sub = Algebra {
            base: self.base,
            width: self.width,
            provenance: Provenance::Subalgebra,
            label: format!("⟨…⟩ ≤ {}", self.label),
            members: vectors.concat(),
            index: CodeIndex::build(&codes, space),
            codes,
            class_of: part.labels().to_vec(),
            reps,
        };
        for a in 0..self.base {
            sub.constant(a as u8)?;
        }
        Ok((sub, back))
    }

    /// Checks that applying any unary or binary table to arbitrary members,
    /// not just canonical representatives, lands in the class computed on
    /// representatives. Since these tables generate every operation, this
    /// makes term evaluation independent of the chosen representatives.
    pub fn check_representation_independent(&self, tables: &TableSet) -> Result<()> {
        if self.member_count() == self.len() {
            return Ok(());
        }
        let n = self.member_count();
        let w = self.width;
        let base = self.base as u64;
        let class_of_code = |code: u64| self.index.get(code).map(|m| self.class_of[m] as usize);
        for (ti, t) in tables.unary().iter().enumerate() {
            let e = t.entries();
            for m in 0..n {
                let code = self.member(m).iter().fold(0u64, |acc, &v| acc * base + e[v as usize] as u64);
                if class_of_code(code) != self.apply1(e, self.class_of_member(m)) {
                    return Err(Error::RepresentationDependence(format!("unary table #{ti} at member {m}")));
                }
            }
        }
        tables.binary().par_iter().enumerate().try_for_each(|(ti, t)| {
            let e = t.entries();
            for a in 0..n {
                let ra = self.member(a);
                for b in 0..n {
                    let rb = self.member(b);
                    let mut code = 0u64;
                    for k in 0..w {
                        code = code * base + e[ra[k] as usize * self.base + rb[k] as usize] as u64;
                    }
                    let direct = class_of_code(code);
                    let via = self.apply2(e, self.class_of_member(a), self.class_of_member(b));
                    if direct.is_none() || direct != via {
                        return Err(Error::RepresentationDependence(format!(
                            "binary table #{ti} at members ({a}, {b})"
                        )));
                    }
                }
            }
            Ok(())
        })
    }

    /// Checks that the carrier is closed under every table in the set.
    pub fn check_closed(&self, tables: &TableSet) -> Result<()> {
        for t in tables.unary() {
            for x in self.elements() {
                self.apply1(t.entries(), x).ok_or(Error::ClosureViolation)?;
            }
        }
        for t in tables.binary() {
            for x in self.elements() {
                for y in self.elements() {
                    self.apply2(t.entries(), x, y).ok_or(Error::ClosureViolation)?;
                }
            }
        }
        Ok(())
    }
}

/// `alg1 × alg2` with componentwise operations. Element `(x, y)` has index
/// `x * |alg2| + y`.
pub fn direct_product(a: &Algebra, b: &Algebra) -> Result<Algebra> {
    if a.base != b.base {
        return Err(Error::BaseMismatch {
            left: a.base,
            right: b.base,
        });
    }
    let count = a.member_count() * b.member_count();
    if count > CARRIER_CAP {
        return Err(Error::CapExceeded {
            what: "product carrier",
            needed: count as u128,
            cap: CARRIER_CAP as u128,
        });
    }
    let mut vectors = Vec::with_capacity(count);
    let mut labels = Vec::with_capacity(count);
    for ma in 0..a.member_count() {
        for mb in 0..b.member_count() {
            let mut v = a.member(ma).to_vec();
            v.extend_from_slice(b.member(mb));
            vectors.push(v);
            labels.push(a.class_of[ma] * b.len() as u32 + b.class_of[mb]);
        }
    }
    let width = a.width + b.width;
    let raw = Algebra::from_members(a.base, width, Provenance::Product, vectors)?;
    // members were produced in sorted order, so labels line up with raw members
    Ok(raw
        .relabel(&labels, Provenance::Product)
        .with_label(format!("{} × {}", a.label, b.label)))
}

/// A single step in building an element of a generated subalgebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Derivation {
    Seed(usize),
    Constant(u8),
    Unary { table: usize, arg: Element },
    Binary { table: usize, left: Element, right: Element },
}

/// Closure of `seeds` and all constants under the table set, recording how
/// each element was first reached. The list is in discovery order.
pub fn generate_with_derivations(
    alg: &Algebra,
    seeds: &[Element],
    tables: &TableSet,
) -> Result<Vec<(Element, Derivation)>> {
    if tables.base() != alg.base {
        return Err(Error::BaseMismatch {
            left: alg.base,
            right: tables.base(),
        });
    }
    let n = alg.len();
    let mut seen = vec![false; n];
    let mut list: Vec<(Element, Derivation)> = Vec::new();
    let push = |e: Element, d: Derivation, seen: &mut Vec<bool>, list: &mut Vec<_>| {
        if !seen[e] {
            seen[e] = true;
            list.push((e, d));
        }
    };
    for (a, c) in alg.constants().into_iter().enumerate() {
        push(c, Derivation::Constant(a as u8), &mut seen, &mut list);
    }
    for (i, &s) in seeds.iter().enumerate() {
        if s >= n {
            return Err(Error::NotInCarrier(s));
        }
        push(s, Derivation::Seed(i), &mut seen, &mut list);
    }
    let mut i = 0;
    while i < list.len() && list.len() < n {
        let x = list[i].0;
        for (ti, t) in tables.unary().iter().enumerate() {
            let z = alg.apply1(t.entries(), x).ok_or(Error::ClosureViolation)?;
            push(z, Derivation::Unary { table: ti, arg: x }, &mut seen, &mut list);
        }
        for j in 0..=i {
            let y = list[j].0;
            for (ti, t) in tables.binary().iter().enumerate() {
                let e = t.entries();
                let z = alg.apply2(e, x, y).ok_or(Error::ClosureViolation)?;
                push(z, Derivation::Binary { table: ti, left: x, right: y }, &mut seen, &mut list);
                if x != y {
                    let z = alg.apply2(e, y, x).ok_or(Error::ClosureViolation)?;
                    push(z, Derivation::Binary { table: ti, left: y, right: x }, &mut seen, &mut list);
                }
            }
            if list.len() == n {
                break;
            }
        }
        i += 1;
    }
    Ok(list)
}

/// The least subset containing `seeds` and every constant that is closed
/// under the table set, sorted ascending.
pub fn generate_subalgebra(alg: &Algebra, seeds: &[Element], tables: &TableSet) -> Result<Vec<Element>> {
    let mut out: Vec<Element> = generate_with_derivations(alg, seeds, tables)?
        .into_iter()
        .map(|(e, _)| e)
        .collect();
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_basics() {
        let o = Algebra::omega(3).unwrap();
        assert_eq!(o.len(), 3);
        assert_eq!(o.constant(2).unwrap(), 2);
        let id = FunctionTable::projection(3, 1, 0);
        assert_eq!(o.apply(&id, &[1]).unwrap(), 1);
        let c = FunctionTable::constant(3, 2);
        assert_eq!(o.apply(&c, &[]).unwrap(), 2);
        assert!(matches!(o.apply(&id, &[1, 2]), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn missing_constant_rejected() {
        let err = Algebra::from_members(2, 2, Provenance::ClonePower, vec![vec![0, 0], vec![0, 1]]);
        assert_eq!(err.unwrap_err(), Error::MissingConstant(1));
    }

    #[test]
    fn product_examples() {
        let o = Algebra::omega(3).unwrap();
        let one = Algebra::omega(1).unwrap();
        let p = direct_product(&o, &o).unwrap();
        assert_eq!(p.len(), 9);
        assert_eq!(p.rep(5), &[1, 2]);
        // the idempotent retraction onto {0, 1} fixes (0, 1)
        let i = FunctionTable::new(3, 1, vec![0, 1, 0]).unwrap();
        let x = p.element_of(&[0, 1]).unwrap();
        assert_eq!(p.apply(&i, &[x]).unwrap(), x);
        assert_ne!(x, p.constant(0).unwrap());
        assert_ne!(x, p.constant(1).unwrap());
        assert!(direct_product(&o, &one).is_err());
        let o1 = Algebra::omega(1).unwrap();
        assert_eq!(direct_product(&o1, &o1).unwrap().len(), 1);
    }

    #[test]
    fn generate_examples() {
        let tables = TableSet::standard(3).unwrap();
        let o = Algebra::omega(3).unwrap();
        assert_eq!(generate_subalgebra(&o, &[], &tables).unwrap(), vec![0, 1, 2]);

        let cube = Algebra::full_power(3, 3, Provenance::ClonePower).unwrap();
        let s = cube.element_of(&[0, 0, 1]).unwrap();
        let b = generate_subalgebra(&cube, &[s], &tables).unwrap();
        assert_eq!(b.len(), 9);
        for e in b {
            let v = cube.rep(e);
            assert_eq!(v[0], v[1]);
        }
        let all: Vec<_> = cube.elements().collect();
        assert_eq!(generate_subalgebra(&cube, &all, &tables).unwrap(), all);
    }

    #[test]
    fn subalgebra_keeps_classes() {
        let cube = Algebra::full_power(2, 2, Provenance::ClonePower).unwrap();
        let diag = [cube.constant(0).unwrap(), cube.constant(1).unwrap()];
        let (sub, back) = cube.subalgebra(&diag).unwrap();
        assert_eq!(sub.len(), 2);
        assert_eq!(back, diag.to_vec());
    }
}
