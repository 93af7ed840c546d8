//! The generator preorder `β ≤ α`, connecting maps `E^{β,α}` between free
//! quotients, and directed colimits of such quotients.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{generate_subalgebra, Algebra, Element, Provenance};
use crate::catalog::desk_targets;
use crate::error::{Error, Result};
use crate::free::FreeQuotient;
use crate::homomorphism::{check_homomorphism, Homomorphism};
use crate::partition::UnionFind;
use crate::table::{FunctionTable, TableSet};
use crate::uniform::PowerMap;

fn increasing_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Decides `β ≤ α`, i.e. `⟨β″(J)⟩ ⊆ ⟨α″(I)⟩`, and when it holds returns a
/// witness `f : A^I → A^J` with `β = f̄^ℒ(α)`.
///
/// A coordinate equal to a generator `α(i)` is the projection onto the
/// least such `i`. Any other `π_j ∘ f` is found as `t(x_{i₁}, …, x_{iₙ})`:
/// smallest `n` first, then the lexicographically least index tuple, with `t` the
/// canonical representative of the class of `F(A, n) / Z` that `ι` sends
/// to `β(j)`.
pub fn leq(target: &Algebra, beta: &[Element], alpha: &[Element], tables: &TableSet) -> Result<Option<PowerMap>> {
    let span = generate_subalgebra(target, alpha, tables)?;
    if beta.iter().any(|b| span.binary_search(b).is_err()) {
        return Ok(None);
    }
    let base = target.base();
    let width = alpha.len();
    let mut cache: BTreeMap<Vec<usize>, FreeQuotient> = BTreeMap::new();
    let mut coords = Vec::with_capacity(beta.len());
    for (j, &b) in beta.iter().enumerate() {
        if let Some(i) = alpha.iter().position(|&a| a == b) {
            coords.push(FunctionTable::projection(base, width, i));
            continue;
        }
        let mut found = None;
        'search: for n in 0..=width {
            for idx in increasing_tuples(width, n) {
                if !cache.contains_key(&idx) {
                    let sub: Vec<Element> = idx.iter().map(|&i| alpha[i]).collect();
                    cache.insert(idx.clone(), FreeQuotient::compute(target, &sub)?);
                }
                let q = &cache[&idx];
                if let Some(c) = q.iota_inverse(b) {
                    let t = q.canonical_rep(c);
                    let mut args = vec![0u8; n];
                    found = Some(FunctionTable::from_fn(base, width, |x| {
                        for (slot, &i) in args.iter_mut().zip(&idx) {
                            *slot = x[i];
                        }
                        t.eval(&args)
                    }));
                    break 'search;
                }
            }
        }
        let t = found.ok_or_else(|| {
            Error::NotBelow(format!("β({j}) lies in ⟨α⟩ but no term over α reaches it"))
        })?;
        coords.push(t);
    }
    let f = PowerMap::from_coordinates(base, width, &coords)?;
    if f.induced(target, alpha)? != beta {
        return Err(Error::NotBelow("witness does not reproduce β".into()));
    }
    Ok(Some(f))
}

/// `E^{β,α}([ℓ]) = [ℓ ∘ f]` for a witness `f`, checked against the
/// commuting square `ι_{β,α} ι_β = ι_α E^{β,α}` (which also pins it to
/// `ι_α⁻¹ ι_β`, hence makes it independent of `f`) and verified to be a
/// homomorphism.
pub fn connecting_map(
    target: &Algebra,
    from: &FreeQuotient,
    to: &FreeQuotient,
    witness: &PowerMap,
    tables: &TableSet,
) -> Result<Homomorphism> {
    let map = from
        .algebra()
        .elements()
        .map(|c| {
            let pulled = witness.pullback(&from.canonical_rep(c))?;
            Ok(to.class_of(&pulled))
        })
        .collect::<Result<Vec<Element>>>()?;
    for (c, &e) in map.iter().enumerate() {
        if to.iota(e) != from.iota(c) {
            return Err(Error::NotHomomorphism(format!(
                "commuting square fails at class {c} of {}",
                target.label()
            )));
        }
    }
    Homomorphism::verified(from.algebra(), to.algebra(), map, tables)
}

/// A finite directed poset `D` with generator assignments `α_d` into a
/// fixed target.
#[derive(Clone, Debug)]
pub struct DirectedSystem {
    target: Algebra,
    order: Vec<Vec<bool>>,
    stages: Vec<Vec<Element>>,
}

impl DirectedSystem {
    /// `edges` generate the order; its reflexive-transitive closure must be
    /// antisymmetric and directed.
    pub fn new(target: Algebra, edges: &[(usize, usize)], stages: Vec<Vec<Element>>) -> Result<DirectedSystem> {
        let n = stages.len();
        if n == 0 {
            return Err(Error::InvalidSystem("no stages".into()));
        }
        let mut order = vec![vec![false; n]; n];
        for (d, row) in order.iter_mut().enumerate() {
            row[d] = true;
        }
        for &(d, e) in edges {
            if d >= n || e >= n {
                return Err(Error::InvalidSystem(format!("edge ({d}, {e}) out of range")));
            }
            order[d][e] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if order[i][k] {
                    for j in 0..n {
                        if order[k][j] {
                            order[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if order[i][j] && order[j][i] {
                    return Err(Error::InvalidSystem(format!("stages {i} and {j} form a cycle")));
                }
                if !(0..n).any(|k| order[i][k] && order[j][k]) {
                    return Err(Error::InvalidSystem(format!(
                        "stages {i} and {j} have no upper bound"
                    )));
                }
            }
        }
        if let Some(x) = stages.iter().flatten().find(|&&x| x >= target.len()) {
            return Err(Error::NotInCarrier(*x));
        }
        Ok(DirectedSystem {
            target,
            order,
            stages,
        })
    }

    pub fn target(&self) -> &Algebra {
        &self.target
    }

    pub fn stages(&self) -> &[Vec<Element>] {
        &self.stages
    }

    pub fn le(&self, d: usize, e: usize) -> bool {
        self.order[d][e]
    }

    /// The greatest stage; a finite directed poset has one.
    pub fn top(&self) -> usize {
        (0..self.stages.len())
            .find(|&t| (0..self.stages.len()).all(|d| self.order[d][t]))
            .expect("finite directed posets have a maximum")
    }

    /// All pairs `d ≤ e`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.stages.len();
        (0..n)
            .flat_map(|d| (0..n).map(move |e| (d, e)))
            .filter(|&(d, e)| self.order[d][e])
            .collect()
    }
}

/// Outcome of a colimit computation.
#[derive(Clone, Debug)]
pub struct Colimit {
    /// The colimit, presented on the carrier of the top stage.
    pub algebra: Algebra,
    /// Each colimit element as the `(stage, element)` pairs it identifies.
    pub classes: Vec<Vec<(usize, Element)>>,
    /// The isomorphism onto the target.
    pub iso: Homomorphism,
    /// `E_{d,e}` for every `d ≤ e`.
    pub connecting: BTreeMap<(usize, usize), Vec<Element>>,
    pub quotients: Vec<FreeQuotient>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ColimitSummary {
    pub stages: usize,
    pub top: usize,
    pub index_sizes: Vec<usize>,
    pub quotient_sizes: Vec<usize>,
    pub colimit_size: usize,
    pub target_size: usize,
    pub iso: Vec<Element>,
}

impl Colimit {
    pub fn summary(&self, sys: &DirectedSystem) -> ColimitSummary {
        ColimitSummary {
            stages: sys.stages.len(),
            top: sys.top(),
            index_sizes: sys.stages.iter().map(Vec::len).collect(),
            quotient_sizes: self.quotients.iter().map(FreeQuotient::len).collect(),
            colimit_size: self.algebra.len(),
            target_size: sys.target.len(),
            iso: self.iso.map().to_vec(),
        }
    }
}

/// The colimit of `F(A, I_d) / Z_d` along the connecting maps, with a
/// verified isomorphism onto the target.
pub fn directed_colimit(sys: &DirectedSystem, tables: &TableSet) -> Result<Colimit> {
    let target = &sys.target;
    let quotients = sys
        .stages
        .iter()
        .map(|a| FreeQuotient::new(target, a, tables))
        .collect::<Result<Vec<_>>>()?;
    let mut covered = vec![false; target.len()];
    for q in &quotients {
        for &x in q.iota_map() {
            covered[x] = true;
        }
    }
    if let Some(x) = covered.iter().position(|c| !c) {
        return Err(Error::InvalidSystem(format!("element {x} of the target is not reached")));
    }

    let mut connecting = BTreeMap::new();
    for (d, e) in sys.pairs() {
        let witness = leq(target, &sys.stages[d], &sys.stages[e], tables)?
            .ok_or_else(|| Error::NotBelow(format!("α_{d} ≰ α_{e}")))?;
        let h = connecting_map(target, &quotients[d], &quotients[e], &witness, tables)?;
        connecting.insert((d, e), h.into_map());
    }
    for ((d, e), m) in &connecting {
        if d == e && m.iter().enumerate().any(|(x, &y)| x != y) {
            return Err(Error::InvalidSystem(format!("E_{d},{d} is not the identity")));
        }
    }
    for &(d, e) in connecting.keys() {
        for &(e2, f) in connecting.keys() {
            if e2 != e {
                continue;
            }
            let de = &connecting[&(d, e)];
            let ef = &connecting[&(e, f)];
            let df = &connecting[&(d, f)];
            if de.iter().enumerate().any(|(x, &y)| ef[y] != df[x]) {
                return Err(Error::InvalidSystem(format!("E_{d},{f} ≠ E_{e},{f} ∘ E_{d},{e}")));
            }
        }
    }

    let offsets: Vec<usize> = quotients
        .iter()
        .scan(0, |acc, q| {
            let o = *acc;
            *acc += q.len();
            Some(o)
        })
        .collect();
    let total = offsets.last().unwrap() + quotients.last().unwrap().len();
    let mut uf = UnionFind::new(total);
    for ((d, e), m) in &connecting {
        for (x, &y) in m.iter().enumerate() {
            uf.union(offsets[*d] + x, offsets[*e] + y);
        }
    }
    let top = sys.top();
    let tq = &quotients[top];
    let mut class_of_root: BTreeMap<usize, Element> = BTreeMap::new();
    for c in tq.algebra().elements() {
        let root = uf.find(offsets[top] + c);
        if class_of_root.insert(root, c).is_some() {
            return Err(Error::InvalidSystem("two top-stage elements are identified".into()));
        }
    }
    let mut classes = vec![Vec::new(); tq.len()];
    for (d, q) in quotients.iter().enumerate() {
        for x in q.algebra().elements() {
            let root = uf.find(offsets[d] + x);
            let c = *class_of_root
                .get(&root)
                .ok_or_else(|| Error::InvalidSystem(format!("({d}, {x}) never reaches the top stage")))?;
            classes[c].push((d, x));
        }
    }
    let algebra = tq
        .algebra()
        .clone()
        .with_provenance(Provenance::Colimit)
        .with_label(format!("colim → {}", target.label()));
    let map = tq.iota_map().to_vec();
    let iso = Homomorphism::trusted(map.clone());
    if !iso.is_bijective_onto(target.len()) {
        return Err(Error::NotHomomorphism("colimit map is not a bijection".into()));
    }
    check_homomorphism(&algebra, target, &map, tables)?;
    Ok(Colimit {
        algebra,
        classes,
        iso,
        connecting,
        quotients,
    })
}

/// A seeded random chain of at most four stages over a catalog target with
/// at most 27 elements, each stage using at most three generators, the
/// last one generating the target.
pub fn random_directed_system(seed: u64) -> Result<(DirectedSystem, TableSet)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = if rng.gen_bool(0.5) { 2 } else { 3 };
    let tables = TableSet::standard(base)?;
    let targets: Vec<Algebra> = desk_targets(base, 3, 27, &tables)?
        .into_iter()
        .filter(|a| a.len() > 1)
        .collect();
    let target = targets.choose(&mut rng).expect("catalog is nonempty").clone();
    let len = rng.gen_range(1..=4);
    let mut stages: Vec<Vec<Element>> = Vec::with_capacity(len);

    let all: Vec<Element> = target.elements().collect();
    let mut last = None;
    for _ in 0..200 {
        let k = rng.gen_range(1..=3);
        let cand: Vec<Element> = (0..k).map(|_| *all.choose(&mut rng).unwrap()).collect();
        if generate_subalgebra(&target, &cand, &tables)?.len() == target.len() {
            last = Some(cand);
            break;
        }
    }
    let last = match last {
        Some(l) => l,
        None => vec![single_generator(&target, &tables)?],
    };
    stages.push(last);
    while stages.len() < len {
        let span = generate_subalgebra(&target, stages.last().unwrap(), &tables)?;
        let k = rng.gen_range(1..=3);
        let next: Vec<Element> = (0..k).map(|_| *span.choose(&mut rng).unwrap()).collect();
        stages.push(next);
    }
    stages.reverse();
    let edges: Vec<(usize, usize)> = (1..stages.len()).map(|d| (d - 1, d)).collect();
    Ok((DirectedSystem::new(target, &edges, stages)?, tables))
}

/// The least element generating the whole algebra, if there is one.
pub fn single_generator(alg: &Algebra, tables: &TableSet) -> Result<Element> {
    for x in alg.elements() {
        if generate_subalgebra(alg, &[x], tables)?.len() == alg.len() {
            return Ok(x);
        }
    }
    Err(Error::InvalidSystem(format!("{} has no single generator", alg.label())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::direct_product;

    #[test]
    fn leq_examples() {
        let t2 = TableSet::standard(2).unwrap();
        let o = Algebra::omega(2).unwrap();
        let sq = direct_product(&o, &o).unwrap();
        let x = sq.element_of(&[0, 1]).unwrap();
        let y = sq.element_of(&[1, 0]).unwrap();
        let f = leq(&sq, &[x, y], &[x, y], &t2).unwrap().unwrap();
        assert_eq!(f, PowerMap::identity(2, 2).unwrap());
        let f = leq(&sq, &[y], &[x, y], &t2).unwrap().unwrap();
        // y = ¬x, found at arity 1 over the first generator
        assert_eq!(f.induced(&sq, &[x, y]).unwrap(), vec![y]);
        let c = sq.constant(1).unwrap();
        assert!(leq(&sq, &[x], &[c], &t2).unwrap().is_none());
    }

    #[test]
    fn chain_in_square() {
        let t2 = TableSet::standard(2).unwrap();
        let o = Algebra::omega(2).unwrap();
        let sq = direct_product(&o, &o).unwrap();
        let c0 = sq.constant(0).unwrap();
        let x = sq.element_of(&[0, 1]).unwrap();
        let sys = DirectedSystem::new(sq.clone(), &[(0, 1)], vec![vec![c0], vec![c0, x]]).unwrap();
        let col = directed_colimit(&sys, &t2).unwrap();
        assert_eq!(col.algebra.len(), 4);
        assert_eq!(col.classes.iter().map(Vec::len).sum::<usize>(), 2 + 4);
    }

    #[test]
    fn constant_system() {
        let t3 = TableSet::standard(3).unwrap();
        let o = Algebra::omega(3).unwrap();
        let sys = DirectedSystem::new(o, &[(0, 1), (0, 2), (1, 3), (2, 3)], vec![vec![1]; 4]).unwrap();
        let col = directed_colimit(&sys, &t3).unwrap();
        assert_eq!(col.algebra.len(), 3);
        assert_eq!(col.quotients.iter().map(FreeQuotient::len).collect::<Vec<_>>(), vec![3; 4]);
    }

    #[test]
    fn invalid_systems() {
        let o = Algebra::omega(2).unwrap();
        assert!(DirectedSystem::new(o.clone(), &[], vec![vec![0], vec![1]]).is_err());
        assert!(DirectedSystem::new(o.clone(), &[(0, 1), (1, 0)], vec![vec![0], vec![1]]).is_err());
        let t2 = TableSet::standard(2).unwrap();
        let sq = direct_product(&o, &o).unwrap();
        let x = sq.element_of(&[0, 1]).unwrap();
        let c = sq.constant(0).unwrap();
        // the stages only reach the constants
        let sys = DirectedSystem::new(sq.clone(), &[], vec![vec![c]]).unwrap();
        assert!(matches!(directed_colimit(&sys, &t2), Err(Error::InvalidSystem(_))));
        // the order goes the wrong way
        let sys = DirectedSystem::new(sq, &[(0, 1)], vec![vec![x], vec![c]]).unwrap();
        assert!(directed_colimit(&sys, &t2).is_err());
    }

    #[test]
    fn random_systems_build() {
        for seed in 0..3 {
            let (sys, tables) = random_directed_system(seed).unwrap();
            assert!(sys.stages().len() <= 4);
            let col = directed_colimit(&sys, &tables).unwrap();
            assert_eq!(col.algebra.len(), sys.target().len());
        }
    }
}
