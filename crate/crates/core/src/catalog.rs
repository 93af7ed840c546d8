//! Small algebras built by the constructions of this crate, used as targets
//! by the verification suites.

use crate::algebra::{direct_product, Algebra};
use crate::clone_power::{limit_reduced_power, ClonePowerAlgebra};
use crate::error::Result;
use crate::filter::PartitionFilter;
use crate::free::FreeAlgebra;
use crate::table::TableSet;

/// Every algebra over `base` with at most `max_carrier` elements among:
/// `Ω(A)`, clone powers `Ω(A)^F` and their limit reduced powers for index
/// sets of size at most `max_index`, binary products of the above with
/// `Ω(A)`, and materialized free algebras. Exact duplicates (same members
/// and classes) are dropped; isomorphic copies with different
/// presentations are kept.
pub fn desk_targets(
    base: usize,
    max_index: usize,
    max_carrier: usize,
    tables: &TableSet,
) -> Result<Vec<Algebra>> {
    let mut out: Vec<Algebra> = Vec::new();
    let push = |a: Algebra, out: &mut Vec<Algebra>| {
        if a.len() <= max_carrier && !out.iter().any(|b| same_presentation(&a, b)) {
            out.push(a);
        }
    };
    let omega = Algebra::omega(base)?;
    push(omega.clone(), &mut out);
    for n in 1..=max_index {
        for f in PartitionFilter::all(n)? {
            let blocks = f.bottom().block_count();
            if (base as u128).pow(blocks as u32) > max_carrier as u128 {
                continue;
            }
            let cp = ClonePowerAlgebra::build(base, f, tables)?;
            for z in cp.block_algebra().filters() {
                push(limit_reduced_power(&cp, &z)?.algebra().clone(), &mut out);
            }
            push(cp.algebra().clone(), &mut out);
        }
    }
    let factors: Vec<Algebra> = out.iter().filter(|a| a.len() > 1).cloned().collect();
    for a in &factors {
        if a.len() * base <= max_carrier {
            push(direct_product(&omega, a)?, &mut out);
        }
    }
    for gens in 1..=2 {
        let Ok(free) = FreeAlgebra::new(base, gens) else {
            continue;
        };
        if (base as u128).pow(free.points() as u32) <= max_carrier as u128 {
            push(free.materialize(tables)?.algebra().clone(), &mut out);
        }
    }
    Ok(out)
}

fn same_presentation(a: &Algebra, b: &Algebra) -> bool {
    a.width() == b.width()
        && a.member_count() == b.member_count()
        && a.len() == b.len()
        && (0..a.member_count()).all(|m| a.member(m) == b.member(m) && a.class_of_member(m) == b.class_of_member(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_respects_caps() {
        let t2 = TableSet::standard(2).unwrap();
        let targets = desk_targets(2, 3, 16, &t2).unwrap();
        assert!(targets.iter().all(|a| a.len() <= 16));
        assert!(targets.iter().any(|a| a.len() == 1));
        assert!(targets.iter().any(|a| a.len() == 16));
        for (i, a) in targets.iter().enumerate() {
            for b in &targets[i + 1..] {
                assert!(!same_presentation(a, b));
            }
        }
    }
}
