use rayon::prelude::*;
use serde::Serialize;

use super::corpus::Corpus;
use super::eval::{eval_sentence, EVAL_CAP};
use crate::algebra::Algebra;
use crate::clone_power::LimitReducedPower;
use crate::error::{Error, Result};
use crate::homomorphism::check_homomorphism;
use crate::table::TableSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransferCase {
    pub index: usize,
    pub sentence: String,
    pub left: bool,
    pub right: bool,
    pub transfers: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransferReport {
    pub seed: u64,
    pub depth_cap: usize,
    pub eval_cap: u128,
    pub left: String,
    pub right: String,
    pub cases: usize,
    pub violations: usize,
    pub verdicts: Vec<TransferCase>,
}

impl TransferReport {
    pub fn all_transfer(&self) -> bool {
        self.violations == 0
    }

    pub fn first_violation(&self) -> Option<&TransferCase> {
        self.verdicts.iter().find(|c| !c.transfers)
    }
}

/// Evaluates every corpus sentence in both algebras. Sentences run
/// concurrently; verdicts are in corpus order.
pub fn transfer(left: &Algebra, right: &Algebra, corpus: &Corpus) -> Result<TransferReport> {
    let reg = corpus.registry();
    let verdicts = corpus
        .sentences()
        .par_iter()
        .enumerate()
        .map(|(index, s)| {
            let l = eval_sentence(left, reg, s)?;
            let r = eval_sentence(right, reg, s)?;
            Ok(TransferCase {
                index,
                sentence: s.to_string(),
                left: l,
                right: r,
                transfers: l == r,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TransferReport {
        seed: corpus.seed(),
        depth_cap: corpus.depth(),
        eval_cap: EVAL_CAP,
        left: left.label().to_string(),
        right: right.label().to_string(),
        cases: verdicts.len(),
        violations: verdicts.iter().filter(|c| !c.transfers).count(),
        verdicts,
    })
}

/// Compares a limit ultrapower with `Ω(A)` on the corpus. Rejects
/// non-ultra quotients.
pub fn los_check(lrp: &LimitReducedPower, corpus: &Corpus) -> Result<TransferReport> {
    if !lrp.is_ultra() {
        return Err(Error::NotUltra);
    }
    let omega = Algebra::omega(lrp.algebra().base())?;
    transfer(lrp.algebra(), &omega, corpus)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ElementaryReport {
    pub isomorphism: bool,
    pub corpus: TransferReport,
    /// For finite algebras with every constant named, `e` is elementary
    /// exactly when it is bijective; the corpus is independent evidence.
    pub elementary: bool,
    /// False when the corpus contradicts the verdict.
    pub consistent: bool,
}

/// Decides whether `e: Ω(A) → target` is an elementary embedding.
pub fn is_elementary_embedding(
    e: &[usize],
    target: &Algebra,
    tables: &TableSet,
    corpus: &Corpus,
) -> Result<ElementaryReport> {
    let omega = Algebra::omega(target.base())?;
    check_homomorphism(&omega, target, e, tables)?;
    let mut hit = vec![false; target.len()];
    e.iter().for_each(|&x| hit[x] = true);
    let isomorphism = hit.iter().all(|&h| h) && e.len() == target.len();
    let corpus = transfer(&omega, target, corpus)?;
    let consistent = !isomorphism || corpus.all_transfer();
    Ok(ElementaryReport {
        isomorphism,
        elementary: isomorphism,
        consistent,
        corpus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::direct_product;
    use crate::clone_power::{limit_reduced_power, ClonePowerAlgebra};
    use crate::filter::{BAFilter, PartitionFilter};
    use crate::homomorphism::canonical_embedding;
    use crate::partition::SetPartition;

    #[test]
    fn retraction_sentence_separates_omega_from_its_square() {
        let t = TableSet::standard(3).unwrap();
        let corpus = Corpus::generate(3, 20, 2, 1).unwrap();
        let omega = Algebra::omega(3).unwrap();
        let id: Vec<usize> = omega.elements().collect();
        let r = is_elementary_embedding(&id, &omega, &t, &corpus).unwrap();
        assert!(r.elementary && r.consistent && r.corpus.all_transfer());

        let sq = direct_product(&omega, &omega).unwrap();
        let e = canonical_embedding(&sq, &t).unwrap();
        let r = is_elementary_embedding(e.map(), &sq, &t, &corpus).unwrap();
        assert!(!r.elementary && !r.isomorphism);
        let v = r.corpus.first_violation().unwrap();
        assert_eq!(v.index, 0);
        assert!(v.left && !v.right);
    }

    #[test]
    fn los_on_a_limit_ultrapower() {
        let t = TableSet::standard(3).unwrap();
        let corpus = Corpus::generate(3, 100, 2, 7).unwrap();
        let f = PartitionFilter::principal(SetPartition::discrete(3)).unwrap();
        let cp = ClonePowerAlgebra::build(3, f, &t).unwrap();
        let ba = cp.block_algebra();
        let z = BAFilter::principal(ba, ba.atoms()[0]).unwrap();
        let lrp = limit_reduced_power(&cp, &z).unwrap();
        let report = los_check(&lrp, &corpus).unwrap();
        assert_eq!(report.cases, 100);
        assert!(report.all_transfer());
        let e = canonical_embedding(lrp.algebra(), &t).unwrap();
        assert!(is_elementary_embedding(e.map(), lrp.algebra(), &t, &corpus).unwrap().elementary);

        let top = BAFilter::principal(ba, ba.top()).unwrap();
        let lrp = limit_reduced_power(&cp, &top).unwrap();
        assert_eq!(los_check(&lrp, &corpus), Err(Error::NotUltra));
    }
}
