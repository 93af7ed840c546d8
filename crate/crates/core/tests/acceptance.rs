//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always print; exits non-zero if any criterion
//! fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use limitpower::algebra::Algebra;
use limitpower::clone_power::{limit_reduced_power, subalgebra_to_filter, ClonePowerAlgebra};
use limitpower::congruence::{classify, congruence_lattice, Congruence};
use limitpower::filter::{BlockBooleanAlgebra, PartitionFilter};
use limitpower::partition::{SetPartition, Subset};
use limitpower::table::TableSet;
use limitpower::verify;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20240611;

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: true,
        detail: detail.into(),
    }
}

fn failed(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: false,
        detail: detail.into(),
    }
}

fn first_failure(r: &verify::SuiteReport) -> String {
    r.verdicts
        .iter()
        .find(|v| !v.ok)
        .map(|v| format!("{}: {}", v.case, v.detail))
        .unwrap_or_else(|| "no cases".into())
}

fn suite(r: limitpower::error::Result<verify::SuiteReport>) -> Outcome {
    match r {
        Ok(r) if r.passed() => pass(format!("{} cases, 0 failures", r.cases)),
        Ok(r) => failed(format!("{} of {} cases failed; {}", r.failures, r.cases, first_failure(&r))),
        Err(e) => failed(e.to_string()),
    }
}

/// Pointwise closure of `seeds` plus the constants under every unary and
/// binary table of the set, computed on raw vectors. The results of all
/// binary tables on a pair of vectors depend only on the column pattern of
/// the pair, so they are cached per pattern.
struct ClosureOracle<'a> {
    base: usize,
    width: usize,
    tables: &'a TableSet,
    by_pattern: Vec<Option<Vec<usize>>>,
}

impl<'a> ClosureOracle<'a> {
    fn new(base: usize, width: usize, tables: &'a TableSet) -> Self {
        let patterns = (base * base).pow(width as u32);
        ClosureOracle {
            base,
            width,
            tables,
            by_pattern: vec![None; patterns],
        }
    }

    fn code(&self, v: &[u8]) -> usize {
        v.iter().fold(0, |acc, &x| acc * self.base + x as usize)
    }

    fn decode(&self, mut c: usize) -> Vec<u8> {
        let mut v = vec![0u8; self.width];
        for k in (0..self.width).rev() {
            v[k] = (c % self.base) as u8;
            c /= self.base;
        }
        v
    }

    fn binary_results(&mut self, v: &[u8], w: &[u8]) -> &[usize] {
        let pattern = v
            .iter()
            .zip(w)
            .fold(0, |acc, (&x, &y)| acc * self.base * self.base + x as usize * self.base + y as usize);
        if self.by_pattern[pattern].is_none() {
            let mut out: Vec<usize> = self
                .tables
                .binary()
                .iter()
                .map(|t| self.code(&v.iter().zip(w).map(|(&x, &y)| t.eval(&[x, y])).collect::<Vec<_>>()))
                .collect();
            out.sort_unstable();
            out.dedup();
            self.by_pattern[pattern] = Some(out);
        }
        self.by_pattern[pattern].as_deref().unwrap()
    }

    fn closure(&mut self, seeds: &[Vec<u8>]) -> BTreeSet<Vec<u8>> {
        let space = self.base.pow(self.width as u32);
        let mut inside = vec![false; space];
        let mut members: Vec<usize> = Vec::new();
        let mut queue: Vec<usize> = (0..self.base as u8).map(|a| self.code(&vec![a; self.width])).collect();
        queue.extend(seeds.iter().map(|v| self.code(v)));
        while let Some(c) = queue.pop() {
            if inside[c] {
                continue;
            }
            inside[c] = true;
            members.push(c);
            let v = self.decode(c);
            for t in self.tables.unary() {
                queue.push(self.code(&v.iter().map(|&x| t.eval(&[x])).collect::<Vec<_>>()));
            }
            for &d in &members.clone() {
                let w = self.decode(d);
                queue.extend_from_slice(&self.binary_results(&v, &w).to_vec());
                queue.extend_from_slice(&self.binary_results(&w, &v).to_vec());
            }
        }
        members.iter().map(|&c| self.decode(c)).collect()
    }
}

fn all_vectors(base: usize, width: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for _ in 0..width {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..base as u8).map(move |a| {
                    let mut w = v.clone();
                    w.push(a);
                    w
                })
            })
            .collect();
    }
    out
}

fn kernel_refines(f: &[u8], p: &SetPartition) -> bool {
    (0..f.len()).all(|i| (0..f.len()).all(|j| !p.same_block(i, j) || f[i] == f[j]))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let (base, index) = (4, 3);
    let tables = TableSet::standard(base).unwrap();
    let full = all_vectors(base, index);
    let mut oracle = ClosureOracle::new(base, index, &tables);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for trial in 0..200 {
        let k = rng.gen_range(1..=2);
        let seeds: Vec<Vec<u8>> = (0..k).map(|_| full[rng.gen_range(0..full.len())].clone()).collect();
        let b = oracle.closure(&seeds);
        let vectors: Vec<Vec<u8>> = b.iter().cloned().collect();
        let f = match subalgebra_to_filter(base, index, &vectors) {
            Ok(f) => f,
            Err(e) => return failed(format!("trial {trial}: {e}")),
        };
        let rebuilt: BTreeSet<Vec<u8>> = full
            .iter()
            .filter(|v| kernel_refines(v, f.bottom()))
            .cloned()
            .collect();
        if rebuilt != b {
            return failed(format!("trial {trial}: seeds {seeds:?} rebuild to {} of {}", rebuilt.len(), b.len()));
        }
    }
    let oracle_time = start.elapsed();
    match verify::thm1(base, index, 200, SEED) {
        Ok(r) if r.passed() => pass(format!(
            "200 subalgebras recovered exactly; membership criterion agrees (oracle {oracle_time:.1?})"
        )),
        Ok(r) => failed(first_failure(&r)),
        Err(e) => failed(e.to_string()),
    }
}

fn criterion_2() -> Outcome {
    let mut checked = 0;
    for n in 1..=4 {
        for f in PartitionFilter::all(n).unwrap() {
            let ba = match BlockBooleanAlgebra::of_filter(&f) {
                Ok(ba) => ba,
                Err(e) => return failed(e.to_string()),
            };
            let elems: BTreeSet<Subset> = ba.elements().iter().copied().collect();
            let mut expected: BTreeSet<Subset> = BTreeSet::from([Subset::default()]);
            for p in f.members() {
                for block in p.blocks() {
                    expected.insert(Subset::from_iter(block));
                }
            }
            if elems != expected {
                return failed(format!("F={}: elements differ from the blocks of members", f.bottom()));
            }
            let full = Subset::full(n);
            if !elems.contains(&Subset::default()) || !elems.contains(&full) {
                return failed(format!("F={}: missing ∅ or I", f.bottom()));
            }
            for &x in &elems {
                if !elems.contains(&x.complement(n)) {
                    return failed(format!("F={}: not closed under complement", f.bottom()));
                }
                for &y in &elems {
                    if !elems.contains(&x.union(y)) || !elems.contains(&x.intersection(y)) {
                        return failed(format!("F={}: not closed under ∪/∩", f.bottom()));
                    }
                }
            }
            checked += 1;
        }
    }
    pass(format!("{checked} filters, all closed"))
}

fn criterion_3() -> Outcome {
    let r = verify::thm2(3, 3);
    let tables = TableSet::standard(3).unwrap();
    for f in PartitionFilter::all(3).unwrap() {
        let k = f.bottom().block_count();
        let cp = ClonePowerAlgebra::build(3, f, &tables).unwrap();
        let con = congruence_lattice(cp.algebra(), &tables).unwrap();
        if con.len() != 1 << k || cp.block_algebra().filters().len() != 1 << k {
            return failed(format!("expected 2^{k} congruences and filters"));
        }
    }
    suite(r)
}

fn lrp_algebras(base: usize, index: usize) -> Vec<(Algebra, bool)> {
    let tables = TableSet::standard(base).unwrap();
    let mut out = Vec::new();
    for f in PartitionFilter::all(index).unwrap() {
        let cp = ClonePowerAlgebra::build(base, f, &tables).unwrap();
        for z in cp.block_algebra().filters() {
            let lrp = limit_reduced_power(&cp, &z).unwrap();
            if lrp.algebra().len() >= 2 {
                out.push((lrp.algebra().clone(), lrp.is_ultra()));
            }
        }
    }
    out
}

fn criterion_4() -> Outcome {
    let tables = TableSet::standard(3).unwrap();
    // Ω(A)^m is simple exactly when m = 1
    for (alg, ultra) in lrp_algebras(3, 3) {
        let simple = classify(&alg, &tables).unwrap().simple;
        if simple != (alg.len() == 3) || ultra != (alg.len() == 3) {
            return failed(format!("{}: simple={simple} ultra={ultra}", alg.label()));
        }
    }
    suite(verify::thm3(3, 3, 2, SEED))
}

fn criterion_5() -> Outcome {
    let mut cases = 0;
    for gens in 1..=2 {
        match verify::free(2, gens, 16) {
            Ok(r) if r.passed() => cases += r.cases,
            Ok(r) => return failed(format!("G={gens}: {}", first_failure(&r))),
            Err(e) => return failed(e.to_string()),
        }
    }
    pass(format!("{cases} targets, unique extensions match enumeration"))
}

fn criterion_6() -> Outcome {
    suite(verify::functor(3, 100, SEED))
}

fn criterion_7() -> Outcome {
    match verify::los(3, 3, 2, 100, SEED) {
        Ok(l) if l.report.passed() => match l.necessity_witness {
            Some(w) => pass(format!("{} ultra quotients transfer; non-ultra witness {} {}", l.report.cases, w.case, w.detail)),
            None => failed("no proper non-ultra Z fails to transfer"),
        },
        Ok(l) => failed(first_failure(&l.report)),
        Err(e) => failed(e.to_string()),
    }
}

fn criterion_8() -> Outcome {
    suite(verify::colimit_random(20, SEED))
}

/// θ₁∘θ₂ = θ₂∘θ₁ by explicit relation composition.
fn permute_oracle(a: &Congruence, b: &Congruence, n: usize) -> bool {
    let compose = |r: &Congruence, s: &Congruence| -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for x in 0..n {
            for y in 0..n {
                if r.related(x, y) {
                    for z in 0..n {
                        if s.related(y, z) {
                            out.insert((x, z));
                        }
                    }
                }
            }
        }
        out
    };
    compose(a, b) == compose(b, a)
}

fn criterion_9() -> Outcome {
    let tables = TableSet::standard(3).unwrap();
    let mut algebras: Vec<Algebra> = PartitionFilter::all(3)
        .unwrap()
        .into_iter()
        .map(|f| ClonePowerAlgebra::build(3, f, &tables).unwrap().algebra().clone())
        .collect();
    algebras.extend(lrp_algebras(3, 3).into_iter().map(|(a, _)| a));
    let mut pairs = 0;
    for alg in &algebras {
        let con = congruence_lattice(alg, &tables).unwrap();
        for a in &con {
            for b in &con {
                if !permute_oracle(a, b, alg.len()) {
                    return failed(format!("{}: congruences do not permute", alg.label()));
                }
                pairs += 1;
            }
        }
    }
    pass(format!("{} algebras, {pairs} congruence pairs permute", algebras.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Outcome); 9] = [
        ("1 subalgebra/filter round trip", Duration::from_secs(30), criterion_1),
        ("2 block Boolean algebras", Duration::from_secs(5), criterion_2),
        ("3 congruence/filter bijection", Duration::from_secs(120), criterion_3),
        ("4 simplicity pentagon", Duration::from_secs(300), criterion_4),
        ("5 freeness", Duration::from_secs(120), criterion_5),
        ("6 functoriality", Duration::from_secs(60), criterion_6),
        ("7 transfer for limit ultrapowers", Duration::from_secs(180), criterion_7),
        ("8 directed colimits", Duration::from_secs(120), criterion_8),
        ("9 congruence permutability", Duration::from_secs(300), criterion_9),
    ];
    let mut all = true;
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let mut out = run();
        let elapsed = start.elapsed();
        if out.ok && elapsed > limit {
            out = failed(format!("took {elapsed:.1?}, limit {limit:?}"));
        }
        all &= out.ok;
        println!(
            "{} criterion {name} ({elapsed:.2?}): {}",
            if out.ok { "PASS" } else { "FAIL" },
            out.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
