//! Finite function tables `A^n → A` and the declared generating sets of
//! tables used for closure, compatibility and homomorphism checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A total map `A^n → A`, stored row-major with the first argument most
/// significant. Arity 0 is a constant.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FunctionTable {
    base: usize,
    arity: usize,
    entries: Vec<u8>,
}

/// Wire form of a table; the base comes from the surrounding descriptor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableSpec {
    pub arity: usize,
    pub entries: Vec<u8>,
}

pub(crate) fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

impl FunctionTable {
    pub fn new(base: usize, arity: usize, entries: Vec<u8>) -> Result<FunctionTable> {
        if base == 0 || base > 255 {
            return Err(Error::UnsupportedBase(base));
        }
        let len = checked_pow(base, arity)
            .ok_or_else(|| Error::InvalidTable(format!("{base}^{arity} rows overflow")))?;
        if entries.len() != len {
            return Err(Error::InvalidTable(format!(
                "expected {len} entries for arity {arity} over base {base}, found {}",
                entries.len()
            )));
        }
        if let Some(v) = entries.iter().find(|&&v| v as usize >= base) {
            return Err(Error::InvalidTable(format!("value {v} outside base {base}")));
        }
        Ok(FunctionTable {
            base,
            arity,
            entries,
        })
    }

    pub fn from_spec(base: usize, spec: &TableSpec) -> Result<FunctionTable> {
        FunctionTable::new(base, spec.arity, spec.entries.clone())
    }

    pub fn to_spec(&self) -> TableSpec {
        TableSpec {
            arity: self.arity,
            entries: self.entries.clone(),
        }
    }

    /// The nullary table naming `a`.
    pub fn constant(base: usize, a: u8) -> FunctionTable {
        FunctionTable {
            base,
            arity: 0,
            entries: vec![a],
        }
    }

    /// `(x₀, …, x_{n−1}) ↦ x_i`.
    pub fn projection(base: usize, arity: usize, i: usize) -> FunctionTable {
        let rows = base.pow(arity as u32);
        let entries = (0..rows)
            .map(|r| digit(r, base, arity, i) as u8)
            .collect();
        FunctionTable {
            base,
            arity,
            entries,
        }
    }

    /// Builds a table by evaluating `f` on every row.
    pub fn from_fn(base: usize, arity: usize, mut f: impl FnMut(&[u8]) -> u8) -> FunctionTable {
        let rows = base.pow(arity as u32);
        let mut args = vec![0u8; arity];
        let entries = (0..rows)
            .map(|r| {
                decode_row(r, base, &mut args);
                f(&args)
            })
            .collect();
        FunctionTable {
            base,
            arity,
            entries,
        }
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn entries(&self) -> &[u8] {
        &self.entries
    }

    pub fn row_index(&self, args: &[u8]) -> usize {
        args.iter().fold(0usize, |acc, &a| acc * self.base + a as usize)
    }

    pub fn eval(&self, args: &[u8]) -> u8 {
        debug_assert_eq!(args.len(), self.arity);
        self.entries[self.row_index(args)]
    }

    /// Positions the table actually depends on, ascending.
    pub fn essential_variables(&self) -> Vec<usize> {
        let base = self.base;
        (0..self.arity)
            .filter(|&i| {
                let stride = base.pow((self.arity - 1 - i) as u32);
                (0..self.entries.len()).any(|r| {
                    let d = (r / stride) % base;
                    d > 0 && self.entries[r] != self.entries[r - d * stride]
                })
            })
            .collect()
    }

    /// The table of arity `vars.len()` obtained by fixing every other
    /// position to 0. Agrees with `self` whenever `vars` covers all
    /// essential variables.
    pub fn restrict(&self, vars: &[usize]) -> FunctionTable {
        let mut full = vec![0u8; self.arity];
        FunctionTable::from_fn(self.base, vars.len(), |args| {
            for (&v, &a) in vars.iter().zip(args) {
                full[v] = a;
            }
            self.eval(&full)
        })
    }

    /// `self ∘ (g₀, …, g_{n−1})` where every `g_k` has the same arity.
    pub fn compose(&self, inner: &[FunctionTable]) -> Result<FunctionTable> {
        if inner.len() != self.arity {
            return Err(Error::ArityMismatch {
                name: "compose".into(),
                expected: self.arity,
                found: inner.len(),
            });
        }
        let m = inner.first().map_or(0, |g| g.arity);
        if inner.iter().any(|g| g.arity != m || g.base != self.base) {
            return Err(Error::InvalidTable("inner tables disagree".into()));
        }
        let mut vals = vec![0u8; self.arity];
        let mut t = FunctionTable::from_fn(self.base, m, |_| 0);
        for r in 0..t.entries.len() {
            for (k, g) in inner.iter().enumerate() {
                vals[k] = g.entries[r];
            }
            t.entries[r] = self.eval(&vals);
        }
        Ok(t)
    }
}

/// The `i`-th argument (most significant first) encoded in row `r`.
pub(crate) fn digit(r: usize, base: usize, arity: usize, i: usize) -> usize {
    (r / base.pow((arity - 1 - i) as u32)) % base
}

pub(crate) fn decode_row(mut r: usize, base: usize, out: &mut [u8]) {
    for slot in out.iter_mut().rev() {
        *slot = (r % base) as u8;
        r /= base;
    }
}

/// Seed for the random binary sample used when the base is too large for
/// exhaustive binary tables.
pub const SAMPLE_SEED: u64 = 0x5eed_0f_c10e;
/// Number of sampled binary tables for base 4.
pub const SAMPLE_SIZE: usize = 64;

/// The declared generating set of fundamental tables against which closure,
/// compatibility and homomorphism properties are checked. Constants are
/// always implied.
#[derive(Clone, Debug)]
pub struct TableSet {
    base: usize,
    unary: Vec<FunctionTable>,
    binary: Vec<FunctionTable>,
}

impl TableSet {
    /// All unary and binary tables for `|A| ≤ 3`. For `|A| = 4`: all unary
    /// tables, one pairing table injective on each 4-element set of argument
    /// pairs (zero elsewhere), and a seeded sample of [`SAMPLE_SIZE`]
    /// binary tables.
    pub fn standard(base: usize) -> Result<TableSet> {
        match base {
            1..=3 => Ok(TableSet {
                base,
                unary: all_tables(base, 1),
                binary: all_tables(base, 2),
            }),
            4 => {
                let mut binary = pairing_tables(base);
                let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
                for _ in 0..SAMPLE_SIZE {
                    let entries = (0..base * base).map(|_| rng.gen_range(0..base as u8)).collect();
                    binary.push(FunctionTable::new(base, 2, entries)?);
                }
                binary.sort();
                binary.dedup();
                Ok(TableSet {
                    base,
                    unary: all_tables(base, 1),
                    binary,
                })
            }
            _ => Err(Error::UnsupportedBase(base)),
        }
    }

    pub fn custom(
        base: usize,
        unary: Vec<FunctionTable>,
        binary: Vec<FunctionTable>,
    ) -> Result<TableSet> {
        for t in unary.iter().chain(&binary) {
            if t.base != base {
                return Err(Error::BaseMismatch {
                    left: base,
                    right: t.base,
                });
            }
        }
        if unary.iter().any(|t| t.arity != 1) || binary.iter().any(|t| t.arity != 2) {
            return Err(Error::InvalidTable("wrong arity in table set".into()));
        }
        Ok(TableSet {
            base,
            unary,
            binary,
        })
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn unary(&self) -> &[FunctionTable] {
        &self.unary
    }

    pub fn binary(&self) -> &[FunctionTable] {
        &self.binary
    }

    pub fn len(&self) -> usize {
        self.unary.len() + self.binary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// True when the binary tables are all of `A² → A`, which makes the set
    /// closed under swapping arguments.
    pub fn is_exhaustive(&self) -> bool {
        checked_pow(self.base, self.base * self.base) == Some(self.binary.len())
    }
}

/// Every table of the given arity in lexicographic order of entries.
pub fn all_tables(base: usize, arity: usize) -> Vec<FunctionTable> {
    let rows = base.pow(arity as u32);
    let count = base.pow(rows as u32);
    let mut entries = vec![0u8; rows];
    (0..count)
        .map(|c| {
            decode_row(c, base, &mut entries);
            FunctionTable {
                base,
                arity,
                entries: entries.clone(),
            }
        })
        .collect()
}

fn pairing_tables(base: usize) -> Vec<FunctionTable> {
    let pairs = base * base;
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(base);
    fn rec(
        start: usize,
        pairs: usize,
        base: usize,
        chosen: &mut Vec<usize>,
        out: &mut Vec<FunctionTable>,
    ) {
        if chosen.len() == base {
            let mut entries = vec![0u8; pairs];
            for (v, &p) in chosen.iter().enumerate() {
                entries[p] = v as u8;
            }
            out.push(FunctionTable {
                base,
                arity: 2,
                entries,
            });
            return;
        }
        for p in start..pairs {
            chosen.push(p);
            rec(p + 1, pairs, base, chosen, out);
            chosen.pop();
        }
    }
    rec(0, pairs, base, &mut chosen, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_major_order() {
        let t = FunctionTable::new(3, 2, (0..9).map(|r| (r / 3) as u8).collect()).unwrap();
        assert_eq!(t.eval(&[2, 0]), 2);
        assert_eq!(t, FunctionTable::projection(3, 2, 0));
        assert_eq!(t.essential_variables(), vec![0]);
        assert_eq!(t.restrict(&[0]), FunctionTable::projection(3, 1, 0));
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(FunctionTable::new(2, 1, vec![0, 2]).is_err());
        assert!(FunctionTable::new(2, 2, vec![0, 1]).is_err());
        assert!(FunctionTable::new(0, 0, vec![]).is_err());
    }

    #[test]
    fn standard_sets() {
        let s3 = TableSet::standard(3).unwrap();
        assert_eq!(s3.unary().len() + s3.binary().len(), 27 + 19683);
        assert!(s3.is_exhaustive());
        let s4 = TableSet::standard(4).unwrap();
        assert_eq!(s4.unary().len(), 256);
        assert!(s4.binary().len() > SAMPLE_SIZE);
        assert!(!s4.is_exhaustive());
        assert!(TableSet::standard(5).is_err());
    }

    #[test]
    fn pairing_tables_cover_small_pair_sets() {
        let s4 = TableSet::standard(4).unwrap();
        // every set of at most 4 argument pairs has an injective table
        let pairs: Vec<(u8, u8)> = (0..4).flat_map(|a| (0..4).map(move |b| (a, b))).collect();
        for i in 0..pairs.len() {
            for j in i + 1..pairs.len() {
                for k in j + 1..pairs.len() {
                    let set = [pairs[i], pairs[j], pairs[k]];
                    assert!(s4.binary().iter().any(|t| {
                        let vals: Vec<u8> = set.iter().map(|&(a, b)| t.eval(&[a, b])).collect();
                        vals[0] != vals[1] && vals[0] != vals[2] && vals[1] != vals[2]
                    }));
                }
            }
        }
    }

    #[test]
    fn compose_tables() {
        let swap = FunctionTable::from_fn(2, 2, |a| a[1]);
        let p0 = FunctionTable::projection(2, 2, 0);
        let p1 = FunctionTable::projection(2, 2, 1);
        assert_eq!(swap.compose(&[p1.clone(), p0.clone()]).unwrap(), p0);
    }
}
