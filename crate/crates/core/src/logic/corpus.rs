use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ast::{Formula, SymbolRegistry, Term};
use super::parser::parse_formula;
use crate::error::{Error, Result};
use crate::table::FunctionTable;

pub const DEFAULT_DEPTH: usize = 2;
pub const DEFAULT_SIZE: usize = 100;

/// A seeded list of sentences together with the tables they mention.
#[derive(Clone, Debug, PartialEq)]
pub struct Corpus {
    seed: u64,
    depth: usize,
    registry: SymbolRegistry,
    sentences: Vec<Formula>,
}

#[derive(Serialize, Deserialize)]
struct CorpusRepr {
    seed: u64,
    depth: usize,
    tables: SymbolRegistry,
    sentences: Vec<String>,
}

impl Serialize for Corpus {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CorpusRepr {
            seed: self.seed,
            depth: self.depth,
            tables: self.registry.clone(),
            sentences: self.sentences.iter().map(|f| f.to_string()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Corpus {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = CorpusRepr::deserialize(d)?;
        Corpus::from_text(repr.seed, repr.depth, repr.tables, &repr.sentences).map_err(serde::de::Error::custom)
    }
}

/// `i(a) = min(a, 1)`: idempotent with image `{0, 1}`.
pub fn retraction(base: usize) -> FunctionTable {
    FunctionTable::from_fn(base, 1, |a| a[0].min(1))
}

/// `forall x. op_i(x) = c0 | op_i(x) = c1`, true in `Ω(A)` and false in
/// every algebra with an element outside the constants' image of `op_i`.
pub fn retraction_sentence() -> Formula {
    let ix = Term::app("op_i", vec![Term::var("x")]);
    Formula::forall(
        "x",
        Formula::or(Formula::eq(ix.clone(), Term::Const(0)), Formula::eq(ix, Term::Const(1))),
    )
}

struct Gen<'a> {
    rng: ChaCha8Rng,
    base: usize,
    tables: Vec<(&'a str, usize)>,
    fresh: usize,
}

impl Gen<'_> {
    fn term(&mut self, vars: &[String], depth: usize) -> Term {
        let roll = self.rng.gen_range(0..10);
        if depth > 0 && roll < 4 {
            let (name, arity) = self.tables[self.rng.gen_range(0..self.tables.len())];
            let args = (0..arity).map(|_| self.term(vars, depth - 1)).collect();
            Term::app(name, args)
        } else if !vars.is_empty() && roll < 8 {
            Term::Var(vars[self.rng.gen_range(0..vars.len())].clone())
        } else {
            Term::Const(self.rng.gen_range(0..self.base) as u8)
        }
    }

    fn formula(&mut self, vars: &mut Vec<String>, quantifiers: usize, size: usize) -> Formula {
        let roll = self.rng.gen_range(0..10);
        if quantifiers > 0 && (roll < 5 || vars.is_empty()) {
            let v = format!("x{}", self.fresh);
            self.fresh += 1;
            vars.push(v.clone());
            let body = self.formula(vars, quantifiers - 1, size);
            vars.pop();
            return if self.rng.gen_bool(0.5) {
                Formula::forall(&v, body)
            } else {
                Formula::exists(&v, body)
            };
        }
        if size > 1 && roll < 8 {
            return match self.rng.gen_range(0..3) {
                0 => Formula::not(self.formula(vars, quantifiers, size - 1)),
                1 => {
                    let a = self.formula(vars, quantifiers, size / 2);
                    Formula::and(a, self.formula(vars, quantifiers, size / 2))
                }
                _ => {
                    let a = self.formula(vars, quantifiers, size / 2);
                    Formula::or(a, self.formula(vars, quantifiers, size / 2))
                }
            };
        }
        Formula::eq(self.term(vars, 2), self.term(vars, 2))
    }
}

/// The standard registry for `base`: `op_i` (the retraction), a random
/// unary `op_u` and random binaries `op_f`, `op_g`, all drawn from `seed`.
pub fn standard_registry(base: usize, seed: u64) -> Result<SymbolRegistry> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7ab1e5);
    let mut r = SymbolRegistry::new(base);
    r.register("op_i", retraction(base))?;
    r.register("op_u", FunctionTable::from_fn(base, 1, |_| rng.gen_range(0..base) as u8))?;
    r.register("op_f", FunctionTable::from_fn(base, 2, |_| rng.gen_range(0..base) as u8))?;
    r.register("op_g", FunctionTable::from_fn(base, 2, |_| rng.gen_range(0..base) as u8))?;
    Ok(r)
}

impl Corpus {
    /// `size` sentences of quantifier depth at most `depth`. The first two
    /// are fixed (the retraction sentence and `c0 = c0`); the rest are
    /// random over the standard registry.
    pub fn generate(base: usize, size: usize, depth: usize, seed: u64) -> Result<Corpus> {
        if base < 2 {
            return Err(Error::UnsupportedBase(base));
        }
        let registry = standard_registry(base, seed)?;
        let mut sentences = vec![retraction_sentence(), Formula::eq(Term::Const(0), Term::Const(0))];
        sentences.truncate(size);
        let tables: Vec<(&str, usize)> = registry
            .tables()
            .iter()
            .map(|(n, t)| (n.as_str(), t.arity()))
            .collect();
        let mut g = Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            base,
            tables,
            fresh: 0,
        };
        while sentences.len() < size {
            g.fresh = 0;
            let q = g.rng.gen_range(0..=depth);
            let size = g.rng.gen_range(1..=4);
            sentences.push(g.formula(&mut Vec::new(), q, size));
        }
        Ok(Corpus {
            seed,
            depth,
            registry,
            sentences,
        })
    }

    /// A corpus from sentence text, parsed against `registry`.
    pub fn from_text(seed: u64, depth: usize, registry: SymbolRegistry, sentences: &[String]) -> Result<Corpus> {
        let parsed = sentences
            .iter()
            .map(|s| parse_formula(s, &registry))
            .collect::<Result<Vec<_>>>()?;
        Corpus::new(seed, depth, registry, parsed)
    }

    /// Checks that every formula is a sentence within the depth cap.
    pub fn new(seed: u64, depth: usize, registry: SymbolRegistry, sentences: Vec<Formula>) -> Result<Corpus> {
        for s in &sentences {
            let free = s.free_variables();
            if !free.is_empty() {
                return Err(Error::FreeVariables(free.into_iter().collect()));
            }
            if s.quantifier_depth() > depth {
                return Err(Error::CapExceeded {
                    what: "quantifier depth",
                    needed: s.quantifier_depth() as u128,
                    cap: depth as u128,
                });
            }
        }
        Ok(Corpus {
            seed,
            depth,
            registry,
            sentences,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn registry(&self) -> &SymbolRegistry {
        &self.registry
    }

    pub fn sentences(&self) -> &[Formula] {
        &self.sentences
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_seeded_and_bounded() {
        let a = Corpus::generate(3, 100, 2, 11).unwrap();
        let b = Corpus::generate(3, 100, 2, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 100);
        assert!(a.sentences().iter().all(|s| s.is_sentence() && s.quantifier_depth() <= 2));
        assert!(a.sentences().iter().any(|s| s.quantifier_depth() == 2));
        assert_eq!(a.sentences()[0].to_string(), "forall x. op_i(x) = c0 | op_i(x) = c1");
        assert_ne!(a, Corpus::generate(3, 100, 2, 12).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let a = Corpus::generate(2, 30, 2, 5).unwrap();
        let s = serde_json::to_string(&a).unwrap();
        let b: Corpus = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn depth_cap_is_checked() {
        let r = standard_registry(2, 0).unwrap();
        let s = vec!["forall x. forall y. forall z. x = y".to_string()];
        assert!(matches!(Corpus::from_text(0, 2, r.clone(), &s), Err(Error::CapExceeded { .. })));
        assert!(Corpus::from_text(0, 3, r, &s).is_ok());
    }
}
