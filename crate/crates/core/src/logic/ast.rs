use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::table::{FunctionTable, TableSpec};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    /// `â`, written `c<a>`.
    Const(u8),
    App(String, Vec<Term>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn app(name: &str, args: Vec<Term>) -> Term {
        Term::App(name.to_string(), args)
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }
}

impl Formula {
    pub fn eq(s: Term, t: Term) -> Formula {
        Formula::Eq(s, t)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn forall(v: &str, f: Formula) -> Formula {
        Formula::Forall(v.to_string(), Box::new(f))
    }

    pub fn exists(v: &str, f: Formula) -> Formula {
        Formula::Exists(v.to_string(), Box::new(f))
    }

    /// Maximum nesting of quantifiers.
    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Eq(..) => 0,
            Formula::Not(a) => a.quantifier_depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.quantifier_depth().max(b.quantifier_depth())
            }
            Formula::Forall(_, a) | Formula::Exists(_, a) => 1 + a.quantifier_depth(),
        }
    }

    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        match self {
            Formula::Eq(s, t) => {
                s.collect_vars(&mut out);
                t.collect_vars(&mut out);
            }
            Formula::Not(a) => out = a.free_variables(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                out = a.free_variables();
                out.extend(b.free_variables());
            }
            Formula::Forall(v, a) | Formula::Exists(v, a) => {
                out = a.free_variables();
                out.remove(v);
            }
        }
        out
    }

    pub fn is_sentence(&self) -> bool {
        self.free_variables().is_empty()
    }

    /// The same formula with `A → B` rewritten as `¬A ∨ B`, which is how
    /// implications print.
    pub fn desugar(&self) -> Formula {
        match self {
            Formula::Eq(..) => self.clone(),
            Formula::Not(a) => Formula::not(a.desugar()),
            Formula::And(a, b) => Formula::and(a.desugar(), b.desugar()),
            Formula::Or(a, b) => Formula::or(a.desugar(), b.desugar()),
            Formula::Implies(a, b) => Formula::or(Formula::not(a.desugar()), b.desugar()),
            Formula::Forall(v, a) => Formula::forall(v, a.desugar()),
            Formula::Exists(v, a) => Formula::exists(v, a.desugar()),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(a) => write!(f, "c{a}"),
            Term::App(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

// precedence contexts: 0 formula, 1 disjunct, 2 conjunct, 3 unit
fn write_formula(out: &mut fmt::Formatter<'_>, phi: &Formula, ctx: u8) -> fmt::Result {
    let wrap = |out: &mut fmt::Formatter<'_>, own: u8, body: &dyn Fn(&mut fmt::Formatter<'_>) -> fmt::Result| {
        if ctx > own {
            write!(out, "(")?;
            body(out)?;
            write!(out, ")")
        } else {
            body(out)
        }
    };
    match phi {
        Formula::Eq(s, t) => write!(out, "{s} = {t}"),
        Formula::Not(a) => {
            write!(out, "!")?;
            write_formula(out, a, 3)
        }
        Formula::And(a, b) => wrap(out, 2, &|out| {
            write_formula(out, a, 2)?;
            write!(out, " & ")?;
            write_formula(out, b, 3)
        }),
        Formula::Or(a, b) => wrap(out, 1, &|out| {
            write_formula(out, a, 1)?;
            write!(out, " | ")?;
            write_formula(out, b, 2)
        }),
        Formula::Implies(a, b) => {
            let d = Formula::or(Formula::not((**a).clone()), (**b).clone());
            write_formula(out, &d, ctx)
        }
        Formula::Forall(v, a) | Formula::Exists(v, a) => {
            let q = if matches!(phi, Formula::Forall(..)) { "forall" } else { "exists" };
            wrap(out, 0, &|out| {
                write!(out, "{q} {v}. ")?;
                write_formula(out, a, 0)
            })
        }
    }
}

/// Prints in the surface grammar with the fewest parentheses that parse
/// back to the same tree.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, 0)
    }
}

pub(crate) const KEYWORDS: [&str; 2] = ["forall", "exists"];

pub(crate) fn is_constant_name(s: &str) -> bool {
    s.len() > 1 && s.starts_with('c') && s[1..].bytes().all(|b| b.is_ascii_digit())
}

pub(crate) fn is_variable_name(s: &str) -> bool {
    let mut bytes = s.bytes();
    matches!(bytes.next(), Some(b'a'..=b'z'))
        && bytes.all(|b| b.is_ascii_lowercase() || b.is_ascii_digit())
        && !KEYWORDS.contains(&s)
        && !is_constant_name(s)
}

/// Named tables available to formulas. Constants `c<a>` are implicit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolRegistry {
    base: usize,
    tables: BTreeMap<String, FunctionTable>,
}

#[derive(Serialize, Deserialize)]
struct RegistryRepr {
    base: usize,
    tables: BTreeMap<String, TableSpec>,
}

impl Serialize for SymbolRegistry {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RegistryRepr {
            base: self.base,
            tables: self.tables.iter().map(|(k, t)| (k.clone(), t.to_spec())).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymbolRegistry {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = RegistryRepr::deserialize(d)?;
        let mut reg = SymbolRegistry::new(repr.base);
        for (name, spec) in repr.tables {
            let t = FunctionTable::from_spec(repr.base, &spec).map_err(serde::de::Error::custom)?;
            reg.register(&name, t).map_err(serde::de::Error::custom)?;
        }
        Ok(reg)
    }
}

impl SymbolRegistry {
    pub fn new(base: usize) -> SymbolRegistry {
        SymbolRegistry {
            base,
            tables: BTreeMap::new(),
        }
    }

    /// Names are identifiers (`[A-Za-z_][A-Za-z0-9_]*`) other than the
    /// keywords and the constant names, and may be registered once.
    pub fn register(&mut self, name: &str, table: FunctionTable) -> Result<()> {
        let mut bytes = name.bytes();
        let ident = matches!(bytes.next(), Some(b) if b.is_ascii_alphabetic() || b == b'_')
            && bytes.all(|b| b.is_ascii_alphanumeric() || b == b'_');
        if !ident || KEYWORDS.contains(&name) || is_constant_name(name) {
            return Err(Error::UnknownSymbol(format!("{name} is not a valid table name")));
        }
        if table.base() != self.base {
            return Err(Error::BaseMismatch {
                left: self.base,
                right: table.base(),
            });
        }
        if self.tables.contains_key(name) {
            return Err(Error::UnknownSymbol(format!("{name} is already registered")));
        }
        self.tables.insert(name.to_string(), table);
        Ok(())
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn get(&self, name: &str) -> Option<&FunctionTable> {
        self.tables.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.tables.keys().map(String::as_str)
    }

    pub fn tables(&self) -> &BTreeMap<String, FunctionTable> {
        &self.tables
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printing_uses_minimal_parentheses() {
        let e = |a: u8, b: u8| Formula::eq(Term::Const(a), Term::Const(b));
        let f = Formula::or(e(0, 0), Formula::or(e(0, 1), e(1, 1)));
        assert_eq!(f.to_string(), "c0 = c0 | (c0 = c1 | c1 = c1)");
        let f = Formula::or(Formula::or(e(0, 0), e(0, 1)), e(1, 1));
        assert_eq!(f.to_string(), "c0 = c0 | c0 = c1 | c1 = c1");
        let f = Formula::and(Formula::forall("x", e(0, 0)), Formula::not(Formula::or(e(0, 1), e(1, 0))));
        assert_eq!(f.to_string(), "(forall x. c0 = c0) & !(c0 = c1 | c1 = c0)");
        let f = Formula::implies(e(0, 1), e(1, 1));
        assert_eq!(f.to_string(), "!c0 = c1 | c1 = c1");
    }

    #[test]
    fn depth_and_free_variables() {
        let x = Term::var("x");
        let y = Term::var("y");
        let body = Formula::eq(Term::app("op_f", vec![x.clone(), y.clone()]), x);
        let f = Formula::forall("x", Formula::exists("y", body.clone()));
        assert_eq!(f.quantifier_depth(), 2);
        assert!(f.is_sentence());
        assert_eq!(body.free_variables().len(), 2);
    }

    #[test]
    fn registry_rejects_bad_names() {
        let mut r = SymbolRegistry::new(2);
        let id = FunctionTable::projection(2, 1, 0);
        assert!(r.register("op_id", id.clone()).is_ok());
        assert!(r.register("op_id", id.clone()).is_err());
        assert!(r.register("c3", id.clone()).is_err());
        assert!(r.register("forall", id.clone()).is_err());
        assert!(r.register("9x", id.clone()).is_err());
        assert!(r.register("u", FunctionTable::projection(3, 1, 0)).is_err());
    }
}
