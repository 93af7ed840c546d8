use std::collections::HashMap;

use super::ast::{Formula, SymbolRegistry, Term};
use crate::algebra::{Algebra, Element};
use crate::error::{Error, Result};
use crate::table::FunctionTable;

/// Largest `|carrier|^depth` a sentence may range over.
pub const EVAL_CAP: u128 = 1 << 26;

enum CTerm<'a> {
    Slot(usize),
    Elem(Element),
    App(&'a FunctionTable, Vec<CTerm<'a>>),
}

enum CFormula<'a> {
    Eq(CTerm<'a>, CTerm<'a>),
    Not(Box<CFormula<'a>>),
    And(Box<CFormula<'a>>, Box<CFormula<'a>>),
    Or(Box<CFormula<'a>>, Box<CFormula<'a>>),
    Implies(Box<CFormula<'a>>, Box<CFormula<'a>>),
    Forall(usize, Box<CFormula<'a>>),
    Exists(usize, Box<CFormula<'a>>),
}

struct Compiler<'a> {
    alg: &'a Algebra,
    registry: &'a SymbolRegistry,
    scope: Vec<(String, usize)>,
    slots: usize,
}

impl<'a> Compiler<'a> {
    fn term(&self, t: &Term) -> Result<CTerm<'a>> {
        Ok(match t {
            Term::Var(v) => {
                let slot = self
                    .scope
                    .iter()
                    .rev()
                    .find(|(n, _)| n == v)
                    .ok_or_else(|| Error::UnboundVariable(v.clone()))?
                    .1;
                CTerm::Slot(slot)
            }
            Term::Const(a) => CTerm::Elem(self.alg.constant(*a)?),
            Term::App(name, args) => {
                let table = self
                    .registry
                    .get(name)
                    .ok_or_else(|| Error::UnknownSymbol(name.clone()))?;
                if table.arity() != args.len() {
                    return Err(Error::ArityMismatch {
                        name: name.clone(),
                        expected: table.arity(),
                        found: args.len(),
                    });
                }
                if table.base() != self.alg.base() {
                    return Err(Error::BaseMismatch {
                        left: self.alg.base(),
                        right: table.base(),
                    });
                }
                CTerm::App(table, args.iter().map(|a| self.term(a)).collect::<Result<_>>()?)
            }
        })
    }

    fn formula(&mut self, f: &Formula) -> Result<CFormula<'a>> {
        Ok(match f {
            Formula::Eq(s, t) => CFormula::Eq(self.term(s)?, self.term(t)?),
            Formula::Not(a) => CFormula::Not(Box::new(self.formula(a)?)),
            Formula::And(a, b) => CFormula::And(Box::new(self.formula(a)?), Box::new(self.formula(b)?)),
            Formula::Or(a, b) => CFormula::Or(Box::new(self.formula(a)?), Box::new(self.formula(b)?)),
            Formula::Implies(a, b) => {
                CFormula::Implies(Box::new(self.formula(a)?), Box::new(self.formula(b)?))
            }
            Formula::Forall(v, a) | Formula::Exists(v, a) => {
                let slot = self.slots;
                self.slots += 1;
                self.scope.push((v.clone(), slot));
                let body = Box::new(self.formula(a)?);
                self.scope.pop();
                if matches!(f, Formula::Forall(..)) {
                    CFormula::Forall(slot, body)
                } else {
                    CFormula::Exists(slot, body)
                }
            }
        })
    }
}

struct Machine<'a> {
    alg: &'a Algebra,
    env: Vec<Element>,
}

impl Machine<'_> {
    fn term(&self, t: &CTerm<'_>) -> Result<Element> {
        match t {
            CTerm::Slot(s) => Ok(self.env[*s]),
            CTerm::Elem(e) => Ok(*e),
            CTerm::App(table, args) => {
                let vals = args.iter().map(|a| self.term(a)).collect::<Result<Vec<_>>>()?;
                self.alg.apply(table, &vals)
            }
        }
    }

    fn formula(&mut self, f: &CFormula<'_>) -> Result<bool> {
        Ok(match f {
            CFormula::Eq(s, t) => self.term(s)? == self.term(t)?,
            CFormula::Not(a) => !self.formula(a)?,
            CFormula::And(a, b) => self.formula(a)? && self.formula(b)?,
            CFormula::Or(a, b) => self.formula(a)? || self.formula(b)?,
            CFormula::Implies(a, b) => !self.formula(a)? || self.formula(b)?,
            CFormula::Forall(slot, a) => {
                for x in self.alg.elements() {
                    self.env[*slot] = x;
                    if !self.formula(a)? {
                        return Ok(false);
                    }
                }
                true
            }
            CFormula::Exists(slot, a) => {
                for x in self.alg.elements() {
                    self.env[*slot] = x;
                    if self.formula(a)? {
                        return Ok(true);
                    }
                }
                false
            }
        })
    }
}

fn check_cap(alg: &Algebra, depth: usize) -> Result<()> {
    let needed = (alg.len() as u128).checked_pow(depth as u32).unwrap_or(u128::MAX);
    if needed > EVAL_CAP {
        return Err(Error::CapExceeded {
            what: "evaluation assignments",
            needed,
            cap: EVAL_CAP,
        });
    }
    Ok(())
}

/// Value of a term under an assignment of its variables.
pub fn eval_term(
    alg: &Algebra,
    registry: &SymbolRegistry,
    term: &Term,
    env: &HashMap<String, Element>,
) -> Result<Element> {
    let mut names: Vec<&String> = env.keys().collect();
    names.sort();
    let c = Compiler {
        alg,
        registry,
        scope: names.iter().enumerate().map(|(i, n)| ((*n).clone(), i)).collect(),
        slots: names.len(),
    };
    let ct = c.term(term)?;
    let m = Machine {
        alg,
        env: names
            .iter()
            .map(|n| {
                let x = env[*n];
                if x >= alg.len() {
                    Err(Error::NotInCarrier(x))
                } else {
                    Ok(x)
                }
            })
            .collect::<Result<_>>()?,
    };
    m.term(&ct)
}

/// Truth value of a formula under an assignment of its free variables.
pub fn eval_formula_with(
    alg: &Algebra,
    registry: &SymbolRegistry,
    formula: &Formula,
    env: &HashMap<String, Element>,
) -> Result<bool> {
    check_cap(alg, formula.quantifier_depth())?;
    let mut names: Vec<&String> = env.keys().collect();
    names.sort();
    let mut c = Compiler {
        alg,
        registry,
        scope: names.iter().enumerate().map(|(i, n)| ((*n).clone(), i)).collect(),
        slots: names.len(),
    };
    let cf = c.formula(formula)?;
    let mut start = Vec::with_capacity(c.slots);
    for n in &names {
        let x = env[*n];
        if x >= alg.len() {
            return Err(Error::NotInCarrier(x));
        }
        start.push(x);
    }
    start.resize(c.slots, 0);
    Machine { alg, env: start }.formula(&cf)
}

/// Truth value of a sentence. Formulas with free variables are rejected.
pub fn eval_sentence(alg: &Algebra, registry: &SymbolRegistry, formula: &Formula) -> Result<bool> {
    let free = formula.free_variables();
    if !free.is_empty() {
        return Err(Error::FreeVariables(free.into_iter().collect()));
    }
    eval_formula_with(alg, registry, formula, &HashMap::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parser::parse_formula;

    fn registry(base: usize) -> SymbolRegistry {
        let mut r = SymbolRegistry::new(base);
        r.register("op_i", FunctionTable::from_fn(base, 1, |a| a[0].min(1))).unwrap();
        r.register("op_max", FunctionTable::from_fn(base, 2, |a| a[0].max(a[1]))).unwrap();
        r
    }

    #[test]
    fn sentences_in_omega() {
        let r = registry(3);
        let o = Algebra::omega(3).unwrap();
        let t = |s: &str| eval_sentence(&o, &r, &parse_formula(s, &r).unwrap()).unwrap();
        assert!(t("forall x. op_i(x) = c0 | op_i(x) = c1"));
        assert!(t("c0 = c0"));
        assert!(!t("c0 = c1"));
        assert!(t("forall x. exists y. op_max(x, y) = c2"));
        assert!(!t("exists x. forall y. op_max(x, y) = y & !x = c0"));
        assert!(t("exists x. forall y. op_max(x, y) = y"));
    }

    #[test]
    fn free_variables_are_rejected() {
        let r = registry(2);
        let o = Algebra::omega(2).unwrap();
        let f = parse_formula("op_i(x) = x", &r).unwrap();
        assert_eq!(eval_sentence(&o, &r, &f), Err(Error::FreeVariables(vec!["x".into()])));
        let env = HashMap::from([("x".to_string(), 1)]);
        assert!(eval_formula_with(&o, &r, &f, &env).unwrap());
        let t = crate::logic::parser::parse_term("op_max(x, c0)", &r).unwrap();
        assert_eq!(eval_term(&o, &r, &t, &env).unwrap(), 1);
    }

    #[test]
    fn shadowing_uses_the_innermost_binder() {
        let r = registry(2);
        let o = Algebra::omega(2).unwrap();
        let f = parse_formula("exists x. x = c1 & (forall x. op_i(x) = x)", &r).unwrap();
        assert!(eval_sentence(&o, &r, &f).unwrap());
        let f = parse_formula("forall x. (exists x. x = c1) & x = c0", &r).unwrap();
        assert!(!eval_sentence(&o, &r, &f).unwrap());
    }

    #[test]
    fn cap_is_enforced() {
        let r = registry(2);
        let big = Algebra::full_power(2, 12, crate::algebra::Provenance::ClonePower).unwrap();
        let f = parse_formula("forall x. forall y. forall z. forall w. x = x", &r).unwrap();
        assert!(matches!(eval_sentence(&big, &r, &f), Err(Error::CapExceeded { .. })));
    }
}
