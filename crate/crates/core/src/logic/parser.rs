//! Recursive-descent parser for
//!
//! ```text
//! formula := quant | disj
//! quant   := ("forall" | "exists") VAR "." formula
//! disj    := conj ("|" conj)*
//! conj    := unit ("&" unit)*
//! unit    := "!" unit | "(" formula ")" | term "=" term
//! term    := VAR | "c" NAT | IDENT "(" term ("," term)* ")"
//! ```
//!
//! `|` and `&` associate to the left.

use super::ast::{is_constant_name, is_variable_name, Formula, SymbolRegistry, Term, KEYWORDS};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Eq,
    Bang,
    Amp,
    Bar,
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Lexer<'_> {
    fn next(&mut self) -> Result<(usize, Tok)> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&b) = self.src.get(self.pos) else {
            return Ok((start, Tok::End));
        };
        self.pos += 1;
        let tok = match b {
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'.' => Tok::Dot,
            b'=' => Tok::Eq,
            b'!' => Tok::Bang,
            b'&' => Tok::Amp,
            b'|' => Tok::Bar,
            b if b.is_ascii_alphabetic() || b == b'_' => {
                while self
                    .src
                    .get(self.pos)
                    .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
                {
                    self.pos += 1;
                }
                Tok::Ident(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
            }
            _ => {
                return Err(Error::Syntax {
                    pos: start,
                    message: format!("unexpected character {:?}", b as char),
                })
            }
        };
        Ok((start, tok))
    }
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    registry: &'a SymbolRegistry,
}

/// Parses a formula, resolving table names against the registry.
pub fn parse_formula(text: &str, registry: &SymbolRegistry) -> Result<Formula> {
    let mut lexer = Lexer {
        src: text.as_bytes(),
        pos: 0,
    };
    let mut toks = Vec::new();
    loop {
        let t = lexer.next()?;
        let end = t.1 == Tok::End;
        toks.push(t);
        if end {
            break;
        }
    }
    let mut p = Parser {
        toks,
        at: 0,
        registry,
    };
    let f = p.formula()?;
    p.expect(Tok::End, "end of input")?;
    Ok(f)
}

/// Parses a single term.
pub fn parse_term(text: &str, registry: &SymbolRegistry) -> Result<Term> {
    let f = parse_formula(&format!("{text} = c0"), registry)?;
    match f {
        Formula::Eq(t, _) => Ok(t),
        _ => Err(Error::Syntax {
            pos: 0,
            message: "not a term".into(),
        }),
    }
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, message: String) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos(),
            message,
        })
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}, found {:?}", self.peek()))
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        if let Tok::Ident(w) = self.peek() {
            if KEYWORDS.contains(&w.as_str()) {
                let universal = w == "forall";
                self.bump();
                let pos = self.pos();
                let v = match self.bump() {
                    Tok::Ident(v) if is_variable_name(&v) => v,
                    other => {
                        return Err(Error::Syntax {
                            pos,
                            message: format!("expected a variable, found {other:?}"),
                        })
                    }
                };
                self.expect(Tok::Dot, "`.`")?;
                let body = self.formula()?;
                return Ok(if universal {
                    Formula::forall(&v, body)
                } else {
                    Formula::exists(&v, body)
                });
            }
        }
        self.disj()
    }

    fn disj(&mut self) -> Result<Formula> {
        let mut f = self.conj()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            f = Formula::or(f, self.conj()?);
        }
        Ok(f)
    }

    fn conj(&mut self) -> Result<Formula> {
        let mut f = self.unit()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            f = Formula::and(f, self.unit()?);
        }
        Ok(f)
    }

    fn unit(&mut self) -> Result<Formula> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unit()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            _ => {
                let s = self.term()?;
                self.expect(Tok::Eq, "`=`")?;
                let t = self.term()?;
                Ok(Formula::eq(s, t))
            }
        }
    }

    fn term(&mut self) -> Result<Term> {
        let pos = self.pos();
        let name = match self.bump() {
            Tok::Ident(n) => n,
            other => {
                return Err(Error::Syntax {
                    pos,
                    message: format!("expected a term, found {other:?}"),
                })
            }
        };
        if *self.peek() == Tok::LParen {
            let table = self
                .registry
                .get(&name)
                .ok_or_else(|| Error::UnknownSymbol(name.clone()))?;
            let arity = table.arity();
            self.bump();
            let mut args = vec![self.term()?];
            while *self.peek() == Tok::Comma {
                self.bump();
                args.push(self.term()?);
            }
            self.expect(Tok::RParen, "`)`")?;
            if args.len() != arity {
                return Err(Error::ArityMismatch {
                    name,
                    expected: arity,
                    found: args.len(),
                });
            }
            return Ok(Term::App(name, args));
        }
        if is_constant_name(&name) {
            let a: usize = name[1..].parse().map_err(|_| Error::UnknownSymbol(name.clone()))?;
            if a >= self.registry.base() {
                return Err(Error::UnknownSymbol(name));
            }
            return Ok(Term::Const(a as u8));
        }
        if is_variable_name(&name) {
            return Ok(Term::Var(name));
        }
        if self.registry.get(&name).is_some() {
            return Err(Error::Syntax {
                pos,
                message: format!("table `{name}` needs arguments"),
            });
        }
        Err(Error::Syntax {
            pos,
            message: format!("`{name}` is not a variable, constant or table"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::FunctionTable;

    fn registry() -> SymbolRegistry {
        let mut r = SymbolRegistry::new(3);
        r.register("op_i", FunctionTable::new(3, 1, vec![0, 1, 1]).unwrap()).unwrap();
        r.register("op_f", FunctionTable::from_fn(3, 2, |a| a[0].max(a[1]))).unwrap();
        r
    }

    #[test]
    fn parses_examples() {
        let r = registry();
        let f = parse_formula("forall x. op_i(x) = c0 | op_i(x) = c1", &r).unwrap();
        let x = Term::var("x");
        let ix = Term::app("op_i", vec![x]);
        assert_eq!(
            f,
            Formula::forall(
                "x",
                Formula::or(Formula::eq(ix.clone(), Term::Const(0)), Formula::eq(ix, Term::Const(1)))
            )
        );
        assert_eq!(parse_formula("c0 = c0", &r).unwrap(), Formula::eq(Term::Const(0), Term::Const(0)));
        let f = parse_formula("forall x. exists y. op_f(x,y) = x", &r).unwrap();
        assert_eq!(f.quantifier_depth(), 2);
    }

    #[test]
    fn precedence_and_associativity() {
        let r = registry();
        let f = parse_formula("c0 = c0 | c1 = c1 & c2 = c2 | !c0 = c1", &r).unwrap();
        assert!(matches!(f, Formula::Or(ref a, _) if matches!(**a, Formula::Or(_, ref b) if matches!(**b, Formula::And(..)))));
    }

    #[test]
    fn errors_carry_positions() {
        let r = registry();
        match parse_formula("forall x op_i(x) = c0", &r) {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 9),
            other => panic!("{other:?}"),
        }
        assert_eq!(parse_formula("op_g(x) = x", &r), Err(Error::UnknownSymbol("op_g".into())));
        assert!(matches!(parse_formula("op_i(x, x) = x", &r), Err(Error::ArityMismatch { .. })));
        assert!(matches!(parse_formula("c7 = c0", &r), Err(Error::UnknownSymbol(_))));
        assert!(matches!(parse_formula("c0 = c0 )", &r), Err(Error::Syntax { pos: 8, .. })));
        assert!(matches!(parse_formula("X = c0", &r), Err(Error::Syntax { pos: 0, .. })));
        assert!(matches!(parse_formula("c0 = c0 # c1", &r), Err(Error::Syntax { pos: 8, .. })));
    }

    #[test]
    fn printer_round_trip_on_examples() {
        let r = registry();
        for s in [
            "forall x. op_i(x) = c0 | op_i(x) = c1",
            "(forall x. x = x) & !(c0 = c1 | c1 = c0)",
            "c0 = c0 | (c0 = c1 | c1 = c1)",
            "!!c0 = c0",
            "exists y. forall z. op_f(op_i(y), z) = z & op_f(z, y) = z",
        ] {
            let f = parse_formula(s, &r).unwrap();
            assert_eq!(f.to_string(), s);
            assert_eq!(parse_formula(&f.to_string(), &r).unwrap(), f);
        }
    }
}
