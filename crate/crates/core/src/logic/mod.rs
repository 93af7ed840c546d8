//! First-order sentences over the signature of `Ω(A)`: equality, the
//! constants `c<a>` and registered tables.

pub mod ast;
pub mod corpus;
pub mod eval;
pub mod parser;
pub mod transfer;

pub use ast::{Formula, SymbolRegistry, Term};
pub use corpus::Corpus;
pub use eval::{eval_formula_with, eval_sentence, eval_term};
pub use parser::{parse_formula, parse_term};
pub use transfer::{is_elementary_embedding, los_check, transfer, ElementaryReport, TransferReport};
