//! JSON descriptors for algebras, directed systems and table sets.
//!
//! ```json
//! {"base": 3, "provenance": "quotient", "index": 3,
//!  "filter": {"generators": [[[0, 1], [2]]]},
//!  "z": {"generator": [0, 1]}}
//! ```
//!
//! Partitions are lists of blocks. A `z` is given either by its generator
//! or by its complete list of members, which is validated as a filter.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{direct_product, Algebra, Element};
use crate::clone_power::{limit_reduced_power, ClonePowerAlgebra, LimitReducedPower};
use crate::colimit::DirectedSystem;
use crate::error::{Error, Result};
use crate::filter::{BAFilter, PartitionFilter};
use crate::free::FreeAlgebra;
use crate::logic::SymbolRegistry;
use crate::partition::{SetPartition, Subset};
use crate::table::{FunctionTable, TableSet, TableSpec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSpec {
    pub generators: Vec<Vec<Vec<usize>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ZSpec {
    Generator { generator: Vec<usize> },
    Members { members: Vec<Vec<usize>> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "provenance", rename_all = "snake_case")]
pub enum AlgebraSpec {
    Omega {
        base: usize,
    },
    ClonePower {
        base: usize,
        index: usize,
        filter: FilterSpec,
    },
    Quotient {
        base: usize,
        index: usize,
        filter: FilterSpec,
        z: ZSpec,
    },
    Product {
        base: usize,
        factors: Vec<AlgebraSpec>,
    },
    Free {
        base: usize,
        gens: usize,
    },
}

/// An algebra descriptor with an optional custom generating table set and
/// optional named tables for formulas.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraDescriptor {
    #[serde(flatten)]
    pub spec: AlgebraSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tables: Option<TableSetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbols: Option<BTreeMap<String, TableSpec>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSetSpec {
    pub unary: Vec<Vec<u8>>,
    pub binary: Vec<Vec<u8>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageSpec {
    pub index_size: usize,
    pub alpha: Vec<Element>,
}

/// `target` is the algebra the stages generate into; `poset` lists pairs
/// `[d, e]` with `d ≤ e` (reflexive-transitive closure is taken).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub base: usize,
    pub target: AlgebraSpec,
    pub poset: Vec<(usize, usize)>,
    pub stages: Vec<StageSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tables: Option<TableSetSpec>,
}

impl AlgebraSpec {
    pub fn base(&self) -> usize {
        match self {
            AlgebraSpec::Omega { base }
            | AlgebraSpec::ClonePower { base, .. }
            | AlgebraSpec::Quotient { base, .. }
            | AlgebraSpec::Product { base, .. }
            | AlgebraSpec::Free { base, .. } => *base,
        }
    }
}

fn desc(msg: impl Into<String>) -> Error {
    Error::Descriptor(msg.into())
}

impl FilterSpec {
    pub fn build(&self, index: usize) -> Result<PartitionFilter> {
        if self.generators.is_empty() {
            return PartitionFilter::full(index);
        }
        let gens = self
            .generators
            .iter()
            .map(|blocks| SetPartition::from_blocks(index, blocks))
            .collect::<Result<Vec<_>>>()?;
        PartitionFilter::generate(index, gens)
    }

    pub fn of(filter: &PartitionFilter) -> FilterSpec {
        FilterSpec {
            generators: vec![filter.bottom().blocks()],
        }
    }
}

impl ZSpec {
    pub fn build(&self, cp: &ClonePowerAlgebra) -> Result<BAFilter> {
        let ba = cp.block_algebra();
        let index = cp.index();
        let subset = |v: &[usize]| -> Result<Subset> {
            if let Some(&i) = v.iter().find(|&&i| i >= index) {
                return Err(desc(format!("index {i} outside I")));
            }
            Ok(Subset::from_iter(v.iter().copied()))
        };
        match self {
            ZSpec::Generator { generator } => BAFilter::principal(ba, subset(generator)?),
            ZSpec::Members { members } => {
                let m = members.iter().map(|v| subset(v)).collect::<Result<Vec<_>>>()?;
                BAFilter::from_members(ba, &m)
            }
        }
    }

    pub fn of(z: &BAFilter) -> ZSpec {
        ZSpec::Generator {
            generator: z.generator().to_vec(),
        }
    }
}

impl TableSetSpec {
    pub fn build(&self, base: usize) -> Result<TableSet> {
        let mk = |arity: usize, v: &Vec<u8>| FunctionTable::new(base, arity, v.clone());
        TableSet::custom(
            base,
            self.unary.iter().map(|v| mk(1, v)).collect::<Result<_>>()?,
            self.binary.iter().map(|v| mk(2, v)).collect::<Result<_>>()?,
        )
    }
}

fn table_set(base: usize, spec: &Option<TableSetSpec>) -> Result<TableSet> {
    match spec {
        Some(s) => s.build(base),
        None => TableSet::standard(base),
    }
}

fn check_base(outer: usize, inner: &AlgebraSpec) -> Result<()> {
    if inner.base() != outer {
        return Err(Error::BaseMismatch {
            left: outer,
            right: inner.base(),
        });
    }
    Ok(())
}

/// Builds the algebra a spec describes, verified against `tables`.
pub fn build_algebra(spec: &AlgebraSpec, tables: &TableSet) -> Result<Algebra> {
    if spec.base() != tables.base() {
        return Err(Error::BaseMismatch {
            left: spec.base(),
            right: tables.base(),
        });
    }
    match spec {
        AlgebraSpec::Omega { base } => Algebra::omega(*base),
        AlgebraSpec::ClonePower { base, index, filter } => {
            Ok(ClonePowerAlgebra::build(*base, filter.build(*index)?, tables)?.algebra().clone())
        }
        AlgebraSpec::Quotient { .. } => Ok(build_quotient(spec, tables)?.algebra().clone()),
        AlgebraSpec::Product { base, factors } => {
            let mut it = factors.iter();
            let first = it.next().ok_or_else(|| desc("product needs at least one factor"))?;
            check_base(*base, first)?;
            let mut acc = build_algebra(first, tables)?;
            for f in it {
                check_base(*base, f)?;
                acc = direct_product(&acc, &build_algebra(f, tables)?)?;
            }
            Ok(acc)
        }
        AlgebraSpec::Free { base, gens } => {
            Ok(FreeAlgebra::new(*base, *gens)?.materialize(tables)?.algebra().clone())
        }
    }
}

/// Builds a limit reduced power from a `quotient` spec.
pub fn build_quotient(spec: &AlgebraSpec, tables: &TableSet) -> Result<LimitReducedPower> {
    match spec {
        AlgebraSpec::Quotient { base, index, filter, z } => {
            let cp = ClonePowerAlgebra::build(*base, filter.build(*index)?, tables)?;
            let z = z.build(&cp)?;
            limit_reduced_power(&cp, &z)
        }
        _ => Err(desc("expected provenance `quotient`")),
    }
}

impl AlgebraDescriptor {
    pub fn from_json(text: &str) -> Result<AlgebraDescriptor> {
        serde_json::from_str(text).map_err(|e| desc(e.to_string()))
    }

    pub fn table_set(&self) -> Result<TableSet> {
        table_set(self.spec.base(), &self.tables)
    }

    pub fn build(&self) -> Result<(Algebra, TableSet)> {
        let t = self.table_set()?;
        Ok((build_algebra(&self.spec, &t)?, t))
    }

    /// Named tables for formulas; defaults to the standard registry with
    /// seed 0 when none are given.
    pub fn registry(&self) -> Result<SymbolRegistry> {
        let base = self.spec.base();
        match &self.symbols {
            None => crate::logic::corpus::standard_registry(base, 0),
            Some(map) => {
                let mut r = SymbolRegistry::new(base);
                for (name, spec) in map {
                    r.register(name, FunctionTable::from_spec(base, spec)?)?;
                }
                Ok(r)
            }
        }
    }
}

impl SystemSpec {
    pub fn from_json(text: &str) -> Result<SystemSpec> {
        serde_json::from_str(text).map_err(|e| desc(e.to_string()))
    }

    pub fn build(&self) -> Result<(DirectedSystem, TableSet)> {
        check_base(self.base, &self.target)?;
        let tables = table_set(self.base, &self.tables)?;
        let target = build_algebra(&self.target, &tables)?;
        for (d, s) in self.stages.iter().enumerate() {
            if s.alpha.len() != s.index_size {
                return Err(desc(format!(
                    "stage {d}: index_size {} but alpha has {} entries",
                    s.index_size,
                    s.alpha.len()
                )));
            }
        }
        let stages = self.stages.iter().map(|s| s.alpha.clone()).collect();
        Ok((DirectedSystem::new(target, &self.poset, stages)?, tables))
    }
}
