//! The identity registry: named expression pairs loaded from TOML.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use qdissect_core::expr::{parse, Evaluator, Expr, ParseError};
use qdissect_core::verify::{verify_chain, VerifyReport};
use rayon::prelude::*;
use serde::Deserialize;

/// The registry shipped with the binary.
pub const BUILTIN: &str = include_str!("../registry/identities.toml");

#[derive(Debug, thiserror::Error)]
pub enum RegistryError {
    #[error("registry is not valid TOML")]
    Toml(#[from] toml::de::Error),
    #[error("cannot read registry file")]
    Io(#[from] std::io::Error),
    #[error("cannot parse {context}")]
    Parse { context: String, source: ParseError },
    #[error("{context}: unknown definition ${name}")]
    UnknownDef { context: String, name: String },
    #[error("definition ${0} refers to itself")]
    Cycle(String),
    #[error("duplicate identity id {0:?}")]
    DuplicateId(String),
    #[error("identity {0:?} has order below 1")]
    BadOrder(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRegistry {
    #[serde(default)]
    defs: BTreeMap<String, String>,
    #[serde(default)]
    identity: Vec<RawIdentity>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIdentity {
    id: String,
    anchor: String,
    order: i64,
    lhs: String,
    rhs: String,
    #[serde(default)]
    middle: Vec<String>,
}

/// One identity with every `$name` already expanded.
#[derive(Clone, Debug)]
pub struct IdentityRecord {
    pub id: String,
    pub anchor: String,
    pub order: i64,
    pub lhs: Expr,
    /// Intermediate forms, each checked against `lhs`.
    pub middle: Vec<Expr>,
    pub rhs: Expr,
}

impl IdentityRecord {
    /// `rhs` followed by the intermediate forms, the order verify checks them in.
    pub fn members(&self) -> Vec<&Expr> {
        std::iter::once(&self.rhs).chain(&self.middle).collect()
    }
}

#[derive(Clone, Debug)]
pub struct Registry {
    defs: BTreeMap<String, Expr>,
    records: Vec<IdentityRecord>,
}

fn parse_in(context: &str, src: &str) -> Result<Expr, RegistryError> {
    parse(src).map_err(|source| RegistryError::Parse { context: context.to_string(), source })
}

fn resolve_def(
    name: &str,
    raw: &BTreeMap<String, Expr>,
    done: &mut BTreeMap<String, Expr>,
    active: &mut BTreeSet<String>,
) -> Result<Expr, RegistryError> {
    if let Some(e) = done.get(name) {
        return Ok(e.clone());
    }
    let Some(e) = raw.get(name) else {
        return Err(RegistryError::UnknownDef { context: "definitions".into(), name: name.into() });
    };
    if !active.insert(name.to_string()) {
        return Err(RegistryError::Cycle(name.to_string()));
    }
    let resolved = e.resolve(&mut |n| resolve_def(n, raw, done, active))?;
    active.remove(name);
    done.insert(name.to_string(), resolved.clone());
    Ok(resolved)
}

impl Registry {
    pub fn builtin() -> Self {
        Self::from_toml_str(BUILTIN).expect("the built-in registry is well formed")
    }

    pub fn load(path: &Path) -> Result<Self, RegistryError> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn from_toml_str(text: &str) -> Result<Self, RegistryError> {
        let raw: RawRegistry = toml::from_str(text)?;
        let mut parsed = BTreeMap::new();
        for (name, src) in &raw.defs {
            parsed.insert(name.clone(), parse_in(&format!("definition ${name}"), src)?);
        }
        let mut defs = BTreeMap::new();
        for name in raw.defs.keys() {
            resolve_def(name, &parsed, &mut defs, &mut BTreeSet::new())?;
        }
        let mut seen = BTreeSet::new();
        let mut records = Vec::with_capacity(raw.identity.len());
        for r in raw.identity {
            if !seen.insert(r.id.clone()) {
                return Err(RegistryError::DuplicateId(r.id));
            }
            if r.order < 1 {
                return Err(RegistryError::BadOrder(r.id));
            }
            let side = |field: &str, src: &str| -> Result<Expr, RegistryError> {
                let context = format!("identity {} ({field})", r.id);
                parse_in(&context, src)?.resolve(&mut |n| {
                    defs.get(n).cloned().ok_or_else(|| RegistryError::UnknownDef {
                        context: context.clone(),
                        name: n.to_string(),
                    })
                })
            };
            let lhs = side("lhs", &r.lhs)?;
            let rhs = side("rhs", &r.rhs)?;
            let middle = r
                .middle
                .iter()
                .enumerate()
                .map(|(i, m)| side(&format!("middle {i}"), m))
                .collect::<Result<_, _>>()?;
            records.push(IdentityRecord { id: r.id, anchor: r.anchor, order: r.order, lhs, middle, rhs });
        }
        Ok(Registry { defs, records })
    }

    pub fn records(&self) -> &[IdentityRecord] {
        &self.records
    }

    pub fn get(&self, id: &str) -> Option<&IdentityRecord> {
        self.records.iter().find(|r| r.id == id)
    }

    /// A fully expanded `[defs]` entry.
    pub fn def(&self, name: &str) -> Option<&Expr> {
        self.defs.get(name)
    }

    /// Parses `src`, expanding `$name` references against this registry's definitions.
    pub fn parse_expr(&self, src: &str) -> Result<Expr, RegistryError> {
        parse_in("expression", src)?.resolve(&mut |n| {
            self.defs.get(n).cloned().ok_or_else(|| RegistryError::UnknownDef {
                context: "expression".into(),
                name: n.to_string(),
            })
        })
    }
}

/// Checks one record to order `n` (its suggested order when `None`).
pub fn verify(rec: &IdentityRecord, n: Option<i64>) -> VerifyReport {
    let mut ev = Evaluator::new();
    verify_chain(&mut ev, &rec.id, &rec.lhs, &rec.members(), n.unwrap_or(rec.order))
}

/// Checks every record in parallel; reports come back in registry order.
pub fn verify_all(reg: &Registry, n: Option<i64>) -> Vec<VerifyReport> {
    reg.records().par_iter().map(|r| verify(r, n)).collect()
}
