//! JSON documents read and written by the command line.

use serde::{Deserialize, Serialize};

use crate::catalog::{build_in, CatalogExpr, NoetherianCert, Rule, SpaceExpr};
use crate::error::{Error, Result};
use crate::loopkit::{LoopDef, Oracle};
use crate::relation::Relation;
use crate::space::Space;
use crate::value::Value;

/// `{"space": ..., "relation": ...}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationFile {
    pub space: SpaceExpr,
    pub relation: CatalogExpr,
}

impl RelationFile {
    /// An extensional relation over an explicit space.
    pub fn extensional(values: Vec<Value>, pairs: Vec<(Value, Value)>) -> Self {
        RelationFile {
            space: SpaceExpr::Explicit { values },
            relation: CatalogExpr::Extensional { pairs },
        }
    }

    /// The extensional description of `r`, whose space must be enumerable.
    pub fn from_relation(r: &Relation) -> Result<Self> {
        Ok(RelationFile::extensional(r.space().values()?.to_vec(), r.pairs()?))
    }

    pub fn build(&self) -> Result<Relation> {
        let space = self.space.to_space()?;
        let r = build_in(&self.relation, Some(&space))?;
        fit(r, &space)
    }
}

/// A loop: the state space, the order, the initialization as explicit
/// `[input, state]` pairs, the body and an optional built-in postcondition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopFile {
    pub space: SpaceExpr,
    pub order: CatalogExpr,
    pub init: Vec<(Value, Value)>,
    pub body: CatalogExpr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub postcondition: Option<String>,
}

impl LoopFile {
    /// Assembles the loop without checking its obligations.
    pub fn build(&self) -> Result<LoopDef> {
        let space = self.space.to_space()?;
        let order = build_in(&self.order, Some(&space))?;
        let body = fit(build_in(&self.body, Some(&space))?, &space)?;
        let inputs = Space::explicit(self.init.iter().map(|(a, _)| a.clone()))?;
        let init = Relation::from_pairs_between(&inputs, &space, self.init.iter().cloned())?;
        let post = self.postcondition.as_deref().map(Oracle::from_name).transpose()?;
        LoopDef::unchecked(&space, &order, &init, &body, post)
    }
}

/// Views `r` over `space`: unchanged if it already lives there, restricted
/// (with a RESTRICT certificate) if `space` is a subspace of its own.
pub fn fit(r: Relation, space: &Space) -> Result<Relation> {
    if r.space() == space {
        return Ok(r);
    }
    if !space.is_subspace_of(r.space())? {
        return Err(Error::SpaceMismatch);
    }
    let sub = r.on_subspace(space)?;
    Ok(match r.cert() {
        Some(c) => sub.with_cert(NoetherianCert::new(Rule::Restrict, vec![c.clone()])),
        None => sub,
    })
}

/// Pretty-printed JSON with a trailing newline; the form written to files
/// and printed under `--json`.
pub fn canonical_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::MalformedExpr(format!("{what}: {e}")))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &std::path::Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::MalformedExpr(format!("{}: {e}", path.display())))?;
    parse_json(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_relation_is_fitted_to_a_subspace() {
        let f: RelationFile = parse_json(
            r#"{"space":{"kind":"int_range","lo":1,"hi":3},"relation":{"kind":"named","name":"INTGREATER","lo":0,"hi":5}}"#,
            "test",
        )
        .unwrap();
        let r = f.build().unwrap();
        assert_eq!(r.len().unwrap(), 3);
        assert_eq!(r.cert().unwrap().rule, Rule::Restrict);
        let wide: RelationFile = parse_json(
            r#"{"space":{"kind":"int_range","lo":0,"hi":9},"relation":{"kind":"named","name":"INTGREATER","lo":0,"hi":5}}"#,
            "test",
        )
        .unwrap();
        assert!(matches!(wide.build(), Err(Error::SpaceMismatch)));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let bad = r#"{"space":{"kind":"int_range","lo":0,"hi":2},"relation":{"kind":"extensional","pairs":[]},"x":1}"#;
        assert!(parse_json::<RelationFile>(bad, "test").is_err());
    }
}
