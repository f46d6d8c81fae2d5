//! JSON files for certificates and valleys.
//!
//! A certificate file is
//! `{"relation", "extensional", "start", "steps": [{"pos", "axiom", "dir", "fresh"?, "source"?}]}`
//! with terms in concrete syntax. `source` is the whole term before a
//! backward `beta`, `pi1` or `pi2` step, which cannot be recovered from the
//! term after it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cert::ConvCert;
use crate::confluence::Valley;
use crate::rewrite::{Axiom, Direction, Relation, Step};
use crate::syntax::{is_valid_var, parse, print, ParseError};
use crate::term::{Position, Term};

/// Malformed input, as opposed to a well-formed but invalid certificate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JsonError {
    #[error("malformed JSON: {0}")]
    Syntax(String),
    #[error("cannot parse the term in `{field}`: {error}")]
    Term { field: String, error: ParseError },
    #[error("unknown relation `{0}`")]
    Relation(String),
    #[error("unknown axiom `{0}`")]
    Axiom(String),
    #[error("direction must be \"+\" or \"-\", got `{0}`")]
    Direction(String),
    #[error("`{0}` is not a valid variable name")]
    Fresh(String),
}

#[derive(Serialize, Deserialize)]
struct StepFile {
    pos: Vec<usize>,
    axiom: String,
    dir: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fresh: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    source: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct CertFile {
    relation: String,
    #[serde(default = "yes")]
    extensional: bool,
    start: String,
    steps: Vec<StepFile>,
}

#[derive(Serialize, Deserialize)]
struct ValleyFile {
    relation: String,
    #[serde(default = "yes")]
    extensional: bool,
    meet: String,
    left: CertFile,
    right: CertFile,
}

fn yes() -> bool {
    true
}

fn cert_file(c: &ConvCert, rel: &Relation) -> CertFile {
    CertFile {
        relation: rel.code().to_string(),
        extensional: rel.extensional,
        start: print(&c.start),
        steps: c
            .steps
            .iter()
            .map(|s| StepFile {
                pos: s.pos.0.clone(),
                axiom: s.axiom.name().to_string(),
                dir: s.dir.symbol().to_string(),
                fresh: s.fresh.as_ref().map(|v| v.as_str().to_string()),
                source: s.source.as_ref().map(print),
            })
            .collect(),
    }
}

fn term(field: impl Into<String>, text: &str) -> Result<Term, JsonError> {
    parse(text).map_err(|error| JsonError::Term {
        field: field.into(),
        error,
    })
}

fn from_cert_file(f: CertFile) -> Result<(Relation, ConvCert), JsonError> {
    let rel = Relation::from_code(&f.relation, f.extensional)
        .ok_or_else(|| JsonError::Relation(f.relation.clone()))?;
    let start = term("start", &f.start)?;
    let mut steps = Vec::with_capacity(f.steps.len());
    for (i, s) in f.steps.into_iter().enumerate() {
        let axiom = Axiom::from_name(&s.axiom).ok_or_else(|| JsonError::Axiom(s.axiom.clone()))?;
        let dir = match s.dir.as_str() {
            "+" => Direction::Forward,
            "-" => Direction::Backward,
            d => return Err(JsonError::Direction(d.to_string())),
        };
        let mut step = Step::new(Position(s.pos), axiom, dir);
        if let Some(x) = s.fresh {
            if !is_valid_var(&x) {
                return Err(JsonError::Fresh(x));
            }
            step = step.with_fresh(x);
        }
        if let Some(src) = s.source {
            step = step.with_source(term(format!("steps[{i}].source"), &src)?);
        }
        steps.push(step);
    }
    Ok((rel, ConvCert::new(start, steps)))
}

pub fn cert_to_json(c: &ConvCert, rel: &Relation) -> String {
    serde_json::to_string_pretty(&cert_file(c, rel)).expect("serializable")
}

pub fn cert_to_value(c: &ConvCert, rel: &Relation) -> serde_json::Value {
    serde_json::to_value(cert_file(c, rel)).expect("serializable")
}

/// Parse a certificate file. Steps are not checked here.
pub fn cert_from_json(text: &str) -> Result<(Relation, ConvCert), JsonError> {
    let f: CertFile = serde_json::from_str(text).map_err(|e| JsonError::Syntax(e.to_string()))?;
    from_cert_file(f)
}

pub fn valley_to_json(v: &Valley) -> String {
    serde_json::to_string_pretty(&valley_file(v)).expect("serializable")
}

pub fn valley_to_value(v: &Valley) -> serde_json::Value {
    serde_json::to_value(valley_file(v)).expect("serializable")
}

fn valley_file(v: &Valley) -> ValleyFile {
    ValleyFile {
        relation: v.relation.code().to_string(),
        extensional: v.relation.extensional,
        meet: print(&v.meet),
        left: cert_file(&v.left, &v.relation),
        right: cert_file(&v.right, &v.relation),
    }
}

/// Parse a valley file. Use [`Valley::verify`] to check it.
pub fn valley_from_json(text: &str) -> Result<Valley, JsonError> {
    let f: ValleyFile = serde_json::from_str(text).map_err(|e| JsonError::Syntax(e.to_string()))?;
    let relation = Relation::from_code(&f.relation, f.extensional)
        .ok_or_else(|| JsonError::Relation(f.relation.clone()))?;
    Ok(Valley {
        relation,
        meet: term("meet", &f.meet)?,
        left: from_cert_file(f.left)?.1,
        right: from_cert_file(f.right)?.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let c = ConvCert::new(
            parse("y").unwrap(),
            vec![
                Step::backward(vec![], Axiom::Beta).with_source(parse("(\\x. x) y").unwrap()),
                Step::forward(vec![], Axiom::EtaExp).with_fresh("z"),
            ],
        );
        let rel = Relation::fp(true);
        let text = cert_to_json(&c, &rel);
        assert!(text.contains("\"source\""));
        let (r2, c2) = cert_from_json(&text).unwrap();
        assert_eq!(r2, rel);
        assert_eq!(c2, c);
    }

    #[test]
    fn minimal_file() {
        let text = r#"{"relation": "besp", "start": "(\\x. x) y",
                       "steps": [{"pos": [], "axiom": "beta", "dir": "+"}]}"#;
        let (rel, c) = cert_from_json(text).unwrap();
        assert!(rel.extensional);
        assert_eq!(c.steps.len(), 1);
    }

    #[test]
    fn errors() {
        assert!(matches!(cert_from_json("{"), Err(JsonError::Syntax(_))));
        let bad = r#"{"relation": "nope", "start": "x", "steps": []}"#;
        assert!(matches!(cert_from_json(bad), Err(JsonError::Relation(_))));
        let bad = r#"{"relation": "r", "start": "(x", "steps": []}"#;
        assert!(matches!(cert_from_json(bad), Err(JsonError::Term { .. })));
        let bad = r#"{"relation": "r", "start": "x", "steps": [{"pos": [], "axiom": "zeta", "dir": "+"}]}"#;
        assert!(matches!(cert_from_json(bad), Err(JsonError::Axiom(_))));
        let bad = r#"{"relation": "r", "start": "x", "steps": [{"pos": [], "axiom": "beta", "dir": "?"}]}"#;
        assert!(matches!(cert_from_json(bad), Err(JsonError::Direction(_))));
    }
}
