//! The JSON input format and its conversion to core types.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use ainf_core::coeff::{Ring, Scalar};
use ainf_core::dga::Dga;
use ainf_core::formality::TwistData;
use ainf_core::graded::Generator;
use ainf_core::oracle::{Fixture, RunParameters};
use ainf_core::{GradedMap, GradedModule, Vector};

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid document at {field}: {message}")]
    Validation { field: String, message: String },
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> DocumentError {
    DocumentError::Validation {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisEntry {
    pub name: String,
    pub degree: i64,
}

/// One matrix entry `from ↦ coeff · to`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapEntry {
    pub from: String,
    pub to: String,
    pub coeff: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub basis: String,
    pub coeff: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductEntry {
    pub left: String,
    pub right: String,
    pub result: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwistSpec {
    pub alpha: String,
    pub c: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub max_arity: usize,
    pub target_n: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub ring: RingSpec,
    #[serde(default)]
    pub basis: Vec<BasisEntry>,
    #[serde(default)]
    pub differential: Vec<MapEntry>,
    #[serde(default)]
    pub products: Vec<ProductEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endomorphism: Option<Vec<MapEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twist: Option<TwistSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run: Option<RunSpec>,
}

/// A validated document.
#[derive(Debug, Clone)]
pub struct Model {
    pub algebra: Dga,
    pub endomorphism: Option<GradedMap>,
    pub twist: Option<TwistData>,
    pub run: Option<RunParameters>,
}

/// Parses and validates.
pub fn parse(text: &str) -> Result<InputDocument, DocumentError> {
    let doc: InputDocument = serde_json::from_str(text).map_err(|e| DocumentError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    doc.build()?;
    Ok(doc)
}

/// Pretty JSON with a trailing newline.
pub fn serialize(doc: &InputDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

impl InputDocument {
    pub fn ring(&self) -> Result<Ring, DocumentError> {
        Ring::from_tag(&self.ring.kind, self.ring.p).map_err(|m| invalid("ring", m))
    }

    pub fn build(&self) -> Result<Model, DocumentError> {
        let ring = self.ring()?;
        let module = Arc::new(
            GradedModule::new(
                ring,
                self.basis
                    .iter()
                    .map(|b| Generator {
                        name: b.name.clone(),
                        degree: b.degree,
                    })
                    .collect(),
            )
            .map_err(|e| invalid("basis", e.to_string()))?,
        );
        let index: HashMap<&str, usize> = self.basis.iter().enumerate().map(|(i, b)| (b.name.as_str(), i)).collect();
        let lookup = |field: String, name: &str| -> Result<usize, DocumentError> {
            index
                .get(name)
                .copied()
                .ok_or_else(|| invalid(field, format!("unknown basis name {name:?}")))
        };
        let coeff = |field: String, text: &str| -> Result<Scalar, DocumentError> {
            Scalar::parse(ring, text).map_err(|e| invalid(field, e.to_string()))
        };

        let map_entries = |name: &str, entries: &[MapEntry], degree: i64| -> Result<GradedMap, DocumentError> {
            let mut triples = Vec::new();
            for (k, e) in entries.iter().enumerate() {
                let field = format!("{name}[{k}]");
                let from = lookup(format!("{field}.from"), &e.from)?;
                let to = lookup(format!("{field}.to"), &e.to)?;
                if module.degree(to) != module.degree(from) + degree {
                    return Err(invalid(
                        field,
                        format!(
                            "{} (degree {}) -> {} (degree {}) is not of degree {degree}",
                            e.from,
                            module.degree(from),
                            e.to,
                            module.degree(to)
                        ),
                    ));
                }
                triples.push((from, to, coeff(format!("{field}.coeff"), &e.coeff)?));
            }
            GradedMap::from_entries(module.clone(), module.clone(), degree, triples).map_err(|e| invalid(name, e.to_string()))
        };

        let d = map_entries("differential", &self.differential, -1)?;
        let mut products = Vec::new();
        for (k, e) in self.products.iter().enumerate() {
            let field = format!("products[{k}]");
            let a = lookup(format!("{field}.left"), &e.left)?;
            let b = lookup(format!("{field}.right"), &e.right)?;
            let mut v = Vector::new();
            for (t, term) in e.result.iter().enumerate() {
                let tf = format!("{field}.result[{t}]");
                let i = lookup(format!("{tf}.basis"), &term.basis)?;
                if module.degree(i) != module.degree(a) + module.degree(b) {
                    return Err(invalid(
                        tf,
                        format!(
                            "{} has degree {}, but {}·{} has degree {}",
                            term.basis,
                            module.degree(i),
                            e.left,
                            e.right,
                            module.degree(a) + module.degree(b)
                        ),
                    ));
                }
                v.add_term(i, &coeff(format!("{tf}.coeff"), &term.coeff)?);
            }
            products.push(((a, b), v));
        }
        let algebra = Dga::new(d, products).map_err(|e| invalid("products", e.to_string()))?;

        let endomorphism = match &self.endomorphism {
            Some(entries) => Some(map_entries("endomorphism", entries, 0)?),
            None => None,
        };
        let twist = match &self.twist {
            Some(t) => {
                let alpha = coeff("twist.alpha".into(), &t.alpha)?;
                let built = match &endomorphism {
                    Some(sigma) => TwistData::new(alpha, t.c, sigma.clone()),
                    None => TwistData::diagonal(module.clone(), alpha, t.c),
                };
                Some(built.map_err(|e| invalid("twist", e.to_string()))?)
            }
            None => None,
        };
        let run = self.run.map(|r| RunParameters {
            max_arity: r.max_arity,
            target_n: r.target_n,
        });
        if let Some(r) = &run {
            if r.max_arity == 0 {
                return Err(invalid("run.max_arity", "must be at least 1"));
            }
        }
        Ok(Model {
            algebra,
            endomorphism,
            twist,
            run,
        })
    }

    /// Writes out a fixture, with its twisting endomorphism listed explicitly.
    pub fn from_fixture(f: &Fixture) -> Self {
        let module = f.algebra.module();
        let ring = module.ring();
        let entries = |m: &GradedMap| -> Vec<MapEntry> {
            (0..module.dim())
                .flat_map(|j| {
                    m.column(j).iter().map(move |(i, c)| MapEntry {
                        from: module.name(j).to_string(),
                        to: module.name(i).to_string(),
                        coeff: c.to_string(),
                    })
                })
                .collect()
        };
        InputDocument {
            ring: RingSpec {
                kind: ring.kind_tag().to_string(),
                p: ring.prime(),
            },
            basis: module
                .basis()
                .iter()
                .map(|g| BasisEntry {
                    name: g.name.clone(),
                    degree: g.degree,
                })
                .collect(),
            differential: entries(f.algebra.differential()),
            products: f
                .algebra
                .products()
                .map(|(&(a, b), v)| ProductEntry {
                    left: module.name(a).to_string(),
                    right: module.name(b).to_string(),
                    result: v
                        .iter()
                        .map(|(i, c)| Term {
                            basis: module.name(i).to_string(),
                            coeff: c.to_string(),
                        })
                        .collect(),
                })
                .collect(),
            endomorphism: f.twist.as_ref().map(|t| entries(&t.sigma_hat)),
            twist: f.twist.as_ref().map(|t| TwistSpec {
                alpha: t.alpha.to_string(),
                c: t.c,
            }),
            run: f.run.map(|r| RunSpec {
                max_arity: r.max_arity,
                target_n: r.target_n,
            }),
        }
    }
}

/// `Q`, `Fp:5` or `Zloc:7`.
pub fn parse_ring_flag(text: &str) -> Result<RingSpec, DocumentError> {
    let (kind, p) = match text.split_once(':') {
        Some((k, p)) => (
            k,
            Some(p.parse::<u64>().map_err(|_| invalid("--ring", format!("bad prime {p:?}")))?),
        ),
        None => (text, None),
    };
    Ring::from_tag(kind, p).map_err(|m| invalid("--ring", m))?;
    Ok(RingSpec {
        kind: kind.to_string(),
        p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_the_zero_algebra() {
        let doc = parse(r#"{"ring": {"kind": "Q"}}"#).unwrap();
        assert_eq!(doc.build().unwrap().algebra.module().dim(), 0);
    }

    #[test]
    fn unknown_names_are_reported_by_field() {
        let text = r#"{"ring": {"kind": "Q"}, "basis": [{"name": "x", "degree": 0}],
            "products": [{"left": "x", "right": "q", "result": []}]}"#;
        match parse(text).unwrap_err() {
            DocumentError::Validation { field, message } => {
                assert_eq!(field, "products[0].right");
                assert!(message.contains("\"q\""));
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn degree_errors_are_reported() {
        let text = r#"{"ring": {"kind": "Q"}, "basis": [{"name": "x", "degree": 0}, {"name": "y", "degree": 0}],
            "differential": [{"from": "x", "to": "y", "coeff": "1"}]}"#;
        assert!(matches!(parse(text), Err(DocumentError::Validation { field, .. }) if field == "differential[0]"));
    }

    #[test]
    fn syntax_errors_carry_a_location() {
        let err = parse("{\n  \"ring\": \n}").unwrap_err();
        assert!(matches!(err, DocumentError::Parse { line: 3, .. }));
    }

    #[test]
    fn coefficients_must_live_in_the_ring() {
        let text = r#"{"ring": {"kind": "Zloc", "p": 3}, "basis": [{"name": "x", "degree": 0}],
            "products": [{"left": "x", "right": "x", "result": [{"basis": "x", "coeff": "1/3"}]}]}"#;
        assert!(matches!(parse(text), Err(DocumentError::Validation { field, .. }) if field == "products[0].result[0].coeff"));
    }

    #[test]
    fn ring_flag() {
        assert_eq!(parse_ring_flag("Fp:5").unwrap().p, Some(5));
        assert!(parse_ring_flag("Fp:6").is_err());
        assert!(parse_ring_flag("Z").is_err());
    }
}
