//! The subcommands. Each returns an [`Outcome`] carrying both renderings
//! and the process exit code.

use std::fmt::Write as _;
use std::sync::Arc;

use serde_json::{json, Value};
use thiserror::Error;

use ainf_core::ainfinity::{coderivation_square, compose, morphism_defect, AInfMorphism, AInfStructure, Defect};
use ainf_core::formality::{
    induce_s1, massey_triple, run_formality, twisting_map, verify_degree_twisting, FormalityError, FormalityFlag,
    TwistData,
};
use ainf_core::graded::{homology_with_retraction, verify_retraction, GradedError};
use ainf_core::oracle::fixture;
use ainf_core::transfer::transfer;
use ainf_core::{GradedModule, Retraction};

use crate::document::{InputDocument, Model, RingSpec};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INTERNAL: u8 = 1;
pub const EXIT_OBSTRUCTION: u8 = 2;
pub const EXIT_REJECTED: u8 = 3;
pub const EXIT_INPUT: u8 = 4;

#[derive(Debug, Error)]
pub enum CommandError {
    #[error("input error: {0}")]
    Input(String),
    #[error("rejected: {0}")]
    Rejected(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CommandError {
    pub fn code(&self) -> u8 {
        match self {
            CommandError::Input(_) => EXIT_INPUT,
            CommandError::Rejected(_) => EXIT_REJECTED,
            CommandError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl From<GradedError> for CommandError {
    fn from(e: GradedError) -> Self {
        match e {
            GradedError::NonFreeHomology { .. } | GradedError::NotAComplex => CommandError::Rejected(e.to_string()),
            other => CommandError::Internal(other.to_string()),
        }
    }
}

impl From<FormalityError> for CommandError {
    fn from(e: FormalityError) -> Self {
        match e {
            FormalityError::PostconditionFailed(_) | FormalityError::AInf(_) => CommandError::Internal(e.to_string()),
            other => CommandError::Rejected(other.to_string()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub text: String,
    pub machine: Value,
    pub code: u8,
}

/// Command-line overrides of document fields.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub ring: Option<RingSpec>,
    pub alpha: Option<String>,
    pub c: Option<u32>,
    pub target_n: Option<usize>,
    pub max_arity: Option<usize>,
}

impl Overrides {
    /// `--ring` replaces the ring; `--alpha`/`--c` replace the twist and
    /// drop any explicit endomorphism in favour of the diagonal one.
    pub fn apply(&self, doc: &InputDocument) -> InputDocument {
        let mut doc = doc.clone();
        if let Some(r) = &self.ring {
            doc.ring = r.clone();
        }
        if self.alpha.is_some() || self.c.is_some() {
            let base = doc.twist.clone();
            let alpha = self
                .alpha
                .clone()
                .or_else(|| base.as_ref().map(|t| t.alpha.clone()))
                .unwrap_or_else(|| "1".into());
            let c = self.c.or(base.as_ref().map(|t| t.c)).unwrap_or(1);
            doc.twist = Some(crate::document::TwistSpec { alpha, c });
            doc.endomorphism = None;
        }
        doc
    }

    fn max_arity(&self, model: &Model, default: usize) -> usize {
        self.max_arity.or(model.run.map(|r| r.max_arity)).unwrap_or(default)
    }
}

fn homology_ranks(h: &GradedModule) -> Vec<(i64, usize)> {
    h.occupied_degrees().into_iter().map(|n| (n, h.rank_in_degree(n))).collect()
}

fn ranks_text(h: &GradedModule) -> String {
    let ranks = homology_ranks(h);
    if ranks.is_empty() {
        return "0".into();
    }
    ranks
        .iter()
        .map(|(n, r)| format!("degree {n}: {r}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn basis_json(h: &GradedModule) -> Value {
    Value::Array(
        h.basis()
            .iter()
            .map(|g| json!({"name": g.name, "degree": g.degree}))
            .collect(),
    )
}

fn higher_ops(s: &AInfStructure) -> Vec<String> {
    s.describe()
}

fn defect_json(d: &Defect) -> Value {
    json!(d.nonzero_arities())
}

fn retraction(model: &Model) -> Result<Retraction, CommandError> {
    Ok(homology_with_retraction(&model.algebra.complex()?)?)
}

pub fn cmd_transfer(model: &Model, o: &Overrides) -> Result<Outcome, CommandError> {
    let k = o.max_arity(model, 4);
    let r = retraction(model)?;
    let a = Arc::new(model.algebra.to_structure(k));
    let t = transfer(&a, &r).map_err(|e| CommandError::Rejected(e.to_string()))?;
    let stasheff = coderivation_square(&t.structure);
    let iota = morphism_defect(&t.inclusion);
    let pi = morphism_defect(&t.projection);
    let pi_iota = compose(&t.projection, &t.inclusion).map_err(|e| CommandError::Internal(e.to_string()))?
        == AInfMorphism::identity(t.structure.clone());
    let ok = stasheff.is_zero() && iota.is_zero() && pi.is_zero() && pi_iota;
    let h = &r.homology;
    let ops = higher_ops(&t.structure);

    let mut text = String::new();
    writeln!(text, "ring: {}", h.ring()).unwrap();
    writeln!(text, "truncation arity K = {k}").unwrap();
    writeln!(text, "homology ranks: {}", ranks_text(h)).unwrap();
    let names: Vec<String> = h.basis().iter().map(|g| format!("{} ({})", g.name, g.degree)).collect();
    writeln!(text, "homology basis: {}", names.join(", ")).unwrap();
    writeln!(text, "transferred operations (nonzero, arity ≤ {k}):").unwrap();
    for line in &ops {
        writeln!(text, "  {line}").unwrap();
    }
    writeln!(text, "verification:").unwrap();
    writeln!(text, "  Stasheff relations: {stasheff}").unwrap();
    writeln!(text, "  inclusion defect: {iota}").unwrap();
    writeln!(text, "  projection defect: {pi}").unwrap();
    writeln!(text, "  projection ∘ inclusion = id: {}", if pi_iota { "yes" } else { "no" }).unwrap();

    let machine = json!({
        "command": "transfer",
        "max_arity": k,
        "ring": h.ring().to_string(),
        "homology_ranks": homology_ranks(h),
        "homology_basis": basis_json(h),
        "operations": ops,
        "verification": {
            "stasheff_defect_arities": defect_json(&stasheff),
            "inclusion_defect_arities": defect_json(&iota),
            "projection_defect_arities": defect_json(&pi),
            "projection_after_inclusion_is_identity": pi_iota,
        },
    });
    Ok(Outcome {
        text,
        machine,
        code: if ok { EXIT_OK } else { EXIT_INTERNAL },
    })
}

fn flag_name(flag: FormalityFlag) -> &'static str {
    match flag {
        FormalityFlag::NFormalUpToK => "n-formal up to K",
        FormalityFlag::FormalUpToK => "formal up to K",
        FormalityFlag::Formal => "formal",
    }
}

pub fn cmd_formality(model: &Model, o: &Overrides) -> Result<Outcome, CommandError> {
    let twist = model
        .twist
        .as_ref()
        .ok_or_else(|| CommandError::Input("no twist given (document field twist or --alpha)".into()))?;
    let k = o.max_arity(model, 4);
    let target_n = o.target_n.or(model.run.map(|r| r.target_n)).unwrap_or(k);
    let r = retraction(model)?;
    let report = verify_degree_twisting(&model.algebra, twist, &r)?;
    if !report.all_pass() {
        let mut text = String::new();
        writeln!(text, "truncation arity K = {k}").unwrap();
        writeln!(text, "twisting rejected:").unwrap();
        for f in &report.failures {
            writeln!(text, "  {f}").unwrap();
        }
        let machine = json!({
            "command": "formality",
            "max_arity": k,
            "twisting": {
                "commutes_with_d": report.commutes_with_d,
                "multiplicative": report.multiplicative,
                "induces_twisting": report.induces_twisting,
                "failures": report.failures,
            },
            "status": "rejected",
        });
        return Ok(Outcome {
            text,
            machine,
            code: EXIT_REJECTED,
        });
    }
    let a = Arc::new(model.algebra.to_structure(k));
    let t = transfer(&a, &r).map_err(|e| CommandError::Rejected(e.to_string()))?;
    let s1 = induce_s1(&t.projection, &twist.sigma_hat, &t.inclusion)?;
    let sigma_h = twisting_map(r.homology.clone(), &twist.alpha, twist.c)?;
    let h_twist = TwistData::new(twist.alpha.clone(), twist.c, sigma_h)?;
    let cert = run_formality(&t.structure, &s1, &h_twist, target_n)?;

    let scope = cert.c as usize * cert.achieved_n;
    let mut text = String::new();
    writeln!(text, "ring: {}", r.homology.ring()).unwrap();
    writeln!(text, "truncation arity K = {k}").unwrap();
    writeln!(text, "homology ranks: {}", ranks_text(&r.homology)).unwrap();
    writeln!(text, "twist: α = {}, c = {}", twist.alpha, twist.c).unwrap();
    writeln!(text, "steps run: {} (target n = {target_n})", cert.steps_run).unwrap();
    writeln!(text, "achieved n = {}; {scope}-formal up to K", cert.achieved_n).unwrap();
    writeln!(text, "higher operations vanish in arities 3..={}", cert.vanishing_through).unwrap();
    match &cert.obstruction {
        Some(ob) => writeln!(
            text,
            "obstruction at step {}: α^{} − 1 = {} is not a unit",
            ob.step, ob.failed_k, ob.denominator
        )
        .unwrap(),
        None => writeln!(text, "obstruction: none").unwrap(),
    }
    writeln!(text, "result: {}", flag_name(cert.flag)).unwrap();
    let remaining = higher_ops(&cert.final_structure);
    writeln!(text, "final operations:").unwrap();
    for line in &remaining {
        writeln!(text, "  {line}").unwrap();
    }
    let iso = cert.iso.map().describe("f");
    writeln!(text, "isomorphism components:").unwrap();
    for line in &iso {
        writeln!(text, "  {line}").unwrap();
    }
    let machine = json!({
        "command": "formality",
        "max_arity": k,
        "ring": r.homology.ring().to_string(),
        "alpha": twist.alpha.to_string(),
        "c": twist.c,
        "target_n": target_n,
        "steps_run": cert.steps_run,
        "achieved_n": cert.achieved_n,
        "scope": scope,
        "vanishing_through": cert.vanishing_through,
        "obstruction": cert.obstruction.as_ref().map(|ob| json!({
            "step": ob.step,
            "k": ob.failed_k,
            "denominator": ob.denominator.to_string(),
        })),
        "flag": flag_name(cert.flag),
        "final_operations": remaining,
        "isomorphism": iso,
        "status": if cert.flag == FormalityFlag::Formal || cert.obstruction.is_none() { "ok" } else { "obstruction" },
    });
    let code = if cert.flag == FormalityFlag::Formal || cert.obstruction.is_none() {
        EXIT_OK
    } else {
        EXIT_OBSTRUCTION
    };
    Ok(Outcome { text, machine, code })
}

fn resolve_class(h: &GradedModule, name: &str) -> Result<usize, CommandError> {
    h.index_of(name)
        .or_else(|| h.index_of(&format!("[{name}]")))
        .ok_or_else(|| {
            let known: Vec<&str> = h.basis().iter().map(|g| g.name.as_str()).collect();
            CommandError::Input(format!("unknown homology class {name:?} (known: {})", known.join(", ")))
        })
}

pub fn cmd_massey(model: &Model, x: &str, y: &str, z: &str) -> Result<Outcome, CommandError> {
    let r = retraction(model)?;
    let h = r.homology.clone();
    let (i, j, l) = (resolve_class(&h, x)?, resolve_class(&h, y)?, resolve_class(&h, z)?);
    let a = Arc::new(model.algebra.to_structure(3));
    let t = transfer(&a, &r).map_err(|e| CommandError::Rejected(e.to_string()))?;
    let triple = massey_triple(&t.structure, i, j, l)?;
    let label = format!("⟨{}, {}, {}⟩", h.name(i), h.name(j), h.name(l));
    let spans: Vec<String> = triple.indeterminacy.iter().map(|v| h.format_vector(v)).collect();
    let advisory = triple.defined && !triple.class.is_zero();

    let mut text = String::new();
    writeln!(text, "truncation arity K = 3").unwrap();
    writeln!(text, "{label} = {}", h.format_vector(&triple.class)).unwrap();
    if spans.is_empty() {
        writeln!(text, "indeterminacy: zero").unwrap();
    } else {
        writeln!(text, "indeterminacy spanned by: {}", spans.join(", ")).unwrap();
    }
    writeln!(text, "defined without indeterminacy: {}", if triple.defined { "yes" } else { "no" }).unwrap();
    if advisory {
        writeln!(text, "advisory: nonzero Massey product, so the algebra is not 2-formal").unwrap();
    }
    let machine = json!({
        "command": "massey",
        "max_arity": 3,
        "classes": [h.name(i), h.name(j), h.name(l)],
        "class": h.format_vector(&triple.class),
        "class_is_zero": triple.class.is_zero(),
        "indeterminacy": spans,
        "defined": triple.defined,
        "not_2_formal": advisory,
    });
    Ok(Outcome {
        text,
        machine,
        code: EXIT_OK,
    })
}

pub fn cmd_verify(model: &Model) -> Result<Outcome, CommandError> {
    let algebra = &model.algebra;
    let dga = algebra.check();
    let mut checks: Vec<(String, bool)> = vec![
        ("d² = 0".into(), dga.d_squared_zero),
        ("associativity".into(), dga.associative),
        ("Leibniz rule".into(), dga.leibniz),
    ];
    let mut failures = dga.failures.clone();
    let r = if dga.d_squared_zero {
        match homology_with_retraction(&algebra.complex()?) {
            Ok(r) => {
                let rep = verify_retraction(&r);
                checks.push(("retraction identities".into(), rep.all_pass()));
                failures.extend(rep.failures().into_iter().map(String::from));
                Some(r)
            }
            Err(e) => {
                checks.push(("free homology".into(), false));
                failures.push(e.to_string());
                None
            }
        }
    } else {
        None
    };
    match (&model.twist, &model.endomorphism, &r) {
        (Some(t), _, Some(r)) => {
            let rep = verify_degree_twisting(algebra, t, r)?;
            checks.push(("endomorphism commutes with d".into(), rep.commutes_with_d));
            checks.push(("endomorphism is multiplicative".into(), rep.multiplicative));
            checks.push(("endomorphism induces the twisting".into(), rep.induces_twisting));
            failures.extend(rep.failures);
        }
        (None, Some(sigma), _) => {
            let d = algebra.differential();
            let commutes = sigma.compose(d)? == d.compose(sigma)?;
            let n = algebra.module().dim();
            let mut multiplicative = true;
            for a in 0..n {
                for b in 0..n {
                    let lhs = sigma.apply(&algebra.basis_product(a, b));
                    let rhs = algebra.multiply(sigma.column(a), sigma.column(b));
                    if lhs != rhs {
                        multiplicative = false;
                        failures.push(format!(
                            "σ({}·{}) ≠ σ({})·σ({})",
                            algebra.module().name(a),
                            algebra.module().name(b),
                            algebra.module().name(a),
                            algebra.module().name(b)
                        ));
                    }
                }
            }
            checks.push(("endomorphism commutes with d".into(), commutes));
            checks.push(("endomorphism is multiplicative".into(), multiplicative));
        }
        _ => {}
    }
    let ok = checks.iter().all(|(_, b)| *b);
    let mut text = String::new();
    for (name, pass) in &checks {
        writeln!(text, "{name}: {}", if *pass { "pass" } else { "FAIL" }).unwrap();
    }
    for f in &failures {
        writeln!(text, "  {f}").unwrap();
    }
    let machine = json!({
        "command": "verify",
        "checks": checks.iter().map(|(n, b)| json!({"check": n, "pass": b})).collect::<Vec<_>>(),
        "failures": failures,
        "all_pass": ok,
    });
    Ok(Outcome {
        text,
        machine,
        code: if ok { EXIT_OK } else { EXIT_REJECTED },
    })
}

pub fn cmd_fixture(name: &str) -> Result<(InputDocument, Outcome), CommandError> {
    let f = fixture(name).map_err(|e| CommandError::Input(e.to_string()))?;
    let doc = InputDocument::from_fixture(&f);
    let text = crate::document::serialize(&doc);
    let machine: Value = serde_json::from_str(&text).expect("serialized document is JSON");
    Ok((
        doc,
        Outcome {
            text,
            machine,
            code: EXIT_OK,
        },
    ))
}
