//! Report envelope and per-command payload construction.
//!
//! Every command emits a `Report`: the command name, the tool version, a
//! digest of the normalized input (absent for input-free commands), and a
//! machine-readable payload. The text renderings print the same facts in
//! a line-oriented form.

use serde_json::{json, Value};

use liemod::classify3::{CanonicalClass, Classification, FamilyInvariant};
use liemod::coder::{basis_name, render_linear, Coderivation};
use liemod::cohomology::CohomologyReport;
use liemod::deform::{MiniversalResult, ModuliGraph, XCoefficient};
use liemod::exterior::s_index;
use liemod::linalg::Matrix;
use liemod::scalars::{render_rational, Rational, Scalar};

#[derive(Debug, Clone, serde::Serialize)]
pub struct Report {
    pub command: String,
    pub version: String,
    pub input_digest: Option<String>,
    pub payload: Value,
}

impl Report {
    pub fn new(command: &str, digest: Option<String>, payload: Value) -> Report {
        Report {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            input_digest: digest,
            payload,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

fn matrix_json(m: &Matrix<Rational>) -> Value {
    let rows: Vec<Vec<String>> = (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| render_rational(m.at(i, j))).collect())
        .collect();
    json!(rows)
}

/// Nonzero coefficients of a coderivation as `{word, target, coeff}` rows.
fn term_rows(c: &Coderivation<Rational>) -> Vec<Value> {
    let mut out = Vec::new();
    for j in 1..=c.coeffs().cols() {
        let word = s_index(j, c.arity(), c.dim()).expect("ordinal in range");
        for i in 1..=c.dim() {
            let v = c.coeff(i, j);
            if !v.vanishes() {
                out.push(json!({
                    "word": word.entries(),
                    "target": i,
                    "coeff": render_rational(v),
                    "name": basis_name(c.arity(), &word, i),
                }));
            }
        }
    }
    out
}

pub fn jacobi_payload(residual: &Coderivation<Rational>) -> Value {
    json!({
        "residual_zero": residual.is_zero(),
        "residual": render_linear(residual),
        "residual_terms": term_rows(residual),
    })
}

pub fn jacobi_text(residual: &Coderivation<Rational>) -> String {
    if residual.is_zero() {
        "jacobi: satisfied (residual 0)".to_string()
    } else {
        format!("jacobi: violated\nresidual: {}", render_linear(residual))
    }
}

pub fn cohomology_payload(report: &CohomologyReport) -> Value {
    let degrees: Vec<Value> = report
        .degrees
        .iter()
        .map(|d| {
            json!({
                "degree": d.degree,
                "dim_chains": d.dim_chains,
                "dim_cocycles": d.dim_cocycles,
                "dim_cohomology": d.dim_cohomology,
                "prebasis": d.splitting.harmonic.iter().map(render_linear).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "dims": report.degrees.iter().map(|d| d.dim_cohomology).collect::<Vec<_>>(),
        "degrees": degrees,
    })
}

pub fn cohomology_text(report: &CohomologyReport) -> String {
    let mut lines = Vec::new();
    for d in &report.degrees {
        let mut line = format!("H^{} dim {}", d.degree, d.dim_cohomology);
        if !d.splitting.harmonic.is_empty() {
            let names: Vec<String> = d.splitting.harmonic.iter().map(render_linear).collect();
            line.push_str(&format!("  [{}]", names.join(", ")));
        }
        lines.push(line);
    }
    lines.join("\n")
}

fn family_json(inv: &FamilyInvariant) -> Value {
    match inv {
        FamilyInvariant::ZeroProduct => json!({"kind": "zero_product"}),
        FamilyInvariant::Kappa(k) => json!({"kind": "kappa", "value": render_rational(k)}),
    }
}

pub fn classify_payload(out: &Classification, verified: bool) -> Value {
    json!({
        "class": out.class.label(),
        "family_invariant": out.class.family_point().map(family_json),
        "representative_label": out.representative_label.as_ref().map(|l| l.name()),
        "representative_matrix": matrix_json(out.representative.matrix()),
        "canonical": out.representative_is_canonical(),
        "witness_g": matrix_json(out.witness.g()),
        "verified": verified,
    })
}

pub fn classify_text(out: &Classification, verified: bool) -> String {
    let mut lines = vec![format!("class: {}", out.class.label())];
    if let CanonicalClass::Family(inv) = &out.class {
        match inv {
            FamilyInvariant::ZeroProduct => lines.push("invariant: zero eigenvalue product".into()),
            FamilyInvariant::Kappa(k) => {
                lines.push(format!("invariant: kappa = {}", render_rational(k)))
            }
        }
    }
    match &out.representative_label {
        Some(l) => lines.push(format!("representative: {l} (canonical)")),
        None => lines.push("representative: reduced form (canonical form needs an irrational scaling)".into()),
    }
    lines.push(format!("witness verified: {verified}"));
    lines.join("\n")
}

pub fn miniversal_payload(mv: &MiniversalResult) -> Value {
    let matrix = mv.deformation.matrix();
    let rows: Vec<Vec<String>> = (0..matrix.rows())
        .map(|i| (0..matrix.cols()).map(|j| matrix.at(i, j).render_machine()).collect())
        .collect();
    let solved: Vec<Value> = mv
        .deformation
        .p_terms()
        .iter()
        .map(|(gamma, x)| {
            let value = match x {
                XCoefficient::Free(p) => p.to_string(),
                XCoefficient::Solved(v) => v.render_machine(),
            };
            json!({"direction": render_linear(gamma), "coefficient": value})
        })
        .collect();
    json!({
        "rigid": mv.deformation.parameters().is_empty(),
        "parameters": mv.deformation.parameters().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "matrix": rows,
        "corrections": solved,
        "relations": mv.relations.iter().map(|r| r.render_machine()).collect::<Vec<_>>(),
        "exact": mv.exact,
        "truncation_degree": mv.truncation_degree,
    })
}

pub fn miniversal_text(mv: &MiniversalResult) -> String {
    if mv.deformation.parameters().is_empty() {
        return "rigid: no degree-two cohomology; the miniversal deformation is the structure itself"
            .to_string();
    }
    let mut lines = vec![format!("deformation: {}", mv.deformation.render())];
    let matrix = mv.deformation.matrix();
    for i in 0..matrix.rows() {
        let row: Vec<String> =
            (0..matrix.cols()).map(|j| matrix.at(i, j).render_machine()).collect();
        lines.push(format!("  [{}]", row.join(", ")));
    }
    if mv.relations.is_empty() {
        lines.push("relations: none (unobstructed)".to_string());
    } else {
        lines.push(format!(
            "relations: {}",
            mv.relations.iter().map(|r| r.render_machine()).collect::<Vec<_>>().join("; ")
        ));
    }
    lines.push(format!("exact: {}", mv.exact));
    lines.join("\n")
}

pub fn graph_payload(graph: &ModuliGraph) -> Value {
    let nodes: Vec<Value> = graph
        .nodes
        .iter()
        .map(|n| {
            json!({
                "id": n.id,
                "kind": format!("{:?}", n.kind).to_lowercase(),
                "marked": n.marked,
            })
        })
        .collect();
    let edges: Vec<Value> = graph
        .edges
        .iter()
        .map(|e| {
            json!({
                "from": e.from,
                "from_point": e.from_point,
                "to": e.to,
                "to_point": e.to_point,
                "kind": format!("{:?}", e.kind).to_lowercase(),
            })
        })
        .collect();
    json!({"nodes": nodes, "edges": edges})
}
