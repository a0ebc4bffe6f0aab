//! Human and JSON renderings of the library reports. Matrix indices are
//! printed 1-based; filtration levels keep their 0-based numbering with `-1`
//! for the final vectors.

use std::fmt::Write as _;

use hadamat::classes::{Side, Witness};
use hadamat::filtered::{AlgoTrace, StopReason};
use hadamat::structure::StructureReport;
use hadamat::tau::{ClassTReport, TauCertificate, TauMethod, TauResult, TauValue};
use hadamat::{ClassReport, Matrix};
use serde_json::{json, Value};

use crate::io::{fmt_real, render_matrix, Format};

/// JSON number carrying the exact 17-digit text of `x`.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        serde_json::from_str(&fmt_real(x)).expect("decimal literal")
    } else {
        Value::String(fmt_real(x))
    }
}

pub fn num_vec(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| num(x)).collect())
}

pub fn matrix_json(m: &Matrix) -> Value {
    Value::Array(m.rows().map(num_vec).collect())
}

/// Rewrites every non-integer number through [`num`].
pub fn normalize_numbers(v: Value) -> Value {
    match v {
        Value::Number(n) if !(n.is_u64() || n.is_i64()) => num(n.as_f64().expect("finite")),
        Value::Array(xs) => Value::Array(xs.into_iter().map(normalize_numbers).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, x)| (k, normalize_numbers(x))).collect()),
        other => other,
    }
}

pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn vec_text(v: &[f64]) -> String {
    let cells: Vec<String> = v.iter().map(|&x| fmt_real(x)).collect();
    format!("[{}]", cells.join(" "))
}

pub fn witness_text(w: &Witness) -> String {
    match *w {
        Witness::Entry { row, col, value } => {
            format!("entry ({},{}) = {}", row + 1, col + 1, fmt_real(value))
        }
        Witness::InverseEntry { row, col, value } => {
            format!("inverse entry ({},{}) = {}", row + 1, col + 1, fmt_real(value))
        }
        Witness::Singular => "singular".into(),
        Witness::Potential { side, index, value } => {
            let name = match side {
                Side::Right => "right potential mu",
                Side::Left => "left potential nu",
            };
            format!("{name}[{}] = {}", index + 1, fmt_real(value))
        }
        Witness::Triple { i, j, k } => {
            format!("triple {{{},{},{}}} has no preferred element", i + 1, j + 1, k + 1)
        }
    }
}

pub fn witness_json(w: &Witness) -> Value {
    match *w {
        Witness::Entry { row, col, value } => {
            json!({"kind": "entry", "row": row + 1, "col": col + 1, "value": num(value)})
        }
        Witness::InverseEntry { row, col, value } => {
            json!({"kind": "inverse_entry", "row": row + 1, "col": col + 1, "value": num(value)})
        }
        Witness::Singular => json!({"kind": "singular"}),
        Witness::Potential { side, index, value } => json!({
            "kind": "potential",
            "side": match side { Side::Right => "right", Side::Left => "left" },
            "index": index + 1,
            "value": num(value),
        }),
        Witness::Triple { i, j, k } => json!({"kind": "triple", "indices": [i + 1, j + 1, k + 1]}),
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn classify_text(n: usize, c: &ClassReport, s: &StructureReport) -> String {
    let mut out = format!("n = {n}\n");
    for (class, ok) in c.verdicts() {
        write!(out, "{:<34}{}", class.label(), yes_no(ok)).unwrap();
        if let Some(w) = c.certificates.get(&class) {
            write!(out, "    {}", witness_text(w)).unwrap();
        }
        out.push('\n');
    }
    if let Some(mu) = &c.mu {
        writeln!(out, "{:<34}{}", "right equilibrium potential", vec_text(mu)).unwrap();
    }
    if let Some(nu) = &c.nu {
        writeln!(out, "{:<34}{}", "left equilibrium potential", vec_text(nu)).unwrap();
    }
    writeln!(out, "{:<34}{}", "entrywise diag dominant", yes_no(s.is_entrywise_diag_dominant)).unwrap();
    write!(out, "{:<34}{}", "GUM", yes_no(s.is_gum)).unwrap();
    if let Some(w) = &s.gum_witness {
        write!(out, "    {}", witness_text(w)).unwrap();
    }
    out.push('\n');
    writeln!(out, "{:<34}{}", "ultrametric", yes_no(s.is_ultrametric)).unwrap();
    writeln!(out, "{:<34}{}", "NBF", yes_no(s.is_nbf)).unwrap();
    let perm = match &s.nbf_permutation {
        Some(p) => p.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(" "),
        None => "absent".into(),
    };
    writeln!(out, "{:<34}{}", "NBF permutation", perm).unwrap();
    let ns = match s.gum_nonsingular {
        Some(b) => yes_no(b),
        None => "undecided (not a GUM)",
    };
    writeln!(out, "{:<34}{}", "GUM nonsingular", ns).unwrap();
    out
}

pub fn classify_json(n: usize, c: &ClassReport, s: &StructureReport) -> Value {
    let classes: Vec<Value> = c
        .verdicts()
        .iter()
        .map(|&(class, ok)| {
            json!({
                "class": class.label(),
                "holds": ok,
                "certificate": c.certificates.get(&class).map(witness_json),
            })
        })
        .collect();
    json!({
        "n": n,
        "classes": classes,
        "right_potential": c.mu.as_deref().map(num_vec),
        "left_potential": c.nu.as_deref().map(num_vec),
        "structure": {
            "is_entrywise_diag_dominant": s.is_entrywise_diag_dominant,
            "is_gum": s.is_gum,
            "gum_witness": s.gum_witness.as_ref().map(witness_json),
            "is_ultrametric": s.is_ultrametric,
            "is_nbf": s.is_nbf,
            "nbf_permutation": s.nbf_permutation.as_ref().map(|p| p.iter().map(|i| i + 1).collect::<Vec<_>>()),
            "gum_nonsingular": s.gum_nonsingular,
        }
    })
}

fn method_name(m: TauMethod) -> &'static str {
    match m {
        TauMethod::Bisection => "bisection",
        TauMethod::EquilibriumFailure => "equilibrium_failure",
    }
}

fn certificate_text(c: &TauCertificate) -> String {
    match c {
        TauCertificate::Class(w) => witness_text(w),
        TauCertificate::FilteredStop { level, min_value } => {
            format!("filtered recursion stopped at level {level}, min entry {}", fmt_real(*min_value))
        }
        TauCertificate::Potentials { min_mu, min_nu } => {
            format!("min mu = {}, min nu = {}", fmt_real(*min_mu), fmt_real(*min_nu))
        }
    }
}

fn certificate_json(c: &TauCertificate) -> Value {
    match c {
        TauCertificate::Class(w) => json!({"kind": "class", "witness": witness_json(w)}),
        TauCertificate::FilteredStop { level, min_value } => {
            json!({"kind": "filtered_stop", "level": level, "min_value": num(*min_value)})
        }
        TauCertificate::Potentials { min_mu, min_nu } => {
            json!({"kind": "potentials", "min_mu": num(*min_mu), "min_nu": num(*min_nu)})
        }
    }
}

fn tau_value_json(v: TauValue) -> Value {
    match v {
        TauValue::Finite(x) => json!(format!("{x:.8}")),
        TauValue::Infinite => json!("inf"),
    }
}

pub fn tau_text(r: &TauResult) -> String {
    let mut out = format!("tau = {}\nmethod = {}\n", r.value, method_name(r.method));
    if let Some(t) = r.witness_t {
        writeln!(out, "witness t = {}", fmt_real(t)).unwrap();
    }
    if let Some(c) = &r.certificate {
        writeln!(out, "certificate = {}", certificate_text(c)).unwrap();
    }
    out
}

pub fn tau_json(r: &TauResult) -> Value {
    json!({
        "tau": tau_value_json(r.value),
        "method": method_name(r.method),
        "witness_t": r.witness_t.map(num),
        "certificate": r.certificate.as_ref().map(certificate_json),
    })
}

pub fn class_t_text(r: &ClassTReport) -> String {
    let mut out = tau_text(&r.tau_b);
    writeln!(out, "tau (equilibrium failure) = {}", r.tau_a).unwrap();
    writeln!(out, "tau (strict positivity) = {}", r.tau_a_strict).unwrap();
    writeln!(out, "thresholds agree = {}", yes_no(r.agree)).unwrap();
    if let Some(ns) = r.nonsingular_at_tau {
        writeln!(out, "I + tau U nonsingular = {}", yes_no(ns)).unwrap();
    }
    writeln!(out, "class T = {}", yes_no(r.is_class_t)).unwrap();
    out
}

pub fn class_t_json(r: &ClassTReport) -> Value {
    json!({
        "bisection": tau_json(&r.tau_b),
        "tau_equilibrium_failure": tau_value_json(r.tau_a),
        "tau_strict": tau_value_json(r.tau_a_strict),
        "agree": r.agree,
        "nonsingular_at_tau": r.nonsingular_at_tau,
        "is_class_t": r.is_class_t,
    })
}

fn stop_reason(r: StopReason) -> &'static str {
    match r {
        StopReason::Negative => "negative potential",
        StopReason::Breakdown => "vanishing denominator",
    }
}

pub fn trace_text(tr: &AlgoTrace, format: Format) -> String {
    let mut out = format!("t = {}\nsuccess = {}\n", fmt_real(tr.t), yes_no(tr.success));
    if let (Some(level), Some(reason)) = (tr.stop_index, tr.stop_reason) {
        writeln!(out, "stopped at level {level}: {}", stop_reason(reason)).unwrap();
    }
    if let Some(l) = &tr.lambda_final {
        writeln!(out, "lambda = {}", vec_text(l)).unwrap();
    }
    if let Some(m) = &tr.mu_final {
        writeln!(out, "mu = {}", vec_text(m)).unwrap();
    }
    if let Some(n) = &tr.n_matrix {
        out.push_str("N =\n");
        out.push_str(&render_matrix(n, format));
    }
    out
}

pub fn trace_json(tr: &AlgoTrace) -> Value {
    json!({
        "t": num(tr.t),
        "success": tr.success,
        "stop_level": tr.stop_index,
        "stop_reason": tr.stop_reason.map(stop_reason),
        "lambda": tr.lambda_final.as_deref().map(num_vec),
        "mu": tr.mu_final.as_deref().map(num_vec),
        "n_matrix": tr.n_matrix.as_ref().map(matrix_json),
        "inverse": tr.inverse().as_ref().map(matrix_json),
    })
}
