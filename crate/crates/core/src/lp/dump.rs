//! Text dump of an [`LpModel`] in the CPLEX LP layout.
//!
//! ```text
//! \ comment
//! Maximize
//!  obj: c0 x0 + c1 x1 ...
//! Subject To
//!  r0: a x0 + b x1 <= rhs        one-sided rows
//!  r1_lo: ... >= lo              two-sided rows split in two
//!  r1_up: ... <= up
//!  r2: ... = rhs                 equalities
//! Bounds
//!  lo <= x0 <= up                -inf / +inf for missing sides
//! End
//! ```
//!
//! Numbers are written with 12 significant digits.

use std::fmt::Write;

use super::LpModel;

/// Formats `v` with 12 significant digits, trimming trailing zeros.
pub(crate) fn num(v: f64) -> String {
    if v == f64::INFINITY {
        return "+inf".into();
    }
    if v == f64::NEG_INFINITY {
        return "-inf".into();
    }
    if v == 0.0 {
        return "0".into();
    }
    let s = format!("{:.11e}", v);
    let (mant, exp) = s.split_once('e').expect("exponent form");
    let mant = if mant.contains('.') { mant.trim_end_matches('0').trim_end_matches('.') } else { mant };
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let plain = format!("{:.*}", (11 - exp).max(0) as usize, v);
        let plain = if plain.contains('.') { plain.trim_end_matches('0').trim_end_matches('.').to_string() } else { plain };
        return plain;
    }
    format!("{mant}e{exp}")
}

fn linear(out: &mut String, model: &LpModel, terms: &[(usize, f64)]) {
    if terms.is_empty() {
        out.push_str(" 0 ");
        out.push_str(model.name(0));
        return;
    }
    for (k, &(j, a)) in terms.iter().enumerate() {
        let sign = if a < 0.0 { " -" } else if k > 0 { " +" } else { "" };
        let _ = write!(out, "{sign} {} {}", num(a.abs()), model.name(j));
    }
}

pub fn write_lp(model: &LpModel, comment: &str) -> String {
    let mut out = String::new();
    for line in comment.lines() {
        let _ = writeln!(out, "\\ {line}");
    }
    out.push_str("Maximize\n obj:");
    let obj: Vec<(usize, f64)> =
        model.objective().iter().enumerate().filter(|(_, &c)| c != 0.0).map(|(j, &c)| (j, c)).collect();
    linear(&mut out, model, &obj);
    out.push_str("\nSubject To\n");
    for (i, row) in model.rows().iter().enumerate() {
        let mut emit = |name: String, op: &str, rhs: f64| {
            let _ = write!(out, " {name}:");
            linear(&mut out, model, &row.coefs);
            let _ = writeln!(out, " {op} {}", num(rhs));
        };
        match (row.lo.is_finite(), row.up.is_finite()) {
            _ if row.lo == row.up => emit(format!("r{i}"), "=", row.lo),
            (true, true) => {
                emit(format!("r{i}_lo"), ">=", row.lo);
                emit(format!("r{i}_up"), "<=", row.up);
            }
            (true, false) => emit(format!("r{i}"), ">=", row.lo),
            (false, true) => emit(format!("r{i}"), "<=", row.up),
            (false, false) => {}
        }
    }
    out.push_str("Bounds\n");
    for j in 0..model.ncols() {
        let (lo, up) = model.bounds(j);
        let _ = writeln!(out, " {} <= {} <= {}", num(lo), model.name(j), num(up));
    }
    out.push_str("End\n");
    out
}
