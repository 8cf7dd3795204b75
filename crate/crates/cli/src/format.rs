//! Text and CSV rendering. Every floating-point number is printed with 17
//! significant digits so that reports round-trip exactly.

use std::collections::BTreeMap;
use std::fmt::Write;

use cohrank_core::quantifiers::VandermondeCertificate;
use cohrank_core::{Bipartition, Complex64, RankReport, Tolerances};

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn complex(z: Complex64) -> String {
    format!("{} {}", num(z.re), num(z.im))
}

pub fn list(values: &[f64]) -> String {
    values.iter().map(|&v| num(v)).collect::<Vec<_>>().join(" ")
}

pub fn cutoffs(values: &[usize]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn tolerances(out: &mut String, tol: &Tolerances) {
    writeln!(
        out,
        "tolerances: merge_tol={} drop_tol={} rank_rel_tol={} truncation_tol={}",
        num(tol.merge_tol),
        num(tol.drop_tol),
        num(tol.rank_rel_tol),
        num(tol.truncation_tol)
    )
    .unwrap();
}

fn certificate(out: &mut String, prefix: &str, c: &VandermondeCertificate) {
    let direct = c.direct.map(complex).unwrap_or_else(|| "n/a".into());
    writeln!(
        out,
        "{prefix}value={} direct={} passed={}",
        complex(c.value),
        direct,
        c.passed
    )
    .unwrap();
}

pub fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

/// Body of a [`RankReport`], indented by `indent`.
pub fn rank_report(out: &mut String, r: &RankReport, indent: &str) {
    writeln!(out, "{indent}modes: {}", r.modes).unwrap();
    writeln!(out, "{indent}nonclassicality_rank: {}", r.nonclassicality_rank).unwrap();
    writeln!(out, "{indent}gram_rank: {}", r.gram_rank).unwrap();
    writeln!(out, "{indent}gram_eigenvalues: {}", list(&r.gram_eigenvalues)).unwrap();
    match r.min_separation {
        Some(d) => writeln!(out, "{indent}min_separation: {}", num(d)).unwrap(),
        None => writeln!(out, "{indent}min_separation: n/a").unwrap(),
    }
    if let Some(c) = &r.vandermonde_certificate {
        certificate(out, &format!("{indent}vandermonde: "), c);
    }
    for (m, c) in r.mode_certificates.iter().enumerate() {
        certificate(out, &format!("{indent}vandermonde_mode_{m}: "), c);
    }
    writeln!(out, "{indent}truncation: {}", cutoffs(&r.truncation_used)).unwrap();
    writeln!(out, "{indent}tail_bound: {}", num(r.tail_bound)).unwrap();
    spectra(out, &r.schmidt_spectra, &r.schmidt_ranks, indent);
    warnings(out, &r.warnings, indent);
}

pub fn spectra(
    out: &mut String,
    spectra: &BTreeMap<Bipartition, Vec<f64>>,
    ranks: &BTreeMap<Bipartition, usize>,
    indent: &str,
) {
    for (cut, spec) in spectra {
        writeln!(out, "{indent}bipartition {cut}: schmidt_rank={}", ranks[cut]).unwrap();
        writeln!(out, "{indent}  sigma: {}", list(spec)).unwrap();
    }
}

pub fn warnings(out: &mut String, warnings: &[String], indent: &str) {
    if warnings.is_empty() {
        writeln!(out, "{indent}warnings: none").unwrap();
    }
    for w in warnings {
        writeln!(out, "{indent}warning: {w}").unwrap();
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// `bipartition,sigma_index,sigma_value` rows.
pub fn spectra_csv(spectra: &BTreeMap<Bipartition, Vec<f64>>) -> String {
    let mut out = String::from("bipartition,sigma_index,sigma_value\n");
    for (cut, spec) in spectra {
        let label = csv_field(&cut.to_string());
        for (k, s) in spec.iter().enumerate() {
            writeln!(out, "{label},{k},{}", num(*s)).unwrap();
        }
    }
    out
}
