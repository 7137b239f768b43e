//! Rendering reports as JSON, CSV or a readable inequality chain.

use std::fmt::Write as _;

use clap::ValueEnum;
use hermite_simplex::corpus::{write_csv, CorpusRow};
use hermite_simplex::report::{to_json, BoundsDocument, FejerDocument, IntegralDocument};
use hermite_simplex::{BackendKind, IntegralKind, Verdict};
use serde::Serialize;

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

type Rendered = Result<String, Failure>;

fn json<T: Serialize>(value: &T) -> Rendered {
    to_json(value).map_err(|e| Failure::Input(e.to_string()))
}

fn csv_row<T: Serialize>(row: &T) -> Rendered {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.serialize(row).map_err(|e| Failure::Input(e.to_string()))?;
    let bytes = w.into_inner().map_err(|e| Failure::Input(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Input(e.to_string()))
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Serialize)]
struct BoundsRow {
    n: usize,
    #[serde(rename = "L")]
    l: f64,
    #[serde(rename = "R")]
    r: f64,
    #[serde(rename = "nR")]
    n_r: f64,
    mean_value: f64,
    f_at_barycenter: f64,
    #[serde(rename = "M")]
    m: f64,
    volume: f64,
    tolerance: f64,
    slack: f64,
    backend: BackendKind,
    verdict_hh: Verdict,
    verdict_1d: Option<Verdict>,
}

pub fn bounds(doc: &BoundsDocument, format: Format) -> Rendered {
    let r = &doc.report;
    match format {
        Format::Json => json(doc),
        Format::Csv => csv_row(&BoundsRow {
            n: r.n,
            l: r.l,
            r: r.r,
            n_r: r.n_r,
            mean_value: r.mean_value,
            f_at_barycenter: r.f_at_barycenter,
            m: r.m,
            volume: r.volume,
            tolerance: r.tolerance,
            slack: r.slack,
            backend: r.backend(),
            verdict_hh: r.verdict_hh,
            verdict_1d: r.verdict_1d,
        }),
        Format::Pretty => {
            let mut s = String::new();
            let _ = writeln!(s, "n = {}, |T| = {}, backend {}", r.n, num(r.volume), r.backend().as_str());
            let _ = writeln!(s, "f(b) <= (1/|T|) int_T f <= M");
            let _ = writeln!(s, "  {} <= {} <= {}", num(r.f_at_barycenter), num(r.mean_value), num(r.m));
            let _ = writeln!(s, "L = {}", num(r.l));
            let _ = writeln!(s, "R = {}", num(r.r));
            let _ = writeln!(s, "0 <= L <= nR");
            let _ = writeln!(s, "  0 <= {} <= {}", num(r.l), num(r.n_r));
            let _ = writeln!(s, "slack nR - L = {}, tolerance {}", num(r.slack), num(r.tolerance));
            let _ = writeln!(s, "verdict: {}", r.verdict_hh.as_str());
            if let Some(v) = r.verdict_1d {
                let _ = writeln!(s, "L <= R: {} <= {}, verdict: {}", num(r.l), num(r.r), v.as_str());
            }
            Ok(s)
        }
    }
}

#[derive(Serialize)]
struct FejerRow {
    a: Option<f64>,
    n: usize,
    #[serde(rename = "Lg")]
    lg: f64,
    #[serde(rename = "Rg")]
    rg: f64,
    #[serde(rename = "Delta")]
    delta: f64,
    alpha: f64,
    int_g: f64,
    int_fg: f64,
    tolerance: f64,
    backend: BackendKind,
    verdict_thm3: Verdict,
    #[serde(rename = "verdict_ineq_R")]
    verdict_ineq_r: Verdict,
    #[serde(rename = "verdict_ineq_L")]
    verdict_ineq_l: Verdict,
}

pub fn fejer(doc: &FejerDocument, format: Format) -> Rendered {
    let r = &doc.report;
    match format {
        Format::Json => json(doc),
        Format::Csv => csv_row(&FejerRow {
            a: doc.a,
            n: r.n,
            lg: r.lg,
            rg: r.rg,
            delta: r.delta,
            alpha: r.alpha,
            int_g: r.int_g,
            int_fg: r.int_fg,
            tolerance: r.tolerance,
            backend: r.backend,
            verdict_thm3: r.verdict_thm3,
            verdict_ineq_r: r.verdict_ineq_r,
            verdict_ineq_l: r.verdict_ineq_l,
        }),
        Format::Pretty => {
            let mut s = String::new();
            let _ = writeln!(s, "n = {}, backend {}", r.n, r.backend.as_str());
            if let (Some(a), Some(c)) = (doc.a, doc.constant) {
                let _ = writeln!(s, "a = {}: Lg = {} > {} Rg = {}", num(a), num(r.lg), c, num(c * r.rg));
            }
            if let Some(w) = &r.symmetry_warning {
                let _ = writeln!(s, "warning: {w}");
            }
            let _ = writeln!(s, "f(b) int g <= int f g <= M int g");
            let _ = writeln!(
                s,
                "  {} <= {} <= {}",
                num(r.f_at_barycenter * r.int_g),
                num(r.int_fg),
                num(r.m * r.int_g)
            );
            let _ = writeln!(s, "Lg = {}, Rg = {}, verdict: {}", num(r.lg), num(r.rg), r.verdict_thm3.as_str());
            let _ = writeln!(s, "0 <= Delta alpha <= Rg");
            let _ = writeln!(
                s,
                "  0 <= {} <= {}, verdict: {}",
                num(r.delta * r.alpha),
                num(r.rg),
                r.verdict_ineq_r.as_str()
            );
            let _ = writeln!(s, "0 <= Lg <= Delta (int g - alpha)");
            let _ = writeln!(
                s,
                "  0 <= {} <= {}, verdict: {}",
                num(r.lg),
                num(r.delta * (r.int_g - r.alpha)),
                r.verdict_ineq_l.as_str()
            );
            let _ = writeln!(s, "Delta = {}, alpha = {}, tolerance {}", num(r.delta), num(r.alpha), num(r.tolerance));
            Ok(s)
        }
    }
}

#[derive(Serialize)]
struct IntegralRow {
    value: f64,
    uncertainty: f64,
    backend: BackendKind,
    evaluations: u64,
    converged: bool,
}

pub fn integral(doc: &IntegralDocument, format: Format) -> Rendered {
    let r = &doc.result;
    match format {
        Format::Json => json(doc),
        Format::Csv => csv_row(&IntegralRow {
            value: r.value,
            uncertainty: doc.uncertainty,
            backend: r.backend(),
            evaluations: r.evaluations,
            converged: r.converged,
        }),
        Format::Pretty => {
            let detail = match r.kind {
                IntegralKind::Exact => "exact".to_string(),
                IntegralKind::Bracket { lo, hi } => format!("certified in [{}, {}]", num(lo), num(hi)),
                IntegralKind::MonteCarlo { stderr, samples, seed } => {
                    format!("monte carlo, stderr {}, {samples} samples, seed {seed}", num(stderr))
                }
            };
            let mut s = format!("int_T f = {} +- {}\n{detail}\n", num(r.value), num(doc.uncertainty));
            if !r.converged {
                s.push_str("tolerance not reached\n");
            }
            Ok(s)
        }
    }
}

pub fn corpus(rows: &[CorpusRow], format: Format) -> Rendered {
    match format {
        Format::Json => json(&rows),
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(rows, &mut buf).map_err(|e| Failure::Input(e.to_string()))?;
            String::from_utf8(buf).map_err(|e| Failure::Input(e.to_string()))
        }
        Format::Pretty => {
            let mut s = String::new();
            let _ = writeln!(s, "{:>4} {:>9} {:>24} {:>24} {:>24}  verdict", "dim", "instance", "L", "nR", "slack");
            for r in rows {
                let _ = writeln!(
                    s,
                    "{:>4} {:>9} {:>24} {:>24} {:>24}  {}",
                    r.dim,
                    r.instance,
                    num(r.l),
                    num(r.n_r),
                    num(r.slack),
                    r.verdict.as_str()
                );
            }
            let passed = rows.iter().filter(|r| r.verdict.is_pass()).count();
            let _ = writeln!(s, "{passed} of {} pass", rows.len());
            Ok(s)
        }
    }
}
