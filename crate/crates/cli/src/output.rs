//! Primary report bodies and their three renderings.
//!
//! JSON goes through the typed structs directly so key order is the struct
//! order and identical invocations produce identical bytes. CSV columns are
//! documented in the README; text is a human summary of the same values.

use std::collections::BTreeMap;

use serde::Serialize;

use goldsieve_core::analytics::{DensityValue, ExtremaReport};
use goldsieve_core::goldbach::{PartitionReport, ScanSummary};
use goldsieve_core::SelectionScheme;

use crate::cli::Format;
use crate::record::Outcome;

#[derive(Serialize)]
pub struct PrimesBody {
    pub limit: u64,
    pub count: usize,
    pub primes: Vec<u64>,
}

#[derive(Serialize)]
pub struct CountBody {
    pub scheme: SelectionScheme,
    pub lo: u64,
    pub hi: u64,
    pub count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub naive_count: Option<u64>,
}

#[derive(Serialize)]
pub struct EnumerateBody {
    pub scheme: SelectionScheme,
    pub lo: u64,
    pub hi: u64,
    pub count: u64,
    pub indices: Vec<u64>,
}

#[derive(Serialize)]
pub struct PeriodDensityBody {
    pub k: usize,
    pub delta: DensityValue,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub product_form_equal: Option<bool>,
}

#[derive(Serialize)]
pub struct MeasuredDensityBody {
    pub k: usize,
    pub lo: u64,
    pub hi: u64,
    pub count: u64,
    pub density: DensityValue,
}

#[derive(Serialize)]
pub struct IntervalBoundsBody {
    pub k: usize,
    pub n: u64,
    pub lower: DensityValue,
    pub upper: DensityValue,
}

#[derive(Serialize)]
pub struct RightBoundsBody {
    pub h: usize,
    pub k: usize,
    pub lower: DensityValue,
    pub upper: DensityValue,
}

#[derive(Serialize)]
pub struct SurveyBody {
    pub k: usize,
    pub lo: u64,
    pub hi: u64,
    pub strategy: String,
    pub samples: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub mean_density: DensityValue,
}

#[derive(Serialize)]
pub struct GoldbachBody {
    pub report: PartitionReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<(u64, u64)>>,
}

#[derive(Serialize)]
pub struct VerifyBody {
    pub suite: String,
    pub outcome: String,
    pub params: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<serde_json::Value>,
}

#[derive(Serialize)]
pub struct SuiteListBody {
    pub suites: Vec<SuiteListEntry>,
}

#[derive(Serialize)]
pub struct SuiteListEntry {
    pub suite: String,
    pub checks: String,
}

#[derive(Serialize)]
pub struct BenchBody {
    pub k: usize,
    pub rows: Vec<BenchRow>,
}

#[derive(Serialize, Clone)]
pub struct BenchRow {
    pub size: u64,
    pub count: u64,
    pub elapsed_ms: f64,
    pub indices_per_sec: f64,
}

pub enum Body {
    Primes(PrimesBody),
    Scheme(SelectionScheme),
    Count(CountBody),
    Enumerate(EnumerateBody),
    PeriodDensity(PeriodDensityBody),
    MeasuredDensity(MeasuredDensityBody),
    IntervalBounds(IntervalBoundsBody),
    RightBounds(RightBoundsBody),
    Survey(SurveyBody),
    Extrema(ExtremaReport),
    Goldbach(GoldbachBody),
    Scan(ScanSummary),
    Verify(VerifyBody),
    SuiteList(SuiteListBody),
    Bench(BenchBody),
}

/// Everything `main` needs after a command ran: the rendered primary
/// report, the record identity, and the outcome.
pub struct CommandResult {
    pub rendered: String,
    pub suite: String,
    pub params: BTreeMap<String, String>,
    pub outcome: Outcome,
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("report types serialize");
    s.push('\n');
    s
}

fn csv_rows(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("csv header");
    for row in rows {
        w.write_record(&row).expect("csv row");
    }
    String::from_utf8(w.into_inner().expect("csv buffer")).expect("csv utf8")
}

fn density_cols(d: &DensityValue) -> Vec<String> {
    vec![
        d.numerator().to_string(),
        d.denominator().to_string(),
        d.to_f64().to_string(),
    ]
}

fn scheme_json(s: &SelectionScheme) -> String {
    serde_json::to_string(s).expect("scheme serializes")
}

impl Body {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
            Format::Text => self.to_text(),
        }
    }

    fn to_json(&self) -> String {
        match self {
            Body::Primes(b) => json(b),
            Body::Scheme(b) => json(b),
            Body::Count(b) => json(b),
            Body::Enumerate(b) => json(b),
            Body::PeriodDensity(b) => json(b),
            Body::MeasuredDensity(b) => json(b),
            Body::IntervalBounds(b) => json(b),
            Body::RightBounds(b) => json(b),
            Body::Survey(b) => json(b),
            Body::Extrema(b) => json(b),
            Body::Goldbach(b) => json(b),
            Body::Scan(b) => json(b),
            Body::Verify(b) => json(b),
            Body::SuiteList(b) => json(b),
            Body::Bench(b) => json(b),
        }
    }

    fn to_csv(&self) -> String {
        match self {
            Body::Primes(b) => csv_rows(
                &["prime"],
                b.primes.iter().map(|p| vec![p.to_string()]).collect(),
            ),
            Body::Scheme(s) => csv_rows(&["scheme"], vec![vec![scheme_json(s)]]),
            Body::Count(b) => csv_rows(
                &["lo", "hi", "count", "naive_count"],
                vec![vec![
                    b.lo.to_string(),
                    b.hi.to_string(),
                    b.count.to_string(),
                    b.naive_count.map(|c| c.to_string()).unwrap_or_default(),
                ]],
            ),
            Body::Enumerate(b) => csv_rows(
                &["index"],
                b.indices.iter().map(|n| vec![n.to_string()]).collect(),
            ),
            Body::PeriodDensity(b) => {
                let mut row = vec![b.k.to_string()];
                row.extend(density_cols(&b.delta));
                row.push(
                    b.product_form_equal
                        .map(|v| v.to_string())
                        .unwrap_or_default(),
                );
                csv_rows(
                    &["k", "num", "den", "float", "product_form_equal"],
                    vec![row],
                )
            }
            Body::MeasuredDensity(b) => {
                let mut row = vec![
                    b.k.to_string(),
                    b.lo.to_string(),
                    b.hi.to_string(),
                    b.count.to_string(),
                ];
                row.extend(density_cols(&b.density));
                csv_rows(&["k", "lo", "hi", "count", "num", "den", "float"], vec![row])
            }
            Body::IntervalBounds(b) => {
                let mut row = vec![b.k.to_string(), b.n.to_string()];
                row.extend(density_cols(&b.lower));
                row.extend(density_cols(&b.upper));
                csv_rows(
                    &[
                        "k", "n", "lower_num", "lower_den", "lower_float", "upper_num",
                        "upper_den", "upper_float",
                    ],
                    vec![row],
                )
            }
            Body::RightBounds(b) => {
                let mut row = vec![b.h.to_string(), b.k.to_string()];
                row.extend(density_cols(&b.lower));
                row.extend(density_cols(&b.upper));
                csv_rows(
                    &[
                        "h", "k", "lower_num", "lower_den", "lower_float", "upper_num",
                        "upper_den", "upper_float",
                    ],
                    vec![row],
                )
            }
            Body::Survey(b) => {
                let mut row = vec![
                    b.k.to_string(),
                    b.lo.to_string(),
                    b.hi.to_string(),
                    b.strategy.clone(),
                    b.samples.to_string(),
                    b.seed.map(|s| s.to_string()).unwrap_or_default(),
                ];
                row.extend(density_cols(&b.mean_density));
                csv_rows(
                    &["k", "lo", "hi", "strategy", "samples", "seed", "num", "den", "float"],
                    vec![row],
                )
            }
            Body::Extrema(b) => {
                let mut row = vec![
                    b.k.to_string(),
                    format!("{:?}", b.role).to_lowercase(),
                    b.interval_lo.clone(),
                    b.interval_hi.clone(),
                    b.strategy.clone(),
                    b.samples.to_string(),
                    b.seed.map(|s| s.to_string()).unwrap_or_default(),
                    b.min_count.clone(),
                    b.max_count.clone(),
                ];
                row.extend(density_cols(&b.min_density));
                row.extend(density_cols(&b.max_density));
                row.push(scheme_json(&b.argmin));
                row.push(scheme_json(&b.argmax));
                row.push(
                    b.min_count_above_half_pk
                        .map(|v| v.to_string())
                        .unwrap_or_default(),
                );
                csv_rows(
                    &[
                        "k", "role", "interval_lo", "interval_hi", "strategy", "samples",
                        "seed", "min_count", "max_count", "min_num", "min_den", "min_float",
                        "max_num", "max_den", "max_float", "argmin", "argmax",
                        "min_count_above_half_pk",
                    ],
                    vec![row],
                )
            }
            Body::Goldbach(b) => csv_rows(
                &[
                    "x", "k", "includes_one", "c_k_x", "oracle_count",
                    "derived_lower_bound", "permitted_indices",
                ],
                vec![vec![
                    b.report.x.to_string(),
                    b.report.k.to_string(),
                    b.report.includes_one.to_string(),
                    b.report.c_k_x.to_string(),
                    b.report.oracle_count.to_string(),
                    b.report.derived_lower_bound.to_string(),
                    b.report
                        .permitted_indices
                        .iter()
                        .map(|n| n.to_string())
                        .collect::<Vec<_>>()
                        .join(" "),
                ]],
            ),
            Body::Scan(b) => csv_rows(
                &[
                    "x_lo", "x_hi", "stride", "reports", "min_c_k_x", "min_c_at_x",
                    "min_oracle", "min_oracle_at_x", "violations",
                ],
                vec![vec![
                    b.x_lo.to_string(),
                    b.x_hi.to_string(),
                    b.stride.to_string(),
                    b.reports.to_string(),
                    b.min_c_k_x.map(|m| m.value.to_string()).unwrap_or_default(),
                    b.min_c_k_x.map(|m| m.at_x.to_string()).unwrap_or_default(),
                    b.min_oracle_count
                        .map(|m| m.value.to_string())
                        .unwrap_or_default(),
                    b.min_oracle_count
                        .map(|m| m.at_x.to_string())
                        .unwrap_or_default(),
                    b.violations.len().to_string(),
                ]],
            ),
            Body::Verify(b) => csv_rows(
                &["suite", "outcome", "params", "witness"],
                vec![vec![
                    b.suite.clone(),
                    b.outcome.clone(),
                    serde_json::to_string(&b.params).expect("params serialize"),
                    b.witness
                        .as_ref()
                        .map(|w| w.to_string())
                        .unwrap_or_default(),
                ]],
            ),
            Body::SuiteList(b) => csv_rows(
                &["suite", "checks"],
                b.suites
                    .iter()
                    .map(|e| vec![e.suite.clone(), e.checks.clone()])
                    .collect(),
            ),
            Body::Bench(b) => csv_rows(
                &["k", "size", "count", "elapsed_ms", "indices_per_sec"],
                b.rows
                    .iter()
                    .map(|r| {
                        vec![
                            b.k.to_string(),
                            r.size.to_string(),
                            r.count.to_string(),
                            r.elapsed_ms.to_string(),
                            r.indices_per_sec.to_string(),
                        ]
                    })
                    .collect(),
            ),
        }
    }

    fn to_text(&self) -> String {
        match self {
            Body::Primes(b) => format!(
                "{} primes up to {}:\n{}\n",
                b.count,
                b.limit,
                join(&b.primes)
            ),
            Body::Scheme(s) => format!("{}\n", scheme_json(s)),
            Body::Count(b) => {
                let mut out = format!("permitted indices in [{}, {}]: {}\n", b.lo, b.hi, b.count);
                if let Some(naive) = b.naive_count {
                    out.push_str(&format!(
                        "reference scan: {} ({})\n",
                        naive,
                        if naive == b.count { "agree" } else { "MISMATCH" }
                    ));
                }
                out
            }
            Body::Enumerate(b) => format!(
                "{} permitted indices in [{}, {}]:\n{}\n",
                b.count,
                b.lo,
                b.hi,
                join(&b.indices)
            ),
            Body::PeriodDensity(b) => {
                let mut out = format!(
                    "period density at level {}: {}/{} = {}\n",
                    b.k,
                    b.delta.numerator(),
                    b.delta.denominator(),
                    b.delta.to_f64()
                );
                if let Some(eq) = b.product_form_equal {
                    out.push_str(&format!(
                        "telescoped product form agrees: {}\n",
                        if eq { "yes" } else { "NO" }
                    ));
                }
                out
            }
            Body::MeasuredDensity(b) => format!(
                "measured density over [{}, {}] at level {}: count {} -> {}/{} = {}\n",
                b.lo,
                b.hi,
                b.k,
                b.count,
                b.density.numerator(),
                b.density.denominator(),
                b.density.to_f64()
            ),
            Body::IntervalBounds(b) => format!(
                "density bounds over [1, {}] at level {}:\n  lower {}/{} = {}\n  upper {}/{} = {}\n",
                b.n,
                b.k,
                b.lower.numerator(),
                b.lower.denominator(),
                b.lower.to_f64(),
                b.upper.numerator(),
                b.upper.denominator(),
                b.upper.to_f64()
            ),
            Body::RightBounds(b) => format!(
                "right-interval density envelope for level {} in frame {}:\n  lower {}/{} = {}\n  upper {}/{} = {}\n",
                b.h,
                b.k,
                b.lower.numerator(),
                b.lower.denominator(),
                b.lower.to_f64(),
                b.upper.numerator(),
                b.upper.denominator(),
                b.upper.to_f64()
            ),
            Body::Survey(b) => format!(
                "mean density over [{}, {}] at level {} ({}, {} schemes): {}/{} = {}\n",
                b.lo,
                b.hi,
                b.k,
                b.strategy,
                b.samples,
                b.mean_density.numerator(),
                b.mean_density.denominator(),
                b.mean_density.to_f64()
            ),
            Body::Extrema(b) => {
                let mut out = format!(
                    "extrema over [{}, {}] at level {} ({}, {} schemes):\n  min count {} density {}\n  max count {} density {}\n",
                    b.interval_lo,
                    b.interval_hi,
                    b.k,
                    b.strategy,
                    b.samples,
                    b.min_count,
                    b.min_density.to_f64(),
                    b.max_count,
                    b.max_density.to_f64()
                );
                if let (Some(a), Some(bt)) = (&b.alpha_hat, &b.beta_hat) {
                    out.push_str(&format!(
                        "  fitted envelope coefficients vs level {}: alpha {} beta {}\n",
                        b.reference_level.unwrap_or_default(),
                        a.to_f64(),
                        bt.to_f64()
                    ));
                }
                if let Some(flag) = b.min_count_above_half_pk {
                    out.push_str(&format!("  min count exceeds half the top prime: {flag}\n"));
                }
                if let Some(cx) = &b.counterexample {
                    out.push_str(&format!("  counterexample: {}\n", scheme_json(cx)));
                }
                out
            }
            Body::Goldbach(b) => {
                let r = &b.report;
                let mut out = format!(
                    "x = {}: {} permitted indices in (1, x), index 1 permitted: {}\n  c = {} over [1, x]; oracle partitions {}; derived lower bound {}\n  indices: {}\n",
                    r.x,
                    r.permitted_indices.len(),
                    r.includes_one,
                    r.c_k_x,
                    r.oracle_count,
                    r.derived_lower_bound,
                    join(&r.permitted_indices)
                );
                if let Some(pairs) = &b.pairs {
                    let rendered: Vec<String> =
                        pairs.iter().map(|(p, q)| format!("{p}+{q}")).collect();
                    out.push_str(&format!("  partitions: {}\n", rendered.join(" ")));
                }
                out
            }
            Body::Scan(b) => {
                let mut out = format!(
                    "scanned {} even numbers in [{}, {}] (stride {})\n",
                    b.reports, b.x_lo, b.x_hi, b.stride
                );
                if let Some(m) = b.min_c_k_x {
                    out.push_str(&format!("  min candidate count {} at x = {}\n", m.value, m.at_x));
                }
                if let Some(m) = b.min_oracle_count {
                    out.push_str(&format!("  min partition count {} at x = {}\n", m.value, m.at_x));
                }
                if b.violations.is_empty() {
                    out.push_str("  no violations\n");
                } else {
                    out.push_str(&format!("  {} VIOLATIONS:\n", b.violations.len()));
                    for v in b.violations.iter().take(10) {
                        out.push_str(&format!("    x={} {}: {}\n", v.x, v.kind, v.detail));
                    }
                }
                out
            }
            Body::Verify(b) => {
                let mut out = format!("suite {}: {}\n", b.suite, b.outcome);
                for (key, value) in &b.params {
                    out.push_str(&format!("  {key} = {value}\n"));
                }
                if let Some(w) = &b.witness {
                    out.push_str(&format!("  witness: {w}\n"));
                }
                if let Some(d) = &b.detail {
                    out.push_str(&format!("  detail: {d}\n"));
                }
                out
            }
            Body::SuiteList(b) => {
                let mut out = String::from("available suites:\n");
                for e in &b.suites {
                    out.push_str(&format!("  {:<18} {}\n", e.suite, e.checks));
                }
                out
            }
            Body::Bench(b) => {
                let mut out = format!("counting throughput at level {}:\n", b.k);
                for r in &b.rows {
                    out.push_str(&format!(
                        "  [1, {:>12}]: {} permitted, {:.1} ms, {:.1} M indices/s\n",
                        r.size,
                        r.count,
                        r.elapsed_ms,
                        r.indices_per_sec / 1e6
                    ));
                }
                out
            }
        }
    }
}

fn join(values: &[u64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Per-x stream line ahead of a scan summary.
pub fn render_stream_report(report: &PartitionReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                report.x.to_string(),
                report.k.to_string(),
                report.includes_one.to_string(),
                report.c_k_x.to_string(),
                report.oracle_count.to_string(),
                report.derived_lower_bound.to_string(),
            ])
            .expect("csv row");
            String::from_utf8(w.into_inner().expect("csv buffer")).expect("csv utf8")
        }
        Format::Text => format!(
            "x={} k={} c={} g={} bound={}\n",
            report.x, report.k, report.c_k_x, report.oracle_count, report.derived_lower_bound
        ),
    }
}

/// Header line for the csv scan stream.
pub fn stream_csv_header() -> String {
    "x,k,includes_one,c_k_x,oracle_count,derived_lower_bound\n".to_string()
}
