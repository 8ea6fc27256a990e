use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::time::Instant;

use anyhow::{bail, Context};

use goldsieve_core::analytics::{
    average_density_survey, delta_period, delta_product_form, interval_density,
    interval_density_bounds, right_density_bounds, IntervalRole,
};
use goldsieve_core::goldbach::{goldbach_oracle, scan_range, ScanEngine};
use goldsieve_core::perm_sieve::{
    count_permitted_naive, count_permitted_with, enumerate_permitted, IntervalSpec,
};
use goldsieve_core::prime_basis::primes_up_to;
use goldsieve_core::selection::SchemeStrategy;
use goldsieve_core::SelectionScheme;

use crate::cli::{Command, Engine, Format, GlobalOpts, Role};
use crate::output::{
    render_stream_report, stream_csv_header, Body, BenchBody, BenchRow, CommandResult, CountBody,
    EnumerateBody, GoldbachBody, IntervalBoundsBody, MeasuredDensityBody, PeriodDensityBody,
    PrimesBody, RightBoundsBody, SurveyBody,
};
use crate::record::Outcome;
use crate::suites;

pub fn execute(
    command: &Command,
    global: &GlobalOpts,
    stream: &mut dyn Write,
) -> anyhow::Result<CommandResult> {
    match command {
        Command::Primes { limit } => {
            let primes = primes_up_to(*limit)?;
            let params = params(&[("limit", limit.to_string())]);
            Ok(result(
                "primes",
                params,
                Outcome::ReportOnly,
                Body::Primes(PrimesBody {
                    limit: *limit,
                    count: primes.len(),
                    primes,
                }),
                global.format,
            ))
        }

        Command::Scheme { x, k, residues, draw } => {
            let scheme = build_scheme(global, *x, *k, residues.as_deref(), *draw)?;
            let params = params(&[("scheme", serde_json::to_string(&scheme)?)]);
            Ok(result(
                "scheme",
                params,
                Outcome::ReportOnly,
                Body::Scheme(scheme),
                global.format,
            ))
        }

        Command::Count { scheme, from, to, naive } => {
            let scheme = load_scheme(scheme)?;
            let interval = IntervalSpec::new(*from, *to)?;
            let count = count_permitted_with(&scheme, interval, global.segment_size);
            let naive_count = naive.then(|| count_permitted_naive(&scheme, interval));
            let outcome = match naive_count {
                None => Outcome::ReportOnly,
                Some(n) if n == count => Outcome::Pass,
                Some(n) => Outcome::Fail {
                    witness: serde_json::json!({
                        "scheme": scheme,
                        "interval": [from, to],
                        "expected": n.to_string(),
                        "actual": count.to_string(),
                    }),
                },
            };
            let params = params(&[
                ("from", from.to_string()),
                ("to", to.to_string()),
                ("naive", naive.to_string()),
            ]);
            Ok(result(
                "count",
                params,
                outcome,
                Body::Count(CountBody {
                    scheme,
                    lo: *from,
                    hi: *to,
                    count,
                    naive_count,
                }),
                global.format,
            ))
        }

        Command::Enumerate { scheme, from, to } => {
            let scheme = load_scheme(scheme)?;
            let interval = IntervalSpec::new(*from, *to)?;
            let indices = enumerate_permitted(&scheme, interval, global.enum_cap)?;
            let params = params(&[("from", from.to_string()), ("to", to.to_string())]);
            Ok(result(
                "enumerate",
                params,
                Outcome::ReportOnly,
                Body::Enumerate(EnumerateBody {
                    scheme,
                    lo: *from,
                    hi: *to,
                    count: indices.len() as u64,
                    indices,
                }),
                global.format,
            ))
        }

        Command::Density { k, scheme, from, to } => match scheme {
            None => {
                let delta = delta_period(*k)?;
                let product_form_equal = if *k >= 2 {
                    Some(delta_product_form(*k)? == delta)
                } else {
                    None
                };
                let params = params(&[("k", k.to_string())]);
                Ok(result(
                    "density",
                    params,
                    Outcome::ReportOnly,
                    Body::PeriodDensity(PeriodDensityBody {
                        k: *k,
                        delta,
                        product_form_equal,
                    }),
                    global.format,
                ))
            }
            Some(scheme) => {
                let scheme = load_scheme(scheme)?;
                let (from, to) = (from.expect("clap requires"), to.expect("clap requires"));
                let interval = IntervalSpec::new(from, to)?;
                let count = count_permitted_with(&scheme, interval, global.segment_size);
                let p_k = scheme.basis().last_prime();
                let density = interval_density(count, interval, p_k);
                let params = params(&[
                    ("k", k.to_string()),
                    ("from", from.to_string()),
                    ("to", to.to_string()),
                ]);
                Ok(result(
                    "density",
                    params,
                    Outcome::ReportOnly,
                    Body::MeasuredDensity(MeasuredDensityBody {
                        k: scheme.k(),
                        lo: from,
                        hi: to,
                        count,
                        density,
                    }),
                    global.format,
                ))
            }
        },

        Command::Bounds { k, n, h } => match (n, h) {
            (Some(n), None) => {
                let (lower, upper) = interval_density_bounds(*k, *n)?;
                let params = params(&[("k", k.to_string()), ("n", n.to_string())]);
                Ok(result(
                    "bounds",
                    params,
                    Outcome::ReportOnly,
                    Body::IntervalBounds(IntervalBoundsBody {
                        k: *k,
                        n: *n,
                        lower,
                        upper,
                    }),
                    global.format,
                ))
            }
            (None, Some(h)) => {
                let (lower, upper) = right_density_bounds(*h, *k)?;
                let params = params(&[("k", k.to_string()), ("h", h.to_string())]);
                Ok(result(
                    "bounds",
                    params,
                    Outcome::ReportOnly,
                    Body::RightBounds(RightBoundsBody {
                        h: *h,
                        k: *k,
                        lower,
                        upper,
                    }),
                    global.format,
                ))
            }
            _ => bail!("bounds requires exactly one of --n (interval sandwich) or --h (right envelope)"),
        },

        Command::Survey { k, from, to, exhaustive, samples } => {
            let strategy = make_strategy(*exhaustive, *samples, global.seed)?;
            let interval = IntervalSpec::new(*from, *to)?;
            let mean = average_density_survey(*k, interval, strategy, global.exhaustive_cap)?;
            let (name, n, seed) = strategy_fields(strategy, global.exhaustive_cap, *k)?;
            let params = params(&[
                ("k", k.to_string()),
                ("from", from.to_string()),
                ("to", to.to_string()),
                ("strategy", name.to_string()),
                ("samples", n.to_string()),
            ]);
            Ok(result(
                "survey",
                params,
                Outcome::ReportOnly,
                Body::Survey(SurveyBody {
                    k: *k,
                    lo: *from,
                    hi: *to,
                    strategy: name.to_string(),
                    samples: n,
                    seed,
                    mean_density: mean,
                }),
                global.format,
            ))
        }

        Command::Extrema { k, role, exhaustive, samples, ref_h } => {
            let strategy = make_strategy(*exhaustive, *samples, global.seed)?;
            let role = match role {
                Role::Left => IntervalRole::Left,
                Role::Right => IntervalRole::Right,
            };
            let report = goldsieve_core::analytics::extrema_survey(
                *k,
                role,
                strategy,
                *ref_h,
                global.exhaustive_cap,
            )?;
            let params = params(&[
                ("k", k.to_string()),
                ("role", format!("{role:?}").to_lowercase()),
                ("strategy", report.strategy.clone()),
                ("samples", report.samples.to_string()),
            ]);
            Ok(result(
                "extrema",
                params,
                Outcome::ReportOnly,
                Body::Extrema(report),
                global.format,
            ))
        }

        Command::Goldbach { x, pairs } => {
            let mut captured = None;
            let summary = scan_range(*x, *x, 2, ScanEngine::ResidueSieve, |r| {
                captured = Some(r.clone());
            })?;
            let report = captured.expect("single-x scan yields one report");
            let pairs = pairs
                .then(|| goldbach_oracle(*x).map(|(_, pairs)| pairs))
                .transpose()?;
            let outcome = if summary.violations.is_empty() {
                Outcome::Pass
            } else {
                Outcome::Fail {
                    witness: serde_json::to_value(&summary.violations)?,
                }
            };
            let params = params(&[("x", x.to_string())]);
            Ok(result(
                "goldbach",
                params,
                outcome,
                Body::Goldbach(GoldbachBody { report, pairs }),
                global.format,
            ))
        }

        Command::Scan { from, to, stride, engine, reports } => {
            let engine = match engine {
                Engine::Fast => ScanEngine::FactorTable,
                Engine::Sieve => ScanEngine::ResidueSieve,
            };
            if *reports && global.format == Format::Csv {
                stream.write_all(stream_csv_header().as_bytes())?;
            }
            let mut stream_error = None;
            let summary = scan_range(*from, *to, *stride, engine, |report| {
                if *reports && stream_error.is_none() {
                    let line = render_stream_report(report, global.format);
                    if let Err(e) = stream.write_all(line.as_bytes()) {
                        stream_error = Some(e);
                    }
                }
            })?;
            if let Some(e) = stream_error {
                return Err(e).context("writing scan stream");
            }
            let outcome = if summary.violations.is_empty() {
                Outcome::Pass
            } else {
                Outcome::Fail {
                    witness: serde_json::to_value(&summary.violations)?,
                }
            };
            let params = params(&[
                ("from", from.to_string()),
                ("to", to.to_string()),
                ("stride", stride.to_string()),
            ]);
            Ok(result("scan", params, outcome, Body::Scan(summary), global.format))
        }

        Command::Verify { suite, list, k, samples, from, to } => {
            if *list {
                return Ok(result(
                    "verify",
                    BTreeMap::new(),
                    Outcome::ReportOnly,
                    Body::SuiteList(suites::list_body()),
                    global.format,
                ));
            }
            let id = suite.as_deref().expect("clap enforces --suite without --list");
            let request = suites::SuiteRequest {
                k: *k,
                samples: *samples,
                from: *from,
                to: *to,
                seed: global.seed,
                exhaustive_cap: global.exhaustive_cap,
            };
            let run = suites::run_suite(id, &request)?;
            let outcome = run.outcome.clone();
            Ok(result(
                &format!("verify:{id}"),
                run.params.clone(),
                outcome,
                Body::Verify(run.into_body(id)),
                global.format,
            ))
        }

        Command::Bench { k, sizes } => {
            let sizes: Vec<u64> = sizes
                .split(',')
                .map(|s| s.trim().parse::<u64>().context("bad --sizes entry"))
                .collect::<anyhow::Result<_>>()?;
            let basis = std::sync::Arc::new(goldsieve_core::PrimeBasis::first_k(*k)?);
            let scheme = goldsieve_core::selection::sampled_scheme(&basis, global.seed, 0);
            let mut rows = Vec::new();
            for &size in &sizes {
                let interval = IntervalSpec::new(1, size)?;
                let start = Instant::now();
                let count = count_permitted_with(&scheme, interval, global.segment_size);
                let elapsed = start.elapsed();
                rows.push(BenchRow {
                    size,
                    count,
                    elapsed_ms: elapsed.as_secs_f64() * 1e3,
                    indices_per_sec: size as f64 / elapsed.as_secs_f64(),
                });
            }
            let params = params(&[("k", k.to_string()), ("sizes", format!("{sizes:?}"))]);
            Ok(result(
                "bench",
                params,
                Outcome::ReportOnly,
                Body::Bench(BenchBody { k: *k, rows }),
                global.format,
            ))
        }
    }
}

fn result(
    suite: &str,
    params: BTreeMap<String, String>,
    outcome: Outcome,
    body: Body,
    format: Format,
) -> CommandResult {
    CommandResult {
        rendered: body.render(format),
        suite: suite.to_string(),
        params,
        outcome,
    }
}

fn params(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

fn build_scheme(
    global: &GlobalOpts,
    x: Option<u64>,
    k: Option<usize>,
    residues: Option<&str>,
    draw: Option<u64>,
) -> anyhow::Result<SelectionScheme> {
    match (x, k) {
        (Some(x), None) => Ok(SelectionScheme::for_even(x)?),
        (None, Some(k)) => {
            let basis = std::sync::Arc::new(goldsieve_core::PrimeBasis::first_k(k)?);
            match (residues, draw) {
                (Some(json), None) => {
                    let residues: Vec<Vec<u32>> =
                        serde_json::from_str(json).context("parsing --residues")?;
                    Ok(SelectionScheme::generic(basis, &residues)?)
                }
                (None, draw) => Ok(goldsieve_core::selection::sampled_scheme(
                    &basis,
                    global.seed,
                    draw.unwrap_or(0),
                )),
                (Some(_), Some(_)) => bail!("--residues and --draw are mutually exclusive"),
            }
        }
        _ => bail!("scheme requires exactly one of --x or --k"),
    }
}

fn load_scheme(arg: &str) -> anyhow::Result<SelectionScheme> {
    let text = if arg == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        buf
    } else if let Some(path) = arg.strip_prefix('@') {
        std::fs::read_to_string(path).with_context(|| format!("reading scheme file {path}"))?
    } else {
        arg.to_string()
    };
    serde_json::from_str(&text).context("parsing scheme JSON")
}

fn make_strategy(
    exhaustive: bool,
    samples: Option<u64>,
    seed: u64,
) -> anyhow::Result<SchemeStrategy> {
    match (exhaustive, samples) {
        (true, None) => Ok(SchemeStrategy::Exhaustive),
        (false, Some(count)) => Ok(SchemeStrategy::Sample { count, seed }),
        (false, None) => bail!("choose --exhaustive or --samples N"),
        (true, Some(_)) => unreachable!("clap conflicts_with"),
    }
}

fn strategy_fields(
    strategy: SchemeStrategy,
    cap: u64,
    k: usize,
) -> anyhow::Result<(&'static str, u64, Option<u64>)> {
    Ok(match strategy {
        SchemeStrategy::Exhaustive => {
            let basis = goldsieve_core::PrimeBasis::first_k(k)?;
            let total = goldsieve_core::selection::exhaustive_total(&basis, cap)?;
            ("exhaustive", total, None)
        }
        SchemeStrategy::Sample { count, seed } => ("sample", count, Some(seed)),
    })
}
