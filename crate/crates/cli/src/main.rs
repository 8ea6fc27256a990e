mod cli;
mod commands;
mod output;
mod record;
mod suites;

use std::fs::File;
use std::io::Write;
use std::time::Instant;

use clap::Parser;

use crate::cli::Cli;
use crate::record::VerificationRecord;

fn main() {
    let args = Cli::parse();
    let code = match run(args) {
        Ok(code) => code,
        Err(err) if is_broken_pipe(&err) => 0,
        Err(err) => {
            eprintln!("error: {err:#}");
            2
        }
    };
    std::process::exit(code);
}

fn is_broken_pipe(err: &anyhow::Error) -> bool {
    err.chain().any(|cause| {
        cause
            .downcast_ref::<std::io::Error>()
            .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
    })
}

fn run(args: Cli) -> anyhow::Result<i32> {
    let threads = args.global.threads;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads) // 0 keeps rayon's own default
        .build_global()
        .ok();

    let mut writer: Box<dyn Write> = match &args.global.out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(std::io::stdout().lock()),
    };

    let started = Instant::now();
    let result = commands::execute(&args.command, &args.global, writer.as_mut())?;
    let elapsed_ms = started.elapsed().as_secs_f64() * 1e3;

    writer.write_all(result.rendered.as_bytes())?;
    writer.flush()?;

    if let Some(log) = &args.global.log {
        record::append(
            log,
            &VerificationRecord {
                suite: result.suite.clone(),
                params: result.params.clone(),
                outcome: result.outcome.clone(),
                elapsed_ms,
                version: env!("CARGO_PKG_VERSION").to_string(),
                timestamp: chrono::Utc::now().to_rfc3339(),
            },
        )?;
    }

    Ok(result.outcome.exit_code())
}
