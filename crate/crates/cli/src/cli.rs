use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "goldsieve",
    version,
    about = "Residue-tuple sieves: schemes, permitted-index counting, density analytics, and partition scans",
    propagate_version = true
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct GlobalOpts {
    /// Seed for every sampled operation; fixed default keeps bare
    /// invocations reproducible
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads (0 = all cores). Report bytes do not depend on this.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,

    /// Output format for the primary report
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Write the primary report here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Append a verification record (JSONL) for this invocation
    #[arg(long, global = true)]
    pub log: Option<PathBuf>,

    /// Refuse exhaustive walks past this many combinations
    #[arg(long, global = true, env = "GOLDSIEVE_EXHAUSTIVE_CAP", default_value_t = 10_000_000)]
    pub exhaustive_cap: u64,

    /// Refuse enumerations past this many indices
    #[arg(long, global = true, env = "GOLDSIEVE_ENUM_CAP", default_value_t = 1_000_000)]
    pub enum_cap: u64,

    /// Segment size (indices per block) for the sieve kernels
    #[arg(long, global = true, env = "GOLDSIEVE_SEGMENT_SIZE", default_value_t = 1 << 20)]
    pub segment_size: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the primes up to a limit
    Primes {
        #[arg(long)]
        limit: u64,
    },

    /// Construct and print a scheme in canonical JSON
    Scheme {
        /// Even number for the associated scheme
        #[arg(long, conflicts_with_all = ["k", "residues", "draw"])]
        x: Option<u64>,
        /// Level for a generic scheme
        #[arg(long)]
        k: Option<usize>,
        /// Selected residues per level as JSON, e.g. [[0],[0,2],[0,3],[3,5]]
        #[arg(long, requires = "k", conflicts_with = "draw")]
        residues: Option<String>,
        /// Sample the scheme with this draw index under --seed
        #[arg(long, requires = "k")]
        draw: Option<u64>,
    },

    /// Count permitted indices of a scheme over an interval
    Count {
        /// Scheme JSON, @file, or - for stdin
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
        /// Also run the per-index reference scan and compare
        #[arg(long)]
        naive: bool,
    },

    /// List permitted indices of a scheme over an interval
    Enumerate {
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
    },

    /// Period density at a level, or measured density with --scheme
    Density {
        #[arg(long)]
        k: usize,
        #[arg(long, requires_all = ["from", "to"])]
        scheme: Option<String>,
        #[arg(long)]
        from: Option<u64>,
        #[arg(long)]
        to: Option<u64>,
    },

    /// Density bounds: interval sandwich (--n) or right-interval envelope (--h)
    Bounds {
        #[arg(long)]
        k: usize,
        /// Interval end for the sandwich over [1, n]
        #[arg(long, conflicts_with = "h")]
        n: Option<u64>,
        /// Reference level for the right-interval envelope
        #[arg(long)]
        h: Option<usize>,
    },

    /// Average measured density over schemes
    Survey {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
        /// Visit every combination (subject to the cap)
        #[arg(long, conflicts_with = "samples")]
        exhaustive: bool,
        /// Number of sampled schemes
        #[arg(long)]
        samples: Option<u64>,
    },

    /// Min/max density over one side of the period split
    Extrema {
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum)]
        role: Role,
        #[arg(long, conflicts_with = "samples")]
        exhaustive: bool,
        #[arg(long)]
        samples: Option<u64>,
        /// Also survey this reference level and fit envelope coefficients
        #[arg(long)]
        ref_h: Option<usize>,
    },

    /// Partition report for one even number
    Goldbach {
        #[arg(long)]
        x: u64,
        /// Include the oracle's partition pairs
        #[arg(long)]
        pairs: bool,
    },

    /// Scan a range of even numbers and summarize
    Scan {
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
        #[arg(long, default_value_t = 2)]
        stride: u64,
        #[arg(long, value_enum, default_value_t = Engine::Fast)]
        engine: Engine,
        /// Stream every per-x report before the summary
        #[arg(long)]
        reports: bool,
    },

    /// Run a named verification suite
    Verify {
        /// Suite id; see --list
        #[arg(long, required_unless_present = "list")]
        suite: Option<String>,
        /// List available suites
        #[arg(long)]
        list: bool,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        from: Option<u64>,
        #[arg(long)]
        to: Option<u64>,
    },

    /// Measure counting throughput (results logged, never asserted)
    Bench {
        #[arg(long, default_value_t = 35)]
        k: usize,
        /// Comma-separated interval sizes
        #[arg(long, default_value = "1000000,10000000,100000000")]
        sizes: String,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Role {
    Left,
    Right,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    /// Factor-rank tables (default)
    Fast,
    /// Segmented residue sieve per x
    Sieve,
}
