//! `turb`: validate, analyse, subdivide, envelope, convert and draw framed
//! turbulence charts. Reports are JSON on stdout; exit status 0 means
//! success, 1 a failed verification, 2 a usage or input error.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "turb", version, about = "Framed turbulence charts and their flow polyhedra")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Most times a trail may use one edge when bundles are enumerated.
    #[arg(long, global = true, default_value_t = 2)]
    pub cap: usize,
    /// Random probe points for `subdivide`.
    #[arg(long, global = true, default_value_t = 64)]
    pub samples: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Cross-check against the brute-force polyhedral oracle.
    #[arg(long, global = true)]
    pub oracle: bool,
    /// Write the drawing or converted output here (the report otherwise) instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Include wall-clock timings; this makes reports run-dependent.
    #[arg(long, global = true)]
    pub timings: bool,
    /// Worker threads for library-level parallelism.
    #[arg(long, global = true, env = "TURB_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Chart,
    Digraph,
    Algebra,
    Signed,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and validate a chart file (`-` reads stdin).
    Validate { input: PathBuf },
    /// Fullness, directability, acyclicity, steepness and gentleness.
    Classify { input: PathBuf },
    /// Vertices and rays from elementary trails.
    Present { input: PathBuf },
    /// Check the clique triangulation of an acyclic chart.
    Triangulate { input: PathBuf },
    /// Check the capped bundle subdivision with random probes.
    Subdivide { input: PathBuf },
    /// Write a flow as a combination of trails of one bundle.
    Decompose {
        input: PathBuf,
        /// Edge values such as `e=1,f=2/3`; unlisted edges are zero.
        #[arg(long)]
        flow: String,
    },
    /// Build a gentle envelope and verify its round trip.
    Envelope { input: PathBuf },
    /// Convert between charts, framed digraphs, fringed algebras and signed graphs.
    Convert {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Kind::Chart)]
        from: Kind,
        #[arg(long, value_enum)]
        to: Kind,
    },
    /// Draw the polyhedron and its cells: SVG up to dimension 2, OBJ in dimension 3.
    Render { input: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("turb: cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    // Library invariants are asserted with panics; surface any as an input error.
    std::panic::set_hook(Box::new(|info| eprintln!("turb: internal error: {info}")));
    match std::panic::catch_unwind(|| commands::run(&cli)) {
        Ok(code) => ExitCode::from(code),
        Err(_) => ExitCode::from(2),
    }
}
