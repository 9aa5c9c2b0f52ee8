use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

/// Membership, extreme-point classification and free-extreme decomposition
/// for free spectrahedra `{X : I - sum A_j ⊗ X_j ⪰ 0}`.
///
/// Sets: cube:g, ball:g, mdg:d,g, pauli, or a pencil JSON file ({"A": tuple}).
/// Points: pauli, zero:n, random:n, boundary:n, interior:n, or a tuple JSON
/// file (a JSON array of tuples is processed as a batch).
#[derive(Debug, Parser)]
#[command(name = "freespec", version, about, long_about = None)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Named set or pencil JSON file.
    #[arg(long, global = true)]
    pub set: Option<String>,

    /// Named point, random:n, or tuple JSON file.
    #[arg(long, global = true)]
    pub point: Option<String>,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Absolute PSD slack.
    #[arg(long = "tol-feas", global = true)]
    pub tol_feas: Option<f64>,

    /// Relative kernel threshold.
    #[arg(long = "tol-ker", global = true)]
    pub tol_ker: Option<f64>,

    /// Write JSON here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads for batch point files.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,

    /// Debug logging on stderr, including solver traces as JSON lines.
    #[arg(long, short, global = true)]
    pub verbose: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Is the point in the free spectrahedron? Emits status, min_eig, kernel_dim.
    Member,
    /// Classical, matrix and free extreme-point tests.
    Classify {
        /// Assume the set is closed under complex conjugation.
        #[arg(long)]
        conj_closed: bool,
    },
    /// Matrix convex combination of free extreme points.
    Decompose {
        /// Split a reducible point into irreducible blocks first.
        #[arg(long)]
        presplit: bool,
    },
    /// Is the point in the matrix convex hull of the set's coefficients?
    MconvMember,
    /// Sampled check that the point lies in the polar dual.
    DualCheck {
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Print the pencil of a named set.
    Example,
    /// Print point tuples (pass --point random:n or similar).
    Sample {
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Randomized falsifiers.
    Oracle {
        #[arg(value_enum)]
        kind: OracleKind,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        /// Combination JSON file (for `verify`).
        #[arg(long)]
        combination: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OracleKind {
    /// Search for a nontrivial one-step dilation.
    Dilation,
    /// Search for a proper matrix convex combination (n <= 3).
    Refute,
    /// Check a combination file against the point.
    Verify,
}
