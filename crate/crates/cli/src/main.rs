//! ffrank: exact tensor-rank computations over finite fields.
//!
//! Exit codes: 0 success, 2 guard/budget exceeded or estimate inconclusive,
//! 3 certificate/identity verification failure, 4 audited inequality
//! violated, 1 other errors.

mod commands;
mod report;

use clap::{Parser, Subcommand};
use commands::{CmdError, Ctx, RankKind};
use ffrank::Error as CoreError;
use report::Format;

#[derive(Parser)]
#[command(name = "ffrank", version, about = "Exact tensor ranks over finite fields")]
struct Cli {
    /// Worker threads for the counting kernels (default: all cores).
    /// Exact report fields do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Point budget for enumeration kernels (cap on q^m).
    #[arg(long, global = true, default_value_t = 1u64 << 34)]
    budget: u64,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Analytic rank of a tensor file (exact zero count).
    Ar {
        file: String,
        /// 1-based mode to contract away (default: last).
        #[arg(long)]
        mode: Option<usize>,
        /// Also run the independent character-sum route and report the
        /// discrepancy.
        #[arg(long)]
        char_check: bool,
    },
    /// Geometric-rank estimate through an extension tower.
    Gr {
        file: String,
        #[arg(long)]
        mode: Option<usize>,
        /// Tower height (needs >= 2).
        #[arg(long)]
        lmax: usize,
    },
    /// Exact slice/partition/cp-rank and subrank witnesses.
    Rank {
        file: String,
        #[arg(long, value_enum)]
        kind: Option<RankKind>,
        /// Search a witness for Id_s ⪯ T.
        #[arg(long)]
        subrank: Option<usize>,
    },
    /// Base-change stability: verifies the exact extension identity
    /// l * AR over GF(q^l) = AR of the Kronecker view over GF(q).
    Stability {
        file: String,
        /// Extension degree.
        #[arg(long)]
        l: usize,
    },
    /// Analytic/geometric rank table for the n x n matrix multiplication
    /// tensor over GF(q^l), l = 1..lmax.
    MatmulTable {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        lmax: usize,
        #[arg(long, default_value_t = 2)]
        q: u64,
    },
    /// Seeded random audit of the rank identities and inequalities.
    Audit {
        /// Tensor shape, comma separated (e.g. 2,2,2).
        #[arg(long)]
        shape: String,
        #[arg(long, default_value_t = 2)]
        q: u64,
        /// Number of sampled instances.
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Slice rank of a tensor subspace from a basis-list file; optionally
    /// SR_k and the T_W construction.
    Subspace {
        file: String,
        /// Dimension k for SR_k(W).
        #[arg(long)]
        k: Option<usize>,
        /// Build T_W and verify SR(T_W) = SR(W).
        #[arg(long)]
        tw: bool,
    },
}

fn parse_shape(s: &str) -> Result<Vec<usize>, CmdError> {
    let v: Result<Vec<usize>, _> = s.split(',').map(|p| p.trim().parse::<usize>()).collect();
    match v {
        Ok(shape) if shape.len() >= 2 => Ok(shape),
        _ => Err(CmdError::Core(CoreError::InvalidInput(format!(
            "bad shape '{s}': expected comma-separated dimensions, order >= 2"
        )))),
    }
}

fn main() {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        pool = pool.num_threads(t);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    };
    let command = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let ctx = Ctx {
        budget: cli.budget as u128,
        threads: pool.current_num_threads(),
        command,
    };
    let result = pool.install(|| match &cli.cmd {
        Cmd::Ar { file, mode, char_check } => commands::cmd_ar(&ctx, file, *mode, *char_check),
        Cmd::Gr { file, mode, lmax } => commands::cmd_gr(&ctx, file, *mode, *lmax),
        Cmd::Rank { file, kind, subrank } => commands::cmd_rank(&ctx, file, *kind, *subrank),
        Cmd::Stability { file, l } => commands::cmd_stability(&ctx, file, *l),
        Cmd::MatmulTable { n, lmax, q } => commands::cmd_matmul_table(&ctx, *n, *lmax, *q),
        Cmd::Audit { shape, q, count, seed } => {
            let shape = parse_shape(shape)?;
            commands::cmd_audit(&ctx, &shape, *q, *count, *seed)
        }
        Cmd::Subspace { file, k, tw } => commands::cmd_subspace(&ctx, file, *k, *tw),
    });
    match result {
        Ok(report) => {
            println!("{}", report.emit(cli.format));
        }
        Err(CmdError::AuditViolation(dump)) => {
            eprintln!(
                "audit violation:\n{}",
                serde_json::to_string_pretty(&dump).unwrap_or_default()
            );
            std::process::exit(4);
        }
        Err(CmdError::Io(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(1);
        }
        Err(CmdError::Core(e)) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code(&e));
        }
    }
}

fn exit_code(e: &CoreError) -> i32 {
    match e {
        CoreError::GuardExceeded(_)
        | CoreError::BudgetExceeded { .. }
        | CoreError::Inconclusive { .. }
        | CoreError::FieldTooLarge(..) => 2,
        CoreError::VerificationFailed(_) => 3,
        _ => 1,
    }
}
