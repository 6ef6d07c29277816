use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use girthforge::classify::classify_phi31;
use girthforge::construct::{self, Family, Phi31Params};
use girthforge::report::{self, strip_timing};
use girthforge::search::{self, Mode, PruneConfig, SearchError, SearchParams};
use girthforge::verify::{self, Tier};
use girthforge::{arclist, ClassSpec, Digraph};

const EXIT_VERIFY: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "girthforge", version, about = "Extremal strong digraphs without short cycles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a named digraph and write it in arclist format.
    Construct {
        #[command(subcommand)]
        what: ConstructCmd,
    },
    /// Report girth, strongness, degrees, gamma and class membership of a file.
    Check {
        file: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long = "min-outdeg", default_value_t = 1)]
        xi: usize,
        #[arg(long = "min-indeg", default_value_t = 1)]
        zeta: usize,
    },
    /// Classify an extremal member of D_n^3(1,1) into its family.
    Classify { file: PathBuf },
    /// Exact, witness or emptiness search.
    Search(SearchArgs),
    /// Run the acceptance criteria and print a pass/fail table.
    VerifyTheorems {
        #[arg(long, value_enum, default_value_t = TierArg::Fast)]
        tier: TierArg,
        #[arg(long, env = "GIRTHFORGE_WORKERS", default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print a JSON report instead of the table.
        #[arg(long)]
        json: bool,
        #[arg(long)]
        no_timing: bool,
    },
}

#[derive(Subcommand)]
enum ConstructCmd {
    /// Circulant digraph C_n(S).
    Circulant {
        #[arg(long)]
        n: usize,
        /// Comma-separated jumps.
        #[arg(long, value_delimiter = ',', required = true)]
        jumps: Vec<usize>,
        out: Option<PathBuf>,
    },
    /// The 8-vertex digraph F_8.
    F8 { out: Option<PathBuf> },
    /// A strong tournament on n vertices.
    Tournament {
        #[arg(long)]
        n: usize,
        out: Option<PathBuf>,
    },
    /// A member of one of the families D1..D5.
    Phi31 {
        #[arg(long)]
        family: Option<String>,
        /// Comma-separated component orders n_1,...,n_h.
        #[arg(long, value_delimiter = ',')]
        orders: Vec<usize>,
        /// Middle roles, one letter each: Y (into hub), X (from hub), N (none).
        #[arg(long)]
        roles: Option<String>,
        /// Full compact parameter string, e.g. "family=D2 orders=4,1,1,5 roles=YN".
        #[arg(long, conflicts_with_all = ["family", "orders", "roles"])]
        params: Option<String>,
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TierArg {
    Fast,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Witness,
    Emptiness,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PruneArg {
    ShortCycle,
    Gamma,
    Degree,
    Strong,
    Symmetry,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    xi: usize,
    #[arg(long, default_value_t = 1)]
    zeta: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    #[arg(long)]
    target: Option<usize>,
    #[arg(long)]
    gamma_budget: Option<usize>,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long, env = "GIRTHFORGE_WORKERS", default_value_t = 1)]
    workers: usize,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    split_depth: usize,
    /// Prune rules to switch off, comma-separated.
    #[arg(long, value_enum, value_delimiter = ',')]
    disable_prune: Vec<PruneArg>,
    /// Directory for one arclist file per extremal class or witness.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Also write the JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Drop the timing key so reruns compare byte for byte.
    #[arg(long)]
    no_timing: bool,
}

struct Failure {
    code: u8,
    msg: String,
}

fn usage(msg: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_USAGE, msg: msg.to_string() }
}

fn io(msg: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_IO, msg: msg.to_string() }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Construct { what } => cmd_construct(what),
        Command::Check { file, k, xi, zeta } => cmd_check(&file, k, xi, zeta),
        Command::Classify { file } => cmd_classify(&file),
        Command::Search(args) => cmd_search(args),
        Command::VerifyTheorems { tier, workers, seed, json, no_timing } => {
            cmd_verify(tier, workers, seed, json, no_timing)
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn read_digraph(path: &Path) -> Result<Digraph, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io(format!("{}: {e}", path.display())))?;
    arclist::parse(&text).map_err(|e| io(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| io(format!("{}: {e}", path.display())))
}

fn emit(v: &Value, no_timing: bool) -> String {
    if no_timing {
        report::render(&strip_timing(v.clone()))
    } else {
        report::render(v)
    }
}

fn cmd_construct(what: ConstructCmd) -> Result<u8, Failure> {
    let (d, label, out) = match what {
        ConstructCmd::Circulant { n, jumps, out } => {
            let d = construct::circulant(n, &jumps).map_err(usage)?;
            let js: Vec<String> = jumps.iter().map(|j| j.to_string()).collect();
            (d, format!("circulant C_{n}({})", js.join(",")), out)
        }
        ConstructCmd::F8 { out } => (construct::f8(), "F_8".to_string(), out),
        ConstructCmd::Tournament { n, out } => {
            (construct::strong_tournament(n).map_err(usage)?, format!("strong tournament T_{n}"), out)
        }
        ConstructCmd::Phi31 { family, orders, roles, params, out } => {
            let p = match params {
                Some(s) => s.parse::<Phi31Params>().map_err(usage)?,
                None => {
                    if orders.is_empty() {
                        return Err(usage("phi31 needs --orders or --params"));
                    }
                    let mut text = format!(
                        "orders={}",
                        orders.iter().map(|o| o.to_string()).collect::<Vec<_>>().join(",")
                    );
                    if let Some(f) = family {
                        f.parse::<Family>().map_err(usage)?;
                        text = format!("family={f} {text}");
                    }
                    if let Some(r) = roles {
                        text.push_str(&format!(" roles={r}"));
                    }
                    text.parse::<Phi31Params>().map_err(usage)?
                }
            };
            let d = construct::build_phi31(&p).map_err(usage)?;
            (d, p.compact(), out)
        }
    };
    let text = arclist::write(&d);
    match &out {
        Some(path) => write_text(path, &text)?,
        None => print!("{text}"),
    }
    eprintln!(
        "{label}: n={} arcs={} canonical={}",
        d.order(),
        d.arc_count(),
        girthforge::canonical_form(&d).render()
    );
    Ok(0)
}

fn cmd_check(file: &Path, k: usize, xi: usize, zeta: usize) -> Result<u8, Failure> {
    let d = read_digraph(file)?;
    let spec = ClassSpec::new(d.order(), k, xi, zeta).map_err(usage)?;
    let m = d.membership(&spec).map_err(usage)?;
    print!("{}", report::render(&report::membership_json(&d, &spec, &m)));
    Ok(if m.is_member() { 0 } else { EXIT_VERIFY })
}

fn cmd_classify(file: &Path) -> Result<u8, Failure> {
    let d = read_digraph(file)?;
    let c = classify_phi31(&d).map_err(usage)?;
    print!("{}", report::render(&report::classification_json(&c)));
    Ok(if c.is_valid() { 0 } else { EXIT_VERIFY })
}

fn cmd_search(a: SearchArgs) -> Result<u8, Failure> {
    let spec = ClassSpec::new(a.n, a.k, a.xi, a.zeta).map_err(usage)?;
    let mode = match a.mode {
        ModeArg::Exact => Mode::Exact,
        ModeArg::Witness => Mode::Witness,
        ModeArg::Emptiness => Mode::Emptiness,
    };
    let mut prunes = PruneConfig::default();
    for p in &a.disable_prune {
        match p {
            PruneArg::ShortCycle => prunes.short_cycle = false,
            PruneArg::Gamma => prunes.gamma_budget = false,
            PruneArg::Degree => prunes.degree = false,
            PruneArg::Strong => prunes.strong_necessary = false,
            PruneArg::Symmetry => prunes.symmetry = false,
        }
    }
    let mut params = SearchParams::new(spec, mode);
    params.target_arcs = a.target;
    params.gamma_budget = a.gamma_budget;
    params.time_limit = a.time_limit;
    params.workers = a.workers;
    params.checkpoint_path = a.checkpoint.clone();
    params.prunes = prunes;
    params.split_depth = a.split_depth;
    params.seed = a.seed;
    let out = search::solve(&params).map_err(|e| match e {
        SearchError::Io(_) | SearchError::Checkpoint(_) => io(e),
        SearchError::Invariant(_) => Failure { code: EXIT_VERIFY, msg: e.to_string() },
        _ => usage(e),
    })?;
    let mut v = report::outcome_json(&params, &out);
    if let Some(dir) = &a.out_dir {
        fs::create_dir_all(dir).map_err(|e| io(format!("{}: {e}", dir.display())))?;
        let mut files = Vec::new();
        for (i, d) in out.extremal.iter().enumerate() {
            let name = format!("n{}_k{}_xi{}_zeta{}_{:03}.arcs", a.n, a.k, a.xi, a.zeta, i);
            write_text(&dir.join(&name), &arclist::write(d))?;
            files.push(name);
        }
        v["files"] = json!(files);
    }
    let text = emit(&v, a.no_timing);
    if let Some(path) = &a.report {
        write_text(path, &text)?;
    }
    print!("{text}");
    Ok(0)
}

fn cmd_verify(tier: TierArg, workers: usize, seed: u64, json_out: bool, no_timing: bool) -> Result<u8, Failure> {
    if workers == 0 {
        return Err(usage("workers must be at least 1"));
    }
    let tier = match tier {
        TierArg::Fast => Tier::Fast,
        TierArg::Full => Tier::Full,
    };
    let r = verify::run(verify::Options { tier, workers, seed });
    if json_out {
        let v = json!({
            "tier": r.tier,
            "all_pass": r.all_pass(),
            "rows": r.rows,
            report::TIMING_KEY: { "row_secs": r.elapsed_secs },
        });
        print!("{}", emit(&v, no_timing));
    } else {
        print!("{}", r.table());
    }
    Ok(if r.all_pass() { 0 } else { EXIT_VERIFY })
}
