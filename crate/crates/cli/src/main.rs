//! `twohop` command line: region, verify, simulate, oracle.
//!
//! Exit codes: 0 ok, 2 bad input or domain, 3 a ledger entry failed,
//! 4 a size guard tripped.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use twohop::code_model::TwoHopCode;
use twohop::converse_lab::verify_code;
use twohop::oracle::{exhaustive_search, np_frontier, AuditScope, EncoderMode, SearchOptions, TestPoint};
use twohop::prob::TwoHopSource;
use twohop::schemes::{exponent_scan, scan_csv, scheme_by_name, SchemeParams};
use twohop::single_letter::{solve_r_grid, AuxCoupling, CardBounds, SolverConfig, TradeoffWeights};
use twohop::Error;

#[derive(Parser)]
#[command(name = "twohop", version, about = "Two-hop testing against independence: regions, codes, converse checks")]
struct Cli {
    /// Worker threads; output does not depend on it.
    #[arg(long, global = true, env = "TWOHOP_THREADS")]
    threads: Option<usize>,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Minimise the trade-off objective over a weight grid.
    Region(RegionArgs),
    /// Run the converse ledger on one code, or on every small code.
    Verify(VerifyArgs),
    /// Exponent scan of a coding scheme over blocklengths.
    Simulate(SimulateArgs),
    /// Exhaustive search with optimal decoders.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct RegionArgs {
    source: PathBuf,
    /// A single weight triple "b,c,d".
    #[arg(long, conflicts_with_all = ["grid", "weights_file"])]
    weights: Option<String>,
    /// Axis values shared by b, c and d.
    #[arg(long, default_value = "0,0.5,1,2")]
    grid: String,
    /// JSON list of {"b":..,"c":..,"d":..}.
    #[arg(long, conflicts_with = "grid")]
    weights_file: Option<PathBuf>,
    /// Cardinalities "U,V"; default |X|+1,|Y|+1.
    #[arg(long)]
    cards: Option<String>,
    /// Solver settings as JSON.
    #[arg(long)]
    solver: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for one witness JSON per grid point.
    #[arg(long)]
    witness_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Args)]
struct VerifyArgs {
    source: PathBuf,
    #[arg(long, required_unless_present = "enumerate", conflicts_with = "enumerate")]
    code: Option<PathBuf>,
    /// Audit every feasible code with the given sizes.
    #[arg(long)]
    enumerate: bool,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    n1: usize,
    #[arg(long, default_value_t = 2)]
    n2: usize,
    #[arg(long, default_value_t = 0.2)]
    eps1: f64,
    #[arg(long, default_value_t = 0.2)]
    eps2: f64,
    #[arg(long, default_value = "1,1,1")]
    weights: String,
    /// Rényi order; repeatable in enumerate mode. Default 1 (and √n when enumerating).
    #[arg(long)]
    gamma: Vec<f64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AuxChoice {
    Identity,
    Constant,
}

#[derive(Args)]
struct SimulateArgs {
    source: PathBuf,
    #[arg(long, default_value = "quantize")]
    scheme: String,
    /// "4..12" (inclusive) or "4,6,8".
    #[arg(long, default_value = "4..12")]
    n_list: String,
    /// Rate margin above the mutual informations, "m" or "m1,m2".
    #[arg(long, default_value = "0.1")]
    margin: String,
    #[arg(long, default_value_t = 0.6)]
    eps1: f64,
    #[arg(long, default_value_t = 0.6)]
    eps2: f64,
    #[arg(long, value_enum, default_value = "identity")]
    aux: AuxChoice,
    /// Test channels as JSON; overrides --aux.
    #[arg(long)]
    aux_file: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    source: PathBuf,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    n1: usize,
    #[arg(long, default_value_t = 2)]
    n2: usize,
    #[arg(long, default_value_t = 0.2)]
    eps1: f64,
    #[arg(long, default_value_t = 0.2)]
    eps2: f64,
    #[arg(long, default_value = "1,1,1")]
    weights: String,
    /// Sample this many encoder pairs instead of enumerating all.
    #[arg(long)]
    sample: Option<usize>,
    /// Also run the converse audit on every feasible code.
    #[arg(long)]
    audit: bool,
    /// Directory for best_code.json, frontier_relay.csv, frontier_receiver.csv, summary.json.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

enum Fail {
    Err(Error),
    Verification(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Err(e)
    }
}

impl From<std::io::Error> for Fail {
    fn from(e: std::io::Error) -> Self {
        Fail::Err(Error::Io(e))
    }
}

type Res<T> = std::result::Result<T, Fail>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("warning: thread pool: {e}");
        }
    }
    let r = match &cli.cmd {
        Cmd::Region(a) => region(a, cli.seed),
        Cmd::Verify(a) => verify(a, cli.seed),
        Cmd::Simulate(a) => simulate(a, cli.seed),
        Cmd::Oracle(a) => oracle(a, cli.seed),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(3)
        }
        Err(Fail::Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if matches!(e, Error::Budget { .. }) { 4 } else { 2 })
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Res<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn floats(s: &str) -> Res<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Domain(format!("bad number `{t}`: {e}")).into()))
        .collect()
}

fn load_source(p: &Path) -> Res<TwoHopSource> {
    TwoHopSource::load(p).map_err(|e| Error::Domain(format!("{}: {e}", p.display())).into())
}

fn region(a: &RegionArgs, seed: u64) -> Res<()> {
    let s = load_source(&a.source)?;
    let grid = if let Some(w) = &a.weights {
        vec![TradeoffWeights::parse(w)?]
    } else if let Some(f) = &a.weights_file {
        let raw: Vec<TradeoffWeights> = serde_json::from_str(&std::fs::read_to_string(f)?).map_err(Error::Json)?;
        raw.into_iter().map(|w| TradeoffWeights::new(w.b, w.c, w.d)).collect::<twohop::Result<_>>()?
    } else {
        let axis = floats(&a.grid)?;
        TradeoffWeights::grid(&axis, &axis, &axis)?
    };
    let bounds = match &a.cards {
        None => CardBounds::for_source(&s),
        Some(c) => {
            let v: Vec<usize> = c
                .split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Domain(format!("bad --cards `{c}`: {e}")))?;
            if v.len() != 2 || v.contains(&0) {
                return Err(Error::Domain(format!("--cards wants two positive sizes, got `{c}`")).into());
            }
            CardBounds { u: v[0], v: v[1] }
        }
    };
    let mut cfg: SolverConfig = match &a.solver {
        Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?).map_err(Error::Json)?,
        None => SolverConfig::default(),
    };
    cfg.seed = seed;
    let sols = solve_r_grid(&s, &grid, bounds, &cfg)?;
    let mut csv = String::from("b,c,d,R_value,converged\n");
    for (w, sol) in grid.iter().zip(&sols) {
        writeln!(csv, "{},{},{},{},{}", w.b, w.c, w.d, sol.value, sol.converged).unwrap();
        for msg in &sol.warnings {
            eprintln!("warning: b={} c={} d={}: {msg}", w.b, w.c, w.d);
        }
    }
    emit(&a.out, &csv)?;
    if let Some(dir) = &a.witness_dir {
        std::fs::create_dir_all(dir)?;
        for (i, (w, sol)) in grid.iter().zip(&sols).enumerate() {
            let j = serde_json::json!({
                "b": w.b, "c": w.c, "d": w.d,
                "value": sol.value, "u_value": sol.u_value, "v_value": sol.v_value,
                "converged": sol.converged,
                "aux": sol.aux,
            });
            std::fs::write(dir.join(format!("witness_{i:04}.json")), serde_json::to_string_pretty(&j).unwrap() + "\n")?;
        }
    }
    Ok(())
}

fn verify(a: &VerifyArgs, seed: u64) -> Res<()> {
    let s = load_source(&a.source)?;
    let w = TradeoffWeights::parse(&a.weights)?;
    if a.enumerate {
        let mut opts = SearchOptions::new(a.n);
        opts.seed = seed;
        if !a.gamma.is_empty() {
            opts.gammas = a.gamma.clone();
        }
        let res = exhaustive_search(&s, a.n, a.n1, a.n2, a.eps1, a.eps2, &w, &opts)?;
        for msg in &res.warnings {
            eprintln!("warning: {msg}");
        }
        let text = match a.format {
            Format::Json => {
                let j = serde_json::json!({
                    "n": res.n, "n1": res.n1, "n2": res.n2,
                    "encoder_pairs": res.encoder_pairs,
                    "gammas": opts.gammas,
                    "summary": res.summary.to_json(),
                    "failures": res.failures,
                });
                serde_json::to_string_pretty(&j).unwrap() + "\n"
            }
            Format::Table => {
                let m = &res.summary;
                format!(
                    "codes_checked {}\nfeasible {}\npasses {}\nvacuous {}\npremise_failed {}\nfail_entries {}\nfailing_codes {}\n",
                    m.codes_checked, m.feasible, m.passes, m.vacuous, m.premise_failed, m.fail_entries, m.failing_codes
                )
            }
        };
        emit(&a.out, &text)?;
        if res.summary.fail_entries > 0 {
            return Err(Fail::Verification(format!("{} failing entries over {} codes", res.summary.fail_entries, res.summary.failing_codes)));
        }
        return Ok(());
    }
    let path = a.code.as_ref().expect("clap requires --code");
    let code = TwoHopCode::load(path).map_err(|e| Error::Domain(format!("{}: {e}", path.display())))?;
    let gammas = if a.gamma.is_empty() { vec![1.0] } else { a.gamma.clone() };
    let mut runs = Vec::new();
    let mut table = String::new();
    let mut fails = Vec::new();
    for &g in &gammas {
        let v = verify_code(&code, &s, a.eps1, a.eps2, &w, g)?;
        for e in v.ledger.failures() {
            fails.push(format!("{} (γ={g})", e.name));
        }
        writeln!(table, "# gamma {g}\n{}", v.ledger.to_table()).unwrap();
        runs.push(serde_json::json!({
            "gamma": g,
            "profile": v.profile,
            "r_n": v.r_n,
            "t": v.t,
            "psi": v.psi,
            "counts": v.ledger.counts(),
            "ledger": v.ledger,
        }));
    }
    let text = match a.format {
        Format::Json => serde_json::to_string_pretty(&serde_json::json!({ "n": code.n, "runs": runs })).unwrap() + "\n",
        Format::Table => table,
    };
    emit(&a.out, &text)?;
    if !fails.is_empty() {
        return Err(Fail::Verification(fails.join(", ")));
    }
    Ok(())
}

fn simulate(a: &SimulateArgs, seed: u64) -> Res<()> {
    let s = load_source(&a.source)?;
    let n_list = parse_n_list(&a.n_list)?;
    let m = floats(&a.margin)?;
    let margins = match m.as_slice() {
        [x] => (*x, *x),
        [x, y] => (*x, *y),
        _ => return Err(Error::Domain(format!("--margin wants one or two numbers, got `{}`", a.margin)).into()),
    };
    let aux = match (&a.aux_file, a.aux) {
        (Some(p), _) => serde_json::from_str(&std::fs::read_to_string(p)?).map_err(Error::Json)?,
        (None, AuxChoice::Identity) => AuxCoupling::identity(&s),
        (None, AuxChoice::Constant) => AuxCoupling::constant(&s),
    };
    let params = SchemeParams { aux, relay_aux: None, margins, eps: (a.eps1, a.eps2), seed };
    let builder = scheme_by_name(&a.scheme, &params)?;
    let rows = exponent_scan(builder.as_ref(), &s, &n_list)?;
    emit(&a.out, &scan_csv(&rows)?)
}

fn parse_n_list(t: &str) -> Res<Vec<usize>> {
    let bad = |e: String| -> Fail { Error::Domain(format!("bad --n-list `{t}`: {e}")).into() };
    let v: Vec<usize> = if let Some((lo, hi)) = t.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|e| bad(format!("{e}")))?;
        let hi: usize = hi.trim().trim_start_matches('=').parse().map_err(|e| bad(format!("{e}")))?;
        (lo..=hi).collect()
    } else {
        t.split(',').map(|x| x.trim().parse::<usize>().map_err(|e| bad(format!("{e}")))).collect::<Res<_>>()?
    };
    if v.is_empty() || v.contains(&0) {
        return Err(bad("need at least one positive blocklength".into()));
    }
    Ok(v)
}

fn frontier_csv(points: &[TestPoint]) -> String {
    let mut s = String::from("type1,type2\n");
    for p in points {
        // + 0.0 turns a stray -0 into 0
        writeln!(s, "{},{}", p.type1 + 0.0, p.type2 + 0.0).unwrap();
    }
    s
}

fn oracle(a: &OracleArgs, seed: u64) -> Res<()> {
    let s = load_source(&a.source)?;
    let w = TradeoffWeights::parse(&a.weights)?;
    let mut opts = SearchOptions::new(a.n);
    opts.seed = seed;
    if !a.audit {
        opts.scope = AuditScope::None;
    }
    if let Some(k) = a.sample {
        opts.encoders = EncoderMode::Sample { count: k, seed };
    }
    let res = exhaustive_search(&s, a.n, a.n1, a.n2, a.eps1, a.eps2, &w, &opts)?;
    for msg in &res.warnings {
        eprintln!("warning: {msg}");
    }
    let summary = serde_json::json!({
        "n": res.n, "n1": res.n1, "n2": res.n2,
        "encoder_pairs": res.encoder_pairs,
        "best_weighted_lhs": if res.best_weighted_lhs.is_finite() { Some(res.best_weighted_lhs) } else { None },
        "best_profile": res.best_profile,
        "audit": if a.audit { Some(res.summary.to_json()) } else { None },
    });
    let summary = serde_json::to_string_pretty(&summary).unwrap() + "\n";
    match &a.out_dir {
        None => print!("{summary}"),
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join("summary.json"), &summary)?;
            if let Some(code) = &res.best_code {
                std::fs::write(dir.join("best_code.json"), code.to_json() + "\n")?;
                let fr = np_frontier(code, &s, a.n)?;
                std::fs::write(dir.join("frontier_relay.csv"), frontier_csv(&fr.relay))?;
                std::fs::write(dir.join("frontier_receiver.csv"), frontier_csv(&fr.receiver))?;
            }
        }
    }
    if a.audit && res.summary.fail_entries > 0 {
        return Err(Fail::Verification(format!("{} failing entries", res.summary.fail_entries)));
    }
    Ok(())
}
