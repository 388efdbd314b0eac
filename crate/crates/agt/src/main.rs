//! `agt`: command-line front end for the arithgroups toolkit.
//!
//! Exit codes: 0 on success or a delivered verdict, 1 on precondition
//! or input errors, 2 on budget exhaustion. All reports are JSON
//! documents with a `schema_version` field and embed the resolved
//! configuration, so identical invocations produce identical bytes.

use arithgroups::chevalley::{g2_telescoping, verify_b2_identity, ChevalleyBasis};
use arithgroups::derive::{self, DeriveError};
use arithgroups::matrix::Matrix;
use arithgroups::oracles::{
    congruence::DEFAULT_CLOSURE_BUDGET, CongruenceError, GroupElement, SubgroupHandle, SubgroupSpec,
};
use arithgroups::probe::{self, ProbeBounds};
use arithgroups::projective::proximal_analyze;
use arithgroups::roots::{adjacent_base_path, RootSystem, TypeLabel};
use arithgroups::sln::{bruhat_decompose, elementary_commutator, ElementaryMatrix};
use arithgroups::textio::{parse_matrix, parse_rational, print_matrix};
use arithgroups::word::Word;
use arithgroups::{FloatMatrix, SCHEMA_VERSION};
use clap::{Args, Parser, Subcommand};
use serde_json::json;
use std::fs;
use std::process::ExitCode;

const EXIT_PRECONDITION: u8 = 1;
const EXIT_BUDGET: u8 = 2;

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn precondition(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_PRECONDITION,
            message: message.into(),
        }
    }

    fn budget(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_BUDGET,
            message: message.into(),
        }
    }
}

fn classify_derive_error(e: DeriveError) -> CliError {
    match &e {
        DeriveError::BudgetExhausted { .. } | DeriveError::PositionBudget { .. } => {
            CliError::budget(e.to_string())
        }
        _ => CliError::precondition(e.to_string()),
    }
}

#[derive(Parser)]
#[command(
    name = "agt",
    about = "Exact computational group theory: Bruhat cells, commutator calculus, root systems, subgroup oracles, recurrence probes and derivation transcripts",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bruhat decomposition of a rational matrix from the text format
    Bruhat(BruhatArgs),
    /// Elementary-matrix commutator formula
    Comm(CommArgs),
    /// Root system data: counts, highest root, adjacent-base paths
    Roots(RootsArgs),
    /// Chevalley-representation identity verification
    Chevalley(ChevalleyArgs),
    /// Recurrence-direction probe against a subgroup oracle
    Probe(ProbeArgs),
    /// Derivation pipeline on a congruence subgroup
    Derive(DeriveArgs),
    /// Proximality analysis of a real matrix
    Proximal(ProximalArgs),
    /// Re-verify an emitted report against a fresh run
    Replay(ReplayArgs),
}

#[derive(Args)]
struct BruhatArgs {
    /// matrix file in the text format
    #[arg(long)]
    matrix: String,
    /// emit the full JSON report instead of text blocks
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CommArgs {
    /// ambient size n
    #[arg(long)]
    n: usize,
    /// first elementary matrix as i,j,k (k rational)
    #[arg(long)]
    first: String,
    /// second elementary matrix as i,j,k
    #[arg(long)]
    second: String,
}

#[derive(Args)]
struct RootsArgs {
    /// system label: A, B, C, D, F, G or a combined form like G2, A3
    #[arg(long = "type")]
    type_label: String,
    /// rank (may be part of the combined label)
    #[arg(long)]
    rank: Option<usize>,
    /// optional Weyl word (comma-separated simple-root positions,
    /// 1-based); prints an adjacent-base path from the standard base to
    /// its image
    #[arg(long)]
    weyl_word: Option<String>,
}

#[derive(Args)]
struct ChevalleyArgs {
    #[command(subcommand)]
    action: ChevalleyAction,
}

#[derive(Subcommand)]
enum ChevalleyAction {
    /// Verify one of the named identities and print the proof record
    Verify(ChevalleyVerifyArgs),
}

#[derive(Args)]
struct ChevalleyVerifyArgs {
    /// system label (B2 or G2 depending on the identity)
    #[arg(long = "type")]
    type_label: String,
    /// identity name: telescoping | b2
    #[arg(long)]
    identity: String,
    /// comma-separated integer parameters (six for telescoping, two for b2)
    #[arg(long)]
    k: String,
    /// the remaining integer parameter
    #[arg(long)]
    l: i64,
}

#[derive(Args)]
struct ProbeArgs {
    /// subgroup spec JSON file
    #[arg(long)]
    subgroup: String,
    /// direction as a word (free variant)
    #[arg(long)]
    direction: Option<String>,
    /// direction as a matrix file (congruence variant)
    #[arg(long)]
    direction_matrix: Option<String>,
    #[arg(long, default_value_t = 64)]
    max_exponent: u64,
    #[arg(long, default_value_t = 3)]
    ball_radius: usize,
    /// probe kind: direction (composite) | normalizer | env
    #[arg(long, default_value = "direction")]
    mode: String,
    /// closure enumeration budget for congruence oracles
    #[arg(long, default_value_t = DEFAULT_CLOSURE_BUDGET)]
    closure_budget: usize,
}

#[derive(Args)]
struct DeriveArgs {
    /// subgroup spec JSON file (congruence variant)
    #[arg(long)]
    subgroup: Option<String>,
    /// witness exponent budget
    #[arg(long, default_value_t = 512)]
    budget: u64,
    /// big-cell search budget
    #[arg(long, default_value_t = 10_000)]
    search_budget: usize,
    #[arg(long, default_value_t = DEFAULT_CLOSURE_BUDGET)]
    closure_budget: usize,
    /// emit the transcript as JSON (default output)
    #[arg(long)]
    json: bool,
    /// re-verify a previously emitted transcript instead of deriving
    #[arg(long)]
    replay: Option<String>,
}

#[derive(Args)]
struct ProximalArgs {
    /// matrix file in the text format (entries parsed exactly, then
    /// converted to binary64)
    #[arg(long)]
    matrix: String,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args)]
struct ReplayArgs {
    /// report file: a derivation transcript or a witness report
    #[arg(long)]
    transcript: String,
    /// subgroup spec file, required for witness reports
    #[arg(long)]
    subgroup: Option<String>,
    #[arg(long, default_value_t = DEFAULT_CLOSURE_BUDGET)]
    closure_budget: usize,
}

fn read_file(path: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::precondition(format!("cannot read {path}: {e}")))
}

fn load_matrix(path: &str) -> Result<arithgroups::RationalMatrix, CliError> {
    let text = read_file(path)?;
    parse_matrix(&text).map_err(|e| CliError::precondition(format!("{path}: {e}")))
}

fn load_subgroup(path: &str, budget: usize) -> Result<(SubgroupSpec, SubgroupHandle), CliError> {
    let text = read_file(path)?;
    let spec = SubgroupSpec::from_json(&text)
        .map_err(|e| CliError::precondition(format!("{path}: {e}")))?;
    let handle = spec.build(budget).map_err(|e| match e {
        arithgroups::oracles::OracleError::Congruence(CongruenceError::BudgetExceeded {
            ..
        }) => CliError::budget(e.to_string()),
        other => CliError::precondition(other.to_string()),
    })?;
    Ok((spec, handle))
}

fn parse_elementary(n: usize, text: &str) -> Result<ElementaryMatrix, CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(CliError::precondition(format!(
            "expected i,j,k, got {text:?}"
        )));
    }
    let i: usize = parts[0]
        .trim()
        .parse()
        .map_err(|_| CliError::precondition(format!("bad row index {:?}", parts[0])))?;
    let j: usize = parts[1]
        .trim()
        .parse()
        .map_err(|_| CliError::precondition(format!("bad column index {:?}", parts[1])))?;
    let k = parse_rational(parts[2].trim())
        .map_err(|e| CliError::precondition(format!("bad exponent: {e}")))?;
    if i == 0 || j == 0 || i > n || j > n || i == j {
        return Err(CliError::precondition(format!(
            "indices ({i},{j}) invalid for ambient size {n}"
        )));
    }
    Ok(ElementaryMatrix::new(n, i, j, k))
}

fn parse_type(label: &str, rank: Option<usize>) -> Result<(TypeLabel, usize), CliError> {
    let (letter, trailing) = label.split_at(1);
    let tl: TypeLabel = letter
        .parse()
        .map_err(|e: String| CliError::precondition(e))?;
    let rank = if trailing.is_empty() {
        rank.ok_or_else(|| CliError::precondition("rank required (e.g. --type G2 or --rank 2)"))?
    } else {
        trailing
            .parse()
            .map_err(|_| CliError::precondition(format!("bad rank in {label:?}")))?
    };
    Ok((tl, rank))
}

fn run_bruhat(args: &BruhatArgs) -> Result<(), CliError> {
    let g = load_matrix(&args.matrix)?;
    let form = bruhat_decompose(&g).map_err(|e| CliError::precondition(e.to_string()))?;
    if args.json {
        let report = json!({
            "schema_version": SCHEMA_VERSION,
            "command": "bruhat",
            "config": { "matrix": args.matrix },
            "result": {
                "v": print_matrix(&form.v),
                "d": print_matrix(&form.diagonal_matrix()),
                "p": print_matrix(&form.sigma.to_matrix()),
                "u": print_matrix(&form.u),
                "sigma": form.sigma.cycle_notation(),
            }
        });
        println!("{report}");
    } else {
        print!("{}", arithgroups::sln::print_bruhat(&form));
    }
    Ok(())
}

fn run_comm(args: &CommArgs) -> Result<(), CliError> {
    let a = parse_elementary(args.n, &args.first)?;
    let b = parse_elementary(args.n, &args.second)?;
    let result =
        elementary_commutator(&a, &b).map_err(|e| CliError::precondition(e.to_string()))?;
    let result_text = match &result {
        arithgroups::sln::ElementaryOrIdentity::Elementary(e) => e.to_string(),
        arithgroups::sln::ElementaryOrIdentity::Identity(_) => "identity".to_string(),
    };
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "comm",
        "config": { "n": args.n, "first": a, "second": b },
        "result": {
            "commutator": result_text,
            "matrix": print_matrix(&result.to_matrix()),
        }
    });
    println!("{report}");
    Ok(())
}

fn run_roots(args: &RootsArgs) -> Result<(), CliError> {
    let (label, rank) = parse_type(&args.type_label, args.rank)?;
    let system =
        RootSystem::build(label, rank).map_err(|e| CliError::precondition(e.to_string()))?;
    let base = system.standard_base();
    let highest = base.highest_root(&system);
    let mut result = system.to_json();
    result["root_count"] = json!(system.root_count());
    result["highest_root"] = json!(system.root(highest));

    if let Some(word) = &args.weyl_word {
        let mut target = system.standard_base();
        for part in word.split(',') {
            let pos: usize = part
                .trim()
                .parse()
                .map_err(|_| CliError::precondition(format!("bad Weyl word entry {part:?}")))?;
            if pos == 0 || pos > system.rank {
                return Err(CliError::precondition(format!(
                    "Weyl word position {pos} out of range 1..={}",
                    system.rank
                )));
            }
            target = target.flip(&system, pos - 1);
        }
        let path = adjacent_base_path(&system, &base, &target)
            .map_err(|e| CliError::precondition(e.to_string()))?;
        let path_json: Vec<_> = path
            .iter()
            .map(|b| {
                json!(b
                    .simple_indices()
                    .iter()
                    .map(|&r| system.root(r))
                    .collect::<Vec<_>>())
            })
            .collect();
        result["path"] = json!(path_json);
        result["path_length"] = json!(path.len());
    }
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "roots",
        "config": { "type": label.to_string(), "rank": rank, "weyl_word": args.weyl_word },
        "result": result,
    });
    println!("{report}");
    Ok(())
}

fn run_chevalley(args: &ChevalleyVerifyArgs) -> Result<(), CliError> {
    let (label, rank) = parse_type(&args.type_label, None)?;
    let ks: Vec<i64> = args
        .k
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<i64>()
                .map_err(|_| CliError::precondition(format!("bad k entry {p:?}")))
        })
        .collect::<Result<_, _>>()?;
    let system =
        RootSystem::build(label, rank).map_err(|e| CliError::precondition(e.to_string()))?;
    let basis = ChevalleyBasis::build_adjoint(system);
    let result = match args.identity.as_str() {
        "telescoping" => {
            if ks.len() != 6 || ks.iter().any(|&k| k == 0) {
                return Err(CliError::precondition(
                    "telescoping requires six nonzero k values",
                ));
            }
            let k: [i64; 6] = ks.clone().try_into().unwrap();
            let record = g2_telescoping(&basis, k, args.l)
                .map_err(|e| CliError::precondition(e.to_string()))?;
            serde_json::to_value(&record).unwrap()
        }
        "b2" => {
            if ks.len() != 2 {
                return Err(CliError::precondition("b2 requires two k values"));
            }
            let record = verify_b2_identity(&basis, ks[0], ks[1], args.l)
                .map_err(|e| CliError::precondition(e.to_string()))?;
            serde_json::to_value(&record).unwrap()
        }
        other => {
            return Err(CliError::precondition(format!(
                "unknown identity {other:?} (expected telescoping or b2)"
            )))
        }
    };
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "chevalley verify",
        "config": {
            "type": format!("{label}{rank}"),
            "identity": args.identity,
            "k": ks,
            "l": args.l,
        },
        "result": result,
    });
    println!("{report}");
    Ok(())
}

fn run_probe(args: &ProbeArgs) -> Result<(), CliError> {
    let (spec, handle) = load_subgroup(&args.subgroup, args.closure_budget)?;
    let direction = match (&args.direction, &args.direction_matrix) {
        (Some(word), None) => {
            let rank =
                match &spec {
                    SubgroupSpec::Free { rank, .. } => *rank,
                    _ => return Err(CliError::precondition(
                        "--direction takes a word; use --direction-matrix for congruence subgroups",
                    )),
                };
            GroupElement::Word(
                Word::parse(word, rank).map_err(|e| CliError::precondition(e.to_string()))?,
            )
        }
        (None, Some(path)) => GroupElement::Matrix(load_matrix(path)?),
        _ => {
            return Err(CliError::precondition(
                "exactly one of --direction / --direction-matrix is required",
            ))
        }
    };
    let bounds = ProbeBounds {
        max_exponent: args.max_exponent,
        ball_radius: args.ball_radius,
    };
    let report = match args.mode.as_str() {
        "direction" => probe::direction_report(&handle, &direction, bounds),
        "normalizer" => probe::normalizer_power(&handle, &direction, bounds),
        "env" => {
            let ball = probe::probe_ball(&handle, bounds.ball_radius)
                .map_err(|e| CliError::precondition(e.to_string()))?;
            probe::env_witnesses(&handle, &direction, &ball, bounds)
        }
        other => {
            return Err(CliError::precondition(format!(
                "unknown probe mode {other:?}"
            )))
        }
    }
    .map_err(|e| CliError::precondition(e.to_string()))?;
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "probe",
        "config": {
            "subgroup": spec,
            "mode": args.mode,
            "max_exponent": args.max_exponent,
            "ball_radius": args.ball_radius,
        },
        "result": report,
    });
    println!("{doc}");
    Ok(())
}

fn run_derive(args: &DeriveArgs) -> Result<(), CliError> {
    if let Some(path) = &args.replay {
        return replay_derivation(path, args.closure_budget);
    }
    let subgroup = args
        .subgroup
        .as_ref()
        .ok_or_else(|| CliError::precondition("--subgroup is required"))?;
    let (spec, _handle) = load_subgroup(subgroup, args.closure_budget)?;
    let transcript =
        derive::run_pipeline(&spec, args.budget, args.search_budget, args.closure_budget)
            .map_err(classify_derive_error)?;
    if let derive::Outcome::Failure { reason } = &transcript.outcome {
        // budget failures surface through the exit code, with the
        // transcript still printed for inspection
        println!("{}", serde_json::to_string(&transcript).unwrap());
        let lowered = reason.to_lowercase();
        if lowered.contains("budget") {
            return Err(CliError::budget(reason.clone()));
        }
        return Err(CliError::precondition(reason.clone()));
    }
    println!("{}", serde_json::to_string(&transcript).unwrap());
    Ok(())
}

fn replay_derivation(path: &str, closure_budget: usize) -> Result<(), CliError> {
    let text = read_file(path)?;
    let transcript: derive::DerivationTranscript =
        serde_json::from_str(&text).map_err(|e| CliError::precondition(format!("{path}: {e}")))?;
    let identical =
        derive::replay_transcript(&transcript, closure_budget).map_err(classify_derive_error)?;
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "derive --replay",
        "config": { "transcript": path },
        "result": { "byte_identical": identical },
    });
    println!("{doc}");
    if identical {
        Ok(())
    } else {
        Err(CliError::precondition(
            "replay diverged from the transcript",
        ))
    }
}

fn run_proximal(args: &ProximalArgs) -> Result<(), CliError> {
    if args.tol <= 0.0 {
        return Err(CliError::precondition("tolerance must be positive"));
    }
    let exact = load_matrix(&args.matrix)?;
    let n = exact.rows();
    let floats: FloatMatrix = Matrix::from_fn(n, exact.cols(), |i, j| {
        let e = &exact[(i, j)];
        let num: f64 = e.numer().to_string().parse().unwrap_or(f64::NAN);
        let den: f64 = e.denom().to_string().parse().unwrap_or(f64::NAN);
        num / den
    });
    let result =
        proximal_analyze(&floats, args.tol).map_err(|e| CliError::precondition(e.to_string()))?;
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "proximal",
        "config": { "matrix": args.matrix, "tol": args.tol },
        "result": match result {
            Some(data) => json!({ "proximal": true, "data": data }),
            None => json!({ "proximal": false }),
        },
    });
    println!("{doc}");
    Ok(())
}

fn run_replay(args: &ReplayArgs) -> Result<(), CliError> {
    let text = read_file(&args.transcript)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::precondition(format!("{}: {e}", args.transcript)))?;
    if value.get("subgroup").is_some() && value.get("steps").is_some() {
        return replay_derivation(&args.transcript, args.closure_budget);
    }
    if value.get("verdict").is_some() {
        let report: probe::WitnessReport = serde_json::from_str(&text)
            .map_err(|e| CliError::precondition(format!("{}: {e}", args.transcript)))?;
        let subgroup = args.subgroup.as_ref().ok_or_else(|| {
            CliError::precondition("witness reports need --subgroup to rebuild the oracle")
        })?;
        let (_, handle) = load_subgroup(subgroup, args.closure_budget)?;
        let ok =
            probe::replay(&handle, &report).map_err(|e| CliError::precondition(e.to_string()))?;
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "command": "replay",
            "config": { "transcript": args.transcript, "subgroup": subgroup },
            "result": { "certificates_valid": ok },
        });
        println!("{doc}");
        return if ok {
            Ok(())
        } else {
            Err(CliError::precondition("certificate replay failed"))
        };
    }
    Err(CliError::precondition(
        "unrecognized report kind (expected a derivation transcript or witness report)",
    ))
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Bruhat(args) => run_bruhat(args),
        Command::Comm(args) => run_comm(args),
        Command::Roots(args) => run_roots(args),
        Command::Chevalley(args) => match &args.action {
            ChevalleyAction::Verify(v) => run_chevalley(v),
        },
        Command::Probe(args) => run_probe(args),
        Command::Derive(args) => run_derive(args),
        Command::Proximal(args) => run_proximal(args),
        Command::Replay(args) => run_replay(args),
    }
}

fn main() -> ExitCode {
    // command-line usage problems are precondition errors (exit 1);
    // exit 2 is reserved for budget exhaustion
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_PRECONDITION,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
