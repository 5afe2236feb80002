//! Command-line front end: remnant reports, twisted-conjugacy decisions,
//! subgroup membership, and seeded density experiments.
//!
//! Exit codes: 0 when a command completes with a verdict or result, 2 when
//! the decision procedure returns undecided, 1 on usage or validation
//! errors. Output is byte-stable for fixed inputs and seed, except for the
//! `elapsed_ms` field of experiment documents.

use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use freeconj::{
    ball_size, decide, membership, min_gap, parse_word, remnant_report, solution_bound,
    Certificate, Decision, ExperimentResult, FreeHomomorphism, Rank, RemnantReport, TwistedPair,
    UndecidedReason, Word,
};

#[derive(Parser)]
#[command(
    name = "freeconj",
    version,
    about = "Twisted conjugacy in free groups: remnant certificates, bounded-solution-length decisions, and density experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Remnant report for an image tuple.
    Remnant(RemnantArgs),
    /// Decide whether u = phi(z) v psi(z)^-1 has a solution.
    Decide(DecideArgs),
    /// Decide whether a word lies in the image of phi.
    Member(MemberArgs),
    /// Seeded density experiments with reference values.
    Experiment {
        #[command(subcommand)]
        experiment: ExperimentCommand,
    },
}

#[derive(Args)]
struct RemnantArgs {
    /// Rank of the group the images live in.
    #[arg(long)]
    rank: usize,
    /// Comma-separated image words, e.g. "babaa,aaBabbb".
    #[arg(long)]
    phi: String,
}

#[derive(Args)]
struct DecideArgs {
    /// Rank of the domain group.
    #[arg(long)]
    rank_domain: usize,
    /// Rank of the codomain group.
    #[arg(long)]
    rank_codomain: usize,
    /// Comma-separated images of phi.
    #[arg(long)]
    phi: String,
    /// Comma-separated images of psi, or the keywords `identity` / `trivial`.
    #[arg(long)]
    psi: String,
    /// Left-hand word u.
    #[arg(short)]
    u: String,
    /// Right-hand word v.
    #[arg(short)]
    v: String,
}

#[derive(Args)]
struct MemberArgs {
    /// Rank of the codomain group the images and the word live in.
    #[arg(long)]
    rank_codomain: usize,
    /// Rank of the domain group; defaults to the number of images.
    #[arg(long)]
    rank_domain: Option<usize>,
    /// Comma-separated images of phi.
    #[arg(long)]
    phi: String,
    /// The word to test for membership in phi(G).
    #[arg(short)]
    w: String,
}

#[derive(Subcommand)]
enum ExperimentCommand {
    /// Fraction of uniform integer tuples in [-p, p]^n with gcd 1.
    Coprime(TupleExperimentArgs),
    /// Sample mean of 1/gcd over uniform integer tuples.
    GcdMean(TupleExperimentArgs),
    /// Fraction of random homomorphisms with remnant length >= l.
    RemnantDensity(RemnantDensityArgs),
    /// Estimated density of phi(G) via membership tests.
    ImageDensity(ImageDensityArgs),
    /// Exact expected image density for rank-1 -> rank-1 homomorphisms.
    Rank1Expected(Rank1Args),
}

#[derive(Args)]
struct TupleExperimentArgs {
    /// Tuple arity (rank of the domain group).
    #[arg(long, default_value_t = 2)]
    n: u32,
    /// Entries are uniform on [-p, p].
    #[arg(long, default_value_t = 10_000)]
    p: u64,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct RemnantDensityArgs {
    /// Domain rank.
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Codomain rank (must be at least 2).
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Remnant length threshold.
    #[arg(long, default_value_t = 1)]
    l: usize,
    /// Images are uniform on the ball H_p.
    #[arg(long, default_value_t = 20)]
    p: usize,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ImageDensityArgs {
    /// Comma-separated images of phi.
    #[arg(long)]
    phi: String,
    /// Codomain rank the images live in.
    #[arg(long)]
    m: usize,
    /// Test words are uniform on the ball H_p.
    #[arg(long, default_value_t = 8)]
    p: usize,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct Rank1Args {
    /// Homomorphism degree bound.
    #[arg(long, default_value_t = 1_000)]
    p: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // --help and --version are not failures.
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Remnant(args) => run_remnant(args, cli.format),
        Command::Decide(args) => run_decide(args, cli.format),
        Command::Member(args) => run_member(args, cli.format),
        Command::Experiment { experiment } => run_experiment(experiment, cli.format),
    }
}

fn parse_rank(value: usize, flag: &str) -> Result<Rank> {
    Rank::new(value).with_context(|| format!("{flag} must be at least 1"))
}

fn parse_word_arg(text: &str, rank: Rank, flag: &str) -> Result<Word> {
    parse_word(text, rank).with_context(|| format!("{flag}: cannot parse word `{text}`"))
}

fn parse_images(text: &str, rank: Rank, flag: &str) -> Result<Vec<Word>> {
    text.split(',')
        .map(|part| parse_word_arg(part.trim(), rank, flag))
        .collect()
}

fn parse_phi(text: &str, codomain: Rank, expected_domain: Option<usize>) -> Result<FreeHomomorphism> {
    let images = parse_images(text, codomain, "--phi")?;
    if let Some(expected) = expected_domain {
        if images.len() != expected {
            bail!(
                "--phi: expected {expected} images for --rank-domain {expected}, found {}",
                images.len()
            );
        }
    }
    FreeHomomorphism::from_images(images).context("--phi")
}

fn parse_psi(text: &str, domain: Rank, codomain: Rank) -> Result<FreeHomomorphism> {
    match text {
        "identity" => {
            if domain != codomain {
                bail!("--psi identity requires equal domain and codomain ranks");
            }
            Ok(FreeHomomorphism::identity(domain))
        }
        "trivial" => Ok(FreeHomomorphism::trivial(domain, codomain)),
        _ => {
            let images = parse_images(text, codomain, "--psi")?;
            if images.len() != domain.get() {
                bail!(
                    "--psi: expected {} images, found {}",
                    domain.get(),
                    images.len()
                );
            }
            FreeHomomorphism::from_images(images).context("--psi")
        }
    }
}

#[derive(Serialize)]
struct RemnantDocument {
    command: &'static str,
    rank: usize,
    images: Vec<String>,
    #[serde(flatten)]
    report: RemnantReport,
}

fn run_remnant(args: RemnantArgs, format: OutputFormat) -> Result<ExitCode> {
    let rank = parse_rank(args.rank, "--rank")?;
    let images = parse_images(&args.phi, rank, "--phi")?;
    let report = remnant_report(&images).context("--phi")?;
    match format {
        OutputFormat::Json => {
            let document = RemnantDocument {
                command: "remnant",
                rank: rank.get(),
                images: images.iter().map(Word::to_string).collect(),
                report,
            };
            println!("{}", serde_json::to_string(&document)?);
        }
        OutputFormat::Text => {
            println!("generator  left  right  survives  remnant (length)");
            for (i, gen) in report.generators.iter().enumerate() {
                let name = generator_name(i, rank);
                println!(
                    "{name:<10} {:<5} {:<6} {:<9} {} ({})",
                    gen.left_cancel,
                    gen.right_cancel,
                    if gen.survives { "yes" } else { "no" },
                    gen.remnant,
                    gen.remnant.len()
                );
            }
            match report.remnant_length {
                Some(length) => println!("remnant length: {length}"),
                None => println!("no remnant"),
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn generator_name(index: usize, rank: Rank) -> String {
    if rank.get() <= 26 {
        ((b'a' + index as u8) as char).to_string()
    } else {
        format!("g{}", index + 1)
    }
}

#[derive(Serialize)]
struct DecideDocument {
    command: &'static str,
    u: String,
    v: String,
    verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<Certificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_gap: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound: Option<usize>,
    /// Number of candidates the enumeration examined, as a decimal string.
    #[serde(skip_serializing_if = "Option::is_none")]
    candidates: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    undecided_reason: Option<&'static str>,
}

fn verdict_name(decision: &Decision) -> &'static str {
    match decision {
        Decision::Distinct(_) => "distinct",
        Decision::Conjugate(_) => "conjugate",
        Decision::NotConjugate(_) => "not_conjugate",
        Decision::Undecided(_) => "undecided",
    }
}

fn reason_name(reason: UndecidedReason) -> &'static str {
    match reason {
        UndecidedReason::StrictInequalityFails => "strict_inequality_fails",
        UndecidedReason::NoRemnant => "no_remnant",
        UndecidedReason::NoApplicableMethod => "no_applicable_method",
    }
}

/// Candidates examined by the enumeration: the full ball for an exhausted
/// search, the length-lex position of the witness otherwise.
fn candidates_checked(decision: &Decision, domain: Rank) -> Option<String> {
    match decision {
        Decision::NotConjugate(bound) => Some(ball_size(domain, *bound).to_string()),
        Decision::Conjugate(witness) => {
            Some((witness.length_lex_rank() + 1u32).to_string())
        }
        _ => None,
    }
}

fn run_decide(args: DecideArgs, format: OutputFormat) -> Result<ExitCode> {
    let domain = parse_rank(args.rank_domain, "--rank-domain")?;
    let codomain = parse_rank(args.rank_codomain, "--rank-codomain")?;
    let phi = parse_phi(&args.phi, codomain, Some(domain.get()))?;
    let psi = parse_psi(&args.psi, domain, codomain)?;
    let pair = TwistedPair::new(phi, psi).context("--phi/--psi")?;
    let u = parse_word_arg(&args.u, codomain, "-u")?;
    let v = parse_word_arg(&args.v, codomain, "-v")?;

    let decision = decide(&pair, &u, &v).context("decide")?;
    let gap = min_gap(&pair);
    let bound = solution_bound(&pair, &u, &v).context("bound")?;
    let candidates = candidates_checked(&decision, domain);

    let exit = if decision.is_decided() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    };

    match format {
        OutputFormat::Json => {
            let document = DecideDocument {
                command: "decide",
                u: u.to_string(),
                v: v.to_string(),
                verdict: verdict_name(&decision),
                witness: match &decision {
                    Decision::Conjugate(z) => Some(z.to_string()),
                    _ => None,
                },
                certificate: match decision {
                    Decision::Distinct(ref certificate) => Some(certificate.clone()),
                    _ => None,
                },
                min_gap: gap,
                bound,
                candidates,
                undecided_reason: match decision {
                    Decision::Undecided(reason) => Some(reason_name(reason)),
                    _ => None,
                },
            };
            println!("{}", serde_json::to_string(&document)?);
        }
        OutputFormat::Text => {
            println!("u: {u}");
            println!("v: {v}");
            if let Some(gap) = gap {
                println!("min gap l: {gap}");
            }
            if let Some(bound) = bound {
                println!("solution bound: {bound}");
            }
            if let Some(candidates) = &candidates {
                println!("candidates checked: {candidates}");
            }
            match &decision {
                Decision::Distinct(_) => {
                    println!("verdict: distinct (remnant inequality certificate)")
                }
                Decision::Conjugate(z) => println!("verdict: conjugate, witness z = {z}"),
                Decision::NotConjugate(bound) => println!(
                    "verdict: not conjugate (no solution of length <= {bound} exists)"
                ),
                Decision::Undecided(reason) => {
                    println!("verdict: undecided ({})", reason_name(*reason))
                }
            }
        }
    }
    Ok(exit)
}

#[derive(Serialize)]
struct MemberDocument {
    command: &'static str,
    word: String,
    member: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    undecided_reason: Option<&'static str>,
}

fn run_member(args: MemberArgs, format: OutputFormat) -> Result<ExitCode> {
    let codomain = parse_rank(args.rank_codomain, "--rank-codomain")?;
    let phi = parse_phi(&args.phi, codomain, args.rank_domain)?;
    let w = parse_word_arg(&args.w, codomain, "-w")?;
    let decision = membership(&phi, &w).context("member")?;
    let exit = if decision.is_decided() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    };
    let (member, witness, bound, reason) = match &decision {
        Decision::Conjugate(z) => (Some(true), Some(z.to_string()), None, None),
        Decision::NotConjugate(bound) => (Some(false), None, Some(*bound), None),
        Decision::Undecided(reason) => (None, None, None, Some(reason_name(*reason))),
        Decision::Distinct(_) => unreachable!("membership never certifies distinctness"),
    };
    match format {
        OutputFormat::Json => {
            let document = MemberDocument {
                command: "member",
                word: w.to_string(),
                member,
                witness,
                bound,
                undecided_reason: reason,
            };
            println!("{}", serde_json::to_string(&document)?);
        }
        OutputFormat::Text => match &decision {
            Decision::Conjugate(z) => println!("member: yes, w = phi({z})"),
            Decision::NotConjugate(bound) => {
                println!("member: no (checked all z with |z| <= {bound})")
            }
            Decision::Undecided(reason) => {
                println!("member: undecided ({})", reason_name(*reason))
            }
            Decision::Distinct(_) => unreachable!(),
        },
    }
    Ok(exit)
}

fn run_experiment(command: ExperimentCommand, format: OutputFormat) -> Result<ExitCode> {
    let result: ExperimentResult = match command {
        ExperimentCommand::Coprime(args) => {
            freeconj::coprime_density_experiment(args.n, args.p, args.samples, args.seed)?
        }
        ExperimentCommand::GcdMean(args) => {
            freeconj::expected_gcd_reciprocal_experiment(args.n, args.p, args.samples, args.seed)?
        }
        ExperimentCommand::RemnantDensity(args) => freeconj::remnant_density_experiment(
            parse_rank(args.n, "--n")?,
            parse_rank(args.m, "--m")?,
            args.l,
            args.p,
            args.samples,
            args.seed,
        )?,
        ExperimentCommand::ImageDensity(args) => {
            let codomain = parse_rank(args.m, "--m")?;
            let phi = parse_phi(&args.phi, codomain, None)?;
            freeconj::image_density_experiment(&phi, args.p, args.samples, args.seed)?
        }
        ExperimentCommand::Rank1Expected(args) => rank1_result(args.p)?,
    };
    match format {
        OutputFormat::Json => println!("{}", serde_json::to_string(&result)?),
        OutputFormat::Text => {
            println!("experiment: {}", result.experiment);
            println!("samples: {}  seed: {}", result.samples, result.seed);
            println!("estimate: {:.6}  std error: {:.6}", result.estimate, result.std_error);
            if let Some(reference) = result.reference {
                println!("reference: {reference:.6}");
            }
            println!("elapsed: {} ms", result.elapsed_ms);
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Evaluates the exact rank-1 expected-density sequence at `p` and packages
/// the float approximation as an experiment document. The value is exact in
/// the library; the document's reference records the asymptotic limit 0.
fn rank1_result(p: u64) -> Result<ExperimentResult> {
    use freeconj::{ExperimentParams, Rank1ExpectedDensitySeq};
    if p < 1 {
        return Err(anyhow!("--p must be at least 1"));
    }
    let started = std::time::Instant::now();
    let mut seq = Rank1ExpectedDensitySeq::new();
    while seq.p() < p {
        seq.step();
    }
    Ok(ExperimentResult {
        experiment: "rank1-expected".to_string(),
        parameters: ExperimentParams {
            p: Some(p),
            ..Default::default()
        },
        seed: 0,
        samples: 0,
        estimate: seq.value_f64(),
        std_error: 0.0,
        reference: Some(0.0),
        elapsed_ms: started.elapsed().as_millis() as u64,
    })
}
