//! Batch front end: enumeration, condition verification, witness searches,
//! the word translation and certificate replay, with JSON reports.
//!
//! Exit codes: 0 for PASS or witness found, 1 for FAIL with certificate,
//! 2 for undecided at scale, 3 for usage or parse errors.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use treeramsey::adversary::{set_color_pruning, ParameterSearch, ScaleGuard};
use treeramsey::embed::{enumerate, Flavor};
use treeramsey::framework::{
    check_background_axioms, check_condition, check_p, check_pointwise, check_r, Certificate,
    ColoringCertificate, Condition, Verdict,
};
use treeramsey::hjhl::{
    hj_search, hl_check, translate_hj_to_hl, HjVariant, HlVariant, ParameterWord,
};
use treeramsey::instances::{
    build_instance, classical_p_candidates, gen_ramsey_search, milliken_search, GenFlavor,
    Instance, InstanceKind, MillikenFlavor, WitnessSearch,
};
use treeramsey::tree::OrderedTree;
use treeramsey::Error;

#[derive(Parser)]
#[command(name = "treeramsey", about = "Finite Ramsey verification and search over ordered trees")]
struct Cli {
    /// Emit the full JSON report on stdout.
    #[arg(long, global = true)]
    json: bool,

    /// Write the FAIL certificate (if any) to this path for later replay.
    #[arg(long, global = true)]
    certificate: Option<PathBuf>,

    /// Override the point cap of the scale guard.
    #[arg(long, global = true)]
    max_points: Option<usize>,

    /// Disable all scale guards.
    #[arg(long, global = true)]
    unsafe_scale: bool,

    /// Adversary pruning mode.
    #[arg(long, global = true, value_enum, default_value_t = PruneMode::Colors)]
    prune: PruneMode,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PruneMode {
    Colors,
    None,
}

#[derive(Subcommand)]
enum Command {
    /// Count (and optionally list) the flavor maps between two trees.
    Enumerate {
        /// Domain tree: `chain:N`, `regular:K,N`, `single`, `empty`, or JSON.
        #[arg(long)]
        domain: String,
        #[arg(long)]
        codomain: String,
        #[arg(long, value_enum)]
        flavor: FlavorArg,
        /// List the image sequences as well.
        #[arg(long)]
        list: bool,
    },
    /// Run a condition checker against a sampled instance.
    Verify(VerifyArgs),
    /// Run one of the witness searches.
    Search(SearchArgs),
    /// Split a parameter word over a product alphabet and verify that the
    /// induced maps form a strong sequence.
    Translate {
        /// Base alphabet size.
        #[arg(short = 'k', long)]
        k: usize,
        /// Number of coordinates.
        #[arg(short = 't', long)]
        t: usize,
        /// The word as JSON: {"alphabet":…, "m":…, "letters":[…]}.
        #[arg(long)]
        word: String,
    },
    /// Re-verify a stored FAIL certificate without re-searching.
    Replay {
        #[arg(long)]
        certificate: PathBuf,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    instance: KindArg,
    /// Branching parameter for the tree instances.
    #[arg(short = 'k', long, default_value_t = 2)]
    k: usize,
    /// maxN for classical/star/milliken, truncation level for branch.
    #[arg(long)]
    size: usize,
    #[arg(long, value_enum)]
    condition: ConditionArg,
    /// Acting family name, e.g. `inj(6,3)`, for the R check.
    #[arg(long)]
    family: Option<String>,
    /// Colored family name, e.g. `inj(3,2)`, for the R and P checks.
    #[arg(long)]
    pset: Option<String>,
    /// Element label for the fiber base point of the P check, e.g. `(1)`.
    #[arg(long)]
    y: Option<String>,
    #[arg(short = 'd', long, default_value_t = 2)]
    d: usize,
}

#[derive(Args)]
struct SearchArgs {
    #[command(subcommand)]
    kind: SearchKind,
}

#[derive(Subcommand)]
enum SearchKind {
    /// Leaf-preserving (or reduced plain) embedding witness search.
    Gen {
        #[arg(long)]
        s: String,
        #[arg(long)]
        t: String,
        #[arg(short = 'd', long, default_value_t = 2)]
        d: usize,
        #[arg(long, value_enum, default_value_t = GenFlavorArg::Leaf)]
        flavor: GenFlavorArg,
        #[arg(long, default_value_t = 4)]
        max_extra: usize,
    },
    /// Strong (leaf-preserving) embedding witness search.
    Milliken {
        #[arg(long)]
        s: String,
        #[arg(long)]
        t: String,
        #[arg(short = 'd', long, default_value_t = 2)]
        d: usize,
        #[arg(long, value_enum, default_value_t = MillikenFlavorArg::Strongleaf)]
        flavor: MillikenFlavorArg,
        #[arg(long, default_value_t = 4)]
        max_extra: usize,
    },
    /// Least dimension for the combinatorial line statement.
    Hj {
        #[arg(short = 'k', long)]
        k: usize,
        #[arg(short = 'm', long)]
        m: usize,
        #[arg(short = 'd', long, default_value_t = 2)]
        d: usize,
        #[arg(long, value_enum, default_value_t = HjVariantArg::A)]
        variant: HjVariantArg,
        #[arg(long, default_value_t = 4)]
        max_n: usize,
    },
    /// Strong subtree statement: check one dimension or search the least one.
    Hl {
        #[arg(short = 'k', long)]
        k: usize,
        #[arg(short = 't', long)]
        t: usize,
        #[arg(short = 'm', long)]
        m: usize,
        #[arg(short = 'd', long, default_value_t = 2)]
        d: usize,
        /// Check at this dimension only; otherwise search upward from m.
        #[arg(short = 'n', long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 4)]
        max_n: usize,
        #[arg(long, value_enum, default_value_t = HlVariantArg::Hl1)]
        variant: HlVariantArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FlavorArg {
    Emb,
    Leaf,
    Strong,
    Strongleaf,
}

impl From<FlavorArg> for Flavor {
    fn from(f: FlavorArg) -> Flavor {
        match f {
            FlavorArg::Emb => Flavor::Embedding,
            FlavorArg::Leaf => Flavor::LeafPreserving,
            FlavorArg::Strong => Flavor::Strong,
            FlavorArg::Strongleaf => Flavor::StrongLeaf,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Classical,
    Star,
    Branch,
    Milliken,
}

impl From<KindArg> for InstanceKind {
    fn from(k: KindArg) -> InstanceKind {
        match k {
            KindArg::Classical => InstanceKind::Classical,
            KindArg::Star => InstanceKind::Star,
            KindArg::Branch => InstanceKind::Branch,
            KindArg::Milliken => InstanceKind::Milliken,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ConditionArg {
    Axioms,
    Pointwise,
    A,
    B,
    Star,
    P,
    R,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenFlavorArg {
    Leaf,
    Emb,
}

#[derive(Clone, Copy, ValueEnum)]
enum MillikenFlavorArg {
    Strongleaf,
    Strong,
}

#[derive(Clone, Copy, ValueEnum)]
enum HjVariantArg {
    /// Color the words of full length n.
    A,
    /// Color all words of length at most n.
    B,
}

#[derive(Clone, Copy, ValueEnum)]
enum HlVariantArg {
    Hl1,
    Hl2,
}

#[derive(Serialize)]
struct RunReport {
    schema: u32,
    command: String,
    parameters: Value,
    verdict: Value,
    wall_ms: u128,
    engine: Value,
}

/// Outcome levels in exit-code order.
enum Outcome {
    Pass,
    FailWithCertificate,
    Undecided,
}

fn parse_tree(spec: &str) -> Result<OrderedTree> {
    if spec == "empty" {
        return Ok(OrderedTree::empty());
    }
    if spec == "single" {
        return Ok(OrderedTree::singleton());
    }
    if let Some(rest) = spec.strip_prefix("chain:") {
        let n: usize = rest.parse().context("chain length")?;
        return Ok(OrderedTree::chain(n));
    }
    if let Some(rest) = spec.strip_prefix("regular:") {
        let (k, n) = rest
            .split_once(',')
            .ok_or_else(|| anyhow!("regular:K,N expected"))?;
        return Ok(OrderedTree::regular(k.trim().parse()?, n.trim().parse()?));
    }
    serde_json::from_str(spec).context("tree JSON")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Keep clap's message but pin the documented usage exit code.
            let _ = e.print();
            return ExitCode::from(3);
        }
    };
    set_color_pruning(cli.prune == PruneMode::Colors);
    let mut guard = ScaleGuard::default();
    if let Some(cap) = cli.max_points {
        guard.max_points_two_colors = cap;
        guard.max_points_many_colors = cap;
    }
    if cli.unsafe_scale {
        guard.unlimited = true;
    }
    match run(&cli, &guard) {
        Ok(code) => code,
        Err(e) => {
            if let Some(Error::ScaleExceeded { .. }) = e.downcast_ref::<Error>() {
                eprintln!("undecided at scale: {e}");
                return ExitCode::from(2);
            }
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: &Cli, guard: &ScaleGuard) -> Result<ExitCode> {
    let start = Instant::now();
    let (name, parameters, verdict_json, outcome, certificate) = match &cli.command {
        Command::Enumerate {
            domain,
            codomain,
            flavor,
            list,
        } => {
            let dom = parse_tree(domain)?;
            let cod = parse_tree(codomain)?;
            let maps = enumerate(&dom, &cod, (*flavor).into());
            let mut verdict = json!({ "count": maps.len() });
            if *list {
                verdict["maps"] =
                    json!(maps.iter().map(|m| m.image().to_vec()).collect::<Vec<_>>());
            }
            println!("{} maps", maps.len());
            if *list {
                for m in &maps {
                    println!("  {}", m.image_label());
                }
            }
            (
                "enumerate",
                json!({ "domain": dom, "codomain": cod }),
                verdict,
                Outcome::Pass,
                None,
            )
        }
        Command::Verify(args) => run_verify(args, guard)?,
        Command::Search(args) => run_search(&args.kind, guard)?,
        Command::Translate { k, t, word } => {
            let word: ParameterWord = {
                #[derive(serde::Deserialize)]
                struct Raw {
                    alphabet: usize,
                    m: usize,
                    letters: Vec<treeramsey::hjhl::Letter>,
                }
                let raw: Raw = serde_json::from_str(word).context("word JSON")?;
                ParameterWord::new(raw.alphabet, raw.m, raw.letters)?
            };
            let translated = translate_hj_to_hl(&word, *t, *k)?;
            println!(
                "strong sequence of {} induced embeddings over {} letters",
                translated.words.len(),
                k
            );
            (
                "translate",
                json!({ "k": k, "t": t }),
                serde_json::to_value(&translated)?,
                Outcome::Pass,
                None,
            )
        }
        Command::Replay { certificate } => {
            let text = std::fs::read_to_string(certificate)
                .with_context(|| format!("reading {}", certificate.display()))?;
            let cert: ColoringCertificate = serde_json::from_str(&text)?;
            let ok = cert.reverify();
            println!(
                "certificate {}",
                if ok {
                    "reproduces its violation"
                } else {
                    "does NOT re-verify"
                }
            );
            (
                "replay",
                json!({ "path": certificate.display().to_string() }),
                json!({ "reproduces": ok }),
                if ok {
                    Outcome::Pass
                } else {
                    Outcome::FailWithCertificate
                },
                None,
            )
        }
    };

    if let (Some(path), Some(cert)) = (&cli.certificate, &certificate) {
        std::fs::write(path, serde_json::to_string_pretty(cert)?)
            .with_context(|| format!("writing {}", path.display()))?;
        println!("certificate written to {}", path.display());
    }

    let report = RunReport {
        schema: 1,
        command: name.to_string(),
        parameters,
        verdict: verdict_json,
        wall_ms: start.elapsed().as_millis(),
        engine: json!({
            "guards": guard,
            "prune": if cli.prune == PruneMode::Colors { "colors" } else { "none" },
        }),
    };
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    }
    Ok(match outcome {
        Outcome::Pass => ExitCode::SUCCESS,
        Outcome::FailWithCertificate => ExitCode::from(1),
        Outcome::Undecided => ExitCode::from(2),
    })
}

type StepResult = (
    &'static str,
    Value,
    Value,
    Outcome,
    Option<ColoringCertificate>,
);

fn verdict_outcome(v: &Verdict) -> (Outcome, Option<ColoringCertificate>) {
    match v.certificate() {
        None => (Outcome::Pass, None),
        Some(Certificate::BadColoring(c)) => (Outcome::FailWithCertificate, Some(c.clone())),
        Some(Certificate::CandidatesFailed { reports }) => {
            let cert = reports.iter().find_map(|r| r.bad_coloring.clone());
            (Outcome::FailWithCertificate, cert)
        }
        Some(_) => (Outcome::FailWithCertificate, None),
    }
}

fn lookup_family(inst: &Instance, name: &str) -> Result<usize> {
    inst.f_set_named(name).ok_or_else(|| {
        anyhow!(
            "unknown family {name}; listed: {:?}",
            inst.pair.f_sets.iter().map(|s| &s.name).collect::<Vec<_>>()
        )
    })
}

fn run_verify(args: &VerifyArgs, guard: &ScaleGuard) -> Result<StepResult> {
    let inst = build_instance(args.instance.into(), args.k, args.size, guard)?;
    let params = json!({
        "instance": format!("{:?}", InstanceKind::from(args.instance)),
        "k": args.k,
        "size": args.size,
        "d": args.d,
    });
    let verdict = match args.condition {
        ConditionArg::Axioms => check_background_axioms(&inst.bg),
        ConditionArg::Pointwise => check_pointwise(&inst.bg, &inst.pair),
        ConditionArg::A => check_condition(&inst.bg, &inst.pair, Condition::A),
        ConditionArg::B => check_condition(&inst.bg, &inst.pair, Condition::B),
        ConditionArg::Star => check_condition(&inst.bg, &inst.pair, Condition::Star),
        ConditionArg::R => {
            let family = args
                .family
                .as_deref()
                .ok_or_else(|| anyhow!("--family required for R"))?;
            let pset = args
                .pset
                .as_deref()
                .ok_or_else(|| anyhow!("--pset required for R"))?;
            let f = lookup_family(&inst, family)?;
            let p = inst
                .p_set_named(pset)
                .ok_or_else(|| anyhow!("unknown p-family {pset}"))?;
            check_r(&inst.bg, &inst.pair, f, p, args.d, guard)?
        }
        ConditionArg::P => {
            let pset = args
                .pset
                .as_deref()
                .ok_or_else(|| anyhow!("--pset required for P"))?;
            let ylbl = args.y.as_deref().ok_or_else(|| anyhow!("--y required for P"))?;
            let p = inst
                .p_set_named(pset)
                .ok_or_else(|| anyhow!("unknown p-family {pset}"))?;
            let y = inst
                .x_labeled(ylbl)
                .ok_or_else(|| anyhow!("unknown element {ylbl}"))?;
            let candidates = classical_p_candidates(&inst, p, y, args.d)?;
            check_p(&inst.bg, &inst.pair, p, y, &candidates, args.d, guard)?
        }
    };
    let (outcome, cert) = verdict_outcome(&verdict);
    println!(
        "{}",
        match &verdict {
            Verdict::Pass { detail } => format!(
                "PASS{}",
                detail
                    .as_ref()
                    .map(|d| format!(" — {d}"))
                    .unwrap_or_default()
            ),
            Verdict::Fail { .. } => "FAIL (certificate available)".to_string(),
        }
    );
    Ok((
        "verify",
        params,
        serde_json::to_value(&verdict)?,
        outcome,
        cert,
    ))
}

fn witness_step(name: &'static str, params: Value, report: WitnessSearch) -> Result<StepResult> {
    let (outcome, cert) = match (&report.witness, report.refutations.last()) {
        (Some(_), _) => (Outcome::Pass, None),
        (None, last) => (Outcome::Undecided, last.map(|(_, c)| c.clone())),
    };
    match (&report.witness, report.height) {
        (Some(v), Some(h)) => println!(
            "witness {} at height {h} ({} refuted heights)",
            v,
            report.refutations.len()
        ),
        _ => println!(
            "undecided at scale after {} refuted heights",
            report.refutations.len()
        ),
    }
    Ok((name, params, serde_json::to_value(&report)?, outcome, cert))
}

fn run_search(kind: &SearchKind, guard: &ScaleGuard) -> Result<StepResult> {
    match kind {
        SearchKind::Gen {
            s,
            t,
            d,
            flavor,
            max_extra,
        } => {
            let s = parse_tree(s)?;
            let t = parse_tree(t)?;
            let flavor = match flavor {
                GenFlavorArg::Leaf => GenFlavor::LeafPreserving,
                GenFlavorArg::Emb => GenFlavor::Embedding,
            };
            let report = gen_ramsey_search(&s, &t, *d, flavor, *max_extra, guard)?;
            witness_step("search.gen", json!({ "s": s, "t": t, "d": d }), report)
        }
        SearchKind::Milliken {
            s,
            t,
            d,
            flavor,
            max_extra,
        } => {
            let s = parse_tree(s)?;
            let t = parse_tree(t)?;
            let flavor = match flavor {
                MillikenFlavorArg::Strongleaf => MillikenFlavor::StrongLeaf,
                MillikenFlavorArg::Strong => MillikenFlavor::Strong,
            };
            let report = milliken_search(&s, &t, *d, flavor, *max_extra, guard)?;
            witness_step("search.milliken", json!({ "s": s, "t": t, "d": d }), report)
        }
        SearchKind::Hj {
            k,
            m,
            d,
            variant,
            max_n,
        } => {
            let variant = match variant {
                HjVariantArg::A => HjVariant::Full,
                HjVariantArg::B => HjVariant::Cumulative,
            };
            let result = hj_search(*k, *m, *d, variant, *max_n, guard)?;
            let outcome = match &result {
                ParameterSearch::Found { value, .. } => {
                    println!(
                        "least n = {value} ({} refuted below)",
                        result.refutations().len()
                    );
                    Outcome::Pass
                }
                ParameterSearch::UndecidedAtScale { tried_up_to, .. } => {
                    println!("undecided at scale; every n ≤ {tried_up_to} refuted");
                    Outcome::Undecided
                }
            };
            Ok((
                "search.hj",
                json!({ "k": k, "m": m, "d": d }),
                serde_json::to_value(&result)?,
                outcome,
                None,
            ))
        }
        SearchKind::Hl {
            k,
            t,
            m,
            d,
            n,
            variant,
        } => {
            let variant = match variant {
                HlVariantArg::Hl1 => HlVariant::Hl1,
                HlVariantArg::Hl2 => HlVariant::Hl2,
            };
            let verdict = hl_check(*k, *t, *m, *d, *n, variant, guard)?;
            let (outcome, cert) = verdict_outcome(&verdict);
            println!(
                "{}",
                if verdict.passed() {
                    "PASS"
                } else {
                    "FAIL (certificate available)"
                }
            );
            Ok((
                "search.hl",
                json!({ "k": k, "t": t, "m": m, "d": d, "n": n }),
                serde_json::to_value(&verdict)?,
                outcome,
                cert,
            ))
        }
    }
}
