//! `covrel`: analyses of channels, quantum graphs and source-channel coding
//! schemes described by a JSON bundle.
//!
//! Exit codes: 0 success or property true, 1 property false or failed round
//! trip, 2 input error, 3 internal theorem violation.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use covrel::groups::{is_covariant_cp, twirl_cp};
use covrel::json::{to_pretty, Bundle, NamedChannel};
use covrel::linalg::{TOL_PROJ, TOL_SPEC};
use covrel::systems::Element;
use covrel::{
    compose_cp, confusability_of, decoder_for, encoding_is_valid, homomorphism_violations, is_reversible,
    realize_channel, reverse_channel, support_of, verify_scheme, CpMorphism, Error, System, Tol,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "covrel", version, about = "Covariant quantum relations, graphs and zero-error coding")]
struct Cli {
    /// Tolerance for every numerical comparison [default: 1e-9 spectral, 1e-8 projection]
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Write machine-readable JSON output here
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,
    /// Seed for the randomized self-checks
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Relation ranks, confusability graph and reversibility of a channel
    AnalyzeChannel {
        bundle: PathBuf,
        channel: String,
        /// Write the reverse channel (needs -o)
        #[arg(long)]
        emit_reverse: bool,
    },
    /// Realize a confusability graph as the graph of a channel
    GraphToChannel {
        bundle: PathBuf,
        graph: String,
        /// Blend parameter in (0, 1]; chosen automatically when absent
        #[arg(long)]
        tau: Option<f64>,
    },
    /// Whether a channel is a homomorphism between two confusability graphs
    CheckHom {
        bundle: PathBuf,
        channel: String,
        source_graph: String,
        target_graph: String,
    },
    /// Verify a zero-error source-channel coding scheme, synthesizing the decoder if absent
    SccVerify {
        bundle: PathBuf,
        source: String,
        channel: String,
        encoder: String,
        decoder: Option<String>,
    },
    /// Group-average a channel into a covariant one (needs -o)
    Twirl { bundle: PathBuf, channel: String },
}

/// A command outcome: the report printed to stdout, the JSON written with `-o`,
/// and whether the checked property held.
struct Outcome {
    report: Vec<String>,
    output: Option<Value>,
    holds: bool,
}

enum Failure {
    Input(String),
    Theorem(String),
    RoundTrip(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::TheoremViolation(_) => Failure::Theorem(e.to_string()),
            Error::RoundTripFailure { .. } => Failure::RoundTrip(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

fn load(path: &Path, tol: Tol) -> Result<Bundle, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {}", path.display(), e)))?;
    Ok(Bundle::parse(&text, tol)?)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Max distance between `x` and `g(f(x))` over random positive elements of the source.
fn random_loop_defect(f: &CpMorphism, g: &CpMorphism, seed: u64, samples: usize) -> Result<f64, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sys = f.source();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x = random_state(&mut rng, sys);
        worst = worst.max(g.apply(&f.apply(&x)?)?.dist(&x));
    }
    Ok(worst)
}

fn random_state(rng: &mut ChaCha8Rng, sys: &System) -> Element {
    let blocks = sys
        .dims()
        .iter()
        .map(|&d| {
            let a = covrel::ComplexMatrix::from_fn(d, d, |_, _| {
                num_complex::Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            &a * a.adjoint()
        })
        .collect();
    Element { blocks }
}

fn analyze_channel(b: &Bundle, name: &str, emit_reverse: bool, tol: Tol, seed: u64) -> Result<Outcome, Failure> {
    let c = b.channel(name)?;
    let f = &c.morphism;
    let rel = support_of(f, tol.spec)?;
    let graph = confusability_of(f, tol)?;
    let class = graph.classify(tol);
    let is_channel = f.is_channel(tol.proj.max(1e-7));
    let mut report = vec![
        format!("channel {}: {} -> {}", name, c.from, c.to),
        format!("functional preserved: {} (defect {:.3e})", yes_no(is_channel), f.channel_defect()),
        format!("relation ranks: {}", block_ranks(&rel.ranks(), f.target().n_factors())),
        format!("confusability graph ranks: {}", block_ranks(&graph.relation().ranks(), f.source().n_factors())),
        format!("graph is confusability: {}, simple: {}", yes_no(class.is_confusability), yes_no(class.is_simple)),
    ];
    let mut summary = json!({
        "channel": name,
        "is_channel": is_channel,
        "relation_ranks": rel.ranks(),
        "graph_ranks": graph.relation().ranks(),
    });
    if !is_channel {
        report.push("reversible: n/a (not a channel)".into());
        if emit_reverse {
            return Err(Failure::Input("--emit-reverse needs a channel".into()));
        }
        return Ok(Outcome { report, output: Some(json!({"report": summary})), holds: true });
    }
    let reversible = is_reversible(f, tol)?;
    report.push(format!("reversible: {}", yes_no(reversible)));
    summary["reversible"] = json!(reversible);
    let mut out = Bundle::new(b.group.clone());
    if reversible {
        let r = reverse_channel(f, tol)?;
        let defect = compose_cp(&r, f, tol)?.dist(&CpMorphism::identity(f.source()));
        let sampled = random_loop_defect(f, &r, seed, 16)?;
        report.push(format!("reverse o channel = id: defect {:.3e}, sampled states {:.3e}", defect, sampled));
        summary["reverse_defect"] = json!(defect);
        if emit_reverse {
            let from = out.intern_system(f.target(), &c.to);
            let to = out.intern_system(f.source(), &c.from);
            out.channels.insert(
                format!("{}_reverse", name),
                NamedChannel { from, to, morphism: r, covariant: c.covariant },
            );
        }
    } else if emit_reverse {
        report.push("no reverse channel to emit".into());
    }
    let mut v = out.to_json(tol);
    v["report"] = summary;
    Ok(Outcome { report, output: Some(v), holds: true })
}

fn block_ranks(ranks: &[usize], cols: usize) -> String {
    ranks
        .chunks(cols.max(1))
        .map(|row| row.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join(" | ")
}

fn graph_to_channel(b: &Bundle, name: &str, tau: Option<f64>, tol: Tol) -> Result<Outcome, Failure> {
    let g = b.graph(name)?;
    let r = realize_channel(&g.graph, tau, tol)?;
    let passed = r.round_trip_defect < tol.proj.max(1e-7);
    let report = vec![
        format!("graph {} on {}", name, g.system),
        format!("tau: {}", r.tau),
        format!("environment factors: {:?}", r.environment.dims()),
        format!("round trip: {} (defect {:.3e})", if passed { "pass" } else { "FAIL" }, r.round_trip_defect),
    ];
    let mut out = Bundle::new(b.group.clone());
    let from = out.intern_system(g.graph.system(), &g.system);
    let to = out.intern_system(&r.environment, &format!("{}_environment", name));
    out.channels.insert(format!("{}_channel", name), NamedChannel { from, to, morphism: r.channel, covariant: true });
    let mut v = out.to_json(tol);
    v["report"] = json!({"graph": name, "tau": r.tau, "round_trip_defect": r.round_trip_defect, "round_trip": passed});
    Ok(Outcome { report, output: Some(v), holds: passed })
}

fn check_hom(b: &Bundle, channel: &str, ga: &str, gb: &str, tol: Tol) -> Result<Outcome, Failure> {
    let f = &b.channel(channel)?.morphism;
    let (a, bb) = (&b.graph(ga)?.graph, &b.graph(gb)?.graph);
    for (n, g) in [(ga, a), (gb, bb)] {
        if !g.classify(tol).is_confusability {
            return Err(Failure::Input(format!("graph {} is not a confusability graph", n)));
        }
    }
    if !f.is_channel(tol.proj.max(1e-7)) {
        return Err(Failure::Input(format!("{} is not a channel (defect {:.3e})", channel, f.channel_defect())));
    }
    let bad = homomorphism_violations(f, a, bb, tol)?;
    let holds = bad.is_empty();
    let mut report = vec![holds.to_string()];
    if let Some(&(i, j, d)) = bad.first() {
        report.push(format!("witness: block ({}, {}) of the pulled-back graph exceeds {} (defect {:.3e})", i, j, ga, d));
    }
    let witnesses: Vec<Value> = bad.iter().map(|&(i, j, d)| json!({"block": [i, j], "defect": d})).collect();
    let output = json!({"report": {"channel": channel, "source_graph": ga, "target_graph": gb, "homomorphism": holds, "witnesses": witnesses}});
    Ok(Outcome { report, output: Some(output), holds })
}

fn scc_verify(
    b: &Bundle,
    source: &str,
    channel: &str,
    encoder: &str,
    decoder: Option<&str>,
    tol: Tol,
    seed: u64,
) -> Result<Outcome, Failure> {
    let src = &b.source(source)?.source;
    let n = &b.channel(channel)?.morphism;
    let e = &b.channel(encoder)?.morphism;
    let valid = encoding_is_valid(e, src, n, tol)?;
    let mut report = vec![format!("encoding {}: {}", encoder, if valid { "valid" } else { "invalid" })];
    let mut summary = json!({"source": source, "channel": channel, "encoder": encoder, "valid": valid});
    if !valid {
        return Ok(Outcome { report, output: Some(json!({"report": summary})), holds: false });
    }
    let mut out = Bundle::new(b.group.clone());
    let d = match decoder {
        Some(name) => b.channel(name)?.morphism.clone(),
        None => {
            let d = decoder_for(e, src, n, tol)?;
            let joint = covrel::tensor_system(n.target(), src.ob_system())?;
            let from = out.intern_system(joint.product(), "decoder_input");
            let to = out.intern_system(src.s_system(), &b.source(source)?.s);
            out.channels.insert("decoder".into(), NamedChannel { from, to, morphism: d.clone(), covariant: true });
            report.push("decoder synthesized".into());
            d
        }
    };
    let works = verify_scheme(src, n, e, &d, tol)?;
    let pipeline = compose_cp(&d, &covrel::scc::composite(e, src, n, tol)?, tol)?;
    let sampled = random_loop_defect(&CpMorphism::identity(src.s_system()), &pipeline, seed, 16)?;
    report.push(format!("pipeline is the identity: {} (sampled states {:.3e})", yes_no(works), sampled));
    summary["decoder_verified"] = json!(works);
    let mut v = out.to_json(tol);
    v["report"] = summary;
    Ok(Outcome { report, output: Some(v), holds: works })
}

fn twirl(b: &Bundle, name: &str, tol: Tol) -> Result<Outcome, Failure> {
    let c = b.channel(name)?;
    let t = twirl_cp(&c.morphism)?;
    let already = is_covariant_cp(&c.morphism, tol.proj)?;
    let report = vec![
        format!("channel {} covariant before twirling: {}", name, yes_no(already)),
        format!("distance moved: {:.3e}", t.dist(&c.morphism)),
    ];
    let mut out = Bundle::new(b.group.clone());
    let from = out.intern_system(t.source(), &c.from);
    let to = out.intern_system(t.target(), &c.to);
    out.channels.insert(format!("{}_twirled", name), NamedChannel { from, to, morphism: t, covariant: true });
    Ok(Outcome { report, output: Some(out.to_json(tol)), holds: true })
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let tol = cli.tol.map_or(Tol::new(TOL_SPEC, TOL_PROJ), Tol::uniform);
    if !(tol.spec > 0.0 && tol.spec < 1.0) {
        return Err(Failure::Input("--tol must lie in (0, 1)".into()));
    }
    let needs_output = matches!(cli.command, Command::Twirl { .. } | Command::AnalyzeChannel { emit_reverse: true, .. });
    if needs_output && cli.output.is_none() {
        return Err(Failure::Input("this command writes JSON; pass -o <path>".into()));
    }
    match &cli.command {
        Command::AnalyzeChannel { bundle, channel, emit_reverse } => {
            analyze_channel(&load(bundle, tol)?, channel, *emit_reverse, tol, cli.seed)
        }
        Command::GraphToChannel { bundle, graph, tau } => graph_to_channel(&load(bundle, tol)?, graph, *tau, tol),
        Command::CheckHom { bundle, channel, source_graph, target_graph } => {
            check_hom(&load(bundle, tol)?, channel, source_graph, target_graph, tol)
        }
        Command::SccVerify { bundle, source, channel, encoder, decoder } => {
            scc_verify(&load(bundle, tol)?, source, channel, encoder, decoder.as_deref(), tol, cli.seed)
        }
        Command::Twirl { bundle, channel } => twirl(&load(bundle, tol)?, channel, tol),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            for line in &outcome.report {
                println!("{}", line);
            }
            if let (Some(path), Some(v)) = (&cli.output, &outcome.output) {
                if let Err(e) = fs::write(path, to_pretty(v)) {
                    eprintln!("error: cannot write {}: {}", path.display(), e);
                    return ExitCode::from(2);
                }
            }
            ExitCode::from(if outcome.holds { 0 } else { 1 })
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
        Err(Failure::RoundTrip(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(1)
        }
        Err(Failure::Theorem(msg)) => {
            eprintln!("internal error: {}", msg);
            ExitCode::from(3)
        }
    }
}
