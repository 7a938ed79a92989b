use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use girthwright::canvas::{Canvas, Colouring, Precoloured};
use girthwright::engine::{Engine, EngineError, Extension};
use girthwright::generator::{
    all_connected_planar, make_broken_wheel, make_wheel, random_canvas, random_planar, ListTarget,
};
use girthwright::girth::{girth_profile, Girth};
use girthwright::io::{colouring_map, load_canvas, store_canvas, to_dot, IoError};
use girthwright::oracle::{
    blocked_colourings_of_s, find_colouring, local_girth_sizes, sample_assignment, SearchOutcome,
};
use girthwright::wheels::classify_exception;

const DEFAULT_SEED: u64 = 20;

#[derive(Parser)]
#[command(
    name = "girthwright",
    version,
    about = "List colouring of plane graphs from local girth lists"
)]
struct Cli {
    /// Forbid the exhaustive-search fallback.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Colour the graph of a canvas file from its lists (S is ignored).
    Colour { file: PathBuf },
    /// Extend the precolouring `phi` of S to the whole canvas.
    Extend { file: PathBuf },
    /// Report whether the canvas is exceptional, with the witness.
    Classify { file: PathBuf },
    /// Per-vertex girths.
    Girths { file: PathBuf },
    /// Graphviz rendering of a canvas.
    Dot { file: PathBuf },
    /// Generate canvas files.
    Gen {
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Kind::Canvas)]
        kind: Kind,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 6)]
        universe: usize,
        /// Output directory; files are written to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Colour every connected planar graph up to `n-max` vertices from
    /// sampled local girth lists.
    Stress {
        #[arg(long, default_value_t = 7)]
        n_max: usize,
        #[arg(long, default_value_t = 50)]
        seeds: u64,
        #[arg(long, default_value_t = 6)]
        universe: usize,
        /// Print one line per instance.
        #[arg(long)]
        verbose: bool,
    },
    /// Blocked colourings of S by exhaustive search, and whether `phi`
    /// extends.
    OracleCheck { file: PathBuf },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    /// Every connected planar graph on n vertices, 5/4/3 lists.
    All,
    Random,
    Canvas,
    GirthFive,
    Wheel,
    BrokenWheel,
}

enum Failure {
    Input(String),
    Internal(String),
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::EngineIncomplete | EngineError::NoReductionApplies => {
                Failure::Internal(e.to_string())
            }
            _ => Failure::Input(e.to_string()),
        }
    }
}

/// Exit status 0 for a colouring or report, 1 when a certificate is the
/// answer.
type Outcome = Result<(Value, bool), Failure>;

fn seed_or_env(seed: Option<u64>) -> u64 {
    seed.or_else(|| std::env::var("GIRTHWRIGHT_SEED").ok()?.parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

fn read(path: &Path) -> Result<(Canvas, Option<Colouring>), Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(load_canvas(&text)?)
}

fn girth_json(g: Girth) -> Value {
    match g {
        Girth::Finite(x) => json!(x),
        Girth::Infinite => json!("inf"),
    }
}

fn colour_cmd(file: &Path, strict: bool) -> Outcome {
    let (k, _) = read(file)?;
    let mut e = Engine::strict(strict);
    let phi = e.colour(&k.graph, &k.lists)?;
    let t = e.trace();
    Ok((
        json!({ "colouring": colouring_map(&phi), "fallbacks": t.fallbacks, "reductions": t.steps.len() }),
        false,
    ))
}

fn extend_cmd(file: &Path, strict: bool) -> Outcome {
    let (k, phi) = read(file)?;
    let phi = phi.ok_or_else(|| Failure::Input("extend needs \"phi\"".into()))?;
    let mut e = Engine::strict(strict);
    let out = e.extend(&k, &phi)?;
    let t = e.trace();
    Ok(match out {
        Extension::Coloured(c) => (
            json!({ "colouring": colouring_map(&c), "fallbacks": t.fallbacks, "reductions": t.steps.len() }),
            false,
        ),
        Extension::Exception(cert) => (json!({ "certificate": cert }), true),
    })
}

fn classify_cmd(file: &Path) -> Outcome {
    let (k, phi) = read(file)?;
    let k = match &phi {
        Some(phi) => k.pinned(phi).map_err(|e| Failure::Input(e.to_string()))?,
        None => k,
    };
    k.validate().map_err(|v| Failure::Input(format!("{v:?}")))?;
    let p = girth_profile(&k.graph);
    let cert = classify_exception(&k, &p);
    Ok((
        json!({ "exceptional": cert.is_some(), "certificate": cert }),
        false,
    ))
}

fn girths_cmd(file: &Path) -> Outcome {
    let (k, _) = read(file)?;
    let p = girth_profile(&k.graph);
    let g: Vec<Value> = p.values().iter().map(|&g| girth_json(g)).collect();
    Ok((json!({ "girths": g }), false))
}

fn oracle_cmd(file: &Path) -> Outcome {
    let (k, phi) = read(file)?;
    let blocked: Vec<_> = blocked_colourings_of_s(&k).into_iter().collect();
    let extends = phi.map(|phi| {
        matches!(
            find_colouring(&k.graph, &k.lists, &phi),
            SearchOutcome::Found(_)
        )
    });
    Ok((
        json!({ "S": k.s.vertices(), "blocked": blocked, "phi_extends": extends }),
        false,
    ))
}

fn gen_cmd(
    n: usize,
    kind: Kind,
    seed: Option<u64>,
    count: usize,
    universe: usize,
    out: Option<&Path>,
) -> Outcome {
    let seed = seed_or_env(seed);
    let plain = |g: girthwright::plane_graph::PlaneGraph, rng: &mut ChaCha8Rng| {
        let l = sample_assignment(&local_girth_sizes(&g), universe, rng);
        Canvas::new(g, l, Precoloured::Path(vec![]), Default::default())
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let canvases: Vec<Canvas> = match kind {
        Kind::All => all_connected_planar(n)
            .into_iter()
            .map(|g| plain(g, &mut rng))
            .collect(),
        Kind::Random => (0..count)
            .map(|_| {
                let g = random_planar(n, 0.3, &mut rng);
                plain(g, &mut rng)
            })
            .collect(),
        Kind::Canvas => (0..count as u64)
            .map(|i| random_canvas(n, seed.wrapping_add(i), ListTarget::LocalGirth, universe))
            .collect(),
        Kind::GirthFive => (0..count as u64)
            .map(|i| random_canvas(n, seed.wrapping_add(i), ListTarget::GirthFive, universe))
            .collect(),
        Kind::Wheel => vec![plain(make_wheel(n.max(3)).0, &mut rng)],
        Kind::BrokenWheel => vec![plain(make_broken_wheel(n.max(3)).0, &mut rng)],
    };
    let mut written = Vec::new();
    for (i, k) in canvases.iter().enumerate() {
        let text = store_canvas(k, None);
        match out {
            Some(dir) => {
                std::fs::create_dir_all(dir).map_err(|e| Failure::Input(e.to_string()))?;
                let path = dir.join(format!("instance_{i:04}.json"));
                std::fs::write(&path, text).map_err(|e| Failure::Input(e.to_string()))?;
                written.push(path.display().to_string());
            }
            None => print!("{text}"),
        }
    }
    Ok((json!({ "seed": seed, "written": written.len() }), false))
}

fn stress_cmd(n_max: usize, seeds: u64, universe: usize, strict: bool, verbose: bool) -> Outcome {
    let base = seed_or_env(None);
    let jobs: Vec<(usize, usize, girthwright::plane_graph::PlaneGraph)> = (1..=n_max)
        .flat_map(|n| {
            all_connected_planar(n)
                .into_iter()
                .enumerate()
                .map(move |(i, g)| (n, i, g))
        })
        .collect();
    let fallbacks = AtomicUsize::new(0);
    let lines: Vec<(bool, String)> = jobs
        .par_iter()
        .flat_map_iter(|(n, i, g)| {
            let sizes = local_girth_sizes(g);
            let fallbacks = &fallbacks;
            (0..seeds).map(move |s| {
                let seed = base ^ ((*n as u64) << 48) ^ ((*i as u64) << 16) ^ s;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let l = sample_assignment(&sizes, universe, &mut rng);
                let mut e = Engine::strict(strict);
                let r = e.colour(g, &l);
                fallbacks.fetch_add(e.trace().fallbacks, Ordering::Relaxed);
                let ok = r
                    .as_ref()
                    .is_ok_and(|phi| phi.is_proper(g) && phi.respects(&l));
                let verdict = match &r {
                    Ok(_) if ok => "ok".to_string(),
                    Ok(_) => "invalid colouring".to_string(),
                    Err(err) => err.to_string(),
                };
                (
                    ok,
                    format!(
                        "n={n} graph={i} seed={seed} {verdict} fallbacks={}",
                        e.trace().fallbacks
                    ),
                )
            })
        })
        .collect();
    let failures = lines.iter().filter(|(ok, _)| !ok).count();
    for (ok, line) in &lines {
        if verbose || !ok {
            eprintln!("{line}");
        }
    }
    let report = json!({
        "instances": lines.len(),
        "failures": failures,
        "fallbacks": fallbacks.load(Ordering::Relaxed),
        "strict": strict,
        "seed": base,
    });
    if failures > 0 {
        println!("{report}");
        return Err(Failure::Internal(format!("{failures} instances failed")));
    }
    Ok((report, false))
}

fn run(cli: Cli) -> Outcome {
    match &cli.cmd {
        Cmd::Colour { file } => colour_cmd(file, cli.strict),
        Cmd::Extend { file } => extend_cmd(file, cli.strict),
        Cmd::Classify { file } => classify_cmd(file),
        Cmd::Girths { file } => girths_cmd(file),
        Cmd::Dot { file } => {
            let (k, phi) = read(file)?;
            print!("{}", to_dot(&k, phi.as_ref()));
            Ok((Value::Null, false))
        }
        Cmd::Gen {
            n,
            kind,
            seed,
            count,
            universe,
            out,
        } => gen_cmd(*n, *kind, *seed, *count, *universe, out.as_deref()),
        Cmd::Stress {
            n_max,
            seeds,
            universe,
            verbose,
        } => stress_cmd(*n_max, *seeds, *universe, cli.strict, *verbose),
        Cmd::OracleCheck { file } => oracle_cmd(file),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let quiet_gen = matches!(&cli.cmd, Cmd::Gen { out: None, .. });
    let outcome = std::panic::catch_unwind(|| run(cli))
        .unwrap_or_else(|_| Err(Failure::Internal("internal invariant violated".into())));
    match outcome {
        Ok((v, cert)) => {
            if !v.is_null() && !quiet_gen {
                let sorted: BTreeMap<String, Value> = match v {
                    Value::Object(m) => m.into_iter().collect(),
                    other => BTreeMap::from([("result".into(), other)]),
                };
                println!("{}", serde_json::to_string(&sorted).expect("json"));
            }
            ExitCode::from(if cert { 1 } else { 0 })
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}
