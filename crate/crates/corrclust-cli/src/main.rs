//! `corrclust`: generate instances, cluster them with any backend, score
//! clusterings, and check decompositions.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;

use corrclust::access::InsertionStream;
use corrclust::generate::{gen_churn_stream, shuffled_stream};
use corrclust::io::{self, FileKind};
use corrclust::pipeline::{exact_cluster, RunStats};
use corrclust::util::{purpose, stream_rng};
use corrclust::verify::DEFAULT_ETA0;
use corrclust::{
    brute_force_optimal, clustering_cost, dynamic_streaming_cluster, gen_matrix_index_instance, gen_or_instance,
    gen_planted, gen_random, minus_stream_adapter, streaming_cluster, streaming_cluster_plus_only,
    sublinear_time_cluster, verify_decomposition, AdjacencyOracle, DynamicConfig, Label, Params, PlantedSpec,
    RecoveryConfig, RunReport, VerifyMode,
};

/// Inside the window where planted cliques of a few dozen vertices come out dense.
const DEFAULT_EXACT_EPS: f64 = 0.07;
const DEFAULT_SAMPLING_EPS: f64 = 0.0145;

#[derive(Parser, Debug)]
#[command(name = "corrclust", version, about = "Correlation clustering via sparse-dense decomposition")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Write a generated instance.
    Generate {
        #[command(subcommand)]
        what: Gen,
    },
    /// Cluster a graph or stream file.
    Cluster(ClusterArgs),
    /// Cost of a clustering, optionally against the exhaustive optimum.
    Eval {
        graph: PathBuf,
        clustering: PathBuf,
        /// Also compute OPT by exhaustive search (n ≤ 12).
        #[arg(long)]
        opt: bool,
    },
    /// Check a decomposition against its graph; exit code 0 iff it passes.
    Verify {
        graph: PathBuf,
        decomposition: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long = "verify-mode", value_enum, default_value_t = VerifyKind::Structural)]
        mode: VerifyKind,
        /// δ for structural mode (defaults to ε).
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_ETA0)]
        eta0: f64,
    },
}

#[derive(Args, Debug)]
struct Out {
    /// Output file; stdout when absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[arg(long, env = "CC_SEED", default_value_t = 0)]
    seed: u64,
    /// Emit the instance as a stream of this kind instead of a graph file.
    #[arg(long, value_enum, default_value_t = Emit::Graph)]
    emit: Emit,
    /// Churn probability for `--emit dyn`.
    #[arg(long, default_value_t = 0.0)]
    churn: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Emit {
    Graph,
    /// All pairs, labeled, in seeded random order.
    Stream,
    /// Positive pairs only.
    StreamPlus,
    /// Negative pairs only.
    StreamMinus,
    /// Dynamic stream ending at the graph.
    Dyn,
}

#[derive(Subcommand, Debug)]
enum Gen {
    /// Planted cliques with label noise.
    Planted {
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        extra: usize,
        #[command(flatten)]
        out: Out,
    },
    /// Each pair (+) independently.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[command(flatten)]
        out: Out,
    },
    /// All (−) except possibly one pair.
    Or {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        bit: u8,
        /// 1-based lexicographic pair index.
        #[arg(long)]
        index: u64,
        #[command(flatten)]
        out: Out,
    },
    /// The 203·N-vertex Matrix-INDEX gadget; M is seeded random with M(i*, j*) = bit.
    Mindex {
        #[arg(long = "N")]
        blocks: usize,
        #[arg(long)]
        bit: u8,
        #[arg(long, default_value_t = 1)]
        i: usize,
        #[arg(long, default_value_t = 1)]
        j: usize,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Query,
    Stream,
    StreamPlus,
    Dynamic,
    MinusAdapter,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum VerifyKind {
    Structural,
    Algorithmic,
    Inflated,
}

#[derive(Args, Debug)]
struct ClusterArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    /// Defaults to 0.07 for exact mode and 0.0145 for the sampling modes.
    #[arg(long)]
    eps: Option<f64>,
    /// δ for the exact mode (defaults to ε).
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = corrclust::recovery::DEFAULT_C)]
    c: f64,
    /// Vertex-sampler constant for stream modes (defaults to c).
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, env = "CC_SEED", default_value_t = 0)]
    seed: u64,
    /// ℓ0 samplers per stored vertex in the dynamic bucket sampler, per 2^i·ln n.
    #[arg(long)]
    bucket_copies: Option<f64>,
    /// Number of vertices; required for stream modes.
    #[arg(long)]
    n: Option<usize>,
    /// Clustering output; stdout when absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Decomposition output.
    #[arg(long)]
    decomp: Option<PathBuf>,
    /// Run report output; stderr when absent.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Check the decomposition against the (finalized) graph and add the result to the report.
    #[arg(long = "verify-mode", value_enum)]
    verify_mode: Option<VerifyKind>,
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            use std::io::Write;
            match std::io::stdout().lock().write_all(text.as_bytes()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
                _ => Ok(()),
            }
        }
    }
}

fn read(p: &Path) -> Result<String> {
    fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))
}

fn write_instance(g: &corrclust::LabeledGraph, out: &Out) -> Result<()> {
    let text = match out.emit {
        Emit::Graph => io::write_graph(g),
        Emit::Stream => io::write_stream(&shuffled_stream(g, out.seed)),
        Emit::StreamPlus => io::write_stream(&InsertionStream::plus_only(g)),
        Emit::StreamMinus => {
            let mut s = InsertionStream::from_graph(g);
            s.records.retain(|r| r.2 == Label::Neg);
            io::write_stream(&s)
        }
        Emit::Dyn => io::write_dynamic(&gen_churn_stream(g, out.churn, out.seed)),
    };
    emit(&out.out, &text)
}

fn cmd_generate(what: Gen) -> Result<()> {
    match what {
        Gen::Planted { sizes, noise, extra, out } => {
            let p = gen_planted(&PlantedSpec::new(sizes, noise, extra, out.seed))?;
            write_instance(&p.graph, &out)
        }
        Gen::Random { n, p, out } => {
            ensure!((0.0..=1.0).contains(&p), "--p must lie in [0, 1]");
            ensure!(n >= 1, "--n must be at least 1");
            write_instance(&gen_random(n, p, out.seed), &out)
        }
        Gen::Or { n, bit, index, out } => {
            ensure!(bit <= 1, "--bit must be 0 or 1");
            write_instance(&gen_or_instance(n, index, bit == 1)?, &out)
        }
        Gen::Mindex { blocks, bit, i, j, out } => {
            ensure!(bit <= 1, "--bit must be 0 or 1");
            let mut rng = stream_rng(out.seed, purpose::GENERATOR, 9);
            let mut m: Vec<Vec<bool>> = (0..blocks).map(|_| (0..blocks).map(|_| rng.random()).collect()).collect();
            if (1..=blocks).contains(&i) && (1..=blocks).contains(&j) {
                m[i - 1][j - 1] = bit == 1;
            }
            let (g, _) = gen_matrix_index_instance(blocks, &m, i, j)?;
            write_instance(&g, &out)
        }
    }
}

fn expect_kind(text: &str, want: FileKind, mode: Mode) -> Result<()> {
    let got = io::detect_kind(text);
    ensure!(got == Some(want), "mode {mode:?} needs a {want:?} file, got {got:?}");
    Ok(())
}

fn stream_n(args: &ClusterArgs, header_n: usize) -> Result<usize> {
    let Some(n) = args.n else { bail!("--n is required for mode {:?}", args.mode) };
    ensure!(n == header_n, "--n {n} disagrees with the file header n = {header_n}");
    Ok(n)
}

fn render_report(r: &RunReport, verify: Option<&corrclust::VerifyReport>) -> String {
    let d = &r.decomposition;
    let mut s = format!("{}\n", r.config);
    s += &format!(
        "clusters={} sparse={} cliques={}\n",
        r.clustering.num_clusters(),
        d.sparse.len(),
        d.cliques.len()
    );
    match &r.stats {
        RunStats::Exact => {}
        RunStats::Query { degree_queries, neighbor_queries } => {
            s += &format!(
                "degree_queries={degree_queries} neighbor_queries={neighbor_queries} total_queries={}\n",
                degree_queries + neighbor_queries
            );
        }
        RunStats::Stream { records, skipped_minus, peak_stored_edges } => {
            s += &format!("records={records} skipped_minus={skipped_minus} peak_stored_edges={peak_stored_edges}\n");
        }
        RunStats::Dynamic { updates, ns_failures, vertices_without_samples, bucket_failures, sketch_bytes } => {
            s += &format!(
                "updates={updates} ns_failures={ns_failures} vertices_without_samples={vertices_without_samples} \
                 bucket_failures={bucket_failures} sketch_bytes={sketch_bytes}\n"
            );
        }
    }
    if let (Some(k), Some(dc), Some(l)) = (r.sample_size, r.dense_candidates, r.laminar) {
        s += &format!("sample_size={k} dense_candidates={dc} laminar={l}\n");
    }
    if let Some(v) = verify {
        s += &format!("verify={} violations={}\n", if v.pass { "pass" } else { "fail" }, v.violations());
    }
    s += &format!("wall_ms={:.3}\n", r.wall_time.as_secs_f64() * 1e3);
    s
}

fn verify_mode(kind: VerifyKind, eps: f64, delta: Option<f64>, eta0: f64) -> VerifyMode {
    match kind {
        VerifyKind::Structural => VerifyMode::Structural { delta: delta.unwrap_or(eps) },
        VerifyKind::Algorithmic => VerifyMode::Algorithmic { eta0 },
        VerifyKind::Inflated => VerifyMode::Inflated,
    }
}

fn cmd_cluster(args: ClusterArgs) -> Result<()> {
    let text = read(&args.input)?;
    let eps = args.eps.unwrap_or(if args.mode == Mode::Exact { DEFAULT_EXACT_EPS } else { DEFAULT_SAMPLING_EPS });
    let dyn_cfg = |cfg: RecoveryConfig| {
        let mut d = DynamicConfig::new(cfg);
        if let Some(k) = args.bucket_copies {
            d.bucket_copies = k;
        }
        d
    };
    let rc = || -> Result<RecoveryConfig> {
        let mut cfg = RecoveryConfig::new(eps, args.seed)?.with_c(args.c)?;
        if let Some(b) = args.beta {
            cfg = cfg.with_beta(b)?;
        }
        Ok(cfg)
    };
    let (report, graph) = match args.mode {
        Mode::Exact => {
            expect_kind(&text, FileKind::Graph, args.mode)?;
            let g = io::parse_graph(&text)?;
            let p = Params::loose(eps, args.delta.unwrap_or(eps))?;
            (exact_cluster(&g, p), g)
        }
        Mode::Query => {
            expect_kind(&text, FileKind::Graph, args.mode)?;
            let g = io::parse_graph(&text)?;
            let r = sublinear_time_cluster(&AdjacencyOracle::new(&g), &rc()?);
            (r, g)
        }
        Mode::Stream | Mode::StreamPlus | Mode::MinusAdapter => {
            expect_kind(&text, FileKind::Stream, args.mode)?;
            let s = io::parse_stream(&text)?;
            let n = stream_n(&args, s.n)?;
            let cfg = rc()?;
            match args.mode {
                Mode::Stream => (streaming_cluster(&s, n, &cfg)?, s.to_graph()?),
                Mode::StreamPlus => (streaming_cluster_plus_only(&s, n, &cfg)?, s.to_graph()?),
                _ => {
                    if let Some(&(u, v, _)) = s.records.iter().find(|r| r.2 == Label::Pos) {
                        bail!("minus-adapter input must hold only (-) records, found ({u}, {v}, +)");
                    }
                    let minus: Vec<_> = s.records.iter().map(|&(u, v, _)| (u, v)).collect();
                    let d = minus_stream_adapter(&minus, n);
                    let g = corrclust::finalize_dynamic(&d, n)?;
                    (dynamic_streaming_cluster(&d, n, &dyn_cfg(cfg))?, g)
                }
            }
        }
        Mode::Dynamic => {
            expect_kind(&text, FileKind::Dynamic, args.mode)?;
            let s = io::parse_dynamic(&text)?;
            let n = stream_n(&args, s.n)?;
            let g = corrclust::finalize_dynamic(&s, n)?;
            (dynamic_streaming_cluster(&s, n, &dyn_cfg(rc()?))?, g)
        }
    };
    let verify = args
        .verify_mode
        .map(|k| verify_decomposition(&graph, &report.decomposition, eps, verify_mode(k, eps, args.delta, DEFAULT_ETA0)));
    emit(&args.out, &io::write_clustering(&report.clustering))?;
    if let Some(p) = &args.decomp {
        fs::write(p, io::write_decomposition(&report.decomposition))
            .with_context(|| format!("writing {}", p.display()))?;
    }
    let rep = render_report(&report, verify.as_ref());
    match &args.report {
        Some(p) => fs::write(p, rep).with_context(|| format!("writing {}", p.display()))?,
        None => eprint!("{rep}"),
    }
    Ok(())
}

fn cmd_eval(graph: &Path, clustering: &Path, opt: bool) -> Result<()> {
    let g = io::parse_graph(&read(graph)?)?;
    let c = io::parse_clustering(&read(clustering)?)?;
    ensure!(c.n() == g.n(), "clustering has n = {}, graph has n = {}", c.n(), g.n());
    let cost = clustering_cost(&g, &c);
    println!("total={} pos_cut={} neg_joined={}", cost.total, cost.pos_cut, cost.neg_joined);
    if opt {
        let (_, best) = brute_force_optimal(&g)?;
        let ratio = match (cost.total, best) {
            (0, 0) => "1".to_string(),
            (_, 0) => "undefined".to_string(),
            (a, b) => format!("{}", a as f64 / b as f64),
        };
        println!("opt={best} ratio={ratio}");
    }
    Ok(())
}

fn cmd_verify(graph: &Path, decomp: &Path, eps: f64, mode: VerifyMode) -> Result<bool> {
    let g = io::parse_graph(&read(graph)?)?;
    let d = io::parse_decomposition(&read(decomp)?)?.resolve(&g)?;
    let r = verify_decomposition(&g, &d, eps, mode);
    println!("{r}");
    Ok(r.pass)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Generate { what } => cmd_generate(what).map(|_| true),
        Cmd::Cluster(a) => cmd_cluster(a).map(|_| true),
        Cmd::Eval { graph, clustering, opt } => cmd_eval(&graph, &clustering, opt).map(|_| true),
        Cmd::Verify { graph, decomposition, eps, mode, delta, eta0 } => {
            cmd_verify(&graph, &decomposition, eps, verify_mode(mode, eps, delta, eta0))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
