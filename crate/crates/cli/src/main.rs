//! `sgft` command-line front-end.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

mod source;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::warn;

use sgft::baseline::{self, HeatKernelWindow};
use sgft::{
    export, EigenBasis, ErrorClass, LocalizationParams, OperatorKind, SignalVector,
    SpectrogramMatrix,
};

use crate::source::{GraphArgs, Loaded, SignalArgs};

#[derive(Debug, Parser)]
#[command(
    name = "sgft",
    version,
    about = "Short-graph Fourier transform experiments"
)]
struct Cli {
    /// Cap on worker threads for per-vertex work (outputs do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute a localized window around one vertex.
    Window(WindowArgs),
    /// Compute a spectrogram, its dominant-frequency map and a run manifest.
    Spectrogram(SpectrogramArgs),
    /// Correlate one vertex's spectral signature with every other vertex's.
    Signature(SignatureArgs),
    /// Compute and store an eigenbasis cache file.
    Eigcache(EigcacheArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Ppr,
    Conv,
}

impl MethodArg {
    fn operator(self) -> OperatorKind {
        match self {
            MethodArg::Ppr => OperatorKind::NormalizedLaplacian,
            MethodArg::Conv => OperatorKind::CombinatorialLaplacian,
        }
    }

    fn name(self) -> &'static str {
        match self {
            MethodArg::Ppr => "ppr",
            MethodArg::Conv => "conv",
        }
    }
}

#[derive(Debug, Args)]
struct MethodArgs {
    #[arg(long, value_enum, default_value_t = MethodArg::Ppr)]
    method: MethodArg,
    /// PPR offset: gamma = lambda_1 - beta.
    #[arg(long, default_value_t = 1e-4)]
    beta: f64,
    /// Heat-kernel time for the convolutional window.
    #[arg(long, default_value_t = 200.0)]
    tau: f64,
    /// Number of eigenpairs / frequencies K [default: 500, or the vertex
    /// count if smaller].
    #[arg(long)]
    num_eigs: Option<usize>,
    /// Eigenbasis cache file: read if present, written otherwise.
    #[arg(long)]
    eig_cache: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct WindowArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    method: MethodArgs,
    #[arg(long)]
    seed_vertex: usize,
    /// Output file (two columns: vertex, weight). Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SpectrogramArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    signal: SignalArgs,
    #[command(flatten)]
    method: MethodArgs,
    /// Prefix for the .spectrogram.csv/.pgm, .dominant.csv and .manifest.txt outputs.
    #[arg(long)]
    out_prefix: PathBuf,
}

#[derive(Debug, Args)]
struct SignatureArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    signal: SignalArgs,
    #[command(flatten)]
    method: MethodArgs,
    #[arg(long)]
    vertex: usize,
    /// Output CSV. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OperatorArg {
    Normalized,
    Combinatorial,
}

#[derive(Debug, Args)]
struct EigcacheArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, value_enum, default_value_t = OperatorArg::Normalized)]
    operator: OperatorArg,
    /// [default: 500, or the vertex count if smaller]
    #[arg(long)]
    num_eigs: Option<usize>,
    /// Cache file; defaults to `<cache dir>/<key>.eig`, where the cache dir
    /// is `$SGFT_CACHE_DIR` or `.sgft-cache`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Core(sgft::Error),
}

impl From<sgft::Error> for CliError {
    fn from(e: sgft::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Core(e.into())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(e) => match e.class() {
                ErrorClass::Usage => 1,
                ErrorClass::Data => 2,
                ErrorClass::Numerical => 3,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sgft: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot configure thread pool: {e}")))?;
    }
    let started = Instant::now();
    match cli.command {
        Command::Window(args) => cmd_window(args),
        Command::Spectrogram(args) => cmd_spectrogram(args, cli.threads, started),
        Command::Signature(args) => cmd_signature(args),
        Command::Eigcache(args) => cmd_eigcache(args),
    }
}

struct BasisRun {
    basis: EigenBasis,
    key: String,
    cache_hit: bool,
    seconds: f64,
}

fn cache_dir() -> PathBuf {
    std::env::var_os("SGFT_CACHE_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(".sgft-cache"))
}

fn cache_key(graph: &sgft::Graph, kind: OperatorKind, k: usize) -> String {
    let hex: String = graph.content_hash()[..8]
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect();
    let op = match kind {
        OperatorKind::NormalizedLaplacian => "normalized",
        OperatorKind::CombinatorialLaplacian => "combinatorial",
        OperatorKind::Custom => "custom",
    };
    format!("{hex}-{op}-K{k}")
}

/// Loads the basis from `path` when it exists, otherwise computes it and
/// (when a path is known) stores it. With no explicit path, a cache is only
/// used when `SGFT_CACHE_DIR` is set.
fn obtain_basis(
    graph: &sgft::Graph,
    kind: OperatorKind,
    k: usize,
    path: Option<&Path>,
) -> CliResult<BasisRun> {
    let key = cache_key(graph, kind, k);
    let path = match path {
        Some(p) => Some(p.to_path_buf()),
        None => {
            std::env::var_os("SGFT_CACHE_DIR").map(|d| PathBuf::from(d).join(format!("{key}.eig")))
        }
    };
    let hash = graph.content_hash();
    if let Some(p) = path.as_deref().filter(|p| p.exists()) {
        let basis = EigenBasis::read_cache(io::BufReader::new(File::open(p)?), Some(&hash))?;
        if basis.kind() != kind {
            return Err(sgft::Error::CacheFormat(format!(
                "{} holds the {}, expected the {}",
                p.display(),
                basis.kind().name(),
                kind.name()
            ))
            .into());
        }
        if basis.len() < k {
            return Err(sgft::Error::CacheFormat(format!(
                "{} holds {} eigenpairs, {k} requested",
                p.display(),
                basis.len()
            ))
            .into());
        }
        let basis = if basis.len() > k {
            basis.truncated(k)?
        } else {
            basis
        };
        return Ok(BasisRun {
            basis,
            key,
            cache_hit: true,
            seconds: 0.0,
        });
    }
    let t = Instant::now();
    let basis = EigenBasis::of_graph(graph, kind, k)?;
    let seconds = t.elapsed().as_secs_f64();
    if let Some(p) = path {
        if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        basis.write_cache(BufWriter::new(File::create(&p)?), Some(&hash))?;
    }
    Ok(BasisRun {
        basis,
        key,
        cache_hit: false,
        seconds,
    })
}

const DEFAULT_NUM_EIGS: usize = 500;

fn retained(num_eigs: Option<usize>, n: usize) -> CliResult<usize> {
    let Some(num_eigs) = num_eigs else {
        return Ok(DEFAULT_NUM_EIGS.min(n));
    };
    if num_eigs == 0 {
        return Err(CliError::Usage("--num-eigs must be at least 1".into()));
    }
    if num_eigs > n {
        warn!("--num-eigs {num_eigs} exceeds the vertex count; using {n}");
    }
    Ok(num_eigs.min(n))
}

fn open_out(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

/// Window values for either method, plus the basis run used.
fn compute_window(
    loaded: &Loaded,
    m: &MethodArgs,
    vertex: usize,
) -> CliResult<(Vec<f64>, BasisRun)> {
    let g = &loaded.graph;
    g.check_vertex(vertex)?;
    let k = retained(m.num_eigs, g.n())?;
    match m.method {
        MethodArg::Ppr => {
            let run = obtain_basis(
                g,
                OperatorKind::NormalizedLaplacian,
                k,
                m.eig_cache.as_deref(),
            )?;
            let params = LocalizationParams::new(m.beta)?;
            let w = sgft::window(g, &run.basis, vertex, &params)?;
            Ok((w.values().to_vec(), run))
        }
        MethodArg::Conv => {
            let run = obtain_basis(
                g,
                OperatorKind::CombinatorialLaplacian,
                g.n(),
                m.eig_cache.as_deref(),
            )?;
            let kernel = HeatKernelWindow::new(&run.basis, m.tau)?;
            let g_sig = SignalVector::new(kernel.vertex_values().to_vec());
            let t = baseline::translate(&run.basis, vertex, &g_sig)?;
            Ok((t.into_inner(), run))
        }
    }
}

fn method_header(m: &MethodArgs) -> String {
    match m.method {
        MethodArg::Ppr => format!("method=ppr beta={}", m.beta),
        MethodArg::Conv => format!("method=conv tau={}", m.tau),
    }
}

fn cmd_window(args: WindowArgs) -> CliResult<()> {
    let loaded = args.graph.load()?;
    let (values, _) = compute_window(&loaded, &args.method, args.seed_vertex)?;
    let argmax = values
        .iter()
        .enumerate()
        .fold(0, |best, (i, &v)| if v > values[best] { i } else { best });
    let hops = loaded.graph.hop_distances(args.seed_vertex);
    let total: f64 = values.iter().map(|v| v.abs()).sum();
    let near: f64 = values
        .iter()
        .zip(&hops)
        .filter(|(_, &h)| h <= 10)
        .map(|(v, _)| v.abs())
        .sum();
    let header = format!("{} seed={}", method_header(&args.method), args.seed_vertex);
    let mut out = open_out(args.out.as_deref())?;
    export::write_window(&header, &values, &mut out)?;
    out.flush()?;
    let summary = format!(
        "seed={} argmax={} mass_within_10_hops={} {}",
        args.seed_vertex,
        argmax,
        near / total,
        method_header(&args.method)
    );
    if args.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

fn compute_spectrogram(
    loaded: &Loaded,
    signal: &SignalVector,
    m: &MethodArgs,
) -> CliResult<(SpectrogramMatrix, BasisRun)> {
    let g = &loaded.graph;
    let k = retained(m.num_eigs, g.n())?;
    match m.method {
        MethodArg::Ppr => {
            let run = obtain_basis(g, m.method.operator(), k, m.eig_cache.as_deref())?;
            let params = LocalizationParams::new(m.beta)?;
            let spec = sgft::spectrogram(g, &run.basis, signal, &params, None)?;
            Ok((spec, run))
        }
        MethodArg::Conv => {
            let run = obtain_basis(g, m.method.operator(), g.n(), m.eig_cache.as_deref())?;
            let kernel = HeatKernelWindow::new(&run.basis, m.tau)?;
            let spec = baseline::baseline_spectrogram(&run.basis, signal, &kernel, k, None)?;
            Ok((spec, run))
        }
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn cmd_spectrogram(
    args: SpectrogramArgs,
    threads: Option<usize>,
    started: Instant,
) -> CliResult<()> {
    let loaded = args.graph.load()?;
    let signal = args.signal.load(&loaded)?;
    let (spec, run) = compute_spectrogram(&loaded, &signal, &args.method)?;
    let dominant = sgft::dominant_frequency_map(&spec);

    if let Some(dir) = args
        .out_prefix
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
    {
        fs::create_dir_all(dir)?;
    }
    let csv_path = with_suffix(&args.out_prefix, ".spectrogram.csv");
    let pgm_path = with_suffix(&args.out_prefix, ".spectrogram.pgm");
    let side_path = with_suffix(&args.out_prefix, ".spectrogram.pgm.txt");
    let dom_path = with_suffix(&args.out_prefix, ".dominant.csv");
    let manifest_path = with_suffix(&args.out_prefix, ".manifest.txt");

    let mut w = BufWriter::new(File::create(&csv_path)?);
    export::write_spectrogram_csv(&spec, &mut w)?;
    w.flush()?;
    let mut w = BufWriter::new(File::create(&pgm_path)?);
    let (min, max) = export::write_pgm(spec.values(), spec.rows(), spec.frequencies(), &mut w)?;
    w.flush()?;
    let mut w = BufWriter::new(File::create(&side_path)?);
    export::write_pgm_sidecar(min, max, spec.rows(), spec.frequencies(), &mut w)?;
    w.flush()?;
    let mut w = BufWriter::new(File::create(&dom_path)?);
    export::write_dominant_csv(&spec, &dominant, &mut w)?;
    w.flush()?;

    let mut w = BufWriter::new(File::create(&manifest_path)?);
    let argv: Vec<String> = std::env::args().collect();
    writeln!(w, "command=spectrogram")?;
    writeln!(w, "version={}", env!("CARGO_PKG_VERSION"))?;
    writeln!(w, "args={}", argv[1..].join(" "))?;
    writeln!(w, "source={}", loaded.description)?;
    writeln!(w, "signal={}", args.signal.describe(&loaded))?;
    writeln!(w, "{}", spec.method())?;
    writeln!(w, "method={}", args.method.method.name())?;
    writeln!(w, "beta={}", args.method.beta)?;
    writeln!(w, "tau={}", args.method.tau)?;
    writeln!(w, "num_eigs={}", spec.frequencies())?;
    writeln!(w, "n={}", loaded.graph.n())?;
    writeln!(
        w,
        "threads={}",
        threads.map_or("default".to_string(), |t| t.to_string())
    )?;
    writeln!(w, "eig_cache_key={}", run.key)?;
    writeln!(w, "eig_cache_hit={}", run.cache_hit)?;
    writeln!(w, "decomposition_seconds={:.3}", run.seconds)?;
    writeln!(w, "wall_seconds={:.3}", started.elapsed().as_secs_f64())?;
    w.flush()?;

    println!(
        "wrote {} ({}x{}) {}; decomposition {:.3}s{}",
        csv_path.display(),
        spec.rows(),
        spec.frequencies(),
        spec.method(),
        run.seconds,
        if run.cache_hit { " (cache hit)" } else { "" }
    );
    Ok(())
}

fn cmd_signature(args: SignatureArgs) -> CliResult<()> {
    let loaded = args.graph.load()?;
    loaded.graph.check_vertex(args.vertex)?;
    let signal = args.signal.load(&loaded)?;
    let (spec, _) = compute_spectrogram(&loaded, &signal, &args.method)?;
    let corr = sgft::signature_correlation(&spec, args.vertex)?;
    let header = format!(
        "{} K={} vertex={}",
        method_header(&args.method),
        spec.frequencies(),
        args.vertex
    );
    let mut out = open_out(args.out.as_deref())?;
    export::write_correlation_csv(
        &header,
        spec.vertices(),
        &corr,
        loaded.coordinates.as_deref(),
        &mut out,
    )?;
    out.flush()?;
    let self_corr =
        corr[spec.row_of(args.vertex).expect("all vertices analysed")].unwrap_or(f64::NAN);
    let summary = format!("vertex={} self_correlation={self_corr:.1}", args.vertex);
    if args.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

fn cmd_eigcache(args: EigcacheArgs) -> CliResult<()> {
    let loaded = args.graph.load()?;
    let kind = match args.operator {
        OperatorArg::Normalized => OperatorKind::NormalizedLaplacian,
        OperatorArg::Combinatorial => OperatorKind::CombinatorialLaplacian,
    };
    let k = retained(args.num_eigs, loaded.graph.n())?;
    let key = cache_key(&loaded.graph, kind, k);
    let path = args
        .out
        .unwrap_or_else(|| cache_dir().join(format!("{key}.eig")));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let t = Instant::now();
    let basis = EigenBasis::of_graph(&loaded.graph, kind, k)?;
    let seconds = t.elapsed().as_secs_f64();
    let mut w = BufWriter::new(File::create(&path)?);
    basis.write_cache(&mut w, Some(&loaded.graph.content_hash()))?;
    w.flush()?;
    println!(
        "wrote {} key={key} decomposition_seconds={seconds:.3}",
        path.display()
    );
    Ok(())
}
