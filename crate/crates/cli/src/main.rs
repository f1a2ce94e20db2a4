//! `treegen`: count, enumerate, rank, unrank and sample colored weighted trees.
//!
//! Exit codes: 0 success, 2 bad configuration or arguments, 3 I/O or cache
//! failure, 4 rank out of range, 5 unparsable or foreign input structure.

use std::fs::File;
use std::io::{self, BufRead, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use treegen_core::{
    block_tree_to_graph, graph_to_block_tree, CacheOutcome, ColorId, ColorScheme, CountTable, Error, FreeSegment,
    Generator, Graph, RankedSpace, SpaceKind, Structure, Tree,
};

#[derive(Parser)]
#[command(name = "treegen", version, about = "Generate colored weighted trees and block graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the number of trees of a weight.
    Count {
        #[command(flatten)]
        space: SpaceArgs,
        /// Also print the count of every centroid segment.
        #[arg(long)]
        breakdown: bool,
    },
    /// Print every tree of a weight in rank order.
    Enumerate {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Number of worker threads; each takes a contiguous rank range.
        /// More than one worker requires `--prefix`.
        #[arg(short = 'P', long, default_value_t = 1)]
        workers: usize,
        /// Write worker j's chunk to `<prefix>.<j>` instead of stdout.
        #[arg(long)]
        prefix: Option<PathBuf>,
    },
    /// Print the tree of a given rank.
    Unrank {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Zero-based rank.
        #[arg(short = 'i', long)]
        index: String,
    },
    /// Read structures from stdin and print their ranks.
    Rank {
        #[command(flatten)]
        space: SpaceArgs,
        /// Input format: one tree or graph6 string per line, or a single
        /// zero-based edge list.
        #[arg(long = "as", value_enum, default_value_t = Format::Tree)]
        format: Format,
    },
    /// Draw trees uniformly at random from a seeded generator.
    Sample {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long)]
        seed: u64,
        /// Number of draws from the same stream.
        #[arg(short = 'n', long, default_value_t = 1)]
        count: usize,
    },
    /// Build the count tables up to a weight and store them in the cache.
    Tables {
        /// Preset name (gray, pos-weighted, block) or scheme file.
        #[arg(short = 's', long)]
        scheme: String,
        #[arg(short = 'w', long)]
        weight: u32,
        #[arg(long, env = "TREEGEN_CACHE_DIR")]
        cache: Option<PathBuf>,
        /// Recompute every entry of the loaded tables.
        #[arg(long)]
        verify: bool,
    },
}

#[derive(Args)]
struct SpaceArgs {
    /// Preset name (gray, pos-weighted, block) or scheme file.
    #[arg(short = 's', long)]
    scheme: String,
    #[arg(short = 'w', long)]
    weight: u32,
    /// Work with rooted trees of this root color instead of free trees.
    #[arg(long, value_name = "COLOR")]
    rooted: Option<String>,
    /// Directory holding count-table caches.
    #[arg(long, env = "TREEGEN_CACHE_DIR")]
    cache: Option<PathBuf>,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format. Graph formats need the block scheme and free trees.
    #[arg(long = "as", value_enum, default_value_t = Format::Tree)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Tree,
    Graph6,
    Edges,
    Dot,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    fn input(message: impl Into<String>) -> Self {
        Failure { code: 5, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io(_) | Error::Cache(_) => 3,
            Error::RankOutOfRange { .. } => 4,
            Error::Parse(_) => 5,
            Error::Scheme(_) | Error::TableBounds { .. } | Error::Argument(_) | Error::EmptySpace => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Error::Io(e).into()
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) if f.code == 3 && f.message.contains("Broken pipe") => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("treegen: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> CliResult {
    match command {
        Command::Count { space, breakdown } => count(&space, breakdown),
        Command::Enumerate { space, output, workers, prefix } => enumerate(&space, output.format, workers, prefix),
        Command::Unrank { space, output, index } => unrank(&space, output.format, &index),
        Command::Rank { space, format } => rank(&space, format),
        Command::Sample { space, output, seed, count } => sample(&space, output.format, seed, count),
        Command::Tables { scheme, weight, cache, verify } => tables(&scheme, weight, cache, verify),
    }
}

fn load_scheme(arg: &str) -> CliResult<ColorScheme> {
    if let Some(s) = ColorScheme::preset(arg) {
        return Ok(s);
    }
    let path = Path::new(arg);
    if !path.exists() {
        return Err(Failure::config(format!("{arg:?} is neither a preset nor a scheme file")));
    }
    let text = std::fs::read_to_string(path)?;
    Ok(ColorScheme::parse(&text)?)
}

fn cache_file(dir: &Path, scheme: &ColorScheme) -> PathBuf {
    dir.join(format!("{}.tables", scheme.hash()))
}

fn load_table(scheme: ColorScheme, weight: u32, cache: Option<&Path>) -> CliResult<CountTable> {
    let Some(dir) = cache else {
        return Ok(CountTable::build(scheme, weight)?);
    };
    std::fs::create_dir_all(dir)?;
    let path = cache_file(dir, &scheme);
    let (table, outcome) = CountTable::load_or_build(&path, &scheme, weight)?;
    if let CacheOutcome::Rebuilt(reason) = outcome {
        eprintln!("treegen: rebuilt {}: {reason}", path.display());
    }
    Ok(table)
}

/// What the common arguments select.
struct Selection {
    scheme: ColorScheme,
    generator: Generator,
    space: RankedSpace,
}

fn select(args: &SpaceArgs) -> CliResult<Selection> {
    if args.weight == 0 {
        return Err(Failure::config("weight must be positive"));
    }
    let scheme = load_scheme(&args.scheme)?;
    let kind = match &args.rooted {
        None => SpaceKind::Free { weight: args.weight },
        Some(name) => SpaceKind::Rooted { weight: args.weight, color: color(&scheme, name)? },
    };
    let generator = Generator::from_table(load_table(scheme.clone(), args.weight, args.cache.as_deref())?);
    let space = generator.space(kind)?;
    Ok(Selection { scheme, generator, space })
}

fn color(scheme: &ColorScheme, name: &str) -> CliResult<ColorId> {
    scheme.color_by_name(name).ok_or_else(|| Failure::config(format!("unknown color {name:?}")))
}

/// Graph formats apply only to free trees of the block scheme.
fn check_format(sel: &Selection, format: Format) -> CliResult {
    if format == Format::Tree {
        return Ok(());
    }
    if sel.scheme != ColorScheme::block() {
        return Err(Failure::config("graph formats require the block scheme"));
    }
    if !matches!(sel.space.kind(), SpaceKind::Free { .. }) {
        return Err(Failure::config("graph formats require free trees"));
    }
    Ok(())
}

fn render(item: &Structure, scheme: &ColorScheme, format: Format) -> CliResult<String> {
    let tree = || item.as_tree().ok_or_else(|| Failure::config("graph formats require trees"));
    Ok(match format {
        Format::Tree => item.to_text(scheme) + "\n",
        Format::Graph6 => block_tree_to_graph(tree()?)?.to_graph6() + "\n",
        // Edge lists and DOT graphs span several lines; a blank line ends each.
        Format::Edges => block_tree_to_graph(tree()?)?.to_edge_list() + "\n",
        Format::Dot => block_tree_to_graph(tree()?)?.to_dot() + "\n",
    })
}

fn count(args: &SpaceArgs, breakdown: bool) -> CliResult {
    let sel = select(args)?;
    let mut out = io::stdout().lock();
    if breakdown && matches!(sel.space.kind(), SpaceKind::Free { .. }) {
        let scheme = &sel.scheme;
        for (segment, n) in &sel.generator.free_count(args.weight)?.segments {
            match segment {
                FreeSegment::Mono(c) => writeln!(out, "mono {} {n}", scheme.name(*c))?,
                FreeSegment::Bi(c, d) => writeln!(out, "bi {} {} {n}", scheme.name(*c), scheme.name(*d))?,
                FreeSegment::Tri(c) => writeln!(out, "tri {} {n}", scheme.name(*c))?,
            }
        }
        writeln!(out, "total {}", sel.space.size())?;
    } else {
        writeln!(out, "{}", sel.space.size())?;
    }
    Ok(())
}

fn enumerate(args: &SpaceArgs, format: Format, workers: usize, prefix: Option<PathBuf>) -> CliResult {
    let sel = select(args)?;
    check_format(&sel, format)?;
    if workers == 0 {
        return Err(Failure::config("need at least one worker"));
    }
    match prefix {
        None if workers == 1 => {
            let mut out = BufWriter::new(io::stdout().lock());
            for item in sel.space.iter() {
                out.write_all(render(&item, &sel.scheme, format)?.as_bytes())?;
            }
            out.flush()?;
        }
        None => return Err(Failure::config("more than one worker requires --prefix")),
        Some(prefix) => {
            let files = (0..workers)
                .map(|j| {
                    let path = PathBuf::from(format!("{}.{j}", prefix.display()));
                    Ok(Mutex::new(BufWriter::new(File::create(path)?)))
                })
                .collect::<io::Result<Vec<_>>>()?;
            let render_err = Mutex::new(None);
            let result = sel.space.parallel_for_each(workers, |j, item| {
                let text = match render(&item, &sel.scheme, format) {
                    Ok(t) => t,
                    Err(f) => {
                        let message = f.message.clone();
                        *render_err.lock().unwrap() = Some(f);
                        return Err(Error::Argument(message));
                    }
                };
                files[j].lock().unwrap().write_all(text.as_bytes())?;
                Ok(())
            });
            if let Some(f) = render_err.into_inner().unwrap() {
                return Err(f);
            }
            result?;
            for f in files {
                f.into_inner().unwrap().flush()?;
            }
        }
    }
    Ok(())
}

fn unrank(args: &SpaceArgs, format: Format, index: &str) -> CliResult {
    let sel = select(args)?;
    check_format(&sel, format)?;
    let i: BigUint = index.trim().parse().map_err(|_| Failure::config(format!("bad rank {index:?}")))?;
    let item = sel.space.unrank(&i)?;
    io::stdout().lock().write_all(render(&item, &sel.scheme, format)?.as_bytes())?;
    Ok(())
}

fn rank(args: &SpaceArgs, format: Format) -> CliResult {
    let sel = select(args)?;
    check_format(&sel, format)?;
    let mut inputs = Vec::new();
    match format {
        Format::Tree | Format::Graph6 => {
            for line in io::stdin().lock().lines() {
                let line = line?;
                if !line.trim().is_empty() {
                    inputs.push(line);
                }
            }
        }
        Format::Edges => {
            let mut text = String::new();
            io::stdin().lock().read_to_string(&mut text)?;
            inputs.push(text);
        }
        Format::Dot => return Err(Failure::config("DOT input is not supported")),
    }
    let mut out = io::stdout().lock();
    for input in inputs {
        let item = parse_structure(&input, &sel, format)?;
        let r = sel.space.rank(&item).map_err(|e| match e {
            Error::Io(e) => Failure::from(e),
            e => Failure::input(e.to_string()),
        })?;
        writeln!(out, "{r}")?;
    }
    Ok(())
}

fn parse_structure(input: &str, sel: &Selection, format: Format) -> CliResult<Structure> {
    let tree = match format {
        Format::Tree => Tree::parse_text(input, &sel.scheme),
        Format::Graph6 => Graph::from_graph6(input.trim()).and_then(|g| graph_to_block_tree(&g)),
        Format::Edges => parse_edges(input).and_then(|g| graph_to_block_tree(&g)),
        Format::Dot => unreachable!(),
    };
    tree.map(Structure::Tree).map_err(|e| Failure::input(e.to_string()))
}

/// `u v` lines with zero-based vertices. Empty input is the one-vertex graph.
fn parse_edges(text: &str) -> treegen_core::Result<Graph> {
    let mut edges = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        let mut parts = line.split_whitespace().map(str::parse::<usize>);
        match (parts.next(), parts.next(), parts.next()) {
            (Some(Ok(u)), Some(Ok(v)), None) => edges.push((u, v)),
            _ => return Err(Error::Parse(format!("bad edge line {line:?}"))),
        }
    }
    let n = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(1);
    Graph::from_edges(n, edges)
}

fn sample(args: &SpaceArgs, format: Format, seed: u64, count: usize) -> CliResult {
    let sel = select(args)?;
    check_format(&sel, format)?;
    let mut sampler = sel.space.sampler(seed);
    let mut out = BufWriter::new(io::stdout().lock());
    for _ in 0..count {
        let s = sampler.draw()?;
        writeln!(out, "{}", s.metadata())?;
        out.write_all(render(&s.item, &sel.scheme, format)?.as_bytes())?;
    }
    out.flush()?;
    Ok(())
}

fn tables(scheme: &str, weight: u32, cache: Option<PathBuf>, verify: bool) -> CliResult {
    let scheme = load_scheme(scheme)?;
    let dir = cache.ok_or_else(|| Failure::config("no cache directory (use --cache or TREEGEN_CACHE_DIR)"))?;
    std::fs::create_dir_all(&dir)?;
    let path = cache_file(&dir, &scheme);
    let (table, outcome) = CountTable::load_or_build(&path, &scheme, weight)?;
    if verify {
        table.verify()?;
    }
    let status = match outcome {
        CacheOutcome::Loaded => "loaded".to_string(),
        CacheOutcome::Built => "built".to_string(),
        CacheOutcome::Rebuilt(reason) => format!("rebuilt ({reason})"),
    };
    println!("{} {status} max_weight={}", path.display(), table.max_weight());
    Ok(())
}
