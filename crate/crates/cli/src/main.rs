//! `pwnet`: build and analyze password similarity networks.

use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pwnet::attack::{
    cracking_curve, rank_by_degree, rank_by_frequency, rank_by_neighborhood_weight, CrackingCurve,
};
use pwnet::corpus::{corpus_stats, parse_counted, parse_plain, top_n, Corpus, SeparatorPolicy};
use pwnet::export::{
    export_graph, export_report, write_curves_side_by_side, CommunityReport, DominatingReport,
    GraphFormat, Report, ReportFormat,
};
use pwnet::metric::NeighborhoodCountReport;
use pwnet::mindict::{
    evaluate_set, exact_dominating_set, greedy_dominating_set, partial_dominating_dictionary, DominatingMethod,
    DominatingSetResult, DEFAULT_EXACT_BUDGET,
};
use pwnet::netstats::{degree_rank, degree_sequence, detect_communities, fit_power_law};
use pwnet::simjoin::{build_graph, JoinStrategy, PasswordGraph};
use pwnet::{Error, ErrorClass};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "pwnet", version, about = "Password similarity networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Corpus size, length and character-class histograms.
    Stats {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = ReportKind::Json)]
        report: ReportKind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the similarity graph and write it as a graph file.
    Build {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_enum, default_value_t = ExportKind::Gexf)]
        export: ExportKind,
        #[arg(long)]
        redact: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Label-propagation communities as `node,label,community` CSV or JSON.
    Communities {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ReportKind::Csv)]
        report: ReportKind,
        #[arg(long)]
        redact: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Discrete power-law fit of the node degrees (degree >= 1).
    Fit {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 1)]
        xmin: u64,
        #[arg(long, value_enum, default_value_t = ReportKind::Json)]
        report: ReportKind,
        /// Also write the degree-rank curve as `rank,degree` CSV.
        #[arg(long)]
        rank_out: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cracking curves of the frequency, degree and neighborhood-weight dictionaries.
    Attack {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        graph: GraphArgs,
        /// Also write one `size,gmax,ratio` CSV per dictionary into this directory.
        #[arg(long)]
        curve_dir: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimal cracking dictionary (dominating set).
    Mindict {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_enum, default_value_t = Method::Greedy)]
        method: Method,
        /// Target share of accounts for `--method partial`.
        #[arg(long, default_value_t = 1.0)]
        ratio: f64,
        #[arg(long, default_value_t = DEFAULT_EXACT_BUDGET)]
        node_budget: usize,
        #[arg(long, value_enum, default_value_t = ReportKind::Json)]
        report: ReportKind,
        #[arg(long)]
        redact: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Candidate counts at edit distance k for length L over N symbols.
    Counts {
        #[arg(long)]
        length: u64,
        #[arg(long, default_value_t = pwnet::metric::DEFAULT_ALPHABET_SIZE)]
        alphabet: u64,
        #[arg(long)]
        radius: u32,
        /// Enumerate distinct neighbors of this password instead of the default one.
        #[arg(long)]
        password: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Graph file with community labels attached to every node.
    Export {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ExportKind::Gexf)]
        export: ExportKind,
        #[arg(long)]
        redact: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
struct InputArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = InputFormat::Plain)]
    format: InputFormat,
    /// Keep only the N most frequent passwords.
    #[arg(long)]
    top: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct GraphArgs {
    /// Edges join passwords at edit distance <= N.
    #[arg(long, default_value_t = pwnet::simjoin::DEFAULT_THRESHOLD)]
    threshold: u32,
    #[arg(long, value_enum, default_value_t = StrategyKind::Bucketed)]
    strategy: StrategyKind,
    /// Analyze a sub-threshold view of the built graph.
    #[arg(long)]
    view: Option<u32>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum InputFormat {
    Plain,
    Counted,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum StrategyKind {
    Naive,
    Bucketed,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum ExportKind {
    Gexf,
    Graphml,
    Edgecsv,
    Dot,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum ReportKind {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Method {
    Greedy,
    Exact,
    Partial,
}

impl From<ExportKind> for GraphFormat {
    fn from(k: ExportKind) -> Self {
        match k {
            ExportKind::Gexf => GraphFormat::Gexf,
            ExportKind::Graphml => GraphFormat::Graphml,
            ExportKind::Edgecsv => GraphFormat::EdgeCsv,
            ExportKind::Dot => GraphFormat::Dot,
        }
    }
}

impl From<ReportKind> for ReportFormat {
    fn from(k: ReportKind) -> Self {
        match k {
            ReportKind::Csv => ReportFormat::Csv,
            ReportKind::Json => ReportFormat::Json,
        }
    }
}

impl From<StrategyKind> for JoinStrategy {
    fn from(k: StrategyKind) -> Self {
        match k {
            StrategyKind::Naive => JoinStrategy::Naive,
            StrategyKind::Bucketed => JoinStrategy::Bucketed,
        }
    }
}

/// Outputs are assembled in memory and only written once every stage has
/// succeeded, so a failing run leaves no partial files behind.
#[derive(Default)]
struct Outputs {
    files: Vec<(Option<PathBuf>, Vec<u8>)>,
}

impl Outputs {
    fn add(&mut self, path: Option<PathBuf>, bytes: Vec<u8>) {
        self.files.push((path, bytes));
    }

    fn commit(self) -> Result<(), Error> {
        let mut written: Vec<PathBuf> = Vec::new();
        let result = (|| {
            for (path, bytes) in &self.files {
                match path {
                    None => {
                        let mut stdout = io::stdout().lock();
                        stdout.write_all(bytes)?;
                        stdout.flush()?;
                    }
                    Some(path) => {
                        write_atomic(path, bytes)?;
                        written.push(path.clone());
                    }
                }
            }
            Ok(())
        })();
        if result.is_err() {
            for p in written {
                let _ = std::fs::remove_file(p);
            }
        }
        result
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn load_corpus(args: &InputArgs) -> Result<Corpus, Error> {
    let file = File::open(&args.input)?;
    let reader = BufReader::new(file);
    let corpus = match args.format {
        InputFormat::Plain => parse_plain(reader)?,
        InputFormat::Counted => parse_counted(reader, SeparatorPolicy::SingleSpace)?,
    };
    match args.top {
        Some(n) => top_n(&corpus, n),
        None => Ok(corpus),
    }
}

fn load_graph(input: &InputArgs, graph: &GraphArgs) -> Result<(Corpus, PasswordGraph), Error> {
    let corpus = load_corpus(input)?;
    let g = build_graph(&corpus, graph.threshold, graph.strategy.into())?;
    if let Some(t) = graph.view {
        g.view(t)?;
    }
    Ok((corpus, g))
}

fn view_threshold(graph: &GraphArgs) -> u32 {
    graph.view.unwrap_or(graph.threshold)
}

fn render(f: impl FnOnce(&mut Vec<u8>) -> Result<(), Error>) -> Result<Vec<u8>, Error> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn run(command: Command) -> Result<(), Error> {
    let mut outputs = Outputs::default();
    match command {
        Command::Stats { input, report, out } => {
            let corpus = load_corpus(&input)?;
            let stats = corpus_stats(&corpus)?;
            if let Some(f) = corpus.empty_password_frequency() {
                eprintln!("note: corpus contains {f} blank entries");
            }
            outputs.add(out, render(|b| export_report(Report::Stats(&stats), report.into(), b))?);
        }
        Command::Build {
            input,
            graph,
            export,
            redact,
            out,
        } => {
            let (_, g) = load_graph(&input, &graph)?;
            let view = g.view(view_threshold(&graph))?;
            outputs.add(out, render(|b| export_graph(&view, None, export.into(), redact, b))?);
        }
        Command::Communities {
            input,
            graph,
            seed,
            report,
            redact,
            out,
        } => {
            let (_, g) = load_graph(&input, &graph)?;
            let view = g.view(view_threshold(&graph))?;
            let assignment = detect_communities(&view, seed);
            let rep = CommunityReport::new(&assignment, &g, redact);
            outputs.add(out, render(|b| export_report(Report::Communities(&rep), report.into(), b))?);
        }
        Command::Fit {
            input,
            graph,
            xmin,
            report,
            rank_out,
            out,
        } => {
            let (_, g) = load_graph(&input, &graph)?;
            let view = g.view(view_threshold(&graph))?;
            let samples: Vec<u64> = degree_sequence(&view)
                .into_iter()
                .filter(|&d| d > 0)
                .map(|d| d as u64)
                .collect();
            let fit = fit_power_law(&samples, xmin)?;
            outputs.add(out, render(|b| export_report(Report::Fit(&fit), report.into(), b))?);
            if let Some(path) = rank_out {
                let ranks = degree_rank(&view);
                outputs.add(
                    Some(path),
                    render(|b| export_report(Report::DegreeRank(&ranks), ReportFormat::Csv, b))?,
                );
            }
        }
        Command::Attack {
            input,
            graph,
            curve_dir,
            out,
        } => {
            let (corpus, g) = load_graph(&input, &graph)?;
            let view = g.view(view_threshold(&graph))?;
            let dictionaries = [
                rank_by_frequency(&corpus),
                rank_by_degree(&view),
                rank_by_neighborhood_weight(&view, &corpus)?,
            ];
            let curves: Vec<CrackingCurve> = dictionaries
                .iter()
                .map(|d| cracking_curve(&view, &corpus, d))
                .collect::<Result<_, _>>()?;
            outputs.add(out, render(|b| write_curves_side_by_side(&curves, b))?);
            if let Some(dir) = curve_dir {
                std::fs::create_dir_all(&dir)?;
                for c in &curves {
                    let path = dir.join(format!("{}.csv", c.label.as_str()));
                    outputs.add(Some(path), render(|b| export_report(Report::Curve(c), ReportFormat::Csv, b))?);
                }
            }
        }
        Command::Mindict {
            input,
            graph,
            method,
            ratio,
            node_budget,
            report,
            redact,
            out,
        } => {
            let (corpus, g) = load_graph(&input, &graph)?;
            let view = g.view(view_threshold(&graph))?;
            let result: DominatingSetResult = match method {
                Method::Greedy => greedy_dominating_set(&view),
                Method::Exact => exact_dominating_set(&view, node_budget)?,
                Method::Partial => {
                    let dict = partial_dominating_dictionary(&view, &corpus, ratio)?;
                    evaluate_set(&view, dict.ordering, DominatingMethod::Partial)
                }
            };
            let rep = DominatingReport::new(&result, &g, redact);
            outputs.add(out, render(|b| export_report(Report::Dominating(&rep), report.into(), b))?);
        }
        Command::Counts {
            length,
            alphabet,
            radius,
            password,
            out,
        } => {
            if let Some(p) = &password {
                if p.len() as u64 != length {
                    return Err(Error::Argument(format!(
                        "--password has length {} but --length is {length}",
                        p.len()
                    )));
                }
            }
            let report = NeighborhoodCountReport::compute(
                length,
                alphabet,
                radius,
                password.as_deref().map(str::as_bytes),
            )?;
            outputs.add(out, report.to_string().into_bytes());
        }
        Command::Export {
            input,
            graph,
            seed,
            export,
            redact,
            out,
        } => {
            let (_, g) = load_graph(&input, &graph)?;
            let view = g.view(view_threshold(&graph))?;
            let assignment = detect_communities(&view, seed);
            outputs.add(
                out,
                render(|b| export_graph(&view, Some(&assignment), export.into(), redact, b))?,
            );
        }
    }
    outputs.commit()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pwnet: {e}");
            ExitCode::from(match e.class() {
                ErrorClass::Usage => EXIT_USAGE,
                ErrorClass::Data => EXIT_DATA,
                ErrorClass::Resource => EXIT_RESOURCE,
            })
        }
    }
}
