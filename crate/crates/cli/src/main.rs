use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use collabnet::centrality::{self, BetweennessOptions, Measure};
use collabnet::export::{self, ExportError, ExportFormat};
use collabnet::facets;
use collabnet::ingest::{self, IngestError, DEFAULT_YEAR_RANGE};
use collabnet::metrics::{self, ClusteringConvention, NetworkSummary};
use collabnet::network::NetworkError;
use collabnet::synth::{self, SynthConfig, SynthError};
use collabnet::{build_network, BuildOptions, Category, CollabNetwork};

#[derive(Parser)]
#[command(name = "collabnet", version, about = "Institutional co-authorship network analysis")]
#[command(arg_required_else_help = true)]
struct Cli {
    /// Only log errors.
    #[arg(long, global = true)]
    quiet: bool,
    /// Worker threads for parallel analytics (default: all cores).
    #[arg(long, global = true, value_name = "N", value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
    /// Keep institutions that appear in the corpus without any collaboration.
    #[arg(long, global = true)]
    include_isolates: bool,
    /// Average clustering over nodes of degree >= 2 only.
    #[arg(long, global = true)]
    clustering_exclude_low_degree: bool,
    /// Betweenness uses 1/weight edge lengths.
    #[arg(long, global = true)]
    weighted_betweenness: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Resolve and filter a publication corpus.
    Ingest(IngestArgs),
    /// Build the collaboration network and write the canonical edge/node CSV.
    Build(BuildArgs),
    /// Network statistics.
    Stats(StatsArgs),
    /// Rank institutions by a centrality measure.
    Centrality(CentralityArgs),
    /// Induced subgraph of an institution and its collaborators.
    Ego(EgoArgs),
    /// Per-institution collaboration tables by category or subject.
    Facets(FacetsArgs),
    /// Generate a synthetic corpus.
    Synth(SynthArgs),
    /// Write the network as GEXF, DOT, CSV or JSON.
    Export(ExportArgs),
}

fn parse_years(s: &str) -> Result<(i32, i32), String> {
    let (a, b) = s.split_once('-').ok_or_else(|| format!("expected MIN-MAX, got `{s}`"))?;
    let min: i32 = a.trim().parse().map_err(|_| format!("bad year `{a}`"))?;
    let max: i32 = b.trim().parse().map_err(|_| format!("bad year `{b}`"))?;
    if min > max {
        return Err(format!("year range {min}-{max} is empty"));
    }
    Ok((min, max))
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected MIN,MAX, got `{s}`"))?;
    let parse = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("bad count `{x}`"));
    Ok((parse(a)?, parse(b)?))
}

fn parse_inst(s: &str) -> Result<[usize; 4], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(format!("expected four counts B,P,G,H, got `{s}`"));
    }
    let mut out = [0; 4];
    for (slot, p) in out.iter_mut().zip(parts) {
        *slot = p.trim().parse().map_err(|_| format!("bad count `{p}`"))?;
    }
    Ok(out)
}

#[derive(Args)]
struct CorpusInput {
    /// Publication records (JSON Lines).
    #[arg(long, value_name = "PATH")]
    records: PathBuf,
    /// Affiliation-to-institution mapping CSV.
    #[arg(long, value_name = "PATH")]
    mapping: PathBuf,
    /// Inclusive publication-year window.
    #[arg(long, value_name = "MIN-MAX", value_parser = parse_years, default_value = "2010-2015")]
    years: (i32, i32),
}

/// Either a canonical edge/node CSV pair or a corpus to build from.
#[derive(Args)]
struct NetworkInput {
    /// Edge-list CSV (`institution_a,institution_b,weight`).
    #[arg(long, value_name = "PATH", requires = "nodes", conflicts_with_all = ["records", "mapping"])]
    edges: Option<PathBuf>,
    /// Node-list CSV (`institution_id,name,category`).
    #[arg(long, value_name = "PATH", requires = "edges")]
    nodes: Option<PathBuf>,
    /// Publication records (JSON Lines).
    #[arg(long, value_name = "PATH", requires = "mapping")]
    records: Option<PathBuf>,
    /// Affiliation-to-institution mapping CSV.
    #[arg(long, value_name = "PATH", requires = "records")]
    mapping: Option<PathBuf>,
    /// Inclusive publication-year window (corpus input only).
    #[arg(long, value_name = "MIN-MAX", value_parser = parse_years)]
    years: Option<(i32, i32)>,
}

#[derive(Args)]
struct IngestArgs {
    #[command(flatten)]
    input: CorpusInput,
    /// Write the clean corpus as JSON Lines.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Write exclusion counts as CSV `reason,count`.
    #[arg(long, value_name = "PATH")]
    exclusions: Option<PathBuf>,
    /// Print the summary as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    input: CorpusInput,
    /// Edge-list CSV to write.
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
    /// Node-list CSV to write (default: `<out stem>.nodes.csv`).
    #[arg(long, value_name = "PATH")]
    nodes_out: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    input: NetworkInput,
    /// Print the summary as JSON.
    #[arg(long)]
    json: bool,
    /// Write `institution,degree,weighted_degree` CSV.
    #[arg(long, value_name = "PATH")]
    degrees_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureArg {
    Betweenness,
    Eigenvector,
    Degree,
    WeightedDegree,
}

#[derive(Args)]
struct CentralityArgs {
    #[command(flatten)]
    input: NetworkInput,
    #[arg(long, value_enum)]
    measure: MeasureArg,
    /// Weighted variant (1/weight lengths for betweenness, weights for degree).
    #[arg(long)]
    weighted: bool,
    /// Divide betweenness by the number of node pairs.
    #[arg(long)]
    normalized: bool,
    /// Number of ranked institutions to report.
    #[arg(long, value_name = "K", default_value_t = 10)]
    top: usize,
    /// Write the ranking CSV here instead of standard output.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Print the full report as JSON.
    #[arg(long, conflicts_with = "out")]
    json: bool,
}

#[derive(Args)]
struct EgoArgs {
    #[command(flatten)]
    input: NetworkInput,
    /// Institution ID or name.
    #[arg(long, value_name = "INSTITUTION")]
    center: String,
    /// Output file; the format follows the extension (gexf, dot, csv, json).
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum FacetBy {
    Category,
    Subject,
}

#[derive(Args)]
struct FacetsArgs {
    #[command(flatten)]
    input: NetworkInput,
    #[arg(long, value_enum, default_value = "category")]
    by: FacetBy,
    /// Institutions to report, one ID or name per line (default: built-in list).
    #[arg(long, value_name = "PATH")]
    focus: Option<PathBuf>,
    /// Write the table here instead of standard output.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = SynthConfig::default().seed)]
    seed: u64,
    /// Number of publications.
    #[arg(long, value_name = "N", default_value_t = SynthConfig::default().n_publications)]
    pubs: usize,
    /// Institution counts per category: business, PNP, government, higher education.
    #[arg(long, value_name = "B,P,G,H", value_parser = parse_inst)]
    inst: Option<[usize; 4]>,
    /// Preferential-attachment bias (>= 0).
    #[arg(long, value_name = "X", default_value_t = SynthConfig::default().attachment_bias)]
    bias: f64,
    /// Authors per publication.
    #[arg(long, value_name = "MIN,MAX", value_parser = parse_pair)]
    authors: Option<(usize, usize)>,
    /// Subject classes per publication.
    #[arg(long, value_name = "MIN,MAX", value_parser = parse_pair)]
    subjects: Option<(usize, usize)>,
    /// Years publications are spread over.
    #[arg(long, value_name = "MIN-MAX", value_parser = parse_years)]
    years: Option<(i32, i32)>,
    #[arg(long, value_name = "DIR")]
    out_dir: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Gexf,
    Dot,
    Csv,
    Json,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    input: NetworkInput,
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
    /// Output format (default: from the file extension).
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

struct Globals {
    include_isolates: bool,
    clustering: ClusteringConvention,
    weighted_betweenness: bool,
}

fn usage_error(message: impl std::fmt::Display) -> ! {
    Cli::command().error(ErrorKind::ArgumentConflict, message).exit()
}

fn check_input(path: &Path) -> Result<()> {
    if !path.is_file() {
        anyhow::bail!(io::Error::new(io::ErrorKind::NotFound, format!("{}: no such file", path.display())));
    }
    Ok(())
}

fn check_output(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => anyhow::bail!(io::Error::new(
            io::ErrorKind::NotFound,
            format!("{}: output directory does not exist", dir.display())
        )),
        _ => Ok(()),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn load_corpus(records: &Path, mapping: &Path, years: (i32, i32)) -> Result<ingest::CleanCorpus> {
    let registry = ingest::load_mapping(mapping)?;
    let corpus = ingest::ingest_records(records, &registry, years)?;
    log::info!(
        "{} of {} publications kept ({} excluded)",
        corpus.records.len(),
        corpus.input_count,
        corpus.exclusion_log.total()
    );
    Ok(corpus)
}

impl NetworkInput {
    fn validate(&self) -> Result<()> {
        if self.edges.is_none() && self.records.is_none() {
            usage_error("a network source is required: --edges/--nodes or --records/--mapping");
        }
        if self.edges.is_some() && self.years.is_some() {
            usage_error("--years applies only to --records input");
        }
        for p in [&self.edges, &self.nodes, &self.records, &self.mapping].into_iter().flatten() {
            check_input(p)?;
        }
        Ok(())
    }

    fn load(&self, globals: &Globals, with_subjects: bool) -> Result<CollabNetwork> {
        if let (Some(edges), Some(nodes)) = (&self.edges, &self.nodes) {
            return Ok(export::import_csv(edges, nodes)?);
        }
        let (records, mapping) = (self.records.as_ref().unwrap(), self.mapping.as_ref().unwrap());
        let corpus = load_corpus(records, mapping, self.years.unwrap_or(DEFAULT_YEAR_RANGE))?;
        Ok(build_network(&corpus, BuildOptions { with_subjects, include_isolates: globals.include_isolates }))
    }
}

fn write_json(value: &serde_json::Value) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn summary_json(summary: &NetworkSummary) -> serde_json::Value {
    let mut value = serde_json::to_value(summary).expect("summary serializes");
    value.as_object_mut().unwrap().insert("schema_version".into(), export::SCHEMA_VERSION.into());
    value
}

fn print_summary(summary: &NetworkSummary) -> Result<()> {
    let mut out = io::stdout().lock();
    let opt = |x: Option<f64>| x.map_or("n/a".to_string(), |v| format!("{v:.2}"));
    writeln!(out, "nodes                  {}", summary.node_count)?;
    writeln!(out, "edges                  {}", summary.edge_count)?;
    writeln!(out, "density                {:.3}", summary.density)?;
    writeln!(out, "average degree         {:.2}", summary.avg_degree)?;
    writeln!(out, "average weighted degree {:.2}", summary.avg_weighted_degree)?;
    writeln!(out, "average clustering     {:.2}", summary.avg_clustering)?;
    writeln!(out, "giant path length      {}", opt(summary.giant_avg_path_length))?;
    writeln!(
        out,
        "giant diameter         {}",
        summary.giant_diameter.map_or("n/a".to_string(), |d| d.to_string())
    )?;
    let census: Vec<String> = summary
        .component_size_counts()
        .iter()
        .rev()
        .map(|(size, count)| format!("{count}x{size}"))
        .collect();
    writeln!(out, "components             {}", census.join(" "))?;
    for cat in Category::ALL {
        let p = summary.category_proportions.get(&cat).copied().unwrap_or(0.0);
        writeln!(out, "{:<22} {:.1}%", cat.token(), 100.0 * p)?;
    }
    match &summary.power_law {
        Some(f) => writeln!(out, "power-law alpha        {:.2} (xmin {}, KS {:.3})", f.alpha, f.xmin, f.ks_statistic)?,
        None => writeln!(out, "power-law alpha        n/a")?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let globals = Globals {
        include_isolates: cli.include_isolates,
        clustering: if cli.clustering_exclude_low_degree {
            ClusteringConvention::ExcludeLowDegree
        } else {
            ClusteringConvention::IncludeAll
        },
        weighted_betweenness: cli.weighted_betweenness,
    };

    match cli.command {
        Command::Ingest(args) => {
            let years = args.input.years;
            check_input(&args.input.records)?;
            check_input(&args.input.mapping)?;
            for p in [&args.out, &args.exclusions].into_iter().flatten() {
                check_output(p)?;
            }
            let registry = ingest::load_mapping(&args.input.mapping)?;
            let corpus = ingest::ingest_records(&args.input.records, &registry, years)?;
            if let Some(path) = &args.out {
                let mut w = create(path)?;
                corpus.write_jsonl(&registry, &mut w)?;
                w.flush()?;
            }
            if let Some(path) = &args.exclusions {
                corpus.exclusion_log.write_csv(create(path)?)?;
            }
            let summary = ingest::corpus_summary(&corpus);
            if args.json {
                let mut value = serde_json::to_value(&summary)?;
                let obj = value.as_object_mut().unwrap();
                obj.insert("schema_version".into(), export::SCHEMA_VERSION.into());
                obj.insert("input_records".into(), corpus.input_count.into());
                obj.insert("dropped_authorships".into(), corpus.dropped_authorships.into());
                let excl: serde_json::Map<String, serde_json::Value> = ingest::ExclusionReason::ALL
                    .iter()
                    .map(|&r| (r.token().to_string(), corpus.exclusion_log.get(r).into()))
                    .collect();
                obj.insert("exclusions".into(), excl.into());
                write_json(&value)?;
            } else {
                let mut out = io::stdout().lock();
                writeln!(out, "records       {} of {}", summary.records, corpus.input_count)?;
                writeln!(out, "institutions  {}", summary.institutions)?;
                writeln!(out, "authors       {}", summary.authors)?;
                for r in ingest::ExclusionReason::ALL {
                    writeln!(out, "excluded ({})  {}", r.token(), corpus.exclusion_log.get(r))?;
                }
            }
        }
        Command::Build(args) => {
            let years = args.input.years;
            check_input(&args.input.records)?;
            check_input(&args.input.mapping)?;
            let nodes_out = args.nodes_out.clone().unwrap_or_else(|| export::sibling_node_path(&args.out));
            check_output(&args.out)?;
            check_output(&nodes_out)?;
            let corpus = load_corpus(&args.input.records, &args.input.mapping, years)?;
            let net = build_network(&corpus, BuildOptions { with_subjects: false, include_isolates: globals.include_isolates });
            export::export_edge_csv(&net, &args.out)?;
            export::export_node_csv(&net, &nodes_out)?;
            log::info!("{} institutions, {} collaboration pairs", net.node_count(), net.edge_count());
        }
        Command::Stats(args) => {
            args.input.validate()?;
            if let Some(p) = &args.degrees_out {
                check_output(p)?;
            }
            let net = args.input.load(&globals, false)?;
            let summary = metrics::summarize(&net, globals.clustering);
            if let Some(p) = &args.degrees_out {
                export::write_degree_csv(&net, create(p)?)?;
            }
            if args.json {
                write_json(&summary_json(&summary))?;
            } else {
                print_summary(&summary)?;
            }
        }
        Command::Centrality(args) => {
            args.input.validate()?;
            if let Some(p) = &args.out {
                check_output(p)?;
            }
            let net = args.input.load(&globals, false)?;
            let measure = match (args.measure, args.weighted) {
                (MeasureArg::Betweenness, _) => Measure::Betweenness,
                (MeasureArg::Eigenvector, _) => Measure::Eigenvector,
                (MeasureArg::Degree, false) => Measure::Degree,
                (MeasureArg::Degree, true) | (MeasureArg::WeightedDegree, _) => Measure::WeightedDegree,
            };
            let options = BetweennessOptions {
                weighted: args.weighted || globals.weighted_betweenness,
                normalized: args.normalized,
            };
            let report = centrality::compute(&net, measure, options)?;
            if args.json {
                write_json(&export::versioned_json("report", &report))?;
            } else if let Some(p) = &args.out {
                export::write_centrality_csv(&net, &report, args.top, create(p)?)?;
            } else {
                export::write_centrality_csv(&net, &report, args.top, io::stdout().lock())?;
            }
        }
        Command::Ego(args) => {
            args.input.validate()?;
            check_output(&args.out)?;
            let format = ExportFormat::from_path(&args.out).unwrap_or(ExportFormat::Gexf);
            let net = args.input.load(&globals, false)?;
            let center = net.lookup(&args.center)?;
            let ego = net.ego_subgraph(&center)?;
            export::export_network(&ego.network, format, &args.out)?;
            log::info!(
                "ego network of {}: {} institutions, {} pairs",
                center,
                ego.network.node_count(),
                ego.network.edge_count()
            );
        }
        Command::Facets(args) => {
            args.input.validate()?;
            if let Some(p) = &args.focus {
                check_input(p)?;
            }
            if let Some(p) = &args.out {
                check_output(p)?;
            }
            let by_subject = matches!(args.by, FacetBy::Subject);
            let net = args.input.load(&globals, by_subject)?;
            let focus = match &args.focus {
                Some(p) => facets::load_focus_list(p).with_context(|| format!("reading {}", p.display()))?,
                None => facets::default_focus_list(),
            };
            let ids = facets::resolve_focus(&net, &focus)?;
            let table = if by_subject {
                facets::subject_facets(&net, &ids)?
            } else {
                facets::category_facets(&net, &ids)?
            };
            for id in &table.zero_basis {
                log::warn!("{id} has no collaboration records; its proportions are 0");
            }
            match &args.out {
                Some(p) => table.write_csv(create(p)?)?,
                None => table.write_csv(io::stdout().lock())?,
            }
        }
        Command::Synth(args) => {
            let defaults = SynthConfig::default();
            let config = SynthConfig {
                seed: args.seed,
                institutions: args.inst.unwrap_or(defaults.institutions),
                n_publications: args.pubs,
                authors_per_pub: args.authors.unwrap_or(defaults.authors_per_pub),
                attachment_bias: args.bias,
                subjects_per_pub: args.subjects.unwrap_or(defaults.subjects_per_pub),
                years: args.years.unwrap_or(defaults.years),
            };
            if let Err(SynthError::InvalidConfig(m)) = config.validate() {
                usage_error(m);
            }
            let out = synth::generate(&config, &args.out_dir)?;
            log::info!("wrote {} and {}", out.records.display(), out.mapping.display());
        }
        Command::Export(args) => {
            args.input.validate()?;
            check_output(&args.out)?;
            let format = match args.format {
                Some(FormatArg::Gexf) => ExportFormat::Gexf,
                Some(FormatArg::Dot) => ExportFormat::Dot,
                Some(FormatArg::Csv) => ExportFormat::Csv,
                Some(FormatArg::Json) => ExportFormat::Json,
                None => match ExportFormat::from_path(&args.out) {
                    Some(f) => f,
                    None => usage_error("cannot infer the format from the file name; pass --format"),
                },
            };
            let net = args.input.load(&globals, matches!(format, ExportFormat::Json))?;
            export::export_network(&net, format, &args.out)?;
        }
    }
    Ok(())
}

/// Short label for the kind of failure, shown before the message.
fn category(err: &anyhow::Error) -> &'static str {
    for cause in err.chain() {
        if cause.is::<IngestError>() {
            return "input";
        }
        if cause.is::<NetworkError>() {
            return "network";
        }
        if cause.is::<ExportError>() || cause.is::<csv::Error>() {
            return "format";
        }
        if cause.is::<centrality::CentralityError>() {
            return "analysis";
        }
        if cause.is::<io::Error>() {
            return "io";
        }
    }
    "error"
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { log::LevelFilter::Error } else { log::LevelFilter::Info };
    env_logger::Builder::new().filter_level(level).format_target(false).init();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.into()).build_global() {
            log::warn!("could not configure thread pool: {e}");
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error [{}]: {e:#}", category(&e));
            ExitCode::from(1)
        }
    }
}
