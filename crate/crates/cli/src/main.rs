//! `meso`: ontology validation, term mapping, extraction, coverage and
//! evaluation workflows.

mod config;

use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use meso_core::coverage::{
    coverage_report, default_stopwords, parse_stopwords, Embedder, HashEmbedder, HttpEmbedder,
    NgramSizes, DEFAULT_TOP_K,
};
use meso_core::evaluation::{
    align_labels, init_review_sheet, read_review_sheet, score_reviews, unmapped_report,
    weighted_kappa, write_review_sheet, ReviewLabel, Weights,
};
use meso_core::extraction::{
    extract_batch, pack_fixtures, parse_jsonl, read_posts, read_records, to_jsonl,
    CompletionClient, HttpCompletionClient, MockCompletionClient,
};
use meso_core::fsio::write_atomic;
use meso_core::matcher::{map_keywords, TermMatcher};
use meso_core::ontology::{
    load_ontology, read_document, seed_meso, to_canonical_json, validate_concepts, Ontology,
    Profile, Severity,
};
use serde::Deserialize;

use config::{Config, Overrides};

#[derive(Parser)]
#[command(name = "meso", version, about = "Mental stress ontology toolkit")]
struct Cli {
    /// Config file of `key = "value"` lines [default: ./meso.toml if present]
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print the effective configuration and exit
    #[arg(long)]
    show_config: bool,
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Scan an ontology file for pitfalls
    Validate {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = ProfileArg::Generic)]
        profile: ProfileArg,
        /// Fail on suggestions as well as errors and warnings
        #[arg(long)]
        strict: bool,
    },
    /// Map a term, or a keyword list, onto the ontology
    Map {
        /// Ontology file [default: bundled seed]
        #[arg(long)]
        ontology: Option<PathBuf>,
        /// A single term
        #[arg(
            long,
            conflicts_with = "keywords",
            required_unless_present = "keywords"
        )]
        term: Option<String>,
        /// File with one keyword per line
        #[arg(long)]
        keywords: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extract stress information from posts
    Extract {
        #[arg(long)]
        ontology: Option<PathBuf>,
        /// Posts as JSON Lines of {"id", "text"}
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = ClientArg::Mock)]
        client: ClientArg,
        /// Directory of canned-response *.jsonl files (mock client)
        #[arg(long, required_if_eq("client", "mock"))]
        fixtures: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Keyword coverage of the ontology over a directory of documents
    Coverage {
        #[arg(long)]
        ontology: Option<PathBuf>,
        /// Directory with one UTF-8 text file per document
        #[arg(long)]
        docs: PathBuf,
        #[arg(long, value_enum, default_value_t = ClientArg::Mock)]
        embedder: ClientArg,
        /// Keywords kept per n-gram level per document
        #[arg(long, default_value_t = DEFAULT_TOP_K)]
        k: usize,
        #[arg(long, default_value = "1,2,3")]
        ngrams: String,
        /// Stopword file [default: bundled English list]
        #[arg(long)]
        stopwords: Option<PathBuf>,
        /// Dimension of the mock embedder
        #[arg(long, default_value_t = HashEmbedder::DEFAULT_DIM)]
        dim: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Review sheet management
    Review {
        #[command(subcommand)]
        command: ReviewCommand,
    },
    /// Score an adjudicated review sheet
    Evaluate {
        #[arg(long)]
        sheet: PathBuf,
        /// Reviewer sheets for the agreement statistic
        #[arg(long, requires = "reviewer_b")]
        reviewer_a: Option<PathBuf>,
        #[arg(long, requires = "reviewer_a")]
        reviewer_b: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = WeightsArg::Linear)]
        weights: WeightsArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Weighted kappa between two reviewers' sheets
    Kappa {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = WeightsArg::Linear)]
        weights: WeightsArg,
    },
    /// Items that could not be mapped to the ontology
    Unmapped {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the bundled seed ontology
    Seed {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Canned-response fixture tools
    Fixtures {
        #[command(subcommand)]
        command: FixturesCommand,
    },
}

#[derive(Subcommand)]
enum ReviewCommand {
    /// One unlabeled row per extracted item
    Init {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum FixturesCommand {
    /// Key recorded responses by prompt hash
    Pack {
        #[arg(long)]
        ontology: Option<PathBuf>,
        #[arg(long)]
        posts: PathBuf,
        /// JSON Lines of {"post_id", "responses": [...]}
        #[arg(long)]
        responses: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProfileArg {
    Generic,
    Meso,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClientArg {
    Mock,
    Http,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WeightsArg {
    Linear,
    Quadratic,
}

impl WeightsArg {
    fn weights(self) -> Weights<f64> {
        match self {
            WeightsArg::Linear => Weights::Linear,
            WeightsArg::Quadratic => Weights::Quadratic,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordedResponses {
    post_id: String,
    responses: Vec<String>,
}

fn ontology_or_seed(path: Option<&Path>) -> Result<Ontology> {
    match path {
        Some(p) => load_ontology(p).with_context(|| format!("loading {}", p.display())),
        None => Ok(seed_meso()),
    }
}

/// Writes atomically to `out`, or to standard output.
fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn pretty_json<T: serde::Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("serializable output");
    s.push('\n');
    s.into_bytes()
}

fn read_docs(dir: &Path) -> Result<Vec<String>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.is_file())
        .filter(|p| {
            !p.file_name()
                .is_some_and(|n| n.to_string_lossy().starts_with('.'))
        })
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display())))
        .collect()
}

fn kappa_between(a: &Path, b: &Path, weights: WeightsArg) -> Result<f64> {
    let ra = read_review_sheet(a).with_context(|| format!("reading {}", a.display()))?;
    let rb = read_review_sheet(b).with_context(|| format!("reading {}", b.display()))?;
    let (la, lb) = align_labels(&ra, &rb)?;
    Ok(weighted_kappa(
        &la,
        &lb,
        &ReviewLabel::ORDERED,
        &weights.weights(),
    )?)
}

/// Runs one subcommand; `Ok(false)` means a validation failure (exit 1).
fn run(command: Command, cfg: &Config) -> Result<bool> {
    match command {
        Command::Validate {
            file,
            profile,
            strict,
        } => {
            let doc =
                read_document(&file).with_context(|| format!("loading {}", file.display()))?;
            let profile = match profile {
                ProfileArg::Generic => Profile::Generic,
                ProfileArg::Meso => Profile::Meso,
            };
            let pitfalls = validate_concepts(&doc.concepts, profile);
            for p in &pitfalls {
                println!("{p}");
            }
            let noun = if pitfalls.len() == 1 {
                "pitfall"
            } else {
                "pitfalls"
            };
            println!("{} {noun}", pitfalls.len());
            let failing = pitfalls
                .iter()
                .any(|p| strict || p.severity != Severity::Suggestion);
            Ok(!failing)
        }
        Command::Map {
            ontology,
            term,
            keywords,
            out,
        } => {
            let o = ontology_or_seed(ontology.as_deref())?;
            if let Some(t) = term {
                let r = TermMatcher::new(&o).map_term(&t);
                emit(out.as_deref(), &pretty_json(&r))?;
            } else {
                let path = keywords.expect("clap enforces term or keywords");
                let text = std::fs::read_to_string(&path)
                    .with_context(|| format!("reading {}", path.display()))?;
                let terms: Vec<String> = text
                    .lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty())
                    .map(str::to_string)
                    .collect();
                let mapping = map_keywords(&o, &terms)?;
                eprintln!("{}", mapping.distribution);
                emit(out.as_deref(), &pretty_json(&mapping))?;
            }
            Ok(true)
        }
        Command::Extract {
            ontology,
            input,
            client,
            fixtures,
            out,
        } => {
            let o = ontology_or_seed(ontology.as_deref())?;
            let posts =
                read_posts(&input).with_context(|| format!("reading {}", input.display()))?;
            let client: Box<dyn CompletionClient> = match client {
                ClientArg::Mock => {
                    let dir = fixtures.expect("clap requires --fixtures for the mock client");
                    Box::new(MockCompletionClient::from_dir(&dir)?)
                }
                ClientArg::Http => Box::new(HttpCompletionClient::new(cfg.llm())?),
            };
            let records = extract_batch(client.as_ref(), &o, &posts, cfg.parallelism, cfg.retries)?;
            let failed = records.iter().filter(|r| r.is_failure()).count();
            emit(out.as_deref(), to_jsonl(&records).as_bytes())?;
            eprintln!("{} records, {failed} failed", records.len());
            Ok(true)
        }
        Command::Coverage {
            ontology,
            docs,
            embedder,
            k,
            ngrams,
            stopwords,
            dim,
            out,
        } => {
            let o = ontology_or_seed(ontology.as_deref())?;
            let sizes: NgramSizes = ngrams.parse()?;
            let stop = match stopwords {
                Some(p) => parse_stopwords(
                    &std::fs::read_to_string(&p)
                        .with_context(|| format!("reading {}", p.display()))?,
                ),
                None => default_stopwords(),
            };
            let texts = read_docs(&docs)?;
            let embedder: Box<dyn Embedder<f64>> = match embedder {
                ClientArg::Mock => {
                    if dim < 2 {
                        bail!("--dim must be at least 2");
                    }
                    Box::new(HashEmbedder::new(dim))
                }
                ClientArg::Http => Box::new(HttpEmbedder::new(cfg.embed())?),
            };
            let report = coverage_report(&o, &texts, embedder.as_ref(), k, &sizes, &stop)?;
            eprintln!("{}", report.distribution);
            let doc = serde_json::json!({
                "embedder": embedder.embedder_id(),
                "k": k,
                "ngrams": sizes.to_string(),
                "documents": texts.len(),
                "report": report,
            });
            emit(out.as_deref(), &pretty_json(&doc))?;
            Ok(true)
        }
        Command::Review {
            command: ReviewCommand::Init { records, out },
        } => {
            let recs =
                read_records(&records).with_context(|| format!("reading {}", records.display()))?;
            let rows = init_review_sheet(&recs);
            let mut buf = Vec::new();
            write_review_sheet(&rows, &mut buf)?;
            emit(out.as_deref(), &buf)?;
            Ok(true)
        }
        Command::Evaluate {
            sheet,
            reviewer_a,
            reviewer_b,
            weights,
            out,
        } => {
            let rows = read_review_sheet(&sheet)
                .with_context(|| format!("reading {}", sheet.display()))?;
            let mut report = score_reviews(&rows)?;
            if let (Some(a), Some(b)) = (reviewer_a, reviewer_b) {
                report = report.with_kappa(kappa_between(&a, &b, weights)?);
            }
            eprint!("{report}");
            emit(out.as_deref(), &pretty_json(&report))?;
            Ok(true)
        }
        Command::Kappa { a, b, weights } => {
            println!("{:.6}", kappa_between(&a, &b, weights)?);
            Ok(true)
        }
        Command::Unmapped { records, out } => {
            let recs =
                read_records(&records).with_context(|| format!("reading {}", records.display()))?;
            let report = unmapped_report(&recs);
            eprintln!(
                "{} unmapped, {} durations excluded, {} remaining, {} unique",
                report.total_unmapped,
                report.duration_excluded,
                report.remaining,
                report.unique_total
            );
            emit(out.as_deref(), &pretty_json(&report))?;
            Ok(true)
        }
        Command::Seed { out } => {
            emit(out.as_deref(), to_canonical_json(&seed_meso()).as_bytes())?;
            Ok(true)
        }
        Command::Fixtures {
            command:
                FixturesCommand::Pack {
                    ontology,
                    posts,
                    responses,
                    out,
                },
        } => {
            let o = ontology_or_seed(ontology.as_deref())?;
            let posts =
                read_posts(&posts).with_context(|| format!("reading {}", posts.display()))?;
            let text = std::fs::read_to_string(&responses)
                .with_context(|| format!("reading {}", responses.display()))?;
            let recorded: Vec<RecordedResponses> = parse_jsonl(&text)?;
            let mut by_post = HashMap::new();
            for r in recorded {
                if by_post.insert(r.post_id.clone(), r.responses).is_some() {
                    bail!("duplicate responses for post {}", r.post_id);
                }
            }
            let entries = pack_fixtures(&o, &posts, &by_post)?;
            if entries.len() != by_post.len() {
                bail!(
                    "{} of {} recorded posts are missing from the posts file",
                    by_post.len() - entries.len(),
                    by_post.len()
                );
            }
            emit(out.as_deref(), to_jsonl(&entries).as_bytes())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cfg, _) = match Config::resolve(cli.config.as_deref(), &cli.overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if cli.show_config {
        print!("{}", cfg.to_file_text());
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command else {
        eprintln!("error: a subcommand is required; see `meso --help`");
        return ExitCode::from(2);
    };
    match run(command, &cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
