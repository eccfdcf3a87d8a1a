//! `muscale`: analyze, annotate and generate multiscale design documents, or
//! run the dashboard service.
//!
//! Exit status is 0 on success, 2 when an input fails validation (or names an
//! unknown cluster) and 1 on any other error.

mod analyze;
mod generate;

use std::fs;
use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use muscale_core::annotator::AnnotateError;
use muscale_core::model::DOCUMENT_SCHEMA;
use muscale_core::recognizer::analyze as recognize;
use muscale_core::{
    build_overlay, parse_document, render_svg, Palette, RecognizerConfig, RenderOptions,
};
use muscale_service::{AppState, Store};

#[derive(Parser)]
#[command(
    name = "muscale",
    version,
    about = "Multiscale design document analytics"
)]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Zoom factor separating adjacent scale levels.
    #[arg(long, global = true, env = "MUSCALE_ZOOM_STEP", default_value_t = 3.0)]
    zoom_step: f64,
    /// Box growth, as a multiple of an element's size, used for linking.
    #[arg(long, global = true, env = "MUSCALE_EXPANSION", default_value_t = 0.5)]
    expansion: f64,
    /// Cap on the number of scale levels.
    #[arg(long, global = true, env = "MUSCALE_MAX_LEVELS", default_value_t = 8)]
    max_levels: u32,
    /// Print the resolved recognizer configuration to stderr.
    #[arg(long, global = true)]
    print_config: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Compute analytics records for documents or directories of documents.
    Analyze {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Write to a file instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Render a document with its cluster regions as SVG.
    Annotate {
        document: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Reveal regions one after another.
        #[arg(long)]
        animated: bool,
        /// Emphasize one cluster and frame the view on it.
        #[arg(long)]
        highlight_cluster: Option<u32>,
        /// Emit the overlay as JSON instead of SVG.
        #[arg(long, conflicts_with_all = ["animated", "highlight_cluster"])]
        overlay_json: bool,
    },
    /// Generate documents with known hierarchies.
    Generate(generate::GenerateArgs),
    /// Run the dashboard service.
    Serve {
        #[arg(long, env = "MUSCALE_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, env = "MUSCALE_BIND", default_value = "127.0.0.1")]
        bind: IpAddr,
        #[arg(long, env = "MUSCALE_DATA_DIR", default_value = "muscale-data")]
        data_dir: PathBuf,
    },
    /// Print the JSON Schema of the document format.
    PrintSchema,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Jsonl,
    Csv,
}

/// An error with the exit status it maps to.
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn validation(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: 2,
            error: error.into(),
        }
    }
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Self {
            code: 1,
            error: e.into(),
        }
    }
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_env("MUSCALE_LOG")
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info")),
        )
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let c = &cli.config;
    let config = RecognizerConfig::new(c.zoom_step, c.expansion, c.max_levels)
        .map_err(Failure::validation)?;
    if c.print_config {
        eprintln!("{}", String::from_utf8_lossy(&config.canonical_bytes()));
    }
    match cli.command {
        Command::Analyze {
            paths,
            format,
            output,
        } => {
            let mut out = Vec::new();
            let result = analyze::run(&paths, format, &config, &mut out);
            write_output(output.as_deref(), &out)?;
            result
        }
        Command::Annotate {
            document,
            output,
            animated,
            highlight_cluster,
            overlay_json,
        } => {
            let bytes =
                fs::read(&document).with_context(|| format!("reading {}", document.display()))?;
            let doc = parse_document(&bytes)
                .map_err(|e| Failure::validation(anyhow::anyhow!("{}: {e}", document.display())))?;
            let analysis = recognize(&doc, &config);
            let overlay = build_overlay(&doc, &analysis.hierarchy, &Palette::default())
                .map_err(annotate_failure)?;
            let rendered = if overlay_json {
                overlay.canonical_bytes()
            } else {
                render_svg(
                    &doc,
                    &overlay,
                    RenderOptions {
                        animated,
                        highlight_cluster,
                    },
                )
                .map_err(annotate_failure)?
                .into_bytes()
            };
            write_output(output.as_deref(), &rendered)
        }
        Command::Generate(args) => generate::run(&args),
        Command::Serve {
            port,
            bind,
            data_dir,
        } => serve(SocketAddr::new(bind, port), &data_dir, config),
        Command::PrintSchema => write_output(None, DOCUMENT_SCHEMA.as_bytes()),
    }
}

fn annotate_failure(e: AnnotateError) -> Failure {
    match e {
        AnnotateError::UnknownCluster(_) => Failure::validation(e),
        other => other.into(),
    }
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display()))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            if !bytes.ends_with(b"\n") {
                stdout.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

fn serve(addr: SocketAddr, data_dir: &Path, config: RecognizerConfig) -> Result<(), Failure> {
    let store = Store::open(data_dir)
        .with_context(|| format!("opening data directory {}", data_dir.display()))?;
    let state = Arc::new(AppState::new(store, config));
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .with_context(|| format!("binding {addr}"))?;
        muscale_service::serve(listener, state, shutdown_signal()).await?;
        Ok(())
    })
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let terminate = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending().await,
        }
    };
    #[cfg(not(unix))]
    let terminate = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = terminate => {},
    }
}
