use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use shawn_core::fixture;
use shawn_core::inference::{conjunctive_query, parse_query};
use shawn_core::rdf_export::{export, install_save_hook, write_export_files, Format, UriPolicy};
use shawn_core::store::Store;
use shawn_server::{router, AppConfig, DEFAULT_BASE_URI};
use tracing_subscriber::EnvFilter;

/// Environment variable that, when set, replaces `--dir`.
const DATA_DIR_ENV: &str = "SHAWN_DATA_DIR";

#[derive(Parser)]
#[command(name = "shawn", version, about = "A small semantic wiki")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Create a data directory seeded with the demo wiki.
    Init {
        dir: PathBuf,
        #[arg(long, default_value = DEFAULT_BASE_URI)]
        base_uri: String,
    },
    /// Serve the wiki over HTTP until interrupted.
    Serve {
        #[arg(long)]
        dir: Option<PathBuf>,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: String,
        /// Reject edits with 403.
        #[arg(long)]
        readonly: bool,
        #[arg(long, default_value = DEFAULT_BASE_URI)]
        base_uri: String,
        /// Directory with the built browser client, served under /static.
        #[arg(long)]
        static_dir: Option<PathBuf>,
    },
    /// Print the RDF export to standard output.
    Export {
        #[arg(long)]
        dir: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Ntriples)]
        format: FormatArg,
        /// Include inferred triples.
        #[arg(long)]
        inferred: bool,
        #[arg(long, default_value = DEFAULT_BASE_URI)]
        base_uri: String,
    },
    /// Print the pages matching a clause expression, one per line.
    Query {
        #[arg(long)]
        dir: Option<PathBuf>,
        expr: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Ntriples,
    Turtle,
}

/// Failure of a well-formed command that should exit with a code other
/// than 1.
#[derive(Debug)]
struct Exit(u8, String);

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.1)
    }
}

impl std::error::Error for Exit {}

fn data_dir(flag: Option<PathBuf>) -> Result<PathBuf> {
    match std::env::var_os(DATA_DIR_ENV).filter(|v| !v.is_empty()) {
        Some(env) => Ok(PathBuf::from(env)),
        None => flag.with_context(|| format!("no data directory: pass --dir or set {DATA_DIR_ENV}")),
    }
}

fn open(dir: &PathBuf) -> Result<Store> {
    Store::open(dir).with_context(|| format!("cannot open data directory {}", dir.display()))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Init { dir, base_uri } => {
            let store = open(&dir)?;
            install_save_hook(&store, &base_uri)?;
            let saved = fixture::seed(&store)?;
            let index = store.snapshot();
            write_export_files(&index, &UriPolicy::from_wiki(base_uri.as_str(), &index)?, store.root())?;
            println!("initialised {} ({saved} pages seeded)", dir.display());
        }
        Command::Serve { dir, port, bind, readonly, base_uri, static_dir } => {
            let dir = data_dir(dir)?;
            let store = open(&dir)?;
            install_save_hook(&store, &base_uri)?;
            let index = store.snapshot();
            write_export_files(&index, &UriPolicy::from_wiki(base_uri.as_str(), &index)?, store.root())?;
            let app = router(Arc::new(store), AppConfig { readonly, base_uri, static_dir });
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(async move {
                let listener = tokio::net::TcpListener::bind((bind.as_str(), port))
                    .await
                    .with_context(|| format!("cannot listen on {bind}:{port}"))?;
                tracing::info!("serving {} on http://{}", dir.display(), listener.local_addr()?);
                axum::serve(listener, app)
                    .with_graceful_shutdown(async {
                        let _ = tokio::signal::ctrl_c().await;
                    })
                    .await?;
                anyhow::Ok(())
            })?;
        }
        Command::Export { dir, format, inferred, base_uri } => {
            let store = open(&data_dir(dir)?)?;
            let index = store.snapshot();
            let format = match format {
                FormatArg::Ntriples => Format::NTriples,
                FormatArg::Turtle => Format::Turtle,
            };
            let doc = export(&index, &UriPolicy::from_wiki(base_uri.as_str(), &index)?, format, inferred)?;
            print!("{}", doc.body);
        }
        Command::Query { dir, expr } => {
            let clauses = parse_query(&expr).map_err(|e| Exit(2, format!("malformed query ({}): {e}", e.code())))?;
            let store = open(&data_dir(dir)?)?;
            let matches = conjunctive_query(&store.snapshot(), &clauses)?;
            for page in matches {
                println!("{page}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")))
        .with_writer(std::io::stderr)
        .init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("shawn: {err:#}");
            match err.downcast_ref::<Exit>() {
                Some(Exit(code, _)) => ExitCode::from(*code),
                None => ExitCode::FAILURE,
            }
        }
    }
}
