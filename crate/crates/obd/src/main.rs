use std::fs;
use std::io::{self, BufRead, IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use obd::error::CliError;
use obd::reproduce;
use obd::script::{split, Statement};
use obd::session::Session;

#[derive(Parser)]
#[command(name = "obd", version, about = "Decide statements about Beatty sequences in Ostrowski numeration")]
struct Cli {
    /// Session directory holding systems, automata and the journal.
    #[arg(long, global = true, default_value = "obd-session")]
    session: PathBuf,
    /// Run the automaton kernels on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute a script file.
    Run { script: PathBuf },
    /// Read commands interactively from standard input.
    Repl { dir: PathBuf },
    /// Write a Graphviz rendering of a stored automaton.
    ExportDot {
        name: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Describe a stored automaton.
    Info { name: String },
    /// List the k smallest accepted tuples of a stored automaton.
    Enum { name: String, k: usize },
    /// Run the bundled reproduction scripts (a section id such as s6, or all).
    Reproduce {
        section: String,
        /// Include the long-running sections.
        #[arg(long)]
        slow: bool,
        /// JUnit XML report path.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn one(session: &mut Session, text: String) -> Result<(), CliError> {
    let st = Statement {
        line: 1,
        text,
        verbose: false,
    };
    session.execute(&st, &mut io::stdout())
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Cmd::Run { script } => {
            let source = fs::read_to_string(&script).map_err(|source| CliError::Io {
                path: script.clone(),
                source,
            })?;
            let mut session = Session::open(&cli.session)?;
            let report = session.run_script(&source, &mut io::stdout())?;
            if report.failures.is_empty() {
                Ok(ExitCode::SUCCESS)
            } else {
                for f in &report.failures {
                    eprintln!("expectation failed: {f}");
                }
                Ok(ExitCode::from(1))
            }
        }
        Cmd::Repl { dir } => repl(Session::open(dir)?),
        Cmd::ExportDot { name, out } => {
            let mut session = Session::open(&cli.session)?;
            let text = match out {
                Some(p) => format!("export-dot {name} \"{}\"", p.display()),
                None => format!("export-dot {name}"),
            };
            one(&mut session, text).map(|_| ExitCode::SUCCESS)
        }
        Cmd::Info { name } => {
            let mut session = Session::open(&cli.session)?;
            one(&mut session, format!("info {name}")).map(|_| ExitCode::SUCCESS)
        }
        Cmd::Enum { name, k } => {
            let mut session = Session::open(&cli.session)?;
            one(&mut session, format!("enum {name} {k}")).map(|_| ExitCode::SUCCESS)
        }
        Cmd::Reproduce {
            section,
            slow,
            report,
        } => {
            let sections = reproduce::select(&section, slow)?;
            let results = reproduce::run_sections(&sections);
            for r in &results {
                let verdict = if r.passed() { "PASS" } else { "FAIL" };
                println!("{verdict} {} ({}) {:.1}s", r.id, r.title, r.seconds);
                if let Some(e) = &r.error {
                    println!("  error: {e}");
                }
                for f in &r.failures {
                    println!("  expectation failed: {f}");
                }
            }
            if let Some(path) = report {
                fs::write(&path, reproduce::junit(&results))
                    .map_err(|source| CliError::Io { path, source })?;
            }
            Ok(if results.iter().all(|r| r.passed()) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn repl(mut session: Session) -> Result<ExitCode, CliError> {
    let interactive = io::stdin().is_terminal();
    let mut buf = String::new();
    let prompt = |cont: bool| {
        if interactive {
            print!("{}", if cont { "...> " } else { "obd> " });
            let _ = io::stdout().flush();
        }
    };
    prompt(false);
    for line in io::stdin().lock().lines() {
        let line = line.map_err(|source| CliError::Io {
            path: "<stdin>".into(),
            source,
        })?;
        buf.push_str(&line);
        buf.push('\n');
        if buf.matches('"').count() % 2 == 1 {
            prompt(true);
            continue;
        }
        match split(&buf) {
            Ok(statements) => {
                for st in statements {
                    if let Err(e) = session.execute(&st, &mut io::stdout()) {
                        eprintln!("error: {e}");
                    }
                }
            }
            Err(e) => eprintln!("error: {e}"),
        }
        buf.clear();
        prompt(false);
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    obd_core::par::set_parallel(!cli.sequential);
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
