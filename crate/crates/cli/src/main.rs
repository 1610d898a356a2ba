mod evaluate;
mod generate;
mod infer;
mod xml;

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use rexinfer::rewrite::koa_to_kore_report;
use rexinfer::Koa;

/// Inference of deterministic regular expressions from positive samples.
#[derive(Parser)]
#[command(name = "rexinfer", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Infer an expression from a sample file (`-` reads stdin).
    Infer(infer::InferArgs),
    /// Write a sample of an expression or hard family, or a corpus of
    /// random expressions.
    Generate(generate::GenerateArgs),
    /// Measure the success rate of inference over a corpus of expressions.
    Evaluate(evaluate::EvaluateArgs),
    /// Extract child-name sequences of XML elements as samples.
    XmlExtract(xml::XmlArgs),
    /// Translate an automaton in JSON form into an expression.
    Translate {
        /// Automaton file (`-` reads stdin).
        koa: PathBuf,
    },
}

/// A failure of an internal invariant rather than of the input.
#[derive(Debug, thiserror::Error)]
#[error("internal error: {0}")]
pub struct Internal(pub String);

pub fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading stdin")?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

pub fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn translate(path: &Path) -> Result<()> {
    let text = read_input(path)?;
    let koa: Koa = serde_json::from_str(&text).with_context(|| format!("parsing automaton {}", path.display()))?;
    let (expr, repairs) = koa_to_kore_report(&koa);
    if repairs > 0 {
        eprintln!("warning: {repairs} repair step(s); the expression may accept more than the automaton");
    }
    println!("{expr}");
    Ok(())
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("REXINFER_THREADS") {
        let n: usize = v.parse().with_context(|| format!("REXINFER_THREADS={v:?} is not a number"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<Internal>().is_some() {
        3
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Infer(args) => infer::run(args),
        Command::Generate(args) => generate::run(args),
        Command::Evaluate(args) => evaluate::run(args),
        Command::XmlExtract(args) => xml::run(args),
        Command::Translate { koa } => translate(koa),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
