use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rexinfer::datagen::{gen_expression, gen_sample, hard_family, letters, Family, GenConfig, SampleGenConfig};
use rexinfer::koa::{covering_sample, sample_with_coverage};
use rexinfer::regex_ast::parse;
use rexinfer::{Regex, Sample};

use crate::write_output;

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// Expression to sample from.
    #[arg(long, conflicts_with_all = ["family", "alphabet"])]
    pub expr: Option<String>,
    /// Hard family to sample from: `r1` or `r2`.
    #[arg(long, requires = "n", conflicts_with = "alphabet")]
    pub family: Option<Family>,
    /// Parameter of the hard family.
    #[arg(long)]
    pub n: Option<usize>,
    /// Write a corpus of random deterministic expressions over this many
    /// symbols instead of a sample.
    #[arg(long)]
    pub alphabet: Option<usize>,
    /// Number of expressions in the corpus.
    #[arg(long, default_value_t = 10, requires = "alphabet")]
    pub count: usize,
    /// Each symbol occurs between 1 and this many times in corpus
    /// expressions (1 gives single-occurrence expressions).
    #[arg(long, default_value_t = 1, requires = "alphabet")]
    pub max_occ: usize,
    /// Number of sample words.
    #[arg(long, default_value_t = 100)]
    pub size: usize,
    /// Include a witness for every edge of the Glushkov automaton.
    #[arg(long, conflicts_with = "coverage")]
    pub covering: bool,
    /// Aim for this fraction of witnessed Glushkov edges.
    #[arg(long)]
    pub coverage: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file (default stdout).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

pub enum SampleMode {
    Plain,
    Covering,
    Coverage(f64),
}

impl SampleMode {
    pub fn new(covering: bool, coverage: Option<f64>) -> Result<Self> {
        Ok(match (covering, coverage) {
            (true, _) => SampleMode::Covering,
            (false, Some(f)) if (0.0..=1.0).contains(&f) => SampleMode::Coverage(f),
            (false, Some(f)) => bail!("--coverage must lie in [0, 1], got {f}"),
            (false, None) => SampleMode::Plain,
        })
    }

    pub fn draw(&self, r: &Regex, size: usize, rng: &mut impl Rng) -> rexinfer::Result<Sample> {
        match *self {
            SampleMode::Plain => gen_sample(r, &SampleGenConfig::with_size(size), rng),
            SampleMode::Covering => covering_sample(r, size, rng),
            SampleMode::Coverage(f) => sample_with_coverage(r, f, size, rng),
        }
    }
}

fn corpus(sigma: usize, count: usize, max_occ: usize, rng: &mut ChaCha8Rng) -> Result<String> {
    if sigma == 0 || max_occ == 0 {
        bail!("--alphabet and --max-occ must be at least 1");
    }
    let mut out = String::new();
    for _ in 0..count {
        let occ = (0..sigma).map(|_| rng.random_range(1..=max_occ)).collect();
        let r = gen_expression(&GenConfig::new(letters(sigma), occ), rng)?;
        writeln!(out, "{r}")?;
    }
    Ok(out)
}

pub fn run(args: &GenerateArgs) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    if let Some(sigma) = args.alphabet {
        let text = corpus(sigma, args.count, args.max_occ, &mut rng)?;
        return write_output(args.output.as_deref(), &text);
    }
    let r = match (&args.expr, args.family) {
        (Some(e), _) => parse(e)?,
        (None, Some(f)) => hard_family(args.n.unwrap_or_default(), f)?,
        (None, None) => bail!("one of --expr, --family or --alphabet is required"),
    };
    let sample = SampleMode::new(args.covering, args.coverage)?.draw(&r, args.size, &mut rng)?;
    write_output(args.output.as_deref(), &sample.to_lines())
}
