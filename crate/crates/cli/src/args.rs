use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "lifecrypt", version, about = "Life-Like automaton stream cipher and its analysis tools")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Encrypt a file into a CACR container.
    Encrypt(EncryptArgs),
    /// Decrypt a CACR container; the parameters come from its header.
    Decrypt(DecryptArgs),
    /// Write raw keystream bytes (headerless, dieharder-compatible).
    Keystream(KeystreamArgs),
    /// Rank rules by entropy, Lyapunov exponent and Hamming distance.
    Rank(RankArgs),
    /// Run the ENT battery over a file or a generated keystream.
    Enttest(EnttestArgs),
    /// Histogram and power-spectrum analysis of a PGM image.
    Analyze(AnalyzeArgs),
    /// List the built-in rules as "name<TAB>rule".
    Catalog,
}

#[derive(Args, Debug, Clone)]
#[group(id = "key_source", multiple = false)]
pub struct KeyArgs {
    /// Password text, at most 16 bytes, zero-padded.
    #[arg(long, group = "key_source")]
    pub key: Option<String>,
    /// Password as 32 hexadecimal digits.
    #[arg(long, group = "key_source")]
    pub key_hex: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct GeneratorArgs {
    /// Catalog name or B/S notation.
    #[arg(long, default_value = "Fredkin")]
    pub rule: String,
    /// Grid size as ROWSxCOLS.
    #[arg(long, default_value = "128x128", value_parser = parse_size)]
    pub size: (usize, usize),
    /// Raw bytes XOR-folded into each keystream byte.
    #[arg(long, default_value_t = 10)]
    pub rho: usize,
    /// Logistic-map iterations discarded before seeding.
    #[arg(long, default_value_t = lifecrypt::seeding::DEFAULT_ALPHA)]
    pub alpha: u32,
    /// Logistic-map parameter, within [3.9, 4].
    #[arg(long, default_value_t = lifecrypt::seeding::DEFAULT_MU)]
    pub mu: f64,
}

#[derive(Args, Debug)]
pub struct EncryptArgs {
    #[command(flatten)]
    pub key: KeyArgs,
    #[command(flatten)]
    pub generator: GeneratorArgs,
    pub input: PathBuf,
    pub output: PathBuf,
}

#[derive(Args, Debug)]
pub struct DecryptArgs {
    #[command(flatten)]
    pub key: KeyArgs,
    pub input: PathBuf,
    pub output: PathBuf,
}

#[derive(Args, Debug)]
pub struct KeystreamArgs {
    #[command(flatten)]
    pub key: KeyArgs,
    #[command(flatten)]
    pub generator: GeneratorArgs,
    /// Number of bytes to write.
    #[arg(long)]
    pub bytes: u64,
    /// Also write the seed generation in grid text format.
    #[arg(long)]
    pub dump_seed: Option<PathBuf>,
    /// Output file; standard output when omitted or "-".
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RankArgs {
    /// Comma-separated catalog names or notations; the whole catalog by default.
    #[arg(long, value_delimiter = ',')]
    pub rules: Vec<String>,
    #[arg(long, default_value = "128x128", value_parser = parse_size)]
    pub size: (usize, usize),
    #[arg(long, default_value_t = 5)]
    pub trials: u32,
    #[arg(long, default_value_t = 0)]
    pub trial_seed: u64,
    /// Alive probability of the random trial grids.
    #[arg(long, default_value_t = 0.5)]
    pub density: f64,
    #[arg(long, default_value_t = 10_000)]
    pub entropy_horizon: u64,
    #[arg(long, default_value_t = 200)]
    pub lyapunov_horizon: u64,
    #[arg(long, default_value_t = 1000)]
    pub hamming_horizon: u64,
    /// Perturbed cell as ROW,COL; the grid center by default.
    #[arg(long, value_parser = parse_site)]
    pub site: Option<(usize, usize)>,
    /// CSV output file; standard output when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EnttestArgs {
    #[command(flatten)]
    pub key: KeyArgs,
    #[command(flatten)]
    pub generator: GeneratorArgs,
    /// Bytes to generate when no input file is given.
    #[arg(long, default_value_t = 10 * 1024 * 1024)]
    pub bytes: u64,
    /// Also write the report as CSV to this file.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// File to test; a keystream is generated from the key when omitted.
    pub input: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum FitMode {
    Pad,
    Crop,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Binary PGM (P5, maxval 255).
    pub input: PathBuf,
    /// Write "value,count" lines.
    #[arg(long)]
    pub histogram: Option<PathBuf>,
    /// Write the log-scaled power spectrum as PGM.
    #[arg(long)]
    pub spectrum: Option<PathBuf>,
    /// Print the spectral flatness.
    #[arg(long)]
    pub flatness: bool,
    /// Print the histogram peak-to-mean ratio.
    #[arg(long)]
    pub peak_ratio: bool,
    /// How non-power-of-two images are brought to the transform size.
    #[arg(long, value_enum, default_value_t = FitMode::Pad)]
    pub fit: FitMode,
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (m, n) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected ROWSxCOLS, got {s:?}"))?;
    let m: usize = m.trim().parse().map_err(|_| format!("bad row count {m:?}"))?;
    let n: usize = n.trim().parse().map_err(|_| format!("bad column count {n:?}"))?;
    if m == 0 || n == 0 {
        return Err("grid dimensions must be positive".into());
    }
    Ok((m, n))
}

fn parse_site(s: &str) -> Result<(usize, usize), String> {
    let (r, c) = s.split_once(',').ok_or_else(|| format!("expected ROW,COL, got {s:?}"))?;
    let r = r.trim().parse().map_err(|_| format!("bad row {r:?}"))?;
    let c = c.trim().parse().map_err(|_| format!("bad column {c:?}"))?;
    Ok((r, c))
}
