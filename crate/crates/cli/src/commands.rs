use std::fmt;
use std::io::{self, Write};
use std::path::Path;

use lifecrypt::chaos::{rank_rules, ChaosReport, Horizons, RankConfig};
use lifecrypt::imaging::{self, Fit, GrayImage};
use lifecrypt::randtests::{EntAccumulator, EntReport};
use lifecrypt::{catalog, open, seal, CipherParams, CiphertextEnvelope, Password, Rule};

use crate::args::{AnalyzeArgs, DecryptArgs, EncryptArgs, EnttestArgs, FitMode, GeneratorArgs, KeyArgs, KeystreamArgs, RankArgs};
use crate::output;

/// A failed command; the variant picks the exit status.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or values that violate a precondition.
    Usage(String),
    /// Unreadable, malformed or unwritable data.
    Data(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Data(m) => f.write_str(m),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

fn usage(e: impl fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn data(e: impl fmt::Display) -> Failure {
    Failure::Data(e.to_string())
}

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    output::read(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn password(key: &KeyArgs) -> Result<Password, Failure> {
    match (&key.key, &key.key_hex) {
        (Some(text), None) => Password::from_text(text).map_err(usage),
        (None, Some(hex)) => Password::from_hex(hex).map_err(usage),
        _ => Err(Failure::Usage("a key is required: pass --key or --key-hex".into())),
    }
}

fn resolve_rule(text: &str) -> Result<Rule, Failure> {
    catalog().resolve(text).map_err(|e| Failure::Usage(format!("rule {text:?}: {e}")))
}

fn cipher_params(g: &GeneratorArgs) -> Result<CipherParams, Failure> {
    let params = CipherParams {
        rule: resolve_rule(&g.rule)?,
        rows: g.size.0,
        cols: g.size.1,
        rho: g.rho,
        mu: g.mu,
        alpha: g.alpha,
        ..CipherParams::default()
    };
    params.validate().map_err(usage)?;
    Ok(params)
}

pub fn encrypt(a: &EncryptArgs) -> Result<(), Failure> {
    let key = password(&a.key)?;
    let params = cipher_params(&a.generator)?;
    let plaintext = read_input(&a.input)?;
    let envelope = seal(&plaintext, &key, &params).map_err(data)?;
    output::write_bytes(&a.output, &envelope.to_bytes())?;
    Ok(())
}

pub fn decrypt(a: &DecryptArgs) -> Result<(), Failure> {
    let key = password(&a.key)?;
    let bytes = read_input(&a.input)?;
    let envelope = CiphertextEnvelope::from_bytes(&bytes).map_err(|e| Failure::Data(format!("{}: {e}", a.input.display())))?;
    let plaintext = open(&envelope, &key).map_err(data)?;
    output::write_bytes(&a.output, &plaintext)?;
    Ok(())
}

pub fn keystream(a: &KeystreamArgs) -> Result<(), Failure> {
    let key = password(&a.key)?;
    let params = cipher_params(&a.generator)?;
    let mut stream = params.keystream(&key).map_err(data)?;
    if let Some(path) = &a.dump_seed {
        output::write_bytes(path, stream.grid().to_text().as_bytes())?;
    }
    output::write_to(a.output.as_deref(), |mut w| stream.write_to(a.bytes, &mut w))?;
    Ok(())
}

pub fn rank(a: &RankArgs) -> Result<(), Failure> {
    let rules: Vec<Rule> = if a.rules.is_empty() {
        catalog().entries().to_vec()
    } else {
        a.rules.iter().map(|r| resolve_rule(r.trim())).collect::<Result<_, _>>()?
    };
    if let Some(r) = rules.iter().find(|r| r.births_on_zero()) {
        return Err(Failure::Usage(format!("rule {r} has birth on zero neighbors")));
    }
    if a.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    if a.entropy_horizon == 0 || a.lyapunov_horizon == 0 || a.hamming_horizon == 0 {
        return Err(usage("horizons must be at least 1"));
    }
    if !(0.0..=1.0).contains(&a.density) {
        return Err(usage("--density must lie in [0, 1]"));
    }
    if let Some((r, c)) = a.site {
        if r >= a.size.0 || c >= a.size.1 {
            return Err(Failure::Usage(format!("site {r},{c} lies outside the grid")));
        }
    }
    let config = RankConfig {
        rows: a.size.0,
        cols: a.size.1,
        horizons: Horizons { entropy: a.entropy_horizon, lyapunov: a.lyapunov_horizon, hamming: a.hamming_horizon },
        trials: a.trials,
        trial_seed: a.trial_seed,
        seed_density: a.density,
        lyapunov_site: a.site,
    };
    let reports = rank_rules(&rules, &config).map_err(data)?;
    output::write_to(a.output.as_deref(), |w| {
        writeln!(w, "{}", ChaosReport::csv_header())?;
        for r in &reports {
            writeln!(w, "{}", r.csv_row())?;
        }
        Ok::<_, io::Error>(())
    })?;
    Ok(())
}

pub fn enttest(a: &EnttestArgs) -> Result<(), Failure> {
    let mut acc = EntAccumulator::new();
    match &a.input {
        Some(path) => acc.update(&read_input(path)?),
        None => {
            let key = password(&a.key)?;
            let params = cipher_params(&a.generator)?;
            let mut stream = params.keystream(&key).map_err(data)?;
            let mut buf = vec![0u8; 1 << 20];
            let mut left = a.bytes;
            while left > 0 {
                let n = left.min(buf.len() as u64) as usize;
                stream.fill(&mut buf[..n]);
                acc.update(&buf[..n]);
                left -= n as u64;
            }
        }
    }
    let report = acc.finish().map_err(data)?;
    if let Some(path) = &a.csv {
        output::write_bytes(path, format!("{}\n{}\n", EntReport::csv_header(), report.csv_row()).as_bytes())?;
    }
    println!("{report}");
    Ok(())
}

pub fn analyze(a: &AnalyzeArgs) -> Result<(), Failure> {
    if a.histogram.is_none() && a.spectrum.is_none() && !a.flatness && !a.peak_ratio {
        return Err(usage("nothing to do: pass --histogram, --spectrum, --flatness or --peak-ratio"));
    }
    let image = imaging::load_pgm(&read_input(&a.input)?).map_err(|e| Failure::Data(format!("{}: {e}", a.input.display())))?;
    let counts = imaging::histogram(&image);
    if let Some(path) = &a.histogram {
        output::write_atomic(path, |w| {
            writeln!(w, "value,count")?;
            for (v, c) in counts.iter().enumerate() {
                writeln!(w, "{v},{c}")?;
            }
            Ok::<_, io::Error>(())
        })?;
    }
    if a.peak_ratio {
        println!("peak_ratio {:.6}", imaging::histogram_peak_ratio(&counts));
    }
    if a.spectrum.is_some() || a.flatness {
        let fitted = transform_ready(&image, a.fit);
        let spectrum = imaging::power_spectrum(&fitted).map_err(data)?;
        if let Some(path) = &a.spectrum {
            output::write_bytes(path, &imaging::save_pgm(&spectrum.to_image()))?;
        }
        if a.flatness {
            let flat = imaging::spectrum_flatness(&spectrum);
            if flat.degenerate {
                eprintln!("warning: spectrum has zero-power bins; flatness is degenerate");
            }
            println!("flatness {:.6}", flat.value);
        }
    }
    Ok(())
}

fn transform_ready(image: &GrayImage, mode: FitMode) -> GrayImage {
    if image.width().is_power_of_two() && image.height().is_power_of_two() {
        return image.clone();
    }
    let fit = match mode {
        FitMode::Pad => Fit::Pad,
        FitMode::Crop => Fit::Crop,
    };
    eprintln!("note: resizing {}x{} image to powers of two ({fit:?})", image.width(), image.height());
    imaging::fit_pow2(image, fit)
}

pub fn list_catalog() -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    for rule in catalog().entries() {
        writeln!(out, "{}\t{}", rule.name().unwrap_or(""), rule.notation())?;
    }
    Ok(())
}
