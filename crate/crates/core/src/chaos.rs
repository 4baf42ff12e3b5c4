//! Chaos measures for a rule: density entropy, damage-spreading Lyapunov
//! exponent, per-step Hamming distance, and their product used for ranking.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::grid::{Grid, GridError, Stepper};
use crate::rule::Rule;

/// Binary entropy (base 2) of the alive density.
pub fn state_entropy(grid: &Grid) -> f64 {
    binary_entropy(grid.population().density)
}

pub fn binary_entropy(p: f64) -> f64 {
    let term = |q: f64| if q <= 0.0 || q >= 1.0 { 0.0 } else { -q * q.log2() };
    term(p) + term(1.0 - p)
}

/// Mean entropy over generations `1..=iterations`.
pub fn avg_entropy(seed: &Grid, rule: &Rule, iterations: u64) -> Result<f64, GridError> {
    assert!(iterations >= 1, "need at least one iteration");
    let mut stepper = Stepper::new(rule)?;
    let mut grid = seed.clone();
    let mut sum = 0.0;
    for _ in 0..iterations {
        stepper.advance(&mut grid);
        sum += state_entropy(&grid);
    }
    Ok(sum / iterations as f64)
}

/// Mean fraction of cells that change between generation `t` and `t + 1`,
/// over `t = 0..iterations`.
pub fn avg_hamming(seed: &Grid, rule: &Rule, iterations: u64) -> Result<f64, GridError> {
    assert!(iterations >= 1, "need at least one iteration");
    let mut stepper = Stepper::new(rule)?;
    let mut grid = seed.clone();
    let mut changed = 0u64;
    for _ in 0..iterations {
        let prev = grid.clone();
        stepper.advance(&mut grid);
        changed += grid.distance(&prev)? as u64;
    }
    Ok(changed as f64 / (iterations as f64 * grid.len() as f64))
}

/// `ln(damage at T) / T` for a single flipped cell; negative infinity once the
/// damage has died out.
pub fn lyapunov_exponent(seed: &Grid, rule: &Rule, horizon: u64, cell: (usize, usize)) -> Result<f64, GridError> {
    assert!(horizon >= 1, "horizon must be positive");
    let mut perturbed = seed.clone();
    perturbed.toggle(cell.0, cell.1)?;
    let mut stepper = Stepper::new(rule)?;
    let mut a = seed.clone();
    let mut b = perturbed;
    for _ in 0..horizon {
        stepper.advance(&mut a);
        stepper.advance(&mut b);
    }
    let damage = a.distance(&b)?;
    Ok(if damage == 0 { f64::NEG_INFINITY } else { (damage as f64).ln() / horizon as f64 })
}

/// Product of the three measures; a dead perturbation ranks last.
pub fn max_score(lyapunov: f64, entropy: f64, hamming: f64) -> f64 {
    if lyapunov == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    lyapunov * entropy * hamming
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Horizons {
    pub entropy: u64,
    pub lyapunov: u64,
    pub hamming: u64,
}

impl Default for Horizons {
    fn default() -> Self {
        Horizons { entropy: 10_000, lyapunov: 200, hamming: 1000 }
    }
}

#[derive(Debug, Clone)]
pub struct ChaosReport {
    pub rule: Rule,
    pub entropy: f64,
    pub lyapunov: f64,
    pub hamming: f64,
    pub max_score: f64,
    pub horizons: Horizons,
    pub trials: u32,
}

impl ChaosReport {
    /// `rule,name,entropy,lyapunov,hamming,max`
    pub fn csv_header() -> &'static str {
        "rule,name,entropy,lyapunov,hamming,max"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.6},{},{:.6},{}",
            self.rule,
            self.rule.name().unwrap_or(""),
            self.entropy,
            fmt_sentinel(self.lyapunov),
            self.hamming,
            fmt_sentinel(self.max_score)
        )
    }
}

fn fmt_sentinel(v: f64) -> String {
    if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v:.6}")
    }
}

#[derive(Debug, Clone)]
pub struct RankConfig {
    pub rows: usize,
    pub cols: usize,
    pub horizons: Horizons,
    pub trials: u32,
    pub trial_seed: u64,
    /// Alive probability of the random seed grids.
    pub seed_density: f64,
    /// Perturbed cell for the Lyapunov exponent; the grid center when unset.
    pub lyapunov_site: Option<(usize, usize)>,
}

impl Default for RankConfig {
    fn default() -> Self {
        RankConfig {
            rows: 128,
            cols: 128,
            horizons: Horizons::default(),
            trials: 5,
            trial_seed: 0,
            seed_density: 0.5,
            lyapunov_site: None,
        }
    }
}

/// Random seed grid for one trial; identical for every rule.
pub fn trial_grid(config: &RankConfig, trial: u32) -> Grid {
    let mut rng = ChaCha8Rng::seed_from_u64(config.trial_seed);
    rng.set_stream(u64::from(trial));
    Grid::from_fn(config.rows, config.cols, |_, _| rng.gen_bool(config.seed_density)).expect("positive dimensions")
}

struct TrialMetrics {
    entropy: f64,
    lyapunov: f64,
    hamming: f64,
}

fn run_trial(seed: &Grid, rule: &Rule, h: &Horizons, site: (usize, usize)) -> Result<TrialMetrics, GridError> {
    // One pass covers the entropy and Hamming windows.
    let mut stepper = Stepper::new(rule)?;
    let mut grid = seed.clone();
    let (mut entropy_sum, mut changed) = (0.0, 0u64);
    for t in 0..h.entropy.max(h.hamming) {
        let prev = (t < h.hamming).then(|| grid.clone());
        stepper.advance(&mut grid);
        if let Some(prev) = prev {
            changed += grid.distance(&prev)? as u64;
        }
        if t < h.entropy {
            entropy_sum += state_entropy(&grid);
        }
    }
    Ok(TrialMetrics {
        entropy: entropy_sum / h.entropy as f64,
        lyapunov: lyapunov_exponent(seed, rule, h.lyapunov, site)?,
        hamming: changed as f64 / (h.hamming as f64 * seed.len() as f64),
    })
}

/// Evaluates every rule over `trials` random seeds and sorts by descending
/// score. Ties break on rule notation, so the order does not depend on the
/// input order.
pub fn rank_rules(rules: &[Rule], config: &RankConfig) -> Result<Vec<ChaosReport>, GridError> {
    assert!(config.trials >= 1, "need at least one trial");
    let h = config.horizons;
    assert!(h.entropy >= 1 && h.lyapunov >= 1 && h.hamming >= 1, "horizons must be positive");
    let site = config.lyapunov_site.unwrap_or((config.rows / 2, config.cols / 2));
    if site.0 >= config.rows || site.1 >= config.cols {
        return Err(GridError::OutOfBounds(site.0, site.1));
    }
    let seeds: Vec<Grid> = (0..config.trials).map(|t| trial_grid(config, t)).collect();

    let jobs: Vec<(usize, usize)> = (0..rules.len()).flat_map(|r| (0..seeds.len()).map(move |t| (r, t))).collect();
    let results: Vec<TrialMetrics> = jobs
        .par_iter()
        .map(|&(r, t)| run_trial(&seeds[t], &rules[r], &h, site))
        .collect::<Result<_, _>>()?;

    let n = f64::from(config.trials);
    let mut reports: Vec<ChaosReport> = rules
        .iter()
        .enumerate()
        .map(|(r, rule)| {
            let trials = &results[r * seeds.len()..(r + 1) * seeds.len()];
            let entropy = trials.iter().map(|m| m.entropy).sum::<f64>() / n;
            let lyapunov = trials.iter().map(|m| m.lyapunov).sum::<f64>() / n;
            let hamming = trials.iter().map(|m| m.hamming).sum::<f64>() / n;
            ChaosReport {
                rule: rule.clone(),
                entropy,
                lyapunov,
                hamming,
                max_score: max_score(lyapunov, entropy, hamming),
                horizons: h,
                trials: config.trials,
            }
        })
        .collect();
    reports.sort_by(|a, b| {
        b.max_score
            .partial_cmp(&a.max_score)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.rule.to_string().cmp(&b.rule.to_string()))
    });
    Ok(reports)
}
