//! ENT-style statistics over a byte stream.
//!
//! Five measures: byte entropy, chi-square against the uniform distribution,
//! arithmetic mean, a Monte Carlo estimate of pi, and the lag-1 serial
//! correlation coefficient.

use std::f64::consts::PI;
use std::fmt;
use std::io::{self, Write};

use statrs::function::gamma::gamma_ur;
use thiserror::Error;

use crate::keystream::Keystream;

/// Bytes per Monte Carlo point: two 24-bit coordinates.
pub const MONTE_CARLO_BYTES: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EntError {
    #[error("stream has {0} bytes; at least {MONTE_CARLO_BYTES} are needed")]
    TooShort(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntReport {
    pub byte_count: u64,
    pub entropy_bits_per_byte: f64,
    pub chi_square: f64,
    /// Probability that a uniform source exceeds `chi_square` (255 dof).
    pub chi_square_pvalue: f64,
    pub arithmetic_mean: f64,
    pub monte_carlo_pi: f64,
    pub pi_error_percent: f64,
    pub serial_correlation: f64,
    /// Set when the serial correlation is undefined (zero variance); the
    /// coefficient is then reported as 1.0.
    pub scc_degenerate: bool,
}

/// Streaming accumulator; feed chunks then call `finish`.
#[derive(Debug, Clone)]
pub struct EntAccumulator {
    counts: [u64; 256],
    total: u64,
    // serial correlation: pairs (b_k, b_{k+1})
    prev: Option<u8>,
    sum_x: f64,
    sum_y: f64,
    sum_xx: f64,
    sum_yy: f64,
    sum_xy: f64,
    pairs: u64,
    // Monte Carlo
    point: [u8; MONTE_CARLO_BYTES],
    point_fill: usize,
    inside: u64,
    points: u64,
}

impl Default for EntAccumulator {
    fn default() -> Self {
        EntAccumulator {
            counts: [0; 256],
            total: 0,
            prev: None,
            sum_x: 0.0,
            sum_y: 0.0,
            sum_xx: 0.0,
            sum_yy: 0.0,
            sum_xy: 0.0,
            pairs: 0,
            point: [0; MONTE_CARLO_BYTES],
            point_fill: 0,
            inside: 0,
            points: 0,
        }
    }
}

impl EntAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn update(&mut self, bytes: &[u8]) {
        // Integer sums per chunk keep the floating-point sums exact for
        // chunks well below 2^35 bytes.
        let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0u64, 0u64, 0u64, 0u64, 0u64);
        let mut pairs = 0u64;
        for &b in bytes {
            self.counts[b as usize] += 1;
            if let Some(p) = self.prev {
                let (x, y) = (u64::from(p), u64::from(b));
                sx += x;
                sy += y;
                sxx += x * x;
                syy += y * y;
                sxy += x * y;
                pairs += 1;
            }
            self.prev = Some(b);

            self.point[self.point_fill] = b;
            self.point_fill += 1;
            if self.point_fill == MONTE_CARLO_BYTES {
                self.point_fill = 0;
                let x = u64::from(self.point[0]) << 16 | u64::from(self.point[1]) << 8 | u64::from(self.point[2]);
                let y = u64::from(self.point[3]) << 16 | u64::from(self.point[4]) << 8 | u64::from(self.point[5]);
                // (x / 2^24)^2 + (y / 2^24)^2 < 1, exactly
                if x * x + y * y < 1u64 << 48 {
                    self.inside += 1;
                }
                self.points += 1;
            }
        }
        self.total += bytes.len() as u64;
        self.sum_x += sx as f64;
        self.sum_y += sy as f64;
        self.sum_xx += sxx as f64;
        self.sum_yy += syy as f64;
        self.sum_xy += sxy as f64;
        self.pairs += pairs;
    }

    pub fn finish(&self) -> Result<EntReport, EntError> {
        if self.total < MONTE_CARLO_BYTES as u64 {
            return Err(EntError::TooShort(self.total as usize));
        }
        let n = self.total as f64;
        let expected = n / 256.0;
        let mut entropy = 0.0;
        let mut chi = 0.0;
        let mut sum = 0.0;
        for (v, &c) in self.counts.iter().enumerate() {
            if c > 0 {
                let q = c as f64 / n;
                entropy -= q * q.log2();
            }
            let d = c as f64 - expected;
            chi += d * d / expected;
            sum += v as f64 * c as f64;
        }
        let pvalue = if chi > 0.0 { gamma_ur(255.0 / 2.0, chi / 2.0) } else { 1.0 };

        let monte_carlo_pi = 4.0 * self.inside as f64 / self.points as f64;

        let k = self.pairs as f64;
        let cov = k * self.sum_xy - self.sum_x * self.sum_y;
        let var_x = k * self.sum_xx - self.sum_x * self.sum_x;
        let var_y = k * self.sum_yy - self.sum_y * self.sum_y;
        let (serial_correlation, scc_degenerate) = if var_x <= 0.0 || var_y <= 0.0 {
            (1.0, true)
        } else {
            ((cov / (var_x.sqrt() * var_y.sqrt())).clamp(-1.0, 1.0), false)
        };

        Ok(EntReport {
            byte_count: self.total,
            entropy_bits_per_byte: entropy,
            chi_square: chi,
            chi_square_pvalue: pvalue,
            arithmetic_mean: sum / n,
            monte_carlo_pi,
            pi_error_percent: 100.0 * (monte_carlo_pi - PI).abs() / PI,
            serial_correlation,
            scc_degenerate,
        })
    }
}

pub fn ent_battery(stream: &[u8]) -> Result<EntReport, EntError> {
    let mut acc = EntAccumulator::new();
    acc.update(stream);
    acc.finish()
}

/// Writes exactly `byte_count` raw keystream bytes, headerless, for external
/// test suites such as dieharder (`dieharder -g 201 -f FILE`).
pub fn export_raw(keystream: &mut Keystream, byte_count: u64, sink: &mut impl Write) -> io::Result<()> {
    keystream.write_to(byte_count, sink)?;
    sink.flush()
}

impl EntReport {
    pub fn csv_header() -> &'static str {
        "bytes,entropy,chi_square,chi_square_pvalue,mean,monte_carlo_pi,pi_error_percent,serial_correlation"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.6},{:.4},{:.6},{:.4},{:.9},{:.4},{:.6}",
            self.byte_count,
            self.entropy_bits_per_byte,
            self.chi_square,
            self.chi_square_pvalue,
            self.arithmetic_mean,
            self.monte_carlo_pi,
            self.pi_error_percent,
            self.serial_correlation
        )
    }
}

impl fmt::Display for EntReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<28}{}", "bytes", self.byte_count)?;
        writeln!(f, "{:<28}{:.6} bits/byte", "entropy", self.entropy_bits_per_byte)?;
        writeln!(
            f,
            "{:<28}{:.2} (p = {:.4})",
            "chi-square", self.chi_square, self.chi_square_pvalue
        )?;
        writeln!(f, "{:<28}{:.4}", "arithmetic mean", self.arithmetic_mean)?;
        writeln!(
            f,
            "{:<28}{:.9} (error {:.4}%)",
            "monte carlo pi", self.monte_carlo_pi, self.pi_error_percent
        )?;
        write!(f, "{:<28}{:.6}", "serial correlation", self.serial_correlation)?;
        if self.scc_degenerate {
            write!(f, " (undefined: zero variance)")?;
        }
        Ok(())
    }
}
