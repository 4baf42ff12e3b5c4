//! Password to initial grid through the logistic map.
//!
//! The password is read as a 128-bit little-endian integer and scaled into
//! `[0, 0.5)`. The transient iterations run in 256-bit fixed point so that every
//! password bit reaches the orbit; a binary64 value carries the orbit from the
//! end of the transient onward, one value per cell in row-major order.

use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

use crate::grid::{Grid, GridError};

pub const PASSWORD_LEN: usize = 16;
pub const DEFAULT_MU: f64 = 4.0;
pub const DEFAULT_ALPHA: u32 = 1000;
pub const DEFAULT_EPSILON: f64 = 1.0 / 9_007_199_254_740_992.0; // 2^-53

const MU_MIN: f64 = 3.9;
const MU_MAX: f64 = 4.0;
const EPSILON_MAX: f64 = 1.0 / 1_099_511_627_776.0; // 2^-40

/// Fractional bits of the transient's fixed-point representation.
const FIXED_BITS: u64 = 256;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeedError {
    #[error("password must be exactly {PASSWORD_LEN} bytes, got {0}")]
    PasswordLength(usize),
    #[error("text key is {0} bytes; at most {PASSWORD_LEN} are allowed")]
    KeyTooLong(usize),
    #[error("hex key must be {} hex digits", PASSWORD_LEN * 2)]
    BadHex,
    #[error("mu = {0} outside [3.9, 4.0]")]
    MuOutOfRange(f64),
    #[error("epsilon = {0:e} outside (0, 2^-40)")]
    EpsilonOutOfRange(f64),
    #[error("logistic map input x = {0} outside [0, 1]")]
    OrbitDomain(f64),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// 128-bit key material.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Password([u8; PASSWORD_LEN]);

impl Password {
    pub fn new(bytes: [u8; PASSWORD_LEN]) -> Password {
        Password(bytes)
    }

    pub fn from_slice(bytes: &[u8]) -> Result<Password, SeedError> {
        let arr: [u8; PASSWORD_LEN] = bytes.try_into().map_err(|_| SeedError::PasswordLength(bytes.len()))?;
        Ok(Password(arr))
    }

    /// UTF-8 text, zero-padded to 16 bytes. Longer keys are rejected.
    pub fn from_text(text: &str) -> Result<Password, SeedError> {
        let raw = text.as_bytes();
        if raw.len() > PASSWORD_LEN {
            return Err(SeedError::KeyTooLong(raw.len()));
        }
        let mut bytes = [0u8; PASSWORD_LEN];
        bytes[..raw.len()].copy_from_slice(raw);
        Ok(Password(bytes))
    }

    /// Exactly 32 hex digits, first pair = first byte.
    pub fn from_hex(hex: &str) -> Result<Password, SeedError> {
        let hex = hex.trim();
        if hex.len() != PASSWORD_LEN * 2 || !hex.is_ascii() {
            return Err(SeedError::BadHex);
        }
        let mut bytes = [0u8; PASSWORD_LEN];
        for (i, b) in bytes.iter_mut().enumerate() {
            *b = u8::from_str_radix(&hex[2 * i..2 * i + 2], 16).map_err(|_| SeedError::BadHex)?;
        }
        Ok(Password(bytes))
    }

    pub fn bytes(&self) -> &[u8; PASSWORD_LEN] {
        &self.0
    }

    /// Copy with one bit flipped; bit 0 is the low bit of the first byte.
    pub fn flip_bit(&self, bit: usize) -> Password {
        let mut bytes = self.0;
        bytes[bit / 8] ^= 1 << (bit % 8);
        Password(bytes)
    }

    /// The password as an integer, first byte least significant.
    pub fn as_integer(&self) -> u128 {
        u128::from_le_bytes(self.0)
    }
}

impl fmt::Debug for Password {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Password(..)")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedConfig {
    password: Password,
    mu: f64,
    alpha: u32,
    epsilon: f64,
}

impl SeedConfig {
    pub fn new(password: Password, mu: f64, alpha: u32, epsilon: f64) -> Result<SeedConfig, SeedError> {
        if !(MU_MIN..=MU_MAX).contains(&mu) {
            return Err(SeedError::MuOutOfRange(mu));
        }
        if !(epsilon > 0.0 && epsilon < EPSILON_MAX) {
            return Err(SeedError::EpsilonOutOfRange(epsilon));
        }
        Ok(SeedConfig { password, mu, alpha, epsilon })
    }

    /// μ = 4, α = 1000, ε = 2^-53.
    pub fn with_defaults(password: Password) -> SeedConfig {
        SeedConfig { password, mu: DEFAULT_MU, alpha: DEFAULT_ALPHA, epsilon: DEFAULT_EPSILON }
    }

    pub fn password(&self) -> &Password {
        &self.password
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// One logistic-map step, `mu * x * (1 - x)`, evaluated as
/// `(mu * x) * (1 - x)` in binary64.
pub fn logistic_next(x: f64, mu: f64) -> Result<f64, SeedError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(SeedError::OrbitDomain(x));
    }
    if !(MU_MIN..=MU_MAX).contains(&mu) {
        return Err(SeedError::MuOutOfRange(mu));
    }
    Ok(logistic_raw(x, mu))
}

#[inline]
fn logistic_raw(x: f64, mu: f64) -> f64 {
    let t1 = 1.0 - x;
    let t2 = mu * x;
    t2 * t1
}

/// Password scaled by 2^-129, rounded to binary64.
pub fn password_to_omega(password: &Password) -> f64 {
    // u128 -> f64 rounds to nearest; the power-of-two scale is exact.
    password.as_integer() as f64 * 2f64.powi(-129)
}

/// Cell values drawn from one logistic orbit.
#[derive(Debug, Clone)]
pub struct LogisticOrbit {
    x: f64,
    step: u64,
    mu: f64,
    epsilon: f64,
}

impl LogisticOrbit {
    /// Orbit positioned at `X_alpha`, ready to yield `X_{alpha+1}`.
    pub fn after_transient(config: &SeedConfig) -> LogisticOrbit {
        let x = fixed_transient(config);
        LogisticOrbit { x, step: u64::from(config.alpha), mu: config.mu, epsilon: config.epsilon }
    }

    pub fn current(&self) -> f64 {
        self.x
    }

    pub fn index(&self) -> u64 {
        self.step
    }
}

impl Iterator for LogisticOrbit {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let mut x = logistic_raw(self.x, self.mu);
        if x <= 0.0 {
            x = self.epsilon;
        } else if x >= 1.0 {
            x = 1.0 - self.epsilon;
        }
        self.x = x;
        self.step += 1;
        Some(x)
    }
}

/// Runs `X_0 = Ω + ε` through the first `alpha` iterations exactly enough to
/// keep all 128 password bits, returning `X_alpha` as binary64.
fn fixed_transient(config: &SeedConfig) -> f64 {
    let one = BigUint::from(1u8) << FIXED_BITS;
    let eps = to_fixed(config.epsilon);
    let (mu_mant, mu_exp) = decompose(config.mu);
    let mu_mant = BigUint::from(mu_mant);
    // mu = mant * 2^exp with exp < 0
    let shift = FIXED_BITS + (-mu_exp) as u64;

    let omega = BigUint::from(config.password.as_integer()) << (FIXED_BITS - 129);
    let mut x = clamp_fixed(omega + &eps, &one, &eps);
    for _ in 0..config.alpha {
        let next = (&mu_mant * &x * (&one - &x)) >> shift;
        x = clamp_fixed(next, &one, &eps);
    }

    let top: u64 = (&x >> (FIXED_BITS - 64)).try_into().unwrap_or(u64::MAX);
    let xf = top as f64 * 2f64.powi(-64);
    if xf <= 0.0 {
        config.epsilon
    } else if xf >= 1.0 {
        1.0 - config.epsilon
    } else {
        xf
    }
}

fn clamp_fixed(x: BigUint, one: &BigUint, eps: &BigUint) -> BigUint {
    if x == BigUint::ZERO {
        eps.clone()
    } else if &x >= one {
        one - eps
    } else {
        x
    }
}

/// `v` as a fixed-point integer, truncated, at least one unit.
fn to_fixed(v: f64) -> BigUint {
    let (mant, exp) = decompose(v);
    let scaled = exp + FIXED_BITS as i32;
    let fixed = if scaled >= 0 {
        BigUint::from(mant) << scaled as u64
    } else {
        BigUint::from(mant) >> (-scaled) as u64
    };
    if fixed == BigUint::ZERO {
        BigUint::from(1u8)
    } else {
        fixed
    }
}

/// Positive finite `v` as `mant * 2^exp`.
fn decompose(v: f64) -> (u64, i32) {
    let bits = v.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    if biased == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), biased - 1075)
    }
}

/// Seed grid: cell `(i, j)` is alive when orbit value `X_{n*i + j + 1 + alpha}`
/// (zero-based `i`, `j`) is below one half.
/// Cell state for one orbit value: alive below one half.
pub fn binarize(x: f64) -> bool {
    x < 0.5
}

pub fn initial_grid(config: &SeedConfig, rows: usize, cols: usize) -> Result<Grid, SeedError> {
    let mut orbit = LogisticOrbit::after_transient(config);
    let grid = Grid::from_fn(rows, cols, |_, _| binarize(orbit.next().expect("infinite orbit")))?;
    Ok(grid)
}
