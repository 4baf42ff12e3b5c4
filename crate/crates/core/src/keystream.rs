//! Keystream bytes from successive automaton generations.
//!
//! Each generation after the seed is read column by column (row index varies
//! fastest), every eight bits are packed least-significant-bit first into a raw
//! byte, and each output byte is the XOR of `rho` consecutive raw bytes.

use std::io::{self, Write};

use thiserror::Error;

use crate::grid::{Grid, GridError, Stepper};
use crate::rule::Rule;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KeystreamError {
    #[error("rho must be at least 1")]
    ZeroRho,
    #[error("a {rows}x{cols} grid does not pack into whole bytes")]
    UnevenGrid { rows: usize, cols: usize },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Bits of one generation in keystream order: cell `(i, j)` lands at index
/// `i + j * rows`.
pub fn serialize_generation(grid: &Grid) -> Vec<bool> {
    let mut bits = Vec::with_capacity(grid.len());
    for j in 0..grid.cols() {
        for i in 0..grid.rows() {
            bits.push(grid.get(i, j));
        }
    }
    bits
}

/// Packs eight bits, the first one least significant.
pub fn pack_byte(bits: &[bool; 8]) -> u8 {
    bits.iter().enumerate().fold(0u8, |acc, (j, &b)| acc | (u8::from(b) << j))
}

/// XOR of one block of raw bytes.
pub fn compose_block(raw: &[u8]) -> u8 {
    raw.iter().fold(0, |acc, b| acc ^ b)
}

/// Raw bytes of one generation, equal to packing `serialize_generation`
/// eight bits at a time.
pub fn generation_bytes(grid: &Grid, out: &mut Vec<u8>) {
    out.clear();
    let rows = grid.rows();
    if rows.is_multiple_of(8) {
        // Eight consecutive rows of one column make one byte.
        let groups = rows / 8;
        out.resize(grid.len() / 8, 0);
        for q in 0..groups {
            let band: [&[u64]; 8] = std::array::from_fn(|r| grid.row_words(8 * q + r));
            for w in 0..grid.words_per_row() {
                let lanes = (grid.cols() - 64 * w).min(64);
                let words: [u64; 8] = std::array::from_fn(|r| band[r][w]);
                for c in 0..lanes {
                    let mut byte = 0u8;
                    for (r, word) in words.iter().enumerate() {
                        byte |= (((word >> c) & 1) as u8) << r;
                    }
                    out[(64 * w + c) * groups + q] = byte;
                }
            }
        }
    } else {
        let bits = serialize_generation(grid);
        out.extend(bits.chunks_exact(8).map(|c| pack_byte(c.try_into().expect("8 bits"))));
    }
}

/// Generator state: the automaton, the unread part of the current generation,
/// and the block size.
#[derive(Debug, Clone)]
pub struct Keystream {
    grid: Grid,
    stepper: Stepper,
    rule: Rule,
    rho: usize,
    raw: Vec<u8>,
    cursor: usize,
}

impl Keystream {
    /// Starts from the seed grid. The seed itself is never emitted.
    pub fn new(seed: Grid, rule: Rule, rho: usize) -> Result<Keystream, KeystreamError> {
        if rho == 0 {
            return Err(KeystreamError::ZeroRho);
        }
        if !seed.len().is_multiple_of(8) {
            return Err(KeystreamError::UnevenGrid { rows: seed.rows(), cols: seed.cols() });
        }
        let stepper = Stepper::new(&rule)?;
        Ok(Keystream { grid: seed, stepper, rule, rho, raw: Vec::new(), cursor: 0 })
    }

    pub fn rho(&self) -> usize {
        self.rho
    }

    pub fn rule(&self) -> &Rule {
        &self.rule
    }

    /// The most recently evolved generation (the seed before any output).
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    fn next_raw(&mut self) -> u8 {
        if self.cursor == self.raw.len() {
            self.stepper.advance(&mut self.grid);
            generation_bytes(&self.grid, &mut self.raw);
            self.cursor = 0;
        }
        let b = self.raw[self.cursor];
        self.cursor += 1;
        b
    }

    /// Fills `out` with the next `out.len()` keystream bytes.
    pub fn fill(&mut self, out: &mut [u8]) {
        for y in out.iter_mut() {
            let mut acc = 0u8;
            let mut need = self.rho;
            while need > 0 {
                if self.cursor == self.raw.len() {
                    acc ^= self.next_raw();
                    need -= 1;
                    continue;
                }
                let take = need.min(self.raw.len() - self.cursor);
                acc ^= compose_block(&self.raw[self.cursor..self.cursor + take]);
                self.cursor += take;
                need -= take;
            }
            *y = acc;
        }
    }

    pub fn next_bytes(&mut self, count: usize) -> Vec<u8> {
        let mut out = vec![0u8; count];
        self.fill(&mut out);
        out
    }

    /// Writes `count` keystream bytes to `sink` with no framing.
    pub fn write_to(&mut self, count: u64, sink: &mut impl Write) -> io::Result<()> {
        let mut buf = vec![0u8; 1 << 16];
        let mut left = count;
        while left > 0 {
            let n = left.min(buf.len() as u64) as usize;
            self.fill(&mut buf[..n]);
            sink.write_all(&buf[..n])?;
            left -= n as u64;
        }
        Ok(())
    }
}
