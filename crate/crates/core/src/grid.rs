//! Binary two-dimensional automaton on a torus.
//!
//! Rows are bit-packed into `u64` words, least significant bit = column 0.
//! Unused high bits of the last word in each row are always zero.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::rule::Rule;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("grid dimensions must be positive, got {rows}x{cols}")]
    EmptyDimensions { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("rule {0} births on zero neighbors; the dead background would not stay quiescent")]
    BirthOnZero(String),
    #[error("cell ({0}, {1}) outside grid")]
    OutOfBounds(usize, usize),
    #[error("bad grid text: {0}")]
    Format(String),
}

/// Alive-cell count and density of a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationStats {
    pub alive_count: usize,
    pub density: f64,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Grid {
    rows: usize,
    cols: usize,
    generation: u64,
    words_per_row: usize,
    words: Vec<u64>,
}

impl Grid {
    /// All-dead grid at generation 0.
    pub fn new(rows: usize, cols: usize) -> Result<Grid, GridError> {
        if rows == 0 || cols == 0 {
            return Err(GridError::EmptyDimensions { rows, cols });
        }
        let words_per_row = cols.div_ceil(64);
        Ok(Grid {
            rows,
            cols,
            generation: 0,
            words_per_row,
            words: vec![0; rows * words_per_row],
        })
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut alive: impl FnMut(usize, usize) -> bool,
    ) -> Result<Grid, GridError> {
        let mut grid = Grid::new(rows, cols)?;
        for i in 0..rows {
            for j in 0..cols {
                if alive(i, j) {
                    grid.set(i, j, true);
                }
            }
        }
        Ok(grid)
    }

    pub fn full(rows: usize, cols: usize) -> Result<Grid, GridError> {
        Grid::from_fn(rows, cols, |_, _| true)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn with_generation(mut self, generation: u64) -> Grid {
        self.generation = generation;
        self
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        assert!(row < self.rows && col < self.cols, "cell ({row}, {col}) outside grid");
        let word = self.words[row * self.words_per_row + col / 64];
        (word >> (col % 64)) & 1 == 1
    }

    pub fn set(&mut self, row: usize, col: usize, alive: bool) {
        assert!(row < self.rows && col < self.cols, "cell ({row}, {col}) outside grid");
        let word = &mut self.words[row * self.words_per_row + col / 64];
        let bit = 1u64 << (col % 64);
        if alive {
            *word |= bit;
        } else {
            *word &= !bit;
        }
    }

    pub fn toggle(&mut self, row: usize, col: usize) -> Result<(), GridError> {
        if row >= self.rows || col >= self.cols {
            return Err(GridError::OutOfBounds(row, col));
        }
        let alive = self.get(row, col);
        self.set(row, col, !alive);
        Ok(())
    }

    /// Packed words of one row.
    pub fn row_words(&self, row: usize) -> &[u64] {
        let start = row * self.words_per_row;
        &self.words[start..start + self.words_per_row]
    }

    pub fn words_per_row(&self) -> usize {
        self.words_per_row
    }

    pub fn population(&self) -> PopulationStats {
        let alive_count = self.words.iter().map(|w| w.count_ones() as usize).sum();
        PopulationStats {
            alive_count,
            density: alive_count as f64 / self.len() as f64,
        }
    }

    /// Number of cells that differ between two same-sized grids.
    pub fn distance(&self, other: &Grid) -> Result<usize, GridError> {
        self.check_same_shape(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    /// Cellwise exclusive-or. The generation is taken from `self`.
    pub fn xor(&self, other: &Grid) -> Result<Grid, GridError> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(out)
    }

    /// Cyclic shift: the cell at `(i, j)` moves to `(i + down, j + right)`.
    pub fn translate(&self, down: usize, right: usize) -> Grid {
        let mut out = Grid::new(self.rows, self.cols).expect("non-empty").with_generation(self.generation);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    out.set((i + down) % self.rows, (j + right) % self.cols, true);
                }
            }
        }
        out
    }

    fn check_same_shape(&self, other: &Grid) -> Result<(), GridError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(GridError::DimensionMismatch(self.rows, self.cols, other.rows, other.cols));
        }
        Ok(())
    }

    fn tail_mask(&self) -> u64 {
        match self.cols % 64 {
            0 => u64::MAX,
            r => (1u64 << r) - 1,
        }
    }

    /// One generation under `rule`, leaving `self` untouched.
    pub fn step(&self, rule: &Rule) -> Result<Grid, GridError> {
        let mut stepper = Stepper::new(rule)?;
        let mut next = self.clone();
        stepper.advance(&mut next);
        Ok(next)
    }

    /// `steps` generations under `rule`.
    pub fn evolve(&self, rule: &Rule, steps: u64) -> Result<Grid, GridError> {
        let mut stepper = Stepper::new(rule)?;
        let mut grid = self.clone();
        for _ in 0..steps {
            stepper.advance(&mut grid);
        }
        Ok(grid)
    }

    /// Parses the `m n t` header followed by `m` lines of `0`/`1`.
    pub fn from_text(text: &str) -> Result<Grid, GridError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| GridError::Format("missing header".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let [m, n, t] = fields[..] else {
            return Err(GridError::Format(format!("header {header:?} is not \"m n t\"")));
        };
        let parse = |s: &str| s.parse::<u64>().map_err(|e| GridError::Format(format!("{s:?}: {e}")));
        let (m, n, t) = (parse(m)? as usize, parse(n)? as usize, parse(t)?);
        let mut grid = Grid::new(m, n)?.with_generation(t);
        for i in 0..m {
            let line = lines
                .next()
                .ok_or_else(|| GridError::Format(format!("expected {m} rows, got {i}")))?
                .trim();
            if line.len() != n {
                return Err(GridError::Format(format!("row {i} has {} cells, expected {n}", line.len())));
            }
            for (j, c) in line.bytes().enumerate() {
                match c {
                    b'0' => {}
                    b'1' => grid.set(i, j, true),
                    other => {
                        return Err(GridError::Format(format!("unexpected {:?} in row {i}", other as char)))
                    }
                }
            }
        }
        if lines.next().is_some() {
            return Err(GridError::Format("trailing rows".into()));
        }
        Ok(grid)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.rows, self.cols, self.generation);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.push(if self.get(i, j) { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Grid(\n{})", self.to_text())
    }
}

impl FromStr for Grid {
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Grid::from_text(s)
    }
}

/// Reusable update kernel for one rule.
///
/// Neighbor counts are accumulated bit-sliced: each packed word holds 64 cells
/// and the eight Moore neighbors are summed with a carry-save adder tree into
/// four count planes.
#[derive(Debug, Clone)]
pub struct Stepper {
    birth: u16,
    survival: u16,
    west: Vec<u64>,
    east: Vec<u64>,
    out: Vec<u64>,
}

impl Stepper {
    pub fn new(rule: &Rule) -> Result<Stepper, GridError> {
        if rule.births_on_zero() {
            return Err(GridError::BirthOnZero(rule.to_string()));
        }
        Ok(Stepper {
            birth: rule.birth().bits(),
            survival: rule.survival().bits(),
            west: Vec::new(),
            east: Vec::new(),
            out: Vec::new(),
        })
    }

    /// Replaces `grid` with its successor and bumps the generation.
    pub fn advance(&mut self, grid: &mut Grid) {
        let (rows, wpr) = (grid.rows, grid.words_per_row);
        let tail = grid.tail_mask();
        let total = grid.words.len();
        self.west.resize(total, 0);
        self.east.resize(total, 0);
        self.out.resize(total, 0);

        for r in 0..rows {
            let row = &grid.words[r * wpr..(r + 1) * wpr];
            rotate_west(row, grid.cols, tail, &mut self.west[r * wpr..(r + 1) * wpr]);
            rotate_east(row, grid.cols, &mut self.east[r * wpr..(r + 1) * wpr]);
        }

        for r in 0..rows {
            let up = (r + rows - 1) % rows * wpr;
            let down = (r + 1) % rows * wpr;
            let cur = r * wpr;
            for w in 0..wpr {
                let center = grid.words[cur + w];
                let (c0, c1, c2, c3) = count_planes([
                    self.west[up + w],
                    grid.words[up + w],
                    self.east[up + w],
                    self.west[cur + w],
                    self.east[cur + w],
                    self.west[down + w],
                    grid.words[down + w],
                    self.east[down + w],
                ]);
                let born = select_counts(self.birth, c0, c1, c2, c3);
                let kept = select_counts(self.survival, c0, c1, c2, c3);
                let mut next = (!center & born) | (center & kept);
                if w + 1 == wpr {
                    next &= tail;
                }
                self.out[cur + w] = next;
            }
        }
        std::mem::swap(&mut grid.words, &mut self.out);
        grid.generation += 1;
    }
}

/// Bit `j` of the result holds cell `j - 1` (mod cols).
fn rotate_west(row: &[u64], cols: usize, tail: u64, out: &mut [u64]) {
    let mut carry = 0u64;
    for (o, &w) in out.iter_mut().zip(row) {
        *o = (w << 1) | carry;
        carry = w >> 63;
    }
    let last = out.len() - 1;
    out[last] &= tail;
    let wrap = (row[(cols - 1) / 64] >> ((cols - 1) % 64)) & 1;
    out[0] |= wrap;
}

/// Bit `j` of the result holds cell `j + 1` (mod cols).
fn rotate_east(row: &[u64], cols: usize, out: &mut [u64]) {
    let n = row.len();
    for i in 0..n {
        let hi = if i + 1 < n { row[i + 1] << 63 } else { 0 };
        out[i] = (row[i] >> 1) | hi;
    }
    let wrap = row[0] & 1;
    out[(cols - 1) / 64] |= wrap << ((cols - 1) % 64);
}

#[inline(always)]
fn full_add(a: u64, b: u64, c: u64) -> (u64, u64) {
    let t = a ^ b;
    (t ^ c, (a & b) | (t & c))
}

/// Sums eight one-bit inputs per lane into a 4-bit count (c0 least significant).
#[inline(always)]
fn count_planes(i: [u64; 8]) -> (u64, u64, u64, u64) {
    let (s_a, k_a) = full_add(i[0], i[1], i[2]);
    let (s_b, k_b) = full_add(i[3], i[4], i[5]);
    let (s_c, k_c) = (i[6] ^ i[7], i[6] & i[7]);
    let (c0, k_d) = full_add(s_a, s_b, s_c);
    let (t0, t1) = full_add(k_a, k_b, k_c);
    let (c1, k_e) = (t0 ^ k_d, t0 & k_d);
    (c0, c1, t1 ^ k_e, t1 & k_e)
}

/// Lanes whose count is a member of `set`.
#[inline(always)]
fn select_counts(set: u16, c0: u64, c1: u64, c2: u64, c3: u64) -> u64 {
    let mut hit = 0u64;
    for k in 0..=8u16 {
        if set & (1 << k) != 0 {
            let m0 = if k & 1 != 0 { c0 } else { !c0 };
            let m1 = if k & 2 != 0 { c1 } else { !c1 };
            let m2 = if k & 4 != 0 { c2 } else { !c2 };
            let m3 = if k & 8 != 0 { c3 } else { !c3 };
            hit |= m0 & m1 & m2 & m3;
        }
    }
    hit
}
