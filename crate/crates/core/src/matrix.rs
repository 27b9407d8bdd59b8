//! Preference matrices and the CSV matrix format.
//!
//! A matrix stores `mu[i][j]`, the probability that arm `i` wins a duel
//! against arm `j`. Only the entries with `i > j` are stored; the rest are
//! derived (`mu[j][i] = 1 - mu[i][j]`, `mu[i][i] = 1/2`), so the symmetry
//! identity holds exactly by construction.
//!
//! Arms are 0-based in the API and 1-based in every serialized form.

use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Accepted residual `|mu_ij + mu_ji - 1|` (and `|mu_ii - 1/2|`) when loading.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

/// An unordered pair of arms, normalized so that `hi >= lo`.
///
/// `hi == lo` is a self-pair: drawing it duels an arm against itself, which
/// yields no information and is only ever used for exploitation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pair {
    pub hi: usize,
    pub lo: usize,
}

impl Pair {
    pub fn new(a: usize, b: usize) -> Self {
        if a >= b {
            Pair { hi: a, lo: b }
        } else {
            Pair { hi: b, lo: a }
        }
    }

    pub fn is_self(&self) -> bool {
        self.hi == self.lo
    }

    /// Position of a distinct pair in the packed `K(K-1)/2` layout.
    ///
    /// Panics on a self-pair.
    pub fn index(&self) -> usize {
        assert!(self.hi > self.lo, "self-pair has no packed index");
        self.hi * (self.hi - 1) / 2 + self.lo
    }

    pub fn from_index(idx: usize) -> Self {
        // largest hi with hi(hi-1)/2 <= idx
        let mut hi = ((1.0 + (1.0 + 8.0 * idx as f64).sqrt()) / 2.0) as usize;
        while hi * (hi - 1) / 2 > idx {
            hi -= 1;
        }
        while (hi + 1) * hi / 2 <= idx {
            hi += 1;
        }
        Pair {
            hi,
            lo: idx - hi * (hi - 1) / 2,
        }
    }
}

impl fmt::Display for Pair {
    /// 1-based `"i-j"` form used in JSON keys.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.hi + 1, self.lo + 1)
    }
}

/// Number of distinct unordered pairs among `k` arms.
pub fn pair_count(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

/// All distinct pairs in packed-index order.
pub fn distinct_pairs(k: usize) -> impl Iterator<Item = Pair> {
    (0..pair_count(k)).map(Pair::from_index)
}

/// Whether exact 1/2 entries off the diagonal are accepted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TieMode {
    /// Every off-diagonal entry must differ from 1/2.
    #[default]
    Strict,
    /// Exact ties are kept; tied pairs count as neither win nor loss.
    Tolerant,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreferenceMatrix {
    k: usize,
    /// `mu[i][j]` for `i > j`, packed by [`Pair::index`].
    lower: Vec<f64>,
}

impl PreferenceMatrix {
    /// Builds a matrix from its packed `i > j` entries.
    pub fn from_lower(k: usize, lower: Vec<f64>, ties: TieMode) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidMatrix("matrix has no arms".into()));
        }
        if lower.len() != pair_count(k) {
            return Err(Error::InvalidMatrix(format!(
                "expected {} packed entries for K = {k}, got {}",
                pair_count(k),
                lower.len()
            )));
        }
        let m = PreferenceMatrix { k, lower };
        for p in distinct_pairs(k) {
            let v = m.lower[p.index()];
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidMatrix(format!(
                    "entry ({},{}) = {v} outside [0, 1]",
                    p.hi + 1,
                    p.lo + 1
                )));
            }
        }
        if ties == TieMode::Strict {
            if let Some(p) = m.tied_pairs().next() {
                return Err(Error::TiedPreference {
                    i: p.hi + 1,
                    j: p.lo + 1,
                });
            }
        }
        Ok(m)
    }

    /// Builds a matrix from a full row-major table, checking symmetry.
    pub fn from_rows(rows: &[Vec<f64>], ties: TieMode) -> Result<Self> {
        let k = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::InvalidMatrix(format!(
                    "row {} has {} entries, expected {k}",
                    i + 1,
                    row.len()
                )));
            }
        }
        for i in 0..k {
            if (rows[i][i] - 0.5).abs() > SYMMETRY_TOLERANCE {
                return Err(Error::InvalidMatrix(format!(
                    "diagonal entry ({0},{0}) = {1} is not 1/2",
                    i + 1,
                    rows[i][i]
                )));
            }
            for j in 0..i {
                let residual = (rows[i][j] + rows[j][i] - 1.0).abs();
                if !(residual <= SYMMETRY_TOLERANCE) {
                    return Err(Error::Asymmetric {
                        i: i + 1,
                        j: j + 1,
                        residual,
                    });
                }
            }
        }
        let lower = distinct_pairs(k).map(|p| rows[p.hi][p.lo]).collect();
        Self::from_lower(k, lower, ties)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `mu[i][j]`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => 0.5,
            Greater => self.lower[Pair { hi: i, lo: j }.index()],
            Less => 1.0 - self.lower[Pair { hi: j, lo: i }.index()],
        }
    }

    /// Packed `i > j` entries.
    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.k)
            .map(|i| (0..self.k).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Distinct pairs whose preference is exactly 1/2.
    pub fn tied_pairs(&self) -> impl Iterator<Item = Pair> + '_ {
        distinct_pairs(self.k).filter(|p| self.lower[p.index()] == 0.5)
    }

    pub fn has_ties(&self) -> bool {
        self.tied_pairs().next().is_some()
    }

    /// Errors with [`Error::TiedPreference`] on the first exact tie.
    pub fn require_strict(&self) -> Result<()> {
        match self.tied_pairs().next() {
            Some(p) => Err(Error::TiedPreference {
                i: p.hi + 1,
                j: p.lo + 1,
            }),
            None => Ok(()),
        }
    }

    /// `Delta = min_{i != j} |mu_ij - 1/2|`; infinite for a single arm.
    pub fn min_gap(&self) -> f64 {
        self.lower
            .iter()
            .map(|v| (v - 0.5).abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// The submatrix on `arms` (in the given order).
    pub fn select(&self, arms: &[usize]) -> Result<Self> {
        let k = arms.len();
        let lower = distinct_pairs(k)
            .map(|p| self.get(arms[p.hi], arms[p.lo]))
            .collect();
        Self::from_lower(k, lower, TieMode::Tolerant)
    }

    /// Reads the CSV matrix format: `K` lines of `K` comma-separated decimals,
    /// row `i` column `j` holding `mu_ij`. Blank lines and lines starting with
    /// `#` are ignored.
    pub fn read_csv<R: BufRead>(reader: R, ties: TieMode) -> Result<Self> {
        let mut rows = Vec::new();
        for (n, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let row = trimmed
                .split(',')
                .map(|field| {
                    field.trim().parse::<f64>().map_err(|e| Error::Parse {
                        line: n + 1,
                        reason: format!("`{}`: {e}", field.trim()),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Parse {
                line: 0,
                reason: "no matrix rows".into(),
            });
        }
        Self::from_rows(&rows, ties)
    }

    pub fn parse_csv(text: &str, ties: TieMode) -> Result<Self> {
        Self::read_csv(text.as_bytes(), ties)
    }

    /// Writes the CSV matrix format. Stored entries are written with
    /// shortest round-trip formatting, so reading back is lossless.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for i in 0..self.k {
            let line = (0..self.k)
                .map(|j| format!("{}", self.get(i, j)))
                .collect::<Vec<_>>()
                .join(",");
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv is ascii")
    }
}
