//! Built-in preference matrices and random submatrix sampling.

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::{distinct_pairs, PreferenceMatrix, TieMode};

/// Attempts made by [`sample_submatrix`] before giving up.
pub const SUBMATRIX_REJECTION_CAP: usize = 100_000;

/// Named matrices shipped with the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dataset {
    /// 4 arms, Condorcet winner 1, the other three in a rock-paper-scissors cycle.
    Cyclic,
    /// 5 arms with one near-tie (0.51) next to large gaps.
    Gap,
    /// 5 arms, three Copeland winners.
    MultiSol,
    /// 6 retrieval functions; contains an exact tie, so it only loads tie-tolerant.
    Arxiv,
    Mslr5Condorcet,
    Mslr5NonCondorcet,
    /// 16 sushi types, Condorcet winner 1.
    Sushi,
}

impl Dataset {
    pub const ALL: [Dataset; 7] = [
        Dataset::Cyclic,
        Dataset::Gap,
        Dataset::MultiSol,
        Dataset::Arxiv,
        Dataset::Mslr5Condorcet,
        Dataset::Mslr5NonCondorcet,
        Dataset::Sushi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Dataset::Cyclic => "cyclic",
            Dataset::Gap => "gap",
            Dataset::MultiSol => "multisol",
            Dataset::Arxiv => "arxiv",
            Dataset::Mslr5Condorcet => "mslr5_condorcet",
            Dataset::Mslr5NonCondorcet => "mslr5_noncondorcet",
            Dataset::Sushi => "sushi",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Dataset::ALL
            .into_iter()
            .find(|d| d.name() == name)
            .ok_or_else(|| Error::UnknownDataset(name.to_string()))
    }

    /// The table as published, one row per line.
    pub fn csv(self) -> &'static str {
        match self {
            Dataset::Cyclic => include_str!("../data/cyclic.csv"),
            Dataset::Gap => include_str!("../data/gap.csv"),
            Dataset::MultiSol => include_str!("../data/multisol.csv"),
            Dataset::Arxiv => include_str!("../data/arxiv.csv"),
            Dataset::Mslr5Condorcet => include_str!("../data/mslr5_condorcet.csv"),
            Dataset::Mslr5NonCondorcet => include_str!("../data/mslr5_noncondorcet.csv"),
            Dataset::Sushi => include_str!("../data/sushi.csv"),
        }
    }

    /// Loads the matrix. The `i > j` entries are taken verbatim from the
    /// table and the rest derived from them; the published tables are not
    /// checked for symmetry (one of them is off by 0.003).
    pub fn load(self, ties: TieMode) -> Result<PreferenceMatrix> {
        let rows: Vec<Vec<f64>> = self
            .csv()
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.split(',')
                    .map(|v| v.trim().parse::<f64>().expect("built-in tables are numeric"))
                    .collect()
            })
            .collect();
        let k = rows.len();
        let lower = distinct_pairs(k).map(|p| rows[p.hi][p.lo]).collect();
        PreferenceMatrix::from_lower(k, lower, ties)
    }
}

/// Loads a built-in dataset in strict mode.
///
/// `arxiv` contains an exact tie and fails here with
/// [`Error::TiedPreference`]; use [`Dataset::load`] with
/// [`TieMode::Tolerant`] for it.
pub fn builtin_dataset(name: &str) -> Result<PreferenceMatrix> {
    Dataset::from_name(name)?.load(TieMode::Strict)
}

/// A random submatrix together with the (0-based, ascending) arms it keeps.
#[derive(Clone, Debug, PartialEq)]
pub struct Submatrix {
    pub arms: Vec<usize>,
    pub matrix: PreferenceMatrix,
}

/// Draws `k` distinct arms uniformly, resampling until every selected pair
/// has `|mu_ij - 1/2| >= min_gap`.
pub fn sample_submatrix<R: Rng + ?Sized>(
    matrix: &PreferenceMatrix,
    k: usize,
    min_gap: f64,
    rng: &mut R,
) -> Result<Submatrix> {
    if k == 0 || k > matrix.k() {
        return Err(Error::InvalidConfig(format!(
            "submatrix size {k} must be in 1..={}",
            matrix.k()
        )));
    }
    if !(min_gap >= 0.0) {
        return Err(Error::InvalidConfig(format!("min_gap {min_gap} must be >= 0")));
    }
    for _ in 0..SUBMATRIX_REJECTION_CAP {
        let mut arms = index::sample(rng, matrix.k(), k).into_vec();
        arms.sort_unstable();
        let ok = distinct_pairs(k)
            .all(|p| (matrix.get(arms[p.hi], arms[p.lo]) - 0.5).abs() >= min_gap);
        if ok {
            let sub = matrix.select(&arms)?;
            return Ok(Submatrix { arms, matrix: sub });
        }
    }
    Err(Error::ExhaustedRejections {
        attempts: SUBMATRIX_REJECTION_CAP,
    })
}
