use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The five bosonic modes, in covariance-matrix order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "a1")]
    Cavity1,
    #[serde(rename = "a2")]
    Cavity2,
    #[serde(rename = "n")]
    Magnon,
    #[serde(rename = "d")]
    Phonon,
    #[serde(rename = "e")]
    Ensemble,
}

impl Mode {
    pub const ALL: [Mode; 5] = [Mode::Cavity1, Mode::Cavity2, Mode::Magnon, Mode::Phonon, Mode::Ensemble];

    pub fn label(self) -> &'static str {
        match self {
            Mode::Cavity1 => "a1",
            Mode::Cavity2 => "a2",
            Mode::Magnon => "n",
            Mode::Phonon => "d",
            Mode::Ensemble => "e",
        }
    }

    /// Position in the full five-mode ordering.
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.label() == s)
            .ok_or_else(|| Error::UnknownMode(s.to_string()))
    }
}

/// Real symmetric covariance matrix of quadrature fluctuations.
///
/// Mode `k` of `mode_labels` occupies rows and columns `2k` and `2k + 1`.
/// Vacuum variance is 1/2 per quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    pub entries: DMatrix<f64>,
    pub mode_labels: Vec<Mode>,
}

impl CovarianceMatrix {
    pub fn new(entries: DMatrix<f64>, mode_labels: Vec<Mode>) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() != 2 * mode_labels.len() {
            return Err(Error::UnsupportedModeCount(
                mode_labels.len(),
                "matching 2m x 2m entries",
            ));
        }
        for (k, m) in mode_labels.iter().enumerate() {
            if mode_labels[..k].contains(m) {
                return Err(Error::invalid("mode_labels", format!("duplicate mode {m}")));
            }
        }
        Ok(CovarianceMatrix { entries, mode_labels })
    }

    /// Labels the modes by their position when no physical label applies
    /// (analytic test states).
    pub fn unlabeled(entries: DMatrix<f64>) -> Result<Self> {
        let m = entries.nrows() / 2;
        if m > Mode::ALL.len() {
            return Err(Error::UnsupportedModeCount(m, "at most 5"));
        }
        Self::new(entries, Mode::ALL[..m].to_vec())
    }

    pub fn num_modes(&self) -> usize {
        self.mode_labels.len()
    }

    pub fn position(&self, mode: Mode) -> Result<usize> {
        self.mode_labels
            .iter()
            .position(|&m| m == mode)
            .ok_or_else(|| Error::UnknownMode(mode.label().to_string()))
    }

    pub fn symmetrize(&mut self) {
        let t = self.entries.transpose();
        self.entries = (&self.entries + t) * 0.5;
    }
}

/// Submatrix of the selected modes, kept in `v`'s mode order.
pub fn reduce(v: &CovarianceMatrix, modes: &[Mode]) -> Result<CovarianceMatrix> {
    let mut positions = Vec::with_capacity(modes.len());
    for (k, &m) in modes.iter().enumerate() {
        if modes[..k].contains(&m) {
            return Err(Error::invalid("modes", format!("duplicate mode {m}")));
        }
        positions.push(v.position(m)?);
    }
    positions.sort_unstable();
    let rows: Vec<usize> = positions.iter().flat_map(|&p| [2 * p, 2 * p + 1]).collect();
    let entries = DMatrix::from_fn(rows.len(), rows.len(), |r, c| v.entries[(rows[r], rows[c])]);
    let labels = positions.iter().map(|&p| v.mode_labels[p]).collect();
    Ok(CovarianceMatrix {
        entries,
        mode_labels: labels,
    })
}

/// Conjugation by the sign matrix flipping the second quadrature of one mode.
pub fn partial_transpose(v: &CovarianceMatrix, transposed: Mode) -> Result<CovarianceMatrix> {
    let m = v.num_modes();
    if !(2..=3).contains(&m) {
        return Err(Error::UnsupportedModeCount(m, "2 or 3"));
    }
    let flip = 2 * v.position(transposed)? + 1;
    let mut out = v.clone();
    for k in 0..2 * m {
        if k != flip {
            out.entries[(flip, k)] = -out.entries[(flip, k)];
            out.entries[(k, flip)] = -out.entries[(k, flip)];
        }
    }
    Ok(out)
}
