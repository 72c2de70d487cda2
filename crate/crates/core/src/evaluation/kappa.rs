use thiserror::Error;

use crate::scalar::Scalar;

/// Disagreement weights over an ordered category list of length C.
#[derive(Debug, Clone, PartialEq)]
pub enum Weights<T> {
    /// `|i - j| / (C - 1)`.
    Linear,
    /// `((i - j) / (C - 1))^2`.
    Quadratic,
    /// Explicit C×C matrix of non-negative weights.
    Matrix(Vec<Vec<T>>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KappaError {
    #[error("raters labeled {0} and {1} items")]
    LengthMismatch(usize, usize),
    #[error("no ratings")]
    Empty,
    #[error("label at position {0} is not in the category list")]
    UnknownLabel(usize),
    #[error("at least two categories are required")]
    TooFewCategories,
    #[error("weight matrix must be {0}x{0} with non-negative entries")]
    BadMatrix(usize),
    #[error("expected disagreement is zero; kappa is undefined")]
    Degenerate,
}

impl<T: Scalar> Weights<T> {
    fn matrix(&self, c: usize) -> Result<Vec<Vec<T>>, KappaError> {
        let scale = T::from_count(c - 1);
        let dist = |i: usize, j: usize| T::from_count(i.abs_diff(j)) / scale;
        match self {
            Weights::Linear => Ok((0..c)
                .map(|i| (0..c).map(|j| dist(i, j)).collect())
                .collect()),
            Weights::Quadratic => Ok((0..c)
                .map(|i| (0..c).map(|j| dist(i, j) * dist(i, j)).collect())
                .collect()),
            Weights::Matrix(m) => {
                let ok = m.len() == c
                    && m.iter()
                        .all(|row| row.len() == c && row.iter().all(|&w| w >= T::zero()));
                if ok {
                    Ok(m.clone())
                } else {
                    Err(KappaError::BadMatrix(c))
                }
            }
        }
    }
}

/// Cohen's weighted kappa `1 - Σ w·o / Σ w·e` between two aligned label
/// sequences over an ordered category list.
pub fn weighted_kappa<T: Scalar, L: PartialEq>(
    a: &[L],
    b: &[L],
    categories: &[L],
    weights: &Weights<T>,
) -> Result<T, KappaError> {
    if a.len() != b.len() {
        return Err(KappaError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(KappaError::Empty);
    }
    let c = categories.len();
    if c < 2 {
        return Err(KappaError::TooFewCategories);
    }
    let w = weights.matrix(c)?;
    let index = |pos: usize, label: &L| {
        categories
            .iter()
            .position(|k| k == label)
            .ok_or(KappaError::UnknownLabel(pos))
    };

    let mut observed = vec![vec![0usize; c]; c];
    let mut rows = vec![0usize; c];
    let mut cols = vec![0usize; c];
    for (pos, (x, y)) in a.iter().zip(b).enumerate() {
        let (i, j) = (index(pos, x)?, index(pos, y)?);
        observed[i][j] += 1;
        rows[i] += 1;
        cols[j] += 1;
    }

    // Both sums are scaled by n^2 so only counts enter the arithmetic.
    let n = T::from_count(a.len());
    let mut obs = T::zero();
    let mut exp = T::zero();
    for i in 0..c {
        for j in 0..c {
            obs = obs + w[i][j] * T::from_count(observed[i][j]) * n;
            exp = exp + w[i][j] * T::from_count(rows[i] * cols[j]);
        }
    }
    if exp == T::zero() {
        return Err(KappaError::Degenerate);
    }
    Ok(T::one() - obs / exp)
}
