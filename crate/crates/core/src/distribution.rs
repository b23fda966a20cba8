//! Position probability distributions with explicit support.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Probabilities over an ordered set of integer positions.
///
/// On the line the support is `{-tau, -tau + 2, ..., tau}`; on a loop it is
/// the site labels `1..=n + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionDistribution<T> {
    support: Vec<i64>,
    probs: Vec<T>,
}

impl<T: Real> PositionDistribution<T> {
    /// Validated constructor: strictly increasing support, non-negative
    /// probabilities summing to one within the state tolerance.
    pub fn new(support: Vec<i64>, probs: Vec<T>) -> Result<Self> {
        if support.len() != probs.len() {
            return Err(Error::DimensionMismatch {
                expected: support.len(),
                got: probs.len(),
            });
        }
        if support.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidDistribution(
                "support must be strictly increasing".into(),
            ));
        }
        let tol = T::tolerances().state;
        if let Some(p) = probs.iter().find(|p| !(**p >= -tol)) {
            return Err(Error::InvalidDistribution(format!(
                "negative probability {p}"
            )));
        }
        let total: T = probs.iter().copied().sum();
        if !((total - T::one()).abs() <= tol) {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}"
            )));
        }
        let probs = probs.into_iter().map(|p| p.max(T::zero())).collect();
        Ok(Self { support, probs })
    }

    /// Constructor without normalization checks, for internally produced data.
    pub(crate) fn from_parts(support: Vec<i64>, probs: Vec<T>) -> Self {
        debug_assert_eq!(support.len(), probs.len());
        Self { support, probs }
    }

    pub fn point_mass(x: i64) -> Self {
        Self {
            support: vec![x],
            probs: vec![T::one()],
        }
    }

    /// Uniform distribution over the given positions.
    pub fn uniform(support: Vec<i64>) -> Result<Self> {
        let n = T::from_usize(support.len()).unwrap();
        let probs = vec![T::one() / n; support.len()];
        Self::new(support, probs)
    }

    pub fn support(&self) -> &[i64] {
        &self.support
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, T)> + '_ {
        self.support.iter().copied().zip(self.probs.iter().copied())
    }

    /// Probability at `x` (zero off the support).
    pub fn prob(&self, x: i64) -> T {
        match self.support.binary_search(&x) {
            Ok(i) => self.probs[i],
            Err(_) => T::zero(),
        }
    }

    pub fn total(&self) -> T {
        self.probs.iter().copied().sum()
    }

    pub fn mean(&self) -> T {
        self.iter().map(|(x, p)| T::from_i64(x).unwrap() * p).sum()
    }

    /// `(mean, variance)`.
    pub fn mean_variance(&self) -> (T, T) {
        let mean = self.mean();
        let var = self
            .iter()
            .map(|(x, p)| {
                let d = T::from_i64(x).unwrap() - mean;
                d * d * p
            })
            .sum();
        (mean, var)
    }
}

/// Both distributions expressed over the union of their supports.
pub fn align<T: Real>(
    p: &PositionDistribution<T>,
    q: &PositionDistribution<T>,
) -> (Vec<i64>, Vec<T>, Vec<T>) {
    let mut support: Vec<i64> = p.support.iter().chain(q.support.iter()).copied().collect();
    support.sort_unstable();
    support.dedup();
    let pa = support.iter().map(|&x| p.prob(x)).collect();
    let qa = support.iter().map(|&x| q.prob(x)).collect();
    (support, pa, qa)
}
