//! Entropies and relative entropies, all in bits.

use crate::coin::validate_density;
use crate::distribution::{align, PositionDistribution};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::Real;

/// `p log2 p` with `0 log 0 = 0`.
#[inline]
fn plogp<T: Real>(p: T) -> T {
    if p > T::zero() {
        p * p.log2()
    } else {
        T::zero()
    }
}

pub fn shannon_entropy<T: Real>(d: &PositionDistribution<T>) -> T {
    shannon_entropy_of(d.probs())
}

pub fn shannon_entropy_of<T: Real>(probs: &[T]) -> T {
    -probs.iter().map(|&p| plogp(p)).sum::<T>()
}

/// Binary entropy `H2(p)` in bits.
pub fn binary_entropy<T: Real>(p: T) -> T {
    -(plogp(p) + plogp(T::one() - p))
}

/// `D(p || q)` in bits over the union of supports; `+inf` when `p` puts more
/// than the support tolerance on a point where `q` vanishes.
pub fn kl_divergence<T: Real>(p: &PositionDistribution<T>, q: &PositionDistribution<T>) -> T {
    let (_, pa, qa) = align(p, q);
    kl_divergence_of(&pa, &qa)
}

/// As [`kl_divergence`] on already aligned vectors.
pub fn kl_divergence_of<T: Real>(p: &[T], q: &[T]) -> T {
    let eps = T::tolerances().support;
    let mut sum = T::zero();
    for (&pi, &qi) in p.iter().zip(q) {
        if pi <= T::zero() {
            continue;
        }
        if qi <= T::zero() {
            if pi > eps {
                return T::infinity();
            }
            continue;
        }
        sum += pi * (pi.log2() - qi.log2());
    }
    // D >= 0; only rounding can push it below.
    if sum < T::zero() && sum > -T::tolerances().eig_clip {
        T::zero()
    } else {
        sum
    }
}

/// Positions where `p` exceeds the support tolerance but `q` is zero.
pub fn divergent_support<T: Real>(
    p: &PositionDistribution<T>,
    q: &PositionDistribution<T>,
) -> Vec<i64> {
    let eps = T::tolerances().support;
    let (support, pa, qa) = align(p, q);
    support
        .into_iter()
        .zip(pa.into_iter().zip(qa))
        .filter(|(_, (pi, qi))| *pi > eps && *qi <= T::zero())
        .map(|(x, _)| x)
        .collect()
}

/// `-sum p log2 q`, the quantity maximized over the classical family.
pub fn cross_entropy_of<T: Real>(p: &[T], q: &[T]) -> T {
    let eps = T::tolerances().support;
    let mut sum = T::zero();
    for (&pi, &qi) in p.iter().zip(q) {
        if pi <= T::zero() {
            continue;
        }
        if qi <= T::zero() {
            if pi > eps {
                return T::infinity();
            }
            continue;
        }
        sum -= pi * qi.log2();
    }
    sum
}

/// Spectrum of a density matrix with eigenvalues in `[-eig_clip, 0)` set to zero.
pub(crate) fn clipped_spectrum<T: Real>(rho: &CMatrix<T>) -> Result<Vec<T>> {
    let tol = T::tolerances();
    let ev = validate_density(rho, tol.state, tol.psd)?;
    if let Some(&min) = ev.first() {
        if min < -tol.eig_clip {
            return Err(Error::InvalidDensity(format!(
                "eigenvalue {min:e} below clipping window"
            )));
        }
    }
    Ok(ev.into_iter().map(|x| x.max(T::zero())).collect())
}

/// `S(rho) = -Tr rho log2 rho`.
pub fn von_neumann_entropy<T: Real>(rho: &CMatrix<T>) -> Result<T> {
    let ev = clipped_spectrum(rho)?;
    Ok(-ev.into_iter().map(plogp).sum::<T>())
}

/// `S(rho || sigma)` for a diagonal `sigma` given by its diagonal `sigma_diag`:
/// `-S(rho) - sum_x rho_xx log2 sigma_xx`.
pub fn relative_entropy_to_diagonal<T: Real>(rho: &CMatrix<T>, sigma_diag: &[T]) -> Result<T> {
    if rho.nrows() != sigma_diag.len() {
        return Err(Error::DimensionMismatch {
            expected: rho.nrows(),
            got: sigma_diag.len(),
        });
    }
    let s = von_neumann_entropy(rho)?;
    let diag: Vec<T> = (0..rho.nrows())
        .map(|i| rho[(i, i)].re.max(T::zero()))
        .collect();
    Ok(cross_entropy_of(&diag, sigma_diag) - s)
}
