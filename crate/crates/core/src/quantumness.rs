//! Quantumness measures: `Q`, coherence `C` and total quantumness.

use crate::classical::{binomial_distribution, gaussian_reference, ClassicalFamily};
use crate::distribution::{align, PositionDistribution};
use crate::entropy::{
    binary_entropy, cross_entropy_of, divergent_support, kl_divergence, kl_divergence_of,
    shannon_entropy, shannon_entropy_of, von_neumann_entropy,
};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::optimize::{grid_then_golden, Minimum};
use crate::scalar::Real;
use crate::walk::Marginal;

/// Cells of the grid scan over `p_plus` before golden-section refinement.
pub const GRID_CELLS: usize = 1024;

/// Bracket width at which the refinement over `p_plus` stops.
pub const P_TOLERANCE: f64 = 1e-8;

/// `Q` together with its minimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct QResult<T> {
    /// `Q` in bits; `+inf` when no classical walk covers the support.
    pub q: T,
    pub p_plus_star: T,
    pub reference: PositionDistribution<T>,
    /// Positions carrying probability where the reference vanishes.
    pub divergent_support: Vec<i64>,
}

impl<T: Real> QResult<T> {
    pub fn is_divergent(&self) -> bool {
        self.q.is_infinite()
    }
}

/// Coin bias of the best classical line walk: `1/2 + <x>/(2 tau)`, clamped
/// to `[0, 1]`. For `tau = 0` every bias is optimal and `1/2` is returned.
pub fn optimal_p_plus<T: Real>(d: &PositionDistribution<T>, tau: usize) -> T {
    if tau == 0 {
        return T::lit(0.5);
    }
    let t = T::from_usize(tau).unwrap();
    let p = T::lit(0.5) + d.mean() / (T::lit(2.0) * t);
    p.max(T::zero()).min(T::one())
}

fn q_result<T: Real>(
    d: &PositionDistribution<T>,
    p: T,
    reference: PositionDistribution<T>,
) -> QResult<T> {
    let q = kl_divergence(d, &reference);
    let divergent_support = if q.is_infinite() {
        divergent_support(d, &reference)
    } else {
        Vec::new()
    };
    QResult {
        q,
        p_plus_star: p,
        reference,
        divergent_support,
    }
}

/// Minimizes `objective(p)` over `[0, 1]` with the grid-plus-golden scan,
/// also trying `seeds`; the smallest value wins.
pub(crate) fn minimize_p<T: Real, F: FnMut(T) -> T>(mut objective: F, seeds: &[T]) -> Minimum<T> {
    let mut best = grid_then_golden(
        &mut objective,
        T::zero(),
        T::one(),
        GRID_CELLS,
        T::lit(P_TOLERANCE),
    );
    for &s in seeds {
        let v = objective(s);
        if v < best.value || (best.value.is_nan() && !v.is_nan()) {
            best = Minimum { x: s, value: v };
        }
    }
    best
}

/// Aligned view of `d` against members of a classical family.
struct Aligned<'a, T> {
    d: &'a PositionDistribution<T>,
    family: &'a ClassicalFamily<T>,
    tau: usize,
}

impl<'a, T: Real> Aligned<'a, T> {
    fn eval(&self, p: T, f: impl Fn(&[T], &[T]) -> T) -> T {
        match self.family.distribution(p, self.tau) {
            Ok(r) => {
                let (_, a, b) = align(self.d, &r);
                f(&a, &b)
            }
            Err(_) => T::nan(),
        }
    }
}

/// `Q` by direct scalar minimization of `D(d || P_RW(p))` over the family.
pub fn numeric_q<T: Real>(
    d: &PositionDistribution<T>,
    family: &ClassicalFamily<T>,
    tau: usize,
) -> Result<QResult<T>> {
    let view = Aligned { d, family, tau };
    let m = minimize_p(|p| view.eval(p, kl_divergence_of), &[]);
    Ok(q_result(d, m.x, family.distribution(m.x, tau)?))
}

/// `Q = min_p D(d || P_RW(p))` in bits.
///
/// On the line the minimizer is the moment-matching bias [`optimal_p_plus`];
/// other families are minimized numerically.
pub fn quantumness_q<T: Real>(
    d: &PositionDistribution<T>,
    family: &ClassicalFamily<T>,
    tau: usize,
) -> Result<QResult<T>> {
    match family {
        ClassicalFamily::Line => {
            let p = optimal_p_plus(d, tau);
            Ok(q_result(d, p, binomial_distribution(p, tau)))
        }
        ClassicalFamily::Loop { .. } => numeric_q(d, family, tau),
    }
}

/// `Q` split as `D(P || P_1/2) - penalty` on the line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition<T> {
    pub q: T,
    pub p_plus_star: T,
    /// `D(P || P_RW(1/2))`.
    pub d_vs_half: T,
    /// `D(P*_RW || P_RW(1/2))`.
    pub penalty: T,
    /// `tau (1 - H2(p*))`.
    pub penalty_entropy_form: T,
}

/// Evaluates both sides of the line decomposition of `Q` and checks that
/// `Q = d_vs_half - penalty` and that both penalty forms agree.
pub fn bias_decomposition<T: Real>(
    d: &PositionDistribution<T>,
    tau: usize,
) -> Result<Decomposition<T>> {
    let qr = quantumness_q(d, &ClassicalFamily::Line, tau)?;
    let half = binomial_distribution(T::lit(0.5), tau);
    let d_vs_half = kl_divergence(d, &half);
    let penalty = kl_divergence(&qr.reference, &half);
    let penalty_entropy_form =
        T::from_usize(tau).unwrap() * (T::one() - binary_entropy(qr.p_plus_star));
    let tol = T::tolerances().identity;
    let check = |what: &'static str, lhs: T, rhs: T| {
        if lhs.is_finite() && rhs.is_finite() && (lhs - rhs).abs() > tol {
            Err(Error::IdentityViolation {
                what,
                lhs: lhs.to_f64().unwrap_or(f64::NAN),
                rhs: rhs.to_f64().unwrap_or(f64::NAN),
                tol: tol.to_f64().unwrap_or(f64::NAN),
            })
        } else {
            Ok(())
        }
    };
    check("penalty forms", penalty, penalty_entropy_form)?;
    check("Q = D(P||P_1/2) - penalty", qr.q, d_vs_half - penalty)?;
    Ok(Decomposition {
        q: qr.q,
        p_plus_star: qr.p_plus_star,
        d_vs_half,
        penalty,
        penalty_entropy_form,
    })
}

/// Relative entropy of coherence in the position basis, `H(diag) - S(rho)`.
pub fn coherence<T: Real>(rho: &CMatrix<T>) -> Result<T> {
    let s = von_neumann_entropy(rho)?;
    let diag: Vec<T> = (0..rho.nrows())
        .map(|i| rho[(i, i)].re.max(T::zero()))
        .collect();
    let c = shannon_entropy_of(&diag) - s;
    let floor = T::tolerances().eig_clip;
    if c < -floor {
        return Err(Error::IdentityViolation {
            what: "coherence >= 0",
            lhs: c.to_f64().unwrap_or(f64::NAN),
            rhs: 0.0,
            tol: floor.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(c.max(T::zero()))
}

/// All quantumness measures of one walker state.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumnessReport<T> {
    pub q_value: T,
    pub coherence: T,
    /// `Q + C`.
    pub total: T,
    /// Total quantumness minimized directly over classical density operators.
    pub total_direct: T,
    pub p_plus_star: T,
    /// Minimizer found by the direct path.
    pub p_plus_star_direct: T,
    pub reference_distribution: PositionDistribution<T>,
    /// `D(P || P_RW(1/2))`, an upper bound on `Q`.
    pub upper_bound_half: T,
    /// `Q` equals the upper bound within the identity tolerance.
    pub saturated: bool,
    pub divergent_support: Vec<i64>,
    pub mean: T,
    pub variance: T,
    pub shannon_entropy: T,
    pub von_neumann_entropy: T,
}

/// `Q`, `C` and total quantumness of a walker state, with the total computed
/// both as `Q + C` and by direct minimization of the quantum relative entropy;
/// the two must agree within the identity tolerance.
pub fn total_quantumness<T: Real>(
    marginal: &Marginal<T>,
    family: &ClassicalFamily<T>,
    tau: usize,
) -> Result<QuantumnessReport<T>> {
    let d = &marginal.distribution;
    let qr = quantumness_q(d, family, tau)?;
    let s = von_neumann_entropy(&marginal.rho)?;
    let c = coherence(&marginal.rho)?;
    let total = qr.q + c;

    let view = Aligned { d, family, tau };
    let seeds = match family {
        ClassicalFamily::Line => vec![qr.p_plus_star],
        ClassicalFamily::Loop { .. } => Vec::new(),
    };
    let direct = minimize_p(|p| view.eval(p, cross_entropy_of), &seeds);
    let total_direct = direct.value - s;
    let tol = T::tolerances().identity;
    if total.is_finite() != total_direct.is_finite()
        || (total.is_finite() && (total - total_direct).abs() > tol)
    {
        return Err(Error::IdentityViolation {
            what: "total quantumness = Q + C",
            lhs: total_direct.to_f64().unwrap_or(f64::NAN),
            rhs: total.to_f64().unwrap_or(f64::NAN),
            tol: tol.to_f64().unwrap_or(f64::NAN),
        });
    }

    let upper_bound_half = kl_divergence(d, &family.distribution(T::lit(0.5), tau)?);
    let saturated = qr.q.is_finite() && (upper_bound_half - qr.q).abs() <= tol;
    let (mean, variance) = d.mean_variance();
    Ok(QuantumnessReport {
        q_value: qr.q,
        coherence: c,
        total,
        total_direct,
        p_plus_star: qr.p_plus_star,
        p_plus_star_direct: direct.x,
        reference_distribution: qr.reference,
        upper_bound_half,
        saturated,
        divergent_support: qr.divergent_support,
        mean,
        variance,
        shannon_entropy: shannon_entropy(d),
        von_neumann_entropy: s,
    })
}

/// Pieces of the Gaussian approximation of `Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianApprox<T> {
    /// `D(P || G)` evaluated directly.
    pub q_approx: T,
    /// `H(G) - H(P)`.
    pub entropy_gap: T,
    /// `(E_P[(x-m)^2] - E_G[(x-m)^2]) / (2 s^2 ln 2)` with `s^2` the
    /// reference's variance parameter.
    pub variance_term: T,
    /// `entropy_gap + variance_term`; equals `q_approx` up to rounding.
    pub expansion: T,
    pub reference: PositionDistribution<T>,
}

/// Compares `d` with the discrete Gaussian of mean `mean` on the parity
/// lattice of `tau`. Requires `tau >= 10`.
pub fn gaussian_q_approx<T: Real>(
    d: &PositionDistribution<T>,
    tau: usize,
    mean: T,
) -> Result<GaussianApprox<T>> {
    if tau < 10 {
        return Err(Error::ParameterOutOfRange {
            name: "tau",
            value: tau as f64,
            range: "tau >= 10",
        });
    }
    let g = gaussian_reference(mean, tau)?;
    let q_approx = kl_divergence(d, &g);
    let entropy_gap = shannon_entropy(&g) - shannon_entropy(d);
    let t = T::from_usize(tau).unwrap();
    let s2 = t * (T::one() - (mean / t) * (mean / t));
    let second = |dist: &PositionDistribution<T>| {
        dist.iter()
            .map(|(x, p)| {
                let dx = T::from_i64(x).unwrap() - mean;
                p * dx * dx
            })
            .sum::<T>()
    };
    let variance_term = if s2 > T::zero() {
        (second(d) - second(&g)) / (T::lit(2.0) * s2 * T::LN_2())
    } else {
        q_approx - entropy_gap
    };
    Ok(GaussianApprox {
        q_approx,
        entropy_gap,
        variance_term,
        expansion: entropy_gap + variance_term,
        reference: g,
    })
}

/// Long-time coin bias of the unitary line walk:
/// `1/2 + (cos 2eta + tan(theta) cos(phi) sin 2eta) (1 - sin theta) / 2`,
/// `phi = alpha + beta - gamma`.
pub fn asymptotic_p_star<T: Real>(eta: T, gamma: T, alpha: T, beta: T, theta: T) -> Result<T> {
    if theta == T::zero() {
        return Err(Error::ThetaZero);
    }
    if !(theta > T::zero() && theta <= T::FRAC_PI_2()) {
        return Err(Error::ParameterOutOfRange {
            name: "theta",
            value: theta.to_f64().unwrap_or(f64::NAN),
            range: "(0, pi/2]",
        });
    }
    let two = T::lit(2.0);
    let (s, c) = theta.sin_cos();
    let one_minus_sin = T::one() - s;
    // tan(theta) (1 - sin theta) without the cancellation near pi/2.
    let tan_term = s * c / (T::one() + s);
    let phi = alpha + beta - gamma;
    Ok(T::lit(0.5)
        + ((two * eta).cos() * one_minus_sin + tan_term * phi.cos() * (two * eta).sin()) / two)
}

/// `l1` analogue of the quantumness measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L1Report<T> {
    /// `min_p sum_x |P(x) - P_RW(x; p)|`.
    pub q_l1: T,
    /// `sum_{x != y} |rho_xy|`.
    pub c_l1: T,
    pub total_l1: T,
    pub p_plus: T,
}

fn l1_of<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| (*x - *y).abs()).sum()
}

pub fn l1_quantumness<T: Real>(
    marginal: &Marginal<T>,
    family: &ClassicalFamily<T>,
    tau: usize,
) -> Result<L1Report<T>> {
    let d = &marginal.distribution;
    let view = Aligned { d, family, tau };
    let seeds = match family {
        ClassicalFamily::Line => vec![optimal_p_plus(d, tau)],
        ClassicalFamily::Loop { .. } => Vec::new(),
    };
    let m = minimize_p(|p| view.eval(p, l1_of), &seeds);
    let rho = &marginal.rho;
    let mut c_l1 = T::zero();
    for i in 0..rho.nrows() {
        for j in 0..rho.ncols() {
            if i != j {
                c_l1 += rho[(i, j)].norm();
            }
        }
    }
    Ok(L1Report {
        q_l1: m.value,
        c_l1,
        total_l1: m.value + c_l1,
        p_plus: m.x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::classical_density_operator;
    use crate::coin::{CoinOperator, CoinState};
    use crate::linalg::{cplx, creal};
    use crate::topology::Topology;
    use crate::walk::{evolve_pure, position_marginal};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn dist(s: &[i64], p: &[f64]) -> PositionDistribution<f64> {
        PositionDistribution::new(s.to_vec(), p.to_vec()).unwrap()
    }

    fn hadamard_marginal(state: CoinState<f64>, tau: usize) -> Marginal<f64> {
        let s = evolve_pure(&CoinOperator::hadamard(), &state, &Topology::line(tau), tau).unwrap();
        position_marginal(&s)
    }

    #[test]
    fn optimal_p_examples() {
        assert_eq!(
            optimal_p_plus(&dist(&[-2, 0, 2], &[0.25, 0.5, 0.25]), 2),
            0.5
        );
        assert_eq!(
            optimal_p_plus(&PositionDistribution::<f64>::point_mass(7), 7),
            1.0
        );
        assert_eq!(
            optimal_p_plus(&PositionDistribution::<f64>::point_mass(-7), 7),
            0.0
        );
    }

    #[test]
    fn q_examples() {
        let d = dist(&[-2, 0, 2], &[0.25, 0.5, 0.25]);
        let r = quantumness_q(&d, &ClassicalFamily::Line, 2).unwrap();
        assert_abs_diff_eq!(r.q, 0.0, epsilon = 1e-15);
        assert_eq!(r.p_plus_star, 0.5);

        let b = binomial_distribution(0.3, 9);
        let r = quantumness_q(&b, &ClassicalFamily::Line, 9).unwrap();
        assert_abs_diff_eq!(r.q, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.p_plus_star, 0.3, epsilon = 1e-12);
    }

    #[test]
    fn q_reports_divergence() {
        let d = dist(&[-1, 0, 1], &[0.25, 0.5, 0.25]);
        let r = quantumness_q(&d, &ClassicalFamily::Line, 1).unwrap();
        assert!(r.is_divergent());
        assert_eq!(r.divergent_support, vec![0]);
    }

    #[test]
    fn analytic_matches_numeric_for_hadamard() {
        let m = hadamard_marginal(CoinState::plus(), 100);
        let a = quantumness_q(&m.distribution, &ClassicalFamily::Line, 100).unwrap();
        let n = numeric_q(&m.distribution, &ClassicalFamily::Line, 100).unwrap();
        assert!((a.p_plus_star - n.p_plus_star).abs() < 1e-6);
        assert!((a.q - n.q).abs() < 1e-8);
        assert!(a.q <= n.q + 1e-12);
    }

    #[test]
    fn decomposition_examples() {
        let d = dist(&[-2, 0, 2], &[0.25, 0.5, 0.25]);
        let t = bias_decomposition(&d, 2).unwrap();
        assert_eq!(t.penalty, 0.0);
        assert_abs_diff_eq!(t.q, t.d_vs_half, epsilon = 1e-15);

        let t = bias_decomposition(&PositionDistribution::<f64>::point_mass(5), 5).unwrap();
        assert_abs_diff_eq!(t.d_vs_half, 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t.penalty, 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t.q, 0.0, epsilon = 1e-12);

        let m = hadamard_marginal(CoinState::plus(), 50);
        bias_decomposition(&m.distribution, 50).unwrap();
    }

    #[test]
    fn coherence_examples() {
        let d = dist(&[0, 1], &[0.3, 0.7]);
        assert_eq!(coherence(&classical_density_operator(&d)).unwrap(), 0.0);
        let rho = CMatrix::from_elem((4, 4), creal(0.25));
        assert_abs_diff_eq!(coherence(&rho).unwrap(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn total_quantumness_examples() {
        let b = binomial_distribution(0.4f64, 6);
        let m = Marginal {
            rho: classical_density_operator(&b),
            distribution: b,
        };
        let r = total_quantumness(&m, &ClassicalFamily::Line, 6).unwrap();
        assert!(r.q_value.abs() < 1e-12 && r.coherence.abs() < 1e-12 && r.total.abs() < 1e-12);

        // A pure walker state has no entropy, so all of H(P) is coherence.
        let amp = [0.5f64, 0.5, -0.5, 0.5];
        let rho = CMatrix::from_shape_fn((4, 4), |(i, j)| creal(amp[i] * amp[j]));
        let m = Marginal {
            distribution: dist(&[-3, -1, 1, 3], &[0.25; 4]),
            rho,
        };
        let r = total_quantumness(&m, &ClassicalFamily::Line, 3).unwrap();
        assert_abs_diff_eq!(r.coherence, 2.0, epsilon = 1e-9);

        // Tracing out the coin leaves a walker state of rank at most two.
        let m = hadamard_marginal(CoinState::plus(), 30);
        let r = total_quantumness(&m, &ClassicalFamily::Line, 30).unwrap();
        assert!(r.von_neumann_entropy <= 1.0 + 1e-12);
        assert_abs_diff_eq!(
            r.coherence,
            r.shannon_entropy - r.von_neumann_entropy,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(r.total, r.q_value + r.coherence, epsilon = 1e-15);
        assert!((r.p_plus_star - r.p_plus_star_direct).abs() < 1e-6);
    }

    #[test]
    fn symmetric_start_saturates_upper_bound() {
        let m = hadamard_marginal(CoinState::balanced(FRAC_PI_2), 100);
        let r = total_quantumness(&m, &ClassicalFamily::Line, 100).unwrap();
        assert!(r.mean.abs() < 1e-9);
        assert!(r.saturated);
    }

    #[test]
    fn gaussian_examples() {
        let g = gaussian_reference(0.0, 40).unwrap();
        let a = gaussian_q_approx(&g, 40, 0.0).unwrap();
        assert_abs_diff_eq!(a.q_approx, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a.entropy_gap, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a.variance_term, 0.0, epsilon = 1e-12);

        let b = binomial_distribution(0.5, 200);
        let a = gaussian_q_approx(&b, 200, 0.0).unwrap();
        assert!(a.q_approx < 0.01);
        assert_abs_diff_eq!(a.q_approx, a.expansion, epsilon = 1e-10);
        assert!(gaussian_q_approx(&b, 5, 0.0).is_err());
    }

    #[test]
    fn asymptotic_examples() {
        let p = asymptotic_p_star(0.0, 0.3, 1.0, 2.0, FRAC_PI_4).unwrap();
        assert_abs_diff_eq!(p, 0.5 + (1.0 - FRAC_PI_4.sin()) / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p, 0.64645, epsilon = 1e-5);
        let p = asymptotic_p_star(FRAC_PI_4, 0.0, FRAC_PI_4, FRAC_PI_4, 0.7).unwrap();
        assert_abs_diff_eq!(p, 0.5, epsilon = 1e-15);
        assert_eq!(
            asymptotic_p_star(0.3, 0.1, 0.2, 0.4, FRAC_PI_2).unwrap(),
            0.5
        );
        assert_eq!(
            asymptotic_p_star(0.3, 0.1, 0.2, 0.4, 0.0),
            Err(Error::ThetaZero)
        );
    }

    #[test]
    fn l1_examples() {
        let b = binomial_distribution(0.3, 8);
        let m = Marginal {
            rho: classical_density_operator(&b),
            distribution: b,
        };
        let r = l1_quantumness(&m, &ClassicalFamily::Line, 8).unwrap();
        assert!(r.q_l1 < 1e-12 && r.c_l1 == 0.0 && r.total_l1 < 1e-12);

        let h = 0.5;
        let rho =
            CMatrix::from_shape_vec((2, 2), vec![creal(h), creal(h), creal(h), creal(h)]).unwrap();
        let m = Marginal {
            distribution: dist(&[-1, 1], &[h, h]),
            rho,
        };
        let r = l1_quantumness(&m, &ClassicalFamily::Line, 1).unwrap();
        assert_abs_diff_eq!(r.q_l1, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.c_l1, 1.0, epsilon = 1e-15);

        let rho = CMatrix::from_shape_vec(
            (2, 2),
            vec![creal(h), cplx(0.0, h), cplx(0.0, -h), creal(h)],
        )
        .unwrap();
        let m = Marginal {
            distribution: dist(&[-1, 1], &[h, h]),
            rho,
        };
        assert_abs_diff_eq!(
            l1_quantumness(&m, &ClassicalFamily::Line, 1).unwrap().c_l1,
            1.0,
            epsilon = 1e-15
        );
    }
}
