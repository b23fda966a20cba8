//! Closed-form walker amplitudes on the line.
//!
//! After `tau >= 2` steps from the origin,
//! `|Psi±(tau)> = sum_{N+} <±|R_{N+}|phi0> |2 N+ - tau + 1 ± 1>`, where `R_{N+}`
//! sums the coin products `U P_{k_{tau-1}} U ... U P_{k_1} U` over all
//! projector strings with `N+` right moves among the first `tau - 1` steps.
//! Grouping the strings by their first and last projector turns each group into
//! a terminating Gauss hypergeometric series in
//! `z = U01 U10 / (U00 U11)`.

use num_complex::Complex;

use crate::coin::{CoinOperator, CoinState};
use crate::error::{Error, Result};
use crate::linalg::{creal, CMatrix, CVector};
use crate::scalar::Real;
use crate::walk::PureWalkState;

/// `2F1(a, b; c; z)` for a terminating series (`a <= 0` or `b <= 0`).
///
/// Each term is obtained from the previous one by the rational factor
/// `(a + k)(b + k) / ((c + k)(k + 1))`.
pub fn hyp2f1_terminating<T: Real>(a: i64, b: i64, c: i64, z: Complex<T>) -> Result<Complex<T>> {
    if c < 1 {
        return Err(Error::InvalidC(c));
    }
    if a > 0 && b > 0 {
        return Err(Error::NonTerminating { a, b });
    }
    let mut term = creal(T::one());
    let mut sum = term;
    let mut k = 0i64;
    while a + k != 0 && b + k != 0 {
        let num = T::from_i64((a + k) * (b + k)).unwrap();
        let den = T::from_i64((c + k) * (k + 1)).unwrap();
        term = term * z * (num / den);
        sum += term;
        k += 1;
    }
    Ok(sum)
}

/// Number of ways to put `balls` indistinguishable balls into `boxes` boxes
/// with none empty: `(balls - 1)! / ((boxes - 1)! (balls - boxes)!)`.
pub fn no_empty_box_count(balls: u64, boxes: u64) -> u128 {
    if boxes == 0 {
        return u128::from(balls == 0);
    }
    if boxes > balls {
        return 0;
    }
    binomial(balls - 1, boxes - 1)
}

fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    acc
}

/// `R_{N+}` for a given step count.
#[derive(Debug, Clone, PartialEq)]
pub struct RMatrix<T> {
    pub n_plus: usize,
    pub matrix: CMatrix<T>,
}

fn singularity<T: Real>(coin: &CoinOperator<T>) -> (T, T) {
    let u = coin.matrix();
    (
        (u[(0, 0)] * u[(1, 1)]).norm(),
        (u[(0, 1)] * u[(1, 0)]).norm(),
    )
}

fn check_nonsingular<T: Real>(coin: &CoinOperator<T>) -> Result<()> {
    let (diag, off) = singularity(coin);
    let thr = T::tolerances().singular;
    if diag < thr || off < thr {
        return Err(Error::SingularCoin {
            diag: diag.to_f64().unwrap_or(f64::NAN),
            off: off.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// `R_{N+}` after `tau` steps, `0 <= n_plus <= tau - 1`.
///
/// The extreme cases are plain products. For `1 <= n_plus <= tau - 2` the four
/// hypergeometric terms are assembled with non-negative powers of `U00` and
/// `U11`; the two terms whose prefactor vanishes for `N± = 1` are skipped.
/// Coins with `|U00 U11|` or `|U01 U10|` below the singularity tolerance are
/// rejected in that branch.
pub fn r_matrix<T: Real>(coin: &CoinOperator<T>, tau: usize, n_plus: usize) -> Result<RMatrix<T>> {
    if tau < 2 {
        return Err(Error::ParameterOutOfRange {
            name: "tau",
            value: tau as f64,
            range: "tau >= 2",
        });
    }
    if n_plus > tau - 1 {
        return Err(Error::ParameterOutOfRange {
            name: "n_plus",
            value: n_plus as f64,
            range: "0 <= n_plus <= tau - 1",
        });
    }
    let u = coin.matrix();
    let n_minus = tau - 1 - n_plus;
    let mut r = CMatrix::zeros((2, 2));

    if n_plus == 0 || n_plus == tau - 1 {
        let m = if n_plus == 0 { 1 } else { 0 };
        let pow = u[(m, m)].powu((tau - 2) as u32);
        for i in 0..2 {
            for j in 0..2 {
                r[(i, j)] = u[(i, m)] * pow * u[(m, j)];
            }
        }
        return Ok(RMatrix { n_plus, matrix: r });
    }

    check_nonsingular(coin)?;
    let (u00, u01, u10, u11) = (u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
    let z = (u01 * u10) / (u00 * u11);
    let np = n_plus as i64;
    let nm = n_minus as i64;

    let base = u00.powu((n_plus - 1) as u32) * u11.powu((n_minus - 1) as u32);
    let f11 = hyp2f1_terminating(1 - np, 1 - nm, 1, z)?;
    // Strings starting with P0 and ending with P1, and the reverse.
    let c01 = f11 * base * u01;
    let c10 = f11 * base * u10;
    // Strings starting and ending with the same projector.
    let c00 = if n_plus >= 2 {
        let f = hyp2f1_terminating(2 - np, 1 - nm, 2, z)?;
        f * u00.powu((n_plus - 2) as u32)
            * u11.powu((n_minus - 1) as u32)
            * u01
            * u10
            * T::from_i64(np - 1).unwrap()
    } else {
        creal(T::zero())
    };
    let c11 = if n_minus >= 2 {
        let f = hyp2f1_terminating(1 - np, 2 - nm, 2, z)?;
        f * u00.powu((n_plus - 1) as u32)
            * u11.powu((n_minus - 2) as u32)
            * u01
            * u10
            * T::from_i64(nm - 1).unwrap()
    } else {
        creal(T::zero())
    };
    for i in 0..2 {
        for j in 0..2 {
            r[(i, j)] = c01 * u[(i, 0)] * u[(1, j)]
                + c10 * u[(i, 1)] * u[(0, j)]
                + c00 * u[(i, 0)] * u[(0, j)]
                + c11 * u[(i, 1)] * u[(1, j)];
        }
    }
    Ok(RMatrix { n_plus, matrix: r })
}

/// Walker amplitudes after `tau` steps from the origin, assembled from the
/// `R_{N+}` matrices. Same contract as [`crate::walk::evolve_pure`].
pub fn closed_form_state<T: Real>(
    coin: &CoinOperator<T>,
    initial: &CoinState<T>,
    tau: usize,
) -> Result<PureWalkState<T>> {
    let phi = initial.amplitudes().ok_or(Error::NonPureCoin)?;
    check_nonsingular(coin)?;
    let zero = creal(T::zero());
    let mut plus = CVector::from_elem(tau + 1, zero);
    let mut minus = CVector::from_elem(tau + 1, zero);
    match tau {
        0 => {
            plus[0] = phi[0];
            minus[0] = phi[1];
        }
        1 => {
            let v = coin.matrix().dot(&phi);
            plus[1] = v[0];
            minus[0] = v[1];
        }
        _ => {
            for n_plus in 0..tau {
                let r = r_matrix(coin, tau, n_plus)?;
                let v = r.matrix.dot(&phi);
                // Position 2 N+ - tau + 2 for |+>, 2 N+ - tau for |->.
                plus[n_plus + 1] = v[0];
                minus[n_plus] = v[1];
            }
        }
    }
    Ok(PureWalkState::from_parts(tau, plus, minus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cplx, max_abs_diff};
    use crate::topology::Topology;
    use crate::walk::{evolve_pure, position_marginal};
    use approx::assert_abs_diff_eq;

    /// Brute-force sum over all projector strings with `n_plus` zeros.
    fn path_sum(u: &CMatrix<f64>, tau: usize, n_plus: usize) -> CMatrix<f64> {
        let len = tau - 1;
        let mut out = CMatrix::zeros((2, 2));
        for mask in 0u32..(1 << len) {
            if (len as u32 - mask.count_ones()) as usize != n_plus {
                continue;
            }
            // k_1 .. k_{tau-1}: bit i is k_{i+1}.
            for kt in 0..2 {
                for k0 in 0..2 {
                    let mut prod = creal(1.0);
                    let mut prev = k0;
                    for i in 0..len {
                        let k = ((mask >> i) & 1) as usize;
                        prod *= u[(k, prev)];
                        prev = k;
                    }
                    prod *= u[(kt, prev)];
                    out[(kt, k0)] += prod;
                }
            }
        }
        out
    }

    #[test]
    fn hypergeometric_examples() {
        let z = cplx(0.3, -0.7);
        assert_eq!(hyp2f1_terminating::<f64>(0, 5, 3, z).unwrap(), creal(1.0));
        let v = hyp2f1_terminating::<f64>(-1, -1, 1, z).unwrap();
        assert!((v - (creal(1.0) + z)).norm() < 1e-15);
        let v = hyp2f1_terminating::<f64>(-2, -2, 1, creal(0.5)).unwrap();
        assert_abs_diff_eq!(v.re, 3.25, epsilon = 1e-15);
        assert!(matches!(
            hyp2f1_terminating::<f64>(1, 2, 1, z),
            Err(Error::NonTerminating { .. })
        ));
        assert!(matches!(
            hyp2f1_terminating::<f64>(-1, 2, 0, z),
            Err(Error::InvalidC(0))
        ));
    }

    #[test]
    fn two_step_r_matrix_is_single_product() {
        let c = CoinOperator::<f64>::parameterized(0.3, 1.3, 0.8).unwrap();
        let u = c.matrix();
        let r = r_matrix(&c, 2, 1).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((r.matrix[(i, j)] - u[(i, 0)] * u[(0, j)]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn hadamard_three_steps_matches_path_enumeration() {
        let c = CoinOperator::<f64>::hadamard();
        for n_plus in 0..3 {
            let r = r_matrix(&c, 3, n_plus).unwrap();
            assert!(max_abs_diff(&r.matrix, &path_sum(c.matrix(), 3, n_plus)) < 1e-15);
        }
    }

    #[test]
    fn hadamard_ten_steps_matches_engine() {
        let c = CoinOperator::<f64>::hadamard();
        let init = CoinState::plus();
        let a = closed_form_state(&c, &init, 10).unwrap();
        let b = evolve_pure(&c, &init, &Topology::line(10), 10).unwrap();
        for x in b.positions() {
            for coin in 0..2 {
                assert!((a.amplitude(coin, x) - b.amplitude(coin, x)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn hadamard_two_steps_distribution() {
        let s = closed_form_state(&CoinOperator::<f64>::hadamard(), &CoinState::plus(), 2).unwrap();
        let d = position_marginal(&s).distribution;
        for (got, want) in d.probs().iter().zip([0.25, 0.5, 0.25]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
    }

    #[test]
    fn parameterized_coin_matches_engine_up_to_thirty_steps() {
        let c = CoinOperator::<f64>::parameterized(0.0, 0.0, 1.0).unwrap();
        let init = CoinState::plus();
        for tau in 2..=30 {
            let a = closed_form_state(&c, &init, tau).unwrap();
            let b = evolve_pure(&c, &init, &Topology::line(tau), tau).unwrap();
            for x in b.positions() {
                for coin in 0..2 {
                    assert!(
                        (a.amplitude(coin, x) - b.amplitude(coin, x)).norm() < 1e-10,
                        "tau {tau} x {x}"
                    );
                }
            }
        }
    }

    #[test]
    fn singular_coins_rejected() {
        for c in [CoinOperator::<f64>::identity(), CoinOperator::pauli_z()] {
            assert!(matches!(
                closed_form_state(&c, &CoinState::plus(), 5),
                Err(Error::SingularCoin { .. })
            ));
            assert!(matches!(
                r_matrix(&c, 5, 2),
                Err(Error::SingularCoin { .. })
            ));
            assert!(r_matrix(&c, 5, 0).is_ok());
        }
        let swap =
            CoinOperator::<f64>::parameterized(0.0, 0.0, std::f64::consts::FRAC_PI_2).unwrap();
        assert!(matches!(
            r_matrix(&swap, 4, 1),
            Err(Error::SingularCoin { .. })
        ));
    }

    #[test]
    fn r_matrix_argument_checks() {
        let c = CoinOperator::<f64>::hadamard();
        assert!(r_matrix(&c, 1, 0).is_err());
        assert!(r_matrix(&c, 4, 4).is_err());
    }

    #[test]
    fn no_empty_box_counts_match_enumeration() {
        fn brute(balls: u64, boxes: u64) -> u128 {
            // Compositions of `balls` into `boxes` positive parts.
            fn rec(left: u64, boxes: u64) -> u128 {
                if boxes == 0 {
                    return u128::from(left == 0);
                }
                (1..=left).map(|first| rec(left - first, boxes - 1)).sum()
            }
            rec(balls, boxes)
        }
        for balls in 1..=12 {
            for boxes in 1..=balls {
                assert_eq!(
                    no_empty_box_count(balls, boxes),
                    brute(balls, boxes),
                    "{balls} {boxes}"
                );
            }
        }
    }
}
