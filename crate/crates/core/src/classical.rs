//! Classical random walks used as references.

use crate::channel::NoiseChannel;
use crate::coin::{CoinOperator, CoinState};
use crate::distribution::PositionDistribution;
use crate::error::{Error, Result};
use crate::linalg::{creal, max_offdiagonal, CMatrix};
use crate::scalar::Real;
use crate::topology::{LoopSpec, Topology};
use crate::walk::{evolve_noisy, position_marginal, JointState};

/// A Markovian walk that moves `+` with probability `p_plus`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalWalk<T> {
    p_plus: T,
    topology: Topology<T>,
}

impl<T: Real> ClassicalWalk<T> {
    pub fn new(p_plus: T, topology: Topology<T>) -> Result<Self> {
        check_p(p_plus)?;
        Ok(Self { p_plus, topology })
    }

    pub fn p_plus(&self) -> T {
        self.p_plus
    }

    pub fn p_minus(&self) -> T {
        T::one() - self.p_plus
    }

    pub fn topology(&self) -> &Topology<T> {
        &self.topology
    }
}

fn check_p<T: Real>(p: T) -> Result<()> {
    if p >= T::zero() && p <= T::one() {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange {
            name: "p_plus",
            value: p.to_f64().unwrap_or(f64::NAN),
            range: "[0, 1]",
        })
    }
}

/// Binomial position law after `tau` steps from the origin, on the support
/// `{-tau, -tau + 2, ..., tau}`.
///
/// Terms are built by the ratio recurrence outward from the mode and then
/// normalized, so the relative error of each term grows only with its
/// distance from the mode.
pub fn binomial_distribution<T: Real>(p_plus: T, tau: usize) -> PositionDistribution<T> {
    let support: Vec<i64> = (0..=tau).map(|k| 2 * k as i64 - tau as i64).collect();
    let mut probs = vec![T::zero(); tau + 1];
    if p_plus <= T::zero() || p_plus >= T::one() {
        probs[if p_plus >= T::one() { tau } else { 0 }] = T::one();
        return PositionDistribution::from_parts(support, probs);
    }
    let q = T::one() - p_plus;
    let t = T::from_usize(tau).unwrap();
    let mode = ((t + T::one()) * p_plus)
        .floor()
        .to_usize()
        .unwrap_or(0)
        .min(tau);
    let odds = p_plus / q;
    probs[mode] = T::one();
    for k in mode..tau {
        let r = T::from_usize(tau - k).unwrap() / T::from_usize(k + 1).unwrap() * odds;
        probs[k + 1] = probs[k] * r;
    }
    for k in (1..=mode).rev() {
        let r = T::from_usize(k).unwrap() / T::from_usize(tau - k + 1).unwrap() / odds;
        probs[k - 1] = probs[k] * r;
    }
    let z: T = probs.iter().copied().sum();
    for v in probs.iter_mut() {
        *v /= z;
    }
    PositionDistribution::from_parts(support, probs)
}

/// Diagonal density matrix with `d` on the diagonal.
pub fn classical_density_operator<T: Real>(d: &PositionDistribution<T>) -> CMatrix<T> {
    let n = d.len();
    let mut m = CMatrix::zeros((n, n));
    for (i, &p) in d.probs().iter().enumerate() {
        m[(i, i)] = creal(p);
    }
    m
}

/// Column-stochastic `(n + 1) x (n + 1)` matrix of one loop step followed by
/// the sink matrix `S_k`; entry `[to][from]`, labels shifted down by one.
pub fn loop_transition_matrix<T: Real>(p_plus: T, spec: &LoopSpec<T>) -> Vec<Vec<T>> {
    let m = spec.n() + 1;
    let mut walk = vec![vec![T::zero(); m]; m];
    for site in 1..=m {
        if site == spec.sink_label() {
            walk[site - 1][site - 1] = T::one();
        } else {
            walk[spec.neighbour(site, true) - 1][site - 1] += p_plus;
            walk[spec.neighbour(site, false) - 1][site - 1] += T::one() - p_plus;
        }
    }
    let k = spec.sink_site() - 1;
    let s = spec.n();
    let r = spec.leak();
    // S_k = I + r |n+1><k| - r |k><k|
    let mut out = walk.clone();
    for from in 0..m {
        let moved = walk[k][from] * r;
        out[k][from] = walk[k][from] - moved;
        out[s][from] = walk[s][from] + moved;
    }
    out
}

/// Loop-with-sink random walk after `tau` steps from `start` (a loop site).
pub fn classical_loop_distribution<T: Real>(
    p_plus: T,
    spec: &LoopSpec<T>,
    tau: usize,
    start: usize,
) -> Result<PositionDistribution<T>> {
    Ok(PositionDistribution::from_parts(
        (1..=spec.sink_label() as i64).collect(),
        classical_loop_trajectory(p_plus, spec, tau, start)?
            .pop()
            .unwrap(),
    ))
}

/// Probability vectors over labels `1..=n + 1` for every time `0..=tau`.
pub fn classical_loop_trajectory<T: Real>(
    p_plus: T,
    spec: &LoopSpec<T>,
    tau: usize,
    start: usize,
) -> Result<Vec<Vec<T>>> {
    check_p(p_plus)?;
    spec.check_site(start)?;
    let m = spec.n() + 1;
    let p_minus = T::one() - p_plus;
    let k = spec.sink_site() - 1;
    let s = spec.n();
    let r = spec.leak();
    let mut v = vec![T::zero(); m];
    v[start - 1] = T::one();
    let mut out = Vec::with_capacity(tau + 1);
    out.push(v.clone());
    for _ in 0..tau {
        let mut next = vec![T::zero(); m];
        next[s] = v[s];
        for site in 1..=spec.n() {
            let w = v[site - 1];
            next[spec.neighbour(site, true) - 1] += p_plus * w;
            next[spec.neighbour(site, false) - 1] += p_minus * w;
        }
        let leaked = next[k] * r;
        next[k] -= leaked;
        next[s] += leaked;
        v = next;
        out.push(v.clone());
    }
    Ok(out)
}

/// Discrete Gaussian on the parity-`tau` support with mean `mean` and
/// variance parameter `tau (1 - mean^2 / tau^2)`, normalized on the lattice.
pub fn gaussian_reference<T: Real>(mean: T, tau: usize) -> Result<PositionDistribution<T>> {
    let t = T::from_usize(tau).unwrap();
    if !(mean.abs() <= t) {
        return Err(Error::MeanOutOfRange {
            mean: mean.to_f64().unwrap_or(f64::NAN),
            tau,
        });
    }
    let support: Vec<i64> = (0..=tau).map(|k| 2 * k as i64 - tau as i64).collect();
    let sigma2 = if tau == 0 {
        T::zero()
    } else {
        t * (T::one() - (mean / t) * (mean / t))
    };
    if sigma2 <= T::zero() {
        // Degenerate: all mass on the support point nearest the mean.
        let nearest = support
            .iter()
            .enumerate()
            .min_by(|a, b| {
                let da = (T::from_i64(*a.1).unwrap() - mean).abs();
                let db = (T::from_i64(*b.1).unwrap() - mean).abs();
                da.partial_cmp(&db).unwrap()
            })
            .map(|(i, _)| i)
            .unwrap();
        let mut probs = vec![T::zero(); support.len()];
        probs[nearest] = T::one();
        return Ok(PositionDistribution::from_parts(support, probs));
    }
    let two = T::lit(2.0);
    let logw: Vec<T> = support
        .iter()
        .map(|&x| {
            let d = T::from_i64(x).unwrap() - mean;
            -(d * d) / (two * sigma2)
        })
        .collect();
    let max = logw.iter().copied().fold(T::neg_infinity(), T::max);
    let w: Vec<T> = logw.iter().map(|&l| (l - max).exp()).collect();
    let z: T = w.iter().copied().sum();
    Ok(PositionDistribution::from_parts(
        support,
        w.into_iter().map(|x| x / z).collect(),
    ))
}

/// Family of classical reference walks a quantum walk is compared against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassicalFamily<T> {
    /// Binomial walks on the line from the origin.
    Line,
    /// Loop-with-sink walks from `start`.
    Loop { spec: LoopSpec<T>, start: usize },
}

impl<T: Real> ClassicalFamily<T> {
    /// Family matching a quantum walk on `topology` started at `start`
    /// (ignored on the line).
    pub fn for_topology(topology: &Topology<T>, start: usize) -> Self {
        match topology {
            Topology::Line { .. } => ClassicalFamily::Line,
            Topology::Loop(spec) => ClassicalFamily::Loop { spec: *spec, start },
        }
    }

    /// Member with bias `p_plus` after `tau` steps.
    pub fn distribution(&self, p_plus: T, tau: usize) -> Result<PositionDistribution<T>> {
        match self {
            ClassicalFamily::Line => {
                check_p(p_plus)?;
                Ok(binomial_distribution(p_plus, tau))
            }
            ClassicalFamily::Loop { spec, start } => {
                classical_loop_distribution(p_plus, spec, tau, *start)
            }
        }
    }
}

/// Coin used with the contraction channel to realize a classical walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassicalCoin {
    Identity,
    PauliZ,
}

/// Outcome of running a contraction-noise walk and comparing it with the
/// binomial law.
#[derive(Debug, Clone)]
pub struct ContractionCheck<T> {
    pub state: JointState<T>,
    /// Largest coherence `|rho_xy|`, `x != y`, of the walker's reduced state.
    pub max_offdiagonal: T,
    /// Largest `|P(x) - P_binomial(x)|`.
    pub max_diagonal_deviation: T,
    /// Largest entry of `|rho_joint - rho_expected|` against the closed form
    /// `sum_m C(tau-1, m) p+^m p-^(tau-1-m) (p+ |+><+| ⊗ |2m-tau+2><..| + p- |-><-| ⊗ |2m-tau><..|)`.
    pub max_joint_deviation: T,
}

/// Runs the contraction-noise walk with the chosen coin for `tau >= 1` steps
/// and compares it with the classical binomial walk.
pub fn contraction_walk_check<T: Real>(
    p_plus: T,
    coin: ClassicalCoin,
    tau: usize,
) -> Result<ContractionCheck<T>> {
    if tau == 0 {
        return Err(Error::ParameterOutOfRange {
            name: "tau",
            value: 0.0,
            range: "tau >= 1",
        });
    }
    let noise = NoiseChannel::contraction(p_plus)?;
    let u = match coin {
        ClassicalCoin::Identity => CoinOperator::identity(),
        ClassicalCoin::PauliZ => CoinOperator::pauli_z(),
    };
    let state = evolve_noisy(
        &u,
        &CoinState::plus(),
        &noise,
        &Topology::line(tau),
        tau,
        None,
    )?;
    let marginal = position_marginal(&state);
    let reference = binomial_distribution(p_plus, tau);
    let max_diagonal_deviation = marginal
        .distribution
        .probs()
        .iter()
        .zip(reference.probs())
        .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).abs()));
    let max_offdiagonal = max_offdiagonal(&marginal.rho);

    let p = tau + 1;
    let mut expected = CMatrix::<T>::zeros((2 * p, 2 * p));
    let prev = binomial_distribution(p_plus, tau - 1);
    let p_minus = T::one() - p_plus;
    for (m, &w) in prev.probs().iter().enumerate() {
        // 2m - tau + 2 is index m + 1, 2m - tau is index m.
        expected[(m + 1, m + 1)] += creal(w * p_plus);
        expected[(p + m, p + m)] += creal(w * p_minus);
    }
    let max_joint_deviation = crate::linalg::max_abs_diff(state.rho(), &expected);
    Ok(ContractionCheck {
        state,
        max_offdiagonal,
        max_diagonal_deviation,
        max_joint_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn binomial_examples() {
        let d = binomial_distribution(0.5f64, 2);
        assert_eq!(d.support(), &[-2, 0, 2]);
        for (got, want) in d.probs().iter().zip([0.25, 0.5, 0.25]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
        let d = binomial_distribution(1.0f64, 5);
        assert_eq!(d.prob(5), 1.0);
        assert_eq!(d.prob(3), 0.0);
        let d = binomial_distribution(0.3f64, 4);
        assert_abs_diff_eq!(d.prob(0), 6.0 * 0.09 * 0.49, epsilon = 1e-15);
        assert_abs_diff_eq!(d.prob(0), 0.2646, epsilon = 1e-12);
    }

    #[test]
    fn binomial_survives_large_tau() {
        let d = binomial_distribution(0.37f64, 2000);
        assert_abs_diff_eq!(d.total(), 1.0, epsilon = 1e-10);
        let (m, v) = d.mean_variance();
        assert_abs_diff_eq!(m, 2000.0 * (2.0 * 0.37 - 1.0), epsilon = 1e-8);
        assert_abs_diff_eq!(v, 4.0 * 2000.0 * 0.37 * 0.63, epsilon = 1e-7);
    }

    #[test]
    fn density_operator_is_diagonal() {
        let d = PositionDistribution::new(vec![-1, 1], vec![0.5, 0.5]).unwrap();
        let m = classical_density_operator(&d);
        assert_eq!(m[(0, 0)], creal(0.5));
        assert_eq!(m[(1, 1)], creal(0.5));
        assert_eq!(m[(0, 1)], creal(0.0));
        assert_eq!(
            classical_density_operator(&PositionDistribution::<f64>::point_mass(0))[(0, 0)],
            creal(1.0)
        );
    }

    #[test]
    fn loop_walk_examples() {
        let spec = LoopSpec::new(5, 2, 0.0).unwrap();
        let d = classical_loop_distribution(0.4f64, &spec, 50, 1).unwrap();
        assert_eq!(d.prob(6), 0.0);

        let spec = LoopSpec::new(3, 1, 1.0).unwrap();
        let d = classical_loop_distribution(1.0f64, &spec, 1, 3).unwrap();
        assert_eq!(d.prob(4), 1.0);

        for r in [0.0, 0.3, 1.0] {
            let spec = LoopSpec::new(6, 4, r).unwrap();
            let t = loop_transition_matrix(0.35f64, &spec);
            for from in 0..7 {
                let col: f64 = (0..7).map(|to| t[to][from]).sum();
                assert_eq!(col, 1.0);
            }
        }
    }

    #[test]
    fn loop_trajectory_matches_transition_matrix() {
        let spec = LoopSpec::new(7, 3, 0.4).unwrap();
        let t = loop_transition_matrix(0.7f64, &spec);
        let traj = classical_loop_trajectory(0.7, &spec, 20, 5).unwrap();
        let mut v = vec![0.0; 8];
        v[4] = 1.0;
        for step in traj.iter().skip(1) {
            v = (0..8)
                .map(|to| (0..8).map(|from| t[to][from] * v[from]).sum())
                .collect();
            for (a, b) in v.iter().zip(step) {
                assert_abs_diff_eq!(*a, *b, epsilon = 1e-14);
            }
            assert_abs_diff_eq!(step.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn gaussian_examples() {
        let g = gaussian_reference(0.0f64, 400).unwrap();
        let (m, v) = g.mean_variance();
        assert_abs_diff_eq!(m, 0.0, epsilon = 1e-9);
        assert!((v / 400.0 - 1.0).abs() < 0.01);
        let g = gaussian_reference(7.0f64, 7).unwrap();
        assert_eq!(g.prob(7), 1.0);
        assert!(matches!(
            gaussian_reference(8.0f64, 7),
            Err(Error::MeanOutOfRange { .. })
        ));
    }

    #[test]
    fn contraction_walk_is_classical() {
        let c = contraction_walk_check(0.5f64, ClassicalCoin::Identity, 5).unwrap();
        assert!(c.max_offdiagonal < 1e-12);
        assert!(c.max_diagonal_deviation < 1e-12);
        assert!(c.max_joint_deviation < 1e-12);

        let c = contraction_walk_check(1.0f64, ClassicalCoin::Identity, 3).unwrap();
        let d = position_marginal(&c.state).distribution;
        assert_abs_diff_eq!(d.prob(3), 1.0, epsilon = 1e-15);

        let a = contraction_walk_check(0.3f64, ClassicalCoin::Identity, 6).unwrap();
        let b = contraction_walk_check(0.3f64, ClassicalCoin::PauliZ, 6).unwrap();
        let da = position_marginal(&a.state).distribution;
        let db = position_marginal(&b.state).distribution;
        for (x, y) in da.probs().iter().zip(db.probs()) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
