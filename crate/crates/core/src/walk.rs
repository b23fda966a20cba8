//! Coin–walker evolution.
//!
//! One step is the coin unitary followed by the coin-conditioned shift
//! `E = |+><+| ⊗ M+ + |-><-| ⊗ M-`. Unitary walks on the line are evolved as a
//! pair of amplitude vectors; noisy walks (and every loop walk) as a dense
//! joint density matrix in coin-major layout: index `coin * P + i` where `P` is
//! the register size.

use num_complex::Complex;

use crate::channel::{NoiseChannel, SinkChannel};
use crate::coin::{coin_state_density, validate_density, CoinOperator, CoinState};
use crate::distribution::PositionDistribution;
use crate::error::{Error, Result};
use crate::linalg::{creal, hermiticity_defect, trace, CMatrix, CVector};
use crate::scalar::Real;
use crate::topology::{Register, Topology};

/// Amplitudes `(Psi+, Psi-)` of a unitary line walk; `|Psi> = |+>|Psi+> + |->|Psi->`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureWalkState<T> {
    tau: usize,
    psi_plus: CVector<T>,
    psi_minus: CVector<T>,
}

impl<T: Real> PureWalkState<T> {
    /// Walker at the origin with the given coin amplitudes.
    pub fn at_origin(coin: &CoinState<T>) -> Result<Self> {
        let v = coin.amplitudes().ok_or(Error::NonPureCoin)?;
        Ok(Self {
            tau: 0,
            psi_plus: CVector::from(vec![v[0]]),
            psi_minus: CVector::from(vec![v[1]]),
        })
    }

    pub(crate) fn from_parts(tau: usize, psi_plus: CVector<T>, psi_minus: CVector<T>) -> Self {
        debug_assert_eq!(psi_plus.len(), tau + 1);
        debug_assert_eq!(psi_minus.len(), tau + 1);
        Self {
            tau,
            psi_plus,
            psi_minus,
        }
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn register(&self) -> Register {
        Register::Line { tau: self.tau }
    }

    /// Positions `{-tau, -tau + 2, ..., tau}` indexing both amplitude vectors.
    pub fn positions(&self) -> Vec<i64> {
        self.register().positions()
    }

    pub fn psi_plus(&self) -> &CVector<T> {
        &self.psi_plus
    }

    pub fn psi_minus(&self) -> &CVector<T> {
        &self.psi_minus
    }

    /// Amplitude `<coin, x|Psi>`; zero off the support.
    pub fn amplitude(&self, coin: usize, x: i64) -> Complex<T> {
        match self.register().index_of(x) {
            Some(i) if coin == 0 => self.psi_plus[i],
            Some(i) => self.psi_minus[i],
            None => creal(T::zero()),
        }
    }

    /// `<Psi+|Psi+> + <Psi-|Psi->`.
    pub fn norm_sqr(&self) -> T {
        self.psi_plus
            .iter()
            .chain(self.psi_minus.iter())
            .map(|z| z.norm_sqr())
            .sum()
    }

    /// One unitary step in place.
    pub fn step(&mut self, coin: &CoinOperator<T>) {
        let u = coin.matrix();
        let n = self.tau + 1;
        let zero = creal(T::zero());
        let mut plus = CVector::from_elem(n + 1, zero);
        let mut minus = CVector::from_elem(n + 1, zero);
        for i in 0..n {
            let a = self.psi_plus[i];
            let b = self.psi_minus[i];
            plus[i + 1] = u[(0, 0)] * a + u[(0, 1)] * b;
            minus[i] = u[(1, 0)] * a + u[(1, 1)] * b;
        }
        self.psi_plus = plus;
        self.psi_minus = minus;
        self.tau += 1;
    }
}

/// Joint coin–walker density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState<T> {
    tau: usize,
    register: Register,
    topology: Topology<T>,
    rho: CMatrix<T>,
}

impl<T: Real> JointState<T> {
    /// `rho_coin ⊗ |x0><x0|`; `start` is the position on the line (must be 0)
    /// or the loop site label.
    pub fn initial(coin: &CoinState<T>, topology: Topology<T>, start: i64) -> Result<Self> {
        let coin_rho = coin_state_density(coin)?;
        let register = match topology {
            Topology::Line { .. } => {
                if start != 0 {
                    return Err(Error::UnsupportedTopology(
                        "line walks start at the origin".into(),
                    ));
                }
                Register::Line { tau: 0 }
            }
            Topology::Loop(spec) => {
                spec.check_site(usize::try_from(start).unwrap_or(0))?;
                Register::Loop { n: spec.n() }
            }
        };
        let p = register.len();
        let x0 = register.index_of(start).expect("start checked above");
        let mut rho = CMatrix::zeros((2 * p, 2 * p));
        for a in 0..2 {
            for b in 0..2 {
                rho[(a * p + x0, b * p + x0)] = coin_rho[(a, b)];
            }
        }
        Ok(Self {
            tau: 0,
            register,
            topology,
            rho,
        })
    }

    /// `|Psi><Psi|` of a pure line walk.
    pub fn from_pure(state: &PureWalkState<T>) -> Self {
        let p = state.tau + 1;
        let v: Vec<Complex<T>> = state
            .psi_plus
            .iter()
            .chain(state.psi_minus.iter())
            .copied()
            .collect();
        let rho = CMatrix::from_shape_fn((2 * p, 2 * p), |(i, j)| v[i] * v[j].conj());
        Self {
            tau: state.tau,
            register: state.register(),
            topology: Topology::Line {
                max_steps: state.tau,
            },
            rho,
        }
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn register(&self) -> Register {
        self.register
    }

    pub fn topology(&self) -> &Topology<T> {
        &self.topology
    }

    pub fn rho(&self) -> &CMatrix<T> {
        &self.rho
    }

    pub fn positions(&self) -> Vec<i64> {
        self.register.positions()
    }

    pub fn trace(&self) -> Complex<T> {
        trace(&self.rho)
    }

    /// Hermiticity, unit trace and positivity within the state tolerances.
    pub fn validate(&self) -> Result<()> {
        let tol = T::tolerances();
        validate_density(&self.rho, tol.state, tol.psd).map(|_| ())
    }

    /// Population of the given position (summed over the coin).
    pub fn population(&self, x: i64) -> T {
        let p = self.register.len();
        match self.register.index_of(x) {
            Some(i) => self.rho[(i, i)].re + self.rho[(p + i, p + i)].re,
            None => T::zero(),
        }
    }
}

/// Dense single-step unitary `W = E (U ⊗ I)` over an explicit position basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseStep<T> {
    /// Position basis, coin-major: index `coin * positions.len() + i`.
    pub positions: Vec<i64>,
    pub matrix: CMatrix<T>,
}

/// Builds `W` as a dense matrix.
///
/// On a loop the basis is `1..=n + 1`. On the line the basis is
/// `-max_steps..=max_steps`; moves past either end are closed into a ring so
/// that the matrix stays unitary, which is invisible to any state evolved at
/// most `max_steps` steps from the origin.
pub fn step_operator<T: Real>(
    coin: &CoinOperator<T>,
    topology: &Topology<T>,
) -> Result<DenseStep<T>> {
    let (positions, next): (Vec<i64>, Box<dyn Fn(usize, usize) -> usize>) = match *topology {
        Topology::Line { max_steps } => {
            if max_steps == 0 {
                return Err(Error::UnsupportedTopology(
                    "line with no room for a step".into(),
                ));
            }
            let l = max_steps as i64;
            let m = 2 * max_steps + 1;
            (
                (-l..=l).collect(),
                Box::new(move |c, i| if c == 0 { (i + 1) % m } else { (i + m - 1) % m }),
            )
        }
        Topology::Loop(spec) => {
            let reg = Register::Loop { n: spec.n() };
            (reg.positions(), Box::new(move |c, i| reg.shift_index(c, i)))
        }
    };
    let p = positions.len();
    let u = coin.matrix();
    let mut w = CMatrix::zeros((2 * p, 2 * p));
    for c_in in 0..2 {
        for i in 0..p {
            for c_out in 0..2 {
                let j = next(c_out, i);
                w[(c_out * p + j, c_in * p + i)] = u[(c_out, c_in)];
            }
        }
    }
    Ok(DenseStep {
        positions,
        matrix: w,
    })
}

/// Unitary line walk from the origin.
pub fn evolve_pure<T: Real>(
    coin: &CoinOperator<T>,
    initial: &CoinState<T>,
    topology: &Topology<T>,
    tau: usize,
) -> Result<PureWalkState<T>> {
    match *topology {
        Topology::Line { max_steps } if tau <= max_steps => {}
        Topology::Line { max_steps } => {
            return Err(Error::UnsupportedTopology(format!(
                "{tau} steps exceed max_steps = {max_steps}"
            )))
        }
        Topology::Loop(_) => {
            return Err(Error::UnsupportedTopology(
                "pure evolution is line-only".into(),
            ))
        }
    }
    let mut state = PureWalkState::at_origin(initial)?;
    for _ in 0..tau {
        state.step(coin);
    }
    Ok(state)
}

/// A noisy walk step `E (U N ⊗ I)` optionally followed by the sink.
#[derive(Debug, Clone)]
pub struct NoisyWalk<T> {
    /// `M[a][b][c][d] = sum_k (U K_k)[a][c] conj((U K_k)[b][d])`.
    transfer: [[[[Complex<T>; 2]; 2]; 2]; 2],
    sink: Option<SinkChannel<T>>,
}

impl<T: Real> NoisyWalk<T> {
    pub fn new(
        coin: &CoinOperator<T>,
        noise: &NoiseChannel<T>,
        sink: Option<SinkChannel<T>>,
    ) -> Result<Self> {
        let defect = crate::channel::completeness_defect(noise.kraus());
        if !(defect <= T::tolerances().unitarity) {
            return Err(Error::IncompleteKraus(defect.to_f64().unwrap_or(f64::NAN)));
        }
        let zero = creal(T::zero());
        let mut transfer = [[[[zero; 2]; 2]; 2]; 2];
        for k in noise.kraus() {
            let a_k = coin.matrix().dot(k);
            for a in 0..2 {
                for b in 0..2 {
                    for c in 0..2 {
                        for d in 0..2 {
                            transfer[a][b][c][d] += a_k[(a, c)] * a_k[(b, d)].conj();
                        }
                    }
                }
            }
        }
        Ok(Self { transfer, sink })
    }

    /// Advances `state` by one step.
    pub fn step(&self, state: &mut JointState<T>) -> Result<()> {
        let reg = state.register;
        if let Topology::Line { max_steps } = state.topology {
            if state.tau >= max_steps {
                return Err(Error::UnsupportedTopology(format!(
                    "line support exhausted at tau = {max_steps}"
                )));
            }
        }
        if let (Some(sink), Topology::Loop(spec)) = (&self.sink, &state.topology) {
            if sink.spec().n() != spec.n() {
                return Err(Error::DimensionMismatch {
                    expected: spec.n() + 1,
                    got: sink.spec().n() + 1,
                });
            }
        }
        let p = reg.len();
        if state.rho.nrows() != 2 * p {
            return Err(Error::DimensionMismatch {
                expected: 2 * p,
                got: state.rho.nrows(),
            });
        }
        let next = reg.advanced();
        let q = next.len();
        let zero = creal(T::zero());
        let mut out = CMatrix::from_elem((2 * q, 2 * q), zero);
        let shift: [Vec<usize>; 2] = [
            (0..p).map(|i| reg.shift_index(0, i)).collect(),
            (0..p).map(|i| reg.shift_index(1, i)).collect(),
        ];
        let rho = &state.rho;
        for a in 0..2 {
            for b in 0..2 {
                let m = &self.transfer[a][b];
                for i in 0..p {
                    let row = a * q + shift[a][i];
                    for j in 0..p {
                        let mut acc = zero;
                        for c in 0..2 {
                            for d in 0..2 {
                                let coef = m[c][d];
                                if coef != zero {
                                    acc += coef * rho[(c * p + i, d * p + j)];
                                }
                            }
                        }
                        out[(row, b * q + shift[b][j])] = acc;
                    }
                }
            }
        }
        if let Some(sink) = &self.sink {
            if matches!(next, Register::Loop { .. }) {
                sink.apply(&mut out);
            }
        }
        state.rho = out;
        state.register = next;
        state.tau += 1;
        Ok(())
    }

    /// Runs `steps` steps, checking Hermiticity and trace at the end.
    pub fn run(&self, mut state: JointState<T>, steps: usize) -> Result<JointState<T>> {
        for _ in 0..steps {
            self.step(&mut state)?;
        }
        check_cheap_invariants(&state)?;
        Ok(state)
    }
}

fn check_cheap_invariants<T: Real>(state: &JointState<T>) -> Result<()> {
    let tol = T::tolerances().state;
    let h = hermiticity_defect(&state.rho);
    if !(h <= tol) {
        return Err(Error::InvalidDensity(format!(
            "joint state not Hermitian (defect {h:e})"
        )));
    }
    let tr = state.trace();
    if !((tr.re - T::one()).abs() <= tol) {
        return Err(Error::InvalidDensity(format!(
            "joint state trace {}",
            tr.re
        )));
    }
    Ok(())
}

/// Noisy evolution for `tau` steps from the default start (origin on the
/// line, site 1 on a loop). The sink, if given, acts after every full step.
pub fn evolve_noisy<T: Real>(
    coin: &CoinOperator<T>,
    initial: &CoinState<T>,
    noise: &NoiseChannel<T>,
    topology: &Topology<T>,
    tau: usize,
    sink: Option<SinkChannel<T>>,
) -> Result<JointState<T>> {
    let start = match topology {
        Topology::Line { .. } => 0,
        Topology::Loop(_) => 1,
    };
    evolve_noisy_from(coin, initial, noise, topology, start, tau, sink)
}

/// As [`evolve_noisy`] with an explicit start position.
pub fn evolve_noisy_from<T: Real>(
    coin: &CoinOperator<T>,
    initial: &CoinState<T>,
    noise: &NoiseChannel<T>,
    topology: &Topology<T>,
    start: i64,
    tau: usize,
    sink: Option<SinkChannel<T>>,
) -> Result<JointState<T>> {
    let walk = NoisyWalk::new(coin, noise, sink)?;
    let state = JointState::initial(initial, *topology, start)?;
    walk.run(state, tau)
}

/// Walker-only state: distribution and reduced density matrix `Tr_coin rho`.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginal<T> {
    pub distribution: PositionDistribution<T>,
    pub rho: CMatrix<T>,
}

fn diagonal_distribution<T: Real>(
    positions: Vec<i64>,
    rho: &CMatrix<T>,
) -> PositionDistribution<T> {
    let probs = (0..rho.nrows())
        .map(|i| rho[(i, i)].re.max(T::zero()))
        .collect();
    PositionDistribution::from_parts(positions, probs)
}

/// Anything that can be reduced to the walker's state.
pub trait WalkerState<T: Real> {
    fn marginal(&self) -> Marginal<T>;
}

impl<T: Real> WalkerState<T> for JointState<T> {
    fn marginal(&self) -> Marginal<T> {
        let p = self.register.len();
        let rho =
            CMatrix::from_shape_fn((p, p), |(i, j)| self.rho[(i, j)] + self.rho[(p + i, p + j)]);
        Marginal {
            distribution: diagonal_distribution(self.positions(), &rho),
            rho,
        }
    }
}

impl<T: Real> WalkerState<T> for PureWalkState<T> {
    fn marginal(&self) -> Marginal<T> {
        let p = self.tau + 1;
        let (a, b) = (&self.psi_plus, &self.psi_minus);
        let rho = CMatrix::from_shape_fn((p, p), |(i, j)| a[i] * a[j].conj() + b[i] * b[j].conj());
        Marginal {
            distribution: diagonal_distribution(self.positions(), &rho),
            rho,
        }
    }
}

/// `Tr_coin` of the state together with its diagonal.
pub fn position_marginal<T: Real, S: WalkerState<T>>(state: &S) -> Marginal<T> {
    state.marginal()
}

/// `(mean, variance)` of a position distribution.
pub fn variance<T: Real>(d: &PositionDistribution<T>) -> (T, T) {
    d.mean_variance()
}
