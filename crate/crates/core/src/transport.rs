//! Transport efficiency on the loop with a sink, and its link to quantumness.

use crate::channel::{NoiseChannel, SinkChannel};
use crate::classical::{classical_loop_trajectory, ClassicalFamily, ClassicalWalk};
use crate::coin::{CoinOperator, CoinState};
use crate::error::{Error, Result};
use crate::quantumness::total_quantumness;
use crate::scalar::Real;
use crate::topology::{LoopSpec, Topology};
use crate::walk::{position_marginal, JointState, NoisyWalk};

/// Everything needed to run a noisy quantum walk on the loop.
#[derive(Debug, Clone)]
pub struct TransportSetup<T> {
    pub coin: CoinOperator<T>,
    pub initial: CoinState<T>,
    pub spec: LoopSpec<T>,
    pub noise: NoiseChannel<T>,
    /// Loop site the walker starts on; the classical reference starts there too.
    pub start: usize,
}

impl<T: Real> TransportSetup<T> {
    /// Setup starting on site 1.
    pub fn new(
        coin: CoinOperator<T>,
        initial: CoinState<T>,
        spec: LoopSpec<T>,
        noise: NoiseChannel<T>,
    ) -> Self {
        Self {
            coin,
            initial,
            spec,
            noise,
            start: 1,
        }
    }

    pub fn with_start(mut self, start: usize) -> Self {
        self.start = start;
        self
    }

    fn family(&self) -> ClassicalFamily<T> {
        ClassicalFamily::Loop {
            spec: self.spec,
            start: self.start,
        }
    }

    /// Calls `visit(tau', state)` for `tau' = 1..=tau`.
    fn run<F: FnMut(usize, &JointState<T>) -> Result<()>>(
        &self,
        tau: usize,
        mut visit: F,
    ) -> Result<()> {
        self.spec.check_site(self.start)?;
        let walk = NoisyWalk::new(&self.coin, &self.noise, Some(SinkChannel::new(self.spec)))?;
        let mut state =
            JointState::initial(&self.initial, Topology::Loop(self.spec), self.start as i64)?;
        for t in 1..=tau {
            walk.step(&mut state)?;
            visit(t, &state)?;
        }
        Ok(())
    }
}

/// `eta_QW(tau')`, the sink population, for `tau' = 1..=tau`.
pub fn quantum_efficiency<T: Real>(setup: &TransportSetup<T>, tau: usize) -> Result<Vec<T>> {
    let sink = setup.spec.sink_label() as i64;
    let mut out = Vec::with_capacity(tau);
    setup.run(tau, |_, state| {
        out.push(state.population(sink));
        Ok(())
    })?;
    Ok(out)
}

/// `eta_RW(tau')` for `tau' = 1..=tau` of a classical walk on a loop.
pub fn classical_efficiency<T: Real>(
    walk: &ClassicalWalk<T>,
    tau: usize,
    start: usize,
) -> Result<Vec<T>> {
    let spec = walk
        .topology()
        .as_loop()
        .ok_or_else(|| Error::UnsupportedTopology("classical efficiency needs a loop".into()))?;
    let traj = classical_loop_trajectory(walk.p_plus(), spec, tau, start)?;
    Ok(traj.into_iter().skip(1).map(|v| v[spec.n()]).collect())
}

/// `u = (eta_RW - eta_QW) / ln 2 + eta_QW log2(eta_QW / eta_RW)` in bits,
/// with `0 log 0 = 0` and `+inf` when only `eta_RW` vanishes.
pub fn u_lower_bound<T: Real>(eta_qw: T, eta_rw: T) -> T {
    let first = (eta_rw - eta_qw) / T::LN_2();
    if eta_qw <= T::zero() {
        return first;
    }
    if eta_rw <= T::zero() {
        return T::infinity();
    }
    let u = first + eta_qw * (eta_qw / eta_rw).log2();
    // u >= 0 exactly; clear rounding residue only.
    if u < T::zero() && u > -T::lit(1e-12) {
        T::zero()
    } else {
        u
    }
}

/// How the classical walk used for `eta_RW` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassicalMode<T> {
    /// The bias that minimizes `Q` at each recorded time.
    Optimal,
    /// A fixed bias.
    Fixed(T),
}

impl<T: Real> std::fmt::Display for ClassicalMode<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClassicalMode::Optimal => write!(f, "optimal"),
            ClassicalMode::Fixed(p) => write!(f, "fixed:{p}"),
        }
    }
}

/// Efficiencies and quantumness at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPoint<T> {
    pub tau: usize,
    pub eta_qw: T,
    pub eta_rw: T,
    /// `|eta_QW - eta_RW|`.
    pub deviation: T,
    pub u_bound: T,
    pub q_value: T,
    pub coherence: T,
    pub total_q: T,
    /// Bias of the classical walk behind `eta_rw`.
    pub classical_p_plus: T,
    /// `total_q >= q_value >= u_bound >= 0` within the chain slack.
    pub chain_holds: bool,
    pub divergent_support: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransportResult<T> {
    pub mode: ClassicalMode<T>,
    pub points: Vec<TransportPoint<T>>,
}

impl<T: Real> TransportResult<T> {
    pub fn last(&self) -> Option<&TransportPoint<T>> {
        self.points.last()
    }
}

/// Slack allowed in the bound chain.
pub const CHAIN_SLACK: f64 = 1e-9;

fn chain_holds<T: Real>(total: T, q: T, u: T, check_u: bool) -> bool {
    let slack = T::lit(CHAIN_SLACK);
    let ge = |a: T, b: T| a.is_infinite() && a > T::zero() || a >= b - slack;
    ge(total, q) && (!check_u || (ge(q, u) && u >= -slack))
}

/// Runs the loop walk for `tau` steps and reports efficiencies, `u`, `Q` and
/// total quantumness every `record_every` steps and at `tau`.
///
/// In optimal mode the chain `total >= Q >= u >= 0` must hold at every
/// recorded point, otherwise an identity violation is returned. In fixed
/// mode `u` is not bounded by `Q` and only `total >= Q` is enforced.
pub fn transport_report<T: Real>(
    setup: &TransportSetup<T>,
    tau: usize,
    mode: ClassicalMode<T>,
    record_every: usize,
) -> Result<TransportResult<T>> {
    if let ClassicalMode::Fixed(p) = mode {
        ClassicalWalk::new(p, Topology::Loop(setup.spec))?;
    }
    let every = record_every.max(1);
    let family = setup.family();
    let sink = setup.spec.sink_label() as i64;
    let fixed_traj = match mode {
        ClassicalMode::Fixed(p) => {
            Some(classical_loop_trajectory(p, &setup.spec, tau, setup.start)?)
        }
        ClassicalMode::Optimal => None,
    };
    let mut points = Vec::new();
    setup.run(tau, |t, state| {
        if t % every != 0 && t != tau {
            return Ok(());
        }
        let marginal = position_marginal(state);
        let report = total_quantumness(&marginal, &family, t)?;
        let eta_qw = state.population(sink);
        let (eta_rw, classical_p_plus) = match (&fixed_traj, mode) {
            (Some(traj), ClassicalMode::Fixed(p)) => (traj[t][setup.spec.n()], p),
            _ => (report.reference_distribution.prob(sink), report.p_plus_star),
        };
        let u_bound = u_lower_bound(eta_qw, eta_rw);
        let optimal = matches!(mode, ClassicalMode::Optimal);
        let holds = chain_holds(report.total, report.q_value, u_bound, optimal);
        if !holds && report.q_value.is_finite() {
            let (lhs, rhs, what) = if report.total < report.q_value - T::lit(CHAIN_SLACK) {
                (report.total, report.q_value, "total quantumness >= Q")
            } else {
                (report.q_value, u_bound, "Q >= u >= 0")
            };
            return Err(Error::IdentityViolation {
                what,
                lhs: lhs.to_f64().unwrap_or(f64::NAN),
                rhs: rhs.to_f64().unwrap_or(f64::NAN),
                tol: CHAIN_SLACK,
            });
        }
        points.push(TransportPoint {
            tau: t,
            eta_qw,
            eta_rw,
            deviation: (eta_qw - eta_rw).abs(),
            u_bound,
            q_value: report.q_value,
            coherence: report.coherence,
            total_q: report.total,
            classical_p_plus,
            chain_holds: holds,
            divergent_support: report.divergent_support,
        });
        Ok(())
    })?;
    Ok(TransportResult { mode, points })
}

/// As [`transport_report`], recording only the final time.
pub fn transport_point<T: Real>(
    setup: &TransportSetup<T>,
    tau: usize,
    mode: ClassicalMode<T>,
) -> Result<TransportPoint<T>> {
    if tau == 0 {
        return Err(Error::ParameterOutOfRange {
            name: "tau",
            value: 0.0,
            range: "tau >= 1",
        });
    }
    let mut r = transport_report(setup, tau, mode, tau)?;
    Ok(r.points.pop().expect("final point is always recorded"))
}
