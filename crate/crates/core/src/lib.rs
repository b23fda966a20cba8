//! Quantumness of discrete-time quantum walks.
//!
//! Simulates coined quantum walks on a line or on a loop with an absorbing
//! sink, and measures how far they are from every classical random walk:
//!
//! - `Q`: the smallest KL divergence between the walker's position
//!   distribution and a classical random-walk distribution, with the
//!   minimizing coin bias available in closed form on the line;
//! - `C`: the relative entropy of coherence of the walker's reduced state;
//! - total quantumness, the smallest quantum relative entropy to a classical
//!   (diagonal) random-walk state, which equals `Q + C`.
//!
//! Everything is generic over the scalar type through [`Real`]; `f64`
//! aliases are provided at the crate root.

pub mod channel;
pub mod classical;
pub mod closed_form;
pub mod coin;
pub mod distribution;
pub mod entropy;
pub mod error;
pub mod linalg;
pub mod optimize;
pub mod quantumness;
pub mod scalar;
pub mod topology;
pub mod transport;
pub mod walk;

pub use channel::{builtin_channel, ChannelKind, NoiseChannel, SinkChannel};
pub use classical::{
    binomial_distribution, classical_density_operator, classical_loop_distribution,
    contraction_walk_check, gaussian_reference, ClassicalCoin, ClassicalFamily, ClassicalWalk,
    ContractionCheck,
};
pub use closed_form::{closed_form_state, hyp2f1_terminating, r_matrix, RMatrix};
pub use coin::{
    coin_state_density, make_coin_operator, CoinKind, CoinOperator, CoinSpec, CoinState,
};
pub use distribution::PositionDistribution;
pub use entropy::{kl_divergence, shannon_entropy, von_neumann_entropy};
pub use error::{Error, Result};
pub use quantumness::{
    asymptotic_p_star, bias_decomposition, coherence, gaussian_q_approx, l1_quantumness, numeric_q,
    optimal_p_plus, quantumness_q, total_quantumness, Decomposition, GaussianApprox, L1Report,
    QResult, QuantumnessReport,
};
pub use scalar::{Real, Tolerances};
pub use topology::{LoopSpec, Register, Topology};
pub use transport::{
    classical_efficiency, quantum_efficiency, transport_point, transport_report, u_lower_bound,
    ClassicalMode, TransportPoint, TransportResult, TransportSetup,
};
pub use walk::{
    evolve_noisy, evolve_noisy_from, evolve_pure, position_marginal, step_operator, variance,
    JointState, Marginal, NoisyWalk, PureWalkState, WalkerState,
};

pub type CoinOperator64 = CoinOperator<f64>;
pub type CoinState64 = CoinState<f64>;
pub type NoiseChannel64 = NoiseChannel<f64>;
pub type SinkChannel64 = SinkChannel<f64>;
pub type Topology64 = Topology<f64>;
pub type LoopSpec64 = LoopSpec<f64>;
pub type PositionDistribution64 = PositionDistribution<f64>;
pub type PureWalkState64 = PureWalkState<f64>;
pub type JointState64 = JointState<f64>;
pub type ClassicalFamily64 = ClassicalFamily<f64>;
pub type QuantumnessReport64 = QuantumnessReport<f64>;
pub type TransportSetup64 = TransportSetup<f64>;
pub type TransportResult64 = TransportResult<f64>;
