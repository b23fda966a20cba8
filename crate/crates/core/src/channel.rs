//! Coin noise channels and the loop sink channel.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{adjoint, cplx, creal, identity, max_abs_diff, CMatrix};
use crate::scalar::Real;
use crate::topology::LoopSpec;

/// A CPTP map on the coin given by its Kraus operators.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseChannel<T> {
    kraus: Vec<CMatrix<T>>,
}

/// Channels available by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelKind {
    /// No noise.
    Identity,
    /// Resets the coin to `p|+><+| + (1 - p)|-><-|`; parameter is `p`.
    Contraction,
    /// Dephasing in the coin basis with strength `q`.
    UnitalDecay,
    /// Decay of `|->` into `|+>` with probability `gamma`.
    AmplitudeDamping,
    /// `rho -> (1 - p) rho + p I/2`.
    Depolarizing,
}

impl ChannelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ChannelKind::Identity => "identity",
            ChannelKind::Contraction => "contraction",
            ChannelKind::UnitalDecay => "unital-decay",
            ChannelKind::AmplitudeDamping => "amplitude-damping",
            ChannelKind::Depolarizing => "depolarizing",
        }
    }

    pub const ALL: [ChannelKind; 5] = [
        ChannelKind::Identity,
        ChannelKind::Contraction,
        ChannelKind::UnitalDecay,
        ChannelKind::AmplitudeDamping,
        ChannelKind::Depolarizing,
    ];
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChannelKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        ChannelKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown channel `{s}`"))
    }
}

fn check_probability<T: Real>(name: &'static str, p: T) -> Result<()> {
    if p >= T::zero() && p <= T::one() {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange {
            name,
            value: p.to_f64().unwrap_or(f64::NAN),
            range: "[0, 1]",
        })
    }
}

fn mat2<T: Real>(a: [[(T, T); 2]; 2]) -> CMatrix<T> {
    CMatrix::from_shape_fn((2, 2), |(i, j)| cplx(a[i][j].0, a[i][j].1))
}

/// `ket_i bra_j` scaled by `s`.
fn outer<T: Real>(i: usize, j: usize, s: T) -> CMatrix<T> {
    let mut m = CMatrix::zeros((2, 2));
    m[(i, j)] = creal(s);
    m
}

impl<T: Real> NoiseChannel<T> {
    /// Validates completeness `sum K^dagger K = I`.
    pub fn new(kraus: Vec<CMatrix<T>>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::IncompleteKraus(1.0));
        }
        if let Some(k) = kraus.iter().find(|k| k.dim() != (2, 2)) {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: k.nrows().max(k.ncols()),
            });
        }
        let defect = completeness_defect(&kraus);
        if !(defect <= T::tolerances().unitarity) {
            return Err(Error::IncompleteKraus(defect.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { kraus })
    }

    pub fn kraus(&self) -> &[CMatrix<T>] {
        &self.kraus
    }

    pub fn identity() -> Self {
        Self {
            kraus: vec![identity(2)],
        }
    }

    pub fn contraction(p_plus: T) -> Result<Self> {
        check_probability("p_plus", p_plus)?;
        let a = p_plus.sqrt();
        let b = (T::one() - p_plus).sqrt();
        Self::new(vec![
            outer(0, 0, a),
            outer(0, 1, a),
            outer(1, 0, b),
            outer(1, 1, b),
        ])
    }

    pub fn unital_decay(q: T) -> Result<Self> {
        check_probability("q", q)?;
        let a = q.sqrt();
        let mut k3 = identity(2);
        k3.mapv_inplace(|z| z * (T::one() - q).sqrt());
        Self::new(vec![outer(0, 0, a), outer(1, 1, a), k3])
    }

    pub fn amplitude_damping(gamma: T) -> Result<Self> {
        check_probability("gamma", gamma)?;
        let mut k0 = identity(2);
        k0[(1, 1)] = creal((T::one() - gamma).sqrt());
        Self::new(vec![k0, outer(0, 1, gamma.sqrt())])
    }

    pub fn depolarizing(p: T) -> Result<Self> {
        check_probability("p", p)?;
        let quarter = T::lit(0.25);
        let z = T::zero();
        let c0 = (T::one() - T::lit(3.0) * p * quarter).sqrt();
        let c = (p * quarter).sqrt();
        let mut k0 = identity(2);
        k0.mapv_inplace(|v| v * c0);
        let x = mat2([[(z, z), (c, z)], [(c, z), (z, z)]]);
        let y = mat2([[(z, z), (z, -c)], [(z, c), (z, z)]]);
        let zz = mat2([[(c, z), (z, z)], [(z, z), (-c, z)]]);
        Self::new(vec![k0, x, y, zz])
    }

    /// Channel by kind; `param` is ignored for the identity channel.
    pub fn builtin(kind: ChannelKind, param: T) -> Result<Self> {
        match kind {
            ChannelKind::Identity => Ok(Self::identity()),
            ChannelKind::Contraction => Self::contraction(param),
            ChannelKind::UnitalDecay => Self::unital_decay(param),
            ChannelKind::AmplitudeDamping => Self::amplitude_damping(param),
            ChannelKind::Depolarizing => Self::depolarizing(param),
        }
    }

    /// Action on a 2x2 coin density matrix.
    pub fn apply(&self, rho: &CMatrix<T>) -> CMatrix<T> {
        let mut out = CMatrix::zeros((2, 2));
        for k in &self.kraus {
            out = out + k.dot(rho).dot(&adjoint(k));
        }
        out
    }
}

/// Named channel lookup.
pub fn builtin_channel<T: Real>(name: &str, param: T) -> Result<NoiseChannel<T>> {
    let kind: ChannelKind = name.parse().map_err(|_| Error::ParameterOutOfRange {
        name: "channel",
        value: f64::NAN,
        range: "identity | contraction | unital-decay | amplitude-damping | depolarizing",
    })?;
    NoiseChannel::builtin(kind, param)
}

pub(crate) fn completeness_defect<T: Real>(kraus: &[CMatrix<T>]) -> T {
    let n = kraus[0].nrows();
    let mut sum = CMatrix::zeros((n, n));
    for k in kraus {
        sum = sum + adjoint(k).dot(k);
    }
    max_abs_diff(&sum, &identity(n))
}

/// The sink acting on coin ⊗ position of a loop:
/// `K1 = I ⊗ (sum_{x != k} |x><x| + sqrt(1 - r)|k><k|)`, `K2 = I ⊗ sqrt(r)|n+1><k|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinkChannel<T> {
    spec: LoopSpec<T>,
}

impl<T: Real> SinkChannel<T> {
    pub fn new(spec: LoopSpec<T>) -> Self {
        Self { spec }
    }

    pub fn spec(&self) -> &LoopSpec<T> {
        &self.spec
    }

    /// Applies the sink in place to a joint density matrix with coin-major
    /// layout over the loop register (`n + 1` positions per coin block).
    pub fn apply(&self, rho: &mut CMatrix<T>) {
        let p = self.spec.n() + 1;
        let k = self.spec.sink_site() - 1;
        let s = self.spec.n();
        let r = self.spec.leak();
        let keep = (T::one() - r).sqrt();
        let dim = rho.nrows();
        debug_assert_eq!(dim, 2 * p);
        // K2 part, read before K1 rescales row/column k.
        let mut absorbed = [[creal(T::zero()); 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                absorbed[a][b] = rho[(a * p + k, b * p + k)] * r;
            }
        }
        for a in 0..2 {
            let row = a * p + k;
            for j in 0..dim {
                rho[(row, j)] = rho[(row, j)] * keep;
                rho[(j, row)] = rho[(j, row)] * keep;
            }
        }
        for a in 0..2 {
            for b in 0..2 {
                rho[(a * p + s, b * p + s)] += absorbed[a][b];
            }
        }
    }

    /// Dense joint-space Kraus operators, in the same layout as [`SinkChannel::apply`].
    pub fn kraus_joint(&self) -> [CMatrix<T>; 2] {
        let p = self.spec.n() + 1;
        let k = self.spec.sink_site() - 1;
        let s = self.spec.n();
        let r = self.spec.leak();
        let mut k1 = identity::<T>(2 * p);
        let mut k2 = CMatrix::zeros((2 * p, 2 * p));
        for a in 0..2 {
            k1[(a * p + k, a * p + k)] = creal((T::one() - r).sqrt());
            k2[(a * p + s, a * p + k)] = creal(r.sqrt());
        }
        [k1, k2]
    }
}
