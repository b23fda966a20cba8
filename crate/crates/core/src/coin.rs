//! Coin states and coin unitaries.
//!
//! Basis convention everywhere: index 0 is `|+>` (right mover), index 1 is
//! `|->` (left mover).

use crate::error::{Error, Result};
use crate::linalg::{
    adjoint, cplx, creal, hermitian_eigenvalues, hermiticity_defect, identity, trace, CMatrix,
    CVector,
};
use crate::scalar::{Real, Tolerances};

/// Where a coin operator came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoinKind<T> {
    Parameterized { alpha: T, beta: T, theta: T },
    Hadamard,
    Identity,
    PauliZ,
    Custom,
}

/// Input to [`make_coin_operator`].
#[derive(Debug, Clone, PartialEq)]
pub enum CoinSpec<T> {
    /// `[[e^{ia} cos t, e^{-ib} sin t], [e^{ib} sin t, -e^{-ia} cos t]]`, `0 <= t <= pi/2`.
    Parameterized {
        alpha: T,
        beta: T,
        theta: T,
    },
    Hadamard,
    Identity,
    PauliZ,
    Raw(CMatrix<T>),
}

/// A validated 2x2 unitary acting on the coin.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinOperator<T> {
    matrix: CMatrix<T>,
    kind: CoinKind<T>,
}

impl<T: Real> CoinOperator<T> {
    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn kind(&self) -> CoinKind<T> {
        self.kind
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> num_complex::Complex<T> {
        self.matrix[(i, j)]
    }

    pub fn hadamard() -> Self {
        make_coin_operator(CoinSpec::Hadamard).expect("hadamard is unitary")
    }

    pub fn identity() -> Self {
        make_coin_operator(CoinSpec::Identity).expect("identity is unitary")
    }

    pub fn pauli_z() -> Self {
        make_coin_operator(CoinSpec::PauliZ).expect("pauli-z is unitary")
    }

    pub fn parameterized(alpha: T, beta: T, theta: T) -> Result<Self> {
        make_coin_operator(CoinSpec::Parameterized { alpha, beta, theta })
    }
}

fn parameterized_matrix<T: Real>(alpha: T, beta: T, theta: T) -> CMatrix<T> {
    let (s, c) = theta.sin_cos();
    let ea = cplx(alpha.cos(), alpha.sin());
    let eb = cplx(beta.cos(), beta.sin());
    let mut u = CMatrix::zeros((2, 2));
    u[(0, 0)] = ea * c;
    u[(0, 1)] = eb.conj() * s;
    u[(1, 0)] = eb * s;
    u[(1, 1)] = -(ea.conj() * c);
    u
}

/// Largest entry of `|U^dagger U - I|`.
pub fn unitarity_defect<T: Real>(u: &CMatrix<T>) -> T {
    let n = u.nrows();
    let g = adjoint(u).dot(u);
    let id = identity::<T>(n);
    crate::linalg::max_abs_diff(&g, &id)
}

pub fn make_coin_operator<T: Real>(spec: CoinSpec<T>) -> Result<CoinOperator<T>> {
    make_coin_operator_with(spec, &T::tolerances())
}

pub fn make_coin_operator_with<T: Real>(
    spec: CoinSpec<T>,
    tol: &Tolerances<T>,
) -> Result<CoinOperator<T>> {
    let (matrix, kind) = match spec {
        CoinSpec::Parameterized { alpha, beta, theta } => {
            if !(theta >= T::zero() && theta <= T::FRAC_PI_2()) {
                return Err(Error::ParameterOutOfRange {
                    name: "theta",
                    value: theta.to_f64().unwrap_or(f64::NAN),
                    range: "[0, pi/2]",
                });
            }
            (
                parameterized_matrix(alpha, beta, theta),
                CoinKind::Parameterized { alpha, beta, theta },
            )
        }
        CoinSpec::Hadamard => (
            parameterized_matrix(T::zero(), T::zero(), T::FRAC_PI_4()),
            CoinKind::Hadamard,
        ),
        CoinSpec::Identity => (identity(2), CoinKind::Identity),
        CoinSpec::PauliZ => (
            parameterized_matrix(T::zero(), T::zero(), T::zero()),
            CoinKind::PauliZ,
        ),
        CoinSpec::Raw(m) => {
            if m.dim() != (2, 2) {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    got: m.nrows().max(m.ncols()),
                });
            }
            (m, CoinKind::Custom)
        }
    };
    let defect = unitarity_defect(&matrix);
    if !(defect <= tol.unitarity) {
        return Err(Error::NonUnitary(defect.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(CoinOperator { matrix, kind })
}

/// Initial state of the coin.
#[derive(Debug, Clone, PartialEq)]
pub enum CoinState<T> {
    /// `cos(eta)|+> + e^{i gamma} sin(eta)|->`.
    Pure { eta: T, gamma: T },
    /// 2x2 density matrix in the `{|+>, |->}` basis.
    Density(CMatrix<T>),
}

impl<T: Real> CoinState<T> {
    pub fn plus() -> Self {
        CoinState::Pure {
            eta: T::zero(),
            gamma: T::zero(),
        }
    }

    pub fn minus() -> Self {
        CoinState::Pure {
            eta: T::FRAC_PI_2(),
            gamma: T::zero(),
        }
    }

    /// `(|+> + e^{i gamma}|->)/sqrt(2)`.
    pub fn balanced(gamma: T) -> Self {
        CoinState::Pure {
            eta: T::FRAC_PI_4(),
            gamma,
        }
    }

    /// State vector, or `None` for the density form.
    pub fn amplitudes(&self) -> Option<CVector<T>> {
        match self {
            CoinState::Pure { eta, gamma } => {
                let (s, c) = eta.sin_cos();
                Some(CVector::from(vec![
                    creal(c),
                    cplx(gamma.cos(), gamma.sin()) * s,
                ]))
            }
            CoinState::Density(_) => None,
        }
    }
}

/// Density matrix of a coin state, validated (Hermitian, unit trace, PSD).
pub fn coin_state_density<T: Real>(s: &CoinState<T>) -> Result<CMatrix<T>> {
    match s {
        CoinState::Pure { .. } => {
            let v = s.amplitudes().unwrap();
            Ok(CMatrix::from_shape_fn((2, 2), |(i, j)| v[i] * v[j].conj()))
        }
        CoinState::Density(m) => {
            let tol = T::tolerances();
            validate_density(m, tol.unitarity, tol.unitarity)?;
            Ok(m.clone())
        }
    }
}

/// Checks Hermiticity and trace against `tol_state` and the smallest eigenvalue
/// against `-tol_psd`. Returns the ascending spectrum.
pub(crate) fn validate_density<T: Real>(
    m: &CMatrix<T>,
    tol_state: T,
    tol_psd: T,
) -> Result<Vec<T>> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidDensity(format!("not square: {:?}", m.dim())));
    }
    let herm = hermiticity_defect(m);
    if !(herm <= tol_state) {
        return Err(Error::InvalidDensity(format!(
            "not Hermitian (defect {herm:e})"
        )));
    }
    let tr = trace(m);
    if !((tr.re - T::one()).abs() <= tol_state && tr.im.abs() <= tol_state) {
        return Err(Error::InvalidDensity(format!(
            "trace {} + {}i",
            tr.re, tr.im
        )));
    }
    let ev = hermitian_eigenvalues(m);
    if let Some(&min) = ev.first() {
        if min < -tol_psd {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {min:e}"
            )));
        }
    }
    Ok(ev)
}
