//! Dense complex matrices and the Hermitian eigenvalue solver.
//!
//! Matrices are `ndarray::Array2<Complex<T>>`. The eigenvalue routine reduces a
//! Hermitian matrix to real symmetric tridiagonal form with complex Householder
//! reflections, then runs implicit QL with Wilkinson-style shifts. Only
//! eigenvalues are produced; nothing in the crate needs eigenvectors.

use ndarray::{Array1, Array2};
use num_complex::Complex;

use crate::scalar::Real;

/// Dense complex matrix.
pub type CMatrix<T> = Array2<Complex<T>>;
/// Dense complex vector.
pub type CVector<T> = Array1<Complex<T>>;

#[inline]
pub fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub fn creal<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

pub fn identity<T: Real>(n: usize) -> CMatrix<T> {
    let mut m = CMatrix::zeros((n, n));
    for i in 0..n {
        m[(i, i)] = creal(T::one());
    }
    m
}

pub fn adjoint<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    m.t().mapv(|z| z.conj())
}

pub fn trace<T: Real>(m: &CMatrix<T>) -> Complex<T> {
    m.diag()
        .iter()
        .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z)
}

/// Kronecker product `a ⊗ b`.
pub fn kron<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = CMatrix::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let s = a[(i, j)];
            if s.norm_sqr() == T::zero() {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = s * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Largest elementwise modulus of `a - b`.
pub fn max_abs_diff<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    assert_eq!(a.dim(), b.dim());
    a.iter()
        .zip(b.iter())
        .fold(T::zero(), |acc, (x, y)| acc.max((x - y).norm()))
}

/// Largest elementwise modulus of `m - m^dagger`.
pub fn hermiticity_defect<T: Real>(m: &CMatrix<T>) -> T {
    let n = m.nrows();
    let mut worst = T::zero();
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest modulus among off-diagonal entries.
pub fn max_offdiagonal<T: Real>(m: &CMatrix<T>) -> T {
    let n = m.nrows();
    let mut worst = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                worst = worst.max(m[(i, j)].norm());
            }
        }
    }
    worst
}

/// Eigenvalues of a Hermitian matrix in ascending order.
///
/// Only the lower triangle is read; the upper triangle is assumed to be its
/// conjugate transpose.
pub fn hermitian_eigenvalues<T: Real>(m: &CMatrix<T>) -> Vec<T> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "eigenvalues of a non-square matrix");
    if n == 0 {
        return Vec::new();
    }
    let mut a = m.clone();
    for i in 0..n {
        a[(i, i)].im = T::zero();
        for j in 0..i {
            a[(j, i)] = a[(i, j)].conj();
        }
    }
    let (mut d, mut e) = tridiagonalize(&mut a);
    tridiagonal_ql(&mut d, &mut e);
    d.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    d
}

/// Householder reduction; returns the diagonal and the moduli of the
/// sub-diagonal (`e[i]` couples `d[i]` and `d[i + 1]`, `e[n - 1] = 0`).
fn tridiagonalize<T: Real>(a: &mut CMatrix<T>) -> (Vec<T>, Vec<T>) {
    let n = a.nrows();
    let mut e = vec![T::zero(); n];
    let zero = creal(T::zero());
    let two = T::lit(2.0);
    let mut v = vec![zero; n];
    let mut p = vec![zero; n];

    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let alpha = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<T>().sqrt();
        if alpha == T::zero() {
            e[k] = T::zero();
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == T::zero() {
            creal(T::one())
        } else {
            x0 / x0.norm()
        };
        for i in 0..len {
            v[i] = a[(k + 1 + i, k)];
        }
        v[0] += phase * alpha;
        let vnorm2: T = v[..len].iter().map(|z| z.norm_sqr()).sum();
        let beta = two / vnorm2;

        for i in 0..len {
            let mut acc = zero;
            for j in 0..len {
                acc += a[(k + 1 + i, k + 1 + j)] * v[j];
            }
            p[i] = acc * beta;
        }
        let vp: Complex<T> = (0..len).map(|i| v[i].conj() * p[i]).sum();
        let half_k = vp * (beta / two);
        for i in 0..len {
            p[i] -= half_k * v[i];
        }
        for i in 0..len {
            for j in 0..len {
                let upd = v[i] * p[j].conj() + p[i] * v[j].conj();
                a[(k + 1 + i, k + 1 + j)] -= upd;
            }
        }
        e[k] = alpha;
    }
    if n >= 2 {
        e[n - 2] = a[(n - 1, n - 2)].norm();
    }
    e[n - 1] = T::zero();
    let d = (0..n).map(|i| a[(i, i)].re).collect();
    (d, e)
}

/// Implicit QL iteration on a real symmetric tridiagonal matrix.
fn tridiagonal_ql<T: Real>(d: &mut [T], e: &mut [T]) {
    let n = d.len();
    let two = T::lit(2.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 200 {
                // Convergence failure is not expected for finite Hermitian input.
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            let signed_r = if g >= T::zero() { r.abs() } else { -r.abs() };
            g = d[m] - d[l] + e[l] / (g + signed_r);
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[m] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
}
