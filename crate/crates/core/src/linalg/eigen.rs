//! Cyclic Jacobi eigensolver for symmetric matrices.
//!
//! Each sweep visits every off-diagonal pair `(p, q)` once and applies the
//! plane rotation that annihilates `a[p][q]`. Rotations are accumulated into
//! the eigenbasis. The iteration stops once the off-diagonal Frobenius norm
//! drops below `T::JACOBI_TOL * ||A||_F`, which is invariant under the
//! rotations.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, SymMatrix};
use crate::scalar::Real;

pub const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order together with an orthonormal eigenbasis
/// stored column-wise.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition<T> {
    pub eigenvalues: Vec<T>,
    pub basis: Matrix<T>,
}

impl<T: Real> SpectralDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn lambda_min(&self) -> T {
        self.eigenvalues[0]
    }

    pub fn lambda_max(&self) -> T {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_radius(&self) -> T {
        self.lambda_min().abs().max(self.lambda_max().abs())
    }

    /// `V diag(g(lambda_i)) V^T`, with no domain checking.
    pub fn map<F: Fn(T) -> T>(&self, g: F) -> SymMatrix<T> {
        let vals: Vec<T> = self.eigenvalues.iter().map(|&l| g(l)).collect();
        SymMatrix::from_spectrum(&self.basis, &vals)
    }

    pub fn reconstruct(&self) -> SymMatrix<T> {
        SymMatrix::from_spectrum(&self.basis, &self.eigenvalues)
    }
}

pub fn spectral_decompose<T: Real>(a: &SymMatrix<T>) -> Result<SpectralDecomposition<T>> {
    let n = a.dim();
    let mut w: Vec<T> = a.as_slice().to_vec();
    let mut v = Matrix::<T>::identity(n);
    let norm = a.frobenius_norm();
    let threshold = T::lit(T::JACOBI_TOL) * norm;

    let off = |w: &[T]| -> T {
        let mut s = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s = s + w[i * n + j] * w[i * n + j];
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    loop {
        let residual = off(&w);
        if residual <= threshold {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                residual: residual.as_f64(),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = w[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let app = w[p * n + p];
                let aqq = w[q * n + q];
                let tau = (aqq - app) / (T::two() * apq);
                let t = if tau >= T::zero() {
                    T::one() / (tau + T::one().hypot(tau))
                } else {
                    -T::one() / (-tau + T::one().hypot(tau))
                };
                let c = T::one() / T::one().hypot(t);
                let s = t * c;
                rotate(&mut w, n, p, q, c, s);
                w[p * n + p] = app - t * apq;
                w[q * n + q] = aqq + t * apq;
                w[p * n + q] = T::zero();
                w[q * n + p] = T::zero();
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        w[i * n + i]
            .partial_cmp(&w[j * n + j])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let eigenvalues = order.iter().map(|&i| w[i * n + i]).collect();
    let mut basis = Matrix::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        for k in 0..n {
            basis.set(k, new, v.get(k, old));
        }
    }
    Ok(SpectralDecomposition { eigenvalues, basis })
}

/// Applies `J^T W J` to the off-diagonal rows/columns `p`, `q` of `w`,
/// leaving the 2x2 pivot block for the caller.
fn rotate<T: Real>(w: &mut [T], n: usize, p: usize, q: usize, c: T, s: T) {
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = w[k * n + p];
        let akq = w[k * n + q];
        let new_kp = c * akp - s * akq;
        let new_kq = s * akp + c * akq;
        w[k * n + p] = new_kp;
        w[p * n + k] = new_kp;
        w[k * n + q] = new_kq;
        w[q * n + k] = new_kq;
    }
}

impl<T: Real> SymMatrix<T> {
    pub fn eigen(&self) -> Result<SpectralDecomposition<T>> {
        spectral_decompose(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orthogonality_defect(v: &Matrix<f64>) -> f64 {
        v.transpose().matmul(v).max_abs_diff(&Matrix::identity(v.rows()))
    }

    #[test]
    fn diagonal_input() {
        let d = spectral_decompose(&SymMatrix::<f64>::from_diagonal(&[3.0, 1.0])).unwrap();
        assert_eq!(d.eigenvalues, vec![1.0, 3.0]);
        // signed permutation of the identity
        for j in 0..2 {
            let col = d.basis.column(j);
            assert_eq!(col.iter().filter(|x| x.abs() == 1.0).count(), 1);
        }
    }

    #[test]
    fn swap_matrix() {
        let a = SymMatrix::<f64>::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let d = a.eigen().unwrap();
        assert!((d.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((d.eigenvalues[1] - 1.0).abs() < 1e-15);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = d.basis.column(0);
        let v1 = d.basis.column(1);
        assert!((v0[0] * v0[1] + 0.5).abs() < 1e-15, "{v0:?} ~ (1,-1)/sqrt2");
        assert!((v1[0] * v1[1] - 0.5).abs() < 1e-15, "{v1:?} ~ (1,1)/sqrt2");
        assert!((v0[0].abs() - r).abs() < 1e-15);
    }

    #[test]
    fn analytic_two_by_two() {
        let a = SymMatrix::<f64>::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap();
        let d = a.eigen().unwrap();
        assert!((d.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((d.eigenvalues[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn one_by_one_and_zero() {
        let d = SymMatrix::from_diagonal(&[-4.5]).eigen().unwrap();
        assert_eq!(d.eigenvalues, vec![-4.5]);
        let z = SymMatrix::<f64>::zeros(3).eigen().unwrap();
        assert_eq!(z.eigenvalues, vec![0.0; 3]);
    }

    #[test]
    fn repeated_eigenvalues_give_orthonormal_basis() {
        // 2 I + rank one: eigenvalue 2 with multiplicity 3
        let u = [1.0, 2.0, -1.0, 0.5];
        let data: Vec<f64> = (0..16)
            .map(|k| u[k / 4] * u[k % 4] + if k / 4 == k % 4 { 2.0 } else { 0.0 })
            .collect();
        let a = SymMatrix::new(4, data).unwrap();
        let d = a.eigen().unwrap();
        assert!(orthogonality_defect(&d.basis) < 1e-12);
        assert!(d.reconstruct().max_abs_diff(&a) < 1e-12 * 8.0);
        for k in 0..3 {
            assert!((d.eigenvalues[k] - 2.0).abs() < 1e-13);
        }
    }
}
