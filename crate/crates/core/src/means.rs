//! Weighted geometric mean `A #_t B = A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2}`.

use crate::error::{Error, Result};
use crate::linalg::{spectral_decompose, Matrix, SpectralDecomposition, SymMatrix};
use crate::scalar::Real;

/// Checks `lambda_min > PD_FLOOR * lambda_max` and returns the decomposition.
pub fn require_pd<T: Real>(operand: &str, a: &SymMatrix<T>) -> Result<SpectralDecomposition<T>> {
    let d = spectral_decompose(a)?;
    check_pd(operand, &d)?;
    Ok(d)
}

fn check_pd<T: Real>(operand: &str, d: &SpectralDecomposition<T>) -> Result<()> {
    let (lo, hi) = (d.lambda_min(), d.lambda_max());
    if lo > T::zero() && lo > T::lit(T::PD_FLOOR) * hi {
        Ok(())
    } else {
        Err(Error::NotPositiveDefinite {
            operand: operand.to_string(),
            lambda_min: lo.as_f64(),
            lambda_max: hi.as_f64(),
        })
    }
}

/// The geodesic `t -> A #_t B` for a fixed pair, factored once.
///
/// With `M = A^{-1/2} B A^{-1/2} = V diag(mu) V^T` and `W = A^{1/2} V`,
/// every point on the path is `W diag(mu^t) W^T`, so evaluating it for many
/// `t` (quadrature nodes) costs one product per node.
#[derive(Clone, Debug)]
pub struct GeodesicPath<T> {
    w: Matrix<T>,
    mu: Vec<T>,
}

impl<T: Real> GeodesicPath<T> {
    pub fn new(a: &SymMatrix<T>, b: &SymMatrix<T>) -> Result<Self> {
        a.same_dim(b)?;
        let da = require_pd("A", a)?;
        require_pd("B", b)?;
        let sqrt_a = da.map(|l| l.sqrt());
        let inv_sqrt_a = da.map(|l| l.sqrt().recip());
        // A^{-1/2} B A^{-1/2} loses symmetry to roundoff; sandwich re-symmetrizes.
        let m = inv_sqrt_a.sandwich(b);
        let dm = spectral_decompose(&m)?;
        check_pd("A^-1/2 B A^-1/2", &dm)?;
        let w = sqrt_a.to_matrix().matmul(&dm.basis);
        Ok(GeodesicPath { w, mu: dm.eigenvalues })
    }

    pub fn at(&self, t: T) -> SymMatrix<T> {
        let vals: Vec<T> = self.mu.iter().map(|&m| m.powf(t)).collect();
        SymMatrix::from_spectrum(&self.w, &vals)
    }

    /// Eigenvalues of `A^{-1/2} B A^{-1/2}`, ascending.
    pub fn relative_spectrum(&self) -> &[T] {
        &self.mu
    }
}

/// `A #_t B`. Defined for every real `t`; the inequalities use `t` in `[0, 1]`.
pub fn gmean_t<T: Real>(a: &SymMatrix<T>, b: &SymMatrix<T>, t: T) -> Result<SymMatrix<T>> {
    Ok(GeodesicPath::new(a, b)?.at(t))
}

/// `A # B = A #_{1/2} B`.
pub fn gmean<T: Real>(a: &SymMatrix<T>, b: &SymMatrix<T>) -> Result<SymMatrix<T>> {
    gmean_t(a, b, T::half())
}
