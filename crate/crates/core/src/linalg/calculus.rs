//! Functional calculus and the Loewner-order predicates built on it.

use crate::error::{Error, Result};
use crate::linalg::{spectral_decompose, Interval, SymMatrix};
use crate::scalar::{unit_scale, Real};

/// A real function that can be lifted to symmetric matrices through their
/// spectrum.
pub trait SpectralFn<T: Real> {
    fn name(&self) -> &str;
    fn domain(&self) -> Interval<T>;
    fn eval(&self, x: T) -> T;
}

/// `f(A) = V diag(f(lambda_i)) V^T`. Every eigenvalue must lie in `f`'s domain.
pub fn matrix_function<T: Real, F: SpectralFn<T> + ?Sized>(a: &SymMatrix<T>, f: &F) -> Result<SymMatrix<T>> {
    let d = spectral_decompose(a)?;
    let dom = f.domain();
    if let Some(&bad) = d.eigenvalues.iter().find(|&&l| !dom.contains(l)) {
        return Err(Error::Domain {
            function: f.name().to_string(),
            eigenvalue: bad.as_f64(),
            domain: dom.to_string(),
        });
    }
    Ok(d.map(|l| f.eval(l)))
}

/// Spectral norm, i.e. the largest absolute eigenvalue.
pub fn operator_norm<T: Real>(a: &SymMatrix<T>) -> Result<T> {
    Ok(spectral_decompose(a)?.spectral_radius())
}

pub fn lambda_min<T: Real>(a: &SymMatrix<T>) -> Result<T> {
    Ok(spectral_decompose(a)?.lambda_min())
}

/// Outcome of a Loewner comparison `A <= B`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoewnerCheck<T> {
    pub ordered: bool,
    /// `lambda_min(B - A)`; non-negative iff the order holds exactly.
    pub slack: T,
    /// `max(1, ||A||, ||B||)`.
    pub scale: T,
}

pub fn loewner_leq<T: Real>(a: &SymMatrix<T>, b: &SymMatrix<T>, tol: T) -> Result<LoewnerCheck<T>> {
    a.same_dim(b)?;
    let slack = lambda_min(&(b - a))?;
    let scale = unit_scale(&[operator_norm(a)?, operator_norm(b)?]);
    Ok(LoewnerCheck {
        ordered: slack >= -tol * scale,
        slack,
        scale,
    })
}

pub fn spectrum_in<T: Real>(a: &SymMatrix<T>, interval: &Interval<T>, tol: T) -> Result<bool> {
    let d = spectral_decompose(a)?;
    let scale = unit_scale(&[interval.lo, interval.hi]);
    let scale = if scale.is_finite() { scale } else { T::one() };
    Ok(d.lambda_min() >= interval.lo - tol * scale && d.lambda_max() <= interval.hi + tol * scale)
}

/// `lambda_min([[A, X], [X, B]])` together with the scale `max(1, ||A||, ||B||)`.
pub fn block2_slack<T: Real>(a: &SymMatrix<T>, x: &SymMatrix<T>, b: &SymMatrix<T>) -> Result<(T, T)> {
    let blk = SymMatrix::block2(a, x, b)?;
    let slack = lambda_min(&blk)?;
    Ok((slack, unit_scale(&[operator_norm(a)?, operator_norm(b)?])))
}

pub fn block2_psd<T: Real>(a: &SymMatrix<T>, x: &SymMatrix<T>, b: &SymMatrix<T>, tol: T) -> Result<bool> {
    let (slack, scale) = block2_slack(a, x, b)?;
    Ok(slack >= -tol * scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Inv;
    impl SpectralFn<f64> for Inv {
        fn name(&self) -> &str {
            "inv"
        }
        fn domain(&self) -> Interval<f64> {
            Interval::positive()
        }
        fn eval(&self, x: f64) -> f64 {
            1.0 / x
        }
    }

    #[test]
    fn inverse_of_diagonal() {
        let r = matrix_function(&SymMatrix::from_diagonal(&[2.0, 4.0]), &Inv).unwrap();
        assert_eq!(r, SymMatrix::from_diagonal(&[0.5, 0.25]));
    }

    #[test]
    fn domain_violation_names_eigenvalue() {
        let e = matrix_function(&SymMatrix::from_diagonal(&[2.0, -1.0]), &Inv).unwrap_err();
        match e {
            Error::Domain {
                eigenvalue, function, ..
            } => {
                assert_eq!(eigenvalue, -1.0);
                assert_eq!(function, "inv");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn norms() {
        assert_eq!(operator_norm(&SymMatrix::<f64>::identity(3)).unwrap(), 1.0);
        assert_eq!(operator_norm(&SymMatrix::from_diagonal(&[-5.0, 2.0])).unwrap(), 5.0);
        let a = SymMatrix::<f64>::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap();
        assert!((operator_norm(&a).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn loewner_examples() {
        let a = SymMatrix::from_rows(&[[2.0, 1.0], [1.0, 5.0]]).unwrap();
        let r = loewner_leq(&a, &a, 0.0).unwrap();
        assert!(r.ordered);
        assert_eq!(r.slack, 0.0);

        let r = loewner_leq(
            &SymMatrix::from_diagonal(&[1.0, 2.0]),
            &SymMatrix::from_diagonal(&[2.0, 3.0]),
            1e-12,
        )
        .unwrap();
        assert!(r.ordered);
        assert_eq!(r.slack, 1.0);

        let r = loewner_leq(
            &SymMatrix::from_diagonal(&[1.0, 2.0]),
            &SymMatrix::from_diagonal(&[2.0, 1.0]),
            1e-12,
        )
        .unwrap();
        assert!(!r.ordered);
        assert_eq!(r.slack, -1.0);

        let e = loewner_leq(&SymMatrix::<f64>::identity(2), &SymMatrix::identity(3), 0.0).unwrap_err();
        assert_eq!(e, Error::DimensionMismatch { left: 2, right: 3 });
    }

    #[test]
    fn spectrum_membership() {
        let i = Interval::closed(1.0, 4.0);
        assert!(spectrum_in(&SymMatrix::from_diagonal(&[2.0, 3.0]), &i, 0.0).unwrap());
        assert!(!spectrum_in(&SymMatrix::from_diagonal(&[2.0, 5.0]), &i, 0.0).unwrap());
    }

    #[test]
    fn block_examples() {
        let i = SymMatrix::<f64>::identity(2);
        assert!(block2_psd(&i, &i, &i, 1e-12).unwrap());
        let two = SymMatrix::scalar(2, 2.0);
        assert!(!block2_psd(&i, &two, &i, 1e-12).unwrap());
        let (slack, _) = block2_slack(&i, &two, &i).unwrap();
        assert!((slack + 1.0).abs() < 1e-14);
        assert!(block2_psd(&i, &i, &SymMatrix::identity(3), 0.0).is_err());
    }
}
