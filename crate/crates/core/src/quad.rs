//! Composite Gauss-Legendre quadrature for scalar- and matrix-valued
//! integrands.
//!
//! Refinement level `k` splits `[a, b]` into `2^k` equal panels, each carrying
//! a `base_order`-point Gauss-Legendre rule. Levels are computed in turn until
//! two successive estimates are within `abs_tol` (Frobenius distance for
//! matrices), or the refinement budget runs out.

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec<T> {
    /// Gauss-Legendre nodes per panel.
    pub base_order: usize,
    pub max_refinements: usize,
    pub abs_tol: T,
}

impl<T: Real> Default for QuadratureSpec<T> {
    fn default() -> Self {
        QuadratureSpec {
            base_order: 16,
            max_refinements: 6,
            abs_tol: T::lit(1e-11),
        }
    }
}

impl<T: Real> QuadratureSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if self.base_order < 2 {
            return Err(Error::QuadratureSpec(format!(
                "base_order must be >= 2, got {}",
                self.base_order
            )));
        }
        if !(self.abs_tol > T::zero()) {
            return Err(Error::QuadratureSpec(format!(
                "abs_tol must be positive, got {}",
                self.abs_tol
            )));
        }
        Ok(())
    }
}

/// Values that can be accumulated by a quadrature rule.
pub trait Integrand<T>: Clone {
    /// `self * w`
    fn scaled(&self, w: T) -> Self;
    /// `self += w * x`
    fn add_scaled(&mut self, x: &Self, w: T);
    fn distance(&self, other: &Self) -> T;
}

impl<T: Real> Integrand<T> for T {
    fn scaled(&self, w: T) -> Self {
        *self * w
    }
    fn add_scaled(&mut self, x: &Self, w: T) {
        *self = *self + w * *x;
    }
    fn distance(&self, other: &Self) -> T {
        (*self - *other).abs()
    }
}

impl<T: Real> Integrand<T> for SymMatrix<T> {
    fn scaled(&self, w: T) -> Self {
        self.scale(w)
    }
    fn add_scaled(&mut self, x: &Self, w: T) {
        *self = SymMatrix::add_scaled(self, x, w);
    }
    fn distance(&self, other: &Self) -> T {
        self.frobenius_distance(other)
    }
}

#[derive(Clone, Debug)]
pub struct Quadrature<V, T> {
    pub value: V,
    /// Distance between the last two refinement levels.
    pub error_estimate: T,
    pub panels: usize,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, ascending nodes.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (
        nodes.into_iter().map(T::lit).collect(),
        weights.into_iter().map(T::lit).collect(),
    )
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let j = j as f64;
        let p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrates `g` over `[a, b]` by the adaptive composite rule.
///
/// Node values are summed in fixed index order, so the result does not depend
/// on how the integrand is evaluated.
pub fn integrate<T, V, F>(mut g: F, a: T, b: T, spec: &QuadratureSpec<T>) -> Result<Quadrature<V, T>>
where
    T: Real,
    V: Integrand<T>,
    F: FnMut(T) -> Result<V>,
{
    spec.validate()?;
    if !(a < b) {
        return Err(Error::Config(format!("integration needs a < b, got [{a}, {b}]")));
    }
    let (nodes, weights) = gauss_legendre::<T>(spec.base_order);

    let level = |panels: usize, g: &mut F| -> Result<V> {
        let h = (b - a) / T::from_usize(panels).unwrap();
        let half = h * T::half();
        let mut acc: Option<V> = None;
        for p in 0..panels {
            let mid = a + h * (T::from_usize(p).unwrap() + T::half());
            for (&x, &w) in nodes.iter().zip(&weights) {
                let v = g(mid + half * x)?;
                match acc.as_mut() {
                    None => acc = Some(v.scaled(w * half)),
                    Some(s) => s.add_scaled(&v, w * half),
                }
            }
        }
        Ok(acc.expect("at least one node"))
    };

    let mut prev = level(1, &mut g)?;
    let mut estimate = T::infinity();
    let mut panels = 1;
    for _ in 0..spec.max_refinements {
        panels *= 2;
        let next = level(panels, &mut g)?;
        estimate = next.distance(&prev);
        prev = next;
        if estimate <= spec.abs_tol {
            break;
        }
    }
    let limit = spec.abs_tol * T::lit(10.0);
    if !(estimate <= limit) {
        return Err(Error::Quadrature {
            estimate: estimate.as_f64(),
            limit: limit.as_f64(),
        });
    }
    Ok(Quadrature {
        value: prev,
        error_estimate: estimate,
        panels,
    })
}

pub fn integrate_matrix<T, F>(g: F, a: T, b: T, spec: &QuadratureSpec<T>) -> Result<Quadrature<SymMatrix<T>, T>>
where
    T: Real,
    F: FnMut(T) -> Result<SymMatrix<T>>,
{
    integrate(g, a, b, spec)
}

pub fn integrate_scalar<T, F>(g: F, a: T, b: T, spec: &QuadratureSpec<T>) -> Result<Quadrature<T, T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    integrate(g, a, b, spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        for n in [2usize, 3, 5, 16] {
            let (x, w) = gauss_legendre::<f64>(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
            // degree 2n-1 is exact
            let deg = 2 * n - 2; // even, so the integral is nonzero
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            assert!((q - 2.0 / (deg as f64 + 1.0)).abs() < 1e-13, "n={n}");
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn spec_validation() {
        let bad = QuadratureSpec {
            base_order: 1,
            max_refinements: 3,
            abs_tol: 1e-10,
        };
        assert!(bad.validate().is_err());
        let bad = QuadratureSpec {
            base_order: 4,
            max_refinements: 3,
            abs_tol: 0.0,
        };
        assert!(bad.validate().is_err());
        assert!(QuadratureSpec::<f64>::default().validate().is_ok());
    }

    #[test]
    fn constant_and_linear_matrix_integrands() {
        let a = SymMatrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap();
        let spec = QuadratureSpec::default();
        let r = integrate_matrix(|_| Ok(a.clone()), 0.0, 1.0, &spec).unwrap();
        assert!(r.value.max_abs_diff(&a) < 1e-14 * 3.0);
        let r = integrate_matrix(|t| Ok(a.scale(t)), 0.0, 1.0, &spec).unwrap();
        assert!(r.value.max_abs_diff(&a.scale(0.5)) < 1e-14 * 3.0);
    }

    #[test]
    fn logarithmic_mean_integral() {
        // closed form (b - a) / ln(b / a) with a = 1, b = 4
        let expected = 3.0 / 4f64.ln();
        let spec = QuadratureSpec::default();
        let r = integrate_matrix(|t| Ok(SymMatrix::from_diagonal(&[4f64.powf(t)])), 0.0, 1.0, &spec).unwrap();
        assert!((r.value.get(0, 0) - expected).abs() < 1e-13);
        assert!(r.error_estimate <= 1e-11);
    }

    #[test]
    fn rejects_empty_interval_and_exhausted_budget() {
        let spec = QuadratureSpec::<f64>::default();
        assert!(integrate_scalar(Ok, 1.0, 1.0, &spec).is_err());
        let tight = QuadratureSpec {
            base_order: 2,
            max_refinements: 1,
            abs_tol: 1e-15,
        };
        let e = integrate_scalar(|t: f64| Ok(t.sqrt()), 0.0, 1.0, &tight).unwrap_err();
        assert!(matches!(e, Error::Quadrature { .. }));
    }

    #[test]
    fn integrand_errors_propagate() {
        let spec = QuadratureSpec::<f64>::default();
        let e = integrate_scalar(|_| Err(Error::Config("boom".into())), 0.0, 1.0, &spec).unwrap_err();
        assert_eq!(e, Error::Config("boom".into()));
    }
}
