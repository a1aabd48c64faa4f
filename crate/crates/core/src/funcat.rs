//! Catalogue of scalar functions, their convexity classes, and the hypothesis
//! predicates used by the inequality chains.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{loewner_leq, matrix_function, Interval, Matrix, SpectralFn, SymMatrix};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FnFlag {
    GeometricallyConvex,
    OperatorGeometricallyConvex,
    OperatorConvex,
    Convex,
    RequiresContraction,
}

impl FnFlag {
    pub fn name(self) -> &'static str {
        match self {
            FnFlag::GeometricallyConvex => "geometrically_convex",
            FnFlag::OperatorGeometricallyConvex => "operator_geometrically_convex",
            FnFlag::OperatorConvex => "operator_convex",
            FnFlag::Convex => "convex",
            FnFlag::RequiresContraction => "requires_contraction",
        }
    }
}

impl fmt::Display for FnFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How `f` interacts with the Loewner order on its domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderBehavior {
    /// `A <= B` implies `f(A) <= f(B)`.
    OperatorMonotone,
    /// `A <= B` implies `f(B) <= f(A)`.
    OperatorMonotoneDecreasing,
    Constant,
    /// Scalar-monotone at best; matrix order is not preserved in general.
    Other,
}

type ScalarMap<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

#[derive(Clone)]
pub struct ScalarFn<T> {
    id: String,
    formula: String,
    eval: ScalarMap<T>,
    inverse: Option<ScalarMap<T>>,
    domain: Interval<T>,
    flags: Vec<FnFlag>,
    order: OrderBehavior,
}

impl<T: Real> ScalarFn<T> {
    #[allow(clippy::too_many_arguments)]
    fn entry(
        id: &str,
        formula: &str,
        domain: Interval<T>,
        flags: &[FnFlag],
        order: OrderBehavior,
        eval: impl Fn(T) -> T + Send + Sync + 'static,
        inverse: Option<ScalarMap<T>>,
    ) -> Self {
        let mut flags = flags.to_vec();
        flags.sort();
        ScalarFn {
            id: id.to_string(),
            formula: formula.to_string(),
            eval: Arc::new(eval),
            inverse,
            domain,
            flags,
            order,
        }
    }

    /// `P(t) = sum c_k t^k` with non-negative coefficients on `(0, inf)`.
    pub fn poly_nonneg(coeffs: &[T]) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|&c| !(c >= T::zero())) {
            return Err(Error::Config(
                "poly_nonneg needs at least one coefficient, all non-negative".into(),
            ));
        }
        if coeffs.iter().all(|&c| c == T::zero()) {
            return Err(Error::Config("poly_nonneg needs a nonzero coefficient".into()));
        }
        let c: Vec<T> = coeffs.to_vec();
        let eval = {
            let c = c.clone();
            move |t: T| c.iter().rev().fold(T::zero(), |acc, &ck| acc * t + ck)
        };
        let increasing = c.iter().skip(1).any(|&ck| ck > T::zero());
        let inverse: Option<ScalarMap<T>> = if increasing {
            let p = eval.clone();
            Some(Arc::new(move |y: T| invert_increasing(&p, y)))
        } else {
            None
        };
        let formula = c
            .iter()
            .enumerate()
            .map(|(k, ck)| format!("{ck}*t^{k}"))
            .collect::<Vec<_>>()
            .join(" + ");
        Ok(Self::entry(
            "poly_nonneg",
            &formula,
            Interval::positive(),
            &[FnFlag::GeometricallyConvex],
            if increasing {
                OrderBehavior::Other
            } else {
                OrderBehavior::Constant
            },
            eval,
            inverse,
        ))
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn formula(&self) -> &str {
        &self.formula
    }

    pub fn eval(&self, x: T) -> T {
        (self.eval)(x)
    }

    pub fn domain(&self) -> Interval<T> {
        self.domain
    }

    pub fn flags(&self) -> &[FnFlag] {
        &self.flags
    }

    pub fn has(&self, flag: FnFlag) -> bool {
        self.flags.contains(&flag)
    }

    pub fn order(&self) -> OrderBehavior {
        self.order
    }

    /// `f^{-1}(y)` where the catalogue provides an inverse on the range.
    pub fn inverse(&self, y: T) -> Option<T> {
        self.inverse.as_ref().map(|g| g(y))
    }

    pub fn has_inverse(&self) -> bool {
        self.inverse.is_some()
    }

    /// Scalar evaluation with a domain check.
    pub fn eval_checked(&self, x: T) -> Result<T> {
        if self.domain.contains(x) {
            Ok(self.eval(x))
        } else {
            Err(Error::Domain {
                function: self.id.clone(),
                eigenvalue: x.as_f64(),
                domain: self.domain.to_string(),
            })
        }
    }

    pub fn apply(&self, a: &SymMatrix<T>) -> Result<SymMatrix<T>> {
        matrix_function(a, self)
    }
}

impl<T: Real> SpectralFn<T> for ScalarFn<T> {
    fn name(&self) -> &str {
        &self.id
    }
    fn domain(&self) -> Interval<T> {
        self.domain
    }
    fn eval(&self, x: T) -> T {
        (self.eval)(x)
    }
}

impl<T: Real> fmt::Debug for ScalarFn<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFn")
            .field("id", &self.id)
            .field("formula", &self.formula)
            .field("domain", &self.domain.to_string())
            .field("flags", &self.flags)
            .finish()
    }
}

/// Solves `p(t) = y` for an increasing `p` on `(0, inf)` by bisection.
fn invert_increasing<T: Real>(p: &impl Fn(T) -> T, y: T) -> T {
    let mut lo = T::zero();
    if p(lo) >= y {
        return lo;
    }
    let mut hi = T::one();
    let mut guard = 0;
    while p(hi) < y && guard < 2000 {
        lo = hi;
        hi = hi * T::two();
        guard += 1;
    }
    for _ in 0..300 {
        let mid = (lo + hi) * T::half();
        if mid <= lo || mid >= hi {
            break;
        }
        if p(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) * T::half()
}

pub const DEFAULT_POLY_COEFFS: [f64; 4] = [1.0, 0.5, 0.25, 0.125];

/// Catalogue ids in listing order.
pub const CATALOGUE_IDS: [&str; 8] = [
    "inv",
    "resolvent",
    "moebius",
    "poly_nonneg",
    "exp",
    "square",
    "identity",
    "one",
];

pub fn catalogue_fn<T: Real>(id: &str) -> Result<ScalarFn<T>> {
    use FnFlag::*;
    use OrderBehavior::*;
    let f = match id {
        "inv" => ScalarFn::entry(
            "inv",
            "1/t",
            Interval::positive(),
            &[OperatorGeometricallyConvex, OperatorConvex, Convex, GeometricallyConvex],
            OperatorMonotoneDecreasing,
            |t: T| t.recip(),
            Some(Arc::new(|y: T| y.recip())),
        ),
        "resolvent" => ScalarFn::entry(
            "resolvent",
            "1/(1-t)",
            Interval::open(T::zero(), T::one()),
            &[OperatorGeometricallyConvex, RequiresContraction],
            OperatorMonotone,
            |t: T| (T::one() - t).recip(),
            Some(Arc::new(|y: T| T::one() - y.recip())),
        ),
        "moebius" => ScalarFn::entry(
            "moebius",
            "(1+t)/(1-t)",
            Interval::open(T::zero(), T::one()),
            &[OperatorGeometricallyConvex, RequiresContraction],
            OperatorMonotone,
            |t: T| (T::one() + t) / (T::one() - t),
            Some(Arc::new(|y: T| (y - T::one()) / (y + T::one()))),
        ),
        "poly_nonneg" => {
            let c: Vec<T> = DEFAULT_POLY_COEFFS.iter().map(|&c| T::lit(c)).collect();
            ScalarFn::poly_nonneg(&c)?
        }
        "exp" => ScalarFn::entry(
            "exp",
            "e^t",
            Interval::positive(),
            &[GeometricallyConvex, Convex],
            Other,
            |t: T| t.exp(),
            Some(Arc::new(|y: T| y.ln())),
        ),
        "square" => ScalarFn::entry(
            "square",
            "t^2",
            Interval::real_line(),
            &[Convex, OperatorConvex, GeometricallyConvex],
            Other,
            |t: T| t * t,
            Some(Arc::new(|y: T| y.sqrt())),
        ),
        "identity" => ScalarFn::entry(
            "identity",
            "t",
            Interval::real_line(),
            &[GeometricallyConvex, OperatorGeometricallyConvex, OperatorConvex, Convex],
            OperatorMonotone,
            |t: T| t,
            Some(Arc::new(|y: T| y)),
        ),
        "one" => ScalarFn::entry(
            "one",
            "1",
            Interval::real_line(),
            &[GeometricallyConvex, OperatorGeometricallyConvex, OperatorConvex, Convex],
            Constant,
            |_t: T| T::one(),
            None,
        ),
        other => {
            return Err(Error::UnknownFunction {
                id: other.to_string(),
                known: CATALOGUE_IDS.join(", "),
            })
        }
    };
    Ok(f)
}

pub fn catalogue<T: Real>() -> Vec<ScalarFn<T>> {
    CATALOGUE_IDS
        .iter()
        .map(|id| catalogue_fn(id).expect("catalogue id"))
        .collect()
}

/// `f(A) <= f(B)` in the Loewner order, at tolerance `tol`.
pub fn hypothesis_fa_leq_fb<T: Real>(f: &ScalarFn<T>, a: &SymMatrix<T>, b: &SymMatrix<T>, tol: T) -> Result<bool> {
    Ok(loewner_leq(&f.apply(a)?, &f.apply(b)?, tol)?.ordered)
}

/// `f(a)^l f(b)^(1-l) - f(a^l b^(1-l))`; non-negative for geometrically convex `f`.
pub fn scalar_geo_convexity_check<T: Real>(f: &ScalarFn<T>, a: T, b: T, lambda: T) -> Result<T> {
    if !(lambda >= T::zero() && lambda <= T::one()) {
        return Err(Error::Config(format!("lambda must lie in [0, 1], got {lambda}")));
    }
    let fa = f.eval_checked(a)?;
    let fb = f.eval_checked(b)?;
    let mid = f.eval_checked(a.powf(lambda) * b.powf(T::one() - lambda))?;
    Ok(fa.powf(lambda) * fb.powf(T::one() - lambda) - mid)
}

type MatrixMap<T> = Arc<dyn Fn(&SymMatrix<T>) -> SymMatrix<T> + Send + Sync>;

/// A positive linear map `Psi` between symmetric matrix spaces.
#[derive(Clone)]
pub struct PositiveLinearMap<T> {
    id: String,
    input_dim: usize,
    output_dim: usize,
    apply: MatrixMap<T>,
}

impl<T: Real> PositiveLinearMap<T> {
    /// `Psi(X) = V^T X V` for an `n x k` factor `V`.
    pub fn compression(v: Matrix<T>) -> Self {
        let vt = v.transpose();
        PositiveLinearMap {
            id: "compression".into(),
            input_dim: v.rows(),
            output_dim: v.cols(),
            apply: Arc::new(move |x| x.congruence(&vt)),
        }
    }

    /// The principal block on coordinates `start..start + len`.
    pub fn diagonal_block(n: usize, start: usize, len: usize) -> Result<Self> {
        if len == 0 || start + len > n {
            return Err(Error::Config(format!(
                "block {start}..{} does not fit in dimension {n}",
                start + len
            )));
        }
        Ok(PositiveLinearMap {
            id: "diagonal_block".into(),
            input_dim: n,
            output_dim: len,
            apply: Arc::new(move |x| {
                let rows: Vec<Vec<T>> = (start..start + len)
                    .map(|i| (start..start + len).map(|j| x.get(i, j)).collect())
                    .collect();
                SymMatrix::from_rows(&rows).expect("principal block of a symmetric matrix")
            }),
        })
    }

    /// `Psi(X) = tr(X)/n * I_n`.
    pub fn normalized_trace(n: usize) -> Self {
        PositiveLinearMap {
            id: "normalized_trace".into(),
            input_dim: n,
            output_dim: n,
            apply: Arc::new(move |x| SymMatrix::scalar(n, x.trace() / T::from_usize(n).unwrap())),
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn apply(&self, x: &SymMatrix<T>) -> Result<SymMatrix<T>> {
        if x.dim() != self.input_dim {
            return Err(Error::DimensionMismatch {
                left: x.dim(),
                right: self.input_dim,
            });
        }
        Ok((self.apply)(x))
    }
}

impl<T: Real> fmt::Debug for PositiveLinearMap<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({} -> {})", self.id, self.input_dim, self.output_dim)
    }
}
