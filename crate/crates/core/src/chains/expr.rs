//! Term expressions and their evaluator.
//!
//! A chain term is a small expression tree over named inputs (`A`, `B`, ...,
//! scalar parameters such as `t` or `nu`), the bound catalogue function `f`,
//! an optional positive linear map, weighted geometric means, functional
//! calculus and quadrature. Evaluation is deterministic; quadrature error
//! estimates are collected so reports can show them.

use std::collections::HashMap;
use std::ops::{Add, Div, Mul, Sub};

use crate::error::{Error, Result};
use crate::funcat::{PositiveLinearMap, ScalarFn};
use crate::linalg::{operator_norm, spectral_decompose, SymMatrix};
use crate::means::{require_pd, GeodesicPath};
use crate::quad::{self, Integrand, QuadratureSpec};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    /// Bound input, parameter or integration variable.
    Var(&'static str),
    /// Identity matrix of the working dimension.
    Identity,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// The bound scalar function, applied to a scalar or through the spectrum.
    F(Box<Expr>),
    /// `X #_w Y`.
    Gmean(Box<Expr>, Box<Expr>, Box<Expr>),
    Inv(Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    /// `P^{-1/2} Q P^{-1/2}`.
    Whiten(Box<Expr>, Box<Expr>),
    Ln(Box<Expr>),
    Exp(Box<Expr>),
    /// Operator norm of a matrix, absolute value of a scalar.
    Norm(Box<Expr>),
    /// The bound positive linear map.
    Map(Box<Expr>),
    /// `[[A, X], [X, B]]`.
    Block(Box<Expr>, Box<Expr>, Box<Expr>),
    Integral {
        var: &'static str,
        lo: Box<Expr>,
        hi: Box<Expr>,
        body: Box<Expr>,
    },
}

pub fn k(c: f64) -> Expr {
    Expr::Const(c)
}

pub fn var(name: &'static str) -> Expr {
    Expr::Var(name)
}

pub fn f(x: Expr) -> Expr {
    Expr::F(Box::new(x))
}

pub fn gm(x: Expr, y: Expr, w: Expr) -> Expr {
    Expr::Gmean(Box::new(x), Box::new(y), Box::new(w))
}

/// `X # Y`
pub fn gm_half(x: Expr, y: Expr) -> Expr {
    gm(x, y, k(0.5))
}

pub fn inv(x: Expr) -> Expr {
    Expr::Inv(Box::new(x))
}

pub fn pow(x: Expr, p: Expr) -> Expr {
    Expr::Pow(Box::new(x), Box::new(p))
}

pub fn sqrt(x: Expr) -> Expr {
    pow(x, k(0.5))
}

pub fn whiten(p: Expr, q: Expr) -> Expr {
    Expr::Whiten(Box::new(p), Box::new(q))
}

pub fn ln(x: Expr) -> Expr {
    Expr::Ln(Box::new(x))
}

pub fn exp(x: Expr) -> Expr {
    Expr::Exp(Box::new(x))
}

pub fn norm(x: Expr) -> Expr {
    Expr::Norm(Box::new(x))
}

pub fn map(x: Expr) -> Expr {
    Expr::Map(Box::new(x))
}

pub fn block(a: Expr, x: Expr, b: Expr) -> Expr {
    Expr::Block(Box::new(a), Box::new(x), Box::new(b))
}

pub fn integral(v: &'static str, lo: Expr, hi: Expr, body: Expr) -> Expr {
    Expr::Integral {
        var: v,
        lo: Box::new(lo),
        hi: Box::new(hi),
        body: Box::new(body),
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(rhs))
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Sub(Box::new(self), Box::new(rhs))
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul(Box::new(self), Box::new(rhs))
    }
}

impl Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::Div(Box::new(self), Box::new(rhs))
    }
}

impl Expr {
    /// Whether `name` occurs free in the expression.
    pub fn mentions(&self, name: &str) -> bool {
        use Expr::*;
        match self {
            Const(_) | Identity => false,
            Var(v) => *v == name,
            F(x) | Inv(x) | Ln(x) | Exp(x) | Norm(x) | Map(x) => x.mentions(name),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) | Pow(a, b) | Whiten(a, b) => {
                a.mentions(name) || b.mentions(name)
            }
            Gmean(a, b, c) | Block(a, b, c) => a.mentions(name) || b.mentions(name) || c.mentions(name),
            Integral { var, lo, hi, body } => {
                lo.mentions(name) || hi.mentions(name) || (*var != name && body.mentions(name))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value<T> {
    Scalar(T),
    Matrix(SymMatrix<T>),
}

impl<T: Real> Value<T> {
    pub fn as_scalar(&self) -> Result<T> {
        match self {
            Value::Scalar(x) => Ok(*x),
            Value::Matrix(_) => Err(Error::TermType("expected a scalar, found a matrix".into())),
        }
    }

    pub fn into_matrix(self) -> Result<SymMatrix<T>> {
        match self {
            Value::Matrix(m) => Ok(m),
            Value::Scalar(_) => Err(Error::TermType("expected a matrix, found a scalar".into())),
        }
    }
}

impl<T: Real> Integrand<T> for Value<T> {
    fn scaled(&self, w: T) -> Self {
        match self {
            Value::Scalar(x) => Value::Scalar(*x * w),
            Value::Matrix(m) => Value::Matrix(m.scale(w)),
        }
    }

    fn add_scaled(&mut self, x: &Self, w: T) {
        match (self, x) {
            (Value::Scalar(s), Value::Scalar(y)) => *s = *s + w * *y,
            (Value::Matrix(s), Value::Matrix(y)) => *s = SymMatrix::add_scaled(s, y, w),
            _ => panic!("integrand changed between scalar and matrix values"),
        }
    }

    fn distance(&self, other: &Self) -> T {
        match (self, other) {
            (Value::Scalar(a), Value::Scalar(b)) => (*a - *b).abs(),
            (Value::Matrix(a), Value::Matrix(b)) => a.frobenius_distance(b),
            _ => T::infinity(),
        }
    }
}

/// Input bindings for one chain evaluation.
#[derive(Clone)]
pub struct Env<T> {
    matrices: Vec<(&'static str, SymMatrix<T>)>,
    scalars: Vec<(&'static str, T)>,
    pub func: Option<ScalarFn<T>>,
    pub map: Option<PositiveLinearMap<T>>,
    /// `(seed, stream)` of generated inputs, for reporting.
    pub origin: Option<(u64, u64)>,
}

impl<T: Real> std::fmt::Debug for Env<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Env")
            .field("matrices", &self.matrices)
            .field("scalars", &self.scalars)
            .field("func", &self.func)
            .field("map", &self.map)
            .field("origin", &self.origin)
            .finish()
    }
}

impl<T: Real> Default for Env<T> {
    fn default() -> Self {
        Env {
            matrices: Vec::new(),
            scalars: Vec::new(),
            func: None,
            map: None,
            origin: None,
        }
    }
}

impl<T: Real> Env<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn matrix(mut self, name: &'static str, m: SymMatrix<T>) -> Self {
        self.set_matrix(name, m);
        self
    }

    pub fn scalar(mut self, name: &'static str, x: T) -> Self {
        self.set_scalar(name, x);
        self
    }

    pub fn with_fn(mut self, f: ScalarFn<T>) -> Self {
        self.func = Some(f);
        self
    }

    pub fn with_map(mut self, m: PositiveLinearMap<T>) -> Self {
        self.map = Some(m);
        self
    }

    pub fn set_matrix(&mut self, name: &'static str, m: SymMatrix<T>) {
        self.matrices.retain(|(n, _)| *n != name);
        self.matrices.push((name, m));
    }

    pub fn set_scalar(&mut self, name: &'static str, x: T) {
        self.scalars.retain(|(n, _)| *n != name);
        self.scalars.push((name, x));
    }

    pub fn get_matrix(&self, name: &str) -> Option<&SymMatrix<T>> {
        self.matrices.iter().find(|(n, _)| *n == name).map(|(_, m)| m)
    }

    pub fn get_scalar(&self, name: &str) -> Option<T> {
        self.scalars.iter().find(|(n, _)| *n == name).map(|(_, x)| *x)
    }

    pub fn matrices(&self) -> impl Iterator<Item = (&'static str, &SymMatrix<T>)> {
        self.matrices.iter().map(|(n, m)| (*n, m))
    }

    pub fn scalars(&self) -> impl Iterator<Item = (&'static str, T)> + '_ {
        self.scalars.iter().map(|(n, x)| (*n, *x))
    }

    /// Dimension of the working space, taken from the first bound matrix.
    pub fn dim(&self) -> Option<usize> {
        self.matrices.first().map(|(_, m)| m.dim())
    }
}

/// Evaluates expressions against an [`Env`].
///
/// Subexpressions that do not depend on an active integration variable are
/// memoized per node, and geodesics `t -> X #_t Y` with fixed endpoints are
/// factored once, so integrals over `t` cost one product per node.
pub struct Evaluator<'e, T> {
    env: &'e Env<T>,
    quad: QuadratureSpec<T>,
    locals: Vec<(&'static str, T)>,
    memo: HashMap<*const Expr, Value<T>>,
    paths: HashMap<(*const Expr, *const Expr), GeodesicPath<T>>,
    estimates: Vec<T>,
}

impl<'e, T: Real> Evaluator<'e, T> {
    pub fn new(env: &'e Env<T>, quad: QuadratureSpec<T>) -> Self {
        Evaluator {
            env,
            quad,
            locals: Vec::new(),
            memo: HashMap::new(),
            paths: HashMap::new(),
            estimates: Vec::new(),
        }
    }

    /// Quadrature error estimates of every integral evaluated so far.
    pub fn quad_estimates(&self) -> &[T] {
        &self.estimates
    }

    fn closed(&self, e: &Expr) -> bool {
        self.locals.iter().all(|(n, _)| !e.mentions(n))
    }

    fn func(&self) -> Result<&'e ScalarFn<T>> {
        self.env.func.as_ref().ok_or_else(|| Error::Unbound("f".into()))
    }

    fn dim(&self) -> Result<usize> {
        self.env
            .dim()
            .ok_or_else(|| Error::TermType("identity needs a bound matrix for its dimension".into()))
    }

    pub fn eval(&mut self, e: &Expr) -> Result<Value<T>> {
        let memoize = !self.locals.is_empty() && !matches!(e, Expr::Const(_) | Expr::Var(_)) && self.closed(e);
        if memoize {
            if let Some(v) = self.memo.get(&(e as *const Expr)) {
                return Ok(v.clone());
            }
        }
        let v = self.eval_uncached(e)?;
        if memoize {
            self.memo.insert(e as *const Expr, v.clone());
        }
        Ok(v)
    }

    pub fn scalar(&mut self, e: &Expr) -> Result<T> {
        self.eval(e)?.as_scalar()
    }

    pub fn matrix(&mut self, e: &Expr) -> Result<SymMatrix<T>> {
        self.eval(e)?.into_matrix()
    }

    fn eval_uncached(&mut self, e: &Expr) -> Result<Value<T>> {
        use Value::{Matrix as M, Scalar as S};
        Ok(match e {
            Expr::Const(c) => S(T::lit(*c)),
            Expr::Var(name) => {
                if let Some(&(_, x)) = self.locals.iter().rev().find(|(n, _)| n == name) {
                    S(x)
                } else if let Some(x) = self.env.get_scalar(name) {
                    S(x)
                } else if let Some(m) = self.env.get_matrix(name) {
                    M(m.clone())
                } else {
                    return Err(Error::Unbound(name.to_string()));
                }
            }
            Expr::Identity => M(SymMatrix::identity(self.dim()?)),
            Expr::Add(a, b) => match (self.eval(a)?, self.eval(b)?) {
                (S(x), S(y)) => S(x + y),
                (M(x), M(y)) => {
                    x.same_dim(&y)?;
                    M(&x + &y)
                }
                _ => return Err(Error::TermType("cannot add a scalar and a matrix".into())),
            },
            Expr::Sub(a, b) => match (self.eval(a)?, self.eval(b)?) {
                (S(x), S(y)) => S(x - y),
                (M(x), M(y)) => {
                    x.same_dim(&y)?;
                    M(&x - &y)
                }
                _ => return Err(Error::TermType("cannot subtract a scalar and a matrix".into())),
            },
            Expr::Mul(a, b) => match (self.eval(a)?, self.eval(b)?) {
                (S(x), S(y)) => S(x * y),
                (S(x), M(m)) | (M(m), S(x)) => M(m.scale(x)),
                (M(_), M(_)) => {
                    return Err(Error::TermType(
                        "matrix products are not symmetric; use a mean or a congruence".into(),
                    ))
                }
            },
            Expr::Div(a, b) => {
                let d = self.scalar(b)?;
                match self.eval(a)? {
                    S(x) => S(x / d),
                    M(m) => M(m.scale(d.recip())),
                }
            }
            Expr::F(x) => {
                let func = self.func()?;
                match self.eval(x)? {
                    S(v) => S(func.eval_checked(v)?),
                    M(m) => M(func.apply(&m)?),
                }
            }
            Expr::Gmean(x, y, w) => {
                let w = self.scalar(w)?;
                let key = (x.as_ref() as *const Expr, y.as_ref() as *const Expr);
                let cacheable = self.closed(x) && self.closed(y);
                if cacheable {
                    if let Some(p) = self.paths.get(&key) {
                        return Ok(M(p.at(w)));
                    }
                }
                let a = self.matrix(x)?;
                let b = self.matrix(y)?;
                let path = GeodesicPath::new(&a, &b)?;
                let out = path.at(w);
                if cacheable {
                    self.paths.insert(key, path);
                }
                M(out)
            }
            Expr::Inv(x) => match self.eval(x)? {
                S(v) => S(v.recip()),
                M(m) => M(require_pd("inverse operand", &m)?.map(|l| l.recip())),
            },
            Expr::Pow(x, p) => {
                let p = self.scalar(p)?;
                match self.eval(x)? {
                    S(v) => S(v.powf(p)),
                    M(m) => M(require_pd("power base", &m)?.map(|l| l.powf(p))),
                }
            }
            Expr::Whiten(p, q) => {
                let p = self.matrix(p)?;
                let q = self.matrix(q)?;
                p.same_dim(&q)?;
                let inv_sqrt = require_pd("whitening operand", &p)?.map(|l| l.sqrt().recip());
                M(inv_sqrt.sandwich(&q))
            }
            Expr::Ln(x) => match self.eval(x)? {
                S(v) => S(v.ln()),
                M(m) => M(require_pd("log operand", &m)?.map(|l| l.ln())),
            },
            Expr::Exp(x) => match self.eval(x)? {
                S(v) => S(v.exp()),
                M(m) => M(spectral_decompose(&m)?.map(|l| l.exp())),
            },
            Expr::Norm(x) => match self.eval(x)? {
                S(v) => S(v.abs()),
                M(m) => S(operator_norm(&m)?),
            },
            Expr::Map(x) => {
                let psi = self.env.map.as_ref().ok_or_else(|| Error::Unbound("Psi".into()))?;
                let m = self.matrix(x)?;
                M(psi.apply(&m)?)
            }
            Expr::Block(a, x, b) => {
                let a = self.matrix(a)?;
                let x = self.matrix(x)?;
                let b = self.matrix(b)?;
                M(SymMatrix::block2(&a, &x, &b)?)
            }
            Expr::Integral { var, lo, hi, body } => {
                let lo = self.scalar(lo)?;
                let hi = self.scalar(hi)?;
                let spec = self.quad;
                let body = body.as_ref();
                let q = quad::integrate(
                    |t| {
                        self.locals.push((var, t));
                        let r = self.eval(body);
                        self.locals.pop();
                        r
                    },
                    lo,
                    hi,
                    &spec,
                )?;
                self.estimates.push(q.error_estimate);
                q.value
            }
        })
    }
}
