use serde::Serialize;

use super::expr::{f, gm_half, var, Env};
use super::{check::evaluate_term, registry::chain};
use crate::error::Result;
use crate::quad::QuadratureSpec;
use crate::scalar::{unit_scale, Real};

/// Weights at which the `nu -> 1/2` profile is sampled.
pub const NU_LIMIT_POINTS: [f64; 4] = [0.45, 0.49, 0.51, 0.55];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NuLimitRow {
    pub nu: f64,
    /// Relative Frobenius distance of each chain term to `f(A) # f(B)`.
    pub distances: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NuLimitProfile {
    pub scale: f64,
    pub rows: Vec<NuLimitRow>,
}

impl NuLimitProfile {
    pub fn row(&self, nu: f64) -> Option<&NuLimitRow> {
        self.rows.iter().find(|r| r.nu == nu)
    }

    /// Every distance shrinks as `nu` moves towards 1/2 on either side.
    pub fn monotone(&self) -> bool {
        let shrinks = |far: f64, near: f64| match (self.row(far), self.row(near)) {
            (Some(f), Some(n)) => f.distances.iter().zip(&n.distances).all(|(x, y)| y < x),
            _ => false,
        };
        shrinks(0.45, 0.49) && shrinks(0.55, 0.51)
    }

    pub fn max_distance(&self, nu: f64) -> Option<f64> {
        self.row(nu).map(|r| r.distances.iter().copied().fold(0.0, f64::max))
    }
}

/// Distances of the three `sta-low` terms (`sta-high` terms above 1/2) to
/// `f(A) # f(B)` at each weight in [`NU_LIMIT_POINTS`]. The middle term is
/// always computed by quadrature of its integral form.
pub fn nu_limit_profile<T: Real>(env: &Env<T>, quad: &QuadratureSpec<T>) -> Result<NuLimitProfile> {
    let (target, _) = evaluate_term(&gm_half(f(var("A")), f(var("B"))), env, quad)?;
    let target = target.into_matrix()?;
    let scale = unit_scale(&[target.frobenius_norm()]);
    let low = chain("sta-low")?;
    let high = chain("sta-high")?;
    let mut rows = Vec::new();
    for &nu in &NU_LIMIT_POINTS {
        let spec = if nu < 0.5 { &low } else { &high };
        let env = env.clone().scalar("nu", T::lit(nu));
        let mut distances = [0.0; 3];
        for (d, term) in distances.iter_mut().zip(&spec.terms) {
            let (v, _) = evaluate_term(&term.expr, &env, quad)?;
            *d = (v.into_matrix()?.frobenius_distance(&target) / scale).as_f64();
        }
        rows.push(NuLimitRow { nu, distances });
    }
    Ok(NuLimitProfile {
        scale: scale.as_f64(),
        rows,
    })
}
