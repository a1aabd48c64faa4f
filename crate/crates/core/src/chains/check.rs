use std::collections::BTreeMap;

use serde::Serialize;

use super::expr::{Env, Evaluator, Expr, Value};
use super::{ChainSpec, Hypothesis, Relation};
use crate::error::{Error, Result};
use crate::funcat::hypothesis_fa_leq_fb;
use crate::linalg::{block2_psd, lambda_min, loewner_leq, operator_norm, spectral_decompose, SymMatrix};
use crate::means::require_pd;
use crate::quad::QuadratureSpec;
use crate::scalar::{unit_scale, Real};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinkReport {
    pub lhs: String,
    pub rhs: String,
    /// Raw slack: `lambda_min(rhs - lhs)`, `rhs - lhs`, or minus the relative
    /// Frobenius error for equalities.
    pub slack: f64,
    pub scale: f64,
    /// `slack / scale` (equal to `slack` for equalities).
    pub relative: f64,
    pub pass: bool,
}

/// Comparison reported for study; never affects the verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObservationReport {
    pub label: String,
    /// `lambda_min(rhs - lhs)`.
    pub forward: f64,
    /// `lambda_min(lhs - rhs)`.
    pub backward: f64,
    pub distance: f64,
    pub scale: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    HypothesisNotMet { hypothesis: String },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct InputDigest {
    pub seed: Option<u64>,
    pub stream: Option<u64>,
    pub dim: Option<usize>,
    pub fn_id: Option<String>,
    pub params: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainReport {
    pub chain_id: String,
    pub digest: InputDigest,
    pub links: Vec<LinkReport>,
    /// Slack of `first <= last` for chains of three or more terms.
    pub audit: Option<LinkReport>,
    pub observations: Vec<ObservationReport>,
    pub quad_error_estimates: Vec<f64>,
    pub verdict: Verdict,
}

impl ChainReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn hypothesis_met(&self) -> bool {
        !matches!(self.verdict, Verdict::HypothesisNotMet { .. })
    }

    /// Smallest relative slack over the links.
    pub fn min_relative_slack(&self) -> Option<f64> {
        self.links.iter().map(|l| l.relative).reduce(f64::min)
    }

    /// Index and value of the link with the smallest relative slack.
    pub fn worst_link(&self) -> Option<(usize, &LinkReport)> {
        self.links
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.relative.total_cmp(&b.1.relative))
    }
}

fn digest<T: Real>(env: &Env<T>, with_fn: bool) -> InputDigest {
    InputDigest {
        seed: env.origin.map(|o| o.0),
        stream: env.origin.map(|o| o.1),
        dim: env.dim(),
        fn_id: if with_fn {
            env.func.as_ref().map(|f| f.id().to_string())
        } else {
            None
        },
        params: env.scalars().map(|(n, x)| (n.to_string(), x.as_f64())).collect(),
    }
}

fn need_matrix<'a, T: Real>(env: &'a Env<T>, name: &str) -> Result<&'a SymMatrix<T>> {
    env.get_matrix(name).ok_or_else(|| Error::Unbound(name.to_string()))
}

fn need_scalar<T: Real>(env: &Env<T>, name: &str) -> Result<T> {
    env.get_scalar(name).ok_or_else(|| Error::Unbound(name.to_string()))
}

fn hypothesis_holds<T: Real>(h: &Hypothesis, env: &Env<T>, tol: T) -> Result<bool> {
    let func = || env.func.as_ref().ok_or_else(|| Error::Unbound("f".into()));
    Ok(match h {
        Hypothesis::InDomain(names) => {
            let dom = func()?.domain();
            for name in names.iter() {
                let inside = if let Some(m) = env.get_matrix(name) {
                    spectral_decompose(m)?.eigenvalues.iter().all(|&l| dom.contains(l))
                } else {
                    dom.contains(need_scalar(env, name)?)
                };
                if !inside {
                    return Ok(false);
                }
            }
            true
        }
        Hypothesis::FaLeqFb => hypothesis_fa_leq_fb(func()?, need_matrix(env, "A")?, need_matrix(env, "B")?, tol)?,
        Hypothesis::Contractions => {
            operator_norm(need_matrix(env, "A")?)? < T::one() && operator_norm(need_matrix(env, "B")?)? < T::one()
        }
        Hypothesis::NormOrdered => {
            let na = operator_norm(need_matrix(env, "A")?)?;
            let nb = operator_norm(need_matrix(env, "B")?)?;
            na <= nb + tol * unit_scale(&[na, nb])
        }
        Hypothesis::Param { name, range } => range.contains(need_scalar(env, name)?.as_f64()),
        Hypothesis::ParamOrder { lo, hi } => need_scalar(env, lo)? <= need_scalar(env, hi)?,
        Hypothesis::Dominated { lo, hi } => loewner_leq(need_matrix(env, lo)?, need_matrix(env, hi)?, tol)?.ordered,
        // exact filter: borderline blocks would blur the order check on X
        Hypothesis::BlockPsd => block2_psd(
            need_matrix(env, "A")?,
            need_matrix(env, "X")?,
            need_matrix(env, "B")?,
            T::zero(),
        )?,
        Hypothesis::MapImagesPd => {
            let psi = env.map.as_ref().ok_or_else(|| Error::Unbound("Psi".into()))?;
            require_pd("Psi(A)", &psi.apply(need_matrix(env, "A")?)?).is_ok()
                && require_pd("Psi(B)", &psi.apply(need_matrix(env, "B")?)?).is_ok()
        }
        Hypothesis::ScalarOrder => need_scalar(env, "a")? < need_scalar(env, "b")?,
    })
}

fn frob_or_abs<T: Real>(v: &Value<T>) -> T {
    match v {
        Value::Scalar(x) => x.abs(),
        Value::Matrix(m) => m.frobenius_norm(),
    }
}

fn compare<T: Real>(relation: Relation, lhs: &Value<T>, rhs: &Value<T>, tol: T) -> Result<(T, T, T, bool)> {
    Ok(match relation {
        Relation::LoewnerChain | Relation::Psd => {
            let (l, r) = (lhs.clone().into_matrix()?, rhs.clone().into_matrix()?);
            let c = loewner_leq(&l, &r, tol)?;
            (c.slack, c.scale, c.slack / c.scale, c.ordered)
        }
        Relation::ScalarChain => {
            let (l, r) = (lhs.as_scalar()?, rhs.as_scalar()?);
            let slack = r - l;
            let scale = unit_scale(&[l, r]);
            (slack, scale, slack / scale, slack >= -tol * scale)
        }
        Relation::Equality => {
            let d = match (lhs, rhs) {
                (Value::Scalar(a), Value::Scalar(b)) => (*a - *b).abs(),
                (Value::Matrix(a), Value::Matrix(b)) => a.frobenius_distance(b),
                _ => return Err(Error::TermType("equality between a scalar and a matrix".into())),
            };
            let scale = unit_scale(&[frob_or_abs(lhs), frob_or_abs(rhs)]);
            let slack = -d / scale;
            (slack, scale, slack, slack >= -tol)
        }
    })
}

fn link_report<T: Real>(lhs: &str, rhs: &str, c: (T, T, T, bool)) -> LinkReport {
    LinkReport {
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
        slack: c.0.as_f64(),
        scale: c.1.as_f64(),
        relative: c.2.as_f64(),
        pass: c.3,
    }
}

/// Evaluates one term expression against `env`, returning the value and the
/// error estimates of any integrals it contains.
pub fn evaluate_term<T: Real>(expr: &Expr, env: &Env<T>, quad: &QuadratureSpec<T>) -> Result<(Value<T>, Vec<T>)> {
    let mut ev = Evaluator::new(env, *quad);
    let v = ev.eval(expr)?;
    Ok((v, ev.quad_estimates().to_vec()))
}

/// Checks one chain on one input tuple.
///
/// Hypotheses are evaluated first; the first that fails short-circuits to
/// [`Verdict::HypothesisNotMet`]. Otherwise every term is evaluated once and
/// each adjacent pair is compared under the chain's relation.
pub fn check_chain<T: Real>(spec: &ChainSpec, env: &Env<T>, tol: T, quad: &QuadratureSpec<T>) -> Result<ChainReport> {
    spec.validate()?;
    quad.validate()?;
    let quad = &spec.quadrature(quad);
    if spec.uses_fn() {
        let f = env.func.as_ref().ok_or_else(|| Error::Unbound("f".into()))?;
        spec.check_admissible(f)?;
    }
    let mut report = ChainReport {
        chain_id: spec.id.to_string(),
        digest: digest(env, spec.uses_fn()),
        links: Vec::new(),
        audit: None,
        observations: Vec::new(),
        quad_error_estimates: Vec::new(),
        verdict: Verdict::Pass,
    };
    for h in &spec.hypotheses {
        if !hypothesis_holds(h, env, tol)? {
            report.verdict = Verdict::HypothesisNotMet {
                hypothesis: h.describe(),
            };
            return Ok(report);
        }
    }

    let wrap = |label: &str, e: Error| Error::Term {
        chain: spec.id.to_string(),
        term: label.to_string(),
        source: Box::new(e),
    };
    let mut ev = Evaluator::new(env, *quad);
    let mut values = Vec::with_capacity(spec.terms.len());
    for term in &spec.terms {
        values.push(ev.eval(&term.expr).map_err(|e| wrap(term.label, e))?);
    }

    if spec.relation == Relation::Psd {
        let m = values[0]
            .clone()
            .into_matrix()
            .map_err(|e| wrap(spec.terms[0].label, e))?;
        let slack = lambda_min(&m)?;
        let scale = unit_scale(&[operator_norm(&m)?]);
        report.links.push(link_report(
            "0",
            spec.terms[0].label,
            (slack, scale, slack / scale, slack >= -tol * scale),
        ));
    } else {
        for (i, pair) in values.windows(2).enumerate() {
            let c = compare(spec.relation, &pair[0], &pair[1], tol)?;
            report
                .links
                .push(link_report(spec.terms[i].label, spec.terms[i + 1].label, c));
        }
        if values.len() >= 3 {
            let last = values.len() - 1;
            let c = compare(spec.relation, &values[0], &values[last], tol)?;
            report.audit = Some(link_report(spec.terms[0].label, spec.terms[last].label, c));
        }
    }

    for obs in &spec.observations {
        let l = ev.matrix(&obs.lhs).map_err(|e| wrap(obs.label, e))?;
        let r = ev.matrix(&obs.rhs).map_err(|e| wrap(obs.label, e))?;
        report.observations.push(ObservationReport {
            label: obs.label.to_string(),
            forward: lambda_min(&(&r - &l))?.as_f64(),
            backward: lambda_min(&(&l - &r))?.as_f64(),
            distance: l.frobenius_distance(&r).as_f64(),
            scale: unit_scale(&[operator_norm(&l)?, operator_norm(&r)?]).as_f64(),
        });
    }

    report.quad_error_estimates = ev.quad_estimates().iter().map(|e| e.as_f64()).collect();
    if report.links.iter().any(|l| !l.pass) {
        report.verdict = Verdict::Fail;
    }
    Ok(report)
}
