//! Declarative inequality chains and the checker that evaluates them.

mod check;
pub mod expr;
mod limit;
mod registry;

pub use check::{check_chain, evaluate_term, ChainReport, InputDigest, LinkReport, ObservationReport, Verdict};
pub use expr::{Env, Evaluator, Expr, Value};
pub use limit::{nu_limit_profile, NuLimitProfile, NuLimitRow, NU_LIMIT_POINTS};
pub use registry::{chain, registry, REGISTRY_IDS};

use crate::error::{Error, Result};
use crate::funcat::{FnFlag, ScalarFn};
use crate::linalg::Interval;
use crate::quad::QuadratureSpec;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// Adjacent terms ordered in the Loewner order.
    LoewnerChain,
    /// Adjacent scalar terms ordered as reals.
    ScalarChain,
    /// Two terms equal up to relative Frobenius error.
    Equality,
    /// A single term that must be positive semidefinite.
    Psd,
}

impl Relation {
    pub fn name(self) -> &'static str {
        match self {
            Relation::LoewnerChain => "loewner-chain",
            Relation::ScalarChain => "scalar-chain",
            Relation::Equality => "equality",
            Relation::Psd => "psd",
        }
    }
}

/// Which catalogue functions a chain accepts for `f`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FnSlot {
    /// The chain does not involve `f`.
    Unused,
    /// Any catalogue function with positive values on the inputs.
    AnyPositive,
    Requires(FnFlag),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Hypothesis {
    /// Spectra (or values) of the named inputs lie in the domain of `f`.
    InDomain(&'static [&'static str]),
    /// `f(A) <= f(B)`.
    FaLeqFb,
    /// `||A|| < 1` and `||B|| < 1`.
    Contractions,
    /// `||A|| <= ||B||`.
    NormOrdered,
    /// A scalar parameter lies in an interval.
    Param { name: &'static str, range: Interval<f64> },
    /// `lo <= hi` for two scalar parameters.
    ParamOrder { lo: &'static str, hi: &'static str },
    /// `lo <= hi` in the Loewner order for two matrix inputs.
    Dominated { lo: &'static str, hi: &'static str },
    /// `[[A, X], [X, B]] >= 0`.
    BlockPsd,
    /// `Psi(A)` and `Psi(B)` positive definite.
    MapImagesPd,
    /// `a < b` for the scalar inputs `a`, `b`.
    ScalarOrder,
}

impl Hypothesis {
    pub fn describe(&self) -> String {
        match self {
            Hypothesis::InDomain(names) => format!("spectra of {} in dom f", names.join(", ")),
            Hypothesis::FaLeqFb => "f(A) <= f(B)".into(),
            Hypothesis::Contractions => "||A|| < 1, ||B|| < 1".into(),
            Hypothesis::NormOrdered => "||A|| <= ||B||".into(),
            Hypothesis::Param { name, range } => format!("{name} in {range}"),
            Hypothesis::ParamOrder { lo, hi } => format!("{lo} <= {hi}"),
            Hypothesis::Dominated { lo, hi } => format!("{lo} <= {hi}"),
            Hypothesis::BlockPsd => "[[A, X], [X, B]] >= 0".into(),
            Hypothesis::MapImagesPd => "Psi(A), Psi(B) > 0".into(),
            Hypothesis::ScalarOrder => "a < b".into(),
        }
    }
}

/// How the campaign draws inputs for a chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputPlan {
    /// Independent `A`, `B` (contractions when `f` requires it).
    Pair,
    /// `A`, `B` with `f(A) <= f(B)`.
    FaLeqFbPair,
    /// Independent `A`, `B` swapped so that `||A|| <= ||B||`.
    NormOrderedPair,
    /// Contractions `A`, `B` with norm at most the configured cap.
    ContractionPair,
    /// `A`, `B` and `C = A + P`, `D = B + Q`.
    DominatedPairs,
    /// `A`, `B` and `X = A#B + eps H`.
    AndoPerturbation,
    /// `A`, `B` and a positive linear map `Psi`.
    PairWithMap,
    /// Scalars `a < b` drawn uniformly.
    ScalarInterval,
    /// Scalars `a < b` drawn log-uniformly.
    LogScalarInterval,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ParamSampler {
    Uniform {
        name: &'static str,
        lo: f64,
        hi: f64,
    },
    Choice {
        name: &'static str,
        values: &'static [f64],
    },
    /// Two uniform draws on `[lo, hi]`, assigned in increasing order.
    Sorted {
        low: &'static str,
        high: &'static str,
        lo: f64,
        hi: f64,
    },
}

impl ParamSampler {
    pub fn names(&self) -> Vec<&'static str> {
        match self {
            ParamSampler::Uniform { name, .. } | ParamSampler::Choice { name, .. } => vec![name],
            ParamSampler::Sorted { low, high, .. } => vec![low, high],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub label: &'static str,
    pub expr: Expr,
}

/// A pair of quantities compared for study only; never part of a verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct Observation {
    pub label: &'static str,
    pub lhs: Expr,
    pub rhs: Expr,
}

#[derive(Clone, Debug)]
pub struct ChainSpec {
    pub id: &'static str,
    pub statement: &'static str,
    pub relation: Relation,
    pub fn_slot: FnSlot,
    pub default_fn: Option<&'static str>,
    pub plan: InputPlan,
    pub params: Vec<ParamSampler>,
    pub hypotheses: Vec<Hypothesis>,
    pub terms: Vec<Term>,
    pub observations: Vec<Observation>,
    /// Lower bound on the quadrature refinement budget, for integrands with
    /// kinks where uniform Gauss-Legendre converges only algebraically.
    pub refinement_floor: usize,
}

impl ChainSpec {
    /// `quad` with the refinement budget raised to this chain's floor.
    pub fn quadrature<T: Real>(&self, quad: &QuadratureSpec<T>) -> QuadratureSpec<T> {
        QuadratureSpec {
            max_refinements: quad.max_refinements.max(self.refinement_floor),
            ..*quad
        }
    }

    pub fn uses_fn(&self) -> bool {
        self.fn_slot != FnSlot::Unused
    }

    /// Rejects `f` when the chain's function slot does not admit it.
    pub fn check_admissible<T: Real>(&self, f: &ScalarFn<T>) -> Result<()> {
        match self.fn_slot {
            FnSlot::Unused | FnSlot::AnyPositive => Ok(()),
            FnSlot::Requires(flag) if f.has(flag) => Ok(()),
            FnSlot::Requires(flag) => Err(Error::Inadmissible {
                chain: self.id.to_string(),
                function: f.id().to_string(),
                reason: format!("the chain requires a function flagged {flag}"),
            }),
        }
    }

    pub fn admits(&self, flags: &[FnFlag]) -> bool {
        match self.fn_slot {
            FnSlot::Unused | FnSlot::AnyPositive => true,
            FnSlot::Requires(flag) => flags.contains(&flag),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(format!("chain `{}`: {m}", self.id)));
        match self.relation {
            Relation::Equality if self.terms.len() != 2 => bad("equality chains have exactly two terms".into()),
            Relation::Psd if self.terms.len() != 1 => bad("psd checks have exactly one term".into()),
            Relation::LoewnerChain | Relation::ScalarChain if self.terms.len() < 2 => {
                bad("chains need at least two terms".into())
            }
            _ => Ok(()),
        }
    }
}
