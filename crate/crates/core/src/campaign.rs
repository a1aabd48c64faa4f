//! Randomized verification campaigns over the chain registry.
//!
//! Trial `i` of a campaign draws its inputs from the ChaCha stream `i` of the
//! campaign seed, so trials run in parallel and are merged by index; the
//! report is a pure function of the configuration.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::chains::{chain, check_chain, ChainReport, ChainSpec, Env, InputPlan, ParamSampler, REGISTRY_IDS};
use crate::error::{Error, Result};
use crate::funcat::{catalogue_fn, FnFlag, PositiveLinearMap, ScalarFn};
use crate::gen::{
    operand_from, pair_with_hypothesis, psd_perturbation, random_factor, random_orthogonal, trial_rng, uniform,
    unit_symmetric, GenConfig, PairStrategy,
};
use crate::linalg::{operator_norm, SymMatrix};
use crate::means::gmean;
use crate::quad::QuadratureSpec;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Number of smallest slacks kept by [`run_search`].
pub const SEARCH_KEEP: usize = 10;

/// Replacement distribution for a chain parameter.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamOverride {
    Uniform { lo: f64, hi: f64 },
    Choice(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CampaignConfig {
    /// Chain ids; empty means the whole registry.
    pub chains: Vec<String>,
    /// Function id; `None` uses each chain's default.
    pub fn_id: Option<String>,
    pub poly_coeffs: Option<Vec<f64>>,
    pub trials: usize,
    pub dims: Vec<usize>,
    pub seed: u64,
    pub tol: f64,
    pub quad: QuadratureSpec<f64>,
    pub cond_max: f64,
    pub spectrum: (f64, f64),
    pub norm_cap: f64,
    pub strategy: PairStrategy,
    pub params: BTreeMap<String, ParamOverride>,
    /// Ando proposals `X = A#B + eps H` use a negative semidefinite `H`,
    /// which raises the fraction of draws passing the block filter.
    pub ando_widened: bool,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            chains: Vec::new(),
            fn_id: None,
            poly_coeffs: None,
            trials: 500,
            dims: (2..=8).collect(),
            seed: 1,
            tol: 1e-8,
            quad: QuadratureSpec::default(),
            cond_max: 100.0,
            spectrum: (0.1, 10.0),
            norm_cap: 0.9,
            strategy: PairStrategy::Construct,
            params: BTreeMap::new(),
            ando_widened: false,
        }
    }
}

impl CampaignConfig {
    pub fn for_chain(id: &str) -> Self {
        CampaignConfig {
            chains: vec![id.to_string()],
            ..Self::default()
        }
    }

    /// Stress settings: condition cap `1e4` over the spectrum `[0.01, 100]`.
    pub fn relaxed(mut self) -> Self {
        self.cond_max = 1e4;
        self.spectrum = (0.01, 100.0);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.dims.is_empty() || self.dims.contains(&0) {
            return bad("dims must be a non-empty list of positive integers");
        }
        if !(self.tol >= 0.0) {
            return bad("tol must be non-negative");
        }
        if !(self.norm_cap > 0.0 && self.norm_cap < 1.0) {
            return bad("norm cap must lie in (0, 1)");
        }
        self.quad.validate()?;
        for &d in &self.dims {
            self.gen_config(d, false).validate()?;
        }
        for id in &self.chains {
            chain(id)?;
        }
        Ok(())
    }

    pub fn chain_specs(&self) -> Result<Vec<ChainSpec>> {
        if self.chains.is_empty() || self.chains.iter().any(|c| c == "all") {
            REGISTRY_IDS.iter().map(|id| chain(id)).collect()
        } else {
            self.chains.iter().map(|id| chain(id)).collect()
        }
    }

    fn gen_config(&self, dim: usize, contraction: bool) -> GenConfig<f64> {
        let g = GenConfig::new(self.seed, dim)
            .with_cond_max(self.cond_max)
            .with_spectrum(self.spectrum.0, self.spectrum.1);
        if contraction {
            g.with_norm_cap(self.norm_cap)
        } else {
            g
        }
    }

    /// Dimension used by trial `stream`: the dims list, cycled.
    pub fn dim_for(&self, stream: u64) -> usize {
        self.dims[(stream % self.dims.len() as u64) as usize]
    }

    fn digest(&self) -> ConfigDigest {
        ConfigDigest {
            chains: self.chains.clone(),
            fn_id: self.fn_id.clone(),
            trials: self.trials,
            dims: self.dims.clone(),
            seed: self.seed,
            tol: self.tol,
            quad: QuadDigest {
                base_order: self.quad.base_order,
                max_refinements: self.quad.max_refinements,
                abs_tol: self.quad.abs_tol,
            },
            cond_max: self.cond_max,
            spectrum: [self.spectrum.0, self.spectrum.1],
            norm_cap: self.norm_cap,
            strategy: match self.strategy {
                PairStrategy::Construct => "construct",
                PairStrategy::Reject => "reject",
            },
            params: self.params.clone(),
            ando_widened: self.ando_widened,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadDigest {
    pub base_order: usize,
    pub max_refinements: usize,
    pub abs_tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfigDigest {
    pub chains: Vec<String>,
    #[serde(rename = "fn")]
    pub fn_id: Option<String>,
    pub trials: usize,
    pub dims: Vec<usize>,
    pub seed: u64,
    pub tol: f64,
    pub quad: QuadDigest,
    pub cond_max: f64,
    pub spectrum: [f64; 2],
    pub norm_cap: f64,
    pub strategy: &'static str,
    pub params: BTreeMap<String, ParamOverride>,
    pub ando_widened: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TrialDigest {
    pub seed: u64,
    pub stream: u64,
    pub dim: usize,
}

#[derive(Clone, Debug)]
pub struct TrialOutcome {
    pub digest: TrialDigest,
    pub result: Result<ChainReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainAggregate {
    pub id: String,
    #[serde(rename = "fn")]
    pub fn_id: Option<String>,
    pub trials_run: usize,
    pub hypothesis_met: usize,
    pub failures: usize,
    /// Trials whose inputs could not be generated or whose terms failed to evaluate.
    pub errors: usize,
    pub first_error: Option<String>,
    /// Transitivity audits that failed while every adjacent link passed.
    pub audit_failures: usize,
    /// Smallest relative link slack over hypothesis-met trials.
    pub min_slack: Option<f64>,
    pub argmin: Option<TrialDigest>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Errors,
    Violation,
    Vacuous,
}

impl Outcome {
    /// Process exit code: 0 pass, 1 errors, 2 violation, 3 vacuous hypotheses.
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Errors => 1,
            Outcome::Violation => 2,
            Outcome::Vacuous => 3,
        }
    }
}

impl ChainAggregate {
    pub fn outcome(&self) -> Outcome {
        if self.failures > 0 {
            Outcome::Violation
        } else if self.errors > 0 {
            Outcome::Errors
        } else if self.hypothesis_met == 0 {
            Outcome::Vacuous
        } else {
            Outcome::Pass
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CampaignReport {
    pub version: String,
    pub timestamp: String,
    pub config: ConfigDigest,
    pub chains: Vec<ChainAggregate>,
}

impl CampaignReport {
    /// The most severe outcome over all chains.
    pub fn outcome(&self) -> Outcome {
        let all: Vec<Outcome> = self.chains.iter().map(|c| c.outcome()).collect();
        [Outcome::Violation, Outcome::Errors, Outcome::Vacuous]
            .into_iter()
            .find(|o| all.contains(o))
            .unwrap_or(Outcome::Pass)
    }

    pub fn chain(&self, id: &str) -> Option<&ChainAggregate> {
        self.chains.iter().find(|c| c.id == id)
    }
}

/// Seconds since the Unix epoch, as a string.
pub fn timestamp() -> String {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs().to_string())
        .unwrap_or_default()
}

/// The function a chain runs with under `cfg`, checked for admissibility.
pub fn resolve_fn(spec: &ChainSpec, cfg: &CampaignConfig) -> Result<Option<ScalarFn<f64>>> {
    if !spec.uses_fn() {
        return Ok(None);
    }
    let id = cfg
        .fn_id
        .as_deref()
        .or(spec.default_fn)
        .expect("chains using f have a default");
    let f = match (id, &cfg.poly_coeffs) {
        ("poly_nonneg", Some(c)) => ScalarFn::poly_nonneg(c)?,
        _ => catalogue_fn(id)?,
    };
    spec.check_admissible(&f)?;
    Ok(Some(f))
}

fn sample_param<R: Rng + ?Sized>(dist: &ParamOverride, rng: &mut R) -> f64 {
    match dist {
        ParamOverride::Uniform { lo, hi } => uniform(rng, *lo, *hi),
        ParamOverride::Choice(vals) => vals[rng.gen_range(0..vals.len())],
    }
}

fn ando_direction<R: Rng + ?Sized>(n: usize, widened: bool, rng: &mut R) -> Result<SymMatrix<f64>> {
    if !widened {
        return unit_symmetric(n, rng);
    }
    let q = random_orthogonal(n, rng);
    let mut h: Vec<f64> = (0..n).map(|_| uniform(rng, -1.0, 0.0)).collect();
    let m = h.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    h.iter_mut().for_each(|x| *x /= m);
    Ok(SymMatrix::from_spectrum(&q, &h))
}

fn random_map<R: Rng + ?Sized>(n: usize, stream: u64, rng: &mut R) -> Result<PositiveLinearMap<f64>> {
    Ok(match stream % 3 {
        0 => PositiveLinearMap::compression(random_factor(n, rng)),
        1 => {
            let len = rng.gen_range(1..=n);
            let start = rng.gen_range(0..=n - len);
            PositiveLinearMap::diagonal_block(n, start, len)?
        }
        _ => PositiveLinearMap::normalized_trace(n),
    })
}

/// Draws the inputs of one trial: parameters first, then matrices or scalars
/// according to the chain's input plan.
pub fn draw_inputs(spec: &ChainSpec, f: Option<&ScalarFn<f64>>, cfg: &CampaignConfig, stream: u64) -> Result<Env<f64>> {
    let dim = cfg.dim_for(stream);
    let mut rng = trial_rng(cfg.seed, stream);
    let mut env = Env::new();
    env.origin = Some((cfg.seed, stream));

    for p in &spec.params {
        let over = |name: &str| cfg.params.get(name);
        match p {
            ParamSampler::Uniform { name, lo, hi } => {
                let x = match over(name) {
                    Some(d) => sample_param(d, &mut rng),
                    None => uniform(&mut rng, *lo, *hi),
                };
                env.set_scalar(name, x);
            }
            ParamSampler::Choice { name, values } => {
                let x = match over(name) {
                    Some(d) => sample_param(d, &mut rng),
                    None => values[rng.gen_range(0..values.len())],
                };
                env.set_scalar(name, x);
            }
            ParamSampler::Sorted { low, high, lo, hi } => {
                let mut x = uniform(&mut rng, *lo, *hi);
                let mut y = uniform(&mut rng, *lo, *hi);
                if y < x {
                    std::mem::swap(&mut x, &mut y);
                }
                env.set_scalar(low, x);
                env.set_scalar(high, y);
            }
        }
    }

    let needs_cap = spec.plan == InputPlan::ContractionPair || f.is_some_and(|f| f.has(FnFlag::RequiresContraction));
    let g = cfg.gen_config(dim, needs_cap);
    match spec.plan {
        InputPlan::Pair | InputPlan::ContractionPair => {
            env.set_matrix("A", operand_from(&g, &mut rng)?);
            env.set_matrix("B", operand_from(&g, &mut rng)?);
        }
        InputPlan::FaLeqFbPair => {
            let f = f.ok_or_else(|| Error::Unbound("f".into()))?;
            let pair = pair_with_hypothesis(f, &g, cfg.strategy, cfg.tol, &mut rng)?;
            env.set_matrix("A", pair.a);
            env.set_matrix("B", pair.b);
        }
        InputPlan::NormOrderedPair => {
            let mut a = operand_from(&g, &mut rng)?;
            let mut b = operand_from(&g, &mut rng)?;
            if operator_norm(&a)? > operator_norm(&b)? {
                std::mem::swap(&mut a, &mut b);
            }
            env.set_matrix("A", a);
            env.set_matrix("B", b);
        }
        InputPlan::DominatedPairs => {
            let a = operand_from(&g, &mut rng)?;
            let b = operand_from(&g, &mut rng)?;
            let c = &a + &psd_perturbation(&g, &mut rng)?;
            let d = &b + &psd_perturbation(&g, &mut rng)?;
            env.set_matrix("A", a);
            env.set_matrix("B", b);
            env.set_matrix("C", c);
            env.set_matrix("D", d);
        }
        InputPlan::AndoPerturbation => {
            let a = operand_from(&g, &mut rng)?;
            let b = operand_from(&g, &mut rng)?;
            let mid = gmean(&a, &b)?;
            let eps = uniform(&mut rng, 0.0, 0.2 * operator_norm(&mid)?);
            let h = ando_direction(dim, cfg.ando_widened, &mut rng)?;
            env.set_matrix("A", a);
            env.set_matrix("B", b);
            env.set_matrix("X", mid.add_scaled(&h, eps));
        }
        InputPlan::PairWithMap => {
            env.set_matrix("A", operand_from(&g, &mut rng)?);
            env.set_matrix("B", operand_from(&g, &mut rng)?);
            env.map = Some(random_map(dim, stream, &mut rng)?);
        }
        InputPlan::ScalarInterval | InputPlan::LogScalarInterval => {
            let (lo, hi) = cfg.spectrum;
            let draw = |rng: &mut rand_chacha::ChaCha8Rng| {
                if spec.plan == InputPlan::ScalarInterval {
                    uniform(rng, lo, hi)
                } else {
                    uniform(rng, lo.ln(), hi.ln()).exp()
                }
            };
            let (mut a, mut b) = (draw(&mut rng), draw(&mut rng));
            if b < a {
                std::mem::swap(&mut a, &mut b);
            }
            env.set_scalar("a", a);
            env.set_scalar("b", b);
        }
    }
    if let Some(f) = f {
        env.func = Some(f.clone());
    }
    Ok(env)
}

/// Generates inputs for trial `stream` and checks the chain on them.
pub fn run_trial(spec: &ChainSpec, f: Option<&ScalarFn<f64>>, cfg: &CampaignConfig, stream: u64) -> TrialOutcome {
    let digest = TrialDigest {
        seed: cfg.seed,
        stream,
        dim: cfg.dim_for(stream),
    };
    let result = draw_inputs(spec, f, cfg, stream).and_then(|env| check_chain(spec, &env, cfg.tol, &cfg.quad));
    TrialOutcome { digest, result }
}

/// Runs trials `0..cfg.trials` of one chain in parallel, in index order.
pub fn run_trials(spec: &ChainSpec, f: Option<&ScalarFn<f64>>, cfg: &CampaignConfig) -> Vec<TrialOutcome> {
    (0..cfg.trials as u64)
        .into_par_iter()
        .map(|stream| run_trial(spec, f, cfg, stream))
        .collect()
}

pub fn aggregate(spec: &ChainSpec, f: Option<&ScalarFn<f64>>, outcomes: &[TrialOutcome]) -> ChainAggregate {
    let mut agg = ChainAggregate {
        id: spec.id.to_string(),
        fn_id: f.map(|f| f.id().to_string()),
        trials_run: outcomes.len(),
        hypothesis_met: 0,
        failures: 0,
        errors: 0,
        first_error: None,
        audit_failures: 0,
        min_slack: None,
        argmin: None,
    };
    for o in outcomes {
        let report = match &o.result {
            Ok(r) => r,
            Err(e) => {
                agg.errors += 1;
                if agg.first_error.is_none() {
                    agg.first_error = Some(format!("stream {}: {e}", o.digest.stream));
                }
                continue;
            }
        };
        if !report.hypothesis_met() {
            continue;
        }
        agg.hypothesis_met += 1;
        if !report.passed() {
            agg.failures += 1;
        } else if report.audit.as_ref().is_some_and(|a| !a.pass) {
            agg.audit_failures += 1;
        }
        if let Some(s) = report.min_relative_slack() {
            if agg.min_slack.is_none_or(|m| s < m) {
                agg.min_slack = Some(s);
                agg.argmin = Some(o.digest);
            }
        }
    }
    agg
}

/// Runs every configured chain and assembles the report.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<CampaignReport> {
    cfg.validate()?;
    let specs = cfg.chain_specs()?;
    let fns = specs.iter().map(|s| resolve_fn(s, cfg)).collect::<Result<Vec<_>>>()?;
    let chains = specs
        .iter()
        .zip(&fns)
        .map(|(spec, f)| aggregate(spec, f.as_ref(), &run_trials(spec, f.as_ref(), cfg)))
        .collect();
    Ok(CampaignReport {
        version: VERSION.to_string(),
        timestamp: timestamp(),
        config: cfg.digest(),
        chains,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchHit {
    pub seed: u64,
    pub stream: u64,
    pub dim: usize,
    pub params: BTreeMap<String, f64>,
    pub link: usize,
    pub lhs: String,
    pub rhs: String,
    pub slack: f64,
    pub relative: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchReport {
    pub version: String,
    pub timestamp: String,
    pub config: ConfigDigest,
    pub chain: String,
    #[serde(rename = "fn")]
    pub fn_id: Option<String>,
    pub trials_run: usize,
    pub hypothesis_met: usize,
    pub errors: usize,
    pub first_error: Option<String>,
    /// Trials with a link below `-tol * scale`.
    pub violations: usize,
    /// The smallest relative slacks, ascending.
    pub smallest: Vec<SearchHit>,
}

impl SearchReport {
    pub fn outcome(&self) -> Outcome {
        if self.violations > 0 {
            Outcome::Violation
        } else if self.errors > 0 {
            Outcome::Errors
        } else if self.hypothesis_met == 0 {
            Outcome::Vacuous
        } else {
            Outcome::Pass
        }
    }
}

/// Runs `cfg.trials` trials of one chain and keeps the `keep` smallest
/// per-trial slacks with the digests needed to replay them.
pub fn run_search(id: &str, cfg: &CampaignConfig, keep: usize) -> Result<SearchReport> {
    cfg.validate()?;
    let spec = chain(id)?;
    let f = resolve_fn(&spec, cfg)?;
    let outcomes = run_trials(&spec, f.as_ref(), cfg);
    let agg = aggregate(&spec, f.as_ref(), &outcomes);
    let mut hits: Vec<SearchHit> = outcomes
        .iter()
        .filter_map(|o| {
            let r = o.result.as_ref().ok().filter(|r| r.hypothesis_met())?;
            let (link, l) = r.worst_link()?;
            Some(SearchHit {
                seed: o.digest.seed,
                stream: o.digest.stream,
                dim: o.digest.dim,
                params: r.digest.params.clone(),
                link,
                lhs: l.lhs.clone(),
                rhs: l.rhs.clone(),
                slack: l.slack,
                relative: l.relative,
            })
        })
        .collect();
    hits.sort_by(|a, b| a.relative.total_cmp(&b.relative).then(a.stream.cmp(&b.stream)));
    hits.truncate(keep);
    Ok(SearchReport {
        version: VERSION.to_string(),
        timestamp: timestamp(),
        config: CampaignConfig {
            chains: vec![id.to_string()],
            ..cfg.clone()
        }
        .digest(),
        chain: id.to_string(),
        fn_id: agg.fn_id,
        trials_run: agg.trials_run,
        hypothesis_met: agg.hypothesis_met,
        errors: agg.errors,
        first_error: agg.first_error,
        violations: agg.failures,
        smallest: hits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(id: &str, trials: usize) -> CampaignConfig {
        CampaignConfig {
            trials,
            dims: vec![2, 3],
            ..CampaignConfig::for_chain(id)
        }
    }

    #[test]
    fn hh_mr_small_campaign_passes() {
        let r = run_campaign(&small("hh-mr", 20)).unwrap();
        let c = r.chain("hh-mr").unwrap();
        assert_eq!(c.trials_run, 20);
        assert_eq!(c.hypothesis_met, 20);
        assert_eq!(c.failures, 0);
        assert_eq!(r.outcome(), Outcome::Pass);
        assert!(c.argmin.is_some());
    }

    #[test]
    fn campaigns_are_deterministic() {
        let mut a = run_campaign(&small("geo-def", 16)).unwrap();
        let mut b = run_campaign(&small("geo-def", 16)).unwrap();
        a.timestamp.clear();
        b.timestamp.clear();
        assert_eq!(a, b);
    }

    #[test]
    fn default_functions_are_admissible() {
        let cfg = CampaignConfig::default();
        for spec in crate::chains::registry() {
            let f = resolve_fn(&spec, &cfg).unwrap();
            assert_eq!(f.is_some(), spec.uses_fn());
        }
    }

    #[test]
    fn inadmissible_function_is_a_config_error() {
        let cfg = CampaignConfig {
            fn_id: Some("exp".into()),
            ..small("geo-def", 5)
        };
        assert!(matches!(run_campaign(&cfg), Err(Error::Inadmissible { .. })));
    }

    #[test]
    fn config_validation() {
        assert!(CampaignConfig {
            trials: 0,
            ..small("hh-mr", 1)
        }
        .validate()
        .is_err());
        assert!(CampaignConfig {
            dims: vec![],
            ..small("hh-mr", 1)
        }
        .validate()
        .is_err());
        assert!(matches!(small("nope", 1).validate(), Err(Error::UnknownChain { .. })));
    }

    #[test]
    fn param_override_applies() {
        let mut cfg = small("sta-low", 4);
        cfg.params.insert("nu".into(), ParamOverride::Choice(vec![0.25]));
        let spec = chain("sta-low").unwrap();
        let f = resolve_fn(&spec, &cfg).unwrap();
        for s in 0..4 {
            let env = draw_inputs(&spec, f.as_ref(), &cfg, s).unwrap();
            assert_eq!(env.get_scalar("nu"), Some(0.25));
        }
    }

    #[test]
    fn search_keeps_sorted_minima() {
        let cfg = small("hh-mr", 15).relaxed();
        let r = run_search("hh-mr", &cfg, SEARCH_KEEP).unwrap();
        assert_eq!(r.smallest.len(), 10);
        assert!(r.smallest.windows(2).all(|w| w[0].relative <= w[1].relative));
        assert_eq!(r.outcome(), Outcome::Pass);
    }

    #[test]
    fn search_with_budget_one() {
        let r = run_search("hh-mr", &small("hh-mr", 1).relaxed(), SEARCH_KEEP).unwrap();
        assert_eq!(r.smallest.len(), 1);
    }
}
