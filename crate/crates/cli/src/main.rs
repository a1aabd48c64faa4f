use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use opgeo::campaign::{run_campaign, run_search, CampaignConfig, Outcome, ParamOverride, SEARCH_KEEP};
use opgeo::chains::{evaluate_term, ChainSpec, InputPlan, ParamSampler, Value};
use opgeo::funcat::catalogue;
use opgeo::gen::PairStrategy;
use opgeo::linalg::{read_matrix_file, write_matrix_file};
use opgeo::{catalogue_fn, chain, gmean_t, Env, Fn64, Mat, Quad};

#[derive(Parser)]
#[command(
    name = "opgeo",
    version,
    about = "Operator geometric means and Hermite-Hadamard chain checks"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a verification campaign over one or more chains.
    Verify(VerifyArgs),
    /// Compute a single mean, function value or chain term from matrix files.
    Compute {
        #[command(subcommand)]
        what: ComputeCmd,
    },
    /// Hunt for the smallest slacks of one chain under relaxed conditioning.
    Search(SearchArgs),
    /// List registered chains.
    ListChains,
    /// List catalogued scalar functions.
    ListFns,
}

#[derive(Args, Clone)]
struct FnArgs {
    /// Function id (see list-fns); defaults to the chain's own choice.
    #[arg(long = "f")]
    f: Option<String>,
    /// Coefficients c0,c1,... for `poly_nonneg`.
    #[arg(long, value_delimiter = ',')]
    poly: Option<Vec<f64>>,
}

#[derive(Args, Clone)]
struct QuadArgs {
    /// Gauss-Legendre nodes per panel.
    #[arg(long)]
    quad_order: Option<usize>,
    /// Absolute tolerance of the quadrature error estimate.
    #[arg(long)]
    quad_tol: Option<f64>,
    /// Maximum number of panel doublings.
    #[arg(long)]
    quad_refine: Option<usize>,
}

impl QuadArgs {
    fn apply(&self, mut q: Quad) -> Quad {
        if let Some(n) = self.quad_order {
            q.base_order = n;
        }
        if let Some(t) = self.quad_tol {
            q.abs_tol = t;
        }
        if let Some(r) = self.quad_refine {
            q.max_refinements = r;
        }
        q
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    Construct,
    Reject,
}

#[derive(Args, Clone)]
struct SampleArgs {
    #[command(flatten)]
    func: FnArgs,
    /// Single dimension (shorthand for --dims N).
    #[arg(long, conflicts_with = "dims")]
    dim: Option<usize>,
    /// Dimensions cycled over trials.
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long)]
    cond_max: Option<f64>,
    /// Spectrum interval as lo,hi.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    spectrum: Option<Vec<f64>>,
    /// Operator norm bound for contraction inputs.
    #[arg(long)]
    norm_cap: Option<f64>,
    #[arg(long, value_enum)]
    strategy: Option<Strategy>,
    /// Parameter override `name=x` or `name=lo:hi`.
    #[arg(long = "param")]
    params: Vec<String>,
    /// Use negative semidefinite directions for Ando perturbations.
    #[arg(long)]
    widen_ando: bool,
    #[command(flatten)]
    quad: QuadArgs,
    /// Where to write the JSON report.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Chain ids, comma separated, or `all`.
    #[arg(long, value_delimiter = ',', required = true)]
    chain: Vec<String>,
    #[arg(long, default_value_t = 500)]
    trials: usize,
    #[command(flatten)]
    sample: SampleArgs,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    chain: String,
    /// Number of trials.
    #[arg(long, default_value_t = 1000)]
    budget: usize,
    /// Number of smallest slacks kept in the report.
    #[arg(long, default_value_t = SEARCH_KEEP)]
    keep: usize,
    #[command(flatten)]
    sample: SampleArgs,
}

#[derive(Subcommand)]
enum ComputeCmd {
    /// Weighted geometric mean A #_t B.
    Gmean {
        #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
        t: f64,
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spectral function value f(A).
    Fn {
        #[command(flatten)]
        func: FnArgs,
        a: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One term of a registered chain, evaluated on the given matrices.
    Term {
        #[arg(long)]
        chain: String,
        /// Zero-based term index.
        #[arg(long)]
        term: usize,
        #[command(flatten)]
        func: FnArgs,
        /// Parameter value `name=x`; scalar chains take `a=` and `b=` here.
        #[arg(long = "param")]
        params: Vec<String>,
        #[command(flatten)]
        quad: QuadArgs,
        /// Matrix files bound to the chain's operands in order (A, B, ...).
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.cmd {
        Cmd::Verify(v) => verify(v),
        Cmd::Search(s) => search(s),
        Cmd::Compute { what } => compute(what),
        Cmd::ListChains => {
            let mut out = std::io::stdout().lock();
            for spec in opgeo::registry() {
                let f = spec.default_fn.map(|f| format!(" [f = {f}]")).unwrap_or_default();
                writeln!(out, "{:16} {}{f}", spec.id, spec.statement)?;
            }
            Ok(0)
        }
        Cmd::ListFns => {
            let mut out = std::io::stdout().lock();
            for f in catalogue::<f64>() {
                let flags: Vec<&str> = f.flags().iter().map(|x| x.name()).collect();
                writeln!(
                    out,
                    "{:14} {:28} dom {} [{}]",
                    f.id(),
                    f.formula(),
                    f.domain(),
                    flags.join(", ")
                )?;
            }
            Ok(0)
        }
    }
}

fn parse_override(s: &str) -> Result<(String, ParamOverride)> {
    let (name, val) = s
        .split_once('=')
        .ok_or_else(|| anyhow!("parameter `{s}` is not name=value"))?;
    let num = |x: &str| {
        x.trim()
            .parse::<f64>()
            .with_context(|| format!("bad number `{x}` in `{s}`"))
    };
    let over = match val.split_once(':') {
        Some((lo, hi)) => ParamOverride::Uniform {
            lo: num(lo)?,
            hi: num(hi)?,
        },
        None => ParamOverride::Choice(vec![num(val)?]),
    };
    Ok((name.trim().to_string(), over))
}

fn campaign_config(chains: Vec<String>, trials: usize, s: &SampleArgs, search: bool) -> Result<CampaignConfig> {
    let mut cfg = CampaignConfig {
        chains,
        trials,
        seed: s.seed,
        tol: s.tol,
        fn_id: s.func.f.clone(),
        poly_coeffs: s.func.poly.clone(),
        ando_widened: s.widen_ando,
        ..CampaignConfig::default()
    };
    if search {
        cfg = cfg.relaxed();
    }
    cfg.quad = s.quad.apply(cfg.quad);
    if let Some(d) = s.dim {
        cfg.dims = vec![d];
    } else if let Some(d) = &s.dims {
        cfg.dims = d.clone();
    }
    if let Some(c) = s.cond_max {
        cfg.cond_max = c;
    }
    if let Some(sp) = &s.spectrum {
        cfg.spectrum = (sp[0], sp[1]);
    }
    if let Some(n) = s.norm_cap {
        cfg.norm_cap = n;
    }
    if let Some(st) = s.strategy {
        cfg.strategy = match st {
            Strategy::Construct => PairStrategy::Construct,
            Strategy::Reject => PairStrategy::Reject,
        };
    }
    for p in &s.params {
        let (k, v) = parse_override(p)?;
        cfg.params.insert(k, v);
    }
    cfg.validate()?;
    let specs = cfg.chain_specs()?;
    for spec in &specs {
        opgeo::campaign::resolve_fn(spec, &cfg)?;
    }
    for name in cfg.params.keys() {
        if !specs.iter().any(|s| param_names(s).contains(&name.as_str())) {
            bail!("no selected chain has a parameter `{name}`");
        }
    }
    Ok(cfg)
}

fn write_report(path: Option<&Path>, json: String) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, json + "\n").with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn outcome_code(o: Outcome) -> u8 {
    o.exit_code() as u8
}

fn verify(v: VerifyArgs) -> Result<u8> {
    let cfg = campaign_config(v.chain, v.trials, &v.sample, false)?;
    let report = run_campaign(&cfg)?;
    for c in &report.chains {
        let slack = c.min_slack.map(|s| format!("{s:.3e}")).unwrap_or_else(|| "-".into());
        eprintln!(
            "{:16} fn={:12} met {}/{} failures {} errors {} min slack {slack}",
            c.id,
            c.fn_id.as_deref().unwrap_or("-"),
            c.hypothesis_met,
            c.trials_run,
            c.failures,
            c.errors
        );
        if let Some(e) = &c.first_error {
            eprintln!("  first error: {e}");
        }
        if c.trials_run > 0 && c.hypothesis_met == 0 {
            eprintln!("  warning: no trial met the hypotheses of {}", c.id);
        }
    }
    write_report(v.sample.report.as_deref(), serde_json::to_string_pretty(&report)?)?;
    Ok(outcome_code(report.outcome()))
}

fn search(s: SearchArgs) -> Result<u8> {
    let cfg = campaign_config(vec![s.chain.clone()], s.budget, &s.sample, true)?;
    let report = run_search(&s.chain, &cfg, s.keep)?;
    eprintln!(
        "{}: {} trials, met {}, violations {}, errors {}",
        report.chain, report.trials_run, report.hypothesis_met, report.violations, report.errors
    );
    if let Some(h) = report.smallest.first() {
        eprintln!(
            "  smallest relative slack {:.3e} (stream {}, dim {})",
            h.relative, h.stream, h.dim
        );
    }
    write_report(s.sample.report.as_deref(), serde_json::to_string_pretty(&report)?)?;
    Ok(outcome_code(report.outcome()))
}

fn resolve_fn(args: &FnArgs, default: Option<&str>) -> Result<Fn64> {
    let id = args
        .f
        .as_deref()
        .or(default)
        .ok_or_else(|| anyhow!("no function given; pass --f"))?;
    Ok(match (id, &args.poly) {
        ("poly_nonneg", Some(c)) => Fn64::poly_nonneg(c)?,
        _ => catalogue_fn(id)?,
    })
}

fn emit_matrix(m: &Mat, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => write_matrix_file(p, m).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{}", opgeo::linalg::format_matrix(m));
            Ok(())
        }
    }
}

fn read(p: &Path) -> Result<Mat> {
    read_matrix_file(p).with_context(|| format!("reading {}", p.display()))
}

fn operand_names(plan: InputPlan) -> Result<&'static [&'static str]> {
    Ok(match plan {
        InputPlan::Pair | InputPlan::FaLeqFbPair | InputPlan::NormOrderedPair | InputPlan::ContractionPair => {
            &["A", "B"]
        }
        InputPlan::DominatedPairs => &["A", "B", "C", "D"],
        InputPlan::AndoPerturbation => &["A", "B", "X"],
        InputPlan::ScalarInterval | InputPlan::LogScalarInterval => &[],
        InputPlan::PairWithMap => bail!("chains with a positive linear map cannot be computed from files"),
    })
}

fn param_names(spec: &ChainSpec) -> Vec<&'static str> {
    let mut names = Vec::new();
    for p in &spec.params {
        match p {
            ParamSampler::Uniform { name, .. } | ParamSampler::Choice { name, .. } => names.push(*name),
            ParamSampler::Sorted { low, high, .. } => names.extend([*low, *high]),
        }
    }
    names
}

fn compute(what: ComputeCmd) -> Result<u8> {
    match what {
        ComputeCmd::Gmean { t, a, b, out } => {
            let g = gmean_t(&read(&a)?, &read(&b)?, t)?;
            emit_matrix(&g, out.as_deref())?;
        }
        ComputeCmd::Fn { func, a, out } => {
            let f = resolve_fn(&func, None)?;
            emit_matrix(&f.apply(&read(&a)?)?, out.as_deref())?;
        }
        ComputeCmd::Term {
            chain: id,
            term,
            func,
            params,
            quad,
            inputs,
            out,
        } => {
            let spec = chain(&id)?;
            let t = spec
                .terms
                .get(term)
                .ok_or_else(|| anyhow!("chain {id} has {} terms", spec.terms.len()))?;
            let names = operand_names(spec.plan)?;
            if inputs.len() != names.len() {
                bail!("chain {id} takes {} matrix files ({})", names.len(), names.join(", "));
            }
            let mut env = Env::new();
            for (name, path) in names.iter().zip(&inputs) {
                env.set_matrix(name, read(path)?);
            }
            let mut known = param_names(&spec);
            if names.is_empty() {
                known.extend(["a", "b"]);
            }
            for p in &params {
                let (k, v) = p
                    .split_once('=')
                    .ok_or_else(|| anyhow!("parameter `{p}` is not name=value"))?;
                let name = known
                    .iter()
                    .find(|n| **n == k.trim())
                    .ok_or_else(|| anyhow!("chain {id} has no parameter `{k}`; known: {}", known.join(", ")))?;
                env.set_scalar(name, v.trim().parse().with_context(|| format!("bad value in `{p}`"))?);
            }
            if spec.uses_fn() {
                let f = resolve_fn(&func, spec.default_fn)?;
                spec.check_admissible(&f)?;
                env = env.with_fn(f);
            }
            let (value, estimates) = evaluate_term(&t.expr, &env, &spec.quadrature(&quad.apply(Quad::default())))?;
            match value {
                Value::Scalar(x) => println!("{x:.17e}"),
                Value::Matrix(m) => emit_matrix(&m, out.as_deref())?,
            }
            if let Some(worst) = estimates.iter().copied().reduce(f64::max) {
                eprintln!(
                    "quadrature error estimate {worst:.3e} over {} integrals",
                    estimates.len()
                );
            }
        }
    }
    Ok(0)
}
