//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use opgeo::campaign::{run_campaign, run_trials, CampaignConfig, ChainAggregate, ParamOverride};
use opgeo::chains::{chain, evaluate_term, nu_limit_profile, Env};
use opgeo::funcat::catalogue_fn;
use opgeo::gen::{
    commuting_pair_from, pair_with_hypothesis, random_spd, spd_from, trial_rng, uniform, GenConfig, PairStrategy,
};
use opgeo::linalg::{
    loewner_leq, matrix_function, operator_norm, read_matrix_file, spectral_decompose, Interval, SpectralFn,
};
use opgeo::{gmean, gmean_t, Mat, Quad};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn campaign(id: &str, trials: usize, dims: &[usize]) -> CampaignConfig {
    CampaignConfig {
        trials,
        dims: dims.to_vec(),
        seed: 20_240_601,
        ..CampaignConfig::for_chain(id)
    }
}

fn run(cfg: &CampaignConfig) -> ChainAggregate {
    let report = run_campaign(cfg).expect("campaign configuration");
    report.chains.into_iter().next().expect("one chain")
}

fn clean(a: &ChainAggregate) -> bool {
    a.failures == 0 && a.errors == 0 && a.audit_failures == 0
}

fn summary(a: &ChainAggregate) -> String {
    format!(
        "{}[{}]: met {}/{}, failures {}, errors {}, min slack {:.3e}",
        a.id,
        a.fn_id.as_deref().unwrap_or("-"),
        a.hypothesis_met,
        a.trials_run,
        a.failures,
        a.errors,
        a.min_slack.unwrap_or(f64::NAN)
    )
}

fn all_dims(lo: usize, hi: usize) -> Vec<usize> {
    (lo..=hi).collect()
}

fn c01() -> Outcome {
    let start = Instant::now();
    let unit = run(&CampaignConfig {
        tol: 1e-9,
        ..campaign("mean-interp", 1000, &all_dims(2, 8))
    });
    let mut wide_cfg = CampaignConfig {
        tol: 1e-9,
        cond_max: 20.0,
        seed: 77,
        ..campaign("mean-interp", 200, &all_dims(2, 8))
    };
    for p in ["t", "s", "u"] {
        wide_cfg
            .params
            .insert(p.into(), ParamOverride::Uniform { lo: -0.5, hi: 1.5 });
    }
    let wide = run(&wide_cfg);
    let elapsed = start.elapsed();
    let ok = clean(&unit) && clean(&wide) && unit.hypothesis_met == 1000 && wide.hypothesis_met == 200;
    outcome(
        ok && elapsed < Duration::from_secs(10),
        format!(
            "[0,1]^3 worst rel err {:.2e}, [-0.5,1.5]^3 worst rel err {:.2e}, {:.2}s",
            -unit.min_slack.unwrap_or(f64::NAN),
            -wide.min_slack.unwrap_or(f64::NAN),
            elapsed.as_secs_f64()
        ),
    )
}

fn c02() -> Outcome {
    let start = Instant::now();
    let a = run(&campaign("hh-mr", 500, &all_dims(2, 6)));
    let elapsed = start.elapsed();
    outcome(
        clean(&a) && a.hypothesis_met == 500 && elapsed < Duration::from_secs(60),
        format!("{}, {:.2}s", summary(&a), elapsed.as_secs_f64()),
    )
}

fn c03() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for id in ["hh-mr123", "hh-mr222"] {
        let a = run(&CampaignConfig {
            strategy: PairStrategy::Construct,
            ..campaign(id, 500, &all_dims(2, 8))
        });
        ok &= clean(&a) && a.hypothesis_met == 500;
        parts.push(summary(&a));
    }
    outcome(ok, parts.join("; "))
}

fn c04() -> Outcome {
    let a = run(&campaign("hh-mche", 500, &all_dims(2, 8)));
    outcome(clean(&a) && a.hypothesis_met == 500, summary(&a))
}

fn c05a() -> Outcome {
    let mut ok = true;
    let mut worst = f64::INFINITY;
    let mut runs = 0;
    for (ids, nus) in [
        (["sta-low", "sta-f-low"], [0.0, 0.1, 0.25, 0.4]),
        (["sta-high", "sta-f-high"], [0.6, 0.75, 0.9, 1.0]),
    ] {
        for id in ids {
            for nu in nus {
                let mut cfg = campaign(id, 200, &all_dims(2, 8));
                cfg.params.insert("nu".into(), ParamOverride::Choice(vec![nu]));
                let a = run(&cfg);
                if !(clean(&a) && a.hypothesis_met == 200) {
                    ok = false;
                    eprintln!("  {id} nu={nu}: {}", summary(&a));
                }
                worst = worst.min(a.min_slack.unwrap_or(f64::NAN));
                runs += 1;
            }
        }
    }
    outcome(
        ok,
        format!("{runs} runs of 200 trials, worst relative slack {worst:.3e}"),
    )
}

fn c05b() -> Outcome {
    let f = catalogue_fn::<f64>("inv").unwrap();
    let quad = Quad::default();
    let mut monotone = true;
    let mut worst = 0.0f64;
    let mut worst_term = [0.0f64; 3];
    let inputs = 20;
    for stream in 0..inputs {
        let dim = 2 + (stream as usize % 5);
        let cfg = GenConfig::new(5, dim).with_cond_max(10.0);
        let mut rng = trial_rng(5, stream);
        let pair = pair_with_hypothesis(&f, &cfg, PairStrategy::Construct, 1e-8, &mut rng).unwrap();
        let env = Env::new().matrix("A", pair.a).matrix("B", pair.b).with_fn(f.clone());
        let p = nu_limit_profile(&env, &quad).unwrap();
        monotone &= p.monotone();
        let row = p.row(0.49).unwrap();
        for (w, d) in worst_term.iter_mut().zip(&row.distances) {
            *w = w.max(*d);
        }
        worst = worst.max(p.max_distance(0.49).unwrap());
    }
    outcome(
        monotone && worst < 1e-3,
        format!(
            "{inputs} inputs (cond <= 10): monotone {monotone}; worst distance at nu=0.49 {worst:.3e} \
             (terms {:.2e} / {:.2e} / {:.2e}), required < 1e-3",
            worst_term[0], worst_term[1], worst_term[2]
        ),
    )
}

fn c06() -> Outcome {
    let mut worst = 0.0f64;
    for stream in 0..500u64 {
        let dim = 2 + (stream as usize % 7);
        let cfg = GenConfig::new(6, dim);
        let mut rng = trial_rng(6, stream);
        let a = spd_from(&cfg, &mut rng).unwrap();
        let b = spd_from(&cfg, &mut rng).unwrap();
        let t = uniform(&mut rng, 0.0, 1.0);
        let inv = |m: &Mat| spectral_decompose(m).unwrap().map(|l| 1.0 / l);
        let lhs = inv(&gmean_t(&a, &b, t).unwrap());
        let rhs = gmean_t(&inv(&a), &inv(&b), t).unwrap();
        let scale = 1f64.max(lhs.frobenius_norm()).max(rhs.frobenius_norm());
        worst = worst.max(lhs.frobenius_distance(&rhs) / scale);
    }
    outcome(
        worst <= 1e-9,
        format!("500 trials, worst relative Frobenius gap {worst:.3e}"),
    )
}

fn c07() -> Outcome {
    let resolvent = run(&campaign("resolvent-ineq", 500, &all_dims(2, 8)));
    let moebius = run(&CampaignConfig {
        fn_id: Some("moebius".into()),
        ..campaign("geo-def", 500, &all_dims(2, 8))
    });
    let block = run(&campaign("psd-block", 500, &all_dims(2, 8)));
    let mut ando_cfg = campaign("ando-max", 500, &all_dims(2, 8));
    let mut ando = run(&ando_cfg);
    let narrow_accepted = ando.hypothesis_met;
    if ando.hypothesis_met < 100 {
        ando_cfg.ando_widened = true;
        ando = run(&ando_cfg);
    }
    let ok = clean(&resolvent)
        && resolvent.hypothesis_met == 500
        && clean(&moebius)
        && moebius.hypothesis_met == 500
        && clean(&block)
        && block.hypothesis_met == 500
        && clean(&ando)
        && ando.hypothesis_met >= 100;
    outcome(
        ok,
        format!(
            "{}; {}; {}; ando-max accepted {narrow_accepted} then {} (widened {}), failures {}",
            summary(&resolvent),
            summary(&moebius),
            summary(&block),
            ando.hypothesis_met,
            ando_cfg.ando_widened,
            ando.failures
        ),
    )
}

fn c08() -> Outcome {
    let mut ok = true;
    let mut worst = f64::INFINITY;
    let mut detail = Vec::new();
    for id in ["norm-geo", "norm-cor"] {
        let cfg = CampaignConfig {
            tol: 1e-10,
            ..campaign(id, 500, &all_dims(2, 8))
        };
        let spec = chain(id).unwrap();
        let outcomes = run_trials(&spec, None, &cfg);
        let mut met = 0;
        let mut alphas = std::collections::BTreeSet::new();
        for o in &outcomes {
            let Ok(r) = &o.result else {
                ok = false;
                continue;
            };
            if !r.hypothesis_met() {
                continue;
            }
            met += 1;
            if let Some(a) = r.digest.params.get("alpha") {
                alphas.insert((a * 10.0).round() as i64);
            }
            for l in &r.links {
                worst = worst.min(l.slack);
                ok &= l.slack >= -1e-10;
            }
        }
        ok &= met == 500;
        if id == "norm-geo" {
            ok &= alphas.len() == 9;
        }
        detail.push(format!("{id}: met {met}/500"));
    }
    let last = chain("norm-cor").unwrap().terms.last().unwrap().label;
    ok &= last == "(sqrt(||A|| ||B||) + ||B||) / 2";
    // last term against a direct evaluation
    let a = Mat::from_diagonal(&[1.0, 2.0]);
    let b = Mat::from_diagonal(&[8.0, 3.0]);
    let env = Env::new().matrix("A", a).matrix("B", b);
    let (v, _) = evaluate_term(&chain("norm-cor").unwrap().terms[2].expr, &env, &Quad::default()).unwrap();
    let expect = 0.5 * ((2.0f64 * 8.0).sqrt() + 8.0);
    ok &= (v.as_scalar().unwrap() - expect).abs() < 1e-14;
    outcome(
        ok,
        format!("{}, worst raw slack {worst:.3e}, last term `{last}`", detail.join(", ")),
    )
}

fn c09() -> Outcome {
    let quad = Quad::default();
    let spec = chain("scalar-hh").unwrap();
    let env = Env::new()
        .scalar("a", 1.0)
        .scalar("b", 2.0)
        .with_fn(catalogue_fn("square").unwrap());
    let vals: Vec<f64> = spec
        .terms
        .iter()
        .map(|t| evaluate_term(&t.expr, &env, &quad).unwrap().0.as_scalar().unwrap())
        .collect();
    let closed = (vals[0] - 2.25).abs() < 1e-12 && (vals[1] - 7.0 / 3.0).abs() < 1e-12 && (vals[2] - 2.5).abs() < 1e-12;
    let mut ok = closed;
    let mut parts = vec![format!("[1,2] terms {:.15} {:.15} {:.15}", vals[0], vals[1], vals[2])];
    for (id, f) in [
        ("scalar-hh-ref", "square"),
        ("scalar-hh-ref", "exp"),
        ("scalar-geo-hh", "exp"),
        ("scalar-geo-hh", "poly_nonneg"),
    ] {
        let a = run(&CampaignConfig {
            fn_id: Some(f.into()),
            ..campaign(id, 100, &[1])
        });
        ok &= clean(&a) && a.hypothesis_met == 100;
        parts.push(summary(&a));
    }
    outcome(ok, parts.join("; "))
}

fn c10() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for f in ["square", "inv"] {
        let a = run(&CampaignConfig {
            fn_id: Some(f.into()),
            ..campaign("opconvex-hh", 200, &all_dims(2, 8))
        });
        ok &= clean(&a) && a.hypothesis_met == 200;
        parts.push(summary(&a));
    }
    outcome(ok, parts.join("; "))
}

fn c11() -> Outcome {
    let mut worst = 0.0f64;
    for stream in 0..300u64 {
        let dim = 1 + (stream as usize % 8);
        let cfg = GenConfig::new(11, dim);
        let mut rng = trial_rng(11, stream);
        let (a, b) = commuting_pair_from(&cfg, &mut rng).unwrap();
        let t = uniform(&mut rng, 0.0, 1.0);
        let la = spectral_decompose(&a).unwrap().map(f64::ln);
        let lb = spectral_decompose(&b).unwrap().map(f64::ln);
        let closed = spectral_decompose(&la.scale(1.0 - t).add_scaled(&lb, t))
            .unwrap()
            .map(f64::exp);
        let g = gmean_t(&a, &b, t).unwrap();
        let scale = 1f64.max(operator_norm(&g).unwrap());
        worst = worst.max(g.max_abs_diff(&closed) / scale);
    }
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let golden: Mat = read_matrix_file(fixtures.join("gmean_2x2.mat")).unwrap();
    let a = Mat::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
    let b = Mat::from_diagonal(&[3.0, 1.0]);
    let gold_err = gmean(&a, &b).unwrap().max_abs_diff(&golden);
    outcome(
        worst <= 1e-10 && gold_err <= 1e-10,
        format!("300 commuting pairs worst {worst:.3e}; golden 2x2 error {gold_err:.3e}"),
    )
}

struct Closure {
    name: &'static str,
    domain: Interval<f64>,
    f: fn(f64) -> f64,
}

impl SpectralFn<f64> for Closure {
    fn name(&self) -> &str {
        self.name
    }
    fn domain(&self) -> Interval<f64> {
        self.domain
    }
    fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }
}

fn c12() -> Outcome {
    let pos = Interval::positive();
    let fns = [
        Closure {
            name: "exp",
            domain: pos,
            f: f64::exp,
        },
        Closure {
            name: "sqrt",
            domain: pos,
            f: f64::sqrt,
        },
        Closure {
            name: "ln",
            domain: pos,
            f: f64::ln,
        },
        Closure {
            name: "recip",
            domain: pos,
            f: f64::recip,
        },
        Closure {
            name: "cube",
            domain: pos,
            f: |x| x * x * x,
        },
    ];
    // (upper, lower) with upper >= lower on (0, inf)
    let ordered: [(Closure, Closure); 3] = [
        (
            Closure {
                name: "exp",
                domain: pos,
                f: f64::exp,
            },
            Closure {
                name: "1+x",
                domain: pos,
                f: |x| 1.0 + x,
            },
        ),
        (
            Closure {
                name: "x",
                domain: pos,
                f: |x| x,
            },
            Closure {
                name: "ln",
                domain: pos,
                f: f64::ln,
            },
        ),
        (
            Closure {
                name: "x^2",
                domain: pos,
                f: |x| x * x,
            },
            Closure {
                name: "2x-1",
                domain: pos,
                f: |x| 2.0 * x - 1.0,
            },
        ),
    ];
    let (mut mult, mut norm_id, mut mono) = (0.0f64, 0.0f64, true);
    let mut counts = BTreeMap::new();
    for stream in 0..300u64 {
        let dim = 1 + (stream as usize % 8);
        let cfg = GenConfig::new(12, dim);
        let a = random_spd(&cfg, stream).unwrap();
        let f = &fns[stream as usize % fns.len()];
        let g = &fns[(stream as usize + 1) % fns.len()];

        let fa = matrix_function(&a, f).unwrap();
        let ga = matrix_function(&a, g).unwrap();
        let fg = matrix_function(
            &a,
            &Closure {
                name: "product",
                domain: pos,
                f: match (stream as usize) % fns.len() {
                    0 => |x| x.exp() * x.sqrt(),
                    1 => |x| x.sqrt() * x.ln(),
                    2 => |x| x.ln() / x,
                    3 => |x| x * x,
                    _ => |x| x * x * x * x.exp(),
                },
            },
        )
        .unwrap();
        let prod = fa.matmul(&ga);
        let scale = 1f64.max(operator_norm(&fg).unwrap());
        let mut diff = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                diff = diff.max((prod.get(i, j) - fg.get(i, j)).abs());
            }
        }
        mult = mult.max(diff / scale);
        *counts.entry("multiplicativity").or_insert(0) += 1;

        let eig = spectral_decompose(&a).unwrap().eigenvalues;
        let sup = eig.iter().map(|&l| (f.f)(l).abs()).fold(0.0, f64::max);
        let n = operator_norm(&fa).unwrap();
        norm_id = norm_id.max((n - sup).abs() / 1f64.max(sup));
        *counts.entry("norm").or_insert(0) += 1;

        let (hi, lo) = &ordered[stream as usize % ordered.len()];
        let c = loewner_leq(
            &matrix_function(&a, lo).unwrap(),
            &matrix_function(&a, hi).unwrap(),
            1e-12,
        )
        .unwrap();
        mono &= c.ordered;
        *counts.entry("monotonicity").or_insert(0) += 1;
    }
    outcome(
        mult <= 1e-10 && norm_id <= 1e-12 && mono,
        format!("{counts:?}; multiplicativity {mult:.3e}, norm identity {norm_id:.3e}, monotone {mono}"),
    )
}

type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 13] = [
        ("1", "mean interpolation identity", c01),
        ("2", "hh-mr chain, f = inv", c02),
        ("3", "hh-mr123 and hh-mr222, constructed pairs", c03),
        ("4", "hh-mche chain", c04),
        ("5a", "sta chains over nu grid", c05a),
        ("5b", "nu -> 1/2 limit profile", c05b),
        ("6", "inverse commutes with weighted mean", c06),
        ("7", "contraction suite", c07),
        ("8", "norm suite", c08),
        ("9", "scalar suites", c09),
        ("10", "operator convex background chain", c10),
        ("11", "oracle equivalence", c11),
        ("12", "functional calculus properties", c12),
    ];
    let mut failed = Vec::new();
    for (id, name, check) in criteria {
        let start = Instant::now();
        let o = check();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {id:>3} {verdict}  {name} ({:.1}s): {}",
            start.elapsed().as_secs_f64(),
            o.detail
        );
        if !o.pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("all acceptance criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
