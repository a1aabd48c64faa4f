use super::expr::*;
use super::{ChainSpec, FnSlot, Hypothesis, InputPlan, Observation, ParamSampler, Relation, Term};
use crate::error::{Error, Result};
use crate::funcat::FnFlag;
use crate::linalg::Interval;

pub const REGISTRY_IDS: [&str; 23] = [
    "mean-interp",
    "mean-mono",
    "int-superadd",
    "power-cmp",
    "hh-mr",
    "hh-mr123",
    "hh-mr222",
    "hh-mche",
    "sta-low",
    "sta-high",
    "sta-f-low",
    "sta-f-high",
    "geo-def",
    "resolvent-ineq",
    "ando-max",
    "psd-block",
    "pos-map",
    "norm-geo",
    "norm-cor",
    "scalar-hh",
    "scalar-hh-ref",
    "scalar-geo-hh",
    "opconvex-hh",
];

const NU_LOW: &[f64] = &[0.0, 0.1, 0.25, 0.4];
const NU_HIGH: &[f64] = &[0.6, 0.75, 0.9, 1.0];
const T_GRID: &[f64] = &[0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
const ALPHA_GRID: &[f64] = &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
const AB: &[&str] = &["A", "B"];
const SCALARS: &[&str] = &["a", "b"];

fn a() -> Expr {
    var("A")
}
fn b() -> Expr {
    var("B")
}
fn t() -> Expr {
    var("t")
}
fn nu() -> Expr {
    var("nu")
}
fn one() -> Expr {
    k(1.0)
}
fn half() -> Expr {
    k(0.5)
}

/// `A #_w B`
fn g(w: Expr) -> Expr {
    gm(a(), b(), w)
}

/// `f(A) #_w f(B)`
fn fg(w: Expr) -> Expr {
    gm(f(a()), f(b()), w)
}

fn int01(body: Expr) -> Expr {
    integral("t", k(0.0), one(), body)
}

/// `(1/(1-2nu)) int_nu^{1-nu} body dt`
fn avg_low(body: Expr) -> Expr {
    one() / (one() - k(2.0) * nu()) * integral("t", nu(), one() - nu(), body)
}

/// `(1/(2nu-1)) int_{1-nu}^nu body dt`
fn avg_high(body: Expr) -> Expr {
    one() / (k(2.0) * nu() - one()) * integral("t", one() - nu(), nu(), body)
}

fn term(label: &'static str, expr: Expr) -> Term {
    Term { label, expr }
}

fn nu_range(lo: f64, hi: f64, lo_open: bool, hi_open: bool) -> Hypothesis {
    Hypothesis::Param {
        name: "nu",
        range: Interval {
            lo,
            hi,
            lo_open,
            hi_open,
        },
    }
}

fn base(id: &'static str, statement: &'static str, relation: Relation) -> ChainSpec {
    ChainSpec {
        id,
        statement,
        relation,
        fn_slot: FnSlot::Unused,
        default_fn: None,
        plan: InputPlan::Pair,
        params: Vec::new(),
        hypotheses: Vec::new(),
        terms: Vec::new(),
        observations: Vec::new(),
        refinement_floor: 0,
    }
}

fn with_fn(mut spec: ChainSpec, slot: FnSlot, default: &'static str) -> ChainSpec {
    spec.fn_slot = slot;
    spec.default_fn = Some(default);
    spec
}

const OGC: FnSlot = FnSlot::Requires(FnFlag::OperatorGeometricallyConvex);

fn build(id: &str) -> Option<ChainSpec> {
    use Relation::*;
    let spec = match id {
        "mean-interp" => ChainSpec {
            params: vec![
                ParamSampler::Uniform { name: "t", lo: 0.0, hi: 1.0 },
                ParamSampler::Uniform { name: "s", lo: 0.0, hi: 1.0 },
                ParamSampler::Uniform { name: "u", lo: 0.0, hi: 1.0 },
            ],
            terms: vec![
                term("(A #_t B) #_s (A #_u B)", gm(g(var("t")), g(var("u")), var("s"))),
                term(
                    "A #_{(1-s)t+su} B",
                    g((one() - var("s")) * var("t") + var("s") * var("u")),
                ),
            ],
            ..base("mean-interp", "(A #_t B) #_s (A #_u B) = A #_{(1-s)t+su} B", Equality)
        },
        "mean-mono" => ChainSpec {
            plan: InputPlan::DominatedPairs,
            params: vec![ParamSampler::Uniform { name: "t", lo: 0.0, hi: 1.0 }],
            hypotheses: vec![
                Hypothesis::Dominated { lo: "A", hi: "C" },
                Hypothesis::Dominated { lo: "B", hi: "D" },
            ],
            terms: vec![
                term("A #_t B", g(t())),
                term("C #_t D", gm(var("C"), var("D"), t())),
            ],
            ..base("mean-mono", "A <= C, B <= D  =>  A #_t B <= C #_t D", LoewnerChain)
        },
        "int-superadd" => with_fn(
            ChainSpec {
                hypotheses: vec![Hypothesis::InDomain(AB)],
                terms: vec![
                    term(
                        "int_0^1 f(A #_t B) # f(A #_{1-t} B) dt",
                        int01(gm_half(f(g(t())), f(g(one() - t())))),
                    ),
                    term(
                        "(int_0^1 f(A #_t B) dt) # (int_0^1 f(A #_{1-t} B) dt)",
                        gm_half(int01(f(g(t()))), int01(f(g(one() - t())))),
                    ),
                ],
                ..base(
                    "int-superadd",
                    "int f(A #_t B) # f(A #_{1-t} B) dt <= (int f(A #_t B) dt) # (int f(A #_{1-t} B) dt)",
                    LoewnerChain,
                )
            },
            FnSlot::AnyPositive,
            "inv",
        ),
        "power-cmp" => with_fn(
            ChainSpec {
                plan: InputPlan::FaLeqFbPair,
                params: vec![ParamSampler::Sorted { low: "t", high: "s", lo: 0.0, hi: 1.0 }],
                hypotheses: vec![
                    Hypothesis::InDomain(AB),
                    Hypothesis::FaLeqFb,
                    Hypothesis::ParamOrder { lo: "t", hi: "s" },
                ],
                terms: vec![
                    term("(f(A)^-1/2 f(B) f(A)^-1/2)^t", pow(whiten(f(a()), f(b())), t())),
                    term("(f(A)^-1/2 f(B) f(A)^-1/2)^s", pow(whiten(f(a()), f(b())), var("s"))),
                ],
                ..base(
                    "power-cmp",
                    "f(A) <= f(B), 0 <= t <= s  =>  (f(A)^-1/2 f(B) f(A)^-1/2)^t <= (f(A)^-1/2 f(B) f(A)^-1/2)^s",
                    LoewnerChain,
                )
            },
            FnSlot::AnyPositive,
            "inv",
        ),
        "hh-mr" => with_fn(
            ChainSpec {
                hypotheses: vec![Hypothesis::InDomain(AB)],
                terms: vec![
                    term("f(A # B)", f(g(half()))),
                    term("int_0^1 f(A #_t B) dt", int01(f(g(t())))),
                    term("int_0^1 f(A) #_t f(B) dt", int01(fg(t()))),
                ],
                ..base(
                    "hh-mr",
                    "f(A # B) <= int_0^1 f(A #_t B) dt <= int_0^1 f(A) #_t f(B) dt",
                    LoewnerChain,
                )
            },
            OGC,
            "inv",
        ),
        "hh-mr123" => with_fn(
            ChainSpec {
                plan: InputPlan::FaLeqFbPair,
                hypotheses: vec![Hypothesis::InDomain(AB), Hypothesis::FaLeqFb],
                terms: vec![
                    term("int_0^1 f(A #_t B) dt", int01(f(g(t())))),
                    term("int_0^1 f(A) #_t f(B) dt", int01(fg(t()))),
                    term("(f(A) # f(B) + f(B)) / 2", half() * (fg(half()) + f(b()))),
                ],
                ..base(
                    "hh-mr123",
                    "f(A) <= f(B)  =>  int_0^1 f(A #_t B) dt <= int_0^1 f(A) #_t f(B) dt <= (f(A) # f(B) + f(B)) / 2",
                    LoewnerChain,
                )
            },
            OGC,
            "inv",
        ),
        "hh-mr222" => with_fn(
            ChainSpec {
                plan: InputPlan::FaLeqFbPair,
                hypotheses: vec![Hypothesis::InDomain(AB), Hypothesis::FaLeqFb],
                terms: vec![
                    term("f(A # B)", f(g(half()))),
                    term("int_0^1 f(A #_t B) dt", int01(f(g(t())))),
                    term("(f(A) # f(B) + f(B)) / 2", half() * (fg(half()) + f(b()))),
                ],
                ..base(
                    "hh-mr222",
                    "f(A) <= f(B)  =>  f(A # B) <= int_0^1 f(A #_t B) dt <= (f(A) # f(B) + f(B)) / 2",
                    LoewnerChain,
                )
            },
            OGC,
            "inv",
        ),
        "hh-mche" => with_fn(
            ChainSpec {
                hypotheses: vec![Hypothesis::InDomain(AB)],
                terms: vec![
                    term("f(A # B)", f(g(half()))),
                    term(
                        "int_0^1 f(A #_t B) # f(A #_{1-t} B) dt",
                        int01(gm_half(f(g(t())), f(g(one() - t())))),
                    ),
                    term("f(A) # f(B)", fg(half())),
                ],
                observations: vec![Observation {
                    label: "int f(A #_t B) # f(A #_{1-t} B) dt vs int f(A #_t B) dt",
                    lhs: int01(gm_half(f(g(t())), f(g(one() - t())))),
                    rhs: int01(f(g(t()))),
                }],
                ..base(
                    "hh-mche",
                    "f(A # B) <= int_0^1 f(A #_t B) # f(A #_{1-t} B) dt <= f(A) # f(B)",
                    LoewnerChain,
                )
            },
            OGC,
            "inv",
        ),
        "sta-low" => with_fn(
            ChainSpec {
                plan: InputPlan::FaLeqFbPair,
                params: vec![ParamSampler::Choice { name: "nu", values: NU_LOW }],
                hypotheses: vec![
                    Hypothesis::InDomain(AB),
                    Hypothesis::FaLeqFb,
                    nu_range(0.0, 0.5, false, true),
                ],
                terms: vec![
                    term("f(A) #_nu f(B)", fg(nu())),
                    term("1/(1-2nu) int_nu^{1-nu} f(A) #_t f(B) dt", avg_low(fg(t()))),
                    term("f(A) #_{1-nu} f(B)", fg(one() - nu())),
                ],
                ..base(
                    "sta-low",
                    "f(A) <= f(B), nu in [0, 1/2)  =>  f(A) #_nu f(B) <= 1/(1-2nu) int_nu^{1-nu} f(A) #_t f(B) dt <= f(A) #_{1-nu} f(B)",
                    LoewnerChain,
                )
            },
            FnSlot::AnyPositive,
            "inv",
        ),
        "sta-high" => with_fn(
            ChainSpec {
                plan: InputPlan::FaLeqFbPair,
                params: vec![ParamSampler::Choice { name: "nu", values: NU_HIGH }],
                hypotheses: vec![
                    Hypothesis::InDomain(AB),
                    Hypothesis::FaLeqFb,
                    nu_range(0.5, 1.0, true, false),
                ],
                terms: vec![
                    term("f(A) #_{1-nu} f(B)", fg(one() - nu())),
                    term("1/(2nu-1) int_{1-nu}^nu f(A) #_t f(B) dt", avg_high(fg(t()))),
                    term("f(A) #_nu f(B)", fg(nu())),
                ],
                ..base(
                    "sta-high",
                    "f(A) <= f(B), nu in (1/2, 1]  =>  f(A) #_{1-nu} f(B) <= 1/(2nu-1) int_{1-nu}^nu f(A) #_t f(B) dt <= f(A) #_nu f(B)",
                    LoewnerChain,
                )
            },
            FnSlot::AnyPositive,
            "inv",
        ),
        "sta-f-low" => with_fn(
            ChainSpec {
                plan: InputPlan::FaLeqFbPair,
                params: vec![ParamSampler::Choice { name: "nu", values: NU_LOW }],
                hypotheses: vec![
                    Hypothesis::InDomain(AB),
                    Hypothesis::FaLeqFb,
                    nu_range(0.0, 0.5, false, true),
                ],
                terms: vec![
                    term("f(A #_nu B)", f(g(nu()))),
                    term("1/(1-2nu) int_nu^{1-nu} f(A #_t B) dt", avg_low(f(g(t())))),
                    term("1/(1-2nu) int_nu^{1-nu} f(A) #_t f(B) dt", avg_low(fg(t()))),
                    term("f(A) #_{1-nu} f(B)", fg(one() - nu())),
                ],
                ..base(
                    "sta-f-low",
                    "nu in [0, 1/2)  =>  f(A #_nu B) <= 1/(1-2nu) int_nu^{1-nu} f(A #_t B) dt <= 1/(1-2nu) int_nu^{1-nu} f(A) #_t f(B) dt <= f(A) #_{1-nu} f(B)",
                    LoewnerChain,
                )
            },
            OGC,
            "inv",
        ),
        "sta-f-high" => with_fn(
            ChainSpec {
                plan: InputPlan::FaLeqFbPair,
                params: vec![ParamSampler::Choice { name: "nu", values: NU_HIGH }],
                hypotheses: vec![
                    Hypothesis::InDomain(AB),
                    Hypothesis::FaLeqFb,
                    nu_range(0.5, 1.0, true, false),
                ],
                terms: vec![
                    term("f(A #_{1-nu} B)", f(g(one() - nu()))),
                    term("1/(2nu-1) int_{1-nu}^nu f(A #_t B) dt", avg_high(f(g(t())))),
                    term("1/(2nu-1) int_{1-nu}^nu f(A) #_t f(B) dt", avg_high(fg(t()))),
                    term("f(A) #_nu f(B)", fg(nu())),
                ],
                ..base(
                    "sta-f-high",
                    "nu in (1/2, 1]  =>  f(A #_{1-nu} B) <= 1/(2nu-1) int_{1-nu}^nu f(A #_t B) dt <= 1/(2nu-1) int_{1-nu}^nu f(A) #_t f(B) dt <= f(A) #_nu f(B)",
                    LoewnerChain,
                )
            },
            OGC,
            "inv",
        ),
        "geo-def" => with_fn(
            ChainSpec {
                params: vec![ParamSampler::Choice { name: "t", values: T_GRID }],
                hypotheses: vec![Hypothesis::InDomain(AB)],
                terms: vec![term("f(A #_t B)", f(g(t()))), term("f(A) #_t f(B)", fg(t()))],
                ..base("geo-def", "f(A #_t B) <= f(A) #_t f(B)", LoewnerChain)
            },
            OGC,
            "inv",
        ),
        "resolvent-ineq" => ChainSpec {
            plan: InputPlan::ContractionPair,
            hypotheses: vec![Hypothesis::Contractions],
            terms: vec![
                term("(I - A # B)^-1", inv(Expr::Identity - gm_half(a(), b()))),
                term(
                    "(I - A)^-1 # (I - B)^-1",
                    gm_half(inv(Expr::Identity - a()), inv(Expr::Identity - b())),
                ),
            ],
            ..base(
                "resolvent-ineq",
                "||A||, ||B|| < 1  =>  (I - A # B)^-1 <= (I - A)^-1 # (I - B)^-1",
                LoewnerChain,
            )
        },
        "ando-max" => ChainSpec {
            plan: InputPlan::AndoPerturbation,
            hypotheses: vec![Hypothesis::BlockPsd],
            terms: vec![term("X", var("X")), term("A # B", gm_half(a(), b()))],
            ..base("ando-max", "[[A, X], [X, B]] >= 0  =>  X <= A # B", LoewnerChain)
        },
        "psd-block" => ChainSpec {
            terms: vec![term("[[A, A # B], [A # B, B]]", block(a(), gm_half(a(), b()), b()))],
            ..base("psd-block", "[[A, A # B], [A # B, B]] >= 0", Psd)
        },
        "pos-map" => ChainSpec {
            plan: InputPlan::PairWithMap,
            hypotheses: vec![Hypothesis::MapImagesPd],
            terms: vec![
                term("Psi(A # B)", map(gm_half(a(), b()))),
                term("Psi(A) # Psi(B)", gm_half(map(a()), map(b()))),
            ],
            ..base("pos-map", "Psi(A # B) <= Psi(A) # Psi(B)", LoewnerChain)
        },
        "norm-geo" => ChainSpec {
            params: vec![ParamSampler::Choice { name: "alpha", values: ALPHA_GRID }],
            hypotheses: vec![Hypothesis::Param {
                name: "alpha",
                range: Interval::closed(0.0, 1.0),
            }],
            terms: vec![
                term("||A #_alpha B||", norm(g(var("alpha")))),
                term(
                    "||A||^(1-alpha) ||B||^alpha",
                    pow(norm(a()), one() - var("alpha")) * pow(norm(b()), var("alpha")),
                ),
            ],
            ..base("norm-geo", "||A #_alpha B|| <= ||A||^(1-alpha) ||B||^alpha", ScalarChain)
        },
        "norm-cor" => ChainSpec {
            plan: InputPlan::NormOrderedPair,
            // lambda_max(A #_t B) has kinks where the top eigenvalues cross
            refinement_floor: 12,
            hypotheses: vec![Hypothesis::NormOrdered],
            terms: vec![
                term("||A # B||", norm(gm_half(a(), b()))),
                term("int_0^1 ||A #_t B|| dt", int01(norm(g(t())))),
                term(
                    "(sqrt(||A|| ||B||) + ||B||) / 2",
                    half() * (sqrt(norm(a()) * norm(b())) + norm(b())),
                ),
            ],
            ..base(
                "norm-cor",
                "||A|| <= ||B||  =>  ||A # B|| <= int_0^1 ||A #_t B|| dt <= (sqrt(||A|| ||B||) + ||B||) / 2",
                ScalarChain,
            )
        },
        "scalar-hh" => with_fn(
            ChainSpec {
                plan: InputPlan::ScalarInterval,
                hypotheses: vec![Hypothesis::ScalarOrder, Hypothesis::InDomain(SCALARS)],
                terms: vec![
                    term(
                        "(b-a) f((a+b)/2)",
                        (var("b") - var("a")) * f(half() * (var("a") + var("b"))),
                    ),
                    term("int_a^b f(x) dx", integral("x", var("a"), var("b"), f(var("x")))),
                    term(
                        "(b-a) (f(a)+f(b))/2",
                        (var("b") - var("a")) * half() * (f(var("a")) + f(var("b"))),
                    ),
                ],
                ..base(
                    "scalar-hh",
                    "(b-a) f((a+b)/2) <= int_a^b f(x) dx <= (b-a) (f(a)+f(b))/2",
                    ScalarChain,
                )
            },
            FnSlot::Requires(FnFlag::Convex),
            "square",
        ),
        "scalar-hh-ref" => {
            let (sa, sb) = (var("a"), var("b"));
            let mid = f(half() * (sa.clone() + sb.clone()));
            let ends = half() * (f(sa.clone()) + f(sb.clone()));
            with_fn(
                ChainSpec {
                    plan: InputPlan::ScalarInterval,
                    hypotheses: vec![Hypothesis::ScalarOrder, Hypothesis::InDomain(SCALARS)],
                    terms: vec![
                        term("f((a+b)/2)", mid.clone()),
                        term(
                            "(f((3a+b)/4) + f((a+3b)/4))/2",
                            half()
                                * (f((k(3.0) * sa.clone() + sb.clone()) / k(4.0))
                                    + f((sa.clone() + k(3.0) * sb.clone()) / k(4.0))),
                        ),
                        term(
                            "1/(b-a) int_a^b f(x) dx",
                            integral("x", sa.clone(), sb.clone(), f(var("x"))) / (sb.clone() - sa.clone()),
                        ),
                        term("(f((a+b)/2) + (f(a)+f(b))/2)/2", half() * (mid + ends.clone())),
                        term("(f(a)+f(b))/2", ends),
                    ],
                    ..base(
                        "scalar-hh-ref",
                        "f((a+b)/2) <= (f((3a+b)/4) + f((a+3b)/4))/2 <= 1/(b-a) int_a^b f <= (f((a+b)/2) + (f(a)+f(b))/2)/2 <= (f(a)+f(b))/2",
                        ScalarChain,
                    )
                },
                FnSlot::Requires(FnFlag::Convex),
                "square",
            )
        }
        "scalar-geo-hh" => {
            let (sa, sb) = (var("a"), var("b"));
            let gab = sqrt(sa.clone() * sb.clone());
            with_fn(
                ChainSpec {
                    plan: InputPlan::LogScalarInterval,
                    hypotheses: vec![Hypothesis::ScalarOrder, Hypothesis::InDomain(SCALARS)],
                    terms: vec![
                        term("f(sqrt(ab))", f(gab.clone())),
                        term(
                            "sqrt(f(a^3/4 b^1/4) f(a^1/4 b^3/4))",
                            sqrt(
                                f(pow(sa.clone(), k(0.75)) * pow(sb.clone(), k(0.25)))
                                    * f(pow(sa.clone(), k(0.25)) * pow(sb.clone(), k(0.75))),
                            ),
                        ),
                        term(
                            "exp(1/(ln b - ln a) int_a^b ln f(x)/x dx)",
                            exp(integral("x", sa.clone(), sb.clone(), ln(f(var("x"))) / var("x"))
                                / (ln(sb.clone()) - ln(sa.clone()))),
                        ),
                        term(
                            "sqrt(f(sqrt(ab))) f(a)^1/4 f(b)^1/4",
                            sqrt(f(gab)) * pow(f(sa.clone()), k(0.25)) * pow(f(sb.clone()), k(0.25)),
                        ),
                        term("sqrt(f(a) f(b))", sqrt(f(sa) * f(sb))),
                    ],
                    ..base(
                        "scalar-geo-hh",
                        "f(sqrt(ab)) <= sqrt(f(a^3/4 b^1/4) f(a^1/4 b^3/4)) <= exp(1/(ln b - ln a) int_a^b ln f(x)/x dx) <= sqrt(f(sqrt(ab))) f(a)^1/4 f(b)^1/4 <= sqrt(f(a) f(b))",
                        ScalarChain,
                    )
                },
                FnSlot::Requires(FnFlag::GeometricallyConvex),
                "exp",
            )
        }
        "opconvex-hh" => {
            let lin = |w: Expr| w.clone() * a() + (one() - w) * b();
            with_fn(
                ChainSpec {
                    hypotheses: vec![Hypothesis::InDomain(AB)],
                    terms: vec![
                        term("f((A+B)/2)", f(half() * (a() + b()))),
                        term(
                            "2 int_{1/4}^{3/4} f(tA + (1-t)B) dt",
                            k(2.0) * integral("t", k(0.25), k(0.75), f(lin(t()))),
                        ),
                        term(
                            "(f((3A+B)/4) + f((A+3B)/4))/2",
                            half() * (f(lin(k(0.75))) + f(lin(k(0.25)))),
                        ),
                        term(
                            "int_0^1 f((1-t)A + tB) dt",
                            int01(f((one() - t()) * a() + t() * b())),
                        ),
                        term(
                            "(f((A+B)/2) + (f(A)+f(B))/2)/2",
                            half() * (f(half() * (a() + b())) + half() * (f(a()) + f(b()))),
                        ),
                        term("(f(A)+f(B))/2", half() * (f(a()) + f(b()))),
                    ],
                    ..base(
                        "opconvex-hh",
                        "f((A+B)/2) <= 2 int_{1/4}^{3/4} f(tA+(1-t)B) dt <= (f((3A+B)/4) + f((A+3B)/4))/2 <= int_0^1 f((1-t)A+tB) dt <= (f((A+B)/2) + (f(A)+f(B))/2)/2 <= (f(A)+f(B))/2",
                        LoewnerChain,
                    )
                },
                FnSlot::Requires(FnFlag::OperatorConvex),
                "square",
            )
        }
        _ => return None,
    };
    Some(spec)
}

/// Every registered chain, in registry order.
pub fn registry() -> Vec<ChainSpec> {
    REGISTRY_IDS
        .iter()
        .map(|id| build(id).expect("registry id without a definition"))
        .collect()
}

/// Looks up one chain by id.
pub fn chain(id: &str) -> Result<ChainSpec> {
    build(id).ok_or_else(|| Error::UnknownChain {
        id: id.to_string(),
        known: REGISTRY_IDS.join(", "),
    })
}
