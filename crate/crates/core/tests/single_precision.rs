use opgeo::chains::{chain, check_chain, Env};
use opgeo::{catalogue_fn, gmean_t, Mat32, QuadratureSpec};

#[test]
fn f32_mean_commuting_case() {
    let a = Mat32::identity(2);
    let b = Mat32::from_diagonal(&[4.0, 9.0]);
    let g = gmean_t(&a, &b, 0.5).unwrap();
    assert!((g.get(0, 0) - 2.0).abs() < 1e-5);
    assert!((g.get(1, 1) - 3.0).abs() < 1e-5);
    assert!(g.get(0, 1).abs() < 1e-5);
}

#[test]
fn f32_chain_check() {
    let a = Mat32::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
    let b = Mat32::from_diagonal(&[3.0, 1.0]);
    let env = Env::new()
        .matrix("A", a)
        .matrix("B", b)
        .with_fn(catalogue_fn("inv").unwrap());
    let quad = QuadratureSpec {
        base_order: 8,
        max_refinements: 4,
        abs_tol: 1e-4f32,
    };
    let r = check_chain(&chain("hh-mr").unwrap(), &env, 1e-4, &quad).unwrap();
    assert!(r.passed(), "{r:?}");
}
