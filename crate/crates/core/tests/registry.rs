use opgeo::chains::{chain, registry, FnSlot, Relation, REGISTRY_IDS};
use opgeo::funcat::{catalogue, FnFlag};

#[test]
fn registry_has_all_ids() {
    let expected = [
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
    assert_eq!(REGISTRY_IDS.len(), 23);
    let ids: Vec<&str> = registry().iter().map(|c| c.id).collect();
    assert_eq!(ids, expected);
    for id in expected {
        assert_eq!(chain(id).unwrap().id, id);
    }
}

#[test]
fn equality_chains_have_two_terms() {
    for c in registry() {
        if c.relation == Relation::Equality {
            assert_eq!(c.terms.len(), 2, "{}", c.id);
        }
    }
}

#[test]
fn every_flag_is_exercised_by_some_chain() {
    let specs = registry();
    for flag in [
        FnFlag::GeometricallyConvex,
        FnFlag::OperatorGeometricallyConvex,
        FnFlag::OperatorConvex,
        FnFlag::Convex,
    ] {
        assert!(
            specs.iter().any(|c| c.fn_slot == FnSlot::Requires(flag)),
            "{flag} unused"
        );
    }
    // contraction-gated functions are exercised through geo-def
    let geo = chain("geo-def").unwrap();
    for f in catalogue::<f64>() {
        if f.has(FnFlag::RequiresContraction) {
            assert!(geo.admits(f.flags()), "{}", f.id());
        }
    }
}

#[test]
fn opconvex_admits_square_and_inv() {
    let c = chain("opconvex-hh").unwrap();
    for f in catalogue::<f64>() {
        if ["square", "inv"].contains(&f.id()) {
            assert!(c.admits(f.flags()), "{}", f.id());
        }
    }
}
