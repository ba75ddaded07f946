use std::collections::BTreeSet;

use posetfpp::decomposition::{
    component_graph, decide_fpp, delete_edge, minmax_covers, p_cross, Certificate, DecideOptions,
    Method,
};
use posetfpp::extremal::{
    check_necessary, classify_4crown, ep_sufficient, find_retract_crown_ep, lift_crown_retraction,
    project_endomorphism, splitting_antichain,
};
use posetfpp::oracle::{
    enumerate_homomorphisms, fpp_bruteforce, random_connected_poset, random_poset, SearchBudget,
};
use posetfpp::par::{with_execution, Execution};
use posetfpp::zigzag::enumerate_crowns;
use posetfpp::{format, Crown, Poset, PosetMap, Verdict};
use proptest::prelude::*;

fn any_poset() -> impl Strategy<Value = Poset> {
    (1usize..=10, 0.05f64..0.6, any::<u64>())
        .prop_map(|(n, q, seed)| random_poset(n, q, seed).unwrap())
}

fn connected_poset(max: usize) -> impl Strategy<Value = Poset> {
    (1usize..=max, 0.1f64..0.6, any::<u64>())
        .prop_map(|(n, q, seed)| random_connected_poset(n, q, seed).unwrap())
}

fn strict_pairs(p: &Poset) -> BTreeSet<(usize, usize)> {
    p.strict_pairs().into_iter().collect()
}

fn check_witness(p: &Poset, pairs: &[(String, String)]) {
    let f = PosetMap::from_names(p, p, pairs).unwrap();
    assert!(f.is_homomorphism());
    assert!(f.fixed_points().is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn format_round_trips(p in any_poset()) {
        prop_assert_eq!(format::parse(&format::write(&p)).unwrap(), p);
    }

    #[test]
    fn minmax_covers_are_the_covers_from_l_to_u(p in any_poset()) {
        let ext = p.extremal_partition();
        let expected: Vec<(usize, usize)> = p
            .covers()
            .into_iter()
            .filter(|&(a, b)| ext.lower.contains(a) && ext.upper.contains(b))
            .collect();
        let got = minmax_covers(&p);
        prop_assert_eq!(got.pairs.iter().copied().collect::<BTreeSet<_>>(), expected.into_iter().collect::<BTreeSet<_>>());
        for &(a, b) in &got.pairs {
            prop_assert!(p.minimal().contains(a) && p.maximal().contains(b));
        }
    }

    #[test]
    fn deleting_a_minmax_cover_removes_exactly_that_pair(p in any_poset()) {
        let before = strict_pairs(&p);
        for &(a, b) in &minmax_covers(&p).pairs {
            let q = delete_edge(&p, (a, b)).unwrap();
            prop_assert!(q.satisfies_axioms());
            prop_assert_eq!(q.names(), p.names());
            let mut expected = before.clone();
            expected.remove(&(a, b));
            prop_assert_eq!(strict_pairs(&q), expected);
        }
        let (cross, parts) = p_cross(&p);
        prop_assert!(cross.satisfies_axioms());
        prop_assert!(minmax_covers(&cross).pairs.iter().all(|e| !minmax_covers(&p).contains(e.0, e.1)));
        let covered: u64 = parts.iter().fold(0, |acc, s| {
            assert_eq!(acc & s.bits(), 0);
            acc | s.bits()
        });
        prop_assert_eq!(covered, p.carrier().bits());
    }

    #[test]
    fn component_graph_edges_are_the_minmax_covers(p in any_poset()) {
        let g = component_graph(&p);
        let covers = minmax_covers(&p);
        prop_assert_eq!(g.edges.len(), covers.len());
        for e in &g.edges {
            prop_assert!(covers.contains(e.lower, e.upper));
            prop_assert!(g.vertices[e.lower_component].contains(e.lower));
            prop_assert!(g.vertices[e.upper_component].contains(e.upper));
        }
    }

    #[test]
    fn projection_to_extremal_points_is_a_homomorphism(p in connected_poset(7)) {
        let homs = enumerate_homomorphisms(&p, &p, SearchBudget { max_nodes: 200_000, max_results: 200 });
        for f in homs.maps {
            let g = project_endomorphism(&p, &f).unwrap();
            prop_assert!(g.is_homomorphism());
            prop_assert!(g.is_endomorphism());
        }
    }

    #[test]
    fn four_crown_class_ignores_rotation_and_reflection(p in connected_poset(9)) {
        for crown in enumerate_crowns(&p, 4, 50).crowns {
            let base = classify_4crown(&p, &crown).unwrap();
            let pts = crown.points().to_vec();
            for shift in 0..4 {
                let mut rotated = pts.clone();
                rotated.rotate_left(shift);
                let mut reflected = rotated.clone();
                reflected.reverse();
                for seq in [rotated, reflected] {
                    let c = classify_4crown(&p, &Crown::new(&p, seq).unwrap()).unwrap();
                    prop_assert_eq!(c.kind, base.kind);
                    prop_assert_eq!(c.inner, base.inner);
                    prop_assert_eq!(c.crown.points(), base.crown.points());
                }
            }
        }
    }

    #[test]
    fn splitting_antichain_validates(p in connected_poset(12)) {
        let s = splitting_antichain(&p);
        prop_assert!(s.validate(&p).is_ok());
        let middle = p.extremal_partition().middle;
        prop_assert_eq!(s.antichain | s.below | s.above, middle);
    }

    #[test]
    fn lifted_crown_retraction_retracts_onto_the_crown(p in connected_poset(12)) {
        if let Some((crown, r)) = find_retract_crown_ep(&p).unwrap() {
            if crown.cardinality() >= 6 {
                let rho = lift_crown_retraction(&p, &crown, &r).unwrap();
                prop_assert!(rho.is_homomorphism());
                prop_assert!(rho.is_retraction());
                let image: BTreeSet<String> = rho.target().names().iter().cloned().collect();
                let crown_names: BTreeSet<String> = p.names_of(crown.point_set()).into_iter().collect();
                prop_assert_eq!(image, crown_names);
            }
        }
    }

    #[test]
    fn decisions_match_the_oracle_and_carry_valid_witnesses(p in connected_poset(9)) {
        let truth = fpp_bruteforce(&p, SearchBudget::default()).unwrap().fpp;
        for method in [Method::Structural, Method::Auto] {
            let report = decide_fpp(&p, DecideOptions::with_method(method)).unwrap();
            if let Some(v) = report.verdict.as_bool() {
                prop_assert_eq!(v, truth);
            }
            if method == Method::Auto {
                prop_assert_ne!(report.verdict, Verdict::Unknown);
            }
            if let Certificate::FixedPointFreeMap { map } = &report.certificate {
                check_witness(&p, map);
            }
        }
        let ep = ep_sufficient(&p).unwrap();
        if ep.applies {
            prop_assert!(truth);
        }
        if !check_necessary(&p).unwrap().violations.is_empty() {
            prop_assert!(!truth);
        }
    }

    #[test]
    fn parallel_and_sequential_decisions_agree(p in connected_poset(12)) {
        let par = decide_fpp(&p, DecideOptions::default()).unwrap();
        let seq = with_execution(Execution::Sequential, || decide_fpp(&p, DecideOptions::default()).unwrap());
        prop_assert_eq!(par, seq);
    }
}

#[test]
fn reports_serialize_with_tagged_certificates() {
    for (name, p) in posetfpp::fixtures::named() {
        if !p.is_connected() {
            continue;
        }
        let report = decide_fpp(&p, DecideOptions::default()).unwrap();
        let v = serde_json::to_value(&report).unwrap();
        for key in ["verdict", "method", "certificate", "trace"] {
            assert!(v.get(key).is_some(), "{name}: {key}");
        }
        assert!(["true", "false", "unknown"].contains(&v["verdict"].as_str().unwrap()));
        assert!(v["certificate"]["kind"].is_string(), "{name}");
        assert_eq!(v["trace"]["elements"].as_array().unwrap().len(), p.len());
    }
}
