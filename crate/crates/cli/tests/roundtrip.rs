use polyheight_cli::wire::{
    adelic_json, halfspaces_json, parse_adelic, parse_polynomial, parse_polytope, parse_ring, polynomial_json,
    polytope_json, ring_json, Node,
};
use polyheight_core::base_model::abelian_canonical_ring;
use polyheight_core::poly::Polynomial;
use polyheight_core::verify::{random_adelic_polytope, random_psd_gram, random_ring};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn reparse_adelic(v: &Value) -> polyheight_core::roofs::AdelicPolytope {
    parse_adelic(&Node::root(v)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn adelic_polytopes_roundtrip(seed in any::<u64>(), t in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_adelic_polytope(&mut rng, t);
        let back = reparse_adelic(&adelic_json(&p));
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(back.weights(), p.weights());
        let via_h = parse_polytope(&Node::root(&halfspaces_json(p.base()))).unwrap();
        prop_assert_eq!(&via_h, p.base());
        let via_v = parse_polytope(&Node::root(&polytope_json(p.base()))).unwrap();
        prop_assert_eq!(&via_v, p.base());
    }

    #[test]
    fn rings_roundtrip(seed in any::<u64>(), t in 1usize..=2, top in 0u32..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ring = random_ring(&mut rng, t, top);
        prop_assert_eq!(parse_ring(&Node::root(&ring_json(&ring))).unwrap(), ring);
        let gram = random_psd_gram(&mut rng, t);
        let ab = abelian_canonical_ring(2, &polyheight_core::rational::rat(3), &gram).unwrap();
        prop_assert_eq!(parse_ring(&Node::root(&ring_json(&ab))).unwrap(), ab);
    }

    #[test]
    fn polynomials_roundtrip(terms in prop::collection::vec((0u32..4, 0u32..4, -9i64..=9, 1i64..=4), 0..6)) {
        let mut f = Polynomial::zero(2);
        for (a, b, n, d) in terms {
            f.add_term(vec![a, b], polyheight_core::rational::ratio(n, d));
        }
        let vars = vec!["u".to_string(), "v".to_string()];
        let v = polynomial_json(&f, &vars);
        let back = parse_polynomial(&Node::root(&v["polynomial"]), &vars).unwrap();
        prop_assert_eq!(back, f);
    }
}
