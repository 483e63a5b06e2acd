use std::collections::BTreeMap;

use polyheight_core::base_model::abelian_canonical_ring;
use polyheight_core::bkk::{polarize_I, BkkInstance, F_hat, I_hat};
use polyheight_core::minima::{successive_minima_with_roofs, Convention};
use polyheight_core::okounkov::{product_body, toric_okounkov, transform_extrema, volumes, BaseTransform};
use polyheight_core::poly::Polynomial;
use polyheight_core::polyint::integrate_polynomial;
use polyheight_core::polytope::RationalPolytope;
use polyheight_core::qp::QuadraticForm;
use polyheight_core::rational::{point, rat, ratio};
use polyheight_core::roofs::{build_roof, AdelicPolytope};
use polyheight_core::semiabelian::{chambert_loir_polytope, height, minima_report, SemiabelianInput};
use polyheight_core::verify::{random_adelic_polytope, random_psd_gram, run_suite};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn triangle_integral_from_parsed_polynomial() {
    let tri = chambert_loir_polytope(2).unwrap();
    let f = Polynomial::parse("x^2+y^2", &["x", "y"]).unwrap();
    assert_eq!(integrate_polynomial(&tri, &f).unwrap(), ratio(9, 2));
}

#[test]
fn pinned_height_and_minima() {
    let inp = SemiabelianInput::canonical(1, RationalPolytope::interval(rat(-1), rat(1)), vec![point(&[1])], rat(3))
        .unwrap();
    let r = height(&inp).unwrap();
    assert_eq!((r.okounkov_route, r.bkk_route, r.printed_formula), (rat(-12), rat(-12), rat(-4)));
    assert!(r.consistent);
    assert!(!r.normalization_note.is_empty());
    assert_eq!(minima_report(&inp, Convention::Default).unwrap(), vec![rat(-1), rat(-1), rat(0)]);
    let printed = minima_report(&inp, Convention::Printed).unwrap();
    assert_eq!(printed.len(), 3);
}

#[test]
fn triangle_minima() {
    let inp = SemiabelianInput::canonical(
        1,
        chambert_loir_polytope(2).unwrap(),
        vec![point(&[1, 0]), point(&[0, 1])],
        rat(1),
    )
    .unwrap();
    assert_eq!(minima_report(&inp, Convention::Default).unwrap(), vec![rat(-5), rat(-5), rat(-1), rat(0)]);
}

#[test]
fn roofs_shift_minima_and_height_upwards() {
    let d = chambert_loir_polytope(2).unwrap();
    let pts: Vec<_> = d.vertices().iter().map(|v| (v.clone(), rat(1))).chain([(point(&[0, 0]), rat(3))]).collect();
    let roof = build_roof(&d, &pts).unwrap();
    let p = AdelicPolytope::single("v", roof).unwrap();
    let hq = QuadraticForm::from_gram(vec![point(&[1, 0]), point(&[0, 1])]).unwrap();
    let flat = successive_minima_with_roofs(&AdelicPolytope::canonical(d.clone()), &hq, 1, Convention::Default).unwrap();
    let lifted = successive_minima_with_roofs(&p, &hq, 1, Convention::Default).unwrap();
    assert!(flat.iter().zip(&lifted).all(|(a, b)| a <= b));
    let gram = vec![point(&[1, 0]), point(&[0, 1])];
    let a = height(&SemiabelianInput::canonical(1, d, gram.clone(), rat(1)).unwrap()).unwrap();
    let b = height(&SemiabelianInput::new(1, p, gram, rat(1)).unwrap()).unwrap();
    assert!(b.okounkov_route > a.okounkov_route);
}

#[test]
fn bkk_functionals_on_the_abelian_ring() {
    let ring = abelian_canonical_ring(1, &rat(3), &[point(&[1])]).unwrap();
    let omega = ring.generator_by_name("omega").unwrap();
    let inst = BkkInstance::new(ring.clone(), omega, 1).unwrap();
    let p = AdelicPolytope::canonical(RationalPolytope::interval(rat(-1), rat(1)));
    let i = I_hat(&inst, &p).unwrap();
    assert_eq!(F_hat(&inst, &p).unwrap(), rat(2) * &i);
    assert_eq!(polarize_I(&inst, &[p.clone(), p.clone()]).unwrap(), i);
}

#[test]
fn okounkov_bodies() {
    let p = AdelicPolytope::canonical(RationalPolytope::interval(rat(-1), rat(1)));
    let fiber = RationalPolytope::interval(rat(0), rat(3));
    let hq = QuadraticForm::from_gram(vec![point(&[1])]).unwrap();
    let b = product_body(&p, &fiber, BaseTransform::NegQuadratic(hq)).unwrap();
    let v = volumes(&b).unwrap();
    assert_eq!((v.geometric, v.chi), (rat(12), rat(-12)));
    let e = transform_extrema(&b).unwrap();
    assert_eq!((e.max, e.inf), (rat(0), rat(-1)));
    let toric = toric_okounkov(&p);
    assert_eq!(volumes(&toric).unwrap().chi, rat(0));
}

#[test]
fn heights_are_monotone_in_roofs() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..5 {
        let p = random_adelic_polytope(&mut rng, 1);
        let gram = random_psd_gram(&mut rng, 1);
        let base = AdelicPolytope::canonical(p.base().clone());
        let lo = height(&SemiabelianInput::new(1, base, gram.clone(), rat(2)).unwrap()).unwrap();
        let hi = height(&SemiabelianInput::new(1, p, gram, rat(2)).unwrap()).unwrap();
        assert!(hi.okounkov_route >= lo.okounkov_route);
    }
}

#[test]
fn suites_are_reproducible() {
    let a = run_suite("legendre", 99).unwrap();
    let b = run_suite("legendre", 99).unwrap();
    assert_eq!(a, b);
    assert!(a.ok());
}

#[test]
fn weights_scale_the_global_roof() {
    let d = RationalPolytope::interval(rat(0), rat(2));
    let r = build_roof(&d, &[(point(&[0]), rat(0)), (point(&[1]), rat(2)), (point(&[2]), rat(0))]).unwrap();
    let p = AdelicPolytope::new(d, BTreeMap::from([("v".into(), r)]), BTreeMap::from([("v".into(), ratio(1, 2))]))
        .unwrap();
    assert_eq!(p.global_roof().max_value(), rat(1));
}
