//! Seeded random-case generators and the invariant suites run by `verify`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::base_model::{build_ring, BaseRing, RingElement, RingSpec};
use crate::bkk::{compositions, directional_derivative, virtual_I, BkkInstance, VirtualAdelicPolytope, I_hat};
use crate::error::{Error, Result};
use crate::fan::normal_fan;
use crate::linalg::{abs_det, is_psd};
use crate::minima::{absolute_minimum, essential_minimum, is_nondecreasing, Convention, ZetaOracle};
use crate::okounkov::{toric_okounkov, volumes};
use crate::poly::Polynomial;
use crate::polyint::{integrate_polynomial, integrate_symmetric_form_simplex, SymmetricForm};
use crate::polytope::{RationalPolytope, Simplex};
use crate::rational::{factorial, fmt_point, fmt_rational, Point, Rational};
use crate::roofs::{
    build_roof, legendre_dual, reconstruct, restricted_normal_fan, AdelicFan, AdelicPolytope, PlaceId, RayId, Roof,
};
use crate::semiabelian::{
    bkk_route, chambert_loir_polytope, cl_closed_forms, height, minima_report, okounkov_route, SemiabelianInput,
};

pub const DEFAULT_SEED: u64 = 7;

pub const SUITES: [&str; 10] = [
    "route_consistency",
    "i_zero",
    "polynomiality",
    "derivative",
    "non_cone",
    "simplex_formula",
    "minima",
    "legendre",
    "toric_height",
    "hypograph_volume",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteResult {
    pub name: String,
    pub cases: usize,
    pub passed: usize,
    /// Description of the first failing case.
    pub counterexample: Option<String>,
}

impl SuiteResult {
    pub fn ok(&self) -> bool {
        self.cases > 0 && self.passed == self.cases
    }
}

struct Tally {
    cases: usize,
    passed: usize,
    counterexample: Option<String>,
}

impl Tally {
    fn new() -> Self {
        Tally { cases: 0, passed: 0, counterexample: None }
    }

    fn record(&mut self, outcome: Result<std::result::Result<(), String>>) {
        self.cases += 1;
        let failure = match outcome {
            Ok(Ok(())) => {
                self.passed += 1;
                return;
            }
            Ok(Err(msg)) => msg,
            Err(e) => format!("{}: {e}", e.name()),
        };
        if self.counterexample.is_none() {
            self.counterexample = Some(format!("case {}: {failure}", self.cases));
        }
    }

    fn finish(self, name: &str) -> SuiteResult {
        SuiteResult { name: name.to_string(), cases: self.cases, passed: self.passed, counterexample: self.counterexample }
    }
}

fn expect_eq(what: &str, got: &Rational, want: &Rational) -> std::result::Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {}, expected {}", fmt_rational(got), fmt_rational(want)))
    }
}

fn fact(n: usize) -> Rational {
    Rational::from_integer(factorial(n))
}

fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

// ---- generators ----

/// A uniform element of `[lo, hi] ∩ (1/2)Z`.
pub fn half_integer(rng: &mut impl Rng, lo: i64, hi: i64) -> Rational {
    Rational::new(rng.gen_range(2 * lo..=2 * hi).into(), 2.into())
}

/// A full-dimensional polytope in `Q^t` with at most `max_vertices`
/// generating points, coordinates in `[-3, 3] ∩ (1/2)Z`.
pub fn random_polytope(rng: &mut impl Rng, t: usize, max_vertices: usize) -> RationalPolytope {
    loop {
        let n = rng.gen_range(t + 1..=max_vertices.max(t + 1));
        let pts: Vec<Point> = (0..n).map(|_| (0..t).map(|_| half_integer(rng, -3, 3)).collect()).collect();
        if let Ok(p) = RationalPolytope::from_vertices(pts) {
            if p.is_full_dimensional() {
                return p;
            }
        }
    }
}

/// A full-dimensional lattice polytope with coordinates in `[-2, 2]`.
pub fn random_lattice_polytope(rng: &mut impl Rng, t: usize, max_vertices: usize) -> RationalPolytope {
    loop {
        let n = rng.gen_range(t + 1..=max_vertices.max(t + 1));
        let pts: Vec<Point> = (0..n).map(|_| (0..t).map(|_| int(rng.gen_range(-2..=2))).collect()).collect();
        if let Ok(p) = RationalPolytope::from_vertices(pts) {
            if p.is_full_dimensional() {
                return p;
            }
        }
    }
}

fn random_convex_point(rng: &mut impl Rng, domain: &RationalPolytope) -> Point {
    let verts = domain.vertices();
    let weights: Vec<i64> = verts.iter().map(|_| rng.gen_range(0..=3)).collect();
    let total: i64 = weights.iter().sum();
    if total == 0 {
        return verts[0].clone();
    }
    let mut p = vec![Rational::zero(); domain.ambient_dim()];
    for (v, &w) in verts.iter().zip(&weights) {
        for (pi, vi) in p.iter_mut().zip(v) {
            *pi += vi * int(w);
        }
    }
    p.into_iter().map(|x| x / int(total)).collect()
}

/// A concave piecewise-affine roof from random heights at the vertices and a
/// few interior points.
pub fn random_roof(rng: &mut impl Rng, domain: &RationalPolytope) -> Roof {
    let mut pts: Vec<(Point, Rational)> =
        domain.vertices().iter().map(|v| (v.clone(), half_integer(rng, 0, 3))).collect();
    for _ in 0..rng.gen_range(0..=2) {
        let p = random_convex_point(rng, domain);
        pts.push((p, half_integer(rng, 0, 4)));
    }
    build_roof(domain, &pts).expect("heights are nonnegative and points lie in the domain")
}

/// Up to two places with random roofs and weights in `{1/2, 1, 2}`.
pub fn random_adelic_polytope(rng: &mut impl Rng, t: usize) -> AdelicPolytope {
    let base = random_polytope(rng, t, 6);
    let mut roofs = BTreeMap::new();
    let mut weights = BTreeMap::new();
    for k in 0..rng.gen_range(0..=2) {
        let w: PlaceId = format!("v{}", k + 1);
        roofs.insert(w.clone(), random_roof(rng, &base));
        let n = [Rational::new(1.into(), 2.into()), int(1), int(2)][rng.gen_range(0..3)].clone();
        weights.insert(w, n);
    }
    AdelicPolytope::new(base, roofs, weights).expect("roofs share the base")
}

/// A symmetric positive semidefinite matrix with entries in `[0, 4] ∩ (1/4)Z`.
pub fn random_psd_gram(rng: &mut impl Rng, t: usize) -> Vec<Point> {
    let quarter = |rng: &mut dyn rand::RngCore| Rational::new(rng.gen_range(0..=16).into(), 4.into());
    for _ in 0..200 {
        let mut g = vec![vec![Rational::zero(); t]; t];
        for i in 0..t {
            for j in i..t {
                let x = quarter(rng);
                g[i][j] = x.clone();
                g[j][i] = x;
            }
        }
        if is_psd(&g) {
            return g;
        }
    }
    (0..t)
        .map(|i| (0..t).map(|j| if i == j { quarter(rng) } else { Rational::zero() }).collect())
        .collect()
}

/// A ring on `x1..xt, w, inf` (all of grade 1) with a random top-degree
/// table and lattice map; `[∞]²` is the only structural zero.
pub fn random_ring(rng: &mut impl Rng, t: usize, top: u32) -> BaseRing {
    let n = t + 2;
    let mut generators: Vec<(String, u32)> = (1..=t).map(|i| (format!("x{i}"), 1)).collect();
    generators.push(("w".into(), 1));
    generators.push(("inf".into(), 1));
    let table = compositions(n, top)
        .into_iter()
        .filter(|m| m[n - 1] < 2)
        .map(|m| (m, int(rng.gen_range(-3..=3))))
        .collect();
    let lattice_map = (0..t)
        .map(|_| (0..n).map(|k| if k + 1 == n { Rational::zero() } else { int(rng.gen_range(-1..=1)) }).collect())
        .collect();
    build_ring(&RingSpec { generators, infinity: "inf".into(), top_degree: top, table, zeros: vec![], lattice_map })
        .expect("table covers every top-degree monomial")
}

fn monomial_element(ring: &BaseRing, m: &[u32]) -> RingElement {
    m.iter()
        .enumerate()
        .fold(ring.one(), |acc, (k, &e)| ring.mul(&acc, &ring.pow(&ring.generator(k), e)))
}

/// A nonzero-coefficient combination of one to three monomials of `grade`.
pub fn random_gamma(rng: &mut impl Rng, ring: &BaseRing, grade: u32) -> RingElement {
    if grade == 0 {
        return ring.one();
    }
    let n = ring.generator_names().len();
    let monos: Vec<Vec<u32>> = compositions(n, grade).into_iter().filter(|m| !ring.is_structural_zero(m)).collect();
    let mut out = ring.zero(grade);
    for _ in 0..rng.gen_range(1..=3) {
        let m = &monos[rng.gen_range(0..monos.len())];
        let c = int([-2, -1, 1, 2][rng.gen_range(0..4)]);
        out = ring.add(&out, &monomial_element(ring, m).scaled(&c)).expect("same grade");
    }
    out
}

/// A single-place adelic polytope together with a fan in which it is
/// v-interior at `place`.
#[derive(Debug, Clone)]
pub struct InteriorInstance {
    pub polytope: AdelicPolytope,
    pub fan: AdelicFan,
    pub place: PlaceId,
}

impl InteriorInstance {
    /// Ray id of a lift ray: recession ray ids for rays on the hyperplane.
    pub fn ray_id(&self, lift_ray: usize) -> RayId {
        let lift = self.fan.lift(&self.place);
        let r = lift.ray(lift_ray);
        let t = self.fan.dim();
        if r[t].is_zero() {
            RayId::Recession(self.fan.recession().ray_index(&r[..t]).expect("lift restricts to the recession fan"))
        } else {
            RayId::Lifted { place: self.place.clone(), ray: lift_ray }
        }
    }

    /// Index in the lift of the ray named by `id`.
    pub fn lift_index(&self, id: &RayId) -> Result<usize> {
        let v = self.fan.ray_vector(id)?;
        let mut full = v.clone();
        if let RayId::Recession(_) = id {
            full.push(Rational::zero());
        }
        self.fan
            .lift(&self.place)
            .ray_index(&full)
            .ok_or_else(|| Error::UnknownRay(id.to_string()))
    }
}

/// A lattice polytope with a strictly positive integral roof at place `v`,
/// paired with the restricted normal fan of its hypograph. Every maximal cone
/// of the lift is simplicial; with `unimodular`, they are also unimodular.
pub fn random_interior_instance(rng: &mut impl Rng, t: usize, unimodular: bool) -> InteriorInstance {
    loop {
        let base = random_lattice_polytope(rng, t, t + 2);
        let mut pts: Vec<(Point, Rational)> =
            base.vertices().iter().map(|v| (v.clone(), int(rng.gen_range(1..=3)))).collect();
        if rng.gen_bool(0.5) {
            let p = random_convex_point(rng, &base);
            if p.iter().all(|x| x.is_integer()) {
                pts.push((p, int(rng.gen_range(2..=4))));
            }
        }
        let Ok(roof) = build_roof(&base, &pts) else { continue };
        let Ok(polytope) = AdelicPolytope::single("v", roof) else { continue };
        let Ok(lift) = restricted_normal_fan(&polytope.hypograph("v")) else { continue };
        let cones = lift.maximal_cones();
        if cones.iter().any(|c| c.len() != t + 1) {
            continue;
        }
        if unimodular
            && cones.iter().any(|c| {
                let m: Vec<Point> = c.iter().map(|&i| lift.ray(i)).collect();
                !abs_det(&m).is_one()
            })
        {
            continue;
        }
        let Ok(rec) = normal_fan(polytope.base()) else { continue };
        let Ok(fan) = AdelicFan::new(rec.fan, BTreeMap::from([("v".to_string(), lift)])) else { continue };
        if fan.is_v_interior(&polytope, "v") != Ok(true) {
            continue;
        }
        return InteriorInstance { polytope, fan, place: "v".into() };
    }
}

// ---- suites ----

pub fn run_suite(name: &str, seed: u64) -> Result<SuiteResult> {
    let index = SUITES
        .iter()
        .position(|s| *s == name)
        .ok_or_else(|| Error::InvalidInput(format!("unknown suite {name}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let tally = match index {
        0 => route_consistency(&mut rng),
        1 => i_zero(&mut rng),
        2 => polynomiality(&mut rng),
        3 => derivative(&mut rng),
        4 => non_cone(&mut rng),
        5 => simplex_formula(&mut rng),
        6 => minima(&mut rng),
        7 => legendre(&mut rng),
        8 => toric_height(&mut rng),
        _ => hypograph_volume(&mut rng),
    };
    Ok(tally.finish(name))
}

/// All suites, run concurrently; results in [`SUITES`] order.
pub fn run_all(seed: u64) -> Vec<SuiteResult> {
    std::thread::scope(|s| {
        let handles: Vec<_> = SUITES.iter().map(|name| s.spawn(move || run_suite(name, seed))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("suite panicked").expect("suite names are known"))
            .collect()
    })
}

fn route_consistency(rng: &mut ChaCha8Rng) -> Tally {
    let mut tally = Tally::new();
    tally.record((|| {
        let inp = SemiabelianInput::canonical(1, chambert_loir_polytope(1)?, vec![vec![int(1)]], int(3))?;
        let r = height(&inp)?;
        let want = (int(-12), int(-12), int(-4));
        if (r.okounkov_route.clone(), r.bkk_route.clone(), r.printed_formula.clone()) == want {
            Ok(Ok(()))
        } else {
            Ok(Err(format!(
                "pinned instance gave {}, {}, {}",
                fmt_rational(&r.okounkov_route),
                fmt_rational(&r.bkk_route),
                fmt_rational(&r.printed_formula)
            )))
        }
    })());
    for k in 0..100 {
        let t = rng.gen_range(1..=2);
        let g = rng.gen_range(1..=2);
        let p = if k % 2 == 0 {
            AdelicPolytope::canonical(random_polytope(rng, t, 6))
        } else {
            random_adelic_polytope(rng, t)
        };
        let gram = random_psd_gram(rng, t);
        let deg_m = int([1, 2, 3, 6][rng.gen_range(0..4)]);
        tally.record((|| {
            let inp = SemiabelianInput::new(g, p.clone(), gram.clone(), deg_m.clone())?;
            let ok = okounkov_route(&inp)?;
            let bkk = bkk_route(&inp)?;
            Ok(expect_eq(&format!("t={t} g={g} degM={deg_m} base {}", p.base()), &bkk, &ok))
        })());
    }
    tally
}

fn i_zero(rng: &mut ChaCha8Rng) -> Tally {
    let mut tally = Tally::new();
    for _ in 0..50 {
        let t = rng.gen_range(1..=3);
        let grade = rng.gen_range(1..=3);
        let ring = random_ring(rng, t, grade);
        let gamma = random_gamma(rng, &ring, grade);
        let p = random_adelic_polytope(rng, t);
        tally.record((|| {
            let inst = BkkInstance::new(ring.clone(), gamma.clone(), 0)?;
            let want = p.base().volume() * ring.deg(&gamma)?;
            Ok(expect_eq(&format!("gamma {} on {}", ring.fmt_element(&gamma), p.base()), &I_hat(&inst, &p)?, &want))
        })());
    }
    tally
}

fn instance_for(rng: &mut ChaCha8Rng, t: usize, i: u32) -> Result<BkkInstance> {
    let grade = rng.gen_range(0..=1);
    let ring = random_ring(rng, t, i + grade);
    let gamma = random_gamma(rng, &ring, grade);
    BkkInstance::new(ring, gamma, i)
}

/// `Σ_k (-1)^{n-k} C(n,k) f(k)`.
fn finite_difference(values: &[Rational]) -> Rational {
    let n = values.len() - 1;
    values
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let c = Rational::from_integer(crate::rational::binomial(n, k));
            if (n - k).is_multiple_of(2) {
                c * v
            } else {
                -c * v
            }
        })
        .sum()
}

fn polynomiality(rng: &mut ChaCha8Rng) -> Tally {
    let mut tally = Tally::new();
    for _ in 0..50 {
        let t = rng.gen_range(1..=2);
        let i = rng.gen_range(0..=2);
        let inst = random_interior_instance(rng, t, false);
        let bkk = instance_for(rng, t, i);
        let places = vec![inst.place.clone()];
        let ids = inst.fan.ray_ids(&places);
        let mut dir: BTreeMap<RayId, Rational> = ids.iter().map(|id| (id.clone(), int(rng.gen_range(0..=2)))).collect();
        if dir.values().all(Zero::is_zero) {
            dir.insert(ids[0].clone(), int(1));
        }
        tally.record((|| {
            let bkk = bkk?;
            let order = inst.polytope.dim() + bkk.i() as usize + 1;
            let a = inst.fan.support_vector(&inst.polytope, &places)?;
            let weights = inst.polytope.weights().clone();
            let at = |delta: &Rational, k: usize| {
                let mut moved = a.clone();
                for (id, d) in &dir {
                    *moved.get_mut(id).expect("direction over fan rays") += d * delta * int(k as i64);
                }
                inst.fan.polytope_from_support(&moved, &weights)
            };
            let mut delta = int(1);
            let mut steps = None;
            for _ in 0..24 {
                let attempt: Result<Vec<AdelicPolytope>> = (0..=order).map(|k| at(&delta, k)).collect();
                match attempt {
                    Ok(v) => {
                        steps = Some(v);
                        break;
                    }
                    Err(Error::IncompatibleFan(_)) => delta /= int(2),
                    Err(e) => return Err(e),
                }
            }
            let steps = steps.ok_or_else(|| Error::IncompatibleFan("direction leaves the fan".into()))?;
            let (p0, p1) = (steps[0].clone(), steps[1].clone());
            let mut along = Vec::new();
            for (k, pk) in steps.iter().enumerate() {
                let c = int(k as i64);
                let v = VirtualAdelicPolytope::new(vec![(int(1) - &c, p0.clone()), (c, p1.clone())]);
                let extended = virtual_I(&bkk, &v)?;
                let direct = I_hat(&bkk, pk)?;
                if extended != direct {
                    return Ok(Err(format!(
                        "step {k}: virtual value {} differs from {}",
                        fmt_rational(&extended),
                        fmt_rational(&direct)
                    )));
                }
                along.push(extended);
            }
            Ok(expect_eq(&format!("difference of order {order} on {}", inst.polytope.base()), &finite_difference(&along), &Rational::zero()))
        })());
    }
    tally
}

fn derivative(rng: &mut ChaCha8Rng) -> Tally {
    let mut tally = Tally::new();
    for _ in 0..20 {
        let t = rng.gen_range(1..=2);
        let i = rng.gen_range(1..=2);
        let inst = random_interior_instance(rng, t, true);
        let bkk = instance_for(rng, t, i);
        let lift = inst.fan.lift(&inst.place);
        let cones = lift.maximal_cones();
        let cone = cones[rng.gen_range(0..cones.len())].clone();
        tally.record((|| {
            let bkk = bkk?;
            let ring = bkk.ring();
            let rays: Vec<RayId> = cone.iter().map(|&j| inst.ray_id(j)).collect();
            let body = inst.polytope.hypograph(&inst.place);
            let vertex = body
                .vertices()
                .iter()
                .find(|v| cone.iter().all(|&j| body.maximizers(&lift.ray(j)).iter().any(|&k| &body.vertices()[k] == *v)))
                .ok_or_else(|| Error::IncompatibleFan("cone has no dual vertex".into()))?;
            let a = ring.c_hat(&vertex[..t])?;
            let el = ring.mul(&ring.mul(&ring.pow(&a, bkk.i() - 1), &ring.infinity()), bkk.gamma());
            let det = abs_det(&cone.iter().map(|&j| lift.ray(j)).collect::<Vec<_>>());
            let want = int(bkk.i() as i64) * ring.deg(&el)? * det * inst.polytope.weight(&inst.place);
            let got = directional_derivative(&bkk, &inst.polytope, &inst.fan, &rays)?;
            Ok(expect_eq(&format!("cone at vertex {} of {}", fmt_point(vertex), body), &got, &want))
        })());
    }
    tally
}

fn non_cone(rng: &mut ChaCha8Rng) -> Tally {
    let mut tally = Tally::new();
    let mut k = 0;
    while tally.cases < 20 {
        k += 1;
        let t = rng.gen_range(1..=2);
        let inst = random_interior_instance(rng, t, false);
        let bkk = instance_for(rng, t, 2);
        let ids = inst.fan.ray_ids(std::slice::from_ref(&inst.place));
        let lift = inst.fan.lift(&inst.place);
        let order = t + 2;
        let mut chosen = None;
        for _ in 0..200 {
            let n = rng.gen_range(2..=order);
            let mut pick: Vec<RayId> = (0..n).map(|_| ids[rng.gen_range(0..ids.len())].clone()).collect();
            if k % 2 == 0 && n < order {
                pick.push(pick[0].clone());
            }
            let mut distinct: Vec<usize> = pick.iter().map(|id| inst.lift_index(id).expect("fan ray")).collect();
            distinct.sort_unstable();
            distinct.dedup();
            if distinct.len() >= 2 && !lift.contains_cone(&distinct) {
                chosen = Some(pick);
                break;
            }
        }
        let Some(rays) = chosen else { continue };
        tally.record((|| {
            let got = directional_derivative(&bkk?, &inst.polytope, &inst.fan, &rays)?;
            let names: Vec<String> = rays.iter().map(ToString::to_string).collect();
            Ok(expect_eq(&format!("rays [{}] on {}", names.join(", "), inst.polytope.hypograph(&inst.place)), &got, &Rational::zero()))
        })());
    }
    tally
}

fn random_simplex(rng: &mut ChaCha8Rng, t: usize) -> Simplex {
    loop {
        let vertices: Vec<Point> = (0..=t).map(|_| (0..t).map(|_| half_integer(rng, -3, 3)).collect()).collect();
        let s = Simplex { vertices };
        if !s.volume().is_zero() {
            return s;
        }
    }
}

fn simplex_formula(rng: &mut ChaCha8Rng) -> Tally {
    let mut tally = Tally::new();
    tally.record((|| {
        let seg = Simplex { vertices: vec![vec![int(-1)], vec![int(1)]] };
        let sq = Polynomial::monomial(vec![2], int(1));
        let got = integrate_symmetric_form_simplex(&seg, &SymmetricForm::polarization(&sq)?, 2)?;
        Ok(expect_eq("m^2 on [-1,1]", &got, &Rational::new(2.into(), 3.into())))
    })());
    tally.record((|| {
        let tri = chambert_loir_polytope(2)?;
        let s = Simplex { vertices: tri.vertices().to_vec() };
        let got = integrate_symmetric_form_simplex(&s, &SymmetricForm::dot_product(2), 2)?;
        Ok(expect_eq("x^2+y^2 on the triangle", &got, &Rational::new(9.into(), 2.into())))
    })());
    for _ in 0..100 {
        let t = rng.gen_range(1..=3);
        let r = rng.gen_range(1..=4);
        let s = random_simplex(rng, t);
        let entries: Vec<(Vec<usize>, Rational)> = compositions(t, r as u32)
            .into_iter()
            .map(|m| {
                let idx: Vec<usize> = m.iter().enumerate().flat_map(|(k, &e)| std::iter::repeat_n(k, e as usize)).collect();
                (idx, int(rng.gen_range(-3..=3)))
            })
            .collect();
        tally.record((|| {
            let h = SymmetricForm::new(t, r, entries.clone())?;
            let poly = RationalPolytope::from_vertices(s.vertices.clone())?;
            let want = integrate_polynomial(&poly, &h.diagonal())?;
            Ok(expect_eq(&format!("arity {r} on simplex {poly}"), &integrate_symmetric_form_simplex(&s, &h, r)?, &want))
        })());
    }
    tally
}

fn minima(rng: &mut ChaCha8Rng) -> Tally {
    let mut tally = Tally::new();
    let worked = [(1usize, vec![vec![int(1)]], vec![int(-1), int(-1), int(0)]), (
        2,
        vec![vec![int(1), int(0)], vec![int(0), int(1)]],
        vec![int(-5), int(-5), int(-1), int(0)],
    )];
    for (t, gram, want) in worked {
        tally.record((|| {
            let inp = SemiabelianInput::canonical(1, chambert_loir_polytope(t)?, gram, int(3))?;
            let got = minima_report(&inp, Convention::Default)?;
            if got == want {
                Ok(Ok(()))
            } else {
                Ok(Err(format!("t={t}: minima {}", fmt_point(&got))))
            }
        })());
    }
    for _ in 0..50 {
        let t = rng.gen_range(1..=3);
        let g = rng.gen_range(1..=2);
        let gram = random_psd_gram(rng, t);
        let deg_m = int([1, 2, 3, 6][rng.gen_range(0..4)]);
        tally.record((|| {
            let delta = chambert_loir_polytope(t)?;
            let p = AdelicPolytope::canonical(delta.clone());
            let z = ZetaOracle::concave_quadratic(gram.clone(), vec![Rational::zero(); t], Rational::zero())?;
            let closed = cl_closed_forms(t, &gram, &deg_m, g)?;
            let abs = absolute_minimum(&p, &z)?.value;
            let label = format!("gram {:?}", gram.iter().map(|r| fmt_point(r)).collect::<Vec<_>>());
            if let Err(e) = expect_eq(&format!("{label} absolute minimum"), &abs, &closed.zeta_abs_closed) {
                return Ok(Err(e));
            }
            let zetas = minima_report(&SemiabelianInput::canonical(g, delta, gram.clone(), deg_m.clone())?, Convention::Default)?;
            if !is_nondecreasing(&zetas) {
                return Ok(Err(format!("{label}: minima {} decrease", fmt_point(&zetas))));
            }
            if zetas.len() != t + g + 1 {
                return Ok(Err(format!("{label}: {} minima", zetas.len())));
            }
            Ok(expect_eq(&format!("{label} essential minimum"), zetas.last().expect("nonempty"), &essential_minimum(&p, &z)?))
        })());
    }
    tally
}

fn legendre(rng: &mut ChaCha8Rng) -> Tally {
    let mut tally = Tally::new();
    for _ in 0..100 {
        let t = rng.gen_range(1..=3);
        let base = random_polytope(rng, t, t + 3);
        let roof = random_roof(rng, &base);
        tally.record((|| {
            let back = reconstruct(&legendre_dual(&roof))?;
            if back == roof {
                Ok(Ok(()))
            } else {
                Ok(Err(format!("{roof} came back as {back}")))
            }
        })());
    }
    tally
}

fn roof_integral(r: &Roof) -> Result<Rational> {
    let t = r.domain().ambient_dim();
    let mut total = Rational::zero();
    for (cell, piece) in r.cells().iter().zip(r.pieces()) {
        if t > 0 && !cell.is_full_dimensional() {
            continue;
        }
        total += integrate_polynomial(cell, &Polynomial::affine(&piece.gradient, &piece.constant))?;
    }
    Ok(total)
}

fn toric_height(rng: &mut ChaCha8Rng) -> Tally {
    let mut tally = Tally::new();
    for k in 0..50 {
        let t = rng.gen_range(1..=3);
        let p = if k % 10 == 0 {
            AdelicPolytope::canonical(random_polytope(rng, t, 6))
        } else {
            random_adelic_polytope(rng, t)
        };
        tally.record((|| {
            let chi = volumes(&toric_okounkov(&p))?.chi;
            let want = fact(t + 1) * roof_integral(&p.global_roof())?;
            if p.global_roof().is_zero() && !chi.is_zero() {
                return Ok(Err(format!("canonical roofs gave {}", fmt_rational(&chi))));
            }
            Ok(expect_eq(&format!("roof {}", p.global_roof()), &chi, &want))
        })());
    }
    tally
}

fn hypograph_volume(rng: &mut ChaCha8Rng) -> Tally {
    let mut tally = Tally::new();
    for _ in 0..50 {
        let t = rng.gen_range(1..=3);
        let base = random_polytope(rng, t, t + 3);
        let roof = random_roof(rng, &base);
        tally.record((|| {
            let p = AdelicPolytope::single("v", roof.clone())?;
            let vol = if roof.is_zero() { Rational::zero() } else { p.hypograph("v").volume() };
            Ok(expect_eq(&format!("{roof}"), &vol, &roof_integral(&roof)?))
        })());
    }
    tally
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        let mut a = ChaCha8Rng::seed_from_u64(3);
        let mut b = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(random_adelic_polytope(&mut a, 2), random_adelic_polytope(&mut b, 2));
        assert_eq!(random_psd_gram(&mut a, 3), random_psd_gram(&mut b, 3));
    }

    #[test]
    fn interior_instances_are_interior() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for t in 1..=2 {
            let inst = random_interior_instance(&mut rng, t, true);
            assert!(inst.fan.is_v_interior(&inst.polytope, "v").unwrap());
            for c in inst.fan.lift("v").maximal_cones() {
                assert_eq!(c.len(), t + 1);
            }
        }
    }

    #[test]
    fn psd_grams() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for t in 1..=3 {
            assert!(is_psd(&random_psd_gram(&mut rng, t)));
        }
    }

    #[test]
    fn finite_differences() {
        let cubic: Vec<Rational> = (0..5).map(|k| int(k * k * k - 2 * k)).collect();
        assert_eq!(finite_difference(&cubic), int(0));
        assert_eq!(finite_difference(&cubic[..4]), int(6));
    }

    #[test]
    fn unknown_suite() {
        assert_eq!(run_suite("nope", 1).unwrap_err().name(), "InvalidInput");
    }
}
