//! The bundle BKK functionals `Î_γ`, `F̂_γ`, their polarization, their
//! polynomial extension to virtual adelic polytopes and exact mixed
//! derivatives along ray directions.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::base_model::{BaseRing, RingElement};
use crate::error::{check_dim, Error, Result};
use crate::poly::Polynomial;
use crate::polyint::integrate_roof_composite;
use crate::polytope::RationalPolytope;
use crate::rational::{factorial, Rational};
use crate::roofs::{AdelicFan, AdelicPolytope, PlaceId, RayId};

fn fact(n: usize) -> Rational {
    Rational::from_integer(factorial(n))
}

/// All exponent vectors of length `k` with entries summing to `d`.
pub(crate) fn compositions(k: usize, d: u32) -> Vec<Vec<u32>> {
    if k == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=d).rev() {
        for mut rest in compositions(k - 1, d - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn multinomial(alpha: &[u32]) -> Rational {
    let n: u32 = alpha.iter().sum();
    fact(n as usize) / alpha.iter().map(|&a| fact(a as usize)).product::<Rational>()
}

/// A class `γ` of grade `top − i` together with the exponent `i`.
#[derive(Debug, Clone)]
pub struct BkkInstance {
    ring: BaseRing,
    gamma: RingElement,
    i: u32,
    integrand: Polynomial,
}

impl BkkInstance {
    pub fn new(ring: BaseRing, gamma: RingElement, i: u32) -> Result<Self> {
        if gamma.grade() + i != ring.top_degree() && !gamma.is_zero() {
            return Err(Error::GradeMismatch(format!(
                "grade {} plus exponent {i} differs from top degree {}",
                gamma.grade(),
                ring.top_degree()
            )));
        }
        let t = ring.lattice_rank();
        // f(m, s) = deg((ĉ(m) + s[∞])^i γ), expanded termwise.
        let mut integrand = Polynomial::zero(t + 1);
        let inf = ring.infinity();
        for beta in 0..=i.min(1) {
            for alpha in compositions(t, i - beta) {
                let mut el = ring.mul(&gamma, &ring.pow(&inf, beta));
                for (j, &a) in alpha.iter().enumerate() {
                    el = ring.mul(&el, &ring.pow(ring.lattice_image(j), a));
                }
                if el.is_zero() {
                    continue;
                }
                let mut full = alpha.clone();
                full.push(beta);
                let value = ring.deg(&el)?;
                integrand.add_term(full.clone(), multinomial(&full) * value);
            }
        }
        Ok(BkkInstance { ring, gamma, i, integrand })
    }

    pub fn ring(&self) -> &BaseRing {
        &self.ring
    }

    pub fn gamma(&self) -> &RingElement {
        &self.gamma
    }

    pub fn i(&self) -> u32 {
        self.i
    }

    pub fn t(&self) -> usize {
        self.ring.lattice_rank()
    }

    /// Total degree `t + i` of the functional.
    pub fn degree(&self) -> usize {
        self.t() + self.i as usize
    }

    /// The polynomial `f(m, s)` integrated by `I_hat`; variables are
    /// `m_1..m_t, s`.
    pub fn integrand(&self) -> &Polynomial {
        &self.integrand
    }
}

/// `Î_γ(P) = ∫_Δ deg((ĉ(m) + θ(m)[∞])^i γ) dm`.
#[allow(non_snake_case)]
pub fn I_hat(inst: &BkkInstance, p: &AdelicPolytope) -> Result<Rational> {
    check_dim(inst.t(), p.dim())?;
    if inst.t() == 0 {
        // Over a point the integral is the value at the point.
        let theta = p.global_roof().eval(&[])?;
        return Ok(inst.integrand.eval(&[theta]));
    }
    integrate_roof_composite(p, &inst.integrand)
}

/// `F̂_γ(P) = (t+i)!/i! · Î_γ(P)`.
#[allow(non_snake_case)]
pub fn F_hat(inst: &BkkInstance, p: &AdelicPolytope) -> Result<Rational> {
    Ok(I_hat(inst, p)? * fact(inst.degree()) / fact(inst.i as usize))
}

fn origin(t: usize) -> AdelicPolytope {
    AdelicPolytope::canonical(RationalPolytope::point(vec![Rational::zero(); t]))
}

/// `Σ c_k Q_k` for nonnegative integers `c_k`.
fn integer_combination(t: usize, parts: &[AdelicPolytope], c: &[u32]) -> Result<AdelicPolytope> {
    let mut acc: Option<AdelicPolytope> = None;
    for (q, &ck) in parts.iter().zip(c) {
        if ck == 0 {
            continue;
        }
        let term = if ck == 1 { q.clone() } else { q.dilated(&Rational::from_integer(ck.into()))? };
        acc = Some(match acc {
            None => term,
            Some(a) => a.minkowski_sum(&term)?,
        });
    }
    Ok(acc.unwrap_or_else(|| origin(t)))
}

/// Memoized values of `Î` on nonnegative integer combinations of fixed parts.
struct CombinationCache<'a> {
    inst: &'a BkkInstance,
    parts: &'a [AdelicPolytope],
    values: BTreeMap<Vec<u32>, Rational>,
}

impl<'a> CombinationCache<'a> {
    fn new(inst: &'a BkkInstance, parts: &'a [AdelicPolytope]) -> Self {
        CombinationCache { inst, parts, values: BTreeMap::new() }
    }

    fn value(&mut self, c: &[u32]) -> Result<Rational> {
        if let Some(v) = self.values.get(c) {
            return Ok(v.clone());
        }
        let q = integer_combination(self.inst.t(), self.parts, c)?;
        let v = I_hat(self.inst, &q)?;
        self.values.insert(c.to_vec(), v.clone());
        Ok(v)
    }

    /// The polarization evaluated with `α_k` copies of part `k`.
    fn polar(&mut self, alpha: &[u32]) -> Result<Rational> {
        let d: u32 = alpha.iter().sum();
        let mut total = Rational::zero();
        let mut c = vec![0u32; alpha.len()];
        loop {
            let size: u32 = c.iter().sum();
            let mut weight = Rational::one();
            for (&a, &ck) in alpha.iter().zip(&c) {
                weight *= Rational::from_integer(crate::rational::binomial(a as usize, ck as usize));
            }
            if (d - size) % 2 == 1 {
                weight = -weight;
            }
            total += weight * self.value(&c)?;
            let mut k = 0;
            while k < c.len() {
                if c[k] < alpha[k] {
                    c[k] += 1;
                    break;
                }
                c[k] = 0;
                k += 1;
            }
            if k == c.len() {
                return Ok(total / fact(d as usize));
            }
        }
    }
}

/// The symmetric multilinear form whose diagonal is `Î`, evaluated on
/// `t + i` adelic polytopes.
#[allow(non_snake_case)]
pub fn polarize_I(inst: &BkkInstance, parts: &[AdelicPolytope]) -> Result<Rational> {
    let d = inst.degree();
    if parts.len() != d {
        return Err(Error::WrongArity { expected: d, got: parts.len() });
    }
    for p in parts {
        check_dim(inst.t(), p.dim())?;
    }
    let mut cache = CombinationCache::new(inst, parts);
    cache.polar(&vec![1; d])
}

/// A formal rational combination `Σ λ_k P_k` of adelic polytopes.
#[derive(Debug, Clone)]
pub struct VirtualAdelicPolytope {
    terms: Vec<(Rational, AdelicPolytope)>,
}

impl VirtualAdelicPolytope {
    /// The caller guarantees that all summands are compatible with one
    /// adelic fan; see [`VirtualAdelicPolytope::checked`].
    pub fn new(terms: Vec<(Rational, AdelicPolytope)>) -> Self {
        VirtualAdelicPolytope { terms }
    }

    pub fn checked(terms: Vec<(Rational, AdelicPolytope)>, fan: &AdelicFan) -> Result<Self> {
        for (k, (_, p)) in terms.iter().enumerate() {
            if !fan.is_compatible(p, &[]) {
                return Err(Error::IncompatibleFan(format!("summand {k} is not compatible with the fan")));
            }
        }
        Ok(Self::new(terms))
    }

    pub fn terms(&self) -> &[(Rational, AdelicPolytope)] {
        &self.terms
    }
}

/// `Φ(Σ μ_k P_k)` with polynomial coefficients `μ_k`, where `Φ` is the
/// homogeneous polynomial extending `Î`.
#[allow(non_snake_case)]
pub fn virtual_I_polynomial(
    inst: &BkkInstance,
    parts: &[AdelicPolytope],
    coeffs: &[Polynomial],
) -> Result<Polynomial> {
    assert_eq!(parts.len(), coeffs.len());
    let nvars = coeffs.first().map(Polynomial::nvars).unwrap_or(0);
    let d = inst.degree() as u32;
    let mut cache = CombinationCache::new(inst, parts);
    let mut out = Polynomial::zero(nvars);
    for alpha in compositions(parts.len(), d) {
        if alpha.iter().zip(coeffs).any(|(&a, c)| a > 0 && c.is_zero()) {
            continue;
        }
        let polar = cache.polar(&alpha)?;
        if polar.is_zero() {
            continue;
        }
        let mut term = Polynomial::constant(nvars, multinomial(&alpha) * polar);
        for (&a, c) in alpha.iter().zip(coeffs) {
            term = &term * &c.pow(a);
        }
        out = out + term;
    }
    Ok(out)
}

#[allow(non_snake_case)]
pub fn virtual_I(inst: &BkkInstance, v: &VirtualAdelicPolytope) -> Result<Rational> {
    let parts: Vec<AdelicPolytope> = v.terms.iter().map(|(_, p)| p.clone()).collect();
    for p in &parts {
        check_dim(inst.t(), p.dim())?;
    }
    let coeffs: Vec<Polynomial> = v.terms.iter().map(|(c, _)| Polynomial::constant(0, c.clone())).collect();
    Ok(virtual_I_polynomial(inst, &parts, &coeffs)?.eval(&[]))
}

const MAX_HALVINGS: u32 = 24;

/// Exact mixed partial derivative `∂^{|rays|}/∂a_{ρ_1}…∂a_{ρ_k}` of `Î` as a
/// function of the support vector of `P` in the fan `F`.
pub fn directional_derivative(
    inst: &BkkInstance,
    p: &AdelicPolytope,
    fan: &AdelicFan,
    rays: &[RayId],
) -> Result<Rational> {
    check_dim(inst.t(), p.dim())?;
    check_dim(inst.t(), fan.dim())?;
    let mut mult: BTreeMap<RayId, u32> = BTreeMap::new();
    for r in rays {
        fan.ray_vector(r)?;
        *mult.entry(r.clone()).or_insert(0) += 1;
    }
    if !fan.is_compatible(p, &[]) {
        return Err(Error::IncompatibleFan("polytope is not compatible with the fan".into()));
    }
    let mut places: Vec<PlaceId> = p.places();
    for w in fan.lifts().keys() {
        if !places.contains(w) {
            places.push(w.clone());
        }
    }
    for r in mult.keys() {
        if let RayId::Lifted { place, .. } = r {
            if !places.contains(place) {
                places.push(place.clone());
            }
        }
    }
    let a = fan.support_vector(p, &places)?;
    let weights = p.weights().clone();
    let base = fan.polytope_from_support(&a, &weights)?;
    let mut parts = vec![base];
    let mut deltas = Vec::new();
    for r in mult.keys() {
        let mut delta = Rational::one();
        let mut found = None;
        for _ in 0..MAX_HALVINGS {
            let mut moved = a.clone();
            *moved.get_mut(r).expect("ray in support vector") += &delta;
            match fan.polytope_from_support(&moved, &weights) {
                Ok(q) => {
                    found = Some(q);
                    break;
                }
                Err(Error::IncompatibleFan(_)) => delta /= Rational::from_integer(2.into()),
                Err(e) => return Err(e),
            }
        }
        let q = found.ok_or_else(|| {
            Error::IncompatibleFan(format!("support value at {r} cannot be moved within the fan"))
        })?;
        parts.push(q);
        deltas.push(delta);
    }
    // a + Σ λ_k e_k = (1 − Σ λ_k/δ_k)·a + Σ (λ_k/δ_k)·(a + δ_k e_k)
    let k = deltas.len();
    let mut coeffs = vec![Polynomial::one(k)];
    for (j, dj) in deltas.iter().enumerate() {
        let v = Polynomial::var(k, j).scaled(&(Rational::one() / dj));
        coeffs[0] = coeffs[0].clone() - v.clone();
        coeffs.push(v);
    }
    let poly = virtual_I_polynomial(inst, &parts, &coeffs)?;
    let exps: Vec<u32> = mult.values().copied().collect();
    let scale: Rational = exps.iter().map(|&e| fact(e as usize)).product();
    Ok(poly.coefficient(&exps) * scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_model::{abelian_canonical_ring, build_ring, RingSpec};
    use crate::fan::Fan;
    use crate::rational::{point, rat, ratio};
    use crate::roofs::build_roof;

    fn interval(a: i64, b: i64) -> RationalPolytope {
        RationalPolytope::interval(rat(a), rat(b))
    }

    /// One flat generator `x`, `[∞]`, and a free top-degree table.
    fn free_ring(t: usize, top: u32, seed: i64) -> BaseRing {
        let mut generators: Vec<(String, u32)> = (1..=t).map(|i| (format!("x{i}"), 1)).collect();
        generators.push(("inf".into(), 1));
        let n = t + 1;
        let table = crate::bkk::compositions(n, top)
            .into_iter()
            .filter(|m| m[t] < 2)
            .enumerate()
            .map(|(k, m)| (m, rat((k as i64 * 7 + seed) % 5 - 2)))
            .collect();
        let lattice_map = (0..t)
            .map(|j| {
                let mut r = vec![rat(0); n];
                r[j] = rat(1);
                r
            })
            .collect();
        build_ring(&RingSpec { generators, infinity: "inf".into(), top_degree: top, table, zeros: vec![], lattice_map })
            .unwrap()
    }

    #[test]
    fn degeneration_at_i_zero() {
        let ring = free_ring(1, 1, 0);
        let gamma = ring.parse_element("inf").unwrap();
        let inst = BkkInstance::new(ring.clone(), gamma.clone(), 0).unwrap();
        let p = AdelicPolytope::canonical(interval(0, 1));
        assert_eq!(I_hat(&inst, &p).unwrap(), ring.deg(&gamma).unwrap());
        let r = abelian_canonical_ring(1, &rat(1), &[point(&[0, 0]), point(&[0, 0])]).unwrap();
        let inst = BkkInstance::new(r.clone(), r.parse_element("inf*omega").unwrap(), 0).unwrap();
        let sq = AdelicPolytope::canonical(RationalPolytope::cube(2));
        assert_eq!(F_hat(&inst, &sq).unwrap(), rat(2));
    }

    #[test]
    fn linear_integrands() {
        let r = abelian_canonical_ring(1, &rat(3), &[point(&[1])]).unwrap();
        let gamma = r.parse_element("x1").unwrap();
        let inst = BkkInstance::new(r.clone(), gamma, 1).unwrap();
        let p = AdelicPolytope::canonical(interval(0, 2));
        // deg(ĉ(m) x1) = -6 m, integrated over [0, 2]
        assert_eq!(I_hat(&inst, &p).unwrap(), rat(-12));
        assert_eq!(F_hat(&inst, &p).unwrap(), rat(-24));

        let spec = RingSpec {
            generators: vec![("x1".into(), 1), ("omega".into(), 1), ("inf".into(), 1)],
            infinity: "inf".into(),
            top_degree: 2,
            table: compositions(3, 2).into_iter().filter(|m| m[2] < 2).map(|m| (m, rat(1))).collect(),
            zeros: vec![],
            lattice_map: vec![point(&[0, 0, 0])],
        };
        let spec_ring = build_ring(&spec).unwrap();
        let inst = BkkInstance::new(spec_ring.clone(), spec_ring.parse_element("omega").unwrap(), 1).unwrap();
        let tent = build_roof(&interval(0, 2), &[(point(&[0]), rat(0)), (point(&[1]), rat(1)), (point(&[2]), rat(0))])
            .unwrap();
        let p = AdelicPolytope::single("v", tent).unwrap();
        assert_eq!(I_hat(&inst, &p).unwrap(), rat(1));
        let flat = AdelicPolytope::canonical(interval(0, 2));
        assert_eq!(I_hat(&inst, &flat).unwrap(), rat(0));
    }

    #[test]
    fn mixed_volumes() {
        let r = abelian_canonical_ring(1, &rat(1), &[point(&[0, 0]), point(&[0, 0])]).unwrap();
        let inst = BkkInstance::new(r.clone(), r.parse_element("inf*omega").unwrap(), 0).unwrap();
        let sq = AdelicPolytope::canonical(RationalPolytope::cube(2));
        let seg = AdelicPolytope::canonical(RationalPolytope::from_vertices(vec![point(&[0, 0]), point(&[1, 0])]).unwrap());
        assert_eq!(polarize_I(&inst, &[sq.clone(), sq.clone()]).unwrap(), rat(1));
        assert_eq!(polarize_I(&inst, &[sq.clone(), seg.clone()]).unwrap(), ratio(1, 2));
        assert_eq!(polarize_I(&inst, &[seg.clone(), sq.clone()]).unwrap(), ratio(1, 2));
        assert_eq!(polarize_I(&inst, std::slice::from_ref(&sq)).unwrap_err().name(), "WrongArity");
    }

    #[test]
    fn virtual_combinations() {
        let ring = free_ring(1, 2, 3);
        let inst = BkkInstance::new(ring.clone(), ring.parse_element("x1").unwrap(), 1).unwrap();
        let tent = build_roof(&interval(0, 2), &[(point(&[0]), rat(0)), (point(&[1]), rat(1)), (point(&[2]), rat(0))])
            .unwrap();
        let p = AdelicPolytope::single("v", tent).unwrap();
        let zero = VirtualAdelicPolytope::new(vec![(rat(1), p.clone()), (rat(-1), p.clone())]);
        assert_eq!(virtual_I(&inst, &zero).unwrap(), rat(0));
        let twice = VirtualAdelicPolytope::new(vec![(rat(2), p.clone())]);
        assert_eq!(virtual_I(&inst, &twice).unwrap(), rat(4) * I_hat(&inst, &p).unwrap());
        let dil = p.dilated(&rat(3)).unwrap();
        assert_eq!(I_hat(&inst, &dil).unwrap(), rat(9) * I_hat(&inst, &p).unwrap());
    }

    fn p1() -> Fan {
        Fan::from_cones(1, vec![point(&[1]), point(&[-1])], vec![vec![0], vec![1]]).unwrap()
    }

    #[test]
    fn derivative_on_a_cone() {
        // Lift rays (±1,0), (±1,1); the tent roof is strictly compatible.
        let rays = vec![point(&[1, 0]), point(&[-1, 0]), point(&[1, 1]), point(&[-1, 1])];
        let lift = Fan::from_cones(2, rays, vec![vec![0, 2], vec![2, 3], vec![3, 1]]).unwrap();
        let fan = AdelicFan::new(p1(), BTreeMap::from([("v".into(), lift.clone())])).unwrap();
        let roof = build_roof(&interval(-1, 1), &[(point(&[-1]), rat(1)), (point(&[0]), rat(2)), (point(&[1]), rat(1))])
            .unwrap();
        let p = AdelicPolytope::single("v", roof).unwrap();
        assert!(fan.is_v_interior(&p, "v").unwrap());
        let ring = free_ring(1, 2, 2);
        let gamma = ring.parse_element("x1").unwrap();
        let inst = BkkInstance::new(ring.clone(), gamma.clone(), 1).unwrap();
        let up = |v: &[i64]| RayId::Lifted { place: "v".into(), ray: lift.ray_index(&point(v)).unwrap() };
        // Cone spanned by (1,1), (-1,1) has dual vertex (0, 2); |det| = 2.
        let d = directional_derivative(&inst, &p, &fan, &[up(&[1, 1]), up(&[-1, 1])]).unwrap();
        let value = ring.deg(&ring.mul(&ring.infinity(), &gamma)).unwrap();
        assert_eq!(d, value.clone() / rat(2));
        // Cone spanned by (-1,0), (-1,1): dual vertex (-1, 1), unimodular.
        let left = RayId::Recession(p1().ray_index(&point(&[-1])).unwrap());
        let d = directional_derivative(&inst, &p, &fan, &[left, up(&[-1, 1])]).unwrap();
        assert_eq!(d, value);
        // (1,1) and (-1,0) span no cone.
        let rec = RayId::Recession(p1().ray_index(&point(&[-1])).unwrap());
        assert_eq!(directional_derivative(&inst, &p, &fan, &[up(&[1, 1]), rec.clone()]).unwrap(), rat(0));
        assert_eq!(directional_derivative(&inst, &p, &fan, &[up(&[1, 1]), up(&[1, 1]), rec]).unwrap(), rat(0));
        let bogus = RayId::Lifted { place: "v".into(), ray: 99 };
        assert_eq!(directional_derivative(&inst, &p, &fan, &[bogus]).unwrap_err().name(), "UnknownRay");
        let can = crate::roofs::canonical_adelic_fan(&p1()).unwrap();
        let e = directional_derivative(&inst, &p, &can, &[RayId::Recession(0)]).unwrap_err();
        assert_eq!(e.name(), "IncompatibleFan");
    }
}
