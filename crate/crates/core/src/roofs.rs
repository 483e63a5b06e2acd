//! Concave piecewise-affine roof functions, adelic polytopes, their
//! hypographs, the concave conjugate, and adelic fans.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::dd::extreme_rays;
use crate::error::{check_dim, Error, Result};
use crate::fan::Fan;
use crate::linalg::AffineHull;
use crate::polytope::{Halfspace, RationalPolytope};
use crate::rational::{add, dot, fmt_point, fmt_rational, scale, sub, to_rationals, Point, Rational};

pub type PlaceId = String;

/// `x ↦ gradient · x + constant`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct AffinePiece {
    pub gradient: Point,
    pub constant: Rational,
}

impl AffinePiece {
    pub fn eval(&self, x: &[Rational]) -> Rational {
        dot(&self.gradient, x) + &self.constant
    }
}

/// A nonnegative concave piecewise-affine function on a polytope, stored as
/// its linearity cells with one affine piece per cell.
#[derive(Debug, Clone)]
pub struct Roof {
    domain: RationalPolytope,
    cells: Vec<RationalPolytope>,
    pieces: Vec<AffinePiece>,
    breakpoints: Vec<(Point, Rational)>,
}

impl PartialEq for Roof {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain && self.breakpoints == other.breakpoints
    }
}

impl Eq for Roof {}

impl fmt::Display for Roof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pts: Vec<String> = self
            .breakpoints
            .iter()
            .map(|(p, h)| format!("{} -> {}", fmt_point(p), fmt_rational(h)))
            .collect();
        write!(f, "roof on {} [{}]", self.domain, pts.join(", "))
    }
}

/// Upper concave envelope of `(point, height)` pairs over `domain`.
pub fn build_roof(domain: &RationalPolytope, lifted_points: &[(Point, Rational)]) -> Result<Roof> {
    let t = domain.ambient_dim();
    let mut best: BTreeMap<Point, Rational> = BTreeMap::new();
    for (p, h) in lifted_points {
        check_dim(t, p.len())?;
        if h.is_negative() {
            return Err(Error::NegativeHeight(format!("height {} at {}", h, fmt_point(p))));
        }
        if !domain.contains(p) {
            return Err(Error::PointOutsideDomain(fmt_point(p)));
        }
        let e = best.entry(p.clone()).or_insert_with(|| h.clone());
        if h > e {
            *e = h.clone();
        }
    }
    for v in domain.vertices() {
        if !best.contains_key(v) {
            return Err(Error::MissingVertexHeight(fmt_point(v)));
        }
    }
    if best.values().all(Zero::is_zero) {
        return Ok(Roof::zero(domain));
    }
    let hull = domain.affine_hull();
    let k = hull.dim();
    let chart: Vec<Point> = best
        .iter()
        .flat_map(|(p, h)| {
            let y = hull.project(p);
            let mut top = y.clone();
            top.push(h.clone());
            let mut bottom = y;
            bottom.push(Rational::zero());
            [top, bottom]
        })
        .collect();
    let body = RationalPolytope::from_vertices(chart)?;
    debug_assert_eq!(body.affine_dim(), k + 1);
    let mut cells = Vec::new();
    let mut breakpoints: BTreeSet<usize> = BTreeSet::new();
    for (facet, inc) in body.facets().iter().zip(body.incidence()) {
        let c = &facet.normal[k];
        if !c.is_positive() {
            continue;
        }
        // a·y + c·h <= b, so h = (b - a·y)/c on the facet.
        let grad: Point = facet.normal[..k].iter().map(|a| -a / c).collect();
        let piece = AffinePiece { gradient: hull.lift_functional(&grad), constant: &facet.offset / c };
        let pts: Vec<Point> = inc.iter().map(|&i| hull.lift(&body.vertices()[i][..k])).collect();
        breakpoints.extend(inc.iter().copied());
        cells.push((RationalPolytope::from_vertices(pts)?, piece));
    }
    cells.sort_by(|a, b| a.0.vertices().cmp(b.0.vertices()));
    let mut bps: Vec<(Point, Rational)> = breakpoints
        .into_iter()
        .map(|i| {
            let v = &body.vertices()[i];
            (hull.lift(&v[..k]), v[k].clone())
        })
        .collect();
    bps.sort();
    let (cells, pieces) = cells.into_iter().unzip();
    Ok(Roof { domain: domain.clone(), cells, pieces, breakpoints: bps })
}

impl Roof {
    pub fn zero(domain: &RationalPolytope) -> Self {
        Self::constant_on(domain, Rational::zero())
    }

    fn constant_on(domain: &RationalPolytope, c: Rational) -> Self {
        let t = domain.ambient_dim();
        Roof {
            domain: domain.clone(),
            cells: vec![domain.clone()],
            pieces: vec![AffinePiece { gradient: vec![Rational::zero(); t], constant: c.clone() }],
            breakpoints: domain.vertices().iter().map(|v| (v.clone(), c.clone())).collect(),
        }
    }

    pub fn constant(domain: &RationalPolytope, c: Rational) -> Result<Self> {
        if c.is_negative() {
            return Err(Error::NegativeHeight(fmt_rational(&c)));
        }
        Ok(Self::constant_on(domain, c))
    }

    pub fn domain(&self) -> &RationalPolytope {
        &self.domain
    }

    pub fn cells(&self) -> &[RationalPolytope] {
        &self.cells
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    /// Vertices of the graph, i.e. the non-dominated lifted points.
    pub fn breakpoints(&self) -> &[(Point, Rational)] {
        &self.breakpoints
    }

    pub fn is_zero(&self) -> bool {
        self.breakpoints.iter().all(|(_, h)| h.is_zero())
    }

    pub fn eval(&self, x: &[Rational]) -> Result<Rational> {
        check_dim(self.domain.ambient_dim(), x.len())?;
        if !self.domain.contains(x) {
            return Err(Error::PointOutsideDomain(fmt_point(x)));
        }
        Ok(self.pieces.iter().map(|p| p.eval(x)).min().expect("at least one piece"))
    }

    pub fn max_value(&self) -> Rational {
        self.breakpoints.iter().map(|(_, h)| h.clone()).max().expect("nonempty")
    }

    /// Minimum over the domain (attained at a vertex by concavity).
    pub fn min_value(&self) -> Rational {
        self.domain
            .vertices()
            .iter()
            .map(|v| self.eval(v).expect("vertex in domain"))
            .min()
            .expect("nonempty")
    }

    /// `x ↦ λ·r(x/λ)` on `λ·Δ`.
    pub fn dilated(&self, lambda: &Rational) -> Result<Self> {
        if lambda.is_negative() {
            return Err(Error::InvalidInput("negative dilation factor".into()));
        }
        let pts: Vec<(Point, Rational)> =
            self.breakpoints.iter().map(|(p, h)| (scale(p, lambda), h * lambda)).collect();
        build_roof(&self.domain.scaled(lambda), &pts)
    }

    /// `c · r` on the same domain.
    pub fn times(&self, c: &Rational) -> Result<Self> {
        let pts: Vec<(Point, Rational)> = self.breakpoints.iter().map(|(p, h)| (p.clone(), h * c)).collect();
        build_roof(&self.domain, &pts)
    }

    /// Sup-convolution: the roof on `Δ + Δ'` whose hypograph is the
    /// Minkowski sum of the two hypographs.
    pub fn sup_convolution(&self, other: &Self) -> Result<Self> {
        let domain = self.domain.minkowski_sum(&other.domain)?;
        let pts: Vec<(Point, Rational)> = self
            .breakpoints
            .iter()
            .flat_map(|(p, h)| other.breakpoints.iter().map(move |(q, g)| (add(p, q), h + g)))
            .collect();
        build_roof(&domain, &pts)
    }

    /// `{(x, s) : x ∈ Δ, 0 ≤ s ≤ r(x)}`.
    pub fn hypograph(&self) -> RationalPolytope {
        let mut pts: Vec<Point> = self
            .domain
            .vertices()
            .iter()
            .map(|v| {
                let mut p = v.clone();
                p.push(Rational::zero());
                p
            })
            .collect();
        for (p, h) in &self.breakpoints {
            let mut q = p.clone();
            q.push(h.clone());
            pts.push(q);
        }
        RationalPolytope::from_vertices(pts).expect("nonempty")
    }
}

/// Pointwise weighted sum `Σ c_i r_i` of roofs on a common domain.
pub fn weighted_sum(domain: &RationalPolytope, terms: &[(&Roof, Rational)]) -> Result<Roof> {
    for (r, c) in terms {
        if r.domain != *domain {
            return Err(Error::DomainMismatch(format!("roof on {} vs {}", r.domain, domain)));
        }
        if c.is_negative() {
            return Err(Error::InvalidInput("negative roof coefficient".into()));
        }
    }
    let active: Vec<&(&Roof, Rational)> = terms.iter().filter(|(r, c)| !c.is_zero() && !r.is_zero()).collect();
    match active.len() {
        0 => return Ok(Roof::zero(domain)),
        1 => return active[0].0.times(&active[0].1),
        _ => {}
    }
    let full = domain.affine_dim();
    let mut cells = vec![domain.clone()];
    for (r, _) in &active {
        if r.cells.len() == 1 {
            continue;
        }
        let mut next = Vec::new();
        for c in &cells {
            for d in &r.cells {
                match c.intersect(&d.halfspaces()) {
                    Ok(x) if x.affine_dim() == full => next.push(x),
                    Ok(_) | Err(Error::EmptyRegion) => {}
                    Err(e) => return Err(e),
                }
            }
        }
        cells = next;
    }
    let mut pts: BTreeSet<Point> = BTreeSet::new();
    for c in &cells {
        pts.extend(c.vertices().iter().cloned());
    }
    let mut lifted = Vec::with_capacity(pts.len());
    for p in pts {
        let mut h = Rational::zero();
        for (r, c) in &active {
            h += r.eval(&p)? * c;
        }
        lifted.push((p, h));
    }
    build_roof(domain, &lifted)
}

/// A base polytope with finitely many nonzero local roofs and place weights.
#[derive(Debug, Clone)]
pub struct AdelicPolytope {
    base: RationalPolytope,
    roofs: BTreeMap<PlaceId, Roof>,
    weights: BTreeMap<PlaceId, Rational>,
}

impl PartialEq for AdelicPolytope {
    fn eq(&self, other: &Self) -> bool {
        if self.base != other.base {
            return false;
        }
        let places: BTreeSet<&PlaceId> = self.roofs.keys().chain(other.roofs.keys()).collect();
        places.into_iter().all(|w| self.roof(w) == other.roof(w) && self.weight(w) == other.weight(w))
    }
}

impl AdelicPolytope {
    pub fn new(
        base: RationalPolytope,
        roofs: BTreeMap<PlaceId, Roof>,
        weights: BTreeMap<PlaceId, Rational>,
    ) -> Result<Self> {
        for (w, r) in &roofs {
            if r.domain != base {
                return Err(Error::DomainMismatch(format!("roof at place {w} lives on {}", r.domain)));
            }
        }
        for (w, n) in &weights {
            if !n.is_positive() {
                return Err(Error::InvalidInput(format!("weight at place {w} must be positive")));
            }
        }
        Ok(AdelicPolytope { base, roofs, weights })
    }

    /// All places carry the zero roof.
    pub fn canonical(base: RationalPolytope) -> Self {
        AdelicPolytope { base, roofs: BTreeMap::new(), weights: BTreeMap::new() }
    }

    /// One place with the given roof and weight 1.
    pub fn single(place: &str, roof: Roof) -> Result<Self> {
        let base = roof.domain.clone();
        Self::new(base, BTreeMap::from([(place.to_string(), roof)]), BTreeMap::new())
    }

    pub fn base(&self) -> &RationalPolytope {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.base.ambient_dim()
    }

    pub fn roofs(&self) -> &BTreeMap<PlaceId, Roof> {
        &self.roofs
    }

    pub fn weights(&self) -> &BTreeMap<PlaceId, Rational> {
        &self.weights
    }

    pub fn places(&self) -> Vec<PlaceId> {
        self.roofs.keys().cloned().collect()
    }

    pub fn roof(&self, place: &str) -> Roof {
        self.roofs.get(place).cloned().unwrap_or_else(|| Roof::zero(&self.base))
    }

    pub fn weight(&self, place: &str) -> Rational {
        self.weights.get(place).cloned().unwrap_or_else(Rational::one)
    }

    /// `θ = Σ_v n_v θ_v`.
    pub fn global_roof(&self) -> Roof {
        let terms: Vec<(&Roof, Rational)> = self.roofs.iter().map(|(w, r)| (r, self.weight(w))).collect();
        weighted_sum(&self.base, &terms).expect("roofs share the base domain")
    }

    pub fn hypograph(&self, place: &str) -> RationalPolytope {
        self.roof(place).hypograph()
    }

    pub fn global_hypograph(&self) -> RationalPolytope {
        self.global_roof().hypograph()
    }

    /// Place-wise sum: Minkowski sum of bases and sup-convolution of roofs.
    pub fn minkowski_sum(&self, other: &Self) -> Result<Self> {
        let base = self.base.minkowski_sum(&other.base)?;
        let mut weights = self.weights.clone();
        for (w, n) in &other.weights {
            match weights.get(w) {
                Some(m) if m != n => {
                    return Err(Error::WeightMismatch(format!("place {w}: {m} vs {n}")));
                }
                _ => {
                    weights.insert(w.clone(), n.clone());
                }
            }
        }
        let places: BTreeSet<&PlaceId> = self.roofs.keys().chain(other.roofs.keys()).collect();
        let mut roofs = BTreeMap::new();
        for w in places {
            roofs.insert(w.clone(), self.roof(w).sup_convolution(&other.roof(w))?);
        }
        Self::new(base, roofs, weights)
    }

    /// `λ·P`: dilates the base and every roof.
    pub fn dilated(&self, lambda: &Rational) -> Result<Self> {
        let base = self.base.scaled(lambda);
        let mut roofs = BTreeMap::new();
        for (w, r) in &self.roofs {
            roofs.insert(w.clone(), r.dilated(lambda)?);
        }
        Self::new(base, roofs, self.weights.clone())
    }

    /// Same base and roofs with every weight multiplied by `c > 0`.
    pub fn reweighted(&self, c: &Rational) -> Result<Self> {
        let weights = self.roofs.keys().map(|w| (w.clone(), self.weight(w) * c)).collect();
        Self::new(self.base.clone(), self.roofs.clone(), weights)
    }
}

/// The concave conjugate `n ↦ min_k (⟨m_k, n⟩ − θ(m_k))`, one piece per
/// breakpoint `m_k` of the roof.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugateFunction {
    pub dim: usize,
    pub pieces: Vec<AffinePiece>,
    /// Region where piece `k` attains the minimum, as `normal · n <= offset`.
    pub cells: Vec<Vec<Halfspace>>,
}

impl ConjugateFunction {
    pub fn eval(&self, n: &[Rational]) -> Result<Rational> {
        check_dim(self.dim, n.len())?;
        Ok(self.pieces.iter().map(|p| p.eval(n)).min().expect("nonempty"))
    }
}

pub fn legendre_dual(r: &Roof) -> ConjugateFunction {
    let pieces: Vec<AffinePiece> = r
        .breakpoints
        .iter()
        .map(|(m, h)| AffinePiece { gradient: m.clone(), constant: -h.clone() })
        .collect();
    let cells = pieces
        .iter()
        .map(|pk| {
            pieces
                .iter()
                .filter(|pj| *pj != pk)
                .map(|pj| Halfspace::new(sub(&pk.gradient, &pj.gradient), &pj.constant - &pk.constant))
                .collect()
        })
        .collect();
    ConjugateFunction { dim: r.domain.ambient_dim(), pieces, cells }
}

/// Recovers the roof from its conjugate.
pub fn reconstruct(conj: &ConjugateFunction) -> Result<Roof> {
    let pts: Vec<Point> = conj.pieces.iter().map(|p| p.gradient.clone()).collect();
    let domain = RationalPolytope::from_vertices(pts)?;
    let lifted: Vec<(Point, Rational)> =
        conj.pieces.iter().map(|p| (p.gradient.clone(), -p.constant.clone())).collect();
    build_roof(&domain, &lifted)
}

/// A fan on `N_R` with, per place, a lifted fan on `N_R ⊕ R_{≥0}` restricting
/// to it on the hyperplane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdelicFan {
    recession: Fan,
    lifts: BTreeMap<PlaceId, Fan>,
}

/// Identifies a ray of an adelic fan.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RayId {
    /// Index into the recession fan's rays.
    Recession(usize),
    /// Index into the rays of the lift at `place`; the ray must point into
    /// the open upper half-space.
    Lifted { place: PlaceId, ray: usize },
}

impl fmt::Display for RayId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RayId::Recession(i) => write!(f, "recession:{i}"),
            RayId::Lifted { place, ray } => write!(f, "{place}:{ray}"),
        }
    }
}

/// The lift with cones `σ⊕0` and `σ⊕R_{≥0}` for every `σ ∈ Σ`.
pub fn canonical_lift(sigma: &Fan) -> Fan {
    let t = sigma.ambient_dim();
    let mut rays: Vec<Point> = sigma
        .rays()
        .iter()
        .map(|r| {
            let mut p = to_rationals(r);
            p.push(Rational::zero());
            p
        })
        .collect();
    let mut up = vec![Rational::zero(); t + 1];
    up[t] = Rational::one();
    let u = rays.len();
    rays.push(up);
    let maximal = sigma
        .maximal_cones()
        .into_iter()
        .map(|mut c| {
            c.push(u);
            c
        })
        .collect();
    Fan::from_cones(t + 1, rays, maximal).expect("canonical lift is a fan")
}

pub fn canonical_adelic_fan(sigma: &Fan) -> Result<AdelicFan> {
    if !sigma.is_complete() {
        return Err(Error::NotComplete);
    }
    Ok(AdelicFan { recession: sigma.clone(), lifts: BTreeMap::new() })
}

fn is_upper(r: &[num_bigint::BigInt]) -> bool {
    r.last().is_some_and(Signed::is_positive)
}

impl AdelicFan {
    pub fn new(recession: Fan, lifts: BTreeMap<PlaceId, Fan>) -> Result<Self> {
        if !recession.is_complete() {
            return Err(Error::NotComplete);
        }
        let t = recession.ambient_dim();
        for (w, lift) in &lifts {
            check_dim(t + 1, lift.ambient_dim())?;
            if lift.rays().iter().any(|r| r[t].is_negative()) {
                return Err(Error::InvalidInput(format!("lift at place {w} leaves the upper half-space")));
            }
            let mut flat: BTreeSet<Vec<usize>> = BTreeSet::new();
            for cone in lift.cones() {
                if cone.iter().any(|&i| is_upper(&lift.rays()[i])) {
                    continue;
                }
                let mut ids = Vec::new();
                for &i in cone {
                    let r = lift.ray(i);
                    match recession.ray_index(&r[..t]) {
                        Some(j) => ids.push(j),
                        None => {
                            return Err(Error::InvalidInput(format!(
                                "lift at place {w} has hyperplane ray {} outside the recession fan",
                                fmt_point(&r)
                            )))
                        }
                    }
                }
                ids.sort_unstable();
                flat.insert(ids);
            }
            let expected: BTreeSet<Vec<usize>> = recession.cones().iter().cloned().collect();
            if flat != expected {
                return Err(Error::InvalidInput(format!(
                    "lift at place {w} does not restrict to the recession fan"
                )));
            }
        }
        Ok(AdelicFan { recession, lifts })
    }

    pub fn recession(&self) -> &Fan {
        &self.recession
    }

    pub fn dim(&self) -> usize {
        self.recession.ambient_dim()
    }

    pub fn lifts(&self) -> &BTreeMap<PlaceId, Fan> {
        &self.lifts
    }

    pub fn lift(&self, place: &str) -> Fan {
        self.lifts.get(place).cloned().unwrap_or_else(|| canonical_lift(&self.recession))
    }

    /// Ray ids for the recession fan and the upper rays at `places`.
    pub fn ray_ids(&self, places: &[PlaceId]) -> Vec<RayId> {
        let mut ids: Vec<RayId> = (0..self.recession.rays().len()).map(RayId::Recession).collect();
        for w in places {
            let lift = self.lift(w);
            for (j, r) in lift.rays().iter().enumerate() {
                if is_upper(r) {
                    ids.push(RayId::Lifted { place: w.clone(), ray: j });
                }
            }
        }
        ids
    }

    pub fn ray_vector(&self, id: &RayId) -> Result<Point> {
        match id {
            RayId::Recession(i) => {
                self.recession.rays().get(*i).map(|r| to_rationals(r)).ok_or_else(|| Error::UnknownRay(id.to_string()))
            }
            RayId::Lifted { place, ray } => {
                let lift = self.lift(place);
                match lift.rays().get(*ray) {
                    Some(r) if is_upper(r) => Ok(to_rationals(r)),
                    _ => Err(Error::UnknownRay(id.to_string())),
                }
            }
        }
    }

    /// Support values of `P` (base support function on recession rays,
    /// hypograph support function on upper rays).
    pub fn support_vector(&self, p: &AdelicPolytope, places: &[PlaceId]) -> Result<BTreeMap<RayId, Rational>> {
        check_dim(self.dim(), p.dim())?;
        let mut out = BTreeMap::new();
        for id in self.ray_ids(places) {
            let v = self.ray_vector(&id)?;
            let value = match &id {
                RayId::Recession(_) => p.base.support_value(&v)?,
                RayId::Lifted { place, .. } => p.hypograph(place).support_value(&v)?,
            };
            out.insert(id, value);
        }
        Ok(out)
    }

    /// The adelic polytope cut out by support values `a`; fails with
    /// `IncompatibleFan` unless it has exactly these support values and is
    /// compatible with the fan.
    pub fn polytope_from_support(
        &self,
        a: &BTreeMap<RayId, Rational>,
        weights: &BTreeMap<PlaceId, Rational>,
    ) -> Result<AdelicPolytope> {
        let t = self.dim();
        let rec: Vec<Halfspace> = (0..self.recession.rays().len())
            .map(|i| {
                let id = RayId::Recession(i);
                let v = a.get(&id).ok_or_else(|| Error::UnknownRay(format!("missing value for {id}")))?;
                Ok(Halfspace::new(to_rationals(&self.recession.rays()[i]), v.clone()))
            })
            .collect::<Result<_>>()?;
        let base = RationalPolytope::from_halfspaces(t, &rec)
            .map_err(|e| Error::IncompatibleFan(format!("base polytope: {}", e.name())))?;
        let mut places: Vec<PlaceId> = Vec::new();
        for id in a.keys() {
            match id {
                RayId::Lifted { place, .. } if !places.contains(place) => places.push(place.clone()),
                RayId::Lifted { .. } => {}
                RayId::Recession(i) if *i >= self.recession.rays().len() => {
                    return Err(Error::UnknownRay(id.to_string()))
                }
                RayId::Recession(_) => {}
            }
        }
        let mut roofs = BTreeMap::new();
        for w in &places {
            let lift = self.lift(w);
            let mut hs = Vec::new();
            for (j, r) in lift.rays().iter().enumerate() {
                let v = to_rationals(r);
                let value = if is_upper(r) {
                    let id = RayId::Lifted { place: w.clone(), ray: j };
                    a.get(&id).cloned().ok_or_else(|| Error::UnknownRay(format!("missing value for {id}")))?
                } else {
                    let i = self.recession.ray_index(&v[..t]).expect("lift restricts to recession fan");
                    a[&RayId::Recession(i)].clone()
                };
                hs.push(Halfspace::new(v, value));
            }
            let mut down = vec![Rational::zero(); t + 1];
            down[t] = -Rational::one();
            hs.push(Halfspace::new(down, Rational::zero()));
            let body = RationalPolytope::from_halfspaces(t + 1, &hs)
                .map_err(|e| Error::IncompatibleFan(format!("place {w}: {}", e.name())))?;
            let lifted: Vec<(Point, Rational)> =
                body.vertices().iter().map(|v| (v[..t].to_vec(), v[t].clone())).collect();
            let roof = build_roof(&base, &lifted)
                .map_err(|e| Error::IncompatibleFan(format!("place {w}: {}", e.name())))?;
            roofs.insert(w.clone(), roof);
        }
        let weights = weights.iter().filter(|(w, _)| roofs.contains_key(*w)).map(|(w, n)| (w.clone(), n.clone())).collect();
        let p = AdelicPolytope::new(base, roofs, weights)?;
        let keys: Vec<RayId> = a.keys().cloned().collect();
        let got = self.support_vector(&p, &places)?;
        for id in keys {
            if got.get(&id) != a.get(&id) {
                return Err(Error::IncompatibleFan(format!("support value at {id} is not attained")));
            }
        }
        if !self.is_compatible(&p, &places) {
            return Err(Error::IncompatibleFan("polytope is not compatible with the fan".into()));
        }
        Ok(p)
    }

    /// Every maximal cone of every relevant lift has a common maximizing
    /// vertex on the corresponding hypograph.
    pub fn is_compatible(&self, p: &AdelicPolytope, extra_places: &[PlaceId]) -> bool {
        if p.dim() != self.dim() {
            return false;
        }
        let mut places: BTreeSet<PlaceId> = self.lifts.keys().cloned().collect();
        places.extend(p.roofs.keys().cloned());
        places.extend(extra_places.iter().cloned());
        if places.is_empty() {
            places.insert(String::new());
        }
        places.iter().all(|w| cones_have_common_maximizers(&p.hypograph(w), &self.lift(w)))
    }

    /// Strict compatibility at `place`: every maximal cone of the lift is the
    /// normal cone (cut to the upper half-space) of a distinct vertex.
    pub fn is_v_interior(&self, p: &AdelicPolytope, place: &str) -> Result<bool> {
        check_dim(self.dim(), p.dim())?;
        if !self.is_compatible(p, &[place.to_string()]) {
            return Err(Error::IncompatibleFan(format!("adelic polytope is not compatible at {place}")));
        }
        let t = self.dim();
        let body = p.hypograph(place);
        if !body.is_full_dimensional() {
            return Ok(false);
        }
        let lift = self.lift(place);
        let normal_cones: Vec<BTreeSet<Point>> =
            (0..body.vertices().len()).map(|i| restricted_normal_cone(&body, i, t)).collect();
        let mut used: BTreeSet<usize> = BTreeSet::new();
        for cone in lift.maximal_cones() {
            let rays: BTreeSet<Point> = cone.iter().map(|&i| lift.ray(i)).collect();
            match normal_cones.iter().position(|nc| *nc == rays) {
                Some(i) if used.insert(i) => {}
                _ => return Ok(false),
            }
        }
        Ok(true)
    }
}

fn cones_have_common_maximizers(body: &RationalPolytope, lift: &Fan) -> bool {
    lift.maximal_cones().iter().all(|cone| {
        let mut common: Option<BTreeSet<usize>> = None;
        for &i in cone {
            let m: BTreeSet<usize> = body.maximizers(&lift.ray(i)).into_iter().collect();
            common = Some(match common {
                None => m,
                Some(c) => c.intersection(&m).copied().collect(),
            });
        }
        common.is_none_or(|c| !c.is_empty())
    })
}

/// Primitive extreme rays of `N_v ∩ {s ≥ 0}` for vertex `v` of a
/// full-dimensional polytope in `Q^{t+1}`.
fn restricted_normal_cone(body: &RationalPolytope, v: usize, t: usize) -> BTreeSet<Point> {
    let w = &body.vertices()[v];
    let mut rows: Vec<Point> = body
        .vertices()
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != v)
        .map(|(_, u)| sub(w, u))
        .collect();
    let mut up = vec![Rational::zero(); t + 1];
    up[t] = Rational::one();
    rows.push(up);
    extreme_rays(&rows, t + 1).into_iter().collect()
}

/// The fan of restricted normal cones `N_w ∩ {s ≥ 0}` over the vertices `w`
/// of a full-dimensional polytope in `Q^{t+1}` whose cone is full-dimensional.
pub fn restricted_normal_fan(body: &RationalPolytope) -> Result<Fan> {
    if !body.is_full_dimensional() {
        return Err(Error::NotFullDimensional);
    }
    let n = body.ambient_dim();
    let t = n - 1;
    let mut rays: Vec<Point> = Vec::new();
    let mut cones = Vec::new();
    for v in 0..body.vertices().len() {
        let cone: Vec<Point> = restricted_normal_cone(body, v, t).into_iter().collect();
        if crate::linalg::rank(&cone, n) < n {
            continue;
        }
        let idx = cone
            .into_iter()
            .map(|r| match rays.iter().position(|x| *x == r) {
                Some(i) => i,
                None => {
                    rays.push(r);
                    rays.len() - 1
                }
            })
            .collect();
        cones.push(idx);
    }
    Fan::from_cones(n, rays, cones)
}

/// Each piece agrees with the roof on its cell, the cells cover the domain,
/// and heights are nonnegative.
pub fn roof_is_consistent(r: &Roof) -> bool {
    let concave = r.cells.iter().zip(&r.pieces).all(|(c, p)| {
        c.vertices().iter().all(|v| r.eval(v).map(|x| x == p.eval(v)).unwrap_or(false))
    });
    let covered: Rational = r.cells.iter().map(|c| c.affine_hull_volume()).sum();
    concave && covered == r.domain.affine_hull_volume() && r.breakpoints.iter().all(|(_, h)| !h.is_negative())
}

impl RationalPolytope {
    /// Volume measured in the chart of the affine hull.
    pub fn affine_hull_volume(&self) -> Rational {
        let hull: AffineHull = self.affine_hull();
        let pts: Vec<Point> = self.vertices().iter().map(|v| hull.project(v)).collect();
        RationalPolytope::from_vertices(pts).expect("nonempty").volume()
    }
}
