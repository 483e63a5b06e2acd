//! Heights and minima of toric compactifications of semiabelian varieties.

use num_traits::{One, Zero};

use crate::base_model::abelian_canonical_ring;
use crate::bkk::{BkkInstance, I_hat};
use crate::error::{Error, Result};
use crate::linalg::is_psd;
use crate::minima::{successive_minima_with_roofs, Convention};
use crate::okounkov::{product_body, volumes, BaseTransform};
use crate::poly::Polynomial;
use crate::polyint::integrate_polynomial;
use crate::polytope::RationalPolytope;
use crate::qp::QuadraticForm;
use crate::rational::{binomial, factorial, fmt_rational, Point, Rational};
use crate::roofs::AdelicPolytope;

#[derive(Debug, Clone)]
pub struct SemiabelianInput {
    pub g: usize,
    /// Base polytope with roofs (canonical roofs when all are zero).
    pub polytope: AdelicPolytope,
    /// `G_ij = B(c(e_i), c(e_j))`.
    pub gram: Vec<Point>,
    pub deg_m: Rational,
}

impl SemiabelianInput {
    pub fn new(g: usize, polytope: AdelicPolytope, gram: Vec<Point>, deg_m: Rational) -> Result<Self> {
        let t = polytope.dim();
        if g == 0 {
            return Err(Error::BadDimensions("abelian dimension must be positive".into()));
        }
        if gram.len() != t || gram.iter().any(|r| r.len() != t) {
            return Err(Error::BadDimensions(format!("gram matrix must be {t}x{t}")));
        }
        if !is_psd(&gram) {
            return Err(Error::NotPSD);
        }
        if deg_m <= Rational::zero() {
            return Err(Error::InvalidInput("degM must be positive".into()));
        }
        Ok(SemiabelianInput { g, polytope, gram, deg_m })
    }

    /// Canonical roofs on `delta`.
    pub fn canonical(g: usize, delta: RationalPolytope, gram: Vec<Point>, deg_m: Rational) -> Result<Self> {
        Self::new(g, AdelicPolytope::canonical(delta), gram, deg_m)
    }

    pub fn t(&self) -> usize {
        self.polytope.dim()
    }

    pub fn d(&self) -> usize {
        self.t() + self.g
    }

    /// `m ↦ ĥ(c(m)) = mᵀ G m`.
    pub fn height_form(&self) -> QuadraticForm {
        QuadraticForm::from_gram(self.gram.clone()).expect("validated PSD")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeightReport {
    pub okounkov_route: Rational,
    pub bkk_route: Rational,
    pub printed_formula: Rational,
    pub consistent: bool,
    pub normalization_note: String,
}

fn fact(n: usize) -> Rational {
    Rational::from_integer(factorial(n))
}

/// The simplex `conv(0, degM·e_1, e_2, …, e_g)` of volume `degM/g!`.
pub fn abelian_fiber(g: usize, deg_m: &Rational) -> RationalPolytope {
    let mut pts = vec![vec![Rational::zero(); g]];
    for i in 0..g {
        let mut e = vec![Rational::zero(); g];
        e[i] = if i == 0 { deg_m.clone() } else { Rational::one() };
        pts.push(e);
    }
    RationalPolytope::from_vertices(pts).expect("nonempty")
}

/// `(d+1)! · ∫ G` over `Δ × fiber` with `G = θ − ĥ∘c`.
pub fn okounkov_route(inp: &SemiabelianInput) -> Result<Rational> {
    let fiber = abelian_fiber(inp.g, &inp.deg_m);
    let body = product_body(&inp.polytope, &fiber, BaseTransform::NegQuadratic(inp.height_form()))?;
    Ok(volumes(&body)?.chi)
}

/// `Σ_i C(d+1, t+i) · (t+i)!/i! · Î_{ω^{g+1−i}}`.
pub fn bkk_route(inp: &SemiabelianInput) -> Result<Rational> {
    let (t, g, d) = (inp.t(), inp.g, inp.d());
    let ring = abelian_canonical_ring(g as u32, &inp.deg_m, &inp.gram)?;
    let omega = ring.generator_by_name("omega")?;
    let mut total = Rational::zero();
    for i in 0..=g + 1 {
        let gamma = ring.pow(&omega, (g + 1 - i) as u32);
        let inst = BkkInstance::new(ring.clone(), gamma, i as u32)?;
        let value = I_hat(&inst, &inp.polytope)?;
        if value.is_zero() {
            continue;
        }
        let c = Rational::from_integer(binomial(d + 1, t + i)) * fact(t + i) / fact(i);
        total += c * value;
    }
    Ok(total)
}

/// `−(d+1)! ∫_Δ ĥ(c(m)) dm`.
pub fn printed_formula(inp: &SemiabelianInput) -> Result<Rational> {
    let q = inp.height_form();
    let t = inp.t();
    let mut f = Polynomial::zero(t);
    for i in 0..t {
        for j in 0..t {
            let mut e = vec![0u32; t];
            e[i] += 1;
            e[j] += 1;
            f.add_term(e, q.matrix()[i][j].clone());
        }
    }
    Ok(-fact(inp.d() + 1) * integrate_polynomial(inp.polytope.base(), &f)?)
}

pub fn height(inp: &SemiabelianInput) -> Result<HeightReport> {
    let ok = okounkov_route(inp)?;
    let bkk = bkk_route(inp)?;
    if ok != bkk {
        return Err(Error::InconsistentRoutes { okounkov: fmt_rational(&ok), bkk: fmt_rational(&bkk) });
    }
    let printed = printed_formula(inp)?;
    let factor = &inp.deg_m / fact(inp.g);
    let mut note = format!(
        "route values carry the fiber volume factor degM/g! = {}; the closed formula -(d+1)! * integral of h(c(m)) omits it",
        fmt_rational(&factor)
    );
    if !printed.is_zero() {
        note.push_str(&format!(" (route value / closed formula = {})", fmt_rational(&(&ok / &printed))));
    }
    if !inp.polytope.global_roof().is_zero() {
        note.push_str("; the closed formula also ignores the roof function");
    }
    Ok(HeightReport { okounkov_route: ok, bkk_route: bkk, printed_formula: printed, consistent: true, normalization_note: note })
}

pub fn minima_report(inp: &SemiabelianInput, convention: Convention) -> Result<Vec<Rational>> {
    successive_minima_with_roofs(&inp.polytope, &inp.height_form(), inp.g, convention)
}

/// The simplex `(t+1)Δ^t − Σ e_i`.
pub fn chambert_loir_polytope(t: usize) -> Result<RationalPolytope> {
    if t == 0 {
        return Err(Error::BadDimensions("toric rank must be positive".into()));
    }
    let shift = vec![-Rational::one(); t];
    let mut pts = vec![shift.clone()];
    for i in 0..t {
        let mut v = shift.clone();
        v[i] += Rational::from_integer((t + 1).into());
        pts.push(v);
    }
    RationalPolytope::from_vertices(pts)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClClosedForms {
    pub zeta_abs_closed: Rational,
    pub height_closed: Rational,
    /// `height_closed` divided by the route-consistent height on the same
    /// polytope, when the latter is nonzero.
    pub height_ratio: Option<Rational>,
}

pub fn cl_closed_forms(t: usize, gram: &[Point], deg_m: &Rational, g: usize) -> Result<ClClosedForms> {
    let delta = chambert_loir_polytope(t)?;
    let inp = SemiabelianInput::canonical(g, delta, gram.to_vec(), deg_m.clone())?;
    let q = inp.height_form();
    let h_q = q.eval(&vec![Rational::one(); t]);
    let mut terms = Vec::with_capacity(t);
    for i in 0..t {
        let mut a = vec![Rational::one(); t];
        a[i] -= Rational::from_integer((t + 1).into());
        terms.push(q.eval(&a));
    }
    let worst = terms.iter().cloned().chain(std::iter::once(h_q.clone())).max().expect("nonempty");
    let d = t + g;
    let sum: Rational = terms.iter().sum::<Rational>() + &h_q;
    let height_closed =
        -(Rational::from_integer((d + 1).into()) * deg_m / Rational::from_integer(((t + 1) * (t + 2)).into())) * sum;
    let route = okounkov_route(&inp)?;
    let height_ratio = if route.is_zero() { None } else { Some(&height_closed / &route) };
    Ok(ClClosedForms { zeta_abs_closed: -worst, height_closed, height_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minima::{absolute_minimum, ZetaOracle};
    use crate::rational::{point, rat};
    use crate::roofs::{build_roof, Roof};

    fn pinned(h: i64) -> SemiabelianInput {
        SemiabelianInput::canonical(1, chambert_loir_polytope(1).unwrap(), vec![point(&[h])], rat(3)).unwrap()
    }

    #[test]
    fn pinned_instance() {
        for h in [1, 2, 5] {
            let r = height(&pinned(h)).unwrap();
            assert_eq!(r.okounkov_route, rat(-12 * h));
            assert_eq!(r.bkk_route, rat(-12 * h));
            assert_eq!(r.printed_formula, rat(-4 * h));
            assert!(r.consistent);
        }
        let zero = SemiabelianInput::canonical(1, chambert_loir_polytope(1).unwrap(), vec![point(&[0])], rat(3)).unwrap();
        let r = height(&zero).unwrap();
        assert_eq!((r.okounkov_route, r.bkk_route, r.printed_formula), (rat(0), rat(0), rat(0)));
    }

    #[test]
    fn abelian_case() {
        // t = 0: Δ is a point, ĥ(c(m0)) = 0; with a roof the height is (g+1)·degM·θ.
        let pt = RationalPolytope::point(Vec::new());
        let inp = SemiabelianInput::canonical(2, pt.clone(), vec![], rat(3)).unwrap();
        assert_eq!(height(&inp).unwrap().okounkov_route, rat(0));
        let roofed = AdelicPolytope::single("v", Roof::constant(&pt, rat(1)).unwrap()).unwrap();
        let inp = SemiabelianInput::new(2, roofed, vec![], rat(3)).unwrap();
        let r = height(&inp).unwrap();
        assert_eq!(r.okounkov_route, rat(9));
    }

    #[test]
    fn roofs_raise_the_height() {
        let d = chambert_loir_polytope(2).unwrap();
        let roof = build_roof(&d, &[(point(&[-1, -1]), rat(0)), (point(&[2, -1]), rat(1)), (point(&[-1, 2]), rat(2)), (point(&[0, 0]), rat(2))])
            .unwrap();
        let gram = vec![point(&[2, 1]), point(&[1, 1])];
        let base = SemiabelianInput::canonical(2, d.clone(), gram.clone(), rat(2)).unwrap();
        let lifted = SemiabelianInput::new(2, AdelicPolytope::single("v", roof).unwrap(), gram, rat(2)).unwrap();
        let a = height(&base).unwrap();
        let b = height(&lifted).unwrap();
        assert!(b.okounkov_route > a.okounkov_route);
    }

    #[test]
    fn cl_polytopes() {
        assert_eq!(chambert_loir_polytope(1).unwrap(), RationalPolytope::interval(rat(-1), rat(1)));
        let tri = chambert_loir_polytope(2).unwrap();
        assert_eq!(tri.volume(), rat(9) / rat(2));
        for t in 1..=4 {
            let p = chambert_loir_polytope(t).unwrap();
            let sum = p.vertices().iter().fold(vec![rat(0); t], |acc, v| crate::rational::add(&acc, v));
            assert!(sum.iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn closed_forms() {
        let c = cl_closed_forms(1, &[point(&[1])], &rat(3), 1).unwrap();
        assert_eq!(c.zeta_abs_closed, rat(-1));
        let c = cl_closed_forms(2, &[point(&[1, 0]), point(&[0, 1])], &rat(1), 1).unwrap();
        assert_eq!(c.zeta_abs_closed, rat(-5));
        let zero = cl_closed_forms(2, &[point(&[0, 0]), point(&[0, 0])], &rat(1), 1).unwrap();
        assert_eq!((zero.zeta_abs_closed, zero.height_closed, zero.height_ratio), (rat(0), rat(0), None));
        let gram = vec![point(&[3, 1]), point(&[1, 2])];
        let c = cl_closed_forms(2, &gram, &rat(2), 2).unwrap();
        let p = AdelicPolytope::canonical(chambert_loir_polytope(2).unwrap());
        let z = ZetaOracle::concave_quadratic(gram, point(&[0, 0]), rat(0)).unwrap();
        assert_eq!(absolute_minimum(&p, &z).unwrap().value, c.zeta_abs_closed);
    }

    #[test]
    fn minima_reports() {
        let r = minima_report(&pinned(1), Convention::Default).unwrap();
        assert_eq!(r, vec![rat(-1), rat(-1), rat(0)]);
    }
}
