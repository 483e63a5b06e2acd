//! Essential, absolute and successive minima, and the height-filtration
//! function.

use num_traits::Signed;

use crate::error::{check_dim, Error, Result};
use crate::polytope::RationalPolytope;
use crate::qp::{min_quadratic_over_polytope, QuadraticForm};
use crate::rational::{dot, fmt_point, Point, Rational};
use crate::roofs::{build_roof, AdelicPolytope, Roof};

/// A certified-concave base term `m ↦ z(m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ZetaOracle {
    /// `m ↦ −q(m)`.
    ConcaveQuadratic(QuadraticForm),
    Affine { gradient: Point, constant: Rational },
    /// Concave piecewise-affine function given by its values at points; its
    /// domain is the convex hull of the points.
    Tabulated { roof: Roof, shift: Rational },
}

impl ZetaOracle {
    /// `m ↦ −(mᵀQm + b·m + c)`; fails unless `Q` is positive semidefinite.
    pub fn concave_quadratic(matrix: Vec<Point>, linear: Point, constant: Rational) -> Result<Self> {
        match QuadraticForm::new(matrix, linear, constant) {
            Ok(q) => Ok(ZetaOracle::ConcaveQuadratic(q)),
            Err(Error::NotPSD) => Err(Error::NonConcaveOracle),
            Err(e) => Err(e),
        }
    }

    pub fn affine(gradient: Point, constant: Rational) -> Self {
        ZetaOracle::Affine { gradient, constant }
    }

    /// Fails with `NonConcaveOracle` if some value lies strictly below the
    /// concave envelope of the others.
    pub fn tabulated(values: &[(Point, Rational)]) -> Result<Self> {
        let pts: Vec<Point> = values.iter().map(|(p, _)| p.clone()).collect();
        let domain = RationalPolytope::from_vertices(pts)?;
        let shift = values.iter().map(|(_, v)| v.clone()).min().expect("nonempty");
        let lifted: Vec<(Point, Rational)> = values.iter().map(|(p, v)| (p.clone(), v - &shift)).collect();
        let roof = build_roof(&domain, &lifted)?;
        for (p, v) in &lifted {
            if roof.eval(p)? != *v {
                return Err(Error::NonConcaveOracle);
            }
        }
        Ok(ZetaOracle::Tabulated { roof, shift })
    }

    pub fn dim(&self) -> usize {
        match self {
            ZetaOracle::ConcaveQuadratic(q) => q.dim(),
            ZetaOracle::Affine { gradient, .. } => gradient.len(),
            ZetaOracle::Tabulated { roof, .. } => roof.domain().ambient_dim(),
        }
    }

    pub fn eval(&self, m: &[Rational]) -> Result<Rational> {
        check_dim(self.dim(), m.len())?;
        match self {
            ZetaOracle::ConcaveQuadratic(q) => Ok(-q.eval(m)),
            ZetaOracle::Affine { gradient, constant } => Ok(dot(gradient, m) + constant),
            ZetaOracle::Tabulated { roof, shift } => Ok(roof.eval(m)? + shift),
        }
    }
}

fn check_domain(p: &AdelicPolytope, z: &ZetaOracle) -> Result<()> {
    check_dim(p.dim(), z.dim())?;
    if let ZetaOracle::Tabulated { roof, .. } = z {
        for v in p.base().vertices() {
            if !roof.domain().contains(v) {
                return Err(Error::PointOutsideDomain(fmt_point(v)));
            }
        }
    }
    Ok(())
}

/// `max_{m ∈ Δ} (z(m) + θ(m))`.
pub fn essential_minimum(p: &AdelicPolytope, z: &ZetaOracle) -> Result<Rational> {
    check_domain(p, z)?;
    let theta = p.global_roof();
    let mut best: Option<Rational> = None;
    let mut offer = |v: Rational| {
        if best.as_ref().is_none_or(|b| v > *b) {
            best = Some(v);
        }
    };
    for (cell, piece) in theta.cells().iter().zip(theta.pieces()) {
        match z {
            ZetaOracle::ConcaveQuadratic(q) => {
                let (v, _) = min_quadratic_over_polytope(cell, &q.minus_affine(&piece.gradient, &piece.constant))?;
                offer(-v);
            }
            ZetaOracle::Affine { .. } => {
                for v in cell.vertices() {
                    offer(z.eval(v)? + piece.eval(v));
                }
            }
            ZetaOracle::Tabulated { roof, .. } => {
                for zc in roof.cells() {
                    let sub = match cell.intersect(&zc.halfspaces()) {
                        Ok(s) => s,
                        Err(Error::EmptyRegion) => continue,
                        Err(e) => return Err(e),
                    };
                    for v in sub.vertices() {
                        offer(z.eval(v)? + piece.eval(v));
                    }
                }
            }
        }
    }
    Ok(best.expect("the roof has a cell"))
}

/// The absolute minimum with its location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbsoluteMinimum {
    pub value: Rational,
    /// Lexicographically least vertex attaining the value.
    pub at: Point,
    /// The infimum over the relative interior is not attained there.
    pub boundary_only: bool,
}

/// `inf_{m ∈ Δ°} (z(m) + θ(m))`, which by concavity is the minimum over the
/// vertices of `Δ`.
pub fn absolute_minimum(p: &AdelicPolytope, z: &ZetaOracle) -> Result<AbsoluteMinimum> {
    check_domain(p, z)?;
    let theta = p.global_roof();
    let mut best: Option<(Rational, Point)> = None;
    for v in p.base().vertices() {
        let value = z.eval(v)? + theta.eval(v)?;
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, v.clone()));
        }
    }
    let (value, at) = best.expect("nonempty");
    let boundary_only = p.base().affine_dim() > 0 && essential_minimum(p, z)? != value;
    Ok(AbsoluteMinimum { value, at, boundary_only })
}

/// Index convention for successive minima.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Convention {
    /// Face dimension `i − g − 1` at index `i ≥ g + 1`.
    #[default]
    Default,
    /// Face dimension `t + g + 1 − i`, and the dimension-`t` value for
    /// `i ≤ g + 1`.
    Printed,
}

impl std::str::FromStr for Convention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "default" => Ok(Convention::Default),
            "printed" => Ok(Convention::Printed),
            _ => Err(Error::InvalidInput(format!("unknown convention '{s}'"))),
        }
    }
}

/// `max_{F k-face} min_{m ∈ F} hq(m)` for `k = 0..=t`.
pub fn face_minima(delta: &RationalPolytope, hq: &QuadraticForm) -> Result<Vec<Rational>> {
    check_dim(delta.ambient_dim(), hq.dim())?;
    let t = delta.affine_dim();
    let mut out = Vec::with_capacity(t + 1);
    for k in 0..=t {
        let mut best: Option<Rational> = None;
        for face in delta.faces(k)? {
            let (v, _) = min_quadratic_over_polytope(&face, hq)?;
            if best.as_ref().is_none_or(|b| v > *b) {
                best = Some(v);
            }
        }
        out.push(best.expect("every dimension up to the polytope's has faces"));
    }
    Ok(out)
}

fn zeta_from_faces(vals: &[Rational], t: usize, g: usize, convention: Convention) -> Vec<Rational> {
    (1..=t + g + 1)
        .map(|i| {
            let k = match convention {
                Convention::Default if i <= g + 1 => 0,
                Convention::Default => i - g - 1,
                Convention::Printed if i <= g + 1 => t,
                Convention::Printed => t + g + 1 - i,
            };
            vals[k].clone()
        })
        .collect()
}

/// `ζ_1, …, ζ_{t+g+1}` for the compactified semiabelian variety.
pub fn successive_minima_semiabelian(
    delta: &RationalPolytope,
    hq: &QuadraticForm,
    g: usize,
    convention: Convention,
) -> Result<Vec<Rational>> {
    if !delta.is_full_dimensional() {
        return Err(Error::NotFullDimensional);
    }
    let vals: Vec<Rational> = face_minima(delta, hq)?.into_iter().map(|v| -v).collect();
    Ok(zeta_from_faces(&vals, delta.ambient_dim(), g, convention))
}

/// `max_{m ∈ F} (θ(m) − hq(m))`.
fn max_on_face(theta: &Roof, face: &RationalPolytope, hq: &QuadraticForm) -> Result<Rational> {
    let mut best: Option<Rational> = None;
    for (cell, piece) in theta.cells().iter().zip(theta.pieces()) {
        let sub = match face.intersect(&cell.halfspaces()) {
            Ok(s) => s,
            Err(Error::EmptyRegion) => continue,
            Err(e) => return Err(e),
        };
        let v = -min_quadratic_over_polytope(&sub, &hq.minus_affine(&piece.gradient, &piece.constant))?.0;
        if best.as_ref().is_none_or(|b| v > *b) {
            best = Some(v);
        }
    }
    Ok(best.expect("the roof covers every face"))
}

/// Successive minima with roofs: at face dimension `k` the value is
/// `min_{F k-face} max_{m ∈ F} (θ(m) − hq(m))`.
pub fn successive_minima_with_roofs(
    p: &AdelicPolytope,
    hq: &QuadraticForm,
    g: usize,
    convention: Convention,
) -> Result<Vec<Rational>> {
    let delta = p.base();
    check_dim(delta.ambient_dim(), hq.dim())?;
    if !delta.is_full_dimensional() {
        return Err(Error::NotFullDimensional);
    }
    let theta = p.global_roof();
    let t = delta.ambient_dim();
    let mut vals = Vec::with_capacity(t + 1);
    for k in 0..=t {
        let mut worst: Option<Rational> = None;
        for face in delta.faces(k)? {
            let v = max_on_face(&theta, &face, hq)?;
            if worst.as_ref().is_none_or(|w| v < *w) {
                worst = Some(v);
            }
        }
        vals.push(worst.expect("faces exist"));
    }
    Ok(zeta_from_faces(&vals, t, g, convention))
}

/// `max_{m ∈ Δ} (θ(m) + ⟨ell, m⟩)`.
pub fn filtration_height(p: &AdelicPolytope, ell: &[Rational]) -> Result<Rational> {
    check_dim(p.dim(), ell.len())?;
    let theta = p.global_roof();
    Ok(theta
        .breakpoints()
        .iter()
        .map(|(m, h)| h + dot(ell, m))
        .max()
        .expect("nonempty"))
}

/// True when the list never decreases.
pub fn is_nondecreasing(v: &[Rational]) -> bool {
    v.windows(2).all(|w| !(&w[1] - &w[0]).is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use crate::rational::{point, rat, ratio};
    use crate::roofs::Roof;

    fn seg() -> RationalPolytope {
        RationalPolytope::interval(rat(-1), rat(1))
    }

    fn cl_triangle() -> RationalPolytope {
        RationalPolytope::from_vertices(vec![point(&[-1, -1]), point(&[2, -1]), point(&[-1, 2])]).unwrap()
    }

    #[test]
    fn essential_examples() {
        let z = ZetaOracle::concave_quadratic(vec![point(&[1])], point(&[0]), rat(0)).unwrap();
        let p = AdelicPolytope::canonical(seg());
        assert_eq!(essential_minimum(&p, &z).unwrap(), rat(0));
        let lifted = AdelicPolytope::single("v", Roof::constant(&seg(), rat(3)).unwrap()).unwrap();
        assert_eq!(essential_minimum(&lifted, &z).unwrap(), rat(3));
        let aff = ZetaOracle::affine(point(&[2]), rat(1));
        assert_eq!(essential_minimum(&p, &aff).unwrap(), rat(3));
        assert_eq!(
            ZetaOracle::concave_quadratic(vec![point(&[-1])], point(&[0]), rat(0)).unwrap_err(),
            Error::NonConcaveOracle
        );
        let bumpy = [(point(&[-1]), rat(0)), (point(&[0]), rat(-1)), (point(&[1]), rat(0))];
        assert_eq!(ZetaOracle::tabulated(&bumpy).unwrap_err(), Error::NonConcaveOracle);
        let tent = ZetaOracle::tabulated(&[(point(&[-1]), rat(-2)), (point(&[0]), rat(1)), (point(&[1]), rat(-2))]).unwrap();
        assert_eq!(essential_minimum(&p, &tent).unwrap(), rat(1));
    }

    #[test]
    fn absolute_examples() {
        let z = ZetaOracle::concave_quadratic(vec![point(&[5])], point(&[0]), rat(0)).unwrap();
        let p = AdelicPolytope::canonical(seg());
        let a = absolute_minimum(&p, &z).unwrap();
        assert_eq!(a.value, rat(-5));
        assert!(a.boundary_only);
        let pt = AdelicPolytope::canonical(RationalPolytope::point(point(&[2])));
        let a = absolute_minimum(&pt, &z).unwrap();
        assert_eq!(a.value, rat(-20));
        assert!(!a.boundary_only);
    }

    #[test]
    fn successive_examples() {
        let h = QuadraticForm::from_gram(vec![point(&[1])]).unwrap();
        let z = successive_minima_semiabelian(&seg(), &h, 1, Convention::Default).unwrap();
        assert_eq!(z, vec![rat(-1), rat(-1), rat(0)]);
        let id = QuadraticForm::from_gram(vec![point(&[1, 0]), point(&[0, 1])]).unwrap();
        let z = successive_minima_semiabelian(&cl_triangle(), &id, 1, Convention::Default).unwrap();
        assert_eq!(z, vec![rat(-5), rat(-5), rat(-1), rat(0)]);
        assert!(is_nondecreasing(&z));
        let zero = QuadraticForm::from_gram(vec![point(&[0, 0]), point(&[0, 0])]).unwrap();
        let z = successive_minima_semiabelian(&cl_triangle(), &zero, 2, Convention::Default).unwrap();
        assert!(z.iter().all(Zero::is_zero));
        let printed = successive_minima_semiabelian(&seg(), &h, 1, Convention::Printed).unwrap();
        assert_eq!(printed, vec![rat(0), rat(0), rat(-1)]);
        let flat = AdelicPolytope::canonical(cl_triangle());
        let with = successive_minima_with_roofs(&flat, &id, 1, Convention::Default).unwrap();
        assert_eq!(with, vec![rat(-5), rat(-5), rat(-1), rat(0)]);
        let raised = AdelicPolytope::single("v", Roof::constant(&seg(), rat(2)).unwrap()).unwrap();
        let z = successive_minima_with_roofs(&raised, &h, 1, Convention::Default).unwrap();
        assert_eq!(z, vec![rat(1), rat(1), rat(2)]);
    }

    #[test]
    fn filtration_examples() {
        let d = RationalPolytope::interval(rat(0), rat(2));
        let tent = build_roof(&d, &[(point(&[0]), rat(0)), (point(&[1]), rat(1)), (point(&[2]), rat(0))]).unwrap();
        let p = AdelicPolytope::single("v", tent).unwrap();
        assert_eq!(filtration_height(&p, &[ratio(1, 2)]).unwrap(), ratio(3, 2));
        assert_eq!(filtration_height(&p, &[rat(0)]).unwrap(), rat(1));
        let flat = AdelicPolytope::canonical(cl_triangle());
        assert_eq!(filtration_height(&flat, &point(&[1, 1])).unwrap(), rat(1));
    }
}
