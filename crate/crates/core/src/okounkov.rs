//! Fibered convex bodies with concave transforms: geometric and χ-volumes
//! and the extrema of the transform.

use num_traits::Zero;

use crate::error::{check_dim, Error, Result};
use crate::poly::Polynomial;
use crate::polyint::{integrate_polynomial, integrate_positive_part};
use crate::polytope::{Halfspace, RationalPolytope};
use crate::qp::{min_quadratic_over_polytope, QuadraticForm};
use crate::rational::{factorial, Point, Rational};
use crate::roofs::{AdelicPolytope, Roof};

/// The part of the transform added to the global roof.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaseTransform {
    Zero,
    /// `m ↦ −q(m)`.
    NegQuadratic(QuadraticForm),
    /// `roof + shift`; the roof lives on the base polytope (a function of
    /// `m`) or on the whole body (a function of `(m, x)`).
    PiecewiseAffine { roof: Roof, shift: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Fiber {
    /// The body is `Δ × fiber`.
    Constant(RationalPolytope),
    /// The body is given directly in `R^{t+g}` and projects onto `Δ`.
    Graph(RationalPolytope),
}

#[derive(Debug, Clone)]
pub struct FiberedBody {
    base: RationalPolytope,
    fiber: Fiber,
    body: RationalPolytope,
    theta: Roof,
    transform: BaseTransform,
}

/// A region of the body on which the transform is `affine − q(m)`.
struct Region {
    cell: RationalPolytope,
    gradient: Point,
    constant: Rational,
}

fn pad(normal: &[Rational], total: usize) -> Point {
    let mut n = normal.to_vec();
    n.resize(total, Rational::zero());
    n
}

impl FiberedBody {
    pub fn base(&self) -> &RationalPolytope {
        &self.base
    }

    pub fn fiber(&self) -> &Fiber {
        &self.fiber
    }

    pub fn body(&self) -> &RationalPolytope {
        &self.body
    }

    pub fn theta(&self) -> &Roof {
        &self.theta
    }

    pub fn transform(&self) -> &BaseTransform {
        &self.transform
    }

    pub fn t(&self) -> usize {
        self.base.ambient_dim()
    }

    /// Total dimension `d = t + g`.
    pub fn dim(&self) -> usize {
        self.body.ambient_dim()
    }

    /// `G(m, x)`.
    pub fn eval(&self, y: &[Rational]) -> Result<Rational> {
        check_dim(self.dim(), y.len())?;
        if !self.body.contains(y) {
            return Err(Error::PointOutsideDomain(crate::rational::fmt_point(y)));
        }
        let m = &y[..self.t()];
        let base = match &self.transform {
            BaseTransform::Zero => Rational::zero(),
            BaseTransform::NegQuadratic(q) => -q.eval(m),
            BaseTransform::PiecewiseAffine { roof, shift } => {
                let arg = if roof.domain().ambient_dim() == self.t() { m } else { y };
                roof.eval(arg)? + shift
            }
        };
        Ok(self.theta.eval(m)? + base)
    }

    fn quadratic(&self) -> Option<QuadraticForm> {
        match &self.transform {
            BaseTransform::NegQuadratic(q) => {
                let d = self.dim();
                let matrix = (0..d)
                    .map(|i| if i < q.dim() { pad(&q.matrix()[i], d) } else { vec![Rational::zero(); d] })
                    .collect();
                Some(QuadraticForm::new(matrix, pad(q.linear(), d), q.constant().clone()).expect("padding keeps PSD"))
            }
            _ => None,
        }
    }

    /// Common refinement of the roof's cells and the transform's cells,
    /// restricted to the body, with the affine part of `G` on each.
    fn regions(&self) -> Result<Vec<Region>> {
        let d = self.dim();
        let mut regions = vec![Region {
            cell: self.body.clone(),
            gradient: vec![Rational::zero(); d],
            constant: Rational::zero(),
        }];
        let mut layers: Vec<(&Roof, Rational)> = vec![(&self.theta, Rational::zero())];
        if let BaseTransform::PiecewiseAffine { roof, shift } = &self.transform {
            layers.push((roof, shift.clone()));
        }
        for (roof, shift) in layers {
            let mut next = Vec::new();
            for r in &regions {
                for (cell, piece) in roof.cells().iter().zip(roof.pieces()) {
                    let hs: Vec<Halfspace> = cell
                        .halfspaces()
                        .into_iter()
                        .map(|h| Halfspace::new(pad(&h.normal, d), h.offset))
                        .collect();
                    let sub = match r.cell.intersect(&hs) {
                        Ok(s) => s,
                        Err(Error::EmptyRegion) => continue,
                        Err(e) => return Err(e),
                    };
                    let gradient: Point =
                        r.gradient.iter().zip(pad(&piece.gradient, d)).map(|(a, b)| a + b).collect();
                    next.push(Region { cell: sub, gradient, constant: &r.constant + &piece.constant + &shift });
                }
            }
            regions = next;
        }
        Ok(regions)
    }

    /// `∫_body G`.
    pub fn transform_integral(&self) -> Result<Rational> {
        let q = self.quadratic();
        let mut total = Rational::zero();
        for r in self.regions()? {
            if r.cell.affine_dim() < self.dim() {
                continue;
            }
            let mut f = Polynomial::affine(&r.gradient, &r.constant);
            if let Some(q) = &q {
                f = f - quadratic_polynomial(q);
            }
            total += integrate_polynomial(&r.cell, &f)?;
        }
        Ok(total)
    }

    /// `∫_body max(G, 0)`; available when the transform is piecewise affine.
    pub fn positive_part_integral(&self) -> Result<Rational> {
        if self.quadratic().is_some() {
            return Err(Error::InvalidInput("positive part of a quadratic transform is not piecewise polynomial".into()));
        }
        let mut total = Rational::zero();
        for r in self.regions()? {
            if r.cell.affine_dim() == self.dim() {
                total += integrate_positive_part(&r.cell, &r.gradient, &r.constant)?;
            }
        }
        Ok(total)
    }
}

fn quadratic_polynomial(q: &QuadraticForm) -> Polynomial {
    let n = q.dim();
    let mut p = Polynomial::affine(q.linear(), q.constant());
    for i in 0..n {
        for j in 0..n {
            let mut e = vec![0u32; n];
            e[i] += 1;
            e[j] += 1;
            p.add_term(e, q.matrix()[i][j].clone());
        }
    }
    p
}

/// Body `Δ` with the global roof as transform.
pub fn toric_okounkov(p: &AdelicPolytope) -> FiberedBody {
    let base = p.base().clone();
    FiberedBody {
        body: base.clone(),
        fiber: Fiber::Constant(RationalPolytope::point(Vec::new())),
        base,
        theta: p.global_roof(),
        transform: BaseTransform::Zero,
    }
}

/// Body `Δ × fiber` with transform `θ(m) + base_transform(m)`.
pub fn product_body(p: &AdelicPolytope, fiber: &RationalPolytope, transform: BaseTransform) -> Result<FiberedBody> {
    let base = p.base().clone();
    match &transform {
        BaseTransform::Zero => {}
        BaseTransform::NegQuadratic(q) => check_dim(base.ambient_dim(), q.dim())?,
        BaseTransform::PiecewiseAffine { roof, .. } => {
            if *roof.domain() != base {
                return Err(Error::DomainMismatch(format!("transform lives on {}, base is {}", roof.domain(), base)));
            }
        }
    }
    Ok(FiberedBody {
        body: base.product(fiber),
        fiber: Fiber::Constant(fiber.clone()),
        base,
        theta: p.global_roof(),
        transform,
    })
}

/// A body given directly in `R^{t+g}`, projecting onto the base of `p`.
pub fn graph_body(p: &AdelicPolytope, body: RationalPolytope, transform: BaseTransform) -> Result<FiberedBody> {
    let base = p.base().clone();
    let t = base.ambient_dim();
    if body.ambient_dim() < t || body.project_prefix(t) != base {
        return Err(Error::DomainMismatch(format!("body {body} does not project onto {base}")));
    }
    match &transform {
        BaseTransform::Zero => {}
        BaseTransform::NegQuadratic(q) => check_dim(t, q.dim())?,
        BaseTransform::PiecewiseAffine { roof, .. } => {
            if *roof.domain() != base && *roof.domain() != body {
                return Err(Error::DomainMismatch(format!("transform lives on {}", roof.domain())));
            }
        }
    }
    Ok(FiberedBody { fiber: Fiber::Graph(body.clone()), body, base, theta: p.global_roof(), transform })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Volumes {
    /// `d! · vol(body)`.
    pub geometric: Rational,
    /// `(d+1)! · ∫_body G`.
    pub chi: Rational,
}

pub fn volumes(b: &FiberedBody) -> Result<Volumes> {
    let d = b.dim();
    let geometric = Rational::from_integer(factorial(d)) * b.body.volume();
    let chi = Rational::from_integer(factorial(d + 1)) * b.transform_integral()?;
    Ok(Volumes { geometric, chi })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extrema {
    pub max: Rational,
    pub inf: Rational,
}

/// Exact maximum and infimum of `G` over the body.
pub fn transform_extrema(b: &FiberedBody) -> Result<Extrema> {
    let q = b.quadratic();
    let mut max: Option<Rational> = None;
    for r in b.regions()? {
        let v = match &q {
            Some(q) => -min_quadratic_over_polytope(&r.cell, &q.minus_affine(&r.gradient, &r.constant))?.0,
            None => r
                .cell
                .vertices()
                .iter()
                .map(|v| crate::rational::dot(&r.gradient, v) + &r.constant)
                .max()
                .expect("nonempty"),
        };
        if max.as_ref().is_none_or(|m| v > *m) {
            max = Some(v);
        }
    }
    let mut inf: Option<Rational> = None;
    for v in b.body.vertices() {
        let g = b.eval(v)?;
        if inf.as_ref().is_none_or(|m| g < *m) {
            inf = Some(g);
        }
    }
    Ok(Extrema { max: max.expect("nonempty"), inf: inf.expect("nonempty") })
}
