//! Exact rational polytopes with synchronized vertex and halfspace
//! descriptions.
//!
//! Lower-dimensional polytopes are handled in the coordinate chart of their
//! affine hull; facets are stored as ambient inequalities valid on the hull,
//! together with the hull equations.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::dd::extreme_rays;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{abs_det, rank, rref, AffineHull};
use crate::rational::{add, dot, factorial, fmt_point, primitive_integer, scale, sub, Point, Rational};

/// Closed halfspace `normal · x <= offset` (or hyperplane, when used as an
/// equation).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Halfspace {
    pub normal: Point,
    pub offset: Rational,
}

impl Halfspace {
    pub fn new(normal: Point, offset: Rational) -> Self {
        Halfspace { normal, offset }
    }

    /// Rescales so that the normal is a primitive integer vector.
    pub fn normalized(&self) -> Self {
        if self.normal.iter().all(Zero::is_zero) {
            return self.clone();
        }
        let prim = primitive_integer(&self.normal);
        let (i, ni) = self
            .normal
            .iter()
            .enumerate()
            .find(|(_, x)| !x.is_zero())
            .expect("nonzero normal");
        let factor = Rational::from_integer(prim[i].clone()) / ni;
        Halfspace {
            normal: scale(&self.normal, &factor),
            offset: &self.offset * &factor,
        }
    }

    pub fn slack(&self, x: &[Rational]) -> Rational {
        &self.offset - dot(&self.normal, x)
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        !self.slack(x).is_negative()
    }

    pub fn flipped(&self) -> Self {
        Halfspace {
            normal: self.normal.iter().map(|x| -x).collect(),
            offset: -self.offset.clone(),
        }
    }
}

/// Input to [`RationalPolytope::canonicalize`].
#[derive(Debug, Clone)]
pub enum Representation {
    Vertices(Vec<Point>),
    Halfspaces { dim: usize, halfspaces: Vec<Halfspace> },
}

/// A nonempty rational polytope.
#[derive(Debug, Clone)]
pub struct RationalPolytope {
    ambient_dim: usize,
    affine_dim: usize,
    vertices: Vec<Point>,
    facets: Vec<Halfspace>,
    equations: Vec<Halfspace>,
    incidence: Vec<Vec<usize>>,
}

impl PartialEq for RationalPolytope {
    fn eq(&self, other: &Self) -> bool {
        self.ambient_dim == other.ambient_dim && self.vertices == other.vertices
    }
}

impl Eq for RationalPolytope {}

impl fmt::Display for RationalPolytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = self.vertices.iter().map(|v| fmt_point(v)).collect();
        write!(f, "conv{{{}}}", vs.join(", "))
    }
}

impl RationalPolytope {
    pub fn canonicalize(rep: Representation) -> Result<Self> {
        match rep {
            Representation::Vertices(points) => Self::from_vertices(points),
            Representation::Halfspaces { dim, halfspaces } => Self::from_halfspaces(dim, &halfspaces),
        }
    }

    /// Convex hull of a nonempty point list.
    pub fn from_vertices(points: Vec<Point>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::InvalidInput("empty point list".into()));
        };
        let ambient = first.len();
        for p in &points {
            check_dim(ambient, p.len())?;
        }
        let mut pts = points;
        pts.sort();
        pts.dedup();
        Ok(Self::hull(pts, ambient))
    }

    fn hull(pts: Vec<Point>, ambient: usize) -> Self {
        let hull = AffineHull::of(&pts, ambient);
        let equations: Vec<Halfspace> = hull
            .equations
            .iter()
            .map(|(n, c)| Halfspace::new(n.clone(), c.clone()))
            .collect();
        let k = hull.dim();
        if k == 0 {
            return RationalPolytope {
                ambient_dim: ambient,
                affine_dim: 0,
                vertices: vec![pts[0].clone()],
                facets: Vec::new(),
                equations,
                incidence: Vec::new(),
            };
        }
        let chart: Vec<Point> = pts.iter().map(|p| hull.project(p)).collect();
        let rows: Vec<Point> = chart
            .iter()
            .map(|y| {
                let mut r: Point = y.iter().map(|x| -x).collect();
                r.push(Rational::one());
                r
            })
            .collect();
        let chart_facets: Vec<Halfspace> = extreme_rays(&rows, k + 1)
            .into_iter()
            .map(|mut ray| {
                let b = ray.pop().expect("homogenizing coordinate");
                Halfspace::new(ray, b)
            })
            .collect();

        let is_vertex = |y: &Point| {
            let tight: Vec<Point> = chart_facets
                .iter()
                .filter(|h| h.slack(y).is_zero())
                .map(|h| h.normal.clone())
                .collect();
            rank(&tight, k) == k
        };
        let vertices: Vec<Point> = pts
            .iter()
            .zip(&chart)
            .filter(|(_, y)| is_vertex(y))
            .map(|(p, _)| p.clone())
            .collect();

        let mut facets: Vec<Halfspace> = chart_facets
            .iter()
            .map(|h| Halfspace::new(hull.lift_functional(&h.normal), h.offset.clone()).normalized())
            .collect();
        facets.sort();
        facets.dedup();
        let incidence = facets
            .iter()
            .map(|h| {
                (0..vertices.len())
                    .filter(|&i| h.slack(&vertices[i]).is_zero())
                    .collect()
            })
            .collect();
        RationalPolytope {
            ambient_dim: ambient,
            affine_dim: k,
            vertices,
            facets,
            equations,
            incidence,
        }
    }

    /// Intersection of halfspaces `normal · x <= offset` in `Q^dim`.
    pub fn from_halfspaces(dim: usize, halfspaces: &[Halfspace]) -> Result<Self> {
        for h in halfspaces {
            check_dim(dim, h.normal.len())?;
        }
        if dim == 0 {
            return if halfspaces.iter().all(|h| !h.offset.is_negative()) {
                Ok(Self::hull(vec![Vec::new()], 0))
            } else {
                Err(Error::EmptyRegion)
            };
        }
        let normals: Vec<Point> = halfspaces.iter().map(|h| h.normal.clone()).collect();
        let (basis, _) = rref(&normals, dim);
        let r = basis.len();
        if r < dim {
            // A lineality direction exists: the region is unbounded unless empty.
            let feasible = if r == 0 {
                halfspaces.iter().all(|h| !h.offset.is_negative())
            } else {
                let reduced: Vec<Halfspace> = halfspaces
                    .iter()
                    .map(|h| {
                        Halfspace::new(basis.iter().map(|b| dot(&h.normal, b)).collect(), h.offset.clone())
                    })
                    .collect();
                homogenized_rays(r, &reduced).iter().any(|ray| ray[r].is_positive())
            };
            return Err(if feasible { Error::UnboundedRegion } else { Error::EmptyRegion });
        }
        let rays = homogenized_rays(dim, halfspaces);
        let mut vertices = Vec::new();
        let mut recession = false;
        for ray in rays {
            let s = ray[dim].clone();
            if s.is_positive() {
                vertices.push(ray[..dim].iter().map(|x| x / &s).collect::<Point>());
            } else {
                recession = true;
            }
        }
        if vertices.is_empty() {
            return Err(Error::EmptyRegion);
        }
        if recession {
            return Err(Error::UnboundedRegion);
        }
        Self::from_vertices(vertices)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn affine_dim(&self) -> usize {
        self.affine_dim
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.affine_dim == self.ambient_dim
    }

    /// Vertices in lexicographic order.
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Facet inequalities, valid on the affine hull.
    pub fn facets(&self) -> &[Halfspace] {
        &self.facets
    }

    /// Equations of the affine hull (empty for full-dimensional polytopes).
    pub fn equations(&self) -> &[Halfspace] {
        &self.equations
    }

    /// Vertex indices lying on each facet.
    pub fn incidence(&self) -> &[Vec<usize>] {
        &self.incidence
    }

    /// Complete inequality description: facets plus both orientations of
    /// each hull equation.
    pub fn halfspaces(&self) -> Vec<Halfspace> {
        let mut hs = self.facets.clone();
        for e in &self.equations {
            hs.push(e.clone());
            hs.push(e.flipped());
        }
        hs
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == self.ambient_dim
            && self.equations.iter().all(|e| e.slack(x).is_zero())
            && self.facets.iter().all(|h| h.contains(x))
    }

    pub fn affine_hull(&self) -> AffineHull {
        AffineHull::of(&self.vertices, self.ambient_dim)
    }

    /// `max_{v} <n, v>`.
    pub fn support_value(&self, n: &[Rational]) -> Result<Rational> {
        check_dim(self.ambient_dim, n.len())?;
        Ok(self
            .vertices
            .iter()
            .map(|v| dot(n, v))
            .max()
            .expect("nonempty"))
    }

    /// Vertex indices attaining the support value in direction `n`.
    pub fn maximizers(&self, n: &[Rational]) -> Vec<usize> {
        let vals: Vec<Rational> = self.vertices.iter().map(|v| dot(n, v)).collect();
        let best = vals.iter().max().expect("nonempty").clone();
        (0..vals.len()).filter(|&i| vals[i] == best).collect()
    }

    pub fn minkowski_sum(&self, other: &Self) -> Result<Self> {
        check_dim(self.ambient_dim, other.ambient_dim)?;
        let pts: Vec<Point> = self
            .vertices
            .iter()
            .flat_map(|p| other.vertices.iter().map(move |q| add(p, q)))
            .collect();
        Self::from_vertices(pts)
    }

    /// `λ · P` for `λ >= 0`.
    pub fn scaled(&self, lambda: &Rational) -> Self {
        assert!(!lambda.is_negative(), "scaling factor must be nonnegative");
        let pts = self.vertices.iter().map(|v| scale(v, lambda)).collect();
        Self::from_vertices(pts).expect("nonempty")
    }

    pub fn translated(&self, by: &[Rational]) -> Self {
        let pts = self.vertices.iter().map(|v| add(v, by)).collect();
        Self::from_vertices(pts).expect("nonempty")
    }

    /// Intersection with extra halfspaces.
    pub fn intersect(&self, extra: &[Halfspace]) -> Result<Self> {
        let mut hs = self.halfspaces();
        hs.extend_from_slice(extra);
        Self::from_halfspaces(self.ambient_dim, &hs)
    }

    /// All faces (including `P` itself) as sorted vertex index sets.
    pub fn face_sets(&self) -> Vec<Vec<usize>> {
        let full: Vec<usize> = (0..self.vertices.len()).collect();
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        seen.insert(full.clone());
        let mut queue = vec![full];
        while let Some(face) = queue.pop() {
            for inc in &self.incidence {
                let g: Vec<usize> = face.iter().copied().filter(|i| inc.contains(i)).collect();
                if !g.is_empty() && g.len() < face.len() && seen.insert(g.clone()) {
                    queue.push(g);
                }
            }
        }
        seen.into_iter().collect()
    }

    pub fn face_dim(&self, face: &[usize]) -> usize {
        let v0 = &self.vertices[face[0]];
        let diffs: Vec<Point> = face[1..].iter().map(|&i| sub(&self.vertices[i], v0)).collect();
        rank(&diffs, self.ambient_dim)
    }

    pub fn sub_polytope(&self, face: &[usize]) -> Self {
        Self::from_vertices(face.iter().map(|&i| self.vertices[i].clone()).collect()).expect("nonempty face")
    }

    /// All `k`-dimensional faces, in lexicographic order of their vertex lists.
    pub fn faces(&self, k: usize) -> Result<Vec<Self>> {
        if k > self.affine_dim {
            return Err(Error::BadDimension(format!(
                "face dimension {k} exceeds polytope dimension {}",
                self.affine_dim
            )));
        }
        let mut out: Vec<Self> = self
            .face_sets()
            .into_iter()
            .filter(|f| self.face_dim(f) == k)
            .map(|f| self.sub_polytope(&f))
            .collect();
        out.sort_by(|a, b| a.vertices.cmp(&b.vertices));
        Ok(out)
    }

    /// Pulling triangulation from the lexicographically least vertex.
    pub fn triangulate(&self) -> Vec<Simplex> {
        if self.affine_dim == 0 {
            return vec![Simplex { vertices: vec![self.vertices[0].clone()] }];
        }
        let apex = &self.vertices[0];
        let mut out = Vec::new();
        for inc in &self.incidence {
            if inc.contains(&0) {
                continue;
            }
            for s in self.sub_polytope(inc).triangulate() {
                let mut vs = vec![apex.clone()];
                vs.extend(s.vertices);
                out.push(Simplex { vertices: vs });
            }
        }
        out
    }

    /// Lebesgue volume in the ambient space (0 unless full-dimensional).
    pub fn volume(&self) -> Rational {
        if !self.is_full_dimensional() {
            return Rational::zero();
        }
        self.triangulate().iter().map(Simplex::volume).sum()
    }

    pub fn centroid_of_vertices(&self) -> Point {
        let n = Rational::from_integer(self.vertices.len().into());
        let mut c = vec![Rational::zero(); self.ambient_dim];
        for v in &self.vertices {
            c = add(&c, v);
        }
        c.iter().map(|x| x / &n).collect()
    }

    /// Projects onto the first `k` coordinates.
    pub fn project_prefix(&self, k: usize) -> Self {
        let pts = self.vertices.iter().map(|v| v[..k].to_vec()).collect();
        Self::from_vertices(pts).expect("nonempty")
    }

    /// Cartesian product `P × Q`.
    pub fn product(&self, other: &Self) -> Self {
        let pts = self
            .vertices
            .iter()
            .flat_map(|p| {
                other.vertices.iter().map(move |q| {
                    let mut v = p.clone();
                    v.extend(q.iter().cloned());
                    v
                })
            })
            .collect();
        Self::from_vertices(pts).expect("nonempty")
    }

    /// Unit cube `[0,1]^t`.
    pub fn cube(t: usize) -> Self {
        let mut pts = vec![Vec::new()];
        for _ in 0..t {
            pts = pts
                .into_iter()
                .flat_map(|p: Point| {
                    [Rational::zero(), Rational::one()].into_iter().map(move |c| {
                        let mut q = p.clone();
                        q.push(c);
                        q
                    })
                })
                .collect();
        }
        Self::from_vertices(pts).expect("nonempty")
    }

    /// Interval `[a, b]` in `Q^1`.
    pub fn interval(a: Rational, b: Rational) -> Self {
        Self::from_vertices(vec![vec![a], vec![b]]).expect("nonempty")
    }

    pub fn point(p: Point) -> Self {
        Self::from_vertices(vec![p]).expect("nonempty")
    }
}

/// Rays of `{(x, s) : s·b_i - a_i·x >= 0, s >= 0}`.
fn homogenized_rays(dim: usize, halfspaces: &[Halfspace]) -> Vec<Point> {
    let mut rows: Vec<Point> = halfspaces
        .iter()
        .map(|h| {
            let mut r: Point = h.normal.iter().map(|x| -x).collect();
            r.push(h.offset.clone());
            r
        })
        .collect();
    let mut s = vec![Rational::zero(); dim + 1];
    s[dim] = Rational::one();
    rows.push(s);
    extreme_rays(&rows, dim + 1)
}

/// A simplex given by its vertices (affinely independent).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Simplex {
    pub vertices: Vec<Point>,
}

impl Simplex {
    pub fn ambient_dim(&self) -> usize {
        self.vertices[0].len()
    }

    /// Edge vectors `v_i - v_0`.
    pub fn edge_matrix(&self) -> Vec<Point> {
        let v0 = &self.vertices[0];
        self.vertices[1..].iter().map(|v| sub(v, v0)).collect()
    }

    /// Lebesgue volume in the ambient space; zero for lower-dimensional
    /// simplices.
    pub fn volume(&self) -> Rational {
        let t = self.ambient_dim();
        if self.vertices.len() != t + 1 {
            return Rational::zero();
        }
        abs_det(&self.edge_matrix()) / Rational::from_integer(factorial(t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{point, rat, ratio};

    fn cl_triangle() -> RationalPolytope {
        RationalPolytope::from_vertices(vec![point(&[-1, -1]), point(&[2, -1]), point(&[-1, 2])]).unwrap()
    }

    #[test]
    fn interior_point_is_dropped() {
        let p = RationalPolytope::from_vertices(vec![
            point(&[0, 0]),
            point(&[1, 0]),
            point(&[0, 1]),
            point(&[1, 1]),
            vec![ratio(1, 2), ratio(1, 2)],
        ])
        .unwrap();
        assert_eq!(p.vertices().len(), 4);
        assert_eq!(p.facets().len(), 4);
    }

    #[test]
    fn unit_simplex_from_halfspaces() {
        let hs = vec![
            Halfspace::new(point(&[-1, 0]), rat(0)),
            Halfspace::new(point(&[0, -1]), rat(0)),
            Halfspace::new(point(&[1, 1]), rat(1)),
        ];
        let p = RationalPolytope::from_halfspaces(2, &hs).unwrap();
        assert_eq!(p.vertices(), &[point(&[0, 0]), point(&[0, 1]), point(&[1, 0])]);
    }

    #[test]
    fn halfline_is_unbounded_and_contradiction_is_empty() {
        let hs = vec![Halfspace::new(point(&[-1]), rat(0))];
        assert_eq!(RationalPolytope::from_halfspaces(1, &hs), Err(Error::UnboundedRegion));
        let hs = vec![
            Halfspace::new(point(&[1, 0]), rat(-1)),
            Halfspace::new(point(&[-1, 0]), rat(-1)),
        ];
        assert_eq!(RationalPolytope::from_halfspaces(2, &hs), Err(Error::EmptyRegion));
        let hs = vec![
            Halfspace::new(point(&[1]), rat(-1)),
            Halfspace::new(point(&[-1]), rat(-1)),
        ];
        assert_eq!(RationalPolytope::from_halfspaces(1, &hs), Err(Error::EmptyRegion));
    }

    #[test]
    fn lower_dimensional_from_halfspaces() {
        // x = 1 within the unit square: a segment.
        let hs = vec![
            Halfspace::new(point(&[1, 0]), rat(1)),
            Halfspace::new(point(&[-1, 0]), rat(-1)),
            Halfspace::new(point(&[0, 1]), rat(1)),
            Halfspace::new(point(&[0, -1]), rat(0)),
        ];
        let p = RationalPolytope::from_halfspaces(2, &hs).unwrap();
        assert_eq!(p.affine_dim(), 1);
        assert_eq!(p.vertices(), &[point(&[1, 0]), point(&[1, 1])]);
    }

    #[test]
    fn minkowski_examples() {
        let seg = RationalPolytope::interval(rat(0), rat(1));
        assert_eq!(seg.minkowski_sum(&seg).unwrap(), RationalPolytope::interval(rat(0), rat(2)));
        let sq = RationalPolytope::cube(2);
        let diag = RationalPolytope::from_vertices(vec![point(&[0, 0]), point(&[1, 1])]).unwrap();
        let hex = sq.minkowski_sum(&diag).unwrap();
        assert_eq!(hex.vertices().len(), 6);
        let shifted = sq.minkowski_sum(&RationalPolytope::point(point(&[2, 3]))).unwrap();
        assert_eq!(shifted, sq.translated(&point(&[2, 3])));
        assert!(sq.minkowski_sum(&seg).is_err());
    }

    #[test]
    fn support_values() {
        let sq = RationalPolytope::cube(2);
        assert_eq!(sq.support_value(&point(&[1, 1])).unwrap(), rat(2));
        assert_eq!(cl_triangle().support_value(&point(&[1, 0])).unwrap(), rat(2));
        assert_eq!(cl_triangle().support_value(&point(&[0, 0])).unwrap(), rat(0));
    }

    #[test]
    fn face_counts() {
        let cube = RationalPolytope::cube(3);
        assert_eq!(cube.faces(1).unwrap().len(), 12);
        assert_eq!(cube.faces(2).unwrap().len(), 6);
        assert_eq!(cl_triangle().faces(0).unwrap().len(), 3);
        let seg = RationalPolytope::interval(rat(0), rat(1));
        assert!(matches!(seg.faces(2), Err(Error::BadDimension(_))));
    }

    #[test]
    fn volumes_and_triangulations() {
        assert_eq!(RationalPolytope::cube(3).volume(), rat(1));
        assert_eq!(cl_triangle().volume(), ratio(9, 2));
        assert_eq!(RationalPolytope::point(point(&[1, 2])).volume(), rat(0));
        let sq = RationalPolytope::cube(2).triangulate();
        assert_eq!(sq.len(), 2);
        assert!(sq.iter().all(|s| s.volume() == ratio(1, 2)));
        let tri = cl_triangle().triangulate();
        assert_eq!(tri.len(), 1);
        let pt = RationalPolytope::point(point(&[1])).triangulate();
        assert_eq!(pt.len(), 1);
        assert_eq!(pt[0].volume(), rat(0));
        // R^0: the point is full-dimensional with unit counting measure.
        assert_eq!(RationalPolytope::point(Vec::new()).volume(), rat(1));
    }

    #[test]
    fn canonicalize_is_idempotent() {
        let p = cl_triangle();
        let again = RationalPolytope::canonicalize(Representation::Halfspaces {
            dim: 2,
            halfspaces: p.halfspaces(),
        })
        .unwrap();
        assert_eq!(again, p);
        assert_eq!(again.facets(), p.facets());
    }
}
