//! Exact minimization of convex quadratics over polytopes.

use num_traits::Zero;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{is_psd, mat_vec};
use crate::polytope::{Halfspace, RationalPolytope};
use crate::rational::{dot, Point, Rational};

/// `x ↦ xᵀ Q x + b·x + c` with `Q` symmetric positive semidefinite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticForm {
    matrix: Vec<Point>,
    linear: Point,
    constant: Rational,
}

impl QuadraticForm {
    pub fn new(matrix: Vec<Point>, linear: Point, constant: Rational) -> Result<Self> {
        let n = matrix.len();
        if matrix.iter().any(|r| r.len() != n) || linear.len() != n {
            return Err(Error::BadDimensions(format!("quadratic form needs a {n}x{n} matrix and {n} linear terms")));
        }
        if !is_psd(&matrix) {
            return Err(Error::NotPSD);
        }
        Ok(QuadraticForm { matrix, linear, constant })
    }

    /// `x ↦ xᵀ G x`.
    pub fn from_gram(gram: Vec<Point>) -> Result<Self> {
        let n = gram.len();
        Self::new(gram, vec![Rational::zero(); n], Rational::zero())
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Point] {
        &self.matrix
    }

    pub fn linear(&self) -> &[Rational] {
        &self.linear
    }

    pub fn constant(&self) -> &Rational {
        &self.constant
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        dot(x, &mat_vec(&self.matrix, x)) + dot(&self.linear, x) + &self.constant
    }

    /// `q − (g·x + c)`.
    pub fn minus_affine(&self, gradient: &[Rational], constant: &Rational) -> Self {
        QuadraticForm {
            matrix: self.matrix.clone(),
            linear: self.linear.iter().zip(gradient).map(|(b, g)| b - g).collect(),
            constant: &self.constant - constant,
        }
    }
}

/// Global minimum of `q` over `f` and the lexicographically least minimizer.
pub fn min_quadratic_over_polytope(f: &RationalPolytope, q: &QuadraticForm) -> Result<(Rational, Point)> {
    check_dim(f.ambient_dim(), q.dim())?;
    let two = Rational::from_integer(2.into());
    let mut best: Option<(Rational, Point)> = None;
    for face in f.face_sets() {
        let g = f.sub_polytope(&face);
        let hull = g.affine_hull();
        // Stationarity on the face's affine hull: V (2Qx + b) = 0.
        let extra: Vec<Halfspace> = hull
            .directions
            .iter()
            .flat_map(|v| {
                let row: Point = mat_vec(&q.matrix, v).into_iter().map(|x| x * &two).collect();
                let h = Halfspace::new(row, -dot(v, &q.linear));
                [h.flipped(), h]
            })
            .collect();
        let cut = if extra.is_empty() {
            g
        } else {
            match g.intersect(&extra) {
                Ok(c) => c,
                Err(Error::EmptyRegion) => continue,
                Err(e) => return Err(e),
            }
        };
        let x = cut.vertices()[0].clone();
        let value = q.eval(&x);
        let better = match &best {
            None => true,
            Some((bv, bx)) => value < *bv || (value == *bv && x < *bx),
        };
        if better {
            best = Some((value, x));
        }
    }
    Ok(best.expect("a polytope has at least one face"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{point, rat, ratio};
    use proptest::prelude::*;

    fn id2() -> QuadraticForm {
        QuadraticForm::from_gram(vec![point(&[1, 0]), point(&[0, 1])]).unwrap()
    }

    #[test]
    fn edge_projection() {
        let edge = RationalPolytope::from_vertices(vec![point(&[2, -1]), point(&[-1, 2])]).unwrap();
        let (v, x) = min_quadratic_over_polytope(&edge, &id2()).unwrap();
        assert_eq!(v, ratio(1, 2));
        assert_eq!(x, vec![ratio(1, 2), ratio(1, 2)]);
        let vtx = RationalPolytope::point(point(&[2, -1]));
        assert_eq!(min_quadratic_over_polytope(&vtx, &id2()).unwrap().0, rat(5));
        assert_eq!(QuadraticForm::from_gram(vec![point(&[-1])]).unwrap_err(), Error::NotPSD);
    }

    #[test]
    fn degenerate_form_ties_break_lexicographically() {
        let q = QuadraticForm::from_gram(vec![point(&[0, 0]), point(&[0, 1])]).unwrap();
        let (v, x) = min_quadratic_over_polytope(&RationalPolytope::cube(2), &q).unwrap();
        assert_eq!(v, rat(0));
        assert_eq!(x, point(&[0, 0]));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(30))]

        #[test]
        fn beats_grid_search(
            a in proptest::collection::vec(-2i64..=2, 4),
            b in proptest::collection::vec(-3i64..=3, 2),
            pts in proptest::collection::vec(-2i64..=2, 8),
        ) {
            // Q = AᵀA is PSD.
            let q00 = a[0] * a[0] + a[2] * a[2];
            let q01 = a[0] * a[1] + a[2] * a[3];
            let q11 = a[1] * a[1] + a[3] * a[3];
            let q = QuadraticForm::new(vec![point(&[q00, q01]), point(&[q01, q11])], point(&b), rat(0)).unwrap();
            let vs: Vec<Point> = pts.chunks(2).map(point).collect();
            let p = RationalPolytope::from_vertices(vs).unwrap();
            let (v, x) = min_quadratic_over_polytope(&p, &q).unwrap();
            prop_assert!(p.contains(&x));
            prop_assert_eq!(q.eval(&x), v.clone());
            for u in p.vertices() {
                prop_assert!(q.eval(u) >= v);
            }
            let n = 8;
            for i in -2 * n..=2 * n {
                for j in -2 * n..=2 * n {
                    let y = vec![ratio(i, n), ratio(j, n)];
                    if p.contains(&y) {
                        prop_assert!(q.eval(&y) >= v);
                    }
                }
            }
        }
    }
}
