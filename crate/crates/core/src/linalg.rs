//! Exact dense linear algebra over the rationals.

use num_traits::{One, Signed, Zero};

use crate::rational::{dot, primitive, sub, Point, Rational};

pub type Matrix = Vec<Vec<Rational>>;

/// Reduced row echelon form. Returns the reduced nonzero rows and the pivot
/// column of each.
pub fn rref(rows: &[Point], ncols: usize) -> (Matrix, Vec<usize>) {
    let mut m: Matrix = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rational::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..ncols {
                    let delta = &f * &m[r][j];
                    m[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[Point], ncols: usize) -> usize {
    rref(rows, ncols).1.len()
}

/// Basis of `{x : rows · x = 0}`, each vector scaled to primitive integers.
pub fn nullspace(rows: &[Point], ncols: usize) -> Vec<Point> {
    let (m, pivots) = rref(rows, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); ncols];
            v[f] = Rational::one();
            for (row, &p) in m.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            primitive(&v)
        })
        .collect()
}

/// Solves `a x = b`. Returns a particular solution and a nullspace basis, or
/// `None` when the system is inconsistent.
pub fn solve(a: &[Point], b: &[Rational], ncols: usize) -> Option<(Point, Vec<Point>)> {
    let aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (m, pivots) = rref(&aug, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![Rational::zero(); ncols];
    for (row, &p) in m.iter().zip(&pivots) {
        x[p] = row[ncols].clone();
    }
    Some((x, nullspace(a, ncols)))
}

pub fn det(m: &[Point]) -> Rational {
    let n = m.len();
    let mut a: Matrix = m.to_vec();
    let mut d = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= &a[c][c];
        for i in c + 1..n {
            if !a[i][c].is_zero() {
                let f = &a[i][c] / &a[c][c];
                for j in c..n {
                    let delta = &f * &a[c][j];
                    a[i][j] -= delta;
                }
            }
        }
    }
    d
}

pub fn inverse(m: &[Point]) -> Option<Matrix> {
    let n = m.len();
    let aug: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let (r, pivots) = rref(&aug, 2 * n);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    Some(r.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn transpose(m: &[Point], ncols: usize) -> Matrix {
    (0..ncols)
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn mat_vec(m: &[Point], v: &[Rational]) -> Point {
    m.iter().map(|row| dot(row, v)).collect()
}

/// The affine hull of a finite point set, with a coordinate chart.
///
/// The chart projects onto the pivot coordinates of the direction space,
/// which is an affine isomorphism from the hull onto `Q^k`.
#[derive(Debug, Clone)]
pub struct AffineHull {
    pub ambient: usize,
    pub origin: Point,
    /// Direction basis in reduced row echelon form.
    pub directions: Matrix,
    pub pivots: Vec<usize>,
    /// Equations `normal · x = offset` cutting out the hull.
    pub equations: Vec<(Point, Rational)>,
}

impl AffineHull {
    pub fn of(points: &[Point], ambient: usize) -> Self {
        let origin = points[0].clone();
        let diffs: Vec<Point> = points[1..].iter().map(|p| sub(p, &origin)).collect();
        let (directions, pivots) = rref(&diffs, ambient);
        let equations = nullspace(&directions, ambient)
            .into_iter()
            .map(|n| {
                let off = dot(&n, &origin);
                (n, off)
            })
            .collect();
        AffineHull { ambient, origin, directions, pivots, equations }
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn project(&self, x: &[Rational]) -> Point {
        self.pivots.iter().map(|&p| x[p].clone()).collect()
    }

    pub fn lift(&self, y: &[Rational]) -> Point {
        let mut x = self.origin.clone();
        for ((dir, &p), yj) in self.directions.iter().zip(&self.pivots).zip(y) {
            let t = yj - &self.origin[p];
            for (xi, di) in x.iter_mut().zip(dir) {
                *xi += &t * di;
            }
        }
        x
    }

    /// Lifts a chart-space linear functional to the ambient space (zeros off
    /// the pivot coordinates); values agree on the hull.
    pub fn lift_functional(&self, a: &[Rational]) -> Point {
        let mut n = vec![Rational::zero(); self.ambient];
        for (&p, ai) in self.pivots.iter().zip(a) {
            n[p] = ai.clone();
        }
        n
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.equations.iter().all(|(n, c)| &dot(n, x) == c)
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }
}

pub fn abs_det(m: &[Point]) -> Rational {
    det(m).abs()
}

/// Symmetric positive semidefiniteness by exact symmetric elimination.
pub fn is_psd(m: &[Point]) -> bool {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return false;
    }
    for i in 0..n {
        for j in 0..i {
            if m[i][j] != m[j][i] {
                return false;
            }
        }
    }
    let mut a: Matrix = m.to_vec();
    for k in 0..n {
        let d = a[k][k].clone();
        if d.is_negative() {
            return false;
        }
        if d.is_zero() {
            if a[k][k + 1..].iter().any(|x| !x.is_zero()) {
                return false;
            }
            continue;
        }
        for i in k + 1..n {
            let f = &a[i][k] / &d;
            for j in k..n {
                let delta = &f * &a[k][j];
                a[i][j] -= delta;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{point, rat};

    #[test]
    fn determinant_and_inverse() {
        let m = vec![point(&[2, 1]), point(&[1, 1])];
        assert_eq!(det(&m), rat(1));
        let inv = inverse(&m).unwrap();
        assert_eq!(inv, vec![point(&[1, -1]), point(&[-1, 2])]);
        assert!(inverse(&[point(&[1, 2]), point(&[2, 4])]).is_none());
    }

    #[test]
    fn solve_reports_inconsistency_and_kernel() {
        let a = vec![point(&[1, 1]), point(&[2, 2])];
        assert!(solve(&a, &[rat(1), rat(3)], 2).is_none());
        let (x, ker) = solve(&a, &[rat(1), rat(2)], 2).unwrap();
        assert_eq!(dot(&a[0], &x), rat(1));
        assert_eq!(ker.len(), 1);
    }

    #[test]
    fn affine_hull_chart_roundtrip() {
        let pts = vec![point(&[1, 0, 2]), point(&[0, 1, 2]), point(&[0, 0, 2])];
        let h = AffineHull::of(&pts, 3);
        assert_eq!(h.dim(), 2);
        for p in &pts {
            assert!(h.contains(p));
            assert_eq!(&h.lift(&h.project(p)), p);
        }
    }

    #[test]
    fn psd_check() {
        assert!(is_psd(&[point(&[2, 1]), point(&[1, 1])]));
        assert!(is_psd(&[point(&[1, 1]), point(&[1, 1])]));
        assert!(is_psd(&[point(&[0, 0]), point(&[0, 3])]));
        assert!(!is_psd(&[point(&[1, 2]), point(&[2, 1])]));
        assert!(!is_psd(&[point(&[0, 1]), point(&[1, 0])]));
        assert!(!is_psd(&[point(&[1, 1]), point(&[0, 1])]));
        assert!(!is_psd(&[point(&[-1])]));
    }
}
