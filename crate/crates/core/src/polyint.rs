//! Exact integration of polynomials, symmetric multilinear forms and
//! roof-composed integrands over rational polytopes.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{check_dim, Error, Result};
use crate::linalg::abs_det;
use crate::poly::Polynomial;
use crate::polytope::{RationalPolytope, Simplex};
use crate::rational::{binomial, factorial, Point, Rational};
use crate::roofs::AdelicPolytope;

fn fact(n: u32) -> Rational {
    Rational::from_integer(factorial(n as usize))
}

/// `∫_S f`, pulling `f` back to the standard simplex.
pub fn integrate_over_simplex(s: &Simplex, f: &Polynomial) -> Rational {
    let t = s.ambient_dim();
    assert_eq!(f.nvars(), t, "polynomial arity");
    if s.vertices.len() != t + 1 || f.is_zero() {
        return Rational::zero();
    }
    let jac = abs_det(&s.edge_matrix());
    if jac.is_zero() {
        return jac;
    }
    let v0 = &s.vertices[0];
    let edges = s.edge_matrix();
    // x_i = v0_i + Σ_j u_j (v_j - v0)_i
    let images: Vec<Polynomial> = (0..t)
        .map(|i| {
            let grad: Point = edges.iter().map(|e| e[i].clone()).collect();
            Polynomial::affine(&grad, &v0[i])
        })
        .collect();
    let g = if t == 0 { f.clone() } else { f.compose(&images) };
    let mut total = Rational::zero();
    for (e, c) in g.terms() {
        let num: Rational = e.iter().map(|&a| fact(a)).product();
        let deg: u32 = e.iter().sum();
        total += c * num / fact(deg + t as u32);
    }
    total * jac
}

/// `∫_S x^α dx`.
pub fn integrate_monomial_simplex(s: &Simplex, exponents: &[u32]) -> Result<Rational> {
    check_dim(s.ambient_dim(), exponents.len())?;
    Ok(integrate_over_simplex(s, &Polynomial::monomial(exponents.to_vec(), Rational::one())))
}

/// `∫_P f` over the full-dimensional volume; zero for lower-dimensional `P`.
pub fn integrate_polynomial(p: &RationalPolytope, f: &Polynomial) -> Result<Rational> {
    check_dim(p.ambient_dim(), f.nvars())?;
    if !p.is_full_dimensional() {
        return Ok(Rational::zero());
    }
    Ok(p.triangulate().iter().map(|s| integrate_over_simplex(s, f)).sum())
}

/// A symmetric `r`-linear form on `Q^dim`; the coefficient of the index
/// tuple `(i_1, …, i_r)` is stored once under its sorted form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricForm {
    dim: usize,
    arity: usize,
    coeffs: BTreeMap<Vec<usize>, Rational>,
}

impl SymmetricForm {
    pub fn new(dim: usize, arity: usize, entries: impl IntoIterator<Item = (Vec<usize>, Rational)>) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (mut idx, c) in entries {
            if idx.len() != arity || idx.iter().any(|&i| i >= dim) {
                return Err(Error::InvalidInput(format!("bad form index {idx:?}")));
            }
            idx.sort_unstable();
            if let Some(old) = coeffs.get(&idx) {
                if *old != c {
                    return Err(Error::InvalidInput(format!("form is not symmetric at {idx:?}")));
                }
            }
            if !c.is_zero() {
                coeffs.insert(idx, c);
            }
        }
        Ok(SymmetricForm { dim, arity, coeffs })
    }

    /// Reads a full row-major tensor with `dim^arity` entries.
    pub fn from_tensor(dim: usize, arity: usize, entries: &[Rational]) -> Result<Self> {
        if entries.len() != dim.pow(arity as u32) {
            return Err(Error::InvalidInput(format!("expected {} tensor entries", dim.pow(arity as u32))));
        }
        let items = entries.iter().enumerate().map(|(flat, c)| {
            let mut idx = vec![0; arity];
            let mut rest = flat;
            for slot in idx.iter_mut().rev() {
                *slot = rest % dim;
                rest /= dim;
            }
            (idx, c.clone())
        });
        Self::new(dim, arity, items)
    }

    pub fn dot_product(dim: usize) -> Self {
        Self::new(dim, 2, (0..dim).map(|i| (vec![i, i], Rational::one()))).expect("valid")
    }

    /// The unique symmetric form with `H(m, …, m) = f(m)` for homogeneous `f`.
    pub fn polarization(f: &Polynomial) -> Result<Self> {
        let dim = f.nvars();
        let r = f.degree() as usize;
        let mut entries = Vec::new();
        for (e, c) in f.terms() {
            if e.iter().sum::<u32>() as usize != r {
                return Err(Error::InvalidInput("polynomial is not homogeneous".into()));
            }
            let idx: Vec<usize> = e.iter().enumerate().flat_map(|(i, &k)| std::iter::repeat_n(i, k as usize)).collect();
            let perms: Rational = e.iter().map(|&k| fact(k)).product::<Rational>() / fact(r as u32);
            entries.push((idx, c * perms));
        }
        Self::new(dim, r, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn eval(&self, args: &[Point]) -> Result<Rational> {
        if args.len() != self.arity {
            return Err(Error::WrongArity { expected: self.arity, got: args.len() });
        }
        for a in args {
            check_dim(self.dim, a.len())?;
        }
        let mut total = Rational::zero();
        let mut idx = vec![0usize; self.arity];
        loop {
            let mut key = idx.clone();
            key.sort_unstable();
            if let Some(c) = self.coeffs.get(&key) {
                let mut term = c.clone();
                for (a, &i) in args.iter().zip(&idx) {
                    term *= &a[i];
                }
                total += term;
            }
            // Odometer over all index tuples.
            let mut k = 0;
            while k < self.arity {
                idx[k] += 1;
                if idx[k] < self.dim {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == self.arity {
                return Ok(total);
            }
        }
    }

    /// `m ↦ H(m, …, m)`.
    pub fn diagonal(&self) -> Polynomial {
        let mut p = Polynomial::zero(self.dim);
        for (idx, c) in &self.coeffs {
            let mut e = vec![0u32; self.dim];
            for &i in idx {
                e[i] += 1;
            }
            let count: Rational = fact(self.arity as u32) / e.iter().map(|&k| fact(k)).product::<Rational>();
            p.add_term(e, c * count);
        }
        p
    }
}

/// `vol(S)/C(t+r, r) · Σ_{i_1 ≤ … ≤ i_r} H(v_{i_1}, …, v_{i_r})`.
pub fn integrate_symmetric_form_simplex(s: &Simplex, h: &SymmetricForm, r: usize) -> Result<Rational> {
    if h.arity != r {
        return Err(Error::ArityMismatch { form: h.arity, requested: r });
    }
    let t = s.ambient_dim();
    check_dim(h.dim, t)?;
    let vol = s.volume();
    if vol.is_zero() {
        return Ok(vol);
    }
    let n = s.vertices.len();
    let mut total = Rational::zero();
    let mut idx = vec![0usize; r];
    loop {
        let args: Vec<Point> = idx.iter().map(|&i| s.vertices[i].clone()).collect();
        total += h.eval(&args)?;
        // Next nondecreasing tuple.
        let mut k = r;
        loop {
            if k == 0 {
                let denom = Rational::from_integer(binomial(t + r, r));
                return Ok(vol * total / denom);
            }
            k -= 1;
            if idx[k] + 1 < n {
                let v = idx[k] + 1;
                for slot in idx[k..].iter_mut() {
                    *slot = v;
                }
                break;
            }
        }
    }
}

/// `∫_Δ f(m, θ(m)) dm` for the global roof `θ` of `P`.
pub fn integrate_roof_composite(p: &AdelicPolytope, f: &Polynomial) -> Result<Rational> {
    let t = p.dim();
    check_dim(t + 1, f.nvars())?;
    if !p.base().is_full_dimensional() {
        return Ok(Rational::zero());
    }
    let theta = p.global_roof();
    let mut total = Rational::zero();
    for (cell, piece) in theta.cells().iter().zip(theta.pieces()) {
        let mut images: Vec<Polynomial> = (0..t).map(|i| Polynomial::var(t, i)).collect();
        images.push(Polynomial::affine(&piece.gradient, &piece.constant));
        total += integrate_polynomial(cell, &f.compose(&images))?;
    }
    Ok(total)
}

/// Exact integral of `max(ℓ, 0)` for an affine `ℓ(x) = g·x + c` over `P`.
pub fn integrate_positive_part(p: &RationalPolytope, gradient: &[Rational], constant: &Rational) -> Result<Rational> {
    check_dim(p.ambient_dim(), gradient.len())?;
    let cut = crate::polytope::Halfspace::new(gradient.iter().map(|x| -x).collect(), constant.clone());
    let piece = match p.intersect(&[cut]) {
        Ok(q) => q,
        Err(Error::EmptyRegion) => return Ok(Rational::zero()),
        Err(e) => return Err(e),
    };
    integrate_polynomial(&piece, &Polynomial::affine(gradient, constant))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{point, rat, ratio};
    use crate::rational::{add, dot};
    use crate::roofs::{build_roof, Roof};
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn centroid_rule(s: &Simplex, gradient: &[Rational], constant: &Rational) -> Rational {
        let t = s.ambient_dim();
        let sum = s.vertices.iter().fold(vec![Rational::zero(); t], |acc, v| add(&acc, v));
        let n = Rational::from_integer(BigInt::from(t + 1));
        s.volume() * (dot(gradient, &sum) / &n + constant)
    }

    fn unit2() -> Simplex {
        Simplex { vertices: vec![point(&[0, 0]), point(&[1, 0]), point(&[0, 1])] }
    }

    fn cl_triangle() -> RationalPolytope {
        RationalPolytope::from_vertices(vec![point(&[-1, -1]), point(&[2, -1]), point(&[-1, 2])]).unwrap()
    }

    #[test]
    fn monomials_on_unit_simplex() {
        assert_eq!(integrate_monomial_simplex(&unit2(), &[1, 1]).unwrap(), ratio(1, 24));
        assert_eq!(integrate_monomial_simplex(&unit2(), &[0, 0]).unwrap(), ratio(1, 2));
        let flat = Simplex { vertices: vec![point(&[0, 0]), point(&[1, 1]), point(&[2, 2])] };
        assert_eq!(integrate_monomial_simplex(&flat, &[2, 0]).unwrap(), rat(0));
    }

    #[test]
    fn polynomial_examples() {
        let f = Polynomial::parse("x^2 + y^2", &["x", "y"]).unwrap();
        assert_eq!(integrate_polynomial(&cl_triangle(), &f).unwrap(), ratio(9, 2));
        let one = Polynomial::one(2);
        assert_eq!(integrate_polynomial(&cl_triangle(), &one).unwrap(), cl_triangle().volume());
        let pt = RationalPolytope::point(point(&[1, 1]));
        assert_eq!(integrate_polynomial(&pt, &f).unwrap(), rat(0));
        assert_eq!(integrate_polynomial(&pt, &Polynomial::one(3)).unwrap_err().name(), "DimensionMismatch");
    }

    #[test]
    fn symmetric_form_examples() {
        let seg = Simplex { vertices: vec![point(&[-1]), point(&[1])] };
        let h = SymmetricForm::dot_product(1);
        assert_eq!(integrate_symmetric_form_simplex(&seg, &h, 2).unwrap(), ratio(2, 3));
        let tri = Simplex { vertices: cl_triangle().vertices().to_vec() };
        assert_eq!(integrate_symmetric_form_simplex(&tri, &SymmetricForm::dot_product(2), 2).unwrap(), ratio(9, 2));
        let lin = SymmetricForm::new(2, 1, [(vec![0], rat(3)), (vec![1], rat(-1))]).unwrap();
        let expect = centroid_rule(&tri, &[rat(3), rat(-1)], &rat(0));
        assert_eq!(integrate_symmetric_form_simplex(&tri, &lin, 1).unwrap(), expect);
        assert_eq!(integrate_symmetric_form_simplex(&tri, &lin, 2).unwrap_err().name(), "ArityMismatch");
        assert!(SymmetricForm::from_tensor(2, 2, &[rat(1), rat(2), rat(3), rat(1)]).is_err());
    }

    #[test]
    fn roof_composite_examples() {
        let d = RationalPolytope::interval(rat(0), rat(2));
        let pts = vec![(point(&[0]), rat(0)), (point(&[1]), rat(1)), (point(&[2]), rat(0))];
        let p = AdelicPolytope::single("v", build_roof(&d, &pts).unwrap()).unwrap();
        let s = Polynomial::var(2, 1);
        assert_eq!(integrate_roof_composite(&p, &s).unwrap(), rat(1));
        assert_eq!(integrate_roof_composite(&p, &s.pow(2)).unwrap(), ratio(2, 3));
        assert_eq!(integrate_roof_composite(&p, &s).unwrap(), p.global_hypograph().volume());
        let flat = AdelicPolytope::single("v", Roof::zero(&d)).unwrap();
        assert_eq!(integrate_roof_composite(&flat, &Polynomial::var(2, 0)).unwrap(), rat(2));
    }

    #[test]
    fn positive_part() {
        let d = RationalPolytope::interval(rat(-1), rat(1));
        assert_eq!(integrate_positive_part(&d, &[rat(1)], &rat(0)).unwrap(), ratio(1, 2));
        assert_eq!(integrate_positive_part(&d, &[rat(0)], &rat(-1)).unwrap(), rat(0));
    }

    fn small() -> impl Strategy<Value = i64> {
        -3i64..=3
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn form_matches_diagonal(
            dim in 1usize..=3,
            arity in 1usize..=4,
            coords in proptest::collection::vec(small(), 12),
            seeds in proptest::collection::vec(small(), 81),
        ) {
            let verts: Vec<Point> = (0..=dim).map(|i| coords[i * 3..i * 3 + dim].iter().map(|&x| rat(x)).collect()).collect();
            let s = Simplex { vertices: verts };
            let n = dim.pow(arity as u32);
            let tensor_idx = |flat: usize| {
                let mut idx = vec![0; arity];
                let mut rest = flat;
                for slot in idx.iter_mut().rev() { *slot = rest % dim; rest /= dim; }
                idx.sort_unstable();
                idx
            };
            let mut by_key: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
            for flat in 0..n {
                let key = tensor_idx(flat);
                let next = rat(seeds[by_key.len() % seeds.len()]);
                by_key.entry(key).or_insert(next);
            }
            let h = SymmetricForm::new(dim, arity, by_key).unwrap();
            let lhs = integrate_symmetric_form_simplex(&s, &h, arity).unwrap();
            let rhs = integrate_over_simplex(&s, &h.diagonal());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn additivity_over_triangulation(coords in proptest::collection::vec(small(), 10), e0 in 0u32..3, e1 in 0u32..3) {
            let pts: Vec<Point> = coords.chunks(2).map(|c| vec![rat(c[0]), rat(c[1])]).collect();
            let Ok(p) = RationalPolytope::from_vertices(pts) else { return Ok(()); };
            let f = Polynomial::monomial(vec![e0, e1], rat(1));
            let whole = integrate_polynomial(&p, &f).unwrap();
            let parts: Rational = if p.is_full_dimensional() {
                p.triangulate().iter().map(|s| integrate_monomial_simplex(s, &[e0, e1]).unwrap()).sum()
            } else { rat(0) };
            prop_assert_eq!(whole, parts);
        }

        #[test]
        fn affine_equivariance(a in proptest::collection::vec(small(), 4), b in proptest::collection::vec(small(), 2)) {
            let m = [vec![rat(a[0]), rat(a[1])], vec![rat(a[2]), rat(a[3])]];
            let det = crate::linalg::det(&m);
            prop_assume!(!det.is_zero());
            let p = cl_triangle();
            let image = RationalPolytope::from_vertices(
                p.vertices().iter().map(|v| add(&crate::linalg::mat_vec(&m, v), &[rat(b[0]), rat(b[1])])).collect(),
            ).unwrap();
            let f = Polynomial::parse("x^2*y - 3*y + 1", &["x", "y"]).unwrap();
            let images: Vec<Polynomial> = (0..2)
                .map(|i| Polynomial::affine(&m[i], &rat(b[i])))
                .collect();
            let pulled = f.compose(&images);
            let lhs = integrate_polynomial(&p, &pulled).unwrap();
            let rhs = integrate_polynomial(&image, &f).unwrap() / crate::rational::abs(&det);
            prop_assert_eq!(lhs, rhs);
        }
    }
}
