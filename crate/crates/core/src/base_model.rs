//! Graded commutative rings presented by a degree table: the arithmetic
//! classes of the base, the flat classes `ĉ(m)`, and the marker `[∞]`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{check_dim, Error, Result};
use crate::linalg::is_psd;
use crate::poly::Polynomial;
use crate::rational::{fmt_rational, Point, Rational};

pub type Monomial = Vec<u32>;

/// Input for [`build_ring`].
#[derive(Debug, Clone, PartialEq)]
pub struct RingSpec {
    /// Generator names and grades.
    pub generators: Vec<(String, u32)>,
    /// Name of the `[∞]` generator.
    pub infinity: String,
    pub top_degree: u32,
    /// Values of top-degree monomials.
    pub table: Vec<(Monomial, Rational)>,
    /// Monomials generating the ideal of structural zeros.
    pub zeros: Vec<Monomial>,
    /// Row `j` gives `ĉ(e_j)` as coefficients over the generators.
    pub lattice_map: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseRing {
    names: Vec<String>,
    grades: Vec<u32>,
    infinity: usize,
    top_degree: u32,
    table: BTreeMap<Monomial, Rational>,
    zeros: Vec<Monomial>,
    lattice_map: Vec<RingElement>,
}

/// A homogeneous element in normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingElement {
    grade: u32,
    terms: BTreeMap<Monomial, Rational>,
}

impl RingElement {
    pub fn grade(&self) -> u32 {
        self.grade
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Every exponent vector of the given weighted degree.
fn monomials_of_grade(grades: &[u32], grade: u32) -> Vec<Monomial> {
    fn rec(grades: &[u32], k: usize, left: u32, cur: &mut Monomial, out: &mut Vec<Monomial>) {
        if k == grades.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let mut e = 0;
        loop {
            cur[k] = e;
            rec(grades, k + 1, left - e * grades[k], cur, out);
            if (e + 1) * grades[k] > left {
                break;
            }
            e += 1;
        }
        cur[k] = 0;
    }
    let mut out = Vec::new();
    rec(grades, 0, grade, &mut vec![0; grades.len()], &mut out);
    out
}

/// Parses a monomial over the given generator names (no relations applied).
pub fn parse_monomial(names: &[String], s: &str) -> Result<Monomial> {
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let p = Polynomial::parse(s, &refs)?;
    match p.terms().iter().next() {
        Some((m, c)) if p.terms().len() == 1 && c.is_one() => Ok(m.clone()),
        _ => Err(Error::InvalidInput(format!("'{s}' is not a monomial"))),
    }
}

pub fn build_ring(spec: &RingSpec) -> Result<BaseRing> {
    let n = spec.generators.len();
    let names: Vec<String> = spec.generators.iter().map(|(s, _)| s.clone()).collect();
    let grades: Vec<u32> = spec.generators.iter().map(|(_, g)| *g).collect();
    for (i, name) in names.iter().enumerate() {
        if grades[i] == 0 {
            return Err(Error::GradeMismatch(format!("generator {name} has grade 0")));
        }
        if names[..i].contains(name) {
            return Err(Error::InvalidInput(format!("duplicate generator {name}")));
        }
    }
    let infinity = names
        .iter()
        .position(|s| *s == spec.infinity)
        .ok_or_else(|| Error::InvalidInput(format!("unknown infinity generator {}", spec.infinity)))?;
    if grades[infinity] != 1 {
        return Err(Error::GradeMismatch(format!(
            "infinity generator {} has grade {}",
            spec.infinity, grades[infinity]
        )));
    }
    let mut zeros = Vec::new();
    for z in &spec.zeros {
        check_dim(n, z.len())?;
        zeros.push(z.clone());
    }
    let mut inf2 = vec![0; n];
    inf2[infinity] = 2;
    zeros.push(inf2);
    let mut ring = BaseRing {
        names,
        grades,
        infinity,
        top_degree: spec.top_degree,
        table: BTreeMap::new(),
        zeros,
        lattice_map: Vec::new(),
    };
    for (m, v) in &spec.table {
        check_dim(n, m.len())?;
        let g = ring.monomial_grade(m);
        if g != spec.top_degree {
            return Err(Error::GradeMismatch(format!(
                "table monomial {} has grade {g}, expected {}",
                ring.monomial_name(m),
                spec.top_degree
            )));
        }
        if m[infinity] >= 2 {
            if !v.is_zero() {
                return Err(Error::InfinitySquared(ring.monomial_name(m)));
            }
            continue;
        }
        if ring.is_structural_zero(m) {
            if !v.is_zero() {
                return Err(Error::InvalidInput(format!(
                    "structurally zero monomial {} has value {}",
                    ring.monomial_name(m),
                    fmt_rational(v)
                )));
            }
            continue;
        }
        if let Some(old) = ring.table.insert(m.clone(), v.clone()) {
            if old != *v {
                return Err(Error::InvalidInput(format!("conflicting values for {}", ring.monomial_name(m))));
            }
        }
    }
    for m in monomials_of_grade(&ring.grades, ring.top_degree) {
        if !ring.is_structural_zero(&m) && !ring.table.contains_key(&m) {
            return Err(Error::MissingTableEntry(ring.monomial_name(&m)));
        }
    }
    for (j, row) in spec.lattice_map.iter().enumerate() {
        check_dim(n, row.len())?;
        let mut el = ring.zero(1);
        for (k, c) in row.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if ring.grades[k] != 1 {
                return Err(Error::GradeMismatch(format!(
                    "lattice image of e{} uses generator {} of grade {}",
                    j + 1,
                    ring.names[k],
                    ring.grades[k]
                )));
            }
            el = ring.add(&el, &ring.generator(k).scaled(c))?;
        }
        ring.lattice_map.push(el);
    }
    Ok(ring)
}

impl RingElement {
    pub fn scaled(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return RingElement { grade: self.grade, terms: BTreeMap::new() };
        }
        RingElement { grade: self.grade, terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }
}

impl BaseRing {
    pub fn generator_names(&self) -> &[String] {
        &self.names
    }

    pub fn grades(&self) -> &[u32] {
        &self.grades
    }

    pub fn top_degree(&self) -> u32 {
        self.top_degree
    }

    pub fn lattice_rank(&self) -> usize {
        self.lattice_map.len()
    }

    pub fn table(&self) -> &BTreeMap<Monomial, Rational> {
        &self.table
    }

    /// A spec that rebuilds this ring.
    pub fn spec(&self) -> RingSpec {
        let n = self.names.len();
        let lattice_map = self
            .lattice_map
            .iter()
            .map(|el| {
                let mut row = vec![Rational::zero(); n];
                for (m, c) in &el.terms {
                    let k = m.iter().position(|&e| e == 1).expect("grade-one monomial");
                    row[k] = c.clone();
                }
                row
            })
            .collect();
        RingSpec {
            generators: self.names.iter().cloned().zip(self.grades.iter().copied()).collect(),
            infinity: self.names[self.infinity].clone(),
            top_degree: self.top_degree,
            table: self.table.iter().map(|(m, v)| (m.clone(), v.clone())).collect(),
            zeros: self.zeros[..self.zeros.len() - 1].to_vec(),
            lattice_map,
        }
    }

    pub fn monomial_grade(&self, m: &[u32]) -> u32 {
        m.iter().zip(&self.grades).map(|(e, g)| e * g).sum()
    }

    pub fn is_structural_zero(&self, m: &[u32]) -> bool {
        self.zeros.iter().any(|z| divides(z, m))
    }

    pub fn monomial_name(&self, m: &[u32]) -> String {
        let parts: Vec<String> = m
            .iter()
            .enumerate()
            .filter(|(_, e)| **e > 0)
            .map(|(i, &e)| if e == 1 { self.names[i].clone() } else { format!("{}^{}", self.names[i], e) })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    /// Parses a monomial such as `x1^2*omega`.
    pub fn parse_monomial(&self, s: &str) -> Result<Monomial> {
        parse_monomial(&self.names, s)
    }

    /// Parses a homogeneous polynomial in the generator names.
    pub fn parse_element(&self, s: &str) -> Result<RingElement> {
        let refs: Vec<&str> = self.names.iter().map(String::as_str).collect();
        let p = Polynomial::parse(s, &refs)?;
        let grade = p.terms().keys().map(|m| self.monomial_grade(m)).next().unwrap_or(0);
        let mut el = self.zero(grade);
        for (m, c) in p.terms() {
            if self.monomial_grade(m) != grade {
                return Err(Error::GradeMismatch(format!("'{s}' is not homogeneous")));
            }
            self.push_term(&mut el, m.clone(), c.clone());
        }
        Ok(el)
    }

    fn push_term(&self, el: &mut RingElement, m: Monomial, c: Rational) {
        if c.is_zero() || self.is_structural_zero(&m) {
            return;
        }
        let e = el.terms.entry(m.clone()).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            el.terms.remove(&m);
        }
    }

    pub fn zero(&self, grade: u32) -> RingElement {
        RingElement { grade, terms: BTreeMap::new() }
    }

    pub fn one(&self) -> RingElement {
        let mut el = self.zero(0);
        self.push_term(&mut el, vec![0; self.names.len()], Rational::one());
        el
    }

    pub fn generator(&self, k: usize) -> RingElement {
        let mut m = vec![0; self.names.len()];
        m[k] = 1;
        let mut el = self.zero(self.grades[k]);
        self.push_term(&mut el, m, Rational::one());
        el
    }

    pub fn generator_by_name(&self, name: &str) -> Result<RingElement> {
        let k = self
            .names
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown generator {name}")))?;
        Ok(self.generator(k))
    }

    pub fn infinity(&self) -> RingElement {
        self.generator(self.infinity)
    }

    pub fn add(&self, a: &RingElement, b: &RingElement) -> Result<RingElement> {
        if a.grade != b.grade && !a.is_zero() && !b.is_zero() {
            return Err(Error::GradeMismatch(format!("adding grades {} and {}", a.grade, b.grade)));
        }
        let mut out = if a.is_zero() { b.clone() } else { a.clone() };
        let other = if a.is_zero() { a } else { b };
        for (m, c) in &other.terms {
            self.push_term(&mut out, m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn mul(&self, a: &RingElement, b: &RingElement) -> RingElement {
        let mut out = self.zero(a.grade + b.grade);
        for (m1, c1) in &a.terms {
            for (m2, c2) in &b.terms {
                let m: Monomial = m1.iter().zip(m2).map(|(x, y)| x + y).collect();
                self.push_term(&mut out, m, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, a: &RingElement, k: u32) -> RingElement {
        let mut acc = self.one();
        for _ in 0..k {
            acc = self.mul(&acc, a);
        }
        acc
    }

    /// `ĉ(m) = Σ m_j ĉ(e_j)`.
    pub fn c_hat(&self, m: &[Rational]) -> Result<RingElement> {
        check_dim(self.lattice_map.len(), m.len())?;
        let mut out = self.zero(1);
        for (mj, img) in m.iter().zip(&self.lattice_map) {
            out = self.add(&out, &img.scaled(mj))?;
        }
        Ok(out)
    }

    pub fn lattice_image(&self, j: usize) -> &RingElement {
        &self.lattice_map[j]
    }

    /// The degree functional on top-degree elements.
    pub fn deg(&self, el: &RingElement) -> Result<Rational> {
        if el.grade != self.top_degree && !el.is_zero() {
            return Err(Error::NotTopDegree { expected: self.top_degree, got: el.grade });
        }
        let mut total = Rational::zero();
        for (m, c) in &el.terms {
            let v = self.table.get(m).ok_or_else(|| Error::MissingTableEntry(self.monomial_name(m)))?;
            total += c * v;
        }
        Ok(total)
    }

    pub fn fmt_element(&self, el: &RingElement) -> String {
        if el.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = el
            .terms
            .iter()
            .map(|(m, c)| {
                let name = self.monomial_name(m);
                if c.is_one() {
                    name
                } else if name == "1" {
                    fmt_rational(c)
                } else {
                    format!("{}*{}", fmt_rational(c), name)
                }
            })
            .collect();
        parts.join(" + ")
    }
}

impl fmt::Display for BaseRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.names.iter().zip(&self.grades).map(|(n, g)| format!("{n}:{g}")).collect();
        write!(f, "ring[{}] top degree {}", gens.join(", "), self.top_degree)
    }
}

/// Generator names used by [`abelian_canonical_ring`].
pub fn abelian_generator_names(t: usize) -> Vec<String> {
    let mut names: Vec<String> = (1..=t).map(|i| format!("x{i}")).collect();
    names.push("omega".into());
    names.push("inf".into());
    names
}

/// Ring of an abelian variety of dimension `g` with a symmetric, canonically
/// metrized ample bundle of degree `deg_m`, and flat classes with Gram
/// matrix `gram` for the Néron–Tate pairing.
pub fn abelian_canonical_ring(g: u32, deg_m: &Rational, gram: &[Point]) -> Result<BaseRing> {
    let t = gram.len();
    if g == 0 {
        return Err(Error::BadDimensions("abelian dimension must be positive".into()));
    }
    if gram.iter().any(|r| r.len() != t) {
        return Err(Error::BadDimensions(format!("gram matrix must be {t}x{t}")));
    }
    if !is_psd(gram) {
        return Err(Error::NotPSD);
    }
    if !deg_m.is_positive() {
        return Err(Error::InvalidInput("degree of the polarization must be positive".into()));
    }
    let n = t + 2;
    let (om, inf) = (t, t + 1);
    let mono = |pairs: &[(usize, u32)]| {
        let mut m = vec![0u32; n];
        for &(i, e) in pairs {
            m[i] += e;
        }
        m
    };
    let mut zeros = Vec::new();
    for i in 0..t {
        for j in i..t {
            for k in j..t {
                zeros.push(mono(&[(i, 1), (j, 1), (k, 1)]));
            }
        }
        zeros.push(mono(&[(i, 1), (om, g)]));
        zeros.push(mono(&[(i, 1), (inf, 1)]));
    }
    let coef = -Rational::from_integer(2.into()) * deg_m / Rational::from_integer(g.into());
    let mut table = vec![(mono(&[(om, g + 1)]), Rational::zero()), (mono(&[(inf, 1), (om, g)]), deg_m.clone())];
    for i in 0..t {
        for j in i..t {
            table.push((mono(&[(i, 1), (j, 1), (om, g - 1)]), &coef * &gram[i][j]));
        }
    }
    let lattice_map = (0..t)
        .map(|j| {
            let mut row = vec![Rational::zero(); n];
            row[j] = Rational::one();
            row
        })
        .collect();
    let generators = abelian_generator_names(t).into_iter().map(|s| (s, 1)).collect();
    build_ring(&RingSpec { generators, infinity: "inf".into(), top_degree: g + 1, table, zeros, lattice_map })
}
