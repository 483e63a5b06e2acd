//! Sparse multivariate polynomials with rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{parse_rational, Rational};

pub type Exponents = Vec<u32>;

/// A polynomial in `nvars` variables; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Exponents, Rational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, Rational::one())
    }

    pub fn monomial(exponents: Exponents, c: Rational) -> Self {
        let mut p = Self::zero(exponents.len());
        p.add_term(exponents, c);
        p
    }

    /// `gradient · x + constant`.
    pub fn affine(gradient: &[Rational], constant: &Rational) -> Self {
        let n = gradient.len();
        let mut p = Self::constant(n, constant.clone());
        for (i, g) in gradient.iter().enumerate() {
            p = p + Self::var(n, i).scaled(g);
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponents, Rational)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent length");
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Exponents, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn coefficient(&self, e: &[u32]) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, e: Exponents, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        assert_eq!(x.len(), self.nvars);
        let mut total = Rational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    term *= xi;
                }
            }
            total += term;
        }
        total
    }

    /// Substitutes variable `i` by the polynomial `images[i]` (all images in
    /// a common ring).
    pub fn compose(&self, images: &[Polynomial]) -> Polynomial {
        assert_eq!(images.len(), self.nvars);
        let target = images.first().map(|p| p.nvars).unwrap_or(0);
        let mut powers: Vec<Vec<Polynomial>> = images.iter().map(|p| vec![Polynomial::one(p.nvars)]).collect();
        let mut out = Polynomial::zero(target);
        for (e, c) in &self.terms {
            let mut term = Polynomial::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().expect("nonempty") * &images[i];
                    powers[i].push(next);
                }
                term = &term * &powers[i][k as usize];
            }
            out = out + term;
        }
        out
    }

    /// Parses expressions such as `3/2*x^2*y - y + 1`. Variables are looked
    /// up by name in `vars`.
    pub fn parse(src: &str, vars: &[&str]) -> Result<Self> {
        let n = vars.len();
        let cleaned: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(Error::InvalidInput("empty polynomial".into()));
        }
        let mut out = Polynomial::zero(n);
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        for (i, ch) in cleaned.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 && !cur.is_empty() {
                terms.push((neg, std::mem::take(&mut cur)));
                neg = ch == '-';
            } else if (ch == '+' || ch == '-') && cur.is_empty() {
                if ch == '-' {
                    neg = !neg;
                }
            } else {
                cur.push(ch);
            }
        }
        if cur.is_empty() {
            return Err(Error::InvalidInput(format!("dangling sign in polynomial '{src}'")));
        }
        terms.push((neg, cur));
        for (neg, term) in terms {
            let mut coef = if neg { -Rational::one() } else { Rational::one() };
            let mut e = vec![0u32; n];
            // A leading "p/q" coefficient may contain '/', so split on '*'.
            for factor in term.split('*') {
                if factor.is_empty() {
                    return Err(Error::InvalidInput(format!("empty factor in '{term}'")));
                }
                let (base, exp) = match factor.split_once('^') {
                    Some((b, k)) => {
                        let k: u32 = k
                            .parse()
                            .map_err(|_| Error::InvalidInput(format!("bad exponent in '{factor}'")))?;
                        (b, k)
                    }
                    None => (factor, 1),
                };
                if let Some(i) = vars.iter().position(|v| *v == base) {
                    e[i] += exp;
                } else if let Some(c) = parse_rational(base) {
                    for _ in 0..exp {
                        coef *= &c;
                    }
                } else {
                    return Err(Error::InvalidInput(format!("unknown symbol '{base}'")));
                }
            }
            out.add_term(e, coef);
        }
        Ok(out)
    }

    pub fn to_string_with(&self, vars: &[&str]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let mut factors: Vec<String> = Vec::new();
            let mag = c.abs();
            if !mag.is_one() || e.iter().all(|&x| x == 0) {
                factors.push(mag.to_string());
            }
            for (i, &x) in e.iter().enumerate() {
                match x {
                    0 => {}
                    1 => factors.push(vars[i].to_string()),
                    _ => factors.push(format!("{}^{}", vars[i], x)),
                }
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if k == 0 {
                if c.is_negative() {
                    s.push('-');
                }
            } else {
                s.push_str(&format!(" {sign} "));
            }
            s.push_str(&factors.join("*"));
        }
        s
    }
}

/// Default variable names `x1..xn`, or `x,y,z` for up to three variables.
pub fn default_var_names(n: usize) -> Vec<String> {
    if n <= 3 {
        ["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_var_names(self.nvars);
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        f.write_str(&self.to_string_with(&refs))
    }
}

impl std::ops::Add for Polynomial {
    type Output = Polynomial;
    fn add(mut self, rhs: Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars);
        for (e, c) in rhs.terms {
            self.add_term(e, c);
        }
        self
    }
}

impl std::ops::Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        self + rhs.scaled(&-Rational::one())
    }
}

impl std::ops::Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = Polynomial::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    #[test]
    fn parse_roundtrip() {
        let p = Polynomial::parse("x^2 + y^2", &["x", "y"]).unwrap();
        assert_eq!(p.terms().len(), 2);
        let q = Polynomial::parse("3/2*x^2*y - y + 1", &["x", "y"]).unwrap();
        assert_eq!(q.coefficient(&[2, 1]), ratio(3, 2));
        assert_eq!(q.coefficient(&[0, 1]), rat(-1));
        let back = Polynomial::parse(&q.to_string_with(&["x", "y"]), &["x", "y"]).unwrap();
        assert_eq!(back, q);
        assert!(Polynomial::parse("x + w", &["x"]).is_err());
        assert_eq!(Polynomial::parse("-x", &["x"]).unwrap().coefficient(&[1]), rat(-1));
    }

    #[test]
    fn compose_with_affine() {
        // f(x) = x^2, x = 2u + 1
        let f = Polynomial::parse("x^2", &["x"]).unwrap();
        let g = f.compose(&[Polynomial::affine(&[rat(2)], &rat(1))]);
        assert_eq!(g, Polynomial::parse("4*x^2 + 4*x + 1", &["x"]).unwrap());
    }
}
