//! Exact multivariate polynomials over `Q`.
//!
//! Monomials are ordered graded-lexicographically: lower total degree first,
//! and within one degree the exponent vectors run in descending lexicographic
//! order, so the degree-2 basis in two variables is `x1^2, x1*x2, x2^2`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::torus::TorusMap;

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(num_vars: usize) -> Self {
        Monomial(vec![0; num_vars])
    }

    pub fn var(num_vars: usize, i: usize) -> Self {
        let mut e = vec![0; num_vars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn num_vars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Degree when variable `i` carries weight `weights[i]`.
    pub fn weighted_degree(&self, weights: &[u32]) -> u32 {
        self.0.iter().zip(weights).map(|(e, w)| e * w).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other` when `other` divides `self`.
    pub fn divide(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }

    fn fmt_with(&self, names: &[String], f: &mut impl fmt::Write) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_char('*')?;
            }
            first = false;
            f.write_str(&names[i])?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        if first {
            f.write_char('1')?;
        }
        Ok(())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All monomials of total degree `d` in `num_vars` variables, in the fixed order.
pub fn monomials_of_degree(num_vars: usize, d: u32) -> Vec<Monomial> {
    weighted_monomials(&vec![1; num_vars], d)
}

/// All exponent vectors `a` with `sum a_i * weights[i] == d`, in descending
/// lexicographic order. Every weight must be positive.
pub fn weighted_monomials(weights: &[u32], d: u32) -> Vec<Monomial> {
    fn go(weights: &[u32], d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        match weights.split_first() {
            None => {
                if d == 0 {
                    out.push(Monomial(prefix.clone()));
                }
            }
            Some((&w, rest)) => {
                for a in (0..=d / w).rev() {
                    prefix.push(a);
                    go(rest, d - a * w, prefix, out);
                    prefix.pop();
                }
            }
        }
    }
    debug_assert!(weights.iter().all(|&w| w > 0));
    let mut out = Vec::new();
    go(weights, d, &mut Vec::with_capacity(weights.len()), &mut out);
    out
}

/// Sparse polynomial with rational coefficients; no stored coefficient is zero.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polynomial {
    num_vars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(num_vars: usize) -> Self {
        Polynomial {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(num_vars: usize) -> Self {
        Self::constant(num_vars, Rational::one())
    }

    pub fn constant(num_vars: usize, c: Rational) -> Self {
        let mut p = Self::zero(num_vars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(num_vars), c);
        }
        p
    }

    pub fn var(num_vars: usize, i: usize) -> Self {
        assert!(i < num_vars, "variable index {i} out of range");
        let mut p = Self::zero(num_vars);
        p.terms.insert(Monomial::var(num_vars, i), Rational::one());
        p
    }

    /// Sums the given terms; zero coefficients are dropped.
    pub fn from_terms(num_vars: usize, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Self::zero(num_vars);
        for (m, c) in terms {
            assert_eq!(m.num_vars(), num_vars, "monomial has wrong variable count");
            p.add_term(m, c);
        }
        p
    }

    /// Integer linear form `sum coeffs[i] * x_i`.
    pub fn linear_form(coeffs: &[i64]) -> Self {
        let n = coeffs.len();
        Self::from_terms(
            n,
            coeffs
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(i, &c)| (Monomial::var(n, i), rat(c))),
        )
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// True when all terms share one total degree (the zero polynomial counts).
    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn add_scaled(&mut self, other: &Polynomial, s: &Rational) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c * s);
        }
    }

    pub fn scale(&self, s: &Rational) -> Polynomial {
        if s.is_zero() {
            return Polynomial::zero(self.num_vars);
        }
        Polynomial {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.num_vars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.num_vars);
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (x, &e) in point.iter().zip(m.exponents()) {
                for _ in 0..e {
                    v *= x;
                }
            }
            total += v;
        }
        total
    }

    /// Multiplies every exponent by `k`; `e_i(x)` becomes `e_i(x^k)`.
    pub fn dilate(&self, k: u32) -> Polynomial {
        Polynomial {
            num_vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (Monomial(m.exponents().iter().map(|e| e * k).collect()), c.clone()))
                .collect(),
        }
    }

    /// Re-embeds into `total` variables, variable `i` becoming `offset + i`.
    pub fn lift(&self, offset: usize, total: usize) -> Polynomial {
        assert!(offset + self.num_vars <= total);
        Polynomial {
            num_vars: total,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut e = vec![0; total];
                    e[offset..offset + self.num_vars].copy_from_slice(m.exponents());
                    (Monomial(e), c.clone())
                })
                .collect(),
        }
    }

    /// Replaces variable `i` by `values[i]`; all values share one variable count.
    pub fn compose(&self, values: &[Polynomial]) -> Result<Polynomial> {
        if values.len() != self.num_vars {
            return Err(Error::DimensionMismatch(format!(
                "composition needs {} polynomials, got {}",
                self.num_vars,
                values.len()
            )));
        }
        let target = match values.first() {
            Some(v) => v.num_vars,
            None => {
                // Constant polynomial in zero variables.
                return Ok(self.clone());
            }
        };
        if values.iter().any(|v| v.num_vars != target) {
            return Err(Error::DimensionMismatch(
                "composition values have differing variable counts".into(),
            ));
        }
        let mut powers: Vec<Vec<Polynomial>> = values.iter().map(|_| vec![Polynomial::one(target)]).collect();
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut prod = Polynomial::constant(target, c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap() * &values[i];
                    powers[i].push(next);
                }
                prod = &prod * &powers[i][e as usize];
            }
            out.add_scaled(&prod, &Rational::one());
        }
        Ok(out)
    }

    /// Substitutes `x_i = sum_j m[i][j] * y_j` for every ambient coordinate.
    pub fn substitute_linear(&self, m: &TorusMap) -> Result<Polynomial> {
        if m.ambient_rank() != self.num_vars {
            return Err(Error::DimensionMismatch(format!(
                "polynomial in {} variables, torus map has {} rows",
                self.num_vars,
                m.ambient_rank()
            )));
        }
        let forms: Vec<Polynomial> = m.rows().iter().map(|r| Polynomial::linear_form(r)).collect();
        if forms.is_empty() {
            return Ok(Polynomial::constant(
                m.sub_rank(),
                self.coefficient(&Monomial::one(0)),
            ));
        }
        self.compose(&forms)
    }

    /// Renders with the given variable names, terms in ascending monomial order.
    pub fn fmt_with_names(&self, names: &[String]) -> String {
        let mut s = String::new();
        if self.terms.is_empty() {
            return "0".to_string();
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let a = c.abs();
            if m.is_one() {
                s.push_str(&a.to_string());
            } else {
                if !a.is_one() {
                    s.push_str(&a.to_string());
                    s.push('*');
                }
                m.fmt_with(names, &mut s).expect("writing to a String");
            }
        }
        s
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.num_vars).map(|i| format!("x{i}")).collect();
        f.write_str(&self.fmt_with_names(&names))
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.num_vars, rhs.num_vars);
        let mut out = self.clone();
        out.add_scaled(rhs, &Rational::one());
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.num_vars, rhs.num_vars);
        let mut out = self.clone();
        out.add_scaled(rhs, &-Rational::one());
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.num_vars, rhs.num_vars);
        let mut acc: HashMap<Monomial, Rational> = HashMap::with_capacity(self.terms.len() * rhs.terms.len());
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                let c = c1 * c2;
                acc.entry(m1.mul(m2)).and_modify(|x| *x += &c).or_insert(c);
            }
        }
        Polynomial {
            num_vars: self.num_vars,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }
}

/// `e_i(x_1, …, x_n)`, the sum of all square-free monomials of degree `i`.
pub fn elementary_symmetric(num_vars: usize, i: u32) -> Result<Polynomial> {
    if i == 0 || i as usize > num_vars {
        return Err(Error::IndexOutOfRange {
            index: i,
            max: num_vars as u32,
        });
    }
    let terms = monomials_of_degree(num_vars, i)
        .into_iter()
        .filter(|m| m.exponents().iter().all(|&e| e <= 1))
        .map(|m| (m, Rational::one()));
    Ok(Polynomial::from_terms(num_vars, terms))
}

/// Coordinates of a homogeneous polynomial in the ordered degree-`degree` basis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradedVector {
    pub num_vars: usize,
    pub degree: u32,
    pub coords: Vec<Rational>,
}

impl GradedVector {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub(crate) fn to_sparse(&self) -> crate::linalg::SparseVec {
        self.coords
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i, c.clone()))
            .collect()
    }
}

pub fn to_graded_vector(p: &Polynomial, d: u32) -> Result<GradedVector> {
    if p.terms.keys().any(|m| m.degree() != d) {
        return Err(Error::NotHomogeneous(d));
    }
    let basis = monomials_of_degree(p.num_vars, d);
    let index: HashMap<&Monomial, usize> = basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut coords = vec![Rational::zero(); basis.len()];
    for (m, c) in &p.terms {
        coords[index[m]] = c.clone();
    }
    Ok(GradedVector {
        num_vars: p.num_vars,
        degree: d,
        coords,
    })
}
