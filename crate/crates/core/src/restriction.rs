//! Torus embeddings and the restriction maps they induce on invariant rings.
//!
//! Invariants of a group are handled in generator coordinates: a degree-`d`
//! invariant is a rational combination of the degree-`d` generator
//! monomials (see [`generator_monomials`]). Generators are algebraically
//! independent, so these coordinates are faithful.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::groups::{generator_monomials, invariant_generators, Generator, GroupSpec, Recipe};
use crate::linalg::{self, SparseVec};
use crate::poly::{Monomial, Polynomial, Rational};
use crate::torus::TorusMap;

/// Standard torus embeddings, each producing a [`TorusMap`] from the
/// subgroup torus into the ambient torus.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Embedding {
    Identity {
        rank: usize,
    },
    /// `U(p_1) x … x U(p_k) ⊂ U(total)`, unused ambient coordinates zero.
    UBlocks {
        parts: Vec<u32>,
        total: u32,
    },
    /// `SU(p_1) x … x SU(p_k) ⊂ SU(total)`.
    SuBlocks {
        parts: Vec<u32>,
        total: u32,
    },
    /// `SO(p_1) x … x SO(p_k) ⊂ SO(total)`; parts may be 0 or 1 (rank 0).
    SoBlocks {
        parts: Vec<u32>,
        total: u32,
    },
    /// `Sp(p_1) x … x Sp(p_k) ⊂ Sp(total)`.
    SpBlocks {
        parts: Vec<u32>,
        total: u32,
    },
    /// `SO(n) ⊂ U(n)`: weights `(y_1, −y_1, y_2, −y_2, …)`, a trailing zero for odd `n`.
    SoInU {
        n: u32,
    },
    /// `SO(n) ⊂ SU(n)`, as [`Embedding::SoInU`] in free `SU` coordinates.
    SoInSu {
        n: u32,
    },
    /// `Sp(n) ⊂ U(2n)`: weights `(y_1, −y_1, …, y_n, −y_n)`.
    SpInU {
        n: u32,
    },
    /// `Sp(n) ⊂ SU(2n)`.
    SpInSu {
        n: u32,
    },
    /// `y ↦ (s_1 y, s_2 y, …)` into a product of copies of one torus.
    /// A sign of `−1` is complex conjugation of that copy.
    Diagonal {
        rank: usize,
        signs: Vec<i64>,
    },
    /// Block-diagonal product of embeddings.
    Product(Vec<Embedding>),
}

fn check(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(what.to_string()))
    }
}

/// Places `blocks` (each `rows x cols`) diagonally, then appends zero rows up
/// to `ambient`.
fn padded(blocks: Vec<TorusMap>, ambient: usize) -> Result<TorusMap> {
    let diag = TorusMap::block_diagonal(&blocks);
    check(
        diag.ambient_rank() <= ambient,
        "subgroup blocks exceed the ambient rank",
    )?;
    let mut rows = diag.rows().to_vec();
    rows.resize(ambient, vec![0; diag.sub_rank()]);
    TorusMap::new(ambient, diag.sub_rank(), rows)
}

/// Full `n`-weight vectors of `SU(n)` in its free coordinates.
fn su_full_weights(n: usize) -> TorusMap {
    let mut rows = TorusMap::identity(n - 1).rows().to_vec();
    rows.push(vec![-1; n - 1]);
    TorusMap::new(n, n - 1, rows).expect("consistent shape")
}

/// Drops the last coordinate of a `U(n)` weight map landing in trace-zero weights.
fn drop_last(m: TorusMap) -> Result<TorusMap> {
    let mut rows = m.rows().to_vec();
    rows.pop();
    TorusMap::new(m.ambient_rank() - 1, m.sub_rank(), rows)
}

fn paired_weights(pairs: usize, n: usize) -> Result<TorusMap> {
    let rows = (0..n)
        .map(|i| {
            let mut r = vec![0; pairs];
            if i / 2 < pairs {
                r[i / 2] = if i % 2 == 0 { 1 } else { -1 };
            }
            r
        })
        .collect();
    TorusMap::new(n, pairs, rows)
}

pub fn builtin_torus_map(e: &Embedding) -> Result<TorusMap> {
    match e {
        Embedding::Identity { rank } => Ok(TorusMap::identity(*rank)),
        Embedding::UBlocks { parts, total } | Embedding::SpBlocks { parts, total } => {
            check(parts.iter().all(|&p| p > 0), "block sizes must be positive")?;
            let blocks = parts.iter().map(|&p| TorusMap::identity(p as usize)).collect();
            padded(blocks, *total as usize)
        }
        Embedding::SoBlocks { parts, total } => {
            let blocks = parts
                .iter()
                .map(|&p| TorusMap::identity(p as usize / 2))
                .collect();
            padded(blocks, *total as usize / 2)
        }
        Embedding::SuBlocks { parts, total } => {
            check(parts.iter().all(|&p| p >= 2), "SU blocks need size >= 2")?;
            check(
                parts.iter().sum::<u32>() <= *total,
                "SU blocks exceed the ambient size",
            )?;
            let blocks = parts.iter().map(|&p| su_full_weights(p as usize)).collect();
            drop_last(padded(blocks, *total as usize)?)
        }
        Embedding::SoInU { n } => paired_weights(*n as usize / 2, *n as usize),
        Embedding::SoInSu { n } => {
            check(*n >= 2, "SO(n) in SU(n) needs n >= 2")?;
            drop_last(paired_weights(*n as usize / 2, *n as usize)?)
        }
        Embedding::SpInU { n } => paired_weights(*n as usize, 2 * *n as usize),
        Embedding::SpInSu { n } => drop_last(paired_weights(*n as usize, 2 * *n as usize)?),
        Embedding::Diagonal { rank, signs } => {
            check(
                signs.iter().all(|s| s.abs() == 1),
                "diagonal signs must be +1 or -1",
            )?;
            let copies: Vec<TorusMap> = signs
                .iter()
                .map(|&s| {
                    let rows = TorusMap::identity(*rank)
                        .rows()
                        .iter()
                        .map(|r| r.iter().map(|x| x * s).collect())
                        .collect();
                    TorusMap::new(*rank, *rank, rows).expect("square")
                })
                .collect();
            TorusMap::stack(&copies)
        }
        Embedding::Product(parts) => {
            let maps = parts.iter().map(builtin_torus_map).collect::<Result<Vec<_>>>()?;
            Ok(TorusMap::block_diagonal(&maps))
        }
    }
}

/// Pulls a linear form on the ambient torus back along `m`.
fn pull_back_form(form: &[i64], m: &TorusMap) -> Vec<i64> {
    (0..m.sub_rank())
        .map(|j| form.iter().zip(m.rows()).map(|(a, row)| a * row[j]).sum())
        .collect()
}

/// Restriction of `gen` to the subtorus of `m`.
///
/// Works from the generator's recipe: the linear forms are pulled back and
/// the elementary symmetric function (or product) is rebuilt on the
/// subtorus, avoiding the expansion of the ambient polynomial.
pub fn restrict_generator(gen: &Generator, m: &TorusMap) -> Result<Polynomial> {
    if gen.num_vars() != m.ambient_rank() {
        return Err(Error::DimensionMismatch(format!(
            "generator {} lives on a rank-{} torus, map has {} rows",
            gen.name,
            gen.num_vars(),
            m.ambient_rank()
        )));
    }
    let n = m.sub_rank();
    match gen.recipe() {
        Recipe::Elementary {
            order,
            squared,
            forms,
        } => {
            let order = *order as usize;
            let mut e = vec![Polynomial::zero(n); order + 1];
            e[0] = Polynomial::one(n);
            for f in forms {
                let l = Polynomial::linear_form(&pull_back_form(f, m));
                let l = if *squared { l.pow(2) } else { l };
                if l.is_zero() {
                    continue;
                }
                for j in (1..=order).rev() {
                    let next = &e[j] + &(&e[j - 1] * &l);
                    e[j] = next;
                }
            }
            Ok(e.swap_remove(order))
        }
        Recipe::Product { forms } => Ok(forms.iter().fold(Polynomial::one(n), |acc, f| {
            &acc * &Polynomial::linear_form(&pull_back_form(f, m))
        })),
    }
}

/// Lazily built products of a fixed list of polynomials, keyed by exponent
/// vector: the image of `prod g_i^{a_i}` under a ring map is
/// `prod images[i]^{a_i}`.
#[derive(Debug)]
pub struct GeneratorImages {
    images: Vec<Polynomial>,
    num_vars: usize,
    cache: HashMap<Vec<u32>, Polynomial>,
}

impl GeneratorImages {
    pub fn new(images: Vec<Polynomial>, num_vars: usize) -> Self {
        GeneratorImages {
            images,
            num_vars,
            cache: HashMap::new(),
        }
    }

    /// Images of `gens` under restriction along `m`.
    pub fn restricted(gens: &[Generator], m: &TorusMap) -> Result<Self> {
        let images = gens
            .iter()
            .map(|g| restrict_generator(g, m))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(images, m.sub_rank()))
    }

    /// Torus expansions of `gens` themselves.
    pub fn torus(gens: &[Generator], num_vars: usize) -> Self {
        Self::new(gens.iter().map(|g| g.torus_poly().clone()).collect(), num_vars)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn image(&mut self, m: &Monomial) -> &Polynomial {
        self.ensure(m.exponents());
        &self.cache[m.exponents()]
    }

    fn ensure(&mut self, exps: &[u32]) {
        if self.cache.contains_key(exps) {
            return;
        }
        let value = match exps.iter().position(|&e| e > 0) {
            None => Polynomial::one(self.num_vars),
            Some(i) => {
                let mut parent = exps.to_vec();
                parent[i] -= 1;
                self.ensure(&parent);
                &self.cache[&parent] * &self.images[i]
            }
        };
        self.cache.insert(exps.to_vec(), value);
    }
}

/// Assigns column indices to monomials in order of first appearance.
#[derive(Default)]
pub(crate) struct ColumnIndex(HashMap<Monomial, usize>);

impl ColumnIndex {
    pub(crate) fn vector(&mut self, p: &Polynomial) -> SparseVec {
        p.terms()
            .map(|(m, c)| {
                let next = self.0.len();
                (*self.0.entry(m.clone()).or_insert(next), c.clone())
            })
            .collect()
    }
}

/// An invariant of `H_U` in generator coordinates, typically a member of
/// the restriction kernel.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KernelElement {
    pub degree: u32,
    /// Generator names of `H_U`, in generator order.
    pub names: Vec<String>,
    /// Degree-`degree` generator monomials, in the fixed basis order.
    pub basis: Vec<Monomial>,
    pub coeffs: Vec<Rational>,
    pub pretty: String,
}

impl KernelElement {
    pub fn new(h: &GroupSpec, degree: u32, coeffs: Vec<Rational>) -> Result<Self> {
        let gens = invariant_generators(h);
        let basis = generator_monomials(&gens, degree);
        if basis.len() != coeffs.len() {
            return Err(Error::DimensionMismatch(format!(
                "degree {degree} has {} generator monomials, got {} coefficients",
                basis.len(),
                coeffs.len()
            )));
        }
        let names: Vec<String> = gens.into_iter().map(|g| g.name).collect();
        let pretty = render(&names, &basis, &coeffs);
        Ok(KernelElement {
            degree,
            names,
            basis,
            coeffs,
            pretty,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Non-zero `(monomial, coefficient)` pairs in basis order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.basis.iter().zip(&self.coeffs).filter(|(_, c)| !c.is_zero())
    }

    /// The element as a polynomial whose variables are the generators.
    pub fn to_generator_poly(&self) -> Polynomial {
        let mut p = Polynomial::zero(self.names.len());
        for (m, c) in self.terms() {
            p.add_term(m.clone(), c.clone());
        }
        p
    }

    /// Expands into torus coordinates of `H_U` through each generator's
    /// torus polynomial.
    pub fn to_torus_poly(&self, h: &GroupSpec) -> Result<Polynomial> {
        let gens = invariant_generators(h);
        if gens.len() != self.names.len() {
            return Err(Error::DimensionMismatch(
                "kernel element belongs to a different group".into(),
            ));
        }
        let values: Vec<Polynomial> = gens.iter().map(|g| g.torus_poly().clone()).collect();
        if values.is_empty() {
            return Ok(Polynomial::constant(
                h.torus_rank(),
                self.to_generator_poly().coefficient(&Monomial::one(0)),
            ));
        }
        self.to_generator_poly().compose(&values)
    }
}

impl fmt::Display for KernelElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty)
    }
}

fn render_monomial(names: &[String], m: &Monomial) -> String {
    let parts: Vec<String> = m
        .exponents()
        .iter()
        .zip(names)
        .filter(|(e, _)| **e > 0)
        .map(|(&e, n)| if e == 1 { n.clone() } else { format!("{n}^{e}") })
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

/// ASCII rendering such as `c2@1 - c2@2` or `1/2*c1@1*c1@2 + e`.
pub fn render(names: &[String], basis: &[Monomial], coeffs: &[Rational]) -> String {
    let mut out = String::new();
    for (m, c) in basis.iter().zip(coeffs).filter(|(_, c)| !c.is_zero()) {
        let mono = render_monomial(names, m);
        let mag = c.abs();
        let body = if m.is_one() {
            mag.to_string()
        } else if mag.is_one() {
            mono
        } else {
            format!("{mag}*{mono}")
        };
        match (out.is_empty(), c.is_negative()) {
            (true, true) => out.push('-'),
            (true, false) => {}
            (false, true) => out.push_str(" - "),
            (false, false) => out.push_str(" + "),
        }
        out.push_str(&body);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn parse_err(expr: &str, reason: impl Into<String>) -> Error {
    Error::WitnessParse {
        expr: expr.to_string(),
        reason: reason.into(),
    }
}

fn parse_rational(s: &str) -> Option<Rational> {
    match s.split_once('/') {
        Some((a, b)) => {
            let den: num_bigint::BigInt = b.trim().parse().ok()?;
            if den.is_zero() {
                return None;
            }
            Some(Rational::new(a.trim().parse().ok()?, den))
        }
        None => Some(Rational::from_integer(s.trim().parse().ok()?)),
    }
}

/// Parses a rendered witness such as `e@1^2 - e@2^2` over the generators of
/// `h`. The expression must be homogeneous of positive degree.
pub fn parse_witness(h: &GroupSpec, expr: &str) -> Result<KernelElement> {
    let gens = invariant_generators(h);
    let index: HashMap<&str, usize> = gens
        .iter()
        .enumerate()
        .map(|(i, g)| (g.name.as_str(), i))
        .collect();
    let weights: Vec<u32> = gens.iter().map(|g| g.poly_degree).collect();

    // Split into signed terms at top-level '+' / '-'.
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut negative = false;
    let mut current = String::new();
    for ch in expr.chars() {
        if (ch == '+' || ch == '-') && !current.trim().is_empty() {
            terms.push((negative, std::mem::take(&mut current)));
            negative = ch == '-';
        } else if ch == '+' || ch == '-' {
            if ch == '-' {
                negative = !negative;
            }
        } else {
            current.push(ch);
        }
    }
    if current.trim().is_empty() {
        return Err(parse_err(expr, "dangling operator or empty expression"));
    }
    terms.push((negative, current));

    let mut poly = Polynomial::zero(gens.len());
    let mut degree = None;
    for (negative, term) in terms {
        let mut coeff = Rational::one();
        let mut exps = vec![0u32; gens.len()];
        for factor in term.split('*').map(str::trim) {
            if factor.is_empty() {
                return Err(parse_err(expr, "empty factor"));
            }
            if factor.starts_with(|c: char| c.is_ascii_digit()) {
                let c = parse_rational(factor)
                    .ok_or_else(|| parse_err(expr, format!("bad coefficient {factor:?}")))?;
                coeff *= c;
                continue;
            }
            let (name, power) = match factor.split_once('^') {
                Some((n, p)) => (
                    n.trim(),
                    p.trim()
                        .parse::<u32>()
                        .map_err(|_| parse_err(expr, format!("bad exponent in {factor:?}")))?,
                ),
                None => (factor, 1),
            };
            let i = *index
                .get(name)
                .ok_or_else(|| parse_err(expr, format!("unknown generator {name:?}")))?;
            exps[i] += power;
        }
        let m = Monomial::new(exps);
        let d = m.weighted_degree(&weights);
        if *degree.get_or_insert(d) != d {
            return Err(parse_err(expr, "expression is not homogeneous"));
        }
        poly.add_term(m, if negative { -coeff } else { coeff });
    }
    let degree = degree.unwrap_or(0);
    if degree == 0 {
        return Err(parse_err(expr, "witness must have positive degree"));
    }
    let basis = generator_monomials(&gens, degree);
    let coeffs = basis.iter().map(|m| poly.coefficient(m)).collect();
    KernelElement::new(h, degree, coeffs)
}

/// Kernel of the degree-`d` restriction map in generator coordinates.
#[derive(Clone, Debug)]
pub struct GradedKernel {
    pub basis: Vec<Monomial>,
    /// Reduced echelon basis, leading coefficient 1.
    pub kernel: Vec<Vec<Rational>>,
    pub image_rank: usize,
}

/// Kernel of restriction at degree `d`, reusing products cached in `images`.
pub fn graded_kernel(gens: &[Generator], images: &mut GeneratorImages, d: u32) -> GradedKernel {
    let basis = generator_monomials(gens, d);
    let mut cols = ColumnIndex::default();
    let vectors: Vec<SparseVec> = basis.iter().map(|m| cols.vector(images.image(m))).collect();
    let kernel = linalg::kernel_basis_sparse(&vectors);
    GradedKernel {
        image_rank: basis.len() - kernel.len(),
        basis,
        kernel,
    }
}

/// Basis of the kernel of `Q[t_H]^{W_H} → Q[t_K]^{W_K}` in degree `d`.
pub fn kernel_of_restriction(h: &GroupSpec, k_torus: &TorusMap, d: u32) -> Result<Vec<KernelElement>> {
    if k_torus.ambient_rank() != h.torus_rank() {
        return Err(Error::DimensionMismatch(format!(
            "{h} has torus rank {}, map has {} rows",
            h.torus_rank(),
            k_torus.ambient_rank()
        )));
    }
    let gens = invariant_generators(h);
    let mut images = GeneratorImages::restricted(&gens, k_torus)?;
    let gk = graded_kernel(&gens, &mut images, d);
    gk.kernel
        .into_iter()
        .map(|c| KernelElement::new(h, d, c))
        .collect()
}
