//! Classical compact groups: maximal-torus coordinates, Weyl groups and the
//! generators of their Weyl-invariant polynomial rings.
//!
//! Torus coordinates of a product group are concatenated factor by factor.
//! `SU(n)` uses `n − 1` free coordinates, the last weight being
//! `−(x_1 + … + x_{n−1})`.

use std::fmt;
use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{elementary_symmetric, weighted_monomials, Monomial, Polynomial};
use crate::torus::TorusMap;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Family {
    U,
    SU,
    SOOdd,
    SOEven,
    Sp,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct ClassicalFactor {
    family: Family,
    n: u32,
}

impl ClassicalFactor {
    pub fn new(family: Family, n: u32) -> Result<Self> {
        let bad = |reason: &str| {
            Err(Error::InvalidFactor {
                family: family.prefix().to_string(),
                n,
                reason: reason.to_string(),
            })
        };
        match family {
            Family::U | Family::Sp if n == 0 => bad("n must be at least 1"),
            Family::SU if n < 2 => bad("SU(n) needs n >= 2"),
            Family::SOOdd if n.is_multiple_of(2) => bad("SO_odd needs odd n"),
            Family::SOEven if n < 2 || n % 2 == 1 => bad("SO_even needs even n >= 2"),
            _ => Ok(ClassicalFactor { family, n }),
        }
    }

    pub fn u(n: u32) -> Result<Self> {
        Self::new(Family::U, n)
    }

    pub fn su(n: u32) -> Result<Self> {
        Self::new(Family::SU, n)
    }

    /// `SO(n)`, choosing the odd or even family from the parity of `n`.
    pub fn so(n: u32) -> Result<Self> {
        Self::new(
            if n.is_multiple_of(2) {
                Family::SOEven
            } else {
                Family::SOOdd
            },
            n,
        )
    }

    pub fn sp(n: u32) -> Result<Self> {
        Self::new(Family::Sp, n)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn torus_rank(&self) -> usize {
        let n = self.n as usize;
        match self.family {
            Family::U | Family::Sp => n,
            Family::SU => n - 1,
            Family::SOOdd | Family::SOEven => n / 2,
        }
    }

    /// Number of permuted slots; `SU(n)` permutes `n` weights.
    fn weyl_slots(&self) -> usize {
        match self.family {
            Family::SU => self.n as usize,
            _ => self.torus_rank(),
        }
    }

    pub fn weyl_order(&self) -> u128 {
        let k = self.weyl_slots() as u128;
        let fact: u128 = (1..=k).product();
        match self.family {
            Family::U | Family::SU => fact,
            Family::SOOdd | Family::Sp => fact << k,
            Family::SOEven => (fact << k) >> 1,
        }
    }

    fn signed(&self) -> bool {
        matches!(self.family, Family::SOOdd | Family::SOEven | Family::Sp)
    }
}

impl Family {
    fn prefix(&self) -> &'static str {
        match self {
            Family::U => "U",
            Family::SU => "SU",
            Family::SOOdd | Family::SOEven => "SO",
            Family::Sp => "Sp",
        }
    }
}

impl fmt::Display for ClassicalFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.family.prefix(), self.n)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GroupSpec {
    factors: Vec<ClassicalFactor>,
}

impl GroupSpec {
    pub fn new(factors: Vec<ClassicalFactor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::DimensionMismatch(
                "a group needs at least one factor".into(),
            ));
        }
        Ok(GroupSpec { factors })
    }

    pub fn single(f: ClassicalFactor) -> Self {
        GroupSpec { factors: vec![f] }
    }

    pub fn factors(&self) -> &[ClassicalFactor] {
        &self.factors
    }

    pub fn torus_rank(&self) -> usize {
        self.factors.iter().map(ClassicalFactor::torus_rank).sum()
    }

    /// First torus coordinate of each factor.
    pub fn offsets(&self) -> Vec<usize> {
        self.factors
            .iter()
            .scan(0, |acc, f| {
                let o = *acc;
                *acc += f.torus_rank();
                Some(o)
            })
            .collect()
    }

    pub fn weyl_order(&self) -> u128 {
        self.factors.iter().map(ClassicalFactor::weyl_order).product()
    }

    pub fn product(&self, other: &GroupSpec) -> GroupSpec {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        GroupSpec { factors }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.factors.iter().map(ToString::to_string).collect();
        f.write_str(&s.join(" x "))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GeneratorKind {
    Chern,
    Pontryagin,
    Euler,
    Symplectic,
}

/// How a generator is built from linear forms on the torus.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Recipe {
    /// `e_order(l_1, …, l_k)`, or `e_order(l_1^2, …, l_k^2)` when `squared`.
    Elementary {
        order: u32,
        squared: bool,
        forms: Vec<Vec<i64>>,
    },
    /// `l_1 * … * l_k`.
    Product { forms: Vec<Vec<i64>> },
}

#[derive(Clone, Debug)]
pub struct Generator {
    pub name: String,
    pub kind: GeneratorKind,
    pub index: u32,
    /// Zero-based factor position inside the group.
    pub factor: usize,
    pub poly_degree: u32,
    recipe: Recipe,
    num_vars: usize,
    local: (ClassicalFactor, usize),
    torus: OnceLock<Polynomial>,
}

impl Generator {
    pub fn recipe(&self) -> &Recipe {
        &self.recipe
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// The generator as a polynomial in the group's torus coordinates,
    /// expanded from elementary symmetric polynomials on first use.
    pub fn torus_poly(&self) -> &Polynomial {
        self.torus.get_or_init(|| {
            let (factor, offset) = self.local;
            let m = factor.torus_rank();
            let local = match self.kind {
                GeneratorKind::Chern => {
                    let e = elementary_symmetric(factor.n as usize, self.index)
                        .expect("generator index within range");
                    if factor.family == Family::SU {
                        e.substitute_linear(&su_weights(factor.n as usize))
                            .expect("weight map matches")
                    } else {
                        e
                    }
                }
                GeneratorKind::Pontryagin | GeneratorKind::Symplectic => elementary_symmetric(m, self.index)
                    .expect("generator index within range")
                    .dilate(2),
                GeneratorKind::Euler => elementary_symmetric(m, m as u32).expect("rank is positive"),
            };
            local.lift(offset, self.num_vars)
        })
    }
}

/// Weights of `SU(n)` in its `n − 1` free coordinates, as an `n × (n−1)` map.
fn su_weights(n: usize) -> TorusMap {
    let mut rows: Vec<Vec<i64>> = (0..n - 1)
        .map(|i| (0..n - 1).map(|j| i64::from(i == j)).collect())
        .collect();
    rows.push(vec![-1; n - 1]);
    TorusMap::new(n, n - 1, rows).expect("shape is consistent")
}

fn unit_form(total: usize, i: usize, sign: i64) -> Vec<i64> {
    let mut v = vec![0; total];
    v[i] = sign;
    v
}

/// Generators of the invariant ring, factor by factor: Chern classes for
/// `U`/`SU`, Pontryagin classes (plus the Euler class in type D) for `SO`,
/// and symplectic Pontryagin classes for `Sp`.
pub fn invariant_generators(g: &GroupSpec) -> Vec<Generator> {
    let total = g.torus_rank();
    let multi = g.factors.len() > 1;
    let mut out = Vec::new();
    for (fi, (factor, offset)) in g.factors.iter().zip(g.offsets()).enumerate() {
        let m = factor.torus_rank();
        let coords: Vec<Vec<i64>> = (0..m).map(|i| unit_form(total, offset + i, 1)).collect();
        let mut push = |kind: GeneratorKind, index: u32, degree: u32, base: String, recipe: Recipe| {
            let name = if multi { format!("{base}@{}", fi + 1) } else { base };
            out.push(Generator {
                name,
                kind,
                index,
                factor: fi,
                poly_degree: degree,
                recipe,
                num_vars: total,
                local: (*factor, offset),
                torus: OnceLock::new(),
            });
        };
        match factor.family {
            Family::U => {
                for i in 1..=factor.n {
                    let recipe = Recipe::Elementary {
                        order: i,
                        squared: false,
                        forms: coords.clone(),
                    };
                    push(GeneratorKind::Chern, i, i, format!("c{i}"), recipe);
                }
            }
            Family::SU => {
                let mut forms = coords.clone();
                let mut last = vec![0; total];
                for x in &mut last[offset..offset + m] {
                    *x = -1;
                }
                forms.push(last);
                for i in 2..=factor.n {
                    let recipe = Recipe::Elementary {
                        order: i,
                        squared: false,
                        forms: forms.clone(),
                    };
                    push(GeneratorKind::Chern, i, i, format!("c{i}"), recipe);
                }
            }
            Family::SOOdd | Family::SOEven | Family::Sp => {
                let (kind, letter) = if factor.family == Family::Sp {
                    (GeneratorKind::Symplectic, 'q')
                } else {
                    (GeneratorKind::Pontryagin, 'p')
                };
                let top = if factor.family == Family::SOEven {
                    m as u32 - 1
                } else {
                    m as u32
                };
                for i in 1..=top {
                    let recipe = Recipe::Elementary {
                        order: i,
                        squared: true,
                        forms: coords.clone(),
                    };
                    push(kind, i, 2 * i, format!("{letter}{i}"), recipe);
                }
                if factor.family == Family::SOEven {
                    let recipe = Recipe::Product {
                        forms: coords.clone(),
                    };
                    push(GeneratorKind::Euler, m as u32, m as u32, "e".to_string(), recipe);
                }
            }
        }
    }
    out
}

pub fn generator_degrees(gens: &[Generator]) -> Vec<u32> {
    gens.iter().map(|g| g.poly_degree).collect()
}

/// Degree-`d` products of generators as exponent vectors over the generator
/// list, in descending lexicographic order.
pub fn generator_monomials(gens: &[Generator], d: u32) -> Vec<Monomial> {
    weighted_monomials(&generator_degrees(gens), d)
}

/// Coefficient of `t^d` in `prod_i 1 / (1 − t^{d_i})` over the generator degrees.
pub fn hilbert_dimension(g: &GroupSpec, d: u32) -> u64 {
    let d = d as usize;
    let mut series = vec![0u64; d + 1];
    series[0] = 1;
    for w in generator_degrees(&invariant_generators(g)) {
        let w = w as usize;
        for t in w..=d {
            series[t] += series[t - w];
        }
    }
    series[d]
}

const CERT_PRIME: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % CERT_PRIME as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a);
        }
        a = mul_mod(a, a);
        e >>= 1;
    }
    r
}

fn eval_mod(p: &Polynomial, point: &[u64]) -> u64 {
    let mut total = 0u64;
    for (m, c) in p.terms() {
        let num = c.numer() % num_bigint::BigInt::from(CERT_PRIME);
        let num = if num < 0.into() { num + CERT_PRIME } else { num };
        let den = c.denom() % num_bigint::BigInt::from(CERT_PRIME);
        let to_u64 = |x: num_bigint::BigInt| u64::try_from(x).expect("reduced mod p");
        let mut v = mul_mod(to_u64(num), pow_mod(to_u64(den), CERT_PRIME - 2));
        for (x, &e) in point.iter().zip(m.exponents()) {
            v = mul_mod(v, pow_mod(*x, e as u64));
        }
        total = (total + v) % CERT_PRIME;
    }
    total
}

/// Certifies that the degree-`d` generator products of `g` are linearly
/// independent polynomials.
///
/// Evaluates every product at pseudo-random points modulo a 61-bit prime and
/// checks that the evaluation matrix has full row rank there. Full rank
/// modulo `p` forces full rank over `Q`, so `true` is a proof; `false` only
/// means no certificate was found with the sampled points.
pub fn independence_certificate(g: &GroupSpec, d: u32) -> bool {
    let gens = invariant_generators(g);
    let monos = generator_monomials(&gens, d);
    if monos.is_empty() {
        return true;
    }
    let n = g.torus_rank();
    let mut rng = ChaCha8Rng::seed_from_u64(0x1DE9_u64 ^ d as u64);
    let points: Vec<Vec<u64>> = (0..monos.len() + 4)
        .map(|_| (0..n).map(|_| rng.gen_range(1..CERT_PRIME)).collect())
        .collect();
    let gen_values: Vec<Vec<u64>> = points
        .iter()
        .map(|pt| gens.iter().map(|g| eval_mod(g.torus_poly(), pt)).collect())
        .collect();
    let mut rows: Vec<Vec<u64>> = monos
        .iter()
        .map(|m| {
            gen_values
                .iter()
                .map(|vals| {
                    m.exponents()
                        .iter()
                        .zip(vals)
                        .fold(1, |acc, (&e, &v)| mul_mod(acc, pow_mod(v, e as u64)))
                })
                .collect()
        })
        .collect();
    // Gaussian elimination mod p on the rows.
    let cols = points.len();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = pow_mod(rows[rank][c], CERT_PRIME - 2);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[c] != 0 {
                let f = mul_mod(row[c], inv);
                for (x, &y) in row[c..].iter_mut().zip(&pivot[c..]) {
                    *x = (*x + CERT_PRIME - mul_mod(f, y)) % CERT_PRIME;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank == rows.len()
}

/// One Weyl group element, stored per factor as a permutation of weight
/// slots together with sign changes (signs are all `+1` for `U`/`SU`).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeylElement {
    parts: Vec<(Vec<usize>, Vec<i64>)>,
}

impl WeylElement {
    pub fn identity(g: &GroupSpec) -> Self {
        WeylElement {
            parts: g
                .factors
                .iter()
                .map(|f| {
                    let k = f.weyl_slots();
                    ((0..k).collect(), vec![1; k])
                })
                .collect(),
        }
    }

    /// Builds an element from per-factor permutations and signs, checking
    /// that each part is a legal Weyl element of its factor.
    pub fn from_parts(g: &GroupSpec, parts: Vec<(Vec<usize>, Vec<i64>)>) -> Result<Self> {
        if parts.len() != g.factors.len() {
            return Err(Error::DimensionMismatch("one part per factor".into()));
        }
        for (f, (perm, signs)) in g.factors.iter().zip(&parts) {
            let k = f.weyl_slots();
            let mut seen = vec![false; k];
            let is_perm = perm.len() == k
                && perm
                    .iter()
                    .all(|&p| p < k && !std::mem::replace(&mut seen[p], true));
            let negatives = signs.iter().filter(|&&s| s == -1).count();
            let signs_ok = signs.len() == k
                && signs.iter().all(|&s| s == 1 || s == -1)
                && (f.signed() || negatives == 0)
                && (f.family != Family::SOEven || negatives % 2 == 0);
            if !is_perm || !signs_ok {
                return Err(Error::InvalidFactor {
                    family: f.family.prefix().to_string(),
                    n: f.n,
                    reason: "not a Weyl group element".into(),
                });
            }
        }
        Ok(WeylElement { parts })
    }

    /// Substitution matrix on torus coordinates: `x_i ↦ s_i * x_{σ(i)}`.
    /// For `SU(n)` the weight `x_n = −(x_1 + … + x_{n−1})` is permuted too,
    /// so the block is an integer matrix that need not be a signed permutation.
    pub fn matrix(&self, g: &GroupSpec) -> TorusMap {
        let blocks: Vec<TorusMap> = g
            .factors
            .iter()
            .zip(&self.parts)
            .map(|(f, (perm, signs))| {
                let m = f.torus_rank();
                let rows = (0..m)
                    .map(|i| {
                        let mut row = vec![0i64; m];
                        if f.family == Family::SU && perm[i] == m {
                            row.iter_mut().for_each(|x| *x = -1);
                        } else {
                            row[perm[i]] = signs[i];
                        }
                        row
                    })
                    .collect();
                TorusMap::new(m, m, rows).expect("square block")
            })
            .collect();
        TorusMap::block_diagonal(&blocks)
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

fn factor_elements(f: &ClassicalFactor) -> Vec<(Vec<usize>, Vec<i64>)> {
    let k = f.weyl_slots();
    let sign_choices: Vec<Vec<i64>> = if f.signed() {
        (0..1u32 << k)
            .map(|mask| {
                (0..k)
                    .map(|i| if mask >> i & 1 == 1 { -1 } else { 1 })
                    .collect::<Vec<i64>>()
            })
            .filter(|s| f.family != Family::SOEven || s.iter().filter(|&&x| x == -1).count() % 2 == 0)
            .collect()
    } else {
        vec![vec![1; k]]
    };
    let mut out = Vec::new();
    for p in permutations(k) {
        for s in &sign_choices {
            out.push((p.clone(), s.clone()));
        }
    }
    out
}

/// Every Weyl group element, or `None` when the group has more than `limit`.
pub fn weyl_elements(g: &GroupSpec, limit: u128) -> Option<Vec<WeylElement>> {
    if g.weyl_order() > limit {
        return None;
    }
    let mut acc: Vec<Vec<(Vec<usize>, Vec<i64>)>> = vec![vec![]];
    for f in &g.factors {
        let elems = factor_elements(f);
        acc = acc
            .into_iter()
            .flat_map(|prefix| {
                elems.iter().map(move |e| {
                    let mut p = prefix.clone();
                    p.push(e.clone());
                    p
                })
            })
            .collect();
    }
    Some(acc.into_iter().map(|parts| WeylElement { parts }).collect())
}

/// `count` pseudo-random Weyl group elements from a fixed seed.
pub fn weyl_sample(g: &GroupSpec, count: usize) -> Vec<WeylElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x57E1_u64);
    (0..count)
        .map(|_| {
            let parts = g
                .factors
                .iter()
                .map(|f| {
                    let k = f.weyl_slots();
                    let mut perm: Vec<usize> = (0..k).collect();
                    perm.shuffle(&mut rng);
                    let mut signs: Vec<i64> = (0..k)
                        .map(|_| if f.signed() && rng.gen_bool(0.5) { -1 } else { 1 })
                        .collect();
                    if f.family == Family::SOEven && signs.iter().filter(|&&s| s == -1).count() % 2 == 1 {
                        signs[k - 1] *= -1;
                    }
                    (perm, signs)
                })
                .collect();
            WeylElement { parts }
        })
        .collect()
}
