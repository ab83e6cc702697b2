//! Brute-force reference computation of the graded restriction kernel and the
//! ideal piece, written from scratch so it shares nothing with the library
//! beyond the pair description.
//!
//! Invariants are produced by Reynolds averaging raw torus monomials over
//! explicitly enumerated Weyl groups; ambient invariants are pulled back
//! through the torus matrices and multiplied by `H_U` invariants to span the
//! ideal. Everything is dense exact arithmetic on exponent-vector maps.

#![allow(dead_code)]

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use ckforms::{ClassicalFactor, Family, GroupSpec, PairSpec, Polynomial};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

pub type Q = BigRational;
pub type Poly = BTreeMap<Vec<u32>, Q>;

pub fn q(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

fn add_term(p: &mut Poly, m: Vec<u32>, c: Q) {
    if c.is_zero() {
        return;
    }
    match p.entry(m) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

pub fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let m: Vec<u32> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
            add_term(&mut out, m, ca * cb);
        }
    }
    out
}

/// `e_k` of the variables `vars` inside an `n`-variable ring, built by
/// subset enumeration.
pub fn elementary(n: usize, vars: &[usize], k: usize) -> Poly {
    let mut out = Poly::new();
    let m = vars.len();
    for mask in 0u32..1 << m {
        if mask.count_ones() as usize == k {
            let mut e = vec![0; n];
            (0..m).filter(|i| mask >> i & 1 == 1).for_each(|i| e[vars[i]] = 1);
            out.insert(e, q(1));
        }
    }
    out
}

fn constant(n: usize, c: Q) -> Poly {
    let mut p = Poly::new();
    add_term(&mut p, vec![0; n], c);
    p
}

fn linear(coeffs: &[Q]) -> Poly {
    let n = coeffs.len();
    let mut p = Poly::new();
    for (i, c) in coeffs.iter().enumerate() {
        let mut m = vec![0; n];
        m[i] = 1;
        add_term(&mut p, m, c.clone());
    }
    p
}

/// `p(images[0], images[1], ...)` where every image lives in `n` variables.
pub fn substitute(p: &Poly, images: &[Poly], n: usize) -> Poly {
    let mut powers: Vec<Vec<Poly>> = images
        .iter()
        .map(|im| vec![constant(n, q(1)), im.clone()])
        .collect();
    let mut out = Poly::new();
    for (m, c) in p {
        let mut term = constant(n, c.clone());
        for (i, &e) in m.iter().enumerate() {
            if e == 0 {
                continue;
            }
            while powers[i].len() <= e as usize {
                let next = mul(powers[i].last().unwrap(), &images[i]);
                powers[i].push(next);
            }
            term = mul(&term, &powers[i][e as usize]);
        }
        for (mm, cc) in term {
            add_term(&mut out, mm, cc);
        }
    }
    out
}

pub fn from_library(p: &Polynomial) -> Poly {
    let mut out = Poly::new();
    for (m, c) in p.terms() {
        add_term(&mut out, m.exponents().to_vec(), c.clone());
    }
    out
}

/// Row-echelon span of polynomials, pivoting on the largest exponent vector.
#[derive(Default)]
pub struct Span {
    rows: BTreeMap<Vec<u32>, Poly>,
}

impl Span {
    pub fn reduce(&self, p: &Poly) -> Poly {
        let mut p = p.clone();
        let mut rest = Poly::new();
        while let Some((m, c)) = p.iter().next_back().map(|(m, c)| (m.clone(), c.clone())) {
            match self.rows.get(&m) {
                Some(row) => {
                    let f = &c / &row[&m];
                    for (rm, rc) in row {
                        add_term(&mut p, rm.clone(), -(&f * rc));
                    }
                }
                None => {
                    p.remove(&m);
                    rest.insert(m, c);
                }
            }
        }
        rest
    }

    pub fn insert(&mut self, p: &Poly) -> bool {
        let r = self.reduce(p);
        match r.keys().next_back().cloned() {
            Some(lead) => {
                self.rows.insert(lead, r);
                true
            }
            None => false,
        }
    }

    pub fn contains(&self, p: &Poly) -> bool {
        self.reduce(p).is_empty()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> Vec<Poly> {
        self.rows.values().cloned().collect()
    }
}

/// Weyl group of one classical factor acting on its raw coordinates
/// (`n` for unitary groups, `m` for `SO(2m)`/`SO(2m+1)`, `n` for `Sp(n)`).
#[derive(Clone, Copy, Debug)]
pub struct RawFactor {
    pub family: Family,
    pub raw: usize,
    pub free: usize,
}

impl RawFactor {
    pub fn of(f: &ClassicalFactor) -> Self {
        let n = f.n() as usize;
        let (raw, free) = match f.family() {
            Family::U => (n, n),
            Family::SU => (n, n - 1),
            Family::SOOdd | Family::SOEven => (n / 2, n / 2),
            Family::Sp => (n, n),
        };
        RawFactor {
            family: f.family(),
            raw,
            free,
        }
    }

    fn sign_vectors(&self) -> Vec<Vec<i64>> {
        let m = self.raw;
        match self.family {
            Family::U | Family::SU => vec![vec![1; m]],
            _ => (0..1u32 << m)
                .map(|mask| {
                    (0..m)
                        .map(|i| if mask >> i & 1 == 1 { -1 } else { 1 })
                        .collect::<Vec<i64>>()
                })
                .filter(|s| self.family != Family::SOEven || s.iter().product::<i64>() == 1)
                .collect(),
        }
    }

    pub fn order(&self) -> u128 {
        (1..=self.raw as u128).product::<u128>() * self.sign_vectors().len() as u128
    }

    /// Every element `(perm, signs)`, acting by `x_i -> signs[i] * x_{perm[i]}`.
    pub fn elements(&self) -> Vec<(Vec<usize>, Vec<i64>)> {
        let mut perms = Vec::new();
        permutations(&mut (0..self.raw).collect(), 0, &mut perms);
        let signs = self.sign_vectors();
        perms
            .iter()
            .flat_map(|p| signs.iter().map(move |s| (p.clone(), s.clone())))
            .collect()
    }

    /// Reynolds average of `x^a` by summing over the whole group.
    pub fn reynolds_explicit(&self, a: &[u32]) -> Poly {
        let elements = self.elements();
        let mut out = Poly::new();
        for (perm, signs) in &elements {
            let mut b = vec![0; self.raw];
            let mut sign = 1;
            for i in 0..self.raw {
                b[perm[i]] = a[i];
                if a[i] % 2 == 1 {
                    sign *= signs[i];
                }
            }
            add_term(&mut out, b, q(sign));
        }
        let order = q(elements.len() as i64);
        out.into_iter().map(|(m, c)| (m, c / &order)).collect()
    }

    /// Reynolds average of `x^a` through its orbit: distinct rearrangements
    /// of the exponents, with the sign character deciding whether the
    /// average survives.
    pub fn reynolds_orbit(&self, a: &[u32]) -> Poly {
        let odd = a.iter().filter(|&&e| e % 2 == 1).count();
        let survives = match self.family {
            Family::U | Family::SU => true,
            Family::SOOdd | Family::Sp => odd == 0,
            Family::SOEven => odd == 0 || odd == self.raw,
        };
        if !survives {
            return Poly::new();
        }
        let mut orbit = Vec::new();
        let mut sorted = a.to_vec();
        sorted.sort_unstable();
        distinct_permutations(&mut sorted, &mut orbit);
        let size = q(orbit.len() as i64);
        orbit.into_iter().map(|m| (m, q(1) / &size)).collect()
    }

    pub fn reynolds(&self, a: &[u32]) -> Poly {
        if self.order() <= 5040 {
            self.reynolds_explicit(a)
        } else {
            self.reynolds_orbit(a)
        }
    }

    /// Raw coordinates as linear forms in the free coordinates; the last
    /// unitary coordinate of `SU(n)` is minus the sum of the others.
    pub fn raw_to_free(&self) -> Vec<Poly> {
        (0..self.raw)
            .map(|i| {
                let mut c = vec![q(0); self.free];
                if i < self.free {
                    c[i] = q(1);
                } else {
                    c.iter_mut().for_each(|x| *x = q(-1));
                }
                linear(&c)
            })
            .map(|p| if self.free == 0 { Poly::new() } else { p })
            .collect()
    }

    /// Spanning set of degree-`d` invariants in free coordinates.
    pub fn invariants(&self, d: u32) -> Vec<Poly> {
        if self.raw == 0 {
            return if d == 0 {
                vec![constant(0, q(1))]
            } else {
                Vec::new()
            };
        }
        let images = self.raw_to_free();
        let mut span = Span::default();
        for a in exponent_vectors(self.raw, d) {
            let r = self.reynolds(&a);
            let p = if self.free == 0 {
                constant(0, r.get(&vec![0; self.raw]).cloned().unwrap_or_else(Q::zero))
            } else {
                substitute(&r, &images, self.free)
            };
            if !p.is_empty() {
                span.insert(&p);
            }
        }
        span.basis()
    }
}

fn permutations(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, out);
        items.swap(k, i);
    }
}

fn distinct_permutations(sorted: &mut [u32], out: &mut Vec<Vec<u32>>) {
    loop {
        out.push(sorted.to_vec());
        let n = sorted.len();
        let Some(i) = (0..n.saturating_sub(1))
            .rev()
            .find(|&i| sorted[i] < sorted[i + 1])
        else {
            return;
        };
        let j = (i + 1..n).rev().find(|&j| sorted[j] > sorted[i]).unwrap();
        sorted.swap(i, j);
        sorted[i + 1..].reverse();
    }
}

/// Non-increasing exponent vectors of total degree `d` in `n` variables. Every
/// Weyl group here permutes all raw coordinates, so these represent every
/// orbit of raw monomials.
pub fn exponent_vectors(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn go(n: usize, d: u32, cap: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == n {
            if d == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        for e in (0..=d.min(cap)).rev() {
            prefix.push(e);
            go(n, d - e, e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, d, d, &mut Vec::new(), &mut out);
    out
}

/// Invariants of a product group in degree `d`, in the concatenated free
/// coordinates of its factors.
pub struct Invariants {
    factors: Vec<RawFactor>,
    cache: BTreeMap<(usize, u32), Vec<Poly>>,
}

impl Invariants {
    pub fn new(g: &GroupSpec) -> Self {
        Invariants {
            factors: g.factors().iter().map(RawFactor::of).collect(),
            cache: BTreeMap::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.factors.iter().map(|f| f.free).sum()
    }

    fn factor(&mut self, i: usize, d: u32) -> Vec<Poly> {
        let f = self.factors[i];
        self.cache
            .entry((i, d))
            .or_insert_with(|| f.invariants(d))
            .clone()
    }

    /// A basis of the degree-`d` invariants.
    pub fn basis(&mut self, d: u32) -> Vec<Poly> {
        let n = self.num_vars();
        let mut acc = vec![(0u32, constant(n, q(1)))];
        let mut offset = 0;
        for i in 0..self.factors.len() {
            let free = self.factors[i].free;
            let mut next = Vec::new();
            for (used, p) in &acc {
                for e in 0..=d - used {
                    for inv in self.factor(i, e) {
                        let lifted: Poly = inv
                            .into_iter()
                            .map(|(m, c)| {
                                let mut full = vec![0; n];
                                full[offset..offset + free].copy_from_slice(&m);
                                (full, c)
                            })
                            .collect();
                        next.push((used + e, mul(p, &lifted)));
                    }
                }
            }
            acc = next;
            offset += free;
        }
        let mut span = Span::default();
        for (used, p) in acc {
            if used == d {
                span.insert(&p);
            }
        }
        span.basis()
    }
}

fn matrix_images(rows: &[Vec<i64>]) -> Vec<Poly> {
    rows.iter()
        .map(|r| linear(&r.iter().map(|&x| q(x)).collect::<Vec<_>>()))
        .collect()
}

/// Per-degree dimensions computed by the oracle.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct OracleDegree {
    pub degree: u32,
    pub invariant_dim: usize,
    pub kernel_dim: usize,
    pub ideal_dim: usize,
    /// Dimension of kernel plus ideal.
    pub sum_dim: usize,
}

impl OracleDegree {
    pub fn obstructed(&self) -> bool {
        self.sum_dim > self.ideal_dim
    }
}

pub struct Oracle {
    h_vars: usize,
    k_vars: usize,
    g_inv: Invariants,
    h_inv: Invariants,
    to_h: Vec<Poly>,
    to_k: Vec<Poly>,
    pulled_back: BTreeMap<u32, Vec<Poly>>,
}

pub struct OracleDegreeData {
    pub stats: OracleDegree,
    pub invariants: Span,
    pub kernel: Span,
    pub ideal: Span,
}

impl Oracle {
    pub fn new(p: &PairSpec) -> Self {
        Oracle {
            h_vars: p.map_h_in_g.sub_rank(),
            k_vars: p.map_kh_in_h.sub_rank(),
            g_inv: Invariants::new(&p.g_u),
            h_inv: Invariants::new(&p.h_u),
            to_h: matrix_images(p.map_h_in_g.rows()),
            to_k: matrix_images(p.map_kh_in_h.rows()),
            pulled_back: BTreeMap::new(),
        }
    }

    pub fn restrict_to_k(&self, p: &Poly) -> Poly {
        substitute(p, &self.to_k, self.k_vars)
    }

    fn pulled_back(&mut self, e: u32) -> Vec<Poly> {
        if let Some(v) = self.pulled_back.get(&e) {
            return v.clone();
        }
        let mut span = Span::default();
        for f in self.g_inv.basis(e) {
            span.insert(&substitute(&f, &self.to_h, self.h_vars));
        }
        let v = span.basis();
        self.pulled_back.insert(e, v.clone());
        v
    }

    pub fn degree(&mut self, d: u32) -> OracleDegreeData {
        let basis = self.h_inv.basis(d);
        let mut invariants = Span::default();
        let mut kernel = Span::default();
        // Gaussian elimination on [restriction | element] pairs: an element
        // whose restriction reduces to zero joins the kernel.
        let mut paired: Vec<(Poly, Poly)> = Vec::new();
        for b in &basis {
            invariants.insert(b);
            let mut r = self.restrict_to_k(b);
            let mut elem = b.clone();
            loop {
                let lead = r.keys().next_back().cloned();
                let Some(lead) = lead else { break };
                match paired.iter().find(|(pr, _)| pr.keys().next_back() == Some(&lead)) {
                    Some((pr, pe)) => {
                        let f = &r[&lead] / &pr[&lead];
                        for (m, c) in pr {
                            add_term(&mut r, m.clone(), -(&f * c));
                        }
                        for (m, c) in pe {
                            add_term(&mut elem, m.clone(), -(&f * c));
                        }
                    }
                    None => break,
                }
            }
            if r.is_empty() {
                kernel.insert(&elem);
            } else {
                paired.push((r, elem));
            }
        }
        let mut ideal = Span::default();
        for e in 1..=d {
            let gs = self.pulled_back(e);
            if gs.is_empty() {
                continue;
            }
            for h in self.h_inv.basis(d - e) {
                for g in &gs {
                    ideal.insert(&mul(g, &h));
                }
            }
        }
        let mut sum = Span::default();
        for v in ideal.basis().iter().chain(kernel.basis().iter()) {
            sum.insert(v);
        }
        let stats = OracleDegree {
            sum_dim: sum.rank(),
            degree: d,
            invariant_dim: invariants.rank(),
            kernel_dim: kernel.rank(),
            ideal_dim: ideal.rank(),
        };
        OracleDegreeData {
            stats,
            invariants,
            kernel,
            ideal,
        }
    }
}

/// Catalog pairs and small family members whose `H_U` torus has rank at
/// most `max_h_rank`, deduplicated by id.
pub fn small_pairs(max_h_rank: usize, max_param: u32) -> Vec<PairSpec> {
    let mut out: BTreeMap<String, PairSpec> = BTreeMap::new();
    for e in ckforms::builtin_entries() {
        if e.pair.h_u.torus_rank() <= max_h_rank {
            out.insert(e.pair.id.clone(), e.pair);
        }
    }
    for (family, params) in ckforms::catalog::FAMILIES {
        let mut tuple = vec![0u32; params.len()];
        loop {
            if let Ok(p) = ckforms::catalog::family_instance(family, &tuple) {
                if p.h_u.torus_rank() <= max_h_rank {
                    out.entry(p.id.clone()).or_insert(p);
                }
            }
            let Some(i) = tuple.iter().position(|&v| v < max_param) else {
                break;
            };
            tuple[..i].iter_mut().for_each(|v| *v = 0);
            tuple[i] += 1;
        }
    }
    for p in extra_pairs() {
        if p.h_u.torus_rank() <= max_h_rank {
            out.insert(p.id.clone(), p);
        }
    }
    out.into_values().collect()
}

fn custom(
    id: &str,
    g: Vec<ClassicalFactor>,
    h: Vec<ClassicalFactor>,
    h_in_g: ckforms::Embedding,
    kh_in_h: ckforms::Embedding,
) -> PairSpec {
    let g_u = GroupSpec::new(g).unwrap();
    let h_u = GroupSpec::new(h).unwrap();
    let map_h_in_g = ckforms::builtin_torus_map(&h_in_g).unwrap();
    let map_kh_in_h = ckforms::builtin_torus_map(&kh_in_h).unwrap();
    let p = PairSpec {
        id: id.into(),
        ranks: ckforms::Ranks {
            g: g_u.torus_rank(),
            h: h_u.torus_rank(),
            kg: map_kh_in_h.sub_rank(),
            kh: map_kh_in_h.sub_rank(),
        },
        g_u,
        h_u,
        map_h_in_g,
        map_kh_in_h,
        flags: Default::default(),
        notes: String::new(),
    };
    p.validate().unwrap();
    p
}

/// Pairs outside the catalog families: symplectic blocks, a non-odd
/// orthogonal split and a rank-one unitary case.
pub fn extra_pairs() -> Vec<PairSpec> {
    use ckforms::Embedding as E;
    let f = |fam, n| ClassicalFactor::new(fam, n).unwrap();
    vec![
        custom(
            "sp2-sp1sp1-diag",
            vec![f(Family::Sp, 2)],
            vec![f(Family::Sp, 1), f(Family::Sp, 1)],
            E::SpBlocks {
                parts: vec![1, 1],
                total: 2,
            },
            E::Diagonal {
                rank: 1,
                signs: vec![1, 1],
            },
        ),
        custom(
            "sl3r-so12",
            vec![f(Family::SU, 3)],
            vec![f(Family::SOOdd, 3)],
            E::SoInSu { n: 3 },
            E::SoBlocks {
                parts: vec![1, 2],
                total: 3,
            },
        ),
        custom(
            "gl2r-gl1c",
            vec![f(Family::U, 2)],
            vec![f(Family::U, 1), f(Family::U, 1)],
            E::UBlocks {
                parts: vec![1, 1],
                total: 2,
            },
            E::Diagonal {
                rank: 1,
                signs: vec![1, -1],
            },
        ),
        custom(
            "sp2-u2",
            vec![f(Family::Sp, 2)],
            vec![f(Family::U, 2)],
            E::Identity { rank: 2 },
            E::SoInU { n: 2 },
        ),
    ]
}

/// Runs the library search and the oracle side by side up to `max_degree`
/// and reports the first disagreement. Kernel and invariant dimensions are
/// compared in every degree; ideal ranks in the degrees the search visited.
/// Returns the degree of the first obstruction.
pub fn compare_with_oracle(p: &PairSpec, max_degree: u32) -> Result<Option<u32>, String> {
    use ckforms::restriction::{graded_kernel, GeneratorImages};
    let opts = ckforms::CheckOptions {
        max_degree,
        force_search: true,
    };
    let res = ckforms::check_obstruction_with(p, &opts).map_err(|e| format!("{}: {e}", p.id))?;
    let gens = ckforms::invariant_generators(&p.h_u);
    let mut images = GeneratorImages::restricted(&gens, &p.map_kh_in_h).map_err(|e| e.to_string())?;
    let mut oracle = Oracle::new(p);
    let mut first = None;
    for d in 1..=max_degree {
        let data = oracle.degree(d);
        let s = data.stats;
        let k = graded_kernel(&gens, &mut images, d);
        if (s.invariant_dim, s.kernel_dim) != (k.basis.len(), k.kernel.len()) {
            return Err(format!(
                "{}: degree {d} (invariants, kernel): oracle {:?}, library {:?}",
                p.id,
                (s.invariant_dim, s.kernel_dim),
                (k.basis.len(), k.kernel.len())
            ));
        }
        if first.is_some() {
            continue;
        }
        let lib = res
            .stats
            .iter()
            .find(|x| x.degree == d)
            .ok_or_else(|| format!("{}: library has no statistics for degree {d}", p.id))?;
        let ours = (s.invariant_dim, s.kernel_dim, s.ideal_dim);
        let theirs = (lib.hilbert_dim, lib.kernel_dim, lib.ideal_rank);
        if ours != theirs {
            return Err(format!(
                "{}: degree {d} (invariants, kernel, ideal): oracle {ours:?}, library {theirs:?}",
                p.id
            ));
        }
        if s.obstructed() {
            let w = res
                .witness
                .as_ref()
                .ok_or_else(|| format!("{}: no witness", p.id))?;
            let wt = from_library(&w.to_torus_poly(&p.h_u).map_err(|e| e.to_string())?);
            if !data.invariants.contains(&wt) || !data.kernel.contains(&wt) || data.ideal.contains(&wt) {
                return Err(format!("{}: oracle rejects witness {w}", p.id));
            }
            first = Some(d);
        }
    }
    if first != res.degree {
        return Err(format!(
            "{}: oracle obstructed at {first:?}, library at {:?}",
            p.id, res.degree
        ));
    }
    Ok(first)
}
