//! The graded non-containment test and the end-to-end verdict.
//!
//! For each degree the search computes the restriction kernel in generator
//! coordinates of `H_U` and the degree piece of the ideal generated by
//! restricted `G_U` invariants, expressed in the same coordinates. A kernel
//! basis vector outside that span is a witness. Every witness is then
//! re-verified in raw torus coordinates by [`verify_witness`], which shares
//! no code path with the search beyond the polynomial type itself.

use std::collections::HashMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{generator_monomials, invariant_generators, Generator, GroupSpec};
use crate::linalg::{self, Echelon, SparseVec};
use crate::poly::{to_graded_vector, GradedVector, Monomial, Polynomial, Rational};
use crate::restriction::{graded_kernel, restrict_generator, ColumnIndex, GeneratorImages, KernelElement};
use crate::torus::TorusMap;

/// Ranks of `G`, `H` and of their maximal compact subgroups `K_G`, `K_H`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ranks {
    pub g: usize,
    pub h: usize,
    pub kg: usize,
    pub kh: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairFlags {
    /// `G` is the complexification of `H`.
    #[serde(default)]
    pub complexification: bool,
}

/// Compact data `(G_U, H_U, K_H)` of a homogeneous space `G/H`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PairSpec {
    pub id: String,
    pub g_u: GroupSpec,
    pub h_u: GroupSpec,
    /// `T_{H_U} ⊂ T_{G_U}`.
    pub map_h_in_g: TorusMap,
    /// `T_{K_H} ⊂ T_{H_U}`.
    pub map_kh_in_h: TorusMap,
    pub ranks: Ranks,
    pub flags: PairFlags,
    pub notes: String,
}

impl PairSpec {
    /// Checks shapes, injectivity and rank metadata. Errors name the field.
    pub fn validate(&self) -> Result<()> {
        use crate::error::Error as E;
        let (g, h) = (self.g_u.torus_rank(), self.h_u.torus_rank());
        let hg = &self.map_h_in_g;
        let kh = &self.map_kh_in_h;
        if hg.ambient_rank() != g || hg.sub_rank() != h {
            return Err(E::pair(
                "map_h_in_g",
                format!(
                    "expected a {g} x {h} matrix, got {} x {}",
                    hg.ambient_rank(),
                    hg.sub_rank()
                ),
            ));
        }
        if kh.ambient_rank() != h {
            return Err(E::pair(
                "map_kh_in_h",
                format!("expected {h} rows, got {}", kh.ambient_rank()),
            ));
        }
        if !hg.is_injective() {
            return Err(E::pair("map_h_in_g", "torus map not injective"));
        }
        if !kh.is_injective() {
            return Err(E::pair("map_kh_in_h", "torus map not injective"));
        }
        let r = self.ranks;
        if r.g != g {
            return Err(E::pair(
                "ranks.g",
                format!("rank_g = {} but G_U has torus rank {g}", r.g),
            ));
        }
        if r.h != h {
            return Err(E::pair(
                "ranks.h",
                format!("rank_h = {} but H_U has torus rank {h}", r.h),
            ));
        }
        if r.kh != kh.sub_rank() {
            return Err(E::pair(
                "ranks.kh",
                format!("rank_kh = {} but map_kh_in_h has {} columns", r.kh, kh.sub_rank()),
            ));
        }
        if r.kg > r.g {
            return Err(E::pair(
                "ranks.kg",
                format!("rank_kg = {} exceeds rank_g = {}", r.kg, r.g),
            ));
        }
        if r.kh > r.kg {
            return Err(E::pair(
                "ranks.kg",
                format!("rank_kg = {} is below rank_kh = {}", r.kg, r.kh),
            ));
        }
        Ok(())
    }

    /// `T_{K_H} → T_{G_U}`.
    pub fn map_kh_in_g(&self) -> Result<TorusMap> {
        self.map_h_in_g.compose(&self.map_kh_in_h)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Applicability {
    Applicable,
    /// `rank H = rank K_H`: restriction is injective, the kernel is zero.
    EqualRankHK,
    /// `G` is a complexification of `H`.
    Complexification,
}

pub fn applicability_precheck(p: &PairSpec) -> Applicability {
    if p.flags.complexification {
        Applicability::Complexification
    } else if p.ranks.h == p.ranks.kh {
        Applicability::EqualRankHK
    } else {
        Applicability::Applicable
    }
}

/// `rank G = rank H` and `rank K_G > rank K_H`.
pub fn rank_criterion(p: &PairSpec) -> bool {
    p.ranks.g == p.ranks.h && p.ranks.kg > p.ranks.kh
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Verdict {
    ObstructionFound,
    InconclusiveUpTo(u32),
    Inapplicable(Applicability),
}

/// The two facts that make a witness a proof.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct Certificate {
    pub restricts_to_zero: bool,
    pub outside_ideal: bool,
}

impl Certificate {
    pub fn holds(&self) -> bool {
        self.restricts_to_zero && self.outside_ideal
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct DegreeStats {
    pub degree: u32,
    pub hilbert_dim: usize,
    pub kernel_dim: usize,
    pub image_rank: usize,
    pub ideal_rank: usize,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ObstructionResult {
    pub pair_id: String,
    pub verdict: Verdict,
    pub witness: Option<KernelElement>,
    pub degree: Option<u32>,
    pub certificate: Option<Certificate>,
    /// Outcome of the rank pre-check, reported beside the graded verdict.
    pub rank_criterion: bool,
    pub stats: Vec<DegreeStats>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct CheckOptions {
    pub max_degree: u32,
    /// Run the graded search even when the pair is provably inapplicable.
    pub force_search: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            max_degree: 12,
            force_search: false,
        }
    }
}

/// Restriction of one `G_U` generator to `T_{H_U}`, written in generator
/// coordinates of `H_U`. `None` when the restriction vanishes.
fn restricted_in_generators(
    p: &PairSpec,
    g: &Generator,
    h_gens: &[Generator],
    h_torus: &mut GeneratorImages,
) -> Result<Option<Vec<(Monomial, Rational)>>> {
    let q = restrict_generator(g, &p.map_h_in_g)?;
    if q.is_zero() {
        return Ok(None);
    }
    let basis = generator_monomials(h_gens, g.poly_degree);
    let mut cols = ColumnIndex::default();
    let spanning: Vec<SparseVec> = basis.iter().map(|m| cols.vector(h_torus.image(m))).collect();
    let target = cols.vector(&q);
    let coeffs = linalg::solve_in_span(&target, &spanning).ok_or(Error::NotInvariant {
        generator: g.name.clone(),
    })?;
    Ok(Some(
        basis
            .into_iter()
            .zip(coeffs)
            .filter(|(_, c)| !c.is_zero())
            .collect(),
    ))
}

/// Search state carried across degrees. Ambient generators are converted
/// to `H_U` generator coordinates only once the search reaches their degree.
struct Search<'a> {
    pair: &'a PairSpec,
    h_gens: Vec<Generator>,
    h_torus: GeneratorImages,
    k_images: GeneratorImages,
    pending: Vec<Generator>,
    rho: Vec<(u32, Vec<(Monomial, Rational)>)>,
}

struct DegreeOutcome {
    stats: DegreeStats,
    witness: Option<Vec<Rational>>,
}

impl<'a> Search<'a> {
    fn new(p: &'a PairSpec) -> Result<Self> {
        let h_gens = invariant_generators(&p.h_u);
        let h_torus = GeneratorImages::torus(&h_gens, p.h_u.torus_rank());
        let k_images = GeneratorImages::restricted(&h_gens, &p.map_kh_in_h)?;
        Ok(Search {
            pair: p,
            h_gens,
            h_torus,
            k_images,
            pending: invariant_generators(&p.g_u),
            rho: Vec::new(),
        })
    }

    fn degree(&mut self, d: u32) -> Result<DegreeOutcome> {
        let (due, later): (Vec<Generator>, Vec<Generator>) = std::mem::take(&mut self.pending)
            .into_iter()
            .partition(|g| g.poly_degree <= d);
        self.pending = later;
        for g in &due {
            if let Some(terms) = restricted_in_generators(self.pair, g, &self.h_gens, &mut self.h_torus)? {
                self.rho.push((g.poly_degree, terms));
            }
        }

        let gk = graded_kernel(&self.h_gens, &mut self.k_images, d);
        let position: HashMap<&Monomial, usize> = gk.basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut ideal = Echelon::new();
        for (e, terms) in self.rho.iter().filter(|(e, _)| *e <= d) {
            for b in generator_monomials(&self.h_gens, d - e) {
                let v: SparseVec = terms
                    .iter()
                    .map(|(m, c)| (position[&m.mul(&b)], c.clone()))
                    .collect();
                ideal.insert(v);
            }
        }
        let witness = gk
            .kernel
            .iter()
            .find(|k| !ideal.contains(&linalg::to_sparse(k)))
            .cloned();
        Ok(DegreeOutcome {
            stats: DegreeStats {
                degree: d,
                hilbert_dim: gk.basis.len(),
                kernel_dim: gk.kernel.len(),
                image_rank: gk.image_rank,
                ideal_rank: ideal.rank(),
            },
            witness,
        })
    }
}

/// Spanning vectors of the degree-`d` piece of the ideal generated by
/// restrictions of positive-degree `G_U` invariants, in the torus-monomial
/// basis of `T_{H_U}`.
pub fn ideal_piece(p: &PairSpec, d: u32) -> Result<Vec<GradedVector>> {
    p.validate()?;
    let h_gens = invariant_generators(&p.h_u);
    let mut h_torus = GeneratorImages::torus(&h_gens, p.h_u.torus_rank());
    let mut out = Vec::new();
    for g in invariant_generators(&p.g_u) {
        let e = g.poly_degree;
        if e > d {
            continue;
        }
        let q = g.torus_poly().substitute_linear(&p.map_h_in_g)?;
        if q.is_zero() {
            continue;
        }
        for b in generator_monomials(&h_gens, d - e) {
            out.push(to_graded_vector(&(&q * h_torus.image(&b)), d)?);
        }
    }
    Ok(out)
}

fn certify(p: &PairSpec, w: &KernelElement) -> Result<Certificate> {
    if w.is_zero() {
        return Ok(Certificate {
            restricts_to_zero: true,
            outside_ideal: false,
        });
    }
    let torus = w.to_torus_poly(&p.h_u)?;
    let restricts_to_zero = torus.substitute_linear(&p.map_kh_in_h)?.is_zero();
    let target = to_graded_vector(&torus, w.degree)?;
    let outside_ideal = !linalg::in_span(&target, &ideal_piece(p, w.degree)?);
    Ok(Certificate {
        restricts_to_zero,
        outside_ideal,
    })
}

/// Re-checks, from fresh torus expansions, that `w` restricts to zero on
/// `T_{K_H}` and lies outside the ideal piece of its degree.
pub fn verify_witness(p: &PairSpec, w: &KernelElement) -> Result<bool> {
    p.validate()?;
    Ok(certify(p, w)?.holds())
}

pub fn check_obstruction(p: &PairSpec, max_degree: u32) -> Result<ObstructionResult> {
    check_obstruction_with(
        p,
        &CheckOptions {
            max_degree,
            ..CheckOptions::default()
        },
    )
}

/// Runs the pre-checks, then searches degrees `1..=max_degree` in order and
/// stops at the first witness. A forced search on an inapplicable pair
/// reports whatever the search finds.
pub fn check_obstruction_with(p: &PairSpec, opts: &CheckOptions) -> Result<ObstructionResult> {
    p.validate()?;
    if opts.max_degree == 0 {
        return Err(Error::pair("max_degree", "must be at least 1"));
    }
    let mut result = ObstructionResult {
        pair_id: p.id.clone(),
        verdict: Verdict::InconclusiveUpTo(opts.max_degree),
        witness: None,
        degree: None,
        certificate: None,
        rank_criterion: rank_criterion(p),
        stats: Vec::new(),
    };
    let applicability = applicability_precheck(p);
    if applicability != Applicability::Applicable && !opts.force_search {
        result.verdict = Verdict::Inapplicable(applicability);
        return Ok(result);
    }
    let mut search = Search::new(p)?;
    for d in 1..=opts.max_degree {
        let outcome = search.degree(d)?;
        result.stats.push(outcome.stats);
        if let Some(coeffs) = outcome.witness {
            let w = KernelElement::new(&p.h_u, d, coeffs)?;
            let cert = certify(p, &w)?;
            if !cert.holds() {
                return Err(Error::Certificate(format!("{} ({})", p.id, w.pretty)));
            }
            result.verdict = Verdict::ObstructionFound;
            result.witness = Some(w);
            result.degree = Some(d);
            result.certificate = Some(cert);
            return Ok(result);
        }
    }
    Ok(result)
}

/// Restriction of every `G_U` generator to `T_{H_U}`, in torus coordinates.
pub fn restricted_generators(p: &PairSpec) -> Result<Vec<(Generator, Polynomial)>> {
    invariant_generators(&p.g_u)
        .into_iter()
        .map(|g| {
            let q = restrict_generator(&g, &p.map_h_in_g)?;
            Ok((g, q))
        })
        .collect()
}
