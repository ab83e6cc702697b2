//! Built-in pairs, parametrised families, the two enlargement constructions
//! and the JSON pair-file format.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{generator_monomials, invariant_generators, ClassicalFactor, Family, GroupSpec};
use crate::obstruction::{Applicability, PairFlags, PairSpec, Ranks};
use crate::restriction::{builtin_torus_map, parse_witness, Embedding, KernelElement};
use crate::torus::TorusMap;

/// Largest ambient torus rank accepted for family instances.
pub const MAX_FAMILY_RANK: usize = 12;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ExpectedVerdict {
    ObstructionFound,
    Inconclusive,
    Inapplicable(Applicability),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Expected {
    pub verdict: ExpectedVerdict,
    /// Witness the checker reports, by rendered name.
    pub witness: Option<String>,
    pub degree: Option<u32>,
    /// A further named element expected in the kernel and outside the ideal.
    pub reference_witness: Option<String>,
    /// Expectation stated without a worked proof; a mismatch is a finding.
    pub tentative: bool,
}

impl Expected {
    fn found(witness: &str, degree: u32) -> Self {
        Expected {
            verdict: ExpectedVerdict::ObstructionFound,
            witness: Some(witness.to_string()),
            degree: Some(degree),
            reference_witness: None,
            tentative: false,
        }
    }

    fn inapplicable(a: Applicability) -> Self {
        Expected {
            verdict: ExpectedVerdict::Inapplicable(a),
            witness: None,
            degree: None,
            reference_witness: None,
            tentative: false,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CatalogEntry {
    pub pair: PairSpec,
    pub expected: Expected,
    pub source: String,
    /// Human-readable `G/H`.
    pub description: String,
    pub family: String,
    pub params: Vec<u32>,
    pub alias: Option<String>,
}

impl CatalogEntry {
    pub fn id(&self) -> &str {
        &self.pair.id
    }

    pub fn matches(&self, selector: &str) -> bool {
        self.pair.id == selector || self.alias.as_deref() == Some(selector)
    }

    /// The expected witness parsed over `H_U`, if any.
    pub fn expected_witness(&self) -> Result<Option<KernelElement>> {
        self.expected
            .witness
            .as_deref()
            .map(|w| parse_witness(&self.pair.h_u, w))
            .transpose()
    }
}

/// Parameter names of each built-in family, in instantiation order.
pub const FAMILIES: &[(&str, &[&str])] = &[
    ("gl-2n-r-gl-n-c", &["n"]),
    ("sl-pq-so-pq", &["p", "q"]),
    ("o-nn-o-nc", &["n"]),
    ("o-pqrs", &["p", "q", "r", "s"]),
    ("sl-r-blocks", &["n1", "n2"]),
    ("sl-c-blocks", &["n1", "n2"]),
    ("sl-h-blocks", &["n1", "n2"]),
    ("o-pq-blocks", &["p1", "q1", "p2", "q2", "p3", "q3"]),
    ("o-c-blocks", &["n1", "n2"]),
    ("sp-c-blocks", &["n1", "n2"]),
    ("u-prq-upq-ur", &["p", "r", "q"]),
    ("sl-c-sl-r", &["n"]),
];

pub fn family_params(family: &str) -> Result<&'static [&'static str]> {
    FAMILIES
        .iter()
        .find(|(f, _)| *f == family)
        .map(|(_, p)| *p)
        .ok_or_else(|| Error::UnknownFamily(family.to_string()))
}

fn group(factors: Vec<ClassicalFactor>) -> Result<GroupSpec> {
    GroupSpec::new(factors)
}

fn map(e: Embedding) -> Result<TorusMap> {
    builtin_torus_map(&e)
}

fn so(n: u32) -> Result<ClassicalFactor> {
    ClassicalFactor::so(n)
}

fn su(n: u32) -> Result<ClassicalFactor> {
    ClassicalFactor::su(n)
}

struct Instance {
    g_u: GroupSpec,
    h_u: GroupSpec,
    map_h_in_g: TorusMap,
    map_kh_in_h: TorusMap,
    kg: usize,
    complexification: bool,
    description: String,
    source: &'static str,
    notes: String,
}

fn inadmissible(family: &str, reason: &str) -> Error {
    Error::OutOfBounds {
        family: family.to_string(),
        reason: reason.to_string(),
    }
}

/// Checks the family's hypotheses; `Err` carries the reason a tuple is
/// outside the family.
pub fn admissible(family: &str, p: &[u32]) -> Result<()> {
    let names = family_params(family)?;
    if p.len() != names.len() {
        return Err(inadmissible(
            family,
            &format!("expected parameters {}", names.join(",")),
        ));
    }
    let odd = |x: u32| x % 2 == 1;
    let ok = match family {
        "gl-2n-r-gl-n-c" | "o-nn-o-nc" | "sl-c-sl-r" => p[0] >= 2,
        "sl-pq-so-pq" => odd(p[0]) && odd(p[1]),
        "o-pqrs" => odd(p[0]) && odd(p[1]) && p[2] >= 1,
        "sl-r-blocks" => p[0] >= 3 && p[1] >= 3,
        "sl-c-blocks" | "sl-h-blocks" => p[0] >= 2 && p[1] >= 2,
        "o-pq-blocks" => odd(p[0]) && odd(p[1]) && p[2] >= 1 && p[4] + p[5] >= 1,
        "o-c-blocks" => (p[0] >= 2 && p[1] >= 2) || (p[0] >= 2 && p[0].is_multiple_of(2) && p[1] == 1),
        "sp-c-blocks" => p[0] >= 1 && p[1] >= 1,
        "u-prq-upq-ur" => p[1] >= 1 && p[2] >= 1 && p[0] >= p[2],
        _ => unreachable!("family list and admissibility table agree"),
    };
    if ok {
        Ok(())
    } else {
        Err(inadmissible(family, "parameters violate the family's hypotheses"))
    }
}

fn instance(family: &str, p: &[u32]) -> Result<Instance> {
    let inst = match family {
        "gl-2n-r-gl-n-c" => {
            let n = p[0];
            let u = ClassicalFactor::u(n)?;
            Instance {
                g_u: group(vec![ClassicalFactor::u(2 * n)?])?,
                h_u: group(vec![u, u])?,
                map_h_in_g: map(Embedding::UBlocks {
                    parts: vec![n, n],
                    total: 2 * n,
                })?,
                map_kh_in_h: map(Embedding::Diagonal {
                    rank: n as usize,
                    signs: vec![1, -1],
                })?,
                kg: n as usize,
                complexification: false,
                description: format!("GL({},R)/GL({n},C)", 2 * n),
                source: "symmetric list: GL(2n,R)/GL(n,C)",
                notes: "K_H = {(A, conj A)} in U(n) x U(n).".into(),
            }
        }
        "sl-pq-so-pq" => {
            let (a, b) = (p[0], p[1]);
            let n = a + b;
            Instance {
                g_u: group(vec![su(n)?])?,
                h_u: group(vec![so(n)?])?,
                map_h_in_g: map(Embedding::SoInSu { n })?,
                map_kh_in_h: map(Embedding::SoBlocks { parts: vec![a, b], total: n })?,
                kg: n as usize / 2,
                complexification: false,
                description: format!("SL({n},R)/SO({a},{b})"),
                source: "symmetric list: SL(p+q,R)/SO(p,q), p,q odd",
                notes: "SO(p,q) replaced by its identity component. Special cases were known earlier by other methods."
                    .into(),
            }
        }
        "o-nn-o-nc" => {
            let n = p[0];
            let r = n as usize / 2;
            Instance {
                g_u: group(vec![so(2 * n)?])?,
                h_u: group(vec![so(n)?, so(n)?])?,
                map_h_in_g: map(Embedding::SoBlocks {
                    parts: vec![n, n],
                    total: 2 * n,
                })?,
                map_kh_in_h: map(Embedding::Diagonal {
                    rank: r,
                    signs: vec![1, 1],
                })?,
                kg: 2 * r,
                complexification: false,
                description: format!("O({n},{n})/O({n},C)"),
                source: "symmetric list: O(n,n)/O(n,C)",
                notes: "Identity components used throughout.".into(),
            }
        }
        "o-pqrs" => {
            let (a, b, c, d) = (p[0], p[1], p[2], p[3]);
            let n = a + b + c + d;
            Instance {
                g_u: group(vec![so(n)?])?,
                h_u: group(vec![so(a + b)?, so(c + d)?])?,
                map_h_in_g: map(Embedding::SoBlocks {
                    parts: vec![a + b, c + d],
                    total: n,
                })?,
                map_kh_in_h: map(Embedding::Product(vec![
                    Embedding::SoBlocks {
                        parts: vec![a, b],
                        total: a + b,
                    },
                    Embedding::SoBlocks {
                        parts: vec![c, d],
                        total: c + d,
                    },
                ]))?,
                kg: ((a + c) / 2 + (b + d) / 2) as usize,
                complexification: false,
                description: format!("O({},{})/(O({a},{b}) x O({c},{d}))", a + c, b + d),
                source: "symmetric list: O(p+r,q+s)/(O(p,q) x O(r,s)), p,q odd, r>0",
                notes: "Several instances were known earlier by other methods.".into(),
            }
        }
        "sl-r-blocks" => {
            let (a, b) = (p[0], p[1]);
            Instance {
                g_u: group(vec![su(a + b)?])?,
                h_u: group(vec![su(a)?, su(b)?])?,
                map_h_in_g: map(Embedding::SuBlocks {
                    parts: vec![a, b],
                    total: a + b,
                })?,
                map_kh_in_h: map(Embedding::Product(vec![
                    Embedding::SoInSu { n: a },
                    Embedding::SoInSu { n: b },
                ]))?,
                kg: (a + b) as usize / 2,
                complexification: false,
                description: format!("SL({},R)/(SL({a},R) x SL({b},R))", a + b),
                source: "non-symmetric list: SL(n1+...+nk,R)/(SL(n1,R) x ... x SL(nk,R))",
                notes: String::new(),
            }
        }
        "sl-c-blocks" => {
            let (a, b) = (p[0], p[1]);
            let (ra, rb) = (a as usize - 1, b as usize - 1);
            let h = vec![su(a)?, su(b)?, su(a)?, su(b)?];
            Instance {
                g_u: group(vec![su(a + b)?, su(a + b)?])?,
                h_u: group(h)?,
                map_h_in_g: map(Embedding::Product(vec![
                    Embedding::SuBlocks {
                        parts: vec![a, b],
                        total: a + b,
                    },
                    Embedding::SuBlocks {
                        parts: vec![a, b],
                        total: a + b,
                    },
                ]))?,
                map_kh_in_h: map(Embedding::Diagonal {
                    rank: ra + rb,
                    signs: vec![1, -1],
                })?,
                kg: (a + b) as usize - 1,
                complexification: false,
                description: format!("SL({},C)/(SL({a},C) x SL({b},C))", a + b),
                source: "non-symmetric list: SL(n1+...+nk,C)/(SL(n1,C) x ... x SL(nk,C))",
                notes: "K_H = SU(n1) x SU(n2) embedded as (A, conj A).".into(),
            }
        }
        "sl-h-blocks" => {
            let (a, b) = (p[0], p[1]);
            Instance {
                g_u: group(vec![su(2 * (a + b))?])?,
                h_u: group(vec![su(2 * a)?, su(2 * b)?])?,
                map_h_in_g: map(Embedding::SuBlocks {
                    parts: vec![2 * a, 2 * b],
                    total: 2 * (a + b),
                })?,
                map_kh_in_h: map(Embedding::Product(vec![
                    Embedding::SpInSu { n: a },
                    Embedding::SpInSu { n: b },
                ]))?,
                kg: (a + b) as usize,
                complexification: false,
                description: format!("SL({},H)/(SL({a},H) x SL({b},H))", a + b),
                source: "non-symmetric list: SL(n1+...+nk,H)/(SL(n1,H) x ... x SL(nk,H))",
                notes: String::new(),
            }
        }
        "o-pq-blocks" => {
            let blocks: Vec<(u32, u32)> = p.chunks(2).map(|c| (c[0], c[1])).collect();
            let sizes: Vec<u32> = blocks.iter().map(|(a, b)| a + b).collect();
            let n: u32 = sizes.iter().sum();
            let (pp, qq): (u32, u32) = (blocks.iter().map(|b| b.0).sum(), blocks.iter().map(|b| b.1).sum());
            let h: Vec<String> = blocks.iter().map(|(a, b)| format!("O({a},{b})")).collect();
            Instance {
                g_u: group(vec![so(n)?])?,
                h_u: group(sizes.iter().map(|&s| so(s)).collect::<Result<_>>()?)?,
                map_h_in_g: map(Embedding::SoBlocks {
                    parts: sizes.clone(),
                    total: n,
                })?,
                map_kh_in_h: map(Embedding::Product(
                    blocks
                        .iter()
                        .map(|&(a, b)| Embedding::SoBlocks {
                            parts: vec![a, b],
                            total: a + b,
                        })
                        .collect(),
                ))?,
                kg: (pp / 2 + qq / 2) as usize,
                complexification: false,
                description: format!("O({pp},{qq})/({})", h.join(" x ")),
                source: "non-symmetric list: O(p1+...+pk,q1+...+qk)/(O(p1,q1) x ... x O(pk,qk))",
                notes: String::new(),
            }
        }
        "o-c-blocks" | "sp-c-blocks" => {
            let (a, b) = (p[0], p[1]);
            let symplectic = family == "sp-c-blocks";
            let f = |n: u32| if symplectic { ClassicalFactor::sp(n) } else { so(n) };
            let rank = |n: u32| if symplectic { n as usize } else { n as usize / 2 };
            let blocks = |total| {
                if symplectic {
                    Embedding::SpBlocks {
                        parts: vec![a, b],
                        total,
                    }
                } else {
                    Embedding::SoBlocks {
                        parts: vec![a, b],
                        total,
                    }
                }
            };
            let letter = if symplectic { "Sp" } else { "O" };
            Instance {
                g_u: group(vec![f(a + b)?, f(a + b)?])?,
                h_u: group(vec![f(a)?, f(b)?, f(a)?, f(b)?])?,
                map_h_in_g: map(Embedding::Product(vec![blocks(a + b), blocks(a + b)]))?,
                map_kh_in_h: map(Embedding::Diagonal {
                    rank: rank(a) + rank(b),
                    signs: vec![1, 1],
                })?,
                kg: rank(a + b),
                complexification: false,
                description: format!("{letter}({},C)/({letter}({a},C) x {letter}({b},C))", a + b),
                source: if symplectic {
                    "complex blocks: Sp(n1+...+nk,C)/(Sp(n1,C) x ... x Sp(nk,C))"
                } else if b == 1 {
                    "complex blocks, side case n1 even, n2 = 1 (no worked proof)"
                } else {
                    "complex blocks: O(n1+...+nk,C)/(O(n1,C) x ... x O(nk,C))"
                },
                notes: "Previously known by other methods.".into(),
            }
        }
        "u-prq-upq-ur" => {
            let (a, r, q) = (p[0], p[1], p[2]);
            let n = a + q + r;
            let blocks: Vec<u32> = [a, q, r].into_iter().filter(|&x| x > 0).collect();
            let h_parts: Vec<u32> = [a + q, r].into_iter().filter(|&x| x > 0).collect();
            Instance {
                g_u: group(vec![ClassicalFactor::u(n)?])?,
                h_u: group(
                    h_parts
                        .iter()
                        .map(|&x| ClassicalFactor::u(x))
                        .collect::<Result<_>>()?,
                )?,
                map_h_in_g: map(Embedding::UBlocks {
                    parts: h_parts.clone(),
                    total: n,
                })?,
                map_kh_in_h: map(Embedding::UBlocks {
                    parts: blocks,
                    total: n,
                })?,
                kg: n as usize,
                complexification: false,
                description: format!("U({},{q})/(U({a},{q}) x U({r}))", a + r),
                source: "inapplicable example: rank H = rank K_H",
                notes:
                    "Calabi-Markus phenomenon recorded as an annotation only; nothing about it is computed."
                        .into(),
            }
        }
        "sl-c-sl-r" => {
            let n = p[0];
            let r = n as usize - 1;
            Instance {
                g_u: group(vec![su(n)?, su(n)?])?,
                h_u: group(vec![su(n)?])?,
                map_h_in_g: map(Embedding::Diagonal {
                    rank: r,
                    signs: vec![1, -1],
                })?,
                map_kh_in_h: map(Embedding::SoInSu { n })?,
                kg: r,
                complexification: true,
                description: format!("SL({n},C)/SL({n},R)"),
                source: "inapplicable example: G is a complexification of H",
                notes: String::new(),
            }
        }
        other => return Err(Error::UnknownFamily(other.to_string())),
    };
    Ok(inst)
}

pub fn instance_id(family: &str, params: &[u32]) -> String {
    let p: Vec<String> = params.iter().map(u32::to_string).collect();
    format!("{family}({})", p.join(","))
}

/// The pair of one family member. Fails with [`Error::OutOfBounds`] when the
/// parameters violate the family's hypotheses or the ambient torus rank
/// exceeds [`MAX_FAMILY_RANK`].
pub fn family_instance(family: &str, params: &[u32]) -> Result<PairSpec> {
    admissible(family, params)?;
    let inst = instance(family, params)?;
    if inst.g_u.torus_rank() > MAX_FAMILY_RANK {
        return Err(inadmissible(
            family,
            &format!(
                "ambient torus rank {} exceeds {MAX_FAMILY_RANK}",
                inst.g_u.torus_rank()
            ),
        ));
    }
    let pair = PairSpec {
        id: instance_id(family, params),
        ranks: Ranks {
            g: inst.g_u.torus_rank(),
            h: inst.h_u.torus_rank(),
            kg: inst.kg,
            kh: inst.map_kh_in_h.sub_rank(),
        },
        g_u: inst.g_u,
        h_u: inst.h_u,
        map_h_in_g: inst.map_h_in_g,
        map_kh_in_h: inst.map_kh_in_h,
        flags: PairFlags {
            complexification: inst.complexification,
        },
        notes: inst.notes,
    };
    pair.validate()?;
    Ok(pair)
}

fn family_entry(family: &str, params: &[u32], expected: Expected, alias: Option<&str>) -> CatalogEntry {
    let pair = family_instance(family, params).expect("built-in parameters are admissible");
    let inst = instance(family, params).expect("built-in parameters are admissible");
    CatalogEntry {
        pair,
        expected,
        source: inst.source.to_string(),
        description: inst.description,
        family: family.to_string(),
        params: params.to_vec(),
        alias: alias.map(str::to_string),
    }
}

fn with_reference(mut e: Expected, reference: &str) -> Expected {
    e.reference_witness = Some(reference.to_string());
    e
}

/// Every built-in entry, in a fixed order.
pub fn builtin_entries() -> Vec<CatalogEntry> {
    use Applicability::*;
    let f = Expected::found;
    let mut out = vec![
        family_entry("gl-2n-r-gl-n-c", &[2], f("c2@1 - c2@2", 2), Some("gl4r-gl2c")),
        family_entry("gl-2n-r-gl-n-c", &[3], f("c2@1 - c2@2", 2), Some("gl6r-gl3c")),
        family_entry("sl-pq-so-pq", &[1, 1], f("e", 1), Some("sl2r-so11")),
        family_entry("sl-pq-so-pq", &[1, 3], f("e", 2), Some("sl4r-so13")),
        family_entry("sl-pq-so-pq", &[3, 3], f("e", 3), Some("sl6r-so33")),
        family_entry(
            "o-nn-o-nc",
            &[2],
            with_reference(f("e@1 - e@2", 1), "e@1^2 - e@2^2"),
            Some("o22-o2c"),
        ),
        family_entry("o-nn-o-nc", &[3], f("p1@1 - p1@2", 2), Some("o33-o3c")),
        family_entry("o-pqrs", &[1, 1, 1, 0], f("e@1", 1), None),
        family_entry("o-pqrs", &[1, 3, 2, 0], f("e@1", 2), None),
        family_entry("sl-r-blocks", &[3, 3], f("c3@1", 3), Some("sl6r-sl3r-sl3r")),
        family_entry("sl-c-blocks", &[2, 2], f("c2@1 - c2@3", 2), None),
        family_entry("sl-h-blocks", &[2, 2], f("c3@1", 3), None),
        family_entry("o-pq-blocks", &[1, 1, 2, 0, 0, 2], f("e@1", 1), None),
        family_entry("o-c-blocks", &[2, 2], f("e@1 - e@3", 1), None),
        family_entry(
            "o-c-blocks",
            &[2, 1],
            Expected {
                tentative: true,
                ..f("e@1 - e@3", 1)
            },
            None,
        ),
        family_entry("sp-c-blocks", &[1, 1], f("q1@1 - q1@3", 2), None),
        family_entry("sp-c-blocks", &[2, 2], f("q1@1 - q1@3", 2), None),
        family_entry(
            "u-prq-upq-ur",
            &[1, 1, 1],
            Expected::inapplicable(EqualRankHK),
            None,
        ),
        family_entry(
            "u-prq-upq-ur",
            &[2, 1, 1],
            Expected::inapplicable(EqualRankHK),
            None,
        ),
        family_entry(
            "sl-c-sl-r",
            &[2],
            Expected::inapplicable(Complexification),
            Some("sl2c-sl2r"),
        ),
        family_entry(
            "sl-c-sl-r",
            &[3],
            Expected::inapplicable(Complexification),
            Some("sl3c-sl3r"),
        ),
    ];
    let base = out
        .iter()
        .find(|e| e.pair.id == "sl-r-blocks(3,3)")
        .cloned()
        .expect("present above");
    out.push(enlarged_sl_r_blocks(&base).expect("built-in enlargement is valid"));
    out.push(appended_sl_r_blocks(&base).expect("built-in extension is valid"));
    out
}

/// `SL(6,R)/(SL(3,R) x SL(3,R))` inside `SL(8,R)`.
pub fn enlarged_sl_r_blocks(base: &CatalogEntry) -> Result<CatalogEntry> {
    let bigger = GroupSpec::single(su(8)?);
    let new_map = map(Embedding::SuBlocks {
        parts: vec![6],
        total: 8,
    })?;
    enlarge_ambient(base, &bigger, &new_map, 4)
}

/// `SL(8,R)/(SL(3,R) x SL(3,R) x SL(2,R))`.
pub fn appended_sl_r_blocks(base: &CatalogEntry) -> Result<CatalogEntry> {
    let extra = GroupSpec::single(su(2)?);
    let extra_kh = map(Embedding::SoInSu { n: 2 })?;
    let combined = map(Embedding::SuBlocks {
        parts: vec![3, 3, 2],
        total: 8,
    })?;
    let enlarged = enlarged_sl_r_blocks(base)?;
    append_central_factor(&enlarged, &extra, &extra_kh, &combined)
}

/// Replaces `G_U` by `bigger`, composing the torus map with `new_map`
/// (old ambient torus into the torus of `bigger`). `rank_kg` is the rank of
/// the maximal compact subgroup of the enlarged group.
pub fn enlarge_ambient(
    e: &CatalogEntry,
    bigger: &GroupSpec,
    new_map: &TorusMap,
    rank_kg: usize,
) -> Result<CatalogEntry> {
    let old = &e.pair;
    if new_map.ambient_rank() != bigger.torus_rank() || new_map.sub_rank() != old.g_u.torus_rank() {
        return Err(Error::DimensionMismatch(format!(
            "enlargement map must be {} x {}",
            bigger.torus_rank(),
            old.g_u.torus_rank()
        )));
    }
    if bigger == &old.g_u && *new_map == TorusMap::identity(bigger.torus_rank()) {
        return Ok(e.clone());
    }
    let mut pair = old.clone();
    pair.id = format!("{}+ambient-{}", old.id, bigger.to_string().replace(' ', ""));
    pair.g_u = bigger.clone();
    pair.map_h_in_g = new_map.compose(&old.map_h_in_g)?;
    pair.ranks.g = bigger.torus_rank();
    pair.ranks.kg = rank_kg;
    pair.validate()?;
    Ok(CatalogEntry {
        pair,
        expected: e.expected.clone(),
        source: "enlargement of the ambient group".into(),
        description: format!("{} with ambient {bigger}", e.description),
        family: "derived".into(),
        params: e.params.clone(),
        alias: None,
    })
}

/// Lifts a witness of the old `H_U` to `H_U x extra` as `w ⊗ 1`.
fn lift_witness(old_h: &GroupSpec, new_h: &GroupSpec, w: &str) -> Result<String> {
    let old = parse_witness(old_h, w)?;
    let new_gens = invariant_generators(new_h);
    let basis = generator_monomials(&new_gens, old.degree);
    let width = new_gens.len();
    let mut coeffs = vec![num_traits::Zero::zero(); basis.len()];
    for (m, c) in old.terms() {
        let mut exps = m.exponents().to_vec();
        exps.resize(width, 0);
        let target = crate::poly::Monomial::new(exps);
        let i = basis
            .iter()
            .position(|b| *b == target)
            .expect("old generators are a prefix of the new ones");
        coeffs[i] = c.clone();
    }
    Ok(KernelElement::new(new_h, old.degree, coeffs)?.pretty)
}

/// Appends `extra` as a new factor of `H_U`. `extra_kh_map` embeds the
/// torus of the new factor's maximal compact subgroup; `combined_h_in_g`
/// embeds the torus of the product into `G_U`.
pub fn append_central_factor(
    e: &CatalogEntry,
    extra: &GroupSpec,
    extra_kh_map: &TorusMap,
    combined_h_in_g: &TorusMap,
) -> Result<CatalogEntry> {
    let old = &e.pair;
    let h_u = old.h_u.product(extra);
    if h_u.torus_rank() > old.g_u.torus_rank() {
        return Err(Error::DimensionMismatch(format!(
            "combined torus rank {} exceeds the ambient rank {}",
            h_u.torus_rank(),
            old.g_u.torus_rank()
        )));
    }
    if extra_kh_map.ambient_rank() != extra.torus_rank() {
        return Err(Error::DimensionMismatch(format!(
            "extra factor map needs {} rows",
            extra.torus_rank()
        )));
    }
    let mut pair = old.clone();
    pair.id = format!("{}+factor-{}", old.id, extra.to_string().replace(' ', ""));
    pair.map_kh_in_h = TorusMap::block_diagonal(&[old.map_kh_in_h.clone(), extra_kh_map.clone()]);
    pair.map_h_in_g = combined_h_in_g.clone();
    pair.ranks.h = h_u.torus_rank();
    pair.ranks.kh = pair.map_kh_in_h.sub_rank();
    pair.h_u = h_u;
    pair.validate()?;
    let lift = |w: &Option<String>| -> Result<Option<String>> {
        w.as_deref()
            .map(|w| lift_witness(&old.h_u, &pair.h_u, w))
            .transpose()
    };
    let mut expected = e.expected.clone();
    expected.witness = lift(&e.expected.witness)?;
    expected.reference_witness = lift(&e.expected.reference_witness)?;
    Ok(CatalogEntry {
        expected,
        source: "appended factor of H".into(),
        description: format!("{} with extra factor {extra}", e.description),
        family: "derived".into(),
        params: e.params.clone(),
        alias: None,
        pair,
    })
}

/// Looks up a built-in id or alias, then falls back to a family instance
/// written as `family(a,b,...)`.
pub fn find_entry(selector: &str) -> Result<CatalogEntry> {
    if let Some(e) = builtin_entries().into_iter().find(|e| e.matches(selector)) {
        return Ok(e);
    }
    let parsed = selector
        .strip_suffix(')')
        .and_then(|s| s.split_once('('))
        .and_then(|(fam, args)| {
            let params: Option<Vec<u32>> = args.split(',').map(|a| a.trim().parse().ok()).collect();
            params.map(|p| (fam.to_string(), p))
        });
    let Some((family, params)) = parsed else {
        return Err(Error::UnknownPair(selector.to_string()));
    };
    if family_params(&family).is_err() {
        return Err(Error::UnknownPair(selector.to_string()));
    }
    let pair = family_instance(&family, &params)?;
    let inst = instance(&family, &params)?;
    Ok(CatalogEntry {
        pair,
        expected: Expected {
            verdict: ExpectedVerdict::Inconclusive,
            witness: None,
            degree: None,
            reference_witness: None,
            tentative: true,
        },
        source: inst.source.to_string(),
        description: inst.description,
        family,
        params,
        alias: None,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FactorFile {
    family: String,
    n: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairFile {
    id: String,
    g_u: Vec<FactorFile>,
    h_u: Vec<FactorFile>,
    map_h_in_g: Vec<Vec<i64>>,
    map_kh_in_h: Vec<Vec<i64>>,
    ranks: Ranks,
    #[serde(default)]
    flags: PairFlags,
    #[serde(default)]
    notes: String,
}

fn group_from_file(field: &str, factors: &[FactorFile]) -> Result<GroupSpec> {
    if factors.is_empty() {
        return Err(Error::pair(field, "needs at least one factor"));
    }
    let parsed = factors
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let here = format!("{field}[{i}]");
            let factor = match f.family.as_str() {
                "U" => ClassicalFactor::u(f.n),
                "SU" => ClassicalFactor::su(f.n),
                "SO" => ClassicalFactor::so(f.n),
                "Sp" => ClassicalFactor::sp(f.n),
                other => {
                    return Err(Error::pair(
                        &format!("{here}.family"),
                        format!("unknown family {other:?}; expected U, SU, SO or Sp"),
                    ))
                }
            };
            factor.map_err(|e| Error::pair(&here, e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    GroupSpec::new(parsed)
}

fn map_from_file(field: &str, rows: &[Vec<i64>]) -> Result<TorusMap> {
    let cols = rows.first().map_or(0, Vec::len);
    TorusMap::new(rows.len(), cols, rows.to_vec()).map_err(|e| Error::pair(field, e.to_string()))
}

/// Parses and validates a JSON pair file.
pub fn load_pair(content: &str) -> Result<PairSpec> {
    let file: PairFile = serde_json::from_str(content).map_err(|e| Error::Schema(e.to_string()))?;
    let pair = PairSpec {
        id: file.id,
        g_u: group_from_file("g_u", &file.g_u)?,
        h_u: group_from_file("h_u", &file.h_u)?,
        map_h_in_g: map_from_file("map_h_in_g", &file.map_h_in_g)?,
        map_kh_in_h: map_from_file("map_kh_in_h", &file.map_kh_in_h)?,
        ranks: file.ranks,
        flags: file.flags,
        notes: file.notes,
    };
    pair.validate()?;
    Ok(pair)
}

fn family_name(f: Family) -> &'static str {
    match f {
        Family::U => "U",
        Family::SU => "SU",
        Family::SOOdd | Family::SOEven => "SO",
        Family::Sp => "Sp",
    }
}

/// Renders a pair in the pair-file format.
pub fn serialize_pair(p: &PairSpec) -> String {
    let factors = |g: &GroupSpec| {
        g.factors()
            .iter()
            .map(|f| FactorFile {
                family: family_name(f.family()).to_string(),
                n: f.n(),
            })
            .collect()
    };
    let file = PairFile {
        id: p.id.clone(),
        g_u: factors(&p.g_u),
        h_u: factors(&p.h_u),
        map_h_in_g: p.map_h_in_g.rows().to_vec(),
        map_kh_in_h: p.map_kh_in_h.rows().to_vec(),
        ranks: p.ranks,
        flags: p.flags,
        notes: p.notes.clone(),
    };
    serde_json::to_string_pretty(&file).expect("plain data serializes")
}
