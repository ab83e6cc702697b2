mod common;

use std::collections::BTreeMap;

use ckforms::groups::{generator_monomials, independence_certificate, weyl_elements};
use ckforms::restriction::{graded_kernel, GeneratorImages};
use ckforms::{
    builtin_entries, builtin_torus_map, elementary_symmetric, hilbert_dimension, invariant_generators,
    restrict_generator, weyl_sample, ClassicalFactor, Embedding, GroupSpec, Polynomial,
};
use common::{elementary, from_library, mul, q, Poly, Span};

#[test]
fn whitney_sum_formula_for_unitary_blocks() {
    for a in 1..=3u32 {
        for b in 1..=3u32 {
            let n = (a + b) as usize;
            let g = GroupSpec::single(ClassicalFactor::u(a + b).unwrap());
            let m = builtin_torus_map(&Embedding::UBlocks {
                parts: vec![a, b],
                total: a + b,
            })
            .unwrap();
            let first: Vec<usize> = (0..a as usize).collect();
            let second: Vec<usize> = (a as usize..n).collect();
            for gen in invariant_generators(&g) {
                let i = gen.index as usize;
                let mut expected = Poly::new();
                for j in 0..=i {
                    if j <= a as usize && i - j <= b as usize {
                        for (mono, c) in mul(&elementary(n, &first, j), &elementary(n, &second, i - j)) {
                            *expected.entry(mono).or_insert_with(|| q(0)) += c;
                        }
                    }
                }
                let got = from_library(&restrict_generator(&gen, &m).unwrap());
                assert_eq!(got, expected, "c{i} on U({a}) x U({b})");
            }
        }
    }
}

#[test]
fn whitney_formula_in_block_generators() {
    let u = |n| ClassicalFactor::u(n).unwrap();
    for (a, b) in [(1, 2), (2, 2), (3, 1), (3, 3)] {
        let g = GroupSpec::single(u(a + b));
        let h = GroupSpec::new(vec![u(a), u(b)]).unwrap();
        let m = builtin_torus_map(&Embedding::UBlocks {
            parts: vec![a, b],
            total: a + b,
        })
        .unwrap();
        let hg = invariant_generators(&h);
        let by_name: BTreeMap<String, &Polynomial> =
            hg.iter().map(|x| (x.name.clone(), x.torus_poly())).collect();
        let one = Polynomial::one(h.torus_rank());
        let c = |k: u32, f: u32| -> Polynomial {
            if k == 0 {
                one.clone()
            } else {
                by_name
                    .get(&format!("c{k}@{f}"))
                    .map(|p| (*p).clone())
                    .unwrap_or_else(|| Polynomial::zero(h.torus_rank()))
            }
        };
        for gen in invariant_generators(&g) {
            let i = gen.index;
            let mut sum = Polynomial::zero(h.torus_rank());
            for j in 0..=i {
                sum = &sum + &(&c(j, 1) * &c(i - j, 2));
            }
            assert_eq!(restrict_generator(&gen, &m).unwrap(), sum, "c{i}");
        }
    }
}

#[test]
fn top_pontryagin_class_is_euler_squared() {
    for m in 1..=5u32 {
        let so = |n| ClassicalFactor::so(n).unwrap();
        let e = invariant_generators(&GroupSpec::single(so(2 * m)))
            .into_iter()
            .find(|x| x.name == "e")
            .expect("Euler class");
        let squared = e.torus_poly().pow(2);
        let mut direct = Poly::new();
        direct.insert(vec![2; m as usize], q(1));
        assert_eq!(from_library(&squared), direct, "SO({})", 2 * m);
        assert_eq!(elementary_symmetric(m as usize, m).unwrap().dilate(2), squared);

        // p_m of SO(2m+1) seen on SO(2m) x SO(1).
        let big = GroupSpec::single(so(2 * m + 1));
        let map = builtin_torus_map(&Embedding::SoBlocks {
            parts: vec![2 * m, 1],
            total: 2 * m + 1,
        })
        .unwrap();
        let pm = invariant_generators(&big)
            .into_iter()
            .find(|x| x.name == format!("p{m}"))
            .expect("top Pontryagin class");
        assert_eq!(restrict_generator(&pm, &map).unwrap(), squared, "SO({})", 2 * m);
    }
}

fn catalog_groups() -> Vec<GroupSpec> {
    let mut groups: Vec<GroupSpec> = Vec::new();
    for e in builtin_entries() {
        for g in [e.pair.g_u, e.pair.h_u] {
            if !groups.contains(&g) {
                groups.push(g);
            }
        }
    }
    groups
}

fn apply(p: &Polynomial, rows: &[Vec<i64>]) -> Polynomial {
    let forms: Vec<Polynomial> = rows.iter().map(|r| Polynomial::linear_form(r)).collect();
    p.compose(&forms).unwrap()
}

#[test]
fn generators_are_weyl_invariant() {
    let mut groups = catalog_groups();
    for n in 2..=5 {
        groups.push(GroupSpec::single(ClassicalFactor::su(n).unwrap()));
        groups.push(GroupSpec::single(ClassicalFactor::sp(n).unwrap()));
        groups.push(GroupSpec::single(ClassicalFactor::so(2 * n).unwrap()));
        groups.push(GroupSpec::single(ClassicalFactor::so(2 * n + 1).unwrap()));
    }
    for g in &groups {
        let elements = weyl_elements(g, 384).unwrap_or_else(|| weyl_sample(g, 64));
        assert!(
            elements.len() as u128 == g.weyl_order() || elements.len() >= 50,
            "{g}"
        );
        let gens = invariant_generators(g);
        for w in &elements {
            let rows = w.matrix(g).rows().to_vec();
            for gen in &gens {
                assert_eq!(
                    &apply(gen.torus_poly(), &rows),
                    gen.torus_poly(),
                    "{} of {g} under {w:?}",
                    gen.name
                );
            }
        }
    }
}

#[test]
fn weyl_action_moves_non_invariants() {
    let g = GroupSpec::single(ClassicalFactor::so(6).unwrap());
    let x1 = Polynomial::var(3, 0);
    let elements = weyl_elements(&g, 384).unwrap();
    assert!(elements.iter().any(|w| apply(&x1, w.matrix(&g).rows()) != x1));
}

#[test]
fn hilbert_counts_and_independence_for_catalog_groups() {
    for g in catalog_groups() {
        let gens = invariant_generators(&g);
        for d in 0..=12 {
            assert_eq!(
                generator_monomials(&gens, d).len() as u64,
                hilbert_dimension(&g, d),
                "{g} degree {d}"
            );
            assert!(independence_certificate(&g, d), "{g} degree {d}");
        }
    }
}

#[test]
fn rank_nullity_for_catalog_pairs() {
    for e in builtin_entries() {
        let p = &e.pair;
        let gens = invariant_generators(&p.h_u);
        let mut images = GeneratorImages::restricted(&gens, &p.map_kh_in_h).unwrap();
        for d in 1..=12 {
            let k = graded_kernel(&gens, &mut images, d);
            let mut span = Span::default();
            for m in &k.basis {
                span.insert(&from_library(images.image(m)));
            }
            assert_eq!(
                k.basis.len() as u64,
                hilbert_dimension(&p.h_u, d),
                "{} degree {d}",
                p.id
            );
            assert_eq!(span.rank(), k.image_rank, "{} degree {d}", p.id);
            assert_eq!(
                k.kernel.len() + k.image_rank,
                k.basis.len(),
                "{} degree {d}",
                p.id
            );
        }
    }
}
