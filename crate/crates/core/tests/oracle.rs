mod common;

use std::time::Instant;

use ckforms::{hilbert_dimension, ClassicalFactor, Family, GroupSpec};
use common::{compare_with_oracle, exponent_vectors, small_pairs, Invariants, RawFactor};

fn factors(max_n: u32) -> Vec<ClassicalFactor> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        out.push(ClassicalFactor::u(n).unwrap());
        if n >= 2 {
            out.push(ClassicalFactor::su(n).unwrap());
        }
        out.push(ClassicalFactor::so(n).unwrap());
        out.push(ClassicalFactor::sp(n).unwrap());
    }
    out
}

#[test]
fn orbit_averages_match_explicit_group_sums() {
    for f in factors(4).iter().map(RawFactor::of) {
        for d in 0..=5 {
            for a in exponent_vectors(f.raw, d) {
                assert_eq!(f.reynolds_explicit(&a), f.reynolds_orbit(&a), "{f:?} {a:?}");
            }
        }
    }
}

#[test]
fn explicit_group_orders() {
    let order = |f: ClassicalFactor| RawFactor::of(&f).elements().len() as u128;
    for f in factors(4) {
        assert_eq!(order(f), f.weyl_order(), "{f}");
    }
}

#[test]
fn oracle_invariant_counts_match_hilbert_series() {
    let mut groups: Vec<GroupSpec> = factors(4).into_iter().map(GroupSpec::single).collect();
    groups.push(
        GroupSpec::new(vec![
            ClassicalFactor::su(3).unwrap(),
            ClassicalFactor::so(4).unwrap(),
        ])
        .unwrap(),
    );
    groups.push(
        GroupSpec::new(vec![
            ClassicalFactor::sp(2).unwrap(),
            ClassicalFactor::u(1).unwrap(),
        ])
        .unwrap(),
    );
    for g in &groups {
        let mut inv = Invariants::new(g);
        for d in 0..=8 {
            assert_eq!(
                inv.basis(d).len() as u64,
                hilbert_dimension(g, d),
                "{g} degree {d}"
            );
        }
    }
}

#[test]
fn so_even_has_the_pfaffian() {
    let f = RawFactor::of(&ClassicalFactor::new(Family::SOEven, 6).unwrap());
    assert_eq!(f.invariants(3).len(), 1);
}

#[test]
fn oracle_agrees_on_small_pairs() {
    let start = Instant::now();
    let pairs = small_pairs(2, 5);
    assert!(pairs.len() >= 20, "only {} pairs", pairs.len());
    let mut failures = Vec::new();
    for p in &pairs {
        if let Err(e) = compare_with_oracle(p, 6) {
            failures.push(e);
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
    eprintln!("{} pairs in {:?}", pairs.len(), start.elapsed());
}
