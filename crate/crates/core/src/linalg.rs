//! Exact Gaussian elimination over `Q` on sparse rows.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::poly::{GradedVector, Rational};

/// Column index to non-zero entry.
pub type SparseVec = BTreeMap<usize, Rational>;

/// Row echelon form built incrementally. Every stored row has leading
/// coefficient 1 and its leading column is not used by any other row.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<SparseVec>,
    pivots: BTreeMap<usize, usize>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Subtracts pivot rows until no pivot column of `v` is non-zero.
    pub fn reduce(&self, mut v: SparseVec) -> SparseVec {
        let mut cursor = 0;
        loop {
            let next = v
                .range(cursor..)
                .find(|(c, _)| self.pivots.contains_key(c))
                .map(|(c, a)| (*c, a.clone()));
            let Some((col, factor)) = next else { break };
            let row = &self.rows[self.pivots[&col]];
            for (k, a) in row {
                let entry = v.entry(*k).or_insert_with(Rational::zero);
                *entry -= &factor * a;
                if entry.is_zero() {
                    v.remove(k);
                }
            }
            cursor = col + 1;
        }
        v
    }

    /// Adds `v`; returns false when it already lies in the span.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let mut r = self.reduce(v);
        let Some((&lead, a)) = r.iter().next() else {
            return false;
        };
        if !a.is_one() {
            let inv = a.recip();
            for x in r.values_mut() {
                *x *= &inv;
            }
        }
        self.pivots.insert(lead, self.rows.len());
        self.rows.push(r);
        true
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v.clone()).is_empty()
    }

    /// Reduced row echelon form, rows ordered by pivot column.
    pub fn into_reduced(self) -> Vec<SparseVec> {
        let mut rows: Vec<(usize, SparseVec)> = self
            .pivots
            .iter()
            .map(|(&c, &i)| (c, self.rows[i].clone()))
            .collect();
        for i in (0..rows.len()).rev() {
            let (col, pivot_row) = rows[i].clone();
            for (_, row) in rows.iter_mut().take(i) {
                let Some(factor) = row.get(&col).cloned() else {
                    continue;
                };
                for (k, a) in &pivot_row {
                    let entry = row.entry(*k).or_insert_with(Rational::zero);
                    *entry -= &factor * a;
                    if entry.is_zero() {
                        row.remove(k);
                    }
                }
            }
        }
        rows.into_iter().map(|(_, r)| r).collect()
    }
}

pub fn rank(vectors: &[SparseVec]) -> usize {
    let mut e = Echelon::new();
    for v in vectors {
        e.insert(v.clone());
    }
    e.rank()
}

pub fn rref(vectors: impl IntoIterator<Item = SparseVec>) -> Vec<SparseVec> {
    let mut e = Echelon::new();
    for v in vectors {
        e.insert(v);
    }
    e.into_reduced()
}

/// Basis of `{ c : sum_i c_i * vectors[i] = 0 }` in reduced row echelon form.
pub fn kernel_basis_sparse(vectors: &[SparseVec]) -> Vec<Vec<Rational>> {
    let n = vectors.len();
    let tag0 = vectors
        .iter()
        .filter_map(|v| v.keys().next_back())
        .max()
        .map_or(0, |c| c + 1);
    let mut e = Echelon::new();
    let mut relations = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        let mut row = v.clone();
        row.insert(tag0 + i, Rational::one());
        let r = e.reduce(row);
        match r.keys().next() {
            Some(&lead) if lead >= tag0 => {
                relations.push(r.into_iter().map(|(c, a)| (c - tag0, a)).collect());
            }
            _ => {
                e.insert(r);
            }
        }
    }
    rref(relations).into_iter().map(|r| to_dense(&r, n)).collect()
}

pub fn to_dense(v: &SparseVec, len: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); len];
    for (i, a) in v {
        out[*i] = a.clone();
    }
    out
}

pub fn to_sparse(v: &[Rational]) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|(_, a)| !a.is_zero())
        .map(|(i, a)| (i, a.clone()))
        .collect()
}

fn check_shape(vectors: &[&GradedVector]) {
    if let Some(first) = vectors.first() {
        for v in vectors {
            assert!(
                v.degree == first.degree && v.num_vars == first.num_vars,
                "graded vectors must share degree and variable count"
            );
        }
    }
}

/// Kernel of the linear combination map `c ↦ sum c_i * vectors[i]`.
pub fn kernel_basis(vectors: &[GradedVector]) -> Vec<Vec<Rational>> {
    check_shape(&vectors.iter().collect::<Vec<_>>());
    let sparse: Vec<SparseVec> = vectors.iter().map(GradedVector::to_sparse).collect();
    kernel_basis_sparse(&sparse)
}

/// Rank comparison of `spanning` against `spanning ∪ {target}`.
pub fn in_span(target: &GradedVector, spanning: &[GradedVector]) -> bool {
    let mut all: Vec<&GradedVector> = spanning.iter().collect();
    all.push(target);
    check_shape(&all);
    let mut e = Echelon::new();
    for v in spanning {
        e.insert(v.to_sparse());
    }
    let before = e.rank();
    e.insert(target.to_sparse());
    e.rank() == before
}

/// Coefficients `c` with `sum c_i * spanning[i] = target`, if any.
pub fn solve_in_span(target: &SparseVec, spanning: &[SparseVec]) -> Option<Vec<Rational>> {
    let mut all = spanning.to_vec();
    all.push(target.clone());
    let n = spanning.len();
    kernel_basis_sparse(&all)
        .into_iter()
        .find(|k| !k[n].is_zero())
        .map(|k| {
            let s = -k[n].recip();
            k[..n].iter().map(|a| a * &s).collect()
        })
}
