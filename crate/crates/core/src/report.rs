//! Serializable reports and the batch drivers behind `check` and `sweep`.
//!
//! Field order is fixed by the struct definitions and no floats appear, so
//! JSON output is byte-stable. Timing is only included on request.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{
    admissible, builtin_entries, family_instance, family_params, instance_id, CatalogEntry,
};
use crate::error::Result;
use crate::groups::GroupSpec;
use crate::obstruction::{
    check_obstruction_with, Applicability, CheckOptions, ObstructionResult, PairSpec, Verdict,
};
use crate::restriction::KernelElement;

pub const TOOL: &str = "ckforms";

pub const FOUND_TEXT: &str = "obstruction found: G/H admits no compact Clifford–Klein form";
pub const INAPPLICABLE_TEXT: &str = "criterion inapplicable";

pub fn inconclusive_text(d: u32) -> String {
    format!("inconclusive: no witness up to degree {d} (this does NOT imply existence)")
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermReport {
    pub monomial: String,
    /// Exact rational as `"p/q"` or an integer string.
    pub coefficient: String,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateReport {
    pub restricts_to_zero: bool,
    pub outside_ideal: bool,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessReport {
    pub name: String,
    /// The same element written with tensor factors, e.g. `c2 ⊗ 1 - 1 ⊗ c2`.
    pub tensor: String,
    pub poly_degree: u32,
    pub coh_degree: u32,
    pub terms: Vec<TermReport>,
    pub certificate: Option<CertificateReport>,
    pub legend: Vec<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatsReport {
    pub degree: u32,
    pub coh_degree: u32,
    pub hilbert_dim: usize,
    pub kernel_dim: usize,
    pub image_rank: usize,
    pub ideal_rank: usize,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub pair_id: String,
    pub description: String,
    pub g_u: String,
    pub h_u: String,
    pub max_degree: u32,
    /// `obstruction_found`, `inconclusive` or `inapplicable`.
    pub verdict: String,
    /// For inapplicable pairs: `equal_rank_h_kh` or `complexification`.
    pub reason: Option<String>,
    pub message: String,
    pub rank_criterion: bool,
    pub witness: Option<WitnessReport>,
    pub stats: Vec<StatsReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_us: Option<u64>,
}

fn split_name(name: &str) -> (&str, usize) {
    match name.split_once('@') {
        Some((base, i)) => (base, i.parse().unwrap_or(1)),
        None => (name, 1),
    }
}

fn tensor_form(w: &KernelElement, factors: usize) -> String {
    let mut out = String::new();
    for (m, c) in w.terms() {
        let mut slots: Vec<Vec<String>> = vec![Vec::new(); factors.max(1)];
        for (name, &e) in w.names.iter().zip(m.exponents()) {
            if e == 0 {
                continue;
            }
            let (base, i) = split_name(name);
            slots[i - 1].push(if e == 1 {
                base.to_string()
            } else {
                format!("{base}^{e}")
            });
        }
        let body = slots
            .iter()
            .map(|s| {
                if s.is_empty() {
                    "1".to_string()
                } else {
                    s.join("*")
                }
            })
            .collect::<Vec<_>>()
            .join(" ⊗ ");
        let mag = num_traits::Signed::abs(c);
        let body = if num_traits::One::is_one(&mag) {
            body
        } else {
            format!("{mag}*({body})")
        };
        let neg = num_traits::Signed::is_negative(c);
        match (out.is_empty(), neg) {
            (true, true) => out.push('-'),
            (true, false) => {}
            (false, true) => out.push_str(" - "),
            (false, false) => out.push_str(" + "),
        }
        out.push_str(&body);
    }
    out
}

fn legend(w: &KernelElement, h: &GroupSpec) -> Vec<String> {
    let mut out = Vec::new();
    for (i, name) in w.names.iter().enumerate() {
        if w.terms().all(|(m, _)| m.exponents()[i] == 0) {
            continue;
        }
        let (base, f) = split_name(name);
        let factor = h.factors()[f - 1];
        out.push(format!("{name} = {base} of factor {f} ({factor})"));
    }
    out
}

fn witness_report(w: &KernelElement, r: &ObstructionResult, h: &GroupSpec) -> WitnessReport {
    WitnessReport {
        name: w.pretty.clone(),
        tensor: tensor_form(w, h.factors().len()),
        poly_degree: w.degree,
        coh_degree: 2 * w.degree,
        terms: w
            .terms()
            .map(|(m, c)| TermReport {
                monomial: crate::restriction::render(
                    &w.names,
                    std::slice::from_ref(m),
                    &[num_traits::One::one()],
                ),
                coefficient: c.to_string(),
            })
            .collect(),
        certificate: r.certificate.map(|c| CertificateReport {
            restricts_to_zero: c.restricts_to_zero,
            outside_ideal: c.outside_ideal,
        }),
        legend: legend(w, h),
    }
}

impl Report {
    pub fn new(pair: &PairSpec, description: &str, r: &ObstructionResult, max_degree: u32) -> Self {
        let (verdict, reason, message) = match r.verdict {
            Verdict::ObstructionFound => ("obstruction_found", None, FOUND_TEXT.to_string()),
            Verdict::InconclusiveUpTo(d) => ("inconclusive", None, inconclusive_text(d)),
            Verdict::Inapplicable(a) => {
                let reason = match a {
                    Applicability::EqualRankHK => "equal_rank_h_kh",
                    Applicability::Complexification => "complexification",
                    Applicability::Applicable => "applicable",
                };
                (
                    "inapplicable",
                    Some(reason.to_string()),
                    INAPPLICABLE_TEXT.to_string(),
                )
            }
        };
        Report {
            tool: TOOL.to_string(),
            version: crate::VERSION.to_string(),
            pair_id: pair.id.clone(),
            description: description.to_string(),
            g_u: pair.g_u.to_string(),
            h_u: pair.h_u.to_string(),
            max_degree,
            verdict: verdict.to_string(),
            reason,
            message,
            rank_criterion: r.rank_criterion,
            witness: r.witness.as_ref().map(|w| witness_report(w, r, &pair.h_u)),
            stats: r
                .stats
                .iter()
                .map(|s| StatsReport {
                    degree: s.degree,
                    coh_degree: 2 * s.degree,
                    hilbert_dim: s.hilbert_dim,
                    kernel_dim: s.kernel_dim,
                    image_rank: s.image_rank,
                    ideal_rank: s.ideal_rank,
                })
                .collect(),
            elapsed_us: None,
        }
    }

    /// Runs the check and builds the report.
    pub fn run(pair: &PairSpec, description: &str, opts: &CheckOptions, timing: bool) -> Result<Self> {
        let start = Instant::now();
        let result = check_obstruction_with(pair, opts)?;
        let mut report = Report::new(pair, description, &result, opts.max_degree);
        if timing {
            report.elapsed_us = Some(start.elapsed().as_micros() as u64);
        }
        Ok(report)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "pair: {}  {}", self.pair_id, self.description);
        let _ = writeln!(s, "G_U = {}, H_U = {}", self.g_u, self.h_u);
        match &self.reason {
            Some(r) => {
                let _ = writeln!(s, "verdict: {} ({r})", self.message);
            }
            None => {
                let _ = writeln!(s, "verdict: {}", self.message);
            }
        }
        if let Some(w) = &self.witness {
            let _ = writeln!(s, "witness: {}", w.name);
            if w.tensor != w.name {
                let _ = writeln!(s, "  tensor form: {}", w.tensor);
            }
            let _ = writeln!(
                s,
                "  polynomial degree {}, cohomological degree {}",
                w.poly_degree, w.coh_degree
            );
            if let Some(c) = w.certificate {
                let yn = |b: bool| if b { "yes" } else { "no" };
                let _ = writeln!(
                    s,
                    "  certificate: restricts to zero: {}; outside the ideal: {}",
                    yn(c.restricts_to_zero),
                    yn(c.outside_ideal)
                );
            }
            for l in &w.legend {
                let _ = writeln!(s, "  {l}");
            }
        }
        let _ = writeln!(
            s,
            "rank criterion (rank G = rank H, rank K_G > rank K_H): {}",
            if self.rank_criterion {
                "satisfied"
            } else {
                "not satisfied"
            }
        );
        if !self.stats.is_empty() {
            let _ = writeln!(
                s,
                "{:>6} {:>4} {:>8} {:>7} {:>6} {:>6}",
                "degree", "coh", "dim", "kernel", "image", "ideal"
            );
            for st in &self.stats {
                let _ = writeln!(
                    s,
                    "{:>6} {:>4} {:>8} {:>7} {:>6} {:>6}",
                    st.degree, st.coh_degree, st.hilbert_dim, st.kernel_dim, st.image_rank, st.ideal_rank
                );
            }
        }
        if let Some(t) = self.elapsed_us {
            let _ = writeln!(s, "elapsed: {t} us");
        }
        s
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkippedTuple {
    pub params: Vec<u32>,
    pub reason: String,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSummary {
    pub obstruction_found: usize,
    pub inconclusive: usize,
    pub inapplicable: usize,
    pub skipped: usize,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepReport {
    pub tool: String,
    pub version: String,
    pub family: String,
    pub max_degree: u32,
    pub reports: Vec<Report>,
    pub skipped: Vec<SkippedTuple>,
    pub summary: SweepSummary,
}

impl SweepReport {
    fn new(family: &str, max_degree: u32, reports: Vec<Report>, skipped: Vec<SkippedTuple>) -> Self {
        let count = |v: &str| reports.iter().filter(|r| r.verdict == v).count();
        let summary = SweepSummary {
            obstruction_found: count("obstruction_found"),
            inconclusive: count("inconclusive"),
            inapplicable: count("inapplicable"),
            skipped: skipped.len(),
        };
        SweepReport {
            tool: TOOL.to_string(),
            version: crate::VERSION.to_string(),
            family: family.to_string(),
            max_degree,
            reports,
            skipped,
            summary,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn summary_line(&self) -> String {
        let s = self.summary;
        format!(
            "summary: {} obstruction_found, {} inconclusive, {} inapplicable, {} skipped",
            s.obstruction_found, s.inconclusive, s.inapplicable, s.skipped
        )
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for r in &self.reports {
            let detail = match (&r.witness, &r.reason) {
                (Some(w), _) => format!("witness {} (degree {})", w.name, w.poly_degree),
                (None, Some(reason)) => reason.clone(),
                (None, None) => format!("up to degree {}", r.max_degree),
            };
            let _ = writeln!(s, "{:<28} {:<18} {detail}", r.pair_id, r.verdict);
        }
        for k in &self.skipped {
            let _ = writeln!(
                s,
                "{:<28} {:<18} {}",
                instance_id(&self.family, &k.params),
                "skipped",
                k.reason
            );
        }
        let _ = writeln!(s, "{}", self.summary_line());
        s
    }
}

fn run_all<T: Sync>(
    items: &[T],
    parallel: bool,
    f: impl Fn(&T) -> Result<Report> + Sync + Send,
) -> Result<Vec<Report>> {
    if parallel {
        items.par_iter().map(&f).collect()
    } else {
        items.iter().map(f).collect()
    }
}

/// Checks every built-in entry. Output order follows the catalog.
pub fn catalog_sweep(opts: &CheckOptions, parallel: bool) -> Result<SweepReport> {
    let entries: Vec<CatalogEntry> = builtin_entries();
    let reports = run_all(&entries, parallel, |e| {
        Report::run(&e.pair, &e.description, opts, false)
    })?;
    Ok(SweepReport::new("catalog", opts.max_degree, reports, Vec::new()))
}

/// Checks every tuple of the Cartesian product of `ranges` (one range per
/// family parameter). Tuples outside the family's hypotheses are skipped;
/// tuples past the rank bound are an error. Output is ordered by tuple.
pub fn family_sweep(
    family: &str,
    ranges: &[Vec<u32>],
    opts: &CheckOptions,
    parallel: bool,
) -> Result<SweepReport> {
    let names = family_params(family)?;
    if ranges.len() != names.len() {
        return Err(crate::error::Error::OutOfBounds {
            family: family.to_string(),
            reason: format!("expected ranges for {}", names.join(",")),
        });
    }
    let mut tuples: Vec<Vec<u32>> = vec![Vec::new()];
    for r in ranges {
        let mut values = r.clone();
        values.sort_unstable();
        values.dedup();
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                values.iter().map(move |&v| {
                    let mut t = t.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    if ranges.iter().any(Vec::is_empty) {
        tuples.clear();
    }
    let mut skipped = Vec::new();
    let mut pairs = Vec::new();
    for t in tuples {
        match admissible(family, &t) {
            Ok(()) => pairs.push((family_instance(family, &t)?, t)),
            Err(e) => skipped.push(SkippedTuple {
                params: t,
                reason: e.to_string(),
            }),
        }
    }
    let reports = run_all(&pairs, parallel, |(p, t)| {
        let description = crate::catalog::find_entry(&instance_id(family, t))
            .map(|e| e.description)
            .unwrap_or_default();
        Report::run(p, &description, opts, false)
    })?;
    Ok(SweepReport::new(family, opts.max_degree, reports, skipped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::find_entry;

    #[test]
    fn gl4r_report() {
        let e = find_entry("gl4r-gl2c").unwrap();
        let r = Report::run(
            &e.pair,
            &e.description,
            &CheckOptions {
                max_degree: 8,
                force_search: false,
            },
            false,
        )
        .unwrap();
        assert_eq!(r.verdict, "obstruction_found");
        let w = r.witness.as_ref().unwrap();
        assert_eq!(w.name, "c2@1 - c2@2");
        assert_eq!(w.tensor, "c2 ⊗ 1 - 1 ⊗ c2");
        assert_eq!(w.coh_degree, 4);
        assert_eq!(w.terms[1].coefficient, "-1");
        let json = r.to_json();
        let back: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_json(), json);
        assert!(r.to_text().contains(FOUND_TEXT));
    }

    #[test]
    fn empty_sweep() {
        let s = family_sweep("sl-pq-so-pq", &[vec![], vec![1]], &CheckOptions::default(), true).unwrap();
        assert!(s.reports.is_empty());
        assert_eq!(s.summary, SweepSummary::default());
    }

    #[test]
    fn sweep_skips_inadmissible() {
        let s = family_sweep(
            "sl-pq-so-pq",
            &[vec![1, 2], vec![1]],
            &CheckOptions {
                max_degree: 4,
                force_search: false,
            },
            false,
        )
        .unwrap();
        assert_eq!(s.reports.len(), 1);
        assert_eq!(s.summary.skipped, 1);
        assert!(family_sweep(
            "sl-pq-so-pq",
            &[vec![7], vec![7]],
            &CheckOptions::default(),
            false
        )
        .is_err());
    }
}
