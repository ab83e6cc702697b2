//! Shared fixtures for the criterion benchmarks.

use ckforms::{find_entry, CheckOptions, PairSpec};

/// Catalog pairs timed end to end, from smallest to largest.
pub const CHECK_PAIRS: &[&str] = &[
    "gl4r-gl2c",
    "sl6r-so33",
    "sl-pq-so-pq(5,5)",
    "sl-h-blocks(2,2)",
    "sl-r-blocks(3,3)+ambient-SU(8)+factor-SU(2)",
];

pub fn pair(id: &str) -> PairSpec {
    find_entry(id).expect("fixture id is in the catalog").pair
}

/// Options for a full graded search on a pair with no witness.
pub fn forced(max_degree: u32) -> CheckOptions {
    CheckOptions {
        max_degree,
        force_search: true,
    }
}
