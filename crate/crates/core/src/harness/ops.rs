//! Operation counts (additions/comparisons cost 1, multiplications/divisions 10).

use super::config::Algorithm;

/// Default per-point k-means cost.
pub const DEFAULT_ETA: u64 = 10;

pub fn ops_count(algorithm: Algorithm, k: u64, n: u64, m: u64, eta: u64) -> u64 {
    match algorithm {
        Algorithm::Wcl => 11 * k * n + 23 * k + 26,
        Algorithm::CyclicWcl => 21 * k * n + 23 * k + 36,
        Algorithm::ImprovedCyclicWcl => 21 * m * k * n + 24 * m * k + 19 * m + (71 + eta) * k + 17,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_values() {
        assert_eq!(ops_count(Algorithm::CyclicWcl, 50, 500, 1, 0), 526_186);
        assert_eq!(ops_count(Algorithm::Wcl, 50, 500, 1, 0), 276_176);
    }
}
