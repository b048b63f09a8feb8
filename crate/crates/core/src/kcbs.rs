//! The cyclic five-observable theory fragment and the KCBS inequality.
//!
//! Observables sit on a cycle; adjacent pairs are jointly measurable and
//! the distinguished state makes every adjacent pair perfectly random but
//! anticorrelated. On an odd cycle no global 0/1 assignment can
//! anticorrelate every edge, so the cycle correlator sum breaks the
//! noncontextual bound of `-(n-2)`; both facts are established here by
//! exhaustive search over all `2^n` assignments.
//!
//! The cycle length is a parameter (default 5) so the even/odd contrast is
//! testable; outcomes map to correlators as `0 -> +1`, `1 -> -1`.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest cycle accepted by the exhaustive assignment searches.
pub const MAX_BRUTE_FORCE_N: usize = 24;

/// How two observables of the cycle relate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PairRelation {
    /// Same observable measured twice.
    Identical,
    /// Neighbors on the cycle; jointly measurable.
    Adjacent,
    /// Any other pair; discarded by the protocol.
    Other,
}

/// A cycle of `n >= 3` observables with adjacent pairs jointly measurable.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleTheory {
    labels: Vec<String>,
}

impl CycleTheory {
    /// The five-observable cycle `V, W, X, Y, Z`.
    pub fn pentagon() -> CycleTheory {
        CycleTheory::new(5).expect("5 >= 3")
    }

    pub fn new(n: usize) -> Result<CycleTheory> {
        if n < 3 {
            return Err(Error::invalid(format!("cycle length {n} must be >= 3")));
        }
        let labels = if n == 5 {
            ["V", "W", "X", "Y", "Z"].map(String::from).to_vec()
        } else {
            (1..=n).map(|i| format!("O{i}")).collect()
        };
        Ok(CycleTheory { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::invalid(format!("unknown observable label {label:?}")))
    }

    /// Relation between the observables at the two indices.
    pub fn relation(&self, first: usize, second: usize) -> PairRelation {
        let n = self.len();
        assert!(first < n && second < n, "observable index out of range");
        if first == second {
            PairRelation::Identical
        } else if (first + 1) % n == second || (second + 1) % n == first {
            PairRelation::Adjacent
        } else {
            PairRelation::Other
        }
    }
}

/// Joint outcome distribution of an ordered observable pair, stored as
/// probabilities of `(a, b)` in the order `00, 01, 10, 11`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairCorrelation {
    pub relation: PairRelation,
    pub probs: [f64; 4],
}

impl PairCorrelation {
    pub fn new(relation: PairRelation, probs: [f64; 4]) -> Result<PairCorrelation> {
        if probs.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return Err(Error::invalid("pair probabilities must lie in [0, 1]"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "pair distribution sums to {total}, not 1"
            )));
        }
        Ok(PairCorrelation { relation, probs })
    }

    /// The distinguished state's exact table for a pair of the given
    /// relation: identical pairs repeat a fair coin, adjacent pairs
    /// anticorrelate it, and discarded pairs are independent.
    pub fn for_rho(relation: PairRelation) -> PairCorrelation {
        let probs = match relation {
            PairRelation::Identical => [0.5, 0.0, 0.0, 0.5],
            PairRelation::Adjacent => [0.0, 0.5, 0.5, 0.0],
            PairRelation::Other => [0.25, 0.25, 0.25, 0.25],
        };
        PairCorrelation { relation, probs }
    }

    /// Point distribution induced by deterministic values on an edge.
    pub fn from_assignment_edge(a: u8, b: u8) -> PairCorrelation {
        let mut probs = [0.0; 4];
        probs[(2 * (a & 1) + (b & 1)) as usize] = 1.0;
        PairCorrelation {
            relation: PairRelation::Adjacent,
            probs,
        }
    }

    /// `P(a = .)` marginal.
    pub fn marginal_first(&self) -> [f64; 2] {
        [self.probs[0] + self.probs[1], self.probs[2] + self.probs[3]]
    }

    /// `P(b = .)` marginal.
    pub fn marginal_second(&self) -> [f64; 2] {
        [self.probs[0] + self.probs[2], self.probs[1] + self.probs[3]]
    }

    /// `<AB>` with outcomes mapped `0 -> +1`, `1 -> -1`.
    pub fn correlator(&self) -> f64 {
        self.probs[0] + self.probs[3] - self.probs[1] - self.probs[2]
    }
}

/// Samples the ordered outcome pair for measuring `first` then `second` on
/// the distinguished state.
pub fn rho_sample_pair<R: Rng>(
    theory: &CycleTheory,
    first: usize,
    second: usize,
    rng: &mut R,
) -> (u8, u8) {
    let a = rng.gen_range(0..2u8);
    let b = match theory.relation(first, second) {
        PairRelation::Identical => a,
        PairRelation::Adjacent => 1 - a,
        PairRelation::Other => rng.gen_range(0..2u8),
    };
    (a, b)
}

/// Cycle correlator sum over the `n` adjacent pairs.
pub fn kcbs_value(correlations: &[PairCorrelation]) -> Result<f64> {
    if correlations.len() < 3 {
        return Err(Error::invalid(format!(
            "need at least 3 adjacent-pair correlations, got {}",
            correlations.len()
        )));
    }
    if correlations
        .iter()
        .any(|c| c.relation != PairRelation::Adjacent)
    {
        return Err(Error::invalid(
            "cycle sum is defined over adjacent-pair correlations only",
        ));
    }
    Ok(correlations.iter().map(PairCorrelation::correlator).sum())
}

/// Number of cycle edges a deterministic assignment fails to anticorrelate.
fn correlated_edges(assignment: u32, n: usize) -> u32 {
    let mut count = 0;
    for i in 0..n {
        let a = (assignment >> i) & 1;
        let b = (assignment >> ((i + 1) % n)) & 1;
        if a == b {
            count += 1;
        }
    }
    count
}

fn check_cycle_len(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::invalid(format!("cycle length {n} must be >= 3")));
    }
    if n > MAX_BRUTE_FORCE_N {
        return Err(Error::unsupported(format!(
            "cycle length {n} exceeds the brute-force limit {MAX_BRUTE_FORCE_N}"
        )));
    }
    Ok(())
}

/// Minimum of the cycle correlator sum over all `2^n` deterministic
/// assignments, by exact brute force. Each edge contributes `+1` when its
/// endpoints agree and `-1` when they differ, so the minimum is
/// `-(n - 2)` on odd cycles and `-n` on even ones.
pub fn best_noncontextual_value(n: usize) -> Result<f64> {
    check_cycle_len(n)?;
    let mut best = i64::MAX;
    for assignment in 0..(1u32 << n) {
        let correlated = correlated_edges(assignment, n) as i64;
        let value = correlated - (n as i64 - correlated);
        best = best.min(value);
    }
    Ok(best as f64)
}

/// Whether some deterministic assignment anticorrelates every cycle edge,
/// by exact brute force. True exactly for even cycles.
pub fn exists_perfect_assignment(n: usize) -> Result<bool> {
    check_cycle_len(n)?;
    Ok((0..(1u32 << n)).any(|assignment| correlated_edges(assignment, n) == 0))
}

/// All assignments achieving the minimum number of correlated edges,
/// as bit patterns (bit `i` is observable `i`'s value).
pub fn optimal_assignments(n: usize) -> Result<Vec<u32>> {
    check_cycle_len(n)?;
    let min = (0..(1u32 << n))
        .map(|a| correlated_edges(a, n))
        .min()
        .expect("nonempty range");
    Ok((0..(1u32 << n))
        .filter(|&a| correlated_edges(a, n) == min)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::master_rng;
    use proptest::prelude::*;

    #[test]
    fn pentagon_labels_and_relations() {
        let t = CycleTheory::pentagon();
        assert_eq!(t.labels(), ["V", "W", "X", "Y", "Z"]);
        assert_eq!(t.relation(0, 1), PairRelation::Adjacent);
        assert_eq!(t.relation(4, 0), PairRelation::Adjacent);
        assert_eq!(t.relation(2, 2), PairRelation::Identical);
        assert_eq!(t.relation(0, 2), PairRelation::Other);
        assert!(t.index_of("Q").is_err());
    }

    #[test]
    fn adjacent_pairs_anticorrelate() {
        let t = CycleTheory::pentagon();
        let mut rng = master_rng(21);
        let n = 100_000;
        let mut counts = [0usize; 4];
        for _ in 0..n {
            let (a, b) = rho_sample_pair(&t, 0, 1, &mut rng);
            counts[(2 * a + b) as usize] += 1;
        }
        assert_eq!(counts[0], 0);
        assert_eq!(counts[3], 0);
        let freq01 = counts[1] as f64 / n as f64;
        let band = 4.0 * (0.25 / n as f64).sqrt();
        assert!((freq01 - 0.5).abs() < band);
    }

    #[test]
    fn identical_pairs_repeat() {
        let t = CycleTheory::pentagon();
        let mut rng = master_rng(22);
        let n = 100_000;
        let mut counts = [0usize; 4];
        for _ in 0..n {
            let (a, b) = rho_sample_pair(&t, 0, 0, &mut rng);
            counts[(2 * a + b) as usize] += 1;
        }
        assert_eq!(counts[1], 0);
        assert_eq!(counts[2], 0);
        let freq00 = counts[0] as f64 / n as f64;
        let band = 4.0 * (0.25 / n as f64).sqrt();
        assert!((freq00 - 0.5).abs() < band);
    }

    #[test]
    fn discarded_pairs_are_independent_uniform() {
        let t = CycleTheory::pentagon();
        let mut rng = master_rng(23);
        let n = 100_000usize;
        let mut counts = [0usize; 4];
        for _ in 0..n {
            let (a, b) = rho_sample_pair(&t, 0, 2, &mut rng);
            counts[(2 * a + b) as usize] += 1;
        }
        // Chi-square against the uniform 4-cell table; critical value for
        // df = 3 at the 0.1% level.
        let expected = n as f64 / 4.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        assert!(chi2 < 16.27, "chi2 = {chi2}, counts = {counts:?}");
    }

    #[test]
    fn rho_tables_have_uniform_marginals_exactly() {
        for relation in [
            PairRelation::Identical,
            PairRelation::Adjacent,
            PairRelation::Other,
        ] {
            let c = PairCorrelation::for_rho(relation);
            assert_eq!(c.marginal_first(), [0.5, 0.5]);
            assert_eq!(c.marginal_second(), [0.5, 0.5]);
        }
    }

    #[test]
    fn anticorrelated_table_reaches_minus_n() {
        let table: Vec<_> = (0..5)
            .map(|_| PairCorrelation::for_rho(PairRelation::Adjacent))
            .collect();
        assert_eq!(kcbs_value(&table).unwrap(), -5.0);
    }

    #[test]
    fn independent_uniform_table_sums_to_zero() {
        let table: Vec<_> = (0..5)
            .map(|_| {
                PairCorrelation::new(PairRelation::Adjacent, [0.25, 0.25, 0.25, 0.25]).unwrap()
            })
            .collect();
        assert_eq!(kcbs_value(&table).unwrap(), 0.0);
    }

    /// Independent evaluation of an assignment's cycle sum: build each
    /// edge's point table and feed the list through `kcbs_value`.
    fn assignment_cycle_sum(bits: &[u8]) -> f64 {
        let n = bits.len();
        let table: Vec<_> = (0..n)
            .map(|i| PairCorrelation::from_assignment_edge(bits[i], bits[(i + 1) % n]))
            .collect();
        kcbs_value(&table).unwrap()
    }

    #[test]
    fn alternating_assignment_saturates_the_bound() {
        assert_eq!(assignment_cycle_sum(&[0, 1, 0, 1, 0]), -3.0);
    }

    #[test]
    fn kcbs_value_rejects_malformed_tables() {
        let identical = vec![PairCorrelation::for_rho(PairRelation::Identical); 5];
        assert!(kcbs_value(&identical).is_err());
        assert!(PairCorrelation::new(PairRelation::Adjacent, [0.5, 0.5, 0.5, -0.5]).is_err());
        assert!(PairCorrelation::new(PairRelation::Adjacent, [0.5, 0.4, 0.0, 0.0]).is_err());
    }

    #[test]
    fn brute_force_bounds() {
        assert_eq!(best_noncontextual_value(5).unwrap(), -3.0);
        assert_eq!(best_noncontextual_value(4).unwrap(), -4.0);
        assert_eq!(best_noncontextual_value(3).unwrap(), -1.0);
    }

    #[test]
    fn odd_cycles_have_no_perfect_assignment() {
        for n in [3, 5, 7, 9] {
            assert!(!exists_perfect_assignment(n).unwrap(), "n = {n}");
            assert_eq!(best_noncontextual_value(n).unwrap(), -((n as f64) - 2.0));
        }
        for n in [4, 6, 8] {
            assert!(exists_perfect_assignment(n).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn search_guards() {
        assert!(matches!(
            best_noncontextual_value(2),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            best_noncontextual_value(25),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn pentagon_optimal_assignments_miss_one_edge() {
        let opt = optimal_assignments(5).unwrap();
        assert_eq!(opt.len(), 10);
        for a in opt {
            assert_eq!(correlated_edges(a, 5), 1);
        }
    }

    #[test]
    fn monte_carlo_kcbs_estimate_violates_the_bound() {
        let t = CycleTheory::pentagon();
        let mut rng = master_rng(24);
        let samples = 100_000;
        let mut total = 0.0;
        for edge in 0..5 {
            let mut sum = 0i64;
            for _ in 0..samples {
                let (a, b) = rho_sample_pair(&t, edge, (edge + 1) % 5, &mut rng);
                sum += if a == b { 1 } else { -1 };
            }
            total += sum as f64 / samples as f64;
        }
        assert!((total - (-5.0)).abs() < 0.05, "estimate = {total}");
        assert!(total < best_noncontextual_value(5).unwrap());
    }

    proptest! {
        /// Any deterministic assignment's cycle sum stays at or above the
        /// brute-force minimum.
        #[test]
        fn assignment_tables_respect_the_bound(
            n in 3usize..=9,
            assignment in 0u32..512,
        ) {
            let bits: Vec<u8> = (0..n).map(|i| ((assignment >> i) & 1) as u8).collect();
            let value = assignment_cycle_sum(&bits);
            let bound = best_noncontextual_value(n).unwrap();
            prop_assert!(value >= bound - 1e-12);
        }
    }
}
