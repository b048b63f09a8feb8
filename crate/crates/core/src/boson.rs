//! Matrix permanents and exact boson-sampling distributions at desk scale.
//!
//! The probability of seeing output occupation `T` when identical bosons
//! enter a linear interferometer `U` in occupation `S` is
//! `|Per(U_{S,T})|^2 / (prod s_j! prod t_i!)`, where `U_{S,T}` repeats
//! column `j` of `U` `s_j` times and row `i` `t_i` times. The permanent is
//! computed two ways: the permutation-sum definition (the oracle, capped
//! at 9x9) and Ryser's inclusion-exclusion with Gray-code subset updates
//! (`O(2^n n)`, the real kernel).
//!
//! The contrast model replaces amplitudes by probabilities: distinguishable
//! particles follow `Per(|U_{S,T}|^2) / prod t_i!`, which erases the
//! interference zeros. The two-photon beamsplitter dip — bosonic
//! probability 0 versus distinguishable 1/2 on output `(1,1)` — is the
//! smallest witness of the difference.
//!
//! Sampling enumerates every output occupation, so a hard guard caps the
//! outcome count; there is deliberately no approximate large-scale path.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Unitarity slack for interferometer matrices.
pub const UNITARITY_TOL: f64 = 1e-10;

/// Largest matrix accepted by the permutation-sum permanent.
pub const MAX_NAIVE_N: usize = 9;

/// Largest matrix accepted by the Ryser permanent.
pub const MAX_RYSER_N: usize = 30;

/// Largest output-occupation count enumerated for exact distributions.
pub const MAX_OUTCOMES: u64 = 1_000_000;

/// Dense complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<ComplexMatrix> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("matrix dimensions must be positive"));
        }
        if data.len() != rows * cols {
            return Err(Error::invalid(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    /// Parses the JSON wire form: rows of `[re, im]` pairs.
    pub fn from_pairs(rows: &[Vec<[f64; 2]>]) -> Result<ComplexMatrix> {
        if rows.is_empty() {
            return Err(Error::invalid("matrix must have at least one row"));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::invalid("matrix rows must all have the same length"));
        }
        let data = rows
            .iter()
            .flatten()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        ComplexMatrix::new(rows.len(), cols, data)
    }

    pub fn to_pairs(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| [self.get(i, j).re, self.get(i, j).im]).collect())
            .collect()
    }

    pub fn identity(n: usize) -> ComplexMatrix {
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        ComplexMatrix { rows: n, cols: n, data }
    }

    /// The 50:50 beamsplitter `[[1, 1], [1, -1]] / sqrt(2)`.
    pub fn beamsplitter() -> ComplexMatrix {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix {
            rows: 2,
            cols: 2,
            data: [a, a, a, -a]
                .iter()
                .map(|&x| Complex64::new(x, 0.0))
                .collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    /// Largest deviation of `U U^dagger` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut dot = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    dot += self.get(i, k) * self.get(j, k).conj();
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    /// Row/column-repeated submatrix: row `i` of `self` appears
    /// `row_reps[i]` times, column `j` appears `col_reps[j]` times.
    fn repeated_submatrix(&self, row_reps: &[usize], col_reps: &[usize]) -> ComplexMatrix {
        let expand = |reps: &[usize]| -> Vec<usize> {
            reps.iter()
                .enumerate()
                .flat_map(|(mode, &count)| std::iter::repeat_n(mode, count))
                .collect()
        };
        let row_modes = expand(row_reps);
        let col_modes = expand(col_reps);
        let data = row_modes
            .iter()
            .flat_map(|&i| col_modes.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .collect();
        ComplexMatrix {
            rows: row_modes.len(),
            cols: col_modes.len(),
            data,
        }
    }

    fn elementwise_abs2(&self) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| Complex64::new(z.norm_sqr(), 0.0)).collect(),
        }
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_pairs().serialize(serializer)
    }
}

/// Photon counts per mode.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ModeOccupation {
    pub counts: Vec<usize>,
}

/// An exact output distribution: `(occupation, probability)` pairs in
/// ascending lexicographic occupation order.
pub type Distribution = Vec<(ModeOccupation, f64)>;

impl ModeOccupation {
    pub fn new(counts: Vec<usize>) -> ModeOccupation {
        ModeOccupation { counts }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn modes(&self) -> usize {
        self.counts.len()
    }
}

impl std::fmt::Display for ModeOccupation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.counts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

fn check_square(m: &ComplexMatrix, cap: usize, kernel: &str) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::invalid(format!(
            "{kernel} needs a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    if m.rows > cap {
        return Err(Error::invalid(format!(
            "{kernel} supports n <= {cap}, got {}",
            m.rows
        )));
    }
    Ok(m.rows)
}

/// Permutation-sum permanent: the definition, exponential in `n!`. Serves
/// as the independent oracle for the Ryser kernel; capped at `n = 9`.
pub fn permanent_naive(m: &ComplexMatrix) -> Result<Complex64> {
    check_square(m, MAX_NAIVE_N, "the permutation-sum permanent")?;

    fn expand(m: &ComplexMatrix, row: usize, used: u32) -> Complex64 {
        let n = m.rows();
        if row == n {
            return Complex64::new(1.0, 0.0);
        }
        let mut sum = Complex64::new(0.0, 0.0);
        for j in 0..n {
            if used & (1 << j) == 0 {
                sum += m.get(row, j) * expand(m, row + 1, used | (1 << j));
            }
        }
        sum
    }

    Ok(expand(m, 0, 0))
}

/// Ryser's inclusion-exclusion permanent with Gray-code subset iteration:
/// each step updates the running row sums by a single column, giving
/// `O(2^n n)` arithmetic overall.
pub fn permanent_ryser(m: &ComplexMatrix) -> Result<Complex64> {
    let n = check_square(m, MAX_RYSER_N, "the Ryser permanent")?;
    if n == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }

    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let mut total = Complex64::new(0.0, 0.0);
    let mut gray: u64 = 0;
    for k in 1u64..(1u64 << n) {
        let next_gray = k ^ (k >> 1);
        let changed = (gray ^ next_gray).trailing_zeros() as usize;
        if next_gray & (1 << changed) != 0 {
            for (i, sum) in row_sums.iter_mut().enumerate() {
                *sum += m.get(i, changed);
            }
        } else {
            for (i, sum) in row_sums.iter_mut().enumerate() {
                *sum -= m.get(i, changed);
            }
        }
        gray = next_gray;
        let product = row_sums
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, &s| acc * s);
        if gray.count_ones().is_multiple_of(2) {
            total += product;
        } else {
            total -= product;
        }
    }
    // The (-1)^n prefactor of the inclusion-exclusion sum.
    if n % 2 == 1 {
        total = -total;
    }
    Ok(total)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn check_interferometer(u: &ComplexMatrix, input: &ModeOccupation) -> Result<()> {
    if !u.is_square() {
        return Err(Error::invalid(format!(
            "interferometer must be square, got {}x{}",
            u.rows(),
            u.cols()
        )));
    }
    if !u.is_unitary(UNITARITY_TOL) {
        return Err(Error::invalid(format!(
            "interferometer is not unitary (defect {:.3e})",
            u.unitarity_defect()
        )));
    }
    if input.modes() != u.rows() {
        return Err(Error::invalid(format!(
            "input has {} modes but the interferometer has {}",
            input.modes(),
            u.rows()
        )));
    }
    Ok(())
}

fn bosonic_probability_unchecked(
    u: &ComplexMatrix,
    input: &ModeOccupation,
    output: &ModeOccupation,
) -> Result<f64> {
    let sub = u.repeated_submatrix(&output.counts, &input.counts);
    let per = permanent_ryser(&sub)?;
    let norm: f64 = input.counts.iter().map(|&s| factorial(s)).product::<f64>()
        * output.counts.iter().map(|&t| factorial(t)).product::<f64>();
    Ok(per.norm_sqr() / norm)
}

/// Probability of the output occupation for identical bosons:
/// `|Per(U_{S,T})|^2 / (prod s_j! prod t_i!)`.
pub fn outcome_probability(
    u: &ComplexMatrix,
    input: &ModeOccupation,
    output: &ModeOccupation,
) -> Result<f64> {
    check_interferometer(u, input)?;
    if output.modes() != u.rows() {
        return Err(Error::invalid(format!(
            "output has {} modes but the interferometer has {}",
            output.modes(),
            u.rows()
        )));
    }
    if input.total() != output.total() {
        return Err(Error::invalid(format!(
            "photon numbers differ: input {} vs output {}",
            input.total(),
            output.total()
        )));
    }
    bosonic_probability_unchecked(u, input, output)
}

/// Number of occupations of `n` photons over `m` modes, `C(m+n-1, n)`,
/// saturating at `u64::MAX`.
fn occupation_count(m: usize, n: usize) -> u64 {
    let mut result = 1u128;
    for k in 1..=n as u128 {
        result = result * (m as u128 - 1 + k) / k;
        if result > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    result as u64
}

/// All occupations of `n` photons over `m` modes, ascending lexicographic.
pub fn enumerate_occupations(m: usize, n: usize) -> Vec<ModeOccupation> {
    fn rec(modes_left: usize, photons_left: usize, prefix: &mut Vec<usize>, out: &mut Vec<ModeOccupation>) {
        if modes_left == 1 {
            prefix.push(photons_left);
            out.push(ModeOccupation::new(prefix.clone()));
            prefix.pop();
            return;
        }
        for c in 0..=photons_left {
            prefix.push(c);
            rec(modes_left - 1, photons_left - c, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, n, &mut Vec::with_capacity(m), &mut out);
    out
}

fn check_enumeration_guard(m: usize, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("need at least one photon"));
    }
    let count = occupation_count(m, n);
    if count > MAX_OUTCOMES {
        return Err(Error::unsupported(format!(
            "{count} output occupations exceed the enumeration cap of {MAX_OUTCOMES}"
        )));
    }
    Ok(())
}

fn normalize_check(dist: &[(ModeOccupation, f64)]) -> Result<()> {
    let total: f64 = dist.iter().map(|(_, p)| p).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::numerical(format!(
            "distribution sums to {total}, not 1"
        )));
    }
    Ok(())
}

/// Exact bosonic output distribution plus `k` inverse-CDF samples from it.
/// The distribution is ordered lexicographically by occupation and checked
/// to normalize within 1e-9.
pub fn exact_distribution_and_sample<R: Rng>(
    u: &ComplexMatrix,
    input: &ModeOccupation,
    k: usize,
    rng: &mut R,
) -> Result<(Distribution, Vec<ModeOccupation>)> {
    check_interferometer(u, input)?;
    check_enumeration_guard(u.rows(), input.total())?;
    let dist: Distribution = enumerate_occupations(u.rows(), input.total())
        .into_iter()
        .map(|t| {
            let p = bosonic_probability_unchecked(u, input, &t)?;
            Ok((t, p))
        })
        .collect::<Result<_>>()?;
    normalize_check(&dist)?;

    let samples = (0..k)
        .map(|_| {
            let draw = rng.gen::<f64>();
            let mut acc = 0.0;
            for (t, p) in &dist {
                acc += p;
                if draw < acc {
                    return t.clone();
                }
            }
            dist.last().expect("distribution is nonempty").0.clone()
        })
        .collect();
    Ok((dist, samples))
}

/// Output distribution for distinguishable particles: each trajectory
/// contributes its probability with no interference,
/// `P(T) = Per(|U_{S,T}|^2) / prod t_i!`.
pub fn distinguishable_distribution(
    u: &ComplexMatrix,
    input: &ModeOccupation,
) -> Result<Distribution> {
    check_interferometer(u, input)?;
    check_enumeration_guard(u.rows(), input.total())?;
    let q = u.elementwise_abs2();
    let dist: Distribution = enumerate_occupations(u.rows(), input.total())
        .into_iter()
        .map(|t| {
            let sub = q.repeated_submatrix(&t.counts, &input.counts);
            let per = permanent_ryser(&sub)?;
            let norm: f64 = t.counts.iter().map(|&ti| factorial(ti)).product();
            Ok((t, per.re / norm))
        })
        .collect::<Result<_>>()?;
    normalize_check(&dist)?;
    Ok(dist)
}

/// Haar-random `m x m` unitary: a complex Gaussian matrix orthonormalized
/// by modified Gram-Schmidt. Dividing each column by its (real, positive)
/// residual norm fixes the phase convention that makes the distribution
/// uniform over the unitary group.
pub fn random_unitary<R: Rng>(m: usize, rng: &mut R) -> ComplexMatrix {
    assert!(m >= 1, "need at least one mode");
    let mut cols: Vec<Vec<Complex64>> = (0..m)
        .map(|_| {
            (0..m)
                .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect()
        })
        .collect();

    for j in 0..m {
        // Two projection passes keep orthogonality near machine precision.
        for _ in 0..2 {
            for i in 0..j {
                let proj: Complex64 = cols[i]
                    .iter()
                    .zip(&cols[j])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let basis = cols[i].clone();
                for (v, b) in cols[j].iter_mut().zip(basis) {
                    *v -= proj * b;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for v in cols[j].iter_mut() {
            *v /= norm;
        }
    }

    let mut data = vec![Complex64::new(0.0, 0.0); m * m];
    for (j, col) in cols.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            data[i * m + j] = v;
        }
    }
    ComplexMatrix { rows: m, cols: m, data }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::master_rng;
    use proptest::prelude::*;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix<R: Rng>(n: usize, rng: &mut R) -> ComplexMatrix {
        let data = (0..n * n)
            .map(|_| c(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0))
            .collect();
        ComplexMatrix::new(n, n, data).unwrap()
    }

    #[test]
    fn naive_permanent_basics() {
        assert_eq!(permanent_naive(&ComplexMatrix::identity(3)).unwrap(), c(1.0, 0.0));
        let ones = ComplexMatrix::new(3, 3, vec![c(1.0, 0.0); 9]).unwrap();
        assert_eq!(permanent_naive(&ones).unwrap(), c(6.0, 0.0));
        let m = ComplexMatrix::new(
            2,
            2,
            vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)],
        )
        .unwrap();
        assert_eq!(permanent_naive(&m).unwrap(), c(10.0, 0.0));
    }

    #[test]
    fn naive_permanent_guards() {
        let rect = ComplexMatrix::new(2, 3, vec![c(0.0, 0.0); 6]).unwrap();
        assert!(permanent_naive(&rect).is_err());
        let big = ComplexMatrix::identity(10);
        assert!(permanent_naive(&big).is_err());
        assert!(permanent_ryser(&ComplexMatrix::identity(31)).is_err());
    }

    #[test]
    fn ryser_matches_identity_and_beamsplitter() {
        assert_eq!(permanent_ryser(&ComplexMatrix::identity(4)).unwrap(), c(1.0, 0.0));
        let hom = ComplexMatrix::beamsplitter();
        assert!(permanent_ryser(&hom).unwrap().norm() < 1e-12);
    }

    #[test]
    fn ryser_matches_naive_on_random_matrices() {
        let mut rng = master_rng(51);
        for n in 2..=7 {
            for _ in 0..100 {
                let m = random_matrix(n, &mut rng);
                let naive = permanent_naive(&m).unwrap();
                let ryser = permanent_ryser(&m).unwrap();
                let scale = naive.norm().max(1.0);
                assert!(
                    (naive - ryser).norm() / scale <= 1e-9,
                    "n = {n}: {naive} vs {ryser}"
                );
            }
        }
    }

    #[test]
    fn permanent_commutes_with_conjugation() {
        let mut rng = master_rng(52);
        for _ in 0..50 {
            let m = random_matrix(4, &mut rng);
            let conj = ComplexMatrix::new(
                4,
                4,
                m.data.iter().map(|z| z.conj()).collect(),
            )
            .unwrap();
            let a = permanent_ryser(&m).unwrap();
            let b = permanent_ryser(&conj).unwrap();
            assert!((a.conj() - b).norm() < 1e-10);
        }
    }

    #[test]
    fn single_photon_through_identity() {
        let u = ComplexMatrix::identity(2);
        let s = ModeOccupation::new(vec![1, 0]);
        assert_eq!(outcome_probability(&u, &s, &s).unwrap(), 1.0);
    }

    #[test]
    fn hong_ou_mandel_dip() {
        let u = ComplexMatrix::beamsplitter();
        let s = ModeOccupation::new(vec![1, 1]);
        let coincidence = outcome_probability(&u, &s, &ModeOccupation::new(vec![1, 1])).unwrap();
        assert!(coincidence < 1e-12);
        let bunched = outcome_probability(&u, &s, &ModeOccupation::new(vec![2, 0])).unwrap();
        assert!((bunched - 0.5).abs() < 1e-12);
    }

    #[test]
    fn outcome_probability_rejects_mismatches() {
        let u = ComplexMatrix::beamsplitter();
        let s = ModeOccupation::new(vec![1, 1]);
        let t = ModeOccupation::new(vec![1, 0]);
        assert!(matches!(
            outcome_probability(&u, &s, &t),
            Err(Error::InvalidArgument(_))
        ));
        let not_unitary =
            ComplexMatrix::new(2, 2, vec![c(1.0, 0.0); 4]).unwrap();
        assert!(outcome_probability(&not_unitary, &s, &s).is_err());
    }

    #[test]
    fn beamsplitter_distribution_is_the_textbook_dip() {
        let u = ComplexMatrix::beamsplitter();
        let s = ModeOccupation::new(vec![1, 1]);
        let mut rng = master_rng(53);
        let (dist, _) = exact_distribution_and_sample(&u, &s, 0, &mut rng).unwrap();
        let as_map: Vec<(String, f64)> =
            dist.iter().map(|(t, p)| (t.to_string(), *p)).collect();
        assert_eq!(as_map.len(), 3);
        assert_eq!(as_map[0].0, "(0,2)");
        assert!((as_map[0].1 - 0.5).abs() < 1e-12);
        assert!(as_map[1].1 < 1e-12); // (1,1)
        assert!((as_map[2].1 - 0.5).abs() < 1e-12); // (2,0)
    }

    #[test]
    fn distributions_normalize_for_random_unitaries() {
        let mut rng = master_rng(54);
        for (m, n) in [(4usize, 2usize), (6, 3), (5, 3)] {
            let u = random_unitary(m, &mut rng);
            let mut counts = vec![0usize; m];
            for i in 0..n {
                counts[i % m] += 1;
            }
            let s = ModeOccupation::new(counts);
            let (dist, _) = exact_distribution_and_sample(&u, &s, 0, &mut rng).unwrap();
            let total: f64 = dist.iter().map(|(_, p)| p).sum();
            assert!((total - 1.0).abs() < 1e-9, "bosonic total = {total}");
            let dd = distinguishable_distribution(&u, &s).unwrap();
            let total: f64 = dd.iter().map(|(_, p)| p).sum();
            assert!((total - 1.0).abs() < 1e-9, "distinguishable total = {total}");
        }
    }

    #[test]
    fn collision_inputs_normalize_too() {
        let mut rng = master_rng(55);
        let u = random_unitary(3, &mut rng);
        let s = ModeOccupation::new(vec![2, 1, 0]);
        let (dist, _) = exact_distribution_and_sample(&u, &s, 0, &mut rng).unwrap();
        let total: f64 = dist.iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-9);
        let dd = distinguishable_distribution(&u, &s).unwrap();
        let total: f64 = dd.iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    /// Brute-force trajectory oracle for two distinguishable particles:
    /// enumerate both paths independently with probabilities `|U|^2`.
    fn two_ball_distribution(u: &ComplexMatrix, first_mode: usize, second_mode: usize) -> Vec<f64> {
        let m = u.rows();
        let mut probs = vec![0.0; m * m]; // indexed by (exit1, exit2)
        for e1 in 0..m {
            for e2 in 0..m {
                probs[e1 * m + e2] =
                    u.get(e1, first_mode).norm_sqr() * u.get(e2, second_mode).norm_sqr();
            }
        }
        probs
    }

    #[test]
    fn distinguishable_beamsplitter_matches_trajectory_counting() {
        let u = ComplexMatrix::beamsplitter();
        let s = ModeOccupation::new(vec![1, 1]);
        let dd = distinguishable_distribution(&u, &s).unwrap();
        let traj = two_ball_distribution(&u, 0, 1);
        // (0,2): both exit mode 1; (1,1): opposite exits; (2,0): both exit 0.
        let expected = [traj[3], traj[1] + traj[2], traj[0]];
        for ((t, p), e) in dd.iter().zip(expected) {
            assert!((p - e).abs() < 1e-12, "{t}: {p} vs {e}");
        }
        assert!((dd[1].1 - 0.5).abs() < 1e-12);
        assert!((dd[0].1 - 0.25).abs() < 1e-12);
    }

    #[test]
    fn distinguishable_identity_is_a_point_mass() {
        let u = ComplexMatrix::identity(3);
        let s = ModeOccupation::new(vec![1, 1, 0]);
        let dd = distinguishable_distribution(&u, &s).unwrap();
        for (t, p) in dd {
            if t == s {
                assert!((p - 1.0).abs() < 1e-12);
            } else {
                assert!(p.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bosonic_and_distinguishable_differ_at_the_dip() {
        let u = ComplexMatrix::beamsplitter();
        let s = ModeOccupation::new(vec![1, 1]);
        let t = ModeOccupation::new(vec![1, 1]);
        let bosonic = outcome_probability(&u, &s, &t).unwrap();
        let dd = distinguishable_distribution(&u, &s).unwrap();
        let classical = dd.iter().find(|(o, _)| *o == t).unwrap().1;
        assert!(bosonic.abs() < 1e-12);
        assert!((classical - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sampling_frequency_matches_probability() {
        let u = ComplexMatrix::beamsplitter();
        let s = ModeOccupation::new(vec![1, 1]);
        let mut rng = master_rng(56);
        let k = 100_000;
        let (_, samples) = exact_distribution_and_sample(&u, &s, k, &mut rng).unwrap();
        let bunched = samples
            .iter()
            .filter(|t| t.counts == vec![2, 0])
            .count() as f64
            / k as f64;
        assert!((bunched - 0.5).abs() < 0.01, "freq = {bunched}");
    }

    #[test]
    fn enumeration_guard_trips() {
        let mut rng = master_rng(57);
        let u = random_unitary(30, &mut rng);
        let s = ModeOccupation::new({
            let mut v = vec![0; 30];
            for slot in v.iter_mut().take(12) {
                *slot = 1;
            }
            v
        });
        // C(41, 12) is about 7.9e9, far past the cap.
        assert!(matches!(
            exact_distribution_and_sample(&u, &s, 0, &mut rng),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn occupation_enumeration_is_lexicographic_and_complete() {
        let occs = enumerate_occupations(3, 2);
        assert_eq!(occs.len(), 6); // C(4, 2)
        let listed: Vec<Vec<usize>> = occs.iter().map(|o| o.counts.clone()).collect();
        let mut sorted = listed.clone();
        sorted.sort();
        assert_eq!(listed, sorted);
        assert_eq!(listed[0], vec![0, 0, 2]);
        assert_eq!(listed[5], vec![2, 0, 0]);
    }

    #[test]
    fn random_unitaries_are_unitary() {
        let mut rng = master_rng(58);
        for m in [1usize, 2, 5, 8] {
            let u = random_unitary(m, &mut rng);
            assert!(u.is_unitary(1e-10), "m = {m}, defect {}", u.unitarity_defect());
            for j in 0..m {
                let norm: f64 = (0..m).map(|i| u.get(i, j).norm_sqr()).sum();
                assert!((norm - 1.0).abs() < 1e-12);
            }
        }
        let scalar = random_unitary(1, &mut rng);
        assert!((scalar.get(0, 0).norm() - 1.0).abs() < 1e-12);
    }

    proptest! {
        /// The permanent is invariant under row swaps.
        #[test]
        fn permanent_row_swap_invariant(seed in 0u64..1000, i in 0usize..4, j in 0usize..4) {
            let mut rng = master_rng(seed);
            let m = random_matrix(4, &mut rng);
            let mut swapped = m.clone();
            for col in 0..4 {
                let a = swapped.get(i, col);
                let b = swapped.get(j, col);
                swapped.data[i * 4 + col] = b;
                swapped.data[j * 4 + col] = a;
            }
            let pa = permanent_naive(&m).unwrap();
            let pb = permanent_naive(&swapped).unwrap();
            prop_assert!((pa - pb).norm() < 1e-10);
        }
    }
}
