//! Information-theoretic security calculus for the intercept-resend attack.
//!
//! Against an attack on a fraction `f` of transmitted systems, the honest
//! parties share `I(A:B) = 1 - h(f/4)` bits per system while the attacker
//! gains `I(A:E) = f/2`. A positive secret-key rate survives while
//! `I(A:B) >= I(A:E)`; the crossover fraction and the matching tolerable
//! error rate come out of a bisection on the gap between the two sides.

use serde::Serialize;

use crate::error::{Error, Result};

/// Shannon entropy of a biased bit, in bits. `p` must lie in `[0, 1]`;
/// the `0 log 0 = 0` convention applies at the endpoints.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("entropy argument {p} outside [0, 1]")));
    }
    Ok(h_unchecked(p))
}

fn h_unchecked(p: f64) -> f64 {
    let term = |q: f64| if q <= 0.0 { 0.0 } else { -q * q.log2() };
    term(p) + term(1.0 - p)
}

/// Csiszar-Korner condition: a secret key is distillable when the honest
/// parties' mutual information is at least the eavesdropper's.
pub fn ck_secure(iab: f64, iae: f64) -> bool {
    iab >= iae
}

/// `(1 - h(f/4)) - f/2`: positive while the protocol tolerates an attack
/// fraction `f`, negative once the attacker learns more than Bob.
pub fn key_rate_gap(f: f64) -> f64 {
    assert!(
        (0.0..=1.0).contains(&f),
        "attack fraction {f} outside [0, 1]"
    );
    (1.0 - h_unchecked(f / 4.0)) - f / 2.0
}

/// Threshold attack fraction, the tolerable error rate it implies, and the
/// gap curve sampled on a grid.
#[derive(Debug, Clone, Serialize)]
pub struct SecurityReport {
    /// Attack fraction at which the key-rate gap crosses zero.
    pub f_star: f64,
    /// Tolerable error rate, `f_star / 4`.
    pub e_max: f64,
    /// `(f, key_rate_gap(f))` samples on a uniform grid over [0, 1].
    pub grid: Vec<(f64, f64)>,
}

/// Number of grid samples carried in a [`SecurityReport`].
pub const REPORT_GRID_POINTS: usize = 101;

/// Bisects [`key_rate_gap`] over `[0, 1]` down to an interval of width
/// `tolerance` and reports the root together with the implied error rate.
pub fn solve_threshold(tolerance: f64) -> Result<SecurityReport> {
    if tolerance <= 0.0 {
        return Err(Error::invalid(format!(
            "tolerance must be positive, got {tolerance}"
        )));
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let (glo, ghi) = (key_rate_gap(lo), key_rate_gap(hi));
    // gap(0) = 1 and gap(1) < 0; guarded anyway.
    if glo.signum() == ghi.signum() {
        return Err(Error::numerical(
            "key-rate gap does not change sign over [0, 1]",
        ));
    }
    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        if key_rate_gap(mid).signum() == glo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let f_star = 0.5 * (lo + hi);
    let grid = (0..REPORT_GRID_POINTS)
        .map(|i| {
            let f = i as f64 / (REPORT_GRID_POINTS - 1) as f64;
            (f, key_rate_gap(f))
        })
        .collect();
    Ok(SecurityReport {
        f_star,
        e_max: f_star / 4.0,
        grid,
    })
}
