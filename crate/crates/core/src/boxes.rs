//! Bipartite behaviors and exact local-polytope membership.
//!
//! A behavior is the conditional table `P(ab|xy)` of a two-input
//! two-output box, kept no-signaling by construction. Local means the
//! table is a convex mixture of the 16 deterministic strategies; the
//! membership test runs two independent oracles and the tests require the
//! oracles to agree:
//!
//! * a primal phase-1 simplex that searches for explicit mixture weights
//!   over the 16 deterministic vertices, and
//! * the complete facet description of this scenario's local polytope,
//!   namely positivity plus the eight CHSH sign variants bounded by 2.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical slack for normalization and no-signaling checks.
pub const BEHAVIOR_TOL: f64 = 1e-12;

/// Default tolerance for membership decisions; the reference boxes are
/// exact rationals or `1/sqrt(2)` values, so this is generous.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// A deterministic local strategy: fixed responses `a(x)` and `b(y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetStrategy {
    pub a: [u8; 2],
    pub b: [u8; 2],
}

impl DetStrategy {
    /// Strategies indexed `8*a(0) + 4*a(1) + 2*b(0) + b(1)`.
    pub fn from_index(index: usize) -> Result<DetStrategy> {
        if index >= 16 {
            return Err(Error::invalid(format!(
                "deterministic strategy index {index} out of range"
            )));
        }
        Ok(DetStrategy {
            a: [(index >> 3) as u8 & 1, (index >> 2) as u8 & 1],
            b: [(index >> 1) as u8 & 1, index as u8 & 1],
        })
    }

    pub fn index(&self) -> usize {
        ((self.a[0] as usize) << 3)
            | ((self.a[1] as usize) << 2)
            | ((self.b[0] as usize) << 1)
            | (self.b[1] as usize)
    }
}

/// Named reference boxes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoxKind {
    Deterministic(DetStrategy),
    Uniform,
    Pr,
    Tsirelson,
}

/// Conditional table `P(ab|xy)`, stored as `table[2x + y][2a + b]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Behavior {
    table: [[f64; 4]; 4],
}

impl Behavior {
    /// Validates positivity, per-context normalization, and no-signaling.
    pub fn new(table: [[f64; 4]; 4]) -> Result<Behavior> {
        for (ctx, row) in table.iter().enumerate() {
            for &p in row {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::invalid(format!(
                        "entry {p} in context {ctx} outside [0, 1]"
                    )));
                }
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > BEHAVIOR_TOL {
                return Err(Error::invalid(format!(
                    "context {ctx} sums to {total}, not 1"
                )));
            }
        }
        let b = Behavior { table };
        for x in 0..2 {
            for a in 0..2 {
                let m0 = b.marginal_a(a, x, 0);
                let m1 = b.marginal_a(a, x, 1);
                if (m0 - m1).abs() > BEHAVIOR_TOL {
                    return Err(Error::invalid(format!(
                        "signaling to Alice: P(a={a}|x={x}) depends on y ({m0} vs {m1})"
                    )));
                }
            }
        }
        for y in 0..2 {
            for bit in 0..2 {
                let m0 = b.marginal_b(bit, 0, y);
                let m1 = b.marginal_b(bit, 1, y);
                if (m0 - m1).abs() > BEHAVIOR_TOL {
                    return Err(Error::invalid(format!(
                        "signaling to Bob: P(b={bit}|y={y}) depends on x ({m0} vs {m1})"
                    )));
                }
            }
        }
        Ok(b)
    }

    pub fn prob(&self, a: u8, b: u8, x: u8, y: u8) -> f64 {
        self.table[(2 * x + y) as usize][(2 * a + b) as usize]
    }

    pub fn table(&self) -> &[[f64; 4]; 4] {
        &self.table
    }

    fn marginal_a(&self, a: usize, x: usize, y: usize) -> f64 {
        let row = &self.table[2 * x + y];
        row[2 * a] + row[2 * a + 1]
    }

    fn marginal_b(&self, b: usize, x: usize, y: usize) -> f64 {
        let row = &self.table[2 * x + y];
        row[b] + row[2 + b]
    }

    /// Correlator `E(x,y)` with outcomes mapped `0 -> +1`, `1 -> -1`.
    pub fn correlator(&self, x: u8, y: u8) -> f64 {
        let row = &self.table[(2 * x + y) as usize];
        row[0] - row[1] - row[2] + row[3]
    }

    /// Convex mixture of behaviors; weights must sum to 1.
    pub fn mixture(components: &[(f64, &Behavior)]) -> Result<Behavior> {
        if components.is_empty() {
            return Err(Error::invalid("mixture requires at least one component"));
        }
        if components.iter().any(|(w, _)| *w < 0.0) {
            return Err(Error::invalid("mixture weights must be nonnegative"));
        }
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > BEHAVIOR_TOL {
            return Err(Error::invalid(format!(
                "mixture weights sum to {total}, not 1"
            )));
        }
        let mut table = [[0.0; 4]; 4];
        for (w, b) in components {
            for (acc_row, row) in table.iter_mut().zip(&b.table) {
                for (acc, p) in acc_row.iter_mut().zip(row) {
                    *acc += w * p;
                }
            }
        }
        Behavior::new(table)
    }

    /// Random mixture of the 24 no-signaling-polytope vertices, with
    /// Dirichlet weights concentrated enough that draws land on both sides
    /// of the local boundary; test-input generation for the membership
    /// oracles.
    pub fn random_no_signaling<R: Rng>(rng: &mut R) -> Behavior {
        use rand_distr::{Distribution, Gamma};
        let vertices = no_signaling_vertices();
        let gamma = Gamma::new(0.2, 1.0).expect("valid shape");
        let raw: Vec<f64> = (0..vertices.len())
            .map(|_| f64::max(gamma.sample(rng), 1e-300))
            .collect();
        let total: f64 = raw.iter().sum();
        let components: Vec<(f64, &Behavior)> = raw
            .iter()
            .zip(&vertices)
            .map(|(w, v)| (w / total, v))
            .collect();
        Behavior::mixture(&components).expect("vertex mixtures stay no-signaling")
    }
}

/// Builds one of the named reference boxes.
pub fn make_behavior(kind: BoxKind) -> Behavior {
    let table = match kind {
        BoxKind::Deterministic(mu) => {
            let mut t = [[0.0; 4]; 4];
            for x in 0..2usize {
                for y in 0..2usize {
                    let (a, b) = (mu.a[x], mu.b[y]);
                    t[2 * x + y][(2 * a + b) as usize] = 1.0;
                }
            }
            t
        }
        BoxKind::Uniform => [[0.25; 4]; 4],
        BoxKind::Pr => pr_variant_table(0, 0, 0),
        BoxKind::Tsirelson => {
            let c = 1.0 / std::f64::consts::SQRT_2;
            let mut t = [[0.0; 4]; 4];
            for x in 0..2usize {
                for y in 0..2usize {
                    let e = if x == 1 && y == 1 { -c } else { c };
                    for a in 0..2usize {
                        for b in 0..2usize {
                            let sign = if (a + b) % 2 == 0 { 1.0 } else { -1.0 };
                            t[2 * x + y][2 * a + b] = 0.25 * (1.0 + sign * e);
                        }
                    }
                }
            }
            t
        }
    };
    Behavior::new(table).expect("reference boxes satisfy the behavior invariants")
}

fn pr_variant_table(alpha: u8, beta: u8, gamma: u8) -> [[f64; 4]; 4] {
    let mut t = [[0.0; 4]; 4];
    for x in 0..2u8 {
        for y in 0..2u8 {
            for a in 0..2u8 {
                for b in 0..2u8 {
                    if a ^ b == (x & y) ^ (alpha & x) ^ (beta & y) ^ gamma {
                        t[(2 * x + y) as usize][(2 * a + b) as usize] = 0.5;
                    }
                }
            }
        }
    }
    t
}

/// One of the eight extremal nonlocal boxes: `a + b = xy + alpha.x + beta.y
/// + gamma (mod 2)` with uniform noise over the satisfying pairs.
pub fn pr_variant(alpha: u8, beta: u8, gamma: u8) -> Behavior {
    Behavior::new(pr_variant_table(alpha & 1, beta & 1, gamma & 1))
        .expect("PR-type boxes are no-signaling")
}

/// The 16 deterministic vertices followed by the 8 PR-type vertices.
pub fn no_signaling_vertices() -> Vec<Behavior> {
    let mut v: Vec<Behavior> = (0..16)
        .map(|i| make_behavior(BoxKind::Deterministic(DetStrategy::from_index(i).unwrap())))
        .collect();
    for alpha in 0..2 {
        for beta in 0..2 {
            for gamma in 0..2 {
                v.push(pr_variant(alpha, beta, gamma));
            }
        }
    }
    v
}

/// CHSH score `E(0,0) + E(0,1) + E(1,0) - E(1,1)`.
pub fn chsh_value(behavior: &Behavior) -> f64 {
    behavior.correlator(0, 0) + behavior.correlator(0, 1) + behavior.correlator(1, 0)
        - behavior.correlator(1, 1)
}

/// Mixture weights over the 16 deterministic strategies reproducing a
/// behavior.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalDecomposition {
    pub weights: [f64; 16],
}

impl LocalDecomposition {
    /// The behavior this decomposition reconstructs.
    pub fn reconstruct(&self) -> Behavior {
        let vertices: Vec<Behavior> = (0..16)
            .map(|i| make_behavior(BoxKind::Deterministic(DetStrategy::from_index(i).unwrap())))
            .collect();
        let components: Vec<(f64, &Behavior)> =
            self.weights.iter().copied().zip(vertices.iter()).collect();
        Behavior::mixture(&components).expect("decomposition weights form a mixture")
    }

    /// Largest absolute entry-wise gap to the target behavior.
    pub fn max_residual(&self, target: &Behavior) -> f64 {
        let recon = self.reconstruct();
        let mut worst: f64 = 0.0;
        for ctx in 0..4 {
            for out in 0..4 {
                worst = worst.max((recon.table[ctx][out] - target.table[ctx][out]).abs());
            }
        }
        worst
    }
}

/// Deterministic-vertex membership by phase-1 simplex: returns the mixture
/// weights when the behavior lies in the local polytope within `tolerance`,
/// `None` otherwise.
pub fn is_local(behavior: &Behavior, tolerance: f64) -> Option<LocalDecomposition> {
    // Equality system A w = p over w >= 0: 16 rows (context, outcome),
    // 16 columns (deterministic strategies). Row sums force sum(w) = 1,
    // so no separate normalization row is needed.
    const ROWS: usize = 16;
    const COLS: usize = 16;
    let mut a = [[0.0f64; COLS]; ROWS];
    for (mu, col) in (0..COLS).map(|i| (DetStrategy::from_index(i).unwrap(), i)) {
        for x in 0..2usize {
            for y in 0..2usize {
                let out = (2 * mu.a[x] + mu.b[y]) as usize;
                a[(2 * x + y) * 4 + out][col] = 1.0;
            }
        }
    }
    let mut rhs = [0.0f64; ROWS];
    for ctx in 0..4 {
        for out in 0..4 {
            rhs[ctx * 4 + out] = behavior.table[ctx][out];
        }
    }

    // Phase-1 tableau: minimize the sum of artificial variables.
    // Columns 0..16 structural, 16..32 artificial, last column rhs.
    const WIDTH: usize = COLS + ROWS + 1;
    let mut tab = vec![[0.0f64; WIDTH]; ROWS];
    let mut basis = [0usize; ROWS];
    for i in 0..ROWS {
        tab[i][..COLS].copy_from_slice(&a[i]);
        tab[i][COLS + i] = 1.0;
        tab[i][WIDTH - 1] = rhs[i];
        basis[i] = COLS + i;
    }
    // Canonical objective row: column sums of the structural part.
    let mut obj = [0.0f64; WIDTH];
    for row in &tab {
        for j in 0..COLS {
            obj[j] += row[j];
        }
        obj[WIDTH - 1] += row[WIDTH - 1];
    }

    const PIVOT_EPS: f64 = 1e-11;
    // Bland's rule keeps the degenerate pivots from cycling.
    loop {
        let entering = (0..COLS + ROWS).find(|&j| obj[j] > PIVOT_EPS);
        let Some(col) = entering else { break };
        let mut pivot_row: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for i in 0..ROWS {
            if tab[i][col] > PIVOT_EPS {
                let ratio = tab[i][WIDTH - 1] / tab[i][col];
                let better = ratio < best_ratio - PIVOT_EPS
                    || ((ratio - best_ratio).abs() <= PIVOT_EPS
                        && pivot_row.is_none_or(|r| basis[i] < basis[r]));
                if better {
                    best_ratio = ratio;
                    pivot_row = Some(i);
                }
            }
        }
        let Some(row) = pivot_row else {
            // Unbounded cannot occur in phase 1; treat as failure to certify.
            return None;
        };
        let pivot = tab[row][col];
        for v in tab[row].iter_mut() {
            *v /= pivot;
        }
        let pivot_vals = tab[row];
        for (i, current) in tab.iter_mut().enumerate() {
            if i != row {
                let factor = current[col];
                if factor != 0.0 {
                    for (v, p) in current.iter_mut().zip(&pivot_vals) {
                        *v -= factor * p;
                    }
                }
            }
        }
        let factor = obj[col];
        if factor != 0.0 {
            for (o, t) in obj.iter_mut().zip(&tab[row]) {
                *o -= factor * t;
            }
        }
        basis[row] = col;
    }

    let infeasibility = obj[WIDTH - 1];
    if infeasibility > tolerance {
        return None;
    }

    let mut weights = [0.0f64; 16];
    for i in 0..ROWS {
        if basis[i] < COLS {
            weights[basis[i]] = tab[i][WIDTH - 1].max(0.0);
        }
    }
    let total: f64 = weights.iter().sum();
    if total > 0.0 {
        for w in &mut weights {
            *w /= total;
        }
    }
    let decomposition = LocalDecomposition { weights };
    debug_assert!(
        satisfies_chsh_facets(behavior, tolerance.max(1e-9)),
        "primal feasibility disagrees with the facet oracle"
    );
    Some(decomposition)
}

/// Facet-description membership: every one of the eight CHSH sign variants
/// stays at or below 2 (positivity and no-signaling already hold for any
/// constructed [`Behavior`]).
pub fn satisfies_chsh_facets(behavior: &Behavior, tolerance: f64) -> bool {
    let e = [
        behavior.correlator(0, 0),
        behavior.correlator(0, 1),
        behavior.correlator(1, 0),
        behavior.correlator(1, 1),
    ];
    for signs in 0..16u8 {
        let s: Vec<f64> = (0..4)
            .map(|i| if signs >> i & 1 == 1 { -1.0 } else { 1.0 })
            .collect();
        if s.iter().product::<f64>() > 0.0 {
            continue; // CHSH facets carry an odd number of minus signs.
        }
        let value: f64 = s.iter().zip(&e).map(|(si, ei)| si * ei).sum();
        if value > 2.0 + tolerance {
            return false;
        }
    }
    true
}

/// Device-independent security precondition: the behavior must be outside
/// the local polytope, otherwise its correlations admit a preparation by a
/// classical distribution an eavesdropper could hold.
pub fn di_secure_precondition(behavior: &Behavior) -> bool {
    is_local(behavior, MEMBERSHIP_TOL).is_none()
}
