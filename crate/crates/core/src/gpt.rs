//! Fiducial-vector state spaces and the two-measurement gbit theory.
//!
//! A state is the list of outcome distributions it assigns to each fiducial
//! measurement. The gbit theory has two dichotomic measurements `X` and `Z`
//! and four pure states: each measurement's two outcomes are prepared
//! deterministically while the other measurement stays uniformly random.
//! Its maximally mixed state splits into two different pure-state pairs,
//! which is exactly what makes the state space non-simplicial and the
//! theory nonclassical.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normalization slack for probability blocks; all values arising here are
/// dyadic rationals, so this only absorbs accumulated mixing error.
pub const NORM_TOL: f64 = 1e-12;

/// One of the two gbit fiducial measurements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Measurement {
    X,
    Z,
}

impl Measurement {
    pub const ALL: [Measurement; 2] = [Measurement::X, Measurement::Z];

    pub fn label(self) -> char {
        match self {
            Measurement::X => 'X',
            Measurement::Z => 'Z',
        }
    }
}

impl std::str::FromStr for Measurement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "X" | "x" => Ok(Measurement::X),
            "Z" | "z" => Ok(Measurement::Z),
            other => Err(Error::invalid(format!("unknown measurement label {other:?}"))),
        }
    }
}

/// A dichotomic outcome, written `+`/`-`. Bit convention: `+` is 0, `-` is 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn bit(self) -> u8 {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }

    pub fn from_bit(bit: u8) -> Sign {
        if bit == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl std::str::FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" => Ok(Sign::Plus),
            "-" | "minus" => Ok(Sign::Minus),
            other => Err(Error::invalid(format!("unknown outcome label {other:?}"))),
        }
    }
}

/// Outcome distribution for one fiducial measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub measurement: char,
    pub probs: Vec<f64>,
}

/// An operational state: one outcome distribution per fiducial measurement,
/// in the block order fixed by the owning theory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiducialState {
    blocks: Vec<Block>,
}

impl FiducialState {
    /// Validates that every probability lies in `[0, 1]` and every block
    /// sums to 1 within [`NORM_TOL`].
    pub fn new(blocks: Vec<Block>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::invalid("state must have at least one block"));
        }
        for block in &blocks {
            if block.probs.is_empty() {
                return Err(Error::invalid(format!(
                    "block {} has no outcomes",
                    block.measurement
                )));
            }
            for &p in &block.probs {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::invalid(format!(
                        "probability {p} in block {} outside [0, 1]",
                        block.measurement
                    )));
                }
            }
            let total: f64 = block.probs.iter().sum();
            if (total - 1.0).abs() > NORM_TOL {
                return Err(Error::invalid(format!(
                    "block {} sums to {total}, not 1",
                    block.measurement
                )));
            }
        }
        Ok(FiducialState { blocks })
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Outcome distribution for the given measurement label, if present.
    pub fn block(&self, measurement: char) -> Option<&Block> {
        self.blocks.iter().find(|b| b.measurement == measurement)
    }

    /// True when the two states have the same measurements with the same
    /// arities, in the same order.
    pub fn same_shape(&self, other: &FiducialState) -> bool {
        self.blocks.len() == other.blocks.len()
            && self
                .blocks
                .iter()
                .zip(&other.blocks)
                .all(|(a, b)| a.measurement == b.measurement && a.probs.len() == b.probs.len())
    }

    fn approx_eq(&self, other: &FiducialState, tol: f64) -> bool {
        self.same_shape(other)
            && self
                .blocks
                .iter()
                .zip(&other.blocks)
                .all(|(a, b)| {
                    a.probs
                        .iter()
                        .zip(&b.probs)
                        .all(|(x, y)| (x - y).abs() <= tol)
                })
    }
}

/// The pure state that prepares `sign` for `meas` and leaves the other
/// measurement uniformly random.
pub fn gbit_pure(meas: Measurement, sign: Sign) -> FiducialState {
    let det = |s: Sign| match s {
        Sign::Plus => vec![1.0, 0.0],
        Sign::Minus => vec![0.0, 1.0],
    };
    let uniform = vec![0.5, 0.5];
    let (x, z) = match meas {
        Measurement::X => (det(sign), uniform),
        Measurement::Z => (uniform, det(sign)),
    };
    FiducialState::new(vec![
        Block {
            measurement: 'X',
            probs: x,
        },
        Block {
            measurement: 'Z',
            probs: z,
        },
    ])
    .expect("gbit pure states are normalized by construction")
}

/// Blockwise convex combination. Weights must be nonnegative and sum to 1
/// within [`NORM_TOL`]; all states must share the same block structure.
pub fn mix(components: &[(f64, &FiducialState)]) -> Result<FiducialState> {
    if components.is_empty() {
        return Err(Error::invalid("mix requires at least one component"));
    }
    let total: f64 = components.iter().map(|(w, _)| w).sum();
    if components.iter().any(|(w, _)| *w < 0.0) {
        return Err(Error::invalid("mixing weights must be nonnegative"));
    }
    if (total - 1.0).abs() > NORM_TOL {
        return Err(Error::invalid(format!(
            "mixing weights sum to {total}, not 1"
        )));
    }
    let first = components[0].1;
    for (_, state) in components {
        if !state.same_shape(first) {
            return Err(Error::invalid("mixed states must share block structure"));
        }
    }
    let blocks = first
        .blocks
        .iter()
        .enumerate()
        .map(|(bi, block)| Block {
            measurement: block.measurement,
            probs: (0..block.probs.len())
                .map(|oi| {
                    components
                        .iter()
                        .map(|(w, s)| w * s.blocks[bi].probs[oi])
                        .sum()
                })
                .collect(),
        })
        .collect();
    FiducialState::new(blocks)
}

/// Samples an outcome of `meas` on `state` and collapses to the pure state
/// labeled by the result, so an immediate repeat of the same measurement is
/// deterministic.
pub fn measure_gbit<R: Rng>(
    state: &FiducialState,
    meas: Measurement,
    rng: &mut R,
) -> (Sign, FiducialState) {
    let block = state
        .block(meas.label())
        .expect("gbit states carry X and Z blocks");
    let p_plus = block.probs[0];
    let sign = if rng.gen::<f64>() < p_plus {
        Sign::Plus
    } else {
        Sign::Minus
    };
    (sign, gbit_pure(meas, sign))
}

/// A theory fragment given by its pure states over shared fiducial
/// measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct Theory {
    pure_states: Vec<FiducialState>,
}

impl Theory {
    /// The two-input-two-output gbit theory with its four pure states.
    pub fn gbit() -> Theory {
        Theory {
            pure_states: vec![
                gbit_pure(Measurement::X, Sign::Plus),
                gbit_pure(Measurement::X, Sign::Minus),
                gbit_pure(Measurement::Z, Sign::Plus),
                gbit_pure(Measurement::Z, Sign::Minus),
            ],
        }
    }

    /// A classical bit: one measurement, two deterministic pure states.
    /// Its state space is a simplex, so it fails the nonsimpliciality test.
    pub fn classical_bit() -> Theory {
        let pure = |probs: Vec<f64>| {
            FiducialState::new(vec![Block {
                measurement: 'X',
                probs,
            }])
            .expect("classical pure states are normalized")
        };
        Theory {
            pure_states: vec![pure(vec![1.0, 0.0]), pure(vec![0.0, 1.0])],
        }
    }

    pub fn from_pure_states(pure_states: Vec<FiducialState>) -> Result<Theory> {
        if pure_states.len() < 2 {
            return Err(Error::invalid("a theory needs at least two pure states"));
        }
        let first = &pure_states[0];
        if !pure_states.iter().all(|s| s.same_shape(first)) {
            return Err(Error::invalid("pure states must share block structure"));
        }
        Ok(Theory { pure_states })
    }

    pub fn pure_states(&self) -> &[FiducialState] {
        &self.pure_states
    }

    /// Uniform mixture of all pure states.
    pub fn maximally_mixed(&self) -> FiducialState {
        let w = 1.0 / self.pure_states.len() as f64;
        let components: Vec<(f64, &FiducialState)> =
            self.pure_states.iter().map(|s| (w, s)).collect();
        mix(&components).expect("uniform mixture of shared-shape states is valid")
    }
}

/// True iff the maximally mixed state admits at least two distinct
/// equal-weight pure-state pair decompositions. A simplex admits exactly
/// one decomposition of any mixed state, so two distinct pairs witness a
/// nonclassical state space.
pub fn verify_nonsimplicial(theory: &Theory) -> bool {
    let mixed = theory.maximally_mixed();
    let states = theory.pure_states();
    let mut decompositions: Vec<(usize, usize)> = Vec::new();
    for i in 0..states.len() {
        for j in (i + 1)..states.len() {
            let pair = mix(&[(0.5, &states[i]), (0.5, &states[j])])
                .expect("theory states share block structure");
            if pair.approx_eq(&mixed, NORM_TOL) {
                decompositions.push((i, j));
            }
        }
    }
    decompositions.len() >= 2
}
