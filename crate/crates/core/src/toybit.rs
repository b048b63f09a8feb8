//! An epistemically restricted toy bit: entanglement and teleportation in
//! a theory whose every induced behavior stays local.
//!
//! The system has four ontic states. An observer's knowledge is a support
//! set of size two (pure) or four (maximally mixed) — never less, which is
//! the knowledge-balance restriction. The three measurements are the three
//! 2+2 partitions of the ontic set; measuring reveals the block containing
//! the actual ontic state and re-randomizes within it.
//!
//! Two systems can be correlated ontically as `{(k, k)}`: each marginal is
//! maximally mixed, yet the pair support is no product set — the toy
//! analogue of an entangled state. A four-outcome joint measurement whose
//! blocks are the graphs of the four Klein-group permutations supports
//! exact teleportation with two classical bits, while every behavior the
//! pair induces admits the ontic value itself as a hidden variable and is
//! therefore local.

use rand::Rng;
use serde::Serialize;

use crate::boxes::Behavior;
use crate::error::{Error, Result};

/// The four Klein-group permutations of `{1,2,3,4}` (0-indexed tables).
/// Block `i` of the joint measurement is the graph of `PERMS[i]`, and each
/// is its own inverse, so the same table serves as Bob's correction.
const PERMS: [[usize; 4]; 4] = [
    [0, 1, 2, 3],
    [1, 0, 3, 2],
    [2, 3, 0, 1],
    [3, 2, 1, 0],
];

/// One of the four ontic (hidden) states, numbered 1 through 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct OnticState(u8);

impl OnticState {
    pub fn new(value: u8) -> Result<OnticState> {
        if (1..=4).contains(&value) {
            Ok(OnticState(value))
        } else {
            Err(Error::invalid(format!("ontic state {value} outside 1..=4")))
        }
    }

    pub const ALL: [OnticState; 4] = [OnticState(1), OnticState(2), OnticState(3), OnticState(4)];

    pub fn value(self) -> u8 {
        self.0
    }

    fn index(self) -> usize {
        (self.0 - 1) as usize
    }

    fn from_index(i: usize) -> OnticState {
        OnticState(i as u8 + 1)
    }
}

/// An observer's knowledge: the set of ontic states not ruled out.
/// Valid supports have size 2 (pure) or 4 (maximally mixed).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EpistemicState {
    support: [bool; 4],
}

impl EpistemicState {
    pub fn new(support: &[u8]) -> Result<EpistemicState> {
        let mut mask = [false; 4];
        for &v in support {
            let s = OnticState::new(v)?;
            mask[s.index()] = true;
        }
        let size = mask.iter().filter(|&&b| b).count();
        if size != 2 && size != 4 {
            return Err(Error::invalid(format!(
                "epistemic support must have size 2 or 4, got {size}"
            )));
        }
        Ok(EpistemicState { support: mask })
    }

    /// The six pure states, i.e. all 2-element supports.
    pub fn pure_states() -> Vec<EpistemicState> {
        let mut out = Vec::new();
        for i in 1..=4u8 {
            for j in (i + 1)..=4 {
                out.push(EpistemicState::new(&[i, j]).unwrap());
            }
        }
        out
    }

    pub fn maximally_mixed() -> EpistemicState {
        EpistemicState::new(&[1, 2, 3, 4]).unwrap()
    }

    pub fn is_pure(&self) -> bool {
        self.len() == 2
    }

    pub fn len(&self) -> usize {
        self.support.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, s: OnticState) -> bool {
        self.support[s.index()]
    }

    /// Members in ascending order.
    pub fn members(&self) -> Vec<OnticState> {
        (0..4)
            .filter(|&i| self.support[i])
            .map(OnticState::from_index)
            .collect()
    }

    fn map(&self, perm: &[usize; 4]) -> EpistemicState {
        let mut mask = [false; 4];
        for i in 0..4 {
            if self.support[i] {
                mask[perm[i]] = true;
            }
        }
        EpistemicState { support: mask }
    }
}

impl std::fmt::Display for EpistemicState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (n, s) in self.members().into_iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", s.value())?;
        }
        write!(f, "}}")
    }
}

/// One of the three toy measurements: a 2+2 partition of the ontic set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ToyMeasurement {
    /// Block masks; block 0 always contains ontic state 1.
    blocks: [[bool; 4]; 2],
}

impl ToyMeasurement {
    /// The three partitions `{12|34}`, `{13|24}`, `{14|23}`.
    pub fn all() -> [ToyMeasurement; 3] {
        let from_pairs = |a: [u8; 2], b: [u8; 2]| {
            let mut blocks = [[false; 4]; 2];
            for v in a {
                blocks[0][(v - 1) as usize] = true;
            }
            for v in b {
                blocks[1][(v - 1) as usize] = true;
            }
            ToyMeasurement { blocks }
        };
        [
            from_pairs([1, 2], [3, 4]),
            from_pairs([1, 3], [2, 4]),
            from_pairs([1, 4], [2, 3]),
        ]
    }

    pub fn by_index(i: usize) -> Result<ToyMeasurement> {
        ToyMeasurement::all()
            .get(i)
            .copied()
            .ok_or_else(|| Error::invalid(format!("toy measurement index {i} outside 0..=2")))
    }

    /// Which block (0 or 1) the ontic state falls in.
    pub fn block_of(&self, s: OnticState) -> usize {
        usize::from(!self.blocks[0][s.index()])
    }

    /// The epistemic state an outcome leaves behind: the outcome block.
    pub fn block_state(&self, outcome: usize) -> EpistemicState {
        EpistemicState {
            support: self.blocks[outcome],
        }
    }
}

/// Measures a toy system: the outcome is the block holding the sampled
/// ontic state, and the disturbance re-randomizes within that block, so
/// the post-measurement knowledge is exactly the outcome block.
pub fn toy_measure<R: Rng>(
    state: &EpistemicState,
    meas: ToyMeasurement,
    rng: &mut R,
) -> (usize, EpistemicState) {
    let members = state.members();
    let ontic = members[rng.gen_range(0..members.len())];
    let outcome = meas.block_of(ontic);
    (outcome, meas.block_state(outcome))
}

/// Ontic-level teleportation kernel: given the input system's ontic state
/// and the shared pair's ontic value, returns Alice's 2-bit outcome and
/// the ontic state Bob's system carries after his correction.
///
/// The joint measurement block containing `(a, k)` is the unique `i` with
/// `PERMS[i](a) = k`; Bob's correction applies `PERMS[i]` again, so the
/// corrected ontic state equals `a` identically.
pub fn teleport_ontic(input: OnticState, pair: OnticState) -> (usize, OnticState) {
    let outcome = (0..4)
        .find(|&i| PERMS[i][input.index()] == pair.index())
        .expect("the Klein permutations act simply transitively");
    // Bob's third system starts at the pair value; the correction is the
    // (self-inverse) permutation named by Alice's outcome.
    let corrected = PERMS[outcome][pair.index()];
    (outcome, OnticState::from_index(corrected))
}

/// Teleports a pure toy state through the correlated pair: samples the
/// ontic configuration, runs the joint measurement, and applies Bob's
/// correction. The recovered knowledge equals the input support exactly.
pub fn toy_teleport<R: Rng>(
    input: &EpistemicState,
    rng: &mut R,
) -> Result<(EpistemicState, [u8; 2])> {
    if !input.is_pure() {
        return Err(Error::invalid(
            "teleportation input must be a pure (2-element) epistemic state",
        ));
    }
    let members = input.members();
    let input_ontic = members[rng.gen_range(0..members.len())];
    let pair_ontic = OnticState::ALL[rng.gen_range(0..4)];
    let (outcome, _corrected) = teleport_ontic(input_ontic, pair_ontic);
    // Bob's knowledge of his corrected system: the input support pushed
    // through the pair correlation and the correction — the identity map.
    let recovered = input.map(&PERMS[outcome]).map(&PERMS[outcome]);
    let bits = [(outcome >> 1) as u8, (outcome & 1) as u8];
    Ok((recovered, bits))
}

/// Knowledge about a pair of toy systems: a support over the 16 ontic
/// pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ToyPairState {
    support: [[bool; 4]; 4],
}

impl ToyPairState {
    /// The correlated pair `{(k, k)}`: maximally mixed marginals with a
    /// support that is no product set.
    pub fn entangled() -> ToyPairState {
        let mut support = [[false; 4]; 4];
        for (k, row) in support.iter_mut().enumerate() {
            row[k] = true;
        }
        ToyPairState { support }
    }

    pub fn contains(&self, first: OnticState, second: OnticState) -> bool {
        self.support[first.index()][second.index()]
    }

    /// Support of the first system alone.
    pub fn marginal_first(&self) -> Vec<OnticState> {
        (0..4)
            .filter(|&i| (0..4).any(|j| self.support[i][j]))
            .map(OnticState::from_index)
            .collect()
    }

    /// Support of the second system alone.
    pub fn marginal_second(&self) -> Vec<OnticState> {
        (0..4)
            .filter(|&j| (0..4).any(|i| self.support[i][j]))
            .map(OnticState::from_index)
            .collect()
    }

    /// Whether the support factorizes as `S_A x S_B`.
    pub fn is_product(&self) -> bool {
        let count = self
            .support
            .iter()
            .flatten()
            .filter(|&&b| b)
            .count();
        count == self.marginal_first().len() * self.marginal_second().len()
    }
}

/// The behavior induced by giving both halves of the correlated pair the
/// same two-measurement menu: input 0 selects `meas_a`, input 1 selects
/// `meas_b`, on either side. The ontic pair value is uniform over the four
/// diagonal states and fixes both outcomes, so the construction itself is
/// the hidden-variable model that keeps every induced behavior local.
pub fn induced_behavior(meas_a: ToyMeasurement, meas_b: ToyMeasurement) -> Behavior {
    let menu = [meas_a, meas_b];
    let mut table = [[0.0f64; 4]; 4];
    for x in 0..2usize {
        for y in 0..2usize {
            for k in OnticState::ALL {
                let a = menu[x].block_of(k);
                let b = menu[y].block_of(k);
                table[2 * x + y][2 * a + b] += 0.25;
            }
        }
    }
    Behavior::new(table).expect("ontic enumeration yields a no-signaling behavior")
}
