//! Monte-Carlo runs of the two local key-distribution protocols.
//!
//! Both protocols replace spacelike separation with time separation: Alice
//! prepares and leaves systems at an agreed location, Bob measures later,
//! and the public discussion sifts and checks as usual.
//!
//! * BB84-style: the gbit's two incompatible measurements carry the key.
//!   An intercept-resend attack on a fraction `f` of systems produces an
//!   error rate of `f/4`, while a passive 2-bit cheat device reproduces
//!   honest statistics exactly and still hands Eve the whole sifted key.
//! * KCBS-style: the five-observable cycle state carries the key through
//!   identical (correlated) and adjacent (anticorrelated) basis pairs. No
//!   pre-assigned record passes the adjacency checks — the best passive
//!   device fails at least one edge in five — but a device carrying memory
//!   of Alice's interaction passes everything.
//!
//! Every round draws from its own derived randomness stream, so runs are
//! bit-reproducible for a given seed regardless of scheduling.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gpt::{gbit_pure, measure_gbit, Measurement, Sign};
use crate::kcbs::{optimal_assignments, rho_sample_pair, CycleTheory, PairRelation};
use crate::rng::round_rng;
use crate::security::binary_entropy;

/// Adversary model for a protocol run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EveStrategy {
    /// No adversary; the channel and devices are trusted.
    Honest,
    /// Eve measures a fraction of transiting systems in a random basis and
    /// forwards the post-measurement state.
    InterceptResend { fraction: f64 },
    /// The devices were built by Eve: every system is replaced by a
    /// pre-assigned record of outcomes for each basis.
    PassiveDevice,
    /// A cheat device that carries the record of Alice's interaction
    /// forward in time and answers Bob consistently.
    ActiveMemoryDevice,
}

impl EveStrategy {
    fn validate(&self) -> Result<()> {
        if let EveStrategy::InterceptResend { fraction } = self {
            if !(0.0..=1.0).contains(fraction) {
                return Err(Error::invalid(format!(
                    "attack fraction {fraction} outside [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

/// Full record of a single protocol round.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Round {
    pub alice_basis: char,
    pub alice_bit: u8,
    pub eve_attacked: bool,
    pub eve_basis: Option<char>,
    pub bob_basis: char,
    pub bob_bit: u8,
    pub sifted: bool,
    pub used_for_check: bool,
}

/// Per-run aggregate results.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    /// Fraction of rounds surviving the sifting rule.
    pub sift_rate: f64,
    /// Error fraction on the publicly checked positions.
    pub qber: f64,
    /// Bits of key information the adversary holds after the public phase.
    pub eve_info_bits: f64,
    /// Whether the checked error rate exceeded the abort threshold.
    pub aborted: bool,
    /// Key bits left after the abstract distillation step.
    pub final_key_length: usize,
}

/// Which protocol produced a transcript.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolKind {
    Bb84Lkd,
    KcbsLkd,
}

/// The resolved configuration a transcript was produced under.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolParams {
    pub protocol: ProtocolKind,
    pub n: usize,
    pub strategy: EveStrategy,
    pub check_fraction: f64,
    pub error_threshold: f64,
}

/// Auditable record of one protocol run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transcript {
    pub params: ProtocolParams,
    pub seed: u64,
    pub rounds: Vec<Round>,
    pub summary: Summary,
}

impl Transcript {
    pub fn sifted_count(&self) -> usize {
        self.rounds.iter().filter(|r| r.sifted).count()
    }

    pub fn checked_count(&self) -> usize {
        self.rounds.iter().filter(|r| r.used_for_check).count()
    }
}

fn validate_fractions(check_fraction: f64, error_threshold: f64) -> Result<()> {
    if !(check_fraction > 0.0 && check_fraction < 1.0) {
        return Err(Error::invalid(format!(
            "check fraction {check_fraction} outside (0, 1)"
        )));
    }
    if !(error_threshold > 0.0 && error_threshold < 1.0) {
        return Err(Error::invalid(format!(
            "error threshold {error_threshold} outside (0, 1)"
        )));
    }
    Ok(())
}

/// Abstract distillation: the checked error rate shortens the remaining
/// key by the entropy it leaks plus a flat reconciliation cost of `2e`.
fn distilled_length(remaining: usize, error_rate: f64) -> usize {
    let h = binary_entropy(error_rate).expect("error rate is a probability");
    let rate = (1.0 - h - 2.0 * error_rate).max(0.0);
    (remaining as f64 * rate).floor() as usize
}

fn summarize(
    rounds: &[Round],
    n: usize,
    errors: usize,
    checked: usize,
    error_threshold: f64,
    eve_info_bits: f64,
) -> Summary {
    let sifted = rounds.iter().filter(|r| r.sifted).count();
    let qber = if checked == 0 {
        0.0
    } else {
        errors as f64 / checked as f64
    };
    let aborted = qber > error_threshold;
    let remaining = sifted - checked;
    let final_key_length = if aborted {
        0
    } else {
        distilled_length(remaining, qber)
    };
    Summary {
        sift_rate: sifted as f64 / n as f64,
        qber,
        eve_info_bits,
        aborted,
        final_key_length,
    }
}

/// Runs the BB84-style protocol: Alice prepares one of the four gbit pure
/// states per round, Eve acts per strategy, Bob measures in a random
/// basis, matching-basis rounds are sifted, a random subset is checked,
/// and the run aborts when the checked error rate exceeds the threshold.
///
/// Supported strategies: `Honest`, `InterceptResend`, `PassiveDevice`.
pub fn run_bb84_lkd(
    n: usize,
    strategy: EveStrategy,
    check_fraction: f64,
    qber_threshold: f64,
    seed: u64,
) -> Result<Transcript> {
    if n == 0 {
        return Err(Error::invalid("need at least one round"));
    }
    validate_fractions(check_fraction, qber_threshold)?;
    strategy.validate()?;
    if matches!(strategy, EveStrategy::ActiveMemoryDevice) {
        return Err(Error::invalid(
            "the memory-device attack targets the cyclic protocol; \
             the passive device already defeats this one",
        ));
    }

    let mut rounds = Vec::with_capacity(n);
    let mut errors = 0usize;
    let mut checked = 0usize;
    let mut eve_known_bits = 0usize;

    for i in 0..n {
        let mut rng = round_rng(seed, i as u64);
        let uniform_basis = |rng: &mut crate::rng::SimRng| {
            if rng.gen::<bool>() {
                Measurement::X
            } else {
                Measurement::Z
            }
        };

        let alice_basis = uniform_basis(&mut rng);
        let round = match strategy {
            EveStrategy::Honest | EveStrategy::InterceptResend { .. } => {
                let alice_sign = Sign::from_bit(rng.gen_range(0..2));
                let mut state = gbit_pure(alice_basis, alice_sign);
                let mut eve_attacked = false;
                let mut eve_basis = None;
                if let EveStrategy::InterceptResend { fraction } = strategy {
                    if rng.gen::<f64>() < fraction {
                        let basis = uniform_basis(&mut rng);
                        let (_, resent) = measure_gbit(&state, basis, &mut rng);
                        state = resent;
                        eve_attacked = true;
                        eve_basis = Some(basis.label());
                        if basis == alice_basis {
                            eve_known_bits += 1;
                        }
                    }
                }
                let bob_basis = uniform_basis(&mut rng);
                let (bob_sign, _) = measure_gbit(&state, bob_basis, &mut rng);
                Round {
                    alice_basis: alice_basis.label(),
                    alice_bit: alice_sign.bit(),
                    eve_attacked,
                    eve_basis,
                    bob_basis: bob_basis.label(),
                    bob_bit: bob_sign.bit(),
                    sifted: alice_basis == bob_basis,
                    used_for_check: false,
                }
            }
            EveStrategy::PassiveDevice => {
                // The device holds one pre-existing bit per basis; each
                // party is shown the bit for whichever basis they measure.
                let device = [rng.gen_range(0..2u8), rng.gen_range(0..2u8)];
                let stored = |m: Measurement| device[usize::from(m == Measurement::Z)];
                let bob_basis = uniform_basis(&mut rng);
                Round {
                    alice_basis: alice_basis.label(),
                    alice_bit: stored(alice_basis),
                    eve_attacked: true,
                    eve_basis: None,
                    bob_basis: bob_basis.label(),
                    bob_bit: stored(bob_basis),
                    sifted: alice_basis == bob_basis,
                    used_for_check: false,
                }
            }
            EveStrategy::ActiveMemoryDevice => unreachable!("rejected above"),
        };

        let mut round = round;
        if round.sifted && rng.gen::<f64>() < check_fraction {
            round.used_for_check = true;
            checked += 1;
            if round.alice_bit != round.bob_bit {
                errors += 1;
            }
        }
        rounds.push(round);
    }

    let sifted = rounds.iter().filter(|r| r.sifted).count();
    let eve_info_bits = match strategy {
        EveStrategy::Honest => 0.0,
        EveStrategy::InterceptResend { .. } => eve_known_bits as f64,
        EveStrategy::PassiveDevice | EveStrategy::ActiveMemoryDevice => sifted as f64,
    };
    let summary = summarize(&rounds, n, errors, checked, qber_threshold, eve_info_bits);
    Ok(Transcript {
        params: ProtocolParams {
            protocol: ProtocolKind::Bb84Lkd,
            n,
            strategy,
            check_fraction,
            error_threshold: qber_threshold,
        },
        seed,
        rounds,
        summary,
    })
}

/// Runs the KCBS-style protocol on the five-observable cycle: rounds with
/// identical or adjacent bases are sifted (expected keep rate 3/5), checks
/// verify identical pairs agree and adjacent pairs disagree, and Bob flips
/// his adjacent-round bits to align the key.
///
/// Supported strategies: `Honest`, `PassiveDevice`, `ActiveMemoryDevice`.
pub fn run_kcbs_lkd(
    n: usize,
    strategy: EveStrategy,
    check_fraction: f64,
    error_threshold: f64,
    seed: u64,
) -> Result<Transcript> {
    if n == 0 {
        return Err(Error::invalid("need at least one round"));
    }
    validate_fractions(check_fraction, error_threshold)?;
    strategy.validate()?;
    if matches!(strategy, EveStrategy::InterceptResend { .. }) {
        return Err(Error::invalid(
            "intercept-resend is not defined for the cyclic protocol",
        ));
    }

    let theory = CycleTheory::pentagon();
    let cycle = theory.len();
    // The strongest passive device: uniform over the assignments that
    // anticorrelate the brute-force maximum of 4 of the 5 edges.
    let best_assignments = optimal_assignments(cycle)?;

    let mut rounds = Vec::with_capacity(n);
    let mut errors = 0usize;
    let mut checked = 0usize;

    let label = |i: usize| -> char {
        theory
            .label(i)
            .chars()
            .next()
            .expect("pentagon labels are single characters")
    };

    for i in 0..n {
        let mut rng = round_rng(seed, i as u64);
        let alice_obs = rng.gen_range(0..cycle);
        let bob_obs = rng.gen_range(0..cycle);
        let relation = theory.relation(alice_obs, bob_obs);

        let (alice_bit, bob_bit) = match strategy {
            EveStrategy::Honest => rho_sample_pair(&theory, alice_obs, bob_obs, &mut rng),
            EveStrategy::PassiveDevice => {
                let assignment =
                    best_assignments[rng.gen_range(0..best_assignments.len())];
                (
                    (assignment >> alice_obs & 1) as u8,
                    (assignment >> bob_obs & 1) as u8,
                )
            }
            EveStrategy::ActiveMemoryDevice => {
                // Arbitrary output for Alice; the memory answers Bob with
                // whatever keeps the advertised correlations intact.
                let a = rng.gen_range(0..2u8);
                let b = match relation {
                    PairRelation::Identical => a,
                    PairRelation::Adjacent => 1 - a,
                    PairRelation::Other => rng.gen_range(0..2u8),
                };
                (a, b)
            }
            EveStrategy::InterceptResend { .. } => unreachable!("rejected above"),
        };

        let sifted = relation != PairRelation::Other;
        let mut round = Round {
            alice_basis: label(alice_obs),
            alice_bit,
            eve_attacked: !matches!(strategy, EveStrategy::Honest),
            eve_basis: None,
            bob_basis: label(bob_obs),
            bob_bit,
            sifted,
            used_for_check: false,
        };
        if sifted && rng.gen::<f64>() < check_fraction {
            round.used_for_check = true;
            checked += 1;
            let failed = match relation {
                PairRelation::Identical => alice_bit != bob_bit,
                PairRelation::Adjacent => alice_bit == bob_bit,
                PairRelation::Other => unreachable!("unsifted rounds are never checked"),
            };
            if failed {
                errors += 1;
            }
        }
        rounds.push(round);
    }

    let sifted = rounds.iter().filter(|r| r.sifted).count();
    let eve_info_bits = match strategy {
        EveStrategy::Honest => 0.0,
        _ => sifted as f64,
    };
    let summary = summarize(&rounds, n, errors, checked, error_threshold, eve_info_bits);
    Ok(Transcript {
        params: ProtocolParams {
            protocol: ProtocolKind::KcbsLkd,
            n,
            strategy,
            check_fraction,
            error_threshold,
        },
        seed,
        rounds,
        summary,
    })
}

/// Probability that an intercept-resend attack on `m` checked systems
/// produces no observable error: `(3/4)^m`.
pub fn detection_escape_probability(m: u32) -> f64 {
    0.75f64.powi(m as i32)
}

/// Adversary information in bits per transmitted system, estimated from
/// the transcript. Intercept-resend counts the rounds where Eve's basis
/// matched Alice's (she then holds that bit exactly); device attacks hold
/// every sifted bit once the bases are announced.
pub fn eve_information(transcript: &Transcript, strategy: EveStrategy) -> Result<f64> {
    if transcript.params.strategy != strategy {
        return Err(Error::invalid(format!(
            "transcript was produced under {:?}, not {:?}",
            transcript.params.strategy, strategy
        )));
    }
    let n = transcript.params.n as f64;
    Ok(match strategy {
        EveStrategy::Honest => 0.0,
        EveStrategy::InterceptResend { .. } => {
            let known = transcript
                .rounds
                .iter()
                .filter(|r| r.eve_attacked && r.eve_basis == Some(r.alice_basis))
                .count();
            known as f64 / n
        }
        EveStrategy::PassiveDevice | EveStrategy::ActiveMemoryDevice => {
            transcript.sifted_count() as f64 / n
        }
    })
}
