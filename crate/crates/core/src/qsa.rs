//! GHZ-based secure aggregation and teleportation broadcast.
//!
//! A participant's real value `w` becomes the phase `s·w` of an
//! `RZ(s·w) = diag(1, e^{i s w})` rotation on its GHZ leg, with
//! `s = π / (N·B·(1 + margin))` so the summed phase of `N` clipped values
//! stays inside `(−π, π)`. Half the shots of a parameter measure the decoded
//! root qubit in the X basis and half in the Y basis; the sum is recovered
//! as `atan2(2·f_Y − 1, 2·f_X − 1) / s`.
//!
//! Channel noise is tracked as a Pauli frame per leg for the outbound and
//! return trip. [`decoded_phase`] turns a frame into the decode result
//! exactly: any X pattern other than none-or-all leaves an ancilla in `|1⟩`
//! and the shot is discarded, Z errors add `π`, and an all-legs X pattern
//! conjugates the phase.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{logical_error, ChannelMode, DepolarizingChannel, Pauli, PauliFrame, TransmissionLedger, Traffic};
use crate::error::{Error, Result};
use crate::model::SelectionMask;
use crate::rng::{substream, SimRng};

/// Real value → rotation angle mapping.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncodingScheme {
    pub bound: f64,
    pub n_participants: usize,
    pub margin: f64,
}

impl EncodingScheme {
    pub const DEFAULT_BOUND: f64 = 5.0;
    pub const DEFAULT_MARGIN: f64 = 0.05;

    pub fn new(bound: f64, n_participants: usize, margin: f64) -> Result<Self> {
        if !(bound > 0.0 && bound.is_finite()) {
            return Err(Error::config("bound", "must be positive and finite"));
        }
        if !(margin >= 0.0 && margin.is_finite()) {
            return Err(Error::config("margin", "must be non-negative"));
        }
        if n_participants == 0 {
            return Err(Error::TooFewParticipants(0));
        }
        Ok(Self {
            bound,
            n_participants,
            margin,
        })
    }

    pub fn with_defaults(n_participants: usize) -> Result<Self> {
        Self::new(Self::DEFAULT_BOUND, n_participants, Self::DEFAULT_MARGIN)
    }

    /// `π / (N·B·(1 + margin))`.
    pub fn scale(&self) -> f64 {
        PI / (self.n_participants as f64 * self.bound * (1.0 + self.margin))
    }

    /// Clamps to `[−B, B]`; the flag reports whether clipping happened.
    pub fn clip(&self, value: f64) -> (f64, bool) {
        let c = value.clamp(-self.bound, self.bound);
        (c, c != value)
    }
}

/// Shots per parameter, split evenly between X and Y basis measurements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotPlan {
    shots: usize,
}

impl ShotPlan {
    pub fn new(shots: usize) -> Result<Self> {
        if shots < 2 || !shots.is_multiple_of(2) {
            return Err(Error::ShotPlan(shots));
        }
        Ok(Self { shots })
    }

    pub fn shots(&self) -> usize {
        self.shots
    }

    pub fn per_basis(&self) -> usize {
        self.shots / 2
    }
}

/// How one GHZ leg reaches its participant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Leg {
    /// Held by the aggregating party: no traversal, no noise, not counted.
    Local,
    Remote {
        channel: DepolarizingChannel,
        mode: ChannelMode,
    },
}

impl Leg {
    pub fn remote(channel: DepolarizingChannel, mode: ChannelMode) -> Self {
        Leg::Remote { channel, mode }
    }

    fn traverse(&self, frame: &mut PauliFrame, q: usize, traffic: Traffic, ledger: &mut TransmissionLedger, rng: &mut SimRng) {
        if let Leg::Remote { channel, mode } = self {
            ledger.record(traffic, *mode, 1);
            frame.apply(q, logical_error(channel, *mode, rng));
        }
    }
}

/// Phase carried by the decoded root qubit, or `None` when the ancillas
/// flag an X error and the shot is discarded.
///
/// `angles[i]` is leg `i`'s encoding rotation; `out` and `back` are the
/// Pauli frames picked up before and after encoding.
pub fn decoded_phase(angles: &[f64], out: &PauliFrame, back: &PauliFrame) -> Option<f64> {
    let n = angles.len();
    let xo = out.x_bits();
    let xb = back.x_bits();
    let zb = back.z_bits();
    // Branch A starts at |0ⁿ⟩, branch B at |1ⁿ⟩. After the outbound X errors
    // A sits on xo and B on ¬xo; after the return trip A sits on xo ⊕ xb.
    let a0 = xo[0] ^ xb[0];
    if (1..n).any(|i| (xo[i] ^ xb[i]) != a0) {
        return None;
    }
    let zo_parity = out.z_bits().iter().filter(|z| **z).count() % 2;
    let mut alpha = 0.0;
    let mut beta = if zo_parity == 1 { PI } else { 0.0 };
    for i in 0..n {
        if xo[i] {
            alpha += angles[i];
            if zb[i] {
                alpha += PI;
            }
        } else {
            beta += angles[i];
            if zb[i] {
                beta += PI;
            }
        }
    }
    Some(if a0 { alpha - beta } else { beta - alpha })
}

/// Probability of reading `0` on the root qubit in the X and Y bases.
pub fn outcome_probabilities(phase: f64) -> (f64, f64) {
    ((1.0 + phase.cos()) / 2.0, (1.0 + phase.sin()) / 2.0)
}

/// Result of estimating one aggregated parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParameterEstimate {
    /// Estimated mean, `None` if every shot in one basis was discarded.
    pub mean: Option<f64>,
    pub clipped: u32,
    pub discarded: u64,
}

struct PhaseTally {
    zeros: [u64; 2],
    kept: [u64; 2],
}

impl PhaseTally {
    fn new() -> Self {
        Self { zeros: [0; 2], kept: [0; 2] }
    }

    fn record(&mut self, basis: usize, phase: f64, rng: &mut SimRng) {
        let (px, py) = outcome_probabilities(phase);
        let p0 = if basis == 0 { px } else { py };
        self.kept[basis] += 1;
        if rng.random::<f64>() < p0 {
            self.zeros[basis] += 1;
        }
    }

    fn angle(&self) -> Result<f64> {
        if self.kept[0] == 0 {
            return Err(Error::AggregationFailure { basis: "X" });
        }
        if self.kept[1] == 0 {
            return Err(Error::AggregationFailure { basis: "Y" });
        }
        let cos = 2.0 * self.zeros[0] as f64 / self.kept[0] as f64 - 1.0;
        let sin = 2.0 * self.zeros[1] as f64 / self.kept[1] as f64 - 1.0;
        Ok(sin.atan2(cos))
    }
}

/// Estimates the mean of one value per participant without revealing the
/// individual values.
pub fn aggregate_parameter(
    values: &[f64],
    scheme: &EncodingScheme,
    plan: &ShotPlan,
    legs: &[Leg],
    ledger: &mut TransmissionLedger,
    rng: &mut SimRng,
) -> Result<ParameterEstimate> {
    let n = values.len();
    if n < 2 {
        return Err(Error::TooFewParticipants(n));
    }
    if legs.len() != n || scheme.n_participants != n {
        return Err(Error::DimensionMismatch {
            what: "aggregation legs",
            expected: n,
            got: if legs.len() != n { legs.len() } else { scheme.n_participants },
        });
    }
    let s = scheme.scale();
    let mut clipped = 0u32;
    let angles: Vec<f64> = values
        .iter()
        .map(|v| {
            let (c, hit) = scheme.clip(*v);
            clipped += u32::from(hit);
            s * c
        })
        .collect();

    let clean_phase: f64 = angles.iter().sum();
    let noiseless = legs.iter().all(|l| match l {
        Leg::Local => true,
        Leg::Remote { channel, .. } => channel.rate() == 0.0,
    });

    let mut tally = PhaseTally::new();
    let mut discarded = 0u64;
    let mut out = PauliFrame::new(n);
    let mut back = PauliFrame::new(n);
    for shot in 0..plan.shots() {
        let basis = usize::from(shot >= plan.per_basis());
        let phase = if noiseless {
            for (i, leg) in legs.iter().enumerate() {
                leg.traverse(&mut out, i, Traffic::QsaOut, ledger, rng);
                leg.traverse(&mut back, i, Traffic::QsaBack, ledger, rng);
            }
            Some(clean_phase)
        } else {
            out.clear();
            back.clear();
            for (i, leg) in legs.iter().enumerate() {
                leg.traverse(&mut out, i, Traffic::QsaOut, ledger, rng);
            }
            for (i, leg) in legs.iter().enumerate() {
                leg.traverse(&mut back, i, Traffic::QsaBack, ledger, rng);
            }
            decoded_phase(&angles, &out, &back)
        };
        match phase {
            Some(phase) => tally.record(basis, phase, rng),
            None => discarded += 1,
        }
    }
    ledger.discarded_shots += discarded;

    let mean = match tally.angle() {
        Ok(phi) => Some(phi / (s * n as f64)),
        Err(Error::AggregationFailure { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(ParameterEstimate {
        mean,
        clipped,
        discarded,
    })
}

/// Phase seen by the receiver of a teleported `diag(1, e^{iφ})` qubit after
/// the resource picked up `err`: Z adds π, X conjugates, Y does both.
pub fn teleported_phase(phase: f64, err: Pauli) -> f64 {
    let p = if err.z_bit() { phase + PI } else { phase };
    if err.x_bit() {
        -p
    } else {
        p
    }
}

/// Sends one value to a receiver by teleportation and returns the
/// receiver's shot-based estimate. `scheme` must have one participant.
pub fn teleport_parameter(
    value: f64,
    scheme: &EncodingScheme,
    plan: &ShotPlan,
    leg: &Leg,
    ledger: &mut TransmissionLedger,
    rng: &mut SimRng,
) -> Result<ParameterEstimate> {
    teleport_with(value, scheme, plan, leg, ledger, rng, |_| None)
}

fn teleport_with<F>(
    value: f64,
    scheme: &EncodingScheme,
    plan: &ShotPlan,
    leg: &Leg,
    ledger: &mut TransmissionLedger,
    rng: &mut SimRng,
    mut forced: F,
) -> Result<ParameterEstimate>
where
    F: FnMut(usize) -> Option<Pauli>,
{
    if scheme.n_participants != 1 {
        return Err(Error::DimensionMismatch {
            what: "teleport encoding participants",
            expected: 1,
            got: scheme.n_participants,
        });
    }
    let s = scheme.scale();
    let (c, hit) = scheme.clip(value);
    let phase = s * c;
    let mut tally = PhaseTally::new();
    let mut frame = PauliFrame::new(1);
    for shot in 0..plan.shots() {
        let basis = usize::from(shot >= plan.per_basis());
        frame.clear();
        leg.traverse(&mut frame, 0, Traffic::Broadcast, ledger, rng);
        if let Some(p) = forced(shot) {
            frame.apply(0, p);
        }
        tally.record(basis, teleported_phase(phase, frame.get(0)), rng);
    }
    let mean = tally.angle().ok().map(|phi| phi / s);
    Ok(ParameterEstimate {
        mean,
        clipped: u32::from(hit),
        discarded: 0,
    })
}

/// Aggregated values for the masked indices of one round.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelAggregate {
    /// `(flat index, estimated mean)`, `None` marking a failed parameter.
    pub values: Vec<(usize, Option<f64>)>,
    pub clipped: u64,
    pub failures: u64,
    pub ledger: TransmissionLedger,
}

/// Runs [`aggregate_parameter`] for every masked index.
///
/// Parameter `i` draws from the substream `(seed, stream..., i)`, so results
/// do not depend on how rayon splits the work.
#[allow(clippy::too_many_arguments)]
pub fn aggregate_model(
    locals: &[&[f64]],
    masks: &[&SelectionMask],
    scheme: &EncodingScheme,
    plan: &ShotPlan,
    legs: &[Leg],
    seed: u64,
    stream: &[u64],
) -> Result<ModelAggregate> {
    let n = locals.len();
    if n < 2 {
        return Err(Error::TooFewParticipants(n));
    }
    if masks.len() != n {
        return Err(Error::MaskMismatch);
    }
    let mask = masks[0];
    if masks.iter().any(|m| *m != mask) {
        return Err(Error::MaskMismatch);
    }
    let p = mask.len();
    if let Some(bad) = locals.iter().find(|l| l.len() != p) {
        return Err(Error::DimensionMismatch {
            what: "client parameter vector",
            expected: p,
            got: bad.len(),
        });
    }

    let indices: Vec<usize> = mask.indices().collect();
    let results: Vec<Result<(usize, ParameterEstimate, TransmissionLedger)>> = indices
        .par_iter()
        .map(|&i| {
            let mut tags = stream.to_vec();
            tags.push(i as u64);
            let mut rng = substream(seed, &tags);
            let mut ledger = TransmissionLedger::default();
            let values: Vec<f64> = locals.iter().map(|l| l[i]).collect();
            let est = aggregate_parameter(&values, scheme, plan, legs, &mut ledger, &mut rng)?;
            Ok((i, est, ledger))
        })
        .collect();

    let mut out = ModelAggregate {
        values: Vec::with_capacity(indices.len()),
        clipped: 0,
        failures: 0,
        ledger: TransmissionLedger::default(),
    };
    for r in results {
        let (i, est, ledger) = r?;
        out.values.push((i, est.mean));
        out.clipped += u64::from(est.clipped);
        out.failures += u64::from(est.mean.is_none());
        out.ledger.merge(&ledger);
    }
    Ok(out)
}
