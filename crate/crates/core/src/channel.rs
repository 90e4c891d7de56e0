//! Quantum channel layer.
//!
//! Noise is a depolarizing channel `ρ → (1 − p)ρ + p·I/2` per qubit per
//! traversal. In Pauli form that is `I` with probability `1 − 3p/4` and each
//! of `X`, `Y`, `Z` with probability `p/4`; its average fidelity for pure
//! states is `1 − p/2`. Errors are tracked as a Pauli frame rather than on
//! amplitudes. Steane-mode traversals send seven physical qubits through
//! the channel, decode the [7,4] Hamming syndromes of the X and Z parts
//! independently and pass on only the residual logical Pauli.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevector::{Gate, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn x_bit(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    pub fn z_bit(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    /// Product up to phase.
    pub fn compose(self, other: Pauli) -> Pauli {
        Pauli::from_bits(self.x_bit() ^ other.x_bit(), self.z_bit() ^ other.z_bit())
    }

    /// The gate implementing this Pauli on qubit `q`, `None` for identity.
    pub fn gate(self, q: usize) -> Option<Gate<f64>> {
        match self {
            Pauli::I => None,
            Pauli::X => Some(Gate::X(q)),
            Pauli::Y => Some(Gate::Y(q)),
            Pauli::Z => Some(Gate::Z(q)),
        }
    }
}

/// Draws `I` with probability `1 − p_error` and each of `X`, `Y`, `Z` with
/// probability `p_error / 3`.
pub fn sample_pauli<R: Rng + ?Sized>(p_error: f64, rng: &mut R) -> Result<Pauli> {
    if !(0.0..=1.0).contains(&p_error) {
        return Err(Error::Probability(p_error));
    }
    Ok(draw_pauli(p_error, rng))
}

fn draw_pauli<R: Rng + ?Sized>(p_error: f64, rng: &mut R) -> Pauli {
    let u: f64 = rng.random();
    if u >= p_error {
        return Pauli::I;
    }
    let third = p_error / 3.0;
    if u < third {
        Pauli::X
    } else if u < 2.0 * third {
        Pauli::Y
    } else {
        Pauli::Z
    }
}

/// Single-qubit depolarizing channel with rate `p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepolarizingChannel {
    p: f64,
}

impl DepolarizingChannel {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return Err(Error::Probability(p));
        }
        Ok(Self { p })
    }

    pub fn noiseless() -> Self {
        Self { p: 0.0 }
    }

    pub fn rate(&self) -> f64 {
        self.p
    }

    /// Probability that a traversal applies a non-identity Pauli.
    pub fn pauli_error_probability(&self) -> f64 {
        0.75 * self.p
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Pauli {
        draw_pauli(self.pauli_error_probability(), rng)
    }

    /// `F = 1 − (1 − 1/d)·p` for a pure input state.
    pub fn average_fidelity(&self, dim: usize) -> f64 {
        1.0 - (1.0 - 1.0 / dim as f64) * self.p
    }
}

/// Monte Carlo estimate of the single-qubit average output fidelity over
/// Haar-random pure inputs. Returns `(mean, standard error)`.
pub fn estimate_average_fidelity<R: Rng + ?Sized>(
    channel: &DepolarizingChannel,
    trials: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    if trials < 2 {
        return Err(Error::Empty("fidelity trials"));
    }
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..trials {
        // Haar-random qubit: uniform point on the Bloch sphere.
        let cos_t: f64 = rng.random_range(-1.0..=1.0);
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let mut psi = StateVector::<f64>::zero(1)?;
        psi.apply(Gate::Ry(0, cos_t.acos()))?;
        psi.apply(Gate::Rz(0, phi))?;
        let f = match channel.sample(rng).gate(0) {
            None => 1.0,
            Some(g) => {
                let mut out = psi.clone();
                out.apply(g)?;
                psi.fidelity(&out)?
            }
        };
        sum += f;
        sum_sq += f * f;
    }
    let n = trials as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

/// Per-qubit X/Z error bits.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PauliFrame {
    x: Vec<bool>,
    z: Vec<bool>,
}

impl PauliFrame {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            x: vec![false; n_qubits],
            z: vec![false; n_qubits],
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x[q], self.z[q])
    }

    pub fn x_bits(&self) -> &[bool] {
        &self.x
    }

    pub fn z_bits(&self) -> &[bool] {
        &self.z
    }

    /// XORs `p` into qubit `q`.
    pub fn apply(&mut self, q: usize, p: Pauli) {
        self.x[q] ^= p.x_bit();
        self.z[q] ^= p.z_bit();
    }

    pub fn clear(&mut self) {
        self.x.fill(false);
        self.z.fill(false);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelMode {
    Raw,
    Steane,
}

impl ChannelMode {
    pub fn physical_per_logical(self) -> u64 {
        match self {
            ChannelMode::Raw => 1,
            ChannelMode::Steane => 7,
        }
    }
}

/// What a traversal carried.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Traffic {
    QsaOut,
    QsaBack,
    Broadcast,
}

/// Exact counts of qubit channel traversals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransmissionLedger {
    pub qsa_out: u64,
    pub qsa_back: u64,
    pub broadcast: u64,
    pub decoy: u64,
    /// Physical qubits sent: seven per logical traversal in Steane mode.
    pub physical_total: u64,
    pub discarded_shots: u64,
}

impl TransmissionLedger {
    pub fn record(&mut self, traffic: Traffic, mode: ChannelMode, count: u64) {
        match traffic {
            Traffic::QsaOut => self.qsa_out += count,
            Traffic::QsaBack => self.qsa_back += count,
            Traffic::Broadcast => self.broadcast += count,
        }
        self.physical_total += count * mode.physical_per_logical();
    }

    pub fn record_decoys(&mut self, count: u64) {
        self.decoy += count;
        self.physical_total += count;
    }

    /// Logical traversals carrying protocol data (decoys excluded).
    pub fn logical_total(&self) -> u64 {
        self.qsa_out + self.qsa_back + self.broadcast
    }

    pub fn merge(&mut self, other: &TransmissionLedger) {
        self.qsa_out += other.qsa_out;
        self.qsa_back += other.qsa_back;
        self.broadcast += other.broadcast;
        self.decoy += other.decoy;
        self.physical_total += other.physical_total;
        self.discarded_shots += other.discarded_shots;
    }
}

/// [7,4] Hamming check matrix: column `j` is the binary expansion of `j + 1`.
#[derive(Clone, Copy, Debug, Default)]
pub struct SteaneCode;

impl SteaneCode {
    pub const N: usize = 7;

    /// `H` as three 7-bit rows, bit `j` of row `r` is bit `r` of `j + 1`.
    pub fn parity_check() -> [[u8; 7]; 3] {
        let mut h = [[0u8; 7]; 3];
        for (r, row) in h.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (((j + 1) >> r) & 1) as u8;
            }
        }
        h
    }

    /// Syndrome of a 7-bit vector packed into the low bits of `v`.
    pub fn syndrome(v: u8) -> u8 {
        (0..7)
            .filter(|j| v & (1 << j) != 0)
            .fold(0u8, |s, j| s ^ (j as u8 + 1))
    }

    /// Weight-≤1 correction for a syndrome.
    pub fn correction(syndrome: u8) -> u8 {
        match syndrome {
            0 => 0,
            s => 1 << (s - 1),
        }
    }

    /// Decodes one classical component; `true` if a logical flip remains.
    ///
    /// The residual is a Hamming codeword. Codewords of odd weight are the
    /// ones outside the even-weight dual subcode, i.e. logical operators.
    pub fn decode_component(v: u8) -> bool {
        let residual = v ^ Self::correction(Self::syndrome(v));
        residual.count_ones() % 2 == 1
    }
}

/// Residual logical Pauli after syndrome correction of seven physical errors.
pub fn steane_correct(phys: &[Pauli; 7]) -> Pauli {
    let (mut xv, mut zv) = (0u8, 0u8);
    for (j, p) in phys.iter().enumerate() {
        if p.x_bit() {
            xv |= 1 << j;
        }
        if p.z_bit() {
            zv |= 1 << j;
        }
    }
    Pauli::from_bits(SteaneCode::decode_component(xv), SteaneCode::decode_component(zv))
}

/// Logical Pauli delivered by one traversal in `mode`, drawing physical
/// errors from `sample`.
pub fn traverse_with<F>(frame: &mut PauliFrame, qubit: usize, mode: ChannelMode, mut sample: F) -> Pauli
where
    F: FnMut() -> Pauli,
{
    let logical = match mode {
        ChannelMode::Raw => sample(),
        ChannelMode::Steane => {
            let mut phys = [Pauli::I; 7];
            for p in &mut phys {
                *p = sample();
            }
            steane_correct(&phys)
        }
    };
    frame.apply(qubit, logical);
    logical
}

/// Sends the qubit tracked at `frame[qubit]` once through `channel`.
pub fn traverse<R: Rng + ?Sized>(
    channel: &DepolarizingChannel,
    frame: &mut PauliFrame,
    qubit: usize,
    mode: ChannelMode,
    traffic: Traffic,
    ledger: &mut TransmissionLedger,
    rng: &mut R,
) -> Pauli {
    ledger.record(traffic, mode, 1);
    traverse_with(frame, qubit, mode, || channel.sample(rng))
}

/// Residual logical Pauli of one traversal without touching a frame.
pub(crate) fn logical_error<R: Rng + ?Sized>(channel: &DepolarizingChannel, mode: ChannelMode, rng: &mut R) -> Pauli {
    if channel.p == 0.0 {
        return Pauli::I;
    }
    match mode {
        ChannelMode::Raw => channel.sample(rng),
        ChannelMode::Steane => {
            let mut phys = [Pauli::I; 7];
            for p in &mut phys {
                *p = channel.sample(rng);
            }
            steane_correct(&phys)
        }
    }
}

/// Monte Carlo fraction of Steane-mode traversals leaving a logical error.
pub fn logical_error_rate<R: Rng + ?Sized>(channel: &DepolarizingChannel, trials: u64, rng: &mut R) -> Result<f64> {
    if trials < 10_000 {
        return Err(Error::config("trials", "logical error estimation needs at least 10^4 trials"));
    }
    let mut failures = 0u64;
    let mut frame = PauliFrame::new(1);
    for _ in 0..trials {
        frame.clear();
        if traverse_with(&mut frame, 0, ChannelMode::Steane, || channel.sample(rng)) != Pauli::I {
            failures += 1;
        }
    }
    Ok(failures as f64 / trials as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PrepBasis {
    Z,
    X,
}

/// Runs one decoy check with `d` decoys on a link with `channel` noise.
///
/// Each decoy is one of `|0⟩, |1⟩, |+⟩, |−⟩`. An active intercept-resend
/// adversary measures in a random Z/X basis and resends what it saw; the
/// receiver measures in the preparation basis. Returns `true` if any decoy
/// comes back wrong.
pub fn decoy_round<R: Rng + ?Sized>(
    d: u32,
    adversary_active: bool,
    channel: &DepolarizingChannel,
    ledger: &mut TransmissionLedger,
    rng: &mut R,
) -> bool {
    ledger.record_decoys(u64::from(d));
    let mut detected = false;
    for _ in 0..d {
        let prep = if rng.random::<bool>() { PrepBasis::X } else { PrepBasis::Z };
        let bit: bool = rng.random();
        let (mut basis, mut value) = (prep, bit);
        if adversary_active {
            let eve = if rng.random::<bool>() { PrepBasis::X } else { PrepBasis::Z };
            if eve != basis {
                basis = eve;
                value = rng.random();
            }
        }
        let err = channel.sample(rng);
        let flips = match basis {
            PrepBasis::Z => err.x_bit(),
            PrepBasis::X => err.z_bit(),
        };
        value ^= flips;
        let seen = if basis == prep { value } else { rng.random() };
        detected |= seen != bit;
    }
    detected
}

/// `1 − (3/4)^d`.
pub fn decoy_detection_probability(d: u32) -> f64 {
    1.0 - 0.75f64.powi(d as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    fn within_3_sigma(hits: u64, n: u64, p: f64) -> bool {
        let freq = hits as f64 / n as f64;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        (freq - p).abs() <= 3.0 * sigma + 1e-12
    }

    #[test]
    fn sample_pauli_extremes() {
        let mut rng = substream(1, &[]);
        assert!((0..1000).all(|_| sample_pauli(0.0, &mut rng).unwrap() == Pauli::I));
        let n = 100_000u64;
        let mut counts = [0u64; 4];
        for _ in 0..n {
            let p = sample_pauli(1.0, &mut rng).unwrap();
            counts[Pauli::ALL.iter().position(|q| *q == p).unwrap()] += 1;
        }
        assert_eq!(counts[0], 0);
        for c in &counts[1..] {
            assert!(within_3_sigma(*c, n, 1.0 / 3.0));
        }
        assert!(sample_pauli(1.5, &mut rng).is_err());
        assert!(sample_pauli(-0.1, &mut rng).is_err());
    }

    #[test]
    fn depolarizing_channel_pauli_weights() {
        let ch = DepolarizingChannel::new(0.4).unwrap();
        let mut rng = substream(2, &[]);
        let n = 100_000u64;
        let ident = (0..n).filter(|_| ch.sample(&mut rng) == Pauli::I).count() as u64;
        assert!(within_3_sigma(ident, n, 1.0 - 0.3));
        assert!(DepolarizingChannel::new(1.2).is_err());
        assert!(DepolarizingChannel::new(f64::NAN).is_err());
    }

    #[test]
    fn fidelity_formula_and_estimate() {
        let ch = DepolarizingChannel::new(1e-3).unwrap();
        assert!((ch.average_fidelity(2) - 0.9995).abs() < 1e-15);
        let strong = DepolarizingChannel::new(0.3).unwrap();
        let mut rng = substream(3, &[]);
        let (mean, se) = estimate_average_fidelity(&strong, 100_000, &mut rng).unwrap();
        assert!((mean - strong.average_fidelity(2)).abs() <= 3.0 * se, "{mean} ± {se}");
    }

    #[test]
    fn frame_algebra() {
        let mut f = PauliFrame::new(2);
        let mut ledger = TransmissionLedger::default();
        assert_eq!(traverse_with(&mut f, 1, ChannelMode::Raw, || Pauli::Z), Pauli::Z);
        assert!(f.z_bits()[1] && !f.x_bits()[1]);
        traverse_with(&mut f, 1, ChannelMode::Raw, || Pauli::Z);
        assert_eq!(f, PauliFrame::new(2));
        for p in Pauli::ALL {
            traverse_with(&mut f, 0, ChannelMode::Raw, || p);
            traverse_with(&mut f, 0, ChannelMode::Raw, || p);
            assert_eq!(f.get(0), Pauli::I);
        }
        assert_eq!(Pauli::X.compose(Pauli::Z), Pauli::Y);
        let noiseless = DepolarizingChannel::noiseless();
        let mut rng = substream(4, &[]);
        for mode in [ChannelMode::Raw, ChannelMode::Steane] {
            traverse(&noiseless, &mut f, 0, mode, Traffic::QsaOut, &mut ledger, &mut rng);
        }
        assert_eq!(f, PauliFrame::new(2));
        assert_eq!(ledger.qsa_out, 2);
        assert_eq!(ledger.physical_total, 8);
    }

    #[test]
    fn parity_check_columns_are_binary_indices() {
        let h = SteaneCode::parity_check();
        for j in 0..7 {
            let col = h[0][j] + 2 * h[1][j] + 4 * h[2][j];
            assert_eq!(col as usize, j + 1);
            assert_eq!(SteaneCode::syndrome(1 << j), j as u8 + 1);
        }
        assert_eq!(SteaneCode::correction(0), 0);
    }

    #[test]
    fn corrects_every_single_qubit_error() {
        assert_eq!(steane_correct(&[Pauli::I; 7]), Pauli::I);
        let mut cases = 0;
        for j in 0..7 {
            for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                let mut e = [Pauli::I; 7];
                e[j] = p;
                assert_eq!(steane_correct(&e), Pauli::I, "{p:?} on {j}");
                let mut f = PauliFrame::new(1);
                let mut draws = e.into_iter();
                traverse_with(&mut f, 0, ChannelMode::Steane, || draws.next().unwrap());
                assert_eq!(f.get(0), Pauli::I);
                cases += 1;
            }
        }
        assert_eq!(cases, 21);
    }

    #[test]
    fn weight_two_x_errors_flip_the_logical() {
        for a in 0..7 {
            for b in a + 1..7 {
                let v = (1u8 << a) | (1 << b);
                let s = SteaneCode::syndrome(v);
                assert_ne!(s, 0);
                let third = (s - 1) as usize;
                assert!(third != a && third != b);
                let r = v ^ SteaneCode::correction(s);
                assert_eq!(r.count_ones(), 3);
                assert_eq!(SteaneCode::syndrome(r), 0);
                let mut e = [Pauli::I; 7];
                e[a] = Pauli::X;
                e[b] = Pauli::X;
                assert_eq!(steane_correct(&e), Pauli::X);
            }
        }
    }

    #[test]
    fn logical_rate_edge_cases() {
        let mut rng = substream(5, &[]);
        assert_eq!(logical_error_rate(&DepolarizingChannel::noiseless(), 10_000, &mut rng).unwrap(), 0.0);
        assert!(logical_error_rate(&DepolarizingChannel::noiseless(), 10, &mut rng).is_err());
    }

    #[test]
    fn ledger_conservation() {
        let ch = DepolarizingChannel::new(0.01).unwrap();
        let mut rng = substream(6, &[]);
        let mut ledger = TransmissionLedger::default();
        let mut f = PauliFrame::new(1);
        let (mut raw, mut steane) = (0u64, 0u64);
        for i in 0..500 {
            let mode = if i % 3 == 0 { ChannelMode::Steane } else { ChannelMode::Raw };
            match mode {
                ChannelMode::Raw => raw += 1,
                ChannelMode::Steane => steane += 1,
            }
            traverse(&ch, &mut f, 0, mode, Traffic::Broadcast, &mut ledger, &mut rng);
        }
        decoy_round(9, false, &ch, &mut ledger, &mut rng);
        assert_eq!(ledger.physical_total, raw + 7 * steane + 9);
        assert_eq!(ledger.broadcast, 500);
        assert_eq!(ledger.decoy, 9);
    }

    #[test]
    fn decoys_never_fire_without_adversary_or_noise() {
        let mut rng = substream(7, &[]);
        let mut ledger = TransmissionLedger::default();
        let ch = DepolarizingChannel::noiseless();
        assert!((0..2000).all(|_| !decoy_round(8, false, &ch, &mut ledger, &mut rng)));
        assert!((0..2000).all(|_| !decoy_round(0, true, &ch, &mut ledger, &mut rng)));
    }

    #[test]
    fn decoy_detection_rate() {
        let ch = DepolarizingChannel::noiseless();
        for (d, seed) in [(1u32, 8u64), (4, 9)] {
            let mut rng = substream(seed, &[]);
            let mut ledger = TransmissionLedger::default();
            let n = 100_000u64;
            let hits = (0..n).filter(|_| decoy_round(d, true, &ch, &mut ledger, &mut rng)).count() as u64;
            assert!(within_3_sigma(hits, n, decoy_detection_probability(d)), "d={d}: {hits}");
        }
        assert!((decoy_detection_probability(4) - 175.0 / 256.0).abs() < 1e-15);
    }
}
