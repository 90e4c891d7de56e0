//! Dense pure-state simulator.
//!
//! Qubit ordering is little-endian: qubit `q` is bit `q` of the basis index,
//! so `|10⟩` written as (qubit 1, qubit 0) is index 2. Phase gates use the
//! convention `RZ(θ) = diag(1, e^{iθ})` everywhere in the crate; the
//! secure-aggregation angle arithmetic relies on it.

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest register the simulator builds unless a larger cap is requested.
pub const DEFAULT_QUBIT_CAP: usize = 12;

/// Measurement basis for a single qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    X,
    Y,
    Z,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate<T> {
    H(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Cnot { control: usize, target: usize },
    Cz(usize, usize),
    Rx(usize, T),
    Ry(usize, T),
    /// `diag(1, e^{iθ})`.
    Rz(usize, T),
}

impl<T: Real> Gate<T> {
    fn targets(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::H(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) => (q, None),
            Gate::Rx(q, _) | Gate::Ry(q, _) | Gate::Rz(q, _) => (q, None),
            Gate::Cnot { control, target } => (control, Some(target)),
            Gate::Cz(a, b) => (a, Some(b)),
        }
    }

    /// The gate undoing `self`.
    pub fn inverse(&self) -> Gate<T> {
        match *self {
            Gate::Rx(q, a) => Gate::Rx(q, -a),
            Gate::Ry(q, a) => Gate::Ry(q, -a),
            Gate::Rz(q, a) => Gate::Rz(q, -a),
            g => g,
        }
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        let (a, b) = self.targets();
        for q in std::iter::once(a).chain(b) {
            if q >= n_qubits {
                return Err(Error::IndexOutOfRange {
                    what: "qubit",
                    index: q,
                    limit: n_qubits,
                });
            }
        }
        if b == Some(a) {
            return Err(Error::InvalidGate(format!("repeated target qubit {a}")));
        }
        if let Gate::Rx(_, t) | Gate::Ry(_, t) | Gate::Rz(_, t) = *self {
            if !t.is_finite() {
                return Err(Error::InvalidGate("non-finite rotation angle".into()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    n_qubits: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// `|0…0⟩` on `n_qubits` qubits, capped at [`DEFAULT_QUBIT_CAP`].
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::zero_with_cap(n_qubits, DEFAULT_QUBIT_CAP)
    }

    pub fn zero_with_cap(n_qubits: usize, cap: usize) -> Result<Self> {
        if n_qubits > cap {
            return Err(Error::QubitCap { n: n_qubits, cap });
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << n_qubits];
        amps[0] = Complex::new(T::one(), T::zero());
        Ok(Self { n_qubits, amps })
    }

    /// Builds a state from explicit amplitudes, normalising them.
    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                what: "amplitude vector (power of two)",
                expected: len.next_power_of_two().max(1),
                got: len,
            });
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > DEFAULT_QUBIT_CAP {
            return Err(Error::QubitCap {
                n: n_qubits,
                cap: DEFAULT_QUBIT_CAP,
            });
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite("amplitudes"));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt();
        if norm == T::zero() {
            return Err(Error::Empty("state (zero norm)"));
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply(&mut self, gate: Gate<T>) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.apply_unchecked(gate);
        Ok(())
    }

    pub fn apply_all<I: IntoIterator<Item = Gate<T>>>(&mut self, gates: I) -> Result<()> {
        for g in gates {
            self.apply(g)?;
        }
        Ok(())
    }

    /// Applies a gate whose targets the caller has already validated.
    pub(crate) fn apply_unchecked(&mut self, gate: Gate<T>) {
        let zero = T::zero();
        let one = T::one();
        let c = |re: T, im: T| Complex::new(re, im);
        match gate {
            Gate::H(q) => {
                let r = T::FRAC_1_SQRT_2();
                self.single(q, |a, b| ((a + b).scale(r), (a - b).scale(r)));
            }
            Gate::X(q) => self.single(q, |a, b| (b, a)),
            Gate::Y(q) => {
                let i = c(zero, one);
                self.single(q, |a, b| (-i * b, i * a));
            }
            Gate::Z(q) => self.single(q, |a, b| (a, -b)),
            Gate::Rx(q, t) => {
                let half = t / T::of(2.0);
                let (s, co) = half.sin_cos();
                let mis = c(zero, -s);
                self.single(q, |a, b| (a.scale(co) + mis * b, mis * a + b.scale(co)));
            }
            Gate::Ry(q, t) => {
                let half = t / T::of(2.0);
                let (s, co) = half.sin_cos();
                self.single(q, |a, b| (a.scale(co) - b.scale(s), a.scale(s) + b.scale(co)));
            }
            Gate::Rz(q, t) => {
                let (s, co) = t.sin_cos();
                let phase = c(co, s);
                let mask = 1usize << q;
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    if i & mask != 0 {
                        *amp = *amp * phase;
                    }
                }
            }
            Gate::Cnot { control, target } => {
                let cm = 1usize << control;
                let tm = 1usize << target;
                for i in 0..self.amps.len() {
                    if i & cm != 0 && i & tm == 0 {
                        self.amps.swap(i, i | tm);
                    }
                }
            }
            Gate::Cz(a, b) => {
                let m = (1usize << a) | (1usize << b);
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    if i & m == m {
                        *amp = -*amp;
                    }
                }
            }
        }
    }

    fn single<F>(&mut self, q: usize, f: F)
    where
        F: Fn(Complex<T>, Complex<T>) -> (Complex<T>, Complex<T>),
    {
        let mask = 1usize << q;
        let dim = self.amps.len();
        let mut base = 0;
        while base < dim {
            for i in base..base + mask {
                let j = i | mask;
                let (a, b) = f(self.amps[i], self.amps[j]);
                self.amps[i] = a;
                self.amps[j] = b;
            }
            base += mask << 1;
        }
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::IndexOutOfRange {
                what: "qubit",
                index: q,
                limit: self.n_qubits,
            });
        }
        Ok(())
    }

    /// Born probabilities of every computational basis state.
    pub fn probabilities(&self) -> Vec<T> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `⟨Z_q⟩ = P(q = 0) − P(q = 1)`.
    pub fn expectation_z(&self, q: usize) -> Result<T> {
        self.check_qubit(q)?;
        Ok(self.expectation_z_unchecked(q))
    }

    pub(crate) fn expectation_z_unchecked(&self, q: usize) -> T {
        let mask = 1usize << q;
        let mut acc = T::zero();
        for (i, a) in self.amps.iter().enumerate() {
            if i & mask == 0 {
                acc += a.norm_sqr();
            } else {
                acc -= a.norm_sqr();
            }
        }
        acc
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                what: "state",
                expected: self.n_qubits,
                got: other.n_qubits,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
                acc + a.conj() * b
            }))
    }

    pub fn fidelity(&self, other: &Self) -> Result<T> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Rotates every qubit into its requested basis so that a computational
    /// measurement afterwards realises the basis measurement.
    pub fn rotate_to_bases(&mut self, bases: &[Basis]) -> Result<()> {
        if bases.len() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                what: "basis list",
                expected: self.n_qubits,
                got: bases.len(),
            });
        }
        for (q, b) in bases.iter().enumerate() {
            match b {
                Basis::Z => {}
                Basis::X => self.apply_unchecked(Gate::H(q)),
                Basis::Y => {
                    // S† then H maps the +i eigenstate of Y to |0⟩.
                    self.apply_unchecked(Gate::Rz(q, -T::FRAC_PI_2()));
                    self.apply_unchecked(Gate::H(q));
                }
            }
        }
        Ok(())
    }

    /// Outcome distribution of a per-qubit basis measurement.
    pub fn basis_probabilities(&self, bases: &[Basis]) -> Result<Vec<T>> {
        let mut rotated = self.clone();
        rotated.rotate_to_bases(bases)?;
        Ok(rotated.probabilities())
    }

    /// Samples one outcome; bit `q` of the result is qubit `q`'s result.
    pub fn measure<R: Rng + ?Sized>(&self, bases: &[Basis], rng: &mut R) -> Result<u64> {
        let probs = self.basis_probabilities(bases)?;
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (i, p) in probs.iter().enumerate() {
            acc += p.as_f64();
            if u < acc {
                return Ok(i as u64);
            }
        }
        // Rounding left a sliver above the cumulative sum.
        Ok(probs
            .iter()
            .rposition(|p| *p > T::zero())
            .unwrap_or(0) as u64)
    }
}

/// `(|0ⁿ⟩ + |1ⁿ⟩)/√2` via H on qubit 0 and a CNOT fan-out.
pub fn ghz_prepare<T: Real>(n: usize) -> Result<StateVector<T>> {
    if n < 2 {
        return Err(Error::InvalidGate(format!("GHZ state needs n >= 2, got {n}")));
    }
    let mut s = StateVector::zero(n)?;
    s.apply_unchecked(Gate::H(0));
    for k in 1..n {
        s.apply_unchecked(Gate::Cnot {
            control: 0,
            target: k,
        });
    }
    Ok(s)
}

/// CNOT fan-in from qubit 0. Leaves qubits `1..n` in `|0⟩` for an error-free
/// GHZ state and moves the relative phase onto qubit 0.
pub fn ghz_disentangle<T: Real>(state: &mut StateVector<T>) -> Result<()> {
    for k in 1..state.n_qubits() {
        state.apply(Gate::Cnot {
            control: 0,
            target: k,
        })?;
    }
    Ok(())
}

/// Inverse of [`ghz_prepare`]: fan-in then H on qubit 0.
pub fn ghz_decode<T: Real>(state: &mut StateVector<T>) -> Result<()> {
    ghz_disentangle(state)?;
    state.apply(Gate::H(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    type Sv = StateVector<f64>;

    fn close(a: Complex<f64>, re: f64, im: f64) -> bool {
        (a.re - re).abs() < 1e-12 && (a.im - im).abs() < 1e-12
    }

    #[test]
    fn hadamard_on_zero() {
        let mut s = Sv::zero(1).unwrap();
        s.apply(Gate::H(0)).unwrap();
        assert!(close(s.amplitudes()[0], FRAC_1_SQRT_2, 0.0));
        assert!(close(s.amplitudes()[1], FRAC_1_SQRT_2, 0.0));
    }

    #[test]
    fn rz_phases_the_one_amplitude() {
        let theta = 0.7;
        let mut s = Sv::zero(1).unwrap();
        s.apply(Gate::X(0)).unwrap();
        s.apply(Gate::Rz(0, theta)).unwrap();
        assert!(close(s.amplitudes()[0], 0.0, 0.0));
        assert!(close(s.amplitudes()[1], theta.cos(), theta.sin()));
    }

    #[test]
    fn cnot_basis_action() {
        // |10⟩ in (q1 q0) order with control q1 is index 2.
        let mut s = Sv::zero(2).unwrap();
        s.apply(Gate::X(1)).unwrap();
        s.apply(Gate::Cnot { control: 1, target: 0 }).unwrap();
        assert!(close(s.amplitudes()[3], 1.0, 0.0));
    }

    #[test]
    fn cap_and_index_errors() {
        assert!(matches!(Sv::zero(13), Err(Error::QubitCap { .. })));
        assert!(Sv::zero_with_cap(13, 13).is_ok());
        let mut s = Sv::zero(2).unwrap();
        assert!(matches!(s.apply(Gate::H(2)), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(s.apply(Gate::Cz(1, 1)), Err(Error::InvalidGate(_))));
        assert!(s.apply(Gate::Ry(0, f64::NAN)).is_err());
        assert!(s.expectation_z(5).is_err());
    }

    #[test]
    fn ghz_small_cases() {
        let s: Sv = ghz_prepare(2).unwrap();
        for (i, a) in s.amplitudes().iter().enumerate() {
            let want = if i == 0 || i == 3 { FRAC_1_SQRT_2 } else { 0.0 };
            assert!(close(*a, want, 0.0));
        }
        let s: Sv = ghz_prepare(3).unwrap();
        let nz: Vec<usize> = (0..8).filter(|&i| s.amplitudes()[i].norm() > 1e-15).collect();
        assert_eq!(nz, vec![0, 7]);
        assert!(ghz_prepare::<f64>(1).is_err());
        assert!(ghz_prepare::<f64>(13).is_err());
    }

    #[test]
    fn ghz_fidelity_with_ideal_is_one() {
        for n in 2..=DEFAULT_QUBIT_CAP {
            let s: Sv = ghz_prepare(n).unwrap();
            let mut ideal = vec![Complex::new(0.0, 0.0); 1 << n];
            ideal[0] = Complex::new(1.0, 0.0);
            ideal[(1 << n) - 1] = Complex::new(1.0, 0.0);
            let ideal = Sv::from_amplitudes(ideal).unwrap();
            assert!((s.fidelity(&ideal).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn decode_inverts_prepare() {
        for n in 2..=7 {
            let mut s: Sv = ghz_prepare(n).unwrap();
            ghz_decode(&mut s).unwrap();
            assert!(close(s.amplitudes()[0], 1.0, 0.0));
            assert!(s.amplitudes()[1..].iter().all(|a| a.norm() < 1e-12));
        }
    }

    #[test]
    fn decode_carries_phase_onto_qubit_zero() {
        let phi = 1.1;
        let mut s: Sv = ghz_prepare(4).unwrap();
        s.apply(Gate::Rz(2, phi)).unwrap();
        ghz_decode(&mut s).unwrap();
        let e = Complex::new(phi.cos(), phi.sin());
        let one = Complex::new(1.0, 0.0);
        let a0 = (one + e) / 2.0;
        let a1 = (one - e) / 2.0;
        assert!((s.amplitudes()[0] - a0).norm() < 1e-12);
        assert!((s.amplitudes()[1] - a1).norm() < 1e-12);
        assert!(s.amplitudes()[2..].iter().all(|a| a.norm() < 1e-12));
    }

    #[test]
    fn decode_flags_x_error_on_any_non_root_qubit() {
        let n = 4;
        for k in 1..n {
            let mut s: Sv = ghz_prepare(n).unwrap();
            s.apply(Gate::X(k)).unwrap();
            ghz_decode(&mut s).unwrap();
            let p_one: f64 = (1.0 - s.expectation_z(k).unwrap()) / 2.0;
            assert!((p_one - 1.0).abs() < 1e-12, "qubit {k}");
        }
    }

    #[test]
    fn decode_z_error_shifts_phase_by_pi() {
        let phi = 0.4;
        for k in 0..3 {
            let mut clean: Sv = ghz_prepare(3).unwrap();
            clean.apply(Gate::Rz(0, phi + PI)).unwrap();
            ghz_decode(&mut clean).unwrap();

            let mut hit: Sv = ghz_prepare(3).unwrap();
            hit.apply(Gate::Rz(0, phi)).unwrap();
            hit.apply(Gate::Z(k)).unwrap();
            ghz_decode(&mut hit).unwrap();
            assert!((clean.fidelity(&hit).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn z_expectations() {
        let s = Sv::zero(1).unwrap();
        assert_eq!(s.expectation_z(0).unwrap(), 1.0);
        let mut s = Sv::zero(1).unwrap();
        s.apply(Gate::H(0)).unwrap();
        assert!(s.expectation_z(0).unwrap().abs() < 1e-12);
        let mut s = Sv::zero(1).unwrap();
        s.apply(Gate::Ry(0, PI / 3.0)).unwrap();
        assert!((s.expectation_z(0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn f32_state_works() {
        let mut s: StateVector<f32> = ghz_prepare(3).unwrap();
        ghz_decode(&mut s).unwrap();
        assert!((s.amplitudes()[0].re - 1.0).abs() < 1e-6);
    }

    fn phased_plus(phi: f64) -> Sv {
        let mut s = Sv::zero(1).unwrap();
        s.apply(Gate::H(0)).unwrap();
        s.apply(Gate::Rz(0, phi)).unwrap();
        s
    }

    fn frequency_of_zero(s: &Sv, basis: Basis, shots: usize, seed: u64) -> f64 {
        let mut rng = substream(seed, &[]);
        let zeros = (0..shots)
            .filter(|_| s.measure(&[basis], &mut rng).unwrap() == 0)
            .count();
        zeros as f64 / shots as f64
    }

    fn within_3_sigma(freq: f64, p: f64, shots: usize) -> bool {
        let sigma = (p * (1.0 - p) / shots as f64).sqrt();
        (freq - p).abs() <= 3.0 * sigma + 1e-12
    }

    #[test]
    fn measure_zero_state_is_deterministic() {
        let s = Sv::zero(1).unwrap();
        assert_eq!(frequency_of_zero(&s, Basis::Z, 1000, 3), 1.0);
    }

    #[test]
    fn x_and_y_basis_frequencies_follow_born_rule() {
        let shots = 100_000;
        for (i, phi) in [0.3, 1.9, -2.4].into_iter().enumerate() {
            let s = phased_plus(phi);
            let px = (1.0 + phi.cos()) / 2.0;
            let py = (1.0 + phi.sin()) / 2.0;
            assert_eq!(s.basis_probabilities(&[Basis::X]).unwrap().len(), 2);
            assert!((s.basis_probabilities(&[Basis::X]).unwrap()[0] - px).abs() < 1e-12);
            assert!((s.basis_probabilities(&[Basis::Y]).unwrap()[0] - py).abs() < 1e-12);
            let fx = frequency_of_zero(&s, Basis::X, shots, 10 + i as u64);
            let fy = frequency_of_zero(&s, Basis::Y, shots, 20 + i as u64);
            assert!(within_3_sigma(fx, px, shots), "X basis phi={phi}: {fx} vs {px}");
            assert!(within_3_sigma(fy, py, shots), "Y basis phi={phi}: {fy} vs {py}");
        }
    }

    #[test]
    fn multi_qubit_sampling_matches_born_probabilities() {
        let mut s = Sv::zero(2).unwrap();
        s.apply(Gate::Ry(0, 1.0)).unwrap();
        s.apply(Gate::Ry(1, 2.2)).unwrap();
        s.apply(Gate::Cnot { control: 0, target: 1 }).unwrap();
        let probs = s.probabilities();
        let shots = 100_000;
        let mut counts = [0usize; 4];
        let mut rng = substream(99, &[]);
        for _ in 0..shots {
            counts[s.measure(&[Basis::Z, Basis::Z], &mut rng).unwrap() as usize] += 1;
        }
        for i in 0..4 {
            assert!(within_3_sigma(counts[i] as f64 / shots as f64, probs[i], shots));
        }
    }

    #[test]
    fn identical_seed_identical_outcomes() {
        let s = phased_plus(0.8);
        let a: Vec<u64> = {
            let mut r = substream(5, &[1]);
            (0..64).map(|_| s.measure(&[Basis::Y], &mut r).unwrap()).collect()
        };
        let b: Vec<u64> = {
            let mut r = substream(5, &[1]);
            (0..64).map(|_| s.measure(&[Basis::Y], &mut r).unwrap()).collect()
        };
        assert_eq!(a, b);
    }

    fn arb_gate(n: usize) -> impl Strategy<Value = Gate<f64>> {
        let q = 0..n;
        let angle = -7.0..7.0f64;
        prop_oneof![
            q.clone().prop_map(Gate::H),
            q.clone().prop_map(Gate::X),
            q.clone().prop_map(Gate::Y),
            q.clone().prop_map(Gate::Z),
            (q.clone(), angle.clone()).prop_map(|(q, a)| Gate::Rx(q, a)),
            (q.clone(), angle.clone()).prop_map(|(q, a)| Gate::Ry(q, a)),
            (q.clone(), angle).prop_map(|(q, a)| Gate::Rz(q, a)),
            (q.clone(), 1..n).prop_map(move |(a, d)| Gate::Cnot { control: a, target: (a + d) % n }),
            (q, 1..n).prop_map(move |(a, d)| Gate::Cz(a, (a + d) % n)),
        ]
    }

    proptest! {
        #[test]
        fn gates_preserve_norm_and_invert(gates in prop::collection::vec(arb_gate(4), 1..40)) {
            let mut s = Sv::zero(4).unwrap();
            s.apply(Gate::H(0)).unwrap();
            s.apply(Gate::Ry(2, 0.3)).unwrap();
            let start = s.clone();
            for g in &gates {
                s.apply(*g).unwrap();
                prop_assert!((1.0 - s.norm_sqr()).abs() < 1e-10);
            }
            for g in gates.iter().rev() {
                s.apply(g.inverse()).unwrap();
            }
            for (a, b) in s.amplitudes().iter().zip(start.amplitudes()) {
                prop_assert!((a - b).norm() < 1e-10);
            }
        }
    }
}
