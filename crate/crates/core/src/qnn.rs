//! Brickwork data re-uploading circuit.
//!
//! Each layer applies, on every qubit in order, the encoder `RY(x_q)`, the
//! trainable `RY(θ)` and the trainable `RZ(θ)`, then the layer's CZ
//! entanglers. The outputs are `⟨Z_q⟩` for every qubit.
//!
//! Parameter `θ` for (layer `l`, qubit `q`, rotation `r`) lives at flat
//! index `(l * n_qubits + q) * 2 + r`, with `r = 0` for RY and `r = 1` for RZ.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::statevector::{Gate, StateVector, DEFAULT_QUBIT_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rotation {
    Y = 0,
    Z = 1,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitLayout {
    n_qubits: usize,
    entanglers: Vec<Vec<(usize, usize)>>,
}

impl CircuitLayout {
    /// Layout with one entangler list per layer.
    pub fn new(n_qubits: usize, entanglers: Vec<Vec<(usize, usize)>>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > DEFAULT_QUBIT_CAP {
            return Err(Error::InvalidLayout(format!(
                "qubit count {n_qubits} outside 1..={DEFAULT_QUBIT_CAP}"
            )));
        }
        if entanglers.is_empty() {
            return Err(Error::InvalidLayout("at least one layer required".into()));
        }
        for (l, pairs) in entanglers.iter().enumerate() {
            let mut used = vec![false; n_qubits];
            for &(a, b) in pairs {
                if a >= n_qubits || b >= n_qubits || a == b {
                    return Err(Error::InvalidLayout(format!(
                        "layer {l}: bad pair ({a}, {b})"
                    )));
                }
                if used[a] || used[b] {
                    return Err(Error::InvalidLayout(format!(
                        "layer {l}: pairs are not disjoint"
                    )));
                }
                used[a] = true;
                used[b] = true;
            }
        }
        Ok(Self {
            n_qubits,
            entanglers,
        })
    }

    /// Alternating brickwork: layers 1, 3, … pair (0,1),(2,3),…; layers
    /// 2, 4, … pair (1,2),(3,4),….
    pub fn brickwork(n_qubits: usize, n_layers: usize) -> Result<Self> {
        let entanglers = (0..n_layers)
            .map(|l| {
                let start = l % 2;
                (start..n_qubits.saturating_sub(1))
                    .step_by(2)
                    .map(|a| (a, a + 1))
                    .collect()
            })
            .collect();
        Self::new(n_qubits, entanglers)
    }

    /// Six qubits, three layers.
    pub fn default_brickwork() -> Self {
        Self::brickwork(6, 3).expect("default layout is valid")
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_layers(&self) -> usize {
        self.entanglers.len()
    }

    pub fn entanglers(&self) -> &[Vec<(usize, usize)>] {
        &self.entanglers
    }

    pub fn n_params(&self) -> usize {
        self.n_qubits * self.n_layers() * 2
    }

    pub fn param_index(&self, layer: usize, qubit: usize, rotation: Rotation) -> usize {
        (layer * self.n_qubits + qubit) * 2 + rotation as usize
    }

    fn check_inputs<T: Real>(&self, features: &[T], theta: &[T]) -> Result<()> {
        if features.len() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                what: "QNN features",
                expected: self.n_qubits,
                got: features.len(),
            });
        }
        if theta.len() != self.n_params() {
            return Err(Error::DimensionMismatch {
                what: "QNN parameters",
                expected: self.n_params(),
                got: theta.len(),
            });
        }
        if features.iter().chain(theta).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("QNN inputs"));
        }
        Ok(())
    }
}

/// Trainable circuit angles in the flat layout described in the module docs.
#[derive(Clone, Debug, PartialEq)]
pub struct QnnParams<T>(pub Vec<T>);

impl<T: Real> QnnParams<T> {
    pub fn zeros(layout: &CircuitLayout) -> Self {
        Self(vec![T::zero(); layout.n_params()])
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Source {
    Feature(usize),
    Theta(usize),
    Fixed,
}

struct Op<T> {
    gate: Gate<T>,
    source: Source,
    layer: usize,
}

fn compile<T: Real>(layout: &CircuitLayout, features: &[T], theta: &[T]) -> Vec<Op<T>> {
    let n = layout.n_qubits;
    let mut ops = Vec::with_capacity(layout.n_layers() * (3 * n + n / 2));
    for (l, pairs) in layout.entanglers.iter().enumerate() {
        for q in 0..n {
            let jy = layout.param_index(l, q, Rotation::Y);
            let jz = layout.param_index(l, q, Rotation::Z);
            ops.push(Op { gate: Gate::Ry(q, features[q]), source: Source::Feature(q), layer: l });
            ops.push(Op { gate: Gate::Ry(q, theta[jy]), source: Source::Theta(jy), layer: l });
            ops.push(Op { gate: Gate::Rz(q, theta[jz]), source: Source::Theta(jz), layer: l });
        }
        for &(a, b) in pairs {
            ops.push(Op { gate: Gate::Cz(a, b), source: Source::Fixed, layer: l });
        }
    }
    ops
}

fn shifted<T: Real>(gate: Gate<T>, delta: T) -> Gate<T> {
    match gate {
        Gate::Ry(q, a) => Gate::Ry(q, a + delta),
        Gate::Rz(q, a) => Gate::Rz(q, a + delta),
        Gate::Rx(q, a) => Gate::Rx(q, a + delta),
        g => g,
    }
}

fn z_all<T: Real>(s: &StateVector<T>) -> Vec<T> {
    (0..s.n_qubits()).map(|q| s.expectation_z_unchecked(q)).collect()
}

fn run<T: Real>(mut state: StateVector<T>, ops: &[Op<T>]) -> StateVector<T> {
    for op in ops {
        state.apply_unchecked(op.gate);
    }
    state
}

/// Exact `⟨Z_q⟩` for every qubit.
pub fn forward<T: Real>(layout: &CircuitLayout, features: &[T], theta: &[T]) -> Result<Vec<T>> {
    layout.check_inputs(features, theta)?;
    let ops = compile(layout, features, theta);
    let state = run(StateVector::zero(layout.n_qubits)?, &ops);
    Ok(z_all(&state))
}

/// Outputs together with their derivatives with respect to every circuit
/// angle and every encoded feature.
#[derive(Clone, Debug)]
pub struct Jacobian<T> {
    pub outputs: Vec<T>,
    /// `d_theta[j][q] = ∂⟨Z_q⟩/∂θ_j`.
    pub d_theta: Vec<Vec<T>>,
    /// `d_features[i][q] = ∂⟨Z_q⟩/∂x_i`, summed over every re-upload of `x_i`.
    pub d_features: Vec<Vec<T>>,
}

/// Parameter-shift Jacobian.
///
/// Every rotation has generator eigenvalues `±1/2`, so the two-point rule
/// `[f(a + π/2) − f(a − π/2)] / 2` is exact. Entries for outputs whose light
/// cone excludes the parameter are exactly zero.
pub fn jacobian<T: Real>(layout: &CircuitLayout, features: &[T], theta: &[T]) -> Result<Jacobian<T>> {
    layout.check_inputs(features, theta)?;
    let n = layout.n_qubits;
    let reach = layer_reach(layout);
    let ops = compile(layout, features, theta);
    let shift = T::FRAC_PI_2();
    let half = T::of(0.5);

    let mut d_theta = vec![vec![T::zero(); n]; layout.n_params()];
    let mut d_features = vec![vec![T::zero(); n]; n];
    let mut prefix = StateVector::zero(n)?;

    for (k, op) in ops.iter().enumerate() {
        let target = match op.source {
            Source::Fixed => None,
            Source::Theta(j) => Some(&mut d_theta[j]),
            Source::Feature(i) => Some(&mut d_features[i]),
        };
        if let Some(target) = target {
            let qubit = match op.gate {
                Gate::Ry(q, _) | Gate::Rz(q, _) => q,
                _ => unreachable!("only rotations carry a source"),
            };
            let mut plus = prefix.clone();
            plus.apply_unchecked(shifted(op.gate, shift));
            let plus = run(plus, &ops[k + 1..]);
            let mut minus = prefix.clone();
            minus.apply_unchecked(shifted(op.gate, -shift));
            let minus = run(minus, &ops[k + 1..]);
            let reach_mask = reach[op.layer][qubit];
            for q in 0..n {
                if reach_mask & (1 << q) != 0 {
                    let g = (plus.expectation_z_unchecked(q) - minus.expectation_z_unchecked(q)) * half;
                    target[q] += g;
                }
            }
        }
        prefix.apply_unchecked(op.gate);
    }

    Ok(Jacobian {
        outputs: z_all(&prefix),
        d_theta,
        d_features,
    })
}

/// Gradient of `Σ_q w_q ⟨Z_q⟩` with respect to every circuit angle.
pub fn param_shift_grad<T: Real>(
    layout: &CircuitLayout,
    features: &[T],
    theta: &[T],
    output_weights: &[T],
) -> Result<Vec<T>> {
    if output_weights.len() != layout.n_qubits {
        return Err(Error::DimensionMismatch {
            what: "output weights",
            expected: layout.n_qubits,
            got: output_weights.len(),
        });
    }
    if output_weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::NonFinite("output weights"));
    }
    let jac = jacobian(layout, features, theta)?;
    Ok(jac
        .d_theta
        .iter()
        .map(|row| row.iter().zip(output_weights).map(|(g, w)| *g * *w).sum())
        .collect())
}

/// Circuit angles that can influence one measured qubit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LightCone {
    pub output_qubit: usize,
    /// Sorted flat indices into `θ`.
    pub param_indices: Vec<usize>,
}

impl LightCone {
    pub fn contains(&self, j: usize) -> bool {
        self.param_indices.binary_search(&j).is_ok()
    }

    pub fn len(&self) -> usize {
        self.param_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.param_indices.is_empty()
    }
}

/// Backward reachability from `output_qubit`.
///
/// Walking layers from last to first, the live set is first widened by every
/// entangler of that layer touching it, then the layer's rotations on the
/// widened set join the cone. Rotations sit before their layer's
/// entanglers, which is why widening comes first.
pub fn light_cone(layout: &CircuitLayout, output_qubit: usize) -> Result<LightCone> {
    if output_qubit >= layout.n_qubits {
        return Err(Error::IndexOutOfRange {
            what: "output qubit",
            index: output_qubit,
            limit: layout.n_qubits,
        });
    }
    let mut live = vec![false; layout.n_qubits];
    live[output_qubit] = true;
    let mut params = Vec::new();
    for (l, pairs) in layout.entanglers.iter().enumerate().rev() {
        // Pairs in a layer are disjoint, so one pass reaches the fixpoint.
        let before = live.clone();
        for &(a, b) in pairs {
            if before[a] || before[b] {
                live[a] = true;
                live[b] = true;
            }
        }
        for (q, _) in live.iter().enumerate().filter(|(_, on)| **on) {
            params.push(layout.param_index(l, q, Rotation::Y));
            params.push(layout.param_index(l, q, Rotation::Z));
        }
    }
    params.sort_unstable();
    Ok(LightCone {
        output_qubit,
        param_indices: params,
    })
}

/// `reach[l][q]`: bitmask of outputs whose cone holds layer `l`'s rotations
/// on qubit `q`.
fn layer_reach(layout: &CircuitLayout) -> Vec<Vec<u64>> {
    let mut reach = vec![vec![0u64; layout.n_qubits]; layout.n_layers()];
    for out in 0..layout.n_qubits {
        let cone = light_cone(layout, out).expect("output index in range");
        for &j in &cone.param_indices {
            let slot = j / 2;
            reach[slot / layout.n_qubits][slot % layout.n_qubits] |= 1 << out;
        }
    }
    reach
}
