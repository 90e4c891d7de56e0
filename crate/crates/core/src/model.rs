//! Hybrid classifier: linear adapter → QNN → softmax(λ)-weighted head.
//!
//! Parameters live in one flat vector laid out as
//! `[adapter_w (n_qubits × feature_dim, row-major) | adapter_b | λ | θ]`,
//! which is 3120 scalars at the default 512 → 6 qubits × 3 layers shape.

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::qnn::{self, light_cone, CircuitLayout};
use crate::scalar::Real;

/// Clamp applied to the predicted probability before the BCE loss.
pub const PROB_EPS: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelShape {
    pub feature_dim: usize,
    pub layout: CircuitLayout,
}

impl Default for ModelShape {
    fn default() -> Self {
        Self {
            feature_dim: 512,
            layout: CircuitLayout::default_brickwork(),
        }
    }
}

/// Which block of the flat vector an index belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamGroup {
    AdapterWeight,
    AdapterBias,
    Lambda,
    Theta,
}

impl ModelShape {
    pub fn n_qubits(&self) -> usize {
        self.layout.n_qubits()
    }

    pub fn adapter_len(&self) -> usize {
        self.n_qubits() * self.feature_dim
    }

    fn bias_offset(&self) -> usize {
        self.adapter_len()
    }

    fn lambda_offset(&self) -> usize {
        self.bias_offset() + self.n_qubits()
    }

    fn theta_offset(&self) -> usize {
        self.lambda_offset() + self.n_qubits()
    }

    pub fn n_params(&self) -> usize {
        self.theta_offset() + self.layout.n_params()
    }

    /// Maps a flat index to its block and position within the block.
    pub fn locate(&self, flat: usize) -> Result<(ParamGroup, usize)> {
        if flat >= self.n_params() {
            return Err(Error::IndexOutOfRange {
                what: "parameter",
                index: flat,
                limit: self.n_params(),
            });
        }
        Ok(if flat < self.bias_offset() {
            (ParamGroup::AdapterWeight, flat)
        } else if flat < self.lambda_offset() {
            (ParamGroup::AdapterBias, flat - self.bias_offset())
        } else if flat < self.theta_offset() {
            (ParamGroup::Lambda, flat - self.lambda_offset())
        } else {
            (ParamGroup::Theta, flat - self.theta_offset())
        })
    }

    /// Inverse of [`ModelShape::locate`].
    pub fn flat_index(&self, group: ParamGroup, pos: usize) -> Result<usize> {
        let (base, len) = match group {
            ParamGroup::AdapterWeight => (0, self.adapter_len()),
            ParamGroup::AdapterBias => (self.bias_offset(), self.n_qubits()),
            ParamGroup::Lambda => (self.lambda_offset(), self.n_qubits()),
            ParamGroup::Theta => (self.theta_offset(), self.layout.n_params()),
        };
        if pos >= len {
            return Err(Error::IndexOutOfRange {
                what: "parameter position",
                index: pos,
                limit: len,
            });
        }
        Ok(base + pos)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams<T> {
    shape: ModelShape,
    values: Vec<T>,
}

impl<T: Real> ModelParams<T> {
    pub fn zeros(shape: ModelShape) -> Self {
        let values = vec![T::zero(); shape.n_params()];
        Self { shape, values }
    }

    /// Adapter weights and bias uniform in `±1/√feature_dim`, λ zero, θ
    /// uniform in `[−π, π)`.
    pub fn init<R: Rng + ?Sized>(shape: ModelShape, rng: &mut R) -> Self {
        Self::init_with_theta_range(shape, std::f64::consts::PI, rng)
    }

    /// As [`ModelParams::init`] but with θ uniform in `[−range, range)`.
    pub fn init_with_theta_range<R: Rng + ?Sized>(shape: ModelShape, range: f64, rng: &mut R) -> Self {
        let mut p = Self::zeros(shape);
        let bound = 1.0 / (p.shape.feature_dim as f64).sqrt();
        let lambda_at = p.shape.lambda_offset();
        let theta_at = p.shape.theta_offset();
        for v in &mut p.values[..lambda_at] {
            *v = T::of(rng.random_range(-bound..bound));
        }
        for v in &mut p.values[theta_at..] {
            *v = T::of(rng.random_range(-range..range));
        }
        p
    }

    pub fn from_flat(shape: ModelShape, values: Vec<T>) -> Result<Self> {
        if values.len() != shape.n_params() {
            return Err(Error::DimensionMismatch {
                what: "flat parameter vector",
                expected: shape.n_params(),
                got: values.len(),
            });
        }
        Ok(Self { shape, values })
    }

    pub fn shape(&self) -> &ModelShape {
        &self.shape
    }

    pub fn flat(&self) -> &[T] {
        &self.values
    }

    pub fn flat_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_flat(self) -> Vec<T> {
        self.values
    }

    pub fn adapter_w(&self) -> &[T] {
        &self.values[..self.shape.adapter_len()]
    }

    pub fn adapter_b(&self) -> &[T] {
        &self.values[self.shape.bias_offset()..self.shape.lambda_offset()]
    }

    pub fn lambda(&self) -> &[T] {
        &self.values[self.shape.lambda_offset()..self.shape.theta_offset()]
    }

    pub fn lambda_mut(&mut self) -> &mut [T] {
        let (a, b) = (self.shape.lambda_offset(), self.shape.theta_offset());
        &mut self.values[a..b]
    }

    pub fn theta(&self) -> &[T] {
        &self.values[self.shape.theta_offset()..]
    }

    pub fn theta_mut(&mut self) -> &mut [T] {
        let a = self.shape.theta_offset();
        &mut self.values[a..]
    }

    /// Index of the largest λ component, lowest index on ties.
    pub fn dominant_qubit(&self) -> usize {
        let lambda = self.lambda();
        let mut best = 0;
        for (q, v) in lambda.iter().enumerate() {
            if *v > lambda[best] {
                best = q;
            }
        }
        best
    }

    fn adapter_forward(&self, features: &[T]) -> Vec<T> {
        let d = self.shape.feature_dim;
        let w = self.adapter_w();
        self.adapter_b()
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let row = &w[i * d..(i + 1) * d];
                row.iter().zip(features).fold(*b, |acc, (w, x)| acc + *w * *x)
            })
            .collect()
    }

    fn check_features(&self, features: &[T]) -> Result<()> {
        if features.len() != self.shape.feature_dim {
            return Err(Error::DimensionMismatch {
                what: "feature vector",
                expected: self.shape.feature_dim,
                got: features.len(),
            });
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("features"));
        }
        Ok(())
    }
}

/// Numerically stable softmax.
pub fn softmax<T: Real>(v: &[T]) -> Vec<T> {
    let max = v.iter().copied().fold(T::neg_infinity(), T::max);
    let exps: Vec<T> = v.iter().map(|x| (*x - max).exp()).collect();
    let total: T = exps.iter().copied().sum();
    exps.into_iter().map(|e| e / total).collect()
}

fn head<T: Real>(s: T) -> (T, bool) {
    let raw = (T::one() + s) * T::of(0.5);
    let lo = T::of(PROB_EPS);
    let hi = T::one() - lo;
    if raw < lo {
        (lo, true)
    } else if raw > hi {
        (hi, true)
    } else {
        (raw, false)
    }
}

/// Binary cross-entropy of a clamped probability.
pub fn bce<T: Real>(prob: T, label: u8) -> T {
    if label == 1 {
        -prob.ln()
    } else {
        -(T::one() - prob).ln()
    }
}

/// `ŷ = clamp((1 + softmax(λ)·QNN(W x + b)) / 2, 1e-7, 1 − 1e-7)`.
pub fn predict<T: Real>(params: &ModelParams<T>, features: &[T]) -> Result<T> {
    params.check_features(features)?;
    let z = params.adapter_forward(features);
    let e = qnn::forward(&params.shape.layout, &z, params.theta())?;
    let w = softmax(params.lambda());
    let s: T = w.iter().zip(&e).map(|(w, e)| *w * *e).sum();
    Ok(head(s).0)
}

/// Mean BCE over a batch.
pub fn loss<T: Real>(params: &ModelParams<T>, batch: &[(&[T], u8)]) -> Result<T> {
    if batch.is_empty() {
        return Err(Error::Empty("batch"));
    }
    let mut total = T::zero();
    for (x, y) in batch {
        total += bce(predict(params, x)?, *y);
    }
    Ok(total / T::of(batch.len() as f64))
}

/// Mean BCE and its gradient over every flat parameter.
///
/// Adapter, λ and head gradients are analytic; circuit angles and the
/// adapter outputs feeding the encoder use the parameter-shift Jacobian.
pub fn loss_and_grad<T: Real>(params: &ModelParams<T>, batch: &[(&[T], u8)]) -> Result<(T, Vec<T>)> {
    if batch.is_empty() {
        return Err(Error::Empty("batch"));
    }
    let shape = &params.shape;
    let nq = shape.n_qubits();
    let d = shape.feature_dim;
    let w = softmax(params.lambda());
    let mut grad = vec![T::zero(); shape.n_params()];
    let mut total = T::zero();

    for (x, label) in batch {
        params.check_features(x)?;
        let z = params.adapter_forward(x);
        let jac = qnn::jacobian(&shape.layout, &z, params.theta())?;
        let s: T = w.iter().zip(&jac.outputs).map(|(w, e)| *w * *e).sum();
        let (prob, clamped) = head(s);
        total += bce(prob, *label);
        if clamped {
            continue;
        }
        let y = T::of(f64::from(*label));
        let dl_dprob = -y / prob + (T::one() - y) / (T::one() - prob);
        let g_s = dl_dprob * T::of(0.5);
        let g_e: Vec<T> = w.iter().map(|w| g_s * *w).collect();

        let lambda_at = shape.lambda_offset();
        for k in 0..nq {
            grad[lambda_at + k] += g_s * w[k] * (jac.outputs[k] - s);
        }
        let theta_at = shape.theta_offset();
        for (j, row) in jac.d_theta.iter().enumerate() {
            grad[theta_at + j] += row.iter().zip(&g_e).map(|(a, b)| *a * *b).sum();
        }
        for i in 0..nq {
            let g_z: T = jac.d_features[i].iter().zip(&g_e).map(|(a, b)| *a * *b).sum();
            grad[shape.bias_offset() + i] += g_z;
            let row = &mut grad[i * d..(i + 1) * d];
            for (g, xv) in row.iter_mut().zip(x.iter()) {
                *g += g_z * *xv;
            }
        }
    }

    let n = T::of(batch.len() as f64);
    for g in &mut grad {
        *g /= n;
    }
    Ok((total / n, grad))
}

/// Which flat indices take part in aggregation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectionMask {
    included: Vec<bool>,
}

impl SelectionMask {
    pub fn full(shape: &ModelShape) -> Self {
        Self {
            included: vec![true; shape.n_params()],
        }
    }

    fn adapter_and_lambda(shape: &ModelShape) -> Self {
        let mut included = vec![false; shape.n_params()];
        for v in &mut included[..shape.theta_offset()] {
            *v = true;
        }
        Self { included }
    }

    /// Adapter, bias, λ and the light cone of `output_qubit`.
    pub fn light_cone(shape: &ModelShape, output_qubit: usize) -> Result<Self> {
        let mut m = Self::adapter_and_lambda(shape);
        let cone = light_cone(&shape.layout, output_qubit)?;
        for j in cone.param_indices {
            m.included[shape.theta_offset() + j] = true;
        }
        Ok(m)
    }

    /// Light-cone mask for the dominant λ component of `params`.
    pub fn light_cone_for<T: Real>(params: &ModelParams<T>) -> Self {
        Self::light_cone(params.shape(), params.dominant_qubit()).expect("dominant qubit is in range")
    }

    /// Adapter, bias, λ and `k` circuit angles drawn without replacement.
    pub fn random_k<R: Rng + ?Sized>(shape: &ModelShape, k: usize, rng: &mut R) -> Result<Self> {
        let n_theta = shape.layout.n_params();
        if k > n_theta {
            return Err(Error::IndexOutOfRange {
                what: "random-k count",
                index: k,
                limit: n_theta,
            });
        }
        let mut m = Self::adapter_and_lambda(shape);
        for j in index::sample(rng, n_theta, k) {
            m.included[shape.theta_offset() + j] = true;
        }
        Ok(m)
    }

    pub fn from_included(included: Vec<bool>) -> Self {
        Self { included }
    }

    pub fn len(&self) -> usize {
        self.included.len()
    }

    pub fn is_empty(&self) -> bool {
        self.included.is_empty()
    }

    pub fn includes(&self, flat: usize) -> bool {
        self.included.get(flat).copied().unwrap_or(false)
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.included
            .iter()
            .enumerate()
            .filter_map(|(i, on)| on.then_some(i))
    }

    /// Number of included indices.
    pub fn count(&self) -> usize {
        self.included.iter().filter(|v| **v).count()
    }

    pub fn is_superset_of(&self, other: &SelectionMask) -> bool {
        self.len() == other.len()
            && self.included.iter().zip(&other.included).all(|(a, b)| *a || !*b)
    }
}

/// Adam with bias correction.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState<T> {
    pub lr: T,
    pub beta1: T,
    pub beta2: T,
    pub eps: T,
    m: Vec<T>,
    v: Vec<T>,
    step: u64,
}

impl<T: Real> AdamState<T> {
    /// lr 0.001, β₁ 0.9, β₂ 0.999, ε 1e-8.
    pub fn new(n_params: usize) -> Self {
        Self::with_hyper(n_params, T::of(1e-3), T::of(0.9), T::of(0.999), T::of(1e-8))
    }

    pub fn with_hyper(n_params: usize, lr: T, beta1: T, beta2: T, eps: T) -> Self {
        Self {
            lr,
            beta1,
            beta2,
            eps,
            m: vec![T::zero(); n_params],
            v: vec![T::zero(); n_params],
            step: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn moments(&self) -> (&[T], &[T]) {
        (&self.m, &self.v)
    }

    /// One update. With a mask only the included coordinates move; local
    /// training passes `None`.
    pub fn step(&mut self, params: &mut [T], grad: &[T], mask: Option<&SelectionMask>) -> Result<()> {
        if params.len() != self.m.len() || grad.len() != self.m.len() {
            return Err(Error::DimensionMismatch {
                what: "Adam state",
                expected: self.m.len(),
                got: if params.len() != self.m.len() { params.len() } else { grad.len() },
            });
        }
        if let Some(mask) = mask {
            if mask.len() != self.m.len() {
                return Err(Error::DimensionMismatch {
                    what: "Adam mask",
                    expected: self.m.len(),
                    got: mask.len(),
                });
            }
        }
        self.step += 1;
        let t = self.step as i32;
        let one = T::one();
        let c1 = one - self.beta1.powi(t);
        let c2 = one - self.beta2.powi(t);
        for i in 0..params.len() {
            if mask.is_some_and(|m| !m.includes(i)) {
                continue;
            }
            let g = grad[i];
            self.m[i] = self.beta1 * self.m[i] + (one - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (one - self.beta2) * g * g;
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            params[i] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    fn random_params(seed: u64) -> ModelParams<f64> {
        let mut rng = substream(seed, &[]);
        let mut p = ModelParams::init(ModelShape::default(), &mut rng);
        for v in p.lambda_mut() {
            *v = rng.random_range(-1.0..1.0);
        }
        p
    }

    fn random_features(seed: u64, d: usize) -> Vec<f64> {
        let mut rng = substream(seed, &[]);
        (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    #[test]
    fn default_shape_has_3120_parameters() {
        let s = ModelShape::default();
        assert_eq!(s.n_params(), 3120);
        assert_eq!(s.adapter_len() + 6, 3078);
    }

    #[test]
    fn flat_index_round_trips() {
        let s = ModelShape::default();
        for flat in 0..s.n_params() {
            let (g, pos) = s.locate(flat).unwrap();
            assert_eq!(s.flat_index(g, pos).unwrap(), flat);
        }
        assert!(s.locate(3120).is_err());
        assert_eq!(s.locate(3078).unwrap(), (ParamGroup::Lambda, 0));
        assert_eq!(s.locate(3084).unwrap(), (ParamGroup::Theta, 0));
    }

    #[test]
    fn from_flat_checks_length() {
        assert!(ModelParams::<f64>::from_flat(ModelShape::default(), vec![0.0; 3119]).is_err());
        let p = random_params(1);
        let q = ModelParams::from_flat(p.shape().clone(), p.flat().to_vec()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn zero_theta_prediction_clamps_high() {
        let mut p = random_params(2);
        p.theta_mut().fill(0.0);
        // Zero adapter keeps every encoder angle at zero.
        let n = p.shape().adapter_len() + 6;
        p.flat_mut()[..n].fill(0.0);
        let x = random_features(3, 512);
        assert_eq!(predict(&p, &x).unwrap(), 1.0 - PROB_EPS);
    }

    #[test]
    fn dominant_lambda_selects_qubit_output() {
        let mut p = random_params(4);
        p.lambda_mut().copy_from_slice(&[10.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(softmax(p.lambda())[0] >= 0.999);
        let x = random_features(5, 512);
        let z = p.adapter_forward(&x);
        let e = qnn::forward(&p.shape().layout, &z, p.theta()).unwrap();
        let y = predict(&p, &x).unwrap();
        assert!((y - (1.0 + e[0]) / 2.0).abs() < 1e-3);
    }

    #[test]
    fn softmax_properties() {
        let v = [0.3, -1.0, 2.5, 0.0, 0.7, -0.2];
        let w = softmax(&v);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let mut p = random_params(6);
        let x = random_features(7, 512);
        let before = predict(&p, &x).unwrap();
        for l in p.lambda_mut() {
            *l += 3.7;
        }
        assert!((predict(&p, &x).unwrap() - before).abs() < 1e-10);
    }

    #[test]
    fn predictions_are_probabilities() {
        for seed in 0..10 {
            let p = random_params(100 + seed);
            let y = predict(&p, &random_features(200 + seed, 512)).unwrap();
            assert!(y > 0.0 && y < 1.0);
        }
    }

    #[test]
    fn predict_rejects_bad_features() {
        let p = random_params(8);
        assert!(predict(&p, &[0.0; 511]).is_err());
        let mut x = random_features(9, 512);
        x[3] = f64::INFINITY;
        assert!(predict(&p, &x).is_err());
    }

    #[test]
    fn perfect_prediction_loss_is_tiny() {
        let mut p = random_params(10);
        p.theta_mut().fill(0.0);
        let n = p.shape().adapter_len() + 6;
        p.flat_mut()[..n].fill(0.0);
        let x = random_features(11, 512);
        let (l, g) = loss_and_grad(&p, &[(&x[..], 1), (&x[..], 1)]).unwrap();
        assert!(l <= -(1.0 - PROB_EPS).ln() + 1e-15);
        assert!(g.iter().all(|v| *v == 0.0));
        assert!(loss_and_grad::<f64>(&p, &[]).is_err());
    }

    #[test]
    fn full_gradient_matches_finite_differences() {
        let mut p = random_params(12);
        // Keep the head away from the clamp.
        for v in p.theta_mut() {
            *v *= 0.5;
        }
        let x1 = random_features(13, 512);
        let x2 = random_features(14, 512);
        let batch: [(&[f64], u8); 2] = [(&x1, 1), (&x2, 0)];
        let (_, g) = loss_and_grad(&p, &batch).unwrap();
        let h = 1e-5;
        let mut worst: f64 = 0.0;
        for j in 0..p.shape().n_params() {
            let mut pp = p.clone();
            pp.flat_mut()[j] += h;
            let mut pm = p.clone();
            pm.flat_mut()[j] -= h;
            let fd = (loss(&pp, &batch).unwrap() - loss(&pm, &batch).unwrap()) / (2.0 * h);
            worst = worst.max((fd - g[j]).abs());
        }
        assert!(worst < 1e-4, "max deviation {worst}");
    }

    #[test]
    fn zero_softmax_weight_zeroes_exclusive_cone_gradients() {
        let mut p = random_params(15);
        // Weight only on qubit 0; qubit 5's exclusive cone params get no gradient.
        p.lambda_mut().copy_from_slice(&[0.0, -800.0, -800.0, -800.0, -800.0, -800.0]);
        let x = random_features(16, 512);
        let (_, g) = loss_and_grad(&p, &[(&x[..], 0)]).unwrap();
        let c0 = light_cone(&p.shape().layout, 0).unwrap();
        let theta_at = p.shape().theta_offset();
        let mut exclusive = 0;
        for j in 0..36 {
            if !c0.contains(j) {
                exclusive += 1;
                assert_eq!(g[theta_at + j], 0.0, "theta {j}");
            }
        }
        assert_eq!(exclusive, 18);
    }

    #[test]
    fn mask_sizes() {
        let s = ModelShape::default();
        assert_eq!(SelectionMask::full(&s).count(), 3120);
        assert_eq!(SelectionMask::light_cone(&s, 0).unwrap().count(), 3102);
        assert_eq!(SelectionMask::light_cone(&s, 2).unwrap().count(), 3108);
        let mut rng = substream(17, &[]);
        let r = SelectionMask::random_k(&s, 20, &mut rng).unwrap();
        assert_eq!(r.count(), 3104);
        let base = SelectionMask::adapter_and_lambda(&s);
        for q in 0..6 {
            let lc = SelectionMask::light_cone(&s, q).unwrap();
            assert!(SelectionMask::full(&s).is_superset_of(&lc));
            assert!(lc.is_superset_of(&base));
        }
        assert!(r.is_superset_of(&base));
        assert!(SelectionMask::random_k(&s, 37, &mut rng).is_err());
    }

    #[test]
    fn dominant_ties_break_low() {
        let mut p = ModelParams::<f64>::zeros(ModelShape::default());
        assert_eq!(p.dominant_qubit(), 0);
        p.lambda_mut().copy_from_slice(&[0.0, 1.0, 0.5, 1.0, 0.0, 0.0]);
        assert_eq!(p.dominant_qubit(), 1);
    }

    #[test]
    fn adam_zero_gradient_keeps_params() {
        let mut adam = AdamState::<f64>::new(4);
        let mut p = vec![0.5, -1.0, 2.0, 0.0];
        let before = p.clone();
        adam.step(&mut p, &[0.0; 4], None).unwrap();
        assert_eq!(p, before);
        assert_eq!(adam.step_count(), 1);
        // Moments decay once a gradient has been seen.
        adam.step(&mut p, &[1.0; 4], None).unwrap();
        let m1 = adam.moments().0[0];
        adam.step(&mut p, &[0.0; 4], None).unwrap();
        assert!((adam.moments().0[0] - 0.9 * m1).abs() < 1e-15);
    }

    #[test]
    fn adam_constant_gradient_moves_at_lr() {
        let mut adam = AdamState::<f64>::new(2);
        let mut p = vec![0.0, 0.0];
        let mut last = p.clone();
        for _ in 0..2000 {
            last.copy_from_slice(&p);
            adam.step(&mut p, &[0.3, -2.0], None).unwrap();
        }
        assert!(((last[0] - p[0]) - 1e-3).abs() < 1e-8);
        assert!(((last[1] - p[1]) + 1e-3).abs() < 1e-8);
    }

    #[test]
    fn adam_shape_and_mask() {
        let mut adam = AdamState::<f64>::new(3);
        assert!(adam.step(&mut [0.0; 2], &[0.0; 3], None).is_err());
        let mask = SelectionMask::from_included(vec![true, false, true]);
        let mut p = vec![0.0; 3];
        adam.step(&mut p, &[1.0; 3], Some(&mask)).unwrap();
        assert!(p[0] < 0.0 && p[1] == 0.0 && p[2] < 0.0);
    }

    #[test]
    fn adam_is_deterministic() {
        let run = || {
            let mut p = random_params(18);
            let mut adam = AdamState::new(p.shape().n_params());
            let x = random_features(19, 512);
            for _ in 0..3 {
                let (_, g) = loss_and_grad(&p, &[(&x[..], 1)]).unwrap();
                adam.step(p.flat_mut(), &g, None).unwrap();
            }
            p
        };
        assert_eq!(run().flat(), run().flat());
    }

    #[test]
    fn f32_model_runs() {
        let mut rng = substream(20, &[]);
        let p = ModelParams::<f32>::init(ModelShape::default(), &mut rng);
        let x = vec![0.1f32; 512];
        let (l, g) = loss_and_grad(&p, &[(&x[..], 1)]).unwrap();
        assert!(l.is_finite());
        assert_eq!(g.len(), 3120);
    }
}
