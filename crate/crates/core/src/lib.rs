//! Desk-scale quantum federated learning simulator.
//!
//! The numeric core (state vectors, the brickwork QNN, the hybrid model and
//! Adam) is generic over [`scalar::Real`]; the protocol, federation and
//! experiment layers run in `f64`.

pub mod channel;
pub mod data;
pub mod error;
pub mod experiment;
pub mod federation;
pub mod model;
pub mod qnn;
pub mod qsa;
pub mod rng;
pub mod scalar;
pub mod statevector;

pub use error::{Error, Result};

pub type StateVectorF64 = statevector::StateVector<f64>;
pub type StateVectorF32 = statevector::StateVector<f32>;
pub type GateF64 = statevector::Gate<f64>;
pub type QnnParamsF64 = qnn::QnnParams<f64>;
pub type ModelParamsF64 = model::ModelParams<f64>;
pub type ModelParamsF32 = model::ModelParams<f32>;
pub type AdamF64 = model::AdamState<f64>;
pub type AdamF32 = model::AdamState<f32>;
