//! Feature datasets: CSV ingestion and the synthetic two-cluster generator.
//!
//! A feature file has one sample per line: `dim` comma-separated decimal
//! floats followed by an integer label `0` or `1`. A first line that does not
//! parse as numbers is treated as a header and skipped.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{substream, tag};

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    dim: usize,
    features: Vec<f64>,
    labels: Vec<u8>,
}

impl Dataset {
    pub fn new(dim: usize, features: Vec<f64>, labels: Vec<u8>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Empty("feature dimension"));
        }
        if features.len() != dim * labels.len() {
            return Err(Error::DimensionMismatch {
                what: "feature matrix",
                expected: dim * labels.len(),
                got: features.len(),
            });
        }
        if labels.iter().any(|l| *l > 1) {
            return Err(Error::config("labels", "must be 0 or 1"));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("features"));
        }
        Ok(Self { dim, features, labels })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn features(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    pub fn sample(&self, i: usize) -> (&[f64], u8) {
        (self.features(i), self.labels[i])
    }

    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let mut features = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            features.extend_from_slice(self.features(i));
        }
        Dataset {
            dim: self.dim,
            features,
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let ones = self.labels.iter().filter(|l| **l == 1).count();
        [self.len() - ones, ones]
    }

    /// CSV text with a `f0,...,f{dim-1},label` header.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for j in 0..self.dim {
            let _ = write!(out, "f{j},");
        }
        out.push_str("label\n");
        for i in 0..self.len() {
            for v in self.features(i) {
                let _ = write!(out, "{v},");
            }
            let _ = writeln!(out, "{}", self.labels[i]);
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn parse_csv(text: &str, dim: usize, path: &str) -> Result<Self> {
        let bad = |line: usize, reason: String| Error::FeatureFile {
            path: path.to_string(),
            line,
            reason,
        };
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if k == 0 && fields.iter().any(|f| f.parse::<f64>().is_err()) {
                continue;
            }
            if fields.len() != dim + 1 {
                return Err(bad(k + 1, format!("expected {} fields, got {}", dim + 1, fields.len())));
            }
            for f in &fields[..dim] {
                let v: f64 = f.parse().map_err(|_| bad(k + 1, format!("not a number: {f:?}")))?;
                if !v.is_finite() {
                    return Err(bad(k + 1, "non-finite feature".into()));
                }
                features.push(v);
            }
            let label = match fields[dim] {
                "0" => 0,
                "1" => 1,
                other => return Err(bad(k + 1, format!("label must be 0 or 1, got {other:?}"))),
            };
            labels.push(label);
        }
        Dataset::new(dim, features, labels)
    }

    pub fn read_csv(path: &Path, dim: usize) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::parse_csv(&text, dim, &path.display().to_string())
    }
}

/// Two isotropic Gaussian clusters at `±mean·u` for a seed-fixed unit `u`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SyntheticDatasetSpec {
    pub train: usize,
    pub val: usize,
    pub test: usize,
    pub dim: usize,
    pub mean: f64,
    pub sigma: f64,
    /// Fraction of label-1 samples in every split.
    pub balance: f64,
}

impl Default for SyntheticDatasetSpec {
    fn default() -> Self {
        Self {
            train: 600,
            val: 300,
            test: 300,
            dim: 512,
            mean: 1.0,
            sigma: 0.25,
            balance: 0.5,
        }
    }
}

impl SyntheticDatasetSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::config("data.sigma", "must be positive"));
        }
        if !self.mean.is_finite() {
            return Err(Error::config("data.mean", "must be finite"));
        }
        if !(0.0..=1.0).contains(&self.balance) {
            return Err(Error::config("data.balance", "must lie in [0, 1]"));
        }
        if self.dim == 0 {
            return Err(Error::config("data.dim", "must be positive"));
        }
        for (name, n) in [("data.train", self.train), ("data.val", self.val), ("data.test", self.test)] {
            if n == 0 {
                return Err(Error::config(name, "must be positive"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Splits {
    pub train: Dataset,
    pub val: Dataset,
    pub test: Dataset,
}

impl Splits {
    pub fn write_csvs(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        self.train.write_csv(&dir.join("train.csv"))?;
        self.val.write_csv(&dir.join("val.csv"))?;
        self.test.write_csv(&dir.join("test.csv"))?;
        Ok(())
    }
}

pub fn generate_synthetic(spec: &SyntheticDatasetSpec, seed: u64) -> Result<Splits> {
    spec.validate()?;
    let mut dir_rng = substream(seed, &[tag::SYNTHETIC, 0]);
    let mut u: Vec<f64> = (0..spec.dim).map(|_| dir_rng.sample(StandardNormal)).collect();
    let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    u.iter_mut().for_each(|v| *v /= norm);

    let split = |n: usize, k: u64| {
        let mut rng = substream(seed, &[tag::SYNTHETIC, k]);
        let ones = (spec.balance * n as f64).round() as usize;
        let mut labels: Vec<u8> = (0..n).map(|i| u8::from(i < ones)).collect();
        labels.shuffle(&mut rng);
        let mut features = Vec::with_capacity(n * spec.dim);
        for &l in &labels {
            let sign = if l == 1 { 1.0 } else { -1.0 };
            for uj in &u {
                let noise: f64 = rng.sample(StandardNormal);
                features.push(sign * spec.mean * uj + spec.sigma * noise);
            }
        }
        Dataset::new(spec.dim, features, labels)
    };
    Ok(Splits {
        train: split(spec.train, 1)?,
        val: split(spec.val, 2)?,
        test: split(spec.test, 3)?,
    })
}
