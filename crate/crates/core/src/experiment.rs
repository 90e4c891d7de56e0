//! Experiment configuration, presets and the artifact-writing runner.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelMode, TransmissionLedger};
use crate::data::{generate_synthetic, Dataset, Splits, SyntheticDatasetSpec};
use crate::error::{Error, Result};
use crate::federation::{
    cost_model, partition_noniid, rounds_to_threshold, switch_round, CostConvention, Federation, MaskStrategy,
    PartitionSpec, QsaSettings, RoundRecord, Topology, TrainingSettings,
};
use crate::model::ModelShape;
use crate::qnn::CircuitLayout;
use crate::rng::{substream, tag};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Exp1,
    Exp2,
    Exp3,
    #[default]
    Custom,
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exp1" => Ok(Preset::Exp1),
            "exp2" => Ok(Preset::Exp2),
            "exp3" => Ok(Preset::Exp3),
            "custom" => Ok(Preset::Custom),
            other => Err(Error::config("preset", format!("unknown preset {other:?}"))),
        }
    }
}

pub const NOISE_GRID: [f64; 5] = [1e-4, 2.5e-4, 5e-4, 7.5e-4, 1e-3];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DataSource {
    Synthetic(SyntheticDatasetSpec),
    Files {
        train: PathBuf,
        val: PathBuf,
        test: PathBuf,
        #[serde(default = "default_dim")]
        dim: usize,
    },
}

fn default_dim() -> usize {
    512
}

/// One run within an experiment; unset fields inherit the base config.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArmConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topology: Option<Topology>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask: Option<MaskStrategy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ChannelMode>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub preset: Preset,
    pub seed: u64,
    pub rounds: u64,
    pub clients: usize,
    /// Rayon worker threads; 0 uses the rayon default.
    pub workers: usize,
    /// Validation accuracy used for the rounds-to-threshold metric.
    pub target_accuracy: f64,
    pub topology: Topology,
    pub mask: MaskStrategy,
    pub qsa: QsaSettings,
    pub training: TrainingSettings,
    pub partition: PartitionSpec,
    pub data: DataSource,
    pub arms: Vec<ArmConfig>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            preset: Preset::Custom,
            seed: 0,
            rounds: 30,
            clients: 3,
            workers: 0,
            target_accuracy: 0.9,
            topology: Topology::Centralized,
            mask: MaskStrategy::Full,
            // Desk-scale settings: at M = 64 the per-value estimation error
            // grows with the bound, and a wide margin keeps shot noise from
            // wrapping sums that sit near the bound.
            qsa: QsaSettings {
                bound: 0.25,
                margin: 0.5,
                ..QsaSettings::default()
            },
            training: TrainingSettings {
                theta_init: 0.25,
                ..TrainingSettings::default()
            },
            partition: PartitionSpec::Dirichlet { alpha: 0.3 },
            data: DataSource::Synthetic(SyntheticDatasetSpec {
                train: 900,
                mean: 0.5,
                sigma: 0.05,
                ..SyntheticDatasetSpec::default()
            }),
            arms: Vec::new(),
        }
    }
}

fn arm(name: &str) -> ArmConfig {
    ArmConfig {
        name: name.to_string(),
        ..Default::default()
    }
}

impl ExperimentConfig {
    pub fn preset(preset: Preset) -> Self {
        let mut cfg = Self {
            preset,
            ..Self::default()
        };
        match preset {
            Preset::Custom => {}
            Preset::Exp1 => {
                cfg.training.cost_convention = CostConvention::AggregationOnly;
                cfg.arms = vec![
                    ArmConfig {
                        mask: Some(MaskStrategy::Full),
                        ..arm("full")
                    },
                    ArmConfig {
                        mask: Some(MaskStrategy::RandomK { k: 20 }),
                        ..arm("random_k20")
                    },
                    ArmConfig {
                        mask: Some(MaskStrategy::LightCone),
                        ..arm("lightcone")
                    },
                ];
            }
            Preset::Exp2 => {
                cfg.arms = vec![
                    ArmConfig {
                        topology: Some(Topology::Centralized),
                        ..arm("centralized")
                    },
                    ArmConfig {
                        topology: Some(Topology::Decentralized),
                        ..arm("decentralized")
                    },
                    ArmConfig {
                        topology: Some(Topology::Hybrid { tau: 0.9 }),
                        ..arm("hybrid")
                    },
                ];
            }
            Preset::Exp3 => {
                let setups = [
                    ("central_full", Topology::Centralized, MaskStrategy::Full),
                    ("central_lightcone", Topology::Centralized, MaskStrategy::LightCone),
                    ("decentral", Topology::Decentralized, MaskStrategy::Full),
                ];
                let mut arms = vec![ArmConfig {
                    noise: Some(0.0),
                    ..arm("p0_central_full")
                }];
                let mut add = |p: f64, mode: ChannelMode| {
                    for (name, topology, mask) in setups {
                        let tag = match mode {
                            ChannelMode::Raw => "",
                            ChannelMode::Steane => "_steane",
                        };
                        arms.push(ArmConfig {
                            name: format!("p{p:e}{tag}_{name}"),
                            topology: Some(topology),
                            mask: Some(mask),
                            noise: Some(p),
                            mode: Some(mode),
                        });
                    }
                };
                for p in NOISE_GRID {
                    add(p, ChannelMode::Raw);
                }
                add(1e-3, ChannelMode::Steane);
                cfg.arms = arms;
            }
        }
        cfg
    }

    /// Arms to run; a config without arms runs its base settings once.
    pub fn resolved_arms(&self) -> Vec<ArmConfig> {
        if self.arms.is_empty() {
            vec![arm("run")]
        } else {
            self.arms.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.clients < 2 {
            return Err(Error::config("clients", "need at least 2 clients"));
        }
        if self.preset == Preset::Exp3 && self.clients != 3 {
            return Err(Error::config("clients", "exp3 uses 3 clients"));
        }
        if self.rounds == 0 {
            return Err(Error::config("rounds", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.target_accuracy) {
            return Err(Error::config("target_accuracy", "must lie in [0, 1]"));
        }
        if self.qsa.shots < 2 || !self.qsa.shots.is_multiple_of(2) {
            return Err(Error::config("qsa.shots", "must be even and at least 2"));
        }
        if !(self.qsa.bound > 0.0 && self.qsa.bound.is_finite()) {
            return Err(Error::config("qsa.bound", "must be positive and finite"));
        }
        if !(self.qsa.margin >= 0.0 && self.qsa.margin.is_finite()) {
            return Err(Error::config("qsa.margin", "must be non-negative"));
        }
        check_probability("qsa.noise", self.qsa.noise)?;
        if self.training.batch_size == 0 {
            return Err(Error::config("training.batch_size", "must be positive"));
        }
        if !(self.training.learning_rate > 0.0 && self.training.learning_rate.is_finite()) {
            return Err(Error::config("training.learning_rate", "must be positive"));
        }
        if self.training.local_epochs == 0 {
            return Err(Error::config("training.local_epochs", "must be positive"));
        }
        if !(self.training.theta_init >= 0.0 && self.training.theta_init.is_finite()) {
            return Err(Error::config("training.theta_init", "must be non-negative"));
        }
        check_topology("topology", &self.topology)?;
        match &self.partition {
            PartitionSpec::Dirichlet { alpha } if !(*alpha > 0.0 && alpha.is_finite()) => {
                return Err(Error::config("partition.alpha", "must be positive and finite"));
            }
            PartitionSpec::Explicit { counts } if counts.len() != self.clients => {
                return Err(Error::config("partition.counts", "need one row per client"));
            }
            _ => {}
        }
        match &self.data {
            DataSource::Synthetic(spec) => spec.validate()?,
            DataSource::Files { train, val, test, dim } => {
                for (field, path) in [("data.train", train), ("data.val", val), ("data.test", test)] {
                    if !path.is_file() {
                        return Err(Error::config(field, format!("{} does not exist", path.display())));
                    }
                }
                if *dim == 0 {
                    return Err(Error::config("data.dim", "must be positive"));
                }
            }
        }
        let arms = self.resolved_arms();
        let mut names = std::collections::BTreeSet::new();
        for (k, a) in arms.iter().enumerate() {
            let field = format!("arms[{k}]");
            if a.name.is_empty() || a.name.contains(['/', '\\']) || a.name == "." || a.name == ".." {
                return Err(Error::config(format!("{field}.name"), "must be a plain directory name"));
            }
            if !names.insert(a.name.as_str()) {
                return Err(Error::config(format!("{field}.name"), "duplicate arm name"));
            }
            if let Some(p) = a.noise {
                check_probability(&format!("{field}.noise"), p)?;
            }
            if let Some(t) = &a.topology {
                check_topology(&format!("{field}.topology"), t)?;
            }
        }
        Ok(())
    }
}

fn check_probability(field: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::config(field, "must lie in [0, 1]"));
    }
    Ok(())
}

fn check_topology(field: &str, t: &Topology) -> Result<()> {
    if let Topology::Hybrid { tau } = t {
        if !(0.0..=1.0).contains(tau) {
            return Err(Error::config(format!("{field}.tau"), "must lie in [0, 1]"));
        }
    }
    Ok(())
}

/// Builds a config from a preset, an optional TOML document layered on top,
/// and `key=value` overrides with dotted keys.
pub fn build_config(preset: Option<Preset>, toml_text: Option<&str>, overrides: &[String]) -> Result<ExperimentConfig> {
    let file: toml::Table = match toml_text {
        Some(text) => text.parse().map_err(|e: toml::de::Error| Error::config("config", e.to_string()))?,
        None => toml::Table::new(),
    };
    let preset = match (preset, file.get("preset")) {
        (Some(p), _) => p,
        (None, Some(toml::Value::String(s))) => s.parse()?,
        (None, Some(_)) => return Err(Error::config("preset", "must be a string")),
        (None, None) => Preset::Custom,
    };
    let base = toml::Table::try_from(ExperimentConfig::preset(preset)).map_err(|e| Error::config("config", e.to_string()))?;
    let mut merged = toml::Value::Table(base);
    merge(&mut merged, toml::Value::Table(file));
    for o in overrides {
        let (key, raw) = o
            .split_once('=')
            .ok_or_else(|| Error::config(o.clone(), "override must look like key=value"))?;
        set_path(&mut merged, key.trim(), parse_scalar(raw.trim()))?;
    }
    if let toml::Value::Table(t) = &mut merged {
        t.insert("preset".into(), toml::Value::try_from(preset).expect("preset serializes"));
    }
    let cfg: ExperimentConfig = merged.try_into().map_err(|e: toml::de::Error| Error::config("config", e.message().to_string()))?;
    Ok(cfg)
}

fn merge(base: &mut toml::Value, over: toml::Value) {
    match (base, over) {
        (toml::Value::Table(b), toml::Value::Table(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    // A different `kind` selects another enum variant, so its
                    // old fields must not leak into the new one.
                    Some(slot) if slot.is_table() && v.is_table() && same_kind(slot, &v) => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

fn same_kind(a: &toml::Value, b: &toml::Value) -> bool {
    match (a.get("kind"), b.get("kind")) {
        (Some(x), Some(y)) => x == y,
        _ => true,
    }
}

fn parse_scalar(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match doc.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(raw.into())),
        Err(_) => toml::Value::String(raw.into()),
    }
}

fn set_path(root: &mut toml::Value, key: &str, value: toml::Value) -> Result<()> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::config(key, "empty key segment"));
    }
    let mut at = root;
    for part in &parts[..parts.len() - 1] {
        let table = at
            .as_table_mut()
            .ok_or_else(|| Error::config(key, format!("{part} is not a table")))?;
        at = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    }
    let table = at
        .as_table_mut()
        .ok_or_else(|| Error::config(key, "parent is not a table"))?;
    table.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

pub fn load_data(cfg: &ExperimentConfig) -> Result<Splits> {
    match &cfg.data {
        DataSource::Synthetic(spec) => generate_synthetic(spec, cfg.seed),
        DataSource::Files { train, val, test, dim } => Ok(Splits {
            train: Dataset::read_csv(train, *dim)?,
            val: Dataset::read_csv(val, *dim)?,
            test: Dataset::read_csv(test, *dim)?,
        }),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmSummary {
    pub name: String,
    pub topology: Topology,
    pub mask: MaskStrategy,
    pub noise: f64,
    pub mode: ChannelMode,
    pub final_val_loss: f64,
    pub final_val_acc: f64,
    pub final_test_loss: f64,
    pub final_test_acc: f64,
    pub rounds_to_target: Option<u64>,
    pub switch_round: Option<u64>,
    /// Closed-form cost for the full model size, in transmissions.
    pub formula_cost: u128,
    /// Sum of per-round formula costs using the actual mask sizes.
    pub formula_cost_per_round_sum: u128,
    pub ledger: TransmissionLedger,
    pub clips: u64,
    pub aggregation_failures: u64,
    pub decoy_alarms: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArmOutcome {
    pub summary: ArmSummary,
    pub records: Vec<RoundRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub config: ExperimentConfig,
    pub arms: Vec<ArmSummary>,
}

pub const ROUNDS_HEADER: &str = "round,phase,val_loss,val_acc,test_loss,test_acc,shots,mask_size,cum_logical,cum_physical,cum_formula,discarded_shots,clips,switch";

pub fn rounds_csv(records: &[RoundRecord]) -> String {
    let mut out = String::from(ROUNDS_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.round,
            r.phase.as_str(),
            r.val_loss,
            r.val_acc,
            r.test_loss,
            r.test_acc,
            r.shots,
            r.mask_size,
            r.ledger.logical_total(),
            r.ledger.physical_total,
            r.cum_formula,
            r.discarded_shots,
            r.clips,
            u8::from(r.switch)
        );
    }
    out
}

/// Runs one arm on already loaded data.
pub fn run_arm(cfg: &ExperimentConfig, arm: &ArmConfig, splits: &Splits) -> Result<ArmOutcome> {
    let topology = arm.topology.unwrap_or(cfg.topology);
    let mask = arm.mask.unwrap_or(cfg.mask);
    let qsa = QsaSettings {
        noise: arm.noise.unwrap_or(cfg.qsa.noise),
        mode: arm.mode.unwrap_or(cfg.qsa.mode),
        ..cfg.qsa.clone()
    };
    let mut rng = substream(cfg.seed, &[tag::PARTITION]);
    let part = partition_noniid(splits.train.labels(), cfg.clients, &cfg.partition, &mut rng)?;
    let client_data = part.clients.iter().map(|ix| splits.train.subset(ix)).collect();
    let shape = ModelShape {
        feature_dim: splits.train.dim(),
        layout: CircuitLayout::default_brickwork(),
    };
    let n_params = shape.n_params() as u64;
    let mut fed = Federation::new(
        shape,
        client_data,
        splits.val.clone(),
        splits.test.clone(),
        qsa.clone(),
        cfg.training.clone(),
        mask,
        cfg.seed,
    )?;
    let records = fed.run(&topology, cfg.rounds)?;
    let last = records.last().ok_or(Error::Empty("round records"))?;
    let switched = switch_round(&records);
    let formula_cost = cost_model(
        cfg.rounds,
        switched.unwrap_or(cfg.rounds),
        cfg.clients as u64,
        qsa.shots as u64,
        n_params,
        &topology,
        cfg.training.cost_convention,
    )?;
    let summary = ArmSummary {
        name: arm.name.clone(),
        topology,
        mask,
        noise: qsa.noise,
        mode: qsa.mode,
        final_val_loss: last.val_loss,
        final_val_acc: last.val_acc,
        final_test_loss: last.test_loss,
        final_test_acc: last.test_acc,
        rounds_to_target: rounds_to_threshold(&records, cfg.target_accuracy),
        switch_round: switched,
        formula_cost,
        formula_cost_per_round_sum: last.cum_formula,
        ledger: last.ledger,
        clips: records.iter().map(|r| r.clips).sum(),
        aggregation_failures: records.iter().map(|r| r.aggregation_failures).sum(),
        decoy_alarms: records.iter().map(|r| u64::from(r.decoy_alarms)).sum(),
    };
    Ok(ArmOutcome { summary, records })
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ArmOutcome>> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::config("workers", e.to_string()))?;
    pool.install(|| {
        let splits = load_data(cfg)?;
        cfg.resolved_arms().iter().map(|a| run_arm(cfg, a, &splits)).collect()
    })
}

fn seeds_manifest(cfg: &ExperimentConfig) -> serde_json::Value {
    let tags: BTreeMap<&str, u64> = [
        ("init", tag::INIT),
        ("partition", tag::PARTITION),
        ("shuffle", tag::SHUFFLE),
        ("aggregate", tag::AGGREGATE),
        ("broadcast", tag::BROADCAST),
        ("mask", tag::MASK),
        ("decoy", tag::DECOY),
        ("synthetic", tag::SYNTHETIC),
    ]
    .into_iter()
    .collect();
    let arms: Vec<&str> = cfg.arms.iter().map(|a| a.name.as_str()).collect();
    serde_json::json!({
        "seed": cfg.seed,
        "rng": "ChaCha8 substreams keyed by splitmix64(seed, tags...)",
        "tags": tags,
        "streams": {
            "init": "[init]",
            "partition": "[partition]",
            "shuffle": "[shuffle, round, client]",
            "aggregate": "[aggregate, round, flat index]",
            "broadcast": "[broadcast, round, client, flat index]",
            "mask": "[mask, round]",
            "decoy": "[decoy, round, client]",
            "synthetic": "[synthetic, 0 = direction | 1 = train | 2 = val | 3 = test]",
        },
        "arms_share_seed": arms,
    })
}

/// Writes `rounds.csv` and `summary.json` per arm, plus a top-level
/// `summary.json` and `seeds.json`.
pub fn write_artifacts(out: &Path, cfg: &ExperimentConfig, outcomes: &[ArmOutcome]) -> Result<()> {
    fs::create_dir_all(out)?;
    for o in outcomes {
        let dir = out.join(&o.summary.name);
        fs::create_dir_all(&dir)?;
        fs::write(dir.join("rounds.csv"), rounds_csv(&o.records))?;
        fs::write(dir.join("summary.json"), to_json(&o.summary)?)?;
    }
    let summary = Summary {
        config: cfg.clone(),
        arms: outcomes.iter().map(|o| o.summary.clone()).collect(),
    };
    fs::write(out.join("summary.json"), to_json(&summary)?)?;
    fs::write(out.join("seeds.json"), to_json(&seeds_manifest(cfg))?)?;
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::config("output", e.to_string()))?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for p in [Preset::Exp1, Preset::Exp2, Preset::Exp3, Preset::Custom] {
            ExperimentConfig::preset(p).validate().unwrap();
        }
        let exp3 = ExperimentConfig::preset(Preset::Exp3);
        assert_eq!(exp3.arms.len(), 1 + 3 * 6);
        assert!(exp3.arms.iter().any(|a| a.mode == Some(ChannelMode::Steane) && a.noise == Some(1e-3)));
        let names: Vec<_> = ExperimentConfig::preset(Preset::Exp1).arms.into_iter().map(|a| a.name).collect();
        assert_eq!(names, ["full", "random_k20", "lightcone"]);
    }

    #[test]
    fn file_and_overrides_layer_over_preset() {
        let text = "preset = \"exp2\"\nseed = 4\n[qsa]\nshots = 8\n";
        let cfg = build_config(None, Some(text), &["qsa.noise=1e-3".into(), "arms=[]".into(), "topology.kind=\"decentralized\"".into()]).unwrap();
        assert_eq!(cfg.preset, Preset::Exp2);
        assert_eq!(cfg.seed, 4);
        assert_eq!(cfg.qsa.shots, 8);
        assert_eq!(cfg.qsa.noise, 1e-3);
        assert_eq!(cfg.qsa.bound, ExperimentConfig::default().qsa.bound);
        assert!(cfg.arms.is_empty());
        assert_eq!(cfg.topology, Topology::Decentralized);
        let cfg = build_config(Some(Preset::Exp1), Some(text), &["qsa.mode=steane".into()]).unwrap();
        assert_eq!(cfg.preset, Preset::Exp1);
        assert_eq!(cfg.qsa.mode, ChannelMode::Steane);
    }

    #[test]
    fn bad_fields_are_named() {
        let err = build_config(None, None, &["qsa.noise=2".into()]).unwrap().validate().unwrap_err();
        assert!(matches!(&err, Error::Config { field, .. } if field == "qsa.noise"), "{err}");
        let err = build_config(None, None, &["qsa.shots=3".into()]).unwrap().validate().unwrap_err();
        assert!(err.to_string().contains("qsa.shots"));
        let err = build_config(Some(Preset::Exp3), None, &["clients=5".into()]).unwrap().validate().unwrap_err();
        assert!(err.to_string().contains("clients"));
        assert!(build_config(None, None, &["nonsense=1".into()]).is_err());
        let cfg = build_config(
            None,
            Some("[data]\nkind = \"files\"\ntrain = \"/nope/train.csv\"\nval = \"v\"\ntest = \"t\"\n"),
            &[],
        )
        .unwrap();
        assert!(cfg.validate().unwrap_err().to_string().contains("data.train"));
    }

    #[test]
    fn config_json_round_trip() {
        for p in [Preset::Exp1, Preset::Exp2, Preset::Exp3] {
            let cfg = ExperimentConfig::preset(p);
            let json = serde_json::to_string(&cfg).unwrap();
            let back: ExperimentConfig = serde_json::from_str(&json).unwrap();
            assert_eq!(back, cfg);
        }
    }

    #[test]
    fn csv_layout() {
        assert_eq!(rounds_csv(&[]), format!("{ROUNDS_HEADER}\n"));
        assert_eq!(ROUNDS_HEADER.split(',').count(), 14);
    }
}
