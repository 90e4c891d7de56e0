//! Topology orchestration: centralized, decentralized and hybrid rounds,
//! non-IID partitioning, evaluation and the closed-form cost model.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::Gamma;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{decoy_round, ChannelMode, DepolarizingChannel, TransmissionLedger, Traffic};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::model::{bce, loss_and_grad, predict, AdamState, ModelParams, ModelShape, SelectionMask};
use crate::qsa::{aggregate_model, teleport_parameter, EncodingScheme, Leg, ShotPlan};
use crate::rng::{substream, tag, SimRng};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Topology {
    Centralized,
    Decentralized,
    Hybrid { tau: f64 },
}

impl Topology {
    pub fn name(&self) -> &'static str {
        match self {
            Topology::Centralized => "centralized",
            Topology::Decentralized => "decentralized",
            Topology::Hybrid { .. } => "hybrid",
        }
    }
}

/// Whether the formula cost counts the teleportation broadcast.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostConvention {
    /// `2NMP` per round for every topology.
    AggregationOnly,
    /// `3NMP` per centralized round, `2NMP` per decentralized round.
    #[default]
    WithBroadcast,
}

/// Closed-form quantum transmission count for `rounds` rounds, switching
/// after round `switch` for the hybrid topology.
pub fn cost_model(
    rounds: u64,
    switch: u64,
    n: u64,
    m: u64,
    p: u64,
    topology: &Topology,
    convention: CostConvention,
) -> Result<u128> {
    if switch > rounds {
        return Err(Error::SwitchRound { t: switch, rounds });
    }
    let nmp = u128::from(n) * u128::from(m) * u128::from(p);
    let (t, rounds) = (u128::from(switch), u128::from(rounds));
    let units = match (convention, topology) {
        (CostConvention::AggregationOnly, _) | (_, Topology::Decentralized) => 2 * rounds,
        (CostConvention::WithBroadcast, Topology::Centralized) => 3 * rounds,
        (CostConvention::WithBroadcast, Topology::Hybrid { .. }) => 3 * t + 2 * (rounds - t),
    };
    Ok(units * nmp)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PartitionSpec {
    Dirichlet { alpha: f64 },
    /// `[label-0 count, label-1 count]` per client.
    Explicit { counts: Vec<[usize; 2]> },
}

/// Per-client sample indices into the training set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub clients: Vec<Vec<usize>>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.clients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clients.is_empty()
    }
}

const DIRICHLET_ATTEMPTS: usize = 100;

pub fn partition_noniid<R: Rng + ?Sized>(
    labels: &[u8],
    n_clients: usize,
    spec: &PartitionSpec,
    rng: &mut R,
) -> Result<Partition> {
    if n_clients == 0 || labels.len() < n_clients {
        return Err(Error::InfeasiblePartition(format!(
            "{} samples cannot cover {n_clients} clients",
            labels.len()
        )));
    }
    let mut by_class: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (i, l) in labels.iter().enumerate() {
        by_class[usize::from(*l == 1)].push(i);
    }
    by_class[0].shuffle(rng);
    by_class[1].shuffle(rng);

    let counts: Vec<[usize; 2]> = match spec {
        PartitionSpec::Explicit { counts } => {
            if counts.len() != n_clients {
                return Err(Error::InfeasiblePartition(format!(
                    "{} count rows for {n_clients} clients",
                    counts.len()
                )));
            }
            for c in 0..2 {
                let total: usize = counts.iter().map(|r| r[c]).sum();
                if total != by_class[c].len() {
                    return Err(Error::InfeasiblePartition(format!(
                        "label-{c} counts sum to {total}, data has {}",
                        by_class[c].len()
                    )));
                }
            }
            if counts.iter().any(|r| r[0] + r[1] == 0) {
                return Err(Error::InfeasiblePartition("a client would receive no samples".into()));
            }
            counts.clone()
        }
        PartitionSpec::Dirichlet { alpha } => {
            if !(*alpha > 0.0 && alpha.is_finite()) {
                return Err(Error::config("partition.alpha", "must be positive and finite"));
            }
            let gamma = Gamma::new(*alpha, 1.0).map_err(|e| Error::config("partition.alpha", e.to_string()))?;
            let mut found = None;
            for _ in 0..DIRICHLET_ATTEMPTS {
                let mut counts = vec![[0usize; 2]; n_clients];
                for c in 0..2 {
                    let draws: Vec<f64> = (0..n_clients).map(|_| rng.sample(gamma)).collect();
                    for (k, share) in apportion(by_class[c].len(), &draws).into_iter().enumerate() {
                        counts[k][c] = share;
                    }
                }
                if counts.iter().all(|r| r[0] + r[1] > 0) {
                    found = Some(counts);
                    break;
                }
            }
            found.ok_or_else(|| Error::InfeasiblePartition("Dirichlet draws kept leaving a client empty".into()))?
        }
    };

    let mut clients = vec![Vec::new(); n_clients];
    for c in 0..2 {
        let mut at = 0;
        for (k, row) in counts.iter().enumerate() {
            clients[k].extend_from_slice(&by_class[c][at..at + row[c]]);
            at += row[c];
        }
    }
    for client in &mut clients {
        client.sort_unstable();
    }
    Ok(Partition { clients })
}

/// Splits `total` proportionally to `weights` by largest remainder.
fn apportion(total: usize, weights: &[f64]) -> Vec<usize> {
    let sum: f64 = weights.iter().sum();
    let n = weights.len();
    let exact: Vec<f64> = if sum > 0.0 && sum.is_finite() {
        weights.iter().map(|w| w / sum * total as f64).collect()
    } else {
        vec![total as f64 / n as f64; n]
    };
    let mut shares: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).total_cmp(&(exact[a] - exact[a].floor())).then(a.cmp(&b)));
    let short = total - shares.iter().sum::<usize>();
    for &k in order.iter().take(short) {
        shares[k] += 1;
    }
    shares
}

/// Mean BCE and accuracy at the 0.5 threshold.
pub fn evaluate(params: &ModelParams<f64>, data: &Dataset) -> Result<(f64, f64)> {
    if data.is_empty() {
        return Err(Error::Empty("evaluation dataset"));
    }
    let mut loss = 0.0;
    let mut hits = 0usize;
    for i in 0..data.len() {
        let (x, label) = data.sample(i);
        let y = predict(params, x)?;
        loss += bce(y, label);
        hits += usize::from(u8::from(y >= 0.5) == label);
    }
    let n = data.len() as f64;
    Ok((loss / n, hits as f64 / n))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MaskStrategy {
    #[default]
    Full,
    RandomK {
        k: usize,
    },
    LightCone,
}

impl MaskStrategy {
    pub fn label(&self) -> String {
        match self {
            MaskStrategy::Full => "full".into(),
            MaskStrategy::RandomK { k } => format!("random_k{k}"),
            MaskStrategy::LightCone => "lightcone".into(),
        }
    }

    fn build(&self, reference: &ModelParams<f64>, seed: u64, round: u64) -> Result<SelectionMask> {
        let shape = reference.shape();
        match self {
            MaskStrategy::Full => Ok(SelectionMask::full(shape)),
            MaskStrategy::LightCone => Ok(SelectionMask::light_cone_for(reference)),
            MaskStrategy::RandomK { k } => {
                let mut rng = substream(seed, &[tag::MASK, round]);
                SelectionMask::random_k(shape, *k, &mut rng)
            }
        }
    }
}

/// Quantum-layer settings shared by every round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QsaSettings {
    pub bound: f64,
    pub margin: f64,
    pub shots: usize,
    pub noise: f64,
    pub mode: ChannelMode,
    /// Clients receive exact global values; broadcast traffic is still counted.
    pub perfect_broadcast: bool,
    /// Broadcast only the aggregated indices instead of the whole model.
    pub broadcast_mask_only: bool,
    pub decoys: u32,
    pub adversary: bool,
}

impl Default for QsaSettings {
    fn default() -> Self {
        Self {
            bound: EncodingScheme::DEFAULT_BOUND,
            margin: EncodingScheme::DEFAULT_MARGIN,
            shots: 64,
            noise: 0.0,
            mode: ChannelMode::Raw,
            perfect_broadcast: false,
            broadcast_mask_only: false,
            decoys: 0,
            adversary: false,
        }
    }
}

impl QsaSettings {
    fn channel(&self) -> Result<DepolarizingChannel> {
        DepolarizingChannel::new(self.noise)
    }

    fn remote(&self) -> Result<Leg> {
        Ok(Leg::remote(self.channel()?, self.mode))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainingSettings {
    pub batch_size: usize,
    pub learning_rate: f64,
    pub local_epochs: usize,
    /// θ initialised uniform in `±theta_init`.
    pub theta_init: f64,
    pub cost_convention: CostConvention,
}

impl Default for TrainingSettings {
    fn default() -> Self {
        Self {
            batch_size: 16,
            learning_rate: 1e-3,
            local_epochs: 1,
            theta_init: std::f64::consts::PI,
            cost_convention: CostConvention::WithBroadcast,
        }
    }
}

pub struct Client {
    pub params: ModelParams<f64>,
    pub adam: AdamState<f64>,
    pub data: Dataset,
}

impl Client {
    /// One pass over the local data in shuffled mini-batches; returns the
    /// mean batch loss.
    pub fn train_epoch(&mut self, batch_size: usize, rng: &mut SimRng) -> Result<f64> {
        if self.data.is_empty() {
            return Err(Error::Empty("client dataset"));
        }
        let mut order: Vec<usize> = (0..self.data.len()).collect();
        order.shuffle(rng);
        let mut total = 0.0;
        let mut batches = 0;
        for chunk in order.chunks(batch_size.max(1)) {
            let batch: Vec<(&[f64], u8)> = chunk.iter().map(|&i| self.data.sample(i)).collect();
            let (loss, grad) = loss_and_grad(&self.params, &batch)?;
            self.adam.step(self.params.flat_mut(), &grad, None)?;
            total += loss;
            batches += 1;
        }
        Ok(total / batches as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Central,
    Decentral,
}

impl Phase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Phase::Central => "central",
            Phase::Decentral => "decentral",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: u64,
    pub phase: Phase,
    /// Acting client in decentralized rounds.
    pub acting: Option<usize>,
    pub train_loss: f64,
    pub val_loss: f64,
    pub val_acc: f64,
    pub test_loss: f64,
    pub test_acc: f64,
    pub shots: usize,
    pub mask_size: usize,
    /// Traffic of this round alone.
    pub round_ledger: TransmissionLedger,
    /// Running totals after this round.
    pub ledger: TransmissionLedger,
    pub formula_cost: u128,
    pub cum_formula: u128,
    pub discarded_shots: u64,
    pub clips: u64,
    pub aggregation_failures: u64,
    pub decoy_alarms: u32,
    pub switch: bool,
}

/// Mutable state of one federated run.
pub struct Federation {
    pub clients: Vec<Client>,
    pub global: ModelParams<f64>,
    pub val: Dataset,
    pub test: Dataset,
    pub qsa: QsaSettings,
    pub training: TrainingSettings,
    pub mask: MaskStrategy,
    pub seed: u64,
    pub ledger: TransmissionLedger,
    acting: usize,
    round: u64,
    cum_formula: u128,
}

impl Federation {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        shape: ModelShape,
        client_data: Vec<Dataset>,
        val: Dataset,
        test: Dataset,
        qsa: QsaSettings,
        training: TrainingSettings,
        mask: MaskStrategy,
        seed: u64,
    ) -> Result<Self> {
        if client_data.len() < 2 {
            return Err(Error::TooFewParticipants(client_data.len()));
        }
        if client_data.iter().any(Dataset::is_empty) {
            return Err(Error::Empty("client dataset"));
        }
        ShotPlan::new(qsa.shots)?;
        EncodingScheme::new(qsa.bound, client_data.len(), qsa.margin)?;
        qsa.channel()?;
        if training.batch_size == 0 {
            return Err(Error::config("training.batch_size", "must be positive"));
        }
        if !(training.learning_rate > 0.0) {
            return Err(Error::config("training.learning_rate", "must be positive"));
        }
        if !(training.theta_init >= 0.0 && training.theta_init.is_finite()) {
            return Err(Error::config("training.theta_init", "must be non-negative and finite"));
        }
        for d in client_data.iter().chain([&val, &test]) {
            if d.dim() != shape.feature_dim {
                return Err(Error::DimensionMismatch {
                    what: "feature dimension",
                    expected: shape.feature_dim,
                    got: d.dim(),
                });
            }
        }
        let mut rng = substream(seed, &[tag::INIT]);
        let global = ModelParams::init_with_theta_range(shape, training.theta_init, &mut rng);
        let n_params = global.flat().len();
        let clients = client_data
            .into_iter()
            .map(|data| Client {
                params: global.clone(),
                adam: AdamState::with_hyper(n_params, training.learning_rate, 0.9, 0.999, 1e-8),
                data,
            })
            .collect();
        Ok(Self {
            clients,
            global,
            val,
            test,
            qsa,
            training,
            mask,
            seed,
            ledger: TransmissionLedger::default(),
            acting: 0,
            round: 0,
            cum_formula: 0,
        })
    }

    pub fn n_clients(&self) -> usize {
        self.clients.len()
    }

    pub fn acting(&self) -> usize {
        self.acting
    }

    pub fn rounds_done(&self) -> u64 {
        self.round
    }

    fn train_clients(&mut self, round: u64) -> Result<f64> {
        let seed = self.seed;
        let epochs = self.training.local_epochs;
        let batch = self.training.batch_size;
        let losses: Vec<Result<f64>> = self
            .clients
            .par_iter_mut()
            .enumerate()
            .map(|(c, client)| {
                let mut rng = substream(seed, &[tag::SHUFFLE, round, c as u64]);
                let mut last = 0.0;
                for _ in 0..epochs {
                    last = client.train_epoch(batch, &mut rng)?;
                }
                Ok(last)
            })
            .collect();
        let mut total = 0.0;
        for l in losses {
            total += l?;
        }
        Ok(total / self.clients.len() as f64)
    }

    fn run_decoys(&self, round: u64, remote_clients: &[usize], ledger: &mut TransmissionLedger) -> Result<u32> {
        if self.qsa.decoys == 0 {
            return Ok(0);
        }
        let channel = self.qsa.channel()?;
        let mut alarms = 0;
        for &c in remote_clients {
            let mut rng = substream(self.seed, &[tag::DECOY, round, c as u64]);
            alarms += u32::from(decoy_round(self.qsa.decoys, self.qsa.adversary, &channel, ledger, &mut rng));
        }
        Ok(alarms)
    }

    /// Aggregates `mask` over every client with the given legs.
    fn aggregate(&self, mask: &SelectionMask, legs: &[Leg], round: u64) -> Result<crate::qsa::ModelAggregate> {
        let n = self.clients.len();
        let scheme = EncodingScheme::new(self.qsa.bound, n, self.qsa.margin)?;
        let plan = ShotPlan::new(self.qsa.shots)?;
        let locals: Vec<&[f64]> = self.clients.iter().map(|c| c.params.flat()).collect();
        let masks = vec![mask; n];
        aggregate_model(&locals, &masks, &scheme, &plan, legs, self.seed, &[tag::AGGREGATE, round])
    }

    /// Teleports the selected global values to client `c`; returns clips.
    fn broadcast_to(&mut self, c: usize, indices: &[usize], round: u64, ledger: &mut TransmissionLedger) -> Result<u64> {
        let m = self.qsa.shots as u64;
        if self.qsa.perfect_broadcast {
            ledger.record(Traffic::Broadcast, self.qsa.mode, m * indices.len() as u64);
            let dst = self.clients[c].params.flat_mut();
            for &i in indices {
                dst[i] = self.global.flat()[i];
            }
            return Ok(0);
        }
        let scheme = EncodingScheme::new(self.qsa.bound, 1, self.qsa.margin)?;
        let plan = ShotPlan::new(self.qsa.shots)?;
        let leg = self.qsa.remote()?;
        let seed = self.seed;
        let global = self.global.flat();
        let received: Vec<Result<(usize, Option<f64>, u32, TransmissionLedger)>> = indices
            .par_iter()
            .map(|&i| {
                let mut rng = substream(seed, &[tag::BROADCAST, round, c as u64, i as u64]);
                let mut l = TransmissionLedger::default();
                let est = teleport_parameter(global[i], &scheme, &plan, &leg, &mut l, &mut rng)?;
                Ok((i, est.mean, est.clipped, l))
            })
            .collect();
        let mut clips = 0;
        let dst = self.clients[c].params.flat_mut();
        for r in received {
            let (i, value, clipped, l) = r?;
            ledger.merge(&l);
            clips += u64::from(clipped);
            if let Some(v) = value {
                dst[i] = v;
            }
        }
        Ok(clips)
    }

    fn finish(&mut self, mut rec: RoundRecord, model: Evaluated) -> RoundRecord {
        self.ledger.merge(&rec.round_ledger);
        self.cum_formula += rec.formula_cost;
        rec.val_loss = model.val.0;
        rec.val_acc = model.val.1;
        rec.test_loss = model.test.0;
        rec.test_acc = model.test.1;
        rec.ledger = self.ledger;
        rec.cum_formula = self.cum_formula;
        rec.discarded_shots = rec.round_ledger.discarded_shots;
        rec
    }

    fn blank_record(&self, round: u64, phase: Phase, mask_size: usize) -> RoundRecord {
        RoundRecord {
            round,
            phase,
            acting: None,
            train_loss: 0.0,
            val_loss: 0.0,
            val_acc: 0.0,
            test_loss: 0.0,
            test_acc: 0.0,
            shots: self.qsa.shots,
            mask_size,
            round_ledger: TransmissionLedger::default(),
            ledger: TransmissionLedger::default(),
            formula_cost: 0,
            cum_formula: 0,
            discarded_shots: 0,
            clips: 0,
            aggregation_failures: 0,
            decoy_alarms: 0,
            switch: false,
        }
    }

    fn evaluated(&self, params: &ModelParams<f64>) -> Result<Evaluated> {
        Ok(Evaluated {
            val: evaluate(params, &self.val)?,
            test: evaluate(params, &self.test)?,
        })
    }

    /// Local training, secure aggregation at the server, teleportation
    /// broadcast, evaluation of the global model.
    pub fn run_round_centralized(&mut self) -> Result<RoundRecord> {
        self.round += 1;
        let round = self.round;
        let n = self.clients.len();
        let mask = self.mask.build(&self.global, self.seed, round)?;
        let mut rec = self.blank_record(round, Phase::Central, mask.count());
        rec.train_loss = self.train_clients(round)?;

        let mut ledger = TransmissionLedger::default();
        let all: Vec<usize> = (0..n).collect();
        rec.decoy_alarms = self.run_decoys(round, &all, &mut ledger)?;
        let legs = vec![self.qsa.remote()?; n];
        let agg = self.aggregate(&mask, &legs, round)?;
        ledger.merge(&agg.ledger);
        rec.clips = agg.clipped;
        rec.aggregation_failures = agg.failures;
        let global = self.global.flat_mut();
        for (i, v) in &agg.values {
            if let Some(v) = v {
                global[*i] = *v;
            }
        }

        let targets: Vec<usize> = if self.qsa.broadcast_mask_only {
            mask.indices().collect()
        } else {
            (0..mask.len()).collect()
        };
        for c in 0..n {
            rec.clips += self.broadcast_to(c, &targets, round, &mut ledger)?;
        }

        let nm = (n * self.qsa.shots) as u128;
        rec.formula_cost = 2 * nm * mask.count() as u128;
        if self.training.cost_convention == CostConvention::WithBroadcast {
            rec.formula_cost += nm * targets.len() as u128;
        }
        rec.round_ledger = ledger;
        let eval = self.evaluated(&self.global)?;
        Ok(self.finish(rec, eval))
    }

    /// Local training, then the acting client aggregates everyone's values
    /// with its own leg held locally. No broadcast.
    pub fn run_round_decentralized(&mut self) -> Result<RoundRecord> {
        self.round += 1;
        let round = self.round;
        let n = self.clients.len();
        let acting = self.acting;
        let train_loss = self.train_clients(round)?;
        let mask = self.mask.build(&self.clients[acting].params, self.seed, round)?;
        let mut rec = self.blank_record(round, Phase::Decentral, mask.count());
        rec.train_loss = train_loss;
        rec.acting = Some(acting);

        let mut ledger = TransmissionLedger::default();
        let others: Vec<usize> = (0..n).filter(|c| *c != acting).collect();
        rec.decoy_alarms = self.run_decoys(round, &others, &mut ledger)?;
        let remote = self.qsa.remote()?;
        let legs: Vec<Leg> = (0..n).map(|c| if c == acting { Leg::Local } else { remote }).collect();
        let agg = self.aggregate(&mask, &legs, round)?;
        ledger.merge(&agg.ledger);
        rec.clips = agg.clipped;
        rec.aggregation_failures = agg.failures;
        let own = self.clients[acting].params.flat_mut();
        for (i, v) in &agg.values {
            if let Some(v) = v {
                own[*i] = *v;
            }
        }

        rec.formula_cost = 2 * (n * self.qsa.shots) as u128 * mask.count() as u128;
        rec.round_ledger = ledger;
        let eval = self.evaluated(&self.clients[acting].params)?;
        self.acting = (acting + 1) % n;
        Ok(self.finish(rec, eval))
    }

    /// Runs `rounds` rounds of `topology`. A hybrid run switches to
    /// decentralized rounds after the first centralized round whose global
    /// validation accuracy reaches `tau`.
    pub fn run(&mut self, topology: &Topology, rounds: u64) -> Result<Vec<RoundRecord>> {
        if let Topology::Hybrid { tau } = topology {
            if !(0.0..=1.0).contains(tau) {
                return Err(Error::config("tau", "must lie in [0, 1]"));
            }
        }
        let mut out = Vec::with_capacity(rounds as usize);
        let mut switched = false;
        for _ in 0..rounds {
            let rec = match topology {
                Topology::Centralized => self.run_round_centralized()?,
                Topology::Decentralized => self.run_round_decentralized()?,
                Topology::Hybrid { tau } => {
                    if switched {
                        self.run_round_decentralized()?
                    } else {
                        let mut rec = self.run_round_centralized()?;
                        if rec.val_acc >= *tau {
                            switched = true;
                            rec.switch = true;
                        }
                        rec
                    }
                }
            };
            out.push(rec);
        }
        Ok(out)
    }
}

struct Evaluated {
    val: (f64, f64),
    test: (f64, f64),
}

/// Round of the hybrid switch, or `rounds` if it never fired.
pub fn switch_round(records: &[RoundRecord]) -> Option<u64> {
    records.iter().find(|r| r.switch).map(|r| r.round)
}

/// First round whose validation accuracy reaches `threshold`.
pub fn rounds_to_threshold(records: &[RoundRecord], threshold: f64) -> Option<u64> {
    records.iter().find(|r| r.val_acc >= threshold).map(|r| r.round)
}
