//! The four-phase simulation loop: creation, recommendation, interaction,
//! update.
//!
//! Users are visited in ascending id order in every phase and every phase
//! draws from its own random stream, so the content created under a given
//! seed does not depend on the policy.

use std::io::{Read, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netgen::DirectedGraph;
use crate::policy::{
    compute_static_features, raw_scores_into, Candidate, EmaParams, InteractionUpdate, Policy, StandardizationMode,
    TieModel, TieStrengthParams,
};
use crate::population::{Population, Topic};
use crate::rng::{stream, Stream, StreamRng};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct EngineConfig<T> {
    pub steps: usize,
    pub p_create: f64,
    pub p_request: f64,
    pub policy: Policy,
    pub beta: TieStrengthParams<T>,
    pub alpha: EmaParams<T>,
    pub standardization: StandardizationMode,
    /// Recompute the running interaction-count sums exactly every this many
    /// steps; 0 disables.
    pub resync_every: usize,
    /// Record a per-class tie summary every this many steps; 0 disables.
    pub tie_summary_every: usize,
}

impl<T: Scalar> Default for EngineConfig<T> {
    fn default() -> Self {
        Self {
            steps: 10_000,
            p_create: 0.2,
            p_request: 0.8,
            policy: Policy::RealGraph,
            beta: TieStrengthParams::default(),
            alpha: EmaParams::default(),
            standardization: StandardizationMode::Incremental,
            resync_every: 1000,
            tie_summary_every: 0,
        }
    }
}

impl<T: Scalar> EngineConfig<T> {
    pub fn validate(&self) -> Result<()> {
        for (field, p) in [("engine.p_create", self.p_create), ("engine.p_request", self.p_request)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::config(field, format!("must lie in [0, 1], got {p}")));
            }
        }
        if self.steps > u32::MAX as usize {
            return Err(Error::config("engine.steps", "too many steps"));
        }
        self.beta.validate()?;
        self.alpha.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContentItem {
    pub content_id: u32,
    pub creator_id: u32,
    pub topic: Topic,
    /// The only step at which the item can be recommended.
    pub created_at: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecommendationEvent {
    pub step: u32,
    pub viewer_id: u32,
    pub content_id: u32,
    pub interacted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TieSummaryRow {
    pub t: u32,
    pub pair_class: PairClass,
    pub mean_int_count: f64,
    pub mean_tie_strength: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairClass {
    InGroup,
    CrossGroup,
}

/// Everything a run produced. Content ids equal their index in `content`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EventLog {
    pub seed: u64,
    pub steps: usize,
    pub content: Vec<ContentItem>,
    pub recs: Vec<RecommendationEvent>,
    /// Number of users who asked for a recommendation, per step.
    pub requests: Vec<u32>,
    pub tie_summaries: Vec<TieSummaryRow>,
}

impl EventLog {
    pub fn item(&self, content_id: u32) -> &ContentItem {
        &self.content[content_id as usize]
    }

    pub fn total_requests(&self) -> u64 {
        self.requests.iter().map(|&r| r as u64).sum()
    }

    pub fn total_interactions(&self) -> usize {
        self.recs.iter().filter(|r| r.interacted).count()
    }

    pub fn write_content_csv<W: Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv_writer(writer);
        w.write_record(["step", "content_id", "creator_id", "topic"])?;
        for c in &self.content {
            w.write_record([
                c.created_at.to_string(),
                c.content_id.to_string(),
                c.creator_id.to_string(),
                c.topic.as_str().to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_recs_csv<W: Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv_writer(writer);
        w.write_record(["step", "viewer_id", "content_id", "interacted"])?;
        for r in &self.recs {
            w.write_record([
                r.step.to_string(),
                r.viewer_id.to_string(),
                r.content_id.to_string(),
                u8::from(r.interacted).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_requests_csv<W: Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv_writer(writer);
        w.write_record(["step", "requests"])?;
        for (t, r) in self.requests.iter().enumerate() {
            w.write_record([t.to_string(), r.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_tie_summary_csv<W: Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv_writer(writer);
        w.write_record(["t", "pair_class", "mean_int_count", "mean_tie_strength"])?;
        for row in &self.tie_summaries {
            let class = match row.pair_class {
                PairClass::InGroup => "in_group",
                PairClass::CrossGroup => "cross_group",
            };
            w.write_record([
                row.t.to_string(),
                class.to_string(),
                row.mean_int_count.to_string(),
                row.mean_tie_strength.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_content_csv<R: Read>(reader: R) -> Result<Vec<ContentItem>> {
        let mut r = csv::Reader::from_reader(reader);
        let mut out = Vec::new();
        for (row, rec) in r.deserialize::<(u32, u32, u32, String)>().enumerate() {
            let (step, content_id, creator_id, topic) =
                rec.map_err(|e| Error::Integrity(format!("content row {row}: {e}")))?;
            let topic = Topic::parse(&topic).ok_or_else(|| Error::Integrity(format!("content row {row}: bad topic")))?;
            if content_id as usize != out.len() {
                return Err(Error::Integrity(format!("content row {row}: ids must be dense and ordered")));
            }
            out.push(ContentItem { content_id, creator_id, topic, created_at: step });
        }
        Ok(out)
    }

    pub fn read_recs_csv<R: Read>(reader: R) -> Result<Vec<RecommendationEvent>> {
        let mut r = csv::Reader::from_reader(reader);
        r.deserialize::<(u32, u32, u32, u8)>()
            .enumerate()
            .map(|(row, rec)| {
                let (step, viewer_id, content_id, interacted) =
                    rec.map_err(|e| Error::Integrity(format!("recs row {row}: {e}")))?;
                Ok(RecommendationEvent { step, viewer_id, content_id, interacted: interacted != 0 })
            })
            .collect()
    }

    pub fn read_requests_csv<R: Read>(reader: R) -> Result<Vec<u32>> {
        let mut r = csv::Reader::from_reader(reader);
        r.deserialize::<(u32, u32)>()
            .enumerate()
            .map(|(row, rec)| {
                rec.map(|(_, n)| n)
                    .map_err(|e| Error::Integrity(format!("requests row {row}: {e}")))
            })
            .collect()
    }

    /// Checks the structural invariants of a finished log.
    pub fn check_invariants(&self, graph: &DirectedGraph) -> Result<()> {
        let mut last_viewer_step: Vec<Option<u32>> = vec![None; graph.node_count()];
        let mut per_step = vec![0u32; self.steps];
        for (k, r) in self.recs.iter().enumerate() {
            if k > 0 && self.recs[k - 1].step > r.step {
                return Err(Error::Integrity("recommendations out of step order".into()));
            }
            let item = self
                .content
                .get(r.content_id as usize)
                .ok_or_else(|| Error::Integrity(format!("unknown content {}", r.content_id)))?;
            if item.created_at != r.step {
                return Err(Error::Integrity(format!("content {} served at step {} but created at {}", item.content_id, r.step, item.created_at)));
            }
            if !graph.has_edge(r.viewer_id as usize, item.creator_id as usize) {
                return Err(Error::Integrity(format!("viewer {} does not follow {}", r.viewer_id, item.creator_id)));
            }
            let slot = &mut last_viewer_step[r.viewer_id as usize];
            if *slot == Some(r.step) {
                return Err(Error::Integrity(format!("viewer {} served twice at step {}", r.viewer_id, r.step)));
            }
            *slot = Some(r.step);
            per_step[r.step as usize] += 1;
        }
        for (t, (&served, &asked)) in per_step.iter().zip(&self.requests).enumerate() {
            if served > asked {
                return Err(Error::Integrity(format!("step {t}: {served} recommendations for {asked} requests")));
            }
        }
        Ok(())
    }
}

fn csv_writer<W: Write>(writer: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(writer)
}

/// Draws an index with probability proportional to its weight.
pub fn sample_categorical<T: Scalar, R: Rng + ?Sized>(weights: &[T], rng: &mut R) -> Result<usize> {
    let mut total = 0.0;
    for w in weights {
        let w = w.as_f64();
        if !w.is_finite() || w < 0.0 {
            return Err(Error::Integrity(format!("invalid categorical weight {w}")));
        }
        total += w;
    }
    if !(total > 0.0) {
        return Err(Error::Integrity("categorical weights are all zero".into()));
    }
    Ok(draw_index(weights, total, rng))
}

/// Inverse-CDF draw with a pre-validated positive total.
#[inline]
fn draw_index<T: Scalar, R: Rng + ?Sized>(weights: &[T], total: f64, rng: &mut R) -> usize {
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, w) in weights.iter().enumerate() {
        let w = w.as_f64();
        if w > 0.0 {
            acc += w;
            last_positive = i;
            if target < acc {
                return i;
            }
        }
    }
    last_positive
}

struct Streams {
    creation: StreamRng,
    request: StreamRng,
    scoring: StreamRng,
    interaction: StreamRng,
}

/// What one call to [`Simulation::step`] appended to the log.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepSummary {
    pub t: usize,
    pub created: usize,
    pub requests: usize,
    pub recommendations: usize,
    pub interactions: usize,
}

#[derive(Debug, Clone, Copy)]
struct PendingCandidate {
    candidate: Candidate,
    content_id: u32,
}

pub struct Simulation<'a, T> {
    config: EngineConfig<T>,
    population: &'a Population<T>,
    graph: &'a DirectedGraph,
    prefs: Vec<[T; 3]>,
    ties: Option<TieModel<T>>,
    streams: Streams,
    log: EventLog,
    t: usize,
    requesting: Vec<bool>,
    candidates: Vec<Vec<PendingCandidate>>,
    scratch_candidates: Vec<Candidate>,
    scratch_scores: Vec<T>,
    updates: Vec<InteractionUpdate>,
}

impl<'a, T: Scalar> Simulation<'a, T> {
    pub fn new(config: EngineConfig<T>, population: &'a Population<T>, graph: &'a DirectedGraph, seed: u64) -> Result<Self> {
        config.validate()?;
        if graph.node_count() != population.len() {
            return Err(Error::config(
                "graph",
                format!("graph has {} nodes but population.n is {}", graph.node_count(), population.len()),
            ));
        }
        let edges = compute_static_features(graph, population)?;
        // A graph without edges never produces candidates and has nothing to standardize.
        let ties = if edges.is_empty() {
            None
        } else {
            Some(TieModel::new(edges, config.beta, config.alpha, config.standardization)?)
        };
        let n = population.len();
        Ok(Self {
            prefs: population.normalized_preferences(),
            ties,
            streams: Streams {
                creation: stream(seed, Stream::Creation),
                request: stream(seed, Stream::Request),
                scoring: stream(seed, Stream::Scoring),
                interaction: stream(seed, Stream::Interaction),
            },
            log: EventLog { seed, steps: config.steps, ..EventLog::default() },
            t: 0,
            requesting: vec![false; n],
            candidates: vec![Vec::new(); n],
            scratch_candidates: Vec::new(),
            scratch_scores: Vec::new(),
            updates: Vec::new(),
            config,
            population,
            graph,
        })
    }

    pub fn current_step(&self) -> usize {
        self.t
    }

    pub fn is_finished(&self) -> bool {
        self.t >= self.config.steps
    }

    pub fn ties(&self) -> Option<&TieModel<T>> {
        self.ties.as_ref()
    }

    pub fn log(&self) -> &EventLog {
        &self.log
    }

    pub fn step(&mut self) -> Result<StepSummary> {
        if self.is_finished() {
            return Err(Error::Integrity(format!("step {} past the configured {} steps", self.t, self.config.steps)));
        }
        let t = self.t;
        let step = t as u32;
        let n = self.population.len();

        // Creation.
        let first_content = self.log.content.len();
        for u in 0..n {
            if self.streams.creation.random::<f64>() < self.config.p_create {
                let topic_index = sample_categorical(&self.prefs[u], &mut self.streams.creation)?;
                let content_id = u32::try_from(self.log.content.len())
                    .map_err(|_| Error::Integrity("content id overflow".into()))?;
                self.log.content.push(ContentItem {
                    content_id,
                    creator_id: u as u32,
                    topic: Topic::from_index(topic_index).expect("three topics"),
                    created_at: step,
                });
            }
        }
        let created = self.log.content.len() - first_content;

        // Requests.
        let mut requests = 0usize;
        for flag in self.requesting.iter_mut() {
            *flag = self.streams.request.random::<f64>() < self.config.p_request;
            requests += usize::from(*flag);
        }
        self.log.requests.push(requests as u32);

        // Candidate sets: this step's items, fanned out to requesting followers.
        for list in self.candidates.iter_mut() {
            list.clear();
        }
        for item in &self.log.content[first_content..] {
            for (follower, edge) in self.graph.in_edges(item.creator_id as usize) {
                if self.requesting[follower] {
                    self.candidates[follower].push(PendingCandidate {
                        candidate: Candidate { topic: item.topic, edge },
                        content_id: item.content_id,
                    });
                }
            }
        }

        // Recommendation.
        let first_rec = self.log.recs.len();
        for viewer in 0..n {
            let pending = &self.candidates[viewer];
            if pending.is_empty() {
                continue;
            }
            self.scratch_candidates.clear();
            self.scratch_candidates.extend(pending.iter().map(|p| p.candidate));
            let total = raw_scores_into(
                self.config.policy,
                &self.prefs[viewer],
                &self.scratch_candidates,
                self.ties.as_ref(),
                &mut self.scratch_scores,
            )
            .as_f64();
            if !(total > 0.0) || !total.is_finite() {
                return Err(Error::Integrity(format!("step {t}: degenerate scores for viewer {viewer}")));
            }
            let pick = draw_index(&self.scratch_scores, total, &mut self.streams.scoring);
            self.log.recs.push(RecommendationEvent {
                step,
                viewer_id: viewer as u32,
                content_id: pending[pick].content_id,
                interacted: false,
            });
            self.updates.push(InteractionUpdate { edge: pending[pick].candidate.edge, interacted: false });
        }

        // Interaction.
        let mut interactions = 0;
        for (rec, update) in self.log.recs[first_rec..].iter_mut().zip(self.updates.iter_mut()) {
            let topic = self.log.content[rec.content_id as usize].topic;
            let p = self.prefs[rec.viewer_id as usize][topic.index()].as_f64();
            rec.interacted = self.streams.interaction.random::<f64>() < p;
            update.interacted = rec.interacted;
            interactions += usize::from(rec.interacted);
        }

        // Update.
        if let Some(ties) = self.ties.as_mut() {
            ties.apply_updates(&self.updates)?;
            if self.config.resync_every > 0 && (t + 1) % self.config.resync_every == 0 {
                ties.resync();
            }
        }
        self.updates.clear();
        if let Some(ties) = self.ties.as_ref().filter(|_| self.config.tie_summary_every > 0 && t % self.config.tie_summary_every == 0) {
            let summary = ties.pair_class_summary(self.graph, self.population);
            for (class, (ic, ts, _)) in [PairClass::InGroup, PairClass::CrossGroup].into_iter().zip(summary) {
                self.log.tie_summaries.push(TieSummaryRow {
                    t: step,
                    pair_class: class,
                    mean_int_count: ic.as_f64(),
                    mean_tie_strength: ts.as_f64(),
                });
            }
        }

        self.t += 1;
        Ok(StepSummary {
            t,
            created,
            requests,
            recommendations: self.log.recs.len() - first_rec,
            interactions,
        })
    }

    pub fn run_to_end(mut self) -> Result<EventLog> {
        while !self.is_finished() {
            self.step()?;
        }
        Ok(self.log)
    }
}

/// Runs a full simulation of `config.steps` steps.
pub fn run<T: Scalar>(config: &EngineConfig<T>, population: &Population<T>, graph: &DirectedGraph, seed: u64) -> Result<EventLog> {
    Simulation::new(config.clone(), population, graph, seed)?.run_to_end()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgen::{complete_graph, sbm_graph, SbmParams};
    use crate::population::{sample_population, PopulationConfig};

    fn setup(n: usize, seed: u64) -> (Population<f64>, DirectedGraph) {
        let cfg = PopulationConfig { n, ..PopulationConfig::default() };
        let pop = sample_population(&cfg, &mut stream(seed, Stream::Population)).unwrap();
        let graph = sbm_graph(&pop, SbmParams::default(), &mut stream(seed, Stream::Graph)).unwrap();
        (pop, graph)
    }

    fn cfg(steps: usize, policy: Policy) -> EngineConfig<f64> {
        EngineConfig { steps, policy, ..EngineConfig::default() }
    }

    #[test]
    fn categorical_examples() {
        let mut rng = stream(0, Stream::Scoring);
        for _ in 0..100 {
            assert_eq!(sample_categorical(&[0.0, 1.0, 0.0], &mut rng).unwrap(), 1);
        }
        let hits = (0..10_000).filter(|_| sample_categorical(&[0.5, 0.5], &mut rng).unwrap() == 0).count();
        assert!((hits as f64 / 1e4 - 0.5).abs() < 0.02);
        assert!(sample_categorical(&[0.0, 0.0], &mut rng).is_err());
        assert!(sample_categorical(&[f64::NAN, 1.0], &mut rng).is_err());
        assert!(sample_categorical::<f64, _>(&[], &mut rng).is_err());
    }

    #[test]
    fn categorical_chi_square() {
        let probs = [0.2, 0.3, 0.5];
        let draws = 100_000;
        let mut counts = [0usize; 3];
        let mut rng = stream(17, Stream::Scoring);
        for _ in 0..draws {
            counts[sample_categorical(&probs, &mut rng).unwrap()] += 1;
        }
        let chi2: f64 = counts
            .iter()
            .zip(probs)
            .map(|(&c, p)| {
                let e = p * draws as f64;
                (c as f64 - e).powi(2) / e
            })
            .sum();
        // Chi-square survival function with two degrees of freedom.
        let p_value = (-chi2 / 2.0).exp();
        assert!(p_value > 0.01, "chi2 = {chi2}");
    }

    #[test]
    fn no_creation_means_nothing_happens() {
        let (pop, graph) = setup(60, 1);
        let config = EngineConfig { p_create: 0.0, ..cfg(50, Policy::RealGraph) };
        let mut sim = Simulation::new(config, &pop, &graph, 1).unwrap();
        while !sim.is_finished() {
            sim.step().unwrap();
        }
        assert!(sim.log().content.is_empty());
        assert!(sim.log().recs.is_empty());
        assert!(sim.ties().unwrap().edges().int_counts().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn two_user_complete_graph_forces_exchange() {
        let pop = {
            let cfg = PopulationConfig { n: 2, minority_share: 0.5, ..PopulationConfig::default() };
            sample_population(&cfg, &mut stream(0, Stream::Population)).unwrap()
        };
        let graph = complete_graph(2).unwrap();
        for policy in Policy::ALL {
            let config = EngineConfig { p_create: 1.0, p_request: 1.0, ..cfg(20, policy) };
            let log = run(&config, &pop, &graph, 5).unwrap();
            assert_eq!(log.content.len(), 40);
            assert_eq!(log.recs.len(), 40);
            for r in &log.recs {
                let item = log.item(r.content_id);
                assert_eq!(item.created_at, r.step);
                assert_ne!(item.creator_id, r.viewer_id);
            }
        }
    }

    #[test]
    fn zero_steps_gives_empty_log() {
        let (pop, graph) = setup(20, 2);
        let log = run(&cfg(0, Policy::RealGraph), &pop, &graph, 9).unwrap();
        assert!(log.content.is_empty() && log.recs.is_empty());
        assert_eq!(log.seed, 9);
    }

    #[test]
    fn logs_are_reproducible_and_seed_sensitive() {
        let (pop, graph) = setup(80, 3);
        let a = run(&cfg(100, Policy::RealGraph), &pop, &graph, 1).unwrap();
        let b = run(&cfg(100, Policy::RealGraph), &pop, &graph, 1).unwrap();
        let c = run(&cfg(100, Policy::RealGraph), &pop, &graph, 2).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.recs, c.recs);
        let mut bytes_a = Vec::new();
        let mut bytes_b = Vec::new();
        a.write_recs_csv(&mut bytes_a).unwrap();
        b.write_recs_csv(&mut bytes_b).unwrap();
        assert_eq!(bytes_a, bytes_b);
    }

    #[test]
    fn creation_is_policy_independent() {
        let (pop, graph) = setup(80, 4);
        let logs: Vec<_> = Policy::ALL.iter().map(|&p| run(&cfg(150, p), &pop, &graph, 11).unwrap()).collect();
        assert_eq!(logs[0].content, logs[1].content);
        assert_eq!(logs[1].content, logs[2].content);
        assert_eq!(logs[0].requests, logs[2].requests);
    }

    #[test]
    fn invariants_hold() {
        let (pop, graph) = setup(100, 5);
        for policy in Policy::ALL {
            let log = run(&cfg(200, policy), &pop, &graph, 6).unwrap();
            log.check_invariants(&graph).unwrap();
            assert!(log.total_interactions() <= log.recs.len());
            assert!(log.recs.len() as u64 <= log.total_requests());
        }
    }

    #[test]
    fn interaction_counts_follow_the_log() {
        // Replay the log through the EMA recurrence and compare with the model.
        let (pop, graph) = setup(60, 8);
        let config = cfg(120, Policy::RealGraph);
        let mut sim = Simulation::new(config.clone(), &pop, &graph, 3).unwrap();
        while !sim.is_finished() {
            sim.step().unwrap();
        }
        let mut replay = vec![0.0f64; graph.edge_count()];
        for r in &sim.log().recs {
            let e = graph.edge_id(r.viewer_id as usize, sim.log().item(r.content_id).creator_id as usize).unwrap();
            replay[e] = 0.01 * f64::from(u8::from(r.interacted)) + 0.99 * replay[e];
        }
        for (e, v) in replay.iter().enumerate() {
            assert!((sim.ties().unwrap().edges().int_count(e) - v).abs() < 1e-15);
        }
    }

    #[test]
    fn csv_round_trip() {
        let (pop, graph) = setup(40, 9);
        let log = run(&cfg(30, Policy::TopicMatch), &pop, &graph, 2).unwrap();
        let mut content = Vec::new();
        let mut recs = Vec::new();
        log.write_content_csv(&mut content).unwrap();
        log.write_recs_csv(&mut recs).unwrap();
        assert!(String::from_utf8_lossy(&content).starts_with("step,content_id,creator_id,topic\n"));
        assert!(String::from_utf8_lossy(&recs).starts_with("step,viewer_id,content_id,interacted\n"));
        assert_eq!(EventLog::read_content_csv(content.as_slice()).unwrap(), log.content);
        assert_eq!(EventLog::read_recs_csv(recs.as_slice()).unwrap(), log.recs);
    }

    #[test]
    fn stepping_past_the_end_fails() {
        let (pop, graph) = setup(20, 1);
        let mut sim = Simulation::new(cfg(1, Policy::Random), &pop, &graph, 0).unwrap();
        sim.step().unwrap();
        assert!(sim.step().is_err());
    }

    #[test]
    fn mismatched_graph_is_a_config_error() {
        let (pop, _) = setup(20, 1);
        let graph = complete_graph(10).unwrap();
        assert!(matches!(Simulation::new(cfg(1, Policy::Random), &pop, &graph, 0), Err(Error::Config { .. })));
    }
}
