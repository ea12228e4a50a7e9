//! Recommendation policies and the tie-strength model behind the
//! interaction-history policy.

mod features;

pub use features::{
    column_stats, compute_static_features, edge_for_pair, standardize, zscore, EdgeState, InteractionUpdate,
    StandardizationStats, StandardizedFeatures, FEATURE_COUNT, FEATURE_NAMES,
};

use serde::{Deserialize, Serialize};

use crate::engine::ContentItem;
use crate::error::{Error, Result};
use crate::netgen::DirectedGraph;
use crate::population::{GroupId, Population, Topic};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    /// Every candidate scores 1.
    Random,
    /// A candidate scores the viewer's normalized preference for its topic.
    TopicMatch,
    /// Average of the topic-match score and the viewer-creator tie strength.
    RealGraph,
}

impl Policy {
    pub const ALL: [Policy; 3] = [Policy::Random, Policy::TopicMatch, Policy::RealGraph];

    pub fn as_str(self) -> &'static str {
        match self {
            Policy::Random => "random",
            Policy::TopicMatch => "topic_match",
            Policy::RealGraph => "real_graph",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Policy::ALL.into_iter().find(|p| p.as_str() == s)
    }
}

/// Logistic coefficients for `(common out, common in, distance, interaction count)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TieStrengthParams<T> {
    pub beta: [T; FEATURE_COUNT],
}

impl<T: Scalar> Default for TieStrengthParams<T> {
    fn default() -> Self {
        Self {
            beta: [T::one(), T::one(), -T::one(), T::lit(5.0)],
        }
    }
}

impl<T: Scalar> TieStrengthParams<T> {
    pub fn new(beta: [T; FEATURE_COUNT]) -> Self {
        Self { beta }
    }

    pub fn validate(&self) -> Result<()> {
        if self.beta.iter().all(|b| b.is_finite()) {
            Ok(())
        } else {
            Err(Error::config("beta", "coefficients must be finite"))
        }
    }

    /// `beta . features`, the log-odds of interaction.
    #[inline]
    pub fn logit(&self, features: &[T; FEATURE_COUNT]) -> T {
        self.beta
            .iter()
            .zip(features.iter())
            .fold(T::zero(), |acc, (&b, &f)| acc + b * f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EmaParams<T> {
    pub alpha: T,
}

impl<T: Scalar> Default for EmaParams<T> {
    fn default() -> Self {
        Self { alpha: T::lit(0.01) }
    }
}

impl<T: Scalar> EmaParams<T> {
    pub fn new(alpha: T) -> Result<Self> {
        let p = Self { alpha };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha > T::zero() && self.alpha < T::one() {
            Ok(())
        } else {
            Err(Error::config("alpha", format!("must lie in (0, 1), got {}", self.alpha)))
        }
    }

    /// `alpha * interacted + (1 - alpha) * previous`.
    #[inline]
    pub fn step(&self, previous: T, interacted: bool) -> T {
        let hit = if interacted { T::one() } else { T::zero() };
        self.alpha * hit + (T::one() - self.alpha) * previous
    }
}

#[inline]
pub fn logistic<T: Scalar>(x: T) -> T {
    if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}

/// Tie strength for already standardized features.
#[inline]
pub fn tie_strength<T: Scalar>(features: &[T; FEATURE_COUNT], params: &TieStrengthParams<T>) -> T {
    logistic(params.logit(features))
}

/// How the interaction-count mean and deviation are refreshed after each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StandardizationMode {
    /// Running sums adjusted by the touched edges only.
    #[default]
    Incremental,
    /// Two-pass recomputation over every edge.
    FullRecompute,
}

/// Live tie-strength state of one simulation run.
///
/// The three static features are standardized once and folded into a cached
/// partial logit per edge. The interaction-count column is re-standardized
/// after every update step, either from running sums or by a full pass.
#[derive(Debug, Clone)]
pub struct TieModel<T> {
    edges: EdgeState<T>,
    params: TieStrengthParams<T>,
    ema: EmaParams<T>,
    mode: StandardizationMode,
    static_logit: Vec<T>,
    static_stats: StandardizationStats<T>,
    int_sum: T,
    int_sum_sq: T,
    int_mean: T,
    int_std: T,
}

impl<T: Scalar> TieModel<T> {
    pub fn new(edges: EdgeState<T>, params: TieStrengthParams<T>, ema: EmaParams<T>, mode: StandardizationMode) -> Result<Self> {
        params.validate()?;
        ema.validate()?;
        let (stats, table) = standardize(&edges)?;
        let static_logit = (0..edges.len())
            .map(|e| {
                params.beta[0] * table.columns[0][e] + params.beta[1] * table.columns[1][e] + params.beta[2] * table.columns[2][e]
            })
            .collect();
        let mut model = Self {
            edges,
            params,
            ema,
            mode,
            static_logit,
            static_stats: stats,
            int_sum: T::zero(),
            int_sum_sq: T::zero(),
            int_mean: T::zero(),
            int_std: T::zero(),
        };
        model.resync();
        Ok(model)
    }

    pub fn edges(&self) -> &EdgeState<T> {
        &self.edges
    }

    pub fn params(&self) -> &TieStrengthParams<T> {
        &self.params
    }

    pub fn mode(&self) -> StandardizationMode {
        self.mode
    }

    /// Current standardization statistics for all four features.
    pub fn stats(&self) -> StandardizationStats<T> {
        let mut s = self.static_stats;
        s.mean[3] = self.int_mean;
        s.std[3] = self.int_std;
        s
    }

    #[inline]
    pub fn standardized_int_count(&self, edge: usize) -> T {
        zscore(self.edges.int_count(edge), self.int_mean, self.int_std)
    }

    #[inline]
    pub fn tie_strength(&self, edge: usize) -> T {
        logistic(self.static_logit[edge] + self.params.beta[3] * self.standardized_int_count(edge))
    }

    /// Applies one step of interaction updates, then refreshes the
    /// interaction-count standardization.
    pub fn apply_updates(&mut self, updates: &[InteractionUpdate]) -> Result<()> {
        let changes = self.edges.update_interaction_counts(updates, self.ema)?;
        match self.mode {
            StandardizationMode::Incremental => {
                for (old, new) in changes {
                    self.int_sum = self.int_sum + (new - old);
                    self.int_sum_sq = self.int_sum_sq + (new * new - old * old);
                }
                self.refresh_from_sums();
            }
            StandardizationMode::FullRecompute => self.resync(),
        }
        Ok(())
    }

    /// Recomputes the running sums and statistics exactly from the table.
    pub fn resync(&mut self) {
        let counts = self.edges.int_counts();
        self.int_sum = counts.iter().copied().sum();
        self.int_sum_sq = counts.iter().map(|&c| c * c).sum();
        let (mean, std) = column_stats(counts);
        self.int_mean = mean;
        self.int_std = std;
    }

    fn refresh_from_sums(&mut self) {
        let n = T::from_count(self.edges.len());
        let mean = self.int_sum / n;
        let var = self.int_sum_sq / n - mean * mean;
        self.int_mean = mean;
        self.int_std = if var > T::zero() { var.sqrt() } else { T::zero() };
    }

    /// Mean interaction count and tie strength over in-group and cross-group
    /// edges, in that order. O(E).
    pub fn pair_class_summary(&self, graph: &DirectedGraph, population: &Population<T>) -> [(T, T, usize); 2] {
        let mut acc = [(T::zero(), T::zero(), 0usize); 2];
        for (e, i, j) in graph.edges() {
            let class = usize::from(population.group(i) != population.group(j));
            acc[class].0 = acc[class].0 + self.edges.int_count(e);
            acc[class].1 = acc[class].1 + self.tie_strength(e);
            acc[class].2 += 1;
        }
        acc.map(|(ic, ts, k)| {
            if k == 0 {
                (T::nan(), T::nan(), 0)
            } else {
                (ic / T::from_count(k), ts / T::from_count(k), k)
            }
        })
    }
}

/// A candidate as the scorer sees it: its topic and the follow edge from the
/// viewer to its creator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Candidate {
    pub topic: Topic,
    pub edge: usize,
}

/// Scores normalized into a sampling distribution over the candidates.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector<T>(pub Vec<T>);

impl<T: Scalar> ScoreVector<T> {
    pub fn as_slice(&self) -> &[T] {
        &self.0
    }
}

/// Writes raw (unnormalized) scores for `candidates` into `out` and returns
/// their sum.
#[inline]
pub fn raw_scores_into<T: Scalar>(
    policy: Policy,
    viewer_prefs: &[T; 3],
    candidates: &[Candidate],
    ties: Option<&TieModel<T>>,
    out: &mut Vec<T>,
) -> T {
    out.clear();
    let half = T::lit(0.5);
    match policy {
        Policy::Random => out.extend(candidates.iter().map(|_| T::one())),
        Policy::TopicMatch => out.extend(candidates.iter().map(|c| viewer_prefs[c.topic.index()])),
        Policy::RealGraph => {
            let ties = ties.expect("interaction-history policy needs a tie model");
            out.extend(
                candidates
                    .iter()
                    .map(|c| half * (viewer_prefs[c.topic.index()] + ties.tie_strength(c.edge))),
            )
        }
    }
    out.iter().copied().sum()
}

/// Read-only view used by the checked scoring entry point.
pub struct ScoringContext<'a, T> {
    pub graph: &'a DirectedGraph,
    pub population: &'a Population<T>,
    pub normalized_prefs: &'a [[T; 3]],
    pub ties: Option<&'a TieModel<T>>,
}

/// Scores content items for `viewer` and normalizes them to sum to one.
/// Returns `Ok(None)` for an empty candidate list.
pub fn score_candidates<T: Scalar>(
    policy: Policy,
    viewer: usize,
    items: &[ContentItem],
    ctx: &ScoringContext<'_, T>,
) -> Result<Option<ScoreVector<T>>> {
    if items.is_empty() {
        return Ok(None);
    }
    let candidates = items
        .iter()
        .map(|item| {
            Ok(Candidate {
                topic: item.topic,
                edge: edge_for_pair(ctx.graph, viewer, item.creator_id as usize)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if policy == Policy::RealGraph && ctx.ties.is_none() {
        return Err(Error::Integrity("interaction-history policy scored without a tie model".into()));
    }
    let mut scores = Vec::with_capacity(candidates.len());
    let total = raw_scores_into(policy, &ctx.normalized_prefs[viewer], &candidates, ctx.ties, &mut scores);
    if !(total > T::zero()) || !total.is_finite() {
        return Err(Error::Integrity(format!("degenerate scores for viewer {viewer}")));
    }
    Ok(Some(ScoreVector(scores.into_iter().map(|s| s / total).collect())))
}

/// `in-group` / `cross-group` label of a viewer-creator pair.
pub fn pair_class(viewer: GroupId, creator: GroupId) -> &'static str {
    if viewer == creator {
        "in_group"
    } else {
        "cross_group"
    }
}
