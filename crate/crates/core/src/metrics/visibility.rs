use serde::Serialize;

use crate::engine::EventLog;
use crate::error::{Error, Result};
use crate::netgen::DirectedGraph;
use crate::population::{GroupId, Population, Topic};
use crate::scalar::Scalar;

use super::stats::{ols, pearson, CorrelationResult, Line};
use super::{MetricsConfig, TimeSeries};

fn check_window<T: Scalar>(log: &EventLog, population: &Population<T>, burn_in: usize) -> Result<()> {
    for g in GroupId::ALL {
        if population.group_size(g) == 0 {
            return Err(Error::config("population", format!("{} group is empty", g.as_str())));
        }
    }
    if burn_in >= log.steps {
        return Err(Error::config(
            "metrics.burn_in",
            format!("burn-in {burn_in} leaves nothing of a {}-step run", log.steps),
        ));
    }
    Ok(())
}

/// Minority/majority ratio of per-capita professional recommendations.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioSeries {
    /// Per-step ratio of per-capita rates, from burn-in onward.
    pub raw: TimeSeries,
    /// Trailing moving average of `raw`.
    pub ma: TimeSeries,
    /// Same ratio normalized per created professional item instead of per user.
    pub per_item_raw: TimeSeries,
    pub per_item_ma: TimeSeries,
}

/// For each step `t >= burn_in`: `R_g(t)` is the number of recommendations at
/// `t` of professional content created by group `g`, divided by `|g|`; the
/// ratio is `R_min / R_maj`, undefined when `R_maj = 0`.
pub fn professional_rec_ratio<T: Scalar>(log: &EventLog, population: &Population<T>, config: &MetricsConfig) -> Result<RatioSeries> {
    check_window(log, population, config.burn_in)?;
    let span = log.steps - config.burn_in;
    let mut recs = [vec![0u64; span], vec![0u64; span]];
    let mut items = [vec![0u64; span], vec![0u64; span]];
    for c in &log.content {
        let t = c.created_at as usize;
        if t >= config.burn_in && c.topic == Topic::Professional {
            items[population.group(c.creator_id as usize).index()][t - config.burn_in] += 1;
        }
    }
    for r in &log.recs {
        let t = r.step as usize;
        if t < config.burn_in {
            continue;
        }
        let item = log.item(r.content_id);
        if item.topic == Topic::Professional {
            recs[population.group(item.creator_id as usize).index()][t - config.burn_in] += 1;
        }
    }
    let maj = GroupId::Majority.index();
    let min = GroupId::Minority.index();
    let size_maj = population.group_size(GroupId::Majority) as f64;
    let size_min = population.group_size(GroupId::Minority) as f64;
    let t: Vec<usize> = (config.burn_in..log.steps).collect();
    let raw: Vec<Option<f64>> = (0..span)
        .map(|k| {
            let r_maj = recs[maj][k] as f64 / size_maj;
            let r_min = recs[min][k] as f64 / size_min;
            (r_maj > 0.0).then(|| r_min / r_maj)
        })
        .collect();
    let per_item: Vec<Option<f64>> = (0..span)
        .map(|k| {
            if items[maj][k] == 0 || items[min][k] == 0 || recs[maj][k] == 0 {
                return None;
            }
            let r_maj = recs[maj][k] as f64 / items[maj][k] as f64;
            let r_min = recs[min][k] as f64 / items[min][k] as f64;
            Some(r_min / r_maj)
        })
        .collect();
    let raw = TimeSeries::new(t.clone(), raw);
    let per_item_raw = TimeSeries::new(t, per_item);
    Ok(RatioSeries {
        ma: raw.moving_average(config.ma_window_ratio),
        per_item_ma: per_item_raw.moving_average(config.ma_window_ratio),
        raw,
        per_item_raw,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapSeries {
    pub raw: TimeSeries,
    pub ma: TimeSeries,
}

/// Mean interaction count of in-group minus cross-group viewer-creator pairs
/// served professional content at each step.
///
/// Interaction counts are rebuilt by replaying the log through the EMA
/// recurrence; each pair contributes the value it had when the item was
/// served, before that step's update.
pub fn interaction_gap<T: Scalar>(
    log: &EventLog,
    population: &Population<T>,
    graph: &DirectedGraph,
    alpha: f64,
    config: &MetricsConfig,
) -> Result<GapSeries> {
    check_window(log, population, config.burn_in)?;
    let mut counts = vec![0.0f64; graph.edge_count()];
    let mut raw = Vec::with_capacity(log.steps - config.burn_in);
    let mut pending: Vec<(usize, bool)> = Vec::new();
    let mut recs = log.recs.iter().peekable();
    for t in 0..log.steps {
        let mut sums = [(0.0f64, 0usize); 2];
        while let Some(r) = recs.next_if(|r| r.step as usize == t) {
            let item = log.item(r.content_id);
            let (viewer, creator) = (r.viewer_id as usize, item.creator_id as usize);
            let edge = graph
                .edge_id(viewer, creator)
                .ok_or_else(|| Error::Integrity(format!("step {t}: viewer {viewer} does not follow {creator}")))?;
            if item.topic == Topic::Professional {
                let class = usize::from(population.group(viewer) != population.group(creator));
                sums[class].0 += counts[edge];
                sums[class].1 += 1;
            }
            pending.push((edge, r.interacted));
        }
        for (edge, interacted) in pending.drain(..) {
            counts[edge] = alpha * f64::from(u8::from(interacted)) + (1.0 - alpha) * counts[edge];
        }
        if t >= config.burn_in {
            let [(s_in, n_in), (s_cross, n_cross)] = sums;
            raw.push((n_in > 0 && n_cross > 0).then(|| s_in / n_in as f64 - s_cross / n_cross as f64));
        }
    }
    let raw = TimeSeries::new((config.burn_in..log.steps).collect(), raw);
    Ok(GapSeries { ma: raw.moving_average(config.ma_window_gap), raw })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReceiverFilter {
    All,
    Minority,
    Majority,
}

impl ReceiverFilter {
    pub const ALL: [ReceiverFilter; 3] = [ReceiverFilter::All, ReceiverFilter::Minority, ReceiverFilter::Majority];

    pub fn admits(self, group: GroupId) -> bool {
        match self {
            ReceiverFilter::All => true,
            ReceiverFilter::Minority => group == GroupId::Minority,
            ReceiverFilter::Majority => group == GroupId::Majority,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ReceiverFilter::All => "all",
            ReceiverFilter::Minority => "minority",
            ReceiverFilter::Majority => "majority",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopicShareRow {
    pub topic: Topic,
    pub receiver: ReceiverFilter,
    pub recs: u64,
    pub recs_minority_created: u64,
    /// Minority-created share of recommendations; undefined without recommendations.
    pub share_minority_created: Option<f64>,
    pub created: u64,
    pub created_minority: u64,
    /// Minority share of all content created after burn-in, independent of the receiver filter.
    pub creation_share_minority: Option<f64>,
}

/// Per topic, the share of recommendations (to receivers admitted by
/// `receiver`) that feature minority-created content, next to the minority
/// share of created content.
pub fn minority_share_by_topic<T: Scalar>(
    log: &EventLog,
    population: &Population<T>,
    receiver: ReceiverFilter,
    burn_in: usize,
) -> Vec<TopicShareRow> {
    let mut recs = [(0u64, 0u64); 3];
    let mut created = [(0u64, 0u64); 3];
    for c in log.content.iter().filter(|c| c.created_at as usize >= burn_in) {
        let slot = &mut created[c.topic.index()];
        slot.0 += 1;
        slot.1 += u64::from(population.group(c.creator_id as usize) == GroupId::Minority);
    }
    for r in log.recs.iter().filter(|r| r.step as usize >= burn_in) {
        if !receiver.admits(population.group(r.viewer_id as usize)) {
            continue;
        }
        let item = log.item(r.content_id);
        let slot = &mut recs[item.topic.index()];
        slot.0 += 1;
        slot.1 += u64::from(population.group(item.creator_id as usize) == GroupId::Minority);
    }
    let share = |(total, minority): (u64, u64)| (total > 0).then(|| minority as f64 / total as f64);
    Topic::ALL
        .iter()
        .map(|&topic| {
            let k = topic.index();
            TopicShareRow {
                topic,
                receiver,
                recs: recs[k].0,
                recs_minority_created: recs[k].1,
                share_minority_created: share(recs[k]),
                created: created[k].0,
                created_minority: created[k].1,
                creation_share_minority: share(created[k]),
            }
        })
        .collect()
}

pub const PER_USER_COVARIATES: [&str; 5] =
    ["majority_followers", "majority_following", "z_professional", "z_mainstream", "z_marginal"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerUserRow {
    pub user_id: usize,
    /// Professional items by this user recommended to majority receivers.
    pub prof_recs_to_majority: u64,
    /// Professional items by this user recommended to anyone.
    pub prof_recs_total: u64,
    /// Professional items this user created.
    pub prof_items_created: u64,
    /// `prof_recs_to_majority / prof_items_created`; undefined without items.
    pub prof_recs_to_majority_per_item: Option<f64>,
    pub majority_followers: usize,
    pub majority_following: usize,
    pub z_professional: f64,
    pub z_mainstream: f64,
    pub z_marginal: f64,
}

impl PerUserRow {
    pub fn covariate(&self, name: &str) -> Option<f64> {
        Some(match name {
            "majority_followers" => self.majority_followers as f64,
            "majority_following" => self.majority_following as f64,
            "z_professional" => self.z_professional,
            "z_mainstream" => self.z_mainstream,
            "z_marginal" => self.z_marginal,
            _ => return None,
        })
    }
}

/// One row per minority user: cross-group delivery of their professional
/// content and the covariates it is correlated against.
pub fn per_user_cross_group_visibility<T: Scalar>(
    log: &EventLog,
    population: &Population<T>,
    graph: &DirectedGraph,
    burn_in: usize,
) -> Vec<PerUserRow> {
    let minority = population.members(GroupId::Minority);
    let mut to_majority = vec![0u64; minority.len()];
    let mut total = vec![0u64; minority.len()];
    let mut items = vec![0u64; minority.len()];
    for c in log.content.iter().filter(|c| c.created_at as usize >= burn_in && c.topic == Topic::Professional) {
        let creator = c.creator_id as usize;
        if minority.contains(&creator) {
            items[creator - minority.start] += 1;
        }
    }
    for r in log.recs.iter().filter(|r| r.step as usize >= burn_in) {
        let item = log.item(r.content_id);
        let creator = item.creator_id as usize;
        if item.topic != Topic::Professional || !minority.contains(&creator) {
            continue;
        }
        total[creator - minority.start] += 1;
        if population.group(r.viewer_id as usize) == GroupId::Majority {
            to_majority[creator - minority.start] += 1;
        }
    }
    let count_majority = |list: &[u32]| list.iter().filter(|&&v| population.group(v as usize) == GroupId::Majority).count();
    minority
        .clone()
        .map(|u| {
            let z = population.user(u).preferences.z;
            let k = u - minority.start;
            PerUserRow {
                user_id: u,
                prof_recs_to_majority: to_majority[k],
                prof_recs_total: total[k],
                prof_items_created: items[k],
                prof_recs_to_majority_per_item: (items[k] > 0).then(|| to_majority[k] as f64 / items[k] as f64),
                majority_followers: count_majority(graph.in_neighbors(u)),
                majority_following: count_majority(graph.out_neighbors(u)),
                z_professional: z[0].as_f64(),
                z_mainstream: z[1].as_f64(),
                z_marginal: z[2].as_f64(),
            }
        })
        .collect()
}

/// Fraction of minority-created professional recommendations that went to
/// majority receivers.
pub fn cross_group_delivery_share(rows: &[PerUserRow]) -> Option<f64> {
    let total: u64 = rows.iter().map(|r| r.prof_recs_total).sum();
    let to_majority: u64 = rows.iter().map(|r| r.prof_recs_to_majority).sum();
    (total > 0).then(|| to_majority as f64 / total as f64)
}

/// Response variable for per-user correlations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PerUserResponse {
    /// Majority deliveries per professional item created; users without items are left out.
    RecsPerItem,
    /// Total majority deliveries.
    RecsTotal,
}

impl PerUserResponse {
    pub const ALL: [PerUserResponse; 2] = [PerUserResponse::RecsPerItem, PerUserResponse::RecsTotal];

    pub fn as_str(self) -> &'static str {
        match self {
            PerUserResponse::RecsPerItem => "recs_per_item",
            PerUserResponse::RecsTotal => "recs_total",
        }
    }

    pub fn value(self, row: &PerUserRow) -> Option<f64> {
        match self {
            PerUserResponse::RecsPerItem => row.prof_recs_to_majority_per_item,
            PerUserResponse::RecsTotal => Some(row.prof_recs_to_majority as f64),
        }
    }
}

/// Pearson correlation of each covariate with the chosen response. Rows may
/// be pooled over several runs.
pub fn per_user_correlations(
    rows: &[PerUserRow],
    response: PerUserResponse,
) -> Vec<(&'static str, Result<CorrelationResult<f64>>)> {
    let used: Vec<(&PerUserRow, f64)> = rows.iter().filter_map(|r| response.value(r).map(|v| (r, v))).collect();
    let y: Vec<f64> = used.iter().map(|&(_, v)| v).collect();
    PER_USER_COVARIATES
        .iter()
        .map(|&name| {
            let x: Vec<f64> = used.iter().map(|(r, _)| r.covariate(name).expect("known covariate")).collect();
            (name, pearson(&x, &y))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecsVsInDegreeRow {
    pub user_id: usize,
    pub group: GroupId,
    pub topic: Topic,
    pub in_degree: usize,
    pub items_created: u64,
    pub recs: u64,
    pub mean_recs_per_item: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecsVsInDegreeFit {
    pub topic: Topic,
    pub group: GroupId,
    /// `None` when fewer than two distinct in-degrees are present.
    pub line: Option<Line<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecsVsInDegree {
    pub rows: Vec<RecsVsInDegreeRow>,
    pub fits: Vec<RecsVsInDegreeFit>,
}

/// Recommendations per created item against follower count, by topic and
/// creator group, with least-squares lines.
pub fn recs_vs_incoming_edges<T: Scalar>(
    log: &EventLog,
    population: &Population<T>,
    graph: &DirectedGraph,
    burn_in: usize,
) -> RecsVsInDegree {
    let n = population.len();
    let mut items = vec![[0u64; 3]; n];
    let mut recs = vec![[0u64; 3]; n];
    for c in log.content.iter().filter(|c| c.created_at as usize >= burn_in) {
        items[c.creator_id as usize][c.topic.index()] += 1;
    }
    for r in log.recs.iter().filter(|r| r.step as usize >= burn_in) {
        let item = log.item(r.content_id);
        recs[item.creator_id as usize][item.topic.index()] += 1;
    }
    let mut rows = Vec::new();
    for topic in Topic::ALL {
        for u in 0..n {
            let k = topic.index();
            if items[u][k] == 0 {
                continue;
            }
            rows.push(RecsVsInDegreeRow {
                user_id: u,
                group: population.group(u),
                topic,
                in_degree: graph.in_degree(u),
                items_created: items[u][k],
                recs: recs[u][k],
                mean_recs_per_item: recs[u][k] as f64 / items[u][k] as f64,
            });
        }
    }
    let mut fits = Vec::new();
    for topic in Topic::ALL {
        for group in GroupId::ALL {
            let (x, y): (Vec<f64>, Vec<f64>) = rows
                .iter()
                .filter(|r| r.topic == topic && r.group == group)
                .map(|r| (r.in_degree as f64, r.mean_recs_per_item))
                .unzip();
            fits.push(RecsVsInDegreeFit { topic, group, line: ols(&x, &y).ok() });
        }
    }
    RecsVsInDegree { rows, fits }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{ContentItem, RecommendationEvent};
    use crate::population::{PreferenceVector, UserProfile};
    use approx::assert_abs_diff_eq;

    /// `minority` users first, then `majority`; preferences are placeholders.
    fn population(minority: usize, majority: usize) -> Population<f64> {
        let users = (0..minority + majority)
            .map(|id| UserProfile {
                id,
                group: if id < minority { GroupId::Minority } else { GroupId::Majority },
                preferences: PreferenceVector::new([0.5, 0.3, 0.2]),
            })
            .collect();
        Population::from_users(users).unwrap()
    }

    fn cfg(burn_in: usize) -> MetricsConfig {
        MetricsConfig { burn_in, ma_window_ratio: 1, ma_window_gap: 1 }
    }

    struct LogBuilder {
        log: EventLog,
    }

    impl LogBuilder {
        fn new(steps: usize) -> Self {
            Self { log: EventLog { steps, requests: vec![u32::MAX; steps], ..EventLog::default() } }
        }

        fn serve(&mut self, step: u32, creator: u32, viewer: u32, topic: Topic, interacted: bool) {
            let content_id = self.log.content.len() as u32;
            self.log.content.push(ContentItem { content_id, creator_id: creator, topic, created_at: step });
            self.log.recs.push(RecommendationEvent { step, viewer_id: viewer, content_id, interacted });
        }
    }

    #[test]
    fn ratio_hand_count() {
        // 2 minority and 8 majority users; per step 2 minority recs and 4 majority recs.
        let pop = population(2, 8);
        let mut b = LogBuilder::new(3);
        for t in 0..3 {
            b.serve(t, 0, 5, Topic::Professional, false);
            b.serve(t, 1, 6, Topic::Professional, false);
            for v in 0..4 {
                b.serve(t, 2 + v, 0, Topic::Professional, false);
            }
            b.serve(t, 3, 7, Topic::Marginal, false);
        }
        let r = professional_rec_ratio(&b.log, &pop, &cfg(0)).unwrap();
        assert_eq!(r.raw.v, vec![Some(2.0); 3]);
        assert_eq!(r.ma.v, vec![Some(2.0); 3]);
    }

    #[test]
    fn ratio_symmetric_and_undefined_points() {
        let pop = population(2, 2);
        let mut b = LogBuilder::new(3);
        b.serve(0, 0, 2, Topic::Professional, false);
        b.serve(0, 2, 0, Topic::Professional, false);
        b.serve(2, 1, 3, Topic::Professional, false);
        b.serve(2, 3, 1, Topic::Professional, false);
        let r = professional_rec_ratio(&b.log, &pop, &MetricsConfig { burn_in: 0, ma_window_ratio: 10, ma_window_gap: 1 }).unwrap();
        assert_eq!(r.raw.v, vec![Some(1.0), None, Some(1.0)]);
        assert_eq!(r.ma.v, vec![Some(1.0), None, Some(1.0)]);
        assert!(professional_rec_ratio(&b.log, &pop, &cfg(3)).is_err());
        let r = professional_rec_ratio(&b.log, &pop, &cfg(1)).unwrap();
        assert_eq!(r.raw.t, vec![1, 2]);
    }

    #[test]
    fn ratio_invariant_under_within_group_relabeling() {
        let pop = population(2, 3);
        let mut a = LogBuilder::new(2);
        a.serve(0, 0, 3, Topic::Professional, false);
        a.serve(0, 2, 0, Topic::Professional, false);
        a.serve(1, 3, 1, Topic::Professional, false);
        let mut b = LogBuilder::new(2);
        // Swap users 0 <-> 1 and 2 <-> 4.
        b.serve(0, 1, 3, Topic::Professional, false);
        b.serve(0, 4, 1, Topic::Professional, false);
        b.serve(1, 3, 0, Topic::Professional, false);
        let ra = professional_rec_ratio(&a.log, &pop, &cfg(0)).unwrap();
        let rb = professional_rec_ratio(&b.log, &pop, &cfg(0)).unwrap();
        assert_eq!(ra, rb);
    }

    #[test]
    fn gap_tracks_in_group_interactions() {
        // Users: 0 minority; 1, 2, 3 majority. Complete graph.
        let pop = population(1, 3);
        let graph = crate::netgen::complete_graph(4).unwrap();
        let steps = 30;
        let mut b = LogBuilder::new(steps);
        for t in 0..steps as u32 {
            b.serve(t, 2, 1, Topic::Professional, true); // in-group, always interacts
            b.serve(t, 3, 0, Topic::Professional, false); // cross-group, never
        }
        let gap = interaction_gap(&b.log, &pop, &graph, 0.01, &cfg(0)).unwrap();
        assert_eq!(gap.raw.v[0], Some(0.0));
        // Direct bookkeeping: the in-group pair holds 1 - 0.99^t when served at t.
        for (t, v) in gap.raw.defined() {
            assert_abs_diff_eq!(v, 1.0 - 0.99f64.powi(t as i32), epsilon = 1e-12);
        }
        let vals = gap.raw.defined_values();
        assert!(vals.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn gap_undefined_without_both_classes() {
        let pop = population(1, 3);
        let graph = crate::netgen::complete_graph(4).unwrap();
        let mut b = LogBuilder::new(2);
        b.serve(0, 2, 1, Topic::Professional, true);
        let gap = interaction_gap(&b.log, &pop, &graph, 0.01, &cfg(0)).unwrap();
        assert_eq!(gap.raw.v, vec![None, None]);
    }

    #[test]
    fn topic_shares_by_receiver() {
        let pop = population(2, 3);
        let mut b = LogBuilder::new(2);
        b.serve(0, 0, 1, Topic::Marginal, false); // min -> min
        b.serve(0, 1, 2, Topic::Marginal, false); // min -> maj
        b.serve(0, 3, 4, Topic::Marginal, false); // maj -> maj
        b.serve(1, 4, 0, Topic::Mainstream, false); // maj -> min
        let all = minority_share_by_topic(&b.log, &pop, ReceiverFilter::All, 0);
        let marginal = all[Topic::Marginal.index()];
        assert_eq!(marginal.share_minority_created, Some(2.0 / 3.0));
        assert_eq!(marginal.creation_share_minority, Some(2.0 / 3.0));
        assert_eq!(all[Topic::Professional.index()].share_minority_created, None);
        let to_maj = minority_share_by_topic(&b.log, &pop, ReceiverFilter::Majority, 0);
        assert_eq!(to_maj[Topic::Marginal.index()].share_minority_created, Some(0.5));
        let to_min = minority_share_by_topic(&b.log, &pop, ReceiverFilter::Minority, 0);
        assert_eq!(to_min[Topic::Marginal.index()].share_minority_created, Some(1.0));
        assert_eq!(to_min[Topic::Mainstream.index()].share_minority_created, Some(0.0));
        for row in all.iter().chain(&to_maj).chain(&to_min) {
            for s in [row.share_minority_created, row.creation_share_minority].into_iter().flatten() {
                assert!((0.0..=1.0).contains(&s));
            }
        }
    }

    #[test]
    fn per_user_rows_and_isolates() {
        let pop = population(2, 2);
        // User 1 is a minority isolate; user 0 is followed by majority user 2.
        let graph = DirectedGraph::from_edges(4, [(2, 0), (3, 2), (0, 3)]).unwrap();
        let mut b = LogBuilder::new(1);
        b.serve(0, 0, 2, Topic::Professional, true);
        let rows = per_user_cross_group_visibility(&b.log, &pop, &graph, 0);
        assert_eq!(rows.len(), 2);
        assert_eq!((rows[0].prof_recs_to_majority, rows[0].majority_followers, rows[0].majority_following), (1, 1, 1));
        assert_eq!((rows[1].prof_recs_to_majority, rows[1].majority_followers, rows[1].majority_following), (0, 0, 0));
        assert_eq!(cross_group_delivery_share(&rows), Some(1.0));
        assert_eq!((rows[0].prof_items_created, rows[0].prof_recs_to_majority_per_item), (1, Some(1.0)));
        assert_eq!((rows[1].prof_items_created, rows[1].prof_recs_to_majority_per_item), (0, None));
    }

    #[test]
    fn per_item_correlations_skip_users_without_items() {
        let row = |followers: usize, recs: u64, items: u64| PerUserRow {
            user_id: 0,
            prof_recs_to_majority: recs,
            prof_recs_total: recs,
            prof_items_created: items,
            prof_recs_to_majority_per_item: (items > 0).then(|| recs as f64 / items as f64),
            majority_followers: followers,
            majority_following: followers,
            z_professional: followers as f64,
            z_mainstream: -(followers as f64),
            z_marginal: 1.0 + followers as f64,
        };
        // Per item: (1, 1), (2, 2), (3, 3); the itemless user would break linearity.
        let rows = [row(1, 2, 2), row(2, 4, 2), row(3, 3, 1), row(4, 0, 0)];
        let per_item = per_user_correlations(&rows, PerUserResponse::RecsPerItem);
        let r = per_item[0].1.as_ref().unwrap();
        assert_eq!((per_item[0].0, r.n), ("majority_followers", 3));
        assert_abs_diff_eq!(r.rho, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(per_item[3].1.as_ref().unwrap().rho, -1.0, epsilon = 1e-12);
        let total = per_user_correlations(&rows, PerUserResponse::RecsTotal);
        assert_eq!(total[0].1.as_ref().unwrap().n, 4);
        assert!(total[0].1.as_ref().unwrap().rho < 0.0);
    }

    #[test]
    fn recs_vs_in_degree_flags_degenerate_fits() {
        let pop = population(2, 2);
        let graph = crate::netgen::complete_graph(4).unwrap();
        let mut b = LogBuilder::new(1);
        b.serve(0, 0, 2, Topic::Professional, false);
        b.serve(0, 1, 2, Topic::Professional, false);
        let out = recs_vs_incoming_edges(&b.log, &pop, &graph, 0);
        assert_eq!(out.rows.len(), 2);
        assert!(out.fits.iter().all(|f| f.line.is_none()));
    }
}
