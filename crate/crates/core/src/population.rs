//! Users, their group labels and group-conditioned topic preferences.

use std::io::{Read, Write};

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Floor applied to preference entries before they are used as probabilities.
pub const PREFERENCE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupId {
    Majority,
    Minority,
}

impl GroupId {
    pub const ALL: [GroupId; 2] = [GroupId::Majority, GroupId::Minority];

    pub fn index(self) -> usize {
        match self {
            GroupId::Majority => 0,
            GroupId::Minority => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GroupId::Majority => "majority",
            GroupId::Minority => "minority",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "majority" => Some(GroupId::Majority),
            "minority" => Some(GroupId::Minority),
            _ => None,
        }
    }
}

/// Content topics. The discriminant is the index into a preference vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
#[repr(u8)]
pub enum Topic {
    Professional = 0,
    Mainstream = 1,
    Marginal = 2,
}

impl Topic {
    pub const ALL: [Topic; 3] = [Topic::Professional, Topic::Mainstream, Topic::Marginal];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Topic::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Topic::Professional => "professional",
            Topic::Mainstream => "mainstream",
            Topic::Marginal => "marginal",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Topic::ALL.into_iter().find(|t| t.as_str() == s)
    }
}

/// Normal prior over the three topic preferences of one group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupPreferencePrior<T> {
    pub mu: [T; 3],
    pub sigma: T,
}

impl<T: Scalar> GroupPreferencePrior<T> {
    pub fn new(mu: [T; 3], sigma: T) -> Self {
        Self { mu, sigma }
    }

    /// Majority defaults: strong professional and mainstream interest.
    pub fn majority_default() -> Self {
        Self::new([T::lit(0.5), T::lit(0.4), T::lit(0.1)], T::lit(0.1))
    }

    /// Minority defaults: strong professional and marginal interest.
    pub fn minority_default() -> Self {
        Self::new([T::lit(0.5), T::lit(0.1), T::lit(0.4)], T::lit(0.1))
    }

    fn validate(&self, field: &str) -> Result<()> {
        if !(self.sigma > T::zero()) || !self.sigma.is_finite() {
            return Err(Error::config(
                format!("{field}.sigma"),
                format!("must be finite and > 0, got {}", self.sigma),
            ));
        }
        if self.mu.iter().any(|m| !m.is_finite()) {
            return Err(Error::config(format!("{field}.mu"), "entries must be finite"));
        }
        Ok(())
    }
}

/// Raw topic preferences `(professional, mainstream, marginal)`.
///
/// Raw values may be negative; they are used as-is for distances between
/// users and go through [`PreferenceVector::normalized`] wherever a
/// probability is needed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreferenceVector<T> {
    pub z: [T; 3],
}

impl<T: Scalar> PreferenceVector<T> {
    pub fn new(z: [T; 3]) -> Self {
        Self { z }
    }

    pub fn get(&self, topic: Topic) -> T {
        self.z[topic.index()]
    }

    /// Clamps entries below at [`PREFERENCE_FLOOR`] and rescales to sum to one.
    pub fn normalized(&self) -> [T; 3] {
        normalized_preferences(&self.z)
    }

    pub fn distance(&self, other: &Self) -> T {
        self.z
            .iter()
            .zip(other.z.iter())
            .map(|(&a, &b)| (a - b) * (a - b))
            .fold(T::zero(), |acc, d| acc + d)
            .sqrt()
    }
}

pub fn normalized_preferences<T: Scalar>(z: &[T; 3]) -> [T; 3] {
    let floor = T::lit(PREFERENCE_FLOOR);
    let clamped = z.map(|v| if v > floor { v } else { floor });
    let total = clamped[0] + clamped[1] + clamped[2];
    clamped.map(|v| v / total)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct PopulationConfig<T> {
    pub n: usize,
    pub minority_share: f64,
    pub majority: GroupPreferencePrior<T>,
    pub minority: GroupPreferencePrior<T>,
}

impl<T: Scalar> Default for PopulationConfig<T> {
    fn default() -> Self {
        Self {
            n: 1000,
            minority_share: 0.2,
            majority: GroupPreferencePrior::majority_default(),
            minority: GroupPreferencePrior::minority_default(),
        }
    }
}

impl<T: Scalar> PopulationConfig<T> {
    pub fn prior(&self, group: GroupId) -> &GroupPreferencePrior<T> {
        match group {
            GroupId::Majority => &self.majority,
            GroupId::Minority => &self.minority,
        }
    }

    /// `floor(n * minority_share)`, tolerant to representation error in the share.
    pub fn minority_count(&self) -> usize {
        (self.n as f64 * self.minority_share + 1e-9).floor() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::config("population.n", format!("need at least 2 users, got {}", self.n)));
        }
        if !(0.0..1.0).contains(&self.minority_share) {
            return Err(Error::config(
                "population.minority_share",
                format!("must lie in [0, 1), got {}", self.minority_share),
            ));
        }
        let minority = self.minority_count();
        if minority < 1 {
            return Err(Error::config(
                "population.minority_share",
                format!("floor(n * share) must be >= 1, got {minority}"),
            ));
        }
        if self.n - minority < minority {
            return Err(Error::config(
                "population.minority_share",
                format!("minority ({minority}) may not outnumber majority ({})", self.n - minority),
            ));
        }
        self.majority.validate("population.majority")?;
        self.minority.validate("population.minority")?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UserProfile<T> {
    pub id: usize,
    pub group: GroupId,
    pub preferences: PreferenceVector<T>,
}

/// Users `0..n`; the first `minority_count` ids are the minority group.
#[derive(Debug, Clone, PartialEq)]
pub struct Population<T> {
    users: Vec<UserProfile<T>>,
    minority_count: usize,
}

impl<T: Scalar> Population<T> {
    /// Builds a population from explicit profiles. Ids must be `0..n` in order
    /// and minority users must form a prefix.
    pub fn from_users(users: Vec<UserProfile<T>>) -> Result<Self> {
        let minority_count = users.iter().take_while(|u| u.group == GroupId::Minority).count();
        for (i, u) in users.iter().enumerate() {
            if u.id != i {
                return Err(Error::Integrity(format!("user at position {i} has id {}", u.id)));
            }
            if i >= minority_count && u.group == GroupId::Minority {
                return Err(Error::Integrity(format!("minority user {i} outside the minority id prefix")));
            }
        }
        Ok(Self { users, minority_count })
    }

    pub fn len(&self) -> usize {
        self.users.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }

    pub fn users(&self) -> &[UserProfile<T>] {
        &self.users
    }

    pub fn user(&self, id: usize) -> &UserProfile<T> {
        &self.users[id]
    }

    #[inline]
    pub fn group(&self, id: usize) -> GroupId {
        if id < self.minority_count {
            GroupId::Minority
        } else {
            GroupId::Majority
        }
    }

    pub fn group_size(&self, group: GroupId) -> usize {
        match group {
            GroupId::Minority => self.minority_count,
            GroupId::Majority => self.users.len() - self.minority_count,
        }
    }

    pub fn minority_count(&self) -> usize {
        self.minority_count
    }

    pub fn members(&self, group: GroupId) -> std::ops::Range<usize> {
        match group {
            GroupId::Minority => 0..self.minority_count,
            GroupId::Majority => self.minority_count..self.users.len(),
        }
    }

    /// Clamp-normalized preference vectors, indexed by user id.
    pub fn normalized_preferences(&self) -> Vec<[T; 3]> {
        self.users.iter().map(|u| u.preferences.normalized()).collect()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(writer);
        w.write_record(["user_id", "group", "z_professional", "z_mainstream", "z_marginal"])?;
        for u in &self.users {
            let z = u.preferences.z;
            w.write_record([
                u.id.to_string(),
                u.group.as_str().to_string(),
                z[0].to_string(),
                z[1].to_string(),
                z[2].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let mut users = Vec::new();
        for (row, record) in r.records().enumerate() {
            let record = record.map_err(|e| Error::Integrity(format!("population row {row}: {e}")))?;
            let bad = |what: &str| Error::Integrity(format!("population row {row}: bad {what}"));
            let field = |i: usize| record.get(i).ok_or_else(|| bad("column count"));
            let id: usize = field(0)?.parse().map_err(|_| bad("user_id"))?;
            let group = GroupId::parse(field(1)?).ok_or_else(|| bad("group"))?;
            let mut z = [T::zero(); 3];
            for (k, slot) in z.iter_mut().enumerate() {
                let v: f64 = field(2 + k)?.parse().map_err(|_| bad("preference"))?;
                *slot = T::lit(v);
            }
            users.push(UserProfile {
                id,
                group,
                preferences: PreferenceVector::new(z),
            });
        }
        Self::from_users(users)
    }
}

/// Draws a population: group labels are assigned by id prefix, each preference
/// entry is an independent normal draw from the user's group prior.
pub fn sample_population<T: Scalar, R: Rng + ?Sized>(config: &PopulationConfig<T>, rng: &mut R) -> Result<Population<T>> {
    config.validate()?;
    let minority_count = config.minority_count();
    let normals: Vec<[Normal<f64>; 3]> = GroupId::ALL
        .iter()
        .map(|&g| {
            let prior = config.prior(g);
            prior
                .mu
                .map(|m| Normal::new(m.as_f64(), prior.sigma.as_f64()).expect("validated prior"))
        })
        .collect();

    let users = (0..config.n)
        .map(|id| {
            let group = if id < minority_count { GroupId::Minority } else { GroupId::Majority };
            let dists = &normals[group.index()];
            let z = [
                T::lit(dists[0].sample(rng)),
                T::lit(dists[1].sample(rng)),
                T::lit(dists[2].sample(rng)),
            ];
            UserProfile {
                id,
                group,
                preferences: PreferenceVector::new(z),
            }
        })
        .collect();
    Ok(Population { users, minority_count })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn default_cfg(n: usize, share: f64) -> PopulationConfig<f64> {
        PopulationConfig {
            n,
            minority_share: share,
            ..PopulationConfig::default()
        }
    }

    #[test]
    fn defaults_give_exact_group_sizes_and_means() {
        let pop = sample_population(&default_cfg(1000, 0.2), &mut stream(7, Stream::Population)).unwrap();
        assert_eq!(pop.group_size(GroupId::Minority), 200);
        assert_eq!(pop.group_size(GroupId::Majority), 800);
        let mean_mainstream: f64 = pop.members(GroupId::Minority).map(|i| pop.user(i).preferences.z[1]).sum::<f64>() / 200.0;
        assert!((mean_mainstream - 0.1).abs() < 0.02, "{mean_mainstream}");
        assert!(pop.users()[..200].iter().all(|u| u.group == GroupId::Minority));
    }

    #[test]
    fn degenerate_sigma_reproduces_means() {
        let mut cfg = default_cfg(50, 0.2);
        cfg.minority.sigma = 1e-9;
        let pop = sample_population(&cfg, &mut stream(1, Stream::Population)).unwrap();
        for i in pop.members(GroupId::Minority) {
            for (got, want) in pop.user(i).preferences.z.iter().zip([0.5, 0.1, 0.4]) {
                assert_abs_diff_eq!(*got, want, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn same_seed_same_population() {
        let cfg = default_cfg(300, 0.2);
        let a = sample_population(&cfg, &mut stream(42, Stream::Population)).unwrap();
        let b = sample_population(&cfg, &mut stream(42, Stream::Population)).unwrap();
        assert_eq!(a, b);
        let c = sample_population(&cfg, &mut stream(43, Stream::Population)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn sample_means_within_four_sigma_band() {
        let pop = sample_population(&default_cfg(10_000, 0.2), &mut stream(3, Stream::Population)).unwrap();
        for g in GroupId::ALL {
            let size = pop.group_size(g) as f64;
            let prior = default_cfg(10, 0.2).prior(g).clone();
            for k in 0..3 {
                let mean = pop.members(g).map(|i| pop.user(i).preferences.z[k]).sum::<f64>() / size;
                assert!((mean - prior.mu[k]).abs() < 4.0 * prior.sigma / size.sqrt());
            }
        }
    }

    #[test]
    fn invalid_configs_are_rejected() {
        assert!(matches!(default_cfg(1, 0.2).validate(), Err(Error::Config { .. })));
        assert!(default_cfg(4, 0.2).validate().is_err()); // floor(0.8) = 0
        assert!(default_cfg(10, 0.6).validate().is_err());
        assert!(default_cfg(10, 1.0).validate().is_err());
        let mut cfg = default_cfg(10, 0.2);
        cfg.majority.sigma = 0.0;
        assert!(cfg.validate().is_err());
        assert!(default_cfg(10, 0.5).validate().is_ok());
    }

    #[test]
    fn normalization_examples() {
        let n = normalized_preferences(&[0.5, 0.4, 0.1]);
        for (a, b) in n.iter().zip([0.5, 0.4, 0.1]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
        let n = normalized_preferences(&[1.0, 1.0, 2.0]);
        assert_eq!(n, [0.25, 0.25, 0.5]);
        let n = normalized_preferences(&[-0.2, 0.3, 0.9]);
        let total = 1.2 + PREFERENCE_FLOOR;
        assert_abs_diff_eq!(n[0], PREFERENCE_FLOOR / total, epsilon = 1e-15);
        assert_abs_diff_eq!(n[0], 8.333326e-7, epsilon = 1e-12);
        assert_abs_diff_eq!(n[1], 0.3 / total, epsilon = 1e-15);
        assert_abs_diff_eq!(n[2], 0.9 / total, epsilon = 1e-15);
    }

    #[test]
    fn distance_is_euclidean() {
        let a = PreferenceVector::new([0.0, 0.0, 0.0]);
        let b = PreferenceVector::new([3.0, 4.0, 0.0]);
        assert_eq!(a.distance(&b), 5.0);
        assert_eq!(b.distance(&b), 0.0);
    }

    #[test]
    fn csv_round_trip() {
        let pop = sample_population(&default_cfg(20, 0.25), &mut stream(5, Stream::Population)).unwrap();
        let mut buf = Vec::new();
        pop.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("user_id,group,z_professional,z_mainstream,z_marginal\n0,minority,"));
        let back = Population::<f64>::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, pop);
    }

    #[test]
    fn works_in_single_precision() {
        let cfg = PopulationConfig::<f32>::default();
        let pop = sample_population(&cfg, &mut stream(1, Stream::Population)).unwrap();
        assert_eq!(pop.len(), 1000);
        let n = pop.user(0).preferences.normalized();
        assert!((n.iter().sum::<f32>() - 1.0).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn group_counts_exact(n in 2usize..5000, share in 0.0f64..0.5) {
            let cfg = default_cfg(n, share);
            prop_assume!(cfg.validate().is_ok());
            let pop = sample_population(&cfg, &mut stream(0, Stream::Population)).unwrap();
            prop_assert_eq!(pop.group_size(GroupId::Minority), (n as f64 * share + 1e-9).floor() as usize);
        }

        #[test]
        fn normalized_is_distribution_and_idempotent(z in prop::array::uniform3(-2.0f64..2.0)) {
            let p = normalized_preferences(&z);
            prop_assert!(p.iter().all(|&v| v > 0.0));
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn normalization_idempotent_on_distributions(w in prop::array::uniform3(1e-3f64..1.0)) {
            let total: f64 = w.iter().sum();
            let p = w.map(|v| v / total);
            let q = normalized_preferences(&p);
            for (a, b) in p.iter().zip(q.iter()) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
