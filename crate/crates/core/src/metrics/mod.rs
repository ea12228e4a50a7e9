//! Statistics computed from finished event logs.
//!
//! Every function here is a pure function of the log, the population, the
//! graph and a [`MetricsConfig`]; burn-in is applied here, never in the
//! engine.

mod aggregate;
pub mod stats;
mod visibility;

pub use aggregate::{mean_over_runs, trend_test, TrendTest};
pub use stats::{moving_average, ols, one_sample_t_test, pearson, CorrelationResult, Line, MeanTest};
pub use visibility::{
    cross_group_delivery_share, interaction_gap, GapSeries, minority_share_by_topic, per_user_correlations,
    per_user_cross_group_visibility, professional_rec_ratio, recs_vs_incoming_edges, PerUserResponse, PerUserRow, RatioSeries,
    ReceiverFilter, RecsVsInDegree, RecsVsInDegreeFit, RecsVsInDegreeRow, TopicShareRow, PER_USER_COVARIATES,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetricsConfig {
    pub burn_in: usize,
    pub ma_window_ratio: usize,
    pub ma_window_gap: usize,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self {
            burn_in: 2500,
            ma_window_ratio: 1000,
            ma_window_gap: 100,
        }
    }
}

impl MetricsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ma_window_ratio == 0 {
            return Err(Error::config("metrics.ma_window_ratio", "window must be >= 1"));
        }
        if self.ma_window_gap == 0 {
            return Err(Error::config("metrics.ma_window_gap", "window must be >= 1"));
        }
        Ok(())
    }
}

/// Values indexed by step; `None` marks a step where the statistic is
/// undefined (a zero denominator), never a silent zero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeSeries {
    pub t: Vec<usize>,
    pub v: Vec<Option<f64>>,
}

impl TimeSeries {
    pub fn new(t: Vec<usize>, v: Vec<Option<f64>>) -> Self {
        assert_eq!(t.len(), v.len(), "time series lengths differ");
        Self { t, v }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn defined(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.t.iter().zip(&self.v).filter_map(|(&t, v)| v.map(|v| (t, v)))
    }

    pub fn defined_values(&self) -> Vec<f64> {
        self.defined().map(|(_, v)| v).collect()
    }

    pub fn moving_average(&self, window: usize) -> TimeSeries {
        TimeSeries::new(self.t.clone(), moving_average(&self.v, window))
    }

    /// Mean of the defined points.
    pub fn mean(&self) -> Option<f64> {
        stats::mean(&self.defined_values())
    }

    /// OLS line of the defined points against step index.
    pub fn trend(&self) -> Result<Line<f64>> {
        let (x, y): (Vec<f64>, Vec<f64>) = self.defined().map(|(t, v)| (t as f64, v)).unzip();
        ols(&x, &y)
    }

    pub fn last_defined(&self) -> Option<f64> {
        self.v.iter().rev().find_map(|v| *v)
    }

    pub fn write_csv<W: std::io::Write>(&self, header: [&str; 2], writer: W) -> csv::Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(writer);
        w.write_record(header)?;
        for (t, v) in self.t.iter().zip(&self.v) {
            w.write_record([t.to_string(), v.map(|v| v.to_string()).unwrap_or_default()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let mut out = TimeSeries::default();
        for (row, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| Error::Integrity(format!("series row {row}: {e}")))?;
            let bad = || Error::Integrity(format!("series row {row}: malformed"));
            let t: usize = rec.get(0).ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let v = match rec.get(1).ok_or_else(bad)? {
                "" => None,
                s => Some(s.parse::<f64>().map_err(|_| bad())?),
            };
            out.t.push(t);
            out.v.push(v);
        }
        Ok(out)
    }
}
