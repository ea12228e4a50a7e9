use crate::error::{Error, Result};

use super::stats::{one_sample_t_test, MeanTest};
use super::TimeSeries;

/// Pointwise mean over runs of per-run series. Steps where a run is undefined
/// are averaged over the runs that are defined there.
pub fn mean_over_runs(series: &[TimeSeries]) -> Result<TimeSeries> {
    let Some(first) = series.first() else {
        return Ok(TimeSeries::default());
    };
    if series.iter().any(|s| s.t != first.t) {
        return Err(Error::Integrity("cannot average series over different steps".into()));
    }
    let v = (0..first.len())
        .map(|k| {
            let vals: Vec<f64> = series.iter().filter_map(|s| s.v[k]).collect();
            (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
        })
        .collect();
    Ok(TimeSeries::new(first.t.clone(), v))
}

/// Per-run OLS trend slopes and a two-sided one-sample t-test of their mean.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendTest {
    pub slopes: Vec<f64>,
    pub test: MeanTest<f64>,
}

impl TrendTest {
    pub fn significantly_negative(&self, level: f64) -> bool {
        self.test.mean < 0.0 && self.test.p_value < level
    }
}

pub fn trend_test(series: &[TimeSeries]) -> Result<TrendTest> {
    let slopes = series.iter().map(|s| s.trend().map(|l| l.slope)).collect::<Result<Vec<_>>>()?;
    let test = one_sample_t_test(&slopes)?;
    Ok(TrendTest { slopes, test })
}
