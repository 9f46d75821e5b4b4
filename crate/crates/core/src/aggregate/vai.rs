//! User-balanced acceptance index over stance labels.
//!
//! Each user's score is the balance `(P - N) / (P + N)` of their positive
//! and negative posts in a (unit, bin) window; users with no positive or
//! negative post have no opinion and are excluded. The unit indicator is the
//! mean balance over opinionated users, suppressed when fewer than
//! `min_users` contribute.

use std::collections::BTreeMap;
use std::str::FromStr;

use super::{
    AggregateError, IndicatorPoint, IndicatorSeries, SignalRecord, SignalValue, TimeBin,
};

/// Stance of a post toward the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StanceLabel {
    Positive,
    Negative,
    Unrelated,
}

impl StanceLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            StanceLabel::Positive => "positive",
            StanceLabel::Negative => "negative",
            StanceLabel::Unrelated => "unrelated",
        }
    }
}

impl FromStr for StanceLabel {
    type Err = AggregateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "positive" => Ok(StanceLabel::Positive),
            "negative" => Ok(StanceLabel::Negative),
            "unrelated" => Ok(StanceLabel::Unrelated),
            other => Err(AggregateError::UnknownLabel(other.to_string())),
        }
    }
}

/// Index configuration. `min_users` is the suppression floor; indicators
/// always lie on [-1, 1].
#[derive(Debug, Clone, Copy)]
pub struct VaiConfig {
    pub min_users: usize,
}

impl Default for VaiConfig {
    fn default() -> Self {
        // A conventional small-sample floor; configurable per run.
        Self { min_users: 30 }
    }
}

/// Balance `(P - N) / (P + N)` over one user's stance labels; `None` when
/// the user posted nothing positive or negative ("no-opinion").
pub fn user_balance(labels: &[StanceLabel]) -> Option<f64> {
    let p = labels
        .iter()
        .filter(|&&l| l == StanceLabel::Positive)
        .count() as f64;
    let n = labels
        .iter()
        .filter(|&&l| l == StanceLabel::Negative)
        .count() as f64;
    if p + n == 0.0 {
        None
    } else {
        Some((p - n) / (p + n))
    }
}

fn stance_of(record: &SignalRecord) -> Result<StanceLabel, AggregateError> {
    match &record.value {
        SignalValue::Label(l) => l.parse(),
        SignalValue::Numeric(_) => Err(AggregateError::UnknownLabel("<numeric>".to_string())),
    }
}

/// Index for one (unit, bin) group of stance records. Bins with fewer
/// opinionated users than `cfg.min_users` are emitted suppressed.
pub fn compute_vai(
    records: &[SignalRecord],
    cfg: &VaiConfig,
) -> Result<Option<IndicatorPoint>, AggregateError> {
    if records.is_empty() {
        return Ok(None);
    }
    let bin = records[0].bin;
    let mut per_user: BTreeMap<&str, Vec<StanceLabel>> = BTreeMap::new();
    for r in records {
        if r.bin != bin || r.unit_id != records[0].unit_id {
            return Err(AggregateError::MixedGroup);
        }
        per_user.entry(&r.author_id).or_default().push(stance_of(r)?);
    }

    let balances: Vec<f64> = per_user
        .values()
        .filter_map(|labels| user_balance(labels))
        .collect();
    let n_users = balances.len();
    let suppressed = n_users < cfg.min_users;
    let indicator = if suppressed || n_users == 0 {
        None
    } else {
        Some(balances.iter().sum::<f64>() / n_users as f64)
    };

    Ok(Some(IndicatorPoint {
        bin,
        indicator,
        n_posts: records.len(),
        n_users,
        suppressed,
    }))
}

/// Index series per unit, grouping stance records by (unit, bin).
pub fn vai_series(
    records: &[SignalRecord],
    cfg: &VaiConfig,
) -> Result<Vec<IndicatorSeries>, AggregateError> {
    let mut groups: BTreeMap<(String, TimeBin), Vec<SignalRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.unit_id.clone(), r.bin))
            .or_default()
            .push(r.clone());
    }

    let mut series: BTreeMap<String, Vec<IndicatorPoint>> = BTreeMap::new();
    for ((unit, _), group) in groups {
        if let Some(point) = compute_vai(&group, cfg)? {
            series.entry(unit).or_default().push(point);
        }
    }

    Ok(series
        .into_iter()
        .map(|(unit_id, bins)| IndicatorSeries { unit_id, bins })
        .collect())
}

/// Pooled index over all units for one bin: the same computation with every
/// unit's users merged.
pub fn national_vai(
    records: &[SignalRecord],
    cfg: &VaiConfig,
    bin: TimeBin,
) -> Result<Option<IndicatorPoint>, AggregateError> {
    let pooled: Vec<SignalRecord> = records
        .iter()
        .filter(|r| r.bin == bin)
        .map(|r| SignalRecord {
            unit_id: "<national>".to_string(),
            ..r.clone()
        })
        .collect();
    compute_vai(&pooled, cfg)
}
