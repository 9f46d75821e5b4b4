//! Aggregation of post-level signals into unit/time indicators.
//!
//! Three indicator families:
//! * plain means of numeric signals per unit and bin,
//! * a user-balanced acceptance index: each user contributes one balance
//!   score `(P - N) / (P + N)` over their positive/negative posts, and the
//!   unit indicator is the mean over opinionated users (so highly active
//!   accounts carry no extra weight),
//! * damage indices: means of four-level ordinal damage codes.
//!
//! Bins below the configured minimum user count are emitted suppressed
//! rather than dropped, and a convergence detector locates the time at which
//! a cumulative indicator stabilizes.

mod convergence;
mod io;
mod vai;

pub use convergence::detect_convergence;
pub use io::{read_signals_csv, write_indicators_csv};
pub use vai::{compute_vai, national_vai, user_balance, vai_series, StanceLabel, VaiConfig};

use std::collections::BTreeMap;
use std::str::FromStr;

use chrono::{DateTime, TimeZone, Utc};
use thiserror::Error;

/// Errors raised by aggregation operations.
#[derive(Debug, Error)]
pub enum AggregateError {
    #[error("numeric aggregation over labels")]
    LabelsNotNumeric,
    #[error("records span multiple units or bins")]
    MixedGroup,
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed signal csv at line {line}: {message}")]
    MalformedCsv { line: usize, message: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// A left-closed UTC time bin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimeBin {
    pub start: DateTime<Utc>,
    pub width_secs: u64,
}

impl TimeBin {
    pub fn new(start: DateTime<Utc>, width_secs: u64) -> Self {
        assert!(width_secs > 0, "bin width must be positive");
        Self { start, width_secs }
    }

    pub fn end(&self) -> DateTime<Utc> {
        self.start + chrono::Duration::seconds(self.width_secs as i64)
    }

    pub fn contains(&self, t: DateTime<Utc>) -> bool {
        t >= self.start && t < self.end()
    }
}

/// The bin of width `width_secs` containing `t`, with bins anchored at the
/// Unix epoch.
pub fn epoch_bin(t: DateTime<Utc>, width_secs: u64) -> TimeBin {
    let w = width_secs as i64;
    let secs = t.timestamp().div_euclid(w) * w;
    TimeBin::new(Utc.timestamp_opt(secs, 0).unwrap(), width_secs)
}

/// A numeric value or a categorical label; exactly one is set.
#[derive(Debug, Clone, PartialEq)]
pub enum SignalValue {
    Numeric(f64),
    Label(String),
}

/// One extracted analytic value bound to a post, user, unit, and bin.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalRecord {
    pub post_id: String,
    pub author_id: String,
    pub unit_id: String,
    pub bin: TimeBin,
    pub value: SignalValue,
}

/// One bin of an indicator series. `suppressed` implies the indicator is
/// absent.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorPoint {
    pub bin: TimeBin,
    pub indicator: Option<f64>,
    pub n_posts: usize,
    pub n_users: usize,
    pub suppressed: bool,
}

/// Per-unit indicator series with strictly increasing bins.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorSeries {
    pub unit_id: String,
    pub bins: Vec<IndicatorPoint>,
}

/// Mean of numeric signals for one (unit, bin) group. Returns `Ok(None)`
/// for an empty group — no bin is emitted, never a zero.
pub fn aggregate_mean(records: &[SignalRecord]) -> Result<Option<(f64, usize)>, AggregateError> {
    if records.is_empty() {
        return Ok(None);
    }
    let (unit, bin) = (&records[0].unit_id, records[0].bin);
    let mut sum = 0.0;
    for r in records {
        if &r.unit_id != unit || r.bin != bin {
            return Err(AggregateError::MixedGroup);
        }
        match &r.value {
            SignalValue::Numeric(v) => sum += v,
            SignalValue::Label(_) => return Err(AggregateError::LabelsNotNumeric),
        }
    }
    Ok(Some((sum / records.len() as f64, records.len())))
}

/// Groups records by unit and bin, applying `aggregate_mean` per group.
pub fn mean_series(records: &[SignalRecord]) -> Result<Vec<IndicatorSeries>, AggregateError> {
    let mut groups: BTreeMap<(String, TimeBin), Vec<&SignalRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.unit_id.clone(), r.bin))
            .or_default()
            .push(r);
    }

    let mut series: BTreeMap<String, Vec<IndicatorPoint>> = BTreeMap::new();
    for ((unit, bin), group) in groups {
        let owned: Vec<SignalRecord> = group.into_iter().cloned().collect();
        if let Some((mean, n)) = aggregate_mean(&owned)? {
            let users: std::collections::BTreeSet<&str> =
                owned.iter().map(|r| r.author_id.as_str()).collect();
            series.entry(unit).or_default().push(IndicatorPoint {
                bin,
                indicator: Some(mean),
                n_posts: n,
                n_users: users.len(),
                suppressed: false,
            });
        }
    }

    Ok(series
        .into_iter()
        .map(|(unit_id, bins)| IndicatorSeries { unit_id, bins })
        .collect())
}

/// The four-level damage scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum DamageLabel {
    NoDamage = 0,
    SlightDamage = 1,
    ModerateDamage = 2,
    SevereDamage = 3,
}

impl DamageLabel {
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DamageLabel::NoDamage => "no_damage",
            DamageLabel::SlightDamage => "slight_damage",
            DamageLabel::ModerateDamage => "moderate_damage",
            DamageLabel::SevereDamage => "severe_damage",
        }
    }
}

impl FromStr for DamageLabel {
    type Err = AggregateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "no_damage" => Ok(DamageLabel::NoDamage),
            "slight_damage" => Ok(DamageLabel::SlightDamage),
            "moderate_damage" => Ok(DamageLabel::ModerateDamage),
            "severe_damage" => Ok(DamageLabel::SevereDamage),
            other => Err(AggregateError::UnknownLabel(other.to_string())),
        }
    }
}

/// Mean damage code over a (unit, bin) group; `None` for an empty group.
/// Always lies in [0, 3].
pub fn damage_index(labels: &[DamageLabel]) -> Option<f64> {
    if labels.is_empty() {
        return None;
    }
    let sum: u32 = labels.iter().map(|l| l.code() as u32).sum();
    Some(sum as f64 / labels.len() as f64)
}

/// Damage index series per unit and bin, parsing labels from records.
pub fn damage_series(records: &[SignalRecord]) -> Result<Vec<IndicatorSeries>, AggregateError> {
    let mut groups: BTreeMap<(String, TimeBin), Vec<DamageLabel>> = BTreeMap::new();
    let mut counts: BTreeMap<(String, TimeBin), (usize, std::collections::BTreeSet<String>)> =
        BTreeMap::new();
    for r in records {
        let label = match &r.value {
            SignalValue::Label(l) => l.parse::<DamageLabel>()?,
            SignalValue::Numeric(_) => {
                return Err(AggregateError::UnknownLabel("<numeric>".to_string()))
            }
        };
        let key = (r.unit_id.clone(), r.bin);
        groups.entry(key.clone()).or_default().push(label);
        let c = counts.entry(key).or_default();
        c.0 += 1;
        c.1.insert(r.author_id.clone());
    }

    let mut series: BTreeMap<String, Vec<IndicatorPoint>> = BTreeMap::new();
    for ((unit, bin), labels) in groups {
        if let Some(index) = damage_index(&labels) {
            let (n_posts, users) = &counts[&(unit.clone(), bin)];
            series.entry(unit).or_default().push(IndicatorPoint {
                bin,
                indicator: Some(index),
                n_posts: *n_posts,
                n_users: users.len(),
                suppressed: false,
            });
        }
    }

    Ok(series
        .into_iter()
        .map(|(unit_id, bins)| IndicatorSeries { unit_id, bins })
        .collect())
}

/// Running mean of damage codes up to and including each bin, per unit.
/// This is the cumulative indicator the convergence detector consumes.
pub fn cumulative_damage_series(
    records: &[SignalRecord],
) -> Result<Vec<IndicatorSeries>, AggregateError> {
    let mut per_unit: BTreeMap<String, BTreeMap<TimeBin, Vec<DamageLabel>>> = BTreeMap::new();
    for r in records {
        let label = match &r.value {
            SignalValue::Label(l) => l.parse::<DamageLabel>()?,
            SignalValue::Numeric(_) => {
                return Err(AggregateError::UnknownLabel("<numeric>".to_string()))
            }
        };
        per_unit
            .entry(r.unit_id.clone())
            .or_default()
            .entry(r.bin)
            .or_default()
            .push(label);
    }

    let mut out = Vec::new();
    for (unit_id, by_bin) in per_unit {
        let mut sum = 0u64;
        let mut count = 0usize;
        let mut bins = Vec::new();
        for (bin, labels) in by_bin {
            sum += labels.iter().map(|l| l.code() as u64).sum::<u64>();
            count += labels.len();
            bins.push(IndicatorPoint {
                bin,
                indicator: Some(sum as f64 / count as f64),
                n_posts: count,
                n_users: 0,
                suppressed: false,
            });
        }
        out.push(IndicatorSeries { unit_id, bins });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(hour: u32) -> TimeBin {
        epoch_bin(
            Utc.with_ymd_and_hms(2021, 1, 1, hour, 30, 0).unwrap(),
            3600,
        )
    }

    fn numeric(post: &str, author: &str, unit: &str, hour: u32, v: f64) -> SignalRecord {
        SignalRecord {
            post_id: post.into(),
            author_id: author.into(),
            unit_id: unit.into(),
            bin: at(hour),
            value: SignalValue::Numeric(v),
        }
    }

    #[test]
    fn mean_of_symmetric_values_is_zero() {
        let records = vec![
            numeric("p1", "u1", "a", 0, 1.0),
            numeric("p2", "u2", "a", 0, 0.0),
            numeric("p3", "u3", "a", 0, -1.0),
        ];
        let (mean, n) = aggregate_mean(&records).unwrap().unwrap();
        assert_eq!(mean, 0.0);
        assert_eq!(n, 3);
    }

    #[test]
    fn single_value_is_identity() {
        let records = vec![numeric("p1", "u1", "a", 0, 0.7)];
        let (mean, n) = aggregate_mean(&records).unwrap().unwrap();
        assert_eq!(mean, 0.7);
        assert_eq!(n, 1);
    }

    #[test]
    fn labels_cannot_be_averaged() {
        let mut r = numeric("p1", "u1", "a", 0, 0.0);
        r.value = SignalValue::Label("positive".into());
        assert!(matches!(
            aggregate_mean(&[r]),
            Err(AggregateError::LabelsNotNumeric)
        ));
    }

    #[test]
    fn empty_group_emits_no_bin() {
        assert!(aggregate_mean(&[]).unwrap().is_none());
    }

    #[test]
    fn mixed_units_rejected() {
        let records = vec![numeric("p1", "u1", "a", 0, 1.0), numeric("p2", "u1", "b", 0, 1.0)];
        assert!(matches!(
            aggregate_mean(&records),
            Err(AggregateError::MixedGroup)
        ));
    }

    #[test]
    fn damage_index_means_codes() {
        use DamageLabel::*;
        assert_eq!(damage_index(&[SevereDamage, SevereDamage]), Some(3.0));
        assert_eq!(damage_index(&[NoDamage, ModerateDamage]), Some(1.0));
        assert_eq!(damage_index(&[]), None);
    }

    #[test]
    fn unknown_damage_label_is_an_error() {
        assert!(matches!(
            "catastrophic".parse::<DamageLabel>(),
            Err(AggregateError::UnknownLabel(_))
        ));
    }

    #[test]
    fn epoch_bins_are_left_closed() {
        let b = epoch_bin(Utc.with_ymd_and_hms(2021, 1, 1, 13, 59, 59).unwrap(), 3600);
        assert_eq!(b.start, Utc.with_ymd_and_hms(2021, 1, 1, 13, 0, 0).unwrap());
        assert!(b.contains(b.start));
        assert!(!b.contains(b.end()));
    }

    #[test]
    fn mean_series_groups_by_unit_and_bin() {
        let records = vec![
            numeric("p1", "u1", "a", 0, 1.0),
            numeric("p2", "u1", "a", 1, 0.5),
            numeric("p3", "u2", "b", 0, -1.0),
        ];
        let series = mean_series(&records).unwrap();
        assert_eq!(series.len(), 2);
        assert_eq!(series[0].unit_id, "a");
        assert_eq!(series[0].bins.len(), 2);
        assert_eq!(series[1].unit_id, "b");
        assert_eq!(series[1].bins[0].indicator, Some(-1.0));
    }

    #[test]
    fn cumulative_damage_is_running_mean() {
        let mk = |post: &str, hour: u32, label: &str| SignalRecord {
            post_id: post.into(),
            author_id: "u".into(),
            unit_id: "a".into(),
            bin: at(hour),
            value: SignalValue::Label(label.into()),
        };
        let records = vec![
            mk("p1", 0, "severe_damage"),
            mk("p2", 1, "no_damage"),
            mk("p3", 2, "moderate_damage"),
        ];
        let series = cumulative_damage_series(&records).unwrap();
        let values: Vec<f64> = series[0]
            .bins
            .iter()
            .map(|b| b.indicator.unwrap())
            .collect();
        assert_eq!(values, vec![3.0, 1.5, (3.0 + 0.0 + 2.0) / 3.0]);
    }
}
