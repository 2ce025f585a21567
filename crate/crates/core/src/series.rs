//! Time-series container, price ingestion and the trading-day calendar.

use std::io::Read;
use std::ops::Range;

use chrono::{NaiveDate, NaiveDateTime, NaiveTime};

use crate::error::{Error, Result};

/// Uniformly sampled real-valued series.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    dt: f64,
    label: String,
}

impl TimeSeries {
    /// Builds a series, rejecting non-finite samples.
    pub fn new(values: Vec<f64>, dt: f64, label: impl Into<String>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        Ok(Self {
            values,
            dt,
            label: label.into(),
        })
    }

    /// Unit-spaced series, as produced by the simulators.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        Self::new(values, 1.0, "")
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Multiplies every sample by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.values.iter().map(|v| v * factor).collect(),
            self.dt,
            self.label.clone(),
        )
    }
}

/// First differences of a series; length `T - 1`.
pub fn log_returns(ts: &TimeSeries) -> Result<TimeSeries> {
    if ts.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: ts.len(),
        });
    }
    let diffs = ts.values.windows(2).map(|w| w[1] - w[0]).collect();
    TimeSeries::new(diffs, ts.dt, ts.label.clone())
}

/// One trading day: its sample range in the series and its sessions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TradingDay {
    pub id: String,
    pub range: Range<usize>,
    /// Session ranges in series coordinates; two entries when the market
    /// breaks for lunch.
    pub sessions: Vec<Range<usize>>,
}

impl TradingDay {
    pub fn len(&self) -> usize {
        self.range.len()
    }

    pub fn is_empty(&self) -> bool {
        self.range.is_empty()
    }
}

/// Partition of a series into trading days.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TradingCalendar {
    pub days: Vec<TradingDay>,
    pub sessions_per_day: usize,
    /// Non-fatal irregularities found while building the calendar.
    pub warnings: Vec<String>,
    /// Samples synthesised by carrying the last price forward.
    pub filled_samples: usize,
}

impl TradingCalendar {
    /// `n_days` contiguous single-session days of `day_len` samples each.
    pub fn uniform(n_days: usize, day_len: usize) -> Self {
        let days = (0..n_days)
            .map(|d| {
                let range = d * day_len..(d + 1) * day_len;
                TradingDay {
                    id: format!("day{d}"),
                    sessions: vec![range.clone()],
                    range,
                }
            })
            .collect();
        Self {
            days,
            sessions_per_day: 1,
            warnings: Vec::new(),
            filled_samples: 0,
        }
    }

    /// Total number of samples covered.
    pub fn coverage(&self) -> usize {
        self.days.last().map_or(0, |d| d.range.end)
    }

    /// Longest day, in samples.
    pub fn max_day_len(&self) -> usize {
        self.days.iter().map(TradingDay::len).max().unwrap_or(0)
    }

    /// Intraday column where the afternoon session starts, if the market has
    /// a lunch break.
    pub fn lunch_break_column(&self) -> Option<usize> {
        self.days
            .iter()
            .find(|d| d.sessions.len() > 1)
            .map(|d| d.sessions[1].start - d.range.start)
    }

    /// Checks that day ranges are ordered, disjoint and cover `[0, len)`.
    pub fn validate(&self, len: usize) -> Result<()> {
        let mut next = 0;
        for day in &self.days {
            if day.range.start != next || day.range.end < day.range.start {
                return Err(Error::LengthMismatch(format!(
                    "day {} starts at {} but previous day ended at {next}",
                    day.id, day.range.start
                )));
            }
            next = day.range.end;
        }
        if next != len {
            return Err(Error::LengthMismatch(format!(
                "calendar covers {next} samples, series has {len}"
            )));
        }
        Ok(())
    }
}

/// Column layout of a price file.
#[derive(Debug, Clone)]
pub struct PriceSchema {
    pub date_col: String,
    pub time_col: String,
    pub price_col: String,
    pub delimiter: u8,
    /// Nominal bar spacing. Gaps up to `session_gap_secs` are forward-filled
    /// at this spacing; `None` disables filling.
    pub sample_interval_secs: Option<i64>,
    /// A gap longer than this within one date starts a new session.
    pub session_gap_secs: i64,
}

impl Default for PriceSchema {
    fn default() -> Self {
        Self {
            date_col: "date".into(),
            time_col: "time".into(),
            price_col: "price".into(),
            delimiter: b',',
            sample_interval_secs: Some(30),
            session_gap_secs: 1800,
        }
    }
}

const DATE_FORMATS: &[&str] = &["%Y-%m-%d", "%Y%m%d", "%Y/%m/%d", "%m/%d/%Y", "%d.%m.%Y"];
const TIME_FORMATS: &[&str] = &["%H:%M:%S", "%H:%M", "%H%M%S", "%H:%M:%S%.f"];

fn parse_date(s: &str) -> Option<NaiveDate> {
    DATE_FORMATS.iter().find_map(|f| NaiveDate::parse_from_str(s, f).ok())
}

fn parse_time(s: &str) -> Option<NaiveTime> {
    TIME_FORMATS.iter().find_map(|f| NaiveTime::parse_from_str(s, f).ok())
}

/// Reads `(date, time, price)` rows and returns log-prices with their
/// calendar. Row numbers in errors count data rows from 1.
pub fn ingest_prices<R: Read>(source: R, schema: &PriceSchema) -> Result<(TimeSeries, TradingCalendar)> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(source);

    let headers = reader.headers()?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::InvalidParameter(format!("missing column '{name}'")))
    };
    let date_idx = column(&schema.date_col)?;
    let time_idx = column(&schema.time_col)?;
    let price_idx = column(&schema.price_col)?;

    let mut values: Vec<f64> = Vec::new();
    let mut days: Vec<TradingDay> = Vec::new();
    let mut filled = 0usize;
    let mut last: Option<(NaiveDateTime, f64)> = None;

    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record?;
        let field = |idx: usize| record.get(idx).unwrap_or("");
        let bad = |message: String| Error::Row { row, message };

        let date = parse_date(field(date_idx)).ok_or_else(|| bad(format!("unparseable date '{}'", field(date_idx))))?;
        let time = parse_time(field(time_idx)).ok_or_else(|| bad(format!("unparseable time '{}'", field(time_idx))))?;
        let price: f64 = field(price_idx)
            .parse()
            .map_err(|_| bad(format!("unparseable price '{}'", field(price_idx))))?;
        if !(price.is_finite() && price > 0.0) {
            return Err(bad(format!("price must be positive, got {price}")));
        }
        let stamp = NaiveDateTime::new(date, time);
        let id = date.format("%Y-%m-%d").to_string();

        match last {
            Some((prev, _)) if stamp <= prev => {
                return Err(bad(format!("timestamp {stamp} not after previous {prev}")));
            }
            Some((prev, prev_price)) if prev.date() == date => {
                let gap = (stamp - prev).num_seconds();
                let day = days.last_mut().expect("day exists once a row was read");
                if gap > schema.session_gap_secs {
                    day.sessions.push(values.len()..values.len());
                } else if let Some(step) = schema.sample_interval_secs.filter(|&s| s > 0) {
                    let missing = ((gap as f64 / step as f64).round() as i64 - 1).max(0) as usize;
                    for _ in 0..missing {
                        values.push(prev_price.ln());
                    }
                    filled += missing;
                }
            }
            _ => {
                let start = values.len();
                let range = start..start;
                days.push(TradingDay {
                    id,
                    sessions: vec![range.clone()],
                    range,
                });
            }
        }

        values.push(price.ln());
        let day = days.last_mut().expect("day exists");
        day.range.end = values.len();
        day.sessions.last_mut().expect("session exists").end = values.len();
        last = Some((stamp, price));
    }

    let mut calendar = TradingCalendar {
        sessions_per_day: days.first().map_or(0, |d| d.sessions.len()),
        days,
        warnings: Vec::new(),
        filled_samples: filled,
    };
    if filled > 0 {
        calendar
            .warnings
            .push(format!("{filled} missing samples carried forward"));
    }
    let typical = calendar.days.first().map_or(0, TradingDay::len);
    for day in &calendar.days {
        if day.len() != typical {
            calendar.warnings.push(format!(
                "day {} has {} samples, first day has {typical}",
                day.id,
                day.len()
            ));
        }
        if day.sessions.len() != calendar.sessions_per_day {
            calendar.warnings.push(format!(
                "day {} has {} sessions, expected {}",
                day.id,
                day.sessions.len(),
                calendar.sessions_per_day
            ));
        }
    }

    Ok((
        TimeSeries::new(values, schema.sample_interval_secs.unwrap_or(1) as f64, "prices")?,
        calendar,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ingest(text: &str) -> Result<(TimeSeries, TradingCalendar)> {
        ingest_prices(text.as_bytes(), &PriceSchema::default())
    }

    #[test]
    fn constant_prices_single_day() {
        let (ts, cal) =
            ingest("date,time,price\n2014-01-15,09:30:00,100\n2014-01-15,09:30:30,100\n2014-01-15,09:31:00,100\n")
                .unwrap();
        assert_eq!(ts.values(), &[100f64.ln(); 3]);
        assert_eq!(cal.days.len(), 1);
        assert_eq!(cal.days[0].range, 0..3);
        assert!(cal.warnings.is_empty());
    }

    #[test]
    fn zero_price_names_row() {
        let mut text = String::from("date,time,price\n");
        for i in 0..10 {
            let p = if i == 6 { 0.0 } else { 100.0 + i as f64 };
            text.push_str(&format!("2014-01-15,09:{:02}:00,{p}\n", 30 + i));
        }
        let schema = PriceSchema {
            sample_interval_secs: Some(60),
            ..PriceSchema::default()
        };
        match ingest_prices(text.as_bytes(), &schema) {
            Err(Error::Row { row, .. }) => assert_eq!(row, 7),
            other => panic!("expected row error, got {other:?}"),
        }
    }

    #[test]
    fn unsorted_rows_rejected() {
        let err = ingest("date,time,price\n2014-01-15,09:30:30,100\n2014-01-15,09:30:00,101\n").unwrap_err();
        assert!(matches!(err, Error::Row { row: 2, .. }));
    }

    #[test]
    fn lunch_break_splits_sessions_and_gaps_fill() {
        let text = "date,time,price\n\
            2014-01-15,09:00:00,10\n\
            2014-01-15,09:00:30,11\n\
            2014-01-15,09:01:30,12\n\
            2014-01-15,12:30:00,13\n\
            2014-01-15,12:30:30,14\n\
            2014-01-16,09:00:00,15\n";
        let (ts, cal) = ingest(text).unwrap();
        // 09:01:00 is missing and carried forward from 11.
        assert_eq!(ts.len(), 7);
        assert_eq!(ts.values()[2], 11f64.ln());
        assert_eq!(cal.filled_samples, 1);
        assert_eq!(cal.days[0].sessions, vec![0..4, 4..6]);
        assert_eq!(cal.sessions_per_day, 2);
        assert_eq!(cal.lunch_break_column(), Some(4));
        assert!(cal.warnings.iter().any(|w| w.contains("2014-01-16")));
        cal.validate(ts.len()).unwrap();
    }

    #[test]
    fn sp500_layout_calendar() {
        // 105 days x 780 bars, 09:30:00 to 15:59:30.
        let mut text = String::from("Date;Time;Close\n");
        let start = NaiveDate::from_ymd_opt(2014, 1, 15).unwrap();
        for d in 0..105u64 {
            let date = start + chrono::Days::new(d);
            for bar in 0..780u32 {
                let secs = 9 * 3600 + 30 * 60 + 30 * bar;
                let t = NaiveTime::from_num_seconds_from_midnight_opt(secs, 0).unwrap();
                text.push_str(&format!("{date};{t};{}\n", 1800.0 + (bar % 7) as f64));
            }
        }
        let schema = PriceSchema {
            date_col: "Date".into(),
            time_col: "Time".into(),
            price_col: "Close".into(),
            delimiter: b';',
            ..PriceSchema::default()
        };
        let (ts, cal) = ingest_prices(text.as_bytes(), &schema).unwrap();
        assert_eq!(ts.len(), 81_900);
        assert_eq!(cal.days.len(), 105);
        assert!(cal.days.iter().all(|d| d.len() == 780));
        cal.validate(ts.len()).unwrap();
    }

    #[test]
    fn log_returns_examples() {
        let ts = TimeSeries::from_values(vec![0.0, 1.0, 3.0]).unwrap();
        assert_eq!(log_returns(&ts).unwrap().values(), &[1.0, 2.0]);
        let flat = TimeSeries::from_values(vec![4.0; 5]).unwrap();
        assert!(log_returns(&flat).unwrap().values().iter().all(|&v| v == 0.0));
        let one = TimeSeries::from_values(vec![1.0]).unwrap();
        assert!(log_returns(&one).is_err());
    }

    #[test]
    fn rejects_non_finite() {
        assert!(matches!(
            TimeSeries::from_values(vec![0.0, f64::NAN]),
            Err(Error::NonFinite(1))
        ));
    }
}
