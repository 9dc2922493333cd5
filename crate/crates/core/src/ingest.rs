//! Comment records and time-window slicing.
//!
//! Input is JSON Lines, one comment per line:
//!
//! ```text
//! {"comment_id": "c1", "user_id": "u1", "video_id": "v1",
//!  "published_at": "2011-11-17T04:19:32Z", "text": "...", "spam_hint": false}
//! ```

use std::collections::HashSet;
use std::io::{BufRead, Write};

use chrono::{DateTime, Duration, SubsecRound, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("no valid records ({rejected} line(s) rejected)")]
    NoValidRecords { rejected: usize },
    #[error("invalid window spec: {0}")]
    InvalidWindowSpec(String),
    #[error("serialization error: {0}")]
    Serialize(#[from] serde_json::Error),
}

/// One posted comment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommentRecord {
    pub comment_id: String,
    pub user_id: String,
    pub video_id: String,
    #[serde(with = "rfc3339_seconds")]
    pub published_at: DateTime<Utc>,
    pub text: String,
    pub spam_hint: bool,
}

mod rfc3339_seconds {
    use chrono::{DateTime, SecondsFormat, SubsecRound, Utc};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(ts: &DateTime<Utc>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&ts.to_rfc3339_opts(SecondsFormat::Secs, true))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DateTime<Utc>, D::Error> {
        let raw = String::deserialize(d)?;
        super::parse_timestamp(&raw)
            .map(|ts| ts.trunc_subsecs(0))
            .map_err(serde::de::Error::custom)
    }
}

/// Parses an RFC 3339 timestamp and normalizes it to UTC.
pub fn parse_timestamp(raw: &str) -> Result<DateTime<Utc>, chrono::ParseError> {
    DateTime::parse_from_rfc3339(raw.trim()).map(|ts| ts.with_timezone(&Utc))
}

/// A line that could not be turned into a record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    /// 1-based line number.
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct ParsedComments {
    pub records: Vec<CommentRecord>,
    pub rejected: Vec<Rejection>,
}

/// Reads JSONL comment records in file order.
///
/// Malformed lines, lines with missing or empty required fields and
/// duplicate comment ids are collected as rejections. Fails only on I/O
/// errors or when no line yields a valid record.
pub fn parse_comments<R: BufRead>(source: R) -> Result<ParsedComments, IngestError> {
    let mut out = ParsedComments::default();
    let mut seen = HashSet::new();
    for (idx, line) in source.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let record: CommentRecord = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(e) => {
                out.rejected.push(Rejection { line: lineno, reason: e.to_string() });
                continue;
            }
        };
        let empty = [
            ("comment_id", &record.comment_id),
            ("user_id", &record.user_id),
            ("video_id", &record.video_id),
        ]
        .into_iter()
        .find(|(_, v)| v.is_empty());
        if let Some((field, _)) = empty {
            out.rejected.push(Rejection { line: lineno, reason: format!("empty field `{field}`") });
            continue;
        }
        if !seen.insert(record.comment_id.clone()) {
            out.rejected.push(Rejection {
                line: lineno,
                reason: format!("duplicate comment_id `{}`", record.comment_id),
            });
            continue;
        }
        out.records.push(record);
    }
    if out.records.is_empty() {
        return Err(IngestError::NoValidRecords { rejected: out.rejected.len() });
    }
    Ok(out)
}

/// Writes records back out as JSONL.
pub fn write_comments<W: Write>(records: &[CommentRecord], mut sink: W) -> Result<(), IngestError> {
    for r in records {
        serde_json::to_writer(&mut sink, r)?;
        sink.write_all(b"\n")?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowSpec {
    pub start: DateTime<Utc>,
    pub window_length: Duration,
    pub window_count: usize,
}

impl WindowSpec {
    pub const DEFAULT_HOURS: i64 = 6;
    pub const DEFAULT_COUNT: usize = 12;

    pub fn new(start: DateTime<Utc>, window_length: Duration, window_count: usize) -> Result<Self, IngestError> {
        if window_length <= Duration::zero() {
            return Err(IngestError::InvalidWindowSpec("window length must be positive".into()));
        }
        if window_count == 0 {
            return Err(IngestError::InvalidWindowSpec("window count must be at least 1".into()));
        }
        Ok(Self { start: start.trunc_subsecs(0), window_length, window_count })
    }

    /// Six-hour windows, twelve of them.
    pub fn with_defaults(start: DateTime<Utc>) -> Self {
        Self::new(start, Duration::hours(Self::DEFAULT_HOURS), Self::DEFAULT_COUNT)
            .expect("default window spec is valid")
    }

    pub fn window_bounds(&self, index: usize) -> (DateTime<Utc>, DateTime<Utc>) {
        let lo = self.start + self.window_length * index as i32;
        (lo, lo + self.window_length)
    }

    /// Index of the half-open window `[start + i*L, start + (i+1)*L)` holding `ts`.
    pub fn window_of(&self, ts: DateTime<Utc>) -> Option<usize> {
        if ts < self.start {
            return None;
        }
        let offset = (ts - self.start).num_seconds();
        let idx = offset / self.window_length.num_seconds().max(1);
        usize::try_from(idx).ok().filter(|&i| i < self.window_count)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Windows {
    pub windows: Vec<Vec<CommentRecord>>,
    pub dropped: usize,
}

/// Assigns every record to its window; out-of-range records are dropped and counted.
pub fn slice_windows(records: &[CommentRecord], spec: &WindowSpec) -> Windows {
    let mut out = Windows { windows: vec![Vec::new(); spec.window_count], dropped: 0 };
    for r in records {
        match spec.window_of(r.published_at) {
            Some(i) => out.windows[i].push(r.clone()),
            None => out.dropped += 1,
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(s: &str) -> DateTime<Utc> {
        parse_timestamp(s).unwrap()
    }

    fn rec(id: &str, at: DateTime<Utc>) -> CommentRecord {
        CommentRecord {
            comment_id: id.into(),
            user_id: "u".into(),
            video_id: "v".into(),
            published_at: at,
            text: "t".into(),
            spam_hint: false,
        }
    }

    #[test]
    fn parses_single_line() {
        let src = r#"{"comment_id":"c1","user_id":"u1","video_id":"v1","published_at":"2011-11-17T04:19:32Z","text":"hello","spam_hint":true}"#;
        let parsed = parse_comments(src.as_bytes()).unwrap();
        assert_eq!(parsed.records.len(), 1);
        let r = &parsed.records[0];
        assert_eq!(r.user_id, "u1");
        assert_eq!(r.video_id, "v1");
        assert!(r.spam_hint);
        assert_eq!(r.published_at, ts("2011-11-17T04:19:32Z"));
    }

    #[test]
    fn empty_stream_fails() {
        let err = parse_comments("".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("no valid records"));
    }

    #[test]
    fn missing_field_is_rejected_with_line_number() {
        let src = concat!(
            r#"{"comment_id":"a","user_id":"u1","video_id":"v1","published_at":"2011-11-17T04:19:32Z","text":"x","spam_hint":false}"#, "\n",
            r#"{"comment_id":"b","user_id":"u2","video_id":"v1","published_at":"2011-11-17T04:19:33Z","text":"x","spam_hint":false}"#, "\n",
            r#"{"comment_id":"c","video_id":"v1","published_at":"2011-11-17T04:19:34Z","text":"x","spam_hint":false}"#, "\n",
            r#"{"comment_id":"d","user_id":"u3","video_id":"v2","published_at":"2011-11-17T04:19:35Z","text":"x","spam_hint":false}"#, "\n",
        );
        let parsed = parse_comments(src.as_bytes()).unwrap();
        assert_eq!(parsed.records.len(), 3);
        assert_eq!(parsed.rejected.len(), 1);
        assert_eq!(parsed.rejected[0].line, 3);
        assert!(parsed.rejected[0].reason.contains("user_id"));
    }

    #[test]
    fn malformed_json_and_duplicates_are_rejected() {
        let src = concat!(
            "{not json}\n",
            r#"{"comment_id":"a","user_id":"u1","video_id":"v1","published_at":"2011-11-17T04:19:32Z","text":"x","spam_hint":false}"#, "\n",
            "\n",
            r#"{"comment_id":"a","user_id":"u2","video_id":"v1","published_at":"2011-11-17T04:19:32Z","text":"x","spam_hint":false}"#, "\n",
            r#"{"comment_id":"b","user_id":"","video_id":"v1","published_at":"2011-11-17T04:19:32Z","text":"x","spam_hint":false}"#, "\n",
        );
        let parsed = parse_comments(src.as_bytes()).unwrap();
        assert_eq!(parsed.records.len(), 1);
        let lines: Vec<_> = parsed.rejected.iter().map(|r| r.line).collect();
        assert_eq!(lines, vec![1, 4, 5]);
    }

    #[test]
    fn offsets_normalize_to_utc() {
        let src = r#"{"comment_id":"c1","user_id":"u1","video_id":"v1","published_at":"2011-11-17T06:19:32.750+02:00","text":"","spam_hint":false}"#;
        let parsed = parse_comments(src.as_bytes()).unwrap();
        assert_eq!(parsed.records[0].published_at, ts("2011-11-17T04:19:32Z"));
    }

    #[test]
    fn boundary_goes_to_next_window() {
        let start = ts("2011-11-14T16:19:32Z");
        let spec = WindowSpec::with_defaults(start);
        let w = slice_windows(&[rec("a", start + Duration::hours(6))], &spec);
        assert_eq!(w.windows[1].len(), 1);
        assert_eq!(w.windows[0].len(), 0);
        let last = start + Duration::hours(72) - Duration::seconds(1);
        assert_eq!(spec.window_of(last), Some(11));
        assert_eq!(spec.window_of(start + Duration::hours(72)), None);
    }

    #[test]
    fn record_before_start_is_dropped() {
        let start = ts("2011-11-14T16:19:32Z");
        let spec = WindowSpec::with_defaults(start);
        let w = slice_windows(&[rec("a", start - Duration::seconds(1))], &spec);
        assert_eq!(w.dropped, 1);
        assert!(w.windows.iter().all(Vec::is_empty));
    }

    #[test]
    fn uniform_records_fill_windows_evenly() {
        let start = ts("2011-11-14T16:19:32Z");
        let spec = WindowSpec::with_defaults(start);
        // one record every 30 minutes over 72 hours
        let records: Vec<_> = (0..144)
            .map(|i| rec(&format!("c{i}"), start + Duration::minutes(30 * i)))
            .collect();
        let w = slice_windows(&records, &spec);
        assert_eq!(w.dropped, 0);
        assert!(w.windows.iter().all(|win| win.len() == 12));
    }

    #[test]
    fn invalid_specs_are_refused() {
        let start = ts("2011-11-14T16:19:32Z");
        assert!(WindowSpec::new(start, Duration::zero(), 3).is_err());
        assert!(WindowSpec::new(start, Duration::hours(1), 0).is_err());
    }
}
