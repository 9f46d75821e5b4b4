//! Post corpora: JSONL ingestion with per-line rejection reporting, a
//! Boolean relevance-query language, and deduplication policies.

mod dedup;
mod query;

pub use dedup::{deduplicate, DedupMode, DedupPolicy, DedupReport, RepostSemantics};
pub use query::{match_query, match_tokens, parse_query, QueryExpr, QueryParseError};

use std::collections::HashSet;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use chrono::{DateTime, SecondsFormat, SubsecRound, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised by corpus operations.
#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read corpus file {path}: {source}")]
    Unreadable {
        path: String,
        source: std::io::Error,
    },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// A latitude/longitude pair in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

/// One user-generated item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Post {
    pub id: String,
    pub author_id: String,
    pub text: String,
    #[serde(with = "rfc3339_seconds")]
    pub created_at: DateTime<Utc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lang: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geo: Option<GeoPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poi_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile_location: Option<String>,
    #[serde(default)]
    pub is_repost: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repost_of: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub media_refs: Vec<String>,
}

mod rfc3339_seconds {
    //! Seconds-precision RFC 3339 with a `Z` suffix, so serialized corpora
    //! are byte-stable.
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(dt: &DateTime<Utc>, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&dt.to_rfc3339_opts(SecondsFormat::Secs, true))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<DateTime<Utc>, D::Error> {
        let raw = String::deserialize(de)?;
        DateTime::parse_from_rfc3339(&raw)
            .map(|dt| dt.with_timezone(&Utc))
            .map_err(serde::de::Error::custom)
    }
}

/// An immutable collection of validated posts.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    posts: Vec<Post>,
}

impl Corpus {
    pub fn from_posts(posts: Vec<Post>) -> Self {
        Self { posts }
    }

    pub fn posts(&self) -> &[Post] {
        &self.posts
    }

    pub fn len(&self) -> usize {
        self.posts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.posts.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Post> {
        self.posts.iter()
    }

    /// Posts matching `query`, in corpus order.
    pub fn filter(&self, query: &QueryExpr) -> Corpus {
        Corpus {
            posts: self
                .posts
                .iter()
                .filter(|p| match_query(query, p))
                .cloned()
                .collect(),
        }
    }
}

/// A malformed input line, reported instead of silently dropped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RejectedRecord {
    pub line: usize,
    pub reason: String,
}

/// Reads a JSONL corpus: one post per line. Well-formed records become
/// posts; malformed lines are returned with line number and reason. Only an
/// unreadable file is fatal.
pub fn ingest(path: &Path) -> Result<(Corpus, Vec<RejectedRecord>), CorpusError> {
    let file = std::fs::File::open(path).map_err(|source| CorpusError::Unreadable {
        path: path.display().to_string(),
        source,
    })?;
    let reader = BufReader::new(file);

    let mut posts = Vec::new();
    let mut rejected = Vec::new();
    let mut seen_ids: HashSet<String> = HashSet::new();

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|source| CorpusError::Unreadable {
            path: path.display().to_string(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        match parse_post_line(&line, &seen_ids) {
            Ok(mut post) => {
                // Seconds precision: subsecond parts are truncated on ingest.
                post.created_at = post.created_at.trunc_subsecs(0);
                seen_ids.insert(post.id.clone());
                posts.push(post);
            }
            Err(reason) => rejected.push(RejectedRecord {
                line: line_no,
                reason,
            }),
        }
    }

    Ok((Corpus { posts }, rejected))
}

fn parse_post_line(line: &str, seen_ids: &HashSet<String>) -> Result<Post, String> {
    let post: Post =
        serde_json::from_str(line).map_err(|e| format!("malformed json: {e}"))?;
    if post.id.is_empty() {
        return Err("empty id".into());
    }
    if seen_ids.contains(&post.id) {
        return Err("duplicate id".into());
    }
    if let Some(geo) = &post.geo {
        if !(-90.0..=90.0).contains(&geo.lat) || !geo.lat.is_finite() {
            return Err("lat out of range".into());
        }
        if !(-180.0..=180.0).contains(&geo.lon) || !geo.lon.is_finite() {
            return Err("lon out of range".into());
        }
    }
    if post.is_repost != post.repost_of.is_some() {
        return Err("is_repost inconsistent with repost_of".into());
    }
    Ok(post)
}

/// Writes a corpus as JSONL, one post per line, in corpus order.
pub fn serialize<W: Write>(corpus: &Corpus, mut writer: W) -> Result<(), CorpusError> {
    for post in &corpus.posts {
        let line = serde_json::to_string(post).expect("post serializes");
        writeln!(writer, "{line}")?;
    }
    Ok(())
}

/// Writes a rejection report as CSV with columns `line,reason`.
pub fn write_rejections<W: Write>(
    rejections: &[RejectedRecord],
    writer: W,
) -> Result<(), CorpusError> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["line", "reason"]).map_err(io_from_csv)?;
    for r in rejections {
        out.write_record([r.line.to_string(), r.reason.clone()])
            .map_err(io_from_csv)?;
    }
    out.flush()?;
    Ok(())
}

fn io_from_csv(e: csv::Error) -> CorpusError {
    CorpusError::Io(std::io::Error::other(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn post_json(id: &str, extra: &str) -> String {
        format!(
            r#"{{"id":"{id}","author_id":"u1","text":"hello","created_at":"2021-01-01T00:00:00Z"{extra}}}"#
        )
    }

    fn write_corpus_file(lines: &[String]) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        for line in lines {
            writeln!(f, "{line}").unwrap();
        }
        f
    }

    #[test]
    fn valid_lines_become_posts() {
        let f = write_corpus_file(&[
            post_json("a", ""),
            post_json("b", ""),
            post_json("c", ""),
        ]);
        let (corpus, rejected) = ingest(f.path()).unwrap();
        assert_eq!(corpus.len(), 3);
        assert!(rejected.is_empty());
    }

    #[test]
    fn out_of_range_latitude_rejected() {
        let f = write_corpus_file(&[post_json("a", r#","geo":{"lat":91.0,"lon":0.0}"#)]);
        let (corpus, rejected) = ingest(f.path()).unwrap();
        assert_eq!(corpus.len(), 0);
        assert_eq!(rejected, vec![RejectedRecord { line: 1, reason: "lat out of range".into() }]);
    }

    #[test]
    fn duplicate_id_keeps_first() {
        let f = write_corpus_file(&[
            post_json("a", ""),
            post_json("b", ""),
            post_json("c", ""),
            post_json("d", ""),
            post_json("a", ""),
        ]);
        let (corpus, rejected) = ingest(f.path()).unwrap();
        assert_eq!(corpus.len(), 4);
        assert_eq!(rejected.len(), 1);
        assert_eq!(rejected[0].line, 5);
        assert_eq!(rejected[0].reason, "duplicate id");
    }

    #[test]
    fn malformed_json_reported_with_line() {
        let f = write_corpus_file(&[post_json("a", ""), "{not json".to_string()]);
        let (corpus, rejected) = ingest(f.path()).unwrap();
        assert_eq!(corpus.len(), 1);
        assert_eq!(rejected[0].line, 2);
        assert!(rejected[0].reason.starts_with("malformed json"));
    }

    #[test]
    fn repost_flag_must_match_repost_of() {
        let f = write_corpus_file(&[
            post_json("a", r#","is_repost":true"#),
            post_json("b", r#","repost_of":"a""#),
        ]);
        let (corpus, rejected) = ingest(f.path()).unwrap();
        assert_eq!(corpus.len(), 0);
        assert_eq!(rejected.len(), 2);
    }

    #[test]
    fn missing_file_is_fatal() {
        assert!(matches!(
            ingest(Path::new("/nonexistent/posts.jsonl")),
            Err(CorpusError::Unreadable { .. })
        ));
    }

    #[test]
    fn ingest_serialize_round_trips() {
        let variants = vec![
            post_json("bare", ""),
            post_json("geo", r#","geo":{"lat":35.6,"lon":-117.7}"#),
            post_json("poi", r#","poi_id":"poi9","lang":"en""#),
            post_json(
                "full",
                r#","lang":"en","geo":{"lat":1.0,"lon":2.0},"poi_id":"p","profile_location":"Tampa","is_repost":true,"repost_of":"bare","media_refs":["m1","m2"]"#,
            ),
        ];
        let f = write_corpus_file(&variants);
        let (corpus, rejected) = ingest(f.path()).unwrap();
        assert!(rejected.is_empty());

        let mut buf = Vec::new();
        serialize(&corpus, &mut buf).unwrap();
        let f2 = write_corpus_file(&[String::from_utf8(buf).unwrap().trim_end().to_string()]);
        let (corpus2, rejected2) = ingest(f2.path()).unwrap();
        assert!(rejected2.is_empty());
        assert_eq!(corpus, corpus2);
    }

    #[test]
    fn subseconds_truncated_on_ingest() {
        let f = write_corpus_file(&[
            r#"{"id":"a","author_id":"u","text":"t","created_at":"2021-01-01T00:00:00.750Z"}"#
                .to_string(),
        ]);
        let (corpus, _) = ingest(f.path()).unwrap();
        assert_eq!(
            corpus.posts()[0]
                .created_at
                .to_rfc3339_opts(SecondsFormat::AutoSi, true),
            "2021-01-01T00:00:00Z"
        );
    }
}
