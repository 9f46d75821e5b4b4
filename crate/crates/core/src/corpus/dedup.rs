//! Deduplication policies: exact-text collapse and repost-chain handling.
//!
//! Duplicated or highly propagated content biases prevalence estimates, so
//! the default repost semantics counts a chain once; diffusion mode keeps
//! every repost (the `is_repost` flag already marks them for downstream
//! analysis).

use std::collections::HashMap;

use serde::Serialize;
use unicode_normalization::UnicodeNormalization;

use super::{Corpus, Post};

/// What counts as a duplicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
pub enum DedupMode {
    #[serde(rename = "keep-all")]
    KeepAll,
    #[serde(rename = "drop-exact-text")]
    DropExactText,
    #[serde(rename = "drop-exact-text-per-author")]
    DropExactTextPerAuthor,
    #[serde(rename = "collapse-reposts")]
    CollapseReposts,
}

/// Whether reposts evidence prevalence (count once) or diffusion (count all).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
pub enum RepostSemantics {
    #[serde(rename = "prevalence")]
    Prevalence,
    #[serde(rename = "diffusion")]
    Diffusion,
}

/// A dedup mode paired with repost semantics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct DedupPolicy {
    pub mode: DedupMode,
    pub repost_semantics: RepostSemantics,
}

impl Default for DedupPolicy {
    fn default() -> Self {
        Self {
            mode: DedupMode::KeepAll,
            repost_semantics: RepostSemantics::Prevalence,
        }
    }
}

/// Counts removed per rule.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DedupReport {
    pub input: usize,
    pub kept: usize,
    pub removed_exact_text: usize,
    pub removed_reposts: usize,
}

/// Text key for exact-duplicate detection: NFC, lowercased, whitespace
/// collapsed.
fn normalize_text(text: &str) -> String {
    text.nfc()
        .collect::<String>()
        .to_lowercase()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// Applies `policy` to the corpus. The corpus is sorted by `created_at`
/// (ties by id) first, so "earliest" is well defined; the operation is
/// idempotent.
pub fn deduplicate(corpus: &Corpus, policy: &DedupPolicy) -> (Corpus, DedupReport) {
    let mut posts: Vec<Post> = corpus.posts().to_vec();
    posts.sort_by(|a, b| a.created_at.cmp(&b.created_at).then(a.id.cmp(&b.id)));

    let mut report = DedupReport {
        input: posts.len(),
        ..DedupReport::default()
    };

    let kept: Vec<Post> = match policy.mode {
        DedupMode::KeepAll => posts,
        DedupMode::DropExactText => {
            drop_by_key(posts, &mut report.removed_exact_text, |p| {
                normalize_text(&p.text)
            })
        }
        DedupMode::DropExactTextPerAuthor => {
            drop_by_key(posts, &mut report.removed_exact_text, |p| {
                format!("{}\u{0}{}", p.author_id, normalize_text(&p.text))
            })
        }
        DedupMode::CollapseReposts => match policy.repost_semantics {
            RepostSemantics::Diffusion => posts,
            RepostSemantics::Prevalence => collapse_reposts(posts, &mut report.removed_reposts),
        },
    };

    report.kept = kept.len();
    (Corpus::from_posts(kept), report)
}

fn drop_by_key<K: std::hash::Hash + Eq>(
    posts: Vec<Post>,
    removed: &mut usize,
    key: impl Fn(&Post) -> K,
) -> Vec<Post> {
    let mut seen: HashMap<K, ()> = HashMap::new();
    let mut kept = Vec::with_capacity(posts.len());
    for post in posts {
        if seen.insert(key(&post), ()).is_none() {
            kept.push(post);
        } else {
            *removed += 1;
        }
    }
    kept
}

/// Keeps one representative per repost chain: the chain root when present in
/// the corpus, otherwise the earliest member. Posts outside any chain pass
/// through.
fn collapse_reposts(posts: Vec<Post>, removed: &mut usize) -> Vec<Post> {
    let index: HashMap<&str, usize> = posts
        .iter()
        .enumerate()
        .map(|(i, p)| (p.id.as_str(), i))
        .collect();

    // Chain key: the ultimate ancestor id, following repost_of links through
    // the corpus (the final id may itself be absent from the corpus).
    let chain_key = |start: usize| -> String {
        let mut current = start;
        let mut hops = 0;
        loop {
            match &posts[current].repost_of {
                Some(parent_id) => match index.get(parent_id.as_str()) {
                    Some(&parent_idx) if hops < posts.len() => {
                        current = parent_idx;
                        hops += 1;
                    }
                    _ => return parent_id.clone(),
                },
                None => return posts[current].id.clone(),
            }
        }
    };

    let mut groups: HashMap<String, Vec<usize>> = HashMap::new();
    let mut order: Vec<String> = Vec::new();
    for i in 0..posts.len() {
        let key = chain_key(i);
        let entry = groups.entry(key.clone()).or_default();
        if entry.is_empty() {
            order.push(key);
        }
        entry.push(i);
    }

    let mut keep = vec![false; posts.len()];
    for key in order {
        let members = &groups[&key];
        // Root if present (the member whose own id equals the chain key),
        // else the earliest member (posts are sorted by time already).
        let representative = members
            .iter()
            .copied()
            .find(|&i| posts[i].id == key)
            .unwrap_or(members[0]);
        keep[representative] = true;
        *removed += members.len() - 1;
    }

    posts
        .into_iter()
        .zip(keep)
        .filter_map(|(p, k)| k.then_some(p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{TimeZone, Utc};

    fn post(id: &str, author: &str, text: &str, minute: u32, repost_of: Option<&str>) -> Post {
        Post {
            id: id.into(),
            author_id: author.into(),
            text: text.into(),
            created_at: Utc.with_ymd_and_hms(2021, 1, 1, 0, minute, 0).unwrap(),
            lang: None,
            geo: None,
            poi_id: None,
            profile_location: None,
            is_repost: repost_of.is_some(),
            repost_of: repost_of.map(String::from),
            media_refs: vec![],
        }
    }

    fn policy(mode: DedupMode, semantics: RepostSemantics) -> DedupPolicy {
        DedupPolicy {
            mode,
            repost_semantics: semantics,
        }
    }

    #[test]
    fn keep_all_is_identity_on_sorted_input() {
        let corpus = Corpus::from_posts(vec![
            post("a", "u1", "one", 0, None),
            post("b", "u2", "two", 1, None),
        ]);
        let (out, report) =
            deduplicate(&corpus, &policy(DedupMode::KeepAll, RepostSemantics::Prevalence));
        assert_eq!(out, corpus);
        assert_eq!(report.kept, 2);
    }

    #[test]
    fn per_author_duplicates_collapse() {
        let corpus = Corpus::from_posts(vec![
            post("a", "u1", "Same text", 0, None),
            post("b", "u1", "same   TEXT", 1, None),
        ]);
        let (out, report) = deduplicate(
            &corpus,
            &policy(DedupMode::DropExactTextPerAuthor, RepostSemantics::Prevalence),
        );
        assert_eq!(out.len(), 1);
        assert_eq!(out.posts()[0].id, "a");
        assert_eq!(report.removed_exact_text, 1);
    }

    #[test]
    fn per_author_keeps_same_text_across_authors() {
        let corpus = Corpus::from_posts(vec![
            post("a", "u1", "same text", 0, None),
            post("b", "u2", "same text", 1, None),
        ]);
        let (out, _) = deduplicate(
            &corpus,
            &policy(DedupMode::DropExactTextPerAuthor, RepostSemantics::Prevalence),
        );
        assert_eq!(out.len(), 2);

        let (out, _) = deduplicate(
            &corpus,
            &policy(DedupMode::DropExactText, RepostSemantics::Prevalence),
        );
        assert_eq!(out.len(), 1);
    }

    #[test]
    fn drop_exact_text_keeps_earliest() {
        let corpus = Corpus::from_posts(vec![
            post("late", "u2", "hello world", 5, None),
            post("early", "u1", "Hello  World", 1, None),
        ]);
        let (out, _) = deduplicate(
            &corpus,
            &policy(DedupMode::DropExactText, RepostSemantics::Prevalence),
        );
        assert_eq!(out.posts()[0].id, "early");
    }

    #[test]
    fn repost_chain_collapses_to_root_under_prevalence() {
        let corpus = Corpus::from_posts(vec![
            post("root", "u0", "original", 0, None),
            post("r1", "u1", "rt", 1, Some("root")),
            post("r2", "u2", "rt", 2, Some("root")),
            post("r3", "u3", "rt", 3, Some("r1")),
            post("r4", "u4", "rt", 4, Some("r2")),
        ]);
        let (out, report) = deduplicate(
            &corpus,
            &policy(DedupMode::CollapseReposts, RepostSemantics::Prevalence),
        );
        assert_eq!(out.len(), 1);
        assert_eq!(out.posts()[0].id, "root");
        assert_eq!(report.removed_reposts, 4);
    }

    #[test]
    fn missing_root_keeps_earliest_member() {
        let corpus = Corpus::from_posts(vec![
            post("r1", "u1", "rt", 1, Some("gone")),
            post("r2", "u2", "rt", 2, Some("gone")),
        ]);
        let (out, _) = deduplicate(
            &corpus,
            &policy(DedupMode::CollapseReposts, RepostSemantics::Prevalence),
        );
        assert_eq!(out.len(), 1);
        assert_eq!(out.posts()[0].id, "r1");
    }

    #[test]
    fn diffusion_keeps_all_reposts() {
        let corpus = Corpus::from_posts(vec![
            post("root", "u0", "original", 0, None),
            post("r1", "u1", "rt", 1, Some("root")),
        ]);
        let (out, report) = deduplicate(
            &corpus,
            &policy(DedupMode::CollapseReposts, RepostSemantics::Diffusion),
        );
        assert_eq!(out.len(), 2);
        assert_eq!(report.removed_reposts, 0);
    }

    #[test]
    fn deduplicate_is_idempotent() {
        let corpus = Corpus::from_posts(vec![
            post("root", "u0", "same", 0, None),
            post("r1", "u1", "same", 1, Some("root")),
            post("x", "u2", "same", 2, None),
            post("y", "u2", "other", 3, None),
        ]);
        for mode in [
            DedupMode::KeepAll,
            DedupMode::DropExactText,
            DedupMode::DropExactTextPerAuthor,
            DedupMode::CollapseReposts,
        ] {
            for semantics in [RepostSemantics::Prevalence, RepostSemantics::Diffusion] {
                let p = policy(mode, semantics);
                let (once, _) = deduplicate(&corpus, &p);
                let (twice, report) = deduplicate(&once, &p);
                assert_eq!(once, twice, "{mode:?}/{semantics:?}");
                assert_eq!(report.kept, report.input);
            }
        }
    }
}
