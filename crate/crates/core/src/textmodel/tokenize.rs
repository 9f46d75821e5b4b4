//! Social-media-aware tokenizer shared by every text consumer in the crate.
//!
//! The output contract is load-bearing: query matching, TF-IDF features,
//! lexicon scoring, and gazetteer mention scanning all operate on the token
//! sequences produced here, so the rules are fixed:
//!
//! * text is NFC-normalized and lowercased,
//! * URLs collapse to the sentinel token `<url>`,
//! * @-mentions collapse to `<user>`,
//! * `#word` yields the token `word` with its hashtag flag set,
//! * everything else splits on non-alphanumeric boundaries,
//! * pure-punctuation fragments are dropped.

use unicode_normalization::UnicodeNormalization;

/// Sentinel token emitted for URLs.
pub const URL_TOKEN: &str = "<url>";
/// Sentinel token emitted for @-mentions.
pub const USER_TOKEN: &str = "<user>";

/// An ordered sequence of lowercased tokens with parallel hashtag flags.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenSeq {
    tokens: Vec<String>,
    hashtag_flags: Vec<bool>,
}

impl TokenSeq {
    /// Builds a sequence from pre-tokenized parts. Panics on empty tokens or
    /// mismatched flag length; callers outside tests should use [`tokenize`].
    pub fn from_parts(tokens: Vec<String>, hashtag_flags: Vec<bool>) -> Self {
        assert_eq!(tokens.len(), hashtag_flags.len(), "flag length mismatch");
        assert!(tokens.iter().all(|t| !t.is_empty()), "empty token");
        Self {
            tokens,
            hashtag_flags,
        }
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn is_hashtag(&self, idx: usize) -> bool {
        self.hashtag_flags[idx]
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, bool)> {
        self.tokens
            .iter()
            .map(String::as_str)
            .zip(self.hashtag_flags.iter().copied())
    }

    fn push(&mut self, token: String, hashtag: bool) {
        debug_assert!(!token.is_empty());
        self.tokens.push(token);
        self.hashtag_flags.push(hashtag);
    }
}

/// Tokenizes raw post text under the crate-wide contract.
pub fn tokenize(text: &str) -> TokenSeq {
    let normalized: String = text.nfc().collect::<String>().to_lowercase();
    let chars: Vec<char> = normalized.chars().collect();
    let mut seq = TokenSeq::default();
    let mut i = 0;

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if starts_with_at(&chars, i, "http://") || starts_with_at(&chars, i, "https://") {
            while i < chars.len() && !chars[i].is_whitespace() {
                i += 1;
            }
            seq.push(URL_TOKEN.to_string(), false);
            continue;
        }
        if c == '@' && next_is_alphanumeric(&chars, i) {
            i += 1;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            seq.push(USER_TOKEN.to_string(), false);
            continue;
        }
        if c == '#' && next_is_alphanumeric(&chars, i) {
            i += 1;
            let start = i;
            while i < chars.len() && chars[i].is_alphanumeric() {
                i += 1;
            }
            seq.push(chars[start..i].iter().collect(), true);
            continue;
        }
        if c.is_alphanumeric() {
            let start = i;
            while i < chars.len() && chars[i].is_alphanumeric() {
                i += 1;
            }
            seq.push(chars[start..i].iter().collect(), false);
            continue;
        }
        // Punctuation fragment: dropped.
        i += 1;
    }

    seq
}

fn starts_with_at(chars: &[char], at: usize, prefix: &str) -> bool {
    let mut idx = at;
    for p in prefix.chars() {
        if idx >= chars.len() || chars[idx] != p {
            return false;
        }
        idx += 1;
    }
    true
}

fn next_is_alphanumeric(chars: &[char], at: usize) -> bool {
    chars.get(at + 1).is_some_and(|c| c.is_alphanumeric())
}
