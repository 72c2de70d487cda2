use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use super::CoverageError;

const DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords_en.txt");

pub type StopWords = HashSet<String>;

/// The bundled English stopword list.
pub fn default_stopwords() -> StopWords {
    parse_stopwords(DEFAULT_STOPWORDS)
}

/// One lowercase word per line; `#` starts a comment line.
pub fn parse_stopwords(text: &str) -> StopWords {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

/// Set of n-gram lengths, each in 1..=3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NgramSizes(BTreeSet<usize>);

impl NgramSizes {
    pub fn new(sizes: impl IntoIterator<Item = usize>) -> Result<Self, CoverageError> {
        let set: BTreeSet<usize> = sizes.into_iter().collect();
        if set.is_empty() {
            return Err(CoverageError::InvalidNgram(0));
        }
        if let Some(&bad) = set.iter().find(|&&n| !(1..=3).contains(&n)) {
            return Err(CoverageError::InvalidNgram(bad));
        }
        Ok(NgramSizes(set))
    }

    pub fn all() -> Self {
        NgramSizes((1..=3).collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }
}

impl FromStr for NgramSizes {
    type Err = CoverageError;

    /// Comma-separated, e.g. `1,2,3`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let sizes = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| CoverageError::InvalidNgram(0))
            })
            .collect::<Result<Vec<_>, _>>()?;
        NgramSizes::new(sizes)
    }
}

impl fmt::Display for NgramSizes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

/// Lowercase tokens split on whitespace and punctuation.
pub fn tokenize(doc: &str) -> Vec<String> {
    doc.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

/// Candidates grouped by n: `(n, candidates in first-occurrence order)`.
pub(crate) fn candidates_by_n(
    doc: &str,
    sizes: &NgramSizes,
    stopwords: &StopWords,
) -> Vec<(usize, Vec<String>)> {
    let tokens = tokenize(doc);
    sizes
        .iter()
        .map(|n| {
            let mut seen = HashSet::new();
            let mut out = Vec::new();
            if tokens.len() >= n {
                for window in tokens.windows(n) {
                    let excluded = window.iter().all(|t| stopwords.contains(t));
                    if excluded {
                        continue;
                    }
                    let gram = window.join(" ");
                    if seen.insert(gram.clone()) {
                        out.push(gram);
                    }
                }
            }
            (n, out)
        })
        .collect()
}

/// All contiguous n-grams for each requested n, ascending n then position.
/// Stopword unigrams are dropped; longer n-grams only when every token is
/// a stopword. Duplicates keep their first occurrence.
pub fn ngram_candidates(doc: &str, sizes: &NgramSizes, stopwords: &StopWords) -> Vec<String> {
    candidates_by_n(doc, sizes, stopwords)
        .into_iter()
        .flat_map(|(_, c)| c)
        .collect()
}
