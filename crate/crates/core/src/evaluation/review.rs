use std::cmp::Ordering;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use super::EvalError;
use crate::extraction::{ExtractionRecord, InfoCategory};

pub const REVIEW_HEADER: [&str; 7] = [
    "post_id",
    "category",
    "item_index",
    "phrase",
    "label",
    "hallucination",
    "note",
];

/// Position of a row within its post: an extracted item (1-based, in
/// record order) or a reviewer-added missed item (`M1`, `M2`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ItemIndex {
    Extracted(usize),
    Missed(usize),
}

impl Ord for ItemIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        use ItemIndex::*;
        match (self, other) {
            (Extracted(a), Extracted(b)) | (Missed(a), Missed(b)) => a.cmp(b),
            (Extracted(_), Missed(_)) => Ordering::Less,
            (Missed(_), Extracted(_)) => Ordering::Greater,
        }
    }
}

impl PartialOrd for ItemIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ItemIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ItemIndex::Extracted(i) => write!(f, "{i}"),
            ItemIndex::Missed(k) => write!(f, "M{k}"),
        }
    }
}

impl FromStr for ItemIndex {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (missed, digits) = match s.strip_prefix('M') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(());
        }
        let n: usize = digits.parse().map_err(|_| ())?;
        if n == 0 {
            return Err(());
        }
        Ok(if missed {
            ItemIndex::Missed(n)
        } else {
            ItemIndex::Extracted(n)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ReviewLabel {
    Correct,
    Incorrect,
    Missed,
}

impl ReviewLabel {
    /// Ordinal order used for weighted agreement.
    pub const ORDERED: [ReviewLabel; 3] = [
        ReviewLabel::Correct,
        ReviewLabel::Incorrect,
        ReviewLabel::Missed,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ReviewLabel::Correct => "Correct",
            ReviewLabel::Incorrect => "Incorrect",
            ReviewLabel::Missed => "Missed",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "correct" => Some(ReviewLabel::Correct),
            "incorrect" => Some(ReviewLabel::Incorrect),
            "missed" => Some(ReviewLabel::Missed),
            _ => None,
        }
    }
}

impl fmt::Display for ReviewLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReviewRow {
    pub post_id: String,
    pub category: InfoCategory,
    pub item_index: ItemIndex,
    pub phrase: String,
    pub label: Option<ReviewLabel>,
    pub hallucination: bool,
    pub note: Option<String>,
}

impl ReviewRow {
    fn sort_key(&self) -> (&str, InfoCategory, ItemIndex) {
        (&self.post_id, self.category, self.item_index)
    }
}

/// One unlabeled row per extracted item, ordered by post id, category and
/// item index.
pub fn init_review_sheet(records: &[ExtractionRecord]) -> Vec<ReviewRow> {
    let mut rows: Vec<ReviewRow> = records
        .iter()
        .flat_map(|r| {
            r.items.iter().enumerate().map(move |(i, item)| ReviewRow {
                post_id: r.post_id.clone(),
                category: item.category,
                item_index: ItemIndex::Extracted(i + 1),
                phrase: item.phrase.clone(),
                label: None,
                hallucination: false,
                note: None,
            })
        })
        .collect();
    rows.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    rows
}

pub fn write_review_sheet<W: Write>(rows: &[ReviewRow], out: W) -> Result<(), EvalError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REVIEW_HEADER)?;
    for r in rows {
        let index = r.item_index.to_string();
        let hallucination = if r.hallucination { "true" } else { "false" };
        w.write_record([
            r.post_id.as_str(),
            r.category.as_str(),
            index.as_str(),
            r.phrase.as_str(),
            r.label.map_or("", ReviewLabel::as_str),
            hallucination,
            r.note.as_deref().unwrap_or(""),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "" | "false" | "0" | "no" => Some(false),
        "true" | "1" | "yes" => Some(true),
        _ => None,
    }
}

/// Parses a review sheet. Rows are numbered from 1 after the header.
pub fn parse_review_sheet<R: Read>(input: R) -> Result<Vec<ReviewRow>, EvalError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != REVIEW_HEADER {
        return Err(EvalError::BadHeader {
            expected: REVIEW_HEADER.join(","),
            found: header.join(","),
        });
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let row = i + 1;
        let rec = rec?;
        let field = |k: usize| rec.get(k).unwrap_or("");
        let bad = |name: &'static str, value: &str| EvalError::BadField {
            row,
            field: name,
            value: value.to_string(),
        };
        let category =
            InfoCategory::parse(field(1).trim()).ok_or_else(|| EvalError::UnknownCategory {
                row,
                value: field(1).to_string(),
            })?;
        let item_index = field(2)
            .parse::<ItemIndex>()
            .map_err(|_| bad("item_index", field(2)))?;
        let label = match field(4).trim() {
            "" => None,
            s => Some(ReviewLabel::parse(s).ok_or_else(|| bad("label", s))?),
        };
        let hallucination = parse_bool(field(5)).ok_or_else(|| bad("hallucination", field(5)))?;
        let note = Some(field(6)).filter(|s| !s.is_empty()).map(str::to_string);
        rows.push(ReviewRow {
            post_id: field(0).to_string(),
            category,
            item_index,
            phrase: field(3).to_string(),
            label,
            hallucination,
            note,
        });
    }
    Ok(rows)
}

pub fn read_review_sheet(path: &Path) -> Result<Vec<ReviewRow>, EvalError> {
    parse_review_sheet(std::fs::File::open(path)?)
}

/// Pairs the labels of two reviewers' sheets row by row, keyed on
/// (post id, category, item index). Both sheets must cover the same rows
/// and be fully labeled.
pub fn align_labels(
    a: &[ReviewRow],
    b: &[ReviewRow],
) -> Result<(Vec<ReviewLabel>, Vec<ReviewLabel>), EvalError> {
    let sorted = |rows: &[ReviewRow]| -> Result<Vec<(String, ReviewLabel)>, EvalError> {
        let mut keyed = rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let label = r.label.ok_or_else(|| EvalError::Unlabeled {
                    row: i + 1,
                    post_id: r.post_id.clone(),
                    item_index: r.item_index.to_string(),
                })?;
                Ok((r.sort_key(), label))
            })
            .collect::<Result<Vec<_>, EvalError>>()?;
        keyed.sort_by(|x, y| x.0.cmp(&y.0));
        if let Some(w) = keyed.windows(2).find(|w| w[0].0 == w[1].0) {
            let (post, cat, idx) = w[0].0;
            return Err(EvalError::Misaligned(format!(
                "duplicate row {post}/{cat}/{idx}"
            )));
        }
        Ok(keyed
            .into_iter()
            .map(|((p, c, i), l)| (format!("{p}/{c}/{i}"), l))
            .collect())
    };
    let ka = sorted(a)?;
    let kb = sorted(b)?;
    if ka.len() != kb.len() {
        return Err(EvalError::Misaligned(format!(
            "{} rows vs {} rows",
            ka.len(),
            kb.len()
        )));
    }
    let mut la = Vec::with_capacity(ka.len());
    let mut lb = Vec::with_capacity(kb.len());
    for ((key_a, x), (key_b, y)) in ka.into_iter().zip(kb) {
        if key_a != key_b {
            return Err(EvalError::Misaligned(format!("{key_a} vs {key_b}")));
        }
        la.push(x);
        lb.push(y);
    }
    Ok((la, lb))
}
