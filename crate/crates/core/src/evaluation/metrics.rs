use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::{EvalError, ItemIndex, ReviewLabel, ReviewRow};
use crate::extraction::InfoCategory;
use crate::percent::Percent;

const DECIMALS: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CountShare {
    pub count: u64,
    pub percent: Percent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CategoryMetrics {
    /// Category identifier, or `Overall` for the totals row.
    pub category: String,
    pub correct: CountShare,
    pub incorrect: CountShare,
    pub missed: CountShare,
    pub row_total: u64,
    /// Incorrect rows flagged as hallucinated.
    pub hallucinations: u64,
}

impl CategoryMetrics {
    fn from_counts(category: String, counts: [u64; 3], hallucinations: u64) -> Self {
        let total: u64 = counts.iter().sum();
        let share = |count| CountShare {
            count,
            percent: Percent::of(count, total, DECIMALS),
        };
        CategoryMetrics {
            category,
            correct: share(counts[0]),
            incorrect: share(counts[1]),
            missed: share(counts[2]),
            row_total: total,
            hallucinations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub categories: Vec<CategoryMetrics>,
    pub overall: CategoryMetrics,
    pub kappa: Option<f64>,
}

impl MetricsReport {
    pub fn category(&self, category: InfoCategory) -> &CategoryMetrics {
        self.categories
            .iter()
            .find(|m| m.category == category.as_str())
            .expect("every category has a row")
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa = Some(kappa);
        self
    }
}

impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<22} {:>14} {:>14} {:>14} {:>6}",
            "category", "correct", "incorrect", "missed", "total"
        )?;
        let cell = |s: &CountShare| format!("{} ({})", s.count, s.percent);
        for m in self.categories.iter().chain(std::iter::once(&self.overall)) {
            writeln!(
                f,
                "{:<22} {:>14} {:>14} {:>14} {:>6}",
                m.category,
                cell(&m.correct),
                cell(&m.incorrect),
                cell(&m.missed),
                m.row_total
            )?;
        }
        for m in self.categories.iter().filter(|m| m.hallucinations > 0) {
            writeln!(f, "hallucinations in {}: {}", m.category, m.hallucinations)?;
        }
        if let Some(k) = self.kappa {
            writeln!(f, "weighted kappa: {k:.3}")?;
        }
        Ok(())
    }
}

fn check_row(row: usize, r: &ReviewRow) -> Result<ReviewLabel, EvalError> {
    let label = r.label.ok_or_else(|| EvalError::Unlabeled {
        row,
        post_id: r.post_id.clone(),
        item_index: r.item_index.to_string(),
    })?;
    let added = matches!(r.item_index, ItemIndex::Missed(_));
    if added != (label == ReviewLabel::Missed) {
        return Err(EvalError::Invariant {
            row,
            reason: format!(
                "label {label} does not fit item index {}; Missed is reserved for M rows",
                r.item_index
            ),
        });
    }
    if r.hallucination && label != ReviewLabel::Incorrect {
        return Err(EvalError::Invariant {
            row,
            reason: format!("hallucination flagged on a {label} row"),
        });
    }
    Ok(label)
}

/// Per-category and overall counts of an adjudicated sheet. Every
/// category appears, empty ones with zero counts.
pub fn score_reviews(rows: &[ReviewRow]) -> Result<MetricsReport, EvalError> {
    let mut counts: BTreeMap<InfoCategory, ([u64; 3], u64)> = InfoCategory::ALL
        .iter()
        .map(|&c| (c, ([0; 3], 0)))
        .collect();
    for (i, r) in rows.iter().enumerate() {
        let label = check_row(i + 1, r)?;
        let entry = counts.get_mut(&r.category).expect("all categories seeded");
        entry.0[label as usize] += 1;
        entry.1 += u64::from(r.hallucination);
    }
    let mut overall = [0u64; 3];
    let mut overall_h = 0;
    let categories = counts
        .into_iter()
        .map(|(c, (n, h))| {
            for (o, v) in overall.iter_mut().zip(n) {
                *o += v;
            }
            overall_h += h;
            CategoryMetrics::from_counts(c.as_str().to_string(), n, h)
        })
        .collect();
    Ok(MetricsReport {
        categories,
        overall: CategoryMetrics::from_counts("Overall".to_string(), overall, overall_h),
        kappa: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(category: InfoCategory, c: usize, i: usize, m: usize) -> Vec<ReviewRow> {
        let mk = |index, label| ReviewRow {
            post_id: "p".into(),
            category,
            item_index: index,
            phrase: String::new(),
            label: Some(label),
            hallucination: false,
            note: None,
        };
        let mut out = Vec::new();
        for k in 0..c {
            out.push(mk(ItemIndex::Extracted(k + 1), ReviewLabel::Correct));
        }
        for k in 0..i {
            out.push(mk(ItemIndex::Extracted(c + k + 1), ReviewLabel::Incorrect));
        }
        for k in 0..m {
            out.push(mk(ItemIndex::Missed(k + 1), ReviewLabel::Missed));
        }
        out
    }

    #[test]
    fn stressor_row() {
        let report = score_reviews(&rows(InfoCategory::Stressor, 39, 0, 9)).unwrap();
        let m = report.category(InfoCategory::Stressor);
        assert_eq!(m.row_total, 48);
        assert_eq!(m.correct.percent.to_string(), "81.25");
        assert_eq!(m.incorrect.percent.to_string(), "0.00");
        assert_eq!(m.missed.percent.to_string(), "18.75");
        assert_eq!(report.category(InfoCategory::StressOnset).row_total, 0);
    }

    #[test]
    fn all_correct() {
        let mut sheet = Vec::new();
        for c in InfoCategory::ALL {
            sheet.extend(rows(c, 3, 0, 0));
        }
        let report = score_reviews(&sheet).unwrap();
        for m in report.categories.iter().chain([&report.overall]) {
            assert_eq!(m.correct.percent.to_string(), "100.00");
            assert_eq!(m.missed.percent.to_string(), "0.00");
        }
        assert_eq!(report.overall.row_total, 18);
    }

    #[test]
    fn invariants_enforced() {
        let mut r = rows(InfoCategory::Stressor, 1, 0, 0);
        r[0].label = None;
        assert!(matches!(
            score_reviews(&r),
            Err(EvalError::Unlabeled { row: 1, .. })
        ));

        let mut r = rows(InfoCategory::Stressor, 1, 0, 0);
        r[0].hallucination = true;
        assert!(matches!(
            score_reviews(&r),
            Err(EvalError::Invariant { .. })
        ));

        let mut r = rows(InfoCategory::Stressor, 1, 0, 0);
        r[0].label = Some(ReviewLabel::Missed);
        assert!(matches!(
            score_reviews(&r),
            Err(EvalError::Invariant { .. })
        ));

        let mut r = rows(InfoCategory::Stressor, 0, 0, 1);
        r[0].label = Some(ReviewLabel::Correct);
        assert!(matches!(
            score_reviews(&r),
            Err(EvalError::Invariant { .. })
        ));
    }

    #[test]
    fn hallucinations_counted() {
        let mut r = rows(InfoCategory::StressOnset, 9, 5, 0);
        r[9].hallucination = true;
        r[10].hallucination = true;
        let report = score_reviews(&r).unwrap();
        assert_eq!(report.category(InfoCategory::StressOnset).hallucinations, 2);
        assert_eq!(report.overall.hallucinations, 2);
    }
}
