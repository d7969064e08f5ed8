//! First-rank counting across (dataset, method) cells and mean AUC gains.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::MetricRecord;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Criterion {
    Auc,
    Acc,
    F1,
}

impl Criterion {
    pub const ALL: [Criterion; 3] = [Criterion::Auc, Criterion::Acc, Criterion::F1];

    pub fn name(self) -> &'static str {
        match self {
            Criterion::Auc => "auc",
            Criterion::Acc => "acc",
            Criterion::F1 => "f1",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankRow {
    pub model: String,
    pub auc: usize,
    pub acc: usize,
    pub f1: usize,
    /// Sum of first ranks over all criteria.
    pub score: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RankTable {
    /// Sorted by score (descending), then model name.
    pub rows: Vec<RankRow>,
    /// dataset -> model -> first ranks over methods and criteria.
    pub per_dataset: BTreeMap<String, BTreeMap<String, usize>>,
}

impl RankTable {
    pub fn row(&self, model: &str) -> Option<&RankRow> {
        self.rows.iter().find(|r| r.model == model)
    }
}

/// Counts, per criterion, how often each model attains the best value within
/// a (dataset, method) cell. Every tied maximum earns a first rank.
pub fn rank_models(records: &[MetricRecord]) -> Result<RankTable> {
    let models: BTreeSet<&str> = records.iter().map(|r| r.model.as_str()).collect();
    let cells: BTreeSet<(&str, &str)> = records
        .iter()
        .map(|r| (r.dataset.as_str(), r.method.as_str()))
        .collect();
    let mut grid: BTreeMap<(&str, &str, &str), &MetricRecord> = BTreeMap::new();
    for r in records {
        if grid.insert((&r.dataset, &r.method, &r.model), r).is_some() {
            return Err(Error::InvalidParameter(format!(
                "duplicate record for {} / {} / {}",
                r.dataset, r.method, r.model
            )));
        }
    }

    let mut counts: BTreeMap<&str, [usize; 3]> = models.iter().map(|&m| (m, [0; 3])).collect();
    let mut per_dataset: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    for &(dataset, method) in &cells {
        let row: Vec<&MetricRecord> = models
            .iter()
            .map(|&m| {
                grid.get(&(dataset, method, m))
                    .copied()
                    .ok_or_else(|| Error::MissingCell(format!("{dataset} / {method} / {m}")))
            })
            .collect::<Result<_>>()?;
        let tally = per_dataset.entry(dataset.to_owned()).or_default();
        for (c, criterion) in Criterion::ALL.into_iter().enumerate() {
            let best = row
                .iter()
                .map(|r| r.value(criterion))
                .fold(f64::NEG_INFINITY, f64::max);
            for r in row.iter().filter(|r| r.value(criterion) == best) {
                counts.get_mut(r.model.as_str()).expect("model registered")[c] += 1;
                *tally.entry(r.model.clone()).or_insert(0) += 1;
            }
        }
        for &m in &models {
            tally.entry(m.to_owned()).or_insert(0);
        }
    }

    let mut rows: Vec<RankRow> = counts
        .into_iter()
        .map(|(model, [auc, acc, f1])| RankRow {
            model: model.to_owned(),
            auc,
            acc,
            f1,
            score: auc + acc + f1,
        })
        .collect();
    rows.sort_by(|a, b| b.score.cmp(&a.score).then_with(|| a.model.cmp(&b.model)));
    Ok(RankTable { rows, per_dataset })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainRow {
    pub variant: String,
    /// Mean percent AUC gain over datasets, one entry per baseline.
    pub gains: Vec<f64>,
    /// Mean over the baselines.
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GainTable {
    pub baselines: Vec<String>,
    pub rows: Vec<GainRow>,
}

/// `gain(a, b) = mean_d 100 (AUC_a - AUC_b) / AUC_b`. Names match a record's
/// model name or its `method/model` variant and must resolve to exactly one
/// record per dataset.
pub fn mean_gain(records: &[MetricRecord], ours: &[&str], baselines: &[&str]) -> Result<GainTable> {
    let datasets: BTreeSet<&str> = records.iter().map(|r| r.dataset.as_str()).collect();
    if datasets.is_empty() {
        return Err(Error::Empty("no metric records".into()));
    }
    let auc_of = |name: &str, dataset: &str| -> Result<f64> {
        let mut hits = records
            .iter()
            .filter(|r| r.dataset == dataset && (r.model == name || r.variant() == name));
        match (hits.next(), hits.next()) {
            (Some(r), None) => Ok(r.auc),
            (None, _) => Err(Error::MissingCell(format!("{dataset} / {name}"))),
            (Some(_), Some(_)) => Err(Error::InvalidParameter(format!(
                "`{name}` matches several records on {dataset}; use method/model"
            ))),
        }
    };

    let mut rows = Vec::with_capacity(ours.len());
    for &a in ours {
        let mut gains = Vec::with_capacity(baselines.len());
        for &b in baselines {
            let mut total = 0.0;
            for &d in &datasets {
                let (auc_a, auc_b) = (auc_of(a, d)?, auc_of(b, d)?);
                if auc_b <= 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "baseline {b} has AUC 0 on {d}"
                    )));
                }
                total += 100.0 * (auc_a - auc_b) / auc_b;
            }
            gains.push(total / datasets.len() as f64);
        }
        let mean = if gains.is_empty() {
            0.0
        } else {
            gains.iter().sum::<f64>() / gains.len() as f64
        };
        rows.push(GainRow {
            variant: a.to_owned(),
            gains,
            mean,
        });
    }
    Ok(GainTable {
        baselines: baselines.iter().map(|s| (*s).to_owned()).collect(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rec(dataset: &str, method: &str, model: &str, auc: f64, acc: f64, f1: f64) -> MetricRecord {
        MetricRecord {
            dataset: dataset.into(),
            method: method.into(),
            model: model.into(),
            auc,
            acc,
            f1,
        }
    }

    #[test]
    fn strict_winners() {
        // Three single-method datasets; A wins two, B wins one.
        let mut records = Vec::new();
        for (d, a, b) in [("d1", 0.9, 0.8), ("d2", 0.7, 0.6), ("d3", 0.5, 0.6)] {
            records.push(rec(d, "f", "A", a, a, a));
            records.push(rec(d, "f", "B", b, b, b));
        }
        let t = rank_models(&records).unwrap();
        assert_eq!(t.row("A").unwrap().auc, 2);
        assert_eq!(t.row("B").unwrap().auc, 1);
        assert_eq!(t.rows[0].model, "A");
        assert_eq!(t.rows[0].score, 6);
    }

    #[test]
    fn ties_each_count() {
        let records = vec![
            rec("bitcoin", "f", "TSG-eps", 0.9, 0.8, 0.8),
            rec("bitcoin", "f", "WTRG-eps", 0.9, 0.8, 0.8),
            rec("bitcoin", "f", "SG-tau", 0.5, 0.5, 0.5),
        ];
        let t = rank_models(&records).unwrap();
        assert_eq!(t.row("TSG-eps").unwrap().score, 3);
        assert_eq!(t.row("WTRG-eps").unwrap().score, 3);
        assert_eq!(t.per_dataset["bitcoin"]["SG-tau"], 0);

        let all_tied: Vec<_> = ["x", "y", "z"]
            .iter()
            .map(|m| rec("d", "f", m, 0.5, 0.5, 0.5))
            .collect();
        let t = rank_models(&all_tied).unwrap();
        assert!(t.rows.iter().all(|r| r.score == 3));
    }

    #[test]
    fn missing_cell_is_an_error() {
        let records = vec![
            rec("d1", "f", "A", 0.5, 0.5, 0.5),
            rec("d2", "f", "B", 0.5, 0.5, 0.5),
        ];
        assert!(matches!(rank_models(&records), Err(Error::MissingCell(_))));
    }

    #[test]
    fn gain_examples() {
        let same = vec![
            rec("d", "f", "A", 0.6, 0.0, 0.0),
            rec("d", "f", "B", 0.6, 0.0, 0.0),
        ];
        assert_eq!(mean_gain(&same, &["A"], &["B"]).unwrap().rows[0].mean, 0.0);

        let one = vec![
            rec("d", "f", "A", 0.55, 0.0, 0.0),
            rec("d", "f", "B", 0.50, 0.0, 0.0),
        ];
        assert!((mean_gain(&one, &["A"], &["B"]).unwrap().rows[0].gains[0] - 10.0).abs() < 1e-9);

        let two = vec![
            rec("d1", "f", "A", 0.55, 0.0, 0.0),
            rec("d1", "f", "B", 0.50, 0.0, 0.0),
            rec("d2", "f", "A", 0.60, 0.0, 0.0),
            rec("d2", "f", "B", 0.50, 0.0, 0.0),
        ];
        let t = mean_gain(&two, &["f/A"], &["f/B", "B"]).unwrap();
        assert!((t.rows[0].gains[0] - 15.0).abs() < 1e-9);
        assert!((t.rows[0].mean - 15.0).abs() < 1e-9);
        assert!(mean_gain(&two, &["A"], &["C"]).is_err());
    }

    proptest! {
        #[test]
        fn ranking_is_invariant_under_monotone_maps(
            values in prop::collection::vec(0u8..6, 12),
            scale in 0.1f64..5.0,
            shift in -1.0f64..1.0,
        ) {
            // 2 datasets x 2 methods x 3 models, coarse values to force ties.
            let mut records = Vec::new();
            let mut k = 0;
            for d in ["d1", "d2"] {
                for f in ["f1", "f2"] {
                    for m in ["A", "B", "C"] {
                        let v = f64::from(values[k]) / 5.0;
                        records.push(rec(d, f, m, v, v, v));
                        k += 1;
                    }
                }
            }
            let base = rank_models(&records).unwrap();
            let mapped: Vec<_> = records
                .iter()
                .map(|r| MetricRecord { auc: (r.auc * scale + shift).exp(), ..r.clone() })
                .collect();
            prop_assert_eq!(base, rank_models(&mapped).unwrap());
        }
    }
}
