//! Config-driven sweeps over temporal models and base embedding methods.
//!
//! A run parses the dataset, aligns the tau and epsilon training windows on a
//! shared hold-out snapshot, builds each model's graphs, then embeds, fuses
//! and scores every (model, method) cell. A failing cell is recorded and the
//! sweep carries on.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

mod config;
mod report;
mod runner;

pub use config::{
    DatasetConfig, EmbeddingConfig, ExperimentConfig, ModelsConfig, OutputConfig, ProtocolConfig,
    ReportFormat, SeedConfig,
};
pub use report::{emit_profile, emit_report, TIMINGS_FILE};
pub use runner::{
    build_model_graphs, profile, run_experiment, run_on_stream, CellFailure, ExperimentReport,
    MethodGain, ProfileReport, ProtocolSummary, SnapshotCount, StageTiming,
};

/// How the training window is cut into snapshots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Representation {
    Tau,
    Epsilon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelFamily {
    Snapshot,
    Summary,
    WeightedReachability,
    Reachability,
    Static,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TemporalModel {
    SgTau,
    SgEps,
    TsgTau,
    TsgEps,
    WtrgTau,
    WtrgEps,
    TrgTau,
    TrgEps,
    Static,
}

impl TemporalModel {
    pub const ALL: [TemporalModel; 9] = [
        TemporalModel::SgTau,
        TemporalModel::SgEps,
        TemporalModel::TsgTau,
        TemporalModel::TsgEps,
        TemporalModel::WtrgTau,
        TemporalModel::WtrgEps,
        TemporalModel::TrgTau,
        TemporalModel::TrgEps,
        TemporalModel::Static,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TemporalModel::SgTau => "SG-tau",
            TemporalModel::SgEps => "SG-eps",
            TemporalModel::TsgTau => "TSG-tau",
            TemporalModel::TsgEps => "TSG-eps",
            TemporalModel::WtrgTau => "WTRG-tau",
            TemporalModel::WtrgEps => "WTRG-eps",
            TemporalModel::TrgTau => "TRG-tau",
            TemporalModel::TrgEps => "TRG-eps",
            TemporalModel::Static => "Static",
        }
    }

    pub fn family(self) -> ModelFamily {
        use TemporalModel::*;
        match self {
            SgTau | SgEps => ModelFamily::Snapshot,
            TsgTau | TsgEps => ModelFamily::Summary,
            WtrgTau | WtrgEps => ModelFamily::WeightedReachability,
            TrgTau | TrgEps => ModelFamily::Reachability,
            Static => ModelFamily::Static,
        }
    }

    /// Static aggregates the tau training window.
    pub fn representation(self) -> Representation {
        use TemporalModel::*;
        match self {
            SgEps | TsgEps | WtrgEps | TrgEps => Representation::Epsilon,
            _ => Representation::Tau,
        }
    }
}

impl fmt::Display for TemporalModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TemporalModel {
    type Err = Error;

    /// Accepts `SG-tau`, `SG-τ`, `sg-eps`, `SG-epsilon`, `SG-ε` and so on.
    fn from_str(s: &str) -> Result<Self> {
        let norm = s
            .trim()
            .to_ascii_lowercase()
            .replace('τ', "tau")
            .replace('ε', "eps")
            .replace("epsilon", "eps")
            .replace('_', "-");
        TemporalModel::ALL
            .into_iter()
            .find(|m| m.name().to_ascii_lowercase() == norm)
            .ok_or_else(|| Error::Unknown {
                kind: "temporal model",
                name: s.to_owned(),
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for m in TemporalModel::ALL {
            assert_eq!(m.name().parse::<TemporalModel>().unwrap(), m);
        }
        assert_eq!(
            "TSG-ε".parse::<TemporalModel>().unwrap(),
            TemporalModel::TsgEps
        );
        assert_eq!(
            "wtrg_τ".parse::<TemporalModel>().unwrap(),
            TemporalModel::WtrgTau
        );
        assert_eq!(
            "SG-epsilon".parse::<TemporalModel>().unwrap(),
            TemporalModel::SgEps
        );
        assert!("GCN".parse::<TemporalModel>().is_err());
    }
}
