use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CSV_HEADER: &str =
    "round,touched_nodes,exploitability,avg_regret_p1,avg_regret_p2,updated_infosets";

/// One evaluation point of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogRecord {
    pub round: usize,
    pub touched_nodes: u64,
    /// Exploitability of the average strategy, normalized units.
    pub exploitability: f64,
    /// `R^i_T / W` per player, where `W` is the total averaging weight.
    pub avg_regret: [f64; 2],
    /// Infosets whose strategy changed in the most recent round.
    pub updated_infosets: u64,
}

/// Evaluation records of a run plus the factor back to native units.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceLog {
    pub scale: f64,
    pub records: Vec<LogRecord>,
}

impl ConvergenceLog {
    pub fn new(scale: f64) -> Self {
        Self {
            scale,
            records: Vec::new(),
        }
    }

    pub fn push(&mut self, record: LogRecord) {
        self.records.push(record);
    }

    pub fn last(&self) -> Option<&LogRecord> {
        self.records.last()
    }

    /// Touched nodes at the first record whose exploitability is at most
    /// `target` (normalized units).
    pub fn nodes_to_reach(&self, target: f64) -> Option<u64> {
        self.records
            .iter()
            .find(|r| r.exploitability <= target)
            .map(|r| r.touched_nodes)
    }

    /// CSV with 17 significant digits; values are multiplied by the scale
    /// when `native_units` is set.
    pub fn to_csv(&self, native_units: bool) -> String {
        let k = if native_units { self.scale } else { 1.0 };
        let mut out = String::with_capacity(64 * (self.records.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{:.16e},{:.16e},{:.16e},{}",
                r.round,
                r.touched_nodes,
                r.exploitability * k,
                r.avg_regret[0] * k,
                r.avg_regret[1] * k,
                r.updated_infosets
            );
        }
        out
    }

    pub fn write_csv(&self, path: &Path, native_units: bool) -> Result<()> {
        std::fs::write(path, self.to_csv(native_units)).map_err(|e| Error::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut log = ConvergenceLog::new(2.0);
        log.push(LogRecord {
            round: 3,
            touched_nodes: 330,
            exploitability: 0.1,
            avg_regret: [0.25, -0.5],
            updated_infosets: 12,
        });
        let csv = log.to_csv(true);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(
            lines.next(),
            Some("3,330,2.0000000000000001e-1,5.0000000000000000e-1,-1.0000000000000000e0,12")
        );
        assert_eq!(log.nodes_to_reach(0.2), Some(330));
        assert_eq!(log.nodes_to_reach(0.01), None);
    }
}
