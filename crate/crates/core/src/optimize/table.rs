//! Qubit maxima of the six derived inequalities.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::seesaw::{best_report, seesaw_run, OptimizationReport, SeesawConfig, StateMode};
use crate::bell::{build_derived, RankProfile};
use crate::Result;

/// Order in which rows are reported.
pub const TABLE_ORDER: [(u8, u8); 6] = [(0, 0), (0, 1), (1, 0), (1, 1), (0, 2), (2, 0)];

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableRow {
    pub profile: RankProfile,
    pub value: f64,
    pub stated_bound: f64,
    pub report: OptimizationReport,
}

pub fn table_profiles() -> Vec<RankProfile> {
    TABLE_ORDER.iter().map(|&(i, j)| RankProfile::new(i, j).expect("valid profile")).collect()
}

/// See-saw configuration for one row: two qubits, free pure state, rank-1
/// projective measurements everywhere.
pub fn row_config(profile: RankProfile, c: f64, restarts: usize, seed: u64) -> Result<SeesawConfig> {
    let d = build_derived(profile, c)?;
    let mut cfg = SeesawConfig::rank_one(&d.functional, (2, 2), StateMode::Free);
    cfg.restarts = restarts;
    cfg.seed = seed;
    Ok(cfg)
}

/// Assembles a row from the reports of its restarts.
pub fn row_from_reports(profile: RankProfile, c: f64, reports: Vec<OptimizationReport>) -> Result<TableRow> {
    let d = build_derived(profile, c)?;
    let report = best_report(reports).ok_or_else(|| crate::Error::Domain("no restarts".into()))?;
    Ok(TableRow { profile, value: report.value, stated_bound: d.stated_bound, report })
}

pub fn table_row(profile: RankProfile, c: f64, restarts: usize, seed: u64) -> Result<TableRow> {
    let d = build_derived(profile, c)?;
    let cfg = row_config(profile, c, restarts, seed)?;
    let reports = (0..cfg.total_runs()).map(|i| seesaw_run(&d.functional, &cfg, i)).collect::<Result<Vec<_>>>()?;
    row_from_reports(profile, c, reports)
}

pub fn qubit_table(c: f64, restarts: usize, seed: u64) -> Result<Vec<TableRow>> {
    table_profiles().into_iter().map(|p| table_row(p, c, restarts, seed)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qubit_maxima_at_c_100() {
        let rows = qubit_table(100.0, 50, 0).unwrap();
        let want = [20.71068, 20.91928, 21.06690, 21.06801, 20.71775, 20.71775];
        for (row, w) in rows.iter().zip(want) {
            assert!((row.value - w).abs() < 1e-4, "{} {}", row.profile.label(), row.value);
            assert!(row.report.converged);
        }
        assert!((rows[4].value - rows[5].value).abs() < 1e-8);
    }
}
