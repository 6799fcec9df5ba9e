//! Human-readable tables for the terminal.

use std::fmt::Write as _;

use nanomag_core::clocking::{ku_vector_for_stage, SNAPSHOT_STAGE, STAGES_PER_STEP};
use nanomag_core::geometry::Group;

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::experiment::ResultRow;

/// Per-stage anisotropy table: which groups are switched off, the resulting
/// `Ku` of each group, how many groups toggle relative to the previous stage
/// (stage 1 is compared with stage 7 of the previous step), and the per-magnet
/// on/off pattern in index order.
pub fn schedule_table(cfg: &ExperimentConfig) -> Result<String> {
    let geom = cfg.build_geometry()?;
    let ku0 = cfg.ku0();
    let stages = cfg.schedule.stages();
    let mut s = String::new();
    let _ = writeln!(
        s,
        "Ku0 = {ku0} J/m^3, snapshot after stage {SNAPSHOT_STAGE}"
    );
    let _ = writeln!(
        s,
        "input magnet = 1 (group {}), {} magnets, groups by row mod 3",
        geom.group(geom.input_index()),
        geom.n_mag()
    );
    let _ = writeln!(
        s,
        "stage  off        Ku(I)      Ku(II)     Ku(III)    toggled  on-pattern"
    );
    for p in 1..=STAGES_PER_STEP {
        let off = stages[p - 1];
        let prev = stages[(p + STAGES_PER_STEP - 2) % STAGES_PER_STEP];
        let ku = ku_vector_for_stage(&cfg.schedule, &geom, p, ku0)?;
        let pattern: String = (0..geom.n_mag())
            .map(|i| if ku.is_on(i) { '1' } else { '0' })
            .collect();
        let group_ku = |g: Group| if off.contains(g) { 0.0 } else { ku0 };
        let _ = writeln!(
            s,
            "p{p:<5} {:<10} {:<10.4e} {:<10.4e} {:<10.4e} {:<8} {pattern}",
            off.to_string(),
            group_ku(Group::I),
            group_ku(Group::II),
            group_ku(Group::III),
            off.symmetric_difference(prev).len(),
        );
    }
    Ok(s)
}

pub fn results_table(rows: &[ResultRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<5} {:>3} {:<12} {:>10} {:>10} {:>8}",
        "task", "n", "mode", "mean", "std", "nonconv"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:<5} {:>3} {:<12} {:>10.4} {:>10.4} {:>8}",
            r.task.function.label(),
            r.task.delay,
            r.mode.label(),
            r.error_mean,
            r.error_std,
            r.nonconverged
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_schedule_table() {
        let t = schedule_table(&ExperimentConfig::default()).unwrap();
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 3 + STAGES_PER_STEP);
        assert!(lines[3].starts_with("p1") && lines[3].ends_with(&"1".repeat(20)));
        // stage 2 switches off groups II and III: only rows 0, 3, 6, 9 stay on
        assert!(lines[4].ends_with("11000011000011000011"));
    }
}
