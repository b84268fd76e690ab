//! Release gate: one runnable check per acceptance criterion, each returning
//! a pass/fail record with the measured values. The CLI `verify` command and
//! the acceptance test target both drive this module.

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: String,
    pub pass: bool,
    pub details: String,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {:2} [{}] {:<22} {:7.1}s  {}",
            self.id,
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.seconds,
            self.details
        )
    }
}

pub mod criteria;

/// Runs the selected criteria (all when `subset` is empty). `tol_scale`
/// multiplies every pass tolerance; 1.0 is the release gate.
pub fn run(subset: &[usize], tol_scale: f64, seed: u64) -> Vec<CriterionResult> {
    let all: Vec<(usize, fn(f64, u64) -> CriterionResult)> = vec![
        (1, criteria::c1_homogeneity),
        (2, criteria::c2_explicit_profile),
        (3, criteria::c3_torsion_scaling),
        (4, criteria::c4_comparison_campaign),
        (5, criteria::c5_superposition),
        (6, criteria::c6_lewy_stampacchia),
        (7, criteria::c7_hopf),
        (8, criteria::c8_global_subsolution),
        (9, criteria::c9_barriers),
        (10, criteria::c10_fit_calibration),
        (11, criteria::c11_series),
    ];
    all.into_iter()
        .filter(|(id, _)| subset.is_empty() || subset.contains(id))
        .map(|(_, f)| f(tol_scale, seed))
        .collect()
}
