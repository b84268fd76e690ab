//! Release gate: runs every acceptance criterion at its pinned tolerance and
//! prints one pass/fail line per criterion.

use fracreg::acceptance::{criteria, CriterionResult};

const SEED: u64 = 0xF5AC;

fn gate(r: CriterionResult) {
    println!("{}", r.line());
    assert!(r.pass, "{}", r.line());
}

#[test]
fn criterion_01_homogeneity() {
    gate(criteria::c1_homogeneity(1.0, SEED));
}

#[test]
fn criterion_02_explicit_profile() {
    gate(criteria::c2_explicit_profile(1.0, SEED));
}

#[test]
fn criterion_03_torsion_scaling() {
    gate(criteria::c3_torsion_scaling(1.0, SEED));
}

#[test]
fn criterion_04_comparison() {
    gate(criteria::c4_comparison_campaign(1.0, SEED));
}

#[test]
fn criterion_05_superposition() {
    gate(criteria::c5_superposition(1.0, SEED));
}

#[test]
fn criterion_06_lewy_stampacchia() {
    gate(criteria::c6_lewy_stampacchia(1.0, SEED));
}

#[test]
fn criterion_07_hopf() {
    gate(criteria::c7_hopf(1.0, SEED));
}

#[test]
fn criterion_08_global_subsolution() {
    gate(criteria::c8_global_subsolution(1.0, SEED));
}

#[test]
fn criterion_09_barriers() {
    gate(criteria::c9_barriers(1.0, SEED));
}

#[test]
fn criterion_10_fit_calibration() {
    gate(criteria::c10_fit_calibration(1.0, SEED));
}

#[test]
fn criterion_11_series() {
    gate(criteria::c11_series(1.0, SEED));
}
