//! Full-scale runs of the numbered invariant suite, one test per
//! criterion so the harness prints one pass/fail line each. Run with
//! `--nocapture` to see the measured margins.

use mqu_core::verify::{run_one, Level};

fn run(id: usize) {
    let report = run_one(id, Level::Full).expect("criterion id exists");
    println!(
        "criterion {:02} {}: {} ({} ms) {}",
        report.id,
        report.name,
        if report.passed { "pass" } else { "FAIL" },
        report.millis,
        report.details
    );
    assert!(
        report.passed,
        "criterion {:02} {} failed: {}",
        report.id, report.name, report.details
    );
}

#[test]
fn criterion_01_e_range() {
    run(1);
}

#[test]
fn criterion_02_commutator_vs_std_dev() {
    run(2);
}

#[test]
fn criterion_03_separable_hypersurface() {
    run(3);
}

#[test]
fn criterion_04_cluster_partition_bound() {
    run(4);
}

#[test]
fn criterion_05_subset_dephasing_decay() {
    run(5);
}

#[test]
fn criterion_06_binomial_channel_decomposition() {
    run(6);
}

#[test]
fn criterion_07_depolarizing_ceiling() {
    run(7);
}

#[test]
fn criterion_08_chebyshev_tail_bound() {
    run(8);
}

#[test]
fn criterion_09_gate_model_ceiling() {
    run(9);
}

#[test]
fn criterion_10_duality_oracle() {
    run(10);
}

#[test]
fn criterion_11_hypergeometric_enumeration() {
    run(11);
}
