//! Snapshot of the QASM export for a small Gaussian circuit. Regenerate with
//! `UPDATE_GOLDEN=1 cargo test --test golden` after an intended change.

use std::path::PathBuf;

use qprep_core::angles::build_angle_table;
use qprep_core::circuit::{build_upsampling_circuit, export_qasm, QasmOptions};
use qprep_core::dist::DistributionSpec;
use qprep_core::grid::SamplingGrid;

fn gaussian_n3_qasm() -> String {
    let spec = DistributionSpec::gaussian(0.0, 1.0).unwrap();
    let grid = SamplingGrid::new(3, 12.0, 0.0, 0.0).unwrap();
    let table = build_angle_table(&spec, &grid, 1e-14).unwrap();
    export_qasm(&build_upsampling_circuit(&table), QasmOptions::default())
}

#[test]
fn gaussian_n3_matches_snapshot() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/gaussian_n3.qasm");
    let text = gaussian_n3_qasm();
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &text).unwrap();
    }
    let expected = std::fs::read_to_string(&path).expect("golden file present");
    assert_eq!(text, expected);
}
