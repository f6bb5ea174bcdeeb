mod common;

use portham_core::snapshot::{from_text, to_text};

const GOLDEN: &str = include_str!("golden/wave1d_n2.txt");

#[test]
fn wave1d_two_cells_matches_golden_file() {
    let sys = common::build("wave1d", &[2]);
    assert_eq!(to_text(&sys), GOLDEN);
}

#[test]
fn golden_file_parses_to_builder_output() {
    let parsed = from_text(GOLDEN).unwrap();
    assert_eq!(parsed, common::build("wave1d", &[2]));
}

#[test]
fn round_trip_for_every_builder() {
    for (label, cells) in common::small_cases() {
        let sys = common::build(label, &cells);
        assert_eq!(from_text(&to_text(&sys)).unwrap(), sys, "{label}");
    }
}
