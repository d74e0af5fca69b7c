use vexlab::exponent::ExponentFunction;
use vexlab::grid::GridSpec;
use vexlab::lab::profile::Profile;
use vexlab::lab::{equivalence_report, export_report, read_reports, ExportFormat, Mode, Scenario, Which};

fn reports() -> Vec<vexlab::lab::EquivalenceReport> {
    let grid = GridSpec::new(-16, 16, 8).unwrap();
    [("loginterp(3,2)", Which::Eta), ("const(2)", Which::Lambda)]
        .into_iter()
        .map(|(p, which)| {
            let p: ExponentFunction = p.parse().unwrap();
            let sc = Scenario::new(p, 1.0, Profile::PowerPeak { alpha: 0.5, beta: 0.5 }, which, Mode::Full, grid);
            equivalence_report(&sc).unwrap()
        })
        .collect()
}

#[test]
fn empty_export_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    export_report(&[], &path, ExportFormat::Csv).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert_eq!(text.trim_end().split(',').count(), 15);
    assert!(read_reports(&path, ExportFormat::Csv).unwrap().is_empty());
}

#[test]
fn one_row_per_report_sorted_by_id() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("two.csv");
    let mut rs = reports();
    rs.reverse();
    export_report(&rs, &path, ExportFormat::Csv).unwrap();
    let back = read_reports(&path, ExportFormat::Csv).unwrap();
    assert_eq!(back.len(), 2);
    assert!(back[0].scenario_id < back[1].scenario_id);
}

#[test]
fn json_and_csv_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (json, csv) = (dir.path().join("r.json"), dir.path().join("r.csv"));
    let mut rs = reports();
    rs.sort_by(|a, b| a.scenario_id.cmp(&b.scenario_id));
    export_report(&rs, &json, ExportFormat::Json).unwrap();
    let from_json = read_reports(&json, ExportFormat::Json).unwrap();
    assert_eq!(from_json, rs);
    export_report(&from_json, &csv, ExportFormat::Csv).unwrap();
    assert_eq!(read_reports(&csv, ExportFormat::Csv).unwrap(), rs);
}
