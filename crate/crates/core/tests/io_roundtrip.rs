use diamag::bulk::ThermoParams;
use diamag::finite_gas::{read_chi_csv, susceptibility_finite, write_chi_csv, ChiMethod, ChiRow, FdOptions, FiniteBox};
use diamag::harness::config::{reference_page, undocumented_keys};
use diamag::harness::{converge_study, OutputFormat, StudyConfig, StudyResult};
use diamag::kernel_lab::{semigroup_expansion, ExpansionOptions, ExpansionReport, HeatContext};
use diamag::spectrum::{self, BoxGrid, Spectrum};
use diamag::{Complex64, Error, Statistics};

fn small_study() -> StudyConfig {
    let mut cfg = StudyConfig::default();
    cfg.sides = vec![3.0, 4.0];
    cfg.spacing = 0.5;
    cfg.lab_sides = Vec::new();
    cfg.fugacities.random = 2;
    cfg.seed = 7;
    cfg
}

#[test]
fn spectrum_csv_round_trip() {
    let grid = BoxGrid::new(3.0, 6, 2).unwrap();
    let s = spectrum::eigen_spectrum(&spectrum::build_magnetic_hamiltonian_2d(&grid, 0.7).unwrap(), None).unwrap();
    let mut buf = Vec::new();
    s.write_csv(&mut buf).unwrap();
    let back = Spectrum::read_csv(buf.as_slice(), 3.0, 2, 0.7).unwrap();
    assert_eq!(back, s);
}

#[test]
fn chi_csv_round_trip() {
    let bx = FiniteBox::new(BoxGrid::new(3.0, 6, 2).unwrap(), 1.0).unwrap();
    let mut rows = Vec::new();
    for stats in [Statistics::Bose, Statistics::Fermi] {
        let p = ThermoParams::new(1.0, 1.0, stats, Complex64::new(0.2, -0.3)).unwrap();
        let c = susceptibility_finite(&bx, &p, 1, ChiMethod::Hellmann, &FdOptions::default()).unwrap();
        rows.push(ChiRow::new(3.0, &p, &c));
    }
    let mut buf = Vec::new();
    write_chi_csv(&rows, &mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.lines().next().unwrap().contains("chi_re"));
    assert_eq!(read_chi_csv(buf.as_slice()).unwrap(), rows);
}

#[test]
fn config_round_trips_through_toml_and_json() {
    let cfg = small_study();
    assert_eq!(StudyConfig::parse(&cfg.to_toml().unwrap()).unwrap(), cfg);
    assert_eq!(StudyConfig::parse(&cfg.to_json().unwrap()).unwrap(), cfg);
    // omitted keys fall back to the defaults
    let partial = StudyConfig::parse("sides = [4.0, 6.0]\n").unwrap();
    assert_eq!(partial.sides, vec![4.0, 6.0]);
    assert_eq!(partial.spacing, StudyConfig::default().spacing);
}

#[test]
fn config_rejects_bad_input() {
    for text in ["unknown_key = 1\n", "sides = [6.0]\n", "sides = [8.0, 6.0]\n", "spacing = 0.3\nsides = [1.0, 2.0]\n", "{\"beta\": -1}"] {
        let r = StudyConfig::parse(text).and_then(|c| c.validate());
        assert!(matches!(r, Err(Error::Config(_))), "{text:?} gave {r:?}");
    }
}

#[test]
fn study_result_round_trips_in_both_formats() {
    let res = converge_study(&small_study()).unwrap();
    assert!(!res.points.is_empty() && !res.sups.is_empty() && !res.checks.is_empty());
    assert!(res.points.iter().all(|p| !p.status.is_empty()));
    assert_eq!(StudyResult::from_json(&res.to_json().unwrap()).unwrap(), res);
    for format in [OutputFormat::Csv, OutputFormat::Json] {
        let dir = tempfile::tempdir().unwrap();
        let written = res.write(dir.path(), format).unwrap();
        assert!(written.iter().all(|p| p.exists()));
        let back = StudyResult::read(dir.path(), &res.kind, format).unwrap();
        assert_eq!(back, res, "{format:?}");
    }
}

#[test]
fn study_fugacities_are_seeded() {
    let a = converge_study(&small_study()).unwrap();
    let b = converge_study(&small_study()).unwrap();
    assert_eq!(a.fugacities, b.fugacities);
    assert_eq!(a.fugacities.len(), 6);
    let mut other = small_study();
    other.seed = 8;
    let c = converge_study(&other).unwrap();
    assert_ne!(a.fugacities, c.fugacities);
}

#[test]
fn expansion_report_json_round_trip() {
    let ctx = HeatContext::new(BoxGrid::new(3.0, 6, 2).unwrap(), 1.0, 1.0).unwrap();
    let r = semigroup_expansion(&ctx, 1, &[0.02, 0.04, 0.08], &ExpansionOptions::default()).unwrap();
    assert_eq!(ExpansionReport::from_json(&r.to_json().unwrap()).unwrap(), r);
}

#[test]
fn config_reference_is_complete_and_current() {
    assert!(undocumented_keys().is_empty(), "undocumented keys: {:?}", undocumented_keys());
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/CONFIG.md");
    let on_disk = std::fs::read_to_string(&path).unwrap();
    assert_eq!(on_disk, reference_page(), "docs/CONFIG.md is stale; regenerate with `diamag config --reference`");
}
