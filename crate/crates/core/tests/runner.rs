use crofton::runner::{emit_csv, parse_config, read_csv, run, Job, Mode, ResultRow, CSV_HEADER};
use crofton::Error;

const VERTICAL_ROTATOR: &str = r#"
mode = "estimate"
id = "rotator"
n = 3
k = 2
r = 1
j = 0
q = 0
body = "ball"
outer_samples = 4000
seed = 9
"#;

fn without_time(rows: &[ResultRow]) -> Vec<ResultRow> {
    rows.iter().cloned().map(|r| ResultRow { seconds: 0.0, ..r }).collect()
}

#[test]
fn index_ranges_in_configs() {
    assert!(parse_config(VERTICAL_ROTATOR).is_ok());
    let j1 = VERTICAL_ROTATOR.replace("j = 0", "j = 1").replace("q = 0", "q = 1");
    let err = parse_config(&format!("{j1}design = \"rotational\"\n")).unwrap_err();
    assert!(matches!(&err, Error::Config { key, .. } if key == "j"), "{err}");
    assert!(err.to_string().contains("j <= k-(r+1) = 0"), "{err}");
    assert!(parse_config(&format!("{j1}design = \"vertical\"\n")).is_ok());
}

#[test]
fn config_diagnostics_name_keys() {
    let cases = [
        (VERTICAL_ROTATOR.replace("n = 3", "n = 2"), "n"),
        (VERTICAL_ROTATOR.replace("k = 2", "k = 4"), "k"),
        (VERTICAL_ROTATOR.replace("q = 0", "q = 1"), "q"),
        (VERTICAL_ROTATOR.replace("body = \"ball\"", "body = \"cone\""), "body"),
        (VERTICAL_ROTATOR.replace("outer_samples = 4000", "outer_samples = 0"), "outer_samples"),
        (format!("{VERTICAL_ROTATOR}center = [0.0, 0.0]\n"), "center"),
        (format!("{VERTICAL_ROTATOR}reference_radius = 0.5\n"), "reference_radius"),
        (format!("{VERTICAL_ROTATOR}route = \"radial\"\ndesign = \"vertical\"\n"), "route"),
        (VERTICAL_ROTATOR.replace("mode = \"estimate\"", "mode = \"plot\""), "mode"),
    ];
    for (text, expected) in cases {
        match parse_config(&text) {
            Err(Error::Config { key, .. }) => assert_eq!(key, expected),
            other => panic!("expected a diagnostic for `{expected}`, got {other:?}"),
        }
    }
}

#[test]
fn box_and_polytope_bodies() {
    let boxed = VERTICAL_ROTATOR.replace(
        "body = \"ball\"",
        "body = \"box\"\nlower = [-0.3, -0.45, -0.6]\nupper = [0.7, 0.55, 0.4]",
    );
    let rows = run(&parse_config(&boxed).unwrap(), 2).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].body, "box");
    assert_eq!(rows[0].exact, Some(1.0));

    let poly = VERTICAL_ROTATOR.replace(
        "body = \"ball\"",
        "body = \"polytope\"\nnormals = [[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]\noffsets = [0.5, 0.5, 0.5, 0.5, 0.5, 0.5]",
    );
    let rows = run(&parse_config(&poly).unwrap(), 2).unwrap();
    assert_eq!(rows[0].exact, None);
    assert_eq!(rows[0].z, None);
    assert!((rows[0].mean - 1.0).abs() < 6.0 * rows[0].stderr, "{:?}", rows[0]);
}

#[test]
fn estimate_row_and_determinism() {
    let config = parse_config(VERTICAL_ROTATOR).unwrap();
    let one = run(&config, 1).unwrap();
    let three = run(&config, 3).unwrap();
    assert_eq!(without_time(&one), without_time(&three));
    let row = &one[0];
    assert_eq!(row.mode, Mode::Estimate);
    assert_eq!(row.samples, 4000);
    let exact = row.exact.unwrap();
    assert!((exact - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-12);
    assert_eq!(row.z, Some((row.mean - exact) / row.stderr));
}

#[test]
fn convergence_rows_shrink() {
    let text = VERTICAL_ROTATOR.replace("mode = \"estimate\"", "mode = \"convergence\"").replace("4000", "100000");
    let rows = run(&parse_config(&text).unwrap(), 2).unwrap();
    let counts: Vec<u64> = rows.iter().map(|r| r.samples).collect();
    assert_eq!(counts, vec![1_000, 10_000, 100_000]);
    for w in rows.windows(2) {
        let ratio = w[0].stderr / w[1].stderr;
        assert!((2.0..5.0).contains(&ratio), "stderr ratio {ratio}");
    }
}

#[test]
fn csv_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.csv");
    let rows = run(&parse_config(VERTICAL_ROTATOR).unwrap(), 2).unwrap();
    emit_csv(&rows, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
    let back = read_csv(&path).unwrap();
    assert_eq!(back.len(), 1);
    assert_eq!(back[0].mean.to_bits(), rows[0].mean.to_bits());
    assert_eq!(back[0].stderr.to_bits(), rows[0].stderr.to_bits());
    assert_eq!(back[0].z.map(f64::to_bits), rows[0].z.map(f64::to_bits));
    assert_eq!(back[0], rows[0]);
}

#[test]
fn empty_rows_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("none.csv");
    assert!(emit_csv(&[], &path).is_err());
    assert!(!path.exists());
}

#[test]
fn verify_rows_carry_check_names() {
    let config = parse_config("mode = \"verify\"\nid = \"quick\"\nbudget = 20000\nseed = 4\n").unwrap();
    assert!(matches!(config.job, Job::Battery { budget: 20000 }));
    let rows = run(&config, 2).unwrap();
    assert!(rows.len() > 20);
    assert!(rows.iter().all(|r| r.experiment_id.starts_with("quick:") && r.indices.is_none()));
    assert!(parse_config("mode = \"verify\"\nn = 3\n").is_err());
}

#[test]
fn shipped_configs_parse() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            crofton::runner::read_config(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            seen += 1;
        }
    }
    assert!(seen >= 4);
}
