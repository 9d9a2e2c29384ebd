use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn nlspring(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlspring")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn identity_columns_are_constant() {
    let out = nlspring(&["scan", "--family", "identity", "--nbar", "4", "--tau-end", "3", "--steps", "31", "--quantities", "p0,sx,sp"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let (header, rows) = parse_csv(&stdout(&out));
    assert_eq!(header, ["tau", "p0", "sx", "sp"]);
    assert_eq!(rows.len(), 31);
    assert_eq!(rows[30][0], 3.0);
    for row in rows {
        for v in &row[1..] {
            assert!((v - 1.0).abs() <= 1e-12);
        }
    }
}

#[test]
fn header_order_is_canonical() {
    let out = nlspring(&["scan", "--family", "rai_agarwal", "--mu", "0.1", "--nbar", "2", "--tau-end", "1", "--steps", "3", "--quantities", "sp,p0,pcl"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("tau,p0,pcl,sp\n"));
}

#[test]
fn first_row_is_one_for_every_quantity() {
    let out = nlspring(&["scan", "--family", "q_deformed", "--lambda", "0.1", "--nbar", "9", "--tau-end", "2", "--steps", "5"]);
    assert!(out.status.success());
    let (header, rows) = parse_csv(&stdout(&out));
    assert_eq!(header, ["tau", "p0", "pcl", "sx", "sp"]);
    for v in &rows[0][1..] {
        assert!((v - 1.0).abs() < 1e-10);
    }
    assert!(stderr(&out).contains("support_len="));
}

#[test]
fn zero_omega_exits_3_naming_p0() {
    let out = nlspring(&["scan", "--family", "photon_added", "--m", "2", "--nbar", "1", "--tau-end", "1", "--omega-policy", "strict"]);
    assert_eq!(out.status.code(), Some(3));
    let err = stderr(&out);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.contains("p=0"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn negative_omega_exits_3_unless_absolute() {
    let base = ["scan", "--family", "photon_added", "--m", "3", "--nbar", "1", "--tau-end", "1", "--steps", "4"];
    let strict = nlspring(&base);
    assert_eq!(strict.status.code(), Some(3));
    assert!(stderr(&strict).starts_with("error: non_positive_omega: p=1 "));
    let mut abs = base.to_vec();
    abs.extend(["--omega-policy", "absolute"]);
    let out = nlspring(&abs);
    assert!(out.status.success());
    assert!(stderr(&out).contains("warning:"));
}

#[test]
fn validation_errors_exit_2_on_one_line() {
    for args in [
        vec!["scan", "--family", "q_deformed", "--nbar", "1", "--tau-end", "1"],
        vec!["scan", "--family", "q_deformed", "--lambda", "-0.1", "--nbar", "1", "--tau-end", "1"],
        vec!["scan", "--family", "identity", "--nbar", "1", "--tau-start", "2", "--tau-end", "1"],
        vec!["scan", "--family", "identity", "--nbar", "1", "--tau-end", "1", "--steps", "1"],
        vec!["scan", "--family", "identity", "--nbar", "1", "--tau-end", "1", "--format", "xml"],
        vec!["scan", "--family", "identity", "--nbar", "1", "--tau-end", "1", "--nonsense"],
        vec!["profile", "--family", "photon_added", "--m", "0"],
    ] {
        let out = nlspring(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = stderr(&out);
        assert_eq!(err.lines().count(), 1, "{args:?}: {err}");
        assert!(err.starts_with("error: "), "{err}");
    }
}

fn write_spectrum(dir: &Path, levels: &[f64]) -> String {
    let path = dir.join("levels.txt");
    let text: String = levels.iter().map(|e| format!("{e}\n")).collect();
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn custom_spectrum_scan_and_pcl_rejection() {
    let dir = tempfile::tempdir().unwrap();
    let levels: Vec<f64> = (0..60).map(|n| n as f64 * (1.0 + 0.01 * n as f64)).collect();
    let spectrum = write_spectrum(dir.path(), &levels);
    let out = nlspring(&["scan", "--family", "custom", "--spectrum", &spectrum, "--nbar", "2", "--tau-end", "1", "--steps", "3"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).starts_with("tau,p0,sx,sp\n"));

    let pcl = nlspring(&["scan", "--family", "custom", "--spectrum", &spectrum, "--nbar", "2", "--tau-end", "1", "--quantities", "pcl"]);
    assert_eq!(pcl.status.code(), Some(2));

    // support reaches past the supplied levels
    let short = write_spectrum(dir.path(), &levels[..4]);
    let out = nlspring(&["scan", "--family", "custom", "--spectrum", &short, "--nbar", "9", "--tau-end", "1"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));

    let bad = write_spectrum(dir.path(), &[0.5, 1.0, 2.0]);
    let out = nlspring(&["profile", "--family", "custom", "--spectrum", &bad, "--p-max", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_spectrum_file_is_io_error() {
    let out = nlspring(&["scan", "--family", "custom", "--spectrum", "/nonexistent/levels.txt", "--nbar", "1", "--tau-end", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

fn profile_rows(args: &[&str]) -> Vec<(usize, f64, f64)> {
    let out = nlspring(args);
    assert!(out.status.success(), "{}", stderr(&out));
    stdout(&out)
        .lines()
        .skip(1)
        .map(|l| {
            let cells: Vec<&str> = l.split_whitespace().collect();
            (cells[0].parse().unwrap(), cells[1].parse().unwrap(), cells[2].parse().unwrap())
        })
        .collect()
}

#[test]
fn profile_tables() {
    let id = profile_rows(&["profile", "--family", "identity", "--p-max", "3"]);
    assert_eq!(id, (0..4).map(|p| (p, 1.0, 1.0)).collect::<Vec<_>>());

    let ra = profile_rows(&["profile", "--family", "rai_agarwal", "--mu", "1", "--p-max", "3"]);
    assert!((ra[3].2 - 2.0).abs() < 1e-12);

    let q = profile_rows(&["profile", "--family", "q_deformed", "--lambda", "0.2", "--p-max", "3"]);
    assert!((q[3].2 - 1.2489192040457775).abs() < 1e-12);

    let pacs = profile_rows(&["profile", "--family", "photon_added", "--m", "-2", "--p-max", "0"]);
    assert_eq!(pacs.len(), 1);
    assert!((pacs[0].2 - 4.0).abs() < 1e-12); // f(1) = 1 + 2/2
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# q-deformed run\nfamily = q_deformed\nlambda = 0.1\nnbar = 9\ntau_start = 0\ntau-end = 2\nsteps = 11\nquantities = p0\nout = result.csv\n",
    )
    .unwrap();
    let out = nlspring(&["scan", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let from_file = fs::read_to_string(dir.path().join("result.csv")).unwrap();
    assert_eq!(from_file.lines().count(), 12);

    let direct = nlspring(&["scan", "--family", "q_deformed", "--lambda", "0.1", "--nbar", "9", "--tau-end", "2", "--steps", "11", "--quantities", "p0"]);
    assert_eq!(stdout(&direct), from_file);

    let overridden = nlspring(&["scan", "--config", cfg.to_str().unwrap(), "--lambda", "0.2", "--out", "-"]);
    assert!(overridden.status.success());
    assert_ne!(stdout(&overridden), from_file);
}

#[test]
fn json_output_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("out.json");
    let svg = dir.path().join("out.svg");
    let out = nlspring(&[
        "scan", "--family", "photon_added", "--m", "1", "--nbar", "1", "--tau-end", "2", "--steps", "21",
        "--format", "json", "--out", json.to_str().unwrap(), "--plot", svg.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["columns"].as_array().unwrap().len(), 5);
    assert_eq!(v["rows"].as_array().unwrap().len(), 21);
    assert!(v["diagnostics"]["support_len"].as_u64().unwrap() > 1);
    let svg = fs::read_to_string(&svg).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<polyline").count(), 4);
}

#[test]
fn unwritable_output_is_io_error() {
    let out = nlspring(&["scan", "--family", "identity", "--nbar", "1", "--tau-end", "1", "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(out.status.code(), Some(1));
}
