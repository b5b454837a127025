use std::path::PathBuf;
use std::process::{Command, Output};

fn sgpoly(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sgpoly")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("sgpoly-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    d
}

#[test]
fn params_at_one() {
    let o = sgpoly(&["params", "--r", "1"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("L = 1/25"), "{s}");
    assert!(s.contains("lam_sym = 9/25"), "{s}");
}

#[test]
fn invalid_r_exits_with_usage_status() {
    for r in ["0", "-1/2", "abc"] {
        let o = sgpoly(&["params", "--r", r]);
        assert_eq!(o.status.code(), Some(2), "r={r}");
    }
    let o = sgpoly(&["refine", "--r", "1", "--level", "8"]);
    assert_eq!(o.status.code(), Some(2));
    let o = sgpoly(&["refine", "--r", "1", "--k", "4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn table_rows_at_one() {
    let o = sgpoly(&["table", "--r", "1", "--jmax", "2"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines[0], "j,k,value,a,b,c,d,e,f,n,t");
    assert_eq!(lines.len(), 1 + 3 * 3);
    assert!(lines.contains(&"1,1,1/6,1/30,1/75,2/25,3/50,13/150,1/15,1/2,1/6"));
    assert!(lines.iter().any(|l| l.starts_with("2,1,1/180,")));
}

#[test]
fn decimal_and_fraction_inputs_agree() {
    let a = stdout(&sgpoly(&["table", "--r", "0.25", "--jmax", "3"]));
    let b = stdout(&sgpoly(&["table", "--r", "1/4", "--jmax", "3"]));
    assert_eq!(a, b);
}

#[test]
fn output_is_deterministic() {
    let args = ["spectrum", "--r", "1/2,3"];
    assert_eq!(stdout(&sgpoly(&args)), stdout(&sgpoly(&args)));
}

#[test]
fn config_file_supplies_defaults() {
    let dir = scratch("config");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.conf");
    std::fs::write(&cfg, "# table settings\nr = 2\njmax = 1\n").unwrap();
    let s = stdout(&sgpoly(&["table", "--config", cfg.to_str().unwrap()]));
    assert_eq!(s.lines().count(), 1 + 2 * 3);
    // command-line flags win over the file
    let s = stdout(&sgpoly(&["table", "--config", cfg.to_str().unwrap(), "--jmax", "2"]));
    assert_eq!(s.lines().count(), 1 + 3 * 3);
}

#[test]
fn spectrum_grid_writes_artifacts() {
    let dir = scratch("spectrum");
    let o = sgpoly(&["spectrum", "--r-min", "0.5", "--r-max", "2", "--grid", "3", "--out", dir.to_str().unwrap()]);
    assert!(o.status.success());
    for f in ["spectrum.csv", "target.csv", "spectrum.svg"] {
        assert!(dir.join(f).exists(), "{f}");
    }
    let csv = std::fs::read_to_string(dir.join("spectrum.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3 * 6);
    let svg = std::fs::read_to_string(dir.join("spectrum.svg")).unwrap();
    assert!(svg.contains("<svg") && svg.contains("polyline"));
}

#[test]
fn refine_emits_every_vertex() {
    let dir = scratch("refine");
    let o = sgpoly(&["refine", "--r", "1", "--j", "1", "--k", "2", "--level", "1", "--out", dir.to_str().unwrap()]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(dir.join("refine.csv")).unwrap();
    let mut rd = csv::Reader::from_reader(csv.as_bytes());
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert_eq!(rd.headers().unwrap(), vec!["word", "vertex_index", "x", "y", "value"]);
    assert_eq!(rows.len(), 15);
    // P_{1,2} vanishes at q0, the first corner of cell 00
    assert!(rows.iter().any(|r| &r[0] == "00" && &r[1] == "0" && &r[4] == "0"));
    assert!(dir.join("refine.svg").exists());
}

#[test]
fn conjectures_small_run() {
    let dir = scratch("conjectures");
    let o = sgpoly(&[
        "conjectures", "--jmax", "12", "--r-min", "0.2", "--r-max", "2", "--grid", "6", "--out", dir.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let summary = stdout(&o);
    assert!(summary.contains("max alpha ratio deviation"), "{summary}");
    let csv = std::fs::read_to_string(dir.join("conjectures.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 6);
    let ratios = std::fs::read_to_string(dir.join("ratios.csv")).unwrap();
    assert_eq!(ratios.lines().count(), 1 + 6 * 12);
    assert!(dir.join("roots.csv").exists() && dir.join("ratios.svg").exists());
}

#[test]
fn verify_small_run_passes() {
    let o = sgpoly(&["verify", "--r", "1,2", "--jmax", "6"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let s = stdout(&o);
    assert!(s.lines().any(|l| l.starts_with("PASS r=2 n_{j,2} = -a_j")));
    assert!(!s.contains("FAIL"));
}
