use std::fs;
use std::process::{Command, Output};

fn conics(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conics")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn build_then_fano() {
    let o = conics(&["build"]);
    assert!(o.status.success());
    let j: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(j["gram"].as_array().unwrap().len(), 17);
    assert_eq!(j["delta"].as_array().unwrap().len(), 16);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("minimal.json");
    fs::write(&path, stdout(&o)).unwrap();
    let p = path.to_str().unwrap();
    let o = conics(&["fano", p]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "0 lines, 0+32 conics, depth 2");

    let o = conics(&["--format", "json", "fano", p]);
    let j: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(j.is_object());

    let out = dir.path().join("out");
    let o = conics(&["--out", out.to_str().unwrap(), "depth", p]);
    assert!(o.status.success());
    assert_eq!(fs::read_to_string(out.join("depth.txt")).unwrap().trim(), "2");
}

#[test]
fn polarization_alone_has_no_curves() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.json");
    fs::write(&path, r#"{"gram": [[8]], "h": [1]}"#).unwrap();
    let o = conics(&["fano", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "0 lines, 0+0 conics, depth 8");
}

#[test]
fn bad_input_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    for text in ["{", r#"{"gram": [[3]], "h": [1]}"#, r#"{"gram": [[-2]], "h": [1]}"#] {
        fs::write(&path, text).unwrap();
        let o = conics(&["fano", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "input {text}");
    }
    let o = conics(&["depth", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn census_codim_is_bounded() {
    let o = conics(&["census", "--codim", "4"]);
    assert!(!o.status.success());
}
