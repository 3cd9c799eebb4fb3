use std::io::{BufRead, BufReader};
use std::path::Path;
use std::process::{Child, Command, Output, Stdio};

fn sldc<P: AsRef<Path>>(dir: P, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sldc"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("run sldc")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn capacity_prints_exact_values() {
    let o = sldc(".", &["capacity", "--n", "2", "--k", "3"]);
    assert!(o.status.success());
    let s = stdout(&o);
    for line in ["capacity C*       8/7", "min length M*     8", "PIR capacity      4/7", "upload bits       2"] {
        assert!(s.contains(line), "{s}");
    }
    let j: serde_json::Value =
        serde_json::from_slice(&sldc(".", &["capacity", "--n", "3", "--k", "3", "--format", "json"]).stdout).unwrap();
    assert_eq!(j["capacity_uldc"], "27/13");
}

#[test]
fn build_then_verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    assert!(sldc(&dir, &["build", "--n", "3", "--k", "3", "--out", "c.json"]).status.success());
    let o = sldc(&dir, &["verify", "c.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let s = stdout(&o);
    assert!(s.lines().any(|l| l.starts_with("PASS converse")));
    assert!(s.lines().any(|l| l.starts_with("SKIP min-distance")));
    assert!(s.ends_with("result: PASS\n"));
}

#[test]
fn nonsmooth_fixture_fails_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    assert!(sldc(&dir, &["fixture", "--name", "intro_nonsmooth", "--out", "f.json"]).status.success());
    let o = sldc(&dir, &["verify", "f.json", "--checks", "smoothness,correctness"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(
        stdout(&o).lines().nth(1).unwrap(),
        "FAIL smoothness    S_1: X_1 lies in 3 sets but X_2 lies in 1"
    );

    let o = sldc(&dir, &["verify", "f.json", "--checks", "smoothness", "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let j: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(j["pass"], false);
    assert_eq!(j["checks"][0]["status"], "FAIL");
    assert_eq!(j["checks"][0]["detail"]["witness"]["symbols"][0], "X_1");
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    sldc(&dir, &["build", "--n", "2", "--k", "2", "--out", "c.json"]);
    assert_eq!(sldc(&dir, &["verify", "c.json", "--checks", ""]).status.code(), Some(2));
    assert_eq!(sldc(&dir, &["verify", "c.json", "--checks", "nope"]).status.code(), Some(2));
    assert_eq!(sldc(&dir, &["verify", "c.json", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(sldc(&dir, &["verify", "missing.json"]).status.code(), Some(2));
    assert_eq!(sldc(&dir, &["fixture", "--name", "fig9"]).status.code(), Some(2));
    assert_eq!(sldc(&dir, &["frobnicate"]).status.code(), Some(2));
    assert_eq!(sldc(&dir, &["--help"]).status.code(), Some(0));
}

#[test]
fn tampered_document_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let text = String::from_utf8(sldc(&dir, &["build", "--n", "2", "--k", "2"]).stdout).unwrap();
    std::fs::write(dir.path().join("t.json"), text.replacen("\"X_1\"", "\"X_9\"", 1)).unwrap();
    let o = sldc(&dir, &["verify", "t.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("hash mismatch"));
}

#[test]
fn pir_audit_reports_capacity() {
    let dir = tempfile::tempdir().unwrap();
    sldc(&dir, &["build", "--n", "2", "--k", "3", "--out", "c.json"]);
    let o = sldc(&dir, &["pir-audit", "c.json"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("PASS privacy") && s.contains("PASS deniability"), "{s}");
    assert!(s.contains("rate              4/7 (capacity 4/7)"), "{s}");
}

struct Server(Child);

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.0.kill();
        let _ = self.0.wait();
    }
}

fn spawn_server(dir: &Path, db: usize) -> (Server, String) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_sldc"))
        .current_dir(dir)
        .args(["serve", "c.json", "--db", &db.to_string(), "--messages", "m.bin", "--listen", "127.0.0.1:0"])
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stdout.take().unwrap()).read_line(&mut line).unwrap();
    let addr = line.trim().rsplit(' ').next().unwrap().to_string();
    (Server(child), addr)
}

#[test]
fn serve_and_retrieve_over_tcp() {
    let dir = tempfile::tempdir().unwrap();
    sldc(&dir, &["build", "--n", "2", "--k", "3", "--out", "c.json"]);
    // W_1 = 0x11, W_2 = 0x22, W_3 = 0x33 (L_w = 8)
    std::fs::write(dir.path().join("m.bin"), [0x11, 0x22, 0x33]).unwrap();
    let (_a, ea) = spawn_server(dir.path(), 1);
    let (_b, eb) = spawn_server(dir.path(), 2);
    let endpoints = format!("{ea},{eb}");
    for (theta, hex) in [("1", "11"), ("2", "22"), ("3", "33")] {
        let o = sldc(&dir, &["retrieve", "c.json", "--theta", theta, "--endpoints", &endpoints, "--seed", "4"]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let s = stdout(&o);
        assert!(s.starts_with(&format!("W_{theta} = {hex}\n")), "{s}");
        assert_eq!(s.matches("upload 2 bits (2.000 information), download 7 bits").count(), 2, "{s}");
    }
    let o = sldc(&dir, &["retrieve", "c.json", "--theta", "4", "--endpoints", &endpoints]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn retrieve_names_the_unreachable_database() {
    let dir = tempfile::tempdir().unwrap();
    sldc(&dir, &["build", "--n", "2", "--k", "2", "--out", "c.json"]);
    std::fs::write(dir.path().join("m.bin"), [0xAB]).unwrap();
    let (_a, ea) = spawn_server(dir.path(), 1);
    // bind and release a port so nothing listens there
    let dead = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().to_string();
    let o = sldc(&dir, &["retrieve", "c.json", "--theta", "1", "--endpoints", &format!("{ea},{dead}")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("database 2"));
}
