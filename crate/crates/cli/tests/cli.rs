use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn sierpile(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sierpile"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn summary(o: &Output) -> Value {
    let stdout = String::from_utf8_lossy(&o.stdout);
    let line = stdout.lines().last().expect("summary line");
    serde_json::from_str(line).expect("summary is JSON")
}

fn run_dir(s: &Value) -> PathBuf {
    PathBuf::from(s["dir"].as_str().unwrap())
}

#[test]
fn sandpile_summary_reports_radius() {
    let tmp = tempfile::tempdir().unwrap();
    let o = sierpile(tmp.path(), &["sandpile", "--m", "108", "--render", "png"]);
    assert_eq!(o.status.code(), Some(0));
    let s = summary(&o);
    assert_eq!(s["result"]["r"], 10);
    assert_eq!(s["result"]["sink_trace"][0], serde_json::json!([3, 15]));
    let dir = run_dir(&s);
    assert!(dir
        .file_name()
        .unwrap()
        .to_str()
        .unwrap()
        .starts_with("sandpile-"));
    assert!(dir.join("cluster.png").exists());
    assert!(dir.join("summary.json").exists());
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(sierpile(tmp.path(), &["sandpile"]).status.code(), Some(1));
    assert_eq!(sierpile(tmp.path(), &["nonsense"]).status.code(), Some(1));
    assert_eq!(
        sierpile(
            tmp.path(),
            &["rotor", "--m", "5", "--mechanism", "sideways"]
        )
        .status
        .code(),
        Some(1)
    );
    assert_eq!(
        sierpile(tmp.path(), &["build", "--level", "13"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        sierpile(tmp.path(), &["sandpile", "--m", "100000000000"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        sierpile(tmp.path(), &["idla", "--radius", "8", "--runs", "0"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn table_csv_has_level_blocks() {
    let tmp = tempfile::tempdir().unwrap();
    let o = sierpile(tmp.path(), &["table", "--nmax", "2", "--csv"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(run_dir(&summary(&o)).join("table.csv")).unwrap();
    assert!(csv.starts_with(
        "# n=0\nm_over_3n,m,m_prime,m_minus_2m_prime,delta_r\n,2,1,0,1\n,8,4,0,1\n# n=1\n"
    ));
    assert!(csv.contains("\n4,36,6,24,1\n"));
    assert!(csv.contains("# n=3\n"));
}

#[test]
fn identity_suite_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let o = sierpile(
        tmp.path(),
        &["verify", "--suite", "identities", "--nmax", "3"],
    );
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(summary(&o)["result"]["failed"], 0);
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [
        "idla", "--radius", "6", "--runs", "8", "--seed", "5", "--format", "csv,png",
    ];
    let (oa, ob) = (sierpile(a.path(), &args), sierpile(b.path(), &args));
    let (sa, sb) = (summary(&oa), summary(&ob));
    assert_eq!(sa["hash"], sb["hash"]);
    assert_eq!(sa["result"], sb["result"]);
    for f in ["stats.csv", "fluctuations.png", "summary.json"] {
        let fa = std::fs::read(run_dir(&sa).join(f)).unwrap();
        let fb = std::fs::read(run_dir(&sb).join(f)).unwrap();
        if f == "summary.json" {
            // The summary names its own directory, which differs by output root.
            let strip = |v: &[u8]| {
                let mut j: Value = serde_json::from_slice(v).unwrap();
                j["dir"] = Value::Null;
                j
            };
            assert_eq!(strip(&fa), strip(&fb));
        } else {
            assert_eq!(fa, fb, "{f}");
        }
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# sandpile run\nm = 12\nengine = naive\nformat = json\n",
    )
    .unwrap();
    let o = sierpile(
        tmp.path(),
        &["sandpile", "--config", cfg.to_str().unwrap(), "--m", "108"],
    );
    assert_eq!(o.status.code(), Some(0));
    let s = summary(&o);
    assert_eq!(s["config"]["m"], 108);
    assert_eq!(s["config"]["engine"], "naive");
    assert_eq!(s["result"]["r"], 10);
    assert!(run_dir(&s).join("record.json").exists());
}

#[test]
fn render_writes_png_and_svg_from_one_layout() {
    let tmp = tempfile::tempdir().unwrap();
    let o = sierpile(
        tmp.path(),
        &["render", "--tile", "e_3", "--format", "png,svg"],
    );
    assert_eq!(o.status.code(), Some(0));
    let dir = run_dir(&summary(&o));
    let svg = std::fs::read_to_string(dir.join("tile.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    // One rectangle per vertex of G_3 plus the background.
    assert_eq!(svg.matches("<rect").count(), 42 + 1);
    assert!(std::fs::read(dir.join("tile.png"))
        .unwrap()
        .starts_with(b"\x89PNG"));
}
