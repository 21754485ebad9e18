use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn decolab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_decolab"))
        .args(args)
        .env_remove("DECOLAB_PRECISION_BITS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_center_writes_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let o = decolab(&["solve-center", "--period", "3", "--seed", "-0.12+0.75i", "--out-dir", arg(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("c = -0.1225611668766536"));
    let m = manifest(&out);
    assert_eq!(m["command"], "solve-center");
    assert_eq!(m["params"]["period"], "3");
    assert_eq!(m["params"]["precision"], "256");
    assert_eq!(m["artifacts"][0], "result.json");
    assert!(m["versions"]["decolab"].is_string());
    let r: Value = serde_json::from_str(&fs::read_to_string(out.join("result.json")).unwrap()).unwrap();
    assert!(r["c"].as_str().unwrap().starts_with("-0.12256116687665361"));
}

#[test]
fn misiurewicz_and_parabolic() {
    let tmp = tempfile::tempdir().unwrap();
    let o = decolab(&["solve-misiurewicz", "--l", "2", "--k", "1", "--seed", "-1.9", "--out-dir", arg(tmp.path())]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("c = -2"), "{}", stdout(&o));
    assert!(stdout(&o).contains("|mu| = 4.000000"));
    let o = decolab(&[
        "solve-parabolic", "--period", "1", "--num", "1", "--den", "2", "--seed", "-0.7", "--z-seed", "-0.4", "--out-dir",
        arg(tmp.path()),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("c = -0.75"), "{}", stdout(&o));
}

#[test]
fn tune_reproduces_the_airplane_tuning() {
    // -1 ⊥ -2 is the (4,2) relation landing on the Feigenbaum-side tip -1.5436...
    let tmp = tempfile::tempdir().unwrap();
    let o = decolab(&["tune", "--s0", "-1", "--p", "2", "--l", "2", "--k", "1", "--c0", "-1.9", "--out-dir", arg(tmp.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("c1 = -1.543689012692076"), "{}", stdout(&o));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let d = arg(tmp.path());
    // usage: unknown flag, missing key, unparsable value
    assert_eq!(decolab(&["solve-center", "--perod", "4", "--out-dir", d]).status.code(), Some(2));
    assert_eq!(decolab(&["solve-center", "--period", "4", "--out-dir", d]).status.code(), Some(2));
    let o = decolab(&["solve-center", "--period", "4", "--seed", "zz", "--out-dir", d]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--seed"));
    assert_eq!(decolab(&["render", "--center", "0", "--width", "1", "--px", "3by3", "--out-dir", d]).status.code(), Some(2));
    assert_eq!(decolab(&["frobnicate"]).status.code(), Some(2));
    // domain: c = -1 satisfies the (2,2) relation only because 0 is periodic
    let o = decolab(&["solve-misiurewicz", "--l", "2", "--k", "2", "--seed", "-1", "--out-dir", d]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("degenerate"));
}

#[test]
fn config_file_and_flag_layers() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.cfg");
    fs::write(&cfg, "# period-2 center\nperiod = 2\nseed = -0.9   # near -1\n").unwrap();
    let out = tmp.path().join("a");
    let o = decolab(&["solve-center", "--config", arg(&cfg), "--out-dir", arg(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("c = -1"));
    // flags override the file
    let o = decolab(&["solve-center", "--config", arg(&cfg), "--period", "1", "--out-dir", arg(&out)]);
    assert!(stdout(&o).contains("c = 0"), "{}", stdout(&o));
    assert_eq!(manifest(&out)["params"]["period"], "1");

    fs::write(&cfg, "period = 2\nsead = -0.9\n").unwrap();
    let o = decolab(&["solve-center", "--config", arg(&cfg), "--out-dir", arg(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown key"));
}

#[test]
fn precision_env_is_recorded() {
    let tmp = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_decolab"))
        .args(["solve-center", "--period", "1", "--seed", "0.1", "--out-dir", arg(tmp.path())])
        .env("DECOLAB_PRECISION_BITS", "128")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(manifest(tmp.path())["params"]["precision"], "128");
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

/// Runs `args` into `a`, replays a's manifest into `b`, and compares every file.
fn assert_replays(args: &[&str], tmp: &Path) {
    let (a, b) = (tmp.join("a"), tmp.join("b"));
    let mut first = args.to_vec();
    first.extend(["--out-dir", arg(&a)]);
    let o = decolab(&first);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let m = a.join("manifest.json");
    let o = decolab(&[args[0], "--config", arg(&m), "--out-dir", arg(&b)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (fa, fb) = (files(&a), files(&b));
    assert!(fa.len() >= 2);
    assert_eq!(fa, fb);
}

#[test]
fn manifest_replay_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    assert_replays(
        &["build-model", "--c-prime", "-0.10+0.97i", "--r", "220", "--m-max", "3", "--samples", "40", "--rng-seed", "5"],
        &tmp.path().join("model"),
    );
    assert_replays(
        &["render", "--center", "-0.75,0.1", "--width", "0.5", "--px", "48x32", "--max-iter", "300", "--color", "distance", "--counts", "true"],
        &tmp.path().join("render"),
    );
    assert_replays(
        &["cascade", "--c1", "-0.75", "--base", "-0.12+0.74i", "--base-period", "3", "--dq", "2", "--count", "4", "--precision", "128", "--tol", "1e-30"],
        &tmp.path().join("cascade"),
    );
}

#[test]
fn render_with_overlay_and_julia_mode() {
    let tmp = tempfile::tempdir().unwrap();
    let cloud = tmp.path().join("pts.csv");
    fs::write(&cloud, "re,im,level\n0.0,0.0,\n0.1,0.1,1\n5.0,5.0,\n").unwrap();
    let o = decolab(&[
        "render", "--center", "0", "--width", "3", "--px", "30x30", "--max-iter", "200", "--mode", "julia:-1", "--overlay",
        arg(&cloud), "--out", "j.ppm", "--out-dir", arg(tmp.path()),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("3 points, 1 outside"));
    assert!(fs::read(tmp.path().join("j.ppm")).unwrap().starts_with(b"P6"));
}

#[test]
fn zoom_schedule_writes_numbered_frames() {
    let tmp = tempfile::tempdir().unwrap();
    let sched = tmp.path().join("z.cfg");
    fs::write(
        &sched,
        "center = -0.75+0.1i\nwidth_start = 1\nwidth_end = 1e-3\nframes = 4\npx = 16x12\nmax_iter = 500\n",
    )
    .unwrap();
    let out = tmp.path().join("z");
    let o = decolab(&["zoom", "--schedule", arg(&sched), "--out-dir", arg(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let m = manifest(&out);
    let names: Vec<_> = m["artifacts"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect();
    assert_eq!(names, ["001.png", "002.png", "003.png", "004.png"]);
    assert_eq!(m["params"]["precision"], "auto");
    for n in &names {
        assert!(out.join(n).exists());
    }
}

#[test]
fn semihyp_and_winding() {
    let tmp = tempfile::tempdir().unwrap();
    let o = decolab(&["semihyp", "--c", "-2", "--n-iter", "500", "--delta", "0.5", "--out-dir", arg(tmp.path())]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("classification = heuristically semihyperbolic"));
    assert!(stdout(&o).contains("not a proof"));
    let r: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(r["passed"], true);

    let o = decolab(&["winding", "--period", "2", "--center", "-0.5", "--radius", "1", "--out-dir", arg(tmp.path())]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("winding = 2"));
    let o = decolab(&["winding", "--map", "misiurewicz", "--l", "2", "--k", "1", "--center", "-2", "--radius", "0.1", "--out-dir", arg(tmp.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("winding = "));
}
