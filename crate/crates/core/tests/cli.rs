use std::path::Path;
use std::process::Command;

use nalgebra::DMatrix;
use nngp::finite_net::load_dump;

fn nngp(args: &[&str], out: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_nngp")).args(args).arg("--out").arg(out).output().expect("binary runs")
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn text(dir: &Path, name: &str) -> String {
    String::from_utf8(read(dir, name)).unwrap()
}

fn json(dir: &Path, name: &str) -> serde_json::Value {
    serde_json::from_slice(&read(dir, name)).unwrap()
}

#[test]
fn mmd_is_byte_identical_for_the_same_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["mmd", "--scheme", "f1", "--depth", "4", "--widths", "8,32", "--samples", "60", "--permutations", "20", "--seed", "5"];
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    assert!(nngp(&args, &a).status.success());
    assert!(nngp(&args, &b).status.success());
    for f in ["mmd.csv", "mmd.json"] {
        assert_eq!(read(&a, f), read(&b, f), "{f}");
    }
    let mut other = args.to_vec();
    *other.last_mut().unwrap() = "6";
    assert!(nngp(&other, &c).status.success());
    assert_ne!(read(&a, "mmd.csv"), read(&c, "mmd.csv"));

    let csv = text(&a, "mmd.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("width,mmd2,null_low,null_high"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!((rows[0][0], rows[1][0]), ("8", "32"));
    for r in &rows {
        let lo: f64 = r[2].parse().unwrap();
        let hi: f64 = r[3].parse().unwrap();
        assert!(lo <= hi);
    }
}

#[test]
fn grid_outputs_and_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["grid", "--dataset", "xor", "--depth", "3", "--grid", "-1:1:0.5:3:6", "--target", "log-posterior"];
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(nngp(&args, &a).status.success());
    assert!(nngp(&args, &b).status.success());
    for f in ["grid.csv", "grid_mu0.csv", "grid.json"] {
        assert_eq!(read(&a, f), read(&b, f), "{f}");
    }
    let csv = text(&a, "grid.csv");
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 7);
    let header: Vec<&str> = lines[0].split(',').collect();
    assert_eq!(header.len(), 7);
    assert_eq!(header[1], "-1.0000000000000000e0");
    assert_eq!(header[6], "1.0000000000000000e0");
    let meta = json(&a, "grid.json");
    assert!(meta["argmax"]["value"].as_f64().unwrap().is_finite());
    assert_eq!(meta["argmax_mu0"]["mu"].as_f64(), Some(0.0));
}

#[test]
fn fit_estimators() {
    let tmp = tempfile::tempdir().unwrap();
    for est in ["mle", "map", "mle-mu0", "map-mu0", "marginal"] {
        let dir = tmp.path().join(est);
        let out = nngp(&["fit", "--dataset", "sine", "--estimator", est, "--grid", "-2:1:0.2:4:12", "--samples", "20"], &dir);
        assert!(out.status.success(), "{est}: {}", String::from_utf8_lossy(&out.stderr));
        let report = json(&dir, "fit.json");
        assert!(report["test_mse"].as_f64().unwrap() < report["test_target_variance"].as_f64().unwrap(), "{est}");
        if est.ends_with("mu0") {
            assert_eq!(report["hyperparameters"]["mu"].as_f64(), Some(0.0));
        }
        assert_eq!(text(&dir, "predictive.csv").lines().next(), Some("split,x1,y,mean,variance"));
    }
    assert!(tmp.path().join("marginal/chain.csv").exists());
}

#[test]
fn kernel_curve_zero_mean_matches_reference_column() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(nngp(&["kernel-curve", "--depth", "4", "--slope", "0.2"], tmp.path()).status.success());
    let csv = text(tmp.path(), "kernel_curve.csv");
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("theta,normalised,zero_mean_reference"));
    for l in lines {
        let v: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
        assert!((v[1] - v[2]).abs() < 1e-10, "{l}");
    }
}

#[test]
fn mh_chain_written() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(nngp(&["mh", "--dataset", "sine", "--samples", "15", "--seed", "2"], tmp.path()).status.success());
    let csv = text(tmp.path(), "chain.csv");
    assert_eq!(csv.lines().count(), 16);
    assert!(json(tmp.path(), "chain.json")["acceptance_rate"].as_f64().is_some());
}

#[test]
fn weight_dump_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let out = nngp(&["prior-draws", "--depth", "3", "--width", "16", "--scheme", "f3", "--dump-weights", "--draws", "2", "--points", "10"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = json(tmp.path(), "weights.json");
    assert_eq!(manifest["dtype"], "float64-le");
    let layers = manifest["layers"].as_array().unwrap();
    let shapes: Vec<(u64, u64)> = layers.iter().map(|l| (l["rows"].as_u64().unwrap(), l["cols"].as_u64().unwrap())).collect();
    assert_eq!(shapes, vec![(16, 2), (16, 16), (1, 16)]);
    let total: u64 = shapes.iter().map(|(r, c)| r * c).sum();
    assert_eq!(read(tmp.path(), "weights.bin").len() as u64, 8 * total);
    let net = load_dump(&tmp.path().join("weights.bin"), &tmp.path().join("weights.json")).unwrap();
    let x = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
    assert_eq!(net.forward(&x).unwrap().shape(), (2, 1));
    assert_eq!(text(tmp.path(), "prior_draws.csv").lines().next(), Some("t,f1,f2"));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| nngp(args, tmp.path()).status.code();
    assert_eq!(code(&["fit", "--estimator", "mode"]), Some(2));
    assert_eq!(code(&["grid", "--grid", "1:0:0.1:2:5"]), Some(2));
    assert_eq!(code(&["grid", "--sigma2", "-1"]), Some(2));
    assert_eq!(code(&["mmd", "--widths", "64,16"]), Some(2));
    assert_eq!(code(&["fit", "--dataset", "snelson:/nonexistent/file.txt"]), Some(1));
    assert_eq!(code(&["no-such-command"]), Some(2));
    let bad = tmp.path().join("bad.txt");
    std::fs::write(&bad, "1 2\n3\n").unwrap();
    assert_eq!(code(&["fit", "--dataset", &format!("snelson:{}", bad.display())]), Some(2));
}
