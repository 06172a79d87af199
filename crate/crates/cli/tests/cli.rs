use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::Value;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn omlat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_omlat"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

/// Runs a subcommand against `config` and returns its output.
fn run(sub: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        sub,
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    omlat(&args)
}

fn ok(o: &Output) {
    assert!(
        o.status.success(),
        "exit {:?}\nstdout: {}\nstderr: {}",
        o.status.code(),
        String::from_utf8_lossy(&o.stdout),
        String::from_utf8_lossy(&o.stderr)
    );
}

fn paper_1d() -> PathBuf {
    configs().join("paper_1d.cfg")
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn read_csv(p: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(p).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("run.cfg");
    fs::write(&p, text).unwrap();
    p
}

/// Bulk gap of the device chain from its 2×2 Bloch matrix, written out here
/// independently of the library: `[ε − |ρ|, ε + |ρ|]` with `ε = 2·J2·cos k`.
fn device_bulk_gap() -> (f64, f64) {
    let (j, jp, j2, j3, j3p) = (470e6, 700e6, 100e6, 27e6, 37e6);
    let mut top_of_lower = f64::NEG_INFINITY;
    let mut bottom_of_upper = f64::INFINITY;
    for i in 0..20_000 {
        let k = -PI + 2.0 * PI * i as f64 / 20_000.0;
        let e = |n: f64| Complex64::from_polar(1.0, -n * k);
        let rho = j + jp * e(1.0) + j3 * e(-1.0) + j3p * e(2.0);
        let eps = 2.0 * j2 * k.cos();
        top_of_lower = top_of_lower.max(eps - rho.norm());
        bottom_of_upper = bottom_of_upper.min(eps + rho.norm());
    }
    (7.12e9 + top_of_lower, 7.12e9 + bottom_of_upper)
}

/// Eigenvalues of the device chain assembled bond by bond.
fn device_eigenvalues() -> Vec<f64> {
    let mut h = DMatrix::<f64>::identity(10, 10) * 7.12e9;
    let mut bond = |a: usize, b: usize, v: f64| {
        if b < 10 {
            h[(a, b)] = v;
            h[(b, a)] = v;
        }
    };
    for i in 0..10 {
        bond(i, i + 1, if i % 2 == 0 { 470e6 } else { 700e6 });
        bond(i, i + 2, 100e6);
        if i % 2 == 0 {
            bond(i, i + 3, 27e6);
        } else {
            bond(i, i + 3, 37e6);
        }
    }
    let mut e: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

#[test]
fn device_chain_spectrum_has_two_mid_gap_modes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("spec");
    ok(&run("spectrum", &paper_1d(), &out, &[]));
    let (header, rows) = read_csv(&out.join("eigenfreqs.csv"));
    assert_eq!(
        header,
        ["mode", "eigenfreq_hz", "band", "mid_gap", "edge_weight"]
    );
    assert_eq!(rows.len(), 10);
    let oracle = device_eigenvalues();
    let (lo, hi) = device_bulk_gap();
    let mut mid = 0;
    for (row, want) in rows.iter().zip(&oracle) {
        let f: f64 = row[1].parse().unwrap();
        assert!((f - want).abs() < 1e-3, "{f} vs {want}");
        let in_gap = f > lo && f < hi;
        assert_eq!(row[3] == "true", in_gap, "mode {}", row[0]);
        mid += usize::from(in_gap);
    }
    assert_eq!(mid, 2);
    for name in [
        "modeshapes.csv",
        "participation.csv",
        "hamiltonian.csv",
        "passbands.json",
    ] {
        assert!(out.join(name).is_file(), "{name}");
    }
}

#[test]
fn smallest_chain_prints_one_row_per_site() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[lattice]\nkind = \"ssh_chain\"\nn_cells = 1\ncouplings = { j = 1e6, jp = 2e6 }\nsites = { cavity_freq = 5e9 }\n",
    );
    let out = tmp.path().join("o");
    ok(&run("spectrum", &cfg, &out, &[]));
    let (_, rows) = read_csv(&out.join("eigenfreqs.csv"));
    let f: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(f, vec![5e9 - 1e6, 5e9 + 1e6]);
}

#[test]
fn malformed_configs_exit_two_and_write_nothing() {
    let cases = [
        ("unknown key", "[lattice]\nkind = \"ssh_chain\"\nn_cells = 5\ncolor = 3\ncouplings = { j = 1.0, jp = 2.0 }\nsites = { cavity_freq = 1.0 }\n", "color"),
        ("syntax", "[lattice\nkind = \"ssh_chain\"\n", "line 1"),
        ("site count", "[lattice]\nkind = \"ssh_chain\"\nn_cells = 2\ncouplings = { j = 1.0, jp = 2.0 }\nsites = { cavity_freq = [1.0, 1.0] }\n", "4 sites"),
        ("negative coupling", "[lattice]\nkind = \"ssh_chain\"\nn_cells = 2\ncouplings = { j = -1.0, jp = 2.0 }\nsites = { cavity_freq = 1.0 }\n", "non-negative"),
        ("stray section key", "[lattice]\nkind = \"ssh_chain\"\nn_cells = 2\ncouplings = { j = 1.0, jp = 2.0 }\nsites = { cavity_freq = 1.0 }\n[topology]\nbz_sample = 9\n", "line 7"),
    ];
    for (name, text, needle) in cases {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = write_config(tmp.path(), text);
        let out = tmp.path().join("o");
        let o = run("spectrum", &cfg, &out, &[]);
        assert_eq!(o.status.code(), Some(2), "{name}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains(needle), "{name}: {err}");
        let left: Vec<_> = fs::read_dir(tmp.path())
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        assert_eq!(left, vec!["run.cfg"], "{name}");
    }
}

#[test]
fn foreign_output_directory_is_left_alone() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("mine");
    fs::create_dir(&out).unwrap();
    fs::write(out.join("notes.txt"), "keep").unwrap();
    let o = run("spectrum", &paper_1d(), &out, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(fs::read_to_string(out.join("notes.txt")).unwrap(), "keep");
    assert_eq!(fs::read_dir(&out).unwrap().count(), 1);
}

#[test]
fn numerical_failures_exit_three_and_clean_up() {
    let tmp = tempfile::tempdir().unwrap();
    let ds = tmp.path().join("ds");
    ok(&run(
        "measure-sim",
        &paper_1d(),
        &ds,
        &["--set", "measure.noise={kind=\"analytic\"}"],
    ));
    let out = tmp.path().join("rec");
    let o = omlat(&[
        "recover",
        "--config",
        paper_1d().to_str().unwrap(),
        "--dataset",
        ds.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--set",
        "recover.sinkhorn_max_iter=1",
    ]);
    assert_eq!(
        o.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(!out.exists());
    assert_eq!(fs::read_dir(tmp.path()).unwrap().count(), 1);
}

#[test]
fn noiseless_recovery_matches_ground_truth() {
    let tmp = tempfile::tempdir().unwrap();
    let ds = tmp.path().join("ds");
    let noiseless = [
        "--set",
        "measure.noise={kind=\"analytic\"}",
        "--set",
        "measure.cavity_disorder=0.0",
    ];
    ok(&run("measure-sim", &paper_1d(), &ds, &noiseless));
    let out = tmp.path().join("rec");
    ok(&omlat(&[
        "recover",
        "--config",
        paper_1d().to_str().unwrap(),
        "--dataset",
        ds.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]));
    let c = read_json(&out.join("comparison.json"));
    assert_eq!(c["within_tolerance"], true);
    assert!(c["relative_frobenius_error"].as_f64().unwrap() < 1e-6);

    // independent check of the absolute matrix against the bond-by-bond chain
    let (_, rows) = read_csv(&out.join("h_hat_absolute.csv"));
    let got = DMatrix::from_fn(10, 10, |i, j| rows[i][j].parse::<f64>().unwrap());
    let (_, truth) = read_csv(&ds.join("ground_truth_hamiltonian.csv"));
    let truth = DMatrix::from_fn(10, 10, |i, j| truth[i][j].parse::<f64>().unwrap());
    assert!((&got - &truth).norm() / truth.norm() < 1e-6);
    let mut e: Vec<f64> = got.symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(f64::total_cmp);
    for (a, b) in e.iter().zip(device_eigenvalues()) {
        assert!((a - b).abs() < 1e-6 * b);
    }
}

#[test]
fn recovery_refuses_to_overwrite_its_dataset() {
    let tmp = tempfile::tempdir().unwrap();
    let ds = tmp.path().join("ds");
    ok(&run(
        "measure-sim",
        &paper_1d(),
        &ds,
        &["--set", "measure.noise={kind=\"analytic\"}"],
    ));
    let o = omlat(&[
        "recover",
        "--config",
        paper_1d().to_str().unwrap(),
        "--dataset",
        ds.to_str().unwrap(),
        "--out",
        ds.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(ds.join("manifest.json").is_file());
}

#[test]
fn disorder_free_ensemble_is_fully_hybridized() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("d");
    ok(&run(
        "disorder",
        &paper_1d(),
        &out,
        &[
            "--set",
            "disorder.sigma_grid=[0.0]",
            "--set",
            "disorder.samples=100",
        ],
    ));
    let (header, rows) = read_csv(&out.join("ensemble.csv"));
    assert_eq!(header, ["sigma", "mean", "p5", "p15", "p85", "p95"]);
    assert_eq!(rows.len(), 1);
    for v in &rows[0][1..] {
        assert!((v.parse::<f64>().unwrap() - 1.0).abs() < 1e-12, "{v}");
    }
    let m = read_json(&out.join("manifest.json"));
    assert_eq!(m["samples_per_point"], 100);
    assert!(out.join("inversion.json").is_file());
}

#[test]
fn trivial_chain_has_winding_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("t");
    ok(&run(
        "topology",
        &paper_1d(),
        &out,
        &["--set", "lattice.couplings={j = 700e6, jp = 470e6}"],
    ));
    let r = read_json(&out.join("report.json"));
    assert_eq!(r["winding"], 0);
    assert_eq!(r["zak_phase"], 0.0);
    assert_eq!(r["prediction"]["edge_states_exist"], false);
    assert_eq!(
        r["finite_chain"]["modes_in_gap"].as_array().unwrap().len(),
        0
    );

    let out = tmp.path().join("p");
    ok(&run(
        "topology",
        &paper_1d(),
        &out,
        &["--set", "lattice.couplings={j = 470e6, jp = 700e6}"],
    ));
    let r = read_json(&out.join("report.json"));
    assert_eq!(r["winding"], 1);
    assert!((r["zak_phase"].as_f64().unwrap() - PI).abs() < 1e-12);
    assert_eq!(r["prediction"]["edge_states_exist"], true);
    // finite-difference slope of −arg ρ at the zone edge, from the closed form
    let slope = r["prediction"]["slope_at_kmin"].as_f64().unwrap();
    let phi = |k: f64| -(Complex64::new(470.0, 0.0) + 700.0 * Complex64::from_polar(1.0, -k)).arg();
    let h = 1e-5;
    let k0 = r["prediction"]["k_min"].as_f64().unwrap();
    let wrap = |x: f64| (x + PI).rem_euclid(2.0 * PI) - PI;
    let fd = wrap(phi(k0 + h) - phi(k0 - h)) / (2.0 * h);
    assert!((slope - fd).abs() < 1e-4, "{slope} vs {fd}");
    assert!((slope.abs() - 700.0 / 230.0).abs() < 1e-6);
}

#[test]
fn flake_reports_the_strained_graphene_transition() {
    let cfg = configs().join("paper_2d.cfg");
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("t");
    ok(&run("topology", &cfg, &out, &[]));
    let r = read_json(&out.join("report.json"));
    assert_eq!(r["bulk_gapped"], false);
    assert_eq!(r["min_gap_exact_hz"], 0.0);
    assert!(out.join("ribbon_predictions.csv").is_file());

    let out = tmp.path().join("u");
    ok(&run(
        "topology",
        &cfg,
        &out,
        &["--set", "lattice.couplings={j = 1e9, jp = 0.25e9}"],
    ));
    let r = read_json(&out.join("report.json"));
    assert_eq!(r["bulk_gapped"], true);
    // |ρ| ≥ J − 2J′ with equality where the two weak bonds oppose the strong one
    assert!((r["min_gap_exact_hz"].as_f64().unwrap() - 1e9).abs() < 1e-3);
}

#[test]
fn flake_spectrum_marks_edge_weight() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("s");
    let cfg = configs().join("paper_2d.cfg");
    ok(&run(
        "spectrum",
        &cfg,
        &out,
        &[
            "--set",
            "lattice.couplings={j = 1e9, jp = 0.15e9}",
            "--set",
            "lattice.sites.cavity_freq=7e9",
        ],
    ));
    let (_, rows) = read_csv(&out.join("eigenfreqs.csv"));
    let weights: Vec<f64> = rows.iter().map(|r| r[4].parse().unwrap()).collect();
    let mid: Vec<usize> = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r[3] == "true")
        .map(|(k, _)| k)
        .collect();
    assert_eq!(mid, vec![10, 11, 12, 13]);
    for k in mid {
        assert!(weights[k] > 0.9, "mode {}: {}", k + 1, weights[k]);
    }
}

#[test]
fn ribbon_scan_reports_zero_modes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[lattice]\nkind = \"ribbon_unit_cell\"\norientation = \"zig_zag\"\nwidth = 40\ncouplings = { j = 1e9, jp = 1e9 }\n[topology]\nribbon_k_points = 64\n",
    );
    let out = tmp.path().join("r");
    ok(&run("topology", &cfg, &out, &[]));
    let (header, rows) = read_csv(&out.join("ribbon_scan.csv"));
    let kcol = header.iter().position(|h| h == "k_par").unwrap();
    let zcol = header.iter().position(|h| h == "zero_modes").unwrap();
    for r in &rows {
        let k: f64 = r[kcol].parse().unwrap();
        let zero: usize = r[zcol].parse().unwrap();
        // one grid step is π/32
        if (k.abs() - 2.0 * PI / 3.0).abs() > PI / 32.0 {
            assert_eq!(zero > 0, k.abs() > 2.0 * PI / 3.0, "k = {k}");
        }
    }
    let out = tmp.path().join("s");
    ok(&run(
        "spectrum",
        &cfg,
        &out,
        &["--set", "lattice.k_par=3.0"],
    ));
    let (_, rows) = read_csv(&out.join("eigenfreqs.csv"));
    assert_eq!(rows.iter().filter(|r| r[2] == "true").count(), 2);
}

#[test]
fn circuit_report_matches_lc_relations() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("c");
    ok(&run("circuit", &paper_1d(), &out, &[]));
    let r = read_json(&out.join("circuit.json"));
    let c = r["capacitance_f"].as_f64().unwrap();
    let l = r["inductance_h"].as_f64().unwrap();
    assert!((1.0 / (2.0 * PI * (l * c).sqrt()) / 7.12e9 - 1.0).abs() < 1e-12);
    let m = r["couplings"]["jp"]["mutual_over_l"].as_f64().unwrap();
    // J = f·M/2L
    assert!((m - 2.0 * 700e6 / 7.12e9).abs() < 1e-12);
    let dev = r["passbands"]["deviation_over_fc"].as_f64().unwrap();
    let ml2 = r["passbands"]["total_m_over_l_squared"].as_f64().unwrap();
    assert!(dev < ml2, "{dev} vs {ml2}");
    let fit = &r["drumhead"]["fit"];
    let resid = fit["residuals"].as_array().unwrap();
    assert!(resid[6].as_f64().unwrap() / 2.616e6 > 0.05);
    assert!(out.join("circuit_band.csv").is_file());
}

#[test]
fn json_format_writes_column_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("j");
    ok(&run("spectrum", &paper_1d(), &out, &["--format", "json"]));
    let t = read_json(&out.join("eigenfreqs.json"));
    assert_eq!(t["columns"][1], "eigenfreq_hz");
    assert_eq!(t["rows"].as_array().unwrap().len(), 10);
    assert!(!out.join("eigenfreqs.csv").exists());
}

fn tree(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                files.push((
                    p.strip_prefix(dir).unwrap().to_path_buf(),
                    fs::read(&p).unwrap(),
                ));
            }
        }
    }
    files.sort();
    files
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let small = [
        "--set",
        "disorder.samples=200",
        "--set",
        "disorder.sigma_grid=[0.0, 0.002, 0.01]",
    ];
    for (sub, extra) in [
        ("spectrum", &[][..]),
        ("topology", &[][..]),
        ("measure-sim", &[][..]),
        ("disorder", &small[..]),
        ("circuit", &[][..]),
    ] {
        let a = tmp.path().join(format!("{sub}-a"));
        let b = tmp.path().join(format!("{sub}-b"));
        ok(&run(sub, &paper_1d(), &a, extra));
        ok(&run(sub, &paper_1d(), &b, extra));
        assert_eq!(tree(&a), tree(&b), "{sub}");
    }
    let c = tmp.path().join("measure-sim-c");
    ok(&run("measure-sim", &paper_1d(), &c, &["--seed", "1"]));
    let a = tmp.path().join("measure-sim-a");
    assert_ne!(
        fs::read(a.join("ground_truth_hamiltonian.csv")).unwrap(),
        fs::read(c.join("ground_truth_hamiltonian.csv")).unwrap()
    );
}
