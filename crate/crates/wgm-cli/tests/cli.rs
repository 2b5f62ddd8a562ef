//! End-to-end tests of the batch interface: exit codes, table layout,
//! golden rows, determinism and the documented file formats.

use assert_cmd::Command;

fn wgm() -> Command {
    Command::cargo_bin("wgm").unwrap()
}

fn stdout_of(args: &[&str]) -> String {
    let out = wgm().args(args).assert().success();
    String::from_utf8(out.get_output().stdout.clone()).unwrap()
}

#[test]
fn solve_row_matches_result_table() {
    let out = stdout_of(&["solve", "--profile", "constant-1.5", "--m", "10", "--eps", "1e-8"]);
    let mut lines = out.lines();
    assert_eq!(
        lines.next().unwrap(),
        "m,k0,l,re_k,im_k,k_asympt,abs_det,abs_ddet,rel_residual,diff_asympt,status"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "10");
    assert_eq!(row[2], "5");
    let re: f64 = row[3].parse().unwrap();
    let im: f64 = row[4].parse().unwrap();
    assert!((re - 16.923_201_860_866_378).abs() < 1e-8);
    assert!((im + 0.239_545_589_814_465_41).abs() < 1e-8);
    let ka: f64 = row[5].parse().unwrap();
    assert!((ka - 17.085_561_463_191_144).abs() < 1e-9);
    assert_eq!(row[10], "converged");
}

#[test]
fn solve_luneburg_matches_result_table() {
    let out = stdout_of(&["solve", "--profile", "luneburg", "--m", "10"]);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    let re: f64 = row[3].parse().unwrap();
    let im: f64 = row[4].parse().unwrap();
    assert!((re - 18.588_963_438_926_466).abs() < 1e-8);
    assert!((im + 0.615_442_573_532_437_7).abs() < 1e-8);
}

#[test]
fn solve_rejects_m_zero_with_exit_3() {
    wgm()
        .args(["solve", "--profile", "constant-1.5", "--m", "0"])
        .assert()
        .code(3);
}

#[test]
fn solve_rejects_unknown_profile_with_exit_3() {
    wgm()
        .args(["solve", "--profile", "unobtainium", "--m", "3"])
        .assert()
        .code(3);
}

#[test]
fn profile_json_literal_accepted() {
    let out = stdout_of(&[
        "solve",
        "--profile-json",
        r#"{"xi":0.5,"inner":{"poly":[1.5]},"outer":{"poly":[1.0]}}"#,
        "--m",
        "10",
    ]);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    let re: f64 = row[3].parse().unwrap();
    assert!((re - 16.923_201_860_866_378).abs() < 1e-8);
}

#[test]
fn sweep_emits_ordered_rows_and_is_deterministic() {
    let args = [
        "sweep",
        "--profile",
        "constant-1.5",
        "--m-range",
        "1..8",
        "--threads",
        "1",
    ];
    let a = stdout_of(&args);
    let b = stdout_of(&args);
    assert_eq!(a, b, "single-thread output must be byte-identical");

    // Parallel run: identical content, order fixed by m.
    let par = stdout_of(&[
        "sweep",
        "--profile",
        "constant-1.5",
        "--m-range",
        "1..8",
        "--threads",
        "4",
    ]);
    assert_eq!(a, par);

    let ms: Vec<&str> = a
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(ms, ["1", "2", "3", "4", "5", "6", "7", "8"]);
    assert!(a.lines().skip(1).all(|l| l.ends_with(",converged")));
}

#[test]
fn sweep_rejects_empty_range_with_exit_3() {
    wgm()
        .args(["sweep", "--profile", "constant-1.5", "--m-range", "9..3"])
        .assert()
        .code(3);
    wgm()
        .args(["sweep", "--profile", "constant-1.5", "--m-range", "1..200"])
        .assert()
        .code(3);
}

#[test]
fn solve_non_convergence_exits_2() {
    wgm()
        .args([
            "solve", "--profile", "constant-1.5", "--m", "10", "--lmax", "1",
            "--eps", "1e-12",
        ])
        .assert()
        .code(2);
}

#[test]
fn validate_reproduces_comparison_table() {
    let out = stdout_of(&[
        "validate",
        "--profile",
        "constant-1.5",
        "--m",
        "10",
        "--k0-range",
        "1..18",
        "--eps",
        "1e-6",
        "--lmax",
        "1000",
    ]);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 18);
    for row in &rows {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols[8], "ok", "row: {row}");
        let diff: f64 = cols[7].parse().unwrap();
        assert!(diff <= 1e-10, "row: {row}");
    }
    // First start runs ten iterations to the deep root, as in the table.
    let first: Vec<&str> = rows[0].split(',').collect();
    assert_eq!(first[1], "10");
    let re: f64 = first[2].parse().unwrap();
    assert!((re - 16.923_201_860_583_82).abs() < 1e-9);
}

#[test]
fn validate_rejects_unsupported_profile() {
    wgm()
        .args(["validate", "--profile", "affine-2", "--m", "10"])
        .assert()
        .code(3);
}

#[test]
fn asympt_table_and_na_fallback() {
    let out = stdout_of(&["asympt", "--profile", "constant-1.5", "--m-range", "10..10"]);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[1], "A");
    let k: f64 = row[2].parse().unwrap();
    assert!((k - 17.085_561_463_191_144).abs() < 1e-9);

    let out = stdout_of(&["asympt", "--profile", "luneburg-n2-cubic", "--m", "10"]);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[1], "NA");
    assert_eq!(row[2], "");
}

#[test]
fn mode_export_is_continuous_across_interface() {
    let dir = std::env::temp_dir().join("wgm-cli-mode-test");
    std::fs::create_dir_all(&dir).unwrap();
    let out_path = dir.join("mode.csv");
    let polar_path = dir.join("polar.csv");
    wgm()
        .args([
            "mode",
            "--profile",
            "luneburg",
            "--m",
            "40",
            "--out",
            out_path.to_str().unwrap(),
            "--polar-out",
            polar_path.to_str().unwrap(),
        ])
        .assert()
        .success();
    let content = std::fs::read_to_string(&out_path).unwrap();
    let rows: Vec<Vec<String>> = content
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    assert_eq!(rows.len(), 400);
    // Value normalization: u = 1 on both sides of the interface.
    let inner_at_xi = rows.iter().filter(|r| r[1] == "inner").last().unwrap();
    let outer_at_xi = rows.iter().find(|r| r[1] == "outer").unwrap();
    let u_in: f64 = inner_at_xi[2].parse().unwrap();
    let u_out: f64 = outer_at_xi[2].parse().unwrap();
    assert!((u_in - 1.0).abs() < 1e-8 && (u_out - 1.0).abs() < 1e-8);

    let polar = std::fs::read_to_string(&polar_path).unwrap();
    assert_eq!(polar.lines().count(), 1 + 200 * 256);
    assert_eq!(polar.lines().next().unwrap(), "r,theta,value");
}

#[test]
fn opnorm_spikes_at_the_quasi_resonances() {
    // The four table resonances of the luneburg case. Each inverse-norm
    // sweep spikes within 0.2 of its table real part; the spike prominence
    // grows with m as Im k shrinks (1.5x at m=10 where the resonance sits
    // 0.6 below the axis, ~1e4x at m=60).
    let cases = [
        (10usize, 18.588_963_44),
        (20, 35.094_086_48),
        (40, 67.287_401_49),
        (60, 98.828_220_51),
    ];
    let mut ratios = Vec::new();
    for (m, want) in cases {
        let out = stdout_of(&[
            "opnorm",
            "--profile",
            "luneburg",
            "--m-list",
            &m.to_string(),
            "--k-min",
            &format!("{}", want - 3.0),
            "--k-max",
            &format!("{}", want + 3.0),
            "--steps",
            "121",
        ]);
        let series: Vec<(f64, f64)> = out
            .lines()
            .skip(1)
            .filter_map(|line| {
                let cols: Vec<&str> = line.split(',').collect();
                let v: f64 = cols[2].parse().ok()?;
                Some((cols[1].parse::<f64>().unwrap(), v))
            })
            .collect();
        let local = series
            .iter()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .copied()
            .unwrap();
        assert!(
            (local.0 - want).abs() <= 0.2,
            "m={m}: spike at {} vs resonance {want}",
            local.0
        );
        let mut values: Vec<f64> = series.iter().map(|p| p.1).collect();
        values.sort_by(f64::total_cmp);
        let median = values[values.len() / 2];
        ratios.push(local.1 / median);
    }
    // High-Q orders tower over the background; prominence is monotone in m.
    assert!(ratios[2] >= 100.0, "m=40 ratio {}", ratios[2]);
    assert!(ratios[3] >= 100.0, "m=60 ratio {}", ratios[3]);
    assert!(
        ratios.windows(2).all(|w| w[0] < w[1]),
        "spike prominence not monotone: {ratios:?}"
    );
}

#[test]
fn opnorm_smooth_away_from_resonances() {
    // Between the m=10 resonances at 18.59 and 22.12 the norm is finite and
    // slowly varying.
    let out = stdout_of(&[
        "opnorm", "--profile", "luneburg", "--m-list", "10", "--k-min", "19.8",
        "--k-max", "21.0", "--steps", "25",
    ]);
    let values: Vec<f64> = out
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(values.len(), 25);
    for w in values.windows(2) {
        assert!(w[1] / w[0] < 10.0 && w[0] / w[1] < 10.0);
    }
}

#[test]
fn signmap_det1_uniformly_negative_det2_not() {
    let out = stdout_of(&[
        "signmap", "--m", "10", "--variant", "det1", "--n-re", "50", "--n-im", "25",
    ]);
    let signs: Vec<i32> = out
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(signs.len(), 50 * 25);
    assert!(signs.iter().all(|&s| s <= 0));
    assert!(signs.iter().filter(|&&s| s == -1).count() > 1000);

    let out = stdout_of(&[
        "signmap", "--m", "10", "--variant", "det2", "--n-re", "50", "--n-im", "25",
    ]);
    assert!(out
        .lines()
        .skip(1)
        .any(|l| l.rsplit(',').next().unwrap() == "1"));
}

#[test]
fn json_schema_of_solve_runs() {
    let out = stdout_of(&[
        "solve", "--profile", "constant-1.5", "--m", "10", "--format", "json",
    ]);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    let run = &doc["runs"][0];
    assert_eq!(run["m"], 10);
    assert_eq!(run["converged"], true);
    assert!(run["k"]["re"].is_f64() && run["k"]["im"].is_f64());
    assert!(run["iterations"].as_array().unwrap().len() >= 2);
}

#[test]
fn start_value_override_reaches_neighbor_resonance() {
    // From k0 = 22 the m = 10 iteration lands on the next resonance branch
    // (the comparison table's row 22).
    let out = stdout_of(&[
        "solve",
        "--profile",
        "constant-1.5",
        "--m",
        "10",
        "--start",
        "value:22.0",
        "--eps",
        "1e-8",
    ]);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    let re: f64 = row[3].parse().unwrap();
    assert!((re - 22.119_804_057).abs() < 1e-4, "re = {re}");
}

#[test]
fn wgm_threads_env_var_respected() {
    let out = wgm()
        .env("WGM_THREADS", "2")
        .args(["sweep", "--profile", "constant-1.5", "--m-range", "1..4"])
        .assert()
        .success();
    let text = String::from_utf8(out.get_output().stdout.clone()).unwrap();
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn non_tabular_commands_reject_json_with_exit_3() {
    wgm()
        .args(["validate", "--profile", "constant-1.5", "--m", "10", "--format", "json"])
        .assert()
        .code(3);
    wgm()
        .args(["signmap", "--m", "10", "--format", "json"])
        .assert()
        .code(3);
}

#[test]
fn homotopy_seed_runs() {
    let out = stdout_of(&[
        "solve",
        "--profile",
        "affine-5",
        "--m",
        "12",
        "--homotopy",
        "constant-1.5",
    ]);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[10], "converged");
}
