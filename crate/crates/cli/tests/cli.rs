use std::process::{Command, Output};

use approx::assert_abs_diff_eq;

fn shadowfit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shadowfit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn value_after(text: &str, key: &str) -> f64 {
    let line = text
        .lines()
        .find(|l| l.trim_start().starts_with(key))
        .unwrap();
    line.split('=')
        .nth(1)
        .unwrap()
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap()
}

#[test]
fn angles_prints_the_three_critical_angles() {
    let out = shadowfit(&["angles", "--r", "0.51"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_abs_diff_eq!(
        value_after(&text, "theta0"),
        0.765_400_829_424,
        epsilon = 1e-11
    );
    assert_abs_diff_eq!(
        value_after(&text, "theta1"),
        1.115_713_484_148,
        epsilon = 1e-11
    );
    assert_abs_diff_eq!(
        value_after(&text, "theta2"),
        0.983_752_685_556,
        epsilon = 1e-11
    );
}

#[test]
fn angles_csv() {
    let out = shadowfit(&["angles", "--r", "0.51", "--format", "csv"]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("name,closed_form,bisection"));
    assert!(lines.next().unwrap().starts_with("theta0,"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn radius_outside_the_domain_is_a_usage_error() {
    for args in [
        &["verify-3d", "--r", "0.60"][..],
        &["angles", "--r", "0.5"],
        &["no3drot", "--r", "0.52", "--phi-grid", "0"],
    ] {
        let out = shadowfit(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    }
}

#[test]
fn malformed_arguments_exit_with_two() {
    assert_eq!(shadowfit(&[]).status.code(), Some(2));
    assert_eq!(shadowfit(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(shadowfit(&["angles"]).status.code(), Some(2));
    assert_eq!(
        shadowfit(&["volume", "--body", "cube:s=1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        shadowfit(&["angles", "--r", "0.51", "--format", "xml"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn bad_thread_count_is_rejected() {
    let out = Command::new(env!("CARGO_BIN_EXE_shadowfit"))
        .args(["angles", "--r", "0.51"])
        .env("SHADOWFIT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn small_verify_3d_writes_csv_to_file() {
    let dir = std::env::temp_dir().join(format!("shadowfit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("v3d.csv");
    let out = shadowfit(&[
        "verify-3d",
        "--r",
        "0.51",
        "--theta-grid",
        "9",
        "--fit-angle-grid",
        "360",
        "--fit-u-grid",
        "1024",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("theta,strategy,margin,blind_margin,ok"));
    assert_eq!(lines.count(), 9);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn volume_of_catalog_bodies() {
    let out = shadowfit(&["volume", "--body", "cylinder:r=0.51,hh=0.51"]);
    assert_eq!(out.status.code(), Some(0));
    assert_abs_diff_eq!(
        value_after(&stdout(&out), "volume"),
        2.0 * std::f64::consts::PI * 0.51f64.powi(3),
        epsilon = 1e-5
    );
    let out = shadowfit(&[
        "volume",
        "--body",
        "polar:double_cone:a=1,c=1",
        "--format",
        "csv",
    ]);
    let text = stdout(&out);
    let row = text.lines().nth(1).unwrap();
    let v: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
    assert_abs_diff_eq!(v, 2.0 * std::f64::consts::PI, epsilon = 1e-4);
}

#[test]
fn mm_report_exit_codes() {
    let fast = [
        "--dir-resolution",
        "4",
        "--fit-angle-grid",
        "180",
        "--fit-u-grid",
        "512",
    ];
    let mut args = vec![
        "mm-report",
        "--K",
        "ball:R=0.8",
        "--L",
        "cylinder:r=1,hh=1",
        "--mode",
        "sections",
    ];
    args.extend(fast);
    let out = shadowfit(&args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).contains("satisfied"));

    let mut args = vec![
        "mm-report",
        "--K",
        "ball:R=1.2",
        "--L",
        "ball:R=1",
        "--mode",
        "projections",
    ];
    args.extend(fast);
    let out = shadowfit(&args);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("hypothesis failed"));

    let out = shadowfit(&[
        "mm-report",
        "--K",
        "ball:R=1",
        "--L",
        "ball:R=1",
        "--mode",
        "volumes",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn export_curves_columns() {
    let out = shadowfit(&[
        "export-curves",
        "--r",
        "0.51",
        "--theta",
        "1.2",
        "--samples",
        "360",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("u,rho_cone,rho_cylinder,rho_cylinder_rot90,rho_cylinder_rot_u0")
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 360);
    // u = 0: the cone section reaches 1/(sin θ + cos θ).
    assert_abs_diff_eq!(
        rows[0][1],
        1.0 / (1.2f64.sin() + 1.2f64.cos()),
        epsilon = 1e-15
    );
    // The quarter-turn column is the cylinder column shifted by 90 samples.
    for k in 0..360 {
        assert_abs_diff_eq!(rows[(k + 90) % 360][3], rows[k][2], epsilon = 1e-12);
    }
}

#[test]
fn export_curves_leaves_u0_empty_below_pi_over_four() {
    let path = std::env::temp_dir().join(format!("shadowfit-curves-{}.csv", std::process::id()));
    let out = shadowfit(&[
        "export-curves",
        "--r",
        "0.51",
        "--theta",
        "0.5",
        "--samples",
        "8",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(&path).unwrap();
    for line in csv.lines().skip(1) {
        assert!(line.ends_with(','), "{line}");
        assert_eq!(line.split(',').count(), 5);
    }
    std::fs::remove_file(path).unwrap();
}

#[test]
fn small_bump_run_is_verified() {
    let out = shadowfit(&[
        "verify-nd",
        "--sections",
        "6",
        "--rotations",
        "200",
        "--seed",
        "3",
        "--format",
        "csv",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(stdout(&out).lines().count(), 1 + 6 + 200);
}

#[test]
fn bump_dimension_six_is_degenerate() {
    let out = shadowfit(&[
        "verify-nd",
        "--n",
        "6",
        "--sections",
        "0",
        "--rotations",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tall_bumps_fail_the_convexity_check() {
    let out = shadowfit(&[
        "verify-nd",
        "--eps",
        "0.01",
        "--eps-small",
        "0.005",
        "--sections",
        "1",
        "--rotations",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn csv_is_identical_across_thread_counts() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_shadowfit"))
            .args([
                "verify-nd",
                "--sections",
                "4",
                "--rotations",
                "300",
                "--seed",
                "9",
                "--format",
                "csv",
            ])
            .env("SHADOWFIT_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("1"), run("3"));
}
