//! End-to-end run of the command-line tool over the degree-3 example on
//! y^2 = x^3 + x + 2 over F_19.

use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_isogenies");
const E1: &str = r#"{"p":19,"a":[0,0,0,1,2]}"#;
const E2: &str = r#"{"p":19,"a":[0,0,0,9,3]}"#;

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn curve_info_reports_invariants_and_order() {
    let text = stdout_ok(&["curve", "info", E1]);
    assert!(text.contains("y^2 = x^3 + x + 2"));
    assert!(text.contains("F_19"));
    assert!(text.contains("j = 2"));
    assert!(text.contains("order: 12"));
}

#[test]
fn from_kernel_and_from_points_print_the_same_isogeny() {
    let a = stdout_ok(&["isogeny", "from-kernel", E1, "--psi", "[11,1]"]);
    let b = stdout_ok(&[
        "isogeny",
        "from-points",
        E1,
        "--points",
        r#"[[8,3],[8,16],"inf"]"#,
    ]);
    assert_eq!(a, b);
    assert!(a.contains("degree: 3"));
    assert!(a.contains("codomain: y^2 = x^3 + 9*x + 3"));
    assert!(a.contains("kernel polynomial: x + 11"));
    assert!(a.contains("x-map: (x^3 + 3*x^2 + 13*x + 7) / (x^2 + 3*x + 7)"));
    assert!(a.contains("/ (x^3 + 14*x^2 + 2*x + 1)"));
    // the general construction agrees too
    let c = stdout_ok(&[
        "isogeny",
        "from-kernel",
        E1,
        "--psi",
        "[11,1]",
        "--method",
        "general",
    ]);
    assert_eq!(a, c);
}

#[test]
fn json_output_round_trips_through_eval() {
    let iso = stdout_ok(&["isogeny", "from-kernel", E1, "--psi", "[11,1]", "--json"]);
    let iso = iso.trim();
    assert!(iso.contains(r#""degree":3"#));
    assert!(iso.contains(r#""q":[7,3,1]"#));
    let img = stdout_ok(&["isogeny", "eval", iso, "--point", "[14,9]"]);
    assert_eq!(img.trim(), "[16, 14]");
    let ker = stdout_ok(&["isogeny", "eval", iso, "--point", "[8,3]"]);
    assert_eq!(ker.trim(), "inf");
}

#[test]
fn recover_methods_agree() {
    let s = stdout_ok(&["isogeny", "recover", E1, E2, "--degree", "3"]);
    let n = stdout_ok(&[
        "isogeny", "recover", E1, E2, "--degree", "3", "--method", "naive",
    ]);
    assert!(s.contains("kernel polynomial: x + 11"));
    assert!(n.contains("kernel polynomial: x + 11"));
}

#[test]
fn dual_reports_pullback_and_verification() {
    let iso = stdout_ok(&["isogeny", "from-kernel", E1, "--psi", "[11,1]", "--json"]);
    let text = stdout_ok(&["isogeny", "dual", iso.trim()]);
    assert!(text.contains("degree: 3"));
    assert!(text.contains("codomain: y^2 = x^3 + x + 2"));
    assert!(text.contains("pullback constant: 3"));
    assert!(text.contains("composes to [3] on 12 points"));
}

#[test]
fn divpoly_and_wp_series_print_known_values() {
    let text = stdout_ok(&["divpoly", E1, "-m", "3"]);
    assert!(text.contains("psi_3 = 3*x^4 + 6*x^2 + 5*x + 18"));
    assert!(text.contains("phi_3 = x^9"));
    let text = stdout_ok(&["wp-series", E1, "-n", "4"]);
    assert!(text.contains("1*z^-2 + 15*z^2 + 16*z^4 + 18*z^6"));
    let fast = stdout_ok(&["wp-series", E1, "-n", "4", "--method", "fast"]);
    assert_eq!(text, fast);
}

#[test]
fn exit_codes_distinguish_parse_and_math_failures() {
    let out = run(&["curve", "info", r#"{"p":15,"a":[0,0,0,1,2]}"#]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not prime"));

    let out = run(&[
        "isogeny",
        "recover",
        E1,
        r#"{"p":19,"a":[0,0,0,2,4]}"#,
        "--degree",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no isogeny"));
}

#[test]
fn extension_field_curve_round_trips() {
    let curve = r#"{"p":7,"d":3,"modulus":[5,0,0,1],"a":[0,0,0,0,5]}"#;
    let text = stdout_ok(&["curve", "info", curve]);
    assert!(text.contains("F_7^3"));
    // kernel x - alpha, a degree-2 isogeny defined only over the extension
    let iso = stdout_ok(&[
        "isogeny",
        "from-kernel",
        curve,
        "--psi",
        r#"[[0,6,0],[1,0,0]]"#,
        "--json",
    ]);
    assert!(iso.contains(r#""degree":2"#));
    let img = stdout_ok(&["isogeny", "eval", iso.trim(), "--point", r#"[[0,1,0],[0,0,0]]"#]);
    assert_eq!(img.trim(), "inf");
}
