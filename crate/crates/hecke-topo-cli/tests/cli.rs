//! End-to-end tests of the `hecke-topo` binary: pinned payloads for every
//! subcommand, exit-code conventions (0 success / 1 failed assertion /
//! 2 invalid parameters), byte-identical output across cache states, the
//! cache-directory precedence (--cache-dir over $HECKE_TOPO_CACHE over
//! ./.cache), CSV flattening, and the tampered negative control.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_hecke-topo")
}

/// Run the binary hermetically: $HECKE_TOPO_CACHE scrubbed, the disk cache
/// pointed at a private directory, cwd in a scratch directory.
fn run_cached(args: &[&str], cache: &Path, cwd: &Path) -> Output {
    Command::new(bin())
        .args(args)
        .arg("--cache-dir")
        .arg(cache)
        .env_remove("HECKE_TOPO_CACHE")
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn run(args: &[&str]) -> (Output, TempDir) {
    let dir = TempDir::new().expect("tempdir");
    let out = run_cached(args, &dir.path().join("cache"), dir.path());
    (out, dir)
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "expected success, got {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn report_envelope_has_the_documented_key_order_and_stderr_wall_time() {
    let (out, _dir) = run(&["ext1", "--p", "5", "--n", "1"]);
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let pos = |needle: &str| text.find(needle).unwrap_or_else(|| panic!("{needle} missing"));
    assert!(pos("\"command\"") < pos("\"params\""));
    assert!(pos("\"params\"") < pos("\"results\""));
    assert!(pos("\"results\"") < pos("\"assertions\""));
    let v = stdout_json(&out);
    assert_eq!(v["command"], "ext1");
    assert_eq!(v["results"]["order"], "5");
    // Timing never contaminates the payload; it is a stderr comment.
    assert!(!text.contains("wall_ms"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("# wall_ms="));
}

#[test]
fn eigenforms_weight_12_has_the_tau_eigenvalues() {
    let (out, _dir) = run(&["eigenforms", "--weight", "12", "--primes", "2,3,5"]);
    let v = stdout_json(&out);
    let chars = v["results"]["characters"].as_array().unwrap();
    assert_eq!(chars.len(), 2);
    assert_eq!(chars[0]["kind"], "eisenstein");
    assert_eq!(chars[0]["lambda"]["2"], "2049"); // 1 + 2^11
    let cusp = &chars[1];
    assert_eq!(cusp["kind"], "cuspidal");
    assert_eq!(cusp["lambda"]["2"], "-24"); // τ(2)
    assert_eq!(cusp["lambda"]["3"], "252"); // τ(3)
    assert_eq!(cusp["lambda"]["5"], "4830"); // τ(5)
    assert_eq!(cusp["eigenvector"], serde_json::json!(["0", "1"]));
    // One verified eigen-equation per character per prime.
    assert_eq!(v["assertions"], 6);
}

#[test]
fn hecke_matrix_is_cross_checked_and_pinned() {
    let (out, _dir) = run(&["hecke-matrix", "--weight", "12", "--n", "2"]);
    let v = stdout_json(&out);
    assert_eq!(v["results"]["weight"], 12);
    assert_eq!(v["results"]["index"], 2);
    let entries = v["results"]["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 2);
    assert_eq!(entries[0][0], "2049"); // Eisenstein eigenvalue 1 + 2^11
    assert_eq!(entries[0][1], "0"); // T_2 preserves the cusp subspace
    assert_eq!(entries[1][1], "-24"); // τ(2) on Δ
    assert_eq!(v["assertions"], 1); // divisor-sum oracle equality
}

#[test]
fn qexp_prints_the_miller_echelon_basis() {
    let (out, _dir) = run(&["qexp", "--weight", "12", "--prec", "4"]);
    let v = stdout_json(&out);
    let basis = v["results"].as_array().unwrap();
    assert_eq!(basis.len(), 2);
    assert_eq!(
        basis[0]["coeffs"],
        serde_json::json!(["1", "0", "196560", "16773120"])
    );
    assert_eq!(basis[1]["coeffs"], serde_json::json!(["0", "1", "-24", "252"]));
    assert_eq!(v["assertions"], 4); // d² echelon identities
}

#[test]
fn kappa_order_pinned_example() {
    let (out, _dir) = run(&[
        "kappa-order",
        "--p",
        "5",
        "--n",
        "5",
        "--weight",
        "12",
        "--primes",
        "2,3,7,11,13",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["results"]["order"], "25"); // p^{1+ν_5(5)} = 5²
    assert_eq!(v["results"]["stableUnderExtendedL"], true);
}

#[test]
fn topo_classify_matches_the_triangular_example() {
    let (out, _dir) = run(&[
        "topo-classify",
        "--p",
        "5",
        "--n",
        "1",
        "--j",
        "0",
        "--weight",
        "16",
        "--primes",
        "2,3,7",
        "--prec",
        "4",
    ]);
    let v = stdout_json(&out);
    let forms = v["results"].as_array().unwrap();
    assert_eq!(forms.len(), 4);
    let supports: Vec<&str> = forms.iter().map(|f| f["support"].as_str().unwrap()).collect();
    assert_eq!(
        supports,
        ["bottom-only", "bottom-only", "top-nontrivial", "top-nontrivial"]
    );
    // The Δ-character extension is (−ΔE₄, 5Δ) in canonical scaling.
    let cusp_ext = forms
        .iter()
        .find(|f| f["support"] == "top-nontrivial" && f["character"]["2"] == "-24")
        .expect("Δ-character joint eigenform");
    assert_eq!(
        cusp_ext["bottom"]["coeffs"],
        serde_json::json!(["0", "-1", "-216", "3348"])
    );
    assert_eq!(
        cusp_ext["top"]["coeffs"],
        serde_json::json!(["0", "5", "-120", "1260"])
    );
    assert_eq!(cusp_ext["bottom"]["weight"], 16);
    assert_eq!(cusp_ext["top"]["weight"], 12);
}

#[test]
fn topo_classify_wedge_case_splits_block_diagonally() {
    let (out, _dir) = run(&[
        "topo-classify",
        "--p",
        "5",
        "--n",
        "1",
        "--j",
        "1",
        "--weight",
        "16",
        "--prec",
        "3",
    ]);
    let v = stdout_json(&out);
    // Defaulted truncation: the first three primes other than p.
    assert_eq!(v["params"]["primes"], serde_json::json!([2, 3, 7]));
    let forms = v["results"].as_array().unwrap();
    assert_eq!(forms.len(), 4);
    let zero3 = serde_json::json!(["0", "0", "0"]);
    let (mut bottoms, mut tops) = (0, 0);
    for f in forms {
        let bottom_zero = f["bottom"]["coeffs"] == zero3;
        let top_zero = f["top"]["coeffs"] == zero3;
        assert!(
            bottom_zero ^ top_zero,
            "wedge eigenforms live in exactly one cell: {f}"
        );
        if top_zero {
            bottoms += 1;
        } else {
            tops += 1;
        }
    }
    assert_eq!((bottoms, tops), (2, 2));
}

#[test]
fn obstruction_of_delta_is_order_five_and_scaling_kills_it() {
    let (out, _dir) = run(&["obstruction", "--p", "5", "--n", "1", "--j", "0", "--g", "delta"]);
    let v = stdout_json(&out);
    assert_eq!(v["results"]["verdict"], "obstructed");
    assert_eq!(v["results"]["order"], "5");

    let (out, _dir) = run(&[
        "obstruction", "--p", "5", "--n", "1", "--j", "0", "--g", "5*delta", "--prec", "4",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["results"]["verdict"], "extends");
    // Witness f₀ = −ΔE₄ = −q − 216q² + 3348q³ + O(q⁴).
    assert_eq!(
        v["results"]["f0"]["coeffs"],
        serde_json::json!(["0", "-1", "-216", "3348"])
    );

    let (out, _dir) = run(&[
        "obstruction", "--p", "5", "--n", "1", "--j", "0", "--g", "0*delta", "--prec", "3",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["results"]["verdict"], "extends");
    assert_eq!(v["results"]["f0"]["coeffs"], serde_json::json!(["0", "0", "0"]));
}

#[test]
fn cobar_verify_reports_the_pinned_triples() {
    let (out, _dir) = run(&["cobar-verify", "--p", "5", "--n", "5"]);
    let v = stdout_json(&out);
    assert_eq!(v["results"]["cocycle"], true);
    assert_eq!(v["results"]["ext1Order"], "25");
    assert_eq!(v["results"]["zeta1"], "p^j*sigma_n");
    assert_eq!(v["assertions"], 4); // cocycle + forced ζ(1) at j = 0, 1, 2

    let (out, _dir) = run(&["cobar-verify", "--p", "5", "--n", "1"]);
    let v = stdout_json(&out);
    assert_eq!(v["results"]["cocycle"], true);
    assert_eq!(v["results"]["ext1Order"], "5");
    assert_eq!(v["results"]["zeta1"], "p^j*sigma_n");
}

#[test]
fn quadratic_eigenvalues_render_exactly() {
    // dim S_24 = 2 with eigenvalue field Q(√144169): λ(T_2) = 540 ± 12√144169.
    let (out, _dir) = run(&["eigenforms", "--weight", "24", "--primes", "2"]);
    let v = stdout_json(&out);
    let lambdas: Vec<&str> = v["results"]["characters"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["lambda"]["2"].as_str().unwrap())
        .collect();
    assert!(lambdas.contains(&"540 + 12*sqrt(144169)"));
    assert!(lambdas.contains(&"540 - 12*sqrt(144169)"));
}

#[test]
fn byte_identical_output_across_cache_states() {
    let dir = TempDir::new().unwrap();
    let cache = dir.path().join("cache");
    let args = [
        "topo-classify", "--p", "5", "--n", "1", "--j", "0", "--weight", "16", "--prec", "5",
    ];
    let cold = run_cached(&args, &cache, dir.path());
    assert!(cold.status.success());
    let warm = run_cached(&args, &cache, dir.path());

    // Corrupt every cache file; the run must recompute and agree.
    let mut corrupted = 0;
    for entry in std::fs::read_dir(&cache).unwrap() {
        std::fs::write(entry.unwrap().path(), "{not json").unwrap();
        corrupted += 1;
    }
    assert!(corrupted > 0, "the first run should have populated the cache");
    let recovered = run_cached(&args, &cache, dir.path());

    // Delete the cache entirely; timing changes, bytes must not.
    std::fs::remove_dir_all(&cache).unwrap();
    let fresh = run_cached(&args, &cache, dir.path());

    assert_eq!(cold.stdout, warm.stdout);
    assert_eq!(cold.stdout, recovered.stdout);
    assert_eq!(cold.stdout, fresh.stdout);
    assert!(warm.status.success() && recovered.status.success() && fresh.status.success());
}

#[test]
fn cache_dir_flag_wins_over_the_environment_variable() {
    let dir = TempDir::new().unwrap();
    let env_cache = dir.path().join("env-cache");
    let flag_cache = dir.path().join("flag-cache");

    // Env var alone directs the cache.
    let out = Command::new(bin())
        .args(["hecke-matrix", "--weight", "12", "--n", "2"])
        .env("HECKE_TOPO_CACHE", &env_cache)
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(env_cache.join("hecke_k12_n2.json").exists());

    // With both set, the flag wins and the env target stays untouched.
    let env_cache2 = dir.path().join("env-cache-2");
    let out2 = Command::new(bin())
        .args(["hecke-matrix", "--weight", "12", "--n", "2"])
        .arg("--cache-dir")
        .arg(&flag_cache)
        .env("HECKE_TOPO_CACHE", &env_cache2)
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(out2.status.success());
    assert!(flag_cache.join("hecke_k12_n2.json").exists());
    assert!(!env_cache2.exists());
    assert_eq!(out.stdout, out2.stdout);
}

#[test]
fn csv_output_is_the_flattened_report() {
    let (out, _dir) = run(&["kappa-order", "--p", "5", "--n", "1", "--weight", "12", "--csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let expected = "\
command,kappa-order
params.p,5
params.n,1
params.weight,12
params.primes[0],2
params.primes[1],3
params.primes[2],7
params.primes[3],11
params.primes[4],13
results.order,5
results.stableUnderExtendedL,true
assertions,2
";
    assert_eq!(text, expected);
}

#[test]
fn invalid_parameters_exit_2() {
    let cases: &[&[&str]] = &[
        &["kappa-order", "--p", "4", "--n", "1", "--weight", "12"],
        &["kappa-order", "--p", "3", "--n", "1", "--weight", "12"],
        &["eigenforms", "--weight", "13"],
        &["eigenforms", "--weight", "12", "--primes", "2,9"],
        &["topo-classify", "--p", "5", "--n", "1", "--j", "0", "--weight", "12", "--primes", "2,3,5"],
        &["obstruction", "--p", "5", "--n", "1", "--j", "0", "--g", "junk"],
        &["obstruction", "--p", "5", "--n", "1", "--j", "0", "--g", "cusp24"], // two conjugate characters
        &["hecke-matrix", "--weight", "12", "--n", "0"],
        &["qexp", "--weight", "12", "--prec", "0"],
        &["kappa-order", "--n", "1", "--weight", "12"], // missing --p (clap usage error)
    ];
    for args in cases {
        let (out, _dir) = run(args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "args {args:?}\nstderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn selftest_passes_cleanly_and_tampering_fails_by_name() {
    let dir = TempDir::new().unwrap();
    let cache = dir.path().join("cache");

    let clean = run_cached(&["selftest"], &cache, dir.path());
    assert_eq!(clean.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&clean.stdout).unwrap();
    assert_eq!(v["results"]["passed"], 12);
    assert_eq!(v["results"]["failed"], 0);
    let criteria = v["results"]["criteria"].as_array().unwrap();
    assert_eq!(criteria.len(), 12);
    assert_eq!(criteria[0]["name"], "hecke-relations");
    assert_eq!(criteria[5]["name"], "kappa-class-order");
    assert!(criteria.iter().all(|c| c["passed"] == true));

    // Negative control: a deliberately corrupted expected value must fail
    // the run and name the broken check.
    let tampered = run_cached(&["selftest", "--tamper"], &cache, dir.path());
    assert_eq!(tampered.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&tampered.stdout).unwrap();
    assert_eq!(v["results"]["failed"], 1);
    let text = String::from_utf8(tampered.stdout).unwrap();
    assert!(text.contains("class_order(p = 5, n = 1, k = 12)"));
    assert!(text.contains("expected 25"));
}
