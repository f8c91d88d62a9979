#![allow(dead_code)]

use std::fs;
use std::path::PathBuf;
use std::process::Command;

pub fn workspace() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn fixture(name: &str) -> PathBuf {
    workspace().join("fixtures").join(name)
}

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the binary from the workspace root so relative paths in
/// diagnostics are stable.
pub fn run(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_riskload"))
        .args(args)
        .current_dir(workspace())
        .output()
        .expect("binary runs");
    Output {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).expect("stdout is UTF-8"),
        stderr: String::from_utf8(out.stderr).expect("stderr is UTF-8"),
    }
}

const ELAST: &str = "fixtures/portfolio_elasticities.toml";
const COEFF: &str = "fixtures/portfolio_coefficients.toml";
const QUAD: &str = "fixtures/portfolio_quadratic.toml";
const TARIFF: &str = "fixtures/tariff.toml";
const CURVE: &str = "fixtures/load_curve.csv";

/// Successful invocations and the golden file holding their stdout.
pub fn golden_cases() -> Vec<(&'static str, Vec<&'static str>)> {
    let common = |cmd: &'static str, portfolio: &'static str| vec![cmd, "--portfolio", portfolio, "--tariff", TARIFF];
    let with = |mut base: Vec<&'static str>, extra: &[&'static str]| {
        base.extend_from_slice(extra);
        base
    };
    let sweep = |extra: &[&'static str]| {
        with(
            common("sweep", COEFF),
            &[&["--sector", "residential", "--period", "off-peak"], extra].concat(),
        )
    };
    let scenario = |extra: &[&'static str]| {
        with(
            common("scenario", ELAST),
            &[&["--curve", CURVE, "--allow-uncovered"], extra].concat(),
        )
    };
    vec![
        ("calibrate.csv", common("calibrate", ELAST)),
        (
            "calibrate.json",
            with(common("calibrate", ELAST), &["--format", "structured"]),
        ),
        ("calibrate_quadratic.csv", common("calibrate", QUAD)),
        (
            "sweep_demand.csv",
            sweep(&["--from", "260", "--to", "600", "--steps", "18"]),
        ),
        (
            "sweep_welfare.csv",
            sweep(&["--quantity", "welfare", "--from", "200", "--to", "600", "--steps", "9"]),
        ),
        (
            "sweep_utility.csv",
            sweep(&["--quantity", "utility", "--from", "0", "--to", "3", "--steps", "7"]),
        ),
        (
            "sweep_two_steps.csv",
            sweep(&["--from", "260", "--to", "520", "--steps", "2"]),
        ),
        ("elasticity.csv", common("elasticity", COEFF)),
        (
            "elasticity.json",
            with(common("elasticity", COEFF), &["--format", "structured"]),
        ),
        (
            "scenario_price_income.csv",
            scenario(&["--price", "1.05", "--income", "1.05"]),
        ),
        ("scenario_price.csv", scenario(&["--price", "1.05", "--income", "1.0"])),
        (
            "scenario_income.json",
            scenario(&["--price", "1.0", "--income", "1.05", "--format", "structured"]),
        ),
        ("scenario_peak.csv", scenario(&["--price", "1,1,1.1"])),
        (
            "scenario_period_price.csv",
            scenario(&["--price", "1.05", "--period-price", "peak=1.1"]),
        ),
    ]
}

/// Failing invocations: arguments, expected exit code and fragments the
/// diagnostic must contain.
pub fn error_cases() -> Vec<(Vec<&'static str>, i32, Vec<&'static str>)> {
    vec![
        (
            vec!["calibrate", "--portfolio", "fixtures/missing.toml", "--tariff", TARIFF],
            1,
            vec!["fixtures/missing.toml"],
        ),
        (
            vec![
                "calibrate",
                "--portfolio",
                "fixtures/portfolio_quadratic_infeasible.toml",
                "--tariff",
                TARIFF,
            ],
            1,
            vec!["residential", "mid-peak"],
        ),
        (
            vec![
                "elasticity",
                "--portfolio",
                COEFF,
                "--tariff",
                "fixtures/missing_tariff.toml",
            ],
            1,
            vec!["fixtures/missing_tariff.toml"],
        ),
        (
            vec![
                "scenario",
                "--portfolio",
                ELAST,
                "--tariff",
                TARIFF,
                "--curve",
                CURVE,
                "--price",
                "1.05",
            ],
            1,
            vec!["hour(s) 23", CURVE],
        ),
        (
            vec![
                "sweep",
                "--portfolio",
                COEFF,
                "--tariff",
                TARIFF,
                "--sector",
                "residential",
                "--period",
                "peak",
                "--from",
                "1",
                "--to",
                "2",
                "--steps",
                "1",
            ],
            1,
            vec!["--steps"],
        ),
        (
            vec![
                "sweep",
                "--portfolio",
                COEFF,
                "--tariff",
                TARIFF,
                "--sector",
                "residential",
                "--period",
                "peak",
                "--from",
                "600",
                "--to",
                "260",
            ],
            1,
            vec!["range"],
        ),
        (
            vec![
                "sweep",
                "--portfolio",
                COEFF,
                "--tariff",
                TARIFF,
                "--sector",
                "nobody",
                "--period",
                "peak",
                "--from",
                "1",
                "--to",
                "2",
            ],
            1,
            vec!["nobody"],
        ),
        (
            vec![
                "scenario",
                "--portfolio",
                ELAST,
                "--tariff",
                TARIFF,
                "--curve",
                CURVE,
                "--price",
                "1,2",
            ],
            1,
            vec!["--price"],
        ),
        (vec!["frobnicate"], 1, vec!["frobnicate"]),
        (
            vec![
                "scenario",
                "--portfolio",
                QUAD,
                "--tariff",
                TARIFF,
                "--curve",
                CURVE,
                "--allow-uncovered",
                "--income",
                "10",
            ],
            2,
            vec!["residential", "infeasible"],
        ),
    ]
}

/// Compares every golden case against its file, or rewrites the files when
/// `UPDATE_GOLDEN` is set. Returns one message per mismatch.
pub fn check_goldens() -> Vec<String> {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut problems = Vec::new();
    for (name, args) in golden_cases() {
        let first = run(&args);
        if first.code != 0 {
            problems.push(format!("{name}: exit {} ({})", first.code, first.stderr.trim()));
            continue;
        }
        if !first.stdout.ends_with('\n') {
            problems.push(format!("{name}: output not newline-terminated"));
        }
        let second = run(&args);
        if second.stdout != first.stdout {
            problems.push(format!("{name}: output differs between runs"));
        }
        let path = golden_dir().join(name);
        if update {
            fs::write(&path, &first.stdout).expect("golden file written");
            continue;
        }
        match fs::read_to_string(&path) {
            Ok(expected) if expected == first.stdout => {}
            Ok(_) => problems.push(format!("{name}: output differs from golden file")),
            Err(e) => problems.push(format!("{name}: {e}")),
        }
    }
    problems
}

pub fn check_error_cases() -> Vec<String> {
    let mut problems = Vec::new();
    for (args, code, fragments) in error_cases() {
        let out = run(&args);
        let label = args.join(" ");
        if out.code != code {
            problems.push(format!("`{label}`: exit {} (want {code})", out.code));
        }
        for f in fragments {
            if !out.stderr.contains(f) {
                problems.push(format!("`{label}`: stderr lacks `{f}`: {}", out.stderr.trim()));
            }
        }
    }
    for flag in ["--help", "--version"] {
        let out = run(&[flag]);
        if out.code != 0 || out.stdout.is_empty() {
            problems.push(format!("`{flag}`: exit {}", out.code));
        }
    }
    problems
}
