use std::process::{Command, Output};

use rdgame_cli::commands::{EntryRow, EqOutput, ExpostOutput, SweepOutput, VerifyOutput};

fn rdgame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rdgame")).args(args).output().expect("binary runs")
}

fn json<T: serde::de::DeserializeOwned>(args: &[&str]) -> T {
    let mut v = args.to_vec();
    v.extend(["--format", "json"]);
    let out = rdgame(&v);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn eq_reports_equilibrium() {
    let r: EqOutput = json(&["eq", "--n", "3", "--grid", "600"]);
    assert_eq!(r.locations, vec![0.166666666667, 0.5, 0.833333333333]);
    assert_eq!(r.prices, vec![0.037037037037, 0.0185185185185, 0.037037037037]);
    assert!(r.foc_residuals.iter().all(|x| x.abs() < 1e-12));
    let r: EqOutput = json(&["eq", "--n", "2", "--grid", "100"]);
    assert_eq!(r.prices, vec![0.125, 0.125]);
}

#[test]
fn eq_rejects_single_plan() {
    assert_eq!(rdgame(&["eq", "--n", "1"]).status.code(), Some(1));
}

#[test]
fn expost_examples() {
    let r: ExpostOutput = json(&["expost", "--locations", "0.25,0.75", "--t", "0.3"]);
    assert_eq!((r.purchased, r.price_paid, r.government_utility), (Some(1), 0.2, 1.7975));
    assert_eq!(rdgame(&["expost", "--locations", "0.25,0.75", "--t", "1.5"]).status.code(), Some(1));
    assert_eq!(rdgame(&["expost", "--locations", "0.5,0.5", "--t", "0.3"]).status.code(), Some(1));
}

#[test]
fn expost_numbers_plans_in_input_order() {
    let r: ExpostOutput = json(&[
        "expost", "--locations", "0.75,0.25", "--held", "1", "--t", "0.3",
        "--exante-expenditure", "0.1",
    ]);
    // plan 1 sits at 0.75, so the government buys plan 2
    assert_eq!(r.purchased, Some(2));
    assert_eq!(r.expost_prices, vec![0.0, 0.2]);
    assert_eq!(r.government_utility, 1.6975);
    let bad = rdgame(&["expost", "--locations", "0.25,0.75", "--held", "3", "--t", "0.3"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn entry_and_sweep() {
    let r: EntryRow = json(&["entry", "--fixed-cost", "0.001"]);
    assert_eq!((r.n_star, r.alternate), (10, Some(9)));
    let r: EntryRow = json(&["entry", "--fixed-cost", "0.002", "--mode", "computed"]);
    assert_eq!(r.n_star, 6);
    assert_eq!(rdgame(&["entry", "--fixed-cost", "0"]).status.code(), Some(1));
    assert_eq!(rdgame(&["entry", "--fixed-cost", "-1"]).status.code(), Some(1));

    let s: SweepOutput = json(&["sweep", "--from", "1e-4", "--to", "1e-1", "--steps", "50", "--log"]);
    assert_eq!(s.rows.len(), 50);
    assert!(s.nonincreasing);
    assert!(s.rows.windows(2).all(|w| w[1].n_star <= w[0].n_star));
}

#[test]
fn verify_passes_at_equilibrium_and_flags_conflict() {
    let args = ["verify", "--n", "3", "--grid", "600", "--check", "paper-eq16"];
    let r: VerifyOutput = json(&args);
    assert!(r.passed);
    let interior = r
        .rows
        .iter()
        .find(|x| x.quantity == "interior expected profit, plan 2")
        .unwrap();
    assert_eq!(interior.closed_form_value, 0.0185185185185);
    let conflict = r.rows.iter().find(|x| x.quantity.starts_with("published interior")).unwrap();
    assert_eq!(conflict.abs_error, 0.0555555555556);

    let out = rdgame(&args);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("paper-conflict"));
}

#[test]
fn verify_fails_off_equilibrium_with_code_two() {
    let out = rdgame(&["verify", "--locations", "0.1,0.9", "--grid", "500"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stdout).unwrap().contains("result: fail"));
}

#[test]
fn verify_is_reproducible_under_a_seed() {
    let run = |seed: &str| {
        rdgame(&[
            "verify", "--n", "5", "--mc-samples", "20000", "--seed", seed, "--grid", "500",
            "--format", "csv",
        ])
        .stdout
    };
    assert_eq!(run("7"), run("7"));
    assert_ne!(run("7"), run("8"));
}

#[test]
fn csv_always_has_a_header() {
    let out = rdgame(&["audit", "--n", "3", "--grid", "300", "--format", "csv"]);
    let out = String::from_utf8(out.stdout).unwrap();
    let mut lines = out.lines();
    assert!(lines.next().unwrap().starts_with("plan,location,status_quo"));
    assert_eq!(lines.count(), 3);

    let out = rdgame(&["exante", "--locations", "0.25,0.75", "--prices", "0.1,0.2", "--format", "csv"]);
    let out = String::from_utf8(out.stdout).unwrap();
    assert!(out.starts_with("plan,location,exante_price"));
    assert!(out.contains(",adopt,") && out.contains(",reject,"));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scenario.toml");
    std::fs::write(&path, "n = 4\nfixed_cost = 0.002\ngrid_resolution = 400\n").unwrap();
    let p = path.to_str().unwrap();
    let r: EqOutput = json(&["eq", "--config", p]);
    assert_eq!((r.n, r.grid_resolution), (4, 400));
    let r: EqOutput = json(&["eq", "--config", p, "--n", "2"]);
    assert_eq!(r.n, 2);
    let r: EntryRow = json(&["entry", "--config", p]);
    assert_eq!(r.n_star, 7);

    std::fs::write(&path, "n = 4\nflavour = 1\n").unwrap();
    assert_eq!(rdgame(&["eq", "--config", p]).status.code(), Some(1));
    assert_eq!(rdgame(&["eq", "--config", "/nonexistent/x.toml"]).status.code(), Some(1));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eq.json");
    let out = rdgame(&[
        "eq", "--n", "2", "--grid", "100", "--format", "json", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: EqOutput = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r.prices, vec![0.125, 0.125]);
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    assert_eq!(rdgame(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(rdgame(&["eq", "--n", "three"]).status.code(), Some(1));
    assert_eq!(rdgame(&["eq", "--n", "3", "--grid", "50"]).status.code(), Some(1));
    let help = rdgame(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8(help.stdout).unwrap().contains("CSV columns"));
}
