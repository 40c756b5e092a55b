use meadd::harness::{
    emit_plot_data, preset, run, run_with, write_atomic, Expectation, ExperimentConfig, Overrides,
    ResultTable, Value, PRESETS,
};
use meadd::Error;
use std::process::Command;

const SAMPLED_SWAP: &str = r#"
name = "swap-small"
seed = 11

[experiment]
kind = "swap"
depths = [2, 4, 6, 8]
realizations = 6

[experiment.gate]
theta = 0.05
chi = 0.4
zeta = 0.02

[experiment.noise]
shots = 400
zeta_drift_std = 0.01

[[expect]]
metric = "theta_error_max"
max = 0.05
"#;

fn sampled() -> ExperimentConfig {
    ExperimentConfig::from_toml(SAMPLED_SWAP).unwrap()
}

fn csv_bytes(out: &meadd::harness::RunOutput) -> Vec<String> {
    let mut all: Vec<String> = out.tables.iter().map(|(_, t)| t.to_csv()).collect();
    all.push(out.summary().to_csv());
    all
}

#[test]
fn presets_parse_and_validate() {
    for (name, _) in PRESETS {
        let config = preset(name).unwrap();
        config.validate().unwrap();
        assert!(!config.expect.is_empty(), "{name} declares no expectations");
    }
    assert!(matches!(preset("fig7"), Err(Error::Config { .. })));
}

#[test]
fn config_round_trips_through_toml() {
    let config = sampled();
    let again = ExperimentConfig::from_toml(&config.to_toml()).unwrap();
    assert_eq!(config, again);
    assert_eq!(config.hash(), again.hash());
    assert_eq!(config.hash().len(), 64);
}

#[test]
fn hash_tracks_content() {
    let a = sampled();
    let mut b = sampled();
    b.seed += 1;
    assert_ne!(a.hash(), b.hash());
}

#[test]
fn empty_depth_list_is_a_config_error() {
    let text = SAMPLED_SWAP.replace("depths = [2, 4, 6, 8]", "depths = []");
    match ExperimentConfig::from_toml(&text) {
        Err(Error::Config { field, .. }) => assert_eq!(field, "experiment.depths"),
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn unknown_keys_and_kinds_are_config_errors() {
    let typo = SAMPLED_SWAP.replace("realizations = 6", "realisations = 6");
    assert!(matches!(
        ExperimentConfig::from_toml(&typo),
        Err(Error::Config { .. })
    ));
    let kind = SAMPLED_SWAP.replace("kind = \"swap\"", "kind = \"teleport\"");
    assert!(matches!(
        ExperimentConfig::from_toml(&kind),
        Err(Error::Config { .. })
    ));
}

#[test]
fn output_is_identical_across_thread_counts() {
    let config = sampled();
    let serial = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let wide = rayon::ThreadPoolBuilder::new()
        .num_threads(6)
        .build()
        .unwrap();
    let a = serial.install(|| run(&config)).unwrap();
    let b = wide.install(|| run(&config)).unwrap();
    assert_eq!(csv_bytes(&a), csv_bytes(&b));
}

#[test]
fn seed_override_changes_sampled_output() {
    let config = sampled();
    let base = run(&config).unwrap();
    let same = run_with(
        &config,
        &Overrides {
            seed: Some(11),
            ..Overrides::default()
        },
    )
    .unwrap();
    let other = run_with(
        &config,
        &Overrides {
            seed: Some(12),
            ..Overrides::default()
        },
    )
    .unwrap();
    assert_eq!(csv_bytes(&base), csv_bytes(&same));
    assert_ne!(csv_bytes(&base), csv_bytes(&other));
    assert_eq!(other.config.seed, 12);
    assert_ne!(base.config_hash, other.config_hash);
}

#[test]
fn exact_override_removes_shot_noise() {
    let out = run_with(
        &sampled(),
        &Overrides {
            exact: true,
            ..Overrides::default()
        },
    )
    .unwrap();
    assert!(out.metrics["theta_std"] < 0.02, "{:?}", out.metrics);
    assert!(out.passed());
}

#[test]
fn tables_carry_metadata_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&sampled()).unwrap();
    let written = out.write(dir.path()).unwrap();
    assert_eq!(written.len(), out.tables.len() + 1);
    for path in &written {
        let table = ResultTable::read(path).unwrap();
        assert_eq!(table.meta("config_hash"), Some(out.config_hash.as_str()));
        assert_eq!(table.meta("seed"), Some("11"));
        assert_eq!(table.meta("version"), Some(env!("CARGO_PKG_VERSION")));
        assert!(!table.is_empty());
    }
    let reread = ResultTable::read(&written[0]).unwrap();
    assert_eq!(reread.to_csv(), out.tables[0].1.to_csv());
}

#[test]
fn atomic_write_replaces_without_leftovers() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested").join("t.csv");
    write_atomic(&path, b"first\n").unwrap();
    write_atomic(&path, b"second\n").unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "second\n");
    let entries: Vec<_> = std::fs::read_dir(path.parent().unwrap()).unwrap().collect();
    assert_eq!(entries.len(), 1);
}

#[test]
fn expectation_bounds() {
    let e = Expectation {
        metric: "m".into(),
        min: Some(1.0),
        max: Some(2.0),
    };
    assert!(e.holds(1.0) && e.holds(2.0));
    assert!(!e.holds(0.5) && !e.holds(2.5) && !e.holds(f64::NAN));
}

#[test]
fn missing_metric_fails_its_expectation() {
    let text = format!("{SAMPLED_SWAP}\n[[expect]]\nmetric = \"no_such_metric\"\nmax = 1.0\n");
    let out = run(&ExperimentConfig::from_toml(&text).unwrap()).unwrap();
    assert!(!out.passed());
    assert!(out.summary().to_csv().contains("no_such_metric,missing"));
}

#[test]
fn fig6_plot_data_has_one_series_per_over_rotation() {
    let out = run(&preset("fig6").unwrap()).unwrap();
    let records = out.table("records").unwrap();
    let plot = emit_plot_data(records, "fig6").unwrap();
    let series: std::collections::BTreeSet<String> = plot
        .column("series")
        .unwrap()
        .values
        .iter()
        .map(Value::as_text)
        .collect();
    assert_eq!(series.len(), 4);
    assert_eq!(plot.len(), 4 * 7);
    assert_eq!(plot.meta("plot"), Some("fig6"));
    // Re-emission from the parsed CSV is byte-identical.
    let parsed = ResultTable::from_csv(&records.to_csv()).unwrap();
    assert_eq!(
        emit_plot_data(&parsed, "fig6").unwrap().to_csv(),
        plot.to_csv()
    );
}

#[test]
fn fig5_plot_data_pivots_protocols() {
    let text = "# table: snr\nprotocol,theta,zeta_ratio,snr\n\
                phase-method,0.01,1.0,3.0\nmeadd,0.01,1.0,9.0\nmeadd,0.01,0.0,8.5\nphase-method,0.01,0.0,6.0\n";
    let table = ResultTable::from_csv(text).unwrap();
    let plot = emit_plot_data(&table, "fig5").unwrap();
    assert_eq!(
        plot.to_csv(),
        "# table: snr\n# plot: fig5\ntheta,zeta_ratio,snr_meadd,snr_phase-method\n\
         0.01,0.0,8.5,6.0\n0.01,1.0,9.0,3.0\n"
    );
}

#[test]
fn unknown_plot_kind_is_rejected() {
    let table = ResultTable::new(&["x"]);
    assert!(matches!(emit_plot_data(&table, "fig9"), Err(Error::UnknownKind(k)) if k == "fig9"));
}

#[test]
fn robustness_preset_meets_its_expectations() {
    let out = run(&preset("robustness-table").unwrap()).unwrap();
    assert!(out.passed(), "{:?}", out.checks);
}

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_meadd"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();

    let ok = cli(&["robustness", "cz", "xx", "--out", out, "--check"]);
    assert_eq!(
        ok.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&ok.stderr)
    );
    assert!(String::from_utf8_lossy(&ok.stdout).contains("# config_hash: "));

    let bad_gate = cli(&["robustness", "toffoli", "xx", "--out", out]);
    assert_eq!(bad_gate.status.code(), Some(1));

    let bad_config = dir.path().join("bad.toml");
    std::fs::write(
        &bad_config,
        SAMPLED_SWAP.replace("depths = [2, 4, 6, 8]", "depths = []"),
    )
    .unwrap();
    assert_eq!(
        cli(&["run", bad_config.to_str().unwrap(), "--out", out])
            .status
            .code(),
        Some(1)
    );

    let strict = dir.path().join("strict.toml");
    std::fs::write(&strict, SAMPLED_SWAP.replace("max = 0.05", "max = 1e-12")).unwrap();
    let strict = strict.to_str().unwrap();
    assert_eq!(
        cli(&["run", strict, "--out", out, "--check"]).status.code(),
        Some(2)
    );
    assert_eq!(cli(&["run", strict, "--out", out]).status.code(), Some(0));
}

#[test]
fn cli_runs_are_deterministic_and_plot_data_works() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("swap.toml");
    std::fs::write(&config, SAMPLED_SWAP).unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for (out, jobs) in [(&a, "1"), (&b, "4")] {
        let status = cli(&[
            "run",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--jobs",
            jobs,
        ]);
        assert_eq!(status.status.code(), Some(0));
    }
    for name in [
        "swap-small_records.csv",
        "swap-small_estimates.csv",
        "swap-small_summary.csv",
    ] {
        assert_eq!(
            std::fs::read(a.join(name)).unwrap(),
            std::fs::read(b.join(name)).unwrap(),
            "{name}"
        );
    }

    let drag = cli(&["drag", "14:38:3", "--out", a.to_str().unwrap()]);
    assert_eq!(drag.status.code(), Some(0));
    let leak = a.join("drag_leakage.csv");
    let plot = cli(&[
        "plot-data",
        leak.to_str().unwrap(),
        "drag",
        "--out",
        a.to_str().unwrap(),
    ]);
    assert_eq!(plot.status.code(), Some(0));
    assert_eq!(
        ResultTable::read(&a.join("drag_leakage_drag.csv"))
            .unwrap()
            .len(),
        3
    );
    let unknown = cli(&[
        "plot-data",
        leak.to_str().unwrap(),
        "fig9",
        "--out",
        a.to_str().unwrap(),
    ]);
    assert_eq!(unknown.status.code(), Some(1));
    assert_eq!(cli(&["drag", "14-38"]).status.code(), Some(1));
}
