use std::fs;
use std::path::Path;
use std::process::Command;

use narrevo::*;
use narrevo_core::{AgentKind, ReplicationResult};
use proptest::prelude::*;

fn small_config(dir: &Path) -> ExperimentConfig {
    let text = format!(
        r#"{{
            "n": 40, "T": 60, "tau": 10, "reps": 3, "master_seed": 9,
            "q_grid": [0.6, 0.8],
            "overrides": [{{}}, {{"n": 10, "p": 0.9}}],
            "emit_timeseries": true,
            "output_dir": {:?}
        }}"#,
        dir.to_str().unwrap()
    );
    ExperimentConfig::from_json_str(&text, Path::new("inline.json")).unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn runs_are_deterministic_and_independent_of_worker_count() {
    let tmp = tempfile::tempdir().unwrap();
    let config = small_config(tmp.path());
    let serial = run_experiment(&config, Some(1)).unwrap();
    let parallel = run_experiment(&config, Some(4)).unwrap();
    let again = run_experiment(&config, None).unwrap();
    assert_eq!(serial, parallel);
    assert_eq!(serial, again);

    write_outputs(&serial, &config, &tmp.path().join("a")).unwrap();
    write_outputs(&parallel, &config, &tmp.path().join("b")).unwrap();
    for file in ["aggregate.csv", "timeseries.csv"] {
        assert_eq!(
            fs::read(tmp.path().join("a").join(file)).unwrap(),
            fs::read(tmp.path().join("b").join(file)).unwrap(),
            "{file}"
        );
    }
}

#[test]
fn aggregate_csv_schema_order_and_conservation() {
    let tmp = tempfile::tempdir().unwrap();
    let config = small_config(tmp.path());
    let run = run_experiment(&config, None).unwrap();
    let paths = write_outputs(&run, &config, tmp.path()).unwrap();

    let (header, rows) = read_csv(&paths.aggregate);
    assert_eq!(
        header.join(","),
        "law,q,delta,p,rho1,rho2,tau,n,reps,kind,mean_share,sd_share,mean_mse,sd_mse"
    );
    assert_eq!(rows.len(), 4 * 2 * 2 * 5);
    assert!(fs::read_to_string(&paths.aggregate).unwrap().ends_with('\n'));

    for (g, group) in rows.chunks(5).enumerate() {
        let kinds: Vec<&str> = group.iter().map(|r| r[9].as_str()).collect();
        assert_eq!(kinds, AgentKind::ALL.map(|k| k.name()).to_vec());
        assert!(group.iter().all(|r| r[..9] == group[0][..9]));
        let total: f64 = group.iter().map(|r| r[10].parse::<f64>().unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-9, "group {g}: {total}");
        assert!(group.iter().all(|r| r[8] == "3"));
    }
    // law, then override set (n = 40 before n = 10), then q.
    let keys: Vec<(String, String, String)> = rows
        .iter()
        .step_by(5)
        .map(|r| (r[0].clone(), r[7].clone(), r[1].clone()))
        .collect();
    assert_eq!(keys[0], ("independent".into(), "40".into(), "0.6".into()));
    assert_eq!(keys[1], ("independent".into(), "40".into(), "0.8".into()));
    assert_eq!(keys[2], ("independent".into(), "10".into(), "0.6".into()));
    assert_eq!(keys[4].0, "persistent");
    assert_eq!(keys[15].0, "self_fulfilling");
    assert_eq!(rows[10][3], "0.9");
}

#[test]
fn timeseries_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let config = small_config(tmp.path());
    let run = run_experiment(&config, None).unwrap();
    let paths = write_outputs(&run, &config, tmp.path()).unwrap();
    let (header, rows) = read_csv(paths.timeseries.as_ref().unwrap());
    assert_eq!(header.join(","), "rep,t,kind,share,mean_error,psi");
    // Selection at t = 10..=50, plus T = 60.
    assert_eq!(rows.len(), 16 * 3 * 6 * 5);
    let ts: Vec<&str> = rows.iter().step_by(5).take(6).map(|r| r[1].as_str()).collect();
    assert_eq!(ts, ["10", "20", "30", "40", "50", "60"]);
    let reps: std::collections::BTreeSet<u64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(reps, (0..48).collect());
    for group in rows.chunks(5) {
        let total: f64 = group.iter().map(|r| r[3].parse::<f64>().unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-9);
        // Shares are post-rebirth and errors pre-selection, so an empty
        // error cell need not coincide with a zero share.
        for r in group {
            if !r[4].is_empty() {
                assert!((0.0..=1.0).contains(&r[4].parse::<f64>().unwrap()));
            }
            assert_eq!(r[5], group[0][5]);
        }
    }
}

#[test]
fn no_timeseries_unless_requested() {
    let tmp = tempfile::tempdir().unwrap();
    let mut config = small_config(tmp.path());
    config.emit_timeseries = false;
    let run = run_experiment(&config, None).unwrap();
    let paths = write_outputs(&run, &config, tmp.path()).unwrap();
    assert!(paths.timeseries.is_none());
    assert!(!tmp.path().join("timeseries.csv").exists());
}

#[test]
fn manifest_round_trip_reproduces_aggregate() {
    let tmp = tempfile::tempdir().unwrap();
    let config = small_config(tmp.path());
    let run = run_experiment(&config, None).unwrap();
    let first = write_outputs(&run, &config, &tmp.path().join("first")).unwrap();

    let manifest = Manifest::read(&first.manifest).unwrap();
    assert_eq!(manifest.master_seed, 9);
    assert_eq!(manifest.artifact_version, env!("CARGO_PKG_VERSION"));
    assert_eq!(manifest.config, config);
    assert_eq!(manifest.cells.len(), 16);
    assert_eq!(manifest.cells[5].seed_base, derive_seed(9, 5, 0));
    assert_eq!(manifest.cells[5].rep_offset, 15);
    assert!(chrono::DateTime::parse_from_rfc3339(&manifest.created_utc).is_ok());
    assert!(manifest.created_utc.ends_with('Z'));

    let replayed_config = parse_config(&first.manifest).unwrap();
    let replay = run_experiment(&replayed_config, Some(2)).unwrap();
    let second = write_outputs(&replay, &replayed_config, &tmp.path().join("second")).unwrap();
    assert_eq!(fs::read(first.aggregate).unwrap(), fs::read(second.aggregate).unwrap());
}

#[test]
fn single_replication_has_zero_spread() {
    let tmp = tempfile::tempdir().unwrap();
    let mut config = small_config(tmp.path());
    config.reps = 1;
    let run = run_experiment(&config, None).unwrap();
    for (cell, reps) in run.aggregate.cells.iter().zip(&run.replications) {
        assert_eq!(reps.len(), 1);
        for k in 0..AgentKind::COUNT {
            assert_eq!(cell.kinds[k].mean_share, reps[0].final_shares[k]);
            assert_eq!(cell.kinds[k].sd_share, 0.0);
            assert_eq!(cell.kinds[k].mean_mse, reps[0].final_mse[k]);
            assert_eq!(cell.kinds[k].sd_mse, reps[0].final_mse[k].map(|_| 0.0));
        }
    }
}

#[test]
fn replication_seeds_follow_derivation() {
    let tmp = tempfile::tempdir().unwrap();
    let config = small_config(tmp.path());
    let run = run_experiment(&config, None).unwrap();
    for (c, reps) in run.replications.iter().enumerate() {
        for (r, result) in reps.iter().enumerate() {
            assert_eq!(result.seed, derive_seed(9, c as u64, r as u64));
        }
    }
}

fn synthetic(seed: u64, shares: [f64; 5], mse: [Option<f64>; 5]) -> ReplicationResult {
    ReplicationResult {
        seed,
        final_shares: shares,
        final_mse: mse,
        trailing_shares: shares,
        epoch_series: Vec::new(),
        rebirths_total: 0,
    }
}

fn share_vector() -> impl Strategy<Value = [f64; 5]> {
    prop::array::uniform5(1u32..1000).prop_map(|w| {
        let total: u32 = w.iter().sum();
        w.map(|x| f64::from(x) / f64::from(total))
    })
}

proptest! {
    #[test]
    fn aggregation_is_permutation_invariant(
        results in prop::collection::vec(
            (share_vector(), prop::array::uniform5(prop::option::of(0.0f64..0.5))),
            1..30,
        ),
        shuffle_seed in any::<u64>(),
    ) {
        let cell = small_config(Path::new("unused")).cells().unwrap()[0];
        let reps: Vec<_> = results.iter().enumerate()
            .map(|(i, (s, m))| synthetic(i as u64, *s, *m))
            .collect();
        let mut shuffled = reps.clone();
        // Fisher-Yates driven by a simple LCG.
        let mut state = shuffle_seed;
        for i in (1..shuffled.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (state >> 33) as usize % (i + 1));
        }
        let a = aggregate_cell(cell, 0, &reps);
        let b = aggregate_cell(cell, 0, &shuffled);
        for k in 0..5 {
            prop_assert_eq!(a.kinds[k].mean_share.to_bits(), b.kinds[k].mean_share.to_bits());
            prop_assert_eq!(a.kinds[k].sd_share.to_bits(), b.kinds[k].sd_share.to_bits());
            prop_assert_eq!(a.kinds[k].mean_mse.map(f64::to_bits), b.kinds[k].mean_mse.map(f64::to_bits));
            prop_assert_eq!(a.kinds[k].sd_mse.map(f64::to_bits), b.kinds[k].sd_mse.map(f64::to_bits));
        }
        let total: f64 = a.kinds.iter().map(|k| k.mean_share).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
        let parsed: f64 = a.kinds.iter().map(|k| format_number(k.mean_share).parse::<f64>().unwrap()).sum();
        prop_assert!((parsed - 1.0).abs() < 1e-9);
    }
}

fn narrevo() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_narrevo"));
    cmd.env_remove("NARREVO_WORKERS");
    cmd
}

#[test]
fn cli_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let good = tmp.path().join("good.json");
    fs::write(&good, r#"{"n": 20, "T": 40, "reps": 2, "q_grid": [0.7], "laws": ["independent"]}"#).unwrap();
    let bad = tmp.path().join("bad.json");
    fs::write(&bad, r#"{"rho2": 0.4}"#).unwrap();
    let typo = tmp.path().join("typo.json");
    fs::write(&typo, "{\n  \"rho_2\": 0.8\n}").unwrap();

    let status = |args: &[&str]| narrevo().args(args).output().unwrap();

    let out = status(&["validate", "--config", good.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let out = status(&["validate", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rho2"));
    let out = status(&["validate", "--config", typo.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2:"));
    let missing = tmp.path().join("missing.json");
    let out = status(&["validate", "--config", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = status(&["simulate", "--config", good.to_str().unwrap(), "--reps", "0"]);
    assert_eq!(out.status.code(), Some(1));
    let out = status(&["simulate"]);
    assert_eq!(out.status.code(), Some(1));

    // Output directory blocked by a regular file.
    let blocker = tmp.path().join("blocker");
    fs::write(&blocker, "").unwrap();
    let out = status(&["simulate", "--config", good.to_str().unwrap(), "--out", blocker.join("x").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cli_simulate_flags_and_worker_env() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("c.json");
    fs::write(&config, r#"{"n": 30, "T": 50, "reps": 5, "q_grid": [0.6, 0.9], "laws": ["persistent"]}"#).unwrap();
    let run = |out: &str, extra: &[&str], workers: Option<&str>| {
        let mut cmd = narrevo();
        cmd.args(["simulate", "--config", config.to_str().unwrap(), "--out"])
            .arg(tmp.path().join(out))
            .args(extra);
        if let Some(w) = workers {
            cmd.env("NARREVO_WORKERS", w);
        }
        let output = cmd.output().unwrap();
        assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
        fs::read(tmp.path().join(out).join("aggregate.csv")).unwrap()
    };

    let base = run("a", &["--seed", "77", "--reps", "2"], Some("1"));
    let threaded = run("b", &["--seed", "77", "--reps", "2", "--workers", "3"], Some("1"));
    let via_env = run("c", &["--seed", "77", "--reps", "2", "--timeseries"], Some("2"));
    let other_seed = run("d", &["--seed", "78", "--reps", "2"], None);
    assert_eq!(base, threaded);
    assert_eq!(base, via_env);
    assert_ne!(base, other_seed);
    assert!(tmp.path().join("c/timeseries.csv").exists());
    assert!(!tmp.path().join("a/timeseries.csv").exists());

    let text = String::from_utf8(base).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 5);
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(8) == Some("2")));
    let manifest = Manifest::read(&tmp.path().join("a/manifest.json")).unwrap();
    assert_eq!((manifest.master_seed, manifest.config.reps), (77, 2));
}

#[test]
fn shipped_configs_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut names = Vec::new();
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let config = parse_config(&path).unwrap_or_else(|e| panic!("{e}"));
        names.push((path.file_stem().unwrap().to_string_lossy().into_owned(), config));
    }
    names.sort_by(|a, b| a.0.cmp(&b.0));
    let find = |name: &str| &names.iter().find(|(n, _)| n == name).unwrap().1;
    assert_eq!(find("benchmark").cells().unwrap().len(), 20);
    assert_eq!(find("tau20").tau, 20);
    assert_eq!(find("tau5").tau, 5);
    assert_eq!(find("n10").n, 10);
    assert_eq!(find("n50").n, 50);
    assert_eq!(find("precision_p0.9").overrides[0].p, Some(0.9));
    assert_eq!(find("menu_rho2_0.7").overrides[0].rho2, Some(0.7));
    assert_eq!(find("self_fulfilling_delta1").delta, 1.0);
    assert_eq!(find("q1").q_grid, vec![1.0]);
}
