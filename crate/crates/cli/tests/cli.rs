use std::fs;
use std::path::Path;

use acl_cli::cache::{Cache, CacheEntry, Lookup, SCHEMA_VERSION};
use acl_cli::commands::produce;
use acl_cli::config::{Command, Flags, RunConfig};
use acl_cli::{run_report, Report};
use acl_core::record::{params, CountRecord, Quantity};

fn acl(args: &[&str]) -> (Report, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv: Vec<&str> = std::iter::once("acl").chain(args.iter().copied()).collect();
    let r = run_report(argv, &mut out, &mut err);
    (r, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn rational_count_row() {
    let (r, out, _) = acl(&["count", "rational", "--q", "2", "--n", "2", "--M", "1"]);
    assert_eq!(r.code, 0);
    assert_eq!(out, "q,n,M,observed,predicted,match\n2,2,1,42,42,true\n");
}

#[test]
fn rational_golden_csv() {
    let (r, out, _) = acl(&["count", "rational", "--q", "2", "--n", "1", "--M", "1", "--M-max", "3"]);
    assert_eq!(r.code, 0);
    assert_eq!(out, "q,n,M,observed,predicted,match\n2,1,1,6,6,true\n2,1,2,24,24,true\n2,1,3,96,96,true\n");
    assert!(!out.contains('\r'));
}

#[test]
fn cycles_rows() {
    let (r, out, _) = acl(&["cycles", "--q", "2", "--m-max", "3"]);
    assert_eq!(r.code, 0);
    let t = rows(&out);
    assert_eq!(t[0], ["m", "sym", "hilb", "primes", "chen7", "chen8", "chen8_valid", "ratio_error"]);
    assert_eq!(&t[1][1..4], ["35", "49", "7"]);
    assert_eq!(t[2][1], "155");
    assert_eq!(t[2][3], "22");
    assert!(t[2][7].parse::<f64>().unwrap() < 0.41);
}

#[test]
fn guard_exit_code() {
    let (r, _, err) = acl(&["count", "rational", "--q", "97", "--n", "5", "--M", "9"]);
    assert_eq!(r.code, 3, "{err}");
    assert_eq!(acl(&["peyre", "pn", "--digits", "100000"]).0.code, 3);
}

#[test]
fn usage_exit_codes() {
    assert_eq!(acl(&["count", "rational", "--bogus"]).0.code, 2);
    assert_eq!(acl(&["frobnicate"]).0.code, 2);
    assert_eq!(acl(&["count", "quadratic", "--q", "4"]).0.code, 2);
    assert_eq!(acl(&["count", "rational", "--q", "6"]).0.code, 2);
    assert_eq!(acl(&["peyre", "hilbm", "--m", "4"]).0.code, 2);
    assert_eq!(acl(&["--help"]).0.code, 0);
}

#[test]
fn unstable_quadratic_refused() {
    let args = ["count", "quadratic", "--q", "3", "--M", "1", "--max-deg-d", "1", "--max-coord-deg", "1"];
    let (r, out, _) = acl(&args);
    assert_eq!(r.code, 4);
    assert!(out.is_empty());
    let mut allowed = args.to_vec();
    allowed.push("--allow-unstable");
    let (r, out, _) = acl(&allowed);
    assert_eq!(r.code, 0);
    assert_eq!(rows(&out)[1][3], "false");
}

#[test]
fn stable_quadratic_row() {
    let (r, out, _) = acl(&["count", "quadratic", "--q", "3", "--M", "1", "--jobs", "2"]);
    assert_eq!(r.code, 0);
    let t = rows(&out);
    assert_eq!(t[0], ["q", "M", "count", "stable", "main_term", "ratio"]);
    assert_eq!(t[1], ["3", "1", "5616", "true", "21632/3", "0.778846"]);
}

#[test]
fn peyre_json_keys() {
    for kind in ["pn", "hilb2", "hilbm", "cm"] {
        let (r, out, _) = acl(&["peyre", kind, "--q", "3", "--format", "json", "--deg-cut", "6"]);
        assert_eq!(r.code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let row = &v.as_array().unwrap()[0];
        for key in ["value", "residual_bound", "exact_prefactor"] {
            assert!(row.get(key).is_some(), "{kind} lacks {key}");
        }
        assert!(row["value"].as_str().unwrap().parse::<f64>().unwrap() > 0.0);
    }
}

#[test]
fn config_file_and_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "# defaults\nq = 3\nn=1\nM=2 # trailing\n").unwrap();
    let path = cfg.to_str().unwrap();
    let (r, out, _) = acl(&["count", "rational", "--config", path, "--q", "2"]);
    assert_eq!(r.code, 0);
    assert_eq!(rows(&out)[1][..3], ["2", "1", "2"]);
    fs::write(&cfg, "colour=blue\n").unwrap();
    assert_eq!(acl(&["count", "rational", "--config", path]).0.code, 2);
    assert_eq!(acl(&["count", "rational", "--config", "/nonexistent/acl.conf"]).0.code, 1);
}

#[test]
fn lemma_table() {
    let (r, out, _) = acl(&["verify", "lemmas", "--q", "3"]);
    assert_eq!(r.code, 0);
    let t = rows(&out);
    assert_eq!(t[0], ["lemma", "params", "M", "ratio_or_dev", "pass"]);
    let geo: Vec<_> = t.iter().filter(|r| r[0] == "technical-geometric").collect();
    assert_eq!(geo.len(), 3);
    assert!(geo.iter().all(|r| r[4] == "true"));
    assert!(t.iter().filter(|r| r[0] == "binomial").all(|r| r[3] == "0" && r[4] == "true"));
}

#[test]
fn every_row_is_consistent() {
    let cases = [
        (Command::CountRational, &["--q", "3", "--n", "1", "--M", "1", "--M-max", "2"][..]),
        (Command::CountPairs, &["--q", "2", "--M", "1", "--M-max", "2"][..]),
        (Command::Cycles, &["--q", "3", "--m-max", "6"][..]),
        (Command::VerifyLemmas, &["--q", "5"][..]),
    ];
    for (cmd, args) in cases {
        let mut f = Flags::default();
        let mut it = args.chunks(2);
        while let Some([k, v]) = it.next() {
            match *k {
                "--q" => f.q = Some(v.parse().unwrap()),
                "--n" => f.n = Some(v.parse().unwrap()),
                "--M" => f.big_m = Some(v.parse().unwrap()),
                "--M-max" => f.big_m_max = Some(v.parse().unwrap()),
                "--m-max" => f.m_max = Some(v.parse().unwrap()),
                _ => unreachable!(),
            }
        }
        let cfg = RunConfig::resolve(cmd, &f).unwrap();
        let recs = produce(&cfg).unwrap();
        assert!(!recs.is_empty());
        assert!(recs.iter().all(CountRecord::is_consistent), "{cmd:?}");
    }
}

fn quadratic_record() -> CountRecord {
    let mut p = params([("q", 3), ("M", 1)]);
    p.insert("stable".into(), "true".into());
    CountRecord::new(
        "count quadratic",
        p,
        Quantity::int(5616),
        Quantity::rational(num_rational::BigRational::new(21632.into(), 3.into())),
        num_rational::BigRational::new(10816.into(), 3.into()),
    )
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::open(dir.path()).unwrap();
    let entry = CacheEntry::new("command=count quadratic\nq=3\n", vec![quadratic_record()]);
    cache.store(&entry).unwrap();
    assert_eq!(cache.load(&entry.fingerprint), Lookup::Hit(entry.clone()));
    assert_eq!(cache.load("command=count quadratic\nq=5\n"), Lookup::Miss);
    let leftovers: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(leftovers.len(), 1);
}

#[test]
fn cache_schema_change_misses() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::open(dir.path()).unwrap();
    let mut entry = CacheEntry::new("fp\n", vec![quadratic_record()]);
    entry.schema_version = SCHEMA_VERSION + 1;
    cache.store(&entry).unwrap();
    assert_eq!(cache.load("fp\n"), Lookup::Miss);
}

#[test]
fn cache_foreign_fingerprint_misses() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::open(dir.path()).unwrap();
    let entry = CacheEntry::new("other\n", vec![quadratic_record()]);
    let bytes = serde_json::to_vec(&entry).unwrap();
    fs::write(cache.path_for("mine\n"), bytes).unwrap();
    assert_eq!(cache.load("mine\n"), Lookup::Miss);
}

fn only_json(dir: &Path) -> std::path::PathBuf {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    assert_eq!(v.len(), 1);
    v.pop().unwrap()
}

#[test]
fn warm_cache_skips_producers() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = ["count", "quadratic", "--q", "3", "--M", "1", "--cache-dir", d];
    let (cold, out1, _) = acl(&args);
    assert_eq!((cold.code, cold.computed), (0, 1));
    let (warm, out2, _) = acl(&args);
    assert_eq!((warm.code, warm.computed), (0, 0));
    assert_eq!(out1.as_bytes(), out2.as_bytes());
    // Presentation flags share the entry.
    let mut json = args.to_vec();
    json.extend(["--format", "json", "--jobs", "1"]);
    assert_eq!(acl(&json).0.computed, 0);
}

#[test]
fn truncated_cache_is_quarantined() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = ["cycles", "--q", "2", "--m-max", "4", "--cache-dir", d];
    let (_, out1, _) = acl(&args);
    let file = only_json(dir.path());
    let bytes = fs::read(&file).unwrap();
    fs::write(&file, &bytes[..bytes.len() / 2]).unwrap();
    let (r, out2, _) = acl(&args);
    assert_eq!((r.code, r.computed), (0, 1));
    assert_eq!(out1, out2);
    let names: Vec<String> =
        fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    assert!(names.iter().any(|n| n.contains(".corrupt-")), "{names:?}");
    let rewritten: CacheEntry = serde_json::from_slice(&fs::read(&file).unwrap()).unwrap();
    assert_eq!(rewritten.schema_version, SCHEMA_VERSION);
}

#[test]
fn plot_files_written() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let (r, _, _) = acl(&["count", "pairs", "--q", "2", "--M", "1", "--M-max", "3", "--plot", d]);
    assert_eq!(r.code, 0);
    let data = fs::read_to_string(dir.path().join("acl-count-pairs.dat")).unwrap();
    assert_eq!(data.lines().count(), 7);
    let script = fs::read_to_string(dir.path().join("acl-count-pairs.gp")).unwrap();
    assert!(script.contains("acl-count-pairs.dat") && script.contains("logscale"));
}
