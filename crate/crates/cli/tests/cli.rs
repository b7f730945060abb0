//! Drives the `statdec` binary end to end.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use statdec::formats::{read_instance, read_pool};
use tempfile::TempDir;

fn statdec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_statdec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn gen(dir: &TempDir, name: &str, n: &str, t: &str, seed: &str) -> PathBuf {
    let p = path(dir, name);
    let out = statdec(&["gen", "--n", n, "--rate", "0.5", "--t", t, "--seed", seed, "--out", s(&p)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    p
}

#[test]
fn gen_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = gen(&dir, "a.inst", "128", "4", "7");
    let b = gen(&dir, "b.inst", "128", "4", "7");
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let c = gen(&dir, "c.inst", "128", "4", "8");
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
}

#[test]
fn gen_warns_above_gv_and_rejects_bad_rate() {
    let dir = TempDir::new().unwrap();
    let p = path(&dir, "hi.inst");
    let out = statdec(&["gen", "--n", "64", "--rate", "0.5", "--t", "12", "--out", s(&p)]);
    assert_eq!(code(&out), 0);
    assert!(stderr(&out).contains("warning"), "{}", stderr(&out));
    assert!(read_instance(&fs::read_to_string(&p).unwrap()).is_ok());

    let out = statdec(&["gen", "--n", "128", "--rate", "1.5", "--t", "4"]);
    assert_eq!(code(&out), 2);
    assert_eq!(code(&statdec(&["gen", "--n", "many"])), 2);
    assert_eq!(code(&statdec(&["frobnicate"])), 2);
}

#[test]
fn bias_prints_exact_fractions() {
    let out = statdec(&["bias", "--n", "4", "--w", "2", "--t", "1", "--via-krawtchouk"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("q0 = 1/3 "), "{text}");
    assert!(text.contains("q1 = 1/1 "), "{text}");
    assert!(text.contains("identity: exact match"), "{text}");

    let out = statdec(&["bias", "--binomial", "--n", "128", "--w", "32", "--t", "4"]);
    assert!(stdout(&out).contains("eps1_bin = 0.0625\n"), "{}", stdout(&out));
    assert_eq!(code(&statdec(&["bias", "--n", "4", "--w", "9", "--t", "1"])), 2);
}

#[test]
fn gauss_pool_has_exact_weight_and_decodes() {
    let dir = TempDir::new().unwrap();
    let inst = gen(&dir, "a.inst", "128", "4", "7");
    let pool = path(&dir, "a.pool");
    let out = statdec(&["harvest", "--instance", s(&inst), "--window", "33", "--total", "10000", "--seed", "1", "--out", s(&pool)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let problem = read_instance(&fs::read_to_string(&inst).unwrap()).unwrap();
    let p = read_pool(&fs::read_to_string(&pool).unwrap(), Some(&problem.code)).unwrap();
    assert!(p.len() >= 10_000);
    assert!(p.equations().iter().all(|h| h.weight() == 33));

    // the default target sizes the pool for decoding
    let sized = path(&dir, "sized.pool");
    assert_eq!(code(&statdec(&["harvest", "--instance", s(&inst), "--seed", "2", "--out", s(&sized)])), 0);
    let report = path(&dir, "r.json");
    let out = statdec(&["decode", "--instance", s(&inst), "--pool", s(&sized), "--out", s(&report)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let json = fs::read_to_string(&report).unwrap();
    assert!(json.contains("\"format\": \"statdec-report v1\""));
    assert!(json.contains("\"success\": true"));
}

#[test]
fn dumer_weights_concentrate() {
    let dir = TempDir::new().unwrap();
    let inst = gen(&dir, "a.inst", "128", "4", "3");
    let pool = path(&dir, "d.pool");
    let out = statdec(&[
        "harvest", "--instance", s(&inst), "--method", "dumer", "--dumer-l", "8", "--dumer-r", "4",
        "--window", "1..128", "--total", "5000", "--seed", "4", "--out", s(&pool),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stderr(&out).contains("collisions per iteration"));
    let p = read_pool(&fs::read_to_string(&pool).unwrap(), None).unwrap();
    let mean = p.equations().iter().map(|h| h.weight() as f64).sum::<f64>() / p.len() as f64;
    assert!((mean - 32.0).abs() < 1.0, "mean weight {mean}");
}

#[test]
fn merge_then_verify() {
    let dir = TempDir::new().unwrap();
    let inst = gen(&dir, "a.inst", "64", "2", "5");
    let mut pools = Vec::new();
    for seed in ["1", "2"] {
        let p = path(&dir, &format!("{seed}.pool"));
        let out = statdec(&["harvest", "--instance", s(&inst), "--window", "15..19", "--total", "400", "--seed", seed, "--out", s(&p)]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        pools.push(p);
    }
    let merged = path(&dir, "m.pool");
    let out = statdec(&["merge", s(&pools[0]), s(&pools[1]), "--instance", s(&inst), "--out", s(&merged)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let m = read_pool(&fs::read_to_string(&merged).unwrap(), None).unwrap();
    let sizes: Vec<usize> = pools
        .iter()
        .map(|p| read_pool(&fs::read_to_string(p).unwrap(), None).unwrap().len())
        .collect();
    assert!(m.len() >= sizes[0].max(sizes[1]) && m.len() <= sizes[0] + sizes[1]);
    let out = statdec(&["verify", "--pool", s(&merged), "--instance", s(&inst)]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));

    // flip one hex digit of the first equation
    let text = fs::read_to_string(&merged).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let i = lines.iter().position(|l| l.starts_with("count=")).unwrap() + 1;
    let d = lines[i].chars().last().unwrap().to_digit(16).unwrap();
    lines[i].pop();
    lines[i].push(char::from_digit(d ^ 1, 16).unwrap());
    let bad = path(&dir, "bad.pool");
    fs::write(&bad, lines.join("\n") + "\n").unwrap();
    let out = statdec(&["verify", "--pool", s(&bad)]);
    assert_eq!(code(&out), 6);
    assert!(stdout(&out).contains("checksum mismatch"), "{}", stdout(&out));
}

#[test]
fn decode_refuses_foreign_pool_and_names_uncovered_position() {
    let dir = TempDir::new().unwrap();
    let a = gen(&dir, "a.inst", "64", "2", "1");
    let b = gen(&dir, "b.inst", "64", "2", "2");
    let pool = path(&dir, "a.pool");
    assert_eq!(code(&statdec(&["harvest", "--instance", s(&a), "--window", "17", "--total", "3", "--seed", "1", "--out", s(&pool)])), 0);
    let out = statdec(&["decode", "--instance", s(&b), "--pool", s(&pool)]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    let out = statdec(&["decode", "--instance", s(&a), "--pool", s(&pool)]);
    assert_eq!(code(&out), 4);
    assert!(stderr(&out).contains("no parity checks through position"), "{}", stderr(&out));

    let text = fs::read_to_string(&a).unwrap().replacen("STATDEC-INSTANCE v1", "STATDEC-INSTANCE v9", 1);
    let future = path(&dir, "future.inst");
    fs::write(&future, text).unwrap();
    assert_eq!(code(&statdec(&["decode", "--instance", s(&future), "--pool", s(&pool)])), 3);
}

#[test]
fn iteration_cap_writes_flagged_partial_pool() {
    let dir = TempDir::new().unwrap();
    let inst = gen(&dir, "a.inst", "64", "2", "1");
    let pool = path(&dir, "p.pool");
    let out = statdec(&[
        "harvest", "--instance", s(&inst), "--window", "3", "--total", "100", "--iteration-cap", "5", "--out", s(&pool),
    ]);
    assert_eq!(code(&out), 4);
    assert!(fs::read_to_string(&pool).unwrap().contains("complete=false"));
}

fn csv_column(text: &str, name: &str) -> Vec<f64> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

#[test]
fn exponent_figures() {
    let out = stdout(&statdec(&["exponent", "--figure", "2", "--rates", "0.5"]));
    assert!((csv_column(&out, "binomial")[0] - 0.22).abs() < 1e-4);
    assert!((csv_column(&out, "constant_weight")[0] - 0.3113).abs() < 5e-4);

    let out = stdout(&statdec(&["exponent", "--figure", "6"]));
    let (prange, lower) = (csv_column(&out, "prange"), csv_column(&out, "lower_bound"));
    assert_eq!(prange.len(), 49);
    assert!(prange.iter().zip(&lower).all(|(p, l)| p <= l));

    let out = stdout(&statdec(&["exponent", "--figure", "1", "--n", "1000"]));
    let (asym, num) = (csv_column(&out, "asymptotic"), csv_column(&out, "numeric"));
    assert!(asym.iter().zip(&num).all(|(a, b)| (a - b).abs() <= 0.02));

    let out = stdout(&statdec(&["exponent", "--kind", "omega0", "--rates", "0.5"]));
    assert!((csv_column(&out, "value")[0] - 0.187076).abs() < 1e-5);
    assert!(out.lines().nth(1).unwrap().starts_with("0.500000000000,"));
    assert_eq!(code(&statdec(&["exponent", "--kind", "nope"])), 2);
}

#[test]
fn verify_suites_and_tampered_table() {
    let out = statdec(&["verify", "--max-n", "20"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert_eq!(stdout(&out).matches("PASS").count(), 4);

    let dir = TempDir::new().unwrap();
    let table = path(&dir, "t.csv");
    assert_eq!(code(&statdec(&["bias", "--table", "8", "--out", s(&table)])), 0);
    assert_eq!(code(&statdec(&["verify", "--bias-table", s(&table)])), 0);
    let tampered: String = fs::read_to_string(&table)
        .unwrap()
        .lines()
        .map(|l| if l.starts_with("5,2,3,") { "5,2,3,1/9,1/9".to_string() } else { l.to_string() })
        .collect::<Vec<_>>()
        .join("\n");
    let bad = path(&dir, "bad.csv");
    fs::write(&bad, tampered + "\n").unwrap();
    let out = statdec(&["verify", "--bias-table", s(&bad)]);
    assert_eq!(code(&out), 6);
    assert!(stdout(&out).contains("(5, 2, 3)"), "{}", stdout(&out));
}

#[test]
fn campaign_config_round_trip_and_determinism() {
    let dir = TempDir::new().unwrap();
    let cfg = path(&dir, "c.cfg");
    let out = statdec(&["campaign", "--n", "48", "--t", "2", "--trials", "4", "--seed", "11", "--dump-config"]);
    assert_eq!(code(&out), 0);
    fs::write(&cfg, stdout(&out)).unwrap();
    let again = statdec(&["--config", s(&cfg), "campaign", "--dump-config"]);
    assert_eq!(stdout(&again), stdout(&out));

    let r1 = path(&dir, "r1.json");
    let r2 = path(&dir, "r2.json");
    for (r, threads) in [(&r1, "1"), (&r2, "3")] {
        let out = statdec(&["campaign", "--config", s(&cfg), "--threads", threads, "--out", s(r)]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    let (a, b) = (fs::read_to_string(&r1).unwrap(), fs::read_to_string(&r2).unwrap());
    // reports differ only in the recorded output path
    assert_eq!(a.replace("r1.json", "r2.json"), b);
    assert!(a.contains("\"format\": \"statdec-campaign v1\""));
    assert_eq!(code(&statdec(&["campaign", "--method", "foo"])), 2);
}
