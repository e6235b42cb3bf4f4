mod common;

use algproof::circuit::Circuit;
use algproof::frontend::cnf::{cnf_instance, parse_dimacs, Cnf, CnfMode};
use common::{cube_values, rng};
use proptest::prelude::*;
use rand::Rng;
use std::path::PathBuf;
use std::process::{Command, Output};

fn random_cnf(seed: u64) -> Cnf {
    let mut r = rng(seed);
    let n = r.gen_range(1..=5);
    let m = r.gen_range(0..=8);
    let clauses = (0..m)
        .map(|_| {
            let k = r.gen_range(1..=3.min(n));
            let mut vars: Vec<i64> = (1..=n as i64).collect();
            (0..k)
                .map(|_| {
                    let v = vars.remove(r.gen_range(0..vars.len()));
                    if r.gen_bool(0.5) {
                        v
                    } else {
                        -v
                    }
                })
                .collect()
        })
        .collect();
    Cnf { num_vars: n, clauses }
}

fn dimacs(c: &Cnf) -> String {
    let mut s = format!("c random\np cnf {} {}\n", c.num_vars, c.clauses.len());
    for cl in &c.clauses {
        for l in cl {
            s += &format!("{l} ");
        }
        s += "0\n";
    }
    s
}

fn point(n: usize, m: usize) -> Vec<bool> {
    (0..n).map(|i| (m >> i) & 1 == 1).collect()
}

fn values(cs: &[Circuit], n: usize) -> Vec<Vec<i128>> {
    let vars = algproof::frontend::cnf::var_names(n);
    cs.iter().map(|c| cube_values(c, &vars).unwrap().remove(0)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn translations_agree_with_the_formula(seed in any::<u64>()) {
        let cnf = random_cnf(seed);
        let back = parse_dimacs(&dimacs(&cnf)).unwrap();
        prop_assert_eq!(&back, &cnf);
        let n = cnf.num_vars;
        let eq = cnf_instance(&cnf, CnfMode::Equations, "t").unwrap().axioms.unwrap();
        let iq = cnf_instance(&cnf, CnfMode::Inequalities, "t").unwrap().inequalities.unwrap();
        let user: Vec<Circuit> = iq
            .ineqs()
            .iter()
            .zip(iq.provenance())
            .filter(|(_, p)| !p.is_boolean())
            .map(|(c, _)| c.clone())
            .collect();
        let (ev, iv) = (values(eq.axioms(), n), values(&user, n));
        let bools = values(iq.ineqs(), n);
        for m in 0..1usize << n {
            let want = cnf.satisfied_by(&point(n, m));
            prop_assert_eq!(ev.iter().all(|v| v[m] == 0), want);
            prop_assert_eq!(iv.iter().all(|v| v[m] >= 0), want);
            // Boolean inequalities hold at every 0/1 point.
            let all_bool = bools.iter().zip(iq.provenance()).filter(|(_, p)| p.is_boolean()).all(|(v, _)| v[m] >= 0);
            prop_assert!(all_bool);
        }
    }
}

#[test]
fn dimacs_errors_name_the_line() {
    let e = parse_dimacs("p cnf 2 1\n1 3 0\n").unwrap_err();
    assert!(e.to_string().contains('2'), "{e}");
    assert!(parse_dimacs("1 2 0\n").is_err());
    assert!(parse_dimacs("p cnf 2 1\n1 x 0\n").is_err());
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_algproof"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("algproof-cli-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d.join(name)
}

#[test]
fn cli_exit_codes() {
    let g = run(&["gen", "bvp-cps", "-n", "3"]);
    assert_eq!(g.status.code(), Some(0));
    let proof = String::from_utf8(g.stdout).unwrap();
    let good = scratch("good.cps");
    std::fs::write(&good, &proof).unwrap();
    assert_eq!(run(&["verify-cps", good.to_str().unwrap()]).status.code(), Some(0));

    let wrong = proof.replace("g11 = add g9 g10", "g11 = add g9 g9");
    assert_ne!(wrong, proof);
    let bad = scratch("bad.cps");
    std::fs::write(&bad, wrong).unwrap();
    assert_eq!(run(&["verify-cps", bad.to_str().unwrap()]).status.code(), Some(1));

    let nonconic = proof.replacen("g1 = const 1\n", "g1 = const -1\n", 1);
    std::fs::write(&bad, nonconic).unwrap();
    assert_eq!(run(&["verify-cps", bad.to_str().unwrap()]).status.code(), Some(1));

    let missing = run(&["verify-cps", "/nonexistent/proof.cps"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stdout).contains("verdict: error"));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn cli_reads_stdin() {
    use std::io::Write;
    let mut child = bin()
        .args(["conic-check", "-"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"ring Z\ninput x1\ns = mul x1 x1\noutput s\n").unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn cli_json_reports_are_deterministic() {
    let good = scratch("det.cps");
    std::fs::write(&good, run(&["gen", "bvp-cps", "-n", "4", "-M", "3"]).stdout).unwrap();
    let args = ["--format", "json", "--pit", "random", "--seed", "11", "verify-cps", good.to_str().unwrap()];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["verdict"], "accept");
    assert_eq!(v["seed"], 11);
    assert_eq!(v["details"]["identity.pit"], "randomized");
}

#[test]
fn cli_ns_search_on_a_generated_instance() {
    let inst = scratch("bvp3.sys");
    let g = run(&["gen", "instance", "--family", "bvp", "-n", "3"]);
    assert_eq!(g.status.code(), Some(0));
    std::fs::write(&inst, g.stdout).unwrap();
    let cert = scratch("bvp3.ipslin");
    let s = run(&["--out", cert.to_str().unwrap(), "ns-search", inst.to_str().unwrap(), "--degree", "3"]);
    assert_eq!(s.status.code(), Some(0), "{}", String::from_utf8_lossy(&s.stdout));
    assert_eq!(run(&["verify-ipslin", cert.to_str().unwrap()]).status.code(), Some(0));
    let low = run(&["ns-search", inst.to_str().unwrap(), "--degree", "2"]);
    assert_eq!(low.status.code(), Some(1));
}
