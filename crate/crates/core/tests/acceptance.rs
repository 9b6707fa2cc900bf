//! Exit criteria. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use qkd_dimension::infotheory::binary_entropy;
use qkd_dimension::quantum_sim::{classified_probabilities, clone_attack, Basis};
use qkd_dimension::qubit_attack::{
    bob_average_closed_form, params_from_beta, quart_case_table, string_information,
};
use qkd_dimension::qudit_attack::{qudit_disturbances, qudit_information, qudit_params_from_beta};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const BIN: &str = env!("CARGO_BIN_EXE_qkd-dim");

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run_cli(args: &[&str]) -> Result<(Vec<u8>, Duration), String> {
    let start = Instant::now();
    let out = Command::new(BIN)
        .args(args)
        .output()
        .map_err(|e| format!("spawn failed: {e}"))?;
    let elapsed = start.elapsed();
    if !out.status.success() {
        return Err(format!(
            "`{}` exited with {}: {}",
            args.join(" "),
            out.status,
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok((out.stdout, elapsed))
}

fn run_json(args: &[&str]) -> Result<(Value, Duration), String> {
    let (stdout, elapsed) = run_cli(args)?;
    let v = serde_json::from_slice(&stdout).map_err(|e| format!("bad JSON: {e}"))?;
    Ok((v, elapsed))
}

fn field(v: &Value, path: &[&str]) -> Result<f64, String> {
    let mut cur = v;
    for key in path {
        cur = cur
            .get(key)
            .ok_or_else(|| format!("missing field {}", path.join(".")))?;
    }
    cur.as_f64()
        .ok_or_else(|| format!("{} is not a number", path.join(".")))
}

fn border_criterion(protocol: &str, n: &str, want: f64, tol: f64) -> Outcome {
    let (v, elapsed) = run_json(&["border", "--protocol", protocol, "--n", n])?;
    let got = field(&v, &["results", "border_disturbance"])?;
    check((got - want).abs() <= tol, || {
        format!("border {got} vs {want} ± {tol}")
    })?;
    check(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "border = {got:.6} (target {want} ± {tol}), {elapsed:.2?}"
    ))
}

fn c1_six_state_border() -> Outcome {
    border_criterion("qubit-string", "1", 0.1564, 5e-4)
}

fn c2_quart_via_qubits() -> Outcome {
    border_criterion("qubit-string", "2", 0.2883, 1e-3)
}

fn c3_quart_via_qudit() -> Outcome {
    border_criterion("qudit-mub", "2", 0.2666, 1e-3)
}

fn c4_figure1() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("figure1.csv");
    let path_str = path.to_str().ok_or("non-utf8 temp path")?;
    let (_, elapsed) = run_cli(&["figure1", "--max-n", "12", "--out", path_str])?;
    let rows = read_figure1(&path)?;

    check(rows.len() == 12, || format!("{} rows", rows.len()))?;
    for w in rows.windows(2) {
        check(w[1].1 > w[0].1 && w[1].2 > w[0].2, || {
            format!("not increasing between n = {} and {}", w[0].0, w[1].0)
        })?;
    }
    for r in &rows[1..] {
        check(r.1 > r.2, || {
            format!("qubit-string not above qudit at n = {}", r.0)
        })?;
    }
    check((rows[0].1 - rows[0].2).abs() <= 1e-6, || {
        format!("n = 1 columns differ: {} vs {}", rows[0].1, rows[0].2)
    })?;
    check(rows[4].1 > 0.5, || {
        format!("n = 5 qubit-string border {}", rows[4].1)
    })?;
    check(elapsed < Duration::from_secs(5), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "12 rows, n=2 ({:.4}, {:.4}), n=5 qubit-string {:.4}, {elapsed:.2?}",
        rows[1].1, rows[1].2, rows[4].1
    ))
}

fn read_figure1(path: &Path) -> Result<Vec<(u32, f64, f64)>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty CSV")?;
    check(header == "n,d,border_qubit_string,border_qudit_mub", || {
        format!("header `{header}`")
    })?;
    lines
        .map(|l| {
            let cols: Vec<&str> = l.split(',').collect();
            if cols.len() != 4 {
                return Err(format!("bad row `{l}`"));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|e| format!("`{s}`: {e}"));
            Ok((
                cols[0].parse().map_err(|e| format!("{e}"))?,
                num(cols[2])?,
                num(cols[3])?,
            ))
        })
        .collect()
}

fn c5_oracle_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    for basis in Basis::ALL {
        for k in 0..2u8 {
            for i in 0..=20 {
                let params = params_from_beta(f64::from(i) / 20.0).map_err(|e| e.to_string())?;
                let o = params.outcome_probabilities();
                let state = clone_attack(k, basis, &params).map_err(|e| e.to_string())?;
                let [p0, pe, pb, both] = classified_probabilities(&state, k);
                for d in [p0 - o.p0, pe - o.pe, pb - o.pb, both] {
                    worst = worst.max(d.abs());
                }
            }
        }
    }
    check(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!(
        "3 bases × 2 bits × 21 β, max deviation {worst:.1e}"
    ))
}

fn c6_closed_form_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut eve_dev, mut bob_dev): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let params = params_from_beta(rng.random()).map_err(|e| e.to_string())?;
        let o = params.outcome_probabilities();
        let table = quart_case_table(&params).map_err(|e| e.to_string())?;
        let h_q = binary_entropy(o.q).map_err(|e| e.to_string())?;
        let eq8 = 2.0 - 2.0 * h_q * (1.0 - o.pb);
        eve_dev = eve_dev.max((table.info_eve() - eq8).abs());
        for (got, want) in table
            .bob_avg
            .entries()
            .iter()
            .zip(bob_average_closed_form(o.pb))
        {
            bob_dev = bob_dev.max((got - want).abs());
        }
    }
    check(eve_dev <= 1e-12 && bob_dev <= 1e-12, || {
        format!("Eve {eve_dev:e}, Bob {bob_dev:e}")
    })?;
    Ok(format!(
        "100 points, I_E dev {eve_dev:.1e}, <P_B> dev {bob_dev:.1e}"
    ))
}

fn c7_reduction_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let beta: f64 = rng.random();
        let qd_params = qudit_params_from_beta(1, beta).map_err(|e| e.to_string())?;
        let dist = qudit_disturbances(&qd_params).map_err(|e| e.to_string())?;
        let qd = qudit_information(&qd_params).map_err(|e| e.to_string())?;
        let qb_params = params_from_beta(beta).map_err(|e| e.to_string())?;
        let o = qb_params.outcome_probabilities();
        let qb = string_information(1, &qb_params).map_err(|e| e.to_string())?;
        for d in [
            dist.bob - o.pb,
            dist.mu - (1.0 - o.q),
            qd.info_bob - qb.info_bob,
            qd.info_eve - qb.info_eve,
        ] {
            worst = worst.max(d.abs());
        }
    }
    check(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("100 points, max deviation {worst:.1e}"))
}

fn within_sigmas(observed: f64, expected: f64, trials: f64, k: f64) -> Result<f64, String> {
    let sigma = (expected * (1.0 - expected) / trials).sqrt();
    let z = (observed - expected) / sigma;
    check(z.abs() < k, || {
        format!("{observed} vs {expected}: z = {z:.2}")
    })?;
    Ok(z)
}

fn c8_monte_carlo_cloner() -> Outcome {
    let (v, elapsed) = run_json(&[
        "simulate",
        "--protocol",
        "qubit-string",
        "--n",
        "2",
        "--rounds",
        "1e6",
        "--attack",
        "cloner",
        "--beta",
        "border",
        "--seed",
        "2024",
    ])?;
    let stats = |k: &str| field(&v, &["results", "stats", k]);
    let rounds = stats("rounds_sent")?;
    let z_sift = within_sigmas(stats("sift_fraction")?, 1.0 / 3.0, rounds, 4.0)?;
    let z_qber = within_sigmas(stats("qber")?, 0.1564, stats("sifted_units")?, 4.0)?;
    let z_dit = within_sigmas(stats("dit_disturbance")?, 0.2883, stats("symbols")?, 4.0)?;

    // Closed-form Eve information at the cloner the CLI used.
    let beta = field(&v, &["parameters", "attack", "beta"])?;
    let o = params_from_beta(beta)
        .map_err(|e| e.to_string())?
        .outcome_probabilities();
    let h_q = binary_entropy(o.q).map_err(|e| e.to_string())?;
    let eq8 = 2.0 - 2.0 * h_q * (1.0 - o.pb);
    let eve = field(&v, &["results", "stats", "eve_info", "bits"])?;
    check((eve - eq8).abs() < 0.01, || {
        format!("Eve info {eve} vs {eq8}")
    })?;
    check(elapsed < Duration::from_secs(30), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "z(sift) {z_sift:.2}, z(qber) {z_qber:.2}, z(dit) {z_dit:.2}, I_E {eve:.4} vs {eq8:.4}, {elapsed:.2?}"
    ))
}

fn c9_intercept_resend() -> Outcome {
    let (v, _) = run_json(&[
        "simulate",
        "--protocol",
        "qubit-string",
        "--n",
        "1",
        "--rounds",
        "1e6",
        "--attack",
        "intercept-resend",
        "--seed",
        "99",
    ])?;
    let qber = field(&v, &["results", "stats", "qber"])?;
    let units = field(&v, &["results", "stats", "sifted_units"])?;
    let z = within_sigmas(qber, 1.0 / 3.0, units, 4.0)?;
    let eve = field(&v, &["results", "stats", "eve_info", "bits"])?;
    check((eve - 1.0 / 3.0).abs() < 0.01, || format!("Eve info {eve}"))?;
    Ok(format!(
        "qber {qber:.4} (z {z:.2}), I_E {eve:.4} bit per sifted bit"
    ))
}

fn c10_determinism() -> Outcome {
    let args = [
        "simulate",
        "--protocol",
        "qudit-mub",
        "--n",
        "2",
        "--rounds",
        "2e5",
        "--attack",
        "cloner",
        "--beta",
        "0.5",
        "--seed",
        "17",
    ];
    let (a, _) = run_cli(&args)?;
    let (b, _) = run_cli(&args)?;
    check(a == b, || "payloads differ".to_owned())?;
    let mut sharded = args.to_vec();
    sharded.extend(["--shards", "4"]);
    let (c, _) = run_cli(&sharded)?;
    let (d, _) = run_cli(&sharded)?;
    check(c == d, || "sharded payloads differ".to_owned())?;
    Ok(format!(
        "{} identical bytes (single stream and 4 shards)",
        a.len()
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 six-state border", c1_six_state_border),
        ("2 quart via qubits border", c2_quart_via_qubits),
        ("3 quart via qudit border", c3_quart_via_qudit),
        ("4 figure 1 reproduction", c4_figure1),
        ("5 state-vector oracle equivalence", c5_oracle_equivalence),
        ("6 closed-form consistency", c6_closed_form_consistency),
        ("7 n = 1 reduction identity", c7_reduction_identity),
        ("8 Monte Carlo cloner at border", c8_monte_carlo_cloner),
        ("9 intercept-resend baseline", c9_intercept_resend),
        ("10 simulate determinism", c10_determinism),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match f() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
