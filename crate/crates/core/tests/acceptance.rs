//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if
//! any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use statdec::asympt::{
    corollary_pi, dumer_list_exponent, entropy, finite_exponent, gv_distance, isd_sublinear_coeff, omega0,
    pi_binomial, pi_complex_formula, pi_exponent, pi_real_formula, pi_sublinear_limit, prange_exponent,
    regime_boundary, Regime,
};
use statdec::bias::{binomial_biases_log2, biases_via_krawtchouk, exact_biases, mc_estimate_biases, to_f64};
use statdec::bitmat::Permutation;
use statdec::codec::{is_dual_word, random_code, sample_problem};
use statdec::experiment::{run_campaign, DecoderChoice, ErrorWeight, ExperimentConfig, Method};
use statdec::harvest::{dumer_iteration, harvest_gauss, DumerConfig, HarvestOptions, Target, WeightWindow};
use statdec::rng;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed <= Duration::from_secs(limit_secs)
}

fn krawtchouk_identity() -> Outcome {
    let start = Instant::now();
    let triples: Vec<(usize, usize, usize)> = (2..=40)
        .flat_map(|n| (1..n).flat_map(move |w| (1..n).map(move |t| (n, w, t))))
        .collect();
    let mismatches: Vec<(usize, usize, usize)> = triples
        .par_iter()
        .filter(|&&(n, w, t)| {
            let a = exact_biases(n, w, t).unwrap();
            let b = biases_via_krawtchouk(n, w, t).unwrap();
            !a.same_values(&b)
        })
        .copied()
        .collect();
    let elapsed = start.elapsed();
    outcome(
        mismatches.is_empty() && within(elapsed, 120),
        format!(
            "{} triples, {} mismatches{}, {:.2?} (limit 2 min)",
            triples.len(),
            mismatches.len(),
            mismatches.first().map(|m| format!(" first at {m:?}")).unwrap_or_default(),
            elapsed
        ),
    )
}

fn monte_carlo_biases() -> Outcome {
    let start = Instant::now();
    let (n, w, t) = (64, 16, 8);
    let exact = exact_biases(n, w, t).unwrap();
    let est = mc_estimate_biases(n, w, t, 1_000_000, 2024).unwrap();
    let elapsed = start.elapsed();
    let (q0, q1) = (to_f64(&exact.q0), to_f64(&exact.q1));
    let z0 = (est.q0_hat - q0).abs() / est.stderr0;
    let z1 = (est.q1_hat - q1).abs() / est.stderr1;
    outcome(
        z0 <= 3.0 && z1 <= 3.0 && within(elapsed, 60),
        format!(
            "q0 {q0:.6} vs {:.6} ({z0:.2} se), q1 {q1:.6} vs {:.6} ({z1:.2} se), {elapsed:.2?} (limit 1 min)",
            est.q0_hat, est.q1_hat
        ),
    )
}

fn corollary_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut regimes = [0usize; 2];
    for i in 0..20 {
        for j in 0..10 {
            let w = 0.005 + 0.49 * i as f64 / 19.0;
            let t = 0.005 + 0.49 * j as f64 / 9.0;
            let a = pi_exponent(w, t).unwrap();
            let b = corollary_pi(w, t).unwrap();
            regimes[(a.regime == Regime::Complex) as usize] += 1;
            worst = worst.max((a.pi - b.pi).abs());
        }
    }
    let mut boundary_worst: f64 = 0.0;
    for i in 0..100 {
        let w = 0.004 + 0.492 * i as f64 / 99.0;
        let b = regime_boundary(w);
        boundary_worst = boundary_worst.max((pi_real_formula(w, b) - pi_complex_formula(w, b)).abs());
    }
    outcome(
        worst <= 1e-9 && boundary_worst <= 1e-6 && regimes[0] > 0 && regimes[1] > 0,
        format!(
            "200 points ({} real, {} complex) max diff {worst:.2e} (tol 1e-9); 100 boundary points max gap {boundary_worst:.2e} (tol 1e-6)",
            regimes[0], regimes[1]
        ),
    )
}

fn complex_identity_at_gv() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for i in 1..10 {
        let r = i as f64 / 10.0;
        let tau = gv_distance(r).unwrap();
        let w0 = omega0(r, tau).unwrap();
        let steps = 50;
        for j in 0..=steps {
            let w = w0 + (0.5 - 1e-6 - w0) * j as f64 / steps as f64;
            let p = pi_exponent(w, tau).unwrap().pi;
            worst = worst.max((p - (entropy(w).unwrap() - r)).abs());
            points += 1;
        }
    }
    outcome(worst <= 1e-10, format!("{points} points over R = 0.1..0.9, max |π − (H(ω) − R)| = {worst:.2e} (tol 1e-10)"))
}

fn omega0_closed_form() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 1..10 {
        let r = i as f64 / 10.0;
        let tau = gv_distance(r).unwrap();
        let closed = 0.5 - (tau - tau * tau).sqrt();
        worst = worst.max((omega0(r, tau).unwrap() - closed).abs());
    }
    let half = omega0(0.5, gv_distance(0.5).unwrap()).unwrap();
    outcome(worst <= 1e-6, format!("max error {worst:.2e} over R = 0.1..0.9 (tol 1e-6); ω₀(0.5) = {half:.6}"))
}

fn figure2_gap() -> Outcome {
    let tau = gv_distance(0.5).unwrap();
    let bin_stated = pi_binomial(0.25, 0.11).unwrap();
    let bin_gv = pi_binomial(0.25, tau).unwrap();
    let cw = pi_exponent(0.25, tau).unwrap().pi;
    let n = 1000;
    let t = (tau * n as f64).round() as usize;
    let finite_cw = finite_exponent(n, 250, t).unwrap();
    let (e0, e1) = binomial_biases_log2(n, 250, t);
    // ε1 > 0 > ε0 at this point, so |ε1 − ε0| = |ε1| + |ε0|
    let finite_bin = -2.0 * (e1.1.exp2() + e0.1.exp2()).log2() / n as f64;
    let pass = (bin_stated - 0.22).abs() <= 5e-7
        && (bin_gv - 0.22).abs() <= 1e-4
        && (cw - 0.3113).abs() <= 5e-4
        && (finite_cw - cw).abs() <= 0.02
        && (finite_bin - bin_gv).abs() <= 0.02;
    outcome(
        pass,
        format!(
            "binomial {bin_stated:.6} at τ = 0.11 ({bin_gv:.6} at τ_GV = {tau:.6}), constant-weight {cw:.6} (0.3113 ± 5e-4); n = 1000, t = {t}: finite {finite_cw:.4} / {finite_bin:.4} (tol 0.02)"
        ),
    )
}

/// Success probability of one Prange iteration, estimated by running the
/// algorithm: a random information set succeeds when the error vector read
/// off the systematic form has weight at most `t`.
fn prange_mc(n: usize, t: usize, trials_per_chunk: u64, chunks: u64, seed: u64) -> (f64, u64) {
    let (hits, valid) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let code = random_code(n, 0.5, rng::derive_seed(seed, "prange-code", c)).unwrap();
            let problem = sample_problem(&code, t, rng::derive_seed(seed, "prange-problem", c)).unwrap();
            let mut r = rng::stream(seed, "prange", c);
            let k = code.k();
            let (mut hits, mut valid) = (0u64, 0u64);
            for _ in 0..trials_per_chunk {
                let p = Permutation::random(n, &mut r);
                let Ok(sys) = code.generator().systematize(&p) else { continue };
                valid += 1;
                let y = p.apply(&problem.y);
                let info = y.slice(0, k);
                let codeword = sys.matrix.vec_mat(&info).unwrap();
                if y.xor(&codeword).weight() <= t {
                    hits += 1;
                }
            }
            (hits, valid)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    (hits as f64 / valid as f64, hits)
}

fn prange_dominance() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for (n, seed) in [(40usize, 11u64), (60, 12)] {
        let t = (n as f64 * gv_distance(0.5).unwrap()).round() as usize;
        let (p_hat, hits) = prange_mc(n, t, 5_000, 64, seed);
        let mc_exp = -p_hat.log2() / n as f64;
        let formula = prange_exponent(0.5, t as f64 / n as f64).unwrap();
        pass &= (mc_exp - formula).abs() <= 0.03 && hits > 0;
        lines.push(format!("n = {n}, t = {t}: MC {mc_exp:.4} vs formula {formula:.4} ({hits} hits)"));
    }
    let mut violations = Vec::new();
    for i in 0..50 {
        let r = 0.01 + 0.02 * i as f64;
        let tau = gv_distance(r).unwrap();
        let lower = pi_exponent(omega0(r, tau).unwrap(), tau).unwrap().pi;
        if lower < prange_exponent(r, tau).unwrap() {
            violations.push(r);
        }
    }
    pass &= violations.is_empty();
    outcome(pass, format!("{}; 50 rates, {} dominance violations", lines.join("; "), violations.len()))
}

fn sublinear_regime() -> Outcome {
    let mut pass = true;
    let mut worst_rel: f64 = 0.0;
    for r in [0.2, 0.5, 0.8] {
        let slope = pi_sublinear_limit(r / 2.0).unwrap();
        pass &= slope == 2.0 * isd_sublinear_coeff(r).unwrap();
        let ratio = pi_exponent(r / 2.0, 1e-3).unwrap().pi / 1e-3;
        worst_rel = worst_rel.max((ratio - slope).abs() / slope);
    }
    pass &= worst_rel <= 0.05;
    outcome(pass, format!("slope = 2·ISD coefficient exactly at R = 0.2, 0.5, 0.8; π(R/2, 1e-3)/1e-3 within {:.2}% of slope (tol 5%)", 100.0 * worst_rel))
}

fn harvest_count_law() -> Outcome {
    let mut pass = true;
    let mut lines = Vec::new();
    let mut checked = 0usize;
    let mut unsound = 0usize;
    for (n, l, seed) in [(48usize, 6usize, 1u64), (64, 8, 2)] {
        let code = random_code(n, 0.5, seed).unwrap();
        let cfg = DumerConfig { l, r: 4 };
        let expected = cfg.expected_collisions(n, code.k());
        let mut total = 0usize;
        for it in 0..50 {
            let out = dumer_iteration(&code, cfg, rng::derive_seed(seed, "count-law", it)).unwrap();
            total += out.len();
            for (h, _) in &out {
                checked += 1;
                unsound += !is_dual_word(&code, h) as usize;
            }
        }
        let mean = total as f64 / 50.0;
        let ratio = mean / expected;
        pass &= (0.25..=4.0).contains(&ratio);
        lines.push(format!("[{n},{}] l = {l}: mean {mean:.1} vs {expected:.1}", code.k()));
        let win = WeightWindow::new(1, n).unwrap();
        let (pool, _) = harvest_gauss(&code, win, Target::Total(500), seed, HarvestOptions::default()).unwrap();
        for h in pool.equations() {
            checked += 1;
            unsound += !is_dual_word(&code, h) as usize;
        }
    }
    pass &= unsound == 0;
    outcome(pass, format!("{}; {checked} harvested vectors, {unsound} not dual", lines.join("; ")))
}

fn end_to_end() -> Outcome {
    let start = Instant::now();
    let cfg = ExperimentConfig {
        n: 128,
        rate: 0.5,
        t: ErrorWeight::Fixed(4),
        method: Method::Gauss,
        decoder: DecoderChoice::Single,
        w: Some(33),
        trials: 100,
        target_fail: 0.05,
        seed: 10,
        ..Default::default()
    };
    let report = match run_campaign(&cfg) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("campaign failed: {e}")),
    };
    let elapsed = start.elapsed();
    let successes = report.summary.single_successes.unwrap_or(0);
    let errors = report.summary.errors;
    let predicted = report.summary.mean_predicted_single.unwrap_or(f64::NAN);
    let observed = 1.0 - successes as f64 / report.summary.trials as f64;
    outcome(
        successes >= 95 && errors == 0 && observed <= 2.0 * predicted && within(elapsed, 600),
        format!(
            "{successes}/100 recovered with m = {} per position; failure rate {observed:.2} vs predicted {predicted:.4} (≤ 2×); {elapsed:.1?} (limit 10 min)",
            report.equations_per_position
        ),
    )
}

fn amortized_probe() -> Outcome {
    let c = dumer_list_exponent(2000, 0.5, 0.05).unwrap();
    outcome(
        (c.exponent - 0.05).abs() <= 0.02,
        format!("l = {}, r/2 = {}: (1/n) log2 N = {:.5} vs λ = 0.05 (tol 0.02)", c.l, c.half_r, c.exponent),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("Krawtchouk–bias identity", krawtchouk_identity),
        ("Monte-Carlo bias agreement", monte_carlo_biases),
        ("closed form vs complex-path exponent", corollary_equivalence),
        ("complex-regime identity at GV", complex_identity_at_gv),
        ("lower-bound closed form", omega0_closed_form),
        ("binomial vs constant-weight gap", figure2_gap),
        ("Prange dominance with MC-validated baseline", prange_dominance),
        ("sublinear regime", sublinear_regime),
        ("harvest soundness and collision count law", harvest_count_law),
        ("end-to-end decoding [128,64], t = 4, w = 33", end_to_end),
        ("amortized-time list count", amortized_probe),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        failed += !o.pass as usize;
        println!("criterion {:>2} {}: {name}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if failed == 0 {
        println!("acceptance: all {} criteria pass", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of {} criteria fail", criteria.len());
        ExitCode::FAILURE
    }
}
