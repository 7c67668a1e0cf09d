//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.
//!
//! Run alone with `cargo test -p pblock-core --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;

use pblock_core::ap::{analyze_blockedness, build_ap, census};
use pblock_core::approx::{bound_e, gen_perturbed, required_epsilon, ApproxCircuit, ErrorLedger};
use pblock_core::dense::{dense_blockedness, dense_marginal, dense_run, DenseError};
use pblock_core::generate::{gen_block_local, gen_clifford, gen_entangle_disentangle, ghz};
use pblock_core::linalg::trace_norm_float;
use pblock_core::rng::CounterRng;
use pblock_core::sampling::{coin_sample, BinaryFraction, CoinSource, OutcomeDistribution};
use pblock_core::stabilizer::run_stabilizer;
use pblock_core::{run_approx, run_blocked, ApproxConfig, BlockedOptions, ExactBlock, ExactScalar};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

// Float statevector simulator kept separate from the library's kernels.
// Qubit q is bit n-1-q of the basis index.
struct FloatState {
    n: usize,
    amps: Vec<Complex64>,
}

impl FloatState {
    fn basis(bits: &[bool]) -> Self {
        let n = bits.len();
        let idx = bits
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | usize::from(b));
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[idx] = Complex64::new(1.0, 0.0);
        FloatState { n, amps }
    }

    fn apply(&mut self, u: &[Complex64], targets: &[usize]) {
        let k = targets.len();
        let dim = 1usize << k;
        let shifts: Vec<usize> = targets.iter().map(|&q| self.n - 1 - q).collect();
        let sub =
            |i: usize| -> usize { shifts.iter().fold(0, |acc, &s| (acc << 1) | ((i >> s) & 1)) };
        let with = |i: usize, j: usize| -> usize {
            let mut out = i;
            for (pos, &s) in shifts.iter().enumerate() {
                let bit = (j >> (k - 1 - pos)) & 1;
                out = (out & !(1 << s)) | (bit << s);
            }
            out
        };
        let mut next = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (i, slot) in next.iter_mut().enumerate() {
            let row = sub(i);
            for col in 0..dim {
                *slot += u[row * dim + col] * self.amps[with(i, col)];
            }
        }
        self.amps = next;
    }

    fn prob_zero(&self, q: usize) -> f64 {
        let s = self.n - 1 - q;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| (i >> s) & 1 == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }
}

fn float_oracle(c: &ApproxCircuit) -> f64 {
    let mut s = FloatState::basis(&c.input);
    for op in &c.ops {
        s.apply(op.float_matrix().data(), op.targets());
    }
    s.prob_zero(c.measured)
}

fn exact_equal(a: &OutcomeDistribution, b: &OutcomeDistribution) -> bool {
    match (a.exact_p0(), b.exact_p0()) {
        (Some(x), Some(y)) => x == y,
        _ => false,
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn criterion_1() -> Outcome {
    let mut rng = CounterRng::new(101, 0xacce_0001);
    let (mut agree, mut total, mut failures) = (0, 0, Vec::new());
    for i in 0..100u64 {
        let n = 2 + rng.index(9);
        let p = 1 + rng.index(3.min(n));
        let steps = 1 + rng.index(60);
        let mut c = if i % 2 == 0 {
            gen_block_local(n, p, steps, i)
        } else {
            gen_entangle_disentangle(n, p, steps, i)
        };
        c.set_measured(rng.index(n)).unwrap();
        total += 1;
        let reference = dense_marginal(&dense_run(&c).unwrap(), c.measured());
        match run_blocked(&c, p, BlockedOptions::default()) {
            Ok(run) if exact_equal(&run.distribution, &reference) => agree += 1,
            Ok(_) => failures.push(format!("seed {i}: distributions differ")),
            Err(e) => failures.push(format!("seed {i}: {e}")),
        }
    }
    let mut detail = format!("{agree}/{total} circuits match dense exactly");
    if let Some(f) = failures.first() {
        detail.push_str(&format!("; first failure {f}"));
    }
    outcome(agree == total, detail)
}

fn criterion_2() -> Outcome {
    let c = gen_block_local(200, 2, 5000, 2);
    let (run, elapsed) = timed(|| run_blocked(&c, 2, BlockedOptions::default()));
    let refused = matches!(dense_run(&c), Err(DenseError::WidthCapExceeded { .. }));
    match run {
        Ok(run) => {
            let blocks = run.state.blocks().count();
            let pass = elapsed < Duration::from_secs(10) && refused && run.stats.largest_block <= 2;
            outcome(
                pass,
                format!(
                    "n=200 T=5000 p=2 in {:.3}s, {} blocks, largest {}, dense refused={}",
                    elapsed.as_secs_f64(),
                    blocks,
                    run.stats.largest_block,
                    refused
                ),
            )
        }
        Err(e) => outcome(false, format!("blocked run failed: {e}")),
    }
}

fn criterion_3() -> Outcome {
    let ap = build_ap(3, 3, 4, 4).unwrap();
    let state = ap.to_state().unwrap();
    let comb2 = analyze_blockedness(&ap, 2).map(|p| p.display_bits(4));
    let comb1 = analyze_blockedness(&ap, 1).map(|p| p.display_bits(4));
    let dense2 = dense_blockedness(&state, 2)
        .unwrap()
        .map(|p| p.display_bits(4));
    let dense1 = dense_blockedness(&state, 1).unwrap();
    let want = Some("{3,1}{2,0}".to_string());
    let pass = comb2 == want && dense2 == want && comb1.is_none() && dense1.is_none();
    outcome(
        pass,
        format!(
            "p=2 analyzer {comb2:?} dense {dense2:?}; p=1 analyzer {comb1:?} dense {:?}",
            dense1
        ),
    )
}

fn criterion_4() -> Outcome {
    match census(12, 200, 3, 15, 7) {
        Ok(res) => {
            let f = res.fraction();
            let pass = f < 0.05;
            outcome(pass, format!("{res} (threshold 0.05, hard gate 0.10)"))
        }
        Err(e) => outcome(false, format!("census failed: {e}")),
    }
}

fn criterion_5() -> Outcome {
    let (p, t, eta) = (1, 5, 0.5);
    let eps = required_epsilon(eta, p, t);
    let mut rng = CounterRng::new(505, 0xacce_0005);
    let (mut within_eta, mut within_et, mut worst) = (0, 0, 0.0f64);
    let mut e_t = 0.0;
    for trial in 0..100u64 {
        let n = 2 + rng.index(7);
        let k = 1 + rng.index(2);
        let c = gen_perturbed(n, p, t, k, eps, trial);
        let run = run_approx(&c, &ApproxConfig::new(p, eps));
        e_t = run.certificate.e_t;
        let reference = float_oracle(&c);
        let dist = 2.0 * (run.distribution.p0() - reference).abs();
        worst = worst.max(dist);
        if dist <= eta {
            within_eta += 1;
        }
        if dist <= e_t && !run.certificate.withdrawn {
            within_et += 1;
        }
    }
    let pass = within_eta == 100 && within_et >= 95;
    outcome(
        pass,
        format!(
            "eps={eps:.3e} e_T={e_t:.3e}: {within_eta}/100 within eta, {within_et}/100 within e_T, worst {worst:.3e}"
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = CounterRng::new(606, 0xacce_0006);
    let mut bad = Vec::new();
    for run_id in 0..50u64 {
        let p = 1 + rng.index(2);
        let n = p + 1 + rng.index(5);
        let steps = 2 + rng.index(20);
        let eps = 10f64.powi(-(2 + rng.index(6) as i32));
        let circuit: ApproxCircuit = match run_id % 3 {
            0 => gen_perturbed(n, p, steps, 1 + rng.index(2), eps, run_id),
            1 => (&gen_clifford(n, steps, run_id)).into(),
            _ => (&gen_block_local(n, p, steps, run_id)).into(),
        };
        let run = run_approx(&circuit, &ApproxConfig::new(p, eps));
        let mut prev = 0.0;
        for entry in run.ledger.entries() {
            let expect = ErrorLedger::next_bound(p, prev, eps);
            let recursion = entry.e == ((2 * p + 3) as f64) * (prev + eps) && entry.e == expect;
            let closed = entry.e <= bound_e(eps, p, entry.j) + 1e-12;
            if !recursion || !closed {
                bad.push(format!("run {run_id} step {}", entry.j));
            }
            prev = entry.e;
        }
    }
    let detail = match bad.first() {
        None => "50/50 ledgers follow the recursion and the closed-form bound".to_string(),
        Some(b) => format!("{} violations, first at {b}", bad.len()),
    };
    outcome(bad.is_empty(), detail)
}

fn criterion_7() -> Outcome {
    let mut rng = CounterRng::new(707, 0xacce_0007);
    let mut agree = 0;
    for i in 0..100u64 {
        let n = 1 + rng.index(8);
        let steps = rng.index(201);
        let c = gen_clifford(n, steps, i);
        let reference = dense_marginal(&dense_run(&c).unwrap(), c.measured());
        if let Ok(d) = run_stabilizer(&c) {
            if exact_equal(&d, &reference) {
                agree += 1;
            }
        }
    }
    let big = gen_clifford(60, 2000, 77);
    let (res, elapsed) = timed(|| run_stabilizer(&big));
    let fast = res.is_ok() && elapsed < Duration::from_secs(1);
    outcome(
        agree == 100 && fast,
        format!(
            "{agree}/100 match dense exactly; n=60 T=2000 in {:.4}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut not_blocked = 0;
    for n in 3..=12 {
        let state = dense_run(&ghz(n)).unwrap();
        if dense_blockedness(&state, n - 1).unwrap().is_none() {
            not_blocked += 1;
        }
    }
    let half = ExactScalar::from_ratio(1, 2);
    let big = run_stabilizer(&ghz(60));
    let big_ok = matches!(&big, Ok(d) if d.exact_p0() == Some(&half));
    outcome(
        not_blocked == 10 && big_ok,
        format!("GHZ_n not (n-1)-blocked for {not_blocked}/10 n in 3..=12; n=60 stabilizer p0=1/2: {big_ok}"),
    )
}

fn criterion_9() -> Outcome {
    let cases = ["01", "1", "11", "101"];
    let draws = 100_000u64;
    let mut details = Vec::new();
    let mut pass = true;
    for (i, digits) in cases.iter().enumerate() {
        let x = BinaryFraction::from_digits(digits).unwrap();
        let target = x.to_f64();
        let mut coins = CoinSource::new(9000 + i as u64);
        let mut zeros = 0u64;
        let mut tosses_ok = true;
        for _ in 0..draws {
            let before = coins.tosses();
            if coin_sample(&x, &mut coins) == 0 {
                zeros += 1;
            }
            tosses_ok &= coins.tosses() - before == x.len() as u64;
        }
        let freq = zeros as f64 / draws as f64;
        let sigma = (target * (1.0 - target) / draws as f64).sqrt();
        let z = (freq - target).abs() / sigma;
        pass &= z <= 4.0 && tosses_ok;
        details.push(format!("x={target} freq={freq:.5} z={z:.2}"));
    }
    outcome(pass, details.join(", "))
}

fn random_density(rng: &mut CounterRng, k: usize) -> ExactBlock {
    let terms = 1 + rng.index(3);
    let weights: Vec<i64> = (0..terms).map(|_| 1 + rng.below(5) as i64).collect();
    let total: i64 = weights.iter().sum();
    let mut acc: Option<ExactBlock> = None;
    for w in weights {
        let c = gen_block_local(k, k, 1 + rng.index(12), rng.next_u64());
        let rho = dense_run(&c).unwrap().density();
        let m = rho.matrix().scale(&ExactScalar::from_ratio(w, total));
        acc = Some(match acc {
            None => ExactBlock::new(rho.labels().to_vec(), m).unwrap(),
            Some(a) => ExactBlock::new(a.labels().to_vec(), a.matrix().add(&m).unwrap()).unwrap(),
        });
    }
    acc.unwrap()
}

fn criterion_10() -> Outcome {
    let mut rng = CounterRng::new(1010, 0xacce_0010);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let k = 1 + rng.index(3);
        let rho = random_density(&mut rng, k);
        let tn = trace_norm_float(rho.matrix()).unwrap();
        worst = worst.max((tn - 1.0).abs());
    }
    let mut contractive = 0;
    for _ in 0..20 {
        let rho = random_density(&mut rng, 3);
        let sigma = random_density(&mut rng, 3);
        let full = trace_norm_float(&rho.matrix().sub(sigma.matrix()).unwrap()).unwrap();
        let keep = [0, 2];
        let r = rho.partial_trace(&keep).unwrap();
        let s = sigma.partial_trace(&keep).unwrap();
        let reduced = trace_norm_float(&r.matrix().sub(s.matrix()).unwrap()).unwrap();
        if reduced <= full + 1e-10 {
            contractive += 1;
        }
    }
    outcome(
        worst <= 1e-10 && contractive == 20,
        format!("max |trace norm - 1| = {worst:.2e} over 50; partial trace contractive in {contractive}/20"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("blocked engine equals dense oracle", criterion_1),
        (
            "200-qubit blocked run within budget, dense refuses",
            criterion_2,
        ),
        ("AP {3,6,9,12} partition", criterion_3),
        ("random AP census fraction", criterion_4),
        ("approximate engine output error", criterion_5),
        ("error ledger recursion and bound", criterion_6),
        (
            "stabilizer engine equals dense, 60-qubit speed",
            criterion_7,
        ),
        ("GHZ not blocked below n", criterion_8),
        ("fair-coin sampler frequencies", criterion_9),
        ("density trace norm and contractivity", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (res, elapsed) = timed(check);
        let tag = if res.pass { "PASS" } else { "FAIL" };
        if !res.pass {
            failed += 1;
        }
        println!(
            "{tag} [{}] {name}: {} ({:.2}s)",
            i + 1,
            res.detail,
            elapsed.as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
