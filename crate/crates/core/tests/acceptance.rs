//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any fails. Built with `harness = false` so the lines
//! show up in plain `cargo test` output.

use std::io::Write;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use num::{BigInt, BigRational};
use num_complex::Complex64 as C64;
use pauliest::analysis::{
    chi2_master, delta_a_bracket, delta_game_value, povm_as_ensemble, run_suite, verify_chi2_clifford,
    verify_mps_pauli_bound, verify_pauli_identities, verify_permutation_inequality, verify_swap_bound,
    BracketOptions, VerifySuite,
};
use pauliest::coloring::{build_graph, fractional_coloring, xyz_coloring};
use pauliest::harness::{run_experiment, ExperimentConfig, ProtocolConfig};
use pauliest::pauli::{all_paulis, PauliSet, PauliString};
use pauliest::protocols::{
    bell_abs_protocol, budget, k_memory_distribution, k_memory_protocol, purity_test_k, sign_recovery,
    KMemoryOptions, PurityMode, SigmaMode, Verdict,
};
use pauliest::quantum::{
    bell_eigenvalue, chi2_divergence, expectation, haar_random_pure, maximally_mixed, pauli_conjugated_povm,
    purity_event_probability, rho_p, DensityMatrix, Povm,
};
use pauliest::rng::stream;
use pauliest::stabilizer::{clifford_povm, stabilizer_covering, StabilizerBasis, StabilizerGroup};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: pauliest::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

// ---------------------------------------------------------------------------
// 1. Pauli identities

fn pauli_identities() -> Outcome {
    let mut worst = (0.0f64, 0.0f64);
    for n in 1..=3 {
        let check = lib(verify_pauli_identities(n, 20, &mut stream(100 + n as u64, 0)))?;
        ensure(check.swap_error <= 1e-12, || format!("n={n}: swap identity off by {:e}", check.swap_error))?;
        ensure(check.twirl_error <= 1e-10, || format!("n={n}: twirl identity off by {:e}", check.twirl_error))?;
        worst = (worst.0.max(check.swap_error), worst.1.max(check.twirl_error));
    }
    Ok(format!("max errors {:.1e} / {:.1e}", worst.0, worst.1))
}

// ---------------------------------------------------------------------------
// 2. Bell eigenvalues against dense two-copy vectors

fn bell_eigenvalues() -> Outcome {
    let mut pairs = 0;
    for n in 1..=2 {
        let d = 1usize << n;
        // unnormalised sum_x |x x>; the expectation is then d times the eigenvalue
        let mut psi_i = DVector::<C64>::zeros(d * d);
        for x in 0..d {
            psi_i[x * d + x] = c(1.0);
        }
        let id = DMatrix::<C64>::identity(d, d);
        for q in all_paulis(n) {
            let psi_q = id.kronecker(&lib(q.to_dense())?) * &psi_i;
            for p in all_paulis(n) {
                let pd = lib(p.to_dense())?;
                let pp = pd.kronecker(&pd);
                let v = psi_q.dotc(&(&pp * &psi_q));
                let mu = lib(bell_eigenvalue(&p, &q))? as f64;
                ensure(v.im == 0.0 && v.re == mu * d as f64, || format!("n={n} P={p} Q={q}: dense {v} vs {mu}"))?;
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} (P, Q) pairs exact"))
}

// ---------------------------------------------------------------------------
// 3. Bell sampling for |tr(P rho)|

fn fixed_haar(n: usize) -> DensityMatrix {
    haar_random_pure(n, &mut stream(2024, 0)).expect("haar state").to_density()
}

fn bell_abs_run(seed: u64) -> Result<f64, String> {
    let set = PauliSet::all(3);
    let rho = fixed_haar(3);
    let rounds = budget::bell(0.25, set.len());
    let rep = lib(bell_abs_protocol(&set, &rho, rounds, &mut stream(seed, 3)))?;
    Ok(rep.max_abs_error())
}

fn bell_abs() -> Outcome {
    let rounds = budget::bell(0.25, 64);
    let want = (8.0 * (30.0f64 * 64.0).ln() / 0.25f64.powi(4)).ceil() as u64;
    ensure(rounds == want, || format!("budget {rounds} differs from formula {want}"))?;
    let mut ok = 0;
    let mut worst: f64 = 0.0;
    for seed in 0..30 {
        let e = bell_abs_run(seed)?;
        worst = worst.max(e);
        if e <= 0.25 {
            ok += 1;
        }
    }
    ensure(ok * 10 >= 30 * 9, || format!("only {ok}/30 runs within eps"))?;
    Ok(format!("T = {rounds}, {ok}/30 within eps = 0.25, worst {worst:.4}"))
}

// ---------------------------------------------------------------------------
// 4. Sign recovery with the true state as reference

fn sign_recovery_oracle() -> Outcome {
    let eps = 0.25;
    let mut runs = 0;
    let mut zeros = 0;
    let mut worst: f64 = 0.0;
    for n in 1..=3 {
        let set = PauliSet::nontrivial(n);
        let rho = fixed_haar(n);
        let f: Vec<f64> = set.iter().map(|p| expectation(p, &rho).map(f64::abs)).collect::<pauliest::Result<_>>().map_err(|e| e.to_string())?;
        for seed in 0..30 {
            let rep = lib(sign_recovery(&set, &f, &rho, eps, None, SigmaMode::Oracle, &mut stream(seed, 4)))?;
            ensure(rep.max_error() <= 3.0 * eps, || format!("n={n} seed {seed}: error {}", rep.max_error()))?;
            for (e, fp) in rep.estimates.iter().zip(&f) {
                if *fp < 2.0 * eps {
                    ensure(e.estimate == 0.0, || format!("n={n} {}: f = {fp} but estimate {}", e.pauli, e.estimate))?;
                    zeros += 1;
                }
            }
            worst = worst.max(rep.max_error());
            runs += 1;
        }
    }
    ensure(zeros > 0, || "threshold branch never exercised".into())?;
    Ok(format!("{runs}/{runs} runs within 3 eps (worst {worst:.4}), {zeros} thresholded outputs exactly 0"))
}

// ---------------------------------------------------------------------------
// 5. k-memory protocol

/// Dense probability of (Q, e, e') on rho (x) rho, qubit order
/// [copy1 memory, copy1 rest, copy2 memory, copy2 rest].
fn dense_k_memory(rho: &DensityMatrix, k: usize, group: &StabilizerGroup) -> Vec<f64> {
    let n = rho.n();
    let m = n - k;
    let (dk, dm) = (1usize << k, 1usize << m);
    let d = dk * dm;
    let two = rho.matrix().kronecker(rho.matrix());
    let basis = StabilizerBasis::new(group.clone());
    let proj = basis.projectors().expect("projectors").to_vec();
    let id = DMatrix::<C64>::identity(dk, dk);
    let mut psi_i = DVector::<C64>::zeros(dk * dk);
    for x in 0..dk {
        psi_i[x * dk + x] = c(1.0 / (dk as f64).sqrt());
    }
    let mut out = Vec::new();
    for q in all_paulis(k) {
        let bell = id.kronecker(&q.to_dense().expect("dense")) * &psi_i;
        for e in 0..dm {
            for e2 in 0..dm {
                let mut el = DMatrix::<C64>::zeros(d * d, d * d);
                let idx = |b1: usize, r1: usize, b2: usize, r2: usize| (b1 * dm + r1) * d + b2 * dm + r2;
                for (b1, b2, c1, c2) in itertools(dk) {
                    let bb = bell[b1 * dk + b2] * bell[c1 * dk + c2].conj();
                    if bb.norm() == 0.0 {
                        continue;
                    }
                    for r1 in 0..dm {
                        for r2 in 0..dm {
                            for s1 in 0..dm {
                                for s2 in 0..dm {
                                    el[(idx(b1, r1, b2, r2), idx(c1, s1, c2, s2))] =
                                        bb * proj[e][(r1, s1)] * proj[e2][(r2, s2)];
                                }
                            }
                        }
                    }
                }
                out.push((el * &two).trace().re);
            }
        }
    }
    out
}

fn itertools(d: usize) -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..d * d * d * d).map(move |i| (i / (d * d * d), (i / (d * d)) % d, (i / d) % d, i % d))
}

fn kmem_run(seed: u64) -> Result<f64, String> {
    let rho = fixed_haar(4);
    let options = KMemoryOptions { sign: None, ..KMemoryOptions::default() };
    let rep = lib(k_memory_protocol(&rho, 2, 0.3, &options, &mut stream(seed, 5)))?;
    Ok(rep.max_abs_error())
}

fn k_memory() -> Outcome {
    let cov = lib(stabilizer_covering(2))?;
    ensure(cov.len() == 5, || format!("covering for n=4, k=2 has {} groups", cov.len()))?;
    let rho = DensityMatrix::new(pauliest::quantum::wishart_state(4, 2, &mut stream(55, 0))).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for group in lib(stabilizer_covering(1))?.groups() {
        let fast = lib(k_memory_distribution(&rho, 1, group))?;
        let dense = dense_k_memory(&rho, 1, group);
        ensure(fast.probs().len() == dense.len(), || "outcome count mismatch".into())?;
        for (a, b) in fast.probs().iter().zip(&dense) {
            worst = worst.max((a - b).abs());
        }
    }
    ensure(worst <= 1e-10, || format!("distribution off by {worst:e}"))?;
    let mut ok = 0;
    for seed in 0..30 {
        if kmem_run(seed)? <= 0.3 {
            ok += 1;
        }
    }
    ensure(ok * 3 >= 30 * 2, || format!("only {ok}/30 runs within eps"))?;
    Ok(format!("covering size 5, dense oracle {worst:.1e}, {ok}/30 end-to-end within 0.3"))
}

// ---------------------------------------------------------------------------
// 6. Purity testing

fn rational_event_probability(n: usize, k: usize) -> BigRational {
    // maximally mixed: each block M_x = I_k / 2^n
    let two = |e: usize| BigRational::from_integer(BigInt::from(1) << e);
    let tr = two(k) / two(n);
    let tr2 = two(k) / (two(n) * two(n));
    two(n - k) * (tr.clone() * tr - tr2) / BigRational::from_integer(2.into())
}

fn purity_wrong_rate(trials: u64) -> Result<f64, String> {
    let rho = maximally_mixed(4).map_err(|e| e.to_string())?;
    let mut wrong = 0;
    for t in 0..trials {
        let r = lib(purity_test_k(&rho, 2, PurityMode::Bernoulli, &mut stream(t, 6)))?;
        if r.verdict == Verdict::Pure {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / trials as f64)
}

fn purity() -> Outcome {
    for n in 1..=4 {
        let rho = lib(maximally_mixed(n))?;
        for k in 0..=n {
            let p = lib(purity_event_probability(&rho, k))?;
            let want = rational_event_probability(n, k);
            let closed = BigRational::new(BigInt::from((1i64 << k) - 1), BigInt::from(1i64 << (n + 1)));
            ensure(want == closed, || format!("oracle disagrees with closed form at n={n} k={k}"))?;
            let p_exact = BigRational::from_float(p).ok_or("non-finite probability")?;
            ensure(p_exact == closed, || format!("n={n} k={k}: {p} is not exactly {closed}"))?;
        }
        let pure = lib(haar_random_pure(n, &mut stream(60 + n as u64, 0)))?.to_density();
        for k in 0..=n {
            let p = lib(purity_event_probability(&pure, k))?;
            ensure(p.abs() <= 1e-12, || format!("pure state n={n} k={k}: {p:e}"))?;
        }
    }
    let trials = 2000;
    let rate = purity_wrong_rate(trials)?;
    let p = 3.0 / 32.0;
    let exact = (1.0f64 - p).powi(40);
    let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
    ensure(rate <= 0.232 + 3.0 * sigma, || format!("wrong-verdict rate {rate} above 0.232 + 3 sigma"))?;
    ensure(rate > 0.0, || "no wrong verdicts at all".into())?;
    ensure((rate - exact).abs() <= 3.0 * sigma, || format!("rate {rate} vs exact {exact:.4} (sigma {sigma:.4})"))?;
    Ok(format!("exact identities for n <= 4, wrong-verdict rate {rate:.4} vs (1-p)^40 = {exact:.4}"))
}

// ---------------------------------------------------------------------------
// 7. Fractional colouring

fn union_of_families(m: usize) -> Result<PauliSet, String> {
    let cov = lib(stabilizer_covering(2))?;
    let members: Vec<PauliString> = cov.groups()[..m]
        .iter()
        .flat_map(|g| g.enumerate_elements().into_iter().filter(|p| !p.is_identity()))
        .collect();
    lib(PauliSet::new(members))
}

fn coloring() -> Outcome {
    let int = |v: i64| BigRational::from_integer(v.into());
    let mut gap: f64 = 0.0;
    let tri = build_graph(&lib(PauliSet::parse_text("X\nY\nZ\n"))?);
    let col = lib(fractional_coloring(&tri))?;
    ensure(col.exact_value == Some(int(3)), || format!("triangle value {:?}", col.exact_value))?;
    gap = gap.max(col.gap.abs());
    for m in 2..=3 {
        let g = build_graph(&union_of_families(m)?);
        let col = lib(fractional_coloring(&g))?;
        ensure(col.exact_value == Some(int(m as i64)), || format!("union of {m}: {:?}", col.exact_value))?;
        gap = gap.max(col.gap.abs());
    }
    for n in 1..=3u32 {
        let (g, col) = lib(xyz_coloring(n as usize))?;
        let want = BigRational::new(BigInt::from(2) * BigInt::from(3).pow(n), BigInt::from(2).pow(n));
        ensure(col.exact_value.as_ref() == Some(&want), || format!("xyz n={n}: {:?}", col.exact_value))?;
        for v in 0..g.len() {
            ensure(col.exact_coverage(v) == Some(int(1)), || format!("xyz n={n}: vertex {v} covered {:?}", col.exact_coverage(v)))?;
        }
        // a valid colouring, so the LP optimum on the same graph sits at or below it
        let lp = lib(fractional_coloring(&g))?;
        let wf = 2.0 * 1.5f64.powi(n as i32);
        ensure(lp.value <= wf + 1e-8, || format!("xyz n={n}: LP value {} above {wf}", lp.value))?;
        gap = gap.max(lp.gap.abs());
    }
    ensure(gap <= 1e-8, || format!("duality gap {gap:e}"))?;
    Ok(format!("all values exact, max duality gap {gap:.1e}"))
}

// ---------------------------------------------------------------------------
// 8. delta_A brackets

fn bracket(set: &PauliSet, seed: u64) -> Result<(f64, f64), String> {
    let b = lib(delta_a_bracket(set, &BracketOptions::default(), &mut stream(seed, 8)))?;
    ensure(b.lower <= b.upper, || format!("lower {} > upper {}", b.lower, b.upper))?;
    Ok((b.lower, b.upper))
}

fn delta_brackets() -> Outcome {
    let tri = lib(PauliSet::parse_text("X\nY\nZ\n"))?;
    let mut runs = 0;
    for seed in 0..3 {
        let (lo, hi) = bracket(&tri, seed)?;
        ensure(lo <= 1.0 / 3.0 + 1e-12 && 1.0 / 3.0 <= hi + 1e-12, || format!("[{lo}, {hi}] misses 1/3"))?;
        ensure(hi - lo <= 0.04, || format!("triangle width {}", hi - lo))?;
        runs += 1;
    }
    let mut widest: f64 = 0.0;
    for m in 2..=3 {
        let set = union_of_families(m)?;
        let target = 1.0 / m as f64;
        for seed in 0..2 {
            let (lo, hi) = bracket(&set, seed)?;
            ensure(lo <= target + 1e-12 && target <= hi + 1e-12, || format!("m={m}: [{lo}, {hi}] misses 1/{m}"))?;
            let rel = (hi - lo) / target;
            ensure(rel <= 0.10, || format!("m={m}: relative width {rel}"))?;
            widest = widest.max(rel);
            runs += 1;
        }
    }
    Ok(format!("{runs} brackets, lower <= upper throughout, widest relative width {widest:.1e}"))
}

// ---------------------------------------------------------------------------
// 9. chi^2 characterisations

fn random_rank_one_povm(n: usize, count: usize, seed: u64) -> Povm {
    use rand::Rng;
    let d = 1usize << n;
    let mut rng = stream(seed, 9);
    let vecs: Vec<DVector<C64>> = (0..count)
        .map(|_| DVector::from_fn(d, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)))
        .collect();
    let h = vecs.iter().fold(DMatrix::<C64>::zeros(d, d), |acc, v| acc + v * v.adjoint());
    let eig = h.symmetric_eigen();
    let inv = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| c(v.powf(-0.5))));
    let root = &eig.eigenvectors * inv * eig.eigenvectors.adjoint();
    let elements = vecs.iter().map(|v| { let w = &root * v; &w * w.adjoint() }).collect();
    Povm::new(elements, (0..count).map(|i| i.to_string()).collect()).expect("valid POVM")
}

/// `E_{P~pi} chi^2(rho_P || rho_m)` from dense states.
fn dense_chi2(set: &PauliSet, pi: &[f64], povm: &Povm, eps: f64) -> Result<f64, String> {
    let mm = lib(maximally_mixed(set.n()))?;
    let mut acc = 0.0;
    for (p, w) in set.iter().zip(pi) {
        acc += w * lib(chi2_divergence(povm, &lib(rho_p(p, eps))?.state, &mm))?;
    }
    Ok(acc)
}

fn chi2() -> Outcome {
    let eps = 0.1;
    let nine = 9.0 * eps * eps;
    let mut worst: f64 = 0.0;
    for n in 1..=2 {
        let cov = lib(stabilizer_covering(n))?;
        let mm = lib(maximally_mixed(n))?;
        for g in cov.groups() {
            let povm = lib(clifford_povm(g))?;
            for p in all_paulis(n).filter(|p| !p.is_identity()) {
                let v = lib(chi2_divergence(&povm, &lib(rho_p(&p, eps))?.state, &mm))?;
                let want = if g.contains(&p) { nine } else { 0.0 };
                ensure((v - want).abs() <= 1e-12, || format!("n={n} P={p}: {v} vs {want}"))?;
                worst = worst.max((v - want).abs());
            }
        }
    }
    worst = worst.max(lib(verify_chi2_clifford(2, eps))?);

    // memory-free channel both ways at n = 2
    let set = PauliSet::nontrivial(2);
    let raw: Vec<f64> = (1..=set.len()).map(|i| i as f64).collect();
    let total: f64 = raw.iter().sum();
    let pi: Vec<f64> = raw.iter().map(|v| v / total).collect();
    let mut consistency: f64 = 0.0;
    for seed in 0..5 {
        // a conjugated state measurement carries exactly 9 eps^2 times its game value
        let psi = lib(haar_random_pure(2, &mut stream(seed, 90)))?;
        let povm = lib(pauli_conjugated_povm(&psi.to_density()))?;
        let game = lib(delta_game_value(&set, &pi, &psi))?;
        let dense = dense_chi2(&set, &pi, &povm, eps)?;
        let fast = lib(chi2_master(&set, &pi, &povm, 1, eps))?;
        consistency = consistency.max((dense - nine * game).abs()).max((fast - dense).abs());
        // and any rank-one POVM is an average of such game values
        let povm = random_rank_one_povm(2, 6 + seed as usize, seed);
        let ens = lib(povm_as_ensemble(&povm))?;
        let mut avg = 0.0;
        for (s, w) in ens.states().iter().zip(ens.weights()) {
            avg += w * lib(delta_game_value(&set, &pi, s))?;
        }
        let dense = dense_chi2(&set, &pi, &povm, eps)?;
        let fast = lib(chi2_master(&set, &pi, &povm, 1, eps))?;
        consistency = consistency.max((dense - nine * avg).abs()).max((fast - dense).abs());
    }
    ensure(consistency <= 1e-8, || format!("memory-free consistency off by {consistency:e}"))?;
    Ok(format!("Clifford indicator to {worst:.1e}, memory-free equality to {consistency:.1e}"))
}

// ---------------------------------------------------------------------------
// 10. Verifier suites

fn verifiers() -> Outcome {
    let trials = 1000;
    let mut cases = 0;
    for k in 0..=2 {
        for subset in [&[0usize, 1][..], &[0][..], &[1][..]] {
            lib(verify_mps_pauli_bound(2, k, 2, subset, trials, &mut stream(k as u64, 10)))?;
            cases += 1;
        }
    }
    for x in 1..=3 {
        for y in 1..=(4 - x) {
            lib(verify_permutation_inequality(x, y, 2, trials, &mut stream((10 * x + y) as u64, 10)))?;
            cases += 1;
        }
    }
    for k in 0..=2 {
        lib(verify_swap_bound(2, k, trials, &mut stream(20 + k as u64, 10)))?;
        cases += 1;
    }
    Ok(format!("{cases} cases x {trials} trials, no violations"))
}

// ---------------------------------------------------------------------------
// 11. Determinism

fn determinism() -> Outcome {
    let same = |a: f64, b: f64, what: &str| ensure(a.to_bits() == b.to_bits(), || format!("{what}: {a} vs {b}"));
    same(bell_abs_run(7)?, bell_abs_run(7)?, "bell")?;
    same(kmem_run(3)?, kmem_run(3)?, "kmem")?;
    same(purity_wrong_rate(200)?, purity_wrong_rate(200)?, "purity")?;
    let tri = lib(PauliSet::parse_text("X\nY\nZ\n"))?;
    let (a, b) = (bracket(&tri, 5)?, bracket(&tri, 5)?);
    same(a.0, b.0, "bracket lower")?;
    same(a.1, b.1, "bracket upper")?;
    let s1 = lib(run_suite(VerifySuite::SwapBound, 50, &mut stream(9, 0)))?;
    let s2 = lib(run_suite(VerifySuite::SwapBound, 50, &mut stream(9, 0)))?;
    ensure(s1 == s2, || "verifier statistics differ".into())?;
    let mut cfg = ExperimentConfig::new(ProtocolConfig::Kmem { k: 1, sign: true }, 3, "haar", 0.3);
    cfg.seeds = (0..6).collect();
    cfg.threads = Some(1);
    let one = lib(run_experiment(&cfg))?;
    cfg.threads = Some(4);
    let four = lib(run_experiment(&cfg))?;
    ensure(one.trials == four.trials && one.aggregate == four.aggregate, || "thread count changed the result".into())?;
    Ok("bell, kmem, purity, bracket, verifier and harness outputs bit-identical".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, u64); 11] = [
        ("Pauli identities", pauli_identities, 5),
        ("Bell eigenvalue closed form", bell_eigenvalues, 5),
        ("Bell |tr(P rho)| estimation", bell_abs, 120),
        ("sign recovery (oracle sigma)", sign_recovery_oracle, 120),
        ("k-memory protocol", k_memory, 300),
        ("purity testing", purity, 60),
        ("fractional colouring", coloring, 60),
        ("delta_A brackets", delta_brackets, 180),
        ("chi^2 characterisations", chi2, 60),
        ("lemma verifier suites", verifiers, 180),
        ("determinism", determinism, 600),
    ];
    let mut failures = 0;
    let mut out = std::io::stdout();
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|detail| {
            if elapsed <= Duration::from_secs(*limit) {
                Ok(detail)
            } else {
                Err(format!("{detail}; took {:.1} s, limit {limit} s", elapsed.as_secs_f64()))
            }
        });
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        let _ = writeln!(out, "criterion {:>2} {tag}  {name}: {detail} [{:.2} s]", i + 1, elapsed.as_secs_f64());
    }
    let _ = writeln!(out, "acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
