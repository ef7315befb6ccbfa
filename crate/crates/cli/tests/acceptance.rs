//! Acceptance suite: one pass/fail line per criterion, nonzero exit if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use lkh_cli::report::parse_reports;
use lkh_cli::Report;
use lkh_core::entropy::{lkh3_gap, ssa_gap};
use lkh_core::linalg::{eig_hermitian, inner, vec_norm, ComplexMatrix};
use lkh_core::rng::{complex_gaussian_vec, stream_rng};
use lkh_core::states::{
    random_density_with, random_pure_with, reduced_spectra_equal, schmidt_decompose,
};
use lkh_core::tensor::{partial_trace, SubsystemSet};
use lkh_core::verifier::{
    check_lkh_log, check_lkh_operator, epsilon_star, equality_gap_check, lemma_bound_check,
    lemma_bound_gap, lemma_internals, reduce_ssa_to_lkh3, LemmaInstance, LkhInstance,
};
use lkh_core::{Complex64, DensityMatrix, MultiSystem, StateVector};

const LKH_DIMS: [[usize; 3]; 4] = [[2, 2, 2], [2, 3, 2], [3, 2, 4], [2, 4, 3]];
const TOL: f64 = 1e-9;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ensemble() -> Vec<([usize; 3], u64, LkhInstance)> {
    (0..1000u64)
        .map(|i| {
            let dims = LKH_DIMS[(i % 4) as usize];
            let inst = LkhInstance::random(dims, &mut stream_rng(1001, i), true).expect("instance");
            (dims, i, inst)
        })
        .collect()
}

fn c1_operator(ens: &[([usize; 3], u64, LkhInstance)]) -> Outcome {
    let start = Instant::now();
    let mut min_gap = f64::INFINITY;
    for (dims, i, inst) in ens {
        let r = check_lkh_operator(inst, TOL).map_err(|e| format!("{dims:?} #{i}: {e}"))?;
        check(r.verdict, || {
            format!(
                "{dims:?} #{i}: gap {:e} below -{:e}",
                r.min_eig_gap, r.relative_tol
            )
        })?;
        min_gap = min_gap.min(r.min_eig_gap);
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs < 60.0, || format!("took {secs:.1}s"))?;
    Ok(format!(
        "{} trials, min gap {min_gap:.3e}, {secs:.2}s",
        ens.len()
    ))
}

fn c2_strict(ens: &[([usize; 3], u64, LkhInstance)]) -> Outcome {
    let mut min_gap = f64::INFINITY;
    let mut min_excess = f64::INFINITY;
    for (dims, i, inst) in ens {
        let d = equality_gap_check(inst).map_err(|e| format!("{dims:?} #{i}: {e}"))?;
        let d2 = dims[1] as f64;
        check(d["gap"] > 1e-12, || {
            format!("{dims:?} #{i}: gap {:e}", d["gap"])
        })?;
        check(d["inv_trace_product"] >= d2 * d2 - 1e-9, || {
            format!(
                "{dims:?} #{i}: Tr B⁻¹·Tr B = {} < {}",
                d["inv_trace_product"],
                d2 * d2
            )
        })?;
        min_gap = min_gap.min(d["gap"]);
        min_excess = min_excess.min(d["inv_trace_product"] - d2 * d2);
    }
    Ok(format!(
        "min gap {min_gap:.3e}, min (Tr B⁻¹·Tr B − d₂²) {min_excess:.3e}"
    ))
}

fn c3_log(ens: &[([usize; 3], u64, LkhInstance)]) -> Outcome {
    let mut max_eig = f64::NEG_INFINITY;
    let mut evaluated = 0;
    for (dims, i, inst) in ens {
        let r = match check_lkh_log(inst, TOL) {
            Ok(r) => r,
            Err(e) if e.is_numerical() => continue,
            Err(e) => return Err(format!("{dims:?} #{i}: {e}")),
        };
        evaluated += 1;
        let m = r.diagnostic("max_eig").unwrap_or(-r.min_eig_gap);
        check(m <= 1e-9, || format!("{dims:?} #{i}: max eigenvalue {m:e}"))?;
        max_eig = max_eig.max(m);
    }
    check(evaluated > 0, || "no well-conditioned trials".into())?;
    Ok(format!(
        "{evaluated} well-conditioned trials, max eigenvalue {max_eig:.3e}"
    ))
}

fn ghz() -> DensityMatrix {
    let s = 0.5f64.sqrt();
    let mut v = vec![Complex64::new(0.0, 0.0); 8];
    v[0] = Complex64::new(s, 0.0);
    v[7] = Complex64::new(s, 0.0);
    StateVector::new(v, MultiSystem::new(vec![2, 2, 2]).unwrap())
        .unwrap()
        .density()
}

fn c4_entropic() -> Outcome {
    let dims_pool: [[usize; 3]; 5] = [[2, 2, 2], [2, 3, 2], [3, 2, 3], [2, 2, 4], [3, 3, 3]];
    let mut min_ssa = f64::INFINITY;
    let mut min_lkh3 = f64::INFINITY;
    for i in 0..1000u64 {
        let dims = dims_pool[(i % 5) as usize];
        let sys = MultiSystem::new(dims.to_vec()).unwrap();
        let mut rng = stream_rng(2002, i);
        let rank = 1 + (i as usize * 7) % sys.total_dim();
        let rho = random_density_with(&sys, rank, &mut rng).map_err(|e| e.to_string())?;
        let s = ssa_gap(&rho).map_err(|e| e.to_string())?;
        let l = lkh3_gap(&rho).map_err(|e| e.to_string())?;
        check(s >= -TOL && l >= -TOL, || {
            format!("{dims:?} #{i}: ssa {s:e}, lkh3 {l:e}")
        })?;
        min_ssa = min_ssa.min(s);
        min_lkh3 = min_lkh3.min(l);
    }
    let g = ghz();
    let s = ssa_gap(&g).map_err(|e| e.to_string())?;
    let l = lkh3_gap(&g).map_err(|e| e.to_string())?;
    check((s - std::f64::consts::LN_2).abs() <= 1e-10, || {
        format!("GHZ ssa gap {s}")
    })?;
    check(l.abs() <= 1e-10, || format!("GHZ lkh3 gap {l}"))?;
    Ok(format!("1000 states, min ssa {min_ssa:.3e}, min lkh3 {min_lkh3:.3e}; GHZ ssa−ln2 {:.1e}, lkh3 {l:.1e}", s - std::f64::consts::LN_2))
}

fn c5_purification() -> Outcome {
    let dims_pool: [[usize; 3]; 4] = [[2, 2, 2], [2, 3, 2], [3, 2, 3], [2, 2, 3]];
    let mut worst = 0.0f64;
    for i in 0..200u64 {
        let dims = dims_pool[(i % 4) as usize];
        let sys = MultiSystem::new(dims.to_vec()).unwrap();
        let rank = 1 + (i as usize * 5) % sys.total_dim();
        let rho =
            random_density_with(&sys, rank, &mut stream_rng(3003, i)).map_err(|e| e.to_string())?;
        let (direct, via) = reduce_ssa_to_lkh3(&rho).map_err(|e| format!("{dims:?} #{i}: {e}"))?;
        let dev = (direct - via).abs();
        check(dev <= 1e-8, || {
            format!("{dims:?} #{i}: |direct − via| = {dev:e}")
        })?;
        worst = worst.max(dev);
    }
    Ok(format!("200 states, max deviation {worst:.3e}"))
}

// d₁ ≤ d₃ ≤ d₂ keeps σ₃ invertible and the Gram matrix nonsingular
const LEMMA_DIMS: [[usize; 3]; 5] = [[2, 2, 2], [2, 3, 2], [2, 3, 3], [1, 2, 2], [2, 4, 2]];

fn c6_lemma() -> Outcome {
    let mut necessity: Option<String> = None;
    // A and B grow like 1/ε, so the gap is reported relative to ‖(1+√ε)B − A‖
    let mut min_rel = f64::INFINITY;
    for i in 0..200u64 {
        let dims = LEMMA_DIMS[(i % 5) as usize];
        let probe = LemmaInstance::random(dims, &mut stream_rng(4004, i), Some(1.0))
            .map_err(|e| e.to_string())?;
        let star = probe.epsilon_star();
        let [_, d2, d3] = dims;
        check(
            (star - epsilon_star(probe.mu(), d2, d3)).abs() <= 0.0,
            || "threshold mismatch".into(),
        )?;
        for k in 0..=4 {
            let eps = star * 10f64.powi(-k);
            let inst = probe.with_epsilon(eps).map_err(|e| e.to_string())?;
            let r = lemma_bound_check(&inst, TOL)
                .map_err(|e| format!("{dims:?} #{i} ε={eps:e}: {e}"))?;
            check(r.verdict, || {
                format!("{dims:?} #{i} ε={eps:e}: gap {:e}", r.min_eig_gap)
            })?;
            min_rel = min_rel.min(r.min_eig_gap * TOL / r.relative_tol);
            if necessity.is_none() && r.diagnostic("unscaled_verdict") == Some(0.0) {
                necessity = Some(format!(
                    "{dims:?} #{i} ε={eps:.2e}: A ≤ B gap {:.2e}, A ≤ (1+√ε)B gap {:.2e}",
                    r.diagnostic("unscaled_gap").unwrap_or(f64::NAN),
                    r.min_eig_gap
                ));
            }
        }
    }
    // the unguarded variant agrees with the guarded one below ε*
    let probe = LemmaInstance::random([2, 2, 2], &mut stream_rng(4004, 0), None)
        .map_err(|e| e.to_string())?;
    let a = lemma_bound_gap(&probe, TOL).map_err(|e| e.to_string())?;
    let b = lemma_bound_check(&probe, TOL).map_err(|e| e.to_string())?;
    check(a == b, || "guarded and unguarded reports differ".into())?;
    let witness =
        necessity.ok_or_else(|| "no instance where the unscaled bound fails".to_string())?;
    Ok(format!("200 instances × 5 values of ε ≤ ε*, min gap/‖(1+√ε)B − A‖ {min_rel:.3e}; necessity witness {witness}"))
}

fn c7_internals() -> Outcome {
    let mut worst_identity = 0.0f64;
    let mut min_gram = f64::INFINITY;
    let mut max_gram = f64::NEG_INFINITY;
    let mut max_excess = f64::NEG_INFINITY;
    for i in 0..200u64 {
        let dims = LEMMA_DIMS[(i % 5) as usize];
        let inst = LemmaInstance::random(dims, &mut stream_rng(5005, i), None)
            .map_err(|e| e.to_string())?;
        for j in 0..5u64 {
            let w = complex_gaussian_vec(&mut stream_rng(5006, i * 5 + j), dims[0]);
            let n = vec_norm(&w);
            let w: Vec<Complex64> = w.into_iter().map(|z| z / n).collect();
            let d = lemma_internals(&inst, &w, 0.1).map_err(|e| e.to_string())?;
            check(d["gram_min"] > 0.0 && d["gram_max"] <= 1.0 + 1e-10, || {
                format!(
                    "{dims:?} #{i}: M spectrum [{:e}, {}]",
                    d["gram_min"], d["gram_max"]
                )
            })?;
            check(d["lhs61"] <= d["rhs61"] + 1e-12, || {
                format!("{dims:?} #{i}: {} > {}", d["lhs61"], d["rhs61"])
            })?;
            if dims[1] == dims[2] {
                check(d["gram_identity_dev"] <= 1e-10, || {
                    format!("{dims:?} #{i}: ‖M − I‖ = {:e}", d["gram_identity_dev"])
                })?;
                worst_identity = worst_identity.max(d["gram_identity_dev"]);
            }
            min_gram = min_gram.min(d["gram_min"]);
            max_gram = max_gram.max(d["gram_max"]);
            max_excess = max_excess.max(d["lhs61"] - d["rhs61"]);
        }
    }
    Ok(format!(
        "1000 draws of w₁, M spectrum in [{min_gram:.3e}, {max_gram:.6}], max ‖M − I‖ (d₂ = d₃) {worst_identity:.1e}, max lhs − rhs {max_excess:.3e}"
    ))
}

fn naive_partial_trace(a: &ComplexMatrix, dims: &[usize], out: &[usize]) -> ComplexMatrix {
    let digits = |mut idx: usize| {
        let mut d = vec![0; dims.len()];
        for k in (0..dims.len()).rev() {
            d[k] = idx % dims[k];
            idx /= dims[k];
        }
        d
    };
    let keep: Vec<usize> = (0..dims.len()).filter(|k| !out.contains(k)).collect();
    let flat = |d: &[usize]| keep.iter().fold(0, |acc, &k| acc * dims[k] + d[k]);
    let m: usize = keep.iter().map(|&k| dims[k]).product();
    let n: usize = dims.iter().product();
    let mut r = ComplexMatrix::zeros(m, m);
    for i in 0..n {
        let di = digits(i);
        for j in 0..n {
            let dj = digits(j);
            if out.iter().all(|&k| di[k] == dj[k]) {
                r[(flat(&di), flat(&dj))] += a[(i, j)];
            }
        }
    }
    r
}

fn c8_infrastructure() -> Outcome {
    let mut pt = 0.0f64;
    for i in 0..100u64 {
        let mut rng = stream_rng(6006, i);
        let k = 2 + (i as usize % 3);
        let dims: Vec<usize> = (0..k).map(|j| 1 + (i as usize + j) % 3).collect();
        let sys = MultiSystem::new(dims.clone()).unwrap();
        let n = sys.total_dim();
        let a = ComplexMatrix::from_vec(n, n, complex_gaussian_vec(&mut rng, n * n)).unwrap();
        let out: Vec<usize> = (0..k).filter(|j| (i >> j) & 1 == 1).collect();
        let fast = partial_trace(&a, &sys, &SubsystemSet::new(out.clone()).unwrap())
            .map_err(|e| e.to_string())?;
        let dev = fast
            .max_abs_diff(&naive_partial_trace(&a, &dims, &out))
            .unwrap();
        check(dev <= 1e-13, || format!("{dims:?} out {out:?}: {dev:e}"))?;
        pt = pt.max(dev);
    }
    let mut recon = 0.0f64;
    let mut spectra = 0.0f64;
    for i in 0..100u64 {
        let dims = vec![
            1 + i as usize % 4,
            1 + (i as usize / 4) % 4,
            1 + (i as usize / 16) % 3,
        ];
        let phi = random_pure_with(
            &MultiSystem::new(dims.clone()).unwrap(),
            &mut stream_rng(6007, i),
        )
        .unwrap();
        let cut = 1 + (i as usize % 2);
        let sd = schmidt_decompose(&phi, cut).map_err(|e| e.to_string())?;
        let diff: Vec<Complex64> = sd
            .reconstruct()
            .iter()
            .zip(phi.as_slice())
            .map(|(a, b)| a - b)
            .collect();
        let err = vec_norm(&diff);
        // the Schmidt families are orthonormal
        for (x, y) in [(&sd.left, "left"), (&sd.right, "right")] {
            for p in 0..x.len() {
                for q in 0..x.len() {
                    let want = if p == q { 1.0 } else { 0.0 };
                    let g = inner(&x[p], &x[q]);
                    check((g - Complex64::new(want, 0.0)).norm() <= 1e-10, || {
                        format!("{y} family not orthonormal")
                    })?;
                }
            }
        }
        let (l, r) = reduced_spectra_equal(&phi, cut).map_err(|e| e.to_string())?;
        let sp = l
            .iter()
            .zip(&r)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        check(err <= 1e-10 && sp <= 1e-10, || {
            format!("{dims:?}: reconstruction {err:e}, spectra {sp:e}")
        })?;
        recon = recon.max(err);
        spectra = spectra.max(sp);
    }
    let mut resid = 0.0f64;
    for (i, n) in [2usize, 4, 8, 16, 32, 48, 64].into_iter().enumerate() {
        for rep in 0..3u64 {
            let g = complex_gaussian_vec(&mut stream_rng(6008, (i as u64) * 3 + rep), n * n);
            let g = ComplexMatrix::from_vec(n, n, g).unwrap();
            let a = g.add(&g.adjoint()).unwrap().scale(0.5);
            let e = eig_hermitian(&a, false).map_err(|e| e.to_string())?;
            let lam = ComplexMatrix::from_real_diag(&e.eigenvalues);
            let r = a
                .mul(&e.eigenvectors)
                .unwrap()
                .sub(&e.eigenvectors.mul(&lam).unwrap())
                .unwrap()
                .frobenius_norm()
                / a.frobenius_norm();
            check(r <= 1e-12, || format!("n={n}: relative residual {r:e}"))?;
            resid = resid.max(r);
        }
    }
    Ok(format!(
        "partial trace {pt:.1e}, Schmidt reconstruction {recon:.1e}, spectra {spectra:.1e}, eigen residual/‖A‖ {resid:.1e}"
    ))
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_lkh-verify"))
        .args(args)
        .output()
        .expect("run lkh-verify");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn c9_cli() -> Outcome {
    let args = [
        "verify", "all", "--dims", "2,2,2", "--trials", "20", "--seed", "99", "--format", "json",
    ];
    let (c1, a, e1) = cli(&args);
    let (c2, b, _) = cli(&args);
    check(c1 == 0 && c2 == 0, || {
        format!("exit codes {c1}, {c2}: {e1}")
    })?;
    let strip = |s: &str| -> Result<Vec<Report>, String> {
        Ok(parse_reports(s)
            .map_err(|e| e.to_string())?
            .iter()
            .map(Report::without_wall_time)
            .collect())
    };
    check(strip(&a)? == strip(&b)?, || "reports differ".into())?;
    let (code, _, err) = cli(&[
        "verify",
        "lkh",
        "--dims",
        "2,3,2",
        "--trials",
        "10",
        "--seed",
        "17",
        "--inject-violation",
        "6",
    ]);
    check(code == 1, || format!("injected violation gave exit {code}"))?;
    let triple = "dims=2,3,2 seed=17 index=6";
    check(err.contains(triple), || {
        format!("missing reproducer in {err:?}")
    })?;
    Ok(format!(
        "6 suites × 20 trials identical across runs; injected violation → exit 1 with {triple}"
    ))
}

fn main() {
    let ens = ensemble();
    let criteria: Vec<Criterion> = vec![
        ("LKH operator inequality", Box::new(|| c1_operator(&ens))),
        (
            "strict positivity / no equality",
            Box::new(|| c2_strict(&ens)),
        ),
        ("log form", Box::new(|| c3_log(&ens))),
        ("SSA and LKH3 entropy gaps", Box::new(c4_entropic)),
        ("purification equivalence", Box::new(c5_purification)),
        ("lemma bound and necessity of (1+√ε)", Box::new(c6_lemma)),
        ("lemma internals", Box::new(c7_internals)),
        ("infrastructure oracles", Box::new(c8_infrastructure)),
        ("CLI determinism and exit codes", Box::new(c9_cli)),
    ];
    let mut failed = 0;
    for (n, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} [{secs:.2}s]", n + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why} [{secs:.2}s]", n + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
