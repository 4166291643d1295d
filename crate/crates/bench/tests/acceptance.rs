//! Acceptance suite. Runs every criterion at its stated tolerance, prints
//! one PASS/FAIL line per criterion and exits nonzero if any failed.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::time::Instant;

use accel_jacobi::io::gen_sdd;
use accel_jacobi::proximal::{build_j_diag, j_block_matrices, Partition};
use accel_jacobi::{
    acc_jacobi_solve, acc_jacobi_solve_observed, cg_solve, jacobi_solve, load_imbalance,
    optimal_weight, partition_rows, pcg_diag_solve, weighted_jacobi_solve, AccelOptions,
    CsrMatrix, IterateView, ProblemInstance, SolveStatus, SolverConfig,
};
use accel_jacobi_bench::{verify_bounds, SolverKind, SolverRun};
use common::*;
use nalgebra::{DMatrix, DVector};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

/// 20 random SPD systems with n in {8, 16, 32, 64} plus the dominant family
/// at n = 50, each with a dense reference solution.
fn bound_instances() -> Vec<ProblemInstance> {
    let mut v = spd_suite(&[8, 16, 32, 64], 5, 2000);
    let mut sdd = gen_sdd(50).unwrap();
    sdd.x_star = Some(direct_solve(&sdd.q, &sdd.b));
    v.push(sdd);
    v
}

/// Runs every iteration up to `maxiter` (the tolerance is unreachable).
fn full_run_config(maxiter: usize) -> SolverConfig {
    SolverConfig::default()
        .with_tol(f64::MIN_POSITIVE)
        .with_maxiter(maxiter)
}

fn no_restart() -> AccelOptions {
    AccelOptions {
        restart: false,
        ..AccelOptions::default()
    }
}

fn criterion_1() -> Outcome {
    let inst = gen_sdd(1000).unwrap();
    let cfg = SolverConfig::default().with_tol(1e-4).with_maxiter(5000);
    let x0 = vec![0.0; 1000];
    let j = build_j_diag(&inst.q).unwrap();
    let acc = acc_jacobi_solve(&inst.q, &inst.b, &j, &x0, &cfg, &AccelOptions::default()).unwrap();
    let jac = jacobi_solve(&inst.q, &inst.b, &x0, &cfg).unwrap();
    let omega = optimal_weight(&inst.q).unwrap();
    let wjac = weighted_jacobi_solve(&inst.q, &inst.b, &x0, omega, &cfg).unwrap();
    let detail = format!(
        "acc {} in {}, jacobi {} in {}, wjacobi(omega={omega:.6}) {} in {}",
        acc.status, acc.iterations, jac.status, jac.iterations, wjac.status, wjac.iterations
    );
    ensure!(acc.status == SolveStatus::Converged, "acc-jacobi did not converge: {detail}");
    ensure!(jac.status == SolveStatus::MaxIterReached, "jacobi: {detail}");
    ensure!(wjac.status == SolveStatus::MaxIterReached, "weighted jacobi: {detail}");
    ensure!(
        acc.iterations < jac.iterations && acc.iterations < wjac.iterations,
        "ordering: {detail}"
    );
    Ok(detail)
}

fn criterion_2() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    let insts = bound_instances();
    for inst in &insts {
        let n = inst.q.n();
        let x_star = inst.x_star.as_ref().unwrap();
        let qd = to_na(&inst.q);
        let j = build_j_diag(&inst.q).unwrap();
        let s = prox_to_na(&j) - &qd;
        let f_star = dense_objective(&qd, &inst.b, x_star);
        let x0 = vec![0.0; n];
        let d: Vec<f64> = x0.iter().zip(x_star).map(|(a, b)| a - b).collect();
        let dist = 2.0 * half_quad(&s, &d);
        let slack = 1e-10 * f_star.abs().max(1.0);

        let rep = acc_jacobi_solve(&inst.q, &inst.b, &j, &x0, &full_run_config(500), &no_restart())
            .unwrap();
        ensure!(rep.trace.len() == 501, "{}: trace has {} entries", inst.label, rep.trace.len());
        for e in rep.trace.iter().skip(1) {
            let t1 = (e.iter + 1) as f64;
            let excess = (e.objective.unwrap() - f_star) - 2.0 * dist / (t1 * t1);
            worst = worst.max(excess / slack);
            ensure!(
                excess <= slack,
                "{} t={}: gap exceeds bound by {excess:e}",
                inst.label,
                e.iter
            );
        }

        let run = SolverRun {
            kind: SolverKind::AccJacobi,
            label: inst.label.clone(),
            x0,
            restart: false,
            report: rep,
        };
        let report = verify_bounds(&run, inst, &j).map_err(|e| e.to_string())?;
        ensure!(report.passed, "{}: harness check failed: {report:?}", inst.label);
    }
    Ok(format!(
        "{} instances, t <= 500; worst excess/slack = {worst:.3e}",
        insts.len()
    ))
}

fn criterion_3() -> Outcome {
    let mut worst_rise = f64::NEG_INFINITY;
    let insts = bound_instances();
    for inst in &insts {
        let n = inst.q.n();
        let x_star = inst.x_star.clone().unwrap();
        let qd = to_na(&inst.q);
        let j = build_j_diag(&inst.q).unwrap();
        let s = prox_to_na(&j) - &qd;
        let x0 = vec![0.0; n];
        let e0: Vec<f64> = x0.iter().zip(&x_star).map(|(a, b)| a - b).collect();
        // α₀ = 0: w⁰ = x⁰ − x*.
        let mut energies = vec![half_quad(&s, &e0)];
        let mut obs = |v: &IterateView<'_>| {
            let a = v.alpha.unwrap();
            let e: Vec<f64> = v.x.iter().zip(&x_star).map(|(x, s)| x - s).collect();
            let ep: Vec<f64> = v.x_prev.iter().zip(&x_star).map(|(x, s)| x - s).collect();
            let w: Vec<f64> = e.iter().zip(&ep).map(|(c, p)| a * c - (a - 1.0) * p).collect();
            // f(x) − f* = ½ eᵀQe for the exact minimizer.
            energies.push(a * a * half_quad(&qd, &e) + half_quad(&s, &w));
        };
        acc_jacobi_solve_observed(
            &inst.q,
            &inst.b,
            &j,
            &x0,
            &full_run_config(500),
            &no_restart(),
            &mut obs,
        )
        .unwrap();
        for (t, pair) in energies.windows(2).enumerate() {
            let rise = pair[1] - pair[0];
            worst_rise = worst_rise.max(rise);
            ensure!(
                rise <= 1e-9,
                "{} t={}: energy rose by {rise:e}",
                inst.label,
                t + 1
            );
        }
    }
    Ok(format!(
        "{} instances, t <= 500; largest step change = {worst_rise:.3e}",
        insts.len()
    ))
}

fn criterion_4() -> Outcome {
    let mut total_restarts = 0;
    let insts = bound_instances();
    for inst in &insts {
        let n = inst.q.n();
        let j = build_j_diag(&inst.q).unwrap();
        let x0 = vec![0.0; n];
        let f0 = dense_objective(&to_na(&inst.q), &inst.b, &x0);
        let rep = acc_jacobi_solve(
            &inst.q,
            &inst.b,
            &j,
            &x0,
            &full_run_config(500),
            &AccelOptions::default(),
        )
        .unwrap();
        total_restarts += rep.restarts.len();
        for e in &rep.trace {
            let f = e.objective.unwrap();
            ensure!(f <= f0 + 1e-9, "{} t={}: f = {f:e} above f(x0)", inst.label, e.iter);
        }
        // Anchors: x⁰, then the iterate kept at each restart (x^{t−1}).
        let mut anchor = f0;
        for &t in &rep.restarts {
            let next = rep.trace[t - 1].objective.unwrap();
            ensure!(
                next <= anchor + 1e-9,
                "{} restart at t={t}: anchor rose {anchor:e} -> {next:e}",
                inst.label
            );
            anchor = next;
        }
        for e in &rep.trace {
            let ell = rep.restarts.iter().filter(|&&r| r <= e.iter).count();
            let cap = ((e.iter + 2) as f64).log2() - 1.0;
            ensure!(
                ell as f64 <= cap,
                "{} t={}: {ell} restarts exceed log2(t+2)-1 = {cap}",
                inst.label,
                e.iter
            );
        }
    }
    Ok(format!(
        "{} instances, t <= 500; {total_restarts} restarts in total",
        insts.len()
    ))
}

fn exact_norm(b: &accel_jacobi::dense::DenseMatrix) -> f64 {
    let m = DMatrix::from_fn(b.rows(), b.cols(), |i, j| b.get(i, j));
    m.singular_values().max()
}

fn criterion_5() -> Outcome {
    let mut mats: Vec<(String, CsrMatrix)> = Vec::new();
    for (k, n) in [4, 8, 16, 32, 64].into_iter().enumerate() {
        mats.push((format!("spd-{n}"), random_spd(n, 500 + k as u64)));
        mats.push((format!("spsd-{n}"), random_spsd(n, 600 + k as u64)));
    }
    for k in 0..10u64 {
        let n = 3 + (k as usize % 10);
        let g = random_connected_graph(n, n / 2, 700 + k);
        mats.push((format!("laplacian-{n}-{k}"), laplacian(&g, k).q));
    }
    for n in [2, 3, 10, 64] {
        mats.push((format!("sdd-{n}"), gen_sdd(n).unwrap().q));
    }

    let (mut worst_diag, mut worst_block) = (f64::INFINITY, f64::INFINITY);
    for (label, q) in &mats {
        let n = q.n();
        let qd = to_na(q);
        let jd = build_j_diag(q).map_err(|e| format!("{label}: {e}"))?;
        let lmin = min_eigenvalue(&(prox_to_na(&jd) - &qd));
        worst_diag = worst_diag.min(lmin);
        ensure!(lmin >= -1e-10, "{label}: diagonal J gives lambda_min(S) = {lmin:e}");
        for s in 1..=4usize.min(n) {
            let p = Partition::new(random_offsets(n, s, 800 + n as u64 + s as u64)).unwrap();
            let blocks = j_block_matrices(q, &p, exact_norm).map_err(|e| format!("{label}: {e}"))?;
            let mut jb = DMatrix::zeros(n, n);
            for (i, blk) in blocks.iter().enumerate() {
                let o = p.offsets()[i];
                for r in 0..blk.rows() {
                    for c in 0..blk.cols() {
                        jb[(o + r, o + c)] = blk.get(r, c);
                    }
                }
            }
            let lmin = min_eigenvalue(&(jb - &qd));
            worst_block = worst_block.min(lmin);
            ensure!(
                lmin >= -1e-8,
                "{label}, s={s}: block J gives lambda_min(S) = {lmin:e}"
            );
        }
    }
    Ok(format!(
        "{} matrices; min lambda_min(S): diag {worst_diag:.3e}, block {worst_block:.3e}",
        mats.len()
    ))
}

fn criterion_6() -> Outcome {
    let cfg = SolverConfig::default().with_tol(1e-6);
    let mut worst: f64 = 0.0;
    let insts: Vec<ProblemInstance> = (0..20u64)
        .map(|k| {
            let n = 2 + (k as usize * 7) % 15;
            let q = random_spd(n, 900 + k);
            let b = random_rhs(n, 900 + k);
            ProblemInstance {
                x_star: Some(direct_solve(&q, &b)),
                q,
                b,
                label: format!("spd-{n}-{k}"),
                warnings: Vec::new(),
            }
        })
        .collect();
    for inst in &insts {
        let n = inst.q.n();
        let x0 = vec![0.0; n];
        let xd = inst.x_star.as_ref().unwrap();
        let j = build_j_diag(&inst.q).unwrap();
        let runs = [
            ("cg", cg_solve(&inst.q, &inst.b, &x0, &cfg)),
            ("pcg", pcg_diag_solve(&inst.q, &inst.b, &x0, &cfg)),
            (
                "acc",
                acc_jacobi_solve(&inst.q, &inst.b, &j, &x0, &cfg, &AccelOptions::default()),
            ),
        ];
        for (name, rep) in runs {
            let rep = rep.map_err(|e| format!("{} {name}: {e}", inst.label))?;
            let err = rel_error(&rep.x, xd);
            worst = worst.max(err);
            ensure!(
                err <= 1e-3,
                "{} {name}: relative error {err:e} ({})",
                inst.label,
                rep.status
            );
        }
    }
    Ok(format!("{} instances, n <= 16; worst relative error {worst:.3e}", insts.len()))
}

fn criterion_7() -> Outcome {
    let insts = vec![
        gen_sdd(200).unwrap(),
        laplacian(&random_connected_graph(300, 450, 71), 71),
        laplacian(&random_bipartite_graph(400, 800, 72), 72),
    ];
    let cfg = SolverConfig::default();
    for inst in &insts {
        let n = inst.q.n();
        let j = build_j_diag(&inst.q).unwrap();
        let x0 = vec![0.0; n];
        let run = |s: usize| {
            let opts = AccelOptions {
                partitions: s,
                ..AccelOptions::default()
            };
            acc_jacobi_solve(&inst.q, &inst.b, &j, &x0, &cfg, &opts).unwrap()
        };
        let base = run(1);
        for s in [2, 4, 8] {
            let other = run(s);
            ensure!(other.status == base.status, "{} s={s}: status differs", inst.label);
            ensure!(other.restarts == base.restarts, "{} s={s}: restarts differ", inst.label);
            ensure!(
                other.trace.len() == base.trace.len(),
                "{} s={s}: trace length differs",
                inst.label
            );
            for (a, b) in base.trace.iter().zip(&other.trace) {
                let same = a.iter == b.iter
                    && a.restart == b.restart
                    && a.rel_residual.to_bits() == b.rel_residual.to_bits()
                    && a.objective.map(f64::to_bits) == b.objective.map(f64::to_bits);
                ensure!(same, "{} s={s}: trace differs at t={}", inst.label, a.iter);
            }
            ensure!(
                base.x.iter().zip(&other.x).all(|(a, b)| a.to_bits() == b.to_bits()),
                "{} s={s}: final iterate differs",
                inst.label
            );
        }
    }
    Ok(format!("{} instances, s in {{1,2,4,8}} bitwise identical", insts.len()))
}

fn criterion_8() -> Outcome {
    let cfg = SolverConfig::default().with_tol(1e-4).with_maxiter(5000);
    let mut lines = Vec::new();
    for (k, n) in [200usize, 500, 1000, 1500, 2000].into_iter().enumerate() {
        let g = random_bipartite_graph(n, 2 * n, 80 + k as u64);
        let inst = laplacian(&g, 80 + k as u64);
        ensure!(inst.warnings.is_empty(), "graph {n} has isolated nodes");
        let x0 = vec![0.0; n];
        let j = build_j_diag(&inst.q).unwrap();
        let acc = acc_jacobi_solve(&inst.q, &inst.b, &j, &x0, &cfg, &AccelOptions::default()).unwrap();
        let cg = cg_solve(&inst.q, &inst.b, &x0, &cfg).unwrap();
        let pcg = pcg_diag_solve(&inst.q, &inst.b, &x0, &cfg).unwrap();
        let jac = jacobi_solve(&inst.q, &inst.b, &x0, &cfg).unwrap();
        for (name, rep) in [("acc", &acc), ("cg", &cg), ("pcg", &pcg)] {
            let res = rep.final_rel_residual().unwrap();
            ensure!(
                rep.status == SolveStatus::Converged && res <= 1e-4,
                "n={n} {name}: {} with residual {res:e}",
                rep.status
            );
        }
        ensure!(
            matches!(jac.status, SolveStatus::Diverged | SolveStatus::MaxIterReached),
            "n={n}: jacobi ended {}",
            jac.status
        );
        lines.push(format!(
            "n={n}: acc {} cg {} pcg {} jacobi {}",
            acc.iterations, cg.iterations, pcg.iterations, jac.status
        ));
    }
    Ok(lines.join("; "))
}

fn criterion_9() -> Outcome {
    // Rows hold 4, 2, 1, 1 nonzeros.
    let skewed = CsrMatrix::from_triplets(
        4,
        &[
            (0, 0, 1.0),
            (0, 1, 1.0),
            (0, 2, 1.0),
            (0, 3, 1.0),
            (1, 0, 1.0),
            (1, 1, 1.0),
            (2, 0, 1.0),
            (3, 0, 1.0),
        ],
    )
    .unwrap();
    let cases = [
        ("row nnz 4,2,1,1, s=2", skewed.clone(), 2, 1.5),
        ("row nnz 4,2,1,1, s=1", skewed.clone(), 1, 1.0),
        ("row nnz 4,2,1,1, s=4", skewed, 4, 2.0),
        ("identity 6, s=3", CsrMatrix::identity(6), 3, 1.0),
        ("dense 10, s=3", gen_sdd(10).unwrap().q, 3, 1.2),
        ("dense 10, s=4", gen_sdd(10).unwrap().q, 4, 1.2),
    ];
    for (label, q, s, expected) in &cases {
        let p = partition_rows(q.n(), *s).unwrap();
        let got = load_imbalance(q, &p).unwrap();
        ensure!((got - expected).abs() <= 1e-15, "{label}: got {got}, expected {expected}");
    }
    Ok(format!("{} hand-computed cases", cases.len()))
}

fn criterion_10() -> Outcome {
    let mut insts = bound_instances();
    insts.push(gen_sdd(200).unwrap());
    for k in 0..4 {
        insts.push(laplacian(&random_connected_graph(12 + 10 * k, 15, 1000 + k as u64), k as u64));
    }
    let cfg = SolverConfig::default().with_maxiter(300);
    for inst in &insts {
        let x0 = vec![0.0; inst.q.n()];
        let a = jacobi_solve(&inst.q, &inst.b, &x0, &cfg).unwrap();
        let b = weighted_jacobi_solve(&inst.q, &inst.b, &x0, 1.0, &cfg).unwrap();
        let same = a.status == b.status
            && a.iterations == b.iterations
            && a.trace.len() == b.trace.len()
            && a.trace.iter().zip(&b.trace).all(|(u, v)| {
                u.rel_residual.to_bits() == v.rel_residual.to_bits()
                    && u.objective.map(f64::to_bits) == v.objective.map(f64::to_bits)
            })
            && a.x.iter().zip(&b.x).all(|(u, v)| u.to_bits() == v.to_bits());
        ensure!(same, "{}: omega = 1 differs from jacobi", inst.label);
    }

    let mut worst: f64 = 0.0;
    let mut weighted: Vec<(String, CsrMatrix)> = spd_suite(&[4, 8, 16, 32, 64], 4, 3000)
        .into_iter()
        .map(|i| (i.label, i.q))
        .collect();
    for n in [2, 5, 20, 64] {
        weighted.push((format!("sdd-{n}"), gen_sdd(n).unwrap().q));
    }
    for (label, q) in &weighted {
        let qd = to_na(q);
        let dinv = DVector::from_iterator(q.n(), (0..q.n()).map(|k| qd[(k, k)].sqrt().recip()));
        let scaled = DMatrix::from_diagonal(&dinv) * &qd * DMatrix::from_diagonal(&dinv);
        let expected = 2.0 / (min_eigenvalue(&scaled) + max_eigenvalue(&scaled));
        let got = optimal_weight(q).map_err(|e| format!("{label}: {e}"))?;
        let rel = (got - expected).abs() / expected;
        worst = worst.max(rel);
        ensure!(rel <= 1e-6, "{label}: omega_opt {got} vs {expected} (rel {rel:e})");
    }
    Ok(format!(
        "omega=1 bitwise on {} instances; omega_opt worst rel error {worst:.3e} on {}",
        insts.len(),
        weighted.len()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("1  ordering on the dominant family, n=1000", criterion_1),
        ("2  objective-gap bound, no restart", criterion_2),
        ("3  Lyapunov energy nonincreasing", criterion_3),
        ("4  descent and restart count with restart", criterion_4),
        ("5  J - Q positive semidefinite", criterion_5),
        ("6  agreement with direct solve", criterion_6),
        ("7  partition invariance", criterion_7),
        ("8  Laplacian convergence and Jacobi failure", criterion_8),
        ("9  load imbalance", criterion_9),
        ("10 weighted Jacobi reduction and omega_opt", criterion_10),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|p| {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panic".into());
                Err(format!("panicked: {msg}"))
            });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  criterion {name} ({secs:.1}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {name} ({secs:.1}s): {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
