//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{random_body, random_decomposition, random_zonotope};
use shadow_geom::john::DEFAULT_EPSILON;
use shadow_geom::kernel::{sample_unit_sphere, RandomSource};
use shadow_geom::minkowski::{
    gradient_check, maximize_volume_in_family, verify_projection_identity, SlabFamilySpec,
};
use shadow_geom::shadow::{loomis_whitney_check, SearchBranch};
use shadow_geom::zonotope::{dominance_volume_bound, lemma4_bound, DecompositionResidual};
use shadow_geom::{
    ball_shadow_ratio, construct_pathological, shadow_position, verify_theorem3, ShadowPositionReport,
    SymmetricHPolytope, WeightedDirections, Zonotope,
};

type Check = std::result::Result<String, String>;

fn ensure(ok: bool, msg: String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

fn within_budget(start: Instant, budget: Duration) -> std::result::Result<(), String> {
    let t = start.elapsed();
    ensure(t < budget, format!("took {t:.2?}, budget {budget:?}"))
}

fn criterion_1(residuals: &mut Vec<DecompositionResidual<f64>>) -> Check {
    let start = Instant::now();
    let mut ratios = Vec::new();
    for n in [3, 4] {
        let c = SymmetricHPolytope::<f64>::cube(n).unwrap();
        let r = shadow_position(&c, DEFAULT_EPSILON, &mut RandomSource::new(n as u64)).map_err(|e| e.to_string())?;
        residuals.push(r.residuals);
        ensure((r.ratio - 1.0).abs() <= 1e-6, format!("n={n}: ratio {}", r.ratio))?;
        ratios.push(r.ratio);
    }
    within_budget(start, Duration::from_secs(1))?;
    Ok(format!("ratios {ratios:?} in {:.2?}", start.elapsed()))
}

fn criterion_2(residuals: &mut Vec<DecompositionResidual<f64>>) -> Check {
    let start = Instant::now();
    let mut rng = RandomSource::new(2024);
    let mut worst = f64::INFINITY;
    for k in 0..20 {
        let n = 3 + k % 3;
        let m = n + 1 + rng.below(12 - n);
        let c = random_body(n, m, &mut rng);
        let r: ShadowPositionReport<f64> =
            shadow_position(&c, DEFAULT_EPSILON, &mut rng.fork(k as u64)).map_err(|e| format!("body {k}: {e}"))?;
        residuals.push(r.residuals);
        ensure(r.branch == SearchBranch::Exact, format!("body {k}: minimum not from the exact branch"))?;
        ensure(r.ratio >= 1.0 - 1e-4, format!("body {k} (n={n}, m={m}): ratio {}", r.ratio))?;
        worst = worst.min(r.ratio);
    }
    within_budget(start, Duration::from_secs(300))?;
    Ok(format!("20 bodies, smallest ratio {worst:.9} in {:.2?}", start.elapsed()))
}

fn criterion_3(residuals: &[DecompositionResidual<f64>]) -> Check {
    ensure(!residuals.is_empty(), "no pipeline runs recorded".into())?;
    let fro = residuals.iter().map(|r| r.frobenius).fold(0.0, f64::max);
    let tr = residuals.iter().map(|r| r.trace_gap.abs()).fold(0.0, f64::max);
    ensure(fro <= 1e-6, format!("frobenius residual {fro:e}"))?;
    ensure(tr <= 1e-8, format!("trace gap {tr:e}"))?;
    Ok(format!("{} runs, max frobenius {fro:.2e}, max trace gap {tr:.2e}", residuals.len()))
}

fn criterion_4() -> Check {
    let mut rng = RandomSource::new(4);
    let mut worst_gap: f64 = 0.0;
    let mut worst_ratio = f64::INFINITY;
    for k in 0..100 {
        let n = 2 + k % 4;
        let m = n + rng.below(13 - n);
        let z = random_zonotope(n, m, &mut rng);
        let rep = z.volume_formula_check().map_err(|e| e.to_string())?;
        ensure(rep.relative_gap <= 1e-9, format!("instance {k}: gap {:e}", rep.relative_gap))?;
        worst_gap = worst_gap.max(rep.relative_gap);

        let wd = random_decomposition(n, m, &mut rng);
        let alphas: Vec<f64> = (0..m).map(|_| rng.uniform(0.1, 3.0)).collect();
        let l4 = lemma4_bound(&wd, &alphas).map_err(|e| e.to_string())?;
        ensure(l4.ratio >= 1.0 - 1e-9, format!("instance {k}: bound ratio {}", l4.ratio))?;
        worst_ratio = worst_ratio.min(l4.ratio);
    }
    for n in 2..=5 {
        let l4 = lemma4_bound(&WeightedDirections::<f64>::orthonormal(n), &vec![1.0; n]).map_err(|e| e.to_string())?;
        ensure((l4.ratio - 1.0).abs() <= 1e-9, format!("orthonormal n={n}: ratio {}", l4.ratio))?;
    }
    Ok(format!("max formula gap {worst_gap:.2e}, min volume/bound {worst_ratio:.6}; orthonormal fixtures equal"))
}

fn criterion_5() -> Check {
    let mut rng = RandomSource::new(5);
    let mut worst = f64::INFINITY;
    for k in 0..50 {
        let n = 2 + k % 4;
        let c = random_body(n, n + 1 + rng.below(6), &mut rng);
        let wd = random_decomposition(n, n + rng.below(5), &mut rng);
        let r = verify_theorem3(&c, &wd).map_err(|e| e.to_string())?;
        ensure(r.ratio >= 1.0 - 1e-9, format!("pair {k}: rhs/lhs {}", r.ratio))?;
        worst = worst.min(r.ratio);
    }
    let mut gap: f64 = 0.0;
    for w in [vec![1.0f64, 2.0], vec![0.5, 1.0, 3.0], vec![1.0, 0.3, 2.0, 0.7]] {
        let b = SymmetricHPolytope::axis_box(&w).unwrap();
        let r = loomis_whitney_check(&b).map_err(|e| e.to_string())?;
        gap = gap.max((r.rhs - r.lhs).abs() / r.lhs);
    }
    ensure(gap <= 1e-9, format!("box equality gap {gap:e}"))?;
    Ok(format!("50 pairs, min rhs/lhs {worst:.6}; box equality gap {gap:.2e}"))
}

fn criterion_6() -> Check {
    let mut rng = RandomSource::new(6);
    let mut summary = Vec::new();
    for (n, m) in [(2, 5), (3, 6), (4, 7)] {
        let dirs: Vec<Vec<f64>> = (0..m).map(|_| sample_unit_sphere(n, &mut rng).unwrap()).collect();
        let gammas: Vec<f64> = (0..m).map(|_| rng.uniform(0.5, 2.0)).collect();
        let spec = SlabFamilySpec::new(dirs, gammas).map_err(|e| e.to_string())?;
        let sol = maximize_volume_in_family(&spec, 1e-9, &mut rng.fork(n as u64)).map_err(|e| e.to_string())?;
        ensure(sol.kkt_residual <= 1e-3, format!("n={n}: KKT residual {:e}", sol.kkt_residual))?;
        ensure(sol.volume_spread <= 1e-6, format!("n={n}: multistart spread {:e}", sol.volume_spread))?;
        let id = verify_projection_identity(&sol.body, &spec, 1000, &mut rng).map_err(|e| e.to_string())?;
        ensure(id.max_relative_error <= 1e-3, format!("n={n}: identity error {:e}", id.max_relative_error))?;
        let t: Vec<f64> = (0..m).map(|_| rng.uniform(0.7, 1.3)).collect();
        let g = gradient_check(&spec, &t, 1e-5).map_err(|e| e.to_string())?;
        ensure(g.max_relative_error <= 1e-2, format!("n={n}: gradient error {:e}", g.max_relative_error))?;
        summary.push(format!(
            "n={n}: kkt {:.1e} spread {:.1e} identity {:.1e} fd {:.1e}",
            sol.kkt_residual, sol.volume_spread, id.max_relative_error, g.max_relative_error
        ));
    }
    Ok(summary.join("; "))
}

fn criterion_7() -> Check {
    let mut medians = Vec::new();
    for n in 2..=6 {
        let mut ratios = Vec::new();
        for seed in 0..10u64 {
            let p = construct_pathological::<f64>(n, &mut RandomSource::new(seed))
                .map_err(|e| format!("n={n} seed={seed}: {e}"))?;
            ensure(
                p.vol_nth_root >= 2f64.sqrt() - 1e-9,
                format!("n={n} seed={seed}: |K|^(1/n) = {}", p.vol_nth_root),
            )?;
            ensure(
                p.ratio >= p.floor - 1e-6,
                format!("n={n} seed={seed}: ratio {} below floor {}", p.ratio, p.floor),
            )?;
            ratios.push(p.ratio);
        }
        ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
        medians.push(0.5 * (ratios[4] + ratios[5]));
    }
    let table = medians
        .iter()
        .enumerate()
        .map(|(i, m)| format!("n={}: {m:.4}", i + 2))
        .collect::<Vec<_>>()
        .join(", ");
    ensure(
        medians.windows(2).all(|w| w[1] >= w[0]),
        format!("floors hold on all 50 runs, but median ratio is not nondecreasing ({table})"),
    )?;
    Ok(format!("floors hold on all 50 runs; medians {table}"))
}

fn criterion_8() -> Check {
    let start = Instant::now();
    let values: Vec<f64> = (2..=200).map(|n| ball_shadow_ratio(n).unwrap()).collect();
    within_budget(start, Duration::from_secs(1))?;
    ensure(values.windows(2).all(|w| w[1] > w[0]), "not strictly increasing".into())?;
    let two_over_sqrt_pi = 2.0 / std::f64::consts::PI.sqrt();
    ensure(
        (values[0] - two_over_sqrt_pi).abs() <= 1e-9,
        format!("n=2 value {} vs {two_over_sqrt_pi}", values[0]),
    )?;
    let sqrt_e = std::f64::consts::E.sqrt();
    let last = values[values.len() - 1];
    let rel = (last - sqrt_e).abs() / sqrt_e;
    ensure(
        rel <= 5e-3,
        format!("n=200 value {last:.10} is {:.3}% from sqrt(e) = {sqrt_e:.5}, tolerance 0.5%", 100.0 * rel),
    )?;
    Ok(format!("n=2 {:.12}, n=200 {last:.10}", values[0]))
}

fn criterion_9() -> Check {
    let start = Instant::now();
    let mut out = Vec::new();
    for (name, c) in [
        ("square", SymmetricHPolytope::<f64>::cube(2).unwrap()),
        ("3-cube", SymmetricHPolytope::<f64>::cube(3).unwrap()),
    ] {
        let (est, _) = c
            .cauchy_surface_estimate(100_000, &mut RandomSource::new(9))
            .map_err(|e| e.to_string())?;
        let s = c.surface_area().unwrap();
        let rel = (est - s).abs() / s;
        ensure(rel <= 1e-2, format!("{name}: estimate {est} vs {s}"))?;
        out.push(format!("{name} {est:.4}/{s}"));
    }
    within_budget(start, Duration::from_secs(10))?;
    Ok(out.join(", "))
}

fn criterion_10() -> Check {
    for n in 2..=4 {
        let c = SymmetricHPolytope::<f64>::cube(n).unwrap();
        let z = Zonotope::from_directions(c.directions(), &vec![1.0; n]).unwrap();
        let shadows: Vec<f64> = c.directions().iter().map(|u| c.shadow_area(u).unwrap()).collect();
        let b = dominance_volume_bound(&c, &z, &shadows).map_err(|e| e.to_string())?;
        let v = c.volume().unwrap();
        ensure((b.bound - v).abs() <= 1e-9 * v, format!("cube n={n}: bound {} vs {v}", b.bound))?;
    }
    let mut rng = RandomSource::new(10);
    let mut tested = 0;
    let mut min_slack = f64::INFINITY;
    for k in 0..20 {
        let n = 2 + k % 3;
        let c = random_body(n, n + 2, &mut rng);
        let z0 = random_zonotope(n, n + 1, &mut rng);
        let fit = c
            .directions()
            .iter()
            .zip(c.offsets())
            .map(|(u, t)| t / z0.support(u))
            .fold(f64::INFINITY, f64::min);
        let z = z0.scale(fit).unwrap();
        let d0 = random_body(n, n + 2, &mut rng);
        // check directions: Z's generators plus random samples
        let mut dirs = z.directions();
        for _ in 0..200 {
            dirs.push(sample_unit_sphere(n, &mut rng).unwrap());
        }
        let worst = dirs
            .iter()
            .map(|u| d0.shadow_area(u).unwrap() / c.shadow_area(u).unwrap())
            .fold(0.0, f64::max);
        let shrink = (rng.uniform(0.5, 1.0) / worst).powf(1.0 / (n as f64 - 1.0));
        let d = d0.with_offsets(d0.offsets().iter().map(|t| t * shrink).collect()).unwrap();
        let dominated = dirs
            .iter()
            .all(|u| d.shadow_area(u).unwrap() <= c.shadow_area(u).unwrap() * (1.0 + 1e-12));
        if !dominated {
            continue;
        }
        tested += 1;
        let s: Vec<f64> = z.directions().iter().map(|u| d.shadow_area(u).unwrap()).collect();
        let b = dominance_volume_bound(&c, &z, &s).map_err(|e| e.to_string())?;
        let vd = d.volume().unwrap();
        ensure(b.bound >= vd * (1.0 - 1e-9), format!("triple {k}: bound {} < |D| {vd}", b.bound))?;
        min_slack = min_slack.min(b.bound / vd);
    }
    ensure(tested == 20, format!("only {tested} dominated triples"))?;
    Ok(format!("cube fixtures tight; {tested} random triples, min bound/|D| {min_slack:.4}"))
}

fn main() {
    let mut residuals = Vec::new();
    let mut results: Vec<(u32, &str, Check)> = Vec::new();
    let mut run = |id: u32, name: &'static str, f: &mut dyn FnMut() -> Check| {
        let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let tag = if out.is_ok() { "PASS" } else { "FAIL" };
        let detail = match &out {
            Ok(s) | Err(s) => s.clone(),
        };
        println!("{tag} [{id:>2}] {name}: {detail}");
        results.push((id, name, out));
    };
    run(1, "cube fixed point", &mut || criterion_1(&mut residuals));
    run(2, "shadow position on random polytopes", &mut || criterion_2(&mut residuals));
    run(3, "decomposition residuals", &mut || criterion_3(&residuals));
    run(4, "zonotope volume double entry and lower bound", &mut criterion_4);
    run(5, "weighted projection inequality", &mut criterion_5);
    run(6, "slab family solver", &mut criterion_6);
    run(7, "large-shadow body floors", &mut criterion_7);
    run(8, "ball shadow ratio", &mut criterion_8);
    run(9, "surface area from mean shadow", &mut criterion_9);
    run(10, "dominance volume bound", &mut criterion_10);

    let failed: Vec<u32> = results.iter().filter(|r| r.2.is_err()).map(|r| r.0).collect();
    println!(
        "acceptance: {} passed, {} failed{}",
        results.len() - failed.len(),
        failed.len(),
        if failed.is_empty() { String::new() } else { format!(" {failed:?}") }
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
