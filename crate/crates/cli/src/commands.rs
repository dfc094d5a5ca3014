use serde_json::json;
use shadow_geom::io::BodyFile;
use shadow_geom::john::JohnDecomposition;
use shadow_geom::kernel::linalg::{norm, pd_inv_sqrt, scaled};
use shadow_geom::kernel::{sample_unit_sphere, RandomSource};
use shadow_geom::minkowski::{gradient_check, verify_projection_identity, MAX_PATHOLOGICAL_DIM};
use shadow_geom::shadow::loomis_whitney_check;
use shadow_geom::zonotope::lemma4_bound;
use shadow_geom::{
    ball_shadow_ratio, construct_pathological, maximize_volume_in_family, shadow_position, verify_theorem3, GeomError,
    Mat, Polytope64, SlabFamily64, WeightedDirections, Zonotope64,
};

use crate::config::{load_body, Resolved};
use crate::failure::{escalate, Failure};
use crate::report::{Outcome, Table};

// Per-component seeds are `seed XOR salt`, mixed by `RandomSource::fork`.
const SALT_BODY: u64 = 0x0000_0000_626f_6479;
const SALT_SEARCH: u64 = 0x0000_7365_6172_6368;
const SALT_DECOMP: u64 = 0x0000_6465_636f_6d70;
const SALT_ZONO: u64 = 0x0000_007a_6f6e_6f00;
const SALT_FAMILY: u64 = 0x0066_616d_696c_7900;
const SALT_THETA: u64 = 0x0000_0074_6865_7461;
const SALT_CAUCHY: u64 = 0x0063_6175_6368_7900;

fn fmt(x: f64) -> String {
    format!("{x}")
}

/// Runs a library call; capacity errors abort, other errors become a failed
/// assertion named `what`.
fn attempt<T>(out: &mut Outcome, what: &str, r: Result<T, GeomError>) -> Result<Option<T>, Failure> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(e) => {
            let e = escalate(e)?;
            out.check(what, false, e.to_string());
            Ok(None)
        }
    }
}

fn random_body(n: usize, m: usize, rng: &mut RandomSource) -> Result<Polytope64, Failure> {
    for _ in 0..1000 {
        let dirs: Vec<Vec<f64>> = (0..m)
            .map(|_| sample_unit_sphere(n, rng))
            .collect::<Result<_, _>>()
            .map_err(|e| Failure::Config(e.to_string()))?;
        let offsets: Vec<f64> = (0..m).map(|_| rng.uniform(0.5, 1.5)).collect();
        match Polytope64::new(dirs, offsets) {
            Ok(p) => return Ok(p),
            Err(GeomError::Unbounded(_)) => continue,
            Err(e) => return Err(Failure::Config(e.to_string())),
        }
    }
    Err(Failure::Config(format!("could not draw a bounded body with n = {n}, m = {m}")))
}

fn body_for(cfg: &Resolved, root: &RandomSource) -> Result<Polytope64, Failure> {
    match &cfg.body {
        Some(path) => load_body(path),
        None => random_body(cfg.n, cfg.m, &mut root.fork(SALT_BODY)),
    }
}

fn random_decomposition(n: usize, m: usize, rng: &mut RandomSource) -> Result<WeightedDirections<f64>, GeomError> {
    let vs: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| rng.normal()).collect()).collect();
    let mut s = Mat::zeros(n);
    for v in &vs {
        s.add_outer(1.0, v);
    }
    let a = pd_inv_sqrt(&s)?;
    let (mut dirs, mut weights) = (Vec::new(), Vec::new());
    for v in &vs {
        let y = a.mul_vec(v);
        let r = norm(&y);
        dirs.push(scaled(&y, 1.0 / r));
        weights.push(r * r);
    }
    Ok(WeightedDirections {
        directions: dirs,
        weights,
    })
}

fn perturbed(j: &JohnDecomposition<f64>, p: f64) -> WeightedDirections<f64> {
    let mut wd = j.as_weighted();
    for w in wd.weights.iter_mut() {
        *w *= 1.0 + p;
    }
    wd
}

pub fn shadow_position_cmd(cfg: &Resolved) -> Result<Outcome, Failure> {
    let root = RandomSource::new(cfg.seed);
    let body = body_for(cfg, &root)?;
    let mut out = Outcome::default();
    let Some(r) = attempt(
        &mut out,
        "shadow position computed",
        shadow_position(&body, cfg.tolerance, &mut root.fork(SALT_SEARCH)),
    )?
    else {
        return Ok(out);
    };
    let wd = perturbed(&r.john, cfg.perturb_weights);
    let res = wd.residual();
    out.check("ratio >= 1 - 1e-4", r.ratio >= 1.0 - 1e-4, format!("ratio {}", r.ratio));
    out.check(
        "decomposition frobenius residual <= 1e-6",
        res.frobenius <= 1e-6,
        format!("{:e}", res.frobenius),
    );
    out.check(
        "decomposition trace gap <= 1e-8",
        res.trace_gap.abs() <= 1e-8,
        format!("{:e}", res.trace_gap),
    );

    let mut table = Table::new(&["contact", "weight", "shadow", "direction"]);
    for (k, (u, &c)) in wd.directions.iter().zip(&wd.weights).enumerate() {
        let s = r.body.shadow_area(u).unwrap_or(f64::NAN);
        let dir = u.iter().map(|x| fmt(*x)).collect::<Vec<_>>().join(" ");
        table.push([k.to_string(), fmt(c), fmt(s), dir]);
    }
    out.results = json!({
        "ratio": r.ratio,
        "min_shadow": r.min_shadow,
        "min_direction": r.min_direction,
        "branch": r.branch,
        "volume": r.volume,
        "transform": r.transform.rows(),
        "body": BodyFile::from_polytope(&r.body),
        "input_body": BodyFile::from_polytope(&body),
        "contacts": wd.directions,
        "weights": wd.weights,
        "residual": { "frobenius": res.frobenius, "trace_gap": res.trace_gap },
        "contact_shadow_spread": r.contact_shadow_spread,
        "mvee_iterations": r.mvee_iterations,
    });
    out.table = Some(table);
    Ok(out)
}

pub fn verify_t3_cmd(cfg: &Resolved) -> Result<Outcome, Failure> {
    let root = RandomSource::new(cfg.seed);
    let body = body_for(cfg, &root)?;
    let n = body.dim();
    let mut out = Outcome::default();
    let mut table = Table::new(&["kind", "index", "lhs", "rhs", "ratio"]);
    let mut worst = f64::INFINITY;

    let mut cases: Vec<(String, WeightedDirections<f64>)> = Vec::new();
    cases.push(("orthonormal".into(), WeightedDirections::orthonormal(n)));
    if let Some(r) = attempt(
        &mut out,
        "shadow position computed",
        shadow_position(&body, 1e-8, &mut root.fork(SALT_SEARCH)),
    )? {
        // contacts live in the frame of the moved body, so pair them with it
        let wd = perturbed(&r.john, cfg.perturb_weights);
        if let Some(rep) = attempt(&mut out, "contact decomposition valid", verify_theorem3(&r.body, &wd))? {
            out.check("contact decomposition rhs/lhs >= 1 - 1e-9", rep.ratio >= 1.0 - 1e-9, fmt(rep.ratio));
            table.push(["contact".into(), "0".into(), fmt(rep.lhs), fmt(rep.rhs), fmt(rep.ratio)]);
            worst = worst.min(rep.ratio);
        }
    }
    let mut rng = root.fork(SALT_DECOMP);
    for _ in 0..cfg.samples.min(10_000) {
        let m = n + rng.below(4);
        let wd = random_decomposition(n, m, &mut rng).map_err(|e| Failure::Config(e.to_string()))?;
        cases.push(("random".into(), wd));
    }
    for (k, (kind, mut wd)) in cases.into_iter().enumerate() {
        for w in wd.weights.iter_mut() {
            *w *= 1.0 + cfg.perturb_weights;
        }
        let Some(rep) = attempt(&mut out, &format!("{kind} decomposition {k} valid"), verify_theorem3(&body, &wd))? else {
            continue;
        };
        worst = worst.min(rep.ratio);
        if rep.ratio < 1.0 - 1e-9 {
            out.check(format!("{kind} decomposition {k} rhs/lhs >= 1 - 1e-9"), false, format!("{}", rep.ratio));
        }
        table.push([kind, k.to_string(), fmt(rep.lhs), fmt(rep.rhs), fmt(rep.ratio)]);
    }
    out.check(
        "no violation of the weighted projection inequality",
        worst >= 1.0 - 1e-9,
        format!("smallest rhs/lhs {worst}"),
    );
    let lw = loomis_whitney_check(&body).ok();
    out.results = json!({
        "body": BodyFile::from_polytope(&body),
        "decompositions": table.rows.len(),
        "min_ratio": worst,
        "orthonormal": lw,
    });
    out.table = Some(table);
    Ok(out)
}

pub fn zonotope_cmd(cfg: &Resolved) -> Result<Outcome, Failure> {
    let root = RandomSource::new(cfg.seed);
    let mut rng = root.fork(SALT_ZONO);
    let (n, m) = (cfg.n, cfg.m);
    let mut out = Outcome::default();
    let mut table = Table::new(&["instance", "n", "m", "determinant_volume", "projection_volume", "relative_gap", "lower_bound_ratio"]);
    let (mut worst_gap, mut worst_ratio) = (0.0f64, f64::INFINITY);
    for k in 0..cfg.samples.min(10_000) {
        let gens: Vec<Vec<f64>> = (0..m)
            .map(|_| sample_unit_sphere(n, &mut rng).map(|u: Vec<f64>| scaled(&u, rng.uniform(0.2, 2.0))))
            .collect::<Result<_, _>>()
            .map_err(|e| Failure::Config(e.to_string()))?;
        let z = Zonotope64::new(n, gens).map_err(|e| Failure::Config(e.to_string()))?;
        let Some(rep) = attempt(&mut out, &format!("instance {k} volumes"), z.volume_formula_check())? else {
            continue;
        };
        let wd = random_decomposition(n, m, &mut rng).map_err(|e| Failure::Config(e.to_string()))?;
        let alphas: Vec<f64> = (0..m).map(|_| rng.uniform(0.1, 3.0)).collect();
        let Some(l4) = attempt(&mut out, &format!("instance {k} lower bound"), lemma4_bound(&wd, &alphas))? else {
            continue;
        };
        worst_gap = worst_gap.max(rep.relative_gap);
        worst_ratio = worst_ratio.min(l4.ratio);
        table.push([
            k.to_string(),
            n.to_string(),
            m.to_string(),
            fmt(rep.lhs),
            fmt(rep.rhs),
            fmt(rep.relative_gap),
            fmt(l4.ratio),
        ]);
    }
    out.check("volume routes agree within 1e-9", worst_gap <= 1e-9, format!("largest gap {worst_gap:e}"));
    out.check("volume / lower bound >= 1 - 1e-9", worst_ratio >= 1.0 - 1e-9, format!("smallest ratio {worst_ratio}"));
    if let Some(eq) = attempt(
        &mut out,
        "orthonormal fixture",
        lemma4_bound(&WeightedDirections::<f64>::orthonormal(n), &vec![1.0; n]),
    )? {
        out.check("orthonormal fixture is tight", (eq.ratio - 1.0).abs() <= 1e-9, format!("{}", eq.ratio));
    }
    out.results = json!({
        "instances": table.rows.len(),
        "max_relative_gap": worst_gap,
        "min_lower_bound_ratio": worst_ratio,
    });
    out.table = Some(table);
    Ok(out)
}

pub fn minkowski_cmd(cfg: &Resolved) -> Result<Outcome, Failure> {
    if cfg.tolerance > 1e-3 {
        return Err(Failure::Config(format!("solver tolerance {} above 1e-3", cfg.tolerance)));
    }
    let root = RandomSource::new(cfg.seed);
    let mut rng = root.fork(SALT_FAMILY);
    let (n, m) = (cfg.n, cfg.m);
    let dirs: Vec<Vec<f64>> = (0..m)
        .map(|_| sample_unit_sphere(n, &mut rng))
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::Config(e.to_string()))?;
    let gammas: Vec<f64> = (0..m).map(|_| rng.uniform(0.5, 2.0)).collect();
    let spec = SlabFamily64::new(dirs, gammas).map_err(|e| Failure::Config(e.to_string()))?;
    let mut out = Outcome::default();
    let Some(sol) = attempt(
        &mut out,
        "maximal body found",
        maximize_volume_in_family(&spec, cfg.tolerance, &mut root.fork(SALT_SEARCH)),
    )?
    else {
        return Ok(out);
    };
    out.check("KKT multiplier consistency <= 1e-3", sol.kkt_residual <= 1e-3, format!("{:e}", sol.kkt_residual));
    out.check("multistarts agree on volume within 1e-6", sol.volume_spread <= 1e-6, format!("{:e}", sol.volume_spread));
    out.check("multistarts agree on offsets within 1e-4", sol.offset_spread <= 1e-4, format!("{:e}", sol.offset_spread));
    let identity = attempt(
        &mut out,
        "shadow identity evaluated",
        verify_projection_identity(&sol.body, &spec, cfg.samples, &mut root.fork(SALT_THETA)),
    )?;
    if let Some(id) = &identity {
        out.check(
            "shadow identity relative error <= 1e-3",
            id.max_relative_error <= 1e-3,
            format!("{:e} over {} directions", id.max_relative_error, id.samples),
        );
    }
    let t: Vec<f64> = (0..m).map(|_| rng.uniform(0.7, 1.3)).collect();
    let grad = attempt(&mut out, "finite differences evaluated", gradient_check(&spec, &t, 1e-5))?;
    if let Some(g) = &grad {
        out.check("gradient vs finite difference within 1%", g.max_relative_error <= 1e-2, format!("{:e}", g.max_relative_error));
    }
    let facets = sol.body.slab_facet_measures().unwrap_or_default();
    let mut table = Table::new(&["index", "gamma", "offset", "facet_measure", "direction"]);
    for (i, u) in spec.directions.iter().enumerate() {
        let dir = u.iter().map(|x| fmt(*x)).collect::<Vec<_>>().join(" ");
        table.push([
            i.to_string(),
            fmt(spec.gammas[i]),
            fmt(sol.offsets[i]),
            fmt(facets.get(i).copied().unwrap_or(f64::NAN)),
            dir,
        ]);
    }
    out.results = json!({
        "volume": sol.volume,
        "multiplier": sol.multiplier,
        "n_times_volume": n as f64 * sol.volume,
        "kkt_residual": sol.kkt_residual,
        "gradient_residual": sol.gradient_residual,
        "iterations": sol.iterations,
        "start_volumes": sol.start_volumes,
        "volume_spread": sol.volume_spread,
        "offset_spread": sol.offset_spread,
        "identity_error": identity.map(|i| i.max_relative_error),
        "gradient_error": grad.map(|g| g.max_relative_error),
        "family": spec,
        "body": BodyFile::from_polytope(&sol.body),
    });
    out.table = Some(table);
    Ok(out)
}

pub fn pathological_cmd(cfg: &Resolved) -> Result<Outcome, Failure> {
    if !(2..=MAX_PATHOLOGICAL_DIM).contains(&cfg.n) {
        return Err(Failure::Config(format!("pathological needs 2 <= n <= {MAX_PATHOLOGICAL_DIM}, got {}", cfg.n)));
    }
    let mut out = Outcome::default();
    let mut table = Table::new(&["seed", "n", "delta_hat", "vol_nth_root", "min_shadow", "ratio", "floor"]);
    let mut runs = Vec::new();
    for i in 0..cfg.seeds {
        let seed = cfg.seed.wrapping_add(i as u64);
        let Some(p) = attempt(
            &mut out,
            &format!("seed {seed} constructed"),
            construct_pathological::<f64>(cfg.n, &mut RandomSource::new(seed)),
        )?
        else {
            continue;
        };
        out.check(
            format!("seed {seed}: |K|^(1/n) >= sqrt(2) - 1e-9"),
            p.vol_nth_root >= 2f64.sqrt() - 1e-9,
            fmt(p.vol_nth_root),
        );
        out.check(
            format!("seed {seed}: ratio >= floor - 1e-6"),
            p.ratio >= p.floor - 1e-6,
            format!("{} vs {}", p.ratio, p.floor),
        );
        table.push([
            seed.to_string(),
            cfg.n.to_string(),
            fmt(p.delta_hat),
            fmt(p.vol_nth_root),
            fmt(p.min_shadow),
            fmt(p.ratio),
            fmt(p.floor),
        ]);
        runs.push(json!({
            "seed": seed,
            "delta_hat": p.delta_hat,
            "delta_branch": p.delta_branch,
            "vol_nth_root": p.vol_nth_root,
            "min_shadow": p.min_shadow,
            "ratio": p.ratio,
            "floor": p.floor,
            "kkt_residual": p.kkt_residual,
            "identity_error": p.identity_error,
            "body": BodyFile::from_polytope(&p.body),
        }));
    }
    let mut ratios: Vec<f64> = runs.iter().filter_map(|r| r["ratio"].as_f64()).collect();
    ratios.sort_by(|a, b| a.total_cmp(b));
    let median = match ratios.len() {
        0 => None,
        k if k % 2 == 1 => Some(ratios[k / 2]),
        k => Some(0.5 * (ratios[k / 2 - 1] + ratios[k / 2])),
    };
    out.results = json!({ "n": cfg.n, "median_ratio": median, "runs": runs });
    out.table = Some(table);
    Ok(out)
}

pub fn ball_ratio_cmd(cfg: &Resolved) -> Result<Outcome, Failure> {
    let mut out = Outcome::default();
    let mut table = Table::new(&["n", "ratio"]);
    let mut values = Vec::new();
    for n in 2..=cfg.n_max {
        let v: f64 = ball_shadow_ratio(n).map_err(|e| Failure::Config(e.to_string()))?;
        table.push([n.to_string(), fmt(v)]);
        values.push(v);
    }
    let sqrt_e = std::f64::consts::E.sqrt();
    let two_over_sqrt_pi = 2.0 / std::f64::consts::PI.sqrt();
    out.check("strictly increasing", values.windows(2).all(|w| w[1] > w[0]), "");
    out.check(
        "n = 2 equals 2/sqrt(pi) within 1e-9",
        (values[0] - two_over_sqrt_pi).abs() <= 1e-9,
        fmt(values[0]),
    );
    let last = *values.last().expect("n_max >= 2");
    out.check("below sqrt(e)", values.iter().all(|&v| v < sqrt_e), fmt(last));
    out.results = json!({
        "n_max": cfg.n_max,
        "last": last,
        "sqrt_e": sqrt_e,
        "relative_gap_to_sqrt_e": (sqrt_e - last) / sqrt_e,
    });
    out.table = Some(table);
    Ok(out)
}

pub fn cauchy_cmd(cfg: &Resolved) -> Result<Outcome, Failure> {
    let root = RandomSource::new(cfg.seed);
    let bodies: Vec<(String, Polytope64)> = match &cfg.body {
        Some(path) => vec![(path.display().to_string(), load_body(path)?)],
        None => vec![
            ("square".into(), Polytope64::cube(2).map_err(|e| Failure::Config(e.to_string()))?),
            ("cube".into(), Polytope64::cube(3).map_err(|e| Failure::Config(e.to_string()))?),
        ],
    };
    let mut out = Outcome::default();
    let mut table = Table::new(&["body", "n", "surface_area", "estimate", "standard_error", "relative_error"]);
    let mut rows = Vec::new();
    for (k, (name, body)) in bodies.iter().enumerate() {
        let mut rng = root.fork(SALT_CAUCHY ^ k as u64);
        let Some(s) = attempt(&mut out, &format!("{name} surface area"), body.surface_area())? else {
            continue;
        };
        let Some((est, se)) = attempt(
            &mut out,
            &format!("{name} mean shadow"),
            body.cauchy_surface_estimate(cfg.samples.max(2), &mut rng),
        )?
        else {
            continue;
        };
        let rel = (est - s).abs() / s;
        out.check(format!("{name}: estimate within 1%"), rel <= 1e-2, format!("{est} vs {s}"));
        table.push([name.clone(), body.dim().to_string(), fmt(s), fmt(est), fmt(se), fmt(rel)]);
        rows.push(json!({ "body": name, "surface_area": s, "estimate": est, "standard_error": se }));
    }
    out.results = json!({ "samples": cfg.samples, "bodies": rows });
    out.table = Some(table);
    Ok(out)
}
