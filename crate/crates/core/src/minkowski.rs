//! Volume maximisation over a budgeted slab family, and the random body whose
//! every shadow is large.
//!
//! The family fixed by unit directions `u_i` and weights `γ_i > 0` is
//! `K(t) = {x : |<x, u_i>| <= t_i}` with `Σ γ_i t_i = 1`. Since
//! `t ↦ |K(t)|^{1/n}` is concave on the slice, projected gradient ascent
//! finds the maximiser, and at the maximiser every shadow satisfies
//! `|P_θ K| = (n|K|/2) Σ γ_i |<u_i, θ>|`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::kernel::linalg::{dot, norm, OrthoBasis};
use crate::kernel::random::{sample_unit_sphere, RandomSource};
use crate::polytope::{self, SymmetricHPolytope};
use crate::scalar::Scalar;
use crate::shadow::{
    ball_shadow_ratio, min_shadow_direction, min_support_direction, min_support_direction_sampled, SearchBranch,
};
use crate::zonotope::Zonotope;

/// Lower bound on every `t_i` during the ascent.
pub const T_FLOOR: f64 = 1e-9;
pub const MULTISTARTS: usize = 5;
pub const MAX_ASCENT_ITERATIONS: usize = 20_000;
/// Relative KKT and multistart tolerances reported as failures by the checks.
pub const KKT_TOL: f64 = 1e-3;
pub const IDENTITY_TOL: f64 = 1e-3;
/// Pathological bodies are verified exactly only up to this dimension.
pub const MAX_PATHOLOGICAL_DIM: usize = 6;

const ARMIJO: f64 = 0.5;
const BACKTRACK: f64 = 0.5;
const PARALLEL_TOL: f64 = 1e-12;

/// Directions `u_i` and budget weights `γ_i` of a slab family.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlabFamilySpec<T> {
    pub directions: Vec<Vec<T>>,
    pub gammas: Vec<T>,
}

impl<T: Scalar> SlabFamilySpec<T> {
    pub fn new(directions: Vec<Vec<T>>, gammas: Vec<T>) -> Result<Self> {
        let n = directions.first().map(Vec::len).unwrap_or(0);
        if n == 0 {
            return Err(GeomError::InvalidInput("slab family needs at least one direction".into()));
        }
        if directions.len() != gammas.len() {
            return Err(GeomError::DimensionMismatch {
                expected: directions.len(),
                got: gammas.len(),
            });
        }
        let mut basis = OrthoBasis::new(n);
        for u in &directions {
            polytope::check_unit(u, n)?;
            basis.push(u, T::tol(1e-10));
        }
        if basis.rank() < n {
            return Err(GeomError::Unbounded(n));
        }
        if let Some(g) = gammas.iter().find(|g| !(g.is_finite() && **g > T::zero())) {
            return Err(GeomError::InvalidInput(format!("budget weights must be positive, got {g}")));
        }
        Ok(Self { directions, gammas })
    }

    /// Equal weights `γ_i = 1/m`.
    pub fn uniform(directions: Vec<Vec<T>>) -> Result<Self> {
        let m = directions.len();
        Self::new(directions, vec![T::one() / T::of(m.max(1)); m])
    }

    pub fn dim(&self) -> usize {
        self.directions[0].len()
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    /// `K(t)` for offsets `t`.
    pub fn body(&self, t: &[T]) -> Result<SymmetricHPolytope<T>> {
        SymmetricHPolytope::new(self.directions.clone(), t.to_vec())
    }

    /// `Σ γ_i t_i`
    pub fn budget(&self, t: &[T]) -> T {
        dot(&self.gammas, t)
    }

    /// Groups parallel and antiparallel directions; `groups[k]` lists the
    /// original indices merged into direction `k`, whose weight is their sum.
    fn merged(&self) -> (Self, Vec<Vec<usize>>) {
        let mut dirs: Vec<Vec<T>> = Vec::new();
        let mut gammas: Vec<T> = Vec::new();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (i, u) in self.directions.iter().enumerate() {
            match dirs.iter().position(|v| dot(u, v).abs() >= T::one() - T::tol(PARALLEL_TOL)) {
                Some(k) => {
                    gammas[k] = gammas[k] + self.gammas[i];
                    groups[k].push(i);
                }
                None => {
                    dirs.push(u.clone());
                    gammas.push(self.gammas[i]);
                    groups.push(vec![i]);
                }
            }
        }
        (Self { directions: dirs, gammas }, groups)
    }
}

/// Euclidean projection onto `{t : Σ γ_i t_i = 1, t_i >= floor}`.
fn project_slice<T: Scalar>(y: &[T], gammas: &[T], floor: T) -> Vec<T> {
    let at = |mu: T| -> Vec<T> { y.iter().zip(gammas).map(|(&yi, &g)| (yi - mu * g).max(floor)).collect() };
    let budget = |mu: T| -> T { dot(&at(mu), gammas) };
    let one = T::one();
    let (mut lo, mut hi) = (-one, one);
    while budget(lo) < one {
        lo = lo * T::lit(2.0);
    }
    while budget(hi) > one {
        hi = hi * T::lit(2.0);
    }
    for _ in 0..200 {
        let mid = T::lit(0.5) * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if budget(mid) > one {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // closed form on the free set found by bisection
    let mu = T::lit(0.5) * (lo + hi);
    let free: Vec<bool> = y.iter().zip(gammas).map(|(&yi, &g)| yi - mu * g > floor).collect();
    let (mut num, mut den) = (-one, T::zero());
    for ((&yi, &g), &f) in y.iter().zip(gammas).zip(&free) {
        if f {
            num = num + g * yi;
            den = den + g * g;
        } else {
            num = num + g * floor;
        }
    }
    if den > T::zero() {
        let mu = num / den;
        let t: Vec<T> = y
            .iter()
            .zip(gammas)
            .zip(&free)
            .map(|((&yi, &g), &f)| if f { yi - mu * g } else { floor })
            .collect();
        if t.iter().all(|&x| x >= floor) {
            return t;
        }
    }
    at(mu)
}

struct Evaluation<T: Scalar> {
    log_volume: T,
    volume: T,
    /// `∂ log|K| / ∂t_i = 2 facet_i / |K|`
    gradient: Vec<T>,
    facets: Vec<T>,
}

fn evaluate<T: Scalar>(spec: &SlabFamilySpec<T>, t: &[T]) -> Result<Evaluation<T>> {
    let k = spec.body(t)?;
    let volume = k.volume()?;
    if !(volume > T::zero()) {
        return Err(GeomError::Numerical(format!("degenerate body with volume {volume}")));
    }
    let facets = k.slab_facet_measures()?;
    let two = T::lit(2.0);
    Ok(Evaluation {
        log_volume: volume.ln(),
        volume,
        gradient: facets.iter().map(|&f| two * f / volume).collect(),
        facets,
    })
}

/// `‖P(t + g) - t‖`, the stationarity measure of the ascent on `log|K|`.
fn gradient_residual<T: Scalar>(t: &[T], g: &[T], gammas: &[T], floor: T) -> T {
    let y: Vec<T> = t.iter().zip(g).map(|(&a, &b)| a + b).collect();
    let p = project_slice(&y, gammas, floor);
    norm(&p.iter().zip(t).map(|(&a, &b)| a - b).collect::<Vec<_>>())
}

struct Ascent<T> {
    t: Vec<T>,
    volume: T,
    residual: T,
    iterations: usize,
}

/// Projected gradient ascent on `log|K(t)|` from `t0` (already feasible).
fn ascend<T: Scalar>(spec: &SlabFamilySpec<T>, t0: Vec<T>, tol: T) -> Result<Ascent<T>> {
    let floor = T::lit(T_FLOOR);
    let mut t = t0;
    let mut cur = evaluate(spec, &t)?;
    let mut residual = gradient_residual(&t, &cur.gradient, &spec.gammas, floor);
    let mut step = T::one();
    let mut prev: Option<(Vec<T>, Vec<T>)> = None;
    for it in 0..MAX_ASCENT_ITERATIONS {
        if residual <= tol {
            return Ok(Ascent {
                t,
                volume: cur.volume,
                residual,
                iterations: it,
            });
        }
        // Barzilai-Borwein guess from the last accepted move
        if let Some((pt, pg)) = &prev {
            let s: Vec<T> = t.iter().zip(pt).map(|(&a, &b)| a - b).collect();
            let y: Vec<T> = cur.gradient.iter().zip(pg).map(|(&a, &b)| a - b).collect();
            let sy = dot(&s, &y);
            if sy < T::zero() {
                step = (dot(&s, &s) / -sy).min(T::lit(1e6));
            }
        }
        let noise = T::tol(1e-13) * cur.log_volume.abs().max(T::one());
        let mut accepted = None;
        let mut trial_step = step;
        for _ in 0..60 {
            let y: Vec<T> = t.iter().zip(&cur.gradient).map(|(&a, &b)| a + trial_step * b).collect();
            let cand = project_slice(&y, &spec.gammas, floor);
            let d: Vec<T> = cand.iter().zip(&t).map(|(&a, &b)| a - b).collect();
            let gain = dot(&cur.gradient, &d);
            if let Ok(e) = evaluate(spec, &cand) {
                if e.log_volume >= cur.log_volume + T::lit(ARMIJO) * gain - noise {
                    accepted = Some((cand, e));
                    break;
                }
            }
            trial_step = trial_step * T::lit(BACKTRACK);
        }
        let Some((cand, e)) = accepted else {
            break;
        };
        step = trial_step;
        prev = Some((std::mem::replace(&mut t, cand), std::mem::take(&mut cur.gradient)));
        cur = e;
        residual = gradient_residual(&t, &cur.gradient, &spec.gammas, floor);
    }
    Err(GeomError::NotConverged {
        iterations: MAX_ASCENT_ITERATIONS,
        residual: residual.to_f64_lossy(),
        best: t.iter().map(|x| x.to_f64_lossy()).collect(),
    })
}

/// Maximal-volume member of a slab family.
#[derive(Clone, Debug, Serialize)]
pub struct FamilySolution<T: Scalar> {
    pub body: SymmetricHPolytope<T>,
    /// Optimal offsets, one per input direction.
    pub offsets: Vec<T>,
    pub volume: T,
    /// Common multiplier `λ` fitted to `2 facet_i = λ γ_i`; `n|K|` in theory.
    pub multiplier: T,
    /// Largest `|2 facet_i - λ γ_i| / (λ γ_i)` over directions above the floor,
    /// with parallel directions merged.
    pub kkt_residual: T,
    pub gradient_residual: T,
    pub iterations: usize,
    pub start_volumes: Vec<T>,
    /// Largest relative volume difference between multistarts.
    pub volume_spread: T,
    /// Largest offset difference between multistarts.
    pub offset_spread: T,
}

/// Maximises `|K(t)|` over `Σ γ_i t_i = 1`, `t_i >= T_FLOOR`.
///
/// Stops when `‖P(t + ∇log|K|) - t‖ <= tol`. Five starts run in parallel: the
/// equal-offset body and four random feasible points drawn from `rng`. They
/// must agree on the volume within `10·tol` relative.
pub fn maximize_volume_in_family<T: Scalar>(
    spec: &SlabFamilySpec<T>,
    tol: T,
    rng: &mut RandomSource,
) -> Result<FamilySolution<T>> {
    if !(tol >= T::lit(1e-10) && tol <= T::lit(1e-3)) {
        return Err(GeomError::InvalidInput(format!("tolerance must lie in [1e-10, 1e-3], got {tol}")));
    }
    let spec = SlabFamilySpec::new(spec.directions.clone(), spec.gammas.clone())?;
    let n = spec.dim();
    if n > polytope::MAX_DIM {
        return Err(GeomError::Capacity {
            what: "dimension of slab family",
            limit: polytope::MAX_DIM,
            got: n,
        });
    }
    let (merged, groups) = spec.merged();
    if merged.len() > polytope::MAX_SLABS {
        return Err(GeomError::Capacity {
            what: "distinct directions in slab family",
            limit: polytope::MAX_SLABS,
            got: merged.len(),
        });
    }
    let k = merged.len();
    let total: T = merged.gammas.iter().copied().sum();
    let mut starts = vec![vec![T::one() / total; k]];
    for _ in 1..MULTISTARTS {
        let w: Vec<T> = (0..k).map(|_| T::lit(rng.uniform(0.5, 1.5))).collect();
        let b = merged.budget(&w);
        starts.push(w.iter().map(|&x| x / b).collect());
    }
    let runs: Vec<Result<Ascent<T>>> = starts.into_par_iter().map(|t0| ascend(&merged, t0, tol)).collect();
    let runs: Vec<Ascent<T>> = runs.into_iter().collect::<Result<_>>()?;

    let best = runs
        .iter()
        .max_by(|a, b| a.volume.partial_cmp(&b.volume).unwrap_or(std::cmp::Ordering::Equal))
        .expect("at least one start");
    let mut volume_spread = T::zero();
    let mut offset_spread = T::zero();
    for r in &runs {
        volume_spread = volume_spread.max((best.volume - r.volume).abs() / best.volume);
        for (a, b) in r.t.iter().zip(&best.t) {
            offset_spread = offset_spread.max((*a - *b).abs());
        }
    }
    if volume_spread > T::lit(10.0) * tol.max(T::epsilon()) {
        return Err(GeomError::Numerical(format!(
            "multistarts disagree on the maximal volume (relative spread {volume_spread})"
        )));
    }

    let eval = evaluate(&merged, &best.t)?;
    let floor = T::lit(T_FLOOR);
    let two = T::lit(2.0);
    let (mut num, mut den) = (T::zero(), T::zero());
    for ((&f, &g), &t) in eval.facets.iter().zip(&merged.gammas).zip(&best.t) {
        if t > floor {
            num = num + two * f * g;
            den = den + g * g;
        }
    }
    let multiplier = num / den;
    let mut kkt = T::zero();
    for ((&f, &g), &t) in eval.facets.iter().zip(&merged.gammas).zip(&best.t) {
        if t > floor {
            kkt = kkt.max((two * f - multiplier * g).abs() / (multiplier * g));
        }
    }

    let mut offsets = vec![T::zero(); spec.len()];
    for (group, &t) in groups.iter().zip(&best.t) {
        for &i in group {
            offsets[i] = t;
        }
    }
    Ok(FamilySolution {
        body: spec.body(&offsets)?,
        offsets,
        volume: best.volume,
        multiplier,
        kkt_residual: kkt,
        gradient_residual: best.residual,
        iterations: runs.iter().map(|r| r.iterations).max().unwrap_or(0),
        start_volumes: runs.iter().map(|r| r.volume).collect(),
        volume_spread,
        offset_spread,
    })
}

/// Right-hand side of the shadow identity: `(n|K|/2) Σ γ_i |<u_i, θ>|`.
pub fn identity_rhs<T: Scalar>(volume: T, spec: &SlabFamilySpec<T>, theta: &[T]) -> T {
    let n = T::of(spec.dim());
    let s: T = spec
        .directions
        .iter()
        .zip(&spec.gammas)
        .map(|(u, &g)| g * dot(u, theta).abs())
        .sum();
    n * volume / T::lit(2.0) * s
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport<T> {
    pub samples: usize,
    pub max_relative_error: T,
    pub worst_direction: Vec<T>,
}

/// Largest relative gap between `|P_θ K|` and [`identity_rhs`] over sampled θ.
pub fn verify_projection_identity<T: Scalar>(
    k: &SymmetricHPolytope<T>,
    spec: &SlabFamilySpec<T>,
    samples: usize,
    rng: &mut RandomSource,
) -> Result<IdentityReport<T>> {
    if k.dim() != spec.dim() {
        return Err(GeomError::DimensionMismatch {
            expected: spec.dim(),
            got: k.dim(),
        });
    }
    let volume = k.volume()?;
    let mut worst = T::zero();
    let mut worst_direction = Vec::new();
    for _ in 0..samples {
        let theta: Vec<T> = sample_unit_sphere(k.dim(), rng)?;
        let lhs = k.shadow_unchecked(&theta)?;
        let err = (lhs - identity_rhs(volume, spec, &theta)).abs() / lhs;
        if err > worst || worst_direction.is_empty() {
            worst = err;
            worst_direction = theta;
        }
    }
    Ok(IdentityReport {
        samples,
        max_relative_error: worst,
        worst_direction,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GradientCheck<T> {
    /// `2 facet_i`
    pub analytic: Vec<T>,
    /// `(|K(t + h e_i)| - |K(t)|) / h`
    pub numeric: Vec<T>,
    pub max_relative_error: T,
}

/// Compares `∂|K|/∂t_i = 2 facet_i` with forward differences of step `h`.
pub fn gradient_check<T: Scalar>(spec: &SlabFamilySpec<T>, t: &[T], h: T) -> Result<GradientCheck<T>> {
    let base = spec.body(t)?;
    let v0 = base.volume()?;
    let two = T::lit(2.0);
    let analytic: Vec<T> = base.slab_facet_measures()?.iter().map(|&f| two * f).collect();
    let numeric: Vec<T> = (0..t.len())
        .into_par_iter()
        .map(|i| {
            let mut tp = t.to_vec();
            tp[i] = tp[i] + h;
            Ok((spec.body(&tp)?.volume()? - v0) / h)
        })
        .collect::<Result<_>>()?;
    let scale = analytic.iter().fold(T::zero(), |a, &b| a.max(b.abs()));
    let mut worst = T::zero();
    for (a, d) in analytic.iter().zip(&numeric) {
        worst = worst.max((*a - *d).abs() / a.abs().max(T::tol(1e-6) * scale));
    }
    Ok(GradientCheck {
        analytic,
        numeric,
        max_relative_error: worst,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DeltaEstimate<T> {
    /// `min_{|x| = 1} Σ |<x, u_i>|`
    pub min_value: T,
    pub direction: Vec<T>,
    /// `min_value / √n`
    pub delta_hat: T,
    pub branch: SearchBranch,
}

fn delta_from<T: Scalar>(directions: &[Vec<T>], rng: &mut RandomSource, sampled: bool) -> Result<DeltaEstimate<T>> {
    let n = directions
        .first()
        .map(Vec::len)
        .ok_or_else(|| GeomError::InvalidInput("no directions".into()))?;
    let z = Zonotope::new(n, directions.to_vec())?;
    let min = if sampled {
        min_support_direction_sampled(&z, rng)?
    } else {
        min_support_direction(&z, rng)?
    };
    Ok(DeltaEstimate {
        min_value: min.value,
        delta_hat: min.value / T::of(n).sqrt(),
        direction: min.direction,
        branch: min.branch,
    })
}

/// `δ̂ = min_{|x| = 1} Σ|<x, u_i>| / √n`, exact for at most 16 directions.
pub fn lemma7_delta<T: Scalar>(directions: &[Vec<T>], rng: &mut RandomSource) -> Result<DeltaEstimate<T>> {
    delta_from(directions, rng, false)
}

/// [`lemma7_delta`] through the sampling branch only.
pub fn sampled_delta<T: Scalar>(directions: &[Vec<T>], rng: &mut RandomSource) -> Result<DeltaEstimate<T>> {
    delta_from(directions, rng, true)
}

#[derive(Clone, Debug, Serialize)]
pub struct VolumeBoundReport<T> {
    /// `|{x : |<x, u_i>| <= 1}|^{1/n}`
    pub vol_nth_root: T,
    /// `2 √(n/m)`
    pub bound: T,
    pub holds: bool,
}

/// Volume of the intersection of unit slabs against `2√(n/m)`.
pub fn lemma8_check<T: Scalar>(directions: &[Vec<T>]) -> Result<VolumeBoundReport<T>> {
    let m = directions.len();
    let c = SymmetricHPolytope::new(directions.to_vec(), vec![T::one(); m])?;
    let n = c.dim();
    let vol_nth_root = c.volume()?.powf(T::one() / T::of(n));
    let bound = T::lit(2.0) * (T::of(n) / T::of(m)).sqrt();
    Ok(VolumeBoundReport {
        vol_nth_root,
        bound,
        holds: vol_nth_root >= bound - T::lit(1e-9),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PathologicalReport<T: Scalar> {
    pub n: usize,
    pub body: SymmetricHPolytope<T>,
    pub gammas: Vec<T>,
    pub delta_hat: T,
    pub delta_branch: SearchBranch,
    /// `|K|^{1/n}`
    pub vol_nth_root: T,
    pub min_shadow: T,
    pub min_direction: Vec<T>,
    /// `min_shadow / |K|^{(n-1)/n}`
    pub ratio: T,
    /// `δ̂ n² / m^{3/2}`, which is `δ̂ √n / (2√2)` for `m = 2n`.
    pub floor: T,
    pub kkt_residual: T,
    pub identity_error: T,
}

/// Solver tolerance used for the pathological bodies.
pub const PATHOLOGICAL_TOL: f64 = 1e-9;
/// Directions sampled when checking the shadow identity of a pathological body.
pub const IDENTITY_SAMPLES: usize = 1000;

/// The maximal body of the family with `m = 2n` uniform random directions
/// and `γ_i = 1/(2n)`.
pub fn construct_pathological<T: Scalar>(n: usize, rng: &mut RandomSource) -> Result<PathologicalReport<T>> {
    if !(2..=MAX_PATHOLOGICAL_DIM).contains(&n) {
        return Err(GeomError::InvalidInput(format!(
            "pathological construction needs 2 <= n <= {MAX_PATHOLOGICAL_DIM}, got {n}"
        )));
    }
    let mut dirs_rng = rng.fork(0x6469_7273);
    let directions = loop {
        let d: Vec<Vec<T>> = (0..2 * n)
            .map(|_| sample_unit_sphere(n, &mut dirs_rng))
            .collect::<Result<_>>()?;
        let mut b = OrthoBasis::new(n);
        d.iter().for_each(|u| {
            b.push(u, T::tol(1e-10));
        });
        if b.rank() == n {
            break d;
        }
    };
    pathological_from_directions(directions, rng)
}

/// [`construct_pathological`] for given directions (any count `m`,
/// weights `1/m`). A ratio below the floor or a volume below `√2` for
/// `m = 2n` is an error: both follow from exact inequalities.
pub fn pathological_from_directions<T: Scalar>(
    directions: Vec<Vec<T>>,
    rng: &mut RandomSource,
) -> Result<PathologicalReport<T>> {
    let spec = SlabFamilySpec::uniform(directions)?;
    let n = spec.dim();
    let m = spec.len();
    let sol = maximize_volume_in_family(&spec, T::lit(PATHOLOGICAL_TOL), &mut rng.fork(0x736f_6c76))?;
    let delta = lemma7_delta(&spec.directions, &mut rng.fork(0x6465_6c74))?;
    let nf = T::of(n);
    let vol_nth_root = sol.volume.powf(T::one() / nf);
    let min = min_shadow_direction(&sol.body, &mut rng.fork(0x6d69_6e73))?;
    let ratio = min.value / sol.volume.powf((nf - T::one()) / nf);
    let two = T::lit(2.0);
    let floor = delta.delta_hat * nf * nf / T::of(m).powf(T::lit(1.5));
    let identity = verify_projection_identity(&sol.body, &spec, IDENTITY_SAMPLES, &mut rng.fork(0x6964_656e))?;

    let unit_slab_bound = two * (nf / T::of(m)).sqrt();
    if vol_nth_root < unit_slab_bound - T::lit(1e-9) {
        return Err(GeomError::Numerical(format!(
            "maximal volume root {vol_nth_root} below the unit-slab bound {unit_slab_bound}"
        )));
    }
    if ratio < floor - T::lit(1e-6) {
        return Err(GeomError::Numerical(format!("shadow ratio {ratio} below the floor {floor}")));
    }
    Ok(PathologicalReport {
        n,
        body: sol.body,
        gammas: spec.gammas,
        delta_hat: delta.delta_hat,
        delta_branch: delta.branch,
        vol_nth_root,
        min_shadow: min.value,
        min_direction: min.direction,
        ratio,
        floor,
        kkt_residual: sol.kkt_residual,
        identity_error: identity.max_relative_error,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ShephardReport<T> {
    pub n: usize,
    pub volume: T,
    pub min_shadow: T,
    /// Shadow of the Euclidean ball with the same volume.
    pub ball_shadow: T,
    /// `min_shadow / ball_shadow`
    pub ratio: T,
    pub ball_shadow_ratio: T,
    /// `(3/2)√n`, the factor in the volume comparison for shadow-dominated bodies.
    pub chain_factor: T,
    /// `|ball_shadow - ball_shadow_ratio · |K|^{(n-1)/n}| / ball_shadow`
    pub consistency: T,
}

/// Minimal shadow of `K` against the shadow of the ball of equal volume.
pub fn shephard_compare<T: Scalar>(k: &SymmetricHPolytope<T>, rng: &mut RandomSource) -> Result<ShephardReport<T>> {
    let n = k.dim();
    let nf = T::of(n);
    let volume = k.volume()?;
    let min = min_shadow_direction(k, rng)?;
    let ln_vn = T::lit(crate::kernel::ball::ln_unit_ball_volume(n));
    let ln_vn1 = T::lit(crate::kernel::ball::ln_unit_ball_volume(n - 1));
    let r = ((volume.ln() - ln_vn) / nf).exp();
    let ball_shadow = (ln_vn1 + (nf - T::one()) * r.ln()).exp();
    let bsr: T = ball_shadow_ratio(n)?;
    let expected = bsr * volume.powf((nf - T::one()) / nf);
    Ok(ShephardReport {
        n,
        volume,
        min_shadow: min.value,
        ball_shadow,
        ratio: min.value / ball_shadow,
        ball_shadow_ratio: bsr,
        chain_factor: T::lit(1.5) * nf.sqrt(),
        consistency: (ball_shadow - expected).abs() / ball_shadow,
    })
}

/// [`shephard_compare`] on a freshly constructed pathological body.
pub fn shephard_demonstration<T: Scalar>(n: usize, rng: &mut RandomSource) -> Result<ShephardReport<T>> {
    let p: PathologicalReport<T> = construct_pathological(n, rng)?;
    shephard_compare(&p.body, &mut rng.fork(0x7368_6570))
}
