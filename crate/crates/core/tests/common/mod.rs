#![allow(dead_code)]

use shadow_geom::kernel::linalg::{norm, pd_inv_sqrt, scaled};
use shadow_geom::kernel::{sample_unit_sphere, RandomSource};
use shadow_geom::{Mat, SymmetricHPolytope, WeightedDirections, Zonotope};

pub fn random_body(n: usize, m: usize, rng: &mut RandomSource) -> SymmetricHPolytope<f64> {
    loop {
        let dirs: Vec<Vec<f64>> = (0..m).map(|_| sample_unit_sphere(n, rng).unwrap()).collect();
        let offsets: Vec<f64> = (0..m).map(|_| rng.uniform(0.5, 1.5)).collect();
        if let Ok(p) = SymmetricHPolytope::new(dirs, offsets) {
            return p;
        }
    }
}

pub fn random_zonotope(n: usize, m: usize, rng: &mut RandomSource) -> Zonotope<f64> {
    loop {
        let gens: Vec<Vec<f64>> = (0..m)
            .map(|_| {
                let u: Vec<f64> = sample_unit_sphere(n, rng).unwrap();
                scaled(&u, rng.uniform(0.2, 2.0))
            })
            .collect();
        let z = Zonotope::new(n, gens).unwrap();
        if z.spans() {
            return z;
        }
    }
}

/// `u_i = S^{-1/2} v_i / |S^{-1/2} v_i|`, `c_i = |S^{-1/2} v_i|²` for random
/// `v_i` and `S = Σ v_i v_iᵀ`.
pub fn random_decomposition(n: usize, m: usize, rng: &mut RandomSource) -> WeightedDirections<f64> {
    let vs: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..n).map(|_| rng.normal()).collect())
        .collect();
    let mut s = Mat::zeros(n);
    for v in &vs {
        s.add_outer(1.0, v);
    }
    let a = pd_inv_sqrt(&s).unwrap();
    let mut dirs = Vec::new();
    let mut weights = Vec::new();
    for v in &vs {
        let y = a.mul_vec(v);
        let r = norm(&y);
        dirs.push(scaled(&y, 1.0 / r));
        weights.push(r * r);
    }
    WeightedDirections::new(dirs, weights).unwrap()
}

pub fn random_rotation(n: usize, rng: &mut RandomSource) -> Mat<f64> {
    let mut b = shadow_geom::kernel::OrthoBasis::new(n);
    while b.rank() < n {
        let v: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
        b.push(&v, 1e-6);
    }
    Mat::from_rows(&b.vectors).unwrap()
}
