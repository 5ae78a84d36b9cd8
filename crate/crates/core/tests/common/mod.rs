#![allow(dead_code)]

use groupoid_logic::{
    cyclic_group, disjoint_union_all, pair_groupoid, unit_groupoid, Complex64, FiniteGroupoid, GroupoidFunction,
};
use rand::Rng;

pub fn pair(n: usize) -> FiniteGroupoid {
    pair_groupoid(n).unwrap()
}

pub fn units(n: usize) -> FiniteGroupoid {
    unit_groupoid(n).unwrap()
}

pub fn z(k: usize) -> FiniteGroupoid {
    cyclic_group(k).unwrap()
}

pub fn union(parts: &[FiniteGroupoid]) -> FiniteGroupoid {
    let refs: Vec<&FiniteGroupoid> = parts.iter().collect();
    disjoint_union_all(&refs).unwrap()
}

/// Groupoids with at most six objects.
pub fn small_fixtures() -> Vec<(String, FiniteGroupoid)> {
    let mut out = Vec::new();
    for n in 1..=6 {
        out.push((format!("units:{n}"), units(n)));
        out.push((format!("pair:{n}"), pair(n)));
    }
    out.push(("group:z:2".into(), z(2)));
    out.push(("group:z:3".into(), z(3)));
    out.push(("pair:2+pair:2".into(), union(&[pair(2), pair(2)])));
    out.push(("pair:3+group:z:2".into(), union(&[pair(3), z(2)])));
    out.push(("units:2+pair:3".into(), union(&[units(2), pair(3)])));
    out.push(("group:z:2+group:z:3".into(), union(&[z(2), z(3)])));
    out.push(("pair:2+group:z:3+units:1".into(), union(&[pair(2), z(3), units(1)])));
    out
}

/// Everything in `small_fixtures` plus larger ones up to 64 morphisms.
pub fn fixtures_to_64() -> Vec<(String, FiniteGroupoid)> {
    let mut out = small_fixtures();
    out.push(("pair:7".into(), pair(7)));
    out.push(("pair:8".into(), pair(8)));
    out.push(("pair:4+pair:4".into(), union(&[pair(4), pair(4)])));
    out.push(("group:z:8+pair:5".into(), union(&[z(8), pair(5)])));
    out
}

/// A random probability vector with entries bounded away from zero.
pub fn random_lambda<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|v| v / total).collect()
}

/// A random probability vector where a random nonempty proper subset of entries is zero.
pub fn random_lambda_with_zeros<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut lambda = random_lambda(rng, n);
    if n > 1 {
        let zeros = rng.random_range(1..n);
        for _ in 0..zeros {
            let j = rng.random_range(0..n);
            lambda[j] = 0.0;
        }
        if lambda.iter().all(|&v| v == 0.0) {
            lambda[0] = 1.0;
        }
        let total: f64 = lambda.iter().sum();
        lambda.iter_mut().for_each(|v| *v /= total);
    }
    lambda
}

pub fn random_function<R: Rng>(rng: &mut R, g: &FiniteGroupoid) -> GroupoidFunction {
    let coeffs = (0..g.num_morphisms())
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    GroupoidFunction::from_coeffs(g, coeffs).unwrap()
}

/// Coefficients in (1/8)ℤ with small numerators, so dyadic arithmetic stays exact.
pub fn random_dyadic_function<R: Rng>(rng: &mut R, g: &FiniteGroupoid) -> GroupoidFunction {
    let coeffs = (0..g.num_morphisms())
        .map(|_| {
            Complex64::new(rng.random_range(-8i32..=8) as f64 / 8.0, rng.random_range(-8i32..=8) as f64 / 8.0)
        })
        .collect();
    GroupoidFunction::from_coeffs(g, coeffs).unwrap()
}

pub fn random_potential<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)).collect()
}
