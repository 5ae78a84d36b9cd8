//! Deterministic inputs shared by the benchmarks.

use groupoid_logic::{normalized_haar, pair_groupoid, Complex64, GroupoidFunction, MeasuredGroupoid, MorphismSet};

/// Pair groupoid on `n` objects with a non-uniform λ.
pub fn measured_pair(n: usize) -> MeasuredGroupoid {
    let total = (n * (n + 1) / 2) as f64;
    let lambda = (1..=n).map(|k| k as f64 / total).collect();
    normalized_haar(pair_groupoid(n).unwrap(), lambda).unwrap()
}

/// A dense function with coefficients that are cheap to reproduce.
pub fn dense_function(mg: &MeasuredGroupoid, seed: u64) -> GroupoidFunction {
    let g = mg.groupoid();
    let coeffs = g
        .morphisms()
        .map(|m| {
            let k = (m.0 as u64).wrapping_mul(2654435761).wrapping_add(seed) % 1000;
            Complex64::new(k as f64 / 1000.0, (999 - k) as f64 / 1000.0)
        })
        .collect();
    GroupoidFunction::from_coeffs(g, coeffs).unwrap()
}

/// Every `stride`-th morphism.
pub fn sparse_set(mg: &MeasuredGroupoid, stride: usize, offset: usize) -> MorphismSet {
    let g = mg.groupoid();
    MorphismSet::from_ids(g, g.morphisms().filter(|m| (m.0 as usize + offset) % stride == 0))
}
