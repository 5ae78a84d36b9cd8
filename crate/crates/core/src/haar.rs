//! Measures on a finite groupoid: an object measure λ, a left Haar system
//! {ν^j}, the disintegrated measure μ, the modular function δ and the
//! inversion-invariant representative Λ.
//!
//! A left Haar system is stored as one positive weight per morphism,
//! `fiber_weight(γ) = ν^{t(γ)}({γ})`. Left invariance holds exactly when the
//! weight depends only on the source of γ.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groupoid::{FiniteGroupoid, MorphismId, ObjectId};
use crate::subsets::MorphismSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HaarKind {
    /// Every fiber weight is 1.
    Counting,
    /// Fiber measures are probability measures on the λ-support.
    Normalized,
    Custom,
}

#[derive(Debug, Clone)]
pub struct MeasuredGroupoid {
    groupoid: FiniteGroupoid,
    lambda: Vec<f64>,
    fiber_weight: Vec<f64>,
    kind: HaarKind,
    mu: Vec<f64>,
    invariant: Vec<f64>,
    modular: ModularFunction,
}

fn check_lambda(g: &FiniteGroupoid, lambda: &[f64]) -> Result<()> {
    if lambda.len() != g.num_objects() {
        return Err(Error::Domain(format!(
            "λ has {} entries for {} objects",
            lambda.len(),
            g.num_objects()
        )));
    }
    if let Some((j, v)) = lambda.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
        return Err(Error::Domain(format!("λ({}) = {v} is negative or not finite", g.object_label(ObjectId(j)))));
    }
    if !lambda.iter().any(|&v| v > 0.0) {
        return Err(Error::Domain("λ vanishes everywhere".into()));
    }
    Ok(())
}

/// First `(α, γ)` with `weight(α∘γ) ≠ weight(γ)`, scanning all composable pairs.
pub fn left_invariance_witness(g: &FiniteGroupoid, weight: &[f64]) -> Option<(MorphismId, MorphismId)> {
    for alpha in g.morphisms() {
        for &gamma in g.with_target(g.source(alpha)) {
            if let Some(c) = g.compose(alpha, gamma) {
                if weight[c.0] != weight[gamma.0] {
                    return Some((alpha, gamma));
                }
            }
        }
    }
    None
}

/// Whether `weight` is constant on every source fiber G_m.
pub fn factors_through_source(g: &FiniteGroupoid, weight: &[f64]) -> bool {
    g.objects().all(|m| {
        let fiber = g.with_source(m);
        fiber.iter().all(|&x| weight[x.0] == weight[fiber[0].0])
    })
}

impl MeasuredGroupoid {
    fn assemble(groupoid: FiniteGroupoid, lambda: Vec<f64>, fiber_weight: Vec<f64>, kind: HaarKind) -> Self {
        let mu: Vec<f64> = groupoid
            .morphisms()
            .map(|m| lambda[groupoid.target(m).0] * fiber_weight[m.0])
            .collect();
        // mu[g] * mu[inv] is commutative in IEEE arithmetic, so Λ(γ) = Λ(γ⁻¹) bitwise
        let invariant = groupoid
            .morphisms()
            .map(|m| (mu[m.0] * mu[groupoid.inverse(m).0]).sqrt())
            .collect();
        let modular = ModularFunction::compute(&groupoid, &mu);
        MeasuredGroupoid { groupoid, lambda, fiber_weight, kind, mu, invariant, modular }
    }

    pub fn groupoid(&self) -> &FiniteGroupoid {
        &self.groupoid
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn kind(&self) -> HaarKind {
        self.kind
    }

    #[inline]
    pub fn fiber_weight(&self, m: MorphismId) -> f64 {
        self.fiber_weight[m.0]
    }

    pub fn fiber_weights(&self) -> &[f64] {
        &self.fiber_weight
    }

    /// μ({γ}) = λ(t(γ))·ν^{t(γ)}({γ}).
    #[inline]
    pub fn mu(&self, m: MorphismId) -> f64 {
        self.mu[m.0]
    }

    pub fn mu_values(&self) -> &[f64] {
        &self.mu
    }

    /// μ(A), summed in morphism index order.
    pub fn measure(&self, set: &MorphismSet) -> f64 {
        set.iter().fold(0.0, |acc, m| acc + self.mu[m.0])
    }

    /// Σ_j λ(j)·ν^j(A ∩ G^j), evaluated fiber by fiber.
    pub fn disintegrated_measure(&self, set: &MorphismSet) -> f64 {
        self.groupoid
            .objects()
            .map(|j| {
                let nu = self
                    .groupoid
                    .with_target(j)
                    .iter()
                    .filter(|&&m| set.contains(m))
                    .fold(0.0, |acc, &m| acc + self.fiber_weight[m.0]);
                self.lambda[j.0] * nu
            })
            .fold(0.0, |acc, v| acc + v)
    }

    /// ν^j(G^j).
    pub fn fiber_mass(&self, j: ObjectId) -> f64 {
        self.groupoid.with_target(j).iter().map(|&m| self.fiber_weight[m.0]).sum()
    }

    /// Λ(γ) = sqrt(μ(γ)·μ(γ⁻¹)).
    #[inline]
    pub fn invariant(&self, m: MorphismId) -> f64 {
        self.invariant[m.0]
    }

    pub fn modular(&self) -> &ModularFunction {
        &self.modular
    }

    pub fn lambda_is_positive(&self) -> bool {
        self.lambda.iter().all(|&v| v > 0.0)
    }

    /// Restriction to the full sub-groupoid over `{ j : λ(j) > 0 }`.
    ///
    /// Returns `None` when λ is already positive everywhere. Fiber weights are
    /// inherited, so the Haar kind carries over.
    pub fn restrict_to_support(&self) -> Result<Option<SupportRestriction>> {
        if self.lambda_is_positive() {
            return Ok(None);
        }
        let objects: Vec<ObjectId> = self.groupoid.objects().filter(|j| self.lambda[j.0] > 0.0).collect();
        let (sub, morphism_map) = self.groupoid.full_subgroupoid(&objects)?;
        let lambda = objects.iter().map(|j| self.lambda[j.0]).collect();
        let weights = morphism_map.iter().map(|m| self.fiber_weight[m.0]).collect();
        Ok(Some(SupportRestriction {
            measured: MeasuredGroupoid::assemble(sub, lambda, weights, self.kind),
            object_map: objects,
            morphism_map,
        }))
    }
}

/// A measured groupoid restricted to the objects of positive λ.
#[derive(Debug, Clone)]
pub struct SupportRestriction {
    pub measured: MeasuredGroupoid,
    /// New object index → original object.
    pub object_map: Vec<ObjectId>,
    /// New morphism index → original morphism.
    pub morphism_map: Vec<MorphismId>,
}

/// Counting Haar system: every fiber weight is 1, so μ(γ) = λ(t(γ)).
pub fn counting_haar(g: FiniteGroupoid, lambda: Vec<f64>) -> Result<MeasuredGroupoid> {
    check_lambda(&g, &lambda)?;
    let weights = vec![1.0; g.num_morphisms()];
    Ok(MeasuredGroupoid::assemble(g, lambda, weights, HaarKind::Counting))
}

/// Normalized Haar system adapted to λ.
///
/// The weight depends on the source `m` only:
/// `c(m) = λ(m) / (|G_m^m| · λ(orbit(m)))`, which makes every ν^j a
/// probability measure on the λ-support and μ inversion-invariant. When λ is
/// constant on an orbit this is exactly `1/|G^m|`; objects with λ(m) = 0 get
/// the weight `1/|G^m|` so that weights stay positive.
pub fn normalized_haar(g: FiniteGroupoid, lambda: Vec<f64>) -> Result<MeasuredGroupoid> {
    check_lambda(&g, &lambda)?;
    let orbit_ids = g.orbit_ids();
    let orbits = g.orbits();
    let orbit_mass: Vec<f64> = orbits.iter().map(|o| o.iter().map(|j| lambda[j.0]).sum()).collect();
    let orbit_constant: Vec<bool> = orbits
        .iter()
        .map(|o| o.iter().all(|j| lambda[j.0] == lambda[o[0].0]))
        .collect();

    let per_source: Vec<f64> = g
        .objects()
        .map(|m| {
            let fiber_size = g.with_target(m).len() as f64;
            let o = orbit_ids[m.0];
            if lambda[m.0] == 0.0 || orbit_constant[o] {
                1.0 / fiber_size
            } else {
                let isotropy = g.with_source(m).iter().filter(|&&x| g.target(x) == m).count() as f64;
                lambda[m.0] / (isotropy * orbit_mass[o])
            }
        })
        .collect();
    let weights = g.morphisms().map(|x| per_source[g.source(x).0]).collect();
    Ok(MeasuredGroupoid::assemble(g, lambda, weights, HaarKind::Normalized))
}

/// A user-supplied Haar system; rejected unless weights are positive and left invariant.
pub fn custom_haar(g: FiniteGroupoid, lambda: Vec<f64>, fiber_weight: Vec<f64>) -> Result<MeasuredGroupoid> {
    check_lambda(&g, &lambda)?;
    if fiber_weight.len() != g.num_morphisms() {
        return Err(Error::Domain(format!(
            "{} fiber weights for {} morphisms",
            fiber_weight.len(),
            g.num_morphisms()
        )));
    }
    if let Some((m, w)) = fiber_weight.iter().enumerate().find(|(_, w)| !w.is_finite() || **w <= 0.0) {
        return Err(Error::Domain(format!(
            "fiber weight of {} is {w}; weights must be positive",
            g.morphism_label(MorphismId(m))
        )));
    }
    if let Some((alpha, gamma)) = left_invariance_witness(&g, &fiber_weight) {
        let composite = g.compose(alpha, gamma).expect("witness is composable");
        return Err(Error::HaarInvariance {
            alpha: g.morphism_label(alpha).to_string(),
            gamma: g.morphism_label(gamma).to_string(),
            composite: g.morphism_label(composite).to_string(),
        });
    }
    Ok(MeasuredGroupoid::assemble(g, lambda, fiber_weight, HaarKind::Custom))
}

/// δ(γ) = μ(γ)/μ(γ⁻¹), so that τ_*μ = δ⁻¹·μ.
///
/// Defined where both μ(γ) and μ(γ⁻¹) are positive, and set to 1 on
/// self-inverse morphisms (units in particular).
#[derive(Debug, Clone, PartialEq)]
pub struct ModularFunction {
    values: Vec<Option<f64>>,
}

impl ModularFunction {
    fn compute(g: &FiniteGroupoid, mu: &[f64]) -> Self {
        let values = g
            .morphisms()
            .map(|m| {
                let inv = g.inverse(m);
                if inv == m {
                    Some(1.0)
                } else if mu[m.0] > 0.0 && mu[inv.0] > 0.0 {
                    Some(mu[m.0] / mu[inv.0])
                } else {
                    None
                }
            })
            .collect();
        ModularFunction { values }
    }

    #[inline]
    pub fn get(&self, m: MorphismId) -> Option<f64> {
        self.values[m.0]
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    /// Morphisms where δ is undefined (zero measure on γ or γ⁻¹).
    pub fn undefined(&self) -> Vec<MorphismId> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_none())
            .map(|(i, _)| MorphismId(i))
            .collect()
    }

    pub fn is_unimodular(&self, tol: f64) -> bool {
        self.values.iter().flatten().all(|d| (d - 1.0).abs() <= tol)
    }
}

pub fn modular_function(mg: &MeasuredGroupoid) -> &ModularFunction {
    mg.modular()
}

/// Λ per morphism.
pub fn invariant_representative(mg: &MeasuredGroupoid) -> &[f64] {
    &mg.invariant
}

fn exact(v: f64) -> BigRational {
    BigRational::from_float(v).unwrap_or_else(|| BigRational::from_integer(BigInt::zero()))
}

/// Composable pairs `(β, α)` on the support of μ where `δ(β∘α) ≠ δ(β)·δ(α)`,
/// decided in exact rational arithmetic from λ and the fiber weights.
pub fn modular_homomorphism_defects(mg: &MeasuredGroupoid) -> Vec<(MorphismId, MorphismId)> {
    let g = mg.groupoid();
    let mu: Vec<BigRational> = g
        .morphisms()
        .map(|m| exact(mg.lambda[g.target(m).0]) * exact(mg.fiber_weight[m.0]))
        .collect();
    let on_support = |m: MorphismId| !mu[m.0].is_zero() && !mu[g.inverse(m).0].is_zero();
    let mut defects = Vec::new();
    for beta in g.morphisms().filter(|&b| on_support(b)) {
        for &alpha in g.with_target(g.source(beta)) {
            let Some(ba) = g.compose(beta, alpha) else { continue };
            if !on_support(alpha) || !on_support(ba) {
                continue;
            }
            // μ(βα)·μ(β⁻¹)·μ(α⁻¹) = μ(β)·μ(α)·μ((βα)⁻¹)
            let lhs = &mu[ba.0] * &mu[g.inverse(beta).0] * &mu[g.inverse(alpha).0];
            let rhs = &mu[beta.0] * &mu[alpha.0] * &mu[g.inverse(ba).0];
            if lhs != rhs {
                defects.push((beta, alpha));
            }
        }
    }
    defects
}

/// Largest relative defect `|δ(β∘α) − δ(β)δ(α)| / δ(β∘α)` in floating point.
pub fn modular_homomorphism_max_defect(mg: &MeasuredGroupoid) -> f64 {
    let g = mg.groupoid();
    let delta = mg.modular();
    let mut worst: f64 = 0.0;
    for beta in g.morphisms() {
        for &(alpha, ba) in g.compose_row(beta) {
            if let (Some(db), Some(da), Some(dba)) = (delta.get(beta), delta.get(alpha), delta.get(ba)) {
                worst = worst.max((dba - db * da).abs() / dba);
            }
        }
    }
    worst
}
