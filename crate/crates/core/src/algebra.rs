//! The convolution *-algebra C(G) of a measured groupoid, its state ω and
//! the bridge `ω(χ†⋆χ) = D`.

use std::ops::{Add, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groupoid::{FiniteGroupoid, MorphismId, ObjectId};
use crate::haar::{HaarKind, MeasuredGroupoid};
use crate::subsets::{source_fiber, MorphismSet, ObjectSet};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A complex function on the morphisms of one groupoid.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupoidFunction {
    token: u64,
    coeffs: Vec<Complex64>,
}

impl GroupoidFunction {
    pub fn zero(g: &FiniteGroupoid) -> Self {
        GroupoidFunction { token: g.token(), coeffs: vec![ZERO; g.num_morphisms()] }
    }

    /// The indicator of a single morphism.
    pub fn delta(g: &FiniteGroupoid, m: MorphismId) -> Self {
        let mut f = Self::zero(g);
        f.coeffs[m.0] = Complex64::new(1.0, 0.0);
        f
    }

    pub fn from_coeffs(g: &FiniteGroupoid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != g.num_morphisms() {
            return Err(Error::Domain(format!(
                "{} coefficients for {} morphisms",
                coeffs.len(),
                g.num_morphisms()
            )));
        }
        Ok(GroupoidFunction { token: g.token(), coeffs })
    }

    pub fn token(&self) -> u64 {
        self.token
    }

    #[inline]
    pub fn get(&self, m: MorphismId) -> Complex64 {
        self.coeffs[m.0]
    }

    pub fn set(&mut self, m: MorphismId, v: Complex64) {
        self.coeffs[m.0] = v;
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn scale(&self, c: Complex64) -> Self {
        GroupoidFunction { token: self.token, coeffs: self.coeffs.iter().map(|v| v * c).collect() }
    }

    /// Morphisms where `|f| > tol`.
    pub fn support(&self, g: &FiniteGroupoid, tol: f64) -> MorphismSet {
        MorphismSet::from_ids(
            g,
            self.coeffs.iter().enumerate().filter(|(_, v)| v.norm() > tol).map(|(i, _)| MorphismId(i)),
        )
    }

    /// Sup-norm distance.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.token, other.token, "functions on different groupoids");
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    fn zip_with(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert_eq!(self.token, other.token, "functions on different groupoids");
        GroupoidFunction {
            token: self.token,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| op(a, b)).collect(),
        }
    }
}

impl Add for &GroupoidFunction {
    type Output = GroupoidFunction;

    fn add(self, rhs: Self) -> GroupoidFunction {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &GroupoidFunction {
    type Output = GroupoidFunction;

    fn sub(self, rhs: Self) -> GroupoidFunction {
        self.zip_with(rhs, |a, b| a - b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConvolutionMode {
    /// `(f⋆h)(γ) = Σ_{α ∈ G^{t(γ)}} f(α) h(α⁻¹γ) ν^{t(γ)}(α)`.
    #[default]
    Haar,
    /// `(f⋆h)(γ) = Σ_{α∘β=γ} f(α) h(β) · μ(γ)`.
    Literal,
}

fn check(mg: &MeasuredGroupoid, fs: &[&GroupoidFunction]) -> Result<()> {
    let token = mg.groupoid().token();
    if fs.iter().any(|f| f.token != token) {
        return Err(Error::GroupoidMismatch);
    }
    Ok(())
}

/// Haar convolution. Sums run over composable pairs in ascending index order.
pub fn convolve(mg: &MeasuredGroupoid, f: &GroupoidFunction, h: &GroupoidFunction) -> Result<GroupoidFunction> {
    check(mg, &[f, h])?;
    let g = mg.groupoid();
    let mut acc = vec![ZERO; g.num_morphisms()];
    for alpha in g.morphisms() {
        let fa = f.coeffs[alpha.0];
        if fa == ZERO {
            continue;
        }
        let fw = fa * mg.fiber_weight(alpha);
        for &(beta, ab) in g.compose_row(alpha) {
            let hb = h.coeffs[beta.0];
            if hb != ZERO {
                acc[ab.0] += fw * hb;
            }
        }
    }
    Ok(GroupoidFunction { token: f.token, coeffs: acc })
}

pub fn convolve_literal(
    mg: &MeasuredGroupoid,
    f: &GroupoidFunction,
    h: &GroupoidFunction,
) -> Result<GroupoidFunction> {
    check(mg, &[f, h])?;
    let g = mg.groupoid();
    let mut acc = vec![ZERO; g.num_morphisms()];
    for alpha in g.morphisms() {
        let fa = f.coeffs[alpha.0];
        if fa == ZERO {
            continue;
        }
        for &(beta, ab) in g.compose_row(alpha) {
            acc[ab.0] += fa * h.coeffs[beta.0];
        }
    }
    for (v, m) in acc.iter_mut().zip(g.morphisms()) {
        *v *= mg.mu(m);
    }
    Ok(GroupoidFunction { token: f.token, coeffs: acc })
}

pub fn convolve_with(
    mg: &MeasuredGroupoid,
    f: &GroupoidFunction,
    h: &GroupoidFunction,
    mode: ConvolutionMode,
) -> Result<GroupoidFunction> {
    match mode {
        ConvolutionMode::Haar => convolve(mg, f, h),
        ConvolutionMode::Literal => convolve_literal(mg, f, h),
    }
}

/// `f†(γ) = δ(γ⁻¹) · conj f(γ⁻¹)`.
///
/// This is the adjoint for the pairing `⟨f, h⟩ = ω(f̄·h)` and makes ω
/// positive. Fails if f is supported where δ is undefined.
pub fn involution(mg: &MeasuredGroupoid, f: &GroupoidFunction) -> Result<GroupoidFunction> {
    check(mg, &[f])?;
    let g = mg.groupoid();
    let mut out = vec![ZERO; g.num_morphisms()];
    for gamma in g.morphisms() {
        let inv = g.inverse(gamma);
        let v = f.coeffs[inv.0];
        if v == ZERO {
            continue;
        }
        let d = mg.modular().get(inv).ok_or_else(|| {
            Error::ModularDomain(format!("δ({}) is undefined", g.morphism_label(inv)))
        })?;
        out[gamma.0] = v.conj() * d;
    }
    Ok(GroupoidFunction { token: f.token, coeffs: out })
}

/// `f†(γ) = δ(γ) · conj f(γ⁻¹)`, the other placement of δ.
///
/// Kept for comparison: ω is not positive for it unless G is unimodular.
pub fn involution_literal(mg: &MeasuredGroupoid, f: &GroupoidFunction) -> Result<GroupoidFunction> {
    check(mg, &[f])?;
    let g = mg.groupoid();
    let mut out = vec![ZERO; g.num_morphisms()];
    for gamma in g.morphisms() {
        let v = f.coeffs[g.inverse(gamma).0];
        if v == ZERO {
            continue;
        }
        let d = mg.modular().get(gamma).ok_or_else(|| {
            Error::ModularDomain(format!("δ({}) is undefined", g.morphism_label(gamma)))
        })?;
        out[gamma.0] = v.conj() * d;
    }
    Ok(GroupoidFunction { token: f.token, coeffs: out })
}

/// `ω(f) = Σ f(γ) μ(γ)`.
pub fn state(mg: &MeasuredGroupoid, f: &GroupoidFunction) -> Result<Complex64> {
    check(mg, &[f])?;
    Ok(mg.groupoid().morphisms().map(|m| f.coeffs[m.0] * mg.mu(m)).sum())
}

/// Characteristic function of a morphism set.
pub fn char_fn(g: &FiniteGroupoid, set: &MorphismSet) -> GroupoidFunction {
    let mut f = GroupoidFunction::zero(g);
    for m in set.iter() {
        f.coeffs[m.0] = Complex64::new(1.0, 0.0);
    }
    f
}

/// `u = Σ_j ν^j(1_j)⁻¹ δ_{1_j}`, a two-sided unit for Haar convolution.
pub fn algebra_unit(mg: &MeasuredGroupoid) -> GroupoidFunction {
    let g = mg.groupoid();
    let mut u = GroupoidFunction::zero(g);
    for j in g.objects() {
        let e = g.unit_at(j);
        u.coeffs[e.0] = Complex64::new(1.0 / mg.fiber_weight(e), 0.0);
    }
    u
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BridgeValue {
    /// `ω(χ_{s⁻¹(b)}† ⋆ χ_{s⁻¹(a)})`.
    pub value: Complex64,
    /// The value equals `D(b, a)` for this Haar system and convolution mode.
    pub certified: bool,
    /// Computed on the sub-groupoid where λ > 0.
    pub restricted_to_support: bool,
}

/// Evaluates `ω(χ_{s⁻¹(b)}† ⋆ χ_{s⁻¹(a)})`.
///
/// Under the normalized Haar system with Haar convolution this reproduces
/// the decoherence functional `D(b, a)`. Zero-λ objects are dropped first,
/// since δ is undefined on morphisms touching them.
pub fn bridge_decoherence(
    mg: &MeasuredGroupoid,
    b: &ObjectSet,
    a: &ObjectSet,
    mode: ConvolutionMode,
) -> Result<BridgeValue> {
    let token = mg.groupoid().token();
    if a.token() != token || b.token() != token {
        return Err(Error::GroupoidMismatch);
    }
    let certified = mg.kind() == HaarKind::Normalized && mode == ConvolutionMode::Haar;
    let (value, restricted_to_support) = match mg.restrict_to_support()? {
        None => (bridge_value(mg, b, a, mode)?, false),
        Some(r) => {
            let sub = r.measured.groupoid();
            let pull = |s: &ObjectSet| {
                ObjectSet::from_ids(
                    sub,
                    r.object_map
                        .iter()
                        .enumerate()
                        .filter(|(_, orig)| s.contains(**orig))
                        .map(|(i, _)| ObjectId(i)),
                )
            };
            (bridge_value(&r.measured, &pull(b), &pull(a), mode)?, true)
        }
    };
    Ok(BridgeValue { value, certified, restricted_to_support })
}

fn bridge_value(mg: &MeasuredGroupoid, b: &ObjectSet, a: &ObjectSet, mode: ConvolutionMode) -> Result<Complex64> {
    let g = mg.groupoid();
    let chi_b = char_fn(g, &source_fiber(g, b));
    let chi_a = char_fn(g, &source_fiber(g, a));
    let lhs = involution(mg, &chi_b)?;
    state(mg, &convolve_with(mg, &lhs, &chi_a, mode)?)
}
