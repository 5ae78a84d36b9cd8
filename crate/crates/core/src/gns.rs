//! The GNS construction for ω: Gram form, Gelfand ideal and dimension.
//!
//! The Gram entry `K(x, y) = ω(δ_x† ⋆ δ_y)` expands to
//! `δ(x) ν(x⁻¹) μ(x⁻¹∘y)` on pairs with a common target. The factor
//! `δ(x) ν(x⁻¹) = μ(x)/λ(s(x))` cancels against `μ(x⁻¹∘y)`, leaving
//! `K(x, y) = μ(x) ν(x⁻¹∘y)`, which needs no δ.
//!
//! When λ vanishes somewhere, δ is infinite on morphisms leaving a null
//! object and ω(f†⋆f) has no meaning there; ideal membership and the report
//! are then taken on the sub-groupoid where λ > 0.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{char_fn, GroupoidFunction};
use crate::decoherence::grade2;
use crate::error::{Error, Result};
use crate::groupoid::{MorphismId, ObjectId};
use crate::haar::MeasuredGroupoid;
use crate::subsets::{source_fiber, ObjectSet};

/// Eigenvalues at or below this fraction of the largest count as zero.
pub const RANK_TOLERANCE: f64 = 1e-10;
/// Default absolute threshold for `ω(f†⋆f) = 0`.
pub const IDEAL_TOLERANCE: f64 = 1e-12;

/// One diagonal block of the Gram matrix: the morphisms into `target`.
#[derive(Debug, Clone)]
pub struct GramBlock {
    pub target: ObjectId,
    pub morphisms: Vec<MorphismId>,
    /// Row-major `K(morphisms[r], morphisms[c])`.
    pub entries: Vec<Complex64>,
}

impl GramBlock {
    pub fn dim(&self) -> usize {
        self.morphisms.len()
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.entries[r * self.dim() + c]
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.dim();
        let m = DMatrix::from_row_slice(n, n, &self.entries);
        let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

/// `K(x, y) = ω(δ_x† ⋆ δ_y)`, block diagonal by target fiber.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    size: usize,
    blocks: Vec<GramBlock>,
    /// Morphism → (block, position in block).
    position: Vec<(usize, usize)>,
}

impl GramMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn blocks(&self) -> &[GramBlock] {
        &self.blocks
    }

    pub fn entry(&self, x: MorphismId, y: MorphismId) -> Complex64 {
        let (bx, rx) = self.position[x.0];
        let (by, ry) = self.position[y.0];
        if bx != by {
            return Complex64::new(0.0, 0.0);
        }
        self.blocks[bx].get(rx, ry)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.size, self.size, |r, c| self.entry(MorphismId(r), MorphismId(c)))
    }

    /// Largest `|K(x,y) − conj K(y,x)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for b in &self.blocks {
            for r in 0..b.dim() {
                for c in 0..b.dim() {
                    worst = worst.max((b.get(r, c) - b.get(c, r).conj()).norm());
                }
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    /// All eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.blocks.iter().flat_map(|b| b.eigenvalues()).collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// `Σ conj f(x) K(x, y) f(y) = ω(f† ⋆ f)`.
    pub fn quadratic_form(&self, f: &GroupoidFunction) -> f64 {
        let mut total = 0.0;
        for b in &self.blocks {
            let mut block = Complex64::new(0.0, 0.0);
            for (r, x) in b.morphisms.iter().enumerate() {
                let fx = f.get(*x).conj();
                for (c, y) in b.morphisms.iter().enumerate() {
                    block += fx * b.get(r, c) * f.get(*y);
                }
            }
            total += block.re;
        }
        total
    }
}

pub fn gram(mg: &MeasuredGroupoid) -> GramMatrix {
    let g = mg.groupoid();
    let mut position = vec![(0, 0); g.num_morphisms()];
    let blocks = g
        .objects()
        .enumerate()
        .map(|(bi, t)| {
            let morphisms = g.with_target(t).to_vec();
            for (r, x) in morphisms.iter().enumerate() {
                position[x.0] = (bi, r);
            }
            let mut entries = Vec::with_capacity(morphisms.len() * morphisms.len());
            for &x in &morphisms {
                let xi = g.inverse(x);
                for &y in &morphisms {
                    let z = g.compose(xi, y).expect("common target");
                    entries.push(Complex64::new(mg.mu(x) * mg.fiber_weight(z), 0.0));
                }
            }
            GramBlock { target: t, morphisms, entries }
        })
        .collect();
    GramMatrix { size: g.num_morphisms(), blocks, position }
}

/// `f ∈ N` iff `ω(f†⋆f) ≤ tol`, with f restricted to the λ-support.
pub fn in_gelfand_ideal(mg: &MeasuredGroupoid, f: &GroupoidFunction, tol: f64) -> Result<bool> {
    if f.token() != mg.groupoid().token() {
        return Err(Error::GroupoidMismatch);
    }
    let value = match mg.restrict_to_support()? {
        None => gram(mg).quadratic_form(f),
        Some(r) => {
            let sub = r.measured.groupoid();
            let coeffs = r.morphism_map.iter().map(|&m| f.get(m)).collect();
            gram(&r.measured).quadratic_form(&GroupoidFunction::from_coeffs(sub, coeffs)?)
        }
    };
    Ok(value.abs() <= tol)
}

/// `dim H_ω = rank K`, counting eigenvalues above `RANK_TOLERANCE · max`.
pub fn gns_dimension(mg: &MeasuredGroupoid) -> Result<usize> {
    Ok(match mg.restrict_to_support()? {
        None => rank(&gram(mg).eigenvalues()),
        Some(r) => rank(&gram(&r.measured).eigenvalues()),
    })
}

fn rank(ev: &[f64]) -> usize {
    let max = ev.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return 0;
    }
    ev.iter().filter(|&&e| e > RANK_TOLERANCE * max).count()
}

/// `μ₂(a) = 0` should coincide with `χ_{s⁻¹(a)} ∈ N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullSetCheck {
    pub set: Vec<String>,
    pub mu2: f64,
    pub in_ideal: bool,
    pub consistent: bool,
}

pub fn null_set_correspondence(mg: &MeasuredGroupoid, a: &ObjectSet) -> Result<NullSetCheck> {
    let g = mg.groupoid();
    let mu2 = grade2(mg, a, None)?;
    let chi = char_fn(g, &source_fiber(g, a));
    let in_ideal = in_gelfand_ideal(mg, &chi, IDEAL_TOLERANCE)?;
    Ok(NullSetCheck {
        set: a.labels(g),
        mu2,
        in_ideal,
        consistent: (mu2.abs() <= IDEAL_TOLERANCE) == in_ideal,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnsReport {
    pub dimension: usize,
    pub algebra_dimension: usize,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub hermitian_defect: f64,
    /// Objects of zero λ; their atoms are null and land in N.
    pub null_objects: Vec<String>,
    pub null_atoms: Vec<NullSetCheck>,
    pub restricted_to_support: bool,
}

pub fn gns_report(mg: &MeasuredGroupoid) -> Result<GnsReport> {
    let g = mg.groupoid();
    let restriction = mg.restrict_to_support()?;
    let k = gram(restriction.as_ref().map_or(mg, |r| &r.measured));
    let ev = k.eigenvalues();
    let null_atoms = g
        .objects()
        .map(|j| null_set_correspondence(mg, &ObjectSet::from_ids(g, [j])))
        .collect::<Result<Vec<_>>>()?;
    Ok(GnsReport {
        dimension: rank(&ev),
        algebra_dimension: g.num_morphisms(),
        min_eigenvalue: ev.first().copied().unwrap_or(0.0),
        max_eigenvalue: ev.last().copied().unwrap_or(0.0),
        hermitian_defect: k.hermitian_defect(),
        null_objects: g
            .objects()
            .filter(|j| mg.lambda()[j.0] == 0.0)
            .map(|j| g.object_label(j).to_string())
            .collect(),
        null_atoms,
        restricted_to_support: restriction.is_some(),
    })
}
