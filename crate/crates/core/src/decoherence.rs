//! The decoherence functional `D(b, a) = Λ(t⁻¹(b) ∘ s⁻¹(a))`, optionally
//! weighted by a phase `e^{iS}`, and the grade-2 measure it induces.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groupoid::{FiniteGroupoid, MorphismId};
use crate::haar::MeasuredGroupoid;
use crate::limits::Limits;
use crate::subsets::{transition_set, ObjectSet};

/// Absolute slack for the logarithmic laws of a phase, scaled by `max(1, |S|)`.
pub const PHASE_TOLERANCE: f64 = 1e-12;

/// A real function S on morphisms with `S(β∘α) = S(β) + S(α)` and `S(α⁻¹) = −S(α)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseAction {
    token: u64,
    values: Vec<f64>,
}

impl PhaseAction {
    /// Validates `values` against the logarithmic laws.
    pub fn new(g: &FiniteGroupoid, values: Vec<f64>) -> Result<Self> {
        let report = validate_phase(g, &values);
        if !report.is_valid() {
            return Err(Error::Phase(report));
        }
        Ok(PhaseAction { token: g.token(), values })
    }

    #[inline]
    pub fn get(&self, m: MorphismId) -> f64 {
        self.values[m.0]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhaseViolation {
    WrongLength { expected: usize, actual: usize },
    NotFinite { morphism: String },
    /// `S(β∘α) ≠ S(β) + S(α)`.
    Logarithmic { beta: String, alpha: String, defect: f64 },
    /// `S(α⁻¹) ≠ −S(α)`.
    AntiSymmetric { morphism: String, defect: f64 },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseReport {
    pub violations: Vec<PhaseViolation>,
}

impl PhaseReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn close(x: f64, y: f64) -> bool {
    (x - y).abs() <= PHASE_TOLERANCE * x.abs().max(y.abs()).max(1.0)
}

pub fn validate_phase(g: &FiniteGroupoid, values: &[f64]) -> PhaseReport {
    let mut violations = Vec::new();
    if values.len() != g.num_morphisms() {
        violations.push(PhaseViolation::WrongLength { expected: g.num_morphisms(), actual: values.len() });
        return PhaseReport { violations };
    }
    let label = |m: MorphismId| g.morphism_label(m).to_string();
    for m in g.morphisms() {
        if !values[m.0].is_finite() {
            violations.push(PhaseViolation::NotFinite { morphism: label(m) });
        }
    }
    if !violations.is_empty() {
        return PhaseReport { violations };
    }
    for beta in g.morphisms() {
        for &(alpha, ba) in g.compose_row(beta) {
            let expected = values[beta.0] + values[alpha.0];
            if !close(values[ba.0], expected) {
                violations.push(PhaseViolation::Logarithmic {
                    beta: label(beta),
                    alpha: label(alpha),
                    defect: values[ba.0] - expected,
                });
            }
        }
    }
    for m in g.morphisms() {
        let inv = values[g.inverse(m).0];
        if !close(inv, -values[m.0]) {
            violations.push(PhaseViolation::AntiSymmetric { morphism: label(m), defect: inv + values[m.0] });
        }
    }
    PhaseReport { violations }
}

/// `S(γ) = φ(t(γ)) − φ(s(γ))` for an object potential φ.
pub fn phase_from_potential(g: &FiniteGroupoid, potential: &[f64]) -> Result<PhaseAction> {
    if potential.len() != g.num_objects() {
        return Err(Error::Domain(format!(
            "potential has {} entries for {} objects",
            potential.len(),
            g.num_objects()
        )));
    }
    if potential.iter().any(|p| !p.is_finite()) {
        return Err(Error::Domain("potential must be finite".into()));
    }
    let values = g
        .morphisms()
        .map(|m| potential[g.target(m).0] - potential[g.source(m).0])
        .collect();
    Ok(PhaseAction { token: g.token(), values })
}

fn check_inputs(mg: &MeasuredGroupoid, sets: &[&ObjectSet], phase: Option<&PhaseAction>) -> Result<()> {
    let token = mg.groupoid().token();
    if sets.iter().any(|s| s.token() != token) || phase.is_some_and(|p| p.token != token) {
        return Err(Error::GroupoidMismatch);
    }
    Ok(())
}

/// `D(b, a) = Σ_{γ ∈ t⁻¹(b)∘s⁻¹(a)} e^{iS(γ)} Λ(γ)`, zero on unconditioned pairs.
pub fn decoherence(mg: &MeasuredGroupoid, b: &ObjectSet, a: &ObjectSet, phase: Option<&PhaseAction>) -> Result<Complex64> {
    check_inputs(mg, &[a, b], phase)?;
    let set = transition_set(mg.groupoid(), b, a)?;
    Ok(match phase {
        None => Complex64::new(set.iter().fold(0.0, |acc, m| acc + mg.invariant(m)), 0.0),
        Some(p) => set.iter().map(|m| Complex64::from_polar(mg.invariant(m), p.get(m))).sum(),
    })
}

/// `μ₂(a) = D(a, a)`, real because the product set is closed under inversion.
pub fn grade2(mg: &MeasuredGroupoid, a: &ObjectSet, phase: Option<&PhaseAction>) -> Result<f64> {
    Ok(decoherence(mg, a, a, phase)?.re)
}

/// The interference term computed two ways.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interference {
    /// `μ₂(a∪b) − μ₂(a) − μ₂(b)`.
    pub from_grade2: f64,
    /// `D(a, b) + D(b, a)`.
    pub from_functional: Complex64,
}

impl Interference {
    pub fn value(&self) -> f64 {
        self.from_grade2
    }

    /// Distance between the two evaluations.
    pub fn discrepancy(&self) -> f64 {
        (self.from_functional - self.from_grade2).norm()
    }
}

/// `I(a, b)` for disjoint `a`, `b`.
pub fn interference(
    mg: &MeasuredGroupoid,
    a: &ObjectSet,
    b: &ObjectSet,
    phase: Option<&PhaseAction>,
) -> Result<Interference> {
    check_inputs(mg, &[a, b], phase)?;
    if !a.is_disjoint(b) {
        return Err(Error::Precondition("interference needs disjoint sets".into()));
    }
    let union = a | b;
    let from_grade2 = grade2(mg, &union, phase)? - grade2(mg, a, phase)? - grade2(mg, b, phase)?;
    let from_functional = decoherence(mg, a, b, phase)? + decoherence(mg, b, a, phase)?;
    Ok(Interference { from_grade2, from_functional })
}

/// `I³(a,b,c) = μ₂(a∪b∪c) − μ₂(a∪b) − μ₂(a∪c) − μ₂(b∪c) + μ₂(a) + μ₂(b) + μ₂(c)`.
pub fn sorkin_third_order(
    mg: &MeasuredGroupoid,
    a: &ObjectSet,
    b: &ObjectSet,
    c: &ObjectSet,
    phase: Option<&PhaseAction>,
) -> Result<f64> {
    check_inputs(mg, &[a, b, c], phase)?;
    if !a.is_disjoint(b) || !a.is_disjoint(c) || !b.is_disjoint(c) {
        return Err(Error::Precondition("Sorkin sum needs pairwise disjoint sets".into()));
    }
    let m = |s: &ObjectSet| grade2(mg, s, phase);
    let (ab, ac, bc) = (a | b, a | c, b | c);
    let abc = &ab | c;
    Ok(m(&abc)? - m(&ab)? - m(&ac)? - m(&bc)? + m(a)? + m(b)? + m(c)?)
}

/// D over a family of subsets, with μ₂, pairwise interference and the
/// worst third-order residual among disjoint triples of the family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecoherenceReport {
    /// Object labels of each family member.
    pub family: Vec<Vec<String>>,
    /// `matrix[row][col] = D(family[row], family[col])`.
    pub matrix: Vec<Vec<Complex64>>,
    pub mu2: Vec<f64>,
    /// `I(family[row], family[col])`, `None` where the sets overlap.
    pub interference: Vec<Vec<Option<f64>>>,
    pub max_sorkin_residual: f64,
    pub phased: bool,
}

pub fn decoherence_report(
    mg: &MeasuredGroupoid,
    family: &[ObjectSet],
    phase: Option<&PhaseAction>,
) -> Result<DecoherenceReport> {
    let g = mg.groupoid();
    let n = family.len();
    let mut matrix = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for (r, b) in family.iter().enumerate() {
        for (c, a) in family.iter().enumerate() {
            matrix[r][c] = decoherence(mg, b, a, phase)?;
        }
    }
    let mu2 = family.iter().map(|a| grade2(mg, a, phase)).collect::<Result<Vec<_>>>()?;
    let mut inter = vec![vec![None; n]; n];
    for (r, a) in family.iter().enumerate() {
        for (c, b) in family.iter().enumerate() {
            if a.is_disjoint(b) {
                inter[r][c] = Some(interference(mg, a, b, phase)?.value());
            }
        }
    }
    let mut worst: f64 = 0.0;
    for (i, a) in family.iter().enumerate() {
        for (j, b) in family.iter().enumerate().skip(i + 1) {
            for c in family.iter().skip(j + 1) {
                if a.is_disjoint(b) && a.is_disjoint(c) && b.is_disjoint(c) {
                    worst = worst.max(sorkin_third_order(mg, a, b, c, phase)?.abs());
                }
            }
        }
    }
    Ok(DecoherenceReport {
        family: family.iter().map(|s| s.labels(g)).collect(),
        matrix,
        mu2,
        interference: inter,
        max_sorkin_residual: worst,
        phased: phase.is_some(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SorkinWitness {
    pub a: Vec<String>,
    pub b: Vec<String>,
    pub c: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SorkinAudit {
    pub max_residual: f64,
    pub worst: Option<SorkinWitness>,
    /// Ordered triples of pairwise disjoint subsets examined.
    pub triples: u64,
    pub phased: bool,
}

/// Worst `|I³|` over every ordered triple of pairwise disjoint subsets of Ω.
///
/// μ₂ is tabulated once per subset; the triple scan runs on the current
/// rayon pool and reduces in mask order, so the result does not depend on
/// the number of threads.
pub fn sorkin_audit(mg: &MeasuredGroupoid, phase: Option<&PhaseAction>, limits: &Limits) -> Result<SorkinAudit> {
    let g = mg.groupoid();
    let n = g.num_objects();
    limits.check_scan(n)?;
    let count = 1usize << n;
    let full = (count - 1) as u64;
    let mu2: Vec<f64> = (0..count as u64)
        .into_par_iter()
        .map(|mask| grade2(mg, &ObjectSet::from_mask(g, mask), phase))
        .collect::<Result<Vec<_>>>()?;

    let per_a: Vec<(f64, Option<(u64, u64, u64)>, u64)> = (0..count as u64)
        .into_par_iter()
        .map(|a| {
            let mut best = (0.0f64, None, 0u64);
            let rest = full & !a;
            let mut b = rest;
            loop {
                let rest_c = rest & !b;
                let mut c = rest_c;
                loop {
                    let r = mu2[(a | b | c) as usize]
                        - mu2[(a | b) as usize]
                        - mu2[(a | c) as usize]
                        - mu2[(b | c) as usize]
                        + mu2[a as usize]
                        + mu2[b as usize]
                        + mu2[c as usize];
                    if best.1.is_none() || r.abs() > best.0 {
                        best.0 = r.abs();
                        best.1 = Some((a, b, c));
                    }
                    best.2 += 1;
                    if c == 0 {
                        break;
                    }
                    c = (c - 1) & rest_c;
                }
                if b == 0 {
                    break;
                }
                b = (b - 1) & rest;
            }
            best
        })
        .collect();

    let mut max_residual = 0.0f64;
    let mut worst = None;
    let mut triples = 0u64;
    for (r, w, k) in per_a {
        triples += k;
        if worst.is_none() || r > max_residual {
            max_residual = r;
            worst = w;
        }
    }
    let labels = |m: u64| ObjectSet::from_mask(g, m).labels(g);
    Ok(SorkinAudit {
        max_residual,
        worst: worst.map(|(a, b, c)| SorkinWitness { a: labels(a), b: labels(b), c: labels(c) }),
        triples,
        phased: phase.is_some(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{cyclic_group, pair_groupoid, unit_groupoid};
    use crate::haar::{counting_haar, normalized_haar};
    use std::f64::consts::FRAC_PI_2;

    fn set(mg: &MeasuredGroupoid, labels: &[&str]) -> ObjectSet {
        ObjectSet::from_labels(mg.groupoid(), labels).unwrap()
    }

    fn classical() -> MeasuredGroupoid {
        normalized_haar(unit_groupoid(3).unwrap(), vec![0.2, 0.3, 0.5]).unwrap()
    }

    fn pair2() -> MeasuredGroupoid {
        normalized_haar(pair_groupoid(2).unwrap(), vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn decoherence_examples() {
        let mg = classical();
        let d = decoherence(&mg, &set(&mg, &["2", "3"]), &set(&mg, &["1", "2"]), None).unwrap();
        assert_eq!(d, Complex64::new(0.3, 0.0));

        let mg = pair2();
        let one = set(&mg, &["1"]);
        assert_eq!(decoherence(&mg, &one, &one, None).unwrap().re, 0.25);
        let empty = ObjectSet::empty(mg.groupoid());
        assert_eq!(decoherence(&mg, &empty, &one, None).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn grade2_examples() {
        let mg = classical();
        for mask in 0..8u64 {
            let a = ObjectSet::from_mask(mg.groupoid(), mask);
            let expected: f64 = a.iter().map(|j| mg.lambda()[j.0]).sum();
            assert!((grade2(&mg, &a, None).unwrap() - expected).abs() < 1e-15);
        }
        let mg = pair2();
        assert_eq!(grade2(&mg, &set(&mg, &["1"]), None).unwrap(), 0.25);
        assert_eq!(grade2(&mg, &ObjectSet::full(mg.groupoid()), None).unwrap(), 1.0);
        assert_eq!(grade2(&mg, &ObjectSet::empty(mg.groupoid()), None).unwrap(), 0.0);
    }

    #[test]
    fn interference_examples() {
        let mg = classical();
        for a in 0..8u64 {
            for b in (0..8u64).filter(|b| a & b == 0) {
                let (sa, sb) = (ObjectSet::from_mask(mg.groupoid(), a), ObjectSet::from_mask(mg.groupoid(), b));
                let i = interference(&mg, &sa, &sb, None).unwrap();
                assert!(i.value().abs() < 1e-15 && i.discrepancy() < 1e-15);
            }
        }
        let mg = pair2();
        let i = interference(&mg, &set(&mg, &["1"]), &set(&mg, &["2"]), None).unwrap();
        assert_eq!(i.value(), 0.5);
        assert_eq!(i.from_functional, Complex64::new(0.5, 0.0));
        let empty = ObjectSet::empty(mg.groupoid());
        assert_eq!(interference(&mg, &set(&mg, &["1"]), &empty, None).unwrap().value(), 0.0);
        assert!(matches!(
            interference(&mg, &set(&mg, &["1"]), &set(&mg, &["1", "2"]), None),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn sorkin_examples() {
        let mg = normalized_haar(pair_groupoid(3).unwrap(), vec![1.0 / 3.0; 3]).unwrap();
        let (a, b, c) = (set(&mg, &["1"]), set(&mg, &["2"]), set(&mg, &["3"]));
        assert!(sorkin_third_order(&mg, &a, &b, &c, None).unwrap().abs() < 1e-12);
        for (x, y) in [(&a, &b), (&a, &c), (&b, &c)] {
            assert!((interference(&mg, x, y, None).unwrap().value() - 2.0 / 9.0).abs() < 1e-15);
        }
        let e = ObjectSet::empty(mg.groupoid());
        assert_eq!(sorkin_third_order(&mg, &e, &e, &e, None).unwrap(), 0.0);
        assert!(matches!(sorkin_third_order(&mg, &a, &a, &c, None), Err(Error::Precondition(_))));
    }

    #[test]
    fn phase_examples() {
        let g = pair_groupoid(2).unwrap();
        assert!(validate_phase(&g, &[0.0; 4]).is_valid());

        let p = phase_from_potential(&g, &[0.0, FRAC_PI_2]).unwrap();
        let m = |l: &str| g.morphism_by_label(l).unwrap();
        assert_eq!(p.get(m("(2,1)")), FRAC_PI_2);
        assert_eq!(p.get(m("(1,2)")), -FRAC_PI_2);
        assert_eq!(p.get(m("(1,1)")), 0.0);
        assert!(validate_phase(&g, p.values()).is_valid());

        let mut bad = vec![0.0; 4];
        bad[m("(2,1)").0] = 1.0;
        bad[m("(1,2)").0] = 1.0;
        let report = validate_phase(&g, &bad);
        assert!(report.violations.iter().any(|v| matches!(v, PhaseViolation::AntiSymmetric { .. })));
        assert!(matches!(PhaseAction::new(&g, bad), Err(Error::Phase(_))));
    }

    #[test]
    fn phased_functional_is_hermitian() {
        let mg = counting_haar(pair_groupoid(3).unwrap(), vec![0.2, 0.3, 0.5]).unwrap();
        let p = phase_from_potential(mg.groupoid(), &[0.0, 1.1, -0.4]).unwrap();
        for a in 0..8u64 {
            let sa = ObjectSet::from_mask(mg.groupoid(), a);
            assert!(decoherence(&mg, &sa, &sa, Some(&p)).unwrap().im.abs() < 1e-15);
            for b in 0..8u64 {
                let sb = ObjectSet::from_mask(mg.groupoid(), b);
                let ab = decoherence(&mg, &sa, &sb, Some(&p)).unwrap();
                let ba = decoherence(&mg, &sb, &sa, Some(&p)).unwrap();
                assert!((ab - ba.conj()).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn audit_and_report() {
        let mg = normalized_haar(pair_groupoid(3).unwrap(), vec![0.2, 0.3, 0.5]).unwrap();
        let audit = sorkin_audit(&mg, None, &Limits::default()).unwrap();
        assert!(audit.max_residual < 1e-12);
        assert_eq!(audit.triples, 4u64.pow(3));

        let atoms: Vec<ObjectSet> = mg.groupoid().objects().map(|j| ObjectSet::from_ids(mg.groupoid(), [j])).collect();
        let r = decoherence_report(&mg, &atoms, None).unwrap();
        assert_eq!(r.matrix.len(), 3);
        assert!(r.interference[0][0].is_none());
        assert!(r.max_sorkin_residual < 1e-12);
    }

    #[test]
    fn mismatched_inputs() {
        let mg = pair2();
        let other = pair_groupoid(2).unwrap();
        let foreign = ObjectSet::full(&other);
        assert!(matches!(decoherence(&mg, &foreign, &foreign, None), Err(Error::GroupoidMismatch)));
        let p = phase_from_potential(&other, &[0.0, 1.0]).unwrap();
        let own = ObjectSet::full(mg.groupoid());
        assert!(matches!(decoherence(&mg, &own, &own, Some(&p)), Err(Error::GroupoidMismatch)));
    }

    #[test]
    fn logarithmic_phase_vanishes_on_finite_isotropy() {
        let g = cyclic_group(3).unwrap();
        // any nonzero value on a generator breaks S(g³) = 3S(g) = S(e) = 0
        assert!(!validate_phase(&g, &[0.0, 0.5, -0.5]).is_valid());
        assert!(validate_phase(&g, &[0.0, 0.0, 0.0]).is_valid());
    }
}
