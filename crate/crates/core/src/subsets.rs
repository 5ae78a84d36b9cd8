//! Subsets of G and Ω, the subset product `B∘A`, and the conditioning
//! relation it induces on P(Ω).

use std::fmt;
use std::ops::{BitAnd, BitOr};

use fixedbitset::FixedBitSet;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groupoid::{FiniteGroupoid, MorphismId, ObjectId};
use crate::limits::Limits;

/// A subset of the morphisms of one groupoid.
///
/// Boolean operators panic when the operands come from different groupoids.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MorphismSet {
    token: u64,
    bits: FixedBitSet,
}

/// A subset of the objects of one groupoid.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ObjectSet {
    token: u64,
    bits: FixedBitSet,
}

macro_rules! bitset_common {
    ($ty:ident, $id:ident, $count:ident) => {
        impl $ty {
            pub fn empty(g: &FiniteGroupoid) -> Self {
                $ty { token: g.token(), bits: FixedBitSet::with_capacity(g.$count()) }
            }

            pub fn full(g: &FiniteGroupoid) -> Self {
                let mut s = Self::empty(g);
                s.bits.insert_range(..);
                s
            }

            pub fn from_ids<I: IntoIterator<Item = $id>>(g: &FiniteGroupoid, ids: I) -> Self {
                let mut s = Self::empty(g);
                for id in ids {
                    s.bits.insert(id.0);
                }
                s
            }

            #[inline]
            pub fn token(&self) -> u64 {
                self.token
            }

            /// Size of the ambient index space.
            pub fn universe(&self) -> usize {
                self.bits.len()
            }

            #[inline]
            pub fn contains(&self, id: $id) -> bool {
                self.bits.contains(id.0)
            }

            pub fn insert(&mut self, id: $id) {
                self.bits.insert(id.0);
            }

            pub fn len(&self) -> usize {
                self.bits.count_ones(..)
            }

            pub fn is_empty(&self) -> bool {
                self.bits.is_clear()
            }

            pub fn iter(&self) -> impl Iterator<Item = $id> + '_ {
                self.bits.ones().map($id)
            }

            pub fn complement(&self) -> Self {
                let mut bits = self.bits.clone();
                bits.toggle_range(..);
                $ty { token: self.token, bits }
            }

            pub fn is_disjoint(&self, other: &Self) -> bool {
                self.same_groupoid(other);
                self.bits.is_disjoint(&other.bits)
            }

            pub fn is_subset(&self, other: &Self) -> bool {
                self.same_groupoid(other);
                self.bits.is_subset(&other.bits)
            }

            fn same_groupoid(&self, other: &Self) {
                assert_eq!(self.token, other.token, "sets belong to different groupoids");
            }
        }

        impl BitOr for &$ty {
            type Output = $ty;
            fn bitor(self, rhs: &$ty) -> $ty {
                self.same_groupoid(rhs);
                $ty { token: self.token, bits: &self.bits | &rhs.bits }
            }
        }

        impl BitAnd for &$ty {
            type Output = $ty;
            fn bitand(self, rhs: &$ty) -> $ty {
                self.same_groupoid(rhs);
                $ty { token: self.token, bits: &self.bits & &rhs.bits }
            }
        }

        impl fmt::Debug for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.debug_set().entries(self.bits.ones()).finish()
            }
        }
    };
}

bitset_common!(MorphismSet, MorphismId, num_morphisms);
bitset_common!(ObjectSet, ObjectId, num_objects);

impl MorphismSet {
    /// τ(A) = { α⁻¹ : α ∈ A }.
    pub fn inverted(&self, g: &FiniteGroupoid) -> MorphismSet {
        MorphismSet::from_ids(g, self.iter().map(|m| g.inverse(m)))
    }

    pub fn labels(&self, g: &FiniteGroupoid) -> Vec<String> {
        self.iter().map(|m| g.morphism_label(m).to_string()).collect()
    }
}

impl ObjectSet {
    /// Bit `k` of `mask` selects object `k`. Bits beyond |Ω| are ignored.
    pub fn from_mask(g: &FiniteGroupoid, mask: u64) -> Self {
        let n = g.num_objects().min(64);
        Self::from_ids(g, (0..n).filter(|&k| mask >> k & 1 == 1).map(ObjectId))
    }

    /// Inverse of [`ObjectSet::from_mask`]; objects past index 63 are dropped.
    pub fn mask(&self) -> u64 {
        self.bits.ones().filter(|&k| k < 64).fold(0, |m, k| m | 1 << k)
    }

    pub fn from_labels<S: AsRef<str>>(g: &FiniteGroupoid, labels: &[S]) -> Result<Self> {
        let ids = labels.iter().map(|l| g.object_by_label(l.as_ref())).collect::<Result<Vec<_>>>()?;
        Ok(Self::from_ids(g, ids))
    }

    pub fn labels(&self, g: &FiniteGroupoid) -> Vec<String> {
        self.iter().map(|j| g.object_label(j).to_string()).collect()
    }
}

fn check_token(g: &FiniteGroupoid, token: u64) -> Result<()> {
    if g.token() == token {
        Ok(())
    } else {
        Err(Error::GroupoidMismatch)
    }
}

/// `B∘A = { β∘α : β ∈ B, α ∈ A, s(β) = t(α) }`.
pub fn set_product(g: &FiniteGroupoid, a: &MorphismSet, b: &MorphismSet) -> Result<MorphismSet> {
    check_token(g, a.token)?;
    check_token(g, b.token)?;
    let mut out = MorphismSet::empty(g);
    for alpha in a.iter() {
        for &beta in g.with_source(g.target(alpha)) {
            if b.contains(beta) {
                if let Some(c) = g.compose(beta, alpha) {
                    out.insert(c);
                }
            }
        }
    }
    Ok(out)
}

/// s⁻¹(a).
pub fn source_fiber(g: &FiniteGroupoid, a: &ObjectSet) -> MorphismSet {
    MorphismSet::from_ids(g, a.iter().flat_map(|j| g.with_source(j).iter().copied()))
}

/// t⁻¹(b), which equals τ(s⁻¹(b)).
pub fn target_fiber(g: &FiniteGroupoid, b: &ObjectSet) -> MorphismSet {
    MorphismSet::from_ids(g, b.iter().flat_map(|j| g.with_target(j).iter().copied()))
}

/// The product set `t⁻¹(b)∘s⁻¹(a)` underlying the conditioning relation.
pub fn transition_set(g: &FiniteGroupoid, b: &ObjectSet, a: &ObjectSet) -> Result<MorphismSet> {
    check_token(g, a.token)?;
    check_token(g, b.token)?;
    set_product(g, &source_fiber(g, a), &target_fiber(g, b))
}

/// Whether `a` and `b` are conditioned: `t⁻¹(b)∘s⁻¹(a) ≠ ∅`.
pub fn conditioned(g: &FiniteGroupoid, a: &ObjectSet, b: &ObjectSet) -> Result<bool> {
    Ok(!transition_set(g, b, a)?.is_empty())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitivityWitness {
    pub a: Vec<String>,
    pub b: Vec<String>,
    pub c: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationCounterexamples {
    /// A non-empty subset not conditioned with itself.
    pub reflexive: Option<Vec<String>>,
    /// `(a, b)` with `a ~ b` but not `b ~ a`.
    pub symmetric: Option<(Vec<String>, Vec<String>)>,
    /// `a ~ b`, `b ~ c`, but not `a ~ c`.
    pub transitive: Option<TransitivityWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationReport {
    pub reflexive_on_nonempty: bool,
    pub symmetric: bool,
    pub transitive: bool,
    pub counterexamples: RelationCounterexamples,
    /// True when subsets were sampled instead of enumerated.
    pub sampled: bool,
    pub subsets_examined: usize,
}

/// Per-object set of objects reachable by one morphism, as masks.
fn reach_masks(g: &FiniteGroupoid) -> Vec<u64> {
    g.objects()
        .map(|i| g.with_source(i).iter().fold(0u64, |m, &x| m | 1 << g.target(x).0))
        .collect()
}

/// Conditioning over all non-empty subsets of Ω (|Ω| capped by [`Limits`]).
pub fn relation_report(g: &FiniteGroupoid) -> Result<RelationReport> {
    relation_report_with_limits(g, &Limits::from_env())
}

pub fn relation_report_with_limits(g: &FiniteGroupoid, limits: &Limits) -> Result<RelationReport> {
    let n = g.num_objects();
    limits.check_scan(n)?;
    let reach = reach_masks(g);
    let count = 1u64 << n;
    // neighborhood[a] = objects reachable from some point of a
    let mut neighborhood = vec![0u64; count as usize];
    for a in 1..count {
        let low = a.trailing_zeros() as usize;
        neighborhood[a as usize] = neighborhood[(a & (a - 1)) as usize] | reach[low];
    }
    let cond = |a: u64, b: u64| neighborhood[a as usize] & b != 0;
    let labels = |m: u64| ObjectSet::from_mask(g, m).labels(g);

    let mut ce = RelationCounterexamples::default();
    for a in 1..count {
        if ce.reflexive.is_none() && !cond(a, a) {
            ce.reflexive = Some(labels(a));
        }
        if ce.symmetric.is_none() {
            if let Some(b) = (1..count).find(|&b| cond(a, b) != cond(b, a)) {
                let (x, y) = if cond(a, b) { (a, b) } else { (b, a) };
                ce.symmetric = Some((labels(x), labels(y)));
            }
        }
        if ce.transitive.is_none() {
            // any unconditioned pair of non-empty sets breaks transitivity through some b
            if let Some(c) = (1..count).find(|&c| !cond(a, c)) {
                if let Some(b) = (1..count).find(|&b| cond(a, b) && cond(b, c)) {
                    ce.transitive = Some(TransitivityWitness { a: labels(a), b: labels(b), c: labels(c) });
                }
            }
        }
    }

    Ok(RelationReport {
        reflexive_on_nonempty: ce.reflexive.is_none(),
        symmetric: ce.symmetric.is_none(),
        transitive: ce.transitive.is_none(),
        counterexamples: ce,
        sampled: false,
        subsets_examined: (count - 1) as usize,
    })
}

/// Same checks on `samples` uniformly drawn triples of non-empty subsets.
pub fn relation_report_sampled<R: Rng + ?Sized>(g: &FiniteGroupoid, samples: usize, rng: &mut R) -> RelationReport {
    let n = g.num_objects();
    let reach: Vec<FixedBitSet> = g
        .objects()
        .map(|i| {
            let mut s = FixedBitSet::with_capacity(n);
            for &x in g.with_source(i) {
                s.insert(g.target(x).0);
            }
            s
        })
        .collect();
    let cond = |a: &ObjectSet, b: &ObjectSet| {
        let mut nb = FixedBitSet::with_capacity(n);
        for i in a.iter() {
            nb.union_with(&reach[i.0]);
        }
        !nb.is_disjoint(&b.bits)
    };
    let draw = |rng: &mut R| loop {
        let s = ObjectSet::from_ids(g, g.objects().filter(|_| rng.random_bool(0.5)));
        if !s.is_empty() {
            return s;
        }
    };

    let mut ce = RelationCounterexamples::default();
    for _ in 0..samples {
        let (a, b, c) = (draw(rng), draw(rng), draw(rng));
        if ce.reflexive.is_none() && !cond(&a, &a) {
            ce.reflexive = Some(a.labels(g));
        }
        if ce.symmetric.is_none() && cond(&a, &b) != cond(&b, &a) {
            ce.symmetric = Some(if cond(&a, &b) { (a.labels(g), b.labels(g)) } else { (b.labels(g), a.labels(g)) });
        }
        if ce.transitive.is_none() && cond(&a, &b) && cond(&b, &c) && !cond(&a, &c) {
            ce.transitive = Some(TransitivityWitness { a: a.labels(g), b: b.labels(g), c: c.labels(g) });
        }
    }
    RelationReport {
        reflexive_on_nonempty: ce.reflexive.is_none(),
        symmetric: ce.symmetric.is_none(),
        transitive: ce.transitive.is_none(),
        counterexamples: ce,
        sampled: true,
        subsets_examined: samples * 3,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{cyclic_group, disjoint_union, pair_groupoid, unit_groupoid};

    fn morphisms(g: &FiniteGroupoid, labels: &[&str]) -> MorphismSet {
        MorphismSet::from_ids(g, labels.iter().map(|l| g.morphism_by_label(l).unwrap()))
    }

    fn objects(g: &FiniteGroupoid, labels: &[&str]) -> ObjectSet {
        ObjectSet::from_labels(g, labels).unwrap()
    }

    #[test]
    fn unit_product_is_intersection() {
        let g = unit_groupoid(3).unwrap();
        let a = morphisms(&g, &["(1,1)", "(2,2)"]);
        let b = morphisms(&g, &["(2,2)", "(3,3)"]);
        assert_eq!(set_product(&g, &a, &b).unwrap(), morphisms(&g, &["(2,2)"]));
    }

    #[test]
    fn pair_product_of_fibers() {
        let g = pair_groupoid(2).unwrap();
        let a = source_fiber(&g, &objects(&g, &["1"]));
        let b = target_fiber(&g, &objects(&g, &["2"]));
        assert_eq!(set_product(&g, &a, &b).unwrap(), morphisms(&g, &["(2,1)"]));
    }

    #[test]
    fn empty_factor_gives_empty_product() {
        let g = pair_groupoid(3).unwrap();
        let e = MorphismSet::empty(&g);
        assert!(set_product(&g, &e, &MorphismSet::full(&g)).unwrap().is_empty());
        assert!(set_product(&g, &MorphismSet::full(&g), &e).unwrap().is_empty());
    }

    #[test]
    fn product_rejects_foreign_sets() {
        let g = pair_groupoid(2).unwrap();
        let h = pair_groupoid(2).unwrap();
        let a = MorphismSet::full(&g);
        let b = MorphismSet::full(&h);
        assert!(matches!(set_product(&g, &a, &b), Err(Error::GroupoidMismatch)));
    }

    #[test]
    fn fibers() {
        let g = pair_groupoid(3).unwrap();
        let s = source_fiber(&g, &objects(&g, &["2"]));
        assert_eq!(s.labels(&g), vec!["(1,2)", "(2,2)", "(3,2)"]);
        assert_eq!(source_fiber(&g, &ObjectSet::full(&g)), MorphismSet::full(&g));
        for mask in 0..8 {
            let b = ObjectSet::from_mask(&g, mask);
            assert_eq!(source_fiber(&g, &b).inverted(&g), target_fiber(&g, &b));
        }
        let u = unit_groupoid(4).unwrap();
        for mask in 0..16 {
            let a = ObjectSet::from_mask(&u, mask);
            assert_eq!(source_fiber(&u, &a), target_fiber(&u, &a));
            assert_eq!(source_fiber(&u, &a).len(), a.len());
        }
    }

    #[test]
    fn conditioning_examples() {
        let u = unit_groupoid(4).unwrap();
        for a in 0..16u64 {
            for b in 0..16u64 {
                let (sa, sb) = (ObjectSet::from_mask(&u, a), ObjectSet::from_mask(&u, b));
                assert_eq!(conditioned(&u, &sa, &sb).unwrap(), a & b != 0);
            }
        }
        let p = pair_groupoid(3).unwrap();
        for a in 0..8u64 {
            for b in 0..8u64 {
                let (sa, sb) = (ObjectSet::from_mask(&p, a), ObjectSet::from_mask(&p, b));
                assert_eq!(conditioned(&p, &sa, &sb).unwrap(), a != 0 && b != 0);
            }
        }
    }

    #[test]
    fn mask_fast_path_agrees_with_product() {
        let p = pair_groupoid(2).unwrap();
        let g = disjoint_union(&p, &unit_groupoid(2).unwrap()).unwrap();
        let reach = reach_masks(&g);
        for a in 0..16u64 {
            let nb = (0..4).filter(|k| a >> k & 1 == 1).fold(0, |m, k| m | reach[k]);
            for b in 0..16u64 {
                let slow = conditioned(&g, &ObjectSet::from_mask(&g, a), &ObjectSet::from_mask(&g, b)).unwrap();
                assert_eq!(slow, nb & b != 0);
            }
        }
    }

    #[test]
    fn relation_reports() {
        let r = relation_report(&unit_groupoid(3).unwrap()).unwrap();
        assert!(r.reflexive_on_nonempty && r.symmetric && !r.transitive);
        assert_eq!(
            r.counterexamples.transitive,
            Some(TransitivityWitness { a: vec!["1".into()], b: vec!["1".into(), "2".into()], c: vec!["2".into()] })
        );

        let r = relation_report(&pair_groupoid(3).unwrap()).unwrap();
        assert!(r.reflexive_on_nonempty && r.symmetric && r.transitive);

        let p = pair_groupoid(2).unwrap();
        let g = disjoint_union(&p, &p).unwrap();
        let r = relation_report(&g).unwrap();
        assert!(r.symmetric && !r.transitive);
        let w = r.counterexamples.transitive.unwrap();
        let orbit = |labels: &[String]| -> Vec<char> {
            let mut v: Vec<char> = labels.iter().map(|l| l.chars().next().unwrap()).collect();
            v.dedup();
            v
        };
        assert_eq!(orbit(&w.a).len(), 1);
        assert_eq!(orbit(&w.c).len(), 1);
        assert_ne!(orbit(&w.a), orbit(&w.c));
        assert_eq!(orbit(&w.b).len(), 2);
    }

    #[test]
    fn relation_scan_is_capped() {
        let g = unit_groupoid(13).unwrap();
        assert!(matches!(relation_report(&g), Err(Error::Resource { .. })));
        let mut rng = rand::rng();
        let r = relation_report_sampled(&g, 200, &mut rng);
        assert!(r.sampled && r.symmetric && r.reflexive_on_nonempty);
    }

    #[test]
    fn group_relation_is_an_equivalence() {
        let r = relation_report(&cyclic_group(3).unwrap()).unwrap();
        assert!(r.reflexive_on_nonempty && r.symmetric && r.transitive);
    }
}
