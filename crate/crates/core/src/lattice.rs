//! Finite lattice checks: orthocomplement laws, distributivity, the modular
//! identity, irreducibility and dimension functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::Limits;

/// A finite bounded lattice with a complement map, elements indexed `0..size()`.
pub trait Lattice {
    fn size(&self) -> usize;
    fn leq(&self, a: usize, b: usize) -> bool;
    fn meet(&self, a: usize, b: usize) -> usize;
    fn join(&self, a: usize, b: usize) -> usize;
    fn complement(&self, a: usize) -> usize;
    fn top(&self) -> usize;
    fn bottom(&self) -> usize;
    fn label(&self, a: usize) -> String;
}

/// P({1..n}) with elements encoded as bitmasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PowersetLattice {
    n: usize,
}

impl PowersetLattice {
    pub fn atoms(&self) -> usize {
        self.n
    }

    pub fn to_table(&self) -> FiniteLattice {
        let size = self.size();
        let mut leq = vec![false; size * size];
        let mut meet = vec![0; size * size];
        let mut join = vec![0; size * size];
        for a in 0..size {
            for b in 0..size {
                leq[a * size + b] = self.leq(a, b);
                meet[a * size + b] = self.meet(a, b);
                join[a * size + b] = self.join(a, b);
            }
        }
        FiniteLattice {
            labels: (0..size).map(|a| self.label(a)).collect(),
            leq,
            meet,
            join,
            complement: (0..size).map(|a| self.complement(a)).collect(),
            top: self.top(),
            bottom: self.bottom(),
        }
    }
}

/// The power set of `n` atoms.
pub fn powerset_lattice(n: usize) -> Result<PowersetLattice> {
    Limits::from_env().check_scan(n)?;
    Ok(PowersetLattice { n })
}

impl Lattice for PowersetLattice {
    fn size(&self) -> usize {
        1 << self.n
    }
    fn leq(&self, a: usize, b: usize) -> bool {
        a & !b == 0
    }
    fn meet(&self, a: usize, b: usize) -> usize {
        a & b
    }
    fn join(&self, a: usize, b: usize) -> usize {
        a | b
    }
    fn complement(&self, a: usize) -> usize {
        !a & (self.size() - 1)
    }
    fn top(&self) -> usize {
        self.size() - 1
    }
    fn bottom(&self) -> usize {
        0
    }
    fn label(&self, a: usize) -> String {
        let items: Vec<String> = (0..self.n).filter(|k| a >> k & 1 == 1).map(|k| (k + 1).to_string()).collect();
        format!("{{{}}}", items.join(","))
    }
}

/// A lattice given by explicit order, meet and join tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteLattice {
    labels: Vec<String>,
    leq: Vec<bool>,
    meet: Vec<usize>,
    join: Vec<usize>,
    complement: Vec<usize>,
    top: usize,
    bottom: usize,
}

impl FiniteLattice {
    /// Builds the lattice generated by the order pairs `(a, b)` meaning `a ≤ b`.
    ///
    /// The reflexive-transitive closure of the pairs is taken. Fails unless
    /// the closure is antisymmetric, every pair has a meet and a join, and
    /// `complement` satisfies `a ∨ a⊥ = 𝕀`, `a ∧ a⊥ = ∅`.
    pub fn from_order(labels: Vec<String>, order: &[(usize, usize)], complement: Vec<usize>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::Structure("a lattice needs at least one element".into()));
        }
        if complement.len() != n || complement.iter().any(|&c| c >= n) {
            return Err(Error::Structure("complement must map every element to an element".into()));
        }
        let mut leq = vec![false; n * n];
        for a in 0..n {
            leq[a * n + a] = true;
        }
        for &(a, b) in order {
            if a >= n || b >= n {
                return Err(Error::Structure(format!("order pair ({a}, {b}) out of range")));
            }
            leq[a * n + b] = true;
        }
        // Warshall closure
        for k in 0..n {
            for a in 0..n {
                if leq[a * n + k] {
                    for b in 0..n {
                        if leq[k * n + b] {
                            leq[a * n + b] = true;
                        }
                    }
                }
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                if leq[a * n + b] && leq[b * n + a] {
                    return Err(Error::Structure(format!("`{}` and `{}` are mutually below each other", labels[a], labels[b])));
                }
            }
        }

        let bound = |a: usize, b: usize, lower: bool| -> Option<usize> {
            let below = |x: usize, y: usize| if lower { leq[x * n + y] } else { leq[y * n + x] };
            let candidates: Vec<usize> = (0..n).filter(|&x| below(x, a) && below(x, b)).collect();
            candidates.iter().copied().find(|&x| candidates.iter().all(|&y| below(y, x)))
        };
        let mut meet = vec![0; n * n];
        let mut join = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                meet[a * n + b] = bound(a, b, true)
                    .ok_or_else(|| Error::Structure(format!("no meet for `{}` and `{}`", labels[a], labels[b])))?;
                join[a * n + b] = bound(a, b, false)
                    .ok_or_else(|| Error::Structure(format!("no join for `{}` and `{}`", labels[a], labels[b])))?;
            }
        }
        let bottom = (0..n).find(|&x| (0..n).all(|y| leq[x * n + y])).expect("finite lattice has a bottom");
        let top = (0..n).find(|&x| (0..n).all(|y| leq[y * n + x])).expect("finite lattice has a top");

        let lattice = FiniteLattice { labels, leq, meet, join, complement, top, bottom };
        for a in 0..n {
            let c = lattice.complement[a];
            if lattice.join(a, c) != top || lattice.meet(a, c) != bottom {
                return Err(Error::Structure(format!(
                    "`{}` is not a complement of `{}`",
                    lattice.labels[c], lattice.labels[a]
                )));
            }
        }
        Ok(lattice)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

impl Lattice for FiniteLattice {
    fn size(&self) -> usize {
        self.labels.len()
    }
    fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a * self.size() + b]
    }
    fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.size() + b]
    }
    fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.size() + b]
    }
    fn complement(&self, a: usize) -> usize {
        self.complement[a]
    }
    fn top(&self) -> usize {
        self.top
    }
    fn bottom(&self) -> usize {
        self.bottom
    }
    fn label(&self, a: usize) -> String {
        self.labels[a].clone()
    }
}

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// The diamond M₃: 0 < a, b, c < 1. It admits no orthocomplementation
/// (odd number of atoms), so the complement cycles a → b → c → a.
pub fn diamond_m3() -> FiniteLattice {
    let order = [(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)];
    FiniteLattice::from_order(labels(&["0", "a", "b", "c", "1"]), &order, vec![4, 2, 3, 1, 0])
        .expect("M3 fixture is a lattice")
}

/// The pentagon N₅: 0 < a < c < 1, 0 < b < 1.
pub fn pentagon_n5() -> FiniteLattice {
    let order = [(0, 1), (1, 3), (3, 4), (0, 2), (2, 4)];
    FiniteLattice::from_order(labels(&["0", "a", "b", "c", "1"]), &order, vec![4, 2, 1, 2, 0])
        .expect("N5 fixture is a lattice")
}

/// MO₂: two orthogonal pairs {a, a⊥}, {b, b⊥} between 0 and 1.
pub fn chinese_lantern_mo2() -> FiniteLattice {
    let order = [(0, 1), (0, 2), (0, 3), (0, 4), (1, 5), (2, 5), (3, 5), (4, 5)];
    FiniteLattice::from_order(labels(&["0", "a", "a'", "b", "b'", "1"]), &order, vec![5, 2, 1, 4, 3, 0])
        .expect("MO2 fixture is a lattice")
}

/// One instance of the modular identity: `a ≤ c ⇒ a ∨ (b ∧ c) = (a ∨ b) ∧ c`.
pub fn modular_check<L: Lattice + ?Sized>(l: &L, a: usize, b: usize, c: usize) -> bool {
    !l.leq(a, c) || l.join(a, l.meet(b, c)) == l.meet(l.join(a, b), c)
}

/// All triples `(a, b, c)` violating the modular identity.
pub fn modular_audit<L: Lattice + ?Sized>(l: &L) -> Vec<(usize, usize, usize)> {
    let n = l.size();
    let mut out = Vec::new();
    for a in 0..n {
        for c in 0..n {
            if !l.leq(a, c) {
                continue;
            }
            for b in 0..n {
                if !modular_check(l, a, b, c) {
                    out.push((a, b, c));
                }
            }
        }
    }
    out
}

/// All triples violating `a ∧ (b ∨ c) = (a ∧ b) ∨ (a ∧ c)`.
pub fn distributive_audit<L: Lattice + ?Sized>(l: &L) -> Vec<(usize, usize, usize)> {
    let n = l.size();
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if l.meet(a, l.join(b, c)) != l.join(l.meet(a, b), l.meet(a, c)) {
                    out.push((a, b, c));
                }
            }
        }
    }
    out
}

/// Every `x` with `a = (a ∧ x) ∨ (a ∧ x⊥)` for all `a`.
pub fn irreducible_elements<L: Lattice + ?Sized>(l: &L) -> Vec<usize> {
    let n = l.size();
    (0..n)
        .filter(|&x| {
            let xc = l.complement(x);
            (0..n).all(|a| l.join(l.meet(a, x), l.meet(a, xc)) == a)
        })
        .collect()
}

/// True when only ∅ and 𝕀 pass [`irreducible_elements`].
pub fn is_irreducible<L: Lattice + ?Sized>(l: &L) -> bool {
    let mut expected = vec![l.bottom(), l.top()];
    expected.sort();
    expected.dedup();
    irreducible_elements(l) == expected
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrthoViolation {
    NotComplement { a: usize },
    NotInvolution { a: usize },
    NotOrderReversing { a: usize, b: usize },
}

/// Checks the orthocomplement laws; empty iff the complement is an orthocomplementation.
pub fn orthocomplement_audit<L: Lattice + ?Sized>(l: &L) -> Vec<OrthoViolation> {
    let n = l.size();
    let mut out = Vec::new();
    for a in 0..n {
        let c = l.complement(a);
        if l.join(a, c) != l.top() || l.meet(a, c) != l.bottom() {
            out.push(OrthoViolation::NotComplement { a });
        }
        if l.complement(c) != a {
            out.push(OrthoViolation::NotInvolution { a });
        }
        for b in 0..n {
            if l.leq(a, b) && !l.leq(l.complement(b), c) {
                out.push(OrthoViolation::NotOrderReversing { a, b });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DimensionReport {
    /// Pairs `(a, b)` with `b < a` but `d(a) ≤ d(b)`.
    pub monotonicity: Vec<(usize, usize)>,
    /// Pairs with `|d(a) + d(b) − d(a∧b) − d(a∨b)| > tol`.
    pub valuation: Vec<(usize, usize)>,
}

impl DimensionReport {
    pub fn is_valid(&self) -> bool {
        self.monotonicity.is_empty() && self.valuation.is_empty()
    }
}

pub const VALUATION_TOLERANCE: f64 = 1e-12;

/// Checks strict monotonicity on comparable pairs and the valuation law on all pairs.
///
/// Incomparable pairs carry no monotonicity constraint.
pub fn dimension_check<L: Lattice + ?Sized>(l: &L, d: &[f64]) -> Result<DimensionReport> {
    let n = l.size();
    if d.len() != n {
        return Err(Error::Domain(format!("dimension table has {} entries for {n} elements", d.len())));
    }
    if let Some((a, v)) = d.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
        return Err(Error::Domain(format!("d({}) = {v} is outside [0, 1]", l.label(a))));
    }
    let mut report = DimensionReport::default();
    for a in 0..n {
        for b in 0..n {
            if a != b && l.leq(b, a) && d[a] <= d[b] {
                report.monotonicity.push((a, b));
            }
            if b >= a {
                let lhs = d[a] + d[b];
                let rhs = d[l.meet(a, b)] + d[l.join(a, b)];
                if (lhs - rhs).abs() > VALUATION_TOLERANCE {
                    report.valuation.push((a, b));
                }
            }
        }
    }
    Ok(report)
}
