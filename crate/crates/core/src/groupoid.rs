//! Finite groupoids stored as explicit partial composition tables.
//!
//! Objects and morphisms are dense indices; labels live in side tables and
//! are only used for I/O and reports. The composition table is kept as
//! sparse rows `α ↦ [(β, α∘β)]`, so [`FiniteGroupoid::validate`] can detect
//! entries on non-composable pairs as well as missing ones.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::Limits;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ObjectId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MorphismId(pub usize);

impl ObjectId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl MorphismId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

static NEXT_TOKEN: AtomicU64 = AtomicU64::new(1);

fn fresh_token() -> u64 {
    NEXT_TOKEN.fetch_add(1, Ordering::Relaxed)
}

/// Index-based raw description of a groupoid, before structural checks.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupoidParts {
    pub object_labels: Vec<String>,
    pub morphism_labels: Vec<String>,
    pub source: Vec<usize>,
    pub target: Vec<usize>,
    /// Entries `(a, b, a∘b)`.
    pub compose: Vec<(usize, usize, usize)>,
    pub inverse: Vec<usize>,
    /// Units per object. Inferred from idempotents in the isotropy groups when absent.
    pub units: Option<Vec<usize>>,
}

#[derive(Debug, Clone)]
pub struct FiniteGroupoid {
    token: u64,
    object_labels: Vec<String>,
    morphism_labels: Vec<String>,
    source: Vec<ObjectId>,
    target: Vec<ObjectId>,
    // rows[a] = sorted (b, a∘b)
    rows: Vec<Vec<(MorphismId, MorphismId)>>,
    inverse: Vec<MorphismId>,
    units: Vec<MorphismId>,
    by_source: Vec<Vec<MorphismId>>,
    by_target: Vec<Vec<MorphismId>>,
}

impl FiniteGroupoid {
    pub fn from_parts(parts: GroupoidParts) -> Result<Self> {
        Self::from_parts_with_limits(parts, &Limits::from_env())
    }

    pub fn from_parts_with_limits(parts: GroupoidParts, limits: &Limits) -> Result<Self> {
        let n_obj = parts.object_labels.len();
        let n_mor = parts.morphism_labels.len();
        if n_obj == 0 {
            return Err(Error::EmptyGroupoid);
        }
        limits.check_morphisms(n_mor)?;
        if parts.source.len() != n_mor || parts.target.len() != n_mor || parts.inverse.len() != n_mor {
            return Err(Error::Structure(
                "source, target and inverse must be given for every morphism".into(),
            ));
        }
        unique_labels(&parts.object_labels, "object")?;
        unique_labels(&parts.morphism_labels, "morphism")?;

        let obj = |i: usize, what: &str| -> Result<ObjectId> {
            if i < n_obj {
                Ok(ObjectId(i))
            } else {
                Err(Error::Structure(format!("{what} refers to object index {i}")))
            }
        };
        let mor = |i: usize, what: &str| -> Result<MorphismId> {
            if i < n_mor {
                Ok(MorphismId(i))
            } else {
                Err(Error::Structure(format!("{what} refers to morphism index {i}")))
            }
        };

        let source = parts.source.iter().map(|&i| obj(i, "source")).collect::<Result<Vec<_>>>()?;
        let target = parts.target.iter().map(|&i| obj(i, "target")).collect::<Result<Vec<_>>>()?;
        let inverse = parts.inverse.iter().map(|&i| mor(i, "inverse")).collect::<Result<Vec<_>>>()?;

        let mut rows: Vec<Vec<(MorphismId, MorphismId)>> = vec![Vec::new(); n_mor];
        for &(a, b, c) in &parts.compose {
            let (a, b, c) = (mor(a, "composition")?, mor(b, "composition")?, mor(c, "composition")?);
            rows[a.0].push((b, c));
        }
        for (a, row) in rows.iter_mut().enumerate() {
            row.sort();
            for w in row.windows(2) {
                if w[0].0 == w[1].0 && w[0].1 != w[1].1 {
                    return Err(Error::Structure(format!(
                        "conflicting compositions for ({}, {})",
                        parts.morphism_labels[a], parts.morphism_labels[w[0].0 .0]
                    )));
                }
            }
            row.dedup();
        }

        let mut by_source = vec![Vec::new(); n_obj];
        let mut by_target = vec![Vec::new(); n_obj];
        for m in 0..n_mor {
            by_source[source[m].0].push(MorphismId(m));
            by_target[target[m].0].push(MorphismId(m));
        }

        let mut g = FiniteGroupoid {
            token: fresh_token(),
            object_labels: parts.object_labels,
            morphism_labels: parts.morphism_labels,
            source,
            target,
            rows,
            inverse,
            units: Vec::new(),
            by_source,
            by_target,
        };

        g.units = match parts.units {
            Some(units) => {
                if units.len() != n_obj {
                    return Err(Error::Structure("one unit per object is required".into()));
                }
                units.iter().map(|&u| mor(u, "unit")).collect::<Result<Vec<_>>>()?
            }
            None => (0..n_obj)
                .map(|j| {
                    let j = ObjectId(j);
                    g.by_source[j.0]
                        .iter()
                        .copied()
                        .find(|&e| g.target(e) == j && g.compose(e, e) == Some(e))
                        .ok_or_else(|| {
                            Error::Structure(format!("object `{}` has no unit candidate", g.object_label(j)))
                        })
                })
                .collect::<Result<Vec<_>>>()?,
        };
        Ok(g)
    }

    /// The raw tables, suitable for editing and rebuilding.
    pub fn to_parts(&self) -> GroupoidParts {
        let mut compose = Vec::new();
        for (a, row) in self.rows.iter().enumerate() {
            for &(b, c) in row {
                compose.push((a, b.0, c.0));
            }
        }
        GroupoidParts {
            object_labels: self.object_labels.clone(),
            morphism_labels: self.morphism_labels.clone(),
            source: self.source.iter().map(|o| o.0).collect(),
            target: self.target.iter().map(|o| o.0).collect(),
            compose,
            inverse: self.inverse.iter().map(|m| m.0).collect(),
            units: Some(self.units.iter().map(|m| m.0).collect()),
        }
    }

    /// Identity token shared by values derived from this groupoid.
    #[inline]
    pub fn token(&self) -> u64 {
        self.token
    }

    #[inline]
    pub fn num_objects(&self) -> usize {
        self.object_labels.len()
    }

    #[inline]
    pub fn num_morphisms(&self) -> usize {
        self.morphism_labels.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjectId> + '_ {
        (0..self.num_objects()).map(ObjectId)
    }

    pub fn morphisms(&self) -> impl Iterator<Item = MorphismId> + '_ {
        (0..self.num_morphisms()).map(MorphismId)
    }

    #[inline]
    pub fn source(&self, m: MorphismId) -> ObjectId {
        self.source[m.0]
    }

    #[inline]
    pub fn target(&self, m: MorphismId) -> ObjectId {
        self.target[m.0]
    }

    #[inline]
    pub fn inverse(&self, m: MorphismId) -> MorphismId {
        self.inverse[m.0]
    }

    #[inline]
    pub fn unit_at(&self, j: ObjectId) -> MorphismId {
        self.units[j.0]
    }

    pub fn is_unit(&self, m: MorphismId) -> bool {
        let s = self.source(m);
        self.target(m) == s && self.units[s.0] == m
    }

    #[inline]
    pub fn composable(&self, a: MorphismId, b: MorphismId) -> bool {
        self.source(a) == self.target(b)
    }

    /// `a∘b` as recorded in the table.
    pub fn compose(&self, a: MorphismId, b: MorphismId) -> Option<MorphismId> {
        let row = &self.rows[a.0];
        row.binary_search_by_key(&b, |&(x, _)| x).ok().map(|i| row[i].1)
    }

    /// Recorded entries `(b, a∘b)` for a fixed left factor `a`.
    pub fn compose_row(&self, a: MorphismId) -> &[(MorphismId, MorphismId)] {
        &self.rows[a.0]
    }

    /// G_j: morphisms with source j.
    pub fn with_source(&self, j: ObjectId) -> &[MorphismId] {
        &self.by_source[j.0]
    }

    /// G^j: morphisms with target j.
    pub fn with_target(&self, j: ObjectId) -> &[MorphismId] {
        &self.by_target[j.0]
    }

    pub fn object_label(&self, j: ObjectId) -> &str {
        &self.object_labels[j.0]
    }

    pub fn morphism_label(&self, m: MorphismId) -> &str {
        &self.morphism_labels[m.0]
    }

    pub fn object_labels(&self) -> &[String] {
        &self.object_labels
    }

    pub fn morphism_labels(&self) -> &[String] {
        &self.morphism_labels
    }

    pub fn object_by_label(&self, label: &str) -> Result<ObjectId> {
        self.object_labels
            .iter()
            .position(|l| l == label)
            .map(ObjectId)
            .ok_or_else(|| Error::UnknownObject(label.to_string()))
    }

    pub fn morphism_by_label(&self, label: &str) -> Result<MorphismId> {
        self.morphism_labels
            .iter()
            .position(|l| l == label)
            .map(MorphismId)
            .ok_or_else(|| Error::UnknownMorphism(label.to_string()))
    }

    fn check_object(&self, j: ObjectId) -> Result<()> {
        if j.0 < self.num_objects() {
            Ok(())
        } else {
            Err(Error::UnknownObject(format!("#{}", j.0)))
        }
    }

    /// Checks every groupoid axiom instance by enumeration.
    pub fn validate(&self) -> ValidationReport {
        let label = |m: MorphismId| self.morphism_label(m).to_string();
        let mut violations = Vec::new();

        for a in self.morphisms() {
            for &b in self.with_target(self.source(a)) {
                if self.compose(a, b).is_none() {
                    violations.push(Violation::MissingComposition { a: label(a), b: label(b) });
                }
            }
            for &(b, c) in self.compose_row(a) {
                if !self.composable(a, b) {
                    violations.push(Violation::NonComposable { a: label(a), b: label(b), result: label(c) });
                } else if self.source(c) != self.source(b) || self.target(c) != self.target(a) {
                    violations.push(Violation::EndpointMismatch { a: label(a), b: label(b), result: label(c) });
                }
            }
        }

        for j in self.objects() {
            let u = self.unit_at(j);
            if self.source(u) != j || self.target(u) != j {
                violations.push(Violation::UnitEndpoints {
                    object: self.object_label(j).to_string(),
                    unit: label(u),
                });
            }
        }

        for a in self.morphisms() {
            let right_unit = self.unit_at(self.source(a));
            if self.compose(a, right_unit) != Some(a) {
                violations.push(Violation::UnitLaw { morphism: label(a), unit: label(right_unit), side: Side::Right });
            }
            let left_unit = self.unit_at(self.target(a));
            if self.compose(left_unit, a) != Some(a) {
                violations.push(Violation::UnitLaw { morphism: label(a), unit: label(left_unit), side: Side::Left });
            }
        }

        for a in self.morphisms() {
            let inv = self.inverse(a);
            if self.inverse(inv) != a {
                violations.push(Violation::InverseNotInvolutive { morphism: label(a) });
            }
            if self.compose(inv, a) != Some(self.unit_at(self.source(a))) {
                violations.push(Violation::InverseLaw { morphism: label(a), side: Side::Left });
            }
            if self.compose(a, inv) != Some(self.unit_at(self.target(a))) {
                violations.push(Violation::InverseLaw { morphism: label(a), side: Side::Right });
            }
        }

        for a in self.morphisms() {
            for &(b, ab) in self.compose_row(a) {
                if !self.composable(a, b) {
                    continue;
                }
                for &(c, bc) in self.compose_row(b) {
                    if !self.composable(b, c) {
                        continue;
                    }
                    if let (Some(l), Some(r)) = (self.compose(ab, c), self.compose(a, bc)) {
                        if l != r {
                            violations.push(Violation::Associativity {
                                a: label(a),
                                b: label(b),
                                c: label(c),
                                left: label(l),
                                right: label(r),
                            });
                        }
                    }
                }
            }
        }

        ValidationReport { violations }
    }

    /// Connected components of Ω, each sorted, ordered by smallest member.
    pub fn orbits(&self) -> Vec<Vec<ObjectId>> {
        let ids = self.orbit_ids();
        let count = ids.iter().copied().max().map_or(0, |m| m + 1);
        let mut orbits = vec![Vec::new(); count];
        for j in self.objects() {
            orbits[ids[j.0]].push(j);
        }
        orbits
    }

    /// Orbit index per object, numbered in order of first appearance.
    pub fn orbit_ids(&self) -> Vec<usize> {
        let n = self.num_objects();
        let mut ids = vec![usize::MAX; n];
        let mut next = 0;
        for start in 0..n {
            if ids[start] != usize::MAX {
                continue;
            }
            ids[start] = next;
            let mut stack = vec![start];
            while let Some(j) = stack.pop() {
                for &m in self.with_source(ObjectId(j)).iter().chain(self.with_target(ObjectId(j))) {
                    for k in [self.source(m).0, self.target(m).0] {
                        if ids[k] == usize::MAX {
                            ids[k] = next;
                            stack.push(k);
                        }
                    }
                }
            }
            next += 1;
        }
        ids
    }

    /// The isotropy group G_j^j.
    pub fn isotropy(&self, j: ObjectId) -> Result<Vec<MorphismId>> {
        self.check_object(j)?;
        Ok(self.with_source(j).iter().copied().filter(|&m| self.target(m) == j).collect())
    }

    /// Whether `β ↦ α∘β` maps G^{s(α)} bijectively onto G^{t(α)}.
    pub fn left_translation_is_bijection(&self, alpha: MorphismId) -> bool {
        let domain = self.with_target(self.source(alpha));
        let codomain = self.with_target(self.target(alpha));
        if domain.len() != codomain.len() {
            return false;
        }
        let mut image = BTreeSet::new();
        for &b in domain {
            match self.compose(alpha, b) {
                Some(c) if self.target(c) == self.target(alpha) => {
                    image.insert(c);
                }
                _ => return false,
            }
        }
        image.len() == codomain.len()
    }

    /// The full sub-groupoid on `objects`, plus the map new morphism index → old.
    pub fn full_subgroupoid(&self, objects: &[ObjectId]) -> Result<(FiniteGroupoid, Vec<MorphismId>)> {
        if objects.is_empty() {
            return Err(Error::EmptyGroupoid);
        }
        let mut obj_map = vec![usize::MAX; self.num_objects()];
        for (new, &j) in objects.iter().enumerate() {
            self.check_object(j)?;
            obj_map[j.0] = new;
        }
        let kept: Vec<MorphismId> = self
            .morphisms()
            .filter(|&m| obj_map[self.source(m).0] != usize::MAX && obj_map[self.target(m).0] != usize::MAX)
            .collect();
        let mut mor_map = vec![usize::MAX; self.num_morphisms()];
        for (new, &m) in kept.iter().enumerate() {
            mor_map[m.0] = new;
        }
        let mut compose = Vec::new();
        for &a in &kept {
            for &(b, c) in self.compose_row(a) {
                if mor_map[b.0] != usize::MAX && mor_map[c.0] != usize::MAX {
                    compose.push((mor_map[a.0], mor_map[b.0], mor_map[c.0]));
                }
            }
        }
        let parts = GroupoidParts {
            object_labels: objects.iter().map(|&j| self.object_label(j).to_string()).collect(),
            morphism_labels: kept.iter().map(|&m| self.morphism_label(m).to_string()).collect(),
            source: kept.iter().map(|&m| obj_map[self.source(m).0]).collect(),
            target: kept.iter().map(|&m| obj_map[self.target(m).0]).collect(),
            compose,
            inverse: kept.iter().map(|&m| mor_map[self.inverse(m).0]).collect(),
            units: Some(objects.iter().map(|&j| mor_map[self.unit_at(j).0]).collect()),
        };
        if parts.inverse.contains(&usize::MAX) || parts.units.as_ref().unwrap().contains(&usize::MAX) {
            return Err(Error::Structure("sub-groupoid is not closed under inverses".into()));
        }
        Ok((FiniteGroupoid::from_parts(parts)?, kept))
    }
}

fn unique_labels(labels: &[String], what: &str) -> Result<()> {
    let mut seen = HashMap::with_capacity(labels.len());
    for l in labels {
        if seen.insert(l.as_str(), ()).is_some() {
            return Err(Error::Structure(format!("duplicate {what} label `{l}`")));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// s(a) = t(b) but a∘b is not recorded.
    MissingComposition { a: String, b: String },
    /// a∘b recorded although s(a) ≠ t(b).
    NonComposable { a: String, b: String, result: String },
    /// s(a∘b) ≠ s(b) or t(a∘b) ≠ t(a).
    EndpointMismatch { a: String, b: String, result: String },
    Associativity { a: String, b: String, c: String, left: String, right: String },
    UnitEndpoints { object: String, unit: String },
    UnitLaw { morphism: String, unit: String, side: Side },
    InverseLaw { morphism: String, side: Side },
    InverseNotInvolutive { morphism: String },
}

impl Violation {
    pub fn is_unit_law(&self) -> bool {
        matches!(self, Violation::UnitLaw { .. })
    }

    pub fn is_associativity(&self) -> bool {
        matches!(self, Violation::Associativity { .. })
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingComposition { a, b } => write!(f, "{a} ∘ {b} is composable but undefined"),
            Violation::NonComposable { a, b, result } => {
                write!(f, "{a} ∘ {b} = {result} recorded for a non-composable pair")
            }
            Violation::EndpointMismatch { a, b, result } => {
                write!(f, "{a} ∘ {b} = {result} has wrong source or target")
            }
            Violation::Associativity { a, b, c, left, right } => {
                write!(f, "({a} ∘ {b}) ∘ {c} = {left} but {a} ∘ ({b} ∘ {c}) = {right}")
            }
            Violation::UnitEndpoints { object, unit } => write!(f, "unit {unit} is not a loop at {object}"),
            Violation::UnitLaw { morphism, unit, side: Side::Right } => {
                write!(f, "{morphism} ∘ {unit} != {morphism}")
            }
            Violation::UnitLaw { morphism, unit, side: Side::Left } => {
                write!(f, "{unit} ∘ {morphism} != {morphism}")
            }
            Violation::InverseLaw { morphism, side: Side::Left } => {
                write!(f, "{morphism}⁻¹ ∘ {morphism} is not the unit at its source")
            }
            Violation::InverseLaw { morphism, side: Side::Right } => {
                write!(f, "{morphism} ∘ {morphism}⁻¹ is not the unit at its target")
            }
            Violation::InverseNotInvolutive { morphism } => write!(f, "({morphism}⁻¹)⁻¹ != {morphism}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn pair_label(j: usize, i: usize) -> String {
    format!("({j},{i})")
}

/// The pair groupoid Ω × Ω on objects `1..=n`; morphism `(j,i)` runs i → j.
pub fn pair_groupoid(n: usize) -> Result<FiniteGroupoid> {
    if n == 0 {
        return Err(Error::EmptyGroupoid);
    }
    Limits::from_env().check_morphisms(n.saturating_mul(n))?;
    // morphism (j,i) with 0-based j,i sits at index j*n + i
    let idx = |j: usize, i: usize| j * n + i;
    let mut morphism_labels = Vec::with_capacity(n * n);
    let mut source = Vec::with_capacity(n * n);
    let mut target = Vec::with_capacity(n * n);
    let mut inverse = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            morphism_labels.push(pair_label(j + 1, i + 1));
            source.push(i);
            target.push(j);
            inverse.push(idx(i, j));
        }
    }
    let mut compose = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                compose.push((idx(k, j), idx(j, i), idx(k, i)));
            }
        }
    }
    FiniteGroupoid::from_parts(GroupoidParts {
        object_labels: (1..=n).map(|j| j.to_string()).collect(),
        morphism_labels,
        source,
        target,
        compose,
        inverse,
        units: Some((0..n).map(|j| idx(j, j)).collect()),
    })
}

/// A plain set `1..=n` seen as a groupoid of units.
pub fn unit_groupoid(n: usize) -> Result<FiniteGroupoid> {
    if n == 0 {
        return Err(Error::EmptyGroupoid);
    }
    Limits::from_env().check_morphisms(n)?;
    FiniteGroupoid::from_parts(GroupoidParts {
        object_labels: (1..=n).map(|j| j.to_string()).collect(),
        morphism_labels: (1..=n).map(|j| pair_label(j, j)).collect(),
        source: (0..n).collect(),
        target: (0..n).collect(),
        compose: (0..n).map(|j| (j, j, j)).collect(),
        inverse: (0..n).collect(),
        units: Some((0..n).collect()),
    })
}

/// One-object groupoid from a Cayley table `table[a][b] = a·b`.
pub fn group_groupoid(table: &[Vec<usize>], inverses: &[usize], identity: usize) -> Result<FiniteGroupoid> {
    let labels = (0..table.len()).map(|g| g.to_string()).collect();
    group_groupoid_labeled(table, inverses, identity, labels)
}

pub fn group_groupoid_labeled(
    table: &[Vec<usize>],
    inverses: &[usize],
    identity: usize,
    labels: Vec<String>,
) -> Result<FiniteGroupoid> {
    let n = table.len();
    if n == 0 {
        return Err(Error::Group("empty table".into()));
    }
    Limits::from_env().check_morphisms(n)?;
    if labels.len() != n || inverses.len() != n || identity >= n {
        return Err(Error::Group("table, inverses, labels and identity disagree in size".into()));
    }
    for (a, row) in table.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Group(format!("row {a} has {} entries, expected {n}", row.len())));
        }
        if let Some(&bad) = row.iter().find(|&&c| c >= n) {
            return Err(Error::Group(format!("row {a} refers to element {bad}")));
        }
    }
    for a in 0..n {
        if table[identity][a] != a || table[a][identity] != a {
            return Err(Error::Group(format!("{identity} is not an identity for {a}")));
        }
        let inv = inverses[a];
        if inv >= n || table[a][inv] != identity || table[inv][a] != identity {
            return Err(Error::Group(format!("{a} has no inverse")));
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if table[table[a][b]][c] != table[a][table[b][c]] {
                    return Err(Error::Group(format!("associativity fails on ({a}, {b}, {c})")));
                }
            }
        }
    }
    let mut compose = Vec::with_capacity(n * n);
    for (a, row) in table.iter().enumerate() {
        for (b, &c) in row.iter().enumerate() {
            compose.push((a, b, c));
        }
    }
    FiniteGroupoid::from_parts(GroupoidParts {
        object_labels: vec!["*".into()],
        morphism_labels: labels,
        source: vec![0; n],
        target: vec![0; n],
        compose,
        inverse: inverses.to_vec(),
        units: Some(vec![identity]),
    })
}

/// The cyclic group Z_k as a one-object groupoid.
pub fn cyclic_group(k: usize) -> Result<FiniteGroupoid> {
    if k == 0 {
        return Err(Error::Group("Z_0 is not a finite group".into()));
    }
    let table: Vec<Vec<usize>> = (0..k).map(|a| (0..k).map(|b| (a + b) % k).collect()).collect();
    let inverses: Vec<usize> = (0..k).map(|a| (k - a) % k).collect();
    group_groupoid(&table, &inverses, 0)
}

/// Disjoint union of two groupoids. Labels get a `0.` / `1.` prefix.
pub fn disjoint_union(left: &FiniteGroupoid, right: &FiniteGroupoid) -> Result<FiniteGroupoid> {
    disjoint_union_all(&[left, right])
}

/// Disjoint union of any number of groupoids; component `k` gets the label prefix `k.`.
pub fn disjoint_union_all(components: &[&FiniteGroupoid]) -> Result<FiniteGroupoid> {
    if components.is_empty() {
        return Err(Error::EmptyGroupoid);
    }
    let total: usize = components.iter().map(|g| g.num_morphisms()).sum();
    Limits::from_env().check_morphisms(total)?;
    let mut out = GroupoidParts {
        object_labels: Vec::new(),
        morphism_labels: Vec::new(),
        source: Vec::new(),
        target: Vec::new(),
        compose: Vec::new(),
        inverse: Vec::new(),
        units: Some(Vec::new()),
    };
    for (k, g) in components.iter().enumerate() {
        let p = g.to_parts();
        let (obj_off, mor_off) = (out.object_labels.len(), out.morphism_labels.len());
        out.object_labels.extend(p.object_labels.iter().map(|l| format!("{k}.{l}")));
        out.morphism_labels.extend(p.morphism_labels.iter().map(|l| format!("{k}.{l}")));
        out.source.extend(p.source.iter().map(|&j| j + obj_off));
        out.target.extend(p.target.iter().map(|&j| j + obj_off));
        out.inverse.extend(p.inverse.iter().map(|&m| m + mor_off));
        out.compose.extend(p.compose.iter().map(|&(a, b, c)| (a + mor_off, b + mor_off, c + mor_off)));
        if let (Some(units), Some(u)) = (out.units.as_mut(), p.units) {
            units.extend(u.iter().map(|&m| m + mor_off));
        }
    }
    FiniteGroupoid::from_parts(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(g: &FiniteGroupoid, l: &str) -> MorphismId {
        g.morphism_by_label(l).unwrap()
    }

    #[test]
    fn builtins_validate() {
        for n in 1..=5 {
            assert!(pair_groupoid(n).unwrap().validate().is_valid());
            assert!(unit_groupoid(n).unwrap().validate().is_valid());
        }
        for k in 1..=6 {
            assert!(cyclic_group(k).unwrap().validate().is_valid());
        }
        let u = disjoint_union(&pair_groupoid(2).unwrap(), &unit_groupoid(1).unwrap()).unwrap();
        assert!(u.validate().is_valid());
    }

    #[test]
    fn zero_sized_builtins_rejected() {
        assert!(matches!(pair_groupoid(0), Err(Error::EmptyGroupoid)));
        assert!(matches!(unit_groupoid(0), Err(Error::EmptyGroupoid)));
    }

    #[test]
    fn pair_groupoid_shape() {
        let g = pair_groupoid(1).unwrap();
        assert_eq!((g.num_objects(), g.num_morphisms()), (1, 1));

        let g = pair_groupoid(2).unwrap();
        assert_eq!(g.num_morphisms(), 4);
        assert_eq!(g.compose(m(&g, "(2,1)"), m(&g, "(1,2)")), Some(m(&g, "(2,2)")));
        assert_eq!(g.compose(m(&g, "(2,1)"), m(&g, "(2,1)")), None);
        assert_eq!(g.inverse(m(&g, "(2,1)")), m(&g, "(1,2)"));

        let g = pair_groupoid(3).unwrap();
        for j in g.objects() {
            assert_eq!(g.with_target(j).len(), 3);
        }
    }

    #[test]
    fn unit_groupoid_shape() {
        let g = unit_groupoid(3).unwrap();
        assert_eq!(g.num_morphisms(), 3);
        for a in g.morphisms() {
            for b in g.morphisms() {
                assert_eq!(g.composable(a, b), a == b);
            }
            assert_eq!(g.compose(a, a), Some(a));
            assert_eq!(g.inverse(a), a);
        }
        let g = unit_groupoid(4).unwrap();
        for j in g.objects() {
            assert_eq!(g.isotropy(j).unwrap(), vec![g.unit_at(j)]);
        }
        assert_eq!(unit_groupoid(1).unwrap().to_parts().compose, pair_groupoid(1).unwrap().to_parts().compose);
    }

    #[test]
    fn redirected_unit_composition_is_reported() {
        let g = pair_groupoid(2).unwrap();
        let mut parts = g.to_parts();
        let (a, b, to) = (m(&g, "(2,1)").0, m(&g, "(1,1)").0, m(&g, "(2,2)").0);
        for e in parts.compose.iter_mut() {
            if e.0 == a && e.1 == b {
                e.2 = to;
            }
        }
        let broken = FiniteGroupoid::from_parts(parts).unwrap();
        let report = broken.validate();
        assert_eq!(report.violations.iter().filter(|v| v.is_unit_law()).count(), 1);
        assert!(report.violations.contains(&Violation::UnitLaw {
            morphism: "(2,1)".into(),
            unit: "(1,1)".into(),
            side: Side::Right,
        }));
    }

    #[test]
    fn structural_errors_are_distinct_from_axiom_violations() {
        let mut parts = pair_groupoid(2).unwrap().to_parts();
        parts.compose.push((0, 1, 99));
        assert!(matches!(FiniteGroupoid::from_parts(parts), Err(Error::Structure(_))));

        let mut parts = pair_groupoid(2).unwrap().to_parts();
        parts.inverse.pop();
        assert!(matches!(FiniteGroupoid::from_parts(parts), Err(Error::Structure(_))));
    }

    #[test]
    fn units_inferred_when_absent() {
        let mut parts = cyclic_group(3).unwrap().to_parts();
        parts.units = None;
        let g = FiniteGroupoid::from_parts(parts).unwrap();
        assert_eq!(g.morphism_label(g.unit_at(ObjectId(0))), "0");
    }

    #[test]
    fn group_validation() {
        let g = cyclic_group(2).unwrap();
        assert_eq!((g.num_objects(), g.num_morphisms()), (1, 2));
        assert_eq!(cyclic_group(3).unwrap().isotropy(ObjectId(0)).unwrap().len(), 3);

        // 2·1 = 1, so 2 has no inverse
        let bad = vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 1, 0]];
        assert!(matches!(group_groupoid(&bad, &[0, 2, 1], 0), Err(Error::Group(_))));

        // identity and inverses fine, associativity broken
        let nonassoc = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        let err = group_groupoid(&nonassoc, &[0, 1, 2, 3, 4], 0).unwrap_err();
        assert!(err.to_string().contains("associativity"), "{err}");
    }

    #[test]
    fn disjoint_union_orbits() {
        let u = disjoint_union(&unit_groupoid(1).unwrap(), &unit_groupoid(1).unwrap()).unwrap();
        assert_eq!((u.num_objects(), u.num_morphisms()), (2, 2));
        assert_eq!(u.orbits().len(), 2);

        let p = pair_groupoid(2).unwrap();
        let pp = disjoint_union(&p, &p).unwrap();
        assert_eq!(pp.num_morphisms(), 8);
        assert_eq!(pp.orbits().len(), 2);
        assert!(pp.validate().is_valid());
    }

    #[test]
    fn orbits_and_isotropy() {
        let g = pair_groupoid(3).unwrap();
        assert_eq!(g.orbits(), vec![vec![ObjectId(0), ObjectId(1), ObjectId(2)]]);
        for j in g.objects() {
            assert_eq!(g.isotropy(j).unwrap().len(), 1);
        }
        assert_eq!(unit_groupoid(3).unwrap().orbits().len(), 3);
        let z2 = cyclic_group(2).unwrap();
        assert_eq!(z2.orbits().len(), 1);
        assert_eq!(z2.isotropy(ObjectId(0)).unwrap().len(), 2);
        assert!(matches!(g.isotropy(ObjectId(7)), Err(Error::UnknownObject(_))));
    }

    #[test]
    fn left_translations_biject() {
        let p = pair_groupoid(3).unwrap();
        let gs = [p.clone(), cyclic_group(4).unwrap(), disjoint_union(&p, &unit_groupoid(2).unwrap()).unwrap()];
        for g in &gs {
            for a in g.morphisms() {
                assert!(g.left_translation_is_bijection(a));
                assert_eq!(g.compose(g.inverse(a), a), Some(g.unit_at(g.source(a))));
            }
            for o in g.orbits() {
                let sizes: BTreeSet<usize> = o.iter().map(|&j| g.with_target(j).len()).collect();
                assert_eq!(sizes.len(), 1);
            }
        }
    }

    #[test]
    fn full_subgroupoid_keeps_structure() {
        let g = pair_groupoid(3).unwrap();
        let (sub, map) = g.full_subgroupoid(&[ObjectId(0), ObjectId(2)]).unwrap();
        assert_eq!(sub.num_morphisms(), 4);
        assert!(sub.validate().is_valid());
        assert_eq!(sub.morphism_label(MorphismId(1)), g.morphism_label(map[1]));
    }
}
