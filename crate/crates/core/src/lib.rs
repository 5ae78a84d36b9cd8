//! Finite measured groupoids as a logic of transitions.
//!
//! A [`FiniteGroupoid`] is stored as an explicit partial composition table.
//! On top of it sit subset calculus and non-local conditioning
//! ([`subsets`]), Haar systems and the measures they induce ([`haar`]), the
//! decoherence functional and grade-2 measure ([`decoherence`]), the
//! convolution *-algebra with its state ([`algebra`]) and the GNS
//! construction ([`gns`]). [`lattice`] holds the finite-lattice checks used
//! to compare against projective logics.
//!
//! ```
//! use groupoid_logic::{decoherence, normalized_haar, pair_groupoid, ObjectSet};
//!
//! let mg = normalized_haar(pair_groupoid(2).unwrap(), vec![0.5, 0.5]).unwrap();
//! let one = ObjectSet::from_labels(mg.groupoid(), &["1"]).unwrap();
//! let two = ObjectSet::from_labels(mg.groupoid(), &["2"]).unwrap();
//! let d = decoherence(&mg, &two, &one, None).unwrap();
//! assert_eq!(d.re, 0.25);
//! ```

pub mod algebra;
pub mod decoherence;
pub mod error;
pub mod gns;
pub mod groupoid;
pub mod haar;
pub mod io;
pub mod lattice;
pub mod limits;
pub mod subsets;

pub use algebra::{
    algebra_unit, bridge_decoherence, char_fn, convolve, convolve_literal, convolve_with, involution,
    involution_literal, state, BridgeValue, ConvolutionMode, GroupoidFunction,
};
pub use decoherence::{
    decoherence, decoherence_report, grade2, interference, phase_from_potential, sorkin_audit,
    sorkin_third_order, validate_phase, DecoherenceReport, Interference, PhaseAction, PhaseReport,
    PhaseViolation, SorkinAudit, SorkinWitness,
};
pub use error::{Error, Result};
pub use gns::{
    gns_dimension, gns_report, gram, in_gelfand_ideal, null_set_correspondence, GnsReport, GramMatrix,
    NullSetCheck,
};
pub use groupoid::{
    cyclic_group, disjoint_union, disjoint_union_all, group_groupoid, pair_groupoid, unit_groupoid,
    FiniteGroupoid, GroupoidParts, MorphismId, ObjectId, ValidationReport, Violation,
};
pub use haar::{
    counting_haar, custom_haar, invariant_representative, modular_function, modular_homomorphism_defects,
    normalized_haar, HaarKind, MeasuredGroupoid, ModularFunction,
};
pub use lattice::{FiniteLattice, Lattice, PowersetLattice};
pub use limits::Limits;
pub use num_complex::Complex64;
pub use subsets::{
    conditioned, relation_report, set_product, source_fiber, target_fiber, transition_set, MorphismSet,
    ObjectSet, RelationReport,
};
