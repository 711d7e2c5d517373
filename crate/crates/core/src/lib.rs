//! Equational algebraic geometry over free and free metabelian Lie algebras.

pub mod carrier;
pub mod error;
pub mod field;
pub mod freelie;
pub mod geometry;
pub mod linalg;
pub mod logic;
pub mod metabelian;
pub mod poly;
pub mod ratfunc;
pub mod reduction;
pub mod terms;

pub use carrier::{CarrierSpec, FElem, FiniteAlgebra, LieCarrier};
pub use error::{Error, Result};
pub use field::{BaseElem, BaseField, FieldSpec, Scalar};
pub use freelie::{FreeLie, FreeLieElement, Truncation, Word};
pub use geometry::{solve, AlgebraicSet, Point, PolyWindow, Radical, Setting, WindowMode};
pub use linalg::{ModulePresentation, PolyMatrix};
pub use logic::{check_sentence, phi_suite, QuasiIdentity, Sentence, UniversalSentence, Verdict};
pub use metabelian::{Extension, ExtensionElement, Metabelian, MetabelianElement};
pub use poly::{Mono, Poly, PolyRing};
pub use ratfunc::RatFunc;
pub use reduction::{Classification, Factor, Parallelepipedon, PolySystem};
pub use terms::{evaluate, lower_to_carrier, parse_document, parse_system, AlgebraKind, CoeffAlgebra, Document, EquationSystem, LieTerm, Lowered, LoweredElem};
