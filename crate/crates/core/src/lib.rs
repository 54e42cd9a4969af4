//! Exact symbolic analysis of constrained Hamiltonian systems.
//!
//! Polynomials on a canonical phase space carry the Hamiltonian, the
//! constraints and candidate symmetry generators. On top of that sit
//! bounded-degree ideal membership, generation of the primary, secondary and
//! tertiary constraint chain, and the dynamical-symmetry checks.

pub mod chain;
pub mod error;
pub mod expr;
pub mod ideal;
pub mod linsolve;
pub mod modelfile;
pub mod models;
pub mod poly;
pub mod span;
pub mod symmetry;

pub use error::{AlgebraError, ChainError, ParseError, ParseErrorKind};
pub use expr::parse;
pub use ideal::{decompose, default_degree_bound, weak_equals, CoefficientMode, IdealDecomposition, NotFound};
pub use poly::{Monomial, PhasePolynomial, PhaseSpace, Rational};
pub use chain::{assemble_total_hamiltonian, ChainOptions, ConstrainedSystem, Constraint, ConstraintChain, Level, TotalHamiltonian};
pub use symmetry::{classify, closure_and_structure_constants, CheckOptions, Closure, CommutationClass, GeneratorSet, StructureConstants, SymmetryClass, SymmetryVerdict};
pub use modelfile::{Model, ModelFile, ModelFileError, ModelOptions};
