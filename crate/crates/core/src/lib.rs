//! A workbench for finite pointed algebras: congruence lattices, ideals
//! defined by closure under term sets, residuated-lattice views with their
//! filter theory, and quasi-views, together with exhaustive audits of the
//! structure theorems connecting them.
//!
//! Everything operates on explicit operation tables over `0..n-1` at desk
//! scale. Audits never assume a claim: each one recomputes both sides and
//! reports PASS, or FAIL with the least counterexample.

pub mod algebra;
pub mod congruence;
pub mod corpus;
pub mod enumerate;
pub mod error;
pub mod ideal;
pub mod operators;
pub mod quasi;
pub mod report;
pub mod residuated;
pub mod term;
pub mod variety;

pub use algebra::{algebra_from_json, FiniteAlgebra, OpSym, Quotient, Signature};
pub use congruence::{all_congruences, principal_congruence, Congruence, CongruenceLattice};
pub use error::{Error, Result};
pub use ideal::{GammaSet, Ideal, IdealLattice, IdealTerm};
pub use report::{AuditReport, Status};
pub use residuated::{FilterFamily, ResiduatedView, RoleBindings};
pub use term::{Assignment, Term, Var};
pub use variety::VarietyPresentation;
