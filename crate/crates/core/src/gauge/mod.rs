//! Adjoint-indexed field pairs F+-^a = E^a +- iB^a + g f^{abc}(E^b x B^c)
//! over su(N), the quadratic Lagrangian L = 1/2 Re[F*^a . F^a] they feed,
//! and the algebraic equations its variation prints out. The coupling enters
//! only through the structure constants, so everything reduces to N^2 - 1
//! independent copies of the Abelian field at g = 0; [`wave`] exploits the
//! same decoupling to evolve Lie-algebra-valued six-component amplitudes
//! index by index.

pub mod algebra;
pub mod field;
pub mod io;
pub mod wave;

pub use algebra::SuNAlgebra;
pub use field::{
    field_equation_residuals, lagrangian_density, lagrangian_index_form, lagrangian_trace_form,
    rs_vector, weak_field_magnetic, weak_field_scaling, Branch, BranchResiduals, LieField,
    ResidualReport, RsVector, WeakFieldScaling,
};
pub use io::{read_field_json, write_field_json, write_residual_report, FieldRecord};
pub use wave::{evolve_lie_valued, lie_valued_norm};
