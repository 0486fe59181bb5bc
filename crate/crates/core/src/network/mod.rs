//! Helicity doublets on the edges of a directed graph.
//!
//! Each edge e carries (psi_plus(e), psi_minus(e)). The master flow couples
//! the pair through a flip rate and a transport term,
//!
//!   d psi_pm(e)/dt = -lambda (psi_pm(e) - psi_mp(e)) + T_pm(e),
//!
//! and its analytic continuation rotates the doublet unitarily with the
//! generator -i lambda (I - sigma_1). Constraint diagnostics measure the
//! per-edge defect psi_plus - psi_minus and the summed version that the
//! global operator sees. The foam layer sums helicity histories over faces,
//!
//!   A = sum_h prod_f w_f(h_f) prod_v A_v(h|_v),
//!
//! by direct enumeration or clustered factorization. A refinement study
//! checks that free transport on a ring converges to the light-cone lattice.

mod constraints;
mod dynamics;
mod foam;
mod graph;
mod io;
mod studies;

pub use constraints::{flip_constraint_residuals, is_equilibrium, ConstraintReport};
pub use dynamics::{
    continued_flip_closed_form, master_flip_closed_form, matter_source, transport_term,
    EdgeAmplitudes, MatterLayer, NetworkDynamics, TransportModel, TransportReport,
};
pub use foam::{
    face_clusters, foam_amplitude, random_connected_foam, FoamFace, FoamSpec, FoamStrategy,
    FoamVertex, MAX_ENUMERATED_FACES,
};
pub use graph::{Edge, SpinLabel, SpinNetwork};
pub use io::{
    read_foam_json, read_network_json, write_constraint_report, write_foam_json,
    write_network_json, AmplitudeSeriesWriter, EdgeRecord, FaceRecord, FoamRecord,
    FoamVertexRecord, NetworkRecord,
};
pub use studies::{chain_vs_checkerboard, ChainStudyConfig};
