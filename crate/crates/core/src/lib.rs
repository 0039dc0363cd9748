//! Closed-form exponentials of so(n), 2 ≤ n ≤ 9, in the power basis of the
//! normalized generator, with spectral invariants, root solvers and the G2
//! subalgebra of so(7).

pub mod basis;
pub mod bench;
pub mod conjugacy;
pub mod error;
pub mod expm;
pub mod g2;
pub mod invariants;
pub mod oracle;
pub mod roots;
pub mod sample;

pub use basis::{assemble, decompose, generator, norm, AlgebraVector, SkewMatrix};
pub use error::{Error, ErrorKind, Result};
pub use expm::{expm_so, expm_so_with, CoefficientVector, Expm, ExpmOptions, Method, RotationMatrix};
pub use invariants::{compute_invariants, InvariantSet};
pub use roots::{spectral_roots, RootSet};
pub use conjugacy::{torus_angles, trace_closed_form, TorusAngles};
pub use g2::{embed_g2, expm_g2, G2Vector};
