//! The quantum matrix algebra `M(R,F)`: graded normal forms, characteristic elements,
//! ⋆-product descendants, and the Newton and Wronski relations.

mod algebra;
mod element;
mod reducer;
mod suites;

pub use algebra::{build_reducer, Qma};
pub use element::{QmaElement, QmaOp};
pub use reducer::{flat_label, relation_entries, unflatten, FreeElement, FreeOp, IdealReducer};
pub use suites::{
    lemma51_instances, spectral_dim2, star_identities, verify_all, verify_inversion_identities,
    verify_lemma51, verify_mt, verify_newton_wronski, verify_qma, Instances,
};
