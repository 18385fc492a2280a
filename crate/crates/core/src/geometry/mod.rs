//! Subspaces, flats, Gram volumes and invariant samplers.
//!
//! Vectors are `nalgebra::DVector<f64>`; a [`Subspace`] stores an orthonormal
//! frame as the columns of an `n × k` matrix. Subspaces living inside another
//! subspace `L` are sampled in `L`'s frame coordinates and embedded back.

mod rng;
mod sampling;
mod subspace;
mod volume;

pub use rng::RngStream;
pub use sampling::{
    sample_grassmannian, sample_grassmannian_containing, sample_grassmannian_within,
    sample_hitting_flat, sample_rotation_fixing, sample_translate_in_complement,
    uniform_in_ball, uniform_on_sphere,
};
pub use subspace::{orthonormalize, Flat, Subspace, ORTHO_TOL};
pub use volume::{
    d_weight, d_weight_definitional, d_weight_from_points, delta, dist_flat_subspace,
    dist_point_flat, nabla, nabla_mixed, subspace_det,
};

pub type Vector = nalgebra::DVector<f64>;
pub type Matrix = nalgebra::DMatrix<f64>;
