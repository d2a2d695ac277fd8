//! Definite quaternion algebras over `Q`, their orders and right ideal classes.

mod algebra;
mod cache;
mod classes;
mod embedding;
mod ideal;
mod order;
mod qlattice;

pub use algebra::{build_algebra, hilbert_symbol, Place, Quaternion, QuaternionAlgebra};
pub use cache::{CacheFile, ClassCache, CACHE_VERSION};
pub use classes::{
    brandt_matrix, default_neighbor_prime, divisor_sum, expected_mass, right_ideal_classes, right_ideal_classes_with,
    BrandtContext, BrandtMatrix, ClassSet, RightIdealClass,
};
pub use embedding::{optimal_embedding_count, optimal_embedding_count_in, optimal_embedding_images};
pub use ideal::{
    find_isomorphism, int_scalar, neighbors, rat_scalar, stabilises, theta_depth, ReducedForm, RightIdeal,
};
pub use order::{
    atkin_lehner_ideal, eichler_order, eichler_suborder, maximal_order, units_of, OrderLattice, TwoSidedIdeal,
};
pub use qlattice::{IntQuaternion, QLattice, RatQuaternion};
