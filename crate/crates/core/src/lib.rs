//! Exact intersection numbers of boundary divisors and psi classes on the
//! moduli space of stable genus-zero curves with `n` marked points.
//!
//! A dimension-zero product is normalized to a [`DecoratedTree`] (the stratum
//! cut out by the divisors, with excess exponents on its edges) and evaluated
//! by the balanced weights formula: a signed product of edge and vertex
//! multinomial coefficients, or zero.
//!
//! ```
//! use m0n::{evaluate, product_to_decorated, BoundaryProduct, MarkedSet, Split};
//!
//! let ground = MarkedSet::new(5).unwrap();
//! let d12 = Split::from_labels(ground, &[1, 2]).unwrap();
//! let product = BoundaryProduct::new(ground).divisor(d12, 2).unwrap();
//! let decorated = product_to_decorated(&product).unwrap().unwrap();
//! assert_eq!(evaluate(&decorated).unwrap().value, (-1).into());
//! ```

pub mod arith;
pub mod error;
pub mod intersect;
pub mod oracle;
mod shape;
pub mod trees;
pub mod weights;

pub use num_bigint::BigInt;

pub use arith::{factorial, multinomial};
pub use error::{Error, Result};
pub use intersect::{
    color_for_divisor, compatible, flag_equivalence, meet_all, meet_divisor, product_to_decorated,
    strata_product_to_decorated, BoundaryProduct, Branch, Color, Coloring, DecoratedTree,
};
pub use trees::{
    enumerate_stable_trees, make_split, tree_equal, tree_from_splits, EdgeId, Label, LabelSet,
    MarkedSet, Split, StableTree, VertexId,
};
pub use weights::{
    balance, balance_trace, evaluate, evaluate_ratio, integrate_psi_monomial, BalancedWeighting,
    EvalResult, PeelStep, Reason,
};
