// `!(x > 0.0)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod characterization;
pub mod error;
pub mod harness;
mod jacobi;
pub mod matrix;
pub mod perturbation;
pub mod polar;
pub mod predicates;
pub mod product;
pub mod spectral;
pub mod tolerance;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/polar.md")]
    mod polar {}
    #[doc = include_str!("../../../book/src/product.md")]
    mod product {}
    #[doc = include_str!("../../../book/src/perturbation.md")]
    mod perturbation {}
    #[doc = include_str!("../../../book/src/characterization.md")]
    mod characterization {}
    #[doc = include_str!("../../../book/src/campaigns.md")]
    mod campaigns {}
}
