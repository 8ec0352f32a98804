//! Finite self-similarity systems.
//!
//! A self-similarity system is a finite category together with a finite
//! module (profunctor) on it, read as a family of simultaneous gluing
//! equations. This crate represents such systems exactly over finite
//! carriers and provides:
//!
//! * category and functor checks, including exhaustive pullback/equalizer
//!   search ([`category`], [`limits`]);
//! * modules, the coend tensor `M ⊗ X`, fixed points and algebra structure
//!   ([`module`], [`tensor`], [`algebra`]);
//! * address chains, liveness and the classification of discrete systems
//!   ([`address`]);
//! * universality certificates from metric annotations ([`recognition`]);
//! * system transformations ([`transforms`]), the Cantor-set codec
//!   ([`cantor`]), simplicial subdivision ([`simplex`]), iterated function
//!   systems ([`ifs`]) and cover-generated systems ([`cover`]).
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod address;
pub mod affine;
pub mod algebra;
pub mod cantor;
pub mod category;
pub mod cover;
mod error;
mod graph;
pub mod ifs;
pub mod limits;
pub mod module;
pub mod rational;
pub mod recognition;
pub mod simplex;
pub mod tensor;
pub mod transforms;
mod unionfind;

pub use error::{Error, Result};

pub use address::{AddressChain, SolutionClass};
pub use category::{ArrowId, FinSetFunctor, FiniteCategory, ObjId};
pub use module::{ElemId, Module, SystemDef};
pub use rational::Rational;
pub use tensor::{tensor, Tensor};
