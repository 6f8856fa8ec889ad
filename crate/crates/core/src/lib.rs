//! Discrete Lagrangian mechanics on Lie groupoids.
//!
//! The crate provides variational time stepping for discrete Lagrangians
//! `L_h: G → ℝ` defined on a Lie groupoid `G ⇉ Q`, the discrete Legendre
//! transforms into the dual algebroid `A*G`, the induced flow map, and a
//! numerical verifier for the discrete Hamilton–Pontryagin principle on
//! paths in `T*G`. Two groupoids are built in: the pair groupoid over
//! `ℝᵈ` (classical variational integrators) and matrix Lie groups over a
//! point (rigid body on SO(3)).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod groupoid;
pub mod hp_principle;
pub mod lagrangian;
pub mod legendre_flow;
pub mod numerics;
