//! Rigid bodies swimming in Stokes flow under a Navier slip condition.
//!
//! A body is sampled as a [`geometry::SurfaceMesh`]. The exterior flow is a
//! superposition of interior Stokeslets ([`stokes`]) fitted to the slip
//! boundary conditions ([`slip_bvp`]). Six auxiliary problems give the grand
//! resistance matrix ([`mobility`]); a lifting of the prescribed surface
//! velocity then gives the force- and torque-free swimming velocity
//! ([`selfprop`]). [`validation`] holds the identity checks and analytic
//! oracles, and [`cli`] the configuration and result records of the binary.
//!
//! ```no_run
//! use slipstokes::geometry::{make_parametric_surface, Shape};
//! use slipstokes::mobility::{swim_velocity, Mobility};
//! use slipstokes::selfprop::SolverConfig;
//! use slipstokes::slip_bvp::BoundaryData;
//!
//! let mesh = make_parametric_surface(&Shape::Sphere { radius: 1.0 }, 24)?;
//! let solver = SolverConfig::default().build_solver(&mesh, 1e6)?;
//! let mobility = Mobility::compute(&solver)?;
//! let w = mobility.wrench(&BoundaryData::squirmer(&mesh, 1.0), &mesh)?;
//! let v = swim_velocity(&mobility.grand, &w);
//! assert!((v.xi.z - 2.0 / 3.0).abs() < 1e-4);
//! # Ok::<(), slipstokes::Error>(())
//! ```

// `!(x > 0.0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod geometry;
pub mod mobility;
pub mod quadrature;
pub mod selfprop;
pub mod slip_bvp;
pub mod stokes;
pub mod validation;

pub use error::{Error, Result};
