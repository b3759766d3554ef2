//! Distributed averaging of measurements that live on curved spaces.
//!
//! Each node of a communication graph holds a measurement on a Riemannian
//! manifold (ℝⁿ, the sphere, the rotation group SO(n) or a Grassmannian) and
//! repeatedly moves toward its neighbors along geodesics. The crate provides
//! the geometry primitives, the synchronous protocol with curvature-aware
//! step sizes, the Fréchet-mean baseline, finite-difference oracles that
//! cross-check the analytic bounds, and an experiment harness with a CLI.
//!
//! ```
//! use manifold_consensus::consensus::{self, NetworkState, StepSizePolicy};
//! use manifold_consensus::geometry::ManifoldHandle;
//! use manifold_consensus::network::{make_topology, TopologySpec};
//! use rand::SeedableRng;
//!
//! let manifold = ManifoldHandle::sphere(2);
//! let graph = make_topology(&TopologySpec::Ring(5)).unwrap();
//!
//! // measurements scattered around a base point
//! let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
//! let base = manifold.base_point();
//! let measurements: Vec<_> = (0..5)
//!     .map(|_| manifold.exp(&manifold.random_tangent(&base, 0.2, &mut rng)))
//!     .collect();
//!
//! let state = NetworkState::from_measurements(manifold, measurements).unwrap();
//! let trace = consensus::run(&graph, &state, &StepSizePolicy::auto_descent(), 200, 1e-10)
//!     .unwrap();
//! assert!(trace.summary.converged);
//! ```

pub mod checks;
pub mod consensus;
pub mod error;
pub mod frechet;
pub mod geometry;
pub mod harness;
pub mod network;

pub use error::{Error, Result};
