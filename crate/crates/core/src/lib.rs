//! PDE-based image compression and denoising.
//!
//! Images are reconstructed from a sparse set of stored pixels (the *mask*)
//! by solving a linear diffusion problem. The crate provides the solvers,
//! several mask selection strategies driven by the topological gradient of
//! the reconstruction error, an encode/decode pipeline with a small binary
//! container, benchmark drivers and numerical checks of the underlying
//! asymptotic expansions.
//!
//! ```
//! use pdeinpaint::image::ImageGrid;
//! use pdeinpaint::mask::{criterion_stationary, threshold_mask};
//! use pdeinpaint::solver::{solve_stationary, SolveSpec};
//!
//! let f = ImageGrid::from_fn(32, 32, |x, y| ((x * y) % 7) as f64 / 7.0).unwrap();
//! let crit = criterion_stationary(&f, 3.0, 0.0);
//! let mask = threshold_mask(&crit, 0.1, None, None).unwrap();
//! let u = solve_stationary(&f, &mask, &SolveSpec::with_alpha(3.0)).unwrap();
//! assert_eq!(mask.count(), 103);
//! assert_eq!(u.shape(), (32, 32));
//! ```

pub mod asymptotics;
pub mod bench;
pub mod codec;
pub mod error;
pub mod image;
pub mod mask;
pub mod noise;
pub mod pnm;
pub mod solver;
pub mod validate;

pub use error::{Error, Result};
pub use image::{ImageGrid, Mask};
