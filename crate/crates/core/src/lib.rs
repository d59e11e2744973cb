//! Upper bounds and exact solutions for max-sum (MAP) inference in
//! discrete graphical models.
//!
//! Factors live in log space. The crate covers exact bucket elimination,
//! mini-bucket elimination with and without max-marginal matching, cost
//! shifting on the factor graph (FGLP) and on the mini-bucket join graph
//! (JGLP), and depth-first AND/OR branch and bound guided by the messages
//! of any of these passes.
//!
//! Each capability has a runnable program under `examples/`:
//!
//! | example | shows |
//! |---|---|
//! | `factor_algebra` | combine, max-marginals, cost shifts |
//! | `read_uai` | parsing a model and evidence, writing UAI |
//! | `elimination_order` | min-fill orders, induced width, pseudo trees |
//! | `mini_bucket_bounds` | exact, MBE and MBE-MM values as `z` grows |
//! | `fglp_anytime` | FGLP bound trace written as CSV |
//! | `jglp_join_graph` | join graph clusters and JGLP tightening |
//! | `aobb_search` | branch and bound under each heuristic scheme |
//! | `compare_schemes` | a small bound table over random grids |
//!
//! ```
//! use costshift::elimination::{bucket_elimination, mini_bucket_elim};
//! use costshift::generate::grid_model;
//! use costshift::ordering::min_fill_order;
//!
//! let m = grid_model(3, 3, 2, 1);
//! let o = min_fill_order(&m, 42);
//! let exact = bucket_elimination(&m, &o).unwrap().value;
//! let bound = mini_bucket_elim(&m, &o, 1).unwrap().bound;
//! assert!(bound >= exact - 1e-9);
//! ```

pub mod cli;
pub mod elimination;
pub mod error;
pub mod factor;
pub mod generate;
pub mod lp;
pub mod model;
pub mod ordering;
pub mod search;
pub mod trace;
pub mod uai;

pub use error::{Error, Result};
pub use factor::{Factor, LOG_FLOOR};
pub use model::{Assignment, GraphicalModel, VarId};
