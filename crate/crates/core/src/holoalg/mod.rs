//! Complex scalars and vectors, holomorphic expressions, jets and maps.

mod cvec;
mod expr;
mod jet;
mod map;
pub(crate) mod parse;

pub use cvec::{format_point, CVec};
pub use expr::HoloExpr;
pub use jet::Jet;
pub use map::HoloMap;
pub use parse::{parse_expr, Lexer, Token, TokenKind};

pub type C64 = num_complex::Complex64;

/// Default relative tolerance used when an operation does not state one.
pub const DEFAULT_TOL: f64 = 1e-9;

pub(crate) const I: C64 = C64::new(0.0, 1.0);
