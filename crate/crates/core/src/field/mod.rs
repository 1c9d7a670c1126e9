//! Finite fields `F_q` and truncated Laurent series over them.

mod gf;
mod series;
mod text;

pub use gf::{ff_wp_solve, frobenius_inv, FieldSpec, FqElem, GaloisField, MAX_CHARACTERISTIC, MAX_ORDER};
pub use series::{ls_p_power_split, LaurentSeries};
pub use text::{format_coeff, format_series, parse_series};
