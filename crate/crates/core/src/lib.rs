//! Exact-arithmetic toolkit for linear q-difference operators and modules
//! over truncated Laurent series.

pub mod error;
pub mod filtration;
pub mod qmodule;
pub mod qsolve;
pub mod scalar;
pub mod factor;
pub mod matrix;
pub mod newton;
pub mod ore;
pub mod poly;
mod roots;
pub mod series;

pub use error::{Error, Result};
pub use filtration::{GradedModule, HilbertSamuel, SlopeFiltration};
pub use qmodule::{ModuleElement, QDiffModule};
pub use qsolve::{SolutionBasis, SymbolElement, SymbolKey};
pub use scalar::{Ctx, QContext, Scalar};
pub use factor::{Factorization, GrowthClass, GrowthKind, Mode, SlopeFactorization, TwistedFactor};
pub use matrix::Matrix;
pub use newton::{CharEquation, ExponentData, NewtonFunction, Slope};
pub use ore::{GaugeSymbol, OrePoly};
pub use poly::ScalarPoly;
pub use series::LaurentSeries;
