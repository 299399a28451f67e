//! Thermodynamics of a perfect quantum gas of charged particles in a
//! constant magnetic field: bulk Landau-level sums, finite-box spectra,
//! contour representations of the grand-canonical pressure and a numerical
//! laboratory for the magnetic perturbation theory of the Gibbs semigroup.

pub mod bulk;
pub mod error;
pub mod finite_gas;
pub mod fit;
pub mod harness;
pub mod kernel_lab;
pub mod linalg;
pub mod numdiff;
pub mod quadrature;
pub mod special_fn;
pub mod spectrum;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Quantum statistics of the gas. `Bose` has sign +1, `Fermi` has sign -1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Bose,
    Fermi,
}

impl Statistics {
    pub fn sign(self) -> f64 {
        match self {
            Statistics::Bose => 1.0,
            Statistics::Fermi => -1.0,
        }
    }

    /// Distance from `zeta` to the branch cut, `[1, inf)` for bosons and
    /// `(-inf, -1]` for fermions.
    pub fn distance_to_cut(self, zeta: Complex64) -> f64 {
        let w = zeta * self.sign();
        if w.re >= 1.0 {
            w.im.abs()
        } else {
            (w - 1.0).norm()
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Statistics::Bose => "bose",
            Statistics::Fermi => "fermi",
        }
    }
}

impl std::str::FromStr for Statistics {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bose" | "b" | "+1" | "1" => Ok(Statistics::Bose),
            "fermi" | "f" | "-1" => Ok(Statistics::Fermi),
            other => Err(Error::Config(format!("unknown statistics '{other}'"))),
        }
    }
}
