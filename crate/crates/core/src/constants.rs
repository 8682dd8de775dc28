//! Physical constants (CODATA 2018) used throughout the crate.

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Unified atomic mass unit, kg.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// Isotopes with a tabulated mass, for convenience when building parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Isotope {
    Na23,
    Rb87,
}

impl Isotope {
    pub fn mass_kg(self) -> f64 {
        match self {
            Isotope::Na23 => 22.989_769_282 * ATOMIC_MASS_UNIT,
            Isotope::Rb87 => 86.909_180_531 * ATOMIC_MASS_UNIT,
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "na23" | "23na" | "sodium" => Some(Isotope::Na23),
            "rb87" | "87rb" | "rubidium" => Some(Isotope::Rb87),
            _ => None,
        }
    }
}
