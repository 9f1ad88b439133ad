//! Parameter types and the two equivalent parameterizations of the search
//! Hamiltonian.
//!
//! The spectral side is (E_p, E_o, α): mean energy, half-gap and the phase of
//! the eigenvectors. The coupling side is (E_fg, E_f, φ): the weights of the
//! projector term and of the phased cross term. Both sides also need the
//! initial state (β, u). All energies are in units with ħ = 1, so times carry
//! inverse-energy units.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::angle::normalize_angle;
use crate::error::{Result, SearchError};
use crate::timing::{solve_mixing_angle, DerivedGeometry};
use crate::{DEGENERACY_TOL, NORM_TOL};

fn finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(SearchError::InvalidParameter {
            name,
            value,
            reason: "must be finite",
        })
    }
}

/// Eigen-side parameterization: E₁ = E_p + E_o, E₂ = E_p − E_o.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParams {
    e_p: f64,
    e_o: f64,
    alpha: f64,
}

impl SpectralParams {
    /// `e_o` must be non-negative; `alpha` is normalized to (-π, π].
    pub fn new(e_p: f64, e_o: f64, alpha: f64) -> Result<Self> {
        let e_p = finite("e_p", e_p)?;
        let e_o = finite("e_o", e_o)?;
        let alpha = finite("alpha", alpha)?;
        if e_o < 0.0 {
            return Err(SearchError::InvalidParameter {
                name: "e_o",
                value: e_o,
                reason: "half-gap must be non-negative",
            });
        }
        Ok(Self {
            e_p,
            e_o,
            alpha: normalize_angle(alpha),
        })
    }

    pub fn from_eigenenergies(e1: f64, e2: f64, alpha: f64) -> Result<Self> {
        if e1 < e2 {
            return Err(SearchError::InvalidParameter {
                name: "e1",
                value: e1,
                reason: "upper eigenenergy must not be below the lower one",
            });
        }
        Self::new(0.5 * (e1 + e2), 0.5 * (e1 - e2), alpha)
    }

    pub fn e_p(&self) -> f64 {
        self.e_p
    }

    pub fn e_o(&self) -> f64 {
        self.e_o
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn e1(&self) -> f64 {
        self.e_p + self.e_o
    }

    pub fn e2(&self) -> f64 {
        self.e_p - self.e_o
    }

    /// Both eigenenergies coincide.
    pub fn is_degenerate(&self) -> bool {
        self.e_o == 0.0
    }
}

/// Coupling-side parameterization (E_fg, E_f, φ).
///
/// `e_f` is a magnitude (its sign is carried by φ). `e_fg` is allowed to be
/// negative: it multiplies a sum of projectors and has no phase to absorb a
/// sign, and the inverse conversion produces negative values whenever
/// E_p < E_o sin β cos(α − u) / cos γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingParams {
    e_fg: f64,
    e_f: f64,
    phi: f64,
}

impl CouplingParams {
    pub fn new(e_fg: f64, e_f: f64, phi: f64) -> Result<Self> {
        let e_fg = finite("e_fg", e_fg)?;
        let e_f = finite("e_f", e_f)?;
        let phi = finite("phi", phi)?;
        if e_f < 0.0 {
            return Err(SearchError::InvalidParameter {
                name: "e_f",
                value: e_f,
                reason: "coupling magnitude must be non-negative (put the sign in phi)",
            });
        }
        Ok(Self {
            e_fg,
            e_f,
            phi: normalize_angle(phi),
        })
    }

    pub fn e_fg(&self) -> f64 {
        self.e_fg
    }

    pub fn e_f(&self) -> f64 {
        self.e_f
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// The initial state |s⟩ = e^{iu} sin β |w⟩ + cos β |w⊥⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialState {
    beta: f64,
    u: f64,
}

impl InitialState {
    /// `beta` must lie in [0, π/2]; `u` is normalized to (-π, π].
    pub fn new(beta: f64, u: f64) -> Result<Self> {
        let beta = finite("beta", beta)?;
        let u = finite("u", u)?;
        if !(0.0..=FRAC_PI_2).contains(&beta) {
            return Err(SearchError::InvalidParameter {
                name: "beta",
                value: beta,
                reason: "must lie in [0, pi/2]",
            });
        }
        Ok(Self {
            beta,
            u: normalize_angle(u),
        })
    }

    /// Uniform superposition over `n_items` with `n_marked` targets, so that
    /// sin β = √(M/N).
    pub fn uniform(n_items: usize, n_marked: usize, u: f64) -> Result<Self> {
        if n_items == 0 || n_marked > n_items {
            return Err(SearchError::InvalidInstance(format!(
                "{n_marked} marked items out of {n_items}"
            )));
        }
        let sin_beta = (n_marked as f64 / n_items as f64).sqrt();
        Self::new(sin_beta.asin(), u)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn sin_beta(&self) -> f64 {
        self.beta.sin()
    }

    pub fn cos_beta(&self) -> f64 {
        self.beta.cos()
    }

    pub fn state(&self) -> QubitState {
        QubitState {
            a_w: Complex64::from_polar(self.sin_beta(), self.u),
            a_perp: Complex64::new(self.cos_beta(), 0.0),
        }
    }
}

/// A pure state in the {|w⟩, |w⊥⟩} basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    a_w: Complex64,
    a_perp: Complex64,
}

impl QubitState {
    pub fn new(a_w: Complex64, a_perp: Complex64) -> Result<Self> {
        let n2 = a_w.norm_sqr() + a_perp.norm_sqr();
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(SearchError::NotNormalized(n2));
        }
        Ok(Self { a_w, a_perp })
    }

    /// Skips the normalization check. Used for propagated states whose
    /// norm drift is tracked separately.
    pub(crate) fn from_amplitudes(a_w: Complex64, a_perp: Complex64) -> Self {
        Self { a_w, a_perp }
    }

    pub fn marked() -> Self {
        Self::from_amplitudes(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn unmarked() -> Self {
        Self::from_amplitudes(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
    }

    pub fn a_w(&self) -> Complex64 {
        self.a_w
    }

    pub fn a_perp(&self) -> Complex64 {
        self.a_perp
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        [self.a_w, self.a_perp]
    }

    pub fn norm(&self) -> f64 {
        (self.a_w.norm_sqr() + self.a_perp.norm_sqr()).sqrt()
    }

    /// |⟨w|ψ⟩|².
    pub fn marked_probability(&self) -> f64 {
        self.a_w.norm_sqr()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &QubitState) -> Complex64 {
        self.a_w.conj() * other.a_w + self.a_perp.conj() * other.a_perp
    }

    /// Equality up to a global phase: |⟨self|other⟩| = 1 within `tol`.
    pub fn same_ray(&self, other: &QubitState, tol: f64) -> bool {
        (self.inner(other).norm() - 1.0).abs() <= tol
    }
}

/// Result of converting coupling parameters to the spectral side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralConversion {
    pub spectral: SpectralParams,
    /// Mixing geometry for the recovered α. `None` when cos γ = 0, i.e. the
    /// initial state already is the marked state up to phase.
    pub geometry: Option<DerivedGeometry>,
    /// The computed E_o vanished; α was fixed by convention when the
    /// complex coupling E_f e^{i(φ−u)} + E_fg sin β was zero.
    pub degenerate_spectrum: bool,
}

/// Coupling → spectral parameters.
///
/// E_p = E_fg + E_f cos(φ−u) sin β and
/// E_o = √((E_f cos(φ−u) + E_fg sin β)² + E_f² sin²(φ−u) cos²β).
/// α − u is the argument of z = E_f e^{i(φ−u)} + E_fg sin β, recovered with a
/// two-argument arctangent (principal branch).
pub fn to_spectral(cp: &CouplingParams, init: &InitialState) -> SpectralConversion {
    let (sb, cb) = (init.sin_beta(), init.cos_beta());
    let rel = cp.phi - init.u;
    let (s_rel, c_rel) = rel.sin_cos();

    let re = cp.e_f * c_rel + cp.e_fg * sb;
    let im = cp.e_f * s_rel;
    let e_p = cp.e_fg + cp.e_f * c_rel * sb;
    let e_o = re.hypot(im * cb);

    let scale = cp.e_fg.abs().max(cp.e_f).max(f64::MIN_POSITIVE);
    let z_vanishes = re.hypot(im) <= DEGENERACY_TOL * scale;
    let alpha = if z_vanishes {
        0.0
    } else {
        normalize_angle(im.atan2(re) + init.u)
    };

    let spectral = SpectralParams { e_p, e_o, alpha };
    SpectralConversion {
        spectral,
        geometry: solve_mixing_angle(init, alpha).ok(),
        degenerate_spectrum: e_o <= DEGENERACY_TOL * scale,
    }
}

/// Spectral → coupling parameters.
///
/// E_fg = (E_p − E_o sin β cos(α−u)/cos γ) / cos²β and
/// E_f e^{i(φ−u)} = (E_o / cos γ) e^{i(α−u)} − E_fg sin β.
/// A vanishing E_f is snapped to exactly zero with φ = 0.
pub fn to_coupling(sp: &SpectralParams, init: &InitialState) -> Result<CouplingParams> {
    let (sb, cb) = (init.sin_beta(), init.cos_beta());
    if cb.abs() <= DEGENERACY_TOL {
        return Err(SearchError::DegenerateInitialState(
            "cos(beta) = 0: the coupling form divides by cos^2(beta)",
        ));
    }
    let geom = solve_mixing_angle(init, sp.alpha)?;
    let cg = geom.gamma().cos();
    let rel = sp.alpha - init.u;

    let e_fg = (sp.e_p - sp.e_o * sb * rel.cos() / cg) / (cb * cb);
    let w = Complex64::from_polar(sp.e_o / cg, rel) - e_fg * sb;

    let scale = sp.e_p.abs().max(sp.e_o).max(f64::MIN_POSITIVE);
    let (e_f, phi) = if w.norm() <= DEGENERACY_TOL * scale {
        (0.0, 0.0)
    } else {
        (w.norm(), normalize_angle(w.arg() + init.u))
    };
    Ok(CouplingParams { e_fg, e_f, phi })
}
