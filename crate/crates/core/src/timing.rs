//! Certainty condition, measuring schedule and timing tolerance.
//!
//! With sin γ = sin β sin(α − u), choosing the eigenbasis mixing angle x by
//!
//! ```text
//! cos 2x = sin β cos(α − u) / cos γ,    sin 2x = cos β / cos γ
//! ```
//!
//! cancels the time-independent imaginary part of ⟨w⊥|e^{-iHt}|s⟩, and the
//! marked-state probability becomes
//!
//! ```text
//! P(t) = 1 − (cos²β / cos²γ) cos²(E_o t + γ).
//! ```
//!
//! P reaches one whenever E_o t + γ is an odd multiple of π/2.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Result, SearchError};
use crate::qmodel::{to_spectral, CouplingParams, InitialState, SpectralParams};
use crate::DEGENERACY_TOL;

/// The auxiliary angle γ and the mixing angle x fixed by the certainty
/// condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedGeometry {
    gamma: f64,
    x: f64,
}

impl DerivedGeometry {
    /// γ ∈ [−π/2, π/2] (principal arcsine).
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// x ∈ [0, π/2].
    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn cos_2x(&self) -> f64 {
        (2.0 * self.x).cos()
    }

    /// Equals cos β / cos γ, the amplitude of the oscillating part of P(t).
    pub fn sin_2x(&self) -> f64 {
        (2.0 * self.x).sin()
    }

    /// Minimum of P(t) over time: 1 − cos²β / cos²γ.
    pub fn probability_floor(&self) -> f64 {
        1.0 - self.sin_2x().powi(2)
    }
}

/// Solves the certainty condition for the mixing angle x.
///
/// Fails when cos γ = 0, which happens only when the initial state already
/// is the marked state up to phase (β = π/2 and α − u = ±π/2).
pub fn solve_mixing_angle(init: &InitialState, alpha: f64) -> Result<DerivedGeometry> {
    let (sb, cb) = (init.sin_beta(), init.cos_beta());
    let rel = alpha - init.u();
    let sin_gamma = (sb * rel.sin()).clamp(-1.0, 1.0);
    let gamma = sin_gamma.asin();
    let cg = gamma.cos();
    if cg <= DEGENERACY_TOL {
        return Err(SearchError::DegenerateInitialState(
            "cos(gamma) = 0: the initial state is the marked state up to phase",
        ));
    }
    let cos_2x = sb * rel.cos() / cg;
    let sin_2x = cb / cg;
    Ok(DerivedGeometry {
        gamma,
        x: 0.5 * sin_2x.atan2(cos_2x),
    })
}

/// The arithmetic progression of instants at which P(t) = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasuringSchedule {
    t_first: f64,
    period: f64,
    e_o: f64,
    geometry: DerivedGeometry,
}

impl MeasuringSchedule {
    /// t₁ = (π/2 − γ) / E_o ∈ (0, π/E_o].
    pub fn t_first(&self) -> f64 {
        self.t_first
    }

    /// π / E_o, the period of P(t).
    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn e_o(&self) -> f64 {
        self.e_o
    }

    pub fn geometry(&self) -> &DerivedGeometry {
        &self.geometry
    }

    /// The j-th measuring instant, j ≥ 1.
    pub fn instant(&self, j: u32) -> f64 {
        assert!(j >= 1, "measuring instants are indexed from 1");
        self.t_first + f64::from(j - 1) * self.period
    }

    pub fn instants(&self) -> impl Iterator<Item = f64> + '_ {
        (1..).map(|j| self.instant(j))
    }

    /// Half-width of the window around each instant where P ≥ `p_threshold`.
    pub fn tolerance_halfwidth(&self, p_threshold: f64) -> Result<f64> {
        tolerance_window(&self.geometry, self.e_o, p_threshold)
    }
}

/// Builds the schedule t_j = ((2j − 1)π/2 − γ) / E_o.
pub fn measuring_times(geom: &DerivedGeometry, e_o: f64) -> Result<MeasuringSchedule> {
    if !(e_o > 0.0) {
        return Err(SearchError::ZeroGap);
    }
    Ok(MeasuringSchedule {
        t_first: (FRAC_PI_2 - geom.gamma) / e_o,
        period: PI / e_o,
        e_o,
        geometry: *geom,
    })
}

/// First measuring time written directly in the coupling parameters:
///
/// ```text
/// t₁ = [π/2 − asin(E_f sin β sin(φ−u) / R)] / E_o
/// R   = √((E_f cos(φ−u) + E_fg sin β)² + E_f² sin²(φ−u))
/// E_o = √((E_f cos(φ−u) + E_fg sin β)² + E_f² sin²(φ−u) cos²β)
/// ```
///
/// This does not go through the spectral parameters.
pub fn first_time_from_coupling(cp: &CouplingParams, init: &InitialState) -> Result<f64> {
    let (sb, cb) = (init.sin_beta(), init.cos_beta());
    let (s_rel, c_rel) = (cp.phi() - init.u()).sin_cos();
    let re = cp.e_f() * c_rel + cp.e_fg() * sb;
    let im = cp.e_f() * s_rel;
    let e_o = (re * re + im * im * cb * cb).sqrt();
    let scale = cp.e_fg().abs().max(cp.e_f()).max(f64::MIN_POSITIVE);
    if e_o <= DEGENERACY_TOL * scale {
        return Err(SearchError::ZeroGap);
    }
    let r = (re * re + im * im).sqrt();
    let sin_gamma = (cp.e_f() * sb * s_rel / r).clamp(-1.0, 1.0);
    Ok((FRAC_PI_2 - sin_gamma.asin()) / e_o)
}

/// Half-width δ of the window around t₁ in which P ≥ `p_threshold`.
///
/// Not a closed form from the model itself: it follows from the probability
/// law by writing t = t₁ + δ, which gives
/// P = 1 − (cos²β / cos²γ) sin²(E_o δ), hence
/// δ = asin(min(1, √(1 − p) cos γ / cos β)) / E_o.
/// When the threshold is at or below the probability floor the whole
/// half-period π/(2E_o) qualifies.
pub fn tolerance_window(geom: &DerivedGeometry, e_o: f64, p_threshold: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_threshold) {
        return Err(SearchError::InvalidParameter {
            name: "p_threshold",
            value: p_threshold,
            reason: "must lie in [0, 1]",
        });
    }
    if !(e_o > 0.0) {
        return Err(SearchError::ZeroGap);
    }
    let amplitude = geom.sin_2x();
    let ratio = if amplitude > 0.0 {
        ((1.0 - p_threshold).sqrt() / amplitude).min(1.0)
    } else {
        1.0
    };
    Ok(ratio.asin() / e_o)
}

/// Outcome of planning a measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasuringPlan {
    /// P(t) reaches one on the schedule.
    Scheduled(MeasuringSchedule),
    /// cos γ = 0: the initial state already is the marked state, t₁ = 0.
    AlreadyMarked,
}

impl MeasuringPlan {
    pub fn t_first(&self) -> f64 {
        match self {
            MeasuringPlan::Scheduled(s) => s.t_first(),
            MeasuringPlan::AlreadyMarked => 0.0,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self, MeasuringPlan::AlreadyMarked)
    }
}

/// Geometry plus schedule for spectral parameters. Only a zero gap with a
/// non-marked initial state is an error.
pub fn plan_measurement(sp: &SpectralParams, init: &InitialState) -> Result<MeasuringPlan> {
    match solve_mixing_angle(init, sp.alpha()) {
        Ok(geom) => measuring_times(&geom, sp.e_o()).map(MeasuringPlan::Scheduled),
        Err(SearchError::DegenerateInitialState(_)) => Ok(MeasuringPlan::AlreadyMarked),
        Err(e) => Err(e),
    }
}

pub fn plan_measurement_coupling(
    cp: &CouplingParams,
    init: &InitialState,
) -> Result<MeasuringPlan> {
    plan_measurement(&to_spectral(cp, init).spectral, init)
}
