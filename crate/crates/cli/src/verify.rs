//! Randomized invariant suite behind `qsearch verify`.

use std::f64::consts::PI;
use std::io::Write;

use qsearch::angle::angle_distance;
use qsearch::evolution::{probability_closed, propagate_exact};
use qsearch::fullspace::{build_full_hamiltonian, evolve_full, SearchInstance};
use qsearch::qmodel::{to_coupling, to_spectral};
use qsearch::rk4::STEP_LIMIT;
use qsearch::timing::{first_time_from_coupling, plan_measurement, MeasuringSchedule};
use qsearch::{CouplingParams, Hamiltonian2, InitialState, MeasuringPlan};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::{fmt_f64, CliError, Format, VerifyArgs};

/// Draws whose gap falls below this are skipped; their periods are too long
/// to sample meaningfully.
const MIN_GAP: f64 = 1e-3;
/// Full-space integration is O(N²) per step, so it runs on a prefix of the
/// draws only.
const MAX_FULL_SPACE_DRAWS: usize = 20;

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: &'static str,
    pub tolerance: f64,
    pub max_error: f64,
    pub cases: usize,
    pub failures: usize,
}

impl CheckReport {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            tolerance,
            max_error: 0.0,
            cases: 0,
            failures: 0,
        }
    }

    fn record(&mut self, error: f64) {
        self.cases += 1;
        // NaN counts as a failure
        if !(error <= self.tolerance) {
            self.failures += 1;
        }
        if error.is_nan() || error > self.max_error {
            self.max_error = error;
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, Copy)]
struct Draw {
    cp: CouplingParams,
    init: InitialState,
    schedule: MeasuringSchedule,
    t_first: f64,
}

fn draw(rng: &mut ChaCha8Rng) -> Option<Draw> {
    let cp = CouplingParams::new(
        rng.gen_range(0.0..3.0),
        rng.gen_range(0.0..3.0),
        rng.gen_range(-PI..PI),
    )
    .ok()?;
    let init = InitialState::new(rng.gen_range(0.05..1.5), rng.gen_range(-PI..PI)).ok()?;
    let sp = to_spectral(&cp, &init).spectral;
    if sp.e_o() < MIN_GAP {
        return None;
    }
    let MeasuringPlan::Scheduled(schedule) = plan_measurement(&sp, &init).ok()? else {
        return None;
    };
    let t_first = first_time_from_coupling(&cp, &init).ok()?;
    Some(Draw {
        cp,
        init,
        schedule,
        t_first,
    })
}

pub fn run_checks(args: &VerifyArgs, seed: u64) -> Result<Vec<CheckReport>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<Draw> = (0..args.draws).filter_map(|_| draw(&mut rng)).collect();

    let mut norm = CheckReport::new("norm_conservation", 1e-12);
    let mut agree = CheckReport::new("coupling_spectral_agreement", 1e-10);
    let mut round_trip = CheckReport::new("parameter_round_trip", 1e-9);
    let mut certainty = CheckReport::new("certainty_at_t_first", 1e-12);
    let mut schedule = CheckReport::new("schedule_consistency", 1e-9);
    let mut law = CheckReport::new("probability_law", 1e-12);
    let mut period = CheckReport::new("periodicity", 1e-10);
    let mut floor = CheckReport::new("floor_tightness", 1e-12);
    let mut window = CheckReport::new("tolerance_window", 1e-10);
    let mut outer = CheckReport::new("outer_product_form", 1e-12);
    let mut branch = CheckReport::new("real_phase_branches", 1e-12);

    for d in &draws {
        let h = Hamiltonian2::from_coupling(&d.cp, &d.init);
        let sp = to_spectral(&d.cp, &d.init).spectral;
        let psi0 = d.init.state();
        let geom = *d.schedule.geometry();
        let e_o = sp.e_o();
        let t = rng.gen_range(0.0..4.0 * PI / e_o);
        let p_at = |t: f64| propagate_exact(&h, &psi0, t).marked_probability();

        norm.record((propagate_exact(&h, &psi0, t).norm() - 1.0).abs());

        let scale = 1.0 + d.cp.e_fg().abs() + d.cp.e_f();
        let tuned = Hamiltonian2::from_spectral_tuned(&sp, &d.init)?;
        agree.record(h.max_entry_diff(&tuned) / scale);
        outer.record(h.max_entry_diff(&Hamiltonian2::generalized_search(&d.cp, &d.init)) / scale);

        let real_init = InitialState::new(d.init.beta(), 0.0)?;
        for phi in [0.0, PI] {
            let cp = CouplingParams::new(d.cp.e_fg(), d.cp.e_f(), phi)?;
            let bk = Hamiltonian2::bae_kwon(&cp, &real_init)?;
            branch.record(bk.max_entry_diff(&Hamiltonian2::from_coupling(&cp, &real_init)) / scale);
        }

        let back = to_coupling(&sp, &d.init)?;
        let mut rt = (back.e_fg() - d.cp.e_fg())
            .abs()
            .max((back.e_f() - d.cp.e_f()).abs())
            / scale;
        if d.cp.e_f() > 1e-6 {
            rt = rt.max(angle_distance(back.phi(), d.cp.phi()));
        }
        round_trip.record(rt);

        certainty.record(1.0 - p_at(d.t_first));
        schedule.record((d.t_first - d.schedule.t_first()).abs() * e_o);

        law.record((p_at(t) - probability_closed(&d.init, geom.gamma(), e_o, t)?).abs());
        period.record((p_at(t + d.schedule.period()) - p_at(t)).abs());
        floor
            .record((p_at(d.t_first + 0.5 * d.schedule.period()) - geom.probability_floor()).abs());

        let p = 0.99;
        let delta = d.schedule.tolerance_halfwidth(p)?;
        for tt in [d.t_first - delta, d.t_first + delta] {
            let err = if geom.probability_floor() >= p {
                (p - p_at(tt)).max(0.0)
            } else {
                (p_at(tt) - p).abs()
            };
            window.record(err);
        }
    }

    let mut reports = vec![
        norm, agree, outer, branch, round_trip, certainty, schedule, law, period, floor, window,
    ];
    if args.full_space {
        reports.extend(full_space_checks(args, &draws)?);
    }
    Ok(reports)
}

fn full_space_checks(args: &VerifyArgs, draws: &[Draw]) -> Result<Vec<CheckReport>, CliError> {
    let mut herm = CheckReport::new("full_space_hermiticity", 1e-14);
    let mut restrict = CheckReport::new("full_space_restriction", 1e-12);
    let mut reduction = CheckReport::new("full_space_reduction", 1e-6);

    for d in draws.iter().take(MAX_FULL_SPACE_DRAWS) {
        let inst = SearchInstance::first_marked(args.n, args.m, d.init.u())?;
        let init = inst.initial_state();
        let h_full = build_full_hamiltonian(&inst, &d.cp)?;
        let scale = 1.0 + d.cp.e_fg().abs() + d.cp.e_f();
        herm.record(h_full.hermiticity_defect() / scale);

        let h2 = Hamiltonian2::from_coupling(&d.cp, &init);
        restrict.record(h_full.restrict(&inst).max_entry_diff(&h2) / scale);

        let sp = to_spectral(&d.cp, &init).spectral;
        if sp.e_o() < MIN_GAP {
            continue;
        }
        let dt = (1e-3 / sp.e_o()).min(0.9 * STEP_LIMIT / h_full.frobenius_norm());
        let run = evolve_full(&inst, &d.cp, PI / sp.e_o(), dt)?;
        let psi0 = init.state();
        let err = run
            .trace
            .samples
            .iter()
            .map(|s| (s.p_w - propagate_exact(&h2, &psi0, s.t).marked_probability()).abs())
            .fold(0.0, f64::max);
        reduction.record(err);
    }
    Ok(vec![herm, restrict, reduction])
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    seed: u64,
    draws: usize,
    passed: bool,
    checks: &'a [CheckReport],
}

pub fn cmd_verify(
    args: &VerifyArgs,
    seed: u64,
    format: Format,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    if args.draws == 0 {
        return Err(CliError::Usage("--draws must be positive".into()));
    }
    let checks = run_checks(args, seed)?;
    let failed = checks.iter().filter(|c| !c.passed()).count();

    for c in &checks {
        eprintln!(
            "{:<4} {:<28} max_error={:<12.3e} tol={:.0e} cases={}",
            if c.passed() { "ok" } else { "FAIL" },
            c.name,
            c.max_error,
            c.tolerance,
            c.cases
        );
    }

    match format {
        Format::Json => {
            let report = VerifyReport {
                seed,
                draws: args.draws,
                passed: failed == 0,
                checks: &checks,
            };
            serde_json::to_writer(&mut *out, &report)?;
            writeln!(out)?;
        }
        Format::Csv => {
            writeln!(out, "name,passed,max_error,tolerance,cases,failures")?;
            for c in &checks {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    c.name,
                    c.passed(),
                    fmt_f64(c.max_error),
                    fmt_f64(c.tolerance),
                    c.cases,
                    c.failures
                )?;
            }
        }
    }
    if failed > 0 {
        Err(CliError::VerificationFailed(failed))
    } else {
        Ok(())
    }
}
