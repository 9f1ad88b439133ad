use std::f64::consts::PI;
use std::io::Write;

use qsearch::evolution::{propagate_exact, sample_states, Propagator};
use qsearch::qmodel::to_spectral;
use qsearch::timing::{first_time_from_coupling, plan_measurement, solve_mixing_angle};
use qsearch::{Hamiltonian2, MeasuringPlan, SearchError};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::params::{Form, ParamSet, SweepAxis};
use crate::{fmt_f64, CliError, Format, ParamArgs, SweepArgs, TraceArgs};

/// The Hamiltonian a parameter set describes. Spectral input is tuned to the
/// initial state; when the initial state already is the marked state any
/// mixing angle works and x = 0 is used.
pub fn hamiltonian(params: &ParamSet) -> Hamiltonian2 {
    match params.form {
        Form::Coupling(cp) => Hamiltonian2::from_coupling(&cp, &params.init),
        Form::Spectral(sp) => Hamiltonian2::from_spectral_tuned(&sp, &params.init)
            .unwrap_or_else(|_| Hamiltonian2::from_spectral_angle(&sp, 0.0)),
    }
}

/// First measuring time. Coupling input uses the direct coupling-form
/// expression; spectral input uses the schedule.
pub fn first_time(params: &ParamSet, plan: &MeasuringPlan) -> Result<f64, SearchError> {
    match (plan, params.form) {
        (MeasuringPlan::AlreadyMarked, _) => Ok(0.0),
        (MeasuringPlan::Scheduled(_), Form::Coupling(cp)) => {
            first_time_from_coupling(&cp, &params.init)
        }
        (MeasuringPlan::Scheduled(s), Form::Spectral(_)) => Ok(s.t_first()),
    }
}

fn finite_or_none(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[derive(Debug, Serialize)]
struct TimeReport {
    parameterization: &'static str,
    t_first: f64,
    period: Option<f64>,
    e_p: f64,
    e_o: f64,
    alpha: f64,
    gamma: f64,
    x: Option<f64>,
    p_floor: f64,
    degenerate: bool,
    e_fg: Option<f64>,
    e_f: Option<f64>,
    phi: Option<f64>,
    beta: f64,
    u: f64,
}

pub fn cmd_time(args: &ParamArgs, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    let params = args.resolve()?;
    let sp = params.spectral();
    let plan = plan_measurement(&sp, &params.init)?;
    let t_first = first_time(&params, &plan)?;
    let coupling = params.coupling().ok();
    let sin_gamma = params.init.sin_beta() * (sp.alpha() - params.init.u()).sin();

    let (x, p_floor) = match &plan {
        MeasuringPlan::Scheduled(s) => (Some(s.geometry().x()), s.geometry().probability_floor()),
        MeasuringPlan::AlreadyMarked => (None, 1.0),
    };
    let report = TimeReport {
        parameterization: params.name(),
        t_first,
        period: finite_or_none(PI / sp.e_o()),
        e_p: sp.e_p(),
        e_o: sp.e_o(),
        alpha: sp.alpha(),
        gamma: sin_gamma.clamp(-1.0, 1.0).asin(),
        x,
        p_floor,
        degenerate: plan.is_degenerate(),
        e_fg: coupling.map(|c| c.e_fg()),
        e_f: coupling.map(|c| c.e_f()),
        phi: coupling.map(|c| c.phi()),
        beta: params.init.beta(),
        u: params.init.u(),
    };
    write_record(&report, format, out)
}

#[derive(Debug, Serialize)]
struct ConvertReport {
    parameterization: &'static str,
    beta: f64,
    u: f64,
    e_p: f64,
    e_o: f64,
    alpha: f64,
    e1: f64,
    e2: f64,
    e_fg: f64,
    e_f: f64,
    phi: f64,
    gamma: Option<f64>,
    x: Option<f64>,
    degenerate: bool,
}

pub fn cmd_convert(args: &ParamArgs, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    let params = args.resolve()?;
    let (sp, cp, degenerate_spectrum) = match params.form {
        Form::Coupling(cp) => {
            let conv = to_spectral(&cp, &params.init);
            (conv.spectral, cp, conv.degenerate_spectrum)
        }
        Form::Spectral(sp) => (sp, params.coupling()?, sp.is_degenerate()),
    };
    let geom = solve_mixing_angle(&params.init, sp.alpha()).ok();
    let report = ConvertReport {
        parameterization: params.name(),
        beta: params.init.beta(),
        u: params.init.u(),
        e_p: sp.e_p(),
        e_o: sp.e_o(),
        alpha: sp.alpha(),
        e1: sp.e1(),
        e2: sp.e2(),
        e_fg: cp.e_fg(),
        e_f: cp.e_f(),
        phi: cp.phi(),
        gamma: geom.map(|g| g.gamma()),
        x: geom.map(|g| g.x()),
        degenerate: degenerate_spectrum || geom.is_none(),
    };
    write_record(&report, format, out)
}

pub const TRACE_HEADER: &str = "t,p_w,re_a_w,im_a_w,re_a_perp,im_a_perp";

pub fn cmd_trace(args: &TraceArgs, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    let params = args.params.resolve()?;
    let sp = params.spectral();
    let t_max = match args.t_max {
        Some(t) => t,
        None if sp.e_o() > 0.0 => 2.0 * PI / sp.e_o(),
        None => {
            return Err(CliError::Usage(
                "zero spectral gap: give --t-max explicitly".into(),
            ))
        }
    };
    let propagator = if args.numeric {
        Propagator::Numeric { dt: args.dt }
    } else {
        Propagator::Exact
    };
    let h = hamiltonian(&params);
    let states = sample_states(&h, &params.init.state(), t_max, args.samples, propagator)?;
    echo_params(&params);

    match format {
        Format::Csv => {
            writeln!(out, "{TRACE_HEADER}")?;
            for (t, psi) in &states {
                let (a, b) = (psi.a_w(), psi.a_perp());
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    fmt_f64(*t),
                    fmt_f64(psi.marked_probability()),
                    fmt_f64(a.re),
                    fmt_f64(a.im),
                    fmt_f64(b.re),
                    fmt_f64(b.im)
                )?;
            }
        }
        Format::Json => {
            let rows: Vec<[f64; 6]> = states
                .iter()
                .map(|(t, psi)| {
                    let (a, b) = (psi.a_w(), psi.a_perp());
                    [*t, psi.marked_probability(), a.re, a.im, b.re, b.im]
                })
                .collect();
            let doc = serde_json::json!({
                "parameterization": params.name(),
                "beta": params.init.beta(),
                "u": params.init.u(),
                "mode": if args.numeric { "numeric" } else { "exact" },
                "columns": TRACE_HEADER.split(',').collect::<Vec<_>>(),
                "rows": rows,
            });
            serde_json::to_writer(&mut *out, &doc)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

/// One evaluated grid point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub t_first: f64,
    pub delta_max: f64,
    pub p_at_t_first: f64,
}

pub fn sweep_point(params: &ParamSet, p_threshold: f64) -> Result<SweepRow, CliError> {
    let sp = params.spectral();
    let plan = match plan_measurement(&sp, &params.init) {
        Ok(plan) => plan,
        Err(SearchError::ZeroGap) => {
            return Ok(SweepRow {
                t_first: f64::NAN,
                delta_max: f64::NAN,
                p_at_t_first: f64::NAN,
            })
        }
        Err(e) => return Err(e.into()),
    };
    let t_first = first_time(params, &plan)?;
    let delta_max = match &plan {
        MeasuringPlan::Scheduled(s) => s.tolerance_halfwidth(p_threshold)?,
        MeasuringPlan::AlreadyMarked => f64::INFINITY,
    };
    let psi = propagate_exact(&hamiltonian(params), &params.init.state(), t_first);
    Ok(SweepRow {
        t_first,
        delta_max,
        p_at_t_first: psi.marked_probability(),
    })
}

pub fn cmd_sweep(args: &SweepArgs, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    if args.axes.is_empty() || args.axes.len() > 2 {
        return Err(CliError::Usage(
            "sweep takes one or two --sweep axes".into(),
        ));
    }
    if !(0.0..=1.0).contains(&args.p_threshold) {
        return Err(CliError::Usage("--p-threshold must lie in [0, 1]".into()));
    }
    let axes = args
        .axes
        .iter()
        .map(|s| SweepAxis::parse(s))
        .collect::<Result<Vec<_>, _>>()?;
    if axes.len() == 2 && axes[0].name == axes[1].name {
        return Err(CliError::Usage("the two sweep axes must differ".into()));
    }

    let mut points: Vec<Vec<f64>> = axes[0].values().into_iter().map(|v| vec![v]).collect();
    if let Some(second) = axes.get(1) {
        points = points
            .into_iter()
            .flat_map(|p| {
                second.values().into_iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }

    let resolved = points
        .iter()
        .map(|vals| {
            let mut a = args.params.clone();
            for (axis, v) in axes.iter().zip(vals) {
                a.set(&axis.name, *v)?;
            }
            a.resolve()
        })
        .collect::<Result<Vec<_>, _>>()?;

    // rows come back in grid order
    let rows = resolved
        .par_iter()
        .map(|p| sweep_point(p, args.p_threshold))
        .collect::<Result<Vec<_>, _>>()?;

    let names: Vec<&str> = axes.iter().map(|a| a.name.as_str()).collect();
    match format {
        Format::Csv => {
            writeln!(out, "{},t_first,delta_max,p_at_t_first", names.join(","))?;
            for (vals, row) in points.iter().zip(&rows) {
                let mut fields: Vec<String> = vals.iter().map(|v| fmt_f64(*v)).collect();
                fields.extend([row.t_first, row.delta_max, row.p_at_t_first].map(fmt_f64));
                writeln!(out, "{}", fields.join(","))?;
            }
        }
        Format::Json => {
            let rows: Vec<Value> = points
                .iter()
                .zip(&rows)
                .map(|(vals, row)| {
                    let mut m = Map::new();
                    for (n, v) in names.iter().zip(vals) {
                        m.insert(n.to_string(), (*v).into());
                    }
                    m.insert("t_first".into(), row.t_first.into());
                    m.insert("delta_max".into(), row.delta_max.into());
                    m.insert("p_at_t_first".into(), row.p_at_t_first.into());
                    Value::Object(m)
                })
                .collect();
            let doc = serde_json::json!({ "p_threshold": args.p_threshold, "rows": rows });
            serde_json::to_writer(&mut *out, &doc)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

/// Normalized input angles go to stderr for CSV outputs, which carry no
/// metadata of their own.
fn echo_params(params: &ParamSet) {
    let phase = match params.form {
        Form::Spectral(sp) => format!("alpha={}", fmt_f64(sp.alpha())),
        Form::Coupling(cp) => format!("phi={}", fmt_f64(cp.phi())),
    };
    eprintln!(
        "# {} beta={} u={} {phase}",
        params.name(),
        fmt_f64(params.init.beta()),
        fmt_f64(params.init.u())
    );
}

/// A flat record as a JSON object or a two-line CSV.
fn write_record<T: Serialize>(
    record: &T,
    format: Format,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let value = serde_json::to_value(record)?;
    match format {
        Format::Json => {
            serde_json::to_writer(&mut *out, &value)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let Value::Object(map) = value else {
                unreachable!("records serialize to objects")
            };
            let header: Vec<&str> = map.keys().map(String::as_str).collect();
            let row: Vec<String> = map
                .values()
                .map(|v| match v {
                    Value::Null => String::new(),
                    Value::Number(n) => fmt_f64(n.as_f64().unwrap_or(f64::NAN)),
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect();
            writeln!(out, "{}", header.join(","))?;
            writeln!(out, "{}", row.join(","))?;
        }
    }
    Ok(())
}
