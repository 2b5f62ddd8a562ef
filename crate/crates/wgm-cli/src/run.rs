//! Command implementations.

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;

use wgm_core::asympt::{self, Regime};
use wgm_core::detsys;
use wgm_core::modes::{self, Normalization, SignMapGrid, SignMapVariant};
use wgm_core::newton::{self, DetProvider, NewtonConfig, NewtonResult};
use wgm_core::oracle::{LuneburgProvider, PwConstantProvider, ScaledByK};
use wgm_core::profiles::{self, catalog, RadialProfile};
use wgm_core::{DeterminantEval, Result as CoreResult};

use crate::output::{fmt, fmt_opt, write_csv, Sink};
use crate::{CliError, Command, Format, ModeKind, Norm, OutputArgs, ProfileArgs, SolverArgs, Variant};

struct NumericDet<'a> {
    profile: &'a RadialProfile,
    m: usize,
    tol: f64,
}

impl DetProvider for NumericDet<'_> {
    fn eval(&self, k: Complex64) -> CoreResult<DeterminantEval> {
        Ok(detsys::assemble(self.profile, self.m, k, self.tol)?.determinant())
    }
}

fn resolve_profile(args: &ProfileArgs) -> Result<RadialProfile, CliError> {
    match (&args.profile, &args.profile_json) {
        (Some(name), None) => catalog(name).map_err(|e| CliError::Config(e.to_string())),
        (None, Some(json)) => {
            profiles::parse_profile_json(json).map_err(|e| CliError::Config(e.to_string()))
        }
        (None, None) => Err(CliError::Config(
            "one of --profile or --profile-json is required".into(),
        )),
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    }
}

fn parse_range(range: &str) -> Result<(usize, usize), CliError> {
    let (lo, hi) = range
        .split_once("..")
        .ok_or_else(|| CliError::Config(format!("bad range {range:?}, expected lo..hi")))?;
    let lo: usize = lo
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("bad range start {lo:?}")))?;
    let hi: usize = hi
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("bad range end {hi:?}")))?;
    if lo == 0 || hi < lo {
        return Err(CliError::Config(format!("empty or invalid range {range:?}")));
    }
    Ok((lo, hi))
}

fn newton_config(s: &SolverArgs) -> Result<NewtonConfig, CliError> {
    let cfg = NewtonConfig { eps: s.eps, l_max: s.lmax, bvp_tol: s.bvp_tol, ..Default::default() };
    cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(cfg)
}

/// Starting value of a solve per --start and the optional homotopy stage.
fn starting_k(
    profile: &RadialProfile,
    m: usize,
    solver: &SolverArgs,
    cfg: &NewtonConfig,
) -> Result<f64, CliError> {
    let base = match solver.start.as_str() {
        "formula" => newton::starting_value(profile, m),
        "asympt" => match asympt::quasi_resonance(profile, m, 0) {
            Ok(k) => k,
            // No expansion for this profile: fall back to the formula.
            Err(wgm_core::Error::RegimeUnsupported(_)) => newton::starting_value(profile, m),
            Err(e) => return Err(CliError::Run(e.to_string())),
        },
        other => match other.strip_prefix("value:") {
            Some(v) => v
                .parse()
                .map_err(|_| CliError::Config(format!("bad --start value {v:?}")))?,
            None => {
                return Err(CliError::Config(format!(
                    "bad --start {other:?} (formula | asympt | value:<float>)"
                )))
            }
        },
    };
    match &solver.homotopy {
        None => Ok(base),
        Some(intermediate) => {
            let inter = catalog(intermediate).map_err(|e| CliError::Config(e.to_string()))?;
            let provider = NumericDet { profile: &inter, m, tol: cfg.bvp_tol };
            let res = newton::solve(&provider, Complex64::new(base, 0.0), cfg)
                .map_err(|e| CliError::Run(format!("homotopy stage: {e}")))?;
            if !res.converged {
                return Err(CliError::Run("homotopy stage did not converge".into()));
            }
            Ok(res.k.re)
        }
    }
}

/// One finished solve with everything the table row needs.
struct RunRecord {
    m: usize,
    k0: f64,
    result: Option<NewtonResult>,
    k_asympt: Option<f64>,
    error: Option<String>,
}

impl RunRecord {
    fn status(&self) -> String {
        match (&self.result, &self.error) {
            (Some(r), _) if r.converged => "converged".into(),
            (Some(_), _) => "maxiter".into(),
            (None, Some(e)) => format!("error: {e}"),
            (None, None) => "error".into(),
        }
    }

    fn csv_row(&self) -> String {
        let (l, re, im, det, ddet, rel) = match &self.result {
            Some(r) => {
                let last = r.last();
                (
                    Some(r.l as f64),
                    Some(r.k.re),
                    Some(r.k.im),
                    Some(last.abs_det),
                    Some(last.abs_ddet),
                    Some(last.rel_residual),
                )
            }
            None => (None, None, None, None, None, None),
        };
        let diff = match (&self.result, self.k_asympt) {
            (Some(r), Some(ka)) => Some((r.k - Complex64::new(ka, 0.0)).norm()),
            _ => None,
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.m,
            fmt(self.k0),
            l.map(|v| format!("{}", v as usize)).unwrap_or_default(),
            fmt_opt(re),
            fmt_opt(im),
            fmt_opt(self.k_asympt),
            fmt_opt(det),
            fmt_opt(ddet),
            fmt_opt(rel),
            fmt_opt(diff),
        ) + &format!(",{}", self.status())
    }

    fn json_value(&self) -> serde_json::Value {
        let mut v = json!({
            "m": self.m,
            "k0": self.k0,
            "converged": self.result.as_ref().map(|r| r.converged).unwrap_or(false),
        });
        if let Some(r) = &self.result {
            v["l"] = json!(r.l);
            v["k"] = json!({"re": r.k.re, "im": r.k.im});
            let last = r.last();
            v["abs_det"] = json!(last.abs_det);
            v["abs_ddet"] = json!(last.abs_ddet);
            v["rel_residual"] = json!(last.rel_residual);
            v["iterations"] = json!(r
                .iterations
                .iter()
                .map(|it| json!({
                    "re": it.k.re,
                    "im": it.k.im,
                    "abs_det": it.abs_det,
                    "rel_residual": it.rel_residual,
                }))
                .collect::<Vec<_>>());
        }
        if let Some(ka) = self.k_asympt {
            v["k_asympt"] = json!(ka);
            if let Some(r) = &self.result {
                v["diff_asympt"] = json!((r.k - Complex64::new(ka, 0.0)).norm());
            }
        }
        if let Some(e) = &self.error {
            v["error"] = json!(e);
        }
        v
    }
}

const RUN_HEADER: &str =
    "m,k0,l,re_k,im_k,k_asympt,abs_det,abs_ddet,rel_residual,diff_asympt,status";

fn solve_one(
    profile: &RadialProfile,
    m: usize,
    solver: &SolverArgs,
    cfg: &NewtonConfig,
) -> Result<RunRecord, CliError> {
    let k0 = starting_k(profile, m, solver, cfg)?;
    let k_asympt = asympt::quasi_resonance(profile, m, 0).ok();
    let provider = NumericDet { profile, m, tol: cfg.bvp_tol };
    let record = match newton::solve(&provider, Complex64::new(k0, 0.0), cfg) {
        Ok(result) => RunRecord { m, k0, result: Some(result), k_asympt, error: None },
        Err(e) => RunRecord { m, k0, result: None, k_asympt, error: Some(e.to_string()) },
    };
    Ok(record)
}

fn emit_runs(records: &[RunRecord], output: &OutputArgs) -> Result<(), CliError> {
    match output.format {
        Format::Csv => {
            let rows: Vec<String> = records.iter().map(RunRecord::csv_row).collect();
            write_csv(output.out.as_deref(), RUN_HEADER, &rows)
        }
        Format::Json => {
            let doc = json!({
                "runs": records.iter().map(RunRecord::json_value).collect::<Vec<_>>()
            });
            let mut sink = Sink::open(output.out.as_deref())?;
            sink.line(&serde_json::to_string_pretty(&doc).expect("serializable"))?;
            sink.finish()
        }
    }
}

fn require_csv(output: &OutputArgs, what: &str) -> Result<(), CliError> {
    if output.format != Format::Csv {
        return Err(CliError::Config(format!("{what} supports only --format csv")));
    }
    Ok(())
}

pub fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Solve { profile, m, solver, output } => {
            if m == 0 {
                return Err(CliError::Config("--m must be >= 1".into()));
            }
            let profile = resolve_profile(&profile)?;
            let cfg = newton_config(&solver)?;
            let record = solve_one(&profile, m, &solver, &cfg)?;
            let failed = !matches!(&record.result, Some(r) if r.converged);
            let err = record.error.clone();
            emit_runs(&[record], &output)?;
            if failed {
                return Err(CliError::Run(
                    err.unwrap_or_else(|| "Newton iteration did not converge".into()),
                ));
            }
            Ok(())
        }

        Command::Sweep { profile, m_range, solver, output } => {
            let (lo, hi) = parse_range(&m_range)?;
            if hi > 120 {
                return Err(CliError::Config("m-range must stay within 1..=120".into()));
            }
            let profile = resolve_profile(&profile)?;
            let cfg = newton_config(&solver)?;
            let mut records: Vec<RunRecord> = (lo..=hi)
                .into_par_iter()
                .map(|m| {
                    solve_one(&profile, m, &solver, &cfg).unwrap_or_else(|e| RunRecord {
                        m,
                        k0: f64::NAN,
                        result: None,
                        k_asympt: None,
                        error: Some(match e {
                            CliError::Config(msg) | CliError::Run(msg) => msg,
                        }),
                    })
                })
                .collect();
            records.sort_by_key(|r| r.m);
            let converged = records
                .iter()
                .filter(|r| matches!(&r.result, Some(res) if res.converged))
                .count();
            emit_runs(&records, &output)?;
            let total = records.len();
            if (converged as f64) < 0.9 * total as f64 {
                return Err(CliError::Run(format!(
                    "only {converged}/{total} rows converged"
                )));
            }
            Ok(())
        }

        Command::Validate { profile, m, k0_range, solver, output } => {
            require_csv(&output, "validate")?;
            let (lo, hi) = parse_range(&k0_range)?;
            let profile = resolve_profile(&profile)?;
            // The validation tables iterate on D(k) = det(k)/k with the
            // plain |D| <= eps criterion; the relative residual is already
            // below threshold at small real starts, far from any root.
            let mut cfg = newton_config(&solver)?;
            cfg.stop = newton::StopRule::AbsoluteDet;
            let oracle = oracle_provider(&profile, m)?;
            let numeric = ScaledByK(NumericDet { profile: &profile, m, tol: cfg.bvp_tol });

            let starts: Vec<usize> = (lo..=hi).collect();
            let mut rows: Vec<(usize, String, bool)> = starts
                .par_iter()
                .map(|&k0| {
                    let start = Complex64::new(k0 as f64, 0.0);
                    let num = newton::solve(&numeric, start, &cfg);
                    let orc = oracle.solve_from(start, &cfg);
                    let row = match (&num, &orc) {
                        (Ok(a), Ok(b)) => {
                            let ok = a.converged && b.converged;
                            let diff = (a.k - b.k).norm();
                            let status = if ok { "ok" } else { "maxiter" };
                            (
                                format!(
                                    "{},{},{},{},{},{},{},{},{}",
                                    k0,
                                    a.l,
                                    fmt(a.k.re),
                                    fmt(a.k.im),
                                    b.l,
                                    fmt(b.k.re),
                                    fmt(b.k.im),
                                    fmt(diff),
                                    status
                                ),
                                ok,
                            )
                        }
                        (num, orc) => {
                            let msg = [num, orc]
                                .iter()
                                .filter_map(|r| r.as_ref().err())
                                .map(|e| e.to_string())
                                .collect::<Vec<_>>()
                                .join("; ");
                            (format!("{k0},,,,,,,,error: {msg}"), false)
                        }
                    };
                    (k0, row.0, row.1)
                })
                .collect();
            rows.sort_by_key(|r| r.0);
            let ok = rows.iter().filter(|r| r.2).count();
            let header = "k0,l_numeric,re_k_numeric,im_k_numeric,l_oracle,re_k_oracle,im_k_oracle,diff_k,status";
            write_csv(
                output.out.as_deref(),
                header,
                &rows.iter().map(|r| r.1.clone()).collect::<Vec<_>>(),
            )?;
            let total = rows.len();
            if (ok as f64) < 0.9 * total as f64 {
                return Err(CliError::Run(format!("only {ok}/{total} rows converged")));
            }
            Ok(())
        }

        Command::Asympt { profile, m, m_range, j, output } => {
            require_csv(&output, "asympt")?;
            let profile = resolve_profile(&profile)?;
            let (lo, hi) = match (m, m_range) {
                (Some(m), None) => (m, m),
                (None, Some(range)) => parse_range(&range)?,
                _ => return Err(CliError::Config("need --m or --m-range".into())),
            };
            if lo == 0 {
                return Err(CliError::Config("--m must be >= 1".into()));
            }
            let inv = asympt::invariants(&profile);
            let regime = match inv.regime {
                Regime::A => "A",
                Regime::B => "B",
                Regime::C => "C",
                Regime::NotApplicable => "NA",
            };
            let mut rows = Vec::new();
            for m in lo..=hi {
                let k = asympt::quasi_resonance(&profile, m, j).ok();
                rows.push(format!("{m},{regime},{}", fmt_opt(k)));
            }
            write_csv(output.out.as_deref(), "m,regime,k_asympt", &rows)
        }

        Command::Mode {
            profile,
            m,
            kind,
            k_re,
            k_im,
            normalization,
            polar_out,
            solver,
            output,
        } => {
            require_csv(&output, "mode")?;
            let profile = resolve_profile(&profile)?;
            let cfg = newton_config(&solver)?;
            let k_res = match (k_re, k_im) {
                (Some(re), Some(im)) => Complex64::new(re, im),
                _ => {
                    let record = solve_one(&profile, m, &solver, &cfg)?;
                    match record.result {
                        Some(r) if r.converged => r.k,
                        _ => return Err(CliError::Run("resonance solve did not converge".into())),
                    }
                }
            };
            let mode = match kind {
                ModeKind::Exact => {
                    let norm = match normalization {
                        Norm::Value => Normalization::Value,
                        Norm::Derivative => Normalization::Derivative,
                    };
                    modes::exact_mode(&profile, m, k_res, norm, cfg.bvp_tol)?
                }
                ModeKind::Quasi => {
                    let (_, mode) = modes::scattering_solve(
                        &profile,
                        m,
                        k_res.re,
                        Complex64::new(1.0, 0.0),
                        cfg.bvp_tol,
                    )?;
                    mode
                }
            };
            let rows: Vec<String> = mode
                .samples
                .iter()
                .map(|s| {
                    let region = match s.region {
                        profiles::Side::Inner => "inner",
                        profiles::Side::Outer => "outer",
                    };
                    format!("{},{region},{},{}", fmt(s.r), fmt(s.u.re), fmt(s.u.im))
                })
                .collect();
            write_csv(output.out.as_deref(), "r,region,re_u,im_u", &rows)?;

            if let Some(polar_path) = polar_out {
                let mut rows = Vec::with_capacity(200 * 256);
                let step = (mode.samples.len() as f64 / 200.0).max(1.0);
                for i in 0..200 {
                    let sample = &mode.samples[((i as f64 * step) as usize).min(mode.samples.len() - 1)];
                    for jj in 0..256 {
                        let theta = 2.0 * std::f64::consts::PI * jj as f64 / 256.0;
                        let value =
                            (sample.u * Complex64::new(0.0, m as f64 * theta).exp()).re;
                        rows.push(format!("{},{},{}", fmt(sample.r), fmt(theta), fmt(value)));
                    }
                }
                write_csv(Some(&polar_path), "r,theta,value", &rows)?;
            }
            Ok(())
        }

        Command::Opnorm { profile, m_list, k_min, k_max, steps, bvp_tol, output } => {
            require_csv(&output, "opnorm")?;
            let profile = resolve_profile(&profile)?;
            let m_list: Vec<usize> = m_list
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|_| CliError::Config(format!("bad --m-list {m_list:?}")))?;
            let sweeps = modes::opnorm_sweep(&profile, &m_list, k_min, k_max, steps, bvp_tol)
                .map_err(|e| CliError::Config(e.to_string()))?;
            let mut rows = Vec::new();
            for (m, points) in sweeps {
                for (k, norm) in points {
                    rows.push(format!("{m},{},{}", fmt(k), fmt_opt(norm)));
                }
            }
            write_csv(output.out.as_deref(), "m,k,invnorm", &rows)
        }

        Command::Signmap {
            m,
            xi,
            n1,
            n2,
            variant,
            re_min,
            re_max,
            im_min,
            im_max,
            n_re,
            n_im,
            output,
        } => {
            require_csv(&output, "signmap")?;
            if n_re < 2 || n_im < 2 || !(re_max > re_min) || !(im_max > im_min) {
                return Err(CliError::Config("bad signmap grid".into()));
            }
            let grid = SignMapGrid { re_min, re_max, im_min, im_max, n_re, n_im };
            let variant = match variant {
                Variant::Det1 => SignMapVariant::Det1,
                Variant::Det2 => SignMapVariant::Det2,
                Variant::Detscal => SignMapVariant::DetScal,
            };
            let cells = modes::scaling_sign_map(m, xi, n1, n2, grid, variant);
            let rows: Vec<String> = cells
                .iter()
                .map(|cell| format!("{},{},{}", fmt(cell.re_k), fmt(cell.im_k), cell.sign))
                .collect();
            write_csv(output.out.as_deref(), "re_k,im_k,sign", &rows)
        }
    }
}

/// Closed-form Newton provider for the two analytically solvable cases.
enum OracleKind {
    Pwc(PwConstantProvider),
    Luneburg(LuneburgProvider),
}

impl OracleKind {
    fn solve_from(&self, k0: Complex64, cfg: &NewtonConfig) -> CoreResult<NewtonResult> {
        match self {
            OracleKind::Pwc(p) => newton::solve(p, k0, cfg),
            OracleKind::Luneburg(p) => newton::solve(p, k0, cfg),
        }
    }
}

fn oracle_provider(profile: &RadialProfile, m: usize) -> Result<OracleKind, CliError> {
    if let Some((n1, n2)) = profile.is_piecewise_constant() {
        return Ok(OracleKind::Pwc(PwConstantProvider { m, xi: profile.xi, n1, n2 }));
    }
    let luneburg = catalog("luneburg").expect("catalog");
    if *profile == luneburg {
        return Ok(OracleKind::Luneburg(LuneburgProvider { m, xi: profile.xi }));
    }
    Err(CliError::Config(
        "validate supports only piecewise-constant profiles and the luneburg lens".into(),
    ))
}
