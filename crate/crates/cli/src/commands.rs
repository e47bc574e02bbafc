//! The five experiments. Each returns its artifact plus the exit status the
//! process should report; errors that abort a run come back as `CliError`.

use std::f64::consts::PI;

use num_complex::Complex64;
use qtrap_core::fock::{
    verify_bch, verify_bch_perturbed, verify_coherent_to_squeezed, verify_sas,
    verify_similarity_case, SimilarityCase, VerificationReport,
};
use qtrap_core::gaussian::muss_residual_with;
use qtrap_core::mode::canonical_initial_conditions;
use qtrap_core::{
    bogoliubov_decompose, classical_trajectory, coherent_state, displacement_map,
    floquet::floquet_stability_with_tol, integrate_epsilon, ladder_coeffs, moments, squeeze_factor,
    transform_uv, uncertainty_products, Drive, LadderCoeffs, ModeSolution, SqueezeParams,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{RunConfig, SqueezePoint};
use crate::error::{CliError, CliResult, Exit};
use crate::output::{Cell, Table, SCHEMA};

pub const STABILITY_COLUMNS: &[&str] = &["a", "q", "stable", "monodromy_trace", "growth_exponent"];
pub const EVOLVE_COLUMNS: &[&str] = &[
    "t",
    "z_cl",
    "p_cl",
    "re_eps",
    "im_eps",
    "phi",
    "phi_dot",
    "wronskian_err",
];
pub const UNCERTAINTY_COLUMNS: &[&str] = &[
    "t",
    "var_z",
    "var_p",
    "cov_zp",
    "heisenberg_zp",
    "schrodinger_rhs",
    "heisenberg_ZP",
    "B_re",
    "B_im",
    "muss_residual",
];

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|k| {
            if k + 1 == n {
                hi
            } else {
                lo + (hi - lo) * k as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// Integrates the configured trap from canonical data over [0, t_end].
pub fn solve(cfg: &RunConfig) -> CliResult<ModeSolution> {
    let trap = cfg.trap()?;
    let int = cfg.integration()?;
    let (e, d) = canonical_initial_conditions();
    Ok(integrate_epsilon(
        &Drive::trap(trap),
        0.0,
        int.t_end,
        e,
        d,
        int.tol,
    )?)
}

fn sample_times(cfg: &RunConfig) -> CliResult<Vec<f64>> {
    let int = cfg.integration()?;
    Ok(linspace(0.0, int.t_end, int.samples))
}

#[derive(Debug, Clone)]
pub struct StabilityRun {
    pub table: Table,
    /// (a, q, message) for every grid point whose integration failed.
    pub failures: Vec<(f64, f64, String)>,
}

impl StabilityRun {
    pub fn exit(&self) -> Exit {
        if self.failures.is_empty() {
            Exit::Ok
        } else {
            Exit::IntegrationFailure
        }
    }
}

pub fn stability(cfg: &RunConfig) -> CliResult<StabilityRun> {
    let sweep = cfg.sweep()?;
    let (na, nq) = sweep.resolution.counts();
    let points: Vec<(f64, f64)> = linspace(sweep.a_range[0], sweep.a_range[1], na)
        .into_iter()
        .flat_map(|a| {
            linspace(sweep.q_range[0], sweep.q_range[1], nq)
                .into_iter()
                .map(move |q| (a, q))
        })
        .collect();
    let verdicts: Vec<_> = points
        .par_iter()
        .map(|&(a, q)| floquet_stability_with_tol(a, q, sweep.omega, sweep.tol))
        .collect();
    let mut table = Table::new("stability", STABILITY_COLUMNS);
    let mut failures = Vec::new();
    for (&(a, q), v) in points.iter().zip(verdicts) {
        match v {
            Ok(v) => table.push(vec![
                a.into(),
                q.into(),
                Cell::Bool(v.stable),
                v.monodromy_trace.into(),
                v.growth_exponent.into(),
            ]),
            Err(e) => {
                table.push(vec![
                    a.into(),
                    q.into(),
                    Cell::Text("failed".into()),
                    Cell::Empty,
                    Cell::Empty,
                ]);
                failures.push((a, q, e.to_string()));
            }
        }
    }
    Ok(StabilityRun { table, failures })
}

pub fn evolve(cfg: &RunConfig) -> CliResult<Table> {
    let sol = solve(cfg)?;
    let state = cfg.state()?;
    let mut table = Table::new("evolve", EVOLVE_COLUMNS);
    for t in sample_times(cfg)? {
        let s = sol.at(t)?;
        let (z, p) = classical_trajectory(&sol, state.z0, state.p0, t)?;
        table.push(vec![
            t.into(),
            z.into(),
            p.into(),
            s.eps.re.into(),
            s.eps.im.into(),
            s.eps.norm_sqr().into(),
            (2.0 * (s.eps.conj() * s.deps).re).into(),
            s.wronskian_error().into(),
        ]);
    }
    Ok(table)
}

pub fn uncertainty(cfg: &RunConfig) -> CliResult<Table> {
    let sol = solve(cfg)?;
    let state = cfg.state()?;
    let grid = cfg.grid()?;
    let times = sample_times(cfg)?;
    let rows: Vec<CliResult<Vec<Cell>>> = times
        .par_iter()
        .map(|&t| {
            let g = coherent_state(&sol, t, state.z0, state.p0)?;
            let m = moments(&g);
            let u = uncertainty_products(&g);
            let b = squeeze_factor(&g, &m)?;
            let muss = muss_residual_with(&g, b, &grid)?;
            Ok(vec![
                t.into(),
                m.var_z.into(),
                m.var_p.into(),
                m.cov_zp.into(),
                u.heisenberg_zp.into(),
                u.schrodinger_rhs.into(),
                u.heisenberg_zp_quadrature.into(),
                b.re.into(),
                b.im.into(),
                muss.into(),
            ])
        })
        .collect();
    let mut table = Table::new("uncertainty", UNCERTAINTY_COLUMNS);
    for row in rows {
        table.push(row?);
    }
    Ok(table)
}

#[derive(Debug, Clone, Serialize)]
pub struct DualityResiduals {
    pub conjugation: VerificationReport,
    pub displacement: VerificationReport,
    pub eigenvector: VerificationReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct DualityReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub t: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub tolerance: f64,
    pub alpha: Complex64,
    pub ladder: LadderCoeffs,
    pub squeeze: SqueezeParams,
    pub r: f64,
    pub theta: f64,
    pub u: Complex64,
    pub v: Complex64,
    pub beta: Complex64,
    #[serde(rename = "B")]
    pub b: Complex64,
    /// |B|² − var_z/var_p
    pub variance_ratio_defect: f64,
    pub muss_residual: f64,
    pub residuals: DualityResiduals,
    pub vacuum_residual: f64,
    pub passed: bool,
}

impl DualityReport {
    pub fn exit(&self) -> Exit {
        if self.passed {
            Exit::Ok
        } else {
            Exit::CheckFailed
        }
    }

    pub fn max_residual(&self) -> f64 {
        let r = &self.residuals;
        r.conjugation
            .residual
            .max(r.displacement.residual)
            .max(r.eigenvector.residual)
    }
}

/// Integrate, read off the ladder pair at t_end, decompose it, map the
/// displacement, and check the chain on a truncated Fock space.
pub fn duality(cfg: &RunConfig) -> CliResult<DualityReport> {
    cfg.validate_for(crate::config::Command::Duality)?;
    let oracle = cfg.oracle()?;
    let state = cfg.state()?;
    let sol = solve(cfg)?;
    let t = sol.t_end();
    let lc = ladder_coeffs(&sol, t)?;
    let sp = bogoliubov_decompose(&lc)?;
    let (u, v) = transform_uv(&sp, &lc)?;
    let alpha = state.alpha();
    let beta = displacement_map(alpha, u, v)?;
    let chain = verify_coherent_to_squeezed(alpha, &lc, oracle.n).map_err(CliError::from_oracle)?;

    let g = coherent_state(&sol, t, state.z0, state.p0)?;
    let m = moments(&g);
    let b = squeeze_factor(&g, &m)?;
    let muss = muss_residual_with(&g, b, &cfg.grid()?)?;

    let passed = chain.pass(oracle.tolerance);
    Ok(DualityReport {
        schema: SCHEMA,
        command: "duality",
        t,
        n: oracle.n,
        tolerance: oracle.tolerance,
        alpha,
        ladder: lc,
        squeeze: sp,
        r: sp.r,
        theta: sp.theta,
        u,
        v,
        beta,
        b,
        variance_ratio_defect: b.norm_sqr() - m.var_z / m.var_p,
        muss_residual: muss,
        residuals: DualityResiduals {
            conjugation: chain.conjugation,
            displacement: chain.displacement,
            eigenvector: chain.eigenvector,
        },
        vacuum_residual: chain.vacuum_residual,
        passed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Builtin,
    User,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Refused,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteEntry {
    pub origin: Origin,
    pub identity: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<VerificationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub schema: &'static str,
    pub command: &'static str,
    #[serde(rename = "N")]
    pub n: usize,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma3_shift: Option<f64>,
    pub passed: usize,
    pub refused: usize,
    pub failed: Vec<String>,
    pub entries: Vec<SuiteEntry>,
}

impl VerifyReport {
    /// 1 on any failure; 2 if a user-supplied case was refused or nothing
    /// could be checked at all; 0 otherwise. Refused built-in cases are
    /// reported but do not count against the run.
    pub fn exit(&self) -> Exit {
        if !self.failed.is_empty() {
            Exit::CheckFailed
        } else if self.passed == 0
            || self
                .entries
                .iter()
                .any(|e| e.origin == Origin::User && e.status == Status::Refused)
        {
            Exit::ConfigInvalid
        } else {
            Exit::Ok
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Job {
    Bch(SqueezePoint),
    Sas(SqueezePoint),
    Similarity(SimilarityCase),
}

impl Job {
    fn name(&self) -> &'static str {
        match self {
            Job::Bch(_) => "bch",
            Job::Sas(_) => "sas",
            Job::Similarity(SimilarityCase::Rotation { .. }) => "similarity_rotation",
            Job::Similarity(SimilarityCase::Squeeze { .. }) => "similarity_squeeze",
        }
    }

    fn run(
        &self,
        n: usize,
        gamma3_shift: Option<f64>,
    ) -> qtrap_core::Result<Vec<VerificationReport>> {
        match *self {
            Job::Bch(p) => match gamma3_shift {
                Some(d) => verify_bch_perturbed(p.r, p.theta, n, d).map(|r| vec![r]),
                None => verify_bch(p.r, p.theta, n).map(|r| vec![r]),
            },
            Job::Sas(p) => verify_sas(p.r, p.theta, n).map(Vec::from),
            Job::Similarity(c) => verify_similarity_case(c, n).map(|r| vec![r]),
        }
    }
}

/// Squeeze parameters checked on every `verify` run.
pub fn builtin_sample() -> Vec<SqueezePoint> {
    [0.1, 0.5, 1.0]
        .into_iter()
        .flat_map(|r| {
            [-2.4, 0.0, 1.3]
                .into_iter()
                .map(move |theta| SqueezePoint { r, theta })
        })
        .collect()
}

fn suite(points: &[SqueezePoint], rotations: &[f64]) -> Vec<Job> {
    let mut jobs: Vec<Job> = points
        .iter()
        .flat_map(|&p| [Job::Bch(p), Job::Sas(p)])
        .collect();
    jobs.extend(
        rotations
            .iter()
            .map(|&t| Job::Similarity(SimilarityCase::Rotation { t })),
    );
    jobs.extend(points.iter().map(|p| {
        Job::Similarity(SimilarityCase::Squeeze {
            r: p.r,
            theta: p.theta,
        })
    }));
    jobs
}

pub fn verify(cfg: &RunConfig, gamma3_shift: Option<f64>) -> CliResult<VerifyReport> {
    let oracle = cfg.oracle()?;
    let mut jobs: Vec<(Origin, Job)> = suite(&builtin_sample(), &[0.7, PI / 2.0, 3.0])
        .into_iter()
        .map(|j| (Origin::Builtin, j))
        .collect();
    jobs.extend(
        suite(&oracle.params, &[])
            .into_iter()
            .map(|j| (Origin::User, j)),
    );

    let results: Vec<Vec<SuiteEntry>> = jobs
        .par_iter()
        .map(|&(origin, job)| match job.run(oracle.n, gamma3_shift) {
            Ok(reports) => reports
                .into_iter()
                .map(|r| SuiteEntry {
                    origin,
                    identity: r.identity.clone(),
                    status: if r.pass(oracle.tolerance) {
                        Status::Pass
                    } else {
                        Status::Fail
                    },
                    report: Some(r),
                    message: None,
                })
                .collect(),
            Err(e) => {
                let status = match e {
                    qtrap_core::Error::TruncationTooSmall { .. } => Status::Refused,
                    _ => Status::Fail,
                };
                vec![SuiteEntry {
                    origin,
                    identity: job.name().to_string(),
                    status,
                    report: None,
                    message: Some(CliError::from_oracle(e).to_string()),
                }]
            }
        })
        .collect();
    let entries: Vec<SuiteEntry> = results.into_iter().flatten().collect();
    let failed = entries
        .iter()
        .filter(|e| e.status == Status::Fail)
        .map(describe)
        .collect();
    Ok(VerifyReport {
        schema: SCHEMA,
        command: "verify",
        n: oracle.n,
        tolerance: oracle.tolerance,
        gamma3_shift,
        passed: entries.iter().filter(|e| e.status == Status::Pass).count(),
        refused: entries
            .iter()
            .filter(|e| e.status == Status::Refused)
            .count(),
        failed,
        entries,
    })
}

fn describe(e: &SuiteEntry) -> String {
    match &e.report {
        Some(r) => {
            let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            format!(
                "{}({}) residual {:e}",
                e.identity,
                params.join(", "),
                r.residual
            )
        }
        None => format!(
            "{}: {}",
            e.identity,
            e.message.as_deref().unwrap_or("error")
        ),
    }
}
