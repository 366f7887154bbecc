use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;

use nlsob::exponent::{trace, ExponentReport};
use nlsob::kernel::{validate_kernel, KernelReport};
use nlsob::lebesgue::{check_modular_norm_relations, luxemburg_norm, modular_lebesgue, RelationReport};
use nlsob::operator::{
    apply_weak, boundedness_probe, coercivity_probe, monotonicity_probe, BoundednessReport, CoercivityReport,
};
use nlsob::properties::{run_properties, PropertiesReport};
use nlsob::random::{random_bumps, rng};
use nlsob::report::to_json;
use nlsob::sobolev::{
    check_modular_seminorm_relations, compare_spaces, embedding_ratio, full_norm, gagliardo_modular,
    gagliardo_seminorm, SeminormResult,
};
use nlsob::solver::{
    mountain_pass_geometry, solve_dirichlet, solve_kirchhoff, validate_kirchhoff, DirichletOptions, KirchhoffOptions,
    KirchhoffReport, KirchhoffValidation, SolveReport,
};
use nlsob::{GridDomain, GridFunction, Interaction};

use crate::config::RunConfig;
use crate::failure::Failure;
use crate::{Command, Space};

pub struct Outcome {
    pub pass: bool,
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    command: &'a str,
    status: &'static str,
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<ErrorEntry<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<T>,
}

#[derive(Serialize)]
struct ErrorEntry<'a> {
    kind: &'a str,
    exit_code: u8,
    message: &'a str,
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display())))
}

fn finish<T: Serialize>(dir: &Path, command: &str, seed: u64, pass: bool, result: T) -> Result<Outcome, Failure> {
    let report = Report::<T> {
        command,
        status: if pass { "pass" } else { "fail" },
        seed: Some(seed),
        error: None,
        result: Some(result),
    };
    write_file(dir, "report.json", &to_json(&report))?;
    Ok(Outcome { pass })
}

pub fn write_failure(dir: &Path, command: &str, seed: Option<u64>, f: &Failure) -> Result<(), Failure> {
    let report = Report::<()> {
        command,
        status: "error",
        seed,
        error: Some(ErrorEntry {
            kind: f.kind,
            exit_code: f.code,
            message: &f.message,
        }),
        result: None,
    };
    std::fs::create_dir_all(dir).map_err(|e| Failure::io(e.to_string()))?;
    write_file(dir, "report.json", &to_json(&report))
}

struct Setup {
    grid: Arc<GridDomain>,
    ia: Interaction,
}

fn setup(cfg: &RunConfig) -> Result<Setup, Failure> {
    let grid = cfg.build_grid()?;
    let p = cfg.build_exponent(&grid)?;
    let kernel = cfg.build_kernel(&p, &grid)?;
    let ia = Interaction::new(grid.clone(), &kernel, &p);
    Ok(Setup { grid, ia })
}

/// The configured function, or seeded random bumps.
fn subject(cfg: &RunConfig, grid: &Arc<GridDomain>) -> Result<GridFunction, Failure> {
    match cfg.function(grid)? {
        Some(u) => Ok(u),
        None => Ok(random_bumps(grid, &mut rng(cfg.seed()))?),
    }
}

fn fmt_f(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        String::new()
    }
}

pub fn run(command: &Command, cfg: &RunConfig, out: &Path) -> Result<Outcome, Failure> {
    let seed = cfg.seed();
    let name = command.name();
    match command {
        Command::ValidateKernel => {
            #[derive(Serialize)]
            struct R {
                exponent: ExponentReport,
                kernel: KernelReport,
            }
            let grid = cfg.build_grid()?;
            let p = cfg.build_exponent(&grid)?;
            let kernel = cfg.build_kernel(&p, &grid)?;
            let r = R {
                exponent: p.report(),
                kernel: validate_kernel(&kernel, &p, &grid)?,
            };
            let pass = r.exponent.pass && r.kernel.pass;
            finish(out, name, seed, pass, r)
        }
        Command::Norm { space } => {
            let s = setup(cfg)?;
            let u = subject(cfg, &s.grid)?;
            match space {
                Space::Lebesgue => {
                    #[derive(Serialize)]
                    struct R {
                        space: &'static str,
                        exponent: String,
                        norm: f64,
                        modular: f64,
                        relations: RelationReport,
                    }
                    let q = match &cfg.lebesgue.q {
                        Some(q) => q.scalar_exponent(&s.grid)?,
                        None => trace(s.ia.exponent()),
                    };
                    let relations = check_modular_norm_relations(&u, &q)?;
                    let r = R {
                        space: "lebesgue",
                        exponent: q.label().to_string(),
                        norm: luxemburg_norm(&u, &q)?,
                        modular: modular_lebesgue(&u, &q),
                        relations,
                    };
                    let pass = r.relations.pass();
                    finish(out, name, seed, pass, r)
                }
                Space::Sobolev => {
                    #[derive(Serialize)]
                    struct R {
                        space: &'static str,
                        norm: f64,
                        seminorm: f64,
                        lebesgue_part: f64,
                    }
                    let norm = full_norm(&u, &s.ia)?;
                    let seminorm = gagliardo_seminorm(&u, &s.ia)?.seminorm;
                    let r = R {
                        space: "sobolev",
                        norm,
                        seminorm,
                        lebesgue_part: norm - seminorm,
                    };
                    let pass = r.norm.is_finite() && r.seminorm <= r.norm;
                    finish(out, name, seed, pass, r)
                }
            }
        }
        Command::Seminorm => {
            #[derive(Serialize)]
            struct R {
                modular: f64,
                seminorm: SeminormResult,
                relations: RelationReport,
            }
            let s = setup(cfg)?;
            let u = subject(cfg, &s.grid)?;
            let r = R {
                modular: gagliardo_modular(&u, &s.ia)?,
                seminorm: gagliardo_seminorm(&u, &s.ia)?,
                relations: check_modular_seminorm_relations(&u, &s.ia)?,
            };
            let pass = r.relations.pass();
            finish(out, name, seed, pass, r)
        }
        Command::CompareSpaces => {
            #[derive(Serialize)]
            struct R {
                samples: usize,
                ktilde: f64,
                max_ratio: f64,
                violations: usize,
            }
            let s = setup(cfg)?;
            let mut r = rng(seed);
            let mut csv = String::from("sample,seminorm_singular,seminorm_kernel,ktilde,holds\n");
            let mut summary = R {
                samples: cfg.samples.cases,
                ktilde: f64::NAN,
                max_ratio: 0.0,
                violations: 0,
            };
            for i in 0..cfg.samples.cases {
                let u = random_bumps(&s.grid, &mut r)?;
                let c = compare_spaces(&u, &s.ia)?;
                summary.ktilde = c.ktilde;
                summary.max_ratio = summary.max_ratio.max(c.seminorm_s / (c.ktilde * c.seminorm_k));
                summary.violations += usize::from(!c.holds);
                let _ = writeln!(
                    csv,
                    "{i},{},{},{},{}",
                    fmt_f(c.seminorm_s),
                    fmt_f(c.seminorm_k),
                    fmt_f(c.ktilde),
                    c.holds
                );
            }
            write_file(out, "samples.csv", &csv)?;
            let pass = summary.violations == 0;
            finish(out, name, seed, pass, summary)
        }
        Command::EmbeddingScan => {
            #[derive(Serialize)]
            struct R {
                exponent: String,
                samples: usize,
                zero_inputs: usize,
                min_ratio: f64,
                max_ratio: f64,
            }
            let s = setup(cfg)?;
            let q = cfg.embedding.r.scalar_exponent(&s.grid)?;
            let mut r = rng(seed);
            let mut csv = String::from("sample,lebesgue,sobolev,ratio\n");
            let mut summary = R {
                exponent: q.label().to_string(),
                samples: cfg.samples.embedding,
                zero_inputs: 0,
                min_ratio: f64::INFINITY,
                max_ratio: 0.0,
            };
            for i in 0..cfg.samples.embedding {
                let u = random_bumps(&s.grid, &mut r)?;
                match embedding_ratio(&u, &q, &s.ia)? {
                    nlsob::sobolev::EmbeddingRatio::ZeroInput => {
                        summary.zero_inputs += 1;
                        let _ = writeln!(csv, "{i},,,");
                    }
                    nlsob::sobolev::EmbeddingRatio::Ratio {
                        lebesgue,
                        sobolev,
                        ratio,
                    } => {
                        summary.min_ratio = summary.min_ratio.min(ratio);
                        summary.max_ratio = summary.max_ratio.max(ratio);
                        let _ = writeln!(csv, "{i},{},{},{}", fmt_f(lebesgue), fmt_f(sobolev), fmt_f(ratio));
                    }
                }
            }
            write_file(out, "samples.csv", &csv)?;
            let pass = summary.max_ratio.is_finite();
            finish(out, name, seed, pass, summary)
        }
        Command::OperatorProbe => {
            #[derive(Serialize)]
            struct R {
                cases: usize,
                identity_worst: f64,
                monotonicity_min: f64,
                monotonicity_violations: usize,
                coercivity_violations: usize,
                boundedness_violations: usize,
                coercivity_first: Option<CoercivityReport>,
                boundedness_first: Option<BoundednessReport>,
            }
            let s = setup(cfg)?;
            let mut r = rng(seed);
            let cases = cfg.samples.cases;
            let mut summary = R {
                cases,
                identity_worst: 0.0,
                monotonicity_min: f64::INFINITY,
                monotonicity_violations: 0,
                coercivity_violations: 0,
                boundedness_violations: 0,
                coercivity_first: None,
                boundedness_first: None,
            };
            for _ in 0..cases {
                let u = random_bumps(&s.grid, &mut r)?;
                let v = random_bumps(&s.grid, &mut r)?;
                let pairing = apply_weak(&s.ia, &u, &u)?;
                let modular = gagliardo_modular(&u, &s.ia)?;
                let rel = (pairing - modular).abs() / modular.abs().max(f64::MIN_POSITIVE);
                summary.identity_worst = summary.identity_worst.max(rel);
                let m = monotonicity_probe(&s.ia, &u, &v)?;
                if !m.equal_inputs {
                    summary.monotonicity_min = summary.monotonicity_min.min(m.value);
                }
                summary.monotonicity_violations += usize::from(!m.pass());
                let c = coercivity_probe(&s.ia, &u)?;
                summary.coercivity_violations += usize::from(!c.pass());
                let b = boundedness_probe(&s.ia, &u, &v)?;
                summary.boundedness_violations += usize::from(!b.pass);
                summary.coercivity_first.get_or_insert(c);
                summary.boundedness_first.get_or_insert(b);
            }
            let pass = cases > 0
                && summary.identity_worst <= 1e-12
                && summary.monotonicity_violations == 0
                && summary.coercivity_violations == 0
                && summary.boundedness_violations == 0;
            finish(out, name, seed, pass, summary)
        }
        Command::Solve => {
            #[derive(Serialize)]
            struct R {
                tolerance: f64,
                solve: SolveReport,
            }
            let s = setup(cfg)?;
            let (f, starts) = cfg.dirichlet_load(&s.grid)?;
            let opts = DirichletOptions {
                tol: cfg.tolerances.dirichlet,
                starts,
                seed,
                ..DirichletOptions::default()
            };
            let solve = solve_dirichlet(&s.ia, &f, &opts)?;
            write_file(out, "solution.csv", &solve.solution.to_csv())?;
            let pass = solve.residual <= opts.tol;
            finish(
                out,
                name,
                seed,
                pass,
                R {
                    tolerance: opts.tol,
                    solve,
                },
            )
        }
        Command::SolveKirchhoff => {
            #[derive(Serialize)]
            struct R {
                tolerance: f64,
                hypotheses: KirchhoffValidation,
                solve: KirchhoffReport,
            }
            let s = setup(cfg)?;
            let data = cfg.kirchhoff_data(&s.grid)?;
            let hypotheses = validate_kirchhoff(&data, &s.ia)?;
            let geometry = mountain_pass_geometry(&data, &s.ia, seed)?;
            let opts = KirchhoffOptions {
                tol: cfg.tolerances.kirchhoff,
                ..KirchhoffOptions::default()
            };
            let solve = solve_kirchhoff(&data, &s.ia, &geometry, &opts)?;
            write_file(out, "solution.csv", &solve.solution.to_csv())?;
            let pass = solve.residual < opts.tol && solve.nontrivial;
            finish(
                out,
                name,
                seed,
                pass,
                R {
                    tolerance: opts.tol,
                    hypotheses,
                    solve,
                },
            )
        }
        Command::Properties => {
            let s = setup(cfg)?;
            let report: PropertiesReport = run_properties(&s.ia, seed, cfg.samples.cases)?;
            let pass = report.pass;
            finish(out, name, seed, pass, report)
        }
        Command::DefaultConfig => unreachable!("handled before configuration is loaded"),
    }
}
