use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::bounds::{check_zero_in_interval, k_constant, psi_curve, t_star, Criterion, KRule};
use crate::error::{Error, Result};
use crate::io::{fmt_full, fmt_short, write_table};
use crate::relativistic::{check_lower_upper, pendulum_residual, read_solution_csv, Forcing, PeriodicSolution};
use crate::solvability::{find_multiple_solutions_with, sweep_interval_unprojected, SeedBank};
use crate::solver::{solve_periodic, SolverConfig};
use crate::timescale::{mean, GridFunction};

use super::config::{Loaded, RunConfig};
use super::{
    Cli, Command, GlobalArgs, SeedChoice, EXIT_CONDITION_FAILS, EXIT_INAPPLICABLE, EXIT_NOT_CONVERGED,
    EXIT_OK,
};

/// Default residual threshold of `verify --role solution`, times `max(1, b)`.
const VERIFY_TOL: f64 = 1e-6;

pub(super) fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let pool = {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = cli.global.jobs {
            if n == 0 {
                return Err(Error::InvalidParameter("--jobs must be >= 1".into()));
            }
            builder = builder.num_threads(n);
        }
        builder
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
    };
    if let Some(tol) = cli.global.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidParameter(format!("--tol {tol} must be positive")));
        }
    }
    let emit = Emit::new(cli.global.emit.clone())?;
    let mut buffer: Vec<u8> = Vec::new();
    let result = pool.install(|| run_command(&cli.command, &cli.global, &emit, &mut buffer));
    out.write_all(&buffer)?;
    result
}

struct Emit {
    dir: Option<PathBuf>,
}

impl Emit {
    fn new(dir: Option<PathBuf>) -> Result<Self> {
        if let Some(d) = &dir {
            fs::create_dir_all(d)?;
        }
        Ok(Self { dir })
    }

    fn file(&self, name: &str, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<()> {
        if let Some(dir) = &self.dir {
            let mut w = BufWriter::new(fs::File::create(dir.join(name))?);
            body(&mut w)?;
            w.flush()?;
        }
        Ok(())
    }

    /// Prints the report and stores it as `<name>.txt`.
    fn report(&self, out: &mut dyn Write, name: &str, text: &str) -> Result<()> {
        out.write_all(text.as_bytes())?;
        self.file(&format!("{name}.txt"), |w| w.write_all(text.as_bytes()))
    }
}

fn load(path: &Path) -> Result<Loaded> {
    RunConfig::load(path)
}

fn solver_cfg(loaded: &Loaded, global: &GlobalArgs) -> SolverConfig {
    let mut cfg = loaded.solver;
    if let Some(tol) = global.tol {
        cfg.residual_tol = tol;
    }
    cfg
}

fn run_command(cmd: &Command, global: &GlobalArgs, emit: &Emit, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Bounds { config, k_method, samples } => {
            let loaded = load(&config.config)?;
            let params = loaded.params()?;
            let k = k_constant(&loaded.grid, (*k_method).into())?;
            let report = check_zero_in_interval(params, &k)?;
            let mut text = format!("k_method = \"{}\"\nk = {}\n", k.method.as_str(), fmt_short(k.value));
            text.push_str(&report.summary());
            if report.criterion != Criterion::Inapplicable {
                let curve = psi_curve(report.ct, report.ck, *samples)?;
                let _ = writeln!(text, "psi_curve_max = {}", fmt_short(curve.max()));
                emit.file("psi_curve.csv", |w| curve.write_csv(w))?;
            }
            emit.report(out, "bounds", &text)?;
            Ok(match report.criterion {
                Criterion::Inapplicable => EXIT_INAPPLICABLE,
                _ if report.condition_holds => EXIT_OK,
                _ => EXIT_CONDITION_FAILS,
            })
        }

        Command::Tstar { k_rule, c } => {
            let rule: KRule = (*k_rule).into();
            let t = t_star(rule, *c, global.tol.unwrap_or(1e-6))?;
            let text = format!(
                "k_rule = \"{}\"\nc = {}\nT_star = {}\ncT_star = {}\n",
                rule.as_str(),
                fmt_short(*c),
                fmt_short(t),
                fmt_short(c * t)
            );
            emit.file("tstar.csv", |w| {
                write_table(
                    w,
                    &["k_rule", "c", "T_star", "cT_star"],
                    [vec![rule.as_str().to_string(), fmt_full(*c), fmt_full(t), fmt_full(c * t)]],
                )
            })?;
            emit.report(out, "tstar", &text)?;
            Ok(EXIT_OK)
        }

        Command::Interval { config, r_samples } => {
            let loaded = load(&config.config)?;
            let params = loaded.params()?;
            let cfg = solver_cfg(&loaded, global);
            let estimate = match sweep_interval_unprojected(params, &loaded.p0, *r_samples, &cfg) {
                Ok(est) => est,
                Err(Error::AllDiverged { table }) => {
                    let text = format!("converged_rows = 0\nr_samples = {}\n", table.len());
                    emit.report(out, "interval", &text)?;
                    return Ok(EXIT_NOT_CONVERGED);
                }
                Err(e) => return Err(e),
            };
            let mut text = estimate.summary();
            let _ = writeln!(text, "mean_p0 = {}", fmt_short(mean(&loaded.p0)));
            emit.file("sweep.csv", |w| estimate.write_sweep_csv(w))?;
            emit.report(out, "interval", &text)?;
            Ok(EXIT_OK)
        }

        Command::Solve { config, s, seed } => {
            let loaded = load(&config.config)?;
            let params = loaded.params()?;
            let cfg = solver_cfg(&loaded, global);
            let s = s.unwrap_or(loaded.s);
            let s_eff = s + mean(&loaded.p0);
            let seed_fn = initial_guess(&loaded, seed, s_eff, params.b)?;
            let (solution, converged) = match solve_periodic(s_eff, params, &loaded.p0, &seed_fn, &cfg) {
                Ok(sol) => (sol, true),
                Err(Error::NotConverged { best, .. }) => (*best, false),
                Err(e) => return Err(e),
            };
            let text = solution_report(&solution, s, converged);
            emit.file("solution.csv", |w| solution.write_csv(w))?;
            emit.report(out, "solve", &text)?;
            Ok(if converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
        }

        Command::Verify { config, solution, role, s } => {
            let loaded = load(&config.config)?;
            let params = loaded.params()?;
            let file = fs::File::open(solution)
                .map_err(|e| Error::Config(format!("{}: {e}", solution.display())))?;
            let x = read_solution_csv(&loaded.grid, file)?;
            let s = s.unwrap_or(loaded.s);
            let forcing = Forcing::new(loaded.p0.clone(), s + mean(&loaded.p0));
            let mut text = format!("role = \"{}\"\ns = {}\n", role_name(*role), fmt_short(s));
            let ok = match role.bound() {
                None => {
                    let tol = global.tol.unwrap_or(VERIFY_TOL * params.b.max(1.0));
                    let residual = pendulum_residual(&x, params, &forcing)?;
                    let sol = PeriodicSolution::certify(x, params, forcing.p0(), forcing.s)?;
                    let ok = residual.norm_inf() <= tol;
                    let _ = write!(
                        text,
                        "residual_norm = {}\ntol = {}\ns_of_x = {}\nmax_slope = {}\nis_solution = {ok}\n",
                        fmt_short(residual.norm_inf()),
                        fmt_short(tol),
                        fmt_short(sol.s_of_x),
                        fmt_short(sol.xdelta.norm_inf())
                    );
                    ok
                }
                Some(bound) => {
                    let rep = check_lower_upper(&x, bound, params, &forcing)?;
                    let _ = write!(
                        text,
                        "margin = {}\nis_valid = {}\nis_strict = {}\n",
                        fmt_short(rep.margin),
                        rep.is_valid,
                        rep.is_strict
                    );
                    rep.is_valid
                }
            };
            emit.report(out, "verify", &text)?;
            Ok(if ok { EXIT_OK } else { EXIT_CONDITION_FAILS })
        }

        Command::Kconst { config, method } => {
            let loaded = load(&config.config)?;
            let k = k_constant(&loaded.grid, (*method).into())?;
            let period = loaded.grid.period();
            let text = format!(
                "method = \"{}\"\nk = {}\nT = {}\nk_over_T = {}\n",
                k.method.as_str(),
                fmt_short(k.value),
                fmt_short(period),
                fmt_short(k.value / period)
            );
            emit.file("kconst.csv", |w| {
                write_table(
                    w,
                    &["method", "k", "T"],
                    [vec![k.method.as_str().to_string(), fmt_full(k.value), fmt_full(period)]],
                )
            })?;
            emit.report(out, "kconst", &text)?;
            Ok(EXIT_OK)
        }

        Command::Multi { config, s, random } => {
            let loaded = load(&config.config)?;
            let params = loaded.params()?;
            let cfg = solver_cfg(&loaded, global);
            let s = s.unwrap_or(loaded.s);
            let mut bank = SeedBank::new().with_constants(&loaded.grid, 8);
            if let Some(seed) = loaded.seed {
                bank = bank.with_random(&loaded.grid, *random, seed);
            }
            let report = find_multiple_solutions_with(params, &loaded.p0, s + mean(&loaded.p0), &bank, &cfg)?;
            let reps = report.representatives();
            let mut text = format!(
                "s = {}\nseeds = {}\nconverged = {}\ndistinct_count = {}\n",
                fmt_short(s),
                bank.len(),
                report.solutions.len(),
                report.distinct_count
            );
            if let Some(sep) = report.min_separation() {
                let _ = writeln!(text, "min_separation = {}", fmt_short(sep));
            }
            for (i, sol) in reps.iter().enumerate() {
                let _ = writeln!(
                    text,
                    "class_{i} = {{ x0 = {}, residual_norm = {} }}",
                    fmt_short(sol.x.values()[0]),
                    fmt_short(sol.residual_norm)
                );
                emit.file(&format!("solution_{i}.csv"), |w| sol.write_csv(w))?;
            }
            emit.report(out, "multi", &text)?;
            Ok(if report.distinct_count >= 2 { EXIT_OK } else { EXIT_CONDITION_FAILS })
        }
    }
}

fn role_name(role: super::RoleArg) -> &'static str {
    match role {
        super::RoleArg::Solution => "solution",
        super::RoleArg::Lower => "lower",
        super::RoleArg::Upper => "upper",
    }
}

/// The requested seed, or the constant `arcsin(s/b)` (clamped).
fn initial_guess(loaded: &Loaded, choice: &SeedChoice, s: f64, b: f64) -> Result<GridFunction> {
    if let Some(v) = choice.seed_value {
        return Ok(GridFunction::constant(&loaded.grid, v));
    }
    if let Some(path) = &choice.seed_csv {
        let file = fs::File::open(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        return read_solution_csv(&loaded.grid, file);
    }
    Ok(GridFunction::constant(&loaded.grid, (s / b).clamp(-1.0, 1.0).asin()))
}

fn solution_report(sol: &PeriodicSolution, s: f64, converged: bool) -> String {
    format!(
        "converged = {converged}\ns = {}\ns_of_x = {}\nresidual_norm = {}\nmax_slope = {}\nx_min = {}\nx_max = {}\n",
        fmt_short(s),
        fmt_short(sol.s_of_x),
        fmt_short(sol.residual_norm),
        fmt_short(sol.xdelta.norm_inf()),
        fmt_short(sol.x.min()),
        fmt_short(sol.x.max())
    )
}
