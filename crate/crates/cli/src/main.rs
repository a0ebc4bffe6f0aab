use std::fs;
use std::io::Read as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hadamat::classify;
use hadamat::filtered::{invert_filtered, invert_sfm};
use hadamat::hadamard::{apply, ScalarFn};
use hadamat::linalg::lu_invert;
use hadamat::random::{bipotential, increasing_cbf, potential, sfm_gum, trial_rng};
use hadamat::structure::{generate_gum, structure_report};
use hadamat::tau::{is_class_t, tau_bisection, DEFAULT_T_MAX};
use hadamat::{Matrix, Tolerance};
use hadamat_cli::render::{self, to_pretty};
use hadamat_cli::{
    parse_matrix, parse_rep, render_matrix, render_rep, run_suite, Format, HarnessConfig, Rep, Theorem,
};

#[derive(Parser)]
#[command(name = "hadamat", version, about = "Inverse M-matrices, Hadamard functions and filtered inversion")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Input file; stdin when absent.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output format; matrix output defaults to the input's format.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Absolute slack of every sign test.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FnName {
    Identity,
    Pow,
    X2cos,
    Expm1,
    Cubic,
    Step,
}

#[derive(Clone, Copy, ValueEnum)]
enum TauMode {
    Bisection,
    ClassT,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Potential,
    Bipotential,
    Gum,
    #[value(alias = "increasing_cbf")]
    IncreasingCbf,
    Sfm,
}

#[derive(Subcommand)]
enum Cmd {
    /// Class verdicts with certificates, plus GUM/NBF structure.
    Classify {
        #[command(flatten)]
        common: Common,
    },
    /// τ(U), the first t at which I + tU leaves the bi-potentials.
    Tau {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = DEFAULT_T_MAX)]
        t_max: f64,
        #[arg(long, value_enum, default_value = "bisection")]
        method: TauMode,
    },
    /// Entrywise f(U).
    Hadamard {
        #[command(flatten)]
        common: Common,
        #[arg(long = "fn", value_enum)]
        func: FnName,
        /// Exponent for `pow`.
        #[arg(long)]
        alpha: Option<f64>,
        /// Jumps for `step` as `v:h,v:h`; f(x) adds h once x > v.
        #[arg(long)]
        jumps: Option<String>,
        /// Constant added to f.
        #[arg(long)]
        shift: Option<f64>,
    },
    /// Dense inverse by LU.
    Invert {
        #[command(flatten)]
        common: Common,
    },
    /// Backward recursion for (I + tU)^-1 on a representation file.
    InvertFiltered {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t: f64,
    },
    /// Seeded random instance.
    Generate {
        #[arg(value_enum)]
        kind: Kind,
        #[arg(long)]
        n: usize,
        #[arg(long, env = "HADAMAT_SEED", default_value_t = 0)]
        seed: u64,
        /// Only two-way splits in the generated filtration (sfm only).
        #[arg(long)]
        dyadic: bool,
        #[arg(long, value_enum, default_value = "plain")]
        format: Format,
    },
    /// Run a randomized theorem suite.
    Verify {
        theorem: String,
        #[arg(long, env = "HADAMAT_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        alpha: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        t_grid: Option<Vec<f64>>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
    },
}

/// Exit code and message of a failed command.
struct Failure(u8, String);

fn usage(msg: impl ToString) -> Failure {
    Failure(2, msg.to_string())
}

fn tolerance(tol: Option<f64>) -> Result<Tolerance, Failure> {
    match tol {
        None => Ok(Tolerance::default()),
        Some(t) => Tolerance::new(t, Tolerance::default().rel_eps)
            .ok_or_else(|| usage(format!("invalid tolerance {t}"))),
    }
}

fn read_input(path: &Option<PathBuf>) -> Result<String, Failure> {
    match path {
        Some(p) => fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| usage(format!("stdin: {e}")))?;
            Ok(s)
        }
    }
}

fn sniff(text: &str) -> Format {
    if text.trim_start().starts_with('{') {
        Format::Json
    } else {
        Format::Plain
    }
}

fn read_matrix(common: &Common) -> Result<(Matrix, Format), Failure> {
    let text = read_input(&common.input)?;
    let m = parse_matrix(&text).map_err(usage)?;
    Ok((m, common.format.unwrap_or(sniff(&text))))
}

fn scalar_fn(func: FnName, alpha: Option<f64>, jumps: Option<&str>, shift: Option<f64>) -> Result<ScalarFn, Failure> {
    let f = match func {
        FnName::Identity => ScalarFn::Identity,
        FnName::Pow => {
            let a = alpha.ok_or_else(|| usage("--fn pow needs --alpha"))?;
            if !(a > 0.0 && a.is_finite()) {
                return Err(usage(format!("alpha must be positive, got {a}")));
            }
            ScalarFn::Power(a)
        }
        FnName::X2cos => ScalarFn::SquareMinusCos,
        FnName::Expm1 => ScalarFn::ExpMinusOne,
        FnName::Cubic => ScalarFn::Cubic,
        FnName::Step => {
            let spec = jumps.ok_or_else(|| usage("--fn step needs --jumps v:h,..."))?;
            let parsed = spec
                .split(',')
                .map(|pair| {
                    let (v, h) = pair.split_once(':').ok_or_else(|| usage(format!("bad jump {pair:?}")))?;
                    let v: f64 = v.trim().parse().map_err(|_| usage(format!("bad jump {pair:?}")))?;
                    let h: f64 = h.trim().parse().map_err(|_| usage(format!("bad jump {pair:?}")))?;
                    if h < 0.0 {
                        return Err(usage("jump heights must be nonnegative"));
                    }
                    Ok((v, h))
                })
                .collect::<Result<Vec<_>, _>>()?;
            ScalarFn::Step(parsed)
        }
    };
    Ok(match shift {
        Some(a) => f.shifted(a),
        None => f,
    })
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.cmd {
        Cmd::Classify { common } => {
            let tol = tolerance(common.tol)?;
            let (u, _) = read_matrix(&common)?;
            let (c, s) = (classify(&u, &tol), structure_report(&u, &tol));
            Ok(match common.format {
                Some(Format::Json) => to_pretty(&render::classify_json(u.n(), &c, &s)),
                _ => render::classify_text(u.n(), &c, &s),
            })
        }
        Cmd::Tau { common, t_max, method } => {
            let tol = tolerance(common.tol)?;
            if !(t_max > 0.0 && t_max.is_finite()) {
                return Err(usage("--t-max must be positive"));
            }
            let (u, _) = read_matrix(&common)?;
            if !u.is_nonnegative(&tol) {
                return Err(Failure(1, "tau needs a nonnegative matrix".into()));
            }
            let json = common.format == Some(Format::Json);
            Ok(match method {
                TauMode::Bisection => {
                    let r = tau_bisection(&u, t_max, &tol);
                    if json { to_pretty(&render::tau_json(&r)) } else { render::tau_text(&r) }
                }
                TauMode::ClassT => {
                    let r = is_class_t(&u, t_max, 64, &tol);
                    if json { to_pretty(&render::class_t_json(&r)) } else { render::class_t_text(&r) }
                }
            })
        }
        Cmd::Hadamard { common, func, alpha, jumps, shift } => {
            let f = scalar_fn(func, alpha, jumps.as_deref(), shift)?;
            let (u, format) = read_matrix(&common)?;
            let fu = apply(&f, &u).map_err(|e| Failure(1, e.to_string()))?;
            Ok(render_matrix(&fu, format))
        }
        Cmd::Invert { common } => {
            let (u, format) = read_matrix(&common)?;
            let inv = lu_invert(&u).map_err(|e| Failure(1, e.to_string()))?;
            Ok(render_matrix(&inv, format))
        }
        Cmd::InvertFiltered { common, t } => {
            let tol = tolerance(common.tol)?;
            if !(t >= 0.0 && t.is_finite()) {
                return Err(usage("--t must be finite and >= 0"));
            }
            let rep = parse_rep(&read_input(&common.input)?).map_err(usage)?;
            let tr = match &rep {
                Rep::Sfm(r) => invert_sfm(r, t, &tol),
                Rep::Filtered(r) => invert_filtered(r, t, &tol),
            };
            Ok(match common.format {
                Some(Format::Json) => to_pretty(&render::trace_json(&tr)),
                _ => render::trace_text(&tr, Format::Plain),
            })
        }
        Cmd::Generate { kind, n, seed, dyadic, format } => {
            if n == 0 {
                return Err(usage("--n must be at least 1"));
            }
            let mut rng = trial_rng(seed, 0);
            let m = match kind {
                Kind::Potential => potential(n, &mut rng),
                Kind::Bipotential => bipotential(n, &mut rng),
                Kind::Gum => generate_gum(n, seed),
                Kind::IncreasingCbf => increasing_cbf(n, &mut rng),
                Kind::Sfm => return Ok(render_rep(&Rep::Sfm(sfm_gum(n, dyadic, &mut rng)))),
            };
            Ok(render_matrix(&m, format))
        }
        Cmd::Verify { theorem, seed, trials, n_max, alpha, t_grid, t_max, tol } => {
            let theorem: Theorem = theorem.parse().map_err(usage)?;
            let mut cfg = HarnessConfig::for_theorem(theorem, seed);
            cfg.trials = trials.unwrap_or(cfg.trials);
            cfg.n_max = n_max.unwrap_or(cfg.n_max);
            cfg.alpha_list = alpha.unwrap_or(cfg.alpha_list);
            cfg.t_grid = t_grid.unwrap_or(cfg.t_grid);
            cfg.t_max = t_max.unwrap_or(cfg.t_max);
            cfg.tol = tolerance(tol)?;
            cfg.validate().map_err(usage)?;
            let report = run_suite(theorem, &cfg);
            if report.passed() {
                Ok(report.render())
            } else {
                print!("{}", report.render());
                Err(Failure(1, format!("{} violation(s)", report.violations)))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
