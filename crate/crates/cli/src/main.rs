//! `bshq`: command-line front end for the quantization engine.
//!
//! Exit codes: 0 success, 1 verification failure (or partially failed
//! spectrum), 2 usage error, 3 I/O error.

mod expr;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::Vector3;
use serde::Serialize;
use serde_json::json;

use bsh_core::grouprep::{group_rep, so3_exp, verify_homomorphism};
use bsh_core::lattice::{build_lattice, AxisBounds, BohrSommerfeldLattice, QuantizationConfig};
use bsh_core::opalg::{BandedOperator, DenseMatrix};
use bsh_core::oscillator::{
    build_b, build_q_h, build_q_p, build_q_q, verify_oscillator, OscillatorBasis,
};
use bsh_core::quantize::{quantize_expr, verify_shift_commutation};
use bsh_core::spectrum::{bs_levels, problems, SpectrumConfig};
use bsh_core::spin::{build_spin_matrices_two_s, verify_so3};

#[derive(Parser)]
#[command(
    name = "bshq",
    version,
    about = "Bohr-Sommerfeld-Heisenberg quantization: lattice operators, spin representations, semiclassical spectra"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the 1-D harmonic oscillator operators b, b†, Q_H, Q_p, Q_q.
    Oscillator {
        /// Highest basis label N.
        #[arg(long = "n-max")]
        n_max: i64,
        /// First basis label (0 or 1).
        #[arg(long, default_value_t = 1)]
        ground: i64,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the spin-s representation matrices.
    Spin {
        /// Spin s (non-negative integer unless --allow-half-integer).
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        /// Build the non-standard half-integer extension.
        #[arg(long)]
        allow_half_integer: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate the integrated representation U(g) for one rotation.
    Rep {
        #[arg(long)]
        s: f64,
        /// Rotation axis as `x,y,z` (normalized internally).
        #[arg(long)]
        axis: String,
        /// Rotation angle in radians.
        #[arg(long)]
        angle: f64,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve Bohr-Sommerfeld levels A(E) = (m + mu/2) hbar.
    Spectrum {
        #[arg(long, value_enum)]
        problem: ProblemArg,
        /// Potential strength (coulomb: attractive -k/q with k > 0;
        /// relativistic-kepler: k/r with k < 0).
        #[arg(long)]
        k: Option<f64>,
        /// Angular momentum parameter.
        #[arg(long)]
        ell: Option<f64>,
        /// Maslov offset mu in A = (m + mu/2) hbar.
        #[arg(long, default_value_t = 0)]
        mu: i64,
        /// Rest mass for the relativistic problem.
        #[arg(long)]
        mass: Option<f64>,
        #[arg(long = "m-from")]
        m_from: i64,
        #[arg(long = "m-to")]
        m_to: i64,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        /// Override the lower end of the energy bracket.
        #[arg(long = "e-lo")]
        e_lo: Option<f64>,
        /// Override the upper end of the energy bracket.
        #[arg(long = "e-hi")]
        e_hi: Option<f64>,
        /// Override the turning-point search interval.
        #[arg(long = "q-min")]
        q_min: Option<f64>,
        #[arg(long = "q-max")]
        q_max: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Quantize an observable expression over a lattice window.
    Quantize {
        /// Degrees of freedom.
        #[arg(long)]
        n: usize,
        /// Windows per axis as `lo:hi[,lo:hi...]`.
        #[arg(long)]
        window: String,
        /// Observable expression, e.g. "A1*cos(phi1) + 0.5*exp(-i*phi2)".
        #[arg(long)]
        expr: String,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a verification suite and emit a JSON report.
    Verify {
        #[arg(long, value_enum)]
        system: SystemArg,
        /// Spin (spin/rep systems).
        #[arg(long)]
        s: Option<f64>,
        /// Oscillator basis top (oscillator system).
        #[arg(long = "n-max", default_value_t = 100)]
        n_max: i64,
        #[arg(long, default_value_t = 1)]
        ground: i64,
        /// Degrees of freedom (shift system).
        #[arg(long)]
        n: Option<usize>,
        /// Windows per axis as `lo:hi[,lo:hi...]` (shift system).
        #[arg(long)]
        window: Option<String>,
        /// Sample count (rep system).
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// RNG seed; required for sampled verifications.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        /// Report path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemArg {
    Oscillator,
    Coulomb,
    RelativisticKepler,
}

#[derive(Clone, Copy, ValueEnum)]
enum SystemArg {
    Oscillator,
    Spin,
    Rep,
    Shift,
}

struct CliError {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> CliError {
    CliError {
        code: 2,
        message: message.into(),
    }
}

fn io_error(path: &Path, err: std::io::Error) -> CliError {
    CliError {
        code: 3,
        message: format!("cannot write {}: {err}", path.display()),
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    };
    std::process::exit(code);
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    match cli.cmd {
        Cmd::Oscillator {
            n_max,
            ground,
            hbar,
            out,
        } => run_oscillator(n_max, ground, hbar, &out),
        Cmd::Spin {
            s,
            hbar,
            allow_half_integer,
            out,
        } => run_spin(s, hbar, allow_half_integer, &out),
        Cmd::Rep {
            s,
            axis,
            angle,
            hbar,
            out,
        } => run_rep(s, &axis, angle, hbar, &out),
        Cmd::Spectrum {
            problem,
            k,
            ell,
            mu,
            mass,
            m_from,
            m_to,
            hbar,
            e_lo,
            e_hi,
            q_min,
            q_max,
            out,
        } => run_spectrum(SpectrumArgs {
            problem,
            k,
            ell,
            mu,
            mass,
            m_from,
            m_to,
            hbar,
            e_lo,
            e_hi,
            q_min,
            q_max,
            out,
        }),
        Cmd::Quantize {
            n,
            window,
            expr,
            hbar,
            out,
        } => run_quantize(n, &window, &expr, hbar, &out),
        Cmd::Verify {
            system,
            s,
            n_max,
            ground,
            n,
            window,
            samples,
            seed,
            tol,
            hbar,
            out,
        } => run_verify(VerifyArgs {
            system,
            s,
            n_max,
            ground,
            n,
            window,
            samples,
            seed,
            tol,
            hbar,
            out,
        }),
    }
}

fn check_hbar(hbar: f64) -> Result<(), CliError> {
    if !(hbar > 0.0) {
        return Err(usage(format!("hbar must be positive, got {hbar}")));
    }
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| io_error(path, e))
}

/// Matrix payloads are written compact; verification reports go through
/// `emit_report` and stay human-readable.
fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string(value).expect("serializable output");
    text.push('\n');
    write_text(path, &text)
}

fn run_oscillator(n_max: i64, ground: i64, hbar: f64, out: &Path) -> Result<i32, CliError> {
    check_hbar(hbar)?;
    if ground != 0 && ground != 1 {
        return Err(usage("--ground must be 0 or 1"));
    }
    if n_max < ground {
        return Err(usage("--n-max must be at least the ground index"));
    }
    let basis = OscillatorBasis::new(ground, n_max, QuantizationConfig::with_hbar(hbar))
        .map_err(|e| usage(e.to_string()))?;
    let (b, bdag) = build_b(&basis);
    let payload = json!({
        "hbar": hbar,
        "ground": ground,
        "n_max": n_max,
        "Qp": build_q_p(&basis).to_dense(),
        "Qq": build_q_q(&basis).to_dense(),
        "QH": build_q_h(&basis).to_dense(),
        "b": b.to_dense(),
        "bdagger": bdag.to_dense(),
    });
    write_json(out, &payload)?;
    Ok(0)
}

/// Gate a command-line spin value: integral unless the escape hatch is set.
fn resolve_spin(s: f64, allow_half_integer: bool) -> Result<i64, CliError> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(usage(format!("spin must be non-negative, got {s}")));
    }
    let two_s = 2.0 * s;
    if (two_s - two_s.round()).abs() > 1e-9 {
        return Err(usage(format!("spin s = {s} must be a multiple of 1/2")));
    }
    let two_s = two_s.round() as i64;
    if two_s % 2 != 0 && !allow_half_integer {
        return Err(usage(format!(
            "spin s = {s} is not an integer: the construction assumes s = n/2 is an integer \
             (pass --allow-half-integer to build the non-standard extension)"
        )));
    }
    Ok(two_s)
}

fn run_spin(s: f64, hbar: f64, allow_half_integer: bool, out: &Path) -> Result<i32, CliError> {
    check_hbar(hbar)?;
    let two_s = resolve_spin(s, allow_half_integer)?;
    let rep = build_spin_matrices_two_s(two_s, hbar);
    write_json(out, &rep)?;
    Ok(0)
}

#[derive(Serialize)]
struct RepOutput {
    s: f64,
    hbar: f64,
    axis: [f64; 3],
    angle: f64,
    #[serde(rename = "U")]
    u: DenseMatrix,
}

fn run_rep(s: f64, axis: &str, angle: f64, hbar: f64, out: &Path) -> Result<i32, CliError> {
    check_hbar(hbar)?;
    let two_s = resolve_spin(s, false)?;
    let parts: Vec<f64> = axis
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| usage(format!("--axis must be `x,y,z`, got `{axis}`")))?;
    if parts.len() != 3 {
        return Err(usage(format!(
            "--axis must have three components, got `{axis}`"
        )));
    }
    let v = Vector3::new(parts[0], parts[1], parts[2]);
    if v.norm() < 1e-12 {
        return Err(usage("--axis must be a nonzero vector"));
    }
    let rep = build_spin_matrices_two_s(two_s, hbar);
    let g = so3_exp(&(v.normalize() * angle));
    let u = group_rep(&rep, &g).map_err(|e| usage(e.to_string()))?;
    let payload = RepOutput {
        s,
        hbar,
        axis: [parts[0], parts[1], parts[2]],
        angle,
        u,
    };
    write_json(out, &payload)?;
    Ok(0)
}

struct SpectrumArgs {
    problem: ProblemArg,
    k: Option<f64>,
    ell: Option<f64>,
    mu: i64,
    mass: Option<f64>,
    m_from: i64,
    m_to: i64,
    hbar: f64,
    e_lo: Option<f64>,
    e_hi: Option<f64>,
    q_min: Option<f64>,
    q_max: Option<f64>,
    out: PathBuf,
}

fn run_spectrum(args: SpectrumArgs) -> Result<i32, CliError> {
    check_hbar(args.hbar)?;
    if args.m_from > args.m_to {
        return Err(usage("--m-from must not exceed --m-to"));
    }
    let hbar = args.hbar;
    let t_lo = ((args.m_from as f64 + args.mu as f64 / 2.0) * hbar).max(0.1 * hbar);
    let t_hi = (args.m_to as f64 + args.mu as f64 / 2.0) * hbar;

    let (prob, default_bracket) = match args.problem {
        ProblemArg::Oscillator => {
            let e_hi = 1.5 * (t_hi + 2.0 * hbar);
            let q_max = args.q_max.unwrap_or(1.5 * (2.0 * e_hi).sqrt() + 1.0);
            (problems::oscillator(q_max), (1e-9 * hbar, e_hi))
        }
        ProblemArg::Coulomb => {
            let k = args.k.unwrap_or(1.0);
            let ell = args.ell.unwrap_or(1.0);
            if k <= 0.0 || ell <= 0.0 {
                return Err(usage("coulomb needs k > 0 and ell > 0"));
            }
            let energy_at = |t: f64| -k * k / (2.0 * (t + ell) * (t + ell));
            let e_lo = energy_at(0.25 * t_lo);
            let e_hi = energy_at(1.5 * t_hi + hbar);
            let q_min = args.q_min.unwrap_or(ell * ell / (8.0 * k));
            let q_max = args.q_max.unwrap_or(1.5 * k / e_hi.abs());
            (problems::coulomb(k, ell, (q_min, q_max)), (e_lo, e_hi))
        }
        ProblemArg::RelativisticKepler => {
            let k = args.k.unwrap_or(-0.25);
            let ell = args.ell.unwrap_or(0.8);
            let mass = args.mass.unwrap_or(1.0);
            if k >= 0.0 || ell * ell <= k * k || mass <= 0.0 {
                return Err(usage(
                    "relativistic-kepler needs k < 0, ell^2 > k^2 and mass > 0",
                ));
            }
            let nu = |t: f64| t + (ell * ell - k * k).sqrt();
            let energy_at = |t: f64| {
                let v = nu(t);
                mass * v / (v * v + k * k).sqrt()
            };
            let e_lo = energy_at(0.25 * t_lo);
            let e_hi = energy_at(1.5 * t_hi + hbar);
            let q_min = args
                .q_min
                .unwrap_or(0.2 * (ell * ell - k * k) / (2.0 * mass * k.abs()));
            let q_max = args
                .q_max
                .unwrap_or(1.3 * 2.0 * e_hi * k.abs() / (mass * mass - e_hi * e_hi) + 10.0);
            (
                problems::relativistic_kepler(k, ell, mass, (q_min, q_max)),
                (e_lo, e_hi),
            )
        }
    };
    let bracket = (
        args.e_lo.unwrap_or(default_bracket.0),
        args.e_hi.unwrap_or(default_bracket.1),
    );
    if bracket.0 >= bracket.1 {
        return Err(usage("energy bracket is empty"));
    }
    let cfg = SpectrumConfig {
        hbar,
        maslov_mu: args.mu,
        ..Default::default()
    };
    let table = bs_levels(&prob, args.m_from, args.m_to, bracket, &cfg);
    write_text(&args.out, &table.to_csv())?;
    if table.failures.is_empty() {
        Ok(0)
    } else {
        for f in &table.failures {
            eprintln!("m = {}: {}", f.m, f.reason);
        }
        Ok(1)
    }
}

fn parse_windows(text: &str, n: usize) -> Result<Vec<AxisBounds>, CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != n {
        return Err(usage(format!(
            "--window has {} ranges but n = {n}",
            parts.len()
        )));
    }
    parts
        .iter()
        .map(|p| {
            let (lo, hi) = p
                .split_once(':')
                .ok_or_else(|| usage(format!("window range `{p}` is not `lo:hi`")))?;
            let lo: i64 = lo
                .trim()
                .parse()
                .map_err(|_| usage(format!("bad window bound `{lo}`")))?;
            let hi: i64 = hi
                .trim()
                .parse()
                .map_err(|_| usage(format!("bad window bound `{hi}`")))?;
            Ok(AxisBounds::window(lo, hi))
        })
        .collect()
}

fn build_windowed_lattice(
    n: usize,
    window: &str,
    hbar: f64,
) -> Result<std::sync::Arc<BohrSommerfeldLattice>, CliError> {
    if n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    let axes = parse_windows(window, n)?;
    let lat = build_lattice(n, axes, QuantizationConfig::with_hbar(hbar))
        .map_err(|e| usage(e.to_string()))?;
    Ok(std::sync::Arc::new(lat))
}

/// Bands keyed by their shift vector, e.g. `{"[-1]": [[re, im], ...]}`.
fn banded_to_json(op: &BandedOperator, n: usize, hbar: f64, normalized: &str) -> serde_json::Value {
    let lat = op.lattice();
    let mut bands: BTreeMap<String, Vec<[f64; 2]>> = BTreeMap::new();
    for (shift, coeffs) in op.bands() {
        let key = serde_json::to_string(&shift).expect("shift vector serializes");
        bands.insert(key, coeffs.iter().map(|z| [z.re, z.im]).collect());
    }
    let windows: Vec<[i64; 2]> = lat
        .axes()
        .iter()
        .map(|a| [a.window_lo, a.window_hi])
        .collect();
    json!({
        "n": n,
        "hbar": hbar,
        "windows": windows,
        "expr": normalized,
        "dim": lat.dimension(),
        "bands": bands,
    })
}

fn run_quantize(
    n: usize,
    window: &str,
    text: &str,
    hbar: f64,
    out: &Path,
) -> Result<i32, CliError> {
    check_hbar(hbar)?;
    let lat = build_windowed_lattice(n, window, hbar)?;
    let ast = expr::parse_expr(text, n).map_err(|e| usage(e.to_string()))?;
    let observable = expr::lower(&ast, n, text).map_err(|e| usage(e.to_string()))?;
    let op = quantize_expr(&lat, &observable).map_err(|e| usage(e.to_string()))?;
    let normalized = expr::pretty_print(&ast);
    write_json(out, &banded_to_json(&op, n, hbar, &normalized))?;
    Ok(0)
}

struct VerifyArgs {
    system: SystemArg,
    s: Option<f64>,
    n_max: i64,
    ground: i64,
    n: Option<usize>,
    window: Option<String>,
    samples: usize,
    seed: Option<u64>,
    tol: Option<f64>,
    hbar: f64,
    out: Option<PathBuf>,
}

fn emit_report(out: Option<&Path>, payload: &serde_json::Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(payload).expect("serializable report");
    text.push('\n');
    match out {
        Some(path) => write_text(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_verify(args: VerifyArgs) -> Result<i32, CliError> {
    check_hbar(args.hbar)?;
    let hbar = args.hbar;
    let seed = args.seed.unwrap_or(0);
    let (payload, pass) = match args.system {
        SystemArg::Oscillator => {
            if args.ground != 0 && args.ground != 1 {
                return Err(usage("--ground must be 0 or 1"));
            }
            let tol = args
                .tol
                .unwrap_or(1e-12 * (args.n_max as f64 * hbar).max(1.0));
            let basis =
                OscillatorBasis::new(args.ground, args.n_max, QuantizationConfig::with_hbar(hbar))
                    .map_err(|e| usage(e.to_string()))?;
            let report = verify_oscillator(&basis, tol);
            (
                json!({
                    "system": "oscillator",
                    "n_max": args.n_max,
                    "ground": args.ground,
                    "hbar": hbar,
                    "seed": seed,
                    "tol": tol,
                    "max_residual": report.max_residual,
                    "checked_rows": report.checked_rows,
                    "boundary_rows_excluded": report.boundary_rows_excluded,
                    "pass": report.pass,
                }),
                report.pass,
            )
        }
        SystemArg::Spin => {
            let s = args.s.ok_or_else(|| usage("--s is required for spin"))?;
            let two_s = resolve_spin(s, false)?;
            let tol = args.tol.unwrap_or(1e-10);
            let rep = build_spin_matrices_two_s(two_s, hbar);
            let report = verify_so3(&rep, tol);
            (
                json!({
                    "system": "spin",
                    "s": s,
                    "hbar": hbar,
                    "seed": seed,
                    "tol": tol,
                    "max_residual": report.max_residual,
                    "checked_rows": report.checked_rows,
                    "boundary_rows_excluded": report.boundary_rows_excluded,
                    "pass": report.pass,
                }),
                report.pass,
            )
        }
        SystemArg::Rep => {
            let s = args.s.ok_or_else(|| usage("--s is required for rep"))?;
            let two_s = resolve_spin(s, false)?;
            let seed = args
                .seed
                .ok_or_else(|| usage("--seed is required for sampled verification"))?;
            let tol = args.tol.unwrap_or(1e-8);
            let rep = build_spin_matrices_two_s(two_s, hbar);
            let report = verify_homomorphism(&rep, args.samples, seed, tol);
            (
                json!({
                    "system": "rep",
                    "s": s,
                    "hbar": hbar,
                    "samples": report.samples,
                    "seed": report.seed,
                    "tol": tol,
                    "max_residual": report.max_residual,
                    "max_unitarity_defect": report.max_unitarity_defect,
                    "pass": report.pass,
                }),
                report.pass,
            )
        }
        SystemArg::Shift => {
            let n = args.n.ok_or_else(|| usage("--n is required for shift"))?;
            let window = args
                .window
                .ok_or_else(|| usage("--window is required for shift"))?;
            let tol = args.tol.unwrap_or(1e-12);
            let lat = build_windowed_lattice(n, &window, hbar)?;
            let report = verify_shift_commutation(&lat, tol);
            (
                json!({
                    "system": "shift",
                    "n": n,
                    "window": window,
                    "hbar": hbar,
                    "seed": seed,
                    "tol": tol,
                    "max_residual": report.max_residual,
                    "checked_rows": report.checked_rows,
                    "boundary_rows_excluded": report.boundary_rows_excluded,
                    "pass": report.pass,
                }),
                report.pass,
            )
        }
    };
    emit_report(args.out.as_deref(), &payload)?;
    Ok(if pass { 0 } else { 1 })
}
