//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (run with `--nocapture` to see them).

use std::process::Command;
use std::sync::Arc;

use nalgebra::Vector3;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bsh_core::grouprep::{bch_truncated, group_rep, rho, so3_exp, verify_homomorphism};
use bsh_core::lattice::{build_lattice, AxisBounds, QuantizationConfig};
use bsh_core::opalg::{matrix_exp, matrix_log, DenseMatrix};
use bsh_core::oscillator::{build_b, build_q_h, build_q_p, OscillatorBasis};
use bsh_core::quadrature::adaptive_simpson;
use bsh_core::quantize::verify_shift_commutation;
use bsh_core::spectrum::{bs_levels, problems, SpectrumConfig};
use bsh_core::spin::{
    build_spin_matrices, check_integrality, commutant_dimension, ladder_coeffs, symplectic_volume,
};
use bsh_core::Error;

fn criterion(n: u32, name: &str, check: impl FnOnce() -> Result<(), String>) {
    match check() {
        Ok(()) => println!("criterion {n:02} PASS: {name}"),
        Err(msg) => {
            println!("criterion {n:02} FAIL: {name}: {msg}");
            panic!("criterion {n:02} failed: {msg}");
        }
    }
}

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err(format!($($arg)*));
        }
    };
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Criterion 1: with hbar = 1, ground 1, N = 10, the dense Q_p has
/// (m, m+1) and (m+1, m) entries sqrt((m+1)/2) in basis labels m = 1..9 and
/// zeros elsewhere, to 1e-12.
#[test]
fn criterion_01_oscillator_matrix_reproduction() {
    criterion(1, "oscillator Q_p matrix reproduction", || {
        let basis = OscillatorBasis::new(1, 10, QuantizationConfig::default())
            .map_err(|e| e.to_string())?;
        let qp = build_q_p(&basis).to_dense();
        ensure!(qp.dim() == 10, "dimension {} instead of 10", qp.dim());
        for i in 0..10usize {
            for j in 0..10usize {
                let expected = if i + 1 == j {
                    ((i as f64 + 2.0) / 2.0).sqrt() // label m = i + 1, entry sqrt((m+1)/2)
                } else if j + 1 == i {
                    ((j as f64 + 2.0) / 2.0).sqrt()
                } else {
                    0.0
                };
                let got = qp.get(i, j);
                ensure!(
                    (got - c(expected, 0.0)).norm() <= 1e-12,
                    "entry ({i}, {j}) = {got} but expected {expected}"
                );
            }
        }
        Ok(())
    });
}

/// Criterion 2: max interior residual of [a_i, Q_{A_j}] - delta_ij hbar a_i
/// at most 1e-12 on the 1-D window [1, 100] and the 2-D window [0, 10]^2.
#[test]
fn criterion_02_shift_commutation() {
    criterion(2, "shift commutation relations", || {
        let lat1 = Arc::new(
            build_lattice(
                1,
                vec![AxisBounds::window(1, 100)],
                QuantizationConfig::default(),
            )
            .map_err(|e| e.to_string())?,
        );
        let r1 = verify_shift_commutation(&lat1, 1e-12);
        ensure!(r1.pass, "1-D residual {}", r1.max_residual);

        let lat2 = Arc::new(
            build_lattice(
                2,
                vec![AxisBounds::window(0, 10), AxisBounds::window(0, 10)],
                QuantizationConfig::default(),
            )
            .map_err(|e| e.to_string())?,
        );
        let r2 = verify_shift_commutation(&lat2, 1e-12);
        ensure!(r2.pass, "2-D residual {}", r2.max_residual);
        Ok(())
    });
}

/// Criterion 3: oscillator identities at N = 100, hbar = 1, ground 0:
/// [b, Q_H] = hbar b, [b†, Q_H] = -hbar b†, ||b e_m||^2 = 2 m hbar and
/// b†b = 2 Q_H on all rows, residuals at most 1e-12 N hbar.
#[test]
fn criterion_03_oscillator_identities() {
    criterion(3, "oscillator operator identities", || {
        let n_max = 100i64;
        let tol = 1e-12 * n_max as f64;
        let basis = OscillatorBasis::new(0, n_max, QuantizationConfig::default())
            .map_err(|e| e.to_string())?;
        let (b, bdag) = build_b(&basis);
        let qh = build_q_h(&basis);

        let r1 = b
            .commutator(&qh)
            .unwrap()
            .sub(&b.scale(c(1.0, 0.0)))
            .unwrap();
        let r2 = bdag
            .commutator(&qh)
            .unwrap()
            .add(&bdag.scale(c(1.0, 0.0)))
            .unwrap();
        let r3 = bdag
            .compose(&b)
            .unwrap()
            .sub(&qh.scale(c(2.0, 0.0)))
            .unwrap();
        for (name, r) in [("[b,QH]-hb", &r1), ("[b†,QH]+hb†", &r2), ("b†b-2QH", &r3)] {
            let worst = (0..basis.dimension())
                .map(|flat| r.column_norm(flat))
                .fold(0.0, f64::max);
            ensure!(worst <= tol, "{name} residual {worst} over {tol}");
        }
        for (flat, m) in (0..=n_max).enumerate() {
            let norm_sq = b.column_norm(flat).powi(2);
            ensure!(
                (norm_sq - 2.0 * m as f64).abs() <= tol,
                "||b e_{m}||^2 = {norm_sq}"
            );
        }
        Ok(())
    });
}

/// Criterion 4: for every integer s in [0, 25] the ladder boundary values
/// vanish exactly, the so(3) commutators and the Casimir hold to 1e-10, and
/// for s <= 5 the commutant of the three matrices is one-dimensional.
#[test]
fn criterion_04_spin_suite() {
    criterion(4, "spin representation suite", || {
        for s in 0..=25i64 {
            let a = ladder_coeffs(s, 1.0);
            ensure!(a[0] == 0.0, "s = {s}: a_(-s) = {}", a[0]);
            ensure!(
                *a.last().unwrap() == 0.0,
                "s = {s}: a_(s+1) = {}",
                a.last().unwrap()
            );

            let rep = build_spin_matrices(s, 1.0);
            let dim = rep.dim();
            let comm = |x: &DenseMatrix, y: &DenseMatrix| x.commutator(y).unwrap();
            let ladder_res = comm(rep.q_jplus(), rep.q_jminus())
                .sub(&rep.q_j3().scale(c(2.0, 0.0)))
                .unwrap()
                .frobenius_norm();
            ensure!(ladder_res <= 1e-10, "s = {s}: [Q+,Q-] residual {ladder_res}");

            let i_hbar = c(0.0, 1.0);
            let cyclic = [
                (rep.q_j1(), rep.q_j2(), rep.q_j3()),
                (rep.q_j2(), rep.q_j3(), rep.q_j1()),
                (rep.q_j3(), rep.q_j1(), rep.q_j2()),
            ];
            for (idx, (x, y, z)) in cyclic.into_iter().enumerate() {
                let res = comm(x, y).sub(&z.scale(i_hbar)).unwrap().frobenius_norm();
                ensure!(res <= 1e-10, "s = {s}: cyclic commutator {idx} residual {res}");
            }

            let casimir_res = rep
                .casimir()
                .sub(&DenseMatrix::identity(dim).scale(c((s * (s + 1)) as f64, 0.0)))
                .unwrap()
                .frobenius_norm();
            ensure!(casimir_res <= 1e-10, "s = {s}: Casimir residual {casimir_res}");

            if s <= 5 {
                let dim_commutant = commutant_dimension(&rep);
                ensure!(
                    dim_commutant == 1,
                    "s = {s}: commutant dimension {dim_commutant}"
                );
            }
        }
        Ok(())
    });
}

/// Criterion 5: r = 1.5, hbar = 1 is rejected with the integer-spin error;
/// r = s hbar is accepted for s = 1..25.
#[test]
fn criterion_05_integrality_gate() {
    criterion(5, "prequantization integrality gate", || {
        match check_integrality(1.5, 1.0) {
            Err(Error::HalfIntegerSpin { .. }) => {}
            other => return Err(format!("expected the integer-spin error, got {other:?}")),
        }
        for s in 1..=25i64 {
            match check_integrality(s as f64, 1.0) {
                Ok((n, got)) if n == 2 * s && got == s => {}
                other => return Err(format!("s = {s}: got {other:?}")),
            }
        }
        Ok(())
    });
}

/// Criterion 6: for s <= 10 and 200 seeded pairs on the principal branch the
/// homomorphism residual is at most 1e-8, the unitarity defect at most
/// 1e-10, and a full 2 pi turn acts as the identity to 1e-8.
#[test]
fn criterion_06_group_representation() {
    criterion(6, "integrated group representation", || {
        let mut rng = ChaCha8Rng::seed_from_u64(606);
        for s in 1..=10i64 {
            let rep = build_spin_matrices(s, 1.0);
            let report = verify_homomorphism(&rep, 200, 1000 + s as u64, 1e-8);
            ensure!(
                report.max_residual <= 1e-8,
                "s = {s}: homomorphism residual {}",
                report.max_residual
            );
            ensure!(
                report.max_unitarity_defect <= 1e-10,
                "s = {s}: unitarity defect {}",
                report.max_unitarity_defect
            );

            let axis = Vector3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            )
            .normalize();
            let full_turn = so3_exp(&(axis * (2.0 * std::f64::consts::PI)));
            let u = group_rep(&rep, &full_turn).map_err(|e| e.to_string())?;
            let defect = u
                .sub(&DenseMatrix::identity(rep.dim()))
                .unwrap()
                .frobenius_norm();
            ensure!(defect <= 1e-8, "s = {s}: 2 pi turn defect {defect}");
        }
        Ok(())
    });
}

/// Criterion 7: 100 seeded random representation pairs with Frobenius norms
/// at most 0.05 satisfy ||bch4(X, Y) - log(exp X exp Y)|| <= 1e-6.
#[test]
fn criterion_07_bch_oracle() {
    criterion(7, "truncated BCH against the matrix-log oracle", || {
        let rep = build_spin_matrices(2, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(707);
        let mut random_small = |rng: &mut ChaCha8Rng| {
            let v = Vector3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let m = rho(&rep, &v);
            let target = 0.05 * rng.gen_range(0.1..=1.0);
            m.scale(c(target / m.frobenius_norm(), 0.0))
        };
        for trial in 0..100 {
            let x = random_small(&mut rng);
            let y = random_small(&mut rng);
            let approx = bch_truncated(&x, &y, 4).map_err(|e| e.to_string())?;
            let product = matrix_exp(&x)
                .unwrap()
                .mul(&matrix_exp(&y).unwrap())
                .unwrap();
            let exact = matrix_log(&product).map_err(|e| e.to_string())?;
            let err = approx.sub(&exact).unwrap().frobenius_norm();
            ensure!(err <= 1e-6, "trial {trial}: BCH error {err}");
        }
        Ok(())
    });
}

/// Criterion 8: |symplectic_volume(r, 64) - 4 pi r| <= 1e-9 for
/// r in {0.5, 1, 3}.
#[test]
fn criterion_08_symplectic_volume() {
    criterion(8, "orbit symplectic volume", || {
        let four_pi = 4.0 * std::f64::consts::PI;
        for r in [0.5, 1.0, 3.0] {
            let v = symplectic_volume(r, 64);
            let err = (v - four_pi * r).abs();
            ensure!(err <= 1e-9, "r = {r}: volume error {err}");
        }
        Ok(())
    });
}

/// Independent action oracle for criterion 9: adaptive Simpson on the raw
/// integrand with turning points from the closed-form quadratic, no
/// trigonometric substitution.
fn relativistic_action_oracle(e: f64, k: f64, ell: f64, mass: f64) -> f64 {
    // (E^2 - mass^2) r^2 - 2 E k r + (k^2 - ell^2) = 0
    let a = e * e - mass * mass;
    let b = -2.0 * e * k;
    let cc = k * k - ell * ell;
    let disc = (b * b - 4.0 * a * cc).sqrt();
    let r1 = (-b + disc) / (2.0 * a);
    let r2 = (-b - disc) / (2.0 * a);
    let (q_minus, q_plus) = (r1.min(r2), r1.max(r2));
    let p2 = move |q: f64| {
        let w = e - k / q;
        w * w - mass * mass - ell * ell / (q * q)
    };
    // 1e-9 on the action is far below the 1e-6 relative energy budget
    // (dA/dE is O(10^2) at these energies).
    let integral = adaptive_simpson(&|q| p2(q).max(0.0).sqrt(), q_minus, q_plus, 1e-9);
    integral / std::f64::consts::PI
}

fn oracle_level(m: i64, k: f64, ell: f64, mass: f64, bracket: (f64, f64)) -> f64 {
    let target = m as f64;
    let (mut lo, mut hi) = bracket;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if relativistic_action_oracle(mid, k, ell, mass) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Criterion 9: oscillator levels E_m = m hbar to 1e-8 for m = 1..20;
/// Coulomb levels match the closed form -k^2 / (2 (m hbar + ell)^2) to 1e-6
/// relative; relativistic-Kepler levels match the independent
/// adaptive-quadrature oracle to 1e-6 relative.
#[test]
fn criterion_09_spectra() {
    criterion(9, "semiclassical spectra", || {
        let cfg = SpectrumConfig::default();

        let osc = problems::oscillator(12.0);
        let table = bs_levels(&osc, 1, 20, (1e-9, 25.0), &cfg);
        ensure!(table.failures.is_empty(), "oscillator failures: {:?}", table.failures);
        for row in &table.rows {
            ensure!(
                (row.energy - row.m as f64).abs() <= 1e-8,
                "oscillator m = {}: E = {}",
                row.m,
                row.energy
            );
        }

        let (k, ell) = (1.0, 1.0);
        let coulomb = problems::coulomb(k, ell, (1e-4, 600.0));
        let table = bs_levels(&coulomb, 1, 5, (-0.2, -0.01), &cfg);
        ensure!(table.failures.is_empty(), "coulomb failures: {:?}", table.failures);
        for row in &table.rows {
            let exact = -k * k / (2.0 * (row.m as f64 + ell) * (row.m as f64 + ell));
            let rel = ((row.energy - exact) / exact).abs();
            ensure!(rel <= 1e-6, "coulomb m = {}: relative error {rel}", row.m);
        }

        let (k, ell, mass) = (-0.25, 0.8, 1.0);
        let bracket = (0.9706, 0.99964);
        let kepler = problems::relativistic_kepler(k, ell, mass, (1e-3, 800.0));
        let table = bs_levels(&kepler, 1, 5, bracket, &cfg);
        ensure!(table.failures.is_empty(), "kepler failures: {:?}", table.failures);
        for row in &table.rows {
            let oracle = oracle_level(row.m, k, ell, mass, bracket);
            let rel = ((row.energy - oracle) / oracle).abs();
            ensure!(
                rel <= 1e-6,
                "kepler m = {}: solver {} vs oracle {oracle}",
                row.m,
                row.energy
            );
        }
        Ok(())
    });
}

/// Criterion 10: two runs of a `verify` subcommand with the same seed
/// produce byte-identical JSON.
#[test]
fn criterion_10_deterministic_reports() {
    criterion(10, "verify reports are byte-identical across runs", || {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let run = |name: &str, extra: &[&str]| -> Result<Vec<u8>, String> {
            let path = dir.path().join(name);
            let status = Command::new(env!("CARGO_BIN_EXE_bshq"))
                .args(["verify"])
                .args(extra)
                .arg("--out")
                .arg(&path)
                .status()
                .map_err(|e| e.to_string())?;
            ensure!(status.success(), "verify exited with {status}");
            std::fs::read(&path).map_err(|e| e.to_string())
        };
        let rep_args = ["--system", "rep", "--s", "3", "--samples", "50", "--seed", "42"];
        let first = run("rep1.json", &rep_args)?;
        let second = run("rep2.json", &rep_args)?;
        ensure!(first == second, "rep verify reports differ between runs");

        let spin_args = ["--system", "spin", "--s", "25", "--seed", "7"];
        let first = run("spin1.json", &spin_args)?;
        let second = run("spin2.json", &spin_args)?;
        ensure!(first == second, "spin verify reports differ between runs");
        Ok(())
    });
}
