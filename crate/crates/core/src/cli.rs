//! Command implementations behind the `spindyn` binary. Each returns the
//! process exit code and writes to the supplied streams.
//!
//! Exit codes: 0 success, 1 verification failure, 2 config error,
//! 3 runtime or physics error.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::dynamics::{mass, TrajectoryRecord};
use crate::error::Error;
use crate::field::FieldConfig;
use crate::oracle::fit_precession;
use crate::rest_frame::{
    boost_to_rest, null_split, pauli_form, polarization_check, spin_operator, RestFrameState,
};
use crate::scenario::Scenario;
use crate::spinor::{FourVector, Mat2, Spinor, C64};
use crate::verify::{self, Perturbation};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidConfig(_) => EXIT_CONFIG,
        _ => EXIT_RUNTIME,
    }
}

fn fail(err: &Error, stderr: &mut dyn Write) -> i32 {
    let code = exit_code(err);
    let kind = if code == EXIT_CONFIG { "config error" } else { "error" };
    let _ = writeln!(stderr, "{kind}: {err}");
    code
}

fn load(path: &Path, stderr: &mut dyn Write) -> Result<Scenario, i32> {
    Scenario::load(path).map_err(|e| fail(&e, stderr))
}

/// Writes the CSV to a temporary file beside `out` and renames it into place.
pub fn write_csv_atomic(record: &TrajectoryRecord, out: &Path) -> std::io::Result<()> {
    let dir = match out.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    {
        let mut buf = std::io::BufWriter::new(tmp.as_file_mut());
        record.write_csv(&mut buf)?;
        buf.flush()?;
    }
    tmp.persist(out).map_err(|e| e.error)?;
    Ok(())
}

/// `<stem>_q<charge>.<ext>` next to `out`.
pub fn sweep_path(out: &Path, charge: f64) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("trajectory");
    let name = match out.extension().and_then(|s| s.to_str()) {
        Some(ext) => format!("{stem}_q{charge}.{ext}"),
        None => format!("{stem}_q{charge}"),
    };
    out.with_file_name(name)
}

fn simulate_one(sc: &Scenario, out: &Path) -> Result<usize, Error> {
    let record = verify::run_trajectory(sc, None)?;
    write_csv_atomic(&record, out).map_err(|e| Error::InvalidArgument(format!("writing {}: {e}", out.display())))?;
    Ok(record.points.len())
}

/// `simulate --config <path> --out <path> [--sweep q1,q2,...]`.
///
/// With a sweep, each charge runs on its own thread and writes
/// [`sweep_path`]`(out, q)`.
pub fn cmd_simulate(
    config: &Path,
    out: &Path,
    sweep: Option<&[f64]>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let sc = match load(config, stderr) {
        Ok(sc) => sc,
        Err(code) => return code,
    };
    let Some(charges) = sweep else {
        return match simulate_one(&sc, out) {
            Ok(n) => {
                let _ = writeln!(stdout, "wrote {n} rows to {}", out.display());
                EXIT_OK
            }
            Err(e) => fail(&e, stderr),
        };
    };
    if charges.is_empty() || charges.iter().any(|q| !q.is_finite()) {
        let _ = writeln!(stderr, "config error: --sweep needs a list of finite charges");
        return EXIT_CONFIG;
    }
    let jobs: Vec<(f64, Scenario, PathBuf)> =
        charges.iter().map(|&q| (q, sc.with_charge(q), sweep_path(out, q))).collect();
    let results: Vec<Result<usize, Error>> = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs.iter().map(|(_, s, p)| scope.spawn(move || simulate_one(s, p))).collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    let mut code = EXIT_OK;
    for ((q, _, path), res) in jobs.iter().zip(results) {
        match res {
            Ok(n) => {
                let _ = writeln!(stdout, "q = {q}: wrote {n} rows to {}", path.display());
            }
            Err(e) => {
                let _ = write!(stderr, "q = {q}: ");
                code = code.max(fail(&e, stderr));
            }
        }
    }
    code
}

/// `verify --config <path> [--json] [--perturb <eps>]`.
pub fn cmd_verify(
    config: &Path,
    json: bool,
    perturb: Option<f64>,
    tol: f64,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let sc = match load(config, stderr) {
        Ok(sc) => sc,
        Err(code) => return code,
    };
    if let Some(eps) = perturb {
        if !eps.is_finite() {
            let _ = writeln!(stderr, "config error: --perturb must be finite");
            return EXIT_CONFIG;
        }
    }
    let report = match verify::run(&sc, tol, perturb.map(|eps| Perturbation { eps })) {
        Ok(r) => r,
        Err(e) => return fail(&e, stderr),
    };
    let text = if json { report.to_json() } else { report.to_text() };
    let _ = writeln!(stdout, "{}", text.trim_end());
    if report.all_pass() {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    }
}

fn fmt_c(c: C64) -> String {
    format!("{:+.9e}{:+.9e}i", c.re, c.im)
}

fn fmt_spinor(s: &Spinor) -> String {
    format!("({}, {})", fmt_c(s.c0), fmt_c(s.c1))
}

fn fmt_vec(v: &FourVector) -> String {
    format!("({:+.9e}, {:+.9e}, {:+.9e}, {:+.9e})", v.t, v.x, v.y, v.z)
}

fn write_matrix(out: &mut dyn Write, name: &str, m: &Mat2) {
    let _ = writeln!(out, "  {name} = [[{}, {}],", fmt_c(m.get(0, 0)), fmt_c(m.get(0, 1)));
    let _ = writeln!(out, "       [{}, {}]]", fmt_c(m.get(1, 0)), fmt_c(m.get(1, 1)));
}

/// `rest-frame --config <path>`.
pub fn cmd_rest_frame(config: &Path, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let sc = match load(config, stderr) {
        Ok(sc) => sc,
        Err(code) => return code,
    };
    let mut body = || -> Result<(), Error> {
        let initial = sc.initial_state()?;
        let rest = boost_to_rest(&initial)?;
        let m = mass(&rest);
        let rf = RestFrameState::from_state(&rest)?;
        let split = null_split(&rest)?;
        let pol = polarization_check(&rest)?;
        let out = &mut *stdout;
        let _ = writeln!(out, "mass m = {m:.12e}");
        let _ = writeln!(out, "rest-frame spinors");
        let _ = writeln!(out, "  pi  = {}", fmt_spinor(&rest.pi));
        let _ = writeln!(out, "  eta = {}", fmt_spinor(&rest.eta));
        let _ = writeln!(out, "  |p_vec|/m          = {:.3e}", crate::dynamics::momentum(&rest).spatial_norm() / m);
        let _ = writeln!(out, "  moduli residual    = {:.3e}", rf.moduli_residual());
        let _ = writeln!(out, "  phase residual     = {:.3e}", rf.phase_residual());
        let _ = writeln!(out, "null split");
        let _ = writeln!(out, "  omega = m/2 = {:.12e}", split.omega);
        let _ = writeln!(out, "  p_pi  = {}", fmt_vec(&split.p_pi));
        let _ = writeln!(out, "  p_eta = {}", fmt_vec(&split.p_eta));
        let _ = writeln!(out, "  residual = {:.3e}", split.residual());
        let _ = writeln!(out, "polarization residual = {:.3e}", pol.max());
        let _ = writeln!(out, "Pauli form (canonical frame, factor 1/sqrt2)");
        let [s, v, w] = pauli_form(&rest, true)?;
        write_matrix(out, "s", &s);
        write_matrix(out, "v", &v);
        write_matrix(out, "w", &w);
        let _ = writeln!(out, "spin operator eigenvalues");
        for (name, op) in ["S_s", "S_v", "S_w"].iter().zip(spin_operator(&rest)?) {
            let [lo, hi] = op.eigenvalues();
            let _ = writeln!(out, "  {name}: {:+.12e}, {:+.12e}", lo.re, hi.re);
        }
        Ok(())
    };
    match body() {
        Ok(()) => EXIT_OK,
        Err(e) => fail(&e, stderr),
    }
}

/// `precession --config <path>`: fits the transverse rotation of p, s, v, w
/// and compares `|ω|` with `|qB/m|`.
pub fn cmd_precession(config: &Path, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let sc = match load(config, stderr) {
        Ok(sc) => sc,
        Err(code) => return code,
    };
    let bz = match sc.field {
        FieldConfig::Constant { e, b } if e == [0.0; 3] && b[0] == 0.0 && b[1] == 0.0 && b[2] != 0.0 => b[2],
        _ => {
            let _ = writeln!(stderr, "error: precession needs a constant field with E = 0 and B along z");
            return EXIT_RUNTIME;
        }
    };
    let record = match verify::run_trajectory(&sc, None) {
        Ok(r) => r,
        Err(e) => return fail(&e, stderr),
    };
    let target = sc.coupling() * bz;
    let _ = writeln!(stdout, "qB/m = {target:.12e}");
    let _ = writeln!(stdout, "{:<6} {:>20} {:>12}  sense", "vector", "|frequency|", "deviation");
    let pick: [fn(&crate::dynamics::TrajectoryPoint) -> FourVector; 4] = [|p| p.p, |p| p.s, |p| p.v, |p| p.w];
    for (name, get) in ["p", "s", "v", "w"].iter().zip(pick) {
        let samples: Vec<(f64, f64, f64)> = record
            .points
            .iter()
            .map(|pt| {
                let v = get(pt);
                (pt.tau, v.x, v.y)
            })
            .collect();
        match fit_precession(&samples) {
            Ok(fit) => {
                let dev = (fit.frequency.abs() - target.abs()) / target.abs();
                let sense = if fit.frequency < 0.0 { "counter-clockwise" } else { "clockwise" };
                let _ = writeln!(stdout, "{name:<6} {:>20.12e} {dev:>+12.3e}  {sense}", fit.frequency.abs());
            }
            Err(_) => {
                let _ = writeln!(stdout, "{name:<6} {:>20} {:>12}  no transverse component", "n/a", "n/a");
            }
        }
    }
    EXIT_OK
}
