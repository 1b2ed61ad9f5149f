//! File formats and subcommand implementations behind the `pseudoherm` binary.
//!
//! Every command writes a human-readable report to the given writer and returns an
//! exit status: 0 when the property holds, 1 when the analysis completed and the
//! property fails, 2 for input and usage errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use pseudoherm::kh::{KHParameters, KhFamily};
use pseudoherm::krein::{self, KindCount};
use pseudoherm::linalg::{evolve, CVector};
use pseudoherm::metric::{self, PseudoCheck};
use pseudoherm::{ComplexMatrix, Error, Tolerance};
use serde::Deserialize;
use thiserror::Error;

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Input(Error),
    #[error("{0}")]
    Analysis(Error),
    #[error("writing output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Analysis(_) => EXIT_FAILS,
            _ => EXIT_INPUT,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Errors caused by the inputs themselves rather than the analysis.
fn classify_error(e: Error) -> CliError {
    match e {
        Error::Dimension { .. }
        | Error::NotSquare { .. }
        | Error::Empty
        | Error::NonFinite { .. }
        | Error::InvalidTolerance(_)
        | Error::InvalidParameter(_) => CliError::Input(e),
        other => CliError::Analysis(other),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixFile {
    n: usize,
    entries: Vec<[f64; 2]>,
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_entries(path: &Path, text: &str, expected: impl Fn(usize) -> usize) -> CliResult<(usize, Vec<Complex64>)> {
    let parse_err = |message: String| CliError::Parse {
        path: path.to_path_buf(),
        message,
    };
    let file: MatrixFile = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    if file.n == 0 {
        return Err(parse_err("field `n` must be positive".into()));
    }
    let want = expected(file.n);
    if file.entries.len() != want {
        return Err(parse_err(format!(
            "field `entries`: expected {want} entries for n = {}, found {}",
            file.n,
            file.entries.len()
        )));
    }
    let mut out = Vec::with_capacity(want);
    for (i, [re, im]) in file.entries.into_iter().enumerate() {
        if !re.is_finite() || !im.is_finite() {
            return Err(parse_err(format!("field `entries[{i}]`: non-finite value [{re}, {im}]")));
        }
        out.push(Complex64::new(re, im));
    }
    Ok((file.n, out))
}

/// Reads `{"n": n, "entries": [[re, im], ...]}` with `n²` row-major entries.
pub fn parse_matrix_file(path: &Path) -> CliResult<ComplexMatrix> {
    parse_matrix_str(path, &read_text(path)?)
}

/// Parses matrix text; `origin` only labels diagnostics.
pub fn parse_matrix_str(origin: &Path, text: &str) -> CliResult<ComplexMatrix> {
    let (n, entries) = parse_entries(origin, text, |n| n * n)?;
    ComplexMatrix::from_row_slice(n, &entries).map_err(CliError::Input)
}

/// Reads a vector in the same format with `n` entries.
pub fn parse_vector_file(path: &Path) -> CliResult<CVector> {
    let (_, entries) = parse_entries(path, &read_text(path)?, |n| n)?;
    Ok(CVector::from_vec(entries))
}

fn format_entries(n: usize, entries: &[Complex64]) -> String {
    let mut s = format!("{{\n  \"n\": {n},\n  \"entries\": [\n");
    for (i, z) in entries.iter().enumerate() {
        let sep = if i + 1 == entries.len() { "" } else { "," };
        s.push_str(&format!("    [{:.16e}, {:.16e}]{sep}\n", z.re, z.im));
    }
    s.push_str("  ]\n}\n");
    s
}

/// Matrix text with every value at 17 significant digits, which round-trips exactly.
pub fn format_matrix(m: &ComplexMatrix) -> String {
    format_entries(m.n(), &m.row_major())
}

pub fn format_vector(v: &CVector) -> String {
    format_entries(v.len(), v.as_slice())
}

pub fn write_matrix_file(path: &Path, m: &ComplexMatrix) -> CliResult<()> {
    fs::write(path, format_matrix(m)).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Shared settings from the global flags.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub tol: Tolerance,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(rel: Option<f64>, seed: u64, out: Option<PathBuf>) -> CliResult<Self> {
        let tol = match rel {
            Some(r) => Tolerance::with_rel(r).map_err(CliError::Input)?,
            None => Tolerance::default(),
        };
        Ok(Self { tol, seed, out })
    }
}

fn status(holds: bool) -> i32 {
    if holds {
        EXIT_HOLDS
    } else {
        EXIT_FAILS
    }
}

pub fn cmd_check_pt(h: &Path, p: &Path, cfg: &RunConfig, w: &mut dyn Write) -> CliResult<i32> {
    let h = parse_matrix_file(h)?;
    let p = parse_matrix_file(p)?;
    let r = metric::check_pt(&h, &p, &cfg.tol).map_err(classify_error)?;
    writeln!(w, "parity_ok: {}", r.parity_ok)?;
    writeln!(w, "parity_residual: {:e}", r.parity_residual)?;
    writeln!(w, "commutation_residual: {:e}", r.commutation_residual)?;
    writeln!(w, "pt_symmetric: {}", r.is_pt_symmetric)?;
    Ok(status(r.is_pt_symmetric))
}

pub fn cmd_check_pseudo(h: &Path, g: &Path, cfg: &RunConfig, w: &mut dyn Write) -> CliResult<i32> {
    let h = parse_matrix_file(h)?;
    let g = parse_matrix_file(g)?;
    let check = metric::check_pseudo_with(&h, &g, &cfg.tol).map_err(classify_error)?;
    match &check {
        PseudoCheck::Certified(c) => {
            writeln!(w, "pseudo_hermitian: true")?;
            writeln!(w, "residual: {:e}", c.residual)?;
            writeln!(w, "inertia: {}", c.inertia)?;
            writeln!(w, "min_abs_eig: {:e}", c.min_abs_eig)?;
        }
        PseudoCheck::Failed(f) => {
            writeln!(w, "pseudo_hermitian: false")?;
            writeln!(w, "failed_gate: {:?}", f.gate)?;
            writeln!(w, "hermitian_residual: {:e}", f.hermitian_residual)?;
            writeln!(w, "min_abs_eig: {:e}", f.min_abs_eig)?;
            writeln!(w, "residual: {:e}", f.residual)?;
        }
    }
    Ok(status(check.is_certified()))
}

fn write_or_print(m: &ComplexMatrix, cfg: &RunConfig, w: &mut dyn Write) -> CliResult<()> {
    match &cfg.out {
        Some(path) => {
            write_matrix_file(path, m)?;
            writeln!(w, "written: {}", path.display())?;
        }
        None => write!(w, "{}", format_matrix(m))?,
    }
    Ok(())
}

pub fn cmd_construct_g(h: &Path, cfg: &RunConfig, w: &mut dyn Write) -> CliResult<i32> {
    let h = parse_matrix_file(h)?;
    match metric::construct_metric(&h, &cfg.tol) {
        Ok(built) => {
            let c = &built.certificate;
            writeln!(w, "residual: {:e}", c.residual)?;
            writeln!(w, "inertia: {}", c.inertia)?;
            writeln!(w, "min_abs_eig: {:e}", c.min_abs_eig)?;
            writeln!(w, "cond_q: {:e}", built.decomposition.cond_q)?;
            write_or_print(&c.g, cfg, w)?;
            Ok(EXIT_HOLDS)
        }
        Err(e @ (Error::NotSimilarToConjugate { .. } | Error::PairingMismatch { .. })) => {
            writeln!(w, "not similar to conjugate: {e}")?;
            let sim = metric::similar_to_conjugate(&h, &cfg.tol).map_err(classify_error)?;
            for b in &sim.signature.blocks {
                writeln!(w, "block: eigenvalue {} sizes {:?}", b.eigenvalue, b.sizes)?;
            }
            Ok(EXIT_FAILS)
        }
        Err(e) => Err(classify_error(e)),
    }
}

/// Exit 0 when every eigenvalue is real and definite.
pub fn cmd_classify(h: &Path, g: &Path, cfg: &RunConfig, w: &mut dyn Write) -> CliResult<i32> {
    let h = parse_matrix_file(h)?;
    let g = parse_matrix_file(g)?;
    let cls = krein::classify_eigenvalues(&h, &g, &cfg.tol).map_err(classify_error)?;
    writeln!(w, "eigenvalue,alg_mult,geo_mult,kind,ambiguous,gram_eigenvalues")?;
    for c in &cls {
        let gram: Vec<String> = c.gram_eigenvalues.iter().map(|x| format!("{x:e}")).collect();
        writeln!(
            w,
            "{},{},{},{},{},[{}]",
            c.eigenvalue,
            c.alg_mult,
            c.geo_mult,
            c.kind,
            c.ambiguous,
            gram.join(" ")
        )?;
    }
    match krein::count_kinds(&cls, &g, &cfg.tol).map_err(classify_error)? {
        KindCount::Applicable {
            n_first,
            n_second,
            inertia,
            consistent,
        } => writeln!(
            w,
            "# counts first={n_first} second={n_second} inertia={inertia} consistent={consistent}"
        )?,
        KindCount::NotApplicable => writeln!(w, "# counts not applicable")?,
    }
    let stable = cls.iter().all(|c| c.kind.is_definite());
    writeln!(w, "# strongly_stable {stable}")?;
    Ok(status(stable))
}

pub fn cmd_find_parity(h: &Path, cfg: &RunConfig, w: &mut dyn Write) -> CliResult<i32> {
    let h = parse_matrix_file(h)?;
    match metric::find_generalized_parity(&h, &cfg.tol).map_err(classify_error)? {
        Some(p) => {
            writeln!(w, "residual: {:e}", p.residual)?;
            writeln!(w, "cond: {:e}", p.cond)?;
            writeln!(w, "nullity: {}", p.nullity)?;
            write_or_print(&p.p, cfg, w)?;
            Ok(EXIT_HOLDS)
        }
        None => {
            writeln!(w, "no nonsingular P with H P = P H̄")?;
            Ok(EXIT_FAILS)
        }
    }
}

/// Evolves `x' = -i H x` and reports the drift of `x† G x`. Without an initial vector a
/// random one is drawn from the seed.
pub fn cmd_evolve(
    h: &Path,
    g: &Path,
    x0: Option<&Path>,
    times: &[f64],
    cfg: &RunConfig,
    w: &mut dyn Write,
) -> CliResult<i32> {
    let h = parse_matrix_file(h)?;
    let g = parse_matrix_file(g)?;
    let x0 = match x0 {
        Some(path) => parse_vector_file(path)?,
        None => {
            let mut rng = pseudoherm::ensemble::rng(cfg.seed);
            CVector::from_fn(h.n(), |_, _| pseudoherm::ensemble::complex_normal(&mut rng))
        }
    };
    let certified = metric::check_pseudo_with(&h, &g, &cfg.tol)
        .map_err(classify_error)?
        .is_certified();
    let q0 = krein::krein_product(&x0, &x0, &g).map_err(classify_error)?.re;
    writeln!(w, "certified: {certified}")?;
    writeln!(w, "t,krein,drift")?;
    let a = h.generator();
    let mut conserved = true;
    for &t in times {
        let x = evolve(&a, &x0, t).map_err(classify_error)?;
        let q = krein::krein_product(&x, &x, &g).map_err(classify_error)?.re;
        let drift = (q - q0).abs();
        conserved &= drift <= 1e-8 * (1.0 + q0.abs());
        writeln!(w, "{t},{q:e},{drift:e}")?;
    }
    Ok(status(certified && conserved))
}

/// Grid and fixed parameters for the Kelvin–Helmholtz sweep.
#[derive(Debug, Clone, Copy)]
pub struct KhSweep {
    pub k: f64,
    pub g: f64,
    pub rho10: f64,
    pub rho20: f64,
    pub u10: f64,
    pub u20_min: f64,
    pub u20_max: f64,
    pub steps: usize,
}

impl Default for KhSweep {
    fn default() -> Self {
        Self {
            k: 1.0,
            g: 3.0,
            rho10: 2.0,
            rho20: 3.0,
            u10: 1.0,
            u20_min: 2.3,
            u20_max: 2.7,
            steps: 81,
        }
    }
}

/// CSV `param,eig_index,re,im,kind` followed by one `# collision <u20>` line per event.
pub fn kh_sweep_csv(s: &KhSweep, tol: &Tolerance) -> CliResult<String> {
    if s.steps < 2 {
        return Err(CliError::Usage(format!("--steps must be at least 2, got {}", s.steps)));
    }
    let fixed = KHParameters::new(s.k, s.u10, s.u20_min, s.rho10, s.rho20, s.g).map_err(CliError::Input)?;
    let family = KhFamily::new(fixed).map_err(CliError::Input)?;
    let report = krein::sweep(&family, s.u20_min, s.u20_max, s.steps, tol).map_err(classify_error)?;
    let mut csv = String::from("param,eig_index,re,im,kind\n");
    for (p, row) in report.parameter_grid.iter().zip(&report.trajectories) {
        for (i, (z, kind)) in row.iter().enumerate() {
            csv.push_str(&format!("{p},{i},{},{},{kind}\n", z.re, z.im));
        }
    }
    for c in &report.collisions {
        csv.push_str(&format!("# collision {}\n", c.parameter_value));
    }
    Ok(csv)
}

pub fn cmd_sweep_kh(s: &KhSweep, cfg: &RunConfig, w: &mut dyn Write) -> CliResult<i32> {
    let csv = kh_sweep_csv(s, &cfg.tol)?;
    match &cfg.out {
        Some(path) => fs::write(path, &csv).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?,
        None => w.write_all(csv.as_bytes())?,
    }
    Ok(EXIT_HOLDS)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> CliResult<ComplexMatrix> {
        parse_matrix_str(Path::new("test.json"), text)
    }

    #[test]
    fn parses_examples() {
        let m = parse(r#"{"n": 1, "entries": [[2.0, 0.0]]}"#).unwrap();
        assert_eq!(m.row_major(), vec![Complex64::new(2.0, 0.0)]);
        let m = parse(r#"{"n": 2, "entries": [[0,0],[1,0],[0,0],[0,0]]}"#).unwrap();
        assert_eq!(m[(0, 1)], Complex64::new(1.0, 0.0));
        assert_eq!(m[(1, 0)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn length_mismatch_names_expected_count() {
        let err = parse(r#"{"n": 2, "entries": [[0,0],[1,0],[0,0]]}"#).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("expected 4"), "{msg}");
        assert_eq!(err.exit_code(), EXIT_INPUT);
    }

    #[test]
    fn malformed_input_reports_position() {
        let msg = parse("{\"n\": 2,\n \"entries\": [[0,0],}").unwrap_err().to_string();
        assert!(msg.contains("line 2"), "{msg}");
        assert!(parse(r#"{"n": 1, "entries": [[1e999, 0]]}"#).is_err());
        assert!(parse(r#"{"n": 0, "entries": []}"#).is_err());
    }

    #[test]
    fn round_trip_is_exact() {
        let mut rng = pseudoherm::ensemble::rng(1);
        for n in 1..6 {
            let m = ComplexMatrix::new(pseudoherm::ensemble::random_complex(n, &mut rng)).unwrap();
            let back = parse(&format_matrix(&m)).unwrap();
            let bits = |m: &ComplexMatrix| -> Vec<(u64, u64)> {
                m.row_major().iter().map(|z| (z.re.to_bits(), z.im.to_bits())).collect()
            };
            assert_eq!(bits(&back), bits(&m));
        }
        let odd = ComplexMatrix::from_row_slice(
            1,
            &[Complex64::new(-0.0, f64::MIN_POSITIVE)],
        )
        .unwrap();
        assert_eq!(parse(&format_matrix(&odd)).unwrap().row_major()[0].re.to_bits(), (-0.0f64).to_bits());
    }

    #[test]
    fn sweep_rejects_single_step() {
        let s = KhSweep { steps: 1, ..KhSweep::default() };
        assert_eq!(kh_sweep_csv(&s, &Tolerance::default()).unwrap_err().exit_code(), EXIT_INPUT);
    }
}
