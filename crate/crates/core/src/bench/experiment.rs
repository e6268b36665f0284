//! Experiment drivers producing per-iteration CSV and a summary.
//!
//! CSV columns are `iter,cond_Q,<metric>,delta,delta_tilde`, with the metric
//! `rel_fact_error` (QR), `rel_residual` (GMRES) or `max_eig_residual`
//! (eigenvalues). QR runs append `cond_W`, the condition number of the
//! leading columns of the input. Floats are printed in shortest round-trip
//! form and `NaN` marks quantities a method does not produce.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{Experiment, ExperimentConfig, MatrixSource, Method};
use super::generate::{gen_laplacian, gen_synthetic};
use super::mtx::{read_matrix_market, write_array, MtxMatrix};
use crate::classic::{classic_bgs, ClassicBgsConfig};
use crate::error::{invalid, Error, Result};
use crate::factor::{BlockQR, CertReport};
use crate::kernels::{cond_estimate, gemm, householder_r};
use crate::krylov::{
    block_gmres, classic_block_gmres, classic_rayleigh_ritz, rayleigh_ritz, subspace_iteration, DenseOperator,
    GmresOptions, LinearOperator,
};
use crate::matrix::Matrix;
use crate::precision::Precision;
use crate::rbgs::{certify, rbgs, RbgsConfig};
use crate::sketch::SketchOperator;

/// Certification threshold applied when gating is requested.
pub const GATE_THRESHOLD: f64 = 0.1;

/// Exit codes of a run.
pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_CERT_FAILED: i32 = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub iter: usize,
    pub cond_q: f64,
    pub metric: f64,
    pub delta: f64,
    pub delta_tilde: f64,
    /// QR runs only.
    pub cond_w: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub exit_code: i32,
    pub metric_name: &'static str,
    pub rows: Vec<CsvRow>,
    /// `key=value` lines.
    pub summary: Vec<(String, String)>,
    /// Factorization of QR runs.
    pub factors: Option<BlockQR>,
}

impl ExperimentOutcome {
    pub fn csv(&self) -> String {
        let qr = self.rows.iter().any(|r| r.cond_w.is_some());
        let mut s = format!("iter,cond_Q,{},delta,delta_tilde", self.metric_name);
        s.push_str(if qr { ",cond_W\n" } else { "\n" });
        for r in &self.rows {
            let _ = write!(s, "{},{:e},{:e},{:e},{:e}", r.iter, r.cond_q, r.metric, r.delta, r.delta_tilde);
            if let Some(c) = r.cond_w {
                let _ = write!(s, ",{c:e}");
            }
            s.push('\n');
        }
        s
    }

    pub fn summary_text(&self) -> String {
        self.summary.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn last(&self) -> Option<&CsvRow> {
        self.rows.last()
    }

    /// Writes `history.csv`, `summary.txt` and, if present, the factors
    /// `q.mtx`, `r.mtx`, `s.mtx`, `p.mtx` and `cert.txt`.
    pub fn write_to(&self, dir: &Path, with_factors: bool) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("history.csv"), self.csv())?;
        fs::write(dir.join("summary.txt"), self.summary_text())?;
        if let (true, Some(f)) = (with_factors, &self.factors) {
            write_block_qr(dir, f)?;
        }
        Ok(())
    }
}

/// Writes a factorization as Matrix Market arrays plus `cert.txt`.
pub fn write_block_qr(dir: &Path, f: &BlockQR) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_array(dir.join("q.mtx"), &f.q)?;
    write_array(dir.join("r.mtx"), &f.r)?;
    if let Some(s) = &f.s {
        write_array(dir.join("s.mtx"), s)?;
    }
    if let Some(p) = &f.p {
        write_array(dir.join("p.mtx"), p)?;
    }
    if let Some(c) = &f.cert {
        fs::write(dir.join("cert.txt"), c.to_kv())?;
    }
    Ok(())
}

fn context(cfg: &ExperimentConfig) -> String {
    format!("{} experiment (method {}, matrix {})", cfg.experiment, cfg.method, cfg.matrix)
}

/// Validates and runs an experiment. Hard errors carry the experiment
/// context; a failed certification under gating yields [`EXIT_CERT_FAILED`].
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let wrap = |e: Error| Error::Context { context: context(cfg), source: Box::new(e) };
    cfg.validate().map_err(wrap)?;
    let mut out = match cfg.experiment {
        Experiment::QrSynthetic | Experiment::CustomQr => run_qr(cfg),
        Experiment::Gmres => run_gmres(cfg),
        Experiment::Eig => run_eig(cfg),
    }
    .map_err(wrap)?;
    let (delta, delta_tilde) = out.last().map_or((f64::NAN, f64::NAN), |r| (r.delta, r.delta_tilde));
    let certified = delta <= GATE_THRESHOLD && delta_tilde <= GATE_THRESHOLD;
    out.exit_code = if cfg.gate && !certified { EXIT_CERT_FAILED } else { EXIT_OK };
    out.summary.push(("certified".into(), certified.to_string()));
    out.summary.push(("exit_code".into(), out.exit_code.to_string()));
    Ok(out)
}

/// Runs an experiment and writes its artifacts to `cfg.out` when set.
pub fn run_and_write(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let out = run_experiment(cfg)?;
    if let Some(dir) = &cfg.out {
        out.write_to(dir, cfg.save_factors)?;
        fs::write(dir.join("config.txt"), cfg.serialize())?;
    }
    Ok(out)
}

fn load_dense(src: &MatrixSource) -> Result<Matrix> {
    match src {
        MatrixSource::Synthetic { n, m } => gen_synthetic(*n, *m),
        MatrixSource::Laplacian { grid, shift } => Ok(gen_laplacian(grid, *shift)?.to_dense()),
        MatrixSource::File(p) => Ok(read_matrix_market(p)?.to_dense()),
    }
}

fn load_operator(src: &MatrixSource) -> Result<Box<dyn LinearOperator>> {
    match src {
        MatrixSource::Laplacian { grid, shift } => Ok(Box::new(gen_laplacian(grid, *shift)?)),
        MatrixSource::File(p) => match read_matrix_market(p)? {
            MtxMatrix::Sparse(a) if a.rows() == a.cols() => Ok(Box::new(a)),
            MtxMatrix::Dense(a) => Ok(Box::new(DenseOperator::new(a)?)),
            MtxMatrix::Sparse(a) => Err(invalid(format!("operator must be square, got {}x{}", a.rows(), a.cols()))),
        },
        MatrixSource::Synthetic { .. } => Err(invalid("a synthetic matrix is not an operator")),
    }
}

/// Start block with entries uniform in `[-1, 1)`, drawn from the run seed.
pub fn start_block(n: usize, m: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let data = (0..n * m).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Matrix::from_col_major(n, m, data).expect("length matches")
}

fn rbgs_config(cfg: &ExperimentConfig) -> RbgsConfig {
    RbgsConfig::new(cfg.block, cfg.precision).with_solver(cfg.solver).with_interblock(cfg.interblock)
}

fn classic_config(cfg: &ExperimentConfig) -> Option<ClassicBgsConfig> {
    let variant = cfg.method.classic_variant()?;
    let mut c = ClassicBgsConfig::new(variant, cfg.block, cfg.precision.single());
    c.interblock = cfg.classic_interblock;
    Some(c)
}

fn sketch_for(cfg: &ExperimentConfig, n: usize) -> Result<SketchOperator> {
    SketchOperator::new(cfg.sketch.kind, cfg.sketch.k, n, cfg.seed())
}

fn common_summary(cfg: &ExperimentConfig, n: usize) -> Vec<(String, String)> {
    vec![
        ("experiment".into(), cfg.experiment.to_string()),
        ("method".into(), cfg.method.to_string()),
        ("matrix".into(), cfg.matrix.to_string()),
        ("n".into(), n.to_string()),
        ("block".into(), cfg.block.to_string()),
        ("precision".into(), cfg.precision.to_string()),
        ("sketch".into(), format!("{}:{}:{}", cfg.sketch.kind, cfg.sketch.k, cfg.seed())),
    ]
}

fn run_qr(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let w = load_dense(&cfg.matrix)?;
    let (n, m) = w.shape();
    let theta = sketch_for(cfg, n)?;
    let mut f = match classic_config(cfg) {
        None => rbgs(&w, &theta, &rbgs_config(cfg))?,
        Some(c) => {
            let mut f = classic_bgs(&w, c)?;
            // classical factors are certified with the same sketch
            let s = theta.apply(&f.q)?;
            let p = theta.apply(&w)?;
            f.cert = Some(certify(&s, &p, &f.r)?);
            f.s = Some(s);
            f.p = Some(p);
            f
        }
    };
    let (s, p) = (f.s.clone().expect("sketch set"), f.p.clone().expect("sketch set"));
    let rq = householder_r(&f.q)?;
    let rw = householder_r(&w)?;
    let e = gemm(-1.0, &f.q, &f.r, 1.0, Some(&w), Precision::Fine)?;
    let (mut err2, mut w2, mut col) = (0.0, 0.0, 0);
    let mut rows = Vec::with_capacity(f.partition.num_blocks());
    for i in 0..f.partition.num_blocks() {
        let end = f.partition.offset(i) + f.partition.width(i);
        while col < end {
            err2 += e.col(col).iter().map(|x| x * x).sum::<f64>();
            w2 += w.col(col).iter().map(|x| x * x).sum::<f64>();
            col += 1;
        }
        let lead = certify(&s.columns(0..end), &p.columns(0..end), &f.r.block(0..end, 0..end))?;
        rows.push(CsvRow {
            iter: i + 1,
            cond_q: cond_estimate(&rq.block(0..end, 0..end))?,
            metric: (err2 / w2).sqrt(),
            delta: lead.delta,
            delta_tilde: lead.delta_tilde,
            cond_w: Some(cond_estimate(&rw.block(0..end, 0..end))?),
        });
    }
    if f.cert.is_none() {
        f.cert = Some(certify(&s, &p, &f.r)?);
    }
    let last = rows.last().cloned().expect("at least one block");
    let mut summary = common_summary(cfg, n);
    summary.push(("m".into(), m.to_string()));
    summary.push(("cond_Q".into(), format!("{:e}", last.cond_q)));
    summary.push(("cond_W".into(), format!("{:e}", last.cond_w.unwrap_or(f64::NAN))));
    summary.push(("rel_fact_error".into(), format!("{:e}", last.metric)));
    let CertReport { delta, delta_tilde, .. } = f.cert.clone().expect("set above");
    summary.push(("delta".into(), format!("{delta:e}")));
    summary.push(("delta_tilde".into(), format!("{delta_tilde:e}")));
    Ok(ExperimentOutcome { exit_code: EXIT_OK, metric_name: "rel_fact_error", rows, summary, factors: Some(f) })
}

fn run_gmres(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let a = load_operator(&cfg.matrix)?;
    let n = a.dim();
    let b = start_block(n, cfg.block, cfg.seed());
    let mut opts = GmresOptions::new(cfg.krylov_order, cfg.restarts);
    opts.tol = cfg.tol;
    let report = match classic_config(cfg) {
        None => block_gmres(&a, &b, &sketch_for(cfg, n)?, &rbgs_config(cfg), opts)?,
        Some(c) => classic_block_gmres(&a, &b, c, opts)?,
    };
    let rows = report
        .residual_history
        .iter()
        .zip(&report.basis_cond_history)
        .zip(&report.cert_history)
        .map(|((&(iter, res), &cond), &(d, dt))| CsvRow { iter, cond_q: cond, metric: res, delta: d, delta_tilde: dt, cond_w: None })
        .collect();
    let mut summary = common_summary(cfg, n);
    summary.push(("krylov_order".into(), cfg.krylov_order.to_string()));
    summary.push(("restarts".into(), report.restarts.to_string()));
    summary.push(("rel_residual".into(), format!("{:e}", report.final_residual())));
    summary.push(("breakdown".into(), report.breakdown.map_or("none".into(), |b| b.to_string())));
    Ok(ExperimentOutcome { exit_code: EXIT_OK, metric_name: "rel_residual", rows, summary, factors: None })
}

fn run_eig(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let a = load_operator(&cfg.matrix)?;
    let n = a.dim();
    let b = start_block(n, cfg.block, cfg.seed());
    let p = cfg.krylov_order;
    let mut summary = common_summary(cfg, n);
    let (rows, values) = if cfg.method == Method::Subspace {
        // same number of block products as the Krylov runs
        let steps = (cfg.iterations * (p - 1)).saturating_sub(1).max(1);
        let res = subspace_iteration(&a, &b, steps)?;
        let rows: Vec<CsvRow> = res
            .history
            .iter()
            .enumerate()
            .map(|(i, &r)| CsvRow { iter: i + 1, cond_q: 1.0, metric: r, delta: f64::NAN, delta_tilde: f64::NAN, cond_w: None })
            .collect();
        (rows, res.values)
    } else {
        let res = match classic_config(cfg) {
            None => rayleigh_ritz(&a, &b, &sketch_for(cfg, n)?, p, cfg.iterations, &rbgs_config(cfg))?,
            Some(c) => classic_rayleigh_ritz(&a, &b, p, cfg.iterations, c)?,
        };
        let rows: Vec<CsvRow> = res
            .history
            .iter()
            .enumerate()
            .map(|(i, h)| CsvRow {
                iter: i + 1,
                cond_q: h.cond_q,
                metric: h.max_rel_residual,
                delta: h.delta,
                delta_tilde: h.delta_tilde,
                cond_w: None,
            })
            .collect();
        if let Some(h) = res.history.last() {
            summary.push(("max_eig_estimate".into(), format!("{:e}", h.max_rel_estimate)));
        }
        (rows, res.values)
    };
    let last: &CsvRow = rows.last().ok_or_else(|| invalid("no iterations were run"))?;
    summary.push(("max_eig_residual".into(), format!("{:e}", last.metric)));
    let vals: Vec<String> = values.iter().map(|v| if v.im == 0.0 { format!("{:e}", v.re) } else { format!("{:e}{:+e}i", v.re, v.im) }).collect();
    summary.push(("eigenvalues".into(), vals.join(",")));
    Ok(ExperimentOutcome { exit_code: EXIT_OK, metric_name: "max_eig_residual", rows, summary, factors: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::config::SketchSpec;
    use crate::sketch::SketchKind;

    fn small_qr(method: Method) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::defaults(Experiment::QrSynthetic);
        cfg.matrix = MatrixSource::Synthetic { n: 2048, m: 80 };
        cfg.sketch = SketchSpec { kind: SketchKind::Srht, k: 800, seed: Some(3) };
        cfg.block = 5;
        cfg.method = method;
        cfg
    }

    #[test]
    fn qr_rbgs_multi_is_certified() {
        let out = run_experiment(&small_qr(Method::Rbgs)).unwrap();
        assert_eq!(out.exit_code, EXIT_OK);
        assert_eq!(out.rows.len(), 16);
        let last = out.last().unwrap();
        assert!(last.delta <= 0.1 && last.cond_q <= 2.0, "{last:?}");
        assert!(last.cond_w.unwrap() > 1e8);
        let csv = out.csv();
        assert!(csv.starts_with("iter,cond_Q,rel_fact_error,delta,delta_tilde,cond_W\n"));
        assert_eq!(csv.lines().count(), 17);
    }

    #[test]
    fn gating_fails_for_unstable_bcgs() {
        let mut cfg = small_qr(Method::Bcgs);
        cfg.gate = true;
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.exit_code, EXIT_CERT_FAILED);
        cfg.gate = false;
        assert_eq!(run_experiment(&cfg).unwrap().exit_code, EXIT_OK);
    }

    #[test]
    fn runs_are_byte_identical() {
        let mut cfg = ExperimentConfig::defaults(Experiment::Gmres);
        cfg.matrix = MatrixSource::Laplacian { grid: vec![12, 12], shift: 0.5 };
        cfg.sketch = SketchSpec { kind: SketchKind::Rademacher, k: 60, seed: Some(11) };
        cfg.block = 2;
        cfg.krylov_order = 6;
        cfg.restarts = 1;
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(a.csv(), b.csv());
        assert_eq!(a.summary_text(), b.summary_text());
        assert_eq!(a.rows.len(), 10);
    }

    #[test]
    fn eig_methods_run() {
        let mut cfg = ExperimentConfig::defaults(Experiment::Eig);
        cfg.matrix = MatrixSource::Laplacian { grid: vec![10, 10], shift: 0.0 };
        cfg.sketch = SketchSpec { kind: SketchKind::Srht, k: 80, seed: Some(1) };
        cfg.block = 2;
        cfg.krylov_order = 8;
        cfg.iterations = 3;
        for m in [Method::Rbgs, Method::Bcgs2, Method::Subspace] {
            cfg.method = m;
            let out = run_experiment(&cfg).unwrap();
            assert_eq!(out.exit_code, EXIT_OK);
            assert!(out.last().unwrap().metric.is_finite());
        }
    }

    #[test]
    fn errors_carry_context() {
        let mut cfg = small_qr(Method::Rbgs);
        cfg.experiment = Experiment::CustomQr;
        cfg.matrix = MatrixSource::File("/nonexistent/w.mtx".into());
        let err = run_experiment(&cfg).unwrap_err();
        assert!(err.to_string().starts_with("custom_qr experiment"), "{err}");
    }

    #[test]
    fn start_block_is_seeded() {
        assert_eq!(start_block(5, 2, 9), start_block(5, 2, 9));
        assert_ne!(start_block(5, 2, 9), start_block(5, 2, 10));
    }
}
