//! Flat `key=value` experiment configuration.
//!
//! Keys, in serialization order:
//!
//! | key | value |
//! |-----|-------|
//! | `experiment` | `qr_synthetic`, `custom_qr`, `gmres` or `eig` |
//! | `matrix` | `synthetic:NxM`, `laplacian:GxG[:shift]` or `file:PATH` |
//! | `method` | `bcgs`, `bmgs`, `bcgs2`, `rbgs`; `eig` also takes `subspace` |
//! | `sketch` | `kind:k[:seed]` |
//! | `block` | block width `m_p` |
//! | `precision` | `f32`, `f64` or `multi` |
//! | `solver` | `richardson:l`, `bmgs:l`, `cg:l` or `direct` |
//! | `interblock` | `rgs`, `cholqr:l` or `l2cholqr` |
//! | `classic_interblock` | `householder`, `cgs2` or `cholqr` |
//! | `krylov_order` | blocks per Krylov cycle `p` |
//! | `restarts` | GMRES restarts |
//! | `iterations` | eigensolver outer iterations |
//! | `tol` | optional GMRES tolerance |
//! | `gate` | `true` to fail with exit code 2 when `delta` or `delta_tilde` exceeds 0.1 |
//! | `save_factors` | `true` to write `Q`, `R`, `S`, `P` after a QR run |
//! | `out` | optional output directory |
//!
//! Blank lines and lines starting with `#` are ignored.

use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use crate::classic::{ClassicInterblock, ClassicVariant};
use crate::error::{invalid, Error, Result};
use crate::precision::PrecisionMode;
use crate::rbgs::{Interblock, LsSolver};
use crate::sketch::SketchKind;

/// Seed used when neither the configuration nor the environment sets one.
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    QrSynthetic,
    CustomQr,
    Gmres,
    Eig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Bcgs,
    Bmgs,
    Bcgs2,
    Rbgs,
    /// Plain subspace iteration, eigenvalue experiments only.
    Subspace,
}

impl Method {
    pub fn classic_variant(self) -> Option<ClassicVariant> {
        match self {
            Method::Bcgs => Some(ClassicVariant::Bcgs),
            Method::Bmgs => Some(ClassicVariant::Bmgs),
            Method::Bcgs2 => Some(ClassicVariant::Bcgs2),
            Method::Rbgs | Method::Subspace => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixSource {
    Synthetic { n: usize, m: usize },
    Laplacian { grid: Vec<usize>, shift: f64 },
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SketchSpec {
    pub kind: SketchKind,
    pub k: usize,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub matrix: MatrixSource,
    pub method: Method,
    pub sketch: SketchSpec,
    pub block: usize,
    pub precision: PrecisionMode,
    pub solver: LsSolver,
    pub interblock: Interblock,
    pub classic_interblock: ClassicInterblock,
    pub krylov_order: usize,
    pub restarts: usize,
    pub iterations: usize,
    pub tol: Option<f64>,
    pub gate: bool,
    pub save_factors: bool,
    pub out: Option<PathBuf>,
}

macro_rules! names {
    ($ty:ty, $what:literal, $($var:path => $name:literal),+ $(,)?) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($var => $name),+ })
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok($var),)+
                    other => Err(invalid(format!(concat!("unknown ", $what, " '{}'"), other))),
                }
            }
        }
    };
}

names!(Experiment, "experiment",
    Experiment::QrSynthetic => "qr_synthetic",
    Experiment::CustomQr => "custom_qr",
    Experiment::Gmres => "gmres",
    Experiment::Eig => "eig",
);

names!(Method, "method",
    Method::Bcgs => "bcgs",
    Method::Bmgs => "bmgs",
    Method::Bcgs2 => "bcgs2",
    Method::Rbgs => "rbgs",
    Method::Subspace => "subspace",
);

fn parse_dims(s: &str) -> Result<Vec<usize>> {
    s.split('x')
        .map(|t| t.parse::<usize>().map_err(|_| invalid(format!("bad dimension '{t}' in '{s}'"))))
        .collect()
}

impl fmt::Display for MatrixSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixSource::Synthetic { n, m } => write!(f, "synthetic:{n}x{m}"),
            MatrixSource::Laplacian { grid, shift } => {
                let dims: Vec<String> = grid.iter().map(|g| g.to_string()).collect();
                write!(f, "laplacian:{}:{shift}", dims.join("x"))
            }
            MatrixSource::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl FromStr for MatrixSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').ok_or_else(|| invalid(format!("matrix source '{s}' has no kind")))?;
        match kind {
            "synthetic" => match parse_dims(rest)?.as_slice() {
                &[n, m] => Ok(MatrixSource::Synthetic { n, m }),
                _ => Err(invalid(format!("synthetic source needs NxM, got '{rest}'"))),
            },
            "laplacian" => {
                let (dims, shift) = match rest.split_once(':') {
                    Some((d, sh)) => (d, sh.parse().map_err(|_| invalid(format!("bad shift '{sh}'")))?),
                    None => (rest, 0.0),
                };
                Ok(MatrixSource::Laplacian { grid: parse_dims(dims)?, shift })
            }
            "file" if !rest.is_empty() => Ok(MatrixSource::File(PathBuf::from(rest))),
            _ => Err(invalid(format!("unknown matrix source '{s}'"))),
        }
    }
}

impl fmt::Display for SketchSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind, self.k)?;
        if let Some(seed) = self.seed {
            write!(f, ":{seed}")?;
        }
        Ok(())
    }
}

impl FromStr for SketchSpec {
    type Err = Error;

    /// `kind:k[:seed]`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(2..=3).contains(&parts.len()) {
            return Err(invalid(format!("sketch must be kind:k[:seed], got '{s}'")));
        }
        let kind = parts[0].parse()?;
        let k = parts[1].parse().map_err(|_| invalid(format!("bad sketch dimension '{}'", parts[1])))?;
        let seed = match parts.get(2) {
            Some(t) => Some(t.parse().map_err(|_| invalid(format!("bad seed '{t}'")))?),
            None => None,
        };
        Ok(SketchSpec { kind, k, seed })
    }
}

fn parse_bool(s: &str) -> Result<bool> {
    match s {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(invalid(format!("expected a boolean, got '{other}'"))),
    }
}

fn parse_count(s: &str) -> Result<usize> {
    s.parse().map_err(|_| invalid(format!("expected a non-negative integer, got '{s}'")))
}

impl ExperimentConfig {
    /// Desk-scale defaults of each experiment.
    pub fn defaults(experiment: Experiment) -> Self {
        let base = ExperimentConfig {
            experiment,
            matrix: MatrixSource::Synthetic { n: 32768, m: 150 },
            method: Method::Rbgs,
            sketch: SketchSpec { kind: SketchKind::Srht, k: 1500, seed: None },
            block: 10,
            precision: PrecisionMode::Multi,
            solver: LsSolver::Richardson(5),
            interblock: Interblock::L2PlusCholqr,
            classic_interblock: ClassicInterblock::Householder,
            krylov_order: 10,
            restarts: 3,
            iterations: 5,
            tol: None,
            gate: false,
            save_factors: false,
            out: None,
        };
        let krylov = ExperimentConfig {
            matrix: MatrixSource::Laplacian { grid: vec![100, 100], shift: 0.0 },
            sketch: SketchSpec { kind: SketchKind::Srht, k: 400, seed: None },
            ..base.clone()
        };
        match experiment {
            Experiment::QrSynthetic => ExperimentConfig { solver: LsSolver::CgNormal(20), ..base },
            Experiment::CustomQr => ExperimentConfig {
                matrix: MatrixSource::File(PathBuf::from("matrix.mtx")),
                solver: LsSolver::CgNormal(20),
                ..base
            },
            // coarse orthogonalization, binary64 products and small solves
            Experiment::Gmres => ExperimentConfig { precision: PrecisionMode::UniqueCoarse, ..krylov },
            Experiment::Eig => ExperimentConfig { precision: PrecisionMode::UniqueFine, ..krylov },
        }
    }

    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "experiment" => self.experiment = v.parse()?,
            "matrix" => self.matrix = v.parse()?,
            "method" => self.method = v.parse()?,
            "sketch" => self.sketch = v.parse()?,
            "block" => self.block = parse_count(v)?,
            "precision" => self.precision = v.parse()?,
            "solver" => self.solver = v.parse()?,
            "interblock" => self.interblock = v.parse()?,
            "classic_interblock" => self.classic_interblock = v.parse()?,
            "krylov_order" => self.krylov_order = parse_count(v)?,
            "restarts" => self.restarts = parse_count(v)?,
            "iterations" => self.iterations = parse_count(v)?,
            "tol" => self.tol = Some(v.parse().map_err(|_| invalid(format!("bad tolerance '{v}'")))?),
            "gate" => self.gate = parse_bool(v)?,
            "save_factors" => self.save_factors = parse_bool(v)?,
            "out" => self.out = Some(PathBuf::from(v)),
            other => return Err(invalid(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Parses a configuration file. The `experiment` key selects the
    /// defaults; `fallback` is used when it is absent.
    pub fn parse(text: &str, fallback: Experiment) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let (k, v) = t.split_once('=').ok_or_else(|| Error::Parse { line: i + 1, message: "expected key=value".into() })?;
            entries.push((i + 1, k.trim(), v.trim()));
        }
        let mut experiment = fallback;
        for &(line, k, v) in &entries {
            if k == "experiment" {
                experiment = v.parse().map_err(|e: Error| Error::Parse { line, message: e.to_string() })?;
            }
        }
        let mut cfg = Self::defaults(experiment);
        for (line, k, v) in entries {
            cfg.set(k, v).map_err(|e| Error::Parse { line, message: e.to_string() })?;
        }
        Ok(cfg)
    }

    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "experiment={}", self.experiment);
        let _ = writeln!(s, "matrix={}", self.matrix);
        let _ = writeln!(s, "method={}", self.method);
        let _ = writeln!(s, "sketch={}", self.sketch);
        let _ = writeln!(s, "block={}", self.block);
        let _ = writeln!(s, "precision={}", self.precision);
        let _ = writeln!(s, "solver={}", self.solver);
        let _ = writeln!(s, "interblock={}", self.interblock);
        let _ = writeln!(s, "classic_interblock={}", self.classic_interblock);
        let _ = writeln!(s, "krylov_order={}", self.krylov_order);
        let _ = writeln!(s, "restarts={}", self.restarts);
        let _ = writeln!(s, "iterations={}", self.iterations);
        if let Some(t) = self.tol {
            let _ = writeln!(s, "tol={t:e}");
        }
        let _ = writeln!(s, "gate={}", self.gate);
        let _ = writeln!(s, "save_factors={}", self.save_factors);
        if let Some(o) = &self.out {
            let _ = writeln!(s, "out={}", o.display());
        }
        s
    }

    pub fn seed(&self) -> u64 {
        self.sketch.seed.unwrap_or(DEFAULT_SEED)
    }

    /// Checks the settings against each other before a run.
    pub fn validate(&self) -> Result<()> {
        if self.block == 0 {
            return Err(invalid("block width must be >= 1"));
        }
        if self.sketch.k == 0 {
            return Err(invalid("sketch dimension must be >= 1"));
        }
        self.solver.validate()?;
        if let Interblock::SketchedCholqr(0) = self.interblock {
            return Err(invalid("sketched CholQR needs at least one pass"));
        }
        match (&self.matrix, self.experiment) {
            (MatrixSource::Synthetic { n, m }, _) if *n < 2 || *m < 2 => {
                return Err(invalid("synthetic matrix needs n, m >= 2"));
            }
            (MatrixSource::Laplacian { grid, .. }, _) if grid.is_empty() || grid.iter().any(|&g| g < 2) => {
                return Err(invalid("laplacian grid dimensions must be >= 2"));
            }
            (MatrixSource::Synthetic { .. }, Experiment::QrSynthetic | Experiment::CustomQr) => {}
            (_, Experiment::QrSynthetic) => return Err(invalid("qr_synthetic needs a synthetic matrix source")),
            (MatrixSource::Synthetic { .. }, _) => {
                return Err(invalid(format!("{} needs a square operator, not a synthetic matrix", self.experiment)));
            }
            _ => {}
        }
        let sketched = self.method == Method::Rbgs || matches!(self.experiment, Experiment::QrSynthetic | Experiment::CustomQr);
        if self.gate && !sketched {
            return Err(invalid(format!("method {} produces no certificate to gate on", self.method)));
        }
        if self.method == Method::Subspace && self.experiment != Experiment::Eig {
            return Err(invalid("method 'subspace' is only available for eig"));
        }
        match self.experiment {
            Experiment::QrSynthetic | Experiment::CustomQr => {
                if let MatrixSource::Synthetic { m, .. } = self.matrix {
                    if self.method == Method::Rbgs && self.sketch.k < m {
                        return Err(invalid(format!("sketch dimension {} below the column count {m}", self.sketch.k)));
                    }
                }
            }
            Experiment::Gmres | Experiment::Eig => {
                if self.krylov_order < 2 {
                    return Err(invalid("krylov_order must be >= 2"));
                }
                if self.method == Method::Rbgs && self.krylov_order * self.block > self.sketch.k {
                    return Err(invalid(format!(
                        "krylov_order * block = {} exceeds the sketch dimension {}",
                        self.krylov_order * self.block,
                        self.sketch.k
                    )));
                }
                if self.experiment == Experiment::Eig && self.iterations == 0 {
                    return Err(invalid("eig needs at least one iteration"));
                }
                if self.tol.is_some_and(|t| !(t > 0.0)) {
                    return Err(invalid("tolerance must be positive"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        for e in [Experiment::QrSynthetic, Experiment::CustomQr, Experiment::Gmres, Experiment::Eig] {
            let cfg = ExperimentConfig::defaults(e);
            assert_eq!(ExperimentConfig::parse(&cfg.serialize(), Experiment::Eig).unwrap(), cfg);
        }
    }

    #[test]
    fn full_round_trip() {
        let mut cfg = ExperimentConfig::defaults(Experiment::Gmres);
        cfg.matrix = MatrixSource::Laplacian { grid: vec![64, 64], shift: -0.125 };
        cfg.sketch.seed = Some(u64::MAX);
        cfg.tol = Some(1e-10);
        cfg.out = Some(PathBuf::from("runs/a b"));
        cfg.solver = LsSolver::CgNormal(7);
        cfg.interblock = Interblock::SketchedCholqr(2);
        cfg.classic_interblock = ClassicInterblock::Cgs2;
        cfg.gate = true;
        let text = cfg.serialize();
        assert!(text.contains("sketch=srht:400:18446744073709551615\n"));
        assert_eq!(ExperimentConfig::parse(&text, Experiment::QrSynthetic).unwrap(), cfg);
    }

    #[test]
    fn experiment_key_selects_defaults() {
        let cfg = ExperimentConfig::parse("# run\nexperiment=eig\nblock=4\n", Experiment::QrSynthetic).unwrap();
        assert_eq!(cfg.experiment, Experiment::Eig);
        assert_eq!(cfg.block, 4);
        assert!(matches!(cfg.matrix, MatrixSource::Laplacian { .. }));
    }

    #[test]
    fn parse_errors_carry_lines() {
        let err = ExperimentConfig::parse("block=3\n\nmethod=qr\n", Experiment::Gmres).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
        let err = ExperimentConfig::parse("block 3\n", Experiment::Gmres).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn sources_parse() {
        assert_eq!("laplacian:8x9".parse::<MatrixSource>().unwrap(), MatrixSource::Laplacian { grid: vec![8, 9], shift: 0.0 });
        assert_eq!("file:/tmp/a:b.mtx".parse::<MatrixSource>().unwrap(), MatrixSource::File("/tmp/a:b.mtx".into()));
        assert!("synthetic:10".parse::<MatrixSource>().is_err());
        assert!("srht".parse::<SketchSpec>().is_err());
        assert_eq!("rademacher:30".parse::<SketchSpec>().unwrap().seed, None);
    }

    #[test]
    fn validation() {
        let mut cfg = ExperimentConfig::defaults(Experiment::Gmres);
        assert!(cfg.validate().is_ok());
        cfg.krylov_order = 50;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::defaults(Experiment::QrSynthetic);
        cfg.method = Method::Subspace;
        assert!(cfg.validate().is_err());
        cfg.method = Method::Bcgs;
        cfg.matrix = MatrixSource::Laplacian { grid: vec![4, 4], shift: 0.0 };
        assert!(cfg.validate().is_err());
    }
}
