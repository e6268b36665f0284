//! Output bundle of the block QR drivers.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::matrix::{BlockPartition, Matrix};

/// A posteriori certification quantities.
///
/// `delta = ||I - S^T S||_F`, `delta_tilde = ||P - S R||_F / ||P||_F`. The
/// per-block lists are only filled when per-block certification is enabled.
#[derive(Debug, Clone, PartialEq)]
pub struct CertReport {
    pub delta: f64,
    pub delta_tilde: f64,
    pub per_block_ortho: Vec<f64>,
    pub per_block_resid: Vec<f64>,
}

impl CertReport {
    /// Both global quantities at or below `threshold`.
    pub fn passes(&self, threshold: f64) -> bool {
        self.delta <= threshold && self.delta_tilde <= threshold
    }

    /// `key=value` text, one entry per line; lists are comma separated.
    pub fn to_kv(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(",");
        let mut s = String::new();
        let _ = writeln!(s, "delta={:e}", self.delta);
        let _ = writeln!(s, "delta_tilde={:e}", self.delta_tilde);
        let _ = writeln!(s, "per_block_ortho={}", list(&self.per_block_ortho));
        let _ = writeln!(s, "per_block_resid={}", list(&self.per_block_resid));
        s
    }

    pub fn from_kv(text: &str) -> Result<Self> {
        let mut rep = CertReport {
            delta: f64::NAN,
            delta_tilde: f64::NAN,
            per_block_ortho: Vec::new(),
            per_block_resid: Vec::new(),
        };
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| Error::Parse { line: i + 1, message: msg.to_string() };
            let (k, v) = line.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad("bad number"));
            let list = |t: &str| -> Result<Vec<f64>> {
                if t.trim().is_empty() {
                    Ok(Vec::new())
                } else {
                    t.split(',').map(num).collect()
                }
            };
            match k.trim() {
                "delta" => rep.delta = num(v)?,
                "delta_tilde" => rep.delta_tilde = num(v)?,
                "per_block_ortho" => rep.per_block_ortho = list(v)?,
                "per_block_resid" => rep.per_block_resid = list(v)?,
                other => return Err(bad(&format!("unknown key '{other}'"))),
            }
        }
        if rep.delta.is_nan() || rep.delta_tilde.is_nan() {
            return Err(Error::Parse { line: 0, message: "missing delta or delta_tilde".into() });
        }
        Ok(rep)
    }
}

/// `W = Q R` with optional sketches `S = Theta Q`, `P = Theta W`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockQR {
    pub q: Matrix,
    pub r: Matrix,
    pub s: Option<Matrix>,
    pub p: Option<Matrix>,
    pub partition: BlockPartition,
    pub cert: Option<CertReport>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kv_round_trip() {
        let rep = CertReport {
            delta: 1.25e-7,
            delta_tilde: 3.0e-9,
            per_block_ortho: vec![0.1, 2.5e-300],
            per_block_resid: vec![],
        };
        let text = rep.to_kv();
        assert!(text.starts_with("delta=1.25e-7\n"));
        assert_eq!(CertReport::from_kv(&text).unwrap(), rep);
    }

    #[test]
    fn kv_errors_carry_line() {
        let err = CertReport::from_kv("delta=1\nnonsense\n").unwrap_err();
        assert_eq!(err, Error::Parse { line: 2, message: "expected key=value".into() });
    }
}
