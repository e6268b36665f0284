//! Seeded oblivious embeddings.
//!
//! An operator is fully determined by `(kind, k, n, seed)`. Random bits come
//! from ChaCha8 seeded with `seed`: Rademacher row `r` uses stream `r`; the
//! SRHT sign diagonal and the row sample use two reserved streams.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::fwht::fwht;
use crate::error::{invalid, Error, Result};
use crate::matrix::Matrix;
use crate::precision::Precision;

const SIGN_STREAM: u64 = u64::MAX;
const SAMPLE_STREAM: u64 = u64::MAX - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SketchKind {
    Rademacher,
    Srht,
    Identity,
}

impl fmt::Display for SketchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SketchKind::Rademacher => "rademacher",
            SketchKind::Srht => "srht",
            SketchKind::Identity => "identity",
        })
    }
}

impl FromStr for SketchKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rademacher" => Ok(SketchKind::Rademacher),
            "srht" => Ok(SketchKind::Srht),
            "identity" => Ok(SketchKind::Identity),
            other => Err(invalid(format!("unknown sketch kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Data {
    /// Packed sign bits, `words_per_row` words per row; a set bit is `-1`.
    Rademacher { bits: Vec<u64>, words_per_row: usize },
    Srht { signs: Vec<f64>, samples: Vec<usize> },
    Identity,
}

/// A `k x n` sketching matrix applied as a linear map.
#[derive(Debug, Clone, PartialEq)]
pub struct SketchOperator {
    kind: SketchKind,
    k: usize,
    n: usize,
    seed: u64,
    data: Data,
}

impl SketchOperator {
    /// Builds the operator; `k` must satisfy `1 <= k <= n` (identity forces
    /// `k = n`).
    pub fn new(kind: SketchKind, k: usize, n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("sketch operator needs n >= 1"));
        }
        if kind == SketchKind::Identity {
            if k != n {
                return Err(invalid(format!("identity sketch needs k = n, got k={k}, n={n}")));
            }
            return Ok(SketchOperator { kind, k, n, seed, data: Data::Identity });
        }
        if k == 0 || k > n {
            return Err(invalid(format!("sketch dimension k={k} must lie in 1..={n}")));
        }
        let data = match kind {
            SketchKind::Rademacher => {
                let words_per_row = n.div_ceil(64);
                let mut bits = Vec::with_capacity(k * words_per_row);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for r in 0..k {
                    rng.set_stream(r as u64);
                    rng.set_word_pos(0);
                    for _ in 0..words_per_row {
                        bits.push(rng.next_u64());
                    }
                }
                Data::Rademacher { bits, words_per_row }
            }
            SketchKind::Srht => {
                let n_pad = n.next_power_of_two();
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(SIGN_STREAM);
                let signs = (0..n_pad)
                    .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
                    .collect();
                rng.set_stream(SAMPLE_STREAM);
                rng.set_word_pos(0);
                let mut idx: Vec<usize> = (0..n_pad).collect();
                for i in 0..k {
                    let j = rng.gen_range(i..n_pad);
                    idx.swap(i, j);
                }
                idx.truncate(k);
                Data::Srht { signs, samples: idx }
            }
            SketchKind::Identity => unreachable!(),
        };
        Ok(SketchOperator { kind, k, n, seed, data })
    }

    pub fn identity(n: usize) -> Self {
        SketchOperator { kind: SketchKind::Identity, k: n, n, seed: 0, data: Data::Identity }
    }

    /// SRHT with explicit sign diagonal (length `n_pad`) and sample indices.
    /// Mostly useful for tests and hand-checked examples.
    pub fn srht_from_parts(n: usize, signs: Vec<f64>, samples: Vec<usize>) -> Result<Self> {
        let n_pad = n.next_power_of_two();
        if signs.len() != n_pad || samples.iter().any(|&s| s >= n_pad) || samples.is_empty() {
            return Err(invalid("srht parts do not match the padded dimension"));
        }
        if signs.iter().any(|s| s.abs() != 1.0) {
            return Err(invalid("srht signs must be +1 or -1"));
        }
        Ok(SketchOperator {
            kind: SketchKind::Srht,
            k: samples.len(),
            n,
            seed: 0,
            data: Data::Srht { signs, samples },
        })
    }

    pub fn kind(&self) -> SketchKind {
        self.kind
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Padded dimension used by SRHT (equals `n` for other kinds).
    pub fn n_pad(&self) -> usize {
        match self.kind {
            SketchKind::Srht => self.n.next_power_of_two(),
            _ => self.n,
        }
    }

    /// `Theta X` in binary64.
    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        self.apply_prec(x, Precision::Fine)
    }

    /// `Theta X` with every elementary operation rounded to `prec`.
    pub fn apply_prec(&self, x: &Matrix, prec: Precision) -> Result<Matrix> {
        if x.rows() != self.n {
            return Err(Error::DimensionMismatch {
                op: "sketch apply",
                left: (self.k, self.n),
                right: x.shape(),
            });
        }
        let m = x.cols();
        let mut out = Matrix::zeros(self.k, m);
        match &self.data {
            Data::Identity => {
                out = x.clone().rounded(prec);
            }
            Data::Rademacher { bits, words_per_row } => {
                let scale = 1.0 / (self.k as f64).sqrt();
                let mut row = vec![0.0f64; self.n];
                for r in 0..self.k {
                    let words = &bits[r * words_per_row..(r + 1) * words_per_row];
                    for (j, v) in row.iter_mut().enumerate() {
                        *v = if words[j / 64] >> (j % 64) & 1 == 1 { -scale } else { scale };
                    }
                    for c in 0..m {
                        let xc = x.col(c);
                        out[(r, c)] = match prec {
                            Precision::Fine => {
                                let mut s = 0.0;
                                for (a, b) in row.iter().zip(xc) {
                                    s += a * b;
                                }
                                s
                            }
                            Precision::Coarse => {
                                let mut s = 0.0f32;
                                for (a, b) in row.iter().zip(xc) {
                                    s += *a as f32 * *b as f32;
                                }
                                s as f64
                            }
                        };
                    }
                }
            }
            Data::Srht { signs, samples } => {
                let n_pad = signs.len();
                let scale = 1.0 / (self.k as f64).sqrt();
                match prec {
                    Precision::Fine => {
                        let mut buf = vec![0.0f64; n_pad];
                        for c in 0..m {
                            buf.iter_mut().for_each(|v| *v = 0.0);
                            for (i, &v) in x.col(c).iter().enumerate() {
                                buf[i] = v * signs[i];
                            }
                            fwht(&mut buf);
                            for (r, &s) in samples.iter().enumerate() {
                                out[(r, c)] = buf[s] * scale;
                            }
                        }
                    }
                    Precision::Coarse => {
                        let scale = scale as f32;
                        let mut buf = vec![0.0f32; n_pad];
                        for c in 0..m {
                            buf.iter_mut().for_each(|v| *v = 0.0);
                            for (i, &v) in x.col(c).iter().enumerate() {
                                buf[i] = v as f32 * signs[i] as f32;
                            }
                            fwht(&mut buf);
                            for (r, &s) in samples.iter().enumerate() {
                                out[(r, c)] = (buf[s] * scale) as f64;
                            }
                        }
                    }
                }
            }
        }
        Ok(out.with_precision(prec))
    }

    /// Dense `k x n` matrix of the operator (test scale only).
    pub fn materialize(&self) -> Matrix {
        self.apply(&Matrix::identity(self.n)).expect("identity has n rows")
    }

    /// Sign diagonal and sample indices of an SRHT operator.
    pub fn srht_parts(&self) -> Option<(&[f64], &[usize])> {
        match &self.data {
            Data::Srht { signs, samples } => Some((signs, samples)),
            _ => None,
        }
    }
}

impl fmt::Display for SketchOperator {
    /// Single-line form `kind k n seed`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {}", self.kind, self.k, self.n, self.seed)
    }
}

impl FromStr for SketchOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        if parts.len() != 4 {
            return Err(invalid(format!("expected 'kind k n seed', got '{s}'")));
        }
        let num = |t: &str, what: &str| -> Result<u64> {
            t.parse().map_err(|_| invalid(format!("bad {what} '{t}'")))
        };
        SketchOperator::new(
            parts[0].parse()?,
            num(parts[1], "k")? as usize,
            num(parts[2], "n")? as usize,
            num(parts[3], "seed")?,
        )
    }
}
