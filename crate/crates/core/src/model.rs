//! Observation model `y = F beta + z`: sensing matrices, sparse signals,
//! noise regimes and the best k-term split.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::linalg::{norm2, norm_inf};
use crate::{seed, Error, Result};

const UNIT_TOL: f64 = 1e-9;

/// Smallest magnitude of a generated nonzero entry.
pub const MIN_MAGNITUDE: f64 = 1e-6;

/// Dense `n x p` measurement matrix with cached column norms.
#[derive(Clone, Debug, PartialEq)]
pub struct SensingMatrix {
    entries: DMatrix<f64>,
    column_norms: Vec<f64>,
    unit_columns: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ensemble {
    /// i.i.d. N(0, 1/n) entries.
    Gaussian,
    /// i.i.d. +-1/sqrt(n) entries.
    Bernoulli,
    /// Matrix read from the text format.
    FromFile(PathBuf),
}

impl SensingMatrix {
    pub fn from_dmatrix(entries: DMatrix<f64>) -> Result<Self> {
        let (n, p) = entries.shape();
        if n == 0 || p == 0 {
            return Err(Error::InvalidDimension(format!("{n}x{p} matrix")));
        }
        if let Some(bad) = entries.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite entry at column-major offset {bad}"
            )));
        }
        let column_norms: Vec<f64> = entries.column_iter().map(|c| c.norm()).collect();
        let unit_columns = column_norms.iter().all(|&c| (c - 1.0).abs() <= UNIT_TOL);
        Ok(SensingMatrix {
            entries,
            column_norms,
            unit_columns,
        })
    }

    /// Builds a matrix from entries listed row by row.
    pub fn from_rows(n: usize, p: usize, row_major: &[f64]) -> Result<Self> {
        if row_major.len() != n * p {
            return Err(Error::DimensionMismatch {
                expected: n * p,
                found: row_major.len(),
            });
        }
        Self::from_dmatrix(DMatrix::from_row_slice(n, p, row_major))
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let n = columns.first().map_or(0, Vec::len);
        if let Some(c) = columns.iter().find(|c| c.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: c.len(),
            });
        }
        let cols: Vec<DVector<f64>> = columns
            .iter()
            .map(|c| DVector::from_column_slice(c))
            .collect();
        if cols.is_empty() || n == 0 {
            return Err(Error::InvalidDimension("no columns".into()));
        }
        Self::from_dmatrix(DMatrix::from_columns(&cols))
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_dmatrix(DMatrix::identity(n, n))
    }

    /// Draws a matrix from `ensemble`. Deterministic in `seed`.
    pub fn generate(
        n: usize,
        p: usize,
        ensemble: &Ensemble,
        normalize: bool,
        seed: u64,
    ) -> Result<Self> {
        if n == 0 || p == 0 {
            return Err(Error::InvalidDimension(format!("{n}x{p} matrix")));
        }
        let mut rng = seed::rng(seed);
        let scale = 1.0 / (n as f64).sqrt();
        let m = match ensemble {
            Ensemble::Gaussian => Self::from_dmatrix(DMatrix::from_fn(n, p, |_, _| {
                let g: f64 = StandardNormal.sample(&mut rng);
                g * scale
            }))?,
            Ensemble::Bernoulli => Self::from_dmatrix(DMatrix::from_fn(n, p, |_, _| {
                if rng.random::<bool>() {
                    scale
                } else {
                    -scale
                }
            }))?,
            Ensemble::FromFile(path) => {
                let m = Self::read_text(path)?;
                if m.n() != n || m.p() != p {
                    return Err(Error::InvalidDimension(format!(
                        "{} holds a {}x{} matrix, expected {n}x{p}",
                        path.display(),
                        m.n(),
                        m.p()
                    )));
                }
                m
            }
        };
        if normalize {
            m.column_normalize()
        } else {
            Ok(m)
        }
    }

    /// Divides every column by its l2 norm.
    pub fn column_normalize(&self) -> Result<Self> {
        if let Some(j) = self.column_norms.iter().position(|&c| c == 0.0) {
            return Err(Error::DegenerateMatrix { column: j });
        }
        let mut entries = self.entries.clone();
        for (j, mut col) in entries.column_iter_mut().enumerate() {
            col /= self.column_norms[j];
        }
        let mut out = Self::from_dmatrix(entries)?;
        // Division by the exact norm leaves columns within an ulp or two of
        // unit length, well inside the 1e-9 window.
        out.unit_columns = out
            .column_norms
            .iter()
            .all(|&c| (c - 1.0).abs() <= UNIT_TOL);
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn p(&self) -> usize {
        self.entries.ncols()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn column_norms(&self) -> &[f64] {
        &self.column_norms
    }

    pub fn unit_columns(&self) -> bool {
        self.unit_columns
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.entries.column(j).iter().copied().collect()
    }

    /// `F x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.p(), "apply: length mismatch");
        let mut out = vec![0.0; self.n()];
        for (j, &xj) in x.iter().enumerate() {
            if xj != 0.0 {
                for (o, &a) in out.iter_mut().zip(self.entries.column(j).iter()) {
                    *o += a * xj;
                }
            }
        }
        out
    }

    /// `F^T v`.
    pub fn apply_transpose(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n(), "apply_transpose: length mismatch");
        self.entries
            .column_iter()
            .map(|c| c.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `F^T F`.
    pub fn gram(&self) -> DMatrix<f64> {
        self.entries.transpose() * &self.entries
    }

    /// Parses the text format: a header line `n p` followed by `n` rows of
    /// `p` space-separated reals.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let dims: Vec<&str> = header.split_whitespace().collect();
        if dims.len() != 2 {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected `n p`, found `{header}`"),
            });
        }
        let parse_dim = |s: &str| {
            s.parse::<usize>().map_err(|e| Error::Parse {
                line: 1,
                msg: format!("bad dimension `{s}`: {e}"),
            })
        };
        let (n, p) = (parse_dim(dims[0])?, parse_dim(dims[1])?);
        let mut data = Vec::with_capacity(n * p);
        let mut rows = 0;
        for (idx, line) in lines {
            let before = data.len();
            for tok in line.split_whitespace() {
                data.push(tok.parse::<f64>().map_err(|e| Error::Parse {
                    line: idx + 1,
                    msg: format!("bad real `{tok}`: {e}"),
                })?);
            }
            if data.len() - before != p {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("expected {p} entries, found {}", data.len() - before),
                });
            }
            rows += 1;
        }
        if rows != n {
            return Err(Error::Parse {
                line: rows + 1,
                msg: format!("expected {n} rows, found {rows}"),
            });
        }
        Self::from_rows(n, p, &data)
    }

    /// Serialises to the text format. `f64` display is the shortest
    /// representation that parses back to the same value.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n(), self.p());
        for row in self.entries.row_iter() {
            let mut first = true;
            for x in row.iter() {
                if !first {
                    s.push(' ');
                }
                first = false;
                write!(s, "{x}").unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn read_text(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_text(&text)
    }

    pub fn write_text(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    /// Short content hash used to tie reports to the matrix they describe.
    pub fn matrix_id(&self) -> String {
        let digest = Sha256::digest(self.to_text().as_bytes());
        hex::encode(&digest[..8])
    }
}

/// A p-vector with a declared sparsity budget `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseSignal {
    values: Vec<f64>,
    k: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Amplitude {
    /// Random signs, unit magnitude.
    Unit,
    /// Magnitude uniform on `[a, b]`, random sign.
    Uniform { a: f64, b: f64 },
    /// N(0, sigma^2) values.
    Gaussian { sigma: f64 },
}

impl SparseSignal {
    pub fn new(values: Vec<f64>, k: usize) -> Result<Self> {
        if k > values.len() {
            return Err(Error::InvalidSparsity { k, p: values.len() });
        }
        Ok(SparseSignal { values, k })
    }

    /// Wraps a vector with `k` equal to its support size.
    pub fn from_values(values: Vec<f64>) -> Self {
        let k = values.iter().filter(|&&x| x != 0.0).count();
        SparseSignal { values, k }
    }

    /// Exactly `k` nonzeros at uniformly random distinct positions.
    pub fn generate(p: usize, k: usize, amplitude: &Amplitude, seed: u64) -> Result<Self> {
        if k > p {
            return Err(Error::InvalidSparsity { k, p });
        }
        match *amplitude {
            Amplitude::Uniform { a, b } if !(a <= b) || a.abs().max(b.abs()) < MIN_MAGNITUDE => {
                return Err(Error::InvalidParameter(format!("uniform amplitude [{a}, {b}]")));
            }
            Amplitude::Gaussian { sigma } if !(sigma > 0.0) => {
                return Err(Error::InvalidParameter(format!("gaussian amplitude sigma={sigma}")));
            }
            _ => {}
        }
        let mut rng = seed::rng(seed);
        let mut positions = sample(&mut rng, p, k).into_vec();
        positions.sort_unstable();
        let mut values = vec![0.0; p];
        for &i in &positions {
            values[i] = loop {
                let v = match *amplitude {
                    Amplitude::Unit => 1.0,
                    Amplitude::Uniform { a, b } => rng.random_range(a..=b).abs(),
                    Amplitude::Gaussian { sigma } => {
                        let g: f64 = StandardNormal.sample(&mut rng);
                        sigma * g
                    }
                };
                let v = match amplitude {
                    Amplitude::Gaussian { .. } => v,
                    _ if rng.random::<bool>() => v,
                    _ => -v,
                };
                if v.abs() >= MIN_MAGNITUDE {
                    break v;
                }
            };
        }
        Ok(SparseSignal { values, k })
    }

    pub fn p(&self) -> usize {
        self.values.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn support(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_k_sparse(&self) -> bool {
        self.support().len() <= self.k
    }
}

/// Noise regime for `z` in `y = F beta + z`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum NoiseSpec {
    Noiseless,
    /// `||z||_2 <= epsilon`.
    L2Bounded { epsilon: f64 },
    /// `||F^T z||_inf <= lambda`.
    CorrelationBounded { lambda: f64 },
    /// `z ~ N(0, sigma^2 I_n)`.
    Gaussian { sigma: f64 },
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        let (name, v) = match *self {
            NoiseSpec::Noiseless => return Ok(()),
            NoiseSpec::L2Bounded { epsilon } => ("epsilon", epsilon),
            NoiseSpec::CorrelationBounded { lambda } => ("lambda", lambda),
            NoiseSpec::Gaussian { sigma } => ("sigma", sigma),
        };
        if v >= 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("{name} = {v}")))
        }
    }

    /// Short label such as `l2_bounded:0.1`.
    pub fn label(&self) -> String {
        match *self {
            NoiseSpec::Noiseless => "noiseless".into(),
            NoiseSpec::L2Bounded { epsilon } => format!("l2_bounded:{epsilon}"),
            NoiseSpec::CorrelationBounded { lambda } => format!("correlation_bounded:{lambda}"),
            NoiseSpec::Gaussian { sigma } => format!("gaussian:{sigma}"),
        }
    }
}

impl std::str::FromStr for NoiseSpec {
    type Err = Error;

    /// Parses the [`NoiseSpec::label`] form.
    fn from_str(s: &str) -> Result<Self> {
        let (name, level) = match s.split_once(':') {
            Some((n, v)) => {
                let v: f64 = v.trim().parse().map_err(|_| Error::InvalidParameter(format!("noise level in `{s}`")))?;
                (n.trim(), Some(v))
            }
            None => (s.trim(), None),
        };
        let spec = match (name, level) {
            ("noiseless", None) => NoiseSpec::Noiseless,
            ("l2_bounded", Some(epsilon)) => NoiseSpec::L2Bounded { epsilon },
            ("correlation_bounded", Some(lambda)) => NoiseSpec::CorrelationBounded { lambda },
            ("gaussian", Some(sigma)) => NoiseSpec::Gaussian { sigma },
            _ => return Err(Error::UnknownId(s.to_string())),
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub y: Vec<f64>,
    pub realized_noise: Vec<f64>,
    pub seed: u64,
    pub noise_spec: NoiseSpec,
}

/// Shrinks `z` by a hair until `measure(z) <= bound`.
fn clamp_to(z: &mut [f64], bound: f64, measure: impl Fn(&[f64]) -> f64) {
    while measure(z) > bound {
        z.iter_mut().for_each(|x| *x *= 1.0 - 1e-15);
    }
}

/// Draws noise per `noise` and forms `y = F beta + z`.
pub fn observe(
    f: &SensingMatrix,
    beta: &SparseSignal,
    noise: &NoiseSpec,
    seed: u64,
) -> Result<Observation> {
    if f.p() != beta.p() {
        return Err(Error::DimensionMismatch {
            expected: f.p(),
            found: beta.p(),
        });
    }
    noise.validate()?;
    let n = f.n();
    let mut rng = seed::rng(seed);
    let gaussian = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
        (0..n).map(|_| StandardNormal.sample(rng)).collect()
    };
    let z: Vec<f64> = match *noise {
        NoiseSpec::Noiseless => vec![0.0; n],
        NoiseSpec::L2Bounded { epsilon } if epsilon == 0.0 => vec![0.0; n],
        NoiseSpec::L2Bounded { epsilon } => {
            let g = gaussian(&mut rng);
            let radius = rng.random::<f64>() * epsilon;
            let norm = norm2(&g);
            let mut z: Vec<f64> = if norm > 0.0 {
                g.iter().map(|x| x * radius / norm).collect()
            } else {
                vec![0.0; n]
            };
            clamp_to(&mut z, epsilon, norm2);
            z
        }
        NoiseSpec::CorrelationBounded { lambda } if lambda == 0.0 => vec![0.0; n],
        NoiseSpec::CorrelationBounded { lambda } => {
            let (g, corr) = loop {
                let g = gaussian(&mut rng);
                let corr = norm_inf(&f.apply_transpose(&g));
                if corr > 0.0 {
                    break (g, corr);
                }
            };
            let level = rng.random::<f64>() * lambda;
            let mut z: Vec<f64> = g.iter().map(|x| x * level / corr).collect();
            clamp_to(&mut z, lambda, |z| norm_inf(&f.apply_transpose(z)));
            z
        }
        NoiseSpec::Gaussian { sigma } => gaussian(&mut rng).into_iter().map(|x| sigma * x).collect(),
    };
    let clean = f.apply(beta.values());
    let y = clean.iter().zip(&z).map(|(a, b)| a + b).collect();
    Ok(Observation {
        y,
        realized_noise: z,
        seed,
        noise_spec: noise.clone(),
    })
}

/// Same as [`SensingMatrix::generate`].
pub fn generate_matrix(
    n: usize,
    p: usize,
    ensemble: &Ensemble,
    normalize: bool,
    seed: u64,
) -> Result<SensingMatrix> {
    SensingMatrix::generate(n, p, ensemble, normalize, seed)
}

/// Same as [`SparseSignal::generate`].
pub fn generate_signal(p: usize, k: usize, amplitude: &Amplitude, seed: u64) -> Result<SparseSignal> {
    SparseSignal::generate(p, k, amplitude, seed)
}

/// Splits `v` into its `k` largest-magnitude entries and the remainder.
/// Ties are broken by lowest index.
pub fn best_k_term(v: &[f64], k: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if k > v.len() {
        return Err(Error::InvalidSparsity { k, p: v.len() });
    }
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[b].abs().total_cmp(&v[a].abs()).then(a.cmp(&b)));
    let mut head = vec![0.0; v.len()];
    let mut rest = v.to_vec();
    for &i in &order[..k] {
        head[i] = v[i];
        rest[i] = 0.0;
    }
    Ok((head, rest))
}
