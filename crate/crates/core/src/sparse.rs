//! Sparse labelled datasets with simultaneous row and column access, LIBSVM
//! text I/O, and a delta overlay that applies cell edits without rebuilding
//! the matrix.
//!
//! The signed matrix `Z = diag(y) X` is never stored: every access to
//! `z_ij` is `y_i * x_ij`.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::iter::{Copied, Peekable, Zip};
use std::slice;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sparse data matrix `X` (n x d) with labels `y` in {-1, +1}.
///
/// Stored twice, once compressed by row and once by column; both views hold
/// exactly the same nonzeros. No stored value is zero and indices are strictly
/// increasing inside each row and column.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseDataset<F> {
    n: usize,
    d: usize,
    labels: Vec<i8>,
    row_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    row_val: Vec<F>,
    col_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    col_val: Vec<F>,
}

impl<F: Scalar> SparseDataset<F> {
    /// Builds a dataset from per-row `(column, value)` lists.
    ///
    /// Explicit zeros are dropped. Column indices must be strictly increasing
    /// and below `d`; labels must be -1 or +1.
    pub fn from_rows(d: usize, rows: Vec<Vec<(usize, F)>>, labels: Vec<i8>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                what: "labels",
                expected: rows.len(),
                found: labels.len(),
            });
        }
        if let Some(bad) = labels.iter().find(|&&y| y != 1 && y != -1) {
            return Err(Error::InvalidArgument(format!("label {bad} is not -1 or +1")));
        }
        let n = rows.len();
        let nnz: usize = rows.iter().map(Vec::len).sum();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut row_idx = Vec::with_capacity(nnz);
        let mut row_val = Vec::with_capacity(nnz);
        let mut col_counts = vec![0usize; d];
        row_ptr.push(0);
        for (i, row) in rows.iter().enumerate() {
            let mut prev: Option<usize> = None;
            for &(j, v) in row {
                if j >= d {
                    return Err(Error::IndexOutOfRange { row: i, col: j, n, d });
                }
                if prev.is_some_and(|p| j <= p) {
                    return Err(Error::InvalidArgument(format!(
                        "row {i}: column indices not strictly increasing at {j}"
                    )));
                }
                prev = Some(j);
                if v == F::zero() {
                    continue;
                }
                row_idx.push(j);
                row_val.push(v);
                col_counts[j] += 1;
            }
            row_ptr.push(row_idx.len());
        }

        let mut col_ptr = Vec::with_capacity(d + 1);
        col_ptr.push(0);
        for c in &col_counts {
            col_ptr.push(col_ptr.last().unwrap() + c);
        }
        let stored = row_idx.len();
        let mut col_idx = vec![0usize; stored];
        let mut col_val = vec![F::zero(); stored];
        let mut cursor = col_ptr[..d].to_vec();
        for i in 0..n {
            for k in row_ptr[i]..row_ptr[i + 1] {
                let j = row_idx[k];
                col_idx[cursor[j]] = i;
                col_val[cursor[j]] = row_val[k];
                cursor[j] += 1;
            }
        }

        Ok(Self {
            n,
            d,
            labels,
            row_ptr,
            row_idx,
            row_val,
            col_ptr,
            col_idx,
            col_val,
        })
    }

    /// An empty 0 x 0 dataset.
    pub fn empty() -> Self {
        Self::from_rows(0, Vec::new(), Vec::new()).expect("empty dataset is valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn nnz(&self) -> usize {
        self.row_idx.len()
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    /// Label of row `i` as a scalar (+1 or -1).
    #[inline]
    pub fn label(&self, i: usize) -> F {
        if self.labels[i] > 0 {
            F::one()
        } else {
            -F::one()
        }
    }

    /// Column indices and values of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[F]) {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.row_idx[a..b], &self.row_val[a..b])
    }

    /// Row indices and values of column `j`.
    #[inline]
    pub fn col(&self, j: usize) -> (&[usize], &[F]) {
        let (a, b) = (self.col_ptr[j], self.col_ptr[j + 1]);
        (&self.col_idx[a..b], &self.col_val[a..b])
    }

    pub fn row_iter(&self, i: usize) -> impl Iterator<Item = (usize, F)> + '_ {
        let (idx, val) = self.row(i);
        idx.iter().copied().zip(val.iter().copied())
    }

    pub fn col_iter(&self, j: usize) -> impl Iterator<Item = (usize, F)> + '_ {
        let (idx, val) = self.col(j);
        idx.iter().copied().zip(val.iter().copied())
    }

    /// Stored value of cell `(i, j)`, zero when structurally absent.
    pub fn get(&self, i: usize, j: usize) -> F {
        let (idx, val) = self.row(i);
        match idx.binary_search(&j) {
            Ok(k) => val[k],
            Err(_) => F::zero(),
        }
    }

    /// Inner product `z_i^T w` of the signed row `i` with a dense vector.
    pub fn row_dot_signed(&self, i: usize, w: &[F]) -> F {
        let (idx, val) = self.row(i);
        let s: F = idx.iter().zip(val).map(|(&j, &v)| v * w[j]).sum();
        self.label(i) * s
    }

    /// Inner product `z_j^T a` of the signed column `j` with a dense vector.
    pub fn col_dot_signed(&self, j: usize, a: &[F]) -> F {
        let (idx, val) = self.col(j);
        idx.iter()
            .zip(val)
            .map(|(&i, &v)| self.label(i) * v * a[i])
            .sum()
    }

    pub fn row_sq_norm(&self, i: usize) -> F {
        self.row(i).1.iter().map(|&v| v * v).sum()
    }

    pub fn col_sq_norm(&self, j: usize) -> F {
        self.col(j).1.iter().map(|&v| v * v).sum()
    }

    /// Per-row `(column, value)` lists, the inverse of [`Self::from_rows`].
    pub fn to_rows(&self) -> Vec<Vec<(usize, F)>> {
        (0..self.n).map(|i| self.row_iter(i).collect()).collect()
    }

    /// Same data with a wider column space. Fails if `d` is smaller than the
    /// current column count.
    pub fn with_dim(self, d: usize) -> Result<Self> {
        if d < self.d {
            return Err(Error::DimensionMismatch {
                what: "column count",
                expected: self.d,
                found: d,
            });
        }
        if d == self.d {
            return Ok(self);
        }
        let labels = self.labels.clone();
        Self::from_rows(d, self.to_rows(), labels)
    }

    /// New dataset holding rows `indices` in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let rows = indices.iter().map(|&i| self.row_iter(i).collect()).collect();
        let labels = indices.iter().map(|&i| self.labels[i]).collect();
        Self::from_rows(self.d, rows, labels).expect("row subset of a valid dataset")
    }

    /// Per-column `(min, max)` over stored nonzero values; `(0, 0)` for an
    /// empty column.
    pub fn col_value_ranges(&self) -> Vec<(F, F)> {
        (0..self.d)
            .map(|j| {
                let vals = self.col(j).1;
                if vals.is_empty() {
                    return (F::zero(), F::zero());
                }
                vals.iter()
                    .fold((F::infinity(), F::neg_infinity()), |(lo, hi), &v| {
                        (lo.min(v), hi.max(v))
                    })
            })
            .collect()
    }

    /// Checks that the row and column views store the same cells.
    pub fn views_consistent(&self) -> bool {
        let mut from_rows: Vec<(usize, usize, F)> = Vec::with_capacity(self.nnz());
        for i in 0..self.n {
            from_rows.extend(self.row_iter(i).map(|(j, v)| (i, j, v)));
        }
        let mut from_cols: Vec<(usize, usize, F)> = Vec::with_capacity(self.nnz());
        for j in 0..self.d {
            from_cols.extend(self.col_iter(j).map(|(i, v)| (i, j, v)));
        }
        from_cols.sort_by_key(|&(i, j, _)| (i, j));
        from_rows == from_cols
    }
}

/// Parses LIBSVM text: `<label> <idx>:<val> ...` per line, 1-based strictly
/// increasing indices. Positive labels map to +1, everything else to -1.
/// Blank lines and `#` comments are ignored.
pub fn parse_libsvm<F: Scalar, R: BufRead>(reader: R) -> Result<SparseDataset<F>> {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut d = 0usize;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            line: lineno,
            message,
        };
        let mut tokens = content.split_whitespace();
        let label_tok = tokens.next().expect("nonempty line has a token");
        let label: f64 = label_tok
            .parse()
            .map_err(|_| parse_err(format!("bad label `{label_tok}`")))?;
        labels.push(if label > 0.0 { 1 } else { -1 });

        let mut row = Vec::new();
        let mut prev = 0usize;
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| parse_err(format!("expected idx:val, got `{tok}`")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| parse_err(format!("bad index `{idx}`")))?;
            if idx == 0 {
                return Err(parse_err("indices are 1-based".into()));
            }
            if idx <= prev {
                return Err(parse_err(format!(
                    "index {idx} does not increase past {prev}"
                )));
            }
            prev = idx;
            let val: F = val
                .parse()
                .map_err(|_| parse_err(format!("bad value `{val}`")))?;
            if !val.is_finite() {
                return Err(parse_err(format!("non-finite value `{val}`")));
            }
            row.push((idx - 1, val));
        }
        d = d.max(prev);
        rows.push(row);
    }
    SparseDataset::from_rows(d, rows, labels)
}

/// Writes LIBSVM text that [`parse_libsvm`] reads back cell-identically.
pub fn write_libsvm<F: Scalar, W: Write>(ds: &SparseDataset<F>, mut out: W) -> Result<()> {
    for i in 0..ds.n() {
        write!(out, "{}", if ds.labels()[i] > 0 { "+1" } else { "-1" })?;
        for (j, v) in ds.row_iter(i) {
            write!(out, " {}:{}", j + 1, v)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Scales every nonzero row to unit L2 norm; all-zero rows are unchanged.
pub fn normalize_rows<F: Scalar>(ds: &SparseDataset<F>) -> SparseDataset<F> {
    let rows = (0..ds.n())
        .map(|i| {
            let norm = ds.row_sq_norm(i).sqrt();
            if norm == F::zero() {
                Vec::new()
            } else {
                ds.row_iter(i).map(|(j, v)| (j, v / norm)).collect()
            }
        })
        .collect();
    SparseDataset::from_rows(ds.d(), rows, ds.labels().to_vec()).expect("scaled rows stay valid")
}

/// Row indices of a seeded shuffle split: the first `ceil(fraction * n)`
/// shuffled indices train, the rest test.
pub fn split_indices(n: usize, train_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "train fraction {train_fraction} not in (0, 1)"
        )));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_train = ((train_fraction * n as f64).ceil() as usize).min(n);
    let test = perm.split_off(n_train);
    Ok((perm, test))
}

/// Deterministic train/test split; both halves keep the column count.
pub fn split_train_test<F: Scalar>(
    ds: &SparseDataset<F>,
    train_fraction: f64,
    seed: u64,
) -> Result<(SparseDataset<F>, SparseDataset<F>)> {
    let (train, test) = split_indices(ds.n(), train_fraction, seed)?;
    Ok((ds.select_rows(&train), ds.select_rows(&test)))
}

/// Set of cell edits `(row, col) -> new value`.
///
/// New values may be zero or land on structurally zero cells. Later edits
/// to the same cell replace earlier ones.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModificationSet<F> {
    edits: BTreeMap<(usize, usize), F>,
    by_row: BTreeMap<usize, Vec<(usize, F)>>,
    by_col: BTreeMap<usize, Vec<(usize, F)>>,
}

/// One serialized cell edit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edit<F> {
    pub i: usize,
    pub j: usize,
    pub v: F,
}

impl<F: Scalar> ModificationSet<F> {
    pub fn new<I: IntoIterator<Item = (usize, usize, F)>>(edits: I) -> Self {
        let edits: BTreeMap<(usize, usize), F> =
            edits.into_iter().map(|(i, j, v)| ((i, j), v)).collect();
        let mut by_row: BTreeMap<usize, Vec<(usize, F)>> = BTreeMap::new();
        let mut by_col: BTreeMap<usize, Vec<(usize, F)>> = BTreeMap::new();
        // BTreeMap order is (row, col), so row lists come out sorted by column
        // and column lists sorted by row.
        for (&(i, j), &v) in &edits {
            by_row.entry(i).or_default().push((j, v));
            by_col.entry(j).or_default().push((i, v));
        }
        Self {
            edits,
            by_row,
            by_col,
        }
    }

    pub fn len(&self) -> usize {
        self.edits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edits.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> Option<F> {
        self.edits.get(&(i, j)).copied()
    }

    /// Edits in `(row, col)` order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, F)> + '_ {
        self.edits.iter().map(|(&(i, j), &v)| (i, j, v))
    }

    /// Touched rows, ascending.
    pub fn rows(&self) -> impl Iterator<Item = usize> + '_ {
        self.by_row.keys().copied()
    }

    /// Touched columns, ascending.
    pub fn cols(&self) -> impl Iterator<Item = usize> + '_ {
        self.by_col.keys().copied()
    }

    pub fn touched_rows(&self) -> Vec<usize> {
        self.rows().collect()
    }

    pub fn touched_cols(&self) -> Vec<usize> {
        self.cols().collect()
    }

    pub fn n_rows(&self) -> usize {
        self.by_row.len()
    }

    pub fn n_cols(&self) -> usize {
        self.by_col.len()
    }

    /// Edits of row `i` sorted by column.
    pub fn row_edits(&self, i: usize) -> &[(usize, F)] {
        self.by_row.get(&i).map_or(&[], Vec::as_slice)
    }

    /// Edits of column `j` sorted by row.
    pub fn col_edits(&self, j: usize) -> &[(usize, F)] {
        self.by_col.get(&j).map_or(&[], Vec::as_slice)
    }

    /// Checks every edit against an `n x d` matrix.
    pub fn validate(&self, n: usize, d: usize) -> Result<()> {
        match self.edits.keys().find(|&&(i, j)| i >= n || j >= d) {
            Some(&(row, col)) => Err(Error::IndexOutOfRange { row, col, n, d }),
            None => Ok(()),
        }
    }

    pub fn to_edits(&self) -> Vec<Edit<F>> {
        self.iter().map(|(i, j, v)| Edit { i, j, v }).collect()
    }

    /// JSON array of `{"i": .., "j": .., "v": ..}` objects.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_edits())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let edits: Vec<Edit<F>> = serde_json::from_str(text)?;
        Ok(Self::new(edits.into_iter().map(|e| (e.i, e.j, e.v))))
    }
}

/// Read-only view of `X~`: the base dataset with a modification set laid
/// over it.
#[derive(Debug, Clone, Copy)]
pub struct OverlayView<'a, F> {
    base: &'a SparseDataset<F>,
    delta: &'a ModificationSet<F>,
}

type EntryIter<'a, F> = Zip<Copied<slice::Iter<'a, usize>>, Copied<slice::Iter<'a, F>>>;

/// Merges a base row/column with its sorted edits, yielding each index once
/// in order and skipping zeros.
pub struct Merged<'a, F: Copy> {
    base: Peekable<EntryIter<'a, F>>,
    edits: Peekable<slice::Iter<'a, (usize, F)>>,
}

impl<F: Scalar> Iterator for Merged<'_, F> {
    type Item = (usize, F);

    fn next(&mut self) -> Option<(usize, F)> {
        loop {
            let item = match (self.base.peek(), self.edits.peek()) {
                (None, None) => return None,
                (Some(_), None) => self.base.next().unwrap(),
                (None, Some(_)) => *self.edits.next().unwrap(),
                (Some(&(bi, _)), Some(&&(ei, _))) => {
                    if bi < ei {
                        self.base.next().unwrap()
                    } else {
                        if bi == ei {
                            self.base.next();
                        }
                        *self.edits.next().unwrap()
                    }
                }
            };
            if item.1 != F::zero() {
                return Some(item);
            }
        }
    }
}

impl<'a, F: Scalar> OverlayView<'a, F> {
    pub fn new(base: &'a SparseDataset<F>, delta: &'a ModificationSet<F>) -> Result<Self> {
        delta.validate(base.n(), base.d())?;
        Ok(Self { base, delta })
    }

    pub fn base(&self) -> &'a SparseDataset<F> {
        self.base
    }

    pub fn delta(&self) -> &'a ModificationSet<F> {
        self.delta
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn d(&self) -> usize {
        self.base.d()
    }

    #[inline]
    pub fn label(&self, i: usize) -> F {
        self.base.label(i)
    }

    /// Value of `x~_ij`.
    pub fn value(&self, i: usize, j: usize) -> F {
        self.delta.get(i, j).unwrap_or_else(|| self.base.get(i, j))
    }

    /// Nonzeros of row `i` of `X~` in column order.
    pub fn row(&self, i: usize) -> Merged<'a, F> {
        let (idx, val) = self.base.row(i);
        Merged {
            base: idx.iter().copied().zip(val.iter().copied()).peekable(),
            edits: self.delta.row_edits(i).iter().peekable(),
        }
    }

    /// Nonzeros of column `j` of `X~` in row order.
    pub fn col(&self, j: usize) -> Merged<'a, F> {
        let (idx, val) = self.base.col(j);
        Merged {
            base: idx.iter().copied().zip(val.iter().copied()).peekable(),
            edits: self.delta.col_edits(j).iter().peekable(),
        }
    }

    /// Builds `X~` as a standalone dataset.
    pub fn materialize(&self) -> SparseDataset<F> {
        let rows = (0..self.n()).map(|i| self.row(i).collect()).collect();
        SparseDataset::from_rows(self.d(), rows, self.base.labels().to_vec())
            .expect("overlay of a valid dataset is valid")
    }
}

/// Materializes `X~`; used by oracles and when committing a retrain.
pub fn apply_modifications<F: Scalar>(
    ds: &SparseDataset<F>,
    mods: &ModificationSet<F>,
) -> Result<SparseDataset<F>> {
    Ok(OverlayView::new(ds, mods)?.materialize())
}
