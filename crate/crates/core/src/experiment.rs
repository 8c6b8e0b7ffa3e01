//! Experiments: finite nonnegative matrices whose columns are distributions
//! over a shared outcome set, kept in a canonical row order.
//!
//! Two experiments that differ only by a row permutation or by all-zero rows
//! describe the same object, so every constructor removes zero rows and sorts
//! the remaining rows in descending lexicographic order. Equality is then a
//! plain comparison of the stored rows.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Default ceiling on the number of rows produced by [`Experiment::tensor_power`].
pub const DEFAULT_ROW_CAP: usize = 20_000;

/// Entries at or below this value count as outside a support.
pub const SUPPORT_FLOOR: f64 = 1e-300;

/// Relative tolerance used when grouping proportional rows in [`Experiment::lump`].
const LUMP_TOL: f64 = 1e-11;

#[inline]
pub(crate) fn positive(x: f64) -> bool {
    x > SUPPORT_FLOOR
}

/// A sorted set of indices (rows or columns, zero based).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn new(items: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = items.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        IndexSet(v)
    }

    /// `{0, …, len-1}`.
    pub fn full(len: usize) -> Self {
        IndexSet((0..len).collect())
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.0.iter().all(|&i| other.contains(i))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        IndexSet::new(self.iter().chain(other.iter()))
    }

    pub fn intersection(&self, other: &IndexSet) -> IndexSet {
        IndexSet(self.iter().filter(|&i| other.contains(i)).collect())
    }

    /// All subsets of `{0, …, len-1}`, in order of their bitmask.
    pub fn all_subsets(len: usize) -> impl Iterator<Item = IndexSet> {
        (0u64..(1u64 << len)).map(move |mask| IndexSet((0..len).filter(|&k| mask >> k & 1 == 1).collect()))
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, "}}")
    }
}

/// Support structure of an experiment, from most to least specific.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SupportRegime {
    /// Every column has the same support.
    EqualSupports,
    /// Two unit-norm columns with the first support inside the second.
    Dichotomy,
    /// The last column's support contains every other support.
    DominatingColumn,
    /// Some row is positive in every column.
    MinimalRestrictions,
    /// No row is positive in every column.
    Invalid,
}

impl SupportRegime {
    pub fn name(self) -> &'static str {
        match self {
            SupportRegime::EqualSupports => "EqualSupports",
            SupportRegime::Dichotomy => "Dichotomy",
            SupportRegime::DominatingColumn => "DominatingColumn",
            SupportRegime::MinimalRestrictions => "MinimalRestrictions",
            SupportRegime::Invalid => "Invalid",
        }
    }
}

impl fmt::Display for SupportRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A canonical n×d nonnegative matrix, stored row major.
#[derive(Clone, Debug)]
pub struct Experiment {
    cols: usize,
    data: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl PartialEq for Experiment {
    fn eq(&self, other: &Self) -> bool {
        self.cols == other.cols && self.data == other.data
    }
}

/// Result of merging proportional rows.
#[derive(Clone, Debug)]
pub struct Lumping {
    /// The merged experiment.
    pub reduced: Experiment,
    /// Row of `reduced` that each original row was merged into.
    pub group_of: Vec<usize>,
    /// Fraction of the merged row's mass carried by each original row.
    pub share: Vec<f64>,
}

fn cmp_rows_desc(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match y.total_cmp(x) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Drops zero rows and sorts the rest. Returns the canonical data and, for
/// each input row, its index in the output (`None` for dropped rows).
fn canonicalize(cols: usize, data: &[f64]) -> (Vec<f64>, Vec<Option<usize>>) {
    let n = data.len().checked_div(cols).unwrap_or(0);
    let mut order: Vec<usize> = (0..n)
        .filter(|&i| data[i * cols..(i + 1) * cols].iter().any(|&x| x != 0.0))
        .collect();
    order.sort_by(|&a, &b| cmp_rows_desc(&data[a * cols..(a + 1) * cols], &data[b * cols..(b + 1) * cols]));
    let mut out = Vec::with_capacity(order.len() * cols);
    let mut position = vec![None; n];
    for (new, &old) in order.iter().enumerate() {
        out.extend_from_slice(&data[old * cols..(old + 1) * cols]);
        position[old] = Some(new);
    }
    (out, position)
}

fn validate(cols: usize, data: &mut [f64]) -> Result<()> {
    if cols == 0 {
        return Err(Error::NoColumns);
    }
    for (idx, x) in data.iter_mut().enumerate() {
        let (row, column) = (idx / cols, idx % cols);
        if !x.is_finite() {
            return Err(Error::NonFinite { row, column });
        }
        if *x < 0.0 {
            return Err(Error::NegativeEntry { row, column, value: *x });
        }
        // normalise -0.0 so that bitwise comparisons are meaningful
        if *x == 0.0 {
            *x = 0.0;
        }
    }
    Ok(())
}

impl Experiment {
    /// Builds an experiment from its columns.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let d = columns.len();
        if d == 0 {
            return Err(Error::NoColumns);
        }
        let n = columns[0].len();
        for (k, c) in columns.iter().enumerate() {
            if c.len() != n {
                return Err(Error::RaggedColumns { column: k, expected: n, found: c.len() });
            }
        }
        let mut data = Vec::with_capacity(n * d);
        for i in 0..n {
            data.extend(columns.iter().map(|c| c[i]));
        }
        Self::from_row_major(d, data)
    }

    /// Builds an experiment from rows of length `cols`.
    pub fn from_rows(cols: usize, rows: &[Vec<f64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::LengthMismatch { left: cols, right: r.len() });
            }
            data.extend_from_slice(r);
        }
        Self::from_row_major(cols, data)
    }

    /// Builds an experiment from row-major data with `cols` columns.
    pub fn from_row_major(cols: usize, mut data: Vec<f64>) -> Result<Self> {
        validate(cols, &mut data)?;
        if !data.len().is_multiple_of(cols) {
            return Err(Error::Parse(format!("{} entries do not fill rows of width {cols}", data.len())));
        }
        Ok(Self::from_valid(cols, &data))
    }

    fn from_valid(cols: usize, data: &[f64]) -> Self {
        let (data, _) = canonicalize(cols, data);
        Experiment { cols, data, labels: None }
    }

    /// The zero experiment with `cols` columns (no rows).
    pub fn zero(cols: usize) -> Self {
        Experiment { cols, data: Vec::new(), labels: None }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.cols {
            return Err(Error::LengthMismatch { left: self.cols, right: labels.len() });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn n_rows(&self) -> usize {
        self.data.len() / self.cols
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.cols)
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.rows().map(|r| r[k]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.cols).map(|k| self.column(k)).collect()
    }

    /// Row-major entries.
    pub fn as_row_major(&self) -> &[f64] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.is_empty()
    }

    pub fn column_norms(&self) -> Vec<f64> {
        (0..self.cols).map(|k| self.rows().map(|r| r[k]).sum()).collect()
    }

    /// True if every column sums to one within `tol`.
    pub fn is_unit_norm(&self, tol: f64) -> bool {
        self.column_norms().iter().all(|s| (s - 1.0).abs() <= tol)
    }

    /// Errors with the first column whose norm is off by more than `tol`.
    pub fn require_unit_norm(&self, tol: f64) -> Result<()> {
        match self.column_norms().iter().enumerate().find(|(_, s)| (*s - 1.0).abs() > tol) {
            Some((column, &norm)) => Err(Error::NotUnitNorm { column, norm }),
            None => Ok(()),
        }
    }

    /// Rows where column `k` is positive.
    pub fn support(&self, k: usize) -> IndexSet {
        IndexSet(self.rows().enumerate().filter(|(_, r)| positive(r[k])).map(|(i, _)| i).collect())
    }

    /// Rows positive in every column of `character`.
    pub fn common_support(&self, character: &IndexSet) -> IndexSet {
        IndexSet(
            self.rows()
                .enumerate()
                .filter(|(_, r)| character.iter().all(|k| positive(r[k])))
                .map(|(i, _)| i)
                .collect(),
        )
    }

    /// Direct sum: rows of `self` stacked on rows of `other`.
    pub fn box_plus(&self, other: &Experiment) -> Result<Experiment> {
        self.same_width(other)?;
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Experiment { labels: self.labels.clone(), ..Self::from_valid(self.cols, &data) })
    }

    /// Column-wise Kronecker product.
    pub fn box_times(&self, other: &Experiment) -> Result<Experiment> {
        self.same_width(other)?;
        let d = self.cols;
        let mut data = Vec::with_capacity(self.data.len() * other.n_rows());
        for a in self.rows() {
            for b in other.rows() {
                data.extend(a.iter().zip(b).map(|(x, y)| x * y));
            }
        }
        Ok(Experiment { labels: self.labels.clone(), ..Self::from_valid(d, &data) })
    }

    /// `self ⊠ … ⊠ self` (`m` factors); `m = 0` gives the one-row experiment of ones.
    pub fn tensor_power(&self, m: u32, row_cap: usize) -> Result<Experiment> {
        let rows = (self.n_rows() as u128).checked_pow(m).unwrap_or(u128::MAX);
        if rows > row_cap as u128 {
            return Err(Error::RowCapExceeded { rows, cap: row_cap });
        }
        let mut acc = Self::unit(self.cols);
        for _ in 0..m {
            acc = acc.box_times(self)?;
        }
        acc.labels = self.labels.clone();
        Ok(acc)
    }

    /// The one-row experiment `(1, …, 1)`, the multiplicative identity.
    pub fn unit(cols: usize) -> Experiment {
        Experiment { cols, data: vec![1.0; cols], labels: None }
    }

    /// Multiplies every entry by `c ≥ 0`.
    pub fn scaled(&self, c: f64) -> Result<Experiment> {
        let data: Vec<f64> = self.data.iter().map(|x| x * c).collect();
        let mut e = Self::from_row_major(self.cols, data)?;
        e.labels = self.labels.clone();
        Ok(e)
    }

    /// Divides each nonzero column by its norm.
    pub fn normalized(&self) -> Experiment {
        let norms = self.column_norms();
        let data: Vec<f64> = self
            .data
            .iter()
            .enumerate()
            .map(|(idx, x)| {
                let s = norms[idx % self.cols];
                if s > 0.0 { x / s } else { *x }
            })
            .collect();
        Experiment { labels: self.labels.clone(), ..Self::from_valid(self.cols, &data) }
    }

    /// Keeps only the rows in `rows`; the rest are treated as zero.
    pub fn restrict(&self, rows: &IndexSet) -> Experiment {
        let data: Vec<f64> = rows.iter().filter(|&i| i < self.n_rows()).flat_map(|i| self.row(i).to_vec()).collect();
        Experiment { labels: self.labels.clone(), ..Self::from_valid(self.cols, &data) }
    }

    /// Selects and reorders columns.
    pub fn select_columns(&self, columns: &[usize]) -> Result<Experiment> {
        if let Some(&bad) = columns.iter().find(|&&k| k >= self.cols) {
            return Err(Error::InvalidParameter(format!("column {bad} out of range")));
        }
        if columns.is_empty() {
            return Err(Error::NoColumns);
        }
        let data: Vec<f64> = self.rows().flat_map(|r| columns.iter().map(|&k| r[k]).collect::<Vec<_>>()).collect();
        Ok(Self::from_valid(columns.len(), &data))
    }

    fn same_width(&self, other: &Experiment) -> Result<()> {
        if self.cols != other.cols {
            return Err(Error::ColumnCountMismatch { left: self.cols, right: other.cols });
        }
        Ok(())
    }

    /// True when some row is positive in every column, or the experiment is zero.
    pub fn in_semiring(&self) -> bool {
        self.is_zero() || !self.common_support(&IndexSet::full(self.cols)).is_empty()
    }

    /// Every support lies inside the last column's support.
    pub fn has_dominating_column(&self) -> bool {
        let last = self.cols - 1;
        self.rows().all(|r| positive(r[last]) || r.iter().all(|&x| !positive(x)))
    }

    pub fn has_equal_supports(&self) -> bool {
        self.rows().all(|r| r.iter().all(|&x| positive(x)) || r.iter().all(|&x| !positive(x)))
    }

    /// Two unit-norm columns (within `1e-9`) with a dominating second column.
    pub fn is_dichotomy(&self) -> bool {
        self.cols == 2 && self.in_semiring() && self.has_dominating_column() && self.is_unit_norm(1e-9)
    }

    /// The most specific regime that applies.
    pub fn classify_regime(&self) -> SupportRegime {
        if !self.in_semiring() {
            SupportRegime::Invalid
        } else if self.has_equal_supports() {
            SupportRegime::EqualSupports
        } else if self.is_dichotomy() {
            SupportRegime::Dichotomy
        } else if self.has_dominating_column() {
            SupportRegime::DominatingColumn
        } else {
            SupportRegime::MinimalRestrictions
        }
    }

    /// Merges rows that are positive multiples of each other.
    ///
    /// The result is equivalent to `self` under majorization in both
    /// directions, and usually much smaller for tensor powers.
    pub fn lump(&self) -> Lumping {
        let d = self.cols;
        let n = self.n_rows();
        let keys: Vec<Vec<f64>> = self
            .rows()
            .map(|r| {
                let s: f64 = r.iter().sum();
                r.iter().map(|x| x / s).collect()
            })
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| cmp_rows_desc(&keys[a], &keys[b]));

        let close = |a: &[f64], b: &[f64]| {
            a.iter().zip(b).all(|(x, y)| {
                (positive(*x) == positive(*y)) && (x - y).abs() <= LUMP_TOL * x.abs().max(y.abs())
            })
        };

        let mut raw_group = vec![0usize; n];
        let mut sums: Vec<Vec<f64>> = Vec::new();
        let mut rep: Option<usize> = None;
        for &i in &order {
            match rep {
                Some(r) if close(&keys[r], &keys[i]) => {}
                _ => {
                    rep = Some(i);
                    sums.push(vec![0.0; d]);
                }
            }
            let g = sums.len() - 1;
            raw_group[i] = g;
            for (s, x) in sums[g].iter_mut().zip(self.row(i)) {
                *s += x;
            }
        }
        let flat: Vec<f64> = sums.iter().flatten().copied().collect();
        let (data, position) = canonicalize(d, &flat);
        let group_of: Vec<usize> = raw_group.iter().map(|&g| position[g].expect("merged rows are nonzero")).collect();
        let share = (0..n)
            .map(|i| {
                let total: f64 = sums[raw_group[i]].iter().sum();
                self.row(i).iter().sum::<f64>() / total
            })
            .collect();
        Lumping { reduced: Experiment { cols: d, data, labels: self.labels.clone() }, group_of, share }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in self.rows() {
            let cells: Vec<String> = r.iter().map(|x| format!("{x:.6}")).collect();
            writeln!(f, "{}", cells.join("  "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp(cols: &[&[f64]]) -> Experiment {
        Experiment::from_columns(&cols.iter().map(|c| c.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn canonical_form_drops_zero_rows_and_sorts() {
        let p = exp(&[&[0.0, 0.2, 0.0, 0.8], &[0.0, 0.5, 0.0, 0.5]]);
        assert_eq!(p.n_rows(), 2);
        assert_eq!(p.row(0), &[0.8, 0.5]);
        assert_eq!(p.row(1), &[0.2, 0.5]);
    }

    #[test]
    fn permuted_rows_compare_equal() {
        let a = exp(&[&[0.1, 0.9], &[0.3, 0.7]]);
        let b = exp(&[&[0.9, 0.1], &[0.7, 0.3]]);
        assert_eq!(a, b);
    }

    #[test]
    fn negative_entries_rejected() {
        let err = Experiment::from_columns(&[vec![0.5, -0.1]]).unwrap_err();
        assert!(matches!(err, Error::NegativeEntry { row: 1, column: 0, .. }));
        assert!(Experiment::from_columns(&[vec![f64::NAN]]).is_err());
        assert!(matches!(
            Experiment::from_columns(&[vec![1.0], vec![0.5, 0.5]]),
            Err(Error::RaggedColumns { .. })
        ));
    }

    #[test]
    fn zero_is_additive_identity() {
        let p = exp(&[&[0.3, 0.7], &[0.6, 0.4]]);
        let z = Experiment::from_columns(&[vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert!(z.is_zero());
        assert_eq!(p.box_plus(&z).unwrap(), p);
        assert_eq!(p.box_times(&Experiment::unit(2)).unwrap(), p);
    }

    #[test]
    fn kronecker_rows() {
        let p = exp(&[&[0.5, 0.5], &[1.0, 0.0]]);
        let pp = p.box_times(&p).unwrap();
        assert_eq!(pp.n_rows(), 4);
        assert_eq!(pp.column_norms(), vec![1.0, 1.0]);
        assert_eq!(pp.row(0), &[0.25, 1.0]);
    }

    #[test]
    fn tensor_power_cap() {
        let p = exp(&[&[0.5, 0.5], &[0.5, 0.5]]);
        assert_eq!(p.tensor_power(3, DEFAULT_ROW_CAP).unwrap().n_rows(), 8);
        assert!(matches!(p.tensor_power(15, DEFAULT_ROW_CAP), Err(Error::RowCapExceeded { .. })));
        assert_eq!(p.tensor_power(0, 10).unwrap(), Experiment::unit(2));
    }

    #[test]
    fn regimes() {
        let full = exp(&[&[0.5, 0.5], &[0.5, 0.5]]);
        assert_eq!(full.classify_regime(), SupportRegime::EqualSupports);
        let dich = exp(&[&[1.0, 0.0], &[0.5, 0.5]]);
        assert_eq!(dich.classify_regime(), SupportRegime::Dichotomy);
        let dc = exp(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.4, 0.3, 0.3]]);
        assert_eq!(dc.classify_regime(), SupportRegime::Invalid);
        let dc = exp(&[&[0.5, 0.5, 0.0], &[0.5, 0.0, 0.5], &[0.4, 0.3, 0.3]]);
        assert_eq!(dc.classify_regime(), SupportRegime::DominatingColumn);
        let min = exp(&[&[0.5, 0.5, 0.0], &[0.5, 0.0, 0.5]]);
        assert_eq!(min.classify_regime(), SupportRegime::MinimalRestrictions);
        let bad = exp(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(bad.classify_regime(), SupportRegime::Invalid);
        let unnormed = exp(&[&[2.0, 0.0], &[1.0, 1.0]]);
        assert_eq!(unnormed.classify_regime(), SupportRegime::DominatingColumn);
    }

    #[test]
    fn restrict_keeps_selected_rows() {
        let p = exp(&[&[0.5, 0.3, 0.2], &[0.2, 0.3, 0.5]]);
        let r = p.restrict(&IndexSet::new([0, 2]));
        assert_eq!(r.n_rows(), 2);
        assert_eq!(r.row(0), p.row(0));
        assert_eq!(r.row(1), p.row(2));
    }

    #[test]
    fn lumping_merges_proportional_rows() {
        let p = exp(&[&[0.6, 0.4], &[0.3, 0.7]]).tensor_power(4, DEFAULT_ROW_CAP).unwrap();
        let l = p.lump();
        assert_eq!(l.reduced.n_rows(), 5);
        for (i, r) in p.rows().enumerate() {
            let g = l.reduced.row(l.group_of[i]);
            for (x, y) in r.iter().zip(g) {
                assert!((x - l.share[i] * y).abs() < 1e-15);
            }
        }
        let norms = l.reduced.column_norms();
        assert!((norms[0] - 1.0).abs() < 1e-14 && (norms[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn lumping_respects_zero_pattern() {
        let p = exp(&[&[1.0, 1e-20], &[1.0, 0.0]]);
        assert_eq!(p.lump().reduced.n_rows(), 2);
    }
}
