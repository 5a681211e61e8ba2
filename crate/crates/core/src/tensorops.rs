//! Sparse operators on tensor powers `V^{⊗n}`.
//!
//! Multi-indices are flattened row-major with leg 1 most significant. Legs are numbered from 1,
//! basis indices inside a leg from 0 (the JSON format shifts them to 1-based).

use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalars::Field;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TensorOperator<S> {
    dim: usize,
    legs: usize,
    rows: Vec<Vec<(u32, S)>>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct OperatorJson {
    dim_v: usize,
    legs: usize,
    entries: Vec<EntryJson>,
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    row: Vec<usize>,
    col: Vec<usize>,
    value: String,
}

fn power(dim: usize, legs: usize) -> usize {
    dim.pow(legs as u32)
}

fn normalize_row<S: Field>(row: &mut Vec<(u32, S)>) {
    row.sort_by_key(|e| e.0);
    let mut out: Vec<(u32, S)> = Vec::with_capacity(row.len());
    for (c, v) in row.drain(..) {
        match out.last_mut() {
            Some((lc, lv)) if *lc == c => *lv += v,
            _ => out.push((c, v)),
        }
    }
    out.retain(|e| !e.1.is_zero());
    *row = out;
}

impl<S: Field> TensorOperator<S> {
    pub fn zero(dim: usize, legs: usize) -> Self {
        TensorOperator {
            dim,
            legs,
            rows: vec![Vec::new(); power(dim, legs)],
        }
    }

    pub fn scalar_identity(dim: usize, legs: usize, s: S) -> Self {
        let size = power(dim, legs);
        let rows = if s.is_zero() {
            vec![Vec::new(); size]
        } else {
            (0..size).map(|i| vec![(i as u32, s.clone())]).collect()
        };
        TensorOperator { dim, legs, rows }
    }

    pub fn identity(dim: usize, legs: usize) -> Self {
        Self::scalar_identity(dim, legs, S::one())
    }

    /// Builds an operator from `(row, col, value)` triples; duplicates are summed, zeros dropped.
    pub fn from_entries(
        dim: usize,
        legs: usize,
        entries: impl IntoIterator<Item = (usize, usize, S)>,
    ) -> Self {
        let size = power(dim, legs);
        let mut rows: Vec<Vec<(u32, S)>> = vec![Vec::new(); size];
        for (r, c, v) in entries {
            assert!(r < size && c < size, "index out of range");
            rows[r].push((c as u32, v));
        }
        for row in rows.iter_mut() {
            normalize_row(row);
        }
        TensorOperator { dim, legs, rows }
    }

    pub fn from_dense(dim: usize, legs: usize, m: &[Vec<S>]) -> Self {
        Self::from_entries(
            dim,
            legs,
            m.iter()
                .enumerate()
                .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, v)| (i, j, v.clone()))),
        )
    }

    pub fn to_dense(&self) -> Vec<Vec<S>> {
        let n = self.size();
        let mut m = vec![vec![S::zero(); n]; n];
        for (r, c, v) in self.entries() {
            m[r][c] = v.clone();
        }
        m
    }

    /// The flip `P` on `V⊗V`.
    pub fn swap(dim: usize) -> Self {
        Self::from_entries(
            dim,
            2,
            (0..dim).flat_map(|i| (0..dim).map(move |j| (i * dim + j, j * dim + i, S::one()))),
        )
    }

    /// Matrix unit `e_{ab}` on a single leg.
    /// Dense operator with independent integer entries drawn from `-bound..=bound`.
    pub fn random<R: rand::Rng>(dim: usize, legs: usize, rng: &mut R, bound: i64) -> Self {
        let size = power(dim, legs);
        let entries = (0..size)
            .flat_map(|r| (0..size).map(move |c| (r, c)))
            .map(|(r, c)| (r, c, S::from_i64(rng.gen_range(-bound..=bound))))
            .collect::<Vec<_>>();
        Self::from_entries(dim, legs, entries)
    }

    pub fn matrix_unit(dim: usize, a: usize, b: usize) -> Self {
        Self::from_entries(dim, 1, [(a, b, S::one())])
    }

    pub fn dim_v(&self) -> usize {
        self.dim
    }

    pub fn legs(&self) -> usize {
        self.legs
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row(&self, r: usize) -> &[(u32, S)] {
        &self.rows[r]
    }

    pub fn get(&self, r: usize, c: usize) -> S {
        match self.rows[r].binary_search_by_key(&(c as u32), |e| e.0) {
            Ok(i) => self.rows[r][i].1.clone(),
            Err(_) => S::zero(),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &S)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c as usize, v)))
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    /// 0-based digits of a flattened index, leg 1 first.
    pub fn digits(&self, flat: usize) -> Vec<usize> {
        let mut d = vec![0; self.legs];
        let mut f = flat;
        for k in (0..self.legs).rev() {
            d[k] = f % self.dim;
            f /= self.dim;
        }
        d
    }

    pub fn flatten(&self, digits: &[usize]) -> usize {
        digits.iter().fold(0, |acc, &d| acc * self.dim + d)
    }

    fn check_shape(&self, other: &Self, op: &str) {
        assert!(
            self.dim == other.dim && self.legs == other.legs,
            "{op}: shape mismatch ({}, {}) vs ({}, {})",
            self.dim,
            self.legs,
            other.dim,
            other.legs
        );
    }

    fn merge(&self, other: &Self, sign: bool) -> Self {
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| {
                let mut out = Vec::with_capacity(a.len() + b.len());
                let (mut i, mut j) = (0, 0);
                while i < a.len() || j < b.len() {
                    let take_a = j == b.len() || (i < a.len() && a[i].0 < b[j].0);
                    let take_b = i == a.len() || (j < b.len() && b[j].0 < a[i].0);
                    if take_a {
                        out.push(a[i].clone());
                        i += 1;
                    } else if take_b {
                        let v = if sign {
                            b[j].1.clone()
                        } else {
                            -b[j].1.clone()
                        };
                        out.push((b[j].0, v));
                        j += 1;
                    } else {
                        let v = if sign {
                            a[i].1.clone() + b[j].1.clone()
                        } else {
                            a[i].1.clone() - b[j].1.clone()
                        };
                        if !v.is_zero() {
                            out.push((a[i].0, v));
                        }
                        i += 1;
                        j += 1;
                    }
                }
                out
            })
            .collect();
        TensorOperator {
            dim: self.dim,
            legs: self.legs,
            rows,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_shape(other, "add");
        self.merge(other, true)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_shape(other, "sub");
        self.merge(other, false)
    }

    pub fn scale(&self, s: &S) -> Self {
        if s.is_zero() {
            return Self::zero(self.dim, self.legs);
        }
        TensorOperator {
            dim: self.dim,
            legs: self.legs,
            rows: self
                .rows
                .iter()
                .map(|row| row.iter().map(|(c, v)| (*c, v.mul_ref(s))).collect())
                .collect(),
        }
    }

    /// `self + s·I`
    pub fn add_scalar(&self, s: &S) -> Self {
        self.add(&Self::scalar_identity(self.dim, self.legs, s.clone()))
    }

    /// Operator product `self · other`.
    pub fn compose(&self, other: &Self) -> Self {
        self.check_shape(other, "compose");
        let n = self.size();
        let mut acc: Vec<S> = vec![S::zero(); n];
        let mut touched: Vec<u32> = Vec::new();
        let mut mark = vec![false; n];
        let rows = self
            .rows
            .iter()
            .map(|row| {
                for (k, a) in row {
                    for (c, b) in &other.rows[*k as usize] {
                        let ci = *c as usize;
                        if !mark[ci] {
                            mark[ci] = true;
                            touched.push(*c);
                        }
                        acc[ci].add_mul(a, b);
                    }
                }
                touched.sort_unstable();
                let mut out = Vec::with_capacity(touched.len());
                for c in touched.drain(..) {
                    let ci = c as usize;
                    mark[ci] = false;
                    let v = std::mem::replace(&mut acc[ci], S::zero());
                    if !v.is_zero() {
                        out.push((c, v));
                    }
                }
                out
            })
            .collect();
        TensorOperator {
            dim: self.dim,
            legs: self.legs,
            rows,
        }
    }

    /// Product of a sequence of operators, left to right.
    pub fn product<'a>(ops: impl IntoIterator<Item = &'a Self>) -> Option<Self> {
        let mut it = ops.into_iter();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, x| acc.compose(x)))
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Self::identity(self.dim, self.legs);
        for _ in 0..k {
            acc = acc.compose(self);
        }
        acc
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.compose(other).sub(&other.compose(self))
    }

    pub fn transpose(&self) -> Self {
        Self::from_entries(
            self.dim,
            self.legs,
            self.entries().map(|(r, c, v)| (c, r, v.clone())),
        )
    }

    /// Tensor product with `self` on the leading legs.
    pub fn kron(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "kron: dimension mismatch");
        let m = other.size();
        Self::from_entries(
            self.dim,
            self.legs + other.legs,
            self.entries().flat_map(|(r, c, a)| {
                other
                    .entries()
                    .map(move |(r2, c2, b)| (r * m + r2, c * m + c2, a.mul_ref(b)))
            }),
        )
    }

    /// Places `self` on the listed legs of `V^{⊗n}` (in that order), identity elsewhere.
    pub fn embed(&self, positions: &[usize], n: usize) -> Result<Self> {
        if positions.len() != self.legs {
            return Err(Error::LegRange(format!(
                "{} positions for a {}-leg operator",
                positions.len(),
                self.legs
            )));
        }
        let mut seen = vec![false; n + 1];
        for &p in positions {
            if p == 0 || p > n || seen[p] {
                return Err(Error::LegRange(format!(
                    "positions {positions:?} in {n} legs"
                )));
            }
            seen[p] = true;
        }
        let dim = self.dim;
        let stride = |leg: usize| power(dim, n - leg);
        let others: Vec<usize> = (1..=n).filter(|l| !seen[*l]).collect();
        let mut bases = vec![0usize];
        for &l in &others {
            let s = stride(l);
            bases = bases
                .into_iter()
                .flat_map(|b| (0..dim).map(move |d| b + d * s))
                .collect();
        }
        let place = |flat: usize| -> usize {
            let digits = self.digits(flat);
            digits
                .iter()
                .zip(positions)
                .map(|(d, &p)| d * stride(p))
                .sum()
        };
        let size = power(dim, n);
        let mut rows: Vec<Vec<(u32, S)>> = vec![Vec::new(); size];
        for (r, c, v) in self.entries() {
            let (rp, cp) = (place(r), place(c));
            for b in &bases {
                rows[b + rp].push(((b + cp) as u32, v.clone()));
            }
        }
        for row in rows.iter_mut() {
            row.sort_unstable_by_key(|e| e.0);
        }
        Ok(TensorOperator { dim, legs: n, rows })
    }

    /// `X_m`: a two-leg operator on legs `(m, m+1)` of `V^{⊗n}`.
    pub fn embed_at(&self, m: usize, n: usize) -> Result<Self> {
        if m == 0 || m + 1 > n {
            return Err(Error::LegRange(format!("embed_at m={m}, n={n}")));
        }
        self.embed(&[m, m + 1], n)
    }

    /// `X_{mr}` with `m < r`.
    pub fn embed_pair(&self, m: usize, r: usize, n: usize) -> Result<Self> {
        if m == 0 || m >= r || r > n {
            return Err(Error::LegRange(format!("embed_pair m={m}, r={r}, n={n}")));
        }
        self.embed(&[m, r], n)
    }

    /// Places `self` on legs `offset+1 ..= offset+legs` (the shift `X↑offset`).
    pub fn shifted(&self, offset: usize, n: usize) -> Result<Self> {
        let pos: Vec<usize> = (offset + 1..=offset + self.legs).collect();
        self.embed(&pos, n)
    }

    fn trace_legs(&self, legs: &[usize]) -> Result<Vec<usize>> {
        let mut set = vec![false; self.legs + 1];
        for &l in legs {
            if l == 0 || l > self.legs || set[l] {
                return Err(Error::LegRange(format!(
                    "trace over {legs:?} of {} legs",
                    self.legs
                )));
            }
            set[l] = true;
        }
        Ok((1..=self.legs).filter(|l| !set[*l]).collect())
    }

    /// Ordinary trace over the listed legs; the remaining legs keep their order.
    pub fn partial_trace(&self, legs: &[usize]) -> Result<Self> {
        let keep = self.trace_legs(legs)?;
        let traced: Vec<usize> = legs.to_vec();
        let entries = self.entries().filter_map(|(r, c, v)| {
            let rd = self.digits(r);
            let cd = self.digits(c);
            if traced.iter().any(|&l| rd[l - 1] != cd[l - 1]) {
                return None;
            }
            let rk = keep.iter().fold(0, |a, &l| a * self.dim + rd[l - 1]);
            let ck = keep.iter().fold(0, |a, &l| a * self.dim + cd[l - 1]);
            Some((rk, ck, v.clone()))
        });
        Ok(Self::from_entries(self.dim, keep.len(), entries))
    }

    /// Trace over `legs` with `weight` inserted on each traced leg: `Tr(W_{l1} W_{l2} ⋯ X)`.
    pub fn weighted_trace(&self, legs: &[usize], weight: &Self) -> Result<Self> {
        if weight.legs != 1 || weight.dim != self.dim {
            return Err(Error::Shape("weight must act on a single leg".into()));
        }
        self.trace_legs(legs)?;
        let mut x = self.clone();
        for &l in legs {
            x = weight.embed(&[l], self.legs)?.compose(&x);
        }
        x.partial_trace(legs)
    }

    /// Full trace.
    pub fn trace(&self) -> S {
        let mut acc = S::zero();
        for (r, row) in self.rows.iter().enumerate() {
            if let Ok(i) = row.binary_search_by_key(&(r as u32), |e| e.0) {
                acc += row[i].1.clone();
            }
        }
        acc
    }

    /// Scalar value of a 0-leg operator.
    pub fn as_scalar(&self) -> S {
        assert_eq!(self.legs, 0, "not a 0-leg operator");
        self.get(0, 0)
    }

    pub fn inverse(&self) -> Result<Self> {
        let inv = linalg::inverse(&self.to_dense()).ok_or(Error::Singular)?;
        Ok(Self::from_dense(self.dim, self.legs, &inv))
    }

    pub fn rank(&self) -> usize {
        linalg::rank(&self.to_dense())
    }

    /// Action on a column vector.
    pub fn apply(&self, v: &[S]) -> Vec<S> {
        self.rows
            .iter()
            .map(|row| {
                let mut acc = S::zero();
                for (c, a) in row {
                    acc.add_mul(a, &v[*c as usize]);
                }
                acc
            })
            .collect()
    }

    /// Human-readable description of up to `limit` differing entries, `None` when equal.
    pub fn diff_witness(&self, other: &Self, limit: usize) -> Option<String> {
        if self.dim != other.dim || self.legs != other.legs {
            return Some(format!(
                "shape ({}, {}) vs ({}, {})",
                self.dim, self.legs, other.dim, other.legs
            ));
        }
        if self == other {
            return None;
        }
        let d = self.sub(other);
        let mut s = String::new();
        for (k, (r, c, _)) in d.entries().take(limit).enumerate() {
            if k > 0 {
                s.push_str("; ");
            }
            let one_based = |x: Vec<usize>| x.into_iter().map(|i| i + 1).collect::<Vec<_>>();
            let _ = write!(
                s,
                "row {:?} col {:?}: lhs {} rhs {}",
                one_based(self.digits(r)),
                one_based(self.digits(c)),
                self.get(r, c),
                other.get(r, c)
            );
        }
        let extra = d.nnz().saturating_sub(limit);
        if extra > 0 {
            let _ = write!(s, "; {extra} more");
        }
        Some(s)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let one_based = |x: Vec<usize>| x.into_iter().map(|i| i + 1).collect::<Vec<_>>();
        let j = OperatorJson {
            dim_v: self.dim,
            legs: self.legs,
            entries: self
                .entries()
                .map(|(r, c, v)| EntryJson {
                    row: one_based(self.digits(r)),
                    col: one_based(self.digits(c)),
                    value: v.to_string(),
                })
                .collect(),
        };
        serde_json::to_value(j).expect("operator serializes")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("operator serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let j: OperatorJson =
            serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        if j.dim_v == 0 {
            return Err(Error::Parse("dimV must be positive".into()));
        }
        let shell = Self::zero(j.dim_v, 0);
        let mut entries = Vec::with_capacity(j.entries.len());
        for e in j.entries {
            if e.row.len() != j.legs || e.col.len() != j.legs {
                return Err(Error::Parse("multi-index length differs from legs".into()));
            }
            if e.row.iter().chain(&e.col).any(|&i| i == 0 || i > j.dim_v) {
                return Err(Error::Parse(format!("index out of [1, {}]", j.dim_v)));
            }
            let z = |x: &[usize]| x.iter().map(|i| i - 1).collect::<Vec<_>>();
            let value = S::parse(&e.value)?;
            entries.push((shell.flatten(&z(&e.row)), shell.flatten(&z(&e.col)), value));
        }
        Ok(Self::from_entries(j.dim_v, j.legs, entries))
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: serde_json::Value =
            serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(&v)
    }
}

impl<S: Field> Add for &TensorOperator<S> {
    type Output = TensorOperator<S>;
    fn add(self, o: Self) -> TensorOperator<S> {
        TensorOperator::add(self, o)
    }
}

impl<S: Field> Sub for &TensorOperator<S> {
    type Output = TensorOperator<S>;
    fn sub(self, o: Self) -> TensorOperator<S> {
        TensorOperator::sub(self, o)
    }
}

impl<S: Field> Mul for &TensorOperator<S> {
    type Output = TensorOperator<S>;
    fn mul(self, o: Self) -> TensorOperator<S> {
        self.compose(o)
    }
}

impl<S: Field> Neg for &TensorOperator<S> {
    type Output = TensorOperator<S>;
    fn neg(self) -> TensorOperator<S> {
        self.scale(&-S::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::Rational;

    type Op = TensorOperator<Rational>;

    fn basis(dim: usize, legs: usize, digits: &[usize]) -> Vec<Rational> {
        let shell = Op::zero(dim, legs);
        let mut v = vec![Rational::zero(); shell.size()];
        v[shell.flatten(digits)] = Rational::one();
        v
    }

    #[test]
    fn embed_examples() {
        let p = Op::swap(3);
        assert_eq!(p.embed_at(1, 2).unwrap(), p);
        let v = p.embed_at(2, 3).unwrap().apply(&basis(3, 3, &[0, 1, 2]));
        assert_eq!(v, basis(3, 3, &[0, 2, 1]));
        assert!(p.embed_at(3, 3).is_err());
        let v = p
            .embed_pair(1, 3, 3)
            .unwrap()
            .apply(&basis(3, 3, &[0, 1, 2]));
        assert_eq!(v, basis(3, 3, &[2, 1, 0]));
        assert_eq!(
            Op::identity(3, 2).embed_pair(1, 3, 4).unwrap(),
            Op::identity(3, 4)
        );
    }

    #[test]
    fn trace_examples() {
        let p = Op::swap(3);
        assert_eq!(p.partial_trace(&[1]).unwrap(), Op::identity(3, 1));
        let t = Op::identity(3, 2).partial_trace(&[1, 2]).unwrap();
        assert_eq!(t.legs(), 0);
        assert_eq!(t.as_scalar(), Rational::from_i64(9));
        assert_eq!(p.compose(&p), Op::identity(3, 2));
    }

    #[test]
    fn json_round_trip() {
        let p = Op::swap(2).scale(&Rational::new(-3, 7).unwrap());
        let back = Op::from_json_str(&p.to_json_string()).unwrap();
        assert_eq!(back, p);
    }
}
