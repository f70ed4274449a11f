//! Ground-truth oracle: classical linear algebra over small finite fields
//! with the trivial valuation.
//!
//! Realisable truncated tropical ideals are produced by enumerating every
//! vector of a GF(q)-space of polynomials and taking minimal supports, so
//! everything downstream can be checked against honest field arithmetic.
//! Enumeration is capped at `q^dim ≤ 2^22`.

use std::collections::BTreeSet;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ideal::TruncatedTropicalIdeal;
use crate::matroid::{Matroid, MatroidError};
use crate::poly::MonomialTable;
use crate::trop::{Bits, TropVector};

const ENUM_CAP: u64 = 1 << 22;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RealisableError {
    #[error("unsupported field order {0} (need 2, 3, 4 or 5)")]
    BadField(u8),
    #[error("matrix entry {0} out of range for GF({1})")]
    BadEntry(u8, u8),
    #[error("matrix rows have unequal lengths")]
    RaggedMatrix,
    #[error("field orders differ: {0} vs {1}")]
    FieldMismatch(u8, u8),
    #[error("slice enumeration too large: {q}^{dim} exceeds cap")]
    EnumerationTooLarge { q: u8, dim: usize },
    #[error("generator mentions variable {0} but n = {1}")]
    VariableOutOfRange(usize, usize),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
    #[error("ideal construction failed: {0}")]
    Ideal(String),
}

/// Arithmetic in GF(q) for q in {2, 3, 4, 5}. GF(4) is `F_2[t]/(t^2+t+1)`
/// with elements `0, 1, t = 2, t+1 = 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gf {
    pub q: u8,
}

impl Gf {
    pub fn new(q: u8) -> Result<Self, RealisableError> {
        if matches!(q, 2 | 3 | 4 | 5) {
            Ok(Gf { q })
        } else {
            Err(RealisableError::BadField(q))
        }
    }

    pub fn add(&self, a: u8, b: u8) -> u8 {
        if self.q == 4 {
            a ^ b
        } else {
            (a + b) % self.q
        }
    }

    pub fn neg(&self, a: u8) -> u8 {
        if self.q == 4 {
            a
        } else {
            (self.q - a) % self.q
        }
    }

    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u8, b: u8) -> u8 {
        if self.q == 4 {
            const T: [[u8; 4]; 4] = [[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 3, 1], [0, 3, 1, 2]];
            T[a as usize][b as usize]
        } else {
            a * b % self.q
        }
    }

    pub fn inv(&self, a: u8) -> u8 {
        assert!(a != 0, "inverse of zero");
        (1..self.q).find(|&b| self.mul(a, b) == 1).unwrap()
    }
}

/// A matrix over GF(q), rows by columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GfMatrix {
    pub q: u8,
    pub rows: Vec<Vec<u8>>,
}

impl GfMatrix {
    pub fn new(q: u8, rows: Vec<Vec<u8>>) -> Result<Self, RealisableError> {
        let f = Gf::new(q)?;
        let width = rows.first().map_or(0, |r| r.len());
        for r in &rows {
            if r.len() != width {
                return Err(RealisableError::RaggedMatrix);
            }
            for &e in r {
                if e >= f.q {
                    return Err(RealisableError::BadEntry(e, q));
                }
            }
        }
        Ok(GfMatrix { q, rows })
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }

    fn field(&self) -> Gf {
        Gf { q: self.q }
    }

    /// Row-reduces in place; returns pivot column indices.
    fn rref(rows: &mut Vec<Vec<u8>>, f: Gf) -> Vec<usize> {
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..ncols {
            let Some(p) = (row..rows.len()).find(|&r| rows[r][col] != 0) else {
                continue;
            };
            rows.swap(row, p);
            let inv = f.inv(rows[row][col]);
            for x in rows[row].iter_mut() {
                *x = f.mul(*x, inv);
            }
            for r in 0..rows.len() {
                if r != row && rows[r][col] != 0 {
                    let factor = rows[r][col];
                    for c in 0..ncols {
                        let t = f.mul(factor, rows[row][c]);
                        rows[r][c] = f.sub(rows[r][c], t);
                    }
                }
            }
            pivots.push(col);
            row += 1;
            if row == rows.len() {
                break;
            }
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        Self::rref(&mut rows, self.field()).len()
    }

    pub fn columns_independent(&self, cols: &[usize]) -> bool {
        let sub: Vec<Vec<u8>> = self
            .rows
            .iter()
            .map(|r| cols.iter().map(|&c| r[c]).collect())
            .collect();
        let mut sub = sub;
        Self::rref(&mut sub, self.field()).len() == cols.len()
    }

    /// A basis of the right kernel `{c : M c = 0}`.
    pub fn kernel_basis(&self) -> Vec<Vec<u8>> {
        let f = self.field();
        let mut rows = self.rows.clone();
        let pivots = Self::rref(&mut rows, f);
        let ncols = self.cols();
        let mut basis = Vec::new();
        for free in (0..ncols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![0u8; ncols];
            v[free] = 1;
            for (prow, &pcol) in pivots.iter().enumerate() {
                v[pcol] = f.neg(rows[prow][free]);
            }
            basis.push(v);
        }
        basis
    }

    /// Kronecker product; column `(x, y)` of the result is `a_x ⊗ b_y` and
    /// gets index `x * b.cols() + y`.
    pub fn kronecker(&self, other: &GfMatrix) -> Result<GfMatrix, RealisableError> {
        if self.q != other.q {
            return Err(RealisableError::FieldMismatch(self.q, other.q));
        }
        let f = self.field();
        let mut rows = Vec::with_capacity(self.nrows() * other.nrows());
        for ra in &self.rows {
            for rb in &other.rows {
                let mut row = Vec::with_capacity(self.cols() * other.cols());
                for &a in ra {
                    for &b in rb {
                        row.push(f.mul(a, b));
                    }
                }
                rows.push(row);
            }
        }
        GfMatrix::new(self.q, rows)
    }
}

/// A polynomial over GF(q): list of (exponent vector, nonzero coefficient).
pub type GfPoly = Vec<(Vec<u16>, u8)>;

/// A linear form with optional affine constant, the oracle's input format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearForm {
    pub coeffs: Vec<u8>,
    #[serde(default)]
    pub constant: u8,
}

impl LinearForm {
    pub fn to_poly(&self, n: usize) -> Result<GfPoly, RealisableError> {
        if self.coeffs.len() != n {
            return Err(RealisableError::VariableOutOfRange(self.coeffs.len(), n));
        }
        let mut p = GfPoly::new();
        if self.constant != 0 {
            p.push((vec![0; n], self.constant));
        }
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                let mut e = vec![0u16; n];
                e[i] = 1;
                p.push((e, c));
            }
        }
        Ok(p)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.constant == 0
    }
}

fn poly_degree(p: &GfPoly) -> usize {
    p.iter()
        .map(|(e, _)| e.iter().map(|&x| x as usize).sum::<usize>())
        .max()
        .unwrap_or(0)
}

/// Tropicalisation (trivial valuation) of the ideal generated by `polys`,
/// truncated at degree `dmax`: per degree, the GF(q)-span of all products
/// `p · m` of total degree at most `d` is enumerated and the minimal
/// supports become the Boolean circuits of the slice.
pub fn trop_ideal_of_polys(
    q: u8,
    polys: &[GfPoly],
    n: usize,
    dmax: usize,
) -> Result<TruncatedTropicalIdeal, RealisableError> {
    let f = Gf::new(q)?;
    for p in polys {
        for (e, _) in p {
            if e.len() != n {
                return Err(RealisableError::VariableOutOfRange(e.len(), n));
            }
        }
    }
    let table = MonomialTable::new(n, dmax);
    let homogeneous = polys.iter().all(|p| {
        let degs: BTreeSet<usize> = p
            .iter()
            .map(|(e, _)| e.iter().map(|&x| x as usize).sum())
            .collect();
        degs.len() <= 1
    });

    let mut slices = Vec::with_capacity(dmax + 1);
    for d in 0..=dmax {
        let ambient = table.count_le(d);
        // Products p * m with deg(p) + deg(m) <= d, as coefficient vectors.
        let mut vectors: Vec<Vec<u8>> = Vec::new();
        for p in polys {
            let pd = poly_degree(p);
            if pd > d {
                continue;
            }
            for m in 0..table.count_le(d - pd) {
                let mexp = table.exponents(m);
                let mut vec = vec![0u8; ambient];
                for (e, c) in p {
                    let prod: Vec<u16> = e.iter().zip(mexp).map(|(a, b)| a + b).collect();
                    let idx = table.index_of(&prod).expect("degree bounded");
                    vec[idx] = f.add(vec[idx], *c);
                }
                vectors.push(vec);
            }
        }
        let circuits = minimal_support_circuits(f, &vectors, ambient)?;
        slices.push(circuits);
    }
    TruncatedTropicalIdeal::from_boolean_circuits(n, dmax, homogeneous, slices)
        .map_err(|e| RealisableError::Ideal(e.to_string()))
}

/// Truncated tropical ideal of the linear forms, the oracle's entry point.
pub fn trop_linear_ideal(
    q: u8,
    forms: &[LinearForm],
    n: usize,
    dmax: usize,
) -> Result<TruncatedTropicalIdeal, RealisableError> {
    let polys = forms
        .iter()
        .map(|l| l.to_poly(n))
        .collect::<Result<Vec<_>, _>>()?;
    trop_ideal_of_polys(q, &polys, n, dmax)
}

/// The Bergman ideal of the column matroid of `rep`: the tropicalisation of
/// the ideal of linear forms vanishing on the row space, i.e. the kernel of
/// `rep` read as coefficient vectors.
pub fn bergman_ideal(
    rep: &GfMatrix,
    dmax: usize,
) -> Result<TruncatedTropicalIdeal, RealisableError> {
    let forms: Vec<LinearForm> = rep
        .kernel_basis()
        .into_iter()
        .map(|coeffs| LinearForm { coeffs, constant: 0 })
        .collect();
    trop_linear_ideal(rep.q, &forms, rep.cols(), dmax)
}

/// Enumerates the span of `vectors`, returning the minimal nonzero supports
/// as Boolean circuit vectors over the ambient coordinates.
fn minimal_support_circuits(
    f: Gf,
    vectors: &[Vec<u8>],
    ambient: usize,
) -> Result<Vec<TropVector>, RealisableError> {
    let mut rows = vectors.to_vec();
    let _ = GfMatrix::rref(&mut rows, f);
    rows.retain(|r| r.iter().any(|&x| x != 0));
    let dim = rows.len();
    let total = (f.q as u64).checked_pow(dim as u32);
    if total.is_none_or(|t| t > ENUM_CAP) {
        return Err(RealisableError::EnumerationTooLarge { q: f.q, dim });
    }

    let mut supports: BTreeSet<Bits> = BTreeSet::new();
    let mut combo = vec![0u8; dim];
    let mut current = vec![0u8; ambient];
    loop {
        // Advance the odometer of field-element digits, updating the running
        // combination by (new - old) * row so each step is linear.
        let mut pos = 0;
        loop {
            if pos == dim {
                let out: Vec<Bits> = filter_minimal(supports);
                return Ok(out
                    .into_iter()
                    .map(|b| {
                        TropVector::from_support(
                            ambient,
                            &b.iter_ones().collect::<Vec<_>>(),
                        )
                    })
                    .collect());
            }
            let old = combo[pos];
            let new = if old + 1 < f.q { old + 1 } else { 0 };
            combo[pos] = new;
            let delta = f.sub(new, old);
            for (c, r) in current.iter_mut().zip(&rows[pos]) {
                *c = f.add(*c, f.mul(delta, *r));
            }
            if new != 0 {
                break;
            }
            pos += 1;
        }
        let mut b = Bits::empty(ambient);
        for (i, &x) in current.iter().enumerate() {
            if x != 0 {
                b.set(i);
            }
        }
        if !b.is_empty() {
            supports.insert(b);
        }
    }
}

fn filter_minimal(supports: BTreeSet<Bits>) -> Vec<Bits> {
    let mut sorted: Vec<Bits> = supports.into_iter().collect();
    sorted.sort_by_key(|b| b.count());
    let mut kept: Vec<Bits> = Vec::new();
    for b in sorted {
        if !kept.iter().any(|k| k.is_subset_of(&b)) {
            kept.push(b);
        }
    }
    kept.sort();
    kept
}

/// Verification record for the quasi-product structure of a matroid on a
/// product ground set.
#[derive(Debug, Clone, Serialize)]
pub struct QuasiProductReport {
    pub rank: usize,
    pub rank_product: usize,
    pub rows_isomorphic: Vec<bool>,
    pub cols_isomorphic: Vec<bool>,
    pub passed: bool,
}

/// Column matroid of the Kronecker product of two representations, plus the
/// quasi-product verification against the two column matroids.
pub fn kronecker_quasiproduct(
    a: &GfMatrix,
    b: &GfMatrix,
) -> Result<(Matroid, QuasiProductReport), RealisableError> {
    let m = Matroid::from_matrix(a)?;
    let n = Matroid::from_matrix(b)?;
    let kron = a.kronecker(b)?;
    let q = Matroid::from_matrix(&kron)?;
    let report = quasiproduct_check(&q, &m, &n)?;
    Ok((q, report))
}

/// Checks that `q`, on ground set `X × Y` with index `(x, y) = x·|Y| + y`,
/// restricts to `n` on every row `{x} × Y` and to `m` on every column
/// `X × {y}`; also reports rank(q) against rank(m)·rank(n).
pub fn quasiproduct_check(
    q: &Matroid,
    m: &Matroid,
    n: &Matroid,
) -> Result<QuasiProductReport, RealisableError> {
    let (nx, ny) = (m.ground_size(), n.ground_size());
    if q.ground_size() != nx * ny {
        return Err(RealisableError::Ideal(format!(
            "ground set {} is not {}x{}",
            q.ground_size(),
            nx,
            ny
        )));
    }
    let mut rows_isomorphic = Vec::with_capacity(nx);
    for x in 0..nx {
        let row: Vec<usize> = (0..ny).map(|y| x * ny + y).collect();
        rows_isomorphic.push(q.restriction(&row)?.is_isomorphic_to(n));
    }
    let mut cols_isomorphic = Vec::with_capacity(ny);
    for y in 0..ny {
        let col: Vec<usize> = (0..nx).map(|x| x * ny + y).collect();
        cols_isomorphic.push(q.restriction(&col)?.is_isomorphic_to(m));
    }
    let rank_product = m.rank() * n.rank();
    let passed = rows_isomorphic.iter().all(|&b| b) && cols_isomorphic.iter().all(|&b| b);
    Ok(QuasiProductReport {
        rank: q.rank(),
        rank_product,
        rows_isomorphic,
        cols_isomorphic,
        passed,
    })
}
