//! Finite matroids given by explicit basis families.
//!
//! Ground sets are `0..n` with `n ≤ 24`, so subsets are `u32` bitmasks and
//! rank/closure queries reduce to popcounts over the basis list. All the
//! objects this crate cares about have at most eleven elements; explicit
//! bases keep every derived quantity trivially correct at that scale.

use std::collections::{BTreeSet, HashSet};
use std::sync::OnceLock;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::realisable::GfMatrix;

pub const MAX_GROUND: usize = 24;

/// Full pairwise exchange validation is skipped above this many bases;
/// constructors that exceed it must be structurally correct.
const VALIDATE_CAP: usize = 50_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatroidError {
    #[error("ground set size {0} exceeds the supported maximum {MAX_GROUND}")]
    GroundTooLarge(usize),
    #[error("basis family is empty")]
    NoBases,
    #[error("bases have unequal cardinalities")]
    MixedRank,
    #[error("element {0} out of range")]
    OutOfRange(usize),
    #[error("basis exchange fails for bases {0:?} and {1:?} at element {2}")]
    ExchangeFailure(Vec<usize>, Vec<usize>, usize),
    #[error("basis family too large to validate ({0} bases)")]
    TooLargeToValidate(usize),
    #[error("operation requires at most {cap} elements, ground set has {n}")]
    TooLarge { n: usize, cap: usize },
    #[error("{0:?} is not a basis")]
    NotABasis(Vec<usize>),
    #[error("matroid has loops {0:?}")]
    HasLoops(Vec<usize>),
}

pub fn mask_of(elements: &[usize]) -> u32 {
    elements.iter().fold(0u32, |m, &e| m | 1 << e)
}

pub fn elements_of(mask: u32) -> Vec<usize> {
    (0..32).filter(|&i| mask >> i & 1 == 1).collect()
}

/// A matroid on `{0, .., n-1}` with an explicit basis family.
#[derive(Debug)]
pub struct Matroid {
    n: usize,
    rank: usize,
    bases: Vec<u32>,
    basis_set: HashSet<u32>,
    circuits: OnceLock<Vec<u32>>,
    flats: OnceLock<Vec<u32>>,
}

impl Clone for Matroid {
    fn clone(&self) -> Self {
        Matroid {
            n: self.n,
            rank: self.rank,
            bases: self.bases.clone(),
            basis_set: self.basis_set.clone(),
            circuits: OnceLock::new(),
            flats: OnceLock::new(),
        }
    }
}

impl PartialEq for Matroid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.bases == other.bases
    }
}
impl Eq for Matroid {}

impl Matroid {
    /// Validated constructor from a list of bases.
    pub fn from_bases(n: usize, bases: Vec<Vec<usize>>) -> Result<Self, MatroidError> {
        let masks = bases
            .iter()
            .map(|b| {
                for &e in b {
                    if e >= n {
                        return Err(MatroidError::OutOfRange(e));
                    }
                }
                Ok(mask_of(b))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let m = Self::from_masks(n, masks)?;
        m.validate()?;
        Ok(m)
    }

    fn from_masks(n: usize, mut masks: Vec<u32>) -> Result<Self, MatroidError> {
        if n > MAX_GROUND {
            return Err(MatroidError::GroundTooLarge(n));
        }
        masks.sort_unstable();
        masks.dedup();
        if masks.is_empty() {
            return Err(MatroidError::NoBases);
        }
        let rank = masks[0].count_ones() as usize;
        if masks.iter().any(|m| m.count_ones() as usize != rank) {
            return Err(MatroidError::MixedRank);
        }
        let basis_set = masks.iter().copied().collect();
        Ok(Matroid {
            n,
            rank,
            bases: masks,
            basis_set,
            circuits: OnceLock::new(),
            flats: OnceLock::new(),
        })
    }

    /// Brute-force basis exchange: for all bases `B1, B2` and `x ∈ B1∖B2`
    /// some `y ∈ B2∖B1` has `B1 − x + y` a basis.
    pub fn validate(&self) -> Result<(), MatroidError> {
        if self.bases.len() > VALIDATE_CAP {
            return Err(MatroidError::TooLargeToValidate(self.bases.len()));
        }
        for &b1 in &self.bases {
            for &b2 in &self.bases {
                let only1 = b1 & !b2;
                let only2 = b2 & !b1;
                for x in elements_of(only1) {
                    let stripped = b1 & !(1 << x);
                    let ok = elements_of(only2)
                        .iter()
                        .any(|&y| self.basis_set.contains(&(stripped | 1 << y)));
                    if !ok {
                        return Err(MatroidError::ExchangeFailure(
                            elements_of(b1),
                            elements_of(b2),
                            x,
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// The uniform matroid `U_{r,n}`.
    pub fn uniform(r: usize, n: usize) -> Self {
        assert!(r <= n && n <= MAX_GROUND);
        let masks = (0..n).combinations(r).map(|c| mask_of(&c)).collect();
        Self::from_masks(n, masks).expect("uniform basis family")
    }

    /// The Vámos matroid on `{0..7}` with pairs `(0,1),(2,3),(4,5),(6,7)`:
    /// all 4-subsets are bases except the five double pairs
    /// `{0,1,2,3},{0,1,4,5},{0,1,6,7},{2,3,4,5},{2,3,6,7}`. Note `{4,5,6,7}`
    /// is a basis.
    pub fn vamos() -> Self {
        let non: Vec<u32> = [
            [0usize, 1, 2, 3],
            [0, 1, 4, 5],
            [0, 1, 6, 7],
            [2, 3, 4, 5],
            [2, 3, 6, 7],
        ]
        .iter()
        .map(|s| mask_of(s))
        .collect();
        let masks = (0..8usize)
            .combinations(4)
            .map(|c| mask_of(&c))
            .filter(|m| !non.contains(m))
            .collect();
        let m = Self::from_masks(8, masks).expect("vamos basis family");
        m.validate().expect("vamos satisfies basis exchange");
        m
    }

    /// Direct sum, relabelling `other`'s elements after `self`'s.
    pub fn direct_sum(&self, other: &Matroid) -> Result<Self, MatroidError> {
        let n = self.n + other.n;
        if n > MAX_GROUND {
            return Err(MatroidError::GroundTooLarge(n));
        }
        let mut masks = Vec::with_capacity(self.bases.len() * other.bases.len());
        for &a in &self.bases {
            for &b in &other.bases {
                masks.push(a | b << self.n);
            }
        }
        Self::from_masks(n, masks)
    }

    /// Restriction to `a`, relabelled to `0..|a|` in ascending element order.
    pub fn restriction(&self, a: &[usize]) -> Result<Self, MatroidError> {
        let mut sorted = a.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        for &e in &sorted {
            if e >= self.n {
                return Err(MatroidError::OutOfRange(e));
            }
        }
        let amask = mask_of(&sorted);
        let r = self.rank_of(amask);
        let masks = sorted
            .iter()
            .copied()
            .combinations(r)
            .filter(|c| self.is_independent(mask_of(c)))
            .map(|c| {
                c.iter()
                    .map(|e| sorted.binary_search(e).unwrap())
                    .fold(0u32, |m, i| m | 1 << i)
            })
            .collect();
        Self::from_masks(sorted.len(), masks)
    }

    /// Contraction by `t`, relabelled to `0..n-|t|` in ascending order.
    pub fn contraction(&self, t: &[usize]) -> Result<Self, MatroidError> {
        let tmask = mask_of(t);
        let rt = self.rank_of(tmask);
        let rest: Vec<usize> = (0..self.n).filter(|&e| tmask >> e & 1 == 0).collect();
        let r = self.rank - rt;
        let masks = rest
            .iter()
            .copied()
            .combinations(r)
            .filter(|c| self.rank_of(mask_of(c) | tmask) == r + rt)
            .map(|c| {
                c.iter()
                    .map(|e| rest.binary_search(e).unwrap())
                    .fold(0u32, |m, i| m | 1 << i)
            })
            .collect();
        Self::from_masks(rest.len(), masks)
    }

    /// Column matroid of a matrix over a small prime-power field.
    pub fn from_matrix(m: &GfMatrix) -> Result<Self, MatroidError> {
        let n = m.cols();
        if n > MAX_GROUND {
            return Err(MatroidError::GroundTooLarge(n));
        }
        let rank = m.rank();
        let masks = (0..n)
            .combinations(rank)
            .filter(|c| m.columns_independent(c))
            .map(|c| mask_of(&c))
            .collect();
        let matroid = Self::from_masks(n, masks)?;
        matroid.validate()?;
        Ok(matroid)
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn bases(&self) -> &[u32] {
        &self.bases
    }

    pub fn is_basis(&self, mask: u32) -> bool {
        self.basis_set.contains(&mask)
    }

    /// `rank(A) = max |A ∩ B|` over bases `B`.
    pub fn rank_of(&self, a: u32) -> usize {
        self.bases
            .iter()
            .map(|&b| (a & b).count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn is_independent(&self, a: u32) -> bool {
        self.rank_of(a) == a.count_ones() as usize
    }

    /// `closure(A) = {e : rank(A ∪ e) = rank(A)}`.
    pub fn closure(&self, a: u32) -> u32 {
        let r = self.rank_of(a);
        let mut out = a;
        for e in 0..self.n {
            if a >> e & 1 == 0 && self.rank_of(a | 1 << e) == r {
                out |= 1 << e;
            }
        }
        out
    }

    pub fn loops(&self) -> Vec<usize> {
        elements_of(self.closure(0))
    }

    pub fn is_loopless(&self) -> bool {
        self.closure(0) == 0
    }

    /// Minimal dependent sets, via fundamental circuits over all bases.
    pub fn circuits(&self) -> &[u32] {
        self.circuits.get_or_init(|| {
            let mut set = BTreeSet::new();
            for &b in &self.bases {
                for e in 0..self.n {
                    if b >> e & 1 == 1 {
                        continue;
                    }
                    let mut c = 1u32 << e;
                    for f in elements_of(b) {
                        if self.basis_set.contains(&(b & !(1 << f) | 1 << e)) {
                            c |= 1 << f;
                        }
                    }
                    set.insert(c);
                }
            }
            // Loops are circuits too but never fundamental for any basis.
            for e in self.loops() {
                set.insert(1 << e);
            }
            let mut out: Vec<u32> = set.into_iter().collect();
            out.retain(|&c| {
                elements_of(c)
                    .iter()
                    .all(|&x| self.is_independent(c & !(1 << x)))
                    && !self.is_independent(c)
            });
            out
        })
    }

    /// All flats, enumerated by closing single-element extensions.
    pub fn flats(&self) -> &[u32] {
        self.flats.get_or_init(|| {
            let mut seen = BTreeSet::new();
            let mut queue = vec![self.closure(0)];
            seen.insert(self.closure(0));
            while let Some(f) = queue.pop() {
                for e in 0..self.n {
                    if f >> e & 1 == 0 {
                        let g = self.closure(f | 1 << e);
                        if seen.insert(g) {
                            queue.push(g);
                        }
                    }
                }
            }
            seen.into_iter().collect()
        })
    }

    pub fn is_flat(&self, a: u32) -> bool {
        self.closure(a) == a
    }

    /// The chain of proper flats `cl(b_1), cl(b_1 b_2), ..` induced by an
    /// ordered basis, with the trivial ends `∅` and the ground set dropped.
    pub fn maximal_flag(&self, basis: &[usize]) -> Result<Vec<u32>, MatroidError> {
        let mask = mask_of(basis);
        if !self.basis_set.contains(&mask) || basis.len() != self.rank {
            return Err(MatroidError::NotABasis(basis.to_vec()));
        }
        if !self.is_loopless() {
            return Err(MatroidError::HasLoops(self.loops()));
        }
        let mut chain = Vec::new();
        let mut prefix = 0u32;
        for &b in &basis[..basis.len().saturating_sub(1)] {
            prefix |= 1 << b;
            chain.push(self.closure(prefix));
        }
        Ok(chain)
    }

    /// All chains of proper nonempty flats (the empty chain included).
    pub fn flat_chains(&self) -> Vec<Vec<u32>> {
        let full = (1u32 << self.n) - 1;
        let proper: Vec<u32> = self
            .flats()
            .iter()
            .copied()
            .filter(|&f| f != 0 && f != full)
            .collect();
        let mut out = vec![vec![]];
        let mut stack: Vec<Vec<u32>> = proper.iter().map(|&f| vec![f]).collect();
        while let Some(chain) = stack.pop() {
            let last = *chain.last().unwrap();
            out.push(chain.clone());
            for &f in &proper {
                if f != last && last & f == last {
                    let mut next = chain.clone();
                    next.push(f);
                    stack.push(next);
                }
            }
        }
        out
    }

    /// Exact isomorphism test by pruned backtracking over ground bijections.
    pub fn is_isomorphic_to(&self, other: &Matroid) -> bool {
        if self.n != other.n || self.rank != other.rank || self.bases.len() != other.bases.len() {
            return false;
        }
        let fp_self: Vec<_> = (0..self.n).map(|e| self.fingerprint(e)).collect();
        let fp_other: Vec<_> = (0..other.n).map(|e| other.fingerprint(e)).collect();
        {
            let mut a = fp_self.clone();
            let mut b = fp_other.clone();
            a.sort_unstable();
            b.sort_unstable();
            if a != b {
                return false;
            }
        }
        let mut image = vec![usize::MAX; self.n];
        let mut used = vec![false; self.n];
        self.extend_isomorphism(other, &fp_self, &fp_other, &mut image, &mut used, 0)
    }

    fn fingerprint(&self, e: usize) -> (usize, usize, usize) {
        let in_bases = self.bases.iter().filter(|&&b| b >> e & 1 == 1).count();
        let cl = self.closure(1 << e);
        (in_bases, self.rank_of(1 << e), cl.count_ones() as usize)
    }

    fn extend_isomorphism(
        &self,
        other: &Matroid,
        fp_self: &[(usize, usize, usize)],
        fp_other: &[(usize, usize, usize)],
        image: &mut [usize],
        used: &mut [bool],
        depth: usize,
    ) -> bool {
        if depth == self.n {
            return self.bases.iter().all(|&b| {
                let mapped = elements_of(b).iter().fold(0u32, |m, &e| m | 1 << image[e]);
                other.basis_set.contains(&mapped)
            });
        }
        let prefix: u32 = mask_of(&(0..depth).collect::<Vec<_>>());
        for cand in 0..self.n {
            if used[cand] || fp_self[depth] != fp_other[cand] {
                continue;
            }
            image[depth] = cand;
            used[cand] = true;
            let mapped_prefix = (0..=depth).fold(0u32, |m, e| m | 1 << image[e]);
            if self.rank_of(prefix | 1 << depth) == other.rank_of(mapped_prefix)
                && self.extend_isomorphism(other, fp_self, fp_other, image, used, depth + 1)
            {
                return true;
            }
            used[cand] = false;
            image[depth] = usize::MAX;
        }
        false
    }
}

/// JSON form of a matroid: `{"format":"matroid/v1", ...}`.
#[derive(Serialize, Deserialize)]
pub struct MatroidJson {
    pub format: String,
    pub n: usize,
    pub rank: usize,
    pub bases: Vec<Vec<usize>>,
}

impl Matroid {
    pub fn to_json(&self) -> MatroidJson {
        MatroidJson {
            format: "matroid/v1".to_string(),
            n: self.n,
            rank: self.rank,
            bases: self.bases.iter().map(|&b| elements_of(b)).collect(),
        }
    }

    pub fn from_json(j: &MatroidJson) -> Result<Self, MatroidError> {
        let m = Self::from_bases(j.n, j.bases.clone())?;
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_2_3() {
        let m = Matroid::uniform(2, 3);
        assert_eq!(m.rank(), 2);
        let bases: Vec<Vec<usize>> = m.bases().iter().map(|&b| elements_of(b)).collect();
        assert_eq!(bases, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        m.validate().unwrap();
    }

    #[test]
    fn vamos_counts() {
        let v = Matroid::vamos();
        assert_eq!(v.rank(), 4);
        assert_eq!(v.bases().len(), 65);
        assert!(v.is_loopless());
        assert!(v.is_basis(mask_of(&[4, 5, 6, 7])));
        assert!(!v.is_basis(mask_of(&[0, 1, 2, 3])));
    }

    #[test]
    fn direct_sum_rank_and_circuits() {
        let m = Matroid::uniform(2, 3).direct_sum(&Matroid::vamos()).unwrap();
        assert_eq!(m.ground_size(), 11);
        assert_eq!(m.rank(), 6);
        assert_eq!(m.bases().len(), 3 * 65);
        let u = Matroid::uniform(1, 2).direct_sum(&Matroid::uniform(1, 2)).unwrap();
        let mut cs: Vec<Vec<usize>> = u.circuits().iter().map(|&c| elements_of(c)).collect();
        cs.sort();
        assert_eq!(cs, vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn circuits_uniform() {
        let m = Matroid::uniform(2, 3);
        assert_eq!(m.circuits(), &[mask_of(&[0, 1, 2])]);
    }

    #[test]
    fn closure_and_flats() {
        let m = Matroid::uniform(2, 3);
        assert_eq!(m.closure(mask_of(&[1, 2])), mask_of(&[0, 1, 2]));
        let flats: Vec<u32> = m.flats().to_vec();
        assert_eq!(flats, vec![0, 1, 2, 4, 7]);
    }

    #[test]
    fn maximal_flag_examples() {
        let m = Matroid::uniform(2, 3);
        assert_eq!(m.maximal_flag(&[0, 1]).unwrap(), vec![mask_of(&[0])]);
        let v = Matroid::vamos();
        let chain = v.maximal_flag(&[0, 2, 4, 6]).unwrap();
        assert_eq!(chain.len(), 3);
        for (a, b) in chain.iter().zip(chain.iter().skip(1)) {
            assert!(a & b == *a && a != b);
        }
        for f in &chain {
            assert!(v.is_flat(*f));
        }
        let free = Matroid::uniform(1, 1);
        assert_eq!(free.maximal_flag(&[0]).unwrap(), Vec::<u32>::new());
    }

    #[test]
    fn isomorphism_examples() {
        let u23 = Matroid::uniform(2, 3);
        let gf2 = GfMatrix::new(2, vec![vec![1, 0, 1], vec![0, 1, 1]]).unwrap();
        let m = Matroid::from_matrix(&gf2).unwrap();
        assert!(u23.is_isomorphic_to(&m));
        assert!(!Matroid::vamos().is_isomorphic_to(&Matroid::uniform(4, 8)));
        let v = Matroid::vamos();
        assert!(v.is_isomorphic_to(&v));
    }

    #[test]
    fn restriction_contraction() {
        let v = Matroid::vamos();
        let r = v.restriction(&[0, 1, 2, 3]).unwrap();
        // {0,1,2,3} is a circuit hyperplane: rank 3 on 4 elements.
        assert_eq!(r.rank(), 3);
        assert_eq!(r.ground_size(), 4);
        let c = v.contraction(&[0]).unwrap();
        assert_eq!(c.rank(), 3);
        assert_eq!(c.ground_size(), 7);
        c.validate().unwrap();
    }

    #[test]
    fn exchange_violation_detected() {
        let err = Matroid::from_bases(4, vec![vec![0, 1], vec![2, 3]]);
        assert!(matches!(err, Err(MatroidError::ExchangeFailure(..))));
    }

    #[test]
    fn json_roundtrip() {
        let m = Matroid::uniform(2, 4);
        let j = serde_json::to_string(&m.to_json()).unwrap();
        let back: MatroidJson = serde_json::from_str(&j).unwrap();
        assert_eq!(Matroid::from_json(&back).unwrap(), m);
    }
}
