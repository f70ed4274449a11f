//! The min-plus semifield and finite min-plus linear algebra.
//!
//! Scalars live in `(Q ∪ {∞}, ⊕, ⊙)` with `⊕ = min` and `⊙ = +`. A
//! [`MinPlusSpan`] is the set of combinations `⊕_C (λ_C ⊙ C)` of a finite
//! generator list; membership and elimination witnesses are decided by
//! residuation against that list, so completeness of the generators is the
//! caller's contract.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TropError {
    #[error("vector length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("generator {index} is the all-infinity vector")]
    InfiniteGenerator { index: usize },
    #[error("elimination requires f_i = g_i finite at coordinate {i}")]
    BadEliminationPivot { i: usize },
    #[error("malformed tropical value {0:?}")]
    BadValue(String),
}

/// An element of the extended rational min-plus semifield.
///
/// `⊕` is minimum (with `∞` greatest) and `⊙` is rational addition (with
/// `∞` absorbing). The Boolean subsemifield is `{0, ∞}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TropValue {
    Finite(BigRational),
    Infinity,
}

use TropValue::{Finite, Infinity};

impl TropValue {
    pub fn zero() -> Self {
        Finite(BigRational::zero())
    }

    pub fn from_int(k: i64) -> Self {
        Finite(BigRational::from_integer(BigInt::from(k)))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        Finite(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Finite(_))
    }

    pub fn as_finite(&self) -> Option<&BigRational> {
        match self {
            Finite(r) => Some(r),
            Infinity => None,
        }
    }

    /// Tropical addition `min(self, other)`.
    pub fn tropical_add(&self, other: &Self) -> Self {
        match (self, other) {
            (Infinity, x) | (x, Infinity) => x.clone(),
            (Finite(a), Finite(b)) => Finite(a.min(b).clone()),
        }
    }

    /// Tropical multiplication `self + other`, with `∞` absorbing.
    pub fn tropical_mul(&self, other: &Self) -> Self {
        match (self, other) {
            (Infinity, _) | (_, Infinity) => Infinity,
            (Finite(a), Finite(b)) => Finite(a + b),
        }
    }
}

impl PartialOrd for TropValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TropValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Infinity, Infinity) => Ordering::Equal,
            (Infinity, Finite(_)) => Ordering::Greater,
            (Finite(_), Infinity) => Ordering::Less,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for TropValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Infinity => write!(f, "inf"),
            Finite(r) => write!(f, "{}", r),
        }
    }
}

impl FromStr for TropValue {
    type Err = TropError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "inf" || s == "Inf" || s == "∞" {
            return Ok(Infinity);
        }
        BigRational::from_str(s)
            .map(Finite)
            .map_err(|_| TropError::BadValue(s.to_string()))
    }
}

impl Serialize for TropValue {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for TropValue {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A fixed-width bit set, wide enough for monomial coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits {
    words: Vec<u64>,
}

impl Bits {
    pub fn empty(nbits: usize) -> Self {
        Bits { words: vec![0; nbits.div_ceil(64)] }
    }

    pub fn singleton(nbits: usize, i: usize) -> Self {
        let mut b = Self::empty(nbits);
        b.set(i);
        b
    }

    pub fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn clear(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn union_with(&mut self, other: &Bits) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn is_subset_of(&self, other: &Bits) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &Bits) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let t = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(wi * 64 + t)
                }
            })
        })
    }
}

/// Filters a support family down to its inclusion-minimal members,
/// deduplicated and in deterministic order.
pub fn minimal_supports(supports: impl IntoIterator<Item = Bits>) -> Vec<Bits> {
    let mut sorted: Vec<Bits> = supports.into_iter().collect();
    sorted.sort();
    sorted.dedup();
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

/// A vector in `(Q ∪ {∞})^N` for a ground set of size `N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TropVector(pub Vec<TropValue>);

impl TropVector {
    pub fn all_infinity(n: usize) -> Self {
        TropVector(vec![Infinity; n])
    }

    /// Builds a vector from integer entries, `None` meaning `∞`.
    pub fn from_ints(entries: &[Option<i64>]) -> Self {
        TropVector(
            entries
                .iter()
                .map(|e| match e {
                    Some(k) => TropValue::from_int(*k),
                    None => Infinity,
                })
                .collect(),
        )
    }

    /// Boolean vector with the given support.
    pub fn from_support(n: usize, support: &[usize]) -> Self {
        let mut v = Self::all_infinity(n);
        for &i in support {
            v.0[i] = TropValue::zero();
        }
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The set of coordinates with finite value.
    pub fn support(&self) -> Bits {
        let mut b = Bits::empty(self.len());
        for (i, v) in self.0.iter().enumerate() {
            if v.is_finite() {
                b.set(i);
            }
        }
        b
    }

    pub fn is_zero_vector(&self) -> bool {
        self.0.iter().all(|v| !v.is_finite())
    }

    pub fn is_boolean(&self) -> bool {
        self.0.iter().all(|v| match v {
            Infinity => true,
            Finite(r) => r.is_zero(),
        })
    }

    /// Pointwise tropical sum `self ⊕ other`.
    pub fn oplus(&self, other: &TropVector) -> TropVector {
        TropVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.tropical_add(b))
                .collect(),
        )
    }

    /// Tropical scaling `λ ⊙ self`.
    pub fn scale(&self, lambda: &TropValue) -> TropVector {
        TropVector(self.0.iter().map(|a| lambda.tropical_mul(a)).collect())
    }

    /// Shifts so the first finite entry is 0; identity on the zero vector.
    pub fn normalized(&self) -> TropVector {
        match self.0.iter().find_map(|v| v.as_finite()) {
            None => self.clone(),
            Some(first) => {
                let shift = Finite(-first.clone());
                self.scale(&shift)
            }
        }
    }

    /// Numeric domination: `self_j ≥ other_j` at every coordinate.
    pub fn dominates(&self, other: &TropVector) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }
}

/// A finite list of generators spanning a min-plus submodule of `(Q ∪ {∞})^N`.
///
/// When the generators are the valuated circuits of a tropical linear space
/// the supports form an antichain; [`MinPlusSpan::is_circuit_complete`]
/// checks exactly that.
#[derive(Debug, Clone, PartialEq)]
pub struct MinPlusSpan {
    n: usize,
    generators: Vec<TropVector>,
    supports: Vec<Bits>,
    boolean: bool,
}

/// Outcome of the finite elimination-axiom check.
#[derive(Debug, Clone)]
pub struct EliminationCheck {
    pub passed: bool,
    /// First failing triple `(f, g, i)`, if any.
    pub counterexample: Option<(TropVector, TropVector, usize)>,
    pub family_size: usize,
    pub pairs_checked: usize,
}

impl MinPlusSpan {
    pub fn new(n: usize, generators: Vec<TropVector>) -> Result<Self, TropError> {
        for (index, g) in generators.iter().enumerate() {
            if g.len() != n {
                return Err(TropError::LengthMismatch { expected: n, got: g.len() });
            }
            if g.is_zero_vector() {
                return Err(TropError::InfiniteGenerator { index });
            }
        }
        let supports: Vec<Bits> = generators.iter().map(|g| g.support()).collect();
        let boolean = generators.iter().all(|g| g.is_boolean());
        Ok(MinPlusSpan { n, generators, supports, boolean })
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[TropVector] {
        &self.generators
    }

    pub fn supports(&self) -> &[Bits] {
        &self.supports
    }

    pub fn is_boolean(&self) -> bool {
        self.boolean
    }

    /// True when the generator supports form an antichain under strict inclusion.
    pub fn is_circuit_complete(&self) -> bool {
        for (i, a) in self.supports.iter().enumerate() {
            for (j, b) in self.supports.iter().enumerate() {
                if i != j && a.is_subset_of(b) && a != b {
                    return false;
                }
            }
        }
        true
    }

    /// The pointwise-minimal element of the sub-span vanishing on `excluded`
    /// that dominates `v`; all-infinity if no generator qualifies.
    ///
    /// Each qualifying generator `C` is scaled by
    /// `λ*_C = max_{j ∈ supp C} (v_j − C_j)`, the least shift putting
    /// `λ ⊙ C` above `v`; `C` is dropped when some `v_j = ∞` on its support.
    pub fn principal_cover(&self, v: &TropVector, excluded: &Bits) -> Result<TropVector, TropError> {
        if v.len() != self.n {
            return Err(TropError::LengthMismatch { expected: self.n, got: v.len() });
        }
        let mut out = TropVector::all_infinity(self.n);
        for (gen, supp) in self.generators.iter().zip(&self.supports) {
            if supp.intersects(excluded) {
                continue;
            }
            let mut lambda: Option<BigRational> = None;
            let mut dropped = false;
            for j in supp.iter_ones() {
                match (&v.0[j], &gen.0[j]) {
                    (Infinity, _) => {
                        dropped = true;
                        break;
                    }
                    (Finite(vj), Finite(cj)) => {
                        let d = vj - cj;
                        lambda = Some(match lambda {
                            None => d,
                            Some(l) => l.max(d),
                        });
                    }
                    (_, Infinity) => unreachable!("support iterated"),
                }
            }
            if dropped {
                continue;
            }
            let lambda = Finite(lambda.expect("generators are never all-infinity"));
            out = out.oplus(&gen.scale(&lambda));
        }
        Ok(out)
    }

    /// Boolean fast path of [`Self::principal_cover`] on supports.
    fn cover_support(&self, v_supp: &Bits, excluded: &Bits) -> Bits {
        let mut out = Bits::empty(self.n);
        for supp in &self.supports {
            if !supp.intersects(excluded) && supp.is_subset_of(v_supp) {
                out.union_with(supp);
            }
        }
        out
    }

    /// Decides `v ∈ span(generators)`.
    pub fn membership(&self, v: &TropVector) -> Result<bool, TropError> {
        if v.len() != self.n {
            return Err(TropError::LengthMismatch { expected: self.n, got: v.len() });
        }
        if self.boolean && v.is_boolean() {
            let supp = v.support();
            return Ok(self.cover_support(&supp, &Bits::empty(self.n)) == supp);
        }
        Ok(self.principal_cover(v, &Bits::empty(self.n))? == *v)
    }

    /// Elimination witness for `f, g` at pivot `i` per the elimination axiom:
    /// an `h` in the span with `h_i = ∞`, `h ≥ f ⊕ g` everywhere and equality
    /// wherever `f_j ≠ g_j`. Returns `None` when the residuated candidate
    /// fails; since that candidate is pointwise minimal, a `None` means no
    /// witness exists in the span.
    pub fn elimination_witness(
        &self,
        f: &TropVector,
        g: &TropVector,
        i: usize,
    ) -> Result<Option<TropVector>, TropError> {
        match (&f.0[i], &g.0[i]) {
            (Finite(a), Finite(b)) if a == b => {}
            _ => return Err(TropError::BadEliminationPivot { i }),
        }
        let v = f.oplus(g);
        let h = self.principal_cover(&v, &Bits::singleton(self.n, i))?;
        debug_assert!(!h.0[i].is_finite());
        debug_assert!(h.dominates(&v));
        for j in 0..self.n {
            if f.0[j] != g.0[j] && h.0[j] != v.0[j] {
                return Ok(None);
            }
        }
        Ok(Some(h))
    }

    /// Checks the elimination axiom on a finite test family: the generators
    /// together with their pairwise `⊕`-combinations, every pair of family
    /// members shift-normalized at each shared finite coordinate. A pass
    /// certifies the axiom on this family only.
    pub fn is_tropical_linear_space(&self) -> EliminationCheck {
        self.check_elimination(usize::MAX)
    }

    /// As [`Self::is_tropical_linear_space`] but stops after `max_pairs`
    /// tested pairs; the report records how many were actually checked.
    pub fn check_elimination(&self, max_pairs: usize) -> EliminationCheck {
        let mut family: Vec<TropVector> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        let mut push = |v: TropVector, family: &mut Vec<TropVector>| {
            if seen.insert(v.clone()) {
                family.push(v);
            }
        };
        for g in &self.generators {
            push(g.clone(), &mut family);
        }
        for a in 0..self.generators.len() {
            for b in (a + 1)..self.generators.len() {
                push(self.generators[a].oplus(&self.generators[b]), &mut family);
            }
        }
        let family_size = family.len();

        let mut pairs_checked = 0usize;
        for (ai, f) in family.iter().enumerate() {
            for g in family.iter().skip(ai) {
                if pairs_checked >= max_pairs {
                    return EliminationCheck {
                        passed: true,
                        counterexample: None,
                        family_size,
                        pairs_checked,
                    };
                }
                pairs_checked += 1;
                for i in 0..self.n {
                    let (fi, gi) = (&f.0[i], &g.0[i]);
                    let (fi, gi) = match (fi.as_finite(), gi.as_finite()) {
                        (Some(a), Some(b)) => (a, b),
                        _ => continue,
                    };
                    // Shift g so the pair agrees at the pivot coordinate.
                    let shifted = g.scale(&Finite(fi - gi));
                    let ok = if self.boolean && f.is_boolean() && shifted.is_boolean() {
                        self.boolean_witness_exists(f, &shifted, i)
                    } else {
                        self.elimination_witness(f, &shifted, i)
                            .expect("pivot normalized")
                            .is_some()
                    };
                    if !ok {
                        return EliminationCheck {
                            passed: false,
                            counterexample: Some((f.clone(), shifted, i)),
                            family_size,
                            pairs_checked,
                        };
                    }
                }
            }
        }
        EliminationCheck { passed: true, counterexample: None, family_size, pairs_checked }
    }

    fn boolean_witness_exists(&self, f: &TropVector, g: &TropVector, i: usize) -> bool {
        let (fs, gs) = (f.support(), g.support());
        let mut union = fs.clone();
        union.union_with(&gs);
        union.clear(i);
        let cover = self.cover_support(&union, &Bits::singleton(self.n, i));
        // Disagreement coordinates (exactly one support) must be covered.
        for j in union.iter_ones() {
            if fs.get(j) != gs.get(j) && !cover.get(j) {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(entries: &[Option<i64>]) -> TropVector {
        TropVector::from_ints(entries)
    }

    fn u13_span() -> MinPlusSpan {
        // Boolean circuits of U_{1,3}: all pairs.
        MinPlusSpan::new(
            3,
            vec![
                v(&[Some(0), Some(0), None]),
                v(&[Some(0), None, Some(0)]),
                v(&[None, Some(0), Some(0)]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn semifield_laws() {
        let a = TropValue::from_int(2);
        let b = TropValue::from_int(5);
        assert_eq!(a.tropical_add(&b), a);
        assert_eq!(a.tropical_mul(&b), TropValue::from_int(7));
        assert_eq!(a.tropical_add(&Infinity), a);
        assert_eq!(a.tropical_mul(&Infinity), Infinity);
        assert_eq!(Infinity.tropical_mul(&Infinity), Infinity);
    }

    #[test]
    fn value_parse_roundtrip() {
        for s in ["inf", "5", "-3/7", "0"] {
            let t: TropValue = s.parse().unwrap();
            let back: TropValue = t.to_string().parse().unwrap();
            assert_eq!(t, back);
        }
        assert_eq!("10/4".parse::<TropValue>().unwrap(), TropValue::ratio(5, 2));
        assert!("abc".parse::<TropValue>().is_err());
    }

    #[test]
    fn principal_cover_excluded() {
        let s = u13_span();
        let h = s
            .principal_cover(&v(&[Some(0), Some(1), None]), &Bits::singleton(3, 2))
            .unwrap();
        assert_eq!(h, v(&[Some(1), Some(1), None]));
    }

    #[test]
    fn principal_cover_all_infinity() {
        let s = u13_span();
        let z = TropVector::all_infinity(3);
        assert_eq!(s.principal_cover(&z, &Bits::empty(3)).unwrap(), z);
        assert!(s.membership(&z).unwrap());
    }

    #[test]
    fn principal_cover_exact() {
        let s = u13_span();
        let x = v(&[Some(0), Some(0), Some(0)]);
        assert_eq!(s.principal_cover(&x, &Bits::empty(3)).unwrap(), x);
        assert!(s.membership(&x).unwrap());
    }

    #[test]
    fn membership_rejects() {
        let s = u13_span();
        assert!(!s.membership(&v(&[Some(0), Some(1), None])).unwrap());
    }

    #[test]
    fn membership_of_generators() {
        let s = u13_span();
        for g in s.generators() {
            assert!(s.membership(g).unwrap());
        }
    }

    #[test]
    fn elimination_witness_forced() {
        let s = MinPlusSpan::new(
            4,
            vec![
                v(&[Some(0), Some(0), None, None]),
                v(&[None, None, Some(0), Some(0)]),
            ],
        )
        .unwrap();
        let f = v(&[Some(0), Some(0), Some(0), Some(0)]);
        let g = v(&[Some(0), Some(0), None, None]);
        let h = s.elimination_witness(&f, &g, 0).unwrap();
        assert_eq!(h, Some(v(&[None, None, Some(0), Some(0)])));
    }

    #[test]
    fn elimination_witness_boolean_circuits() {
        let s = u13_span();
        let f = v(&[Some(0), Some(0), None]);
        let g = v(&[Some(0), None, Some(0)]);
        let h = s.elimination_witness(&f, &g, 0).unwrap();
        assert_eq!(h, Some(v(&[None, Some(0), Some(0)])));
    }

    #[test]
    fn elimination_witness_equal_vectors() {
        // f = g only requires vanishing at i plus domination; all-infinity works.
        let s = u13_span();
        let f = v(&[Some(0), Some(0), None]);
        let h = s.elimination_witness(&f, &f, 1).unwrap();
        assert!(h.is_some());
        let h = h.unwrap();
        assert!(!h.0[1].is_finite());
        assert!(h.dominates(&f));
    }

    #[test]
    fn elimination_pivot_errors() {
        let s = u13_span();
        let f = v(&[Some(0), Some(0), None]);
        let g = v(&[Some(1), Some(0), None]);
        assert!(s.elimination_witness(&f, &g, 0).is_err());
        assert!(s.elimination_witness(&f, &g, 2).is_err());
    }

    #[test]
    fn axiom_single_generator() {
        let s = MinPlusSpan::new(3, vec![v(&[Some(0), Some(0), Some(0)])]).unwrap();
        assert!(s.is_tropical_linear_space().passed);
    }

    #[test]
    fn axiom_u13() {
        let c = u13_span().is_tropical_linear_space();
        assert!(c.passed);
        assert!(c.family_size >= 3);
    }

    #[test]
    fn axiom_negative() {
        let s = MinPlusSpan::new(
            3,
            vec![
                v(&[Some(0), None, Some(0)]),
                v(&[Some(0), Some(0), None]),
                v(&[None, Some(0), Some(1)]),
            ],
        )
        .unwrap();
        let c = s.is_tropical_linear_space();
        assert!(!c.passed);
        let (f, g, i) = c.counterexample.unwrap();
        // No element of the span vanishes at the pivot while matching f ⊕ g on
        // the disagreement coordinates: brute-force over scalings of the only
        // generator avoiding the pivot confirms the witness is genuine.
        assert!(s.elimination_witness(&f, &g, i).unwrap().is_none());
    }

    #[test]
    fn circuit_complete_antichain() {
        assert!(u13_span().is_circuit_complete());
        let s = MinPlusSpan::new(
            3,
            vec![v(&[Some(0), Some(0), None]), v(&[Some(0), Some(0), Some(0)])],
        )
        .unwrap();
        assert!(!s.is_circuit_complete());
    }

    #[test]
    fn rejects_bad_generators() {
        assert!(matches!(
            MinPlusSpan::new(3, vec![TropVector::all_infinity(3)]),
            Err(TropError::InfiniteGenerator { .. })
        ));
        assert!(matches!(
            MinPlusSpan::new(3, vec![v(&[Some(0), None])]),
            Err(TropError::LengthMismatch { .. })
        ));
    }
}
