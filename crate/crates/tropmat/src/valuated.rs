//! Valuated matroids and tropical linear spaces.
//!
//! A space is represented by its list of valuated circuits, never by basis
//! valuations: degree slices of ideals live in ambient dimension up to ~300
//! where basis enumeration is infeasible. Basis-valuation form is supported
//! for small ground sets and converted through fundamental circuits.

use std::collections::BTreeMap;

use num::{BigRational, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matroid::{elements_of, mask_of, Matroid, MatroidError};
use crate::trop::{Bits, MinPlusSpan, TropError, TropValue, TropVector};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ValuatedError {
    #[error(transparent)]
    Trop(#[from] TropError),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
    #[error("generator supports are not an antichain: the list is not circuit-complete")]
    NotCircuitComplete,
    #[error("two circuits share a support but are not tropical multiples")]
    InconsistentCircuits,
    #[error("valuated exchange fails for bases {0:?} and {1:?}")]
    ValuatedExchange(Vec<usize>, Vec<usize>),
    #[error("valuation must assign a finite value to every basis")]
    IncompleteValuation,
    #[error("circuit completion did not stabilise within {0} rounds")]
    CompletionDiverged(usize),
    #[error("input spaces must be Boolean")]
    NotBoolean,
    #[error("ground set too large for this operation: {0}")]
    TooLarge(usize),
}

/// A tropical linear space given by (valuated) circuits.
///
/// `dim = |N| - rank(M(L))` where the underlying matroid's circuits are the
/// generator supports; the rank is computed by greedy extension against the
/// circuit family.
#[derive(Debug, Clone, PartialEq)]
pub struct TropicalLinearSpace {
    span: MinPlusSpan,
    rank: usize,
}

impl TropicalLinearSpace {
    /// Builds a space from a circuit list; supports must be an antichain.
    pub fn from_circuits(n: usize, circuits: Vec<TropVector>) -> Result<Self, ValuatedError> {
        let span = MinPlusSpan::new(n, circuits)?;
        if !span.is_circuit_complete() {
            return Err(ValuatedError::NotCircuitComplete);
        }
        let rank = greedy_rank(n, span.supports());
        Ok(TropicalLinearSpace { span, rank })
    }

    /// The zero space `{(∞,..,∞)}`.
    pub fn zero(n: usize) -> Self {
        TropicalLinearSpace {
            span: MinPlusSpan::new(n, Vec::new()).expect("empty generator list"),
            rank: n,
        }
    }

    pub fn ambient(&self) -> usize {
        self.span.ground_size()
    }

    pub fn span(&self) -> &MinPlusSpan {
        &self.span
    }

    pub fn circuits(&self) -> &[TropVector] {
        self.span.generators()
    }

    pub fn is_zero(&self) -> bool {
        self.span.generators().is_empty()
    }

    /// Rank of the underlying matroid `M(L)`.
    pub fn underlying_rank(&self) -> usize {
        self.rank
    }

    /// `dim L = |N| - rk M(L)`.
    pub fn dim(&self) -> usize {
        self.ambient() - self.rank
    }

    /// Materialises `M(L)` with explicit bases; only for small ground sets.
    pub fn underlying_matroid(&self) -> Result<Matroid, ValuatedError> {
        matroid_from_circuits(self.ambient(), self.span.supports())
    }
}

/// Maximal-independent-set rank against a circuit family: valid whenever the
/// family is the circuit set of a matroid, which holds for every space this
/// crate constructs.
pub fn greedy_rank(n: usize, circuits: &[Bits]) -> usize {
    let mut current = Bits::empty(n);
    let mut size = 0;
    for e in 0..n {
        current.set(e);
        size += 1;
        if circuits.iter().any(|c| c.is_subset_of(&current)) {
            current.clear(e);
            size -= 1;
        }
    }
    size
}

/// Explicit matroid from a circuit family on a small ground set.
pub fn matroid_from_circuits(n: usize, circuits: &[Bits]) -> Result<Matroid, ValuatedError> {
    if n > 20 {
        return Err(ValuatedError::TooLarge(n));
    }
    let masks: Vec<u32> = circuits
        .iter()
        .map(|c| c.iter_ones().fold(0u32, |m, i| m | 1 << i))
        .collect();
    let independent = |a: u32| masks.iter().all(|&c| c & !a != 0 || c == 0);
    let rank = {
        let mut acc = 0u32;
        for e in 0..n {
            if independent(acc | 1 << e) {
                acc |= 1 << e;
            }
        }
        acc.count_ones() as usize
    };
    let mut bases = Vec::new();
    for mask in 0..(1u32 << n) {
        if mask.count_ones() as usize == rank && independent(mask) {
            bases.push(elements_of(mask));
        }
    }
    Ok(Matroid::from_bases(n, bases)?)
}

/// A matroid with a finite basis valuation (non-bases implicitly `∞`).
#[derive(Debug, Clone)]
pub struct ValuatedMatroid {
    matroid: Matroid,
    valuation: BTreeMap<u32, BigRational>,
}

impl ValuatedMatroid {
    pub fn new(
        matroid: Matroid,
        valuation: BTreeMap<u32, BigRational>,
    ) -> Result<Self, ValuatedError> {
        for &b in matroid.bases() {
            if !valuation.contains_key(&b) {
                return Err(ValuatedError::IncompleteValuation);
            }
        }
        let vm = ValuatedMatroid { matroid, valuation };
        vm.validate_exchange()?;
        Ok(vm)
    }

    /// Boolean valuation: every basis gets value 0.
    pub fn boolean(matroid: Matroid) -> Self {
        let valuation = matroid
            .bases()
            .iter()
            .map(|&b| (b, BigRational::zero()))
            .collect();
        ValuatedMatroid { matroid, valuation }
    }

    pub fn matroid(&self) -> &Matroid {
        &self.matroid
    }

    pub fn value(&self, basis: u32) -> Option<&BigRational> {
        self.valuation.get(&basis)
    }

    /// Exhaustive valuated exchange: for bases `B1, B2` and `x ∈ B1∖B2` some
    /// `y ∈ B2∖B1` has `v(B1) + v(B2) ≥ v(B1-x+y) + v(B2-y+x)`.
    pub fn validate_exchange(&self) -> Result<(), ValuatedError> {
        for &b1 in self.matroid.bases() {
            for &b2 in self.matroid.bases() {
                let lhs = &self.valuation[&b1] + &self.valuation[&b2];
                for x in elements_of(b1 & !b2) {
                    let ok = elements_of(b2 & !b1).into_iter().any(|y| {
                        let c1 = b1 & !(1 << x) | 1 << y;
                        let c2 = b2 & !(1 << y) | 1 << x;
                        match (self.valuation.get(&c1), self.valuation.get(&c2)) {
                            (Some(v1), Some(v2)) => lhs >= v1 + v2,
                            _ => false,
                        }
                    });
                    if !ok {
                        return Err(ValuatedError::ValuatedExchange(
                            elements_of(b1),
                            elements_of(b2),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// The valuated circuits, via fundamental circuits: for a basis `B` and
    /// `e ∉ B` the vector `c_f = v(B + e - f)` on the fundamental circuit of
    /// `e`, normalized and deduplicated.
    pub fn circuits(&self) -> Result<Vec<TropVector>, ValuatedError> {
        let n = self.matroid.ground_size();
        let mut by_support: BTreeMap<u32, TropVector> = BTreeMap::new();
        for &b in self.matroid.bases() {
            for e in 0..n {
                if b >> e & 1 == 1 {
                    continue;
                }
                let mut support = vec![e];
                for f in elements_of(b) {
                    if self.matroid.is_basis(b & !(1 << f) | 1 << e) {
                        support.push(f);
                    }
                }
                support.sort_unstable();
                let mut vec = TropVector::all_infinity(n);
                for &f in &support {
                    let swapped = if f == e { b } else { b & !(1 << f) | 1 << e };
                    vec.0[f] = TropValue::Finite(self.valuation[&swapped].clone());
                }
                let vec = vec.normalized();
                let key = mask_of(&support);
                match by_support.get(&key) {
                    None => {
                        by_support.insert(key, vec);
                    }
                    Some(prev) => {
                        if *prev != vec {
                            return Err(ValuatedError::InconsistentCircuits);
                        }
                    }
                }
            }
        }
        Ok(by_support.into_values().collect())
    }

    pub fn to_linear_space(&self) -> Result<TropicalLinearSpace, ValuatedError> {
        TropicalLinearSpace::from_circuits(self.matroid.ground_size(), self.circuits()?)
    }

    /// The initial matroid at `w`: bases minimising `v(B) - Σ_{i∈B} w_i`.
    ///
    /// The sign convention is pinned by the vector-level oracle: circuits of
    /// the result are the minimal supports among `argmin_i (c_i + w_i)`
    /// selections of the valuated circuits.
    pub fn initial_matroid(&self, w: &[BigRational]) -> Result<Matroid, ValuatedError> {
        let n = self.matroid.ground_size();
        assert_eq!(w.len(), n);
        let mut best: Option<BigRational> = None;
        let mut argmin: Vec<u32> = Vec::new();
        for (&b, v) in &self.valuation {
            let mut val = v.clone();
            for i in elements_of(b) {
                val -= &w[i];
            }
            match &best {
                None => {
                    best = Some(val);
                    argmin = vec![b];
                }
                Some(cur) => {
                    if val < *cur {
                        best = Some(val);
                        argmin = vec![b];
                    } else if val == *cur {
                        argmin.push(b);
                    }
                }
            }
        }
        let bases = argmin.into_iter().map(elements_of).collect();
        Ok(Matroid::from_bases(n, bases)?)
    }
}

/// The `argmin_i (c_i + w_i)` support selection of a circuit vector.
pub fn initial_selection(c: &TropVector, w: &[BigRational]) -> Bits {
    let mut best: Option<BigRational> = None;
    for (i, v) in c.0.iter().enumerate() {
        if let TropValue::Finite(cv) = v {
            let val = cv + &w[i];
            if best.as_ref().is_none_or(|b| val < *b) {
                best = Some(val);
            }
        }
    }
    let mut out = Bits::empty(c.len());
    if let Some(min) = best {
        for (i, v) in c.0.iter().enumerate() {
            if let TropValue::Finite(cv) = v {
                if cv + &w[i] == min {
                    out.set(i);
                }
            }
        }
    }
    out
}

/// Nonzero vector in the intersection of two Boolean spaces, if any: a
/// support realizable in both is a common union of circuit supports, and the
/// Boolean vector on it lies in both spans.
pub fn boolean_intersection(
    l1: &TropicalLinearSpace,
    l2: &TropicalLinearSpace,
) -> Result<Option<TropVector>, ValuatedError> {
    if !l1.span().is_boolean() || !l2.span().is_boolean() {
        return Err(ValuatedError::NotBoolean);
    }
    let n = l1.ambient();
    if n != l2.ambient() {
        return Err(TropError::LengthMismatch { expected: n, got: l2.ambient() }.into());
    }
    if n > 16 {
        return Err(ValuatedError::TooLarge(n));
    }
    let union_of = |circuits: &[Bits], t: &Bits| -> bool {
        let mut covered = Bits::empty(n);
        for c in circuits {
            if c.is_subset_of(t) {
                covered.union_with(c);
            }
        }
        covered == *t
    };
    for mask in 1u32..(1 << n) {
        let mut t = Bits::empty(n);
        for e in 0..n {
            if mask >> e & 1 == 1 {
                t.set(e);
            }
        }
        if union_of(l1.span().supports(), &t) && union_of(l2.span().supports(), &t) {
            let v = TropVector::from_support(n, &t.iter_ones().collect::<Vec<_>>());
            debug_assert!(l1.span().membership(&v).unwrap());
            debug_assert!(l2.span().membership(&v).unwrap());
            return Ok(Some(v));
        }
    }
    Ok(None)
}

/// Closes a generating set under elimination and extracts the circuit list
/// (minimal-support vectors). New vectors are added only when the witness is
/// forced: every non-pivot coordinate of `f ⊕ g` is a disagreement
/// coordinate, so the witness is determined outright. Pairs whose witness is
/// neither present nor forced are left to the downstream elimination check.
pub fn circuit_complete(n: usize, gens: &[TropVector]) -> Result<Vec<TropVector>, ValuatedError> {
    const MAX_ROUNDS: usize = 64;
    let mut work: Vec<TropVector> = Vec::new();
    for g in gens {
        if g.len() != n {
            return Err(TropError::LengthMismatch { expected: n, got: g.len() }.into());
        }
        if !g.is_zero_vector() {
            let g = g.normalized();
            if !work.contains(&g) {
                work.push(g);
            }
        }
    }

    for round in 0..=MAX_ROUNDS {
        if round == MAX_ROUNDS {
            return Err(ValuatedError::CompletionDiverged(MAX_ROUNDS));
        }
        let span = MinPlusSpan::new(n, work.clone())?;
        let mut added = Vec::new();
        for (a, f) in work.iter().enumerate() {
            for g in work.iter().skip(a + 1) {
                for i in 0..n {
                    let (fi, gi) = match (f.0[i].as_finite(), g.0[i].as_finite()) {
                        (Some(x), Some(y)) => (x, y),
                        _ => continue,
                    };
                    let shifted = g.scale(&TropValue::Finite(fi - gi));
                    if span
                        .elimination_witness(f, &shifted, i)
                        .expect("pivot normalized")
                        .is_some()
                    {
                        continue;
                    }
                    let v = f.oplus(&shifted);
                    let forced = (0..n).all(|j| j == i || !v.0[j].is_finite() || f.0[j] != shifted.0[j]);
                    if forced {
                        let mut h = v.clone();
                        h.0[i] = TropValue::Infinity;
                        let h = h.normalized();
                        if !h.is_zero_vector() && !work.contains(&h) && !added.contains(&h) {
                            added.push(h);
                        }
                    }
                }
            }
        }
        if added.is_empty() {
            break;
        }
        work.extend(added);
    }

    // Keep the minimal supports; everything else must already be spanned.
    let supports: Vec<Bits> = work.iter().map(|v| v.support()).collect();
    let minimal: Vec<usize> = (0..work.len())
        .filter(|&i| {
            !supports
                .iter()
                .enumerate()
                .any(|(j, s)| j != i && s.is_subset_of(&supports[i]) && *s != supports[i])
        })
        .collect();
    let mut circuits: Vec<TropVector> = Vec::new();
    for &i in &minimal {
        let v = &work[i];
        match circuits.iter().find(|c| c.support() == supports[i]) {
            None => circuits.push(v.clone()),
            Some(existing) => {
                if existing != v {
                    return Err(ValuatedError::InconsistentCircuits);
                }
            }
        }
    }
    circuits.sort_by(|a, b| {
        a.support().cmp(&b.support()).then_with(|| a.0.cmp(&b.0))
    });
    let span = MinPlusSpan::new(n, circuits.clone())?;
    for v in &work {
        if !span.membership(v)? {
            return Err(ValuatedError::InconsistentCircuits);
        }
    }
    Ok(circuits)
}

/// JSON form of a tropical linear space: `{"format":"tls/v1", ...}`.
#[derive(Serialize, Deserialize)]
pub struct TlsJson {
    pub format: String,
    pub n: usize,
    pub circuits: Vec<TlsCircuitJson>,
}

#[derive(Serialize, Deserialize)]
pub struct TlsCircuitJson {
    pub coords: Vec<TropValue>,
}

impl TropicalLinearSpace {
    pub fn to_json(&self) -> TlsJson {
        TlsJson {
            format: "tls/v1".to_string(),
            n: self.ambient(),
            circuits: self
                .circuits()
                .iter()
                .map(|c| TlsCircuitJson { coords: c.0.clone() })
                .collect(),
        }
    }

    pub fn from_json(j: &TlsJson) -> Result<Self, ValuatedError> {
        Self::from_circuits(j.n, j.circuits.iter().map(|c| TropVector(c.coords.clone())).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;

    fn q(k: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(k))
    }

    fn boolean_space(n: usize, supports: &[&[usize]]) -> TropicalLinearSpace {
        TropicalLinearSpace::from_circuits(
            n,
            supports.iter().map(|s| TropVector::from_support(n, s)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn underlying_matroid_u23() {
        let l = boolean_space(3, &[&[0, 1, 2]]);
        assert_eq!(l.underlying_matroid().unwrap(), Matroid::uniform(2, 3));
        assert_eq!(l.dim(), 1);
    }

    #[test]
    fn underlying_matroid_u13() {
        let l = boolean_space(3, &[&[0, 1], &[0, 2], &[1, 2]]);
        assert_eq!(l.underlying_matroid().unwrap(), Matroid::uniform(1, 3));
        assert_eq!(l.dim(), 2);
    }

    #[test]
    fn non_antichain_rejected() {
        let r = TropicalLinearSpace::from_circuits(
            3,
            vec![
                TropVector::from_support(3, &[0, 1]),
                TropVector::from_support(3, &[0, 1, 2]),
            ],
        );
        assert_eq!(r.unwrap_err(), ValuatedError::NotCircuitComplete);
    }

    #[test]
    fn initial_matroid_rank_one() {
        let m = Matroid::uniform(1, 2);
        let mut val = BTreeMap::new();
        val.insert(1u32, q(0));
        val.insert(2u32, q(0));
        let vm = ValuatedMatroid::new(m, val).unwrap();
        let init = vm.initial_matroid(&[q(0), q(1)]).unwrap();
        assert_eq!(init.bases(), &[2]);
        // Vector-level oracle: the lone circuit (0,0) selects coordinate 0.
        let c = &vm.circuits().unwrap()[0];
        let sel = initial_selection(c, &[q(0), q(1)]);
        assert_eq!(sel.iter_ones().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn initial_matroid_boolean_identity() {
        let vm = ValuatedMatroid::boolean(Matroid::uniform(2, 3));
        let init = vm.initial_matroid(&[q(0), q(0), q(0)]).unwrap();
        assert_eq!(init, Matroid::uniform(2, 3));
    }

    #[test]
    fn initial_matroid_u23_weighted() {
        let vm = ValuatedMatroid::boolean(Matroid::uniform(2, 3));
        let init = vm.initial_matroid(&[q(1), q(0), q(0)]).unwrap();
        assert_eq!(init.circuits(), &[mask_of(&[1, 2])]);
        let c = &vm.circuits().unwrap()[0];
        let sel = initial_selection(c, &[q(1), q(0), q(0)]);
        assert_eq!(sel.iter_ones().collect::<Vec<_>>(), vec![1, 2]);
    }

    #[test]
    fn boolean_intersection_u13() {
        let l = boolean_space(3, &[&[0, 1], &[0, 2], &[1, 2]]);
        let v = boolean_intersection(&l, &l).unwrap().unwrap();
        assert!(!v.is_zero_vector());
        assert!(l.span().membership(&v).unwrap());
    }

    #[test]
    fn boolean_intersection_single_circuit() {
        let l = boolean_space(3, &[&[0, 1, 2]]);
        let v = boolean_intersection(&l, &l).unwrap().unwrap();
        assert_eq!(v, TropVector::from_support(3, &[0, 1, 2]));
    }

    #[test]
    fn boolean_intersection_disjoint_circuits() {
        let l1 = boolean_space(2, &[&[0, 1]]);
        let l2 = boolean_space(2, &[&[0, 1]]);
        let v = boolean_intersection(&l1, &l2).unwrap().unwrap();
        assert_eq!(v, TropVector::from_support(2, &[0, 1]));
    }

    #[test]
    fn circuit_complete_fixed_point() {
        let gens = vec![
            TropVector::from_support(3, &[0, 1]),
            TropVector::from_support(3, &[0, 2]),
            TropVector::from_support(3, &[1, 2]),
        ];
        let out = circuit_complete(3, &gens).unwrap();
        assert_eq!(out.len(), 3);
    }

    #[test]
    fn circuit_complete_adds_elimination() {
        // Boolean shadow of the GF(2) span of (1,1,0) and (0,1,1): the third
        // circuit {0,2} arises by eliminating the middle coordinate.
        let gens = vec![
            TropVector::from_support(3, &[0, 1]),
            TropVector::from_support(3, &[1, 2]),
        ];
        let out = circuit_complete(3, &gens).unwrap();
        let supports: Vec<Vec<usize>> =
            out.iter().map(|c| c.support().iter_ones().collect()).collect();
        assert_eq!(supports, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn circuit_complete_single_generator() {
        let gens = vec![TropVector::from_ints(&[Some(3), Some(0), None])];
        let out = circuit_complete(3, &gens).unwrap();
        assert_eq!(out, vec![TropVector::from_ints(&[Some(3), Some(0), None])]);
    }

    #[test]
    fn valuated_exchange_rejects() {
        // U_{2,4} with a valuation violating the tropical Plücker relation.
        let m = Matroid::uniform(2, 4);
        let mut val = BTreeMap::new();
        for &b in m.bases() {
            val.insert(b, q(0));
        }
        val.insert(mask_of(&[0, 1]), q(-5));
        assert!(ValuatedMatroid::new(m, val).is_err());
    }

    #[test]
    fn tls_json_roundtrip() {
        let l = boolean_space(3, &[&[0, 1], &[0, 2], &[1, 2]]);
        let s = serde_json::to_string(&l.to_json()).unwrap();
        let back: TlsJson = serde_json::from_str(&s).unwrap();
        assert_eq!(TropicalLinearSpace::from_json(&back).unwrap(), l);
    }
}
