//! Tropical polynomials and the canonical monomial order.
//!
//! Monomials of degree at most `d` are indexed by ascending total degree and
//! then ascending lexicographic order on exponent tuples; the order is part
//! of the file formats and must stay bit-stable.

use std::collections::{BTreeMap, HashMap};

use num::{BigRational, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::trop::{TropValue, TropVector};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("weight vector length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("polynomial degree {deg} exceeds requested bound {bound}")]
    DegreeOverflow { deg: usize, bound: usize },
    #[error("exponent vector has wrong arity")]
    BadExponents,
}

/// Index table for `Mon_{<=d}` in `n` variables under the canonical
/// (degree, lex) order. `Mon_{<=e}` for `e <= d` is a prefix of the table.
#[derive(Debug, Clone)]
pub struct MonomialTable {
    n: usize,
    dmax: usize,
    exps: Vec<Vec<u16>>,
    index: HashMap<Vec<u16>, usize>,
    prefix: Vec<usize>,
}

impl MonomialTable {
    pub fn new(n: usize, dmax: usize) -> Self {
        let mut exps: Vec<Vec<u16>> = Vec::new();
        let mut prefix = Vec::with_capacity(dmax + 2);
        prefix.push(0);
        for d in 0..=dmax {
            let mut layer = Vec::new();
            let mut cur = vec![0u16; n];
            gen_exponents(n, d as u16, 0, &mut cur, &mut layer);
            layer.sort();
            exps.extend(layer);
            prefix.push(exps.len());
        }
        let index = exps
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        MonomialTable { n, dmax, exps, index, prefix }
    }

    pub fn vars(&self) -> usize {
        self.n
    }

    pub fn max_degree(&self) -> usize {
        self.dmax
    }

    /// `|Mon_{<=d}| = C(n+d, d)`.
    pub fn count_le(&self, d: usize) -> usize {
        self.prefix[d.min(self.dmax) + 1]
    }

    pub fn index_of(&self, e: &[u16]) -> Option<usize> {
        self.index.get(e).copied()
    }

    pub fn exponents(&self, i: usize) -> &[u16] {
        &self.exps[i]
    }

    pub fn degree_of(&self, i: usize) -> usize {
        self.exps[i].iter().map(|&x| x as usize).sum()
    }

    /// Index of `x_var * m_i`, if still inside the table.
    pub fn shift_index(&self, i: usize, var: usize) -> Option<usize> {
        let mut e = self.exps[i].clone();
        e[var] += 1;
        self.index_of(&e)
    }
}

fn gen_exponents(n: usize, remaining: u16, pos: usize, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
    if pos == n {
        if remaining == 0 {
            out.push(cur.clone());
        }
        return;
    }
    if pos + 1 == n {
        cur[pos] = remaining;
        out.push(cur.clone());
        cur[pos] = 0;
        return;
    }
    for v in 0..=remaining {
        cur[pos] = v;
        gen_exponents(n, remaining - v, pos + 1, cur, out);
        cur[pos] = 0;
    }
}

/// JSON form of a single term.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u16>,
    pub coef: TropValue,
}

/// A tropical polynomial: a finitely supported map from exponent vectors to
/// finite coefficients. The empty map is the additive zero (the polynomial
/// `∞`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropPolynomial {
    n: usize,
    terms: BTreeMap<Vec<u16>, BigRational>,
}

impl TropPolynomial {
    pub fn new(n: usize) -> Self {
        TropPolynomial { n, terms: BTreeMap::new() }
    }

    /// Inserts a term, keeping the tropically smaller coefficient on clashes.
    pub fn insert(&mut self, exp: Vec<u16>, coef: BigRational) -> Result<(), PolyError> {
        if exp.len() != self.n {
            return Err(PolyError::BadExponents);
        }
        self.terms
            .entry(exp)
            .and_modify(|c| {
                if coef < *c {
                    *c = coef.clone();
                }
            })
            .or_insert(coef);
        Ok(())
    }

    pub fn from_terms(n: usize, terms: &[(Vec<u16>, BigRational)]) -> Result<Self, PolyError> {
        let mut p = Self::new(n);
        for (e, c) in terms {
            p.insert(e.clone(), c.clone())?;
        }
        Ok(p)
    }

    /// Boolean polynomial (all coefficients 0) on the given exponent support.
    pub fn from_support(n: usize, support: &[Vec<u16>]) -> Result<Self, PolyError> {
        let zero = BigRational::zero();
        Self::from_terms(
            n,
            &support.iter().map(|e| (e.clone(), zero.clone())).collect::<Vec<_>>(),
        )
    }

    pub fn vars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u16>, &BigRational)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as usize).sum())
            .max()
            .unwrap_or(0)
    }

    /// `min_u (c_u + u·w)`; `∞` for the zero polynomial.
    pub fn evaluate(&self, w: &[BigRational]) -> Result<TropValue, PolyError> {
        if w.len() != self.n {
            return Err(PolyError::LengthMismatch { expected: self.n, got: w.len() });
        }
        let mut best: Option<BigRational> = None;
        for (e, c) in &self.terms {
            let val = c + dot(e, w);
            best = Some(match best {
                None => val,
                Some(b) => b.min(val),
            });
        }
        Ok(best.map_or(TropValue::Infinity, TropValue::Finite))
    }

    /// The initial part: the Boolean polynomial on the monomials attaining
    /// the evaluation minimum.
    pub fn initial_form(&self, w: &[BigRational]) -> Result<TropPolynomial, PolyError> {
        let min = match self.evaluate(w)? {
            TropValue::Infinity => return Ok(TropPolynomial::new(self.n)),
            TropValue::Finite(m) => m,
        };
        let mut out = TropPolynomial::new(self.n);
        for (e, c) in &self.terms {
            if c + dot(e, w) == min {
                out.insert(e.clone(), BigRational::zero())?;
            }
        }
        Ok(out)
    }

    /// Multiplication by the monomial with exponent vector `u`.
    pub fn monomial_multiply(&self, u: &[u16]) -> Result<TropPolynomial, PolyError> {
        if u.len() != self.n {
            return Err(PolyError::BadExponents);
        }
        let mut out = TropPolynomial::new(self.n);
        for (e, c) in &self.terms {
            let shifted: Vec<u16> = e.iter().zip(u).map(|(a, b)| a + b).collect();
            out.insert(shifted, c.clone())?;
        }
        Ok(out)
    }

    /// Homogenisation in `n + 1` variables, the new variable `x_0` first:
    /// each term is padded with the power of `x_0` reaching `deg(self)`.
    pub fn homogenise(&self) -> TropPolynomial {
        let deg = self.degree() as u16;
        let mut out = TropPolynomial::new(self.n + 1);
        for (e, c) in &self.terms {
            let d: u16 = e.iter().sum();
            let mut exp = Vec::with_capacity(self.n + 1);
            exp.push(deg - d);
            exp.extend_from_slice(e);
            out.insert(exp, c.clone()).expect("arity fixed");
        }
        out
    }

    /// The coefficient vector in `(Q ∪ {∞})^{Mon_{<=d}}` under the canonical
    /// order of `table`.
    pub fn coefficient_vector(&self, table: &MonomialTable, d: usize) -> Result<TropVector, PolyError> {
        if self.degree() > d {
            return Err(PolyError::DegreeOverflow { deg: self.degree(), bound: d });
        }
        let mut v = TropVector::all_infinity(table.count_le(d));
        for (e, c) in &self.terms {
            let idx = table.index_of(e).ok_or(PolyError::BadExponents)?;
            v.0[idx] = TropValue::Finite(c.clone());
        }
        Ok(v)
    }

    pub fn to_terms_json(&self) -> Vec<TermJson> {
        self.terms
            .iter()
            .map(|(e, c)| TermJson { exp: e.clone(), coef: TropValue::Finite(c.clone()) })
            .collect()
    }

    pub fn from_terms_json(n: usize, terms: &[TermJson]) -> Result<Self, PolyError> {
        let mut p = Self::new(n);
        for t in terms {
            if let TropValue::Finite(c) = &t.coef {
                p.insert(t.exp.clone(), c.clone())?;
            }
        }
        Ok(p)
    }
}

fn dot(e: &[u16], w: &[BigRational]) -> BigRational {
    let mut acc = BigRational::zero();
    for (a, b) in e.iter().zip(w) {
        if *a != 0 {
            acc += BigRational::from_integer((*a).into()) * b;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;

    fn q(k: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(k))
    }

    #[test]
    fn table_counts_and_order() {
        let t = MonomialTable::new(2, 2);
        assert_eq!(t.count_le(2), 6);
        assert_eq!(t.count_le(1), 3);
        let order: Vec<&[u16]> = (0..6).map(|i| t.exponents(i)).collect();
        assert_eq!(
            order,
            vec![
                &[0u16, 0][..],
                &[0, 1],
                &[1, 0],
                &[0, 2],
                &[1, 1],
                &[2, 0]
            ]
        );
        assert_eq!(t.index_of(&[1, 1]), Some(4));
    }

    #[test]
    fn table_matches_binomial() {
        for n in 1..=5usize {
            for d in 0..=3usize {
                let t = MonomialTable::new(n, d);
                let mut binom = 1usize;
                for i in 1..=d {
                    binom = binom * (n + i) / i;
                }
                assert_eq!(t.count_le(d), binom);
            }
        }
    }

    #[test]
    fn evaluate_examples() {
        // 0 ⊕ x_1 at w = (1): min(0, 0 + 1) = 0.
        let f = TropPolynomial::from_terms(1, &[(vec![0], q(0)), (vec![1], q(0))]).unwrap();
        assert_eq!(f.evaluate(&[q(1)]).unwrap(), TropValue::from_int(0));
        let empty = TropPolynomial::new(2);
        assert_eq!(empty.evaluate(&[q(3), q(4)]).unwrap(), TropValue::Infinity);
        // 1⊙x1 ⊕ 1⊙x2 ⊕ 3 at w = 0.
        let g = TropPolynomial::from_terms(
            2,
            &[(vec![1, 0], q(1)), (vec![0, 1], q(1)), (vec![0, 0], q(3))],
        )
        .unwrap();
        assert_eq!(g.evaluate(&[q(0), q(0)]).unwrap(), TropValue::from_int(1));
    }

    #[test]
    fn initial_form_examples() {
        let f = TropPolynomial::from_terms(1, &[(vec![0], q(0)), (vec![1], q(0))]).unwrap();
        let init = f.initial_form(&[q(1)]).unwrap();
        assert_eq!(init.terms().count(), 1);
        assert!(init.terms().next().unwrap().0 == &vec![0]);

        let g = TropPolynomial::from_terms(
            2,
            &[(vec![1, 0], q(1)), (vec![0, 1], q(1)), (vec![0, 0], q(3))],
        )
        .unwrap();
        let init = g.initial_form(&[q(0), q(0)]).unwrap();
        let supp: Vec<_> = init.terms().map(|(e, _)| e.clone()).collect();
        assert_eq!(supp, vec![vec![0, 1], vec![1, 0]]);

        let mono = TropPolynomial::from_terms(2, &[(vec![2, 1], q(5))]).unwrap();
        let init = mono.initial_form(&[q(7), q(-2)]).unwrap();
        assert_eq!(init.terms().next().unwrap().0, &vec![2, 1]);
    }

    #[test]
    fn initial_form_idempotent() {
        let g = TropPolynomial::from_terms(
            2,
            &[(vec![1, 0], q(1)), (vec![0, 1], q(1)), (vec![0, 0], q(3))],
        )
        .unwrap();
        let w = [q(0), q(0)];
        let once = g.initial_form(&w).unwrap();
        assert_eq!(once.initial_form(&w).unwrap(), once);
    }

    #[test]
    fn multiply_and_homogenise() {
        // x1 ⊙ (0 ⊕ x2) = x1 ⊕ x1 x2.
        let f = TropPolynomial::from_terms(2, &[(vec![0, 0], q(0)), (vec![0, 1], q(0))]).unwrap();
        let g = f.monomial_multiply(&[1, 0]).unwrap();
        let supp: Vec<_> = g.terms().map(|(e, _)| e.clone()).collect();
        assert_eq!(supp, vec![vec![1, 0], vec![1, 1]]);

        // (0 ⊕ x1) homogenised: x0 ⊕ x1.
        let h = TropPolynomial::from_terms(1, &[(vec![0], q(0)), (vec![1], q(0))])
            .unwrap()
            .homogenise();
        let supp: Vec<_> = h.terms().map(|(e, _)| e.clone()).collect();
        assert_eq!(supp, vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn homogenise_preserves_evaluation() {
        let f = TropPolynomial::from_terms(
            2,
            &[(vec![0, 0], q(2)), (vec![1, 1], q(0)), (vec![0, 1], q(1))],
        )
        .unwrap();
        let w = [q(3), q(-1)];
        let mut w0 = vec![q(0)];
        w0.extend_from_slice(&w);
        assert_eq!(f.evaluate(&w).unwrap(), f.homogenise().evaluate(&w0).unwrap());
    }

    #[test]
    fn coefficient_vector_layout() {
        let t = MonomialTable::new(2, 2);
        let f = TropPolynomial::from_terms(2, &[(vec![1, 1], q(4))]).unwrap();
        let v = f.coefficient_vector(&t, 2).unwrap();
        assert_eq!(v.0[4], TropValue::from_int(4));
        assert_eq!(v.support().count(), 1);
        assert!(f.coefficient_vector(&t, 1).is_err());
    }
}
