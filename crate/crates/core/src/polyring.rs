//! Multivariate polynomials over the rationals, with Groebner machinery.
//!
//! Variables are written T1, T2, ... Polynomials keep their terms sorted
//! (degree reverse lexicographic, T1 largest) with no zero coefficients, so
//! structural equality is semantic equality. The Groebner engine implements
//! Buchberger's algorithm with the Gebauer-Moeller pair criteria and the
//! normal selection strategy; bases come back reduced, monic and sorted, so
//! they are canonical for the ideal and the order.

use crate::deadline;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use thiserror::Error;

pub type Expvec = Vec<u32>;

/// Subsets of the variable set as bitmasks, variable i at bit i.
pub type VarMask = u128;

pub const MAX_VARS: usize = 128;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("empty polynomial expression")]
    Empty,
    #[error("unexpected character {ch:?} at byte {pos}")]
    Unexpected { pos: usize, ch: char },
    #[error("unexpected end of expression")]
    UnexpectedEnd,
    #[error("variable T{index} out of range, the ring has {nvars} variables")]
    BadVariable { index: usize, nvars: usize },
    #[error("malformed number at byte {pos}")]
    BadNumber { pos: usize },
    #[error("zero denominator at byte {pos}")]
    ZeroDenominator { pos: usize },
}

fn total_degree(e: &Expvec) -> u64 {
    e.iter().map(|&x| x as u64).sum()
}

fn exp_add(a: &Expvec, b: &Expvec) -> Expvec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn exp_sub(a: &Expvec, b: &Expvec) -> Expvec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn exp_lcm(a: &Expvec, b: &Expvec) -> Expvec {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

fn exp_divides(a: &Expvec, b: &Expvec) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn exp_coprime(a: &Expvec, b: &Expvec) -> bool {
    a.iter().zip(b).all(|(x, y)| *x == 0 || *y == 0)
}

fn exp_support(e: &Expvec) -> VarMask {
    let mut m: VarMask = 0;
    for (i, &x) in e.iter().enumerate() {
        if x > 0 {
            m |= 1 << i;
        }
    }
    m
}

/// Monomial orders. `cmp` returns Greater when the first monomial is the
/// larger one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum TermOrder {
    DegRevLex,
    /// Block order that eliminates the masked variables: masked degree
    /// decides first, ties fall back to degrevlex on everything.
    Elimination(Vec<bool>),
}

impl TermOrder {
    pub fn cmp(&self, a: &Expvec, b: &Expvec) -> Ordering {
        match self {
            TermOrder::DegRevLex => degrevlex(a, b),
            TermOrder::Elimination(mask) => {
                let da: u64 = a
                    .iter()
                    .zip(mask)
                    .filter(|(_, &m)| m)
                    .map(|(&x, _)| x as u64)
                    .sum();
                let db: u64 = b
                    .iter()
                    .zip(mask)
                    .filter(|(_, &m)| m)
                    .map(|(&x, _)| x as u64)
                    .sum();
                da.cmp(&db).then_with(|| degrevlex(a, b))
            }
        }
    }
}

fn degrevlex(a: &Expvec, b: &Expvec) -> Ordering {
    let da = total_degree(a);
    let db = total_degree(b);
    if da != db {
        return da.cmp(&db);
    }
    for i in (0..a.len()).rev() {
        if a[i] != b[i] {
            // Smaller exponent in the last differing (least) variable wins.
            return if a[i] < b[i] { Ordering::Greater } else { Ordering::Less };
        }
    }
    Ordering::Equal
}

/// Term list sorted descending under some order, zero coefficients dropped.
type Terms = Vec<(Expvec, BigRational)>;

fn sort_terms(mut terms: Terms, order: &TermOrder) -> Terms {
    terms.sort_by(|x, y| order.cmp(&y.0, &x.0));
    let mut out: Terms = Vec::with_capacity(terms.len());
    for (e, c) in terms {
        match out.last_mut() {
            Some((pe, pc)) if *pe == e => *pc += c,
            _ => out.push((e, c)),
        }
    }
    out.retain(|(_, c)| !c.is_zero());
    out
}

/// a - b for sorted term lists.
fn merge_sub(a: &Terms, b: &Terms, order: &TermOrder) -> Terms {
    let mut out: Terms = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match order.cmp(&a[i].0, &b[j].0) {
            Ordering::Greater => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Less => {
                out.push((b[j].0.clone(), -&b[j].1));
                j += 1;
            }
            Ordering::Equal => {
                let c = &a[i].1 - &b[j].1;
                if !c.is_zero() {
                    out.push((a[i].0.clone(), c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend(a[i..].iter().cloned());
    out.extend(b[j..].iter().map(|(e, c)| (e.clone(), -c)));
    out
}

/// coeff * x^shift * f; preserves sortedness for any monomial order.
fn mono_mul(f: &Terms, shift: &Expvec, coeff: &BigRational) -> Terms {
    f.iter().map(|(e, c)| (exp_add(e, shift), c * coeff)).collect()
}

fn make_monic(f: &mut Terms) {
    if let Some((_, lc)) = f.first() {
        if lc.is_one() {
            return;
        }
        let lc = lc.clone();
        for (_, c) in f.iter_mut() {
            *c /= &lc;
        }
    }
}

/// Full normal form against monic reducers.
fn normal_form_terms(f: &Terms, reducers: &[Terms], order: &TermOrder) -> Terms {
    let mut work = f.clone();
    let mut out: Terms = Vec::new();
    'outer: while !work.is_empty() {
        deadline::checkpoint();
        for r in reducers {
            let (re, _) = &r[0];
            if exp_divides(re, &work[0].0) {
                let shift = exp_sub(&work[0].0, re);
                let coeff = work[0].1.clone();
                let scaled = mono_mul(r, &shift, &coeff);
                work = merge_sub(&work, &scaled, order);
                continue 'outer;
            }
        }
        out.push(work.remove(0));
    }
    out
}

fn spoly(f: &Terms, g: &Terms, order: &TermOrder) -> Terms {
    let l = exp_lcm(&f[0].0, &g[0].0);
    let a = mono_mul(f, &exp_sub(&l, &f[0].0), &BigRational::one());
    let b = mono_mul(g, &exp_sub(&l, &g[0].0), &BigRational::one());
    merge_sub(&a, &b, order)
}

#[derive(Debug, Clone)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Expvec,
}

/// Gebauer-Moeller pair update on appending basis element `h_idx`.
fn update_pairs(basis: &[Terms], pairs: &mut Vec<Pair>, h_idx: usize) {
    let th = &basis[h_idx][0].0;
    let mut c: Vec<Pair> = (0..h_idx)
        .map(|i| Pair { i, j: h_idx, lcm: exp_lcm(&basis[i][0].0, th) })
        .collect();
    let mut d: Vec<Pair> = Vec::new();
    while let Some(p) = c.pop() {
        let coprime = exp_coprime(&basis[p.i][0].0, th);
        let dominated = c.iter().chain(d.iter()).any(|q| exp_divides(&q.lcm, &p.lcm));
        if coprime || !dominated {
            d.push(p);
        }
    }
    // Product criterion: coprime leading monomials never contribute.
    let e: Vec<Pair> =
        d.into_iter().filter(|p| !exp_coprime(&basis[p.i][0].0, th)).collect();
    // Prune old pairs whose lcm factors through the new lead.
    pairs.retain(|p| {
        let li = exp_lcm(&basis[p.i][0].0, th);
        let lj = exp_lcm(&basis[p.j][0].0, th);
        !(exp_divides(th, &p.lcm) && li != p.lcm && lj != p.lcm)
    });
    pairs.extend(e);
}

enum Gb {
    Basis(Vec<Terms>),
    Unit,
}

fn buchberger(input: &[Terms], order: &TermOrder) -> Gb {
    let mut basis: Vec<Terms> = Vec::new();
    let mut pairs: Vec<Pair> = Vec::new();
    let mut seed: Vec<Terms> = input.iter().filter(|f| !f.is_empty()).cloned().collect();
    seed.sort_by(|a, b| order.cmp(&a[0].0, &b[0].0));
    for f in seed {
        let mut h = normal_form_terms(&f, &basis, order);
        if h.is_empty() {
            continue;
        }
        if total_degree(&h[0].0) == 0 {
            return Gb::Unit;
        }
        make_monic(&mut h);
        basis.push(h);
        update_pairs(&basis, &mut pairs, basis.len() - 1);
    }
    while !pairs.is_empty() {
        deadline::checkpoint();
        let best = pairs
            .iter()
            .enumerate()
            .min_by(|(_, p), (_, q)| {
                order.cmp(&p.lcm, &q.lcm).then(p.i.cmp(&q.i)).then(p.j.cmp(&q.j))
            })
            .map(|(k, _)| k)
            .unwrap();
        let p = pairs.swap_remove(best);
        let s = spoly(&basis[p.i], &basis[p.j], order);
        let mut h = normal_form_terms(&s, &basis, order);
        if h.is_empty() {
            continue;
        }
        if total_degree(&h[0].0) == 0 {
            return Gb::Unit;
        }
        make_monic(&mut h);
        basis.push(h);
        update_pairs(&basis, &mut pairs, basis.len() - 1);
    }
    Gb::Basis(reduce_basis(basis, order))
}

/// Minimalize, tail-reduce and sort ascending by leading monomial.
fn reduce_basis(basis: Vec<Terms>, order: &TermOrder) -> Vec<Terms> {
    let n = basis.len();
    let mut keep = vec![true; n];
    for i in 0..n {
        for j in 0..n {
            if i != j
                && keep[j]
                && exp_divides(&basis[j][0].0, &basis[i][0].0)
                && (basis[j][0].0 != basis[i][0].0 || j < i)
            {
                keep[i] = false;
                break;
            }
        }
    }
    let minimal: Vec<Terms> = basis
        .into_iter()
        .zip(keep)
        .filter_map(|(f, k)| k.then_some(f))
        .collect();
    let mut out: Vec<Terms> = Vec::with_capacity(minimal.len());
    for (i, f) in minimal.iter().enumerate() {
        let others: Vec<Terms> = minimal
            .iter()
            .enumerate()
            .filter_map(|(j, g)| (j != i).then(|| g.clone()))
            .collect();
        let mut h = normal_form_terms(f, &others, order);
        make_monic(&mut h);
        out.push(h);
    }
    out.sort_by(|a, b| order.cmp(&a[0].0, &b[0].0));
    out
}

/// Polynomial in Q[T1..Tr], canonically sorted under degrevlex.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Polynomial {
    nvars: usize,
    terms: Terms,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: Vec::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Polynomial::constant(nvars, BigRational::one())
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        if c.is_zero() {
            return Polynomial::zero(nvars);
        }
        Polynomial { nvars, terms: vec![(vec![0; nvars], c)] }
    }

    /// The variable T(index+1), zero-based index.
    pub fn var(nvars: usize, index: usize) -> Self {
        assert!(index < nvars);
        let mut e = vec![0u32; nvars];
        e[index] = 1;
        Polynomial { nvars, terms: vec![(e, BigRational::one())] }
    }

    pub fn monomial(nvars: usize, exps: &[u32], coeff: BigRational) -> Self {
        assert_eq!(exps.len(), nvars);
        if coeff.is_zero() {
            return Polynomial::zero(nvars);
        }
        Polynomial { nvars, terms: vec![(exps.to_vec(), coeff)] }
    }

    pub fn from_terms(nvars: usize, terms: Terms) -> Self {
        assert!(terms.iter().all(|(e, _)| e.len() == nvars));
        Polynomial { nvars, terms: sort_terms(terms, &TermOrder::DegRevLex) }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Terms in canonical (degrevlex descending) order.
    pub fn terms(&self) -> &[(Expvec, BigRational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Some(c) if the polynomial is the constant c (possibly zero).
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 if total_degree(&self.terms[0].0) == 0 => Some(self.terms[0].1.clone()),
            _ => None,
        }
    }

    pub fn total_degree(&self) -> Option<u64> {
        self.terms.iter().map(|(e, _)| total_degree(e)).max()
    }

    pub fn support(&self) -> VarMask {
        self.terms.iter().fold(0, |m, (e, _)| m | exp_support(e))
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars);
        let negated: Terms = other.terms.iter().map(|(e, c)| (e.clone(), -c)).collect();
        Polynomial {
            nvars: self.nvars,
            terms: merge_sub(&self.terms, &negated, &TermOrder::DegRevLex),
        }
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars);
        Polynomial {
            nvars: self.nvars,
            terms: merge_sub(&self.terms, &other.terms, &TermOrder::DegRevLex),
        }
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars);
        let mut out: Terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (e, c) in &self.terms {
            for (f, d) in &other.terms {
                out.push((exp_add(e, f), c * d));
            }
        }
        Polynomial { nvars: self.nvars, terms: sort_terms(out, &TermOrder::DegRevLex) }
    }

    pub fn scale(&self, c: &BigRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }

    /// Substitutes zero for every variable outside the mask, i.e. keeps
    /// exactly the terms supported inside it.
    pub fn restrict_to(&self, mask: VarMask) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| exp_support(e) & !mask == 0)
                .cloned()
                .collect(),
        }
    }

    pub fn partial_derivative(&self, var: usize) -> Polynomial {
        assert!(var < self.nvars);
        let terms: Terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[var] > 0)
            .map(|(e, c)| {
                let mut e2 = e.clone();
                e2[var] -= 1;
                (e2, c * BigRational::from(BigInt::from(e[var])))
            })
            .collect();
        Polynomial { nvars: self.nvars, terms }
    }

    /// Appends fresh variables (exponent zero everywhere).
    pub fn extend_vars(&self, extra: usize) -> Polynomial {
        let terms: Terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut e2 = e.clone();
                e2.extend(std::iter::repeat(0).take(extra));
                (e2, c.clone())
            })
            .collect();
        Polynomial { nvars: self.nvars + extra, terms }
    }

    /// Drops trailing variables, which must not occur in any term.
    pub fn shrink_vars(&self, nvars: usize) -> Polynomial {
        assert!(nvars <= self.nvars);
        let terms: Terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                assert!(e[nvars..].iter().all(|&x| x == 0));
                (e[..nvars].to_vec(), c.clone())
            })
            .collect();
        Polynomial::from_terms(nvars, terms)
    }

    pub fn parse(input: &str, nvars: usize) -> Result<Polynomial, PolyError> {
        Parser { bytes: input.as_bytes(), pos: 0, nvars }.parse()
    }
}

impl std::fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self)
    }
}

impl std::fmt::Display for Polynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            if k == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.abs();
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || total_degree(e) == 0 {
                factors.push(mag.to_string());
            }
            for (i, &x) in e.iter().enumerate() {
                match x {
                    0 => {}
                    1 => factors.push(format!("T{}", i + 1)),
                    _ => factors.push(format!("T{}^{}", i + 1, x)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    nvars: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn unexpected(&self) -> PolyError {
        match self.peek() {
            Some(b) => PolyError::Unexpected { pos: self.pos, ch: b as char },
            None => PolyError::UnexpectedEnd,
        }
    }

    fn parse(mut self) -> Result<Polynomial, PolyError> {
        self.skip_ws();
        if self.pos == self.bytes.len() {
            return Err(PolyError::Empty);
        }
        let mut terms: Terms = Vec::new();
        let mut first = true;
        loop {
            self.skip_ws();
            let sign = match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    1
                }
                Some(b'-') => {
                    self.pos += 1;
                    -1
                }
                None if !first => break,
                None => return Err(PolyError::UnexpectedEnd),
                Some(_) if first => 1,
                Some(_) => return Err(self.unexpected()),
            };
            let (exps, coeff) = self.parse_term()?;
            let coeff = if sign < 0 { -coeff } else { coeff };
            terms.push((exps, coeff));
            first = false;
            self.skip_ws();
            if self.pos == self.bytes.len() {
                break;
            }
        }
        Ok(Polynomial::from_terms(self.nvars, terms))
    }

    fn parse_term(&mut self) -> Result<(Expvec, BigRational), PolyError> {
        let mut exps = vec![0u32; self.nvars];
        let mut coeff = BigRational::one();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'T') => {
                    self.pos += 1;
                    let index = self.parse_usize()?;
                    if index == 0 || index > self.nvars {
                        return Err(PolyError::BadVariable { index, nvars: self.nvars });
                    }
                    let mut power: u32 = 1;
                    self.skip_ws();
                    if self.peek() == Some(b'^') {
                        self.pos += 1;
                        self.skip_ws();
                        power = self.parse_usize()? as u32;
                    }
                    exps[index - 1] += power;
                }
                Some(b) if b.is_ascii_digit() => {
                    let start = self.pos;
                    let numer = self.parse_bigint()?;
                    self.skip_ws();
                    if self.peek() == Some(b'/') {
                        self.pos += 1;
                        self.skip_ws();
                        let denom = self.parse_bigint()?;
                        if denom.is_zero() {
                            return Err(PolyError::ZeroDenominator { pos: start });
                        }
                        coeff *= BigRational::new(numer, denom);
                    } else {
                        coeff *= BigRational::from(numer);
                    }
                }
                _ => return Err(self.unexpected()),
            }
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.pos += 1;
                continue;
            }
            break;
        }
        Ok((exps, coeff))
    }

    fn parse_usize(&mut self) -> Result<usize, PolyError> {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.unexpected());
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| PolyError::BadNumber { pos: start })
    }

    fn parse_bigint(&mut self) -> Result<BigInt, PolyError> {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.unexpected());
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| PolyError::BadNumber { pos: start })
    }
}

fn to_terms(f: &Polynomial, order: &TermOrder) -> Terms {
    match order {
        TermOrder::DegRevLex => f.terms.clone(),
        _ => sort_terms(f.terms.clone(), order),
    }
}

fn from_terms(nvars: usize, terms: Terms) -> Polynomial {
    Polynomial::from_terms(nvars, terms)
}

/// Reduced Groebner basis; the unit ideal comes back as [1].
pub fn groebner_basis(gens: &[Polynomial], order: &TermOrder) -> Vec<Polynomial> {
    let nvars = gens.first().map_or(0, |f| f.nvars());
    let input: Vec<Terms> = gens.iter().map(|f| to_terms(f, order)).collect();
    match buchberger(&input, order) {
        Gb::Unit => vec![Polynomial::one(nvars)],
        Gb::Basis(b) => b.into_iter().map(|t| from_terms(nvars, t)).collect(),
    }
}

/// Whether the ideal is the whole ring, aborting as soon as a unit shows up.
pub fn contains_one(gens: &[Polynomial]) -> bool {
    let input: Vec<Terms> = gens.iter().map(|f| f.terms.clone()).collect();
    matches!(buchberger(&input, &TermOrder::DegRevLex), Gb::Unit)
}

/// Remainder of f on division by the basis (need not be a Groebner basis;
/// the result is then only one valid remainder).
pub fn normal_form(f: &Polynomial, basis: &[Polynomial], order: &TermOrder) -> Polynomial {
    let mut reducers: Vec<Terms> = basis
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| to_terms(g, order))
        .collect();
    for r in &mut reducers {
        make_monic(r);
    }
    let ft = to_terms(f, order);
    from_terms(f.nvars(), normal_form_terms(&ft, &reducers, order))
}

/// Membership test against a Groebner basis for the same order.
pub fn in_ideal(f: &Polynomial, gb: &[Polynomial], order: &TermOrder) -> bool {
    normal_form(f, gb, order).is_zero()
}

/// Reduced Groebner basis of the ideal of polynomials not involving any
/// masked variable, inside the full polynomial ring.
pub fn eliminate(gens: &[Polynomial], mask: &[bool]) -> Vec<Polynomial> {
    let order = TermOrder::Elimination(mask.to_vec());
    let gb = groebner_basis(gens, &order);
    let drop: VarMask = mask
        .iter()
        .enumerate()
        .filter(|(_, &m)| m)
        .fold(0, |acc, (i, _)| acc | (1 << i));
    gb.into_iter().filter(|f| f.support() & drop == 0).collect()
}

/// Saturation of the ideal at the product of the masked variables, as a
/// reduced degrevlex Groebner basis.
pub fn saturate_at_product(gens: &[Polynomial], vars: VarMask) -> Vec<Polynomial> {
    let nvars = gens.first().map_or(0, |f| f.nvars());
    if gens.iter().all(|g| g.is_zero()) {
        return Vec::new();
    }
    // Rabinowitsch: adjoin y with y * product - 1 and eliminate y.
    let mut extended: Vec<Polynomial> = gens.iter().map(|g| g.extend_vars(1)).collect();
    let mut prod_exps = vec![0u32; nvars + 1];
    for i in 0..nvars {
        if vars & (1 << i) != 0 {
            prod_exps[i] = 1;
        }
    }
    prod_exps[nvars] = 1;
    let helper = Polynomial::monomial(nvars + 1, &prod_exps, BigRational::one())
        .sub(&Polynomial::one(nvars + 1));
    extended.push(helper);
    let mut mask = vec![false; nvars + 1];
    mask[nvars] = true;
    let elim = eliminate(&extended, &mask);
    let mut out: Vec<Polynomial> = elim.into_iter().map(|f| f.shrink_vars(nvars)).collect();
    out.sort_by(|a, b| degrevlex(&a.terms()[0].0, &b.terms()[0].0));
    out
}

/// Whether the saturation of the ideal at the product of the masked
/// variables is a proper ideal. Equivalent to saturating and checking for 1,
/// but runs as a single unit test with early abort and no elimination order.
pub fn saturation_is_proper(gens: &[Polynomial], vars: VarMask) -> bool {
    let nvars = gens.first().map_or(0, |f| f.nvars());
    let live: Vec<&Polynomial> = gens.iter().filter(|g| !g.is_zero()).collect();
    if live.is_empty() {
        return true;
    }
    // Only variables that occur in the generators matter for properness:
    // the rest split off as free torus factors.
    let support: VarMask = live.iter().fold(0, |m, g| m | g.support());
    let mut extended: Vec<Polynomial> = live.iter().map(|g| g.extend_vars(1)).collect();
    let mut prod_exps = vec![0u32; nvars + 1];
    for i in 0..nvars {
        if (vars & support) & (1 << i) != 0 {
            prod_exps[i] = 1;
        }
    }
    prod_exps[nvars] = 1;
    let helper = Polynomial::monomial(nvars + 1, &prod_exps, BigRational::one())
        .sub(&Polynomial::one(nvars + 1));
    extended.push(helper);
    !contains_one(&extended)
}

/// Krull dimension of the quotient by the ideal; None for the unit ideal.
pub fn krull_dimension(gens: &[Polynomial], nvars: usize) -> Option<usize> {
    let gb = groebner_basis(gens, &TermOrder::DegRevLex);
    if gb.iter().any(|f| f.as_constant().map_or(false, |c| !c.is_zero())) {
        return None;
    }
    let supports: Vec<VarMask> =
        gb.iter().filter(|f| !f.is_zero()).map(|f| exp_support(&f.terms()[0].0)).collect();
    // dim = nvars minus the smallest set of variables hitting every leading
    // support.
    let mut best = supports.len().min(nvars);
    min_hitting_set(&supports, 0, 0, &mut best);
    Some(nvars - best)
}

fn min_hitting_set(supports: &[VarMask], chosen: VarMask, count: usize, best: &mut usize) {
    if count >= *best {
        return;
    }
    match supports.iter().find(|&&s| s & chosen == 0) {
        None => *best = count,
        Some(&s) => {
            let mut rest = s;
            while rest != 0 {
                let bit = rest & rest.wrapping_neg();
                rest ^= bit;
                min_hitting_set(supports, chosen | bit, count + 1, best);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, n: usize) -> Polynomial {
        Polynomial::parse(s, n).unwrap()
    }

    #[test]
    fn parse_and_display_round_trip() {
        for (src, shown) in [
            ("T1*T6+T2*T5+T3*T4+T7*T8", "T3*T4 + T2*T5 + T1*T6 + T7*T8"),
            ("-T1*T4^2+T2^3+T2*T3*T4+T3^3", "T2^3 + T3^3 + T2*T3*T4 - T1*T4^2"),
            ("1/2*T1^2 - 3*T2", "1/2*T1^2 - 3*T2"),
            ("5", "5"),
            ("-1/2", "-1/2"),
            ("T1 - T1", "0"),
            ("2*T1*T1", "2*T1^2"),
            ("T2^0", "1"),
        ] {
            let f = p(src, 8);
            assert_eq!(f.to_string(), shown, "for {src}");
            if !f.is_zero() {
                assert_eq!(p(&f.to_string(), 8), f);
            }
        }
    }

    #[test]
    fn parse_errors() {
        assert_eq!(Polynomial::parse("", 3), Err(PolyError::Empty));
        assert_eq!(
            Polynomial::parse("T0", 3),
            Err(PolyError::BadVariable { index: 0, nvars: 3 })
        );
        assert_eq!(
            Polynomial::parse("T4", 3),
            Err(PolyError::BadVariable { index: 4, nvars: 3 })
        );
        assert!(matches!(
            Polynomial::parse("2T1", 3),
            Err(PolyError::Unexpected { .. })
        ));
        assert!(matches!(Polynomial::parse("T1 +", 3), Err(PolyError::UnexpectedEnd)));
        assert!(matches!(
            Polynomial::parse("1/0", 3),
            Err(PolyError::ZeroDenominator { .. })
        ));
        assert!(matches!(
            Polynomial::parse("T1 * * T2", 3),
            Err(PolyError::Unexpected { .. })
        ));
    }

    #[test]
    fn degrevlex_degree_two_chain() {
        // In three variables: x^2 > xy > y^2 > xz > yz > z^2.
        let names = ["T1^2", "T1*T2", "T2^2", "T1*T3", "T2*T3", "T3^2"];
        let monos: Vec<Polynomial> = names.iter().map(|s| p(s, 3)).collect();
        for w in monos.windows(2) {
            let a = &w[0].terms()[0].0;
            let b = &w[1].terms()[0].0;
            assert_eq!(TermOrder::DegRevLex.cmp(a, b), Ordering::Greater);
        }
    }

    #[test]
    fn arithmetic_identities() {
        let x = p("T1", 2);
        let y = p("T2", 2);
        let sum = x.add(&y);
        assert_eq!(sum.mul(&sum), p("T1^2 + 2*T1*T2 + T2^2", 2));
        assert_eq!(x.mul(&y), y.mul(&x));
        assert_eq!(x.sub(&x), Polynomial::zero(2));
        assert_eq!(x.partial_derivative(0), Polynomial::one(2));
        assert_eq!(
            p("T1^2*T2 + T2", 2).partial_derivative(0),
            p("2*T1*T2", 2)
        );
        assert_eq!(p("T1^3", 2).partial_derivative(1), Polynomial::zero(2));
    }

    #[test]
    fn restriction_and_support() {
        let f = p("T1*T2 + T3^2 + T1", 3);
        assert_eq!(f.support(), 0b111);
        assert_eq!(f.restrict_to(0b001), p("T1", 3));
        assert_eq!(f.restrict_to(0b011), p("T1*T2 + T1", 3));
        assert_eq!(f.restrict_to(0), Polynomial::zero(3));
    }

    #[test]
    fn groebner_basis_of_circle_and_line() {
        let gens = [p("T1^2 + T2^2 - 1", 2), p("T1 - T2", 2)];
        let gb = groebner_basis(&gens, &TermOrder::DegRevLex);
        assert_eq!(gb, vec![p("T1 - T2", 2), p("T2^2 - 1/2", 2)]);
        assert!(in_ideal(&p("2*T2^2 - 1", 2), &gb, &TermOrder::DegRevLex));
        assert!(!in_ideal(&p("T2 - 1", 2), &gb, &TermOrder::DegRevLex));
    }

    #[test]
    fn normal_form_reduces_fully() {
        let gb = groebner_basis(&[p("T1^2 - T2", 2)], &TermOrder::DegRevLex);
        let nf = normal_form(&p("T1^3 + T1^2", 2), &gb, &TermOrder::DegRevLex);
        assert_eq!(nf, p("T1*T2 + T2", 2));
    }

    #[test]
    fn elimination_finds_the_cuspidal_relation() {
        // x = t^2, y = t^3 image curve: eliminating T1 from
        // <T1^2 - T2, T1^3 - T3> leaves exactly T2^3 - T3^2.
        let gens = [p("T1^2 - T2", 3), p("T1^3 - T3", 3)];
        let elim = eliminate(&gens, &[true, false, false]);
        assert_eq!(elim, vec![p("T2^3 - T3^2", 3)]);
        let gb = groebner_basis(&gens, &TermOrder::DegRevLex);
        assert!(in_ideal(&p("T2^3 - T3^2", 3), &gb, &TermOrder::DegRevLex));
        assert!(!in_ideal(&p("T2 - T3", 3), &gb, &TermOrder::DegRevLex));
    }

    #[test]
    fn unit_ideal_detection() {
        assert!(contains_one(&[p("T1", 2), p("T1 - 1", 2)]));
        assert!(!contains_one(&[p("T1 - 1", 2), p("T2 - 1", 2), p("T1*T2 - 1", 2)]));
        let gb = groebner_basis(&[p("T1", 1), p("T1 - 1", 1)], &TermOrder::DegRevLex);
        assert_eq!(gb, vec![Polynomial::one(1)]);
    }

    #[test]
    fn saturation_honest_and_shortcut_agree() {
        // <T1^2*T2> : T1^inf = <T2>, : (T1*T2)^inf = (1).
        let i = [p("T1^2*T2", 2)];
        assert_eq!(saturate_at_product(&i, 0b01), vec![p("T2", 2)]);
        assert_eq!(saturate_at_product(&i, 0b11), vec![Polynomial::one(2)]);
        assert!(saturation_is_proper(&i, 0b01));
        assert!(!saturation_is_proper(&i, 0b11));
        // A case with a variable missing from the generators.
        let j = [p("T1*T2 - T3^2", 4)];
        assert!(saturation_is_proper(&j, 0b1111));
        assert_eq!(
            saturate_at_product(&j, 0b1111),
            vec![p("T1*T2 - T3^2", 4)]
        );
        // The zero ideal saturates to itself.
        assert!(saturation_is_proper(&[Polynomial::zero(3)], 0b111));
        assert!(saturate_at_product(&[Polynomial::zero(3)], 0b111).is_empty());
    }

    #[test]
    fn saturation_drops_embedded_component() {
        // <T1*T2, T1*T3> : T1^inf = <T2, T3>.
        let i = [p("T1*T2", 3), p("T1*T3", 3)];
        assert_eq!(saturate_at_product(&i, 0b001), vec![p("T3", 3), p("T2", 3)]);
    }

    #[test]
    fn krull_dimension_examples() {
        assert_eq!(krull_dimension(&[p("T1", 2)], 2), Some(1));
        assert_eq!(krull_dimension(&[p("T1*T2", 2)], 2), Some(1));
        assert_eq!(krull_dimension(&[p("T1", 2), p("T2", 2)], 2), Some(0));
        assert_eq!(krull_dimension(&[Polynomial::zero(2)], 2), Some(2));
        assert_eq!(krull_dimension(&[p("T1*T2", 3), p("T1*T3", 3)], 3), Some(2));
        assert_eq!(krull_dimension(&[p("T1 - 1", 1), p("T1", 1)], 1), None);
        // A hypersurface in four variables.
        assert_eq!(
            krull_dimension(&[p("T1*T6 + T2*T5 + T3*T4 + T7*T8", 8)], 8),
            Some(7)
        );
    }

    #[test]
    fn extend_and_shrink_vars() {
        let f = p("T1*T2 + 1", 2);
        let g = f.extend_vars(2);
        assert_eq!(g.nvars(), 4);
        assert_eq!(g.shrink_vars(2), f);
    }
}
