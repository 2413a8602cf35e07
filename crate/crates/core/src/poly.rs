//! Sparse multivariate polynomials over an exact coefficient field.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], whose ordering is
//! graded lexicographic with variable 0 the most significant. The map never
//! holds a zero coefficient, so structural equality is polynomial equality.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::field::Coefficient;

/// Exponent vector with trailing zeros trimmed, so the same monomial has one
/// representation regardless of how many variables are in scope.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(index: usize) -> Self {
        let mut e = vec![0; index + 1];
        e[index] = 1;
        Monomial(e)
    }

    pub fn from_exponents(mut exponents: Vec<u32>) -> Self {
        while exponents.last() == Some(&0) {
            exponents.pop();
        }
        Monomial(exponents)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exponent(&self, var: usize) -> u32 {
        self.0.get(var).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    /// One past the highest variable index that occurs.
    pub fn var_bound(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let n = self.0.len().max(other.0.len());
        Monomial((0..n).map(|i| self.exponent(i) + other.exponent(i)).collect())
    }

    /// `self / other` if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if other.0.len() > self.0.len() {
            return None;
        }
        let mut e = Vec::with_capacity(self.0.len());
        for (i, &a) in self.0.iter().enumerate() {
            let b = other.exponent(i);
            if b > a {
                return None;
            }
            e.push(a - b);
        }
        Some(Monomial::from_exponents(e))
    }

    fn with_exponent(&self, var: usize, exp: u32) -> Monomial {
        let mut e = self.0.clone();
        if e.len() <= var {
            e.resize(var + 1, 0);
        }
        e[var] = exp;
        Monomial::from_exponents(e)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let n = self.0.len().max(other.0.len());
            for i in 0..n {
                match self.exponent(i).cmp(&other.exponent(i)) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Polynomial<C> {
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coefficient> Polynomial<C> {
    pub fn constant(c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Polynomial { terms }
    }

    pub fn var(index: usize) -> Self {
        Self::term(C::one(), Monomial::var(index))
    }

    pub fn term(c: C, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, C)>>(iter: I) -> Self {
        let mut p = Polynomial::zero();
        for (m, c) in iter {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().clone() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn constant_value(&self) -> Option<C> {
        if self.is_zero() {
            Some(C::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coefficient(&self) -> C {
        self.leading_term().map(|(_, c)| c.clone()).unwrap_or_else(C::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.exponent(var)).max().unwrap_or(0)
    }

    /// One past the highest variable index occurring in any term.
    pub fn var_bound(&self) -> usize {
        self.terms.keys().map(Monomial::var_bound).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &C) -> Self {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(k, a)| (k.mul(m), a.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, mut exp: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Polynomial::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(var);
            if e == 0 {
                continue;
            }
            let factor = C::from_u32(e).expect("exponent fits the coefficient field");
            out.add_term(m.with_exponent(var, e - 1), c.clone() * factor);
        }
        out
    }

    /// Evaluates at a point; panics if the point has fewer coordinates than
    /// the polynomial has variables.
    pub fn eval(&self, point: &[C]) -> C {
        assert!(
            self.var_bound() <= point.len(),
            "evaluation point has too few coordinates"
        );
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exponents().iter().enumerate() {
                for _ in 0..e {
                    t = t * point[i].clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// Rescales so the leading coefficient is one; zero stays zero.
    pub fn monic(&self) -> Self {
        match self.leading_term() {
            None => self.clone(),
            Some((_, lc)) if lc.is_one() => self.clone(),
            Some((_, lc)) => self.scale(&(C::one() / lc.clone())),
        }
    }

    /// Exact quotient `self / divisor`, or `None` if the division leaves a
    /// remainder.
    pub fn exact_div(&self, divisor: &Self) -> Option<Self> {
        let (lm, lc) = divisor.leading_term().expect("division by the zero polynomial");
        if divisor.num_terms() == 1 {
            let mut q = Polynomial::zero();
            for (m, c) in &self.terms {
                q.add_term(m.div(lm)?, c.clone() / lc.clone());
            }
            return Some(q);
        }
        let mut rem = self.clone();
        let mut quot = Polynomial::zero();
        while let Some((rm, rc)) = rem.leading_term() {
            let m = rm.div(lm)?;
            let c = rc.clone() / lc.clone();
            rem = &rem - &divisor.mul_monomial(&m, &c);
            quot.add_term(m, c);
        }
        Some(quot)
    }

    /// Coefficients with respect to one variable: `self = Σ_k coeff[k] x_var^k`.
    pub fn coefficients_in(&self, var: usize) -> BTreeMap<u32, Polynomial<C>> {
        let mut out: BTreeMap<u32, Polynomial<C>> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.exponent(var))
                .or_insert_with(Polynomial::zero)
                .add_term(m.with_exponent(var, 0), c.clone());
        }
        out
    }

    fn leading_coefficient_in(&self, var: usize) -> Polynomial<C> {
        let d = self.degree_in(var);
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            if m.exponent(var) == d {
                out.add_term(m.with_exponent(var, 0), c.clone());
            }
        }
        out
    }

    /// Greatest common divisor, normalized monic (the gcd with zero is the
    /// other argument made monic).
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() || self == other {
            return self.monic();
        }
        if self.is_constant() || other.is_constant() {
            return Polynomial::one();
        }
        // every variable of the gcd occurs in both arguments
        let (va, vb) = (self.variables(), other.variables());
        let shared: Vec<usize> = va.iter().copied().filter(|v| vb.contains(v)).collect();
        if shared.is_empty() || shared.iter().all(|&v| self.coprime_in(other, v)) {
            return Polynomial::one();
        }
        // a variable present in only one argument can be eliminated by
        // taking content there; this keeps the PRS below to shared variables
        if let Some(&v) = va.iter().find(|v| !vb.contains(v)) {
            return self.content_in(v).gcd(other);
        }
        if let Some(&v) = vb.iter().find(|v| !va.contains(v)) {
            return self.gcd(&other.content_in(v));
        }
        let var = self.lowest_var().min(other.lowest_var());
        let (da, db) = (self.degree_in(var), other.degree_in(var));
        if da == 0 {
            return self.gcd(&other.content_in(var));
        }
        if db == 0 {
            return self.content_in(var).gcd(other);
        }
        let (ca, cb) = (self.content_in(var), other.content_in(var));
        let content = ca.gcd(&cb);
        let mut f = self.exact_div(&ca).expect("content divides");
        let mut g = other.exact_div(&cb).expect("content divides");
        if f.degree_in(var) < g.degree_in(var) {
            std::mem::swap(&mut f, &mut g);
        }
        loop {
            let r = f.pseudo_remainder(&g, var);
            if r.is_zero() {
                break;
            }
            if r.degree_in(var) == 0 {
                g = Polynomial::one();
                break;
            }
            f = g;
            g = r.primitive_part_in(var).monic();
        }
        (&content * &g.primitive_part_in(var)).monic()
    }

    /// Dense coefficients in `var` after substituting `point` for the other
    /// variables.
    fn univariate_image(&self, var: usize, point: &[C]) -> Vec<C> {
        let mut out = vec![C::zero(); self.degree_in(var) as usize + 1];
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (i, &e) in m.exponents().iter().enumerate() {
                if i != var {
                    for _ in 0..e {
                        v = v * point[i].clone();
                    }
                }
            }
            let k = m.exponent(var) as usize;
            out[k] = out[k].clone() + v;
        }
        out
    }

    /// Proves that the gcd has degree 0 in `var`, by a specialization of
    /// the other variables that keeps both leading coefficients nonzero and
    /// leaves coprime univariate images. `false` means "not proven".
    fn coprime_in(&self, other: &Self, var: usize) -> bool {
        const SAMPLES: [i64; 8] = [3, -2, 5, 7, -4, 11, 2, -5];
        let n = self.nvars().max(other.nvars());
        (0..2).any(|shift| {
            let point: Vec<C> = (0..n)
                .map(|i| C::from_i64(SAMPLES[(i + 3 * shift) % SAMPLES.len()]).expect("small integer"))
                .collect();
            let (a, b) = (self.univariate_image(var, &point), other.univariate_image(var, &point));
            let full =
                |img: &[C], p: &Self| img.len() == p.degree_in(var) as usize + 1 && !img[img.len() - 1].is_zero();
            full(&a, self) && full(&b, other) && univariate_gcd_degree(a, b) == 0
        })
    }

    fn nvars(&self) -> usize {
        self.terms.keys().map(|m| m.exponents().len()).max().unwrap_or(0)
    }

    fn variables(&self) -> Vec<usize> {
        let mut vars: Vec<usize> = Vec::new();
        for m in self.terms.keys() {
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 && !vars.contains(&i) {
                    vars.push(i);
                }
            }
        }
        vars.sort_unstable();
        vars
    }

    fn lowest_var(&self) -> usize {
        self.terms
            .keys()
            .filter_map(|m| m.exponents().iter().position(|&e| e > 0))
            .min()
            .unwrap_or(usize::MAX)
    }

    /// Gcd of the coefficients of `self` viewed as a polynomial in `var`.
    pub fn content_in(&self, var: usize) -> Self {
        let mut acc = Polynomial::zero();
        for c in self.coefficients_in(var).into_values() {
            acc = acc.gcd(&c);
            if acc.is_constant() && !acc.is_zero() {
                return Polynomial::one();
            }
        }
        acc
    }

    pub fn primitive_part_in(&self, var: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.exact_div(&self.content_in(var)).expect("content divides")
    }

    fn pseudo_remainder(&self, divisor: &Self, var: usize) -> Self {
        let n = divisor.degree_in(var);
        let lc = divisor.leading_coefficient_in(var);
        let mut r = self.clone();
        while !r.is_zero() && r.degree_in(var) >= n {
            let d = r.degree_in(var);
            let shift = Monomial::var(var);
            let mut t = r.leading_coefficient_in(var);
            for _ in 0..(d - n) {
                t = t.mul_monomial(&shift, &C::one());
            }
            r = &(&r * &lc) - &(&t * divisor);
        }
        r
    }

    /// Writes the polynomial in the expression grammar, highest term first.
    pub fn write_with(&self, names: &[String], out: &mut String) {
        if self.is_zero() {
            out.push('0');
            return;
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            write_term(&c.abs(), m, names, out);
        }
    }

    pub fn to_string_with(&self, names: &[String]) -> String {
        let mut s = String::new();
        self.write_with(names, &mut s);
        s
    }
}

/// Writes `|c| * m` without sign, omitting a unit coefficient.
pub(crate) fn write_term<C: Coefficient>(c: &C, m: &Monomial, names: &[String], out: &mut String) {
    if m.is_one() {
        let _ = write!(out, "{c}");
        return;
    }
    let mut first = true;
    if !c.is_one() {
        let _ = write!(out, "{c}");
        first = false;
    }
    for (i, &e) in m.exponents().iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            out.push('*');
        }
        first = false;
        match names.get(i) {
            Some(n) => out.push_str(n),
            None => {
                let _ = write!(out, "v{i}");
            }
        }
        if e > 1 {
            let _ = write!(out, "^{e}");
        }
    }
}

/// Degree of the gcd of two dense univariate polynomials over a field.
fn univariate_gcd_degree<C: Coefficient>(mut a: Vec<C>, mut b: Vec<C>) -> usize {
    let trim = |v: &mut Vec<C>| {
        while v.last().is_some_and(|c| c.is_zero()) {
            v.pop();
        }
    };
    trim(&mut a);
    trim(&mut b);
    loop {
        if b.is_empty() {
            return a.len().saturating_sub(1);
        }
        if a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
            continue;
        }
        let lb = b[b.len() - 1].clone();
        while a.len() >= b.len() && !a.is_empty() {
            let q = a[a.len() - 1].clone() / lb.clone();
            let off = a.len() - b.len();
            for (i, c) in b.iter().enumerate() {
                a[off + i] = a[off + i].clone() - q.clone() * c.clone();
            }
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
}

impl<C: Coefficient> Zero for Polynomial<C> {
    fn zero() -> Self {
        Polynomial { terms: BTreeMap::new() }
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<C: Coefficient> One for Polynomial<C> {
    fn one() -> Self {
        Polynomial::constant(C::one())
    }
}

impl<C: Coefficient> Add for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn add(self, rhs: Self) -> Polynomial<C> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<C: Coefficient> Sub for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn sub(self, rhs: Self) -> Polynomial<C> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<C: Coefficient> Mul for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn mul(self, rhs: Self) -> Polynomial<C> {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl<C: Coefficient> Neg for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl<C: Coefficient> Neg for Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        -&self
    }
}

macro_rules! forward_owned_binop {
    ($ty:ident, $tr:ident, $method:ident) => {
        impl<C: Coefficient> $tr for $ty<C> {
            type Output = $ty<C>;
            fn $method(self, rhs: $ty<C>) -> $ty<C> {
                (&self).$method(&rhs)
            }
        }
        impl<C: Coefficient> $tr<&$ty<C>> for $ty<C> {
            type Output = $ty<C>;
            fn $method(self, rhs: &$ty<C>) -> $ty<C> {
                (&self).$method(rhs)
            }
        }
        impl<C: Coefficient> $tr<$ty<C>> for &$ty<C> {
            type Output = $ty<C>;
            fn $method(self, rhs: $ty<C>) -> $ty<C> {
                self.$method(&rhs)
            }
        }
    };
}
pub(crate) use forward_owned_binop;

forward_owned_binop!(Polynomial, Add, add);
forward_owned_binop!(Polynomial, Sub, sub);
forward_owned_binop!(Polynomial, Mul, mul);
