//! Sparse multilinear polynomials over binary variables.
//!
//! A [`MultilinearPoly`] is a sum of monomials `c_l * prod_{i in J_l} z_i` where every
//! literal `z_i` is either `x_i` ([`Basis::Standard`]) or `1 - x_i`
//! ([`Basis::Complement`]). Both literal kinds are idempotent on `{0,1}`, so products
//! of polynomials in the same basis stay multilinear: the variable set of a product
//! term is the union of the factors' sets. Evaluating at a fractional `y` gives the
//! expectation of the polynomial under independent Bernoulli(`y_i`) inputs.
//!
//! Coverage-type functions (`1 - prod (1 - x_i)`) have exponentially many standard
//! monomials but a single complement monomial, which is why both bases exist.

use std::fmt;
use std::str::FromStr;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::scalar::Scalar;

/// Coefficients smaller than this in magnitude are dropped after arithmetic
/// unless the polynomial is in exact-retention mode.
pub const DROP_TOL: f64 = 1e-15;

/// Slack allowed when checking that evaluation points lie in `[0, 1]`.
pub const UNIT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// Literals are `x_i`.
    #[default]
    Standard,
    /// Literals are `1 - x_i`.
    Complement,
}

impl Basis {
    fn literal<T: Scalar>(self, y: T) -> T {
        match self {
            Basis::Standard => y,
            Basis::Complement => T::one() - y,
        }
    }

    fn literal_holds(self, x: bool) -> bool {
        match self {
            Basis::Standard => x,
            Basis::Complement => !x,
        }
    }

    /// Derivative of a literal with respect to its variable.
    fn slope<T: Scalar>(self) -> T {
        match self {
            Basis::Standard => T::one(),
            Basis::Complement => -T::one(),
        }
    }
}

/// A single term `coefficient * prod_{i in variables} z_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial<T> {
    pub coefficient: T,
    /// Strictly increasing variable indices; empty for the constant term.
    pub variables: Vec<usize>,
}

impl<T: Scalar> Monomial<T> {
    /// Builds a monomial, sorting the indices and collapsing repeats (`z_i^2 = z_i`).
    pub fn new(coefficient: T, variables: impl IntoIterator<Item = usize>) -> Self {
        let mut variables: Vec<usize> = variables.into_iter().collect();
        variables.sort_unstable();
        variables.dedup();
        Monomial {
            coefficient,
            variables,
        }
    }

    pub fn constant(coefficient: T) -> Self {
        Monomial {
            coefficient,
            variables: Vec::new(),
        }
    }
}

/// Size statistics of a polynomial's term map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TermStats {
    pub terms: usize,
    pub total_variables: usize,
    pub max_degree: usize,
    pub mean_degree: f64,
}

/// Canonical sparse multilinear polynomial.
///
/// Terms are kept sorted by (degree, indices) with like terms merged, so two
/// polynomials representing the same term map compare equal.
#[derive(Clone, Debug)]
pub struct MultilinearPoly<T> {
    ground_size: usize,
    basis: Basis,
    terms: Vec<(Vec<usize>, T)>,
    exact: bool,
}

impl<T: Scalar> PartialEq for MultilinearPoly<T> {
    fn eq(&self, other: &Self) -> bool {
        self.ground_size == other.ground_size
            && self.basis == other.basis
            && self.terms == other.terms
    }
}

struct Accumulator<T> {
    map: FxHashMap<Vec<usize>, T>,
}

impl<T: Scalar> Accumulator<T> {
    fn with_capacity(n: usize) -> Self {
        let mut map = FxHashMap::default();
        map.reserve(n);
        Accumulator { map }
    }

    fn add(&mut self, key: &[usize], c: T) {
        if let Some(v) = self.map.get_mut(key) {
            *v += c;
        } else {
            self.map.insert(key.to_vec(), c);
        }
    }

    fn finish(self, ground_size: usize, basis: Basis, exact: bool) -> MultilinearPoly<T> {
        let tol = T::lit(DROP_TOL);
        let mut terms: Vec<(Vec<usize>, T)> = self
            .map
            .into_iter()
            .filter(|(_, c)| *c != T::zero() && (exact || c.abs() >= tol))
            .collect();
        terms.sort_unstable_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
        MultilinearPoly {
            ground_size,
            basis,
            terms,
            exact,
        }
    }
}

fn union_into(a: &[usize], b: &[usize], out: &mut Vec<usize>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

/// Dense scratch space for sparse per-coordinate accumulation.
pub(crate) struct SparseScratch<T> {
    pub values: Vec<T>,
    seen: Vec<bool>,
    pub touched: Vec<usize>,
}

impl<T: Scalar> SparseScratch<T> {
    pub fn new(n: usize) -> Self {
        SparseScratch {
            values: vec![T::zero(); n],
            seen: vec![false; n],
            touched: Vec::new(),
        }
    }

    #[inline]
    pub fn add(&mut self, i: usize, v: T) {
        if !self.seen[i] {
            self.seen[i] = true;
            self.touched.push(i);
        }
        self.values[i] += v;
    }

    pub fn clear(&mut self) {
        for &i in &self.touched {
            self.values[i] = T::zero();
            self.seen[i] = false;
        }
        self.touched.clear();
    }
}

pub(crate) fn check_unit_vector<T: Scalar>(y: &[T], n: usize) -> Result<()> {
    if y.len() != n {
        return input(format!("point has length {}, expected {}", y.len(), n));
    }
    let lo = -T::lit(UNIT_TOL);
    let hi = T::one() + T::lit(UNIT_TOL);
    for (i, &v) in y.iter().enumerate() {
        if !(v >= lo && v <= hi) {
            return input(format!("coordinate {i} = {v} is outside [0, 1]"));
        }
    }
    Ok(())
}

impl<T: Scalar> MultilinearPoly<T> {
    pub fn zero(ground_size: usize) -> Self {
        Self::zero_in(ground_size, Basis::Standard)
    }

    pub fn zero_in(ground_size: usize, basis: Basis) -> Self {
        MultilinearPoly {
            ground_size,
            basis,
            terms: Vec::new(),
            exact: false,
        }
    }

    pub fn constant(ground_size: usize, c: T) -> Self {
        Self::constant_in(ground_size, Basis::Standard, c)
    }

    pub fn constant_in(ground_size: usize, basis: Basis, c: T) -> Self {
        let terms = if c == T::zero() {
            Vec::new()
        } else {
            vec![(Vec::new(), c)]
        };
        MultilinearPoly {
            ground_size,
            basis,
            terms,
            exact: false,
        }
    }

    /// The standard-basis polynomial `x_i`.
    pub fn variable(ground_size: usize, i: usize) -> Result<Self> {
        Self::from_terms(ground_size, Basis::Standard, [Monomial::new(T::one(), [i])])
    }

    /// `coefficient * prod_{i in vars} (1 - x_i)` in the complement basis.
    pub fn complement_product(
        ground_size: usize,
        vars: impl IntoIterator<Item = usize>,
        coefficient: T,
    ) -> Result<Self> {
        Self::from_terms(
            ground_size,
            Basis::Complement,
            [Monomial::new(coefficient, vars)],
        )
    }

    pub fn from_terms(
        ground_size: usize,
        basis: Basis,
        terms: impl IntoIterator<Item = Monomial<T>>,
    ) -> Result<Self> {
        Self::build(ground_size, basis, terms, false)
    }

    /// Like [`from_terms`](Self::from_terms) but in exact-retention mode: only exact
    /// zeros are removed, now and in every result derived from this polynomial.
    pub fn from_terms_exact(
        ground_size: usize,
        basis: Basis,
        terms: impl IntoIterator<Item = Monomial<T>>,
    ) -> Result<Self> {
        Self::build(ground_size, basis, terms, true)
    }

    fn build(
        ground_size: usize,
        basis: Basis,
        terms: impl IntoIterator<Item = Monomial<T>>,
        exact: bool,
    ) -> Result<Self> {
        let mut acc = Accumulator::with_capacity(0);
        for m in terms {
            let mut vars = m.variables;
            vars.sort_unstable();
            vars.dedup();
            if let Some(&last) = vars.last() {
                if last >= ground_size {
                    return input(format!(
                        "variable index {last} out of range for ground size {ground_size}"
                    ));
                }
            }
            if !m.coefficient.is_finite() {
                return input(format!("non-finite coefficient {}", m.coefficient));
            }
            acc.add(&vars, m.coefficient);
        }
        Ok(acc.finish(ground_size, basis, exact))
    }

    /// Switches exact-retention mode on or off for this value and its descendants.
    pub fn with_exact(mut self, exact: bool) -> Self {
        self.exact = exact;
        self
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order as `(variables, coefficient)`.
    pub fn terms(&self) -> impl ExactSizeIterator<Item = (&[usize], T)> + '_ {
        self.terms.iter().map(|(k, c)| (k.as_slice(), *c))
    }

    pub fn monomials(&self) -> impl Iterator<Item = Monomial<T>> + '_ {
        self.terms.iter().map(|(k, c)| Monomial {
            coefficient: *c,
            variables: k.clone(),
        })
    }

    /// Coefficient of the term with exactly this (sorted) variable set.
    pub fn coefficient(&self, vars: &[usize]) -> T {
        let pos = self.terms.binary_search_by(|(k, _)| {
            k.len().cmp(&vars.len()).then_with(|| k.as_slice().cmp(vars))
        });
        match pos {
            Ok(p) => self.terms[p].1,
            Err(_) => T::zero(),
        }
    }

    pub fn constant_term(&self) -> T {
        self.coefficient(&[])
    }

    pub fn stats(&self) -> TermStats {
        let total: usize = self.terms.iter().map(|(k, _)| k.len()).sum();
        let max_degree = self.terms.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        TermStats {
            terms: self.terms.len(),
            total_variables: total,
            max_degree,
            mean_degree: if self.terms.is_empty() {
                0.0
            } else {
                total as f64 / self.terms.len() as f64
            },
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.ground_size != other.ground_size {
            return input(format!(
                "ground size mismatch: {} vs {}",
                self.ground_size, other.ground_size
            ));
        }
        if self.basis != other.basis {
            return input(format!(
                "basis mismatch: {:?} vs {:?}",
                self.basis, other.basis
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Self::linear_combination(
            self.ground_size,
            self.basis,
            [(T::one(), self), (T::one(), other)],
        )
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Self::linear_combination(
            self.ground_size,
            self.basis,
            [(T::one(), self), (-T::one(), other)],
        )
    }

    /// `sum_k a_k * p_k` over polynomials sharing ground size and basis.
    pub fn linear_combination<'a>(
        ground_size: usize,
        basis: Basis,
        parts: impl IntoIterator<Item = (T, &'a Self)>,
    ) -> Result<Self> {
        let mut acc = Accumulator::with_capacity(0);
        let mut exact = false;
        let probe = Self::zero_in(ground_size, basis);
        for (a, p) in parts {
            probe.check_compatible(p)?;
            exact |= p.exact;
            if a == T::zero() {
                continue;
            }
            for (k, c) in &p.terms {
                acc.add(k, a * *c);
            }
        }
        Ok(acc.finish(ground_size, basis, exact))
    }

    pub fn scale(&self, a: T) -> Self {
        let mut acc = Accumulator::with_capacity(self.terms.len());
        if a != T::zero() {
            for (k, c) in &self.terms {
                acc.add(k, a * *c);
            }
        }
        acc.finish(self.ground_size, self.basis, self.exact)
    }

    pub fn add_constant(&self, c: T) -> Self {
        let mut acc = Accumulator::with_capacity(self.terms.len() + 1);
        acc.add(&[], c);
        for (k, v) in &self.terms {
            acc.add(k, *v);
        }
        acc.finish(self.ground_size, self.basis, self.exact)
    }

    /// Product in the idempotent ring: term sets are unioned.
    ///
    /// Agrees with the pointwise product on every binary point, but not in general
    /// on fractional points.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let exact = self.exact || other.exact;
        let mut acc = Accumulator::with_capacity(self.terms.len().max(other.terms.len()));
        let mut buf = Vec::new();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                union_into(ka, kb, &mut buf);
                acc.add(&buf, *ca * *cb);
            }
        }
        Ok(acc.finish(self.ground_size, self.basis, exact))
    }

    /// `p^e` by binary exponentiation; `p^0` is the constant 1.
    pub fn power(&self, e: u32) -> Self {
        let mut result =
            Self::constant_in(self.ground_size, self.basis, T::one()).with_exact(self.exact);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.multiply(&base).expect("same ground set and basis");
            }
            e >>= 1;
            if e > 0 {
                base = base.multiply(&base).expect("same ground set and basis");
            }
        }
        result
    }

    /// Fixes `x_i = b` symbolically. The result no longer depends on coordinate `i`.
    pub fn pin(&self, i: usize, b: bool) -> Result<Self> {
        if i >= self.ground_size {
            return input(format!(
                "index {i} out of range for ground size {}",
                self.ground_size
            ));
        }
        // literal value at x_i = b: 1 keeps the term without i, 0 kills it
        let literal_one = self.basis.literal_holds(b);
        let mut acc = Accumulator::with_capacity(self.terms.len());
        let mut buf = Vec::new();
        for (k, c) in &self.terms {
            match k.binary_search(&i) {
                Err(_) => acc.add(k, *c),
                Ok(pos) if literal_one => {
                    buf.clear();
                    buf.extend_from_slice(&k[..pos]);
                    buf.extend_from_slice(&k[pos + 1..]);
                    acc.add(&buf, *c);
                }
                Ok(_) => {}
            }
        }
        Ok(acc.finish(self.ground_size, self.basis, self.exact))
    }

    /// Drops every term with `|c| < tol`.
    pub fn prune(&self, tol: T) -> Self {
        MultilinearPoly {
            ground_size: self.ground_size,
            basis: self.basis,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.abs() >= tol)
                .cloned()
                .collect(),
            exact: self.exact,
        }
    }

    /// Re-expresses the polynomial in another basis.
    ///
    /// A term over `J` expands into `2^|J|` terms, so terms with more than
    /// `max_term_size` variables are refused.
    pub fn to_basis(&self, basis: Basis, max_term_size: usize) -> Result<Self> {
        if basis == self.basis {
            return Ok(self.clone());
        }
        let mut acc = Accumulator::with_capacity(self.terms.len());
        let mut buf = Vec::new();
        for (k, c) in &self.terms {
            if k.len() > max_term_size {
                return Err(Error::Guard(format!(
                    "term with {} variables exceeds the basis-change limit {}",
                    k.len(),
                    max_term_size
                )));
            }
            // prod z_i = prod (1 - z'_i) = sum_{S subset J} (-1)^|S| prod_S z'_i
            for mask in 0u64..(1u64 << k.len()) {
                buf.clear();
                for (b, &v) in k.iter().enumerate() {
                    if mask >> b & 1 == 1 {
                        buf.push(v);
                    }
                }
                let sign = if buf.len() % 2 == 0 { *c } else { -*c };
                acc.add(&buf, sign);
            }
        }
        Ok(acc.finish(self.ground_size, basis, self.exact))
    }

    /// Multilinear relaxation value: the expectation under independent Bernoulli(`y_i`).
    pub fn evaluate(&self, y: &[T]) -> Result<T> {
        check_unit_vector(y, self.ground_size)?;
        Ok(self.evaluate_unchecked(y))
    }

    pub(crate) fn evaluate_unchecked(&self, y: &[T]) -> T {
        let z: Vec<T> = y.iter().map(|&v| self.basis.literal(v)).collect();
        let mut total = T::zero();
        for (k, c) in &self.terms {
            let mut prod = *c;
            for &i in k {
                prod *= z[i];
            }
            total += prod;
        }
        total
    }

    pub fn evaluate_binary(&self, x: &[bool]) -> Result<T> {
        if x.len() != self.ground_size {
            return input(format!(
                "point has length {}, expected {}",
                x.len(),
                self.ground_size
            ));
        }
        Ok(self.evaluate_binary_unchecked(x))
    }

    pub(crate) fn evaluate_binary_unchecked(&self, x: &[bool]) -> T {
        let basis = self.basis;
        self.terms
            .iter()
            .filter(|(k, _)| k.iter().all(|&i| basis.literal_holds(x[i])))
            .map(|(_, c)| *c)
            .sum()
    }

    /// `p(y with y_i = 1) - p(y with y_i = 0)`; independent of `y_i`.
    pub fn grad_coord(&self, y: &[T], i: usize) -> Result<T> {
        check_unit_vector(y, self.ground_size)?;
        if i >= self.ground_size {
            return input(format!(
                "index {i} out of range for ground size {}",
                self.ground_size
            ));
        }
        let slope = self.basis.slope::<T>();
        let mut total = T::zero();
        for (k, c) in &self.terms {
            if k.binary_search(&i).is_err() {
                continue;
            }
            let mut prod = *c * slope;
            for &j in k {
                if j != i {
                    prod *= self.basis.literal(y[j]);
                }
            }
            total += prod;
        }
        Ok(total)
    }

    /// All coordinates of [`grad_coord`](Self::grad_coord) in one pass over the terms.
    pub fn gradient(&self, y: &[T]) -> Result<Vec<T>> {
        check_unit_vector(y, self.ground_size)?;
        Ok(self.gradient_unchecked(y))
    }

    pub(crate) fn gradient_unchecked(&self, y: &[T]) -> Vec<T> {
        let z: Vec<T> = y.iter().map(|&v| self.basis.literal(v)).collect();
        let slope = self.basis.slope::<T>();
        let mut grad = vec![T::zero(); self.ground_size];
        let mut prefix: Vec<T> = Vec::new();
        for (k, c) in &self.terms {
            let c = *c * slope;
            match k.len() {
                0 => {}
                1 => grad[k[0]] += c,
                2 => {
                    grad[k[0]] += c * z[k[1]];
                    grad[k[1]] += c * z[k[0]];
                }
                len => {
                    // prefix[p] = prod_{q < p} z[k[q]]; suffix carried backwards
                    prefix.clear();
                    let mut run = T::one();
                    for &j in k.iter() {
                        prefix.push(run);
                        run *= z[j];
                    }
                    let mut suffix = T::one();
                    for p in (0..len).rev() {
                        grad[k[p]] += c * prefix[p] * suffix;
                        suffix *= z[k[p]];
                    }
                }
            }
        }
        grad
    }

    /// Value at a binary point together with every discrete partial
    /// `p([x]_{+i}) - p([x]_{-i})`, accumulated into `scratch`.
    pub(crate) fn binary_value_and_partials(
        &self,
        x: &[bool],
        scratch: &mut SparseScratch<T>,
    ) -> T {
        let basis = self.basis;
        let slope = basis.slope::<T>();
        let mut value = T::zero();
        for (k, c) in &self.terms {
            let mut dead = None;
            let mut dead_count = 0usize;
            for &j in k {
                if !basis.literal_holds(x[j]) {
                    dead_count += 1;
                    if dead_count > 1 {
                        break;
                    }
                    dead = Some(j);
                }
            }
            match dead_count {
                0 => {
                    value += *c;
                    for &j in k {
                        scratch.add(j, *c * slope);
                    }
                }
                1 => scratch.add(dead.expect("one dead literal"), *c * slope),
                _ => {}
            }
        }
        value
    }
}

impl<T: Scalar> fmt::Display for MultilinearPoly<T> {
    /// One term per line, `coeff i1 i2 ...`, after an `N=<ground_size>` header.
    /// Complement-basis polynomials carry an extra `basis=complement` line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "N={}", self.ground_size)?;
        if self.basis == Basis::Complement {
            writeln!(f, "basis=complement")?;
        }
        for (k, c) in &self.terms {
            write!(f, "{c}")?;
            for i in k {
                write!(f, " {i}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl<T: Scalar> FromStr for MultilinearPoly<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut ground_size = None;
        let mut basis = Basis::Standard;
        let mut terms = Vec::new();
        for (lineno, raw) in s.lines().enumerate() {
            let line = raw.trim();
            let line_no = lineno + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if ground_size.is_none() {
                let n = line
                    .strip_prefix("N=")
                    .and_then(|v| v.trim().parse::<usize>().ok())
                    .ok_or_else(|| Error::Parse {
                        line: line_no,
                        msg: format!("expected header `N=<ground_size>`, found `{line}`"),
                    })?;
                ground_size = Some(n);
                continue;
            }
            if let Some(b) = line.strip_prefix("basis=") {
                basis = match b.trim() {
                    "standard" => Basis::Standard,
                    "complement" => Basis::Complement,
                    other => {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: format!("unknown basis `{other}`"),
                        })
                    }
                };
                continue;
            }
            let mut fields = line.split_whitespace();
            let coeff_str = fields.next().expect("non-empty line");
            let coefficient = coeff_str.parse::<T>().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad coefficient `{coeff_str}`"),
            })?;
            let mut variables = Vec::new();
            for tok in fields {
                variables.push(tok.parse::<usize>().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("bad variable index `{tok}`"),
                })?);
            }
            if variables.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "variable indices must be strictly increasing".into(),
                });
            }
            terms.push(Monomial {
                coefficient,
                variables,
            });
        }
        let n = ground_size.ok_or(Error::Parse {
            line: 1,
            msg: "missing `N=<ground_size>` header".into(),
        })?;
        Self::from_terms(n, basis, terms)
    }
}
