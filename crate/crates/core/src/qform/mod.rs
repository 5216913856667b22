//! Finite quadratic forms `(A, q)` with `q: A -> Q/2Z`, their isometries
//! and orthogonal groups.
//!
//! Elements of `A = Z/d_1 + ... + Z/d_k` are coefficient vectors reduced
//! modulo the orders. Internally every value of `q` is stored multiplied by
//! the exponent `e = lcm(d_i)` as an integer modulo `2e`, and every value of
//! the bilinear form `b` as an integer modulo `e`.

mod enumerate;
mod group;
mod map;

use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};

pub use enumerate::{are_isometric, first_isometry, isometries_signed};
pub use group::{orthogonal_group, DoubleCosets, FiniteOrthogonalGroup};
pub use map::{FiniteFormMap, Sign};

/// Default bound on the number of group elements any enumeration may visit.
pub const DEFAULT_CAP: u64 = 10_000;

/// Largest exponent accepted; keeps all scaled products inside `u128`.
const MAX_EXPONENT: u64 = 1 << 62;

/// A canonical rational value modulo 1 or modulo 2.
///
/// `num / den` is in lowest terms with `0 <= num/den < modulus`; which
/// modulus applies is fixed by context (Q/2Z for `q`, Q/Z for `b`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QValue {
    num: u64,
    den: u64,
}

impl QValue {
    pub const ZERO: QValue = QValue { num: 0, den: 1 };

    fn reduce(num: i128, den: i128, modulus: i128) -> QValue {
        assert!(den != 0, "zero denominator");
        let (mut num, mut den) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = num.gcd(&den);
        if g > 1 {
            num /= g;
            den /= g;
        }
        let num = num.rem_euclid(modulus * den);
        QValue {
            num: u64::try_from(num).expect("value numerator overflow"),
            den: u64::try_from(den).expect("value denominator overflow"),
        }
    }

    /// `num/den` reduced into `[0, 2)`.
    pub fn mod2(num: i128, den: i128) -> QValue {
        Self::reduce(num, den, 2)
    }

    /// `num/den` reduced into `[0, 1)`.
    pub fn mod1(num: i128, den: i128) -> QValue {
        Self::reduce(num, den, 1)
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// Integer `self * scale`; `scale` must be a multiple of the denominator.
    fn scaled(&self, scale: u64) -> u64 {
        debug_assert!(scale.is_multiple_of(self.den));
        self.num * (scale / self.den)
    }

    fn from_scaled(v: u64, scale: u64, modulus: i128) -> QValue {
        Self::reduce(v as i128, scale as i128, modulus)
    }
}

impl fmt::Display for QValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num == 0 {
            write!(f, "0")
        } else if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// A finite abelian group `Z/d_1 + ... + Z/d_k` with a nondegenerate-or-not
/// quadratic form valued in Q/2Z, given on generators.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FiniteQuadraticForm {
    orders: Vec<u64>,
    q_gens: Vec<QValue>,
    b_matrix: Vec<Vec<QValue>>,
    exponent: u64,
    q_scaled: Vec<u64>,
    b_scaled: Vec<Vec<u64>>,
}

impl FiniteQuadraticForm {
    /// Builds and validates a form from generator orders, `q` on generators,
    /// and the symmetric matrix of `b(g_i, g_j)` in Q/Z.
    ///
    /// The diagonal of `b_matrix` must agree with `q_gens` modulo 1.
    pub fn new(orders: Vec<u64>, q_gens: Vec<QValue>, b_matrix: Vec<Vec<QValue>>) -> Result<Self> {
        let k = orders.len();
        if q_gens.len() != k || b_matrix.len() != k || b_matrix.iter().any(|r| r.len() != k) {
            return Err(Error::invalid("finite form data has inconsistent lengths"));
        }
        if let Some(&d) = orders.iter().find(|&&d| d < 2) {
            return Err(Error::invalid(format!("generator order {d} must exceed 1")));
        }
        let exponent = orders.iter().fold(1u64, |acc, &d| {
            let l = acc.lcm(&d);
            if l > MAX_EXPONENT {
                MAX_EXPONENT + 1
            } else {
                l
            }
        });
        if exponent > MAX_EXPONENT {
            return Err(Error::unsupported("discriminant group exponent exceeds 2^62"));
        }
        for i in 0..k {
            let d = orders[i];
            let q = q_gens[i];
            if !d.is_multiple_of(q.den) {
                return Err(Error::invalid(format!(
                    "q(g{i}) = {q} is incompatible with generator order {d}"
                )));
            }
            // q(d g) = d^2 q(g) must vanish in Q/2Z
            if d % 2 == 1 && q.num % 2 == 1 {
                return Err(Error::invalid(format!("q(g{i}) = {q} is not well defined on Z/{d}")));
            }
            if b_matrix[i][i] != QValue::mod1(q.num as i128, q.den as i128) {
                return Err(Error::invalid(format!("b(g{i}, g{i}) must equal q(g{i}) mod 1")));
            }
            for j in 0..k {
                let b = b_matrix[i][j];
                if b != b_matrix[j][i] {
                    return Err(Error::invalid("bilinear matrix must be symmetric"));
                }
                if !d.is_multiple_of(b.den) || !orders[j].is_multiple_of(b.den) {
                    return Err(Error::invalid(format!(
                        "b(g{i}, g{j}) = {b} is incompatible with the generator orders"
                    )));
                }
            }
        }
        let q_scaled = q_gens.iter().map(|q| q.scaled(exponent)).collect();
        let b_scaled = b_matrix
            .iter()
            .map(|r| r.iter().map(|b| b.scaled(exponent)).collect())
            .collect();
        Ok(FiniteQuadraticForm {
            orders,
            q_gens,
            b_matrix,
            exponent,
            q_scaled,
            b_scaled,
        })
    }

    /// The trivial group.
    pub fn trivial() -> Self {
        Self::new(vec![], vec![], vec![]).expect("trivial form")
    }

    /// `(Z/order, q(g) = q)`.
    pub fn cyclic(order: u64, q: QValue) -> Result<Self> {
        let b = QValue::mod1(q.num as i128, q.den as i128);
        Self::new(vec![order], vec![q], vec![vec![b]])
    }

    /// `(Z/2n, q(g) = 1/2n)`, the discriminant form of `<2n>`.
    pub fn rank_one(n: u64) -> Result<Self> {
        Self::cyclic(2 * n, QValue::mod2(1, 2 * n as i128))
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn q_gens(&self) -> &[QValue] {
        &self.q_gens
    }

    pub fn b_matrix(&self) -> &[Vec<QValue>] {
        &self.b_matrix
    }

    /// Number of generators.
    pub fn num_generators(&self) -> usize {
        self.orders.len()
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// Group order, or `None` on `u128` overflow.
    pub fn order(&self) -> Option<u128> {
        self.orders.iter().try_fold(1u128, |acc, &d| acc.checked_mul(d as u128))
    }

    /// Group order, failing if it exceeds `cap`.
    pub fn order_within(&self, cap: u64) -> Result<u64> {
        match self.order() {
            Some(n) if n <= cap as u128 => Ok(n as u64),
            Some(n) => Err(Error::CapExceeded {
                size: n.to_string(),
                cap,
            }),
            None => Err(Error::CapExceeded {
                size: "more than 2^128".into(),
                cap,
            }),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.orders.is_empty()
    }

    /// The form `(A, -q)`.
    pub fn negated(&self) -> Self {
        let q = self
            .q_gens
            .iter()
            .map(|v| QValue::mod2(-(v.num as i128), v.den as i128))
            .collect();
        let b = self
            .b_matrix
            .iter()
            .map(|r| {
                r.iter()
                    .map(|v| QValue::mod1(-(v.num as i128), v.den as i128))
                    .collect()
            })
            .collect();
        Self::new(self.orders.clone(), q, b).expect("negation preserves validity")
    }

    /// Orthogonal direct sum.
    pub fn orthogonal_sum(&self, other: &Self) -> Self {
        let (k, l) = (self.num_generators(), other.num_generators());
        let mut orders = self.orders.clone();
        orders.extend_from_slice(&other.orders);
        let mut q = self.q_gens.clone();
        q.extend_from_slice(&other.q_gens);
        let mut b = vec![vec![QValue::ZERO; k + l]; k + l];
        for i in 0..k {
            for j in 0..k {
                b[i][j] = self.b_matrix[i][j];
            }
        }
        for i in 0..l {
            for j in 0..l {
                b[k + i][k + j] = other.b_matrix[i][j];
            }
        }
        Self::new(orders, q, b).expect("orthogonal sum of valid forms")
    }

    fn check_element(&self, x: &[u64]) -> Result<()> {
        if x.len() != self.orders.len() {
            return Err(Error::invalid(format!(
                "element has {} coefficients, expected {}",
                x.len(),
                self.orders.len()
            )));
        }
        Ok(())
    }

    /// Reduces an arbitrary coefficient vector into canonical range.
    pub fn normalize(&self, x: &[i128]) -> Vec<u64> {
        x.iter()
            .zip(&self.orders)
            .map(|(&c, &d)| c.rem_euclid(d as i128) as u64)
            .collect()
    }

    /// `q(x)` on a coefficient vector.
    pub fn evaluate_q(&self, x: &[u64]) -> Result<QValue> {
        self.check_element(x)?;
        Ok(QValue::from_scaled(self.q_scaled_of(x), self.exponent, 2))
    }

    /// `b(x, y)` in Q/Z.
    pub fn evaluate_b(&self, x: &[u64], y: &[u64]) -> Result<QValue> {
        self.check_element(x)?;
        self.check_element(y)?;
        Ok(QValue::from_scaled(self.b_scaled_of(x, y), self.exponent, 1))
    }

    /// `q(x) * e mod 2e`.
    pub(crate) fn q_scaled_of(&self, x: &[u64]) -> u64 {
        let m = 2 * self.exponent;
        let k = self.orders.len();
        let mut acc = 0u64;
        for i in 0..k {
            if x[i] == 0 {
                continue;
            }
            let c = x[i] % m;
            acc = (acc + mulmod(mulmod(c, c, m), self.q_scaled[i], m)) % m;
            for j in i + 1..k {
                if x[j] == 0 {
                    continue;
                }
                let t = mulmod(mulmod(c, x[j] % m, m), self.b_scaled[i][j], m);
                acc = (acc + 2 * t) % m;
            }
        }
        acc
    }

    /// `b(x, y) * e mod e`.
    pub(crate) fn b_scaled_of(&self, x: &[u64], y: &[u64]) -> u64 {
        let m = self.exponent;
        let k = self.orders.len();
        let mut acc = 0u64;
        for i in 0..k {
            if x[i] == 0 {
                continue;
            }
            for j in 0..k {
                if y[j] == 0 {
                    continue;
                }
                let t = mulmod(mulmod(x[i] % m, y[j] % m, m), self.b_scaled[i][j], m);
                acc = (acc + t) % m;
            }
        }
        acc
    }

    pub(crate) fn q_scaled_gen(&self, i: usize) -> u64 {
        self.q_scaled[i]
    }

    pub(crate) fn b_scaled_gen(&self, i: usize, j: usize) -> u64 {
        self.b_scaled[i][j]
    }

    pub fn zero(&self) -> Vec<u64> {
        vec![0; self.orders.len()]
    }

    /// The `i`-th generator as a coefficient vector.
    pub fn generator(&self, i: usize) -> Vec<u64> {
        let mut v = self.zero();
        v[i] = 1;
        v
    }

    pub fn add(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        x.iter()
            .zip(y)
            .zip(&self.orders)
            .map(|((&a, &b), &d)| ((a as u128 + b as u128) % d as u128) as u64)
            .collect()
    }

    pub fn neg(&self, x: &[u64]) -> Vec<u64> {
        x.iter()
            .zip(&self.orders)
            .map(|(&a, &d)| if a == 0 { 0 } else { d - a })
            .collect()
    }

    /// `n * x`.
    pub fn mul(&self, n: u64, x: &[u64]) -> Vec<u64> {
        x.iter().zip(&self.orders).map(|(&a, &d)| mulmod(n % d, a, d)).collect()
    }

    /// Whether `n * x = 0`.
    pub fn is_killed_by(&self, n: u64, x: &[u64]) -> bool {
        x.iter().zip(&self.orders).all(|(&a, &d)| mulmod(n % d, a, d) == 0)
    }

    /// Iterates all elements in lexicographic order of coefficient vectors.
    pub fn elements(&self) -> Elements<'_> {
        Elements {
            orders: &self.orders,
            next: Some(self.zero()),
        }
    }
}

impl fmt::Debug for FiniteQuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FiniteQuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "trivial");
        }
        let parts: Vec<String> = self
            .orders
            .iter()
            .zip(&self.q_gens)
            .map(|(d, q)| format!("Z/{d}[q={q}]"))
            .collect();
        write!(f, "{}", parts.join(" + "))?;
        let k = self.orders.len();
        let off: Vec<String> = (0..k)
            .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
            .filter(|&(i, j)| !self.b_matrix[i][j].is_zero())
            .map(|(i, j)| format!("b({i},{j})={}", self.b_matrix[i][j]))
            .collect();
        if !off.is_empty() {
            write!(f, " with {}", off.join(", "))?;
        }
        Ok(())
    }
}

/// Lexicographic iterator over the elements of a finite abelian group.
pub struct Elements<'a> {
    orders: &'a [u64],
    next: Option<Vec<u64>>,
}

impl Iterator for Elements<'_> {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut i = succ.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            succ[i] += 1;
            if succ[i] < self.orders[i] {
                self.next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(current)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qvalue_canonical() {
        assert_eq!(QValue::mod2(5, 2), QValue::mod2(1, 2));
        assert_eq!(QValue::mod2(-1, 2), QValue::mod2(3, 2));
        assert_eq!(QValue::mod2(4, 8), QValue::mod2(1, 2));
        assert_eq!(QValue::mod1(3, 2), QValue::mod1(1, 2));
        assert_eq!(QValue::mod2(2, -4).to_string(), "3/2");
    }

    #[test]
    fn evaluate_generator_and_zero() {
        let a = FiniteQuadraticForm::rank_one(3).unwrap();
        assert_eq!(a.evaluate_q(&[1]).unwrap(), QValue::mod2(1, 6));
        assert_eq!(a.evaluate_q(&[0]).unwrap(), QValue::ZERO);
        let z8 = FiniteQuadraticForm::cyclic(8, QValue::mod2(1, 8)).unwrap();
        assert_eq!(z8.evaluate_q(&[2]).unwrap(), QValue::mod2(1, 2));
        assert!(matches!(z8.evaluate_q(&[1, 0]), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn q_is_quadratic() {
        let a = FiniteQuadraticForm::cyclic(12, QValue::mod2(5, 12)).unwrap();
        let s = a.orthogonal_sum(&FiniteQuadraticForm::cyclic(2, QValue::mod2(1, 2)).unwrap());
        for x in s.elements() {
            for n in 0..5u64 {
                let lhs = s.evaluate_q(&s.mul(n, &x)).unwrap();
                let q = s.evaluate_q(&x).unwrap();
                let rhs = QValue::mod2((n * n) as i128 * q.num() as i128, q.den() as i128);
                assert_eq!(lhs, rhs);
            }
            for y in s.elements() {
                // q(x+y) - q(x) - q(y) = 2 b(x,y) mod 2
                let e = s.exponent() as i128;
                let l = s.q_scaled_of(&s.add(&x, &y)) as i128 - s.q_scaled_of(&x) as i128 - s.q_scaled_of(&y) as i128;
                let r = 2 * s.b_scaled_of(&x, &y) as i128;
                assert_eq!((l - r).rem_euclid(2 * e), 0);
            }
        }
    }

    #[test]
    fn rejects_ill_defined_values() {
        assert!(FiniteQuadraticForm::cyclic(5, QValue::mod2(3, 5)).is_err());
        assert!(FiniteQuadraticForm::cyclic(4, QValue::mod2(1, 8)).is_err());
        assert!(FiniteQuadraticForm::cyclic(1, QValue::ZERO).is_err());
        assert!(FiniteQuadraticForm::cyclic(5, QValue::mod2(2, 5)).is_ok());
    }

    #[test]
    fn element_iteration_is_lexicographic() {
        let a = FiniteQuadraticForm::cyclic(2, QValue::mod2(1, 2))
            .unwrap()
            .orthogonal_sum(&FiniteQuadraticForm::cyclic(3, QValue::mod2(2, 3)).unwrap());
        let els: Vec<Vec<u64>> = a.elements().collect();
        assert_eq!(els.len(), 6);
        assert_eq!(els[0], vec![0, 0]);
        assert_eq!(els[1], vec![0, 1]);
        assert_eq!(els[3], vec![1, 0]);
        assert_eq!(FiniteQuadraticForm::trivial().elements().count(), 1);
    }
}
