use std::fmt;

use num_bigint::{BigInt, Sign};
use serde::Serialize;

use crate::rational::Rational;

/// The real number `coefficient · base^exponent` with rational parts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymbolicValue {
    pub coefficient: Rational,
    pub base: Rational,
    pub exponent: Rational,
}

impl SymbolicValue {
    pub fn new(coefficient: Rational, base: Rational, exponent: Rational) -> Self {
        SymbolicValue {
            coefficient,
            base,
            exponent,
        }
    }

    pub fn rational(value: Rational) -> Self {
        SymbolicValue::new(value, Rational::one(), Rational::zero())
    }

    pub fn scale(&self, s: &Rational) -> Self {
        SymbolicValue::new(&self.coefficient * s, self.base.clone(), self.exponent.clone())
    }

    /// Product of two values; defined when the powers share a base or one of
    /// them is already rational.
    pub fn mul(&self, other: &SymbolicValue) -> Option<SymbolicValue> {
        let (a, b) = (self.simplified(), other.simplified());
        if a.exponent.is_zero() {
            return Some(b.scale(&a.coefficient));
        }
        if b.exponent.is_zero() {
            return Some(a.scale(&b.coefficient));
        }
        (a.base == b.base).then(|| {
            SymbolicValue::new(&a.coefficient * &b.coefficient, a.base.clone(), &a.exponent + &b.exponent)
                .simplified()
        })
    }

    fn simplified(&self) -> SymbolicValue {
        match self.try_rational() {
            Some(v) => SymbolicValue::rational(v),
            None => self.clone(),
        }
    }

    /// The exact value when it is rational.
    pub fn try_rational(&self) -> Option<Rational> {
        if self.exponent.is_zero() || self.coefficient.is_zero() {
            return Some(self.coefficient.clone());
        }
        if self.base.is_zero() {
            return self.exponent.is_positive().then(Rational::zero);
        }
        let p = i32::try_from(self.exponent.numer().clone()).ok()?;
        let k = u32::try_from(self.exponent.denom().clone()).ok()?;
        let powered = self.base.pow(p);
        let root = rational_root(&powered, k)?;
        Some(&self.coefficient * &root)
    }

    /// Exact equality of the represented real numbers, regardless of how
    /// each is written. Irrational powers must have positive bases.
    pub fn same_value(&self, other: &SymbolicValue) -> bool {
        if self == other {
            return true;
        }
        if let (Some(x), Some(y)) = (self.try_rational(), other.try_rational()) {
            return x == y;
        }
        let positive_bases = self.base.is_positive() && other.base.is_positive();
        if !positive_bases || self.coefficient.is_negative() != other.coefficient.is_negative() {
            return false;
        }
        let l = num_integer::lcm(self.exponent.denom().clone(), other.exponent.denom().clone());
        let Ok(l) = i32::try_from(l) else { return false };
        let power = |v: &SymbolicValue| -> Option<Rational> {
            let e = i32::try_from((&v.exponent * &Rational::from(l as i64)).numer().clone()).ok()?;
            Some(v.coefficient.pow(l) * v.base.pow(e))
        };
        matches!((power(self), power(other)), (Some(a), Some(b)) if a == b)
    }

    pub fn to_f64(&self) -> f64 {
        match self.try_rational() {
            Some(v) => v.to_f64(),
            None => self.coefficient.to_f64() * self.base.to_f64().powf(self.exponent.to_f64()),
        }
    }
}

fn exact_root(n: &BigInt, k: u32) -> Option<BigInt> {
    if n.sign() == Sign::Minus && k % 2 == 0 {
        return None;
    }
    let r = n.nth_root(k);
    (r.pow(k) == *n).then_some(r)
}

fn rational_root(x: &Rational, k: u32) -> Option<Rational> {
    if k == 1 {
        return Some(x.clone());
    }
    let n = exact_root(x.numer(), k)?;
    let d = exact_root(x.denom(), k)?;
    Some(Rational::from_bigints(n, d))
}

impl fmt::Display for SymbolicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.try_rational() {
            Some(v) => write!(f, "{v}"),
            None if self.coefficient == Rational::one() => write!(f, "({})^({})", self.base, self.exponent),
            None => write!(f, "{} * ({})^({})", self.coefficient, self.base, self.exponent),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::r;

    #[test]
    fn integer_powers_are_rational() {
        let v = SymbolicValue::new(r("3"), r("2/3"), r("-2"));
        assert_eq!(v.try_rational(), Some(r("27/4")));
    }

    #[test]
    fn perfect_roots_are_rational() {
        let v = SymbolicValue::new(r("1"), r("4/9"), r("-1/2"));
        assert_eq!(v.try_rational(), Some(r("3/2")));
        let cube = SymbolicValue::new(r("2"), r("-8"), r("1/3"));
        assert_eq!(cube.try_rational(), Some(r("-4")));
    }

    #[test]
    fn equal_values_in_different_forms_compare_equal() {
        let a = SymbolicValue::new(r("5/4"), r("1/2"), r("-1/2"));
        let b = SymbolicValue::new(r("25/8"), r("25/8"), r("-1/2"));
        assert!(a.same_value(&b));
        assert!(!a.same_value(&b.scale(&r("2"))));
        assert!(!a.same_value(&a.scale(&r("-1"))));
        let c = SymbolicValue::new(r("1"), r("4"), r("1/3"));
        assert!(c.same_value(&SymbolicValue::new(r("1"), r("2"), r("2/3"))));
    }

    #[test]
    fn irrational_values_stay_symbolic() {
        let v = SymbolicValue::new(r("1"), r("1/2"), r("-1/2"));
        assert_eq!(v.try_rational(), None);
        assert!((v.to_f64() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(v.to_string(), "(1/2)^(-1/2)");
    }

    #[test]
    fn products_with_a_common_base() {
        let a = SymbolicValue::new(r("1/2"), r("2"), r("-1/2"));
        let b = SymbolicValue::new(r("3"), r("2"), r("-1/2"));
        assert_eq!(a.mul(&b).unwrap().try_rational(), Some(r("3/4")));
        let c = SymbolicValue::new(r("1"), r("3"), r("1/2"));
        assert!(a.mul(&c).is_none());
        assert_eq!(a.mul(&SymbolicValue::rational(r("2"))).unwrap().coefficient, r("1"));
    }
}
