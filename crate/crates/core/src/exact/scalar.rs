use std::fmt::{Debug, Display};

use num_integer::Integer;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

/// Integer-like scalars the lattice algorithms are generic over.
///
/// `BigInt` is the workhorse; `i64`/`i128` are fine for small dimensions
/// where the caller can bound entry growth.
pub trait IntScalar:
    Integer + Signed + Clone + Debug + Display + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
}

impl<T> IntScalar for T where
    T: Integer
        + Signed
        + Clone
        + Debug
        + Display
        + FromPrimitive
        + ToPrimitive
        + Send
        + Sync
        + 'static
{
}

/// Extended gcd with a nonnegative gcd: returns `(g, x, y)` with `a x + b y = g`.
pub fn ext_gcd<T: IntScalar>(a: &T, b: &T) -> (T, T, T) {
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (T::one(), T::zero());
    let (mut old_t, mut t) = (T::zero(), T::one());
    while !r.is_zero() {
        let q = old_r.div_floor(&r);
        let nr = old_r - q.clone() * r.clone();
        old_r = std::mem::replace(&mut r, nr);
        let ns = old_s - q.clone() * s.clone();
        old_s = std::mem::replace(&mut s, ns);
        let nt = old_t - q * t.clone();
        old_t = std::mem::replace(&mut t, nt);
    }
    if old_r.is_negative() {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Least nonnegative residue.
pub fn mod_floor<T: IntScalar>(a: &T, m: &T) -> T {
    a.mod_floor(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn ext_gcd_identity() {
        for (a, b) in [(12i64, 18i64), (-7, 5), (0, 9), (9, 0), (-4, -6)] {
            let (g, x, y) = ext_gcd(&a, &b);
            assert_eq!(a * x + b * y, g);
            assert_eq!(g, a.gcd(&b));
        }
        let (g, x, y) = ext_gcd(&BigInt::from(240), &BigInt::from(46));
        assert_eq!(g, BigInt::from(2));
        assert_eq!(BigInt::from(240) * x + BigInt::from(46) * y, g);
    }
}
