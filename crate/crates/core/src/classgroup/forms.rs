//! Positive definite binary quadratic forms: reduction, composition and the
//! form class group.

use std::collections::HashMap;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::abelian::invariants_from_orders;
use crate::error::{Error, Result};
use crate::exact::arith::is_fundamental_discriminant;
use crate::exact::scalar::ext_gcd;

/// The form `a x^2 + b x y + c y^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

impl QuadForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        QuadForm { a, b, c }
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c) == 1
    }

    /// `|b| <= a <= c`, with `b >= 0` when `|b| = a` or `a = c`.
    pub fn is_reduced(&self) -> bool {
        let QuadForm { a, b, c } = *self;
        a > 0 && b.abs() <= a && a <= c && !((b.abs() == a || a == c) && b < 0)
    }

    /// Principal form of discriminant `d`.
    pub fn identity(d: i64) -> Self {
        let b = d.rem_euclid(2);
        QuadForm::new(1, b, (b * b - d) / 4)
    }

    pub fn inverse(&self) -> Self {
        QuadForm::new(self.a, -self.b, self.c).reduce()
    }

    /// The equivalent reduced form.
    pub fn reduce(&self) -> Self {
        let (mut a, mut b, mut c) = (self.a as i128, self.b as i128, self.c as i128);
        debug_assert!(a > 0 && b * b - 4 * a * c < 0, "reduction of a non-definite form");
        loop {
            if b > a || b <= -a {
                // normalize b into (-a, a]
                let two_a = 2 * a;
                let r = (b + a - 1).div_euclid(two_a);
                let nb = b - two_a * r;
                c = (nb * nb - (b * b - 4 * a * c)) / (4 * a);
                b = nb;
            }
            if a > c {
                std::mem::swap(&mut a, &mut c);
                b = -b;
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            break;
        }
        QuadForm::new(a as i64, b as i64, c as i64)
    }

    /// Gaussian composition followed by reduction.
    pub fn compose(&self, o: &Self) -> Self {
        let (mut f1, mut f2) = (*self, *o);
        if f1.a > f2.a {
            std::mem::swap(&mut f1, &mut f2);
        }
        let (a1, b1, _) = (f1.a as i128, f1.b as i128, f1.c as i128);
        let (a2, b2, c2) = (f2.a as i128, f2.b as i128, f2.c as i128);
        let s = (b1 + b2) / 2;
        let n = b2 - s;
        let (d, y1) = if a2 % a1 == 0 {
            (a1, 0)
        } else {
            let (d, u, _) = ext_gcd(&a2, &a1);
            (d, u)
        };
        let (d1, x2, y2) = if s % d == 0 {
            (d, 0, -1)
        } else {
            let (d1, u, v) = ext_gcd(&s, &d);
            (d1, u, -v)
        };
        let v1 = a1 / d1;
        let v2 = a2 / d1;
        let r = (y1 * y2 * n - x2 * c2).rem_euclid(v1);
        let b3 = b2 + 2 * v2 * r;
        let a3 = v1 * v2;
        let c3 = (c2 * d1 + r * (b2 + v2 * r)) / v1;
        QuadForm::new(a3 as i64, b3 as i64, c3 as i64).reduce()
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = QuadForm::identity(self.discriminant());
        let mut b = self.reduce();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&b);
            }
            b = b.compose(&b);
            e >>= 1;
        }
        acc
    }
}

fn check_negative_discriminant(d: i64) -> Result<()> {
    if d >= 0 || !matches!(d.rem_euclid(4), 0 | 1) {
        return Err(Error::InvalidDiscriminant(d));
    }
    Ok(())
}

/// All primitive reduced forms of discriminant `d < 0`, sorted by `(a, b)`.
pub fn reduced_forms(d: i64) -> Result<Vec<QuadForm>> {
    check_negative_discriminant(d)?;
    let n = -d;
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= n {
        let mut b = -a + 1;
        while b <= a {
            if (b - d).rem_euclid(2) == 0 {
                let num = b * b - d;
                if num % (4 * a) == 0 {
                    let c = num / (4 * a);
                    let f = QuadForm::new(a, b, c);
                    if f.is_reduced() && f.is_primitive() {
                        out.push(f);
                    }
                }
            }
            b += 1;
        }
        a += 1;
    }
    out.sort();
    Ok(out)
}

/// The form class group of a fundamental discriminant.
#[derive(Clone, Debug)]
pub struct FormClassGroup {
    pub discriminant: i64,
    pub forms: Vec<QuadForm>,
    pub elementary_divisors: Vec<u64>,
}

impl FormClassGroup {
    pub fn order(&self) -> u64 {
        self.forms.len() as u64
    }

    /// Order of each form in the group, in the order of `forms`.
    pub fn element_orders(&self) -> Vec<u64> {
        element_orders(&self.forms)
    }
}

fn element_orders(forms: &[QuadForm]) -> Vec<u64> {
    let Some(first) = forms.first() else {
        return Vec::new();
    };
    let id = QuadForm::identity(first.discriminant());
    forms
        .iter()
        .map(|f| {
            let mut k = 1u64;
            let mut cur = *f;
            while cur != id {
                cur = cur.compose(f);
                k += 1;
            }
            k
        })
        .collect()
}

pub fn reduced_forms_class_group(d: i64) -> Result<FormClassGroup> {
    check_negative_discriminant(d)?;
    if !is_fundamental_discriminant(d) {
        return Err(Error::NonFundamental(d));
    }
    let forms = reduced_forms(d)?;
    let orders = element_orders(&forms);
    let elementary_divisors = invariants_from_orders(&orders);
    Ok(FormClassGroup { discriminant: d, forms, elementary_divisors })
}

/// Group table sanity: closure and a lookup from forms to indices.
pub fn form_index(forms: &[QuadForm]) -> HashMap<QuadForm, usize> {
    forms.iter().enumerate().map(|(i, f)| (*f, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_discriminants() {
        assert_eq!(reduced_forms(-4).unwrap(), vec![QuadForm::new(1, 0, 1)]);
        assert_eq!(
            reduced_forms(-23).unwrap(),
            vec![QuadForm::new(1, 1, 6), QuadForm::new(2, -1, 3), QuadForm::new(2, 1, 3)]
        );
        assert_eq!(reduced_forms(-15).unwrap(), vec![QuadForm::new(1, 1, 4), QuadForm::new(2, 1, 2)]);
        assert_eq!(reduced_forms_class_group(-47).unwrap().order(), 5);
        assert!(matches!(reduced_forms(-5), Err(Error::InvalidDiscriminant(-5))));
        assert!(matches!(reduced_forms_class_group(-12), Err(Error::NonFundamental(-12))));
    }

    #[test]
    fn group_law() {
        let d = -3299;
        let fs = reduced_forms(d).unwrap();
        let id = QuadForm::identity(d);
        let idx = form_index(&fs);
        for f in &fs {
            assert_eq!(f.compose(&id), *f);
            assert_eq!(f.compose(&f.inverse()), id);
            for g in fs.iter().take(7) {
                let fg = f.compose(g);
                assert!(idx.contains_key(&fg));
                assert_eq!(fg, g.compose(f));
                for h in fs.iter().take(3) {
                    assert_eq!(fg.compose(h), f.compose(&g.compose(h)));
                }
            }
        }
        // Cl(-3299) = Z/3 x Z/9
        assert_eq!(reduced_forms_class_group(d).unwrap().elementary_divisors, vec![3, 9]);
        assert_eq!(reduced_forms_class_group(-4).unwrap().elementary_divisors, Vec::<u64>::new());
        assert_eq!(reduced_forms_class_group(-84).unwrap().elementary_divisors, vec![2, 2]);
    }
}
