use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ball::{Ball, ComplexBall, Dyadic};
use super::poly::Poly;
use crate::error::{Error, Result};

/// Isolated roots of a squarefree integer polynomial.
#[derive(Clone, Debug)]
pub struct RootSet {
    /// One enclosure per root, ordered lexicographically by (re, im) midpoint.
    pub roots: Vec<ComplexBall>,
    /// `conj[i]` is the index of the complex-conjugate root (`i` for real roots).
    pub conj: Vec<usize>,
    /// Working precision that succeeded.
    pub precision: u32,
}

impl RootSet {
    pub fn real_count(&self) -> usize {
        (0..self.conj.len()).filter(|&i| self.conj[i] == i).count()
    }
}

/// Evaluate an integer polynomial on a complex ball.
pub fn eval_complex(f: &Poly<BigInt>, z: &ComplexBall) -> ComplexBall {
    let p = z.prec();
    let mut acc = ComplexBall::zero(p);
    for c in f.coeffs().iter().rev() {
        acc = &(&acc * z) + &ComplexBall::from_real(Ball::from_int(c, p));
    }
    acc
}

pub fn eval_real(f: &Poly<BigInt>, x: &Ball) -> Ball {
    let p = x.prec();
    let mut acc = Ball::zero(p);
    for c in f.coeffs().iter().rev() {
        acc = &(&acc * x) + &Ball::from_int(c, p);
    }
    acc
}

type C64 = (f64, f64);

fn cmul(a: C64, b: C64) -> C64 {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn cdiv(a: C64, b: C64) -> C64 {
    let d = b.0 * b.0 + b.1 * b.1;
    ((a.0 * b.0 + a.1 * b.1) / d, (a.1 * b.0 - a.0 * b.1) / d)
}

fn aberth_f64(f: &Poly<BigInt>) -> Vec<C64> {
    let n = f.degree();
    let c: Vec<f64> = f.coeffs().iter().map(|a| a.to_f64().unwrap_or(f64::MAX)).collect();
    let lead = c[n].abs();
    let bound = 1.0 + c[..n].iter().map(|a| a.abs() / lead).fold(0.0, f64::max);
    let r0 = bound.min(1e6) * 0.7;
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64) + 0.4;
            (r0 * t.cos(), r0 * t.sin())
        })
        .collect();
    let dc: Vec<f64> = (1..=n).map(|i| c[i] * i as f64).collect();
    let ev = |cs: &[f64], x: C64| {
        let mut acc = (0.0, 0.0);
        for &a in cs.iter().rev() {
            acc = cmul(acc, x);
            acc.0 += a;
        }
        acc
    };
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let w = cdiv(ev(&c, z[i]), ev(&dc, z[i]));
            if !w.0.is_finite() || !w.1.is_finite() {
                continue;
            }
            let mut s = (0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = cdiv((1.0, 0.0), (z[i].0 - z[j].0, z[i].1 - z[j].1));
                    s.0 += d.0;
                    s.1 += d.1;
                }
            }
            let den = (1.0 - cmul(w, s).0, -cmul(w, s).1);
            let step = cdiv(w, den);
            if step.0.is_finite() && step.1.is_finite() {
                z[i].0 -= step.0;
                z[i].1 -= step.1;
                moved = moved.max(step.0.hypot(step.1) / (1.0 + z[i].0.hypot(z[i].1)));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Make the approximation set closed under conjugation: real roots get an exact
/// zero imaginary part, others are paired with their nearest mirror image.
fn symmetrize(z: &mut [ComplexBall], real_count: usize) -> Option<Vec<usize>> {
    let n = z.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        z[a].im.to_f64()
            .abs()
            .partial_cmp(&z[b].im.to_f64().abs())
            .unwrap_or(Ordering::Equal)
    });
    let mut conj = vec![usize::MAX; n];
    for &i in order.iter().take(real_count) {
        conj[i] = i;
        let p = z[i].prec();
        z[i] = ComplexBall::new(z[i].re.midpoint_ball(), Ball::zero(p));
    }
    let rest: Vec<usize> = order[real_count..].to_vec();
    for &i in &rest {
        if conj[i] != usize::MAX {
            continue;
        }
        let (zr, zi) = z[i].to_f64();
        let best = rest
            .iter()
            .copied()
            .filter(|&j| j != i && conj[j] == usize::MAX)
            .min_by(|&a, &b| {
                let da = (z[a].re.to_f64() - zr).hypot(z[a].im.to_f64() + zi);
                let db = (z[b].re.to_f64() - zr).hypot(z[b].im.to_f64() + zi);
                da.partial_cmp(&db).unwrap_or(Ordering::Equal)
            })?;
        conj[i] = best;
        conj[best] = i;
        let (up, _down) = if zi > 0.0 { (i, best) } else { (best, i) };
        let m = z[up].midpoint_ball();
        let m = if m.im.is_negative() { m.conj() } else { m };
        z[up] = m.clone();
        let other = if up == i { best } else { i };
        z[other] = m.conj();
    }
    Some(conj)
}

fn aberth_step(f: &Poly<BigInt>, df: &Poly<BigInt>, z: &mut [ComplexBall]) -> Result<Dyadic> {
    let n = z.len();
    let mut worst = Dyadic::zero();
    for i in 0..n {
        let fv = eval_complex(f, &z[i]);
        let dv = eval_complex(df, &z[i]);
        if dv.contains_zero() {
            continue;
        }
        let w = fv.checked_div(&dv)?.midpoint_ball();
        let mut s = ComplexBall::zero(z[i].prec());
        for j in 0..n {
            if j != i {
                let d = &z[i] - &z[j];
                if d.contains_zero() {
                    continue;
                }
                s = &s + &ComplexBall::one(d.prec()).checked_div(&d)?.midpoint_ball();
            }
        }
        let den = &ComplexBall::one(w.prec()) - &(&w * &s);
        if den.contains_zero() {
            continue;
        }
        let step = w.checked_div(&den)?.midpoint_ball();
        let mag = step.abs_upper();
        if mag.cmp_value(&worst) == Ordering::Greater {
            worst = mag;
        }
        z[i] = (&z[i] - &step).midpoint_ball();
    }
    Ok(worst)
}

/// Inclusion radii `n |W_i|` from the Weierstrass corrections.
fn inclusion_radii(f: &Poly<BigInt>, z: &[ComplexBall]) -> Option<Vec<Dyadic>> {
    let n = z.len();
    let p = z[0].prec();
    let lead = ComplexBall::from_real(Ball::from_int(&f.lead(), p));
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut den = lead.clone();
        for j in 0..n {
            if j != i {
                den = &den * &(&z[i] - &z[j]);
            }
        }
        let w = eval_complex(f, &z[i]).checked_div(&den).ok()?;
        let r = w.abs_upper().mul(&Dyadic::from_i64(n as i64));
        out.push(r.round_up_mag(30));
    }
    Some(out)
}

fn disks_disjoint(a: &ComplexBall, ra: &Dyadic, b: &ComplexBall, rb: &Dyadic) -> bool {
    let d = (a - b).abs_lower();
    d.cmp_value(&ra.add(rb)) == Ordering::Greater
}

/// Certified isolation of all complex roots with radii at most `2^-precision`.
pub fn isolate_roots(f: &Poly<BigInt>, precision: u32) -> Result<RootSet> {
    let n = f.degree();
    if f.is_zero() {
        return Err(Error::DegenerateInput("zero polynomial".into()));
    }
    if n == 0 {
        return Ok(RootSet {
            roots: Vec::new(),
            conj: Vec::new(),
            precision,
        });
    }
    if !f.is_squarefree() {
        return Err(Error::NotSquarefree);
    }
    let df = f.derivative();
    let real_count = f.count_real_roots();
    let start = aberth_f64(f);
    let target = Dyadic::pow2(-(precision as i64));
    let cap = precision.max(32) * 16;
    let mut wp = precision.max(32) + 32;
    let mut z: Vec<ComplexBall> = start
        .iter()
        .map(|&(a, b)| ComplexBall::from_f64(a, b, wp))
        .collect();
    while wp <= cap {
        z = z.iter().map(|c| c.with_prec(wp).midpoint_ball()).collect();
        for _ in 0..(40 + wp / 8) {
            let step = aberth_step(f, &df, &mut z)?;
            if step.mag_bits() < -(wp as i64) + 8 {
                break;
            }
        }
        let Some(conj) = symmetrize(&mut z, real_count) else {
            wp *= 2;
            continue;
        };
        if let Some(radii) = inclusion_radii(f, &z) {
            let small = radii.iter().all(|r| r.cmp_value(&target) != Ordering::Greater);
            let mut ok = small;
            for i in 0..n {
                for j in i + 1..n {
                    if ok && !disks_disjoint(&z[i], &radii[i], &z[j], &radii[j]) {
                        ok = false;
                    }
                }
            }
            // each mirror disk must meet exactly the paired disk
            for i in 0..n {
                if !ok {
                    break;
                }
                let m = z[i].conj();
                for j in 0..n {
                    let meets = !disks_disjoint(&m, &radii[i], &z[j], &radii[j]);
                    if meets != (j == conj[i]) {
                        ok = false;
                    }
                }
            }
            if ok {
                let mut idx: Vec<usize> = (0..n).collect();
                // real parts that agree within the enclosures count as equal
                let wide: Vec<ComplexBall> = (0..n).map(|i| z[i].inflate(&radii[i])).collect();
                idx.sort_by(|&a, &b| z[a].re.mid().cmp_value(z[b].re.mid()));
                let mut cluster = vec![0usize; n];
                for k in 1..n {
                    let (a, b) = (idx[k - 1], idx[k]);
                    cluster[b] = cluster[a] + usize::from(!wide[a].re.overlaps(&wide[b].re));
                }
                idx.sort_by(|&a, &b| {
                    cluster[a].cmp(&cluster[b]).then_with(|| z[a].im.mid().cmp_value(z[b].im.mid()))
                });
                let mut pos = vec![0; n];
                for (k, &i) in idx.iter().enumerate() {
                    pos[i] = k;
                }
                let roots = idx
                    .iter()
                    .map(|&i| {
                        if conj[i] == i {
                            ComplexBall::new(z[i].re.add_error(&radii[i]), Ball::zero(wp))
                        } else {
                            z[i].inflate(&radii[i])
                        }
                    })
                    .collect();
                let conj = idx.iter().map(|&i| pos[conj[i]]).collect();
                return Ok(RootSet {
                    roots,
                    conj,
                    precision: wp,
                });
            }
        }
        wp *= 2;
    }
    Err(Error::PrecisionExhausted(cap as u64))
}

/// Enclosures of all complex roots, one ball per root.
pub fn complex_roots(f: &Poly<BigInt>, precision: u32) -> Result<Vec<ComplexBall>> {
    Ok(isolate_roots(f, precision)?.roots)
}

/// Product `Π (x - r_i)` over a subset of root enclosures, as complex ball coefficients.
pub fn poly_from_roots(roots: &[&ComplexBall], prec: u32) -> Vec<ComplexBall> {
    let mut c = vec![ComplexBall::one(prec)];
    for r in roots {
        let mut next = vec![ComplexBall::zero(prec); c.len() + 1];
        for (k, ck) in c.iter().enumerate() {
            next[k + 1] = &next[k + 1] + ck;
            next[k] = &next[k] - &(ck * *r);
        }
        c = next;
    }
    c
}

/// Certified rounding of ball coefficients to an integer polynomial.
pub fn round_to_int_poly(c: &[ComplexBall]) -> Option<Poly<BigInt>> {
    let mut out = Vec::with_capacity(c.len());
    for v in c {
        if !v.im.contains_zero() {
            return None;
        }
        let rad = v.re.rad().to_f64();
        if rad >= 0.25 {
            return None;
        }
        out.push(v.re.unique_integer()?);
    }
    Some(Poly::new(out))
}

/// Irreducible factors over Z of a monic squarefree polynomial (degree ≤ 16).
pub fn factor_over_z(f: &Poly<BigInt>) -> Result<Vec<Poly<BigInt>>> {
    if !f.is_monic() {
        return Err(Error::DegenerateInput("factorization expects a monic polynomial".into()));
    }
    let n = f.degree();
    if n <= 1 {
        return Ok(vec![f.clone()]);
    }
    let mut prec = 128u32;
    loop {
        let rs = isolate_roots(f, prec)?;
        let mut remaining: Vec<usize> = (0..n).collect();
        let mut factors = Vec::new();
        let mut stuck = false;
        'outer: while !remaining.is_empty() {
            let m = remaining.len();
            for k in 1..=m / 2 {
                for subset in subsets(m, k) {
                    let rr: Vec<&ComplexBall> = subset.iter().map(|&s| &rs.roots[remaining[s]]).collect();
                    let c = poly_from_roots(&rr, rs.precision);
                    match round_to_int_poly(&c) {
                        Some(g) => {
                            if f.div_exact(&g).is_some() {
                                factors.push(g);
                                let keep: Vec<usize> = remaining
                                    .iter()
                                    .enumerate()
                                    .filter(|(i, _)| !subset.contains(i))
                                    .map(|(_, &r)| r)
                                    .collect();
                                remaining = keep;
                                continue 'outer;
                            }
                        }
                        None => {
                            let wide = c.iter().any(|v| v.re.rad().to_f64() >= 0.25);
                            if wide {
                                stuck = true;
                            }
                        }
                    }
                }
            }
            let rr: Vec<&ComplexBall> = remaining.iter().map(|&s| &rs.roots[s]).collect();
            let c = poly_from_roots(&rr, rs.precision);
            match round_to_int_poly(&c) {
                Some(g) => {
                    factors.push(g);
                    break;
                }
                None => {
                    stuck = true;
                    break;
                }
            }
        }
        if !stuck {
            factors.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| a.coeffs().cmp(b.coeffs())));
            let prod = factors.iter().fold(Poly::one(), |acc, g| &acc * g);
            if &prod == f {
                return Ok(factors);
            }
        }
        prec *= 2;
        if prec > 8192 {
            return Err(Error::PrecisionExhausted(prec as u64));
        }
    }
}

pub fn is_irreducible(f: &Poly<BigInt>) -> Result<bool> {
    Ok(factor_over_z(f)?.len() == 1)
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Integer roots of an integer polynomial.
pub fn integer_roots(f: &Poly<BigInt>) -> Vec<BigInt> {
    if f.is_zero() {
        return Vec::new();
    }
    let mut g = f.clone();
    let mut out = Vec::new();
    if g.coeff(0).is_zero() {
        out.push(BigInt::zero());
        while g.coeff(0).is_zero() {
            g = Poly::new(g.coeffs()[1..].to_vec());
        }
    }
    let c0 = g.coeff(0).abs();
    if g.degree() == 0 {
        return out;
    }
    // candidates from a certified numeric root set
    let sq = g.to_rational().gcd(&g.to_rational().derivative());
    let core = if sq.degree() > 0 {
        g.to_rational().div_rem(&sq).0.to_primitive_int()
    } else {
        g.clone()
    };
    if let Ok(rs) = isolate_roots(&core, 64) {
        for r in rs.roots.iter() {
            if !r.im.contains_zero() {
                continue;
            }
            let lo = r.re.lower().floor();
            let hi = r.re.upper().ceil();
            let mut x = lo;
            while x <= hi {
                if !x.is_zero() && (&c0 % &x.abs()).is_zero() && g.eval(&x).is_zero() && !out.contains(&x) {
                    out.push(x.clone());
                }
                x += BigInt::one();
            }
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_isolation() {
        let f = Poly::from_i64(&[1, 0, 1]);
        let rs = isolate_roots(&f, 64).unwrap();
        assert_eq!(rs.roots.len(), 2);
        assert_eq!(rs.conj, vec![1, 0]);
        assert!(rs.roots[0].im.contains(&Dyadic::from_i64(-1)));
        assert!(rs.roots[1].im.contains(&Dyadic::from_i64(1)));

        let g = Poly::from_i64(&[-2, 0, 1]);
        let rs = isolate_roots(&g, 100).unwrap();
        assert_eq!(rs.conj, vec![0, 1]);
        assert!((rs.roots[1].re.to_f64() - std::f64::consts::SQRT_2).abs() < 1e-15);
        assert!(rs.roots[1].re.rad_f64() <= 2f64.powi(-100));

        assert_eq!(
            complex_roots(&Poly::from_i64(&[1, -2, 1]), 64).unwrap_err(),
            Error::NotSquarefree
        );
    }

    #[test]
    fn cyclotomic_and_clusters() {
        let f = Poly::from_i64(&[1, 1, 1, 1, 1]);
        let rs = isolate_roots(&f, 80).unwrap();
        assert_eq!(rs.real_count(), 0);
        for r in &rs.roots {
            let a = r.abs().unwrap();
            assert!(a.contains(&Dyadic::one()));
        }
        // close real roots 1 and 1 + 2^-20
        let g = &Poly::from_i64(&[-1, 1]) * &Poly::new(vec![BigInt::from(-(1i64 << 20) - 1), BigInt::from(1i64 << 20)]);
        let rs = isolate_roots(&g, 64).unwrap();
        assert_eq!(rs.real_count(), 2);
    }

    #[test]
    fn factoring_over_z() {
        let f = &Poly::from_i64(&[1, 0, 1]) * &Poly::from_i64(&[-2, 0, 1]);
        let fs = factor_over_z(&f).unwrap();
        assert_eq!(fs, vec![Poly::from_i64(&[-2, 0, 1]), Poly::from_i64(&[1, 0, 1])]);
        assert!(is_irreducible(&Poly::from_i64(&[2, 0, 2, 0, 1])).unwrap());
        assert!(!is_irreducible(&Poly::from_i64(&[4, 0, 0, 0, 1])).unwrap());
        assert_eq!(
            integer_roots(&Poly::from_i64(&[-6, 11, -6, 1])),
            vec![BigInt::from(1), BigInt::from(2), BigInt::from(3)]
        );
    }
}
