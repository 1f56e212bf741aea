//! Ordinary least squares for log-log growth fits.

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

fn exact(v: f64) -> Result<BigRational> {
    BigRational::from_float(v).ok_or_else(|| Error::DegenerateInput(format!("non-finite input {v}")))
}

/// Least-squares line through `(x, y)` pairs. The inputs are taken at their
/// exact binary values and the normal equations are solved in rationals, so
/// the result does not depend on summation order.
pub fn slope_fit(pairs: &[(f64, f64)]) -> Result<LinearFit> {
    if pairs.len() < 3 {
        return Err(Error::DegenerateInput(format!("{} points, need at least 3", pairs.len())));
    }
    let n = BigRational::from_integer(pairs.len().into());
    let (mut sx, mut sy, mut sxx, mut sxy, mut syy) =
        (BigRational::zero(), BigRational::zero(), BigRational::zero(), BigRational::zero(), BigRational::zero());
    for &(x, y) in pairs {
        let (x, y) = (exact(x)?, exact(y)?);
        sxx += &x * &x;
        sxy += &x * &y;
        syy += &y * &y;
        sx += x;
        sy += y;
    }
    let vxx = &n * &sxx - &sx * &sx;
    let vxy = &n * &sxy - &sx * &sy;
    let vyy = &n * &syy - &sy * &sy;
    if vxx.is_zero() {
        return Err(Error::DegenerateInput("all x values coincide".into()));
    }
    let slope = &vxy / &vxx;
    let intercept = (&sy - &slope * &sx) / &n;
    // a constant response is fitted perfectly
    let r2 = if vyy.is_zero() { BigRational::from_integer(1.into()) } else { &vxy * &vxy / (&vxx * &vyy) };
    let f = |q: &BigRational| q.to_f64().unwrap_or(f64::NAN);
    Ok(LinearFit { slope: f(&slope), intercept: f(&intercept), r_squared: f(&r2) })
}

/// Fit of `log y` against `log x` for positive data.
pub fn log_log_fit(points: &[(f64, f64)]) -> Result<LinearFit> {
    let logs = points
        .iter()
        .map(|&(x, y)| {
            if x > 0.0 && y > 0.0 {
                Ok((x.ln(), y.ln()))
            } else {
                Err(Error::DegenerateInput(format!("non-positive point ({x}, {y})")))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    slope_fit(&logs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_lines() {
        let sq: Vec<(f64, f64)> = (1..6).map(|x| (x as f64, (x * x) as f64)).collect();
        let f = log_log_fit(&sq).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        let flat = slope_fit(&[(1.0, 3.0), (2.0, 3.0), (4.0, 3.0)]).unwrap();
        assert_eq!(flat.slope, 0.0);
        assert_eq!(flat.intercept, 3.0);
        assert!(slope_fit(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(slope_fit(&[(1.0, 1.0), (1.0, 2.0), (1.0, 3.0)]).is_err());
    }
}
