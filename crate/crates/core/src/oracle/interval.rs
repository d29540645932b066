use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{RationalComplex, RationalMatrix};
use crate::error::{Error, Result};

/// Closed interval `[lo, hi]` with rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RationalInterval {
    pub fn point(x: BigRational) -> Self {
        RationalInterval { lo: x.clone(), hi: x }
    }

    pub fn new(lo: BigRational, hi: BigRational) -> Result<Self> {
        if lo > hi {
            return Err(Error::domain("interval with lo > hi"));
        }
        Ok(RationalInterval { lo, hi })
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contained_in(&self, lo: &BigRational, hi: &BigRational) -> bool {
        &self.lo >= lo && &self.hi <= hi
    }

    fn add(&self, other: &Self) -> Self {
        RationalInterval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    fn scale(&self, k: &BigRational) -> Self {
        let (a, b) = (&self.lo * k, &self.hi * k);
        if k.is_negative() {
            RationalInterval { lo: b, hi: a }
        } else {
            RationalInterval { lo: a, hi: b }
        }
    }

    fn mul(&self, other: &Self) -> Self {
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = products.iter().min().expect("four products").clone();
        let hi = products.iter().max().expect("four products").clone();
        RationalInterval { lo, hi }
    }

    fn neg(&self) -> Self {
        RationalInterval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    fn square(&self) -> Self {
        let (a, b) = (&self.lo * &self.lo, &self.hi * &self.hi);
        if !self.lo.is_negative() {
            RationalInterval { lo: a, hi: b }
        } else if !self.hi.is_positive() {
            RationalInterval { lo: b, hi: a }
        } else {
            RationalInterval {
                lo: BigRational::zero(),
                hi: a.max(b),
            }
        }
    }

    /// Widens to the enclosing grid of spacing `2^-bits`.
    fn round_out(&self, bits: u32) -> Self {
        let scale = BigInt::from(1) << bits;
        let down = |x: &BigRational| {
            let scaled = x * BigRational::from_integer(scale.clone());
            BigRational::new(scaled.numer().div_floor(scaled.denom()), scale.clone())
        };
        let up = |x: &BigRational| {
            let scaled = x * BigRational::from_integer(scale.clone());
            BigRational::new(scaled.numer().div_ceil(scaled.denom()), scale.clone())
        };
        RationalInterval {
            lo: down(&self.lo),
            hi: up(&self.hi),
        }
    }
}

/// Axis-aligned rectangle in the complex plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexInterval {
    pub re: RationalInterval,
    pub im: RationalInterval,
}

impl ComplexInterval {
    pub fn point(z: &RationalComplex) -> Self {
        ComplexInterval {
            re: RationalInterval::point(z.re.clone()),
            im: RationalInterval::point(z.im.clone()),
        }
    }

    pub fn contains(&self, z: &RationalComplex) -> bool {
        self.re.contains(&z.re) && self.im.contains(&z.im)
    }

    /// Largest distance from the center to an edge along either axis.
    pub fn radius(&self) -> BigRational {
        let half = BigRational::new(1.into(), 2.into());
        self.re.width().max(self.im.width()) * half
    }

    pub fn center(&self) -> (f64, f64) {
        let mid = |iv: &RationalInterval| {
            ((&iv.lo + &iv.hi) / BigRational::from_integer(2.into()))
                .to_f64()
                .unwrap_or(f64::NAN)
        };
        (mid(&self.re), mid(&self.im))
    }

    fn add(&self, other: &Self) -> Self {
        ComplexInterval {
            re: self.re.add(&other.re),
            im: self.im.add(&other.im),
        }
    }

    fn scale(&self, k: &BigRational) -> Self {
        ComplexInterval {
            re: self.re.scale(k),
            im: self.im.scale(k),
        }
    }

    fn square(&self) -> Self {
        let cross = self.re.mul(&self.im);
        ComplexInterval {
            re: self.re.square().add(&self.im.square().neg()),
            im: cross.add(&cross),
        }
    }

    fn round_out(&self, bits: u32) -> Self {
        ComplexInterval {
            re: self.re.round_out(bits),
            im: self.im.round_out(bits),
        }
    }
}

/// Complex counterpart of [`enclose_real_orbit`]: entry `t` holds a
/// rectangle around each node's exact iterate `z(t)`.
pub fn enclose_orbit(
    w: &RationalMatrix,
    c: &[RationalComplex],
    z0: &[RationalComplex],
    steps: usize,
    precision_bits: u32,
) -> Result<Vec<Vec<ComplexInterval>>> {
    let n = w.order();
    if c.len() != n || z0.len() != n {
        return Err(Error::dimension(format!(
            "network has {n} nodes but parameter has {} and state {} entries",
            c.len(),
            z0.len()
        )));
    }
    let zero = ComplexInterval::point(&RationalComplex::zero());
    let mut orbit = Vec::with_capacity(steps + 1);
    orbit.push(z0.iter().map(ComplexInterval::point).collect::<Vec<_>>());
    for _ in 0..steps {
        let z = orbit.last().expect("non-empty");
        let next = (0..n)
            .map(|k| {
                let mut input = zero.clone();
                for (j, zj) in z.iter().enumerate() {
                    let weight = w.get(k, j);
                    if !weight.is_zero() {
                        input = input.add(&zj.scale(weight));
                    }
                }
                input
                    .square()
                    .add(&ComplexInterval::point(&c[k]))
                    .round_out(precision_bits)
            })
            .collect();
        orbit.push(next);
    }
    Ok(orbit)
}

/// Rigorous enclosure of a real orbit: entry `t` contains the exact iterate
/// `z(t)` for every node. Endpoints are rounded outward to multiples of
/// `2^-precision_bits` after each step, so their size stays bounded.
pub fn enclose_real_orbit(
    w: &RationalMatrix,
    c: &[BigRational],
    z0: &[BigRational],
    steps: usize,
    precision_bits: u32,
) -> Result<Vec<Vec<RationalInterval>>> {
    let n = w.order();
    if c.len() != n || z0.len() != n {
        return Err(Error::dimension(format!(
            "network has {n} nodes but parameter has {} and state {} entries",
            c.len(),
            z0.len()
        )));
    }
    let mut orbit = Vec::with_capacity(steps + 1);
    orbit.push(z0.iter().cloned().map(RationalInterval::point).collect::<Vec<_>>());
    for _ in 0..steps {
        let z = orbit.last().expect("non-empty");
        let next = (0..n)
            .map(|k| {
                let mut input = RationalInterval::point(BigRational::zero());
                for (j, zj) in z.iter().enumerate() {
                    let weight = w.get(k, j);
                    if !weight.is_zero() {
                        input = input.add(&zj.scale(weight));
                    }
                }
                input
                    .square()
                    .add(&RationalInterval::point(c[k].clone()))
                    .round_out(precision_bits)
            })
            .collect();
        orbit.push(next);
    }
    Ok(orbit)
}
