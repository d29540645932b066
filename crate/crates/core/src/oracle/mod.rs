//! Exact rational reference for short orbits.
//!
//! Intended for tests and witness checks only: every squaring roughly doubles
//! the bit length of the iterates, so cost grows exponentially with the
//! number of steps. Nodes that have escaped and no longer feed any pending
//! node are dropped from the computation, which keeps witness checks cheap.
//!
//! [`enclose_real_orbit`] covers horizons beyond reach of exact arithmetic by
//! carrying rational intervals rounded outward to a fixed dyadic grid.

mod interval;

pub use interval::{enclose_orbit, enclose_real_orbit, ComplexInterval, RationalInterval};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::network::{EscapeRecord, NodeStatus, WeightMatrix};

pub fn ratio(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Exact value of a float (every finite `f64` is a dyadic rational).
pub fn exact_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_f64(x).ok_or_else(|| Error::domain(format!("{x} is not finite")))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalComplex {
    pub re: BigRational,
    pub im: BigRational,
}

impl RationalComplex {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        RationalComplex { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        RationalComplex {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn zero() -> Self {
        Self::real(BigRational::zero())
    }

    pub fn from_f64(re: f64, im: f64) -> Result<Self> {
        Ok(RationalComplex::new(exact_from_f64(re)?, exact_from_f64(im)?))
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn square(&self) -> Self {
        let two = BigRational::from_integer(BigInt::from(2));
        RationalComplex {
            re: &self.re * &self.re - &self.im * &self.im,
            im: two * &self.re * &self.im,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        RationalComplex {
            re: &self.re + &other.re,
            im: &self.im + &other.im,
        }
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        RationalComplex {
            re: &self.re * k,
            im: &self.im * k,
        }
    }

    pub fn conj(&self) -> Self {
        RationalComplex {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    /// Nearest-float view, for comparisons against the float iteration.
    pub fn to_f64(&self) -> (f64, f64) {
        (
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

/// Coupling matrix with exact rational entries, rows read as in
/// [`WeightMatrix`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    n: usize,
    entries: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::dimension("matrix needs at least one row"));
        }
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::dimension("rational matrix must be square"));
            }
            entries.extend(row);
        }
        Ok(RationalMatrix { n, entries })
    }

    /// The 3-node matrix with rows `(1,0,0)`, `(a,1,f)`, `(1,1,b)`.
    pub fn three_node(a: BigRational, b: BigRational, f: BigRational) -> Self {
        let one = BigRational::one;
        let zero = BigRational::zero;
        RationalMatrix {
            n: 3,
            entries: vec![one(), zero(), zero(), a, one(), f, one(), one(), b],
        }
    }

    /// Exact image of a float matrix.
    pub fn from_weights(w: &WeightMatrix) -> Result<Self> {
        let entries = w
            .entries()
            .iter()
            .map(|&x| exact_from_f64(x))
            .collect::<Result<Vec<_>>>()?;
        Ok(RationalMatrix {
            n: w.order(),
            entries,
        })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> &BigRational {
        &self.entries[row * self.n + col]
    }

    /// Float image, rounding each entry to nearest.
    pub fn to_weights(&self) -> Result<WeightMatrix> {
        WeightMatrix::new(
            self.n,
            self.entries.iter().map(|e| e.to_f64().unwrap_or(f64::NAN)).collect(),
        )
    }
}

fn check_lengths(w: &RationalMatrix, c: &[RationalComplex], z: &[RationalComplex]) -> Result<()> {
    if c.len() != w.n || z.len() != w.n {
        return Err(Error::dimension(format!(
            "network has {} nodes but parameter has {} and state {} entries",
            w.n,
            c.len(),
            z.len()
        )));
    }
    Ok(())
}

/// Image of node `k` under the network map.
fn node_image(w: &RationalMatrix, c: &[RationalComplex], z: &[RationalComplex], k: usize) -> RationalComplex {
    let mut input = RationalComplex::zero();
    for (j, zj) in z.iter().enumerate() {
        let weight = w.get(k, j);
        if !weight.is_zero() {
            input = input.add(&zj.scale(weight));
        }
    }
    input.square().add(&c[k])
}

/// Exact orbit `z(0) = z0, ..., z(steps)`.
pub fn exact_orbit(
    w: &RationalMatrix,
    c: &[RationalComplex],
    z0: &[RationalComplex],
    steps: usize,
) -> Result<Vec<Vec<RationalComplex>>> {
    check_lengths(w, c, z0)?;
    let mut orbit = Vec::with_capacity(steps + 1);
    orbit.push(z0.to_vec());
    for _ in 0..steps {
        let z = orbit.last().expect("non-empty");
        let next = (0..w.n).map(|k| node_image(w, c, z, k)).collect();
        orbit.push(next);
    }
    Ok(orbit)
}

/// Exact escape classification of the critical orbit (seeded at the origin),
/// with the same contract as the float iteration minus the magnitude cap.
pub fn classify_point_exact(
    w: &RationalMatrix,
    c: &[RationalComplex],
    budget: u32,
    radius: f64,
) -> Result<EscapeRecord> {
    let z0 = vec![RationalComplex::zero(); w.n];
    classify_orbit_exact(w, c, &z0, budget, radius)
}

/// Exact escape classification of the orbit of `z0`.
pub fn classify_orbit_exact(
    w: &RationalMatrix,
    c: &[RationalComplex],
    z0: &[RationalComplex],
    budget: u32,
    radius: f64,
) -> Result<EscapeRecord> {
    check_lengths(w, c, z0)?;
    if budget == 0 || !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::domain("need budget >= 1 and a positive finite radius"));
    }
    let n = w.n;
    let r = exact_from_f64(radius)?;
    let radius_sq = &r * &r;
    let mut statuses = vec![NodeStatus::Undecided; n];
    let mut z = z0.to_vec();
    let mut stop = budget;

    let mut t = 0u32;
    loop {
        for k in 0..n {
            if statuses[k] == NodeStatus::Undecided && z[k].norm_sqr() > radius_sq {
                statuses[k] = NodeStatus::Escaped(t);
            }
        }
        if statuses.iter().all(|s| *s != NodeStatus::Undecided) {
            stop = t;
            break;
        }
        if t == budget {
            break;
        }
        let needed = live_nodes(w, &statuses);
        let next: Vec<RationalComplex> = (0..n)
            .map(|k| {
                if needed[k] {
                    node_image(w, c, &z, k)
                } else {
                    RationalComplex::zero()
                }
            })
            .collect();
        z = next;
        t += 1;
    }

    for s in statuses.iter_mut() {
        if *s == NodeStatus::Undecided {
            *s = NodeStatus::Bounded;
        }
    }
    Ok(EscapeRecord {
        statuses,
        stop_iteration: stop,
        budget,
        radius,
    })
}

/// Pending nodes plus everything they read from, transitively.
fn live_nodes(w: &RationalMatrix, statuses: &[NodeStatus]) -> Vec<bool> {
    let n = w.n;
    let mut live: Vec<bool> = statuses.iter().map(|s| *s == NodeStatus::Undecided).collect();
    let mut stack: Vec<usize> = (0..n).filter(|&k| live[k]).collect();
    while let Some(k) = stack.pop() {
        for j in 0..n {
            if !live[j] && !w.get(k, j).is_zero() {
                live[j] = true;
                stack.push(j);
            }
        }
    }
    live
}
