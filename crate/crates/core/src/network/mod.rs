//! Coupled quadratic-map networks: weight matrices, the network map and
//! per-node escape detection.
//!
//! Node `k` updates as `z_k <- (sum_j W[k][j] z_j)^2 + c_k`. Orbits are
//! classified node by node: the first iterate with `|z_k| > R` marks the node
//! escaped for good, while the remaining nodes keep being iterated since they
//! may still be driven by it.

mod escape;
mod scalar;
mod weights;

pub(crate) use escape::check_budget;
pub use escape::{iterate_escape, EscapeRecord, EscapeScanner, NodeStatus, MAGNITUDE_CAP};
pub use scalar::Scalar;
pub use weights::{
    build_bipartite, build_bipartite_random, build_model, random_blocks, AdjacencyBlock,
    BlockWeights, ModelKind, SplitMix64, WeightMatrix,
};

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Complex,
    Real,
}

/// One value per node, either all complex or all real.
#[derive(Debug, Clone, PartialEq)]
pub enum NodeValues {
    Complex(Vec<Complex64>),
    Real(Vec<f64>),
}

/// The quadratic parameters `(c_1, ..., c_n)`.
pub type ParameterVector = NodeValues;

impl NodeValues {
    pub fn equi_complex(n: usize, c: Complex64) -> Self {
        NodeValues::Complex(vec![c; n])
    }

    pub fn equi_real(n: usize, c: f64) -> Self {
        NodeValues::Real(vec![c; n])
    }

    pub fn zeros(mode: Mode, n: usize) -> Self {
        match mode {
            Mode::Complex => NodeValues::Complex(vec![Complex64::new(0.0, 0.0); n]),
            Mode::Real => NodeValues::Real(vec![0.0; n]),
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            NodeValues::Complex(_) => Mode::Complex,
            NodeValues::Real(_) => Mode::Real,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            NodeValues::Complex(v) => v.len(),
            NodeValues::Real(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_finite(&self) -> bool {
        match self {
            NodeValues::Complex(v) => v.iter().all(|z| z.re.is_finite() && z.im.is_finite()),
            NodeValues::Real(v) => v.iter().all(|x| x.is_finite()),
        }
    }

    /// Complex view; real values are embedded on the real axis.
    pub fn to_complex(&self) -> Vec<Complex64> {
        match self {
            NodeValues::Complex(v) => v.clone(),
            NodeValues::Real(v) => v.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            NodeValues::Complex(v) => NodeValues::Complex(v.iter().map(|z| z.conj()).collect()),
            NodeValues::Real(v) => NodeValues::Real(v.clone()),
        }
    }

    /// Entry `k` of the result is entry `perm[k]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        weights::check_permutation(perm, self.len())?;
        Ok(match self {
            NodeValues::Complex(v) => NodeValues::Complex(perm.iter().map(|&p| v[p]).collect()),
            NodeValues::Real(v) => NodeValues::Real(perm.iter().map(|&p| v[p]).collect()),
        })
    }
}

/// A network state `(z_1, ..., z_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub values: NodeValues,
    /// Set when some coordinate stopped being a finite float.
    pub overflowed: bool,
}

impl StateVector {
    pub fn new(values: NodeValues) -> Self {
        let overflowed = !values.is_finite();
        StateVector { values, overflowed }
    }

    pub fn origin(mode: Mode, n: usize) -> Self {
        StateVector::new(NodeValues::zeros(mode, n))
    }
}

pub(crate) fn check_shapes(w: &WeightMatrix, c: &NodeValues, z: &NodeValues) -> Result<()> {
    let n = w.order();
    if c.len() != n || z.len() != n {
        return Err(Error::dimension(format!(
            "network has {n} nodes but parameter has {} and state {} entries",
            c.len(),
            z.len()
        )));
    }
    if c.mode() != z.mode() {
        return Err(Error::dimension(
            "parameter and state must both be real or both be complex",
        ));
    }
    Ok(())
}

/// Writes the image of `z` under the network map into `out`. Returns `false`
/// if any coordinate of the image is not finite.
#[inline]
pub fn step_into<T: Scalar>(w: &WeightMatrix, c: &[T], z: &[T], out: &mut [T]) -> bool {
    let n = w.order();
    let mut finite = true;
    for k in 0..n {
        let row = w.row(k);
        let mut input = T::ZERO;
        for j in 0..n {
            let weight = row[j];
            if weight != 0.0 {
                input = input.weighted_add(weight, z[j]);
            }
        }
        let next = input.square().add(c[k]);
        finite &= next.is_finite();
        out[k] = next;
    }
    finite
}

/// One application of the network map.
pub fn step(w: &WeightMatrix, c: &ParameterVector, z: &StateVector) -> Result<StateVector> {
    check_shapes(w, c, &z.values)?;
    let (values, finite) = match (c, &z.values) {
        (NodeValues::Complex(c), NodeValues::Complex(z)) => {
            let mut out = vec![Complex64::new(0.0, 0.0); z.len()];
            let ok = step_into(w, c, z, &mut out);
            (NodeValues::Complex(out), ok)
        }
        (NodeValues::Real(c), NodeValues::Real(z)) => {
            let mut out = vec![0.0; z.len()];
            let ok = step_into(w, c, z, &mut out);
            (NodeValues::Real(out), ok)
        }
        _ => unreachable!("modes checked above"),
    };
    Ok(StateVector {
        values,
        overflowed: !finite || z.overflowed,
    })
}
